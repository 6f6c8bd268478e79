//! Closed-form work factors for Stern-type attacks and operation counts for
//! encryption and decryption. Everything is evaluated in the log2 domain.

use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::params::SystemParams;

/// Upper end of the `g` search box.
pub const G_MAX: usize = 40;
/// Upper end of the `l` search box.
pub const L_MAX: usize = 64;
/// Work factor defining the security threshold, in log2.
pub const TARGET_LOG2_WF: f64 = 80.0;

/// `log2(a + b)` from `log2 a`, `log2 b`.
fn log2_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (1.0 + (lo - hi).exp2()).log2()
}

/// Table of `log2 k!` for `k <= n`.
#[derive(Clone, Debug)]
pub struct LogFactorials {
    table: Vec<f64>,
}

impl LogFactorials {
    pub fn new(n: usize) -> Self {
        Self {
            table: (0..=n).map(|k| ln_gamma(k as f64 + 1.0) / LN_2).collect(),
        }
    }

    pub fn max(&self) -> usize {
        self.table.len() - 1
    }

    /// `log2 C(n, k)`, `None` when `k < 0` or `k > n`.
    pub fn binomial(&self, n: i64, k: i64) -> Option<f64> {
        if n < 0 || k < 0 || k > n {
            return None;
        }
        let (n, k) = (n as usize, k as usize);
        Some(self.table[n] - self.table[k] - self.table[n - k])
    }
}

/// `log2 C(n, k)` straight from log-gamma.
pub fn log2_binomial(n: u64, k: u64) -> Option<f64> {
    if k > n {
        return None;
    }
    let lf = |x: u64| ln_gamma(x as f64 + 1.0);
    Some((lf(n) - lf(k) - lf(n - k)) / LN_2)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WorkFactorReport {
    pub n_s: usize,
    pub k_s: usize,
    pub w: usize,
    pub a_w: f64,
    pub g_opt: usize,
    pub l_opt: usize,
    /// Per-iteration success probability, capped at 0.
    pub log2_p: f64,
    /// Binary operations per iteration.
    pub log2_n: f64,
    /// Expected iterations, `-log2_p`.
    pub log2_c: f64,
    pub log2_wf: f64,
    pub speedup12_applied: bool,
}

/// `log2 P` for one `(g, l)`; `None` when a binomial argument is negative.
pub fn stern_log2_p(
    lf: &LogFactorials,
    n_s: usize,
    k_s: usize,
    w: usize,
    a_w: f64,
    g: usize,
    l: usize,
) -> Option<f64> {
    let (n, k, w, g, l) = (n_s as i64, k_s as i64, w as i64, g as i64, l as i64);
    let h = k / 2;
    let b = |a, c| lf.binomial(a, c);
    let first = b(w, g)? + b(n - w, h - g)? - b(n, h)?;
    let second = b(w - g, g)? + b(n - h - w + g, h - g)? - b(n - h, h)?;
    let window = b(n - k - w + 2 * g, l)? - b(n - k, l)?;
    Some((a_w.log2() + first + second + window).min(0.0))
}

/// `log2 N` for one `(g, l)`.
pub fn stern_log2_n(lf: &LogFactorials, n_s: usize, k_s: usize, g: usize, l: usize) -> f64 {
    let r = (n_s - k_s) as f64;
    let log_r = r.log2();
    let cb = lf
        .binomial((k_s / 2) as i64, g as i64)
        .unwrap_or(f64::NEG_INFINITY);
    let elimination = log2_add(3.0 * log_r - 1.0, (k_s as f64).log2() + 2.0 * log_r);
    let lists = (2.0 * g as f64 * l as f64).log2() + cb;
    let collisions = (2.0 * g as f64).log2() + log_r + 2.0 * cb - l as f64;
    log2_add(log2_add(elimination, lists), collisions)
}

/// Minimise `N / P` over the `(g, l)` box using a prebuilt table.
pub fn stern_wf_with(
    lf: &LogFactorials,
    n_s: usize,
    k_s: usize,
    w: usize,
    a_w: f64,
) -> Result<WorkFactorReport> {
    if w == 0 || w > n_s || k_s == 0 || k_s >= n_s || !(a_w >= 1.0) {
        return Err(Error::InvalidParams(format!(
            "need 0 < w <= n_S, 0 < k_S < n_S and A_w >= 1 (n_S={n_s}, k_S={k_s}, w={w}, A_w={a_w})"
        )));
    }
    if lf.max() < n_s {
        return Err(Error::InvalidParams("log-factorial table too short".into()));
    }
    let mut best: Option<WorkFactorReport> = None;
    for g in 1..=(k_s / 2).min(G_MAX) {
        for l in 1..=(n_s - k_s).min(L_MAX) {
            let Some(log2_p) = stern_log2_p(lf, n_s, k_s, w, a_w, g, l) else {
                continue;
            };
            let log2_n = stern_log2_n(lf, n_s, k_s, g, l);
            let log2_wf = log2_n - log2_p;
            if best.as_ref().is_none_or(|b| log2_wf < b.log2_wf) {
                best = Some(WorkFactorReport {
                    n_s,
                    k_s,
                    w,
                    a_w,
                    g_opt: g,
                    l_opt: l,
                    log2_p,
                    log2_n,
                    log2_c: -log2_p,
                    log2_wf,
                    speedup12_applied: false,
                });
            }
        }
    }
    best.ok_or(Error::InfeasibleWeight)
}

/// Stern work factor for finding one of `A_w` weight-`w` words in an
/// `(n_S, k_S)` code, with `c = 1/P`.
pub fn stern_wf(n_s: usize, k_s: usize, w: usize, a_w: f64) -> Result<WorkFactorReport> {
    stern_wf_with(&LogFactorials::new(n_s), n_s, k_s, w, a_w)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DualAttackReport {
    pub report: WorkFactorReport,
    /// Smallest `w` with work factor at least `2^80`.
    pub threshold_w: Option<usize>,
}

/// Attack on the dual of the public code: `n_S = n`, `k_S = n - k`,
/// `w = d_c·m`, `A_w = n - k`.
pub fn dual_attack_wf(params: &SystemParams) -> Result<DualAttackReport> {
    let (n, r) = (params.n(), params.n() - params.k());
    let lf = LogFactorials::new(n);
    let wf = |w: usize| stern_wf_with(&lf, n, r, w, r as f64);
    let report = wf(params.dc() * params.m)?;
    Ok(DualAttackReport {
        threshold_w: threshold_weight(|w| wf(w).map(|rep| rep.log2_wf), 2, n / 2),
        report,
    })
}

/// Least `w` in `[lo, hi]` with `f(w) >= 80`, assuming `f` non-decreasing.
fn threshold_weight(f: impl Fn(usize) -> Result<f64>, lo: usize, hi: usize) -> Option<usize> {
    let reaches = |w: usize| f(w).map(|v| v >= TARGET_LOG2_WF).unwrap_or(true);
    if !reaches(hi) {
        return None;
    }
    if reaches(lo) {
        return Some(lo);
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if reaches(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Decoding attack on the code extended by `r` shifted ciphertexts:
/// `n_S = n`, `k_S = k + r`, `w = t'`, `A_w = r`. `r = 0` is read as the
/// single-ciphertext extension.
pub fn decoding_attack_wf(params: &SystemParams, r: usize) -> Result<WorkFactorReport> {
    decoding_wf_with(&LogFactorials::new(params.n()), params, r)
}

fn decoding_wf_with(
    lf: &LogFactorials,
    params: &SystemParams,
    r: usize,
) -> Result<WorkFactorReport> {
    let r = r.max(1);
    if r > params.p {
        return Err(Error::InvalidParams(format!(
            "r = {r} exceeds p = {}",
            params.p
        )));
    }
    stern_wf_with(lf, params.n(), params.k() + r, params.t_prime, r as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecodingScan {
    /// `(r, log2 WF)` for every feasible `r`.
    pub curve: Vec<(usize, f64)>,
    pub best_r: usize,
    pub best: WorkFactorReport,
}

/// Evaluate the decoding attack for every `r` in `1..=r_max` and keep the
/// cheapest.
pub fn decoding_attack_scan(params: &SystemParams, r_max: usize) -> Result<DecodingScan> {
    let r_max = r_max.clamp(1, params.p);
    let lf = LogFactorials::new(params.n());
    let reports: Vec<(usize, WorkFactorReport)> = (1..=r_max)
        .into_par_iter()
        .filter_map(|r| decoding_wf_with(&lf, params, r).ok().map(|rep| (r, rep)))
        .collect();
    let (best_r, best) = reports
        .iter()
        .min_by(|a, b| a.1.log2_wf.total_cmp(&b.1.log2_wf))
        .cloned()
        .ok_or(Error::InfeasibleWeight)?;
    Ok(DecodingScan {
        curve: reports.iter().map(|(r, rep)| (*r, rep.log2_wf)).collect(),
        best_r,
        best,
    })
}

/// Decoding attack on a generic `(n, k)` McEliece instance with `t` errors
/// using the single-ciphertext extension.
pub fn generic_decoding_wf(n: usize, k: usize, t: usize) -> Result<WorkFactorReport> {
    stern_wf(n, k + 1, t, 1.0)
}

/// The (1024, 524), t = 50 Goppa-code instance.
pub fn original_mceliece_wf() -> Result<WorkFactorReport> {
    generic_decoding_wf(1024, 524, 50)
}

/// Divide the work factor by 12; refuses a second application.
pub fn apply_speedup12(report: &WorkFactorReport) -> Result<WorkFactorReport> {
    if report.speedup12_applied {
        return Err(Error::SpeedupAlreadyApplied);
    }
    let shift = 12f64.log2();
    Ok(WorkFactorReport {
        log2_wf: report.log2_wf - shift,
        log2_c: report.log2_c - shift,
        speedup12_applied: true,
        ..report.clone()
    })
}

/// Cost-model version string printed with every OTD estimate.
pub const OTD_COST_MODEL: &str = "otd-v1: s1 = C(m^2,m)*(p^2 + m^2*p); s2 = p*(p + p^2 + m^2*p); s3 = stern_wf((n0-1)p, p, m(n0-1), p)";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OtdReport {
    /// Enumerate `m`-subsets of the `m^2` support, validating each by
    /// inversion (`p^2`) and multiplication (`m^2·p`).
    pub strategy1_log2: f64,
    /// Every one of the `p` shifts costs a Hadamard product (`p`) plus one
    /// validation.
    pub strategy2_log2: f64,
    /// Stern on the `[S_{i,0} | … | S_{i,n0-2}]` code.
    pub strategy3: WorkFactorReport,
    pub cost_model: &'static str,
}

pub fn otd_wf(params: &SystemParams) -> Result<OtdReport> {
    let (p, m) = (params.p as f64, params.m as u64);
    let validation = (p * p + (m * m) as f64 * p).log2();
    let tuples = log2_binomial(m * m, m).ok_or(Error::InfeasibleWeight)?;
    let n_s = params.k0() * params.p;
    let strategy3 = stern_wf(n_s, params.p, params.m * params.k0(), params.p as f64)?;
    Ok(OtdReport {
        strategy1_log2: tuples + validation,
        strategy2_log2: p.log2() + log2_add(p.log2(), validation),
        strategy3,
        cost_model: OTD_COST_MODEL,
    })
}

/// Binary operations for one product in `GF(2)[x]/(x^p+1)` under a Toom-3
/// recursion (five half-size-thirds products plus linear recombination)
/// followed by the `x^p + 1` fold.
pub fn toom3_product_cost(p: usize) -> f64 {
    fn t(n: usize) -> f64 {
        if n <= 4 {
            return (n * n) as f64;
        }
        let c = n.div_ceil(3);
        5.0 * t(c) + 5.0 * c as f64
    }
    t(p) + p as f64
}

pub const COMPLEXITY_MODEL: &str =
    "toom3-v1: M(p) = T(p) + p, T(n) = 5T(ceil(n/3)) + 5ceil(n/3), T(n<=4) = n^2; x*Q costs n*m";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexityReport {
    pub i_ave: f64,
    pub q: u32,
    pub product_cost: f64,
    pub c_mul_encrypt: f64,
    pub c_enc: f64,
    pub c_mul_xq: f64,
    pub c_spa: f64,
    pub c_mul_s: f64,
    pub c_dec: f64,
    pub c_enc_per_bit: f64,
    pub c_dec_per_bit: f64,
    pub cost_model: &'static str,
}

/// Sum-product cost `I_ave·n·[q(8d_v + 12R - 11) + d_v]`.
pub fn spa_cost(params: &SystemParams, i_ave: f64, q: u32) -> f64 {
    let (dv, r) = (params.dv as f64, params.rate());
    i_ave * params.n() as f64 * (q as f64 * (8.0 * dv + 12.0 * r - 11.0) + dv)
}

pub fn complexity_estimate(params: &SystemParams, i_ave: f64, q: u32) -> Result<ComplexityReport> {
    if !(i_ave > 0.0) || q == 0 || params.n0 < 2 {
        return Err(Error::InvalidParams(format!(
            "need I_ave > 0, q >= 1 and n0 >= 2 (got {i_ave}, {q}, {})",
            params.n0
        )));
    }
    let (n0, k0, p) = (params.n0 as f64, params.k0() as f64, params.p as f64);
    let mp = toom3_product_cost(params.p);
    // each output block sums k0 products
    let c_mul_encrypt = k0 * n0 * mp + (k0 - 1.0) * n0 * p;
    let c_enc = c_mul_encrypt + params.n() as f64;
    let c_mul_xq = (params.n() * params.m) as f64;
    let c_spa = spa_cost(params, i_ave, q);
    let c_mul_s = k0 * k0 * mp + k0 * (k0 - 1.0) * p;
    let c_dec = c_mul_xq + c_spa + c_mul_s;
    let k = params.k() as f64;
    Ok(ComplexityReport {
        i_ave,
        q,
        product_cost: mp,
        c_mul_encrypt,
        c_enc,
        c_mul_xq,
        c_spa,
        c_mul_s,
        c_dec,
        c_enc_per_bit: c_enc / k,
        c_dec_per_bit: c_dec / k,
        cost_model: COMPLEXITY_MODEL,
    })
}

/// `ceil(k0·n0·p / 8)`.
pub fn keysize(params: &SystemParams) -> usize {
    params.key_size_bytes()
}
