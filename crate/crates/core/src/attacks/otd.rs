//! Key recovery against sparse `S` with block-diagonal `Q`.
//!
//! Inverting the first `k0` block columns of `G'` gives blocks
//! `g_ij = q_i·s_ij`. A weight-`m` polynomial `τ` is accepted for block row
//! `i` when every `τ^{-1}·g_ij` has weight `0` or `m`; a full recovery must
//! then rebuild `G'_{≤k}` exactly.

use crate::attacks::stern::{Stern, SternConfig};
use crate::bits::BitVec;
use crate::circulant::{split_blocks, QcBlockMatrix, RingPoly};
use crate::error::{Error, Result};
use crate::mceliece::PublicKey;
use crate::rng::substream;

/// Enumeration limit for strategy 1, in tuples per block.
pub const MAX_TUPLES: u64 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OtdRowRecovery {
    pub row: usize,
    /// Validated shifts `x^l·q_i`, sorted and deduplicated.
    pub candidates: Vec<RingPoly>,
    /// `τ^{-1}·g_ij` for the first candidate: block row `i` of `S` shifted
    /// by the inverse of the same `x^l`.
    pub s_row: Vec<RingPoly>,
}

/// `(G'_{≤k})^{-1}`, whose block `(i, j)` is `q_i·s_ij` on weak keys.
pub fn inverse_head(pk: &PublicKey) -> Result<QcBlockMatrix> {
    pk.gpub.column_blocks(0, pk.params.k0()).inverse()
}

/// Smallest `l` with `b = x^l·a`.
pub fn shift_between(a: &RingPoly, b: &RingPoly) -> Option<usize> {
    (0..a.p()).find(|&l| a.rotate(l) == *b)
}

fn validate(ginv: &QcBlockMatrix, i: usize, tau: &RingPoly, m: usize) -> Option<Vec<RingPoly>> {
    if tau.weight() != m {
        return None;
    }
    let inv = tau.inverse().ok()?;
    let row: Vec<RingPoly> = (0..ginv.cols()).map(|j| &inv * ginv.block(i, j)).collect();
    row.iter()
        .all(|s| s.weight() == 0 || s.weight() == m)
        .then_some(row)
}

/// Nonzero blocks of row `i`, lightest first.
fn blocks_by_weight(ginv: &QcBlockMatrix, i: usize) -> Vec<usize> {
    let mut js: Vec<usize> = (0..ginv.cols())
        .filter(|&j| !ginv.block(i, j).is_zero())
        .collect();
    js.sort_by_key(|&j| (ginv.block(i, j).weight(), j));
    js
}

fn row_recovery(
    ginv: &QcBlockMatrix,
    i: usize,
    m: usize,
    candidates: impl IntoIterator<Item = RingPoly>,
) -> Option<OtdRowRecovery> {
    let mut valid: Vec<(RingPoly, Vec<RingPoly>)> = candidates
        .into_iter()
        .filter_map(|tau| validate(ginv, i, &tau, m).map(|row| (tau, row)))
        .collect();
    if valid.is_empty() {
        return None;
    }
    valid.sort_by(|a, b| a.0.support().cmp(b.0.support()));
    valid.dedup_by(|a, b| a.0 == b.0);
    let s_row = valid[0].1.clone();
    Some(OtdRowRecovery {
        row: i,
        candidates: valid.into_iter().map(|(t, _)| t).collect(),
        s_row,
    })
}

/// Rebuild `G'_{≤k} = S'^{-1}·diag(τ_i)^{-1}` and compare with the key.
fn verify(pk: &PublicKey, recs: &[OtdRowRecovery]) -> bool {
    let k0 = pk.params.k0();
    let p = pk.params.p;
    if recs.len() != k0 {
        return false;
    }
    let mut s = QcBlockMatrix::zeros(p, k0, k0);
    let mut tau_inv = QcBlockMatrix::zeros(p, k0, k0);
    for rec in recs {
        for (j, b) in rec.s_row.iter().enumerate() {
            s.set_block(rec.row, j, b.clone());
        }
        match rec.candidates[0].inverse() {
            Ok(inv) => tau_inv.set_block(rec.row, rec.row, inv),
            Err(_) => return false,
        }
    }
    let Ok(s_inv) = s.inverse() else {
        return false;
    };
    s_inv
        .try_mul(&tau_inv)
        .is_ok_and(|head| head == pk.gpub.column_blocks(0, k0))
}

fn per_row(
    pk: &PublicKey,
    mut recover_row: impl FnMut(&QcBlockMatrix, usize) -> Option<OtdRowRecovery>,
) -> Result<Vec<OtdRowRecovery>> {
    let ginv = inverse_head(pk).map_err(|_| Error::NoCandidate)?;
    let recs = (0..pk.params.k0())
        .map(|i| recover_row(&ginv, i))
        .collect::<Option<Vec<_>>>()
        .ok_or(Error::NoCandidate)?;
    if verify(pk, &recs) {
        Ok(recs)
    } else {
        Err(Error::NoCandidate)
    }
}

/// Enumerate `m`-subsets of the support of every nonzero `g_ij` within the
/// tuple budget. Any validated candidate of another strategy is an
/// `m`-subset of some `g_ij`, so it is found here too.
pub fn otd_strategy1(pk: &PublicKey) -> Result<Vec<OtdRowRecovery>> {
    let m = pk.params.m;
    per_row(pk, |ginv, i| {
        let cands: Vec<RingPoly> = blocks_by_weight(ginv, i)
            .into_iter()
            .filter(|&j| {
                let w = ginv.block(i, j).weight() as u64;
                crate::analysis::log2_binomial(w, m as u64)
                    .is_some_and(|t| t <= (MAX_TUPLES as f64).log2())
            })
            .flat_map(|j| {
                let g = ginv.block(i, j);
                let support: Vec<usize> = g.support().collect();
                itertools::Itertools::combinations(support.into_iter(), m)
                    .map(|t| RingPoly::from_support(g.p(), t))
                    .collect::<Vec<_>>()
            })
            .collect();
        row_recovery(ginv, i, m, cands)
    })
}

/// Intersect each nonzero `g_ij` with every rotation of every nonzero
/// `g_ij'` in the same row; all of them are multiples of `q_i`, so
/// weight-`m` intersections are likely shifts of it.
pub fn otd_strategy2(pk: &PublicKey) -> Result<Vec<OtdRowRecovery>> {
    let m = pk.params.m;
    per_row(pk, |ginv, i| {
        let js = blocks_by_weight(ginv, i);
        let mut cands = Vec::new();
        for &a in &js {
            for &b in &js {
                let (ga, gb) = (ginv.block(i, a), ginv.block(i, b));
                let first = if a == b { 1 } else { 0 };
                cands.extend(
                    (first..ga.p())
                        .map(|d| ga.hadamard(&gb.rotate(d)).expect("same p"))
                        .filter(|h| h.weight() == m),
                );
            }
        }
        row_recovery(ginv, i, m, cands)
    })
}

/// Stern on the code spanned by block row `i` of the inverse, normalised by
/// its first invertible block; its light words are shifts of `[s_i0 | …]`.
pub fn otd_strategy3(pk: &PublicKey, cfg: &SternConfig) -> Result<Vec<OtdRowRecovery>> {
    let m = pk.params.m;
    let k0 = pk.params.k0();
    let p = pk.params.p;
    let w = m * k0;
    let ginv = inverse_head(pk).map_err(|_| Error::NotFound)?;
    let mut recs = Vec::with_capacity(k0);
    for i in 0..k0 {
        let Some(norm) = (0..k0).find_map(|j| ginv.block(i, j).inverse().ok()) else {
            return Err(Error::NotFound);
        };
        let head = QcBlockMatrix::from_blocks(
            p,
            1,
            k0,
            (0..k0).map(|j| &norm * ginv.block(i, j)).collect(),
        )?;
        let stern = Stern::new(&head.to_dense(), w, cfg.g, cfg.l).map_err(|_| Error::NotFound)?;
        let rec = (0..cfg.max_iterations).find_map(|it| {
            let words = stern.iteration(&mut substream(cfg.seed ^ ((i as u64) << 32), it as u64));
            words.iter().find_map(|c| s_row_candidate(&ginv, i, m, c))
        });
        recs.push(rec.ok_or(Error::NotFound)?);
    }
    if verify(pk, &recs) {
        Ok(recs)
    } else {
        Err(Error::NotFound)
    }
}

/// Accept `c` as a shifted `S` row when `τ = g_ij·c_j^{-1}` has weight `m`
/// and reproduces every `g_ij`.
fn s_row_candidate(ginv: &QcBlockMatrix, i: usize, m: usize, c: &BitVec) -> Option<OtdRowRecovery> {
    let blocks = split_blocks(c, ginv.p()).ok()?;
    if blocks.iter().any(|b| b.weight() != 0 && b.weight() != m) {
        return None;
    }
    let j = (0..blocks.len()).find(|&j| blocks[j].weight() == m)?;
    let tau = ginv.block(i, j) * &blocks[j].inverse().ok()?;
    if tau.weight() != m || (0..blocks.len()).any(|j| &tau * &blocks[j] != *ginv.block(i, j)) {
        return None;
    }
    Some(OtdRowRecovery {
        row: i,
        candidates: vec![tau],
        s_row: blocks,
    })
}
