//! Key generation, encryption and decryption.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::{BitMatrix, BitVec};
use crate::circulant::{QcBlockMatrix, RingPoly};
use crate::code::{DifferenceFamily, QcLdpcCode};
use crate::decoder::{Decoder, DecoderConfig, TannerGraph};
use crate::error::{Error, Result};
use crate::params::SystemParams;

const SAMPLE_BUDGET: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KeyVariant {
    /// Dense circulant-block `S`; `Q` with row/column weight `m` spread
    /// over arbitrary blocks.
    Hardened,
    /// Sparse `S` whose non-null blocks have weight `m`; block-diagonal `Q`.
    WeakOtd,
    /// Dense `S`; `Q` a quasi-cyclic permutation (`m = 1`).
    Permutation,
}

impl KeyVariant {
    pub const ALL: [KeyVariant; 3] = [Self::Hardened, Self::WeakOtd, Self::Permutation];

    pub fn code(self) -> u8 {
        match self {
            Self::Hardened => 0,
            Self::WeakOtd => 1,
            Self::Permutation => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.code() == code)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Hardened => "hardened",
            Self::WeakOtd => "weak-otd",
            Self::Permutation => "permutation",
        }
    }
}

impl fmt::Display for KeyVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KeyVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hardened" => Ok(Self::Hardened),
            "weak-otd" | "weak_otd" => Ok(Self::WeakOtd),
            "permutation" => Ok(Self::Permutation),
            other => Err(Error::InvalidParams(format!(
                "unknown key variant {other:?}"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicKey {
    pub params: SystemParams,
    pub variant: KeyVariant,
    /// `S^{-1}·G·Q^{-1}`, `k0×n0` blocks.
    pub gpub: QcBlockMatrix,
}

impl PublicKey {
    pub fn new(params: SystemParams, variant: KeyVariant, gpub: QcBlockMatrix) -> Result<Self> {
        if gpub.p() != params.p || gpub.rows() != params.k0() || gpub.cols() != params.n0 {
            return Err(Error::ShapeMismatch(format!(
                "public generator must be {}×{} blocks of size {}",
                params.k0(),
                params.n0,
                params.p
            )));
        }
        Ok(Self {
            params,
            variant,
            gpub,
        })
    }

    /// Public-key size in bits, `k0·n0·p`.
    pub fn size_bits(&self) -> usize {
        self.gpub.rows() * self.gpub.cols() * self.gpub.p()
    }

    pub fn encode(&self, u: &BitVec) -> Result<BitVec> {
        self.gpub.left_mul_bits(u)
    }
}

#[derive(Clone, Debug)]
pub struct PrivateKey {
    params: SystemParams,
    variant: KeyVariant,
    code: QcLdpcCode,
    s: QcBlockMatrix,
    q: QcBlockMatrix,
    graph: TannerGraph,
}

impl PrivateKey {
    /// Reassemble a key from `H`, `S` and `Q`, checking shapes and that both
    /// transforms are invertible.
    pub fn from_parts(
        params: SystemParams,
        variant: KeyVariant,
        h: QcBlockMatrix,
        s: QcBlockMatrix,
        q: QcBlockMatrix,
    ) -> Result<Self> {
        let p = params.p;
        let shape_ok =
            |m: &QcBlockMatrix, r: usize, c: usize| m.p() == p && m.rows() == r && m.cols() == c;
        if !shape_ok(&h, 1, params.n0)
            || !shape_ok(&s, params.k0(), params.k0())
            || !shape_ok(&q, params.n0, params.n0)
        {
            return Err(Error::ShapeMismatch(
                "private key blocks do not match parameters".into(),
            ));
        }
        let family = DifferenceFamily::new(
            p,
            h.blocks().iter().map(|b| b.support().collect()).collect(),
        )?;
        let code = QcLdpcCode::from_family(family)?;
        s.inverse()?;
        q.inverse()?;
        Ok(Self::assemble(params, variant, code, s, q))
    }

    fn assemble(
        params: SystemParams,
        variant: KeyVariant,
        code: QcLdpcCode,
        s: QcBlockMatrix,
        q: QcBlockMatrix,
    ) -> Self {
        let graph = TannerGraph::from_qc(code.h());
        Self {
            params,
            variant,
            code,
            s,
            q,
            graph,
        }
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn variant(&self) -> KeyVariant {
        self.variant
    }

    pub fn code(&self) -> &QcLdpcCode {
        &self.code
    }

    pub fn h(&self) -> &QcBlockMatrix {
        self.code.h()
    }

    pub fn s(&self) -> &QcBlockMatrix {
        &self.s
    }

    pub fn q(&self) -> &QcBlockMatrix {
        &self.q
    }

    /// `H' = H·Q^T`, the parity-check matrix of the public code.
    pub fn public_parity_check(&self) -> QcBlockMatrix {
        self.h()
            .try_mul(&self.q.transpose())
            .expect("shapes fixed at construction")
    }

    /// `S^{-1}·G·Q^{-1}`.
    pub fn derive_public(&self) -> Result<PublicKey> {
        let gpub = self
            .s
            .inverse()?
            .try_mul(self.code.g())?
            .try_mul(&self.q.inverse()?)?;
        PublicKey::new(self.params, self.variant, gpub)
    }
}

/// Sample a key pair. The permutation variant always uses `m = 1`.
pub fn keygen<R: Rng + ?Sized>(
    params: SystemParams,
    variant: KeyVariant,
    rng: &mut R,
) -> Result<(PrivateKey, PublicKey)> {
    let params = match variant {
        KeyVariant::Permutation => SystemParams { m: 1, ..params },
        _ => params,
    };
    params.validate()?;
    let code = QcLdpcCode::sample(params.n0, params.dv, params.p, rng)?;
    let (s, s_inv) = match variant {
        KeyVariant::WeakOtd => sample_sparse_s(&params, rng)?,
        _ => sample_dense_s(&params, rng)?,
    };
    let (q, q_inv) = match variant {
        KeyVariant::Hardened => sample_spread_q(&params, rng)?,
        KeyVariant::WeakOtd => sample_block_diagonal_q(&params, rng)?,
        KeyVariant::Permutation => sample_permutation_q(&params, rng),
    };
    let gpub = s_inv.try_mul(code.g())?.try_mul(&q_inv)?;
    let pk = PublicKey::new(params, variant, gpub)?;
    Ok((PrivateKey::assemble(params, variant, code, s, q), pk))
}

fn retry_inverse<R: Rng + ?Sized>(
    what: &'static str,
    rng: &mut R,
    mut draw: impl FnMut(&mut R) -> QcBlockMatrix,
) -> Result<(QcBlockMatrix, QcBlockMatrix)> {
    for _ in 0..SAMPLE_BUDGET {
        let m = draw(rng);
        if let Ok(inv) = m.inverse() {
            return Ok((m, inv));
        }
    }
    Err(Error::ExhaustedRetries(what))
}

fn sample_dense_s<R: Rng + ?Sized>(
    params: &SystemParams,
    rng: &mut R,
) -> Result<(QcBlockMatrix, QcBlockMatrix)> {
    let (p, k0) = (params.p, params.k0());
    retry_inverse("invertible dense S", rng, |rng| {
        let blocks = (0..k0 * k0).map(|_| RingPoly::random(p, rng)).collect();
        QcBlockMatrix::from_blocks(p, k0, k0, blocks).expect("k0×k0 blocks")
    })
}

/// Null/non-null pattern drawn uniformly among invertible binary matrices
/// with at least two non-null blocks per row (one when `k0 = 2`, where no
/// such invertible pattern exists); non-null blocks have weight `m`. An
/// all-non-null pattern cannot be inverted when `x^p + 1` is a power of
/// `x + 1`, so null blocks are allowed.
fn sample_sparse_s<R: Rng + ?Sized>(
    params: &SystemParams,
    rng: &mut R,
) -> Result<(QcBlockMatrix, QcBlockMatrix)> {
    let (p, k0, m) = (params.p, params.k0(), params.m);
    retry_inverse("invertible sparse S", rng, |rng| {
        let pattern = loop {
            let cand = BitMatrix::random(k0, k0, rng);
            let min_row = if k0 >= 3 { 2 } else { 1 };
            if (0..k0).all(|i| cand.row(i).weight() >= min_row) && cand.inverse().is_some() {
                break cand;
            }
        };
        let mut s = QcBlockMatrix::zeros(p, k0, k0);
        for i in 0..k0 {
            for j in 0..k0 {
                if pattern.get(i, j) {
                    s.set_block(i, j, RingPoly::random_with_weight(p, m, rng));
                }
            }
        }
        s
    })
}

/// Block weights form a sum of `m` random permutation matrices, so every
/// block row and block column carries total weight `m`.
fn sample_spread_q<R: Rng + ?Sized>(
    params: &SystemParams,
    rng: &mut R,
) -> Result<(QcBlockMatrix, QcBlockMatrix)> {
    let (p, n0, m) = (params.p, params.n0, params.m);
    retry_inverse("invertible spread Q", rng, |rng| {
        let mut weights = vec![0usize; n0 * n0];
        let mut perm: Vec<usize> = (0..n0).collect();
        for _ in 0..m {
            perm.shuffle(rng);
            for (i, &j) in perm.iter().enumerate() {
                weights[i * n0 + j] += 1;
            }
        }
        let blocks = weights
            .iter()
            .map(|&w| RingPoly::random_with_weight(p, w, rng))
            .collect();
        QcBlockMatrix::from_blocks(p, n0, n0, blocks).expect("n0×n0 blocks")
    })
}

fn sample_block_diagonal_q<R: Rng + ?Sized>(
    params: &SystemParams,
    rng: &mut R,
) -> Result<(QcBlockMatrix, QcBlockMatrix)> {
    let (p, n0, m) = (params.p, params.n0, params.m);
    let mut q = QcBlockMatrix::zeros(p, n0, n0);
    let mut q_inv = QcBlockMatrix::zeros(p, n0, n0);
    for i in 0..n0 {
        let (qi, inv) = (0..SAMPLE_BUDGET)
            .find_map(|_| {
                let qi = RingPoly::random_with_weight(p, m, rng);
                qi.inverse().ok().map(|inv| (qi, inv))
            })
            .ok_or(Error::ExhaustedRetries("invertible diagonal block of Q"))?;
        q.set_block(i, i, qi);
        q_inv.set_block(i, i, inv);
    }
    Ok((q, q_inv))
}

fn sample_permutation_q<R: Rng + ?Sized>(
    params: &SystemParams,
    rng: &mut R,
) -> (QcBlockMatrix, QcBlockMatrix) {
    let (p, n0) = (params.p, params.n0);
    let mut perm: Vec<usize> = (0..n0).collect();
    perm.shuffle(rng);
    let mut q = QcBlockMatrix::zeros(p, n0, n0);
    for (i, &j) in perm.iter().enumerate() {
        q.set_block(i, j, RingPoly::monomial(p, rng.gen_range(0..p)));
    }
    // a block permutation of monomials is inverted by its transpose
    let q_inv = q.transpose();
    (q, q_inv)
}

/// Uniform weight-`w` vector of length `n`.
pub fn random_error<R: Rng + ?Sized>(n: usize, w: usize, rng: &mut R) -> BitVec {
    BitVec::from_support(n, sample(rng, n, w))
}

/// `x = u·G' + e` together with the intentional error `e`.
pub fn encrypt_with_error<R: Rng + ?Sized>(
    pk: &PublicKey,
    u: &BitVec,
    rng: &mut R,
) -> Result<(BitVec, BitVec)> {
    let c = pk.encode(u)?;
    let e = random_error(pk.params.n(), pk.params.t_prime, rng);
    Ok((c.xor(&e), e))
}

/// `x = u·G' + e` with `e` uniform of weight exactly `t'`.
pub fn encrypt<R: Rng + ?Sized>(pk: &PublicKey, u: &BitVec, rng: &mut R) -> Result<BitVec> {
    encrypt_with_error(pk, u, rng).map(|(x, _)| x)
}

/// Multiply by `Q`, decode, read the systematic part `u·S^{-1}` and
/// multiply by `S`. Corrections heavier than `m·t'` are reported as
/// decoding failures.
pub fn decrypt(sk: &PrivateKey, x: &BitVec) -> Result<BitVec> {
    let params = &sk.params;
    if x.len() != params.n() {
        return Err(Error::LengthMismatch {
            expected: params.n(),
            actual: x.len(),
        });
    }
    let xq = sk.q.left_mul_bits(x)?;
    let mut decoder = Decoder::new(&sk.graph, DecoderConfig::new(params.t().min(params.n())))?;
    let out = decoder.decode(&xq)?;
    // e·Q weighs at most m·t'; a heavier correction is a miscorrection
    if !out.success || out.codeword.distance(&xq) > params.t() {
        return Err(Error::DecodeFailure);
    }
    let u_masked = out.codeword.slice(0, params.k());
    sk.s.left_mul_bits(&u_masked)
}

/// Weight of `e·Q`; at most `m·weight(e)`.
pub fn error_amplification_check(sk: &PrivateKey, e: &BitVec) -> Result<usize> {
    Ok(sk.q.left_mul_bits(e)?.weight())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rows_and_cols_have_weight(q: &QcBlockMatrix, m: usize) -> bool {
        let n0 = q.rows();
        (0..n0).all(|i| (0..n0).map(|j| q.block(i, j).weight()).sum::<usize>() == m)
            && (0..n0).all(|j| (0..n0).map(|i| q.block(i, j).weight()).sum::<usize>() == m)
    }

    #[test]
    fn toy_keys_are_consistent_for_every_variant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for variant in KeyVariant::ALL {
            let (sk, pk) = keygen(SystemParams::toy(), variant, &mut rng).unwrap();
            let hp = sk.public_parity_check();
            assert!(
                pk.gpub.try_mul(&hp.transpose()).unwrap().is_zero(),
                "{variant}"
            );
            assert_eq!(sk.derive_public().unwrap(), pk);
            assert!(rows_and_cols_have_weight(sk.q(), sk.params().m));
            assert_eq!(pk.size_bits(), 3 * 4 * 64);
        }
    }

    #[test]
    fn weak_key_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let (sk, _) = keygen(SystemParams::toy(), KeyVariant::WeakOtd, &mut rng).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let w = sk.q().block(i, j).weight();
                assert_eq!(w, if i == j { 3 } else { 0 });
            }
        }
        assert!(sk
            .s()
            .blocks()
            .iter()
            .all(|b| b.weight() == 0 || b.weight() == 3));
        let (sk, pk) = keygen(SystemParams::toy(), KeyVariant::Permutation, &mut rng).unwrap();
        assert_eq!(sk.params().m, 1);
        assert_eq!(pk.params.t(), 2);
    }

    #[test]
    fn round_trip_and_failure() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        // three amplified errors stay well inside the toy code's radius
        let params = SystemParams {
            t_prime: 1,
            ..SystemParams::toy()
        };
        for variant in KeyVariant::ALL {
            let (sk, pk) = keygen(params, variant, &mut rng).unwrap();
            for _ in 0..10 {
                let u = BitVec::random(pk.params.k(), &mut rng);
                let (x, e) = encrypt_with_error(&pk, &u, &mut rng).unwrap();
                assert_eq!(e.weight(), 1);
                assert_eq!(x.distance(&pk.encode(&u).unwrap()), 1);
                assert_eq!(decrypt(&sk, &x).unwrap(), u);
            }
        }
        let (sk, pk) = keygen(SystemParams::toy(), KeyVariant::Hardened, &mut rng).unwrap();
        let u = BitVec::random(pk.params.k(), &mut rng);
        let x = encrypt(&pk, &u, &mut rng).unwrap();
        let noisy = x.xor(&random_error(pk.params.n(), pk.params.n() / 2, &mut rng));
        assert_eq!(decrypt(&sk, &noisy), Err(Error::DecodeFailure));
    }

    #[test]
    fn zero_error_and_zero_message() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let params = SystemParams {
            t_prime: 0,
            ..SystemParams::toy()
        };
        let (sk, pk) = keygen(params, KeyVariant::Hardened, &mut rng).unwrap();
        let u = BitVec::random(pk.params.k(), &mut rng);
        let x = encrypt(&pk, &u, &mut rng).unwrap();
        assert_eq!(x, pk.encode(&u).unwrap());
        assert_eq!(decrypt(&sk, &x).unwrap(), u);
        let (_, pk) = keygen(SystemParams::toy(), KeyVariant::Hardened, &mut rng).unwrap();
        let x = encrypt(&pk, &BitVec::zeros(pk.params.k()), &mut rng).unwrap();
        assert_eq!(x.weight(), 2);
    }

    #[test]
    fn amplification_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let (sk, _) = keygen(SystemParams::toy(), KeyVariant::Hardened, &mut rng).unwrap();
        let n = sk.params().n();
        assert_eq!(
            error_amplification_check(&sk, &BitVec::zeros(n)).unwrap(),
            0
        );
        for i in [0, 100, 255] {
            assert_eq!(
                error_amplification_check(&sk, &BitVec::from_support(n, [i])).unwrap(),
                3
            );
        }
        for _ in 0..50 {
            let e = random_error(n, 5, &mut rng);
            assert!(error_amplification_check(&sk, &e).unwrap() <= 15);
        }
    }

    #[test]
    fn variant_codes_round_trip() {
        for v in KeyVariant::ALL {
            assert_eq!(KeyVariant::from_code(v.code()), Some(v));
            assert_eq!(v.name().parse::<KeyVariant>().unwrap(), v);
        }
        assert!(KeyVariant::from_code(9).is_none());
    }
}
