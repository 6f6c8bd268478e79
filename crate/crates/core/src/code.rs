//! QC-LDPC codes whose parity-check matrix is a single row of circulants,
//! built from random difference families.

use std::collections::HashMap;

use rand::Rng;

use crate::bits::BitVec;
use crate::circulant::{join_blocks, split_blocks, QcBlockMatrix, RingPoly};
use crate::error::{Error, Result};

/// Rejections tolerated for one element before its set is restarted.
const ELEMENT_REJECTIONS: usize = 200;
/// Set restarts tolerated before sampling gives up.
const SET_RESTARTS: usize = 2000;

/// `n0` residue sets mod `p`, each the support of the first row of one
/// parity-check circulant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferenceFamily {
    p: usize,
    sets: Vec<Vec<usize>>,
}

impl DifferenceFamily {
    /// Wrap explicit sets. Elements must lie in `[0, p)` and be distinct
    /// within each set; the difference property is not enforced here.
    pub fn new(p: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        for s in &sets {
            if s.iter().any(|&x| x >= p) {
                return Err(Error::InvalidParams(format!(
                    "residue out of range mod {p}"
                )));
            }
            let mut sorted = s.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != s.len() {
                return Err(Error::InvalidParams("repeated residue within a set".into()));
            }
        }
        Ok(Self { p, sets })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn n0(&self) -> usize {
        self.sets.len()
    }

    /// All ordered differences `a - b mod p`, `a != b`, across every set.
    pub fn differences(&self) -> Vec<usize> {
        let p = self.p;
        self.sets
            .iter()
            .flat_map(|s| {
                s.iter().flat_map(move |&a| {
                    s.iter()
                        .filter(move |&&b| b != a)
                        .map(move |&b| (a + p - b) % p)
                })
            })
            .collect()
    }
}

/// Draw a difference family element by element, rejecting any residue whose
/// new differences collide with those already used.
pub fn sample_difference_family<R: Rng + ?Sized>(
    n0: usize,
    dv: usize,
    p: usize,
    rng: &mut R,
) -> Result<DifferenceFamily> {
    if p == 0 || dv == 0 || dv > p {
        return Err(Error::InvalidParams(format!(
            "cannot place {dv} residues mod {p}"
        )));
    }
    if n0 * dv * (dv - 1) >= p && dv > 1 {
        return Err(Error::InvalidParams(format!(
            "n0·dv·(dv-1) = {} must be below p = {p}",
            n0 * dv * (dv - 1)
        )));
    }
    let mut used = vec![false; p];
    let mut sets = Vec::with_capacity(n0);
    let mut restarts = 0;
    while sets.len() < n0 {
        match sample_set(dv, p, &used, rng) {
            Some(set) => {
                for &a in &set {
                    for &b in &set {
                        if a != b {
                            used[(a + p - b) % p] = true;
                        }
                    }
                }
                sets.push(set);
            }
            None => {
                restarts += 1;
                if restarts > SET_RESTARTS {
                    return Err(Error::ExhaustedRetries("difference family"));
                }
            }
        }
    }
    Ok(DifferenceFamily { p, sets })
}

fn sample_set<R: Rng + ?Sized>(
    dv: usize,
    p: usize,
    used: &[bool],
    rng: &mut R,
) -> Option<Vec<usize>> {
    let mut set: Vec<usize> = Vec::with_capacity(dv);
    let mut local = Vec::new();
    let mut fresh = Vec::with_capacity(2 * dv);
    'element: while set.len() < dv {
        for _ in 0..ELEMENT_REJECTIONS {
            let x = rng.gen_range(0..p);
            if set.contains(&x) {
                continue;
            }
            fresh.clear();
            for &y in &set {
                fresh.push((x + p - y) % p);
                fresh.push((y + p - x) % p);
            }
            let ok = fresh
                .iter()
                .enumerate()
                .all(|(i, &d)| !used[d] && !local.contains(&d) && !fresh[..i].contains(&d));
            if ok {
                local.extend_from_slice(&fresh);
                set.push(x);
                continue 'element;
            }
        }
        return None;
    }
    Some(set)
}

/// True iff no difference value occurs twice anywhere in the family.
pub fn check_disjoint_differences(df: &DifferenceFamily) -> bool {
    let mut seen = vec![false; df.p];
    for d in df.differences() {
        if std::mem::replace(&mut seen[d], true) {
            return false;
        }
    }
    true
}

/// `H = [H_0 | … | H_{n0-1}]` with block `i` supported on `h_i`.
pub fn build_parity_check(df: &DifferenceFamily) -> QcBlockMatrix {
    let blocks = df
        .sets
        .iter()
        .map(|s| RingPoly::from_support(df.p, s.iter().copied()))
        .collect();
    QcBlockMatrix::from_blocks(df.p, 1, df.n0(), blocks).expect("consistent block count")
}

/// Systematic generator `G = [I | (H_{n0-1}^{-1} H_i)^T]` for a one-row
/// circulant parity-check matrix.
pub fn derive_generator(h: &QcBlockMatrix) -> Result<QcBlockMatrix> {
    if h.rows() != 1 || h.cols() < 2 {
        return Err(Error::ShapeMismatch(format!(
            "expected a 1×n0 block row with n0 >= 2, got {}×{}",
            h.rows(),
            h.cols()
        )));
    }
    let p = h.p();
    let k0 = h.cols() - 1;
    let last_inv = h
        .block(0, k0)
        .inverse()
        .map_err(|_| Error::LastBlockSingular)?;
    let mut g = QcBlockMatrix::zeros(p, k0, k0 + 1);
    for i in 0..k0 {
        g.set_block(i, i, RingPoly::one(p));
        g.set_block(i, k0, (&last_inv * h.block(0, i)).transpose());
    }
    Ok(g)
}

/// True iff every pair of columns of the dense expansion shares at most one
/// row. Quasi-cyclic symmetry lets us check only the first column of each
/// block column.
pub fn has_no_length4_cycles(h: &QcBlockMatrix) -> bool {
    let p = h.p();
    for c in 0..h.cols() {
        let mut hits: HashMap<(usize, usize), usize> = HashMap::new();
        for r in 0..h.rows() {
            for e in h.block(r, c).support() {
                // row offset i holding column 0 of block (r, c)
                let i = (p - e) % p;
                for c2 in 0..h.cols() {
                    for e2 in h.block(r, c2).support() {
                        let col = (c2, (i + e2) % p);
                        if col == (c, 0) {
                            continue;
                        }
                        let n = hits.entry(col).or_insert(0);
                        *n += 1;
                        if *n > 1 {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

/// A secret QC-LDPC code: family, parity-check matrix and systematic generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QcLdpcCode {
    family: DifferenceFamily,
    h: QcBlockMatrix,
    g: QcBlockMatrix,
}

impl QcLdpcCode {
    pub fn from_family(family: DifferenceFamily) -> Result<Self> {
        let h = build_parity_check(&family);
        let g = derive_generator(&h)?;
        Ok(Self { family, h, g })
    }

    /// Sample a family, resampling it whole when the last block is singular.
    pub fn sample<R: Rng + ?Sized>(n0: usize, dv: usize, p: usize, rng: &mut R) -> Result<Self> {
        for _ in 0..64 {
            let df = sample_difference_family(n0, dv, p, rng)?;
            match Self::from_family(df) {
                Ok(code) => return Ok(code),
                Err(Error::LastBlockSingular) => continue,
                Err(e) => return Err(e),
            }
        }
        Err(Error::ExhaustedRetries(
            "invertible last parity-check block",
        ))
    }

    pub fn family(&self) -> &DifferenceFamily {
        &self.family
    }

    pub fn h(&self) -> &QcBlockMatrix {
        &self.h
    }

    pub fn g(&self) -> &QcBlockMatrix {
        &self.g
    }

    pub fn p(&self) -> usize {
        self.h.p()
    }

    pub fn n0(&self) -> usize {
        self.h.cols()
    }

    pub fn n(&self) -> usize {
        self.n0() * self.p()
    }

    pub fn k(&self) -> usize {
        (self.n0() - 1) * self.p()
    }

    /// `u·G`; the first `k` bits of the result equal `u`.
    pub fn encode(&self, u: &BitVec) -> Result<BitVec> {
        let ub = split_blocks(u, self.p())?;
        if ub.len() != self.n0() - 1 {
            return Err(Error::LengthMismatch {
                expected: self.k(),
                actual: u.len(),
            });
        }
        Ok(join_blocks(&self.g.left_mul_blocks(&ub)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn family(p: usize, sets: &[&[usize]]) -> DifferenceFamily {
        DifferenceFamily::new(p, sets.iter().map(|s| s.to_vec()).collect()).unwrap()
    }

    #[test]
    fn disjointness_examples() {
        assert!(check_disjoint_differences(&family(7, &[&[0, 1], &[0, 3]])));
        assert!(!check_disjoint_differences(&family(4, &[&[0, 2]])));
        assert!(check_disjoint_differences(&family(11, &[&[0]])));
        let mut d = family(7, &[&[0, 1], &[0, 3]]).differences();
        d.sort_unstable();
        assert_eq!(d, vec![1, 3, 4, 6]);
    }

    #[test]
    fn trivial_family() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let df = sample_difference_family(1, 1, 5, &mut rng).unwrap();
        assert_eq!(df.sets().len(), 1);
        assert_eq!(df.sets()[0].len(), 1);
        assert!(check_disjoint_differences(&df));
    }

    #[test]
    fn small_family_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let df = sample_difference_family(2, 2, 7, &mut rng).unwrap();
            assert!(check_disjoint_differences(&df));
            assert!(df.sets().iter().all(|s| s.len() == 2));
        }
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let a = sample_difference_family(4, 3, 64, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let b = sample_difference_family(4, 3, 64, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parity_check_from_support() {
        let h = build_parity_check(&family(3, &[&[0]]));
        assert_eq!(h.block(0, 0), &RingPoly::one(3));
        let h = build_parity_check(&family(7, &[&[0, 1], &[0, 3]]));
        assert_eq!(h.block(0, 0), &RingPoly::from_support(7, [0, 1]));
        assert_eq!(h.block(0, 1), &RingPoly::from_support(7, [0, 3]));
    }

    #[test]
    fn generator_examples() {
        let p = 11;
        let h =
            QcBlockMatrix::from_blocks(p, 1, 2, vec![RingPoly::monomial(p, 4), RingPoly::one(p)])
                .unwrap();
        let g = derive_generator(&h).unwrap();
        assert_eq!(g.block(0, 0), &RingPoly::one(p));
        assert_eq!(g.block(0, 1), &RingPoly::monomial(p, 4).transpose());

        let h = QcBlockMatrix::from_blocks(
            3,
            1,
            2,
            vec![RingPoly::from_support(3, [0, 1]), RingPoly::monomial(3, 1)],
        )
        .unwrap();
        let g = derive_generator(&h).unwrap();
        assert_eq!(g.block(0, 1), &RingPoly::from_support(3, [0, 1]));
        assert!(g.try_mul(&h.transpose()).unwrap().is_zero());

        let even = QcBlockMatrix::from_blocks(
            5,
            1,
            2,
            vec![RingPoly::one(5), RingPoly::from_support(5, [0, 1])],
        )
        .unwrap();
        assert_eq!(derive_generator(&even), Err(Error::LastBlockSingular));
    }

    #[test]
    fn four_cycle_detection() {
        // support {0, 3, 6} mod 9 repeats difference 3
        let h = QcBlockMatrix::from_blocks(9, 1, 1, vec![RingPoly::from_support(9, [0, 3, 6])])
            .unwrap();
        assert!(!has_no_length4_cycles(&h));
        let single = QcBlockMatrix::from_blocks(5, 1, 1, vec![RingPoly::one(5)]).unwrap();
        assert!(has_no_length4_cycles(&single));
        let h = build_parity_check(&family(7, &[&[0, 1], &[0, 3]]));
        assert!(has_no_length4_cycles(&h));
    }

    #[test]
    fn reference_scale_family() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let code = QcLdpcCode::sample(4, 13, 4096, &mut rng).unwrap();
        assert!(check_disjoint_differences(code.family()));
        assert!(code.h().blocks().iter().all(|b| b.weight() == 13));
        assert_eq!(code.k(), 12288);
        assert!(code.g().try_mul(&code.h().transpose()).unwrap().is_zero());
    }

    #[test]
    fn toy_code_encodes_codewords() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let code = QcLdpcCode::sample(4, 3, 64, &mut rng).unwrap();
        assert!(code.g().try_mul(&code.h().transpose()).unwrap().is_zero());
        let u = BitVec::random(code.k(), &mut rng);
        let c = code.encode(&u).unwrap();
        assert_eq!(c.slice(0, code.k()), u);
        let dense = code.h().to_dense();
        assert!(dense.mul_vec(&c).unwrap().is_zero());
    }
}
