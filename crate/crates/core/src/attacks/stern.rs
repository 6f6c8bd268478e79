//! Stern's collision search for low-weight codewords.

use std::collections::{HashMap, HashSet};

use itertools::Itertools;
use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::analysis::stern_wf;
use crate::bits::{BitMatrix, BitVec};
use crate::error::{Error, Result};
use crate::rng::substream;

/// Window length limit imposed by packing windows into a `u64`.
pub const MAX_WINDOW: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SternConfig {
    /// Rows combined from each half of the information set.
    pub g: usize,
    /// Redundancy positions that must cancel.
    pub l: usize,
    pub max_iterations: usize,
    pub seed: u64,
}

impl SternConfig {
    pub fn new(g: usize, l: usize, max_iterations: usize, seed: u64) -> Self {
        Self {
            g,
            l,
            max_iterations,
            seed,
        }
    }

    /// `(g, l)` minimising the closed-form work factor for this search.
    pub fn optimal(
        n_s: usize,
        k_s: usize,
        w: usize,
        a_w: f64,
        max_iterations: usize,
        seed: u64,
    ) -> Self {
        let (g, l) = match stern_wf(n_s, k_s, w, a_w) {
            Ok(r) => (r.g_opt, r.l_opt),
            Err(_) => (1, 1),
        };
        Self::new(g, l.min(MAX_WINDOW), max_iterations, seed)
    }
}

/// A prepared search: full-rank basis of the code and target weight.
#[derive(Clone, Debug)]
pub struct Stern {
    basis: BitMatrix,
    w: usize,
    g: usize,
    l: usize,
}

impl Stern {
    /// `generator` may have dependent rows.
    pub fn new(generator: &BitMatrix, w: usize, g: usize, l: usize) -> Result<Self> {
        let basis = generator.row_basis();
        let (n, k) = (basis.cols(), basis.rows());
        if k >= 2 && (g == 0 || g > k / 2) {
            return Err(Error::InvalidParams(format!(
                "g = {g} outside 1..={}",
                k / 2
            )));
        }
        if k >= 2 && (l == 0 || l > n - k || l > MAX_WINDOW) {
            return Err(Error::InvalidParams(format!(
                "l = {l} outside 1..={}",
                (n - k).min(MAX_WINDOW)
            )));
        }
        Ok(Self { basis, w, g, l })
    }

    pub fn from_parity_check(h: &BitMatrix, w: usize, g: usize, l: usize) -> Result<Self> {
        Self::new(&h.kernel(), w, g, l)
    }

    pub fn dimension(&self) -> usize {
        self.basis.rows()
    }

    pub fn length(&self) -> usize {
        self.basis.cols()
    }

    /// One iteration: random information set split in halves, random
    /// window, collisions of `g`-row sums on the window. Returns every
    /// nonzero codeword of weight at most `w` met along the way.
    pub fn iteration<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<BitVec> {
        let (n, k) = (self.length(), self.dimension());
        if k < 2 {
            return (0..k)
                .map(|r| self.basis.row(r))
                .filter(|c| c.weight() <= self.w)
                .collect();
        }
        let mut m = self.basis.clone();
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let pivots = m.eliminate_in_order(&order);
        debug_assert_eq!(pivots.len(), k);
        let mut is_pivot = vec![false; n];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let rest: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        let window: Vec<usize> = sample(rng, rest.len(), self.l)
            .into_iter()
            .map(|i| rest[i])
            .collect();
        let keys: Vec<u64> = (0..k)
            .map(|r| {
                window
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (b, &c)| acc | ((m.get(r, c) as u64) << b))
            })
            .collect();
        let half = k / 2;
        let mut left: HashMap<u64, Vec<Vec<usize>>> = HashMap::new();
        for subset in (0..half).combinations(self.g) {
            let key = subset.iter().fold(0, |acc, &r| acc ^ keys[r]);
            left.entry(key).or_default().push(subset);
        }
        let mut found = Vec::new();
        let mut seen = HashSet::new();
        for subset in (half..k).combinations(self.g) {
            let key = subset.iter().fold(0, |acc, &r| acc ^ keys[r]);
            let Some(partners) = left.get(&key) else {
                continue;
            };
            let right = sum_rows(&m, &subset);
            for a in partners {
                let c = right.xor(&sum_rows(&m, a));
                if c.weight() <= self.w && seen.insert(c.clone()) {
                    found.push(c);
                }
            }
        }
        found
    }
}

fn sum_rows(m: &BitMatrix, rows: &[usize]) -> BitVec {
    let mut acc = BitVec::zeros(m.cols());
    for &r in rows {
        acc.xor_assign(&m.row(r));
    }
    acc
}

/// Run iterations on independent substreams until one yields a codeword of
/// weight at most `w`. Empty when the budget runs out.
pub fn stern_search(generator: &BitMatrix, w: usize, cfg: &SternConfig) -> Result<Vec<BitVec>> {
    let stern = Stern::new(generator, w, cfg.g, cfg.l)?;
    for i in 0..cfg.max_iterations {
        let found = stern.iteration(&mut substream(cfg.seed, i as u64));
        if !found.is_empty() {
            return Ok(found);
        }
    }
    Ok(Vec::new())
}
