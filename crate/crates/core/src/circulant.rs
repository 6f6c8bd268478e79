//! Arithmetic in GF(2)[x]/(x^p + 1) and matrices of circulant blocks.
//!
//! A p×p circulant with first row `a_0 … a_{p-1}` (each following row rotated
//! right by one) corresponds to the polynomial `a_0 + a_1 x + … + a_{p-1} x^{p-1}`.
//! Under this map a row vector `v` times the circulant of `a` is the product
//! `v(x)·a(x)`, and the transposed circulant corresponds to `a(x^{-1})`.
//!
//! Coefficient `i` is stored in bit `i % 64` of word `i / 64`.

use std::fmt;
use std::ops::{Add, Mul};

use rand::seq::index;
use rand::Rng;

use crate::bits::{extract_bits, mask_tail, words_for, xor_shifted_into, BitMatrix, BitVec};
use crate::error::{Error, Result};

/// Above this operand weight the multiplier switches to the comb (dense) path.
const SPARSE_MUL_LIMIT: usize = 96;
/// Largest block grid inverted through the adjugate when elimination stalls.
const ADJUGATE_MAX: usize = 5;

/// An element of GF(2)[x]/(x^p + 1).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RingPoly {
    p: usize,
    words: Vec<u64>,
}

impl fmt::Debug for RingPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.weight();
        if w <= 16 {
            let s: Vec<usize> = self.support().collect();
            write!(f, "RingPoly(p={}, support={s:?})", self.p)
        } else {
            write!(f, "RingPoly(p={}, weight={w})", self.p)
        }
    }
}

/// Fold an unreduced product (bits `0..2p`) modulo x^p + 1.
fn fold(buf: &[u64], p: usize) -> Vec<u64> {
    let mut lo = extract_bits(buf, 0, p);
    let hi = extract_bits(buf, p, p);
    for (a, b) in lo.iter_mut().zip(&hi) {
        *a ^= *b;
    }
    lo
}

fn degree(words: &[u64]) -> Option<usize> {
    words
        .iter()
        .rposition(|&w| w != 0)
        .map(|i| i * 64 + 63 - words[i].leading_zeros() as usize)
}

impl RingPoly {
    pub fn zero(p: usize) -> Self {
        assert!(p > 0, "block size must be positive");
        Self {
            p,
            words: vec![0; words_for(p)],
        }
    }

    pub fn one(p: usize) -> Self {
        Self::monomial(p, 0)
    }

    /// x^e, with the exponent taken modulo p.
    pub fn monomial(p: usize, e: usize) -> Self {
        let mut r = Self::zero(p);
        r.set_coeff(e % p, true);
        r
    }

    /// Polynomial with ones exactly at `support` (positions reduced mod p,
    /// repeated positions cancel).
    pub fn from_support<I: IntoIterator<Item = usize>>(p: usize, support: I) -> Self {
        let mut r = Self::zero(p);
        for i in support {
            r.flip_coeff(i % p);
        }
        r
    }

    pub fn from_bits(bits: &BitVec) -> Self {
        assert!(!bits.is_empty(), "block size must be positive");
        Self {
            p: bits.len(),
            words: bits.words().to_vec(),
        }
    }

    pub fn to_bits(&self) -> BitVec {
        BitVec::from_support(self.p, self.support())
    }

    /// First row packed LSB-first, `ceil(p / 8)` bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        (0..self.p.div_ceil(8))
            .map(|i| (self.words[i / 8] >> (8 * (i % 8))) as u8)
            .collect()
    }

    pub fn from_bytes(p: usize, bytes: &[u8]) -> Result<Self> {
        Ok(Self::from_bits(&BitVec::from_bytes(bytes, p)?))
    }

    /// Uniformly random element (every coefficient a fair bit).
    pub fn random<R: Rng + ?Sized>(p: usize, rng: &mut R) -> Self {
        let mut words: Vec<u64> = (0..words_for(p)).map(|_| rng.gen()).collect();
        mask_tail(&mut words, p);
        Self { p, words }
    }

    /// Uniformly random element of exact weight `w`.
    pub fn random_with_weight<R: Rng + ?Sized>(p: usize, w: usize, rng: &mut R) -> Self {
        assert!(w <= p, "weight {w} exceeds block size {p}");
        Self::from_support(p, index::sample(rng, p, w))
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn coeff(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set_coeff(&mut self, i: usize, value: bool) {
        assert!(i < self.p);
        let m = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= m;
        } else {
            self.words[i / 64] &= !m;
        }
    }

    pub fn flip_coeff(&mut self, i: usize) {
        assert!(i < self.p);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeff(0) && self.weight() == 1
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                (w != 0).then(|| {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    wi * 64 + b
                })
            })
        })
    }

    fn check_same(&self, other: &RingPoly) -> Result<()> {
        if self.p == other.p {
            Ok(())
        } else {
            Err(Error::BlockSizeMismatch(self.p, other.p))
        }
    }

    pub fn try_add(&self, other: &RingPoly) -> Result<RingPoly> {
        self.check_same(other)?;
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a ^ b)
            .collect();
        Ok(RingPoly { p: self.p, words })
    }

    pub fn add_assign(&mut self, other: &RingPoly) {
        assert_eq!(self.p, other.p, "block size mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn try_mul(&self, other: &RingPoly) -> Result<RingPoly> {
        self.check_same(other)?;
        let p = self.p;
        let (sparse, dense) = if self.weight() <= other.weight() {
            (self, other)
        } else {
            (other, self)
        };
        let ws = sparse.weight();
        let mut acc = vec![0u64; words_for(2 * p) + 1];
        if ws <= SPARSE_MUL_LIMIT {
            for i in sparse.support() {
                xor_shifted_into(&mut acc, &dense.words, i);
            }
        } else {
            // Comb method: 64 pre-shifted copies of the dense operand, then one
            // word-aligned XOR per set bit of the other.
            let nw = dense.words.len() + 1;
            let mut shifted = vec![0u64; 64 * nw];
            for s in 0..64 {
                xor_shifted_into(&mut shifted[s * nw..(s + 1) * nw], &dense.words, s);
            }
            for (wi, &word) in sparse.words.iter().enumerate() {
                let mut w = word;
                while w != 0 {
                    let s = w.trailing_zeros() as usize;
                    w &= w - 1;
                    let src = &shifted[s * nw..(s + 1) * nw];
                    for (d, v) in acc[wi..].iter_mut().zip(src) {
                        *d ^= *v;
                    }
                }
            }
        }
        Ok(RingPoly {
            p,
            words: fold(&acc, p),
        })
    }

    /// Multiplicative inverse by the extended Euclidean algorithm on
    /// `(a(x), x^p + 1)`.
    pub fn inverse(&self) -> Result<RingPoly> {
        let p = self.p;
        if self.weight().is_multiple_of(2) {
            // x + 1 divides both a(x) and x^p + 1
            return Err(Error::NonInvertible);
        }
        let nw = words_for(p + 1) + 1;
        let mut u = self.words.clone();
        u.resize(nw, 0);
        let mut v = vec![0u64; nw];
        v[0] = 1;
        v[p / 64] |= 1u64 << (p % 64);
        let mut g1 = vec![0u64; nw];
        g1[0] = 1;
        let mut g2 = vec![0u64; nw];
        loop {
            let du = degree(&u).ok_or(Error::NonInvertible)?;
            if du == 0 {
                break;
            }
            let dv = degree(&v).ok_or(Error::NonInvertible)?;
            if du < dv {
                std::mem::swap(&mut u, &mut v);
                std::mem::swap(&mut g1, &mut g2);
                continue;
            }
            let j = du - dv;
            xor_shifted_into(&mut u, &v, j);
            xor_shifted_into(&mut g1, &g2, j);
        }
        let mut buf = g1;
        buf.resize(words_for(2 * p) + 1, 0);
        Ok(RingPoly {
            p,
            words: fold(&buf, p),
        })
    }

    /// Image of the transposed circulant: coefficient `i` moves to `-i mod p`.
    pub fn transpose(&self) -> RingPoly {
        RingPoly::from_support(self.p, self.support().map(|i| (self.p - i) % self.p))
    }

    /// Multiply by x^s (cyclic rotation of the coefficients).
    pub fn rotate(&self, s: usize) -> RingPoly {
        let s = s % self.p;
        if s == 0 {
            return self.clone();
        }
        let mut buf = vec![0u64; words_for(2 * self.p) + 1];
        xor_shifted_into(&mut buf, &self.words, s);
        RingPoly {
            p: self.p,
            words: fold(&buf, self.p),
        }
    }

    /// Coefficient-wise AND.
    pub fn hadamard(&self, other: &RingPoly) -> Result<RingPoly> {
        self.check_same(other)?;
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & b)
            .collect();
        Ok(RingPoly { p: self.p, words })
    }

    /// Dense p×p circulant expansion.
    pub fn to_dense(&self) -> BitMatrix {
        let p = self.p;
        let mut m = BitMatrix::zeros(p, p);
        for i in self.support() {
            for r in 0..p {
                m.set(r, (r + i) % p, true);
            }
        }
        m
    }
}

impl Add for &RingPoly {
    type Output = RingPoly;

    /// Panics on mismatched block sizes; use [`RingPoly::try_add`] otherwise.
    fn add(self, rhs: &RingPoly) -> RingPoly {
        self.try_add(rhs).expect("block size mismatch")
    }
}

impl Mul for &RingPoly {
    type Output = RingPoly;

    /// Panics on mismatched block sizes; use [`RingPoly::try_mul`] otherwise.
    fn mul(self, rhs: &RingPoly) -> RingPoly {
        self.try_mul(rhs).expect("block size mismatch")
    }
}

/// Split a length `c·p` vector into `c` ring elements.
pub fn split_blocks(v: &BitVec, p: usize) -> Result<Vec<RingPoly>> {
    if p == 0 || !v.len().is_multiple_of(p) {
        return Err(Error::LengthMismatch {
            expected: p * v.len().div_ceil(p.max(1)),
            actual: v.len(),
        });
    }
    Ok((0..v.len() / p)
        .map(|b| RingPoly::from_bits(&v.slice(b * p, p)))
        .collect())
}

pub fn join_blocks(blocks: &[RingPoly]) -> BitVec {
    let parts: Vec<BitVec> = blocks.iter().map(RingPoly::to_bits).collect();
    BitVec::concat(&parts)
}

/// Quasi-cyclic shift: every length-p block of `v` is rotated by `s`.
///
/// For a vector made of `n0` blocks this is the cyclic shift by `s·n0`
/// positions of the interleaved coordinate order, so codewords of a
/// quasi-cyclic code map to codewords.
pub fn vec_block_shift(v: &BitVec, n0: usize, s: usize) -> Result<BitVec> {
    if n0 == 0 || !v.len().is_multiple_of(n0) || v.is_empty() {
        return Err(Error::ShapeMismatch(format!(
            "length {} is not a positive multiple of n0 = {n0}",
            v.len()
        )));
    }
    let p = v.len() / n0;
    let blocks: Vec<RingPoly> = split_blocks(v, p)?.iter().map(|b| b.rotate(s)).collect();
    Ok(join_blocks(&blocks))
}

/// An `rows × cols` grid of p×p circulant blocks.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QcBlockMatrix {
    p: usize,
    rows: usize,
    cols: usize,
    blocks: Vec<RingPoly>,
}

impl fmt::Debug for QcBlockMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "QcBlockMatrix({}x{} blocks, p={})",
            self.rows, self.cols, self.p
        )
    }
}

impl QcBlockMatrix {
    pub fn zeros(p: usize, rows: usize, cols: usize) -> Self {
        Self {
            p,
            rows,
            cols,
            blocks: vec![RingPoly::zero(p); rows * cols],
        }
    }

    pub fn identity(p: usize, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.blocks[i * n + i] = RingPoly::one(p);
        }
        m
    }

    /// Row-major block list.
    pub fn from_blocks(p: usize, rows: usize, cols: usize, blocks: Vec<RingPoly>) -> Result<Self> {
        if blocks.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "{} blocks for a {rows}x{cols} grid",
                blocks.len()
            )));
        }
        if let Some(b) = blocks.iter().find(|b| b.p != p) {
            return Err(Error::BlockSizeMismatch(p, b.p));
        }
        Ok(Self {
            p,
            rows,
            cols,
            blocks,
        })
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    /// Block-row count.
    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Block-column count.
    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn block(&self, i: usize, j: usize) -> &RingPoly {
        assert!(i < self.rows && j < self.cols, "block index out of range");
        &self.blocks[i * self.cols + j]
    }

    pub fn set_block(&mut self, i: usize, j: usize, poly: RingPoly) {
        assert!(i < self.rows && j < self.cols, "block index out of range");
        assert_eq!(poly.p, self.p, "block size mismatch");
        self.blocks[i * self.cols + j] = poly;
    }

    pub fn blocks(&self) -> &[RingPoly] {
        &self.blocks
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(RingPoly::is_zero)
    }

    pub fn try_add(&self, other: &QcBlockMatrix) -> Result<QcBlockMatrix> {
        if self.p != other.p {
            return Err(Error::BlockSizeMismatch(self.p, other.p));
        }
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::ShapeMismatch("block grids differ".into()));
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a + b)
            .collect();
        Ok(QcBlockMatrix {
            blocks,
            ..self.clone()
        })
    }

    pub fn try_mul(&self, other: &QcBlockMatrix) -> Result<QcBlockMatrix> {
        if self.p != other.p {
            return Err(Error::BlockSizeMismatch(self.p, other.p));
        }
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} blocks times {}x{} blocks",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = QcBlockMatrix::zeros(self.p, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.block(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.block(k, j);
                    if !b.is_zero() {
                        out.blocks[i * other.cols + j].add_assign(&(a * b));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Block transpose with every block transposed.
    pub fn transpose(&self) -> QcBlockMatrix {
        let mut out = QcBlockMatrix::zeros(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.blocks[j * self.rows + i] = self.block(i, j).transpose();
            }
        }
        out
    }

    /// Block columns `start..end`.
    pub fn column_blocks(&self, start: usize, end: usize) -> QcBlockMatrix {
        assert!(start <= end && end <= self.cols);
        let mut blocks = Vec::with_capacity(self.rows * (end - start));
        for i in 0..self.rows {
            blocks.extend_from_slice(&self.blocks[i * self.cols + start..i * self.cols + end]);
        }
        QcBlockMatrix {
            p: self.p,
            rows: self.rows,
            cols: end - start,
            blocks,
        }
    }

    /// Block row `i` as a 1×cols matrix.
    pub fn row_block(&self, i: usize) -> QcBlockMatrix {
        QcBlockMatrix {
            p: self.p,
            rows: 1,
            cols: self.cols,
            blocks: self.blocks[i * self.cols..(i + 1) * self.cols].to_vec(),
        }
    }

    /// Row block-vector times matrix: `out_j = Σ_i v_i · A_ij`.
    pub fn left_mul_blocks(&self, v: &[RingPoly]) -> Result<Vec<RingPoly>> {
        if v.len() != self.rows {
            return Err(Error::LengthMismatch {
                expected: self.rows,
                actual: v.len(),
            });
        }
        let mut out = vec![RingPoly::zero(self.p); self.cols];
        for (i, vi) in v.iter().enumerate() {
            if vi.p != self.p {
                return Err(Error::BlockSizeMismatch(self.p, vi.p));
            }
            if vi.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let a = self.block(i, j);
                if !a.is_zero() {
                    o.add_assign(&(vi * a));
                }
            }
        }
        Ok(out)
    }

    /// Flat row vector (length `rows·p`) times the dense expansion.
    pub fn left_mul_bits(&self, v: &BitVec) -> Result<BitVec> {
        if v.len() != self.rows * self.p {
            return Err(Error::LengthMismatch {
                expected: self.rows * self.p,
                actual: v.len(),
            });
        }
        Ok(join_blocks(
            &self.left_mul_blocks(&split_blocks(v, self.p)?)?,
        ))
    }

    /// Inverse over the ring. Block Gauss-Jordan runs first; it can stall on
    /// an invertible input when no single block is a unit, in which case the
    /// adjugate (small grids) or the dense expansion settles it exactly.
    pub fn inverse(&self) -> Result<QcBlockMatrix> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch(
                "inverse of a non-square block matrix".into(),
            ));
        }
        match self.gauss_jordan_inverse() {
            Err(Error::Singular) if self.rows <= ADJUGATE_MAX => self.adjugate_inverse(),
            Err(Error::Singular) => {
                let dense = self.to_dense().inverse().ok_or(Error::Singular)?;
                QcBlockMatrix::from_dense(&dense, self.p)
            }
            other => other,
        }
    }

    /// Determinant by cofactor expansion; the ring is commutative.
    pub fn determinant(&self) -> Result<RingPoly> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch(
                "determinant of a non-square block matrix".into(),
            ));
        }
        let idx: Vec<usize> = (0..self.rows).collect();
        Ok(self.minor_det(&idx, &idx))
    }

    fn minor_det(&self, rows: &[usize], cols: &[usize]) -> RingPoly {
        match rows.len() {
            0 => RingPoly::one(self.p),
            1 => self.block(rows[0], cols[0]).clone(),
            _ => {
                let mut det = RingPoly::zero(self.p);
                let sub_rows = &rows[1..];
                for (k, &c) in cols.iter().enumerate() {
                    let a = self.block(rows[0], c);
                    if a.is_zero() {
                        continue;
                    }
                    // signs vanish in characteristic 2
                    let sub_cols: Vec<usize> = cols
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != k)
                        .map(|(_, &x)| x)
                        .collect();
                    det.add_assign(&(a * &self.minor_det(sub_rows, &sub_cols)));
                }
                det
            }
        }
    }

    /// `det^{-1}·adj`, where `adj[j][i]` is the `(i, j)` minor.
    fn adjugate_inverse(&self) -> Result<QcBlockMatrix> {
        let n = self.rows;
        let det_inv = self.determinant()?.inverse().map_err(|_| Error::Singular)?;
        let mut out = QcBlockMatrix::zeros(self.p, n, n);
        for i in 0..n {
            for j in 0..n {
                let rows: Vec<usize> = (0..n).filter(|&r| r != i).collect();
                let cols: Vec<usize> = (0..n).filter(|&c| c != j).collect();
                out.set_block(j, i, &det_inv * &self.minor_det(&rows, &cols));
            }
        }
        Ok(out)
    }

    fn gauss_jordan_inverse(&self) -> Result<QcBlockMatrix> {
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = QcBlockMatrix::identity(self.p, n);
        let mut col_perm: Vec<usize> = (0..n).collect();
        for c in 0..n {
            let mut pivot = None;
            'search: for cc in c..n {
                for r in c..n {
                    let b = a.block(r, cc);
                    if b.weight() % 2 == 1 {
                        if let Ok(bi) = b.inverse() {
                            pivot = Some((r, cc, bi));
                            break 'search;
                        }
                    }
                }
            }
            let (r, cc, pinv) = pivot.ok_or(Error::Singular)?;
            a.swap_block_rows(c, r);
            inv.swap_block_rows(c, r);
            if cc != c {
                a.swap_block_cols(c, cc);
                col_perm.swap(c, cc);
            }
            a.scale_block_row(c, &pinv);
            inv.scale_block_row(c, &pinv);
            for r in 0..n {
                if r == c || a.block(r, c).is_zero() {
                    continue;
                }
                let f = a.block(r, c).clone();
                a.axpy_block_row(r, c, &f);
                inv.axpy_block_row(r, c, &f);
            }
        }
        let mut out = QcBlockMatrix::zeros(self.p, n, n);
        for (c, &orig) in col_perm.iter().enumerate() {
            for j in 0..n {
                out.blocks[orig * n + j] = inv.block(c, j).clone();
            }
        }
        Ok(out)
    }

    fn swap_block_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.blocks.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_block_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.blocks.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn scale_block_row(&mut self, i: usize, f: &RingPoly) {
        for j in 0..self.cols {
            let k = i * self.cols + j;
            if !self.blocks[k].is_zero() {
                self.blocks[k] = f * &self.blocks[k];
            }
        }
    }

    /// row[dst] += f · row[src]
    fn axpy_block_row(&mut self, dst: usize, src: usize, f: &RingPoly) {
        for j in 0..self.cols {
            let s = &self.blocks[src * self.cols + j];
            if !s.is_zero() {
                let t = f * s;
                self.blocks[dst * self.cols + j].add_assign(&t);
            }
        }
    }

    /// Dense `(rows·p) × (cols·p)` expansion.
    pub fn to_dense(&self) -> BitMatrix {
        let p = self.p;
        let mut m = BitMatrix::zeros(self.rows * p, self.cols * p);
        for i in 0..self.rows {
            for j in 0..self.cols {
                for e in self.block(i, j).support() {
                    for r in 0..p {
                        m.set(i * p + r, j * p + (r + e) % p, true);
                    }
                }
            }
        }
        m
    }

    /// Inverse of [`to_dense`](Self::to_dense); rejects inputs that are not
    /// circulant-block with block size `p`.
    pub fn from_dense(dense: &BitMatrix, p: usize) -> Result<QcBlockMatrix> {
        if p == 0 || !dense.rows().is_multiple_of(p) || !dense.cols().is_multiple_of(p) {
            return Err(Error::NotCirculant(p));
        }
        let (rows, cols) = (dense.rows() / p, dense.cols() / p);
        let mut out = QcBlockMatrix::zeros(p, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let first =
                    RingPoly::from_support(p, (0..p).filter(|&c| dense.get(i * p, j * p + c)));
                for r in 1..p {
                    for c in 0..p {
                        if dense.get(i * p + r, j * p + c) != first.coeff((c + p - r) % p) {
                            return Err(Error::NotCirculant(p));
                        }
                    }
                }
                out.blocks[i * cols + j] = first;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn poly(p: usize, s: &[usize]) -> RingPoly {
        RingPoly::from_support(p, s.iter().copied())
    }

    #[test]
    fn addition_examples() {
        let a = poly(7, &[0, 1]);
        assert!((&a + &a).is_zero());
        assert_eq!(&a + &RingPoly::zero(7), a);
        assert_eq!(&a + &poly(7, &[0, 1, 3]), poly(7, &[3]));
        assert_eq!(
            a.try_add(&RingPoly::zero(8)),
            Err(Error::BlockSizeMismatch(7, 8))
        );
    }

    #[test]
    fn multiplication_examples() {
        let a = poly(7, &[0, 1]);
        assert_eq!(&a * &RingPoly::one(7), a);
        assert_eq!(&poly(3, &[1]) * &poly(3, &[2]), RingPoly::one(3));
        // (1+x)(1+x+x^3) = 1 + x^2 + x^3 + x^4 mod x^7 + 1
        assert_eq!(&a * &poly(7, &[0, 1, 3]), poly(7, &[0, 2, 3, 4]));
        assert!(a.try_mul(&RingPoly::one(5)).is_err());
    }

    #[test]
    fn dense_and_sparse_paths_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for &p in &[64usize, 100, 257, 4096] {
            let a = RingPoly::random(p, &mut rng);
            let b = RingPoly::random(p, &mut rng);
            let dense = &a * &b;
            // force the sparse path by summing monomial products
            let mut acc = RingPoly::zero(p);
            for i in a.support() {
                acc.add_assign(&b.rotate(i));
            }
            assert_eq!(dense, acc, "p = {p}");
        }
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(poly(3, &[1]).inverse().unwrap(), poly(3, &[2]));
        assert_eq!(poly(3, &[0, 1]).inverse(), Err(Error::NonInvertible));
        assert_eq!(RingPoly::zero(5).inverse(), Err(Error::NonInvertible));
        // 1 + x + x^2 divides x^3 + 1 and has odd weight
        assert_eq!(poly(3, &[0, 1, 2]).inverse(), Err(Error::NonInvertible));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut hits = 0;
        while hits < 10 {
            let a = RingPoly::random(7, &mut rng);
            if let Ok(b) = a.inverse() {
                assert!((&a * &b).is_one());
                hits += 1;
            }
        }
        let big = RingPoly::random_with_weight(16384, 8191, &mut rng);
        assert!((&big * &big.inverse().unwrap()).is_one());
    }

    #[test]
    fn transpose_examples() {
        assert_eq!(RingPoly::one(9).transpose(), RingPoly::one(9));
        assert_eq!(poly(4, &[1]).transpose(), poly(4, &[3]));
    }

    #[test]
    fn monomial_expansion_matches_circulant_layout() {
        let d = poly(4, &[1]).to_dense();
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(d.get(r, c), c == (r + 1) % 4);
            }
        }
    }

    #[test]
    fn from_dense_rejects_non_circulant() {
        let mut m = BitMatrix::zeros(4, 4);
        m.set(0, 0, true);
        m.set(1, 2, true);
        assert_eq!(
            QcBlockMatrix::from_dense(&m, 4),
            Err(Error::NotCirculant(4))
        );
        assert_eq!(
            QcBlockMatrix::from_dense(&m, 3),
            Err(Error::NotCirculant(3))
        );
    }

    #[test]
    fn block_shift_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let v = BitVec::random(3 * 11, &mut rng);
        assert_eq!(vec_block_shift(&v, 3, 0).unwrap(), v);
        assert_eq!(vec_block_shift(&v, 3, 11).unwrap(), v);
        assert!(vec_block_shift(&v, 4, 1).is_err());
        let once = vec_block_shift(&v, 3, 1).unwrap();
        assert_eq!(once.weight(), v.weight());
        assert_eq!(vec_block_shift(&once, 3, 10).unwrap(), v);
    }

    #[test]
    fn block_inverse_examples() {
        let id = QcBlockMatrix::identity(8, 3);
        assert_eq!(id.inverse().unwrap(), id);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let row = vec![RingPoly::random(8, &mut rng), RingPoly::random(8, &mut rng)];
        let dup = QcBlockMatrix::from_blocks(8, 2, 2, [row.clone(), row].concat()).unwrap();
        assert_eq!(dup.inverse(), Err(Error::Singular));
        let rect = QcBlockMatrix::zeros(8, 2, 3);
        assert!(rect.inverse().is_err());
    }

    #[test]
    fn column_swap_pivoting() {
        // p = 7 is not a local ring: column 0 holds only non-units (1+x and
        // 1+x+x^3) yet the determinant x^3 is a unit.
        let p = 7;
        let m = QcBlockMatrix::from_blocks(
            p,
            2,
            2,
            vec![
                poly(p, &[0, 1]),
                RingPoly::one(p),
                poly(p, &[0, 1, 3]),
                RingPoly::one(p),
            ],
        )
        .unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.try_mul(&inv).unwrap(), QcBlockMatrix::identity(p, 2));
        assert_eq!(inv.try_mul(&m).unwrap(), QcBlockMatrix::identity(p, 2));
    }
}
