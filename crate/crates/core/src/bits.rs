//! Word-packed GF(2) vectors and dense matrices.
//!
//! Bit `i` lives in word `i / 64` at position `i % 64`. Bits past the logical
//! length are always zero, so word-wise equality and popcounts are exact.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

#[inline]
pub(crate) fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

/// XOR `src` shifted left by `shift` bits into `dst`. Bits pushed past the end
/// of `dst` are dropped.
pub(crate) fn xor_shifted_into(dst: &mut [u64], src: &[u64], shift: usize) {
    let off = shift / 64;
    let bit = shift % 64;
    if off >= dst.len() {
        return;
    }
    if bit == 0 {
        for (d, s) in dst[off..].iter_mut().zip(src) {
            *d ^= *s;
        }
    } else {
        let room = dst.len() - off;
        for (j, &w) in src.iter().enumerate() {
            if j >= room {
                break;
            }
            dst[off + j] ^= w << bit;
            if j + 1 < room {
                dst[off + j + 1] ^= w >> (64 - bit);
            }
        }
    }
}

/// Copy `len` bits starting at bit `start` of `src` into a fresh word buffer.
pub(crate) fn extract_bits(src: &[u64], start: usize, len: usize) -> Vec<u64> {
    let nw = words_for(len);
    let mut out = vec![0u64; nw];
    let off = start / 64;
    let bit = start % 64;
    for (j, o) in out.iter_mut().enumerate() {
        let lo = src.get(off + j).copied().unwrap_or(0);
        *o = if bit == 0 {
            lo
        } else {
            let hi = src.get(off + j + 1).copied().unwrap_or(0);
            (lo >> bit) | (hi << (64 - bit))
        };
    }
    mask_tail(&mut out, len);
    out
}

#[inline]
pub(crate) fn mask_tail(words: &mut [u64], len: usize) {
    let r = len % 64;
    if r != 0 {
        if let Some(last) = words.last_mut() {
            *last &= (1u64 << r) - 1;
        }
    }
}

/// A fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut words = vec![u64::MAX; words_for(len)];
        mask_tail(&mut words, len);
        Self { len, words }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Build from a list of set positions. Positions `>= len` panic.
    pub fn from_support<I: IntoIterator<Item = usize>>(len: usize, support: I) -> Self {
        let mut v = Self::zeros(len);
        for i in support {
            v.set(i, true);
        }
        v
    }

    pub(crate) fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        mask_tail(&mut words, len);
        Self { len, words }
    }

    /// Unpack from LSB-first bytes: bit `j` of byte `i` is coordinate `8i + j`.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Result<Self> {
        let need = len.div_ceil(8);
        if bytes.len() != need {
            return Err(Error::LengthMismatch {
                expected: need,
                actual: bytes.len(),
            });
        }
        let mut words = vec![0u64; words_for(len)];
        for (i, &b) in bytes.iter().enumerate() {
            words[i / 8] |= (b as u64) << (8 * (i % 8));
        }
        let mut tail = words.clone();
        mask_tail(&mut tail, len);
        if tail != words {
            return Err(Error::InvalidParams("padding bits must be zero".into()));
        }
        Ok(Self { len, words })
    }

    /// Pack into LSB-first bytes, `ceil(len / 8)` of them.
    pub fn to_bytes(&self) -> Vec<u8> {
        (0..self.len.div_ceil(8))
            .map(|i| (self.words[i / 8] >> (8 * (i % 8))) as u8)
            .collect()
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let words = (0..words_for(len)).map(|_| rng.gen()).collect();
        Self::from_words(len, words)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let m = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= m;
        } else {
            self.words[i / 64] &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Positions of the set bits, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and(&self, other: &BitVec) -> BitVec {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & b)
            .collect();
        BitVec {
            len: self.len,
            words,
        }
    }

    pub fn distance(&self, other: &BitVec) -> usize {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }

    /// Copy of bits `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> BitVec {
        assert!(start + len <= self.len, "slice out of range");
        BitVec {
            len,
            words: extract_bits(&self.words, start, len),
        }
    }

    pub fn concat<'a, I: IntoIterator<Item = &'a BitVec>>(parts: I) -> BitVec {
        let parts: Vec<&BitVec> = parts.into_iter().collect();
        let len = parts.iter().map(|p| p.len).sum();
        let mut words = vec![0u64; words_for(len)];
        let mut at = 0;
        for p in parts {
            xor_shifted_into(&mut words, &p.words, at);
            at += p.len;
        }
        BitVec { len, words }
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 128 {
            let s: String = (0..self.len)
                .map(|i| if self.get(i) { '1' } else { '0' })
                .collect();
            write!(f, "BitVec({s})")
        } else {
            write!(f, "BitVec(len={}, weight={})", self.len, self.weight())
        }
    }
}

/// Dense row-major binary matrix with word-packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix({}x{})", self.rows, self.cols)
    }
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Stack row vectors. All rows must share a length; `cols` is used when
    /// `rows` is empty.
    pub fn from_rows(cols: usize, rows: &[BitVec]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row length mismatch");
            m.row_words_mut(i).copy_from_slice(r.words());
        }
        m
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let v: Vec<BitVec> = (0..rows).map(|_| BitVec::random(cols, rng)).collect();
        Self::from_rows(cols, &v)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    pub(crate) fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BitVec {
        BitVec::from_words(self.cols, self.row_words(r).to_vec())
    }

    pub fn row_vecs(&self) -> Vec<BitVec> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.data[r * self.stride + c / 64] >> (c % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.stride + c / 64];
        let m = 1u64 << (c % 64);
        if value {
            *w |= m;
        } else {
            *w &= !m;
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let (x, y) = self.data.split_at_mut(hi * self.stride);
        x[lo * self.stride..(lo + 1) * self.stride].swap_with_slice(&mut y[..self.stride]);
    }

    /// row[dst] ^= row[src]
    pub fn xor_row_into(&mut self, dst: usize, src: usize) {
        assert_ne!(dst, src);
        let s = self.stride;
        if dst < src {
            let (x, y) = self.data.split_at_mut(src * s);
            for (d, v) in x[dst * s..(dst + 1) * s].iter_mut().zip(&y[..s]) {
                *d ^= *v;
            }
        } else {
            let (x, y) = self.data.split_at_mut(dst * s);
            for (d, v) in y[..s].iter_mut().zip(&x[src * s..(src + 1) * s]) {
                *d ^= *v;
            }
        }
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row(r).support() {
                t.set(c, r, true);
            }
        }
        t
    }

    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let row = self.row(r);
            let dst = r * out.stride;
            for j in row.support() {
                let src = other.row_words(j);
                for (d, s) in out.data[dst..dst + out.stride].iter_mut().zip(src) {
                    *d ^= *s;
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix: `v * self`.
    pub fn left_mul_vec(&self, v: &BitVec) -> Result<BitVec> {
        if v.len() != self.rows {
            return Err(Error::LengthMismatch {
                expected: self.rows,
                actual: v.len(),
            });
        }
        let mut out = vec![0u64; self.stride];
        for j in v.support() {
            for (d, s) in out.iter_mut().zip(self.row_words(j)) {
                *d ^= *s;
            }
        }
        Ok(BitVec::from_words(self.cols, out))
    }

    /// Matrix times column vector: `self * v^T`, returned as a row.
    pub fn mul_vec(&self, v: &BitVec) -> Result<BitVec> {
        if v.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                actual: v.len(),
            });
        }
        let mut out = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            let parity: u32 = self
                .row_words(r)
                .iter()
                .zip(v.words())
                .map(|(a, b)| (a & b).count_ones())
                .sum();
            if parity % 2 == 1 {
                out.set(r, true);
            }
        }
        Ok(out)
    }

    pub fn select_columns(&self, cols: &[usize]) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.rows, cols.len());
        for r in 0..self.rows {
            for (j, &c) in cols.iter().enumerate() {
                if self.get(r, c) {
                    out.set(r, j, true);
                }
            }
        }
        out
    }

    /// Gauss-Jordan elimination trying pivot columns in `order`. Returns the
    /// pivot columns; afterwards row `i` has its leading one at `pivots[i]`
    /// and every other row is zero there. Rows past the rank are zero.
    pub fn eliminate_in_order(&mut self, order: &[usize]) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for &c in order {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.get(i, c)) else {
                continue;
            };
            self.swap_rows(r, pr);
            for i in 0..self.rows {
                if i != r && self.get(i, c) {
                    self.xor_row_into(i, r);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Reduced row echelon form with natural column order.
    pub fn rref(&mut self) -> Vec<usize> {
        let order: Vec<usize> = (0..self.cols).collect();
        self.eliminate_in_order(&order)
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// A full-rank matrix spanning the same row space.
    pub fn row_basis(&self) -> BitMatrix {
        let mut m = self.clone();
        let rank = m.rref().len();
        let rows: Vec<BitVec> = (0..rank).map(|r| m.row(r)).collect();
        BitMatrix::from_rows(self.cols, &rows)
    }

    pub fn inverse(&self) -> Option<BitMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = BitMatrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in self.row(r).support() {
                aug.set(r, c, true);
            }
            aug.set(r, n + r, true);
        }
        let order: Vec<usize> = (0..n).collect();
        if aug.eliminate_in_order(&order).len() < n {
            return None;
        }
        let mut inv = BitMatrix::zeros(n, n);
        for r in 0..n {
            inv.row_words_mut(r)
                .copy_from_slice(&extract_bits(aug.row_words(r), n, n));
        }
        Some(inv)
    }

    /// Basis (as rows) of the right kernel `{x : self * x^T = 0}`.
    pub fn kernel(&self) -> BitMatrix {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = BitVec::zeros(self.cols);
            v.set(free, true);
            for (r, &pc) in pivots.iter().enumerate() {
                if m.get(r, free) {
                    v.set(pc, true);
                }
            }
            basis.push(v);
        }
        BitMatrix::from_rows(self.cols, &basis)
    }

    /// Some `u` with `u * self = c`, if `c` lies in the row space.
    pub fn solve_left(&self, c: &BitVec) -> Option<BitVec> {
        if c.len() != self.cols {
            return None;
        }
        // Eliminate [self | I] so that the right half records row combinations.
        let (k, n) = (self.rows, self.cols);
        let mut aug = BitMatrix::zeros(k, n + k);
        for r in 0..k {
            let mut w = self.row_words(r).to_vec();
            w.resize(aug.stride, 0);
            xor_shifted_into(&mut w, BitVec::from_support(k, [r]).words(), n);
            aug.row_words_mut(r).copy_from_slice(&w);
        }
        let order: Vec<usize> = (0..n).collect();
        let pivots = aug.eliminate_in_order(&order);
        let mut residual = c.clone();
        let mut combo = BitVec::zeros(k);
        for (r, &pc) in pivots.iter().enumerate() {
            if residual.get(pc) {
                let row = BitVec::from_words(n + k, aug.row_words(r).to_vec());
                residual.xor_assign(&row.slice(0, n));
                combo.xor_assign(&row.slice(n, k));
            }
        }
        residual.is_zero().then_some(combo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn byte_packing_is_lsb_first() {
        let v = BitVec::from_support(12, [0, 3, 9]);
        assert_eq!(v.to_bytes(), vec![0b0000_1001, 0b0000_0010]);
        assert_eq!(BitVec::from_bytes(&v.to_bytes(), 12).unwrap(), v);
        assert!(BitVec::from_bytes(&[0, 0x10], 12).is_err());
        assert!(BitVec::from_bytes(&[0], 12).is_err());
    }

    #[test]
    fn slice_and_concat() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = BitVec::random(300, &mut rng);
        let a = v.slice(0, 77);
        let b = v.slice(77, 150);
        let c = v.slice(227, 73);
        assert_eq!(BitVec::concat([&a, &b, &c]), v);
    }

    #[test]
    fn inverse_and_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut found = 0;
        while found < 5 {
            let m = BitMatrix::random(40, 40, &mut rng);
            if let Some(inv) = m.inverse() {
                assert_eq!(m.mul(&inv).unwrap(), BitMatrix::identity(40));
                found += 1;
            } else {
                assert!(m.rank() < 40);
            }
        }
        let g = BitMatrix::random(10, 30, &mut rng);
        let ker = g.kernel();
        assert_eq!(ker.rows(), 30 - g.rank());
        assert!(g
            .mul(&ker.transpose())
            .unwrap()
            .row_vecs()
            .iter()
            .all(|r| r.is_zero()));
    }

    #[test]
    fn solve_left_recovers_combination() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = BitMatrix::random(12, 40, &mut rng);
        let u = BitVec::random(12, &mut rng);
        let c = g.left_mul_vec(&u).unwrap();
        let sol = g.solve_left(&c).unwrap();
        assert_eq!(g.left_mul_vec(&sol).unwrap(), c);
        let mut off = c.clone();
        // a random vector is almost never in a 12-dim subspace of GF(2)^40
        off.xor_assign(&BitVec::from_support(40, [5]));
        if g.rank() == 12 && g.solve_left(&off).is_some() {
            assert_eq!(g.left_mul_vec(&g.solve_left(&off).unwrap()).unwrap(), off);
        }
    }
}
