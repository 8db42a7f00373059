//! Dense linear algebra over GF(2).
//!
//! Matrices act on row vectors from the right (`x = w · G`), which is the
//! convention used for polar generator matrices throughout the crate.
//! Indices are 0-based here; reports convert to 1-based at the edges.

use std::fmt;

use crate::error::{invalid, Result};

/// A vector of bits. Stored unpacked; every element is 0 or 1.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector(Vec<u8>);

impl BitVector {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return invalid(format!(
                "bit {pos} has value {} (expected 0 or 1)",
                bits[pos]
            ));
        }
        Ok(Self(bits))
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn from_bools(bits: impl IntoIterator<Item = bool>) -> Self {
        Self(bits.into_iter().map(u8::from).collect())
    }

    /// Parses a string of `0`/`1` characters; whitespace and `,` are ignored.
    pub fn parse(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(0),
                '1' => bits.push(1),
                c if c.is_whitespace() || c == ',' => {}
                c => return invalid(format!("unexpected character {c:?} in bit string")),
            }
        }
        Ok(Self(bits))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> u8 {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, bit: u8) {
        self.0[i] = bit & 1;
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.0
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    pub fn xor(&self, other: &BitVector) -> Result<BitVector> {
        if self.len() != other.len() {
            return invalid(format!("xor of lengths {} and {}", self.len(), other.len()));
        }
        Ok(Self(
            self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect(),
        ))
    }

    /// Bits at the given positions, in the order given.
    pub fn gather(&self, idx: &[usize]) -> BitVector {
        Self(idx.iter().map(|&i| self.0[i]).collect())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl From<BitVector> for Vec<u8> {
    fn from(v: BitVector) -> Self {
        v.0
    }
}

const WORD: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// Dense GF(2) matrix with word-packed rows.
#[derive(Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl Gf2Matrix {
    /// All-zero matrix. Zero rows is allowed (an empty dual basis, for instance).
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
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return invalid(format!(
                    "row {r} has length {} (expected {cols})",
                    row.len()
                ));
            }
            for (c, &b) in row.iter().enumerate() {
                if b > 1 {
                    return invalid(format!("entry ({r},{c}) = {b} is not a bit"));
                }
                m.set(r, c, b);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        ((self.data[r * self.stride + c / WORD] >> (c % WORD)) & 1) as u8
    }

    pub fn set(&mut self, r: usize, c: usize, bit: u8) {
        let w = &mut self.data[r * self.stride + c / WORD];
        let mask = 1u64 << (c % WORD);
        if bit & 1 == 1 {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        let s = self.stride;
        for k in 0..s {
            let v = self.data[src * s + k];
            self.data[dst * s + k] ^= v;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for k in 0..self.stride {
                self.data.swap(a * self.stride + k, b * self.stride + k);
            }
        }
    }

    pub fn row(&self, r: usize) -> BitVector {
        BitVector((0..self.cols).map(|c| self.get(r, c)).collect())
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows).map(|r| self.row(r).into_inner()).collect()
    }

    pub fn transpose(&self) -> Gf2Matrix {
        let mut t = Gf2Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) == 1 {
                    t.set(c, r, 1);
                }
            }
        }
        t
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &Gf2Matrix) -> Result<Gf2Matrix> {
        if self.cols != other.rows {
            return invalid(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            ));
        }
        let mut out = Gf2Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) == 1 {
                    let dst = r * out.stride;
                    for (w, &v) in other.row_words(k).iter().enumerate() {
                        out.data[dst + w] ^= v;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Gf2Matrix) -> Gf2Matrix {
        let mut out = Gf2Matrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) == 0 {
                    continue;
                }
                for i in 0..other.rows {
                    for j in 0..other.cols {
                        if other.get(i, j) == 1 {
                            out.set(r * other.rows + i, c * other.cols + j, 1);
                        }
                    }
                }
            }
        }
        out
    }

    /// Submatrix formed by the listed rows, in the order listed.
    pub fn select_rows(&self, idx: &[usize]) -> Result<Gf2Matrix> {
        let mut out = Gf2Matrix::zeros(idx.len(), self.cols);
        for (dst, &src) in idx.iter().enumerate() {
            if src >= self.rows {
                return invalid(format!(
                    "row index {src} out of range for {} rows",
                    self.rows
                ));
            }
            out.data[dst * self.stride..(dst + 1) * self.stride]
                .copy_from_slice(self.row_words(src));
        }
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        self.clone().row_reduce().len()
    }

    /// In-place reduced row echelon form. Pivots are taken in increasing column
    /// order and, within a column, from the lowest available row. Returns the
    /// pivot columns; the first `len()` rows hold the reduced basis.
    fn row_reduce(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut next = 0;
        for c in 0..self.cols {
            if next == self.rows {
                break;
            }
            let Some(p) = (next..self.rows).find(|&r| self.get(r, c) == 1) else {
                continue;
            };
            self.swap_rows(p, next);
            for r in 0..self.rows {
                if r != next && self.get(r, c) == 1 {
                    self.xor_row_into(next, r);
                }
            }
            pivots.push(c);
            next += 1;
        }
        pivots
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Gf2Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {}", self.row(r))?;
        }
        write!(f, "]")
    }
}

/// `log2(n)` when `n` is a power of two.
pub fn log2_exact(n: usize) -> Result<u32> {
    if n == 0 || !n.is_power_of_two() {
        return invalid(format!("blocklength {n} is not a power of two"));
    }
    Ok(n.trailing_zeros())
}

/// The n×n reverse shuffle `R_n`: `s·R_n = (s1, s3, …, s_{n-1}, s2, s4, …, s_n)`.
pub fn reverse_shuffle(n: usize) -> Result<Gf2Matrix> {
    log2_exact(n)?;
    let mut m = Gf2Matrix::zeros(n, n);
    let half = n / 2;
    for i in 0..n {
        // 0-based: even positions go to the front half, odd ones to the back.
        let dst = if i % 2 == 0 { i / 2 } else { half + i / 2 };
        m.set(i, dst, 1);
    }
    Ok(m)
}

/// Polar generator `G_n = (I_{n/2} ⊗ F) R_n (I_2 ⊗ G_{n/2})`, with `G_1 = I_1`.
pub fn polar_generator(n: usize) -> Result<Gf2Matrix> {
    log2_exact(n)?;
    if n == 1 {
        return Ok(Gf2Matrix::identity(1));
    }
    let kernel = Gf2Matrix::from_rows(&[vec![1, 0], vec![1, 1]])?;
    let half = polar_generator(n / 2)?;
    let left = Gf2Matrix::identity(n / 2).kron(&kernel);
    let right = Gf2Matrix::identity(2).kron(&half);
    left.mul(&reverse_shuffle(n)?)?.mul(&right)
}

/// Row vector times matrix over GF(2).
pub fn mat_vec_mul(v: &BitVector, m: &Gf2Matrix) -> Result<BitVector> {
    if v.len() != m.rows() {
        return invalid(format!(
            "vector of length {} times {}x{} matrix",
            v.len(),
            m.rows(),
            m.cols()
        ));
    }
    let mut acc = vec![0u64; m.stride];
    for (r, &b) in v.as_slice().iter().enumerate() {
        if b == 1 {
            for (a, &w) in acc.iter_mut().zip(m.row_words(r)) {
                *a ^= w;
            }
        }
    }
    Ok(BitVector(
        (0..m.cols())
            .map(|c| ((acc[c / WORD] >> (c % WORD)) & 1) as u8)
            .collect(),
    ))
}

/// Column view of a matrix, packed for repeated rank queries on column subsets.
#[derive(Clone, Debug)]
pub struct ColumnSet {
    height: usize,
    stride: usize,
    cols: Vec<u64>,
    count: usize,
}

impl ColumnSet {
    pub fn new(m: &Gf2Matrix) -> Self {
        let t = m.transpose();
        Self {
            height: m.rows(),
            stride: t.stride,
            cols: t.data,
            count: m.cols(),
        }
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    fn column(&self, c: usize) -> &[u64] {
        &self.cols[c * self.stride..(c + 1) * self.stride]
    }

    /// Dimension of the span of the selected columns.
    pub fn rank_of(&self, selected: impl IntoIterator<Item = usize>) -> Result<usize> {
        let mut basis = XorBasis::new(self.height);
        for c in selected {
            if c >= self.count {
                return invalid(format!(
                    "column index {c} out of range for {} columns",
                    self.count
                ));
            }
            basis.insert(self.column(c));
            if basis.rank() == self.height {
                break;
            }
        }
        Ok(basis.rank())
    }
}

/// Incremental GF(2) basis keyed by leading bit.
struct XorBasis {
    stride: usize,
    by_pivot: Vec<Option<Vec<u64>>>,
    rank: usize,
    scratch: Vec<u64>,
}

impl XorBasis {
    fn new(bits: usize) -> Self {
        let stride = words_for(bits);
        Self {
            stride,
            by_pivot: vec![None; bits],
            rank: 0,
            scratch: vec![0; stride],
        }
    }

    fn rank(&self) -> usize {
        self.rank
    }

    fn leading_bit(v: &[u64]) -> Option<usize> {
        v.iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, &w)| i * WORD + (WORD - 1 - w.leading_zeros() as usize))
    }

    fn insert(&mut self, v: &[u64]) -> bool {
        debug_assert_eq!(v.len(), self.stride);
        self.scratch.copy_from_slice(v);
        while let Some(p) = Self::leading_bit(&self.scratch) {
            match &self.by_pivot[p] {
                Some(b) => {
                    for (s, w) in self.scratch.iter_mut().zip(b) {
                        *s ^= w;
                    }
                }
                None => {
                    self.by_pivot[p] = Some(self.scratch.clone());
                    self.rank += 1;
                    return true;
                }
            }
        }
        false
    }
}

/// GF(2) rank of the columns of `m` whose indices are listed.
pub fn rank_of_columns(m: &Gf2Matrix, cols: &[usize]) -> Result<usize> {
    ColumnSet::new(m).rank_of(cols.iter().copied())
}

/// Parity-check matrix of the code generated by the rows of `g`.
///
/// `g` must have full row rank `k`; the result is `(n-k)×n` with
/// `H · gᵀ = 0` and full row rank. Row reduction uses lowest-index pivots,
/// so the output is deterministic.
pub fn parity_check_of(g: &Gf2Matrix) -> Result<Gf2Matrix> {
    let mut rref = g.clone();
    let pivots = rref.row_reduce();
    if pivots.len() != g.rows() {
        return invalid(format!(
            "generator has rank {} but {} rows; parity check needs full row rank",
            pivots.len(),
            g.rows()
        ));
    }
    let n = g.cols();
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
    let mut h = Gf2Matrix::zeros(free.len(), n);
    for (row, &f) in free.iter().enumerate() {
        h.set(row, f, 1);
        for (r, &p) in pivots.iter().enumerate() {
            if rref.get(r, f) == 1 {
                h.set(row, p, 1);
            }
        }
    }
    Ok(h)
}

/// Finds some `v` with `v · m = b`, or `None` if `b` is outside the row space.
pub fn solve(m: &Gf2Matrix, b: &BitVector) -> Result<Option<BitVector>> {
    if b.len() != m.cols() {
        return invalid(format!(
            "target of length {} for a matrix with {} columns",
            b.len(),
            m.cols()
        ));
    }
    // v·m = b  <=>  mᵀ vᵀ = bᵀ; eliminate on the augmented [mᵀ | bᵀ].
    let rows = m.cols();
    let unknowns = m.rows();
    let mut aug = Gf2Matrix::zeros(rows, unknowns + 1);
    for r in 0..rows {
        for c in 0..unknowns {
            aug.set(r, c, m.get(c, r));
        }
        aug.set(r, unknowns, b.get(r));
    }
    let pivots = aug.row_reduce();
    if pivots.last() == Some(&unknowns) {
        return Ok(None);
    }
    let mut v = BitVector::zeros(unknowns);
    for (r, &p) in pivots.iter().enumerate() {
        v.set(p, aug.get(r, unknowns));
    }
    Ok(Some(v))
}
