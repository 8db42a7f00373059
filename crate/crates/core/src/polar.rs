//! Polar transform, exhaustive combined/split channel oracles, and the
//! belief recursion behind successive cancellation.
//!
//! Bit ordering follows the recursive construction directly: a length-`n`
//! input `w` is mapped to `(g(w), e(w))` where `g_k = w_{2k-1} ⊕ w_{2k}` and
//! `e_k = w_{2k}`, and the two halves are encoded independently into the
//! first and second half of the codeword. No explicit bit-reversal is used.

use crate::channels::DiscreteChannel;
use crate::error::{invalid, Error, Result};
use crate::gf2::{log2_exact, mat_vec_mul, polar_generator, BitVector};

/// Largest blocklength the exhaustive oracles accept.
pub const ORACLE_MAX_N: usize = 10;

/// Default lower clamp for belief components.
pub const DEFAULT_BELIEF_FLOOR: f64 = 1e-300;

fn check_oracle_size(n: usize) -> Result<()> {
    log2_exact(n)?;
    if n > ORACLE_MAX_N {
        return Err(Error::OracleTooLarge {
            n,
            limit: ORACLE_MAX_N,
        });
    }
    Ok(())
}

/// `w · G_n` in `O(n log n)`.
pub fn polar_encode(w: &BitVector) -> Result<BitVector> {
    log2_exact(w.len())?;
    let mut data = w.as_slice().to_vec();
    let mut scratch = vec![0u8; data.len()];
    encode_in_place(&mut data, &mut scratch);
    BitVector::new(data)
}

fn encode_in_place(data: &mut [u8], scratch: &mut [u8]) {
    let n = data.len();
    if n == 1 {
        return;
    }
    let h = n / 2;
    for k in 0..h {
        scratch[k] = data[2 * k] ^ data[2 * k + 1];
        scratch[h + k] = data[2 * k + 1];
    }
    data.copy_from_slice(scratch);
    let (top, bottom) = data.split_at_mut(h);
    let (s_top, s_bottom) = scratch.split_at_mut(h);
    encode_in_place(top, s_top);
    encode_in_place(bottom, s_bottom);
}

/// `p_n(y|w)` through the channel-combining recursion.
fn combined_recursive(c: &DiscreteChannel, w: &[u8], y: &[usize]) -> f64 {
    let n = w.len();
    if n == 1 {
        return c.prob(w[0], y[0]);
    }
    let h = n / 2;
    // s_{2k-1} = w_{2k-1} + w_{2k}, s_{2k} = w_{2k}; v = s R_n puts odd
    // positions of s first.
    let mut v = vec![0u8; n];
    for k in 0..h {
        v[k] = w[2 * k] ^ w[2 * k + 1];
        v[h + k] = w[2 * k + 1];
    }
    combined_recursive(c, &v[..h], &y[..h]) * combined_recursive(c, &v[h..], &y[h..])
}

/// `p(y|x)` of the memoryless channel for a whole vector.
pub fn vector_prob(c: &DiscreteChannel, x: &[u8], y: &[usize]) -> f64 {
    x.iter().zip(y).map(|(&b, &s)| c.prob(b, s)).product()
}

/// Combined channel probability `p_n(y|w)`, evaluated both by recursion and
/// as `p(y | w G_n)`. The two must agree to 1e-12; the recursive value is
/// returned.
pub fn exact_combined_prob(c: &DiscreteChannel, w: &BitVector, y: &[usize]) -> Result<f64> {
    check_oracle_size(w.len())?;
    if y.len() != w.len() {
        return invalid(format!(
            "output length {} does not match input length {}",
            y.len(),
            w.len()
        ));
    }
    if let Some(&s) = y.iter().find(|&&s| s >= c.outputs()) {
        return invalid(format!(
            "output symbol {s} outside alphabet of size {}",
            c.outputs()
        ));
    }
    let recursive = combined_recursive(c, w.as_slice(), y);
    let x = mat_vec_mul(w, &polar_generator(w.len())?)?;
    let direct = vector_prob(c, x.as_slice(), y);
    if (recursive - direct).abs() > 1e-12 {
        return Err(Error::OracleMismatch(format!(
            "recursive {recursive} vs matrix form {direct} for w = {w}"
        )));
    }
    Ok(recursive)
}

/// Iterates over all of `Y^n` in lexicographic order (first symbol most significant).
pub(crate) struct OutputVectors {
    current: Vec<usize>,
    alphabet: usize,
    done: bool,
}

impl OutputVectors {
    pub(crate) fn new(n: usize, alphabet: usize) -> Self {
        Self {
            current: vec![0; n],
            alphabet,
            done: alphabet == 0,
        }
    }

    /// The current vector, or `None` once the enumeration is exhausted.
    pub(crate) fn next_vec(&self) -> Option<&[usize]> {
        (!self.done).then_some(self.current.as_slice())
    }

    pub(crate) fn advance(&mut self) {
        for pos in (0..self.current.len()).rev() {
            self.current[pos] += 1;
            if self.current[pos] < self.alphabet {
                return;
            }
            self.current[pos] = 0;
        }
        self.done = true;
    }
}

/// All codewords `w G_n` for `w` in `{0,1}^n`, indexed by `w` read as a
/// binary number with `w_1` as the most significant bit.
pub(crate) fn all_codewords(n: usize) -> Result<Vec<Vec<u8>>> {
    (0..1usize << n)
        .map(|idx| {
            let w = BitVector::new(index_to_bits(idx, n))?;
            polar_encode(&w).map(BitVector::into_inner)
        })
        .collect()
}

pub(crate) fn index_to_bits(idx: usize, len: usize) -> Vec<u8> {
    (0..len)
        .map(|j| ((idx >> (len - 1 - j)) & 1) as u8)
        .collect()
}

pub(crate) fn bits_to_index(bits: &[u8]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

/// Exhaustive table of the split channel `p_n^{(l)}(y, w^{(l-1)} | x)`.
///
/// `index` is 0-based: `index = 0` is the first split channel, whose output
/// is `y` alone.
#[derive(Clone, Debug)]
pub struct ExactSplitTable {
    n: usize,
    index: usize,
    outputs: usize,
    /// `[(y_idx << index | prefix) * 2 + x]`
    entries: Vec<f64>,
}

impl ExactSplitTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn output_vectors(&self) -> usize {
        self.outputs.pow(self.n as u32)
    }

    pub fn prefixes(&self) -> usize {
        1 << self.index
    }

    fn slot(&self, y_idx: usize, prefix: usize) -> usize {
        ((y_idx << self.index) | prefix) * 2
    }

    /// `(p(y, prefix | 0), p(y, prefix | 1))` for a flattened output index.
    pub fn pair(&self, y_idx: usize, prefix: usize) -> (f64, f64) {
        let s = self.slot(y_idx, prefix);
        (self.entries[s], self.entries[s + 1])
    }

    pub fn prob(&self, y: &[usize], prefix: &[u8], x: u8) -> f64 {
        let y_idx = y.iter().fold(0, |acc, &s| acc * self.outputs + s);
        let s = self.slot(y_idx, bits_to_index(prefix));
        self.entries[s + x as usize]
    }

    /// Flattened index → output vector.
    pub fn output_vector(&self, mut y_idx: usize) -> Vec<usize> {
        let mut y = vec![0; self.n];
        for pos in (0..self.n).rev() {
            y[pos] = y_idx % self.outputs;
            y_idx /= self.outputs;
        }
        y
    }

    /// Total probability mass for input `x`; 1 for a valid table.
    pub fn total(&self, x: u8) -> f64 {
        self.entries.iter().skip(x as usize).step_by(2).sum()
    }

    pub fn bhattacharyya(&self) -> f64 {
        self.entries
            .chunks_exact(2)
            .map(|p| (p[0] * p[1]).sqrt())
            .sum()
    }

    /// `I(W_l; Y, W^{(l-1)})` with uniform inputs, in bits.
    pub fn mutual_information(&self) -> f64 {
        let mut mi = 0.0;
        for p in self.entries.chunks_exact(2) {
            let q = 0.5 * (p[0] + p[1]);
            for &v in p {
                if v > 0.0 {
                    mi += 0.5 * v * (v / q).log2();
                }
            }
        }
        mi
    }
}

/// Builds the split channel table by summing the combined channel over the
/// trailing `n - l` inputs.
pub fn exact_split_table(c: &DiscreteChannel, n: usize, index: usize) -> Result<ExactSplitTable> {
    check_oracle_size(n)?;
    if index >= n {
        return invalid(format!("split index {index} out of range for n = {n}"));
    }
    let codewords = all_codewords(n)?;
    let outputs = c.outputs();
    let mut table = ExactSplitTable {
        n,
        index,
        outputs,
        entries: vec![0.0; outputs.pow(n as u32) << (index + 1)],
    };
    let scale = 1.0 / (1u64 << (n - 1)) as f64;
    let tail = n - index - 1;
    let mut ys = OutputVectors::new(n, outputs);
    let mut y_idx = 0;
    while let Some(y) = ys.next_vec() {
        for (w_idx, x) in codewords.iter().enumerate() {
            let p = vector_prob(c, x, y);
            if p == 0.0 {
                continue;
            }
            let head = w_idx >> tail; // (w_1..w_l) with w_l as the low bit
            let prefix = head >> 1;
            let bit = head & 1;
            let s = table.slot(y_idx, prefix) + bit;
            table.entries[s] += scale * p;
        }
        y_idx += 1;
        ys.advance();
    }
    Ok(table)
}

/// Unnormalized evidence for a bit being 0 or 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeliefPair {
    pub pr0: f64,
    pub pr1: f64,
}

impl BeliefPair {
    pub const ERASED: BeliefPair = BeliefPair { pr0: 0.5, pr1: 0.5 };

    pub fn new(pr0: f64, pr1: f64) -> Self {
        Self { pr0, pr1 }
    }

    pub fn from_channel(c: &DiscreteChannel, y: usize) -> Self {
        Self {
            pr0: c.prob(0, y),
            pr1: c.prob(1, y),
        }
    }

    pub fn get(&self, bit: u8) -> f64 {
        if bit == 0 {
            self.pr0
        } else {
            self.pr1
        }
    }

    /// Hard decision: 0 iff `pr0 >= pr1`.
    pub fn decision(&self) -> u8 {
        u8::from(self.pr0 < self.pr1)
    }

    pub fn is_tie(&self) -> bool {
        self.pr0 == self.pr1
    }

    /// Clamps each component below at `floor` and rescales to sum 1.
    pub fn normalized(self, floor: f64) -> Self {
        let pr0 = self.pr0.max(floor);
        let pr1 = self.pr1.max(floor);
        let s = pr0 + pr1;
        Self {
            pr0: pr0 / s,
            pr1: pr1 / s,
        }
    }
}

/// Odd-index step: `out(v) = ½ Σ_u a(v⊕u) b(u)`.
pub fn belief_combine_f(a: BeliefPair, b: BeliefPair) -> BeliefPair {
    belief_combine_f_with_floor(a, b, DEFAULT_BELIEF_FLOOR)
}

pub fn belief_combine_f_with_floor(a: BeliefPair, b: BeliefPair, floor: f64) -> BeliefPair {
    BeliefPair {
        pr0: 0.5 * (a.pr0 * b.pr0 + a.pr1 * b.pr1),
        pr1: 0.5 * (a.pr1 * b.pr0 + a.pr0 * b.pr1),
    }
    .normalized(floor)
}

/// Even-index step given the already decided odd bit `u`:
/// `out(v) = ½ a(u⊕v) b(v)`.
pub fn belief_combine_g(a: BeliefPair, b: BeliefPair, u: u8) -> BeliefPair {
    belief_combine_g_with_floor(a, b, u, DEFAULT_BELIEF_FLOOR)
}

pub fn belief_combine_g_with_floor(a: BeliefPair, b: BeliefPair, u: u8, floor: f64) -> BeliefPair {
    BeliefPair {
        pr0: 0.5 * a.get(u) * b.pr0,
        pr1: 0.5 * a.get(u ^ 1) * b.pr1,
    }
    .normalized(floor)
}

#[derive(Clone, Copy, Debug)]
struct NodeState {
    top: BeliefPair,
    bottom: BeliefPair,
    odd_bit: u8,
    /// Set once the odd bit of the current pair has been committed.
    even_phase: bool,
}

/// Successive cancellation engine.
///
/// Bits are processed in order `w_1, w_2, …`. For each position call
/// [`next_belief`](Self::next_belief) to get the split-channel evidence given
/// the bits committed so far, then [`commit`](Self::commit) the value to
/// condition on (a decision, or a known value for genie-aided runs).
///
/// Nodes form a heap: node `v` has children `2v` (first half of the outputs,
/// fed `w_{2k-1} ⊕ w_{2k}`) and `2v+1` (second half, fed `w_{2k}`); leaves are
/// `n..2n`. Both children advance in lockstep, one index per bit pair.
#[derive(Clone, Debug)]
pub struct SuccessiveCanceller {
    n: usize,
    leaves: Vec<BeliefPair>,
    nodes: Vec<NodeState>,
    position: usize,
    floor: f64,
}

impl SuccessiveCanceller {
    pub fn new(leaves: Vec<BeliefPair>) -> Result<Self> {
        Self::with_floor(leaves, DEFAULT_BELIEF_FLOOR)
    }

    pub fn with_floor(leaves: Vec<BeliefPair>, floor: f64) -> Result<Self> {
        let n = leaves.len();
        log2_exact(n)?;
        let blank = NodeState {
            top: BeliefPair::ERASED,
            bottom: BeliefPair::ERASED,
            odd_bit: 0,
            even_phase: false,
        };
        Ok(Self {
            n,
            leaves,
            nodes: vec![blank; n],
            position: 0,
            floor,
        })
    }

    /// Channel-output evidence for each received symbol.
    pub fn from_outputs(c: &DiscreteChannel, y: &[usize]) -> Result<Self> {
        if let Some(&s) = y.iter().find(|&&s| s >= c.outputs()) {
            return invalid(format!(
                "output symbol {s} outside alphabet of size {}",
                c.outputs()
            ));
        }
        Self::new(y.iter().map(|&s| BeliefPair::from_channel(c, s)).collect())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// 0-based index of the next bit to be committed.
    pub fn position(&self) -> usize {
        self.position
    }

    pub fn is_finished(&self) -> bool {
        self.position == self.n
    }

    /// Evidence for the current bit. Calling it twice is harmless.
    pub fn next_belief(&mut self) -> BeliefPair {
        assert!(!self.is_finished(), "all bits already committed");
        self.belief(1)
    }

    pub fn commit(&mut self, bit: u8) {
        assert!(!self.is_finished(), "all bits already committed");
        self.feed(1, bit & 1);
        self.position += 1;
    }

    fn belief(&mut self, node: usize) -> BeliefPair {
        if node >= self.n {
            return self.leaves[node - self.n];
        }
        let state = self.nodes[node];
        if state.even_phase {
            belief_combine_g_with_floor(state.top, state.bottom, state.odd_bit, self.floor)
        } else {
            let top = self.belief(2 * node);
            let bottom = self.belief(2 * node + 1);
            let s = &mut self.nodes[node];
            s.top = top;
            s.bottom = bottom;
            belief_combine_f_with_floor(top, bottom, self.floor)
        }
    }

    fn feed(&mut self, node: usize, bit: u8) {
        if node >= self.n {
            return;
        }
        let s = &mut self.nodes[node];
        if s.even_phase {
            s.even_phase = false;
            let odd = s.odd_bit;
            self.feed(2 * node, odd ^ bit);
            self.feed(2 * node + 1, bit);
        } else {
            s.odd_bit = bit;
            s.even_phase = true;
        }
    }
}
