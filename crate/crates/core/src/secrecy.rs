//! Secrecy measurements: equivocation (exact and rank based), the Fano-style
//! lower bound, and exhaustive per-index mutual information.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channels::DiscreteChannel;
use crate::construction::WiretapCodeSpec;
use crate::error::{invalid, Error, Result};
use crate::gf2::{log2_exact, parity_check_of, polar_generator, BitVector, ColumnSet, Gf2Matrix};
use crate::info::{binary_entropy, neg_xlog2x};
use crate::polar::{all_codewords, polar_encode, ORACLE_MAX_N};
use crate::rng::StreamKey;

/// Largest blocklength for the mutual information explorer.
pub const MI_ORACLE_MAX_N: usize = 8;

/// Positions the eavesdropper received without erasure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErasurePattern {
    n: usize,
    unerased: Vec<usize>,
}

impl ErasurePattern {
    pub fn new(n: usize, unerased: &[usize]) -> Result<Self> {
        let mut d = unerased.to_vec();
        d.sort_unstable();
        d.dedup();
        if d.last().is_some_and(|&i| i >= n) {
            return invalid(format!("unerased index out of range for n = {n}"));
        }
        Ok(Self { n, unerased: d })
    }

    /// Each position survives independently with probability `1 - delta`.
    pub fn sample<R: Rng + ?Sized>(n: usize, delta: f64, rng: &mut R) -> Self {
        Self {
            n,
            unerased: (0..n).filter(|_| rng.gen::<f64>() >= delta).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn unerased(&self) -> &[usize] {
        &self.unerased
    }

    pub fn erased(&self) -> Vec<usize> {
        let mut keep = vec![true; self.n];
        for &i in &self.unerased {
            keep[i] = false;
        }
        (0..self.n).filter(|&i| keep[i]).collect()
    }

    /// Per-position channels that reproduce this pattern: a perfect BEC on
    /// surviving positions and a fully erasing one elsewhere.
    pub fn as_channels(&self) -> Vec<DiscreteChannel> {
        let (clear, gone) = (
            DiscreteChannel::bec(0.0).unwrap(),
            DiscreteChannel::bec(1.0).unwrap(),
        );
        let mut out = vec![gone; self.n];
        for &i in &self.unerased {
            out[i] = clear.clone();
        }
        out
    }
}

/// Parity-check matrix `H_n` of the code spanned by the noisy-set rows of `G_n`.
pub fn noisy_code_parity_check(spec: &WiretapCodeSpec) -> Result<Gf2Matrix> {
    let g = polar_generator(spec.n())?;
    parity_check_of(&g.select_rows(spec.noisy_set())?)
}

/// Equivocation left by one erasure pattern: the rank of the columns of
/// `H_n` at the erased positions.
pub fn pattern_equivocation(h: &ColumnSet, pattern: &ErasurePattern) -> Result<usize> {
    h.rank_of(pattern.erased())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivocationEstimate {
    pub mean_bits: f64,
    /// Standard error of the mean.
    pub std_error: f64,
    pub ranks: Vec<usize>,
}

/// Monte Carlo estimate of `H(U|Z)` for an erasure eavesdropper when the
/// legitimate channel is noiseless. Requires an empty frozen set.
pub fn bec_equivocation_mc(
    spec: &WiretapCodeSpec,
    delta: f64,
    trials: u64,
    stream: StreamKey,
) -> Result<EquivocationEstimate> {
    if !spec.frozen_set().is_empty() {
        return Err(Error::Precondition(format!(
            "rank-based equivocation needs an empty frozen set, found {} frozen indices",
            spec.frozen_set().len()
        )));
    }
    if !(0.0..=1.0).contains(&delta) {
        return invalid(format!("erasure probability {delta} outside [0, 1]"));
    }
    if trials == 0 {
        return invalid("equivocation estimate needs at least one trial");
    }
    let h = ColumnSet::new(&noisy_code_parity_check(spec)?);
    let n = spec.n();
    let ranks = (0..trials)
        .into_par_iter()
        .map(|t| {
            let pattern = ErasurePattern::sample(n, delta, &mut stream.trial_rng(t));
            pattern_equivocation(&h, &pattern)
        })
        .collect::<Result<Vec<_>>>()?;
    let m = trials as f64;
    let mean = ranks.iter().sum::<usize>() as f64 / m;
    let var = if trials > 1 {
        ranks
            .iter()
            .map(|&r| (r as f64 - mean).powi(2))
            .sum::<f64>()
            / (m - 1.0)
    } else {
        0.0
    };
    Ok(EquivocationEstimate {
        mean_bits: mean,
        std_error: (var / m).sqrt(),
        ranks,
    })
}

/// Exact `H(U|Z)` in bits, by enumeration over messages, noisy bits and
/// eavesdropper outputs. With `fixed_b_star` the noisy bits are that
/// constant instead of uniform, giving `H(U|Z)` for a known `b*`.
pub fn exact_equivocation(
    spec: &WiretapCodeSpec,
    eve: &DiscreteChannel,
    fixed_b_star: Option<&BitVector>,
) -> Result<f64> {
    exact_equivocation_per_position(spec, &vec![eve.clone(); spec.n()], fixed_b_star)
}

/// [`exact_equivocation`] with a separate channel at each position.
pub fn exact_equivocation_per_position(
    spec: &WiretapCodeSpec,
    channels: &[DiscreteChannel],
    fixed_b_star: Option<&BitVector>,
) -> Result<f64> {
    let n = spec.n();
    if n > ORACLE_MAX_N {
        return Err(Error::OracleTooLarge {
            n,
            limit: ORACLE_MAX_N,
        });
    }
    if channels.len() != n {
        return invalid(format!("{} channels for blocklength {n}", channels.len()));
    }
    let k = spec.info_set().len();
    let noise: Vec<BitVector> = match fixed_b_star {
        Some(b) if b.len() != spec.noisy_set().len() => {
            return invalid(format!(
                "fixed noisy vector has {} bits, noisy set has {}",
                b.len(),
                spec.noisy_set().len()
            ))
        }
        Some(b) => vec![b.clone()],
        None => (0..1usize << spec.noisy_set().len())
            .map(|v| bits_of(v, spec.noisy_set().len()))
            .collect(),
    };
    // Codeword table indexed by u * |noise| + noise index.
    let mut codewords = Vec::with_capacity((1 << k) * noise.len());
    for u in 0..1usize << k {
        let u = bits_of(u, k);
        for b in &noise {
            codewords.push(polar_encode(&spec.assemble(&u, b)?)?.into_inner());
        }
    }
    let ctx = Enumeration {
        channels,
        codewords: &codewords,
        per_u: noise.len(),
        weight: 1.0 / codewords.len() as f64,
    };
    let start = vec![1.0; codewords.len()];
    // Collect before summing so the result does not depend on the thread count.
    let parts: Vec<f64> = (0..channels[0].outputs())
        .into_par_iter()
        .map(|s| ctx.step(0, s, &start))
        .collect();
    Ok(parts.iter().sum())
}

fn bits_of(v: usize, len: usize) -> BitVector {
    BitVector::from_bools((0..len).map(|j| (v >> j) & 1 == 1))
}

struct Enumeration<'a> {
    channels: &'a [DiscreteChannel],
    codewords: &'a [Vec<u8>],
    per_u: usize,
    weight: f64,
}

impl Enumeration<'_> {
    /// Extends the partial output by symbol `s` at `depth` and returns the
    /// summed `H(U|Z=z)·p(z)` over all completions.
    fn step(&self, depth: usize, s: usize, probs: &[f64]) -> f64 {
        let c = &self.channels[depth];
        let next: Vec<f64> = probs
            .iter()
            .zip(self.codewords)
            .map(|(p, x)| p * c.prob(x[depth], s))
            .collect();
        if next.iter().all(|&p| p == 0.0) {
            return 0.0;
        }
        if depth + 1 == self.channels.len() {
            return self.leaf(&next);
        }
        (0..self.channels[depth + 1].outputs())
            .map(|t| self.step(depth + 1, t, &next))
            .sum()
    }

    fn leaf(&self, p_z_given_x: &[f64]) -> f64 {
        let joint: Vec<f64> = p_z_given_x
            .chunks(self.per_u)
            .map(|c| c.iter().sum::<f64>() * self.weight)
            .collect();
        let pz: f64 = joint.iter().sum();
        joint.iter().map(|&p| neg_xlog2x(p)).sum::<f64>() - neg_xlog2x(pz)
    }
}

/// Lower bound on the equivocation rate given the measured error rate of
/// the informed decoder:
/// `|A|/n - ε - 1/n - (h2(pe) + n r* pe)/n`, clamped at 0.
pub fn fano_equivocation_bound(
    card_a: usize,
    n: usize,
    r_star: f64,
    eps: f64,
    pe_given_u: f64,
) -> Result<f64> {
    if n == 0 {
        return invalid("blocklength must be positive");
    }
    if !(0.0..=1.0).contains(&pe_given_u) {
        return invalid(format!("error probability {pe_given_u} outside [0, 1]"));
    }
    let nf = n as f64;
    let fano = (binary_entropy(pe_given_u) + nf * r_star * pe_given_u) / nf;
    Ok((card_a as f64 / nf - eps - 1.0 / nf - fano).max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MutualInfoKind {
    /// `I_i = I(W_i; W_1..W_{i-1}, Y)`.
    I,
    /// `J_i`: conditioning on earlier inputs in `D` and on every input outside `D`.
    J,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MutualInfoReport {
    pub n: usize,
    pub kind: MutualInfoKind,
    /// `D`, 0-based.
    pub decoded: Vec<usize>,
    /// Complement of `D`, 0-based.
    pub revealed: Vec<usize>,
    /// Value per index in bits; `None` for indices outside `D`.
    pub values: Vec<Option<f64>>,
}

impl MutualInfoReport {
    pub fn get(&self, i: usize) -> Option<f64> {
        self.values.get(i).copied().flatten()
    }
}

fn check_mi_size(n: usize) -> Result<()> {
    log2_exact(n)?;
    if n > MI_ORACLE_MAX_N {
        return Err(Error::OracleTooLarge {
            n,
            limit: MI_ORACLE_MAX_N,
        });
    }
    Ok(())
}

/// `I(W_i; W_S, Y)` for each `(i, S)` with uniform i.i.d. inputs. Sets are
/// given as bit masks over `w` with `w_1` the most significant bit.
///
/// For a symmetric channel the posterior of `W_i` given `(W_S, Y)` has the
/// same entropy after translating `W` by any input vector, so it suffices to
/// average `H(W_i | W_S = 0, Y = y)` over `y` drawn from the all-zero word.
fn exhaustive_mi(c: &DiscreteChannel, n: usize, queries: &[(usize, usize)]) -> Result<Vec<f64>> {
    if !c.is_symmetric() {
        return Err(Error::Asymmetric(
            "the mutual information explorer assumes a symmetric channel".into(),
        ));
    }
    let codewords = all_codewords(n)?;
    let support: Vec<usize> = (0..c.outputs()).filter(|&s| c.prob(0, s) > 0.0).collect();
    let q = support.len();
    let total = q.checked_pow(n as u32).ok_or(Error::OracleTooLarge {
        n,
        limit: MI_ORACLE_MAX_N,
    })?;
    // Fixed-size chunks summed in order keep the floating-point result
    // independent of how rayon schedules them.
    const CHUNK: usize = 64;
    let partials: Vec<Vec<f64>> = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut acc = vec![0.0; queries.len()];
            let mut y = vec![0usize; n];
            for mut y_idx in chunk * CHUNK..((chunk + 1) * CHUNK).min(total) {
                for pos in (0..n).rev() {
                    y[pos] = support[y_idx % q];
                    y_idx /= q;
                }
                let weight: f64 = y.iter().map(|&s| c.prob(0, s)).product();
                let lik: Vec<f64> = codewords
                    .iter()
                    .map(|x| x.iter().zip(&y).map(|(&b, &s)| c.prob(b, s)).product())
                    .collect();
                for (slot, &(bit, mask)) in acc.iter_mut().zip(queries) {
                    let (mut p0, mut p1) = (0.0, 0.0);
                    for (w, &l) in lik.iter().enumerate().filter(|(w, _)| w & mask == 0) {
                        if w & bit == 0 {
                            p0 += l;
                        } else {
                            p1 += l;
                        }
                    }
                    *slot += weight * binary_entropy(p0 / (p0 + p1));
                }
            }
            acc
        })
        .collect();
    let mut h = vec![0.0; queries.len()];
    for part in partials {
        h.iter_mut().zip(part).for_each(|(s, v)| *s += v);
    }
    Ok(h.into_iter().map(|v| (1.0 - v).clamp(0.0, 1.0)).collect())
}

fn position_bit(n: usize, i: usize) -> usize {
    1 << (n - 1 - i)
}

/// All `I_i` by exhaustive enumeration (`n ≤ 8`).
pub fn mutual_info_profile(c: &DiscreteChannel, n: usize) -> Result<MutualInfoReport> {
    let all: Vec<usize> = (0..n).collect();
    let mut r = conditional_mutual_info_profile(c, n, &all)?;
    r.kind = MutualInfoKind::I;
    Ok(r)
}

/// `J_i` for every `i ∈ D` by exhaustive enumeration (`n ≤ 8`).
pub fn conditional_mutual_info_profile(
    c: &DiscreteChannel,
    n: usize,
    decoded: &[usize],
) -> Result<MutualInfoReport> {
    check_mi_size(n)?;
    let mut in_d = vec![false; n];
    for &i in decoded {
        if i >= n {
            return invalid(format!("index {i} out of range for n = {n}"));
        }
        in_d[i] = true;
    }
    let revealed_mask: usize = (0..n)
        .filter(|&j| !in_d[j])
        .map(|j| position_bit(n, j))
        .sum();
    let targets: Vec<usize> = (0..n).filter(|&i| in_d[i]).collect();
    let queries: Vec<(usize, usize)> = targets
        .iter()
        .map(|&i| {
            let earlier: usize = (0..i)
                .filter(|&j| in_d[j])
                .map(|j| position_bit(n, j))
                .sum();
            (position_bit(n, i), earlier | revealed_mask)
        })
        .collect();
    let values = exhaustive_mi(c, n, &queries)?;
    let mut out = vec![None; n];
    for (&i, v) in targets.iter().zip(values) {
        out[i] = Some(v);
    }
    Ok(MutualInfoReport {
        n,
        kind: MutualInfoKind::J,
        decoded: targets,
        revealed: (0..n).filter(|&j| !in_d[j]).collect(),
        values: out,
    })
}

/// `J_i` for a single index `i ∈ D`.
pub fn bit_mutual_info(c: &DiscreteChannel, n: usize, i: usize, decoded: &[usize]) -> Result<f64> {
    if !decoded.contains(&i) {
        return invalid(format!("index {i} is not in the decoded set"));
    }
    check_mi_size(n)?;
    let in_d = |j: usize| decoded.contains(&j);
    let mask: usize = (0..n)
        .filter(|&j| (j < i && in_d(j)) || !in_d(j))
        .map(|j| position_bit(n, j))
        .sum();
    Ok(exhaustive_mi(c, n, &[(position_bit(n, i), mask)])?[0])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PolarizationClass {
    /// `J_i < δ`.
    Bad,
    /// `J_i > 1 - δ`.
    Good,
    Unpolarized,
}

impl PolarizationClass {
    pub fn label(self) -> &'static str {
        match self {
            Self::Bad => "BAD",
            Self::Good => "GOOD",
            Self::Unpolarized => "UNPOLARIZED",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjectureReport {
    pub n: usize,
    pub delta: f64,
    pub capacity: f64,
    pub i_values: Vec<f64>,
    /// Indices with `I_i > 1 - δ`.
    pub good_set: Vec<usize>,
    pub a_prime: Vec<usize>,
    pub s: Vec<usize>,
    pub j: MutualInfoReport,
    /// Classification of each index of `S`, in the order of `s`.
    pub classes: Vec<PolarizationClass>,
    pub s_bad: Vec<usize>,
    pub s_good: Vec<usize>,
    pub unpolarized: Vec<usize>,
    /// Every index of `S` landed in one of the two polarized classes.
    pub dichotomy_holds: bool,
    /// `|S'' ∪ A'| ≤ n C`.
    pub cardinality_ok: bool,
    /// `J_i ≥ I_i` on `A'`.
    pub j_dominates_i_on_a_prime: bool,
}

/// Computes `J_i` on `D = A' ∪ S` and classifies the indices of `S`.
pub fn conjecture_scan(
    c: &DiscreteChannel,
    n: usize,
    delta: f64,
    a_prime: &[usize],
    s: &[usize],
) -> Result<ConjectureReport> {
    if !(0.0..0.5).contains(&delta) {
        return invalid(format!("threshold δ = {delta} must lie in [0, 0.5)"));
    }
    let capacity = c.capacity()?;
    let i_report = mutual_info_profile(c, n)?;
    let i_values: Vec<f64> = i_report
        .values
        .iter()
        .map(|v| v.expect("all indices decoded"))
        .collect();
    let good_set: Vec<usize> = (0..n).filter(|&i| i_values[i] > 1.0 - delta).collect();

    let mut seen = vec![false; n];
    for &i in a_prime.iter().chain(s) {
        if i >= n {
            return invalid(format!("index {i} out of range for n = {n}"));
        }
        if seen[i] {
            return invalid(format!("index {i} is listed twice across A' and S"));
        }
        seen[i] = true;
    }
    if let Some(&i) = a_prime.iter().find(|i| !good_set.contains(i)) {
        return invalid(format!(
            "A' index {i} has I = {} which is not above 1 - δ",
            i_values[i]
        ));
    }
    if let Some(&i) = s.iter().find(|i| good_set.contains(i)) {
        return invalid(format!("S index {i} belongs to the good set"));
    }

    let decoded: Vec<usize> = (0..n).filter(|&i| seen[i]).collect();
    let j = conditional_mutual_info_profile(c, n, &decoded)?;
    let classes: Vec<PolarizationClass> = s
        .iter()
        .map(|&i| {
            let v = j.get(i).expect("S is decoded");
            if v < delta {
                PolarizationClass::Bad
            } else if v > 1.0 - delta {
                PolarizationClass::Good
            } else {
                PolarizationClass::Unpolarized
            }
        })
        .collect();
    let pick = |class| -> Vec<usize> {
        s.iter()
            .zip(&classes)
            .filter(|(_, &c)| c == class)
            .map(|(&i, _)| i)
            .collect()
    };
    let (s_bad, s_good, unpolarized) = (
        pick(PolarizationClass::Bad),
        pick(PolarizationClass::Good),
        pick(PolarizationClass::Unpolarized),
    );
    let cardinality_ok = (s_good.len() + a_prime.len()) as f64 <= n as f64 * capacity + 1e-9;
    let j_dominates_i_on_a_prime = a_prime
        .iter()
        .all(|&i| j.get(i).unwrap() >= i_values[i] - 1e-12);
    Ok(ConjectureReport {
        n,
        delta,
        capacity,
        i_values,
        good_set,
        a_prime: a_prime.to_vec(),
        s: s.to_vec(),
        j,
        dichotomy_holds: unpolarized.is_empty(),
        classes,
        s_bad,
        s_good,
        unpolarized,
        cardinality_ok,
        j_dominates_i_on_a_prime,
    })
}
