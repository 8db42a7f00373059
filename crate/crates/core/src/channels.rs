//! Binary-input discrete memoryless channels.
//!
//! A channel is a 2×|Y| transition table. Output symbols are plain indices;
//! the BEC uses the ordering `{0, erasure, 1}`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gf2::BitVector;
use crate::info::binary_input_mutual_information;

/// Row-sum tolerance for stochastic tables.
pub const STOCHASTIC_TOL: f64 = 1e-12;
/// Tolerance used when matching probabilities in the symmetry search.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Index of the erasure symbol in a BEC output alphabet.
pub const ERASURE: usize = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteChannel {
    rows: [Vec<f64>; 2],
}

/// Result of [`DiscreteChannel::symmetry`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Symmetry {
    /// An involutive output permutation with `p(y|0) = p(π(y)|1)`.
    Symmetric(Vec<usize>),
    Asymmetric,
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return invalid(format!("{name} = {p} is outside [0, 1]"));
    }
    Ok(())
}

fn check_stochastic(rows: &[Vec<f64>], what: &str) -> Result<()> {
    for (i, row) in rows.iter().enumerate() {
        if let Some(v) = row.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return invalid(format!("{what} row {i} has invalid entry {v}"));
        }
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > STOCHASTIC_TOL {
            return invalid(format!("{what} row {i} sums to {s}"));
        }
    }
    Ok(())
}

impl DiscreteChannel {
    /// Binary erasure channel with erasure probability `delta`.
    pub fn bec(delta: f64) -> Result<Self> {
        check_probability("erasure probability", delta)?;
        Ok(Self {
            rows: [vec![1.0 - delta, delta, 0.0], vec![0.0, delta, 1.0 - delta]],
        })
    }

    /// Binary symmetric channel with crossover probability `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        check_probability("crossover probability", p)?;
        Ok(Self {
            rows: [vec![1.0 - p, p], vec![p, 1.0 - p]],
        })
    }

    /// Noiseless binary channel (a BSC with zero crossover).
    pub fn noiseless() -> Self {
        Self {
            rows: [vec![1.0, 0.0], vec![0.0, 1.0]],
        }
    }

    /// Arbitrary binary-input table. Only stochasticity is checked; use
    /// [`make_channel`] when the channel must also be symmetric.
    pub fn from_table(row0: Vec<f64>, row1: Vec<f64>) -> Result<Self> {
        if row0.is_empty() || row0.len() != row1.len() {
            return invalid(format!(
                "table rows have lengths {} and {}",
                row0.len(),
                row1.len()
            ));
        }
        let rows = [row0, row1];
        check_stochastic(&rows, "channel")?;
        Ok(Self { rows })
    }

    pub fn outputs(&self) -> usize {
        self.rows[0].len()
    }

    pub fn prob(&self, x: u8, y: usize) -> f64 {
        self.rows[x as usize][y]
    }

    pub fn row(&self, x: u8) -> &[f64] {
        &self.rows[x as usize]
    }

    /// `δ` if this table is a BEC in `{0, erasure, 1}` order.
    pub fn as_bec(&self) -> Option<f64> {
        if self.outputs() != 3 {
            return None;
        }
        let d = self.rows[0][1];
        let close = |a: f64, b: f64| (a - b).abs() <= STOCHASTIC_TOL;
        let ok = close(self.rows[1][1], d)
            && close(self.rows[0][0], 1.0 - d)
            && close(self.rows[1][2], 1.0 - d)
            && close(self.rows[0][2], 0.0)
            && close(self.rows[1][0], 0.0);
        ok.then_some(d)
    }

    /// Crossover probability if this is a two-output BSC.
    pub fn as_bsc(&self) -> Option<f64> {
        if self.outputs() != 2 {
            return None;
        }
        let p = self.rows[0][1];
        ((self.rows[1][0] - p).abs() <= STOCHASTIC_TOL).then_some(p)
    }

    /// True when every output identifies the input with certainty.
    pub fn is_noiseless(&self) -> bool {
        (0..self.outputs()).all(|y| self.rows[0][y] == 0.0 || self.rows[1][y] == 0.0)
    }

    /// Exhaustive search for an involution `π` with `p(y|0) = p(π(y)|1)`.
    pub fn symmetry(&self) -> Symmetry {
        let n = self.outputs();
        let mut perm = vec![usize::MAX; n];
        if self.pair_outputs(0, &mut perm) {
            Symmetry::Symmetric(perm)
        } else {
            Symmetry::Asymmetric
        }
    }

    fn pair_outputs(&self, start: usize, perm: &mut [usize]) -> bool {
        let Some(y) = (start..perm.len()).find(|&y| perm[y] == usize::MAX) else {
            return true;
        };
        let matches = |a: usize, b: usize| {
            (self.rows[0][a] - self.rows[1][b]).abs() <= SYMMETRY_TOL
                && (self.rows[0][b] - self.rows[1][a]).abs() <= SYMMETRY_TOL
        };
        for partner in y..perm.len() {
            if perm[partner] != usize::MAX || !matches(y, partner) {
                continue;
            }
            perm[y] = partner;
            perm[partner] = y;
            if self.pair_outputs(y + 1, perm) {
                return true;
            }
            perm[y] = usize::MAX;
            perm[partner] = usize::MAX;
        }
        false
    }

    pub fn is_symmetric(&self) -> bool {
        matches!(self.symmetry(), Symmetry::Symmetric(_))
    }

    /// `I(X;Y)` at the uniform input, in bits. This is the capacity for a
    /// symmetric channel; asymmetric channels are rejected.
    pub fn capacity(&self) -> Result<f64> {
        if !self.is_symmetric() {
            return Err(Error::Asymmetric(
                "uniform input is not guaranteed to achieve capacity".into(),
            ));
        }
        Ok(self.uniform_mutual_information())
    }

    /// `I(X;Y)` at the uniform input, without the symmetry requirement.
    pub fn uniform_mutual_information(&self) -> f64 {
        binary_input_mutual_information(0.5, &self.rows[0], &self.rows[1])
    }

    /// Draws one output symbol for input `x`.
    pub fn sample<R: Rng + ?Sized>(&self, x: u8, rng: &mut R) -> usize {
        let row = self.row(x);
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (y, &p) in row.iter().enumerate() {
            acc += p;
            if u < acc {
                return y;
            }
        }
        // Rounding can leave `acc` just below 1; fall back to the last
        // symbol with positive probability.
        row.iter().rposition(|&p| p > 0.0).unwrap_or(row.len() - 1)
    }

    /// Memoryless transmission of a codeword.
    pub fn transmit<R: Rng + ?Sized>(&self, x: &BitVector, rng: &mut R) -> Vec<usize> {
        x.as_slice().iter().map(|&b| self.sample(b, rng)).collect()
    }

    /// `Σ_y sqrt(p(y|0) p(y|1))`.
    pub fn bhattacharyya(&self) -> f64 {
        self.rows[0]
            .iter()
            .zip(&self.rows[1])
            .map(|(a, b)| (a * b).sqrt())
            .sum()
    }
}

/// Builds a channel from its description and requires it to be symmetric.
pub fn make_channel(spec: &ChannelSpec) -> Result<DiscreteChannel> {
    let c = match spec {
        ChannelSpec::Bec { p } => DiscreteChannel::bec(*p)?,
        ChannelSpec::Bsc { p } => DiscreteChannel::bsc(*p)?,
        ChannelSpec::Noiseless => DiscreteChannel::noiseless(),
        ChannelSpec::Table { rows } => {
            if rows.len() != 2 {
                return invalid(format!("channel table needs 2 rows, got {}", rows.len()));
            }
            DiscreteChannel::from_table(rows[0].clone(), rows[1].clone())?
        }
    };
    if let Symmetry::Asymmetric = c.symmetry() {
        return Err(Error::Asymmetric(format!(
            "no involutive output pairing satisfies p(y|0) = p(pi(y)|1) for rows {:?} / {:?}",
            c.rows[0], c.rows[1]
        )));
    }
    Ok(c)
}

/// Channel description as it appears in configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ChannelSpec {
    Bec { p: f64 },
    Bsc { p: f64 },
    Noiseless,
    Table { rows: Vec<Vec<f64>> },
}

/// Stochastic map `D(z|y)` from legitimate outputs to eavesdropper outputs.
#[derive(Clone, Debug, PartialEq)]
pub struct DegradationKernel {
    rows: Vec<Vec<f64>>,
}

impl DegradationKernel {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || width == 0 || rows.iter().any(|r| r.len() != width) {
            return invalid("kernel rows must be non-empty and of equal length");
        }
        check_stochastic(&rows, "kernel")?;
        Ok(Self { rows })
    }

    pub fn identity(size: usize) -> Self {
        let rows = (0..size)
            .map(|i| (0..size).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self { rows }
    }

    /// BEC-to-BEC kernel: each surviving symbol is erased with probability `p`.
    pub fn erase_surviving(p: f64) -> Result<Self> {
        check_probability("kernel erasure probability", p)?;
        Ok(Self {
            rows: vec![
                vec![1.0 - p, p, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, p, 1.0 - p],
            ],
        })
    }

    /// Binary flip with probability `p`.
    pub fn flip(p: f64) -> Result<Self> {
        check_probability("kernel flip probability", p)?;
        Ok(Self {
            rows: vec![vec![1.0 - p, p], vec![p, 1.0 - p]],
        })
    }

    pub fn inputs(&self) -> usize {
        self.rows.len()
    }

    pub fn outputs(&self) -> usize {
        self.rows[0].len()
    }

    pub fn prob(&self, y: usize, z: usize) -> f64 {
        self.rows[y][z]
    }

    pub fn sample<R: Rng + ?Sized>(&self, y: usize, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (z, &p) in self.rows[y].iter().enumerate() {
            acc += p;
            if u < acc {
                return z;
            }
        }
        self.rows[y]
            .iter()
            .rposition(|&p| p > 0.0)
            .unwrap_or(self.outputs() - 1)
    }
}

/// Kernel description for configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelSpec {
    Identity { size: usize },
    Erase { p: f64 },
    Flip { p: f64 },
    Table { rows: Vec<Vec<f64>> },
}

impl KernelSpec {
    pub fn build(&self) -> Result<DegradationKernel> {
        match self {
            KernelSpec::Identity { size } => Ok(DegradationKernel::identity(*size)),
            KernelSpec::Erase { p } => DegradationKernel::erase_surviving(*p),
            KernelSpec::Flip { p } => DegradationKernel::flip(*p),
            KernelSpec::Table { rows } => DegradationKernel::from_rows(rows.clone()),
        }
    }
}

/// A physically degraded wiretap pair: `P(y,z|x) = G(y|x) D(z|y)`.
#[derive(Clone, Debug)]
pub struct DegradedPair {
    pub legit: DiscreteChannel,
    pub eve: DiscreteChannel,
    pub kernel: DegradationKernel,
}

impl DegradedPair {
    /// The joint channel with output `(y, z)` encoded as `y * |Z| + z`.
    pub fn joint(&self) -> DiscreteChannel {
        let zs = self.kernel.outputs();
        let row = |x: u8| {
            let mut r = Vec::with_capacity(self.legit.outputs() * zs);
            for y in 0..self.legit.outputs() {
                for z in 0..zs {
                    r.push(self.legit.prob(x, y) * self.kernel.prob(y, z));
                }
            }
            r
        };
        DiscreteChannel {
            rows: [row(0), row(1)],
        }
    }

    /// Splits a joint output index back into `(y, z)`.
    pub fn split_joint(&self, joint: usize) -> (usize, usize) {
        (joint / self.kernel.outputs(), joint % self.kernel.outputs())
    }
}

/// Eavesdropper channel `Q(z|x) = Σ_y G(y|x) D(z|y)`, kept together with its kernel.
pub fn compose_degraded(
    base: &DiscreteChannel,
    kernel: &DegradationKernel,
) -> Result<DegradedPair> {
    if kernel.inputs() != base.outputs() {
        return invalid(format!(
            "kernel has {} input symbols but the channel has {} outputs",
            kernel.inputs(),
            base.outputs()
        ));
    }
    let row = |x: u8| -> Vec<f64> {
        (0..kernel.outputs())
            .map(|z| {
                (0..base.outputs())
                    .map(|y| base.prob(x, y) * kernel.prob(y, z))
                    .sum()
            })
            .collect()
    };
    let eve = DiscreteChannel {
        rows: [row(0), row(1)],
    };
    Ok(DegradedPair {
        legit: base.clone(),
        eve,
        kernel: kernel.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::binary_entropy;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn bec_and_bsc_tables() {
        let c = DiscreteChannel::bec(0.0).unwrap();
        assert_eq!(c.prob(0, 0), 1.0);
        assert_eq!(c.prob(1, 2), 1.0);
        let c = DiscreteChannel::bec(0.5).unwrap();
        assert_eq!(
            (c.prob(0, 0), c.prob(0, ERASURE), c.prob(0, 2)),
            (0.5, 0.5, 0.0)
        );
        assert_eq!(
            (c.prob(1, 2), c.prob(1, ERASURE), c.prob(1, 0)),
            (0.5, 0.5, 0.0)
        );
        let c = DiscreteChannel::bsc(0.11).unwrap();
        assert_eq!(c.prob(0, 1), 0.11);
        assert_eq!(c.prob(1, 0), 0.11);
        assert!(DiscreteChannel::bec(1.5).is_err());
        assert!(DiscreteChannel::bsc(-0.1).is_err());
    }

    #[test]
    fn symmetry_permutations() {
        let bsc = DiscreteChannel::bsc(0.2).unwrap();
        assert_eq!(bsc.symmetry(), Symmetry::Symmetric(vec![1, 0]));
        let bec = DiscreteChannel::bec(0.3).unwrap();
        assert_eq!(bec.symmetry(), Symmetry::Symmetric(vec![2, 1, 0]));
        let z = DiscreteChannel::from_table(vec![1.0, 0.0], vec![0.3, 0.7]).unwrap();
        assert_eq!(z.symmetry(), Symmetry::Asymmetric);
        assert!(matches!(
            make_channel(&ChannelSpec::Table {
                rows: vec![vec![1.0, 0.0], vec![0.3, 0.7]]
            }),
            Err(Error::Asymmetric(_))
        ));
        assert!(z.capacity().is_err());
    }

    #[test]
    fn symmetry_needs_backtracking() {
        // Output 0 could pair with 1 or 2 by its own values; only 0<->2 works for both.
        let c = DiscreteChannel::from_table(vec![0.2, 0.3, 0.3, 0.2], vec![0.3, 0.2, 0.2, 0.3])
            .unwrap();
        match c.symmetry() {
            Symmetry::Symmetric(pi) => {
                for y in 0..4 {
                    assert_eq!(pi[pi[y]], y);
                    assert!(close(c.prob(0, y), c.prob(1, pi[y]), 1e-15));
                }
            }
            Symmetry::Asymmetric => panic!("expected symmetric"),
        }
    }

    #[test]
    fn capacities() {
        assert!(close(
            DiscreteChannel::bec(0.5).unwrap().capacity().unwrap(),
            0.5,
            1e-12
        ));
        assert!(close(
            DiscreteChannel::bsc(0.0).unwrap().capacity().unwrap(),
            1.0,
            1e-12
        ));
        let c = DiscreteChannel::bsc(0.11).unwrap().capacity().unwrap();
        assert!(close(c, 1.0 - binary_entropy(0.11), 1e-12));
        assert!(close(c, 0.5002, 5e-4));
    }

    #[test]
    fn composition_examples() {
        let pair = compose_degraded(
            &DiscreteChannel::bec(0.2).unwrap(),
            &DegradationKernel::erase_surviving(0.25).unwrap(),
        )
        .unwrap();
        assert!(close(pair.eve.as_bec().unwrap(), 0.4, 1e-15));

        let base = DiscreteChannel::bsc(0.05).unwrap();
        let same = compose_degraded(&base, &DegradationKernel::identity(2)).unwrap();
        assert_eq!(same.eve, base);

        let pair = compose_degraded(&base, &DegradationKernel::flip(0.05).unwrap()).unwrap();
        assert!(close(pair.eve.as_bsc().unwrap(), 0.095, 1e-15));

        assert!(compose_degraded(&base, &DegradationKernel::identity(3)).is_err());
    }

    #[test]
    fn composition_preserves_symmetry_and_loses_capacity() {
        let cases = [
            (
                DiscreteChannel::bec(0.1).unwrap(),
                DegradationKernel::erase_surviving(0.3).unwrap(),
            ),
            (
                DiscreteChannel::bec(0.6).unwrap(),
                DegradationKernel::erase_surviving(0.9).unwrap(),
            ),
            (
                DiscreteChannel::bsc(0.02).unwrap(),
                DegradationKernel::flip(0.2).unwrap(),
            ),
            (
                DiscreteChannel::bsc(0.3).unwrap(),
                DegradationKernel::flip(0.4).unwrap(),
            ),
        ];
        for (base, k) in cases {
            let pair = compose_degraded(&base, &k).unwrap();
            assert!(pair.eve.is_symmetric());
            assert!(pair.eve.capacity().unwrap() <= base.capacity().unwrap() + 1e-15);
            // The joint law marginalizes back to Q.
            let joint = pair.joint();
            for x in 0..2u8 {
                for z in 0..k.outputs() {
                    let m: f64 = (0..base.outputs())
                        .map(|y| joint.prob(x, y * k.outputs() + z))
                        .sum();
                    assert!(close(m, pair.eve.prob(x, z), 1e-12));
                }
            }
        }
    }

    #[test]
    fn sampling_edge_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = BitVector::parse("0110100111").unwrap();
        let y = DiscreteChannel::bec(0.0).unwrap().transmit(&x, &mut rng);
        let as_bits: Vec<u8> = y.iter().map(|&s| if s == 2 { 1 } else { 0 }).collect();
        assert_eq!(as_bits, x.as_slice());
        let y = DiscreteChannel::bec(1.0).unwrap().transmit(&x, &mut rng);
        assert!(y.iter().all(|&s| s == ERASURE));
    }

    #[test]
    fn erasure_fraction_concentrates() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = DiscreteChannel::bec(0.5).unwrap();
        let x = BitVector::zeros(100_000);
        let erased = c
            .transmit(&x, &mut rng)
            .iter()
            .filter(|&&s| s == ERASURE)
            .count();
        let frac = erased as f64 / 1e5;
        assert!((frac - 0.5).abs() < 0.01, "fraction {frac}");
    }
}
