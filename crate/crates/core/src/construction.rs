//! Code construction: per-index reliability profiles and the choice of the
//! information, noisy and frozen index sets.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::DiscreteChannel;
use crate::error::{invalid, Error, Result};
use crate::gf2::{log2_exact, BitVector};
use crate::polar::SuccessiveCanceller;
use crate::rng::StreamKey;

/// Default `ε` back-off from the channel capacities.
pub const DEFAULT_EPSILON: f64 = 0.01;
/// Default polarization exponent used for reporting `2^{-n^β}`.
pub const DEFAULT_BETA: f64 = 0.45;
/// Monte Carlo profiles with fewer trials than this carry a warning.
pub const MIN_RECOMMENDED_TRIALS: u64 = 1_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileMethod {
    /// Exact Bhattacharyya parameters from the erasure recursion.
    BecExact,
    /// Genie-aided error frequencies of the split-channel decisions.
    MonteCarlo,
}

/// Per-index reliability of the split channels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityProfile {
    pub n: usize,
    pub method: ProfileMethod,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default)]
    pub low_trial_warning: bool,
    pub z: Vec<f64>,
}

impl ReliabilityProfile {
    /// Estimated capacity implied by the profile. Exact for erasure channels;
    /// for Monte Carlo profiles each index counts as `1 - 2·(error rate)`.
    pub fn capacity_proxy(&self) -> f64 {
        let mean = self.z.iter().sum::<f64>() / self.n as f64;
        match self.method {
            ProfileMethod::BecExact => 1.0 - mean,
            ProfileMethod::MonteCarlo => 1.0 - 2.0 * mean,
        }
    }

    pub fn is_noiseless(&self) -> bool {
        self.z.iter().all(|&z| z == 0.0)
    }

    pub fn fraction_below(&self, t: f64) -> f64 {
        self.z.iter().filter(|&&z| z < t).count() as f64 / self.n as f64
    }

    pub fn fraction_above(&self, t: f64) -> f64 {
        self.z.iter().filter(|&&z| z > t).count() as f64 / self.n as f64
    }

    /// Indices sorted from most to least reliable; ties go to the lower index.
    pub fn ranking(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.n).collect();
        idx.sort_by(|&a, &b| self.z[a].total_cmp(&self.z[b]).then(a.cmp(&b)));
        idx
    }

    pub fn sum_over(&self, idx: &[usize]) -> f64 {
        idx.iter().map(|&i| self.z[i]).sum()
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        let p: Self = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        if p.z.len() != p.n || p.z.iter().any(|z| !(0.0..=1.0).contains(z)) {
            return Err(Error::Config("profile must list n values in [0, 1]".into()));
        }
        Ok(p)
    }
}

/// Exact Bhattacharyya parameters of all split channels of `BEC(δ)`.
///
/// Index `l` at size `k` feeds indices `2l-1` and `2l` at size `2k` with
/// `2Z - Z²` and `Z²`.
pub fn bec_z_profile(delta: f64, n: usize) -> Result<ReliabilityProfile> {
    log2_exact(n)?;
    if !(0.0..=1.0).contains(&delta) {
        return invalid(format!("erasure probability {delta} outside [0, 1]"));
    }
    let mut z = Vec::with_capacity(n);
    z.push(delta);
    let mut next = Vec::with_capacity(n);
    while z.len() < n {
        next.clear();
        for &v in &z {
            next.push(2.0 * v - v * v);
            next.push(v * v);
        }
        std::mem::swap(&mut z, &mut next);
    }
    Ok(ReliabilityProfile {
        n,
        method: ProfileMethod::BecExact,
        trials: None,
        low_trial_warning: false,
        z,
    })
}

/// Monte Carlo reliability estimate for an arbitrary symmetric channel.
///
/// Each trial sends the all-zero word, runs the genie-aided canceller
/// (previous bits fixed to their true value) and scores each index by its
/// decision: a wrong decision counts 1, a tie counts ½ (the expected error
/// of a fair coin). Trials draw from `stream.trial_rng(t)`, so the result
/// does not depend on the thread count.
pub fn mc_z_estimate(
    c: &DiscreteChannel,
    n: usize,
    trials: u64,
    stream: StreamKey,
) -> Result<ReliabilityProfile> {
    log2_exact(n)?;
    if !c.is_symmetric() {
        return Err(Error::Asymmetric(
            "Monte Carlo construction assumes a symmetric channel".into(),
        ));
    }
    if trials == 0 {
        return invalid("Monte Carlo construction needs at least one trial");
    }
    let zero = BitVector::zeros(n);
    let half_errors = (0..trials)
        .into_par_iter()
        .fold(
            || vec![0u64; n],
            |mut acc, t| {
                let mut rng = stream.trial_rng(t);
                let y = c.transmit(&zero, &mut rng);
                let mut sc = SuccessiveCanceller::from_outputs(c, &y).expect("valid outputs");
                for slot in acc.iter_mut() {
                    let b = sc.next_belief();
                    if b.is_tie() {
                        *slot += 1;
                    } else if b.decision() == 1 {
                        *slot += 2;
                    }
                    sc.commit(0);
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; n],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let z = half_errors
        .iter()
        .map(|&h| h as f64 / (2 * trials) as f64)
        .collect();
    Ok(ReliabilityProfile {
        n,
        method: ProfileMethod::MonteCarlo,
        trials: Some(trials),
        low_trial_warning: trials < MIN_RECOMMENDED_TRIALS,
        z,
    })
}

/// Exact profile for erasure channels, Monte Carlo otherwise.
pub fn profile_for(
    c: &DiscreteChannel,
    n: usize,
    trials: u64,
    stream: StreamKey,
) -> Result<ReliabilityProfile> {
    match c.as_bec() {
        Some(delta) => bec_z_profile(delta, n),
        None if c.is_noiseless() => {
            log2_exact(n)?;
            Ok(ReliabilityProfile {
                n,
                method: ProfileMethod::BecExact,
                trials: None,
                low_trial_warning: false,
                z: vec![0.0; n],
            })
        }
        None => mc_z_estimate(c, n, trials, stream),
    }
}

/// Role of one position of the polar input vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexRole {
    /// Carries a confidential message bit.
    Info,
    /// Carries a fresh uniformly random bit.
    Noisy,
    /// Fixed, publicly known bit.
    Frozen,
}

/// A wiretap coset code: the partition of `[n]` into information set `A`,
/// noisy set `N` and frozen set `B`, plus the frozen values `b`.
#[derive(Clone, Debug, PartialEq)]
pub struct WiretapCodeSpec {
    n: usize,
    info: Vec<usize>,
    noisy: Vec<usize>,
    frozen: Vec<usize>,
    frozen_bits: BitVector,
    roles: Vec<IndexRole>,
    pub beta: f64,
    pub epsilon: f64,
}

fn normalized_set(name: &str, set: &[usize], n: usize) -> Result<Vec<usize>> {
    let mut s = set.to_vec();
    s.sort_unstable();
    if s.windows(2).any(|w| w[0] == w[1]) {
        return invalid(format!("{name} set has repeated indices"));
    }
    if let Some(&i) = s.last().filter(|&&i| i >= n) {
        return invalid(format!("{name} index {i} out of range for n = {n}"));
    }
    Ok(s)
}

impl WiretapCodeSpec {
    /// Builds a spec from `A` and `N` (0-based); `B` is the complement.
    /// `frozen_bits` defaults to all-zero when `None`.
    pub fn new(
        n: usize,
        info: &[usize],
        noisy: &[usize],
        frozen_bits: Option<BitVector>,
    ) -> Result<Self> {
        log2_exact(n)?;
        let info = normalized_set("information", info, n)?;
        let noisy = normalized_set("noisy", noisy, n)?;
        let mut roles = vec![IndexRole::Frozen; n];
        for &i in &info {
            roles[i] = IndexRole::Info;
        }
        for &i in &noisy {
            if roles[i] == IndexRole::Info {
                return invalid(format!(
                    "index {i} is in both the information and noisy sets"
                ));
            }
            roles[i] = IndexRole::Noisy;
        }
        let frozen: Vec<usize> = (0..n).filter(|&i| roles[i] == IndexRole::Frozen).collect();
        let frozen_bits = frozen_bits.unwrap_or_else(|| BitVector::zeros(frozen.len()));
        if frozen_bits.len() != frozen.len() {
            return invalid(format!(
                "frozen vector has length {} but the frozen set has {} indices",
                frozen_bits.len(),
                frozen.len()
            ));
        }
        Ok(Self {
            n,
            info,
            noisy,
            frozen,
            frozen_bits,
            roles,
            beta: DEFAULT_BETA,
            epsilon: DEFAULT_EPSILON,
        })
    }

    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 0.5) {
            return invalid(format!("beta = {beta} must lie in (0, 0.5)"));
        }
        self.beta = beta;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn info_set(&self) -> &[usize] {
        &self.info
    }

    pub fn noisy_set(&self) -> &[usize] {
        &self.noisy
    }

    pub fn frozen_set(&self) -> &[usize] {
        &self.frozen
    }

    pub fn frozen_bits(&self) -> &BitVector {
        &self.frozen_bits
    }

    pub fn roles(&self) -> &[IndexRole] {
        &self.roles
    }

    /// `A ∪ N`, sorted.
    pub fn decoded_set(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&i| self.roles[i] != IndexRole::Frozen)
            .collect()
    }

    /// Checks that `A`, `N`, `B` are disjoint and cover `[n]`.
    pub fn validate_partition(&self) -> Result<()> {
        let mut seen = vec![0u8; self.n];
        for &i in self.info.iter().chain(&self.noisy).chain(&self.frozen) {
            if i >= self.n {
                return invalid(format!("index {i} out of range"));
            }
            seen[i] += 1;
        }
        match seen.iter().position(|&c| c != 1) {
            Some(i) => invalid(format!(
                "index {i} appears {} times across A, N, B",
                seen[i]
            )),
            None => Ok(()),
        }
    }

    /// Assembles the polar input `w` from message bits `u` and noisy bits.
    pub fn assemble(&self, u: &BitVector, noise: &BitVector) -> Result<BitVector> {
        if u.len() != self.info.len() {
            return invalid(format!(
                "message has {} bits, information set has {}",
                u.len(),
                self.info.len()
            ));
        }
        if noise.len() != self.noisy.len() {
            return invalid(format!(
                "noisy vector has {} bits, noisy set has {}",
                noise.len(),
                self.noisy.len()
            ));
        }
        let mut w = BitVector::zeros(self.n);
        for (k, &i) in self.info.iter().enumerate() {
            w.set(i, u.get(k));
        }
        for (k, &i) in self.noisy.iter().enumerate() {
            w.set(i, noise.get(k));
        }
        for (k, &i) in self.frozen.iter().enumerate() {
            w.set(i, self.frozen_bits.get(k));
        }
        Ok(w)
    }

    /// The target `2^{-n^β}` for the Bhattacharyya parameters of selected indices.
    pub fn bhattacharyya_target(&self) -> f64 {
        2f64.powf(-(self.n as f64).powf(self.beta))
    }

    pub fn to_file(&self) -> SpecFile {
        let one_based = |s: &[usize]| s.iter().map(|&i| i + 1).collect();
        SpecFile {
            n: self.n,
            beta: self.beta,
            epsilon: self.epsilon,
            info_set: one_based(&self.info),
            noisy_set: one_based(&self.noisy),
            frozen_set: one_based(&self.frozen),
            frozen_bits: self.frozen_bits.to_string(),
        }
    }

    pub fn from_file(f: &SpecFile) -> Result<Self> {
        let zero_based = |name: &str, s: &[usize]| -> Result<Vec<usize>> {
            s.iter()
                .map(|&i| match i {
                    0 => invalid(format!("{name} uses 1-based indices; found 0")),
                    i => Ok(i - 1),
                })
                .collect()
        };
        let info = zero_based("info_set", &f.info_set)?;
        let noisy = zero_based("noisy_set", &f.noisy_set)?;
        let frozen = zero_based("frozen_set", &f.frozen_set)?;
        let mut spec = Self::new(f.n, &info, &noisy, Some(BitVector::parse(&f.frozen_bits)?))?
            .with_beta(f.beta)?;
        spec.epsilon = f.epsilon;
        let mut listed = frozen;
        listed.sort_unstable();
        if listed != spec.frozen {
            return invalid("frozen_set is not the complement of info_set and noisy_set");
        }
        spec.validate_partition()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(&self.to_file()).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_toml(s: &str) -> Result<Self> {
        let f: SpecFile = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        Self::from_file(&f)
    }
}

/// On-disk form of a [`WiretapCodeSpec`]. Index lists are 1-based and sorted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecFile {
    pub n: usize,
    pub beta: f64,
    pub epsilon: f64,
    pub info_set: Vec<usize>,
    pub noisy_set: Vec<usize>,
    pub frozen_set: Vec<usize>,
    /// Frozen values in frozen-set order, as a 0/1 string.
    pub frozen_bits: String,
}

/// How the information set is filled once `N` is fixed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InformationSetRule {
    /// `|A| = ⌊nr⌋ - ⌊nr*⌋`, taken from the `⌊nr⌋` best legitimate indices.
    RateLimited,
    /// `A = [n] \ N`, so `B` is empty. Meant for a noiseless legitimate channel.
    Complement,
    /// `Complement` when the legitimate profile is noiseless, otherwise `RateLimited`.
    #[default]
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelectionParams {
    pub r: f64,
    pub r_star: f64,
    pub rule: InformationSetRule,
    pub beta: f64,
    pub epsilon: f64,
    /// Known capacities used for the feasibility checks in place of the
    /// profiles' own estimates (Monte Carlo proxies understate capacity).
    pub legit_capacity: Option<f64>,
    pub eve_capacity: Option<f64>,
}

impl SelectionParams {
    pub fn new(r: f64, r_star: f64) -> Self {
        Self {
            r,
            r_star,
            rule: InformationSetRule::Auto,
            beta: DEFAULT_BETA,
            epsilon: DEFAULT_EPSILON,
            legit_capacity: None,
            eve_capacity: None,
        }
    }

    /// `r = C(legit) - ε`, `r* = C(eve) - ε`, both clamped at 0.
    pub fn from_capacities(legit_cap: f64, eve_cap: f64, epsilon: f64) -> Self {
        Self {
            epsilon,
            legit_capacity: Some(legit_cap),
            eve_capacity: Some(eve_cap),
            ..Self::new((legit_cap - epsilon).max(0.0), (eve_cap - epsilon).max(0.0))
        }
    }
}

fn floor_rate(n: usize, rate: f64) -> usize {
    // Guard against 0.3 * 10 = 2.9999999999999996.
    (n as f64 * rate + 1e-9).floor() as usize
}

/// Selects `N` (best indices for the eavesdropper) and `A` (best remaining
/// indices for the legitimate user) with the default parameters.
pub fn select_wiretap_sets(
    legit: &ReliabilityProfile,
    eve: &ReliabilityProfile,
    r: f64,
    r_star: f64,
) -> Result<WiretapCodeSpec> {
    select_wiretap_sets_with(legit, eve, &SelectionParams::new(r, r_star))
}

pub fn select_wiretap_sets_with(
    legit: &ReliabilityProfile,
    eve: &ReliabilityProfile,
    p: &SelectionParams,
) -> Result<WiretapCodeSpec> {
    let n = legit.n;
    if eve.n != n {
        return invalid(format!("profiles have blocklengths {} and {}", n, eve.n));
    }
    if !(0.0..=1.0).contains(&p.r_star) || !(0.0..=1.0).contains(&p.r) || p.r_star > p.r {
        return invalid(format!(
            "rates must satisfy 0 <= r* <= r <= 1 (r = {}, r* = {})",
            p.r, p.r_star
        ));
    }
    let legit_cap = p.legit_capacity.unwrap_or_else(|| legit.capacity_proxy());
    if p.r > legit_cap + 1e-12 {
        let needed = floor_rate(n, p.r);
        let available = floor_rate(n, legit_cap);
        return Err(Error::Infeasible {
            reason: format!(
                "rate {} exceeds the legitimate capacity estimate {legit_cap:.6}",
                p.r
            ),
            needed,
            available,
            deficit: needed.saturating_sub(available),
        });
    }
    let eve_cap = p.eve_capacity.unwrap_or_else(|| eve.capacity_proxy());
    if p.r_star > eve_cap + 1e-12 {
        let needed = floor_rate(n, p.r_star);
        let available = floor_rate(n, eve_cap);
        return Err(Error::Infeasible {
            reason: format!(
                "randomization rate {} exceeds the eavesdropper capacity estimate {eve_cap:.6}",
                p.r_star
            ),
            needed,
            available,
            deficit: needed.saturating_sub(available),
        });
    }

    let k_star = floor_rate(n, p.r_star);
    let noisy: Vec<usize> = eve.ranking().into_iter().take(k_star).collect();
    let mut in_noisy = vec![false; n];
    for &i in &noisy {
        in_noisy[i] = true;
    }

    let complement = match p.rule {
        InformationSetRule::Complement => true,
        InformationSetRule::RateLimited => false,
        InformationSetRule::Auto => legit.is_noiseless(),
    };
    let info: Vec<usize> = if complement {
        (0..n).filter(|&i| !in_noisy[i]).collect()
    } else {
        let k_total = floor_rate(n, p.r);
        let need = k_total - k_star;
        let pool: Vec<usize> = legit
            .ranking()
            .into_iter()
            .take(k_total)
            .filter(|&i| !in_noisy[i])
            .collect();
        // |N| = k_star, so this only trips if the rate checks above change.
        if pool.len() < need {
            return Err(Error::Infeasible {
                reason: "too few legitimate-good indices outside the noisy set".into(),
                needed: need,
                available: pool.len(),
                deficit: need - pool.len(),
            });
        }
        pool.into_iter().take(need).collect()
    };

    let mut spec = WiretapCodeSpec::new(n, &info, &noisy, None)?.with_beta(p.beta)?;
    spec.epsilon = p.epsilon;
    spec.validate_partition()?;
    Ok(spec)
}

/// How a rate-equivocation pair `(R, Re)` is carried by the coset code.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateAllocation {
    /// Secret rate, carried on the information set.
    pub secret_fraction: f64,
    /// Extra non-secret rate `R - Re`.
    pub nonsecret_fraction: f64,
    /// Part of the non-secret rate placed on the noisy set in place of random bits.
    pub nonsecret_on_noisy: f64,
    /// Part of the non-secret rate placed on additional legitimate-good indices.
    pub nonsecret_on_info: f64,
    /// Noisy-set rate still filled with fresh random bits.
    pub random_fraction: f64,
}

impl RateAllocation {
    pub fn total(&self) -> f64 {
        self.secret_fraction + self.nonsecret_fraction + self.random_fraction
    }
}

/// Splits `(R, Re)` into secret, non-secret and random-fill rates.
pub fn allocate_rate_equivocation(
    rate: f64,
    equivocation: f64,
    legit_cap: f64,
    eve_cap: f64,
) -> Result<RateAllocation> {
    const TOL: f64 = 1e-12;
    let secrecy_cap = legit_cap - eve_cap;
    if equivocation < -TOL {
        return Err(Error::RegionViolation(format!(
            "Re = {equivocation} is negative"
        )));
    }
    if equivocation > rate + TOL {
        return Err(Error::RegionViolation(format!(
            "Re = {equivocation} exceeds R = {rate}"
        )));
    }
    if rate > legit_cap + TOL {
        return Err(Error::RegionViolation(format!(
            "R = {rate} exceeds the legitimate capacity {legit_cap}"
        )));
    }
    if equivocation > secrecy_cap + TOL {
        return Err(Error::RegionViolation(format!(
            "Re = {equivocation} exceeds the secrecy capacity {secrecy_cap}"
        )));
    }
    let secret = equivocation.max(0.0);
    let nonsecret = (rate - secret).max(0.0);
    let on_noisy = nonsecret.min(eve_cap.max(0.0));
    Ok(RateAllocation {
        secret_fraction: secret,
        nonsecret_fraction: nonsecret,
        nonsecret_on_noisy: on_noisy,
        nonsecret_on_info: nonsecret - on_noisy,
        random_fraction: eve_cap.max(0.0) - on_noisy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn bec_profile_examples() {
        assert_eq!(bec_z_profile(0.3, 1).unwrap().z, vec![0.3]);
        assert!(close(&bec_z_profile(0.5, 2).unwrap().z, &[0.75, 0.25]));
        assert!(close(
            &bec_z_profile(0.5, 4).unwrap().z,
            &[0.9375, 0.5625, 0.4375, 0.0625]
        ));
        assert!(bec_z_profile(0.5, 3).is_err());
    }

    #[test]
    fn bec_profile_capacity_proxy_is_exact() {
        let p = bec_z_profile(0.3, 1024).unwrap();
        assert!((p.capacity_proxy() - 0.7).abs() < 1e-12);
    }

    fn noiseless(n: usize) -> ReliabilityProfile {
        ReliabilityProfile {
            n,
            method: ProfileMethod::BecExact,
            trials: None,
            low_trial_warning: false,
            z: vec![0.0; n],
        }
    }

    #[test]
    fn selection_noiseless_legit_uses_complement() {
        let eve = bec_z_profile(0.5, 4).unwrap();
        let spec = select_wiretap_sets(&noiseless(4), &eve, 0.99, 0.49).unwrap();
        assert_eq!(spec.noisy_set(), &[3]);
        assert_eq!(spec.info_set(), &[0, 1, 2]);
        assert!(spec.frozen_set().is_empty());
    }

    #[test]
    fn selection_without_randomization_is_plain_polar_code() {
        let legit = bec_z_profile(0.3, 16).unwrap();
        let spec = select_wiretap_sets(&legit, &legit, 0.5, 0.0).unwrap();
        assert!(spec.noisy_set().is_empty());
        assert_eq!(spec.info_set().len(), 8);
        let mut best: Vec<usize> = legit.ranking().into_iter().take(8).collect();
        best.sort_unstable();
        assert_eq!(spec.info_set(), best.as_slice());
    }

    #[test]
    fn selection_equal_rates_gives_no_secret_bits() {
        let legit = bec_z_profile(0.2, 16).unwrap();
        let eve = bec_z_profile(0.4, 16).unwrap();
        let spec = select_wiretap_sets(&legit, &eve, 0.5, 0.5).unwrap();
        assert!(spec.info_set().is_empty());
        assert_eq!(spec.noisy_set().len(), 8);
    }

    #[test]
    fn selection_rejects_rates_above_capacity() {
        let legit = bec_z_profile(0.3, 64).unwrap();
        let err = select_wiretap_sets(&legit, &legit, 0.8, 0.0).unwrap_err();
        assert!(matches!(err, Error::Infeasible { .. }), "{err}");
        let eve = bec_z_profile(0.6, 64).unwrap();
        assert!(select_wiretap_sets(&legit, &eve, 0.6, 0.5).is_err());
    }

    #[test]
    fn selection_reports_capacity_deficit() {
        let legit = bec_z_profile(0.3, 64).unwrap();
        match select_wiretap_sets(&legit, &legit, 0.8, 0.0).unwrap_err() {
            // ⌊64·0.8⌋ = 51 wanted, ⌊64·0.7⌋ = 44 available.
            Error::Infeasible {
                needed,
                available,
                deficit,
                ..
            } => {
                assert_eq!((needed, available, deficit), (51, 44, 7));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn selection_handles_non_degraded_profiles() {
        // Eve's best indices are the legitimate user's worst ones.
        let legit = ReliabilityProfile {
            z: vec![0.0, 0.0, 0.5, 0.5],
            ..noiseless(4)
        };
        let eve = ReliabilityProfile {
            z: vec![0.5, 0.5, 0.0, 0.0],
            ..noiseless(4)
        };
        let spec = select_wiretap_sets(&legit, &eve, 0.5, 0.25).unwrap();
        assert_eq!(spec.noisy_set(), &[2]);
        assert_eq!(spec.info_set(), &[0]);
        assert_eq!(spec.frozen_set(), &[1, 3]);
    }

    #[test]
    fn spec_roundtrip_uses_one_based_lists() {
        let spec = WiretapCodeSpec::new(8, &[7, 5], &[6], Some(BitVector::parse("10110").unwrap()))
            .unwrap();
        let text = spec.to_toml().unwrap();
        assert!(text.contains("info_set = [6, 8]"), "{text}");
        assert_eq!(WiretapCodeSpec::from_toml(&text).unwrap(), spec);
        assert!(WiretapCodeSpec::new(4, &[0, 1], &[1], None).is_err());
        assert!(WiretapCodeSpec::new(4, &[0, 4], &[], None).is_err());
    }

    #[test]
    fn allocation_corners() {
        let (legit, eve) = (0.9, 0.5);
        let cs = legit - eve;
        let a = allocate_rate_equivocation(cs, cs, legit, eve).unwrap();
        assert_eq!(a.nonsecret_fraction, 0.0);
        assert!((a.random_fraction - eve).abs() < 1e-15);

        let a = allocate_rate_equivocation(legit, cs, legit, eve).unwrap();
        assert!((a.nonsecret_on_noisy - eve).abs() < 1e-12);
        assert!(a.random_fraction.abs() < 1e-12);
        assert!((a.total() - legit).abs() < 1e-12);

        assert!(matches!(
            allocate_rate_equivocation(0.5, 0.6, legit, eve),
            Err(Error::RegionViolation(_))
        ));
        assert!(allocate_rate_equivocation(0.95, 0.1, legit, eve).is_err());
        assert!(allocate_rate_equivocation(0.6, 0.45, legit, eve).is_err());
    }
}
