//! Experiment configuration and the seeded FER, secrecy and conjecture runs.
//!
//! Every random draw comes from a substream keyed by
//! `(seed, experiment, blocklength, purpose, trial)`, and all Monte Carlo
//! tallies are integers, so reports do not depend on the worker count.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{compose_degraded, make_channel, ChannelSpec, DiscreteChannel, KernelSpec};
use crate::codec::{informed_sc_decode, sc_decode, wiretap_encode};
use crate::construction::{
    profile_for, select_wiretap_sets_with, InformationSetRule, ProfileMethod, ReliabilityProfile,
    SelectionParams, WiretapCodeSpec, DEFAULT_BETA, DEFAULT_EPSILON,
};
use crate::error::{Error, Result};
use crate::gf2::{log2_exact, BitVector};
use crate::polar::ORACLE_MAX_N;
use crate::rng::{label_id, StreamKey};
use crate::secrecy::{
    bec_equivocation_mc, conjecture_scan, exact_equivocation, fano_equivocation_bound,
    mutual_info_profile, ConjectureReport, MI_ORACLE_MAX_N,
};

/// Header of the FER and secrecy CSV reports.
pub const CSV_HEADER: &str =
    "n,rate,r_star,fer,fer_informed,equiv_bits,equiv_rate,fano_bound,cs_target,trials,exact_flag";
/// Header of the conjecture-scan CSV report.
pub const CONJECTURE_CSV_HEADER: &str = "n,choice,index,role,i_value,j_value,class";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Fer,
    Secrecy,
    Conjecture,
}

impl ExperimentKind {
    pub fn label(self) -> &'static str {
        match self {
            Self::Fer => "fer",
            Self::Secrecy => "secrecy",
            Self::Conjecture => "conjecture",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EquivocationMode {
    /// Rank-based when the setup allows it, exhaustive when `n` is small enough.
    #[default]
    Auto,
    Rank,
    Exact,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SecrecyOptions {
    #[serde(default)]
    pub mode: EquivocationMode,
    /// In exact mode, also compute `H(U|Z)` with the noisy bits fixed to zero.
    #[serde(default)]
    pub fixed_b_star_check: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConjectureOptions {
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// `A'` as 1-based indices; defaults to the whole good set.
    #[serde(default)]
    pub a_prime: Option<Vec<usize>>,
    /// Choices of `S` as 1-based index lists; defaults to every singleton
    /// outside the good set.
    #[serde(default)]
    pub s_sets: Option<Vec<Vec<usize>>>,
}

impl Default for ConjectureOptions {
    fn default() -> Self {
        Self {
            delta: default_delta(),
            a_prime: None,
            s_sets: None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputOptions {
    #[serde(default)]
    pub dir: Option<String>,
    #[serde(default)]
    pub csv: Option<String>,
    #[serde(default)]
    pub json: Option<String>,
}

/// Inputs for the single-shot `encode` and `decode` commands.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodecOptions {
    /// Path of a code spec written by `construct`.
    #[serde(default)]
    pub code: Option<String>,
    #[serde(default)]
    pub message: Option<String>,
    #[serde(default)]
    pub b_star: Option<String>,
    /// Received symbols, comma or space separated.
    #[serde(default)]
    pub received: Option<String>,
}

fn default_seed() -> u64 {
    1
}
fn default_trials() -> u64 {
    10_000
}
fn default_construction_trials() -> u64 {
    20_000
}
fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}
fn default_beta() -> f64 {
    DEFAULT_BETA
}
fn default_delta() -> f64 {
    0.3
}
fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub experiment: Option<ExperimentKind>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Worker threads; 0 uses all cores.
    #[serde(default)]
    pub workers: usize,
    #[serde(default)]
    pub n: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    /// Trials per Monte Carlo reliability profile (non-erasure channels).
    #[serde(default = "default_construction_trials")]
    pub construction_trials: u64,
    /// Total rate on `A ∪ N`; defaults to `C(legit) - ε`.
    #[serde(default)]
    pub r: Option<f64>,
    /// Rate on `N`; defaults to `C(eve) - ε`, or 0 without an eavesdropper.
    #[serde(default)]
    pub r_star: Option<f64>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default)]
    pub rule: InformationSetRule,
    /// Draw uniform messages; with `false` the all-zero message is sent.
    #[serde(default = "default_true")]
    pub random_message: bool,
    #[serde(default)]
    pub legit: Option<ChannelSpec>,
    #[serde(default)]
    pub eve: Option<ChannelSpec>,
    /// Degradation kernel applied to the legitimate output to form the eavesdropper.
    #[serde(default)]
    pub kernel: Option<KernelSpec>,
    /// Channel model assumed by the decoder when it differs from `legit`.
    #[serde(default)]
    pub decoder_channel: Option<ChannelSpec>,
    #[serde(default)]
    pub secrecy: SecrecyOptions,
    #[serde(default)]
    pub conjecture: ConjectureOptions,
    #[serde(default)]
    pub output: OutputOptions,
    #[serde(default)]
    pub codec: CodecOptions,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        toml::from_str("").expect("every field has a default")
    }
}

/// Channels resolved from a validated configuration.
#[derive(Clone, Debug)]
pub struct ResolvedChannels {
    pub legit: DiscreteChannel,
    pub eve: Option<DiscreteChannel>,
    pub decoder: DiscreteChannel,
    pub legit_capacity: f64,
    pub eve_capacity: Option<f64>,
}

impl ResolvedChannels {
    pub fn secrecy_capacity(&self) -> Option<f64> {
        self.eve_capacity
            .map(|e| (self.legit_capacity - e).max(0.0))
    }
}

fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

impl ExperimentConfig {
    pub fn from_toml(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Builds the channel models and checks they are usable.
    pub fn channels(&self) -> Result<ResolvedChannels> {
        let Some(legit_spec) = &self.legit else {
            return config_err("missing [legit] channel");
        };
        let legit = make_channel(legit_spec)?;
        let eve = match (&self.eve, &self.kernel) {
            (Some(_), Some(_)) => return config_err("give either [eve] or [kernel], not both"),
            (Some(spec), None) => Some(make_channel(spec)?),
            (None, Some(k)) => {
                let pair = compose_degraded(&legit, &k.build()?)?;
                if !pair.eve.is_symmetric() {
                    return Err(Error::Asymmetric("composed eavesdropper channel".into()));
                }
                Some(pair.eve)
            }
            (None, None) => None,
        };
        let decoder = match &self.decoder_channel {
            Some(spec) => make_channel(spec)?,
            None => legit.clone(),
        };
        if decoder.outputs() != legit.outputs() {
            return config_err("decoder channel must share the legitimate output alphabet");
        }
        let legit_capacity = legit.capacity()?;
        let eve_capacity = eve.as_ref().map(DiscreteChannel::capacity).transpose()?;
        Ok(ResolvedChannels {
            legit,
            eve,
            decoder,
            legit_capacity,
            eve_capacity,
        })
    }

    /// Checks every parameter against the requirements of `kind` before anything runs.
    pub fn validate(&self, kind: ExperimentKind) -> Result<ResolvedChannels> {
        let ch = self.channels()?;
        if self.n.is_empty() {
            return config_err("n must list at least one blocklength");
        }
        for &n in &self.n {
            log2_exact(n)
                .map_err(|_| Error::Config(format!("blocklength {n} is not a power of two")))?;
        }
        if self.trials == 0 || self.construction_trials == 0 {
            return config_err("trial counts must be positive");
        }
        if !(self.epsilon >= 0.0 && self.epsilon < 1.0) {
            return config_err(format!("epsilon = {} must lie in [0, 1)", self.epsilon));
        }
        if !(self.beta > 0.0 && self.beta < 0.5) {
            return config_err(format!("beta = {} must lie in (0, 0.5)", self.beta));
        }
        for (name, v) in [("r", self.r), ("r_star", self.r_star)] {
            if let Some(v) = v.filter(|v| !(0.0..=1.0).contains(v)) {
                return config_err(format!("{name} = {v} outside [0, 1]"));
            }
        }
        if let (Some(r), Some(rs)) = (self.r, self.r_star) {
            if rs > r {
                return config_err(format!("r_star = {rs} exceeds r = {r}"));
            }
        }
        match kind {
            ExperimentKind::Fer => {}
            ExperimentKind::Secrecy => {
                let Some(eve) = &ch.eve else {
                    return config_err("secrecy runs need [eve] or [kernel]");
                };
                match self.secrecy.mode {
                    EquivocationMode::Rank if eve.as_bec().is_none() || !ch.legit.is_noiseless() => {
                        return config_err("rank mode needs an erasure eavesdropper and a noiseless legitimate channel")
                    }
                    EquivocationMode::Exact if self.n.iter().any(|&n| n > ORACLE_MAX_N) => {
                        return config_err(format!("exact mode supports n <= {ORACLE_MAX_N}"))
                    }
                    _ => {}
                }
            }
            ExperimentKind::Conjecture => {
                if let Some(&n) = self.n.iter().find(|&&n| n > MI_ORACLE_MAX_N) {
                    return config_err(format!(
                        "conjecture scans support n <= {MI_ORACLE_MAX_N}, got {n}"
                    ));
                }
                let d = self.conjecture.delta;
                if !(0.0..0.5).contains(&d) {
                    return config_err(format!("delta = {d} must lie in [0, 0.5)"));
                }
                let max_n = *self.n.iter().max().expect("n is non-empty");
                let lists = self
                    .conjecture
                    .a_prime
                    .iter()
                    .chain(self.conjecture.s_sets.iter().flatten());
                for list in lists {
                    if let Some(&i) = list.iter().find(|&&i| i == 0 || i > max_n) {
                        return config_err(format!(
                            "conjecture index {i} is not a 1-based index up to {max_n}"
                        ));
                    }
                }
            }
        }
        Ok(ch)
    }

    fn selection(&self, ch: &ResolvedChannels) -> SelectionParams {
        let eps = self.epsilon;
        let r = self.r.unwrap_or((ch.legit_capacity - eps).max(0.0));
        let r_star = self.r_star.unwrap_or(match ch.eve_capacity {
            Some(c) => (c - eps).max(0.0).min(r),
            None => 0.0,
        });
        SelectionParams {
            r,
            r_star,
            rule: self.rule,
            beta: self.beta,
            epsilon: eps,
            legit_capacity: Some(ch.legit_capacity),
            eve_capacity: ch.eve_capacity,
        }
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
    }
}

/// A constructed code with the profiles it came from.
#[derive(Clone, Debug)]
pub struct ConstructedCode {
    pub spec: WiretapCodeSpec,
    pub legit_profile: ReliabilityProfile,
    pub eve_profile: ReliabilityProfile,
    pub params: SelectionParams,
}

impl ConstructedCode {
    /// `Σ Z` over `A ∪ N` from the legitimate profile.
    pub fn union_bound(&self) -> f64 {
        self.legit_profile.sum_over(&self.spec.decoded_set())
    }
}

/// Builds the code for blocklength `n` as configured.
pub fn construct_code(
    cfg: &ExperimentConfig,
    ch: &ResolvedChannels,
    n: usize,
    stream: StreamKey,
) -> Result<ConstructedCode> {
    let legit_profile = profile_for(&ch.legit, n, cfg.construction_trials, stream.child(1))?;
    let eve_profile = match &ch.eve {
        Some(eve) => profile_for(eve, n, cfg.construction_trials, stream.child(2))?,
        None => legit_profile.clone(),
    };
    let params = cfg.selection(ch);
    let spec = select_wiretap_sets_with(&legit_profile, &eve_profile, &params)?;
    Ok(ConstructedCode {
        spec,
        legit_profile,
        eve_profile,
        params,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PointResult {
    pub n: usize,
    pub skipped: Option<String>,
    pub info_size: usize,
    pub noisy_size: usize,
    pub frozen_size: usize,
    /// `|A ∪ N| / n`.
    pub rate: f64,
    /// `|N| / n`.
    pub r_star: f64,
    pub trials: u64,
    pub profile_method: Option<ProfileMethod>,
    pub low_trial_warning: bool,
    pub model_mismatch: bool,
    pub union_bound: Option<f64>,
    pub frame_errors: Option<u64>,
    pub fer: Option<f64>,
    pub informed_errors: Option<u64>,
    pub fer_informed: Option<f64>,
    pub equivocation_mode: Option<EquivocationMode>,
    pub equiv_bits: Option<f64>,
    pub equiv_std_error: Option<f64>,
    pub equiv_rate: Option<f64>,
    pub equiv_bits_fixed_b_star: Option<f64>,
    pub fano_bound: Option<f64>,
    pub cs_target: Option<f64>,
    pub exact: bool,
}

impl PointResult {
    fn skipped(n: usize, reason: String) -> Self {
        Self {
            n,
            skipped: Some(reason),
            ..Self::default()
        }
    }

    fn with_code(n: usize, code: &ConstructedCode, trials: u64) -> Self {
        let s = &code.spec;
        let nf = n as f64;
        Self {
            n,
            info_size: s.info_set().len(),
            noisy_size: s.noisy_set().len(),
            frozen_size: s.frozen_set().len(),
            rate: s.decoded_set().len() as f64 / nf,
            r_star: s.noisy_set().len() as f64 / nf,
            trials,
            profile_method: Some(code.legit_profile.method),
            low_trial_warning: code.legit_profile.low_trial_warning
                || code.eve_profile.low_trial_warning,
            union_bound: Some(code.union_bound()),
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjectureChoice {
    pub n: usize,
    pub choice: usize,
    pub report: ConjectureReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub experiment: ExperimentKind,
    pub seed: u64,
    pub wall_clock_seconds: f64,
    pub config: ExperimentConfig,
    pub points: Vec<PointResult>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub conjecture: Vec<ConjectureChoice>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub conjecture_skipped: Vec<String>,
}

impl RunReport {
    fn new(kind: ExperimentKind, cfg: &ExperimentConfig) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            experiment: kind,
            seed: cfg.seed,
            wall_clock_seconds: 0.0,
            config: cfg.clone(),
            points: Vec::new(),
            conjecture: Vec::new(),
            conjecture_skipped: Vec::new(),
        }
    }

    pub fn skipped_points(&self) -> usize {
        self.points.iter().filter(|p| p.skipped.is_some()).count() + self.conjecture_skipped.len()
    }

    /// CSV body. Skipped points are listed only in the JSON report.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Config(format!("csv: {e}"));
        let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        if self.experiment == ExperimentKind::Conjecture {
            w.write_record(CONJECTURE_CSV_HEADER.split(','))
                .map_err(csv_err)?;
            for c in &self.conjecture {
                let r = &c.report;
                let classes = r.a_prime.iter().map(|&i| (i, "A'", None)).chain(
                    r.s.iter()
                        .zip(&r.classes)
                        .map(|(&i, class)| (i, "S", Some(*class))),
                );
                for (i, role, class) in classes {
                    w.write_record([
                        c.n.to_string(),
                        c.choice.to_string(),
                        (i + 1).to_string(),
                        role.to_string(),
                        r.i_values[i].to_string(),
                        opt(r.j.get(i)),
                        class.map(|c| c.label().to_string()).unwrap_or_default(),
                    ])
                    .map_err(csv_err)?;
                }
            }
        } else {
            w.write_record(CSV_HEADER.split(',')).map_err(csv_err)?;
            for p in self.points.iter().filter(|p| p.skipped.is_none()) {
                w.write_record([
                    p.n.to_string(),
                    p.rate.to_string(),
                    p.r_star.to_string(),
                    opt(p.fer),
                    opt(p.fer_informed),
                    opt(p.equiv_bits),
                    opt(p.equiv_rate),
                    opt(p.fano_bound),
                    opt(p.cs_target),
                    p.trials.to_string(),
                    p.exact.to_string(),
                ])
                .map_err(csv_err)?;
            }
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Config(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn write(&self, csv_path: &Path, json_path: &Path) -> Result<()> {
        for p in [csv_path, json_path] {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
        }
        std::fs::write(csv_path, self.to_csv()?)?;
        std::fs::write(json_path, self.to_json()?)?;
        Ok(())
    }
}

fn point_stream(cfg: &ExperimentConfig, kind: ExperimentKind, n: usize) -> StreamKey {
    StreamKey::root(cfg.seed)
        .child(label_id(kind.label()))
        .child(n as u64)
}

/// Integer error tallies over `trials` independent substreams.
fn count_errors<F>(trials: u64, stream: StreamKey, trial: F) -> Result<(u64, u64)>
where
    F: Fn(&mut crate::rng::TrialRng) -> Result<(bool, bool)> + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|t| trial(&mut stream.trial_rng(t)).map(|(a, b)| (a as u64, b as u64)))
        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))
}

fn random_message(spec: &WiretapCodeSpec, random: bool, rng: &mut impl rand::Rng) -> BitVector {
    let k = spec.info_set().len();
    if random {
        BitVector::from_bools((0..k).map(|_| rng.gen::<bool>()))
    } else {
        BitVector::zeros(k)
    }
}

/// One transmission over `tx`, decoded with the model `model`: returns
/// (full decode failed, informed decode failed).
fn transmission_trial(
    spec: &WiretapCodeSpec,
    tx: &DiscreteChannel,
    model: &DiscreteChannel,
    random: bool,
    rng: &mut crate::rng::TrialRng,
) -> Result<(bool, bool)> {
    let u = random_message(spec, random, rng);
    let cw = wiretap_encode(spec, &u, rng)?;
    let y = tx.transmit(&cw.x, rng);
    let full = !sc_decode(spec, model, &y)?.matches(&cw);
    let informed = informed_sc_decode(spec, model, &y, &cw.u)? != cw.b_star;
    Ok((full, informed))
}

fn skip_reason(e: &Error) -> Option<String> {
    matches!(
        e,
        Error::Infeasible { .. } | Error::Precondition(_) | Error::OracleTooLarge { .. }
    )
    .then(|| e.to_string())
}

/// Frame error rates of the full and informed decoders on the legitimate channel.
pub fn run_fer_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    let ch = cfg.validate(ExperimentKind::Fer)?;
    let start = Instant::now();
    let mut report = RunReport::new(ExperimentKind::Fer, cfg);
    let points = cfg.pool()?.install(|| {
        cfg.n
            .iter()
            .map(|&n| fer_point(cfg, &ch, n))
            .collect::<Result<Vec<_>>>()
    })?;
    report.points = points;
    report.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

fn fer_point(cfg: &ExperimentConfig, ch: &ResolvedChannels, n: usize) -> Result<PointResult> {
    let stream = point_stream(cfg, ExperimentKind::Fer, n);
    let code = match construct_code(cfg, ch, n, stream.child(0)) {
        Ok(c) => c,
        Err(e) => return skip_reason(&e).map(|r| PointResult::skipped(n, r)).ok_or(e),
    };
    let spec = &code.spec;
    spec.validate_partition()?;
    let (full, informed) = count_errors(cfg.trials, stream.child(3), |rng| {
        transmission_trial(spec, &ch.legit, &ch.decoder, cfg.random_message, rng)
    })?;
    let t = cfg.trials as f64;
    Ok(PointResult {
        model_mismatch: cfg.decoder_channel.is_some() && ch.decoder != ch.legit,
        frame_errors: Some(full),
        fer: Some(full as f64 / t),
        informed_errors: Some(informed),
        fer_informed: Some(informed as f64 / t),
        cs_target: ch.secrecy_capacity(),
        ..PointResult::with_code(n, &code, cfg.trials)
    })
}

/// Equivocation, informed-decoder error on the eavesdropper's output, and
/// the Fano lower bound, per blocklength.
pub fn run_secrecy_experiment(cfg: &ExperimentConfig) -> Result<RunReport> {
    let ch = cfg.validate(ExperimentKind::Secrecy)?;
    let start = Instant::now();
    let mut report = RunReport::new(ExperimentKind::Secrecy, cfg);
    let points = cfg.pool()?.install(|| {
        cfg.n
            .iter()
            .map(|&n| secrecy_point(cfg, &ch, n))
            .collect::<Result<Vec<_>>>()
    })?;
    report.points = points;
    report.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

fn secrecy_point(cfg: &ExperimentConfig, ch: &ResolvedChannels, n: usize) -> Result<PointResult> {
    let eve = ch.eve.as_ref().expect("validated");
    let eve_cap = ch.eve_capacity.expect("validated");
    let stream = point_stream(cfg, ExperimentKind::Secrecy, n);
    let code = match construct_code(cfg, ch, n, stream.child(0)) {
        Ok(c) => c,
        Err(e) => return skip_reason(&e).map(|r| PointResult::skipped(n, r)).ok_or(e),
    };
    let spec = &code.spec;
    spec.validate_partition()?;

    let rank_ok = eve.as_bec().is_some() && ch.legit.is_noiseless() && spec.frozen_set().is_empty();
    let mode = match cfg.secrecy.mode {
        EquivocationMode::Auto if rank_ok => EquivocationMode::Rank,
        EquivocationMode::Auto if n <= ORACLE_MAX_N => EquivocationMode::Exact,
        EquivocationMode::Auto => {
            return Ok(PointResult::skipped(n, "no equivocation method applies: rank mode needs an erasure eavesdropper, a noiseless legitimate channel and an empty frozen set; exact mode needs a small blocklength".into()))
        }
        EquivocationMode::Rank if !rank_ok => {
            return Ok(PointResult::skipped(n, "rank mode needs an empty frozen set".into()))
        }
        m => m,
    };

    let (equiv_bits, equiv_std_error, fixed) = match mode {
        EquivocationMode::Rank => {
            let delta = eve.as_bec().expect("checked");
            let est = bec_equivocation_mc(spec, delta, cfg.trials, stream.child(4))?;
            (est.mean_bits, Some(est.std_error), None)
        }
        _ => {
            let h = exact_equivocation(spec, eve, None)?;
            let fixed = cfg
                .secrecy
                .fixed_b_star_check
                .then(|| {
                    exact_equivocation(spec, eve, Some(&BitVector::zeros(spec.noisy_set().len())))
                })
                .transpose()?;
            (h, None, fixed)
        }
    };

    let (full, _) = count_errors(cfg.trials, stream.child(3), |rng| {
        transmission_trial(spec, &ch.legit, &ch.decoder, cfg.random_message, rng)
    })?;
    let (_, informed) = count_errors(cfg.trials, stream.child(5), |rng| {
        transmission_trial(spec, eve, eve, cfg.random_message, rng)
    })?;
    let t = cfg.trials as f64;
    let pe = informed as f64 / t;
    // The bound's slack term is C(eve) minus the realized noisy-set rate.
    let r_star = spec.noisy_set().len() as f64 / n as f64;
    let fano = fano_equivocation_bound(spec.info_set().len(), n, r_star, eve_cap - r_star, pe)?;
    Ok(PointResult {
        model_mismatch: cfg.decoder_channel.is_some() && ch.decoder != ch.legit,
        frame_errors: Some(full),
        fer: Some(full as f64 / t),
        informed_errors: Some(informed),
        fer_informed: Some(pe),
        equivocation_mode: Some(mode),
        equiv_bits: Some(equiv_bits),
        equiv_std_error,
        equiv_rate: Some(equiv_bits / n as f64),
        equiv_bits_fixed_b_star: fixed,
        fano_bound: Some(fano),
        cs_target: ch.secrecy_capacity(),
        exact: mode == EquivocationMode::Exact,
        ..PointResult::with_code(n, &code, cfg.trials)
    })
}

/// Exhaustive `I_i`/`J_i` tables and classifications for each configured
/// choice of `S`.
pub fn run_conjecture_scan(cfg: &ExperimentConfig) -> Result<RunReport> {
    let ch = cfg.validate(ExperimentKind::Conjecture)?;
    let start = Instant::now();
    let mut report = RunReport::new(ExperimentKind::Conjecture, cfg);
    let opts = &cfg.conjecture;
    cfg.pool()?.install(|| -> Result<()> {
        for &n in &cfg.n {
            let zero_based = |v: &[usize]| -> Vec<usize> { v.iter().map(|&i| i - 1).collect() };
            let i_values = mutual_info_profile(&ch.legit, n)?;
            let good: Vec<usize> = (0..n)
                .filter(|&i| i_values.get(i).unwrap() > 1.0 - opts.delta)
                .collect();
            if let Some(i) = opts
                .a_prime
                .iter()
                .flatten()
                .chain(opts.s_sets.iter().flatten().flatten())
                .find(|&&i| i > n)
            {
                report
                    .conjecture_skipped
                    .push(format!("n = {n}: index {i} out of range"));
                continue;
            }
            let a_prime = opts
                .a_prime
                .as_deref()
                .map(zero_based)
                .unwrap_or_else(|| good.clone());
            let choices: Vec<Vec<usize>> = match &opts.s_sets {
                Some(sets) => sets.iter().map(|s| zero_based(s)).collect(),
                None => (0..n)
                    .filter(|i| !good.contains(i))
                    .map(|i| vec![i])
                    .collect(),
            };
            for (k, s) in choices.iter().enumerate() {
                match conjecture_scan(&ch.legit, n, opts.delta, &a_prime, s) {
                    Ok(r) => report.conjecture.push(ConjectureChoice {
                        n,
                        choice: k + 1,
                        report: r,
                    }),
                    Err(e @ Error::InvalidArgument(_)) => report
                        .conjecture_skipped
                        .push(format!("n = {n}, choice {}: {e}", k + 1)),
                    Err(e) => return Err(e),
                }
            }
        }
        Ok(())
    })?;
    report.wall_clock_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Runs the experiment named by `kind`.
pub fn run(kind: ExperimentKind, cfg: &ExperimentConfig) -> Result<RunReport> {
    match kind {
        ExperimentKind::Fer => run_fer_experiment(cfg),
        ExperimentKind::Secrecy => run_secrecy_experiment(cfg),
        ExperimentKind::Conjecture => run_conjecture_scan(cfg),
    }
}
