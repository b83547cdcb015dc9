//! Seeded experiment drivers: random-state ensembles, the GHZ noise scan, and
//! the random-state sweep, with CSV/JSON writers.
//!
//! Every task draws from a stream keyed by `(master_seed, state_id, t,
//! repetition, purpose)`, and rows are sorted before writing, so the output is
//! byte-identical for any thread count.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::canonical::{canonicalize, threshold_for_level, CanonicalizationPolicy, CostMode};
use crate::entanglement::{concurrence, tangle};
use crate::error::{Error, Result};
use crate::noise::{estimate_tangle, post_select, relative_error, sample_shots, NoiseConfig, ShotHistogram};
use crate::optimizer::OptimizerOptions;
use crate::state::{Complex, PureState3};
use crate::streams::{Purpose, StreamKey};

/// Pre-normalization norm below which a random draw is rejected.
const MIN_DRAW_NORM: f64 = 1e-6;
/// States with smaller exact tangle are left out of relative-error summaries.
pub const SMALL_TANGLE_CUTOFF: f64 = 1e-3;
/// Below this exact tangle the relative error is reported as NaN.
const RELATIVE_ERROR_FLOOR: f64 = 1e-12;
/// Largest noise level covered by the reference error rates.
pub const MAX_REFERENCE_LEVEL: u32 = 5;

fn box_uniform<R: Rng + ?Sized, const N: usize>(rng: &mut R) -> ([Complex; N], f64) {
    loop {
        let mut amps = [Complex::new(0.0, 0.0); N];
        for a in amps.iter_mut() {
            let re = rng.random::<f64>() - 0.5;
            let im = rng.random::<f64>() - 0.5;
            *a = Complex::new(re, im);
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm >= MIN_DRAW_NORM {
            return (amps, norm);
        }
    }
}

/// Amplitudes with real and imaginary parts uniform in `[-0.5, 0.5]`, then
/// normalized.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R) -> PureState3 {
    let (amps, _) = box_uniform::<R, 8>(rng);
    PureState3::from_unnormalized(amps).expect("draw norm is bounded away from zero")
}

/// Two-qubit analogue of [`random_state`], ordered `00, 01, 10, 11`.
pub fn random_two_qubit<R: Rng + ?Sized>(rng: &mut R) -> [Complex; 4] {
    let (amps, norm) = box_uniform::<R, 4>(rng);
    amps.map(|a| a / norm)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PostSelection {
    On,
    Off,
    Both,
}

impl PostSelection {
    /// Row flags emitted per measurement, in output order.
    pub fn modes(self) -> &'static [bool] {
        match self {
            PostSelection::Off => &[false],
            PostSelection::On => &[true],
            PostSelection::Both => &[false, true],
        }
    }
}

impl FromStr for PostSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "on" => Ok(PostSelection::On),
            "off" => Ok(PostSelection::Off),
            "both" => Ok(PostSelection::Both),
            other => Err(Error::InvalidArgument(format!(
                "post-selection must be on, off or both, got {other:?}"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::InvalidArgument(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    pub n_states: usize,
    pub shots: u64,
    pub repetitions: usize,
    pub t_values: Vec<u32>,
    pub post_selection: PostSelection,
    pub cost_mode: CostMode,
    pub max_attempts: usize,
    pub shots_per_cost_eval: u64,
    /// Measure the training cost through the same error model as the estimate.
    pub train_under_noise: bool,
    pub optimizer: OptimizerOptions,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            master_seed: 0,
            n_states: 200,
            shots: 10_000,
            repetitions: 10,
            t_values: (0..=MAX_REFERENCE_LEVEL).collect(),
            post_selection: PostSelection::Both,
            cost_mode: CostMode::Exact,
            max_attempts: 5,
            shots_per_cost_eval: 10_000,
            train_under_noise: true,
            optimizer: OptimizerOptions::default(),
            threads: None,
        }
    }
}

impl ExperimentConfig {
    /// Checks the config; returns warnings for accepted but unusual settings.
    pub fn validate(&self) -> Result<Vec<String>> {
        if self.n_states == 0 || self.shots == 0 || self.repetitions == 0 {
            return Err(Error::InvalidArgument(
                "states, shots and repetitions must all be at least 1".into(),
            ));
        }
        if self.t_values.is_empty() {
            return Err(Error::InvalidArgument("no noise levels given".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidArgument("thread count must be at least 1".into()));
        }
        self.optimizer.validate()?;
        let mut warnings = Vec::new();
        for &t in &self.t_values {
            NoiseConfig::from_level(t)?;
            self.policy(t)?.validate()?;
            if t > MAX_REFERENCE_LEVEL {
                warnings.push(format!(
                    "noise level t={t} is outside the reference range 0..={MAX_REFERENCE_LEVEL}"
                ));
            }
        }
        Ok(warnings)
    }

    /// Canonicalization policy used at noise level `t`.
    pub fn policy(&self, t: u32) -> Result<CanonicalizationPolicy> {
        let noise = NoiseConfig::from_level(t)?;
        Ok(CanonicalizationPolicy {
            cost_threshold: threshold_for_level(t),
            max_attempts: self.max_attempts,
            cost_mode: self.cost_mode,
            shots_per_cost_eval: self.shots_per_cost_eval,
            training_noise: (self.train_under_noise && !noise.is_noiseless()).then_some(noise),
        })
    }

    fn run_in_pool<T: Send>(&self, job: impl FnOnce() -> T + Send) -> Result<T> {
        match self.threads {
            None => Ok(job()),
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
                Ok(pool.install(job))
            }
        }
    }
}

/// One tangle measurement.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub state_id: u64,
    pub t: u32,
    pub repetition: u64,
    pub post_selected: bool,
    pub tau_exact: f64,
    pub tau_estimate: f64,
    pub sigma_tau: f64,
    pub relative_error: f64,
    pub final_cost: f64,
    pub attempts_used: usize,
    pub accepted: bool,
    pub shots_kept: u64,
    pub seed: u64,
}

impl ResultRow {
    pub const HEADER: [&'static str; 13] = [
        "state_id",
        "t",
        "repetition",
        "post_selected",
        "tau_exact",
        "tau_estimate",
        "sigma_tau",
        "relative_error",
        "final_cost",
        "attempts_used",
        "accepted",
        "shots_kept",
        "seed",
    ];

    fn fields(&self) -> Vec<String> {
        vec![
            self.state_id.to_string(),
            self.t.to_string(),
            self.repetition.to_string(),
            self.post_selected.to_string(),
            real(self.tau_exact),
            real(self.tau_estimate),
            real(self.sigma_tau),
            real(self.relative_error),
            real(self.final_cost),
            self.attempts_used.to_string(),
            self.accepted.to_string(),
            self.shots_kept.to_string(),
            self.seed.to_string(),
        ]
    }

    fn sort_key(&self) -> (u64, u32, u64, bool) {
        (self.state_id, self.t, self.repetition, self.post_selected)
    }
}

/// How the GHZ state was brought to canonical form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GhzMethod {
    /// Identity circuit; the state is already canonical.
    Fixed,
    /// Full variational pipeline on the state treated as unknown.
    Optimized,
}

impl fmt::Display for GhzMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GhzMethod::Fixed => "fixed",
            GhzMethod::Optimized => "optimized",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GhzRow {
    pub method: GhzMethod,
    #[serde(flatten)]
    pub row: ResultRow,
}

/// Exact tangle of a random three-qubit draw and concurrence of a random
/// two-qubit draw.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistributionRow {
    pub sample_id: u64,
    pub tangle: f64,
    pub concurrence: f64,
}

/// Mean and central-70% band of the relative error for one group.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub t: u32,
    pub post_selected: bool,
    pub rows: usize,
    /// Rows that entered the statistics.
    pub used: usize,
    /// Rows whose canonicalization missed the cost threshold.
    pub rejected: usize,
    /// Rows left out because the exact tangle is below the cutoff.
    pub excluded_small_tangle: usize,
    /// Rows with no estimate, e.g. every shot discarded.
    pub undefined: usize,
    pub mean_relative_error: f64,
    pub q15_relative_error: f64,
    pub q85_relative_error: f64,
    pub mean_tau_estimate: f64,
}

impl SummaryRow {
    pub const HEADER: [&'static str; 11] = [
        "t",
        "post_selected",
        "rows",
        "used",
        "rejected",
        "excluded_small_tangle",
        "undefined",
        "mean_relative_error",
        "q15_relative_error",
        "q85_relative_error",
        "mean_tau_estimate",
    ];

    fn fields(&self) -> Vec<String> {
        vec![
            self.t.to_string(),
            self.post_selected.to_string(),
            self.rows.to_string(),
            self.used.to_string(),
            self.rejected.to_string(),
            self.excluded_small_tangle.to_string(),
            self.undefined.to_string(),
            real(self.mean_relative_error),
            real(self.q15_relative_error),
            real(self.q85_relative_error),
            real(self.mean_tau_estimate),
        ]
    }
}

/// 17 significant digits; NaN for undefined values.
pub fn real(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// Anything that can be written as a CSV table.
pub trait Tabular {
    fn header() -> Vec<&'static str>;
    fn record(&self) -> Vec<String>;
}

impl Tabular for ResultRow {
    fn header() -> Vec<&'static str> {
        Self::HEADER.to_vec()
    }
    fn record(&self) -> Vec<String> {
        self.fields()
    }
}

impl Tabular for GhzRow {
    fn header() -> Vec<&'static str> {
        let mut h = vec!["method"];
        h.extend(ResultRow::HEADER);
        h
    }
    fn record(&self) -> Vec<String> {
        let mut r = vec![self.method.to_string()];
        r.extend(self.row.fields());
        r
    }
}

impl Tabular for DistributionRow {
    fn header() -> Vec<&'static str> {
        vec!["sample_id", "tangle", "concurrence"]
    }
    fn record(&self) -> Vec<String> {
        vec![self.sample_id.to_string(), real(self.tangle), real(self.concurrence)]
    }
}

impl Tabular for SummaryRow {
    fn header() -> Vec<&'static str> {
        Self::HEADER.to_vec()
    }
    fn record(&self) -> Vec<String> {
        self.fields()
    }
}

/// Writes rows as UTF-8 CSV with LF line endings.
pub fn write_csv<T: Tabular, W: Write>(rows: &[T], out: &mut W) -> Result<()> {
    writeln!(out, "{}", T::header().join(","))?;
    for r in rows {
        writeln!(out, "{}", r.record().join(","))?;
    }
    Ok(())
}

/// Writes rows as a JSON array of objects. NaN becomes `null`.
pub fn write_json<T: Serialize, W: Write>(rows: &[T], out: &mut W) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, rows)?;
    writeln!(out)?;
    Ok(())
}

pub fn write_rows<T: Tabular + Serialize, W: Write>(
    rows: &[T],
    format: OutputFormat,
    out: &mut W,
) -> Result<()> {
    match format {
        OutputFormat::Csv => write_csv(rows, out),
        OutputFormat::Json => write_json(rows, out),
    }
}

/// Exact tangle and concurrence for `config.n_states` random draws.
pub fn run_distribution(config: &ExperimentConfig) -> Result<Vec<DistributionRow>> {
    config.validate()?;
    let key = StreamKey::new(config.master_seed, Purpose::Distribution);
    config.run_in_pool(|| {
        (0..config.n_states as u64)
            .into_par_iter()
            .map(|id| {
                let mut rng = key.state(id).rng();
                let three = random_state(&mut rng);
                let two = random_two_qubit(&mut rng);
                DistributionRow {
                    sample_id: id,
                    tangle: tangle(&three),
                    concurrence: concurrence(&two),
                }
            })
            .collect()
    })
}

/// Noisy measurement of an already-transformed state, one row per
/// post-selection mode.
#[allow(clippy::too_many_arguments)]
fn measure_rows(
    canonical: &PureState3,
    tau_exact: f64,
    noise: &NoiseConfig,
    shots: u64,
    modes: &[bool],
    sampling_key: StreamKey,
    ids: (u64, u32, u64),
    fit: (f64, usize, bool),
) -> Vec<ResultRow> {
    let (state_id, t, repetition) = ids;
    let (final_cost, attempts_used, accepted) = fit;
    let raw = sample_shots(canonical, shots, noise, &mut sampling_key.rng());
    modes
        .iter()
        .map(|&ps| {
            let h: ShotHistogram = if ps { post_select(&raw) } else { raw };
            let (tau_estimate, sigma_tau) = match estimate_tangle(&h) {
                Ok(e) => (e.tau_hat, e.sigma_tau),
                Err(_) => (f64::NAN, f64::NAN),
            };
            let rel = if tau_exact > RELATIVE_ERROR_FLOOR {
                relative_error(tau_estimate, tau_exact).unwrap_or(f64::NAN)
            } else {
                f64::NAN
            };
            ResultRow {
                state_id,
                t,
                repetition,
                post_selected: ps,
                tau_exact,
                tau_estimate,
                sigma_tau,
                relative_error: rel,
                final_cost,
                attempts_used,
                accepted,
                shots_kept: h.shots_kept(),
                seed: sampling_key.seed(),
            }
        })
        .collect()
}

/// GHZ tangle versus noise level, both with the identity circuit and with the
/// full variational pipeline.
pub fn run_ghz(config: &ExperimentConfig) -> Result<Vec<GhzRow>> {
    config.validate()?;
    let ghz = PureState3::ghz();
    let tau_exact = tangle(&ghz);
    let modes = config.post_selection.modes();
    let tasks: Vec<(GhzMethod, u32, u64)> = [GhzMethod::Fixed, GhzMethod::Optimized]
        .into_iter()
        .flat_map(|m| {
            config
                .t_values
                .iter()
                .flat_map(move |&t| (0..config.repetitions as u64).map(move |r| (m, t, r)))
        })
        .collect();

    let mut rows: Vec<GhzRow> = config.run_in_pool(|| {
        tasks
            .par_iter()
            .map(|&(method, t, rep)| -> Result<Vec<GhzRow>> {
                let noise = NoiseConfig::from_level(t)?;
                let base = StreamKey::new(config.master_seed, Purpose::Ghz)
                    .noise_level(u64::from(t))
                    .repetition(rep);
                let (canonical, fit) = match method {
                    GhzMethod::Fixed => (ghz, (0.0, 0, true)),
                    GhzMethod::Optimized => {
                        let policy = config.policy(t)?;
                        let mut rng = StreamKey { purpose: Purpose::Canonicalization, ..base }.rng();
                        let out = canonicalize(&ghz, &policy, &config.optimizer, &mut rng)?;
                        (
                            out.canonical_state,
                            (out.final_cost, out.attempts_used, out.accepted),
                        )
                    }
                };
                // Both methods share the sampling stream, so differences come
                // from the circuit alone.
                let sampling = StreamKey { purpose: Purpose::Sampling, ..base };
                Ok(measure_rows(
                    &canonical,
                    tau_exact,
                    &noise,
                    config.shots,
                    modes,
                    sampling,
                    (0, t, rep),
                    fit,
                )
                .into_iter()
                .map(|row| GhzRow { method, row })
                .collect())
            })
            .collect::<Result<Vec<_>>>()
    })??
    .into_iter()
    .flatten()
    .collect();

    rows.sort_by(|a, b| {
        (a.method, a.row.sort_key())
            .partial_cmp(&(b.method, b.row.sort_key()))
            .expect("keys are totally ordered")
    });
    Ok(rows)
}

/// Random state `state_id` of the sweep ensemble.
pub fn sweep_state(master_seed: u64, state_id: u64) -> PureState3 {
    let mut rng = StreamKey::new(master_seed, Purpose::StatePreparation)
        .state(state_id)
        .rng();
    random_state(&mut rng)
}

/// Canonicalize, measure under noise, and estimate the tangle for every
/// (state, noise level, repetition) of the ensemble.
pub fn run_random_sweep(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let modes = config.post_selection.modes();
    let states: Vec<(PureState3, f64)> = (0..config.n_states as u64)
        .map(|id| {
            let s = sweep_state(config.master_seed, id);
            (s, tangle(&s))
        })
        .collect();
    let tasks: Vec<(u64, u32, u64)> = (0..config.n_states as u64)
        .flat_map(|s| {
            config
                .t_values
                .iter()
                .flat_map(move |&t| (0..config.repetitions as u64).map(move |r| (s, t, r)))
        })
        .collect();

    let mut rows: Vec<ResultRow> = config.run_in_pool(|| {
        tasks
            .par_iter()
            .map(|&(id, t, rep)| -> Result<Vec<ResultRow>> {
                let (state, tau_exact) = states[id as usize];
                let noise = NoiseConfig::from_level(t)?;
                let policy = config.policy(t)?;
                let base = StreamKey::new(config.master_seed, Purpose::Canonicalization)
                    .state(id)
                    .noise_level(u64::from(t))
                    .repetition(rep);
                let out = canonicalize(&state, &policy, &config.optimizer, &mut base.rng())?;
                Ok(measure_rows(
                    &out.canonical_state,
                    tau_exact,
                    &noise,
                    config.shots,
                    modes,
                    StreamKey { purpose: Purpose::Sampling, ..base },
                    (id, t, rep),
                    (out.final_cost, out.attempts_used, out.accepted),
                ))
            })
            .collect::<Result<Vec<_>>>()
    })??
    .into_iter()
    .flatten()
    .collect();

    rows.sort_by_key(ResultRow::sort_key);
    Ok(rows)
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Per `(t, post_selected)` relative-error statistics over accepted rows with
/// exact tangle at or above [`SMALL_TANGLE_CUTOFF`].
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(u32, bool)> = rows.iter().map(|r| (r.t, r.post_selected)).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .map(|(t, ps)| {
            let group: Vec<&ResultRow> =
                rows.iter().filter(|r| r.t == t && r.post_selected == ps).collect();
            let rejected = group.iter().filter(|r| !r.accepted).count();
            let excluded_small_tangle = group
                .iter()
                .filter(|r| r.accepted && r.tau_exact < SMALL_TANGLE_CUTOFF)
                .count();
            let eligible: Vec<&&ResultRow> = group
                .iter()
                .filter(|r| r.accepted && r.tau_exact >= SMALL_TANGLE_CUTOFF)
                .collect();
            let undefined = eligible.iter().filter(|r| !r.relative_error.is_finite()).count();
            let used: Vec<&&&ResultRow> =
                eligible.iter().filter(|r| r.relative_error.is_finite()).collect();
            let mut rel: Vec<f64> = used.iter().map(|r| r.relative_error).collect();
            rel.sort_by(f64::total_cmp);
            let mean = |xs: &[f64]| {
                if xs.is_empty() {
                    f64::NAN
                } else {
                    xs.iter().sum::<f64>() / xs.len() as f64
                }
            };
            let taus: Vec<f64> = used.iter().map(|r| r.tau_estimate).collect();
            SummaryRow {
                t,
                post_selected: ps,
                rows: group.len(),
                used: rel.len(),
                rejected,
                excluded_small_tangle,
                undefined,
                mean_relative_error: mean(&rel),
                q15_relative_error: quantile(&rel, 0.15),
                q85_relative_error: quantile(&rel, 0.85),
                mean_tau_estimate: mean(&taus),
            }
        })
        .collect()
}
