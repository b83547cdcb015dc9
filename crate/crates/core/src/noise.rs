//! Shot-level measurement simulation under independent Pauli and readout
//! errors, post-selection, and tangle estimation from counts.
//!
//! Each shot passes through the error circuit that follows the local
//! unitaries: on every qubit an X, then a Y, then a Z gate may appear, each
//! independently; after the projective measurement every readout bit may flip.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::state::{outcome_probabilities, PureState3, Qubit, SingleQubitUnitary};

/// Outcomes that vanish on an up-to-phases canonical state.
pub const FORBIDDEN_OUTCOMES: [usize; 3] = [0b001, 0b010, 0b011];

/// Per-slot single-qubit error probability per unit of the tuning parameter.
pub const SINGLE_QUBIT_RATE: f64 = 0.001;
/// Per-qubit readout error probability per unit of the tuning parameter.
pub const MEASUREMENT_RATE: f64 = 0.01;

/// Number of independent error slots: X, Y, Z on three qubits plus three readouts.
pub const ERROR_SLOTS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseConfig {
    level: Option<u32>,
    /// Probability of an X, Y and Z gate, in that order, on each qubit.
    p_pauli: [f64; 3],
    p_meas: f64,
}

impl NoiseConfig {
    pub fn noiseless() -> Self {
        NoiseConfig {
            level: Some(0),
            p_pauli: [0.0; 3],
            p_meas: 0.0,
        }
    }

    /// Error rates `0.001·t` per Pauli slot and `0.01·t` per readout.
    pub fn from_level(t: u32) -> Result<Self> {
        let p_single = SINGLE_QUBIT_RATE * f64::from(t);
        let p_meas = MEASUREMENT_RATE * f64::from(t);
        if p_meas > 1.0 {
            return Err(Error::InvalidArgument(format!(
                "noise level {t} gives a readout error probability above 1"
            )));
        }
        Ok(NoiseConfig {
            level: Some(t),
            p_pauli: [p_single; 3],
            p_meas,
        })
    }

    /// Arbitrary per-slot probabilities, for experiments outside the `t` family.
    pub fn custom(p_x: f64, p_y: f64, p_z: f64, p_meas: f64) -> Result<Self> {
        let ps = [p_x, p_y, p_z, p_meas];
        if ps.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidArgument(format!(
                "error probabilities must lie in [0, 1]: {ps:?}"
            )));
        }
        Ok(NoiseConfig {
            level: None,
            p_pauli: [p_x, p_y, p_z],
            p_meas,
        })
    }

    /// Tuning parameter `t`, when the config came from [`NoiseConfig::from_level`].
    pub fn level(&self) -> Option<u32> {
        self.level
    }

    pub fn pauli_probabilities(&self) -> [f64; 3] {
        self.p_pauli
    }

    pub fn measurement_probability(&self) -> f64 {
        self.p_meas
    }

    pub fn is_noiseless(&self) -> bool {
        self.p_pauli.iter().all(|p| *p == 0.0) && self.p_meas == 0.0
    }

    /// The twelve independent slot probabilities.
    pub fn slot_probabilities(&self) -> [f64; ERROR_SLOTS] {
        let mut slots = [0.0; ERROR_SLOTS];
        for q in 0..3 {
            slots[3 * q..3 * q + 3].copy_from_slice(&self.p_pauli);
        }
        slots[9..].fill(self.p_meas);
        slots
    }

    /// Total probability that a given readout bit differs from the ideal one.
    /// X and Y flip the computational basis bit, Z does not.
    pub fn effective_flip_probability(&self) -> f64 {
        let [px, py, _] = self.p_pauli;
        let gate = px * (1.0 - py) + py * (1.0 - px);
        gate * (1.0 - self.p_meas) + (1.0 - gate) * self.p_meas
    }
}

/// Counts over the eight outcomes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct ShotHistogram {
    counts: [u64; 8],
    shots_total: u64,
    shots_kept: u64,
    post_selected: bool,
}

impl ShotHistogram {
    /// Histogram of raw (not post-selected) counts.
    pub fn from_counts(counts: [u64; 8]) -> Self {
        let total = counts.iter().sum();
        ShotHistogram {
            counts,
            shots_total: total,
            shots_kept: total,
            post_selected: false,
        }
    }

    pub fn counts(&self) -> &[u64; 8] {
        &self.counts
    }

    pub fn shots_total(&self) -> u64 {
        self.shots_total
    }

    pub fn shots_kept(&self) -> u64 {
        self.shots_kept
    }

    pub fn is_post_selected(&self) -> bool {
        self.post_selected
    }

    pub fn discard_fraction(&self) -> f64 {
        if self.shots_total == 0 {
            0.0
        } else {
            (self.shots_total - self.shots_kept) as f64 / self.shots_total as f64
        }
    }

    /// Empirical frequencies over kept shots.
    pub fn frequencies(&self) -> Result<[f64; 8]> {
        if self.shots_kept == 0 {
            return Err(Error::EmptyHistogram);
        }
        let m = self.shots_kept as f64;
        Ok(self.counts.map(|c| c as f64 / m))
    }

    /// Adds another histogram's counts. Both must share a post-selection state.
    pub fn merge(&self, other: &ShotHistogram) -> Result<ShotHistogram> {
        if self.post_selected != other.post_selected {
            return Err(Error::InvalidArgument(
                "cannot merge raw and post-selected histograms".into(),
            ));
        }
        let mut counts = self.counts;
        for (c, o) in counts.iter_mut().zip(other.counts) {
            *c += o;
        }
        Ok(ShotHistogram {
            counts,
            shots_total: self.shots_total + other.shots_total,
            shots_kept: self.shots_kept + other.shots_kept,
            post_selected: self.post_selected,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangleEstimate {
    pub tau_hat: f64,
    pub sigma_tau: f64,
    pub post_selected: bool,
    pub discard_fraction: f64,
}

/// Simulates `shots` measurements of `state` through the error circuit.
pub fn sample_shots<R: Rng + ?Sized>(
    state: &PureState3,
    shots: u64,
    noise: &NoiseConfig,
    rng: &mut R,
) -> ShotHistogram {
    let clean_cdf = cumulative(&outcome_probabilities(state));
    let paulis = [
        SingleQubitUnitary::pauli_x(),
        SingleQubitUnitary::pauli_y(),
        SingleQubitUnitary::pauli_z(),
    ];
    let [px, py, pz] = noise.p_pauli;
    let p_slots = [px, py, pz];
    let gate_noise = p_slots.iter().any(|p| *p > 0.0);
    let p_meas = noise.p_meas;

    let mut counts = [0u64; 8];
    for _ in 0..shots {
        let mut corrupted: Option<PureState3> = None;
        if gate_noise {
            for q in Qubit::ALL {
                for (gate, p) in paulis.iter().zip(p_slots) {
                    if p > 0.0 && rng.random::<f64>() < p {
                        let s = corrupted.unwrap_or(*state);
                        corrupted = Some(s.apply_gate(q, gate));
                    }
                }
            }
        }
        let mut outcome = match corrupted {
            None => draw(&clean_cdf, rng),
            Some(s) => draw(&cumulative(&outcome_probabilities(&s)), rng),
        };
        if p_meas > 0.0 {
            for q in Qubit::ALL {
                if rng.random::<f64>() < p_meas {
                    outcome ^= q.mask();
                }
            }
        }
        counts[outcome] += 1;
    }
    ShotHistogram::from_counts(counts)
}

fn cumulative(p: &[f64; 8]) -> [f64; 8] {
    let mut acc = 0.0;
    p.map(|x| {
        acc += x;
        acc
    })
}

#[inline]
fn draw<R: Rng + ?Sized>(cdf: &[f64; 8], rng: &mut R) -> usize {
    let u = rng.random::<f64>() * cdf[7];
    cdf.iter().position(|c| u < *c).unwrap_or_else(|| {
        // u landed on the rounding edge; take the last outcome with mass
        (0..8).rev().find(|&i| i == 0 || cdf[i] > cdf[i - 1]).unwrap_or(7)
    })
}

/// Multinomial draw of `shots` outcomes from `probs` via sequential binomials.
pub fn sample_multinomial<R: Rng + ?Sized>(probs: &[f64; 8], shots: u64, rng: &mut R) -> [u64; 8] {
    let mut counts = [0u64; 8];
    let mut remaining = shots;
    let mut mass: f64 = probs.iter().map(|p| p.max(0.0)).sum();
    for (i, p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let p = p.max(0.0);
        if i == 7 || mass <= 0.0 {
            counts[i] = remaining;
            break;
        }
        let cond = (p / mass).clamp(0.0, 1.0);
        let k = Binomial::new(remaining, cond)
            .expect("conditional probability is clamped to [0, 1]")
            .sample(rng);
        counts[i] = k;
        remaining -= k;
        mass -= p;
    }
    counts
}

/// Exact outcome distribution after the error circuit, averaged over error
/// patterns. Z errors are diagonal and drop out; X and Y act as bit flips.
pub fn noisy_outcome_probabilities(state: &PureState3, noise: &NoiseConfig) -> [f64; 8] {
    let mut p = outcome_probabilities(state);
    let f = noise.effective_flip_probability();
    if f == 0.0 {
        return p;
    }
    for q in Qubit::ALL {
        let mask = q.mask();
        let mut next = [0.0; 8];
        for (i, slot) in next.iter_mut().enumerate() {
            *slot = (1.0 - f) * p[i] + f * p[i ^ mask];
        }
        p = next;
    }
    p
}

/// Drops shots that landed on `|001>, |010>, |011>`.
pub fn post_select(h: &ShotHistogram) -> ShotHistogram {
    let mut counts = h.counts;
    let mut dropped = 0;
    for i in FORBIDDEN_OUTCOMES {
        dropped += counts[i];
        counts[i] = 0;
    }
    ShotHistogram {
        counts,
        shots_total: h.shots_total,
        shots_kept: h.shots_kept - dropped,
        post_selected: true,
    }
}

/// `τ' = 4 P₀₀₀ P₁₁₁` with first-order propagated binomial error.
pub fn estimate_tangle(h: &ShotHistogram) -> Result<TangleEstimate> {
    let freq = h.frequencies()?;
    let m = h.shots_kept as f64;
    let (p0, p7) = (freq[0], freq[7]);
    let s0 = (p0 * (1.0 - p0) / m).sqrt();
    let s7 = (p7 * (1.0 - p7) / m).sqrt();
    Ok(TangleEstimate {
        tau_hat: 4.0 * p0 * p7,
        sigma_tau: 4.0 * (p7 * p7 * s0 * s0 + p0 * p0 * s7 * s7).sqrt(),
        post_selected: h.post_selected,
        discard_fraction: h.discard_fraction(),
    })
}

/// Probabilities of exactly 0, 1, 2 and at least 3 error events.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorEventProbabilities {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3plus: f64,
}

impl ErrorEventProbabilities {
    /// Probability of one or more errors.
    pub fn at_least_one(&self) -> f64 {
        self.p1 + self.p2 + self.p3plus
    }
}

/// Poisson-binomial distribution of the number of error events over the
/// twelve independent slots.
pub fn error_event_probabilities(noise: &NoiseConfig) -> ErrorEventProbabilities {
    let mut dist = [0.0f64; ERROR_SLOTS + 1];
    dist[0] = 1.0;
    for (n, p) in noise.slot_probabilities().into_iter().enumerate() {
        for k in (0..=n + 1).rev() {
            let stay = dist[k] * (1.0 - p);
            let arrive = if k > 0 { dist[k - 1] * p } else { 0.0 };
            dist[k] = stay + arrive;
        }
    }
    ErrorEventProbabilities {
        p0: dist[0],
        p1: dist[1],
        p2: dist[2],
        p3plus: dist[3..].iter().sum(),
    }
}

/// `(τ' − τ)/τ`
pub fn relative_error(tau_est: f64, tau_exact: f64) -> Result<f64> {
    if tau_exact.is_nan() || tau_exact <= 0.0 {
        return Err(Error::UndefinedRelativeError { tau_exact });
    }
    Ok((tau_est - tau_exact) / tau_exact)
}
