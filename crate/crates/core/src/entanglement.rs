//! Hyperdeterminant, tangle, concurrence, and the five local-unitary
//! invariants of three-qubit pure states.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::state::{reduced_density_matrix, Complex, PureState3, Subsystem};

/// Residual mass on `|001>, |010>, |011>` tolerated by
/// [`extract_canonical_coefficients`].
pub const DEFAULT_RESIDUAL_TOLERANCE: f64 = 1e-6;

/// Below this magnitude the phase-carrying quartic is considered zero.
const PHASE_UNDERFLOW: f64 = 1e-9;

/// Cayley's hyperdeterminant of the 2x2x2 amplitude tensor.
pub fn hyperdeterminant(state: &PureState3) -> Complex {
    let t = |i, j, k| state.amp(i, j, k);
    let (t000, t001, t010, t011) = (t(0, 0, 0), t(0, 0, 1), t(0, 1, 0), t(0, 1, 1));
    let (t100, t101, t110, t111) = (t(1, 0, 0), t(1, 0, 1), t(1, 1, 0), t(1, 1, 1));

    let squares = t000 * t000 * t111 * t111
        + t001 * t001 * t110 * t110
        + t010 * t010 * t101 * t101
        + t100 * t100 * t011 * t011;

    let cross = t000 * t111 * t011 * t100
        + t000 * t111 * t101 * t010
        + t000 * t111 * t110 * t001
        + t011 * t100 * t101 * t010
        + t011 * t100 * t110 * t001
        + t101 * t010 * t110 * t001;

    let diagonal = t000 * t110 * t101 * t011 + t111 * t001 * t010 * t100;

    squares - 2.0 * cross + 4.0 * diagonal
}

/// `τ = 4 |Hdet|`
pub fn tangle(state: &PureState3) -> f64 {
    4.0 * hyperdeterminant(state).norm()
}

/// Two-qubit concurrence `2 |t00 t11 - t01 t10|` of a normalized
/// amplitude vector ordered `00, 01, 10, 11`.
pub fn concurrence(amps: &[Complex; 4]) -> f64 {
    2.0 * (amps[0] * amps[3] - amps[1] * amps[2]).norm()
}

/// Coefficients `λ₀..λ₄` and phase `φ` of the five-term canonical form
/// `λ₀|000> + λ₁e^{iφ}|100> + λ₂|101> + λ₃|110> + λ₄|111>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CanonicalCoefficients {
    lambda: [f64; 5],
    phi: f64,
    phase_identifiable: bool,
}

impl CanonicalCoefficients {
    pub fn new(lambda: [f64; 5], phi: f64) -> Result<Self> {
        if lambda.iter().any(|l| !l.is_finite() || *l < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "canonical coefficients must be finite and non-negative: {lambda:?}"
            )));
        }
        if !(0.0..=PI).contains(&phi) {
            return Err(Error::InvalidArgument(format!(
                "canonical phase {phi} outside [0, π]"
            )));
        }
        let total: f64 = lambda.iter().map(|l| l * l).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "squared coefficients sum to {total}, expected 1"
            )));
        }
        let phase_identifiable = phase_quartic_magnitude(&lambda) >= PHASE_UNDERFLOW;
        Ok(CanonicalCoefficients {
            lambda,
            phi,
            phase_identifiable,
        })
    }

    pub fn lambda(&self) -> [f64; 5] {
        self.lambda
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// False when one of `λ₁..λ₄` vanishes and `φ` carries no information.
    pub fn phase_identifiable(&self) -> bool {
        self.phase_identifiable
    }

    /// `μᵢ = λᵢ²`
    pub fn mu(&self) -> [f64; 5] {
        self.lambda.map(|l| l * l)
    }

    /// `Δ = |λ₁λ₄e^{iφ} − λ₂λ₃|²`
    pub fn delta(&self) -> f64 {
        let [_, l1, l2, l3, l4] = self.lambda;
        (Complex::from_polar(l1 * l4, self.phi) - l2 * l3).norm_sqr()
    }

    /// `4 μ₀ μ₄`
    pub fn tangle(&self) -> f64 {
        let mu = self.mu();
        4.0 * mu[0] * mu[4]
    }

    /// The canonical-form state these coefficients describe.
    pub fn to_state(&self) -> PureState3 {
        let [l0, l1, l2, l3, l4] = self.lambda;
        let mut amps = [Complex::new(0.0, 0.0); 8];
        amps[0b000] = l0.into();
        amps[0b100] = Complex::from_polar(l1, self.phi);
        amps[0b101] = l2.into();
        amps[0b110] = l3.into();
        amps[0b111] = l4.into();
        PureState3::new(amps).expect("coefficients are validated at construction")
    }
}

fn phase_quartic_magnitude(lambda: &[f64; 5]) -> f64 {
    lambda[1..].iter().copied().fold(f64::INFINITY, f64::min)
}

/// The five local-unitary invariants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InvariantSet {
    /// `Tr ρ_A²`
    pub i1: f64,
    /// `Tr ρ_B²`
    pub i2: f64,
    /// `Tr ρ_C²`
    pub i3: f64,
    /// `Tr(ρ_A ⊗ ρ_B · ρ_AB)`
    pub i4: f64,
    /// `|Hdet|²`
    pub i5: f64,
}

impl InvariantSet {
    pub fn as_array(&self) -> [f64; 5] {
        [self.i1, self.i2, self.i3, self.i4, self.i5]
    }

    /// Checks the admissible ranges, widened by `slack` on every side.
    pub fn in_range(&self, slack: f64) -> bool {
        let within = |x: f64, lo: f64, hi: f64| x >= lo - slack && x <= hi + slack;
        within(self.i1, 0.5, 1.0)
            && within(self.i2, 0.5, 1.0)
            && within(self.i3, 0.5, 1.0)
            && within(self.i4, 0.25, 1.0)
            && within(self.i5, 0.0, 1.0 / 16.0)
    }

    pub fn max_abs_diff(&self, other: &InvariantSet) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Closed-form invariants in terms of `μᵢ` and `Δ`.
pub fn invariants_from_canonical(c: &CanonicalCoefficients) -> InvariantSet {
    let [m0, m1, m2, m3, m4] = c.mu();
    let delta = c.delta();
    InvariantSet {
        i1: 1.0 - 2.0 * m0 * (1.0 - m0 - m1),
        i2: 1.0 - 2.0 * m0 * (1.0 - m0 - m1 - m2) - 2.0 * delta,
        i3: 1.0 - 2.0 * m0 * (1.0 - m0 - m1 - m3) - 2.0 * delta,
        i4: 1.0 + m0 * (m2 * m3 - m1 * m4 - 2.0 * m2 - 3.0 * m3 - 3.0 * m4)
            - (2.0 - m0) * delta,
        i5: m0 * m0 * m4 * m4,
    }
}

/// Invariants from their operator definitions on reduced density matrices.
pub fn invariants_from_state(state: &PureState3) -> InvariantSet {
    let rho_a = reduced_density_matrix(state, Subsystem::A);
    let rho_b = reduced_density_matrix(state, Subsystem::B);
    let rho_c = reduced_density_matrix(state, Subsystem::C);
    let rho_ab = reduced_density_matrix(state, Subsystem::AB);
    let ab = rho_a
        .kron(&rho_b)
        .expect("single-qubit marginals are 2x2");
    InvariantSet {
        i1: rho_a.purity(),
        i2: rho_b.purity(),
        i3: rho_c.purity(),
        i4: ab.matmul(&rho_ab).trace().re,
        i5: hyperdeterminant(state).norm_sqr(),
    }
}

/// Reads `λ` and `φ` off a state whose `|001>, |010>, |011>` amplitudes
/// vanish, using the default residual tolerance.
pub fn extract_canonical_coefficients(state: &PureState3) -> Result<CanonicalCoefficients> {
    extract_canonical_coefficients_with_tolerance(state, DEFAULT_RESIDUAL_TOLERANCE)
}

pub fn extract_canonical_coefficients_with_tolerance(
    state: &PureState3,
    tolerance: f64,
) -> Result<CanonicalCoefficients> {
    let a = state.amplitudes();
    let residual = a[0b001].norm_sqr() + a[0b010].norm_sqr() + a[0b011].norm_sqr();
    if residual > tolerance {
        return Err(Error::NotCanonical { residual });
    }

    let kept = [a[0b000], a[0b100], a[0b101], a[0b110], a[0b111]];
    let norm = kept.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let lambda = kept.map(|z| z.norm() / norm);

    // t100 t111 conj(t101) conj(t110) is unchanged by diagonal local phases.
    let quartic = kept[1] * kept[4] * kept[2].conj() * kept[3].conj();
    let identifiable = kept[1..].iter().all(|z| z.norm() >= PHASE_UNDERFLOW);
    let phi = if identifiable {
        quartic.arg().abs().min(PI)
    } else {
        0.0
    };

    Ok(CanonicalCoefficients {
        lambda,
        phi,
        phase_identifiable: identifiable,
    })
}
