//! Three-qubit pure states, single-qubit gates and reduced density matrices.
//!
//! Amplitudes are stored in a fixed array of eight complex numbers indexed by
//! the basis label `ijk`, with qubit A as the most significant bit:
//! `amplitude[4*i + 2*j + k] = t_ijk`.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Complex = Complex64;

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);

/// Largest norm deviation that construction silently repairs.
pub const NORM_REPAIR_TOLERANCE: f64 = 1e-6;
/// Vectors shorter than this are treated as the zero vector.
pub const MIN_NORM: f64 = 1e-12;

/// One of the three parties. The bit position follows the index convention.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Qubit {
    A,
    B,
    C,
}

impl Qubit {
    pub const ALL: [Qubit; 3] = [Qubit::A, Qubit::B, Qubit::C];

    #[inline]
    pub fn bit(self) -> usize {
        match self {
            Qubit::A => 2,
            Qubit::B => 1,
            Qubit::C => 0,
        }
    }

    #[inline]
    pub fn mask(self) -> usize {
        1 << self.bit()
    }
}

/// Normalized three-qubit pure state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PureState3 {
    amps: [Complex; 8],
}

impl PureState3 {
    /// Builds a state from amplitudes whose norm is within
    /// [`NORM_REPAIR_TOLERANCE`] of one; the result is renormalized exactly.
    pub fn new(amps: [Complex; 8]) -> Result<Self> {
        let norm = checked_norm(&amps)?;
        if (norm - 1.0).abs() > NORM_REPAIR_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "amplitude vector has norm {norm}, expected 1"
            )));
        }
        Ok(Self::scaled(amps, norm))
    }

    /// Builds a state from an arbitrary non-zero amplitude vector.
    pub fn from_unnormalized(amps: [Complex; 8]) -> Result<Self> {
        let norm = checked_norm(&amps)?;
        Ok(Self::scaled(amps, norm))
    }

    fn scaled(mut amps: [Complex; 8], norm: f64) -> Self {
        for a in &mut amps {
            *a /= norm;
        }
        PureState3 { amps }
    }

    /// Computational basis state `|ijk>` for `index = 4i + 2j + k`.
    pub fn basis(index: usize) -> Result<Self> {
        if index >= 8 {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range 0..8"
            )));
        }
        let mut amps = [ZERO; 8];
        amps[index] = ONE;
        Ok(PureState3 { amps })
    }

    /// `(|000> + |111>)/sqrt(2)`
    pub fn ghz() -> Self {
        let h = Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut amps = [ZERO; 8];
        amps[0] = h;
        amps[7] = h;
        PureState3 { amps }
    }

    /// `(|001> + |010> + |100>)/sqrt(3)`
    pub fn w() -> Self {
        let v = Complex::new(1.0 / 3f64.sqrt(), 0.0);
        let mut amps = [ZERO; 8];
        amps[1] = v;
        amps[2] = v;
        amps[4] = v;
        PureState3 { amps }
    }

    /// Tensor product `|a> ⊗ |b> ⊗ |c>` of three single-qubit vectors.
    pub fn product(a: [Complex; 2], b: [Complex; 2], c: [Complex; 2]) -> Result<Self> {
        let mut amps = [ZERO; 8];
        for (idx, amp) in amps.iter_mut().enumerate() {
            *amp = a[idx >> 2] * b[(idx >> 1) & 1] * c[idx & 1];
        }
        Self::from_unnormalized(amps)
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex; 8] {
        &self.amps
    }

    /// Amplitude `t_ijk`.
    #[inline]
    pub fn amp(&self, i: usize, j: usize, k: usize) -> Complex {
        self.amps[4 * i + 2 * j + k]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &PureState3) -> Complex {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// True when the two states differ only by a global phase.
    pub fn approx_eq_up_to_phase(&self, other: &PureState3, tol: f64) -> bool {
        (self.inner(other).norm() - 1.0).abs() <= tol
    }

    /// Applies a single-qubit gate to one party.
    pub fn apply_gate(&self, qubit: Qubit, u: &SingleQubitUnitary) -> PureState3 {
        let mut amps = self.amps;
        apply_in_place(&mut amps, qubit.mask(), &u.m);
        PureState3 { amps }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Vec<[f64; 2]> = serde_json::from_str(text)?;
        if raw.len() != 8 {
            return Err(Error::InvalidArgument(format!(
                "state file must hold 8 amplitudes, found {}",
                raw.len()
            )));
        }
        let mut amps = [ZERO; 8];
        for (slot, [re, im]) in amps.iter_mut().zip(raw) {
            *slot = Complex::new(re, im);
        }
        Self::new(amps)
    }

    pub fn to_json(&self) -> String {
        let raw: Vec<[f64; 2]> = self.amps.iter().map(|a| [a.re, a.im]).collect();
        serde_json::to_string(&raw).expect("finite floats always serialize")
    }
}

fn checked_norm(amps: &[Complex; 8]) -> Result<f64> {
    if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
        return Err(Error::InvalidArgument("non-finite amplitude".into()));
    }
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm < MIN_NORM {
        return Err(Error::InvalidArgument(format!(
            "amplitude vector is (numerically) zero: norm {norm:e}"
        )));
    }
    Ok(norm)
}

#[inline]
fn apply_in_place(amps: &mut [Complex; 8], mask: usize, m: &[[Complex; 2]; 2]) {
    for lo in 0..8 {
        if lo & mask != 0 {
            continue;
        }
        let hi = lo | mask;
        let (x0, x1) = (amps[lo], amps[hi]);
        amps[lo] = m[0][0] * x0 + m[0][1] * x1;
        amps[hi] = m[1][0] * x0 + m[1][1] * x1;
    }
}

/// 2x2 unitary acting on one qubit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleQubitUnitary {
    m: [[Complex; 2]; 2],
}

impl SingleQubitUnitary {
    pub fn identity() -> Self {
        SingleQubitUnitary {
            m: [[ONE, ZERO], [ZERO, ONE]],
        }
    }

    pub fn pauli_x() -> Self {
        SingleQubitUnitary {
            m: [[ZERO, ONE], [ONE, ZERO]],
        }
    }

    pub fn pauli_y() -> Self {
        let i = Complex::i();
        SingleQubitUnitary {
            m: [[ZERO, -i], [i, ZERO]],
        }
    }

    pub fn pauli_z() -> Self {
        SingleQubitUnitary {
            m: [[ONE, ZERO], [ZERO, -ONE]],
        }
    }

    /// Diagonal phase gate `diag(1, e^{i phi})`.
    pub fn phase(phi: f64) -> Self {
        SingleQubitUnitary {
            m: [[ONE, ZERO], [ZERO, Complex::from_polar(1.0, phi)]],
        }
    }

    /// Wraps an arbitrary 2x2 matrix after checking `U†U = I` to `1e-12`.
    pub fn from_matrix(m: [[Complex; 2]; 2]) -> Result<Self> {
        let u = SingleQubitUnitary { m };
        if !u.is_unitary(1e-12) {
            return Err(Error::InvalidArgument("matrix is not unitary".into()));
        }
        Ok(u)
    }

    #[inline]
    pub fn entries(&self) -> &[[Complex; 2]; 2] {
        &self.m
    }

    pub fn dagger(&self) -> Self {
        let m = &self.m;
        SingleQubitUnitary {
            m: [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]],
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        let (a, b) = (&self.m, &rhs.m);
        let mut m = [[ZERO; 2]; 2];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        SingleQubitUnitary { m }
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let p = self.dagger().matmul(self);
        let id = Self::identity();
        p.max_abs_diff(&id) <= tol
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.m
            .iter()
            .flatten()
            .zip(other.m.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// The parametrized single-qubit gate
///
/// ```text
/// [ cos(t0/2)               -e^{i t1} sin(t0/2)        ]
/// [ e^{i t2} sin(t0/2)       e^{i(t1+t2)} cos(t0/2)    ]
/// ```
pub fn build_unitary(theta: [f64; 3]) -> Result<SingleQubitUnitary> {
    if theta.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "non-finite rotation angle in {theta:?}"
        )));
    }
    Ok(unitary_unchecked(theta))
}

#[inline]
fn unitary_unchecked([t0, t1, t2]: [f64; 3]) -> SingleQubitUnitary {
    let (s, c) = (0.5 * t0).sin_cos();
    let e1 = Complex::from_polar(1.0, t1);
    let e2 = Complex::from_polar(1.0, t2);
    SingleQubitUnitary {
        m: [[Complex::new(c, 0.0), -e1 * s], [e2 * s, e1 * e2 * c]],
    }
}

/// Nine angles, three per qubit, for `U_A ⊗ U_B ⊗ U_C`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct LocalUnitaryParams {
    pub theta_a: [f64; 3],
    pub theta_b: [f64; 3],
    pub theta_c: [f64; 3],
}

impl LocalUnitaryParams {
    pub const LEN: usize = 9;

    pub fn new(theta_a: [f64; 3], theta_b: [f64; 3], theta_c: [f64; 3]) -> Result<Self> {
        let p = LocalUnitaryParams {
            theta_a,
            theta_b,
            theta_c,
        };
        if p.to_array().iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite angle in {p:?}"
            )));
        }
        Ok(p)
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Reads `[a0, a1, a2, b0, b1, b2, c0, c1, c2]`.
    pub fn from_slice(x: &[f64]) -> Result<Self> {
        if x.len() != Self::LEN {
            return Err(Error::InvalidArgument(format!(
                "expected {} angles, got {}",
                Self::LEN,
                x.len()
            )));
        }
        Self::new(
            [x[0], x[1], x[2]],
            [x[3], x[4], x[5]],
            [x[6], x[7], x[8]],
        )
    }

    pub fn to_array(&self) -> [f64; 9] {
        let (a, b, c) = (self.theta_a, self.theta_b, self.theta_c);
        [a[0], a[1], a[2], b[0], b[1], b[2], c[0], c[1], c[2]]
    }

    /// Same angles reduced into `[0, 2π)` for reporting. Note that `θ₀` has
    /// period 4π in the matrix itself; the reduced angle reproduces the gate up
    /// to a global sign.
    pub fn wrapped(&self) -> Self {
        let w = |t: [f64; 3]| t.map(|x| x.rem_euclid(TAU));
        LocalUnitaryParams {
            theta_a: w(self.theta_a),
            theta_b: w(self.theta_b),
            theta_c: w(self.theta_c),
        }
    }

    pub fn unitaries(&self) -> [SingleQubitUnitary; 3] {
        [
            unitary_unchecked(self.theta_a),
            unitary_unchecked(self.theta_b),
            unitary_unchecked(self.theta_c),
        ]
    }
}

impl fmt::Display for LocalUnitaryParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.to_array();
        write!(f, "[")?;
        for (i, x) in a.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x:.6}")?;
        }
        write!(f, "]")
    }
}

/// Returns `(U_A ⊗ U_B ⊗ U_C)|ψ>`.
pub fn apply_local_unitaries(state: &PureState3, params: &LocalUnitaryParams) -> PureState3 {
    let [ua, ub, uc] = params.unitaries();
    let mut amps = state.amps;
    apply_in_place(&mut amps, Qubit::A.mask(), &ua.m);
    apply_in_place(&mut amps, Qubit::B.mask(), &ub.m);
    apply_in_place(&mut amps, Qubit::C.mask(), &uc.m);
    PureState3 { amps }
}

/// `P_ijk = |t_ijk|²`
pub fn outcome_probabilities(state: &PureState3) -> [f64; 8] {
    state.amps.map(|a| a.norm_sqr())
}

/// Subsystem labels for partial traces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Subsystem {
    A,
    B,
    C,
    AB,
    AC,
    BC,
}

impl Subsystem {
    /// Kept qubits, most significant first.
    pub fn qubits(self) -> &'static [Qubit] {
        match self {
            Subsystem::A => &[Qubit::A],
            Subsystem::B => &[Qubit::B],
            Subsystem::C => &[Qubit::C],
            Subsystem::AB => &[Qubit::A, Qubit::B],
            Subsystem::AC => &[Qubit::A, Qubit::C],
            Subsystem::BC => &[Qubit::B, Qubit::C],
        }
    }
}

impl FromStr for Subsystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Subsystem::A),
            "B" => Ok(Subsystem::B),
            "C" => Ok(Subsystem::C),
            "AB" => Ok(Subsystem::AB),
            "AC" => Ok(Subsystem::AC),
            "BC" => Ok(Subsystem::BC),
            other => Err(Error::InvalidArgument(format!(
                "unsupported subsystem label {other:?}"
            ))),
        }
    }
}

/// Reduced state on one or two qubits. Only the leading `dim x dim` block of
/// `entries` is meaningful.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    entries: [[Complex; 4]; 4],
    subsystem: Option<Subsystem>,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn subsystem(&self) -> Option<Subsystem> {
        self.subsystem
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex {
        assert!(r < self.dim && c < self.dim, "index out of range");
        self.entries[r][c]
    }

    pub fn trace(&self) -> Complex {
        (0..self.dim).map(|i| self.entries[i][i]).sum()
    }

    /// `Tr ρ²`, real for Hermitian input.
    pub fn purity(&self) -> f64 {
        self.matmul(self).trace().re
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..self.dim).all(|r| {
            (0..self.dim).all(|c| (self.entries[r][c] - self.entries[c][r].conj()).norm() <= tol)
        })
    }

    /// `<v|ρ|v>`, used as a positivity probe.
    pub fn expectation(&self, v: &[Complex]) -> Complex {
        assert_eq!(v.len(), self.dim);
        let mut acc = ZERO;
        for r in 0..self.dim {
            for c in 0..self.dim {
                acc += v[r].conj() * self.entries[r][c] * v[c];
            }
        }
        acc
    }

    /// Matrix product; both operands must share a dimension.
    pub fn matmul(&self, rhs: &DensityMatrix) -> DensityMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let d = self.dim;
        let mut entries = [[ZERO; 4]; 4];
        for r in 0..d {
            for c in 0..d {
                entries[r][c] = (0..d).map(|k| self.entries[r][k] * rhs.entries[k][c]).sum();
            }
        }
        DensityMatrix {
            dim: d,
            entries,
            subsystem: None,
        }
    }

    /// `self ⊗ rhs` for two single-qubit matrices.
    pub fn kron(&self, rhs: &DensityMatrix) -> Result<DensityMatrix> {
        if self.dim != 2 || rhs.dim != 2 {
            return Err(Error::InvalidArgument(
                "kron is only defined for single-qubit factors".into(),
            ));
        }
        let mut entries = [[ZERO; 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                entries[r][c] = self.entries[r >> 1][c >> 1] * rhs.entries[r & 1][c & 1];
            }
        }
        Ok(DensityMatrix {
            dim: 4,
            entries,
            subsystem: None,
        })
    }
}

/// Partial trace of `|ψ><ψ|` over the complement of `subsystem`.
pub fn reduced_density_matrix(state: &PureState3, subsystem: Subsystem) -> DensityMatrix {
    let kept = subsystem.qubits();
    let env: Vec<Qubit> = Qubit::ALL
        .iter()
        .copied()
        .filter(|q| !kept.contains(q))
        .collect();
    let dim = 1 << kept.len();
    let env_dim = 1 << env.len();

    // Global basis index from local (kept) and environment labels.
    let index = |local: usize, e: usize| -> usize {
        let mut idx = 0;
        for (pos, q) in kept.iter().enumerate() {
            let bit = (local >> (kept.len() - 1 - pos)) & 1;
            idx |= bit << q.bit();
        }
        for (pos, q) in env.iter().enumerate() {
            let bit = (e >> (env.len() - 1 - pos)) & 1;
            idx |= bit << q.bit();
        }
        idx
    };

    let mut entries = [[ZERO; 4]; 4];
    for r in 0..dim {
        for c in 0..dim {
            entries[r][c] = (0..env_dim)
                .map(|e| state.amps[index(r, e)] * state.amps[index(c, e)].conj())
                .sum();
        }
    }
    DensityMatrix {
        dim,
        entries,
        subsystem: Some(subsystem),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn zero_angles_give_identity() {
        let u = build_unitary([0.0, 0.0, 0.0]).unwrap();
        assert!(u.max_abs_diff(&SingleQubitUnitary::identity()) < 1e-15);
    }

    #[test]
    fn pi_rotation_matrix() {
        let u = build_unitary([PI, 0.0, 0.0]).unwrap();
        let expected =
            SingleQubitUnitary::from_matrix([[c(0.0, 0.0), c(-1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]])
                .unwrap();
        assert!(u.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn generic_unitary_is_unitary() {
        let u = build_unitary([PI / 2.0, 0.7, -1.3]).unwrap();
        assert!(u.is_unitary(1e-12));
        // direct evaluation of the defining entries
        let s = (PI / 4.0).sin();
        let e = u.entries();
        assert!((e[0][0] - c((PI / 4.0).cos(), 0.0)).norm() < 1e-15);
        assert!((e[0][1] + Complex::from_polar(s, 0.7)).norm() < 1e-15);
        assert!((e[1][0] - Complex::from_polar(s, -1.3)).norm() < 1e-15);
        assert!((e[1][1] - Complex::from_polar((PI / 4.0).cos(), 0.7 - 1.3)).norm() < 1e-15);
    }

    #[test]
    fn non_finite_angle_rejected() {
        assert!(matches!(
            build_unitary([f64::NAN, 0.0, 0.0]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(LocalUnitaryParams::new([0.0; 3], [f64::INFINITY, 0.0, 0.0], [0.0; 3]).is_err());
    }

    #[test]
    fn construction_rules() {
        let mut amps = [ZERO; 8];
        assert!(PureState3::new(amps).is_err());
        amps[3] = c(1.0 + 5e-7, 0.0);
        let s = PureState3::new(amps).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
        amps[3] = c(2.0, 0.0);
        assert!(PureState3::new(amps).is_err());
        assert!(PureState3::from_unnormalized(amps).is_ok());
        amps[0] = c(f64::NAN, 0.0);
        assert!(PureState3::from_unnormalized(amps).is_err());
    }

    #[test]
    fn pi_rotation_on_a_maps_000_to_100() {
        let p = LocalUnitaryParams::new([PI, 0.0, 0.0], [0.0; 3], [0.0; 3]).unwrap();
        let out = apply_local_unitaries(&PureState3::basis(0).unwrap(), &p);
        assert!(out.approx_eq_up_to_phase(&PureState3::basis(4).unwrap(), 1e-14));
    }

    #[test]
    fn zero_params_are_identity() {
        let s = PureState3::w();
        assert_eq!(apply_local_unitaries(&s, &LocalUnitaryParams::zero()), s);
    }

    #[test]
    fn probabilities_of_named_states() {
        let p = outcome_probabilities(&PureState3::ghz());
        let expected = [0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5];
        for (a, b) in p.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        let p = outcome_probabilities(&PureState3::basis(0b101).unwrap());
        assert_eq!(p[5], 1.0);
        assert_eq!(p.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn ghz_marginal_is_maximally_mixed() {
        let rho = reduced_density_matrix(&PureState3::ghz(), Subsystem::A);
        assert!((rho.get(0, 0).re - 0.5).abs() < 1e-15);
        assert!(rho.get(0, 1).norm() < 1e-15);
        assert!((rho.purity() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn product_marginal_is_pure() {
        let rho = reduced_density_matrix(&PureState3::basis(0).unwrap(), Subsystem::B);
        assert!((rho.get(0, 0).re - 1.0).abs() < 1e-15);
        assert!((rho.purity() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_qubit_marginal_index_order() {
        // |0>_A |1>_B |+>_C : rho_AB = |01><01|
        let s = PureState3::product(
            [ONE, ZERO],
            [ZERO, ONE],
            [ONE, ONE],
        )
        .unwrap();
        let rho = reduced_density_matrix(&s, Subsystem::AB);
        assert!((rho.get(1, 1).re - 1.0).abs() < 1e-15);
        let rho = reduced_density_matrix(&s, Subsystem::BC);
        assert!((rho.get(2, 3).re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn subsystem_labels() {
        assert_eq!("ab".parse::<Subsystem>().unwrap(), Subsystem::AB);
        assert!(matches!(
            "ABC".parse::<Subsystem>(),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn json_round_trip_and_repair() {
        let s = PureState3::ghz();
        let back = PureState3::from_json(&s.to_json()).unwrap();
        assert!(back.approx_eq_up_to_phase(&s, 1e-15));
        assert!(PureState3::from_json("[[1,0]]").is_err());
        assert!(PureState3::from_json("[[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0],[0,0]]").is_err());
        assert!(PureState3::from_json("not json").is_err());
    }

    #[test]
    fn wrapped_params_reproduce_gate_up_to_sign() {
        let p = LocalUnitaryParams::new([7.0, -2.0, 13.0], [0.1; 3], [-9.0, 4.0, 0.0]).unwrap();
        let w = p.wrapped();
        assert!(w.to_array().iter().all(|x| (0.0..TAU).contains(x)));
        let s = PureState3::w();
        let a = apply_local_unitaries(&s, &p);
        let b = apply_local_unitaries(&s, &w);
        assert!(a.approx_eq_up_to_phase(&b, 1e-12));
    }
}
