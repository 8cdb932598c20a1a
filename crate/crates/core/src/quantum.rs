//! Two-qubit state representations and the small amount of dense linear
//! algebra needed to work with them.
//!
//! Basis ordering is |00⟩, |01⟩, |10⟩, |11⟩ with qubit A as the left factor.
//! Bell labels follow ψ± = (|00⟩ ± |11⟩)/√2 and φ± = (|01⟩ ± |10⟩)/√2.

use std::fmt;

use nalgebra::{Complex, Matrix2, Matrix4, SymmetricEigen, Vector4};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type Matrix2c = Matrix2<C64>;
pub type Matrix4c = Matrix4<C64>;
pub type Vector4c = Vector4<C64>;

/// Eigenvalue floor applied when a Bell-diagonal state is constructed directly.
pub const EPS_POS: f64 = 1e-12;
/// Looser eigenvalue floor for states produced by evolution or numerical routines.
pub const EPS_EVOLVED: f64 = 1e-10;
/// Probabilities below this contribute nothing to an entropy sum.
pub const ZERO_CLAMP: f64 = 1e-12;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const BELL_FAMILY_TOL: f64 = 1e-10;

#[inline]
pub(crate) fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// Pauli axis. The integer value is the conventional index 1, 2, 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    X = 1,
    Y = 2,
    Z = 3,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    /// 1, 2 or 3.
    pub fn index(self) -> usize {
        self as usize
    }

    /// 0, 1 or 2, for indexing coefficient arrays.
    pub fn slot(self) -> usize {
        self as usize - 1
    }

    pub fn from_index(index: usize) -> Option<Pauli> {
        match index {
            1 => Some(Pauli::X),
            2 => Some(Pauli::Y),
            3 => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn matrix(self) -> Matrix2c {
        let o = c64(0.0, 0.0);
        let one = c64(1.0, 0.0);
        let i = c64(0.0, 1.0);
        match self {
            Pauli::X => Matrix2::new(o, one, one, o),
            Pauli::Y => Matrix2::new(o, -i, i, o),
            Pauli::Z => Matrix2::new(one, o, o, -one),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

impl Serialize for Pauli {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.index() as u8)
    }
}

impl<'de> Deserialize<'de> for Pauli {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = u8::deserialize(deserializer)?;
        Pauli::from_index(raw as usize).ok_or_else(|| {
            serde::de::Error::custom(format!("Pauli axis must be 1, 2 or 3, got {raw}"))
        })
    }
}

/// Which qubit of the pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

pub fn identity2() -> Matrix2c {
    Matrix2::identity()
}

pub fn kron(a: &Matrix2c, b: &Matrix2c) -> Matrix4c {
    let mut out = Matrix4c::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + k, 2 * j + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Embed a single-qubit operator on `side`, identity on the other qubit.
pub fn lift(op: &Matrix2c, side: Side) -> Matrix4c {
    match side {
        Side::A => kron(op, &identity2()),
        Side::B => kron(&identity2(), op),
    }
}

/// Trace out the qubit that is not `keep`.
pub fn partial_trace(m: &Matrix4c, keep: Side) -> Matrix2c {
    let mut out = Matrix2c::zeros();
    for r in 0..2 {
        for c in 0..2 {
            out[(r, c)] = match keep {
                Side::A => m[(2 * r, 2 * c)] + m[(2 * r + 1, 2 * c + 1)],
                Side::B => m[(r, c)] + m[(2 + r, 2 + c)],
            };
        }
    }
    out
}

/// Eigenvalues of a 2×2 Hermitian matrix, ascending.
pub fn hermitian_eigenvalues_2x2(m: &Matrix2c) -> [f64; 2] {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = m[(0, 1)];
    let mean = 0.5 * (a + d);
    let half_gap = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    [mean - half_gap, mean + half_gap]
}

/// Eigenvalues of a 4×4 Hermitian matrix, ascending.
pub fn hermitian_eigenvalues_4x4(m: &Matrix4c) -> [f64; 4] {
    let eig = SymmetricEigen::new(*m);
    let mut values = [
        eig.eigenvalues[0],
        eig.eigenvalues[1],
        eig.eigenvalues[2],
        eig.eigenvalues[3],
    ];
    values.sort_by(|a, b| a.total_cmp(b));
    values
}

/// Shannon entropy in bits of a probability vector.
///
/// Entries in `[-EPS_EVOLVED, ZERO_CLAMP)` are treated as exact zeros; anything
/// more negative is rejected.
pub fn entropy_bits(probabilities: &[f64]) -> Result<f64> {
    let mut entropy = 0.0;
    for &p in probabilities {
        if !p.is_finite() || p < -EPS_EVOLVED {
            return Err(Error::UnphysicalState {
                min_eigenvalue: p,
                tolerance: EPS_EVOLVED,
            });
        }
        if p >= ZERO_CLAMP {
            entropy -= p * p.log2();
        }
    }
    Ok(entropy)
}

/// A Bell-diagonal two-qubit state ¼(I + Σ cᵢ σᵢ⊗σᵢ).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BellDiagonalState {
    c: [f64; 3],
}

impl BellDiagonalState {
    pub fn new(c1: f64, c2: f64, c3: f64) -> Result<Self> {
        Self::with_tolerance([c1, c2, c3], EPS_POS)
    }

    /// Construct with an explicit eigenvalue floor (`EPS_EVOLVED` for states
    /// coming out of a channel).
    pub fn with_tolerance(c: [f64; 3], tolerance: f64) -> Result<Self> {
        for (i, &ci) in c.iter().enumerate() {
            if !ci.is_finite() || ci.abs() > 1.0 + tolerance {
                return Err(Error::CoefficientOutOfRange {
                    index: i + 1,
                    value: ci,
                });
            }
        }
        let state = BellDiagonalState { c };
        let min = state
            .spectrum()
            .lambdas()
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min < -tolerance {
            return Err(Error::UnphysicalState {
                min_eigenvalue: min,
                tolerance,
            });
        }
        Ok(state)
    }

    pub fn maximally_mixed() -> Self {
        BellDiagonalState { c: [0.0; 3] }
    }

    /// Uniform over the physical tetrahedron, by rejection from the cube [-1, 1]³.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let c = [
                rng.gen_range(-1.0..=1.0),
                rng.gen_range(-1.0..=1.0),
                rng.gen_range(-1.0..=1.0),
            ];
            if let Ok(state) = Self::with_tolerance(c, 0.0) {
                return state;
            }
        }
    }

    pub fn coefficients(&self) -> [f64; 3] {
        self.c
    }

    pub fn c1(&self) -> f64 {
        self.c[0]
    }

    pub fn c2(&self) -> f64 {
        self.c[1]
    }

    pub fn c3(&self) -> f64 {
        self.c[2]
    }

    pub fn coefficient(&self, axis: Pauli) -> f64 {
        self.c[axis.slot()]
    }

    /// χ = max |cᵢ|.
    pub fn chi(&self) -> f64 {
        self.c.iter().fold(0.0_f64, |m, ci| m.max(ci.abs()))
    }

    /// Axis carrying χ; ties go to the lowest index.
    pub fn chi_axis(&self) -> Pauli {
        let mut best = Pauli::X;
        for axis in [Pauli::Y, Pauli::Z] {
            if self.coefficient(axis).abs() > self.coefficient(best).abs() {
                best = axis;
            }
        }
        best
    }

    /// Eigenvalues in the Bell basis, ordered (ψ+, ψ−, φ+, φ−).
    pub fn spectrum(&self) -> Spectrum4 {
        let [c1, c2, c3] = self.c;
        Spectrum4 {
            lambdas: [
                (1.0 + c1 - c2 + c3) / 4.0,
                (1.0 - c1 + c2 + c3) / 4.0,
                (1.0 + c1 + c2 - c3) / 4.0,
                (1.0 - c1 - c2 - c3) / 4.0,
            ],
        }
    }

    pub fn to_density_matrix(&self) -> DensityMatrix4 {
        let mut m = Matrix4c::identity();
        for axis in Pauli::ALL {
            let s = axis.matrix();
            m += kron(&s, &s) * c64(self.coefficient(axis), 0.0);
        }
        DensityMatrix4 {
            m: m * c64(0.25, 0.0),
        }
    }
}

/// The four Bell-basis weights of a Bell-diagonal state, in (ψ+, ψ−, φ+, φ−) order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Spectrum4 {
    lambdas: [f64; 4],
}

impl Spectrum4 {
    pub fn lambdas(&self) -> [f64; 4] {
        self.lambdas
    }

    pub fn psi_plus(&self) -> f64 {
        self.lambdas[0]
    }

    pub fn psi_minus(&self) -> f64 {
        self.lambdas[1]
    }

    pub fn phi_plus(&self) -> f64 {
        self.lambdas[2]
    }

    pub fn phi_minus(&self) -> f64 {
        self.lambdas[3]
    }

    pub fn entropy(&self) -> Result<f64> {
        entropy_bits(&self.lambdas)
    }

    /// Ascending copy, for multiset comparisons.
    pub fn sorted(&self) -> [f64; 4] {
        let mut v = self.lambdas;
        v.sort_by(|a, b| a.total_cmp(b));
        v
    }
}

/// A validated 4×4 density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix4 {
    m: Matrix4c,
}

impl DensityMatrix4 {
    pub fn new(m: Matrix4c) -> Result<Self> {
        let deviation = (m - m.adjoint())
            .iter()
            .fold(0.0_f64, |acc, z| acc.max(z.norm()));
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = m.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::TraceNotOne { trace: trace.re });
        }
        let rho = DensityMatrix4 { m };
        let min = rho.eigenvalues()[0];
        if min < -EPS_EVOLVED {
            return Err(Error::UnphysicalState {
                min_eigenvalue: min,
                tolerance: EPS_EVOLVED,
            });
        }
        Ok(rho)
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix4 {
            m: Matrix4c::identity() * c64(0.25, 0.0),
        }
    }

    /// |ψ⟩⟨ψ| for a (not necessarily normalized) vector.
    pub fn from_pure(psi: &Vector4c) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::Domain("zero state vector".into()));
        }
        let v = psi / c64(norm, 0.0);
        Self::new(v * v.adjoint())
    }

    pub fn matrix(&self) -> &Matrix4c {
        &self.m
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        hermitian_eigenvalues_4x4(&self.m)
    }

    /// von Neumann entropy in bits.
    pub fn entropy(&self) -> Result<f64> {
        entropy_bits(&self.eigenvalues())
    }

    pub fn reduced_state(&self, side: Side) -> Matrix2c {
        partial_trace(&self.m, side)
    }

    /// Re tr(ρ O).
    pub fn expectation(&self, op: &Matrix4c) -> f64 {
        (self.m * op).trace().re
    }

    /// Recover (c1, c2, c3) from cᵢ = tr[ρ(σᵢ⊗σᵢ)], after checking that every
    /// local Bloch component and cross correlation vanishes.
    pub fn extract_coefficients(&self) -> Result<BellDiagonalState> {
        let mut residual = 0.0_f64;
        for axis in Pauli::ALL {
            let s = axis.matrix();
            residual = residual.max(self.expectation(&lift(&s, Side::A)).abs());
            residual = residual.max(self.expectation(&lift(&s, Side::B)).abs());
            for other in Pauli::ALL {
                if other != axis {
                    residual = residual.max(self.expectation(&kron(&s, &other.matrix())).abs());
                }
            }
        }
        if residual > BELL_FAMILY_TOL {
            return Err(Error::NotBellDiagonal { residual });
        }
        let c = Pauli::ALL.map(|axis| {
            let s = axis.matrix();
            self.expectation(&kron(&s, &s))
        });
        BellDiagonalState::with_tolerance(c, EPS_EVOLVED)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn max_entry_diff(a: &Matrix4c, b: &Matrix4c) -> f64 {
        (a - b).iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    fn psi_plus_projector() -> Matrix4c {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let v = Vector4c::new(c64(r, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(r, 0.0));
        v * v.adjoint()
    }

    #[test]
    fn zero_coefficients_give_maximally_mixed() {
        let rho = BellDiagonalState::maximally_mixed().to_density_matrix();
        assert_eq!(rho, DensityMatrix4::maximally_mixed());
        assert_eq!(rho.entropy().unwrap(), 2.0);
    }

    #[test]
    fn psi_plus_coefficients_build_the_projector() {
        let s = BellDiagonalState::new(1.0, -1.0, 1.0).unwrap();
        let rho = s.to_density_matrix();
        assert!(max_entry_diff(rho.matrix(), &psi_plus_projector()) < 1e-15);
        assert_eq!(s.spectrum().lambdas(), [1.0, 0.0, 0.0, 0.0]);
        assert!(rho.entropy().unwrap().abs() < 1e-12);
    }

    #[test]
    fn fig1_state_spectrum() {
        let s = BellDiagonalState::new(0.1, 0.5, 0.3).unwrap();
        let closed = s.spectrum();
        let expected = [0.225, 0.425, 0.325, 0.025];
        for (a, b) in closed.lambdas().iter().zip(expected) {
            assert!(close(*a, b, 1e-15));
        }
        let numeric = s.to_density_matrix().eigenvalues();
        for (a, b) in numeric.iter().zip(closed.sorted()) {
            assert!(close(*a, b, 1e-12), "{numeric:?}");
        }
        let s_bits = closed.entropy().unwrap();
        assert!(close(s_bits, 1.668881, 1e-5), "{s_bits}");
    }

    #[test]
    fn fig2_state_has_exact_zero_weights() {
        let s = BellDiagonalState::new(1.0, -0.5, 0.5).unwrap();
        let lambdas = s.spectrum().lambdas();
        assert!(lambdas.contains(&0.0));
        assert_eq!(s.spectrum().sorted(), [0.0, 0.0, 0.25, 0.75]);
        let numeric = s.to_density_matrix().eigenvalues();
        for (a, b) in numeric.iter().zip(s.spectrum().sorted()) {
            assert!(close(*a, b, 1e-12));
        }
    }

    #[test]
    fn rejects_unphysical_coefficients() {
        assert!(matches!(
            BellDiagonalState::new(1.0, 1.0, 1.0),
            Err(Error::UnphysicalState { .. })
        ));
        assert!(matches!(
            BellDiagonalState::new(1.5, 0.0, 0.0),
            Err(Error::CoefficientOutOfRange { index: 1, .. })
        ));
        assert!(BellDiagonalState::new(f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn entropy_clamps_tiny_negatives_and_rejects_large_ones() {
        assert_eq!(entropy_bits(&[1.0, -5e-11]).unwrap(), 0.0);
        assert!(entropy_bits(&[1.0, -1e-9]).is_err());
        assert_eq!(entropy_bits(&[0.5, 0.5]).unwrap(), 1.0);
    }

    #[test]
    fn extraction_round_trips_known_states() {
        let s = BellDiagonalState::new(0.1, 0.5, 0.3).unwrap();
        let back = s.to_density_matrix().extract_coefficients().unwrap();
        for (a, b) in back.coefficients().iter().zip(s.coefficients()) {
            assert!(close(*a, b, 1e-12));
        }
        let zero = DensityMatrix4::maximally_mixed()
            .extract_coefficients()
            .unwrap();
        assert_eq!(zero.coefficients(), [0.0, 0.0, 0.0]);

        let bell = DensityMatrix4::new(psi_plus_projector()).unwrap();
        let c = bell.extract_coefficients().unwrap().coefficients();
        assert!(close(c[0], 1.0, 1e-12) && close(c[1], -1.0, 1e-12) && close(c[2], 1.0, 1e-12));
    }

    #[test]
    fn extraction_rejects_product_states() {
        let v = Vector4c::new(c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0));
        let rho = DensityMatrix4::from_pure(&v).unwrap();
        assert!(matches!(
            rho.extract_coefficients(),
            Err(Error::NotBellDiagonal { .. })
        ));
    }

    #[test]
    fn marginals() {
        let half = Matrix2c::identity() * c64(0.5, 0.0);
        let rho = BellDiagonalState::new(0.1, 0.5, 0.3)
            .unwrap()
            .to_density_matrix();
        for side in [Side::A, Side::B] {
            let r = rho.reduced_state(side);
            assert!((r - half).iter().all(|z| z.norm() < 1e-15));
        }
        let bell = DensityMatrix4::new(psi_plus_projector()).unwrap();
        assert!((bell.reduced_state(Side::B) - half)
            .iter()
            .all(|z| z.norm() < 1e-15));

        // |0⟩⟨0| ⊗ |1⟩⟨1|
        let v = Vector4c::new(c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0));
        let product = DensityMatrix4::from_pure(&v).unwrap();
        let ra = product.reduced_state(Side::A);
        assert_eq!(ra[(0, 0)], c64(1.0, 0.0));
        assert_eq!(ra[(1, 1)], c64(0.0, 0.0));
        let rb = product.reduced_state(Side::B);
        assert_eq!(rb[(1, 1)], c64(1.0, 0.0));
    }

    #[test]
    fn density_matrix_validation() {
        let mut m = Matrix4c::identity() * c64(0.25, 0.0);
        m[(0, 1)] = c64(0.1, 0.0);
        assert!(matches!(
            DensityMatrix4::new(m),
            Err(Error::NotHermitian { .. })
        ));
        let m = Matrix4c::identity() * c64(0.3, 0.0);
        assert!(matches!(
            DensityMatrix4::new(m),
            Err(Error::TraceNotOne { .. })
        ));
        let mut m = Matrix4c::zeros();
        m[(0, 0)] = c64(1.5, 0.0);
        m[(1, 1)] = c64(-0.5, 0.0);
        assert!(matches!(
            DensityMatrix4::new(m),
            Err(Error::UnphysicalState { .. })
        ));
    }

    #[test]
    fn two_by_two_eigenvalues() {
        let m = Matrix2::new(c64(0.7, 0.0), c64(0.1, -0.2), c64(0.1, 0.2), c64(0.3, 0.0));
        let [lo, hi] = hermitian_eigenvalues_2x2(&m);
        assert!(close(lo + hi, 1.0, 1e-15));
        assert!(close(lo * hi, 0.21 - 0.05, 1e-15));
    }

    #[test]
    fn pauli_serializes_as_integer() {
        assert_eq!(serde_json::to_string(&Pauli::Y).unwrap(), "2");
        let p: Pauli = serde_json::from_str("3").unwrap();
        assert_eq!(p, Pauli::Z);
        assert!(serde_json::from_str::<Pauli>("4").is_err());
    }
}
