//! Mutual information, classical correlation and quantum discord.
//!
//! Two independent routes are provided. The closed forms work directly on
//! the Bell-diagonal coefficients. The oracle works on any 4×4 density
//! matrix by maximizing the information gained about A over rank-1
//! projective measurements on B.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{
    c64, entropy_bits, hermitian_eigenvalues_2x2, identity2, lift, partial_trace,
    BellDiagonalState, DensityMatrix4, Matrix2c, Pauli, Side,
};

/// Outcomes with probability below this are dropped from the conditional entropy.
const OUTCOME_FLOOR: f64 = 1e-14;
/// Rounding allowance under which a negative discord is shown as zero.
pub const DISCORD_DISPLAY_FLOOR: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTriple {
    pub mutual_info: f64,
    pub classical: f64,
    pub quantum: f64,
}

impl CorrelationTriple {
    /// Discord is defined as the difference, so I − C − Q is exactly zero.
    pub fn from_total_and_classical(mutual_info: f64, classical: f64) -> Self {
        CorrelationTriple {
            mutual_info,
            classical,
            quantum: mutual_info - classical,
        }
    }

    pub fn quantum_for_display(&self) -> f64 {
        if self.quantum < 0.0 && self.quantum >= -DISCORD_DISPLAY_FLOOR {
            0.0
        } else {
            self.quantum
        }
    }
}

/// I = S(ρ_A) + S(ρ_B) − S(ρ); both marginals of a Bell-diagonal state are
/// maximally mixed, so this is 2 − S(ρ).
pub fn mutual_information(state: &BellDiagonalState) -> Result<f64> {
    Ok(2.0 - state.spectrum().entropy()?)
}

/// Σⱼ (1 + (−1)ʲχ)/2 · log₂(1 + (−1)ʲχ).
pub fn classical_from_chi(chi: f64) -> f64 {
    let mut sum = 0.0;
    for arg in [1.0 - chi, 1.0 + chi] {
        if arg >= crate::quantum::ZERO_CLAMP {
            sum += 0.5 * arg * arg.log2();
        }
    }
    sum
}

pub fn classical_correlation_closed(state: &BellDiagonalState) -> f64 {
    classical_from_chi(state.chi())
}

pub fn quantum_discord_closed(state: &BellDiagonalState) -> Result<f64> {
    Ok(correlations(state)?.quantum)
}

pub fn correlations(state: &BellDiagonalState) -> Result<CorrelationTriple> {
    let mutual = mutual_information(state)?;
    Ok(CorrelationTriple::from_total_and_classical(
        mutual,
        classical_correlation_closed(state),
    ))
}

/// A rank-1 projective measurement {B₀, B₁} on qubit B along the Bloch
/// direction (sinθ cosφ, sinθ sinφ, cosθ).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementBasis {
    pub theta: f64,
    pub phi: f64,
}

impl MeasurementBasis {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::Domain(format!("theta {theta} outside [0, π]")));
        }
        if !phi.is_finite() {
            return Err(Error::Domain(format!("phi {phi} is not finite")));
        }
        Ok(MeasurementBasis {
            theta,
            phi: phi.rem_euclid(2.0 * PI),
        })
    }

    pub fn along(axis: Pauli) -> Self {
        match axis {
            Pauli::X => MeasurementBasis {
                theta: PI / 2.0,
                phi: 0.0,
            },
            Pauli::Y => MeasurementBasis {
                theta: PI / 2.0,
                phi: PI / 2.0,
            },
            Pauli::Z => MeasurementBasis {
                theta: 0.0,
                phi: 0.0,
            },
        }
    }

    pub fn bloch_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Axis with the largest Bloch component; lowest index on ties.
    pub fn dominant_axis(&self) -> Pauli {
        let n = self.bloch_vector();
        let mut best = Pauli::X;
        for axis in [Pauli::Y, Pauli::Z] {
            if n[axis.slot()].abs() > n[best.slot()].abs() {
                best = axis;
            }
        }
        best
    }

    pub fn projectors(&self) -> [Matrix2c; 2] {
        let n = self.bloch_vector();
        let mut n_sigma = Matrix2c::zeros();
        for axis in Pauli::ALL {
            n_sigma += axis.matrix() * c64(n[axis.slot()], 0.0);
        }
        let half = c64(0.5, 0.0);
        [
            (identity2() + n_sigma) * half,
            (identity2() - n_sigma) * half,
        ]
    }
}

/// S(ρ|{B_k}) = Σₖ pₖ S(ρₖ).
///
/// The post-measurement state is ρ_A^k ⊗ B_k with B_k pure, so S(ρₖ) is the
/// entropy of the conditional state of A.
pub fn conditional_entropy(rho: &DensityMatrix4, basis: &MeasurementBasis) -> Result<f64> {
    let mut total = 0.0;
    for projector in basis.projectors() {
        let lifted = lift(&projector, Side::B);
        let post = lifted * rho.matrix() * lifted;
        let p = post.trace().re;
        if p < OUTCOME_FLOOR {
            continue;
        }
        let conditional = partial_trace(&post, Side::A) * c64(1.0 / p, 0.0);
        total += p * entropy_bits(&hermitian_eigenvalues_2x2(&conditional))?;
    }
    Ok(total)
}

/// Search grid for the classical-correlation oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleGrid {
    pub n_theta: usize,
    pub n_phi: usize,
    pub refine_rounds: usize,
}

impl Default for OracleGrid {
    fn default() -> Self {
        OracleGrid {
            n_theta: 181,
            n_phi: 361,
            refine_rounds: 3,
        }
    }
}

impl OracleGrid {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta < 2 || n_phi < 2 {
            return Err(Error::Domain(format!(
                "oracle grid needs at least 2 points per angle, got {n_theta}x{n_phi}"
            )));
        }
        Ok(OracleGrid {
            n_theta,
            n_phi,
            ..OracleGrid::default()
        })
    }

    pub fn theta_step(&self) -> f64 {
        PI / (self.n_theta - 1) as f64
    }

    /// φ runs over [0, 2π) in n_phi − 1 distinct points.
    pub fn phi_step(&self) -> f64 {
        2.0 * PI / (self.n_phi - 1) as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OracleResult {
    pub classical: f64,
    pub basis: MeasurementBasis,
    /// Best point of the coarse grid, before refinement.
    pub grid_basis: MeasurementBasis,
    /// Refinement moved the optimum by more than one coarse cell.
    pub grid_too_coarse: bool,
}

/// max over projective measurements on B of S(ρ_A) − S(ρ|{B_k}).
///
/// Exhaustive scan of the (θ, φ) grid, then `refine_rounds` rounds of
/// bisection: each round halves the spacing and rescans a 5×5 patch spanning
/// one previous cell around the incumbent. Ties go to the lowest
/// (θ, φ) index, so parallel and serial evaluation agree bitwise.
pub fn classical_correlation_oracle(
    rho: &DensityMatrix4,
    grid: &OracleGrid,
) -> Result<OracleResult> {
    if grid.n_theta < 2 || grid.n_phi < 2 {
        return Err(Error::Domain(
            "oracle grid needs at least 2 points per angle".into(),
        ));
    }
    let s_a = entropy_bits(&hermitian_eigenvalues_2x2(&rho.reduced_state(Side::A)))?;
    let objective = |theta: f64, phi: f64| -> Result<f64> {
        conditional_entropy(rho, &MeasurementBasis { theta, phi }).map(|h| s_a - h)
    };

    let d_theta = grid.theta_step();
    let d_phi = grid.phi_step();
    let n_phi_distinct = grid.n_phi - 1;

    let rows: Vec<Vec<f64>> = (0..grid.n_theta)
        .into_par_iter()
        .map(|i| {
            let theta = d_theta * i as f64;
            (0..n_phi_distinct)
                .map(|j| objective(theta, d_phi * j as f64))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best = (f64::NEG_INFINITY, 0usize, 0usize);
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v > best.0 {
                best = (v, i, j);
            }
        }
    }
    let grid_theta = d_theta * best.1 as f64;
    let grid_phi = d_phi * best.2 as f64;

    let (mut value, mut theta, mut phi) = (best.0, grid_theta, grid_phi);
    let (mut step_theta, mut step_phi) = (d_theta, d_phi);
    for _ in 0..grid.refine_rounds {
        step_theta *= 0.5;
        step_phi *= 0.5;
        let mut incumbent = (value, theta, phi);
        for a in -2i32..=2 {
            for b in -2i32..=2 {
                if a == 0 && b == 0 {
                    continue;
                }
                let t = (theta + a as f64 * step_theta).clamp(0.0, PI);
                let f = (phi + b as f64 * step_phi).rem_euclid(2.0 * PI);
                let v = objective(t, f)?;
                if v > incumbent.0 {
                    incumbent = (v, t, f);
                }
            }
        }
        (value, theta, phi) = incumbent;
    }

    let phi_shift = {
        let raw = (phi - grid_phi).rem_euclid(2.0 * PI);
        raw.min(2.0 * PI - raw)
    };
    let grid_too_coarse =
        (theta - grid_theta).abs() > d_theta * (1.0 + 1e-12) || phi_shift > d_phi * (1.0 + 1e-12);

    Ok(OracleResult {
        classical: value,
        basis: MeasurementBasis { theta, phi },
        grid_basis: MeasurementBasis {
            theta: grid_theta,
            phi: grid_phi,
        },
        grid_too_coarse,
    })
}

/// S(ρ_A) + S(ρ_B) − S(ρ) from numerical spectra.
pub fn mutual_information_generic(rho: &DensityMatrix4) -> Result<f64> {
    let s_a = entropy_bits(&hermitian_eigenvalues_2x2(&rho.reduced_state(Side::A)))?;
    let s_b = entropy_bits(&hermitian_eigenvalues_2x2(&rho.reduced_state(Side::B)))?;
    Ok(s_a + s_b - rho.entropy()?)
}

/// Correlations computed entirely through the oracle route.
pub fn correlations_oracle(
    rho: &DensityMatrix4,
    grid: &OracleGrid,
) -> Result<(CorrelationTriple, OracleResult)> {
    let oracle = classical_correlation_oracle(rho, grid)?;
    let mutual = mutual_information_generic(rho)?;
    Ok((
        CorrelationTriple::from_total_and_classical(mutual, oracle.classical),
        oracle,
    ))
}
