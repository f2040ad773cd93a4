//! Stationary covariance of the linear Gaussian dynamics.
//!
//! The primary route solves R𝒱 + 𝒱Rᵀ + 𝒩 = 0 directly. The covariance ODE
//! integrator is kept alongside it as an independent cross-check.

use nalgebra::{DMatrix, DVector, Matrix2};

use crate::dynamics::{check_stability, Matrix8, Mode, DIM};
use crate::error::{Error, Result};
use crate::squeezing::MechanicalBlock;

/// Required relative Lyapunov residual ‖R𝒱 + 𝒱Rᵀ + 𝒩‖_F / ‖𝒩‖_F.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
/// Relative asymmetry of the raw solution above which a conditioning
/// warning is raised.
pub const ASYMMETRY_WARNING: f64 = 1e-8;
/// Heisenberg bound for a single-mode block in the ⟨X²⟩_vac = 1/2 convention.
pub const HEISENBERG_DET: f64 = 0.25;

const MAX_REFINEMENTS: usize = 3;

/// Symmetric 8×8 quadrature covariance 𝒱_ij = ⟨u_i u_j + u_j u_i⟩/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix(Matrix8);

impl CovarianceMatrix {
    /// Wraps `m`, replacing it by its symmetric part.
    pub fn new(m: Matrix8) -> Self {
        Self((m + m.transpose()) * 0.5)
    }

    /// Vacuum state of all four modes, 𝒱 = I/2.
    pub fn vacuum() -> Self {
        Self(Matrix8::identity() * 0.5)
    }

    pub fn matrix(&self) -> &Matrix8 {
        &self.0
    }

    pub fn mode_block(&self, mode: Mode) -> Matrix2<f64> {
        mode.block(&self.0)
    }

    pub fn mechanical_block(&self) -> MechanicalBlock {
        MechanicalBlock::from_matrix(&self.mode_block(Mode::Mechanical))
    }

    pub fn is_positive_definite(&self) -> bool {
        self.0.cholesky().is_some()
    }

    /// Determinants of the four single-mode 2×2 blocks.
    pub fn mode_determinants(&self) -> [f64; 4] {
        Mode::ALL.map(|m| self.mode_block(m).determinant())
    }

    /// Positive definite and every single-mode block satisfies det ≥ 1/4 − `slack`.
    pub fn is_physical(&self, slack: f64) -> bool {
        self.is_positive_definite()
            && self
                .mode_determinants()
                .iter()
                .all(|&d| d >= HEISENBERG_DET - slack)
    }
}

/// Lyapunov residual R𝒱 + 𝒱Rᵀ + 𝒩.
pub fn lyapunov_residual(drift: &Matrix8, diffusion: &Matrix8, v: &Matrix8) -> Matrix8 {
    drift * v + v * drift.transpose() + diffusion
}

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovSolution {
    pub covariance: CovarianceMatrix,
    /// ‖R𝒱 + 𝒱Rᵀ + 𝒩‖_F / ‖𝒩‖_F of the symmetrized result.
    pub relative_residual: f64,
    /// ‖𝒱 − 𝒱ᵀ‖_F / ‖𝒱‖_F before symmetrization.
    pub asymmetry: f64,
}

impl LyapunovSolution {
    pub fn conditioning_warning(&self) -> bool {
        self.asymmetry > ASYMMETRY_WARNING
    }
}

/// Steady-state covariance for a strictly stable drift matrix.
pub fn solve_lyapunov(drift: &Matrix8, diffusion: &Matrix8) -> Result<LyapunovSolution> {
    let verdict = check_stability(drift)?;
    if !verdict.is_stable() {
        return Err(Error::Unstable {
            margin: verdict.margin,
        });
    }
    solve_stable(drift, diffusion)
}

/// Kronecker-vectorized solve, (I⊗R + R⊗I) vec(𝒱) = −vec(𝒩), by LU with
/// partial pivoting. Assumes the caller already checked stability.
pub(crate) fn solve_stable(drift: &Matrix8, diffusion: &Matrix8) -> Result<LyapunovSolution> {
    const N: usize = DIM * DIM;
    let mut kron = DMatrix::<f64>::zeros(N, N);
    // column-major vec: index(i, j) = i + DIM * j
    for j in 0..DIM {
        for i in 0..DIM {
            let row = i + DIM * j;
            for k in 0..DIM {
                kron[(row, k + DIM * j)] += drift[(i, k)];
                kron[(row, i + DIM * k)] += drift[(j, k)];
            }
        }
    }
    let lu = kron.lu();
    let rhs = DVector::from_iterator(N, diffusion.iter().map(|v| -v));
    let raw = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Conditioning("singular Kronecker system".into()))?;
    let mut v = Matrix8::from_column_slice(raw.as_slice());

    let scale = diffusion.norm();
    let rel = |v: &Matrix8| {
        let r = lyapunov_residual(drift, diffusion, v).norm();
        if scale > 0.0 {
            r / scale
        } else {
            r
        }
    };

    let mut refinements = 0;
    while rel(&v) > RESIDUAL_TOLERANCE && refinements < MAX_REFINEMENTS {
        let r = lyapunov_residual(drift, diffusion, &v);
        let rhs = DVector::from_iterator(N, r.iter().map(|x| -x));
        let delta = lu
            .solve(&rhs)
            .ok_or_else(|| Error::Conditioning("singular Kronecker system".into()))?;
        v += Matrix8::from_column_slice(delta.as_slice());
        refinements += 1;
    }

    let norm = v.norm();
    let asymmetry = if norm > 0.0 {
        (v - v.transpose()).norm() / norm
    } else {
        0.0
    };
    let covariance = CovarianceMatrix::new(v);
    let relative_residual = rel(covariance.matrix());
    if !(relative_residual <= RESIDUAL_TOLERANCE) {
        return Err(Error::Conditioning(format!(
            "relative residual {relative_residual:e} exceeds {RESIDUAL_TOLERANCE:e}"
        )));
    }
    Ok(LyapunovSolution {
        covariance,
        relative_residual,
        asymmetry,
    })
}

/// Fixed-step settings for the covariance ODE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub dt: f64,
    pub t_max: f64,
    pub max_steps: u64,
    /// Stop once ‖d𝒱/dt‖_F drops below this.
    pub tolerance: f64,
}

impl OdeOptions {
    pub const DEFAULT_DT: f64 = 1e-2;
    pub const DEFAULT_MAX_STEPS: u64 = 10_000_000;
    pub const DEFAULT_TOLERANCE: f64 = 1e-12;

    /// dt = 10⁻², horizon 10/γ_m, at most 10⁷ steps.
    pub fn for_mechanical_damping(gamma_m: f64) -> Self {
        Self {
            dt: Self::DEFAULT_DT,
            t_max: 10.0 / gamma_m,
            max_steps: Self::DEFAULT_MAX_STEPS,
            tolerance: Self::DEFAULT_TOLERANCE,
        }
    }
}

/// Integrates d𝒱/dt = R𝒱 + 𝒱Rᵀ + 𝒩 from `v0` with classical RK4 until the
/// derivative norm falls below `opts.tolerance`.
pub fn integrate_to_steady_state(
    drift: &Matrix8,
    diffusion: &Matrix8,
    v0: &CovarianceMatrix,
    opts: &OdeOptions,
) -> Result<CovarianceMatrix> {
    if !(opts.dt > 0.0) || !opts.dt.is_finite() {
        return Err(Error::domain(format!("dt must be > 0, got {}", opts.dt)));
    }
    let verdict = check_stability(drift)?;
    if !verdict.is_stable() {
        return Err(Error::Unstable {
            margin: verdict.margin,
        });
    }

    let rhs = |v: &Matrix8| {
        let rv = drift * v;
        rv + rv.transpose() + diffusion
    };

    let steps = ((opts.t_max / opts.dt).ceil().max(0.0) as u64).min(opts.max_steps);
    let dt = opts.dt;
    let mut v = *v0.matrix();
    let mut k1 = rhs(&v);
    for _ in 0..steps {
        if k1.norm() < opts.tolerance {
            return Ok(CovarianceMatrix::new(v));
        }
        let k2 = rhs(&(v + k1 * (0.5 * dt)));
        let k3 = rhs(&(v + k2 * (0.5 * dt)));
        let k4 = rhs(&(v + k3 * dt));
        v += (k1 + (k2 + k3) * 2.0 + k4) * (dt / 6.0);
        k1 = rhs(&v);
    }
    let residual = k1.norm();
    if residual < opts.tolerance {
        return Ok(CovarianceMatrix::new(v));
    }
    Err(Error::NonConvergence {
        time: steps as f64 * dt,
        residual,
    })
}
