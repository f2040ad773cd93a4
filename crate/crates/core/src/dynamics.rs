//! Linearized quadrature dynamics: drift and diffusion matrices, and the
//! spectral stability test.
//!
//! Quadratures are ordered `(X_b, Y_b, X_a, Y_a, X_c1, Y_c1, X_c2, Y_c2)`
//! with `X = (o† + o)/√2` and `Y = i(o† − o)/√2`.

use nalgebra::{Matrix2, SMatrix, Schur};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EffectiveCouplings, SystemParams};

pub const DIM: usize = 8;

pub type Matrix8 = SMatrix<f64, DIM, DIM>;

/// Eigenvalues with real part at or above `-STABILITY_MARGIN` are not
/// considered strictly stable.
pub const STABILITY_MARGIN: f64 = 1e-12;

const SCHUR_MAX_ITERATIONS: usize = 10_000;

/// One bosonic mode of the hybrid system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Mechanical,
    Cavity,
    Exciton1,
    Exciton2,
}

impl Mode {
    pub const ALL: [Mode; 4] = [
        Mode::Mechanical,
        Mode::Cavity,
        Mode::Exciton1,
        Mode::Exciton2,
    ];

    /// Index of the mode's X quadrature; Y follows at `offset() + 1`.
    pub fn offset(self) -> usize {
        match self {
            Mode::Mechanical => 0,
            Mode::Cavity => 2,
            Mode::Exciton1 => 4,
            Mode::Exciton2 => 6,
        }
    }

    /// 2×2 diagonal block of an 8×8 matrix belonging to this mode.
    pub fn block(self, m: &Matrix8) -> Matrix2<f64> {
        m.fixed_view::<2, 2>(self.offset(), self.offset())
            .into_owned()
    }
}

/// Drift and diffusion of the quadrature fluctuations, u̇ = R u + noise.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub drift: Matrix8,
    pub diffusion: Matrix8,
}

impl LinearSystem {
    pub fn new(params: &SystemParams, couplings: EffectiveCouplings) -> Result<Self> {
        Ok(Self {
            drift: build_drift(params, couplings)?,
            diffusion: build_diffusion(params)?,
        })
    }
}

/// Drift matrix of the linearized two-tone dynamics.
///
/// The mechanics couples to the cavity through the combinations G₋ + G₊
/// (X_a → Y_b, X_b → Y_a) and G₋ − G₊ (Y_a → X_b, Y_b → X_a). Each exciton
/// block rotates at Δ_ex_i and exchanges energy with the cavity at rate g_i.
pub fn build_drift(params: &SystemParams, couplings: EffectiveCouplings) -> Result<Matrix8> {
    params.validate()?;
    couplings.validate()?;

    let sum = couplings.minus + couplings.plus;
    let diff = couplings.minus - couplings.plus;
    let (xb, yb, xa, ya) = (0, 1, 2, 3);

    let mut r = Matrix8::zeros();
    r[(xb, xb)] = -params.gamma_m;
    r[(yb, yb)] = -params.gamma_m;
    r[(xa, xa)] = -params.kappa;
    r[(ya, ya)] = -params.kappa;

    r[(xb, ya)] = -diff;
    r[(yb, xa)] = sum;
    r[(xa, yb)] = -diff;
    r[(ya, xb)] = sum;

    for (exciton, mode) in params.excitons.iter().zip([Mode::Exciton1, Mode::Exciton2]) {
        let (xc, yc) = (mode.offset(), mode.offset() + 1);
        r[(xc, xc)] = -exciton.decay;
        r[(yc, yc)] = -exciton.decay;
        r[(xc, yc)] = exciton.detuning;
        r[(yc, xc)] = -exciton.detuning;

        r[(xa, xc)] = exciton.coupling;
        r[(ya, yc)] = exciton.coupling;
        r[(xc, xa)] = -exciton.coupling;
        r[(yc, ya)] = -exciton.coupling;
    }
    Ok(r)
}

/// Diagonal diffusion matrix: γ_m(2n_th + 1) on the mechanics, the bare
/// decay rates on the vacuum-driven cavity and exciton quadratures.
pub fn build_diffusion(params: &SystemParams) -> Result<Matrix8> {
    params.validate()?;
    let thermal = params.gamma_m * (2.0 * params.n_th + 1.0);
    let [e1, e2] = params.excitons;
    Ok(Matrix8::from_diagonal(
        &nalgebra::SVector::<f64, DIM>::from([
            thermal,
            thermal,
            params.kappa,
            params.kappa,
            e1.decay,
            e1.decay,
            e2.decay,
            e2.decay,
        ]),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stability {
    /// Every eigenvalue has real part below `-STABILITY_MARGIN`.
    Stable,
    /// Largest real part lies in `[-STABILITY_MARGIN, 0)`.
    Marginal,
    Unstable,
}

impl Stability {
    pub fn as_str(self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Marginal => "marginal",
            Stability::Unstable => "unstable",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityVerdict {
    pub class: Stability,
    /// Real parts of the eight eigenvalues, sorted descending.
    pub eigen_real_parts: [f64; DIM],
    /// Largest real part.
    pub margin: f64,
}

impl StabilityVerdict {
    pub fn from_real_parts(mut real_parts: [f64; DIM]) -> Self {
        real_parts.sort_by(|a, b| b.total_cmp(a));
        let margin = real_parts[0];
        let class = if margin < -STABILITY_MARGIN {
            Stability::Stable
        } else if margin < 0.0 {
            Stability::Marginal
        } else {
            Stability::Unstable
        };
        Self {
            class,
            eigen_real_parts: real_parts,
            margin,
        }
    }

    pub fn is_stable(&self) -> bool {
        self.class == Stability::Stable
    }
}

/// Routh–Hurwitz test done spectrally: real Schur decomposition of the
/// drift matrix (Hessenberg reduction followed by shifted QR).
pub fn check_stability(drift: &Matrix8) -> Result<StabilityVerdict> {
    if drift.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain("drift matrix has non-finite entries"));
    }
    let schur = Schur::try_new(*drift, f64::EPSILON, SCHUR_MAX_ITERATIONS).ok_or_else(|| {
        Error::EigenNoConvergence {
            iterations: SCHUR_MAX_ITERATIONS,
            matrix: format!("{:?}", drift.as_slice()),
        }
    })?;
    let eigenvalues = schur.complex_eigenvalues();
    let mut real_parts = [0.0; DIM];
    for (dst, ev) in real_parts.iter_mut().zip(eigenvalues.iter()) {
        *dst = ev.re;
    }
    if real_parts.iter().any(|v| v.is_nan()) {
        return Err(Error::EigenNoConvergence {
            iterations: SCHUR_MAX_ITERATIONS,
            matrix: format!("{:?}", drift.as_slice()),
        });
    }
    Ok(StabilityVerdict::from_real_parts(real_parts))
}
