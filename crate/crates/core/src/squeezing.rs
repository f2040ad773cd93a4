//! Mechanical quadrature variance and its minimum over the quadrature angle.
//!
//! Convention: ⟨X²⟩ = ⟨Y²⟩ = 1/2 in vacuum, so `S_min = 2·min_θ ⟨Q²(θ)⟩`
//! has vacuum level 1.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Variance of the 3 dB limit, half the vacuum level.
pub const THREE_DB_VARIANCE: f64 = 0.5;

/// Second moments of the mechanical quadratures X_b and Y_b.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MechanicalBlock {
    /// ⟨X_b²⟩
    pub v_q: f64,
    /// ⟨Y_b²⟩
    pub v_p: f64,
    /// ⟨X_b Y_b + Y_b X_b⟩/2
    pub v_qp: f64,
}

impl MechanicalBlock {
    pub fn new(v_q: f64, v_p: f64, v_qp: f64) -> Self {
        Self { v_q, v_p, v_qp }
    }

    /// Reads a 2×2 block, averaging the off-diagonal entries.
    pub fn from_matrix(m: &Matrix2<f64>) -> Self {
        Self {
            v_q: m[(0, 0)],
            v_p: m[(1, 1)],
            v_qp: 0.5 * (m[(0, 1)] + m[(1, 0)]),
        }
    }

    pub fn to_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.v_q, self.v_qp, self.v_qp, self.v_p)
    }

    pub fn determinant(&self) -> f64 {
        self.v_q * self.v_p - self.v_qp * self.v_qp
    }

    fn validate(&self) -> Result<()> {
        let finite = self.v_q.is_finite() && self.v_p.is_finite() && self.v_qp.is_finite();
        if !finite || self.v_q <= 0.0 || self.determinant() <= 0.0 {
            return Err(Error::domain(format!(
                "mechanical block is not positive definite: {self:?}"
            )));
        }
        Ok(())
    }

    /// Largest value of `2⟨Q²(θ)⟩`, the anti-squeezed partner of `S_min`.
    pub fn s_max(&self) -> f64 {
        self.v_q + self.v_p + self.spread()
    }

    fn spread(&self) -> f64 {
        let d = self.v_q - self.v_p;
        (d * d + 4.0 * self.v_qp * self.v_qp).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezingResult {
    pub v_q: f64,
    pub v_p: f64,
    pub v_qp: f64,
    pub s_min: f64,
    /// Minimizing quadrature angle in [0, π).
    pub theta_opt: f64,
    pub db: f64,
}

impl SqueezingResult {
    pub fn is_squeezed(&self) -> bool {
        self.s_min < 1.0
    }

    pub fn beats_three_db(&self) -> bool {
        self.s_min < THREE_DB_VARIANCE
    }
}

/// ⟨Q²(θ)⟩ for Q(θ) = X_b cos θ + Y_b sin θ.
pub fn quadrature_variance(block: &MechanicalBlock, theta: f64) -> Result<f64> {
    block.validate()?;
    let (s, c) = theta.sin_cos();
    Ok(block.v_q * c * c + block.v_p * s * s + 2.0 * block.v_qp * s * c)
}

/// Closed-form minimum `S_min = V_p + V_q − √((V_q − V_p)² + 4V_qp²)` and the
/// angle that attains it.
pub fn minimize_variance(block: &MechanicalBlock) -> Result<SqueezingResult> {
    block.validate()?;
    let s_min = block.v_q + block.v_p - block.spread();
    // ⟨Q²⟩ = mean + A cos 2θ + B sin 2θ, minimal where 2θ = atan2(B, A) + π.
    let a = 0.5 * (block.v_q - block.v_p);
    let b = block.v_qp;
    let theta_opt = if a == 0.0 && b == 0.0 {
        0.0
    } else {
        wrap_half_turn(0.5 * (b.atan2(a) + PI))
    };
    Ok(SqueezingResult {
        v_q: block.v_q,
        v_p: block.v_p,
        v_qp: block.v_qp,
        s_min,
        theta_opt,
        db: to_decibel(s_min)?,
    })
}

/// −10·log₁₀(S_min); positive values mean squeezing below vacuum.
pub fn to_decibel(s_min: f64) -> Result<f64> {
    if !(s_min > 0.0) {
        return Err(Error::domain(format!("variance must be > 0, got {s_min}")));
    }
    Ok(-10.0 * s_min.log10())
}

fn wrap_half_turn(theta: f64) -> f64 {
    let t = theta.rem_euclid(PI);
    if t >= PI {
        0.0
    } else {
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_is_isotropic() {
        let vac = MechanicalBlock::new(0.5, 0.5, 0.0);
        for theta in [0.0, 0.4, 1.3, 2.9] {
            assert!((quadrature_variance(&vac, theta).unwrap() - 0.5).abs() < 1e-15);
        }
        let r = minimize_variance(&vac).unwrap();
        assert_eq!(r.s_min, 1.0);
        assert_eq!(r.db, 0.0);
        assert_eq!(r.theta_opt, 0.0);
    }

    #[test]
    fn axis_quadratures() {
        let b = MechanicalBlock::new(0.8, 0.4, 0.1);
        assert!((quadrature_variance(&b, 0.0).unwrap() - 0.8).abs() < 1e-15);
        assert!((quadrature_variance(&b, PI / 2.0).unwrap() - 0.4).abs() < 1e-15);
        assert!((quadrature_variance(&b, PI / 4.0).unwrap() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn thermal_block() {
        let r = minimize_variance(&MechanicalBlock::new(50.5, 50.5, 0.0)).unwrap();
        assert_eq!(r.s_min, 101.0);
        assert!((r.db + 20.043_213_737_826_427).abs() < 1e-12, "{}", r.db);
    }

    #[test]
    fn decibel_values() {
        assert_eq!(to_decibel(1.0).unwrap(), 0.0);
        assert!((to_decibel(0.5).unwrap() - 3.010_299_956_639_812).abs() < 1e-12);
        assert!((to_decibel(0.25).unwrap() - 6.020_599_913_279_624).abs() < 1e-12);
        assert!(to_decibel(0.0).is_err());
        assert!(to_decibel(-1.0).is_err());
    }

    #[test]
    fn optimal_angle_attains_minimum() {
        let b = MechanicalBlock::new(0.8, 0.4, 0.1);
        let r = minimize_variance(&b).unwrap();
        let q = quadrature_variance(&b, r.theta_opt).unwrap();
        assert!((2.0 * q - r.s_min).abs() < 1e-12);
        assert!((0.0..PI).contains(&r.theta_opt));
    }

    #[test]
    fn three_db_flag() {
        let r = minimize_variance(&MechanicalBlock::new(0.2, 2.0, 0.0)).unwrap();
        assert!(r.is_squeezed() && r.beats_three_db());
        assert!((r.theta_opt - 0.0).abs() < 1e-15);
        let r = minimize_variance(&MechanicalBlock::new(2.0, 0.2, 0.0)).unwrap();
        assert!((r.theta_opt - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_positive_blocks() {
        assert!(minimize_variance(&MechanicalBlock::new(1.0, 1.0, 1.0)).is_err());
        assert!(minimize_variance(&MechanicalBlock::new(-1.0, -1.0, 0.0)).is_err());
        assert!(quadrature_variance(&MechanicalBlock::new(0.0, 1.0, 0.0), 0.0).is_err());
        assert!(minimize_variance(&MechanicalBlock::new(f64::NAN, 1.0, 0.0)).is_err());
    }
}
