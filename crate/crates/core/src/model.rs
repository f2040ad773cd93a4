//! Physical parameters of the hybrid cavity and the classical quantities
//! derived from them.
//!
//! Every rate and frequency is stored in units of the mechanical frequency,
//! so `omega_m` is 1.0 unless a caller deliberately rescales.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant in J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant in J/K.
pub const K_B: f64 = 1.380_649e-23;

/// Denominators with modulus below this are treated as exact poles.
pub const SINGULARITY_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExcitonParams {
    /// Exciton–cavity coupling g_i.
    pub coupling: f64,
    /// Spontaneous-emission rate γ_i.
    pub decay: f64,
    /// Exciton–mechanical detuning Δ_ex_i = ω_ex_i − ω_m.
    pub detuning: f64,
}

impl ExcitonParams {
    pub fn new(coupling: f64, decay: f64, detuning: f64) -> Self {
        Self {
            coupling,
            decay,
            detuning,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub omega_m: f64,
    /// Cavity amplitude decay rate κ.
    pub kappa: f64,
    /// Mechanical damping rate γ_m.
    pub gamma_m: f64,
    /// Single-photon optomechanical coupling g₀. Only used when the dressed
    /// couplings are derived from drive amplitudes.
    pub g0: f64,
    pub excitons: [ExcitonParams; 2],
    /// Mean thermal phonon number of the mechanical bath.
    pub n_th: f64,
}

impl SystemParams {
    /// Figure parameter set: g₁ = g₂ = 2, γ₁ = γ₂ = 2, Δ_ex1 = −Δ_ex2 = 1,
    /// γ_m = 10⁻⁵, with the given cavity decay and bath occupation.
    pub fn caption(kappa: f64, n_th: f64) -> Self {
        Self::caption_with_exciton_coupling(kappa, n_th, 2.0)
    }

    pub fn caption_with_exciton_coupling(kappa: f64, n_th: f64, g: f64) -> Self {
        Self {
            omega_m: 1.0,
            kappa,
            gamma_m: 1e-5,
            g0: 0.0,
            excitons: [
                ExcitonParams::new(g, 2.0, 1.0),
                ExcitonParams::new(g, 2.0, -1.0),
            ],
            n_th,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.omega_m, self.kappa, self.gamma_m, self.g0, self.n_th]
            .iter()
            .chain(
                self.excitons
                    .iter()
                    .flat_map(|e| [&e.coupling, &e.decay, &e.detuning]),
            )
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::domain("system parameters must be finite"));
        }
        if self.omega_m <= 0.0 {
            return Err(Error::domain(format!(
                "omega_m must be > 0, got {}",
                self.omega_m
            )));
        }
        if self.kappa <= 0.0 {
            return Err(Error::domain(format!(
                "kappa must be > 0, got {}",
                self.kappa
            )));
        }
        if self.gamma_m <= 0.0 {
            return Err(Error::domain(format!(
                "gamma_m must be > 0, got {}",
                self.gamma_m
            )));
        }
        if self.n_th < 0.0 {
            return Err(Error::domain(format!(
                "n_th must be >= 0, got {}",
                self.n_th
            )));
        }
        if self.g0 < 0.0 {
            return Err(Error::domain(format!("g0 must be >= 0, got {}", self.g0)));
        }
        for (i, e) in self.excitons.iter().enumerate() {
            if e.decay <= 0.0 {
                return Err(Error::domain(format!(
                    "exciton {} decay must be > 0, got {}",
                    i + 1,
                    e.decay
                )));
            }
        }
        Ok(())
    }
}

/// Real dressed couplings G₊ (two-mode squeezing) and G₋ (beam splitter).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveCouplings {
    pub plus: f64,
    pub minus: f64,
}

impl EffectiveCouplings {
    pub fn new(plus: f64, minus: f64) -> Self {
        Self { plus, minus }
    }

    /// G₊ = ratio · G₋.
    pub fn from_ratio(g_minus: f64, ratio: f64) -> Self {
        Self {
            plus: ratio * g_minus,
            minus: g_minus,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.plus.is_finite() && self.minus.is_finite()) || self.plus < 0.0 || self.minus < 0.0
        {
            return Err(Error::domain(format!(
                "effective couplings must be finite and >= 0, got G+ = {}, G- = {}",
                self.plus, self.minus
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sideband {
    /// ω₊ = ω_a + ω_m (blue tone).
    Plus,
    /// ω₋ = ω_a − ω_m (red tone).
    Minus,
}

impl fmt::Display for Sideband {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sideband::Plus => f.write_str("plus"),
            Sideband::Minus => f.write_str("minus"),
        }
    }
}

/// One laser tone of the bichromatic drive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveTone {
    pub sideband: Sideband,
    /// Drive amplitude ε in units of ω_m.
    pub amplitude: f64,
    /// Drive phase in radians. Only the magnitudes of the resulting
    /// amplitudes enter the dressed couplings.
    #[serde(default)]
    pub phase: f64,
}

impl DriveTone {
    pub fn new(sideband: Sideband, amplitude: f64) -> Self {
        Self {
            sideband,
            amplitude,
            phase: 0.0,
        }
    }

    fn complex_amplitude(&self) -> Complex64 {
        Complex64::from_polar(self.amplitude, self.phase)
    }
}

/// Detunings seen by one tone: cavity offset ω_a − ω_tone and per-well
/// exciton offsets Δ_tone,i = ω_ex_i − ω_tone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToneDetuning {
    pub cavity: f64,
    pub excitons: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToneDetunings {
    pub plus: ToneDetuning,
    pub minus: ToneDetuning,
}

impl ToneDetunings {
    /// Detunings for tones sitting exactly on the mechanical sidebands
    /// ω± = ω_a ± ω_m, given the exciton–cavity offsets ω_ex_i − ω_a.
    pub fn sidebands(omega_m: f64, exciton_cavity: [f64; 2]) -> Self {
        let shifted = |sign: f64| ToneDetuning {
            cavity: -sign * omega_m,
            excitons: exciton_cavity.map(|d| d - sign * omega_m),
        };
        Self {
            plus: shifted(1.0),
            minus: shifted(-1.0),
        }
    }

    fn for_sideband(&self, sideband: Sideband) -> &ToneDetuning {
        match sideband {
            Sideband::Plus => &self.plus,
            Sideband::Minus => &self.minus,
        }
    }
}

/// Classical intracavity and exciton amplitudes at both tones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyAmplitudes {
    pub a_plus: Complex64,
    pub a_minus: Complex64,
    pub c_plus: [Complex64; 2],
    pub c_minus: [Complex64; 2],
    pub couplings: EffectiveCouplings,
}

/// Mean thermal occupation for a bath at `temperature` (K) and a mode at
/// angular frequency `omega_m` (rad/s).
pub fn thermal_occupation(temperature: f64, omega_m: f64) -> Result<f64> {
    if !(temperature >= 0.0) || !temperature.is_finite() {
        return Err(Error::domain(format!(
            "temperature must be >= 0, got {temperature}"
        )));
    }
    if !(omega_m > 0.0) || !omega_m.is_finite() {
        return Err(Error::domain(format!("omega_m must be > 0, got {omega_m}")));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(bose_occupation(HBAR * omega_m / (K_B * temperature)))
}

/// Bose–Einstein occupation 1/(eˣ − 1) for x = ħω/k_BT > 0.
pub fn bose_occupation(x: f64) -> f64 {
    if x.is_infinite() {
        return 0.0;
    }
    1.0 / x.exp_m1()
}

/// Drive amplitude ε = √(κP/ħω) from laser power (W), cavity decay (rad/s)
/// and tone frequency (rad/s). The result is in s⁻¹.
pub fn drive_amplitude(power: f64, kappa: f64, tone_frequency: f64) -> Result<f64> {
    if !(power >= 0.0) || !power.is_finite() {
        return Err(Error::domain(format!("power must be >= 0, got {power}")));
    }
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(Error::domain(format!("kappa must be > 0, got {kappa}")));
    }
    if !(tone_frequency > 0.0) || !tone_frequency.is_finite() {
        return Err(Error::domain(format!(
            "tone frequency must be > 0, got {tone_frequency}"
        )));
    }
    Ok((kappa * power / (HBAR * tone_frequency)).sqrt())
}

/// Closed-form classical amplitudes a± and c±_i, and G± = g₀|a±|.
pub fn steady_amplitudes(
    params: &SystemParams,
    tones: &[DriveTone; 2],
    detunings: &ToneDetunings,
) -> Result<SteadyAmplitudes> {
    params.validate()?;
    if tones[0].sideband == tones[1].sideband {
        return Err(Error::domain(format!(
            "expected one plus and one minus tone, got two {} tones",
            tones[0].sideband
        )));
    }
    for tone in tones {
        if !(tone.amplitude >= 0.0) || !tone.amplitude.is_finite() {
            return Err(Error::domain(format!(
                "{} tone amplitude must be >= 0, got {}",
                tone.sideband, tone.amplitude
            )));
        }
    }

    let solve_tone = |sideband: Sideband| -> Result<(Complex64, [Complex64; 2])> {
        let tone = tones.iter().find(|t| t.sideband == sideband).unwrap();
        let det = detunings.for_sideband(sideband);
        let exciton_den: [Complex64; 2] =
            std::array::from_fn(|i| Complex64::new(params.excitons[i].decay, det.excitons[i]));
        let mut den = Complex64::new(params.kappa, det.cavity);
        for (e, d) in params.excitons.iter().zip(&exciton_den) {
            // γ_i > 0 keeps d away from zero.
            den += e.coupling * e.coupling / d;
        }
        if den.norm() < SINGULARITY_THRESHOLD {
            return Err(Error::Singular {
                tone: sideband,
                modulus: den.norm(),
            });
        }
        let a = tone.complex_amplitude() / den;
        let c = std::array::from_fn(|i| {
            -Complex64::i() * params.excitons[i].coupling * a / exciton_den[i]
        });
        Ok((a, c))
    };

    let (a_plus, c_plus) = solve_tone(Sideband::Plus)?;
    let (a_minus, c_minus) = solve_tone(Sideband::Minus)?;
    Ok(SteadyAmplitudes {
        a_plus,
        a_minus,
        c_plus,
        c_minus,
        couplings: EffectiveCouplings {
            plus: params.g0 * a_plus.norm(),
            minus: params.g0 * a_minus.norm(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resonant_detunings() -> ToneDetunings {
        let d = ToneDetuning {
            cavity: 0.0,
            excitons: [0.5, -0.5],
        };
        ToneDetunings { plus: d, minus: d }
    }

    fn tones(plus: f64, minus: f64) -> [DriveTone; 2] {
        [
            DriveTone::new(Sideband::Plus, plus),
            DriveTone::new(Sideband::Minus, minus),
        ]
    }

    #[test]
    fn zero_temperature_has_no_excitations() {
        assert_eq!(thermal_occupation(0.0, 1e7).unwrap(), 0.0);
    }

    #[test]
    fn ln2_gives_unit_occupation() {
        let omega = 2.0 * std::f64::consts::PI * 1e6;
        let t = HBAR * omega / (K_B * std::f64::consts::LN_2);
        let n = thermal_occupation(t, omega).unwrap();
        assert!((n - 1.0).abs() < 1e-12, "{n}");
    }

    #[test]
    fn small_argument_occupation() {
        // 1/(e^0.01 - 1) from the Laurent series 1/x - 1/2 + x/12 - x^3/720 + x^5/30240.
        let x: f64 = 0.01;
        let series = 1.0 / x - 0.5 + x / 12.0 - x.powi(3) / 720.0 + x.powi(5) / 30240.0;
        // high-precision reference: 99.500833331944447751...
        assert!((series - 99.500_833_331_944_45).abs() < 1e-9);
        assert!((bose_occupation(x) - series).abs() < 1e-10);
    }

    #[test]
    fn occupation_increases_with_temperature() {
        let omega = 1e7;
        let n: Vec<f64> = [1e-3, 1e-2, 1.0]
            .iter()
            .map(|&t| thermal_occupation(t, omega).unwrap())
            .collect();
        assert!(n[0] < n[1] && n[1] < n[2], "{n:?}");
    }

    #[test]
    fn thermal_occupation_rejects_bad_inputs() {
        assert!(matches!(
            thermal_occupation(-1.0, 1.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            thermal_occupation(1.0, 0.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn drive_amplitude_scaling() {
        assert_eq!(drive_amplitude(0.0, 1.0, 1.0).unwrap(), 0.0);
        let e1 = drive_amplitude(1e-3, 1e6, 1e15).unwrap();
        let e2 = drive_amplitude(2e-3, 1e6, 1e15).unwrap();
        assert!((e2 / e1 - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn drive_amplitude_reference_value() {
        let two_pi = 2.0 * std::f64::consts::PI;
        let kappa = two_pi * 1e6;
        let omega = two_pi * 400e12;
        // κP/ħω = 1e-3 * 1e6 / (400e12 * 1.054571817e-34) = 1e3 / 4.218287268e-20
        let expected = (1e3 / 4.218_287_268e-20f64).sqrt();
        let eps = drive_amplitude(1e-3, kappa, omega).unwrap();
        assert!((eps / expected - 1.0).abs() < 1e-9, "{eps} vs {expected}");
        // mpmath: 153968516004.7128926
        assert!((eps - 1.539_685_160_047_13e11).abs() / eps < 1e-12);
    }

    #[test]
    fn drive_amplitude_rejects_bad_inputs() {
        assert!(drive_amplitude(1.0, 0.0, 1.0).is_err());
        assert!(drive_amplitude(1.0, 1.0, -1.0).is_err());
        assert!(drive_amplitude(-1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn bare_resonant_cavity() {
        let mut p = SystemParams::caption(0.1, 0.0);
        p.excitons[0].coupling = 0.0;
        p.excitons[1].coupling = 0.0;
        p.g0 = 0.01;
        let amps = steady_amplitudes(&p, &tones(3.0, 1.0), &resonant_detunings()).unwrap();
        assert!((amps.a_plus - Complex64::new(30.0, 0.0)).norm() < 1e-12);
        assert!((amps.a_minus - Complex64::new(10.0, 0.0)).norm() < 1e-12);
        for c in amps.c_plus.iter().chain(&amps.c_minus) {
            assert_eq!(c.norm(), 0.0);
        }
        assert!((amps.couplings.plus - 0.3).abs() < 1e-12);
    }

    #[test]
    fn bare_cavity_lorentzian_off_resonance() {
        let mut p = SystemParams::caption(0.1, 0.0);
        p.excitons[0].coupling = 0.0;
        p.excitons[1].coupling = 0.0;
        let det = ToneDetunings::sidebands(1.0, [0.0, 0.0]);
        let amps = steady_amplitudes(&p, &tones(1.0, 1.0), &det).unwrap();
        assert_eq!(
            amps.a_plus,
            Complex64::new(1.0, 0.0) / Complex64::new(0.1, -1.0)
        );
        assert_eq!(
            amps.a_minus,
            Complex64::new(1.0, 0.0) / Complex64::new(0.1, 1.0)
        );
    }

    #[test]
    fn undriven_cavity_is_empty() {
        let mut p = SystemParams::caption(0.1, 0.0);
        p.g0 = 1e-3;
        let amps = steady_amplitudes(&p, &tones(0.0, 0.0), &resonant_detunings()).unwrap();
        assert_eq!(amps.a_plus.norm() + amps.a_minus.norm(), 0.0);
        assert_eq!(amps.couplings, EffectiveCouplings::new(0.0, 0.0));
    }

    #[test]
    fn caption_amplitude_matches_hand_evaluation() {
        // κ = 0.1, g = 2, γ = 2, exciton offsets from the cavity of ±1 at
        // the plus sideband: Δ₊₁ = 1 − 1 = 0, Δ₊₂ = −1 − 1 = −2; cavity offset −1.
        // self-energy: 4/(2) + 4/(2 − 2i) = 2 + (1 + i) = 3 + i
        // denominator: 0.1 − i + 3 + i = 3.1
        let p = SystemParams::caption(0.1, 0.0);
        let det = ToneDetunings::sidebands(1.0, [1.0, -1.0]);
        let amps = steady_amplitudes(&p, &tones(1.0, 1.0), &det).unwrap();
        assert!((amps.a_plus - Complex64::new(1.0 / 3.1, 0.0)).norm() < 1e-15);
        // minus sideband: Δ₋₁ = 2, Δ₋₂ = 0, cavity +1
        // 4/(2 + 2i) + 4/2 = (1 − i) + 2 = 3 − i ; den = 0.1 + i + 3 − i = 3.1
        assert!((amps.a_minus - Complex64::new(1.0 / 3.1, 0.0)).norm() < 1e-15);
        // c₊₁ = −i·2·a/(2) = −i a
        assert!((amps.c_plus[0] - Complex64::new(0.0, -1.0 / 3.1)).norm() < 1e-15);
    }

    #[test]
    fn coupling_magnitude_is_phase_invariant() {
        let mut p = SystemParams::caption(0.3, 0.0);
        p.g0 = 0.02;
        let det = ToneDetunings::sidebands(1.0, [0.7, -0.4]);
        let base = steady_amplitudes(&p, &tones(2.0, 1.5), &det).unwrap();
        for phase in [0.3, 1.7, -2.9] {
            let mut t = tones(2.0, 1.5);
            t[0].phase = phase;
            t[1].phase = phase;
            let rotated = steady_amplitudes(&p, &t, &det).unwrap();
            assert!((rotated.couplings.plus - base.couplings.plus).abs() < 1e-15);
            assert!((rotated.couplings.minus - base.couplings.minus).abs() < 1e-15);
        }
    }

    #[test]
    fn exciton_amplitude_vanishes_for_large_decay() {
        let det = ToneDetunings::sidebands(1.0, [1.0, -1.0]);
        let mut last = f64::INFINITY;
        for decay in [1.0, 1e2, 1e4, 1e6] {
            let mut p = SystemParams::caption(0.1, 0.0);
            p.excitons[0].decay = decay;
            p.excitons[1].decay = decay;
            let amps = steady_amplitudes(&p, &tones(1.0, 1.0), &det).unwrap();
            let c = amps.c_plus[0].norm();
            assert!(c < last);
            last = c;
        }
        assert!(last < 1e-5);
    }

    #[test]
    fn exact_pole_is_reported() {
        // bare cavity with κ below the singularity threshold, driven on resonance
        let mut p = SystemParams::caption(1e-14, 0.0);
        p.excitons[0].coupling = 0.0;
        p.excitons[1].coupling = 0.0;
        let det = ToneDetunings {
            plus: ToneDetuning {
                cavity: 0.0,
                excitons: [0.0, 0.0],
            },
            minus: ToneDetuning {
                cavity: 1.0,
                excitons: [0.0, 0.0],
            },
        };
        let err = steady_amplitudes(&p, &tones(1.0, 1.0), &det).unwrap_err();
        assert!(
            matches!(
                err,
                Error::Singular {
                    tone: Sideband::Plus,
                    ..
                }
            ),
            "{err}"
        );
    }

    #[test]
    fn duplicate_tones_rejected() {
        let p = SystemParams::caption(0.1, 0.0);
        let t = [
            DriveTone::new(Sideband::Plus, 1.0),
            DriveTone::new(Sideband::Plus, 1.0),
        ];
        assert!(steady_amplitudes(&p, &t, &resonant_detunings()).is_err());
    }

    #[test]
    fn validation_catches_bad_rates() {
        let mut p = SystemParams::caption(0.1, 0.0);
        p.kappa = 0.0;
        assert!(p.validate().is_err());
        let mut p = SystemParams::caption(0.1, 0.0);
        p.excitons[1].decay = -1.0;
        assert!(p.validate().is_err());
        let mut p = SystemParams::caption(0.1, 0.0);
        p.n_th = -0.5;
        assert!(p.validate().is_err());
        assert!(SystemParams::caption(0.1, 50.0).validate().is_ok());
    }
}
