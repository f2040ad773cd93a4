//! One- and two-dimensional parameter scans of the full pipeline
//! (couplings → drift/diffusion → stability → Lyapunov → squeezing).

use std::fmt;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{check_stability, LinearSystem, Stability, STABILITY_MARGIN};
use crate::error::{Error, Result};
use crate::model::{EffectiveCouplings, SystemParams, SINGULARITY_THRESHOLD};
use crate::squeezing::{minimize_variance, SqueezingResult};
use crate::steadystate::{solve_stable, RESIDUAL_TOLERANCE};

pub const DEFAULT_RATIO_MAX: f64 = 0.99;
pub const DEFAULT_1D_POINTS: usize = 200;
pub const DEFAULT_2D_POINTS: usize = 100;

/// A quantity that a sweep axis can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SweepParameter {
    /// G₊/G₋
    Ratio,
    Kappa,
    NTh,
    GMinus,
    /// g_i for well `0` or `1`.
    ExcitonCoupling(usize),
    ExcitonDecay(usize),
    ExcitonDetuning(usize),
}

impl SweepParameter {
    pub const NAMES: [&'static str; 10] = [
        "ratio",
        "kappa",
        "n_th",
        "g_minus",
        "g1",
        "g2",
        "gamma1",
        "gamma2",
        "delta_ex1",
        "delta_ex2",
    ];
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepParameter::Ratio => f.write_str("ratio"),
            SweepParameter::Kappa => f.write_str("kappa"),
            SweepParameter::NTh => f.write_str("n_th"),
            SweepParameter::GMinus => f.write_str("g_minus"),
            SweepParameter::ExcitonCoupling(i) => write!(f, "g{}", i + 1),
            SweepParameter::ExcitonDecay(i) => write!(f, "gamma{}", i + 1),
            SweepParameter::ExcitonDetuning(i) => write!(f, "delta_ex{}", i + 1),
        }
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ratio" => SweepParameter::Ratio,
            "kappa" => SweepParameter::Kappa,
            "n_th" => SweepParameter::NTh,
            "g_minus" => SweepParameter::GMinus,
            "g1" => SweepParameter::ExcitonCoupling(0),
            "g2" => SweepParameter::ExcitonCoupling(1),
            "gamma1" => SweepParameter::ExcitonDecay(0),
            "gamma2" => SweepParameter::ExcitonDecay(1),
            "delta_ex1" => SweepParameter::ExcitonDetuning(0),
            "delta_ex2" => SweepParameter::ExcitonDetuning(1),
            other => {
                return Err(Error::Config(format!(
                    "unknown sweep parameter `{other}`, expected one of {}",
                    Self::NAMES.join(", ")
                )))
            }
        })
    }
}

impl TryFrom<String> for SweepParameter {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SweepParameter> for String {
    fn from(p: SweepParameter) -> String {
        p.to_string()
    }
}

/// System parameters plus the dressed couplings, G₋ and G₊ = ratio·G₋.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub system: SystemParams,
    pub g_minus: f64,
    pub ratio: f64,
}

impl OperatingPoint {
    pub fn new(system: SystemParams, g_minus: f64, ratio: f64) -> Self {
        Self {
            system,
            g_minus,
            ratio,
        }
    }

    pub fn couplings(&self) -> EffectiveCouplings {
        EffectiveCouplings::from_ratio(self.g_minus, self.ratio)
    }

    pub fn with(mut self, parameter: SweepParameter, value: f64) -> Self {
        match parameter {
            SweepParameter::Ratio => self.ratio = value,
            SweepParameter::Kappa => self.system.kappa = value,
            SweepParameter::NTh => self.system.n_th = value,
            SweepParameter::GMinus => self.g_minus = value,
            SweepParameter::ExcitonCoupling(i) => self.system.excitons[i].coupling = value,
            SweepParameter::ExcitonDecay(i) => self.system.excitons[i].decay = value,
            SweepParameter::ExcitonDetuning(i) => self.system.excitons[i].detuning = value,
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        self.couplings().validate()
    }
}

/// Finite, strictly increasing list of axis values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Grid(Vec<f64>);

impl Grid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config("grid must contain at least one value".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("grid values must be finite".into()));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(
                "grid values must be strictly increasing".into(),
            ));
        }
        Ok(Self(values))
    }

    /// `points` evenly spaced values from `min` to `max` inclusive.
    pub fn linspace(min: f64, max: f64, points: usize) -> Result<Self> {
        match points {
            0 => Err(Error::Config("grid must contain at least one value".into())),
            1 => Self::new(vec![min]),
            n => {
                let step = (max - min) / (n - 1) as f64;
                let mut values: Vec<f64> = (0..n).map(|i| min + step * i as f64).collect();
                values[n - 1] = max;
                Self::new(values)
            }
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for Grid {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Grid::new(v)
    }
}

impl From<Grid> for Vec<f64> {
    fn from(g: Grid) -> Vec<f64> {
        g.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub parameter: SweepParameter,
    pub grid: Grid,
}

impl Axis {
    pub fn new(parameter: SweepParameter, grid: Grid) -> Self {
        Self { parameter, grid }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub base: OperatingPoint,
    pub axis1: Axis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis2: Option<Axis>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let axes = std::iter::once(&self.axis1).chain(self.axis2.as_ref());
        for axis in axes {
            if axis.parameter == SweepParameter::Ratio
                && axis.grid.values().iter().any(|&v| v < 0.0)
            {
                return Err(Error::Config("ratio grid values must be >= 0".into()));
            }
            // all parameter constraints are half-lines, so checking the ends suffices
            let g = axis.grid.values();
            for v in [g[0], g[g.len() - 1]] {
                self.base
                    .with(axis.parameter, v)
                    .validate()
                    .map_err(|e| Error::Config(format!("axis `{}` = {v}: {e}", axis.parameter)))?;
            }
        }
        if let Some(axis2) = &self.axis2 {
            if axis2.parameter == self.axis1.parameter {
                return Err(Error::Config(format!(
                    "both axes sweep `{}`",
                    axis2.parameter
                )));
            }
        }
        self.base
            .validate()
            .map_err(|e| Error::Config(e.to_string()))
    }

    pub fn point_count(&self) -> usize {
        self.axis1.grid.len() * self.axis2.as_ref().map_or(1, |a| a.grid.len())
    }

    /// Operating point at flat index `index`; axis1 varies fastest.
    pub fn point(&self, index: usize) -> OperatingPoint {
        let (i, j) = self.split_index(index);
        let mut p = self
            .base
            .with(self.axis1.parameter, self.axis1.grid.values()[i]);
        if let (Some(axis2), Some(j)) = (&self.axis2, j) {
            p = p.with(axis2.parameter, axis2.grid.values()[j]);
        }
        p
    }

    fn split_index(&self, index: usize) -> (usize, Option<usize>) {
        let n1 = self.axis1.grid.len();
        match self.axis2 {
            Some(_) => (index % n1, Some(index / n1)),
            None => (index, None),
        }
    }
}

/// Pipeline outcome at one operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointOutcome {
    pub stability: Stability,
    /// Largest real part of the drift spectrum, when it could be computed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    /// Present only for strictly stable points that solved cleanly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub squeezing: Option<SqueezingResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default)]
    pub conditioning_warning: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub axis1: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis2: Option<f64>,
    #[serde(flatten)]
    pub outcome: PointOutcome,
}

impl PointRecord {
    pub fn stability(&self) -> Stability {
        self.outcome.stability
    }

    pub fn squeezing(&self) -> Option<&SqueezingResult> {
        self.outcome.squeezing.as_ref()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub stability_margin: f64,
    pub lyapunov_residual: f64,
    pub singularity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            stability_margin: STABILITY_MARGIN,
            lyapunov_residual: RESIDUAL_TOLERANCE,
            singularity: SINGULARITY_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub spec: SweepSpec,
    pub timestamp_unix: u64,
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub metadata: SweepMetadata,
    /// Row-major over (axis2, axis1): axis1 varies fastest.
    pub records: Vec<PointRecord>,
    /// Set when no grid point was strictly stable.
    pub all_unstable: bool,
}

impl SweepResult {
    pub fn spec(&self) -> &SweepSpec {
        &self.metadata.spec
    }

    /// Records sharing the `j`-th axis2 value (the whole sweep for 1D).
    pub fn row(&self, j: usize) -> &[PointRecord] {
        let n1 = self.spec().axis1.grid.len();
        &self.records[j * n1..(j + 1) * n1]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[PointRecord]> {
        self.records.chunks(self.spec().axis1.grid.len())
    }
}

/// Worker configuration for [`run_sweep_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Execution {
    /// 0 = rayon's default pool, 1 = serial on the calling thread.
    pub threads: usize,
}

impl Execution {
    pub fn serial() -> Self {
        Self { threads: 1 }
    }

    pub fn threads(threads: usize) -> Self {
        Self { threads }
    }
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    run_sweep_with(spec, Execution::default())
}

pub fn run_sweep_with(spec: &SweepSpec, exec: Execution) -> Result<SweepResult> {
    spec.validate()?;
    let n = spec.point_count();
    let eval = |index: usize| evaluate_record(spec, index);
    let records: Vec<PointRecord> = match exec.threads {
        1 => (0..n).map(eval).collect(),
        0 => (0..n).into_par_iter().map(eval).collect(),
        t => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?
            .install(|| (0..n).into_par_iter().map(eval).collect()),
    };
    let all_unstable = records.iter().all(|r| r.stability() != Stability::Stable);
    Ok(SweepResult {
        metadata: SweepMetadata {
            spec: spec.clone(),
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            tolerances: Tolerances::default(),
        },
        records,
        all_unstable,
    })
}

fn evaluate_record(spec: &SweepSpec, index: usize) -> PointRecord {
    let (i, j) = spec.split_index(index);
    PointRecord {
        axis1: spec.axis1.grid.values()[i],
        axis2: j.and_then(|j| spec.axis2.as_ref().map(|a| a.grid.values()[j])),
        outcome: evaluate_point(&spec.point(index)),
    }
}

/// Runs the pipeline at one operating point. Failures are folded into the
/// outcome rather than returned.
pub fn evaluate_point(point: &OperatingPoint) -> PointOutcome {
    let mut outcome = PointOutcome {
        stability: Stability::Unstable,
        margin: None,
        squeezing: None,
        error: None,
        conditioning_warning: false,
    };
    let verdict = LinearSystem::new(&point.system, point.couplings())
        .and_then(|system| Ok((check_stability(&system.drift)?, system)));
    let (verdict, system) = match verdict {
        Ok(v) => v,
        Err(e) => {
            outcome.error = Some(e.to_string());
            return outcome;
        }
    };
    outcome.stability = verdict.class;
    outcome.margin = Some(verdict.margin);
    if !verdict.is_stable() {
        return outcome;
    }
    let solved = solve_stable(&system.drift, &system.diffusion).and_then(|sol| {
        outcome.conditioning_warning = sol.conditioning_warning();
        minimize_variance(&sol.covariance.mechanical_block())
    });
    match solved {
        Ok(s) => outcome.squeezing = Some(s),
        Err(e) => outcome.error = Some(e.to_string()),
    }
    outcome
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FigureId {
    Fig2a,
    Fig2b,
    Fig2c,
    Fig3a,
    Fig3b,
    Fig3c,
}

impl FigureId {
    pub const ALL: [FigureId; 6] = [
        FigureId::Fig2a,
        FigureId::Fig2b,
        FigureId::Fig2c,
        FigureId::Fig3a,
        FigureId::Fig3b,
        FigureId::Fig3c,
    ];

    pub fn n_th(self) -> f64 {
        match self {
            FigureId::Fig2a | FigureId::Fig3a => 0.0,
            FigureId::Fig2b | FigureId::Fig3b => 10.0,
            FigureId::Fig2c | FigureId::Fig3c => 50.0,
        }
    }

    /// Fig. 2 panels are curves (one per κ); Fig. 3 panels are heatmaps.
    pub fn is_heatmap(self) -> bool {
        matches!(self, FigureId::Fig3a | FigureId::Fig3b | FigureId::Fig3c)
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FigureId::Fig2a => "fig2a",
            FigureId::Fig2b => "fig2b",
            FigureId::Fig2c => "fig2c",
            FigureId::Fig3a => "fig3a",
            FigureId::Fig3b => "fig3b",
            FigureId::Fig3c => "fig3c",
        };
        f.write_str(s)
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.to_string() == s)
            .ok_or_else(|| Error::Config(format!("unknown figure `{s}`")))
    }
}

impl TryFrom<String> for FigureId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<FigureId> for String {
    fn from(f: FigureId) -> String {
        f.to_string()
    }
}

/// How to read the exciton–cavity coupling in the figure captions, which
/// print "g₁ = g₂ = 2 = ω_m".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaptionCoupling {
    /// g₁ = g₂ = 2ω_m
    #[default]
    TwoOmegaM,
    /// g₁ = g₂ = ω_m
    OmegaM,
}

impl CaptionCoupling {
    pub fn value(self) -> f64 {
        match self {
            CaptionCoupling::TwoOmegaM => 2.0,
            CaptionCoupling::OmegaM => 1.0,
        }
    }
}

/// κ values of the three Fig. 2 curves.
pub const FIG2_KAPPAS: [f64; 3] = [0.1, 1.0, 5.0];
/// Beam-splitter coupling used throughout the figures.
pub const CAPTION_G_MINUS: f64 = 0.1;

/// Sweep specification reproducing one figure panel.
pub fn figure_spec(figure: FigureId, coupling: CaptionCoupling) -> SweepSpec {
    let system = SystemParams::caption_with_exciton_coupling(
        FIG2_KAPPAS[0],
        figure.n_th(),
        coupling.value(),
    );
    let base = OperatingPoint::new(system, CAPTION_G_MINUS, 0.0);
    let (ratio_points, kappa_grid) = if figure.is_heatmap() {
        (
            DEFAULT_2D_POINTS,
            Grid::linspace(0.1, 5.0, DEFAULT_2D_POINTS).expect("static grid"),
        )
    } else {
        (
            DEFAULT_1D_POINTS,
            Grid::new(FIG2_KAPPAS.to_vec()).expect("static grid"),
        )
    };
    SweepSpec {
        base,
        axis1: Axis::new(
            SweepParameter::Ratio,
            Grid::linspace(0.0, DEFAULT_RATIO_MAX, ratio_points).expect("static grid"),
        ),
        axis2: Some(Axis::new(SweepParameter::Kappa, kappa_grid)),
    }
}

pub fn reproduce_figure(figure: FigureId) -> Result<SweepResult> {
    run_sweep(&figure_spec(figure, CaptionCoupling::default()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio_spec(values: Vec<f64>, kappa: f64, n_th: f64) -> SweepSpec {
        SweepSpec {
            base: OperatingPoint::new(SystemParams::caption(kappa, n_th), 0.1, 0.0),
            axis1: Axis::new(SweepParameter::Ratio, Grid::new(values).unwrap()),
            axis2: None,
        }
    }

    #[test]
    fn parameter_names_round_trip() {
        for name in SweepParameter::NAMES {
            let p: SweepParameter = name.parse().unwrap();
            assert_eq!(p.to_string(), name);
        }
        assert!("omega".parse::<SweepParameter>().is_err());
    }

    #[test]
    fn figure_names_round_trip() {
        for f in FigureId::ALL {
            assert_eq!(f.to_string().parse::<FigureId>().unwrap(), f);
        }
        assert!("fig4".parse::<FigureId>().is_err());
    }

    #[test]
    fn grid_invariants() {
        assert!(Grid::new(vec![]).is_err());
        assert!(Grid::new(vec![0.0, 0.0]).is_err());
        assert!(Grid::new(vec![1.0, 0.5]).is_err());
        assert!(Grid::new(vec![0.0, f64::INFINITY]).is_err());
        let g = Grid::linspace(0.0, 0.99, 200).unwrap();
        assert_eq!(g.len(), 200);
        assert_eq!(g.values()[0], 0.0);
        assert_eq!(g.values()[199], 0.99);
    }

    #[test]
    fn negative_ratio_rejected() {
        let spec = ratio_spec(vec![-0.1, 0.5], 0.1, 0.0);
        assert!(matches!(run_sweep(&spec), Err(Error::Config(_))));
    }

    #[test]
    fn duplicate_axes_rejected() {
        let mut spec = ratio_spec(vec![0.0, 0.5], 0.1, 0.0);
        spec.axis2 = Some(spec.axis1.clone());
        assert!(spec.validate().is_err());
    }

    #[test]
    fn invalid_axis_value_rejected() {
        let spec = SweepSpec {
            base: OperatingPoint::new(SystemParams::caption(0.1, 0.0), 0.1, 0.5),
            axis1: Axis::new(SweepParameter::Kappa, Grid::new(vec![-1.0, 1.0]).unwrap()),
            axis2: None,
        };
        assert!(spec.validate().is_err());
    }

    #[test]
    fn ratio_zero_is_vacuum() {
        let r = run_sweep(&ratio_spec(vec![0.0], 0.1, 0.0)).unwrap();
        assert_eq!(r.records.len(), 1);
        let s = r.records[0].squeezing().unwrap();
        assert!((s.s_min - 1.0).abs() < 1e-6, "{}", s.s_min);
    }

    #[test]
    fn unstable_points_have_no_values() {
        let r = run_sweep(&ratio_spec(vec![0.5, 3.0], 0.1, 0.0)).unwrap();
        assert!(r.records[0].squeezing().is_some());
        assert_eq!(r.records[1].stability(), Stability::Unstable);
        assert!(r.records[1].squeezing().is_none());
        assert!(!r.all_unstable);

        let r = run_sweep(&ratio_spec(vec![3.0, 4.0], 0.1, 0.0)).unwrap();
        assert!(r.all_unstable);
    }

    #[test]
    fn two_dimensional_layout() {
        let spec = SweepSpec {
            base: OperatingPoint::new(SystemParams::caption(0.1, 0.0), 0.1, 0.0),
            axis1: Axis::new(
                SweepParameter::Ratio,
                Grid::new(vec![0.0, 0.3, 0.6]).unwrap(),
            ),
            axis2: Some(Axis::new(
                SweepParameter::Kappa,
                Grid::new(vec![0.5, 2.0]).unwrap(),
            )),
        };
        let r = run_sweep(&spec).unwrap();
        assert_eq!(r.records.len(), 6);
        assert_eq!(r.row(1)[2].axis1, 0.6);
        assert_eq!(r.row(1)[2].axis2, Some(2.0));
        assert_eq!(r.rows().count(), 2);
        assert_eq!(spec.point(4).system.kappa, 2.0);
        assert_eq!(spec.point(4).ratio, 0.3);
    }

    #[test]
    fn figure_presets() {
        let f2 = figure_spec(FigureId::Fig2c, CaptionCoupling::default());
        assert_eq!(f2.base.system.n_th, 50.0);
        assert_eq!(f2.axis1.grid.len(), 200);
        assert_eq!(f2.axis2.as_ref().unwrap().grid.values(), &FIG2_KAPPAS);
        let f3 = figure_spec(FigureId::Fig3b, CaptionCoupling::OmegaM);
        assert_eq!(f3.base.system.n_th, 10.0);
        assert_eq!(f3.base.system.excitons[0].coupling, 1.0);
        assert_eq!(f3.point_count(), 100 * 100);
        assert!(f3.validate().is_ok());
    }
}
