//! JSON run configuration.
//!
//! All rates and frequencies are in units of ω_m. Unknown keys are
//! rejected everywhere. See `docs/config.md` for the full schema.

use std::path::Path;

use anyhow::{bail, Context};
use qwsqueeze_core::sweep::{CaptionCoupling, FigureId};
use qwsqueeze_core::{
    figure_spec, steady_amplitudes, Axis, DriveTone, ExcitonParams, Grid, OperatingPoint, Sideband,
    SweepParameter, SweepSpec, SystemParams, ToneDetunings,
};
use serde::{Deserialize, Serialize};

pub const DEFAULT_PRECISION: usize = 12;
pub const METADATA_KIND: &str = "qwsqueeze-sweep-metadata";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub drive: DriveConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub kappa: f64,
    pub gamma_m: f64,
    pub n_th: f64,
    #[serde(default)]
    pub g0: f64,
    /// Shorthand for γ₁ = γ₂ when the exciton entries omit `gamma`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exciton_gamma: Option<f64>,
    pub excitons: [ExcitonConfig; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExcitonConfig {
    pub g: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    pub delta_ex: f64,
}

/// Either the dressed couplings directly (`g_minus` with `ratio` or
/// `g_plus`), or drive `tones` from which they are derived.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_minus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g_plus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tones: Option<TonesConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TonesConfig {
    pub epsilon_plus: f64,
    pub epsilon_minus: f64,
    #[serde(default)]
    pub phase_plus: f64,
    #[serde(default)]
    pub phase_minus: f64,
    pub detunings: ToneDetunings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis1: AxisConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis2: Option<AxisConfig>,
}

/// An axis is given either as explicit `values` or as `min`/`max`/`points`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisConfig {
    pub parameter: SweepParameter,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
    #[default]
    Both,
}

/// Layout of the plot-data files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlotLayout {
    /// Curves for 1D sweeps, a matrix for 2D sweeps.
    #[default]
    Auto,
    /// One x/y file per axis2 value.
    Curves,
    Heatmap,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_precision")]
    pub precision: usize,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub plot: PlotLayout,
    #[serde(default = "default_stem")]
    pub stem: String,
}

fn default_precision() -> usize {
    DEFAULT_PRECISION
}

fn default_stem() -> String {
    "sweep".into()
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            precision: DEFAULT_PRECISION,
            format: OutputFormat::default(),
            plot: PlotLayout::default(),
            stem: default_stem(),
        }
    }
}

impl SystemConfig {
    pub fn from_params(p: &SystemParams) -> Self {
        Self {
            kappa: p.kappa,
            gamma_m: p.gamma_m,
            n_th: p.n_th,
            g0: p.g0,
            exciton_gamma: None,
            excitons: p.excitons.map(|e| ExcitonConfig {
                g: e.coupling,
                gamma: Some(e.decay),
                delta_ex: e.detuning,
            }),
        }
    }

    pub fn to_params(&self) -> anyhow::Result<SystemParams> {
        let mut excitons = [ExcitonParams::new(0.0, 0.0, 0.0); 2];
        for (i, (dst, e)) in excitons.iter_mut().zip(&self.excitons).enumerate() {
            let decay = match (e.gamma, self.exciton_gamma) {
                (Some(g), _) | (None, Some(g)) => g,
                (None, None) => bail!(
                    "exciton {} has no `gamma` and system.exciton_gamma is not set",
                    i + 1
                ),
            };
            *dst = ExcitonParams::new(e.g, decay, e.delta_ex);
        }
        let p = SystemParams {
            omega_m: 1.0,
            kappa: self.kappa,
            gamma_m: self.gamma_m,
            g0: self.g0,
            excitons,
            n_th: self.n_th,
        };
        p.validate()?;
        Ok(p)
    }
}

impl DriveConfig {
    /// Resolves the drive to (G₋, G₊/G₋).
    pub fn resolve(&self, system: &SystemParams) -> anyhow::Result<(f64, f64)> {
        let direct = self.g_minus.is_some() || self.ratio.is_some() || self.g_plus.is_some();
        match (direct, &self.tones) {
            (true, Some(_)) => {
                bail!("drive: give either `g_minus` with `ratio`/`g_plus`, or `tones`, not both")
            }
            (false, None) => bail!("drive: missing drive specification (`g_minus` or `tones`)"),
            (false, Some(tones)) => {
                let t = [
                    DriveTone {
                        sideband: Sideband::Plus,
                        amplitude: tones.epsilon_plus,
                        phase: tones.phase_plus,
                    },
                    DriveTone {
                        sideband: Sideband::Minus,
                        amplitude: tones.epsilon_minus,
                        phase: tones.phase_minus,
                    },
                ];
                let amps = steady_amplitudes(system, &t, &tones.detunings)?;
                let c = amps.couplings;
                if c.minus <= 0.0 {
                    bail!("drive: derived G- is zero, so the ratio G+/G- is undefined");
                }
                Ok((c.minus, c.plus / c.minus))
            }
            (true, None) => {
                let g_minus = self
                    .g_minus
                    .context("drive: `g_minus` is required with `ratio`/`g_plus`")?;
                let ratio = match (self.ratio, self.g_plus) {
                    (Some(r), None) => r,
                    (None, Some(gp)) => {
                        if g_minus <= 0.0 {
                            bail!("drive: `g_plus` needs g_minus > 0; use `ratio` instead");
                        }
                        gp / g_minus
                    }
                    (Some(_), Some(_)) => bail!("drive: give `ratio` or `g_plus`, not both"),
                    (None, None) => bail!("drive: missing `ratio` or `g_plus`"),
                };
                if !(g_minus >= 0.0 && ratio >= 0.0) {
                    bail!("drive: couplings must be >= 0 (g_minus = {g_minus}, ratio = {ratio})");
                }
                Ok((g_minus, ratio))
            }
        }
    }
}

impl AxisConfig {
    pub fn from_axis(axis: &Axis) -> Self {
        Self {
            parameter: axis.parameter,
            values: Some(axis.grid.values().to_vec()),
            min: None,
            max: None,
            points: None,
        }
    }

    pub fn to_axis(&self) -> anyhow::Result<Axis> {
        let grid = match (&self.values, self.min, self.max, self.points) {
            (Some(v), None, None, None) => Grid::new(v.clone())?,
            (None, Some(min), Some(max), Some(points)) => Grid::linspace(min, max, points)?,
            _ => bail!(
                "axis `{}`: give either `values` or all of `min`, `max`, `points`",
                self.parameter
            ),
        };
        Ok(Axis::new(self.parameter, grid))
    }
}

impl OutputConfig {
    pub fn validate(&self) -> anyhow::Result<()> {
        if !(6..=17).contains(&self.precision) {
            bail!(
                "output.precision must be within [6, 17], got {}",
                self.precision
            );
        }
        if self.stem.is_empty() || self.stem.contains(['/', '\\']) {
            bail!("output.stem must be a plain file name, got {:?}", self.stem);
        }
        Ok(())
    }
}

impl RunConfig {
    /// Parses JSON text. Serde diagnostics carry line and column.
    pub fn from_json(text: &str) -> anyhow::Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.output.validate()?;
        Ok(cfg)
    }

    /// Loads either a run configuration or a sweep metadata sidecar, whose
    /// embedded `config` is returned.
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let parsed = if is_metadata(&text) {
            let meta: MetadataFile = serde_json::from_str(&text)?;
            meta.config.output.validate()?;
            Ok(meta.config)
        } else {
            Self::from_json(&text)
        };
        parsed.with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn operating_point(&self) -> anyhow::Result<OperatingPoint> {
        let system = self.system.to_params()?;
        let (g_minus, ratio) = self.drive.resolve(&system)?;
        Ok(OperatingPoint::new(system, g_minus, ratio))
    }

    pub fn sweep_spec(&self) -> anyhow::Result<SweepSpec> {
        let sweep = self
            .sweep
            .as_ref()
            .context("config has no `sweep` section")?;
        let spec = SweepSpec {
            base: self.operating_point()?,
            axis1: sweep.axis1.to_axis()?,
            axis2: sweep.axis2.as_ref().map(AxisConfig::to_axis).transpose()?,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Self-contained configuration equivalent to `spec`, with every grid
    /// spelled out as explicit values.
    pub fn from_spec(spec: &SweepSpec, output: OutputConfig) -> Self {
        Self {
            system: SystemConfig::from_params(&spec.base.system),
            drive: DriveConfig {
                g_minus: Some(spec.base.g_minus),
                ratio: Some(spec.base.ratio),
                ..Default::default()
            },
            sweep: Some(SweepConfig {
                axis1: AxisConfig::from_axis(&spec.axis1),
                axis2: spec.axis2.as_ref().map(AxisConfig::from_axis),
            }),
            output,
        }
    }

    /// Caption preset for one figure panel.
    pub fn figure(figure: FigureId, coupling: CaptionCoupling, output: OutputConfig) -> Self {
        let plot = if figure.is_heatmap() {
            PlotLayout::Heatmap
        } else {
            PlotLayout::Curves
        };
        let stem = figure.to_string();
        Self::from_spec(
            &figure_spec(figure, coupling),
            OutputConfig {
                plot,
                stem,
                ..output
            },
        )
    }
}

/// On-disk layout of the `<stem>.meta.json` sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetadataFile {
    pub kind: String,
    /// Resolved configuration; enough to re-run the identical sweep.
    pub config: RunConfig,
    pub sweep: qwsqueeze_core::sweep::SweepMetadata,
    pub point_count: usize,
    pub stable_points: usize,
    pub all_unstable: bool,
    pub files: Vec<String>,
}

fn is_metadata(text: &str) -> bool {
    #[derive(Deserialize)]
    struct Probe {
        kind: Option<String>,
    }
    serde_json::from_str::<Probe>(text)
        .ok()
        .and_then(|p| p.kind)
        .is_some_and(|k| k == METADATA_KIND)
}
