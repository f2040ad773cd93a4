use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use qwsqueeze_core::{
    check_stability, minimize_variance, run_sweep_with, solve_lyapunov, Execution, LinearSystem,
    Stability, SweepResult,
};
use serde_json::{json, Map, Value};

use crate::config::{MetadataFile, OutputFormat, PlotLayout, RunConfig, METADATA_KIND};
use crate::output::{curve_text, format_number, heatmap_text, write_csv};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const ERROR: i32 = 1;
    /// Point evaluation refused because the drift is not strictly stable.
    pub const UNSTABLE: i32 = 2;
}

fn rounded(x: f64, precision: usize) -> Value {
    json!(format_number(x, precision).parse::<f64>().unwrap_or(x))
}

/// Evaluates one operating point and writes a JSON record to `out`.
/// Returns the exit code.
pub fn cmd_point<W: Write>(cfg: &RunConfig, mut out: W) -> anyhow::Result<i32> {
    if cfg.sweep.is_some() {
        bail!("`point` takes a config without a `sweep` section; use `sweep` instead");
    }
    let p = cfg.output.precision;
    let op = cfg.operating_point()?;
    let system = LinearSystem::new(&op.system, op.couplings())?;
    let verdict = check_stability(&system.drift)?;

    let mut record = Map::new();
    record.insert("stable".into(), json!(verdict.is_stable()));
    record.insert("stability".into(), json!(verdict.class.as_str()));
    record.insert("margin".into(), rounded(verdict.margin, p));
    record.insert(
        "eigen_real_parts".into(),
        Value::Array(
            verdict
                .eigen_real_parts
                .iter()
                .map(|&x| rounded(x, p))
                .collect(),
        ),
    );
    record.insert("G_minus".into(), rounded(op.g_minus, p));
    record.insert("ratio".into(), rounded(op.ratio, p));

    let code = if verdict.is_stable() {
        let sol = solve_lyapunov(&system.drift, &system.diffusion)?;
        if sol.conditioning_warning() {
            eprintln!(
                "warning: Lyapunov solution asymmetry {:e} indicates ill-conditioning",
                sol.asymmetry
            );
        }
        let s = minimize_variance(&sol.covariance.mechanical_block())?;
        for (key, value) in [
            ("S_min", s.s_min),
            ("dB", s.db),
            ("V_q", s.v_q),
            ("V_p", s.v_p),
            ("V_qp", s.v_qp),
            ("theta_opt", s.theta_opt),
        ] {
            record.insert(key.into(), rounded(value, p));
        }
        exit::SUCCESS
    } else {
        exit::UNSTABLE
    };
    serde_json::to_writer_pretty(&mut out, &Value::Object(record))?;
    writeln!(out)?;
    Ok(code)
}

/// Summary of a completed sweep command.
#[derive(Debug)]
pub struct SweepReport {
    pub result: SweepResult,
    pub files: Vec<PathBuf>,
}

/// Runs the sweep described by `cfg` and writes its CSV, JSON, metadata and
/// plot-data files into `out_dir`.
pub fn cmd_sweep(cfg: &RunConfig, out_dir: &Path, threads: usize) -> anyhow::Result<SweepReport> {
    cfg.output.validate()?;
    let spec = cfg.sweep_spec()?;
    let result = run_sweep_with(&spec, Execution::threads(threads))?;
    if result.all_unstable {
        eprintln!("warning: no grid point is strictly stable");
    }

    fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;
    let stem = &cfg.output.stem;
    let precision = cfg.output.precision;
    let mut files: Vec<(PathBuf, Vec<u8>)> = Vec::new();

    if matches!(cfg.output.format, OutputFormat::Csv | OutputFormat::Both) {
        let mut buf = Vec::new();
        write_csv(&result, precision, &mut buf)?;
        files.push((out_dir.join(format!("{stem}.csv")), buf));
    }
    if matches!(cfg.output.format, OutputFormat::Json | OutputFormat::Both) {
        let text = serde_json::to_vec_pretty(&result.records)?;
        files.push((out_dir.join(format!("{stem}.json")), text));
    }
    for (name, text) in plot_files(cfg, &result) {
        files.push((out_dir.join(name), text.into_bytes()));
    }

    let meta_path = out_dir.join(format!("{stem}.meta.json"));
    let mut names: Vec<String> = files
        .iter()
        .map(|(p, _)| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    names.push(
        meta_path
            .file_name()
            .unwrap()
            .to_string_lossy()
            .into_owned(),
    );
    let metadata = MetadataFile {
        kind: METADATA_KIND.into(),
        config: cfg.clone(),
        sweep: result.metadata.clone(),
        point_count: result.records.len(),
        stable_points: result
            .records
            .iter()
            .filter(|r| r.stability() == Stability::Stable)
            .count(),
        all_unstable: result.all_unstable,
        files: names,
    };
    files.push((meta_path, serde_json::to_vec_pretty(&metadata)?));

    for (path, bytes) in &files {
        fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(SweepReport {
        result,
        files: files.into_iter().map(|(p, _)| p).collect(),
    })
}

fn plot_files(cfg: &RunConfig, result: &SweepResult) -> Vec<(String, String)> {
    let stem = &cfg.output.stem;
    let precision = cfg.output.precision;
    let spec = result.spec();
    let layout = match (cfg.output.plot, &spec.axis2) {
        (PlotLayout::Auto, None) | (PlotLayout::Heatmap, None) => PlotLayout::Curves,
        (PlotLayout::Auto, Some(_)) => PlotLayout::Heatmap,
        (layout, _) => layout,
    };
    match (layout, &spec.axis2) {
        (PlotLayout::None, _) => Vec::new(),
        (PlotLayout::Heatmap, _) => {
            vec![(
                format!("{stem}_heatmap.dat"),
                heatmap_text(result, precision),
            )]
        }
        (_, None) => vec![(
            format!("{stem}.dat"),
            curve_text(&result.records, precision),
        )],
        (_, Some(axis2)) => axis2
            .grid
            .values()
            .iter()
            .zip(result.rows())
            .map(|(&y, row)| {
                (
                    format!(
                        "{stem}_{}_{}.dat",
                        axis2.parameter,
                        format_number(y, precision)
                    ),
                    curve_text(row, precision),
                )
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::OutputConfig;
    use qwsqueeze_core::sweep::{CaptionCoupling, FigureId};

    #[test]
    fn point_reports_vacuum_at_zero_ratio() {
        let mut cfg = RunConfig::figure(
            FigureId::Fig2a,
            CaptionCoupling::default(),
            OutputConfig::default(),
        );
        cfg.sweep = None;
        cfg.drive.ratio = Some(0.0);
        let mut buf = Vec::new();
        assert_eq!(cmd_point(&cfg, &mut buf).unwrap(), exit::SUCCESS);
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert!(v["dB"].as_f64().unwrap().abs() < 1e-4);
        assert_eq!(v["eigen_real_parts"].as_array().unwrap().len(), 8);
    }

    #[test]
    fn point_rejects_sweep_config() {
        let cfg = RunConfig::figure(
            FigureId::Fig2a,
            CaptionCoupling::default(),
            OutputConfig::default(),
        );
        assert!(cmd_point(&cfg, Vec::new()).is_err());
    }
}
