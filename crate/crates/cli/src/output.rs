//! CSV tables, plot-data files and number formatting.

use std::fmt::Write as _;
use std::io::Write;

use qwsqueeze_core::{PointRecord, SweepResult};

pub const CSV_COLUMNS: [&str; 9] = [
    "axis1",
    "axis2",
    "stable",
    "S_min",
    "dB",
    "V_q",
    "V_p",
    "V_qp",
    "theta_opt",
];

/// Rounds `x` to `precision` significant digits and prints the shortest
/// decimal that parses back to the rounded value.
pub fn format_number(x: f64, precision: usize) -> String {
    if !x.is_finite() {
        return "nan".into();
    }
    let rounded: f64 = format!("{:.*e}", precision.saturating_sub(1), x)
        .parse()
        .expect("formatted float parses");
    format!("{rounded}")
}

pub fn csv_header(two_dimensional: bool) -> Vec<&'static str> {
    CSV_COLUMNS
        .iter()
        .copied()
        .filter(|c| two_dimensional || *c != "axis2")
        .collect()
}

fn csv_row(record: &PointRecord, two_dimensional: bool, precision: usize) -> Vec<String> {
    let num = |x: f64| format_number(x, precision);
    let mut row = vec![num(record.axis1)];
    if two_dimensional {
        row.push(record.axis2.map(num).unwrap_or_default());
    }
    row.push(record.stability().as_str().to_string());
    match record.squeezing() {
        Some(s) => row.extend(
            [s.s_min, s.db, s.v_q, s.v_p, s.v_qp, s.theta_opt]
                .into_iter()
                .map(num),
        ),
        None => row.extend(std::iter::repeat_n(String::new(), 6)),
    }
    row
}

pub fn write_csv<W: Write>(result: &SweepResult, precision: usize, out: W) -> csv::Result<()> {
    let two_d = result.spec().axis2.is_some();
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(csv_header(two_d))?;
    for record in &result.records {
        w.write_record(csv_row(record, two_d, precision))?;
    }
    w.flush()?;
    Ok(())
}

fn db_or_nan(record: &PointRecord, precision: usize) -> String {
    match record.squeezing() {
        Some(s) => format_number(s.db, precision),
        None => "nan".into(),
    }
}

/// `x<TAB>dB` lines for one row of the sweep.
pub fn curve_text(records: &[PointRecord], precision: usize) -> String {
    let mut s = String::new();
    for r in records {
        let _ = writeln!(
            s,
            "{}\t{}",
            format_number(r.axis1, precision),
            db_or_nan(r, precision)
        );
    }
    s
}

/// Matrix layout: `# x:` and `# y:` grid headers, then one line of N₁ dB
/// values per axis2 value.
pub fn heatmap_text(result: &SweepResult, precision: usize) -> String {
    let spec = result.spec();
    let join = |v: &[f64]| {
        v.iter()
            .map(|&x| format_number(x, precision))
            .collect::<Vec<_>>()
            .join("\t")
    };
    let mut s = String::new();
    let _ = writeln!(s, "# x: {}", join(spec.axis1.grid.values()));
    let y: &[f64] = spec.axis2.as_ref().map_or(&[], |a| a.grid.values());
    let _ = writeln!(s, "# y: {}", join(y));
    for row in result.rows() {
        let line: Vec<String> = row.iter().map(|r| db_or_nan(r, precision)).collect();
        let _ = writeln!(s, "{}", line.join("\t"));
    }
    s
}
