//! Writing analysis reports to disk.
//!
//! Every report becomes a directory holding `report.json` (full precision,
//! the lossless record), long-format CSV tables for plotting (numbers at six
//! significant digits), a plain-text `summary.txt` with percentages of the
//! joint mutual information to one decimal, and optionally a `ledgers/`
//! directory of pointwise ledgers. Nothing depends on the clock, the thread
//! count or hash order, so identical inputs give byte-identical directories.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::analysis::{
    CcsReport, ConditionBlock, ConditionsReport, SweepReport, TestOutcome, UiaSample, Warning,
};
use crate::error::Result;
use crate::pid::Component;
use crate::pointwise::PointwiseLedger;

/// Significant digits in CSV and text tables.
pub const SIGNIFICANT_DIGITS: usize = 6;

/// Formats `x` with [`SIGNIFICANT_DIGITS`] significant digits, fixed-point
/// for moderate magnitudes and scientific otherwise, without trailing zeros.
///
/// ```
/// use pidcmp::report::format_sig;
///
/// assert_eq!(format_sig(1.0 / 3.0), "0.333333");
/// assert_eq!(format_sig(1234567.0), "1.23457e6");
/// assert_eq!(format_sig(-2.5e-7), "-2.5e-7");
/// assert_eq!(format_sig(0.0), "0");
/// ```
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = SIGNIFICANT_DIGITS;
    // Round first so that the exponent reflects carries such as 9.999999.
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// A percentage with one decimal, for the human tables.
fn percent(fraction: f64) -> String {
    format!("{:.1}", 100.0 * fraction)
}

fn opt_bool(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "true",
        Some(false) => "false",
        None => "indeterminate",
    }
}

fn opt_num(v: Option<f64>) -> String {
    v.map(format_sig).unwrap_or_default()
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(dir.join(name))?;
    f.write_all(bytes)?;
    Ok(())
}

fn write_ledger(dir: &Path, stem: &str, ledger: &PointwiseLedger) -> Result<()> {
    let ledgers = dir.join("ledgers");
    fs::create_dir_all(&ledgers)?;
    let f = fs::File::create(ledgers.join(format!("{stem}_{}.csv", ledger.method)))?;
    ledger.write_csv(f)
}

fn warnings_text(out: &mut String, warnings: &[Warning]) {
    if warnings.is_empty() {
        return;
    }
    let _ = writeln!(out, "\nWarnings");
    for w in warnings {
        let _ = writeln!(out, "  {}: {}", w.subject, w.message);
    }
}

// ---------------------------------------------------------------------------
// Condition comparisons
// ---------------------------------------------------------------------------

/// `unit,condition,method,component,value`: every normalized component of
/// every unit and condition.
pub fn conditions_components_csv(report: &ConditionsReport) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for u in &report.units {
        for block in [&u.control, &u.treatment] {
            for p in &block.decomposed.pids {
                for c in Component::ALL {
                    rows.push(vec![
                        u.unit.clone(),
                        block.condition.to_string(),
                        p.method.to_string(),
                        c.to_string(),
                        format_sig(p.get(c)),
                    ]);
                }
            }
        }
    }
    csv_bytes(&["unit", "condition", "method", "component", "value"], rows)
}

/// `unit,method,component,difference`, treatment minus control.
pub fn conditions_differences_csv(report: &ConditionsReport) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for u in &report.units {
        for d in &u.differences {
            for c in Component::ALL {
                rows.push(vec![
                    u.unit.clone(),
                    d.method.to_string(),
                    c.to_string(),
                    format_sig(d.get(c)),
                ]);
            }
        }
    }
    csv_bytes(&["unit", "method", "component", "difference"], rows)
}

/// `unit,condition,jmi,mi_yb,mi_ya,ii,uia`: the classical measures in bits
/// and the normalized UIA.
pub fn conditions_measures_csv(report: &ConditionsReport) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for u in &report.units {
        for block in [&u.control, &u.treatment] {
            let s = &block.decomposed.summary;
            rows.push(vec![
                u.unit.clone(),
                block.condition.to_string(),
                format_sig(s.jmi),
                format_sig(s.mi_yb),
                format_sig(s.mi_ya),
                format_sig(s.ii),
                format_sig(block.uia),
            ]);
        }
    }
    csv_bytes(&["unit", "condition", "jmi", "mi_yb", "mi_ya", "ii", "uia"], rows)
}

fn test_columns(t: &TestOutcome) -> Vec<String> {
    let w = t.wilcoxon.as_ref();
    vec![
        w.map(|w| w.n.to_string()).unwrap_or_default(),
        w.map(|w| format_sig(w.w_plus)).unwrap_or_default(),
        opt_num(w.map(|w| w.p_value)),
        t.family.map(|f| f.to_string()).unwrap_or_default(),
        t.family_size.map(|m| m.to_string()).unwrap_or_default(),
        opt_num(t.p_corrected),
        t.error.clone().unwrap_or_default(),
    ]
}

const TEST_HEADER: [&str; 7] = ["n", "w_plus", "p_value", "family", "family_size", "p_corrected", "error"];

/// One row per method and component: quartiles of each sample and the
/// signed-rank test of the differences.
pub fn conditions_tests_csv(report: &ConditionsReport) -> Result<Vec<u8>> {
    let mut header = vec![
        "method",
        "component",
        "n_units",
        "control_lower",
        "control_median",
        "control_upper",
        "treatment_lower",
        "treatment_median",
        "treatment_upper",
        "difference_lower",
        "difference_median",
        "difference_upper",
    ];
    header.extend(TEST_HEADER);
    let rows = report.component_tests.iter().map(|t| {
        let mut r = vec![t.method.to_string(), t.component.to_string(), t.n_units.to_string()];
        for q in [&t.control, &t.treatment, &t.difference] {
            r.extend([format_sig(q.lower), format_sig(q.median), format_sig(q.upper)]);
        }
        r.extend(test_columns(&t.test));
        r
    });
    csv_bytes(&header, rows)
}

fn sample_name(s: UiaSample) -> &'static str {
    match s {
        UiaSample::Control => "control",
        UiaSample::Treatment => "treatment",
        UiaSample::Difference => "difference",
    }
}

/// One row per UIA sample (control, treatment, difference).
pub fn conditions_uia_csv(report: &ConditionsReport) -> Result<Vec<u8>> {
    let mut header = vec!["sample", "n_units", "lower", "median", "upper"];
    header.extend(TEST_HEADER);
    let rows = report.uia_tests.iter().map(|t| {
        let mut r = vec![
            sample_name(t.sample).to_string(),
            t.n_units.to_string(),
            format_sig(t.quartiles.lower),
            format_sig(t.quartiles.median),
            format_sig(t.quartiles.upper),
        ];
        r.extend(test_columns(&t.test));
        r
    });
    csv_bytes(&header, rows)
}

/// Median components per method and condition as percentages of the joint
/// mutual information, followed by the test results.
pub fn conditions_summary(report: &ConditionsReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "Condition comparison over {} units", report.units.len());
    let _ = writeln!(out, "Median components, % of joint mutual information");
    let _ = writeln!(
        out,
        "{:<8} {:<10} {:>7} {:>7} {:>7} {:>7}",
        "method", "condition", "unq_b", "unq_a", "shd", "syn"
    );
    for (i, &m) in report.config.methods.iter().enumerate() {
        for (name, pick) in [
            ("control", (|u: &crate::analysis::UnitReport| &u.control) as fn(&_) -> &ConditionBlock),
            ("treatment", |u| &u.treatment),
        ] {
            let medians: Vec<String> = Component::ALL
                .iter()
                .map(|&c| {
                    let v: Vec<f64> = report
                        .units
                        .iter()
                        .map(|u| pick(u).decomposed.pids[i].get(c))
                        .collect();
                    crate::stats::median_quartiles(&v)
                        .map(|q| percent(q.median))
                        .unwrap_or_default()
                })
                .collect();
            let _ = writeln!(
                out,
                "{:<8} {:<10} {:>7} {:>7} {:>7} {:>7}",
                m.name(),
                name,
                medians[0],
                medians[1],
                medians[2],
                medians[3]
            );
        }
    }
    let _ = writeln!(out, "\nSigned-rank tests of treatment minus control");
    for t in &report.component_tests {
        let _ = writeln!(out, "  {:<8} {:<6} {}", t.method.name(), t.component.name(), test_text(&t.test));
    }
    for t in &report.uia_tests {
        let _ = writeln!(out, "  uia {:<11} {}", sample_name(t.sample), test_text(&t.test));
    }
    warnings_text(&mut out, &report.warnings);
    out
}

fn test_text(t: &TestOutcome) -> String {
    match (&t.wilcoxon, &t.error) {
        (Some(w), _) => {
            let mut s = format!("n = {}, W+ = {}, p = {}", w.n, format_sig(w.w_plus), format_sig(w.p_value));
            if let (Some(m), Some(pc)) = (t.family_size, t.p_corrected) {
                let _ = write!(s, ", corrected (m = {m}) p = {}", format_sig(pc));
            }
            s
        }
        (None, Some(e)) => e.clone(),
        (None, None) => String::new(),
    }
}

/// Writes `report.json`, `components.csv`, `differences.csv`,
/// `measures.csv`, `tests.csv`, `uia.csv` and `summary.txt`, plus one ledger
/// per unit, condition and pointwise method when the report carries them.
pub fn write_conditions(report: &ConditionsReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_file(dir, "report.json", to_json(report)?.as_bytes())?;
    write_file(dir, "components.csv", &conditions_components_csv(report)?)?;
    write_file(dir, "differences.csv", &conditions_differences_csv(report)?)?;
    write_file(dir, "measures.csv", &conditions_measures_csv(report)?)?;
    write_file(dir, "tests.csv", &conditions_tests_csv(report)?)?;
    write_file(dir, "uia.csv", &conditions_uia_csv(report)?)?;
    write_file(dir, "summary.txt", conditions_summary(report).as_bytes())?;
    for u in &report.units {
        for block in [&u.control, &u.treatment] {
            for l in &block.decomposed.ledgers {
                write_ledger(dir, &format!("{}_{}", u.unit, block.condition), l)?;
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

/// `basal_range,apical_range,method,component,value`.
pub fn sweep_components_csv(report: &SweepReport) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for cell in &report.cells {
        for p in &cell.pids {
            for c in Component::ALL {
                rows.push(vec![
                    cell.basal_range.to_string(),
                    cell.apical_range.to_string(),
                    p.method.to_string(),
                    c.to_string(),
                    format_sig(p.get(c)),
                ]);
            }
        }
    }
    csv_bytes(&["basal_range", "apical_range", "method", "component", "value"], rows)
}

/// One row per cell: record count, classical measures in bits, UIA and the
/// cross-method agreement check.
pub fn sweep_cells_csv(report: &SweepReport) -> Result<Vec<u8>> {
    let rows = report.cells.iter().map(|c| {
        vec![
            c.basal_range.to_string(),
            c.apical_range.to_string(),
            c.n_records.to_string(),
            format_sig(c.summary.jmi),
            format_sig(c.summary.mi_yb),
            format_sig(c.summary.mi_ya),
            format_sig(c.summary.ii),
            format_sig(c.uia),
            format_sig(c.uia_check.spread),
            c.uia_check.agree.to_string(),
        ]
    });
    csv_bytes(
        &[
            "basal_range",
            "apical_range",
            "n_records",
            "jmi",
            "mi_yb",
            "mi_ya",
            "ii",
            "uia",
            "uia_spread",
            "uia_agree",
        ],
        rows,
    )
}

/// `apical_range,from_basal,to_basal,from_uia,to_uia`.
pub fn sweep_bifurcation_csv(report: &SweepReport) -> Result<Vec<u8>> {
    let rows = report.bifurcations.iter().map(|s| {
        vec![
            s.apical_range.to_string(),
            s.from_basal.to_string(),
            s.to_basal.to_string(),
            format_sig(s.from_uia),
            format_sig(s.to_uia),
        ]
    });
    csv_bytes(&["apical_range", "from_basal", "to_basal", "from_uia", "to_uia"], rows)
}

pub fn sweep_summary(report: &SweepReport) -> String {
    let mut out = String::new();
    let unit = if report.spec.normalize { "% of joint mutual information" } else { "bits" };
    let value = |v: f64| if report.spec.normalize { percent(v) } else { format!("{v:.3}") };
    let _ = writeln!(out, "Sweep over {} cells; components in {unit}", report.cells.len());
    let _ = writeln!(
        out,
        "{:<9} {:<9} {:<8} {:>7} {:>7} {:>7} {:>7} {:>8}",
        "basal", "apical", "method", "unq_b", "unq_a", "shd", "syn", "uia"
    );
    for c in &report.cells {
        for p in &c.pids {
            let _ = writeln!(
                out,
                "{:<9} {:<9} {:<8} {:>7} {:>7} {:>7} {:>7} {:>8.3}",
                c.basal_range.to_string(),
                c.apical_range.to_string(),
                p.method.name(),
                value(p.unq_b),
                value(p.unq_a),
                value(p.shd),
                value(p.syn),
                c.uia
            );
        }
    }
    let _ = writeln!(out, "\nUIA sign changes along basal ranges");
    if report.bifurcations.is_empty() {
        let _ = writeln!(out, "  none");
    }
    for s in &report.bifurcations {
        let _ = writeln!(
            out,
            "  apical {}: basal {} ({:.3}) -> {} ({:.3})",
            s.apical_range, s.from_basal, s.from_uia, s.to_basal, s.to_uia
        );
    }
    warnings_text(&mut out, &report.warnings);
    out
}

/// Writes `report.json`, `cells.csv`, `components.csv`, `bifurcation.csv`
/// and `summary.txt`, plus ledgers when the report carries them.
pub fn write_sweep(report: &SweepReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_file(dir, "report.json", to_json(report)?.as_bytes())?;
    write_file(dir, "cells.csv", &sweep_cells_csv(report)?)?;
    write_file(dir, "components.csv", &sweep_components_csv(report)?)?;
    write_file(dir, "bifurcation.csv", &sweep_bifurcation_csv(report)?)?;
    write_file(dir, "summary.txt", sweep_summary(report).as_bytes())?;
    for c in &report.cells {
        for l in &c.ledgers {
            write_ledger(dir, &format!("b{}_a{}", c.basal_range, c.apical_range), l)?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Context-sensitivity classification
// ---------------------------------------------------------------------------

/// One row per cell and method with the flags and every number they are
/// derived from.
pub fn ccs_csv(report: &CcsReport) -> Result<Vec<u8>> {
    let rows = report.verdicts.iter().map(|v| {
        let z = &v.zero_inputs;
        vec![
            v.basal_range.to_string(),
            v.apical_range.to_string(),
            v.method.to_string(),
            z.apical_zero_rows.to_string(),
            z.apical_zero_max_count.map(|m| m.to_string()).unwrap_or_default(),
            z.basal_zero_rows.to_string(),
            z.basal_zero_max_count.map(|m| m.to_string()).unwrap_or_default(),
            format_sig(v.unq_b),
            format_sig(v.unq_a),
            format_sig(v.shd),
            format_sig(v.syn),
            opt_bool(v.ccs1).to_string(),
            opt_bool(v.ccs2).to_string(),
            v.ccs3.to_string(),
            opt_bool(v.ccs4).to_string(),
        ]
    });
    csv_bytes(
        &[
            "basal_range",
            "apical_range",
            "method",
            "apical_zero_rows",
            "apical_zero_max_count",
            "basal_zero_rows",
            "basal_zero_max_count",
            "unq_b",
            "unq_a",
            "shd",
            "syn",
            "ccs1",
            "ccs2",
            "ccs3",
            "ccs4",
        ],
        rows,
    )
}

/// `apical_range,method,basal_range,combined,ccs4`: the shared-plus-synergy
/// series the rise-and-fall property is read from.
pub fn ccs_series_csv(report: &CcsReport) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for s in &report.series {
        for (b, v) in s.basal_ranges.iter().zip(&s.combined) {
            rows.push(vec![
                s.apical_range.to_string(),
                s.method.to_string(),
                b.to_string(),
                format_sig(*v),
                opt_bool(s.ccs4).to_string(),
            ]);
        }
    }
    csv_bytes(&["apical_range", "method", "basal_range", "combined", "ccs4"], rows)
}

pub fn ccs_summary(report: &CcsReport) -> String {
    let t = &report.spec.thresholds;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Context-sensitivity classification; thresholds unq_b >= {}%, |unq_a| <= {}%, shd or syn >= {}%, rise/fall > {}%",
        percent(t.theta_b),
        percent(t.theta_a),
        percent(t.theta_s),
        percent(t.rise_fall)
    );
    let _ = writeln!(
        out,
        "{:<9} {:<9} {:<8} {:>7} {:>7} {:>7} {:>7}  {:<13} {:<13} {:<5} {:<13}",
        "basal", "apical", "method", "unq_b", "unq_a", "shd", "syn", "ccs1", "ccs2", "ccs3", "ccs4"
    );
    for v in &report.verdicts {
        let _ = writeln!(
            out,
            "{:<9} {:<9} {:<8} {:>7} {:>7} {:>7} {:>7}  {:<13} {:<13} {:<5} {:<13}",
            v.basal_range.to_string(),
            v.apical_range.to_string(),
            v.method.name(),
            percent(v.unq_b),
            percent(v.unq_a),
            percent(v.shd),
            percent(v.syn),
            opt_bool(v.ccs1),
            opt_bool(v.ccs2),
            v.ccs3,
            opt_bool(v.ccs4)
        );
    }
    warnings_text(&mut out, &report.warnings);
    out
}

/// Writes `report.json`, `ccs.csv`, `series.csv` and `summary.txt`.
pub fn write_ccs(report: &CcsReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_file(dir, "report.json", to_json(report)?.as_bytes())?;
    write_file(dir, "ccs.csv", &ccs_csv(report)?)?;
    write_file(dir, "series.csv", &ccs_series_csv(report)?)?;
    write_file(dir, "summary.txt", ccs_summary(report).as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(1.0), "1");
        assert_eq!(format_sig(0.1234564), "0.123456");
        assert_eq!(format_sig(0.99999996), "1");
        assert_eq!(format_sig(999999.6), "1e6");
        assert_eq!(format_sig(123456.4), "123456");
        assert_eq!(format_sig(1.5e-5), "0.000015");
        assert_eq!(format_sig(1.5e-6), "1.5e-6");
        assert_eq!(format_sig(-0.4150374), "-0.415037");
        assert_eq!(format_sig(-0.0), "0");
    }

    #[test]
    fn formatted_values_parse_back_within_rounding() {
        for &x in &[0.58496250072, -1e-9, 3.14159265, 2.0f64.powi(40), 7e-300] {
            let back: f64 = format_sig(x).parse().unwrap();
            assert!(((back - x) / x).abs() <= 5e-6, "{x} -> {back}");
        }
    }

    #[test]
    fn csv_quotes_fields_with_commas() {
        let bytes = csv_bytes(&["a", "b"], [vec!["x,y".to_string(), "1".to_string()]]).unwrap();
        assert_eq!(String::from_utf8(bytes).unwrap(), "a,b\n\"x,y\",1\n");
    }
}
