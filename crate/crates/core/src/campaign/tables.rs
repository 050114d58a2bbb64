//! Writes a [`ResultBundle`] to disk.
//!
//! Files, all deterministic functions of the bundle:
//!
//! * `bundle.json`: the full bundle.
//! * `<state>.csv`, `<state>.json`, `<state>.txt`: per-state observables
//!   (machine-readable, and human-readable in `value(err)` notation).
//! * `<state>_counts.csv`: raw counts, one row per setting.
//! * `summary.csv`, `summary.txt`: one row per state with both inequalities.
//! * `preparation_angles.csv`, `measurement_angles.csv`: plate settings.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::run::{setting_plan, ObservableRow, ResultBundle, StateResult};
use super::Result;
use crate::counting::{compact, CountRecord};
use crate::optics::tables::{measurement_rows, write_csv, PreparationRow};

#[derive(Debug, Serialize)]
struct TableRow<'a> {
    observable: &'a str,
    exact: f64,
    estimate: f64,
    sigma: f64,
}

#[derive(Debug, Serialize)]
struct CountRow<'a> {
    setting: &'a str,
    n_heralds: u64,
    n_d1: u64,
    n_d2: u64,
    n_d3: u64,
    n_d1_d2: u64,
    n_d1_d3: u64,
    n_d2_d3: u64,
    n_noclick: u64,
    rng_seed: u64,
}

impl<'a> From<&'a CountRecord> for CountRow<'a> {
    fn from(r: &'a CountRecord) -> Self {
        Self {
            setting: &r.setting_name,
            n_heralds: r.n_heralds,
            n_d1: r.n_d1,
            n_d2: r.n_d2,
            n_d3: r.n_d3,
            n_d1_d2: r.n_triple[0],
            n_d1_d3: r.n_triple[1],
            n_d2_d3: r.n_triple[2],
            n_noclick: r.n_noclick,
            rng_seed: r.rng_seed,
        }
    }
}

#[derive(Debug, Serialize)]
struct SummaryRow<'a> {
    state: &'a str,
    lhs2: f64,
    lhs2_sigma: f64,
    violation_sigmas2: Option<f64>,
    lhs3: f64,
    lhs3_sigma: f64,
    violation_sigmas3: Option<f64>,
    classical_bound2: f64,
    quantum_prediction2: f64,
    classical_bound3: f64,
    quantum_prediction3: f64,
    exact_lhs2: f64,
    exact_lhs3: f64,
}

fn csv_bytes<R: Serialize>(rows: &[R]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows)?;
    Ok(buf)
}

fn state_rows(s: &StateResult) -> Vec<TableRow<'_>> {
    let mut rows: Vec<TableRow> = s
        .expectations
        .iter()
        .chain(&s.correlations)
        .map(|r: &ObservableRow| TableRow {
            observable: &r.observable,
            exact: r.exact,
            estimate: r.estimate,
            sigma: r.sigma,
        })
        .collect();
    rows.push(TableRow {
        observable: "lhs2",
        exact: s.exact_lhs2,
        estimate: s.report.lhs2.value,
        sigma: s.report.lhs2.sigma,
    });
    rows.push(TableRow {
        observable: "lhs3",
        exact: s.exact_lhs3,
        estimate: s.report.lhs3.value,
        sigma: s.report.lhs3.sigma,
    });
    rows
}

/// Human-readable per-state table in `value(err)` notation.
pub fn state_text(s: &StateResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "state {}", s.name);
    let _ = writeln!(
        out,
        "{:<16} {:>10}  {:<16} setting",
        "observable", "exact", "measured"
    );
    for r in s.expectations.iter().chain(&s.correlations) {
        let _ = writeln!(
            out,
            "{:<16} {:>10.6}  {:<16} {}",
            r.observable,
            r.exact,
            compact(r.estimate, r.sigma),
            r.setting
        );
    }
    let _ = writeln!(
        out,
        "lhs2 = {}  (exact {:.6}, bound 8, {})",
        s.report.lhs2,
        s.exact_lhs2,
        sigmas(s.report.violation_sigmas2)
    );
    let _ = writeln!(
        out,
        "lhs3 = {}  (exact {:.6}, bound 1, {})",
        s.report.lhs3,
        s.exact_lhs3,
        sigmas(s.report.violation_sigmas3)
    );
    out
}

fn sigmas(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v:+.1} sigma"),
        None => "exact".into(),
    }
}

/// Summary for a dot plot: one line per state, then the reference lines.
pub fn summary_text(bundle: &ResultBundle) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<12} {:<14} {:>8}  {:<14} {:>8}",
        "state", "lhs2", "sigmas", "lhs3", "sigmas"
    );
    for s in &bundle.states {
        let _ = writeln!(
            out,
            "{:<12} {:<14} {:>8}  {:<14} {:>8}",
            s.name,
            s.report.lhs2.compact(),
            s.report
                .violation_sigmas2
                .map_or("-".into(), |v| format!("{v:.1}")),
            s.report.lhs3.compact(),
            s.report
                .violation_sigmas3
                .map_or("-".into(), |v| format!("{v:.1}")),
        );
    }
    if let Some(first) = bundle.states.first() {
        let r = &first.report;
        let _ = writeln!(
            out,
            "inequality 2: classical bound {}, quantum prediction 25/3 = {:.6}",
            r.classical_bound2, r.quantum_prediction2
        );
        let _ = writeln!(
            out,
            "inequality 3: classical bound {}, quantum prediction 4/3 = {:.6}",
            r.classical_bound3, r.quantum_prediction3
        );
    }
    let m = &bundle.metadata;
    let _ = writeln!(
        out,
        "seed {}, mean heralds per setting {}, efficiency {}",
        m.seed, m.mean_heralds, m.efficiency
    );
    out
}

/// Writes every table for `bundle` into `dir` and returns the paths written,
/// in write order.
pub fn emit_tables(bundle: &ResultBundle, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: String, bytes: &[u8]| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, bytes)?;
        written.push(path);
        Ok(())
    };

    put("bundle.json".into(), bundle.to_json()?.as_bytes())?;
    for s in &bundle.states {
        put(format!("{}.csv", s.name), &csv_bytes(&state_rows(s))?)?;
        let mut json = serde_json::to_string_pretty(s)?;
        json.push('\n');
        put(format!("{}.json", s.name), json.as_bytes())?;
        put(format!("{}.txt", s.name), state_text(s).as_bytes())?;
        let counts: Vec<CountRow> = s.records.iter().map(CountRow::from).collect();
        put(format!("{}_counts.csv", s.name), &csv_bytes(&counts)?)?;
    }

    let summary: Vec<SummaryRow> = bundle
        .states
        .iter()
        .map(|s| SummaryRow {
            state: &s.name,
            lhs2: s.report.lhs2.value,
            lhs2_sigma: s.report.lhs2.sigma,
            violation_sigmas2: s.report.violation_sigmas2,
            lhs3: s.report.lhs3.value,
            lhs3_sigma: s.report.lhs3.sigma,
            violation_sigmas3: s.report.violation_sigmas3,
            classical_bound2: s.report.classical_bound2,
            quantum_prediction2: s.report.quantum_prediction2,
            classical_bound3: s.report.classical_bound3,
            quantum_prediction3: s.report.quantum_prediction3,
            exact_lhs2: s.exact_lhs2,
            exact_lhs3: s.exact_lhs3,
        })
        .collect();
    put("summary.csv".into(), &csv_bytes(&summary)?)?;
    put("summary.txt".into(), summary_text(bundle).as_bytes())?;

    let prep: Vec<PreparationRow> = bundle
        .states
        .iter()
        .filter_map(|s| s.preparation.clone())
        .collect();
    put("preparation_angles.csv".into(), &csv_bytes(&prep)?)?;
    let network: Vec<_> = setting_plan(bundle.metadata.direct_h_correlations)?
        .into_iter()
        .filter(|p| p.angles.is_some())
        .map(|p| p.setting)
        .collect();
    put(
        "measurement_angles.csv".into(),
        &csv_bytes(&measurement_rows(&network)?)?,
    )?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::campaign::{run_campaign, Campaign, Preset, StateSpec};
    use crate::counting::parse_compact;

    fn bundle() -> ResultBundle {
        let c = Campaign {
            mean_heralds: 1e4,
            ..Campaign::with_states(vec![
                StateSpec::Preset(Preset::Psi7),
                StateSpec::Preset(Preset::Rho8),
            ])
        };
        run_campaign(&c).unwrap()
    }

    #[test]
    fn writes_expected_files() {
        let dir = tempfile::tempdir().unwrap();
        let b = bundle();
        let files = emit_tables(&b, dir.path()).unwrap();
        let names: Vec<String> = files
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        for n in [
            "bundle.json",
            "psi7.csv",
            "psi7.json",
            "psi7.txt",
            "psi7_counts.csv",
            "rho8.csv",
            "summary.csv",
            "summary.txt",
            "preparation_angles.csv",
            "measurement_angles.csv",
        ] {
            assert!(names.iter().any(|x| x == n), "missing {n}");
        }
        let csv = fs::read_to_string(dir.path().join("psi7.csv")).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("observable,exact,estimate,sigma"));
        assert!(lines.next().unwrap().starts_with("A[z1],0.333333333333"));
        assert_eq!(csv.lines().count(), 1 + 13 + 24 + 2);
        let text = fs::read_to_string(dir.path().join("summary.txt")).unwrap();
        assert!(text.contains("classical bound 8,"));
        assert!(text.contains("25/3"));
        let back =
            ResultBundle::from_json(&fs::read_to_string(dir.path().join("bundle.json")).unwrap())
                .unwrap();
        assert_eq!(back, b);
    }

    #[test]
    fn human_table_uses_compact_notation() {
        let b = bundle();
        let text = state_text(&b.states[0]);
        let line = text.lines().find(|l| l.starts_with("A[z1] ")).unwrap();
        let cell = line.split_whitespace().nth(2).unwrap();
        let (v, e) = parse_compact(cell).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 5.0 * e, "{line}");
    }

    #[test]
    fn output_is_byte_identical_across_runs() {
        let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        emit_tables(&bundle(), d1.path()).unwrap();
        emit_tables(&bundle(), d2.path()).unwrap();
        let mut names: Vec<_> = fs::read_dir(d1.path())
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        for n in names {
            assert_eq!(
                fs::read(d1.path().join(&n)).unwrap(),
                fs::read(d2.path().join(&n)).unwrap(),
                "{n:?}"
            );
        }
    }
}
