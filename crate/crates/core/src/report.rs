//! Result stores on disk, summary tables and the payoff-polytope figure.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::RepeatedGame;
use crate::harness::{equivalence_pairs, summarize, AlgorithmSummary, Metric, OverallSummary, ResultRow, SuiteConfig, SuiteKind};
use crate::learners::LearnerRegistry;
use crate::solvers::{build_payoff_polytope, pareto_front};

pub const ROWS_FILE: &str = "results.jsonl";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub complete: bool,
    pub rows: usize,
    pub version: String,
    pub config: SuiteConfig,
}

/// Writes rows and manifest. The manifest is first written as incomplete so an
/// interrupted write leaves a store that says so.
pub fn write_store(dir: &Path, config: &SuiteConfig, rows: &[ResultRow]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut manifest = Manifest {
        complete: false,
        rows: 0,
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
    };
    write_manifest(dir, &manifest)?;
    let mut out = BufWriter::new(fs::File::create(dir.join(ROWS_FILE))?);
    for row in rows {
        serde_json::to_writer(&mut out, row)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    manifest.complete = true;
    manifest.rows = rows.len();
    write_manifest(dir, &manifest)
}

fn write_manifest(dir: &Path, manifest: &Manifest) -> Result<()> {
    let mut text = serde_json::to_string_pretty(manifest)?;
    text.push('\n');
    fs::write(dir.join(MANIFEST_FILE), text)?;
    Ok(())
}

pub fn read_store(dir: &Path) -> Result<(Manifest, Vec<ResultRow>)> {
    let manifest: Manifest = serde_json::from_str(&fs::read_to_string(dir.join(MANIFEST_FILE))?)?;
    let file = fs::File::open(dir.join(ROWS_FILE))?;
    let mut rows = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line?;
        if !line.trim().is_empty() {
            rows.push(serde_json::from_str(&line)?);
        }
    }
    Ok((manifest, rows))
}

/// One suite's table: a row per algorithm with the eight metric columns.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportTable {
    pub suite: Option<SuiteKind>,
    pub labels: Vec<String>,
    pub rows: Vec<AlgorithmSummary>,
    /// Equivalence notation on final payoff, e.g. "JAL / CJAL".
    pub groups: Vec<String>,
    pub incomplete: bool,
}

fn label_of(registry: &LearnerRegistry, name: &str) -> String {
    registry.label(name).unwrap_or(name).to_string()
}

impl ReportTable {
    pub fn build(rows: &[ResultRow], roster: &[String], registry: &LearnerRegistry, incomplete: bool) -> Self {
        let summaries = summarize(rows, roster);
        let groups = equivalence_pairs(rows, Metric::Fexp, roster, SIGNIFICANCE_LEVEL, false)
            .into_iter()
            .map(|(a, b)| format!("{} / {}", label_of(registry, &a), label_of(registry, &b)))
            .collect();
        Self {
            suite: rows.first().map(|r| r.suite),
            labels: summaries.iter().map(|s| label_of(registry, &s.name)).collect(),
            rows: summaries,
            groups,
            incomplete,
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["Algorithm".to_string()];
        header.extend(Metric::ALL.iter().map(|m| m.header().to_string()));
        w.write_record(&header)?;
        for (label, row) in self.labels.iter().zip(&self.rows) {
            let mut record = vec![label.clone()];
            record.extend(Metric::ALL.iter().map(|&m| row.mean(m).map(|v| format!("{v:.6}")).unwrap_or_default()));
            w.write_record(&record)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Aligned table with four decimals.
    pub fn to_text(&self) -> String {
        let mut cells: Vec<Vec<String>> = Vec::new();
        let mut header = vec!["Algorithm".to_string()];
        header.extend(Metric::ALL.iter().map(|m| m.header().to_string()));
        cells.push(header);
        for (label, row) in self.labels.iter().zip(&self.rows) {
            let mut line = vec![label.clone()];
            line.extend(
                Metric::ALL
                    .iter()
                    .map(|&m| row.mean(m).map(format_value).unwrap_or_else(|| "n/a".into())),
            );
            cells.push(line);
        }
        let mut out = String::new();
        if self.incomplete {
            out.push_str("WARNING: result store is incomplete\n");
        }
        if let Some(suite) = self.suite {
            let _ = writeln!(out, "suite: {suite}");
        }
        out.push_str(&align(&cells));
        if !self.groups.is_empty() {
            let _ = writeln!(out, "equivalent (Fexp.): {}", self.groups.join(", "));
        }
        out
    }
}

/// Four decimals, with exact integers printed bare.
pub fn format_value(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{v:.0}")
    } else {
        format!("{v:.4}")
    }
}

fn align(cells: &[Vec<String>]) -> String {
    let cols = cells.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| cells.iter().filter_map(|r| r.get(c)).map(String::len).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in cells {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(c, s)| if c == 0 { format!("{s:<w$}", w = widths[c]) } else { format!("{s:>w$}", w = widths[c]) })
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

/// Text form of the cross-suite summary.
pub fn overall_to_text(summary: &OverallSummary, registry: &LearnerRegistry) -> String {
    let pct = |v: Option<f64>| v.map(|x| format!("{:.2}%", 100.0 * x)).unwrap_or_else(|| "-".into());
    let mut cells = vec![["Algorithm", "Payoff", "NC", "C", "R", "Conv.", "NE", "PO", "WO", "FO"]
        .map(String::from)
        .to_vec()];
    for row in &summary.rows {
        let mut line = vec![label_of(registry, &row.name), pct(row.payoff)];
        line.extend(row.payoff_by_suite.iter().map(|&v| pct(v)));
        line.extend([row.conv, row.ne, row.po, row.wo, row.fo].map(pct));
        cells.push(line);
    }
    let mut out = String::new();
    if !summary.missing.is_empty() {
        let missing: Vec<&str> = summary.missing.iter().map(|k| k.as_str()).collect();
        let _ = writeln!(out, "WARNING: missing suites: {}", missing.join(", "));
    }
    out.push_str(&align(&cells));
    if !summary.equivalent.is_empty() {
        let groups: Vec<String> = summary
            .equivalent
            .iter()
            .map(|(a, b)| format!("{} / {}", label_of(registry, a), label_of(registry, b)))
            .collect();
        let _ = writeln!(out, "equivalent (normalised payoff): {}", groups.join(", "));
    }
    out
}

/// SVG of a 2-player game's payoff points, hull edges (dashed) and Pareto
/// front (solid).
pub fn emit_polytope_figure(game: &RepeatedGame) -> Result<String> {
    if game.player_count() != 2 {
        return Err(Error::UnsupportedShape(format!(
            "the figure needs a 2-player game, got {} players",
            game.player_count()
        )));
    }
    let polytope = build_payoff_polytope(game)?;
    let front = pareto_front(&polytope);
    let points = polytope.points();
    let (lo, hi) = points.iter().flatten().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let size = 400.0;
    let margin = 40.0;
    let scale = (size - 2.0 * margin) / span;
    let sx = |v: f64| margin + (v - lo) * scale;
    let sy = |v: f64| size - margin - (v - lo) * scale;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#);
    let _ = writeln!(svg, r#"  <rect width="100%" height="100%" fill="white"/>"#);
    let axis = |x1: f64, y1: f64, x2: f64, y2: f64| {
        format!(r#"  <line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="gray" stroke-width="1"/>"#)
    };
    let _ = writeln!(svg, "{}", axis(margin / 2.0, sy(lo), size - margin / 2.0, sy(lo)));
    let _ = writeln!(svg, "{}", axis(sx(lo), size - margin / 2.0, sx(lo), margin / 2.0));
    for face in polytope.faces().iter().filter(|f| f.dim == 1) {
        let (a, b) = (&points[face.vertices[0]], &points[face.vertices[1]]);
        let _ = writeln!(
            svg,
            r#"  <line class="hull" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="1" stroke-dasharray="4 3"/>"#,
            sx(a[0]), sy(a[1]), sx(b[0]), sy(b[1])
        );
    }
    for (a, b) in front.segments() {
        let _ = writeln!(
            svg,
            r#"  <line class="front" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="3"/>"#,
            sx(a[0]), sy(a[1]), sx(b[0]), sy(b[1])
        );
    }
    for face in front.faces.iter().filter(|f| f.dim == 0) {
        let p = &face.points[0];
        let _ = writeln!(
            svg,
            r#"  <circle class="front" cx="{:.2}" cy="{:.2}" r="7" fill="none" stroke="black" stroke-width="2"/>"#,
            sx(p[0]), sy(p[1])
        );
    }
    for p in points {
        let _ = writeln!(svg, r#"  <circle class="point" cx="{:.2}" cy="{:.2}" r="4" fill="black"/>"#, sx(p[0]), sy(p[1]));
        let _ = writeln!(
            svg,
            r#"  <text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12">({}, {})</text>"#,
            sx(p[0]) + 6.0,
            sy(p[1]) - 6.0,
            format_value(p[0]),
            format_value(p[1])
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
