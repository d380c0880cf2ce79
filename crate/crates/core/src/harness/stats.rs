//! Per-algorithm averages, paired t-tests and the cross-suite summary.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::{ResultRow, SuiteKind};
use crate::error::{Error, Result};

/// Report columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Metric {
    Conv,
    Fexp,
    Welfare,
    Fairness,
    Ne,
    Po,
    Wo,
    Fo,
}

impl Metric {
    pub const ALL: [Metric; 8] = [
        Metric::Conv,
        Metric::Fexp,
        Metric::Welfare,
        Metric::Fairness,
        Metric::Ne,
        Metric::Po,
        Metric::Wo,
        Metric::Fo,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Metric::Conv => "conv",
            Metric::Fexp => "fexp",
            Metric::Welfare => "welfare",
            Metric::Fairness => "fairness",
            Metric::Ne => "ne",
            Metric::Po => "po",
            Metric::Wo => "wo",
            Metric::Fo => "fo",
        }
    }

    pub fn header(self) -> &'static str {
        match self {
            Metric::Conv => "Conv.",
            Metric::Fexp => "Fexp.",
            Metric::Welfare => "Welfare",
            Metric::Fairness => "Fairness",
            Metric::Ne => "NE",
            Metric::Po => "PO",
            Metric::Wo => "WO",
            Metric::Fo => "FO",
        }
    }

    pub fn is_rate(self) -> bool {
        !matches!(self, Metric::Fexp | Metric::Welfare | Metric::Fairness)
    }

    /// Value contributed by the algorithm in `seat` of a row; `None` when the
    /// play failed or the metric is undefined for it.
    pub fn sample(self, row: &ResultRow, seat: usize) -> Option<f64> {
        let r = row.report.as_ref()?;
        let flag = |b: bool| if b { 1.0 } else { 0.0 };
        match self {
            Metric::Conv => Some(flag(r.converged[seat])),
            Metric::Fexp => Some(r.final_payoffs[seat]),
            Metric::Welfare => Some(r.welfare),
            Metric::Fairness => Some(r.fairness),
            Metric::Ne => r.nash.map(flag),
            Metric::Po => Some(flag(r.pareto_optimal)),
            Metric::Wo => r.welfare_optimal.map(flag),
            Metric::Fo => r.fairness_optimal.map(flag),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        Metric::ALL
            .into_iter()
            .find(|m| m.key() == lower || m.header().to_ascii_lowercase() == lower)
            .ok_or_else(|| {
                let valid: Vec<&str> = Metric::ALL.iter().map(|m| m.key()).collect();
                Error::InvalidInput(format!("unknown metric `{s}`; valid metrics: {}", valid.join(", ")))
            })
    }
}

/// Averages of one algorithm over all its scored seats.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgorithmSummary {
    pub name: String,
    /// Scored seats with a report.
    pub samples: usize,
    pub failed: usize,
    /// Mean per metric, in [`Metric::ALL`] order; `None` if nothing was defined.
    pub means: Vec<Option<f64>>,
    /// Scored seats where the metric was undefined, per metric.
    pub undefined: Vec<usize>,
}

impl AlgorithmSummary {
    pub fn mean(&self, metric: Metric) -> Option<f64> {
        self.means[metric as usize]
    }
}

/// Per-algorithm means in the given order. Algorithms without rows are left out.
pub fn summarize(rows: &[ResultRow], order: &[String]) -> Vec<AlgorithmSummary> {
    order
        .iter()
        .filter_map(|name| {
            let mut samples = 0;
            let mut failed = 0;
            let mut sums = vec![0.0; Metric::ALL.len()];
            let mut counts = vec![0usize; Metric::ALL.len()];
            let mut undefined = vec![0usize; Metric::ALL.len()];
            for row in rows {
                for seat in row.scored_seats() {
                    if &row.seating[seat] != name {
                        continue;
                    }
                    if row.report.is_none() {
                        failed += 1;
                        continue;
                    }
                    samples += 1;
                    for (k, m) in Metric::ALL.iter().enumerate() {
                        match m.sample(row, seat) {
                            Some(v) => {
                                sums[k] += v;
                                counts[k] += 1;
                            }
                            None => undefined[k] += 1,
                        }
                    }
                }
            }
            (samples + failed > 0).then(|| AlgorithmSummary {
                name: name.clone(),
                samples,
                failed,
                means: sums
                    .iter()
                    .zip(&counts)
                    .map(|(s, &c)| (c > 0).then(|| s / c as f64))
                    .collect(),
                undefined,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TTest {
    pub t: f64,
    pub df: usize,
    pub p_value: f64,
    pub mean_difference: f64,
    pub significant: bool,
}

/// Two-sided paired t-test on `a - b`.
pub fn paired_t_test(a: &[f64], b: &[f64], level: f64) -> Result<TTest> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "paired samples differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!("a paired t-test needs at least 2 pairs, got {n}")));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mean = diffs.iter().sum::<f64>() / n as f64;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let df = n - 1;
    if var == 0.0 {
        // every difference equal: any nonzero shift is certain
        let significant = mean != 0.0;
        return Ok(TTest {
            t: if significant { mean.signum() * f64::INFINITY } else { 0.0 },
            df,
            p_value: if significant { 0.0 } else { 1.0 },
            mean_difference: mean,
            significant,
        });
    }
    let t = mean / (var / n as f64).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df as f64).expect("df is positive");
    let p_value = 2.0 * (1.0 - dist.cdf(t.abs()));
    Ok(TTest {
        t,
        df,
        p_value,
        mean_difference: mean,
        significant: p_value < level,
    })
}

/// Pairing key of one scored seat, as seen when comparing `me` with `other`.
///
/// In pairwise rows the partner is described by role, so a play of `me`
/// against `other` pairs with the mirrored play of `other` against `me`, and a
/// self-pair of `me` pairs with a self-pair of `other`. Self-pairs seat the
/// same algorithm twice, so their key also carries the permutation.
fn pairing_key(row: &ResultRow, seat: usize, me: &str, other: &str) -> String {
    let mut partners: Vec<&str> = row
        .seating
        .iter()
        .enumerate()
        .filter(|&(s, _)| s != seat)
        .map(|(_, name)| name.as_str())
        .collect();
    if row.focal_seat.is_some() {
        return format!("{}|{}|{}|{}", row.suite, row.game_id, row.sweep, partners.join(","));
    }
    for p in partners.iter_mut() {
        if *p == me {
            *p = "<self>";
        } else if *p == other {
            *p = "<rival>";
        }
    }
    partners.sort_unstable();
    let self_pair = partners.iter().all(|&p| p == "<self>");
    let perm = if self_pair { row.permutation } else { 0 };
    format!(
        "{}|{}|{}|{}|{}|{}",
        row.suite,
        row.game_id,
        row.sweep,
        seat,
        perm,
        partners.join(",")
    )
}

fn keyed_values(
    rows: &[ResultRow],
    metric: Metric,
    me: &str,
    other: &str,
    normalized: bool,
) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    for row in rows {
        for seat in row.scored_seats() {
            if row.seating[seat] != me {
                continue;
            }
            if let Some(mut v) = metric.sample(row, seat) {
                if normalized && metric == Metric::Fexp {
                    v /= row.suite.max_payoff();
                }
                out.insert(pairing_key(row, seat, me, other), v);
            }
        }
    }
    out
}

/// Matched samples of two algorithms on one metric. Only keys present for
/// both are kept. With `normalized`, final payoffs are divided by the suite's
/// maximum payoff.
pub fn paired_samples(
    rows: &[ResultRow],
    metric: Metric,
    a: &str,
    b: &str,
    normalized: bool,
) -> (Vec<f64>, Vec<f64>) {
    let va = keyed_values(rows, metric, a, b, normalized);
    let vb = keyed_values(rows, metric, b, a, normalized);
    va.iter()
        .filter_map(|(k, x)| vb.get(k).map(|y| (*x, *y)))
        .unzip()
}

/// Pairs of the roster whose samples are not significantly different.
pub fn equivalence_pairs(
    rows: &[ResultRow],
    metric: Metric,
    roster: &[String],
    level: f64,
    normalized: bool,
) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for i in 0..roster.len() {
        for j in i + 1..roster.len() {
            let (a, b) = paired_samples(rows, metric, &roster[i], &roster[j], normalized);
            if let Ok(test) = paired_t_test(&a, &b, level) {
                if !test.significant {
                    out.push((roster[i].clone(), roster[j].clone()));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverallRow {
    pub name: String,
    /// Final payoff divided by the suite maximum, per suite in
    /// [`SuiteKind::ALL`] order; `None` where the suite is missing.
    pub payoff_by_suite: Vec<Option<f64>>,
    /// Means over the suites that are present.
    pub payoff: Option<f64>,
    pub conv: Option<f64>,
    pub ne: Option<f64>,
    pub po: Option<f64>,
    pub wo: Option<f64>,
    pub fo: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverallSummary {
    pub rows: Vec<OverallRow>,
    pub missing: Vec<SuiteKind>,
    /// Algorithm pairs with statistically equivalent normalised payoffs.
    pub equivalent: Vec<(String, String)>,
}

fn mean_of(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let present: Vec<f64> = values.flatten().collect();
    (!present.is_empty()).then(|| present.iter().sum::<f64>() / present.len() as f64)
}

/// Normalised cross-suite summary. Each suite's per-algorithm mean counts
/// once; missing suites are listed and left out of the means.
pub fn aggregate_overall(rows: &[ResultRow], roster: &[String], level: f64) -> OverallSummary {
    let by_suite: Vec<(SuiteKind, Vec<AlgorithmSummary>)> = SuiteKind::ALL
        .iter()
        .map(|&kind| {
            let subset: Vec<ResultRow> = rows.iter().filter(|r| r.suite == kind).cloned().collect();
            (kind, summarize(&subset, roster))
        })
        .collect();
    let missing = by_suite
        .iter()
        .filter(|(_, s)| s.is_empty())
        .map(|(k, _)| *k)
        .collect();
    let overall_rows = roster
        .iter()
        .filter_map(|name| {
            let per: Vec<(SuiteKind, Option<&AlgorithmSummary>)> = by_suite
                .iter()
                .map(|(k, s)| (*k, s.iter().find(|a| &a.name == name)))
                .collect();
            if per.iter().all(|(_, s)| s.is_none()) {
                return None;
            }
            let rate = |m: Metric| mean_of(per.iter().map(|(_, s)| s.and_then(|s| s.mean(m))));
            let payoff_by_suite: Vec<Option<f64>> = per
                .iter()
                .map(|(k, s)| s.and_then(|s| s.mean(Metric::Fexp)).map(|v| v / k.max_payoff()))
                .collect();
            Some(OverallRow {
                name: name.clone(),
                payoff: mean_of(payoff_by_suite.iter().copied()),
                payoff_by_suite,
                conv: rate(Metric::Conv),
                ne: rate(Metric::Ne),
                po: rate(Metric::Po),
                wo: rate(Metric::Wo),
                fo: rate(Metric::Fo),
            })
        })
        .collect();
    OverallSummary {
        rows: overall_rows,
        missing,
        equivalent: equivalence_pairs(rows, Metric::Fexp, roster, level, true),
    }
}
