use std::fmt::Write as _;
use std::str::FromStr;

use super::grid::{MeanStd, MetricReport, MetricSummary};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Markdown,
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(Error::InvalidParameter(format!("unknown report format `{s}`"))),
        }
    }
}

fn proxy_mean(s: &MetricSummary) -> Option<f64> {
    s.proxy_accuracy.map(|m| m.mean)
}

/// Proxy-accuracy gain in percentage points: against `baseline` when given,
/// otherwise against the best other imputer.
fn gains(report: &MetricReport, baseline: Option<&str>) -> Result<Vec<Option<f64>>> {
    let s = &report.summaries;
    if let Some(b) = baseline {
        let base = s
            .iter()
            .find(|x| x.imputer == b)
            .ok_or_else(|| Error::InvalidParameter(format!("baseline `{b}` is not in the report")))?;
        let bm = proxy_mean(base);
        return Ok(s
            .iter()
            .map(|x| match (x.imputer != b, proxy_mean(x), bm) {
                (true, Some(a), Some(b)) => Some(a - b),
                _ => None,
            })
            .collect());
    }
    Ok((0..s.len())
        .map(|i| {
            let mine = proxy_mean(&s[i])?;
            let best_other = (0..s.len())
                .filter(|&j| j != i)
                .filter_map(|j| proxy_mean(&s[j]))
                .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))))?;
            Some(mine - best_other)
        })
        .collect())
}

fn gain_text(g: Option<f64>) -> String {
    g.map(|g| format!("{:+.1}%", g * 100.0)).unwrap_or_default()
}

fn pm(m: Option<MeanStd>) -> String {
    m.map(|m| format!("{:.4} ± {:.4}", m.mean, m.std)).unwrap_or_default()
}

fn num(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.4}")).unwrap_or_default()
}

/// Renders the per-imputer summary (mean ± std over repetitions plus the
/// gain column) and, for markdown, the per-repetition rows.
pub fn render_report(report: &MetricReport, format: ReportFormat, baseline: Option<&str>) -> Result<String> {
    let gains = gains(report, baseline)?;
    let mut out = String::new();
    match format {
        ReportFormat::Json => {
            out = serde_json::to_string_pretty(report)?;
            out.push('\n');
        }
        ReportFormat::Markdown => {
            let _ = writeln!(
                out,
                "# {} / {}\n\nRepetitions: {}, eval fraction: {:.2}, proxy k: {}, seed: {}\n",
                report.dataset,
                report.mechanism.name(),
                report.repetitions,
                report.eval_fraction,
                report.proxy_k,
                report.seed
            );
            let gain_head = match baseline {
                Some(b) => format!("Gain vs {b}"),
                None => "Gain".into(),
            };
            let _ = writeln!(out, "| Imputer | Runs | Proxy accuracy | {gain_head} | Standardized RMSE | Cell accuracy |");
            out.push_str("|---|---|---|---|---|---|\n");
            for (s, g) in report.summaries.iter().zip(&gains) {
                let _ = writeln!(
                    out,
                    "| {} | {}/{} | {} | {} | {} | {} |",
                    s.imputer,
                    s.runs - s.failed,
                    s.runs,
                    pm(s.proxy_accuracy),
                    gain_text(*g),
                    pm(s.rmse),
                    pm(s.cell_accuracy)
                );
            }
            out.push_str("\n## Repetitions\n\n| Imputer | Rep | Seed | Proxy accuracy | Standardized RMSE | Cell accuracy | Error |\n|---|---|---|---|---|---|---|\n");
            for r in &report.rows {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} | {} | {} |",
                    r.imputer,
                    r.repetition,
                    r.seed,
                    num(r.proxy_accuracy),
                    num(r.rmse),
                    num(r.cell_accuracy),
                    r.error.as_deref().unwrap_or("")
                );
            }
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "imputer", "runs", "failed", "proxy_mean", "proxy_std", "gain", "rmse_mean", "rmse_std",
                "cell_accuracy_mean", "cell_accuracy_std",
            ])?;
            for (s, g) in report.summaries.iter().zip(&gains) {
                let f = |m: Option<MeanStd>| (num(m.map(|m| m.mean)), num(m.map(|m| m.std)));
                let (pa, ps) = f(s.proxy_accuracy);
                let (ra, rs) = f(s.rmse);
                let (ca, cs) = f(s.cell_accuracy);
                w.write_record([
                    s.imputer.clone(),
                    s.runs.to_string(),
                    s.failed.to_string(),
                    pa,
                    ps,
                    gain_text(*g),
                    ra,
                    rs,
                    ca,
                    cs,
                ])?;
            }
            out = String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?).expect("utf-8 csv");
        }
    }
    Ok(out)
}
