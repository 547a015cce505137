//! Evaluation reports: CSV table, JSON metadata and an SVG chart.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::TaskKind;
use crate::dataio::{self, HASH_ALGORITHM};
use crate::error::Result;
use crate::switching::SynergyKind;

pub const REPORT_CSV: &str = "report.csv";
pub const REPORT_JSON: &str = "report.json";
pub const REPORT_SVG: &str = "report.svg";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub task: TaskKind,
    pub synergy_kind: SynergyKind,
    pub synergy_name: String,
    pub n_s: usize,
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
}

impl ReportRow {
    pub fn new(
        task: TaskKind,
        synergy_kind: SynergyKind,
        synergy_name: &str,
        n_s: usize,
        trials: usize,
        successes: usize,
    ) -> Self {
        let rate = if trials == 0 {
            0.0
        } else {
            successes as f64 / trials as f64
        };
        ReportRow {
            task,
            synergy_kind,
            synergy_name: synergy_name.to_string(),
            n_s,
            trials,
            successes,
            rate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub task: TaskKind,
    pub seed: u64,
    pub dataset_hash: String,
    pub grasp_source_hash: String,
    pub fit_sequences: usize,
    pub eval_sequences: usize,
    pub rows: Vec<ReportRow>,
}

const SERIES: [(SynergyKind, &str); 3] = [
    (SynergyKind::Grasp, "#1f77b4"),
    (SynergyKind::TaskSpecific, "#ff7f0e"),
    (SynergyKind::Fdms, "#2ca02c"),
];

impl EvaluationReport {
    pub fn rows_of(&self, kind: SynergyKind) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(move |r| r.synergy_kind == kind)
    }

    pub fn rate(&self, kind: SynergyKind, n_s: usize) -> Option<f64> {
        self.rows_of(kind).find(|r| r.n_s == n_s).map(|r| r.rate)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("task,synergy_kind,synergy_name,n_s,trials,successes,rate\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{:.4}",
                r.task, r.synergy_kind, r.synergy_name, r.n_s, r.trials, r.successes, r.rate
            )
            .expect("write to string");
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            hash_algorithm: &'a str,
            #[serde(flatten)]
            report: &'a EvaluationReport,
        }
        let mut s = serde_json::to_string_pretty(&Doc {
            hash_algorithm: HASH_ALGORITHM,
            report: self,
        })
        .expect("report serializes");
        s.push('\n');
        s
    }

    /// Line chart of rate against `n_s`, one series per synergy kind.
    pub fn to_svg(&self) -> String {
        let (w, h) = (640.0, 400.0);
        let (left, right, top, bottom) = (60.0, 170.0, 40.0, 50.0);
        let pw = w - left - right;
        let ph = h - top - bottom;
        let max_ns = self.rows.iter().map(|r| r.n_s).max().unwrap_or(1).max(2);
        let x = |n: usize| left + pw * (n - 1) as f64 / (max_ns - 1) as f64;
        let y = |rate: f64| top + ph * (1.0 - rate);

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{} task: success rate vs principal components</text>"#,
            left + pw / 2.0,
            self.task
        );
        for k in 0..=4 {
            let rate = k as f64 / 4.0;
            let yy = y(rate);
            let _ = writeln!(
                s,
                r##"<line x1="{left:.1}" y1="{yy:.1}" x2="{:.1}" y2="{yy:.1}" stroke="#dddddd"/>"##,
                left + pw
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{rate:.2}</text>"#,
                left - 6.0,
                yy + 4.0
            );
        }
        for n in 1..=max_ns {
            let xx = x(n);
            let _ = writeln!(
                s,
                r##"<line x1="{xx:.1}" y1="{:.1}" x2="{xx:.1}" y2="{:.1}" stroke="#000000"/>"##,
                top + ph,
                top + ph + 4.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{xx:.1}" y="{:.1}" text-anchor="middle">{n}</text>"#,
                top + ph + 18.0
            );
        }
        let _ = writeln!(
            s,
            r##"<path d="M{left:.1},{top:.1} V{:.1} H{:.1}" fill="none" stroke="#000000"/>"##,
            top + ph,
            left + pw
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">n_s</text>"#,
            left + pw / 2.0,
            h - 10.0
        );
        let _ = writeln!(
            s,
            r#"<text transform="translate(16 {:.1}) rotate(-90)" text-anchor="middle">success rate</text>"#,
            top + ph / 2.0
        );
        for (i, (kind, color)) in SERIES.iter().enumerate() {
            let pts: Vec<String> = self
                .rows_of(*kind)
                .map(|r| format!("{:.1},{:.1}", x(r.n_s), y(r.rate)))
                .collect();
            if pts.is_empty() {
                continue;
            }
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                pts.join(" ")
            );
            for r in self.rows_of(*kind) {
                let _ = writeln!(
                    s,
                    r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}"/>"#,
                    x(r.n_s),
                    y(r.rate)
                );
            }
            let ly = top + 10.0 + 20.0 * i as f64;
            let lx = left + pw + 16.0;
            let _ = writeln!(
                s,
                r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#,
                lx + 20.0
            );
            let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}">{kind}</text>"#, lx + 26.0, ly + 4.0);
        }
        s.push_str("</svg>\n");
        s
    }

    /// Writes the CSV, JSON and SVG files into `dir`.
    pub fn write_to(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        dataio::write_file(&dir.join(REPORT_CSV), self.to_csv().as_bytes())?;
        dataio::write_file(&dir.join(REPORT_JSON), self.to_json().as_bytes())?;
        dataio::write_file(&dir.join(REPORT_SVG), self.to_svg().as_bytes())
    }
}
