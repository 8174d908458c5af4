//! Text, JSON and CSV rendering of reports.

use std::fmt::Write;

use crate::run::{CorpusResult, OutputFormat};
use crate::similarity::ComparisonReport;

/// Environment variable that turns off terminal styling.
pub const NO_COLOR_ENV: &str = "LOWDUP_NO_COLOR";

pub const CSV_HEADER: [&str; 8] = [
    "a",
    "b",
    "mode",
    "matched",
    "involved",
    "mt",
    "imt",
    "similarity",
];

#[derive(Debug, Clone, Copy, Default)]
pub struct Style {
    pub color: bool,
}

impl Style {
    fn bold(&self, s: &str) -> String {
        if self.color {
            format!("\x1b[1m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }
}

pub fn render_report(report: &ComparisonReport, format: OutputFormat, style: Style) -> String {
    match format {
        OutputFormat::Text => report_text(report, style),
        OutputFormat::Json => to_json(report),
        OutputFormat::Csv => to_csv(std::iter::once(report)),
    }
}

pub fn render_corpus(result: &CorpusResult, format: OutputFormat, style: Style) -> String {
    match format {
        OutputFormat::Text => corpus_text(result, style),
        OutputFormat::Json => to_json(result),
        OutputFormat::Csv => to_csv(result.ranked()),
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn to_csv<'r>(reports: impl Iterator<Item = &'r ComparisonReport>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in reports {
        w.write_record([
            r.a.clone(),
            r.b.clone(),
            r.mode.to_string(),
            r.matched_total.to_string(),
            r.involved.to_string(),
            r.mt.to_string(),
            r.imt.to_string(),
            r.similarity.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}

fn report_text(r: &ComparisonReport, style: Style) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {} vs {}", style.bold(r.mode.as_str()), r.a, r.b);
    let _ = writeln!(out, "similarity {:.4}", r.similarity);
    let _ = writeln!(
        out,
        "matched {} of {} involved",
        r.matched_total, r.involved
    );
    let _ = writeln!(out, "mt {}  imt {}", r.mt, r.imt);
    if r.pairs.iter().any(|p| !p.tiles.is_empty()) {
        let _ = writeln!(out, "{}", style.bold("pairs"));
        for p in &r.pairs {
            let _ = writeln!(
                out,
                "  {} ~ {}  sig {:.4}  matched {}",
                p.key_a, p.key_b, p.sig_score, p.matched
            );
            for t in &p.tiles {
                let _ = writeln!(
                    out,
                    "    tile a@{} b@{} len {}",
                    t.start_a, t.start_b, t.length
                );
            }
        }
    }
    out
}

fn corpus_text(result: &CorpusResult, style: Style) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{}",
        style.bold(&format!(
            "{} submissions, {} pairs, mode {}",
            result.metadata.submissions.len(),
            result.reports.len(),
            result.metadata.config.mode
        ))
    );
    for (rank, r) in result.ranked().enumerate() {
        let _ = writeln!(
            out,
            "{:>4}  {:.4}  imt {:>6}  {}  {}",
            rank + 1,
            r.similarity,
            r.imt,
            r.a,
            r.b
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::similarity::{MethodPair, Mode};

    fn report() -> ComparisonReport {
        ComparisonReport::new(
            Mode::LaM,
            vec![MethodPair {
                key_a: "A.f:()V".into(),
                key_b: "B.f:()V".into(),
                sig_score: 0.75,
                tiles: vec![],
                matched: 3,
            }],
            7,
        )
        .with_names("x, y", "z")
    }

    #[test]
    fn csv_row() {
        let out = render_report(&report(), OutputFormat::Csv, Style::default());
        assert_eq!(
            out,
            "a,b,mode,matched,involved,mt,imt,similarity\n\"x, y\",z,LA_M,3,7,4,-4,0.42857142857142855\n"
        );
    }

    #[test]
    fn json_round_trip() {
        let first = render_report(&report(), OutputFormat::Json, Style::default());
        let parsed: ComparisonReport = serde_json::from_str(&first).unwrap();
        assert_eq!(
            render_report(&parsed, OutputFormat::Json, Style::default()),
            first
        );
    }

    #[test]
    fn plain_text_has_no_escapes() {
        let out = render_report(&report(), OutputFormat::Text, Style { color: false });
        assert!(!out.contains('\x1b'));
        let out = render_report(&report(), OutputFormat::Text, Style { color: true });
        assert!(out.contains('\x1b'));
    }
}
