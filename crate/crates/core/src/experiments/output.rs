use std::fmt::Write as _;

use serde::Serialize;

use crate::verification::BoundCheckReport;

/// Comment block written at the top of every CSV.
#[derive(Debug, Clone)]
pub struct CsvHeader {
    lines: Vec<String>,
}

impl CsvHeader {
    /// Records the crate version, the experiment name, the resolved plan as
    /// one line of JSON, and the master seed.
    pub fn new<P: Serialize>(experiment: &str, plan: &P, seed: u64) -> Self {
        let plan = serde_json::to_string(plan).expect("plans serialize");
        Self {
            lines: vec![
                format!("pareto-bandit {}", crate::VERSION),
                format!("experiment: {experiment}"),
                format!("config: {plan}"),
                format!("seed: {seed}"),
            ],
        }
    }

    pub fn push(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for l in &self.lines {
            writeln!(out, "# {l}").unwrap();
        }
        out
    }
}

pub fn reports_csv(header: &CsvHeader, reports: &[BoundCheckReport]) -> String {
    let mut out = header.render();
    out.push_str(BoundCheckReport::CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// Comma-joined values, either shortest round-trip or with fixed decimals.
pub fn format_vector(values: &[f64], precision: Option<usize>) -> String {
    values
        .iter()
        .map(|v| match precision {
            Some(p) => format!("{v:.p$}"),
            None => format!("{v}"),
        })
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_lines_are_comments() {
        let h = CsvHeader::new("fig1", &serde_json::json!({"n": 5}), 9);
        let text = h.render();
        assert!(text.lines().all(|l| l.starts_with("# ")));
        assert!(text.contains("# seed: 9"));
        assert!(text.contains(r#"# config: {"n":5}"#));
    }

    #[test]
    fn vector_formatting() {
        assert_eq!(format_vector(&[5000f64.sqrt(); 2], Some(4)), "70.7107,70.7107");
        assert_eq!(format_vector(&[0.1, 2.0], None), "0.1,2");
    }
}
