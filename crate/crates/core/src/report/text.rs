use std::fmt::Write as _;

use super::MetricsReport;

const IPRR_MARK: &str = "IPrR *";

pub(super) fn render_text(report: &MetricsReport) -> String {
    let mut out = String::new();
    let ids = report.product_ids();
    let pair_labels: Vec<String> = report
        .pairs
        .iter()
        .map(|p| {
            let (a, b) = report.pair_ids(p);
            format!("{a},{b}")
        })
        .collect();

    let mut headers: Vec<String> = vec!["all".to_string()];
    headers.extend(ids.iter().map(|s| s.to_string()));
    headers.extend(pair_labels.iter().cloned());
    let widths: Vec<usize> = headers.iter().map(|h| h.len().max(4) + 2).collect();
    let label_width = "number of components".len() + 2;
    let n = ids.len();

    let mut row = |label: &str, cells: Vec<String>| {
        let mut line = format!("{label:<label_width$}");
        for (cell, w) in cells.iter().zip(&widths) {
            let _ = write!(line, "{cell:>w$}");
        }
        out.push_str(line.trim_end());
        out.push('\n');
    };
    let blank = |k: usize| vec![String::new(); k];

    row("", headers.clone());
    row(
        "number of components",
        [blank(1), report.products.iter().map(|p| p.component_count.to_string()).collect()].concat(),
    );
    row("SoC", vec![report.soc.to_string()]);
    row("IoC", vec![report.ioc.to_fixed2()]);
    row(
        "PrR",
        [blank(1), report.products.iter().map(|p| p.prr.to_fixed2()).collect()].concat(),
    );
    row(
        IPRR_MARK,
        [blank(1), report.products.iter().map(|p| p.iprr.to_fixed2()).collect()].concat(),
    );
    row(
        "RB",
        [blank(1 + n), report.pairs.iter().map(|p| p.rb.to_fixed2()).collect()].concat(),
    );
    row(
        "RR",
        [blank(1 + n), report.pairs.iter().map(|p| p.rr.to_fixed2()).collect()].concat(),
    );
    row(
        "IR",
        [blank(1), report.products.iter().map(|p| p.ir.to_fixed2()).collect()].concat(),
    );

    out.push('\n');
    let _ = writeln!(out, "* {}", report.notes[0]);

    out.push_str("\nClassification\n");
    for p in &report.products {
        let c = &p.classification;
        let _ = writeln!(out, "  {}", p.id);
        let _ = writeln!(out, "    required: {}", join_or_dash(c.required.iter()));
        let _ = writeln!(out, "    optional: {}", join_or_dash(c.optional.iter()));
        let _ = writeln!(out, "    isolated: {}", join_or_dash(c.isolated.iter()));
    }

    out.push_str("\nSharing regions (keys present in exactly these products)\n");
    for r in &report.regions {
        let keys: Vec<String> = r.keys.iter().map(|k| k.to_string()).collect();
        let keys = if keys.is_empty() { "(empty)".to_string() } else { keys.join(", ") };
        let _ = writeln!(out, "  {{{}}}: {}", r.products.join(", "), keys);
    }

    out.push_str("\nWarnings\n");
    if report.warnings.is_empty() {
        out.push_str("  - none\n");
    }
    for w in &report.warnings {
        match &w.product {
            Some(p) => {
                let _ = writeln!(out, "  - [{}] {}: {}", w.kind.as_str(), p, w.message);
            }
            None => {
                let _ = writeln!(out, "  - [{}] {}", w.kind.as_str(), w.message);
            }
        }
    }

    out.push_str("\nRecommendations\n");
    if report.recommendations.is_empty() {
        out.push_str("  - none\n");
    }
    for r in &report.recommendations {
        let _ = writeln!(out, "  - {} {}: {}", r.kind.as_str(), r.subjects.join(", "), r.rationale);
    }

    out.push_str("\nNotes\n");
    for note in &report.notes[1..] {
        let _ = writeln!(out, "  - {note}");
    }
    let cfg = &report.config;
    let _ = writeln!(
        out,
        "  - thresholds: tau_ir = {}, tau_prr = {}, tau_iprr = {}; strict = {}",
        cfg.tau_ir.to_fixed2(),
        cfg.tau_prr.to_fixed2(),
        cfg.tau_iprr.to_fixed2(),
        cfg.strict
    );
    out
}

fn join_or_dash<'a>(names: impl Iterator<Item = &'a String>) -> String {
    let v: Vec<&str> = names.map(String::as_str).collect();
    if v.is_empty() {
        "-".to_string()
    } else {
        v.join(" ")
    }
}
