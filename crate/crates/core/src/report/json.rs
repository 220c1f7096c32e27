//! Machine-readable report.
//!
//! Every ratio is `{"num", "den", "rounded"}` with the unreduced counts, or
//! `null` when undefined. Key order is fixed by the struct layout below.

use serde::Serialize;

use super::MetricsReport;
use crate::identity::ComponentKey;
use crate::model::Ratio;

pub const REPORT_VERSION: u32 = 1;

#[derive(Serialize)]
struct JsonRatio {
    num: u64,
    den: u64,
    rounded: f64,
}

fn ratio(r: Ratio) -> Option<JsonRatio> {
    let (num, den) = r.parts()?;
    Some(JsonRatio {
        num,
        den,
        rounded: r.hundredths()? as f64 / 100.0,
    })
}

#[derive(Serialize)]
struct JsonReport<'a> {
    version: u32,
    identity: &'static str,
    config: JsonConfig,
    products: Vec<JsonProduct<'a>>,
    metrics: JsonMetrics<'a>,
    regions: Vec<JsonRegion<'a>>,
    warnings: Vec<JsonWarning<'a>>,
    recommendations: Vec<JsonRecommendation<'a>>,
    notes: &'a [String],
}

#[derive(Serialize)]
struct JsonConfig {
    strict: bool,
    tau_ir: Option<JsonRatio>,
    tau_prr: Option<JsonRatio>,
    tau_iprr: Option<JsonRatio>,
}

#[derive(Serialize)]
struct JsonProduct<'a> {
    id: &'a str,
    components: usize,
    required: Vec<&'a str>,
    optional: Vec<&'a str>,
    isolated: Vec<&'a str>,
}

#[derive(Serialize)]
struct JsonMetrics<'a> {
    soc: usize,
    common_required: usize,
    common_optional: usize,
    ioc: Option<JsonRatio>,
    per_product: Vec<JsonPerProduct<'a>>,
    pairwise: Vec<JsonPair<'a>>,
}

#[derive(Serialize)]
struct JsonPerProduct<'a> {
    product: &'a str,
    prr: Option<JsonRatio>,
    iprr: Option<JsonRatio>,
    ir: Option<JsonRatio>,
}

#[derive(Serialize)]
struct JsonPair<'a> {
    products: [&'a str; 2],
    shared: usize,
    rb: Option<JsonRatio>,
    rr: Option<JsonRatio>,
}

#[derive(Serialize)]
struct JsonKey<'a> {
    name: &'a str,
    interface: Vec<String>,
}

impl<'a> From<&'a ComponentKey> for JsonKey<'a> {
    fn from(k: &'a ComponentKey) -> Self {
        Self {
            name: &k.name,
            interface: k.interface.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Serialize)]
struct JsonRegion<'a> {
    products: &'a [String],
    keys: Vec<JsonKey<'a>>,
}

#[derive(Serialize)]
struct JsonWarning<'a> {
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    product: Option<&'a str>,
    message: &'a str,
}

#[derive(Serialize)]
struct JsonEvidence<'a> {
    metric: &'static str,
    subjects: &'a [String],
    value: Option<JsonRatio>,
}

#[derive(Serialize)]
struct JsonRecommendation<'a> {
    kind: &'static str,
    subjects: &'a [String],
    rationale: &'a str,
    evidence: Vec<JsonEvidence<'a>>,
}

fn names(set: &std::collections::BTreeSet<String>) -> Vec<&str> {
    set.iter().map(String::as_str).collect()
}

pub(super) fn render_json(report: &MetricsReport) -> String {
    let doc = JsonReport {
        version: REPORT_VERSION,
        identity: "syntactic",
        config: JsonConfig {
            strict: report.config.strict,
            tau_ir: ratio(report.config.tau_ir),
            tau_prr: ratio(report.config.tau_prr),
            tau_iprr: ratio(report.config.tau_iprr),
        },
        products: report
            .products
            .iter()
            .map(|p| JsonProduct {
                id: &p.id,
                components: p.component_count,
                required: names(&p.classification.required),
                optional: names(&p.classification.optional),
                isolated: names(&p.classification.isolated),
            })
            .collect(),
        metrics: JsonMetrics {
            soc: report.soc,
            common_required: report.common_required,
            common_optional: report.common_optional,
            ioc: ratio(report.ioc),
            per_product: report
                .products
                .iter()
                .map(|p| JsonPerProduct {
                    product: &p.id,
                    prr: ratio(p.prr),
                    iprr: ratio(p.iprr),
                    ir: ratio(p.ir),
                })
                .collect(),
            pairwise: report
                .pairs
                .iter()
                .map(|p| {
                    let (a, b) = report.pair_ids(p);
                    JsonPair {
                        products: [a, b],
                        shared: p.shared,
                        rb: ratio(p.rb),
                        rr: ratio(p.rr),
                    }
                })
                .collect(),
        },
        regions: report
            .regions
            .iter()
            .map(|r| JsonRegion {
                products: &r.products,
                keys: r.keys.iter().map(JsonKey::from).collect(),
            })
            .collect(),
        warnings: report
            .warnings
            .iter()
            .map(|w| JsonWarning {
                kind: w.kind.as_str(),
                product: w.product.as_deref(),
                message: &w.message,
            })
            .collect(),
        recommendations: report
            .recommendations
            .iter()
            .map(|r| JsonRecommendation {
                kind: r.kind.as_str(),
                subjects: &r.subjects,
                rationale: &r.rationale,
                evidence: r
                    .evidence
                    .iter()
                    .map(|e| JsonEvidence {
                        metric: e.metric,
                        subjects: &e.subjects,
                        value: ratio(e.value),
                    })
                    .collect(),
            })
            .collect(),
        notes: &report.notes,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
    s.push('\n');
    s
}
