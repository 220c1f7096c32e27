//! End-to-end report: classification, sharing regions, every metric,
//! warnings and recommendations, rendered as a text table, JSON or DOT.

mod dot;
mod json;
mod recommend;
mod text;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::classify::{classification_mismatches, classify_components, ClassifyError};
use crate::identity::{ComponentKey, ProductSubset};
use crate::metrics::{self, MetricsError, ProductSetAnalysis};
use crate::model::{Classification, ProductGraph, Ratio};

pub use dot::render_products_dot;
pub use json::REPORT_VERSION;
pub use recommend::recommend;

/// Up to this many products every subset region is listed, empty or not.
pub const DENSE_REGION_LIMIT: usize = 5;

pub const IPRR_NOTE: &str = "IPrR is evaluated exactly as |common required| / |required of product|. \
The originally published door ECU results table lists 0.33 for every product; \
that value does not follow from the formula, which gives 0.50 on the same data.";

pub const IDENTITY_NOTE: &str = "Components are matched by syntactic signature identity \
(name plus accepted signatures). This is necessary for reuse but not sufficient: \
behavioural equivalence is not checked.";

/// Recommendation thresholds and strictness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReportConfig {
    /// Products with IR above this are refactoring candidates.
    pub tau_ir: Ratio,
    /// Products with PrR and IPrR both below their thresholds are exclusion
    /// candidates.
    pub tau_prr: Ratio,
    pub tau_iprr: Ratio,
    /// Declared/derived classification disagreements become errors.
    pub strict: bool,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            tau_ir: Ratio::new(1, 2),
            tau_prr: Ratio::new(1, 4),
            tau_iprr: Ratio::new(1, 4),
            strict: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReportError {
    #[error("at least 2 products are required for an analysis, got {0}")]
    TooFewProducts(usize),
    #[error("product `{product}`: `{component}` is declared {declared} but derives as {derived}")]
    ClassificationMismatch {
        product: String,
        component: String,
        declared: String,
        derived: String,
    },
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductSummary {
    pub id: String,
    pub component_count: usize,
    pub classification: Classification,
    /// Components whose key is shared by every product.
    pub common: BTreeSet<String>,
    pub prr: Ratio,
    pub iprr: Ratio,
    pub ir: Ratio,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSummary {
    pub first: usize,
    pub second: usize,
    pub shared: usize,
    pub rb: Ratio,
    pub rr: Ratio,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub subset: ProductSubset,
    pub products: Vec<String>,
    pub keys: Vec<ComponentKey>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum WarningKind {
    StatusInconsistent,
    Isolated,
    ClassificationMismatch,
}

impl WarningKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WarningKind::StatusInconsistent => "STATUS_INCONSISTENT",
            WarningKind::Isolated => "ISOLATED",
            WarningKind::ClassificationMismatch => "CLASSIFICATION_MISMATCH",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub kind: WarningKind,
    pub product: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RecommendationKind {
    NoPotential,
    SeedPair,
    RefactorCandidate,
    ExclusionCandidate,
    NotMeaningfulPair,
}

impl RecommendationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RecommendationKind::NoPotential => "NO_POTENTIAL",
            RecommendationKind::SeedPair => "SEED_PAIR",
            RecommendationKind::RefactorCandidate => "REFACTOR_CANDIDATE",
            RecommendationKind::ExclusionCandidate => "EXCLUSION_CANDIDATE",
            RecommendationKind::NotMeaningfulPair => "NOT_MEANINGFUL_PAIR",
        }
    }
}

/// A metric value a recommendation relies on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evidence {
    pub metric: &'static str,
    pub subjects: Vec<String>,
    pub value: Ratio,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recommendation {
    pub kind: RecommendationKind,
    pub subjects: Vec<String>,
    pub rationale: String,
    pub evidence: Vec<Evidence>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricsReport {
    pub config: ReportConfig,
    pub graphs: Vec<ProductGraph>,
    pub products: Vec<ProductSummary>,
    pub pairs: Vec<PairSummary>,
    pub soc: usize,
    pub common_required: usize,
    pub common_optional: usize,
    pub ioc: Ratio,
    pub regions: Vec<Region>,
    pub warnings: Vec<Warning>,
    pub recommendations: Vec<Recommendation>,
    pub notes: Vec<String>,
}

impl MetricsReport {
    pub fn product_ids(&self) -> Vec<&str> {
        self.products.iter().map(|p| p.id.as_str()).collect()
    }

    pub fn pair_ids(&self, pair: &PairSummary) -> (&str, &str) {
        (&self.products[pair.first].id, &self.products[pair.second].id)
    }

    /// Region holding keys present in exactly the given product indices.
    pub fn region(&self, indices: &[usize]) -> Option<&Region> {
        let subset = ProductSubset::new(indices.iter().copied(), self.products.len()).ok()?;
        self.regions.iter().find(|r| r.subset == subset)
    }

    pub fn recommendations_of(&self, kind: RecommendationKind) -> impl Iterator<Item = &Recommendation> {
        self.recommendations.iter().filter(move |r| r.kind == kind)
    }
}

/// Classifies every product, evaluates every metric and attaches warnings
/// and recommendations.
pub fn build_report(products: Vec<ProductGraph>, config: ReportConfig) -> Result<MetricsReport, ReportError> {
    if products.len() < 2 {
        return Err(ReportError::TooFewProducts(products.len()));
    }

    let mut warnings = Vec::new();
    let mut classified = Vec::with_capacity(products.len());
    for p in products {
        let c = classify_components(&p)?;
        for m in classification_mismatches(&p) {
            if config.strict {
                return Err(ReportError::ClassificationMismatch {
                    product: p.id().to_string(),
                    component: m.name,
                    declared: m.declared.to_string(),
                    derived: m.derived.to_string(),
                });
            }
            warnings.push(Warning {
                kind: WarningKind::ClassificationMismatch,
                product: Some(p.id().to_string()),
                message: format!(
                    "`{}` is declared {} but derives as {}; the derived status is used",
                    m.name, m.declared, m.derived
                ),
            });
        }
        for name in &c.isolated {
            warnings.push(Warning {
                kind: WarningKind::Isolated,
                product: Some(p.id().to_string()),
                message: format!("`{name}` has no dependencies; review its relevance manually"),
            });
        }
        classified.push((p, c));
    }

    let analysis = ProductSetAnalysis::new(classified)?;
    let n = analysis.len();
    let ids = analysis.product_ids().to_vec();
    let lattice = analysis.lattice();
    let common_keys = lattice.by_subset_all(&lattice.full_subset());

    let mut summaries = Vec::with_capacity(n);
    for (i, (graph, classification)) in analysis.products().iter().enumerate() {
        let keys = analysis.keys(i)?;
        let common = keys
            .all
            .iter()
            .filter(|k| common_keys.contains(*k))
            .map(|k| k.name.clone())
            .collect();
        summaries.push(ProductSummary {
            id: graph.id().to_string(),
            component_count: graph.component_count(),
            classification: classification.clone(),
            common,
            prr: metrics::product_related_reusability(&analysis, i)?,
            iprr: metrics::impact_of_product_related_reusability(&analysis, i)?,
            ir: metrics::individualization_ratio(&analysis, i)?,
        });
    }

    let mut pairs = Vec::new();
    for (i, j) in analysis.pairs() {
        let rr = metrics::relationship_ratio(&analysis, i, j)?;
        let rb = metrics::reusability_benefit(&analysis, i, j)?;
        let shared = match rr {
            Ratio::Defined { num, .. } => num as usize,
            Ratio::Undefined => 0,
        };
        pairs.push(PairSummary {
            first: i,
            second: j,
            shared,
            rb,
            rr,
        });
    }

    for w in metrics::commonality_consistency_check(&analysis) {
        warnings.push(Warning {
            kind: WarningKind::StatusInconsistent,
            product: None,
            message: format!(
                "`{}` is shared by all products but required in {} and optional in {}",
                w.key,
                w.required_in.join(", "),
                w.optional_in.join(", ")
            ),
        });
    }

    let regions = if n <= DENSE_REGION_LIMIT {
        ProductSubset::all(n)
            .into_iter()
            .map(|subset| {
                let keys = lattice.by_subset_exact(&subset).into_iter().collect();
                region(&ids, subset, keys)
            })
            .collect()
    } else {
        lattice
            .exact_regions()
            .into_iter()
            .map(|(subset, keys)| region(&ids, subset, keys.iter().cloned().collect()))
            .collect()
    };

    let mut report = MetricsReport {
        config,
        graphs: analysis.products().iter().map(|(g, _)| g.clone()).collect(),
        products: summaries,
        pairs,
        soc: metrics::size_of_commonality(&analysis),
        common_required: analysis.common_required_count(),
        common_optional: analysis.common_optional_count(),
        ioc: metrics::impact_of_commonality(&analysis),
        regions,
        warnings,
        recommendations: Vec::new(),
        notes: vec![IPRR_NOTE.to_string(), IDENTITY_NOTE.to_string()],
    };
    report.recommendations = recommend(&report);
    Ok(report)
}

fn region(ids: &[String], subset: ProductSubset, keys: Vec<ComponentKey>) -> Region {
    Region {
        products: subset.indices().iter().map(|&i| ids[i].clone()).collect(),
        subset,
        keys,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Machine,
    Dot,
}

pub fn render(report: &MetricsReport, format: Format) -> String {
    match format {
        Format::Text => text::render_text(report),
        Format::Machine => json::render_json(report),
        Format::Dot => dot::render_report_dot(report),
    }
}
