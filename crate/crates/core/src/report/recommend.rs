use super::{Evidence, MetricsReport, Recommendation, RecommendationKind};
use crate::model::Ratio;

/// Derives recommendations from a report's metric grid and thresholds.
///
/// * `NO_POTENTIAL` when nothing is shared by all products.
/// * `SEED_PAIR` for the pair with the highest RR; ties go to the
///   lexicographically smallest pair of product ids. Omitted when no pair
///   shares anything.
/// * `REFACTOR_CANDIDATE` for the product holding the unique highest IR and
///   for every product whose IR exceeds `tau_ir`.
/// * `EXCLUSION_CANDIDATE` for products with PrR below `tau_prr` and IPrR
///   below `tau_iprr`.
/// * `NOT_MEANINGFUL_PAIR` for every pair whose RB is undefined.
///
/// Exclusion and seed recommendations may name the same product; both are
/// listed.
pub fn recommend(report: &MetricsReport) -> Vec<Recommendation> {
    let mut out = Vec::new();
    let cfg = &report.config;
    let all_ids: Vec<String> = report.products.iter().map(|p| p.id.clone()).collect();

    if report.soc == 0 {
        out.push(Recommendation {
            kind: RecommendationKind::NoPotential,
            subjects: all_ids.clone(),
            rationale: "SoC = 0: no component is shared by all products".to_string(),
            evidence: vec![Evidence {
                metric: "SoC",
                subjects: all_ids.clone(),
                value: Ratio::from_counts(report.soc, 1),
            }],
        });
    }

    let seed = report
        .pairs
        .iter()
        .filter(|p| p.rr > Ratio::zero())
        .min_by(|a, b| {
            b.rr.partial_cmp(&a.rr)
                .expect("RR is always defined")
                .then_with(|| sorted_pair(report.pair_ids(a)).cmp(&sorted_pair(report.pair_ids(b))))
        });
    if let Some(pair) = seed {
        let (a, b) = report.pair_ids(pair);
        out.push(Recommendation {
            kind: RecommendationKind::SeedPair,
            subjects: vec![a.to_string(), b.to_string()],
            rationale: format!(
                "RR({a}, {b}) = {} is the highest relationship ratio; start the product line with these products",
                pair.rr.to_fixed2()
            ),
            evidence: vec![Evidence {
                metric: "RR",
                subjects: vec![a.to_string(), b.to_string()],
                value: pair.rr,
            }],
        });
    }

    let max_ir = report
        .products
        .iter()
        .map(|p| p.ir)
        .fold(None::<Ratio>, |acc, ir| match acc {
            Some(m) if m >= ir => Some(m),
            _ => Some(ir),
        });
    let holders = report.products.iter().filter(|p| Some(p.ir) == max_ir).count();
    for p in &report.products {
        let strict_max = holders == 1 && Some(p.ir) == max_ir;
        let above = p.ir > cfg.tau_ir;
        if !(strict_max || above) {
            continue;
        }
        let mut reasons = Vec::new();
        if strict_max {
            reasons.push("the highest individualization ratio".to_string());
        }
        if above {
            reasons.push(format!("above the threshold {}", cfg.tau_ir.to_fixed2()));
        }
        out.push(Recommendation {
            kind: RecommendationKind::RefactorCandidate,
            subjects: vec![p.id.clone()],
            rationale: format!(
                "IR({}) = {} is {}; analyze it for refactoring to raise its reusability",
                p.id,
                p.ir.to_fixed2(),
                reasons.join(" and ")
            ),
            evidence: vec![Evidence {
                metric: "IR",
                subjects: vec![p.id.clone()],
                value: p.ir,
            }],
        });
    }

    for p in &report.products {
        let small_prr = p.prr < cfg.tau_prr;
        let small_iprr = p.iprr.is_defined() && p.iprr < cfg.tau_iprr;
        if small_prr && small_iprr {
            out.push(Recommendation {
                kind: RecommendationKind::ExclusionCandidate,
                subjects: vec![p.id.clone()],
                rationale: format!(
                    "PrR({id}) = {} < {} and IPrR({id}) = {} < {}; consider leaving it out of the product line",
                    p.prr.to_fixed2(),
                    cfg.tau_prr.to_fixed2(),
                    p.iprr.to_fixed2(),
                    cfg.tau_iprr.to_fixed2(),
                    id = p.id
                ),
                evidence: vec![
                    Evidence {
                        metric: "PrR",
                        subjects: vec![p.id.clone()],
                        value: p.prr,
                    },
                    Evidence {
                        metric: "IPrR",
                        subjects: vec![p.id.clone()],
                        value: p.iprr,
                    },
                ],
            });
        }
    }

    for pair in report.pairs.iter().filter(|p| !p.rb.is_defined()) {
        let (a, b) = report.pair_ids(pair);
        out.push(Recommendation {
            kind: RecommendationKind::NotMeaningfulPair,
            subjects: vec![a.to_string(), b.to_string()],
            rationale: format!("{a} and {b} share no component, so RB({a}, {b}) is undefined"),
            evidence: vec![Evidence {
                metric: "RB",
                subjects: vec![a.to_string(), b.to_string()],
                value: pair.rb,
            }],
        });
    }

    out
}

fn sorted_pair<'a>((a, b): (&'a str, &'a str)) -> (&'a str, &'a str) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}
