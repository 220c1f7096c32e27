//! Property checks comparing the library against the oracles in the parent
//! module. Each returns a description of the first violation.

use product_line_metrics::classify::{classify_components, find_isolated};
use product_line_metrics::identity::{product_keys, ComponentKey, ProductSubset, SharingLattice};
use product_line_metrics::metrics::{self, ProductSetAnalysis};
use product_line_metrics::model::{ProductGraph, Ratio};
use product_line_metrics::parser::{parse_products, serialize_products};
use product_line_metrics::report::{build_report, RecommendationKind, ReportConfig};

use super::{oracle_key, oracle_required, rename, same, subsets, OracleKey, Table};

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}

fn to_oracle(k: &ComponentKey) -> OracleKey {
    let mut sigs: Vec<String> = k.interface.iter().map(|s| s.to_string()).collect();
    sigs.sort();
    (k.name.clone(), sigs)
}

pub fn classification(products: &[ProductGraph]) -> Check {
    for p in products {
        let c = classify_components(p).map_err(|e| e.to_string())?;
        let expected = oracle_required(p).ok_or("oracle found no basis")?;
        ensure!(c.required == expected, "{}: required {:?} != oracle {:?}", p.id(), c.required, expected);
        ensure!(c.partitions(&p.component_names()), "{}: not a partition", p.id());
        let isolated: Vec<String> = p
            .components()
            .filter(|c| !p.edges().any(|e| e.source == c.name || e.target == c.name))
            .map(|c| c.name.clone())
            .collect();
        ensure!(
            find_isolated(p).into_iter().collect::<Vec<_>>() == isolated,
            "{}: isolated mismatch",
            p.id()
        );
        for name in &c.isolated {
            let forced = p.start_set().contains(name)
                || p.declared_classification().get(name) == Some(&product_line_metrics::Optionality::Required);
            ensure!(!c.required.contains(name) || forced, "{}: isolated {name} is required", p.id());
        }
    }
    Ok(())
}

pub fn identity(products: &[ProductGraph]) -> Check {
    let mut all: Vec<(ComponentKey, OracleKey)> = Vec::new();
    for p in products {
        for (name, key) in product_keys(p) {
            all.push((key, oracle_key(p, &name)));
        }
    }
    for (k1, o1) in &all {
        for (k2, o2) in &all {
            ensure!((k1 == k2) == (o1 == o2), "identity disagrees for {k1} / {k2}");
        }
    }
    Ok(())
}

pub fn regions(products: &[ProductGraph]) -> Check {
    let n = products.len();
    let table = Table::new(products);
    let lattice = SharingLattice::build(products).map_err(|e| e.to_string())?;
    let universe: Vec<OracleKey> = table.universe();
    let mut covered: Vec<OracleKey> = Vec::new();
    for subset in subsets(n) {
        let s = ProductSubset::new(subset.iter().copied(), n).unwrap();
        let exact: Vec<OracleKey> = lattice.by_subset_exact(&s).iter().map(to_oracle).collect();
        let mut exact_sorted = exact.clone();
        exact_sorted.sort();
        ensure!(exact_sorted == table.exactly_in(&subset), "exact region {subset:?} differs");
        covered.extend(exact);
        let mut in_all: Vec<OracleKey> = lattice.by_subset_all(&s).iter().map(to_oracle).collect();
        in_all.sort();
        ensure!(in_all == table.in_all(&subset), "in-all region {subset:?} differs");
        for bigger in subsets(n) {
            if subset.iter().all(|i| bigger.contains(i)) {
                let b = ProductSubset::new(bigger.iter().copied(), n).unwrap();
                ensure!(
                    lattice.by_subset_all(&b).is_subset(&lattice.by_subset_all(&s)),
                    "antitone violated for {subset:?} ⊆ {bigger:?}"
                );
            }
        }
    }
    let total = covered.len();
    covered.sort();
    covered.dedup();
    ensure!(covered.len() == total, "exact regions overlap");
    ensure!(covered == universe, "exact regions do not cover the key universe");
    Ok(())
}

/// Exact metric values for comparisons across runs.
#[derive(Debug, PartialEq)]
pub struct Grid {
    pub soc: usize,
    pub ioc: Ratio,
    pub per_product: Vec<[Ratio; 3]>,
    pub pairs: Vec<[Ratio; 2]>,
}

pub fn grid(products: &[ProductGraph]) -> Result<Grid, String> {
    let a = ProductSetAnalysis::classify(products.to_vec()).map_err(|e| e.to_string())?;
    let n = a.len();
    let mut per_product = Vec::new();
    for i in 0..n {
        per_product.push([
            metrics::product_related_reusability(&a, i).unwrap(),
            metrics::impact_of_product_related_reusability(&a, i).unwrap(),
            metrics::individualization_ratio(&a, i).unwrap(),
        ]);
    }
    let mut pairs = Vec::new();
    for (i, j) in a.pairs() {
        pairs.push([
            metrics::reusability_benefit(&a, i, j).unwrap(),
            metrics::relationship_ratio(&a, i, j).unwrap(),
        ]);
    }
    Ok(Grid {
        soc: metrics::size_of_commonality(&a),
        ioc: metrics::impact_of_commonality(&a),
        per_product,
        pairs,
    })
}

pub fn metrics_vs_oracle(products: &[ProductGraph]) -> Check {
    let n = products.len();
    let table = Table::new(products);
    let a = ProductSetAnalysis::classify(products.to_vec()).map_err(|e| e.to_string())?;
    ensure!(metrics::size_of_commonality(&a) as u64 == table.soc(), "SoC differs");
    ensure!(same(table.ioc(), metrics::impact_of_commonality(&a)), "IoC differs");
    ensure!(
        metrics::commonality_consistency_check(&a).len() == table.status_inconsistent(),
        "consistency warnings differ"
    );
    for i in 0..n {
        ensure!(same(table.prr(i), metrics::product_related_reusability(&a, i).unwrap()), "PrR_{i} differs");
        ensure!(
            same(table.iprr(i), metrics::impact_of_product_related_reusability(&a, i).unwrap()),
            "IPrR_{i} differs"
        );
        ensure!(same(table.ir(i), metrics::individualization_ratio(&a, i).unwrap()), "IR_{i} differs");
        ensure!(metrics::size_of_commonality(&a) as u64 <= table.size(i), "SoC exceeds |C_{i}|");
        let shared = (table.size(i) - table.ir(i).0) as u128;
        let ir = metrics::individualization_ratio(&a, i).unwrap();
        let (num, den) = ir.parts().unwrap();
        ensure!(
            (den as u128 - num as u128) * table.size(i) as u128 == shared * den as u128,
            "IR complement differs for {i}"
        );
        for j in 0..n {
            if i == j {
                continue;
            }
            ensure!(same(table.rb(i, j), metrics::reusability_benefit(&a, i, j).unwrap()), "RB_{i}{j} differs");
            ensure!(same(table.rr(i, j), metrics::relationship_ratio(&a, i, j).unwrap()), "RR_{i}{j} differs");
            ensure!(
                metrics::reusability_benefit(&a, i, j).unwrap() == metrics::reusability_benefit(&a, j, i).unwrap(),
                "RB asymmetric"
            );
            ensure!(
                metrics::relationship_ratio(&a, i, j).unwrap() == metrics::relationship_ratio(&a, j, i).unwrap(),
                "RR asymmetric"
            );
            let decomposed: usize = subsets(n)
                .iter()
                .filter(|u| u.contains(&i) && u.contains(&j))
                .map(|u| a.lattice().by_subset_exact(&ProductSubset::new(u.iter().copied(), n).unwrap()).len())
                .sum();
            ensure!(decomposed as u64 == table.pair_intersection(i, j), "pair decomposition fails");
        }
    }
    Ok(())
}

pub fn ranges(products: &[ProductGraph]) -> Check {
    let g = grid(products)?;
    let mut all = vec![g.ioc];
    all.extend(g.per_product.iter().flatten().copied());
    all.extend(g.pairs.iter().flatten().copied());
    for r in all {
        if r.is_defined() {
            ensure!(r >= Ratio::zero() && r <= Ratio::one(), "ratio {r} outside [0,1]");
        }
    }
    Ok(())
}

fn seed_pair(products: Vec<ProductGraph>) -> Result<Option<Vec<String>>, String> {
    let r = build_report(products, ReportConfig::default()).map_err(|e| e.to_string())?;
    let seed = r.recommendations_of(RecommendationKind::SeedPair).next().map(|r| r.subjects.clone());
    Ok(seed)
}

pub fn rename_invariance(products: &[ProductGraph]) -> Check {
    let renamed = rename(products);
    ensure!(grid(products)? == grid(&renamed)?, "metrics change under renaming");
    ensure!(
        seed_pair(products.to_vec())? == seed_pair(renamed)?,
        "seed pair changes under renaming"
    );
    Ok(())
}

pub fn permutation_invariance(products: &[ProductGraph]) -> Check {
    let reversed: Vec<ProductGraph> = products.iter().rev().cloned().collect();
    let g = grid(products)?;
    let h = grid(&reversed)?;
    ensure!(g.soc == h.soc && g.ioc == h.ioc, "global metrics change under permutation");
    let n = products.len();
    for i in 0..n {
        ensure!(g.per_product[i] == h.per_product[n - 1 - i], "per-product metrics change under permutation");
    }
    let la = SharingLattice::build(products).unwrap();
    let lb = SharingLattice::build(&reversed).unwrap();
    for subset in subsets(n) {
        let s = ProductSubset::new(subset.iter().copied(), n).unwrap();
        let t = ProductSubset::new(subset.iter().map(|i| n - 1 - i), n).unwrap();
        ensure!(la.by_subset_exact(&s) == lb.by_subset_exact(&t), "region changes under permutation");
    }
    Ok(())
}

pub fn round_trip(products: &[ProductGraph]) -> Check {
    let text = serialize_products(products);
    let out = parse_products(&text, false);
    ensure!(!out.has_errors(), "serialized text fails to parse: {:?}", out.diagnostics);
    ensure!(out.products == products, "round trip changed products");
    ensure!(serialize_products(&out.products) == text, "serialization not canonical");
    Ok(())
}

/// Every check; metric checks only apply to sets of two or more products.
pub fn all(products: &[ProductGraph]) -> Check {
    classification(products)?;
    identity(products)?;
    regions(products)?;
    round_trip(products)?;
    if products.len() >= 2 {
        metrics_vs_oracle(products)?;
        ranges(products)?;
        rename_invariance(products)?;
        permutation_invariance(products)?;
    }
    Ok(())
}
