//! Random product generator and brute-force oracles shared by the
//! integration suites. Nothing in here calls into `classify`, `identity` or
//! `metrics`; the oracles recompute everything from the raw graphs.

#![allow(dead_code)]

use std::collections::BTreeSet;

use product_line_metrics::model::{
    Component, DependencyEdge, MessageSignature, Optionality, ProductGraph, TypeTag,
};
use rand::seq::SliceRandom;
use rand::Rng;

pub const NAME_POOL: usize = 20;

fn signature_pool() -> Vec<MessageSignature> {
    vec![
        MessageSignature::empty(),
        MessageSignature::from_fields([("v", TypeTag::Nat)]).unwrap(),
        MessageSignature::from_fields([("a", TypeTag::Int), ("b", TypeTag::Real)]).unwrap(),
        MessageSignature::from_fields([("s", TypeTag::Named("Speed".into()))]).unwrap(),
    ]
}

fn random_optionality<R: Rng>(rng: &mut R) -> Optionality {
    if rng.gen_bool(0.5) {
        Optionality::Required
    } else {
        Optionality::Optional
    }
}

/// `n` products drawn from a shared template graph so that many components
/// coincide across products while others differ in name or interface.
pub fn random_product_set<R: Rng>(rng: &mut R, n: usize, max_components: usize) -> Vec<ProductGraph> {
    let sigs = signature_pool();
    let names: Vec<String> = (0..NAME_POOL).map(|i| format!("N{i}")).collect();
    let mut template = Vec::new();
    for a in &names {
        for b in &names {
            if a != b && rng.gen_bool(0.12) {
                template.push(DependencyEdge::new(
                    a.clone(),
                    b.clone(),
                    sigs.choose(rng).unwrap().clone(),
                    random_optionality(rng),
                ));
            }
        }
    }

    (0..n)
        .map(|pi| {
            let k = rng.gen_range(1..=max_components.min(NAME_POOL));
            let chosen: Vec<String> = names.choose_multiple(rng, k).cloned().collect();
            let mut p = ProductGraph::new(format!("p{pi}"));
            for name in &chosen {
                let c = if rng.gen_bool(0.1) {
                    Component::with_accepts(name.clone(), [sigs.choose(rng).unwrap().clone()])
                } else {
                    Component::new(name.clone())
                };
                p.add_component(c).unwrap();
            }
            for e in &template {
                if p.has_component(&e.source) && p.has_component(&e.target) && rng.gen_bool(0.85) {
                    let mut e = e.clone();
                    if rng.gen_bool(0.1) {
                        e.optionality = random_optionality(rng);
                    }
                    let _ = p.add_edge(e);
                }
            }
            if chosen.len() > 1 && rng.gen_bool(0.3) {
                let a = chosen.choose(rng).unwrap().clone();
                let b = chosen.choose(rng).unwrap().clone();
                let _ = p.add_edge(DependencyEdge::new(a, b, sigs.choose(rng).unwrap().clone(), random_optionality(rng)));
            }
            if rng.gen_bool(0.85) {
                let starts = rng.gen_range(1..=2.min(chosen.len()));
                for s in chosen.choose_multiple(rng, starts) {
                    p.add_start(s.clone()).unwrap();
                }
                if rng.gen_bool(0.2) {
                    let d = chosen.choose(rng).unwrap().clone();
                    p.declare(d, random_optionality(rng)).unwrap();
                }
            } else {
                for name in &chosen {
                    p.declare(name.clone(), random_optionality(rng)).unwrap();
                }
            }
            p
        })
        .collect()
}

/// Bijective rename of components and field ids.
pub fn rename(products: &[ProductGraph]) -> Vec<ProductGraph> {
    fn map(s: &str) -> String {
        format!("x_{}", s.chars().rev().collect::<String>())
    }
    fn map_sig(sig: &MessageSignature) -> MessageSignature {
        MessageSignature::from_fields(sig.fields().map(|(id, ty)| (map(id), ty.clone()))).unwrap()
    }
    products
        .iter()
        .map(|p| {
            let mut q = ProductGraph::new(p.id());
            for c in p.components() {
                q.add_component(Component::with_accepts(map(&c.name), c.accepts.iter().map(map_sig)))
                    .unwrap();
            }
            for e in p.edges() {
                q.add_edge(DependencyEdge::new(map(&e.source), map(&e.target), map_sig(&e.signature), e.optionality))
                    .unwrap();
            }
            for s in p.start_set() {
                q.add_start(map(s)).unwrap();
            }
            for (n, s) in p.declared_classification() {
                q.declare(map(n), *s).unwrap();
            }
            q
        })
        .collect()
}

/// Classification by fixpoint iteration over required edges, ignoring
/// direction. Returns the required set, or `None` when there is no basis.
pub fn oracle_required(p: &ProductGraph) -> Option<BTreeSet<String>> {
    let declared = p.declared_classification();
    if p.start_set().is_empty() {
        let all = p.components().all(|c| declared.contains_key(&c.name));
        if !all || p.component_count() == 0 {
            return None;
        }
        return Some(
            declared
                .iter()
                .filter(|(_, s)| **s == Optionality::Required)
                .map(|(n, _)| n.clone())
                .collect(),
        );
    }
    let mut set: BTreeSet<String> = p.start_set().clone();
    set.extend(
        declared
            .iter()
            .filter(|(_, s)| **s == Optionality::Required)
            .map(|(n, _)| n.clone()),
    );
    loop {
        let before = set.len();
        for e in p.edges().filter(|e| e.optionality == Optionality::Required) {
            if set.contains(&e.source) || set.contains(&e.target) {
                set.insert(e.source.clone());
                set.insert(e.target.clone());
            }
        }
        if set.len() == before {
            return Some(set);
        }
    }
}

/// Identity key computed by string comparison: name plus sorted rendered
/// signatures of declared accepts and incoming edges.
pub type OracleKey = (String, Vec<String>);

pub fn oracle_key(p: &ProductGraph, name: &str) -> OracleKey {
    let mut sigs: Vec<String> = p
        .component(name)
        .unwrap()
        .accepts
        .iter()
        .map(|s| s.to_string())
        .collect();
    for e in p.edges() {
        if e.target == name {
            sigs.push(e.signature.to_string());
        }
    }
    sigs.sort();
    sigs.dedup();
    (name.to_string(), sigs)
}

/// Membership table: one row per (product, component).
pub struct Table {
    pub n: usize,
    pub ids: Vec<String>,
    pub rows: Vec<(usize, OracleKey, bool)>,
}

impl Table {
    pub fn new(products: &[ProductGraph]) -> Table {
        let mut rows = Vec::new();
        for (i, p) in products.iter().enumerate() {
            let required = oracle_required(p).expect("classifiable");
            for c in p.components() {
                rows.push((i, oracle_key(p, &c.name), required.contains(&c.name)));
            }
        }
        Table {
            n: products.len(),
            ids: products.iter().map(|p| p.id().to_string()).collect(),
            rows,
        }
    }

    pub fn has(&self, i: usize, key: &OracleKey) -> bool {
        self.rows.iter().any(|(j, k, _)| *j == i && k == key)
    }

    pub fn has_required(&self, i: usize, key: &OracleKey) -> bool {
        self.rows.iter().any(|(j, k, r)| *j == i && k == key && *r)
    }

    pub fn keys_of(&self, i: usize) -> Vec<OracleKey> {
        let mut v: Vec<OracleKey> = self.rows.iter().filter(|(j, _, _)| *j == i).map(|(_, k, _)| k.clone()).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn universe(&self) -> Vec<OracleKey> {
        let mut v: Vec<OracleKey> = self.rows.iter().map(|(_, k, _)| k.clone()).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn in_all(&self, subset: &[usize]) -> Vec<OracleKey> {
        self.universe().into_iter().filter(|k| subset.iter().all(|&i| self.has(i, k))).collect()
    }

    pub fn exactly_in(&self, subset: &[usize]) -> Vec<OracleKey> {
        self.universe()
            .into_iter()
            .filter(|k| (0..self.n).all(|i| self.has(i, k) == subset.contains(&i)))
            .collect()
    }

    pub fn soc(&self) -> u64 {
        let all: Vec<usize> = (0..self.n).collect();
        self.in_all(&all).len() as u64
    }

    pub fn common_required(&self) -> u64 {
        self.universe()
            .iter()
            .filter(|k| (0..self.n).all(|i| self.has_required(i, k)))
            .count() as u64
    }

    pub fn size(&self, i: usize) -> u64 {
        self.keys_of(i).len() as u64
    }

    pub fn required_size(&self, i: usize) -> u64 {
        self.rows.iter().filter(|(j, _, r)| *j == i && *r).count() as u64
    }

    pub fn pair_intersection(&self, i: usize, j: usize) -> u64 {
        self.in_all(&[i, j]).len() as u64
    }

    pub fn pair_union(&self, i: usize, j: usize) -> u64 {
        self.universe().iter().filter(|k| self.has(i, k) || self.has(j, k)).count() as u64
    }

    /// `(num, den)` pairs; den = 0 marks an undefined value.
    pub fn ioc(&self) -> (u64, u64) {
        (self.common_required(), self.soc())
    }

    pub fn prr(&self, i: usize) -> (u64, u64) {
        (self.soc(), self.size(i))
    }

    pub fn iprr(&self, i: usize) -> (u64, u64) {
        (self.common_required(), self.required_size(i))
    }

    pub fn rb(&self, i: usize, j: usize) -> (u64, u64) {
        (self.soc(), self.pair_intersection(i, j))
    }

    pub fn rr(&self, i: usize, j: usize) -> (u64, u64) {
        (self.pair_intersection(i, j), self.pair_union(i, j))
    }

    pub fn ir(&self, i: usize) -> (u64, u64) {
        (self.exactly_in(&[i]).len() as u64, self.size(i))
    }

    /// Common keys whose required flag differs between products.
    pub fn status_inconsistent(&self) -> usize {
        let all: Vec<usize> = (0..self.n).collect();
        self.in_all(&all)
            .iter()
            .filter(|k| {
                let req = (0..self.n).filter(|&i| self.has_required(i, k)).count();
                req != 0 && req != self.n
            })
            .count()
    }
}

/// Cross-multiplied comparison of an oracle fraction against a ratio.
pub fn same(expected: (u64, u64), actual: product_line_metrics::Ratio) -> bool {
    match (expected, actual.parts()) {
        ((_, 0), None) => true,
        ((a, b), Some((c, d))) if b != 0 => a as u128 * d as u128 == c as u128 * b as u128,
        _ => false,
    }
}

/// Every non-empty subset of `0..n` as sorted index lists.
pub fn subsets(n: usize) -> Vec<Vec<usize>> {
    (1u32..(1 << n))
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect()
}

/// Synthetic products with `size` components each: a long required chain
/// with every seventh link optional. Product `pi` renames the components
/// with `c % 20 == pi` and changes the signature into `c % 26 == pi`, so
/// sharing is partial but (for fewer than 20 products) never empty.
pub fn synthetic_products(count: usize, size: usize) -> Vec<ProductGraph> {
    (0..count)
        .map(|pi| {
            let mut p = ProductGraph::new(format!("product_{pi:02}"));
            let name = |c: usize| {
                if c % 20 == pi {
                    format!("C{c}_v{pi}")
                } else {
                    format!("C{c}")
                }
            };
            for c in 0..size {
                p.add_component(Component::new(name(c))).unwrap();
            }
            let sig = MessageSignature::from_fields([("v", TypeTag::Nat)]).unwrap();
            for c in 1..size {
                let status = if c % 7 == 0 { Optionality::Optional } else { Optionality::Required };
                let sig = if c % 26 == pi { MessageSignature::empty() } else { sig.clone() };
                p.add_edge(DependencyEdge::new(name(c - 1), name(c), sig, status)).unwrap();
            }
            p.add_start(name(1)).unwrap();
            p
        })
        .collect()
}

pub mod checks;
