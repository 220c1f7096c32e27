//! Required/optional partition of a product's components.
//!
//! Every component starts out optional. Beginning at the entry set, the
//! traversal follows required edges in both directions, so a component that
//! depends on a required component through a required edge is required too,
//! and so is everything a required component requires. Whatever the
//! traversal reaches forms `C_r`; the rest stays in `C_o`. Components with no
//! edges at all are never reached and are reported separately.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::model::{Classification, Optionality, ProductGraph};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("product `{product}` has no start set and no complete declared classification")]
    NoClassificationBasis { product: String },
    #[error("start component `{name}` does not exist in product `{product}`")]
    StartNotFound { product: String, name: String },
}

/// A declared status that disagrees with what the graph yields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub name: String,
    pub declared: Optionality,
    pub derived: Optionality,
}

/// Components with no incident edge.
pub fn find_isolated(product: &ProductGraph) -> BTreeSet<String> {
    let mut touched: BTreeSet<&str> = BTreeSet::new();
    for e in product.edges() {
        touched.insert(&e.source);
        touched.insert(&e.target);
    }
    product
        .components()
        .map(|c| c.name.as_str())
        .filter(|n| !touched.contains(n))
        .map(str::to_string)
        .collect()
}

/// Components connected to `start` through required edges, ignoring edge
/// direction. The start components themselves are always included.
pub fn required_closure<'a, I>(product: &ProductGraph, start: I) -> Result<BTreeSet<String>, ClassifyError>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut adjacency: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for e in product.edges().filter(|e| e.is_required()) {
        adjacency.entry(&e.source).or_default().push(&e.target);
        adjacency.entry(&e.target).or_default().push(&e.source);
    }

    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut queue: VecDeque<&str> = VecDeque::new();
    for name in start {
        if !product.has_component(name) {
            return Err(ClassifyError::StartNotFound {
                product: product.id().to_string(),
                name: name.to_string(),
            });
        }
        if seen.insert(name.to_string()) {
            queue.push_back(name);
        }
    }
    while let Some(node) = queue.pop_front() {
        for &next in adjacency.get(node).into_iter().flatten() {
            if seen.insert(next.to_string()) {
                queue.push_back(next);
            }
        }
    }
    Ok(seen)
}

fn partition(product: &ProductGraph, required: BTreeSet<String>) -> Classification {
    let optional = product
        .components()
        .map(|c| &c.name)
        .filter(|n| !required.contains(*n))
        .cloned()
        .collect();
    Classification {
        required,
        optional,
        isolated: find_isolated(product),
    }
}

/// Classifies every component of `product`.
///
/// With a start set, the traversal begins at the start set plus every
/// component declared required; the derived partition is returned even
/// where it disagrees with declarations (see [`classification_mismatches`]).
/// Without a start set, a declaration covering every component is taken
/// as-is.
pub fn classify_components(product: &ProductGraph) -> Result<Classification, ClassifyError> {
    let declared = product.declared_classification();
    if product.start_set().is_empty() {
        if !product.declaration_is_complete() {
            return Err(ClassifyError::NoClassificationBasis {
                product: product.id().to_string(),
            });
        }
        let required = declared
            .iter()
            .filter(|(_, s)| **s == Optionality::Required)
            .map(|(n, _)| n.clone())
            .collect();
        return Ok(partition(product, required));
    }
    let required = required_closure(product, effective_start(product))?;
    Ok(partition(product, required))
}

fn effective_start(product: &ProductGraph) -> impl Iterator<Item = &str> {
    product.start_set().iter().map(String::as_str).chain(
        product
            .declared_classification()
            .iter()
            .filter(|(_, s)| **s == Optionality::Required)
            .map(|(n, _)| n.as_str()),
    )
}

/// Declarations contradicted by the graph.
///
/// A component declared required is checked against the closure of the
/// start set alone. A component declared optional is checked against the
/// classification actually returned, where reachability wins. Empty when
/// the product has no start set, since then nothing is derived.
pub fn classification_mismatches(product: &ProductGraph) -> Vec<Mismatch> {
    if product.start_set().is_empty() || product.declared_classification().is_empty() {
        return Vec::new();
    }
    let Ok(from_start) = required_closure(product, product.start_set().iter().map(String::as_str)) else {
        return Vec::new();
    };
    let Ok(effective) = required_closure(product, effective_start(product)) else {
        return Vec::new();
    };
    product
        .declared_classification()
        .iter()
        .filter_map(|(name, &declared)| {
            let reached = match declared {
                Optionality::Required => from_start.contains(name),
                Optionality::Optional => effective.contains(name),
            };
            let derived = if reached { Optionality::Required } else { Optionality::Optional };
            (derived != declared).then(|| Mismatch {
                name: name.clone(),
                declared,
                derived,
            })
        })
        .collect()
}
