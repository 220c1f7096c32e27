//! Commonality and variability metrics over a set of classified products.
//!
//! All metrics work on component keys (see [`crate::identity`]) and return
//! exact ratios. A zero denominator yields [`Ratio::Undefined`]: the
//! comparison it would describe is not meaningful.
//!
//! | metric | value |
//! |--------|-------|
//! | SoC    | `|⋂ C_i|` |
//! | IoC    | `|⋂ C_i,r| / SoC` |
//! | PrR_i  | `SoC / |C_i|` |
//! | IPrR_i | `|⋂ C_j,r| / |C_i,r|` |
//! | RB_ij  | `SoC / |C_i ∩ C_j|` |
//! | RR_ij  | `|C_i ∩ C_j| / |C_i ∪ C_j|` |
//! | IR_i   | `|C_i \ ⋃_{k≠i} C_k| / |C_i|` |

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::classify::{classify_components, ClassifyError};
use crate::identity::{product_keys, ComponentKey, IdentityError, SharingLattice, MAX_PRODUCTS};
use crate::model::{Classification, ProductGraph, Ratio};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("at least 2 products are required, got {0}")]
    TooFewProducts(usize),
    #[error("at most {MAX_PRODUCTS} products can be compared, got {0}")]
    TooManyProducts(usize),
    #[error("product `{0}` appears more than once")]
    DuplicateProduct(String),
    #[error("classification of product `{0}` does not partition its components")]
    BadClassification(String),
    #[error("product index {index} out of range for {len} products")]
    BadIndex { index: usize, len: usize },
    #[error("a pairwise metric needs two different products, got index {0} twice")]
    SameProduct(usize),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Identity(#[from] IdentityError),
}

/// Key sets of one product, split by status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductKeys {
    pub all: BTreeSet<ComponentKey>,
    pub required: BTreeSet<ComponentKey>,
    pub optional: BTreeSet<ComponentKey>,
}

/// Classified products with their key sets and sharing lattice.
#[derive(Debug, Clone)]
pub struct ProductSetAnalysis {
    products: Vec<(ProductGraph, Classification)>,
    keys: Vec<ProductKeys>,
    lattice: SharingLattice,
    required_mask: BTreeMap<ComponentKey, u64>,
}

impl ProductSetAnalysis {
    pub fn new(products: Vec<(ProductGraph, Classification)>) -> Result<Self, MetricsError> {
        if products.len() < 2 {
            return Err(MetricsError::TooFewProducts(products.len()));
        }
        if products.len() > MAX_PRODUCTS {
            return Err(MetricsError::TooManyProducts(products.len()));
        }
        let mut ids = BTreeSet::new();
        for (p, c) in &products {
            if !ids.insert(p.id()) {
                return Err(MetricsError::DuplicateProduct(p.id().to_string()));
            }
            if !c.partitions(&p.component_names()) {
                return Err(MetricsError::BadClassification(p.id().to_string()));
            }
        }

        let mut keys = Vec::with_capacity(products.len());
        let mut required_mask: BTreeMap<ComponentKey, u64> = BTreeMap::new();
        for (i, (p, c)) in products.iter().enumerate() {
            let by_name = product_keys(p);
            let mut pk = ProductKeys {
                all: BTreeSet::new(),
                required: BTreeSet::new(),
                optional: BTreeSet::new(),
            };
            for (name, key) in by_name {
                if c.required.contains(&name) {
                    *required_mask.entry(key.clone()).or_default() |= 1u64 << i;
                    pk.required.insert(key.clone());
                } else {
                    pk.optional.insert(key.clone());
                }
                pk.all.insert(key);
            }
            keys.push(pk);
        }

        let graphs: Vec<ProductGraph> = products.iter().map(|(p, _)| p.clone()).collect();
        let lattice = SharingLattice::build(&graphs)?;
        Ok(Self {
            products,
            keys,
            lattice,
            required_mask,
        })
    }

    /// Classifies each product, then builds the analysis.
    pub fn classify(products: Vec<ProductGraph>) -> Result<Self, MetricsError> {
        let classified = products
            .into_iter()
            .map(|p| {
                let c = classify_components(&p)?;
                Ok((p, c))
            })
            .collect::<Result<Vec<_>, ClassifyError>>()?;
        Self::new(classified)
    }

    pub fn len(&self) -> usize {
        self.products.len()
    }

    pub fn is_empty(&self) -> bool {
        self.products.is_empty()
    }

    pub fn products(&self) -> &[(ProductGraph, Classification)] {
        &self.products
    }

    pub fn product_ids(&self) -> &[String] {
        self.lattice.products()
    }

    pub fn keys(&self, i: usize) -> Result<&ProductKeys, MetricsError> {
        self.check(i)?;
        Ok(&self.keys[i])
    }

    pub fn lattice(&self) -> &SharingLattice {
        &self.lattice
    }

    /// Index pairs `(i, j)` with `i < j`, in lexicographic order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
    }

    fn check(&self, i: usize) -> Result<(), MetricsError> {
        if i < self.len() {
            Ok(())
        } else {
            Err(MetricsError::BadIndex {
                index: i,
                len: self.len(),
            })
        }
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<(), MetricsError> {
        self.check(i)?;
        self.check(j)?;
        if i == j {
            return Err(MetricsError::SameProduct(i));
        }
        Ok(())
    }

    fn full_mask(&self) -> u64 {
        if self.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.len()) - 1
        }
    }

    /// `|⋂ C_i,r|`: keys required in every product.
    pub fn common_required_count(&self) -> usize {
        let full = self.full_mask();
        self.required_mask.values().filter(|&&m| m == full).count()
    }

    /// `|⋂ C_i,o|`: keys optional in every product.
    pub fn common_optional_count(&self) -> usize {
        let full = self.full_mask();
        self.lattice
            .membership()
            .iter()
            .filter(|(k, &m)| m == full && self.required_mask.get(*k).copied().unwrap_or(0) == 0)
            .count()
    }

    fn pair_intersection(&self, i: usize, j: usize) -> usize {
        let want = (1u64 << i) | (1u64 << j);
        self.lattice.membership().values().filter(|&&m| m & want == want).count()
    }
}

pub fn size_of_commonality(a: &ProductSetAnalysis) -> usize {
    let full = a.full_mask();
    a.lattice.membership().values().filter(|&&m| m == full).count()
}

/// A key shared by every product whose status is not the same everywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatusWarning {
    pub key: ComponentKey,
    pub required_in: Vec<String>,
    pub optional_in: Vec<String>,
}

/// One warning per common key that is required in some products and
/// optional in others. Empty iff `SoC = |⋂ C_r| + |⋂ C_o|`.
pub fn commonality_consistency_check(a: &ProductSetAnalysis) -> Vec<StatusWarning> {
    let full = a.full_mask();
    let ids = a.product_ids();
    a.lattice
        .membership()
        .iter()
        .filter(|(_, &m)| m == full)
        .filter_map(|(key, _)| {
            let req = a.required_mask.get(key).copied().unwrap_or(0);
            if req == 0 || req == full {
                return None;
            }
            let (required_in, optional_in): (Vec<usize>, Vec<usize>) =
                (0..a.len()).partition(|i| req & (1u64 << i) != 0);
            Some(StatusWarning {
                key: key.clone(),
                required_in: required_in.into_iter().map(|i| ids[i].clone()).collect(),
                optional_in: optional_in.into_iter().map(|i| ids[i].clone()).collect(),
            })
        })
        .collect()
}

pub fn impact_of_commonality(a: &ProductSetAnalysis) -> Ratio {
    Ratio::from_counts(a.common_required_count(), size_of_commonality(a))
}

pub fn product_related_reusability(a: &ProductSetAnalysis, i: usize) -> Result<Ratio, MetricsError> {
    a.check(i)?;
    Ok(Ratio::from_counts(size_of_commonality(a), a.keys[i].all.len()))
}

pub fn impact_of_product_related_reusability(a: &ProductSetAnalysis, i: usize) -> Result<Ratio, MetricsError> {
    a.check(i)?;
    Ok(Ratio::from_counts(a.common_required_count(), a.keys[i].required.len()))
}

pub fn reusability_benefit(a: &ProductSetAnalysis, i: usize, j: usize) -> Result<Ratio, MetricsError> {
    a.check_pair(i, j)?;
    Ok(Ratio::from_counts(size_of_commonality(a), a.pair_intersection(i, j)))
}

pub fn relationship_ratio(a: &ProductSetAnalysis, i: usize, j: usize) -> Result<Ratio, MetricsError> {
    a.check_pair(i, j)?;
    let inter = a.pair_intersection(i, j);
    let union = a.keys[i].all.len() + a.keys[j].all.len() - inter;
    Ok(Ratio::from_counts(inter, union))
}

pub fn individualization_ratio(a: &ProductSetAnalysis, i: usize) -> Result<Ratio, MetricsError> {
    a.check(i)?;
    let only = 1u64 << i;
    let exclusive = a.lattice.membership().values().filter(|&&m| m == only).count();
    Ok(Ratio::from_counts(exclusive, a.keys[i].all.len()))
}
