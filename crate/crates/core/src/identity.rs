//! Syntactic signature identity across products and the sharing regions it
//! induces.
//!
//! A component's key is its name together with its effective interface:
//! the signatures it declares it accepts plus every signature arriving on an
//! incoming edge. Two components of different products are the same asset
//! iff their keys are equal. Outgoing edges and required/optional status do
//! not take part. This check is necessary for reuse but says nothing about
//! behaviour.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::model::{MessageSignature, ProductGraph};

/// Upper bound on the number of products in one analysis; membership is
/// tracked as a 64-bit mask.
pub const MAX_PRODUCTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdentityError {
    #[error("unknown component `{name}` in product `{product}`")]
    UnknownComponent { product: String, name: String },
    #[error("product subset is empty")]
    EmptySubset,
    #[error("product index {index} out of range for {len} products")]
    BadIndex { index: usize, len: usize },
    #[error("at most {MAX_PRODUCTS} products can be compared, got {0}")]
    TooManyProducts(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComponentKey {
    pub name: String,
    pub interface: BTreeSet<MessageSignature>,
}

impl fmt::Display for ComponentKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.interface.is_empty() {
            f.write_str("[")?;
            for (i, sig) in self.interface.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{sig}")?;
            }
            f.write_str("]")?;
        }
        Ok(())
    }
}

pub fn component_key(product: &ProductGraph, name: &str) -> Result<ComponentKey, IdentityError> {
    let component = product.component(name).ok_or_else(|| IdentityError::UnknownComponent {
        product: product.id().to_string(),
        name: name.to_string(),
    })?;
    let mut interface = component.accepts.clone();
    interface.extend(product.incoming(name).map(|e| e.signature.clone()));
    Ok(ComponentKey {
        name: name.to_string(),
        interface,
    })
}

/// Keys of every component in `product`, by component name.
pub fn product_keys(product: &ProductGraph) -> BTreeMap<String, ComponentKey> {
    let mut keys: BTreeMap<String, ComponentKey> = product
        .components()
        .map(|c| {
            (
                c.name.clone(),
                ComponentKey {
                    name: c.name.clone(),
                    interface: c.accepts.clone(),
                },
            )
        })
        .collect();
    for e in product.edges() {
        if let Some(k) = keys.get_mut(&e.target) {
            k.interface.insert(e.signature.clone());
        }
    }
    keys
}

/// A non-empty set of product indices, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProductSubset(Vec<usize>);

impl ProductSubset {
    pub fn new(indices: impl IntoIterator<Item = usize>, len: usize) -> Result<Self, IdentityError> {
        let set: BTreeSet<usize> = indices.into_iter().collect();
        if set.is_empty() {
            return Err(IdentityError::EmptySubset);
        }
        if let Some(&index) = set.iter().find(|&&i| i >= len) {
            return Err(IdentityError::BadIndex { index, len });
        }
        Ok(Self(set.into_iter().collect()))
    }

    fn from_mask(mask: u64) -> Self {
        Self((0..MAX_PRODUCTS).filter(|i| mask & (1u64 << i) != 0).collect())
    }

    pub fn mask(&self) -> u64 {
        self.0.iter().fold(0, |m, i| m | (1u64 << i))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.binary_search(&index).is_ok()
    }

    /// Every non-empty subset of `0..n`, ordered by size then indices.
    pub fn all(n: usize) -> Vec<ProductSubset> {
        assert!(n <= 20, "enumerating subsets of {n} products");
        let mut subsets: Vec<ProductSubset> = (1u64..(1u64 << n)).map(Self::from_mask).collect();
        subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.0.cmp(&b.0)));
        subsets
    }
}

fn check_subset(len: usize, subset: &[usize]) -> Result<ProductSubset, IdentityError> {
    ProductSubset::new(subset.iter().copied(), len)
}

/// Keys present in every product of `subset` (indices into `products`).
pub fn shared_by_all(products: &[ProductGraph], subset: &[usize]) -> Result<BTreeSet<ComponentKey>, IdentityError> {
    let subset = check_subset(products.len(), subset)?;
    let mut iter = subset.indices().iter();
    let first = *iter.next().expect("subset is non-empty");
    let mut shared: BTreeSet<ComponentKey> = product_keys(&products[first]).into_values().collect();
    for &i in iter {
        let keys: BTreeSet<ComponentKey> = product_keys(&products[i]).into_values().collect();
        shared.retain(|k| keys.contains(k));
    }
    Ok(shared)
}

/// Keys present in every product of `subset` and in no other product.
pub fn exclusive_region(
    products: &[ProductGraph],
    subset: &[usize],
) -> Result<BTreeSet<ComponentKey>, IdentityError> {
    let mut region = shared_by_all(products, subset)?;
    for (i, p) in products.iter().enumerate() {
        if subset.contains(&i) {
            continue;
        }
        let keys: BTreeSet<ComponentKey> = product_keys(p).into_values().collect();
        region.retain(|k| !keys.contains(k));
    }
    Ok(region)
}

/// All sharing regions of a product set.
///
/// Each key is stored once, under the exact subset of products that contain
/// it; the "present in all of T" view is derived from those exact regions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharingLattice {
    products: Vec<String>,
    membership: BTreeMap<ComponentKey, u64>,
    exact: BTreeMap<u64, BTreeSet<ComponentKey>>,
}

impl SharingLattice {
    pub fn build(products: &[ProductGraph]) -> Result<Self, IdentityError> {
        if products.len() > MAX_PRODUCTS {
            return Err(IdentityError::TooManyProducts(products.len()));
        }
        let mut membership: BTreeMap<ComponentKey, u64> = BTreeMap::new();
        for (i, p) in products.iter().enumerate() {
            for key in product_keys(p).into_values() {
                *membership.entry(key).or_default() |= 1u64 << i;
            }
        }
        let mut exact: BTreeMap<u64, BTreeSet<ComponentKey>> = BTreeMap::new();
        for (key, &mask) in &membership {
            exact.entry(mask).or_default().insert(key.clone());
        }
        Ok(Self {
            products: products.iter().map(|p| p.id().to_string()).collect(),
            membership,
            exact,
        })
    }

    pub fn products(&self) -> &[String] {
        &self.products
    }

    pub fn len(&self) -> usize {
        self.products.len()
    }

    pub fn is_empty(&self) -> bool {
        self.products.is_empty()
    }

    pub fn full_subset(&self) -> ProductSubset {
        ProductSubset((0..self.products.len()).collect())
    }

    /// Every distinct key with the mask of products that contain it.
    pub fn membership(&self) -> &BTreeMap<ComponentKey, u64> {
        &self.membership
    }

    pub fn universe(&self) -> impl Iterator<Item = &ComponentKey> {
        self.membership.keys()
    }

    /// Products containing `key`, if any do.
    pub fn products_with(&self, key: &ComponentKey) -> Option<ProductSubset> {
        self.membership.get(key).map(|&m| ProductSubset::from_mask(m))
    }

    pub fn by_subset_exact(&self, subset: &ProductSubset) -> BTreeSet<ComponentKey> {
        self.exact.get(&subset.mask()).cloned().unwrap_or_default()
    }

    pub fn by_subset_all(&self, subset: &ProductSubset) -> BTreeSet<ComponentKey> {
        let want = subset.mask();
        self.exact
            .iter()
            .filter(|(&mask, _)| mask & want == want)
            .flat_map(|(_, keys)| keys.iter().cloned())
            .collect()
    }

    /// Non-empty exact regions in subset order.
    pub fn exact_regions(&self) -> Vec<(ProductSubset, &BTreeSet<ComponentKey>)> {
        let mut regions: Vec<_> = self
            .exact
            .iter()
            .map(|(&mask, keys)| (ProductSubset::from_mask(mask), keys))
            .collect();
        regions.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
        regions
    }
}
