//! Domain vocabulary: message signatures, components, dependency edges,
//! product graphs, classifications and exact ratio values.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Float;
use thiserror::Error;

/// Type of a single field inside a message signature.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TypeTag {
    Nat,
    Int,
    Real,
    Named(String),
}

impl TypeTag {
    /// Maps a type token onto a tag. `NAT`, `INT` and `REAL` are reserved,
    /// every other identifier is a named type.
    pub fn from_token(token: &str) -> Option<TypeTag> {
        match token {
            "NAT" => Some(TypeTag::Nat),
            "INT" => Some(TypeTag::Int),
            "REAL" => Some(TypeTag::Real),
            other if is_identifier(other) => Some(TypeTag::Named(other.to_string())),
            _ => None,
        }
    }
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeTag::Nat => f.write_str("NAT"),
            TypeTag::Int => f.write_str("INT"),
            TypeTag::Real => f.write_str("REAL"),
            TypeTag::Named(name) => f.write_str(name),
        }
    }
}

/// Returns true for `[A-Za-z_][A-Za-z0-9_]*`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// The payload annotating a dependency: a set of `(field-id, type)` pairs.
///
/// Field ids are unique, so the set is stored as a map. The empty signature
/// is a plain call without data.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MessageSignature {
    fields: BTreeMap<String, TypeTag>,
}

impl MessageSignature {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a signature, rejecting repeated field ids.
    pub fn from_fields<I, S>(fields: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (S, TypeTag)>,
        S: Into<String>,
    {
        let mut sig = Self::default();
        for (id, ty) in fields {
            sig.insert(id.into(), ty)?;
        }
        Ok(sig)
    }

    pub fn insert(&mut self, id: String, ty: TypeTag) -> Result<(), ModelError> {
        if self.fields.contains_key(&id) {
            return Err(ModelError::DuplicateField(id));
        }
        self.fields.insert(id, ty);
        Ok(())
    }

    pub fn fields(&self) -> impl Iterator<Item = (&str, &TypeTag)> {
        self.fields.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }
}

impl fmt::Display for MessageSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (id, ty)) in self.fields.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{id}: {ty}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Component {
    pub name: String,
    /// Signatures the component declares it accepts. Empty means undeclared.
    pub accepts: BTreeSet<MessageSignature>,
}

impl Component {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            accepts: BTreeSet::new(),
        }
    }

    pub fn with_accepts(name: impl Into<String>, accepts: impl IntoIterator<Item = MessageSignature>) -> Self {
        Self {
            name: name.into(),
            accepts: accepts.into_iter().collect(),
        }
    }
}

/// Status of a dependency or a component. Unspecified edges are required.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Optionality {
    #[default]
    Required,
    Optional,
}

impl Optionality {
    pub fn as_str(self) -> &'static str {
        match self {
            Optionality::Required => "required",
            Optionality::Optional => "optional",
        }
    }
}

impl fmt::Display for Optionality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DependencyEdge {
    pub source: String,
    pub target: String,
    pub signature: MessageSignature,
    pub optionality: Optionality,
}

impl DependencyEdge {
    pub fn new(
        source: impl Into<String>,
        target: impl Into<String>,
        signature: MessageSignature,
        optionality: Optionality,
    ) -> Self {
        Self {
            source: source.into(),
            target: target.into(),
            signature,
            optionality,
        }
    }

    pub fn is_required(&self) -> bool {
        self.optionality == Optionality::Required
    }

    pub fn touches(&self, name: &str) -> bool {
        self.source == name || self.target == name
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("field `{0}` appears more than once in a signature")]
    DuplicateField(String),
    #[error("component `{0}` is declared more than once")]
    DuplicateComponent(String),
    #[error("unknown component `{0}`")]
    UnknownComponent(String),
    #[error("duplicate edge {from} -> {to} {signature}")]
    DuplicateEdge {
        from: String,
        to: String,
        signature: MessageSignature,
    },
    #[error("self-loop on component `{0}`")]
    SelfLoop(String),
    #[error("component `{name}` is declared both required and optional")]
    ConflictingDeclaration { name: String },
}

/// One product: its components, annotated dependency edges, entry set and an
/// optional (possibly partial) declared classification.
///
/// Construction goes through the `add_*` methods, which keep every edge,
/// start entry and declaration pointing at a declared component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductGraph {
    id: String,
    components: BTreeMap<String, Component>,
    edges: BTreeSet<DependencyEdge>,
    start_set: BTreeSet<String>,
    declared: BTreeMap<String, Optionality>,
}

impl ProductGraph {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            components: BTreeMap::new(),
            edges: BTreeSet::new(),
            start_set: BTreeSet::new(),
            declared: BTreeMap::new(),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn components(&self) -> impl Iterator<Item = &Component> {
        self.components.values()
    }

    pub fn component(&self, name: &str) -> Option<&Component> {
        self.components.get(name)
    }

    pub fn component_names(&self) -> BTreeSet<String> {
        self.components.keys().cloned().collect()
    }

    pub fn has_component(&self, name: &str) -> bool {
        self.components.contains_key(name)
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    /// Edges in canonical order: source, target, signature.
    pub fn edges(&self) -> impl Iterator<Item = &DependencyEdge> {
        self.edges.iter()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn start_set(&self) -> &BTreeSet<String> {
        &self.start_set
    }

    pub fn declared_classification(&self) -> &BTreeMap<String, Optionality> {
        &self.declared
    }

    pub fn add_component(&mut self, component: Component) -> Result<(), ModelError> {
        if self.components.contains_key(&component.name) {
            return Err(ModelError::DuplicateComponent(component.name));
        }
        self.components.insert(component.name.clone(), component);
        Ok(())
    }

    pub fn add_edge(&mut self, edge: DependencyEdge) -> Result<(), ModelError> {
        for end in [&edge.source, &edge.target] {
            if !self.components.contains_key(end) {
                return Err(ModelError::UnknownComponent(end.clone()));
            }
        }
        if edge.source == edge.target {
            return Err(ModelError::SelfLoop(edge.source));
        }
        let mut twin = edge.clone();
        twin.optionality = match edge.optionality {
            Optionality::Required => Optionality::Optional,
            Optionality::Optional => Optionality::Required,
        };
        if self.edges.contains(&edge) || self.edges.contains(&twin) {
            return Err(ModelError::DuplicateEdge {
                from: edge.source,
                to: edge.target,
                signature: edge.signature,
            });
        }
        self.edges.insert(edge);
        Ok(())
    }

    pub fn add_start(&mut self, name: impl Into<String>) -> Result<(), ModelError> {
        let name = name.into();
        if !self.components.contains_key(&name) {
            return Err(ModelError::UnknownComponent(name));
        }
        self.start_set.insert(name);
        Ok(())
    }

    /// Replaces the entry set; every name must be a declared component.
    pub fn set_start<I, S>(&mut self, names: I) -> Result<(), ModelError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: BTreeSet<String> = names.into_iter().map(Into::into).collect();
        if let Some(missing) = names.iter().find(|n| !self.components.contains_key(*n)) {
            return Err(ModelError::UnknownComponent(missing.clone()));
        }
        self.start_set = names;
        Ok(())
    }

    pub fn declare(&mut self, name: impl Into<String>, status: Optionality) -> Result<(), ModelError> {
        let name = name.into();
        if !self.components.contains_key(&name) {
            return Err(ModelError::UnknownComponent(name));
        }
        match self.declared.get(&name) {
            Some(prev) if *prev != status => Err(ModelError::ConflictingDeclaration { name }),
            _ => {
                self.declared.insert(name, status);
                Ok(())
            }
        }
    }

    /// Edges whose target is `name`.
    pub fn incoming<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a DependencyEdge> + 'a {
        self.edges.iter().filter(move |e| e.target == name)
    }

    /// True when the declared classification names every component.
    pub fn declaration_is_complete(&self) -> bool {
        !self.components.is_empty() && self.components.keys().all(|c| self.declared.contains_key(c))
    }
}

/// Required/optional partition of one product plus its isolated components.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Classification {
    pub required: BTreeSet<String>,
    pub optional: BTreeSet<String>,
    pub isolated: BTreeSet<String>,
}

impl Classification {
    pub fn status_of(&self, name: &str) -> Option<Optionality> {
        if self.required.contains(name) {
            Some(Optionality::Required)
        } else if self.optional.contains(name) {
            Some(Optionality::Optional)
        } else {
            None
        }
    }

    /// Checks that required and optional partition exactly `names`.
    pub fn partitions(&self, names: &BTreeSet<String>) -> bool {
        self.required.is_disjoint(&self.optional)
            && self.required.len() + self.optional.len() == names.len()
            && self.required.iter().chain(&self.optional).all(|n| names.contains(n))
    }
}

/// An exact non-negative ratio, or `Undefined` when the denominator is zero.
///
/// The unreduced numerator and denominator are kept so reports can show the
/// counts behind each value. Equality and ordering are exact rational
/// comparisons: `2/4 == 1/2`.
#[derive(Debug, Clone, Copy)]
pub enum Ratio {
    Defined { num: u64, den: u64 },
    Undefined,
}

impl Ratio {
    /// Builds `num / den`, yielding `Undefined` for a zero denominator.
    pub fn new(num: u64, den: u64) -> Ratio {
        if den == 0 {
            Ratio::Undefined
        } else {
            Ratio::Defined { num, den }
        }
    }

    pub fn from_counts(num: usize, den: usize) -> Ratio {
        Ratio::new(num as u64, den as u64)
    }

    pub fn zero() -> Ratio {
        Ratio::Defined { num: 0, den: 1 }
    }

    pub fn one() -> Ratio {
        Ratio::Defined { num: 1, den: 1 }
    }

    pub fn is_defined(&self) -> bool {
        matches!(self, Ratio::Defined { .. })
    }

    pub fn parts(&self) -> Option<(u64, u64)> {
        match *self {
            Ratio::Defined { num, den } => Some((num, den)),
            Ratio::Undefined => None,
        }
    }

    /// Lowest-terms form of a defined ratio.
    pub fn reduced(&self) -> Ratio {
        match *self {
            Ratio::Defined { num, den } => {
                let g = gcd(num, den);
                Ratio::Defined { num: num / g, den: den / g }
            }
            Ratio::Undefined => Ratio::Undefined,
        }
    }

    /// Value in any float type; `None` when undefined.
    pub fn to_float<F: Float>(&self) -> Option<F> {
        let (num, den) = self.parts()?;
        Some(F::from(num)? / F::from(den)?)
    }

    pub fn to_f64(&self) -> Option<f64> {
        self.to_float::<f64>()
    }

    /// The value in hundredths, rounded half-up with integer arithmetic.
    pub fn hundredths(&self) -> Option<u64> {
        let (num, den) = self.parts()?;
        let (num, den) = (num as u128, den as u128);
        Some(((200 * num + den) / (2 * den)) as u64)
    }

    /// Two-decimal rendering, half-up; `n/a` when undefined.
    pub fn to_fixed2(&self) -> String {
        match self.hundredths() {
            Some(h) => format!("{}.{:02}", h / 100, h % 100),
            None => "n/a".to_string(),
        }
    }

    /// Parses a non-negative decimal such as `0.25` or `1` exactly.
    pub fn parse_decimal(s: &str) -> Option<Ratio> {
        let s = s.trim();
        let (int_part, frac_part) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        if frac_part.len() > 18 {
            return None;
        }
        let den = 10u64.checked_pow(frac_part.len() as u32)?;
        let int: u64 = if int_part.is_empty() { 0 } else { int_part.parse().ok()? };
        let frac: u64 = if frac_part.is_empty() { 0 } else { frac_part.parse().ok()? };
        let num = int.checked_mul(den)?.checked_add(frac)?;
        Some(Ratio::Defined { num, den }.reduced())
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

impl PartialEq for Ratio {
    fn eq(&self, other: &Self) -> bool {
        match (*self, *other) {
            (Ratio::Undefined, Ratio::Undefined) => true,
            (Ratio::Defined { num: a, den: b }, Ratio::Defined { num: c, den: d }) => {
                a as u128 * d as u128 == c as u128 * b as u128
            }
            _ => false,
        }
    }
}

impl Eq for Ratio {}

/// Defined values compare numerically; `Undefined` only equals itself and is
/// unordered against defined values.
impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (*self, *other) {
            (Ratio::Undefined, Ratio::Undefined) => Some(Ordering::Equal),
            (Ratio::Defined { num: a, den: b }, Ratio::Defined { num: c, den: d }) => {
                Some((a as u128 * d as u128).cmp(&(c as u128 * b as u128)))
            }
            _ => None,
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ratio::Defined { num, den } => write!(f, "{num}/{den}"),
            Ratio::Undefined => f.write_str("undefined"),
        }
    }
}
