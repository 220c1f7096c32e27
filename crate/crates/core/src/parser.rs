//! Reader and writer for the `.plp` product description format.
//!
//! The format is line oriented. `#` starts a comment, blank lines are
//! ignored, LF and CRLF line endings are both accepted:
//!
//! ```text
//! product door_ecu
//! component FLU accepts {lock: NAT}
//! component FLP
//! edge FLP -> FLU {lock: NAT} required
//! start FLU
//! classify optional FLP
//! ```
//!
//! Names may be used before the `component` line that declares them; they
//! are resolved when the product block ends.

use std::collections::BTreeSet;
use std::fmt;
use std::fmt::Write as _;

use serde::Serialize;

use crate::classify::{self, ClassifyError};
use crate::model::{
    is_identifier, Component, DependencyEdge, MessageSignature, ModelError, Optionality, ProductGraph, TypeTag,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Code {
    Syntax,
    DupComponent,
    UnknownComponent,
    DupEdge,
    SelfLoop,
    NoProduct,
    DupProduct,
    EmptyProduct,
    ConflictingClassify,
    UndeclaredAccept,
    Isolated,
    NoClassificationBasis,
    ClassificationMismatch,
    StartNotFound,
}

impl Code {
    /// Identifier printed in diagnostics. Error and warning flavours of the
    /// same check share a suffix.
    pub fn as_str(self, severity: Severity) -> &'static str {
        use Severity::*;
        match (self, severity) {
            (Code::Syntax, _) => "E_SYNTAX",
            (Code::DupComponent, _) => "E_DUP_COMPONENT",
            (Code::UnknownComponent, _) => "E_UNKNOWN_COMPONENT",
            (Code::DupEdge, _) => "E_DUP_EDGE",
            (Code::SelfLoop, _) => "E_SELF_LOOP",
            (Code::NoProduct, _) => "E_NO_PRODUCT",
            (Code::DupProduct, _) => "E_DUP_PRODUCT",
            (Code::EmptyProduct, _) => "E_EMPTY_PRODUCT",
            (Code::ConflictingClassify, _) => "E_CONFLICTING_CLASSIFY",
            (Code::UndeclaredAccept, Error) => "E_UNDECLARED_ACCEPT",
            (Code::UndeclaredAccept, Warning) => "W_UNDECLARED_ACCEPT",
            (Code::Isolated, _) => "W_ISOLATED",
            (Code::NoClassificationBasis, _) => "E_NO_CLASSIFICATION_BASIS",
            (Code::ClassificationMismatch, Error) => "E_CLASSIFICATION_MISMATCH",
            (Code::ClassificationMismatch, Warning) => "W_CLASSIFICATION_MISMATCH",
            (Code::StartNotFound, _) => "E_START_NOT_FOUND",
        }
    }
}

/// A parse or validation finding.
///
/// `line` is set for findings tied to a statement of the input; findings
/// about a whole product (from [`validate`]) carry the product id instead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub line: Option<usize>,
    pub product: Option<String>,
    pub code: Code,
    pub message: String,
}

impl Diagnostic {
    fn new(severity: Severity, code: Code, message: impl Into<String>) -> Self {
        Self {
            severity,
            line: None,
            product: None,
            code,
            message: message.into(),
        }
    }

    pub fn error(code: Code, message: impl Into<String>) -> Self {
        Self::new(Severity::Error, code, message)
    }

    pub fn warning(code: Code, message: impl Into<String>) -> Self {
        Self::new(Severity::Warning, code, message)
    }

    fn at(mut self, line: usize) -> Self {
        self.line = Some(line);
        self
    }

    fn in_product(mut self, product: &str) -> Self {
        self.product = Some(product.to_string());
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    pub fn code_str(&self) -> &'static str {
        self.code.as_str(self.severity)
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        let kind = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{kind}[{}]", self.code_str())?;
        if let Some(p) = &self.product {
            write!(f, " product `{p}`")?;
        }
        write!(f, ": {}", self.message)
    }
}

/// Products that parsed without errors, plus every diagnostic in input order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParseOutput {
    pub products: Vec<ProductGraph>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ParseOutput {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(Diagnostic::is_error)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Arrow,
    LBrace,
    RBrace,
    Colon,
    Comma,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) => write!(f, "`{s}`"),
            Token::Arrow => f.write_str("`->`"),
            Token::LBrace => f.write_str("`{`"),
            Token::RBrace => f.write_str("`}`"),
            Token::Colon => f.write_str("`:`"),
            Token::Comma => f.write_str("`,`"),
        }
    }
}

fn tokenize(line: &str) -> Result<Vec<Token>, String> {
    let mut tokens = Vec::new();
    let mut chars = line.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        match c {
            '#' => break,
            c if c.is_whitespace() => {
                chars.next();
            }
            '{' | '}' | ':' | ',' => {
                chars.next();
                tokens.push(match c {
                    '{' => Token::LBrace,
                    '}' => Token::RBrace,
                    ':' => Token::Colon,
                    _ => Token::Comma,
                });
            }
            '-' => {
                chars.next();
                match chars.next() {
                    Some((_, '>')) => tokens.push(Token::Arrow),
                    _ => return Err("expected `->`".to_string()),
                }
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut end = start;
                while let Some(&(i, c)) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        end = i + c.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                let word = &line[start..end];
                if !is_identifier(word) {
                    return Err(format!("`{word}` is not an identifier"));
                }
                tokens.push(Token::Ident(word.to_string()));
            }
            other => return Err(format!("unexpected character `{other}`")),
        }
    }
    Ok(tokens)
}

struct Cursor {
    tokens: Vec<Token>,
    pos: usize,
}

impl Cursor {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn ident(&mut self, what: &str) -> Result<String, String> {
        match self.next() {
            Some(Token::Ident(s)) => Ok(s),
            Some(t) => Err(format!("expected {what}, found {t}")),
            None => Err(format!("expected {what}, found end of line")),
        }
    }

    fn expect(&mut self, want: Token) -> Result<(), String> {
        match self.next() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(format!("expected {want}, found {t}")),
            None => Err(format!("expected {want}, found end of line")),
        }
    }

    fn finish(&self) -> Result<(), String> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(format!("unexpected trailing {t}")),
        }
    }

    fn signature(&mut self) -> Result<MessageSignature, String> {
        self.expect(Token::LBrace)?;
        let mut sig = MessageSignature::empty();
        if self.peek() == Some(&Token::RBrace) {
            self.next();
            return Ok(sig);
        }
        loop {
            let field = self.ident("field name")?;
            self.expect(Token::Colon)?;
            let ty = self.ident("type")?;
            let ty = TypeTag::from_token(&ty).ok_or_else(|| format!("invalid type `{ty}`"))?;
            sig.insert(field, ty).map_err(|e| e.to_string())?;
            match self.next() {
                Some(Token::Comma) => continue,
                Some(Token::RBrace) => return Ok(sig),
                Some(t) => return Err(format!("expected `,` or `}}`, found {t}")),
                None => return Err("unterminated signature".to_string()),
            }
        }
    }

    fn optionality(&mut self) -> Result<Optionality, String> {
        match self.ident("`required` or `optional`")?.as_str() {
            "required" => Ok(Optionality::Required),
            "optional" => Ok(Optionality::Optional),
            other => Err(format!("expected `required` or `optional`, found `{other}`")),
        }
    }
}

#[derive(Debug)]
enum Statement {
    Product(String),
    Component(Component),
    Edge(DependencyEdge),
    Start(Vec<String>),
    Classify(Optionality, Vec<String>),
}

fn parse_statement(tokens: Vec<Token>) -> Result<Statement, String> {
    let mut cur = Cursor { tokens, pos: 0 };
    let keyword = cur.ident("statement keyword")?;
    let stmt = match keyword.as_str() {
        "product" => Statement::Product(cur.ident("product id")?),
        "component" => {
            let name = cur.ident("component name")?;
            let mut accepts = BTreeSet::new();
            if !cur.at_end() {
                match cur.ident("`accepts`")?.as_str() {
                    "accepts" => {}
                    other => return Err(format!("expected `accepts`, found `{other}`")),
                }
                loop {
                    accepts.insert(cur.signature()?);
                    if cur.at_end() {
                        break;
                    }
                }
            }
            Statement::Component(Component { name, accepts })
        }
        "edge" => {
            let source = cur.ident("source component")?;
            cur.expect(Token::Arrow)?;
            let target = cur.ident("target component")?;
            let signature = cur.signature()?;
            let optionality = if cur.at_end() { Optionality::Required } else { cur.optionality()? };
            Statement::Edge(DependencyEdge {
                source,
                target,
                signature,
                optionality,
            })
        }
        "start" => {
            let mut names = vec![cur.ident("component name")?];
            while !cur.at_end() {
                names.push(cur.ident("component name")?);
            }
            Statement::Start(names)
        }
        "classify" => {
            let status = cur.optionality()?;
            let mut names = vec![cur.ident("component name")?];
            while !cur.at_end() {
                names.push(cur.ident("component name")?);
            }
            Statement::Classify(status, names)
        }
        other => return Err(format!("unknown statement `{other}`")),
    };
    cur.finish()?;
    Ok(stmt)
}

struct PendingProduct {
    id: String,
    line: usize,
    statements: Vec<(usize, Statement)>,
    errors: Vec<Diagnostic>,
}

/// Parses every product in `text`.
///
/// A product with any error is left out of the result. With `strict`, an
/// edge carrying a signature its target does not declare is an error rather
/// than a warning.
pub fn parse_products(text: &str, strict: bool) -> ParseOutput {
    let mut out = ParseOutput::default();
    let mut current: Option<PendingProduct> = None;
    let mut seen_ids = BTreeSet::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let tokens = match tokenize(raw) {
            Ok(t) if t.is_empty() => continue,
            Ok(t) => t,
            Err(msg) => {
                let d = Diagnostic::error(Code::Syntax, msg).at(line);
                push_error(&mut current, &mut out, d);
                continue;
            }
        };
        match parse_statement(tokens) {
            Ok(Statement::Product(id)) => {
                if let Some(done) = current.take() {
                    finish_product(done, strict, &mut out);
                }
                let mut pending = PendingProduct {
                    id: id.clone(),
                    line,
                    statements: Vec::new(),
                    errors: Vec::new(),
                };
                if !seen_ids.insert(id.clone()) {
                    pending.errors.push(
                        Diagnostic::error(Code::DupProduct, format!("product `{id}` is declared more than once"))
                            .at(line),
                    );
                }
                current = Some(pending);
            }
            Ok(stmt) => match current.as_mut() {
                Some(p) => p.statements.push((line, stmt)),
                None => out.diagnostics.push(
                    Diagnostic::error(Code::NoProduct, "statement appears before any `product` line").at(line),
                ),
            },
            Err(msg) => {
                let d = Diagnostic::error(Code::Syntax, msg).at(line);
                push_error(&mut current, &mut out, d);
            }
        }
    }
    if let Some(done) = current.take() {
        finish_product(done, strict, &mut out);
    }
    out.diagnostics.sort_by_key(|d| d.line);
    out
}

fn push_error(current: &mut Option<PendingProduct>, out: &mut ParseOutput, d: Diagnostic) {
    match current.as_mut() {
        Some(p) => p.errors.push(d),
        None => out.diagnostics.push(d),
    }
}

fn finish_product(pending: PendingProduct, strict: bool, out: &mut ParseOutput) {
    let PendingProduct {
        id,
        line: product_line,
        statements,
        mut errors,
    } = pending;
    let mut diags = Vec::new();
    let mut graph = ProductGraph::new(id.clone());

    for (line, stmt) in &statements {
        if let Statement::Component(c) = stmt {
            if let Err(e) = graph.add_component(c.clone()) {
                errors.push(model_diagnostic(e).at(*line));
            }
        }
    }
    if graph.component_count() == 0 {
        errors.push(
            Diagnostic::error(Code::EmptyProduct, format!("product `{id}` declares no components")).at(product_line),
        );
    }

    for (line, stmt) in statements {
        match stmt {
            Statement::Component(_) | Statement::Product(_) => {}
            Statement::Edge(edge) => {
                let mut missing = false;
                for end in [&edge.source, &edge.target] {
                    if !graph.has_component(end) {
                        missing = true;
                        errors.push(
                            Diagnostic::error(Code::UnknownComponent, format!("unknown component `{end}`")).at(line),
                        );
                    }
                }
                if missing {
                    continue;
                }
                if let Some(target) = graph.component(&edge.target) {
                    if !target.accepts.is_empty() && !target.accepts.contains(&edge.signature) {
                        let msg = format!(
                            "edge {} -> {} carries {} which `{}` does not declare",
                            edge.source, edge.target, edge.signature, edge.target
                        );
                        let d = if strict {
                            Diagnostic::error(Code::UndeclaredAccept, msg)
                        } else {
                            Diagnostic::warning(Code::UndeclaredAccept, msg)
                        };
                        diags.push(d.at(line));
                    }
                }
                if let Err(e) = graph.add_edge(edge) {
                    errors.push(model_diagnostic(e).at(line));
                }
            }
            Statement::Start(names) => {
                for name in names {
                    if let Err(e) = graph.add_start(name) {
                        errors.push(model_diagnostic(e).at(line));
                    }
                }
            }
            Statement::Classify(status, names) => {
                for name in names {
                    if let Err(e) = graph.declare(name, status) {
                        errors.push(model_diagnostic(e).at(line));
                    }
                }
            }
        }
    }

    let failed = !errors.is_empty() || diags.iter().any(Diagnostic::is_error);
    out.diagnostics.extend(errors.into_iter().map(|d| d.in_product(&id)));
    out.diagnostics.extend(diags.into_iter().map(|d| d.in_product(&id)));
    if !failed {
        out.products.push(graph);
    }
}

fn model_diagnostic(e: ModelError) -> Diagnostic {
    let code = match &e {
        ModelError::DuplicateField(_) => Code::Syntax,
        ModelError::DuplicateComponent(_) => Code::DupComponent,
        ModelError::UnknownComponent(_) => Code::UnknownComponent,
        ModelError::DuplicateEdge { .. } => Code::DupEdge,
        ModelError::SelfLoop(_) => Code::SelfLoop,
        ModelError::ConflictingDeclaration { .. } => Code::ConflictingClassify,
    };
    Diagnostic::error(code, e.to_string())
}

/// Canonical text for `products`: components and edges sorted, one blank
/// line between products. Parsing the result yields equal products.
pub fn serialize_products(products: &[ProductGraph]) -> String {
    let mut out = String::new();
    for (i, p) in products.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "product {}", p.id());
        for c in p.components() {
            let _ = write!(out, "component {}", c.name);
            if !c.accepts.is_empty() {
                out.push_str(" accepts");
                for sig in &c.accepts {
                    let _ = write!(out, " {sig}");
                }
            }
            out.push('\n');
        }
        for e in p.edges() {
            let _ = writeln!(out, "edge {} -> {} {} {}", e.source, e.target, e.signature, e.optionality);
        }
        if !p.start_set().is_empty() {
            let names: Vec<&str> = p.start_set().iter().map(String::as_str).collect();
            let _ = writeln!(out, "start {}", names.join(" "));
        }
        for status in [Optionality::Required, Optionality::Optional] {
            let names: Vec<&str> = p
                .declared_classification()
                .iter()
                .filter(|(_, s)| **s == status)
                .map(|(n, _)| n.as_str())
                .collect();
            if !names.is_empty() {
                let _ = writeln!(out, "classify {status} {}", names.join(" "));
            }
        }
    }
    out
}

/// Structural checks on a parsed product: isolated components, undeclared
/// accepted signatures, a missing classification basis and disagreement
/// between declared and derived classifications.
pub fn validate(product: &ProductGraph, strict: bool) -> Vec<Diagnostic> {
    let id = product.id();
    let mut diags = Vec::new();

    for name in classify::find_isolated(product) {
        diags.push(Diagnostic::warning(
            Code::Isolated,
            format!("component `{name}` has no dependencies; review its relevance manually"),
        ));
    }

    for e in product.edges() {
        if let Some(target) = product.component(&e.target) {
            if !target.accepts.is_empty() && !target.accepts.contains(&e.signature) {
                diags.push(Diagnostic::warning(
                    Code::UndeclaredAccept,
                    format!(
                        "edge {} -> {} carries {} which `{}` does not declare",
                        e.source, e.target, e.signature, e.target
                    ),
                ));
            }
        }
    }

    if product.start_set().is_empty() && product.declared_classification().is_empty() {
        diags.push(Diagnostic::error(
            Code::NoClassificationBasis,
            "neither a start set nor a declared classification is given",
        ));
    } else {
        match classify::classify_components(product) {
            Ok(_) => {
                for m in classify::classification_mismatches(product) {
                    let msg = format!("`{}` is declared {} but derives as {}", m.name, m.declared, m.derived);
                    diags.push(if strict {
                        Diagnostic::error(Code::ClassificationMismatch, msg)
                    } else {
                        Diagnostic::warning(Code::ClassificationMismatch, msg)
                    });
                }
            }
            Err(ClassifyError::NoClassificationBasis { .. }) => diags.push(Diagnostic::error(
                Code::NoClassificationBasis,
                "no start set and the declared classification does not cover every component",
            )),
            Err(e @ ClassifyError::StartNotFound { .. }) => {
                diags.push(Diagnostic::error(Code::StartNotFound, e.to_string()))
            }
        }
    }

    diags.into_iter().map(|d| d.in_product(id)).collect()
}
