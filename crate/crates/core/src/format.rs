//! Line-oriented text formats for n-matrices, n-vectors and n-linear maps.
//!
//! ```text
//! nmatrix v1
//! field Q
//! component 2 2
//! 1 2
//! 0 2
//! component 1 1
//! 5
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. [`emit`] writes the
//! canonical form, which [`parse_document`] reads back unchanged.

use std::fmt::Write as _;

use crate::error::{Error, ParseError};
use crate::field::{parse_field_descriptor, Field, FieldSyntaxError, Scalar, DEFAULT_TOLERANCE};
use crate::leontief::{ConsumptionModel, ExchangeModel, ModelKind};
use crate::markov::{Convention, MarkovChain};
use crate::matrix::Matrix;
use crate::nmatrix::NMatrix;
use crate::nspace::{NDims, NVector};
use crate::ntransform::NLinearMap;

/// Largest row or column count accepted in a component header.
pub const MAX_DIM: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParseOptions {
    pub tolerance: f64,
    /// Reject n-vectors whose component lengths repeat.
    pub strict_dims: bool,
}

impl Default for ParseOptions {
    fn default() -> ParseOptions {
        ParseOptions {
            tolerance: DEFAULT_TOLERANCE,
            strict_dims: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixDoc {
    pub field: Field,
    pub convention: Option<Convention>,
    pub model: Option<ModelKind>,
    pub relaxed: Option<bool>,
    pub components: Vec<Matrix>,
    pub labels: Vec<Option<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorDoc {
    pub field: Field,
    pub components: Vec<Vec<Scalar>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapDoc {
    pub field: Field,
    /// Target slot of each source component, 1-based as written.
    pub assignment: Vec<usize>,
    pub target: Option<Vec<usize>>,
    pub components: Vec<Matrix>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Matrix(MatrixDoc),
    Vector(VectorDoc),
    Map(MapDoc),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Matrix(_) => "nmatrix",
            Document::Vector(_) => "nvector",
            Document::Map(_) => "nmap",
        }
    }
}

impl MatrixDoc {
    pub fn to_nmatrix(&self) -> Result<NMatrix, Error> {
        NMatrix::new(self.field, self.components.clone())
    }

    /// Chain under the file's convention, or `fallback` when it has none.
    pub fn to_chain(&self, fallback: Convention) -> Result<MarkovChain, Error> {
        let chain = MarkovChain::new(self.to_nmatrix()?, self.convention.unwrap_or(fallback))?;
        if self.labels.iter().all(Option::is_none) {
            return Ok(chain);
        }
        let labels = self
            .labels
            .iter()
            .zip(&self.components)
            .map(|(l, m)| {
                l.clone()
                    .unwrap_or_else(|| (1..=m.rows()).map(|i| i.to_string()).collect())
            })
            .collect();
        chain.with_labels(labels)
    }

    pub fn to_exchange(&self) -> Result<ExchangeModel, Error> {
        if self.model == Some(ModelKind::Consumption) {
            return Err(Error::ModelMismatch("exchange"));
        }
        ExchangeModel::new(self.to_nmatrix()?, self.relaxed.unwrap_or(false))
    }

    pub fn to_consumption(&self) -> Result<ConsumptionModel, Error> {
        if self.model == Some(ModelKind::Exchange) {
            return Err(Error::ModelMismatch("consumption"));
        }
        ConsumptionModel::new(self.to_nmatrix()?, self.relaxed.unwrap_or(false))
    }
}

impl VectorDoc {
    pub fn to_nvector(&self) -> Result<NVector, Error> {
        NVector::new(self.field, self.components.clone())
    }
}

impl MapDoc {
    /// Target dimensions: the `target` line, or the row counts of the
    /// components assigned to each slot.
    pub fn target_dims(&self) -> Result<Vec<usize>, Error> {
        if let Some(t) = &self.target {
            return Ok(t.clone());
        }
        let slots = self.assignment.iter().copied().max().unwrap_or(0);
        (1..=slots)
            .map(|j| {
                self.assignment
                    .iter()
                    .position(|&a| a == j)
                    .map(|i| self.components[i].rows())
                    .ok_or_else(|| {
                        Error::InvalidAssignment(format!("target slot {j} has no source; add a target line"))
                    })
            })
            .collect()
    }

    pub fn to_map(&self) -> Result<NLinearMap, Error> {
        let source: Vec<usize> = self.components.iter().map(Matrix::cols).collect();
        let assignment: Vec<usize> = self.assignment.iter().map(|a| a - 1).collect();
        NLinearMap::new(
            self.field,
            source,
            self.target_dims()?,
            assignment,
            self.components.clone(),
        )
    }
}

struct Lines<'a> {
    items: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Lines<'a> {
        let items: Vec<(usize, Vec<&str>)> = text
            .lines()
            .enumerate()
            .filter(|(_, l)| {
                let t = l.trim();
                !t.is_empty() && !t.starts_with('#')
            })
            .map(|(i, l)| (i + 1, l.split_whitespace().collect()))
            .collect();
        let last = items.last().map_or(1, |(n, _)| *n);
        Lines { items, pos: 0, last }
    }

    fn peek(&self) -> Option<&(usize, Vec<&'a str>)> {
        self.items.get(self.pos)
    }

    fn next(&mut self) -> Option<(usize, Vec<&'a str>)> {
        let item = self.items.get(self.pos).cloned();
        self.pos += 1;
        item
    }

    fn keyword_is(&self, word: &str) -> bool {
        self.peek().is_some_and(|(_, t)| t[0] == word)
    }
}

fn syntax(line: usize, detail: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        detail: detail.into(),
    }
}

fn shape(line: usize, detail: impl Into<String>) -> ParseError {
    ParseError::ShapeError {
        line,
        detail: detail.into(),
    }
}

fn parse_field_line(lines: &mut Lines<'_>, opts: &ParseOptions) -> Result<Field, ParseError> {
    let (line, toks) = lines.next().ok_or_else(|| syntax(lines.last, "missing field line"))?;
    if toks[0] != "field" || toks.len() < 2 {
        return Err(syntax(line, "expected `field Q`, `field R` or `field Z p`"));
    }
    match parse_field_descriptor(&toks[1..].join(" "), opts.tolerance) {
        Ok(f) => Ok(f),
        Err(FieldSyntaxError::NonPrime(m)) => Err(ParseError::NonPrimeModulus { line, modulus: m }),
        Err(FieldSyntaxError::Malformed) => Err(syntax(line, format!("unknown field `{}`", toks[1..].join(" ")))),
    }
}

fn parse_scalar(field: &Field, line: usize, token: &str) -> Result<Scalar, ParseError> {
    field.parse_scalar(token).ok_or_else(|| ParseError::MalformedScalar {
        line,
        token: token.to_string(),
    })
}

fn parse_count(line: usize, token: &str, what: &str) -> Result<usize, ParseError> {
    match token.parse::<usize>() {
        Ok(n) if (1..=MAX_DIM).contains(&n) => Ok(n),
        _ => Err(shape(line, format!("invalid {what} `{token}`"))),
    }
}

fn parse_components(
    lines: &mut Lines<'_>,
    field: &Field,
    labels: bool,
) -> Result<(Vec<Matrix>, Vec<Option<Vec<String>>>), ParseError> {
    let mut comps = Vec::new();
    let mut all_labels = Vec::new();
    while let Some((line, toks)) = lines.next() {
        if toks[0] != "component" {
            return Err(syntax(line, format!("expected `component`, found `{}`", toks[0])));
        }
        if toks.len() != 3 {
            return Err(shape(line, "component header needs a row and a column count"));
        }
        let rows = parse_count(line, toks[1], "row count")?;
        let cols = parse_count(line, toks[2], "column count")?;
        let mut data = Vec::with_capacity(rows);
        for _ in 0..rows {
            let (l, row) = lines.next().ok_or_else(|| {
                shape(
                    lines.last,
                    format!("component ends after {} of {rows} rows", data.len()),
                )
            })?;
            if row[0] == "component" || row[0] == "labels" {
                return Err(shape(l, format!("component ends after {} of {rows} rows", data.len())));
            }
            if row.len() != cols {
                return Err(shape(l, format!("expected {cols} entries, found {}", row.len())));
            }
            data.push(
                row.iter()
                    .map(|t| parse_scalar(field, l, t))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        let mut label = None;
        if lines.keyword_is("labels") {
            let (l, toks) = lines.next().expect("peeked");
            if !labels {
                return Err(syntax(l, "labels are only allowed in nmatrix files"));
            }
            if toks.len() - 1 != rows {
                return Err(shape(l, format!("expected {rows} labels, found {}", toks.len() - 1)));
            }
            label = Some(toks[1..].iter().map(|s| s.to_string()).collect());
        }
        comps.push(Matrix::from_rows(data).expect("rectangular rows"));
        all_labels.push(label);
    }
    if comps.len() < 2 {
        return Err(shape(
            lines.last,
            format!("an n-object needs at least two components, found {}", comps.len()),
        ));
    }
    Ok((comps, all_labels))
}

fn parse_matrix_doc(lines: &mut Lines<'_>, opts: &ParseOptions) -> Result<MatrixDoc, ParseError> {
    let field = parse_field_line(lines, opts)?;
    let mut doc = MatrixDoc {
        field,
        convention: None,
        model: None,
        relaxed: None,
        components: Vec::new(),
        labels: Vec::new(),
    };
    while let Some((line, toks)) = lines.peek().cloned() {
        let value = || -> Result<&str, ParseError> {
            match toks.as_slice() {
                [_, v] => Ok(v),
                _ => Err(syntax(line, format!("`{}` takes one value", toks[0]))),
            }
        };
        match toks[0] {
            "convention" if doc.convention.is_none() => {
                doc.convention = Some(value()?.parse().map_err(|e: String| syntax(line, e))?);
            }
            "model" if doc.model.is_none() => {
                doc.model = Some(value()?.parse().map_err(|e: String| syntax(line, e))?);
            }
            "relaxed" if doc.relaxed.is_none() => {
                doc.relaxed = Some(match value()? {
                    "true" => true,
                    "false" => false,
                    other => {
                        return Err(syntax(
                            line,
                            format!("`relaxed` expects true or false, found `{other}`"),
                        ))
                    }
                });
            }
            "component" => break,
            other => return Err(syntax(line, format!("unexpected `{other}`"))),
        }
        lines.next();
    }
    let (components, labels) = parse_components(lines, &field, true)?;
    doc.components = components;
    doc.labels = labels;
    Ok(doc)
}

fn parse_vector_doc(lines: &mut Lines<'_>, opts: &ParseOptions) -> Result<VectorDoc, ParseError> {
    let field = parse_field_line(lines, opts)?;
    let mut components = Vec::new();
    while let Some((line, toks)) = lines.next() {
        components.push(
            toks.iter()
                .map(|t| parse_scalar(&field, line, t))
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    if components.len() < 2 {
        return Err(shape(
            lines.last,
            format!("an n-vector needs at least two components, found {}", components.len()),
        ));
    }
    if opts.strict_dims {
        let dims: Vec<usize> = components.iter().map(Vec::len).collect();
        if NDims::new(dims.clone(), true).is_err() {
            return Err(ParseError::StrictDimsViolation { line: lines.last, dims });
        }
    }
    Ok(VectorDoc { field, components })
}

fn parse_list(line: usize, toks: &[&str], what: &str) -> Result<Vec<usize>, ParseError> {
    if toks.len() < 2 {
        return Err(syntax(line, format!("`{what}` needs at least one entry")));
    }
    toks[1..].iter().map(|t| parse_count(line, t, what)).collect()
}

fn parse_map_doc(lines: &mut Lines<'_>, opts: &ParseOptions) -> Result<MapDoc, ParseError> {
    let field = parse_field_line(lines, opts)?;
    let (line, toks) = lines
        .next()
        .ok_or_else(|| syntax(lines.last, "missing assignment line"))?;
    if toks[0] != "assignment" {
        return Err(syntax(line, "expected `assignment`"));
    }
    let assignment = parse_list(line, &toks, "assignment")?;
    let mut target = None;
    if lines.keyword_is("target") {
        let (line, toks) = lines.next().expect("peeked");
        target = Some(parse_list(line, &toks, "target")?);
    }
    let (components, _) = parse_components(lines, &field, false)?;
    if components.len() != assignment.len() {
        return Err(shape(
            lines.last,
            format!(
                "{} components for an assignment of length {}",
                components.len(),
                assignment.len()
            ),
        ));
    }
    Ok(MapDoc {
        field,
        assignment,
        target,
        components,
    })
}

pub fn parse_document(input: &[u8], opts: &ParseOptions) -> Result<Document, ParseError> {
    let text = std::str::from_utf8(input).map_err(|_| ParseError::NotUtf8)?;
    parse_str(text, opts)
}

pub fn parse_str(text: &str, opts: &ParseOptions) -> Result<Document, ParseError> {
    let mut lines = Lines::new(text);
    let (line, toks) = lines.next().ok_or(ParseError::UnknownHeader {
        line: 1,
        found: String::new(),
    })?;
    match toks.as_slice() {
        ["nmatrix", "v1"] => parse_matrix_doc(&mut lines, opts).map(Document::Matrix),
        ["nvector", "v1"] => parse_vector_doc(&mut lines, opts).map(Document::Vector),
        ["nmap", "v1"] => parse_map_doc(&mut lines, opts).map(Document::Map),
        _ => Err(ParseError::UnknownHeader {
            line,
            found: toks.join(" "),
        }),
    }
}

fn push_row(out: &mut String, items: impl IntoIterator<Item = String>) {
    let row: Vec<String> = items.into_iter().collect();
    out.push_str(&row.join(" "));
    out.push('\n');
}

fn emit_components(out: &mut String, comps: &[Matrix], labels: &[Option<Vec<String>>]) {
    for (i, m) in comps.iter().enumerate() {
        let _ = writeln!(out, "component {} {}", m.rows(), m.cols());
        for r in 0..m.rows() {
            push_row(out, m.row(r).iter().map(Scalar::to_string));
        }
        if let Some(Some(l)) = labels.get(i) {
            push_row(out, std::iter::once("labels".to_string()).chain(l.iter().cloned()));
        }
    }
}

/// Canonical text of a document.
pub fn emit(doc: &Document) -> String {
    let mut out = String::new();
    match doc {
        Document::Matrix(d) => {
            let _ = writeln!(out, "nmatrix v1\nfield {}", d.field);
            if let Some(c) = d.convention {
                let _ = writeln!(out, "convention {c}");
            }
            if let Some(m) = d.model {
                let _ = writeln!(out, "model {m}");
            }
            if let Some(r) = d.relaxed {
                let _ = writeln!(out, "relaxed {r}");
            }
            emit_components(&mut out, &d.components, &d.labels);
        }
        Document::Vector(d) => {
            let _ = writeln!(out, "nvector v1\nfield {}", d.field);
            for c in &d.components {
                push_row(&mut out, c.iter().map(Scalar::to_string));
            }
        }
        Document::Map(d) => {
            let _ = writeln!(out, "nmap v1\nfield {}", d.field);
            push_row(
                &mut out,
                std::iter::once("assignment".to_string()).chain(d.assignment.iter().map(usize::to_string)),
            );
            if let Some(t) = &d.target {
                push_row(
                    &mut out,
                    std::iter::once("target".to_string()).chain(t.iter().map(usize::to_string)),
                );
            }
            emit_components(&mut out, &d.components, &[]);
        }
    }
    out
}

pub fn matrix_document(m: &NMatrix) -> Document {
    Document::Matrix(MatrixDoc {
        field: *m.field(),
        convention: None,
        model: None,
        relaxed: None,
        components: m.components().to_vec(),
        labels: vec![None; m.len()],
    })
}

pub fn vector_document(v: &NVector) -> Document {
    Document::Vector(VectorDoc {
        field: *v.field(),
        components: v.components().to_vec(),
    })
}
