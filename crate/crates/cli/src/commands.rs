//! One function per verb. Each returns a text report and a JSON report.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Subcommand, ValueEnum};
use nla_core::field::{nfield_classify, ngroup_order, parse_field_descriptor, NFieldSpec};
use nla_core::format::{emit, parse_document, Document, MapDoc, MatrixDoc, ParseOptions, VectorDoc};
use nla_core::leontief::{self, MaxMin};
use nla_core::markov::{self, Convention, MarkovChain, WalkKind};
use nla_core::nmatrix::OrthoComponent;
use nla_core::ntransform::hom_dimension;
use nla_core::spectral::{self, DiagVerdict};
use nla_core::{inner, Error, Field, NMatrix, NSubset, NVector, ParseError};
use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::render::{self, fmt_f64, join, set, tuple};

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a file, validate it and print its canonical form.
    Check { file: PathBuf },
    /// Characteristic n-polynomial.
    Charpoly { file: PathBuf },
    /// Minimal n-polynomial.
    Minpoly { file: PathBuf },
    /// Eigenvalues with multiplicities and eigenspaces.
    Eigen { file: PathBuf },
    /// Diagonalizability verdict and diagonal form.
    Diagonalize { file: PathBuf },
    /// Spectral projections of a diagonalizable n-operator.
    Projections {
        file: PathBuf,
        /// Use generalized-eigenspace projections.
        #[arg(long)]
        generalized: bool,
    },
    /// Primary decomposition from the minimal polynomial.
    Primary { file: PathBuf },
    /// Split into diagonalizable and nilpotent parts.
    Dn { file: PathBuf },
    /// Check that the characteristic polynomial annihilates the matrix.
    Cayley { file: PathBuf },
    /// Orthogonalize the rows of each component.
    GramSchmidt { file: PathBuf },
    /// Best approximation of a vector from the span of the given rows.
    Approx { subspace: PathBuf, vector: PathBuf },
    /// Orthogonality and operator class.
    OrthoClass { file: PathBuf },
    /// Communicating classes and absorbing states.
    MarkovClassify { file: PathBuf },
    /// Stationary distribution.
    MarkovStationary { file: PathBuf },
    /// Distribution after some steps.
    MarkovEvolve {
        chain: PathBuf,
        initial: PathBuf,
        #[arg(long, default_value_t = 1)]
        steps: u64,
    },
    /// Spectral decomposition of a chain with simple real spectrum.
    MarkovSpectral {
        file: PathBuf,
        /// Also print the k-th power rebuilt from the spectrum.
        #[arg(long)]
        power: Option<u32>,
    },
    /// Emit a random-walk chain.
    MarkovWalk {
        #[arg(long, value_enum)]
        kind: Walk,
        /// Number of steps K per component; states are 0..=K.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        /// Step-right probability per component.
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<String>,
        #[arg(long, default_value = "Q")]
        field: String,
    },
    /// Equilibrium prices of an exchange model.
    LeontiefClosed { file: PathBuf },
    /// Production meeting a demand in a consumption model.
    LeontiefOpen { model: PathBuf, demand: PathBuf },
    /// Relaxed exchange model.
    LeontiefSClosed {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        rounds: usize,
    },
    /// Relaxed consumption model.
    LeontiefSOpen { model: PathBuf, demand: PathBuf },
    /// Dimension of the space of n-linear maps, or a report on an nmap file.
    HomDim {
        file: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        source: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        target: Vec<usize>,
        /// 1-based target slot of each source component.
        #[arg(long, value_delimiter = ',')]
        assignment: Vec<usize>,
    },
    /// Classify an n-field given its component fields.
    NfieldClassify {
        #[arg(required = true)]
        fields: Vec<String>,
    },
    /// Order of a direct product of finite groups.
    NgroupOrder {
        #[arg(required = true)]
        orders: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Walk {
    Absorbing,
    Reflecting,
}

impl Command {
    pub fn verb(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Charpoly { .. } => "charpoly",
            Command::Minpoly { .. } => "minpoly",
            Command::Eigen { .. } => "eigen",
            Command::Diagonalize { .. } => "diagonalize",
            Command::Projections { .. } => "projections",
            Command::Primary { .. } => "primary",
            Command::Dn { .. } => "dn",
            Command::Cayley { .. } => "cayley",
            Command::GramSchmidt { .. } => "gram-schmidt",
            Command::Approx { .. } => "approx",
            Command::OrthoClass { .. } => "ortho-class",
            Command::MarkovClassify { .. } => "markov-classify",
            Command::MarkovStationary { .. } => "markov-stationary",
            Command::MarkovEvolve { .. } => "markov-evolve",
            Command::MarkovSpectral { .. } => "markov-spectral",
            Command::MarkovWalk { .. } => "markov-walk",
            Command::LeontiefClosed { .. } => "leontief-closed",
            Command::LeontiefOpen { .. } => "leontief-open",
            Command::LeontiefSClosed { .. } => "leontief-s-closed",
            Command::LeontiefSOpen { .. } => "leontief-s-open",
            Command::HomDim { .. } => "hom-dim",
            Command::NfieldClassify { .. } => "nfield-classify",
            Command::NgroupOrder { .. } => "ngroup-order",
        }
    }
}

pub struct Ctx {
    pub opts: ParseOptions,
    pub convention: Option<Convention>,
}

pub struct Report {
    pub text: String,
    pub json: Value,
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Parse { path: String, error: ParseError },
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Domain(e)
    }
}

type Outcome = Result<Report, Failure>;

fn load(ctx: &Ctx, path: &Path) -> Result<Document, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    parse_document(&bytes, &ctx.opts).map_err(|error| Failure::Parse {
        path: path.display().to_string(),
        error,
    })
}

fn wrong_kind(path: &Path, want: &str, doc: &Document) -> Failure {
    Failure::Usage(format!(
        "{}: expected an {want} file, found {}",
        path.display(),
        doc.kind()
    ))
}

fn load_matrix(ctx: &Ctx, path: &Path) -> Result<MatrixDoc, Failure> {
    match load(ctx, path)? {
        Document::Matrix(m) => Ok(m),
        other => Err(wrong_kind(path, "nmatrix", &other)),
    }
}

fn load_vector(ctx: &Ctx, path: &Path) -> Result<VectorDoc, Failure> {
    match load(ctx, path)? {
        Document::Vector(v) => Ok(v),
        other => Err(wrong_kind(path, "nvector", &other)),
    }
}

fn load_map(ctx: &Ctx, path: &Path) -> Result<MapDoc, Failure> {
    match load(ctx, path)? {
        Document::Map(m) => Ok(m),
        other => Err(wrong_kind(path, "nmap", &other)),
    }
}

fn load_nmatrix(ctx: &Ctx, path: &Path) -> Result<NMatrix, Failure> {
    Ok(load_matrix(ctx, path)?.to_nmatrix()?)
}

fn load_chain(ctx: &Ctx, path: &Path) -> Result<MarkovChain, Failure> {
    let doc = load_matrix(ctx, path)?;
    let chain = match ctx.convention {
        Some(c) => MatrixDoc {
            convention: Some(c),
            ..doc
        }
        .to_chain(c)?,
        None => doc.to_chain(Convention::Row)?,
    };
    Ok(chain)
}

fn subset_from_rows(a: &NMatrix) -> Result<NSubset, Failure> {
    let dims = a.components().iter().map(|m| m.cols()).collect();
    let sets = a.components().iter().map(|m| m.to_rows()).collect();
    Ok(NSubset::new(*a.field(), dims, sets)?)
}

pub fn run(ctx: &Ctx, cmd: &Command) -> Outcome {
    match cmd {
        Command::Check { file } => check(ctx, file),
        Command::Charpoly { file } => polys(ctx, file, "charpoly"),
        Command::Minpoly { file } => polys(ctx, file, "minpoly"),
        Command::Eigen { file } => eigen(ctx, file),
        Command::Diagonalize { file } => diagonalize(ctx, file),
        Command::Projections { file, generalized } => projections(ctx, file, *generalized),
        Command::Primary { file } => primary(ctx, file),
        Command::Dn { file } => dn(ctx, file),
        Command::Cayley { file } => cayley(ctx, file),
        Command::GramSchmidt { file } => gram_schmidt(ctx, file),
        Command::Approx { subspace, vector } => approx(ctx, subspace, vector),
        Command::OrthoClass { file } => ortho_class(ctx, file),
        Command::MarkovClassify { file } => markov_classify(ctx, file),
        Command::MarkovStationary { file } => markov_stationary(ctx, file),
        Command::MarkovEvolve { chain, initial, steps } => markov_evolve(ctx, chain, initial, *steps),
        Command::MarkovSpectral { file, power } => markov_spectral(ctx, file, *power),
        Command::MarkovWalk { kind, sizes, p, field } => markov_walk(ctx, *kind, sizes, p, field),
        Command::LeontiefClosed { file } => leontief_closed(ctx, file),
        Command::LeontiefOpen { model, demand } => leontief_open(ctx, model, demand),
        Command::LeontiefSClosed { file, rounds } => leontief_s_closed(ctx, file, *rounds),
        Command::LeontiefSOpen { model, demand } => leontief_s_open(ctx, model, demand),
        Command::HomDim {
            file,
            source,
            target,
            assignment,
        } => hom_dim(ctx, file.as_deref(), source, target, assignment),
        Command::NfieldClassify { fields } => nfield(ctx, fields),
        Command::NgroupOrder { orders } => ngroup(orders),
    }
}

fn check(ctx: &Ctx, file: &Path) -> Outcome {
    let doc = load(ctx, file)?;
    let shapes: Vec<Value>;
    match &doc {
        Document::Matrix(m) => {
            let a = m.to_nmatrix()?;
            if m.convention.is_some() {
                m.to_chain(Convention::Row)?;
            }
            match m.model {
                Some(leontief::ModelKind::Exchange) => {
                    m.to_exchange()?;
                }
                Some(leontief::ModelKind::Consumption) => {
                    m.to_consumption()?;
                }
                None => {}
            }
            shapes = a.shapes().iter().map(|(r, c)| json!([r, c])).collect();
        }
        Document::Vector(v) => {
            let v = v.to_nvector()?;
            shapes = v.dims().iter().map(|d| json!(d)).collect();
        }
        Document::Map(m) => {
            let map = m.to_map()?;
            shapes = map.matrices().iter().map(|x| json!([x.rows(), x.cols()])).collect();
        }
    }
    let canonical = emit(&doc);
    Ok(Report {
        json: json!({ "kind": doc.kind(), "shapes": shapes, "canonical": canonical }),
        text: canonical,
    })
}

fn polys(ctx: &Ctx, file: &Path, which: &str) -> Outcome {
    let a = load_nmatrix(ctx, file)?;
    let p = if which == "charpoly" {
        spectral::char_npoly(&a)?
    } else {
        spectral::min_npoly(&a)?
    };
    let parts: Vec<String> = p.components().iter().map(|c| c.render()).collect();
    Ok(Report {
        text: format!("{which}: {}\n", p.render()),
        json: json!({ which: parts }),
    })
}

fn eigen(ctx: &Ctx, file: &Path) -> Outcome {
    let a = load_nmatrix(ctx, file)?;
    let r = spectral::eigen(&a)?;
    let mut text = String::new();
    let mut comps = Vec::new();
    for (i, c) in r.components.iter().enumerate() {
        writeln!(text, "component {}", i + 1).unwrap();
        let mut pairs = Vec::new();
        for e in &c.eigenvalues {
            writeln!(
                text,
                "  eigenvalue {}: algebraic {}, geometric {}",
                e.value, e.algebraic, e.geometric
            )
            .unwrap();
            for b in &e.basis {
                writeln!(text, "    {}", join(b)).unwrap();
            }
            pairs.push(json!({
                "value": render::scalar(&e.value),
                "algebraic": e.algebraic,
                "geometric": e.geometric,
                "basis": e.basis.iter().map(|b| render::scalars(b)).collect::<Vec<_>>(),
            }));
        }
        let unsplit = c.cofactor.degree().unwrap_or(0) > 0;
        if unsplit {
            writeln!(text, "  rootless factor: {}", c.cofactor.render()).unwrap();
        }
        comps.push(json!({
            "eigenvalues": pairs,
            "cofactor": unsplit.then(|| c.cofactor.render()),
        }));
    }
    let sets: Vec<String> = r.value_sets().iter().map(|s| set(s)).collect();
    writeln!(text, "eigenvalue sets: {}", sets.join(" ∪ ")).unwrap();
    writeln!(text, "combinations: {}", r.combinations()).unwrap();
    Ok(Report {
        text,
        json: json!({ "components": comps, "combinations": r.combinations().to_string() }),
    })
}

fn verdict_name(v: DiagVerdict) -> &'static str {
    match v {
        DiagVerdict::Diagonalizable => "diagonalizable",
        DiagVerdict::NotSplit => "minimal polynomial does not split",
        DiagVerdict::RepeatedRoot => "minimal polynomial has a repeated root",
    }
}

fn diagonalize(ctx: &Ctx, file: &Path) -> Outcome {
    let a = load_nmatrix(ctx, file)?;
    let chr = spectral::char_npoly(&a)?;
    let d = spectral::is_n_diagonalizable(&a)?;
    let mut text = format!(
        "charpoly: {}\nminpoly: {}\ndiagonalizable: {}\n",
        chr.render(),
        d.minimal.render(),
        d.diagonalizable
    );
    for (i, v) in d.per_component.iter().enumerate() {
        if *v != DiagVerdict::Diagonalizable {
            writeln!(text, "component {}: {}", i + 1, verdict_name(*v)).unwrap();
        }
    }
    if let Some(diag) = &d.diagonal {
        text.push_str("diagonal:\n");
        text.push_str(&render::nmatrix_text(diag));
    }
    Ok(Report {
        text,
        json: json!({
            "charpoly": chr.components().iter().map(|p| p.render()).collect::<Vec<_>>(),
            "minpoly": d.minimal.components().iter().map(|p| p.render()).collect::<Vec<_>>(),
            "diagonalizable": d.diagonalizable,
            "per_component": d.per_component.iter().map(|v| verdict_name(*v)).collect::<Vec<_>>(),
            "diagonal": d.diagonal.as_ref().map(render::nmatrix),
        }),
    })
}

fn projections(ctx: &Ctx, file: &Path, generalized: bool) -> Outcome {
    let a = load_nmatrix(ctx, file)?;
    let p = if generalized {
        spectral::generalized_projections(&a)?
    } else {
        spectral::eigen_projections(&a)?
    };
    let mut text = String::new();
    let mut comps = Vec::new();
    for (i, comp) in p.components.iter().enumerate() {
        let mut items = Vec::new();
        for (c, e) in comp {
            writeln!(text, "component {}, eigenvalue {c}:", i + 1).unwrap();
            text.push_str(&render::matrix_rows(e, "  "));
            items.push(json!({ "eigenvalue": render::scalar(c), "projection": render::matrix(e) }));
        }
        comps.push(Value::Array(items));
    }
    Ok(Report {
        text,
        json: json!({ "generalized": generalized, "components": comps }),
    })
}

fn primary(ctx: &Ctx, file: &Path) -> Outcome {
    let a = load_nmatrix(ctx, file)?;
    let blocks = spectral::primary_decomposition(&a)?;
    let mut text = String::new();
    let mut comps = Vec::new();
    for (i, comp) in blocks.iter().enumerate() {
        writeln!(text, "component {}", i + 1).unwrap();
        let mut items = Vec::new();
        for b in comp {
            let factor = if b.exponent > 1 && b.factor.degree() == Some(1) {
                format!("{}^{}", b.factor.render(), b.exponent)
            } else if b.exponent > 1 {
                format!("({})^{}", b.factor.render(), b.exponent)
            } else {
                b.factor.render()
            };
            writeln!(text, "  null space of {factor}: dimension {}", b.basis.len()).unwrap();
            for v in &b.basis {
                writeln!(text, "    {}", join(v)).unwrap();
            }
            items.push(json!({
                "factor": b.factor.render(),
                "exponent": b.exponent,
                "basis": b.basis.iter().map(|v| render::scalars(v)).collect::<Vec<_>>(),
            }));
        }
        comps.push(Value::Array(items));
    }
    Ok(Report {
        text,
        json: json!({ "components": comps }),
    })
}

fn dn(ctx: &Ctx, file: &Path) -> Outcome {
    let a = load_nmatrix(ctx, file)?;
    let p = spectral::dn_decompose(&a)?;
    let text = format!(
        "nilpotency indices: {}\nD:\n{}N:\n{}",
        tuple(&p.nilpotency_indices),
        render::nmatrix_text(&p.d),
        render::nmatrix_text(&p.n)
    );
    Ok(Report {
        text,
        json: json!({
            "d": render::nmatrix(&p.d),
            "n": render::nmatrix(&p.n),
            "nilpotency_indices": p.nilpotency_indices,
        }),
    })
}

fn cayley(ctx: &Ctx, file: &Path) -> Outcome {
    let a = load_nmatrix(ctx, file)?;
    let ok = spectral::cayley_hamilton_check(&a)?;
    let mut text = String::new();
    for (i, b) in ok.iter().enumerate() {
        writeln!(
            text,
            "component {}: f(A) = 0 {}",
            i + 1,
            if *b { "holds" } else { "fails" }
        )
        .unwrap();
    }
    Ok(Report {
        text,
        json: json!({ "holds": ok }),
    })
}

fn gram_schmidt(ctx: &Ctx, file: &Path) -> Outcome {
    let a = load_nmatrix(ctx, file)?;
    let g = inner::gram_schmidt(&subset_from_rows(&a)?)?;
    let mut text = format!("orthonormal: {}\n", g.orthonormal);
    for (i, (vs, ns)) in g.basis.sets().iter().zip(&g.norms_sq).enumerate() {
        writeln!(text, "component {}", i + 1).unwrap();
        for (v, n) in vs.iter().zip(ns) {
            writeln!(text, "  {}  |u|^2 = {n}", join(v)).unwrap();
        }
    }
    Ok(Report {
        text,
        json: json!({
            "orthonormal": g.orthonormal,
            "basis": g.basis.sets().iter().map(|s| s.iter().map(|v| render::scalars(v)).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "norms_sq": g.norms_sq.iter().map(|n| render::scalars(n)).collect::<Vec<_>>(),
        }),
    })
}

fn approx(ctx: &Ctx, subspace: &Path, vector: &Path) -> Outcome {
    let w = subset_from_rows(&load_nmatrix(ctx, subspace)?)?;
    let beta = load_vector(ctx, vector)?.to_nvector()?;
    let (best, residual) = inner::orthogonal_projection(&w, &beta)?;
    let text = format!(
        "approximation:\n{}residual:\n{}",
        render::nvector_text(&best),
        render::nvector_text(&residual)
    );
    Ok(Report {
        text,
        json: json!({ "approximation": render::nvector(&best), "residual": render::nvector(&residual) }),
    })
}

fn ortho_name(o: OrthoComponent) -> &'static str {
    match o {
        OrthoComponent::Identity => "orthogonal",
        OrthoComponent::NegIdentity => "anti-orthogonal",
        OrthoComponent::Other => "neither",
    }
}

fn ortho_class(ctx: &Ctx, file: &Path) -> Outcome {
    let a = load_nmatrix(ctx, file)?;
    let o = a.ortho_classify();
    let mut text = format!("orthogonality: {}\n", o.verdict);
    let op = if a.is_square() && a.field().is_ordered() {
        Some(inner::operator_classify(&a)?)
    } else {
        None
    };
    if let Some(r) = &op {
        writeln!(text, "operator class: {}", r.verdict).unwrap();
    }
    for (i, c) in o.per_component.iter().enumerate() {
        write!(text, "component {}: {}", i + 1, ortho_name(*c)).unwrap();
        if let Some(r) = &op {
            write!(text, ", {}", r.per_component[i].class()).unwrap();
        }
        text.push('\n');
    }
    Ok(Report {
        text,
        json: json!({
            "orthogonality": o.verdict.to_string(),
            "per_component": o.per_component.iter().map(|c| ortho_name(*c)).collect::<Vec<_>>(),
            "operator_class": op.as_ref().map(|r| r.verdict.to_string()),
            "operator_flags": op.as_ref().map(|r| r.per_component.iter().map(|f| json!({
                "self_adjoint": f.self_adjoint,
                "unitary": f.unitary,
                "normal": f.normal,
            })).collect::<Vec<_>>()),
        }),
    })
}

fn markov_classify(ctx: &Ctx, file: &Path) -> Outcome {
    let c = load_chain(ctx, file)?;
    let s = markov::classify_states(&c);
    let reg = markov::is_n_regular(&c, None);
    let n = c.len();
    let name = |i: usize, states: &[usize]| -> String {
        format!(
            "{{{}}}",
            states.iter().map(|&x| c.label(i, x)).collect::<Vec<_>>().join(", ")
        )
    };
    let mut text = String::new();
    let mut comps = Vec::new();
    for (i, comp) in s.components.iter().enumerate() {
        writeln!(text, "component {}", i + 1).unwrap();
        let classes: Vec<String> = comp.classes.iter().map(|cl| name(i, cl)).collect();
        writeln!(text, "  classes: {}", classes.join(" ")).unwrap();
        let essential: Vec<usize> = (0..comp.essential.len()).filter(|&k| comp.essential[k]).collect();
        writeln!(text, "  essential: {}", name(i, &essential)).unwrap();
        let closed: Vec<String> = comp.closed_sets.iter().map(|cl| name(i, cl)).collect();
        writeln!(text, "  closed sets: {}", closed.join(" ")).unwrap();
        writeln!(text, "  absorbing: {}", name(i, &comp.absorbing)).unwrap();
        writeln!(text, "  irreducible: {}", comp.irreducible).unwrap();
        let labels = |v: &[usize]| v.iter().map(|&x| c.label(i, x)).collect::<Vec<_>>();
        comps.push(json!({
            "classes": comp.classes.iter().map(|cl| labels(cl)).collect::<Vec<_>>(),
            "essential": labels(&essential),
            "closed_sets": comp.closed_sets.iter().map(|cl| labels(cl)).collect::<Vec<_>>(),
            "absorbing": labels(&comp.absorbing),
            "irreducible": comp.irreducible,
            "regular_power": reg.witnesses[i],
        }));
    }
    writeln!(
        text,
        "irreducibility: {} ({} of {})",
        markov::m_label(s.irreducible_count, n),
        s.irreducible_count,
        n
    )
    .unwrap();
    writeln!(text, "n-irreducible: {}", s.n_irreducible).unwrap();
    writeln!(text, "n-regular: {}", reg.regular).unwrap();
    let absorbing = s
        .n_absorbing
        .as_ref()
        .map(|t| t.iter().enumerate().map(|(i, &x)| c.label(i, x)).collect::<Vec<_>>());
    match &absorbing {
        Some(t) => writeln!(text, "n-absorbing state: {}", tuple(t)).unwrap(),
        None => writeln!(text, "n-absorbing state: none").unwrap(),
    }
    Ok(Report {
        text,
        json: json!({
            "components": comps,
            "n_irreducible": s.n_irreducible,
            "irreducible_label": markov::m_label(s.irreducible_count, n),
            "n_regular": reg.regular,
            "n_absorbing": absorbing,
        }),
    })
}

fn markov_stationary(ctx: &Ctx, file: &Path) -> Outcome {
    let c = load_chain(ctx, file)?;
    let s = markov::stationary_distribution(&c)?;
    let mut text = String::new();
    for (i, (v, u)) in s.distribution.components().iter().zip(&s.unique).enumerate() {
        writeln!(
            text,
            "component {}: {}{}",
            i + 1,
            join(v),
            if *u { "" } else { "  (not unique)" }
        )
        .unwrap();
    }
    Ok(Report {
        text,
        json: json!({ "distribution": render::nvector(&s.distribution), "unique": s.unique }),
    })
}

fn markov_evolve(ctx: &Ctx, chain: &Path, initial: &Path, steps: u64) -> Outcome {
    let c = load_chain(ctx, chain)?;
    let x = load_vector(ctx, initial)?.to_nvector()?;
    let y = markov::evolve(&c, &x, steps)?;
    Ok(Report {
        text: render::nvector_text(&y),
        json: json!({ "steps": steps, "distribution": render::nvector(&y) }),
    })
}

fn markov_spectral(ctx: &Ctx, file: &Path, power: Option<u32>) -> Outcome {
    let c = load_chain(ctx, file)?;
    let s = markov::spectral_decompose(&c)?;
    let mut text = String::new();
    let mut comps = Vec::new();
    for (i, comp) in s.components.iter().enumerate() {
        writeln!(text, "component {}: residual {:e}", i + 1, comp.residual).unwrap();
        for (l, a) in comp.eigenvalues.iter().zip(&comp.projections) {
            writeln!(text, "  eigenvalue {}:", fmt_f64(*l)).unwrap();
            text.push_str(&render::float_matrix_rows(a, "    "));
        }
        comps.push(json!({
            "eigenvalues": render::floats(&comp.eigenvalues),
            "projections": comp.projections.iter().map(|a| render::float_rows(a)).collect::<Vec<_>>(),
            "residual_below_1e-9": comp.residual <= 1e-9,
        }));
    }
    let mut out = json!({ "components": comps });
    if let Some(k) = power {
        let pk = markov::power_via_spectral(&s, k);
        for (i, m) in pk.iter().enumerate() {
            writeln!(text, "component {}, power {k}:", i + 1).unwrap();
            text.push_str(&render::float_matrix_rows(m, "  "));
        }
        out["power"] = json!(k);
        out["powers"] = Value::Array(pk.iter().map(|m| render::float_rows(m)).collect());
    }
    Ok(Report { text, json: out })
}

fn markov_walk(ctx: &Ctx, kind: Walk, sizes: &[usize], p: &[String], field: &str) -> Outcome {
    let f = parse_field_descriptor(field, ctx.opts.tolerance)
        .map_err(|_| Failure::Usage(format!("invalid field `{field}`")))?;
    let probs = p
        .iter()
        .map(|t| {
            f.parse_scalar(t)
                .ok_or_else(|| Failure::Usage(format!("invalid probability `{t}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let kind = match kind {
        Walk::Absorbing => WalkKind::Absorbing,
        Walk::Reflecting => WalkKind::Reflecting,
    };
    let c = markov::random_walk(kind, f, sizes, &probs)?;
    let doc = Document::Matrix(MatrixDoc {
        field: f,
        convention: Some(Convention::Row),
        model: None,
        relaxed: None,
        components: c.matrix().components().to_vec(),
        labels: vec![None; c.len()],
    });
    Ok(Report {
        text: emit(&doc),
        json: json!({ "convention": "row", "chain": render::nmatrix(c.matrix()) }),
    })
}

fn leontief_closed(ctx: &Ctx, file: &Path) -> Outcome {
    let e = load_matrix(ctx, file)?.to_exchange()?;
    let s = leontief::closed_solve(&e)?;
    let mut text = String::new();
    for (i, (p, u)) in s.prices.components().iter().zip(&s.unique).enumerate() {
        writeln!(
            text,
            "component {}: p = {}{}",
            i + 1,
            join(p),
            if *u { "" } else { "  (not unique)" }
        )
        .unwrap();
    }
    Ok(Report {
        text,
        json: json!({ "prices": render::nvector(&s.prices), "unique": s.unique }),
    })
}

fn open_inputs(ctx: &Ctx, model: &Path, demand: &Path) -> Result<(leontief::ConsumptionModel, NVector), Failure> {
    let c = load_matrix(ctx, model)?.to_consumption()?;
    let d = load_vector(ctx, demand)?.to_nvector()?;
    Ok((c, d))
}

fn leontief_open(ctx: &Ctx, model: &Path, demand: &Path) -> Outcome {
    let (c, d) = open_inputs(ctx, model, demand)?;
    let x = leontief::open_solve(&c, &d)?;
    let mut text = String::new();
    for (i, v) in x.components().iter().enumerate() {
        writeln!(text, "component {}: x = {}", i + 1, join(v)).unwrap();
    }
    Ok(Report {
        text,
        json: json!({ "production": render::nvector(&x) }),
    })
}

fn leontief_s_closed(ctx: &Ctx, file: &Path, rounds: usize) -> Outcome {
    let e = load_matrix(ctx, file)?.to_exchange()?;
    let s = leontief::s_closed_solve(&e, &MaxMin, rounds)?;
    let mut text = String::new();
    let mut comps = Vec::new();
    for (i, c) in s.components.iter().enumerate() {
        match &c.selected {
            Some(p) => writeln!(
                text,
                "component {}: p = {}  (nullity {}, {} candidates, {} rounds)",
                i + 1,
                join(p),
                c.nullity,
                c.candidates.len(),
                c.rounds
            )
            .unwrap(),
            None => writeln!(text, "component {}: no equilibrium (I - A nonsingular)", i + 1).unwrap(),
        }
        comps.push(json!({
            "nullity": c.nullity,
            "candidates": c.candidates.iter().map(|v| render::scalars(v)).collect::<Vec<_>>(),
            "selected": c.selected.as_ref().map(|v| render::scalars(v)),
            "rounds": c.rounds,
        }));
    }
    Ok(Report {
        text,
        json: json!({ "components": comps }),
    })
}

fn leontief_s_open(ctx: &Ctx, model: &Path, demand: &Path) -> Outcome {
    let (c, d) = open_inputs(ctx, model, demand)?;
    let s = leontief::s_open_solve(&c, &d)?;
    let mut text = String::new();
    for (i, (x, v)) in s.production.components().iter().zip(&s.verdicts).enumerate() {
        writeln!(text, "component {}: x = {}  ({v})", i + 1, join(x)).unwrap();
    }
    for w in &s.warnings {
        writeln!(text, "warning: {w}").unwrap();
    }
    Ok(Report {
        text,
        json: json!({
            "production": render::nvector(&s.production),
            "verdicts": s.verdicts.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "warnings": s.warnings,
        }),
    })
}

fn hom_dim(ctx: &Ctx, file: Option<&Path>, source: &[usize], target: &[usize], assignment: &[usize]) -> Outcome {
    if let Some(path) = file {
        let map = load_map(ctx, path)?.to_map()?;
        let rn = map.rank_nullity()?;
        let assignment0 = map.assignment().to_vec();
        let hom = hom_dimension(map.source_dims(), map.target_dims(), &assignment0).ok();
        let mut text = format!("kind: {}\n", map.kind());
        writeln!(text, "ranks: {}", tuple(&rn.ranks)).unwrap();
        writeln!(text, "nullities: {}", tuple(&rn.nullities)).unwrap();
        writeln!(text, "source dims: {}", tuple(&rn.dims)).unwrap();
        if let Some(h) = &hom {
            writeln!(text, "hom dimension: {}", tuple(h)).unwrap();
        }
        return Ok(Report {
            text,
            json: json!({
                "kind": map.kind().name(),
                "ranks": rn.ranks,
                "nullities": rn.nullities,
                "dims": rn.dims,
                "hom_dimension": hom,
            }),
        });
    }
    if source.is_empty() || target.is_empty() {
        return Err(Failure::Usage(
            "hom-dim needs an nmap file or --source and --target".into(),
        ));
    }
    let assignment0: Vec<usize> = if assignment.is_empty() {
        (0..source.len()).collect()
    } else {
        if assignment.contains(&0) {
            return Err(Failure::Usage("assignment slots are 1-based".into()));
        }
        assignment.iter().map(|a| a - 1).collect()
    };
    let h = hom_dimension(source, target, &assignment0)?;
    Ok(Report {
        text: format!("hom dimension: {}\n", tuple(&h)),
        json: json!({ "hom_dimension": h }),
    })
}

fn nfield(ctx: &Ctx, fields: &[String]) -> Outcome {
    let components = fields
        .iter()
        .map(|t| {
            parse_field_descriptor(t, ctx.opts.tolerance).map_err(|_| Failure::Usage(format!("invalid field `{t}`")))
        })
        .collect::<Result<Vec<Field>, _>>()?;
    let class = nfield_classify(&NFieldSpec {
        components: components.clone(),
    })?;
    let names: Vec<String> = components.iter().map(Field::to_string).collect();
    Ok(Report {
        text: format!("{}: {class}\n", names.join(" ∪ ")),
        json: json!({ "fields": names, "class": class.to_string() }),
    })
}

fn ngroup(orders: &[String]) -> Outcome {
    let parsed = orders
        .iter()
        .map(|t| {
            t.parse::<BigUint>()
                .map_err(|_| Failure::Usage(format!("invalid group order `{t}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let n = ngroup_order(&parsed)?;
    Ok(Report {
        text: format!("order: {n}\n"),
        json: json!({ "order": n.to_string() }),
    })
}
