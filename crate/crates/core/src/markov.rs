//! Markov n-chains: stochastic n-matrices evolved in lockstep.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result, SpectrumIssue};
use crate::exec;
use crate::field::{Field, Scalar};
use crate::matrix::Matrix;
use crate::nmatrix::NMatrix;
use crate::nspace::NVector;
use crate::numeric;
use crate::spectral::charpoly;

/// Which lines of each component sum to one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    #[default]
    Row,
    Column,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Row => "row",
            Convention::Column => "column",
        })
    }
}

impl FromStr for Convention {
    type Err = String;

    fn from_str(s: &str) -> Result<Convention, String> {
        match s {
            "row" => Ok(Convention::Row),
            "column" => Ok(Convention::Column),
            other => Err(format!("unknown convention `{other}`")),
        }
    }
}

/// Checks nonnegativity and unit line sums of every component.
pub fn validate_stochastic(p: &NMatrix, convention: Convention) -> Result<()> {
    let f = *p.field();
    if !f.is_ordered() {
        return Err(Error::UnorderedField);
    }
    p.require_square()?;
    for (i, m) in p.components().iter().enumerate() {
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                if !f.is_nonnegative(m.get(r, c)) {
                    return Err(Error::NegativeEntry {
                        component: i,
                        row: r,
                        col: c,
                    });
                }
            }
        }
        for k in 0..m.rows() {
            let line = match convention {
                Convention::Row => m.row(k).to_vec(),
                Convention::Column => m.column(k),
            };
            let sum = f.sum(&line);
            if !f.is_one(&sum) {
                return Err(Error::StochasticityViolation {
                    component: i,
                    index: k,
                    sum: sum.to_string(),
                });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChain {
    p: NMatrix,
    convention: Convention,
    labels: Option<Vec<Vec<String>>>,
}

impl MarkovChain {
    pub fn new(p: NMatrix, convention: Convention) -> Result<MarkovChain> {
        validate_stochastic(&p, convention)?;
        Ok(MarkovChain {
            p,
            convention,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<Vec<String>>) -> Result<MarkovChain> {
        if labels.len() != self.p.len() || labels.iter().zip(self.sizes()).any(|(l, n)| l.len() != n) {
            return Err(Error::DimMismatch("state labels do not match the chain".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn matrix(&self) -> &NMatrix {
        &self.p
    }

    pub fn field(&self) -> &Field {
        self.p.field()
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn labels(&self) -> Option<&[Vec<String>]> {
        self.labels.as_deref()
    }

    /// Label of `state` in `component`, defaulting to its 1-based index.
    pub fn label(&self, component: usize, state: usize) -> String {
        match &self.labels {
            Some(l) => l[component][state].clone(),
            None => (state + 1).to_string(),
        }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.p.sizes()
    }

    /// Components with row `i` holding the distribution out of state `i`.
    fn row_form(&self) -> Vec<Matrix> {
        match self.convention {
            Convention::Row => self.p.components().to_vec(),
            Convention::Column => self.p.components().iter().map(Matrix::transpose).collect(),
        }
    }
}

fn check_distribution(c: &MarkovChain, x: &NVector) -> Result<()> {
    let f = c.field();
    if !f.same_kind(x.field()) {
        return Err(Error::FieldMismatch);
    }
    if x.dims() != c.sizes() {
        return Err(Error::DimMismatch(format!(
            "state vector {:?} for chain {:?}",
            x.dims(),
            c.sizes()
        )));
    }
    for (i, comp) in x.components().iter().enumerate() {
        if !comp.iter().all(|s| f.is_nonnegative(s)) || !f.is_one(&f.sum(comp)) {
            return Err(Error::NotADistribution(i));
        }
    }
    Ok(())
}

/// `k` steps of the chain from the distribution `x`.
pub fn evolve(c: &MarkovChain, x: &NVector, k: u64) -> Result<NVector> {
    check_distribution(c, x)?;
    let f = *c.field();
    let mut comps: Vec<Vec<Scalar>> = x.components().to_vec();
    for _ in 0..k {
        comps = comps
            .iter()
            .zip(c.p.components())
            .map(|(v, m)| match c.convention {
                Convention::Row => m.vec_mul(&f, v),
                Convention::Column => m.mul_vec(&f, v),
            })
            .collect();
    }
    let out = NVector::new(f, comps)?;
    assert!(check_distribution(c, &out).is_ok(), "evolution left the simplex");
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Regularity {
    pub regular: bool,
    /// Smallest power with every entry positive, per component.
    pub witnesses: Vec<Option<u64>>,
}

fn positivity(f: &Field, m: &Matrix) -> Vec<Vec<bool>> {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| f.is_positive(m.get(r, c))).collect())
        .collect()
}

fn bool_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).any(|k| a[i][k] && b[k][j])).collect())
        .collect()
}

/// Searches powers up to `max_power`, or the Wielandt bound `(n-1)²+1`.
pub fn is_n_regular(c: &MarkovChain, max_power: Option<u64>) -> Regularity {
    let f = *c.field();
    let witnesses = exec::map_components(c.p.components(), |_, m| {
        let n = m.rows() as u64;
        let bound = max_power.unwrap_or((n.saturating_sub(1)).pow(2) + 1);
        let base = positivity(&f, m);
        let mut power = base.clone();
        for k in 1..=bound {
            if power.iter().flatten().all(|&b| b) {
                return Some(k);
            }
            power = bool_mul(&power, &base);
        }
        None
    });
    Regularity {
        regular: witnesses.iter().all(Option::is_some),
        witnesses,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentClasses {
    /// Communicating classes ordered by their smallest state.
    pub classes: Vec<Vec<usize>>,
    pub essential: Vec<bool>,
    /// Reachability closure of each class, deduplicated.
    pub closed_sets: Vec<Vec<usize>>,
    pub absorbing: Vec<usize>,
    pub irreducible: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateClassification {
    pub components: Vec<ComponentClasses>,
    pub n_irreducible: bool,
    /// Set when every component has exactly one absorbing state.
    pub n_absorbing: Option<Vec<usize>>,
    /// How many components are irreducible.
    pub irreducible_count: usize,
    /// How many components have only essential states.
    pub essential_count: usize,
}

/// Prefix for a predicate holding in `m` of `n` components.
pub fn m_label(m: usize, n: usize) -> &'static str {
    if m == n {
        "n"
    } else if m + 1 == n && m > 0 {
        "hyper"
    } else if m > 0 {
        "semi"
    } else {
        "none"
    }
}

// Reflexive-transitive closure of the positive-entry digraph.
fn reachability(f: &Field, m: &Matrix) -> Vec<Vec<bool>> {
    let n = m.rows();
    let mut reach = positivity(f, m);
    for (i, row) in reach.iter_mut().enumerate() {
        row[i] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    reach
}

fn classify_component(f: &Field, m: &Matrix) -> ComponentClasses {
    let n = m.rows();
    let reach = reachability(f, m);
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if class_of[i] != usize::MAX {
            continue;
        }
        let members: Vec<usize> = (i..n).filter(|&j| reach[i][j] && reach[j][i]).collect();
        for &j in &members {
            class_of[j] = classes.len();
        }
        classes.push(members);
    }
    let essential: Vec<bool> = (0..n).map(|i| (0..n).all(|j| !reach[i][j] || reach[j][i])).collect();
    let mut closed_sets: Vec<Vec<usize>> = Vec::new();
    for class in &classes {
        let closure: Vec<usize> = (0..n).filter(|&j| reach[class[0]][j]).collect();
        if !closed_sets.contains(&closure) {
            closed_sets.push(closure);
        }
    }
    let absorbing = (0..n).filter(|&i| f.is_one(m.get(i, i))).collect();
    ComponentClasses {
        irreducible: classes.len() == 1,
        classes,
        essential,
        closed_sets,
        absorbing,
    }
}

pub fn classify_states(c: &MarkovChain) -> StateClassification {
    let f = *c.field();
    let rows = c.row_form();
    let components = exec::map_components(&rows, |_, m| classify_component(&f, m));
    let n_absorbing = components
        .iter()
        .map(|k| (k.absorbing.len() == 1).then(|| k.absorbing[0]))
        .collect::<Option<Vec<usize>>>();
    let irreducible_count = components.iter().filter(|k| k.irreducible).count();
    let essential_count = components.iter().filter(|k| k.essential.iter().all(|&e| e)).count();
    StateClassification {
        n_irreducible: irreducible_count == components.len(),
        components,
        n_absorbing,
        irreducible_count,
        essential_count,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stationary {
    pub distribution: NVector,
    /// Whether the fixed space is one-dimensional, per component.
    pub unique: Vec<bool>,
}

// Normalized solution of `π R = π` on the given states, embedded in `n`.
fn fixed_point(f: &Field, r: &Matrix, states: &[usize]) -> Vec<Scalar> {
    let k = states.len();
    let sub = Matrix::from_fn(k, k, |i, j| r.get(states[j], states[i]).clone());
    let kernel = sub.shift(f, &f.one()).nullspace(f);
    let v = kernel.first().expect("a stochastic matrix fixes some vector");
    let total = f.sum(v);
    let mut out = vec![f.zero(); r.rows()];
    for (s, x) in states.iter().zip(v) {
        out[*s] = f
            .div(x, &total)
            .expect("fixed vector of a closed class has nonzero sum");
    }
    out
}

/// Stationary distribution per component. When the fixed space has
/// dimension above one, the uniform mixture of the stationary laws of the
/// closed communicating classes is returned.
pub fn stationary_distribution(c: &MarkovChain) -> Result<Stationary> {
    let f = *c.field();
    let rows = c.row_form();
    let parts = exec::map_components(&rows, |_, r| {
        let n = r.rows();
        let dim = r.transpose().shift(&f, &f.one()).nullspace(&f).len();
        if dim == 1 {
            let all: Vec<usize> = (0..n).collect();
            return (fixed_point(&f, r, &all), true);
        }
        let classes = classify_component(&f, r);
        let closed: Vec<&Vec<usize>> = classes.classes.iter().filter(|cl| classes.essential[cl[0]]).collect();
        let weight = f.inv(&f.from_i64(closed.len() as i64)).expect("some class is closed");
        let mut mix = vec![f.zero(); n];
        for cl in closed {
            for (m, x) in mix.iter_mut().zip(fixed_point(&f, r, cl)) {
                *m = f.add(m, &f.mul(&weight, &x));
            }
        }
        (mix, false)
    });
    let (comps, unique): (Vec<_>, Vec<_>) = parts.into_iter().unzip();
    for comp in &comps {
        assert!(
            comp.iter().all(|x| f.is_nonnegative(x)),
            "stationary vector of a valid chain is nonnegative"
        );
    }
    Ok(Stationary {
        distribution: NVector::new(f, comps)?,
        unique,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSpectrum {
    /// Eigenvalues in descending order.
    pub eigenvalues: Vec<f64>,
    /// Spectral matrices `A_i = u_i v_i'` with `v_i' u_i = 1`.
    pub projections: Vec<Vec<Vec<f64>>>,
    /// `‖Σ λ_i A_i − P‖∞`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub components: Vec<ComponentSpectrum>,
}

const IMAG_TOL: f64 = 1e-9;
const SEPARATION: f64 = 1e-7;

fn real_spectrum(f: &Field, m: &Matrix) -> std::result::Result<Vec<f64>, SpectrumIssue> {
    let mut values: Vec<f64>;
    if matches!(f, Field::Rational) {
        let fact = charpoly(f, m).factor_roots().expect("rational field");
        if fact.roots.iter().any(|(_, k)| *k > 1) {
            return Err(SpectrumIssue::Repeated);
        }
        values = fact.roots.iter().map(|(r, _)| f.to_f64(r)).collect();
        if fact.cofactor.degree().unwrap_or(0) > 0 {
            let sq = fact.cofactor.squarefree_decomposition().expect("nonzero");
            if sq.iter().any(|(_, i)| *i > 1) {
                return Err(SpectrumIssue::Repeated);
            }
            let coeffs: Vec<f64> = fact.cofactor.coeffs().iter().map(|c| f.to_f64(c)).collect();
            for z in numeric::poly_roots(&coeffs) {
                if z.im.abs() > IMAG_TOL {
                    return Err(SpectrumIssue::Complex);
                }
                values.push(z.re);
            }
        }
    } else {
        let coeffs: Vec<f64> = charpoly(f, m).coeffs().iter().map(|c| f.to_f64(c)).collect();
        values = Vec::new();
        for z in numeric::poly_roots(&coeffs) {
            if z.im.abs() > IMAG_TOL {
                return Err(SpectrumIssue::Complex);
            }
            values.push(z.re);
        }
    }
    values.sort_by(|a, b| b.total_cmp(a));
    if values.windows(2).any(|w| (w[0] - w[1]).abs() < SEPARATION) {
        return Err(SpectrumIssue::Repeated);
    }
    Ok(values)
}

fn to_f64_rows(f: &Field, m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.rows())
        .map(|r| m.row(r).iter().map(|x| f.to_f64(x)).collect())
        .collect()
}

/// `P = Σ λ_i u_i v_i'` per component for real simple spectra.
pub fn spectral_decompose(c: &MarkovChain) -> Result<SpectralDecomposition> {
    let f = *c.field();
    let components = exec::try_map_components(c.p.components(), |i, m| {
        let values = real_spectrum(&f, m).map_err(|reason| Error::RepeatedEigenvalues { component: i, reason })?;
        let p = to_f64_rows(&f, m);
        let n = p.len();
        let vecs: Vec<Vec<f64>> = values.iter().map(|&l| numeric::eigenvector(&p, l)).collect();
        let u: Vec<Vec<f64>> = (0..n).map(|r| vecs.iter().map(|v| v[r]).collect()).collect();
        let v = numeric::inverse(&u).ok_or(Error::RepeatedEigenvalues {
            component: i,
            reason: SpectrumIssue::Repeated,
        })?;
        let projections: Vec<Vec<Vec<f64>>> = (0..n)
            .map(|k| (0..n).map(|r| (0..n).map(|s| u[r][k] * v[k][s]).collect()).collect())
            .collect();
        let recon = combine(&values, &projections, 1);
        let residual = max_norm_diff(&recon, &p);
        Ok(ComponentSpectrum {
            eigenvalues: values,
            projections,
            residual,
        })
    })?;
    Ok(SpectralDecomposition { components })
}

fn combine(values: &[f64], projections: &[Vec<Vec<f64>>], k: u32) -> Vec<Vec<f64>> {
    let n = values.len();
    let mut out = vec![vec![0.0; n]; n];
    for (l, a) in values.iter().zip(projections) {
        let w = l.powi(k as i32);
        for r in 0..n {
            for s in 0..n {
                out[r][s] += w * a[r][s];
            }
        }
    }
    out
}

/// Maximum absolute row sum of `a - b`.
pub fn max_norm_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `P^k = Σ λ_i^k A_i`, as real matrices.
pub fn power_via_spectral(s: &SpectralDecomposition, k: u32) -> Vec<Vec<Vec<f64>>> {
    s.components
        .iter()
        .map(|c| combine(&c.eigenvalues, &c.projections, k))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkKind {
    Absorbing,
    Reflecting,
}

/// Random walk on states `0..=K_t` stepping right with probability `p_t`.
pub fn random_walk(kind: WalkKind, field: Field, sizes: &[usize], p: &[Scalar]) -> Result<MarkovChain> {
    if sizes.len() != p.len() {
        return Err(Error::DimMismatch(format!(
            "{} sizes for {} probabilities",
            sizes.len(),
            p.len()
        )));
    }
    let f = field;
    let mut comps = Vec::with_capacity(sizes.len());
    for (t, (&k, pt)) in sizes.iter().zip(p).enumerate() {
        let qt = f.sub(&f.one(), pt);
        if !f.contains(pt) || !f.is_positive(pt) || !f.is_positive(&qt) {
            return Err(Error::InvalidProbability {
                component: t,
                value: pt.to_string(),
            });
        }
        if k == 0 {
            return Err(Error::DimMismatch(format!("component {} has a single state", t + 1)));
        }
        let mut m = Matrix::zeros(&f, k + 1, k + 1);
        for i in 0..=k {
            match (kind, i) {
                (WalkKind::Absorbing, 0) => m.set(0, 0, f.one()),
                (WalkKind::Absorbing, i) if i == k => m.set(k, k, f.one()),
                (WalkKind::Reflecting, 0) => {
                    m.set(0, 0, qt.clone());
                    m.set(0, 1, pt.clone());
                }
                (WalkKind::Reflecting, i) if i == k => {
                    m.set(k, k - 1, qt.clone());
                    m.set(k, k, pt.clone());
                }
                _ => {
                    m.set(i, i - 1, qt.clone());
                    m.set(i, i + 1, pt.clone());
                }
            }
        }
        comps.push(m);
    }
    MarkovChain::new(NMatrix::new(f, comps)?, Convention::Row)
}

/// Whether every component has identical rows.
pub fn is_independent_trial(c: &MarkovChain) -> Result<bool> {
    if c.convention != Convention::Row {
        return Err(Error::ConventionMismatch);
    }
    let f = *c.field();
    let same =
        c.p.components()
            .iter()
            .all(|m| (1..m.rows()).all(|r| m.row(r).iter().zip(m.row(0)).all(|(a, b)| f.eq(a, b))));
    if same {
        for m in c.p.components() {
            assert!(m.pow(&f, 2).approx_eq(&f, m) && m.pow(&f, 3).approx_eq(&f, m));
        }
    }
    Ok(same)
}
