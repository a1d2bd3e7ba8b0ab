//! Eigen-theory of n-operators: characteristic and minimal polynomials,
//! eigenspaces, diagonalization, projections, primary decomposition and the
//! diagonalizable-plus-nilpotent splitting.

use crate::error::{Error, Result};
use crate::exec;
use crate::field::{Field, Scalar};
use crate::matrix::Matrix;
use crate::nmatrix::NMatrix;
use crate::poly::Polynomial;

/// One polynomial per component, all over the same field.
#[derive(Debug, Clone, PartialEq)]
pub struct NPolynomial {
    components: Vec<Polynomial>,
}

impl NPolynomial {
    pub fn new(components: Vec<Polynomial>) -> Result<NPolynomial> {
        if components.len() < 2 {
            return Err(Error::TooFewComponents(components.len()));
        }
        let f = *components[0].field();
        if components.iter().any(|p| !p.field().same_kind(&f)) {
            return Err(Error::FieldMismatch);
        }
        Ok(NPolynomial { components })
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Polynomial {
        &self.components[i]
    }

    pub fn is_monic(&self) -> bool {
        self.components.iter().all(Polynomial::is_monic)
    }

    /// Components rendered with [`Polynomial::render`], joined by ` ∪ `.
    pub fn render(&self) -> String {
        self.components
            .iter()
            .map(Polynomial::render)
            .collect::<Vec<_>>()
            .join(" ∪ ")
    }
}

/// `det(xI - M)` by Berkowitz's division-free algorithm.
pub fn charpoly(field: &Field, m: &Matrix) -> Polynomial {
    let f = *field;
    let n = m.rows();
    if n == 0 {
        return Polynomial::one(f);
    }
    // v holds coefficients highest degree first.
    let mut v = vec![f.one(), f.neg(m.get(0, 0))];
    for r in 1..n {
        // Toeplitz column [1, -a, -R C, -R M C, …, -R M^{r-1} C].
        let mut t = Vec::with_capacity(r + 2);
        t.push(f.one());
        t.push(f.neg(m.get(r, r)));
        let mut c: Vec<Scalar> = (0..r).map(|i| m.get(i, r).clone()).collect();
        for k in 0..r {
            if k > 0 {
                c = (0..r)
                    .map(|i| (0..r).fold(f.zero(), |acc, j| f.add(&acc, &f.mul(m.get(i, j), &c[j]))))
                    .collect();
            }
            let rc = (0..r).fold(f.zero(), |acc, j| f.add(&acc, &f.mul(m.get(r, j), &c[j])));
            t.push(f.neg(&rc));
        }
        let next: Vec<Scalar> = (0..r + 2)
            .map(|i| (0..=i.min(r)).fold(f.zero(), |acc, j| f.add(&acc, &f.mul(&t[i - j], &v[j]))))
            .collect();
        v = next;
    }
    v.reverse();
    Polynomial::new(f, v)
}

pub fn char_npoly(a: &NMatrix) -> Result<NPolynomial> {
    a.require_square()?;
    let f = *a.field();
    NPolynomial::new(exec::map_components(a.components(), |_, m| charpoly(&f, m)))
}

fn require_exact(a: &NMatrix) -> Result<()> {
    a.require_square()?;
    if a.field().is_exact() {
        Ok(())
    } else {
        Err(Error::ExactFieldRequired)
    }
}

/// Report order for eigenvalues: triangular components list them as they
/// first appear on the diagonal, all others ascending.
pub fn eigen_order(field: &Field, m: &Matrix, mut values: Vec<Scalar>) -> Vec<Scalar> {
    values.sort_by(|a, b| field.canonical_cmp(a, b));
    if m.is_upper_triangular(field) || m.is_lower_triangular(field) {
        let position = |v: &Scalar| {
            (0..m.rows())
                .position(|i| field.eq(m.get(i, i), v))
                .unwrap_or(usize::MAX)
        };
        values.sort_by_key(position);
    }
    values
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub value: Scalar,
    pub algebraic: usize,
    pub geometric: usize,
    pub basis: Vec<Vec<Scalar>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentEigen {
    pub eigenvalues: Vec<Eigenpair>,
    /// Root-free part of the characteristic polynomial (constant when it splits).
    pub cofactor: Polynomial,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenReport {
    pub components: Vec<ComponentEigen>,
}

impl EigenReport {
    pub fn value_sets(&self) -> Vec<Vec<Scalar>> {
        self.components
            .iter()
            .map(|c| c.eigenvalues.iter().map(|e| e.value.clone()).collect())
            .collect()
    }

    /// Number of n-tuples of characteristic values: the product of the
    /// distinct eigenvalue counts.
    pub fn combinations(&self) -> u128 {
        self.components.iter().map(|c| c.eigenvalues.len() as u128).product()
    }
}

fn component_eigen(f: &Field, m: &Matrix) -> Result<ComponentEigen> {
    let fact = charpoly(f, m).factor_roots()?;
    let order = eigen_order(f, m, fact.roots.iter().map(|(r, _)| r.clone()).collect());
    let eigenvalues = order
        .into_iter()
        .map(|value| {
            let algebraic = fact.roots.iter().find(|(r, _)| *r == value).map_or(0, |(_, k)| *k);
            let basis = m.shift(f, &value).nullspace(f);
            Eigenpair {
                geometric: basis.len(),
                value,
                algebraic,
                basis,
            }
        })
        .collect();
    Ok(ComponentEigen {
        eigenvalues,
        cofactor: fact.cofactor,
    })
}

pub fn eigen(a: &NMatrix) -> Result<EigenReport> {
    require_exact(a)?;
    let f = *a.field();
    let components = exec::try_map_components(a.components(), |_, m| component_eigen(&f, m))?;
    Ok(EigenReport { components })
}

/// Minimal polynomial via Krylov sequences: the lcm over the standard basis
/// vectors `e` of the monic generator of `{p : p(M)e = 0}`.
pub fn krylov_minimal_polynomial(field: &Field, m: &Matrix) -> Polynomial {
    let f = *field;
    let n = m.rows();
    let mut acc = Polynomial::one(f);
    for k in 0..n {
        let mut seq: Vec<Vec<Scalar>> = vec![(0..n).map(|i| if i == k { f.one() } else { f.zero() }).collect()];
        loop {
            let next = m.mul_vec(&f, seq.last().expect("nonempty"));
            let basis = Matrix::from_columns(n, &seq);
            if let Some(c) = basis.solve(&f, &next) {
                let mut coeffs: Vec<Scalar> = c.iter().map(|x| f.neg(x)).collect();
                coeffs.push(f.one());
                acc = acc.lcm_with(&Polynomial::new(f, coeffs));
                break;
            }
            seq.push(next);
        }
    }
    acc
}

/// Least-degree monic divisor of the characteristic polynomial that
/// annihilates `m`. Candidates are products of the in-field linear factors
/// and the squarefree parts of the root-free cofactor.
pub fn minimal_polynomial(field: &Field, m: &Matrix) -> Polynomial {
    let f = *field;
    let chi = charpoly(&f, m);
    let Ok(fact) = chi.factor_roots() else {
        return krylov_minimal_polynomial(&f, m);
    };
    // (base, lowest exponent, highest exponent)
    let mut blocks: Vec<(Polynomial, usize, usize)> = fact
        .roots
        .iter()
        .map(|(r, k)| (Polynomial::linear(f, r), 1, *k))
        .collect();
    if fact.cofactor.degree().unwrap_or(0) > 0 {
        let parts = fact.cofactor.squarefree_decomposition().expect("nonzero cofactor");
        // A root-free part of degree 2 or 3 is irreducible; larger repeated
        // parts could mix factors needing different exponents.
        if parts.iter().any(|(s, i)| *i >= 2 && s.degree().unwrap_or(0) >= 4) {
            return krylov_minimal_polynomial(&f, m);
        }
        for (s, i) in parts {
            let hi = if i == 1 { 1 } else { i };
            blocks.push((s, 1, hi));
        }
    }
    let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
    for (_, lo, hi) in &blocks {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                (*lo..=*hi).map(move |e| {
                    let mut t = t.clone();
                    t.push(e);
                    t
                })
            })
            .collect();
    }
    let degree = |t: &Vec<usize>| -> usize {
        t.iter()
            .zip(&blocks)
            .map(|(e, (b, _, _))| e * b.degree().unwrap_or(0))
            .sum()
    };
    tuples.sort_by(|a, b| degree(a).cmp(&degree(b)).then_with(|| a.cmp(b)));
    for t in &tuples {
        let candidate = t.iter().zip(&blocks).fold(Polynomial::one(f), |acc, (e, (b, _, _))| {
            (0..*e).fold(acc, |acc, _| acc.times(b))
        });
        if candidate.eval_matrix(m).is_zero(&f) {
            return candidate;
        }
    }
    unreachable!("the characteristic polynomial always annihilates")
}

pub fn min_npoly(a: &NMatrix) -> Result<NPolynomial> {
    require_exact(a)?;
    let f = *a.field();
    NPolynomial::new(exec::map_components(a.components(), |_, m| minimal_polynomial(&f, m)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagVerdict {
    Diagonalizable,
    /// The minimal polynomial has a factor with no root in the field.
    NotSplit,
    /// The minimal polynomial has a repeated root.
    RepeatedRoot,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagonalization {
    pub diagonalizable: bool,
    pub per_component: Vec<DiagVerdict>,
    pub minimal: NPolynomial,
    pub diagonal: Option<NMatrix>,
}

fn diagonal_form(f: &Field, m: &Matrix, minimal: &Polynomial) -> Matrix {
    if m.is_upper_triangular(f) || m.is_lower_triangular(f) {
        let d: Vec<Scalar> = (0..m.rows()).map(|i| m.get(i, i).clone()).collect();
        return Matrix::diagonal(f, &d);
    }
    let fact = charpoly(f, m).factor_roots().expect("exact field");
    let order = eigen_order(f, m, minimal.roots().expect("exact field"));
    let mut d = Vec::with_capacity(m.rows());
    for v in order {
        let k = fact.roots.iter().find(|(r, _)| *r == v).map_or(0, |(_, k)| *k);
        d.extend(std::iter::repeat_n(v, k));
    }
    Matrix::diagonal(f, &d)
}

pub fn is_n_diagonalizable(a: &NMatrix) -> Result<Diagonalization> {
    let minimal = min_npoly(a)?;
    let f = *a.field();
    let per_component: Vec<DiagVerdict> = minimal
        .components()
        .iter()
        .map(|p| {
            let fact = p.factor_roots().expect("exact field");
            if !fact.splits() {
                DiagVerdict::NotSplit
            } else if fact.roots.iter().any(|(_, k)| *k > 1) {
                DiagVerdict::RepeatedRoot
            } else {
                DiagVerdict::Diagonalizable
            }
        })
        .collect();
    let diagonalizable = per_component.iter().all(|v| *v == DiagVerdict::Diagonalizable);
    let diagonal = diagonalizable.then(|| {
        NMatrix::from_parts(
            f,
            a.components()
                .iter()
                .zip(minimal.components())
                .map(|(m, p)| diagonal_form(&f, m, p))
                .collect(),
        )
    });
    Ok(Diagonalization {
        diagonalizable,
        per_component,
        minimal,
        diagonal,
    })
}

/// `(eigenvalue, projection)` pairs per component.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionSet {
    pub components: Vec<Vec<(Scalar, Matrix)>>,
}

/// Lagrange projections `E_j = Π_{k≠j} (A - c_k I)/(c_j - c_k)`.
pub fn eigen_projections(a: &NMatrix) -> Result<ProjectionSet> {
    let diag = is_n_diagonalizable(a)?;
    if let Some(i) = diag
        .per_component
        .iter()
        .position(|v| *v != DiagVerdict::Diagonalizable)
    {
        return Err(Error::NotDiagonalizable(i));
    }
    let f = *a.field();
    let items: Vec<(&Matrix, &Polynomial)> = a.components().iter().zip(diag.minimal.components()).collect();
    let components = exec::map_components(&items, |_, (m, p)| {
        let values = eigen_order(&f, m, p.roots().expect("exact field"));
        values
            .iter()
            .map(|cj| {
                let e = values
                    .iter()
                    .filter(|ck| *ck != cj)
                    .fold(Matrix::identity(&f, m.rows()), |acc, ck| {
                        let denom = f.inv(&f.sub(cj, ck)).expect("distinct eigenvalues");
                        acc.mul(&f, &m.shift(&f, ck).scale(&f, &denom))
                    });
                (cj.clone(), e)
            })
            .collect()
    });
    Ok(ProjectionSet { components })
}

// Polynomials e_j with e_j ≡ 1 mod (x - c_j)^{r_j} and e_j ≡ 0 mod the
// other primary factors of `minimal`.
fn primary_idempotents(f: &Field, minimal: &Polynomial, order: &[Scalar]) -> Vec<(Scalar, Polynomial)> {
    let fact = minimal.factor_roots().expect("exact field");
    order
        .iter()
        .map(|c| {
            let r = fact.roots.iter().find(|(x, _)| x == c).map_or(1, |(_, k)| *k);
            let pj = (0..r).fold(Polynomial::one(*f), |acc, _| acc.times(&Polynomial::linear(*f, c)));
            let qj = minimal.quo(&pj);
            let inv = qj.inverse_mod(&pj).expect("coprime primary factors");
            (c.clone(), qj.times(&inv).rem(minimal))
        })
        .collect()
}

/// Projections onto the generalized eigenspaces, from polynomial
/// interpolation modulo the primary factors of the minimal polynomial.
pub fn generalized_projections(a: &NMatrix) -> Result<ProjectionSet> {
    let minimal = min_npoly(a)?;
    let f = *a.field();
    for (i, p) in minimal.components().iter().enumerate() {
        if !p.factor_roots()?.splits() {
            return Err(Error::MinimalPolynomialDoesNotSplit(i));
        }
    }
    let items: Vec<(&Matrix, &Polynomial)> = a.components().iter().zip(minimal.components()).collect();
    let components = exec::map_components(&items, |_, (m, p)| {
        let order = eigen_order(&f, m, p.roots().expect("exact field"));
        primary_idempotents(&f, p, &order)
            .into_iter()
            .map(|(c, e)| (c, e.eval_matrix(m)))
            .collect()
    });
    Ok(ProjectionSet { components })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrimaryBlock {
    pub factor: Polynomial,
    pub exponent: usize,
    pub basis: Vec<Vec<Scalar>>,
}

/// Null spaces of `p(A)^r` for each primary factor of the minimal
/// polynomial; a root-free part is kept as a single block.
pub fn primary_decomposition(a: &NMatrix) -> Result<Vec<Vec<PrimaryBlock>>> {
    let minimal = min_npoly(a)?;
    let f = *a.field();
    let items: Vec<(&Matrix, &Polynomial)> = a.components().iter().zip(minimal.components()).collect();
    Ok(exec::map_components(&items, |_, (m, p)| {
        let fact = p.factor_roots().expect("exact field");
        let order = eigen_order(&f, m, fact.roots.iter().map(|(r, _)| r.clone()).collect());
        let mut blocks: Vec<PrimaryBlock> = order
            .iter()
            .map(|c| {
                let r = fact.roots.iter().find(|(x, _)| x == c).map_or(1, |(_, k)| *k);
                PrimaryBlock {
                    factor: Polynomial::linear(f, c),
                    exponent: r,
                    basis: m.shift(&f, c).pow(&f, r as u64).nullspace(&f),
                }
            })
            .collect();
        if fact.cofactor.degree().unwrap_or(0) > 0 {
            blocks.push(PrimaryBlock {
                basis: fact.cofactor.eval_matrix(m).nullspace(&f),
                factor: fact.cofactor.clone(),
                exponent: 1,
            });
        }
        let all: Vec<Vec<Scalar>> = blocks.iter().flat_map(|b| b.basis.iter().cloned()).collect();
        assert_eq!(
            Matrix::from_columns(m.rows(), &all).rank(&f),
            m.rows(),
            "primary components must span the space"
        );
        blocks
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DNPair {
    pub d: NMatrix,
    pub n: NMatrix,
    pub nilpotency_indices: Vec<usize>,
}

/// `A = D + N` with `D` diagonalizable, `N` nilpotent and `DN = ND`.
pub fn dn_decompose(a: &NMatrix) -> Result<DNPair> {
    let proj = generalized_projections(a)?;
    let f = *a.field();
    let items: Vec<(&Matrix, &Vec<(Scalar, Matrix)>)> = a.components().iter().zip(&proj.components).collect();
    let parts = exec::map_components(&items, |_, (m, es)| {
        let d = es.iter().fold(Matrix::zeros(&f, m.rows(), m.rows()), |acc, (c, e)| {
            acc.add(&f, &e.scale(&f, c))
        });
        let n = m.sub(&f, &d);
        let mut index = 1;
        let mut power = n.clone();
        while !power.is_zero(&f) {
            power = power.mul(&f, &n);
            index += 1;
        }
        (d, n, index)
    });
    let mut ds = Vec::new();
    let mut ns = Vec::new();
    let mut indices = Vec::new();
    for (d, n, k) in parts {
        ds.push(d);
        ns.push(n);
        indices.push(k);
    }
    Ok(DNPair {
        d: NMatrix::from_parts(f, ds),
        n: NMatrix::from_parts(f, ns),
        nilpotency_indices: indices,
    })
}

/// Whether each component is annihilated by its characteristic polynomial.
pub fn cayley_hamilton_check(a: &NMatrix) -> Result<Vec<bool>> {
    a.require_square()?;
    let f = *a.field();
    Ok(exec::map_components(a.components(), |_, m| {
        charpoly(&f, m).eval_matrix(m).is_zero(&f)
    }))
}

/// Whether `A_i` maps the span of `bases[i]` into itself, per component.
pub fn is_invariant(a: &NMatrix, bases: &[Vec<Vec<Scalar>>]) -> Result<Vec<bool>> {
    a.require_square()?;
    if bases.len() != a.len() {
        return Err(Error::DimMismatch(format!(
            "{} bases for {} components",
            bases.len(),
            a.len()
        )));
    }
    let f = *a.field();
    let mut out = Vec::with_capacity(a.len());
    for (i, (m, basis)) in a.components().iter().zip(bases).enumerate() {
        if basis.iter().any(|v| v.len() != m.rows()) {
            return Err(Error::ShapeMismatch {
                component: i,
                detail: "basis vector length differs from the operator size".into(),
            });
        }
        if basis.is_empty() {
            out.push(true);
            continue;
        }
        let span = Matrix::from_columns(m.rows(), basis);
        out.push(basis.iter().all(|v| span.solve(&f, &m.mul_vec(&f, v)).is_some()));
    }
    Ok(out)
}

/// Whether `A_i E = E A_i` for every projection of component `i`.
pub fn commutes_with_projections(a: &NMatrix, e: &ProjectionSet) -> Result<Vec<bool>> {
    a.require_square()?;
    if e.components.len() != a.len() {
        return Err(Error::DimMismatch(format!(
            "{} projection lists for {} components",
            e.components.len(),
            a.len()
        )));
    }
    let f = *a.field();
    let mut out = Vec::with_capacity(a.len());
    for (i, (m, es)) in a.components().iter().zip(&e.components).enumerate() {
        if es.iter().any(|(_, p)| p.shape() != m.shape()) {
            return Err(Error::ShapeMismatch {
                component: i,
                detail: "projection shape differs from the operator".into(),
            });
        }
        out.push(
            es.iter()
                .all(|(_, p)| m.mul(&f, p) == p.mul(&f, m) || m.mul(&f, p).approx_eq(&f, &p.mul(&f, m))),
        );
    }
    Ok(out)
}
