//! Standard n-inner product and the geometry built on it.

use std::fmt;

use crate::error::{Error, Result};
use crate::exec;
use crate::field::{Field, Scalar};
use crate::matrix::Matrix;
use crate::nmatrix::NMatrix;
use crate::nspace::{NSubset, NVector};

fn require_ordered(f: &Field) -> Result<()> {
    if f.is_ordered() {
        Ok(())
    } else {
        Err(Error::UnorderedField)
    }
}

fn check_pair(a: &NVector, b: &NVector) -> Result<()> {
    require_ordered(a.field())?;
    if !a.field().same_kind(b.field()) {
        return Err(Error::FieldMismatch);
    }
    if a.dims() != b.dims() {
        return Err(Error::SpaceMismatch);
    }
    Ok(())
}

/// Componentwise dot products `⟨a_i | b_i⟩`.
pub fn n_inner(a: &NVector, b: &NVector) -> Result<Vec<Scalar>> {
    check_pair(a, b)?;
    let f = a.field();
    Ok(a.components()
        .iter()
        .zip(b.components())
        .map(|(x, y)| f.dot(x, y))
        .collect())
}

pub fn n_norm_sq(a: &NVector) -> Result<Vec<Scalar>> {
    n_inner(a, a)
}

fn project_coeff(f: &Field, v: &[Scalar], u: &[Scalar]) -> Scalar {
    f.div(&f.dot(v, u), &f.dot(u, u)).expect("nonzero basis vector")
}

fn axpy(f: &Field, c: &Scalar, u: &[Scalar], v: &[Scalar]) -> Vec<Scalar> {
    u.iter().zip(v).map(|(x, y)| f.add(&f.mul(c, x), y)).collect()
}

/// Output of [`gram_schmidt`]. Over the rationals the basis is orthogonal
/// and `norms_sq` carries `‖u‖²`; over the reals it is orthonormal.
#[derive(Debug, Clone, PartialEq)]
pub struct GramSchmidt {
    pub basis: NSubset,
    pub norms_sq: Vec<Vec<Scalar>>,
    pub orthonormal: bool,
}

fn orthogonalize(f: &Field, set: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let mut out: Vec<Vec<Scalar>> = Vec::with_capacity(set.len());
    for v in set {
        let mut w = v.clone();
        // Modified Gram–Schmidt: project the running remainder.
        for u in &out {
            let c = f.neg(&project_coeff(f, &w, u));
            w = axpy(f, &c, u, &w);
        }
        out.push(w);
    }
    out
}

pub fn gram_schmidt(s: &NSubset) -> Result<GramSchmidt> {
    let f = *s.field();
    require_ordered(&f)?;
    if let Some(i) = s.is_n_independent().first_dependent {
        return Err(Error::DependentInput(i));
    }
    let sets = exec::map_components(s.sets(), |_, set| orthogonalize(&f, set));
    let (sets, norms_sq, orthonormal) = if f.is_exact() {
        let norms = sets
            .iter()
            .map(|set| set.iter().map(|u| f.dot(u, u)).collect())
            .collect();
        (sets, norms, false)
    } else {
        let unit: Vec<Vec<Vec<Scalar>>> = sets
            .iter()
            .map(|set| {
                set.iter()
                    .map(|u| {
                        let norm = f.to_f64(&f.dot(u, u)).sqrt();
                        u.iter().map(|x| Scalar::Real(f.to_f64(x) / norm)).collect()
                    })
                    .collect()
            })
            .collect();
        let ones = unit.iter().map(|set| vec![f.one(); set.len()]).collect();
        (unit, ones, true)
    };
    Ok(GramSchmidt {
        basis: NSubset::new(f, s.dims().to_vec(), sets)?,
        norms_sq,
        orthonormal,
    })
}

fn is_pairwise_orthogonal(f: &Field, set: &[Vec<Scalar>]) -> bool {
    (0..set.len()).all(|i| (i + 1..set.len()).all(|j| f.is_zero(&f.dot(&set[i], &set[j]))))
}

/// The set itself when already orthogonal in every component, otherwise its
/// Gram–Schmidt orthogonalization.
fn orthogonal_basis(w: &NSubset) -> Result<Vec<Vec<Vec<Scalar>>>> {
    let f = *w.field();
    require_ordered(&f)?;
    if let Some(i) = w.is_n_independent().first_dependent {
        return Err(Error::DependentInput(i));
    }
    if w.sets().iter().all(|set| is_pairwise_orthogonal(&f, set)) {
        Ok(w.sets().to_vec())
    } else {
        Ok(gram_schmidt(w)?.basis.sets().to_vec())
    }
}

/// The vector of `span(w)` closest to `beta` in every component.
pub fn best_approximation(w: &NSubset, beta: &NVector) -> Result<NVector> {
    Ok(orthogonal_projection(w, beta)?.0)
}

/// `(Eβ, β − Eβ)` for the orthogonal projection `E` onto `span(w)`.
pub fn orthogonal_projection(w: &NSubset, beta: &NVector) -> Result<(NVector, NVector)> {
    if !w.field().same_kind(beta.field()) {
        return Err(Error::FieldMismatch);
    }
    if beta.dims() != w.dims() {
        return Err(Error::SpaceMismatch);
    }
    let basis = orthogonal_basis(w)?;
    let f = *w.field();
    let approx: Vec<Vec<Scalar>> = basis
        .iter()
        .zip(beta.components())
        .map(|(set, b)| {
            set.iter().fold(vec![f.zero(); b.len()], |acc, u| {
                axpy(&f, &project_coeff(&f, b, u), u, &acc)
            })
        })
        .collect();
    let approx = NVector::from_parts(f, approx);
    let residual = beta.sub(&approx)?;
    Ok((approx, residual))
}

/// Matrices of the orthogonal projections onto `span(w)`.
pub fn projection_matrices(w: &NSubset) -> Result<NMatrix> {
    let basis = orthogonal_basis(w)?;
    let f = *w.field();
    let comps = basis
        .iter()
        .zip(w.dims())
        .map(|(set, &n)| {
            set.iter().fold(Matrix::zeros(&f, n, n), |acc, u| {
                let inv = f.inv(&f.dot(u, u)).expect("nonzero basis vector");
                acc.add(&f, &Matrix::from_fn(n, n, |r, c| f.mul(&inv, &f.mul(&u[r], &u[c]))))
            })
        })
        .collect();
    Ok(NMatrix::from_parts(f, comps))
}

/// Basis of `S_i⊥` per component; an empty list stands for `{0}`.
pub fn orthogonal_complement(s: &NSubset) -> Result<Vec<Vec<Vec<Scalar>>>> {
    let f = *s.field();
    require_ordered(&f)?;
    Ok(exec::map_components(s.sets(), |i, set| {
        let n = s.dims()[i];
        Matrix::from_rows(set.clone())
            .map(|m| m.nullspace(&f))
            .unwrap_or_else(|| Matrix::identity(&f, n).to_rows())
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BesselReport {
    pub holds: bool,
    pub per_component: Vec<bool>,
    /// `‖β‖² − Σ |⟨β|α_k⟩|²/‖α_k‖²`, which equals the squared residual norm.
    pub slack: Vec<Scalar>,
}

pub fn bessel_check(set: &NSubset, beta: &NVector) -> Result<BesselReport> {
    let f = *set.field();
    require_ordered(&f)?;
    if !f.same_kind(beta.field()) {
        return Err(Error::FieldMismatch);
    }
    if beta.dims() != set.dims() {
        return Err(Error::SpaceMismatch);
    }
    for (i, s) in set.sets().iter().enumerate() {
        if s.iter().any(|v| v.iter().all(|x| f.is_zero(x))) {
            return Err(Error::ZeroVectorInSet(i));
        }
        if !is_pairwise_orthogonal(&f, s) {
            return Err(Error::NotOrthogonal(i));
        }
    }
    let slack: Vec<Scalar> = set
        .sets()
        .iter()
        .zip(beta.components())
        .map(|(s, b)| {
            let total = s.iter().fold(f.zero(), |acc, u| {
                let d = f.dot(b, u);
                f.add(&acc, &f.div(&f.mul(&d, &d), &f.dot(u, u)).expect("nonzero vector"))
            });
            f.sub(&f.dot(b, b), &total)
        })
        .collect();
    let tol = if f.is_exact() { 0.0 } else { f.tolerance() };
    let per_component: Vec<bool> = slack
        .iter()
        .map(|s| f.is_nonnegative(s) || f.to_f64(s) >= -tol)
        .collect();
    Ok(BesselReport {
        holds: per_component.iter().all(|&b| b),
        per_component,
        slack,
    })
}

/// Adjoint under the standard inner product: the componentwise transpose.
pub fn adjoint(a: &NMatrix) -> Result<NMatrix> {
    require_ordered(a.field())?;
    a.require_square()?;
    Ok(a.transpose())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OperatorFlags {
    pub self_adjoint: bool,
    pub unitary: bool,
    pub normal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorClass {
    SelfAdjoint,
    Unitary,
    Normal,
    None,
}

impl fmt::Display for OperatorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OperatorClass::SelfAdjoint => "self-adjoint",
            OperatorClass::Unitary => "unitary",
            OperatorClass::Normal => "normal",
            OperatorClass::None => "none",
        })
    }
}

impl OperatorFlags {
    pub fn class(&self) -> OperatorClass {
        if self.self_adjoint {
            OperatorClass::SelfAdjoint
        } else if self.unitary {
            OperatorClass::Unitary
        } else if self.normal {
            OperatorClass::Normal
        } else {
            OperatorClass::None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperatorReport {
    pub verdict: OperatorClass,
    pub per_component: Vec<OperatorFlags>,
}

/// Strongest class shared by every component.
pub fn operator_classify(a: &NMatrix) -> Result<OperatorReport> {
    let at = adjoint(a)?;
    let f = *a.field();
    let pairs: Vec<(&Matrix, &Matrix)> = a.components().iter().zip(at.components()).collect();
    let per_component = exec::map_components(&pairs, |_, (m, t)| {
        let mt = m.mul(&f, t);
        OperatorFlags {
            self_adjoint: m.approx_eq(&f, t),
            unitary: mt.approx_eq(&f, &Matrix::identity(&f, m.rows())),
            normal: mt.approx_eq(&f, &t.mul(&f, m)),
        }
    });
    let all = |p: fn(&OperatorFlags) -> bool| per_component.iter().all(p);
    let verdict = if all(|c| c.self_adjoint) {
        OperatorClass::SelfAdjoint
    } else if all(|c| c.unitary) {
        OperatorClass::Unitary
    } else if all(|c| c.normal) {
        OperatorClass::Normal
    } else {
        OperatorClass::None
    };
    Ok(OperatorReport { verdict, per_component })
}
