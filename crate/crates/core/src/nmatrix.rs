//! n-matrices: tuples of (possibly rectangular) matrices over one field.

use std::fmt;

use crate::error::{Error, Result};
use crate::exec;
use crate::field::{Field, Scalar};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq)]
pub struct NMatrix {
    field: Field,
    components: Vec<Matrix>,
}

/// Verdict for one component of `A Aᵗ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrthoComponent {
    Identity,
    NegIdentity,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrthoVerdict {
    NOrthogonal,
    NAntiOrthogonal,
    NSemiOrthogonal,
    NSemiAntiOrthogonal,
    None,
}

impl fmt::Display for OrthoVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrthoVerdict::NOrthogonal => "n-orthogonal",
            OrthoVerdict::NAntiOrthogonal => "n-anti-orthogonal",
            OrthoVerdict::NSemiOrthogonal => "n-semi-orthogonal",
            OrthoVerdict::NSemiAntiOrthogonal => "n-semi-anti-orthogonal",
            OrthoVerdict::None => "none",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthoClass {
    pub verdict: OrthoVerdict,
    pub per_component: Vec<OrthoComponent>,
}

impl NMatrix {
    pub fn new(field: Field, components: Vec<Matrix>) -> Result<NMatrix> {
        if components.len() < 2 {
            return Err(Error::TooFewComponents(components.len()));
        }
        if !components.iter().all(|m| m.entries().iter().all(|s| field.contains(s))) {
            return Err(Error::FieldMismatch);
        }
        Ok(NMatrix { field, components })
    }

    pub(crate) fn from_parts(field: Field, components: Vec<Matrix>) -> NMatrix {
        NMatrix { field, components }
    }

    pub fn identity(field: Field, sizes: &[usize]) -> Result<NMatrix> {
        NMatrix::new(field, sizes.iter().map(|&n| Matrix::identity(&field, n)).collect())
    }

    pub fn zeros(field: Field, shapes: &[(usize, usize)]) -> Result<NMatrix> {
        NMatrix::new(
            field,
            shapes.iter().map(|&(r, c)| Matrix::zeros(&field, r, c)).collect(),
        )
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn components(&self) -> &[Matrix] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Matrix {
        &self.components[i]
    }

    pub fn into_components(self) -> Vec<Matrix> {
        self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn shapes(&self) -> Vec<(usize, usize)> {
        self.components.iter().map(Matrix::shape).collect()
    }

    /// Row counts of square components.
    pub fn sizes(&self) -> Vec<usize> {
        self.components.iter().map(Matrix::rows).collect()
    }

    pub fn is_square(&self) -> bool {
        self.components.iter().all(Matrix::is_square)
    }

    /// Square with pairwise distinct sizes.
    pub fn is_mixed_square(&self) -> bool {
        let sizes = self.sizes();
        self.is_square() && sizes.iter().enumerate().all(|(i, s)| !sizes[..i].contains(s))
    }

    pub fn require_square(&self) -> Result<()> {
        match self.components.iter().position(|m| !m.is_square()) {
            Some(i) => Err(Error::NonSquare(i)),
            None => Ok(()),
        }
    }

    /// Operator contexts: square, and distinct sizes when `strict`.
    pub fn require_operator(&self, strict: bool) -> Result<()> {
        self.require_square()?;
        if strict && !self.is_mixed_square() {
            return Err(Error::NonStrictDims(self.sizes()));
        }
        Ok(())
    }

    fn check_pair(&self, other: &NMatrix) -> Result<()> {
        if !self.field.same_kind(&other.field) {
            return Err(Error::FieldMismatch);
        }
        if self.len() != other.len() {
            return Err(Error::DimMismatch(format!(
                "{} vs {} components",
                self.len(),
                other.len()
            )));
        }
        Ok(())
    }

    fn zip(
        &self,
        other: &NMatrix,
        same_shape: bool,
        op: impl Fn(&Matrix, &Matrix) -> Matrix + Sync + Send,
    ) -> Result<NMatrix> {
        self.check_pair(other)?;
        for (i, (a, b)) in self.components.iter().zip(&other.components).enumerate() {
            let ok = if same_shape {
                a.shape() == b.shape()
            } else {
                a.cols() == b.rows()
            };
            if !ok {
                return Err(Error::ShapeMismatch {
                    component: i,
                    detail: format!("{}x{} vs {}x{}", a.rows(), a.cols(), b.rows(), b.cols()),
                });
            }
        }
        let pairs: Vec<(&Matrix, &Matrix)> = self.components.iter().zip(&other.components).collect();
        Ok(NMatrix::from_parts(
            self.field,
            exec::map_components(&pairs, |_, (a, b)| op(a, b)),
        ))
    }

    pub fn add(&self, other: &NMatrix) -> Result<NMatrix> {
        let f = self.field;
        self.zip(other, true, move |a, b| a.add(&f, b))
    }

    pub fn sub(&self, other: &NMatrix) -> Result<NMatrix> {
        let f = self.field;
        self.zip(other, true, move |a, b| a.sub(&f, b))
    }

    pub fn mul(&self, other: &NMatrix) -> Result<NMatrix> {
        let f = self.field;
        self.zip(other, false, move |a, b| a.mul(&f, b))
    }

    pub fn scale(&self, c: &Scalar) -> Result<NMatrix> {
        if !self.field.contains(c) {
            return Err(Error::FieldMismatch);
        }
        Ok(self.map(|_, m| m.scale(&self.field, c)))
    }

    pub fn transpose(&self) -> NMatrix {
        self.map(|_, m| m.transpose())
    }

    pub fn pow(&self, k: u64) -> Result<NMatrix> {
        self.require_square()?;
        Ok(self.map(|_, m| m.pow(&self.field, k)))
    }

    pub(crate) fn map(&self, f: impl Fn(usize, &Matrix) -> Matrix + Sync + Send) -> NMatrix {
        NMatrix::from_parts(self.field, exec::map_components(&self.components, f))
    }

    pub fn approx_eq(&self, other: &NMatrix) -> bool {
        self.len() == other.len()
            && self
                .components
                .iter()
                .zip(&other.components)
                .all(|(a, b)| a.approx_eq(&self.field, b))
    }

    pub fn n_det(&self) -> Result<Vec<Scalar>> {
        self.require_square()?;
        Ok(exec::map_components(&self.components, |_, m| m.det(&self.field)))
    }

    pub fn n_rank(&self) -> Vec<usize> {
        exec::map_components(&self.components, |_, m| m.rank(&self.field))
    }

    pub fn n_nullspace(&self) -> Vec<Vec<Vec<Scalar>>> {
        exec::map_components(&self.components, |_, m| m.nullspace(&self.field))
    }

    pub fn n_inverse(&self) -> Result<NMatrix> {
        self.require_square()?;
        let inverses = exec::try_map_components(&self.components, |i, m| {
            m.inverse(&self.field).ok_or(Error::SingularComponent(i))
        })?;
        Ok(NMatrix::from_parts(self.field, inverses))
    }

    /// Classifies `A Aᵗ` per component against `±I`.
    pub fn ortho_classify(&self) -> OrthoClass {
        let f = self.field;
        let per_component: Vec<OrthoComponent> = exec::map_components(&self.components, |_, m| {
            let g = m.mul(&f, &m.transpose());
            let n = g.rows();
            if g.approx_eq(&f, &Matrix::identity(&f, n)) {
                OrthoComponent::Identity
            } else if g.approx_eq(&f, &Matrix::identity(&f, n).scale(&f, &f.neg(&f.one()))) {
                OrthoComponent::NegIdentity
            } else {
                OrthoComponent::Other
            }
        });
        let count = |c: OrthoComponent| per_component.iter().filter(|&&v| v == c).count();
        let (ids, negs, n) = (
            count(OrthoComponent::Identity),
            count(OrthoComponent::NegIdentity),
            per_component.len(),
        );
        let verdict = if ids == n {
            OrthoVerdict::NOrthogonal
        } else if negs == n {
            OrthoVerdict::NAntiOrthogonal
        } else if ids > 0 {
            OrthoVerdict::NSemiOrthogonal
        } else if negs > 0 {
            OrthoVerdict::NSemiAntiOrthogonal
        } else {
            OrthoVerdict::None
        };
        OrthoClass { verdict, per_component }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(f: Field, rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| f.from_i64(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn q(rows: &[&[i64]]) -> Matrix {
        m(Field::Rational, rows)
    }

    #[test]
    fn arithmetic_examples() {
        let f = Field::Rational;
        let a = NMatrix::new(
            f,
            vec![q(&[&[1, 2], &[0, 2]]), q(&[&[1, 1, 1], &[0, 1, 0], &[2, 0, 1]])],
        )
        .unwrap();
        let id = NMatrix::identity(f, &[2, 3]).unwrap();
        assert_eq!(id.mul(&a).unwrap(), a);
        assert_eq!(a.pow(2).unwrap().component(0), &q(&[&[1, 6], &[0, 4]]));
        assert_eq!(a.pow(0).unwrap(), id);
        let rect = NMatrix::new(f, vec![q(&[&[1, 2, 3]]), q(&[&[1], &[2]])]).unwrap();
        let t = rect.transpose();
        assert_eq!(t.component(0), &q(&[&[1], &[2], &[3]]));
        assert_eq!(t.component(1), &q(&[&[1, 2]]));
        assert!(matches!(rect.pow(2), Err(Error::NonSquare(0))));
        assert!(matches!(a.add(&rect), Err(Error::ShapeMismatch { component: 0, .. })));
    }

    #[test]
    fn determinants_ranks_inverses() {
        let f = Field::Rational;
        let a = NMatrix::new(
            f,
            vec![q(&[&[1, 2], &[0, 2]]), q(&[&[5, -6, -6], &[-1, 4, 2], &[3, -6, -4]])],
        )
        .unwrap();
        assert_eq!(a.n_det().unwrap(), vec![f.from_i64(2), f.from_i64(4)]);
        let inv = a.n_inverse().unwrap();
        assert_eq!(
            inv.component(0),
            &Matrix::from_rows(vec![
                vec![f.from_i64(1), f.from_i64(-1)],
                vec![f.from_i64(0), f.from_ratio(1, 2).unwrap()],
            ])
            .unwrap()
        );
        assert_eq!(a.mul(&inv).unwrap(), NMatrix::identity(f, &[2, 3]).unwrap());
        let singular = NMatrix::new(f, vec![q(&[&[1]]), q(&[&[1, 1], &[1, 1]])]).unwrap();
        assert_eq!(singular.n_inverse(), Err(Error::SingularComponent(1)));
        let shifted = NMatrix::new(
            f,
            vec![q(&[&[1, 2], &[2, 4]]), q(&[&[3, -6, -6], &[-1, 2, 2], &[3, -6, -6]])],
        )
        .unwrap();
        assert_eq!(shifted.n_rank(), vec![1, 1]);
        assert_eq!(shifted.n_nullspace()[1].len(), 2);
    }

    #[test]
    fn orthogonality_taxonomy() {
        let f = Field::Rational;
        assert_eq!(
            NMatrix::identity(f, &[2, 3]).unwrap().ortho_classify().verdict,
            OrthoVerdict::NOrthogonal
        );
        let semi = NMatrix::new(f, vec![q(&[&[0, 1], &[-1, 0]]), q(&[&[1, 1], &[0, 1]])]).unwrap();
        let c = semi.ortho_classify();
        assert_eq!(c.verdict, OrthoVerdict::NSemiOrthogonal);
        assert_eq!(c.per_component, vec![OrthoComponent::Identity, OrthoComponent::Other]);
        let z5 = Field::Prime(5);
        let anti = NMatrix::new(z5, vec![m(z5, &[&[2]]), m(z5, &[&[2]])]).unwrap();
        assert_eq!(anti.ortho_classify().verdict, OrthoVerdict::NAntiOrthogonal);
        let semi_anti = NMatrix::new(z5, vec![m(z5, &[&[2]]), m(z5, &[&[0]])]).unwrap();
        assert_eq!(semi_anti.ortho_classify().verdict, OrthoVerdict::NSemiAntiOrthogonal);
    }

    #[test]
    fn operator_strictness() {
        let f = Field::Rational;
        let same = NMatrix::identity(f, &[2, 2]).unwrap();
        assert!(same.require_operator(false).is_ok());
        assert_eq!(same.require_operator(true), Err(Error::NonStrictDims(vec![2, 2])));
    }
}
