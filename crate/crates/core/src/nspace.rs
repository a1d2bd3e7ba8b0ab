//! n-vector spaces `F^{n_1} ∪ … ∪ F^{n_n}` over one shared field.

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::matrix::Matrix;

/// Dimension signature `(n_1, …, n_n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NDims {
    dims: Vec<usize>,
    strict: bool,
}

impl NDims {
    pub fn new(dims: Vec<usize>, strict: bool) -> Result<NDims> {
        if dims.len() < 2 {
            return Err(Error::TooFewComponents(dims.len()));
        }
        if dims.contains(&0) {
            return Err(Error::DimMismatch("component dimensions must be positive".into()));
        }
        if strict && has_repeats(&dims) {
            return Err(Error::NonStrictDims(dims));
        }
        Ok(NDims { dims, strict })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn strict(&self) -> bool {
        self.strict
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// Whether `other` is a permutation of these dimensions.
    pub fn same_n_dimension(&self, other: &NDims) -> bool {
        same_n_dimension(&self.dims, &other.dims)
    }

    /// Number of n-spaces sharing this n-dimension (including this one): `n!`.
    pub fn count_same_dimension(&self) -> Result<BigUint> {
        if !self.strict || has_repeats(&self.dims) {
            return Err(Error::NonStrictDims(self.dims.clone()));
        }
        Ok((1..=self.dims.len()).map(BigUint::from).product())
    }
}

fn has_repeats(dims: &[usize]) -> bool {
    dims.iter().enumerate().any(|(i, d)| dims[..i].contains(d))
}

pub fn same_n_dimension(a: &[usize], b: &[usize]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    a == b
}

#[derive(Debug, Clone, PartialEq)]
pub struct NVectorSpace {
    pub field: Field,
    pub dims: NDims,
}

impl NVectorSpace {
    pub fn new(field: Field, dims: NDims) -> NVectorSpace {
        NVectorSpace { field, dims }
    }

    pub fn zero(&self) -> NVector {
        NVector {
            field: self.field,
            components: self.dims.dims().iter().map(|&d| vec![self.field.zero(); d]).collect(),
        }
    }

    pub fn contains(&self, v: &NVector) -> bool {
        self.field.same_kind(&v.field) && v.dims() == self.dims.dims()
    }

    pub fn standard_basis(&self) -> NSubset {
        let f = self.field;
        let sets = self
            .dims
            .dims()
            .iter()
            .map(|&d| {
                (0..d)
                    .map(|k| (0..d).map(|j| if j == k { f.one() } else { f.zero() }).collect())
                    .collect()
            })
            .collect();
        NSubset {
            field: f,
            dims: self.dims.dims().to_vec(),
            sets,
        }
    }
}

/// One vector per component; component `i` lives in `F^{n_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct NVector {
    field: Field,
    components: Vec<Vec<Scalar>>,
}

impl NVector {
    pub fn new(field: Field, components: Vec<Vec<Scalar>>) -> Result<NVector> {
        if components.len() < 2 {
            return Err(Error::TooFewComponents(components.len()));
        }
        for (i, c) in components.iter().enumerate() {
            if c.is_empty() {
                return Err(Error::ShapeMismatch {
                    component: i,
                    detail: "empty component".into(),
                });
            }
            if !c.iter().all(|s| field.contains(s)) {
                return Err(Error::FieldMismatch);
            }
        }
        Ok(NVector { field, components })
    }

    pub(crate) fn from_parts(field: Field, components: Vec<Vec<Scalar>>) -> NVector {
        NVector { field, components }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn components(&self) -> &[Vec<Scalar>] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &[Scalar] {
        &self.components[i]
    }

    pub fn into_components(self) -> Vec<Vec<Scalar>> {
        self.components
    }

    pub fn dims(&self) -> Vec<usize> {
        self.components.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.iter().all(|s| self.field.is_zero(s)))
    }

    fn check(&self, other: &NVector) -> Result<()> {
        if !self.field.same_kind(&other.field) {
            return Err(Error::FieldMismatch);
        }
        if self.dims() != other.dims() {
            return Err(Error::SpaceMismatch);
        }
        Ok(())
    }

    fn zip_with(&self, other: &NVector, op: impl Fn(&Scalar, &Scalar) -> Scalar) -> NVector {
        NVector {
            field: self.field,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| op(x, y)).collect())
                .collect(),
        }
    }

    fn map(&self, op: impl Fn(&Scalar) -> Scalar) -> NVector {
        NVector {
            field: self.field,
            components: self.components.iter().map(|a| a.iter().map(&op).collect()).collect(),
        }
    }

    pub fn add(&self, other: &NVector) -> Result<NVector> {
        self.check(other)?;
        Ok(self.zip_with(other, |a, b| self.field.add(a, b)))
    }

    pub fn sub(&self, other: &NVector) -> Result<NVector> {
        self.check(other)?;
        Ok(self.zip_with(other, |a, b| self.field.sub(a, b)))
    }

    pub fn neg(&self) -> NVector {
        self.map(|a| self.field.neg(a))
    }

    pub fn scale(&self, c: &Scalar) -> Result<NVector> {
        if !self.field.contains(c) {
            return Err(Error::FieldMismatch);
        }
        Ok(self.map(|a| self.field.mul(a, c)))
    }

    /// `c·self + other`.
    pub fn axpy(&self, c: &Scalar, other: &NVector) -> Result<NVector> {
        self.scale(c)?.add(other)
    }

    pub fn approx_eq(&self, other: &NVector) -> bool {
        self.dims() == other.dims()
            && self
                .components
                .iter()
                .flatten()
                .zip(other.components.iter().flatten())
                .all(|(a, b)| self.field.eq(a, b))
    }
}

/// `S = S_1 ∪ … ∪ S_n`, a finite nonempty list of vectors per component.
#[derive(Debug, Clone, PartialEq)]
pub struct NSubset {
    field: Field,
    dims: Vec<usize>,
    sets: Vec<Vec<Vec<Scalar>>>,
}

/// Verdicts of the componentwise independence test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependenceReport {
    pub independent: bool,
    pub per_component: Vec<bool>,
    pub first_dependent: Option<usize>,
}

impl NSubset {
    pub fn new(field: Field, dims: Vec<usize>, sets: Vec<Vec<Vec<Scalar>>>) -> Result<NSubset> {
        if sets.len() < 2 {
            return Err(Error::TooFewComponents(sets.len()));
        }
        if sets.len() != dims.len() {
            return Err(Error::DimMismatch(format!(
                "{} sets for {} components",
                sets.len(),
                dims.len()
            )));
        }
        for (i, set) in sets.iter().enumerate() {
            if set.is_empty() {
                return Err(Error::ShapeMismatch {
                    component: i,
                    detail: "empty vector set".into(),
                });
            }
            if let Some(v) = set.iter().find(|v| v.len() != dims[i]) {
                return Err(Error::ShapeMismatch {
                    component: i,
                    detail: format!("vector of length {} in a {}-dimensional component", v.len(), dims[i]),
                });
            }
            if !set.iter().flatten().all(|s| field.contains(s)) {
                return Err(Error::FieldMismatch);
            }
        }
        Ok(NSubset { field, dims, sets })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn sets(&self) -> &[Vec<Vec<Scalar>>] {
        &self.sets
    }

    pub fn set(&self, i: usize) -> &[Vec<Scalar>] {
        &self.sets[i]
    }

    /// Matrix whose columns are the vectors of component `i`.
    pub fn column_matrix(&self, i: usize) -> Matrix {
        Matrix::from_columns(self.dims[i], &self.sets[i])
    }

    pub fn is_n_independent(&self) -> IndependenceReport {
        let per_component: Vec<bool> = (0..self.sets.len())
            .map(|i| self.column_matrix(i).rank(&self.field) == self.sets[i].len())
            .collect();
        let first_dependent = per_component.iter().position(|ok| !ok);
        IndependenceReport {
            independent: first_dependent.is_none(),
            per_component,
            first_dependent,
        }
    }

    /// Every component set is independent and has exactly `n_i` vectors.
    pub fn is_n_basis(&self) -> bool {
        self.sets.iter().zip(&self.dims).all(|(s, d)| s.len() == *d) && self.is_n_independent().independent
    }

    /// Coordinates of `v` in each component span (free coordinates set to
    /// zero), or `None` when some component of `v` is outside the span.
    pub fn span_membership(&self, v: &NVector) -> Result<Option<Vec<Vec<Scalar>>>> {
        if !self.field.same_kind(v.field()) {
            return Err(Error::FieldMismatch);
        }
        if v.dims() != self.dims {
            return Err(Error::SpaceMismatch);
        }
        let mut coords = Vec::with_capacity(self.sets.len());
        for i in 0..self.sets.len() {
            match self.column_matrix(i).solve(&self.field, v.component(i)) {
                Some(x) => coords.push(x),
                None => return Ok(None),
            }
        }
        Ok(Some(coords))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Scalar {
        Field::Rational.from_i64(n)
    }

    fn qv(c: &[&[i64]]) -> NVector {
        NVector::new(
            Field::Rational,
            c.iter().map(|v| v.iter().map(|&x| q(x)).collect()).collect(),
        )
        .unwrap()
    }

    fn subset(dims: &[usize], sets: &[&[&[i64]]]) -> NSubset {
        NSubset::new(
            Field::Rational,
            dims.to_vec(),
            sets.iter()
                .map(|s| s.iter().map(|v| v.iter().map(|&x| q(x)).collect()).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn componentwise_arithmetic() {
        let a = qv(&[&[1, 2], &[0, 0, 1]]);
        let b = qv(&[&[0, 1], &[1, 1, 1]]);
        assert_eq!(a.add(&b).unwrap(), qv(&[&[1, 3], &[1, 1, 2]]));
        assert!(a.scale(&q(0)).unwrap().is_zero());
        assert_eq!(
            qv(&[&[1, 0], &[3, -1, 2]]).scale(&q(2)).unwrap(),
            qv(&[&[2, 0], &[6, -2, 4]])
        );
        assert_eq!(a.axpy(&q(2), &b).unwrap(), qv(&[&[2, 5], &[1, 1, 3]]));
        assert_eq!(a.add(&qv(&[&[1, 2, 3], &[1, 2]])), Err(Error::SpaceMismatch));
    }

    #[test]
    fn independence_examples() {
        let s = subset(&[3, 2], &[&[&[7, 0, 2], &[0, 5, 1]], &[&[1, 0]]]);
        assert!(s.is_n_independent().independent);
        let five = subset(
            &[2, 4],
            &[
                &[&[1, 0]],
                &[
                    &[1, 0, 0, 0],
                    &[0, 1, 0, 0],
                    &[0, 0, 1, 0],
                    &[0, 0, 0, 1],
                    &[1, 1, 1, 1],
                ],
            ],
        );
        let r = five.is_n_independent();
        assert!(!r.independent);
        assert_eq!(r.first_dependent, Some(1));
        let mult = subset(&[2, 3], &[&[&[1, 0], &[0, 1]], &[&[1, 1, 1], &[2, 2, 2]]]);
        assert_eq!(mult.is_n_independent().per_component, vec![true, false]);
    }

    #[test]
    fn basis_examples() {
        let space = NVectorSpace::new(Field::Rational, NDims::new(vec![2, 3], true).unwrap());
        assert!(space.standard_basis().is_n_basis());
        let b = subset(
            &[6, 3, 4, 5],
            &[
                &[
                    &[1, 0, 0, 0, 0, 0],
                    &[0, 1, 0, 0, 0, 0],
                    &[0, 0, 1, 0, 0, 0],
                    &[0, 0, 0, 1, 0, 0],
                    &[0, 0, 0, 0, 1, 0],
                    &[0, 0, 0, 0, 0, 1],
                ],
                &[&[1, 0, 0], &[0, 1, 0], &[0, 2, 1]],
                &[&[0, 0, 1, 0], &[1, 0, 0, 0], &[0, 0, 0, 1], &[0, 1, 0, 0]],
                &[
                    &[0, 0, 0, 0, 1],
                    &[0, 0, 0, 1, 0],
                    &[0, 0, 1, 0, 0],
                    &[0, 1, 0, 0, 0],
                    &[1, 0, 0, 0, 0],
                ],
            ],
        );
        assert!(b.is_n_basis());
        let under = subset(&[2, 3], &[&[&[1, 0], &[0, 1]], &[&[1, 0, 0], &[0, 1, 0]]]);
        assert!(under.is_n_independent().independent);
        assert!(!under.is_n_basis());
    }

    #[test]
    fn span_coordinates() {
        let s = subset(&[2, 3], &[&[&[1, 0], &[1, 1]], &[&[1, 0, 0]]]);
        let coords = s.span_membership(&qv(&[&[2, 3], &[5, 0, 0]])).unwrap().unwrap();
        assert_eq!(coords[0], vec![q(-1), q(3)]);
        assert_eq!(coords[1], vec![q(5)]);
        assert!(s.span_membership(&qv(&[&[2, 3], &[0, 1, 0]])).unwrap().is_none());
        let zero = s.span_membership(&qv(&[&[0, 0], &[0, 0, 0]])).unwrap().unwrap();
        assert!(zero.iter().flatten().all(|c| *c == q(0)));
    }

    #[test]
    fn same_dimension_checks() {
        let a = NDims::new(vec![7, 2, 3, 4, 5], true).unwrap();
        assert!(a.same_n_dimension(&NDims::new(vec![2, 5, 4, 7, 3], true).unwrap()));
        assert!(!a.same_n_dimension(&NDims::new(vec![2, 7, 9, 3, 4], true).unwrap()));
        assert_eq!(
            NDims::new(vec![7, 5, 3], true).unwrap().count_same_dimension().unwrap(),
            BigUint::from(6u32)
        );
        assert_eq!(NDims::new(vec![2, 2], true), Err(Error::NonStrictDims(vec![2, 2])));
        let lenient = NDims::new(vec![2, 2], false).unwrap();
        assert!(lenient.count_same_dimension().is_err());
    }
}
