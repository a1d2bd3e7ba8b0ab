//! n-linear transformations `T = T_1 ∪ … ∪ T_n : V → W`, where `T_i` maps
//! `V_i` into the target slot `W_{j(i)}`.

use std::fmt;

use crate::error::{Error, Result};
use crate::exec;
use crate::field::{Field, Scalar};
use crate::matrix::Matrix;
use crate::nspace::{NSubset, NVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    /// Injective assignment into more target slots than sources.
    NLinear,
    /// Repeated targets with no more target slots than sources.
    Shrinking,
    /// Repeated targets although there are more target slots than sources.
    SpecialShrinking,
    /// Bijective assignment; the component maps themselves may be anything.
    OneToOne,
    /// Bijective assignment with `dim V_i = dim W_{j(i)}`.
    Special,
}

impl MapKind {
    pub fn name(&self) -> &'static str {
        match self {
            MapKind::NLinear => "NLinear",
            MapKind::Shrinking => "Shrinking",
            MapKind::SpecialShrinking => "SpecialShrinking",
            MapKind::OneToOne => "OneToOne",
            MapKind::Special => "Special",
        }
    }

    pub fn injective_assignment(&self) -> bool {
        matches!(self, MapKind::NLinear | MapKind::OneToOne | MapKind::Special)
    }
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Derives the kind from the 0-based assignment and the dimensions.
pub fn classify_assignment(source_dims: &[usize], target_dims: &[usize], assignment: &[usize]) -> Result<MapKind> {
    let (n, m) = (source_dims.len(), target_dims.len());
    if assignment.len() != n {
        return Err(Error::InvalidAssignment(format!(
            "{} targets given for {} source components",
            assignment.len(),
            n
        )));
    }
    if let Some(&j) = assignment.iter().find(|&&j| j >= m) {
        return Err(Error::InvalidAssignment(format!(
            "target slot {} out of range 1..={m}",
            j + 1
        )));
    }
    let injective = assignment.iter().enumerate().all(|(i, j)| !assignment[..i].contains(j));
    Ok(match (injective, m.cmp(&n)) {
        (true, std::cmp::Ordering::Equal) => {
            if (0..n).all(|i| source_dims[i] == target_dims[assignment[i]]) {
                MapKind::Special
            } else {
                MapKind::OneToOne
            }
        }
        (true, _) => MapKind::NLinear,
        (false, std::cmp::Ordering::Greater) => MapKind::SpecialShrinking,
        (false, _) => MapKind::Shrinking,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NLinearMap {
    field: Field,
    source_dims: Vec<usize>,
    target_dims: Vec<usize>,
    assignment: Vec<usize>,
    matrices: Vec<Matrix>,
    kind: MapKind,
}

/// Component null-space bases and the number `t` of nonzero kernels.
#[derive(Debug, Clone, PartialEq)]
pub struct NKernel {
    pub bases: Vec<Vec<Vec<Scalar>>>,
    pub t: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankNullity {
    pub ranks: Vec<usize>,
    pub nullities: Vec<usize>,
    pub dims: Vec<usize>,
}

impl NLinearMap {
    /// `assignment[i]` is the 0-based target slot of source component `i`;
    /// matrix `i` has shape `dim W_{j(i)} × dim V_i`.
    pub fn new(
        field: Field,
        source_dims: Vec<usize>,
        target_dims: Vec<usize>,
        assignment: Vec<usize>,
        matrices: Vec<Matrix>,
    ) -> Result<NLinearMap> {
        if source_dims.len() < 2 {
            return Err(Error::TooFewComponents(source_dims.len()));
        }
        if source_dims.contains(&0) || target_dims.contains(&0) {
            return Err(Error::DimMismatch("component dimensions must be positive".into()));
        }
        let kind = classify_assignment(&source_dims, &target_dims, &assignment)?;
        if matrices.len() != source_dims.len() {
            return Err(Error::DimMismatch(format!(
                "{} matrices for {} source components",
                matrices.len(),
                source_dims.len()
            )));
        }
        for (i, m) in matrices.iter().enumerate() {
            let want = (target_dims[assignment[i]], source_dims[i]);
            if m.shape() != want {
                return Err(Error::ShapeMismatch {
                    component: i,
                    detail: format!("expected {}x{}, found {}x{}", want.0, want.1, m.rows(), m.cols()),
                });
            }
            if !m.entries().iter().all(|s| field.contains(s)) {
                return Err(Error::FieldMismatch);
            }
        }
        Ok(NLinearMap {
            field,
            source_dims,
            target_dims,
            assignment,
            matrices,
            kind,
        })
    }

    /// Identity special map on the given dimensions.
    pub fn identity(field: Field, dims: &[usize]) -> Result<NLinearMap> {
        NLinearMap::new(
            field,
            dims.to_vec(),
            dims.to_vec(),
            (0..dims.len()).collect(),
            dims.iter().map(|&d| Matrix::identity(&field, d)).collect(),
        )
    }

    pub fn zero(
        field: Field,
        source_dims: &[usize],
        target_dims: &[usize],
        assignment: &[usize],
    ) -> Result<NLinearMap> {
        let matrices = source_dims
            .iter()
            .zip(assignment)
            .map(|(&d, &j)| Matrix::zeros(&field, target_dims.get(j).copied().unwrap_or(1), d))
            .collect();
        NLinearMap::new(
            field,
            source_dims.to_vec(),
            target_dims.to_vec(),
            assignment.to_vec(),
            matrices,
        )
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn source_dims(&self) -> &[usize] {
        &self.source_dims
    }

    pub fn target_dims(&self) -> &[usize] {
        &self.target_dims
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.matrices
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    /// Places `T_i v_i` into slot `j(i)`. Unassigned slots stay zero and
    /// several sources landing in one slot are summed.
    pub fn apply(&self, v: &NVector) -> Result<NVector> {
        if !self.field.same_kind(v.field()) {
            return Err(Error::FieldMismatch);
        }
        if v.dims() != self.source_dims {
            return Err(Error::SpaceMismatch);
        }
        let f = self.field;
        let mut out: Vec<Vec<Scalar>> = self.target_dims.iter().map(|&d| vec![f.zero(); d]).collect();
        let images = exec::map_components(&self.matrices, |i, m| m.mul_vec(&f, v.component(i)));
        for (i, img) in images.into_iter().enumerate() {
            let slot = &mut out[self.assignment[i]];
            for (acc, x) in slot.iter_mut().zip(img) {
                *acc = f.add(acc, &x);
            }
        }
        Ok(NVector::from_parts(f, out))
    }

    pub fn n_kernel(&self) -> NKernel {
        let bases = exec::map_components(&self.matrices, |_, m| m.nullspace(&self.field));
        let t = bases.iter().filter(|b| !b.is_empty()).count();
        NKernel { bases, t }
    }

    /// Rank and nullity per component; only maps with an injective
    /// assignment carry the n-law.
    pub fn rank_nullity(&self) -> Result<RankNullity> {
        if !self.kind.injective_assignment() {
            return Err(Error::KindMismatch {
                expected: "NLinear",
                found: self.kind.to_string(),
            });
        }
        let ranks = exec::map_components(&self.matrices, |_, m| m.rank(&self.field));
        let nullities: Vec<usize> = self.n_kernel().bases.iter().map(Vec::len).collect();
        for i in 0..ranks.len() {
            assert_eq!(
                ranks[i] + nullities[i],
                self.source_dims[i],
                "rank-nullity violated in component {}",
                i + 1
            );
        }
        Ok(RankNullity {
            ranks,
            nullities,
            dims: self.source_dims.clone(),
        })
    }

    /// The unique map sending each source basis vector to the given image.
    /// `images[i][k]` is the image of basis vector `k` of component `i`, a
    /// vector in `W_{j(i)}`.
    pub fn from_basis_images(
        basis: &NSubset,
        images: &[Vec<Vec<Scalar>>],
        target_dims: &[usize],
        assignment: &[usize],
    ) -> Result<NLinearMap> {
        let f = *basis.field();
        let dims = basis.dims().to_vec();
        classify_assignment(&dims, target_dims, assignment)?;
        if images.len() != dims.len() {
            return Err(Error::DimMismatch(format!(
                "{} image lists for {} components",
                images.len(),
                dims.len()
            )));
        }
        let report = basis.is_n_independent();
        let mut matrices = Vec::with_capacity(dims.len());
        for i in 0..dims.len() {
            if basis.set(i).len() != dims[i] || !report.per_component[i] {
                return Err(Error::NotABasis(i));
            }
            let want = target_dims[assignment[i]];
            if images[i].len() != dims[i] || images[i].iter().any(|w| w.len() != want) {
                return Err(Error::ShapeMismatch {
                    component: i,
                    detail: format!("expected {} images of length {want}", dims[i]),
                });
            }
            let b = basis.column_matrix(i);
            let img = Matrix::from_columns(want, &images[i]);
            let binv = b.inverse(&f).ok_or(Error::NotABasis(i))?;
            matrices.push(img.mul(&f, &binv));
        }
        let map = NLinearMap::new(f, dims, target_dims.to_vec(), assignment.to_vec(), matrices)?;
        if f.is_exact() {
            for i in 0..map.matrices.len() {
                for (k, b) in basis.set(i).iter().enumerate() {
                    debug_assert_eq!(map.matrices[i].mul_vec(&f, b), images[i][k]);
                }
            }
        }
        Ok(map)
    }

    /// Images of the basis vectors, in the shape `from_basis_images` takes.
    pub fn basis_images(&self, basis: &NSubset) -> Result<Vec<Vec<Vec<Scalar>>>> {
        if basis.dims() != self.source_dims.as_slice() {
            return Err(Error::SpaceMismatch);
        }
        Ok((0..self.matrices.len())
            .map(|i| {
                basis
                    .set(i)
                    .iter()
                    .map(|b| self.matrices[i].mul_vec(&self.field, b))
                    .collect()
            })
            .collect())
    }

    /// `U ∘ T`: requires `T`'s target to be `U`'s source.
    pub fn compose(u: &NLinearMap, t: &NLinearMap) -> Result<NLinearMap> {
        if !u.field.same_kind(&t.field) {
            return Err(Error::FieldMismatch);
        }
        if t.target_dims != u.source_dims {
            return Err(Error::SpaceMismatch);
        }
        let f = t.field;
        let assignment: Vec<usize> = t.assignment.iter().map(|&j| u.assignment[j]).collect();
        let matrices = exec::map_components(&t.matrices, |i, m| u.matrices[t.assignment[i]].mul(&f, m));
        NLinearMap::new(f, t.source_dims.clone(), u.target_dims.clone(), assignment, matrices)
    }

    pub fn add(&self, other: &NLinearMap) -> Result<NLinearMap> {
        if !self.field.same_kind(&other.field) {
            return Err(Error::FieldMismatch);
        }
        if self.source_dims != other.source_dims
            || self.target_dims != other.target_dims
            || self.assignment != other.assignment
        {
            return Err(Error::SpaceMismatch);
        }
        let f = self.field;
        let matrices = self
            .matrices
            .iter()
            .zip(&other.matrices)
            .map(|(a, b)| a.add(&f, b))
            .collect();
        Ok(NLinearMap {
            matrices,
            ..self.clone()
        })
    }

    pub fn scale(&self, c: &Scalar) -> Result<NLinearMap> {
        if !self.field.contains(c) {
            return Err(Error::FieldMismatch);
        }
        let matrices = self.matrices.iter().map(|m| m.scale(&self.field, c)).collect();
        Ok(NLinearMap {
            matrices,
            ..self.clone()
        })
    }

    pub fn is_nonsingular(&self) -> bool {
        self.matrices
            .iter()
            .all(|m| m.is_square() && m.rank(&self.field) == m.rows())
    }

    /// Inverse of a special map, with the assignment reversed.
    pub fn invert(&self) -> Result<NLinearMap> {
        if self.kind != MapKind::Special {
            return Err(Error::KindMismatch {
                expected: "Special",
                found: self.kind.to_string(),
            });
        }
        let f = self.field;
        let inverses =
            exec::try_map_components(&self.matrices, |i, m| m.inverse(&f).ok_or(Error::SingularComponent(i)))?;
        let n = self.matrices.len();
        let mut assignment = vec![0; n];
        let mut matrices: Vec<Option<Matrix>> = vec![None; n];
        for (i, inv) in inverses.into_iter().enumerate() {
            let j = self.assignment[i];
            assignment[j] = i;
            matrices[j] = Some(inv);
        }
        NLinearMap::new(
            f,
            self.target_dims.clone(),
            self.source_dims.clone(),
            assignment,
            matrices.into_iter().map(|m| m.expect("bijective assignment")).collect(),
        )
    }
}

/// Dimension tuple `(m_{j(1)} n_1, …, m_{j(n)} n_n)` of the space of
/// n-linear maps with the given injective assignment.
pub fn hom_dimension(source_dims: &[usize], target_dims: &[usize], assignment: &[usize]) -> Result<Vec<usize>> {
    let kind = classify_assignment(source_dims, target_dims, assignment)?;
    if !kind.injective_assignment() {
        return Err(Error::InvalidAssignment("assignment must be injective".into()));
    }
    Ok(source_dims
        .iter()
        .zip(assignment)
        .map(|(&n, &j)| target_dims[j] * n)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Scalar {
        Field::Rational.from_i64(n)
    }

    fn qm(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()).unwrap()
    }

    // T1: Q³ → W4 (dim 5), T2: Q² → W3 (dim 2), T3: Q⁴ → W1 (dim 4).
    fn example_map() -> NLinearMap {
        NLinearMap::new(
            Field::Rational,
            vec![3, 2, 4],
            vec![4, 3, 2, 5],
            vec![3, 2, 0],
            vec![
                qm(&[&[1, 1, 0], &[0, 0, 1], &[1, 0, 0], &[1, 0, 1], &[0, 1, 0]]),
                qm(&[&[1, 1], &[1, 0]]),
                qm(&[&[1, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1], &[0, 0, 1, 1]]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn kind_taxonomy() {
        assert_eq!(example_map().kind(), MapKind::NLinear);
        assert_eq!(
            classify_assignment(&[3, 2, 5, 7, 6], &[5, 3, 6], &[2, 0, 1, 2, 0]),
            Ok(MapKind::Shrinking)
        );
        assert_eq!(
            classify_assignment(&[3, 2, 5], &[2, 3, 5], &[1, 0, 2]),
            Ok(MapKind::Special)
        );
        assert_eq!(
            classify_assignment(&[3, 2, 5], &[2, 3, 5], &[0, 1, 2]),
            Ok(MapKind::OneToOne)
        );
        assert_eq!(
            classify_assignment(&[3, 2], &[3, 2, 4], &[0, 0]),
            Ok(MapKind::SpecialShrinking)
        );
        assert!(matches!(
            classify_assignment(&[3, 2], &[3, 2], &[0, 2]),
            Err(Error::InvalidAssignment(_))
        ));
    }

    #[test]
    fn example_kernel_and_ranks() {
        let t = example_map();
        let k = t.n_kernel();
        assert!(k.bases[0].is_empty() && k.bases[1].is_empty());
        assert_eq!(k.bases[2], vec![vec![q(-1), q(1), q(0), q(0)]]);
        assert_eq!(k.t, 1);
        let rn = t.rank_nullity().unwrap();
        assert_eq!(rn.ranks, vec![3, 2, 3]);
        assert_eq!(rn.nullities, vec![0, 0, 1]);
    }

    #[test]
    fn apply_places_images_in_slots() {
        let t = example_map();
        let v = NVector::new(
            Field::Rational,
            vec![vec![q(0), q(0), q(0)], vec![q(1), q(2)], vec![q(0), q(0), q(0), q(0)]],
        )
        .unwrap();
        let w = t.apply(&v).unwrap();
        assert_eq!(w.component(2), &[q(3), q(1)]);
        assert!(w.component(1).iter().all(|x| *x == q(0)));
    }

    #[test]
    fn shrinking_maps_sum_into_shared_slot() {
        let f = Field::Rational;
        let t = NLinearMap::new(f, vec![1, 2], vec![1, 3], vec![0, 0], vec![qm(&[&[2]]), qm(&[&[1, 1]])]).unwrap();
        assert_eq!(t.kind(), MapKind::Shrinking);
        let v = NVector::new(f, vec![vec![q(1)], vec![q(3), q(4)]]).unwrap();
        assert_eq!(t.apply(&v).unwrap().component(0), &[q(9)]);
        assert!(matches!(t.rank_nullity(), Err(Error::KindMismatch { .. })));
    }

    #[test]
    fn basis_image_construction() {
        let f = Field::Rational;
        let basis = NSubset::new(
            f,
            vec![2, 1],
            vec![vec![vec![q(1), q(1)], vec![q(1), q(0)]], vec![vec![q(1)]]],
        )
        .unwrap();
        let images = vec![vec![vec![q(2)], vec![q(1)]], vec![vec![q(5), q(0)]]];
        let t = NLinearMap::from_basis_images(&basis, &images, &[1, 2], &[0, 1]).unwrap();
        assert_eq!(t.matrices()[0], qm(&[&[1, 1]]));
        assert_eq!(t.basis_images(&basis).unwrap(), images);
        let dependent = NSubset::new(
            f,
            vec![2, 1],
            vec![vec![vec![q(1), q(1)], vec![q(2), q(2)]], vec![vec![q(1)]]],
        )
        .unwrap();
        assert_eq!(
            NLinearMap::from_basis_images(&dependent, &images, &[1, 2], &[0, 1]),
            Err(Error::NotABasis(0))
        );
    }

    #[test]
    fn invert_and_compose() {
        let f = Field::Rational;
        let t = NLinearMap::new(
            f,
            vec![2, 1],
            vec![1, 2],
            vec![1, 0],
            vec![qm(&[&[1, 2], &[0, 2]]), qm(&[&[3]])],
        )
        .unwrap();
        assert_eq!(t.kind(), MapKind::Special);
        let inv = t.invert().unwrap();
        assert_eq!(inv.assignment(), &[1, 0]);
        assert_eq!(
            inv.matrices()[1],
            Matrix::from_rows(vec![vec![q(1), q(-1)], vec![q(0), f.from_ratio(1, 2).unwrap()],]).unwrap()
        );
        assert_eq!(
            NLinearMap::compose(&inv, &t).unwrap(),
            NLinearMap::identity(f, &[2, 1]).unwrap()
        );
        let id = NLinearMap::identity(f, &[1, 2]).unwrap();
        assert_eq!(NLinearMap::compose(&id, &t).unwrap(), t);
        let singular = NLinearMap::new(
            f,
            vec![1, 2],
            vec![1, 2],
            vec![0, 1],
            vec![qm(&[&[0]]), qm(&[&[1, 0], &[0, 1]])],
        )
        .unwrap();
        assert_eq!(singular.invert(), Err(Error::SingularComponent(0)));
    }

    #[test]
    fn hom_dimensions() {
        assert_eq!(
            hom_dimension(&[3, 2, 4], &[4, 3, 2, 5], &[0, 1, 3]).unwrap(),
            vec![12, 6, 20]
        );
        assert_eq!(hom_dimension(&[2, 3], &[3, 2], &[0, 1]).unwrap(), vec![6, 6]);
        assert_eq!(
            hom_dimension(&[2, 3, 4], &[2, 3, 4], &[0, 1, 2]).unwrap(),
            vec![4, 9, 16]
        );
        assert!(hom_dimension(&[2, 3], &[2], &[0, 0]).is_err());
    }
}
