//! Closed (exchange) and open (production) Leontief n-models, with the
//! relaxed variants that drop the sign constraints.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exec;
use crate::field::{Field, Scalar};
use crate::markov::{stationary_distribution, Convention, MarkovChain};
use crate::matrix::Matrix;
use crate::nmatrix::NMatrix;
use crate::nspace::NVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Exchange,
    Consumption,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Exchange => "exchange",
            ModelKind::Consumption => "consumption",
        })
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<ModelKind, String> {
        match s {
            "exchange" => Ok(ModelKind::Exchange),
            "consumption" => Ok(ModelKind::Consumption),
            other => Err(format!("unknown model `{other}`")),
        }
    }
}

fn require_ordered_square(m: &NMatrix) -> Result<()> {
    if !m.field().is_ordered() {
        return Err(Error::UnorderedField);
    }
    m.require_square()
}

fn first_negative(f: &Field, m: &Matrix) -> Option<(usize, usize)> {
    (0..m.rows())
        .flat_map(|r| (0..m.cols()).map(move |c| (r, c)))
        .find(|&(r, c)| !f.is_nonnegative(m.get(r, c)))
}

/// Input-output matrix of the closed model.
#[derive(Debug, Clone, PartialEq)]
pub struct ExchangeModel {
    a: NMatrix,
    relaxed: bool,
}

impl ExchangeModel {
    pub fn new(a: NMatrix, relaxed: bool) -> Result<ExchangeModel> {
        require_ordered_square(&a)?;
        if !relaxed {
            let f = *a.field();
            for (i, m) in a.components().iter().enumerate() {
                if let Some((r, c)) = first_negative(&f, m) {
                    return Err(Error::InvalidExchangeMatrix {
                        component: i,
                        detail: format!("negative entry at ({}, {})", r + 1, c + 1),
                    });
                }
                if let Some(c) = (0..m.cols()).find(|&c| !f.is_one(&f.sum(&m.column(c)))) {
                    return Err(Error::InvalidExchangeMatrix {
                        component: i,
                        detail: format!("column {} sums to {}", c + 1, f.sum(&m.column(c))),
                    });
                }
            }
        }
        Ok(ExchangeModel { a, relaxed })
    }

    pub fn matrix(&self) -> &NMatrix {
        &self.a
    }

    pub fn relaxed(&self) -> bool {
        self.relaxed
    }
}

/// Consumption matrix of the open model.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsumptionModel {
    c: NMatrix,
    relaxed: bool,
}

impl ConsumptionModel {
    pub fn new(c: NMatrix, relaxed: bool) -> Result<ConsumptionModel> {
        require_ordered_square(&c)?;
        if !relaxed {
            let f = *c.field();
            for (i, m) in c.components().iter().enumerate() {
                if let Some((r, col)) = first_negative(&f, m) {
                    return Err(Error::InvalidConsumptionMatrix {
                        component: i,
                        detail: format!("negative entry at ({}, {})", r + 1, col + 1),
                    });
                }
            }
        }
        Ok(ConsumptionModel { c, relaxed })
    }

    pub fn matrix(&self) -> &NMatrix {
        &self.c
    }

    pub fn relaxed(&self) -> bool {
        self.relaxed
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedSolution {
    /// Nonnegative equilibrium prices, summing to one per component.
    pub prices: NVector,
    /// Whether `I - A_i` has nullity one.
    pub unique: Vec<bool>,
}

/// Equilibrium prices `A p = p` of a standard exchange model.
pub fn closed_solve(e: &ExchangeModel) -> Result<ClosedSolution> {
    if e.relaxed {
        return Err(Error::ModelMismatch("standard exchange"));
    }
    let chain = MarkovChain::new(e.a.clone(), Convention::Column)?;
    let st = stationary_distribution(&chain)?;
    let f = *e.a.field();
    for (m, p) in e.a.components().iter().zip(st.distribution.components()) {
        assert!(
            m.mul_vec(&f, p).iter().zip(p).all(|(x, y)| f.eq(x, y)),
            "equilibrium prices are fixed by A"
        );
    }
    Ok(ClosedSolution {
        prices: st.distribution,
        unique: st.unique,
    })
}

/// Selection rule among candidate price vectors.
pub trait Scorer {
    /// Index of the preferred candidate; `candidates` is nonempty.
    fn pick(&self, field: &Field, candidates: &[Vec<Scalar>]) -> usize;
}

/// Maximizes the smallest entry; ties go to the lexicographically smallest.
#[derive(Debug, Clone, Copy, Default)]
pub struct MaxMin;

fn min_entry(f: &Field, v: &[Scalar]) -> Scalar {
    v.iter()
        .cloned()
        .min_by(|a, b| f.canonical_cmp(a, b))
        .expect("nonempty vector")
}

fn lex_cmp(f: &Field, a: &[Scalar], b: &[Scalar]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| f.canonical_cmp(x, y))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

impl Scorer for MaxMin {
    fn pick(&self, field: &Field, candidates: &[Vec<Scalar>]) -> usize {
        let mut best = 0;
        for (i, c) in candidates.iter().enumerate().skip(1) {
            let order = field
                .canonical_cmp(&min_entry(field, c), &min_entry(field, &candidates[best]))
                .then_with(|| lex_cmp(field, &candidates[best], c));
            if order == Ordering::Greater {
                best = i;
            }
        }
        best
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SClosedComponent {
    pub nullity: usize,
    pub candidates: Vec<Vec<Scalar>>,
    /// `None` when `I - A_i` is nonsingular and no equilibrium exists.
    pub selected: Option<Vec<Scalar>>,
    pub rounds: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SClosedSolution {
    pub components: Vec<SClosedComponent>,
}

impl SClosedSolution {
    /// Selected prices, when every component has an equilibrium.
    pub fn prices(&self, field: Field) -> Option<NVector> {
        let comps = self
            .components
            .iter()
            .map(|c| c.selected.clone())
            .collect::<Option<Vec<_>>>()?;
        NVector::new(field, comps).ok()
    }
}

fn normalized(f: &Field, v: &[Scalar]) -> Option<Vec<Scalar>> {
    let s = f.sum(v);
    if f.is_zero(&s) {
        return None;
    }
    Some(v.iter().map(|x| f.div(x, &s).expect("nonzero sum")).collect())
}

fn push_unique(f: &Field, out: &mut Vec<Vec<Scalar>>, v: Option<Vec<Scalar>>) {
    if let Some(v) = v {
        if !out.iter().any(|w| w.iter().zip(&v).all(|(a, b)| f.eq(a, b))) {
            out.push(v);
        }
    }
}

fn combos(f: &Field, basis: &[Vec<Scalar>], base: Option<&[Scalar]>) -> Vec<Vec<Scalar>> {
    let lin = |a: &[Scalar], b: &[Scalar], sign: &Scalar| -> Vec<Scalar> {
        a.iter().zip(b).map(|(x, y)| f.add(x, &f.mul(sign, y))).collect()
    };
    let one = f.one();
    let minus = f.neg(&one);
    let mut out = Vec::new();
    match base {
        None => {
            for b in basis {
                push_unique(f, &mut out, normalized(f, b));
            }
            for i in 0..basis.len() {
                for j in i + 1..basis.len() {
                    push_unique(f, &mut out, normalized(f, &lin(&basis[i], &basis[j], &one)));
                    push_unique(f, &mut out, normalized(f, &lin(&basis[i], &basis[j], &minus)));
                }
            }
        }
        Some(p) => {
            for b in basis {
                push_unique(f, &mut out, normalized(f, &lin(p, b, &one)));
                push_unique(f, &mut out, normalized(f, &lin(p, b, &minus)));
            }
        }
    }
    out
}

// Null-space vectors of `kernel` that vanish on the `fixed` coordinates.
fn restricted_basis(f: &Field, kernel: &[Vec<Scalar>], fixed: &[usize]) -> Vec<Vec<Scalar>> {
    if fixed.is_empty() {
        return kernel.to_vec();
    }
    let k = Matrix::from_columns(kernel[0].len(), kernel);
    let constraint = Matrix::from_fn(fixed.len(), kernel.len(), |r, c| k.get(fixed[r], c).clone());
    constraint.nullspace(f).iter().map(|coef| k.mul_vec(f, coef)).collect()
}

fn s_closed_component(f: &Field, m: &Matrix, scorer: &dyn Scorer, max_rounds: usize) -> SClosedComponent {
    let n = m.rows();
    let kernel = Matrix::identity(f, n).sub(f, m).nullspace(f);
    let mut candidates = combos(f, &kernel, None);
    if candidates.is_empty() {
        return SClosedComponent {
            nullity: kernel.len(),
            candidates,
            selected: None,
            rounds: 0,
        };
    }
    let mut selected = candidates[scorer.pick(f, &candidates)].clone();
    let mut rounds = 0;
    while rounds < max_rounds {
        let fixed: Vec<usize> = (0..n).filter(|&i| f.is_positive(&selected[i])).collect();
        let free = restricted_basis(f, &kernel, &fixed);
        let mut pool = vec![selected.clone()];
        for c in combos(f, &free, Some(&selected)) {
            push_unique(f, &mut pool, Some(c.clone()));
            push_unique(f, &mut candidates, Some(c));
        }
        let next = pool[scorer.pick(f, &pool)].clone();
        rounds += 1;
        if next == selected {
            break;
        }
        selected = next;
    }
    SClosedComponent {
        nullity: kernel.len(),
        candidates,
        selected: Some(selected),
        rounds,
    }
}

/// Relaxed closed model: candidates from the null space of `I - A`, chosen
/// by `scorer`, with up to `rounds` refinement passes that keep the accepted
/// positive prices and re-solve the others.
pub fn s_closed_solve(e: &ExchangeModel, scorer: &(dyn Scorer + Sync), rounds: usize) -> Result<SClosedSolution> {
    let f = *e.a.field();
    let components = exec::map_components(e.a.components(), |_, m| s_closed_component(&f, m, scorer, rounds));
    Ok(SClosedSolution { components })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductivityComponent {
    pub inverse: Matrix,
    /// `(I - C)^{-1} ≥ 0` entrywise.
    pub productive: bool,
    pub row_sums_below_one: bool,
    pub column_sums_below_one: bool,
    /// `x = (I - C)^{-1}·1`, which satisfies `x > Cx`, when it is nonnegative.
    pub witness: Option<Vec<Scalar>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductivityReport {
    pub productive: bool,
    pub components: Vec<ProductivityComponent>,
}

fn i_minus(f: &Field, m: &Matrix) -> Matrix {
    Matrix::identity(f, m.rows()).sub(f, m)
}

pub fn productivity(c: &ConsumptionModel) -> Result<ProductivityReport> {
    let f = *c.c.field();
    let components = exec::try_map_components(c.c.components(), |i, m| {
        let inverse = i_minus(&f, m).inverse(&f).ok_or(Error::SingularIMinusC(i))?;
        let productive = inverse.entries().iter().all(|x| f.is_nonnegative(x));
        let below = |s: Scalar| f.canonical_cmp(&s, &f.one()) == Ordering::Less && !f.eq(&s, &f.one());
        let row_sums_below_one = (0..m.rows()).all(|r| below(f.sum(m.row(r))));
        let column_sums_below_one = (0..m.cols()).all(|col| below(f.sum(&m.column(col))));
        let x = inverse.mul_vec(&f, &vec![f.one(); m.rows()]);
        let witness = x.iter().all(|v| f.is_nonnegative(v)).then_some(x);
        Ok(ProductivityComponent {
            inverse,
            productive,
            row_sums_below_one,
            column_sums_below_one,
            witness,
        })
    })?;
    Ok(ProductivityReport {
        productive: components.iter().all(|c| c.productive),
        components,
    })
}

fn check_demand(c: &NMatrix, d: &NVector) -> Result<()> {
    if !c.field().same_kind(d.field()) {
        return Err(Error::FieldMismatch);
    }
    if d.dims() != c.sizes() {
        return Err(Error::DimMismatch(format!(
            "demand {:?} for model {:?}",
            d.dims(),
            c.sizes()
        )));
    }
    Ok(())
}

fn solve_components(c: &NMatrix, d: &NVector) -> Result<Vec<Vec<Scalar>>> {
    let f = *c.field();
    let pairs: Vec<(&Matrix, &Vec<Scalar>)> = c.components().iter().zip(d.components()).collect();
    exec::try_map_components(&pairs, |i, (m, di)| {
        let lhs = i_minus(&f, m);
        if lhs.rank(&f) < m.rows() {
            return Err(Error::SingularIMinusC(i));
        }
        let x = lhs.solve(&f, di).ok_or(Error::SingularIMinusC(i))?;
        let surplus: Vec<Scalar> = x.iter().zip(m.mul_vec(&f, &x)).map(|(a, b)| f.sub(a, &b)).collect();
        assert!(
            surplus.iter().zip(di.iter()).all(|(s, t)| f.eq(s, t)),
            "x - Cx reproduces the demand"
        );
        Ok(x)
    })
}

/// Production `x` with `(I - C) x = d` in the standard open model.
pub fn open_solve(c: &ConsumptionModel, d: &NVector) -> Result<NVector> {
    if c.relaxed {
        return Err(Error::ModelMismatch("standard consumption"));
    }
    check_demand(&c.c, d)?;
    let f = *c.c.field();
    if let Some(i) = d
        .components()
        .iter()
        .position(|v| v.iter().any(|x| !f.is_nonnegative(x)))
    {
        return Err(Error::NegativeDemand(i));
    }
    let xs = solve_components(&c.c, d)?;
    for (i, x) in xs.iter().enumerate() {
        let entries: Vec<usize> = (0..x.len()).filter(|&k| !f.is_nonnegative(&x[k])).collect();
        if !entries.is_empty() {
            return Err(Error::NegativeProduction { component: i, entries });
        }
    }
    NVector::new(f, xs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Satisfaction {
    Productive,
    NotUpToSatisfaction,
}

impl fmt::Display for Satisfaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Satisfaction::Productive => "productive",
            Satisfaction::NotUpToSatisfaction => "not up to satisfaction",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SOpenSolution {
    pub production: NVector,
    pub verdicts: Vec<Satisfaction>,
    pub warnings: Vec<String>,
}

/// Relaxed open model: solves whatever the signs and reports them.
pub fn s_open_solve(c: &ConsumptionModel, d: &NVector) -> Result<SOpenSolution> {
    check_demand(&c.c, d)?;
    let f = *c.c.field();
    let report = productivity(c)?;
    let xs = solve_components(&c.c, d)?;
    let mut warnings = Vec::new();
    for (i, (x, di)) in xs.iter().zip(d.components()).enumerate() {
        if di.iter().any(|v| !f.is_nonnegative(v)) {
            warnings.push(format!("component {}: demand has negative entries", i + 1));
        }
        if x.iter().any(|v| !f.is_nonnegative(v)) {
            warnings.push(format!("component {}: production has negative entries", i + 1));
        }
    }
    let verdicts = report
        .components
        .iter()
        .map(|p| {
            if p.productive {
                Satisfaction::Productive
            } else {
                Satisfaction::NotUpToSatisfaction
            }
        })
        .collect();
    Ok(SOpenSolution {
        production: NVector::new(f, xs)?,
        verdicts,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const Q: Field = Field::Rational;

    fn r(n: i64, d: i64) -> Scalar {
        Q.from_ratio(n, d).unwrap()
    }

    fn qm(rows: &[&[(i64, i64)]]) -> Matrix {
        Matrix::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&(n, d)| r(n, d)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn nm(comps: Vec<Matrix>) -> NMatrix {
        NMatrix::new(Q, comps).unwrap()
    }

    fn vecs(parts: &[&[(i64, i64)]]) -> NVector {
        NVector::new(
            Q,
            parts
                .iter()
                .map(|p| p.iter().map(|&(n, d)| r(n, d)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn closed_model() {
        let swap = qm(&[&[(0, 1), (1, 1)], &[(1, 1), (0, 1)]]);
        let mixed = qm(&[&[(1, 2), (1, 3)], &[(1, 2), (2, 3)]]);
        let e = ExchangeModel::new(nm(vec![swap, mixed, Matrix::identity(&Q, 2)]), false).unwrap();
        let sol = closed_solve(&e).unwrap();
        assert_eq!(
            sol.prices,
            vecs(&[&[(1, 2), (1, 2)], &[(2, 5), (3, 5)], &[(1, 2), (1, 2)]])
        );
        assert_eq!(sol.unique, vec![true, true, false]);
        let bad = nm(vec![
            qm(&[&[(1, 2), (1, 1)], &[(1, 3), (0, 1)]]),
            Matrix::identity(&Q, 1),
        ]);
        assert!(matches!(
            ExchangeModel::new(bad, false),
            Err(Error::InvalidExchangeMatrix { component: 0, .. })
        ));
    }

    #[test]
    fn relaxed_closed_model() {
        let e = ExchangeModel::new(
            nm(vec![
                qm(&[&[(1, 2), (1, 3)], &[(1, 2), (2, 3)]]),
                qm(&[&[(1, 2), (0, 1)], &[(0, 1), (1, 2)]]),
            ]),
            true,
        )
        .unwrap();
        let s = s_closed_solve(&e, &MaxMin, 0).unwrap();
        assert_eq!(s.components[0].selected, Some(vec![r(2, 5), r(3, 5)]));
        assert_eq!(s.components[1].selected, None);
        assert!(s.prices(Q).is_none());
        let a = qm(&[
            &[(0, 1), (0, 1), (-1, 1)],
            &[(0, 1), (1, 1), (0, 1)],
            &[(0, 1), (0, 1), (1, 1)],
        ]);
        // I - A = [[1,0,1],[0,0,0],[0,0,0]]: kernel spanned by (-1,0,1) and (0,1,0).
        let e = ExchangeModel::new(nm(vec![a, Matrix::identity(&Q, 1)]), true).unwrap();
        let s = s_closed_solve(&e, &MaxMin, 0).unwrap();
        let comp = &s.components[0];
        assert_eq!(comp.nullity, 2);
        let best = comp
            .candidates
            .iter()
            .max_by(|a, b| {
                let ma = a.iter().min_by(|x, y| Q.canonical_cmp(x, y)).unwrap();
                let mb = b.iter().min_by(|x, y| Q.canonical_cmp(x, y)).unwrap();
                Q.canonical_cmp(ma, mb).then_with(|| lex_cmp(&Q, b, a))
            })
            .unwrap();
        assert_eq!(comp.selected.as_ref(), Some(best));
        assert_eq!(s, s_closed_solve(&e, &MaxMin, 0).unwrap());
    }

    #[test]
    fn productivity_reports() {
        let c = ConsumptionModel::new(
            nm(vec![
                qm(&[&[(1, 2), (0, 1)], &[(0, 1), (1, 3)]]),
                Matrix::zeros(&Q, 1, 1),
            ]),
            false,
        )
        .unwrap();
        let p = productivity(&c).unwrap();
        assert!(p.productive);
        assert_eq!(p.components[0].inverse, qm(&[&[(2, 1), (0, 1)], &[(0, 1), (3, 2)]]));
        assert!(p.components[0].row_sums_below_one && p.components[0].column_sums_below_one);
        assert!(p.components[1].inverse.is_identity(&Q));
        let x = open_solve(&c, &vecs(&[&[(1, 1), (2, 1)], &[(5, 1)]])).unwrap();
        assert_eq!(x, vecs(&[&[(2, 1), (3, 1)], &[(5, 1)]]));
        let singular =
            ConsumptionModel::new(nm(vec![Matrix::identity(&Q, 2), Matrix::zeros(&Q, 1, 1)]), false).unwrap();
        assert_eq!(productivity(&singular), Err(Error::SingularIMinusC(0)));
        assert_eq!(
            open_solve(&c, &vecs(&[&[(-1, 1), (2, 1)], &[(5, 1)]])),
            Err(Error::NegativeDemand(0))
        );
    }

    #[test]
    fn relaxed_open_model() {
        let c = ConsumptionModel::new(nm(vec![qm(&[&[(2, 1)]]), Matrix::zeros(&Q, 2, 2)]), true).unwrap();
        let s = s_open_solve(&c, &vecs(&[&[(3, 1)], &[(-1, 1), (4, 1)]])).unwrap();
        assert_eq!(s.production, vecs(&[&[(-3, 1)], &[(-1, 1), (4, 1)]]));
        assert_eq!(
            s.verdicts,
            vec![Satisfaction::NotUpToSatisfaction, Satisfaction::Productive]
        );
        assert_eq!(s.warnings.len(), 3);
        let std = ConsumptionModel::new(nm(vec![qm(&[&[(2, 1)]]), Matrix::zeros(&Q, 2, 2)]), false).unwrap();
        assert!(matches!(
            open_solve(&std, &vecs(&[&[(3, 1)], &[(1, 1), (4, 1)]])),
            Err(Error::NegativeProduction { component: 0, .. })
        ));
    }
}
