//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use nla_core::field::ngroup_order;
use nla_core::format::{emit, parse_document, ParseOptions};
use nla_core::leontief::{self, ConsumptionModel, ExchangeModel};
use nla_core::markov::{self, Convention, MarkovChain};
use nla_core::spectral::{self, krylov_minimal_polynomial};
use nla_core::{inner, Error, Field, Matrix, NLinearMap, NMatrix, NSubset, NVector, Polynomial, Scalar};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const Q: Field = Field::Rational;

type Check = Result<String, String>;

fn q(n: i64) -> Scalar {
    Q.from_i64(n)
}

fn qr(n: i64, d: i64) -> Scalar {
    Q.from_ratio(n, d).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixtures().join(name)).unwrap()
}

fn load_nmatrix(name: &str) -> NMatrix {
    match parse_document(fixture(name).as_bytes(), &ParseOptions::default()).unwrap() {
        nla_core::format::Document::Matrix(m) => m.to_nmatrix().unwrap(),
        other => panic!("{name} is a {} file", other.kind()),
    }
}

fn random_int_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, lo: i64, hi: i64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| q(rng.gen_range(lo..=hi)))
}

// Product of integer shears: determinant one, so the inverse is integral.
fn unimodular(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
    let mut s = Matrix::identity(&Q, n);
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        let k = q(rng.gen_range(-2..=2));
        for c in 0..n {
            let v = Q.add(s.get(i, c), &Q.mul(&k, s.get(j, c)));
            s.set(i, c, v);
        }
    }
    s
}

// p(M) by Horner with plain matrix products.
fn horner(p: &Polynomial, m: &Matrix) -> Matrix {
    let n = m.rows();
    let mut acc = Matrix::zeros(&Q, n, n);
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(&Q, m).add(&Q, &Matrix::identity(&Q, n).scale(&Q, c));
    }
    acc
}

// det(cI - M) at deg+1 points pins the polynomial down.
fn det_oracle(m: &Matrix, p: &Polynomial) -> bool {
    (0..=m.rows() as i64).all(|c| {
        let shifted = Matrix::identity(&Q, m.rows()).scale(&Q, &q(c)).sub(&Q, m);
        shifted.det(&Q) == p.eval(&q(c))
    })
}

fn roots(v: &[i64]) -> Polynomial {
    Polynomial::from_roots(Q, &v.iter().map(|&x| q(x)).collect::<Vec<_>>())
}

fn diag(v: &[i64]) -> Matrix {
    Matrix::diagonal(&Q, &v.iter().map(|&x| q(x)).collect::<Vec<_>>())
}

fn criterion_1() -> Check {
    let a = load_nmatrix("mixed3.nmat");
    let chr = spectral::char_npoly(&a).map_err(|e| e.to_string())?;
    let min = spectral::min_npoly(&a).map_err(|e| e.to_string())?;
    let want_chr = [roots(&[1, 2]), roots(&[2, 1, 3, 4]), roots(&[2, 2, 1])];
    let want_min = [roots(&[1, 2]), roots(&[2, 1, 3, 4]), roots(&[1, 2])];
    for (i, m) in a.components().iter().enumerate() {
        ensure(chr.component(i) == &want_chr[i], || {
            format!("charpoly {} = {}", i + 1, chr.component(i))
        })?;
        ensure(det_oracle(m, &want_chr[i]), || {
            format!("determinant oracle disagrees on {}", i + 1)
        })?;
        ensure(min.component(i) == &want_min[i], || {
            format!("minpoly {} = {}", i + 1, min.component(i))
        })?;
        ensure(krylov_minimal_polynomial(&Q, m) == want_min[i], || {
            format!("Krylov route differs on {}", i + 1)
        })?;
    }
    ensure(
        chr.render() == "(x-1)(x-2) ∪ (x-1)(x-2)(x-3)(x-4) ∪ (x-1)(x-2)^2",
        || format!("charpoly renders as {}", chr.render()),
    )?;
    ensure(
        min.render() == "(x-1)(x-2) ∪ (x-1)(x-2)(x-3)(x-4) ∪ (x-1)(x-2)",
        || format!("minpoly renders as {}", min.render()),
    )?;
    let d = spectral::is_n_diagonalizable(&a).map_err(|e| e.to_string())?;
    ensure(d.diagonalizable, || "not diagonalizable".into())?;
    let want = [diag(&[1, 2]), diag(&[2, 1, 3, 4]), diag(&[1, 2, 2])];
    let got = d.diagonal.ok_or("no diagonal form")?;
    ensure(got.components() == want, || format!("diagonal form {got:?}"))?;
    Ok("charpoly, minpoly and diagonal form exact".into())
}

fn criterion_2() -> Check {
    let a = load_nmatrix("triangular3.nmat");
    let r = spectral::eigen(&a).map_err(|e| e.to_string())?;
    let want: Vec<Vec<Scalar>> = vec![vec![q(3), q(1), q(7)], vec![q(1), q(3)], vec![q(1), q(2), q(3), q(4)]];
    ensure(r.value_sets() == want, || {
        format!("eigenvalue sets {:?}", r.value_sets())
    })?;
    // Brute force: enumerate candidate tuples and keep those with every
    // component singular at its shift.
    let singular_at = |m: &Matrix, c: i64| m.shift(&Q, &q(c)).det(&Q) == q(0);
    let mut tuples = 0u128;
    for x in -10..=10 {
        if !singular_at(a.component(0), x) {
            continue;
        }
        for y in -10..=10 {
            if !singular_at(a.component(1), y) {
                continue;
            }
            for z in -10..=10 {
                if singular_at(a.component(2), z) {
                    tuples += 1;
                }
            }
        }
    }
    ensure(tuples == 24, || format!("brute force counts {tuples}"))?;
    ensure(r.combinations() == tuples, || {
        format!("combinations = {}", r.combinations())
    })?;
    Ok("eigenvalue sets exact, 24 combinations (brute force agrees)".into())
}

fn criterion_3() -> Check {
    let orders: Vec<BigUint> = [6u32, 6, 5, 16, 12].iter().map(|&n| BigUint::from(n)).collect();
    let got = ngroup_order(&orders).map_err(|e| e.to_string())?;
    let oracle: u64 = 6 * 6 * 5 * 16 * 12;
    ensure(got == BigUint::from(oracle) && oracle == 34560, || {
        format!("order {got}")
    })?;
    Ok(format!("order {got}"))
}

fn criterion_4() -> Check {
    let doc =
        parse_document(fixture("absorbing4.chain").as_bytes(), &ParseOptions::default()).map_err(|e| e.to_string())?;
    let nla_core::format::Document::Matrix(doc) = doc else {
        return Err("not an nmatrix".into());
    };
    let chain = doc.to_chain(Convention::Row).map_err(|e| e.to_string())?;
    let cls = markov::classify_states(&chain);
    let tuple: Vec<usize> = cls
        .n_absorbing
        .ok_or("no n-absorbing state")?
        .iter()
        .map(|s| s + 1)
        .collect();
    ensure(tuple == [4, 3, 1, 6], || format!("absorbing tuple {tuple:?}"))?;
    // Oracle: a state is absorbing exactly when its diagonal entry is one.
    for (i, m) in chain.matrix().components().iter().enumerate() {
        let ones: Vec<usize> = (0..m.rows()).filter(|&s| m.get(s, s) == &q(1)).map(|s| s + 1).collect();
        ensure(ones == [tuple[i]], || {
            format!("component {} has unit diagonal at {ones:?}", i + 1)
        })?;
    }
    let p = load_nmatrix("stochastic3.chain");
    for m in p.components() {
        for r in 0..m.rows() {
            ensure(Q.sum(m.row(r)) == q(1), || format!("row {} does not sum to one", r + 1))?;
        }
    }
    MarkovChain::new(p, Convention::Row).map_err(|e| e.to_string())?;
    Ok("n-absorbing state (4, 3, 1, 6); 3-chain is row-stochastic".into())
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..500 {
        let n = rng.gen_range(2..=4);
        let m = n + rng.gen_range(1..=2);
        let source: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=6)).collect();
        let target: Vec<usize> = (0..m).map(|_| rng.gen_range(1..=6)).collect();
        let mut slots: Vec<usize> = (0..m).collect();
        for i in (1..m).rev() {
            slots.swap(i, rng.gen_range(0..=i));
        }
        let assignment: Vec<usize> = slots[..n].to_vec();
        let mats: Vec<Matrix> = (0..n)
            .map(|i| {
                let (r, c) = (target[assignment[i]], source[i]);
                let k = rng.gen_range(0..=r.min(c));
                random_int_matrix(&mut rng, r, k, -3, 3).mul(&Q, &random_int_matrix(&mut rng, k, c, -3, 3))
            })
            .collect();
        let map = NLinearMap::new(Q, source.clone(), target, assignment, mats.clone()).map_err(|e| e.to_string())?;
        ensure(map.kind() == nla_core::ntransform::MapKind::NLinear, || {
            format!("case {case}: kind {}", map.kind())
        })?;
        let rn = map.rank_nullity().map_err(|e| e.to_string())?;
        let kernel = map.n_kernel();
        for i in 0..n {
            let rank_t = mats[i].transpose().rank(&Q);
            let basis = &kernel.bases[i];
            let nullity = basis.len();
            ensure(rn.ranks[i] == rank_t, || {
                format!("case {case}: rank differs from transpose rank")
            })?;
            ensure(rn.nullities[i] == nullity, || {
                format!("case {case}: nullity differs from kernel size")
            })?;
            ensure(rank_t + nullity == source[i], || {
                format!("case {case}: rank + nullity != dim")
            })?;
            ensure(
                basis
                    .iter()
                    .all(|v| mats[i].mul_vec(&Q, v).iter().all(|x| Q.is_zero(x))),
                || format!("case {case}: kernel vector not annihilated"),
            )?;
            if nullity > 0 {
                ensure(Matrix::from_columns(source[i], basis).rank(&Q) == nullity, || {
                    format!("case {case}: kernel basis dependent")
                })?;
            }
        }
    }
    Ok("500 maps".into())
}

fn random_square_nmatrix(rng: &mut ChaCha8Rng) -> NMatrix {
    let n = rng.gen_range(2..=4);
    let comps = (0..n)
        .map(|_| {
            let d = rng.gen_range(2..=5);
            Matrix::from_fn(d, d, |_, _| qr(rng.gen_range(-4..=4), rng.gen_range(1..=3)))
        })
        .collect();
    NMatrix::new(Q, comps).unwrap()
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for case in 0..200 {
        let a = random_square_nmatrix(&mut rng);
        let chr = spectral::char_npoly(&a).map_err(|e| e.to_string())?;
        let verdict = spectral::cayley_hamilton_check(&a).map_err(|e| e.to_string())?;
        ensure(verdict.iter().all(|&b| b), || {
            format!("case {case}: library check failed")
        })?;
        for (m, p) in a.components().iter().zip(chr.components()) {
            ensure(det_oracle(m, p), || {
                format!("case {case}: charpoly differs from determinants")
            })?;
            ensure(horner(p, m).is_zero(&Q), || format!("case {case}: f(A) != 0"))?;
        }
    }
    Ok("200 n-matrices".into())
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for case in 0..200 {
        let a = random_square_nmatrix(&mut rng);
        let chr = spectral::char_npoly(&a).map_err(|e| e.to_string())?;
        let min = spectral::min_npoly(&a).map_err(|e| e.to_string())?;
        for ((m, c), p) in a.components().iter().zip(chr.components()).zip(min.components()) {
            ensure(c.divmod(p).map_err(|e| e.to_string())?.1.is_zero(), || {
                format!("case {case}: minimal does not divide characteristic")
            })?;
            ensure(horner(p, m).is_zero(&Q), || {
                format!("case {case}: minimal does not annihilate")
            })?;
            ensure(&krylov_minimal_polynomial(&Q, m) == p, || {
                format!("case {case}: Krylov route differs")
            })?;
            let rc = c.roots().map_err(|e| e.to_string())?;
            let rp = p.roots().map_err(|e| e.to_string())?;
            ensure(rc == rp, || format!("case {case}: root sets {rc:?} vs {rp:?}"))?;
        }
    }
    Ok("200 n-matrices".into())
}

fn similar(rng: &mut ChaCha8Rng, core: Matrix) -> Matrix {
    let s = unimodular(rng, core.rows());
    let inv = s.inverse(&Q).expect("unimodular");
    s.mul(&Q, &core).mul(&Q, &inv)
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in 0..100 {
        let n = rng.gen_range(2..=3);
        let comps: Vec<Matrix> = (0..n)
            .map(|_| {
                let d = rng.gen_range(2..=4);
                let entries: Vec<i64> = (0..d).map(|_| rng.gen_range(-3..=3)).collect();
                similar(&mut rng, diag(&entries))
            })
            .collect();
        let a = NMatrix::new(Q, comps).unwrap();
        let proj = spectral::eigen_projections(&a).map_err(|e| format!("case {case}: {e}"))?;
        for (m, es) in a.components().iter().zip(&proj.components) {
            let d = m.rows();
            let mut sum = Matrix::zeros(&Q, d, d);
            let mut weighted = Matrix::zeros(&Q, d, d);
            for (j, (c, e)) in es.iter().enumerate() {
                ensure(e.mul(&Q, e) == *e, || format!("case {case}: E not idempotent"))?;
                for (k, (_, f)) in es.iter().enumerate() {
                    if j != k {
                        ensure(e.mul(&Q, f).is_zero(&Q), || format!("case {case}: E_j E_k != 0"))?;
                    }
                }
                sum = sum.add(&Q, e);
                weighted = weighted.add(&Q, &e.scale(&Q, c));
            }
            ensure(sum.is_identity(&Q), || format!("case {case}: sum of projections != I"))?;
            ensure(weighted == *m, || format!("case {case}: sum c_j E_j != A"))?;
        }
    }
    for case in 0..100 {
        let n = rng.gen_range(2..=3);
        let comps: Vec<Matrix> = (0..n)
            .map(|_| {
                let d = rng.gen_range(2..=4);
                let mut j = Matrix::zeros(&Q, d, d);
                for r in 0..d {
                    j.set(r, r, q(rng.gen_range(-2..=2)));
                    for c in r + 1..d {
                        j.set(r, c, q(rng.gen_range(-2..=2)));
                    }
                }
                similar(&mut rng, j)
            })
            .collect();
        let a = NMatrix::new(Q, comps).unwrap();
        let dn = spectral::dn_decompose(&a).map_err(|e| format!("case {case}: {e}"))?;
        let min = spectral::min_npoly(&a).map_err(|e| e.to_string())?;
        let dd = spectral::is_n_diagonalizable(&dn.d).map_err(|e| e.to_string())?;
        ensure(dd.diagonalizable, || format!("case {case}: D not diagonalizable"))?;
        for (i, m) in a.components().iter().enumerate() {
            let (d, nn) = (dn.d.component(i), dn.n.component(i));
            ensure(d.add(&Q, nn) == *m, || format!("case {case}: D + N != A"))?;
            ensure(d.mul(&Q, nn) == nn.mul(&Q, d), || format!("case {case}: DN != ND"))?;
            let bound = min
                .component(i)
                .factor_roots()
                .unwrap()
                .roots
                .iter()
                .map(|(_, k)| *k)
                .max()
                .unwrap_or(1);
            let mut index = 1;
            let mut power = nn.clone();
            while !power.is_zero(&Q) && index <= m.rows() {
                power = power.mul(&Q, nn);
                index += 1;
            }
            ensure(power.is_zero(&Q), || format!("case {case}: N not nilpotent"))?;
            let index = if nn.is_zero(&Q) { 1 } else { index };
            ensure(dn.nilpotency_indices[i] == index, || {
                format!("case {case}: index {} vs {index}", dn.nilpotency_indices[i])
            })?;
            ensure(index <= bound, || format!("case {case}: index {index} above {bound}"))?;
        }
    }
    Ok("100 projection sets, 100 D+N splits".into())
}

fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    a.iter().zip(b).fold(q(0), |acc, (x, y)| Q.add(&acc, &Q.mul(x, y)))
}

fn criterion_9() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut case = 0;
    while case < 200 {
        let n = rng.gen_range(2..=3);
        let dims: Vec<usize> = (0..n).map(|_| rng.gen_range(2..=5)).collect();
        let sets: Vec<Vec<Vec<Scalar>>> = dims
            .iter()
            .map(|&d| {
                let k = rng.gen_range(1..=d);
                (0..k)
                    .map(|_| (0..d).map(|_| q(rng.gen_range(-3..=3))).collect())
                    .collect()
            })
            .collect();
        if sets
            .iter()
            .zip(&dims)
            .any(|(s, &d)| Matrix::from_columns(d, s).rank(&Q) < s.len())
        {
            continue;
        }
        let w = NSubset::new(Q, dims.clone(), sets.clone()).map_err(|e| e.to_string())?;
        let g = inner::gram_schmidt(&w).map_err(|e| e.to_string())?;
        for (i, (out, input)) in g.basis.sets().iter().zip(&sets).enumerate() {
            for a in 0..out.len() {
                for b in a + 1..out.len() {
                    ensure(Q.is_zero(&dot(&out[a], &out[b])), || {
                        format!("case {case}: outputs not orthogonal")
                    })?;
                }
            }
            let mut both = input.clone();
            both.extend(out.iter().cloned());
            ensure(
                Matrix::from_columns(dims[i], &both).rank(&Q) == input.len() && out.len() == input.len(),
                || format!("case {case}: span changed"),
            )?;
        }
        let beta = NVector::new(
            Q,
            dims.iter()
                .map(|&d| (0..d).map(|_| q(rng.gen_range(-5..=5))).collect())
                .collect(),
        )
        .map_err(|e| e.to_string())?;
        let (best, residual) = inner::orthogonal_projection(&w, &beta).map_err(|e| e.to_string())?;
        for (i, set) in sets.iter().enumerate() {
            for v in set {
                ensure(Q.is_zero(&dot(v, residual.component(i))), || {
                    format!("case {case}: residual not orthogonal")
                })?;
            }
        }
        // Another basis of the same span gives the same approximation.
        let remixed: Vec<Vec<Vec<Scalar>>> = sets
            .iter()
            .map(|s| {
                let u = unimodular(&mut rng, s.len());
                (0..s.len())
                    .map(|r| {
                        (0..s[0].len())
                            .map(|c| (0..s.len()).fold(q(0), |acc, k| Q.add(&acc, &Q.mul(u.get(r, k), &s[k][c]))))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let w2 = NSubset::new(Q, dims.clone(), remixed).map_err(|e| e.to_string())?;
        ensure(
            inner::best_approximation(&w2, &beta).map_err(|e| e.to_string())? == best,
            || format!("case {case}: approximation depends on the basis"),
        )?;
        let bessel = inner::bessel_check(&g.basis, &beta).map_err(|e| e.to_string())?;
        ensure(bessel.holds, || format!("case {case}: Bessel inequality fails"))?;
        for (i, s) in bessel.slack.iter().enumerate() {
            let r = residual.component(i);
            ensure(*s == dot(r, r), || format!("case {case}: slack {s} != |residual|^2"))?;
        }
        case += 1;
    }
    Ok("200 instances".into())
}

fn random_row_stochastic(rng: &mut ChaCha8Rng, d: usize) -> Matrix {
    let mut rows = Vec::with_capacity(d);
    for _ in 0..d {
        let mut w: Vec<i64> = (0..d).map(|_| rng.gen_range(0..=4)).collect();
        if w.iter().all(|&x| x == 0) {
            w[rng.gen_range(0..d)] = 1;
        }
        let s: i64 = w.iter().sum();
        rows.push(w.iter().map(|&x| qr(x, s)).collect());
    }
    Matrix::from_rows(rows).unwrap()
}

fn random_chain(rng: &mut ChaCha8Rng) -> MarkovChain {
    let n = rng.gen_range(2..=4);
    let comps = (0..n).map(|_| {
        let d = rng.gen_range(2..=5);
        random_row_stochastic(rng, d)
    });
    MarkovChain::new(NMatrix::new(Q, comps.collect()).unwrap(), Convention::Row).unwrap()
}

fn to_f64(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.rows())
        .map(|r| m.row(r).iter().map(|x| Q.to_f64(x)).collect())
        .collect()
}

fn mul_f64(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = b[0].len();
    a.iter()
        .map(|row| (0..n).map(|j| row.iter().zip(b).map(|(x, r)| x * r[j]).sum()).collect())
        .collect()
}

fn criterion_10() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for case in 0..100 {
        let c = random_chain(&mut rng);
        for m in c.matrix().components() {
            let mut power = m.clone();
            for k in 1..=10 {
                for r in 0..power.rows() {
                    ensure(power.row(r).iter().all(|x| Q.is_nonnegative(x)), || {
                        format!("case {case}: negative entry")
                    })?;
                    ensure(Q.sum(power.row(r)) == q(1), || {
                        format!("case {case}: row sum of P^{k} != 1")
                    })?;
                }
                power = power.mul(&Q, m);
            }
            ensure(m.shift(&Q, &q(1)).det(&Q) == q(0), || {
                format!("case {case}: det(P - I) != 0")
            })?;
        }
        let p10 = c.matrix().pow(10).map_err(|e| e.to_string())?;
        markov::validate_stochastic(&p10, Convention::Row).map_err(|e| format!("case {case}: {e}"))?;
    }
    let mut done = 0;
    let mut refused = 0;
    let mut worst_residual: f64 = 0.0;
    let mut worst_power: f64 = 0.0;
    while done < 100 {
        // Reversible chains: P = D^{-1} W with W symmetric has a real spectrum.
        let n = rng.gen_range(2..=3);
        let comps: Vec<Matrix> = (0..n)
            .map(|_| {
                let d = rng.gen_range(2..=5);
                let mut w = vec![vec![0i64; d]; d];
                for i in 0..d {
                    for j in i..d {
                        let x = rng.gen_range(1..=9);
                        w[i][j] = x;
                        w[j][i] = x;
                    }
                }
                let rows = w
                    .iter()
                    .map(|row| {
                        let s: i64 = row.iter().sum();
                        row.iter().map(|&x| qr(x, s)).collect()
                    })
                    .collect();
                Matrix::from_rows(rows).unwrap()
            })
            .collect();
        let c = MarkovChain::new(NMatrix::new(Q, comps).unwrap(), Convention::Row).unwrap();
        let s = match markov::spectral_decompose(&c) {
            Ok(s) => s,
            Err(Error::RepeatedEigenvalues { .. }) => {
                refused += 1;
                continue;
            }
            Err(e) => return Err(e.to_string()),
        };
        for (m, comp) in c.matrix().components().iter().zip(&s.components) {
            let p = to_f64(m);
            let d = p.len();
            let rebuilt: Vec<Vec<f64>> = (0..d)
                .map(|r| {
                    (0..d)
                        .map(|k| {
                            comp.eigenvalues
                                .iter()
                                .zip(&comp.projections)
                                .map(|(l, a)| l * a[r][k])
                                .sum()
                        })
                        .collect()
                })
                .collect();
            let residual = markov::max_norm_diff(&rebuilt, &p);
            worst_residual = worst_residual.max(residual).max(comp.residual);
        }
        let base: Vec<Vec<Vec<f64>>> = c.matrix().components().iter().map(to_f64).collect();
        let mut direct = base.clone();
        for k in 1..=20u32 {
            let spectral = markov::power_via_spectral(&s, k);
            for (d, sp) in direct.iter().zip(&spectral) {
                worst_power = worst_power.max(markov::max_norm_diff(d, sp));
            }
            direct = direct.iter().zip(&base).map(|(d, b)| mul_f64(d, b)).collect();
        }
        done += 1;
    }
    ensure(worst_residual <= 1e-9, || {
        format!("reconstruction residual {worst_residual:e}")
    })?;
    ensure(worst_power <= 1e-8, || format!("power error {worst_power:e}"))?;
    Ok(format!(
        "closure and det(P-I) on 100 chains; spectral residual {worst_residual:.1e}, power error {worst_power:.1e} ({refused} refused)"
    ))
}

fn criterion_11() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..200 {
        let n = rng.gen_range(2..=4);
        let comps: Vec<Matrix> = (0..n)
            .map(|_| {
                let d = rng.gen_range(2..=5);
                random_row_stochastic(&mut rng, d).transpose()
            })
            .collect();
        let a = NMatrix::new(Q, comps).unwrap();
        let e = ExchangeModel::new(a.clone(), false).map_err(|e| e.to_string())?;
        let sol = leontief::closed_solve(&e).map_err(|e| format!("case {case}: {e}"))?;
        for (m, p) in a.components().iter().zip(sol.prices.components()) {
            ensure(p.iter().all(|x| Q.is_nonnegative(x)), || {
                format!("case {case}: negative price")
            })?;
            ensure(Q.sum(p) == q(1), || format!("case {case}: prices not normalized"))?;
            let ap: Vec<Scalar> = (0..m.rows()).map(|r| dot(m.row(r), p)).collect();
            ensure(ap == *p, || format!("case {case}: Ap != p"))?;
        }
    }
    for case in 0..200 {
        let n = rng.gen_range(2..=4);
        let comps: Vec<Matrix> = (0..n)
            .map(|_| {
                let d = rng.gen_range(2..=5);
                let rows = (0..d)
                    .map(|_| {
                        let w: Vec<i64> = (0..d).map(|_| rng.gen_range(0..=5)).collect();
                        let s: i64 = w.iter().sum::<i64>() + rng.gen_range(1..=5);
                        w.iter().map(|&x| qr(x, s)).collect()
                    })
                    .collect();
                Matrix::from_rows(rows).unwrap()
            })
            .collect();
        let c = NMatrix::new(Q, comps).unwrap();
        let model = ConsumptionModel::new(c.clone(), false).map_err(|e| e.to_string())?;
        let report = leontief::productivity(&model).map_err(|e| format!("case {case}: {e}"))?;
        ensure(report.productive, || format!("case {case}: not productive"))?;
        for (m, comp) in c.components().iter().zip(&report.components) {
            let i_minus = Matrix::identity(&Q, m.rows()).sub(&Q, m);
            ensure(comp.inverse.mul(&Q, &i_minus).is_identity(&Q), || {
                format!("case {case}: wrong inverse")
            })?;
            ensure(comp.inverse.entries().iter().all(|x| Q.is_nonnegative(x)), || {
                format!("case {case}: inverse has a negative entry")
            })?;
        }
        let d = NVector::new(
            Q,
            c.components()
                .iter()
                .map(|m| (0..m.rows()).map(|_| q(rng.gen_range(0..=9))).collect())
                .collect(),
        )
        .map_err(|e| e.to_string())?;
        let x = leontief::open_solve(&model, &d).map_err(|e| format!("case {case}: {e}"))?;
        for ((m, xi), di) in c.components().iter().zip(x.components()).zip(d.components()) {
            let cx = m.mul_vec(&Q, xi);
            ensure(
                (0..xi.len()).all(|r| Q.is_zero(&Q.sub(&Q.sub(&xi[r], &cx[r]), &di[r]))),
                || format!("case {case}: x - Cx - d != 0"),
            )?;
        }
    }
    Ok("200 exchange and 200 consumption models".into())
}

fn nla(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_nla"))
        .args(args)
        .current_dir(fixtures())
        .output()
        .expect("spawn nla");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    )
}

const DOCUMENTED: &[(&[&str], &str)] = &[
    (
        &["diagonalize", "mixed3.nmat"],
        "charpoly: (x-1)(x-2) ∪ (x-1)(x-2)(x-3)(x-4) ∪ (x-1)(x-2)^2\n\
         minpoly: (x-1)(x-2) ∪ (x-1)(x-2)(x-3)(x-4) ∪ (x-1)(x-2)\n\
         diagonalizable: true\n",
    ),
    (&["eigen", "triangular3.nmat"], "combinations: 24\n"),
    (
        &["markov-classify", "absorbing4.chain"],
        "n-absorbing state: (4, 3, 1, 6)\n",
    ),
    (
        &["leontief-open", "consumption_zero.nmat", "demand.nvec"],
        "component 1: x = 3 2 1\ncomponent 2: x = 5 7\n",
    ),
    (&["ngroup-order", "6", "6", "5", "16", "12"], "order: 34560\n"),
    (&["hom-dim", "map3.nmap"], "nullities: (0, 0, 1)\n"),
    (&["markov-stationary", "weather.chain"], "component 1: 1/3 2/3\n"),
    (&["leontief-closed", "exchange.nmat"], "component 2: p = 3/7 4/7\n"),
    (&["cayley", "mixed3.nmat"], "component 3: f(A) = 0 holds\n"),
    (&["dn", "jordan.nmat"], "nilpotency indices: (2, 1)\n"),
];

const SMOKE: &[&[&str]] = &[
    &["charpoly", "mixed3.nmat"],
    &["minpoly", "mixed3.nmat"],
    &["projections", "mixed3.nmat"],
    &["projections", "--generalized", "jordan.nmat"],
    &["primary", "jordan.nmat"],
    &["gram-schmidt", "subspace.nmat"],
    &["approx", "subspace.nmat", "beta.nvec"],
    &["ortho-class", "rotation.nmat"],
    &[
        "markov-evolve",
        "stochastic3.chain",
        "stochastic3_start.nvec",
        "--steps",
        "3",
    ],
    &["markov-spectral", "weather.chain", "--power", "5"],
    &[
        "markov-walk",
        "--kind",
        "reflecting",
        "--sizes",
        "3,4",
        "--p",
        "1/2,1/3",
    ],
    &["leontief-s-closed", "exchange_relaxed.nmat"],
    &["leontief-s-open", "consumption.nmat", "demand.nvec"],
    &[
        "hom-dim",
        "--source",
        "3,2,4",
        "--target",
        "4,3,2,5",
        "--assignment",
        "4,3,1",
    ],
    &["nfield-classify", "Q", "Z7", "Z11"],
    &["--format", "json", "eigen", "mixed3.nmat"],
];

// Mutations that always leave the file invalid.
fn corrupt(rng: &mut ChaCha8Rng, text: &str) -> Vec<u8> {
    let lines: Vec<&str> = text.lines().collect();
    let rows: Vec<usize> = (0..lines.len())
        .filter(|&i| {
            lines[i]
                .split_whitespace()
                .next()
                .is_some_and(|t| t.starts_with(|c: char| c.is_ascii_digit() || c == '-'))
        })
        .collect();
    let mut out: Vec<String> = lines.iter().map(|s| s.to_string()).collect();
    // Row lengths are free in vector files, so only matrices get resized rows.
    let pick = match rng.gen_range(0..6) {
        3 | 4 if text.starts_with("nvector") => 2,
        k => k,
    };
    match pick {
        0 => out[0] = ["nmatrix v2", "matrix v1", "", "nvector"][rng.gen_range(0..4)].to_string(),
        1 => out[1] = ["field Z 4", "field Z 9", "field C", "field"][rng.gen_range(0..4)].to_string(),
        2 => {
            let r = rows[rng.gen_range(0..rows.len())];
            let mut toks: Vec<String> = out[r].split_whitespace().map(str::to_string).collect();
            let t = rng.gen_range(0..toks.len());
            toks[t] = ["1/0", "x", "0..5", "1//2", "--3", "nan"][rng.gen_range(0..6)].to_string();
            out[r] = toks.join(" ");
        }
        3 => {
            let r = rows[rng.gen_range(0..rows.len())];
            out[r].push_str(" 1");
        }
        4 => {
            let r = rows[rng.gen_range(0..rows.len())];
            let mut toks: Vec<&str> = out[r].split_whitespace().collect();
            toks.pop();
            out[r] = toks.join(" ");
        }
        _ => {
            let mut bytes = out.join("\n").into_bytes();
            let at = rng.gen_range(0..bytes.len());
            bytes.insert(at, 0xff);
            return bytes;
        }
    }
    let mut s = out.join("\n");
    s.push('\n');
    s.into_bytes()
}

fn criterion_12() -> Check {
    let mut names: Vec<String> = std::fs::read_dir(fixtures())
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    for name in &names {
        let text = fixture(name);
        let doc = parse_document(text.as_bytes(), &ParseOptions::default()).map_err(|e| format!("{name}: {e}"))?;
        ensure(emit(&doc) == text, || format!("{name}: library emit differs"))?;
        let (code, out) = nla(&["check", name]);
        ensure(code == 0 && out == text, || {
            format!("{name}: `nla check` exit {code} or differing bytes")
        })?;
    }
    for (args, want) in DOCUMENTED {
        let (code, out) = nla(args);
        ensure(code == 0, || format!("`nla {}` exit {code}", args.join(" ")))?;
        ensure(out.contains(want), || {
            format!("`nla {}` printed {out:?}", args.join(" "))
        })?;
        let mut par = vec!["--parallel"];
        par.extend_from_slice(args);
        ensure(nla(&par).1 == out, || {
            format!("`nla {}` differs with --parallel", args.join(" "))
        })?;
    }
    for args in SMOKE {
        let (code, out) = nla(args);
        ensure(code == 0, || format!("`nla {}` exit {code}", args.join(" ")))?;
        ensure(nla(args).1 == out, || {
            format!("`nla {}` not deterministic", args.join(" "))
        })?;
    }
    let dir = std::env::temp_dir().join(format!("nla-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let sources: Vec<&String> = names.iter().collect();
    for k in 0..100 {
        let src = sources[k % sources.len()];
        let bytes = corrupt(&mut rng, &fixture(src));
        let path = dir.join(format!("corrupt-{k:03}"));
        std::fs::write(&path, &bytes).map_err(|e| e.to_string())?;
        let (code, _) = nla(&["check", path.to_str().unwrap()]);
        ensure(code == 2, || format!("corrupted copy {k} of {src} exits {code}"))?;
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!(
        "{} fixtures round-trip, {} commands exit 0, 100 corrupted files exit 2",
        names.len(),
        DOCUMENTED.len() + SMOKE.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 12] = [
        ("worked 3-matrix: charpoly, minpoly, diagonal form", criterion_1),
        ("eigenvalue sets and combination count", criterion_2),
        ("direct-product group order", criterion_3),
        ("absorbing 4-chain and stochastic 3-matrix", criterion_4),
        ("rank-nullity on random NLinear maps", criterion_5),
        ("Cayley-Hamilton on random n-matrices", criterion_6),
        ("minimal divides characteristic, shared roots", criterion_7),
        ("projection algebra and D+N", criterion_8),
        ("Gram-Schmidt, best approximation, Bessel", criterion_9),
        ("Markov closure, det(P-I), spectral reconstruction", criterion_10),
        ("Leontief exchange and consumption models", criterion_11),
        ("CLI round-trip, documented outputs, corrupted inputs", criterion_12),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("PASS {:>2}  {name}: {detail} [{ms} ms]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2}  {name}: {why} [{ms} ms]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
