//! Floating-point helpers: polynomial roots by Aberth–Ehrlich iteration and
//! small dense solves.

use num_complex::Complex64;

const MAX_ITER: usize = 800;

fn horner(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All complex roots of `Σ coeffs[i] xⁱ` (coefficients low to high),
/// counted with multiplicity. Trailing zero coefficients are ignored.
pub fn poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let mut c: Vec<f64> = coeffs.to_vec();
    while c.last() == Some(&0.0) {
        c.pop();
    }
    if c.len() <= 1 {
        return Vec::new();
    }
    let mut zeros = 0;
    while c[0] == 0.0 {
        c.remove(0);
        zeros += 1;
    }
    let n = c.len() - 1;
    let lead = c[n];
    let c: Vec<f64> = c.iter().map(|x| x / lead).collect();

    // Initial points on a circle whose radius bounds the root moduli.
    let radius = c[..n].iter().map(|x| x.abs()).fold(0.0, f64::max).min(1e6) + 1.0;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64) + 0.4;
            Complex64::from_polar(radius * 0.5, theta)
        })
        .collect();

    for _ in 0..MAX_ITER {
        let mut max_step: f64 = 0.0;
        for k in 0..n {
            let (p, dp) = horner(&c, z[k]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let sum: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| {
                    let d = z[k] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if step.is_finite() {
                z[k] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[k].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), zeros));
    z
}

/// LU factorization with partial pivoting, `None` when a pivot vanishes.
fn lu(mut a: Vec<Vec<f64>>) -> Option<(Vec<Vec<f64>>, Vec<usize>)> {
    let n = a.len();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[p][k] == 0.0 {
            return None;
        }
        a.swap(k, p);
        perm.swap(k, p);
        for i in k + 1..n {
            let l = a[i][k] / a[k][k];
            a[i][k] = l;
            for j in k + 1..n {
                a[i][j] -= l * a[k][j];
            }
        }
    }
    Some((a, perm))
}

fn lu_apply(lu: &[Vec<f64>], perm: &[usize], b: &[f64]) -> Vec<f64> {
    let n = lu.len();
    let mut x: Vec<f64> = perm.iter().map(|&p| b[p]).collect();
    for i in 0..n {
        for j in 0..i {
            x[i] -= lu[i][j] * x[j];
        }
    }
    for i in (0..n).rev() {
        for j in i + 1..n {
            x[i] -= lu[i][j] * x[j];
        }
        x[i] /= lu[i][i];
    }
    x
}

/// Solves `a x = b` for square `a`.
pub fn solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let (lu, perm) = lu(a.to_vec())?;
    Some(lu_apply(&lu, &perm, b))
}

pub fn inverse(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let (lu, perm) = lu(a.to_vec())?;
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            lu_apply(
                &lu,
                &perm,
                &(0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect::<Vec<_>>(),
            )
        })
        .collect();
    Some((0..n).map(|i| cols.iter().map(|c| c[i]).collect()).collect())
}

/// Right eigenvector for an approximately known simple eigenvalue, by a
/// few steps of shifted inverse iteration. Normalized to unit max-norm.
pub fn eigenvector(a: &[Vec<f64>], lambda: f64) -> Vec<f64> {
    let n = a.len();
    let mut shift = lambda + 1e-10 * (1.0 + lambda.abs());
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * i as f64).collect();
    for _ in 0..6 {
        let shifted: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| a[i][j] - if i == j { shift } else { 0.0 }).collect())
            .collect();
        match solve(&shifted, &x) {
            Some(y) if y.iter().all(|v| v.is_finite()) => {
                let m = y
                    .iter()
                    .copied()
                    .fold(0.0f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
                x = y.iter().map(|v| v / m).collect();
            }
            _ => shift += 1e-9 * (1.0 + lambda.abs()),
        }
    }
    x
}
