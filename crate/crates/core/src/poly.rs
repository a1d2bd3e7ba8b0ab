//! Univariate polynomials over a [`Field`], with root finding over `Q` and `Z_p`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith;
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::matrix::Matrix;
use crate::numeric;

/// Coefficients are stored low degree first with no trailing zeros, so the
/// zero polynomial has an empty coefficient list.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    field: Field,
    coeffs: Vec<Scalar>,
}

/// `lead · Π (x - rᵢ)^{mᵢ} · cofactor`, where the monic cofactor has no
/// root in the field. Roots are listed in canonical ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub lead: Scalar,
    pub roots: Vec<(Scalar, usize)>,
    pub cofactor: Polynomial,
}

impl Factorization {
    pub fn splits(&self) -> bool {
        self.cofactor.degree() == Some(0)
    }
}

impl Polynomial {
    pub fn new(field: Field, mut coeffs: Vec<Scalar>) -> Polynomial {
        while coeffs.last().is_some_and(|c| field.is_zero(c)) {
            coeffs.pop();
        }
        Polynomial { field, coeffs }
    }

    pub fn from_i64(field: Field, coeffs: &[i64]) -> Polynomial {
        Polynomial::new(field, coeffs.iter().map(|&c| field.from_i64(c)).collect())
    }

    pub fn zero(field: Field) -> Polynomial {
        Polynomial {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(field: Field, c: Scalar) -> Polynomial {
        Polynomial::new(field, vec![c])
    }

    pub fn one(field: Field) -> Polynomial {
        Polynomial::constant(field, field.one())
    }

    /// `x - r`.
    pub fn linear(field: Field, r: &Scalar) -> Polynomial {
        Polynomial::new(field, vec![field.neg(r), field.one()])
    }

    /// `Π (x - r)` over the given roots (with repetition).
    pub fn from_roots(field: Field, roots: &[Scalar]) -> Polynomial {
        roots.iter().fold(Polynomial::one(field), |acc, r| {
            acc.times(&Polynomial::linear(field, r))
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Scalar {
        self.coeffs.last().cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs.get(k).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_monic(&self) -> bool {
        self.field.is_one(&self.leading())
    }

    /// Divides by the leading coefficient; the zero polynomial is returned as is.
    pub fn monic(&self) -> Polynomial {
        match self.field.inv(&self.leading()) {
            Some(inv) => self.scale(&inv),
            None => self.clone(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        let f = self.field;
        Polynomial::new(f, self.coeffs.iter().map(|a| f.mul(a, c)).collect())
    }

    fn check(&self, other: &Polynomial) -> Result<()> {
        if self.field.same_kind(&other.field) {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check(other)?;
        Ok(self.plus(other))
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check(other)?;
        Ok(self.minus(other))
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check(other)?;
        Ok(self.times(other))
    }

    /// Quotient and remainder with `deg r < deg other`.
    pub fn divmod(&self, other: &Polynomial) -> Result<(Polynomial, Polynomial)> {
        self.check(other)?;
        if other.is_zero() {
            return Err(Error::DivisionByZeroPolynomial);
        }
        Ok(self.divrem(other))
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check(other)?;
        Ok(self.gcd_with(other))
    }

    pub fn lcm(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check(other)?;
        Ok(self.lcm_with(other))
    }

    pub(crate) fn plus(&self, other: &Polynomial) -> Polynomial {
        let f = self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        Polynomial::new(f, (0..n).map(|k| f.add(&self.coeff(k), &other.coeff(k))).collect())
    }

    pub(crate) fn minus(&self, other: &Polynomial) -> Polynomial {
        let f = self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        Polynomial::new(f, (0..n).map(|k| f.sub(&self.coeff(k), &other.coeff(k))).collect())
    }

    pub(crate) fn times(&self, other: &Polynomial) -> Polynomial {
        let f = self.field;
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero(f);
        }
        let mut out = vec![f.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(&out[i + j], &f.mul(a, b));
            }
        }
        Polynomial::new(f, out)
    }

    pub(crate) fn divrem(&self, other: &Polynomial) -> (Polynomial, Polynomial) {
        let f = self.field;
        let d = other.degree().expect("divisor is nonzero");
        let inv = f.inv(&other.leading()).expect("leading coefficient is nonzero");
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return (Polynomial::zero(f), self.clone());
        }
        let mut quot = vec![f.zero(); rem.len() - d];
        for k in (0..quot.len()).rev() {
            let c = f.mul(&rem[k + d], &inv);
            for (j, b) in other.coeffs.iter().enumerate() {
                rem[k + j] = f.sub(&rem[k + j], &f.mul(&c, b));
            }
            rem[k + d] = f.zero();
            quot[k] = c;
        }
        rem.truncate(d);
        (Polynomial::new(f, quot), Polynomial::new(f, rem))
    }

    pub(crate) fn rem(&self, other: &Polynomial) -> Polynomial {
        self.divrem(other).1
    }

    /// Exact quotient; the caller knows `other` divides `self`.
    pub(crate) fn quo(&self, other: &Polynomial) -> Polynomial {
        self.divrem(other).0
    }

    pub(crate) fn gcd_with(&self, other: &Polynomial) -> Polynomial {
        let (mut a, mut b) = (self.monic(), other.monic());
        while !b.is_zero() {
            let r = a.rem(&b).monic();
            a = b;
            b = r;
        }
        a
    }

    pub(crate) fn lcm_with(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero(self.field);
        }
        self.times(other).quo(&self.gcd_with(other)).monic()
    }

    /// `s` with `s·self ≡ 1 (mod m)`, when `self` and `m` are coprime.
    pub(crate) fn inverse_mod(&self, m: &Polynomial) -> Option<Polynomial> {
        let f = self.field;
        let (mut r0, mut r1) = (m.clone(), self.rem(m));
        let (mut s0, mut s1) = (Polynomial::zero(f), Polynomial::one(f));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s = s0.minus(&q.times(&s1));
            (r0, r1) = (r1, r);
            (s0, s1) = (s1, s);
        }
        if r0.degree() != Some(0) {
            return None;
        }
        let inv = f.inv(&r0.leading())?;
        Some(s0.scale(&inv).rem(m))
    }

    /// Whether `other` divides `self` exactly.
    pub fn divisible_by(&self, other: &Polynomial) -> Result<bool> {
        Ok(self.divmod(other)?.1.is_zero())
    }

    pub fn derivative(&self) -> Polynomial {
        let f = self.field;
        Polynomial::new(
            f,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| f.mul(c, &f.from_i64(k as i64)))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let f = self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(f.zero(), |acc, c| f.add(&f.mul(&acc, x), c))
    }

    /// `p(M)` by Horner's rule. `M` must be square.
    pub fn eval_matrix(&self, m: &Matrix) -> Matrix {
        let f = self.field;
        let n = m.rows();
        let mut acc = Matrix::zeros(&f, n, n);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&f, m);
            for i in 0..n {
                let v = f.add(acc.get(i, i), c);
                acc.set(i, i, v);
            }
        }
        acc
    }

    /// `self^k mod m`.
    fn pow_mod(&self, mut k: u64, m: &Polynomial) -> Polynomial {
        let mut acc = Polynomial::one(self.field);
        let mut base = self.rem(m);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.times(&base).rem(m);
            }
            base = base.times(&base).rem(m);
            k >>= 1;
        }
        acc
    }

    /// Squarefree decomposition `f = c · Π gᵢ^i` with monic, pairwise coprime,
    /// squarefree `gᵢ`. Returns `(gᵢ, i)` for the nonconstant parts, `i` ascending.
    pub fn squarefree_decomposition(&self) -> Result<Vec<(Polynomial, usize)>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut parts = match self.field {
            Field::Prime(p) => squarefree_prime(&self.monic(), p),
            _ => yun(&self.monic()),
        };
        parts.sort_by_key(|(_, i)| *i);
        let mut merged: Vec<(Polynomial, usize)> = Vec::new();
        for (g, i) in parts {
            match merged.last_mut() {
                Some((h, j)) if *j == i => *h = h.times(&g),
                _ => merged.push((g, i)),
            }
        }
        Ok(merged)
    }

    /// Roots in the field with multiplicities, and the root-free cofactor.
    pub fn factor_roots(&self) -> Result<Factorization> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let field = self.field;
        let distinct = match field {
            Field::Rational => rational_roots(&self.monic()),
            Field::Prime(p) => prime_roots(&self.monic(), p),
            Field::Real { .. } => return Err(Error::ExactFieldRequired),
        };
        let mut rest = self.monic();
        let mut roots = Vec::with_capacity(distinct.len());
        for r in distinct {
            let lin = Polynomial::linear(field, &r);
            let mut mult = 0;
            loop {
                let (q, rem) = rest.divrem(&lin);
                if !rem.is_zero() {
                    break;
                }
                rest = q;
                mult += 1;
            }
            if mult > 0 {
                roots.push((r, mult));
            }
        }
        roots.sort_by(|a, b| field.canonical_cmp(&a.0, &b.0));
        Ok(Factorization {
            lead: self.leading(),
            roots,
            cofactor: rest,
        })
    }

    /// Distinct roots in the field, ascending.
    pub fn roots(&self) -> Result<Vec<Scalar>> {
        Ok(self.factor_roots()?.roots.into_iter().map(|(r, _)| r).collect())
    }

    /// Factored text when the field is exact and the polynomial has roots,
    /// otherwise the expanded form.
    pub fn render(&self) -> String {
        match self.factor_roots() {
            Ok(fact) if !fact.roots.is_empty() => render_factored(&self.field, &fact),
            _ => self.to_string(),
        }
    }
}

fn yun(f: &Polynomial) -> Vec<(Polynomial, usize)> {
    let df = f.derivative();
    let a0 = f.gcd_with(&df);
    let mut b = f.quo(&a0);
    let mut c = df.quo(&a0);
    let mut d = c.minus(&b.derivative());
    let mut out = Vec::new();
    let mut i = 1;
    while b.degree().unwrap_or(0) > 0 {
        let a = b.gcd_with(&d);
        b = b.quo(&a);
        c = d.quo(&a);
        d = c.minus(&b.derivative());
        if a.degree().unwrap_or(0) > 0 {
            out.push((a, i));
        }
        i += 1;
    }
    out
}

// Squarefree factorisation over F_p, recursing through p-th roots when the
// derivative vanishes.
fn squarefree_prime(f: &Polynomial, p: u64) -> Vec<(Polynomial, usize)> {
    let mut out = Vec::new();
    if f.degree().unwrap_or(0) == 0 {
        return out;
    }
    let mut c = f.gcd_with(&f.derivative());
    let mut w = f.quo(&c);
    let mut i = 1;
    while w.degree().unwrap_or(0) > 0 {
        let y = w.gcd_with(&c);
        let z = w.quo(&y);
        if z.degree().unwrap_or(0) > 0 {
            out.push((z, i));
        }
        i += 1;
        w = y;
        c = c.quo(&w);
    }
    if c.degree().unwrap_or(0) > 0 {
        let step = p as usize;
        let root = Polynomial::new(f.field, c.coeffs.iter().step_by(step).cloned().collect());
        for (g, j) in squarefree_prime(&root.monic(), p) {
            out.push((g, j * step));
        }
    }
    out
}

// Primitive integer coefficients of a rational polynomial, sign normalised
// so the leading coefficient is positive.
fn primitive_integer(f: &Polynomial) -> Vec<BigInt> {
    let lcm = f.coeffs.iter().fold(BigInt::one(), |acc, c| match c {
        Scalar::Rational(q) => acc.lcm(q.denom()),
        _ => acc,
    });
    let ints: Vec<BigInt> = f
        .coeffs
        .iter()
        .map(|c| match c {
            Scalar::Rational(q) => q.numer() * (&lcm / q.denom()),
            _ => unreachable!("rational polynomial"),
        })
        .collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    let sign = if ints.last().is_some_and(|c| c.is_negative()) {
        -1
    } else {
        1
    };
    ints.into_iter().map(|c| c / &content * sign).collect()
}

// Σ a_k p^k q^{n-k} == 0, i.e. p/q is a root of the integer polynomial.
fn is_integer_root(a: &[BigInt], p: &BigInt, q: &BigInt) -> bool {
    let n = a.len() - 1;
    let mut acc = a[n].clone();
    let mut qpow = BigInt::one();
    for k in (0..n).rev() {
        qpow *= q;
        acc = acc * p + &a[k] * &qpow;
    }
    acc.is_zero()
}

const ENUMERATION_LIMIT: u128 = 250_000;

fn rational_roots(f: &Polynomial) -> Vec<Scalar> {
    let field = Field::Rational;
    let mut roots = Vec::new();
    let mut g = f.clone();
    if g.coeff(0) == field.zero() && g.degree().unwrap_or(0) > 0 {
        roots.push(field.zero());
        while g.coeff(0) == field.zero() && g.degree().unwrap_or(0) > 0 {
            g = Polynomial::new(field, g.coeffs[1..].to_vec());
        }
    }
    if g.degree().unwrap_or(0) == 0 {
        return roots;
    }
    // Work on the squarefree part to keep the integer coefficients small.
    let sq = g.quo(&g.gcd_with(&g.derivative()));
    let a = primitive_integer(&sq);
    let a0 = a[0].abs();
    let an = a[a.len() - 1].abs();

    let enumerable = match (a0.to_u64(), an.to_u64()) {
        (Some(c0), Some(cn)) => {
            let (d0, dn) = (arith::divisors(c0), arith::divisors(cn));
            ((d0.len() as u128) * (dn.len() as u128) <= ENUMERATION_LIMIT).then_some((d0, dn))
        }
        _ => None,
    };

    let mut found: Vec<BigRational> = Vec::new();
    match enumerable {
        Some((d0, dn)) => {
            // Cauchy bound on root moduli.
            let bound = 1.0
                + a[..a.len() - 1]
                    .iter()
                    .map(|c| {
                        (BigRational::new(c.abs(), an.clone()))
                            .to_f64()
                            .unwrap_or(f64::INFINITY)
                    })
                    .fold(0.0, f64::max);
            for &q in &dn {
                for &p in &d0 {
                    if p.gcd(&q) != 1 || (p as f64) / (q as f64) > bound * (1.0 + 1e-9) {
                        continue;
                    }
                    let (bp, bq) = (BigInt::from(p), BigInt::from(q));
                    for sp in [bp.clone(), -bp] {
                        if is_integer_root(&a, &sp, &bq) {
                            found.push(BigRational::new(sp, bq.clone()));
                        }
                    }
                }
            }
        }
        None => found = guided_rational_roots(&a, &a0, &an),
    }
    roots.extend(found.into_iter().map(Scalar::Rational));
    roots.sort_by(|x, y| field.canonical_cmp(x, y));
    roots.dedup();
    roots
}

// Candidates p/q taken from continued-fraction convergents of numerically
// located real roots; every candidate is checked exactly.
fn guided_rational_roots(a: &[BigInt], a0: &BigInt, an: &BigInt) -> Vec<BigRational> {
    let scale = a.iter().map(|c| c.abs()).max().unwrap_or_else(BigInt::one);
    let coeffs: Vec<f64> = a
        .iter()
        .map(|c| BigRational::new(c.clone(), scale.clone()).to_f64().unwrap_or(0.0))
        .collect();
    let mut out = Vec::new();
    let try_candidate = |p: BigInt, q: BigInt, out: &mut Vec<BigRational>| {
        if q.is_zero() || (!p.is_zero() && !(a0 % p.abs()).is_zero()) || !(an % &q).is_zero() {
            return;
        }
        if is_integer_root(a, &p, &q) {
            let r = BigRational::new(p, q);
            if !out.contains(&r) {
                out.push(r);
            }
        }
    };
    for z in numeric::poly_roots(&coeffs) {
        if z.im.abs() > 1e-6 * (1.0 + z.re.abs()) {
            continue;
        }
        for (p, q) in convergents(z.re, 40) {
            try_candidate(BigInt::from(p), BigInt::from(q), &mut out);
        }
    }
    for p in [1i64, -1] {
        try_candidate(BigInt::from(p), BigInt::one(), &mut out);
    }
    out
}

fn convergents(x: f64, max_terms: usize) -> Vec<(i128, i128)> {
    let mut out = Vec::new();
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..max_terms {
        if !r.is_finite() || r.abs() > 1e18 {
            break;
        }
        let a = r.floor();
        let ai = a as i128;
        let (Some(h2), Some(k2)) = (
            ai.checked_mul(h1).and_then(|v| v.checked_add(h0)),
            ai.checked_mul(k1).and_then(|v| v.checked_add(k0)),
        ) else {
            break;
        };
        out.push((h2, k2));
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    out
}

fn prime_roots(f: &Polynomial, p: u64) -> Vec<Scalar> {
    let field = Field::Prime(p);
    if p <= 65_536 {
        return (0..p)
            .map(Scalar::Residue)
            .filter(|x| field.is_zero(&f.eval(x)))
            .collect();
    }
    // Product of the distinct linear factors: gcd(f, x^p - x).
    let x = Polynomial::new(field, vec![field.zero(), field.one()]);
    let xp = x.pow_mod(p, f);
    let g = f.gcd_with(&xp.minus(&x));
    let mut roots = Vec::new();
    split_linear(&g, p, &mut roots);
    roots.sort_by(|a, b| field.canonical_cmp(a, b));
    roots
}

// Equal-degree splitting of a product of distinct linear factors.
fn split_linear(g: &Polynomial, p: u64, out: &mut Vec<Scalar>) {
    let field = Field::Prime(p);
    match g.degree() {
        None | Some(0) => return,
        Some(1) => {
            out.push(field.neg(&g.monic().coeff(0)));
            return;
        }
        _ => {}
    }
    for shift in 1..p {
        let h = Polynomial::new(field, vec![field.from_i64(shift as i64), field.one()]);
        let t = h.pow_mod((p - 1) / 2, g).minus(&Polynomial::one(field));
        let d = g.gcd_with(&t);
        let deg = d.degree().unwrap_or(0);
        if deg > 0 && deg < g.degree().unwrap_or(0) {
            split_linear(&d, p, out);
            split_linear(&g.quo(&d), p, out);
            return;
        }
    }
}

fn render_factored(field: &Field, fact: &Factorization) -> String {
    let mut s = String::new();
    match field.sign(&fact.lead) {
        _ if field.is_one(&fact.lead) => {}
        _ if field.eq(&fact.lead, &field.neg(&field.one())) => s.push('-'),
        _ => {
            let lead = fact.lead.to_string();
            if lead.contains('/') {
                s.push_str(&format!("({lead})"));
            } else {
                s.push_str(&lead);
            }
        }
    }
    for (r, m) in &fact.roots {
        if field.is_zero(r) {
            s.push('x');
        } else {
            match field.sign(r) {
                Some(Ordering::Less) => s.push_str(&format!("(x+{})", field.neg(r))),
                _ => s.push_str(&format!("(x-{r})")),
            }
        }
        if *m > 1 {
            s.push_str(&format!("^{m}"));
        }
    }
    if fact.cofactor.degree().unwrap_or(0) > 0 {
        s.push_str(&format!("({})", fact.cofactor));
    }
    s
}

/// Expanded form, highest degree first: `x^2 - 3x + 2`, `(1/2)x + 1`.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let field = self.field;
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if field.is_zero(c) {
                continue;
            }
            let negative = field.sign(c) == Some(Ordering::Less);
            let mag = if negative { field.neg(c) } else { c.clone() };
            match (first, negative) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            let text = mag.to_string();
            if k == 0 {
                f.write_str(&text)?;
                continue;
            }
            if !field.is_one(&mag) {
                if text.contains('/') || text.contains('e') {
                    write!(f, "({text})")?;
                } else {
                    f.write_str(&text)?;
                }
            }
            f.write_str("x")?;
            if k > 1 {
                write!(f, "^{k}")?;
            }
        }
        Ok(())
    }
}
