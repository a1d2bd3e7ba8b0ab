//! Scalar fields: exact rationals, prime fields `Z_p`, and tolerant doubles.
//!
//! A [`Field`] is the descriptor; a [`Scalar`] is a bare payload whose
//! arithmetic always goes through the descriptor. Values built by this crate
//! always match the variant of the field they were built for.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith;
use crate::error::{Error, Result};

/// Absolute tolerance used for real-field equality unless overridden.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Field {
    Rational,
    Prime(u64),
    Real { tolerance: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Rational(BigRational),
    Residue(u64),
    Real(f64),
}

/// Characteristic class of a single field descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Characteristic {
    Zero,
    Finite(u64),
}

impl Field {
    pub fn prime(p: u64) -> Result<Field> {
        if arith::is_prime(p) {
            Ok(Field::Prime(p))
        } else {
            Err(Error::NonPrimeModulus(p))
        }
    }

    pub fn real(tolerance: f64) -> Result<Field> {
        if tolerance.is_finite() && tolerance >= 0.0 {
            Ok(Field::Real { tolerance })
        } else {
            Err(Error::InvalidTolerance(tolerance))
        }
    }

    pub fn default_real() -> Field {
        Field::Real {
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    /// Zero unless the field is real.
    pub fn tolerance(&self) -> f64 {
        match self {
            Field::Real { tolerance } => *tolerance,
            _ => 0.0,
        }
    }

    pub fn characteristic(&self) -> Characteristic {
        match self {
            Field::Prime(p) => Characteristic::Finite(*p),
            _ => Characteristic::Zero,
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Field::Real { .. })
    }

    pub fn is_ordered(&self) -> bool {
        !matches!(self, Field::Prime(_))
    }

    /// Same algebraic field; real tolerances are allowed to differ.
    pub fn same_kind(&self, other: &Field) -> bool {
        match (self, other) {
            (Field::Rational, Field::Rational) => true,
            (Field::Prime(p), Field::Prime(q)) => p == q,
            (Field::Real { .. }, Field::Real { .. }) => true,
            _ => false,
        }
    }

    pub fn contains(&self, s: &Scalar) -> bool {
        match (self, s) {
            (Field::Rational, Scalar::Rational(_)) => true,
            (Field::Prime(p), Scalar::Residue(r)) => r < p,
            (Field::Real { .. }, Scalar::Real(x)) => x.is_finite(),
            _ => false,
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self {
            Field::Rational => Scalar::Rational(BigRational::from_integer(BigInt::from(n))),
            Field::Prime(p) => Scalar::Residue((n as i128).rem_euclid(*p as i128) as u64),
            Field::Real { .. } => Scalar::Real(n as f64),
        }
    }

    pub fn from_bigint(&self, n: &BigInt) -> Scalar {
        match self {
            Field::Rational => Scalar::Rational(BigRational::from_integer(n.clone())),
            Field::Prime(p) => {
                let r = n.mod_floor_u64(*p);
                Scalar::Residue(r)
            }
            Field::Real { .. } => Scalar::Real(n.to_f64().unwrap_or(f64::NAN)),
        }
    }

    /// `num / den`; `None` when `den` is zero in this field.
    pub fn from_ratio(&self, num: i64, den: i64) -> Option<Scalar> {
        let n = self.from_i64(num);
        let d = self.from_i64(den);
        self.div(&n, &d)
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (_, Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(x + y),
            (Field::Prime(p), Scalar::Residue(x), Scalar::Residue(y)) => {
                Scalar::Residue(((*x as u128 + *y as u128) % *p as u128) as u64)
            }
            (_, Scalar::Real(x), Scalar::Real(y)) => Scalar::Real(x + y),
            _ => mismatch(self, a, b),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (_, Scalar::Rational(x)) => Scalar::Rational(-x),
            (Field::Prime(p), Scalar::Residue(x)) => Scalar::Residue(if *x == 0 { 0 } else { p - x }),
            (_, Scalar::Real(x)) => Scalar::Real(-x),
            _ => mismatch(self, a, a),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (_, Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(x * y),
            (Field::Prime(p), Scalar::Residue(x), Scalar::Residue(y)) => {
                Scalar::Residue(((*x as u128 * *y as u128) % *p as u128) as u64)
            }
            (_, Scalar::Real(x), Scalar::Real(y)) => Scalar::Real(x * y),
            _ => mismatch(self, a, b),
        }
    }

    /// Multiplicative inverse; `None` for (tolerant) zero.
    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        if self.is_zero(a) {
            return None;
        }
        Some(match (self, a) {
            (_, Scalar::Rational(x)) => Scalar::Rational(x.recip()),
            (Field::Prime(p), Scalar::Residue(x)) => Scalar::Residue(arith::pow_mod(*x, p - 2, *p)),
            (_, Scalar::Real(x)) => Scalar::Real(1.0 / x),
            _ => mismatch(self, a, a),
        })
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Option<Scalar> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    pub fn pow(&self, a: &Scalar, mut k: u64) -> Scalar {
        let mut base = a.clone();
        let mut acc = self.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            k >>= 1;
        }
        acc
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Rational(x) => x.is_zero(),
            Scalar::Residue(x) => *x == 0,
            Scalar::Real(x) => x.abs() <= self.tolerance(),
        }
    }

    pub fn is_one(&self, a: &Scalar) -> bool {
        self.eq(a, &self.one())
    }

    /// Exact equality on exact fields, absolute tolerance on reals.
    pub fn eq(&self, a: &Scalar, b: &Scalar) -> bool {
        match (a, b) {
            (Scalar::Real(x), Scalar::Real(y)) => (x - y).abs() <= self.tolerance(),
            _ => a == b,
        }
    }

    /// Sign relative to zero on ordered fields (tolerant on reals).
    pub fn sign(&self, a: &Scalar) -> Option<Ordering> {
        match a {
            Scalar::Residue(_) => None,
            _ if self.is_zero(a) => Some(Ordering::Equal),
            Scalar::Rational(x) => Some(if x.is_positive() {
                Ordering::Greater
            } else {
                Ordering::Less
            }),
            Scalar::Real(x) => Some(if *x > 0.0 { Ordering::Greater } else { Ordering::Less }),
        }
    }

    pub fn is_nonnegative(&self, a: &Scalar) -> bool {
        matches!(self.sign(a), Some(Ordering::Greater | Ordering::Equal))
    }

    pub fn is_positive(&self, a: &Scalar) -> bool {
        matches!(self.sign(a), Some(Ordering::Greater))
    }

    pub fn abs(&self, a: &Scalar) -> Scalar {
        match a {
            Scalar::Rational(x) => Scalar::Rational(x.abs()),
            Scalar::Real(x) => Scalar::Real(x.abs()),
            Scalar::Residue(_) => a.clone(),
        }
    }

    pub fn sum<'a>(&self, items: impl IntoIterator<Item = &'a Scalar>) -> Scalar {
        items.into_iter().fold(self.zero(), |acc, s| self.add(&acc, s))
    }

    pub fn dot(&self, a: &[Scalar], b: &[Scalar]) -> Scalar {
        a.iter()
            .zip(b)
            .fold(self.zero(), |acc, (x, y)| self.add(&acc, &self.mul(x, y)))
    }

    /// Parses one scalar token in this field's text syntax.
    pub fn parse_scalar(&self, token: &str) -> Option<Scalar> {
        match self {
            Field::Rational => parse_rational(token).map(Scalar::Rational),
            Field::Prime(_) => {
                let r = parse_rational(token)?;
                let num = self.from_bigint(r.numer());
                let den = self.from_bigint(r.denom());
                self.div(&num, &den)
            }
            Field::Real { .. } => {
                if let Some(r) = parse_rational(token) {
                    return r.to_f64().filter(|x| x.is_finite()).map(Scalar::Real);
                }
                if !token
                    .bytes()
                    .all(|b| b.is_ascii_digit() || matches!(b, b'-' | b'+' | b'.' | b'e' | b'E'))
                {
                    return None;
                }
                token.parse::<f64>().ok().filter(|x| x.is_finite()).map(Scalar::Real)
            }
        }
    }

    /// Total order used for deterministic output: value order on Q and R,
    /// residue order on `Z_p`.
    pub fn canonical_cmp(&self, a: &Scalar, b: &Scalar) -> Ordering {
        match (a, b) {
            (Scalar::Rational(x), Scalar::Rational(y)) => x.cmp(y),
            (Scalar::Residue(x), Scalar::Residue(y)) => x.cmp(y),
            (Scalar::Real(x), Scalar::Real(y)) => x.total_cmp(y),
            _ => mismatch(self, a, b),
        }
    }

    pub fn to_f64(&self, a: &Scalar) -> f64 {
        a.to_f64()
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => f.write_str("Q"),
            Field::Prime(p) => write!(f, "Z {p}"),
            Field::Real { .. } => f.write_str("R"),
        }
    }
}

#[track_caller]
fn mismatch(field: &Field, a: &Scalar, b: &Scalar) -> ! {
    panic!("scalar {a:?} / {b:?} does not belong to field {field:?}")
}

trait ModFloor {
    fn mod_floor_u64(&self, p: u64) -> u64;
}

impl ModFloor for BigInt {
    fn mod_floor_u64(&self, p: u64) -> u64 {
        let m = BigInt::from(p);
        let r = ((self % &m) + &m) % &m;
        r.to_u64().unwrap_or(0)
    }
}

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse::<BigInt>().ok()
}

/// `-12`, `3/7`, `-6/14` (reduced). Decimals are rejected.
pub fn parse_rational(token: &str) -> Option<BigRational> {
    let (neg, body) = match token.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, token),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (parse_digits(n)?, parse_digits(d)?),
        None => (parse_digits(body)?, BigInt::one()),
    };
    if den.is_zero() {
        return None;
    }
    let r = BigRational::new(num, den);
    Some(if neg { -r } else { r })
}

impl Scalar {
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Rational(x) => x.to_f64().unwrap_or(f64::NAN),
            Scalar::Residue(x) => *x as f64,
            Scalar::Real(x) => *x,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(x) => Some(x),
            _ => None,
        }
    }
}

/// Canonical text: reduced `a/b` with positive `b`, integers without `/1`,
/// residues as plain integers, reals in shortest round-trip decimal.
impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(x) => {
                if x.denom().is_one() {
                    write!(f, "{}", x.numer())
                } else {
                    write!(f, "{}/{}", x.numer(), x.denom())
                }
            }
            Scalar::Residue(x) => write!(f, "{x}"),
            Scalar::Real(x) => {
                if *x == 0.0 {
                    f.write_str("0")
                } else {
                    write!(f, "{x}")
                }
            }
        }
    }
}

/// Field header syntax: `Q`, `R`, `Z 7` (also `Z7`, `Z_7`).
pub fn parse_field_descriptor(text: &str, tolerance: f64) -> Result<Field, FieldSyntaxError> {
    let t = text.trim();
    match t {
        "Q" => return Ok(Field::Rational),
        "R" => return Field::real(tolerance).map_err(|_| FieldSyntaxError::Malformed),
        _ => {}
    }
    let rest = t.strip_prefix('Z').ok_or(FieldSyntaxError::Malformed)?;
    let digits = rest.trim_start_matches(['_', ' ', '\t']);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(FieldSyntaxError::Malformed);
    }
    let p: u64 = digits
        .parse()
        .map_err(|_| FieldSyntaxError::NonPrime(digits.to_string()))?;
    Field::prime(p).map_err(|_| FieldSyntaxError::NonPrime(digits.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldSyntaxError {
    Malformed,
    NonPrime(String),
}

/// The components of an n-field `F_1 ∪ … ∪ F_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct NFieldSpec {
    pub components: Vec<Field>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NFieldClass {
    CharZero,
    FiniteChar,
    MixedChar,
}

impl fmt::Display for NFieldClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NFieldClass::CharZero => "characteristic zero",
            NFieldClass::FiniteChar => "finite characteristic",
            NFieldClass::MixedChar => "mixed characteristic",
        })
    }
}

/// Validates an n-field and classifies it by the characteristics of its
/// components. Only `Q ⊆ R` counts as containment; prime fields are never
/// subfields of `Q` or `R`.
pub fn nfield_classify(spec: &NFieldSpec) -> Result<NFieldClass> {
    let comps = &spec.components;
    if comps.len() < 2 {
        return Err(Error::TooFewComponents(comps.len()));
    }
    for (i, a) in comps.iter().enumerate() {
        if comps[..i].iter().any(|b| b.same_kind(a)) {
            return Err(Error::DuplicateComponent(a.to_string()));
        }
    }
    let has_q = comps.iter().any(|f| matches!(f, Field::Rational));
    let has_r = comps.iter().any(|f| matches!(f, Field::Real { .. }));
    if has_q && has_r {
        return Err(Error::ContainmentViolation("Q".into(), "R".into()));
    }
    let finite = comps
        .iter()
        .filter(|f| matches!(f.characteristic(), Characteristic::Finite(_)))
        .count();
    Ok(match finite {
        0 => NFieldClass::CharZero,
        k if k == comps.len() => NFieldClass::FiniteChar,
        _ => NFieldClass::MixedChar,
    })
}

/// Order of the direct product `G_1 ∪ … ∪ G_n` of finite groups.
pub fn ngroup_order(component_orders: &[BigUint]) -> Result<BigUint> {
    if component_orders.len() < 2 {
        return Err(Error::TooFewComponents(component_orders.len()));
    }
    if component_orders.iter().any(|o| o.is_zero()) {
        return Err(Error::InvalidOrder);
    }
    Ok(component_orders.iter().product())
}
