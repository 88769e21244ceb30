//! Exact arithmetic in the cyclotomic field `Q(ζ_N)`.
//!
//! An element is stored in the power basis `1, ζ, …, ζ^{φ(N)-1}` of
//! `Q[X]/(Φ_N)`. Reduction modulo the cyclotomic polynomial makes the
//! representation canonical, so two scalars of the same order are equal iff
//! their coefficient vectors are. Scalars of different orders are lifted to the
//! lcm of the orders before they are combined.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycloError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid root-of-unity order {0}")]
    InvalidOrder(i64),
    #[error("malformed scalar: {0}")]
    Malformed(String),
}

/// Precomputed data for one cyclotomic field.
#[derive(Debug)]
struct Field {
    order: u64,
    degree: usize,
    /// Monic `Φ_N`, lowest coefficient first, length `degree + 1`.
    cyclotomic: Vec<BigInt>,
    /// `ζ^k` reduced mod `Φ_N` for `0 <= k < N`.
    powers: Vec<Vec<BigInt>>,
}

fn field_registry() -> &'static RwLock<HashMap<u64, Arc<Field>>> {
    static REGISTRY: OnceLock<RwLock<HashMap<u64, Arc<Field>>>> = OnceLock::new();
    REGISTRY.get_or_init(|| RwLock::new(HashMap::new()))
}

fn field(order: u64) -> Arc<Field> {
    if let Some(f) = field_registry().read().unwrap().get(&order) {
        return f.clone();
    }
    let built = Arc::new(Field::build(order));
    field_registry()
        .write()
        .unwrap()
        .entry(order)
        .or_insert(built)
        .clone()
}

/// Integer polynomial division `num / den` where `den` is monic.
fn div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    if rem.len() <= dd {
        return vec![BigInt::zero()];
    }
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, d) in den.iter().enumerate() {
            rem[i + j] -= &c * d;
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero), "inexact cyclotomic division");
    quot
}

fn cyclotomic_poly(order: u64) -> Vec<BigInt> {
    // X^N - 1 = prod_{d | N} Φ_d
    let mut num = vec![BigInt::zero(); order as usize + 1];
    num[0] = -BigInt::one();
    num[order as usize] = BigInt::one();
    for d in 1..order {
        if order.is_multiple_of(d) {
            num = div_monic(&num, &cyclotomic_poly(d));
        }
    }
    num
}

impl Field {
    fn build(order: u64) -> Field {
        let cyclotomic = cyclotomic_poly(order);
        let degree = cyclotomic.len() - 1;
        let mut powers = Vec::with_capacity(order as usize);
        let mut cur = vec![BigInt::zero(); degree];
        cur[0] = BigInt::one();
        for _ in 0..order {
            powers.push(cur.clone());
            // multiply by X, reduce the overflow coefficient with Φ_N
            let top = cur[degree - 1].clone();
            let mut next = vec![BigInt::zero(); degree];
            for i in (1..degree).rev() {
                next[i] = cur[i - 1].clone();
            }
            if !top.is_zero() {
                for i in 0..degree {
                    next[i] -= &top * &cyclotomic[i];
                }
            }
            cur = next;
        }
        Field {
            order,
            degree,
            cyclotomic,
            powers,
        }
    }
}

/// Euler's totient.
pub fn euler_phi(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// Exact element of `Q(ζ_N)`.
#[derive(Clone)]
pub struct CycScalar {
    field: Arc<Field>,
    coeffs: Vec<BigRational>,
}

impl CycScalar {
    pub fn zero() -> Self {
        Self::from_rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_rational(v: BigRational) -> Self {
        CycScalar {
            field: field(1),
            coeffs: vec![v],
        }
    }

    pub fn from_frac(p: i64, q: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    /// Builds an element of `Q(ζ_N)` from power-basis coefficients, reducing
    /// any entries beyond the field degree.
    pub fn from_coeffs(order: u64, coeffs: Vec<BigRational>) -> Result<Self, CycloError> {
        if order == 0 {
            return Err(CycloError::InvalidOrder(0));
        }
        let f = field(order);
        let mut out = vec![BigRational::zero(); f.degree];
        for (k, c) in coeffs.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            add_scaled_power(&mut out, &f, k as u64, &c);
        }
        Ok(CycScalar {
            field: f,
            coeffs: out,
        })
    }

    /// `ζ_N^k` in canonical form.
    pub fn root_of_unity(order: u64, k: i64) -> Result<Self, CycloError> {
        if order == 0 {
            return Err(CycloError::InvalidOrder(0));
        }
        let f = field(order);
        let e = k.rem_euclid(order as i64) as usize;
        let coeffs = f.powers[e]
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        Ok(CycScalar { field: f, coeffs })
    }

    pub fn order(&self) -> u64 {
        self.field.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// Returns the rational value if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<BigRational> {
        let lowered = self.lowered();
        if lowered.field.order <= 2 {
            Some(lowered.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Lifts into `Q(ζ_L)`; `L` must be a multiple of the current order.
    pub fn lift_to(&self, order: u64) -> Self {
        if order == self.field.order {
            return self.clone();
        }
        assert!(
            order.is_multiple_of(self.field.order),
            "cannot lift order {} into {}",
            self.field.order,
            order
        );
        let f = field(order);
        let step = order / self.field.order;
        let mut out = vec![BigRational::zero(); f.degree];
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                add_scaled_power(&mut out, &f, k as u64 * step, c);
            }
        }
        CycScalar {
            field: f,
            coeffs: out,
        }
    }

    /// Drops to order 1 when the element is rational; otherwise unchanged.
    fn lowered(&self) -> Self {
        if self.field.order > 2 && self.coeffs[1..].iter().all(Zero::is_zero) {
            Self::from_rational(self.coeffs[0].clone())
        } else {
            self.clone()
        }
    }

    fn coerce(a: &Self, b: &Self) -> (Self, Self) {
        let (na, nb) = (a.field.order, b.field.order);
        if na == nb {
            return (a.clone(), b.clone());
        }
        let l = na.lcm(&nb);
        (a.lift_to(l), b.lift_to(l))
    }

    fn combine(&self, other: &Self, f: impl Fn(&BigRational, &BigRational) -> BigRational) -> Self {
        if Arc::ptr_eq(&self.field, &other.field) || self.field.order == other.field.order {
            return CycScalar {
                field: self.field.clone(),
                coeffs: self
                    .coeffs
                    .iter()
                    .zip(&other.coeffs)
                    .map(|(x, y)| f(x, y))
                    .collect(),
            };
        }
        let (a, b) = Self::coerce(self, other);
        a.combine(&b, f)
    }

    fn mul_ref(&self, other: &Self) -> Self {
        if self.field.order != other.field.order {
            if self.field.order == 1 {
                return other.scale_rational(&self.coeffs[0]);
            }
            if other.field.order == 1 {
                return self.scale_rational(&other.coeffs[0]);
            }
            let (a, b) = Self::coerce(self, other);
            return a.mul_ref(&b);
        }
        let f = &self.field;
        let mut out = vec![BigRational::zero(); f.degree];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                add_scaled_power(&mut out, f, (i + j) as u64, &(x * y));
            }
        }
        CycScalar {
            field: f.clone(),
            coeffs: out,
        }
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        CycScalar {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against `Φ_N`.
    pub fn inverse(&self) -> Result<Self, CycloError> {
        if self.is_zero() {
            return Err(CycloError::DivisionByZero);
        }
        let f = &self.field;
        if f.degree == 1 {
            return Ok(CycScalar {
                field: f.clone(),
                coeffs: vec![self.coeffs[0].recip()],
            });
        }
        let modulus: Vec<BigRational> = f
            .cyclotomic
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        let inv = poly_inverse_mod(&self.coeffs, &modulus);
        let mut coeffs = inv;
        coeffs.resize(f.degree, BigRational::zero());
        Ok(CycScalar {
            field: f.clone(),
            coeffs,
        })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, CycloError> {
        Ok(self * &other.inverse()?)
    }

    pub fn pow(&self, e: i64) -> Result<Self, CycloError> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = CycScalar::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            sq = &sq * &sq;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Re-reduces the coefficient vector; canonical elements are fixed points.
    pub fn reduced(&self) -> Self {
        CycScalar::from_coeffs(self.field.order, self.coeffs.clone()).expect("order is positive")
    }
}

fn add_scaled_power(out: &mut [BigRational], f: &Field, k: u64, c: &BigRational) {
    let p = &f.powers[(k % f.order) as usize];
    for (o, pc) in out.iter_mut().zip(p) {
        if !pc.is_zero() {
            *o += c * BigRational::from_integer(pc.clone());
        }
    }
}

fn trim(p: &mut Vec<BigRational>) {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn poly_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = a.to_vec();
    trim(&mut rem);
    let mut b = b.to_vec();
    trim(&mut b);
    let db = b.len() - 1;
    let lead = b[db].clone();
    if rem.len() <= db {
        return (vec![BigRational::zero()], rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    for i in (0..quot.len()).rev() {
        let c = &rem[i + db] / &lead;
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            rem[i + j] -= &c * bj;
        }
        quot[i] = c;
    }
    rem.truncate(db.max(1));
    trim(&mut rem);
    (quot, rem)
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(BigRational::zero);
            let y = b.get(i).cloned().unwrap_or_else(BigRational::zero);
            x - y
        })
        .collect()
}

/// Inverse of `a` modulo the irreducible `modulus`.
fn poly_inverse_mod(a: &[BigRational], modulus: &[BigRational]) -> Vec<BigRational> {
    // invariant: s_i * a ≡ r_i (mod modulus)
    let mut r0 = modulus.to_vec();
    let mut r1 = a.to_vec();
    trim(&mut r1);
    let mut s0 = vec![BigRational::zero()];
    let mut s1 = vec![BigRational::one()];
    while !(r1.len() == 1 && r1[0].is_zero()) {
        let (q, r) = poly_divrem(&r0, &r1);
        let s = poly_sub(&s0, &poly_mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    // r0 is a nonzero constant since modulus is irreducible
    debug_assert_eq!(r0.len(), 1);
    let c = r0[0].recip();
    let (_, mut inv) = poly_divrem(&s0, modulus);
    for x in inv.iter_mut() {
        *x *= &c;
    }
    inv
}

impl PartialEq for CycScalar {
    fn eq(&self, other: &Self) -> bool {
        if self.field.order == other.field.order {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = Self::coerce(self, other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CycScalar {}

impl<'a> Add<&'a CycScalar> for &'a CycScalar {
    type Output = CycScalar;
    fn add(self, rhs: &CycScalar) -> CycScalar {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        self.combine(rhs, |x, y| x + y)
    }
}

impl<'a> Sub<&'a CycScalar> for &'a CycScalar {
    type Output = CycScalar;
    fn sub(self, rhs: &CycScalar) -> CycScalar {
        if rhs.is_zero() {
            return self.clone();
        }
        self.combine(rhs, |x, y| x - y)
    }
}

impl<'a> Mul<&'a CycScalar> for &'a CycScalar {
    type Output = CycScalar;
    fn mul(self, rhs: &CycScalar) -> CycScalar {
        if self.is_zero() || rhs.is_zero() {
            return CycScalar::zero();
        }
        self.mul_ref(rhs)
    }
}

impl Neg for &CycScalar {
    type Output = CycScalar;
    fn neg(self) -> CycScalar {
        CycScalar {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<CycScalar> for CycScalar {
            type Output = CycScalar;
            fn $m(self, rhs: CycScalar) -> CycScalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a CycScalar> for CycScalar {
            type Output = CycScalar;
            fn $m(self, rhs: &CycScalar) -> CycScalar {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CycScalar {
    type Output = CycScalar;
    fn neg(self) -> CycScalar {
        -&self
    }
}

impl fmt::Display for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lowered = self.lowered();
        let mut terms = Vec::new();
        for (k, c) in lowered.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let t = match k {
                0 => format!("{c}"),
                _ if c.is_one() => format!("z{}^{k}", lowered.field.order),
                _ if (-c).is_one() => format!("-z{}^{k}", lowered.field.order),
                _ => format!("{c}*z{}^{k}", lowered.field.order),
            };
            terms.push(t);
        }
        if terms.is_empty() {
            return write!(f, "0");
        }
        let mut out = terms[0].clone();
        for t in &terms[1..] {
            if let Some(rest) = t.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(t);
            }
        }
        write!(f, "{out}")
    }
}

impl fmt::Debug for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycScalar({self})")
    }
}

/// `(i)_q = 1 + q + … + q^{i-1}`, with `(0)_q = 0`.
pub fn q_number(i: u32, q: &CycScalar) -> CycScalar {
    let mut acc = CycScalar::zero();
    let mut p = CycScalar::one();
    for _ in 0..i {
        acc = &acc + &p;
        p = &p * q;
    }
    acc
}

/// `(i)!_q = (i)_q (i-1)_q … (1)_q`, with `(0)!_q = 1`.
pub fn q_factorial(i: u32, q: &CycScalar) -> CycScalar {
    (1..=i).fold(CycScalar::one(), |acc, k| &acc * &q_number(k, q))
}

/// Wire form: `{order: N, coeffs: ["p/q", …]}` with `φ(N)` entries.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ScalarRepr {
    pub order: u64,
    pub coeffs: Vec<String>,
}

fn rational_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn parse_rational(s: &str) -> Result<BigRational, CycloError> {
    let s = s.trim();
    let bad = || CycloError::Malformed(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(CycloError::DivisionByZero);
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl From<&CycScalar> for ScalarRepr {
    fn from(s: &CycScalar) -> Self {
        ScalarRepr {
            order: s.field.order,
            coeffs: s.coeffs.iter().map(rational_string).collect(),
        }
    }
}

impl TryFrom<ScalarRepr> for CycScalar {
    type Error = CycloError;
    fn try_from(r: ScalarRepr) -> Result<Self, CycloError> {
        if r.order == 0 {
            return Err(CycloError::InvalidOrder(0));
        }
        let degree = euler_phi(r.order) as usize;
        if r.coeffs.len() != degree {
            return Err(CycloError::Malformed(format!(
                "order {} needs {} coefficients, got {}",
                r.order,
                degree,
                r.coeffs.len()
            )));
        }
        let coeffs = r
            .coeffs
            .iter()
            .map(|c| parse_rational(c))
            .collect::<Result<Vec<_>, _>>()?;
        CycScalar::from_coeffs(r.order, coeffs)
    }
}

impl Serialize for CycScalar {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ScalarRepr::from(self).serialize(serializer)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ScalarWire {
    Repr(ScalarRepr),
    Int(i64),
    Text(String),
}

/// Accepts the wire form, an integer, or a rational literal such as `"-3/2"`.
impl<'de> Deserialize<'de> for CycScalar {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match ScalarWire::deserialize(deserializer)? {
            ScalarWire::Repr(r) => CycScalar::try_from(r),
            ScalarWire::Int(v) => Ok(CycScalar::from_int(v)),
            ScalarWire::Text(t) => parse_scalar_literal(&t),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// Parses a rational literal such as `-3/2` into a scalar.
pub fn parse_scalar_literal(s: &str) -> Result<CycScalar, CycloError> {
    Ok(CycScalar::from_rational(parse_rational(s)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn z(n: u64, k: i64) -> CycScalar {
        CycScalar::root_of_unity(n, k).unwrap()
    }

    #[test]
    fn scalar_shorthand_forms() {
        let a: CycScalar = serde_json::from_str("-2").unwrap();
        let b: CycScalar = serde_json::from_str("\"-4/2\"").unwrap();
        assert_eq!(a, b);
        assert_eq!(a, CycScalar::from_int(-2));
        let c: CycScalar = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn cyclotomic_polynomials() {
        let as_i64 = |n| -> Vec<i64> {
            cyclotomic_poly(n)
                .iter()
                .map(|c| c.to_string().parse().unwrap())
                .collect()
        };
        assert_eq!(as_i64(1), vec![-1, 1]);
        assert_eq!(as_i64(2), vec![1, 1]);
        assert_eq!(as_i64(4), vec![1, 0, 1]);
        assert_eq!(as_i64(6), vec![1, -1, 1]);
        assert_eq!(as_i64(12), vec![1, 0, -1, 0, 1]);
        for n in 1..30 {
            assert_eq!(cyclotomic_poly(n).len() as u64 - 1, euler_phi(n));
        }
    }

    #[test]
    fn root_of_unity_examples() {
        assert!(z(1, 0).is_one());
        assert_eq!(z(2, 1), CycScalar::from_int(-1));
        // X^2 mod X^2+1 = -1
        assert_eq!(z(4, 2), CycScalar::from_int(-1));
        assert_eq!(z(4, 2).coeffs().len(), 2);
        assert_eq!(z(4, 1) * z(4, 1), CycScalar::from_int(-1));
        assert_eq!(z(3, 1).inverse().unwrap(), z(3, 2));
    }

    #[test]
    fn multiplicative_order_is_exact() {
        for n in 1..=12u64 {
            let r = z(n, 1);
            let mut p = r.clone();
            let mut ord = 1;
            while !p.is_one() {
                p = &p * &r;
                ord += 1;
                assert!(ord <= n);
            }
            assert_eq!(ord, n);
            for k in 0..n as i64 {
                let g = (n as i64).gcd(&k) as u64;
                let mut p = z(n, k);
                let mut o = 1;
                while !p.is_one() {
                    p = &p * &z(n, k);
                    o += 1;
                }
                assert_eq!(o, n / g);
            }
        }
    }

    #[test]
    fn mixed_orders_coerce() {
        // ζ_4^2 = ζ_2
        assert_eq!(z(4, 2), z(2, 1));
        // ζ_6^2 = ζ_3
        assert_eq!(z(6, 2), z(3, 1));
        let s = z(4, 1) + z(3, 1);
        assert_eq!(s.order(), 12);
        assert_eq!(&s - &z(3, 1), z(12, 3));
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(
            CycScalar::zero().inverse().unwrap_err(),
            CycloError::DivisionByZero
        );
        assert!(z(4, 1).checked_div(&CycScalar::zero()).is_err());
    }

    #[test]
    fn q_numbers() {
        assert_eq!(q_number(3, &CycScalar::one()), CycScalar::from_int(3));
        assert!(q_number(2, &CycScalar::from_int(-1)).is_zero());
        assert!(q_factorial(1, &z(5, 2)).is_one());
        assert!(q_number(0, &z(5, 2)).is_zero());
        assert!(q_factorial(0, &z(5, 2)).is_one());
        for n in 2..=8u64 {
            let q = z(n, 1);
            for i in 1..n as u32 {
                assert!(!q_number(i, &q).is_zero());
            }
            assert!(q_number(n as u32, &q).is_zero());
        }
    }

    fn random_scalar(rng: &mut ChaCha8Rng, order: u64) -> CycScalar {
        let d = euler_phi(order) as usize;
        let coeffs = (0..d)
            .map(|_| {
                BigRational::new(
                    BigInt::from(rng.gen_range(-9..=9)),
                    BigInt::from(rng.gen_range(1..=5)),
                )
            })
            .collect();
        CycScalar::from_coeffs(order, coeffs).unwrap()
    }

    #[test]
    fn field_axioms_on_seeded_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for order in [1u64, 3, 4, 5, 6, 8, 12] {
            for _ in 0..20 {
                let a = random_scalar(&mut rng, order);
                let b = random_scalar(&mut rng, order);
                let c = random_scalar(&mut rng, order);
                assert_eq!((&a * &b) * &c, &a * &(&b * &c));
                assert_eq!(&a * &(&b + &c), (&a * &b) + (&a * &c));
                assert_eq!(&a + &CycScalar::zero(), a);
                if !a.is_zero() {
                    assert!((&a * &a.inverse().unwrap()).is_one());
                }
                assert_eq!(a.reduced(), a);
            }
        }
    }

    #[test]
    fn serialization_keeps_trailing_zeros() {
        let s = CycScalar::from_int(3).lift_to(4);
        let repr = ScalarRepr::from(&s);
        assert_eq!(repr.coeffs, vec!["3/1".to_string(), "0/1".to_string()]);
        let json = serde_json::to_string(&s).unwrap();
        let back: CycScalar = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        let bad = ScalarRepr {
            order: 4,
            coeffs: vec!["1".into()],
        };
        assert!(CycScalar::try_from(bad).is_err());
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(z(4, 1).to_string(), "z4^1");
        assert_eq!((CycScalar::from_int(2) - z(4, 1)).to_string(), "2 - z4^1");
        assert_eq!(CycScalar::from_frac(-1, 2).to_string(), "-1/2");
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn scalar(order: u64) -> impl Strategy<Value = CycScalar> {
        let d = euler_phi(order) as usize;
        proptest::collection::vec((-20i64..=20, 1i64..=6), d).prop_map(move |cs| {
            let coeffs = cs
                .into_iter()
                .map(|(p, q)| BigRational::new(p.into(), q.into()))
                .collect();
            CycScalar::from_coeffs(order, coeffs).unwrap()
        })
    }

    proptest! {
        #[test]
        fn inverse_round_trip(a in scalar(12)) {
            prop_assume!(!a.is_zero());
            prop_assert!((&a * &a.inverse().unwrap()).is_one());
        }

        #[test]
        fn ring_axioms(a in scalar(12), b in scalar(12), c in scalar(12)) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert!((&a - &a).is_zero());
        }

        #[test]
        fn lift_is_a_homomorphism(a in scalar(4), b in scalar(4)) {
            prop_assert_eq!((&a * &b).lift_to(12), &a.lift_to(12) * &b.lift_to(12));
            prop_assert_eq!(a.lift_to(12), a);
        }

        #[test]
        fn json_round_trip(a in scalar(8)) {
            let json = serde_json::to_string(&a).unwrap();
            let back: CycScalar = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
