//! Exact arithmetic: Laurent polynomials in `q` over big integers, quantum
//! integers, and multivariate polynomials over the rationals.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{internal, Result};

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Ordinary binomial coefficient; zero outside `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `C(n, 2)` for possibly negative `n`, as used in grading shifts.
pub fn choose2(n: i64) -> i64 {
    n * (n - 1) / 2
}

/// Laurent polynomial in `q` with integer coefficients.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentQ {
    coeffs: BTreeMap<i64, BigInt>,
}

impl LaurentQ {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 1)
    }

    /// `c q^e`.
    pub fn monomial(e: i64, c: impl Into<BigInt>) -> Self {
        let mut out = Self::zero();
        out.add_term(e, c.into());
        out
    }

    pub fn q() -> Self {
        Self::monomial(1, 1)
    }

    pub fn qpow(e: i64) -> Self {
        Self::monomial(e, 1)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(0, c)
    }

    /// `q - q^{-1}`.
    pub fn q_minus_qinv() -> Self {
        let mut out = Self::q();
        out.add_term(-1, BigInt::from(-1));
        out
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, BigInt)>>(terms: I) -> Self {
        let mut out = Self::zero();
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    pub fn add_term(&mut self, e: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(e).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        self.coeffs.get(&e).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// The involution `q -> q^{-1}`.
    pub fn bar(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    /// Value at `q = 1`.
    pub fn eval1(&self) -> BigInt {
        self.coeffs.values().sum()
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    /// Multiply by `q^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Part with strictly positive exponents.
    pub fn positive_part(&self) -> Self {
        Self {
            coeffs: self.coeffs.range(1..).map(|(e, c)| (*e, c.clone())).collect(),
        }
    }

    pub fn is_bar_invariant(&self) -> bool {
        *self == self.bar()
    }

    pub fn has_nonnegative_coeffs(&self) -> bool {
        self.coeffs.values().all(|c| !c.is_negative())
    }

    /// Exact division; fails if `other` does not divide `self`.
    pub fn div_exact(&self, other: &LaurentQ) -> Result<LaurentQ> {
        let (Some(blo), Some(bhi)) = (other.min_degree(), other.max_degree()) else {
            return internal("division by zero Laurent polynomial");
        };
        let Some(alo) = self.min_degree() else {
            return Ok(Self::zero());
        };
        let lead = other.coeff(bhi);
        let floor = alo - blo;
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some(top) = rem.max_degree() {
            let e = top - bhi;
            let c = rem.coeff(top);
            let (qc, r) = c.div_rem(&lead);
            if e < floor || !r.is_zero() {
                return internal("inexact Laurent division");
            }
            let term = Self::monomial(e, qc);
            rem = &rem - &(&term * other);
            quot += &term;
        }
        Ok(quot)
    }
}

impl fmt::Debug for LaurentQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LaurentQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter().rev() {
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            match (*e, abs.is_one()) {
                (0, _) => write!(f, "{abs}")?,
                (1, true) => write!(f, "q")?,
                (1, false) => write!(f, "{abs}q")?,
                (e, true) => write!(f, "q^{e}")?,
                (e, false) => write!(f, "{abs}q^{e}")?,
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a LaurentQ> for &LaurentQ {
    type Output = LaurentQ;
    fn add(self, rhs: &'a LaurentQ) -> LaurentQ {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for LaurentQ {
    type Output = LaurentQ;
    fn add(mut self, rhs: LaurentQ) -> LaurentQ {
        self += &rhs;
        self
    }
}

impl<'a> AddAssign<&'a LaurentQ> for LaurentQ {
    fn add_assign(&mut self, rhs: &'a LaurentQ) {
        for (e, c) in &rhs.coeffs {
            self.add_term(*e, c.clone());
        }
    }
}

impl<'a> SubAssign<&'a LaurentQ> for LaurentQ {
    fn sub_assign(&mut self, rhs: &'a LaurentQ) {
        for (e, c) in &rhs.coeffs {
            self.add_term(*e, -c.clone());
        }
    }
}

impl<'a> Sub<&'a LaurentQ> for &LaurentQ {
    type Output = LaurentQ;
    fn sub(self, rhs: &'a LaurentQ) -> LaurentQ {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for LaurentQ {
    type Output = LaurentQ;
    fn sub(mut self, rhs: LaurentQ) -> LaurentQ {
        self -= &rhs;
        self
    }
}

impl Neg for &LaurentQ {
    type Output = LaurentQ;
    fn neg(self) -> LaurentQ {
        LaurentQ {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

impl Neg for LaurentQ {
    type Output = LaurentQ;
    fn neg(self) -> LaurentQ {
        -&self
    }
}

impl<'a> Mul<&'a LaurentQ> for &LaurentQ {
    type Output = LaurentQ;
    fn mul(self, rhs: &'a LaurentQ) -> LaurentQ {
        let mut out = LaurentQ::zero();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &rhs.coeffs {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Mul for LaurentQ {
    type Output = LaurentQ;
    fn mul(self, rhs: LaurentQ) -> LaurentQ {
        &self * &rhs
    }
}

#[derive(Serialize, Deserialize)]
struct LaurentRepr {
    coeffs: BTreeMap<String, String>,
}

impl LaurentQ {
    /// Map from exponent strings to coefficient strings, used by JSON output.
    pub fn to_string_map(&self) -> BTreeMap<String, String> {
        self.coeffs
            .iter()
            .map(|(e, c)| (e.to_string(), c.to_string()))
            .collect()
    }

    pub fn from_string_map(map: &BTreeMap<String, String>) -> std::result::Result<Self, String> {
        let mut out = Self::zero();
        for (e, c) in map {
            let e: i64 = e.parse().map_err(|_| format!("bad exponent {e:?}"))?;
            let c: BigInt = c.parse().map_err(|_| format!("bad coefficient {c:?}"))?;
            out.add_term(e, c);
        }
        Ok(out)
    }

    /// JSON map ordered by numeric exponent, descending.
    pub fn to_json_value(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (e, c) in self.coeffs.iter() {
            map.insert(e.to_string(), serde_json::Value::String(c.to_string()));
        }
        serde_json::Value::Object(map)
    }
}

impl Serialize for LaurentQ {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LaurentRepr {
            coeffs: self.to_string_map(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentQ {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = LaurentRepr::deserialize(d)?;
        LaurentQ::from_string_map(&repr.coeffs).map_err(D::Error::custom)
    }
}

/// Quantum integer `[n] = q^{n-1} + q^{n-3} + ... + q^{1-n}`.
pub fn qint(n: u64) -> LaurentQ {
    let n = n as i64;
    LaurentQ::from_terms((0..n).map(|k| (n - 1 - 2 * k, BigInt::one())))
}

pub fn qfact(n: u64) -> LaurentQ {
    (1..=n).fold(LaurentQ::one(), |acc, k| &acc * &qint(k))
}

/// Quantum binomial `[n]! / ([r]! [n-r]!)`; zero outside `0 <= r <= n`.
pub fn qbinom(n: i64, r: i64) -> LaurentQ {
    if n < 0 || r < 0 || r > n {
        return LaurentQ::zero();
    }
    let num = qfact(n as u64);
    let den = &qfact(r as u64) * &qfact((n - r) as u64);
    num.div_exact(&den)
        .expect("quantum factorials divide exactly")
}

/// A polynomial variable: `X(i)` is `x_i`, `Y(j)` is `y_j` (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    X(usize),
    Y(usize),
}

/// Polynomial in `x_1..x_m, y_1..y_n` with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    m: usize,
    n: usize,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl MultiPoly {
    pub fn zero(m: usize, n: usize) -> Self {
        Self {
            m,
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(m: usize, n: usize, c: BigRational) -> Self {
        let mut out = Self::zero(m, n);
        out.add_term(vec![0; m + n], c);
        out
    }

    pub fn one(m: usize, n: usize) -> Self {
        Self::constant(m, n, BigRational::one())
    }

    pub fn var(m: usize, n: usize, v: Var) -> Self {
        let mut exps = vec![0; m + n];
        exps[Self::slot_of(m, n, v)] = 1;
        let mut out = Self::zero(m, n);
        out.add_term(exps, BigRational::one());
        out
    }

    fn slot_of(m: usize, n: usize, v: Var) -> usize {
        match v {
            Var::X(i) => {
                assert!(i >= 1 && i <= m, "x_{i} out of range");
                i - 1
            }
            Var::Y(j) => {
                assert!(j >= 1 && j <= n, "y_{j} out of range");
                m + j - 1
            }
        }
    }

    pub fn slot(&self, v: Var) -> usize {
        Self::slot_of(self.m, self.n, v)
    }

    pub fn nvars(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: BigRational) {
        debug_assert_eq!(exps.len(), self.m + self.n);
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(exps.clone()).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigRational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero(self.m, self.n);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.m, self.n);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Partial derivative with respect to `v`.
    pub fn partial(&self, v: Var) -> Self {
        let s = self.slot(v);
        let mut out = Self::zero(self.m, self.n);
        for (e, c) in &self.terms {
            if e[s] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[s] -= 1;
            out.add_term(e2, c * BigRational::from_integer(BigInt::from(e[s])));
        }
        out
    }

    /// Substitute the polynomial `g` for the variable `v`.
    pub fn subst(&self, v: Var, g: &MultiPoly) -> Self {
        let s = self.slot(v);
        let mut powers: Vec<MultiPoly> = vec![Self::one(self.m, self.n)];
        let mut out = Self::zero(self.m, self.n);
        for (e, c) in &self.terms {
            let k = e[s] as usize;
            while powers.len() <= k {
                let next = &powers[powers.len() - 1] * g;
                powers.push(next);
            }
            let mut rest = e.clone();
            rest[s] = 0;
            let mut mono = Self::zero(self.m, self.n);
            mono.add_term(rest, c.clone());
            out = &out + &(&mono * &powers[k]);
        }
        out
    }

    /// Exchange two variables.
    pub fn swap_vars(&self, a: Var, b: Var) -> Self {
        let (sa, sb) = (self.slot(a), self.slot(b));
        let mut out = Self::zero(self.m, self.n);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2.swap(sa, sb);
            out.add_term(e2, c.clone());
        }
        out
    }
}

impl<'a> Add<&'a MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &'a MultiPoly) -> MultiPoly {
        assert_eq!((self.m, self.n), (rhs.m, rhs.n));
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &'a MultiPoly) -> MultiPoly {
        self + &(-rhs)
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-BigRational::one())
    }
}

impl<'a> Mul<&'a MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &'a MultiPoly) -> MultiPoly {
        assert_eq!((self.m, self.n), (rhs.m, rhs.n));
        let mut out = MultiPoly::zero(self.m, self.n);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exponents: Vec<u32>,
    coeff: String,
}

impl MultiPoly {
    pub fn to_json_value(&self) -> serde_json::Value {
        let terms: Vec<TermRepr> = self
            .terms
            .iter()
            .map(|(e, c)| TermRepr {
                exponents: e.clone(),
                coeff: c.to_string(),
            })
            .collect();
        serde_json::to_value(terms).expect("plain data serializes")
    }

    pub fn from_json_value(m: usize, n: usize, v: &serde_json::Value) -> std::result::Result<Self, String> {
        let terms: Vec<TermRepr> = serde_json::from_value(v.clone()).map_err(|e| e.to_string())?;
        let mut out = Self::zero(m, n);
        for t in terms {
            if t.exponents.len() != m + n {
                return Err("exponent vector length mismatch".into());
            }
            let c: BigRational = t.coeff.parse().map_err(|_| format!("bad coefficient {:?}", t.coeff))?;
            out.add_term(t.exponents, c);
        }
        Ok(out)
    }
}
