//! Divided-power polynomial algebras `ℤ⟨ϑ, x₁, …, xₙ⟩`.
//!
//! A monomial `ϑ^[N₀] x₁^[N₁] ⋯ xₙ^[Nₙ]` is stored by its exponent vector
//! `(N₀, …, Nₙ)`; variable `0` is always `ϑ`. Products follow
//! `x^[a] x^[b] = C(a+b, a) x^[a+b]` in each variable independently, which
//! makes `x^[N] ↦ xᴺ/N!` an injective ring morphism into `ℚ[x₀, …, xₙ]`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ordinal::OrdinalMap;

pub type Exps = Vec<u32>;

/// `C(a+b, a)`.
pub fn binomial_sum(a: u32, b: u32) -> BigInt {
    let n = (a + b) as u128;
    let k = a.min(b) as u128;
    if n <= 120 {
        let mut acc: u128 = 1;
        for i in 0..k {
            acc = acc * (n - i) / (i + 1);
        }
        BigInt::from(acc)
    } else {
        num_integer::binomial(BigInt::from(n), BigInt::from(k))
    }
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

fn factorial_product(exps: &[u32]) -> BigInt {
    exps.iter().fold(BigInt::one(), |acc, &e| acc * factorial(e))
}

/// An element of `ℤ⟨ϑ, x₁, …, xₙ⟩`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DividedPowerPoly {
    num_vars: usize,
    terms: BTreeMap<Exps, BigInt>,
}

impl DividedPowerPoly {
    pub fn zero(num_vars: usize) -> Self {
        DividedPowerPoly { num_vars, terms: BTreeMap::new() }
    }

    pub fn one(num_vars: usize) -> Self {
        Self::constant(num_vars, BigInt::one())
    }

    pub fn constant(num_vars: usize, c: BigInt) -> Self {
        Self::monomial(num_vars, vec![0; num_vars + 1], c)
    }

    pub fn monomial(num_vars: usize, exps: Exps, coef: BigInt) -> Self {
        assert_eq!(exps.len(), num_vars + 1, "exponent vector length");
        let mut terms = BTreeMap::new();
        if !coef.is_zero() {
            terms.insert(exps, coef);
        }
        DividedPowerPoly { num_vars, terms }
    }

    /// `x_i^[k]` (with `x₀ = ϑ`).
    pub fn var_power(num_vars: usize, i: usize, k: u32) -> Self {
        let mut e = vec![0; num_vars + 1];
        e[i] = k;
        Self::monomial(num_vars, e, BigInt::one())
    }

    pub fn var(num_vars: usize, i: usize) -> Self {
        Self::var_power(num_vars, i, 1)
    }

    pub fn theta_power(num_vars: usize, k: u32) -> Self {
        Self::var_power(num_vars, 0, k)
    }

    pub fn from_terms<I: IntoIterator<Item = (Exps, BigInt)>>(num_vars: usize, terms: I) -> Result<Self> {
        let mut p = Self::zero(num_vars);
        for (e, c) in terms {
            if e.len() != num_vars + 1 {
                return Err(Error::VariableCount(num_vars + 1, e.len()));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub(crate) fn add_term(&mut self, exps: Exps, coef: BigInt) {
        if coef.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coef);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coef;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> &BTreeMap<Exps, BigInt> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when only `ϑ` occurs, i.e. the polynomial is a `ℤ⟨ϑ⟩` scalar.
    pub fn is_theta_scalar(&self) -> bool {
        self.terms.keys().all(|e| e[1..].iter().all(|&k| k == 0))
    }

    pub fn contains_var(&self, i: usize) -> bool {
        self.terms.keys().any(|e| e[i] > 0)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.num_vars);
        }
        DividedPowerPoly {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.num_vars != other.num_vars {
            return Err(Error::VariableCount(self.num_vars, other.num_vars));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Self::zero(self.num_vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let mut coef = c1 * c2;
                let mut e = Vec::with_capacity(e1.len());
                for (a, b) in e1.iter().zip(e2) {
                    if *a > 0 && *b > 0 {
                        coef *= binomial_sum(*a, *b);
                    }
                    e.push(a + b);
                }
                out.add_term(e, coef);
            }
        }
        Ok(out)
    }

    /// Pullback along `α : [m] -> [n]`: `x_i^[N] ↦ x_{min{j | α(j) ≥ i}}^[N]`
    /// when `α(m) ≥ i`, and `0` otherwise.
    pub fn pullback(&self, alpha: &OrdinalMap) -> Result<Self> {
        if alpha.target_dim() != self.num_vars {
            return Err(Error::DimensionMismatch { expected: self.num_vars, found: alpha.target_dim() });
        }
        let m = alpha.source_dim();
        let targets = variable_targets(alpha);
        let mut out = Self::zero(m);
        'terms: for (e, c) in &self.terms {
            let mut ne = vec![0u32; m + 1];
            let mut coef = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                match targets[i] {
                    None => continue 'terms,
                    Some(j) => {
                        if ne[j] > 0 {
                            coef *= binomial_sum(ne[j], k);
                        }
                        ne[j] += k;
                    }
                }
            }
            out.add_term(ne, coef);
        }
        Ok(out)
    }

    /// `∂/∂x_i`, sending `x_i^[N]` to `x_i^[N-1]`.
    pub fn partial(&self, i: usize) -> Result<Self> {
        if i == 0 {
            return Err(Error::ThetaVariable("differentiated"));
        }
        if i > self.num_vars {
            return Err(Error::VariableOutOfRange { index: i, num_vars: self.num_vars });
        }
        let mut out = Self::zero(self.num_vars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut ne = e.clone();
                ne[i] -= 1;
                out.add_term(ne, c.clone());
            }
        }
        Ok(out)
    }

    /// The canonical embedding `x^[N] ↦ xᴺ/N!` into `ℚ[x₀, …, xₙ]`.
    pub fn embed_rational(&self) -> RationalPoly {
        let mut out = RationalPoly::zero(self.num_vars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), BigRational::new(c.clone(), factorial_product(e)));
        }
        out
    }

    /// Field realization `ϑ^[N] ↦ 1/N!`, `x_i^[N] ↦ x_iᴺ/N!`.
    pub fn realize(&self) -> RationalPoly {
        let mut out = RationalPoly::zero(self.num_vars);
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            ne[0] = 0;
            out.add_term(ne, BigRational::new(c.clone(), factorial_product(e)));
        }
        out
    }

    pub fn coeff_change(&self, target: CoeffTarget) -> Result<CoeffImage> {
        match target {
            CoeffTarget::RationalDivided => {
                let mut out = DividedRationalPoly::zero(self.num_vars);
                for (e, c) in &self.terms {
                    let mut ne = e.clone();
                    ne[0] = 0;
                    out.add_term(ne, BigRational::new(c.clone(), factorial(e[0])));
                }
                Ok(CoeffImage::DividedRational(out))
            }
            CoeffTarget::LocalizedAtPrime { p } => {
                if !is_prime(p) {
                    return Err(Error::NotPrime(p));
                }
                let pb = BigInt::from(p);
                let mut out = DividedRationalPoly::zero(self.num_vars);
                for (e, c) in &self.terms {
                    let mut ne = e.clone();
                    ne[0] = 0;
                    out.add_term(ne, BigRational::new(c * pb.pow(e[0]), factorial(e[0])));
                }
                for c in out.terms.values() {
                    if c.denom().is_multiple_of(&pb) {
                        return Err(Error::NotPIntegral { p, coef: c.to_string() });
                    }
                }
                Ok(CoeffImage::DividedRational(out))
            }
            CoeffTarget::DropTheta => {
                let mut out = Self::zero(self.num_vars);
                for (e, c) in &self.terms {
                    if e[0] == 0 {
                        out.add_term(e.clone(), c.clone());
                    }
                }
                Ok(CoeffImage::Divided(out))
            }
            CoeffTarget::FieldRealization => Ok(CoeffImage::Rational(self.realize())),
        }
    }

    /// Total divided-power degree of each monomial, ignoring `ϑ`.
    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|e| e[1..].iter().sum()).max().unwrap_or(0)
    }

    /// Text form such as `3*theta^[2]*x1^[3] - x2 + 1`.
    pub fn to_text(&self) -> String {
        format_terms(self.terms.iter().rev().map(|(e, c)| (e, BigRational::from(c.clone()))), true)
    }

    /// Parses the text form. Factors are integers, `theta` (or `x0`), and
    /// `x<i>` optionally raised to a divided power `^[N]` or an ordinary power
    /// `^N`. When `num_vars` is `None` the largest index present is used.
    pub fn parse(s: &str, num_vars: Option<usize>) -> Result<Self> {
        let terms = parse_terms(s)?;
        let max_idx = terms.iter().flat_map(|(_, f)| f.iter().map(|x| x.0)).max().unwrap_or(0);
        let n = match num_vars {
            Some(n) if n < max_idx => {
                return Err(Error::Parse(format!("variable x{max_idx} exceeds {n} variables")));
            }
            Some(n) => n,
            None => max_idx,
        };
        let mut out = Self::zero(n);
        for (coef, factors) in terms {
            let mut t = Self::constant(n, coef);
            for (idx, power, divided) in factors {
                let f = if divided {
                    Self::var_power(n, idx, power)
                } else {
                    Self::var_power(n, idx, power).scale(&factorial(power))
                };
                t = t.try_mul(&f)?;
            }
            out = out.try_add(&t)?;
        }
        Ok(out)
    }
}

/// For `α : [m] -> [n]`, the target variable of each `x_i`, `i = 0..=n`;
/// `None` means `x_i ↦ 0`.
pub(crate) fn variable_targets(alpha: &OrdinalMap) -> Vec<Option<usize>> {
    let m = alpha.source_dim();
    (0..=alpha.target_dim())
        .map(|i| if alpha.apply(m) >= i { (0..=m).find(|&j| alpha.apply(j) >= i) } else { None })
        .collect()
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl Neg for &DividedPowerPoly {
    type Output = DividedPowerPoly;
    fn neg(self) -> DividedPowerPoly {
        DividedPowerPoly {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Add for &DividedPowerPoly {
    type Output = DividedPowerPoly;
    fn add(self, rhs: Self) -> DividedPowerPoly {
        self.try_add(rhs).expect("variable count mismatch")
    }
}

impl Sub for &DividedPowerPoly {
    type Output = DividedPowerPoly;
    fn sub(self, rhs: Self) -> DividedPowerPoly {
        self.try_sub(rhs).expect("variable count mismatch")
    }
}

impl Mul for &DividedPowerPoly {
    type Output = DividedPowerPoly;
    fn mul(self, rhs: Self) -> DividedPowerPoly {
        self.try_mul(rhs).expect("variable count mismatch")
    }
}

impl fmt::Display for DividedPowerPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exps: Vec<u32>,
    coef: String,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    n: usize,
    terms: Vec<TermRepr>,
}

impl Serialize for DividedPowerPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr {
            n: self.num_vars,
            terms: self.terms.iter().map(|(e, c)| TermRepr { exps: e.clone(), coef: c.to_string() }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for DividedPowerPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = PolyRepr::deserialize(d)?;
        let terms = r
            .terms
            .into_iter()
            .map(|t| {
                let c: BigInt = t.coef.parse().map_err(|_| D::Error::custom(format!("bad integer {:?}", t.coef)))?;
                Ok((t.exps, c))
            })
            .collect::<std::result::Result<Vec<_>, D::Error>>()?;
        DividedPowerPoly::from_terms(r.n, terms).map_err(D::Error::custom)
    }
}

/// Targets of the coefficient-change morphisms out of `ℤ⟨ϑ, x₁, …, xₙ⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum CoeffTarget {
    /// `ϑ^[N] ↦ 1/N!` into `ℚ⟨x₁, …, xₙ⟩`.
    RationalDivided,
    /// `ϑ^[N] ↦ pᴺ/N!` into `ℤ₍ₚ₎⟨x₁, …, xₙ⟩`.
    LocalizedAtPrime { p: u64 },
    /// `ϑ^[N] ↦ 0` for `N > 0`.
    DropTheta,
    /// `ϑ^[N] ↦ 1/N!`, `x^[N] ↦ xᴺ/N!` into `ℚ[x₁, …, xₙ]`.
    FieldRealization,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoeffImage {
    Divided(DividedPowerPoly),
    DividedRational(DividedRationalPoly),
    Rational(RationalPoly),
}

impl CoeffImage {
    pub fn to_text(&self) -> String {
        match self {
            CoeffImage::Divided(p) => p.to_text(),
            CoeffImage::DividedRational(p) => p.to_text(),
            CoeffImage::Rational(p) => p.to_text(),
        }
    }
}

/// Divided-power polynomial with rational coefficients (`ℚ⟨x⟩` or `ℤ₍ₚ₎⟨x⟩`).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct DividedRationalPoly {
    num_vars: usize,
    terms: BTreeMap<Exps, BigRational>,
}

impl DividedRationalPoly {
    pub fn zero(num_vars: usize) -> Self {
        DividedRationalPoly { num_vars, terms: BTreeMap::new() }
    }

    fn add_term(&mut self, e: Exps, c: BigRational) {
        add_rational_term(&mut self.terms, e, c);
    }

    pub fn terms(&self) -> &BTreeMap<Exps, BigRational> {
        &self.terms
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn to_text(&self) -> String {
        format_terms(self.terms.iter().rev().map(|(e, c)| (e, c.clone())), true)
    }
}

fn add_rational_term(terms: &mut BTreeMap<Exps, BigRational>, e: Exps, c: BigRational) {
    if c.is_zero() {
        return;
    }
    match terms.entry(e) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

/// An ordinary polynomial in `ℚ[x₀, …, xₙ]`; used as the classical oracle and
/// as the target of field realization (where `x₀` never occurs).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RationalPoly {
    num_vars: usize,
    terms: BTreeMap<Exps, BigRational>,
}

impl RationalPoly {
    pub fn zero(num_vars: usize) -> Self {
        RationalPoly { num_vars, terms: BTreeMap::new() }
    }

    pub fn constant(num_vars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(num_vars);
        p.add_term(vec![0; num_vars + 1], c);
        p
    }

    pub fn var(num_vars: usize, i: usize) -> Self {
        let mut e = vec![0; num_vars + 1];
        e[i] = 1;
        let mut p = Self::zero(num_vars);
        p.add_term(e, BigRational::one());
        p
    }

    pub fn add_term(&mut self, e: Exps, c: BigRational) {
        add_rational_term(&mut self.terms, e, c);
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> &BTreeMap<Exps, BigRational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut out = Self::zero(self.num_vars);
        for (e, k) in &self.terms {
            out.add_term(e.clone(), k * c);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.num_vars, other.num_vars);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.num_vars, other.num_vars);
        let mut out = Self::zero(self.num_vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(e1.iter().zip(e2).map(|(a, b)| a + b).collect(), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::constant(self.num_vars, BigRational::one());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.num_vars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut ne = e.clone();
                ne[i] -= 1;
                out.add_term(ne, c * BigInt::from(e[i]));
            }
        }
        out
    }

    /// Antiderivative in `x_i` vanishing at `x_i = 0`.
    pub fn antiderivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.num_vars);
        for (e, c) in &self.terms {
            let mut ne = e.clone();
            ne[i] += 1;
            let k = BigInt::from(ne[i]);
            out.add_term(ne, c / k);
        }
        out
    }

    /// Substitutes the polynomial `value` for `x_i`.
    pub fn substitute(&self, i: usize, value: &RationalPoly) -> Self {
        let mut out = Self::zero(self.num_vars);
        for (e, c) in &self.terms {
            let mut rest = e.clone();
            let k = rest[i];
            rest[i] = 0;
            let mut mono = Self::zero(self.num_vars);
            mono.add_term(rest, c.clone());
            out = out.add(&mono.mul(&value.pow(k)));
        }
        out
    }

    /// `∫_lo^hi p dx_i` by antidifferentiation and substitution.
    pub fn integrate(&self, i: usize, lo: &RationalPoly, hi: &RationalPoly) -> Self {
        let anti = self.antiderivative(i);
        anti.substitute(i, hi).sub(&anti.substitute(i, lo))
    }

    pub fn to_text(&self) -> String {
        format_terms(self.terms.iter().rev().map(|(e, c)| (e, c.clone())), false)
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Serialize for RationalPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr {
            n: self.num_vars,
            terms: self.terms.iter().map(|(e, c)| TermRepr { exps: e.clone(), coef: rational_string(c) }).collect(),
        }
        .serialize(s)
    }
}

pub fn rational_string(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
            let b: BigInt = b.trim().parse().map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
            if b.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            Ok(BigRational::new(a, b))
        }
        None => Ok(BigRational::from(s.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad rational {s:?}")))?)),
    }
}

fn format_terms<'a, I: Iterator<Item = (&'a Exps, BigRational)>>(terms: I, divided: bool) -> String {
    let mut out = String::new();
    for (e, c) in terms {
        let neg = c.is_negative();
        let a = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mut factors: Vec<String> = Vec::new();
        for (i, &k) in e.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let name = if i == 0 && divided { "theta".to_string() } else { format!("x{i}") };
            factors.push(match (k, divided) {
                (1, _) => name,
                (k, true) => format!("{name}^[{k}]"),
                (k, false) => format!("{name}^{k}"),
            });
        }
        let coef = rational_string(&a);
        if factors.is_empty() {
            out.push_str(&coef);
        } else {
            if !a.is_one() {
                out.push_str(&coef);
                out.push('*');
            }
            out.push_str(&factors.join("*"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

type ParsedTerm = (BigInt, Vec<(usize, u32, bool)>);

fn parse_terms(s: &str) -> Result<Vec<ParsedTerm>> {
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut terms = Vec::new();
    let mut chunks: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut sign = false;
    let mut depth = 0;
    for ch in cleaned.chars() {
        match ch {
            '[' => {
                depth += 1;
                cur.push(ch);
            }
            ']' => {
                depth -= 1;
                cur.push(ch);
            }
            '+' | '-' if depth == 0 => {
                if !cur.is_empty() {
                    chunks.push((sign, std::mem::take(&mut cur)));
                } else if ch == '-' {
                    sign = !sign;
                    continue;
                }
                sign = ch == '-';
            }
            _ => cur.push(ch),
        }
    }
    if cur.is_empty() {
        return Err(Error::Parse(format!("dangling operator in {s:?}")));
    }
    chunks.push((sign, cur));
    for (neg, chunk) in chunks {
        let mut coef = BigInt::one();
        let mut factors = Vec::new();
        for factor in chunk.split('*') {
            if factor.is_empty() {
                return Err(Error::Parse(format!("empty factor in {chunk:?}")));
            }
            if factor.chars().all(|c| c.is_ascii_digit()) {
                coef *= factor.parse::<BigInt>().unwrap();
                continue;
            }
            let (base, power, divided) = match factor.split_once('^') {
                None => (factor, 1u32, true),
                Some((b, p)) => {
                    if let Some(inner) = p.strip_prefix('[').and_then(|q| q.strip_suffix(']')) {
                        (b, inner.parse().map_err(|_| Error::Parse(format!("bad exponent {p:?}")))?, true)
                    } else {
                        (b, p.parse().map_err(|_| Error::Parse(format!("bad exponent {p:?}")))?, false)
                    }
                }
            };
            let idx = match base {
                "theta" | "t" | "ϑ" | "θ" => 0,
                b if b.starts_with('x') => {
                    b[1..].parse::<usize>().map_err(|_| Error::Parse(format!("bad variable {b:?}")))?
                }
                b => return Err(Error::Parse(format!("unknown factor {b:?}"))),
            };
            factors.push((idx, power, divided));
        }
        if neg {
            coef = -coef;
        }
        terms.push((coef, factors));
    }
    Ok(terms)
}

/// Converts a small rational to `f64` for display purposes only.
pub fn rational_to_f64(c: &BigRational) -> f64 {
    c.numer().to_f64().unwrap_or(f64::NAN) / c.denom().to_f64().unwrap_or(f64::NAN)
}
