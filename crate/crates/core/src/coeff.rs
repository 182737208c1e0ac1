//! The universal coefficient ring and univariate rational functions over it.
//!
//! Coefficients live in `Z[s, s^-1]` where the distinguished class of the
//! affine line is `L = s^2`. Keeping the half power of `L` around makes the
//! Serre (virtual Hodge) specialization representable: odd cohomology
//! contributes odd powers of `s`. All formulas produced by the engine itself
//! use only even powers.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// Exact Laurent polynomial in `s` with `s^2 = L`.
///
/// Canonical form: no stored coefficient is zero.
#[derive(Clone, PartialEq, Eq, Default, PartialOrd, Ord)]
pub struct MotCoeff {
    terms: BTreeMap<i64, BigInt>,
}

impl MotCoeff {
    pub fn zero() -> Self {
        MotCoeff { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn int(n: i64) -> Self {
        Self::big(BigInt::from(n))
    }

    pub fn big(n: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !n.is_zero() {
            terms.insert(0, n);
        }
        MotCoeff { terms }
    }

    /// `c * s^k`.
    pub fn s_pow(k: i64) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(k, BigInt::one());
        MotCoeff { terms }
    }

    /// The Tate class `L = s^2`.
    pub fn tate() -> Self {
        Self::s_pow(2)
    }

    /// `L^k`, allowing negative `k`.
    pub fn tate_pow(k: i64) -> Self {
        Self::s_pow(2 * k)
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, BigInt)>>(it: I) -> Self {
        let mut c = Self::zero();
        for (k, v) in it {
            c.add_term(k, v);
        }
        c
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> + '_ {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn coeff(&self, k: i64) -> BigInt {
        self.terms.get(&k).cloned().unwrap_or_else(BigInt::zero)
    }

    /// True iff only even `s`-powers occur (integral powers of `L`).
    pub fn even_only(&self) -> bool {
        self.terms.keys().all(|k| k % 2 == 0)
    }

    /// True iff no stored coefficient is negative.
    pub fn all_nonnegative(&self) -> bool {
        self.terms.values().all(|v| !v.is_negative())
    }

    /// True iff `self` is `c * s^k` with `c` a unit of `Z`.
    pub fn is_unit_monomial(&self) -> bool {
        self.terms.len() == 1 && self.terms.values().next().is_some_and(|c| c.abs().is_one())
    }

    pub fn add_term(&mut self, k: i64, v: BigInt) {
        if v.is_zero() {
            return;
        }
        let entry = self.terms.entry(k).or_insert_with(BigInt::zero);
        *entry += v;
        if entry.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn mul_s_pow(&self, k: i64) -> Self {
        MotCoeff {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Sum of all coefficients, i.e. the value at `s := 1` (compactly
    /// supported Euler characteristic).
    pub fn euler(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Substitute `L := v` for an integer `v`. Requires even `s`-powers.
    /// Negative powers of `L` must divide out exactly.
    pub fn eval_tate(&self, v: &BigInt) -> Result<BigInt> {
        if !self.even_only() {
            return Err(Error::NonIntegralTatePower);
        }
        let min_pow = self.terms.keys().next().map(|k| k / 2).unwrap_or(0);
        let shift = (-min_pow).max(0) as u32;
        if shift > 0 && v.is_zero() {
            return Err(Error::NonIntegralPointCount);
        }
        let mut acc = BigInt::zero();
        for (k, c) in &self.terms {
            let e = (k / 2 + shift as i64) as u32;
            acc += c * v.pow(e);
        }
        if shift == 0 {
            return Ok(acc);
        }
        let d = v.pow(shift);
        let (q, r) = num_integer_div_rem(&acc, &d);
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::NonIntegralPointCount)
        }
    }

    /// Apply a specialization map.
    pub fn specialize(&self, mode: &SpecMode) -> Result<Specialized> {
        match mode {
            SpecMode::Euler => Ok(Specialized::Coeff(Self::big(self.euler()))),
            SpecMode::Serre | SpecMode::Generic => Ok(Specialized::Coeff(self.clone())),
            SpecMode::PointCount(q) => {
                if !is_prime(*q) {
                    return Err(Error::NotPrime(*q));
                }
                Ok(Specialized::Integer(self.eval_tate(&BigInt::from(*q))?))
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("MotCoeff serializes")
    }
}

fn num_integer_div_rem(a: &BigInt, b: &BigInt) -> (BigInt, BigInt) {
    (a / b, a % b)
}

pub(crate) fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Add for &MotCoeff {
    type Output = MotCoeff;
    fn add(self, rhs: &MotCoeff) -> MotCoeff {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, v.clone());
        }
        out
    }
}

impl Sub for &MotCoeff {
    type Output = MotCoeff;
    fn sub(self, rhs: &MotCoeff) -> MotCoeff {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, -v.clone());
        }
        out
    }
}

impl Neg for &MotCoeff {
    type Output = MotCoeff;
    fn neg(self) -> MotCoeff {
        MotCoeff {
            terms: self.terms.iter().map(|(k, v)| (*k, -v.clone())).collect(),
        }
    }
}

impl Mul for &MotCoeff {
    type Output = MotCoeff;
    fn mul(self, rhs: &MotCoeff) -> MotCoeff {
        let mut out = MotCoeff::zero();
        for (ka, va) in &self.terms {
            for (kb, vb) in &rhs.terms {
                out.add_term(ka + kb, va * vb);
            }
        }
        out
    }
}

impl fmt::Debug for MotCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MotCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.terms.iter().rev() {
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let var = match *k {
                0 => String::new(),
                2 => "L".to_string(),
                k if k % 2 == 0 => format!("L^{}", k / 2),
                1 => "s".to_string(),
                k => format!("s^{k}"),
            };
            if var.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{var}")?;
            } else {
                write!(f, "{mag}*{var}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for MotCoeff {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(self.terms.len()))?;
        for (k, v) in &self.terms {
            map.serialize_entry(&k.to_string(), &v.to_string())?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for MotCoeff {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: BTreeMap<String, String> = BTreeMap::deserialize(d)?;
        let mut out = MotCoeff::zero();
        for (k, v) in raw {
            let e: i64 = k.parse().map_err(D::Error::custom)?;
            let c: BigInt = v.parse().map_err(D::Error::custom)?;
            out.add_term(e, c);
        }
        Ok(out)
    }
}

/// Specialization maps of the coefficient ring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpecMode {
    Euler,
    PointCount(u64),
    Serre,
    Generic,
}

/// Result of a specialization: a ring element or a plain integer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Specialized {
    Coeff(MotCoeff),
    Integer(BigInt),
}

/// Dense polynomial in `u` over `MotCoeff`, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PolyU {
    coeffs: Vec<MotCoeff>,
}

impl PolyU {
    pub fn zero() -> Self {
        PolyU { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Self::constant(MotCoeff::one())
    }

    pub fn constant(c: MotCoeff) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn monomial(c: MotCoeff, k: usize) -> Self {
        let mut v = vec![MotCoeff::zero(); k + 1];
        v[k] = c;
        Self::from_coeffs(v)
    }

    pub fn from_coeffs(coeffs: Vec<MotCoeff>) -> Self {
        let mut p = PolyU { coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn deg(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn coeff(&self, k: usize) -> MotCoeff {
        self.coeffs.get(k).cloned().unwrap_or_else(MotCoeff::zero)
    }

    pub fn coeffs(&self) -> &[MotCoeff] {
        &self.coeffs
    }

    /// Index of the lowest nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn shift_down(&self, k: usize) -> PolyU {
        PolyU::from_coeffs(self.coeffs.iter().skip(k).cloned().collect())
    }

    pub fn scale(&self, c: &MotCoeff) -> PolyU {
        PolyU::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

}

impl Add for &PolyU {
    type Output = PolyU;
    fn add(self, rhs: &PolyU) -> PolyU {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        PolyU::from_coeffs((0..n).map(|i| &self.coeff(i) + &rhs.coeff(i)).collect())
    }
}

impl Sub for &PolyU {
    type Output = PolyU;
    fn sub(self, rhs: &PolyU) -> PolyU {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        PolyU::from_coeffs((0..n).map(|i| &self.coeff(i) - &rhs.coeff(i)).collect())
    }
}

impl Mul for &PolyU {
    type Output = PolyU;
    fn mul(self, rhs: &PolyU) -> PolyU {
        if self.is_zero() || rhs.is_zero() {
            return PolyU::zero();
        }
        let mut out = vec![MotCoeff::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        PolyU::from_coeffs(out)
    }
}

impl fmt::Display for PolyU {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("({c})"),
                1 => format!("({c})*u"),
                _ => format!("({c})*u^{i}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Univariate rational function `num/den` over `MotCoeff`.
///
/// Normalization: strip the common power of `u`, then if the constant term
/// of the denominator is a unit `±s^k`, rescale so it becomes 1. Otherwise
/// divide numerator and denominator by the integer content of the
/// denominator and shift `s`-powers so the denominator's constant term has
/// lowest `s`-exponent 0 with positive lowest coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatFnU {
    pub num: PolyU,
    pub den: PolyU,
}

impl RatFnU {
    pub fn new(num: PolyU, den: PolyU) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::MalformedInput("zero denominator".into()));
        }
        let mut r = RatFnU { num, den };
        r.normalize();
        Ok(r)
    }

    pub fn from_poly(p: PolyU) -> Self {
        RatFnU { num: p, den: PolyU::one() }
    }

    pub fn one() -> Self {
        Self::from_poly(PolyU::one())
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = PolyU::one();
            return;
        }
        let vn = self.num.valuation().unwrap_or(0);
        let vd = self.den.valuation().unwrap_or(0);
        let k = vn.min(vd);
        if k > 0 {
            self.num = self.num.shift_down(k);
            self.den = self.den.shift_down(k);
        }
        let d0 = self.den.coeff(self.den.valuation().unwrap_or(0));
        if d0.is_unit_monomial() {
            let (e, c) = d0.terms().next().map(|(e, c)| (e, c.clone())).expect("unit");
            let inv = if c.is_negative() {
                -&MotCoeff::s_pow(-e)
            } else {
                MotCoeff::s_pow(-e)
            };
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        } else {
            let content = poly_content(&self.den);
            if !content.is_one() {
                self.num = poly_div_content(&self.num, &content).unwrap_or_else(|| self.num.clone());
                if let Some(d) = poly_div_content(&self.den, &content) {
                    self.den = d;
                }
            }
            let smin = d0.terms().next().map(|(e, _)| e).unwrap_or(0);
            if smin != 0 {
                self.num = self.num.scale(&MotCoeff::s_pow(-smin));
                self.den = self.den.scale(&MotCoeff::s_pow(-smin));
            }
            let lead = self.den.coeff(self.den.valuation().unwrap_or(0));
            if lead.terms().next().is_some_and(|(_, c)| c.is_negative()) {
                self.num = self.num.scale(&MotCoeff::int(-1));
                self.den = self.den.scale(&MotCoeff::int(-1));
            }
        }
    }

    pub fn mul(&self, rhs: &RatFnU) -> RatFnU {
        let mut r = RatFnU {
            num: &self.num * &rhs.num,
            den: &self.den * &rhs.den,
        };
        r.normalize();
        r
    }

    pub fn add(&self, rhs: &RatFnU) -> RatFnU {
        let mut r = RatFnU {
            num: &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            den: &self.den * &rhs.den,
        };
        r.normalize();
        r
    }

    pub fn sub(&self, rhs: &RatFnU) -> RatFnU {
        let mut r = RatFnU {
            num: &(&self.num * &rhs.den) - &(&rhs.num * &self.den),
            den: &self.den * &rhs.den,
        };
        r.normalize();
        r
    }

    /// Cross-multiplied equality.
    pub fn equiv(&self, rhs: &RatFnU) -> bool {
        (&self.num * &rhs.den) == (&rhs.num * &self.den)
    }

    /// Multiply by `c * u^k` where `k` may be negative.
    pub fn mul_monomial(&self, c: &MotCoeff, k: i64) -> RatFnU {
        let mut r = if k >= 0 {
            RatFnU {
                num: &self.num * &PolyU::monomial(c.clone(), k as usize),
                den: self.den.clone(),
            }
        } else {
            RatFnU {
                num: self.num.scale(c),
                den: &self.den * &PolyU::monomial(MotCoeff::one(), (-k) as usize),
            }
        };
        r.normalize();
        r
    }

    /// Substitute `u -> 1/(L u)`.
    pub fn subst_recip_tate(&self) -> RatFnU {
        self.subst_recip_scale(-2)
    }

    /// Substitute `u -> s^k / u` for an `s`-power scale.
    pub fn subst_recip_scale(&self, k: i64) -> RatFnU {
        let cap = self.num.deg().unwrap_or(0).max(self.den.deg().unwrap_or(0));
        let sub = |p: &PolyU| -> PolyU {
            let mut out = vec![MotCoeff::zero(); cap + 1];
            for (i, c) in p.coeffs().iter().enumerate() {
                out[cap - i] = c.mul_s_pow(k * i as i64);
            }
            PolyU::from_coeffs(out)
        };
        let mut r = RatFnU { num: sub(&self.num), den: sub(&self.den) };
        r.normalize();
        r
    }

    /// Series expansion at `u = 0`: the first `n` coefficients.
    /// Requires the denominator's constant term to be a unit.
    pub fn series(&self, n: usize) -> Result<Vec<MotCoeff>> {
        let d0 = self.den.coeff(0);
        if d0.is_zero() {
            return Err(Error::NonExpandable("denominator vanishes at u = 0".into()));
        }
        if !d0.is_unit_monomial() {
            return Err(Error::NonExpandable(
                "denominator constant term is not a unit".into(),
            ));
        }
        let (e, c) = d0.terms().next().map(|(e, c)| (e, c.clone())).expect("unit");
        let inv = if c.is_negative() {
            -&MotCoeff::s_pow(-e)
        } else {
            MotCoeff::s_pow(-e)
        };
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = self.num.coeff(k);
            for j in 1..=k {
                let dj = self.den.coeff(j);
                if dj.is_zero() {
                    continue;
                }
                acc = &acc - &(&dj * &out[k - j]);
            }
            out.push(&acc * &inv);
        }
        Ok(out)
    }
}

impl fmt::Display for RatFnU {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] / [{}]", self.num, self.den)
    }
}

fn poly_content(p: &PolyU) -> BigInt {
    let mut g = BigInt::zero();
    for c in p.coeffs() {
        for (_, v) in c.terms() {
            g = gcd_big(&g, v);
        }
    }
    if g.is_zero() {
        BigInt::one()
    } else {
        g
    }
}

fn gcd_big(a: &BigInt, b: &BigInt) -> BigInt {
    let mut a = a.abs();
    let mut b = b.abs();
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

fn poly_div_content(p: &PolyU, g: &BigInt) -> Option<PolyU> {
    let mut out = Vec::with_capacity(p.coeffs().len());
    for c in p.coeffs() {
        let mut q = MotCoeff::zero();
        for (e, v) in c.terms() {
            if (v % g).is_zero() {
                q.add_term(e, v / g);
            } else {
                return None;
            }
        }
        out.push(q);
    }
    Some(PolyU::from_coeffs(out))
}

/// A smooth projective curve presented by its genus and zeta numerator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveData {
    genus: usize,
    phi: PolyU,
}

impl CurveData {
    pub fn new(genus: usize, phi: PolyU) -> Result<Self> {
        if !phi.coeff(0).is_one() {
            return Err(Error::MalformedInput("zeta numerator must have constant term 1".into()));
        }
        if phi.deg() != Some(2 * genus) {
            return Err(Error::MalformedInput(format!(
                "zeta numerator must have degree {} for genus {}",
                2 * genus,
                genus
            )));
        }
        Ok(CurveData { genus, phi })
    }

    /// The projective line: genus 0, numerator 1.
    pub fn p1() -> Self {
        CurveData { genus: 0, phi: PolyU::one() }
    }

    /// Genus `g` with numerator `(1 - s u)^{2g}`: the split Serre-polynomial
    /// model used by the functional-equation tests.
    pub fn split_serre(genus: usize) -> Self {
        let lin = PolyU::from_coeffs(vec![MotCoeff::one(), -&MotCoeff::s_pow(1)]);
        let mut phi = PolyU::one();
        for _ in 0..2 * genus {
            phi = &phi * &lin;
        }
        CurveData { genus, phi }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn phi(&self) -> &PolyU {
        &self.phi
    }
}

/// Zeta function of a curve: `Phi(u) / ((1-u)(1-Lu))`.
pub fn zeta_from_curve(c: &CurveData) -> RatFnU {
    let one_minus_u = PolyU::from_coeffs(vec![MotCoeff::one(), -&MotCoeff::one()]);
    let one_minus_lu = PolyU::from_coeffs(vec![MotCoeff::one(), -&MotCoeff::tate()]);
    RatFnU::new(c.phi.clone(), &one_minus_u * &one_minus_lu).expect("nonzero denominator")
}

/// Residual of the zeta functional equation:
/// `z(1/(Lu)) - L^{1-g} u^{2-2g} z(u)`, zero iff the equation holds.
pub fn zeta_funceq_residual(z: &RatFnU, genus: i64) -> Result<RatFnU> {
    if z.den.is_zero() {
        return Err(Error::MalformedInput("zero denominator".into()));
    }
    let lhs = z.subst_recip_tate();
    let rhs = z.mul_monomial(&MotCoeff::tate_pow(1 - genus), 2 - 2 * genus);
    Ok(lhs.sub(&rhs))
}

/// Measure of the n-th symmetric product: the `u^n` series coefficient.
pub fn symmetric_product_measure(z: &RatFnU, n: usize) -> Result<MotCoeff> {
    Ok(z.series(n + 1)?.pop().expect("n+1 coefficients"))
}
