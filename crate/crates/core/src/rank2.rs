//! The finite-group rank-two machinery: the quotient-scheme series of the
//! trivial rank-2 bundle on the line, recovery of the subbundle series by
//! zeta division, the finite numerator builder, and the rank-two
//! functional-equation checker that pins the prefactor convention.
//!
//! Coefficients are indexed by the subsheaf degree `a1 <= 0`; the normalized
//! variable is `x = z2/z1`, so the coefficient of `x^k` is the one at
//! `a1 = -k`.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::coeff::{CurveData, MotCoeff, PolyU, RatFnU};
use crate::convention::{Convention, Rank2Variant};
use crate::eisenstein::{funceq_residual_core, FunceqReport};
use crate::rootsys::RootSystem;
use crate::series::{LatticeSeries, Window};
use crate::affine::{AffCoweight, AffWeylElt};
use crate::{Error, Result};

/// Graded coefficient stream of a degree-zero rank-two generating function,
/// with its closed form in `x = z2/z1` when one is known.
#[derive(Clone, Debug)]
pub struct Rank2Series {
    coeffs: BTreeMap<i64, MotCoeff>,
    pub closed: Option<RatFnU>,
}

impl Rank2Series {
    pub fn from_coeffs<I: IntoIterator<Item = (i64, MotCoeff)>>(it: I) -> Result<Self> {
        let mut coeffs = BTreeMap::new();
        for (a1, c) in it {
            if a1 > 0 {
                return Err(Error::MalformedInput(format!(
                    "subsheaf degree a1 = {a1} must be <= 0"
                )));
            }
            if !c.is_zero() {
                coeffs.insert(a1, c);
            }
        }
        Ok(Rank2Series { coeffs, closed: None })
    }

    /// Coefficient at subsheaf degree `a1`.
    pub fn coeff(&self, a1: i64) -> MotCoeff {
        self.coeffs.get(&a1).cloned().unwrap_or_else(MotCoeff::zero)
    }

    /// Coefficients as a power series in `x`: index `k` holds `a1 = -k`.
    pub fn x_series(&self, order: usize) -> Vec<MotCoeff> {
        (0..=order as i64).map(|k| self.coeff(-k)).collect()
    }

    pub fn depth(&self) -> i64 {
        self.coeffs.keys().next().map(|k| -k).unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &MotCoeff)> + '_ {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self
            .coeffs
            .iter()
            .map(|(a1, c)| serde_json::json!({"a1": a1, "coeff": c.to_json()}))
            .collect::<Vec<_>>())
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::MalformedInput("expected a coefficient array".into()))?;
        let mut items = Vec::new();
        for t in arr {
            let a1 = t
                .get("a1")
                .and_then(|x| x.as_i64())
                .ok_or_else(|| Error::MalformedInput("missing a1".into()))?;
            let c: MotCoeff = serde_json::from_value(
                t.get("coeff")
                    .cloned()
                    .ok_or_else(|| Error::MalformedInput("missing coeff".into()))?,
            )
            .map_err(|e| Error::MalformedInput(format!("bad coeff: {e}")))?;
            items.push((a1, c));
        }
        Rank2Series::from_coeffs(items)
    }
}

/// The quotient-scheme series of the trivial rank-two bundle on the line:
/// `c_{a1} = (L^{2(1-a1)} - 1)/(L - 1) = 1 + L + ... + L^{1-2a1}` for
/// `a1 <= 0`, closed form `(L+1)/((1-x)(1-L^2 x))`.
pub fn quot_series(depth: i64) -> Rank2Series {
    let mut coeffs = BTreeMap::new();
    for a1 in -depth..=0 {
        let mut c = MotCoeff::zero();
        for j in 0..=(1 - 2 * a1) {
            c = &c + &MotCoeff::tate_pow(j);
        }
        coeffs.insert(a1, c);
    }
    let num = PolyU::constant(&MotCoeff::one() + &MotCoeff::tate());
    let one_minus_x = PolyU::from_coeffs(vec![MotCoeff::one(), -&MotCoeff::one()]);
    let one_minus_l2x = PolyU::from_coeffs(vec![MotCoeff::one(), -&MotCoeff::tate_pow(2)]);
    let closed = RatFnU::new(num, &one_minus_x * &one_minus_l2x).expect("nonzero denominator");
    Rank2Series { coeffs, closed: Some(closed) }
}

/// Recover the subbundle series from the subsheaf series by dividing out the
/// zeta factor: `E(x) = E~(x) / zeta(x)`.
pub fn subbundle_series_from_quot(q: &Rank2Series, zeta: &RatFnU) -> Result<Rank2Series> {
    let depth = q.depth() as usize;
    let zs = zeta.series(depth + 1)?;
    let z0 = zs[0].clone();
    if !z0.is_unit_monomial() {
        return Err(Error::NonExpandable("zeta leading coefficient is not a unit".into()));
    }
    let (e0, c0) = z0.terms().next().map(|(e, c)| (e, c.clone())).expect("unit");
    let inv0 = if c0 == (-1).into() { -&MotCoeff::s_pow(-e0) } else { MotCoeff::s_pow(-e0) };
    let mut e: Vec<MotCoeff> = Vec::with_capacity(depth + 1);
    for k in 0..=depth {
        let mut acc = q.coeff(-(k as i64));
        for j in 1..=k {
            acc = &acc - &(&zs[j] * &e[k - j]);
        }
        e.push(&acc * &inv0);
    }
    let mut out = Rank2Series::from_coeffs(
        e.into_iter().enumerate().map(|(k, c)| (-(k as i64), c)),
    )?;
    if let Some(closed) = &q.closed {
        // E_closed = E~_closed * (1/zeta)
        let recip = RatFnU::new(zeta.den.clone(), zeta.num.clone())?;
        out.closed = Some(closed.mul(&recip));
    }
    Ok(out)
}

/// Residual of the rank-two functional equation for one prefactor variant:
/// `prefactor * E~(L z2, L^{-1} z1) - E~(z1, z2)` as a rational function in
/// `x`. Requires the closed form.
pub fn funceq_residual_rank2(s: &Rank2Series, genus: i64, variant: Rank2Variant) -> Result<RatFnU> {
    let closed = s
        .closed
        .as_ref()
        .ok_or_else(|| Error::MalformedInput("closed form required for the rank-two check".into()))?;
    // the swap (z1, z2) -> (L z2, L^{-1} z1) sends x to L^{-2} x^{-1}
    let swapped = closed.subst_recip_scale(-4);
    let e = 2 - 2 * genus;
    let (lpow, xpow) = if variant.base_z1_over_z2 {
        // (L z1/z2)^(+-e) = L^(+-e) x^(-+e)
        if variant.exponent_plus { (e, -e) } else { (-e, e) }
    } else {
        // (L z2/z1)^(+-e) = L^(+-e) x^(+-e)
        if variant.exponent_plus { (e, e) } else { (-e, -e) }
    };
    let rhs = swapped.mul_monomial(&MotCoeff::tate_pow(lpow), xpow);
    Ok(rhs.sub(closed))
}

/// Evaluate all four prefactor variants; returns `(variant, vanishes)`.
pub fn funceq_rank2_all(s: &Rank2Series, genus: i64) -> Result<Vec<(Rank2Variant, bool)>> {
    Rank2Variant::all()
        .into_iter()
        .map(|v| funceq_residual_rank2(s, genus, v).map(|r| (v, r.is_zero())))
        .collect()
}

/// The finite numerator of a pure-`z` series: multiply by
/// `(1 - L^2 z^{beta^vee}) Phi(z^{beta^vee})` over the finite positive
/// roots. The input must be supported on `q^0 v^0` monomials.
pub fn finite_numerator(
    rs: &Arc<RootSystem>,
    e: &LatticeSeries,
    curve: &CurveData,
) -> Result<LatticeSeries> {
    for (exp, _) in e.iter() {
        if exp.central != 0 || exp.loop_part != 0 {
            return Err(Error::MalformedInput(
                "finite numerator input must be a pure z series".into(),
            ));
        }
    }
    let shifted = PolyU::from_coeffs(vec![MotCoeff::one(), -&MotCoeff::tate_pow(2)]);
    let poly = &shifted * curve.phi();
    let mut acc = e.clone();
    for root in rs.positive_roots() {
        let co = AffCoweight::new(rs.coroot_of(root), 0, 0);
        let mut factor = LatticeSeries::zero(rs.clone(), Window::exact(0));
        for (j, c) in poly.coeffs().iter().enumerate() {
            factor.insert(co.scale(j as i64), c.clone());
        }
        acc = acc.mul(&factor)?;
    }
    Ok(acc)
}

/// Functional-equation checker for the finite numerator, running the shared
/// monomial-level residual machinery with a translation-free group element.
pub fn finite_funceq_residual(
    rs: &Arc<RootSystem>,
    genus: i64,
    n: &LatticeSeries,
    u: &AffWeylElt,
) -> Result<FunceqReport> {
    funceq_residual_core(rs, genus, &Convention::builtin(), n, u)
}

/// The subbundle coefficients of the trivial rank-two bundle rendered as a
/// pure-`z` series on the `A1` coweight lattice (`x^k` maps to
/// `z^{k alpha^vee}`), for cross-checks against the affine machinery.
pub fn subbundle_series_as_lattice(rs: &Arc<RootSystem>, s: &Rank2Series, h: i64) -> LatticeSeries {
    assert_eq!(rs.rank, 1, "the dictionary targets the rank-one lattice");
    let mut out = LatticeSeries::zero(rs.clone(), Window::new(0, h));
    for (a1, c) in s.iter() {
        out.insert(AffCoweight::new(vec![-a1], 0, 0), c.clone());
    }
    out
}
