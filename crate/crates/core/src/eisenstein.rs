//! The headline computations: line-bundle section series, Bruhat-cell term
//! formula, Eisenstein series, affine Hall polynomials, the Weyl-Kac-type
//! denominator and numerator with a monomial-level functional-equation
//! checker, lattice theta functions, universal blowup functions, and the
//! Weyl-Kac character with a Freudenthal-recursion oracle.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::affine::{
    alpha0_coroot, coroot, enumerate_by_grade2, grade, pair, positive_coroots_up_to,
    rho_hat_check2, theta_ball, theta_exponent, AffCoweight, AffWeylElt, TorsorLabel,
};
use crate::coeff::{CurveData, MotCoeff, RatFnU, PolyU};
use crate::convention::{CharVariant, Convention, FunceqVariant, MapBy};
use crate::rootsys::RootSystem;
use crate::series::{sum_series, LatticeSeries, Window, H_INF};
use crate::{par_map, Error, Result};

/// Parameters of one Eisenstein computation.
#[derive(Clone, Debug)]
pub struct EisParams {
    pub rs: Arc<RootSystem>,
    pub b: TorsorLabel,
    pub h: i64,
    pub curve: CurveData,
    pub convention: Convention,
}

impl EisParams {
    pub fn new(rs: Arc<RootSystem>, b: TorsorLabel, h: i64) -> Self {
        EisParams { rs, b, h, curve: CurveData::p1(), convention: Convention::builtin() }
    }
}

/// Sections of `O(m)` on the line with prescribed polar divisor, summed over
/// divisor degrees: the closed form `L^{m+1} (1-u)/(1-L^2 u)`.
pub fn psi_line(m: i64) -> Result<RatFnU> {
    if m < 0 {
        return Err(Error::MalformedInput(format!("twist degree m = {m} must be >= 0")));
    }
    let num = PolyU::from_coeffs(vec![MotCoeff::tate_pow(m + 1), -&MotCoeff::tate_pow(m + 1)]);
    let den = PolyU::from_coeffs(vec![MotCoeff::one(), -&MotCoeff::tate_pow(2)]);
    RatFnU::new(num, den)
}

/// `u^k` coefficient of `psi_line(m)`: `L^{m+1}` at `k = 0`, then
/// `L^{m+1}(L^{2k} - L^{2k-2})`.
fn psi_coeff(m: i64, k: i64) -> MotCoeff {
    if k == 0 {
        MotCoeff::tate_pow(m + 1)
    } else {
        &MotCoeff::tate_pow(m + 2 * k + 1) - &MotCoeff::tate_pow(m + 2 * k - 1)
    }
}

/// `u^k` coefficient of `(1-u)/(1-L^2 u)`.
fn ratio_coeff(k: i64) -> MotCoeff {
    if k == 0 {
        MotCoeff::one()
    } else {
        &MotCoeff::tate_pow(2 * k) - &MotCoeff::tate_pow(2 * k - 2)
    }
}

/// The Bruhat-cell term: `t^{w(b)}` times the product over the inversion set
/// of `w` of the section series `psi` evaluated at `t^{alpha^vee}`.
pub fn term_ew(p: &EisParams, w: &AffWeylElt) -> Result<LatticeSeries> {
    let rs = &p.rs;
    let b = p.b.coweight();
    let wb = w.act_coweight(rs, b);
    let g0 = grade(rs, &wb);
    if g0 > p.h {
        return Ok(LatticeSeries::zero(rs.clone(), Window::new(g0, p.h)));
    }
    let budget = p.h - g0;
    let mut acc = LatticeSeries::monomial(rs.clone(), wb, MotCoeff::one());
    for alpha in w.inversion_set(rs) {
        let m = -pair(rs, &alpha, b);
        if m < 0 {
            return Err(Error::NotAntidominant(format!(
                "<alpha, b> = {} > 0 inside an inversion set",
                -m
            )));
        }
        let root_idx = rs
            .root_index_by_wt(&alpha.finite)
            .ok_or_else(|| Error::MalformedInput("inversion root not found".into()))?;
        let dir = coroot(rs, &rs.roots[root_idx], alpha.degree);
        let factor = LatticeSeries::from_powers(rs.clone(), &dir, budget, |k| psi_coeff(m, k))?;
        acc = acc.mul(&factor)?;
    }
    Ok(acc.truncate(p.h))
}

/// The Eisenstein series as the sum of Bruhat-cell terms over all group
/// elements reaching the grade window.
pub fn eisenstein_e(p: &EisParams) -> Result<LatticeSeries> {
    let rs = &p.rs;
    let ws = crate::affine::enumerate_weyl_by_grade(rs, &p.b, p.h);
    let parts = par_map(&ws, |w| term_ew(p, w));
    let mut fine = Vec::with_capacity(parts.len());
    for part in parts {
        fine.push(part?);
    }
    let gmin = grade(rs, p.b.coweight());
    Ok(sum_series(rs.clone(), Window::new(gmin, p.h), fine))
}

/// The Hall-Littlewood kernel: product over positive real affine coroots of
/// `(1 - l t^{alpha^vee}) / (1 - t^{alpha^vee})`, truncated at grade `h`.
pub fn k_series(rs: &Arc<RootSystem>, l: &MotCoeff, h: i64) -> Result<LatticeSeries> {
    let mut acc = LatticeSeries::one(rs.clone()).truncate(h);
    let one_minus_l = &MotCoeff::one() - l;
    for (_, co) in positive_coroots_up_to(rs, h) {
        let factor = LatticeSeries::from_powers(rs.clone(), &co, h, |k| {
            if k == 0 {
                MotCoeff::one()
            } else {
                one_minus_l.clone()
            }
        })?;
        acc = acc.mul(&factor)?;
    }
    Ok(acc)
}

/// Which closed-form summand does `w` contribute: the twisted monomial
/// `L^{l(w)} L^{grade(w(b)) - grade(b)} t^{w(b)}` times the ratio factors
/// over the inversion set.
fn hall_closed_summand(p: &EisParams, w: &AffWeylElt) -> Result<LatticeSeries> {
    let rs = &p.rs;
    let b = p.b.coweight();
    let wb = w.act_coweight(rs, b);
    let g0 = grade(rs, &wb);
    if g0 > p.h {
        return Ok(LatticeSeries::zero(rs.clone(), Window::new(g0, p.h)));
    }
    let budget = p.h - g0;
    let lw = w.length(rs) as i64;
    let coeff = MotCoeff::tate_pow(lw + g0 - grade(rs, b));
    let mut acc = LatticeSeries::monomial(rs.clone(), wb, coeff);
    for alpha in w.inversion_set(rs) {
        let root_idx = rs
            .root_index_by_wt(&alpha.finite)
            .ok_or_else(|| Error::MalformedInput("inversion root not found".into()))?;
        let dir = coroot(rs, &rs.roots[root_idx], alpha.degree);
        let factor = LatticeSeries::from_powers(rs.clone(), &dir, budget, ratio_coeff)?;
        acc = acc.mul(&factor)?;
    }
    Ok(acc.truncate(p.h))
}

/// One summand of the symmetrized kernel: the monomial-wise twisted image of
/// `t^b K(t)` under the resolved twisted action, with every factor
/// re-expanded in the grade completion. Directions sent to negative grade
/// flip, picking up a constant `L` and an inverted geometric tail.
fn hall_definitional_summand(p: &EisParams, w: &AffWeylElt) -> Result<LatticeSeries> {
    let rs = &p.rs;
    let b = p.b.coweight();
    let (fwd, bwd) = match p.convention.twisted_action_map_by {
        MapBy::W => (w.clone(), w.inverse(rs)),
        MapBy::WInv => (w.inverse(rs), w.clone()),
    };
    let x0 = fwd.act_coweight(rs, b);
    let g0 = grade(rs, &x0);
    if g0 > p.h {
        return Ok(LatticeSeries::zero(rs.clone(), Window::new(g0, p.h)));
    }
    let budget = p.h - g0;
    let coeff0 = MotCoeff::tate_pow(g0 - grade(rs, b));
    let mut acc = LatticeSeries::monomial(rs.clone(), x0, coeff0);
    let one = MotCoeff::one();
    let tate = MotCoeff::tate();

    // Unflipped factors: positive image directions delta with grade <= budget.
    for (_, delta) in positive_coroots_up_to(rs, budget) {
        let gamma = bwd.act_coweight(rs, &delta);
        if grade(rs, &gamma) <= 0 {
            continue; // not a positive coroot of the kernel
        }
        let e = grade(rs, &delta) - grade(rs, &gamma);
        let factor = LatticeSeries::from_powers(rs.clone(), &delta, budget, |k| {
            if k == 0 {
                one.clone()
            } else {
                (&one - &tate).mul_s_pow(2 * k * e)
            }
        })?;
        acc = acc.mul(&factor)?;
    }

    // Flipped factors: kernel directions gamma taken to negative grade; each
    // contributes a constant L plus a tail in the opposite direction.
    for alpha in fwd.inversion_set(rs) {
        let root_idx = rs
            .root_index_by_wt(&alpha.finite)
            .ok_or_else(|| Error::MalformedInput("inversion root not found".into()))?;
        let gamma = coroot(rs, &rs.roots[root_idx], alpha.degree);
        let delta = fwd.act_coweight(rs, &gamma);
        let e = grade(rs, &delta) - grade(rs, &gamma);
        debug_assert!(grade(rs, &delta) < 0);
        let dir = delta.neg();
        let factor = LatticeSeries::from_powers(rs.clone(), &dir, budget, |k| {
            if k == 0 {
                tate.clone()
            } else {
                (&tate - &one).mul_s_pow(-2 * k * e)
            }
        })?;
        acc = acc.mul(&factor)?;
    }
    Ok(acc.truncate(p.h))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HallForm {
    Definition,
    Closed,
}

/// The affine Hall polynomial `P_b(t; L)` truncated at the grade window.
///
/// `Closed` assembles the kernel times the sum of twisted-monomial Bruhat
/// factors; `Definition` sums the re-expanded twisted images of `t^b K(t)`
/// summand by summand.
pub fn hall_p(p: &EisParams, form: HallForm) -> Result<LatticeSeries> {
    let rs = &p.rs;
    let ws = crate::affine::enumerate_weyl_by_grade(rs, &p.b, p.h);
    let gmin = grade(rs, p.b.coweight());
    match form {
        HallForm::Definition => {
            let parts = par_map(&ws, |w| hall_definitional_summand(p, w));
            let mut fine = Vec::with_capacity(parts.len());
            for part in parts {
                fine.push(part?);
            }
            Ok(sum_series(rs.clone(), Window::new(gmin, p.h), fine))
        }
        HallForm::Closed => {
            let parts = par_map(&ws, |w| hall_closed_summand(p, w));
            let mut fine = Vec::with_capacity(parts.len());
            for part in parts {
                fine.push(part?);
            }
            let inner = sum_series(rs.clone(), Window::new(gmin, p.h), fine);
            let k = k_series(rs, &MotCoeff::tate(), p.h - gmin.min(0))?;
            Ok(k.mul(&inner)?.truncate(p.h))
        }
    }
}

/// The denominator: product over positive real affine coroots of
/// `(1 - L^2 t^{alpha^vee}) Phi(t^{alpha^vee})`.
pub fn denominator_d(rs: &Arc<RootSystem>, curve: &CurveData, h: i64) -> Result<LatticeSeries> {
    // (1 - L^2 u) Phi(u) as a dense coefficient list
    let shifted = PolyU::from_coeffs(vec![MotCoeff::one(), -&MotCoeff::tate_pow(2)]);
    let poly = &shifted * curve.phi();
    let coeffs: Vec<MotCoeff> = poly.coeffs().to_vec();
    let mut acc = LatticeSeries::one(rs.clone()).truncate(h);
    for (_, co) in positive_coroots_up_to(rs, h) {
        let factor = LatticeSeries::from_powers(rs.clone(), &co, h, |k| {
            coeffs.get(k as usize).cloned().unwrap_or_else(MotCoeff::zero)
        })?;
        acc = acc.mul(&factor)?;
    }
    Ok(acc)
}

/// The numerator `N = E * D`.
pub fn numerator_n(p: &EisParams) -> Result<LatticeSeries> {
    let e = eisenstein_e(p)?;
    let d = denominator_d(&p.rs, &p.curve, p.h)?;
    e.mul(&d)
}

/// Report of a functional-equation check.
#[derive(Clone, Debug)]
pub struct FunceqReport {
    /// Residual per variant, restricted to the certified overlap region.
    pub residuals: Vec<(FunceqVariant, LatticeSeries)>,
    /// Variants whose residual vanishes identically on the overlap.
    pub vanishing: Vec<FunceqVariant>,
    /// Residual for the configured convention.
    pub resolved: LatticeSeries,
}

/// Monomial-level residual of the numerator functional equation
/// `N(t) = (-1)^{l(w)} ((L^rho_hat t)^eta)^{1+2g} N(L^{rho_hat - w(rho_hat)} w(t))`
/// with `eta = w(rho_hat_check) - rho_hat_check`, evaluated on the overlap
/// region where both sides are certified. All four orientation/sign variants
/// are evaluated; the checker reports the vanishing set.
pub fn funceq_residual(p: &EisParams, n: &LatticeSeries, w: &AffWeylElt) -> Result<FunceqReport> {
    funceq_residual_core(&p.rs, p.curve.genus() as i64, &p.convention, n, w)
}

/// The checker itself, shared with the finite-system (pure `z`) case where
/// `w` has no translation part and the numerator is a Laurent polynomial.
pub fn funceq_residual_core(
    rs: &Arc<RootSystem>,
    genus: i64,
    convention: &Convention,
    n: &LatticeSeries,
    w: &AffWeylElt,
) -> Result<FunceqReport> {
    let eta = w
        .act_coweight(rs, &rho_hat_check2(rs))
        .sub(&rho_hat_check2(rs))
        .halve()?;
    let lw = w.length(rs) as i64;
    let sign = if lw % 2 == 0 { MotCoeff::one() } else { MotCoeff::int(-1) };
    let exp_factor = 1 + 2 * genus;
    let h_n = n.window().h;

    let mut residuals = Vec::new();
    let mut vanishing = Vec::new();
    let mut resolved: Option<LatticeSeries> = None;

    for variant in FunceqVariant::all() {
        let (fwd, bwd) = match variant.map_by {
            MapBy::W => (w.clone(), w.inverse(rs)),
            MapBy::WInv => (w.inverse(rs), w.clone()),
        };
        let sigma = if variant.prefactor_plus { 1 } else { -1 };
        let shift = eta.scale(sigma * exp_factor);
        let prefpow = sigma * exp_factor * grade(rs, &eta);

        // RHS terms: x = shift + fwd(mu), coefficient
        // sign * L^{prefpow + grade(fwd(mu)) - grade(mu)} * c
        let mut rhs = LatticeSeries::zero(rs.clone(), Window::new(n.window().gmin, H_INF));
        for (mu, c) in n.iter() {
            let img = fwd.act_coweight(rs, mu);
            let x = shift.add(&img);
            let twist = prefpow + grade(rs, &img) - grade(rs, mu);
            rhs.insert(x, (&sign * c).mul_s_pow(2 * twist));
        }

        // Certified region: grade(x) <= h_n and grade(preimage mu_x) <= h_n.
        let certified = |x: &AffCoweight| -> bool {
            if grade(rs, x) > h_n {
                return false;
            }
            let mu = bwd.act_coweight(rs, &x.sub(&shift));
            grade(rs, &mu) <= h_n
        };

        let mut residual = LatticeSeries::zero(rs.clone(), Window::new(n.window().gmin, h_n));
        let mut compared = 0usize;
        let mut exponents: Vec<AffCoweight> =
            n.iter().map(|(e, _)| e.clone()).chain(rhs.iter().map(|(e, _)| e.clone())).collect();
        exponents.sort();
        exponents.dedup();
        for x in exponents {
            if !certified(&x) {
                continue;
            }
            compared += 1;
            let diff = &n.coeff_at(&x) - &rhs.coeff_at(&x);
            residual.insert(x, diff);
        }
        if compared == 0 {
            return Err(Error::EmptyOverlap);
        }
        if residual.is_empty() {
            vanishing.push(variant);
        }
        if variant == convention.funceq {
            resolved = Some(residual.clone());
        }
        residuals.push((variant, residual));
    }

    Ok(FunceqReport {
        residuals,
        vanishing,
        resolved: resolved.expect("configured variant evaluated"),
    })
}

/// Univariate Laurent q-series over the coefficient ring, truncated at a
/// fixed order.
#[derive(Clone, PartialEq, Eq)]
pub struct QSeries {
    pub order: i64,
    coeffs: BTreeMap<i64, MotCoeff>,
}

impl QSeries {
    pub fn zero(order: i64) -> Self {
        QSeries { order, coeffs: BTreeMap::new() }
    }

    pub fn one(order: i64) -> Self {
        let mut s = Self::zero(order);
        s.insert(0, MotCoeff::one());
        s
    }

    pub fn insert(&mut self, k: i64, c: MotCoeff) {
        if c.is_zero() || k > self.order {
            return;
        }
        let entry = self.coeffs.entry(k).or_insert_with(MotCoeff::zero);
        *entry = &*entry + &c;
        if entry.is_zero() {
            self.coeffs.remove(&k);
        }
    }

    pub fn coeff(&self, k: i64) -> MotCoeff {
        self.coeffs.get(&k).cloned().unwrap_or_else(MotCoeff::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &MotCoeff)> + '_ {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn add(&self, rhs: &QSeries) -> QSeries {
        let mut out = QSeries::zero(self.order.min(rhs.order));
        for (k, c) in self.iter().chain(rhs.iter()) {
            out.insert(k, c.clone());
        }
        out
    }

    pub fn mul(&self, rhs: &QSeries) -> QSeries {
        let lo_a = self.coeffs.keys().next().copied().unwrap_or(0).min(0);
        let lo_b = rhs.coeffs.keys().next().copied().unwrap_or(0).min(0);
        let order = (self.order + lo_b).min(rhs.order + lo_a);
        let mut out = QSeries::zero(order);
        for (ka, ca) in self.iter() {
            for (kb, cb) in rhs.iter() {
                if ka + kb <= order {
                    out.insert(ka + kb, ca * cb);
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &MotCoeff) -> QSeries {
        let mut out = QSeries::zero(self.order);
        for (k, v) in self.iter() {
            out.insert(k, v * c);
        }
        out
    }

    pub fn eval_tate(&self, v: i64) -> Result<QSeries> {
        let big = BigInt::from(v);
        let mut out = QSeries::zero(self.order);
        for (k, c) in self.iter() {
            let n = c.eval_tate(&big)?;
            if !n.is_zero() {
                out.insert(k, MotCoeff::big(n));
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "order": self.order,
            "terms": self.coeffs.iter().map(|(k, c)| serde_json::json!({
                "q": k, "coeff": c.to_json(),
            })).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.coeffs.iter().map(|(k, c)| format!("({c}) q^{k}")).collect();
        write!(f, "{} + O(q^{})", parts.join(" + "), self.order + 1)
    }
}

/// The theta-zero-value: `sum_a q^{psi(a,f) - d psi(a,a)/2}` over the finite
/// coweight lattice, to q-order `n_q`. The central component of the label
/// only shifts coefficients of the associated blowup series, not the
/// exponents, and is ignored here.
pub fn theta_zero(rs: &Arc<RootSystem>, d: i64, f: &[i64], _m: i64, n_q: i64) -> Result<QSeries> {
    if d <= 0 {
        return Err(Error::NegativeIndexRequired(format!("d = {d}")));
    }
    let mut out = QSeries::zero(n_q);
    for a in theta_ball(rs, f, d, n_q) {
        out.insert(theta_exponent(rs, f, d, &a), MotCoeff::one());
    }
    Ok(out)
}

/// The full theta function `sum_a q^{-d psi(a,a)/2} z^a v^{-d}` truncated by
/// grade.
pub fn theta_full(rs: &Arc<RootSystem>, d: i64, n_grade: i64) -> Result<LatticeSeries> {
    if d <= 0 {
        return Err(Error::NegativeIndexRequired(format!("d = {d}")));
    }
    let zero = vec![0i64; rs.rank];
    let mut out = LatticeSeries::zero(rs.clone(), Window::new(0, n_grade));
    for a in crate::affine::theta_grade_ball(rs, d, n_grade) {
        let c = theta_exponent(rs, &zero, d, &a);
        let exp = AffCoweight::new(a, c, -d);
        if grade(rs, &exp) <= n_grade {
            out.insert(exp, MotCoeff::one());
        }
    }
    Ok(out)
}

/// The parahoric series for a torsor label `b = (f, m, -d)`:
/// `sum_a q^{psi(a,f) - d psi(a,a)/2} prod_{(n,alpha) in Delta(a)}
///  L^{-<f,alpha> + m n + 1} (1-q^n)/(1-L^2 q^n)`,
/// where `Delta(a) = {(n, alpha) : alpha a root, 1 <= n <= <alpha, a>}`.
pub fn blowup_f(rs: &Arc<RootSystem>, b: &TorsorLabel, n_q: i64) -> Result<QSeries> {
    let f = &b.coweight().finite;
    let m = b.coweight().central;
    let d = b.d();
    let ball = theta_ball(rs, f, d, n_q);
    let parts = par_map(&ball, |a| -> QSeries {
        let base = theta_exponent(rs, f, d, a);
        let mut summand = QSeries::one(n_q - base);
        for root in &rs.roots {
            let hi = rs.pair(&root.wt, a);
            for n in 1..=hi {
                let e = -rs.pair(&root.wt, f) + m * n + 1;
                let mut factor = QSeries::zero(n_q - base);
                factor.insert(0, MotCoeff::tate_pow(e));
                let mut k = 1i64;
                while n * k <= n_q - base {
                    factor.insert(n * k, ratio_coeff(k).mul_s_pow(2 * e));
                    k += 1;
                }
                summand = summand.mul(&factor);
            }
        }
        let mut shifted = QSeries::zero(n_q);
        for (k, c) in summand.iter() {
            shifted.insert(k + base, c.clone());
        }
        shifted
    });
    let mut out = QSeries::zero(n_q);
    for p in parts {
        out = out.add(&p);
    }
    Ok(out)
}

/// `rho_dual`: the Weyl vector of the dual affine system inside our coweight
/// lattice, doubled: `(2 rho^vee, 0, 2h)`. It pairs to 1 with every simple
/// affine root.
fn rho_dual2(rs: &RootSystem) -> AffCoweight {
    AffCoweight::new(rs.rho_check2.clone(), 0, 2 * rs.coxeter)
}

/// Invariant symmetric form on the affine coweight lattice used by the
/// Freudenthal recursion: `B((a,c,m),(a',c',m')) = -psi(a,a') + c m' + m c'`.
fn dual_form(rs: &RootSystem, x: &AffCoweight, y: &AffCoweight) -> i64 {
    -rs.psi_form(&x.finite, &y.finite) + x.central * y.loop_part + x.loop_part * y.central
}

fn check_dual_dominant(rs: &RootSystem, lam: &AffCoweight) -> Result<()> {
    for i in 0..rs.rank {
        let v = rs.pair(&rs.roots[i].wt, &lam.finite);
        if v < 0 {
            return Err(Error::MalformedInput(format!(
                "weight not dominant: <alpha_{}, lambda> = {v}",
                i + 1
            )));
        }
    }
    let v0 = -rs.pair(&rs.roots[rs.theta].wt, &lam.finite) + lam.loop_part;
    if v0 < 0 {
        return Err(Error::MalformedInput(format!(
            "weight not dominant: <alpha_0, lambda> = {v0}"
        )));
    }
    Ok(())
}

/// The Weyl-Kac character of the dual-system irreducible with highest weight
/// `lambda`, rendered in `t^{-1}` so its support points up the grade: the
/// signed orbit numerator divided by the real-coroot product and (optionally)
/// the imaginary-root factor `prod (1-q^n)^{rank}`. Truncated `depth` grades
/// above the leading exponent `-lambda`.
pub fn weyl_kac_character(
    rs: &Arc<RootSystem>,
    lam: &AffCoweight,
    depth: i64,
    imaginary_factor: bool,
) -> Result<LatticeSeries> {
    if !rs.simply_laced() {
        return Err(Error::InvalidRootSystem(
            "character formula implemented for simply-laced systems only".into(),
        ));
    }
    check_dual_dominant(rs, lam)?;
    let floor = -grade(rs, lam);
    let h = floor + depth;

    let rho2 = rho_dual2(rs);
    let big2 = lam.scale(2).add(&rho2);
    // numerator terms need grade(w(big2)) >= grade(rho2) + 2 grade(lam) - 2 depth
    let lo2 = grade(rs, &rho2) + 2 * grade(rs, lam) - 2 * depth;
    let ws = enumerate_by_grade2(rs, &big2, -1, -lo2);
    let mut numerator = LatticeSeries::zero(rs.clone(), Window::new(floor, h));
    for w in &ws {
        let exp2 = rho2.sub(&w.act_coweight(rs, &big2));
        let exp = exp2.halve()?;
        let sign = if w.length(rs) % 2 == 0 { MotCoeff::one() } else { MotCoeff::int(-1) };
        numerator.insert(exp, sign);
    }

    let mut acc = numerator;
    for (_, co) in positive_coroots_up_to(rs, depth) {
        let inv = LatticeSeries::expand_unit_inverse(rs.clone(), &MotCoeff::one(), &co, depth)?;
        acc = acc.mul(&inv)?;
    }
    if imaginary_factor {
        let k = AffCoweight::central_k(rs.rank);
        let mut n = 1i64;
        while grade(rs, &k.scale(n)) <= depth {
            let inv = LatticeSeries::expand_unit_inverse(
                rs.clone(),
                &MotCoeff::one(),
                &k.scale(n),
                depth,
            )?;
            for _ in 0..rs.rank {
                acc = acc.mul(&inv)?;
            }
            n += 1;
        }
    }
    Ok(acc.truncate(h))
}

/// Independent oracle for the character: affine Freudenthal recursion for
/// the weight multiplicities of the dual-system irreducible with highest
/// weight `lambda`, down to the given depth.
pub fn freudenthal_multiplicities(
    rs: &Arc<RootSystem>,
    lam: &AffCoweight,
    depth: i64,
) -> Result<BTreeMap<AffCoweight, BigInt>> {
    if !rs.simply_laced() {
        return Err(Error::InvalidRootSystem(
            "Freudenthal oracle implemented for simply-laced systems only".into(),
        ));
    }
    check_dual_dominant(rs, lam)?;
    // simple coroots of the dual system: our finite simple coroots + alpha_0^vee,
    // each of grade 1
    let mut simples: Vec<AffCoweight> = (0..rs.rank).map(|i| coroot(rs, &rs.roots[i], 0)).collect();
    simples.push(alpha0_coroot(rs));

    // all weights lambda - sum n_i gamma_i with total depth <= depth,
    // ordered by depth
    let mut by_depth: Vec<Vec<AffCoweight>> = vec![Vec::new(); (depth + 1) as usize];
    let gens = simples.len();
    let mut stack: Vec<(usize, AffCoweight, i64)> = vec![(0, AffCoweight::zero(rs.rank), 0)];
    while let Some((i, x, used)) = stack.pop() {
        if i == gens {
            by_depth[used as usize].push(x);
            continue;
        }
        let mut k = 0i64;
        loop {
            let nx = x.add(&simples[i].scale(k));
            let nused = used + k;
            if nused > depth {
                break;
            }
            stack.push((i + 1, nx, nused));
            k += 1;
        }
    }
    for level in &mut by_depth {
        level.sort();
        level.dedup();
    }

    // positive dual roots reachable within the depth
    let real_roots: Vec<AffCoweight> =
        positive_coroots_up_to(rs, depth).into_iter().map(|(_, co)| co).collect();
    let k_dir = AffCoweight::central_k(rs.rank);

    let rho2 = rho_dual2(rs);
    let big2 = lam.scale(2).add(&rho2);
    let norm_big2 = dual_form(rs, &big2, &big2);

    let mut mult: BTreeMap<AffCoweight, BigInt> = BTreeMap::new();
    for level in 0..=(depth as usize) {
        for mu_minus in by_depth[level].clone() {
            let mu = lam.sub(&mu_minus);
            if level == 0 {
                mult.insert(mu, BigInt::from(1));
                continue;
            }
            let mu2 = mu.scale(2).add(&rho2);
            let c4 = norm_big2 - dual_form(rs, &mu2, &mu2);
            if c4 % 4 != 0 {
                return Err(Error::MalformedInput("non-integral Freudenthal norm".into()));
            }
            let c = BigInt::from(c4 / 4);
            if c.is_zero() {
                // not a weight below a dominant highest weight
                continue;
            }
            let mut rhs = BigInt::zero();
            // real roots, multiplicity 1
            for gamma in &real_roots {
                let mut k = 1i64;
                loop {
                    let up = mu.add(&gamma.scale(k));
                    match mult.get(&up) {
                        Some(m) if !m.is_zero() => {
                            let b = dual_form(rs, &up, gamma);
                            rhs += BigInt::from(2 * b) * m;
                        }
                        _ => {
                            // above lambda or multiplicity zero: the ladder
                            // can still continue through zero multiplicities
                            let reach = grade(rs, &up) > grade(rs, lam);
                            if reach {
                                break;
                            }
                        }
                    }
                    k += 1;
                    if k > 2 * depth + 2 {
                        break;
                    }
                }
            }
            // imaginary roots n K, multiplicity = rank
            let mut n = 1i64;
            while grade(rs, &k_dir.scale(n)) <= depth {
                let gamma = k_dir.scale(n);
                let mut k = 1i64;
                loop {
                    let up = mu.add(&gamma.scale(k));
                    match mult.get(&up) {
                        Some(m) if !m.is_zero() => {
                            let b = dual_form(rs, &up, &gamma);
                            rhs += BigInt::from(2 * b * rs.rank as i64) * m;
                        }
                        _ => {
                            if grade(rs, &up) > grade(rs, lam) {
                                break;
                            }
                        }
                    }
                    k += 1;
                    if k > 2 * depth + 2 {
                        break;
                    }
                }
                n += 1;
            }
            let (q, r) = (&rhs / &c, &rhs % &c);
            if !r.is_zero() {
                return Err(Error::MalformedInput("Freudenthal division not exact".into()));
            }
            if !q.is_zero() {
                mult.insert(mu, q);
            }
        }
    }
    Ok(mult)
}

/// Compare the Hall polynomial at `L := 0` against the four combinations of
/// character rendering and imaginary factor; returns the list of variants
/// that match on the window.
pub fn weyl_kac_comparison(
    p: &EisParams,
) -> Result<Vec<(CharVariant, bool)>> {
    let rs = &p.rs;
    let hall0 = hall_p(p, HallForm::Closed)?.eval_tate(0)?;
    let lam = p.b.coweight().neg();
    let depth = p.h - grade(rs, p.b.coweight());
    let mut out = Vec::new();
    for variant in CharVariant::all() {
        let chi = weyl_kac_character(rs, &lam, depth, variant.imaginary_factor)?;
        let candidate = if variant.inverted {
            chi
        } else {
            // render in t rather than t^{-1}: negate every exponent
            let mut neg = LatticeSeries::zero(
                rs.clone(),
                Window::new(-chi.window().h, -chi.window().gmin),
            );
            for (exp, c) in chi.iter() {
                neg.insert(exp.neg(), c.clone());
            }
            neg
        };
        let ok = hall0.agrees_with(&candidate, p.h);
        out.push((variant, ok));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::{build_root_system, SeriesType};

    fn a1() -> Arc<RootSystem> {
        Arc::new(build_root_system(SeriesType::A, 1).unwrap())
    }

    fn universal_params(h: i64) -> EisParams {
        let rs = a1();
        let b = TorsorLabel::new(&rs, AffCoweight::new(vec![0], 0, -1)).unwrap();
        EisParams::new(rs, b, h)
    }

    fn l() -> MotCoeff {
        MotCoeff::tate()
    }

    #[test]
    fn psi_line_examples() {
        // m = 0: constant term L, u-coefficient L^3 - L
        let s = psi_line(0).unwrap().series(2).unwrap();
        assert_eq!(s[0], l());
        assert_eq!(s[1], &MotCoeff::tate_pow(3) - &l());
        // m = 2: constant term L^3
        let s = psi_line(2).unwrap().series(1).unwrap();
        assert_eq!(s[0], MotCoeff::tate_pow(3));
        assert!(psi_line(-1).is_err());
        // coefficient helper agrees with the rational function
        let s = psi_line(1).unwrap().series(4).unwrap();
        for (k, c) in s.iter().enumerate() {
            assert_eq!(*c, psi_coeff(1, k as i64));
        }
    }

    #[test]
    fn term_ew_examples() {
        let p = universal_params(4);
        let rs = &p.rs;
        // w = e: the single monomial t^b
        let e = AffWeylElt::identity(rs);
        let t = term_ew(&p, &e).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.coeff_at(p.b.coweight()), MotCoeff::one());

        // w = s_alpha: v^{-1} L (1 - y)/(1 - L^2 y) expanded
        let s = AffWeylElt::simple_reflection(rs, 1).unwrap();
        let t = term_ew(&p, &s).unwrap();
        for k in 0..=4i64 {
            let exp = AffCoweight::new(vec![k], 0, -1);
            assert_eq!(t.coeff_at(&exp), psi_coeff(0, k), "y^{k}");
        }

        // w = s_0: leading monomial q z^{-1} v^{-1} with coefficient L^2
        let s0 = AffWeylElt::simple_reflection(rs, 0).unwrap();
        let t = term_ew(&p, &s0).unwrap();
        let lead = AffCoweight::new(vec![-1], 1, -1);
        assert_eq!(t.coeff_at(&lead), MotCoeff::tate_pow(2));
    }

    #[test]
    fn eisenstein_q0_layer() {
        let p = universal_params(6);
        let e = eisenstein_e(&p).unwrap();
        // q^0 layer in y = z^{alpha^vee}: 1 + L, L^3 - L, L^5 - L^3
        let expect = [
            &MotCoeff::one() + &l(),
            &MotCoeff::tate_pow(3) - &l(),
            &MotCoeff::tate_pow(5) - &MotCoeff::tate_pow(3),
        ];
        for (k, want) in expect.iter().enumerate() {
            let exp = AffCoweight::new(vec![k as i64], 0, -1);
            assert_eq!(&e.coeff_at(&exp), want, "q^0 y^{k}");
        }
        // v-homogeneity of degree -d
        assert_eq!(e.common_loop(), Some(-1));
    }

    #[test]
    fn eisenstein_at_tate_one_is_orbit_sum() {
        let p = universal_params(5);
        let rs = &p.rs;
        let e1 = eisenstein_e(&p).unwrap().eval_tate(1).unwrap();
        let mut orbit = LatticeSeries::zero(rs.clone(), Window::new(0, p.h));
        for w in crate::affine::enumerate_weyl_by_grade(rs, &p.b, p.h) {
            orbit.insert(w.act_coweight(rs, p.b.coweight()), MotCoeff::one());
        }
        assert!(e1.agrees_with(&orbit, p.h));
    }

    #[test]
    fn k_series_examples() {
        let rs = a1();
        let k = k_series(&rs, &l(), 1).unwrap();
        // constant term 1
        assert_eq!(k.coeff_at(&AffCoweight::zero(1)), MotCoeff::one());
        // grade-1 terms (1 - L)(y + q/y)
        let want = &MotCoeff::one() - &l();
        assert_eq!(k.coeff_at(&AffCoweight::new(vec![1], 0, 0)), want);
        assert_eq!(k.coeff_at(&AffCoweight::new(vec![-1], 1, 0)), want);
        // at L := 1 the kernel collapses to 1
        let k = k_series(&rs, &l(), 6).unwrap().eval_tate(1).unwrap();
        assert!(k.agrees_with(&LatticeSeries::one(rs.clone()), 6));
    }

    #[test]
    fn denominator_examples() {
        let rs = a1();
        let d = denominator_d(&rs, &CurveData::p1(), 2).unwrap();
        assert_eq!(d.coeff_at(&AffCoweight::zero(1)), MotCoeff::one());
        let want = -&MotCoeff::tate_pow(2);
        assert_eq!(d.coeff_at(&AffCoweight::new(vec![1], 0, 0)), want);
        assert_eq!(d.coeff_at(&AffCoweight::new(vec![-1], 1, 0)), want);
    }

    #[test]
    fn hall_closed_equals_k_times_e() {
        let p = universal_params(8);
        let hall = hall_p(&p, HallForm::Closed).unwrap();
        let ke = k_series(&p.rs, &l(), p.h)
            .unwrap()
            .mul(&eisenstein_e(&p).unwrap())
            .unwrap();
        assert!(hall.agrees_with(&ke, p.h), "{:?}", hall.first_difference(&ke, p.h));
    }

    /// The Bruhat-cell identity for a twisted label: the finite part is
    /// nonzero, so the support floor is negative and the section-series
    /// twists vary across the inversion sets.
    #[test]
    fn hall_closed_equals_k_times_e_twisted_label() {
        let rs = a1();
        let b = TorsorLabel::new(&rs, AffCoweight::new(vec![-1], 0, -2)).unwrap();
        let h = 6;
        let p = EisParams::new(rs.clone(), b.clone(), h);
        let e = eisenstein_e(&p).unwrap();
        // b sits on the extra-node wall, so its affine stabilizer is
        // nontrivial and the leading coefficient picks up the stabilizer
        // summand's constant L
        assert_eq!(e.coeff_at(b.coweight()), &MotCoeff::one() + &MotCoeff::tate());
        assert_eq!(e.common_loop(), Some(-2));
        let valid_to = h + crate::affine::grade(&rs, b.coweight()).min(0);
        let hall = hall_p(&p, HallForm::Closed).unwrap();
        let ke = k_series(&rs, &MotCoeff::tate(), h).unwrap().mul(&e).unwrap();
        assert!(
            hall.agrees_with(&ke, valid_to),
            "{:?}",
            hall.first_difference(&ke, valid_to)
        );
    }

    #[test]
    fn hall_at_tate_one_is_orbit_sum() {
        let p = universal_params(8);
        let rs = &p.rs;
        let hall1 = hall_p(&p, HallForm::Closed).unwrap().eval_tate(1).unwrap();
        let mut orbit = LatticeSeries::zero(rs.clone(), Window::new(0, p.h));
        for w in crate::affine::enumerate_weyl_by_grade(rs, &p.b, p.h) {
            orbit.insert(w.act_coweight(rs, p.b.coweight()), MotCoeff::one());
        }
        assert!(hall1.agrees_with(&orbit, p.h), "{:?}", hall1.first_difference(&orbit, p.h));
        // the definitional route also collapses to the orbit sum at L := 1
        let def1 = hall_p(&p, HallForm::Definition).unwrap().eval_tate(1).unwrap();
        assert!(def1.agrees_with(&orbit, p.h), "{:?}", def1.first_difference(&orbit, p.h));
    }

    #[test]
    fn theta_zero_a1() {
        let rs = a1();
        let t = theta_zero(&rs, 1, &[0], 0, 9).unwrap();
        // 1 + 2q + 2q^4 + 2q^9
        assert_eq!(t.coeff(0), MotCoeff::one());
        assert_eq!(t.coeff(1), MotCoeff::int(2));
        assert_eq!(t.coeff(4), MotCoeff::int(2));
        assert_eq!(t.coeff(9), MotCoeff::int(2));
        for k in [2, 3, 5, 6, 7, 8] {
            assert!(t.coeff(k).is_zero(), "q^{k}");
        }
        // d = 2: exponents 2 n^2
        let t = theta_zero(&rs, 2, &[0], 0, 8).unwrap();
        assert_eq!(t.coeff(2), MotCoeff::int(2));
        assert_eq!(t.coeff(8), MotCoeff::int(2));
        assert!(t.coeff(4).is_zero());
    }

    #[test]
    fn theta_full_a1() {
        let rs = a1();
        let t = theta_full(&rs, 1, 12).unwrap();
        // coefficient of q^{n^2} is z^{n} + z^{-n}
        for n in 1..=2i64 {
            let plus = AffCoweight::new(vec![n], n * n, -1);
            let minus = AffCoweight::new(vec![-n], n * n, -1);
            assert_eq!(t.coeff_at(&plus), MotCoeff::one());
            assert_eq!(t.coeff_at(&minus), MotCoeff::one());
        }
        assert_eq!(t.coeff_at(&AffCoweight::new(vec![0], 0, -1)), MotCoeff::one());
    }

    #[test]
    fn blowup_universal_series() {
        let rs = a1();
        let b = TorsorLabel::new(&rs, AffCoweight::new(vec![0], 0, -1)).unwrap();
        let f = blowup_f(&rs, &b, 3).unwrap();
        assert_eq!(f.coeff(0), MotCoeff::one());
        assert_eq!(f.coeff(1), MotCoeff::int(2).mul_s_pow(4));
        assert_eq!(
            f.coeff(2),
            &MotCoeff::int(2).mul_s_pow(8) - &MotCoeff::int(2).mul_s_pow(4)
        );
        assert_eq!(
            f.coeff(3),
            &MotCoeff::int(2).mul_s_pow(12) - &MotCoeff::int(2).mul_s_pow(4)
        );
        // point counts at L = 2: 1, 8, 24, 120
        let f2 = f.eval_tate(2).unwrap();
        for (k, want) in [(0i64, 1i64), (1, 8), (2, 24), (3, 120)] {
            assert_eq!(f2.coeff(k), MotCoeff::int(want), "q^{k}");
        }
    }

    #[test]
    fn blowup_specializes_to_theta() {
        let rs = a1();
        for d in [1i64, 2] {
            for label in crate::affine::torsor_labels(&rs, d).unwrap() {
                let f = blowup_f(&rs, &label, 8).unwrap().eval_tate(1).unwrap();
                let t = theta_zero(&rs, d, &label.coweight().finite, label.coweight().central, 8)
                    .unwrap();
                for k in -8..=8i64 {
                    assert_eq!(f.coeff(k), t.coeff(k), "d={d} q^{k}");
                }
            }
        }
    }

    /// Non-simply-laced forms against classical lattice counts: the B2
    /// coroot form is equivalent to the square lattice (theta coefficients
    /// count representations as a sum of two squares), and the G2 coroot
    /// form to the hexagonal lattice.
    #[test]
    fn theta_non_simply_laced() {
        let b2 = Arc::new(build_root_system(SeriesType::B, 2).unwrap());
        let t = theta_zero(&b2, 1, &[0, 0], 0, 10).unwrap();
        // r_2(n) for n = 0..10
        let r2 = [1i64, 4, 4, 0, 4, 8, 0, 0, 4, 4, 8];
        for (n, want) in r2.iter().enumerate() {
            assert_eq!(t.coeff(n as i64), MotCoeff::int(*want), "B2 q^{n}");
        }
        let g2 = Arc::new(build_root_system(SeriesType::G, 2).unwrap());
        let t = theta_zero(&g2, 1, &[0, 0], 0, 4).unwrap();
        // hexagonal lattice: 1, 6, 0, 6, 6
        for (n, want) in [1i64, 6, 0, 6, 6].iter().enumerate() {
            assert_eq!(t.coeff(n as i64), MotCoeff::int(*want), "G2 q^{n}");
        }
    }

    #[test]
    fn character_denominator_identity() {
        let rs = a1();
        // lambda = 0: the character collapses to 1
        let chi = weyl_kac_character(&rs, &AffCoweight::zero(1), 6, true).unwrap();
        assert!(
            chi.agrees_with(&LatticeSeries::one(rs.clone()), 6),
            "{:?}",
            chi.first_difference(&LatticeSeries::one(rs.clone()), 6)
        );
    }

    #[test]
    fn character_highest_weight_coefficient() {
        let rs = a1();
        let lam = AffCoweight::new(vec![0], 0, 1);
        let chi = weyl_kac_character(&rs, &lam, 6, true).unwrap();
        assert_eq!(chi.coeff_at(&lam.neg()), MotCoeff::one());
    }

    #[test]
    fn character_matches_freudenthal() {
        let rs = a1();
        let lam = AffCoweight::new(vec![0], 0, 1);
        let depth = 6;
        let chi = weyl_kac_character(&rs, &lam, depth, true).unwrap();
        let mult = freudenthal_multiplicities(&rs, &lam, depth).unwrap();
        // every character coefficient within depth equals the oracle's
        for (exp, c) in chi.iter() {
            let mu = exp.neg();
            let want = mult.get(&mu).cloned().unwrap_or_else(BigInt::zero);
            assert_eq!(c, &MotCoeff::big(want.clone()), "weight {mu:?}");
        }
        // and the oracle's support is all present
        for (mu, m) in &mult {
            if grade(&rs, &mu.neg()) <= chi.window().h {
                assert_eq!(chi.coeff_at(&mu.neg()), MotCoeff::big(m.clone()));
            }
        }
    }

    #[test]
    fn funceq_residual_identity_element() {
        let p = universal_params(6);
        let n = numerator_n(&p).unwrap();
        let e = AffWeylElt::identity(&p.rs);
        let rep = funceq_residual(&p, &n, &e).unwrap();
        assert_eq!(rep.vanishing.len(), 4, "identity vanishes for every variant");
    }

    /// At the Euler specialization the numerator functional equation holds
    /// monomially for the resolved convention, for every tested group
    /// element and index: this is the classical quasi-invariance of the
    /// theta-type numerator. (At generic L the layer supports obstruct every
    /// monomial variant; the acceptance suite documents that finding.)
    #[test]
    fn funceq_residual_vanishes_at_euler() {
        let rs = a1();
        for d in [1i64, 2] {
            let b = TorsorLabel::new(&rs, AffCoweight::new(vec![0], 0, -d)).unwrap();
            let p = EisParams::new(rs.clone(), b, 8);
            let n = numerator_n(&p).unwrap();
            for elt in [
                AffWeylElt::simple_reflection(&rs, 0).unwrap(),
                AffWeylElt::simple_reflection(&rs, 1).unwrap(),
                AffWeylElt::pure_translation(&rs, vec![1]),
            ] {
                let rep = funceq_residual(&p, &n, &elt).unwrap();
                let resolved_at_1 = rep.resolved.specialize(&crate::coeff::SpecMode::Euler).unwrap();
                assert!(
                    resolved_at_1.is_empty(),
                    "d = {d}, w = {elt:?}: euler residual {resolved_at_1:?}"
                );
                // and the resolved variant is the only one that works for
                // translations (reflections identify the two map variants)
                for (v, r) in &rep.residuals {
                    let at1 = r.specialize(&crate::coeff::SpecMode::Euler).unwrap();
                    if at1.is_empty() && elt.trans.iter().any(|&c| c != 0) && elt.fin.is_identity()
                    {
                        assert_eq!(*v, p.convention.funceq, "unexpected extra vanishing variant");
                    }
                }
            }
        }
    }

    /// Rank-two cross-check of the Euler-level quasi-invariance: all three
    /// kinds of simple affine reflections of A2 and a translation.
    #[test]
    fn funceq_euler_vanishes_a2() {
        let rs = Arc::new(build_root_system(SeriesType::A, 2).unwrap());
        let b = TorsorLabel::new(&rs, AffCoweight::new(vec![0, 0], 0, -1)).unwrap();
        let p = EisParams::new(rs.clone(), b, 5);
        let n = numerator_n(&p).unwrap();
        for elt in [
            AffWeylElt::simple_reflection(&rs, 0).unwrap(),
            AffWeylElt::simple_reflection(&rs, 1).unwrap(),
            AffWeylElt::simple_reflection(&rs, 2).unwrap(),
            AffWeylElt::pure_translation(&rs, vec![1, 0]),
        ] {
            let rep = funceq_residual(&p, &n, &elt).unwrap();
            let at1 = rep.resolved.specialize(&crate::coeff::SpecMode::Euler).unwrap();
            assert!(at1.is_empty(), "w = {elt:?}: {at1:?}");
        }
    }

    /// At generic L the monomial-level residual for the finite reflection is
    /// nonzero in every variant: the constant-q layers of the numerator have
    /// support windows incompatible with any layer-preserving substitution.
    /// The equality holds analytically but not termwise; the residual must
    /// nevertheless specialize to zero at L := 1.
    #[test]
    fn funceq_generic_residual_documented() {
        let p = universal_params(8);
        let n = numerator_n(&p).unwrap();
        let s = AffWeylElt::simple_reflection(&p.rs, 1).unwrap();
        let rep = funceq_residual(&p, &n, &s).unwrap();
        assert!(rep.vanishing.is_empty(), "no generic-L variant vanishes for s1");
        for (_, r) in &rep.residuals {
            let at1 = r.specialize(&crate::coeff::SpecMode::Euler).unwrap();
            let _ = at1;
        }
        let resolved_at_1 = rep.resolved.specialize(&crate::coeff::SpecMode::Euler).unwrap();
        assert!(resolved_at_1.is_empty());
    }

    #[test]
    fn numerator_v_homogeneous() {
        let p = universal_params(6);
        let n = numerator_n(&p).unwrap();
        assert_eq!(n.common_loop(), Some(-1));
        // the constant-q layer collapses to (1 + L)(1 - L y)
        let one_plus_l = &MotCoeff::one() + &MotCoeff::tate();
        assert_eq!(n.coeff_at(&AffCoweight::new(vec![0], 0, -1)), one_plus_l);
        assert_eq!(
            n.coeff_at(&AffCoweight::new(vec![1], 0, -1)),
            -&(&one_plus_l * &MotCoeff::tate())
        );
        for k in 2..=6i64 {
            assert!(n.coeff_at(&AffCoweight::new(vec![k], 0, -1)).is_zero(), "q^0 y^{k}");
        }
    }

    /// Coefficients of E and F are measures of schemes: their point counts
    /// are non-negative integers.
    #[test]
    fn point_count_positivity() {
        let p = universal_params(8);
        let e = eisenstein_e(&p).unwrap();
        let f = blowup_f(&p.rs, &p.b, 8).unwrap();
        for q in [2i64, 3] {
            let eq = e.eval_tate(q).unwrap();
            assert!(eq.iter().all(|(_, c)| c.all_nonnegative()), "E at L={q}");
            let fq = f.eval_tate(q).unwrap();
            assert!(fq.iter().all(|(_, c)| c.all_nonnegative()), "F at L={q}");
        }
    }

    /// The definitional symmetrization is truncation-stable: its low-grade
    /// coefficients do not change as the window grows, so its divergence
    /// from the closed form is not a truncation artifact. The specific
    /// coefficient pinned here is the one reported by the acceptance suite.
    #[test]
    fn hall_definition_truncation_stable() {
        let rs = a1();
        let b = TorsorLabel::new(&rs, AffCoweight::new(vec![0], 0, -1)).unwrap();
        let probe = AffCoweight::new(vec![-1], 1, -1);
        let mut seen = Vec::new();
        for h in [2i64, 4, 6, 8] {
            let p = EisParams::new(rs.clone(), b.clone(), h);
            let def = hall_p(&p, HallForm::Definition).unwrap();
            seen.push(def.coeff_at(&probe));
        }
        for w in seen.windows(2) {
            assert_eq!(w[0], w[1], "definitional coefficient drifts with the window");
        }
        // L^3 + L^2 - L + L^{-1}
        let want = MotCoeff::from_terms([
            (6, 1.into()),
            (4, 1.into()),
            (2, (-1).into()),
            (-2, 1.into()),
        ]);
        assert_eq!(seen[0], want);
        // while the closed form carries L^3 + 1 there
        let p = EisParams::new(rs.clone(), b, 8);
        let closed = hall_p(&p, HallForm::Closed).unwrap();
        let want_closed = MotCoeff::from_terms([(6, 1.into()), (0, 1.into())]);
        assert_eq!(closed.coeff_at(&probe), want_closed);
    }

    /// At L := 0 the closed Hall polynomial collapses to the base monomial
    /// over the product of (1 - t^gamma) across the positive real coroots;
    /// only the identity summand survives the length and grade weights.
    #[test]
    fn hall_at_zero_is_shifted_inverse_product() {
        let rs = a1();
        let b = TorsorLabel::new(&rs, AffCoweight::new(vec![0], 0, -1)).unwrap();
        let h = 8;
        let p = EisParams::new(rs.clone(), b.clone(), h);
        let hall0 = hall_p(&p, HallForm::Closed).unwrap().eval_tate(0).unwrap();
        let mut expect = LatticeSeries::monomial(rs.clone(), b.coweight().clone(), MotCoeff::one());
        for (_, co) in crate::affine::positive_coroots_up_to(&rs, h) {
            let inv = LatticeSeries::expand_unit_inverse(rs.clone(), &MotCoeff::one(), &co, h)
                .unwrap();
            expect = expect.mul(&inv).unwrap();
        }
        assert!(
            hall0.agrees_with(&expect, h),
            "{:?}",
            hall0.first_difference(&expect, h)
        );
        // in particular the coefficient at b + alpha^vee is 1, which no
        // weight multiplicity of the highest-weight module can match
        assert_eq!(
            hall0.coeff_at(&AffCoweight::new(vec![1], 0, -1)),
            MotCoeff::one()
        );
    }

    /// A2 cross-check of the blowup-theta degeneration, exercising the
    /// rank-two lattice ball and the full root set in the product.
    #[test]
    fn blowup_a2_specializes_to_theta() {
        let rs = Arc::new(build_root_system(SeriesType::A, 2).unwrap());
        let b = TorsorLabel::new(&rs, AffCoweight::new(vec![0, 0], 0, -1)).unwrap();
        let f = blowup_f(&rs, &b, 6).unwrap().eval_tate(1).unwrap();
        let t = theta_zero(&rs, 1, &[0, 0], 0, 6).unwrap();
        for k in 0..=6i64 {
            assert_eq!(f.coeff(k), t.coeff(k), "q^{k}");
        }
        // hexagonal lattice: 1 + 6q + 6q^3 + 6q^4 + ...
        assert_eq!(t.coeff(0), MotCoeff::one());
        assert_eq!(t.coeff(1), MotCoeff::int(6));
        assert!(t.coeff(2).is_zero());
        assert_eq!(t.coeff(3), MotCoeff::int(6));
        assert_eq!(t.coeff(4), MotCoeff::int(6));
    }
}
