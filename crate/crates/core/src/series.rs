//! Truncated exact formal series on the affine coweight lattice.
//!
//! A series carries its validity window as data: `gmin` is the support
//! floor (no terms below it, known exactly) and `h` the grade up to which
//! all coefficients are certified. `H_INF` marks exact finite series.
//! Binary operations compute the sound output window; silent precision loss
//! is the bug class this bookkeeping exists to kill.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::affine::{grade, AffCoweight, AffWeight, AffWeylElt};
use crate::coeff::{MotCoeff, SpecMode};
use crate::rootsys::RootSystem;
use crate::{Error, Result};

/// Sentinel grade bound for exact (untruncated) finite series.
pub const H_INF: i64 = i64::MAX / 4;

fn wadd(a: i64, b: i64) -> i64 {
    a.saturating_add(b).min(H_INF)
}

/// Validity window of a truncated series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Window {
    pub gmin: i64,
    pub h: i64,
}

impl Window {
    pub fn new(gmin: i64, h: i64) -> Self {
        Window { gmin, h }
    }

    pub fn exact(gmin: i64) -> Self {
        Window { gmin, h: H_INF }
    }

    pub fn is_exact(&self) -> bool {
        self.h >= H_INF
    }
}

/// Term key ordered canonically by (grade, central, finite, loop).
#[derive(Clone, PartialEq, Eq)]
struct Key {
    grade: i64,
    exp: AffCoweight,
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.grade, self.exp.central, &self.exp.finite, self.exp.loop_part).cmp(&(
            other.grade,
            other.exp.central,
            &other.exp.finite,
            other.exp.loop_part,
        ))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Truncated formal sum over the affine coweight lattice with `MotCoeff`
/// coefficients, graded by `<rho_hat, .>`.
#[derive(Clone)]
pub struct LatticeSeries {
    rs: Arc<RootSystem>,
    window: Window,
    terms: BTreeMap<Key, MotCoeff>,
}

impl PartialEq for LatticeSeries {
    fn eq(&self, other: &Self) -> bool {
        self.window == other.window
            && self.terms.len() == other.terms.len()
            && self
                .terms
                .iter()
                .zip(&other.terms)
                .all(|((ka, ca), (kb, cb))| ka.exp == kb.exp && ca == cb)
    }
}

impl LatticeSeries {
    pub fn zero(rs: Arc<RootSystem>, window: Window) -> Self {
        LatticeSeries { rs, window, terms: BTreeMap::new() }
    }

    pub fn one(rs: Arc<RootSystem>) -> Self {
        let rank = rs.rank;
        Self::monomial(rs, AffCoweight::zero(rank), MotCoeff::one())
    }

    pub fn monomial(rs: Arc<RootSystem>, exp: AffCoweight, coeff: MotCoeff) -> Self {
        let g = grade(&rs, &exp);
        let mut s = LatticeSeries { rs, window: Window::exact(g), terms: BTreeMap::new() };
        s.insert(exp, coeff);
        s
    }

    pub fn rs(&self) -> &Arc<RootSystem> {
        &self.rs
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&AffCoweight, &MotCoeff)> + '_ {
        self.terms.iter().map(|(k, c)| (&k.exp, c))
    }

    pub fn coeff_at(&self, exp: &AffCoweight) -> MotCoeff {
        let key = Key { grade: grade(&self.rs, exp), exp: exp.clone() };
        self.terms.get(&key).cloned().unwrap_or_else(MotCoeff::zero)
    }

    /// Insert-or-accumulate, dropping terms above the window and adjusting
    /// the support floor downwards when needed.
    pub fn insert(&mut self, exp: AffCoweight, coeff: MotCoeff) {
        if coeff.is_zero() {
            return;
        }
        let g = grade(&self.rs, &exp);
        if g > self.window.h {
            return;
        }
        if g < self.window.gmin {
            self.window.gmin = g;
        }
        let key = Key { grade: g, exp };
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get() + &coeff;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn add(&self, rhs: &LatticeSeries) -> LatticeSeries {
        assert!(self.rs == rhs.rs, "mismatched root systems");
        let window =
            Window::new(self.window.gmin.min(rhs.window.gmin), self.window.h.min(rhs.window.h));
        let mut out = LatticeSeries::zero(self.rs.clone(), window);
        for (k, c) in &self.terms {
            if k.grade <= window.h {
                out.insert(k.exp.clone(), c.clone());
            }
        }
        for (k, c) in &rhs.terms {
            if k.grade <= window.h {
                out.insert(k.exp.clone(), c.clone());
            }
        }
        out
    }

    pub fn neg(&self) -> LatticeSeries {
        let mut out = LatticeSeries::zero(self.rs.clone(), self.window);
        for (k, c) in &self.terms {
            out.terms.insert(k.clone(), -c);
        }
        out
    }

    pub fn sub(&self, rhs: &LatticeSeries) -> LatticeSeries {
        self.add(&rhs.neg())
    }

    pub fn scale(&self, c: &MotCoeff) -> LatticeSeries {
        let mut out = LatticeSeries::zero(self.rs.clone(), self.window);
        if c.is_zero() {
            return out;
        }
        for (k, v) in &self.terms {
            let p = v * c;
            if !p.is_zero() {
                out.terms.insert(k.clone(), p);
            }
        }
        out
    }

    /// Product with the convolution window rule: the result is certified up
    /// to `min(h_a + gmin_b, h_b + gmin_a)` and supported at or above
    /// `gmin_a + gmin_b`.
    pub fn mul(&self, rhs: &LatticeSeries) -> Result<LatticeSeries> {
        if self.rs != rhs.rs {
            return Err(Error::MismatchedRootSystems);
        }
        let gmin = wadd(self.window.gmin, rhs.window.gmin);
        let h = wadd(self.window.h, rhs.window.gmin).min(wadd(rhs.window.h, self.window.gmin));
        if h < gmin {
            return Err(Error::WindowUnderflow(format!("product window [{gmin}, {h}] is empty")));
        }
        let mut out = LatticeSeries::zero(self.rs.clone(), Window::new(gmin, h));
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                if wadd(ka.grade, kb.grade) > h {
                    continue;
                }
                out.insert(ka.exp.add(&kb.exp), ca * cb);
            }
        }
        Ok(out)
    }

    /// Drop terms above `h` and tighten the window.
    pub fn truncate(&self, h: i64) -> LatticeSeries {
        let window = Window::new(self.window.gmin, self.window.h.min(h));
        let mut out = LatticeSeries::zero(self.rs.clone(), window);
        for (k, c) in &self.terms {
            if k.grade <= window.h {
                out.terms.insert(k.clone(), c.clone());
            }
        }
        out
    }

    /// Geometric series `sum_k c^k t^{k mu}` truncated at grade `h`.
    /// Requires `grade(mu) >= 1`.
    pub fn expand_unit_inverse(
        rs: Arc<RootSystem>,
        c: &MotCoeff,
        mu: &AffCoweight,
        h: i64,
    ) -> Result<LatticeSeries> {
        let g = grade(&rs, mu);
        if g < 1 {
            return Err(Error::NonExpandable(format!("direction has grade {g}, need >= 1")));
        }
        let mut out = LatticeSeries::zero(rs, Window::new(0, h));
        let mut acc = MotCoeff::one();
        let mut exp = AffCoweight::zero(mu.finite.len());
        let mut k = 0i64;
        while k * g <= h {
            out.insert(exp.clone(), acc.clone());
            acc = &acc * c;
            if acc.is_zero() {
                break;
            }
            exp = exp.add(mu);
            k += 1;
        }
        Ok(out)
    }

    /// Series `sum_{k >= 0} f(k) t^{k mu}` truncated at grade `h`, for a
    /// direction of positive grade.
    pub fn from_powers(
        rs: Arc<RootSystem>,
        mu: &AffCoweight,
        h: i64,
        f: impl Fn(i64) -> MotCoeff,
    ) -> Result<LatticeSeries> {
        let g = grade(&rs, mu);
        if g < 1 {
            return Err(Error::NonExpandable(format!("direction has grade {g}, need >= 1")));
        }
        let mut out = LatticeSeries::zero(rs, Window::new(0, h));
        let mut exp = AffCoweight::zero(mu.finite.len());
        let mut k = 0i64;
        while k * g <= h {
            out.insert(exp.clone(), f(k));
            exp = exp.add(mu);
            k += 1;
        }
        Ok(out)
    }

    /// Monomial-wise substitution `t -> L^nu w(t)`, i.e.
    /// `t^mu -> L^{<nu, mu>} t^{w^{-1}(mu)}`. The window is recomputed from
    /// the image grades; exact inputs stay exact.
    pub fn weyl_twist_substitute(&self, w: &AffWeylElt, nu: &AffWeight) -> LatticeSeries {
        let w_inv = w.inverse(&self.rs);
        let mut imgs: Vec<(AffCoweight, MotCoeff)> = Vec::with_capacity(self.terms.len());
        let mut gmin = i64::MAX;
        let mut gmax = i64::MIN;
        for (k, c) in &self.terms {
            let img = w_inv.act_coweight(&self.rs, &k.exp);
            let g = grade(&self.rs, &img);
            gmin = gmin.min(g);
            gmax = gmax.max(g);
            let twist = crate::affine::pair(&self.rs, nu, &k.exp);
            imgs.push((img, c.mul_s_pow(2 * twist)));
        }
        if imgs.is_empty() {
            return LatticeSeries::zero(self.rs.clone(), self.window);
        }
        let h = if self.window.is_exact() { H_INF } else { gmax };
        let mut out = LatticeSeries::zero(self.rs.clone(), Window::new(gmin, h));
        for (exp, c) in imgs {
            out.insert(exp, c);
        }
        out
    }

    /// Restrict to the terms with a given central component.
    pub fn q_layer(&self, c: i64) -> LatticeSeries {
        let mut out = LatticeSeries::zero(self.rs.clone(), self.window);
        for (k, v) in &self.terms {
            if k.exp.central == c {
                out.terms.insert(k.clone(), v.clone());
            }
        }
        out
    }

    /// The common loop component, if the series is v-homogeneous.
    pub fn common_loop(&self) -> Option<i64> {
        let mut it = self.terms.keys();
        let first = it.next()?.exp.loop_part;
        it.all(|k| k.exp.loop_part == first).then_some(first)
    }

    /// Equality of coefficients for all grades `<= h` (and within both
    /// windows).
    pub fn agrees_with(&self, rhs: &LatticeSeries, h: i64) -> bool {
        self.first_difference(rhs, h).is_none()
    }

    /// First monomial (canonical order) at which the two series differ,
    /// restricted to grades `<= h` within both windows.
    pub fn first_difference(
        &self,
        rhs: &LatticeSeries,
        h: i64,
    ) -> Option<(AffCoweight, MotCoeff, MotCoeff)> {
        let h = h.min(self.window.h).min(rhs.window.h);
        let mut keys: Vec<&Key> = self.terms.keys().chain(rhs.terms.keys()).collect();
        keys.sort();
        keys.dedup_by(|a, b| a == b);
        for k in keys {
            if k.grade > h {
                continue;
            }
            let a = self.coeff_at(&k.exp);
            let b = rhs.coeff_at(&k.exp);
            if a != b {
                return Some((k.exp.clone(), a, b));
            }
        }
        None
    }

    /// Map every coefficient through a specialization; zero results drop out.
    pub fn specialize(&self, mode: &SpecMode) -> Result<LatticeSeries> {
        let mut out = LatticeSeries::zero(self.rs.clone(), self.window);
        for (k, c) in &self.terms {
            let v = match c.specialize(mode)? {
                crate::coeff::Specialized::Coeff(c) => c,
                crate::coeff::Specialized::Integer(n) => MotCoeff::big(n),
            };
            if !v.is_zero() {
                out.terms.insert(k.clone(), v);
            }
        }
        Ok(out)
    }

    /// Substitute an integer value for the Tate class in every coefficient.
    pub fn eval_tate(&self, v: i64) -> Result<LatticeSeries> {
        let big = BigInt::from(v);
        let mut out = LatticeSeries::zero(self.rs.clone(), self.window);
        for (k, c) in &self.terms {
            let n = c.eval_tate(&big)?;
            if n != BigInt::ZERO {
                out.terms.insert(k.clone(), MotCoeff::big(n));
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "window": {
                "gmin": self.window.gmin,
                "H": if self.window.is_exact() { serde_json::Value::Null } else { self.window.h.into() },
            },
            "terms": self.terms.iter().map(|(k, c)| serde_json::json!({
                "z": k.exp.finite,
                "q": k.exp.central,
                "v": k.exp.loop_part,
                "coeff": c.to_json(),
            })).collect::<Vec<_>>(),
            "order": "canonical",
        })
    }

    pub fn from_json(rs: Arc<RootSystem>, v: &serde_json::Value) -> Result<LatticeSeries> {
        let bad = |m: String| Error::MalformedInput(format!("series json: {m}"));
        let w = v.get("window").ok_or_else(|| bad("missing window".into()))?;
        let gmin = w
            .get("gmin")
            .and_then(|x| x.as_i64())
            .ok_or_else(|| bad("missing gmin".into()))?;
        let h = match w.get("H") {
            Some(serde_json::Value::Null) | None => H_INF,
            Some(x) => x.as_i64().ok_or_else(|| bad("bad H".into()))?,
        };
        let mut out = LatticeSeries::zero(rs, Window::new(gmin, h));
        let terms =
            v.get("terms").and_then(|t| t.as_array()).ok_or_else(|| bad("missing terms".into()))?;
        for t in terms {
            let z: Vec<i64> = t
                .get("z")
                .and_then(|z| z.as_array())
                .ok_or_else(|| bad("missing z".into()))?
                .iter()
                .map(|x| x.as_i64().ok_or_else(|| bad("bad z entry".into())))
                .collect::<Result<_>>()?;
            let q = t.get("q").and_then(|x| x.as_i64()).ok_or_else(|| bad("missing q".into()))?;
            let vv = t.get("v").and_then(|x| x.as_i64()).ok_or_else(|| bad("missing v".into()))?;
            let coeff: MotCoeff =
                serde_json::from_value(t.get("coeff").cloned().ok_or_else(|| bad("missing coeff".into()))?)
                    .map_err(|e| bad(format!("bad coeff: {e}")))?;
            out.insert(AffCoweight::new(z, q, vv), coeff);
        }
        Ok(out)
    }
}

impl fmt::Debug for LatticeSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "LatticeSeries[{}..{}] {{",
            self.window.gmin,
            if self.window.is_exact() { "inf".to_string() } else { self.window.h.to_string() }
        )?;
        for (k, c) in &self.terms {
            writeln!(f, "  q^{} z{:?} v^{}: {}", k.exp.central, k.exp.finite, k.exp.loop_part, c)?;
        }
        write!(f, "}}")
    }
}

/// Merge many series into one accumulator; order-independent because series
/// addition is an associative-commutative merge.
pub fn sum_series(rs: Arc<RootSystem>, window: Window, parts: Vec<LatticeSeries>) -> LatticeSeries {
    let mut acc = LatticeSeries::zero(rs, window);
    for p in parts {
        for (exp, c) in p.iter() {
            acc.insert(exp.clone(), c.clone());
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::alpha0_coroot;
    use crate::rootsys::{build_root_system, SeriesType};

    fn a1() -> Arc<RootSystem> {
        Arc::new(build_root_system(SeriesType::A, 1).unwrap())
    }

    fn coroot_dir() -> AffCoweight {
        AffCoweight::new(vec![1], 0, 0)
    }

    #[test]
    fn monomial_products() {
        let rs = a1();
        let a = LatticeSeries::monomial(rs.clone(), AffCoweight::new(vec![1], 0, 0), MotCoeff::tate());
        let b = LatticeSeries::monomial(rs.clone(), AffCoweight::new(vec![0], 1, -1), MotCoeff::int(3));
        let p = a.mul(&b).unwrap();
        assert_eq!(p.len(), 1);
        let (exp, c) = p.iter().next().unwrap();
        assert_eq!(exp, &AffCoweight::new(vec![1], 1, -1));
        assert_eq!(c, &(&MotCoeff::tate() * &MotCoeff::int(3)));
        let one = LatticeSeries::one(rs.clone());
        assert!(a.mul(&one).unwrap().agrees_with(&a, H_INF));
    }

    #[test]
    fn geometric_telescopes() {
        let rs = a1();
        let mu = coroot_dir();
        let geo = LatticeSeries::expand_unit_inverse(rs.clone(), &MotCoeff::one(), &mu, 8).unwrap();
        let one = LatticeSeries::one(rs.clone());
        let tmu = LatticeSeries::monomial(rs.clone(), mu.clone(), MotCoeff::one());
        let lhs = one.sub(&tmu).mul(&geo).unwrap();
        assert!(lhs.agrees_with(&LatticeSeries::one(rs.clone()), 8));
    }

    #[test]
    fn expand_unit_inverse_examples() {
        let rs = a1();
        // direction alpha_0^vee: 1 + q z^{-1} + q^2 z^{-2}
        let geo =
            LatticeSeries::expand_unit_inverse(rs.clone(), &MotCoeff::one(), &alpha0_coroot(&rs), 2)
                .unwrap();
        assert_eq!(geo.len(), 3);
        assert_eq!(geo.coeff_at(&AffCoweight::new(vec![-1], 1, 0)), MotCoeff::one());
        assert_eq!(geo.coeff_at(&AffCoweight::new(vec![-2], 2, 0)), MotCoeff::one());
        // c = 0 gives 1
        let geo =
            LatticeSeries::expand_unit_inverse(rs.clone(), &MotCoeff::zero(), &coroot_dir(), 5)
                .unwrap();
        assert!(geo.agrees_with(&LatticeSeries::one(rs.clone()), 5));
        // c = L^2 geometric
        let geo = LatticeSeries::expand_unit_inverse(
            rs.clone(),
            &MotCoeff::tate_pow(2),
            &coroot_dir(),
            3,
        )
        .unwrap();
        for k in 0..=3i64 {
            assert_eq!(geo.coeff_at(&AffCoweight::new(vec![k], 0, 0)), MotCoeff::tate_pow(2 * k));
        }
        assert!(LatticeSeries::expand_unit_inverse(
            rs.clone(),
            &MotCoeff::one(),
            &AffCoweight::new(vec![-1], 0, 0),
            5
        )
        .is_err());
    }

    #[test]
    fn twist_identity_and_monomial() {
        let rs = a1();
        let mu = AffCoweight::new(vec![2], 1, -1);
        let f = LatticeSeries::monomial(rs.clone(), mu.clone(), MotCoeff::one());
        let e = AffWeylElt::identity(&rs);
        let zero_nu = AffWeight::new(vec![0], 0, 0);
        assert!(f.weyl_twist_substitute(&e, &zero_nu).agrees_with(&f, H_INF));
        let nu = AffWeight::new(vec![1], 0, 0);
        let g = f.weyl_twist_substitute(&e, &nu);
        let expect = crate::affine::pair(&rs, &nu, &mu);
        assert_eq!(g.coeff_at(&mu), MotCoeff::tate_pow(expect));
    }

    #[test]
    fn twist_composition_law() {
        let rs = a1();
        let f = {
            let mut s = LatticeSeries::zero(rs.clone(), Window::exact(-10));
            s.insert(AffCoweight::new(vec![1], 0, -1), MotCoeff::tate());
            s.insert(AffCoweight::new(vec![-1], 2, -1), MotCoeff::int(5));
            s
        };
        let w1 = AffWeylElt::pure_translation(&rs, vec![1]);
        let w2 = AffWeylElt::simple_reflection(&rs, 1).unwrap();
        let nu1 = AffWeight::new(vec![2], 0, 0);
        let nu2 = AffWeight::new(vec![0], 1, 0);
        let lhs = f.weyl_twist_substitute(&w1, &nu1).weyl_twist_substitute(&w2, &nu2);
        // composed rule: t^mu -> L^{<nu1,mu> + <nu2, w1^{-1}(mu)>} t^{(w1 w2)^{-1} mu}
        let w12 = w1.compose(&rs, &w2);
        let mut rhs = LatticeSeries::zero(rs.clone(), Window::exact(-10));
        for (exp, c) in f.iter() {
            let img = w12.inverse(&rs).act_coweight(&rs, exp);
            let tw = crate::affine::pair(&rs, &nu1, exp)
                + crate::affine::pair(&rs, &nu2, &w1.inverse(&rs).act_coweight(&rs, exp));
            rhs.insert(img, c.mul_s_pow(2 * tw));
        }
        assert!(lhs.agrees_with(&rhs, H_INF));
    }

    #[test]
    fn q_layers_partition() {
        let rs = a1();
        let mut f = LatticeSeries::zero(rs.clone(), Window::new(0, 10));
        f.insert(AffCoweight::new(vec![0], 0, -1), MotCoeff::one());
        f.insert(AffCoweight::new(vec![1], 1, -1), MotCoeff::tate());
        f.insert(AffCoweight::new(vec![-1], 1, -1), MotCoeff::int(2));
        let l0 = f.q_layer(0);
        let l1 = f.q_layer(1);
        assert_eq!(l0.len(), 1);
        assert_eq!(l1.len(), 2);
        assert!(l0.add(&l1).agrees_with(&f, 10));
        let one = LatticeSeries::one(rs.clone());
        assert!(one.q_layer(0).agrees_with(&one, H_INF));
        assert!(one.q_layer(3).is_empty());
    }

    #[test]
    fn truncation_coherence() {
        let rs = a1();
        let a = LatticeSeries::expand_unit_inverse(rs.clone(), &MotCoeff::tate(), &coroot_dir(), 9)
            .unwrap();
        let b =
            LatticeSeries::expand_unit_inverse(rs.clone(), &MotCoeff::int(3), &alpha0_coroot(&rs), 9)
                .unwrap();
        let full = a.mul(&b).unwrap();
        let direct = a.truncate(5).mul(&b.truncate(5)).unwrap();
        assert!(full.truncate(5).agrees_with(&direct, 5));
        assert_eq!(full.truncate(5).window().h, 5);
    }

    #[test]
    fn mul_commutative_associative() {
        let rs = a1();
        let a = LatticeSeries::expand_unit_inverse(rs.clone(), &MotCoeff::tate(), &coroot_dir(), 7)
            .unwrap();
        let b =
            LatticeSeries::expand_unit_inverse(rs.clone(), &MotCoeff::one(), &alpha0_coroot(&rs), 7)
                .unwrap();
        let c = LatticeSeries::monomial(rs.clone(), AffCoweight::new(vec![0], 1, 0), MotCoeff::int(2));
        assert!(a.mul(&b).unwrap().agrees_with(&b.mul(&a).unwrap(), 7));
        let ab_c = a.mul(&b).unwrap().mul(&c).unwrap();
        let a_bc = a.mul(&b.mul(&c).unwrap()).unwrap();
        let h = ab_c.window().h.min(a_bc.window().h);
        assert!(ab_c.agrees_with(&a_bc, h));
    }

    #[test]
    fn sum_order_independent() {
        let rs = a1();
        let parts: Vec<LatticeSeries> = (0..6)
            .map(|i| {
                LatticeSeries::monomial(
                    rs.clone(),
                    AffCoweight::new(vec![i % 3], i, 0),
                    MotCoeff::int(i + 1),
                )
            })
            .collect();
        let w = Window::new(0, 50);
        let fwd = sum_series(rs.clone(), w, parts.clone());
        let mut rev = parts;
        rev.reverse();
        let bwd = sum_series(rs.clone(), w, rev);
        assert!(fwd.agrees_with(&bwd, 50));
    }

    #[test]
    fn json_roundtrip() {
        let rs = a1();
        let mut f = LatticeSeries::zero(rs.clone(), Window::new(-2, 9));
        f.insert(AffCoweight::new(vec![-1], 1, -1), MotCoeff::tate());
        f.insert(AffCoweight::new(vec![2], 0, -1), &MotCoeff::int(3) - &MotCoeff::s_pow(1));
        let j = f.to_json();
        let back = LatticeSeries::from_json(rs.clone(), &j).unwrap();
        assert!(f.agrees_with(&back, 9));
        assert_eq!(f.window(), back.window());
    }
}
