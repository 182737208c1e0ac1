//! The affine root system and affine Weyl group.
//!
//! Internal conventions follow Kac. An affine coweight is a triple
//! `a + c K + m d` with `a` in the finite coweight lattice, `c` the central
//! coefficient and `m` the loop coefficient; its monomial rendering is
//! `q^c z^a v^m`. An affine weight is `mu + l Lambda_0 + n delta`. The
//! pairing is `<(mu,l,n),(a,c,m)> = <mu,a> + l c + n m`.
//!
//! Real affine roots are `(beta, 0, n)` with `beta` a finite root; the
//! positive ones have `n > 0`, or `n = 0` and `beta` positive. The coroot of
//! `(beta, 0, n)` is `(beta^vee, n * kac(beta), 0)` where
//! `kac(beta) = 2/(beta,beta)`; for simply-laced systems this central
//! coefficient is just `n`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rootsys::{FiniteWeylElt, Root, RootSystem};
use crate::{Error, Result};

/// Element of the affine coweight lattice `L_aff`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AffCoweight {
    /// Finite part in simple-coroot coordinates.
    pub finite: Vec<i64>,
    /// Central coefficient (exponent of `q`).
    pub central: i64,
    /// Loop coefficient (exponent of `v`).
    pub loop_part: i64,
}

impl AffCoweight {
    pub fn new(finite: Vec<i64>, central: i64, loop_part: i64) -> Self {
        AffCoweight { finite, central, loop_part }
    }

    pub fn zero(rank: usize) -> Self {
        AffCoweight::new(vec![0; rank], 0, 0)
    }

    /// The canonical central element `K`.
    pub fn central_k(rank: usize) -> Self {
        AffCoweight::new(vec![0; rank], 1, 0)
    }

    pub fn add(&self, rhs: &AffCoweight) -> AffCoweight {
        AffCoweight {
            finite: self.finite.iter().zip(&rhs.finite).map(|(a, b)| a + b).collect(),
            central: self.central + rhs.central,
            loop_part: self.loop_part + rhs.loop_part,
        }
    }

    pub fn sub(&self, rhs: &AffCoweight) -> AffCoweight {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> AffCoweight {
        AffCoweight {
            finite: self.finite.iter().map(|a| -a).collect(),
            central: -self.central,
            loop_part: -self.loop_part,
        }
    }

    pub fn scale(&self, k: i64) -> AffCoweight {
        AffCoweight {
            finite: self.finite.iter().map(|a| k * a).collect(),
            central: k * self.central,
            loop_part: k * self.loop_part,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.central == 0 && self.loop_part == 0 && self.finite.iter().all(|&a| a == 0)
    }

    /// Exact halving; errors if any coordinate is odd.
    pub fn halve(&self) -> Result<AffCoweight> {
        let check = |v: i64| -> Result<i64> {
            if v % 2 != 0 {
                Err(Error::MalformedInput("non-integral halved coweight".into()))
            } else {
                Ok(v / 2)
            }
        };
        Ok(AffCoweight {
            finite: self.finite.iter().map(|&a| check(a)).collect::<Result<_>>()?,
            central: check(self.central)?,
            loop_part: check(self.loop_part)?,
        })
    }
}

impl fmt::Debug for AffCoweight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(z{:?} q^{} v^{})", self.finite, self.central, self.loop_part)
    }
}

/// Element of the affine weight lattice, `mu + level * Lambda_0 + degree * delta`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AffWeight {
    /// Finite part in fundamental-weight coordinates.
    pub finite: Vec<i64>,
    pub level: i64,
    pub degree: i64,
}

impl AffWeight {
    pub fn new(finite: Vec<i64>, level: i64, degree: i64) -> Self {
        AffWeight { finite, level, degree }
    }

    pub fn add(&self, rhs: &AffWeight) -> AffWeight {
        AffWeight {
            finite: self.finite.iter().zip(&rhs.finite).map(|(a, b)| a + b).collect(),
            level: self.level + rhs.level,
            degree: self.degree + rhs.degree,
        }
    }

    pub fn sub(&self, rhs: &AffWeight) -> AffWeight {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> AffWeight {
        AffWeight {
            finite: self.finite.iter().map(|a| -a).collect(),
            level: -self.level,
            degree: -self.degree,
        }
    }
}

impl fmt::Debug for AffWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(wt{:?} + {}*La0 + {}*delta)", self.finite, self.level, self.degree)
    }
}

/// `<(mu, l, n), (a, c, m)> = <mu, a> + l c + n m`.
pub fn pair(rs: &RootSystem, mu: &AffWeight, x: &AffCoweight) -> i64 {
    rs.pair(&mu.finite, &x.finite) + mu.level * x.central + mu.degree * x.loop_part
}

/// `rho + h^vee Lambda_0`; the grading weight.
pub fn rho_hat(rs: &RootSystem) -> AffWeight {
    AffWeight::new(rs.rho.clone(), rs.dual_coxeter, 0)
}

/// The coweight Weyl vector `rho^vee + h d`, kept doubled so it stays
/// integral. It pairs to 1 with every simple affine root: the Coxeter number
/// sits in the loop slot, and the central coefficient (which pairs with
/// nothing of level zero and cancels in every difference) is normalized to
/// zero. With this normalization `w(rho_hat_check) - rho_hat_check` is minus
/// the coroot sum over the inversion set of `w^{-1}`.
pub fn rho_hat_check2(rs: &RootSystem) -> AffCoweight {
    AffCoweight::new(rs.rho_check2.clone(), 0, 2 * rs.coxeter)
}

/// The grading functional `<rho_hat, x> = <rho, a> + h^vee c`; strictly
/// positive on every positive real affine coroot.
pub fn grade(rs: &RootSystem, x: &AffCoweight) -> i64 {
    rs.pair(&rs.rho, &x.finite) + rs.dual_coxeter * x.central
}

/// The affine root `(beta, 0, n)` attached to a finite root with a loop index.
pub fn real_root(rs: &RootSystem, root_idx: usize, n: i64) -> AffWeight {
    AffWeight::new(rs.roots[root_idx].wt.clone(), 0, n)
}

/// The extra simple root `alpha_0 = (-theta, 0, 1)`.
pub fn alpha0(rs: &RootSystem) -> AffWeight {
    let theta = &rs.roots[rs.theta];
    AffWeight::new(theta.wt.iter().map(|a| -a).collect(), 0, 1)
}

/// Coroot of the real affine root `(beta, 0, n)`.
pub fn coroot(rs: &RootSystem, root: &Root, n: i64) -> AffCoweight {
    AffCoweight::new(rs.coroot_of(root), n * root.kac, 0)
}

/// `alpha_0^vee = (-theta^vee, 1, 0)`.
pub fn alpha0_coroot(rs: &RootSystem) -> AffCoweight {
    AffCoweight::new(rs.theta_co.iter().map(|a| -a).collect(), 1, 0)
}

/// All positive real affine coroots of grade at most `h`, with their roots.
/// Ordered by (grade, finite coordinates, loop index); deterministic.
pub fn positive_coroots_up_to(rs: &RootSystem, h: i64) -> Vec<(AffWeight, AffCoweight)> {
    let mut out = Vec::new();
    for (idx, root) in rs.roots.iter().enumerate() {
        let mut n = if root.positive { 0 } else { 1 };
        loop {
            let co = coroot(rs, root, n);
            if grade(rs, &co) > h {
                break;
            }
            out.push((real_root(rs, idx, n), co));
            n += 1;
        }
    }
    out.sort_by_key(|(rt, co)| (grade(rs, co), rt.finite.clone(), rt.degree));
    out
}

/// Element `t_b . u` of the affine Weyl group `W x| L`: apply the finite
/// part `u` first, then translate by `b`.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffWeylElt {
    pub trans: Vec<i64>,
    pub fin: FiniteWeylElt,
}

impl fmt::Debug for AffWeylElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{:?}*{:?}", self.trans, self.fin)
    }
}

impl AffWeylElt {
    pub fn identity(rs: &RootSystem) -> Self {
        AffWeylElt { trans: vec![0; rs.rank], fin: rs.identity_elt().clone() }
    }

    pub fn pure_translation(rs: &RootSystem, trans: Vec<i64>) -> Self {
        AffWeylElt { trans, fin: rs.identity_elt().clone() }
    }

    pub fn finite(rs: &RootSystem, fin: FiniteWeylElt) -> Self {
        AffWeylElt { trans: vec![0; rs.rank], fin }
    }

    /// The simple affine reflection: `i = 0` is the extra node,
    /// `s_0 = t_{theta^vee} s_theta`; `i = 1..=rank` are the finite ones.
    pub fn simple_reflection(rs: &RootSystem, i: usize) -> Result<Self> {
        if i == 0 {
            let theta_wt = rs.roots[rs.theta].wt.clone();
            let s_theta = rs
                .weyl
                .iter()
                .find(|w| {
                    // reflection in theta: mu -> mu - <mu, theta^vee> theta
                    (0..rs.rank).all(|j| {
                        let mut e = vec![0i64; rs.rank];
                        e[j] = 1;
                        let expect: Vec<i64> = (0..rs.rank)
                            .map(|m| e[m] - rs.theta_co[j] * theta_wt[m])
                            .collect();
                        w.act_wt(&e) == expect
                    })
                })
                .ok_or_else(|| Error::InvalidRootSystem("missing theta reflection".into()))?
                .clone();
            Ok(AffWeylElt { trans: rs.theta_co.clone(), fin: s_theta })
        } else if i <= rs.rank {
            Ok(AffWeylElt::finite(rs, rs.simple_reflection(i - 1).clone()))
        } else {
            Err(Error::OutOfBounds(format!("no simple affine reflection s{i}")))
        }
    }

    pub fn compose(&self, rs: &RootSystem, rhs: &AffWeylElt) -> AffWeylElt {
        // (t_b u)(t_c v) = t_{b + u(c)} (u v)
        let uc = self.fin.act_co(&rhs.trans);
        let trans = self.trans.iter().zip(&uc).map(|(a, b)| a + b).collect();
        AffWeylElt { trans, fin: rs.compose(&self.fin, &rhs.fin).clone() }
    }

    pub fn inverse(&self, rs: &RootSystem) -> AffWeylElt {
        let fin_inv = rs.invert(&self.fin).clone();
        let trans = fin_inv.act_co(&self.trans).iter().map(|a| -a).collect();
        AffWeylElt { trans, fin: fin_inv }
    }

    pub fn is_identity(&self) -> bool {
        self.fin.is_identity() && self.trans.iter().all(|&c| c == 0)
    }

    /// Action on the affine coweight lattice: the finite part acts on the
    /// finite coordinates, then translation by `b` sends `(a, c, m)` to
    /// `(a + m b, c + psi(a, b) + m psi(b, b)/2, m)`.
    pub fn act_coweight(&self, rs: &RootSystem, x: &AffCoweight) -> AffCoweight {
        let a = self.fin.act_co(&x.finite);
        let m = x.loop_part;
        let psi_ab = rs.psi_form(&a, &self.trans);
        let psi_bb = rs.psi_form(&self.trans, &self.trans);
        debug_assert_eq!(psi_bb % 2, 0);
        let central = x.central + psi_ab + (psi_bb / 2) * m;
        let finite = a.iter().zip(&self.trans).map(|(ai, bi)| ai + m * bi).collect();
        AffCoweight { finite, central, loop_part: m }
    }

    /// Contragredient action on affine weights, determined by pairing
    /// invariance: translation by `b` sends `(mu, l, n)` to
    /// `(mu - l psi(b, .), l, n - <mu, b> + l psi(b, b)/2)`.
    pub fn act_weight(&self, rs: &RootSystem, lam: &AffWeight) -> AffWeight {
        let mu = self.fin.act_wt(&lam.finite);
        let l = lam.level;
        let psi_b = rs.psi_weight(&self.trans);
        let psi_bb = rs.psi_form(&self.trans, &self.trans);
        let finite: Vec<i64> = mu.iter().zip(&psi_b).map(|(m, p)| m - l * p).collect();
        let degree = lam.degree - rs.pair(&mu, &self.trans) + l * (psi_bb / 2);
        AffWeight { finite, level: l, degree }
    }

    /// The inversion set `{alpha positive real : w(alpha) negative}`,
    /// computed in closed form from the translation pairings.
    pub fn inversion_set(&self, rs: &RootSystem) -> Vec<AffWeight> {
        let mut out = Vec::new();
        for (idx, root) in rs.roots.iter().enumerate() {
            let n0 = if root.positive { 0 } else { 1 };
            let img_wt = self.fin.act_wt(&root.wt);
            let img_idx = rs.root_index_by_wt(&img_wt).expect("root image is a root");
            let img_positive = rs.roots[img_idx].positive;
            // w(beta, 0, n) = (u(beta), 0, n - <u(beta), trans>)
            let p = rs.pair(&img_wt, &self.trans);
            // image negative iff n - p < 0, or n - p = 0 with u(beta) negative
            let hi = if img_positive { p - 1 } else { p };
            for n in n0..=hi {
                out.push(real_root(rs, idx, n));
            }
        }
        out.sort_by_key(|a| (a.degree, a.finite.clone()));
        out
    }

    pub fn length(&self, rs: &RootSystem) -> usize {
        let mut count = 0usize;
        for root in &rs.roots {
            let n0 = if root.positive { 0 } else { 1 };
            let img_wt = self.fin.act_wt(&root.wt);
            let img_idx = rs.root_index_by_wt(&img_wt).expect("root image is a root");
            let img_positive = rs.roots[img_idx].positive;
            let p = rs.pair(&img_wt, &self.trans);
            let hi = if img_positive { p - 1 } else { p };
            if hi >= n0 {
                count += (hi - n0 + 1) as usize;
            }
        }
        count
    }
}

/// A torsor label: an antidominant affine coweight `b = (f, m, -d)`, `d > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsorLabel {
    b: AffCoweight,
}

impl TorsorLabel {
    pub fn new(rs: &RootSystem, b: AffCoweight) -> Result<Self> {
        if b.loop_part >= 0 {
            return Err(Error::NegativeIndexRequired(format!(
                "loop component must be negative, got {}",
                b.loop_part
            )));
        }
        // antidominance: <alpha_i, b> <= 0 for every simple affine root
        for i in 0..rs.rank {
            let v = rs.pair(&rs.roots[i].wt, &b.finite);
            if v > 0 {
                return Err(Error::NotAntidominant(format!("<alpha_{}, b> = {v} > 0", i + 1)));
            }
        }
        let v0 = pair(rs, &alpha0(rs), &b);
        if v0 > 0 {
            return Err(Error::NotAntidominant(format!("<alpha_0, b> = {v0} > 0")));
        }
        Ok(TorsorLabel { b })
    }

    pub fn coweight(&self) -> &AffCoweight {
        &self.b
    }

    pub fn d(&self) -> i64 {
        -self.b.loop_part
    }

    /// CLI triple syntax `f1,...,fr;m;-d`.
    pub fn parse(rs: &RootSystem, s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(';').collect();
        if parts.len() != 3 {
            return Err(Error::MalformedInput(format!("expected 'f1,..,fr;m;-d', got '{s}'")));
        }
        let finite: Vec<i64> = parts[0]
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::MalformedInput(format!("bad finite part: {e}")))?;
        if finite.len() != rs.rank {
            return Err(Error::MalformedInput(format!(
                "finite part has {} coordinates, rank is {}",
                finite.len(),
                rs.rank
            )));
        }
        let central: i64 = parts[1]
            .trim()
            .parse()
            .map_err(|e| Error::MalformedInput(format!("bad central part: {e}")))?;
        let loop_part: i64 = parts[2]
            .trim()
            .parse()
            .map_err(|e| Error::MalformedInput(format!("bad loop part: {e}")))?;
        TorsorLabel::new(rs, AffCoweight::new(finite, central, loop_part))
    }

    pub fn render(&self) -> String {
        format!(
            "{};{};{}",
            self.b.finite.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","),
            self.b.central,
            self.b.loop_part
        )
    }
}

/// All antidominant labels `(f, 0, -d)` for a fixed index `d > 0`.
pub fn torsor_labels(rs: &RootSystem, d: i64) -> Result<Vec<TorsorLabel>> {
    if d <= 0 {
        return Err(Error::NegativeIndexRequired(format!("index d = {d} must be positive")));
    }
    // Antidominant coweights have non-positive coroot coordinates, and
    // -<theta, f> <= d cuts a finite box; h * rank * d is a safe bound.
    let bound = rs.coxeter * rs.rank as i64 * d;
    let theta_wt = rs.roots[rs.theta].wt.clone();
    let mut out = Vec::new();
    let mut f = vec![-bound; rs.rank];
    'outer: loop {
        let antidominant = (0..rs.rank).all(|i| rs.pair(&rs.roots[i].wt, &f) <= 0);
        if antidominant {
            let t = -rs.pair(&theta_wt, &f);
            if (0..=d).contains(&t) {
                out.push(TorsorLabel { b: AffCoweight::new(f.clone(), 0, -d) });
            }
        }
        for i in 0..rs.rank {
            if f[i] < 0 {
                f[i] += 1;
                continue 'outer;
            }
            f[i] = -bound;
        }
        break;
    }
    out.sort_by_key(|t| std::cmp::Reverse(t.b.finite.clone()));
    Ok(out)
}

/// All `w` in the affine Weyl group with `sign * grade(w(base2)) <= bound2`,
/// where `base2` and `bound2` are doubled so half-integral base points stay
/// exact. Finiteness requires `sign * loop(base2) < 0`, which makes
/// `sign * grade(w(base2))` grow quadratically in the translation part.
pub(crate) fn enumerate_by_grade2(
    rs: &RootSystem,
    base2: &AffCoweight,
    sign: i64,
    bound2: i64,
) -> Vec<AffWeylElt> {
    assert!(sign == 1 || sign == -1);
    assert!(sign * base2.loop_part < 0, "enumeration requires sign * loop < 0");
    assert_eq!(base2.loop_part % 2, 0, "base must be doubled");
    let rank = rs.rank;
    let m2 = base2.loop_part;
    let hd = rs.dual_coxeter;

    // sign * grade(t_c u base2)
    //   = sign*(<rho, u(a2)> + h^vee n2)                       (A_u)
    //   + sign*(m2 <rho, c> + h^vee psi(u(a2), c))             (linear)
    //   + (-sign * h^vee * m2 / 2) * (-psi)(c, c)              (quadratic)
    let quad_coeff = -sign * hd * m2 / 2;
    assert!(quad_coeff > 0);

    let mut lin_bound = 0i64;
    let mut a_bound = 0i64;
    for u in &rs.weyl {
        let ua = u.act_co(&base2.finite);
        a_bound = a_bound.max((rs.pair(&rs.rho, &ua) + hd * base2.central).abs());
        let mut s = 0i64;
        for j in 0..rank {
            let mut e = vec![0i64; rank];
            e[j] = 1;
            // <rho, e_j> = 1
            s += (m2 + hd * rs.psi_form(&ua, &e)).abs();
        }
        lin_bound = lin_bound.max(s);
    }

    let (det, adj_max) = neg_psi_bounds(rs);
    let mut out = Vec::new();
    let mut radius = 0i64;
    loop {
        for c in shell(rank, radius) {
            for u in &rs.weyl {
                let w = AffWeylElt { trans: c.clone(), fin: u.clone() };
                let img = w.act_coweight(rs, base2);
                if sign * grade(rs, &img) <= bound2 {
                    out.push(w);
                }
            }
        }
        if tail_clear(radius + 1, quad_coeff, lin_bound, a_bound, bound2, det, adj_max) {
            break;
        }
        radius += 1;
        assert!(radius < 1 << 16, "enumeration radius runaway");
    }
    out.sort_by_key(|w| (w.trans.clone(), w.fin.idx));
    out
}

fn neg_psi_bounds(rs: &RootSystem) -> (i64, i64) {
    let neg_psi: Vec<Vec<i64>> =
        rs.psi.iter().map(|row| row.iter().map(|v| -v).collect()).collect();
    let det = int_det(&neg_psi);
    assert!(det > 0);
    let adj_max = (0..rs.rank)
        .map(|i| {
            let minor: Vec<Vec<i64>> = (0..rs.rank)
                .filter(|&r| r != i)
                .map(|r| (0..rs.rank).filter(|&c| c != i).map(|c| neg_psi[r][c]).collect())
                .collect();
            int_det(&minor)
        })
        .max()
        .unwrap_or(1);
    (det, adj_max.max(1))
}

/// Certifies that every translation with sup-norm at least `r` satisfies
/// `quad_coeff * v - lin_bound * supnorm - a_bound > bound2`, where
/// `v = (-psi)(c,c)`. Uses `c_i^2 <= v * adj_ii / det` in both directions.
fn tail_clear(
    r: i64,
    quad_coeff: i64,
    lin_bound: i64,
    a_bound: i64,
    bound2: i64,
    det: i64,
    adj_max: i64,
) -> bool {
    let v_min = ((r * r * det + adj_max - 1) / adj_max).max(1);
    let g = |v: i64| -> i64 {
        let s = isqrt(v * adj_max / det) + 1;
        quad_coeff * v - lin_bound * s - a_bound
    };
    // Beyond v_big the linear growth of quad_coeff * v dominates both the
    // square-root term and the required clearance.
    let v_big = {
        let c1 = 4 * lin_bound * lin_bound * adj_max / (quad_coeff * quad_coeff * det) + 1;
        let c2 = 2 * (bound2.abs() + a_bound + lin_bound) / quad_coeff + 1;
        c1.max(c2).max(v_min)
    };
    (v_min..=v_big).all(|v| g(v) > bound2)
}

fn isqrt(n: i64) -> i64 {
    if n <= 0 {
        return 0;
    }
    let mut x = 1i64;
    while x * x <= n {
        x += 1;
    }
    x - 1
}

pub(crate) fn int_det(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return m[0][0];
    }
    let mut det = 0;
    for j in 0..n {
        let minor: Vec<Vec<i64>> = (1..n)
            .map(|r| (0..n).filter(|&c| c != j).map(|c| m[r][c]).collect())
            .collect();
        let sign = if j % 2 == 0 { 1 } else { -1 };
        det += sign * m[0][j] * int_det(&minor);
    }
    det
}

/// Lattice points of exact sup-norm `radius`, lexicographic order.
fn shell(rank: usize, radius: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = vec![-radius; rank];
    'outer: loop {
        if radius == 0 || cur.iter().any(|&c| c.abs() == radius) {
            out.push(cur.clone());
        }
        for i in 0..rank {
            if cur[i] < radius {
                cur[i] += 1;
                continue 'outer;
            }
            cur[i] = -radius;
        }
        break;
    }
    out
}

/// All `w` with `grade(w(b)) <= h` for a torsor label; complete by the
/// quadratic growth of the grade in the translation part.
pub fn enumerate_weyl_by_grade(rs: &RootSystem, b: &TorsorLabel, h: i64) -> Vec<AffWeylElt> {
    enumerate_by_grade2(rs, &b.coweight().scale(2), 1, 2 * h)
}

/// Lattice points `a` with `lin . a + quad_coeff * (-psi)(a, a) <= bound2`,
/// for a positive quadratic coefficient. Complete by the same shell-plus-
/// tail-certificate scheme as the group enumeration.
pub(crate) fn quad_ball(
    rs: &RootSystem,
    quad_coeff: i64,
    lin: &[i64],
    bound2: i64,
) -> Vec<Vec<i64>> {
    assert!(quad_coeff > 0);
    let rank = rs.rank;
    let lin_bound: i64 = lin.iter().map(|c| c.abs()).sum();
    let (det, adj_max) = neg_psi_bounds(rs);
    let mut out = Vec::new();
    let mut radius = 0i64;
    loop {
        for a in shell(rank, radius) {
            let v: i64 = lin.iter().zip(&a).map(|(c, x)| c * x).sum::<i64>()
                + quad_coeff * (-rs.psi_form(&a, &a));
            if v <= bound2 {
                out.push(a);
            }
        }
        if tail_clear(radius + 1, quad_coeff, lin_bound, 0, bound2, det, adj_max) {
            break;
        }
        radius += 1;
        assert!(radius < 1 << 16, "lattice ball runaway");
    }
    out.sort();
    out
}

/// Lattice points `a` with theta exponent `psi(a, f) - d psi(a, a)/2 <= cap`.
pub fn theta_ball(rs: &RootSystem, f: &[i64], d: i64, cap: i64) -> Vec<Vec<i64>> {
    assert!(d > 0);
    let lin: Vec<i64> = (0..rs.rank)
        .map(|j| {
            let mut e = vec![0i64; rs.rank];
            e[j] = 1;
            2 * rs.psi_form(f, &e)
        })
        .collect();
    quad_ball(rs, d, &lin, 2 * cap)
}

/// Lattice points `a` whose theta term `q^{-d psi(a,a)/2} z^a` has grade at
/// most `h`: the grade is `<rho, a> + h^vee d (-psi)(a,a)/2`.
pub fn theta_grade_ball(rs: &RootSystem, d: i64, h: i64) -> Vec<Vec<i64>> {
    assert!(d > 0);
    let lin = vec![2i64; rs.rank];
    quad_ball(rs, rs.dual_coxeter * d, &lin, 2 * h)
}

/// The theta exponent `psi(a, f) - d psi(a, a)/2` of a lattice point.
pub fn theta_exponent(rs: &RootSystem, f: &[i64], d: i64, a: &[i64]) -> i64 {
    let p = rs.psi_form(a, a);
    debug_assert_eq!(p % 2, 0);
    rs.psi_form(a, f) - d * (p / 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::{build_root_system, SeriesType};

    fn a1() -> RootSystem {
        build_root_system(SeriesType::A, 1).unwrap()
    }

    #[test]
    fn translation_action_example() {
        let rs = a1();
        let t = AffWeylElt::pure_translation(&rs, vec![1]);
        let x = AffCoweight::new(vec![0], 0, 1);
        let img = t.act_coweight(&rs, &x);
        assert_eq!(img, AffCoweight::new(vec![1], -1, 1));
        assert_eq!(img.loop_part, x.loop_part);
    }

    #[test]
    fn finite_reflection_on_coroot() {
        let rs = a1();
        let s = AffWeylElt::simple_reflection(&rs, 1).unwrap();
        let x = AffCoweight::new(vec![1], 0, 0);
        assert_eq!(s.act_coweight(&rs, &x), AffCoweight::new(vec![-1], 0, 0));
    }

    #[test]
    fn affine_reflection_on_own_root() {
        let rs = a1();
        let s0 = AffWeylElt::simple_reflection(&rs, 0).unwrap();
        let a0 = alpha0(&rs);
        assert_eq!(s0.act_weight(&rs, &a0), a0.neg());
        let a0c = alpha0_coroot(&rs);
        assert_eq!(s0.act_coweight(&rs, &a0c), a0c.neg());
    }

    #[test]
    fn act_weight_translation_example() {
        let rs = a1();
        let t = AffWeylElt::pure_translation(&rs, vec![1]);
        // root (alpha, 0, 0) -> (alpha, 0, -2)
        let alpha = real_root(&rs, 0, 0);
        let img = t.act_weight(&rs, &alpha);
        assert_eq!(img, AffWeight::new(rs.roots[0].wt.clone(), 0, -2));
    }

    #[test]
    fn pairing_invariance_randomized() {
        let rs = a1();
        let mut state = 0x9E3779B97F4A7C15u64;
        let mut rnd = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % 7) as i64 - 3
        };
        for _ in 0..200 {
            let w = AffWeylElt {
                trans: vec![rnd()],
                fin: if rnd() % 2 == 0 { rs.weyl[0].clone() } else { rs.weyl[1].clone() },
            };
            let x = AffCoweight::new(vec![rnd()], rnd(), rnd());
            let mu = AffWeight::new(vec![rnd()], rnd(), rnd());
            assert_eq!(
                pair(&rs, &w.act_weight(&rs, &mu), &w.act_coweight(&rs, &x)),
                pair(&rs, &mu, &x)
            );
        }
    }

    #[test]
    fn group_law_randomized() {
        let rs = build_root_system(SeriesType::A, 2).unwrap();
        let mut state = 0xDEADBEEFCAFEBABEu64;
        let mut rnd = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state % 5) as i64 - 2
        };
        for _ in 0..100 {
            let w1 = AffWeylElt {
                trans: vec![rnd(), rnd()],
                fin: rs.weyl[(rnd().unsigned_abs() as usize) % rs.weyl.len()].clone(),
            };
            let w2 = AffWeylElt {
                trans: vec![rnd(), rnd()],
                fin: rs.weyl[(rnd().unsigned_abs() as usize) % rs.weyl.len()].clone(),
            };
            let x = AffCoweight::new(vec![rnd(), rnd()], rnd(), rnd());
            let lhs = w1.compose(&rs, &w2).act_coweight(&rs, &x);
            let rhs = w1.act_coweight(&rs, &w2.act_coweight(&rs, &x));
            assert_eq!(lhs, rhs);
            let id = w1.compose(&rs, &w1.inverse(&rs));
            assert!(id.is_identity());
        }
    }

    #[test]
    fn inversion_sets_a1() {
        let rs = a1();
        let s0 = AffWeylElt::simple_reflection(&rs, 0).unwrap();
        let inv = s0.inversion_set(&rs);
        assert_eq!(inv, vec![alpha0(&rs)]);
        assert_eq!(s0.length(&rs), 1);

        let t = AffWeylElt::pure_translation(&rs, vec![1]);
        let inv = t.inversion_set(&rs);
        assert_eq!(t.length(&rs), 2);
        assert_eq!(inv, vec![real_root(&rs, 0, 0), real_root(&rs, 0, 1)]);
    }

    #[test]
    fn dihedral_length_count() {
        let rs = a1();
        // number of elements of length <= k is 2k + 1
        for k in 0..6i64 {
            let mut count = 0;
            for n in -8..=8i64 {
                for u in &rs.weyl {
                    let w = AffWeylElt { trans: vec![n], fin: u.clone() };
                    if (w.length(&rs) as i64) <= k {
                        count += 1;
                    }
                }
            }
            assert_eq!(count, 2 * k + 1);
        }
    }

    #[test]
    fn length_matches_greedy_reduced_word() {
        let rs = build_root_system(SeriesType::A, 2).unwrap();
        let t = AffWeylElt::pure_translation(&rs, vec![1, 1]);
        let mut w = t.clone();
        let mut steps = 0usize;
        while !w.is_identity() {
            let len = w.length(&rs);
            let mut descended = false;
            for i in 0..=rs.rank {
                let s = AffWeylElt::simple_reflection(&rs, i).unwrap();
                let sw = s.compose(&rs, &w);
                if sw.length(&rs) < len {
                    w = sw;
                    steps += 1;
                    descended = true;
                    break;
                }
            }
            assert!(descended, "no descent found");
        }
        assert_eq!(steps, t.length(&rs));
    }

    #[test]
    fn grade_examples() {
        let rs = a1();
        let alpha_check = coroot(&rs, &rs.roots[0], 0);
        assert_eq!(grade(&rs, &alpha_check), 1);
        assert_eq!(grade(&rs, &alpha0_coroot(&rs)), 1);
        assert_eq!(grade(&rs, &AffCoweight::new(vec![0], 3, -5)), rs.dual_coxeter * 3);
        for (_, co) in positive_coroots_up_to(&rs, 12) {
            assert!(grade(&rs, &co) >= 1);
        }
    }

    #[test]
    fn rho_hat_pairs_one_with_simple_coroots() {
        for (kind, rank) in [(SeriesType::A, 1), (SeriesType::A, 2), (SeriesType::B, 2)] {
            let rs = build_root_system(kind, rank).unwrap();
            let rh = rho_hat(&rs);
            for i in 0..rank {
                let co = coroot(&rs, &rs.roots[i], 0);
                assert_eq!(pair(&rs, &rh, &co), 1);
            }
            assert_eq!(pair(&rs, &rh, &alpha0_coroot(&rs)), 1);
            assert_eq!(pair(&rs, &alpha0(&rs), &alpha0_coroot(&rs)), 2);
        }
    }

    #[test]
    fn torsor_labels_examples() {
        let rs = a1();
        let l1 = torsor_labels(&rs, 1).unwrap();
        assert_eq!(l1.len(), 1);
        assert_eq!(l1[0].coweight(), &AffCoweight::new(vec![0], 0, -1));

        let l2 = torsor_labels(&rs, 2).unwrap();
        assert_eq!(l2.len(), 2);
        assert_eq!(l2[0].coweight().finite, vec![0]);
        assert_eq!(l2[1].coweight().finite, vec![-1]);

        let a2 = build_root_system(SeriesType::A, 2).unwrap();
        assert_eq!(torsor_labels(&a2, 1).unwrap().len(), 1);
        assert!(torsor_labels(&rs, 0).is_err());
    }

    #[test]
    fn enumerate_by_grade_examples() {
        let rs = a1();
        let b = TorsorLabel::new(&rs, AffCoweight::new(vec![0], 0, -1)).unwrap();
        let w0 = enumerate_weyl_by_grade(&rs, &b, 0);
        assert_eq!(w0.len(), 2, "grade 0: identity and s_alpha");
        let w1 = enumerate_weyl_by_grade(&rs, &b, 1);
        assert_eq!(w1.len(), 4, "grade 1 adds translations by alpha^vee");
        for w in &w1 {
            assert!(grade(&rs, &w.act_coweight(&rs, b.coweight())) <= 1);
        }
        // closure under right multiplication by the stabilizer of f
        let stab = rs.stabilizer_of(&b.coweight().finite);
        assert_eq!(stab.len(), 2);
        for w in &w1 {
            for si in &stab {
                let ws = w.compose(&rs, &AffWeylElt::finite(&rs, rs.weyl[*si].clone()));
                assert!(w1.contains(&ws), "stabilizer closure violated");
            }
        }
    }

    #[test]
    fn enumeration_is_complete_by_brute_force() {
        let rs = a1();
        for d in [1i64, 2] {
            let b = TorsorLabel::new(&rs, AffCoweight::new(vec![0], 0, -d)).unwrap();
            for h in [0i64, 1, 3, 7, 8, 12] {
                let fast: std::collections::BTreeSet<_> = enumerate_weyl_by_grade(&rs, &b, h)
                    .into_iter()
                    .map(|w| (w.trans.clone(), w.fin.idx))
                    .collect();
                let mut brute = std::collections::BTreeSet::new();
                for n in -60..=60i64 {
                    for u in &rs.weyl {
                        let w = AffWeylElt { trans: vec![n], fin: u.clone() };
                        if grade(&rs, &w.act_coweight(&rs, b.coweight())) <= h {
                            brute.insert((w.trans.clone(), w.fin.idx));
                        }
                    }
                }
                assert_eq!(fast, brute, "d = {d}, h = {h}");
            }
        }
    }

    #[test]
    fn enumeration_complete_rank_two() {
        for (kind, f, d) in [
            (SeriesType::A, vec![0i64, 0], 1),
            (SeriesType::B, vec![0, 0], 1),
            (SeriesType::A, vec![-1, -1], 2),
        ] {
            let rs = build_root_system(kind, 2).unwrap();
            let b = TorsorLabel::new(&rs, AffCoweight::new(f, 0, -d)).unwrap();
            let h = 6;
            let fast: std::collections::BTreeSet<_> = enumerate_weyl_by_grade(&rs, &b, h)
                .into_iter()
                .map(|w| (w.trans.clone(), w.fin.idx))
                .collect();
            let mut brute = std::collections::BTreeSet::new();
            for n1 in -12..=12i64 {
                for n2 in -12..=12i64 {
                    for u in &rs.weyl {
                        let w = AffWeylElt { trans: vec![n1, n2], fin: u.clone() };
                        if grade(&rs, &w.act_coweight(&rs, b.coweight())) <= h {
                            brute.insert((w.trans.clone(), w.fin.idx));
                        }
                    }
                }
            }
            assert_eq!(fast, brute, "{kind:?}");
        }
    }

    #[test]
    fn theta_ball_a1() {
        let rs = a1();
        let ball = theta_ball(&rs, &[0], 1, 9);
        // exponent n^2 <= 9: n in -3..=3
        assert_eq!(ball.len(), 7);
        for a in &ball {
            assert!(theta_exponent(&rs, &[0], 1, a) <= 9);
        }
        // shifted ball: f = -alpha^vee, d = 1: exponent k^2 + 2k
        let ball = theta_ball(&rs, &[-1], 1, 3);
        for a in &ball {
            assert_eq!(theta_exponent(&rs, &[-1], 1, a), a[0] * a[0] + 2 * a[0]);
        }
        assert!(ball.contains(&vec![-1]), "minimum at k = -1 (exponent -1)");
    }

    #[test]
    fn antidominant_pairs_nonpositive_with_all_positive_roots() {
        let rs = a1();
        for d in [1i64, 2] {
            for label in torsor_labels(&rs, d).unwrap() {
                for (root, _) in positive_coroots_up_to(&rs, 10) {
                    assert!(
                        pair(&rs, &root, label.coweight()) <= 0,
                        "b = {:?}, root = {root:?}",
                        label.coweight()
                    );
                }
            }
        }
    }

    #[test]
    fn parse_and_render_labels() {
        let rs = a1();
        let t = TorsorLabel::parse(&rs, "0;0;-1").unwrap();
        assert_eq!(t.render(), "0;0;-1");
        assert!(TorsorLabel::parse(&rs, "1;0;-1").is_err(), "dominant f rejected");
        assert!(TorsorLabel::parse(&rs, "0;0;1").is_err(), "positive loop rejected");
    }
}
