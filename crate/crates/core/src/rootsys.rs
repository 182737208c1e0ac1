//! Finite simple root systems, the normalized invariant form on the coweight
//! lattice, and the fully materialized finite Weyl group.
//!
//! Conventions. Coweights are stored in simple-coroot coordinates, weights in
//! fundamental-weight coordinates, so the natural pairing is the integer dot
//! product. The Cartan matrix entry `a[i][j]` is `<alpha_j, alpha_i^vee>`.
//! The invariant form is normalized so long roots have squared length 2; its
//! transport to the coroot lattice is the even negative-definite matrix `psi`
//! with `-psi(theta^vee, theta^vee) = 2`.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const DEFAULT_RANK_CAP: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesType {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl SeriesType {
    pub fn from_char(c: char) -> Result<SeriesType> {
        Ok(match c.to_ascii_uppercase() {
            'A' => SeriesType::A,
            'B' => SeriesType::B,
            'C' => SeriesType::C,
            'D' => SeriesType::D,
            'E' => SeriesType::E,
            'F' => SeriesType::F,
            'G' => SeriesType::G,
            other => return Err(Error::InvalidRootSystem(format!("unknown type {other}"))),
        })
    }
}

impl fmt::Display for SeriesType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// A root, stored in both bases.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Root {
    /// Fundamental-weight coordinates.
    pub wt: Vec<i64>,
    /// Simple-root coordinates.
    pub rt: Vec<i64>,
    /// `2 / (root, root)` under the long-root-2 normalization.
    pub kac: i64,
    pub positive: bool,
}

impl Root {
    pub fn height(&self) -> i64 {
        self.rt.iter().sum()
    }
}

/// Element of the finite Weyl group with its action in both bases.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteWeylElt {
    pub idx: usize,
    /// Action on coweights (simple-coroot coordinates).
    pub mat_co: Vec<Vec<i64>>,
    /// Action on weights (fundamental-weight coordinates).
    pub mat_wt: Vec<Vec<i64>>,
    pub word: Vec<usize>,
}

impl FiniteWeylElt {
    pub fn length(&self) -> usize {
        self.word.len()
    }

    pub fn act_co(&self, x: &[i64]) -> Vec<i64> {
        mat_vec(&self.mat_co, x)
    }

    pub fn act_wt(&self, mu: &[i64]) -> Vec<i64> {
        mat_vec(&self.mat_wt, mu)
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }
}

impl fmt::Debug for FiniteWeylElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            write!(f, "e")
        } else {
            write!(
                f,
                "{}",
                self.word.iter().map(|i| format!("s{i}")).collect::<Vec<_>>().join("")
            )
        }
    }
}

fn mat_vec(m: &[Vec<i64>], x: &[i64]) -> Vec<i64> {
    m.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for k in 0..n {
            let v = a[i][k];
            if v == 0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += v * b[k][j];
            }
        }
    }
    out
}

fn identity(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

/// A finite simple root datum with its Weyl group fully enumerated.
#[derive(Clone, Serialize, Deserialize)]
pub struct RootSystem {
    pub kind: SeriesType,
    pub rank: usize,
    /// `cartan[i][j] = <alpha_j, alpha_i^vee>`.
    pub cartan: Vec<Vec<i64>>,
    /// `kac[i] = 2/(alpha_i, alpha_i)`.
    pub kac: Vec<i64>,
    pub roots: Vec<Root>,
    /// Invariant form on the coweight lattice (negative definite, even).
    pub psi: Vec<Vec<i64>>,
    /// Index of the highest root in `roots`.
    pub theta: usize,
    /// Coroot coordinates of `theta^vee`.
    pub theta_co: Vec<i64>,
    /// `rho` in fundamental-weight coordinates (all ones).
    pub rho: Vec<i64>,
    /// `2 rho^vee` in coroot coordinates.
    pub rho_check2: Vec<i64>,
    pub coxeter: i64,
    pub dual_coxeter: i64,
    pub weyl: Vec<FiniteWeylElt>,
    #[serde(skip)]
    index: HashMap<Vec<i64>, usize>,
    #[serde(skip)]
    inverse: Vec<usize>,
    #[serde(skip)]
    root_by_wt: HashMap<Vec<i64>, usize>,
}

impl fmt::Debug for RootSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RootSystem({}{})", self.kind, self.rank)
    }
}

impl PartialEq for RootSystem {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.rank == other.rank
    }
}

fn cartan_matrix(kind: SeriesType, rank: usize) -> Result<(Vec<Vec<i64>>, Vec<i64>)> {
    let bad = |msg: &str| Err(Error::InvalidRootSystem(msg.into()));
    let chain = |n: usize| -> Vec<Vec<i64>> {
        let mut a = vec![vec![0i64; n]; n];
        for i in 0..n {
            a[i][i] = 2;
            if i + 1 < n {
                a[i][i + 1] = -1;
                a[i + 1][i] = -1;
            }
        }
        a
    };
    match kind {
        SeriesType::A => {
            if rank < 1 {
                return bad("type A requires rank >= 1");
            }
            Ok((chain(rank), vec![1; rank]))
        }
        SeriesType::B => {
            if rank < 2 {
                return bad("type B requires rank >= 2");
            }
            let mut a = chain(rank);
            // last simple root short
            a[rank - 1][rank - 2] = -2;
            let mut k = vec![1; rank];
            k[rank - 1] = 2;
            Ok((a, k))
        }
        SeriesType::C => {
            if rank < 2 {
                return bad("type C requires rank >= 2");
            }
            let mut a = chain(rank);
            a[rank - 2][rank - 1] = -2;
            let mut k = vec![2; rank];
            k[rank - 1] = 1;
            Ok((a, k))
        }
        SeriesType::D => {
            if rank < 3 {
                return bad("type D requires rank >= 3");
            }
            let mut a = vec![vec![0i64; rank]; rank];
            for i in 0..rank {
                a[i][i] = 2;
            }
            for i in 0..rank.saturating_sub(2) {
                if i + 1 < rank - 1 {
                    a[i][i + 1] = -1;
                    a[i + 1][i] = -1;
                }
            }
            // fork: both of the last two nodes attach to node rank-3
            let hub = rank - 3;
            for leaf in [rank - 2, rank - 1] {
                a[hub][leaf] = -1;
                a[leaf][hub] = -1;
            }
            Ok((a, vec![1; rank]))
        }
        SeriesType::E => {
            if !(6..=8).contains(&rank) {
                return bad("type E requires rank in 6..=8");
            }
            // Bourbaki: chain 1-3-4-5-...-n, node 2 attached to node 4.
            let mut a = vec![vec![0i64; rank]; rank];
            for i in 0..rank {
                a[i][i] = 2;
            }
            let mut link = |i: usize, j: usize| {
                a[i][j] = -1;
                a[j][i] = -1;
            };
            link(0, 2);
            link(2, 3);
            link(1, 3);
            for i in 3..rank - 1 {
                link(i, i + 1);
            }
            Ok((a, vec![1; rank]))
        }
        SeriesType::F => {
            if rank != 4 {
                return bad("type F requires rank 4");
            }
            let mut a = chain(4);
            a[2][1] = -2; // alpha_3 short
            Ok((a, vec![1, 1, 2, 2]))
        }
        SeriesType::G => {
            if rank != 2 {
                return bad("type G requires rank 2");
            }
            // alpha_1 short, alpha_2 long
            Ok((vec![vec![2, -3], vec![-1, 2]], vec![3, 1]))
        }
    }
}

/// Build a root system with the default enumeration cap.
pub fn build_root_system(kind: SeriesType, rank: usize) -> Result<RootSystem> {
    build_root_system_capped(kind, rank, DEFAULT_RANK_CAP)
}

/// Build a root system; the cap guards the eager Weyl-group enumeration.
pub fn build_root_system_capped(kind: SeriesType, rank: usize, cap: usize) -> Result<RootSystem> {
    if rank > cap {
        return Err(Error::RankOverCap { rank, cap });
    }
    let (cartan, kac) = cartan_matrix(kind, rank)?;

    // Close the simple roots under simple reflections.
    let mut roots: Vec<Root> = Vec::new();
    let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
    let mut queue: VecDeque<usize> = VecDeque::new();
    for i in 0..rank {
        let mut rt = vec![0i64; rank];
        rt[i] = 1;
        let wt = (0..rank).map(|m| cartan[m][i]).collect::<Vec<_>>();
        seen.insert(rt.clone(), roots.len());
        queue.push_back(roots.len());
        roots.push(Root { wt, rt, kac: kac[i], positive: true });
    }
    while let Some(idx) = queue.pop_front() {
        for j in 0..rank {
            let r = &roots[idx];
            // s_j in root coordinates: subtract <beta, alpha_j^vee> e_j
            let pairing: i64 = (0..rank).map(|m| cartan[j][m] * r.rt[m]).sum();
            let mut rt = r.rt.clone();
            rt[j] -= pairing;
            if seen.contains_key(&rt) {
                continue;
            }
            let wt = (0..rank)
                .map(|m| (0..rank).map(|n| cartan[m][n] * rt[n]).sum())
                .collect::<Vec<_>>();
            let positive = rt.iter().all(|&c| c >= 0);
            let negative = rt.iter().all(|&c| c <= 0);
            if !positive && !negative {
                return Err(Error::InvalidRootSystem("indefinite root sign".into()));
            }
            let kac_factor = roots[idx].kac;
            seen.insert(rt.clone(), roots.len());
            queue.push_back(roots.len());
            roots.push(Root { wt, rt, kac: kac_factor, positive });
        }
    }
    roots.sort_by(|a, b| {
        (!a.positive, a.height().abs(), a.rt.clone()).cmp(&(!b.positive, b.height().abs(), b.rt.clone()))
    });
    let root_by_wt: HashMap<Vec<i64>, usize> =
        roots.iter().enumerate().map(|(i, r)| (r.wt.clone(), i)).collect();

    // Highest root: positive, long (kac = 1), maximal height.
    let theta = roots
        .iter()
        .enumerate()
        .filter(|(_, r)| r.positive && r.kac == 1)
        .max_by_key(|(_, r)| r.height())
        .map(|(i, _)| i)
        .ok_or_else(|| Error::InvalidRootSystem("no long positive root".into()))?;
    let theta_co = coroot_coords(&roots[theta], &kac)?;

    // psi[i][j] = -kac[j] * cartan[i][j]
    let psi: Vec<Vec<i64>> = (0..rank)
        .map(|i| (0..rank).map(|j| -kac[j] * cartan[i][j]).collect())
        .collect();
    for i in 0..rank {
        for j in 0..rank {
            if psi[i][j] != psi[j][i] {
                return Err(Error::InvalidRootSystem("form not symmetric".into()));
            }
        }
    }

    let rho = vec![1i64; rank];
    let mut rho_check2 = vec![0i64; rank];
    for r in roots.iter().filter(|r| r.positive) {
        for (acc, c) in rho_check2.iter_mut().zip(coroot_coords(r, &kac)?) {
            *acc += c;
        }
    }

    let coxeter = roots[theta].height() + 1;
    let dual_coxeter = 1 + theta_co.iter().sum::<i64>();

    // Invariants forced by the construction.
    if roots.len() as i64 != rank as i64 * coxeter {
        return Err(Error::InvalidRootSystem("|roots| != rank * coxeter".into()));
    }
    let theta_norm: i64 = (0..rank)
        .map(|i| (0..rank).map(|j| theta_co[i] * psi[i][j] * theta_co[j]).sum::<i64>())
        .sum();
    if theta_norm != -2 {
        return Err(Error::InvalidRootSystem("psi(theta^vee, theta^vee) != -2".into()));
    }

    // Materialize W by closing the simple reflections.
    let mut weyl: Vec<FiniteWeylElt> = Vec::new();
    let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
    let simple_co: Vec<Vec<Vec<i64>>> = (0..rank)
        .map(|i| {
            let mut m = identity(rank);
            for j in 0..rank {
                m[i][j] -= cartan[j][i];
            }
            m
        })
        .collect();
    let simple_wt: Vec<Vec<Vec<i64>>> = (0..rank)
        .map(|i| {
            let mut m = identity(rank);
            for j in 0..rank {
                m[j][i] -= cartan[j][i];
            }
            m
        })
        .collect();
    let flat = |m: &Vec<Vec<i64>>| m.iter().flatten().copied().collect::<Vec<i64>>();
    weyl.push(FiniteWeylElt {
        idx: 0,
        mat_co: identity(rank),
        mat_wt: identity(rank),
        word: vec![],
    });
    index.insert(flat(&weyl[0].mat_co), 0);
    let mut head = 0usize;
    while head < weyl.len() {
        for i in 0..rank {
            let mat_co = mat_mul(&simple_co[i], &weyl[head].mat_co);
            let key = flat(&mat_co);
            if index.contains_key(&key) {
                continue;
            }
            let mat_wt = mat_mul(&simple_wt[i], &weyl[head].mat_wt);
            let mut word = vec![i];
            word.extend_from_slice(&weyl[head].word);
            let idx = weyl.len();
            index.insert(key, idx);
            weyl.push(FiniteWeylElt { idx, mat_co, mat_wt, word });
        }
        head += 1;
        if weyl.len() > 1 << 21 {
            return Err(Error::InvalidRootSystem("Weyl group too large".into()));
        }
    }
    let inverse: Vec<usize> = weyl
        .iter()
        .map(|w| {
            let inv = transpose(&w.mat_wt);
            *index.get(&flat(&inv)).expect("inverse present")
        })
        .collect();

    Ok(RootSystem {
        kind,
        rank,
        cartan,
        kac,
        roots,
        psi,
        theta,
        theta_co,
        rho,
        rho_check2,
        coxeter,
        dual_coxeter,
        weyl,
        index,
        inverse,
        root_by_wt,
    })
}

fn transpose(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = m.len();
    (0..n).map(|i| (0..n).map(|j| m[j][i]).collect()).collect()
}

/// Coroot coordinates of a root: `rt[j] * kac_root / kac[j]`.
fn coroot_coords(r: &Root, kac: &[i64]) -> Result<Vec<i64>> {
    r.rt
        .iter()
        .zip(kac)
        .map(|(c, kj)| {
            let num = c * r.kac;
            if num % kj != 0 {
                return Err(Error::InvalidRootSystem("non-integral coroot".into()));
            }
            Ok(num / kj)
        })
        .collect()
}

impl RootSystem {
    pub fn label(&self) -> String {
        format!("{}{}", self.kind, self.rank)
    }

    pub fn simply_laced(&self) -> bool {
        self.kac.iter().all(|&k| k == 1)
    }

    /// `<mu, x>` for a weight in fundamental-weight coordinates and a
    /// coweight in coroot coordinates.
    pub fn pair(&self, mu: &[i64], x: &[i64]) -> i64 {
        mu.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// `psi(a, b)` on coweights.
    pub fn psi_form(&self, a: &[i64], b: &[i64]) -> i64 {
        let mut acc = 0;
        for (i, ai) in a.iter().enumerate() {
            if *ai == 0 {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                acc += ai * self.psi[i][j] * bj;
            }
        }
        acc
    }

    /// `psi(b, .)` as a weight vector (fundamental-weight coordinates).
    pub fn psi_weight(&self, b: &[i64]) -> Vec<i64> {
        (0..self.rank)
            .map(|i| (0..self.rank).map(|j| self.psi[i][j] * b[j]).sum())
            .collect()
    }

    pub fn positive_roots(&self) -> impl Iterator<Item = &Root> + '_ {
        self.roots.iter().filter(|r| r.positive)
    }

    pub fn root_index_by_wt(&self, wt: &[i64]) -> Option<usize> {
        self.root_by_wt.get(wt).copied()
    }

    pub fn coroot_of(&self, root: &Root) -> Vec<i64> {
        coroot_coords(root, &self.kac).expect("validated at build")
    }

    pub fn identity_elt(&self) -> &FiniteWeylElt {
        &self.weyl[0]
    }

    pub fn simple_reflection(&self, i: usize) -> &FiniteWeylElt {
        let key: Vec<i64> = {
            let mut m = identity(self.rank);
            for j in 0..self.rank {
                m[i][j] -= self.cartan[j][i];
            }
            m.into_iter().flatten().collect()
        };
        &self.weyl[*self.index.get(&key).expect("simple reflection present")]
    }

    pub fn compose(&self, a: &FiniteWeylElt, b: &FiniteWeylElt) -> &FiniteWeylElt {
        let m = mat_mul(&a.mat_co, &b.mat_co);
        let key: Vec<i64> = m.into_iter().flatten().collect();
        &self.weyl[*self.index.get(&key).expect("group closed")]
    }

    pub fn invert(&self, a: &FiniteWeylElt) -> &FiniteWeylElt {
        &self.weyl[self.inverse[a.idx]]
    }

    /// Finite inversion count of `w`.
    pub fn finite_inversions(&self, w: &FiniteWeylElt) -> usize {
        self.positive_roots()
            .filter(|r| {
                let img = w.act_wt(&r.wt);
                let idx = self.root_by_wt.get(&img).expect("root image");
                !self.roots[*idx].positive
            })
            .count()
    }

    /// Stabilizer of a coweight inside the finite Weyl group.
    pub fn stabilizer_of(&self, x: &[i64]) -> Vec<usize> {
        self.weyl
            .iter()
            .filter(|w| w.act_co(x) == x)
            .map(|w| w.idx)
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "type": self.label(),
            "cartan": self.cartan,
            "psi": self.psi,
            "kac": self.kac,
            "coxeter": self.coxeter,
            "dual_coxeter": self.dual_coxeter,
            "roots": self.roots.iter().map(|r| serde_json::json!({
                "wt": r.wt, "rt": r.rt, "kac": r.kac, "positive": r.positive,
            })).collect::<Vec<_>>(),
        })
    }
}

/// The proportionality index of a W-stable weight multiset: the integer
/// `kappa` with `sum_{i<j} a_i a_j = kappa * psi(x, x) / 2` for
/// `a_i = <mu_i, x>`.
pub fn kappa_index(rs: &RootSystem, weights: &[Vec<i64>]) -> Result<i64> {
    if weights.is_empty() {
        return Err(Error::NotProportional("empty weight multiset".into()));
    }
    // W-stability as a multiset, checked on the simple reflections.
    let mut sorted = weights.to_vec();
    sorted.sort();
    for i in 0..rs.rank {
        let s = rs.simple_reflection(i);
        let mut imaged: Vec<Vec<i64>> = weights.iter().map(|mu| s.act_wt(mu)).collect();
        imaged.sort();
        if imaged != sorted {
            return Err(Error::NotProportional(format!(
                "weight multiset is not stable under s{i}"
            )));
        }
    }
    let phi = |x: &[i64]| -> BigInt {
        let vals: Vec<BigInt> = weights.iter().map(|mu| BigInt::from(rs.pair(mu, x))).collect();
        let sum: BigInt = vals.iter().sum();
        let sq: BigInt = vals.iter().map(|v| v * v).sum();
        (&sum * &sum - sq) / 2
    };
    let half_psi = |x: &[i64]| -> BigInt { BigInt::from(rs.psi_form(x, x) / 2) };

    let mut test_vectors: Vec<Vec<i64>> = Vec::new();
    for i in 0..rs.rank {
        let mut e = vec![0i64; rs.rank];
        e[i] = 1;
        test_vectors.push(e);
    }
    for i in 0..rs.rank {
        for j in (i + 1)..rs.rank {
            let mut e = vec![0i64; rs.rank];
            e[i] = 1;
            e[j] = 1;
            test_vectors.push(e);
        }
    }
    // kappa from the first basis vector
    let q2 = half_psi(&test_vectors[0]);
    if q2.is_zero() {
        return Err(Error::NotProportional("degenerate form".into()));
    }
    let q1 = phi(&test_vectors[0]);
    let (kappa, rem) = (&q1 / &q2, &q1 % &q2);
    if !rem.is_zero() {
        return Err(Error::NotProportional("non-integral ratio".into()));
    }
    for x in &test_vectors {
        if phi(x) != &kappa * half_psi(x) {
            return Err(Error::NotProportional("ratios disagree across the lattice".into()));
        }
    }
    i64::try_from(&kappa).map_err(|_| Error::NotProportional("index overflow".into()))
}
