//! Exact-arithmetic engine for generating functions attached to principal
//! bundles on ruled neighbourhoods of a curve: motivic zeta functions,
//! lattice theta functions, affine Hall-Littlewood polynomials, Kac-Moody
//! Eisenstein series and universal blowup functions, together with
//! monomial-level functional-equation checkers and brute-force finite-field
//! oracles.
//!
//! Everything is computed over the ring `Z[s, s^-1]` with `s^2 = L`, the
//! class of the affine line, using arbitrary-precision integers. There is no
//! floating point anywhere in this crate.

pub mod affine;
pub mod coeff;
pub mod convention;
pub mod eisenstein;
pub mod oracle;
pub mod rank2;
pub mod rootsys;
pub mod series;

pub use affine::{AffCoweight, AffWeight, AffWeylElt, TorsorLabel};
pub use coeff::{CurveData, MotCoeff, RatFnU, SpecMode};
pub use convention::Convention;
pub use rootsys::{FiniteWeylElt, RootSystem};
pub use series::{LatticeSeries, Window};

/// Errors shared by all modules of the engine.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid root system: {0}")]
    InvalidRootSystem(String),
    #[error("rank {rank} exceeds the enumeration cap {cap}")]
    RankOverCap { rank: usize, cap: usize },
    #[error("weight multiset is not proportional to the invariant form: {0}")]
    NotProportional(String),
    #[error("non-integral Tate power")]
    NonIntegralTatePower,
    #[error("non-integral value under point count")]
    NonIntegralPointCount,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("non-expandable direction: {0}")]
    NonExpandable(String),
    #[error("window underflow: {0}")]
    WindowUnderflow(String),
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("negative index required: {0}")]
    NegativeIndexRequired(String),
    #[error("coweight is not antidominant: {0}")]
    NotAntidominant(String),
    #[error("empty overlap window")]
    EmptyOverlap,
    #[error("mismatched root systems")]
    MismatchedRootSystems,
    #[error("stale convention record: {0}")]
    StaleConvention(String),
    #[error("out of bounds: {0}")]
    OutOfBounds(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn worker_count() -> usize {
    if let Ok(v) = std::env::var("KMEIS_WORKERS") {
        if let Ok(n) = v.parse::<usize>() {
            return n.clamp(1, 64);
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get().min(8))
        .unwrap_or(1)
}

/// Deterministic parallel map: results are collected in input order, so any
/// later reduction is independent of the worker schedule.
pub(crate) fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let workers = worker_count();
    if workers <= 1 || items.len() <= 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(workers);
    let mut out: Vec<Option<R>> = Vec::with_capacity(items.len());
    out.resize_with(items.len(), || None);
    std::thread::scope(|scope| {
        let f = &f;
        let mut slots = out.as_mut_slice();
        let mut rest = items;
        let mut handles = Vec::new();
        while !rest.is_empty() {
            let take = chunk.min(rest.len());
            let (head, tail) = rest.split_at(take);
            let (slot_head, slot_tail) = slots.split_at_mut(take);
            rest = tail;
            slots = slot_tail;
            handles.push(scope.spawn(move || {
                for (slot, item) in slot_head.iter_mut().zip(head) {
                    *slot = Some(f(item));
                }
            }));
        }
        for h in handles {
            h.join().expect("worker panicked");
        }
    });
    out.into_iter().map(|r| r.expect("slot filled")).collect()
}
