//! Brute-force finite-field ground truth over small prime fields.
//!
//! Everything here is counted by explicit enumeration of binary forms; no
//! closed formula is substituted anywhere. Divisors on the line are
//! enumerated as normalized degree-n forms in two variables, which includes
//! the point at infinity on an equal footing.

use crate::{Error, Result};

pub const MAX_DEGREE: i64 = 6;
pub const PRIMES: [u64; 3] = [2, 3, 5];

fn check_q(q: u64) -> Result<()> {
    if !PRIMES.contains(&q) {
        return Err(Error::OutOfBounds(format!("q = {q} not in {PRIMES:?}")));
    }
    Ok(())
}

fn check_degree(n: i64) -> Result<()> {
    if !(0..=MAX_DEGREE).contains(&n) {
        return Err(Error::OutOfBounds(format!("degree {n} not in 0..={MAX_DEGREE}")));
    }
    Ok(())
}

/// A binary form of degree `n` over `F_q`: coefficient `c[i]` of
/// `X^i Y^{n-i}`.
type Form = Vec<u64>;

fn all_forms(q: u64, n: i64) -> Vec<Form> {
    let len = (n + 1) as usize;
    let total = q.pow(len as u32);
    let mut out = Vec::with_capacity(total as usize);
    for mut code in 0..total {
        let mut f = vec![0u64; len];
        for c in f.iter_mut() {
            *c = code % q;
            code /= q;
        }
        out.push(f);
    }
    out
}

fn is_zero_form(f: &Form) -> bool {
    f.iter().all(|&c| c == 0)
}

/// Univariate part `f(t, 1)` as a trimmed coefficient vector.
fn univariate(f: &Form) -> Vec<u64> {
    let mut v = f.clone();
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn poly_deg(p: &[u64]) -> i64 {
    p.len() as i64 - 1
}

fn inv_mod(a: u64, q: u64) -> u64 {
    // q prime, a != 0
    let mut r = 1u64;
    for _ in 0..q - 2 {
        r = r * a % q;
    }
    r
}

fn poly_rem(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.to_vec();
    let db = poly_deg(b);
    let lead_inv = inv_mod(*b.last().unwrap(), q);
    while poly_deg(&r) >= db && !r.is_empty() {
        let dr = poly_deg(&r);
        let factor = r.last().unwrap() * lead_inv % q;
        let shift = (dr - db) as usize;
        for (i, &bc) in b.iter().enumerate() {
            let idx = i + shift;
            r[idx] = (r[idx] + q - factor * bc % q) % q;
        }
        while r.last() == Some(&0) {
            r.pop();
        }
    }
    r
}

fn poly_gcd_deg(a: &[u64], b: &[u64], q: u64) -> i64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    while !b.is_empty() {
        let r = poly_rem(&a, &b, q);
        a = b;
        b = r;
    }
    poly_deg(&a)
}

/// Degree of the common homogeneous factor of two nonzero binary forms:
/// the univariate gcd plus the shared multiplicity at infinity.
fn common_factor_degree(f: &Form, g: &Form, q: u64) -> i64 {
    let nf = f.len() as i64 - 1;
    let ng = g.len() as i64 - 1;
    let uf = univariate(f);
    let ug = univariate(g);
    let inf = (nf - poly_deg(&uf)).min(ng - poly_deg(&ug));
    let finite = if uf.is_empty() || ug.is_empty() {
        // one form is a pure power of Y; handled by the infinity part
        0
    } else {
        poly_gcd_deg(&uf, &ug, q)
    };
    inf + finite
}

/// Whether a pair of forms (not both zero) shares no projective zero.
fn coprime_pair(f: &Form, g: &Form, q: u64) -> bool {
    match (is_zero_form(f), is_zero_form(g)) {
        (true, true) => false,
        (true, false) => poly_deg(&univariate(g)) <= 0 && g.len() == 1,
        (false, true) => poly_deg(&univariate(f)) <= 0 && f.len() == 1,
        (false, false) => common_factor_degree(f, g, q) == 0,
    }
}

/// Number of rank-one subsheaves of degree `a1` of the trivial rank-two
/// bundle on the line: nonzero pairs of degree `-a1` forms, modulo scalars.
pub fn count_subsheaves(q: u64, a1: i64) -> Result<u64> {
    check_q(q)?;
    if a1 > 0 {
        return Err(Error::OutOfBounds(format!("a1 = {a1} must be <= 0")));
    }
    check_degree(-a1)?;
    let forms = all_forms(q, -a1);
    let mut count = 0u64;
    for f in &forms {
        for g in &forms {
            if !(is_zero_form(f) && is_zero_form(g)) {
                count += 1;
            }
        }
    }
    debug_assert_eq!(count % (q - 1), 0);
    Ok(count / (q - 1))
}

/// Same enumeration restricted to coprime pairs: saturated subsheaves, i.e.
/// subbundles.
pub fn count_subbundles(q: u64, a1: i64) -> Result<u64> {
    check_q(q)?;
    if a1 > 0 {
        return Err(Error::OutOfBounds(format!("a1 = {a1} must be <= 0")));
    }
    check_degree(-a1)?;
    let forms = all_forms(q, -a1);
    let mut count = 0u64;
    for f in &forms {
        for g in &forms {
            if coprime_pair(f, g, q) {
                count += 1;
            }
        }
    }
    debug_assert_eq!(count % (q - 1), 0);
    Ok(count / (q - 1))
}

/// Normalized degree-n forms: first nonzero coefficient equal to 1; these
/// enumerate the effective divisors of degree `n` on the line.
fn divisors(q: u64, n: i64) -> Vec<Form> {
    all_forms(q, n)
        .into_iter()
        .filter(|f| {
            if let Some(first) = f.iter().find(|&&c| c != 0) {
                *first == 1
            } else {
                false
            }
        })
        .collect()
}

/// Sections of `O(m+n)` whose polar divisor, as meromorphic sections of
/// `O(m)`, is exactly a given degree-n divisor, summed over all such
/// divisors. The zero section counts for `n = 0` only (it has no poles).
pub fn count_polar_sections(q: u64, m: i64, n: i64) -> Result<u64> {
    check_q(q)?;
    if m < 0 {
        return Err(Error::OutOfBounds(format!("m = {m} must be >= 0")));
    }
    if !(0..=3).contains(&n) {
        return Err(Error::OutOfBounds(format!("n = {n} must be in 0..=3")));
    }
    check_degree(m + n)?;
    if n == 0 {
        // all sections of O(m) are regular with empty polar divisor
        return Ok(q.pow((m + 1) as u32));
    }
    let sections = all_forms(q, m + n);
    let mut count = 0u64;
    for d in divisors(q, n) {
        for s in &sections {
            if is_zero_form(s) {
                continue;
            }
            // poles exactly D: s vanishes nowhere on the support of D
            if common_factor_degree(s, &d, q) == 0 {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Number of effective degree-n divisors on the line, by enumeration.
pub fn count_symmetric_product(q: u64, n: i64) -> Result<u64> {
    check_q(q)?;
    check_degree(n)?;
    Ok(divisors(q, n).len() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsheaf_counts() {
        assert_eq!(count_subsheaves(2, 0).unwrap(), 3);
        assert_eq!(count_subsheaves(2, -1).unwrap(), 15);
        assert_eq!(count_subsheaves(3, 0).unwrap(), 4);
    }

    #[test]
    fn subbundle_counts() {
        assert_eq!(count_subbundles(2, 0).unwrap(), 3);
        assert_eq!(count_subbundles(2, -1).unwrap(), 6);
        assert_eq!(count_subbundles(3, -1).unwrap(), 24);
    }

    #[test]
    fn polar_section_counts() {
        assert_eq!(count_polar_sections(2, 0, 0).unwrap(), 2);
        assert_eq!(count_polar_sections(2, 0, 1).unwrap(), 6);
        assert_eq!(count_polar_sections(2, 1, 0).unwrap(), 4);
    }

    #[test]
    fn symmetric_product_counts() {
        assert_eq!(count_symmetric_product(2, 1).unwrap(), 3);
        assert_eq!(count_symmetric_product(2, 2).unwrap(), 7);
        assert_eq!(count_symmetric_product(3, 2).unwrap(), 13);
    }

    #[test]
    fn bounds_enforced() {
        assert!(count_subsheaves(4, 0).is_err());
        assert!(count_subsheaves(2, 1).is_err());
        assert!(count_polar_sections(2, 0, 4).is_err());
        assert!(count_symmetric_product(2, 7).is_err());
    }
}
