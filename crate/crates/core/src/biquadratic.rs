// SPDX-License-Identifier: Apache-2.0

//! Imaginary biquadratic fields `K = Q(√a, √b)`, `a, b < 0`.
//!
//! Kuroda's formula gives `h_K = ½ h_a h_b h_c q` with `c = sf(ab)` and the
//! unit index `q = [E_K : W_a W_b ⟨ε_c⟩] ∈ {1, 2}`. The census runs in two
//! stages: pairs from the level sets with `h_a h_b | 2^{m+1}`, then those with
//! `h_a h_b h_c | 2^{m+1}`.

use num_bigint::{BigInt, Sign};
use num_traits::Zero;

use crate::arith::log2_exact;
use crate::fieldio::FieldEntry;
use crate::par::Exec;
use crate::quadratic::{fundamental_unit, ClassNumberCache, QuadraticCensus};
use crate::radicand::{FieldRec, Radicand};
use crate::{Error, Result};

/// A pair `{a, b}` of negative radicands with `P' = h_a h_b = 2^log2_p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BiquadCandidate {
    pub a: Radicand,
    pub b: Radicand,
    pub log2_p: u32,
    pub c: Radicand,
}

impl BiquadCandidate {
    fn new(a: &Radicand, b: &Radicand, log2_p: u32) -> Self {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        BiquadCandidate { a: a.clone(), b: b.clone(), log2_p, c: a.sf_mul(b) }
    }
}

/// Every pair from `Q_i × Q_j` with `i + j <= m + 1`.
pub fn stage1_candidates(census: &QuadraticCensus, m: u32) -> Result<Vec<BiquadCandidate>> {
    let top = m + 1;
    if census.max_level() < top {
        return Err(Error::Invariant(format!(
            "census has levels through {} but stage 1 needs {top}",
            census.max_level()
        )));
    }
    let mut out = Vec::new();
    for i in 0..=top {
        for j in i..=(top - i) {
            let (qi, qj) = (census.level(i), census.level(j));
            if i == j {
                for (k, a) in qi.iter().enumerate() {
                    for b in &qi[k + 1..] {
                        out.push(BiquadCandidate::new(a, b, i + j));
                    }
                }
            } else {
                for a in qi {
                    for b in qj {
                        out.push(BiquadCandidate::new(a, b, i + j));
                    }
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

/// A stage-2 survivor with its real class number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiquadSurvivor {
    pub cand: BiquadCandidate,
    pub h_c: u64,
}

/// Keeps candidates with `P' h_c | 2^{m+1}`.
pub fn stage2_filter(
    cands: &[BiquadCandidate],
    m: u32,
    cache: &ClassNumberCache,
    exec: Exec,
) -> Result<Vec<BiquadSurvivor>> {
    let hs = exec.try_map(cands, |cand| cache.real(&cand.c))?;
    Ok(cands
        .iter()
        .zip(hs)
        .filter(|(cand, h_c)| divides_power_of_two(h_c << cand.log2_p, m + 1))
        .map(|(cand, h_c)| BiquadSurvivor { cand: cand.clone(), h_c })
        .collect())
}

fn divides_power_of_two(x: u64, e: u32) -> bool {
    log2_exact(x).is_some_and(|k| k <= e)
}

/// Squarefree class of a positive integer whose square class is supported
/// on `primes`; `None` if the cofactor is not a square.
fn square_class(t: &BigInt, primes: &[u64]) -> Option<Radicand> {
    let mut rest = t.clone();
    let mut odd = Vec::new();
    for &p in primes {
        let bp = BigInt::from(p);
        let mut e = 0u32;
        loop {
            let (q, r) = (&rest / &bp, &rest % &bp);
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e % 2 == 1 {
            odd.push(p);
        }
    }
    let root = rest.sqrt();
    (&root * &root == rest).then(|| Radicand::from_factors(false, &odd))
}

/// Unit index `[E_K : W_a W_b ⟨ε⟩]` of `Q(√a, √b)`.
///
/// With `W_K` the roots of unity of `K`, the index is
/// `[W_K : W_a W_b] · [E_K : W_K ⟨ε⟩]`. The first factor is 2 only for
/// `Q(ζ8)`. The second is 2 exactly when `ζε` is a square in `K` for some
/// `ζ ∈ W_K`. That needs `N(ε) = 1`; then `ε ≡ t := Tr(ε) + 2` modulo squares
/// of `Q(√c)` since `ε t = (ε + 1)^2`, and the rational squares of `K` are
/// the classes of `1, a, b, c`. For `ζ = -1` this compares `-t`, and when
/// `√-1 ∈ K` the factor `i = (1+i)^2/2` turns `t` into `2t`.
pub fn unit_index(a: &Radicand, b: &Radicand) -> Result<u32> {
    if !(a.is_negative() && b.is_negative()) || a == b {
        return Err(Error::InvalidRadicand(format!("{a},{b}"), "expected two distinct negative radicands"));
    }
    let c = a.sf_mul(b);
    let is_zeta8 = {
        let (x, y) = (a.value().min(b.value()), a.value().max(b.value()));
        (x, y) == (-2, -1)
    };
    let roots_factor = if is_zeta8 { 2 } else { 1 };
    let eps = fundamental_unit(&c)?;
    if eps.norm == -1 {
        return Ok(roots_factor);
    }
    let t = eps.trace() + BigInt::from(2);
    debug_assert_eq!(t.sign(), Sign::Plus);
    let mut primes: Vec<u64> = c.primes().to_vec();
    if !primes.contains(&2) {
        primes.insert(0, 2);
    }
    let delta = square_class(&t, &primes)
        .ok_or_else(|| Error::Invariant(format!("Tr(ε)+2 for Q(√{c}) has a square class outside 2c")))?;
    let classes = [Radicand::unit(), a.clone(), b.clone(), c.clone()];
    let two = Radicand::from_factors(false, &[2]);
    let mut twists = vec![delta.clone(), delta.sf_mul(&Radicand::minus_one())];
    if a.value() == -1 || b.value() == -1 {
        twists.push(delta.sf_mul(&two));
        twists.push(delta.sf_mul(&two).sf_mul(&Radicand::minus_one()));
    }
    let square = twists.iter().any(|x| classes.contains(x));
    Ok(roots_factor * if square { 2 } else { 1 })
}

/// `h_K = ½ h_a h_b h_c q`, with the pieces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BiquadClassNumber {
    pub h: u64,
    pub h_a: u64,
    pub h_b: u64,
    pub h_c: u64,
    pub q: u32,
}

pub fn kuroda(h_a: u64, h_b: u64, h_c: u64, q: u32) -> Result<u64> {
    let prod = h_a * h_b * h_c * q as u64;
    if prod % 2 != 0 {
        return Err(Error::Invariant(format!("Kuroda product {h_a}·{h_b}·{h_c}·{q} is odd")));
    }
    Ok(prod / 2)
}

pub fn class_number_biquad(
    a: &Radicand,
    b: &Radicand,
    census: &QuadraticCensus,
    cache: &ClassNumberCache,
) -> Result<BiquadClassNumber> {
    let h_a = cache.imag(census, a)?;
    let h_b = cache.imag(census, b)?;
    let h_c = cache.real(&a.sf_mul(b))?;
    let q = unit_index(a, b)?;
    Ok(BiquadClassNumber { h: kuroda(h_a, h_b, h_c, q)?, h_a, h_b, h_c, q })
}

/// Counts and fields of the biquadratic census.
#[derive(Clone, Debug, Default)]
pub struct BiquadCensus {
    pub stage1: usize,
    pub stage2: usize,
    /// Survivors with `h | 2^m`.
    pub fields: Vec<FieldEntry>,
    /// Survivors whose class number does not divide `2^m`, with that class number.
    pub rejected: Vec<FieldEntry>,
    /// Every survivor's `(candidate, h_c, q)`.
    pub indices: Vec<(BiquadCandidate, u64, u32)>,
}

impl BiquadCensus {
    /// `(h, count)` over the accepted fields, ascending in `h`.
    pub fn split(&self) -> Vec<(u64, usize)> {
        split_by_h(&self.fields)
    }
}

pub fn split_by_h(fields: &[FieldEntry]) -> Vec<(u64, usize)> {
    let mut map = std::collections::BTreeMap::new();
    for f in fields {
        *map.entry(f.h).or_insert(0usize) += 1;
    }
    map.into_iter().collect()
}

/// Stage 1, stage 2 and Kuroda's formula on every survivor.
pub fn census_biquad(census: &QuadraticCensus, m: u32, cache: &ClassNumberCache, exec: Exec) -> Result<BiquadCensus> {
    let s1 = stage1_candidates(census, m)?;
    log::info!("biquadratic stage 1: {} candidates", s1.len());
    let s2 = stage2_filter(&s1, m, cache, exec)?;
    log::info!("biquadratic stage 2: {} survivors", s2.len());
    let qs = exec.try_map(&s2, |s| unit_index(&s.cand.a, &s.cand.b))?;
    let mut out = BiquadCensus { stage1: s1.len(), stage2: s2.len(), ..Default::default() };
    for (s, q) in s2.into_iter().zip(qs) {
        let h = kuroda(1 << s.cand.log2_p, 1, s.h_c, q)?;
        let field = FieldRec::new(vec![s.cand.a.clone(), s.cand.b.clone()], vec![s.cand.c.clone()], s.cand.log2_p);
        let entry = FieldEntry { field, h };
        if divides_power_of_two(h, m) {
            out.fields.push(entry);
        } else {
            out.rejected.push(entry);
        }
        out.indices.push((s.cand, s.h_c, q));
    }
    out.fields.sort_by_key(|e| e.field.key());
    out.rejected.sort_by_key(|e| e.field.key());
    Ok(out)
}

/// `h_K` for the primitive pair, rewriting to two negative generators.
pub fn class_number_of_pair(
    x: &Radicand,
    y: &Radicand,
    census: &QuadraticCensus,
    cache: &ClassNumberCache,
) -> Result<u64> {
    let (a, b) = match (x.is_negative(), y.is_negative()) {
        (true, true) => (x.clone(), y.clone()),
        (true, false) => (x.clone(), x.sf_mul(y)),
        (false, true) => (y.clone(), x.sf_mul(y)),
        (false, false) => {
            return Err(Error::InvalidRadicand(format!("{x},{y}"), "real biquadratic fields are not supported"))
        }
    };
    Ok(class_number_biquad(&a, &b, census, cache)?.h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: i128) -> Radicand {
        Radicand::new(v).unwrap()
    }

    #[test]
    fn unit_indices() {
        assert_eq!(unit_index(&r(-1), &r(-2)).unwrap(), 2);
        assert_eq!(unit_index(&r(-3), &r(-7)).unwrap(), 2);
        assert_eq!(unit_index(&r(-1), &r(-17)).unwrap(), 1);
        assert_eq!(unit_index(&r(-1), &r(-3)).unwrap(), 2);
        assert!(unit_index(&r(-1), &r(-1)).is_err());
    }

    #[test]
    fn small_fields() {
        let census = crate::quadratic::build_census(2000, 1, Exec::default()).unwrap();
        let cache = ClassNumberCache::new();
        let h = |a, b| class_number_biquad(&r(a), &r(b), &census, &cache).unwrap().h;
        assert_eq!(h(-1, -2), 1);
        assert_eq!(h(-1, -6), 2);
        assert_eq!(h(-7, -10), 2);
        assert_eq!(h(-1, -17), 2);
        assert_eq!(class_number_of_pair(&r(-1), &r(2), &census, &cache).unwrap(), 1);
    }

    #[test]
    fn stage1_small() {
        let census = crate::quadratic::build_census(700, 1, Exec::default()).unwrap();
        let s = stage1_candidates(&census, 0).unwrap();
        let q0 = census.level(0).len();
        let q1 = census.level(1).len();
        assert_eq!(s.len(), q0 * (q0 - 1) / 2 + q0 * q1);
        assert_eq!(s.iter().filter(|c| c.log2_p == 0).count(), 36);
    }

    #[test]
    fn square_classes() {
        assert_eq!(square_class(&BigInt::from(7 * 4 * 9), &[2, 3, 7]), Some(r(7)));
        assert_eq!(square_class(&BigInt::from(2 * 25), &[2]), Some(r(2)));
        assert_eq!(square_class(&BigInt::from(5), &[2]), None);
    }
}
