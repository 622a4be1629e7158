// SPDX-License-Identifier: Apache-2.0

//! Squarefree radicands, complete radicand lists and the field records the
//! census passes between stages.
//!
//! A radicand is kept factored (sign plus ascending prime set), so the
//! squarefree part of a product is the symmetric difference of prime sets and
//! never needs a factorisation.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use smallvec::SmallVec;

use crate::arith::factor_u64;
use crate::{Error, Result};

type PrimeSet = SmallVec<[u64; 4]>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Radicand {
    value: i128,
    primes: PrimeSet,
}

impl Radicand {
    pub fn unit() -> Self {
        Radicand { value: 1, primes: PrimeSet::new() }
    }

    pub fn minus_one() -> Self {
        Radicand { value: -1, primes: PrimeSet::new() }
    }

    /// Builds a radicand from a sign and strictly increasing primes.
    pub fn from_factors(negative: bool, primes: &[u64]) -> Self {
        debug_assert!(primes.windows(2).all(|w| w[0] < w[1]));
        let mut value: i128 = if negative { -1 } else { 1 };
        for &p in primes {
            value = value.checked_mul(p as i128).expect("radicand overflows i128");
        }
        Radicand { value, primes: primes.iter().copied().collect() }
    }

    /// Factors `v` by trial division and Pollard rho. Rejects 0 and non-squarefree values.
    pub fn new(v: i128) -> Result<Self> {
        let text = v.to_string();
        if v == 0 {
            return Err(Error::InvalidRadicand(text, "zero"));
        }
        let abs = u64::try_from(v.unsigned_abs())
            .map_err(|_| Error::InvalidRadicand(text.clone(), "too large to factor"))?;
        let mut primes = PrimeSet::new();
        for (p, e) in factor_u64(abs) {
            if e > 1 {
                return Err(Error::InvalidRadicand(text, "not squarefree"));
            }
            primes.push(p);
        }
        Ok(Radicand { value: v, primes })
    }

    pub fn value(&self) -> i128 {
        self.value
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn is_unit(&self) -> bool {
        self.value == 1
    }

    pub fn is_negative(&self) -> bool {
        self.value < 0
    }

    /// Squarefree part of the product: sign product, symmetric difference of primes.
    pub fn sf_mul(&self, other: &Radicand) -> Radicand {
        let (a, b) = (&self.primes, &other.primes);
        let mut primes = PrimeSet::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => {
                    primes.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    primes.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        primes.extend_from_slice(&a[i..]);
        primes.extend_from_slice(&b[j..]);
        let negative = self.is_negative() != other.is_negative();
        let mut value: i128 = if negative { -1 } else { 1 };
        for &p in &primes {
            value = value.checked_mul(p as i128).expect("radicand overflows i128");
        }
        Radicand { value, primes }
    }

    /// `|r|` is 1 or a prime.
    pub fn is_prime_or_unit_abs(&self) -> bool {
        self.primes.len() <= 1
    }
}

impl Ord for Radicand {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.cmp(&other.value)
    }
}

impl PartialOrd for Radicand {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Radicand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Debug for Radicand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl FromStr for Radicand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v: i128 = s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidRadicand(s.to_string(), "not an integer"))?;
        Radicand::new(v)
    }
}

/// Squarefree part of a (64-bit) integer, e.g. `sf(20) = 5`.
pub fn sf(n: i128) -> i128 {
    assert!(n != 0, "sf(0) is undefined");
    let abs = u64::try_from(n.unsigned_abs()).expect("sf argument exceeds 64 bits");
    let mut v: i128 = n.signum();
    for (p, e) in factor_u64(abs) {
        if e % 2 == 1 {
            v *= p as i128;
        }
    }
    v
}

/// Sorted, duplicate-free set of radicands, never containing the unit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RadicandList(Vec<Radicand>);

impl RadicandList {
    pub fn new(mut members: Vec<Radicand>) -> Result<Self> {
        if members.iter().any(Radicand::is_unit) {
            return Err(Error::UnitRadicand);
        }
        members.sort();
        members.dedup();
        Ok(RadicandList(members))
    }

    pub fn members(&self) -> &[Radicand] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, r: &Radicand) -> bool {
        self.0.binary_search(r).is_ok()
    }

    /// Closed under the squarefree product of two distinct members.
    pub fn is_closed(&self) -> bool {
        self.0.iter().enumerate().all(|(i, a)| {
            self.0[i + 1..].iter().all(|b| self.contains(&a.sf_mul(b)))
        })
    }

    pub fn into_vec(self) -> Vec<Radicand> {
        self.0
    }
}

impl fmt::Display for RadicandList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_list(f, &self.0)
    }
}

pub(crate) fn write_list(f: &mut impl fmt::Write, items: &[Radicand]) -> fmt::Result {
    for (i, r) in items.iter().enumerate() {
        if i > 0 {
            f.write_char(',')?;
        }
        write!(f, "{r}")?;
    }
    Ok(())
}

/// Comma-separated signed decimals; the empty string is the empty list.
pub fn parse_list(s: &str) -> Result<Vec<Radicand>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(str::parse).collect()
}

/// All squarefree products over nonempty subsets of a primitive list.
pub fn complete_radicand_list(primitive: &[Radicand]) -> Result<RadicandList> {
    if primitive.iter().any(Radicand::is_unit) {
        return Err(Error::UnitRadicand);
    }
    let mut all: Vec<Radicand> = Vec::with_capacity((1 << primitive.len()) - 1);
    for a in primitive {
        let products: Vec<Radicand> = all.iter().map(|x| x.sf_mul(a)).collect();
        all.push(a.clone());
        all.extend(products);
    }
    let mut seen = HashSet::with_capacity(all.len());
    for r in &all {
        if r.is_unit() || !seen.insert(r.value()) {
            let mut shown = String::new();
            let _ = write_list(&mut shown, primitive);
            return Err(Error::DependentRadicands(shown));
        }
    }
    RadicandList::new(all)
}

/// Partition by sign, each half sorted.
pub fn split_signs(q: &RadicandList) -> (Vec<Radicand>, Vec<Radicand>) {
    q.members().iter().cloned().partition(Radicand::is_negative)
}

/// Negative and positive radicands of `K(√r)` from those of `K`.
pub fn extend_field(neg: &[Radicand], pos: &[Radicand], r: &Radicand) -> Result<(Vec<Radicand>, Vec<Radicand>)> {
    debug_assert!(r.is_negative());
    if neg.contains(r) {
        return Err(Error::AlreadyContained(r.to_string()));
    }
    let mut new_neg: Vec<Radicand> = Vec::with_capacity(2 * neg.len());
    new_neg.extend_from_slice(neg);
    new_neg.push(r.clone());
    new_neg.extend(pos.iter().map(|a| r.sf_mul(a)));
    let mut new_pos: Vec<Radicand> = Vec::with_capacity(2 * pos.len() + 1);
    new_pos.extend_from_slice(pos);
    new_pos.extend(neg.iter().map(|a| r.sf_mul(a)));
    new_neg.sort();
    new_pos.sort();
    Ok((new_neg, new_pos))
}

/// Deduplication key of a field: its sorted negative radicands.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldKey(Vec<i128>);

impl FieldKey {
    pub fn values(&self) -> &[i128] {
        &self.0
    }
}

impl fmt::Display for FieldKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FromStr for FieldKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut vals = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<i128>()
                    .map_err(|_| Error::InvalidRadicand(t.to_string(), "not an integer"))
            })
            .collect::<Result<Vec<_>>>()?;
        vals.sort_unstable();
        Ok(FieldKey(vals))
    }
}

pub fn canonical_key(neg: &[Radicand]) -> FieldKey {
    let mut v: Vec<i128> = neg.iter().map(Radicand::value).collect();
    v.sort_unstable();
    v.dedup();
    FieldKey(v)
}

/// An imaginary multiquadratic field as (negative radicands, positive radicands, log2 P).
///
/// `P` is the product of the class numbers of the imaginary quadratic
/// subfields. Records are only built for fields whose `P` is a power of two.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldRec {
    pub neg: Vec<Radicand>,
    pub pos: Vec<Radicand>,
    pub log2_p: u32,
}

impl FieldRec {
    pub fn new(mut neg: Vec<Radicand>, mut pos: Vec<Radicand>, log2_p: u32) -> Self {
        neg.sort();
        pos.sort();
        FieldRec { neg, pos, log2_p }
    }

    /// Record for `Q(√a_1, ..., √a_n)`; `P` is supplied by the caller.
    pub fn from_primitive(primitive: &[Radicand], log2_p: u32) -> Result<Self> {
        let full = complete_radicand_list(primitive)?;
        let (neg, pos) = split_signs(&full);
        if neg.is_empty() {
            return Err(Error::InvalidRadicand(full.to_string(), "field is real"));
        }
        Ok(FieldRec { neg, pos, log2_p })
    }

    /// Field from its negative radicands alone: the positive ones are the
    /// products of one fixed negative radicand with the others.
    pub fn from_negatives(mut neg: Vec<Radicand>, log2_p: u32) -> Result<Self> {
        neg.sort();
        neg.dedup();
        let first = neg.first().cloned().ok_or(Error::Invariant("empty negative set".into()))?;
        let mut pos: Vec<Radicand> = neg[1..].iter().map(|a| a.sf_mul(&first)).collect();
        pos.sort();
        let rec = FieldRec { neg, pos, log2_p };
        if !rec.is_consistent() {
            return Err(Error::Invariant(format!("negative radicands {} do not form a field", rec.key())));
        }
        Ok(rec)
    }

    /// `n` with `[K:Q] = 2^n`.
    pub fn degree_exponent(&self) -> u32 {
        self.neg.len().trailing_zeros() + 1
    }

    pub fn key(&self) -> FieldKey {
        canonical_key(&self.neg)
    }

    pub fn p_product(&self) -> u64 {
        1u64 << self.log2_p
    }

    pub fn contains(&self, r: &Radicand) -> bool {
        if r.is_negative() {
            self.neg.binary_search(r).is_ok()
        } else {
            self.pos.binary_search(r).is_ok()
        }
    }

    /// Sizes `2^{n-1}` / `2^{n-1} - 1` and closure of the union.
    pub fn is_consistent(&self) -> bool {
        let k = self.neg.len();
        if !k.is_power_of_two() || self.pos.len() + 1 != k {
            return false;
        }
        let mut all = self.neg.clone();
        all.extend(self.pos.iter().cloned());
        match RadicandList::new(all) {
            Ok(list) => list.len() == 2 * k - 1 && list.is_closed(),
            Err(_) => false,
        }
    }

    /// A primitive radicand list: negatives by increasing `|r|` first, then
    /// positives, keeping each member not already generated.
    pub fn primitive(&self) -> Vec<Radicand> {
        let mut order: Vec<&Radicand> = self.neg.iter().collect();
        order.sort_by_key(|r| r.value().unsigned_abs());
        let mut pos: Vec<&Radicand> = self.pos.iter().collect();
        pos.sort_by_key(|r| r.value());
        order.extend(pos);
        let mut basis: Vec<Radicand> = Vec::new();
        let mut span: Vec<Radicand> = vec![Radicand::unit()];
        for r in order {
            if span.contains(r) {
                continue;
            }
            let more: Vec<Radicand> = span.iter().map(|g| g.sf_mul(r)).collect();
            span.extend(more);
            basis.push(r.clone());
        }
        basis
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: i128) -> Radicand {
        Radicand::new(v).unwrap()
    }

    fn rs(vs: &[i128]) -> Vec<Radicand> {
        vs.iter().map(|&v| r(v)).collect()
    }

    #[test]
    fn squarefree_products() {
        assert_eq!(sf(20), 5);
        assert_eq!(sf(-72), -2);
        assert_eq!(r(-2).sf_mul(&r(-3)), r(6));
        assert_eq!(r(-6).sf_mul(&r(10)), r(-15));
        assert!(r(-15).sf_mul(&r(-15)).is_unit());
        assert!(Radicand::new(12).is_err());
        assert!(Radicand::new(0).is_err());
        assert_eq!("-6".parse::<Radicand>().unwrap().primes(), &[2, 3]);
    }

    #[test]
    fn complete_lists() {
        let q = complete_radicand_list(&rs(&[-1, 2, 3])).unwrap();
        assert_eq!(q.members(), rs(&[-6, -3, -2, -1, 2, 3, 6]).as_slice());
        assert_eq!(complete_radicand_list(&rs(&[-7])).unwrap().members(), rs(&[-7]).as_slice());
        assert_eq!(complete_radicand_list(&rs(&[-1, 2])).unwrap().members(), rs(&[-2, -1, 2]).as_slice());
        assert!(matches!(
            complete_radicand_list(&rs(&[-1, 2, -2])),
            Err(Error::DependentRadicands(_))
        ));
        assert!(matches!(complete_radicand_list(&[Radicand::unit()]), Err(Error::UnitRadicand)));
    }

    #[test]
    fn sign_split() {
        let (neg, pos) = split_signs(&complete_radicand_list(&rs(&[-1, 2, 3])).unwrap());
        assert_eq!(neg, rs(&[-6, -3, -2, -1]));
        assert_eq!(pos, rs(&[2, 3, 6]));
        let (neg, pos) = split_signs(&complete_radicand_list(&rs(&[2, 3])).unwrap());
        assert!(neg.is_empty());
        assert_eq!(pos, rs(&[2, 3, 6]));
        let (neg, pos) = split_signs(&complete_radicand_list(&rs(&[-1, 2])).unwrap());
        assert_eq!((neg, pos), (rs(&[-2, -1]), rs(&[2])));
    }

    #[test]
    fn extension() {
        let (neg, pos) = extend_field(&rs(&[-2, -1]), &rs(&[2]), &r(-3)).unwrap();
        assert_eq!((neg.clone(), pos.clone()), (rs(&[-6, -3, -2, -1]), rs(&[2, 3, 6])));
        let (n2, p2) = extend_field(&rs(&[-1]), &[], &r(-2)).unwrap();
        assert_eq!((n2, p2), (rs(&[-2, -1]), rs(&[2])));
        let (n3, p3) = extend_field(&rs(&[-2, -1]), &rs(&[2]), &r(-6)).unwrap();
        assert_eq!((n3.clone(), p3), (neg.clone(), pos));
        assert!(matches!(
            extend_field(&rs(&[-2, -1]), &rs(&[2]), &r(-2)),
            Err(Error::AlreadyContained(_))
        ));
        let (n4, _) = extend_field(&rs(&[-3, -1]), &rs(&[3]), &r(-2)).unwrap();
        assert_eq!(canonical_key(&n4), canonical_key(&n3));
    }

    #[test]
    fn keys() {
        assert_eq!(canonical_key(&rs(&[-2, -1])), canonical_key(&rs(&[-1, -2])));
        assert_ne!(canonical_key(&rs(&[-1, -2])), canonical_key(&rs(&[-1, -3])));
        let k = canonical_key(&rs(&[-6, -1, -3, -2]));
        assert_eq!(k.to_string(), "-6,-3,-2,-1");
        assert_eq!(k.to_string().parse::<FieldKey>().unwrap(), k);
    }

    #[test]
    fn field_records() {
        let f = FieldRec::from_primitive(&rs(&[-1, 2, 3]), 1).unwrap();
        assert_eq!(f.degree_exponent(), 3);
        assert!(f.is_consistent());
        let g = FieldRec::from_negatives(f.neg.clone(), 1).unwrap();
        assert_eq!(f, g);
        let prim = f.primitive();
        assert_eq!(prim.len(), 3);
        let again = FieldRec::from_primitive(&prim, 1).unwrap();
        assert_eq!(again.key(), f.key());
        assert!(FieldRec::from_primitive(&rs(&[2, 3]), 0).is_err());
        assert!(FieldRec::from_negatives(rs(&[-1, -2, -3]), 0).is_err());
    }
}
