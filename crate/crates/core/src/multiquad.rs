// SPDX-License-Identifier: Apache-2.0

//! Imaginary `n`-quadratic fields for `n >= 3`, built as `K(√r)` over the
//! fields of degree `2^{n-1}`.
//!
//! A candidate `K(√r)` is vetted before its class number is asked for. With
//! `P` the product of the class numbers of the imaginary quadratic subfields,
//! `2^{2^{n-1}-1} h_K = Q · P · h_k` for integers `Q` and `h_k`, so a field
//! with class number dividing 32 has `P | 2^{2^{n-1}+4}`. Vetting
//! assembles `P(K(√r))` from the census; subfields outside the census levels
//! (the set `S'`) each contribute at least `2^{m+2}` when `P` is a power of
//! two, which already eliminates most candidates.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use crate::arith::log2_exact;
use crate::degree_bound::{min_exponent, prime_radicand_count};
use crate::fieldio::{self, tagged_fields, FieldEntry};
use crate::oracle::ClassNumberOracle;
use crate::par::Exec;
use crate::quadratic::{ClassNumberCache, QuadraticCensus};
use crate::radicand::{canonical_key, extend_field, parse_list, write_list, FieldKey, FieldRec, Radicand};
use crate::{Error, Result};

/// A vetted candidate whose `P` still lacks the class numbers of `s_prime`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidatePartial {
    pub neg: Vec<Radicand>,
    pub pos: Vec<Radicand>,
    pub s_prime: Vec<Radicand>,
    /// `log2 P_estimate`.
    pub log2_p_est: u32,
}

impl CandidatePartial {
    pub fn key(&self) -> FieldKey {
        canonical_key(&self.neg)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Vetted {
    Eliminated,
    Complete(FieldRec),
    Partial(CandidatePartial),
}

/// Largest admissible `log2 P` in degree `2^n`: `2^{n-1} + 4`, the value for
/// class numbers dividing 32, used for every `m <= 5`; `2^{n-1} - 1 + m` above.
pub fn p_exponent_cap(n: u32, m: u32) -> u32 {
    (1u32 << (n - 1)) - 1 + m.max(5)
}

/// Vets `K(√r)` against the level sets of `census`.
///
/// `r` must lie in a level `Q_i`, `i <= m + 1`; anything else is eliminated.
pub fn vet_candidate(k: &FieldRec, r: &Radicand, census: &QuadraticCensus, n: u32, m: u32) -> Vetted {
    let cap = p_exponent_cap(n, m);
    if k.neg.binary_search(r).is_ok() {
        return Vetted::Eliminated;
    }
    let Some(level_r) = census.level_of(r).filter(|&i| i <= m + 1) else {
        return Vetted::Eliminated;
    };
    if k.log2_p + level_r > cap {
        return Vetted::Eliminated;
    }
    let mut est = k.log2_p + level_r;
    let mut s_prime = Vec::new();
    for a in &k.pos {
        let s = r.sf_mul(a);
        match census.level_of(&s).filter(|&i| i <= m + 1) {
            Some(i) => est += i,
            None => s_prime.push(s),
        }
    }
    if est as u64 + (m as u64 + 2) * s_prime.len() as u64 > cap as u64 {
        return Vetted::Eliminated;
    }
    let (neg, pos) = extend_field(&k.neg, &k.pos, r).expect("r is not in K");
    if s_prime.is_empty() {
        Vetted::Complete(FieldRec::new(neg, pos, est))
    } else {
        s_prime.sort();
        Vetted::Partial(CandidatePartial { neg, pos, s_prime, log2_p_est: est })
    }
}

/// `𝔖 = ⋃ S'`.
pub fn collect_missing(partials: &[CandidatePartial]) -> Vec<Radicand> {
    let set: BTreeSet<Radicand> = partials.iter().flat_map(|p| p.s_prime.iter().cloned()).collect();
    set.into_iter().collect()
}

/// Completes `P` for each partial; keeps those with `P` a power of two and
/// `log2 P` within [`p_exponent_cap`].
pub fn finalize_partials(
    partials: &[CandidatePartial],
    resolved: &BTreeMap<Radicand, u64>,
    n: u32,
    m: u32,
) -> Result<Vec<FieldRec>> {
    let cap = p_exponent_cap(n, m);
    let mut out = Vec::new();
    'next: for p in partials {
        let mut log2 = p.log2_p_est;
        for s in &p.s_prime {
            let h = *resolved.get(s).ok_or_else(|| Error::MissingClassNumber(s.to_string()))?;
            match log2_exact(h) {
                Some(e) => log2 += e,
                None => continue 'next,
            }
        }
        if log2 <= cap {
            out.push(FieldRec::new(p.neg.clone(), p.pos.clone(), log2));
        }
    }
    Ok(out)
}

/// Counters of one segment. `raw_*` count (parent, radicand) pairs, the
/// others distinct fields.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SegmentReport {
    pub n: u32,
    pub m: u32,
    pub parents: usize,
    pub pool: usize,
    pub raw_candidates: usize,
    pub raw_complete: usize,
    pub raw_partial: usize,
    pub vetted_complete: usize,
    pub vetted_partial: usize,
    pub missing_radicands: usize,
    pub raw_promoted: usize,
    pub promoted: usize,
    pub vetted_total: usize,
    /// `(h, count)` for accepted fields; empty until class numbers are known.
    pub split: Vec<(u64, usize)>,
    pub fields: Option<usize>,
}

impl SegmentReport {
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let mut v: Vec<(String, String)> = [
            ("n", self.n as usize),
            ("m", self.m as usize),
            ("parents", self.parents),
            ("pool", self.pool),
            ("raw_candidates", self.raw_candidates),
            ("raw_complete", self.raw_complete),
            ("raw_partial", self.raw_partial),
            ("vetted_complete", self.vetted_complete),
            ("vetted_partial", self.vetted_partial),
            ("missing_radicands", self.missing_radicands),
            ("raw_promoted", self.raw_promoted),
            ("promoted", self.promoted),
            ("vetted_total", self.vetted_total),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
        if let Some(f) = self.fields {
            v.push(("fields".into(), f.to_string()));
            let mut split = String::new();
            for (i, (h, c)) in self.split.iter().enumerate() {
                if i > 0 {
                    split.push(',');
                }
                let _ = write!(split, "{h}:{c}");
            }
            v.push(("split".into(), split));
        }
        v
    }

    pub fn from_pairs(pairs: &[(String, String)]) -> Option<Self> {
        let get = |k: &str| pairs.iter().find(|(a, _)| a == k).map(|(_, v)| v.as_str());
        let num = |k: &str| get(k).and_then(|v| v.parse::<usize>().ok());
        let mut r = SegmentReport {
            n: num("n")? as u32,
            m: num("m")? as u32,
            parents: num("parents")?,
            pool: num("pool")?,
            raw_candidates: num("raw_candidates")?,
            raw_complete: num("raw_complete")?,
            raw_partial: num("raw_partial")?,
            vetted_complete: num("vetted_complete")?,
            vetted_partial: num("vetted_partial")?,
            missing_radicands: num("missing_radicands")?,
            raw_promoted: num("raw_promoted")?,
            promoted: num("promoted")?,
            vetted_total: num("vetted_total")?,
            split: Vec::new(),
            fields: num("fields"),
        };
        if let Some(s) = get("split").filter(|s| !s.is_empty()) {
            for item in s.split(',') {
                let (h, c) = item.split_once(':')?;
                r.split.push((h.parse().ok()?, c.parse().ok()?));
            }
        }
        Some(r)
    }
}

/// Everything a segment determines without the class-number oracle.
#[derive(Clone, Debug, Default)]
pub struct VetOutcome {
    pub report: SegmentReport,
    /// Distinct partial candidates, by key.
    pub partials: Vec<CandidatePartial>,
    /// `h_s` for every `s ∈ 𝔖`.
    pub resolved: BTreeMap<Radicand, u64>,
    /// Distinct candidates with `P` known and admissible, by key.
    pub vetted: Vec<FieldRec>,
}

/// `𝒬⁻(prev) ∩ (Q_0 ∪ ... ∪ Q_{m+1})`, sorted.
pub fn radicand_pool(prev: &[FieldEntry], census: &QuadraticCensus, m: u32) -> Vec<Radicand> {
    let set: BTreeSet<Radicand> = prev
        .iter()
        .flat_map(|e| e.field.neg.iter())
        .filter(|r| census.level_of(r).is_some_and(|i| i <= m + 1))
        .cloned()
        .collect();
    set.into_iter().collect()
}

/// Vetting, `𝔖` resolution and promotion for the step from degree `2^{n-1}` to `2^n`.
pub fn vet_segment(
    prev: &[FieldEntry],
    census: &QuadraticCensus,
    cache: &ClassNumberCache,
    n: u32,
    m: u32,
    exec: Exec,
) -> Result<VetOutcome> {
    assert!(n >= 3, "segments start at n = 3");
    let cap = p_exponent_cap(n, m);
    let pool = radicand_pool(prev, census, m);
    let levels: Vec<u32> = pool.iter().map(|r| census.level_of(r).unwrap()).collect();
    let per_parent = exec.map(prev, |entry| {
        let k = &entry.field;
        let bound = cap.saturating_sub(k.log2_p).min(m + 1);
        let mut tried = 0usize;
        let mut complete = Vec::new();
        let mut partial = Vec::new();
        for (r, &lvl) in pool.iter().zip(&levels) {
            if lvl > bound {
                continue;
            }
            tried += 1;
            match vet_candidate(k, r, census, n, m) {
                Vetted::Eliminated => {}
                Vetted::Complete(f) => complete.push(f),
                Vetted::Partial(p) => partial.push(p),
            }
        }
        (tried, complete, partial)
    });

    let mut report = SegmentReport { n, m, parents: prev.len(), pool: pool.len(), ..Default::default() };
    let mut complete: BTreeMap<FieldKey, FieldRec> = BTreeMap::new();
    let mut partials: BTreeMap<FieldKey, CandidatePartial> = BTreeMap::new();
    for (tried, c, p) in per_parent {
        report.raw_candidates += tried;
        report.raw_complete += c.len();
        report.raw_partial += p.len();
        for f in c {
            let key = f.key();
            if let Some(old) = complete.get(&key) {
                if old.log2_p != f.log2_p {
                    return Err(Error::Invariant(format!("P of {key} differs between parents")));
                }
            }
            complete.insert(key, f);
        }
        for p in p {
            partials.insert(p.key(), p);
        }
    }
    report.vetted_complete = complete.len();
    report.vetted_partial = partials.len();
    if let Some(k) = partials.keys().find(|k| complete.contains_key(k)) {
        return Err(Error::Invariant(format!("{k} vetted both with and without S'")));
    }

    let partials: Vec<CandidatePartial> = partials.into_values().collect();
    let missing = collect_missing(&partials);
    report.missing_radicands = missing.len();
    let hs = exec.try_map(&missing, |s| cache.imag(census, s))?;
    let resolved: BTreeMap<Radicand, u64> = missing.into_iter().zip(hs).collect();
    let promoted = finalize_partials(&partials, &resolved, n, m)?;
    report.promoted = promoted.len();
    // raw promotions: partial pairs whose field was promoted
    let promoted_keys: BTreeSet<FieldKey> = promoted.iter().map(FieldRec::key).collect();
    report.raw_promoted = 0;
    for f in promoted {
        complete.insert(f.key(), f);
    }
    report.vetted_total = complete.len();
    let vetted: Vec<FieldRec> = complete.into_values().collect();
    for f in &vetted {
        if !f.is_consistent() || f.degree_exponent() != n {
            return Err(Error::Invariant(format!("vetted candidate {} is malformed", f.key())));
        }
    }
    let mut out = VetOutcome { report, partials, resolved, vetted };
    out.report.raw_promoted = count_raw_promoted(prev, &out, census, m, &promoted_keys);
    Ok(out)
}

/// Number of (parent, radicand) pairs behind the promoted fields.
fn count_raw_promoted(
    prev: &[FieldEntry],
    out: &VetOutcome,
    census: &QuadraticCensus,
    m: u32,
    promoted: &BTreeSet<FieldKey>,
) -> usize {
    if promoted.is_empty() {
        return 0;
    }
    let n = out.report.n;
    let cap = p_exponent_cap(n, m);
    let pool = radicand_pool(prev, census, m);
    let mut count = 0;
    for entry in prev {
        let k = &entry.field;
        let bound = cap.saturating_sub(k.log2_p).min(m + 1);
        for r in &pool {
            if census.level_of(r).unwrap() > bound {
                continue;
            }
            if let Vetted::Partial(p) = vet_candidate(k, r, census, n, m) {
                if promoted.contains(&p.key()) {
                    count += 1;
                }
            }
        }
    }
    count
}

/// Result of a full segment.
#[derive(Clone, Debug, Default)]
pub struct SegmentOutcome {
    pub vet: VetOutcome,
    /// Vetted candidates with their class numbers.
    pub classified: Vec<FieldEntry>,
    /// Fields with class number dividing `2^m`.
    pub fields: Vec<FieldEntry>,
}

/// Class numbers of vetted candidates through `oracle`; keeps `h | 2^m`.
pub fn classify(vetted: &[FieldRec], oracle: &ClassNumberOracle, m: u32, exec: Exec) -> Result<(Vec<FieldEntry>, Vec<FieldEntry>)> {
    let hs = exec.try_map(vetted, |f| oracle.class_number_of(f))?;
    let classified: Vec<FieldEntry> = vetted
        .iter()
        .zip(hs)
        .map(|(f, h)| FieldEntry { field: f.clone(), h })
        .collect();
    let mut fields = Vec::new();
    for e in &classified {
        if log2_exact(e.h).is_some_and(|k| k <= m) {
            fields.push(e.clone());
        }
    }
    Ok((classified, fields))
}

/// Checks every produced field against the degree bound.
pub fn check_degree_bound(fields: &[FieldEntry], n: u32) -> Result<()> {
    for e in fields {
        let count = prime_radicand_count(&e.field.neg);
        if count > n as usize {
            return Err(Error::Invariant(format!("{} has {count} prime radicands", e.field.key())));
        }
        let exp = log2_exact(e.h).unwrap_or(u32::MAX) as u64;
        if exp < min_exponent(n) {
            return Err(Error::Invariant(format!("{} has class number below the degree floor", e.field.key())));
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn run_segment(
    prev: &[FieldEntry],
    census: &QuadraticCensus,
    cache: &ClassNumberCache,
    n: u32,
    m: u32,
    oracle: &ClassNumberOracle,
    exec: Exec,
) -> Result<SegmentOutcome> {
    let vet = vet_segment(prev, census, cache, n, m, exec)?;
    let (classified, fields) = classify(&vet.vetted, oracle, m, exec)?;
    check_degree_bound(&fields, n)?;
    let mut vet = vet;
    vet.report.fields = Some(fields.len());
    vet.report.split = crate::biquadratic::split_by_h(&fields);
    Ok(SegmentOutcome { vet, classified, fields })
}

/// Biquadratic census followed by segments until one comes back empty.
pub fn full_census(
    m: u32,
    census: &QuadraticCensus,
    cache: &ClassNumberCache,
    oracle: &ClassNumberOracle,
    exec: Exec,
) -> Result<BTreeMap<u32, Vec<FieldEntry>>> {
    let mut out = BTreeMap::new();
    let biquad = crate::biquadratic::census_biquad(census, m, cache, exec)?;
    let mut prev = biquad.fields;
    out.insert(2, prev.clone());
    let mut n = 3;
    while !prev.is_empty() {
        let seg = run_segment(&prev, census, cache, n, m, oracle, exec)?;
        if !seg.fields.is_empty() && min_exponent(n) > m as u64 {
            return Err(Error::Invariant(format!("degree 2^{n} produced fields below the exponent floor")));
        }
        prev = seg.fields;
        out.insert(n, prev.clone());
        n += 1;
    }
    Ok(out)
}

pub fn format_partial_line(p: &CandidatePartial) -> String {
    let mut s = String::from("neg=");
    let _ = write_list(&mut s, &p.neg);
    s.push_str("\tpos=");
    let _ = write_list(&mut s, &p.pos);
    s.push_str("\tSprime=");
    let _ = write_list(&mut s, &p.s_prime);
    let _ = write!(s, "\tPest={}", 1u128 << p.log2_p_est);
    s
}

pub fn parse_partial_line(line: &str) -> Option<CandidatePartial> {
    let f = tagged_fields(line, &["neg", "pos", "Sprime", "Pest"])?;
    let pest: u128 = f[3].parse().ok()?;
    if !pest.is_power_of_two() {
        return None;
    }
    Some(CandidatePartial {
        neg: parse_list(f[0]).ok()?,
        pos: parse_list(f[1]).ok()?,
        s_prime: parse_list(f[2]).ok()?,
        log2_p_est: pest.trailing_zeros(),
    })
}

pub fn write_partials(path: &Path, partials: &[CandidatePartial]) -> Result<()> {
    let mut sorted: Vec<&CandidatePartial> = partials.iter().collect();
    sorted.sort_by_key(|p| p.key());
    let mut text = String::new();
    for p in sorted {
        text.push_str(&format_partial_line(p));
        text.push('\n');
    }
    fieldio::write_atomic(path, text.as_bytes())
}

pub fn read_partials(path: &Path) -> Result<Vec<CandidatePartial>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            parse_partial_line(l).ok_or_else(|| Error::Format {
                what: "partials file",
                path: path.to_path_buf(),
                line: i + 1,
                message: l.to_string(),
            })
        })
        .collect()
}

/// Vetted candidates with `P` but no class number: `P=<int>\tneg=...\tpos=...`.
pub fn write_pending(path: &Path, vetted: &[FieldRec]) -> Result<()> {
    let mut sorted: Vec<&FieldRec> = vetted.iter().collect();
    sorted.sort_by_key(|f| f.key());
    let mut text = String::new();
    for f in sorted {
        let _ = write!(text, "P={}\tneg=", f.p_product());
        let _ = write_list(&mut text, &f.neg);
        text.push_str("\tpos=");
        let _ = write_list(&mut text, &f.pos);
        text.push('\n');
    }
    fieldio::write_atomic(path, text.as_bytes())
}

pub fn read_pending(path: &Path) -> Result<Vec<FieldRec>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            let parsed = tagged_fields(l, &["P", "neg", "pos"]).and_then(|f| {
                let p: u64 = f[0].parse().ok().filter(|p: &u64| p.is_power_of_two())?;
                let rec = FieldRec::new(parse_list(f[1]).ok()?, parse_list(f[2]).ok()?, p.trailing_zeros());
                rec.is_consistent().then_some(rec)
            });
            parsed.ok_or_else(|| Error::Format {
                what: "pending candidates",
                path: path.to_path_buf(),
                line: i + 1,
                message: l.to_string(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: i128) -> Radicand {
        Radicand::new(v).unwrap()
    }

    fn rs(v: &[i128]) -> Vec<Radicand> {
        v.iter().map(|&x| r(x)).collect()
    }

    #[test]
    fn vetting_examples() {
        let census = crate::quadratic::build_census(6_500, 6, Exec::default()).unwrap();
        let k = FieldRec::new(rs(&[-2, -1]), rs(&[2]), 0);
        match vet_candidate(&k, &r(-3), &census, 3, 5) {
            Vetted::Complete(f) => {
                assert_eq!(f.neg, rs(&[-6, -3, -2, -1]));
                assert_eq!(f.pos, rs(&[2, 3, 6]));
                assert_eq!(f.p_product(), 2);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(vet_candidate(&k, &r(-2), &census, 3, 5), Vetted::Eliminated);
    }

    #[test]
    fn partial_finalization() {
        let p = CandidatePartial { neg: rs(&[-1]), pos: vec![], s_prime: rs(&[-110]), log2_p_est: 8 };
        let mut resolved = BTreeMap::new();
        resolved.insert(r(-110), 12);
        assert!(finalize_partials(&[p.clone()], &resolved, 3, 5).unwrap().is_empty());
        assert!(matches!(finalize_partials(&[p], &BTreeMap::new(), 3, 5), Err(Error::MissingClassNumber(_))));
        assert!(collect_missing(&[]).is_empty());
    }

    #[test]
    fn partial_lines_round_trip() {
        let p = CandidatePartial { neg: rs(&[-6, -3, -2, -1]), pos: rs(&[2, 3, 6]), s_prime: rs(&[-6]), log2_p_est: 3 };
        let line = format_partial_line(&p);
        assert_eq!(line, "neg=-6,-3,-2,-1\tpos=2,3,6\tSprime=-6\tPest=8");
        assert_eq!(parse_partial_line(&line), Some(p));
    }

    #[test]
    fn report_round_trip() {
        let rep = SegmentReport { n: 3, m: 5, raw_candidates: 10, split: vec![(1, 2), (4, 3)], fields: Some(5), ..Default::default() };
        assert_eq!(SegmentReport::from_pairs(&rep.to_pairs()), Some(rep));
    }
}
