// SPDX-License-Identifier: Apache-2.0

//! Class numbers of quadratic fields and the imaginary quadratic census.
//!
//! Imaginary class numbers come from counting reduced positive definite
//! forms: in bulk by a sieve over `(a, b, c)` for the census, and one
//! discriminant at a time for radicands beyond the census bound. The two
//! routes share no code. Real class numbers live in [`real`], fundamental
//! units in [`unit`].

pub(crate) mod forms;
pub mod real;
pub mod unit;

use std::collections::HashMap;
use std::fs;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::sync::RwLock;

use crate::arith::{isqrt, log2_exact, SpfTable};
use crate::par::Exec;
use crate::radicand::Radicand;
use crate::{Error, Result};

pub use real::{class_number_real, RealClassNumber};
pub use unit::{fundamental_unit, FundamentalUnit};

/// Census bounds sufficient for the class-number-1, 2 and 4 level sets.
pub const LEVEL_BOUNDS: [u64; 3] = [700, 2_000, 6_500];

/// Covers every imaginary quadratic field of class number at most 100: the
/// largest such |discriminant| is 2,383,747 (class number 98).
pub const FULL_BOUND: u64 = 2_400_000;

/// Largest |discriminant| accepted by the single-discriminant counter.
pub const IMAG_DISC_LIMIT: i128 = 1_000_000_000_000_000;

/// Sufficient census bound for level sets `0..=max_level`.
pub fn default_bound(max_level: u32) -> u64 {
    LEVEL_BOUNDS.get(max_level as usize).copied().unwrap_or(FULL_BOUND)
}

/// Fundamental discriminant of `Q(√r)`: `r` if `r ≡ 1 (mod 4)`, else `4r`.
pub fn discriminant(r: &Radicand) -> i128 {
    assert!(!r.is_unit(), "the unit radicand has no discriminant");
    let v = r.value();
    if v.rem_euclid(4) == 1 {
        v
    } else {
        4 * v
    }
}

/// Number of reduced positive definite forms `(a, b, c)` of discriminant
/// `d < 0`, primitive or not: `|b| <= a <= c`, `b >= 0` if `|b| = a` or `a = c`.
pub fn count_reduced_forms(d: i64) -> u64 {
    assert!(d < 0 && d.rem_euclid(4) <= 1, "{d} is not a negative discriminant");
    let b_max = isqrt(d.unsigned_abs() / 3);
    let mut count = 0u64;
    forms::for_each_value(d, 0, b_max, |b, n, factors| {
        let a_max = isqrt(n);
        forms::for_each_divisor_in(factors, b.max(1), a_max, &mut |a| {
            count += if b == 0 || b == a || a * a == n { 1 } else { 2 };
        });
    });
    count
}

/// Exact class number of the imaginary quadratic field `Q(√r)`, `r < 0`.
pub fn class_number_imag(r: &Radicand) -> Result<u64> {
    assert!(r.is_negative(), "class_number_imag needs a negative radicand");
    let d = discriminant(r);
    if -d > IMAG_DISC_LIMIT {
        return Err(Error::BoundExceeded { disc: d, limit: IMAG_DISC_LIMIT });
    }
    Ok(count_reduced_forms(d as i64))
}

/// `counts[k]` = number of reduced forms of discriminant `-k`, for `k <= bound`.
///
/// Triple loop over `(a, b, c)`; the `a` range is split across workers, each
/// with a private tally.
pub fn count_reduced_forms_bulk(bound: u64, exec: Exec) -> Vec<u32> {
    let len = bound as usize + 1;
    let a_max = isqrt(bound / 3) as usize;
    let pieces = if exec.is_parallel() { 64 } else { 1 };
    exec.fold_ranges(
        a_max,
        pieces,
        || vec![0u32; len],
        |tally, range| {
            for a in (range.start + 1)..=(range.end) {
                let a = a as u64;
                let step = 4 * a;
                // 4a^2 - b^2 falls as b grows
                let b_lo = (4 * a * a).saturating_sub(bound);
                let b_lo = if b_lo == 0 { 0 } else { isqrt(b_lo - 1) + 1 };
                for b in b_lo..=a {
                    let b2 = b * b;
                    // c = a
                    let first = step * a - b2;
                    tally[first as usize] += 1;
                    // c > a: both signs of b unless b = 0 or b = a
                    let w = if b == 0 || b == a { 1 } else { 2 };
                    let mut k = first + step;
                    while k <= bound {
                        tally[k as usize] += w;
                        k += step;
                    }
                }
            }
        },
        |mut x, y| {
            for (u, v) in x.iter_mut().zip(y) {
                *u += v;
            }
            x
        },
    )
}

/// Class numbers of all imaginary quadratic fields with `|disc| <= bound`
/// and the level sets `Q_i = { r : h_r = 2^i }` for `i <= max_level`.
#[derive(Clone, Debug)]
pub struct QuadraticCensus {
    bound: u64,
    max_level: u32,
    /// Indexed by `|r|`; 0 when `-|r|` is not a radicand with `|disc| <= bound`.
    h: Vec<u32>,
    levels: Vec<Vec<Radicand>>,
}

impl QuadraticCensus {
    fn from_table(bound: u64, max_level: u32, h: Vec<u32>) -> Result<Self> {
        let mut levels = vec![Vec::new(); max_level as usize + 1];
        for (abs, &hv) in h.iter().enumerate() {
            if hv == 0 {
                continue;
            }
            if let Some(i) = log2_exact(hv as u64) {
                if i <= max_level {
                    levels[i as usize].push(Radicand::new(-(abs as i128))?);
                }
            }
        }
        Ok(QuadraticCensus { bound, max_level, h, levels })
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn max_level(&self) -> u32 {
        self.max_level
    }

    /// `Q_i`, sorted by decreasing value (increasing `|r|`).
    pub fn level(&self, i: u32) -> &[Radicand] {
        self.levels.get(i as usize).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn levels(&self) -> &[Vec<Radicand>] {
        &self.levels
    }

    /// `h_r` when `r < 0` and `|disc(r)| <= bound`.
    pub fn class_number(&self, r: &Radicand) -> Option<u64> {
        if !r.is_negative() {
            return None;
        }
        let abs = usize::try_from(r.value().unsigned_abs()).ok()?;
        match self.h.get(abs) {
            Some(&hv) if hv > 0 => Some(hv as u64),
            _ => None,
        }
    }

    /// `i` with `r ∈ Q_i`, `i <= max_level`.
    pub fn level_of(&self, r: &Radicand) -> Option<u32> {
        self.class_number(r)
            .and_then(log2_exact)
            .filter(|&i| i <= self.max_level)
    }

    /// `(r, h_r)` for every covered radicand, ordered by `|r|`.
    pub fn entries(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.h
            .iter()
            .enumerate()
            .filter(|(_, &hv)| hv > 0)
            .map(|(abs, &hv)| (-(abs as i64), hv as u64))
    }

    pub fn render_census(&self) -> String {
        let mut out = format!("# quadratic-census B={} max_level={}\n", self.bound, self.max_level);
        for (r, h) in self.entries() {
            let _ = writeln!(out, "{r}\t{h}");
        }
        out
    }

    pub fn write_census(&self, path: &Path) -> Result<()> {
        crate::fieldio::write_atomic(path, self.render_census().as_bytes())
    }

    pub fn render_levels(&self) -> String {
        let mut out = format!("# quadratic-levels B={} max_level={}\n", self.bound, self.max_level);
        for (i, level) in self.levels.iter().enumerate() {
            let _ = writeln!(out, "# level {i}");
            for r in level {
                let _ = writeln!(out, "{r}");
            }
        }
        out
    }

    pub fn write_levels(&self, path: &Path) -> Result<()> {
        crate::fieldio::write_atomic(path, self.render_levels().as_bytes())
    }

    pub fn read_census(path: &Path) -> Result<Self> {
        let bad = |line: usize, message: String| Error::Format {
            what: "census file",
            path: path.to_path_buf(),
            line,
            message,
        };
        let reader = BufReader::new(fs::File::open(path)?);
        let mut lines = reader.lines();
        let header = lines.next().ok_or_else(|| bad(1, "empty file".into()))??;
        let (bound, max_level) = parse_header(&header, "# quadratic-census").ok_or_else(|| bad(1, header.clone()))?;
        let mut h = vec![0u32; bound as usize + 1];
        for (i, line) in lines.enumerate() {
            let line = line?;
            let (r, hv) = line.split_once('\t').ok_or_else(|| bad(i + 2, line.clone()))?;
            let r: i64 = r.parse().map_err(|_| bad(i + 2, line.clone()))?;
            let hv: u32 = hv.parse().map_err(|_| bad(i + 2, line.clone()))?;
            let slot = h.get_mut(r.unsigned_abs() as usize).ok_or_else(|| bad(i + 2, line.clone()))?;
            *slot = hv;
        }
        QuadraticCensus::from_table(bound, max_level, h)
    }

    /// Re-derives `max_level` from an existing table.
    pub fn with_max_level(&self, max_level: u32) -> Result<Self> {
        QuadraticCensus::from_table(self.bound, max_level, self.h.clone())
    }

    /// The same census with `omit` treated as uncovered, as if their class
    /// numbers had been left out of the level lists.
    pub fn with_omitted(&self, omit: &[Radicand]) -> Result<Self> {
        let mut h = self.h.clone();
        for r in omit.iter().filter(|r| r.is_negative()) {
            if let Some(slot) = usize::try_from(r.value().unsigned_abs()).ok().and_then(|i| h.get_mut(i)) {
                *slot = 0;
            }
        }
        QuadraticCensus::from_table(self.bound, self.max_level, h)
    }
}

fn parse_header(line: &str, tag: &str) -> Option<(u64, u32)> {
    let rest = line.strip_prefix(tag)?.trim();
    let mut bound = None;
    let mut level = None;
    for kv in rest.split_whitespace() {
        match kv.split_once('=')? {
            ("B", v) => bound = v.parse().ok(),
            ("max_level", v) => level = v.parse().ok(),
            _ => return None,
        }
    }
    Some((bound?, level?))
}

/// Reads a level-set file back into `(B, levels)`.
pub fn read_levels(path: &Path) -> Result<(u64, Vec<Vec<Radicand>>)> {
    let bad = |line: usize, message: String| Error::Format {
        what: "level-set file",
        path: path.to_path_buf(),
        line,
        message,
    };
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| bad(1, "empty file".into()))?;
    let (bound, _) = parse_header(header, "# quadratic-levels").ok_or_else(|| bad(1, header.to_string()))?;
    let mut levels: Vec<Vec<Radicand>> = Vec::new();
    for (i, line) in lines {
        if let Some(idx) = line.strip_prefix("# level ") {
            let idx: usize = idx.trim().parse().map_err(|_| bad(i + 1, line.to_string()))?;
            if idx != levels.len() {
                return Err(bad(i + 1, format!("expected level {}", levels.len())));
            }
            levels.push(Vec::new());
        } else {
            let r: Radicand = line.parse()?;
            levels.last_mut().ok_or_else(|| bad(i + 1, "radicand before level header".into()))?.push(r);
        }
    }
    Ok((bound, levels))
}

/// Sieves every discriminant `-bound <= d < 0` and fills `Q_0 ..= Q_max_level`.
pub fn build_census(bound: u64, max_level: u32, exec: Exec) -> Result<QuadraticCensus> {
    assert!(bound >= 4, "census bound must be at least 4");
    let counts = count_reduced_forms_bulk(bound, exec);
    let spf = SpfTable::new(bound);
    let mut h = vec![0u32; bound as usize + 1];
    for abs in 1..=bound {
        let disc = if (abs as i64).wrapping_neg().rem_euclid(4) == 1 { abs } else { 4 * abs };
        if disc > bound || !spf.is_squarefree(abs) {
            continue;
        }
        h[abs as usize] = counts[disc as usize];
    }
    QuadraticCensus::from_table(bound, max_level, h)
}

/// Class numbers computed outside the census, keyed by radicand value.
///
/// Entries are write-once; the file form is `<radicand>\t<h>` per line,
/// sorted by radicand.
#[derive(Debug, Default)]
pub struct ClassNumberCache {
    entries: RwLock<HashMap<i128, u64>>,
}

impl ClassNumberCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, r: &Radicand) -> Option<u64> {
        self.entries.read().unwrap().get(&r.value()).copied()
    }

    pub fn insert(&self, r: &Radicand, h: u64) -> Result<()> {
        let mut map = self.entries.write().unwrap();
        match map.insert(r.value(), h) {
            Some(old) if old != h => Err(Error::Invariant(format!("class number of {r} changed from {old} to {h}"))),
            _ => Ok(()),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cached value, else `compute` (whose answer is then stored).
    pub fn get_or_try(&self, r: &Radicand, compute: impl FnOnce(&Radicand) -> Result<u64>) -> Result<u64> {
        if let Some(h) = self.get(r) {
            return Ok(h);
        }
        let h = compute(r)?;
        self.insert(r, h)?;
        Ok(h)
    }

    /// Imaginary class number: census first, then this cache, then the
    /// single-discriminant counter.
    pub fn imag(&self, census: &QuadraticCensus, r: &Radicand) -> Result<u64> {
        match census.class_number(r) {
            Some(h) => Ok(h),
            None => self.get_or_try(r, class_number_imag),
        }
    }

    pub fn real(&self, r: &Radicand) -> Result<u64> {
        self.get_or_try(r, |r| class_number_real(r).map(|c| c.h))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let cache = ClassNumberCache::new();
        if !path.exists() {
            return Ok(cache);
        }
        let text = fs::read_to_string(path)?;
        {
            let mut map = cache.entries.write().unwrap();
            for (i, line) in text.lines().enumerate() {
                let parsed = line
                    .split_once('\t')
                    .and_then(|(r, h)| Some((r.parse::<i128>().ok()?, h.parse::<u64>().ok()?)));
                let (r, h) = parsed.ok_or_else(|| Error::Format {
                    what: "class-number cache",
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: line.to_string(),
                })?;
                map.insert(r, h);
            }
        }
        Ok(cache)
    }

    /// Atomic write via a temporary file and rename.
    pub fn save(&self, path: &Path) -> Result<()> {
        let map = self.entries.read().unwrap();
        let mut items: Vec<(i128, u64)> = map.iter().map(|(&r, &h)| (r, h)).collect();
        items.sort_unstable();
        let mut text = String::with_capacity(items.len() * 12);
        for (r, h) in items {
            text.push_str(&format!("{r}\t{h}\n"));
        }
        crate::fieldio::write_atomic(path, text.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: i128) -> Radicand {
        Radicand::new(v).unwrap()
    }

    /// Independent oracle: direct search over `(a, b)` for one discriminant.
    fn brute_forms(d: i64) -> u64 {
        let n = -d;
        let mut count = 0;
        let mut a = 1i64;
        while 3 * a * a <= n {
            for b in -a + 1..=a {
                let num = b * b - d;
                if num % (4 * a) != 0 {
                    continue;
                }
                let c = num / (4 * a);
                if c < a || (c == a && b < 0) {
                    continue;
                }
                count += 1;
            }
            a += 1;
        }
        count
    }

    #[test]
    fn discriminants() {
        assert_eq!(discriminant(&r(-1)), -4);
        assert_eq!(discriminant(&r(-3)), -3);
        assert_eq!(discriminant(&r(-5)), -20);
        assert_eq!(discriminant(&r(5)), 5);
        assert_eq!(discriminant(&r(3)), 12);
    }

    #[test]
    fn imaginary_class_numbers() {
        assert_eq!(class_number_imag(&r(-163)).unwrap(), 1);
        assert_eq!(class_number_imag(&r(-5)).unwrap(), 2);
        assert_eq!(class_number_imag(&r(-14)).unwrap(), 4);
        assert_eq!(class_number_imag(&r(-110)).unwrap(), 12);
        assert_eq!(class_number_imag(&r(-23)).unwrap(), 3);
        assert_eq!(brute_forms(-23), 3);
    }

    #[test]
    fn single_counter_matches_brute_force() {
        for k in (3..3000i64).filter(|k| k % 4 == 0 || k % 4 == 3) {
            assert_eq!(count_reduced_forms(-k), brute_forms(-k), "d = -{k}");
        }
    }

    #[test]
    fn bulk_sieve_matches_single_counter() {
        let counts = count_reduced_forms_bulk(5000, Exec::default());
        let seq = count_reduced_forms_bulk(5000, Exec::Sequential);
        assert_eq!(counts, seq);
        for k in (3..=5000u64).filter(|k| k % 4 == 0 || k % 4 == 3) {
            assert_eq!(counts[k as usize] as u64, count_reduced_forms(-(k as i64)), "d = -{k}");
        }
    }

    #[test]
    fn small_census_levels() {
        let c = build_census(700, 0, Exec::default()).unwrap();
        let q0: Vec<i128> = c.level(0).iter().map(Radicand::value).collect();
        assert_eq!(q0, vec![-1, -2, -3, -7, -11, -19, -43, -67, -163]);
        let c4 = build_census(4, 0, Exec::default()).unwrap();
        let tiny: Vec<i128> = c4.level(0).iter().map(Radicand::value).collect();
        assert_eq!(tiny, vec![-1, -3]);
        assert_eq!(c.level_of(&r(-43)), Some(0));
        assert_eq!(c.level_of(&r(-5)), None);
        assert_eq!(c.class_number(&r(-5)), Some(2));
        assert_eq!(c.class_number(&r(5)), None);
    }

    #[test]
    fn census_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let c = build_census(2000, 1, Exec::default()).unwrap();
        let p = dir.path().join("census.tsv");
        c.write_census(&p).unwrap();
        let back = QuadraticCensus::read_census(&p).unwrap();
        assert_eq!(back.levels(), c.levels());
        let p2 = dir.path().join("census2.tsv");
        back.write_census(&p2).unwrap();
        assert_eq!(fs::read(&p).unwrap(), fs::read(&p2).unwrap());
        let lp = dir.path().join("levels.txt");
        c.write_levels(&lp).unwrap();
        let (b, levels) = read_levels(&lp).unwrap();
        assert_eq!(b, 2000);
        assert_eq!(levels.as_slice(), c.levels());
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ClassNumberCache::new();
        cache.insert(&r(-110), 12).unwrap();
        cache.insert(&r(10), 2).unwrap();
        assert!(cache.insert(&r(10), 3).is_err());
        let p = dir.path().join("cache.tsv");
        cache.save(&p).unwrap();
        let back = ClassNumberCache::load(&p).unwrap();
        assert_eq!(back.get(&r(-110)), Some(12));
        let p2 = dir.path().join("cache2.tsv");
        back.save(&p2).unwrap();
        assert_eq!(fs::read(&p).unwrap(), fs::read(&p2).unwrap());
    }
}
