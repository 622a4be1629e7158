// SPDX-License-Identifier: Apache-2.0

//! Factored values of `|b^2 - d| / 4` along `b ≡ d (mod 2)`, for enumerating
//! reduced binary quadratic forms of a single discriminant.
//!
//! A reduced form `(a, b, c)` has `ac = (b^2 - d) / 4`, so listing the forms
//! is listing divisors of these values in a window. The values are factored
//! by sieving with the roots of `b^2 ≡ d (mod p)`.

use smallvec::SmallVec;

use crate::arith::{inv_mod, isqrt, primes_up_to, sqrt_mod_prime};

pub(crate) type Factors = SmallVec<[(u64, u32); 10]>;

const BLOCK: usize = 1 << 15;

struct SievePrime {
    p: u64,
    /// Residues of `t` (where `b = parity + 2t`) at which `p` divides the value.
    roots: SmallVec<[u64; 2]>,
}

/// Calls `visit(b, value, factors)` for every `b` in `[b_lo, b_hi]` with
/// `b ≡ d (mod 2)`, where `value = |b^2 - d| / 4 > 0`.
pub(crate) fn for_each_value(d: i64, b_lo: u64, b_hi: u64, mut visit: impl FnMut(u64, u64, &Factors)) {
    let parity = (d.rem_euclid(2)) as u64;
    let first = if b_lo % 2 == parity { b_lo } else { b_lo + 1 };
    if first > b_hi {
        return;
    }
    let value_at = |b: u64| -> u64 { ((b as i128 * b as i128 - d as i128).unsigned_abs() / 4) as u64 };
    let max_value = value_at(first).max(value_at(b_hi));
    let plist = primes_up_to(isqrt(max_value));
    let sieve_primes: Vec<SievePrime> = plist
        .iter()
        .skip(1) // 2 is stripped by trailing zeros
        .filter_map(|&p| {
            let dm = (d as i128).rem_euclid(p as i128) as u64;
            let root = sqrt_mod_prime(dm, p)?;
            let inv2 = inv_mod(2, p).unwrap();
            let to_t = |r: u64| ((r + p - parity % p) % p * inv2) % p;
            let mut roots = SmallVec::new();
            roots.push(to_t(root));
            if root != 0 {
                roots.push(to_t(p - root));
            }
            Some(SievePrime { p, roots })
        })
        .collect();

    let t_first = (first - parity) / 2;
    let t_last = (b_hi - parity) / 2;
    let mut residual: Vec<u64> = Vec::with_capacity(BLOCK);
    let mut factors: Vec<Factors> = Vec::with_capacity(BLOCK);
    let mut t0 = t_first;
    while t0 <= t_last {
        let t1 = (t0 + BLOCK as u64 - 1).min(t_last);
        let len = (t1 - t0 + 1) as usize;
        residual.clear();
        factors.clear();
        for t in t0..=t1 {
            let v = value_at(parity + 2 * t);
            let tz = v.trailing_zeros();
            let mut f = Factors::new();
            if v != 0 && tz > 0 {
                f.push((2, tz));
            }
            residual.push(if v == 0 { 0 } else { v >> tz });
            factors.push(f);
        }
        for sp in &sieve_primes {
            let p = sp.p;
            for &root in &sp.roots {
                let mut i = ((root + p - t0 % p) % p) as usize;
                while i < len {
                    let r = &mut residual[i];
                    if *r != 0 {
                        let mut e = 0;
                        while *r % p == 0 {
                            *r /= p;
                            e += 1;
                        }
                        if e > 0 {
                            factors[i].push((p, e));
                        }
                    }
                    i += p as usize;
                }
            }
        }
        for i in 0..len {
            let b = parity + 2 * (t0 + i as u64);
            let v = value_at(b);
            if v == 0 {
                continue;
            }
            let f = &mut factors[i];
            if residual[i] > 1 {
                f.push((residual[i], 1));
            }
            f.sort_unstable();
            visit(b, v, f);
        }
        t0 = t1 + 1;
    }
}

/// Calls `f(a)` for every divisor `a` of the factored number with `lo <= a <= hi`.
pub(crate) fn for_each_divisor_in(factors: &[(u64, u32)], lo: u64, hi: u64, f: &mut impl FnMut(u64)) {
    fn rec(factors: &[(u64, u32)], acc: u64, lo: u64, hi: u64, f: &mut impl FnMut(u64)) {
        match factors.split_first() {
            None => {
                if acc >= lo {
                    f(acc);
                }
            }
            Some((&(p, e), rest)) => {
                let mut x = acc;
                for k in 0..=e {
                    rec(rest, x, lo, hi, f);
                    if k == e {
                        break;
                    }
                    match x.checked_mul(p) {
                        Some(y) if y <= hi => x = y,
                        _ => break,
                    }
                }
            }
        }
    }
    if lo <= hi {
        rec(factors, 1, lo, hi, f);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factor_u64;

    #[test]
    fn sieve_factors_match_trial_division() {
        for d in [-23i64, -4 * 110, 5, 4 * 3, 4 * 1234567, -3] {
            let hi = isqrt(d.unsigned_abs()) + 5;
            let mut seen = 0;
            for_each_value(d, 0, hi, |b, v, f| {
                let want: Vec<(u64, u32)> = factor_u64(v);
                assert_eq!(f.as_slice(), want.as_slice(), "d={d} b={b}");
                assert_eq!(((b * b) as i64 - d).unsigned_abs() / 4, v);
                seen += 1;
            });
            assert!(seen > 0);
        }
    }

    #[test]
    fn divisor_window() {
        let f = factor_u64(360);
        let mut got = Vec::new();
        for_each_divisor_in(&f, 10, 40, &mut |a| got.push(a));
        got.sort();
        assert_eq!(got, vec![10, 12, 15, 18, 20, 24, 30, 36, 40]);
    }
}
