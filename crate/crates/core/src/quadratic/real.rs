// SPDX-License-Identifier: Apache-2.0

//! Class numbers of real quadratic fields.
//!
//! The exact route lists every reduced indefinite form of the fundamental
//! discriminant `D` and counts the cycles of the reduction operator `ρ`; that
//! count is the narrow class number `h⁺`. The wide class number is `h⁺` when
//! the fundamental unit has norm `-1` and `h⁺/2` otherwise.
//!
//! [`analytic_hr`] evaluates `h·R` from a rapidly convergent series and is
//! used only as a cross-check.

use crate::arith::{isqrt, kronecker};
use crate::radicand::Radicand;
use crate::{Error, Result};

use super::forms;
use super::unit::unit_norm;

/// Largest discriminant accepted by [`class_number_real`].
pub const REAL_DISC_LIMIT: i128 = 100_000_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RealClassNumber {
    pub h: u64,
    pub h_plus: u64,
    pub norm: i8,
}

/// Reduced forms `(a, b)` of discriminant `d > 0`, sorted, `c` implied.
///
/// Reduced means `0 < b < √d` and `√d - b < 2|a| < √d + b`.
pub(crate) fn reduced_forms(d: u64) -> Vec<(u64, i64)> {
    let s = isqrt(d);
    let mut out = Vec::new();
    forms::for_each_value(d as i64, 1, s, |b, _n, factors| {
        let lo = (s - b) / 2 + 1;
        let hi = (s + b) / 2;
        forms::for_each_divisor_in(factors, lo, hi, &mut |a| {
            out.push((b, a as i64));
            out.push((b, -(a as i64)));
        });
    });
    out.sort_unstable();
    out
}

/// `ρ(a, b, c) = (c, b', c')` with `b' ≡ -b (mod 2c)` and `√d - 2|c| < b' < √d`.
fn rho(d: u64, s: u64, a: i64, b: u64) -> (u64, i64) {
    let c = (b as i128 * b as i128 - d as i128) / (4 * a as i128);
    let m = 2 * c.unsigned_abs() as u64;
    let b1 = s - (s + b) % m;
    (b1, c as i64)
}

/// Number of `ρ`-cycles among the reduced forms of `d`.
pub fn narrow_class_number(d: u64) -> Result<u64> {
    let forms = reduced_forms(d);
    let s = isqrt(d);
    let mut seen = vec![false; forms.len()];
    let mut cycles = 0;
    for start in 0..forms.len() {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            let (b, a) = forms[i];
            let (b1, a1) = rho(d, s, a, b);
            i = forms
                .binary_search(&(b1, a1))
                .map_err(|_| Error::Invariant(format!("rho left the reduced forms of {d}")))?;
        }
        if i != start {
            return Err(Error::Invariant(format!("rho is not a permutation on the reduced forms of {d}")));
        }
    }
    Ok(cycles)
}

/// Exact wide class number of `Q(√r)`, `r > 1`.
pub fn class_number_real(r: &Radicand) -> Result<RealClassNumber> {
    if r.is_negative() || r.is_unit() {
        return Err(Error::InvalidRadicand(r.to_string(), "expected a positive radicand other than 1"));
    }
    let d = super::discriminant(r);
    if d > REAL_DISC_LIMIT {
        return Err(Error::BoundExceeded { disc: d, limit: REAL_DISC_LIMIT });
    }
    let h_plus = narrow_class_number(d as u64)?;
    let (_, norm) = unit_norm(r)?;
    let h = if norm == -1 { h_plus } else { h_plus / 2 };
    Ok(RealClassNumber { h, h_plus, norm })
}

/// `E1(x) = ∫_x^∞ e^{-t}/t dt` for `x > 0`.
fn exp_integral_e1(x: f64) -> f64 {
    const EULER: f64 = 0.577_215_664_901_532_9;
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            term *= -x / k as f64;
            sum += term / k as f64;
            if term.abs() < 1e-18 {
                break;
            }
        }
        -EULER - x.ln() - sum
    } else {
        // continued fraction, modified Lentz
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut dd = 1.0 / b;
        let mut h = dd;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64);
            b += 2.0;
            dd = 1.0 / (an * dd + b);
            c = b + an / c;
            let delta = c * dd;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

/// `h·R` for the real quadratic field of fundamental discriminant `d`:
/// `½ Σ χ(n) [ (√d/n) erfc(n √(π/d)) + E1(π n² / d) ]`.
pub fn analytic_hr(d: u64) -> f64 {
    let df = d as f64;
    let root = df.sqrt();
    let scale = (std::f64::consts::PI / df).sqrt();
    // terms below e^{-40} are dropped
    let n_max = (40.0 / std::f64::consts::PI * df).sqrt().ceil() as u64 + 1;
    let mut sum = 0.0;
    for n in 1..=n_max {
        let chi = kronecker(d as i128, n);
        if chi == 0 {
            continue;
        }
        let nf = n as f64;
        let x = nf * scale;
        let t = root / nf * libm::erfc(x) + exp_integral_e1(x * x);
        sum += chi as f64 * t;
    }
    sum / 2.0
}

/// Class number from `h·R` and the regulator, rounded only when the value
/// lies within `0.05` of an integer.
pub fn class_number_real_analytic(r: &Radicand) -> Result<u64> {
    let d = super::discriminant(r) as u64;
    let reg = super::unit::regulator(r)?;
    let est = analytic_hr(d) / reg;
    let rounded = est.round();
    if (est - rounded).abs() > 0.05 || rounded < 1.0 {
        return Err(Error::Invariant(format!("analytic class number of {r} is not near an integer: {est}")));
    }
    Ok(rounded as u64)
}
