// SPDX-License-Identifier: Apache-2.0

//! Fundamental units of real quadratic fields by continued fractions.
//!
//! The expansion starts at the reduced generator `ξ0 = (P0 + √D)/Q0` of the
//! ring of integers: `s + √d` when `d ≢ 1 (mod 4)`, `(b + √d)/2` with `b` the
//! largest odd integer below `√d` otherwise. After one period of length `ℓ`,
//! `ε = q_{ℓ-1} ξ0 + q_{ℓ-2}` with `N(ε) = (-1)^ℓ`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::isqrt;
use crate::radicand::Radicand;
use crate::{Error, Result};

/// Largest squarefree radicand accepted by the continued-fraction routines.
pub const UNIT_RADICAND_LIMIT: i128 = 1 << 60;

/// `ε = (x + y√d) / denom`, `denom ∈ {1, 2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FundamentalUnit {
    pub d: u64,
    pub x: BigInt,
    pub y: BigInt,
    pub denom: u8,
    pub norm: i8,
    /// `log ε`.
    pub regulator: f64,
    pub period: usize,
}

impl FundamentalUnit {
    /// `x^2 - d y^2 == norm * denom^2`, checked exactly.
    pub fn norm_holds(&self) -> bool {
        let lhs = &self.x * &self.x - BigInt::from(self.d) * &self.y * &self.y;
        let den = BigInt::from(self.denom) * BigInt::from(self.denom);
        lhs == BigInt::from(self.norm) * den
    }

    /// `Tr(ε) = 2x / denom`, an integer.
    pub fn trace(&self) -> BigInt {
        if self.denom == 1 {
            &self.x * 2
        } else {
            self.x.clone()
        }
    }
}

/// One step of the expansion state `(P, Q)`.
struct Expansion {
    d: u64,
    s: u64,
    p0: u64,
    q0: u64,
}

impl Expansion {
    fn new(d: u64) -> Self {
        let s = isqrt(d);
        if d % 4 == 1 {
            let b = if s % 2 == 1 { s } else { s - 1 };
            Expansion { d, s, p0: b, q0: 2 }
        } else {
            Expansion { d, s, p0: s, q0: 1 }
        }
    }

    /// Visits `(a_k, P_{k+1}, Q_{k+1})` until the state returns to `(P0, Q0)`.
    fn walk(&self, mut f: impl FnMut(u64, u64, u64)) -> usize {
        let (mut p, mut q) = (self.p0, self.q0);
        let mut len = 0;
        loop {
            let a = (p + self.s) / q;
            let p1 = a * q - p;
            let q1 = (self.d - p1 * p1) / q;
            f(a, p1, q1);
            len += 1;
            p = p1;
            q = q1;
            if p == self.p0 && q == self.q0 {
                return len;
            }
        }
    }
}

fn check_radicand(r: &Radicand) -> Result<u64> {
    if r.is_negative() || r.is_unit() {
        return Err(Error::InvalidRadicand(r.to_string(), "expected a positive radicand other than 1"));
    }
    if r.value() > UNIT_RADICAND_LIMIT {
        return Err(Error::BoundExceeded { disc: r.value(), limit: UNIT_RADICAND_LIMIT });
    }
    Ok(r.value() as u64)
}

/// `(period, N(ε))` without building ε.
pub fn unit_norm(r: &Radicand) -> Result<(usize, i8)> {
    let d = check_radicand(r)?;
    let len = Expansion::new(d).walk(|_, _, _| {});
    Ok((len, if len % 2 == 1 { -1 } else { 1 }))
}

/// `log ε` in floating point.
pub fn regulator(r: &Radicand) -> Result<f64> {
    let d = check_radicand(r)?;
    let e = Expansion::new(d);
    let root = (d as f64).sqrt();
    let mut sum = 0.0;
    e.walk(|_, p, q| sum += ((p as f64 + root) / q as f64).ln());
    Ok(sum)
}

/// The least unit `ε > 1` of the ring of integers of `Q(√r)`.
pub fn fundamental_unit(r: &Radicand) -> Result<FundamentalUnit> {
    let d = check_radicand(r)?;
    let e = Expansion::new(d);
    let root = (d as f64).sqrt();
    // (q_{k-1}, q_{k-2})
    let mut q1 = BigInt::zero();
    let mut q2 = BigInt::one();
    let mut reg = 0.0;
    let period = e.walk(|a, p, q| {
        let next = &q1 * a + &q2;
        q2 = std::mem::replace(&mut q1, next);
        reg += ((p as f64 + root) / q as f64).ln();
    });
    // ε = q1·(P0 + √d)/Q0 + q2
    let (mut x, mut y, mut denom) = if e.q0 == 1 {
        (&q1 * e.p0 + &q2, q1, 1u8)
    } else {
        (&q1 * e.p0 + &q2 * 2, q1, 2u8)
    };
    if denom == 2 && x.is_even() && y.is_even() {
        x /= 2;
        y /= 2;
        denom = 1;
    }
    let unit = FundamentalUnit {
        d,
        x,
        y,
        denom,
        norm: if period % 2 == 1 { -1 } else { 1 },
        regulator: reg,
        period,
    };
    if !unit.norm_holds() {
        return Err(Error::Invariant(format!("fundamental unit of Q(√{d}) fails its norm check")));
    }
    Ok(unit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(d: i128) -> FundamentalUnit {
        fundamental_unit(&Radicand::new(d).unwrap()).unwrap()
    }

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn small_units() {
        let u = unit(2);
        assert_eq!((u.x.clone(), u.y.clone(), u.denom, u.norm), (big(1), big(1), 1, -1));
        let u = unit(5);
        assert_eq!((u.x.clone(), u.y.clone(), u.denom, u.norm), (big(1), big(1), 2, -1));
        let u = unit(3);
        assert_eq!((u.x.clone(), u.y.clone(), u.denom, u.norm), (big(2), big(1), 1, 1));
        let u = unit(13);
        assert_eq!((u.x.clone(), u.y.clone(), u.denom, u.norm), (big(3), big(1), 2, -1));
        let u = unit(21);
        assert_eq!((u.x.clone(), u.y.clone(), u.denom, u.norm), (big(5), big(1), 2, 1));
        // 17 has ε = 4 + √17 although 17 ≡ 1 (mod 4)
        let u = unit(17);
        assert_eq!((u.x.clone(), u.y.clone(), u.denom, u.norm), (big(4), big(1), 1, -1));
        let u = unit(94);
        assert_eq!((u.x.clone(), u.y.clone(), u.norm), (big(2143295), big(221064), 1));
    }

    /// Independent oracle: least solution of `x^2 - d y^2 = ±4` by search.
    fn brute_unit(d: u64) -> Option<(u64, u64, i8)> {
        for y in 1u64..200_000 {
            for (sign, t) in [(-1i8, -4i128), (1, 4)] {
                let v = d as i128 * (y as i128) * (y as i128) + t;
                if v < 0 {
                    continue;
                }
                let x = crate::arith::isqrt_u128(v as u128);
                if (x * x) as i128 == v {
                    return Some((x as u64, y, sign));
                }
            }
        }
        None
    }

    #[test]
    fn units_match_search() {
        for d in 2..400i128 {
            let Ok(r) = Radicand::new(d) else { continue };
            let u = fundamental_unit(&r).unwrap();
            assert!(u.norm_holds());
            let Some((x, y, sign)) = brute_unit(d as u64) else {
                assert!(u.y > big(99_999), "d = {d}");
                continue;
            };
            // (x + y√d)/2 from the search
            let (ex, ey) = if u.denom == 2 { (u.x.clone(), u.y.clone()) } else { (&u.x * 2, &u.y * 2) };
            assert_eq!((ex, ey, u.norm), (big(x as i64), big(y as i64), sign), "d = {d}");
            assert!((u.regulator - ((x as f64 + y as f64 * (d as f64).sqrt()) / 2.0).ln()).abs() < 1e-9);
            assert_eq!(unit_norm(&r).unwrap(), (u.period, u.norm));
        }
    }
}
