// SPDX-License-Identifier: Apache-2.0

//! Exact arithmetic in `Q(√a_1, ..., √a_n)`.
//!
//! An element is a vector of integer coefficients over the basis
//! `β_S = Π_{i∈S} √a_i` (indexed by the bitmask `S`) and a positive common
//! denominator, kept coprime to the coefficients. The first `k` generators
//! span the subfield of level `k`; its elements use the first `2^k` slots.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug)]
pub struct Tower {
    gens: Vec<i128>,
    /// `prod[S] = Π_{i∈S} a_i = β_S^2`.
    prod: Vec<BigInt>,
}

impl Tower {
    pub fn new(gens: &[i128]) -> Self {
        let n = gens.len();
        let mut prod = vec![BigInt::one(); 1 << n];
        for mask in 1..1usize << n {
            let low = mask.trailing_zeros() as usize;
            prod[mask] = &prod[mask & (mask - 1)] * BigInt::from(gens[low]);
        }
        Tower { gens: gens.to_vec(), prod }
    }

    pub fn gens(&self) -> &[i128] {
        &self.gens
    }

    pub fn n(&self) -> usize {
        self.gens.len()
    }

    pub fn prod(&self, mask: usize) -> &BigInt {
        &self.prod[mask]
    }

    /// `(S, m)` with `√d = β_S / m`, for `d` in the complete radicand list.
    pub fn basis_of(&self, d: i128) -> Option<(usize, BigInt)> {
        let d = BigInt::from(d);
        (1..self.prod.len()).find_map(|mask| {
            let (q, r) = self.prod[mask].div_rem(&d);
            if !r.is_zero() || q.is_negative() {
                return None;
            }
            let m = q.sqrt();
            (&m * &m == q).then_some((mask, m))
        })
    }

    pub fn sqrt_of(&self, d: i128) -> Option<Elem> {
        let (mask, m) = self.basis_of(d)?;
        Some(Elem::from_parts(self.n(), BigInt::zero(), mask, BigInt::one(), m))
    }

    pub fn mul(&self, x: &Elem, y: &Elem) -> Elem {
        debug_assert_eq!(x.c.len(), y.c.len());
        let len = x.c.len();
        let mut c = vec![BigInt::zero(); len];
        for (s, xs) in x.c.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (t, yt) in y.c.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                let term = xs * yt;
                let shared = s & t;
                if shared == 0 {
                    c[s ^ t] += term;
                } else {
                    c[s ^ t] += term * &self.prod[shared];
                }
            }
        }
        Elem::new(c, &x.den * &y.den)
    }

    pub fn square(&self, x: &Elem) -> Elem {
        self.mul(x, x)
    }

    pub fn pow(&self, x: &Elem, mut e: u32) -> Elem {
        let mut acc = Elem::one(x.level());
        let mut base = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.square(&base);
            e >>= 1;
        }
        acc
    }

    /// A square root of `y` in the subfield of level `y.level()`, if any.
    pub fn sqrt(&self, y: &Elem) -> Option<Elem> {
        let k = y.level();
        if k == 0 {
            return rational_sqrt(&y.c[0], &y.den).map(|(n, d)| Elem::new(vec![n], d));
        }
        let (u, v) = y.split();
        let a = BigInt::from(self.gens[k - 1]);
        if v.is_zero() {
            if let Some(s) = self.sqrt(&u) {
                return Some(Elem::join(&s, &Elem::zero(k - 1)));
            }
            return self.sqrt(&u.div_int(&a)).map(|t| Elem::join(&Elem::zero(k - 1), &t));
        }
        // y = (s + t√a)^2: u = s^2 + a t^2, v = 2st, u^2 - a v^2 = (s^2 - a t^2)^2
        let norm = u.mul_in(self, &u).sub(&v.mul_in(self, &v).mul_int(&a));
        let w = self.sqrt(&norm)?;
        let two = BigInt::from(2);
        for w in [w.clone(), w.neg()] {
            let Some(s) = self.sqrt(&u.add(&w).div_int(&two)) else { continue };
            let Some(t) = self.sqrt(&u.sub(&w).div_int(&(&two * &a))) else { continue };
            let two_st = s.mul_in(self, &t).mul_int(&two);
            if two_st == v {
                return Some(Elem::join(&s, &t));
            }
            if two_st.neg() == v {
                return Some(Elem::join(&s, &t.neg()));
            }
        }
        None
    }
}

/// `sqrt(n / d)` with `d > 0` and `n / d` in lowest terms.
fn rational_sqrt(n: &BigInt, d: &BigInt) -> Option<(BigInt, BigInt)> {
    if n.is_negative() {
        return None;
    }
    let rn = n.sqrt();
    if &rn * &rn != *n {
        return None;
    }
    let rd = d.sqrt();
    (&rd * &rd == *d).then_some((rn, rd))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elem {
    c: Vec<BigInt>,
    den: BigInt,
}

impl Elem {
    /// Normalizes `c / den`.
    pub fn new(mut c: Vec<BigInt>, mut den: BigInt) -> Self {
        assert!(c.len().is_power_of_two() && !den.is_zero());
        if den.sign() == Sign::Minus {
            den = -den;
            for x in &mut c {
                *x = -&*x;
            }
        }
        let mut g = den.clone();
        for x in &c {
            if g.is_one() {
                break;
            }
            if !x.is_zero() {
                g = g.gcd(x);
            }
        }
        if !g.is_one() {
            den /= &g;
            for x in &mut c {
                *x /= &g;
            }
        }
        Elem { c, den }
    }

    pub fn zero(level: usize) -> Self {
        Elem { c: vec![BigInt::zero(); 1 << level], den: BigInt::one() }
    }

    pub fn one(level: usize) -> Self {
        Self::integer(level, BigInt::one())
    }

    pub fn integer(level: usize, v: BigInt) -> Self {
        let mut e = Self::zero(level);
        e.c[0] = v;
        e
    }

    /// `(x + y·basis[mask]) / den` at `level`.
    pub fn from_parts(level: usize, x: BigInt, mask: usize, y: BigInt, den: BigInt) -> Self {
        let mut c = vec![BigInt::zero(); 1 << level];
        c[0] = x;
        c[mask] += y;
        Elem::new(c, den)
    }

    pub fn level(&self) -> usize {
        self.c.len().trailing_zeros() as usize
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.c
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.c[0].is_one() && self.c[1..].iter().all(Zero::is_zero)
    }

    /// Rational when only the constant coefficient is nonzero.
    pub fn is_rational(&self) -> bool {
        self.c[1..].iter().all(Zero::is_zero)
    }

    /// Rough size in bits, for logging.
    pub fn bits(&self) -> u64 {
        self.c.iter().map(|x| x.bits()).max().unwrap_or(0) + self.den.bits()
    }

    pub fn neg(&self) -> Elem {
        Elem { c: self.c.iter().map(|x| -x).collect(), den: self.den.clone() }
    }

    pub fn add(&self, o: &Elem) -> Elem {
        let c = self.c.iter().zip(&o.c).map(|(x, y)| x * &o.den + y * &self.den).collect();
        Elem::new(c, &self.den * &o.den)
    }

    pub fn sub(&self, o: &Elem) -> Elem {
        self.add(&o.neg())
    }

    pub fn mul_int(&self, q: &BigInt) -> Elem {
        Elem::new(self.c.iter().map(|x| x * q).collect(), self.den.clone())
    }

    pub fn div_int(&self, q: &BigInt) -> Elem {
        Elem::new(self.c.clone(), &self.den * q)
    }

    fn mul_in(&self, t: &Tower, o: &Elem) -> Elem {
        t.mul(self, o)
    }

    /// `self = u + v √a_k` with `u, v` one level down.
    fn split(&self) -> (Elem, Elem) {
        let half = self.c.len() / 2;
        (
            Elem::new(self.c[..half].to_vec(), self.den.clone()),
            Elem::new(self.c[half..].to_vec(), self.den.clone()),
        )
    }

    /// `u + v √a_{k+1}`.
    fn join(u: &Elem, v: &Elem) -> Elem {
        let c = u.c.iter().map(|x| x * &v.den).chain(v.c.iter().map(|y| y * &u.den)).collect();
        Elem::new(c, &u.den * &v.den)
    }

    /// `self` as an element of a larger level.
    pub fn lift(&self, level: usize) -> Elem {
        let mut c = self.c.clone();
        c.resize(1 << level, BigInt::zero());
        Elem { c, den: self.den.clone() }
    }

    /// Image in `F_p` under `β_S ↦ image[S]`, or `None` when `p | den`.
    pub fn reduce(&self, p: u64, images: &[u64]) -> Option<u64> {
        let pb = BigInt::from(p);
        let den = (&self.den % &pb).to_u64_digits().1.first().copied().unwrap_or(0);
        let inv = mqclass::arith::inv_mod(den, p)?;
        let mut acc: u128 = 0;
        for (x, &img) in self.c.iter().zip(images) {
            if x.is_zero() {
                continue;
            }
            let r = x.mod_floor(&pb);
            let r = r.to_u64_digits().1.first().copied().unwrap_or(0);
            acc = (acc + r as u128 * img as u128) % p as u128;
        }
        Some(mqclass::arith::mul_mod(acc as u64, inv, p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let t = Tower::new(&[-1, 2, 3]);
        let i = t.sqrt_of(-1).unwrap();
        assert_eq!(t.square(&i), Elem::integer(3, BigInt::from(-1)));
        let s6 = t.sqrt_of(6).unwrap();
        assert_eq!(t.square(&s6), Elem::integer(3, BigInt::from(6)));
        let m6 = t.sqrt_of(-6).unwrap();
        assert_eq!(t.square(&m6), Elem::integer(3, BigInt::from(-6)));
        assert!(t.sqrt_of(5).is_none());
    }

    #[test]
    fn square_roots() {
        let t = Tower::new(&[-1, 2]);
        // ζ8 = (1 + i)/√2 = (√2 + √-2)/2, a square root of i
        let i = t.sqrt_of(-1).unwrap();
        let z8 = t.sqrt(&i).unwrap();
        assert_eq!(t.square(&z8), i);
        assert_eq!(t.pow(&z8, 8), Elem::one(2));
        assert!(t.sqrt(&Elem::integer(2, BigInt::from(3))).is_none());
        assert!(t.sqrt(&Elem::integer(2, BigInt::from(-2))).is_some());
        let t = Tower::new(&[-1, 2, 3]);
        // 2 + √3 = ((√2 + √6)/2)^2
        let u = Elem::from_parts(3, BigInt::from(2), 4, BigInt::one(), BigInt::one());
        let r = t.sqrt(&u).unwrap();
        assert_eq!(t.square(&r), u);
        let nope = Elem::from_parts(3, BigInt::from(1), 2, BigInt::one(), BigInt::one());
        assert!(t.sqrt(&nope).is_none());
    }

    #[test]
    fn random_squares_have_roots() {
        let t = Tower::new(&[-7, 5, 13, -3]);
        let mut seed = 12345u64;
        for _ in 0..50 {
            let c: Vec<BigInt> = (0..16)
                .map(|_| {
                    seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    BigInt::from((seed >> 40) as i64 - (1 << 23))
                })
                .collect();
            let x = Elem::new(c, BigInt::from(1 + (seed % 6)));
            let y = t.square(&x);
            let r = t.sqrt(&y).expect("a square");
            assert!(r == x || r == x.neg());
            assert!(t.sqrt(&t.mul(&y, &Elem::integer(4, BigInt::from(2)))).is_none());
        }
    }
}
