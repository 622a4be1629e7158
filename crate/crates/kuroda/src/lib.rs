// SPDX-License-Identifier: Apache-2.0

//! Class numbers of imaginary multiquadratic fields of degree `2^n` from
//! Kuroda's class number formula
//!
//! `h(K) = 2^{-v} · q(K) · Π h(k)`,
//!
//! the product running over all `2^n - 1` quadratic subfields `k`, with
//! `v = (n-1)(2^{n-2}-1) + 2^{n-1} - 1` for totally complex `K` and
//! `q(K) = [E_K : Π E_k]` the unit index. The index is computed exactly by
//! [`units::saturate`]; quadratic class numbers and fundamental units come
//! from `mqclass`.
//!
//! The `mqclass-kuroda-responder` binary of the command-line package serves
//! this as a class-number oracle over the line protocol of `mqclass::oracle`.

pub mod field;
pub mod units;

use std::collections::HashMap;

use num_bigint::BigInt;
use thiserror::Error;

use mqclass::quadratic::{class_number_imag, class_number_real, fundamental_unit};
use mqclass::radicand::{complete_radicand_list, split_signs};
use mqclass::Radicand;

use field::{Elem, Tower};
use units::{saturate, UnitGroup};

#[derive(Debug, Error)]
pub enum KurodaError {
    #[error(transparent)]
    Core(#[from] mqclass::Error),
    #[error("field {0} is totally real")]
    Real(String),
    #[error("square classes of the units of Q(√{0:?}) not separated with {1} primes")]
    Undetermined(Vec<i128>, usize),
    #[error("class number formula is not integral for {field}: 2^{log2_q} · {product} / 2^{v}")]
    NonIntegral { field: String, log2_q: u32, product: u128, v: u32 },
    #[error("class number product overflows for {0}")]
    Overflow(String),
}

/// `h(K)` with the pieces of the formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KurodaClassNumber {
    pub h: u64,
    pub log2_q: u32,
    pub v: u32,
    /// `Π h(k)` over all quadratic subfields.
    pub product: u128,
    pub torsion_order: u32,
}

/// `v` for a totally complex field of degree `2^n`, `n >= 1`.
pub fn kuroda_exponent(n: u32) -> u32 {
    if n < 2 {
        return 0;
    }
    (n - 1) * ((1 << (n - 2)) - 1) + (1 << (n - 1)) - 1
}

/// Remembers quadratic class numbers and units across requests.
#[derive(Debug, Default)]
pub struct KurodaOracle {
    imag: HashMap<i128, u64>,
    real: HashMap<i128, (u64, BigInt, BigInt, u8)>,
}

impl KurodaOracle {
    pub fn new() -> Self {
        Self::default()
    }

    fn imag_h(&mut self, r: &Radicand) -> Result<u64, KurodaError> {
        if let Some(&h) = self.imag.get(&r.value()) {
            return Ok(h);
        }
        let h = class_number_imag(r)?;
        self.imag.insert(r.value(), h);
        Ok(h)
    }

    fn real_data(&mut self, r: &Radicand) -> Result<(u64, BigInt, BigInt, u8), KurodaError> {
        if let Some(v) = self.real.get(&r.value()) {
            return Ok(v.clone());
        }
        let h = class_number_real(r)?.h;
        let eps = fundamental_unit(r)?;
        let v = (h, eps.x, eps.y, eps.denom);
        self.real.insert(r.value(), v.clone());
        Ok(v)
    }

    /// `h` of the imaginary field generated by `primitive`.
    pub fn class_number(&mut self, primitive: &[Radicand]) -> Result<KurodaClassNumber, KurodaError> {
        let list = complete_radicand_list(primitive)?;
        let (neg, pos) = split_signs(&list);
        let name = || format!("{list}");
        if neg.is_empty() {
            return Err(KurodaError::Real(name()));
        }
        let n = primitive.len();
        let gens: Vec<i128> = primitive.iter().map(Radicand::value).collect();
        let tower = Tower::new(&gens);

        let mut product: u128 = 1;
        for r in &neg {
            let h = self.imag_h(r)?;
            product = product.checked_mul(h as u128).ok_or_else(|| KurodaError::Overflow(name()))?;
        }
        let mut free = Vec::with_capacity(pos.len());
        for r in &pos {
            let (h, x, y, denom) = self.real_data(r)?;
            product = product.checked_mul(h as u128).ok_or_else(|| KurodaError::Overflow(name()))?;
            let (mask, m) = tower.basis_of(r.value()).expect("subfield radicand");
            free.push(Elem::from_parts(n, x * &m, mask, y, m * BigInt::from(denom)));
        }
        let (torsion, torsion_order) = subfield_roots_of_unity(&tower, &neg);
        let start = UnitGroup { torsion, torsion_order, free };
        let index = saturate(&tower, start)?;

        let v = kuroda_exponent(n as u32);
        let num = product.checked_shl(index.log2_index).filter(|x| x >> index.log2_index == product);
        let num = num.ok_or_else(|| KurodaError::Overflow(name()))?;
        if num.trailing_zeros() < v {
            return Err(KurodaError::NonIntegral { field: name(), log2_q: index.log2_index, product, v });
        }
        let h = u64::try_from(num >> v).map_err(|_| KurodaError::Overflow(name()))?;
        Ok(KurodaClassNumber { h, log2_q: index.log2_index, v, product, torsion_order: index.units.torsion_order })
    }
}

/// Generator and order of the group generated by the roots of unity of the
/// imaginary quadratic subfields.
fn subfield_roots_of_unity(tower: &Tower, neg: &[Radicand]) -> (Elem, u32) {
    let n = tower.n();
    let has = |v: i128| neg.iter().any(|r| r.value() == v);
    let i = has(-1).then(|| tower.sqrt_of(-1).expect("√-1"));
    // ζ6 = (1 + √-3)/2
    let z6 = has(-3).then(|| tower.sqrt_of(-3).expect("√-3").add(&Elem::one(n)).div_int(&BigInt::from(2)));
    match (i, z6) {
        (Some(i), Some(z6)) => (tower.mul(&i, &z6), 12),
        (Some(i), None) => (i, 4),
        (None, Some(z6)) => (z6, 6),
        (None, None) => (Elem::integer(n, BigInt::from(-1)), 2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponents() {
        assert_eq!(kuroda_exponent(2), 1);
        assert_eq!(kuroda_exponent(3), 5);
        assert_eq!(kuroda_exponent(4), 16);
    }
}
