// SPDX-License-Identifier: Apache-2.0

//! Lower bound on the class-number exponent of an imaginary multiquadratic
//! field in terms of its degree.
//!
//! If `K` has degree `2^n` and class number `2^m`, then `m >= min_exponent(n)`.
//! No bound is claimed for `n <= 5`.

use crate::radicand::Radicand;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundResult {
    pub n: u32,
    pub min_exponent: u64,
}

pub fn min_exponent(n: u32) -> u64 {
    assert!(n >= 1, "degree exponent must be positive");
    match n {
        0..=5 => 0,
        6 => 7,
        7 => 37,
        8 => 99,
        _ => (1u64 << (n - 1)) - 34,
    }
}

pub fn bound(n: u32) -> BoundResult {
    BoundResult { n, min_exponent: min_exponent(n) }
}

/// Members of `neg` equal to `-1` or to minus a prime. At most `n` for a
/// field of degree `2^n`.
pub fn prime_radicand_count(neg: &[Radicand]) -> usize {
    neg.iter().filter(|r| r.is_prime_or_unit_abs()).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floors() {
        assert_eq!([1, 2, 5].map(min_exponent), [0, 0, 0]);
        assert_eq!([6, 7, 8, 9].map(min_exponent), [7, 37, 99, 222]);
        assert_eq!(min_exponent(10), 478);
        for n in 1..40 {
            assert!(min_exponent(n) <= min_exponent(n + 1));
        }
    }

    #[test]
    fn prime_radicands() {
        let rs = |v: &[i128]| v.iter().map(|&x| Radicand::new(x).unwrap()).collect::<Vec<_>>();
        assert_eq!(prime_radicand_count(&rs(&[-1, -2, -3, -6])), 3);
        assert_eq!(prime_radicand_count(&rs(&[-1])), 1);
        assert_eq!(prime_radicand_count(&rs(&[-15, -35])), 0);
    }
}
