// SPDX-License-Identifier: Apache-2.0

//! The index of the subfield units in the unit group of an imaginary
//! multiquadratic field.
//!
//! Start from `G = ⟨ζ, ε_1, ..., ε_R⟩` with `ζ` generating the roots of unity
//! of the quadratic subfields and `ε_j` the fundamental units of the real
//! quadratic subfields. `E_K / G` is a finite 2-group, so `G ≠ E_K` exactly
//! when some element of `G \ G^2` is a square in `K`. Quadratic characters at
//! completely split primes cut `G / G^2` down to a small candidate space;
//! each candidate is then tested by an exact square root. A root found
//! doubles the index; when the candidate space is trivial, `G = E_K`.

use mqclass::arith::{is_prime_u64, jacobi, pow_mod, sqrt_mod_prime};

use crate::field::{Elem, Tower};
use crate::KurodaError;

/// Generators of a finite-index subgroup of the unit group.
#[derive(Clone, Debug)]
pub struct UnitGroup {
    pub torsion: Elem,
    pub torsion_order: u32,
    pub free: Vec<Elem>,
}

impl UnitGroup {
    fn generator(&self, col: usize) -> &Elem {
        if col == 0 {
            &self.torsion
        } else {
            &self.free[col - 1]
        }
    }

    fn columns(&self) -> usize {
        self.free.len() + 1
    }
}

/// Outcome of the saturation.
#[derive(Clone, Debug)]
pub struct IndexResult {
    /// `log2 [E_K : G_start]`.
    pub log2_index: u32,
    pub units: UnitGroup,
    pub primes_used: usize,
}

/// A prime splitting completely in the tower, with the images of `β_S`
/// under each of its `2^n` embeddings.
struct SplitPrime {
    p: u64,
    images: Vec<Vec<u64>>,
}

fn split_primes(tower: &Tower, after: u64, count: usize) -> Vec<SplitPrime> {
    let n = tower.n();
    let mut out = Vec::with_capacity(count);
    let mut p = after | 1;
    while out.len() < count {
        p += 2;
        if !is_prime_u64(p) {
            continue;
        }
        let roots: Option<Vec<u64>> = tower
            .gens()
            .iter()
            .map(|&a| {
                if jacobi(a, p) != 1 {
                    return None;
                }
                sqrt_mod_prime(a.rem_euclid(p as i128) as u64, p)
            })
            .collect();
        let Some(roots) = roots else { continue };
        let images = (0..1usize << n)
            .map(|signs| {
                let s: Vec<u64> = (0..n).map(|i| if signs >> i & 1 == 1 { p - roots[i] } else { roots[i] }).collect();
                (0..1usize << n)
                    .map(|mask| {
                        (0..n).filter(|i| mask >> i & 1 == 1).fold(1u64, |acc, i| mqclass::arith::mul_mod(acc, s[i], p))
                    })
                    .collect()
            })
            .collect();
        out.push(SplitPrime { p, images });
    }
    out
}

/// Rows of quadratic characters, one bit per generator, or `None` when the
/// prime divides a denominator.
fn character_rows(prime: &SplitPrime, g: &UnitGroup) -> Option<Vec<u32>> {
    let p = prime.p;
    let mut rows = vec![0u32; prime.images.len()];
    for col in 0..g.columns() {
        let e = g.generator(col);
        for (row, images) in rows.iter_mut().zip(&prime.images) {
            let v = e.reduce(p, images)?;
            if v == 0 {
                return None;
            }
            if pow_mod(v, (p - 1) / 2, p) != 1 {
                *row |= 1 << col;
            }
        }
    }
    Some(rows)
}

/// Basis of `{ e : row · e = 0 for all rows }` over `F_2`.
fn nullspace(rows: &[u32], cols: usize) -> Vec<u32> {
    let mut pivots: Vec<(usize, u32)> = Vec::new();
    for &r in rows {
        let mut r = r;
        for &(c, pr) in &pivots {
            if r >> c & 1 == 1 {
                r ^= pr;
            }
        }
        if r == 0 {
            continue;
        }
        let c = r.trailing_zeros() as usize;
        for (_, pr) in pivots.iter_mut() {
            if *pr >> c & 1 == 1 {
                *pr ^= r;
            }
        }
        pivots.push((c, r));
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(c, _)| c).collect();
    (0..cols)
        .filter(|c| !pivot_cols.contains(c))
        .map(|free| {
            let mut v = 1u32 << free;
            for &(c, pr) in &pivots {
                if pr >> free & 1 == 1 {
                    v |= 1 << c;
                }
            }
            v
        })
        .collect()
}

const START_PRIMES: usize = 12;
const MAX_PRIMES: usize = 3072;

/// Saturates `start` at 2 inside `E_K`.
pub fn saturate(tower: &Tower, start: UnitGroup) -> Result<IndexResult, KurodaError> {
    let mut g = start;
    let mut log2_index = 0;
    let mut primes: Vec<SplitPrime> = Vec::new();
    let mut wanted = START_PRIMES;
    loop {
        if primes.len() < wanted {
            let after = primes.last().map_or(1000, |p| p.p);
            primes.extend(split_primes(tower, after, wanted - primes.len()));
        }
        let rows: Vec<u32> = primes.iter().filter_map(|p| character_rows(p, &g)).flatten().collect();
        let kernel = nullspace(&rows, g.columns());
        let Some(&e) = kernel.first() else {
            return Ok(IndexResult { log2_index, units: g, primes_used: primes.len() });
        };
        let mut y = Elem::one(tower.n());
        for col in (0..g.columns()).filter(|c| e >> c & 1 == 1) {
            y = tower.mul(&y, g.generator(col));
        }
        match tower.sqrt(&y) {
            Some(x) => {
                log2_index += 1;
                if e == 1 {
                    g.torsion = x;
                    g.torsion_order *= 2;
                } else {
                    let pivot = (1..g.columns()).find(|c| e >> c & 1 == 1).unwrap();
                    g.free[pivot - 1] = x;
                }
            }
            None => {
                wanted *= 2;
                if wanted > MAX_PRIMES {
                    return Err(KurodaError::Undetermined(tower.gens().to_vec(), primes.len()));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nullspaces() {
        assert_eq!(nullspace(&[], 3), vec![1, 2, 4]);
        assert_eq!(nullspace(&[0b011, 0b110], 3), vec![0b111]);
        assert!(nullspace(&[0b01, 0b10], 2).is_empty());
        for k in nullspace(&[0b1011, 0b0110], 4) {
            assert_eq!((k & 0b1011).count_ones() % 2, 0);
            assert_eq!((k & 0b0110).count_ones() % 2, 0);
        }
    }
}
