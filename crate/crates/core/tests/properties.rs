// SPDX-License-Identifier: Apache-2.0

use mqclass::arith::log2_exact;
use mqclass::biquadratic::{census_biquad, kuroda, unit_index};
use mqclass::multiquad::{vet_segment, Vetted};
use mqclass::par::Exec;
use mqclass::quadratic::{build_census, class_number_imag, count_reduced_forms, discriminant, ClassNumberCache};
use mqclass::radicand::{canonical_key, complete_radicand_list, extend_field, split_signs, Radicand};
use proptest::prelude::*;

fn radicand() -> impl Strategy<Value = Radicand> {
    (-1_000_000i128..1_000_000).prop_filter_map("squarefree, not 1", |v| Radicand::new(v).ok().filter(|r| !r.is_unit()))
}

fn negative() -> impl Strategy<Value = Radicand> {
    (1i128..5_000).prop_filter_map("squarefree", |v| Radicand::new(-v).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn sf_mul_is_an_elementary_abelian_group(a in radicand(), b in radicand(), c in radicand()) {
        prop_assert_eq!(a.sf_mul(&b), b.sf_mul(&a));
        prop_assert_eq!(a.sf_mul(&b).sf_mul(&c), a.sf_mul(&b.sf_mul(&c)));
        prop_assert!(a.sf_mul(&a).is_unit());
        prop_assert_eq!(a.sf_mul(&Radicand::unit()), a.clone());
        // the product is the squarefree part of a*b
        let p = a.value() * b.value();
        prop_assert_eq!(a.sf_mul(&b).value(), mqclass::radicand::sf(p));
    }

    #[test]
    fn complete_list_sizes(prim in proptest::collection::vec(radicand(), 1..=5)) {
        if let Ok(list) = complete_radicand_list(&prim) {
            let n = prim.len();
            prop_assert_eq!(list.len(), (1 << n) - 1);
            prop_assert!(list.is_closed());
            let (neg, pos) = split_signs(&list);
            if prim.iter().any(Radicand::is_negative) {
                prop_assert_eq!(neg.len(), 1 << (n - 1));
                prop_assert_eq!(pos.len(), (1 << (n - 1)) - 1);
            } else {
                prop_assert_eq!(neg.len(), 0);
            }
        }
    }

    #[test]
    fn extend_field_agrees_with_the_complete_list(prim in proptest::collection::vec(radicand(), 1..=4), r in negative()) {
        let mut with_neg = prim.clone();
        with_neg.push(Radicand::new(-1).unwrap());
        let Ok(list) = complete_radicand_list(&with_neg[..]) else { return Ok(()) };
        let (neg, pos) = split_signs(&list);
        let mut bigger = with_neg.clone();
        bigger.push(r.clone());
        match complete_radicand_list(&bigger) {
            Ok(full) => {
                let (n2, p2) = extend_field(&neg, &pos, &r).unwrap();
                let (en, ep) = split_signs(&full);
                prop_assert_eq!(canonical_key(&n2), canonical_key(&en));
                prop_assert_eq!(p2, ep);
            }
            Err(_) => {
                // r already lies in the field
                prop_assert!(neg.contains(&r));
                prop_assert!(extend_field(&neg, &pos, &r).is_err());
            }
        }
    }

    #[test]
    fn kuroda_product_is_even_and_index_small(a in negative(), b in negative()) {
        prop_assume!(a != b);
        let q = unit_index(&a, &b).unwrap();
        prop_assert!(q == 1 || q == 2);
        let c = a.sf_mul(&b);
        let ha = class_number_imag(&a).unwrap();
        let hb = class_number_imag(&b).unwrap();
        let hc = mqclass::quadratic::real::class_number_real(&c).unwrap().h;
        prop_assert!(kuroda(ha, hb, hc, q).is_ok());
    }

    #[test]
    fn single_counter_is_the_class_number(v in 1i128..200_000) {
        if let Ok(r) = Radicand::new(-v) {
            let d = discriminant(&r);
            prop_assert_eq!(class_number_imag(&r).unwrap(), count_reduced_forms(d as i64));
        }
    }
}

#[test]
fn kuroda_integrality_on_every_survivor() {
    let census = build_census(6_500, 3, Exec::default()).unwrap();
    let b = census_biquad(&census, 2, &ClassNumberCache::new(), Exec::default()).unwrap();
    assert!(!b.indices.is_empty());
    for (c, h_c, q) in &b.indices {
        assert!(*q == 1 || *q == 2);
        assert_eq!(((1u64 << c.log2_p) * h_c * *q as u64) % 2, 0, "{c:?}");
    }
}

#[test]
fn p_recomputes_on_complete_candidates() {
    let census = build_census(6_500, 3, Exec::default()).unwrap();
    let cache = ClassNumberCache::new();
    let b = census_biquad(&census, 2, &cache, Exec::default()).unwrap();
    let out = vet_segment(&b.fields, &census, &cache, 3, 2, Exec::default()).unwrap();
    assert!(!out.vetted.is_empty());
    for f in &out.vetted {
        let sum: u32 = f.neg.iter().map(|x| log2_exact(cache.imag(&census, x).unwrap()).unwrap()).sum();
        assert_eq!(sum, f.log2_p, "{}", f.key());
        assert!(f.is_consistent());
    }
    // each parent extension reproduces one of the vetted records' negatives
    let parent = &b.fields[0].field;
    for r in census.level(0) {
        if let Vetted::Complete(f) = mqclass::multiquad::vet_candidate(parent, r, &census, 3, 2) {
            assert!(out.vetted.iter().any(|v| v.key() == f.key()));
        }
    }
}
