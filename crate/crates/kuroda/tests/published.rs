// SPDX-License-Identifier: Apache-2.0

use mqclass::biquadratic::census_biquad;
use mqclass::fixtures;
use mqclass::par::Exec;
use mqclass::quadratic::{build_census, ClassNumberCache};
use mqclass::Radicand;
use mqclass_kuroda::KurodaOracle;

fn rs(vs: &[i128]) -> Vec<Radicand> {
    vs.iter().map(|&v| Radicand::new(v).unwrap()).collect()
}

#[test]
fn listed_degree_8_and_16_fields() {
    let mut k = KurodaOracle::new();
    for e in fixtures::feaver() {
        assert_eq!(k.class_number(&rs(&e.radicands)).unwrap().h, 1, "{:?}", e.radicands);
    }
    for (h, e) in fixtures::quadriquadratic() {
        assert_eq!(k.class_number(&rs(&e.radicands)).unwrap().h, h, "{:?}", e.radicands);
    }
}

#[test]
fn generators_do_not_matter() {
    let mut k = KurodaOracle::new();
    let a = k.class_number(&rs(&[-1, 2, 3])).unwrap();
    let b = k.class_number(&rs(&[-1, -2, 6])).unwrap();
    let c = k.class_number(&rs(&[5, -7, -11])).unwrap();
    let d = k.class_number(&rs(&[-35, -11, 5])).unwrap();
    assert_eq!(a.h, b.h);
    assert_eq!(c.h, d.h);
    assert!(k.class_number(&rs(&[2, 3, 5])).is_err());
}

/// Degree 4 through the general unit-index route against the dedicated
/// biquadratic path on every survivor of the two filters.
#[test]
fn biquadratic_survivors_agree() {
    let census = build_census(6_500, 3, Exec::default()).unwrap();
    let b = census_biquad(&census, 2, &ClassNumberCache::new(), Exec::default()).unwrap();
    let mut k = KurodaOracle::new();
    let mut n = 0;
    for e in b.fields.iter().chain(&b.rejected) {
        let got = k.class_number(&e.field.primitive()).unwrap();
        assert_eq!(got.h, e.h, "{}", e.field.key());
        assert!(got.log2_q <= 1);
        n += 1;
    }
    assert!(n > 400, "{n}");
}

#[test]
fn brown_parry_and_bww() {
    let mut k = KurodaOracle::new();
    for e in fixtures::brown_parry() {
        assert_eq!(k.class_number(&rs(&e.radicands)).unwrap().h, 1, "{:?}", e.radicands);
    }
    for e in fixtures::bww().0 {
        assert_eq!(k.class_number(&rs(&e.radicands)).unwrap().h, 2, "{:?}", e.radicands);
    }
}
