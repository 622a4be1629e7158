// SPDX-License-Identifier: Apache-2.0

//! Published class-number tables, embedded as printed.
//!
//! Fields are given by radicand lists; the biquadratic class-number-2 table
//! is kept as its printed row strings so that its two misprinted cells can
//! be reported instead of silently corrected.

use std::collections::BTreeMap;

use crate::radicand::{canonical_key, complete_radicand_list, split_signs, FieldKey, Radicand};

/// `a` with `Q(√-a)` of class number 1.
pub const GAUSS_CLASS_NUMBER_1: [i128; 9] = [1, 2, 3, 7, 11, 19, 43, 67, 163];

/// `a` with `Q(√-a)` of class number 2.
pub const CLASS_NUMBER_2: [i128; 18] = [5, 6, 10, 13, 15, 22, 35, 37, 51, 58, 91, 115, 123, 187, 235, 267, 403, 427];

/// Class number 4 with class group `(Z/2)^2`.
pub const CLASS_NUMBER_4_ELEMENTARY: [i128; 24] = [
    21, 30, 33, 42, 57, 70, 78, 85, 93, 102, 130, 133, 177, 190, 195, 253, 435, 483, 555, 595, 627, 715, 795, 1435,
];

/// Class number 4 with class group `Z/4`.
pub const CLASS_NUMBER_4_CYCLIC: [i128; 30] = [
    14, 17, 34, 39, 46, 55, 73, 82, 97, 142, 155, 193, 203, 219, 259, 291, 323, 355, 667, 723, 763, 955, 1003, 1027,
    1227, 1243, 1387, 1411, 1507, 1555,
];

/// Imaginary biquadratic fields of class number 1.
pub const BROWN_PARRY: [[i128; 2]; 47] = [
    [-1, 2], [-1, 3], [-1, 5], [-1, 7], [-1, 11], [-1, 13], [-1, 19], [-1, 37], [-1, 43], [-1, 67], [-1, 163],
    [2, -3], [2, -11], [-2, -3], [-2, 5], [-2, -7], [-2, -11], [-2, -19], [-2, 29], [-2, -43], [-2, -67],
    [-3, 5], [-3, -7], [-3, -11], [-3, 17], [-3, -19], [-3, 41], [-3, -43], [-3, -67], [-3, 89], [-3, -163],
    [-7, 5], [-7, -11], [-7, 13], [-7, -19], [-7, -43], [-7, 61], [-7, -163],
    [-11, 17], [-11, -19], [-11, -67], [-11, -163], [-19, -67], [-19, -163], [-43, -67], [-43, -163], [-67, -163],
];

/// Class number 2, Hilbert class field different from the genus field.
pub const BWW_SPECIAL: [[i128; 2]; 20] = [
    [-1, 17], [-1, 73], [-1, 97], [-1, 193], [-2, 17], [-2, 41],
    [-3, 13], [-3, 73], [-3, 97], [-3, 241], [-3, 409],
    [-7, 2], [-7, 29], [-7, 37], [-7, 109],
    [-11, 5], [-11, 113], [-11, 137], [-19, 17], [-19, 73],
];

/// The remaining class-number-2 fields as printed: `a_1` and its `a_2` cells.
pub const BWW_TABLE: [(i128, &str); 21] = [
    (-1, "6, 10, 15, 21, 22, 33, 35, 57, 58, 91, 93, 115, 133, 177, 253, 403"),
    (-2, "3, 11, 21, -5, -13, -15, -35, -37, -91, -115, -235, -403, -427"),
    (-3, "7, 11, 14, 19, 31, 59, 161, 209, 59, -5, -10, -22, -35, -58, -115, -187, -235"),
    (-5, "2, 7, 23, -7, -67, 47, -43, -163"),
    (-6, "-11, -19, -22, -43, -67, -163"),
    (-7, "3, 6, 19, 69, -10, -13, -15, -51, -115, -123, -187, -235, -267, -403"),
    (-10, "46, 94, -35, -43, -67, -163"),
    (-11, "3, 23, 57, -13, -51, -58, -91, -123, -403, -427"),
    (-13, "7, 31 -67, -163"),
    (-15, "3, 6, 21, 69, 141, -43, -67, -163"),
    (-19, "3, 7, 33, -13, -22, -37, -58, -91, -123, -403"),
    (-22, "-43, -67, -163"),
    (-35, "-43, -67, -115, -163, -235"),
    (-37, "-43, -163"),
    (-43, "-58, -115, -235, -267, -427"),
    (-51, "-163, -187"),
    (-58, "-163"),
    (-67, "-123, -235, -403"),
    (-91, "-163, -403"),
    (-115, "-163, -235"),
    (-163, "-187, -235, -267, -403"),
];

/// Imaginary triquadratic fields of class number 1.
pub const FEAVER: [[i128; 3]; 17] = [
    [-1, 2, 3], [-1, 2, 5], [-1, 2, 11],
    [-1, 3, 5], [-1, 3, 7], [-1, 3, 11], [-1, 3, 19],
    [-1, 7, 5], [-1, 7, 13], [-1, 7, 19],
    [-2, -3, -7], [-2, -3, 5], [-2, -7, 5],
    [-3, -7, 5], [-3, -11, 2], [-3, -11, -19], [-3, -11, 17],
];

/// Imaginary quadriquadratic fields of class number dividing 32, by class number.
pub const QUADRIQUADRATIC: [(u64, &[[i128; 4]]); 5] = [
    (2, &[[-1, 2, 3, 5]]),
    (4, &[[-2, -3, 5, -7], [-1, 2, 3, 7], [-1, 3, 5, 7], [-1, 2, 5, 7], [-1, 2, 3, 11]]),
    (8, &[[2, -3, 5, -7], [-1, 3, 7, 13], [-1, 3, 5, 11]]),
    (16, &[[-1, 5, 7, 11], [-1, 3, 5, 13], [-1, 3, 11, 17], [-1, 2, 3, 17], [-1, 2, 7, 11], [-2, -3, 5, -11]]),
    (
        32,
        &[
            [2, -3, -5, 7], [-1, 3, 7, 19], [-2, -3, -5, -7], [-2, -3, -11, 17], [-2, 3, 5, -7], [-1, 6, 7, 10],
            [-2, 3, -5, -7], [-1, 5, 6, 7], [-1, 3, 5, 19], [-1, 3, 7, 10], [2, -3, -5, -11], [-2, -3, -11, -19],
        ],
    ),
];

/// Imaginary biquadratic fields of class number 4, 8, 16, 32.
pub const BIQUADRATIC_COUNTS: [(u64, usize); 4] = [(4, 408), (8, 1186), (16, 2749), (32, 6657)];

/// Survivors of the two biquadratic filters, fields with `h | 32`, fields with `h = 64`.
pub const BIQUADRATIC_STAGES: BiquadStages = BiquadStages { stage1: 82_531, stage2: 11_607, fields: 11_207, h64: 400 };

/// Imaginary triquadratic fields with class number `2^i`, `i = 0..=5`.
pub const TRIQUADRATIC_COUNTS: [(u64, usize); 6] = [(1, 17), (2, 27), (4, 48), (8, 146), (16, 280), (32, 484)];

/// Imaginary quadriquadratic fields with class number `2^i`, `i = 0..=5`.
pub const QUADRIQUADRATIC_COUNTS: [(u64, usize); 6] = [(1, 0), (2, 1), (4, 5), (8, 3), (16, 6), (32, 12)];

pub const SEGMENT_STATS: SegmentStats = SegmentStats {
    biquad_radicands: 1485,
    n3_complete: 6537,
    n3_partial: 495,
    n3_missing: 440,
    n3_promoted: 13,
    n3_vetted: 6550,
    n3_fields: 1002,
    triquad_radicands: 251,
    n4_vetted: 102,
    n4_partial: 1,
    n4_missing: -110,
    n4_missing_h: 12,
    n4_fields: 27,
    quadriquad_radicands: 48,
    n5_vetted: 0,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BiquadStages {
    pub stage1: usize,
    pub stage2: usize,
    pub fields: usize,
    pub h64: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SegmentStats {
    pub biquad_radicands: usize,
    pub n3_complete: usize,
    pub n3_partial: usize,
    pub n3_missing: usize,
    pub n3_promoted: usize,
    pub n3_vetted: usize,
    pub n3_fields: usize,
    pub triquad_radicands: usize,
    pub n4_vetted: usize,
    pub n4_partial: usize,
    pub n4_missing: i128,
    pub n4_missing_h: u64,
    pub n4_fields: usize,
    pub quadriquad_radicands: usize,
    pub n5_vetted: usize,
}

/// Something odd about a printed table cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Anomaly {
    pub row: i128,
    pub cell: String,
    pub note: &'static str,
}

/// One parsed table entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableEntry {
    pub radicands: Vec<i128>,
    pub key: FieldKey,
}

/// Canonical key of the field with the given (possibly non-primitive-sign) radicands.
pub fn field_key(radicands: &[i128]) -> FieldKey {
    let rs: Vec<Radicand> = radicands.iter().map(|&v| Radicand::new(v).expect("table radicand")).collect();
    let list = complete_radicand_list(&rs).expect("table radicands are independent");
    canonical_key(&split_signs(&list).0)
}

fn entry(radicands: &[i128]) -> TableEntry {
    TableEntry { radicands: radicands.to_vec(), key: field_key(radicands) }
}

pub fn negated(list: &[i128]) -> Vec<i128> {
    list.iter().map(|a| -a).collect()
}

pub fn brown_parry() -> Vec<TableEntry> {
    BROWN_PARRY.iter().map(|p| entry(p)).collect()
}

pub fn feaver() -> Vec<TableEntry> {
    FEAVER.iter().map(|p| entry(p)).collect()
}

/// `(h, entry)` for the 27 quadriquadratic fields.
pub fn quadriquadratic() -> Vec<(u64, TableEntry)> {
    QUADRIQUADRATIC.iter().flat_map(|(h, lists)| lists.iter().map(move |l| (*h, entry(l)))).collect()
}

/// The 160 class-number-2 fields, each printed entry once in table order, and
/// the anomalies met while reading the table.
///
/// A cell holding two numbers without a comma is read as both; a repeated
/// cell is kept once.
pub fn bww() -> (Vec<TableEntry>, Vec<Anomaly>) {
    let mut out: Vec<TableEntry> = BWW_SPECIAL.iter().map(|p| entry(p)).collect();
    let mut anomalies = Vec::new();
    for (a1, cells) in BWW_TABLE {
        let mut seen = Vec::new();
        for cell in cells.split(',').map(str::trim) {
            let parts: Vec<&str> = cell.split_whitespace().collect();
            if parts.len() > 1 {
                anomalies.push(Anomaly { row: a1, cell: cell.to_string(), note: "missing separator; read as two entries" });
            }
            for p in parts {
                let a2: i128 = p.parse().expect("numeric cell");
                if seen.contains(&a2) {
                    anomalies.push(Anomaly { row: a1, cell: p.to_string(), note: "entry printed twice in its row" });
                    continue;
                }
                seen.push(a2);
                out.push(entry(&[a1, a2]));
            }
        }
    }
    (out, anomalies)
}

/// Class numbers of every field of degree 8 or 16 listed above.
pub fn higher_degree_class_numbers() -> BTreeMap<FieldKey, u64> {
    let mut map: BTreeMap<FieldKey, u64> = feaver().into_iter().map(|e| (e.key, 1)).collect();
    for (h, e) in quadriquadratic() {
        map.insert(e.key, h);
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn table_sizes() {
        let distinct = |v: &[TableEntry]| v.iter().map(|e| e.key.clone()).collect::<BTreeSet<_>>().len();
        assert_eq!(distinct(&brown_parry()), 47);
        assert_eq!(distinct(&feaver()), 17);
        let (bww, anomalies) = bww();
        assert_eq!(bww.len(), 160);
        assert_eq!(distinct(&bww), 160);
        assert_eq!(anomalies.len(), 2);
        assert_eq!(quadriquadratic().len(), 27);
        assert_eq!(higher_degree_class_numbers().len(), 44);
        assert_eq!(CLASS_NUMBER_4_CYCLIC.len() + CLASS_NUMBER_4_ELEMENTARY.len(), 54);
    }
}
