// SPDX-License-Identifier: Apache-2.0

//! Entry-level comparison of computed results with the embedded tables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::biquadratic::split_by_h;
use crate::fieldio::FieldEntry;
use crate::fixtures::{self, TableEntry};
use crate::quadratic::QuadraticCensus;
use crate::radicand::FieldKey;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Warn,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Warn => "WARN",
            Status::Fail => "FAIL",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffLine {
    pub status: Status,
    pub message: String,
}

impl fmt::Display for DiffLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.status, self.message)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Table {
    BrownParry,
    Bww,
    Arno4,
    Feaver,
    Quad4Lists,
    Counts15,
    Counts16,
    Counts17,
    Stats63,
}

impl Table {
    pub const ALL: [Table; 9] = [
        Table::BrownParry,
        Table::Bww,
        Table::Arno4,
        Table::Feaver,
        Table::Quad4Lists,
        Table::Counts15,
        Table::Counts16,
        Table::Counts17,
        Table::Stats63,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Table::BrownParry => "brown-parry",
            Table::Bww => "bww",
            Table::Arno4 => "arno4",
            Table::Feaver => "feaver",
            Table::Quad4Lists => "quad4-lists",
            Table::Counts15 => "counts-1.5",
            Table::Counts16 => "counts-1.6",
            Table::Counts17 => "counts-1.7",
            Table::Stats63 => "stats-6.3",
        }
    }
}

impl FromStr for Table {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Table::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| Error::UnknownTable(s.to_string()))
    }
}

/// Outcome of one table comparison.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub table: Table,
    pub matched: usize,
    pub expected: usize,
    pub lines: Vec<DiffLine>,
}

impl VerifyReport {
    fn new(table: Table) -> Self {
        VerifyReport { table, matched: 0, expected: 0, lines: Vec::new() }
    }

    fn push(&mut self, status: Status, message: impl Into<String>) {
        self.lines.push(DiffLine { status, message: message.into() });
    }

    fn count(&mut self, label: &str, expected: usize, actual: Option<usize>) {
        self.expected += 1;
        match actual {
            Some(a) if a == expected => {
                self.matched += 1;
                self.push(Status::Pass, format!("{label}: {a}"));
            }
            Some(a) => self.push(Status::Fail, format!("{label}: expected {expected}, got {a}")),
            None => self.push(Status::Fail, format!("{label}: not available")),
        }
    }

    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.status != Status::Fail)
    }

    pub fn warnings(&self) -> usize {
        self.lines.iter().filter(|l| l.status == Status::Warn).count()
    }

    pub fn summary(&self) -> String {
        let verdict = if self.passed() { "match" } else { "MISMATCH" };
        format!("{}: {}/{} {verdict} ({} warnings)", self.table.name(), self.matched, self.expected, self.warnings())
    }
}

/// Computed results available for verification.
#[derive(Clone, Debug, Default)]
pub struct RunData {
    pub census: Option<QuadraticCensus>,
    /// Field sets by `n`.
    pub fields: BTreeMap<u32, Vec<FieldEntry>>,
    /// Key/value reports by `n` (`n = 2` is the biquadratic census).
    pub reports: BTreeMap<u32, Vec<(String, String)>>,
}

impl RunData {
    fn report_value(&self, n: u32, key: &str) -> Option<usize> {
        self.reports.get(&n)?.iter().find(|(k, _)| k == key)?.1.parse().ok()
    }

    fn split(&self, n: u32) -> Option<BTreeMap<u64, usize>> {
        self.fields.get(&n).map(|f| split_by_h(f).into_iter().collect())
    }
}

pub fn verify(table: Table, data: &RunData) -> VerifyReport {
    let mut rep = VerifyReport::new(table);
    match table {
        Table::BrownParry => fields_with_h(&mut rep, data, 2, 1, &fixtures::brown_parry()),
        Table::Feaver => fields_with_h(&mut rep, data, 3, 1, &fixtures::feaver()),
        Table::Bww => {
            let (entries, anomalies) = fixtures::bww();
            for a in anomalies {
                rep.push(Status::Warn, format!("printed table, row {}: `{}`: {}", a.row, a.cell, a.note));
            }
            fields_with_h(&mut rep, data, 2, 2, &entries);
        }
        Table::Quad4Lists => {
            let expected: Vec<(u64, TableEntry)> = fixtures::quadriquadratic();
            compare_fields(&mut rep, data.fields.get(&4), &expected, |_| true);
        }
        Table::Arno4 => arno4(&mut rep, data.census.as_ref()),
        Table::Counts15 => {
            let stages = fixtures::BIQUADRATIC_STAGES;
            rep.count("stage 1 candidates", stages.stage1, data.report_value(2, "stage1"));
            rep.count("stage 2 survivors", stages.stage2, data.report_value(2, "stage2"));
            rep.count("fields with h | 32", stages.fields, data.fields.get(&2).map(Vec::len));
            rep.count("survivors with h = 64", stages.h64, data.report_value(2, "h64"));
            let split = data.split(2);
            for (h, c) in fixtures::BIQUADRATIC_COUNTS {
                rep.count(&format!("n=2 h={h}"), c, split.as_ref().map(|s| s.get(&h).copied().unwrap_or(0)));
            }
        }
        Table::Counts16 => split_counts(&mut rep, data, 3, &fixtures::TRIQUADRATIC_COUNTS),
        Table::Counts17 => split_counts(&mut rep, data, 4, &fixtures::QUADRIQUADRATIC_COUNTS),
        Table::Stats63 => stats(&mut rep, data),
    }
    rep
}

fn fields_with_h(rep: &mut VerifyReport, data: &RunData, n: u32, h: u64, table: &[TableEntry]) {
    let expected: Vec<(u64, TableEntry)> = table.iter().map(|e| (h, e.clone())).collect();
    compare_fields(rep, data.fields.get(&n), &expected, |e| e.h == h);
}

fn compare_fields(
    rep: &mut VerifyReport,
    actual: Option<&Vec<FieldEntry>>,
    expected: &[(u64, TableEntry)],
    select: impl Fn(&FieldEntry) -> bool,
) {
    rep.expected = expected.len();
    let Some(actual) = actual else {
        rep.push(Status::Fail, "no computed field set");
        return;
    };
    let computed: BTreeMap<FieldKey, u64> = actual.iter().map(|e| (e.field.key(), e.h)).collect();
    let mut listed = BTreeSet::new();
    for (h, e) in expected {
        listed.insert(e.key.clone());
        let label = format!("{:?}", e.radicands);
        match computed.get(&e.key) {
            Some(got) if got == h => rep.matched += 1,
            Some(got) => rep.push(Status::Fail, format!("{label}: table h = {h}, computed h = {got}")),
            None => rep.push(Status::Fail, format!("{label}: listed, not computed")),
        }
    }
    for e in actual.iter().filter(|e| select(e) && !listed.contains(&e.field.key())) {
        rep.push(Status::Fail, format!("[{}] h = {}: computed, not listed", e.field.key(), e.h));
    }
}

fn arno4(rep: &mut VerifyReport, census: Option<&QuadraticCensus>) {
    let mut expected: Vec<i128> = fixtures::negated(&fixtures::CLASS_NUMBER_4_ELEMENTARY);
    expected.extend(fixtures::negated(&fixtures::CLASS_NUMBER_4_CYCLIC));
    rep.expected = expected.len();
    let Some(census) = census.filter(|c| c.max_level() >= 2) else {
        rep.push(Status::Fail, "no census through level 2");
        return;
    };
    let got: BTreeSet<i128> = census.level(2).iter().map(|r| r.value()).collect();
    for r in &expected {
        if got.contains(r) {
            rep.matched += 1;
        } else {
            rep.push(Status::Fail, format!("{r}: listed, not in level 2"));
        }
    }
    for r in got.iter().filter(|r| !expected.contains(r)) {
        rep.push(Status::Fail, format!("{r}: in level 2, not listed"));
    }
}

fn split_counts(rep: &mut VerifyReport, data: &RunData, n: u32, counts: &[(u64, usize)]) {
    let split = data.split(n);
    let mut total = 0;
    for &(h, c) in counts {
        total += c;
        rep.count(&format!("n={n} h={h}"), c, split.as_ref().map(|s| s.get(&h).copied().unwrap_or(0)));
    }
    rep.count(&format!("n={n} total"), total, data.fields.get(&n).map(Vec::len));
}

fn stats(rep: &mut VerifyReport, data: &RunData) {
    let s = fixtures::SEGMENT_STATS;
    rep.count("n=3 radicand pool", s.biquad_radicands, data.report_value(3, "pool"));
    rep.count("n=3 vetted complete", s.n3_complete, data.report_value(3, "vetted_complete"));
    rep.count("n=3 vetted partial", s.n3_partial, data.report_value(3, "vetted_partial"));
    rep.count("n=3 missing radicands", s.n3_missing, data.report_value(3, "missing_radicands"));
    rep.count("n=3 promoted", s.n3_promoted, data.report_value(3, "promoted"));
    rep.count("n=3 vetted total", s.n3_vetted, data.report_value(3, "vetted_total"));
    rep.count("n=3 fields", s.n3_fields, data.report_value(3, "fields"));
    rep.count("n=4 radicand pool", s.triquad_radicands, data.report_value(4, "pool"));
    rep.count("n=4 vetted total", s.n4_vetted, data.report_value(4, "vetted_total"));
    rep.count("n=4 vetted partial", s.n4_partial, data.report_value(4, "vetted_partial"));
    rep.count("n=4 missing radicands", 1, data.report_value(4, "missing_radicands"));
    rep.count("n=4 fields", s.n4_fields, data.report_value(4, "fields"));
    rep.count("n=5 radicand pool", s.quadriquad_radicands, data.report_value(5, "pool"));
    rep.count("n=5 vetted total", s.n5_vetted, data.report_value(5, "vetted_total"));
}
