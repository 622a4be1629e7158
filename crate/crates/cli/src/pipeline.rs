// SPDX-License-Identifier: Apache-2.0

//! Pipeline stages with their checkpoint files under the data directory:
//!
//! ```text
//! census.tsv, levels.txt          quadratic census and level sets
//! quadratic-cache.tsv             class numbers beyond the census
//! oracle-cache.tsv                degree >= 8 class numbers
//! n2/{fields,rejected}.tsv, n2/report.txt
//! n<k>/{pending,partials,classified,fields}.tsv, n<k>/report.txt
//! summary.txt
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::Context;
use log::info;
use mqclass::biquadratic::{census_biquad, split_by_h, BiquadCensus};
use mqclass::fieldio::{self, read_field_set, render_report, write_field_set, FieldEntry};
use mqclass::multiquad::{check_degree_bound, classify, vet_segment, write_partials, write_pending, SegmentReport};
use mqclass::oracle::{ClassNumberOracle, OracleCache, ProcessResponder};
use mqclass::par::Exec;
use mqclass::quadratic::{build_census, ClassNumberCache, QuadraticCensus};
use mqclass::verify::RunData;

use crate::config::RunConfig;

pub struct Session {
    pub cfg: RunConfig,
    pub exec: Exec,
    pub qcache: ClassNumberCache,
}

impl Session {
    pub fn open(cfg: RunConfig) -> anyhow::Result<Self> {
        std::fs::create_dir_all(&cfg.data_dir).with_context(|| format!("creating {}", cfg.data_dir.display()))?;
        let qcache = ClassNumberCache::load(&cfg.path("quadratic-cache.tsv"))?;
        Ok(Session { cfg, exec: Exec::default(), qcache })
    }

    pub fn save_caches(&self, oracle: Option<&ClassNumberOracle>) -> anyhow::Result<()> {
        self.qcache.save(&self.cfg.path("quadratic-cache.tsv"))?;
        if let Some(o) = oracle {
            o.cache().save(&self.cfg.path("oracle-cache.tsv"))?;
        }
        Ok(())
    }

    /// The census file when it has the configured bound, else a fresh sieve.
    pub fn census(&self) -> anyhow::Result<QuadraticCensus> {
        let path = self.cfg.path("census.tsv");
        if path.exists() {
            let c = QuadraticCensus::read_census(&path)?;
            if c.bound() == self.cfg.bound {
                info!("reusing census at B = {}", c.bound());
                let c = c.with_max_level(self.cfg.max_level)?;
                c.write_levels(&self.cfg.path("levels.txt"))?;
                return Ok(c);
            }
        }
        info!("sieving census to B = {}", self.cfg.bound);
        let c = build_census(self.cfg.bound, self.cfg.max_level, self.exec)?;
        c.write_census(&path)?;
        c.write_levels(&self.cfg.path("levels.txt"))?;
        Ok(c)
    }

    pub fn oracle<'a>(&'a self, census: &'a QuadraticCensus) -> anyhow::Result<ClassNumberOracle<'a>> {
        let cache = OracleCache::load(&self.cfg.path("oracle-cache.tsv"))?;
        let mut oracle = ClassNumberOracle::new(census, &self.qcache).with_cache(cache).with_cross_check(self.cfg.cross_check);
        if let Some(cmd) = &self.cfg.oracle_cmd {
            let width = if self.cfg.jobs == 0 { 1 } else { self.cfg.jobs };
            oracle = oracle.with_responder(Box::new(ProcessResponder::new(cmd.clone(), self.cfg.oracle_timeout, width)));
        }
        Ok(oracle)
    }

    pub fn biquad(&self, census: &QuadraticCensus) -> anyhow::Result<BiquadCensus> {
        let m = self.cfg.m;
        let b = census_biquad(census, m, &self.qcache, self.exec)?;
        let dir = self.cfg.segment_dir(2);
        write_field_set(&dir.join("fields.tsv"), &b.fields)?;
        write_field_set(&dir.join("rejected.tsv"), &b.rejected)?;
        let next = 1u64 << (m + 1);
        let mut report = vec![
            ("m".to_string(), m.to_string()),
            ("bound".to_string(), census.bound().to_string()),
            ("stage1".to_string(), b.stage1.to_string()),
            ("stage2".to_string(), b.stage2.to_string()),
            ("fields".to_string(), b.fields.len().to_string()),
            (format!("h{next}"), b.rejected.iter().filter(|e| e.h == next).count().to_string()),
        ];
        report.push(("split".to_string(), render_split(&b.split())));
        fieldio::write_atomic(&dir.join("report.txt"), render_report(&report).as_bytes())?;
        self.save_caches(None)?;
        Ok(b)
    }

    /// Vets, checkpoints, then classifies degree `2^n`. On a missing oracle
    /// the pending candidates stay on disk and the error is returned.
    pub fn segment(
        &self,
        n: u32,
        census: &QuadraticCensus,
        oracle: &ClassNumberOracle,
    ) -> anyhow::Result<(SegmentReport, Vec<FieldEntry>)> {
        let m = self.cfg.m;
        let prev_path = self.cfg.segment_dir(n - 1).join("fields.tsv");
        let prev = read_field_set(&prev_path).with_context(|| format!("reading {}", prev_path.display()))?;
        let dir = self.cfg.segment_dir(n);
        let vet = vet_segment(&prev, census, &self.qcache, n, m, self.exec)?;
        write_pending(&dir.join("pending.tsv"), &vet.vetted)?;
        write_partials(&dir.join("partials.tsv"), &vet.partials)?;
        fieldio::write_atomic(&dir.join("report.txt"), render_report(&vet.report.to_pairs()).as_bytes())?;
        info!("n = {n}: {} vetted candidates", vet.vetted.len());

        let classified = classify(&vet.vetted, oracle, m, self.exec);
        self.save_caches(Some(oracle))?;
        let (classified, fields) = classified?;
        check_degree_bound(&fields, n)?;
        let mut report = vet.report;
        report.fields = Some(fields.len());
        report.split = split_by_h(&fields);
        write_field_set(&dir.join("classified.tsv"), &classified)?;
        write_field_set(&dir.join("fields.tsv"), &fields)?;
        fieldio::write_atomic(&dir.join("report.txt"), render_report(&report.to_pairs()).as_bytes())?;
        Ok((report, fields))
    }

    pub fn write_summary(&self, counts: &BTreeMap<u32, Vec<FieldEntry>>) -> anyhow::Result<String> {
        let line = summary_line(counts);
        let mut text = format!("m={}\n{line}\n", self.cfg.m);
        for (n, fields) in counts {
            let _ = writeln!(text, "n={n} {}", render_split(&split_by_h(fields)));
        }
        fieldio::write_atomic(&self.cfg.path("summary.txt"), text.as_bytes())?;
        Ok(line)
    }

    /// Whatever results exist on disk.
    pub fn run_data(&self) -> anyhow::Result<RunData> {
        let mut data = RunData::default();
        let census = self.cfg.path("census.tsv");
        if census.exists() {
            let c = QuadraticCensus::read_census(&census)?;
            let level = c.max_level().max(self.cfg.max_level);
            data.census = Some(c.with_max_level(level)?);
        }
        for n in 2..=16 {
            let dir = self.cfg.segment_dir(n);
            if dir.join("fields.tsv").exists() {
                data.fields.insert(n, read_field_set(&dir.join("fields.tsv"))?);
            }
            if dir.join("report.txt").exists() {
                data.reports.insert(n, fieldio::parse_report(&dir.join("report.txt"))?);
            }
        }
        Ok(data)
    }
}

pub fn render_split(split: &[(u64, usize)]) -> String {
    split.iter().map(|(h, c)| format!("{h}:{c}")).collect::<Vec<_>>().join(",")
}

pub fn summary_line(counts: &BTreeMap<u32, Vec<FieldEntry>>) -> String {
    counts.iter().map(|(n, f)| format!("n={n}:{}", f.len())).collect::<Vec<_>>().join(" ")
}
