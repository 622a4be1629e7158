// SPDX-License-Identifier: Apache-2.0

//! Run configuration: `key = value` file, then command-line overrides.

use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context};
use mqclass::fieldio::parse_report;
use mqclass::quadratic::default_bound;

#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub m: Option<u32>,
    pub bound: Option<u64>,
    pub max_level: Option<u32>,
    pub data_dir: Option<PathBuf>,
    pub oracle_cmd: Option<String>,
    pub oracle_timeout_secs: Option<u64>,
    pub jobs: Option<usize>,
    pub cross_check: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub m: u32,
    pub bound: u64,
    pub max_level: u32,
    pub data_dir: PathBuf,
    pub oracle_cmd: Option<String>,
    pub oracle_timeout: Duration,
    pub jobs: usize,
    pub cross_check: bool,
}

impl RunConfig {
    pub fn resolve(file: Option<&Path>, cli: &Overrides) -> anyhow::Result<Self> {
        let mut merged = match file {
            Some(path) => read_file(path)?,
            None => Overrides::default(),
        };
        macro_rules! take {
            ($($f:ident),*) => { $( if cli.$f.is_some() { merged.$f = cli.$f.clone(); } )* };
        }
        take!(m, bound, max_level, data_dir, oracle_cmd, oracle_timeout_secs, jobs, cross_check);

        let m = merged.m.unwrap_or(5);
        let max_level = merged.max_level.unwrap_or(m + 1);
        let bound = merged.bound.unwrap_or_else(|| default_bound(max_level));
        if bound < 4 {
            bail!("census bound must be at least 4, got {bound}");
        }
        let data_dir = merged.data_dir.unwrap_or_else(|| PathBuf::from("mqclass-data"));
        let data_dir = std::path::absolute(&data_dir).with_context(|| format!("resolving {}", data_dir.display()))?;
        Ok(RunConfig {
            m,
            bound,
            max_level,
            data_dir,
            oracle_cmd: merged.oracle_cmd.filter(|c| !c.trim().is_empty()),
            oracle_timeout: Duration::from_secs(merged.oracle_timeout_secs.unwrap_or(600)),
            jobs: merged.jobs.unwrap_or(0),
            cross_check: merged.cross_check.unwrap_or(false),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.data_dir.join(name)
    }

    pub fn segment_dir(&self, n: u32) -> PathBuf {
        self.data_dir.join(format!("n{n}"))
    }
}

fn read_file(path: &Path) -> anyhow::Result<Overrides> {
    let mut o = Overrides::default();
    for (k, v) in parse_report(path)? {
        let bad = || format!("{}: bad value `{v}` for `{k}`", path.display());
        match k.as_str() {
            "m" => o.m = Some(v.parse().with_context(bad)?),
            "bound" | "B" => o.bound = Some(v.parse().with_context(bad)?),
            "max_level" => o.max_level = Some(v.parse().with_context(bad)?),
            "data_dir" => o.data_dir = Some(PathBuf::from(&v)),
            "oracle_cmd" => o.oracle_cmd = Some(v.clone()),
            "oracle_timeout_secs" => o.oracle_timeout_secs = Some(v.parse().with_context(bad)?),
            "jobs" => o.jobs = Some(v.parse().with_context(bad)?),
            "cross_check" => o.cross_check = Some(v.parse().with_context(bad)?),
            _ => bail!("{}: unknown key `{k}`", path.display()),
        }
    }
    Ok(o)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("run.conf");
        std::fs::write(&file, "# run\nm = 1\nbound = 9000\noracle_cmd = cat\n").unwrap();
        let cli = Overrides { m: Some(0), ..Default::default() };
        let cfg = RunConfig::resolve(Some(&file), &cli).unwrap();
        assert_eq!((cfg.m, cfg.bound, cfg.max_level), (0, 9000, 1));
        assert_eq!(cfg.oracle_cmd.as_deref(), Some("cat"));
        std::fs::write(&file, "colour = blue\n").unwrap();
        assert!(RunConfig::resolve(Some(&file), &Overrides::default()).is_err());
    }

    #[test]
    fn defaults() {
        let cfg = RunConfig::resolve(None, &Overrides::default()).unwrap();
        assert_eq!((cfg.m, cfg.max_level, cfg.bound), (5, 6, mqclass::quadratic::FULL_BOUND));
        let cfg = RunConfig::resolve(None, &Overrides { m: Some(0), ..Default::default() }).unwrap();
        assert_eq!(cfg.bound, 2_000);
    }
}
