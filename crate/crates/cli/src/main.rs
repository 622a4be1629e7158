// SPDX-License-Identifier: Apache-2.0

//! `mqclass`: census of imaginary multiquadratic fields whose class number
//! divides `2^m`.
//!
//! Exit status: 0 on success, 2 on a verification mismatch, 3 when a class
//! number of degree 8 or more is needed and no oracle is configured, 4 on
//! I/O or file-format errors, 1 otherwise.

mod config;
mod pipeline;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Parser, Subcommand};
use mqclass::degree_bound;
use mqclass::verify::{verify, Table};

use config::{Overrides, RunConfig};
use pipeline::{render_split, Session};

#[derive(Parser, Debug)]
#[command(name = "mqclass", version, about = "Imaginary multiquadratic fields with class number dividing 2^m")]
struct Cli {
    /// `key = value` configuration file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    data_dir: Option<PathBuf>,
    /// Target exponent: class numbers dividing 2^m.
    #[arg(long, global = true)]
    m: Option<u32>,
    /// Census bound on |discriminant|.
    #[arg(long, global = true)]
    bound: Option<u64>,
    /// Highest level set Q_i kept from the census (default m + 1).
    #[arg(long, global = true)]
    max_level: Option<u32>,
    /// Responder command for degree 8+ class numbers, run via `sh -c`.
    #[arg(long, global = true)]
    oracle_cmd: Option<String>,
    #[arg(long, global = true)]
    oracle_timeout_secs: Option<u64>,
    /// Worker threads and responder processes (0 = all cores, one responder).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Also ask the responder for degree 2 and 4 fields and fail on disagreement.
    #[arg(long, global = true)]
    cross_check: bool,
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Sieve imaginary quadratic class numbers and write the level sets.
    Census,
    /// Imaginary biquadratic fields with class number dividing 2^m.
    Biquad,
    /// Degree 2^n from the degree 2^(n-1) results on disk.
    Segment {
        #[arg(long)]
        n: u32,
    },
    /// Census, biquadratic fields, then segments until one is empty.
    Run,
    /// Compare results on disk with an embedded table.
    Verify {
        /// brown-parry, bww, arno4, feaver, quad4-lists, counts-1.5, counts-1.6, counts-1.7, stats-6.3
        #[arg(long, required_unless_present = "all")]
        table: Option<String>,
        #[arg(long)]
        all: bool,
    },
    /// Least exponent m compatible with class number 2^m in degree 2^n.
    Bound {
        #[arg(long)]
        n: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(err) = cause.downcast_ref::<mqclass::Error>() {
            return match err {
                mqclass::Error::OracleUnavailable(_) => 3,
                mqclass::Error::Io(_) | mqclass::Error::Format { .. } => 4,
                _ => 1,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 4;
        }
    }
    1
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    if let Cmd::Bound { n } = cli.cmd {
        anyhow::ensure!(n >= 1, "n must be at least 1");
        println!("{}", degree_bound::min_exponent(n));
        return Ok(0);
    }
    let overrides = Overrides {
        m: cli.m,
        bound: cli.bound,
        max_level: cli.max_level,
        data_dir: cli.data_dir,
        oracle_cmd: cli.oracle_cmd,
        oracle_timeout_secs: cli.oracle_timeout_secs,
        jobs: cli.jobs,
        cross_check: cli.cross_check.then_some(true),
    };
    let cfg = RunConfig::resolve(cli.config.as_deref(), &overrides)?;
    if cfg.jobs > 0 {
        mqclass::par::configure_threads(cfg.jobs);
    }
    let session = Session::open(cfg)?;
    match cli.cmd {
        Cmd::Census => {
            let census = session.census()?;
            for (i, level) in census.levels().iter().enumerate() {
                println!("Q_{i}: {}", level.len());
            }
        }
        Cmd::Biquad => {
            let census = session.census()?;
            let b = session.biquad(&census)?;
            println!("stage 1: {}", b.stage1);
            println!("stage 2: {}", b.stage2);
            println!("fields: {}", b.fields.len());
            println!("split: {}", render_split(&b.split()));
        }
        Cmd::Segment { n } => {
            anyhow::ensure!(n >= 3, "segments start at n = 3");
            let census = session.census()?;
            let oracle = session.oracle(&census)?;
            let (report, fields) = session.segment(n, &census, &oracle)?;
            print_report(&report);
            println!("fields: {}", fields.len());
        }
        Cmd::Run => {
            let census = session.census()?;
            let oracle = session.oracle(&census)?;
            let b = session.biquad(&census)?;
            println!("n=2 {}", render_split(&b.split()));
            let mut all = BTreeMap::new();
            let mut prev = b.fields;
            all.insert(2, prev.clone());
            let mut n = 3;
            while !prev.is_empty() {
                let (report, fields) = match session.segment(n, &census, &oracle) {
                    Ok(r) => r,
                    Err(e) => {
                        if exit_code(&e) == 3 {
                            let pending = session.cfg.segment_dir(n).join("pending.tsv");
                            eprintln!("no oracle for degree 2^{n}; pending candidates in {}", pending.display());
                        }
                        return Err(e);
                    }
                };
                println!("n={n} {}", render_split(&report.split));
                anyhow::ensure!(
                    fields.is_empty() || degree_bound::min_exponent(n) <= session.cfg.m as u64,
                    "degree 2^{n} produced fields below the exponent floor"
                );
                prev = fields;
                all.insert(n, prev.clone());
                n += 1;
            }
            println!("{}", session.write_summary(&all)?);
        }
        Cmd::Verify { table, all } => {
            let data = session.run_data()?;
            let tables: Vec<Table> = if all { Table::ALL.to_vec() } else { vec![table.unwrap_or_default().parse()?] };
            let mut ok = true;
            for t in tables {
                let rep = verify(t, &data);
                for line in &rep.lines {
                    println!("{line}");
                }
                println!("{}", rep.summary());
                ok &= rep.passed();
            }
            return Ok(if ok { 0 } else { 2 });
        }
        Cmd::Bound { .. } => unreachable!(),
    }
    Ok(0)
}

fn print_report(r: &mqclass::multiquad::SegmentReport) {
    for (k, v) in r.to_pairs() {
        println!("{k}: {v}");
    }
}
