// SPDX-License-Identifier: Apache-2.0

//! Text formats for field sets and key=value reports, and atomic writes.
//!
//! Field-set line: `h=<int>\tP=<int>\tneg=<r1,...>\tpos=<s1,...>`, lines
//! sorted by canonical key.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::radicand::{parse_list, write_list, FieldRec};
use crate::{Error, Result};

/// A field together with its class number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldEntry {
    pub field: FieldRec,
    pub h: u64,
}

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn format_field_line(e: &FieldEntry) -> String {
    let mut s = String::new();
    let _ = write!(s, "h={}\tP={}\tneg=", e.h, e.field.p_product());
    let _ = write_list(&mut s, &e.field.neg);
    s.push_str("\tpos=");
    let _ = write_list(&mut s, &e.field.pos);
    s
}

pub fn render_field_set(entries: &[FieldEntry]) -> String {
    let mut sorted: Vec<&FieldEntry> = entries.iter().collect();
    sorted.sort_by_key(|e| e.field.key());
    let mut out = String::new();
    for e in sorted {
        out.push_str(&format_field_line(e));
        out.push('\n');
    }
    out
}

pub fn write_field_set(path: &Path, entries: &[FieldEntry]) -> Result<()> {
    write_atomic(path, render_field_set(entries).as_bytes())
}

/// Splits `k=v` tab-separated fields, checking the keys appear in order.
pub(crate) fn tagged_fields<'a>(line: &'a str, keys: &[&str]) -> Option<Vec<&'a str>> {
    let parts: Vec<&str> = line.split('\t').collect();
    if parts.len() != keys.len() {
        return None;
    }
    parts
        .iter()
        .zip(keys)
        .map(|(p, k)| p.strip_prefix(k).and_then(|rest| rest.strip_prefix('=')))
        .collect()
}

pub fn parse_field_line(line: &str) -> Option<FieldEntry> {
    let f = tagged_fields(line, &["h", "P", "neg", "pos"])?;
    let h: u64 = f[0].parse().ok()?;
    let p: u64 = f[1].parse().ok()?;
    if !p.is_power_of_two() {
        return None;
    }
    let neg = parse_list(f[2]).ok()?;
    let pos = parse_list(f[3]).ok()?;
    let field = FieldRec::new(neg, pos, p.trailing_zeros());
    field.is_consistent().then_some(FieldEntry { field, h })
}

pub fn read_field_set(path: &Path) -> Result<Vec<FieldEntry>> {
    let text = fs::read_to_string(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            parse_field_line(l).ok_or_else(|| Error::Format {
                what: "field set",
                path: path.to_path_buf(),
                line: i + 1,
                message: l.to_string(),
            })
        })
        .collect()
}

/// `key=value` lines in the given order.
pub fn render_report(items: &[(String, String)]) -> String {
    items.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
}

pub fn parse_report(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(i, l)| {
            l.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Error::Format {
                    what: "report",
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: l.to_string(),
                })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radicand::Radicand;

    #[test]
    fn field_set_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let prim = |v: &[i128]| v.iter().map(|&x| Radicand::new(x).unwrap()).collect::<Vec<_>>();
        let entries = vec![
            FieldEntry { field: FieldRec::from_primitive(&prim(&[-1, 2, 3]), 1).unwrap(), h: 1 },
            FieldEntry { field: FieldRec::from_primitive(&prim(&[-1, -2]), 0).unwrap(), h: 1 },
        ];
        let p = dir.path().join("fields.tsv");
        write_field_set(&p, &entries).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().next().unwrap(), "h=1\tP=2\tneg=-6,-3,-2,-1\tpos=2,3,6");
        let back = read_field_set(&p).unwrap();
        assert_eq!(render_field_set(&back), text);
        assert!(parse_field_line("h=1\tP=3\tneg=-1,-2\tpos=2").is_none());
        assert!(parse_field_line("h=1\tP=1\tneg=-1,-3\tpos=2").is_none());
    }
}
