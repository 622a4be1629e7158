// SPDX-License-Identifier: Apache-2.0

//! Exact class numbers of imaginary multiquadratic fields.
//!
//! Quadratic and biquadratic fields are answered in-process. Higher degrees
//! go to a persistent cache and then to an external responder speaking a
//! line protocol over stdin/stdout: the request is the primitive radicands
//! separated by spaces, the reply a decimal class number or `ERR <message>`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::process::{Child, ChildStdin, Command, Stdio};
use std::str::FromStr;
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::{Condvar, Mutex, RwLock};
use std::time::Duration;

use crate::biquadratic::class_number_of_pair;
use crate::quadratic::{ClassNumberCache, QuadraticCensus};
use crate::radicand::{canonical_key, complete_radicand_list, split_signs, FieldKey, FieldRec, Radicand};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    BuiltinQuadratic,
    BuiltinBiquadratic,
    External(String),
    Fixture,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::BuiltinQuadratic => f.write_str("builtin-quadratic"),
            Provenance::BuiltinBiquadratic => f.write_str("builtin-biquadratic"),
            Provenance::External(id) => write!(f, "external:{id}"),
            Provenance::Fixture => f.write_str("fixture"),
        }
    }
}

impl FromStr for Provenance {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        match s {
            "builtin-quadratic" => Ok(Provenance::BuiltinQuadratic),
            "builtin-biquadratic" => Ok(Provenance::BuiltinBiquadratic),
            "fixture" => Ok(Provenance::Fixture),
            _ => s.strip_prefix("external:").map(|id| Provenance::External(id.to_string())).ok_or(()),
        }
    }
}

/// Write-once class numbers keyed by canonical key.
///
/// File form: `<key>\t<h>\t<provenance>`, sorted by key.
#[derive(Debug, Default)]
pub struct OracleCache {
    entries: RwLock<BTreeMap<FieldKey, (u64, Provenance)>>,
}

impl OracleCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, key: &FieldKey) -> Option<(u64, Provenance)> {
        self.entries.read().unwrap().get(key).cloned()
    }

    /// Stores `h`; an existing entry with another value is an error and the
    /// first provenance is kept.
    pub fn insert(&self, key: FieldKey, h: u64, provenance: Provenance) -> Result<()> {
        let mut map = self.entries.write().unwrap();
        if let Some((old, _)) = map.get(&key) {
            if *old != h {
                return Err(Error::OracleConflict { key: key.to_string(), old: *old, new: h });
            }
            return Ok(());
        }
        map.insert(key, (h, provenance));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn render(&self) -> String {
        let map = self.entries.read().unwrap();
        map.iter().map(|(k, (h, p))| format!("{k}\t{h}\t{p}\n")).collect()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::fieldio::write_atomic(path, self.render().as_bytes())
    }

    /// Merges the file at `path` into the cache; a missing file is empty.
    pub fn load_into(&self, path: &Path) -> Result<()> {
        if !path.exists() {
            return Ok(());
        }
        let text = std::fs::read_to_string(path)?;
        for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.is_empty()) {
            let mut parts = line.split('\t');
            let parsed = (|| {
                let key: FieldKey = parts.next()?.parse().ok()?;
                let h: u64 = parts.next()?.parse().ok().filter(|&h| h > 0)?;
                let prov: Provenance = parts.next()?.parse().ok()?;
                parts.next().is_none().then_some((key, h, prov))
            })();
            let (key, h, prov) = parsed.ok_or_else(|| Error::Format {
                what: "oracle cache",
                path: path.to_path_buf(),
                line: i + 1,
                message: line.to_string(),
            })?;
            self.insert(key, h, prov)?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let cache = Self::new();
        cache.load_into(path)?;
        Ok(cache)
    }
}

/// Source of class numbers for fields of degree 8 and up.
pub trait Responder: Send + Sync {
    fn id(&self) -> String;
    fn provenance(&self) -> Provenance {
        Provenance::External(self.id())
    }
    fn query(&self, primitive: &[Radicand]) -> Result<u64>;
}

pub fn format_request(primitive: &[Radicand]) -> String {
    primitive.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn parse_request(line: &str) -> Result<Vec<Radicand>> {
    line.split_whitespace().map(|t| t.parse()).collect()
}

/// Validates one reply line.
pub fn parse_reply(request: &str, raw: &str) -> Result<u64> {
    let line = raw.trim_end_matches(['\n', '\r']);
    let fail = |message: String| Error::ResponderError {
        request: request.to_string(),
        message,
        raw: raw.to_string(),
    };
    if let Some(msg) = line.strip_prefix("ERR") {
        return Err(fail(format!("responder error:{msg}")));
    }
    match line.trim().parse::<u64>() {
        Ok(h) if h > 0 => Ok(h),
        _ => Err(fail("reply is not a positive integer".into())),
    }
}

struct Worker {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<std::io::Result<String>>,
}

impl Worker {
    fn spawn(cmd: &str) -> Result<Self> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(cmd)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            let mut reader = BufReader::new(stdout);
            loop {
                let mut line = String::new();
                match reader.read_line(&mut line) {
                    Ok(0) => break,
                    Ok(_) => {
                        if tx.send(Ok(line)).is_err() {
                            break;
                        }
                    }
                    Err(e) => {
                        let _ = tx.send(Err(e));
                        break;
                    }
                }
            }
        });
        Ok(Worker { child, stdin, lines: rx })
    }

    fn kill(mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

enum Attempt {
    Reply(Worker, String),
    TimedOut,
    Failed(Error),
}

/// Pool of responder processes, each with at most one request in flight.
pub struct ProcessResponder {
    cmd: String,
    timeout: Duration,
    width: usize,
    idle: Mutex<(Vec<Worker>, usize)>,
    freed: Condvar,
}

impl ProcessResponder {
    pub fn new(cmd: impl Into<String>, timeout: Duration, width: usize) -> Self {
        ProcessResponder {
            cmd: cmd.into(),
            timeout,
            width: width.max(1),
            idle: Mutex::new((Vec::new(), 0)),
            freed: Condvar::new(),
        }
    }

    /// An idle worker, a fresh one if below width, else waits.
    fn checkout(&self) -> Result<Worker> {
        let mut guard = self.idle.lock().unwrap();
        loop {
            if let Some(w) = guard.0.pop() {
                return Ok(w);
            }
            if guard.1 < self.width {
                guard.1 += 1;
                drop(guard);
                return Worker::spawn(&self.cmd).inspect_err(|_| self.release(None));
            }
            guard = self.freed.wait(guard).unwrap();
        }
    }

    fn release(&self, worker: Option<Worker>) {
        let mut guard = self.idle.lock().unwrap();
        match worker {
            Some(w) => guard.0.push(w),
            None => guard.1 -= 1,
        }
        self.freed.notify_one();
    }

    fn attempt(&self, request: &str) -> Attempt {
        let mut worker = match self.checkout() {
            Ok(w) => w,
            Err(e) => return Attempt::Failed(e),
        };
        if let Err(e) = writeln!(worker.stdin, "{request}").and_then(|_| worker.stdin.flush()) {
            worker.kill();
            self.release(None);
            return Attempt::Failed(e.into());
        }
        match worker.lines.recv_timeout(self.timeout) {
            Ok(Ok(line)) => Attempt::Reply(worker, line),
            Ok(Err(e)) => {
                worker.kill();
                self.release(None);
                Attempt::Failed(e.into())
            }
            Err(RecvTimeoutError::Timeout) => {
                worker.kill();
                self.release(None);
                Attempt::TimedOut
            }
            Err(RecvTimeoutError::Disconnected) => {
                worker.kill();
                self.release(None);
                Attempt::Failed(Error::ResponderError {
                    request: request.to_string(),
                    message: "responder exited".into(),
                    raw: String::new(),
                })
            }
        }
    }
}

impl Responder for ProcessResponder {
    fn id(&self) -> String {
        self.cmd.clone()
    }

    /// A timed-out request is retried once on a fresh process.
    fn query(&self, primitive: &[Radicand]) -> Result<u64> {
        let request = format_request(primitive);
        for _ in 0..2 {
            match self.attempt(&request) {
                Attempt::Reply(worker, line) => {
                    self.release(Some(worker));
                    return parse_reply(&request, &line);
                }
                Attempt::TimedOut => log::warn!("responder timed out on `{request}`"),
                Attempt::Failed(e) => return Err(e),
            }
        }
        Err(Error::Timeout(request))
    }
}

impl Drop for ProcessResponder {
    fn drop(&mut self) {
        let guard = self.idle.get_mut().unwrap();
        for w in guard.0.drain(..) {
            w.kill();
        }
    }
}

/// Answers from a fixed table of known class numbers.
#[derive(Clone, Debug, Default)]
pub struct FixtureResponder {
    table: BTreeMap<FieldKey, u64>,
}

impl FixtureResponder {
    pub fn new(table: BTreeMap<FieldKey, u64>) -> Self {
        FixtureResponder { table }
    }

    /// Every field of degree 8 or 16 in the embedded tables.
    pub fn published() -> Self {
        Self::new(crate::fixtures::higher_degree_class_numbers())
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

impl Responder for FixtureResponder {
    fn id(&self) -> String {
        "fixture".into()
    }

    fn provenance(&self) -> Provenance {
        Provenance::Fixture
    }

    fn query(&self, primitive: &[Radicand]) -> Result<u64> {
        let request = format_request(primitive);
        let key = key_of(primitive)?;
        self.table.get(&key).copied().ok_or_else(|| Error::ResponderError {
            request,
            message: "field not in the fixture tables".into(),
            raw: String::new(),
        })
    }
}

/// Canonical key of the field generated by `primitive`.
pub fn key_of(primitive: &[Radicand]) -> Result<FieldKey> {
    let list = complete_radicand_list(primitive)?;
    let (neg, _) = split_signs(&list);
    Ok(canonical_key(&neg))
}

/// Dispatches class-number requests by degree.
pub struct ClassNumberOracle<'a> {
    census: &'a QuadraticCensus,
    quadratic: &'a ClassNumberCache,
    cache: OracleCache,
    responder: Option<Box<dyn Responder + 'a>>,
    cross_check: bool,
}

impl<'a> ClassNumberOracle<'a> {
    pub fn new(census: &'a QuadraticCensus, quadratic: &'a ClassNumberCache) -> Self {
        ClassNumberOracle { census, quadratic, cache: OracleCache::new(), responder: None, cross_check: false }
    }

    pub fn with_cache(mut self, cache: OracleCache) -> Self {
        self.cache = cache;
        self
    }

    pub fn with_responder(mut self, responder: Box<dyn Responder + 'a>) -> Self {
        self.responder = Some(responder);
        self
    }

    /// Also sends degree 2 and 4 requests to the responder and fails on any
    /// disagreement with the built-in answer.
    pub fn with_cross_check(mut self, on: bool) -> Self {
        self.cross_check = on;
        self
    }

    pub fn has_responder(&self) -> bool {
        self.responder.is_some()
    }

    pub fn cache(&self) -> &OracleCache {
        &self.cache
    }

    pub fn class_number(&self, primitive: &[Radicand]) -> Result<u64> {
        let list = complete_radicand_list(primitive)?;
        let (neg, _) = split_signs(&list);
        let key = canonical_key(&neg);
        match primitive.len() {
            1 => {
                let r = &primitive[0];
                let h = if r.is_negative() { self.quadratic.imag(self.census, r)? } else { self.quadratic.real(r)? };
                self.check_builtin(primitive, &key, h)
            }
            2 => {
                let h = class_number_of_pair(&primitive[0], &primitive[1], self.census, self.quadratic)?;
                self.check_builtin(primitive, &key, h)
            }
            _ => {
                if neg.is_empty() {
                    return Err(Error::InvalidRadicand(key.to_string(), "the field is totally real"));
                }
                if let Some((h, _)) = self.cache.get(&key) {
                    return Ok(h);
                }
                let responder = self.responder.as_ref().ok_or_else(|| Error::OracleUnavailable(key.to_string()))?;
                let h = responder.query(primitive)?;
                self.cache.insert(key, h, responder.provenance())?;
                Ok(h)
            }
        }
    }

    pub fn class_number_of(&self, field: &FieldRec) -> Result<u64> {
        self.class_number(&field.primitive())
    }

    fn check_builtin(&self, primitive: &[Radicand], key: &FieldKey, h: u64) -> Result<u64> {
        if self.cross_check {
            if let Some(resp) = &self.responder {
                let other = resp.query(primitive)?;
                if other != h {
                    return Err(Error::OracleConflict { key: key.to_string(), old: h, new: other });
                }
            }
        }
        Ok(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(v: &[i128]) -> Vec<Radicand> {
        v.iter().map(|&x| Radicand::new(x).unwrap()).collect()
    }

    #[test]
    fn replies() {
        assert_eq!(parse_reply("-1 2 3", "1\n").unwrap(), 1);
        assert!(matches!(parse_reply("-1 2 3", "abc\n"), Err(Error::ResponderError { .. })));
        assert!(matches!(parse_reply("x", "0\n"), Err(Error::ResponderError { .. })));
        match parse_reply("x", "ERR nope\n") {
            Err(Error::ResponderError { raw, .. }) => assert_eq!(raw, "ERR nope\n"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cache_is_write_once() {
        let c = OracleCache::new();
        let k = key_of(&rs(&[-1, 2, 3])).unwrap();
        c.insert(k.clone(), 1, Provenance::Fixture).unwrap();
        c.insert(k.clone(), 1, Provenance::External("x".into())).unwrap();
        assert_eq!(c.get(&k), Some((1, Provenance::Fixture)));
        assert!(matches!(c.insert(k, 2, Provenance::Fixture), Err(Error::OracleConflict { .. })));
    }

    #[test]
    fn provenance_round_trip() {
        for p in [
            Provenance::BuiltinQuadratic,
            Provenance::BuiltinBiquadratic,
            Provenance::External("sage -c x".into()),
            Provenance::Fixture,
        ] {
            assert_eq!(p.to_string().parse::<Provenance>(), Ok(p));
        }
    }

    #[test]
    fn keys_ignore_presentation() {
        assert_eq!(key_of(&rs(&[-1, 2, 3])).unwrap(), key_of(&rs(&[-2, -3, -1])).unwrap());
    }
}
