// SPDX-License-Identifier: Apache-2.0

//! Class-number responder: one request per stdin line (primitive radicands
//! separated by spaces), one reply per stdout line (the class number or
//! `ERR <message>`).

use std::io::{self, BufRead, Write};

use mqclass::oracle::parse_request;
use mqclass_kuroda::KurodaOracle;

fn main() -> io::Result<()> {
    let mut oracle = KurodaOracle::new();
    let stdin = io::stdin();
    let mut out = io::stdout().lock();
    for line in stdin.lock().lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let reply = parse_request(&line)
            .map_err(|e| e.to_string())
            .and_then(|rs| oracle.class_number(&rs).map_err(|e| e.to_string()));
        match reply {
            Ok(k) => writeln!(out, "{}", k.h)?,
            Err(msg) => writeln!(out, "ERR {}", msg.replace('\n', " "))?,
        }
        out.flush()?;
    }
    Ok(())
}
