// SPDX-License-Identifier: Apache-2.0

//! Class-number responder backed by the embedded tables of degree 8 and 16
//! fields. Unlisted fields get `ERR`.

use std::io::{self, BufRead, Write};

use mqclass::oracle::{parse_request, FixtureResponder, Responder};

fn main() -> io::Result<()> {
    let table = FixtureResponder::published();
    let mut out = io::stdout().lock();
    for line in io::stdin().lock().lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        match parse_request(&line).and_then(|rs| table.query(&rs)) {
            Ok(h) => writeln!(out, "{h}")?,
            Err(e) => writeln!(out, "ERR {}", e.to_string().replace('\n', " "))?,
        }
        out.flush()?;
    }
    Ok(())
}
