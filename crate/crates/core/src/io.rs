//! File formats.
//!
//! Net files: a header line `b s n m`, then the `m` generator matrices in
//! order, each as `s` lines of `n` whitespace-separated digits with the
//! most significant column first.  `#` starts a comment anywhere on a line;
//! blank lines are ignored and carry no structure.
//!
//! The ingestion format for externally published nets is transposed: after
//! the same `b s n m` header come `s` blocks, one per coordinate, each with
//! `n` lines of `m` digits — line `j`, column `k` of block `i` is digit
//! `(i, j)` of generator `k`.
//!
//! Weight files: a header `s n`, then `s` lines of `n` real weights.

use crate::error::{Error, Result};
use crate::net::{DigitMatrix, DigitalNet, NetParams};
use crate::weight::WeightSpec;
use std::path::Path;

/// Whitespace token cursor that remembers line numbers for error reports.
struct Tokens<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    current: Option<(usize, std::str::SplitWhitespace<'a>)>,
    last_line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        Tokens { lines: text.lines().enumerate(), current: None, last_line: 0 }
    }

    fn next_token(&mut self) -> Option<(usize, &'a str)> {
        loop {
            if let Some((lineno, it)) = &mut self.current {
                if let Some(tok) = it.next() {
                    self.last_line = *lineno;
                    return Some((*lineno, tok));
                }
                self.current = None;
            }
            let (idx, raw) = self.lines.next()?;
            let content = raw.split('#').next().unwrap_or("");
            self.current = Some((idx + 1, content.split_whitespace()));
        }
    }

    fn require<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        match self.next_token() {
            None => Err(Error::parse(self.last_line.max(1), format!("missing {what}"))),
            Some((line, tok)) => tok
                .parse()
                .map_err(|_| Error::parse(line, format!("bad {what}: {tok:?}"))),
        }
    }

    fn digit(&mut self, b: u32, what: &str) -> Result<u8> {
        let (line, tok) = self
            .next_token()
            .ok_or_else(|| Error::parse(self.last_line.max(1), format!("missing {what}")))?;
        let v: u32 = tok
            .parse()
            .map_err(|_| Error::parse(line, format!("bad digit {tok:?} in {what}")))?;
        if v >= b {
            return Err(Error::parse(line, format!("digit {v} out of range for base {b}")));
        }
        Ok(v as u8)
    }

    fn expect_end(&mut self) -> Result<()> {
        match self.next_token() {
            None => Ok(()),
            Some((line, tok)) => {
                Err(Error::parse(line, format!("unexpected trailing content {tok:?}")))
            }
        }
    }
}

fn read_header(t: &mut Tokens) -> Result<NetParams> {
    let b: u32 = t.require("base b")?;
    let s: usize = t.require("dimension s")?;
    let n: usize = t.require("precision n")?;
    let m: usize = t.require("size exponent m")?;
    NetParams::new(b, s, n, m)
}

/// Parse a net from text in the native format.
pub fn read_net_str(text: &str) -> Result<DigitalNet> {
    let mut t = Tokens::new(text);
    let p = read_header(&mut t)?;
    let mut basis = Vec::with_capacity(p.m);
    for k in 0..p.m {
        let mut mat = DigitMatrix::zero(p.s, p.n);
        for i in 0..p.s {
            for j in 0..p.n {
                mat.set(i, j, t.digit(p.b, format!("generator {k}, row {i}").as_str())?);
            }
        }
        basis.push(mat);
    }
    t.expect_end()?;
    DigitalNet::new(p, basis)
}

pub fn read_net(path: &Path) -> Result<DigitalNet> {
    read_net_str(&std::fs::read_to_string(path)?)
}

/// Render a net in the native format (parseable by [`read_net_str`]).
pub fn write_net_str(net: &DigitalNet) -> String {
    let p = net.params();
    let mut out = String::from("# digital net: most significant column first\n");
    out.push_str(&format!("{} {} {} {}\n", p.b, p.s, p.n, p.m));
    for (k, mat) in net.basis().iter().enumerate() {
        out.push_str(&format!("# generator {k}\n"));
        for i in 0..p.s {
            let row: Vec<String> = mat.row(i).iter().map(|d| d.to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
    }
    out
}

pub fn write_net(path: &Path, net: &DigitalNet) -> Result<()> {
    std::fs::write(path, write_net_str(net))?;
    Ok(())
}

/// Parse a net from text in the transposed ingestion format.
pub fn ingest_net_str(text: &str) -> Result<DigitalNet> {
    let mut t = Tokens::new(text);
    let p = read_header(&mut t)?;
    let mut basis = vec![DigitMatrix::zero(p.s, p.n); p.m];
    for i in 0..p.s {
        for j in 0..p.n {
            for (k, mat) in basis.iter_mut().enumerate() {
                let d =
                    t.digit(p.b, format!("coordinate {i}, line {j}, column {k}").as_str())?;
                mat.set(i, j, d);
            }
        }
    }
    t.expect_end()?;
    DigitalNet::new(p, basis)
}

pub fn ingest_net(path: &Path) -> Result<DigitalNet> {
    ingest_net_str(&std::fs::read_to_string(path)?)
}

/// Parse a weight matrix: header `s n`, then `s` rows of `n` finite reals.
pub fn read_weights_str(text: &str) -> Result<WeightSpec> {
    let mut t = Tokens::new(text);
    let s: usize = t.require("dimension s")?;
    let n: usize = t.require("precision n")?;
    if s == 0 || n == 0 {
        return Err(Error::InvalidParams(format!("weight shape {s}×{n} is empty")));
    }
    let mut rows = Vec::with_capacity(s);
    for i in 0..s {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            row.push(t.require::<f64>(format!("weight ({i}, {j})").as_str())?);
        }
        rows.push(row);
    }
    t.expect_end()?;
    WeightSpec::from_rows(&rows)
}

pub fn read_weights(path: &Path) -> Result<WeightSpec> {
    read_weights_str(&std::fs::read_to_string(path)?)
}
