//! Flat-file formats: coefficient files, roots files and CSV sidecars.
//!
//! Scalars use the tagged decimal form of [`format_tagged`], so every file
//! round-trips bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rug::Float;

use crate::error::{Error, Result};
use crate::poly::{PolyKind, Polynomial};
use crate::scalar::{format_tagged, parse_tagged, MpComplex, MpReal, Precision};

/// Splits a header line into its magic word and `key=value` fields.
struct Header<'a> {
    fields: Vec<(&'a str, &'a str)>,
}

impl<'a> Header<'a> {
    fn parse(line: &'a str, magic: &str, lineno: usize) -> Result<Self> {
        let mut words = line.split_whitespace();
        if words.next() != Some(magic) || words.next() != Some("v1") {
            return Err(Error::parse(lineno, format!("expected `{magic} v1` header")));
        }
        let fields = words
            .map(|w| {
                w.split_once('=')
                    .ok_or_else(|| Error::parse(lineno, format!("malformed header field `{w}`")))
            })
            .collect::<Result<_>>()?;
        Ok(Header { fields })
    }

    fn get<T: FromStr>(&self, key: &str, lineno: usize) -> Result<T> {
        let raw = self
            .fields
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::parse(lineno, format!("header is missing `{key}`")))?;
        raw.parse()
            .map_err(|_| Error::parse(lineno, format!("bad value `{raw}` for `{key}`")))
    }
}

fn scalar(tok: &str, bits: u32, lineno: usize) -> Result<MpReal> {
    let x = parse_tagged(tok).map_err(|e| Error::parse(lineno, e.to_string()))?;
    if x.prec() != bits {
        return Err(Error::parse(
            lineno,
            format!("value has {} bits, header says {bits}", x.prec()),
        ));
    }
    Ok(x)
}

/// Non-blank lines with their 1-based line numbers.
fn content_lines(r: impl BufRead) -> Result<Vec<(usize, String)>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push((i + 1, line));
        }
    }
    Ok(out)
}

/// Writes `poly v1 degree=<n> bits=<L> kind=<kind>` then `a_0 .. a_n`.
pub fn write_polynomial(mut w: impl Write, p: &Polynomial) -> Result<()> {
    writeln!(
        w,
        "poly v1 degree={} bits={} kind={}",
        p.degree(),
        p.precision().bits(),
        p.kind()
    )?;
    for c in p.coeffs() {
        writeln!(w, "{}", format_tagged(c))?;
    }
    Ok(())
}

pub fn read_polynomial(r: impl BufRead) -> Result<Polynomial> {
    let lines = content_lines(r)?;
    let (hline, header) = lines.first().ok_or_else(|| Error::parse(1, "empty file"))?;
    let h = Header::parse(header, "poly", *hline)?;
    let degree: usize = h.get("degree", *hline)?;
    let bits: u32 = h.get("bits", *hline)?;
    let kind: PolyKind = h.get("kind", *hline)?;
    Precision::new(bits).map_err(|e| Error::parse(*hline, e.to_string()))?;
    let body = &lines[1..];
    if body.len() != degree + 1 {
        let at = body.get(degree + 1).map_or(lines.last().unwrap().0, |l| l.0);
        return Err(Error::parse(
            at,
            format!(
                "degree {degree} needs {} coefficients, found {}",
                degree + 1,
                body.len()
            ),
        ));
    }
    let coeffs = body
        .iter()
        .map(|(no, l)| scalar(l.trim(), bits, *no))
        .collect::<Result<Vec<_>>>()?;
    Polynomial::with_kind(coeffs, kind).map_err(|e| Error::parse(*hline, e.to_string()))
}

pub fn save_polynomial(path: &Path, p: &Polynomial) -> Result<()> {
    let mut buf = Vec::new();
    write_polynomial(&mut buf, p)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn load_polynomial(path: &Path) -> Result<Polynomial> {
    let f = fs::File::open(path)?;
    read_polynomial(BufReader::new(f)).map_err(|e| e.with_path(path))
}

/// Contents of a roots file.
#[derive(Clone, Debug, PartialEq)]
pub struct RootsFile {
    pub bits: u32,
    /// Method tag as written in the header (`dka2`, `dk2+low`, `eigen`, ...).
    pub method: String,
    pub iterations: usize,
    pub converged: bool,
    pub roots: Vec<MpComplex>,
    /// Last update size per root; zero for direct methods.
    pub steps: Vec<MpReal>,
}

impl RootsFile {
    pub fn degree(&self) -> usize {
        self.roots.len()
    }
}

/// Header `roots v1 degree=.. bits=.. method=.. iterations=.. converged=..`,
/// then `<index> <re> <im> <step>` per root, index from 1.
pub fn write_roots(mut w: impl Write, f: &RootsFile) -> Result<()> {
    writeln!(
        w,
        "roots v1 degree={} bits={} method={} iterations={} converged={}",
        f.degree(),
        f.bits,
        f.method,
        f.iterations,
        f.converged
    )?;
    for (i, (z, s)) in f.roots.iter().zip(&f.steps).enumerate() {
        writeln!(
            w,
            "{} {} {} {}",
            i + 1,
            format_tagged(&z.re),
            format_tagged(&z.im),
            format_tagged(s)
        )?;
    }
    Ok(())
}

pub fn read_roots(r: impl BufRead) -> Result<RootsFile> {
    let lines = content_lines(r)?;
    let (hline, header) = lines.first().ok_or_else(|| Error::parse(1, "empty file"))?;
    let h = Header::parse(header, "roots", *hline)?;
    let degree: usize = h.get("degree", *hline)?;
    let bits: u32 = h.get("bits", *hline)?;
    let method: String = h.get("method", *hline)?;
    let iterations: usize = h.get("iterations", *hline)?;
    let converged: bool = h.get("converged", *hline)?;
    Precision::new(bits).map_err(|e| Error::parse(*hline, e.to_string()))?;
    let body = &lines[1..];
    if body.len() != degree {
        let at = body.get(degree).map_or(lines.last().unwrap().0, |l| l.0);
        return Err(Error::parse(
            at,
            format!("degree {degree} needs {degree} root lines, found {}", body.len()),
        ));
    }
    let mut roots = Vec::with_capacity(degree);
    let mut steps = Vec::with_capacity(degree);
    for (k, (no, line)) in body.iter().enumerate() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 4 {
            return Err(Error::parse(*no, "expected `index re im step`"));
        }
        if toks[0].parse::<usize>().ok() != Some(k + 1) {
            return Err(Error::parse(*no, format!("expected index {}", k + 1)));
        }
        roots.push(MpComplex::new(scalar(toks[1], bits, *no)?, scalar(toks[2], bits, *no)?));
        steps.push(parse_tagged(toks[3]).map_err(|e| Error::parse(*no, e.to_string()))?);
    }
    Ok(RootsFile {
        bits,
        method,
        iterations,
        converged,
        roots,
        steps,
    })
}

pub fn save_roots(path: &Path, f: &RootsFile) -> Result<()> {
    let mut buf = Vec::new();
    write_roots(&mut buf, f)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn load_roots(path: &Path) -> Result<RootsFile> {
    let f = fs::File::open(path)?;
    read_roots(BufReader::new(f)).map_err(|e| e.with_path(path))
}

/// Path of the CSV sidecar written next to a roots file.
pub fn sidecar_path(roots_path: &Path) -> PathBuf {
    let mut s = roots_path.as_os_str().to_owned();
    s.push(".csv");
    PathBuf::from(s)
}

/// Scientific notation with `digits` significant digits.
pub fn sci(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".into();
    }
    format!("{:.*e}", digits, x)
}

/// `index,re,im,rel_err` at 40 significant digits; `rel_err` is left empty
/// when no errors are supplied.
pub fn write_sidecar(mut w: impl Write, roots: &[MpComplex], rel_err: Option<&[MpReal]>) -> Result<()> {
    let mut out = String::from("index,re,im,rel_err\n");
    for (i, z) in roots.iter().enumerate() {
        let e = rel_err.map(|e| sci(&e[i], 40)).unwrap_or_default();
        writeln!(out, "{},{},{},{}", i + 1, sci(&z.re, 40), sci(&z.im, 40), e).unwrap();
    }
    w.write_all(out.as_bytes())?;
    Ok(())
}

/// Writes the roots file at `path` and its sidecar at [`sidecar_path`].
pub fn store_result(path: &Path, f: &RootsFile, rel_err: Option<&[MpReal]>) -> Result<()> {
    save_roots(path, f)?;
    let mut buf = Vec::new();
    write_sidecar(&mut buf, &f.roots, rel_err)?;
    fs::write(sidecar_path(path), buf)?;
    Ok(())
}
