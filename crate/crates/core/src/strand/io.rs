//! Line-oriented `HAIRTXT 1` text format.
//!
//! ```text
//! HAIRTXT 1
//! <strand count> <radius>
//! scalp <cx> <cy> <cz> <R>        (optional)
//! <point count>                   (per strand)
//! <x> <y> <z>                     (per point)
//! ```
//!
//! Floats are written in shortest round-trip form, so reading back a written
//! file reproduces every coordinate bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{Scalp, Strand, StrandModel};
use crate::error::{Error, Result};
use crate::math::Vec3;

const MAGIC: &str = "HAIRTXT";
const VERSION: &str = "1";

pub fn write_model(model: &StrandModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC} {VERSION}");
    let _ = writeln!(out, "{} {}", model.strands.len(), model.radius);
    let c = model.scalp.center;
    let _ = writeln!(out, "scalp {} {} {} {}", c.x, c.y, c.z, model.scalp.radius);
    for s in &model.strands {
        let _ = writeln!(out, "{}", s.points.len());
        for p in &s.points {
            let _ = writeln!(out, "{} {} {}", p.x, p.y, p.z);
        }
    }
    out
}

pub fn write_model_file(model: &StrandModel, path: &Path) -> Result<()> {
    fs::write(path, write_model(model))?;
    Ok(())
}

pub fn read_model_file(path: &Path) -> Result<StrandModel> {
    read_model(&fs::read_to_string(path)?)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    /// Next non-blank line with its 1-based number.
    fn next(&mut self) -> Option<(usize, &'a str)> {
        for (i, l) in self.inner.by_ref() {
            self.last = i + 1;
            let t = l.trim();
            if !t.is_empty() {
                return Some((i + 1, t));
            }
        }
        None
    }
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok.parse().map_err(|_| perr(line, format!("expected a number, found '{tok}'")))?;
    if !v.is_finite() {
        return Err(perr(line, format!("non-finite value '{tok}'")));
    }
    Ok(v)
}

fn parse_floats<const N: usize>(toks: &[&str], line: usize) -> Result<[f64; N]> {
    if toks.len() != N {
        return Err(perr(line, format!("expected {N} numbers, found {}", toks.len())));
    }
    let mut out = [0.0; N];
    for (o, t) in out.iter_mut().zip(toks) {
        *o = parse_f64(t, line)?;
    }
    Ok(out)
}

pub fn read_model(text: &str) -> Result<StrandModel> {
    let mut lines = Lines { inner: text.lines().enumerate(), last: 0 };
    let (ln, header) = lines.next().ok_or_else(|| perr(1, "empty file"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.first() != Some(&MAGIC) || toks.len() != 2 {
        return Err(perr(ln, format!("bad header '{header}', expected '{MAGIC} {VERSION}'")));
    }
    if toks[1] != VERSION {
        return Err(Error::UnsupportedVersion { line: ln, version: toks[1].to_string() });
    }

    let (ln, counts) = lines.next().ok_or_else(|| perr(lines.last + 1, "missing strand count line"))?;
    let toks: Vec<&str> = counts.split_whitespace().collect();
    if toks.len() != 2 {
        return Err(perr(ln, "expected '<strand count> <radius>'"));
    }
    let count: usize = toks[0].parse().map_err(|_| perr(ln, format!("bad strand count '{}'", toks[0])))?;
    let radius = parse_f64(toks[1], ln)?;
    if radius <= 0.0 {
        return Err(perr(ln, format!("radius must be positive, got {radius}")));
    }
    if count == 0 {
        return Err(perr(ln, "model has no strands"));
    }

    let mut scalp = Scalp::default();
    let mut pending = lines.next();
    if let Some((ln, l)) = pending {
        if let Some(rest) = l.strip_prefix("scalp") {
            let toks: Vec<&str> = rest.split_whitespace().collect();
            let [x, y, z, r] = parse_floats::<4>(&toks, ln)?;
            scalp = Scalp { center: Vec3::new(x, y, z), radius: r };
            pending = lines.next();
        }
    }

    let mut strands = Vec::with_capacity(count);
    for si in 0..count {
        let (ln, l) = pending.take().or_else(|| lines.next()).ok_or_else(|| {
            perr(lines.last + 1, format!("truncated file: expected {count} strands, found {si}"))
        })?;
        let n: usize = l.parse().map_err(|_| perr(ln, format!("bad point count '{l}'")))?;
        if n < 2 {
            return Err(perr(ln, format!("strand {si} has {n} points, needs at least 2")));
        }
        let mut points = Vec::with_capacity(n);
        for pi in 0..n {
            let (pl, l) = lines.next().ok_or_else(|| {
                perr(lines.last + 1, format!("truncated strand {si}: declared {n} points, found {pi}"))
            })?;
            let toks: Vec<&str> = l.split_whitespace().collect();
            if toks.len() == 1 && pi < n {
                // a bare integer where a point is expected means the strand ended early
                if toks[0].parse::<usize>().is_ok() {
                    return Err(perr(pl, format!("truncated strand {si}: declared {n} points, found {pi}")));
                }
            }
            let [x, y, z] = parse_floats::<3>(&toks, pl)?;
            let p = Vec3::new(x, y, z);
            if points.last() == Some(&p) {
                return Err(perr(pl, format!("strand {si} repeats point {}", pi - 1)));
            }
            points.push(p);
        }
        strands.push(Strand { points });
    }
    if let Some((ln, _)) = lines.next() {
        return Err(perr(ln, format!("unexpected data after {count} strands")));
    }
    Ok(StrandModel { strands, radius, scalp })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strand::{generate_wisp_model, HairStyle};

    #[test]
    fn roundtrip_is_exact() {
        let m = generate_wisp_model(HairStyle::Curly, 120, 11);
        let back = read_model(&write_model(&m)).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn rejects_newer_version() {
        let err = read_model("HAIRTXT 2\n1 0.1\n2\n0 0 0\n1 0 0\n").unwrap_err();
        assert!(matches!(err, Error::UnsupportedVersion { line: 1, .. }), "{err}");
    }

    #[test]
    fn reports_truncation() {
        let text = "HAIRTXT 1\n1 0.1\n5\n0 0 0\n1 0 0\n2 0 0\n3 0 0\n";
        match read_model(text).unwrap_err() {
            Error::Parse { line, msg } => {
                assert_eq!(line, 8);
                assert!(msg.contains("truncated"), "{msg}");
            }
            e => panic!("unexpected {e}"),
        }
        // a short strand followed by the next strand's count
        let text = "HAIRTXT 1\n2 0.1\n3\n0 0 0\n1 0 0\n2\n0 0 0\n1 1 1\n";
        match read_model(text).unwrap_err() {
            Error::Parse { line, msg } => {
                assert_eq!(line, 6);
                assert!(msg.contains("truncated"), "{msg}");
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn rejects_bad_radius_and_magic() {
        assert!(matches!(read_model("HAIRTXT 1\n1 -0.5\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(read_model("HAIRTXT 1\n1 0\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(read_model("HAIR 1\n"), Err(Error::Parse { line: 1, .. })));
    }
}
