use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{invalid, Error, Result};
use crate::math::Rgb;
use crate::runtime::FrameStats;
use crate::scatter::ProfileSample;

/// Formats with 9 significant digits, fixed notation for moderate exponents.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let e = v.abs().log10().floor() as i32;
    if (-5..9).contains(&e) {
        let s = format!("{:.*}", (8 - e).max(0) as usize, v);
        // a rounding carry can add a tenth digit
        let s = if s.trim_start_matches('-').replace('.', "").trim_start_matches('0').len() > 9 && s.contains('.') {
            format!("{:.*}", (7 - e).max(0) as usize, v)
        } else {
            s
        };
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{v:.8e}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CsvValue {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl CsvValue {
    fn render(&self) -> String {
        match self {
            CsvValue::Int(i) => i.to_string(),
            CsvValue::Float(f) => fmt_sig(*f),
            CsvValue::Text(s) => s.clone(),
            CsvValue::Empty => String::new(),
        }
    }
}

/// Header plus rows; every row must match the header length.
pub fn write_csv<W: Write>(w: W, header: &[String], rows: &[Vec<CsvValue>]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(header)?;
    for (i, row) in rows.iter().enumerate() {
        if row.len() != header.len() {
            return Err(invalid(format!("row {i} has {} fields, header has {}", row.len(), header.len())));
        }
        wr.write_record(row.iter().map(CsvValue::render))?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_csv_file(path: &Path, header: &[String], rows: &[Vec<CsvValue>]) -> Result<()> {
    write_csv(File::create(path)?, header, rows)
}

pub const PROFILE_HEADER: [&str; 4] = ["angle", "intensity_r", "intensity_g", "intensity_b"];

pub fn profile_rows(samples: &[ProfileSample]) -> Vec<Vec<CsvValue>> {
    samples
        .iter()
        .map(|s| {
            let c = s.intensity;
            vec![CsvValue::Float(s.angle), CsvValue::Float(c[0]), CsvValue::Float(c[1]), CsvValue::Float(c[2])]
        })
        .collect()
}

pub fn write_profile_csv<W: Write>(w: W, samples: &[ProfileSample]) -> Result<()> {
    write_csv(w, &PROFILE_HEADER.map(String::from), &profile_rows(samples))
}

pub fn stats_header(n_levels: usize, with_psnr: bool) -> Vec<String> {
    let mut h = vec!["frame".to_string(), "segments".to_string()];
    h.extend((0..n_levels).map(|l| format!("level{l}")));
    h.extend(["min_w", "max_w", "mean_w"].map(String::from));
    if with_psnr {
        h.push("psnr".into());
    }
    h
}

/// One stats row per frame; `psnr` is the adjacent-frame PSNR (absent for
/// the first frame).
pub fn write_stats_csv<W: Write>(w: W, stats: &[FrameStats], psnr: Option<&[Option<f64>]>) -> Result<()> {
    let n_levels = stats.first().map_or(0, |s| s.per_level.len());
    if let Some(p) = psnr {
        if p.len() != stats.len() {
            return Err(invalid("psnr column length differs from frame count"));
        }
    }
    let rows: Vec<Vec<CsvValue>> = stats
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut r = vec![CsvValue::Int(s.frame as i64), CsvValue::Int(s.segments as i64)];
            r.extend(s.per_level.iter().map(|&c| CsvValue::Int(c as i64)));
            r.extend([CsvValue::Float(s.min_w), CsvValue::Float(s.max_w), CsvValue::Float(s.mean_w)]);
            if let Some(p) = psnr {
                r.push(p[i].map_or(CsvValue::Empty, CsvValue::Float));
            }
            r
        })
        .collect();
    write_csv(w, &stats_header(n_levels, psnr.is_some()), &rows)
}

pub type StatsTable = (Vec<FrameStats>, Option<Vec<Option<f64>>>);

pub fn read_stats_csv<R: Read>(r: R) -> Result<StatsTable> {
    let mut rd = csv::Reader::from_reader(r);
    let header: Vec<String> = rd.headers()?.iter().map(String::from).collect();
    let with_psnr = header.last().is_some_and(|h| h == "psnr");
    let n_levels = header.len().checked_sub(5 + with_psnr as usize).ok_or_else(|| invalid("stats header too short"))?;
    if header != stats_header(n_levels, with_psnr) {
        return Err(invalid(format!("unexpected stats header {header:?}")));
    }
    let mut stats = Vec::new();
    let mut psnr = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let num = |k: usize| -> Result<f64> {
            rec[k].parse::<f64>().map_err(|_| Error::Parse { line, msg: format!("column {} is not a number: {:?}", header[k], &rec[k]) })
        };
        let int = |k: usize| -> Result<usize> {
            rec[k].parse::<usize>().map_err(|_| Error::Parse { line, msg: format!("column {} is not an integer: {:?}", header[k], &rec[k]) })
        };
        let per_level = (0..n_levels).map(|l| int(2 + l)).collect::<Result<Vec<_>>>()?;
        stats.push(FrameStats {
            frame: int(0)?,
            segments: int(1)?,
            per_level,
            min_w: num(2 + n_levels)?,
            max_w: num(3 + n_levels)?,
            mean_w: num(4 + n_levels)?,
        });
        if with_psnr {
            let k = header.len() - 1;
            psnr.push(if rec[k].is_empty() { None } else { Some(num(k)?) });
        }
    }
    Ok((stats, with_psnr.then_some(psnr)))
}

pub fn read_profile_csv<R: Read>(r: R) -> Result<Vec<ProfileSample>> {
    let mut rd = csv::Reader::from_reader(r);
    if rd.headers()?.iter().ne(PROFILE_HEADER) {
        return Err(invalid("unexpected profile header"));
    }
    rd.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec?;
            let v = (0..4)
                .map(|k| rec[k].parse::<f64>().map_err(|_| Error::Parse { line: i + 2, msg: format!("bad {}", PROFILE_HEADER[k]) }))
                .collect::<Result<Vec<_>>>()?;
            Ok(ProfileSample { angle: v[0], intensity: Rgb::new(v[1], v[2], v[3]) })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(std::f64::consts::PI), "3.14159265");
        assert_eq!(fmt_sig(-0.000123456789123), "-0.000123456789");
        assert_eq!(fmt_sig(123456789012.0), "1.23456789e11");
        assert_eq!(fmt_sig(9.999999999), "10");
        assert_eq!(fmt_sig(1.5e-9), "1.50000000e-9");
        for v in [0.1f64, 2.0 / 3.0, 1e-7 / 3.0, 12345.678901234, -7.77e20] {
            let back: f64 = fmt_sig(v).parse().unwrap();
            assert!(((back - v) / v).abs() < 1e-8, "{v}");
        }
    }

    #[test]
    fn empty_is_header_only_and_commas_quoted() {
        let mut buf = Vec::new();
        write_profile_csv(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "angle,intensity_r,intensity_g,intensity_b\n");
        let mut buf = Vec::new();
        write_csv(&mut buf, &["a".into(), "b".into()], &[vec![CsvValue::Text("x,y".into()), CsvValue::Int(3)]]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n\"x,y\",3\n");
        assert!(write_csv(Vec::new(), &["a".into()], &[vec![]]).is_err());
    }

    #[test]
    fn stats_roundtrip() {
        let stats = vec![
            FrameStats { frame: 0, segments: 10, per_level: vec![3, 7], min_w: 0.125, max_w: 1.75, mean_w: 0.5 },
            FrameStats { frame: 1, segments: 9, per_level: vec![4, 5], min_w: 0.1, max_w: 2.0, mean_w: 1.0 / 3.0 },
        ];
        let mut buf = Vec::new();
        write_stats_csv(&mut buf, &stats, None).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("frame,segments,level0,level1,min_w,max_w,mean_w\n"));
        let (back, p) = read_stats_csv(&buf[..]).unwrap();
        assert!(p.is_none());
        assert_eq!(back[0], stats[0]);
        assert!((back[1].mean_w - stats[1].mean_w).abs() < 1e-9);

        let mut buf = Vec::new();
        write_stats_csv(&mut buf, &stats, Some(&[None, Some(31.5)])).unwrap();
        let (_, p) = read_stats_csv(&buf[..]).unwrap();
        assert_eq!(p.unwrap(), vec![None, Some(31.5)]);
    }
}
