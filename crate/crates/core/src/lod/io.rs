//! `HLOD` binary hierarchy files.
//!
//! Layout: magic `HLOD`, `u32` version, then tagged sections
//! (`[u8; 4]` tag, `u64` payload length, payload). All numbers are
//! little-endian; reals are `f64`.

use std::io::{Cursor, Read};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};

use super::cross_section::CrossSection;
use super::guides::GuideSet;
use super::hierarchy::{Level, LodHierarchy, ThickHair};
use super::skin::SkinWeight;
use crate::error::{Error, Result};
use crate::math::Vec3;

pub const MAGIC: &[u8; 4] = b"HLOD";
pub const VERSION: u32 = 1;

const TAG_META: &[u8; 4] = b"META";
const TAG_GUIDES: &[u8; 4] = b"GUID";
const TAG_WEIGHTS: &[u8; 4] = b"WGHT";
const TAG_LEVELS: &[u8; 4] = b"LEVL";

const NO_PARENT: u32 = u32::MAX;

fn put_vec3(out: &mut Vec<u8>, v: &Vec3) {
    for c in v.iter() {
        out.write_f64::<LE>(*c).unwrap();
    }
}

fn put_weight(out: &mut Vec<u8>, w: &SkinWeight) {
    for x in w.w {
        out.write_f64::<LE>(x).unwrap();
    }
    out.push(w.fallback as u8);
    if w.fallback {
        for x in w.offset {
            out.write_f64::<LE>(x).unwrap();
        }
    } else {
        out.write_f64::<LE>(w.offset[2]).unwrap();
    }
}

fn section(out: &mut Vec<u8>, tag: &[u8; 4], payload: Vec<u8>) {
    out.extend_from_slice(tag);
    out.write_u64::<LE>(payload.len() as u64).unwrap();
    out.extend_from_slice(&payload);
}

pub fn write_hierarchy(h: &LodHierarchy) -> Vec<u8> {
    let g = &h.guides;
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.write_u32::<LE>(VERSION).unwrap();

    let mut meta = Vec::new();
    meta.write_u32::<LE>(g.n_c as u32).unwrap();
    meta.write_f64::<LE>(h.radius).unwrap();
    meta.write_u32::<LE>(g.n_strands() as u32).unwrap();
    meta.write_u32::<LE>(h.levels.len() as u32).unwrap();
    section(&mut out, TAG_META, meta);

    let mut gs = Vec::new();
    gs.write_u32::<LE>(g.guide_ids.len() as u32).unwrap();
    for &id in &g.guide_ids {
        gs.write_u32::<LE>(id).unwrap();
    }
    for cps in &g.rest {
        for p in cps {
            put_vec3(&mut gs, p);
        }
    }
    for t in &g.triples {
        for s in t {
            gs.write_u32::<LE>(*s).unwrap();
        }
    }
    section(&mut out, TAG_GUIDES, gs);

    let mut ws = Vec::new();
    for w in &g.weights {
        put_weight(&mut ws, w);
    }
    section(&mut out, TAG_WEIGHTS, ws);

    let mut ls = Vec::new();
    for lv in &h.levels {
        ls.write_u32::<LE>(lv.hairs.len() as u32).unwrap();
        for (i, hair) in lv.hairs.iter().enumerate() {
            ls.write_u32::<LE>(lv.parent.get(i).copied().unwrap_or(NO_PARENT)).unwrap();
            ls.write_u32::<LE>(hair.members.len() as u32).unwrap();
            for &m in &hair.members {
                ls.write_u32::<LE>(m).unwrap();
            }
            ls.push(!hair.sections.is_empty() as u8);
            for s in &hair.sections {
                put_vec3(&mut ls, &s.center);
                put_vec3(&mut ls, &s.axis_a);
                put_vec3(&mut ls, &s.axis_b);
                ls.write_f64::<LE>(s.half_a).unwrap();
                ls.write_f64::<LE>(s.half_b).unwrap();
                for c in s.corners {
                    ls.write_u32::<LE>(c).unwrap();
                }
                ls.push(s.degenerate as u8);
                put_weight(&mut ls, &s.weight);
            }
        }
    }
    section(&mut out, TAG_LEVELS, ls);
    out
}

pub fn write_hierarchy_file(h: &LodHierarchy, path: &Path) -> Result<()> {
    std::fs::write(path, write_hierarchy(h))?;
    Ok(())
}

pub fn read_hierarchy_file(path: &Path) -> Result<LodHierarchy> {
    read_hierarchy(&std::fs::read(path)?)
}

/// Reader that reports absolute byte offsets in errors.
struct Reader<'a> {
    cur: Cursor<&'a [u8]>,
    base: u64,
}

impl<'a> Reader<'a> {
    fn offset(&self) -> u64 {
        self.base + self.cur.position()
    }

    fn corrupt(&self, msg: impl Into<String>) -> Error {
        Error::Corrupt { offset: self.offset(), msg: msg.into() }
    }

    fn eof(&self) -> Error {
        self.corrupt("unexpected end of data")
    }

    fn u8(&mut self) -> Result<u8> {
        self.cur.read_u8().map_err(|_| self.eof())
    }

    fn u32(&mut self) -> Result<u32> {
        self.cur.read_u32::<LE>().map_err(|_| self.eof())
    }

    fn u64(&mut self) -> Result<u64> {
        self.cur.read_u64::<LE>().map_err(|_| self.eof())
    }

    fn f64(&mut self) -> Result<f64> {
        self.cur.read_f64::<LE>().map_err(|_| self.eof())
    }

    fn vec3(&mut self) -> Result<Vec3> {
        Ok(Vec3::new(self.f64()?, self.f64()?, self.f64()?))
    }

    fn tag(&mut self) -> Result<[u8; 4]> {
        let mut t = [0u8; 4];
        self.cur.read_exact(&mut t).map_err(|_| self.eof())?;
        Ok(t)
    }

    fn flag(&mut self) -> Result<bool> {
        match self.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            v => Err(self.corrupt(format!("bad flag byte {v}"))),
        }
    }

    /// A count that must fit in the remaining bytes at `min_size` each.
    fn count(&mut self, min_size: u64) -> Result<usize> {
        let n = self.u32()? as u64;
        let left = self.cur.get_ref().len() as u64 - self.cur.position();
        if n * min_size > left {
            return Err(self.corrupt(format!("count {n} exceeds remaining data")));
        }
        Ok(n as usize)
    }

    fn weight(&mut self) -> Result<SkinWeight> {
        let w = [self.f64()?, self.f64()?, self.f64()?];
        let fallback = self.flag()?;
        let offset = if fallback { [self.f64()?, self.f64()?, self.f64()?] } else { [0.0, 0.0, self.f64()?] };
        Ok(SkinWeight { w, offset, fallback })
    }

    fn finish(&self) -> Result<()> {
        if self.cur.position() as usize != self.cur.get_ref().len() {
            return Err(self.corrupt("trailing bytes in section"));
        }
        Ok(())
    }
}

struct Meta {
    n_c: usize,
    radius: f64,
    n_strands: usize,
    n_levels: usize,
}

pub fn read_hierarchy(bytes: &[u8]) -> Result<LodHierarchy> {
    let mut top = Reader { cur: Cursor::new(bytes), base: 0 };
    if top.tag()? != *MAGIC {
        return Err(Error::Corrupt { offset: 0, msg: "missing HLOD magic".into() });
    }
    let version = top.u32()?;
    if version != VERSION {
        return Err(Error::Corrupt { offset: 4, msg: format!("unsupported version {version}") });
    }
    let mut sections: Vec<([u8; 4], u64, &[u8])> = Vec::new();
    while (top.cur.position() as usize) < bytes.len() {
        let at = top.offset();
        let tag = top.tag()?;
        if ![TAG_META, TAG_GUIDES, TAG_WEIGHTS, TAG_LEVELS].contains(&&tag) {
            return Err(Error::Corrupt { offset: at, msg: format!("unknown section tag {:?}", String::from_utf8_lossy(&tag)) });
        }
        if sections.iter().any(|s| s.0 == tag) {
            return Err(Error::Corrupt { offset: at, msg: "duplicate section".into() });
        }
        let len = top.u64()?;
        let start = top.cur.position();
        if len > bytes.len() as u64 - start {
            return Err(top.corrupt("section length exceeds file"));
        }
        sections.push((tag, start, &bytes[start as usize..(start + len) as usize]));
        top.cur.set_position(start + len);
    }
    let find = |tag: &[u8; 4]| {
        sections
            .iter()
            .find(|s| &s.0 == tag)
            .map(|s| Reader { cur: Cursor::new(s.2), base: s.1 })
            .ok_or_else(|| Error::Corrupt {
                offset: bytes.len() as u64,
                msg: format!("missing section {}", String::from_utf8_lossy(tag)),
            })
    };

    let mut r = find(TAG_META)?;
    let meta = Meta { n_c: r.u32()? as usize, radius: r.f64()?, n_strands: r.u32()? as usize, n_levels: r.u32()? as usize };
    r.finish()?;
    if meta.n_c < 4 || meta.n_levels < 2 || meta.n_strands == 0 || !(meta.radius > 0.0) {
        return Err(Error::Corrupt { offset: r.base, msg: "implausible header values".into() });
    }

    let mut r = find(TAG_GUIDES)?;
    let n_g = r.count(4)?;
    let guide_ids = (0..n_g).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
    let mut rest = Vec::with_capacity(n_g);
    for _ in 0..n_g {
        rest.push((0..meta.n_c).map(|_| r.vec3()).collect::<Result<Vec<_>>>()?);
    }
    let mut triples = Vec::with_capacity(meta.n_strands);
    for _ in 0..meta.n_strands {
        let t = [r.u32()?, r.u32()?, r.u32()?];
        if t.iter().any(|&s| s as usize >= n_g) {
            return Err(r.corrupt("guide slot out of range"));
        }
        triples.push(t);
    }
    r.finish()?;

    let mut r = find(TAG_WEIGHTS)?;
    let weights = (0..meta.n_strands * meta.n_c).map(|_| r.weight()).collect::<Result<Vec<_>>>()?;
    r.finish()?;
    let guides = GuideSet { n_c: meta.n_c, guide_ids, rest, triples, weights };

    let mut r = find(TAG_LEVELS)?;
    let mut levels: Vec<Level> = Vec::with_capacity(meta.n_levels);
    for li in 0..meta.n_levels {
        let n_h = r.count(9)?;
        let mut hairs = Vec::with_capacity(n_h);
        let mut parent = Vec::new();
        for _ in 0..n_h {
            let p = r.u32()?;
            if li == 0 {
                if p != NO_PARENT {
                    return Err(r.corrupt("L0 hair with a parent"));
                }
            } else {
                if p as usize >= levels[li - 1].hairs.len() {
                    return Err(r.corrupt("parent index out of range"));
                }
                parent.push(p);
            }
            let n_m = r.count(4)?;
            let members = (0..n_m).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
            let mut sections = Vec::new();
            if r.flag()? {
                for _ in 0..meta.n_c {
                    let center = r.vec3()?;
                    let axis_a = r.vec3()?;
                    let axis_b = r.vec3()?;
                    let half_a = r.f64()?;
                    let half_b = r.f64()?;
                    let corners = [r.u32()?, r.u32()?, r.u32()?, r.u32()?];
                    let degenerate = r.flag()?;
                    let weight = r.weight()?;
                    sections.push(CrossSection { center, axis_a, axis_b, half_a, half_b, corners, degenerate, weight });
                }
            }
            hairs.push(ThickHair { members, sections });
        }
        let lv = Level::from_parts(hairs, parent, levels.last()).map_err(|e| r.corrupt(e.to_string()))?;
        levels.push(lv);
    }
    r.finish()?;

    let mut cluster_of_l0 = vec![0u32; meta.n_strands];
    let mut l0_triples = Vec::with_capacity(levels[0].hairs.len());
    for (c, h) in levels[0].hairs.iter().enumerate() {
        for &m in &h.members {
            if m as usize >= meta.n_strands {
                return Err(Error::Corrupt { offset: r.base, msg: format!("strand id {m} out of range") });
            }
            cluster_of_l0[m as usize] = c as u32;
        }
        let mut t = guides.triples[h.members.first().copied().unwrap_or(0) as usize];
        t.sort_unstable();
        l0_triples.push(t);
    }
    let h = LodHierarchy { radius: meta.radius, guides, levels, l0_triples, cluster_of_l0 };
    h.validate().map_err(|e| Error::Corrupt { offset: r.base, msg: e.to_string() })?;
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lod::{build_lod, BuildParams};
    use crate::strand::{generate_wisp_model, HairStyle};

    fn sample() -> LodHierarchy {
        let m = generate_wisp_model(HairStyle::Straight, 300, 2);
        build_lod(&m, &BuildParams { clusters: 8, levels: 3, seed: 1, ..Default::default() }).unwrap()
    }

    #[test]
    fn roundtrip() {
        let h = sample();
        let bytes = write_hierarchy(&h);
        assert_eq!(read_hierarchy(&bytes).unwrap(), h);
    }

    #[test]
    fn unknown_tag_rejected() {
        let mut bytes = write_hierarchy(&sample());
        bytes[8..12].copy_from_slice(b"XXXX");
        match read_hierarchy(&bytes) {
            Err(Error::Corrupt { offset, msg }) => {
                assert_eq!(offset, 8);
                assert!(msg.contains("unknown section"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn version_and_truncation() {
        let mut bytes = write_hierarchy(&sample());
        let good = bytes.clone();
        bytes[4] = 2;
        assert!(matches!(read_hierarchy(&bytes), Err(Error::Corrupt { offset: 4, .. })));
        assert!(read_hierarchy(&good[..good.len() - 3]).is_err());
        assert!(read_hierarchy(b"NOPE").is_err());
    }
}
