use std::collections::BTreeMap;

use rayon::prelude::*;

use super::state::LodState;
use super::width::{fiber_width, section_width, segment_width, SectionWidth};
use crate::error::{invalid, Result};
use crate::lod::LodHierarchy;
use crate::math::Vec3;
use crate::render::{CameraFrame, Segment, ThickPayload};
use crate::strand::Spline;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AssembleOptions {
    /// Straight ribbons per spline segment.
    pub subdiv: usize,
}

impl Default for AssembleOptions {
    fn default() -> Self {
        AssembleOptions { subdiv: 2 }
    }
}

/// One rendered spline segment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SegmentRecord {
    pub cluster: u32,
    pub seg: u16,
    pub level: u8,
    /// Width in pixels, the larger of both ends.
    pub width: f64,
}

#[derive(Clone, Debug, Default)]
pub struct Assembly {
    pub segments: Vec<Segment>,
    pub records: Vec<SegmentRecord>,
}

/// Rejects pose sets that do not cover every guide control point.
pub fn check_poses(h: &LodHierarchy, poses: &[Vec<Vec3>]) -> Result<()> {
    let n_g = h.guides.guide_ids.len();
    if poses.len() != n_g {
        return Err(invalid(format!("expected poses for {n_g} guides, got {}", poses.len())));
    }
    if let Some(g) = poses.iter().position(|p| p.len() != h.n_c()) {
        return Err(invalid(format!("guide {g} pose has {} points, expected {}", poses[g].len(), h.n_c())));
    }
    if poses.iter().flatten().any(|p| !p.iter().all(|c| c.is_finite())) {
        return Err(invalid("guide poses must be finite"));
    }
    Ok(())
}

struct HairFrame {
    spline: Spline,
    ends: Vec<SectionWidth>,
    n_total: u32,
    id: u32,
}

struct Ctx<'a> {
    h: &'a LodHierarchy,
    poses: &'a [Vec<Vec3>],
    strands: Vec<Vec3>,
    cam: &'a CameraFrame,
    /// Hair-id offset of each level's thick hairs.
    offsets: Vec<u32>,
}

impl<'a> Ctx<'a> {
    fn new(h: &'a LodHierarchy, poses: &'a [Vec<Vec3>], cam: &'a CameraFrame) -> Result<Self> {
        check_poses(h, poses)?;
        let strands = h.guides.skin_all(poses);
        let mut offsets = Vec::with_capacity(h.n_levels());
        let mut acc = h.n_strands() as u32;
        for lv in &h.levels {
            offsets.push(acc);
            acc += lv.hairs.len() as u32;
        }
        Ok(Ctx { h, poses, strands, cam, offsets })
    }

    fn end_tangent(spline: &Spline, k: usize) -> Vec3 {
        let n_seg = spline.segment_count();
        if k < n_seg {
            spline.eval_segment(k, 0.0).1
        } else {
            spline.eval_segment(n_seg - 1, 1.0).1
        }
    }

    fn strand_frame(&self, strand: u32) -> HairFrame {
        let n_c = self.h.n_c();
        let s = strand as usize;
        let spline = Spline { control_points: self.strands[s * n_c..(s + 1) * n_c].to_vec(), kind: crate::strand::SplineKind::CatmullRom };
        let r = self.h.radius;
        let ends = spline.control_points.iter().map(|p| fiber_width(p, r, self.cam)).collect();
        HairFrame { spline, ends, n_total: 1, id: strand }
    }

    fn frames(&self, cluster: usize, level: usize) -> Vec<HairFrame> {
        let lv = &self.h.levels[level];
        lv.l0_ranges[cluster]
            .clone()
            .map(|hi| {
                let hair = &lv.hairs[hi];
                if hair.is_single() {
                    return self.strand_frame(hair.members[0]);
                }
                let spline = self.h.hair_spline(level, hi, self.poses, &self.strands);
                let ends = (0..self.h.n_c())
                    .map(|k| {
                        let corners = self.h.corner_points(level, hi, k, &self.strands);
                        let t = Self::end_tangent(&spline, k);
                        section_width(&spline.control_points[k], &t, &corners, self.h.radius, self.cam)
                    })
                    .collect();
                HairFrame { spline, ends, n_total: hair.n_total() as u32, id: self.offsets[level] + hi as u32 }
            })
            .collect()
    }

    fn emit(&self, f: &HairFrame, k: usize, subdiv: usize, key: (u32, u16), out: &mut Vec<Segment>) {
        let (a, b) = (&f.ends[k], &f.ends[k + 1]);
        if a.behind || b.behind {
            return;
        }
        let r = self.h.radius;
        let world = |e: &SectionWidth| if f.n_total == 1 { 2.0 * r } else { e.l_w * self.cam.pixel_size(e.depth) };
        let (w0, w1) = (world(a), world(b));
        let mut prev = f.spline.eval_segment(k, 0.0);
        for j in 0..subdiv {
            let u0 = j as f64 / subdiv as f64;
            let u1 = (j + 1) as f64 / subdiv as f64;
            let next = f.spline.eval_segment(k, u1);
            let lerp = |x: f64, y: f64, u: f64| x + (y - x) * u;
            let thick = (f.n_total > 1).then(|| ThickPayload {
                n_total: f.n_total,
                l_t: [lerp(a.l_t, b.l_t, u0), lerp(a.l_t, b.l_t, u1)],
            });
            out.push(Segment {
                p0: prev.0,
                p1: next.0,
                t0: prev.1,
                t1: next.1,
                w0: lerp(w0, w1, u0),
                w1: lerp(w0, w1, u1),
                hair: f.id,
                key: Some(key),
                thick,
            });
            prev = next;
        }
    }
}

fn max_width(frames: &[HairFrame], k: usize) -> f64 {
    frames.iter().map(|f| segment_width(&f.ends[k], &f.ends[k + 1])).fold(0.0, f64::max)
}

fn check_state(h: &LodHierarchy, state: &LodState) -> Result<()> {
    if state.n_levels != h.n_levels() || state.n_segments != h.segment_count() || state.n_clusters() != h.n_l0() {
        return Err(invalid("LoD state does not match the hierarchy"));
    }
    Ok(())
}

/// Coarsest-to-finest scan: each segment takes the first level whose width is
/// within `eps_w`, or the finest level.
pub fn init_lod_levels(h: &LodHierarchy, poses: &[Vec<Vec3>], cam: &CameraFrame, eps_w: f64) -> Result<LodState> {
    let ctx = Ctx::new(h, poses, cam)?;
    let n_seg = h.segment_count();
    let mut state = LodState::uniform(h.n_l0(), n_seg, h.n_levels(), 0)?;
    let levels: Vec<Vec<u8>> = (0..h.n_l0())
        .into_par_iter()
        .map(|c| {
            let mut cache: BTreeMap<usize, Vec<HairFrame>> = BTreeMap::new();
            (0..n_seg)
                .map(|k| {
                    let mut l = 0;
                    while l < h.finest() {
                        let frames = cache.entry(l).or_insert_with(|| ctx.frames(c, l));
                        if max_width(frames, k) <= eps_w {
                            break;
                        }
                        l += 1;
                    }
                    l as u8
                })
                .collect()
        })
        .collect();
    state.levels = levels.concat();
    Ok(state)
}

/// Skins the hierarchy onto `poses`, emits every segment at its selected
/// level and records the current and one-coarser widths into `state`.
pub fn skin_and_assemble(
    h: &LodHierarchy,
    state: &mut LodState,
    poses: &[Vec<Vec3>],
    cam: &CameraFrame,
    opts: &AssembleOptions,
) -> Result<Assembly> {
    check_state(h, state)?;
    if opts.subdiv == 0 {
        return Err(invalid("subdiv must be at least 1"));
    }
    let ctx = Ctx::new(h, poses, cam)?;
    let n_seg = h.segment_count();
    let st = &*state;
    let parts: Vec<(Vec<Segment>, Vec<SegmentRecord>, Vec<(f64, f64)>)> = (0..h.n_l0())
        .into_par_iter()
        .map(|c| {
            let mut cache: BTreeMap<usize, Vec<HairFrame>> = BTreeMap::new();
            let mut segs = Vec::new();
            let mut recs = Vec::new();
            let mut widths = Vec::with_capacity(n_seg);
            for k in 0..n_seg {
                let l = st.level(c, k);
                let coarser = if l > 0 {
                    max_width(cache.entry(l - 1).or_insert_with(|| ctx.frames(c, l - 1)), k)
                } else {
                    f64::INFINITY
                };
                let frames = cache.entry(l).or_insert_with(|| ctx.frames(c, l));
                widths.push((max_width(frames, k), coarser));
                for f in frames.iter() {
                    let before = segs.len();
                    ctx.emit(f, k, opts.subdiv, (c as u32, k as u16), &mut segs);
                    if segs.len() > before {
                        let width = segment_width(&f.ends[k], &f.ends[k + 1]);
                        recs.push(SegmentRecord { cluster: c as u32, seg: k as u16, level: l as u8, width });
                    }
                }
            }
            (segs, recs, widths)
        })
        .collect();
    let mut out = Assembly::default();
    for (c, (segs, recs, widths)) in parts.into_iter().enumerate() {
        out.segments.extend(segs);
        out.records.extend(recs);
        for (k, (w, wc)) in widths.into_iter().enumerate() {
            state.w_cur[c * n_seg + k] = w;
            state.w_coarser[c * n_seg + k] = wc;
        }
    }
    Ok(out)
}

/// Every strand as single fibers, in strand order.
pub fn assemble_strands(h: &LodHierarchy, poses: &[Vec<Vec3>], cam: &CameraFrame, opts: &AssembleOptions) -> Result<Assembly> {
    if opts.subdiv == 0 {
        return Err(invalid("subdiv must be at least 1"));
    }
    let ctx = Ctx::new(h, poses, cam)?;
    let n_seg = h.segment_count();
    let finest = h.finest() as u8;
    let mut l0_of = vec![0u32; h.n_strands()];
    for (c, hair) in h.levels[0].hairs.iter().enumerate() {
        for &m in &hair.members {
            l0_of[m as usize] = c as u32;
        }
    }
    let parts: Vec<(Vec<Segment>, Vec<SegmentRecord>)> = (0..h.n_strands() as u32)
        .into_par_iter()
        .map(|s| {
            let f = ctx.strand_frame(s);
            let cluster = l0_of[s as usize];
            let mut segs = Vec::new();
            let mut recs = Vec::new();
            for k in 0..n_seg {
                let before = segs.len();
                ctx.emit(&f, k, opts.subdiv, (cluster, k as u16), &mut segs);
                if segs.len() > before {
                    recs.push(SegmentRecord { cluster, seg: k as u16, level: finest, width: segment_width(&f.ends[k], &f.ends[k + 1]) });
                }
            }
            (segs, recs)
        })
        .collect();
    let mut out = Assembly::default();
    for (s, r) in parts {
        out.segments.extend(s);
        out.records.extend(r);
    }
    Ok(out)
}
