use std::collections::BTreeMap;
use std::ops::Range;

use rayon::prelude::*;

use super::cross_section::{fit_cross_section, CrossSection};
use super::guides::{select_guides_and_triples, GuideSet};
use super::kmeans::{balanced_split, flatten_splines, kmeans_strands, Points};
use super::skin::{apply_skin, compute_skin_weights};
use crate::error::{invalid, Result};
use crate::math::Vec3;
use crate::strand::{Spline, SplineKind, StrandModel, DEFAULT_CONTROL_POINTS};

/// A cluster of strands rendered as one fat fiber.
#[derive(Clone, Debug, PartialEq)]
pub struct ThickHair {
    /// Member strand ids, ascending.
    pub members: Vec<u32>,
    /// One per control point; empty for single-strand clusters, which render
    /// as the strand itself.
    pub sections: Vec<CrossSection>,
}

impl ThickHair {
    pub fn n_total(&self) -> usize {
        self.members.len()
    }

    pub fn is_single(&self) -> bool {
        self.members.len() == 1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Level {
    pub hairs: Vec<ThickHair>,
    /// Index of each hair's cluster in the previous level (empty for L0).
    pub parent: Vec<u32>,
    /// L0 ancestor of each hair.
    pub l0: Vec<u32>,
    /// Hairs descending from each L0 cluster; contiguous by construction.
    pub l0_ranges: Vec<Range<usize>>,
}

impl Level {
    pub(crate) fn from_parts(hairs: Vec<ThickHair>, parent: Vec<u32>, prev: Option<&Level>) -> Result<Level> {
        let l0: Vec<u32> = match prev {
            None => (0..hairs.len() as u32).collect(),
            Some(p) => parent.iter().map(|&i| p.l0[i as usize]).collect(),
        };
        let n_l0 = prev.map_or(hairs.len(), |p| p.l0_ranges.len());
        let mut ranges = vec![0..0; n_l0];
        let mut start = 0;
        for c in 0..n_l0 {
            let mut end = start;
            while end < l0.len() && l0[end] as usize == c {
                end += 1;
            }
            ranges[c] = start..end;
            start = end;
        }
        if start != l0.len() {
            return Err(invalid("level hairs are not grouped by L0 cluster"));
        }
        Ok(Level { hairs, parent, l0, l0_ranges: ranges })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LodHierarchy {
    pub radius: f64,
    pub guides: GuideSet,
    /// Coarsest first.
    pub levels: Vec<Level>,
    /// Guide slots shared by each L0 cluster, ascending.
    pub l0_triples: Vec<[u32; 3]>,
    pub cluster_of_l0: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BuildParams {
    pub clusters: usize,
    pub levels: usize,
    pub control_points: usize,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for BuildParams {
    fn default() -> Self {
        BuildParams { clusters: 256, levels: 6, control_points: DEFAULT_CONTROL_POINTS, max_iter: 50, seed: 0 }
    }
}

pub(crate) fn control_tangent(s: &Spline, k: usize) -> Vec3 {
    let segs = s.segment_count();
    if k < segs {
        s.eval_segment(k, 0.0).1
    } else {
        s.eval_segment(segs - 1, 1.0).1
    }
}

fn split_seed(seed: u64, level: usize, index: usize) -> u64 {
    seed ^ ((level as u64) << 48) ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Clusters, guides and the full level hierarchy in one call.
pub fn build_lod(model: &StrandModel, params: &BuildParams) -> Result<LodHierarchy> {
    model.validate()?;
    let splines = model.fit_all(params.control_points)?;
    let k = params.clusters.clamp(1, splines.len());
    let clusters = kmeans_strands(&splines, k, params.max_iter, params.seed)?;
    let guides = select_guides_and_triples(&splines, &clusters)?;
    build_hierarchy(model, &guides, params.levels, params.seed)
}

/// Builds `n_l` levels: L0 groups strands sharing a guide triple, each finer
/// level splits every cluster into at most four, and the finest level holds
/// single strands.
pub fn build_hierarchy(model: &StrandModel, guides: &GuideSet, n_l: usize, seed: u64) -> Result<LodHierarchy> {
    if n_l < 2 {
        return Err(invalid(format!("need at least 2 levels, got {n_l}")));
    }
    if guides.n_strands() != model.len() {
        return Err(invalid("guide set does not match the model"));
    }
    let n_c = guides.n_c;
    let splines = model.fit_all(n_c)?;
    let (data, dim) = flatten_splines(&splines);
    let pts = Points { data: &data, dim };

    // L0: identical unordered triples, oversized groups pre-split
    let mut groups: BTreeMap<[u32; 3], Vec<usize>> = BTreeMap::new();
    for (s, t) in guides.triples.iter().enumerate() {
        let mut key = *t;
        key.sort_unstable();
        groups.entry(key).or_default().push(s);
    }
    let cap = 4usize.saturating_pow((n_l - 1) as u32);
    let mut l0: Vec<([u32; 3], Vec<usize>)> = Vec::new();
    for (gi, (key, members)) in groups.into_iter().enumerate() {
        if members.len() > cap {
            let parts = members.len().div_ceil(cap);
            for g in balanced_split(&pts, &members, parts, split_seed(seed, 0, gi)) {
                l0.push((key, g));
            }
        } else {
            l0.push((key, members));
        }
    }
    l0.sort_by_key(|(_, m)| m[0]);
    let l0_triples: Vec<[u32; 3]> = l0.iter().map(|(k, _)| *k).collect();

    let mut member_sets: Vec<Vec<Vec<usize>>> = vec![l0.into_iter().map(|(_, m)| m).collect()];
    let mut parents: Vec<Vec<u32>> = vec![Vec::new()];
    for lvl in 1..n_l {
        let prev = &member_sets[lvl - 1];
        let mut next = Vec::new();
        let mut par = Vec::new();
        for (pi, members) in prev.iter().enumerate() {
            let children = if lvl == n_l - 1 {
                members.iter().map(|&m| vec![m]).collect()
            } else if members.len() == 1 {
                vec![members.clone()]
            } else {
                balanced_split(&pts, members, 4.min(members.len()), split_seed(seed, lvl, pi))
            };
            for c in children {
                next.push(c);
                par.push(pi as u32);
            }
        }
        member_sets.push(next);
        parents.push(par);
    }

    let l0_of_level: Vec<Vec<u32>> = {
        let mut out: Vec<Vec<u32>> = vec![(0..member_sets[0].len() as u32).collect()];
        for lvl in 1..n_l {
            let v = parents[lvl].iter().map(|&p| out[lvl - 1][p as usize]).collect();
            out.push(v);
        }
        out
    };

    let mut levels: Vec<Level> = Vec::with_capacity(n_l);
    for (lvl, sets) in member_sets.into_iter().enumerate() {
        let hairs: Vec<ThickHair> = sets
            .into_par_iter()
            .enumerate()
            .map(|(hi, mut members)| {
                members.sort_unstable();
                let triple = &l0_triples[l0_of_level[lvl][hi] as usize];
                let sections =
                    if members.len() == 1 { Vec::new() } else { fit_sections(&splines, &members, triple, guides, model.radius) };
                ThickHair { members: members.into_iter().map(|m| m as u32).collect(), sections }
            })
            .collect();
        let level = Level::from_parts(hairs, std::mem::take(&mut parents[lvl]), levels.last())?;
        levels.push(level);
    }

    let mut cluster_of_l0 = vec![0u32; model.len()];
    for (c, h) in levels[0].hairs.iter().enumerate() {
        for &m in &h.members {
            cluster_of_l0[m as usize] = c as u32;
        }
    }
    Ok(LodHierarchy { radius: model.radius, guides: guides.clone(), levels, l0_triples, cluster_of_l0 })
}

fn fit_sections(splines: &[Spline], members: &[usize], triple: &[u32; 3], guides: &GuideSet, r: f64) -> Vec<CrossSection> {
    let n_c = guides.n_c;
    (0..n_c)
        .map(|k| {
            let pts: Vec<Vec3> = members.iter().map(|&m| splines[m].control_points[k]).collect();
            let tangent: Vec3 = members.iter().map(|&m| control_tangent(&splines[m], k)).sum();
            let f = fit_cross_section(&pts, &tangent, r);
            let g = GuideSet::triple_points(triple, k, &guides.rest);
            CrossSection {
                center: f.center,
                axis_a: f.axis_a,
                axis_b: f.axis_b,
                half_a: f.half_a,
                half_b: f.half_b,
                corners: f.corners.map(|i| members[i] as u32),
                degenerate: f.degenerate,
                weight: compute_skin_weights(&f.center, &g),
            }
        })
        .collect()
}

impl LodHierarchy {
    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn n_strands(&self) -> usize {
        self.guides.n_strands()
    }

    pub fn n_l0(&self) -> usize {
        self.l0_triples.len()
    }

    pub fn n_c(&self) -> usize {
        self.guides.n_c
    }

    pub fn segment_count(&self) -> usize {
        self.guides.n_c - 1
    }

    pub fn finest(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn rest_poses(&self) -> &[Vec<Vec3>] {
        &self.guides.rest
    }

    /// Cross-section center `k` of a thick hair skinned onto `poses`.
    pub fn posed_center(&self, level: usize, hair: usize, k: usize, poses: &[Vec<Vec3>]) -> Vec3 {
        let lv = &self.levels[level];
        let h = &lv.hairs[hair];
        let triple = &self.l0_triples[lv.l0[hair] as usize];
        let g = GuideSet::triple_points(triple, k, poses);
        apply_skin(&h.sections[k].weight, &g)
    }

    /// Render spline of a hair: the member strand itself for singletons,
    /// otherwise a B-spline through the posed cross-section centers.
    /// `strands` holds skinned strand control points (`strand * n_c + k`).
    pub fn hair_spline(&self, level: usize, hair: usize, poses: &[Vec<Vec3>], strands: &[Vec3]) -> Spline {
        let n_c = self.n_c();
        let h = &self.levels[level].hairs[hair];
        if h.is_single() {
            let s = h.members[0] as usize;
            Spline { control_points: strands[s * n_c..(s + 1) * n_c].to_vec(), kind: SplineKind::CatmullRom }
        } else {
            let cps = (0..n_c).map(|k| self.posed_center(level, hair, k, poses)).collect();
            Spline { control_points: cps, kind: SplineKind::BSpline }
        }
    }

    /// Corner control points of cross-section `k` in the current pose.
    pub fn corner_points(&self, level: usize, hair: usize, k: usize, strands: &[Vec3]) -> [Vec3; 4] {
        let n_c = self.n_c();
        let h = &self.levels[level].hairs[hair];
        if h.is_single() {
            let p = strands[h.members[0] as usize * n_c + k];
            return [p; 4];
        }
        h.sections[k].corners.map(|c| strands[c as usize * n_c + k])
    }

    /// Checks the partition and linkage invariants.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_strands();
        if self.levels.len() < 2 {
            return Err(invalid("hierarchy needs at least 2 levels"));
        }
        for (li, lv) in self.levels.iter().enumerate() {
            let mut seen = vec![false; n];
            for (hi, h) in lv.hairs.iter().enumerate() {
                if h.members.is_empty() {
                    return Err(invalid(format!("level {li} hair {hi} is empty")));
                }
                if !h.is_single() && h.sections.len() != self.n_c() {
                    return Err(invalid(format!("level {li} hair {hi} has {} sections", h.sections.len())));
                }
                for &m in &h.members {
                    let m = m as usize;
                    if m >= n || seen[m] {
                        return Err(invalid(format!("level {li}: strand {m} missing or repeated")));
                    }
                    seen[m] = true;
                }
                for s in &h.sections {
                    if s.corners.iter().any(|c| h.members.binary_search(c).is_err()) {
                        return Err(invalid(format!("level {li} hair {hi}: corner outside members")));
                    }
                }
                if li > 0 {
                    let p = lv.parent[hi] as usize;
                    let parent = &self.levels[li - 1].hairs[p];
                    if h.members.iter().any(|m| parent.members.binary_search(m).is_err()) {
                        return Err(invalid(format!("level {li} hair {hi} escapes its parent")));
                    }
                }
            }
            if seen.iter().any(|s| !s) {
                return Err(invalid(format!("level {li} does not cover every strand")));
            }
        }
        if self.levels.last().unwrap().hairs.iter().any(|h| !h.is_single()) {
            return Err(invalid("finest level must hold single strands"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strand::{generate_wisp_model, HairStyle};

    fn small() -> (StrandModel, LodHierarchy) {
        let m = generate_wisp_model(HairStyle::Curly, 800, 9);
        let p = BuildParams { clusters: 16, levels: 4, seed: 3, ..Default::default() };
        let h = build_lod(&m, &p).unwrap();
        (m, h)
    }

    #[test]
    fn partition_and_counts() {
        let (m, h) = small();
        h.validate().unwrap();
        assert_eq!(h.n_levels(), 4);
        for w in h.levels.windows(2) {
            let (a, b) = (w[0].hairs.len(), w[1].hairs.len());
            assert!(b >= a && b <= 4 * a, "{a} -> {b}");
        }
        assert_eq!(h.levels[3].hairs.len(), m.len());
        for (s, &c) in h.cluster_of_l0.iter().enumerate() {
            assert!(h.levels[0].hairs[c as usize].members.contains(&(s as u32)));
        }
    }

    #[test]
    fn finest_level_reproduces_strands() {
        let (m, h) = small();
        let strands = h.guides.skin_all(h.rest_poses());
        let fitted = m.fit_all(16).unwrap();
        let fin = h.finest();
        for (hi, hair) in h.levels[fin].hairs.iter().enumerate() {
            let sp = h.hair_spline(fin, hi, h.rest_poses(), &strands);
            let orig = &fitted[hair.members[0] as usize];
            for (a, b) in sp.control_points.iter().zip(&orig.control_points) {
                assert!((a - b).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn deterministic() {
        let (_, a) = small();
        let (_, b) = small();
        assert_eq!(a, b);
    }

    #[test]
    fn centers_skin_back_to_rest() {
        let (_, h) = small();
        for (li, lv) in h.levels.iter().enumerate() {
            for (hi, hair) in lv.hairs.iter().enumerate() {
                for (k, s) in hair.sections.iter().enumerate() {
                    assert!((s.weight.sum() - 1.0).abs() < 1e-9);
                    assert!((h.posed_center(li, hi, k, h.rest_poses()) - s.center).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn oversized_groups_are_capped() {
        let m = generate_wisp_model(HairStyle::Straight, 200, 1);
        let p = BuildParams { clusters: 1, levels: 2, seed: 0, ..Default::default() };
        let h = build_lod(&m, &p).unwrap();
        h.validate().unwrap();
        assert!(h.levels[0].hairs.iter().all(|c| c.n_total() <= 4));
    }

    #[test]
    fn rejects_single_level() {
        let m = generate_wisp_model(HairStyle::Straight, 20, 1);
        let p = BuildParams { clusters: 2, levels: 1, ..Default::default() };
        assert!(build_lod(&m, &p).is_err());
    }
}
