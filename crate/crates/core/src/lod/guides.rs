use rayon::prelude::*;

use super::kmeans::{flatten_splines, sq_dist, Clustering, Points};
use super::skin::{apply_skin, compute_skin_weights, SkinWeight};
use crate::error::{invalid, Result};
use crate::math::Vec3;
use crate::strand::Spline;

/// Guide strands, each strand's nearest guide triple and its skin weights.
#[derive(Clone, Debug, PartialEq)]
pub struct GuideSet {
    pub n_c: usize,
    /// Guide strand ids, ascending. A guide's position here is its slot.
    pub guide_ids: Vec<u32>,
    /// Rest-pose control points per guide slot.
    pub rest: Vec<Vec<Vec3>>,
    /// Per strand, the slots of its three nearest guides, nearest first.
    pub triples: Vec<[u32; 3]>,
    /// Per strand and control point (`strand * n_c + k`).
    pub weights: Vec<SkinWeight>,
}

impl GuideSet {
    pub fn n_strands(&self) -> usize {
        self.triples.len()
    }

    /// Strand ids of `strand`'s guide triple.
    pub fn triple_ids(&self, strand: usize) -> [u32; 3] {
        self.triples[strand].map(|s| self.guide_ids[s as usize])
    }

    pub fn triple_points(triple: &[u32; 3], k: usize, poses: &[Vec<Vec3>]) -> [Vec3; 3] {
        triple.map(|s| poses[s as usize][k])
    }

    /// Control point `k` of `strand` skinned onto `poses` (one entry per slot).
    pub fn skin_point(&self, strand: usize, k: usize, poses: &[Vec<Vec3>]) -> Vec3 {
        let g = Self::triple_points(&self.triples[strand], k, poses);
        apply_skin(&self.weights[strand * self.n_c + k], &g)
    }

    /// All strand control points skinned onto `poses`, `strand * n_c + k`.
    pub fn skin_all(&self, poses: &[Vec<Vec3>]) -> Vec<Vec3> {
        (0..self.n_strands() * self.n_c)
            .into_par_iter()
            .map(|i| self.skin_point(i / self.n_c, i % self.n_c, poses))
            .collect()
    }
}

/// Per cluster, the member nearest its centroid; this is the member with the
/// smallest summed squared distance to the other members.
pub fn cluster_medoids(pts: &Points, clusters: &Clustering) -> Vec<usize> {
    let mut out = Vec::with_capacity(clusters.k);
    for (c, members) in clusters.members().iter().enumerate() {
        let cent = clusters.centroid(c);
        let mut best = (usize::MAX, f64::INFINITY);
        for &i in members {
            let d = sq_dist(pts.row(i), cent);
            if d < best.1 {
                best = (i, d);
            }
        }
        out.push(best.0);
    }
    out
}

/// Picks one guide per cluster and records every strand's three nearest
/// guides along with its skin weights.
pub fn select_guides_and_triples(splines: &[Spline], clusters: &Clustering) -> Result<GuideSet> {
    if splines.len() != clusters.assignment.len() {
        return Err(invalid("clustering does not match the strand count"));
    }
    let (data, dim) = flatten_splines(splines);
    let n_c = dim / 3;
    let pts = Points { data: &data, dim };
    let mut guide_ids: Vec<usize> = cluster_medoids(&pts, clusters);
    guide_ids.sort_unstable();
    guide_ids.dedup();
    let rest: Vec<Vec<Vec3>> = guide_ids.iter().map(|&g| splines[g].control_points.clone()).collect();

    let triples: Vec<[u32; 3]> = (0..splines.len())
        .into_par_iter()
        .map(|i| {
            let row = pts.row(i);
            let mut best: [(f64, usize); 3] = [(f64::INFINITY, usize::MAX); 3];
            for (slot, &g) in guide_ids.iter().enumerate() {
                let d = sq_dist(row, pts.row(g));
                // slots are visited in ascending id order, so strict
                // comparison keeps the lower id on ties
                if d < best[2].0 {
                    best[2] = (d, slot);
                    if best[2].0 < best[1].0 {
                        best.swap(1, 2);
                        if best[1].0 < best[0].0 {
                            best.swap(0, 1);
                        }
                    }
                }
            }
            let first = best[0].1;
            best.map(|(_, s)| if s == usize::MAX { first as u32 } else { s as u32 })
        })
        .collect();

    let weights: Vec<SkinWeight> = (0..splines.len() * n_c)
        .into_par_iter()
        .map(|i| {
            let (s, k) = (i / n_c, i % n_c);
            let g = GuideSet::triple_points(&triples[s], k, &rest);
            compute_skin_weights(&splines[s].control_points[k], &g)
        })
        .collect();

    Ok(GuideSet { n_c, guide_ids: guide_ids.into_iter().map(|g| g as u32).collect(), rest, triples, weights })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lod::kmeans::kmeans_strands;
    use crate::strand::{generate_wisp_model, SplineKind};

    fn line(offset: f64) -> Spline {
        let pts = (0..4).map(|k| Vec3::new(offset, k as f64, 0.0)).collect();
        Spline::new(pts, SplineKind::CatmullRom).unwrap()
    }

    #[test]
    fn middle_of_three_is_medoid() {
        let splines = vec![line(0.0), line(1.0), line(2.0)];
        let cl = kmeans_strands(&splines, 1, 10, 0).unwrap();
        let g = select_guides_and_triples(&splines, &cl).unwrap();
        assert_eq!(g.guide_ids, vec![1]);
        assert_eq!(g.triples[0], [0, 0, 0]);
    }

    #[test]
    fn singleton_cluster_is_its_own_guide() {
        let splines = vec![line(0.0), line(10.0), line(10.5)];
        let cl = kmeans_strands(&splines, 2, 10, 0).unwrap();
        let g = select_guides_and_triples(&splines, &cl).unwrap();
        assert!(g.guide_ids.contains(&0));
    }

    #[test]
    fn guides_own_their_triples_and_weights_reproduce_rest() {
        let m = generate_wisp_model(crate::strand::HairStyle::Straight, 600, 2);
        let splines = m.fit_all(16).unwrap();
        let cl = kmeans_strands(&splines, 24, 30, 5).unwrap();
        let g = select_guides_and_triples(&splines, &cl).unwrap();
        for (slot, &id) in g.guide_ids.iter().enumerate() {
            assert_eq!(g.triples[id as usize][0] as usize, slot);
        }
        for w in &g.weights {
            assert!((w.sum() - 1.0).abs() < 1e-9);
        }
        let skinned = g.skin_all(&g.rest);
        for (s, sp) in splines.iter().enumerate() {
            for k in 0..16 {
                assert!((skinned[s * 16 + k] - sp.control_points[k]).norm() < 1e-9);
            }
        }
        // triples are sorted by distance
        let (data, dim) = flatten_splines(&splines);
        let pts = Points { data: &data, dim };
        for s in 0..splines.len() {
            let d = g.triple_ids(s).map(|id| sq_dist(pts.row(s), pts.row(id as usize)));
            assert!(d[0] <= d[1] && d[1] <= d[2]);
        }
    }
}
