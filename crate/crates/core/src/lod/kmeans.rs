//! Lloyd k-means over flattened control-point vectors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::strand::Spline;

/// Row-major matrix of items, `dim` values per item.
#[derive(Clone, Debug)]
pub struct Points<'a> {
    pub data: &'a [f64],
    pub dim: usize,
}

impl<'a> Points<'a> {
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &'a [f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Flattens spline control points into one row per spline.
pub fn flatten_splines(splines: &[Spline]) -> (Vec<f64>, usize) {
    let dim = splines.first().map_or(0, |s| 3 * s.len());
    let mut data = Vec::with_capacity(dim * splines.len());
    for s in splines {
        for p in &s.control_points {
            data.extend_from_slice(&[p.x, p.y, p.z]);
        }
    }
    (data, dim)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Clustering {
    pub assignment: Vec<usize>,
    /// `k * dim` centroid values.
    pub centroids: Vec<f64>,
    pub k: usize,
    /// Within-cluster sum of squared distances after each iteration.
    pub objective_history: Vec<f64>,
}

impl Clustering {
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut m = vec![Vec::new(); self.k];
        for (i, &c) in self.assignment.iter().enumerate() {
            m[c].push(i);
        }
        m
    }

    pub fn centroid(&self, c: usize) -> &[f64] {
        let dim = self.centroids.len() / self.k;
        &self.centroids[c * dim..(c + 1) * dim]
    }
}

fn nearest(row: &[f64], centroids: &[f64], dim: usize) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, cent) in centroids.chunks_exact(dim).enumerate() {
        let d = sq_dist(row, cent);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// Farthest-point seeding: a random first center, then repeatedly the item
/// farthest from every chosen center (lowest index on ties).
fn seed_centers(pts: &Points, k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = pts.len();
    let mut centroids = Vec::with_capacity(k * pts.dim);
    let first = rng.gen_range(0..n);
    centroids.extend_from_slice(pts.row(first));
    let mut min_d: Vec<f64> = (0..n).map(|i| sq_dist(pts.row(i), pts.row(first))).collect();
    for _ in 1..k {
        let mut far = 0;
        for i in 1..n {
            if min_d[i] > min_d[far] {
                far = i;
            }
        }
        let row = pts.row(far);
        centroids.extend_from_slice(row);
        for i in 0..n {
            let d = sq_dist(pts.row(i), row);
            if d < min_d[i] {
                min_d[i] = d;
            }
        }
    }
    centroids
}

fn update_means(pts: &Points, assignment: &[usize], k: usize) -> (Vec<f64>, Vec<usize>) {
    let dim = pts.dim;
    let mut sums = vec![0.0; k * dim];
    let mut counts = vec![0usize; k];
    for (i, &c) in assignment.iter().enumerate() {
        counts[c] += 1;
        for (s, v) in sums[c * dim..(c + 1) * dim].iter_mut().zip(pts.row(i)) {
            *s += v;
        }
    }
    for c in 0..k {
        if counts[c] > 0 {
            let inv = 1.0 / counts[c] as f64;
            for s in &mut sums[c * dim..(c + 1) * dim] {
                *s *= inv;
            }
        }
    }
    (sums, counts)
}

fn objective(pts: &Points, assignment: &[usize], centroids: &[f64]) -> f64 {
    let dim = pts.dim;
    assignment
        .iter()
        .enumerate()
        .map(|(i, &c)| sq_dist(pts.row(i), &centroids[c * dim..(c + 1) * dim]))
        .sum()
}

/// k-means with farthest-point seeding. Deterministic in `seed`.
pub fn kmeans(pts: &Points, k: usize, max_iter: usize, seed: u64) -> Result<Clustering> {
    let n = pts.len();
    if k == 0 || k > n {
        return Err(invalid(format!("k must lie in [1, {n}], got {k}")));
    }
    let dim = pts.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = seed_centers(pts, k, &mut rng);
    let mut assignment = vec![usize::MAX; n];
    let mut history = Vec::new();

    for _ in 0..max_iter.max(1) {
        let next: Vec<usize> = (0..n)
            .into_par_iter()
            .map(|i| nearest(pts.row(i), &centroids, dim).0)
            .collect();
        let changed = next != assignment;
        assignment = next;

        // give every empty cluster the item farthest from its centroid,
        // taken from a cluster that can spare one
        loop {
            let (_, counts) = update_means(pts, &assignment, k);
            let Some(empty) = counts.iter().position(|&c| c == 0) else { break };
            let mut far = None;
            let mut far_d = -1.0;
            for i in 0..n {
                let c = assignment[i];
                if counts[c] < 2 {
                    continue;
                }
                let d = sq_dist(pts.row(i), &centroids[c * dim..(c + 1) * dim]);
                if d > far_d {
                    far_d = d;
                    far = Some(i);
                }
            }
            let i = far.expect("k <= n guarantees a donor cluster");
            assignment[i] = empty;
            centroids[empty * dim..(empty + 1) * dim].copy_from_slice(pts.row(i));
        }

        let (means, _) = update_means(pts, &assignment, k);
        centroids = means;
        history.push(objective(pts, &assignment, &centroids));
        if !changed {
            break;
        }
    }
    Ok(Clustering { assignment, centroids, k, objective_history: history })
}

/// k-means on strand splines under the summed squared control-point distance.
pub fn kmeans_strands(splines: &[Spline], k: usize, max_iter: usize, seed: u64) -> Result<Clustering> {
    if splines.windows(2).any(|w| w[0].len() != w[1].len()) {
        return Err(invalid("all splines need the same control point count"));
    }
    let (data, dim) = flatten_splines(splines);
    if dim == 0 {
        return Err(invalid("no strands to cluster"));
    }
    kmeans(&Points { data: &data, dim }, k, max_iter, seed)
}

/// Splits `items` into `parts` groups of at most `ceil(len / parts)` members.
///
/// Centroids come from k-means; assignment then greedily fills the globally
/// closest (item, centroid) pairs first while respecting capacities, followed
/// by a few rounds of centroid refinement under the same rule.
pub fn balanced_split(pts: &Points, items: &[usize], parts: usize, seed: u64) -> Vec<Vec<usize>> {
    let m = items.len();
    let parts = parts.clamp(1, m.max(1));
    if parts <= 1 {
        return vec![items.to_vec()];
    }
    if parts == m {
        return items.iter().map(|&i| vec![i]).collect();
    }
    let dim = pts.dim;
    let mut sub = Vec::with_capacity(m * dim);
    for &i in items {
        sub.extend_from_slice(pts.row(i));
    }
    let local = Points { data: &sub, dim };
    let cl = kmeans(&local, parts, 20, seed).expect("parts <= items");
    let cap = m.div_ceil(parts);
    let mut centroids = cl.centroids;
    let mut assign = vec![0usize; m];
    for _ in 0..5 {
        let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(m * parts);
        for i in 0..m {
            for c in 0..parts {
                pairs.push((sq_dist(local.row(i), &centroids[c * dim..(c + 1) * dim]), i, c));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut done = vec![false; m];
        let mut fill = vec![0usize; parts];
        for (_, i, c) in pairs {
            if !done[i] && fill[c] < cap {
                done[i] = true;
                fill[c] += 1;
                assign[i] = c;
            }
        }
        let (means, counts) = update_means(&local, &assign, parts);
        let mut next = means;
        for c in 0..parts {
            if counts[c] == 0 {
                next[c * dim..(c + 1) * dim].copy_from_slice(&centroids[c * dim..(c + 1) * dim]);
            }
        }
        if next == centroids {
            break;
        }
        centroids = next;
    }
    let mut groups = vec![Vec::new(); parts];
    for (li, &c) in assign.iter().enumerate() {
        groups[c].push(items[li]);
    }
    groups.retain(|g| !g.is_empty());
    groups.sort_by_key(|g| g[0]);
    groups
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strand::{generate_wisp_model, HairStyle};

    fn model_points(n: usize) -> (Vec<f64>, usize) {
        let m = generate_wisp_model(HairStyle::Curly, n, 4);
        flatten_splines(&m.fit_all(16).unwrap())
    }

    #[test]
    fn single_cluster_holds_everything() {
        let (d, dim) = model_points(60);
        let c = kmeans(&Points { data: &d, dim }, 1, 10, 1).unwrap();
        assert!(c.assignment.iter().all(|&a| a == 0));
    }

    #[test]
    fn k_equals_n_gives_singletons() {
        let (d, dim) = model_points(30);
        let pts = Points { data: &d, dim };
        let c = kmeans(&pts, 30, 10, 1).unwrap();
        let mut seen = c.assignment.clone();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 30);
        assert!(*c.objective_history.last().unwrap() < 1e-20);
    }

    #[test]
    fn objective_never_increases() {
        let (d, dim) = model_points(400);
        let pts = Points { data: &d, dim };
        for seed in 0..4 {
            let c = kmeans(&pts, 12, 50, seed).unwrap();
            // independent recomputation from the final assignment
            let members = c.members();
            let mut total = 0.0;
            for (ci, mem) in members.iter().enumerate() {
                assert!(!mem.is_empty());
                for &i in mem {
                    total += sq_dist(pts.row(i), c.centroid(ci));
                }
            }
            assert!((total - c.objective_history.last().unwrap()).abs() < 1e-9 * total.max(1.0));
            for w in c.objective_history.windows(2) {
                assert!(w[1] <= w[0] * (1.0 + 1e-12), "{:?}", c.objective_history);
            }
        }
    }

    #[test]
    fn too_many_clusters_rejected() {
        let (d, dim) = model_points(5);
        assert!(kmeans(&Points { data: &d, dim }, 6, 10, 0).is_err());
        assert!(kmeans(&Points { data: &d, dim }, 0, 10, 0).is_err());
    }

    #[test]
    fn balanced_split_respects_capacity() {
        let (d, dim) = model_points(200);
        let pts = Points { data: &d, dim };
        let items: Vec<usize> = (10..47).collect();
        let groups = balanced_split(&pts, &items, 4, 3);
        assert_eq!(groups.len(), 4);
        let mut all: Vec<usize> = groups.iter().flatten().copied().collect();
        all.sort();
        assert_eq!(all, items);
        for g in &groups {
            assert!(g.len() <= 10);
        }
        assert_eq!(groups, balanced_split(&pts, &items, 4, 3));
    }
}
