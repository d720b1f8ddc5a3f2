use crate::error::{invalid, Result};

pub const DEFAULT_EPS_W: f64 = 2.0;

/// Next-frame level of one segment from its recorded widths.
///
/// Levels count from 0 (coarsest). `w_cur` is the width at the current
/// level and `w_coarser` the width one level coarser. When both the refine
/// and the keep conditions could apply at `w_coarser == eps_w`, coarsening
/// wins.
pub fn update_lod(level: usize, w_cur: f64, w_coarser: f64, eps_w: f64, n_levels: usize) -> usize {
    let finest = n_levels.saturating_sub(1);
    let next = if w_cur > eps_w {
        level + 1
    } else if w_coarser <= eps_w {
        level.saturating_sub(1)
    } else {
        level
    };
    next.min(finest)
}

/// Per (L0 cluster, segment) level and recorded widths.
#[derive(Clone, Debug, PartialEq)]
pub struct LodState {
    pub n_levels: usize,
    pub n_segments: usize,
    /// `cluster * n_segments + segment`.
    pub levels: Vec<u8>,
    pub w_cur: Vec<f64>,
    /// Infinite where no coarser level exists.
    pub w_coarser: Vec<f64>,
}

impl LodState {
    pub fn uniform(n_clusters: usize, n_segments: usize, n_levels: usize, level: usize) -> Result<Self> {
        if n_levels == 0 || n_levels > 256 || level >= n_levels {
            return Err(invalid(format!("level {level} outside [0, {n_levels})")));
        }
        let n = n_clusters * n_segments;
        Ok(LodState {
            n_levels,
            n_segments,
            levels: vec![level as u8; n],
            w_cur: vec![0.0; n],
            w_coarser: vec![f64::INFINITY; n],
        })
    }

    pub fn n_clusters(&self) -> usize {
        self.levels.len() / self.n_segments.max(1)
    }

    pub fn level(&self, cluster: usize, seg: usize) -> usize {
        self.levels[cluster * self.n_segments + seg] as usize
    }

    /// Applies [`update_lod`] to every entry; returns how many changed.
    pub fn update(&mut self, eps_w: f64) -> usize {
        let mut changed = 0;
        for i in 0..self.levels.len() {
            let l = self.levels[i] as usize;
            let n = update_lod(l, self.w_cur[i], self.w_coarser[i], eps_w, self.n_levels);
            if n != l {
                changed += 1;
                self.levels[i] = n as u8;
            }
        }
        changed
    }

    /// Entries per level.
    pub fn histogram(&self) -> Vec<usize> {
        let mut h = vec![0; self.n_levels];
        for &l in &self.levels {
            h[l as usize] += 1;
        }
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn three_branches() {
        assert_eq!(update_lod(2, 3.0, 5.0, 2.0, 6), 3);
        assert_eq!(update_lod(2, 1.5, 3.0, 2.0, 6), 2);
        assert_eq!(update_lod(2, 1.0, 1.8, 2.0, 6), 1);
    }

    #[test]
    fn boundary_and_clamps() {
        // coarsening takes precedence at equality
        assert_eq!(update_lod(2, 1.0, 2.0, 2.0, 6), 1);
        assert_eq!(update_lod(5, 9.0, 9.0, 2.0, 6), 5);
        assert_eq!(update_lod(0, 0.5, f64::INFINITY, 2.0, 6), 0);
        assert_eq!(update_lod(0, 0.5, 0.5, 2.0, 6), 0);
    }

    proptest! {
        #[test]
        fn moves_at_most_one_level(l in 0usize..6, a in 0.0f64..10.0, b in 0.0f64..10.0, eps in 0.1f64..5.0) {
            let n = update_lod(l, a, b, eps, 6);
            prop_assert!(n < 6);
            prop_assert!((n as i64 - l as i64).abs() <= 1);
        }
    }
}
