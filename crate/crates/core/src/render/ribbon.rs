//! Straight ray-facing ribbons, the renderable unit for hair.

use super::camera::Ray;
use crate::math::Vec3;

/// Extra data for ribbons standing in for a cluster of fibers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThickPayload {
    pub n_total: u32,
    /// Full depth extent of the cluster at each end.
    pub l_t: [f64; 2],
}

/// A straight piece of hair. Widths are full widths in world units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub p0: Vec3,
    pub p1: Vec3,
    pub t0: Vec3,
    pub t1: Vec3,
    pub w0: f64,
    pub w1: f64,
    /// Owning strand or thick hair; hits on the same hair are skipped when
    /// leaving a surface.
    pub hair: u32,
    /// `(L0 cluster, segment index)` key for LoD bookkeeping, if any.
    pub key: Option<(u32, u16)>,
    pub thick: Option<ThickPayload>,
}

impl Segment {
    pub fn single(p0: Vec3, p1: Vec3, t0: Vec3, t1: Vec3, width: f64, hair: u32) -> Self {
        Segment { p0, p1, t0, t1, w0: width, w1: width, hair, key: None, thick: None }
    }

    pub fn width_at(&self, v: f64) -> f64 {
        self.w0 + (self.w1 - self.w0) * v
    }

    pub fn tangent_at(&self, v: f64) -> Vec3 {
        let t = self.t0 * (1.0 - v) + self.t1 * v;
        t.try_normalize(1e-300).unwrap_or_else(|| (self.p1 - self.p0).normalize())
    }

    /// Depth extent of a thick ribbon at `v`.
    pub fn depth_extent_at(&self, v: f64) -> Option<f64> {
        self.thick.map(|p| p.l_t[0] + (p.l_t[1] - p.l_t[0]) * v)
    }

    pub fn bounds(&self) -> (Vec3, Vec3) {
        let h = 0.5 * self.w0.max(self.w1);
        let lo = self.p0.inf(&self.p1) - Vec3::repeat(h);
        let hi = self.p0.sup(&self.p1) + Vec3::repeat(h);
        (lo, hi)
    }

    pub fn is_finite(&self) -> bool {
        [self.p0, self.p1, self.t0, self.t1].iter().all(|v| v.iter().all(|c| c.is_finite()))
            && self.w0.is_finite()
            && self.w1.is_finite()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hit {
    pub t: f64,
    /// Across the width, 0 at one edge and 1 at the other.
    pub u: f64,
    /// Along the segment from `p0` to `p1`.
    pub v: f64,
    pub segment: u32,
}

/// Intersects the ribbon swept by the segment axis along the direction
/// perpendicular to both the axis and `view`. `view` is normally the ray
/// direction itself.
pub fn intersect_ribbon(ray: &Ray, seg: &Segment, view: &Vec3, t_min: f64, t_max: f64) -> Option<(f64, f64, f64)> {
    let axis = seg.p1 - seg.p0;
    let len2 = axis.norm_squared();
    if len2 == 0.0 {
        return None;
    }
    let a = axis / len2.sqrt();
    // plane normal: the view direction with its along-axis part removed
    let n = view - a * view.dot(&a);
    let nn = n.norm();
    if nn < 1e-12 {
        return None;
    }
    let n = n / nn;
    let denom = ray.dir.dot(&n);
    if denom.abs() < 1e-15 {
        return None;
    }
    let t = (seg.p0 - ray.origin).dot(&n) / denom;
    if !(t > t_min && t < t_max) {
        return None;
    }
    let q = ray.at(t) - seg.p0;
    let v = q.dot(&axis) / len2;
    if !(0.0..=1.0).contains(&v) {
        return None;
    }
    let lateral = a.cross(&n);
    let w = seg.width_at(v);
    let off = q.dot(&lateral);
    if off.abs() > 0.5 * w {
        return None;
    }
    Some((t, 0.5 + off / w, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn seg() -> Segment {
        Segment::single(Vec3::new(-1.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0), Vec3::x(), Vec3::x(), 0.2, 0)
    }

    #[test]
    fn center_hit() {
        let r = Ray { origin: Vec3::new(0.0, 0.0, 5.0), dir: -Vec3::z() };
        let (t, u, v) = intersect_ribbon(&r, &seg(), &r.dir, 0.0, f64::INFINITY).unwrap();
        assert!((t - 5.0).abs() < 1e-12);
        assert!((u - 0.5).abs() < 1e-12);
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn lateral_miss() {
        let r = Ray { origin: Vec3::new(0.3, 0.51 * 0.2, 5.0), dir: -Vec3::z() };
        assert!(intersect_ribbon(&r, &seg(), &r.dir, 0.0, f64::INFINITY).is_none());
        let r = Ray { origin: Vec3::new(0.3, 0.49 * 0.2, 5.0), dir: -Vec3::z() };
        assert!(intersect_ribbon(&r, &seg(), &r.dir, 0.0, f64::INFINITY).is_some());
        let r = Ray { origin: Vec3::new(1.1, 0.0, 5.0), dir: -Vec3::z() };
        assert!(intersect_ribbon(&r, &seg(), &r.dir, 0.0, f64::INFINITY).is_none());
    }

    #[test]
    fn matches_plane_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut r3 = |s: f64| Vec3::new(rng.gen_range(-s..s), rng.gen_range(-s..s), rng.gen_range(-s..s));
        let mut checked = 0;
        for _ in 0..2000 {
            let s = Segment::single(r3(1.0), r3(1.0), Vec3::x(), Vec3::x(), 0.5, 0);
            let o = r3(1.0) + Vec3::new(0.0, 0.0, 4.0);
            let target = s.p0 + (s.p1 - s.p0) * 0.5 + r3(0.2);
            let ray = Ray { origin: o, dir: (target - o).normalize() };
            if let Some((t, _, _)) = intersect_ribbon(&ray, &s, &ray.dir, 0.0, f64::INFINITY) {
                // plane through the axis containing the lateral direction
                let a = (s.p1 - s.p0).normalize();
                let lateral = a.cross(&ray.dir).normalize();
                let normal = a.cross(&lateral).normalize();
                let t_ref = (s.p0 - o).dot(&normal) / ray.dir.dot(&normal);
                assert!((t - t_ref).abs() < 1e-9 * t_ref.abs().max(1.0));
                checked += 1;
            }
        }
        assert!(checked > 100);
    }
}
