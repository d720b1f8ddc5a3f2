//! Linear skinning of points against a triangle of guide control points.

use crate::math::Vec3;

/// Weights of one point against a guide triple.
///
/// Regular weights are barycentric coordinates of the point's projection
/// onto the guide plane; `offset[2]` then holds the signed distance along the
/// plane normal and the other two entries are zero. Fallback weights are
/// inverse-distance and `offset` is a world-space displacement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SkinWeight {
    pub w: [f64; 3],
    pub offset: [f64; 3],
    pub fallback: bool,
}

impl SkinWeight {
    pub fn sum(&self) -> f64 {
        self.w[0] + self.w[1] + self.w[2]
    }
}

fn plane_normal(g: &[Vec3; 3]) -> Option<Vec3> {
    let e0 = g[1] - g[0];
    let e1 = g[2] - g[0];
    let n = e0.cross(&e1);
    let scale = e0.norm_squared() * e1.norm_squared();
    if scale == 0.0 || n.norm_squared() <= 1e-16 * scale {
        return None;
    }
    Some(n.normalize())
}

/// Barycentric skin weights of `p` against the triangle `g`, falling back to
/// inverse-distance weights when the triangle is degenerate.
pub fn compute_skin_weights(p: &Vec3, g: &[Vec3; 3]) -> SkinWeight {
    let Some(n) = plane_normal(g) else {
        return inverse_distance(p, g);
    };
    let e0 = g[1] - g[0];
    let e1 = g[2] - g[0];
    let v = p - g[0];
    let d00 = e0.dot(&e0);
    let d01 = e0.dot(&e1);
    let d11 = e1.dot(&e1);
    let d20 = v.dot(&e0);
    let d21 = v.dot(&e1);
    let denom = d00 * d11 - d01 * d01;
    let w1 = (d11 * d20 - d01 * d21) / denom;
    let w2 = (d00 * d21 - d01 * d20) / denom;
    let w0 = 1.0 - w1 - w2;
    let q = g[0] * w0 + g[1] * w1 + g[2] * w2;
    SkinWeight { w: [w0, w1, w2], offset: [0.0, 0.0, (p - q).dot(&n)], fallback: false }
}

fn inverse_distance(p: &Vec3, g: &[Vec3; 3]) -> SkinWeight {
    let d: Vec<f64> = g.iter().map(|gi| (p - gi).norm()).collect();
    let w = if let Some(i) = d.iter().position(|&x| x == 0.0) {
        let mut w = [0.0; 3];
        w[i] = 1.0;
        w
    } else {
        let inv = [1.0 / d[0], 1.0 / d[1], 1.0 / d[2]];
        let s = inv[0] + inv[1] + inv[2];
        [inv[0] / s, inv[1] / s, inv[2] / s]
    };
    let q = g[0] * w[0] + g[1] * w[1] + g[2] * w[2];
    let o = p - q;
    SkinWeight { w, offset: [o.x, o.y, o.z], fallback: true }
}

/// Reconstructs a point from its weights and the (possibly moved) guides.
pub fn apply_skin(s: &SkinWeight, g: &[Vec3; 3]) -> Vec3 {
    let q = g[0] * s.w[0] + g[1] * s.w[1] + g[2] * s.w[2];
    if s.fallback {
        return q + Vec3::new(s.offset[0], s.offset[1], s.offset[2]);
    }
    match plane_normal(g) {
        Some(n) => q + n * s.offset[2],
        None => q,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tri() -> [Vec3; 3] {
        [Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.2), Vec3::new(0.1, 1.0, -0.3)]
    }

    #[test]
    fn vertex_and_centroid() {
        let g = tri();
        let s = compute_skin_weights(&g[1], &g);
        assert!((s.w[1] - 1.0).abs() < 1e-12 && s.w[0].abs() < 1e-12 && s.w[2].abs() < 1e-12);
        let c = (g[0] + g[1] + g[2]) / 3.0;
        let s = compute_skin_weights(&c, &g);
        for w in s.w {
            assert!((w - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn collinear_falls_back() {
        let g = [Vec3::zeros(), Vec3::x(), Vec3::x() * 2.0];
        let p = Vec3::new(0.5, 1.0, 0.0);
        let s = compute_skin_weights(&p, &g);
        assert!(s.fallback);
        assert!((s.sum() - 1.0).abs() < 1e-12);
        assert!((apply_skin(&s, &g) - p).norm() < 1e-12);
        let same = [Vec3::x(); 3];
        let s = compute_skin_weights(&Vec3::x(), &same);
        assert!(s.fallback);
        assert_eq!(apply_skin(&s, &same), Vec3::x());
    }

    fn v3() -> impl Strategy<Value = Vec3> {
        (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
    }

    proptest! {
        #[test]
        fn weights_reproduce_projection(p in v3(), a in v3(), b in v3(), c in v3()) {
            let g = [a, b, c];
            let s = compute_skin_weights(&p, &g);
            prop_assert!((s.sum() - 1.0).abs() < 1e-9);
            let wmax = s.w.iter().fold(1.0f64, |m, w| m.max(w.abs()));
            prop_assert!((apply_skin(&s, &g) - p).norm() < 1e-12 * wmax * 100.0);
            if !s.fallback {
                // the weighted guides land on the orthogonal projection
                let q = g[0] * s.w[0] + g[1] * s.w[1] + g[2] * s.w[2];
                let n = (b - a).cross(&(c - a)).normalize();
                let proj = p - n * (p - a).dot(&n);
                prop_assert!((q - proj).norm() < 1e-12 * wmax * 100.0);
            }
        }

        #[test]
        fn translation_covariance(p in v3(), a in v3(), b in v3(), c in v3(), t in v3()) {
            let g = [a, b, c];
            let s = compute_skin_weights(&p, &g);
            let moved = [a + t, b + t, c + t];
            let wmax = s.w.iter().fold(1.0f64, |m, w| m.max(w.abs()));
            prop_assert!((apply_skin(&s, &moved) - (p + t)).norm() < 1e-12 * wmax * 100.0);
        }
    }
}
