//! Elliptical cross-sections of a strand cluster.

use nalgebra::{Matrix3, SymmetricEigen};

use super::skin::SkinWeight;
use crate::math::{any_perpendicular, Vec3};

/// Half-lengths are this many standard deviations of the member spread.
pub const EXTENT_SIGMAS: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CrossSection {
    pub center: Vec3,
    /// Unit major axis, perpendicular to the cluster tangent.
    pub axis_a: Vec3,
    pub axis_b: Vec3,
    pub half_a: f64,
    pub half_b: f64,
    /// Member strands whose control point lies nearest to `+A, -A, +B, -B`.
    pub corners: [u32; 4],
    pub degenerate: bool,
    /// Skin weights of `center` against the owning L0 guide triple.
    pub weight: SkinWeight,
}

impl CrossSection {
    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.half_a * self.half_b
    }
}

/// Geometry part of a cross-section fit; `corners` index into the input.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectionFit {
    pub center: Vec3,
    pub axis_a: Vec3,
    pub axis_b: Vec3,
    pub half_a: f64,
    pub half_b: f64,
    pub corners: [usize; 4],
    pub degenerate: bool,
}

fn canonical_sign(v: Vec3) -> Vec3 {
    let i = v.iamax();
    if v[i] < 0.0 {
        -v
    } else {
        v
    }
}

/// PCA ellipse of `points` in the plane across `tangent`.
///
/// Extents are floored at the fiber radius `r`; sets narrower than that
/// (including single points) are flagged degenerate.
pub fn fit_cross_section(points: &[Vec3], tangent: &Vec3, r: f64) -> SectionFit {
    assert!(!points.is_empty(), "cross-section needs at least one point");
    let m = points.len() as f64;
    let center = points.iter().sum::<Vec3>() / m;
    let mut cov = Matrix3::zeros();
    for p in points {
        let d = p - center;
        cov += d * d.transpose();
    }
    cov /= m;
    let t = tangent.try_normalize(1e-300).unwrap_or_else(Vec3::z);
    let eig = SymmetricEigen::new(cov);
    let along = (0..3)
        .max_by(|&i, &j| {
            let a = eig.eigenvectors.column(i).dot(&t).abs();
            let b = eig.eigenvectors.column(j).dot(&t).abs();
            a.total_cmp(&b).then(j.cmp(&i))
        })
        .unwrap();
    let mut rest: Vec<usize> = (0..3).filter(|&i| i != along).collect();
    rest.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]).then(i.cmp(&j)));
    let ext = |i: usize| EXTENT_SIGMAS * eig.eigenvalues[i].max(0.0).sqrt();
    let (raw_a, raw_b) = (ext(rest[0]), ext(rest[1]));
    let degenerate = points.len() == 1 || raw_a < r;
    let (axis_a, axis_b) = if degenerate {
        let a = any_perpendicular(&t);
        (a, t.cross(&a))
    } else {
        let a = canonical_sign(eig.eigenvectors.column(rest[0]).into_owned());
        let b = canonical_sign(eig.eigenvectors.column(rest[1]).into_owned());
        (a, b)
    };
    let half_a = raw_a.max(r);
    let half_b = raw_b.max(r);
    // distances are measured in the section plane; members' control points
    // also spread along the tangent
    let ends = [(half_a, 0.0), (-half_a, 0.0), (0.0, half_b), (0.0, -half_b)];
    let plane: Vec<(f64, f64)> = points.iter().map(|p| ((p - center).dot(&axis_a), (p - center).dot(&axis_b))).collect();
    let mut corners = [0usize; 4];
    for (c, e) in corners.iter_mut().zip(&ends) {
        let mut best = f64::INFINITY;
        for (i, p) in plane.iter().enumerate() {
            let d = (p.0 - e.0).powi(2) + (p.1 - e.1).powi(2);
            if d < best {
                best = d;
                *c = i;
            }
        }
    }
    SectionFit { center, axis_a, axis_b, half_a, half_b, corners, degenerate }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn symmetric_diamond() {
        let pts = [
            Vec3::new(2.0, 0.0, 0.0),
            Vec3::new(-2.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(0.0, -1.0, 0.0),
        ];
        let f = fit_cross_section(&pts, &Vec3::z(), 1e-3);
        assert!(f.center.norm() < 1e-15);
        assert!((f.axis_a.x.abs() - 1.0).abs() < 1e-12);
        assert!((f.axis_b.y.abs() - 1.0).abs() < 1e-12);
        let mut c = f.corners;
        c.sort();
        assert_eq!(c, [0, 1, 2, 3]);
        assert!(!f.degenerate);
        assert!((f.half_a - 2.0 * 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn coincident_points_are_degenerate() {
        let p = Vec3::new(0.3, -1.0, 2.0);
        let f = fit_cross_section(&[p, p, p], &Vec3::y(), 0.01);
        assert!(f.degenerate);
        assert_eq!(f.center, p);
        assert_eq!(f.half_a, 0.01);
        assert_eq!(f.half_b, 0.01);
        let f = fit_cross_section(&[p], &Vec3::y(), 0.01);
        assert!(f.degenerate);
        assert_eq!(f.corners, [0; 4]);
        assert!(f.axis_a.dot(&Vec3::y()).abs() < 1e-12);
    }

    #[test]
    fn planar_ellipse_axes_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let t = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)).normalize();
            let u0 = any_perpendicular(&t);
            let v0 = t.cross(&u0);
            let ang: f64 = rng.gen_range(0.0..std::f64::consts::PI);
            let a_dir = u0 * ang.cos() + v0 * ang.sin();
            let b_dir = t.cross(&a_dir);
            let (sa, sb) = (3.0, 1.0);
            let pts: Vec<Vec3> = (0..400)
                .map(|_| {
                    // uniform in the ellipse by rejection
                    loop {
                        let x: f64 = rng.gen_range(-1.0..1.0);
                        let y: f64 = rng.gen_range(-1.0..1.0);
                        if x * x + y * y <= 1.0 {
                            return a_dir * (x * sa) + b_dir * (y * sb) + t * rng.gen_range(-0.05..0.05);
                        }
                    }
                })
                .collect();
            let f = fit_cross_section(&pts, &t, 1e-3);
            let angle_a = f.axis_a.dot(&a_dir).abs().min(1.0).acos().to_degrees();
            let angle_b = f.axis_b.dot(&b_dir).abs().min(1.0).acos().to_degrees();
            assert!(angle_a < 5.0 && angle_b < 5.0, "{angle_a} {angle_b}");
        }
    }

    #[test]
    fn corners_ignore_offsets_along_the_tangent() {
        // member 4 sits at the center in-plane but far along z; 0..4 are the
        // in-plane extremes offset along z by different amounts
        let pts = [
            Vec3::new(2.0, 0.0, 0.9),
            Vec3::new(-2.0, 0.0, -0.7),
            Vec3::new(0.0, 1.0, 0.8),
            Vec3::new(0.0, -1.0, -0.9),
            Vec3::new(0.1, 0.0, 0.0),
        ];
        let f = fit_cross_section(&pts, &Vec3::z(), 1e-3);
        let mut c = f.corners;
        c.sort();
        assert_eq!(c, [0, 1, 2, 3]);
    }
}
