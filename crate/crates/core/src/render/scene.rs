use super::bvh::Bvh;
use super::camera::Ray;
use super::ribbon::{intersect_ribbon, Hit, Segment};
use crate::error::{invalid, Result};
use crate::math::{FiberFrame, Rgb, ScatterAngles, Vec3};
use crate::scatter::{estimate_density_and_n, AttenuationTables};

/// Directional light. `dir` points from the scene toward the light.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirLight {
    pub dir: Vec3,
    pub radiance: Rgb,
}

impl DirLight {
    pub fn new(dir: Vec3, radiance: Rgb) -> Self {
        DirLight { dir: dir.normalize(), radiance }
    }
}

/// Diffuse occluder standing in for the head.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sphere {
    pub center: Vec3,
    pub radius: f64,
    pub albedo: Rgb,
}

impl Sphere {
    pub fn intersect(&self, ray: &Ray, t_min: f64, t_max: f64) -> Option<f64> {
        let oc = ray.origin - self.center;
        let b = oc.dot(&ray.dir);
        let c = oc.norm_squared() - self.radius * self.radius;
        let disc = b * b - c;
        if disc < 0.0 {
            return None;
        }
        let s = disc.sqrt();
        [-b - s, -b + s].into_iter().find(|&t| t > t_min && t < t_max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SceneHit {
    Hair(Hit),
    Head { t: f64, normal: Vec3 },
}

impl SceneHit {
    pub fn t(&self) -> f64 {
        match self {
            SceneHit::Hair(h) => h.t,
            SceneHit::Head { t, .. } => *t,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Scene {
    pub segments: Vec<Segment>,
    pub lights: Vec<DirLight>,
    pub head: Option<Sphere>,
    pub background: Rgb,
    /// Radius of a single fiber.
    pub fiber_radius: f64,
    bvh: Bvh,
}

impl Scene {
    pub fn new(
        segments: Vec<Segment>,
        lights: Vec<DirLight>,
        head: Option<Sphere>,
        background: Rgb,
        fiber_radius: f64,
    ) -> Result<Scene> {
        if let Some(i) = segments.iter().position(|s| !s.is_finite() || !(s.w0 >= 0.0 && s.w1 >= 0.0)) {
            return Err(invalid(format!("segment {i} has non-finite data or negative width")));
        }
        if lights.iter().any(|l| (l.dir.norm() - 1.0).abs() > 1e-9 || !l.radiance.is_finite()) {
            return Err(invalid("light directions must be unit length"));
        }
        if !(fiber_radius > 0.0) {
            return Err(invalid("fiber radius must be positive"));
        }
        let bounds: Vec<_> = segments.iter().map(Segment::bounds).collect();
        let bvh = Bvh::build(&bounds);
        Ok(Scene { segments, lights, head, background, fiber_radius, bvh })
    }

    pub fn has_thick(&self) -> bool {
        self.segments.iter().any(|s| s.thick.is_some())
    }

    fn hit_segment(&self, ray: &Ray, i: u32, t_min: f64, t_max: f64) -> Option<Hit> {
        let s = &self.segments[i as usize];
        intersect_ribbon(ray, s, &ray.dir, t_min, t_max).map(|(t, u, v)| Hit { t, u, v, segment: i })
    }

    /// Nearest hair hit, skipping segments of hair `skip`.
    pub fn closest_hair(&self, ray: &Ray, t_min: f64, t_max: f64, skip: Option<u32>) -> Option<Hit> {
        let mut best: Option<Hit> = None;
        self.bvh.traverse(ray, t_min, t_max, |i, tm| {
            if skip == Some(self.segments[i as usize].hair) {
                return None;
            }
            let h = self.hit_segment(ray, i, t_min, tm)?;
            // ties go to the lower segment index so traversal order never matters
            if best.map_or(true, |b| h.t < b.t || (h.t == b.t && h.segment < b.segment)) {
                best = Some(h);
            }
            Some(h.t)
        });
        best
    }

    pub fn closest(&self, ray: &Ray, t_min: f64, t_max: f64, skip: Option<u32>) -> Option<SceneHit> {
        let hair = self.closest_hair(ray, t_min, t_max, skip);
        let t_hair = hair.map_or(t_max, |h| h.t);
        if let Some(head) = &self.head {
            if let Some(t) = head.intersect(ray, t_min, t_hair) {
                let normal = (ray.at(t) - head.center).normalize();
                return Some(SceneHit::Head { t, normal });
            }
        }
        hair.map(SceneHit::Hair)
    }

    /// Every hair hit in `(t_min, t_max)`, sorted by segment index.
    pub fn all_hair_hits(&self, ray: &Ray, t_min: f64, t_max: f64, skip: Option<u32>) -> Vec<Hit> {
        let mut out = Vec::new();
        self.bvh.traverse(ray, t_min, t_max, |i, _| {
            if skip != Some(self.segments[i as usize].hair) {
                if let Some(h) = self.hit_segment(ray, i, t_min, t_max) {
                    out.push(h);
                }
            }
            None
        });
        out.sort_by_key(|h| h.segment);
        out
    }

    /// Reference all-hits query without the BVH.
    pub fn all_hair_hits_brute(&self, ray: &Ray, t_min: f64, t_max: f64, skip: Option<u32>) -> Vec<Hit> {
        (0..self.segments.len() as u32)
            .filter(|&i| skip != Some(self.segments[i as usize].hair))
            .filter_map(|i| self.hit_segment(ray, i, t_min, t_max))
            .collect()
    }

    pub fn any_hit(&self, ray: &Ray, t_min: f64, t_max: f64, skip: Option<u32>) -> bool {
        if let Some(head) = &self.head {
            if head.intersect(ray, t_min, t_max).is_some() {
                return true;
            }
        }
        let mut found = false;
        self.bvh.traverse(ray, t_min, t_max, |i, tm| {
            if found || skip == Some(self.segments[i as usize].hair) {
                return None;
            }
            if self.hit_segment(ray, i, t_min, tm).is_some() {
                found = true;
                // collapse the interval so traversal stops
                return Some(f64::NEG_INFINITY);
            }
            None
        });
        found
    }

    /// Hair count crossed by a ray through a thick ribbon at hit `h`.
    pub fn thick_crossing_count(&self, h: &Hit) -> Result<Option<(f64, f64)>> {
        let s = &self.segments[h.segment as usize];
        let Some(p) = s.thick else { return Ok(None) };
        let l_t = s.depth_extent_at(h.v).unwrap_or(0.0);
        let chord = l_t * (1.0 - (2.0 * h.u - 1.0).powi(2)).max(0.0).sqrt();
        let w = s.width_at(h.v);
        estimate_density_and_n(p.n_total as f64, self.fiber_radius, 0.5 * w, 0.5 * l_t, chord).map(Some)
    }
}

/// Transmittance toward a directional light and the number of hairs crossed.
///
/// Single hairs each contribute `a_F` at the difference angle of the
/// straight-through direction about the local tangent. Thick hairs contribute
/// `a_F^n` with `n` from the density estimate at the crossing.
pub fn shadow_transmittance(
    point: &Vec3,
    light: &DirLight,
    scene: &Scene,
    tables: &AttenuationTables,
    skip: Option<u32>,
) -> Result<(Rgb, f64)> {
    let ray = Ray { origin: *point, dir: light.dir };
    if let Some(head) = &scene.head {
        if head.intersect(&ray, 1e-9 * head.radius, f64::INFINITY).is_some() {
            return Ok((Rgb::ZERO, 0.0));
        }
    }
    let mut a = Rgb::ONE;
    let mut count = 0.0;
    for h in scene.all_hair_hits(&ray, 0.0, f64::INFINITY, skip) {
        let s = &scene.segments[h.segment as usize];
        let frame = FiberFrame::new(s.tangent_at(h.v));
        let angles = ScatterAngles::from_directions(&frame, &light.dir, &-light.dir);
        let a_f = tables.lookup(angles.theta_d()).a_f;
        match scene.thick_crossing_count(&h)? {
            None => {
                a *= a_f;
                count += 1.0;
            }
            Some((_, n)) => {
                a *= a_f.powf(n);
                count += n;
            }
        }
    }
    Ok((a, count))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::render::ribbon::ThickPayload;
    use crate::scatter::{build_tables, FiberBsdfParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_scene(n: usize, seed: u64) -> Scene {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let segs = (0..n)
            .map(|i| {
                let p0 = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let d = Vec3::new(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2));
                let t = d.normalize();
                Segment::single(p0, p0 + d, t, t, rng.gen_range(0.005..0.05), i as u32)
            })
            .collect();
        Scene::new(segs, vec![], None, Rgb::ZERO, 1e-3).unwrap()
    }

    #[test]
    fn bvh_all_hits_match_brute_force() {
        let scene = random_scene(1000, 11);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut total = 0;
        for _ in 0..500 {
            let o = Vec3::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5), 3.0);
            let target = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let ray = Ray { origin: o, dir: (target - o).normalize() };
            let a = scene.all_hair_hits(&ray, 0.0, f64::INFINITY, None);
            let mut b = scene.all_hair_hits_brute(&ray, 0.0, f64::INFINITY, None);
            b.sort_by_key(|h| h.segment);
            assert_eq!(a, b);
            total += a.len();
            let closest = b.iter().min_by(|x, y| x.t.total_cmp(&y.t).then(x.segment.cmp(&y.segment)));
            assert_eq!(scene.closest_hair(&ray, 0.0, f64::INFINITY, None).map(|h| h.segment), closest.map(|h| h.segment));
            assert_eq!(scene.any_hit(&ray, 0.0, f64::INFINITY, None), !b.is_empty());
        }
        assert!(total > 200);
    }

    #[test]
    fn far_ray_misses() {
        let scene = random_scene(100, 1);
        let ray = Ray { origin: Vec3::new(50.0, 50.0, 50.0), dir: Vec3::x() };
        assert!(scene.closest_hair(&ray, 0.0, f64::INFINITY, None).is_none());
        assert!(!scene.any_hit(&ray, 0.0, f64::INFINITY, None));
    }

    #[test]
    fn single_segment_scene() {
        let s = Segment::single(Vec3::new(-1.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0), Vec3::x(), Vec3::x(), 0.1, 0);
        let scene = Scene::new(vec![s], vec![], None, Rgb::ZERO, 1e-3).unwrap();
        let ray = Ray { origin: Vec3::new(0.2, 0.01, 2.0), dir: -Vec3::z() };
        let direct = intersect_ribbon(&ray, &s, &ray.dir, 0.0, f64::INFINITY).unwrap();
        let h = scene.closest_hair(&ray, 0.0, f64::INFINITY, None).unwrap();
        assert_eq!((h.t, h.u, h.v), direct);
    }

    fn tables() -> AttenuationTables {
        build_tables(&FiberBsdfParams::preset("brown").unwrap(), 64).unwrap()
    }

    #[test]
    fn transmittance_basics() {
        let t = tables();
        let light = DirLight::new(Vec3::z(), Rgb::ONE);
        let empty = Scene::new(vec![], vec![light], None, Rgb::ZERO, 1e-3).unwrap();
        assert_eq!(shadow_transmittance(&Vec3::zeros(), &light, &empty, &t, None).unwrap(), (Rgb::ONE, 0.0));

        let tangent = Vec3::new(1.0, 0.0, 0.4).normalize();
        let s = Segment::single(Vec3::new(-1.0, 0.0, 0.6), Vec3::new(1.0, 0.0, 1.4), tangent, tangent, 0.1, 0);
        let scene = Scene::new(vec![s], vec![light], None, Rgb::ZERO, 1e-3).unwrap();
        let (a, n) = shadow_transmittance(&Vec3::zeros(), &light, &scene, &t, None).unwrap();
        let theta = tangent.z.asin();
        assert_eq!(n, 1.0);
        assert!(a.max_abs_diff(t.lookup(2.0 * theta).a_f) < 1e-12);

        let head = Sphere { center: Vec3::new(0.0, 0.0, 5.0), radius: 1.0, albedo: Rgb::ONE };
        let scene = Scene::new(vec![], vec![light], Some(head), Rgb::ZERO, 1e-3).unwrap();
        assert_eq!(shadow_transmittance(&Vec3::zeros(), &light, &scene, &t, None).unwrap().0, Rgb::ZERO);
    }

    fn thick(z: f64, n_total: u32, w: f64, l_t: f64, hair: u32) -> Segment {
        let mut s = Segment::single(Vec3::new(-1.0, 0.0, z), Vec3::new(1.0, 0.0, z), Vec3::x(), Vec3::x(), w, hair);
        s.thick = Some(ThickPayload { n_total, l_t: [l_t, l_t] });
        s
    }

    #[test]
    fn thick_crossing_matches_stacked_singles() {
        let t = tables();
        let r = 1e-3;
        let light = DirLight::new(Vec3::new(0.3, 0.0, 1.0), Rgb::ONE);
        // 41 hairs in a 0.01 x 0.01 ellipse put about three on the center chord
        let (w, l_t, n_total) = (0.02, 0.02, 41);
        let scene = Scene::new(vec![thick(1.0, n_total, w, l_t, 0)], vec![light], None, Rgb::ZERO, r).unwrap();
        let (a, n) = shadow_transmittance(&Vec3::zeros(), &light, &scene, &t, None).unwrap();
        let (_, n_ref) = estimate_density_and_n(n_total as f64, r, w / 2.0, l_t / 2.0, l_t).unwrap();
        assert!((n - n_ref).abs() < 1e-9);

        let k = n.round() as u32;
        let singles: Vec<_> = (0..k).map(|i| Segment { thick: None, ..thick(1.0 + 0.1 * i as f64, 1, w, l_t, i + 1) }).collect();
        let stacked = Scene::new(singles, vec![light], None, Rgb::ZERO, r).unwrap();
        let (b, m) = shadow_transmittance(&Vec3::zeros(), &light, &stacked, &t, None).unwrap();
        assert_eq!(m, k as f64);
        for c in 0..3 {
            assert!((a.0[c] - b.0[c]).abs() <= 0.1 * b.0[c], "{a:?} vs {b:?} at n = {n}");
        }
    }

    #[test]
    fn transmittance_is_multiplicative() {
        let t = tables();
        let light = DirLight::new(Vec3::new(0.2, 0.0, 1.0), Rgb::ONE);
        let r = 1e-3;
        let one = Scene::new(vec![thick(1.0, 40, 0.02, 0.03, 0)], vec![light], None, Rgb::ZERO, r).unwrap();
        let (a, n) = shadow_transmittance(&Vec3::zeros(), &light, &one, &t, None).unwrap();
        let two = Scene::new(
            vec![thick(1.0, 40, 0.02, 0.03, 0), thick(2.0, 40, 0.02, 0.03, 1)],
            vec![light],
            None,
            Rgb::ZERO,
            r,
        )
        .unwrap();
        let (b, m) = shadow_transmittance(&Vec3::zeros(), &light, &two, &t, None).unwrap();
        assert!(n > 1.0);
        assert!((m - 2.0 * n).abs() < 1e-12);
        for c in 0..3 {
            assert!((b.0[c] - a.0[c] * a.0[c]).abs() < 1e-9);
        }
    }
}
