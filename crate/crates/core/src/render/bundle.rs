//! Straight fiber bundles with an elliptical cross-section, the averaged
//! path-traced reference, and the matching single thick-fiber stand-in.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::camera::Camera;
use super::image::Image;
use super::ribbon::{Segment, ThickPayload};
use super::scene::{DirLight, Scene};
use super::shade::Shading;
use super::trace::{render_path_trace, render_ray_shoot, RenderMode, DEFAULT_MAX_BOUNCES};
use crate::error::{invalid, Result};
use crate::math::{Rgb, Vec3};
use crate::scatter::FiberBsdfParams;

/// Bundle along the x axis. The semi-major axis points at the camera (z),
/// the semi-minor axis is vertical on screen (y).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BundleParams {
    pub fibers: usize,
    pub radius: f64,
    pub semi_major: f64,
    pub semi_minor: f64,
    pub length: f64,
}

impl Default for BundleParams {
    fn default() -> Self {
        let r = 5e-5;
        BundleParams { fibers: 64, radius: r, semi_major: 32.0 * r, semi_minor: 8.0 * r, length: 80.0 * r }
    }
}

impl BundleParams {
    pub fn density(&self) -> f64 {
        self.fibers as f64 * self.radius * self.radius / (self.semi_major * self.semi_minor)
    }

    pub fn validate(&self) -> Result<()> {
        if self.fibers == 0 || !(self.radius > 0.0) || !(self.length > 0.0) {
            return Err(invalid("bundle needs fibers, a positive radius and a positive length"));
        }
        if !(self.semi_minor > self.radius && self.semi_major >= self.semi_minor) {
            return Err(invalid("bundle semi-axes must exceed the fiber radius, major >= minor"));
        }
        if self.density() > 1.0 {
            return Err(invalid(format!("{} fibers cannot fit: density {:.3} > 1", self.fibers, self.density())));
        }
        Ok(())
    }

    /// Camera 2000 radii away that frames the bundle length with a margin.
    pub fn camera(&self, size: u32) -> Camera {
        let dist = 2000.0 * self.radius;
        let half = 0.625 * self.length;
        Camera::new(Vec3::new(0.0, 0.0, dist), Vec3::zeros(), Vec3::y(), 2.0 * (half / dist).atan(), size, size)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lighting {
    Frontlit,
    Backlit,
    Toplit,
}

impl Lighting {
    pub const ALL: [Lighting; 3] = [Lighting::Frontlit, Lighting::Backlit, Lighting::Toplit];

    /// Unit direction toward the light. Front and back lights sit on the view
    /// axis; the top light is 75 degrees off it, above the bundle.
    pub fn direction(self) -> Vec3 {
        match self {
            Lighting::Frontlit => Vec3::z(),
            Lighting::Backlit => -Vec3::z(),
            Lighting::Toplit => {
                let a = 75f64.to_radians();
                Vec3::new(0.0, a.sin(), a.cos())
            }
        }
    }

    pub fn light(self) -> DirLight {
        DirLight::new(self.direction(), Rgb::ONE)
    }
}

/// Random non-overlapping fiber centers inside the ellipse.
pub fn bundle_instance(p: &BundleParams, seed: u64) -> Result<Vec<Segment>> {
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b, r) = (p.semi_major - p.radius, p.semi_minor - p.radius, p.radius);
    let mut centers: Vec<(f64, f64)> = Vec::with_capacity(p.fibers);
    let mut tries = 0usize;
    while centers.len() < p.fibers {
        tries += 1;
        if tries > 200_000 * p.fibers {
            return Err(invalid(format!("could not place {} non-overlapping fibers", p.fibers)));
        }
        let y = rng.gen_range(-b..=b);
        let z = rng.gen_range(-a..=a);
        if (y / b).powi(2) + (z / a).powi(2) > 1.0 {
            continue;
        }
        if centers.iter().any(|&(cy, cz)| (cy - y).powi(2) + (cz - z).powi(2) < 4.0 * r * r) {
            continue;
        }
        centers.push((y, z));
    }
    let h = 0.5 * p.length;
    Ok(centers
        .into_iter()
        .enumerate()
        .map(|(i, (y, z))| Segment::single(Vec3::new(-h, y, z), Vec3::new(h, y, z), Vec3::x(), Vec3::x(), 2.0 * r, i as u32))
        .collect())
}

/// One thick ribbon covering the whole bundle.
pub fn thick_bundle(p: &BundleParams) -> Result<Segment> {
    p.validate()?;
    let h = 0.5 * p.length;
    let mut s = Segment::single(Vec3::new(-h, 0.0, 0.0), Vec3::new(h, 0.0, 0.0), Vec3::x(), Vec3::x(), 2.0 * p.semi_minor, 0);
    s.thick = Some(ThickPayload { n_total: p.fibers as u32, l_t: [2.0 * p.semi_major; 2] });
    Ok(s)
}

pub fn bundle_scene(segments: Vec<Segment>, p: &BundleParams, lighting: Lighting) -> Result<Scene> {
    Scene::new(segments, vec![lighting.light()], None, Rgb::ZERO, p.radius)
}

/// Mean of path-traced renders, one per instance seed. Each instance is
/// rendered with its own seed as the sampling seed.
pub fn render_bundle_oracle_seeds(
    p: &BundleParams,
    seeds: &[u64],
    lighting: Lighting,
    params: &FiberBsdfParams,
    size: u32,
    spp: u32,
) -> Result<Image> {
    let cam = p.camera(size);
    let images = seeds
        .iter()
        .map(|&s| {
            let scene = bundle_scene(bundle_instance(p, s)?, p, lighting)?;
            render_path_trace(&scene, &cam, params, spp, DEFAULT_MAX_BOUNCES, s)
        })
        .collect::<Result<Vec<_>>>()?;
    Image::average(&images)
}

/// Seeds of the instances used by [`render_bundle_oracle`].
pub fn instance_seeds(instances: usize, seed: u64) -> Vec<u64> {
    (0..instances as u64).map(|i| seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i)).collect()
}

pub fn render_bundle_oracle(
    p: &BundleParams,
    instances: usize,
    lighting: Lighting,
    params: &FiberBsdfParams,
    size: u32,
    spp: u32,
    seed: u64,
) -> Result<Image> {
    if instances == 0 {
        return Err(invalid("need at least one bundle instance"));
    }
    render_bundle_oracle_seeds(p, &instance_seeds(instances, seed), lighting, params, size, spp)
}

/// The bundle rendered as one thick fiber.
pub fn render_bundle_thick(p: &BundleParams, lighting: Lighting, sh: &Shading, size: u32, spp: u32, seed: u64) -> Result<Image> {
    let scene = bundle_scene(vec![thick_bundle(p)?], p, lighting)?;
    render_ray_shoot(&scene, &p.camera(size), sh, RenderMode::LodAggregated, spp, seed)
}
