//! Tile-parallel ray shooting and the path-tracing reference.

use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::camera::{Camera, CameraFrame, Ray};
use super::image::Image;
use super::scene::{Scene, SceneHit};
use super::shade::{shade_ray, Shading};
use crate::error::{invalid, Result};
use crate::math::{FiberFrame, Rgb, ScatterAngles, Vec3};
use crate::scatter::{eval_single_angles, FiberBsdfParams};

pub const TILE: u32 = 16;
pub const DEFAULT_MAX_BOUNCES: u32 = 70;
const RR_DEPTH: u32 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RenderMode {
    /// Every hair is a single fiber shaded with dual scattering.
    DsFull,
    /// Thick hairs use the aggregated model; singletons fall back to the
    /// single-fiber path.
    LodAggregated,
}

/// Renders every pixel through `sample`, which receives the camera ray for a
/// jittered sample position and the tile's random stream.
fn render_tiles<F>(cam: &CameraFrame, spp: u32, seed: u64, sample: F) -> Result<Image>
where
    F: Fn(&Ray, &mut ChaCha8Rng) -> Result<Rgb> + Sync,
{
    if spp == 0 {
        return Err(invalid("spp must be at least 1"));
    }
    let (w, h) = (cam.width, cam.height);
    let tx = w.div_ceil(TILE);
    let ty = h.div_ceil(TILE);
    let tiles: Vec<Vec<(u32, u32, Rgb)>> = (0..tx * ty)
        .into_par_iter()
        .map(|tile| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(tile as u64);
            let (x0, y0) = ((tile % tx) * TILE, (tile / tx) * TILE);
            let mut px = Vec::with_capacity((TILE * TILE) as usize);
            for y in y0..(y0 + TILE).min(h) {
                for x in x0..(x0 + TILE).min(w) {
                    let mut acc = Rgb::ZERO;
                    for _ in 0..spp {
                        let (jx, jy): (f64, f64) = (rng.gen(), rng.gen());
                        let ray = cam.ray(x as f64 + jx, y as f64 + jy);
                        acc += sample(&ray, &mut rng)?;
                    }
                    px.push((x, y, acc / spp as f64));
                }
            }
            Ok(px)
        })
        .collect::<Result<_>>()?;
    let mut img = Image::new(w, h);
    for (x, y, c) in tiles.into_iter().flatten() {
        img.set(x, y, c);
    }
    Ok(img)
}

/// Direct lighting with dual scattering for single hairs and the aggregated
/// model for thick hairs.
pub fn render_ray_shoot(
    scene: &Scene,
    camera: &Camera,
    sh: &Shading,
    mode: RenderMode,
    spp: u32,
    seed: u64,
) -> Result<Image> {
    if mode == RenderMode::DsFull && scene.has_thick() {
        return Err(invalid("ds-full rendering needs a scene of single hairs"));
    }
    let cam = camera.frame()?;
    render_tiles(&cam, spp, seed, |ray, _| shade_ray(scene, sh, ray))
}

fn uniform_sphere(rng: &mut ChaCha8Rng) -> Vec3 {
    let z: f64 = 1.0 - 2.0 * rng.gen::<f64>();
    let r = (1.0 - z * z).max(0.0).sqrt();
    let phi = 2.0 * PI * rng.gen::<f64>();
    Vec3::new(r * phi.cos(), r * phi.sin(), z)
}

/// One path-traced radiance sample.
fn trace_path(scene: &Scene, p: &FiberBsdfParams, ray: &Ray, max_bounces: u32, rng: &mut ChaCha8Rng) -> Rgb {
    let mut ray = *ray;
    let mut beta = Rgb::ONE;
    let mut radiance = Rgb::ZERO;
    let mut skip = None;
    for depth in 0..=max_bounces {
        let hit = match scene.closest(&ray, 0.0, f64::INFINITY, skip) {
            None => {
                if depth == 0 {
                    radiance += scene.background;
                }
                break;
            }
            Some(h) => h,
        };
        let (h, seg) = match hit {
            SceneHit::Head { t, normal } => {
                // the head only receives direct light; paths end there
                let head = scene.head.as_ref().expect("head hit without head");
                let x = ray.at(t) + normal * (1e-7 * head.radius);
                for light in &scene.lights {
                    let c = normal.dot(&light.dir);
                    if c > 0.0 && !scene.any_hit(&Ray { origin: x, dir: light.dir }, 0.0, f64::INFINITY, None) {
                        radiance += beta * head.albedo * light.radiance * (c / PI);
                    }
                }
                break;
            }
            SceneHit::Hair(h) => (h, &scene.segments[h.segment as usize]),
        };
        let x = ray.at(h.t);
        let frame = FiberFrame::new(seg.tangent_at(h.v));
        let wo = -ray.dir;
        for light in &scene.lights {
            let shadow = Ray { origin: x, dir: light.dir };
            if !scene.any_hit(&shadow, 0.0, f64::INFINITY, Some(seg.hair)) {
                let a = ScatterAngles::from_directions(&frame, &light.dir, &wo);
                radiance += beta * light.radiance * eval_single_angles(p, &a) * a.theta_i.cos();
            }
        }
        if depth == max_bounces {
            break;
        }
        let wi = uniform_sphere(rng);
        let a = ScatterAngles::from_directions(&frame, &wi, &wo);
        beta *= eval_single_angles(p, &a) * (a.theta_i.cos() * 4.0 * PI);
        if depth + 1 >= RR_DEPTH {
            let q = beta.luminance().clamp(0.0, 1.0);
            if q <= 0.0 || rng.gen::<f64>() >= q {
                break;
            }
            beta = beta / q;
        }
        ray = Ray { origin: x, dir: wi };
        skip = Some(seg.hair);
    }
    radiance
}

/// Reference renderer: unidirectional path tracing over single fibers with
/// uniform sphere sampling and next-event estimation toward each light.
pub fn render_path_trace(
    scene: &Scene,
    camera: &Camera,
    params: &FiberBsdfParams,
    spp: u32,
    max_bounces: u32,
    seed: u64,
) -> Result<Image> {
    if scene.has_thick() {
        return Err(invalid("the path tracer renders single fibers only"));
    }
    params.validate()?;
    let cam = camera.frame()?;
    render_tiles(&cam, spp, seed, |ray, rng| Ok(trace_path(scene, params, ray, max_bounces, rng)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::render::ribbon::Segment;
    use crate::render::scene::DirLight;
    use crate::scatter::build_tables;

    fn camera(n: u32) -> Camera {
        Camera::new(Vec3::new(0.0, 0.0, 4.0), Vec3::zeros(), Vec3::y(), 0.6, n, n)
    }

    fn fibers(count: usize, seed: u64) -> Vec<Segment> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|i| {
                let y = rng.gen_range(-0.5..0.5);
                let z = rng.gen_range(-0.2..0.2);
                Segment::single(Vec3::new(-1.0, y, z), Vec3::new(1.0, y, z), Vec3::x(), Vec3::x(), 0.03, i as u32)
            })
            .collect()
    }

    fn shading() -> Shading {
        let p = FiberBsdfParams::preset("brown").unwrap();
        Shading::new(p, build_tables(&p, 64).unwrap())
    }

    #[test]
    fn ray_shoot_is_deterministic() {
        let scene = Scene::new(fibers(40, 1), vec![DirLight::new(Vec3::new(0.2, 0.5, 1.0), Rgb::ONE)], None, Rgb::ZERO, 0.015).unwrap();
        let a = render_ray_shoot(&scene, &camera(32), &shading(), RenderMode::DsFull, 2, 9).unwrap();
        let b = render_ray_shoot(&scene, &camera(32), &shading(), RenderMode::DsFull, 2, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.mean_luminance() > 0.0);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let c = pool.install(|| render_ray_shoot(&scene, &camera(32), &shading(), RenderMode::DsFull, 2, 9).unwrap());
        assert_eq!(a, c);
    }

    #[test]
    fn no_lights_gives_background() {
        let bg = Rgb::new(0.1, 0.2, 0.3);
        let scene = Scene::new(fibers(40, 1), vec![], None, bg, 0.015).unwrap();
        let img = render_ray_shoot(&scene, &camera(16), &shading(), RenderMode::DsFull, 1, 0).unwrap();
        for p in img.pixels() {
            assert!(p == Rgb::ZERO || p.max_abs_diff(bg) < 1e-7);
        }
        assert!(img.pixels().any(|p| p.max_abs_diff(bg) < 1e-7));
    }

    #[test]
    fn path_trace_without_hair_is_background() {
        let bg = Rgb::new(0.25, 0.5, 0.125);
        let scene = Scene::new(vec![], vec![DirLight::new(Vec3::z(), Rgb::ONE)], None, bg, 0.01).unwrap();
        let img = render_path_trace(&scene, &camera(8), &shading().params, 3, 70, 1).unwrap();
        assert!(img.pixels().all(|p| p.max_abs_diff(bg) < 1e-7));
    }

    #[test]
    fn path_trace_rejects_thick_and_zero_spp() {
        let mut segs = fibers(2, 0);
        segs[0].thick = Some(crate::render::ribbon::ThickPayload { n_total: 4, l_t: [0.1, 0.1] });
        let scene = Scene::new(segs, vec![], None, Rgb::ZERO, 0.01).unwrap();
        assert!(render_path_trace(&scene, &camera(8), &shading().params, 1, 70, 1).is_err());
        assert!(render_ray_shoot(&scene, &camera(8), &shading(), RenderMode::DsFull, 1, 1).is_err());
        let scene = Scene::new(fibers(2, 0), vec![], None, Rgb::ZERO, 0.01).unwrap();
        assert!(render_ray_shoot(&scene, &camera(8), &shading(), RenderMode::DsFull, 0, 1).is_err());
    }
}
