//! Direct lighting for the ray-shooting renderer.

use std::f64::consts::PI;

use super::camera::Ray;
use super::ribbon::Hit;
use super::scene::{DirLight, Scene, SceneHit};
use crate::error::Result;
use crate::math::{FiberFrame, Rgb, ScatterAngles, Vec3};
use crate::scatter::{
    dual_lobes, eval_aggregated_lobes, eval_aggregated_prior_lobes, eval_single_angles, AggregateContext,
    AggregateOptions, AggregatedLobes, AttenuationTables, FiberBsdfParams,
};

/// Which aggregated model shades thick hairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThickModel {
    #[default]
    Ours,
    Prior,
}

/// Fiber appearance plus the switches of the aggregated model.
#[derive(Clone, Debug)]
pub struct Shading {
    pub params: FiberBsdfParams,
    pub tables: AttenuationTables,
    pub thick_model: ThickModel,
    pub options: AggregateOptions,
}

impl Shading {
    pub fn new(params: FiberBsdfParams, tables: AttenuationTables) -> Self {
        Shading { params, tables, thick_model: ThickModel::Ours, options: AggregateOptions::default() }
    }

    fn thick_lobes(&self, ctx: &AggregateContext) -> AggregatedLobes {
        match self.thick_model {
            ThickModel::Ours => eval_aggregated_lobes(&self.params, &self.tables, ctx, &self.options),
            ThickModel::Prior => eval_aggregated_prior_lobes(&self.params, &self.tables, ctx),
        }
    }
}

/// Offset for rays leaving the head surface.
const HEAD_EPS: f64 = 1e-7;

/// Light path toward `light`: `None` when the head blocks it, otherwise the
/// transmittance and crossed-hair count.
pub(crate) fn light_path(
    point: &Vec3,
    light: &DirLight,
    scene: &Scene,
    tables: &AttenuationTables,
    skip: Option<u32>,
) -> Result<Option<(Rgb, f64)>> {
    if let Some(head) = &scene.head {
        let ray = Ray { origin: *point, dir: light.dir };
        if head.intersect(&ray, HEAD_EPS * head.radius, f64::INFINITY).is_some() {
            return Ok(None);
        }
    }
    super::scene::shadow_transmittance(point, light, scene, tables, skip).map(Some)
}

/// Radiance leaving a hair hit toward `-ray.dir`.
pub fn shade_hair(scene: &Scene, sh: &Shading, ray: &Ray, h: &Hit) -> Result<Rgb> {
    let seg = &scene.segments[h.segment as usize];
    let frame = FiberFrame::new(seg.tangent_at(h.v));
    let wo = -ray.dir;
    let p = ray.at(h.t);
    let thick = match seg.thick {
        Some(t) if t.n_total > 1 => scene.thick_crossing_count(h)?,
        _ => None,
    };
    let mut out = Rgb::ZERO;
    for light in &scene.lights {
        let Some((a_path, n_f)) = light_path(&p, light, scene, &sh.tables, Some(seg.hair))? else {
            continue;
        };
        let angles = ScatterAngles::from_directions(&frame, &light.dir, &wo);
        let cos_i = angles.theta_i.cos();
        let dual = dual_lobes(&sh.tables, a_path, n_f, &angles);
        let f = match thick {
            None => {
                if n_f == 0.0 {
                    eval_single_angles(&sh.params, &angles) + dual.backward
                } else {
                    dual.forward + a_path * dual.backward
                }
            }
            Some((rho, n)) => {
                let lobes = sh.thick_lobes(&AggregateContext::new(n, rho, angles)?);
                if n_f == 0.0 {
                    lobes.value()
                } else {
                    dual.forward + a_path * lobes.s * lobes.b
                }
            }
        };
        out += light.radiance * f * cos_i;
    }
    Ok(out)
}

/// Lambertian head with hair shadows.
pub fn shade_head(scene: &Scene, sh: &Shading, p: &Vec3, normal: &Vec3) -> Result<Rgb> {
    let Some(head) = &scene.head else { return Ok(Rgb::ZERO) };
    let origin = p + normal * (HEAD_EPS * head.radius);
    let mut out = Rgb::ZERO;
    for light in &scene.lights {
        let c = normal.dot(&light.dir);
        if c <= 0.0 {
            continue;
        }
        if let Some((a, _)) = light_path(&origin, light, scene, &sh.tables, None)? {
            out += head.albedo * light.radiance * a * (c / PI);
        }
    }
    Ok(out)
}

/// Radiance along a camera ray.
pub fn shade_ray(scene: &Scene, sh: &Shading, ray: &Ray) -> Result<Rgb> {
    match scene.closest(ray, 0.0, f64::INFINITY, None) {
        None => Ok(scene.background),
        Some(SceneHit::Head { t, normal }) => shade_head(scene, sh, &ray.at(t), &normal),
        Some(SceneHit::Hair(h)) => shade_hair(scene, sh, ray, &h),
    }
}
