use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::math::{Rgb, Vec3};
use crate::render::{Camera, DirLight, RenderMode, Sphere, ThickModel};
use crate::runtime::DEFAULT_EPS_W;
use crate::scatter::FiberBsdfParams;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LightConfig {
    /// Direction toward the light.
    pub dir: [f64; 3],
    #[serde(default = "unit_radiance")]
    pub radiance: [f64; 3],
}

fn unit_radiance() -> [f64; 3] {
    [1.0; 3]
}

impl LightConfig {
    pub fn light(&self) -> Result<DirLight> {
        let d = Vec3::from(self.dir);
        if !(d.norm() > 0.0) || !d.iter().all(|c| c.is_finite()) {
            return Err(invalid("light direction must be finite and nonzero"));
        }
        if !self.radiance.iter().all(|c| c.is_finite() && *c >= 0.0) {
            return Err(invalid("light radiance must be finite and non-negative"));
        }
        Ok(DirLight::new(d, Rgb(self.radiance)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeadConfig {
    pub center: [f64; 3],
    pub radius: f64,
    #[serde(default = "head_albedo")]
    pub albedo: [f64; 3],
}

fn head_albedo() -> [f64; 3] {
    [0.6, 0.45, 0.4]
}

impl HeadConfig {
    pub fn sphere(&self) -> Result<Sphere> {
        if !(self.radius > 0.0) {
            return Err(invalid("head radius must be positive"));
        }
        Ok(Sphere { center: Vec3::from(self.center), radius: self.radius, albedo: Rgb(self.albedo) })
    }
}

/// Render and sequence settings. Relative paths resolve against the config
/// file's directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub hierarchy: Option<PathBuf>,
    pub camera: Option<Camera>,
    pub camera_path: Option<PathBuf>,
    pub preset: String,
    pub mode: RenderMode,
    pub thick_model: ThickModel,
    pub spp: u32,
    pub seed: u64,
    pub eps_w: f64,
    /// Empty means one unit light 45 degrees off the view direction.
    pub lights: Vec<LightConfig>,
    pub head: Option<HeadConfig>,
    pub background: [f64; 3],
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            hierarchy: None,
            camera: None,
            camera_path: None,
            preset: "brown".into(),
            mode: RenderMode::LodAggregated,
            thick_model: ThickModel::Ours,
            spp: 4,
            seed: 0,
            eps_w: DEFAULT_EPS_W,
            lights: Vec::new(),
            head: None,
            background: [0.0; 3],
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let mut c: RunConfig = serde_json::from_str(&fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut c.hierarchy, &mut c.camera_path].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.spp == 0 {
            return Err(invalid("spp must be at least 1"));
        }
        if !(self.eps_w > 0.0) {
            return Err(invalid("eps_w must be positive"));
        }
        FiberBsdfParams::preset(&self.preset)?;
        for l in &self.lights {
            l.light()?;
        }
        if let Some(h) = &self.head {
            h.sphere()?;
        }
        if let Some(c) = &self.camera {
            c.frame()?;
        }
        for p in [&self.hierarchy, &self.camera_path].into_iter().flatten() {
            if !p.exists() {
                return Err(invalid(format!("{} does not exist", p.display())));
            }
        }
        Ok(())
    }

    pub fn lights_for(&self, camera: &Camera) -> Result<Vec<DirLight>> {
        if self.lights.is_empty() {
            return Ok(vec![default_light(camera)]);
        }
        self.lights.iter().map(LightConfig::light).collect()
    }
}

/// Unit white light rotated 45 degrees about the camera's up axis away from
/// the view direction.
pub fn default_light(camera: &Camera) -> DirLight {
    let to_cam = (Vec3::from(camera.position) - Vec3::from(camera.look_at)).normalize();
    let up = Vec3::from(camera.up);
    let side = up.cross(&to_cam).try_normalize(1e-12).unwrap_or_else(|| crate::math::any_perpendicular(&to_cam));
    let a = std::f64::consts::FRAC_PI_4;
    DirLight::new(to_cam * a.cos() + side * a.sin(), Rgb::ONE)
}

pub fn read_camera(path: &Path) -> Result<Camera> {
    let c: Camera = serde_json::from_str(&fs::read_to_string(path)?)?;
    c.frame()?;
    Ok(c)
}

/// JSON array of camera records.
pub fn read_camera_path(path: &Path) -> Result<Vec<Camera>> {
    let cams: Vec<Camera> = serde_json::from_str(&fs::read_to_string(path)?)?;
    if cams.is_empty() {
        return Err(invalid("camera path is empty"));
    }
    for (i, c) in cams.iter().enumerate() {
        c.frame().map_err(|e| invalid(format!("camera {i}: {e}")))?;
    }
    Ok(cams)
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_config_defaults_and_unknown_fields() {
        let c: RunConfig = serde_json::from_str(r#"{"spp": 8, "mode": "ds-full"}"#).unwrap();
        assert_eq!(c.spp, 8);
        assert_eq!(c.mode, RenderMode::DsFull);
        assert_eq!(c.preset, "brown");
        c.validate().unwrap();
        assert!(serde_json::from_str::<RunConfig>(r#"{"spp_count": 8}"#).is_err());
        let bad = RunConfig { spp: 0, ..Default::default() };
        assert!(bad.validate().is_err());
        let missing = RunConfig { hierarchy: Some("/nonexistent/x.hlod".into()), ..Default::default() };
        assert!(missing.validate().is_err());
    }

    #[test]
    fn default_light_is_45_degrees_off_view() {
        let cam = Camera::new(Vec3::new(0.0, 0.0, 3.0), Vec3::zeros(), Vec3::y(), 0.5, 8, 8);
        let l = default_light(&cam);
        assert!((l.dir.dot(&Vec3::z()) - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(l.dir.y.abs() < 1e-12);
    }
}
