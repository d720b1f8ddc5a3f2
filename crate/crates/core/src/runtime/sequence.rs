use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::assemble::{assemble_strands, init_lod_levels, skin_and_assemble, AssembleOptions, Assembly};
use super::state::{LodState, DEFAULT_EPS_W};
use crate::error::{invalid, Result};
use crate::lod::LodHierarchy;
use crate::math::{Rgb, Vec3};
use crate::render::{render_ray_shoot, Camera, DirLight, Image, RenderMode, Scene, Shading, Sphere};

/// Guides rigidly rotated about their roots around the x axis, each with its
/// own phase. `amplitude` is the peak angle in radians.
pub fn sway_poses(rest: &[Vec<Vec3>], frame: usize, amplitude: f64, period: f64) -> Vec<Vec<Vec3>> {
    if amplitude == 0.0 {
        return rest.to_vec();
    }
    rest.iter()
        .enumerate()
        .map(|(g, pts)| {
            // golden-ratio phases spread the guides evenly
            let phase = 2.0 * PI * ((g as f64 * 0.618_033_988_75) % 1.0);
            let a = amplitude * (2.0 * PI * frame as f64 / period + phase).sin();
            let (s, c) = a.sin_cos();
            let root = pts[0];
            pts.iter()
                .map(|p| {
                    let d = p - root;
                    root + Vec3::new(d.x, c * d.y - s * d.z, s * d.y + c * d.z)
                })
                .collect()
        })
        .collect()
}

/// Cameras moving away from `target` along `dir` with geometrically spaced
/// distances from `d0` to `d1`.
pub fn dolly_path(target: Vec3, dir: Vec3, d0: f64, d1: f64, frames: usize, fov: f64, size: u32) -> Vec<Camera> {
    let dir = dir.normalize();
    (0..frames)
        .map(|f| {
            let t = if frames > 1 { f as f64 / (frames - 1) as f64 } else { 0.0 };
            let d = d0 * (d1 / d0).powf(t);
            Camera::new(target + dir * d, target, Vec3::y(), fov, size, size)
        })
        .collect()
}

/// Dolly toward `(0, 0.2, 1)` from a close view of the box `lo..hi` out to
/// `far_ratio` times that distance.
pub fn dolly_for_bounds(lo: Vec3, hi: Vec3, frames: usize, far_ratio: f64, fov: f64, size: u32) -> Vec<Camera> {
    let target = (lo + hi) * 0.5;
    let d0 = 0.3 * (hi - lo).norm() / (0.5 * fov).tan();
    dolly_path(target, Vec3::new(0.0, 0.2, 1.0), d0, d0 * far_ratio, frames, fov, size)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameStats {
    pub frame: usize,
    pub segments: usize,
    pub per_level: Vec<usize>,
    pub min_w: f64,
    pub max_w: f64,
    pub mean_w: f64,
}

impl FrameStats {
    pub fn from_assembly(frame: usize, n_levels: usize, a: &Assembly) -> Self {
        let mut per_level = vec![0; n_levels];
        let (mut lo, mut hi, mut sum) = (f64::INFINITY, 0.0f64, 0.0);
        for r in &a.records {
            per_level[r.level as usize] += 1;
            lo = lo.min(r.width);
            hi = hi.max(r.width);
            sum += r.width;
        }
        let n = a.records.len();
        FrameStats {
            frame,
            segments: n,
            per_level,
            min_w: if n > 0 { lo } else { 0.0 },
            max_w: hi,
            mean_w: if n > 0 { sum / n as f64 } else { 0.0 },
        }
    }
}

/// Everything in the scene besides the hair.
#[derive(Clone, Debug)]
pub struct Environment {
    pub lights: Vec<DirLight>,
    pub head: Option<Sphere>,
    pub background: Rgb,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SequenceOptions {
    pub mode: RenderMode,
    pub eps_w: f64,
    pub spp: u32,
    pub seed: u64,
    pub assemble: AssembleOptions,
    /// Peak guide sway angle in radians; 0 keeps the rest pose.
    pub sway: f64,
    pub sway_period: f64,
}

impl Default for SequenceOptions {
    fn default() -> Self {
        SequenceOptions {
            mode: RenderMode::LodAggregated,
            eps_w: DEFAULT_EPS_W,
            spp: 4,
            seed: 0,
            assemble: AssembleOptions::default(),
            sway: 0.0,
            sway_period: 48.0,
        }
    }
}

/// What a frame callback sees. `state` holds the levels used for this frame
/// and the widths recorded while assembling it (LoD mode only).
pub struct FrameOutput<'a> {
    pub frame: usize,
    pub image: &'a Image,
    pub stats: &'a FrameStats,
    pub state: Option<&'a LodState>,
    pub assembly: &'a Assembly,
}

/// Per frame: skin and assemble, render, record widths, then pick next
/// frame's levels.
pub fn simulate_sequence(
    h: &LodHierarchy,
    sh: &Shading,
    env: &Environment,
    cameras: &[Camera],
    opts: &SequenceOptions,
    mut on_frame: impl FnMut(FrameOutput) -> Result<()>,
) -> Result<Vec<FrameStats>> {
    if !(opts.eps_w > 0.0) {
        return Err(invalid("eps_w must be positive"));
    }
    let mut state: Option<LodState> = None;
    let mut all = Vec::with_capacity(cameras.len());
    for (f, camera) in cameras.iter().enumerate() {
        let cam = camera.frame()?;
        let poses = sway_poses(h.rest_poses(), f, opts.sway, opts.sway_period);
        let assembly = match opts.mode {
            RenderMode::DsFull => assemble_strands(h, &poses, &cam, &opts.assemble)?,
            RenderMode::LodAggregated => {
                if state.is_none() {
                    state = Some(init_lod_levels(h, &poses, &cam, opts.eps_w)?);
                }
                skin_and_assemble(h, state.as_mut().expect("state"), &poses, &cam, &opts.assemble)?
            }
        };
        let scene = Scene::new(assembly.segments.clone(), env.lights.clone(), env.head, env.background, h.radius)?;
        let image = render_ray_shoot(&scene, camera, sh, opts.mode, opts.spp, opts.seed)?;
        let stats = FrameStats::from_assembly(f, h.n_levels(), &assembly);
        on_frame(FrameOutput { frame: f, image: &image, stats: &stats, state: state.as_ref(), assembly: &assembly })?;
        all.push(stats);
        if let Some(s) = state.as_mut() {
            s.update(opts.eps_w);
        }
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sway_keeps_roots_and_lengths() {
        let rest = vec![
            vec![Vec3::new(0.0, 1.0, 0.0), Vec3::new(0.0, 0.5, 0.2), Vec3::new(0.1, 0.0, 0.3)],
            vec![Vec3::new(1.0, 1.0, 0.0), Vec3::new(1.0, 0.4, 0.1), Vec3::new(1.0, -0.2, 0.2)],
        ];
        let p = sway_poses(&rest, 7, 0.2, 30.0);
        for (a, b) in rest.iter().zip(&p) {
            assert_eq!(a[0], b[0]);
            for k in 1..a.len() {
                assert!(((a[k] - a[k - 1]).norm() - (b[k] - b[k - 1]).norm()).abs() < 1e-12);
            }
        }
        assert_eq!(sway_poses(&rest, 7, 0.0, 30.0), rest);
    }

    #[test]
    fn dolly_recedes() {
        let cams = dolly_path(Vec3::zeros(), Vec3::z(), 1.0, 4.0, 5, 0.5, 8);
        let d: Vec<f64> = cams.iter().map(|c| Vec3::from(c.position).norm()).collect();
        assert!((d[0] - 1.0).abs() < 1e-12 && (d[4] - 4.0).abs() < 1e-12);
        assert!(d.windows(2).all(|w| w[1] > w[0]));
    }
}
