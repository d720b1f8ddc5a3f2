use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Scalp, Strand, StrandModel};
use crate::math::{any_perpendicular, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HairStyle {
    Straight,
    Curly,
}

impl std::str::FromStr for HairStyle {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "straight" => Ok(HairStyle::Straight),
            "curly" => Ok(HairStyle::Curly),
            other => Err(format!("unknown style '{other}' (expected straight or curly)")),
        }
    }
}

const POINTS_PER_STRAND: usize = 32;
const STRANDS_PER_WISP: usize = 40;
const MEAN_LENGTH: f64 = 0.18;
const WISP_SPREAD: f64 = 0.006;
const CURL_AMPLITUDE: f64 = 0.008;
const CURL_PERIOD: f64 = 0.03;
const DEFAULT_RADIUS: f64 = 5e-5;

/// Procedural wisps growing from the upper half of a spherical scalp.
pub fn generate_wisp_model(style: HairStyle, strand_count: usize, seed: u64) -> StrandModel {
    let strand_count = strand_count.max(1);
    let scalp = Scalp::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_wisps = (strand_count / STRANDS_PER_WISP).max(1);

    struct Wisp {
        normal: Vec3,
        length: f64,
        phase: f64,
        clump: f64,
    }
    let wisps: Vec<Wisp> = (0..n_wisps)
        .map(|_| {
            // uniform area sampling on the cap y >= 0.1
            let y = rng.gen_range(0.1..1.0);
            let az = rng.gen_range(0.0..2.0 * PI);
            let s = (1.0f64 - y * y).sqrt();
            Wisp {
                normal: Vec3::new(s * az.cos(), y, s * az.sin()),
                length: MEAN_LENGTH * rng.gen_range(0.85..1.15),
                phase: rng.gen_range(0.0..2.0 * PI),
                clump: rng.gen_range(0.3..0.7),
            }
        })
        .collect();

    let mut strands = Vec::with_capacity(strand_count);
    for i in 0..strand_count {
        let w = &wisps[i % n_wisps];
        let t1 = any_perpendicular(&w.normal);
        let t2 = w.normal.cross(&t1);
        let r = WISP_SPREAD * rng.gen::<f64>().sqrt();
        let a = rng.gen_range(0.0..2.0 * PI);
        let root_dir = (w.normal * scalp.radius + t1 * (r * a.cos()) + t2 * (r * a.sin())).normalize();
        let root = scalp.center + root_dir * scalp.radius;
        let length = w.length * rng.gen_range(0.9..1.0);
        let jitter = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * 0.002;
        let phase = w.phase + rng.gen_range(-0.3..0.3);
        let wisp_root = scalp.center + w.normal * scalp.radius;
        let offset = root - wisp_root;

        let step = length / (POINTS_PER_STRAND - 1) as f64;
        let outward = Vec3::new(w.normal.x, 0.0, w.normal.z);
        let mut center = wisp_root;
        let mut dir = w.normal;
        let mut points = Vec::with_capacity(POINTS_PER_STRAND);
        for k in 0..POINTS_PER_STRAND {
            let s = k as f64 / (POINTS_PER_STRAND - 1) as f64;
            if k > 0 {
                let b = (s * 1.6).min(1.0);
                let b = b * b * (3.0 - 2.0 * b);
                dir = (w.normal * (1.0 - b) + (Vec3::new(0.0, -1.0, 0.0) + outward * 0.25) * b + jitter * s)
                    .normalize();
                center += dir * step;
            }
            let mut p = center + offset * (1.0 - w.clump * s);
            if style == HairStyle::Curly && k > 0 {
                let u = any_perpendicular(&dir);
                let v = dir.cross(&u);
                let ang = 2.0 * PI * s * length / CURL_PERIOD + phase;
                let ramp = (s * 6.0).min(1.0);
                p += (u * ang.cos() + v * ang.sin()) * (CURL_AMPLITUDE * ramp);
            }
            if k > 0 {
                let d = p - scalp.center;
                let min_r = scalp.radius * 1.01;
                if d.norm() < min_r {
                    p = scalp.center + d.normalize() * min_r;
                }
            }
            points.push(p);
        }
        strands.push(Strand { points });
    }
    StrandModel { strands, radius: DEFAULT_RADIUS, scalp }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_counted() {
        let a = generate_wisp_model(HairStyle::Straight, 100, 7);
        let b = generate_wisp_model(HairStyle::Straight, 100, 7);
        assert_eq!(a, b);
        assert_eq!(a.len(), 100);
        let c = generate_wisp_model(HairStyle::Straight, 100, 8);
        assert_ne!(a, c);
    }

    #[test]
    fn roots_on_scalp_and_valid() {
        for style in [HairStyle::Straight, HairStyle::Curly] {
            let m = generate_wisp_model(style, 500, 3);
            m.validate().unwrap();
            for s in &m.strands {
                let r = (s.points[0] - m.scalp.center).norm();
                assert!((r - m.scalp.radius).abs() < 1e-6);
                assert!(s.points[0].y > 0.0);
            }
        }
    }

    #[test]
    fn curly_differs_from_straight() {
        let a = generate_wisp_model(HairStyle::Straight, 50, 1);
        let b = generate_wisp_model(HairStyle::Curly, 50, 1);
        assert_eq!(a.strands[0].points[0], b.strands[0].points[0]);
        assert!(a.strands[0].points[20] != b.strands[0].points[20]);
    }
}
