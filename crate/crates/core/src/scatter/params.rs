use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::math::Rgb;

/// Parameters of the physically based R/TT/TRT variant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarschnerParams {
    /// Absorption per unit fiber radius.
    pub sigma_a: [f64; 3],
    pub eta: f64,
    /// Cuticle tilt in radians (negative tilts the scales toward the root).
    pub alpha: f64,
}

impl Default for MarschnerParams {
    fn default() -> Self {
        MarschnerParams { sigma_a: [0.432, 0.612, 0.981], eta: 1.55, alpha: -0.07 }
    }
}

/// Single-fiber lobe set: R, TT and a diffuse D lobe.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberBsdfParams {
    pub a_r: Rgb,
    pub a_tt: Rgb,
    pub a_d: Rgb,
    pub beta_r: f64,
    pub beta_tt: f64,
    pub beta_tt_n: f64,
    pub marschner: Option<MarschnerParams>,
}

pub const PRESET_NAMES: [&str; 4] = ["brown", "blonde", "red", "black"];

impl FiberBsdfParams {
    pub fn preset(name: &str) -> Result<Self> {
        let p = match name {
            "brown" => FiberBsdfParams {
                a_r: Rgb::splat(0.08),
                a_tt: Rgb::new(0.30, 0.20, 0.12),
                a_d: Rgb::new(0.30, 0.16, 0.09),
                beta_r: 0.10,
                beta_tt: 0.18,
                beta_tt_n: 0.30,
                marschner: None,
            },
            "blonde" => FiberBsdfParams {
                a_r: Rgb::splat(0.20),
                a_tt: Rgb::new(0.38, 0.25, 0.18),
                a_d: Rgb::new(0.40, 0.21, 0.08),
                beta_r: 0.08,
                beta_tt: 0.12,
                beta_tt_n: 0.20,
                marschner: None,
            },
            "red" => FiberBsdfParams {
                a_r: Rgb::splat(0.12),
                a_tt: Rgb::new(0.36, 0.18, 0.08),
                a_d: Rgb::new(0.38, 0.14, 0.09),
                beta_r: 0.12,
                beta_tt: 0.22,
                beta_tt_n: 0.35,
                marschner: None,
            },
            "black" => FiberBsdfParams {
                a_r: Rgb::splat(0.05),
                a_tt: Rgb::new(0.25, 0.17, 0.07),
                a_d: Rgb::new(0.20, 0.11, 0.10),
                beta_r: 0.15,
                beta_tt: 0.30,
                beta_tt_n: 0.40,
                marschner: None,
            },
            other => {
                return Err(invalid(format!(
                    "unknown preset '{other}' (expected one of {})",
                    PRESET_NAMES.join(", ")
                )))
            }
        };
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, b) in [("beta_r", self.beta_r), ("beta_tt", self.beta_tt), ("beta_tt_n", self.beta_tt_n)] {
            if !(b > 0.0 && b.is_finite()) {
                return Err(invalid(format!("{name} must be positive, got {b}")));
            }
        }
        for c in 0..3 {
            let (r, t, d) = (self.a_r[c], self.a_tt[c], self.a_d[c]);
            if r < 0.0 || t < 0.0 || d < 0.0 {
                return Err(invalid("lobe attenuations must be non-negative"));
            }
            if r + t + d > 1.0 + 1e-12 {
                return Err(invalid(format!("channel {c}: lobe attenuations sum to {} > 1", r + t + d)));
            }
        }
        if let Some(m) = &self.marschner {
            if !(m.eta >= 1.0) {
                return Err(invalid(format!("eta must be >= 1, got {}", m.eta)));
            }
            if m.sigma_a.iter().any(|s| *s < 0.0 || s.is_nan()) {
                return Err(invalid("absorption must be non-negative"));
            }
        }
        Ok(())
    }

    pub fn albedo(&self) -> Rgb {
        self.a_r + self.a_tt + self.a_d
    }
}
