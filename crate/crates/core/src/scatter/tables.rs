use std::f64::consts::{FRAC_PI_2, PI};

use super::gaussian::central_mass;
use super::marschner::marschner_lobe_stats;
use super::params::FiberBsdfParams;
use crate::error::{invalid, Result};
use crate::math::Rgb;

pub const DEFAULT_TABLE_SIZE: usize = 64;
/// Dual-scattering density constants.
pub const D_FORWARD: f64 = 0.7;
pub const D_BACKWARD: f64 = 0.7;

/// Variance of a uniform density over a half circle.
pub const UNIFORM_HALF_CIRCLE_VAR: f64 = PI * PI / 12.0;

/// Energy split and spread of one single-fiber lobe.
#[derive(Clone, Copy, Debug)]
pub struct LobeStats {
    /// Energy leaving through the front half circle (around phi = pi).
    pub front: Rgb,
    /// Energy leaving through the back half circle (|phi| < pi/2).
    pub back: Rgb,
    /// Azimuthal variance of the front part, about phi = pi.
    pub azimuthal_var: f64,
    pub longitudinal_var: f64,
}

/// Lobe statistics of the R/TT/D model. Independent of the difference angle.
pub fn lobe_stats(p: &FiberBsdfParams) -> [LobeStats; 3] {
    let w_tt = central_mass(p.beta_tt_n, FRAC_PI_2);
    [
        LobeStats {
            front: p.a_r * 0.5,
            back: p.a_r * 0.5,
            azimuthal_var: UNIFORM_HALF_CIRCLE_VAR,
            longitudinal_var: p.beta_r * p.beta_r,
        },
        LobeStats {
            front: p.a_tt * w_tt,
            back: p.a_tt * (1.0 - w_tt),
            azimuthal_var: p.beta_tt_n * p.beta_tt_n,
            longitudinal_var: p.beta_tt * p.beta_tt,
        },
        LobeStats {
            front: p.a_d * 0.5,
            back: p.a_d * 0.5,
            azimuthal_var: UNIFORM_HALF_CIRCLE_VAR,
            longitudinal_var: UNIFORM_HALF_CIRCLE_VAR,
        },
    ]
}

/// One table row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TableSample {
    pub a_f: Rgb,
    pub a_b: Rgb,
    /// Forward azimuthal spread variance per crossed hair.
    pub sigma_f2: f64,
    /// Backward longitudinal variance per backward event.
    pub sigma_b2: f64,
    /// Longitudinal variance of forward-scattered energy from one hair.
    pub sigma_f_long2: f64,
}

impl TableSample {
    fn lerp(a: &TableSample, b: &TableSample, t: f64) -> TableSample {
        let l = |x: f64, y: f64| x + (y - x) * t;
        TableSample {
            a_f: a.a_f.zip(b.a_f, l),
            a_b: a.a_b.zip(b.a_b, l),
            sigma_f2: l(a.sigma_f2, b.sigma_f2),
            sigma_b2: l(a.sigma_b2, b.sigma_b2),
            sigma_f_long2: l(a.sigma_f_long2, b.sigma_f_long2),
        }
    }

    fn from_lobes(lobes: &[LobeStats]) -> TableSample {
        let mut a_f = Rgb::ZERO;
        let mut a_b = Rgb::ZERO;
        let (mut wf, mut sf, mut sfl) = (0.0, 0.0, 0.0);
        let (mut wb, mut sb) = (0.0, 0.0);
        for l in lobes {
            a_f += l.front;
            a_b += l.back;
            let f = l.front.luminance();
            let b = l.back.luminance();
            wf += f;
            sf += f * l.azimuthal_var;
            sfl += f * l.longitudinal_var;
            wb += b;
            sb += b * l.longitudinal_var;
        }
        let avg = |s: f64, w: f64| if w > 0.0 { s / w } else { UNIFORM_HALF_CIRCLE_VAR };
        TableSample {
            a_f,
            a_b,
            sigma_f2: avg(sf, wf),
            sigma_b2: avg(sb, wb),
            sigma_f_long2: avg(sfl, wf),
        }
    }
}

/// Per-hair forward/backward attenuations and spreads sampled over the
/// difference angle |theta_d| in [0, pi/2].
#[derive(Clone, Debug, PartialEq)]
pub struct AttenuationTables {
    pub samples: Vec<TableSample>,
    pub d_f: f64,
    pub d_b: f64,
}

impl AttenuationTables {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Difference angle of bin `i`.
    pub fn bin_angle(&self, i: usize) -> f64 {
        FRAC_PI_2 * i as f64 / (self.samples.len() - 1) as f64
    }

    /// Linear interpolation in |theta_d|; angles past pi/2 use the last bin.
    pub fn lookup(&self, theta_d: f64) -> TableSample {
        let n = self.samples.len();
        let x = (theta_d.abs() / FRAC_PI_2).min(1.0) * (n - 1) as f64;
        let i = (x.floor() as usize).min(n - 2);
        TableSample::lerp(&self.samples[i], &self.samples[i + 1], x - i as f64)
    }
}

pub fn build_tables(p: &FiberBsdfParams, n_tab: usize) -> Result<AttenuationTables> {
    p.validate()?;
    if n_tab < 2 {
        return Err(invalid("table needs at least 2 bins"));
    }
    let samples = if p.marschner.is_some() {
        (0..n_tab)
            .map(|i| {
                let theta_d = FRAC_PI_2 * i as f64 / (n_tab - 1) as f64;
                TableSample::from_lobes(&marschner_lobe_stats(p, theta_d))
            })
            .collect()
    } else {
        let row = TableSample::from_lobes(&lobe_stats(p));
        vec![row; n_tab]
    };
    Ok(AttenuationTables { samples, d_f: D_FORWARD, d_b: D_BACKWARD })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scatter::params::{MarschnerParams, PRESET_NAMES};

    fn custom(a_r: f64, a_tt: f64, a_d: f64, beta_n: f64) -> FiberBsdfParams {
        let mut p = FiberBsdfParams::preset("brown").unwrap();
        p.a_r = Rgb::splat(a_r);
        p.a_tt = Rgb::splat(a_tt);
        p.a_d = Rgb::splat(a_d);
        p.beta_tt_n = beta_n;
        p
    }

    #[test]
    fn narrow_tt_goes_forward() {
        let t = build_tables(&custom(0.0, 1.0, 0.0, 0.05), 64).unwrap();
        let s = t.lookup(0.3);
        assert!((s.a_f[0] - 1.0).abs() < 1e-9);
        assert!(s.a_b[0].abs() < 1e-9);
    }

    #[test]
    fn uniform_lobes_split_evenly() {
        let t = build_tables(&custom(0.5, 0.0, 0.5, 0.3), 64).unwrap();
        for s in &t.samples {
            assert!((s.a_f[1] - 0.5).abs() < 1e-15);
            assert!((s.a_b[1] - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn sum_rule_all_presets() {
        for name in PRESET_NAMES {
            let p = FiberBsdfParams::preset(name).unwrap();
            let t = build_tables(&p, 64).unwrap();
            let albedo = p.albedo();
            for s in &t.samples {
                assert!((s.a_f + s.a_b).max_abs_diff(albedo) < 1e-6);
            }
        }
    }

    #[test]
    fn lookup_is_symmetric_and_clamped() {
        let mut p = FiberBsdfParams::preset("blonde").unwrap();
        p.marschner = Some(MarschnerParams::default());
        let t = build_tables(&p, 16).unwrap();
        for x in [0.0, 0.2, 0.77, 1.5] {
            assert_eq!(t.lookup(x), t.lookup(-x));
        }
        assert_eq!(t.lookup(2.5), t.samples[15]);
        assert_eq!(t.lookup(t.bin_angle(3)), t.samples[3]);
        for s in &t.samples {
            assert!(s.a_f.min_channel() >= 0.0 && (s.a_f + s.a_b).max_channel() <= 1.0 + 1e-9);
        }
    }
}
