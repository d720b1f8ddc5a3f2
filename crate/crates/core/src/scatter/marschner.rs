//! R/TT/TRT fiber model with Fresnel, Bravais refraction and absorption.
//!
//! Angles follow the longitudinal/azimuthal parameterization used everywhere
//! else; internally the half difference angle `(theta_i - theta_o) / 2` drives
//! refraction.

use std::f64::consts::PI;

use super::gaussian::g;
use super::params::{FiberBsdfParams, MarschnerParams};
use crate::error::{invalid, Result};
use crate::math::{wrap_angle, Rgb, ScatterAngles};

const H_SAMPLES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MarschnerLobe {
    R,
    TT,
    TRT,
}

impl MarschnerLobe {
    pub const ALL: [MarschnerLobe; 3] = [MarschnerLobe::R, MarschnerLobe::TT, MarschnerLobe::TRT];

    fn order(self) -> i32 {
        match self {
            MarschnerLobe::R => 0,
            MarschnerLobe::TT => 1,
            MarschnerLobe::TRT => 2,
        }
    }
}

/// Unpolarized dielectric Fresnel reflectance.
pub fn fresnel(eta: f64, cos_i: f64) -> f64 {
    if eta == 1.0 {
        return 0.0;
    }
    let cos_i = cos_i.clamp(0.0, 1.0);
    let sin_i2 = 1.0 - cos_i * cos_i;
    let sin_t2 = sin_i2 / (eta * eta);
    if sin_t2 >= 1.0 {
        return 1.0;
    }
    let cos_t = (1.0 - sin_t2).sqrt();
    let rs = (cos_i - eta * cos_t) / (cos_i + eta * cos_t);
    let rp = (eta * cos_i - cos_t) / (eta * cos_i + cos_t);
    0.5 * (rs * rs + rp * rp)
}

struct Geometry {
    eta_p: f64,
    cos_theta_d: f64,
    cos_theta_t: f64,
}

fn geometry(m: &MarschnerParams, half_d: f64) -> Geometry {
    let (s, c) = half_d.sin_cos();
    let c = c.max(1e-6);
    let eta_p = (m.eta * m.eta - s * s).max(0.0).sqrt() / c;
    let st = s / m.eta;
    Geometry { eta_p, cos_theta_d: c, cos_theta_t: (1.0 - st * st).max(1e-12).sqrt() }
}

/// Attenuation of lobe `lobe` for a ray entering at offset `h` in [-1, 1].
fn path_attenuation(m: &MarschnerParams, geo: &Geometry, lobe: MarschnerLobe, h: f64) -> Rgb {
    let gamma_i = h.asin();
    let f = fresnel(m.eta, geo.cos_theta_d * gamma_i.cos());
    let p = lobe.order();
    if p == 0 {
        return Rgb::splat(f);
    }
    let gamma_t = (h / geo.eta_p).clamp(-1.0, 1.0).asin();
    // internal path length through a unit-radius fiber
    let chord = 2.0 * gamma_t.cos() / geo.cos_theta_t;
    let t = Rgb(m.sigma_a).map(|s| if s.is_infinite() { 0.0 } else { (-s * chord).exp() });
    let surf = (1.0 - f) * (1.0 - f) * f.powi(p - 1);
    t.powf(p as f64) * surf
}

fn exit_azimuth(geo: &Geometry, lobe: MarschnerLobe, h: f64) -> f64 {
    let p = lobe.order() as f64;
    let gamma_i = h.asin();
    let gamma_t = (h / geo.eta_p).clamp(-1.0, 1.0).asin();
    2.0 * p * gamma_t - 2.0 * gamma_i + p * PI
}

fn h_nodes() -> impl Iterator<Item = f64> {
    (0..H_SAMPLES).map(|k| -1.0 + (2.0 * k as f64 + 1.0) / H_SAMPLES as f64)
}

/// Azimuthal function of one lobe at relative azimuth `phi`, including its
/// attenuation: `0.5 * integral over h of A_p(h) G(beta_n, phi - Phi_p(h))`.
fn azimuthal(m: &MarschnerParams, beta_n: f64, geo: &Geometry, lobe: MarschnerLobe, phi: f64) -> Rgb {
    let dh = 2.0 / H_SAMPLES as f64;
    let mut acc = Rgb::ZERO;
    for h in h_nodes() {
        let a = path_attenuation(m, geo, lobe, h);
        acc += a * g(beta_n, wrap_angle(phi - exit_azimuth(geo, lobe, h)));
    }
    acc * (0.5 * dh)
}

/// Total energy carried by `lobe` at half difference angle `half_d`.
pub fn marschner_attenuation(m: &MarschnerParams, lobe: MarschnerLobe, half_d: f64) -> Rgb {
    let geo = geometry(m, half_d);
    let dh = 2.0 / H_SAMPLES as f64;
    let mut acc = Rgb::ZERO;
    for h in h_nodes() {
        acc += path_attenuation(m, &geo, lobe, h);
    }
    acc * (0.5 * dh)
}

fn longitudinal(p: &FiberBsdfParams, m: &MarschnerParams, lobe: MarschnerLobe) -> (f64, f64) {
    match lobe {
        MarschnerLobe::R => (p.beta_r, m.alpha),
        MarschnerLobe::TT => (p.beta_tt, -0.5 * m.alpha),
        MarschnerLobe::TRT => (2.0 * p.beta_r, -1.5 * m.alpha),
    }
}

/// One lobe `M_p N_p` of the R/TT/TRT model.
pub fn eval_marschner_lobe(p: &FiberBsdfParams, lobe: MarschnerLobe, a: &ScatterAngles) -> Result<Rgb> {
    let m = p.marschner.as_ref().ok_or_else(|| invalid("marschner parameters missing"))?;
    let geo = geometry(m, 0.5 * a.theta_d());
    let (beta, shift) = longitudinal(p, m, lobe);
    let mp = g(beta, a.theta_h() - shift);
    Ok(azimuthal(m, p.beta_tt_n, &geo, lobe, a.phi) * mp)
}

/// R + TT + TRT evaluation.
pub fn eval_single_marschner(p: &FiberBsdfParams, a: &ScatterAngles) -> Result<Rgb> {
    let mut sum = Rgb::ZERO;
    for lobe in MarschnerLobe::ALL {
        sum += eval_marschner_lobe(p, lobe, a)?;
    }
    Ok(sum)
}

/// Per-lobe azimuthal masses and spreads at one difference angle, used to
/// build attenuation tables for this variant.
pub(crate) fn marschner_lobe_stats(p: &FiberBsdfParams, theta_d: f64) -> Vec<super::tables::LobeStats> {
    let m = p.marschner.as_ref().expect("checked by caller");
    let geo = geometry(m, 0.5 * theta_d);
    const PHI_SAMPLES: usize = 256;
    let dphi = 2.0 * PI / PHI_SAMPLES as f64;
    MarschnerLobe::ALL
        .iter()
        .map(|&lobe| {
            let mut front = Rgb::ZERO;
            let mut back = Rgb::ZERO;
            let mut var_w = 0.0;
            let mut var_acc = 0.0;
            for k in 0..PHI_SAMPLES {
                let phi = -PI + (k as f64 + 0.5) * dphi;
                let v = azimuthal(m, p.beta_tt_n, &geo, lobe, phi) * dphi;
                if phi.cos() > 0.0 {
                    back += v;
                } else {
                    front += v;
                    let d = wrap_angle(phi - PI);
                    var_w += v.luminance();
                    var_acc += v.luminance() * d * d;
                }
            }
            let (beta, _) = longitudinal(p, m, lobe);
            super::tables::LobeStats {
                front,
                back,
                azimuthal_var: if var_w > 0.0 { var_acc / var_w } else { super::tables::UNIFORM_HALF_CIRCLE_VAR },
                longitudinal_var: beta * beta,
            }
        })
        .collect()
}
