use std::f64::consts::PI;

use super::gaussian::g;
use super::params::FiberBsdfParams;
use crate::math::{wrap_angle, Rgb, ScatterAngles};

pub(crate) const INV_2PI: f64 = 0.5 / PI;
pub(crate) const INV_PI: f64 = 1.0 / PI;

/// Widths used by the three lobes for one evaluation.
#[derive(Clone, Copy, Debug)]
pub(crate) struct LobeWidths {
    pub r_m: f64,
    pub tt_m: f64,
    pub tt_n: f64,
}

impl LobeWidths {
    pub fn of(p: &FiberBsdfParams) -> Self {
        LobeWidths { r_m: p.beta_r, tt_m: p.beta_tt, tt_n: p.beta_tt_n }
    }
}

/// `a_R M_R N_R + a_TT M_TT N_TT + a_D M_D N_D`, in that order. Both the single
/// fiber and the aggregated model go through this function so that the
/// aggregated model reduces to the single fiber bit for bit.
#[inline]
pub(crate) fn rtd_sum(p: &FiberBsdfParams, w: LobeWidths, theta_h: f64, phi: f64) -> Rgb {
    let m_r = g(w.r_m, theta_h);
    let m_tt = g(w.tt_m, theta_h);
    let n_tt = g(w.tt_n, wrap_angle(phi - PI));
    p.a_r * (m_r * INV_2PI) + p.a_tt * (m_tt * n_tt) + p.a_d * (INV_PI * INV_2PI)
}

/// Single-fiber BCSDF over longitudinal/azimuthal angles.
pub fn eval_single(p: &FiberBsdfParams, theta_i: f64, phi_i: f64, theta_o: f64, phi_o: f64) -> Rgb {
    eval_single_angles(p, &ScatterAngles::new(theta_i, phi_i, theta_o, phi_o))
}

pub fn eval_single_angles(p: &FiberBsdfParams, a: &ScatterAngles) -> Rgb {
    rtd_sum(p, LobeWidths::of(p), a.theta_h(), a.phi)
}
