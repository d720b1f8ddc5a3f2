use std::f64::consts::PI;

use super::aggregate::{eval_aggregated, eval_aggregated_prior, AggregateContext};
use super::marschner::eval_single_marschner;
use super::params::FiberBsdfParams;
use super::single::eval_single_angles;
use super::tables::AttenuationTables;
use crate::error::{invalid, Result};
use crate::math::{Rgb, ScatterAngles};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BsdfSelector {
    Single,
    Marschner,
    Aggregated { n: f64, rho: f64 },
    Prior { n: f64, rho: f64 },
}

impl BsdfSelector {
    pub fn eval(&self, p: &FiberBsdfParams, t: &AttenuationTables, a: &ScatterAngles) -> Result<Rgb> {
        Ok(match *self {
            BsdfSelector::Single => eval_single_angles(p, a),
            BsdfSelector::Marschner => eval_single_marschner(p, a)?,
            BsdfSelector::Aggregated { n, rho } => eval_aggregated(p, t, &AggregateContext::new(n, rho, *a)?),
            BsdfSelector::Prior { n, rho } => eval_aggregated_prior(p, t, &AggregateContext::new(n, rho, *a)?),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileSample {
    pub angle: f64,
    pub intensity: Rgb,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Profiles {
    /// Over outgoing azimuth, integrated over outgoing inclination.
    pub azimuthal: Vec<ProfileSample>,
    /// Over outgoing inclination, integrated over outgoing azimuth.
    pub longitudinal: Vec<ProfileSample>,
}

/// Midpoint grid of `n` samples over `[lo, hi)`.
fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> + Clone {
    let step = (hi - lo) / n as f64;
    (0..n).map(move |k| lo + (k as f64 + 0.5) * step)
}

/// Scattered intensity for a fixed incident direction, weighted by
/// `cos^2(theta_i)` and the outgoing `cos(theta_o)` so both profiles integrate
/// to the same total.
pub fn scattering_profile(
    p: &FiberBsdfParams,
    t: &AttenuationTables,
    sel: BsdfSelector,
    theta_i: f64,
    phi_i: f64,
    n_phi: usize,
    n_theta: usize,
) -> Result<Profiles> {
    if n_phi == 0 || n_theta == 0 {
        return Err(invalid("profile grids need at least one sample"));
    }
    let w_i = theta_i.cos().powi(2);
    let thetas = grid(-PI / 2.0, PI / 2.0, n_theta);
    let phis = grid(-PI, PI, n_phi);
    let d_theta = PI / n_theta as f64;
    let d_phi = 2.0 * PI / n_phi as f64;

    let mut azimuthal = Vec::with_capacity(n_phi);
    for phi_o in phis.clone() {
        let mut acc = Rgb::ZERO;
        for theta_o in thetas.clone() {
            let f = sel.eval(p, t, &ScatterAngles::new(theta_i, phi_i, theta_o, phi_o))?;
            acc += f * (theta_o.cos() * d_theta);
        }
        azimuthal.push(ProfileSample { angle: phi_o, intensity: acc * w_i });
    }
    let mut longitudinal = Vec::with_capacity(n_theta);
    for theta_o in thetas {
        let mut acc = Rgb::ZERO;
        for phi_o in phis.clone() {
            acc += sel.eval(p, t, &ScatterAngles::new(theta_i, phi_i, theta_o, phi_o))? * d_phi;
        }
        longitudinal.push(ProfileSample { angle: theta_o, intensity: acc * (w_i * theta_o.cos()) });
    }
    Ok(Profiles { azimuthal, longitudinal })
}
