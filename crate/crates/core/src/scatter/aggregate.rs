//! Aggregated scattering of a thick hair standing in for a cluster of fibers.

use std::f64::consts::PI;

use super::dual::{backward_series, backward_variance, BackwardAttenuation};
use super::gaussian::{g, widen};
use super::params::FiberBsdfParams;
use super::single::{rtd_sum, LobeWidths, INV_2PI, INV_PI};
use super::tables::AttenuationTables;
use crate::error::{invalid, Result};
use crate::math::{wrap_angle, Rgb, ScatterAngles};

pub const D_1PLUS: f64 = 0.6;
pub const C_M: f64 = 0.2;
pub const RHO_MIN: f64 = 1e-3;

/// Per-shading-event inputs of the aggregated model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AggregateContext {
    /// Hairs crossed by the incident light inside the cluster.
    pub n: f64,
    pub rho: f64,
    pub angles: ScatterAngles,
}

impl AggregateContext {
    pub fn new(n: f64, rho: f64, angles: ScatterAngles) -> Result<Self> {
        if !(n >= 1.0) || !n.is_finite() {
            return Err(invalid(format!("hair count n must be >= 1, got {n}")));
        }
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(invalid(format!("density must lie in (0, 1], got {rho}")));
        }
        Ok(AggregateContext { n, rho, angles })
    }

    pub fn theta_h(&self) -> f64 {
        self.angles.theta_h()
    }

    pub fn theta_d(&self) -> f64 {
        self.angles.theta_d()
    }

    /// Hair count used by the R, TT and D lobes: light leaving through the
    /// back half circle only ever met the shaded hair.
    pub fn lobe_n(&self) -> f64 {
        if self.angles.is_back() {
            1.0
        } else {
            self.n
        }
    }
}

/// Switches for ablation studies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AggregateOptions {
    pub shadowing: bool,
    pub a1_plus: bool,
    pub d_1plus: f64,
    pub c_m: f64,
}

impl Default for AggregateOptions {
    fn default() -> Self {
        AggregateOptions { shadowing: true, a1_plus: true, d_1plus: D_1PLUS, c_m: C_M }
    }
}

/// Terms of one aggregated evaluation; the value is `s * (rtd + b)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AggregatedLobes {
    pub rtd: Rgb,
    pub b: Rgb,
    pub s: Rgb,
}

impl AggregatedLobes {
    pub fn value(&self) -> Rgb {
        self.s * (self.rtd + self.b)
    }
}

/// Density and expected crossed-hair count of an elliptical cluster.
///
/// `l_w` and `l_t` are the semi-axes of the cross-section, so that `rho` is the
/// fraction of the ellipse area covered by `n_total` discs of radius `r`.
/// `l` is the chord length travelled inside the cluster.
pub fn estimate_density_and_n(n_total: f64, r: f64, l_w: f64, l_t: f64, l: f64) -> Result<(f64, f64)> {
    if !(l_w > 0.0 && l_t > 0.0) || !l_w.is_finite() || !l_t.is_finite() {
        return Err(invalid(format!("cluster extents must be positive, got {l_w} x {l_t}")));
    }
    if !(n_total >= 1.0) || !(r > 0.0) {
        return Err(invalid("cluster needs at least one hair of positive radius"));
    }
    let rho = (n_total * r * r / (l_w * l_t)).clamp(RHO_MIN, 1.0);
    let n = (rho * l.max(0.0) * (n_total / (PI * l_w * l_t)).sqrt()).max(1.0);
    Ok((rho, n))
}

/// Probability-weighted attenuation from intra-cluster self shadowing.
pub fn shadowing_masking(phi: f64, theta_d: f64, rho: f64, t: &AttenuationTables) -> Rgb {
    shadowing_masking_with(phi, theta_d, rho, t, C_M)
}

pub fn shadowing_masking_with(phi: f64, theta_d: f64, rho: f64, t: &AttenuationTables, c_m: f64) -> Rgb {
    let phi = wrap_angle(phi);
    if phi.abs() >= PI / 2.0 {
        return Rgb::ONE;
    }
    let rho = rho.clamp(0.0, 1.0);
    let p_m = (1.0 - rho) * c_m;
    // keep the three probabilities a partition so S never goes negative
    let p_s = ((1.0 - rho) * (1.0 - phi.cos())).min(1.0 - p_m);
    let p_n = 1.0 - p_m - p_s;
    t.lookup(theta_d).a_f * p_s + Rgb::splat(p_n)
}

/// Backward attenuations at difference angle `theta_d` for `n` hairs.
pub fn backward_attenuation(t: &AttenuationTables, theta_d: f64, n: f64, d_1plus: f64) -> BackwardAttenuation {
    backward_series(&t.lookup(theta_d), n, t.d_b, d_1plus)
}

pub fn eval_aggregated_lobes(
    p: &FiberBsdfParams,
    t: &AttenuationTables,
    ctx: &AggregateContext,
    opts: &AggregateOptions,
) -> AggregatedLobes {
    let a = &ctx.angles;
    let s = t.lookup(a.theta_d());
    let theta_h = a.theta_h();

    let n_l = ctx.lobe_n();
    let extra = (n_l - 1.0) * s.sigma_f2;
    let widths = LobeWidths {
        r_m: widen(p.beta_r, extra),
        tt_m: widen(p.beta_tt, extra),
        tt_n: widen(p.beta_tt_n, extra),
    };
    let rtd = s.a_f.powf(n_l - 1.0) * rtd_sum(p, widths, theta_h, a.phi);

    let b = if a.is_back() {
        let d_1plus = if opts.a1_plus { opts.d_1plus } else { 0.0 };
        let att = backward_series(&s, ctx.n, t.d_b, d_1plus);
        let var = backward_variance(&s, &att, ctx.n, opts.a1_plus);
        att.a_bhat * (g(var.sqrt(), theta_h) * INV_PI)
    } else {
        Rgb::ZERO
    };

    let sm = if opts.shadowing {
        shadowing_masking_with(a.phi, a.theta_d(), ctx.rho, t, opts.c_m)
    } else {
        Rgb::ONE
    };
    AggregatedLobes { rtd, b, s: sm }
}

pub fn eval_aggregated(p: &FiberBsdfParams, t: &AttenuationTables, ctx: &AggregateContext) -> Rgb {
    eval_aggregated_lobes(p, t, ctx, &AggregateOptions::default()).value()
}

/// Earlier aggregated model: unattenuated R and D, one forward lobe carrying
/// `a_F^n`, and the local backward lobe. No shadowing term.
pub fn eval_aggregated_prior(p: &FiberBsdfParams, t: &AttenuationTables, ctx: &AggregateContext) -> Rgb {
    eval_aggregated_prior_lobes(p, t, ctx).value()
}

/// Terms of [`eval_aggregated_prior`], with the forward lobe folded into `rtd`.
pub fn eval_aggregated_prior_lobes(p: &FiberBsdfParams, t: &AttenuationTables, ctx: &AggregateContext) -> AggregatedLobes {
    let a = &ctx.angles;
    let s = t.lookup(a.theta_d());
    let theta_h = a.theta_h();
    let n = ctx.n;

    let r = p.a_r * (g(p.beta_r, theta_h) * INV_2PI);
    let d = p.a_d * (INV_PI * INV_2PI);
    let extra = n * s.sigma_f2;
    let f = s.a_f.powf(n) * (g(widen(p.beta_tt, extra), theta_h) * g(widen(p.beta_tt_n, extra), wrap_angle(a.phi - PI)));
    let b = if a.is_back() {
        let att = backward_series(&s, n, t.d_b, 0.0);
        let var = backward_variance(&s, &att, n, false);
        att.a_bhat * (g(var.sqrt(), theta_h) * INV_PI)
    } else {
        Rgb::ZERO
    };
    AggregatedLobes { rtd: r + d + f, b, s: Rgb::ONE }
}
