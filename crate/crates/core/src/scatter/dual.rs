//! Dual-scattering forward/backward lobes and the backward path series.

use std::f64::consts::PI;

use super::gaussian::g;
use super::tables::{AttenuationTables, TableSample};
use crate::math::{Rgb, ScatterAngles};

/// `sum_{i=1}^{m} x^i` for real `m >= 0` and `0 <= x <= 1`.
pub(crate) fn geom_from1(x: f64, m: f64) -> f64 {
    if m <= 0.0 || x == 0.0 {
        return 0.0;
    }
    if m.is_infinite() {
        return if x < 1.0 { x / (1.0 - x) } else { f64::INFINITY };
    }
    if (1.0 - x).abs() < 1e-9 {
        return m;
    }
    x * (1.0 - x.powf(m)) / (1.0 - x)
}

/// `sum_{i=0}^{m-1} x^i` for real `m >= 0`.
pub(crate) fn geom_from0(x: f64, m: f64) -> f64 {
    if m <= 0.0 {
        return 0.0;
    }
    1.0 + geom_from1(x, m - 1.0)
}

/// `sum_{i=1}^{m} i x^i`, used only as a weight so a coarse fallback near
/// `x = 1` is acceptable.
fn weighted_from1(x: f64, m: f64) -> f64 {
    if m <= 0.0 || x == 0.0 {
        return 0.0;
    }
    if m.is_infinite() {
        return if x < 1.0 { x / ((1.0 - x) * (1.0 - x)) } else { f64::INFINITY };
    }
    if (1.0 - x).abs() < 1e-4 {
        return 0.5 * m * (m + 1.0);
    }
    let xm = x.powf(m);
    x * (1.0 - (m + 1.0) * xm + m * xm * x) / ((1.0 - x) * (1.0 - x))
}

/// Backward path families around a shading point inside a cluster of `n`
/// hairs, evaluated per channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BackwardAttenuation {
    /// `F^{i+1} B F^i` paths through hairs behind the shaded one.
    pub a_1plus: Rgb,
    /// One backward event: `F^i B F^i`, i >= 1.
    pub a_1: Rgb,
    /// Three backward events.
    pub a_3: Rgb,
    /// `a_1plus + a_1 + a_3`.
    pub a_bhat: Rgb,
}

pub(crate) fn series_a1plus(a_f: f64, a_b: f64, n: f64, d_1plus: f64) -> f64 {
    if a_b == 0.0 || a_f == 0.0 {
        return 0.0;
    }
    d_1plus * a_b * a_f * geom_from0(a_f * a_f, n)
}

pub(crate) fn series_a1(a_f: f64, a_b: f64, n: f64, d_b: f64) -> f64 {
    if a_b == 0.0 {
        return 0.0;
    }
    d_b * a_b * geom_from1(a_f * a_f, n - 1.0)
}

pub(crate) fn series_a3(a_f: f64, a_b: f64, n: f64, d_b: f64) -> f64 {
    if a_b == 0.0 {
        return 0.0;
    }
    let x = a_f * a_f;
    let s0 = geom_from0(x, n);
    d_b * a_b * a_b * a_b * geom_from1(x, n - 1.0) * s0 * s0
}

/// Backward attenuations for a cluster of `n` hairs (`n` may be fractional
/// or infinite).
pub fn backward_series(s: &TableSample, n: f64, d_b: f64, d_1plus: f64) -> BackwardAttenuation {
    let per = |f: &dyn Fn(f64, f64) -> f64| Rgb([f(s.a_f[0], s.a_b[0]), f(s.a_f[1], s.a_b[1]), f(s.a_f[2], s.a_b[2])]);
    let a_1plus = per(&|f, b| series_a1plus(f, b, n, d_1plus));
    let a_1 = per(&|f, b| series_a1(f, b, n, d_b));
    let a_3 = per(&|f, b| series_a3(f, b, n, d_b));
    BackwardAttenuation { a_1plus, a_1, a_3, a_bhat: a_1plus + a_1 + a_3 }
}

/// Attenuation-weighted longitudinal variance of the backward families.
///
/// Each family contributes `(forward events) * sigma_f2 + (backward events) *
/// sigma_b2`, with forward event counts averaged over the family's own
/// geometric weights.
pub fn backward_variance(s: &TableSample, att: &BackwardAttenuation, n: f64, with_1plus: bool) -> f64 {
    let x = s.a_f.luminance().powi(2);
    let span1 = {
        let w = geom_from1(x, n - 1.0);
        if w > 0.0 { weighted_from1(x, n - 1.0) / w } else { 0.0 }
    };
    let span0 = {
        let w = geom_from0(x, n);
        if w > 0.0 { weighted_from1(x, n - 1.0) / w } else { 0.0 }
    };
    let fam = [
        (att.a_1.luminance(), 2.0 * span1, 1.0),
        (att.a_3.luminance(), 2.0 * (span1 + 2.0 * span0), 3.0),
        (if with_1plus { att.a_1plus.luminance() } else { 0.0 }, 2.0 * span0 + 1.0, 1.0),
    ];
    let mut wsum = 0.0;
    let mut vsum = 0.0;
    for (w, f, b) in fam {
        if w > 0.0 && w.is_finite() {
            wsum += w;
            vsum += w * (f * s.sigma_f2 + b * s.sigma_b2);
        }
    }
    if wsum > 0.0 {
        vsum / wsum
    } else {
        s.sigma_b2
    }
}

/// Forward and backward dual-scattering lobes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualLobes {
    pub forward: Rgb,
    pub backward: Rgb,
}

/// Dual-scattering lobes for light that crossed `n_f` hairs with combined
/// transmittance `a_path` on its way to the shading point.
///
/// The `1 / cos^2(theta_i)` factor is not included; light loops apply the
/// same `cos(theta_i)` weight to every lobe.
pub fn dual_lobes(t: &AttenuationTables, a_path: Rgb, n_f: f64, a: &ScatterAngles) -> DualLobes {
    let s = t.lookup(a.theta_d());
    let spread = a.theta_o + a.theta_i;
    let back = a.is_back();
    let forward = if back {
        Rgb::ZERO
    } else {
        let var = s.sigma_f_long2 + n_f * s.sigma_f2;
        // front-averaged azimuthal lobes: each lobe's front energy spread
        // uniformly over the pi-wide front half circle
        a_path * s.a_f * (t.d_f * g(var.sqrt(), spread) / PI)
    };
    let backward = if back {
        let att = backward_series(&s, f64::INFINITY, t.d_b, 0.0);
        let var = backward_variance(&s, &att, f64::INFINITY, false);
        att.a_bhat * (g(var.sqrt(), spread) / PI)
    } else {
        Rgb::ZERO
    };
    DualLobes { forward, backward }
}

/// Dual scattering after `n_f` identical crossings at this difference angle.
pub fn eval_dual_scattering(t: &AttenuationTables, n_f: u32, theta_i: f64, theta_o: f64, phi: f64) -> DualLobes {
    let a = ScatterAngles { theta_i, theta_o, phi: crate::math::wrap_angle(phi) };
    let s = t.lookup(a.theta_d());
    dual_lobes(t, s.a_f.powf(n_f as f64), n_f as f64, &a)
}
