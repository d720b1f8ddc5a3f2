//! Small vector and color helpers shared by every module.

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Div, Index, Mul, MulAssign, Sub};

pub type Vec3 = nalgebra::Vector3<f64>;

/// Linear RGB triple used for attenuations, radiance and BCSDF values.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Rgb(pub [f64; 3]);

impl Rgb {
    pub const ZERO: Rgb = Rgb([0.0; 3]);
    pub const ONE: Rgb = Rgb([1.0; 3]);

    pub const fn new(r: f64, g: f64, b: f64) -> Self {
        Rgb([r, g, b])
    }

    pub const fn splat(v: f64) -> Self {
        Rgb([v, v, v])
    }

    pub fn map(self, f: impl Fn(f64) -> f64) -> Self {
        Rgb([f(self.0[0]), f(self.0[1]), f(self.0[2])])
    }

    pub fn zip(self, o: Rgb, f: impl Fn(f64, f64) -> f64) -> Self {
        Rgb([f(self.0[0], o.0[0]), f(self.0[1], o.0[1]), f(self.0[2], o.0[2])])
    }

    /// Per-channel real power. `x^0` is exactly one, including `0^0`.
    pub fn powf(self, e: f64) -> Self {
        if e == 0.0 {
            return Rgb::ONE;
        }
        self.map(|v| v.powf(e))
    }

    /// Rec. 709 luminance.
    pub fn luminance(self) -> f64 {
        0.2126 * self.0[0] + 0.7152 * self.0[1] + 0.0722 * self.0[2]
    }

    pub fn max_channel(self) -> f64 {
        self.0[0].max(self.0[1]).max(self.0[2])
    }

    pub fn min_channel(self) -> f64 {
        self.0[0].min(self.0[1]).min(self.0[2])
    }

    pub fn is_finite(self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn max_abs_diff(self, o: Rgb) -> f64 {
        (0..3).map(|c| (self.0[c] - o.0[c]).abs()).fold(0.0, f64::max)
    }
}

impl Index<usize> for Rgb {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for Rgb {
    type Output = Rgb;
    fn add(self, o: Rgb) -> Rgb {
        self.zip(o, |a, b| a + b)
    }
}

impl AddAssign for Rgb {
    fn add_assign(&mut self, o: Rgb) {
        *self = *self + o;
    }
}

impl Sub for Rgb {
    type Output = Rgb;
    fn sub(self, o: Rgb) -> Rgb {
        self.zip(o, |a, b| a - b)
    }
}

impl Mul for Rgb {
    type Output = Rgb;
    fn mul(self, o: Rgb) -> Rgb {
        self.zip(o, |a, b| a * b)
    }
}

impl MulAssign for Rgb {
    fn mul_assign(&mut self, o: Rgb) {
        *self = *self * o;
    }
}

impl Mul<f64> for Rgb {
    type Output = Rgb;
    fn mul(self, s: f64) -> Rgb {
        self.map(|a| a * s)
    }
}

impl Mul<Rgb> for f64 {
    type Output = Rgb;
    fn mul(self, c: Rgb) -> Rgb {
        c * self
    }
}

impl Div<f64> for Rgb {
    type Output = Rgb;
    fn div(self, s: f64) -> Rgb {
        self.map(|a| a / s)
    }
}

impl serde::Serialize for Rgb {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for Rgb {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Rgb(<[f64; 3]>::deserialize(d)?))
    }
}

/// Wraps an angle to (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let mut x = a % (2.0 * PI);
    if x <= -PI {
        x += 2.0 * PI;
    } else if x > PI {
        x -= 2.0 * PI;
    }
    x
}

/// Any unit vector perpendicular to `v`.
pub fn any_perpendicular(v: &Vec3) -> Vec3 {
    let a = if v.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    v.cross(&a).normalize()
}

/// Longitudinal/azimuthal angles of a direction relative to a fiber tangent.
///
/// The azimuth reference axis is arbitrary but fixed per tangent; only
/// differences of azimuths are meaningful.
#[derive(Clone, Copy, Debug)]
pub struct FiberFrame {
    pub tangent: Vec3,
    pub u: Vec3,
    pub v: Vec3,
}

impl FiberFrame {
    pub fn new(tangent: Vec3) -> Self {
        let t = tangent.normalize();
        let u = any_perpendicular(&t);
        let v = t.cross(&u);
        FiberFrame { tangent: t, u, v }
    }

    /// Returns (theta, phi) for a unit direction.
    pub fn angles(&self, dir: &Vec3) -> (f64, f64) {
        let s = dir.dot(&self.tangent).clamp(-1.0, 1.0);
        let theta = s.asin();
        let phi = dir.dot(&self.v).atan2(dir.dot(&self.u));
        (theta, phi)
    }

    pub fn direction(&self, theta: f64, phi: f64) -> Vec3 {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        self.tangent * st + (self.u * cp + self.v * sp) * ct
    }
}

/// Shading angles for one (incident, outgoing) pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScatterAngles {
    pub theta_i: f64,
    pub theta_o: f64,
    /// Relative azimuth `phi_o - phi_i`, wrapped to (-pi, pi].
    pub phi: f64,
}

impl ScatterAngles {
    pub fn new(theta_i: f64, phi_i: f64, theta_o: f64, phi_o: f64) -> Self {
        ScatterAngles { theta_i, theta_o, phi: wrap_angle(phi_o - phi_i) }
    }

    pub fn from_directions(frame: &FiberFrame, wi: &Vec3, wo: &Vec3) -> Self {
        let (ti, pi) = frame.angles(wi);
        let (to, po) = frame.angles(wo);
        Self::new(ti, pi, to, po)
    }

    pub fn theta_h(&self) -> f64 {
        0.5 * (self.theta_i + self.theta_o)
    }

    pub fn theta_d(&self) -> f64 {
        self.theta_i - self.theta_o
    }

    /// Outgoing direction lies in the back (reflection) half-circle.
    pub fn is_back(&self) -> bool {
        self.phi.cos() > 0.0
    }
}
