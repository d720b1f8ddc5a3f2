use crate::error::{invalid, Result};
use crate::math::Vec3;

pub const DEFAULT_CONTROL_POINTS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplineKind {
    CatmullRom,
    BSpline,
}

/// Uniform cubic curve over `control_points`, parameterized by `t` in [0, 1].
///
/// Both kinds pad the control polygon with reflected phantom points, so the
/// curve starts at the first control point and ends at the last one.
#[derive(Clone, Debug, PartialEq)]
pub struct Spline {
    pub control_points: Vec<Vec3>,
    pub kind: SplineKind,
}

impl Spline {
    pub fn new(control_points: Vec<Vec3>, kind: SplineKind) -> Result<Self> {
        if control_points.len() < 4 {
            return Err(invalid(format!(
                "spline needs at least 4 control points, got {}",
                control_points.len()
            )));
        }
        Ok(Spline { control_points, kind })
    }

    pub fn len(&self) -> usize {
        self.control_points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.control_points.is_empty()
    }

    pub fn segment_count(&self) -> usize {
        self.control_points.len() - 1
    }

    fn padded(&self, i: isize) -> Vec3 {
        let cp = &self.control_points;
        let n = cp.len() as isize;
        if i < 0 {
            2.0 * cp[0] - cp[1]
        } else if i >= n {
            2.0 * cp[(n - 1) as usize] - cp[(n - 2) as usize]
        } else {
            cp[i as usize]
        }
    }

    /// Position and unit tangent at `t` (clamped to [0, 1]).
    pub fn eval(&self, t: f64) -> (Vec3, Vec3) {
        let segs = self.segment_count();
        let s = t.clamp(0.0, 1.0) * segs as f64;
        let seg = (s.floor() as usize).min(segs - 1);
        self.eval_segment(seg, s - seg as f64)
    }

    /// Evaluates segment `seg` (between control points `seg` and `seg + 1`)
    /// at local parameter `u` in [0, 1].
    pub fn eval_segment(&self, seg: usize, u: f64) -> (Vec3, Vec3) {
        let i = seg as isize;
        let p0 = self.padded(i - 1);
        let p1 = self.padded(i);
        let p2 = self.padded(i + 1);
        let p3 = self.padded(i + 2);
        let (w, dw) = basis(self.kind, u);
        let pos = p0 * w[0] + p1 * w[1] + p2 * w[2] + p3 * w[3];
        let d = p0 * dw[0] + p1 * dw[1] + p2 * dw[2] + p3 * dw[3];
        let tan = match d.try_normalize(1e-300) {
            Some(t) => t,
            None => (p2 - p1).try_normalize(1e-300).unwrap_or_else(Vec3::z),
        };
        (pos, tan)
    }
}

fn basis(kind: SplineKind, u: f64) -> ([f64; 4], [f64; 4]) {
    let u2 = u * u;
    let u3 = u2 * u;
    match kind {
        SplineKind::CatmullRom => (
            [
                0.5 * (-u3 + 2.0 * u2 - u),
                0.5 * (3.0 * u3 - 5.0 * u2 + 2.0),
                0.5 * (-3.0 * u3 + 4.0 * u2 + u),
                0.5 * (u3 - u2),
            ],
            [
                0.5 * (-3.0 * u2 + 4.0 * u - 1.0),
                0.5 * (9.0 * u2 - 10.0 * u),
                0.5 * (-9.0 * u2 + 8.0 * u + 1.0),
                0.5 * (3.0 * u2 - 2.0 * u),
            ],
        ),
        SplineKind::BSpline => {
            let v = 1.0 - u;
            (
                [
                    v * v * v / 6.0,
                    (3.0 * u3 - 6.0 * u2 + 4.0) / 6.0,
                    (-3.0 * u3 + 3.0 * u2 + 3.0 * u + 1.0) / 6.0,
                    u3 / 6.0,
                ],
                [
                    -0.5 * v * v,
                    1.5 * u2 - 2.0 * u,
                    -1.5 * u2 + u + 0.5,
                    0.5 * u2,
                ],
            )
        }
    }
}

/// Resamples a polyline at `count` points uniformly spaced in arc length.
/// Endpoints are reproduced exactly.
pub fn resample_arc_length(points: &[Vec3], count: usize) -> Result<Vec<Vec3>> {
    if points.len() < 2 {
        return Err(invalid("polyline needs at least 2 points"));
    }
    if count < 2 {
        return Err(invalid("resample count must be at least 2"));
    }
    let mut cum = Vec::with_capacity(points.len());
    cum.push(0.0);
    for w in points.windows(2) {
        let last = *cum.last().unwrap();
        cum.push(last + (w[1] - w[0]).norm());
    }
    let total = *cum.last().unwrap();
    if total <= 0.0 {
        return Err(invalid("polyline has zero length"));
    }
    let mut out = Vec::with_capacity(count);
    out.push(points[0]);
    let mut j = 0;
    for k in 1..count - 1 {
        let target = total * k as f64 / (count - 1) as f64;
        while j + 2 < cum.len() && cum[j + 1] < target {
            j += 1;
        }
        let span = cum[j + 1] - cum[j];
        let a = if span > 0.0 { ((target - cum[j]) / span).clamp(0.0, 1.0) } else { 0.0 };
        out.push(points[j] + (points[j + 1] - points[j]) * a);
    }
    out.push(*points.last().unwrap());
    Ok(out)
}

pub fn fit_spline(points: &[Vec3], n_c: usize, kind: SplineKind) -> Result<Spline> {
    if n_c < 4 {
        return Err(invalid(format!("n_c must be at least 4, got {n_c}")));
    }
    let cps = resample_arc_length(points, n_c)?;
    Spline::new(cps, kind)
}

/// Sum of squared distances between corresponding control points.
pub fn strand_distance(a: &Spline, b: &Spline) -> Result<f64> {
    if a.len() != b.len() {
        return Err(invalid(format!(
            "control point counts differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(control_distance(&a.control_points, &b.control_points))
}

pub(crate) fn control_distance(a: &[Vec3], b: &[Vec3]) -> f64 {
    a.iter().zip(b).map(|(p, q)| (p - q).norm_squared()).sum()
}
