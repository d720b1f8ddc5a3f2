//! Strand data model, spline fitting and procedural assets.

mod generate;
mod io;
mod spline;

pub use generate::{generate_wisp_model, HairStyle};
pub use io::{read_model, read_model_file, write_model, write_model_file};
pub use spline::{
    fit_spline, resample_arc_length, strand_distance, Spline, SplineKind, DEFAULT_CONTROL_POINTS,
};

use crate::error::{invalid, Result};
use crate::math::Vec3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scalp {
    pub center: Vec3,
    pub radius: f64,
}

impl Default for Scalp {
    fn default() -> Self {
        Scalp { center: Vec3::zeros(), radius: 0.1 }
    }
}

/// One hair as a polyline. The radius lives on the owning model.
#[derive(Clone, Debug, PartialEq)]
pub struct Strand {
    pub points: Vec<Vec3>,
}

impl Strand {
    pub fn new(points: Vec<Vec3>) -> Result<Self> {
        let s = Strand { points };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.len() < 2 {
            return Err(invalid("strand needs at least 2 points"));
        }
        for (i, w) in self.points.windows(2).enumerate() {
            if w[0] == w[1] {
                return Err(invalid(format!("strand points {i} and {} coincide", i + 1)));
            }
        }
        if self.points.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(invalid("strand has non-finite coordinates"));
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    pub fn fit(&self, n_c: usize) -> Result<Spline> {
        fit_spline(&self.points, n_c, SplineKind::CatmullRom)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StrandModel {
    pub strands: Vec<Strand>,
    pub radius: f64,
    pub scalp: Scalp,
}

impl StrandModel {
    pub fn new(strands: Vec<Strand>, radius: f64, scalp: Scalp) -> Result<Self> {
        let m = StrandModel { strands, radius, scalp };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.strands.is_empty() {
            return Err(invalid("model has no strands"));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(invalid(format!("radius must be positive, got {}", self.radius)));
        }
        for (i, s) in self.strands.iter().enumerate() {
            s.validate().map_err(|e| invalid(format!("strand {i}: {e}")))?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.strands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strands.is_empty()
    }

    /// Fits a Catmull-Rom spline to every strand.
    pub fn fit_all(&self, n_c: usize) -> Result<Vec<Spline>> {
        self.strands.iter().map(|s| s.fit(n_c)).collect()
    }

    /// Axis-aligned bounds of all points.
    pub fn bounds(&self) -> (Vec3, Vec3) {
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        for p in self.strands.iter().flat_map(|s| &s.points) {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        (lo, hi)
    }
}
