use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::math::Vec3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ray {
    pub origin: Vec3,
    /// Unit direction.
    pub dir: Vec3,
}

impl Ray {
    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + self.dir * t
    }
}

/// Pinhole camera. Pixel coordinates have a top-left origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Camera {
    pub position: [f64; 3],
    pub look_at: [f64; 3],
    pub up: [f64; 3],
    /// Vertical field of view in radians.
    pub fov: f64,
    pub width: u32,
    pub height: u32,
}

/// Precomputed camera basis.
#[derive(Clone, Copy, Debug)]
pub struct CameraFrame {
    pub origin: Vec3,
    pub right: Vec3,
    pub up: Vec3,
    pub forward: Vec3,
    pub width: u32,
    pub height: u32,
    /// Image-plane half height at unit depth.
    tan_half: f64,
}

impl Camera {
    pub fn new(position: Vec3, look_at: Vec3, up: Vec3, fov: f64, width: u32, height: u32) -> Self {
        Camera {
            position: position.into(),
            look_at: look_at.into(),
            up: up.into(),
            fov,
            width,
            height,
        }
    }

    pub fn frame(&self) -> Result<CameraFrame> {
        if !(self.fov > 0.0 && self.fov < std::f64::consts::PI) {
            return Err(invalid(format!("fov must lie in (0, pi), got {}", self.fov)));
        }
        if self.width == 0 || self.height == 0 {
            return Err(invalid("image dimensions must be positive"));
        }
        let origin = Vec3::from(self.position);
        let forward = (Vec3::from(self.look_at) - origin)
            .try_normalize(1e-300)
            .ok_or_else(|| invalid("camera position equals look-at point"))?;
        let right = forward
            .cross(&Vec3::from(self.up))
            .try_normalize(1e-12)
            .ok_or_else(|| invalid("camera up vector is parallel to the view direction"))?;
        let up = right.cross(&forward);
        Ok(CameraFrame { origin, right, up, forward, width: self.width, height: self.height, tan_half: (0.5 * self.fov).tan() })
    }
}

impl CameraFrame {
    fn aspect(&self) -> f64 {
        self.width as f64 / self.height as f64
    }

    /// Ray through continuous pixel position `(x, y)`.
    pub fn ray(&self, x: f64, y: f64) -> Ray {
        let sx = (2.0 * x / self.width as f64 - 1.0) * self.tan_half * self.aspect();
        let sy = (1.0 - 2.0 * y / self.height as f64) * self.tan_half;
        let dir = (self.forward + self.right * sx + self.up * sy).normalize();
        Ray { origin: self.origin, dir }
    }

    /// Depth along the view axis.
    pub fn depth(&self, p: &Vec3) -> f64 {
        (p - self.origin).dot(&self.forward)
    }

    /// Pixel coordinates and depth, or `None` behind the camera.
    pub fn project(&self, p: &Vec3) -> Option<(f64, f64, f64)> {
        let d = p - self.origin;
        let z = d.dot(&self.forward);
        if z <= 0.0 {
            return None;
        }
        let sx = d.dot(&self.right) / (z * self.tan_half * self.aspect());
        let sy = d.dot(&self.up) / (z * self.tan_half);
        Some((0.5 * (sx + 1.0) * self.width as f64, 0.5 * (1.0 - sy) * self.height as f64, z))
    }

    /// World-space size of one pixel at `depth`.
    pub fn pixel_size(&self, depth: f64) -> f64 {
        2.0 * depth * self.tan_half / self.height as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cam() -> CameraFrame {
        Camera::new(Vec3::new(0.0, 0.0, 5.0), Vec3::zeros(), Vec3::y(), 0.8, 64, 48).frame().unwrap()
    }

    #[test]
    fn project_inverts_ray() {
        let c = cam();
        for (x, y) in [(0.5, 0.5), (10.25, 40.0), (63.0, 1.0)] {
            let r = c.ray(x, y);
            let p = r.at(3.7);
            let (px, py, _) = c.project(&p).unwrap();
            assert!((px - x).abs() < 1e-9 && (py - y).abs() < 1e-9);
        }
        assert!(c.project(&Vec3::new(0.0, 0.0, 6.0)).is_none());
    }

    #[test]
    fn pixel_size_matches_projection() {
        let c = cam();
        let s = c.pixel_size(5.0);
        let (a, _, _) = c.project(&Vec3::zeros()).unwrap();
        let (b, _, _) = c.project(&Vec3::new(s, 0.0, 0.0)).unwrap();
        assert!((b - a - 1.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_cameras_rejected() {
        let bad = Camera::new(Vec3::zeros(), Vec3::zeros(), Vec3::y(), 0.8, 8, 8);
        assert!(bad.frame().is_err());
        let bad = Camera::new(Vec3::z(), Vec3::zeros(), Vec3::z(), 0.8, 8, 8);
        assert!(bad.frame().is_err());
        let bad = Camera::new(Vec3::z(), Vec3::zeros(), Vec3::y(), 3.2, 8, 8);
        assert!(bad.frame().is_err());
    }
}
