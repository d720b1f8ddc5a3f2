use crate::math::Vec3;
use crate::render::CameraFrame;

/// Screen-space extent of one cross-section.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectionWidth {
    /// Width in pixels.
    pub l_w: f64,
    /// Depth extent in world units.
    pub l_t: f64,
    /// Camera depth of the section center.
    pub depth: f64,
    /// Raw extents fell below the projection of one fiber diameter.
    pub degenerate: bool,
    /// Some point lies behind the camera; widths are zero.
    pub behind: bool,
}

impl SectionWidth {
    pub const BEHIND: SectionWidth = SectionWidth { l_w: 0.0, l_t: 0.0, depth: 0.0, degenerate: false, behind: true };
}

/// Largest pairwise screen distance and depth difference of projected points
/// given as `(x, y, depth)`.
pub fn screen_extent(points: &[(f64, f64, f64)]) -> (f64, f64) {
    let mut l_w: f64 = 0.0;
    let mut l_t: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            l_w = l_w.max(((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt());
            l_t = l_t.max((a.2 - b.2).abs());
        }
    }
    (l_w, l_t)
}

/// Corners are first flattened onto the plane through `center` normal to
/// `tangent`, then projected. Extents are floored at one fiber diameter `2r`.
pub fn section_width(center: &Vec3, tangent: &Vec3, corners: &[Vec3; 4], r: f64, cam: &CameraFrame) -> SectionWidth {
    let t = tangent.try_normalize(1e-300).unwrap_or_else(Vec3::z);
    let Some((_, _, depth)) = cam.project(center) else { return SectionWidth::BEHIND };
    let mut pts = [(0.0, 0.0, 0.0); 4];
    for (p, c) in pts.iter_mut().zip(corners) {
        let q = c - t * (c - center).dot(&t);
        match cam.project(&q) {
            Some(v) => *p = v,
            None => return SectionWidth::BEHIND,
        }
    }
    let (l_w, l_t) = screen_extent(&pts);
    let w_min = 2.0 * r / cam.pixel_size(depth);
    let degenerate = l_w < w_min;
    SectionWidth { l_w: l_w.max(w_min), l_t: l_t.max(2.0 * r), depth, degenerate, behind: false }
}

/// Width of a single fiber at `p`.
pub fn fiber_width(p: &Vec3, r: f64, cam: &CameraFrame) -> SectionWidth {
    match cam.project(p) {
        None => SectionWidth::BEHIND,
        Some((_, _, depth)) => {
            SectionWidth { l_w: 2.0 * r / cam.pixel_size(depth), l_t: 2.0 * r, depth, degenerate: false, behind: false }
        }
    }
}

/// LoD width of a segment: the larger of its two end widths, zero when
/// either end is behind the camera.
pub fn segment_width(a: &SectionWidth, b: &SectionWidth) -> f64 {
    if a.behind || b.behind {
        0.0
    } else {
        a.l_w.max(b.l_w)
    }
}
