use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::render::Image;

pub const PSNR_CAP: f64 = 99.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Psnr,
    Mae,
}

/// PSNR on values clamped to [0, 1], capped at [`PSNR_CAP`].
pub fn psnr(a: &Image, b: &Image) -> Result<f64> {
    a.check_same_size(b)?;
    if a.data.is_empty() {
        return Ok(PSNR_CAP);
    }
    let se: f64 = a
        .data
        .iter()
        .zip(&b.data)
        .map(|(&x, &y)| {
            let d = x.clamp(0.0, 1.0) as f64 - y.clamp(0.0, 1.0) as f64;
            d * d
        })
        .sum();
    let mse = se / a.data.len() as f64;
    if mse == 0.0 {
        return Ok(PSNR_CAP);
    }
    Ok((10.0 * (1.0 / mse).log10()).min(PSNR_CAP))
}

/// Mean absolute per-channel difference.
pub fn mae(a: &Image, b: &Image) -> Result<f64> {
    a.check_same_size(b)?;
    if a.data.is_empty() {
        return Ok(0.0);
    }
    Ok(a.data.iter().zip(&b.data).map(|(&x, &y)| (x as f64 - y as f64).abs()).sum::<f64>() / a.data.len() as f64)
}

pub fn compare_images(a: &Image, b: &Image, metric: Metric) -> Result<f64> {
    match metric {
        Metric::Psnr => psnr(a, b),
        Metric::Mae => mae(a, b),
    }
}
