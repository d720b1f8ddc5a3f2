use crate::error::{invalid, Result};
use crate::math::Rgb;

/// Linear RGB image, row-major from the top-left pixel.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    pub width: u32,
    pub height: u32,
    pub data: Vec<f32>,
}

impl Image {
    pub fn new(width: u32, height: u32) -> Self {
        Image { width, height, data: vec![0.0; 3 * width as usize * height as usize] }
    }

    pub fn from_data(width: u32, height: u32, data: Vec<f32>) -> Result<Self> {
        if data.len() != 3 * width as usize * height as usize {
            return Err(invalid(format!("expected {} samples for {width}x{height}, got {}", 3 * width as usize * height as usize, data.len())));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(invalid("image samples must be finite"));
        }
        Ok(Image { width, height, data })
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }

    pub fn get(&self, x: u32, y: u32) -> Rgb {
        let i = 3 * (y as usize * self.width as usize + x as usize);
        Rgb::new(self.data[i] as f64, self.data[i + 1] as f64, self.data[i + 2] as f64)
    }

    pub fn set(&mut self, x: u32, y: u32, c: Rgb) {
        let i = 3 * (y as usize * self.width as usize + x as usize);
        for k in 0..3 {
            self.data[i + k] = c.0[k] as f32;
        }
    }

    pub fn pixels(&self) -> impl Iterator<Item = Rgb> + '_ {
        self.data.chunks_exact(3).map(|c| Rgb::new(c[0] as f64, c[1] as f64, c[2] as f64))
    }

    pub fn mean_luminance(&self) -> f64 {
        if self.pixel_count() == 0 {
            return 0.0;
        }
        self.pixels().map(Rgb::luminance).sum::<f64>() / self.pixel_count() as f64
    }

    /// Sum of all channel values.
    pub fn total(&self) -> f64 {
        self.data.iter().map(|&v| v as f64).sum()
    }

    pub fn max_abs_diff(&self, other: &Image) -> Result<f64> {
        self.check_same_size(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs() as f64).fold(0.0, f64::max))
    }

    pub fn check_same_size(&self, other: &Image) -> Result<()> {
        if self.width != other.width || self.height != other.height {
            return Err(invalid(format!(
                "image sizes differ: {}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )));
        }
        Ok(())
    }

    /// Pixel-wise mean of equally sized images, accumulated in f64.
    pub fn average(images: &[Image]) -> Result<Image> {
        let first = images.first().ok_or_else(|| invalid("cannot average zero images"))?;
        let mut acc = vec![0.0f64; first.data.len()];
        for im in images {
            first.check_same_size(im)?;
            for (a, &v) in acc.iter_mut().zip(&im.data) {
                *a += v as f64;
            }
        }
        let n = images.len() as f64;
        Ok(Image { width: first.width, height: first.height, data: acc.into_iter().map(|v| (v / n) as f32).collect() })
    }
}
