use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::Point;

use super::pgm::{read_pgm, GrayImage};
use super::{Domain, Field, Landscape};

/// Grayscale image as a fitness field. Samples are normalized so the darkest
/// pixel maps to 0 and the brightest to 1, then raised to `gamma` to sharpen
/// bright regions. A constant image normalizes to all zeros.
///
/// Coordinates are `(column, row)` in pixel units; pixel centers sit on
/// integer coordinates and values in between are bilinear.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageField {
    pub width: usize,
    pub height: usize,
    pub gamma: f64,
    values: Vec<f64>,
}

impl ImageField {
    pub fn from_gray(image: &GrayImage, gamma: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma >= 1.0) {
            return Err(Error::InvalidParams(format!(
                "gamma must be >= 1, got {gamma}"
            )));
        }
        let lo = *image.samples.iter().min().expect("nonempty image") as f64;
        let hi = *image.samples.iter().max().expect("nonempty image") as f64;
        let values = image
            .samples
            .iter()
            .map(|&s| {
                if hi > lo {
                    ((s as f64 - lo) / (hi - lo)).powf(gamma)
                } else {
                    0.0
                }
            })
            .collect();
        Ok(ImageField {
            width: image.width,
            height: image.height,
            gamma,
            values,
        })
    }

    pub fn pixel(&self, col: usize, row: usize) -> f64 {
        self.values[row * self.width + col]
    }

    pub(crate) fn sample(&self, x: f64, y: f64) -> f64 {
        let x = x.clamp(0.0, (self.width - 1) as f64);
        let y = y.clamp(0.0, (self.height - 1) as f64);
        let c0 = (x.floor() as usize).min(self.width.saturating_sub(2));
        let r0 = (y.floor() as usize).min(self.height.saturating_sub(2));
        let c1 = (c0 + 1).min(self.width - 1);
        let r1 = (r0 + 1).min(self.height - 1);
        let fx = x - c0 as f64;
        let fy = y - r0 as f64;
        let top = self.pixel(c0, r0) * (1.0 - fx) + self.pixel(c1, r0) * fx;
        let bottom = self.pixel(c0, r1) * (1.0 - fx) + self.pixel(c1, r1) * fx;
        top * (1.0 - fy) + bottom * fy
    }

    /// First brightest pixel in row-major order.
    fn brightest(&self) -> (usize, usize) {
        let (k, _) =
            self.values
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (k, &v)| {
                    if v > best.1 {
                        (k, v)
                    } else {
                        best
                    }
                });
        (k % self.width, k / self.width)
    }
}

/// Image landscape over `[0, W-1] x [0, H-1]`. The listed peak is the first
/// brightest pixel.
pub fn image_landscape(image: &GrayImage, gamma: f64) -> Result<Landscape> {
    if image.width < 2 || image.height < 2 {
        return Err(Error::InvalidParams(
            "image field needs at least 2x2 pixels".into(),
        ));
    }
    let field = ImageField::from_gray(image, gamma)?;
    let (col, row) = field.brightest();
    let domain = Domain::rect(
        [0.0, (image.width - 1) as f64],
        [0.0, (image.height - 1) as f64],
    )?;
    Landscape::new(
        domain,
        Field::Image(field),
        0.0,
        vec![Point::xy(col as f64, row as f64)],
    )
}

pub fn load_image_field(path: impl AsRef<Path>, gamma: f64) -> Result<Landscape> {
    image_landscape(&read_pgm(path)?, gamma)
}
