//! Central-difference image gradients and their exact transpose.

use crate::{Error, Image, Result};

/// Per-pixel 2-vectors `(gx, gy)` on an image's grid. `gx` is along
/// columns (x), `gy` along rows (y).
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    width: usize,
    height: usize,
    gx: Vec<f64>,
    gy: Vec<f64>,
}

impl GradientField {
    pub fn new(width: usize, height: usize, gx: Vec<f64>, gy: Vec<f64>) -> Result<Self> {
        if gx.len() != width * height || gy.len() != width * height {
            return Err(Error::Dimension(format!(
                "gradient components must have {} samples",
                width * height
            )));
        }
        if gx.iter().chain(&gy).any(|v| !v.is_finite()) {
            return Err(Error::Domain("gradient field is not finite".into()));
        }
        Ok(Self {
            width,
            height,
            gx,
            gy,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            gx: vec![0.0; width * height],
            gy: vec![0.0; width * height],
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn gx(&self) -> &[f64] {
        &self.gx
    }

    pub fn gy(&self) -> &[f64] {
        &self.gy
    }

    pub(crate) fn components_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.gx, &mut self.gy)
    }

    /// The two components as single-channel images.
    pub fn to_images(&self) -> (Image, Image) {
        (
            Image::from_parts(self.width, self.height, self.gx.clone()),
            Image::from_parts(self.width, self.height, self.gy.clone()),
        )
    }

    pub fn from_images(gx: &Image, gy: &Image) -> Result<Self> {
        gx.ensure_same_dims(gy)?;
        Self::new(
            gx.width(),
            gx.height(),
            gx.data().to_vec(),
            gy.data().to_vec(),
        )
    }

    /// `self - other`, componentwise.
    pub fn sub(&self, other: &GradientField) -> GradientField {
        assert_eq!(self.dims(), other.dims());
        let d = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x - y).collect();
        GradientField {
            width: self.width,
            height: self.height,
            gx: d(&self.gx, &other.gx),
            gy: d(&self.gy, &other.gy),
        }
    }

    pub fn sum_sq(&self) -> f64 {
        self.gx.iter().chain(&self.gy).map(|v| v * v).sum()
    }
}

/// `gx(x, y) = (u(x+1, y) - u(x-1, y)) / 2` and likewise for `gy`, with
/// replicate-edge padding.
pub fn central_gradient(img: &Image) -> GradientField {
    let (w, h) = img.dims();
    let mut gx = vec![0.0; w * h];
    let mut gy = vec![0.0; w * h];
    for y in 0..h {
        let up = y.saturating_sub(1);
        let down = (y + 1).min(h - 1);
        for x in 0..w {
            let left = x.saturating_sub(1);
            let right = (x + 1).min(w - 1);
            gx[y * w + x] = 0.5 * (img.get(right, y) - img.get(left, y));
            gy[y * w + x] = 0.5 * (img.get(x, down) - img.get(x, up));
        }
    }
    GradientField {
        width: w,
        height: h,
        gx,
        gy,
    }
}

/// Exact transpose of [`central_gradient`] (the negative divergence, with
/// the boundary folding of replicate padding).
pub fn central_gradient_transpose(field: &GradientField) -> Image {
    let (w, h) = field.dims();
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        let up = y.saturating_sub(1);
        let down = (y + 1).min(h - 1);
        for x in 0..w {
            let left = x.saturating_sub(1);
            let right = (x + 1).min(w - 1);
            let i = y * w + x;
            let (a, b) = (0.5 * field.gx[i], 0.5 * field.gy[i]);
            out[y * w + right] += a;
            out[y * w + left] -= a;
            out[down * w + x] += b;
            out[up * w + x] -= b;
        }
    }
    Image::from_parts(w, h, out)
}
