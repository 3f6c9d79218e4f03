//! RMSE, SSIM and gray-level co-occurrence texture features.
//!
//! Three-channel inputs are compared on their luma.

use serde::{Deserialize, Serialize};

use crate::imaging::luma;
use crate::{Error, GaussianKernel, Image, Result};

const PEAK: f64 = 255.0;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_WINDOW: usize = 11;
pub const DEFAULT_LEVELS: usize = 8;
pub const DEFAULT_OFFSET: (isize, isize) = (0, 1);

fn gray(img: &Image) -> Image {
    if img.channels() == 3 {
        luma(img)
    } else {
        img.clone()
    }
}

fn pair(a: &Image, b: &Image) -> Result<(Image, Image)> {
    if a.dims() != b.dims() {
        return Err(Error::Dimension(format!(
            "{}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    Ok((gray(a), gray(b)))
}

/// Root-mean-square error on the 8-bit scale.
pub fn rmse(a: &Image, b: &Image) -> Result<f64> {
    let (a, b) = pair(a, b)?;
    let n = a.data().len() as f64;
    Ok(PEAK * (a.zip_map(&b, |x, y| x - y).sum_sq() / n).sqrt())
}

/// Separable filtering keeping only fully covered positions.
fn filter_valid(data: &[f64], w: usize, h: usize, taps: &[f64]) -> (Vec<f64>, usize, usize) {
    let n = taps.len();
    let (ow, oh) = (w + 1 - n, h + 1 - n);
    let mut rows = vec![0.0; ow * h];
    for y in 0..h {
        for x in 0..ow {
            rows[y * ow + x] = taps
                .iter()
                .enumerate()
                .map(|(k, t)| t * data[y * w + x + k])
                .sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = taps
                .iter()
                .enumerate()
                .map(|(k, t)| t * rows[(y + k) * ow + x])
                .sum();
        }
    }
    (out, ow, oh)
}

/// Mean structural similarity over all 11×11 Gaussian windows (σ = 1.5)
/// lying fully inside the image, with `L = 255`, `K1 = 0.01`, `K2 = 0.03`.
pub fn ssim(a: &Image, b: &Image) -> Result<f64> {
    let (a, b) = pair(a, b)?;
    let (w, h) = a.dims();
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::Metric(format!(
            "SSIM needs at least {SSIM_WINDOW}x{SSIM_WINDOW} pixels, got {w}x{h}"
        )));
    }
    let kernel = GaussianKernel::new(SSIM_SIGMA)?;
    let taps = kernel.taps_1d();
    debug_assert_eq!(taps.len(), SSIM_WINDOW);
    let x: Vec<f64> = a.data().iter().map(|v| v * PEAK).collect();
    let y: Vec<f64> = b.data().iter().map(|v| v * PEAK).collect();
    let prod = |p: &[f64], q: &[f64]| -> Vec<f64> { p.iter().zip(q).map(|(s, t)| s * t).collect() };
    let (mx, ow, oh) = filter_valid(&x, w, h, taps);
    let (my, ..) = filter_valid(&y, w, h, taps);
    let (sxx, ..) = filter_valid(&prod(&x, &x), w, h, taps);
    let (syy, ..) = filter_valid(&prod(&y, &y), w, h, taps);
    let (sxy, ..) = filter_valid(&prod(&x, &y), w, h, taps);
    let c1 = (0.01 * PEAK).powi(2);
    let c2 = (0.03 * PEAK).powi(2);
    let total: f64 = (0..ow * oh)
        .map(|i| {
            let (ux, uy) = (mx[i], my[i]);
            let vx = sxx[i] - ux * ux;
            let vy = syy[i] - uy * uy;
            let cov = sxy[i] - ux * uy;
            ((2.0 * ux * uy + c1) * (2.0 * cov + c2)) / ((ux * ux + uy * uy + c1) * (vx + vy + c2))
        })
        .sum();
    Ok(total / (ow * oh) as f64)
}

/// Energy, homogeneity and normalized entropy of a co-occurrence matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TextureFeatures {
    pub energy: f64,
    pub homogeneity: f64,
    pub entropy: f64,
}

impl TextureFeatures {
    fn as_array(&self) -> [f64; 3] {
        [self.energy, self.homogeneity, self.entropy]
    }
}

/// Symmetric, normalized co-occurrence matrix (`levels × levels`,
/// row-major) of `img` quantized to `levels` gray levels, counting pixel
/// pairs at `offset = (row, col)`.
pub fn glcm(img: &Image, levels: usize, offset: (isize, isize)) -> Result<Vec<f64>> {
    if levels < 2 {
        return Err(Error::Domain(format!(
            "GLCM needs at least 2 levels, got {levels}"
        )));
    }
    let img = gray(img);
    let (w, h) = (img.width() as isize, img.height() as isize);
    let q = |v: f64| ((v * levels as f64).floor().max(0.0) as usize).min(levels - 1);
    let (dr, dc) = offset;
    let mut counts = vec![0.0; levels * levels];
    let mut total = 0.0;
    for y in 0..h {
        for x in 0..w {
            let (ny, nx) = (y + dr, x + dc);
            if ny < 0 || ny >= h || nx < 0 || nx >= w {
                continue;
            }
            let i = q(img.get(x as usize, y as usize));
            let j = q(img.get(nx as usize, ny as usize));
            counts[i * levels + j] += 1.0;
            counts[j * levels + i] += 1.0;
            total += 2.0;
        }
    }
    if total == 0.0 {
        return Err(Error::Metric(format!(
            "offset {offset:?} leaves no pixel pairs in a {w}x{h} image"
        )));
    }
    counts.iter_mut().for_each(|c| *c /= total);
    Ok(counts)
}

pub fn glcm_features(
    img: &Image,
    levels: usize,
    offset: (isize, isize),
) -> Result<TextureFeatures> {
    let p = glcm(img, levels, offset)?;
    let mut f = TextureFeatures {
        energy: 0.0,
        homogeneity: 0.0,
        entropy: 0.0,
    };
    for i in 0..levels {
        for j in 0..levels {
            let v = p[i * levels + j];
            f.energy += v * v;
            f.homogeneity += v / (1.0 + i.abs_diff(j) as f64);
            if v > 0.0 {
                f.entropy -= v * v.log2();
            }
        }
    }
    f.entropy /= ((levels * levels) as f64).log2();
    Ok(f)
}

/// Mean relative deviation of `test`'s features from `reference`'s.
pub fn feature_distance(reference: &TextureFeatures, test: &TextureFeatures) -> f64 {
    let (r, t) = (reference.as_array(), test.as_array());
    r.iter()
        .zip(&t)
        .map(|(r, t)| (t - r).abs() / r.abs().max(1e-9))
        .sum::<f64>()
        / 3.0
}

/// [`feature_distance`] between the default-parameter GLCM features of
/// both images.
pub fn texture_similarity(reference: &Image, test: &Image) -> Result<f64> {
    let r = glcm_features(reference, DEFAULT_LEVELS, DEFAULT_OFFSET)?;
    let t = glcm_features(test, DEFAULT_LEVELS, DEFAULT_OFFSET)?;
    Ok(feature_distance(&r, &t))
}

/// All metrics for one test image against its reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub rmse: f64,
    pub ssim: f64,
    pub reference: TextureFeatures,
    pub test: TextureFeatures,
    pub similarity: f64,
}

pub fn quality_report(reference: &Image, test: &Image) -> Result<QualityReport> {
    let r = glcm_features(reference, DEFAULT_LEVELS, DEFAULT_OFFSET)?;
    let t = glcm_features(test, DEFAULT_LEVELS, DEFAULT_OFFSET)?;
    Ok(QualityReport {
        rmse: rmse(reference, test)?,
        ssim: ssim(reference, test)?,
        reference: r,
        test: t,
        similarity: feature_distance(&r, &t),
    })
}
