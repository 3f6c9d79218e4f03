use rayon::prelude::*;

use super::Image;
use crate::{Error, Result};

/// Sampled, unit-sum Gaussian `h` used by the blur-and-decimate forward model.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianKernel {
    sigma: f64,
    radius: usize,
    taps: Vec<f64>,
}

impl GaussianKernel {
    /// Radius is `ceil(3 sigma)`; taps are the sampled Gaussian renormalized
    /// to unit sum.
    pub fn new(sigma: f64) -> Result<Self> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::Domain(format!(
                "gaussian sigma must be positive and finite, got {sigma}"
            )));
        }
        let radius = (3.0 * sigma).ceil() as usize;
        let mut taps: Vec<f64> = (0..=2 * radius)
            .map(|i| {
                let d = i as f64 - radius as f64;
                (-d * d / (2.0 * sigma * sigma)).exp()
            })
            .collect();
        let sum: f64 = taps.iter().sum();
        taps.iter_mut().for_each(|t| *t /= sum);
        Ok(Self {
            sigma,
            radius,
            taps,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// The 1-D factor, `2 * radius + 1` taps.
    pub fn taps_1d(&self) -> &[f64] {
        &self.taps
    }

    /// The full separable 2-D weight grid, row-major.
    pub fn taps_2d(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.taps.len() * self.taps.len());
        for a in &self.taps {
            for b in &self.taps {
                out.push(a * b);
            }
        }
        out
    }
}

/// A linear 1-D operator stored as gather lists: `out[i] = Σ w · in[j]`.
struct LineOp {
    rows: Vec<Vec<(usize, f64)>>,
}

impl LineOp {
    /// Replicate-padded convolution `out[p] = Σ_k w[k] in[clamp(p - k)]`.
    fn convolution(n: usize, taps: &[f64]) -> Self {
        let r = (taps.len() / 2) as isize;
        let rows = (0..n as isize)
            .map(|p| {
                (-r..=r)
                    .map(|k| {
                        let j = (p - k).clamp(0, n as isize - 1) as usize;
                        (j, taps[(k + r) as usize])
                    })
                    .collect()
            })
            .collect();
        Self { rows }
    }

    fn transpose(&self, n_in: usize) -> Self {
        let mut rows = vec![Vec::new(); n_in];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, w) in row {
                rows[j].push((i, w));
            }
        }
        Self { rows }
    }

    fn along_x(&self, data: &[f64], width: usize, height: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.rows.len() * height];
        out.par_chunks_mut(self.rows.len())
            .enumerate()
            .for_each(|(y, dst)| {
                let src = &data[y * width..(y + 1) * width];
                for (d, row) in dst.iter_mut().zip(&self.rows) {
                    *d = row.iter().map(|&(j, w)| w * src[j]).sum();
                }
            });
        out
    }

    fn along_y(&self, data: &[f64], width: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.rows.len() * width];
        out.par_chunks_mut(width)
            .zip(self.rows.par_iter())
            .for_each(|(dst, row)| {
                for &(j, w) in row {
                    let src = &data[j * width..(j + 1) * width];
                    dst.iter_mut().zip(src).for_each(|(d, s)| *d += w * s);
                }
            });
        out
    }
}

fn per_channel(img: &Image, f: impl Fn(&Image) -> Image) -> Image {
    if img.channels() == 1 {
        return f(img);
    }
    let planes: Vec<Image> = (0..img.channels()).map(|c| f(&img.channel(c))).collect();
    Image::from_channels(&planes).expect("planes share a shape")
}

/// Separable 2-D convolution with replicate-edge padding; output has the
/// input's dimensions. Multi-channel images are filtered per channel.
pub fn convolve(img: &Image, kernel: &GaussianKernel) -> Image {
    per_channel(img, |plane| {
        let (w, h) = plane.dims();
        let tmp = LineOp::convolution(w, kernel.taps_1d()).along_x(plane.data(), w, h);
        let out = LineOp::convolution(h, kernel.taps_1d()).along_y(&tmp, w);
        Image::from_parts(w, h, out)
    })
}

/// Exact transpose of [`convolve`], boundary replication included.
///
/// Away from the border this equals convolution with the flipped kernel;
/// near it the clamped reads of the forward operator fold back onto the
/// edge samples.
pub fn convolve_transpose(img: &Image, kernel: &GaussianKernel) -> Image {
    per_channel(img, |plane| {
        let (w, h) = plane.dims();
        let ty = LineOp::convolution(h, kernel.taps_1d()).transpose(h);
        let tx = LineOp::convolution(w, kernel.taps_1d()).transpose(w);
        let tmp = ty.along_y(plane.data(), w);
        Image::from_parts(w, h, tx.along_x(&tmp, w, h))
    })
}
