use crate::{Error, Result};

/// A row-major grid of `f64` samples with one or three interleaved channels.
///
/// Samples are nominally in `[0, 1]`; intermediate results of the pipeline
/// may leave that range and are only clamped when written to disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::Config(format!(
                "images have 1 or 3 channels, got {channels}"
            )));
        }
        if width == 0 || height == 0 {
            return Err(Error::Dimension(format!(
                "image must be non-empty, got {width}x{height}"
            )));
        }
        if width * height * channels != data.len() {
            return Err(Error::Dimension(format!(
                "{width}x{height}x{channels} image needs {} samples, got {}",
                width * height * channels,
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("sample {i} is not finite")));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    /// Single-channel image from a sample vector.
    pub fn gray(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        Self::new(width, height, 1, data)
    }

    pub fn zeros(width: usize, height: usize, channels: usize) -> Self {
        assert!(channels == 1 || channels == 3);
        Self {
            width,
            height,
            channels,
            data: vec![0.0; width * height * channels],
        }
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self {
            width,
            height,
            channels: 1,
            data: vec![value; width * height],
        }
    }

    /// Single-channel image with `f(x, y)` at column `x`, row `y`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            channels: 1,
            data,
        }
    }

    pub(crate) fn from_parts(width: usize, height: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(width * height, data.len());
        Self {
            width,
            height,
            channels: 1,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.channels
    }

    /// `(width, height)`.
    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// Sample at column `x`, row `y` of a single-channel image.
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        debug_assert_eq!(self.channels, 1);
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        debug_assert_eq!(self.channels, 1);
        self.data[y * self.width + x] = value;
    }

    /// Sample with replicate-edge padding.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> f64 {
        let xc = x.clamp(0, self.width as isize - 1) as usize;
        let yc = y.clamp(0, self.height as isize - 1) as usize;
        self.get(xc, yc)
    }

    pub fn ensure_gray(&self) -> Result<()> {
        if self.channels != 1 {
            return Err(Error::Channels {
                expected: 1,
                found: self.channels,
            });
        }
        Ok(())
    }

    pub fn ensure_same_dims(&self, other: &Image) -> Result<()> {
        if self.dims() != other.dims() || self.channels != other.channels {
            return Err(Error::Dimension(format!(
                "({}, {}, {}) vs ({}, {}, {})",
                self.width, self.height, self.channels, other.width, other.height, other.channels
            )));
        }
        Ok(())
    }

    /// Extracts channel `c` as a single-channel image.
    pub fn channel(&self, c: usize) -> Image {
        assert!(c < self.channels);
        let data = self
            .data
            .iter()
            .skip(c)
            .step_by(self.channels)
            .copied()
            .collect();
        Image::from_parts(self.width, self.height, data)
    }

    /// Interleaves single-channel planes of equal size.
    pub fn from_channels(planes: &[Image]) -> Result<Image> {
        let first = planes
            .first()
            .ok_or_else(|| Error::Config("no channels given".into()))?;
        for p in planes {
            p.ensure_gray()?;
            first.ensure_same_dims(p)?;
        }
        let n = first.width * first.height;
        let mut data = Vec::with_capacity(n * planes.len());
        for i in 0..n {
            for p in planes {
                data.push(p.data[i]);
            }
        }
        Image::new(first.width, first.height, planes.len(), data)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Image {
        Image {
            data: self.data.iter().map(|&v| f(v)).collect(),
            ..*self
        }
    }

    /// Elementwise combination of two images of identical shape.
    pub fn zip_map(&self, other: &Image, f: impl Fn(f64, f64) -> f64) -> Image {
        assert_eq!(self.dims(), other.dims());
        assert_eq!(self.channels, other.channels);
        Image {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            ..*self
        }
    }

    /// Euclidean inner product of the sample vectors.
    pub fn dot(&self, other: &Image) -> f64 {
        assert_eq!(self.data.len(), other.data.len());
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn sum_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// Top-left crop to `width x height`.
    pub fn crop(&self, width: usize, height: usize) -> Image {
        assert!(width <= self.width && height <= self.height);
        let mut data = Vec::with_capacity(width * height * self.channels);
        for y in 0..height {
            let start = y * self.width * self.channels;
            data.extend_from_slice(&self.data[start..start + width * self.channels]);
        }
        Image {
            width,
            height,
            channels: self.channels,
            data,
        }
    }
}

/// Integer upscaling factor `s = 2^levels` with `s >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScaleFactor {
    levels: u32,
}

impl ScaleFactor {
    pub fn new(s: usize) -> Result<Self> {
        if s < 2 || !s.is_power_of_two() {
            return Err(Error::Domain(format!(
                "scale factor must be a power of two >= 2, got {s}"
            )));
        }
        Ok(Self {
            levels: s.trailing_zeros(),
        })
    }

    pub fn from_levels(levels: u32) -> Result<Self> {
        if levels == 0 || levels > 16 {
            return Err(Error::Domain(format!(
                "pyramid level count must be in 1..=16, got {levels}"
            )));
        }
        Ok(Self { levels })
    }

    /// The factor `s`.
    pub fn factor(self) -> usize {
        1 << self.levels
    }

    /// `log2(s)`, the number of ×2 pyramid levels.
    pub fn levels(self) -> u32 {
        self.levels
    }
}

impl std::fmt::Display for ScaleFactor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.factor())
    }
}
