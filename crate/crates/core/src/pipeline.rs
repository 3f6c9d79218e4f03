//! Level-by-level driver, color handling and the benchmark degradation.

use crate::config::{AlphaMode, ColorMode, PipelineConfig};
use crate::fracgrad::MaskBanks;
use crate::imaging::{bicubic_resize, blur_downsample, luma, rgb_to_yuv, yuv_to_rgb};
use crate::pyramid::{interpolate_level, optimize_alpha, PyramidLevel};
use crate::reconstruct::{reconstruct, Reconstruction};
use crate::{Error, GaussianKernel, Image, Result, ScaleFactor};

/// What happened at one ×2 level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelReport {
    /// The order used.
    pub alpha: f64,
    /// `(α, J(α))` over the searched grid; one entry for a fixed order.
    pub trace: Vec<(f64, f64)>,
    /// Energy of every reconstruction iterate, starting from the
    /// interpolated image.
    pub energies: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SuperResolution {
    pub image: Image,
    pub levels: Vec<LevelReport>,
}

/// Interpolates `f` with `banks` and reconstructs the result.
pub fn refine_with_banks(
    f: &Image,
    banks: &MaskBanks,
    cfg: &PipelineConfig,
) -> Result<Reconstruction> {
    let kernel = GaussianKernel::new(cfg.sigma)?;
    let (u0, target) = interpolate_level(&PyramidLevel::new(0, f.clone())?, banks)?;
    reconstruct(&u0, f, &target, &cfg.reconstruction, &kernel, 2)
}

/// One ×2 level: order search (or the fixed order), interpolation and
/// reconstruction.
pub fn refine_level(f: &Image, cfg: &PipelineConfig) -> Result<(Image, LevelReport)> {
    let kernel = GaussianKernel::new(cfg.sigma)?;
    let grid = match cfg.alpha_mode {
        AlphaMode::Auto => cfg.alpha_grid.clone(),
        AlphaMode::Fixed(a) => vec![a],
    };
    let search = optimize_alpha(f, &grid, &kernel, cfg.support)?;
    let rec = reconstruct(
        &search.image,
        f,
        &search.gradient,
        &cfg.reconstruction,
        &kernel,
        2,
    )?;
    Ok((
        rec.image,
        LevelReport {
            alpha: search.alpha_star,
            trace: search.trace,
            energies: rec.energies,
        },
    ))
}

/// Upscales a single-channel image by `cfg.scale`, one ×2 level at a time.
pub fn super_resolve(f: &Image, cfg: &PipelineConfig) -> Result<SuperResolution> {
    f.ensure_gray()?;
    cfg.validate()?;
    let mut image = f.clone();
    let mut levels = Vec::with_capacity(cfg.scale.levels() as usize);
    for _ in 0..cfg.scale.levels() {
        let (next, report) = refine_level(&image, cfg)?;
        image = next;
        levels.push(report);
    }
    Ok(SuperResolution { image, levels })
}

/// [`super_resolve`] for gray or RGB input. RGB is either reduced to luma
/// first or, in luma mode, super-resolved on Y with U and V resized
/// bicubically.
pub fn upscale(img: &Image, cfg: &PipelineConfig) -> Result<SuperResolution> {
    match img.channels() {
        1 => super_resolve(img, cfg),
        3 => match cfg.color_mode {
            ColorMode::Grayscale => super_resolve(&luma(img), cfg),
            ColorMode::Luma => {
                let yuv = rgb_to_yuv(img)?;
                let sr = super_resolve(&yuv.channel(0), cfg)?;
                let s = cfg.scale.factor();
                let planes = [
                    sr.image,
                    bicubic_resize(&yuv.channel(1), s),
                    bicubic_resize(&yuv.channel(2), s),
                ];
                Ok(SuperResolution {
                    image: yuv_to_rgb(&Image::from_channels(&planes)?)?,
                    levels: sr.levels,
                })
            }
        },
        n => Err(Error::Channels {
            expected: 3,
            found: n,
        }),
    }
}

/// Blur applied before decimating by `s` in one step so that the result
/// matches `log2 s` rounds of blur `sigma` and ×2 decimation: the
/// variances `σ² (1 + 4 + … + 4^(k-1)) = σ² (s² − 1) / 3` add up.
pub fn degradation_sigma(sigma: f64, s: ScaleFactor) -> f64 {
    let s = s.factor() as f64;
    sigma * ((s * s - 1.0) / 3.0).sqrt()
}

/// Crops `hr` to a multiple of `s`, blurs with [`degradation_sigma`] and
/// decimates. Returns the cropped reference and the low-resolution input.
pub fn degrade(hr: &Image, s: ScaleFactor, sigma: f64) -> Result<(Image, Image)> {
    let f = s.factor();
    let (w, h) = ((hr.width() / f) * f, (hr.height() / f) * f);
    if w == 0 || h == 0 {
        return Err(Error::Dimension(format!(
            "{}x{} image is smaller than the scale factor {f}",
            hr.width(),
            hr.height()
        )));
    }
    let cropped = hr.crop(w, h);
    let kernel = GaussianKernel::new(degradation_sigma(sigma, s))?;
    let lr = blur_downsample(&cropped, &kernel, f)?;
    Ok((cropped, lr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::convolve;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn quick(scale: usize) -> PipelineConfig {
        let mut c = PipelineConfig {
            scale: ScaleFactor::new(scale).unwrap(),
            ..Default::default()
        };
        c.reconstruction.max_iters = 10;
        c
    }

    #[test]
    fn constant_stays_constant() {
        let f = Image::filled(6, 5, 0.42);
        let out = super_resolve(&f, &quick(2)).unwrap();
        assert_eq!(out.image.dims(), (12, 10));
        assert!(out.image.data().iter().all(|&v| (v - 0.42).abs() < 1e-12));
        assert_eq!(out.levels[0].alpha, 1.0);
    }

    #[test]
    fn level_count_and_dims() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = Image::from_fn(9, 7, |_, _| rng.gen());
        let out = super_resolve(&f, &quick(4)).unwrap();
        assert_eq!(out.levels.len(), 2);
        assert_eq!(out.image.dims(), (36, 28));
        assert!(out.levels.iter().all(|l| l.trace.len() == 10));
    }

    #[test]
    fn fixed_alpha_skips_search() {
        let f = Image::from_fn(8, 8, |x, y| (x * y) as f64 / 64.0);
        let mut c = quick(2);
        c.alpha_mode = AlphaMode::Fixed(0.6);
        let out = super_resolve(&f, &c).unwrap();
        assert_eq!(out.levels[0].alpha, 0.6);
        assert_eq!(out.levels[0].trace.len(), 1);
    }

    #[test]
    fn color_modes() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rgb = Image::new(6, 6, 3, (0..108).map(|_| rng.gen()).collect()).unwrap();
        let out = upscale(&rgb, &quick(2)).unwrap();
        assert_eq!((out.image.channels(), out.image.dims()), (3, (12, 12)));
        let mut c = quick(2);
        c.color_mode = ColorMode::Grayscale;
        assert_eq!(upscale(&rgb, &c).unwrap().image.channels(), 1);
        let two = Image::new(2, 2, 2, vec![0.0; 8]);
        assert!(two.is_err() || upscale(&two.unwrap(), &c).is_err());
    }

    #[test]
    fn degradation_composes_like_the_pyramid() {
        assert_eq!(degradation_sigma(0.55, ScaleFactor::new(2).unwrap()), 0.55);
        assert!(
            (degradation_sigma(0.55, ScaleFactor::new(4).unwrap()) - 0.55 * 5f64.sqrt()).abs()
                < 1e-15
        );
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let hr = convolve(
            &Image::from_fn(34, 30, |_, _| rng.gen()),
            &GaussianKernel::new(1.0).unwrap(),
        );
        let (crop, lr) = degrade(&hr, ScaleFactor::new(4).unwrap(), 0.55).unwrap();
        assert_eq!(crop.dims(), (32, 28));
        assert_eq!(lr.dims(), (8, 7));
    }

    #[test]
    fn first_order_variant_matches_pipeline_at_alpha_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let f = Image::from_fn(10, 10, |_, _| rng.gen());
        let mut c = quick(2);
        c.alpha_mode = AlphaMode::Fixed(1.0);
        let (a, _) = refine_level(&f, &c).unwrap();
        let diff = MaskBanks::from_coefficients(1.0, &[1.0, -1.0]).unwrap();
        let b = refine_with_banks(&f, &diff, &c).unwrap().image;
        let worst = a
            .data()
            .iter()
            .zip(b.data())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-12, "{worst}");
    }
}
