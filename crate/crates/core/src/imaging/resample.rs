//! Decimation, zero-fill upsampling, the blur-then-decimate forward model and
//! its transpose, and the Catmull-Rom baseline.
//!
//! All operators share one lattice convention: coarse sample `(i, j)` sits
//! on fine sample `(s·i, s·j)`.

use super::{convolve, convolve_transpose, GaussianKernel, Image};
use crate::{Error, Result};

/// Keeps samples whose coordinates are both `≡ 0 (mod s)`.
pub fn downsample(img: &Image, s: usize) -> Result<Image> {
    let (w, h) = img.dims();
    if s == 0 || w % s != 0 || h % s != 0 {
        return Err(Error::Dimension(format!(
            "{w}x{h} image is not divisible by scale {s}"
        )));
    }
    let (cw, ch) = (w / s, h / s);
    let c = img.channels();
    let mut data = Vec::with_capacity(cw * ch * c);
    for y in 0..ch {
        for x in 0..cw {
            let base = ((y * s) * w + x * s) * c;
            data.extend_from_slice(&img.data()[base..base + c]);
        }
    }
    Image::new(cw, ch, c, data)
}

/// Inserts `s - 1` zeros between samples along each axis; the transpose of
/// [`downsample`].
pub fn upsample_zerofill(img: &Image, s: usize) -> Image {
    let (w, h) = img.dims();
    let c = img.channels();
    let mut out = Image::zeros(w * s, h * s, c);
    let fw = w * s;
    for y in 0..h {
        for x in 0..w {
            let src = (y * w + x) * c;
            let dst = ((y * s) * fw + x * s) * c;
            out.data_mut()[dst..dst + c].copy_from_slice(&img.data()[src..src + c]);
        }
    }
    out
}

/// The forward model `D(u) = (h * u)↓s`.
pub fn blur_downsample(img: &Image, kernel: &GaussianKernel, s: usize) -> Result<Image> {
    downsample(&convolve(img, kernel), s)
}

/// `Dᵀ(y) = hᵀ * (y↑s)`, the exact transpose of [`blur_downsample`].
pub fn blur_downsample_transpose(img: &Image, kernel: &GaussianKernel, s: usize) -> Image {
    convolve_transpose(&upsample_zerofill(img, s), kernel)
}

/// Catmull-Rom weight (`a = -0.5`).
fn catmull_rom(t: f64) -> f64 {
    const A: f64 = -0.5;
    let t = t.abs();
    if t <= 1.0 {
        (A + 2.0) * t * t * t - (A + 3.0) * t * t + 1.0
    } else if t < 2.0 {
        A * t * t * t - 5.0 * A * t * t + 8.0 * A * t - 4.0 * A
    } else {
        0.0
    }
}

/// Per-phase weights for the four neighbours `floor(x)-1 ..= floor(x)+2`.
fn phase_weights(s: usize) -> Vec<[f64; 4]> {
    (0..s)
        .map(|p| {
            let frac = p as f64 / s as f64;
            [
                catmull_rom(frac + 1.0),
                catmull_rom(frac),
                catmull_rom(1.0 - frac),
                catmull_rom(2.0 - frac),
            ]
        })
        .collect()
}

fn resize_axis_x(src: &[f64], w: usize, h: usize, s: usize) -> Vec<f64> {
    let phases = phase_weights(s);
    let mut out = Vec::with_capacity(w * s * h);
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for x in 0..w * s {
            let base = (x / s) as isize;
            let wts = &phases[x % s];
            let v: f64 = (0..4)
                .map(|k| {
                    let i = (base + k as isize - 1).clamp(0, w as isize - 1) as usize;
                    wts[k] * row[i]
                })
                .sum();
            out.push(v);
        }
    }
    out
}

fn resize_axis_y(src: &[f64], w: usize, h: usize, s: usize) -> Vec<f64> {
    let phases = phase_weights(s);
    let mut out = vec![0.0; w * h * s];
    for y in 0..h * s {
        let base = (y / s) as isize;
        let wts = &phases[y % s];
        let dst = &mut out[y * w..(y + 1) * w];
        for (k, &wk) in wts.iter().enumerate() {
            let j = (base + k as isize - 1).clamp(0, h as isize - 1) as usize;
            let row = &src[j * w..(j + 1) * w];
            dst.iter_mut().zip(row).for_each(|(d, r)| *d += wk * r);
        }
    }
    out
}

/// Catmull-Rom bicubic upsampling by `s`, replicate-padded, with output
/// sample `X` taken at input coordinate `X / s`.
pub fn bicubic_resize(img: &Image, s: usize) -> Image {
    let (w, h) = img.dims();
    let planes: Vec<Image> = (0..img.channels())
        .map(|c| {
            let plane = if img.channels() == 1 {
                img.clone()
            } else {
                img.channel(c)
            };
            let tmp = resize_axis_x(plane.data(), w, h, s);
            Image::from_parts(w * s, h * s, resize_axis_y(&tmp, w * s, h, s))
        })
        .collect();
    if planes.len() == 1 {
        planes.into_iter().next().unwrap()
    } else {
        Image::from_channels(&planes).expect("planes share a shape")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(w: usize, h: usize, rng: &mut ChaCha8Rng) -> Image {
        Image::from_fn(w, h, |_, _| rng.gen::<f64>() - 0.5)
    }

    #[test]
    fn downsample_keeps_top_left_lattice() {
        let img = Image::from_fn(4, 4, |x, y| (10 * y + x) as f64);
        let d = downsample(&img, 2).unwrap();
        assert_eq!(d.data(), &[0.0, 2.0, 20.0, 22.0]);
    }

    #[test]
    fn downsample_rejects_indivisible() {
        let img = Image::filled(5, 4, 0.0);
        assert!(matches!(downsample(&img, 2), Err(Error::Dimension(_))));
    }

    #[test]
    fn zerofill_is_right_inverse_of_downsample() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = random(5, 3, &mut rng);
        for s in [2, 4] {
            assert_eq!(downsample(&upsample_zerofill(&c, s), s).unwrap(), c);
        }
    }

    #[test]
    fn single_coarse_pixel_lands_at_scaled_index() {
        let mut c = Image::zeros(3, 3, 1);
        c.set(1, 2, 1.0);
        let f = upsample_zerofill(&c, 4);
        let nz: Vec<usize> = (0..f.data().len())
            .filter(|&i| f.data()[i] != 0.0)
            .collect();
        assert_eq!(nz, vec![8 * 12 + 4]);
    }

    #[test]
    fn decimation_adjoint_dot_test() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for s in [2, 4] {
            let x = random(8, 12, &mut rng);
            let y = random(8 / s, 12 / s, &mut rng);
            let lhs = downsample(&x, s).unwrap().dot(&y);
            let rhs = x.dot(&upsample_zerofill(&y, s));
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn bicubic_constant_and_ramp() {
        let c = Image::filled(6, 5, 0.4);
        for v in bicubic_resize(&c, 4).data() {
            assert!((v - 0.4).abs() < 1e-12);
        }
        let ramp = Image::from_fn(10, 10, |x, y| 0.05 * x as f64 + 0.02 * y as f64);
        let up = bicubic_resize(&ramp, 2);
        // interior: away from the replicated border
        for y in 2..16 {
            for x in 2..16 {
                let expect = 0.05 * x as f64 / 2.0 + 0.02 * y as f64 / 2.0;
                assert!((up.get(x, y) - expect).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn bicubic_interpolates_lattice_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let img = random(7, 6, &mut rng);
        let up = bicubic_resize(&img, 4);
        assert_eq!(downsample(&up, 4).unwrap(), img);
    }

    #[test]
    fn bicubic_golden_8x8() {
        // Reference values from a direct (non-separable) evaluation of the
        // Catmull-Rom sum, computed once and frozen.
        let img = Image::from_fn(8, 8, |x, y| ((x * 37 + y * 91) % 17) as f64 / 16.0);
        let up = bicubic_resize(&img, 2);
        let golden = [
            (1, 1, 0.241943359375),
            (3, 2, 0.65625),
            (6, 9, 0.65625),
            (15, 15, 0.78515625),
            (10, 0, 0.9375),
            (7, 13, 0.465087890625),
        ];
        for (x, y, v) in golden {
            assert!((up.get(x, y) - v).abs() < 1e-12, "({x},{y})");
        }
        assert!((up.data().iter().sum::<f64>() - 127.796875).abs() < 1e-9);
        assert!((up.sum_sq() - 79.94624316692352).abs() < 1e-9);
    }

    #[test]
    fn bicubic_handles_color() {
        let img = Image::new(2, 2, 3, (0..12).map(|v| v as f64 / 12.0).collect()).unwrap();
        let up = bicubic_resize(&img, 2);
        assert_eq!(up.dims(), (4, 4));
        assert_eq!(up.channels(), 3);
        assert_eq!(up.channel(1).get(0, 0), img.channel(1).get(0, 0));
    }
}
