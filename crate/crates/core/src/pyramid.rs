//! One ×2 refinement of the pyramid: two-stage directional interpolation and
//! the per-level search for the fractional order.

use rayon::prelude::*;

use crate::fracgrad::{check_order, select_mask, EdgeDirection, MaskBanks, MaskKind, MaskResponse};
use crate::gradient::{central_gradient, GradientField};
use crate::imaging::blur_downsample;
use crate::{Error, GaussianKernel, Image, Result};

/// A level's known samples. Level `index` holds the image after `index`
/// doublings; refining it places these samples on the even lattice of a
/// grid twice as large.
#[derive(Debug, Clone, PartialEq)]
pub struct PyramidLevel {
    index: usize,
    known: Image,
}

impl PyramidLevel {
    pub fn new(index: usize, known: Image) -> Result<Self> {
        known.ensure_gray()?;
        Ok(Self { index, known })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn known(&self) -> &Image {
        &self.known
    }

    /// Dimensions of the refined grid.
    pub fn fine_dims(&self) -> (usize, usize) {
        (2 * self.known.width(), 2 * self.known.height())
    }

    /// Row-major flags over the refined grid, `true` where a site is
    /// inserted rather than copied.
    pub fn inserted_mask(&self) -> Vec<bool> {
        let (w, h) = self.fine_dims();
        (0..w * h).map(|i| !is_original(i % w, i / w)).collect()
    }
}

pub(crate) fn is_original(x: usize, y: usize) -> bool {
    x.is_multiple_of(2) && y.is_multiple_of(2)
}

/// How the gradient at an inserted site is assembled once the grid is full.
#[derive(Debug, Clone, Copy)]
enum SiteGradient {
    /// Slope along `tangent`; the normal component comes from the filled
    /// image.
    Tangent { slope: f64, tangent: (f64, f64) },
    /// Both components measured by the axis masks.
    Axes(f64, f64),
}

struct Site {
    x: usize,
    value: f64,
    gradient: SiteGradient,
}

fn resolve(
    direction: EdgeDirection,
    kind: MaskKind,
    banks: &MaskBanks,
    sample: impl Fn(isize, isize) -> f64,
) -> Result<(f64, SiteGradient)> {
    if direction.is_flat() {
        let [h, v] = banks.axes(kind);
        let (rh, rv) = (h.respond(&sample), v.respond(&sample));
        return Ok((
            0.5 * (rh.value() + rv.value()),
            SiteGradient::Axes(rh.slope(), rv.slope()),
        ));
    }
    let r: MaskResponse = select_mask(direction, banks.bank(kind))?.respond(sample);
    Ok((
        r.value(),
        SiteGradient::Tangent {
            slope: r.slope(),
            tangent: r.tangent,
        },
    ))
}

/// Reads the known quincunx lattice (`x + y` even) of `u` with replicate
/// padding. An out-of-range coordinate is clamped, and if clamping lands
/// on an unknown site the clamped axis steps one sample inward.
fn quincunx_get(u: &Image, x: isize, y: isize) -> f64 {
    let (w, h) = (u.width() as isize, u.height() as isize);
    let cx = x.clamp(0, w - 1);
    let cy = y.clamp(0, h - 1);
    if (cx + cy) % 2 == 0 {
        return u.get(cx as usize, cy as usize);
    }
    let (mut nx, mut ny) = (cx, cy);
    if cx != x || cy == y {
        nx = if cx == 0 { 1 } else { cx - 1 };
    } else {
        ny = if cy == 0 { 1 } else { cy - 1 };
    }
    u.get(nx as usize, ny as usize)
}

/// Refines `level` by ×2 with the masks of `banks`.
///
/// Stage 1 fills the centers of each 2×2 cell of known samples, stage 2
/// the remaining sites from the quincunx lattice completed by stage 1.
/// Copied samples are never rewritten. The returned field holds, at copied
/// sites, the central differences of the filled image; at inserted sites,
/// the mask slope along the edge plus the filled image's slope across it.
pub fn interpolate_level(
    level: &PyramidLevel,
    banks: &MaskBanks,
) -> Result<(Image, GradientField)> {
    let f = level.known();
    let (w, h) = level.fine_dims();
    let mut u = Image::zeros(w, h, 1);
    for y in 0..f.height() {
        for x in 0..f.width() {
            u.set(2 * x, 2 * y, f.get(x, y));
        }
    }
    let coarse_grad = central_gradient(f);
    let cg = |i: isize, j: isize| -> (f64, f64) {
        let i = i.clamp(0, f.width() as isize - 1) as usize;
        let j = j.clamp(0, f.height() as isize - 1) as usize;
        let k = j * f.width() + i;
        (coarse_grad.gx()[k], coarse_grad.gy()[k])
    };

    let stage1: Vec<Vec<Site>> = (0..h / 2)
        .into_par_iter()
        .map(|row| {
            let y = 2 * row + 1;
            (0..w / 2)
                .map(|col| {
                    let x = 2 * col + 1;
                    let (i, j) = ((x / 2) as isize, (y / 2) as isize);
                    let cell = [(0, 0), (1, 0), (0, 1), (1, 1)].map(|(di, dj)| cg(i + di, j + dj));
                    let dir = EdgeDirection::from_gradients(&cell);
                    let sample = |dx: isize, dy: isize| {
                        let (fx, fy) = (x as isize + dx, y as isize + dy);
                        f.get_clamped(fx.div_euclid(2), fy.div_euclid(2))
                    };
                    let (value, gradient) = resolve(dir, MaskKind::Center, banks, sample)?;
                    Ok(Site { x, value, gradient })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut grads: Vec<Option<SiteGradient>> = vec![None; w * h];
    for (row, sites) in stage1.into_iter().enumerate() {
        let y = 2 * row + 1;
        for s in sites {
            u.set(s.x, y, s.value);
            grads[y * w + s.x] = Some(s.gradient);
        }
    }

    let stage2: Vec<Vec<Site>> = (0..h)
        .into_par_iter()
        .map(|y| {
            let u = &u;
            (1 - y % 2..w)
                .step_by(2)
                .map(|x| {
                    let k =
                        |dx: isize, dy: isize| quincunx_get(u, x as isize + dx, y as isize + dy);
                    // gradients at the four known neighbours, from differences
                    // along the lattice diagonals
                    let around = [(1, 0), (-1, 0), (0, 1), (0, -1)].map(|(px, py)| {
                        let a = 0.5 * (k(px + 1, py + 1) - k(px - 1, py - 1));
                        let b = 0.5 * (k(px + 1, py - 1) - k(px - 1, py + 1));
                        (0.5 * (a + b), 0.5 * (a - b))
                    });
                    let dir = EdgeDirection::from_gradients(&around);
                    let (value, gradient) = resolve(dir, MaskKind::Between, banks, k)?;
                    Ok(Site { x, value, gradient })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    for (y, sites) in stage2.into_iter().enumerate() {
        for s in sites {
            u.set(s.x, y, s.value);
            grads[y * w + s.x] = Some(s.gradient);
        }
    }

    let mut field = central_gradient(&u);
    let (gx, gy) = field.components_mut();
    for (k, site) in grads.iter().enumerate() {
        match *site {
            None => {}
            Some(SiteGradient::Axes(a, b)) => {
                gx[k] = a;
                gy[k] = b;
            }
            Some(SiteGradient::Tangent {
                slope,
                tangent: (tx, ty),
            }) => {
                let (nx, ny) = (-ty, tx);
                let across = gx[k] * nx + gy[k] * ny;
                gx[k] = slope * tx + across * nx;
                gy[k] = slope * ty + across * ny;
            }
        }
    }
    Ok((u, field))
}

/// The winner of an order search and everything needed to reconstruct
/// from it.
#[derive(Debug, Clone)]
pub struct AlphaSearchResult {
    pub alpha_star: f64,
    pub criterion: f64,
    /// `(α, J(α))` for every grid value, in grid order.
    pub trace: Vec<(f64, f64)>,
    /// The level interpolated at `alpha_star`.
    pub image: Image,
    /// `∇U`, the interpolated gradient at `alpha_star`.
    pub gradient: GradientField,
}

/// `J = ‖D(u) − f‖₂ + ‖2·D(∇u) − ∇f‖₂`, with `D` blur then ×2 decimation.
/// The factor 2 converts fine-pixel slopes to coarse-pixel slopes so they
/// are comparable with `∇f`.
pub fn alpha_criterion(
    u: &Image,
    field: &GradientField,
    f: &Image,
    kernel: &GaussianKernel,
) -> Result<f64> {
    let fidelity = blur_downsample(u, kernel, 2)?
        .zip_map(f, |a, b| a - b)
        .sum_sq()
        .sqrt();
    let target = central_gradient(f);
    let (gx, gy) = field.to_images();
    let dgx = blur_downsample(&gx, kernel, 2)?;
    let dgy = blur_downsample(&gy, kernel, 2)?;
    let mismatch: f64 = dgx
        .data()
        .iter()
        .zip(target.gx())
        .chain(dgy.data().iter().zip(target.gy()))
        .map(|(d, t)| (2.0 * d - t).powi(2))
        .sum();
    Ok(fidelity + mismatch.sqrt())
}

/// Interpolates `f` once per grid order and keeps the order minimizing
/// [`alpha_criterion`]. Exact ties go to the larger order.
pub fn optimize_alpha(
    f: &Image,
    grid: &[f64],
    kernel: &GaussianKernel,
    support: usize,
) -> Result<AlphaSearchResult> {
    if grid.is_empty() {
        return Err(Error::Config("alpha grid is empty".into()));
    }
    for &a in grid {
        check_order(a)?;
    }
    let level = PyramidLevel::new(0, f.clone())?;
    let runs = grid
        .par_iter()
        .map(|&alpha| {
            let banks = crate::fracgrad::build_mask_banks(alpha, support)?;
            let (u, g) = interpolate_level(&level, &banks)?;
            let j = alpha_criterion(&u, &g, f, kernel)?;
            Ok((alpha, j, u, g))
        })
        .collect::<Result<Vec<_>>>()?;
    let trace: Vec<(f64, f64)> = runs.iter().map(|r| (r.0, r.1)).collect();
    let mut best = 0;
    for (k, &(a, j)) in trace.iter().enumerate() {
        let (ba, bj) = trace[best];
        if j < bj || (j == bj && a > ba) {
            best = k;
        }
    }
    let (alpha_star, criterion, image, gradient) =
        runs.into_iter().nth(best).expect("grid is non-empty");
    Ok(AlphaSearchResult {
        alpha_star,
        criterion,
        trace,
        image,
        gradient,
    })
}

/// `{0.1, 0.2, …, 1.0}`.
pub fn default_alpha_grid() -> Vec<f64> {
    (1..=10).map(|k| k as f64 / 10.0).collect()
}
