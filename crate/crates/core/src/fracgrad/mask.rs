//! Directional fractional-derivative masks on the known lattice of one
//! interpolation stage.
//!
//! Each inserted site sits at the center of a cell of known samples. For
//! center sites (both coordinates odd) the known lattice is the even grid,
//! step 2. For between sites (one coordinate odd) it is the quincunx
//! `x + y` even, spanned by `(1, 1)` and `(1, -1)`.
//!
//! A mask walks the line through the site at its labelled angle in both
//! directions. The line crosses the lattice rows (or columns, whichever
//! it meets more steeply) at equally spaced points; each crossing point is
//! read from the four known samples around it on that lattice line with
//! Catmull-Rom weights. The G-L weights are laid along those points
//! starting from the one nearest the site, so `D⁺ = Σ ω_j v⁺_j` is a backward difference looking away
//! from the site, and `D⁻` is its mirror.

use std::collections::BTreeMap;

use super::{check_order, gl_coefficients, EdgeDirection};
use crate::{Error, Result};

/// Stage of the ×2 refinement a mask serves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MaskKind {
    /// Both fine coordinates odd.
    Center,
    /// Exactly one fine coordinate odd.
    Between,
}

impl MaskKind {
    /// Lattice basis vectors as `(x, y)` fine-grid offsets.
    fn basis(self) -> [(f64, f64); 2] {
        match self {
            MaskKind::Center => [(2.0, 0.0), (0.0, 2.0)],
            MaskKind::Between => [(1.0, 1.0), (1.0, -1.0)],
        }
    }

    /// Direction labels of the bank for this kind.
    pub fn labels(self) -> Vec<f64> {
        match self {
            MaskKind::Center => (0..6).map(|k| 30.0 * k as f64).collect(),
            MaskKind::Between => (0..9).map(|k| 20.0 * k as f64).collect(),
        }
    }
}

/// One weighted known sample, as an offset `(dx, dy)` from the site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tap {
    pub dx: i32,
    pub dy: i32,
    pub weight: f64,
}

/// A sample point on the mask line and the known taps that realize it.
#[derive(Debug, Clone, PartialEq)]
pub struct LinePoint {
    /// Position relative to the site, in fine pixels.
    pub position: (f64, f64),
    pub taps: Vec<Tap>,
}

/// What a mask measures at one site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaskResponse {
    /// Mean of the two line samples adjacent to the site.
    pub base: f64,
    /// `D⁺`, the derivative looking forward along the tangent.
    pub forward: f64,
    /// `D⁻`, the derivative looking backward.
    pub backward: f64,
    /// Spacing of line samples in fine pixels.
    pub step: f64,
    pub tangent: (f64, f64),
}

/// Weight turning `D⁺ + D⁻` into the value correction. At order 1 it makes
/// `base + BLEND (D⁺ + D⁻)` the four-point cubic along the line.
const BLEND: f64 = 1.0 / 16.0;

impl MaskResponse {
    /// The gradient term `∇u` added to the base value.
    pub fn increment(&self) -> f64 {
        BLEND * (self.forward + self.backward)
    }

    /// Interpolated value `u = base + ∇u`.
    pub fn value(&self) -> f64 {
        self.base + self.increment()
    }

    /// Slope along the tangent per fine pixel, averaged from both sides.
    pub fn slope(&self) -> f64 {
        (self.backward - self.forward) / (2.0 * self.step)
    }
}

/// Directional fractional mask `D_θ^α`.
#[derive(Debug, Clone, PartialEq)]
pub struct FracMask {
    alpha: f64,
    direction_deg: f64,
    kind: MaskKind,
    coeffs: Vec<f64>,
    step: f64,
    tangent: (f64, f64),
    forward_points: Vec<LinePoint>,
    backward_points: Vec<LinePoint>,
    forward: Vec<Tap>,
    backward: Vec<Tap>,
}

const SNAP: f64 = 1e-9;

/// Catmull-Rom weight at distance `t` from a sample.
fn catmull_rom(t: f64) -> f64 {
    let t = t.abs();
    if t <= 1.0 {
        1.5 * t * t * t - 2.5 * t * t + 1.0
    } else if t < 2.0 {
        -0.5 * t * t * t + 2.5 * t * t - 4.0 * t + 2.0
    } else {
        0.0
    }
}

fn merge(points: &[LinePoint], coeffs: &[f64]) -> Vec<Tap> {
    let mut acc: BTreeMap<(i32, i32), f64> = BTreeMap::new();
    for (p, &c) in points.iter().zip(coeffs) {
        if c == 0.0 {
            continue;
        }
        for t in &p.taps {
            *acc.entry((t.dy, t.dx)).or_insert(0.0) += c * t.weight;
        }
    }
    acc.into_iter()
        .map(|((dy, dx), weight)| Tap { dx, dy, weight })
        .collect()
}

fn line_points(
    kind: MaskKind,
    tangent: (f64, f64),
    count: usize,
) -> (f64, Vec<LinePoint>, Vec<LinePoint>) {
    let [e1, e2] = kind.basis();
    let det = e1.0 * e2.1 - e2.0 * e1.1;
    let (dx, dy) = tangent;
    let q = [
        (e2.1 * dx - e2.0 * dy) / det,
        (-e1.1 * dx + e1.0 * dy) / det,
    ];
    let (k, o) = if q[0].abs() >= q[1].abs() - 1e-12 {
        (0, 1)
    } else {
        (1, 0)
    };
    let basis = [e1, e2];
    let step = 1.0 / q[k].abs();
    let ratio = q[o] / q[k].abs();
    let side = |sign: f64| -> Vec<LinePoint> {
        (0..count)
            .map(|j| {
                let along = sign * (j as f64 + 0.5);
                let qk = along * q[k].signum();
                let qo = along * ratio;
                let lo = (qo - 0.5).floor() + 0.5;
                let w = qo - lo;
                let weighted = if w < SNAP {
                    vec![(lo, 1.0)]
                } else if w > 1.0 - SNAP {
                    vec![(lo + 1.0, 1.0)]
                } else {
                    // nearest lattice sample first: it anchors the evaluation
                    let (near, far) = if w <= 0.5 {
                        (lo, lo + 1.0)
                    } else {
                        (lo + 1.0, lo)
                    };
                    let (wn, wf) = if w <= 0.5 { (w, 1.0 - w) } else { (1.0 - w, w) };
                    vec![
                        (near, catmull_rom(wn)),
                        (far, catmull_rom(wf)),
                        (lo - 1.0, catmull_rom(1.0 + w)),
                        (lo + 2.0, catmull_rom(2.0 - w)),
                    ]
                };
                let taps = weighted
                    .into_iter()
                    .map(|(qo_known, weight)| {
                        let px = qk * basis[k].0 + qo_known * basis[o].0;
                        let py = qk * basis[k].1 + qo_known * basis[o].1;
                        Tap {
                            dx: px.round() as i32,
                            dy: py.round() as i32,
                            weight,
                        }
                    })
                    .collect();
                let dist = along * step;
                LinePoint {
                    position: (dist * dx, dist * dy),
                    taps,
                }
            })
            .collect()
    };
    (step, side(1.0), side(-1.0))
}

impl FracMask {
    /// Mask at `direction_deg` carrying `coeffs` (at least two weights).
    pub fn new(alpha: f64, coeffs: &[f64], direction_deg: f64, kind: MaskKind) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::Config(format!(
                "a mask needs at least 2 weights, got {}",
                coeffs.len()
            )));
        }
        let direction_deg = EdgeDirection::new(direction_deg).theta_deg();
        let tangent = EdgeDirection::new(direction_deg).tangent();
        let (step, forward_points, backward_points) = line_points(kind, tangent, coeffs.len());
        let forward = merge(&forward_points, coeffs);
        let backward = merge(&backward_points, coeffs);
        Ok(Self {
            alpha,
            direction_deg,
            kind,
            coeffs: coeffs.to_vec(),
            step,
            tangent,
            forward_points,
            backward_points,
            forward,
            backward,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn direction_deg(&self) -> f64 {
        self.direction_deg
    }

    pub fn kind(&self) -> MaskKind {
        self.kind
    }

    /// Weights laid along the line, nearest point first.
    pub fn line_coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn forward_points(&self) -> &[LinePoint] {
        &self.forward_points
    }

    pub fn backward_points(&self) -> &[LinePoint] {
        &self.backward_points
    }

    /// Spacing of the line samples in fine pixels.
    pub fn step(&self) -> f64 {
        self.step
    }

    /// Sparse stencil of `D⁺` on known pixels.
    pub fn stencil(&self) -> &[Tap] {
        &self.forward
    }

    /// Sparse stencil of `D⁻`, the mirror of [`FracMask::stencil`].
    pub fn backward_stencil(&self) -> &[Tap] {
        &self.backward
    }

    /// Largest `|dx|` or `|dy|` over both stencils.
    pub fn support_radius(&self) -> i32 {
        self.forward
            .iter()
            .chain(&self.backward)
            .map(|t| t.dx.abs().max(t.dy.abs()))
            .max()
            .unwrap_or(0)
    }

    /// Evaluates the mask with `sample(dx, dy)` reading known samples
    /// relative to the site.
    pub fn respond(&self, sample: impl Fn(isize, isize) -> f64) -> MaskResponse {
        let read = |t: &Tap| sample(t.dx as isize, t.dy as isize);
        // anchored on the first tap so constants come out exact
        let point = |p: &LinePoint| {
            let a = read(&p.taps[0]);
            a + p.taps[1..]
                .iter()
                .map(|t| t.weight * (read(t) - a))
                .sum::<f64>()
        };
        let side = |points: &[LinePoint]| -> (f64, f64) {
            let near = point(&points[0]);
            let d = self.coeffs[1..].iter().zip(&points[1..]).fold(
                self.coeffs[0] * near,
                |acc, (c, p)| if *c == 0.0 { acc } else { acc + c * point(p) },
            );
            (near, d)
        };
        let (near_f, forward) = side(&self.forward_points);
        let (near_b, backward) = side(&self.backward_points);
        MaskResponse {
            base: 0.5 * (near_f + near_b),
            forward,
            backward,
            step: self.step,
            tangent: self.tangent,
        }
    }
}

/// Masks of one kind, one per direction label.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskBank {
    kind: MaskKind,
    masks: Vec<FracMask>,
}

impl MaskBank {
    pub fn new(kind: MaskKind, masks: Vec<FracMask>) -> Self {
        Self { kind, masks }
    }

    pub fn kind(&self) -> MaskKind {
        self.kind
    }

    pub fn masks(&self) -> &[FracMask] {
        &self.masks
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }
}

fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(180.0);
    d.min(180.0 - d)
}

/// The bank mask nearest to `theta` modulo 180°; ties go to the smaller
/// label.
pub fn select_mask(theta: EdgeDirection, bank: &MaskBank) -> Result<&FracMask> {
    let mut best: Option<(&FracMask, f64)> = None;
    for m in &bank.masks {
        let d = angular_distance(theta.theta_deg(), m.direction_deg);
        best = match best {
            None => Some((m, d)),
            Some((b, bd)) => {
                if d < bd - 1e-9 || ((d - bd).abs() <= 1e-9 && m.direction_deg < b.direction_deg) {
                    Some((m, d))
                } else {
                    Some((b, bd))
                }
            }
        };
    }
    best.map(|(m, _)| m)
        .ok_or_else(|| Error::Config("mask bank is empty".into()))
}

/// Both banks for one order, plus the axis-aligned pairs used where the
/// local gradient vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskBanks {
    alpha: f64,
    coeffs: Vec<f64>,
    center: MaskBank,
    between: MaskBank,
    center_axes: [FracMask; 2],
    between_axes: [FracMask; 2],
}

impl MaskBanks {
    /// Banks built from explicit line weights.
    pub fn from_coefficients(alpha: f64, coeffs: &[f64]) -> Result<Self> {
        let bank = |kind: MaskKind| -> Result<MaskBank> {
            let masks = kind
                .labels()
                .into_iter()
                .map(|deg| FracMask::new(alpha, coeffs, deg, kind))
                .collect::<Result<Vec<_>>>()?;
            Ok(MaskBank::new(kind, masks))
        };
        let axes = |kind: MaskKind| -> Result<[FracMask; 2]> {
            Ok([
                FracMask::new(alpha, coeffs, 0.0, kind)?,
                FracMask::new(alpha, coeffs, 90.0, kind)?,
            ])
        };
        Ok(Self {
            alpha,
            coeffs: coeffs.to_vec(),
            center: bank(MaskKind::Center)?,
            between: bank(MaskKind::Between)?,
            center_axes: axes(MaskKind::Center)?,
            between_axes: axes(MaskKind::Between)?,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn bank(&self, kind: MaskKind) -> &MaskBank {
        match kind {
            MaskKind::Center => &self.center,
            MaskKind::Between => &self.between,
        }
    }

    /// Masks at exactly 0° and 90° for `kind`.
    pub fn axes(&self, kind: MaskKind) -> &[FracMask; 2] {
        match kind {
            MaskKind::Center => &self.center_axes,
            MaskKind::Between => &self.between_axes,
        }
    }
}

/// Six center masks at 30° pitch and nine between masks at 20° pitch,
/// each carrying `support` G-L weights.
pub fn build_mask_banks(alpha: f64, support: usize) -> Result<MaskBanks> {
    check_order(alpha)?;
    if support < 2 {
        return Err(Error::Config(format!(
            "mask support must be at least 2, got {support}"
        )));
    }
    let coeffs = gl_coefficients(alpha, support - 1)?;
    MaskBanks::from_coefficients(alpha, coeffs.taps())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_known(kind: MaskKind, dx: i32, dy: i32) -> bool {
        // offsets from a site: center sites are odd/odd, between sites odd/even
        match kind {
            MaskKind::Center => dx.rem_euclid(2) == 1 && dy.rem_euclid(2) == 1,
            MaskKind::Between => (dx + dy).rem_euclid(2) == 1,
        }
    }

    #[test]
    fn bank_sizes_and_labels() {
        let b = build_mask_banks(0.5, 3).unwrap();
        let c: Vec<f64> = b
            .bank(MaskKind::Center)
            .masks()
            .iter()
            .map(|m| m.direction_deg())
            .collect();
        assert_eq!(c, vec![0.0, 30.0, 60.0, 90.0, 120.0, 150.0]);
        assert_eq!(b.bank(MaskKind::Between).len(), 9);
        assert_eq!(b.bank(MaskKind::Between).masks()[8].direction_deg(), 160.0);
    }

    #[test]
    fn taps_stay_on_known_lattice() {
        let b = build_mask_banks(0.7, 4).unwrap();
        for kind in [MaskKind::Center, MaskKind::Between] {
            for m in b.bank(kind).masks().iter().chain(b.axes(kind)) {
                for t in m.stencil().iter().chain(m.backward_stencil()) {
                    assert!(
                        is_known(kind, t.dx, t.dy),
                        "{kind:?} {} {t:?}",
                        m.direction_deg()
                    );
                }
            }
        }
    }

    #[test]
    fn line_points_are_collinear_and_evenly_spaced() {
        let b = build_mask_banks(0.7, 4).unwrap();
        for kind in [MaskKind::Center, MaskKind::Between] {
            for m in b.bank(kind).masks() {
                let (tx, ty) = EdgeDirection::new(m.direction_deg()).tangent();
                for (j, p) in m.forward_points().iter().enumerate() {
                    let cross = p.position.0 * ty - p.position.1 * tx;
                    assert!(cross.abs() < 1e-9);
                    let dist = p.position.0 * tx + p.position.1 * ty;
                    assert!((dist - (j as f64 + 0.5) * m.step()).abs() < 1e-9);
                    // the known taps interpolate the line point exactly
                    let wsum: f64 = p.taps.iter().map(|t| t.weight).sum();
                    let cx: f64 = p.taps.iter().map(|t| t.weight * t.dx as f64).sum();
                    let cy: f64 = p.taps.iter().map(|t| t.weight * t.dy as f64).sum();
                    assert!((wsum - 1.0).abs() < 1e-12);
                    assert!((cx - p.position.0).abs() < 1e-9 && (cy - p.position.1).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn half_order_line_weights() {
        let b = build_mask_banks(0.5, 3).unwrap();
        for kind in [MaskKind::Center, MaskKind::Between] {
            for m in b.bank(kind).masks() {
                assert_eq!(m.line_coefficients(), &[1.0, -0.5, -0.125]);
                let total: f64 = m.stencil().iter().map(|t| t.weight).sum();
                assert!((total - 0.375).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn exact_lattice_directions_use_single_pixels() {
        // 45° from a center site runs through (1,1), (3,3), (5,5).
        let m = FracMask::new(1.0, &[1.0, -1.0], 45.0, MaskKind::Center).unwrap();
        assert_eq!(
            m.stencil(),
            &[
                Tap {
                    dx: 1,
                    dy: 1,
                    weight: 1.0
                },
                Tap {
                    dx: 3,
                    dy: 3,
                    weight: -1.0
                }
            ]
        );
        assert!((m.step() - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        // 0° from a between site runs through (1,0), (3,0).
        let m = FracMask::new(1.0, &[1.0, -1.0], 0.0, MaskKind::Between).unwrap();
        assert_eq!(
            m.backward_stencil(),
            &[
                Tap {
                    dx: -3,
                    dy: 0,
                    weight: -1.0
                },
                Tap {
                    dx: -1,
                    dy: 0,
                    weight: 1.0
                }
            ]
        );
        assert_eq!(m.support_radius(), 3);
    }

    #[test]
    fn first_order_masks_are_directional_differences_on_planes() {
        let (a, bb, c) = (0.3, -0.7, 0.2);
        let plane = |x: isize, y: isize| a * x as f64 + bb * y as f64 + c;
        let mut masks: Vec<FracMask> =
            vec![FracMask::new(1.0, &[1.0, -1.0], 45.0, MaskKind::Center).unwrap()];
        let banks = build_mask_banks(1.0, 2).unwrap();
        for kind in [MaskKind::Center, MaskKind::Between] {
            masks.extend(banks.bank(kind).masks().iter().cloned());
        }
        for m in &masks {
            let r = m.respond(plane);
            let (tx, ty) = EdgeDirection::new(m.direction_deg()).tangent();
            let directional = a * tx + bb * ty;
            assert!((r.forward + m.step() * directional).abs() < 1e-12);
            assert!((r.backward - m.step() * directional).abs() < 1e-12);
            assert!((r.slope() - directional).abs() < 1e-12);
            assert!((r.value() - c).abs() < 1e-12);
        }
    }

    #[test]
    fn flat_response() {
        let banks = build_mask_banks(1.0, 3).unwrap();
        for m in banks.bank(MaskKind::Center).masks() {
            let r = m.respond(|_, _| 7.0);
            assert_eq!(r.forward, 0.0);
            assert_eq!(r.increment(), 0.0);
            assert_eq!(r.value(), 7.0);
        }
        let half = build_mask_banks(0.5, 3).unwrap();
        let r = half.bank(MaskKind::Between).masks()[2].respond(|_, _| 7.0);
        assert!((r.forward - 7.0 * 0.375).abs() < 1e-12);
    }

    #[test]
    fn selection_examples() {
        let banks = build_mask_banks(0.5, 3).unwrap();
        let bank = banks.bank(MaskKind::Center);
        let pick = |t: f64| {
            select_mask(EdgeDirection::new(t), bank)
                .unwrap()
                .direction_deg()
        };
        assert_eq!(pick(0.0), 0.0);
        assert_eq!(pick(44.0), 30.0);
        assert_eq!(pick(179.0), 0.0);
        assert_eq!(pick(45.0), 30.0);
        assert_eq!(pick(165.0), 0.0);
        assert_eq!(pick(160.0), 150.0);
    }

    #[test]
    fn empty_bank_is_config_error() {
        let bank = MaskBank::new(MaskKind::Center, vec![]);
        assert!(matches!(
            select_mask(EdgeDirection::new(10.0), &bank),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn construction_errors() {
        assert!(build_mask_banks(0.5, 1).is_err());
        assert!(build_mask_banks(1.5, 3).is_err());
        assert!(FracMask::new(0.5, &[1.0], 0.0, MaskKind::Center).is_err());
    }
}
