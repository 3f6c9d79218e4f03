use crate::{Error, Image, Result};

/// Gradient magnitude below which a neighbourhood has no usable direction.
pub const FLAT_THRESHOLD: f64 = 1e-9;

/// Edge (tangent) orientation in degrees, folded into `[0, 180)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeDirection {
    theta_deg: f64,
    flat: bool,
}

fn fold(theta: f64) -> f64 {
    let t = theta.rem_euclid(180.0);
    if t >= 180.0 {
        0.0
    } else {
        t
    }
}

impl EdgeDirection {
    pub fn new(theta_deg: f64) -> Self {
        Self {
            theta_deg: fold(theta_deg),
            flat: false,
        }
    }

    /// `θ = 90° + atan2(gy, gx)`. A vanishing gradient yields `0°` flagged
    /// as flat.
    pub fn from_gradient(gx: f64, gy: f64) -> Self {
        if gx.hypot(gy) < FLAT_THRESHOLD {
            return Self {
                theta_deg: 0.0,
                flat: true,
            };
        }
        Self::new(90.0 + gy.atan2(gx).to_degrees())
    }

    /// Dominant orientation of several gradient samples: the principal
    /// axis of their structure tensor `Σ g gᵀ`, so that opposite gradients
    /// on either side of a ridge reinforce instead of cancelling. Flat when
    /// the tensor is isotropic, `√(λ₁ − λ₂) <` [`FLAT_THRESHOLD`]. A single
    /// sample gives the same result as [`EdgeDirection::from_gradient`].
    pub fn from_gradients(grads: &[(f64, f64)]) -> Self {
        let (mut jxx, mut jxy, mut jyy) = (0.0, 0.0, 0.0);
        for &(gx, gy) in grads {
            jxx += gx * gx;
            jxy += gx * gy;
            jyy += gy * gy;
        }
        let spread = (jxx - jyy).hypot(2.0 * jxy);
        if spread.sqrt() < FLAT_THRESHOLD {
            return Self {
                theta_deg: 0.0,
                flat: true,
            };
        }
        let phi = 0.5 * (2.0 * jxy).atan2(jxx - jyy);
        Self::new(90.0 + phi.to_degrees())
    }

    pub fn theta_deg(&self) -> f64 {
        self.theta_deg
    }

    pub fn is_flat(&self) -> bool {
        self.flat
    }

    /// Unit vector `(cos θ, sin θ)` in `(x, y)` image coordinates.
    pub fn tangent(&self) -> (f64, f64) {
        let r = self.theta_deg.to_radians();
        (r.cos(), r.sin())
    }
}

/// Direction at the center of `patch`, from central differences.
pub fn estimate_edge_direction(patch: &Image) -> Result<EdgeDirection> {
    patch.ensure_gray()?;
    let (w, h) = patch.dims();
    if w < 3 || h < 3 {
        return Err(Error::Dimension(format!(
            "edge direction needs at least a 3x3 patch, got {w}x{h}"
        )));
    }
    let (cx, cy) = (w / 2, h / 2);
    let gx = 0.5 * (patch.get(cx + 1, cy) - patch.get(cx - 1, cy));
    let gy = 0.5 * (patch.get(cx, cy + 1) - patch.get(cx, cy - 1));
    Ok(EdgeDirection::from_gradient(gx, gy))
}
