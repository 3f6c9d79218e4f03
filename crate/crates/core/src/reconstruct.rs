//! Energy-minimizing refinement of an interpolated level.
//!
//! The energy is
//!
//! ```text
//! C(u) = ½‖D(u) − f‖² + (λ/2)‖∇u − ∇U‖²
//! ```
//!
//! with `D` the blur-then-decimate forward model and `∇` central
//! differences. It is minimized by an accumulated-gradient descent that
//! keeps per-pixel running averages of squared gradients and squared
//! updates.

use rayon::prelude::*;

use crate::gradient::{central_gradient, central_gradient_transpose, GradientField};
use crate::imaging::{blur_downsample, blur_downsample_transpose};
use crate::{Error, GaussianKernel, Image, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionConfig {
    /// Weight of the gradient term.
    pub lambda: f64,
    /// Step scale.
    pub eta: f64,
    /// Accumulator decay.
    pub beta: f64,
    /// Accumulator mix for the newest squared value.
    pub gamma: f64,
    /// Floor added under both square roots.
    pub eps: f64,
    pub max_iters: usize,
    /// Stop once the relative energy change falls below this.
    pub rel_tol: f64,
}

impl Default for ReconstructionConfig {
    fn default() -> Self {
        Self {
            lambda: 0.05,
            eta: 1.5,
            beta: 0.9,
            gamma: 0.01,
            eps: 1e-8,
            max_iters: 100,
            rel_tol: 1e-4,
        }
    }
}

impl ReconstructionConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &str, v: f64| Err(Error::Config(format!("invalid {name}: {v}")));
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad("lambda", self.lambda);
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return bad("eta", self.eta);
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return bad("beta", self.beta);
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return bad("gamma", self.gamma);
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return bad("eps", self.eps);
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be at least 1".into()));
        }
        if !(self.rel_tol >= 0.0 && self.rel_tol.is_finite()) {
            return bad("rel_tol", self.rel_tol);
        }
        Ok(())
    }
}

/// Per-pixel accumulators of the descent.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    sum_g2: Vec<f64>,
    sum_dx2: Vec<f64>,
    last_delta: Vec<f64>,
    iter: usize,
    eta: f64,
    beta: f64,
    gamma: f64,
    eps: f64,
}

impl OptimizerState {
    pub fn new(len: usize, cfg: &ReconstructionConfig) -> Self {
        Self {
            sum_g2: vec![0.0; len],
            sum_dx2: vec![0.0; len],
            last_delta: vec![0.0; len],
            iter: 0,
            eta: cfg.eta,
            beta: cfg.beta,
            gamma: cfg.gamma,
            eps: cfg.eps,
        }
    }

    pub fn sum_g2(&self) -> &[f64] {
        &self.sum_g2
    }

    pub fn sum_dx2(&self) -> &[f64] {
        &self.sum_dx2
    }

    pub fn last_delta(&self) -> &[f64] {
        &self.last_delta
    }

    /// Number of steps taken.
    pub fn iter(&self) -> usize {
        self.iter
    }

    /// Applies one update to `u` given the energy gradient `g` at `u`.
    pub fn step(&mut self, u: &mut [f64], g: &[f64]) {
        assert_eq!(u.len(), self.sum_g2.len());
        assert_eq!(g.len(), self.sum_g2.len());
        let (eta, beta, gamma, eps) = (self.eta, self.beta, self.gamma, self.eps);
        u.par_iter_mut()
            .zip(g)
            .zip(&mut self.sum_g2)
            .zip(&mut self.sum_dx2)
            .zip(&mut self.last_delta)
            .for_each(|((((u, &g), sg), sd), last)| {
                *sg = beta * *sg + gamma * g * g;
                let mean_g = (*sg + eps).sqrt();
                let mean_dx = (*sd + eps).sqrt();
                let delta = -eta * mean_dx / mean_g * g;
                *sd = beta * *sd + gamma * delta * delta;
                *last = delta;
                *u += delta;
            });
        self.iter += 1;
    }
}

fn check_dims(u: &Image, f: &Image, target: &GradientField, s: usize) -> Result<()> {
    u.ensure_gray()?;
    f.ensure_gray()?;
    if u.dims() != (s * f.width(), s * f.height()) {
        return Err(Error::Dimension(format!(
            "estimate is {:?} but input {:?} times {s} is required",
            u.dims(),
            f.dims()
        )));
    }
    if target.dims() != u.dims() {
        return Err(Error::Dimension(format!(
            "target gradient is {:?}, estimate is {:?}",
            target.dims(),
            u.dims()
        )));
    }
    Ok(())
}

struct Residuals {
    fidelity: Image,
    gradient: GradientField,
}

fn residuals(
    u: &Image,
    f: &Image,
    target: &GradientField,
    kernel: &GaussianKernel,
    s: usize,
) -> Result<Residuals> {
    check_dims(u, f, target, s)?;
    Ok(Residuals {
        fidelity: blur_downsample(u, kernel, s)?.zip_map(f, |a, b| a - b),
        gradient: central_gradient(u).sub(target),
    })
}

impl Residuals {
    fn energy(&self, lambda: f64) -> f64 {
        0.5 * self.fidelity.sum_sq() + 0.5 * lambda * self.gradient.sum_sq()
    }

    fn gradient(&self, kernel: &GaussianKernel, s: usize, lambda: f64) -> Image {
        let data = blur_downsample_transpose(&self.fidelity, kernel, s);
        let smooth = central_gradient_transpose(&self.gradient);
        data.zip_map(&smooth, |a, b| a + lambda * b)
    }
}

/// `C(u) = ½‖D(u) − f‖² + (λ/2)‖∇u − ∇U‖²`.
pub fn energy(
    u: &Image,
    f: &Image,
    target: &GradientField,
    kernel: &GaussianKernel,
    s: usize,
    lambda: f64,
) -> Result<f64> {
    Ok(residuals(u, f, target, kernel, s)?.energy(lambda))
}

/// `∂C/∂u = Dᵀ(D(u) − f) + λ∇ᵀ(∇u − ∇U)`.
pub fn energy_gradient(
    u: &Image,
    f: &Image,
    target: &GradientField,
    kernel: &GaussianKernel,
    s: usize,
    lambda: f64,
) -> Result<Image> {
    Ok(residuals(u, f, target, kernel, s)?.gradient(kernel, s, lambda))
}

/// Output of [`reconstruct`].
#[derive(Debug, Clone)]
pub struct Reconstruction {
    /// The lowest-energy iterate.
    pub image: Image,
    /// `C(u_t)` for every evaluated iterate, starting with `u0`.
    pub energies: Vec<f64>,
    /// Index into `energies` of the returned iterate.
    pub best_iteration: usize,
}

/// Descends `C` from `u0` and returns the lowest-energy iterate seen.
pub fn reconstruct(
    u0: &Image,
    f: &Image,
    target: &GradientField,
    cfg: &ReconstructionConfig,
    kernel: &GaussianKernel,
    s: usize,
) -> Result<Reconstruction> {
    cfg.validate()?;
    let eval = |u: &Image, iteration: usize| -> Result<(f64, Image)> {
        let r = residuals(u, f, target, kernel, s)?;
        let c = r.energy(cfg.lambda);
        let g = r.gradient(kernel, s, cfg.lambda);
        if !c.is_finite() || g.data().iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { iteration });
        }
        Ok((c, g))
    };

    let mut u = u0.clone();
    let (mut c, mut g) = eval(&u, 0)?;
    let mut energies = vec![c];
    let mut best = (c, 0, u.clone());
    let mut state = OptimizerState::new(u.data().len(), cfg);
    for t in 1..=cfg.max_iters {
        state.step(u.data_mut(), g.data());
        let (c_next, g_next) = eval(&u, t)?;
        energies.push(c_next);
        if c_next < best.0 {
            best = (c_next, t, u.clone());
        }
        let change = (c_next - c).abs() / c.max(cfg.eps);
        c = c_next;
        g = g_next;
        if change < cfg.rel_tol {
            break;
        }
    }
    Ok(Reconstruction {
        image: best.2,
        energies,
        best_iteration: best.1,
    })
}
