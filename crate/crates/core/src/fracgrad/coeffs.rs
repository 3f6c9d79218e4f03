use crate::{Error, Result};

/// Grünwald–Letnikov weights `ω_j = (-1)^j C(α, j)` for `j = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FracCoeffs {
    alpha: f64,
    taps: Vec<f64>,
}

impl FracCoeffs {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    pub fn into_taps(self) -> Vec<f64> {
        self.taps
    }
}

pub(crate) fn check_order(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!(
            "fractional order must lie in (0, 1], got {alpha}"
        )));
    }
    Ok(())
}

/// `ω_0 = 1`, `ω_j = (1 - (α + 1) / j) ω_{j-1}`.
pub fn gl_coefficients(alpha: f64, n: usize) -> Result<FracCoeffs> {
    check_order(alpha)?;
    let mut taps = Vec::with_capacity(n + 1);
    taps.push(1.0);
    for j in 1..=n {
        let prev = taps[j - 1];
        taps.push((1.0 - (alpha + 1.0) / j as f64) * prev);
    }
    Ok(FracCoeffs { alpha, taps })
}

/// Truncated G-L derivative `out[t] = Σ_{j=0..=n} ω_j · signal[t - j]`,
/// reading `signal[0]` for negative indices.
pub fn frac_derivative_1d(signal: &[f64], alpha: f64, n: usize) -> Result<Vec<f64>> {
    let coeffs = gl_coefficients(alpha, n)?;
    if signal.is_empty() {
        return Err(Error::Dimension("signal must be non-empty".into()));
    }
    Ok((0..signal.len())
        .map(|t| {
            coeffs
                .taps()
                .iter()
                .enumerate()
                .map(|(j, w)| w * signal[t.saturating_sub(j)])
                .sum()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_order_is_backward_difference() {
        assert_eq!(gl_coefficients(1.0, 2).unwrap().taps(), &[1.0, -1.0, 0.0]);
        let t = gl_coefficients(1.0, 6).unwrap();
        assert!(t.taps()[2..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn half_order_taps() {
        assert_eq!(
            gl_coefficients(0.5, 3).unwrap().taps(),
            &[1.0, -0.5, -0.125, -0.0625]
        );
    }

    #[test]
    fn first_tap_is_minus_alpha() {
        let t = gl_coefficients(0.9, 1).unwrap();
        assert_eq!(t.taps()[0], 1.0);
        assert!((t.taps()[1] + 0.9).abs() < 1e-15);
        assert_eq!(gl_coefficients(0.3, 0).unwrap().taps(), &[1.0]);
    }

    #[test]
    fn rejects_out_of_range_orders() {
        for a in [0.0, -0.2, 1.0001, f64::NAN] {
            assert!(
                matches!(gl_coefficients(a, 3), Err(Error::Domain(_))),
                "{a}"
            );
        }
    }

    #[test]
    fn fractional_taps_are_negative_and_shrinking() {
        for k in 1..10 {
            let a = k as f64 / 10.0;
            let t = gl_coefficients(a, 20).unwrap();
            for j in 1..t.len() {
                assert!(t.taps()[j] < 0.0);
                if j > 1 {
                    assert!(t.taps()[j].abs() <= t.taps()[j - 1].abs());
                }
            }
        }
    }

    #[test]
    fn tap_sum_shrinks_with_support() {
        for k in 1..10 {
            let a = k as f64 / 10.0;
            let sums: Vec<f64> = (0..30)
                .map(|n| gl_coefficients(a, n).unwrap().taps().iter().sum::<f64>())
                .collect();
            for w in sums.windows(2) {
                assert!(w[1].abs() < w[0].abs(), "alpha {a}: {w:?}");
            }
        }
    }

    #[test]
    fn derivative_of_constant_vanishes_at_first_order() {
        let out = frac_derivative_1d(&[0.7; 6], 1.0, 4).unwrap();
        assert!(out.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn derivative_of_unit_ramp() {
        assert_eq!(
            frac_derivative_1d(&[0.0, 1.0, 2.0, 3.0], 1.0, 1).unwrap(),
            vec![0.0, 1.0, 1.0, 1.0]
        );
    }

    #[test]
    fn half_order_impulse_response() {
        let out = frac_derivative_1d(&[0.0, 0.0, 1.0, 0.0, 0.0], 0.5, 2).unwrap();
        assert_eq!(out, vec![0.0, 0.0, 1.0, -0.5, -0.125]);
    }

    #[test]
    fn empty_signal_is_rejected() {
        assert!(frac_derivative_1d(&[], 0.5, 2).is_err());
    }
}
