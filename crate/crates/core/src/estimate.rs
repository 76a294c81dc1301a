//! Entropy estimates and least-squares slope fitting.
//!
//! Asymptotic growth rates are reported as finite-window slope fits with
//! the residual exposed; oscillation shows up in the residual instead of
//! being averaged away.

/// How an estimate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateMethod {
    /// Log Perron eigenvalue; exact up to the iteration tolerance.
    ExactSpectral,
    /// Least-squares slope of log counts over a window of n.
    SlopeFit,
    /// Value certified between a lower and an upper counting bound.
    Sandwich,
}

/// A computed entropy value in nats, with fit diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyEstimate {
    pub value: f64,
    pub method: EstimateMethod,
    /// Window of n used for the fit.
    pub n_range: (usize, usize),
    /// RMS residual of the slope fit (0 for exact methods).
    pub residual: f64,
    /// Certified or fitted bounds around the value, when available.
    pub bounds: Option<(f64, f64)>,
    /// True when the value comes from exact arithmetic rather than a fit.
    pub exact: bool,
    /// Set when the slope fit fails the convergence threshold.
    pub non_convergent: bool,
}

/// Residual above which a slope fit is flagged non-convergent.
pub const NON_CONVERGENT_RESIDUAL: f64 = 0.05;

impl EntropyEstimate {
    pub fn exact_spectral(value: f64) -> Self {
        EntropyEstimate {
            value,
            method: EstimateMethod::ExactSpectral,
            n_range: (0, 0),
            residual: 0.0,
            bounds: Some((value, value)),
            exact: true,
            non_convergent: false,
        }
    }

    pub fn slope_fit(fit: SlopeFit, n_range: (usize, usize)) -> Self {
        EntropyEstimate {
            value: fit.slope.max(0.0),
            method: EstimateMethod::SlopeFit,
            n_range,
            residual: fit.residual,
            bounds: None,
            exact: fit.residual == 0.0,
            non_convergent: fit.residual > NON_CONVERGENT_RESIDUAL,
        }
    }

    pub fn with_bounds(mut self, lower: f64, upper: f64) -> Self {
        let lo = lower.min(self.value);
        let hi = upper.max(self.value);
        self.bounds = Some((lo, hi));
        self
    }
}

/// Result of a least-squares line fit through `(n, log count)` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// RMS deviation of the points from the fitted line.
    pub residual: f64,
}

/// Least-squares slope of `points = (n, value)`.
///
/// Points with non-finite values (empty sets at some depth) are dropped;
/// fewer than two finite points fit a flat line at the last value.
pub fn fit_slope(points: &[(usize, f64)]) -> SlopeFit {
    let finite: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, v)| v.is_finite())
        .map(|&(n, v)| (n as f64, v))
        .collect();
    if finite.len() < 2 {
        return SlopeFit {
            slope: 0.0,
            intercept: finite.first().map(|&(_, v)| v).unwrap_or(0.0),
            residual: 0.0,
        };
    }
    let n = finite.len() as f64;
    let sx: f64 = finite.iter().map(|p| p.0).sum();
    let sy: f64 = finite.iter().map(|p| p.1).sum();
    let sxx: f64 = finite.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = finite.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let mse: f64 = finite
        .iter()
        .map(|&(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum::<f64>()
        / n;
    SlopeFit {
        slope,
        intercept,
        residual: mse.sqrt(),
    }
}

/// The fitting window `[n_max/2, n_max]` used throughout.
pub fn fit_window(n_max: usize) -> std::ops::RangeInclusive<usize> {
    (n_max / 2).max(1)..=n_max
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_has_zero_residual() {
        let pts: Vec<(usize, f64)> = (4..=12).map(|n| (n, 0.7 * n as f64 + 1.3)).collect();
        let fit = fit_slope(&pts);
        assert!((fit.slope - 0.7).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn noisy_line_reports_residual() {
        let pts: Vec<(usize, f64)> = (0..10)
            .map(|n| (n, n as f64 + if n % 2 == 0 { 0.1 } else { -0.1 }))
            .collect();
        let fit = fit_slope(&pts);
        assert!((fit.slope - 1.0).abs() < 0.02);
        assert!(fit.residual > 0.05);
    }

    #[test]
    fn degenerate_fits_are_flat() {
        assert_eq!(fit_slope(&[]).slope, 0.0);
        assert_eq!(fit_slope(&[(3, 1.0)]).slope, 0.0);
        let with_gaps = [(1, f64::NEG_INFINITY), (2, 5.0)];
        assert_eq!(fit_slope(&with_gaps).slope, 0.0);
        assert_eq!(fit_slope(&with_gaps).intercept, 5.0);
    }
}
