use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute fit error in log space.
    pub residual: f64,
    pub points: usize,
}

/// Least-squares line through `(ln x, ln y)`.
///
/// # Errors
/// `InvalidParameter` for fewer than three points, nonpositive values, or
/// `x` not strictly increasing.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "slope fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if points
        .iter()
        .any(|&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()))
    {
        return Err(Error::InvalidParameter("slope fit needs finite positive values".into()));
    }
    if points.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::InvalidParameter("x must be strictly increasing".into()));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("degenerate fit: all x equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = logs
        .iter()
        .map(|&(lx, ly)| (ly - intercept - slope * lx).abs())
        .fold(0.0, f64::max);
    Ok(SlopeFit {
        slope,
        intercept,
        residual,
        points: points.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_powers() {
        let sq: Vec<(f64, f64)> = (1..=6).map(|i| (2f64.powi(i), 4f64.powi(i))).collect();
        let f = fit_loglog_slope(&sq).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12 && f.residual < 1e-12);
        let cube: Vec<(f64, f64)> = (1..10).map(|i| (i as f64, 5.0 * (i as f64).powi(3))).collect();
        let f = fit_loglog_slope(&cube).unwrap();
        assert!((f.slope - 3.0).abs() < 1e-12);
        assert!((f.intercept - 5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn perturbed_square() {
        let pts: Vec<(f64, f64)> = (2..=64)
            .map(|x| {
                let x = x as f64;
                (x, x * x * (1.0 + 0.1 * x.sin()))
            })
            .collect();
        assert!((fit_loglog_slope(&pts).unwrap().slope - 2.0).abs() < 0.1);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_loglog_slope(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(fit_loglog_slope(&[(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)]).is_err());
        assert!(fit_loglog_slope(&[(1.0, 1.0), (2.0, 0.0), (3.0, 3.0)]).is_err());
        assert!(fit_loglog_slope(&[(3.0, 1.0), (2.0, 1.0), (1.0, 3.0)]).is_err());
    }
}
