//! Small fitting helpers shared by the diagnostics.

/// Ordinary least squares `y = slope·x + intercept`.
pub fn linear_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Slope of `log y` against `log x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    linear_fit(&logs).0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let (m, c) = linear_fit(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]);
        assert!((m - 2.0).abs() < 1e-15 && (c - 1.0).abs() < 1e-15);
        let s = log_log_slope(&[(1e-2, 3e-14), (5e-3, 3e-14 / 128.0)]);
        assert!((s - 7.0).abs() < 1e-12);
    }
}
