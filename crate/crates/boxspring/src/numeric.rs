//! Small numeric helpers shared by the simulation and its diagnostics.

use crate::error::{Error, Result};

/// Kahan (compensated) summation accumulator.
///
/// Keeps the rounding error of long accumulations near one ulp of the
/// result instead of growing with the number of terms, which is what lets
/// the ledger totals meet 1e-12 relative checks at a million records.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let y = value - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Least-squares slope of `ln(y)` against `ln(x)`.
///
/// Used to measure the observed order of an error-vs-N decay; all points
/// must have strictly positive coordinates.
pub fn log_log_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::InvalidParam(
            "log-log fit needs at least 2 points".into(),
        ));
    }
    for &(x, y) in points {
        if !(x > 0.0 && y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidParam(format!(
                "log-log fit needs positive finite points, got ({x}, {y})"
            )));
        }
    }
    let n = points.len() as f64;
    let (mut sx, mut sy) = (0.0, 0.0);
    for &(x, y) in points {
        sx += x.ln();
        sy += y.ln();
    }
    let (mx, my) = (sx / n, sy / n);
    let (mut num, mut den) = (0.0, 0.0);
    for &(x, y) in points {
        let dx = x.ln() - mx;
        num += dx * (y.ln() - my);
        den += dx * dx;
    }
    if den == 0.0 {
        return Err(Error::InvalidParam(
            "log-log fit needs at least two distinct abscissae".into(),
        ));
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_beats_naive_on_small_terms() {
        // 1 followed by 1e8 copies of 1e-16 sums to 1 + 1e-8 exactly in
        // compensated arithmetic; naive accumulation loses every term.
        let mut kahan = KahanSum::new();
        let mut naive = 0.0f64;
        kahan.add(1.0);
        naive += 1.0;
        for _ in 0..100_000_000u64 {
            kahan.add(1e-16);
            naive += 1e-16;
        }
        assert_eq!(naive, 1.0);
        assert!((kahan.value() - (1.0 + 1e-8)).abs() < 1e-15);
    }

    #[test]
    fn slope_recovers_exact_power_law() {
        let points: Vec<(f64, f64)> = [10.0, 100.0, 1000.0, 10000.0]
            .iter()
            .map(|&n| (n, 3.0 / n))
            .collect();
        let slope = log_log_slope(&points).unwrap();
        assert!((slope + 1.0).abs() < 1e-12, "slope = {slope}");
    }

    #[test]
    fn slope_rejects_bad_input() {
        assert!(log_log_slope(&[(1.0, 1.0)]).is_err());
        assert!(log_log_slope(&[(1.0, 1.0), (-2.0, 1.0)]).is_err());
        assert!(log_log_slope(&[(2.0, 1.0), (2.0, 3.0)]).is_err());
    }
}
