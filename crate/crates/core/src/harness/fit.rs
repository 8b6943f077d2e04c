//! Power-law fits of positive time series.

use crate::error::{Error, Result};

/// Minimum number of samples inside the window.
pub const MIN_FIT_SAMPLES: usize = 8;

/// Least-squares slope of `ln value` against `ln t` over samples with
/// `window.0 <= t <= window.1`.
pub fn fit_growth_exponent(series: &[(f64, f64)], window: (f64, f64)) -> Result<f64> {
    let (lo, hi) = window;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidParameter(format!(
            "fit window [{lo}, {hi}] must satisfy 0 < lo < hi"
        )));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(t, v) in series {
        if t < lo - 1e-12 || t > hi + 1e-12 {
            continue;
        }
        if !(v > 0.0) {
            return Err(Error::NonPositiveInWindow { t, value: v });
        }
        xs.push(t.ln());
        ys.push(v.ln());
    }
    if xs.len() < MIN_FIT_SAMPLES {
        return Err(Error::TooFewRecords {
            needed: MIN_FIT_SAMPLES,
            got: xs.len(),
        });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    Ok(sxy / sxx)
}
