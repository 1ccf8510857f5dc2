//! Rate extraction from norm-versus-time series.
//!
//! Asymptotic statements of the form ‖u(t)‖ ≍ t^a or ≍ √(ln t) are
//! quantified by least squares in the appropriate coordinates: ln v against
//! ln t for power laws, v² against ln t for square-root-of-log growth. A fit
//! is accepted only when r² ≥ 0.99; a rejected fit is still returned inside
//! the error so callers can report the numbers.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitModel {
    PowerLaw,
    SqrtLog,
}

impl std::fmt::Display for FitModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FitModel::PowerLaw => write!(f, "power-law"),
            FitModel::SqrtLog => write!(f, "sqrt-log"),
        }
    }
}

/// Result of one regression. For [`FitModel::PowerLaw`], `exponent` is the
/// slope of ln v vs ln t (so v ≈ e^intercept · t^exponent). For
/// [`FitModel::SqrtLog`], `exponent` is the slope of v² vs ln t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub model: FitModel,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    /// Goodness of fit below the 0.99 acceptance bar; the fit itself rides
    /// along for reporting.
    #[error("fit rejected: r² = {:.4} below 0.99", .0.r_squared)]
    BadFit(RateFit),
    #[error("rate fits need at least 8 samples, got {0}")]
    TooFewSamples(usize),
    #[error("invalid sample: {0}")]
    InvalidSample(String),
}

fn validate(times: &[f64], values: &[f64]) -> Result<(), FitError> {
    if times.len() < 8 {
        return Err(FitError::TooFewSamples(times.len()));
    }
    if times.len() != values.len() {
        return Err(FitError::InvalidSample(format!(
            "{} times vs {} values",
            times.len(),
            values.len()
        )));
    }
    for (i, (&t, &v)) in times.iter().zip(values).enumerate() {
        if t.is_nan() || t <= 1.0 {
            return Err(FitError::InvalidSample(format!("time[{i}] = {t} not > 1")));
        }
        if v.is_nan() || v <= 0.0 {
            return Err(FitError::InvalidSample(format!(
                "value[{i}] = {v} not positive"
            )));
        }
        if i > 0 && t <= times[i - 1] {
            return Err(FitError::InvalidSample(format!(
                "time[{i}] = {t} not ascending"
            )));
        }
    }
    Ok(())
}

/// Plain least squares of y on x: (slope, intercept, r²). A series with no
/// variance in y is reported as a perfect constant fit.
pub(crate) fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    // A series that is constant up to rounding is a perfect flat fit; compare
    // the variance against the overall magnitude rather than against zero.
    let scale: f64 = ys.iter().map(|y| y * y).sum::<f64>().max(f64::MIN_POSITIVE);
    let r_squared = if ss_tot <= 1e-24 * scale {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).max(0.0)
    };
    (slope, intercept, r_squared)
}

fn accept(fit: RateFit) -> Result<RateFit, FitError> {
    if fit.r_squared >= 0.99 {
        Ok(fit)
    } else {
        Err(FitError::BadFit(fit))
    }
}

/// Fit v ≈ C t^a by regressing ln v on ln t.
pub fn fit_power_law(times: &[f64], values: &[f64]) -> Result<RateFit, FitError> {
    validate(times, values)?;
    let xs: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let (exponent, intercept, r_squared) = least_squares(&xs, &ys);
    accept(RateFit {
        exponent,
        intercept,
        r_squared,
        model: FitModel::PowerLaw,
    })
}

/// Fit v ≈ √(a ln t + b) by regressing v² on ln t.
pub fn fit_sqrt_log(times: &[f64], values: &[f64]) -> Result<RateFit, FitError> {
    validate(times, values)?;
    let xs: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v * v).collect();
    let (exponent, intercept, r_squared) = least_squares(&xs, &ys);
    accept(RateFit {
        exponent,
        intercept,
        r_squared,
        model: FitModel::SqrtLog,
    })
}

/// Relative drift of v(t)/envelope(t) from the first to the last sample:
/// |ratio_end/ratio_start − 1|. Zero means the envelope captures the series
/// exactly.
pub fn ratio_drift(times: &[f64], values: &[f64], envelope: impl Fn(f64) -> f64) -> f64 {
    assert!(
        times.len() == values.len() && times.len() >= 2,
        "need at least two samples"
    );
    let first = values[0] / envelope(times[0]);
    let last = values[values.len() - 1] / envelope(times[times.len() - 1]);
    (last / first - 1.0).abs()
}

/// Log-log slope over the trailing decade of the grid (samples with
/// t ≥ t_max/10), as a trend diagnostic: negative means the series still
/// falls at the end of the window.
pub fn last_decade_slope(times: &[f64], values: &[f64]) -> f64 {
    assert!(
        times.len() == values.len() && times.len() >= 2,
        "need at least two samples"
    );
    let cut = times[times.len() - 1] / 10.0 * (1.0 - 1e-12);
    let start = times
        .iter()
        .position(|&t| t >= cut)
        .unwrap_or(times.len() - 2);
    let start = start.min(times.len() - 2);
    let xs: Vec<f64> = times[start..].iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = values[start..].iter().map(|v| v.ln()).collect();
    least_squares(&xs, &ys).0
}

/// Logarithmically spaced grid of `count` points over [lo, hi], inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && lo > 0.0 && hi > lo, "degenerate grid request");
    let step = (hi / lo).ln() / (count - 1) as f64;
    (0..count).map(|k| lo * (step * k as f64).exp()).collect()
}
