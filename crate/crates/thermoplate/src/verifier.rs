//! Numerical experiments: rate fits, profile convergence, pointwise bound
//! scans, and the cross-model comparison table.
//!
//! Everything here composes the exact Fourier solution ([`crate::multipliers`])
//! with n-dimensional norm quadrature ([`crate::quadrature`]) and regression
//! ([`crate::fit`]). Asymptotic claims are operationalized: "≍ envelope"
//! becomes a fitted exponent plus a positive lower ratio, "o(envelope)"
//! becomes a monotone, several-fold decreasing ratio over two decades, and
//! pointwise inequalities become max-ratio scans that must stay stable under
//! grid refinement.

use crate::fit::{self, FitError, FitModel, RateFit};
use crate::multipliers::{self, DataSymbol, GaussianDatum, MomentSet, MultiplierError};
use crate::quadrature::{self, NormResult, QuadratureError, QuadratureSpec};
use crate::roots::{
    self, CharacteristicRoots, DiffusionConstants, ModelParams, RootsError, ZoneConfig,
};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerifierError {
    #[error(transparent)]
    Roots(#[from] RootsError),
    #[error(transparent)]
    Multiplier(#[from] MultiplierError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error("bound family {family} ratio grew under refinement: {coarse:.6e} -> {fine:.6e}")]
    UnboundedRatio {
        family: BoundFamily,
        coarse: f64,
        fine: f64,
    },
    #[error("invalid experiment config: {field}: {message}")]
    InvalidConfig {
        field: &'static str,
        message: String,
    },
}

/// Radius beyond which a width-w Gaussian datum's squared symbol is below
/// e^{−60} of its peak: a safe quadrature cutoff for data-driven integrands.
pub fn r_max_for_width(width: f64) -> f64 {
    (60.0f64.sqrt() / width).max(8.0)
}

/// One experiment: model parameters, Gaussian data for the three fields,
/// the time grid, and quadrature settings.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub params: ModelParams,
    pub u0: GaussianDatum,
    pub u1: GaussianDatum,
    pub theta0: GaussianDatum,
    pub time_grid: Vec<f64>,
    pub quad: QuadratureSpec,
}

impl ExperimentConfig {
    /// The workhorse setup: centered Gaussian velocity datum (width 0.5,
    /// unit amplitude), zero displacement and temperature, twelve times
    /// logarithmically spaced over [10², 10⁴].
    pub fn standard(n: usize, sigma: f64) -> Result<Self, VerifierError> {
        let params = ModelParams::new(sigma, n)?;
        Ok(Self {
            params,
            u0: GaussianDatum::zero(),
            u1: GaussianDatum::radial(1.0, 0.5),
            theta0: GaussianDatum::zero(),
            time_grid: fit::log_grid(1e2, 1e4, 12),
            quad: QuadratureSpec::default().with_r_max(r_max_for_width(0.5)),
        })
    }

    pub fn validate(&self) -> Result<(), VerifierError> {
        if self.time_grid.len() < 2 {
            return Err(VerifierError::InvalidConfig {
                field: "time_grid",
                message: format!("{} points, need at least 2", self.time_grid.len()),
            });
        }
        for (i, &t) in self.time_grid.iter().enumerate() {
            if t.is_nan() || t <= 1.0 {
                return Err(VerifierError::InvalidConfig {
                    field: "time_grid",
                    message: format!("time[{i}] = {t} not > 1"),
                });
            }
            if i > 0 && t <= self.time_grid[i - 1] {
                return Err(VerifierError::InvalidConfig {
                    field: "time_grid",
                    message: format!("time[{i}] = {t} not ascending"),
                });
            }
        }
        let max_shift_dims = self.params.n.min(1);
        for (name, datum) in [("u0", &self.u0), ("u1", &self.u1), ("theta0", &self.theta0)] {
            if datum.shift.iter().any(|&x| x != 0.0) && self.params.n != 1 {
                return Err(VerifierError::InvalidConfig {
                    field: "data.shift",
                    message: format!(
                        "{name} is shifted but shifts need n = 1, got n = {}",
                        self.params.n
                    ),
                });
            }
            if datum.shift.len() > max_shift_dims.max(self.params.n) {
                return Err(VerifierError::InvalidConfig {
                    field: "data.shift",
                    message: format!(
                        "{name} shift has {} components in dimension {}",
                        datum.shift.len(),
                        self.params.n
                    ),
                });
            }
        }
        Ok(())
    }

    fn is_radial(&self) -> bool {
        [&self.u0, &self.u1, &self.theta0]
            .iter()
            .all(|d| d.shift.iter().all(|&x| x == 0.0))
    }

    /// Zeroth moments of all three data and the first moment of u1.
    pub fn moments(&self) -> MomentSet {
        let n = self.params.n;
        MomentSet {
            p_u0: self.u0.mean(n),
            p_u1: self.u1.mean(n),
            p_theta0: self.theta0.mean(n),
            m_u1: self.u1.first_moment(n),
        }
    }
}

/// Which evolution drives the data: the damped plate system at a given σ,
/// or the undamped plate (no thermal coupling at all).
#[derive(Debug, Clone, Copy, PartialEq)]
enum Evolution {
    Plate,
    Thermo(f64),
}

/// Characteristic roots with the σ = 0 branch handled by the exact scaling
/// form (valid at every r, including far below the eigensolver's floor).
fn roots_at(r: f64, sigma: f64, dc: &DiffusionConstants) -> CharacteristicRoots {
    if sigma == 0.0 {
        let s = r * r;
        CharacteristicRoots {
            lambda1: -dc.a0 * s,
            lambda_r: -dc.a1 * s,
            lambda_i: dc.a2 * s,
            r,
        }
    } else {
        roots::solve_cubic(r, sigma).expect("cubic is solvable for sigma > 0")
    }
}

fn evolve(ev: Evolution, t: f64, r: f64, data: &DataSymbol, dc: &DiffusionConstants) -> Complex64 {
    match ev {
        Evolution::Plate => multipliers::pure_plate_hat(t, r, data.u0, data.u1),
        Evolution::Thermo(sigma) => {
            let rts = roots_at(r, sigma, dc);
            multipliers::u_hat(t, &rts, data).expect("characteristic roots are distinct for r > 0")
        }
    }
}

fn radial_data(cfg: &ExperimentConfig, r: f64) -> DataSymbol {
    let n = cfg.params.n;
    DataSymbol::new(
        Complex64::new(cfg.u0.fourier_radial(n, r), 0.0),
        Complex64::new(cfg.u1.fourier_radial(n, r), 0.0),
        Complex64::new(cfg.theta0.fourier_radial(n, r), 0.0),
    )
}

fn line_data(cfg: &ExperimentConfig, xi: f64) -> DataSymbol {
    DataSymbol::new(
        cfg.u0.fourier(1, &[xi]),
        cfg.u1.fourier(1, &[xi]),
        cfg.theta0.fourier(1, &[xi]),
    )
}

fn norm_for(ev: Evolution, t: f64, cfg: &ExperimentConfig) -> Result<NormResult, VerifierError> {
    let dc = DiffusionConstants::default();
    if cfg.is_radial() {
        let f = |r: f64| evolve(ev, t, r, &radial_data(cfg, r), &dc);
        Ok(quadrature::l2_norm_radial(f, cfg.params.n, t, &cfg.quad)?)
    } else {
        if cfg.params.n != 1 {
            return Err(VerifierError::InvalidConfig {
                field: "data.shift",
                message: "shifted data are normed on the line, which needs n = 1".into(),
            });
        }
        let f = |xi: f64| evolve(ev, t, xi.abs(), &line_data(cfg, xi), &dc);
        Ok(quadrature::l2_norm_line(f, t, &cfg.quad)?)
    }
}

/// ‖u(t, ·)‖_{L²(ℝⁿ)} for the damped plate model of `cfg`.
pub fn solution_norm(t: f64, cfg: &ExperimentConfig) -> Result<NormResult, VerifierError> {
    norm_for(Evolution::Thermo(cfg.params.sigma), t, cfg)
}

/// Which asymptotic profile to subtract from the solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    /// Full first-order profile: (Ĵ₀ + Ĥ)P_{u1} − i⟨ξ,M_{u1}⟩Ĵ₀ + Ĵ₁P_{u0}
    /// + σ⁻¹r²Ĵ₀P_{θ0}.
    Full,
    /// Leading term only: Ĵ₀ P_{u1}.
    Simple,
}

/// ‖u(t, ·) − profile(t, ·)‖_{L²(ℝⁿ)} (σ > 0).
pub fn profile_residual(
    t: f64,
    cfg: &ExperimentConfig,
    kind: ProfileKind,
) -> Result<NormResult, VerifierError> {
    let sigma = cfg.params.sigma;
    if sigma <= 0.0 {
        return Err(VerifierError::InvalidConfig {
            field: "params.sigma",
            message: "the first-order profile needs sigma > 0".into(),
        });
    }
    let m = cfg.moments();
    let dc = DiffusionConstants::default();
    if cfg.is_radial() {
        let radial_m = MomentSet::radial(m.p_u0, m.p_u1, m.p_theta0);
        let f = |r: f64| {
            let u = evolve(Evolution::Thermo(sigma), t, r, &radial_data(cfg, r), &dc);
            let phi = match kind {
                ProfileKind::Full => {
                    Complex64::new(multipliers::phi_hat_radial(t, r, sigma, &radial_m), 0.0)
                }
                ProfileKind::Simple => {
                    Complex64::new(multipliers::j0_hat(t, r, sigma) * m.p_u1, 0.0)
                }
            };
            u - phi
        };
        Ok(quadrature::l2_norm_radial(f, cfg.params.n, t, &cfg.quad)?)
    } else {
        if cfg.params.n != 1 {
            return Err(VerifierError::InvalidConfig {
                field: "data.shift",
                message: "shifted data are normed on the line, which needs n = 1".into(),
            });
        }
        let f = |xi: f64| {
            let u = evolve(
                Evolution::Thermo(sigma),
                t,
                xi.abs(),
                &line_data(cfg, xi),
                &dc,
            );
            let phi = match kind {
                ProfileKind::Full => multipliers::phi_hat(t, &[xi], sigma, &m),
                ProfileKind::Simple => {
                    Complex64::new(multipliers::j0_hat(t, xi.abs(), sigma) * m.p_u1, 0.0)
                }
            };
            u - phi
        };
        Ok(quadrature::l2_norm_line(f, t, &cfg.quad)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePoint {
    pub t: f64,
    pub norm: f64,
    /// Optimal envelope D_n(t).
    pub envelope: f64,
    /// ‖u‖ / (D_n(t) |P_{u1}|); NaN when the lower hypothesis P_{u1} ≠ 0
    /// is not met.
    pub lower_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerBound {
    pub min_ratio: f64,
    /// Log-log slope of the ratio over the trailing decade; a clearly
    /// negative value would mean the lower comparison is failing.
    pub trailing_slope: f64,
}

#[derive(Debug, Clone)]
pub struct Theorem1Report {
    pub points: Vec<RatePoint>,
    pub power: RateFit,
    pub sqrt_log: RateFit,
    /// Model with the higher r².
    pub preferred: FitModel,
    /// Drift of ‖u‖/D_n over the trailing decade.
    pub envelope_drift: f64,
    pub lower: Option<LowerBound>,
}

fn lenient(res: Result<RateFit, FitError>) -> Result<RateFit, VerifierError> {
    match res {
        Ok(f) => Ok(f),
        Err(FitError::BadFit(f)) => Ok(f),
        Err(e) => Err(e.into()),
    }
}

fn trailing_decade(times: &[f64]) -> usize {
    let cut = times[times.len() - 1] / 10.0 * (1.0 - 1e-12);
    times
        .iter()
        .position(|&t| t >= cut)
        .unwrap_or(0)
        .min(times.len() - 2)
}

/// Growth/decay experiment: solution norms over the time grid, both
/// candidate fits, and the lower-bound diagnostics.
pub fn check_theorem1(cfg: &ExperimentConfig) -> Result<Theorem1Report, VerifierError> {
    cfg.validate()?;
    let times = &cfg.time_grid;
    if times.len() < 8 || times[times.len() - 1] / times[0] < 99.0 {
        return Err(VerifierError::InvalidConfig {
            field: "time_grid",
            message: "rate fits need at least 8 points spanning two decades".into(),
        });
    }
    let n = cfg.params.n;
    let p_u1 = cfg.u1.mean(n).abs();
    let mut points = Vec::with_capacity(times.len());
    for &t in times {
        let norm = solution_norm(t, cfg)?.value;
        let envelope = quadrature::decay_d(n, t)?;
        let lower_ratio = if p_u1 > 0.0 {
            norm / (envelope * p_u1)
        } else {
            f64::NAN
        };
        points.push(RatePoint {
            t,
            norm,
            envelope,
            lower_ratio,
        });
    }
    let norms: Vec<f64> = points.iter().map(|p| p.norm).collect();
    let power = lenient(fit::fit_power_law(times, &norms))?;
    let sqrt_log = lenient(fit::fit_sqrt_log(times, &norms))?;
    let preferred = if sqrt_log.r_squared > power.r_squared {
        FitModel::SqrtLog
    } else {
        FitModel::PowerLaw
    };
    let start = trailing_decade(times);
    let envelope_drift = fit::ratio_drift(&times[start..], &norms[start..], |t| {
        quadrature::decay_d(n, t).expect("grid times exceed 1")
    });
    let lower = if p_u1 > 0.0 {
        let ratios: Vec<f64> = points.iter().map(|p| p.lower_ratio).collect();
        let min_ratio = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let trailing_slope = fit::last_decade_slope(times, &ratios);
        Some(LowerBound {
            min_ratio,
            trailing_slope,
        })
    } else {
        None
    };
    Ok(Theorem1Report {
        points,
        power,
        sqrt_log,
        preferred,
        envelope_drift,
        lower,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfilePoint {
    pub t: f64,
    pub residual: f64,
    /// Profile envelope B_n(t).
    pub envelope: f64,
    pub ratio: f64,
}

/// Profile-convergence experiment: ‖u − φ‖/B_n over the time grid. The
/// refined claim predicts this ratio vanishes; numerically it must trend
/// down decisively across the window.
pub fn check_theorem2(cfg: &ExperimentConfig) -> Result<Vec<ProfilePoint>, VerifierError> {
    cfg.validate()?;
    let mut out = Vec::with_capacity(cfg.time_grid.len());
    for &t in &cfg.time_grid {
        let residual = profile_residual(t, cfg, ProfileKind::Full)?.value;
        let envelope = quadrature::decay_b(cfg.params.n, t)?;
        out.push(ProfilePoint {
            t,
            residual,
            envelope,
            ratio: residual / envelope,
        });
    }
    Ok(out)
}

/// Residuals at one time with and without the first-moment term of the
/// profile (n = 1, shifted u1): returns (with_moment, without_moment).
/// The moment term absorbs the datum's first-order phase, so the first
/// entry should be the smaller one.
pub fn moment_term_comparison(t: f64, cfg: &ExperimentConfig) -> Result<(f64, f64), VerifierError> {
    if cfg.params.n != 1 {
        return Err(VerifierError::InvalidConfig {
            field: "params.n",
            message: "the moment-term experiment runs on the line (n = 1)".into(),
        });
    }
    let with_m = profile_residual(t, cfg, ProfileKind::Full)?.value;
    // Same solution, but the profile sees a zero first moment.
    let sigma = cfg.params.sigma;
    let m = cfg.moments();
    let m_zero = MomentSet {
        m_u1: vec![0.0; m.m_u1.len()],
        ..m
    };
    let dc = DiffusionConstants::default();
    let f = |xi: f64| {
        let u = evolve(
            Evolution::Thermo(sigma),
            t,
            xi.abs(),
            &line_data(cfg, xi),
            &dc,
        );
        u - multipliers::phi_hat(t, &[xi], sigma, &m_zero)
    };
    let without_m = quadrature::l2_norm_line(f, t, &cfg.quad)?.value;
    Ok((with_m, without_m))
}

/// Pointwise inequality families scanned over their frequency zones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundFamily {
    /// |û − ĝ₁ − ĝ₂| ≤ C r² e^{−cr⁴t} (|û₀|+|û₁|+|θ̂₀|), small zone.
    Star1,
    /// |ĝ₁ − Ĵ₀û₁| ≤ C e^{−cr⁴t} |û₁|, small zone.
    Est01,
    /// |ĝ₁ − (Ĵ₀+Ĥ₀+Ĥ₁)û₁| ≤ C r² e^{−cr⁴t} |û₁|, small zone.
    Est02,
    /// |ĝ₂ − Ĵ₁û₀ − σ⁻¹r²Ĵ₀θ̂₀| ≤ C r² e^{−cr⁴t} (|û₀|+|θ̂₀|), small zone.
    Est03,
    /// |û| ≤ C e^{−cr⁴t} (|û₀| + t|sinc(r²t)||û₁| + |θ̂₀|), small zone.
    Est04,
    /// |û − ĝ₁| ≤ C e^{−cr⁴t} (|û₀| + r²|û₁| + |θ̂₀|), small zone.
    Est05,
    /// |û| ≤ C e^{−ct} (|û₀| + ⟨ξ⟩⁻²|û₁| + ⟨ξ⟩⁻²|θ̂₀|), r ≥ ε₀, fitted c.
    LargeBounded,
}

impl BoundFamily {
    pub const ALL: [BoundFamily; 7] = [
        BoundFamily::Star1,
        BoundFamily::Est01,
        BoundFamily::Est02,
        BoundFamily::Est03,
        BoundFamily::Est04,
        BoundFamily::Est05,
        BoundFamily::LargeBounded,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundFamily::Star1 => "star1",
            BoundFamily::Est01 => "est01",
            BoundFamily::Est02 => "est02",
            BoundFamily::Est03 => "est03",
            BoundFamily::Est04 => "est04",
            BoundFamily::Est05 => "est05",
            BoundFamily::LargeBounded => "large",
        }
    }
}

impl std::fmt::Display for BoundFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for BoundFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BoundFamily::ALL
            .into_iter()
            .find(|fam| fam.name() == s)
            .ok_or_else(|| format!("unknown bound family '{s}'"))
    }
}

/// Outcome of one family scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub family: BoundFamily,
    /// Envelope rate c: 1/(4σ) in the small zone, fitted from the time
    /// decay of the max ratio in the large zone.
    pub rate: f64,
    /// Max LHS/RHS over the coarse grid.
    pub constant: f64,
    pub worst_t: f64,
    pub worst_r: f64,
    /// Max over the doubled grid; must not exceed 1.1 × `constant`.
    pub refined_constant: f64,
    /// refined_constant / constant (1.0 when both vanish).
    pub growth: f64,
    /// Slowest modal decay −max ℜλ over the scanned radii (large zone
    /// only); the fitted rate should land near it.
    pub spectral_gap: Option<f64>,
}

fn small_zone_ratio(
    family: BoundFamily,
    t: f64,
    sigma: f64,
    rts: &CharacteristicRoots,
    data: &DataSymbol,
) -> Result<f64, MultiplierError> {
    let r = rts.r;
    let r2 = r * r;
    let env = (-r2 * r2 * t / (4.0 * sigma)).exp();
    let (a0, a1, ath) = (data.u0.norm(), data.u1.norm(), data.theta0.norm());
    let (lhs, rhs) = match family {
        BoundFamily::Star1 => {
            let lhs = (multipliers::u_hat(t, rts, data)?
                - multipliers::g1_hat(t, rts, data)?
                - multipliers::g2_hat(t, rts, data)?)
            .norm();
            (lhs, r2 * env * (a0 + a1 + ath))
        }
        BoundFamily::Est01 => {
            let lhs = (multipliers::g1_hat(t, rts, data)?
                - multipliers::j0_hat(t, r, sigma) * data.u1)
                .norm();
            (lhs, env * a1)
        }
        BoundFamily::Est02 => {
            let kernel = multipliers::j0_hat(t, r, sigma)
                + multipliers::h0_hat(t, r, sigma)
                + multipliers::h1_hat(t, r, sigma);
            let lhs = (multipliers::g1_hat(t, rts, data)? - kernel * data.u1).norm();
            (lhs, r2 * env * a1)
        }
        BoundFamily::Est03 => {
            let lhs = (multipliers::g2_hat(t, rts, data)?
                - multipliers::j1_hat(t, r, sigma) * data.u0
                - r2 / sigma * multipliers::j0_hat(t, r, sigma) * data.theta0)
                .norm();
            (lhs, r2 * env * (a0 + ath))
        }
        BoundFamily::Est04 => {
            let lhs = multipliers::u_hat(t, rts, data)?.norm();
            let osc = t * multipliers::sinc(r2 * t).abs();
            (lhs, env * (a0 + osc * a1 + ath))
        }
        BoundFamily::Est05 => {
            let lhs =
                (multipliers::u_hat(t, rts, data)? - multipliers::g1_hat(t, rts, data)?).norm();
            (lhs, env * (a0 + r2 * a1 + ath))
        }
        BoundFamily::LargeBounded => unreachable!("large zone handled separately"),
    };
    Ok(if rhs > 0.0 {
        lhs / rhs
    } else if lhs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    })
}

struct ScanResult {
    max_ratio: f64,
    worst_t: f64,
    worst_r: f64,
}

fn scan_small_zone(
    family: BoundFamily,
    sigma: f64,
    data: &DataSymbol,
    nr: usize,
    nt: usize,
) -> Result<ScanResult, VerifierError> {
    let zones = ZoneConfig::default();
    let rs = fit::log_grid(1e-3, zones.eps0, nr);
    let ts = fit::log_grid(1.0, 1e3, nt);
    let mut best = ScanResult {
        max_ratio: 0.0,
        worst_t: ts[0],
        worst_r: rs[0],
    };
    for &r in &rs {
        let rts = roots::solve_cubic(r, sigma)?;
        for &t in &ts {
            let ratio = small_zone_ratio(family, t, sigma, &rts, data)?;
            if ratio > best.max_ratio {
                best = ScanResult {
                    max_ratio: ratio,
                    worst_t: t,
                    worst_r: r,
                };
            }
        }
    }
    Ok(best)
}

fn large_zone_weight(r: f64, data: &DataSymbol) -> f64 {
    let inv_bracket = 1.0 / (1.0 + r * r);
    data.u0.norm() + inv_bracket * (data.u1.norm() + data.theta0.norm())
}

/// Scan |û|/weight over the large zone; fit the exponential decay rate of
/// the per-time max, then bound the constant with that envelope.
fn scan_large_zone(
    sigma: f64,
    data: &DataSymbol,
    nr: usize,
    nt: usize,
    rate_override: Option<f64>,
) -> Result<(ScanResult, f64, f64), VerifierError> {
    let zones = ZoneConfig::default();
    let rs = fit::log_grid(zones.eps0, 50.0, nr);
    let ts = fit::log_grid(1.0, 1e3, nt);
    let all_roots: Vec<CharacteristicRoots> = rs
        .iter()
        .map(|&r| roots::solve_cubic(r, sigma))
        .collect::<Result<_, _>>()?;
    let gap = all_roots
        .iter()
        .map(|rts| {
            let slowest = rts.lambda1.max(rts.lambda_r);
            -slowest
        })
        .fold(f64::INFINITY, f64::min);

    let mut raw = vec![0.0f64; ts.len()];
    for rts in &all_roots {
        let w = large_zone_weight(rts.r, data);
        for (j, &t) in ts.iter().enumerate() {
            let u = multipliers::u_hat(t, rts, data)?.norm();
            let ratio = if w > 0.0 {
                u / w
            } else if u == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            raw[j] = raw[j].max(ratio);
        }
    }
    if raw.iter().all(|&m| m == 0.0) {
        let best = ScanResult {
            max_ratio: 0.0,
            worst_t: ts[0],
            worst_r: rs[0],
        };
        return Ok((best, rate_override.unwrap_or(0.0), gap));
    }
    let rate = match rate_override {
        Some(c) => c,
        None => {
            let xs = &ts;
            let ys: Vec<f64> = raw.iter().map(|&m| m.max(f64::MIN_POSITIVE).ln()).collect();
            let (slope, _, _) = fit::least_squares(xs, &ys);
            -slope
        }
    };
    let mut best = ScanResult {
        max_ratio: 0.0,
        worst_t: ts[0],
        worst_r: rs[0],
    };
    for rts in &all_roots {
        let w = large_zone_weight(rts.r, data);
        for &t in &ts {
            let u = multipliers::u_hat(t, rts, data)?.norm();
            let rhs = (-rate * t).exp() * w;
            let ratio = if rhs > 0.0 {
                u / rhs
            } else if u == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            if ratio > best.max_ratio {
                best = ScanResult {
                    max_ratio: ratio,
                    worst_t: t,
                    worst_r: rts.r,
                };
            }
        }
    }
    Ok((best, rate, gap))
}

/// Scan one inequality family over its zone on a coarse grid and a doubled
/// grid; error out if refinement grows the constant by more than 10%.
pub fn check_bound(
    family: BoundFamily,
    sigma: f64,
    data: &DataSymbol,
) -> Result<BoundCheck, VerifierError> {
    if sigma <= 0.0 {
        return Err(VerifierError::InvalidConfig {
            field: "sigma",
            message: "bound scans use the sigma > 0 kernels".into(),
        });
    }
    // The ratio fields oscillate in the phase r²t (small zone) or λ_I t
    // (large zone), so the time axis must resolve the phase at the largest
    // scanned radius before the grid max stabilizes; these densities hold
    // the doubled-grid growth near 0.1% for every family at σ = 1.
    let (coarse, fine, rate, gap) = if family == BoundFamily::LargeBounded {
        let (coarse, rate, gap) = scan_large_zone(sigma, data, 96, 201, None)?;
        // Reuse the coarse-fitted rate so the refinement comparison isolates
        // the grid, not the envelope.
        let (fine, _, _) = scan_large_zone(sigma, data, 192, 401, Some(rate))?;
        (coarse, fine, rate, Some(gap))
    } else {
        let coarse = scan_small_zone(family, sigma, data, 96, 1201)?;
        let fine = scan_small_zone(family, sigma, data, 192, 2401)?;
        (coarse, fine, 1.0 / (4.0 * sigma), None)
    };
    if !coarse.max_ratio.is_finite() || !fine.max_ratio.is_finite() {
        return Err(VerifierError::UnboundedRatio {
            family,
            coarse: coarse.max_ratio,
            fine: fine.max_ratio,
        });
    }
    let growth = if coarse.max_ratio > 0.0 {
        fine.max_ratio / coarse.max_ratio
    } else {
        1.0
    };
    if growth > 1.1 {
        return Err(VerifierError::UnboundedRatio {
            family,
            coarse: coarse.max_ratio,
            fine: fine.max_ratio,
        });
    }
    Ok(BoundCheck {
        family,
        rate,
        constant: coarse.max_ratio,
        worst_t: coarse.worst_t,
        worst_r: coarse.worst_r,
        refined_constant: fine.max_ratio,
        growth,
        spectral_gap: gap,
    })
}

/// One row of the cross-model comparison: fitted rate of the squared norm
/// (or its sqrt-log/bounded classification).
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub model: String,
    pub n: usize,
    /// "power-law", "sqrt-log", or "bounded".
    pub fit_model: String,
    /// Power-law rows: exponent of ‖·‖² vs t. Sqrt-log rows: slope of
    /// ‖·‖² vs ln t.
    pub exponent: f64,
    pub r_squared: f64,
}

fn classify_series(times: &[f64], norms: &[f64]) -> Result<(String, f64, f64), VerifierError> {
    let squared: Vec<f64> = norms.iter().map(|v| v * v).collect();
    let power = lenient(fit::fit_power_law(times, &squared))?;
    let sqrt_log = lenient(fit::fit_sqrt_log(times, norms))?;
    Ok(if power.exponent.abs() < 0.05 {
        ("bounded".into(), power.exponent, power.r_squared)
    } else if sqrt_log.r_squared > power.r_squared {
        ("sqrt-log".into(), sqrt_log.exponent, sqrt_log.r_squared)
    } else {
        ("power-law".into(), power.exponent, power.r_squared)
    })
}

/// Cross-model comparison over dimensions: undamped plate (n ≤ 4 only),
/// then one damped model per σ in `sigma_list`, all driven by the same
/// centered Gaussian velocity datum.
pub fn table1_experiment(
    n_list: &[usize],
    sigma_list: &[f64],
    width: f64,
    times: &[f64],
    quad: &QuadratureSpec,
) -> Result<Vec<TableRow>, VerifierError> {
    let mut rows = Vec::new();
    for &n in n_list {
        let mut variants: Vec<(String, Evolution)> = Vec::new();
        if n <= 4 {
            variants.push(("pure_plate".into(), Evolution::Plate));
        }
        for &sigma in sigma_list {
            variants.push((format!("sigma{sigma}"), Evolution::Thermo(sigma)));
        }
        for (name, ev) in variants {
            let sigma = match ev {
                Evolution::Thermo(s) => s,
                Evolution::Plate => 0.0,
            };
            let cfg = ExperimentConfig {
                params: ModelParams::new(sigma, n)?,
                u0: GaussianDatum::zero(),
                u1: GaussianDatum::radial(1.0, width),
                theta0: GaussianDatum::zero(),
                time_grid: times.to_vec(),
                quad: quad.clone().with_r_max(r_max_for_width(width)),
            };
            cfg.validate()?;
            let mut norms = Vec::with_capacity(times.len());
            for &t in times {
                norms.push(norm_for(ev, t, &cfg)?.value);
            }
            let (fit_model, exponent, r_squared) = classify_series(times, &norms)?;
            rows.push(TableRow {
                model: name,
                n,
                fit_model,
                exponent,
                r_squared,
            });
        }
    }
    Ok(rows)
}

/// ‖r^k e^{−cr⁴t}‖_{L²(ℝⁿ)} across a time grid.
pub fn kernel_norm_sweep(
    k: u32,
    n: usize,
    c: f64,
    times: &[f64],
    rel_tol: f64,
) -> Result<Vec<(f64, f64)>, VerifierError> {
    if c.is_nan() || c <= 0.0 {
        return Err(VerifierError::InvalidConfig {
            field: "c",
            message: format!("damping rate must be positive, got {c}"),
        });
    }
    times
        .iter()
        .map(|&t| {
            let spec = QuadratureSpec::default()
                .with_r_max((80.0 / (c * t)).powf(0.25))
                .with_rel_tol(rel_tol);
            let f = |r: f64| Complex64::new(r.powi(k as i32) * (-c * r.powi(4) * t).exp(), 0.0);
            Ok((t, quadrature::l2_norm_radial(f, n, t, &spec)?.value))
        })
        .collect()
}

/// ‖sin(r²t)/r² · e^{−cr⁴t}‖_{L²(ℝⁿ)}.
pub fn sine_kernel_norm(n: usize, c: f64, t: f64, rel_tol: f64) -> Result<f64, VerifierError> {
    let spec = QuadratureSpec::default()
        .with_r_max((80.0 / (c * t)).powf(0.25))
        .with_rel_tol(rel_tol);
    let f = |r: f64| {
        let s = r * r;
        Complex64::new(t * multipliers::sinc(s * t) * (-c * s * s * t).exp(), 0.0)
    };
    Ok(quadrature::l2_norm_radial(f, n, t, &spec)?.value)
}

/// Measured orders and coefficients of the small-frequency root expansions:
/// fits of ln|λ_R + r⁴/(2σ)| and ln|λ_I − r²| against ln r.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionReport {
    pub order_real: f64,
    pub coef_real: f64,
    pub order_imag: f64,
    pub coef_imag: f64,
    /// Measured quadratic coefficient of the real root, λ₁ ≈ −σ + c₁r²;
    /// reported for the record, with no asserted value.
    pub lambda1_c1: f64,
}

pub fn expansion_order_experiment(
    sigma: f64,
    r_lo: f64,
    r_hi: f64,
    points: usize,
) -> Result<ExpansionReport, VerifierError> {
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(VerifierError::InvalidConfig {
            field: "sigma",
            message: "expansion orders are measured against the sigma > 0 forms".into(),
        });
    }
    let rs = fit::log_grid(r_lo, r_hi, points.max(8));
    let mut ln_r = Vec::with_capacity(rs.len());
    let mut dev_real = Vec::with_capacity(rs.len());
    let mut dev_imag = Vec::with_capacity(rs.len());
    for &r in &rs {
        let rts = roots::solve_cubic(r, sigma)?;
        let r2 = r * r;
        ln_r.push(r.ln());
        dev_real.push((rts.lambda_r + r2 * r2 / (2.0 * sigma)).abs().ln());
        dev_imag.push((rts.lambda_i - r2).abs().ln());
    }
    let (order_real, int_real, _) = fit::least_squares(&ln_r, &dev_real);
    let (order_imag, int_imag, _) = fit::least_squares(&ln_r, &dev_imag);
    Ok(ExpansionReport {
        order_real,
        coef_real: int_real.exp(),
        order_imag,
        coef_imag: int_imag.exp(),
        lambda1_c1: roots::lambda1_quadratic_coeff(sigma),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_config_is_valid_and_bad_grids_are_rejected() {
        let cfg = ExperimentConfig::standard(3, 1.0).unwrap();
        cfg.validate().unwrap();

        let mut short = cfg.clone();
        short.time_grid = vec![10.0];
        assert!(matches!(
            short.validate(),
            Err(VerifierError::InvalidConfig {
                field: "time_grid",
                ..
            })
        ));

        let mut low = cfg.clone();
        low.time_grid = vec![0.5, 10.0];
        assert!(low.validate().is_err());

        let mut unsorted = cfg.clone();
        unsorted.time_grid = vec![100.0, 50.0];
        assert!(unsorted.validate().is_err());

        let mut shifted_high_dim = cfg;
        shifted_high_dim.u1 = GaussianDatum::new(1.0, 0.5, vec![1.0]);
        assert!(shifted_high_dim.validate().is_err(), "shifts need n = 1");
    }

    #[test]
    fn zero_data_gives_zero_norm_and_zero_residual() {
        let mut cfg = ExperimentConfig::standard(2, 1.0).unwrap();
        cfg.u1 = GaussianDatum::zero();
        let norm = solution_norm(200.0, &cfg).unwrap();
        assert_eq!(norm.value, 0.0);
        let res = profile_residual(200.0, &cfg, ProfileKind::Full).unwrap();
        assert_eq!(res.value, 0.0);
    }

    #[test]
    fn decay_rate_check_matches_dimension_one_growth() {
        let mut cfg = ExperimentConfig::standard(1, 1.0).unwrap();
        cfg.time_grid = fit::log_grid(1e2, 1e4, 8);
        let report = check_theorem1(&cfg).unwrap();
        assert!(
            (report.power.exponent - 0.75).abs() < 0.05,
            "n=1 exponent {} should be near 0.75",
            report.power.exponent
        );
        assert_eq!(report.preferred, FitModel::PowerLaw);
        let lower = report.lower.expect("P_u1 is nonzero");
        assert!(lower.min_ratio > 0.0);
        assert!(
            lower.trailing_slope > -0.05,
            "lower ratio trending down: {}",
            lower.trailing_slope
        );
    }

    #[test]
    fn lower_bound_check_skipped_without_mean() {
        // Displacement-only data: upper machinery still runs, lower is None.
        let mut cfg = ExperimentConfig::standard(3, 1.0).unwrap();
        cfg.u0 = GaussianDatum::radial(1.0, 0.5);
        cfg.u1 = GaussianDatum::zero();
        cfg.time_grid = fit::log_grid(1e2, 1e4, 8);
        let report = check_theorem1(&cfg).unwrap();
        assert!(report.lower.is_none());
        assert!(
            report.power.exponent < 0.0,
            "u0-driven solution should decay"
        );
    }

    #[test]
    fn profile_ratio_decreases_on_the_line_of_radial_data() {
        let mut cfg = ExperimentConfig::standard(1, 1.0).unwrap();
        cfg.time_grid = fit::log_grid(1e2, 1e4, 6);
        let pts = check_theorem2(&cfg).unwrap();
        assert!(
            pts.last().unwrap().ratio < 0.5 * pts[0].ratio,
            "ratio should drop: {pts:?}"
        );
    }

    #[test]
    fn moment_term_improves_shifted_profile() {
        let mut cfg = ExperimentConfig::standard(1, 1.0).unwrap();
        cfg.u1 = GaussianDatum::new(1.0, 0.5, vec![1.0]);
        let (with_m, without_m) = moment_term_comparison(1e3, &cfg).unwrap();
        assert!(
            with_m < without_m,
            "moment term should reduce the residual: {with_m} vs {without_m}"
        );
    }

    #[test]
    fn bound_families_est01_finite_and_trivial_data_zero() {
        let data = DataSymbol::real(1.0, 1.0, 1.0);
        let check = check_bound(BoundFamily::Est01, 1.0, &data).unwrap();
        assert!(check.constant.is_finite() && check.constant > 0.0);
        assert!(check.growth <= 1.1);

        let zero = DataSymbol::real(0.0, 0.0, 0.0);
        let trivial = check_bound(BoundFamily::Star1, 1.0, &zero).unwrap();
        assert_eq!(trivial.constant, 0.0);
    }

    #[test]
    fn large_zone_rate_tracks_spectral_gap() {
        let data = DataSymbol::real(1.0, 1.0, 1.0);
        let check = check_bound(BoundFamily::LargeBounded, 1.0, &data).unwrap();
        let gap = check.spectral_gap.expect("large zone reports the gap");
        assert!(check.rate > 0.0, "fitted decay rate must be positive");
        assert!(
            check.rate > 0.3 * gap && check.rate < 3.0 * gap,
            "fitted rate {} far from spectral gap {}",
            check.rate,
            gap
        );
    }

    #[test]
    fn expansion_orders_near_six_at_unit_sigma() {
        let report = expansion_order_experiment(1.0, 0.02, 0.1, 10).unwrap();
        assert!(
            (report.order_real - 6.0).abs() < 0.3,
            "real-part order {}",
            report.order_real
        );
        assert!(
            (report.order_imag - 6.0).abs() < 0.3,
            "imag-part order {}",
            report.order_imag
        );
        assert!(
            (report.coef_real - 0.5).abs() < 0.1,
            "real coef {}",
            report.coef_real
        );
        assert!(
            (report.coef_imag - 0.375).abs() < 0.075,
            "imag coef {}",
            report.coef_imag
        );
        assert!(report.lambda1_c1.is_finite());
    }

    #[test]
    fn table_rows_agree_in_low_dimension() {
        let times = fit::log_grid(1e2, 1e4, 8);
        let rows =
            table1_experiment(&[1], &[0.0, 1.0], 0.5, &times, &QuadratureSpec::default()).unwrap();
        assert_eq!(rows.len(), 3);
        for row in &rows {
            assert_eq!(row.fit_model, "power-law", "{}: {:?}", row.model, row);
            assert!(
                (row.exponent - 1.5).abs() < 0.05,
                "{} squared-norm exponent {} should be near 1.5",
                row.model,
                row.exponent
            );
        }
    }

    #[test]
    fn bound_family_names_round_trip() {
        for fam in BoundFamily::ALL {
            let parsed: BoundFamily = fam.name().parse().unwrap();
            assert_eq!(parsed, fam);
        }
        assert!("est99".parse::<BoundFamily>().is_err());
    }
}
