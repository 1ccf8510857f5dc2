//! Spectral analysis of the thermoelastic plate system with Newton's law of
//! cooling,
//!
//! ```text
//! u_tt + Δ²u + Δθ = 0,
//! θ_t − Δθ + σθ − Δu_t = 0,        σ ≥ 0,  x ∈ ℝⁿ,
//! ```
//!
//! worked entirely on the Fourier side. After transforming, the displacement
//! symbol û(t, ξ) satisfies a third-order scalar ODE in time whose
//! characteristic cubic has one real root and a complex-conjugate pair for
//! every frequency r = |ξ| > 0. The crate computes those roots robustly
//! ([`roots`]), assembles the exact solution and its asymptotic-profile
//! multipliers ([`multipliers`]), integrates squared symbols against the
//! radial measure to produce physical L² norms ([`quadrature`]), and fits
//! large-time growth/decay laws to verify optimal rates, profile convergence
//! and pointwise bound families ([`fit`], [`verifier`]). A command-line
//! interface ([`cli`]) exposes the experiments as CSV/JSON emitting
//! subcommands.
//!
//! Grid sweeps and panel evaluations are data-parallel; the `parallel`
//! feature (enabled by default) runs them on a rayon pool, and disabling it
//! falls back to sequential loops with bit-identical results.

pub mod cli;
pub mod fit;
pub mod multipliers;
mod ode;
pub mod parallel;
pub mod quadrature;
pub mod roots;
pub mod verifier;
