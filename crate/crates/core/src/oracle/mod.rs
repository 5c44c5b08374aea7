//! Independent verification engines.
//!
//! Everything here works from the density alone (adaptive quadrature) or
//! from draws (Monte Carlo, Kolmogorov-Smirnov) and never reuses the gamma
//! closed forms it is meant to check. Incomplete-gamma tail bounds are used
//! only to pick where an integral may be truncated.

mod ks;
mod quadrature;

pub use ks::{kolmogorov_survival, ks_critical_value, ks_statistic};
pub use quadrature::{integrate, integrate_from_zero};

use std::fmt;

use crate::entropy;
use crate::error::{Error, Result};
use crate::family::Family;

/// Tolerances for every quadrature-based oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureControl {
    pub abs_tol: f64,
    pub max_depth: usize,
    /// Probability mass allowed beyond the upper integration limit.
    pub tail_mass_tol: f64,
}

impl QuadratureControl {
    pub fn new(abs_tol: f64, max_depth: usize, tail_mass_tol: f64) -> Result<Self> {
        if !(abs_tol > 0.0 && abs_tol.is_finite()) {
            return Err(Error::Domain(format!("abs_tol must be positive, got {abs_tol}")));
        }
        if max_depth < 10 {
            return Err(Error::Domain(format!("max_depth must be at least 10, got {max_depth}")));
        }
        if !(tail_mass_tol > 0.0 && tail_mass_tol < 1e-3) {
            return Err(Error::Domain(format!("tail_mass_tol must lie in (0, 1e-3), got {tail_mass_tol}")));
        }
        Ok(Self { abs_tol, max_depth, tail_mass_tol })
    }
}

impl Default for QuadratureControl {
    fn default() -> Self {
        Self { abs_tol: 1e-10, max_depth: 60, tail_mass_tol: 1e-12 }
    }
}

/// Smallest `x` on a doubling-then-bisection search with `ln_tail(x) < ln_tol`.
/// `ln_tail` must be nonincreasing.
pub(crate) fn first_below<F>(ln_tail: F, start: f64, ln_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut lo = 0.0;
    let mut hi = start;
    let mut doublings = 0;
    while ln_tail(hi)? >= ln_tol {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > 1100 {
            return Err(Error::Integration("tail search ran past the representable range".into()));
        }
    }
    for _ in 0..200 {
        if hi - lo <= 1e-9 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if ln_tail(mid)? < ln_tol {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Upper limit `x_max` with `S(x_max) < mass_tol`.
pub fn tail_cutoff(f: &Family, mass_tol: f64) -> Result<f64> {
    if !(mass_tol > 0.0 && mass_tol < 1e-3) {
        return Err(Error::Domain(format!("mass_tol must lie in (0, 1e-3), got {mass_tol}")));
    }
    let scale = f.beta().powf(-1.0 / f.d());
    first_below(|x| f.ln_survival(x), scale, mass_tol.ln())
}

/// Smallest non-integer power of `x` in the expansion of `f(x)^alpha` at the
/// origin, or `+inf` if the integrand is smooth there. Feeds
/// [`integrate_from_zero`].
pub fn kink_exponent(f: &Family, alpha: f64) -> f64 {
    let mut kink = f64::INFINITY;
    if f.d().fract() != 0.0 {
        kink = f.d();
    }
    let lead = f.active_terms().next().unwrap_or(0) as f64 * alpha;
    if lead > 0.0 && lead.fract() != 0.0 {
        kink = kink.min(lead);
    }
    kink
}

/// `∫₀^upper g(x) f(x) dx` with the kink handling for `f`.
pub fn expect_up_to<G: Fn(f64) -> f64>(f: &Family, g: G, upper: f64, ctl: &QuadratureControl) -> Result<f64> {
    integrate_from_zero(|x| g(x) * f.pdf(x).unwrap_or(0.0), upper, kink_exponent(f, 1.0), ctl)
}

/// What an [`OracleReport`] compares.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quantity {
    Normalization,
    Moment(f64),
    Cdf(f64),
    Reliability,
    Entropy(f64),
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Normalization => write!(f, "normalization"),
            Quantity::Moment(r) => write!(f, "moment({r})"),
            Quantity::Cdf(x) => write!(f, "cdf({x})"),
            Quantity::Reliability => write!(f, "reliability"),
            Quantity::Entropy(a) => write!(f, "entropy({a})"),
        }
    }
}

/// A closed-form value next to its independent estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub quantity: Quantity,
    pub closed_form: f64,
    pub oracle_value: f64,
    pub abs_diff: f64,
    /// Absolute tolerance the difference is judged against.
    pub tolerance: f64,
    pub passed: bool,
}

impl OracleReport {
    pub fn new(quantity: Quantity, closed_form: f64, oracle_value: f64, tolerance: f64) -> Self {
        let abs_diff = (closed_form - oracle_value).abs();
        // NaN differences fail
        let passed = abs_diff <= tolerance;
        Self { quantity, closed_form, oracle_value, abs_diff, tolerance, passed }
    }

    fn from_results(quantity: Quantity, closed: Result<f64>, oracle: Result<f64>, tolerance: impl Fn(f64) -> f64) -> Self {
        let closed = closed.unwrap_or(f64::NAN);
        let oracle = oracle.unwrap_or(f64::NAN);
        Self::new(quantity, closed, oracle, tolerance(closed))
    }
}

/// Tolerances applied by [`check_family`].
pub const NORMALIZATION_TOL: f64 = 1e-8;
pub const MOMENT_REL_TOL: f64 = 1e-7;
pub const CDF_TOL: f64 = 1e-8;
pub const ENTROPY_TOL: f64 = 1e-7;

/// Checks normalization, raw moments 1-4, the CDF at five points around the
/// mean and the order-2 Tsallis entropy against quadrature. Failures of the
/// oracle itself show up as failed reports with NaN values. Report order is
/// fixed.
pub fn check_family(f: &Family, ctl: &QuadratureControl) -> Vec<OracleReport> {
    let mut reports = Vec::with_capacity(11);

    let upper = tail_cutoff(f, ctl.tail_mass_tol);
    let norm = upper.clone().and_then(|u| expect_up_to(f, |_| 1.0, u, ctl));
    reports.push(OracleReport::from_results(Quantity::Normalization, Ok(1.0), norm, |_| NORMALIZATION_TOL));

    for r in 1..=4 {
        let r = r as f64;
        let closed = f.raw_moment(r);
        let oracle = moment_cutoff(f, r, ctl).and_then(|u| {
            let mctl = QuadratureControl { abs_tol: moment_abs_tol(&closed, ctl), ..*ctl };
            expect_up_to(f, |x| x.powf(r), u, &mctl)
        });
        reports.push(OracleReport::from_results(Quantity::Moment(r), closed, oracle, |c| {
            MOMENT_REL_TOL * c.abs()
        }));
    }

    let mean = f.raw_moment(1.0).unwrap_or(1.0);
    for k in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let x = k * mean;
        let oracle = expect_up_to(f, |_| 1.0, x, ctl);
        reports.push(OracleReport::from_results(Quantity::Cdf(x), f.cdf(x), oracle, |_| CDF_TOL));
    }

    let closed = entropy::tsallis_integer(f, 2);
    let oracle = entropy::tsallis_quadrature(f, 2.0, ctl.abs_tol);
    reports.push(OracleReport::from_results(Quantity::Entropy(2.0), closed, oracle, |_| ENTROPY_TOL));

    reports
}

fn moment_abs_tol(closed: &Result<f64>, ctl: &QuadratureControl) -> f64 {
    match closed {
        Ok(m) if m.is_finite() && *m > 0.0 => (ctl.abs_tol * m.max(1.0)).min(1e-2 * MOMENT_REL_TOL * m),
        _ => ctl.abs_tol,
    }
}

/// Upper limit beyond which `∫ x^r f(x) dx` is below `tail_mass_tol` times
/// `max(1, E X^r)`, using the partial-moment tail
/// `c Σ θᵢ Γ((i+r+1)/d, βx^d) / (d β^{(i+r+1)/d})`.
fn moment_cutoff(f: &Family, r: f64, ctl: &QuadratureControl) -> Result<f64> {
    use crate::numeric::log_sum_exp;
    use crate::specfun::ln_upper_incomplete_gamma;
    let d = f.d();
    let ln_beta = f.beta().ln();
    let ln_tail = |x: f64| -> Result<f64> {
        let z = f.beta() * x.powf(d);
        let terms = f
            .active_terms()
            .map(|i| {
                let a = (i as f64 + r + 1.0) / d;
                Ok(f.theta()[i].ln() - a * ln_beta + ln_upper_incomplete_gamma(a, z)?)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(f.log_c() - d.ln() + log_sum_exp(terms))
    };
    let scale = f.raw_moment(r)?.max(1.0);
    let target = (ctl.tail_mass_tol * scale).ln();
    first_below(ln_tail, f.beta().powf(-1.0 / d), target)
}

/// Mean of a Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
}

impl MonteCarloEstimate {
    /// True when `value` lies within `sigmas` standard errors of the estimate.
    pub fn agrees_with(&self, value: f64, sigmas: f64) -> bool {
        (self.mean - value).abs() <= sigmas * self.std_error
    }
}

/// Sample size used by the Monte Carlo oracles.
pub const MC_SAMPLES: usize = 1_000_000;
/// Acceptance band, in standard errors.
pub const MC_SIGMAS: f64 = 4.0;

fn mean_and_error(values: impl Iterator<Item = f64>) -> MonteCarloEstimate {
    let mut n = 0usize;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for v in values {
        n += 1;
        let delta = v - mean;
        mean += delta / n as f64;
        m2 += delta * (v - mean);
    }
    let var = if n > 1 { m2 / (n - 1) as f64 } else { 0.0 };
    MonteCarloEstimate { mean, std_error: (var / n as f64).sqrt(), n }
}

/// `P(Y < X)` from `n` paired independent draws.
pub fn monte_carlo_reliability(strength: &Family, stress: &Family, n: usize, seed: u64) -> Result<MonteCarloEstimate> {
    let xs = strength.sample(n, seed)?;
    let ys = stress.sample(n, seed ^ 0x9e37_79b9_7f4a_7c15)?;
    Ok(mean_and_error(xs.iter().zip(&ys).map(|(x, y)| if y < x { 1.0 } else { 0.0 })))
}

/// `E(X^r)` from `n` draws.
pub fn monte_carlo_moment(f: &Family, r: f64, n: usize, seed: u64) -> Result<MonteCarloEstimate> {
    let xs = f.sample(n, seed)?;
    Ok(mean_and_error(xs.iter().map(|x| x.powf(r))))
}
