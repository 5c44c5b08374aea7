//! The polynomial-weighted exponential-power family
//!
//! ```text
//! f(x) = c · (θ₀ + θ₁x + … + θ_p x^p) · exp(-β x^d),   x ≥ 0
//! ```
//!
//! with nonnegative coefficients. Writing `D = Σ θᵢ Γ((i+1)/d) β^{-(i+1)/d}`,
//! the normalizing constant is `c = d / D` and term `i` carries the mixing
//! proportion `θᵢ Γ((i+1)/d) β^{-(i+1)/d} / D`. Each term, normalized, is a
//! generalized gamma density `∝ x^i exp(-β x^d)`, so the family is a finite
//! mixture of those components.
//!
//! Every sum of gamma ratios is accumulated in log space with a max shift.

mod mixture;
mod moments;

pub use mixture::{Component, MixtureView};
pub use moments::{CfMethod, CfValue, SummaryStats};

use crate::error::{Error, Result};
use crate::numeric::log_sum_exp;
use crate::specfun::{ln_gamma, ln_lower_incomplete_gamma, ln_upper_incomplete_gamma};

/// Raw parameters `(θ₀..θ_p, β, d)`; the polynomial degree is `theta.len() - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyParams {
    pub theta: Vec<f64>,
    pub beta: f64,
    pub d: f64,
}

impl FamilyParams {
    /// Builds and validates a parameter set.
    pub fn new(theta: Vec<f64>, beta: f64, d: f64) -> Result<Self> {
        let params = Self { theta, beta, d };
        params.validate()?;
        Ok(params)
    }

    /// Polynomial degree `p`.
    pub fn degree(&self) -> usize {
        self.theta.len().saturating_sub(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.theta.is_empty() {
            return Err(Error::InvalidParams("theta must hold at least one coefficient".into()));
        }
        for (i, &t) in self.theta.iter().enumerate() {
            if !t.is_finite() {
                return Err(Error::InvalidParams(format!("theta[{i}] = {t} is not finite")));
            }
            if t < 0.0 {
                return Err(Error::InvalidParams(format!(
                    "theta[{i}] = {t} is negative; coefficients must be nonnegative"
                )));
            }
        }
        if self.theta.iter().all(|&t| t == 0.0) {
            return Err(Error::InvalidParams("all theta coefficients are zero".into()));
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::InvalidParams(format!("beta must be finite and positive, got {}", self.beta)));
        }
        if !(self.d.is_finite() && self.d > 0.0) {
            return Err(Error::InvalidParams(format!("d must be finite and positive, got {}", self.d)));
        }
        Ok(())
    }
}

/// A validated, normalized family member.
///
/// Immutable after construction; cheap to clone and safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    params: FamilyParams,
    log_c: f64,
    log_denominator: f64,
    /// `ln(θᵢ Γ(aᵢ) β^{-aᵢ})`, `-inf` where `θᵢ = 0`.
    log_mass: Vec<f64>,
    mp: Vec<f64>,
}

/// `θᵢ Γ((i+r+1)/d) β^{-(i+r+1)/d}` for each `i` and their sum, or `None`
/// if any nonzero term or the sum leaves the normal floating-point range.
pub(crate) fn gamma_masses(theta: &[f64], beta: f64, d: f64, r: f64) -> Option<(Vec<f64>, f64)> {
    let mut total = 0.0;
    let masses = theta
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            if t == 0.0 {
                return Some(0.0);
            }
            let a = (i as f64 + r + 1.0) / d;
            let m = t * crate::specfun::gamma(a).ok()? / beta.powf(a);
            total += m;
            m.is_normal().then_some(m)
        })
        .collect::<Option<Vec<_>>>()?;
    total.is_normal().then_some((masses, total))
}

/// Validates `params` and computes the normalizing constant and mixing proportions.
pub fn make_family(params: FamilyParams) -> Result<Family> {
    Family::new(params)
}

impl Family {
    pub fn new(params: FamilyParams) -> Result<Self> {
        params.validate()?;
        let ln_beta = params.beta.ln();
        let log_mass = params
            .theta
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                if t == 0.0 {
                    return Ok(f64::NEG_INFINITY);
                }
                let a = (i as f64 + 1.0) / params.d;
                Ok(t.ln() + ln_gamma(a)? - a * ln_beta)
            })
            .collect::<Result<Vec<_>>>()?;
        let log_denominator = log_sum_exp(log_mass.iter().copied());
        if !log_denominator.is_finite() {
            return Err(Error::Overflow(format!(
                "normalizing sum is not representable (log = {log_denominator})"
            )));
        }
        // direct quotients when every mass is a normal float: exact for
        // integer shapes with simple rates, where the log route is off by an ulp
        let linear = gamma_masses(&params.theta, params.beta, params.d, 0.0);
        let (log_denominator, mp) = match linear {
            Some((masses, total)) => (total.ln(), masses.iter().map(|m| m / total).collect()),
            None => (log_denominator, log_mass.iter().map(|lm| (lm - log_denominator).exp()).collect()),
        };
        let log_c = params.d.ln() - log_denominator;
        Ok(Self { params, log_c, log_denominator, log_mass, mp })
    }

    pub fn params(&self) -> &FamilyParams {
        &self.params
    }

    pub fn theta(&self) -> &[f64] {
        &self.params.theta
    }

    pub fn beta(&self) -> f64 {
        self.params.beta
    }

    pub fn d(&self) -> f64 {
        self.params.d
    }

    pub fn degree(&self) -> usize {
        self.params.degree()
    }

    /// Normalizing constant `c`.
    pub fn c(&self) -> f64 {
        self.log_c.exp()
    }

    pub fn log_c(&self) -> f64 {
        self.log_c
    }

    /// `ln D` with `D = Σ θⱼ β^{-(j+1)/d} Γ((j+1)/d)`, the denominator shared by
    /// the normalizing constant, the CDF and the raw moments.
    pub fn log_denominator(&self) -> f64 {
        self.log_denominator
    }

    /// Mixing proportions, one per coefficient (zero where `θᵢ = 0`).
    pub fn mixing_proportions(&self) -> &[f64] {
        &self.mp
    }

    /// Shape `(i+1)/d` of the generalized gamma component for term `i`.
    pub fn component_shape(&self, i: usize) -> f64 {
        (i as f64 + 1.0) / self.params.d
    }

    /// Indices of the nonzero coefficients.
    pub fn active_terms(&self) -> impl Iterator<Item = usize> + '_ {
        self.params.theta.iter().enumerate().filter(|(_, &t)| t > 0.0).map(|(i, _)| i)
    }

    fn check_point(x: f64) -> Result<()> {
        if x.is_finite() && x >= 0.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!("x must be finite and nonnegative, got {x}")))
        }
    }

    /// `ln f(x)`; `-inf` where the density vanishes.
    pub fn ln_pdf(&self, x: f64) -> Result<f64> {
        Self::check_point(x)?;
        let theta = &self.params.theta;
        if x == 0.0 {
            return Ok(if theta[0] > 0.0 { self.log_c + theta[0].ln() } else { f64::NEG_INFINITY });
        }
        let ln_x = x.ln();
        let ln_poly = log_sum_exp(
            theta
                .iter()
                .enumerate()
                .map(|(i, &t)| if t > 0.0 { t.ln() + i as f64 * ln_x } else { f64::NEG_INFINITY }),
        );
        Ok(self.log_c + ln_poly - self.params.beta * x.powf(self.params.d))
    }

    /// Density `c (Σ θᵢ xⁱ) e^{-βx^d}`, equal to `c θ₀` at the origin.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        Ok(self.ln_pdf(x)?.exp())
    }

    fn scaled_point(&self, x: f64) -> f64 {
        self.params.beta * x.powf(self.params.d)
    }

    /// Distribution function
    /// `F(x) = Σ θᵢ β^{-(i+1)/d} γ((i+1)/d, βx^d) / Σ θⱼ β^{-(j+1)/d} Γ((j+1)/d)`.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        Self::check_point(x)?;
        if x == 0.0 {
            return Ok(0.0);
        }
        let z = self.scaled_point(x);
        let ln_beta = self.params.beta.ln();
        let terms = self
            .active_terms()
            .map(|i| {
                let a = self.component_shape(i);
                Ok(self.params.theta[i].ln() - a * ln_beta + ln_lower_incomplete_gamma(a, z)?)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((log_sum_exp(terms) - self.log_denominator).exp().min(1.0))
    }

    /// `ln S(x)` built from upper incomplete gammas, accurate deep into the tail.
    pub fn ln_survival(&self, x: f64) -> Result<f64> {
        Self::check_point(x)?;
        if x == 0.0 {
            return Ok(0.0);
        }
        let z = self.scaled_point(x);
        let ln_beta = self.params.beta.ln();
        let terms = self
            .active_terms()
            .map(|i| {
                let a = self.component_shape(i);
                Ok(self.params.theta[i].ln() - a * ln_beta + ln_upper_incomplete_gamma(a, z)?)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((log_sum_exp(terms) - self.log_denominator).min(0.0))
    }

    /// Survival (reliability) function `S(x) = 1 - F(x)`.
    pub fn survival(&self, x: f64) -> Result<f64> {
        Ok(self.ln_survival(x)?.exp())
    }

    /// Hazard rate `f(x) / S(x)`.
    pub fn hazard(&self, x: f64) -> Result<f64> {
        let s = self.survival(x)?;
        if s == 0.0 {
            return Err(Error::TailUnderflow(x));
        }
        Ok((self.ln_pdf(x)? - self.ln_survival(x)?).exp())
    }
}
