use num_complex::Complex64;

use super::Family;
use crate::error::{Error, Result};
use crate::numeric::{log_sum_exp, CompensatedSum};
use crate::oracle::{self, QuadratureControl};
use crate::specfun::{ln_gamma, SeriesControl};

/// Mean, variance and standardized third/fourth moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

/// How a characteristic-function value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfMethod {
    /// Moment series `Σ (it)^r / r! · E(X^r)`, with the number of terms used.
    Series { terms: usize },
    /// Direct quadrature of `∫ e^{itx} f(x) dx`, taken when the series is not usable.
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfValue {
    pub value: Complex64,
    pub method: CfMethod,
}

impl Family {
    /// `ln E(X^r)` for real `r ≥ 0`.
    pub fn ln_raw_moment(&self, r: f64) -> Result<f64> {
        if !(r.is_finite() && r >= 0.0) {
            return Err(Error::Domain(format!("moment order must be finite and nonnegative, got {r}")));
        }
        let d = self.d();
        let ln_beta = self.beta().ln();
        let terms = self
            .active_terms()
            .map(|i| {
                let a = (i as f64 + r + 1.0) / d;
                Ok(self.theta()[i].ln() - a * ln_beta + ln_gamma(a)?)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(log_sum_exp(terms) - self.log_denominator())
    }

    /// Raw moment
    /// `E(X^r) = Σ θᵢ β^{-(i+r+1)/d} Γ((i+r+1)/d) / Σ θⱼ β^{-(j+1)/d} Γ((j+1)/d)`.
    pub fn raw_moment(&self, r: f64) -> Result<f64> {
        if r == 0.0 {
            return Ok(1.0);
        }
        if r.is_finite() && r > 0.0 {
            let num = super::gamma_masses(self.theta(), self.beta(), self.d(), r);
            let den = super::gamma_masses(self.theta(), self.beta(), self.d(), 0.0);
            if let (Some((_, num)), Some((_, den))) = (num, den) {
                return Ok(num / den);
            }
        }
        Ok(self.ln_raw_moment(r)?.exp())
    }

    pub fn summary_stats(&self) -> Result<SummaryStats> {
        let m1 = self.raw_moment(1.0)?;
        let m2 = self.raw_moment(2.0)?;
        let m3 = self.raw_moment(3.0)?;
        let m4 = self.raw_moment(4.0)?;
        let variance = m2 - m1 * m1;
        let mu3 = m3 - 3.0 * m1 * m2 + 2.0 * m1.powi(3);
        let mu4 = m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1.powi(4);
        Ok(SummaryStats {
            mean: m1,
            variance,
            skewness: mu3 / variance.powf(1.5),
            excess_kurtosis: mu4 / (variance * variance) - 3.0,
        })
    }

    /// Characteristic function from the moment series
    /// `φ(t) = Σ_r (it)^r / r! · E(X^r)`.
    ///
    /// The series only converges locally (for `d = 1` it needs `|t| < β`; for
    /// `d < 1` it never does). Divergence, a term budget overrun, or terms large
    /// enough to swamp `ctl.tol` all produce an error. Returns the value and
    /// the number of terms summed.
    pub fn cf_series(&self, t: f64, ctl: &SeriesControl) -> Result<(Complex64, usize)> {
        if !t.is_finite() {
            return Err(Error::Domain(format!("t must be finite, got {t}")));
        }
        if t == 0.0 {
            return Ok((Complex64::new(1.0, 0.0), 1));
        }
        let ln_t = t.abs().ln();
        let sign = t.signum();
        let mut re = CompensatedSum::default();
        let mut im = CompensatedSum::default();
        let mut max_term = 0.0_f64;
        let mut prev = f64::INFINITY;
        for r in 0..ctl.max_terms {
            let rf = r as f64;
            let ln_mag = rf * ln_t - ln_gamma(rf + 1.0)? + self.ln_raw_moment(rf)?;
            let mag = ln_mag.exp();
            if !mag.is_finite() || mag * f64::EPSILON > ctl.tol {
                return Err(Error::LossOfSignificance { terms: r + 1, max_term: mag, sum: 1.0 });
            }
            max_term = max_term.max(mag);
            // (i·sign)^r cycles through 1, i, -1, -i
            let signed = if r % 2 == 1 { sign * mag } else { mag };
            match r % 4 {
                0 => re.add(signed),
                1 => im.add(signed),
                2 => re.add(-signed),
                _ => im.add(-signed),
            }
            let partial = Complex64::new(re.value(), im.value()).norm();
            if r > 0 && mag < prev && mag < ctl.tol * partial {
                if max_term * f64::EPSILON * 8.0 > ctl.tol * partial {
                    return Err(Error::LossOfSignificance { terms: r + 1, max_term, sum: partial });
                }
                return Ok((Complex64::new(re.value(), im.value()), r + 1));
            }
            prev = mag;
        }
        Err(Error::NonConvergence {
            terms: ctl.max_terms,
            detail: format!("characteristic-function series at t = {t}"),
        })
    }

    /// `∫₀^∞ e^{itx} f(x) dx` by adaptive quadrature up to the tail cutoff.
    pub fn cf_quadrature(&self, t: f64, ctl: &QuadratureControl) -> Result<Complex64> {
        if !t.is_finite() {
            return Err(Error::Domain(format!("t must be finite, got {t}")));
        }
        let upper = oracle::tail_cutoff(self, ctl.tail_mass_tol)?;
        let kink = oracle::kink_exponent(self, 1.0);
        let pdf = |x: f64| self.pdf(x).unwrap_or(0.0);
        let re = oracle::integrate_from_zero(|x| (t * x).cos() * pdf(x), upper, kink, ctl)?;
        let im = oracle::integrate_from_zero(|x| (t * x).sin() * pdf(x), upper, kink, ctl)?;
        Ok(Complex64::new(re, im))
    }

    /// Characteristic function: the moment series where it converges cleanly,
    /// quadrature otherwise. The result records which route was taken.
    pub fn cf(&self, t: f64, ctl: &SeriesControl) -> Result<CfValue> {
        match self.cf_series(t, ctl) {
            Ok((value, terms)) => Ok(CfValue { value, method: CfMethod::Series { terms } }),
            Err(Error::Domain(msg)) => Err(Error::Domain(msg)),
            Err(_) => {
                let value = self.cf_quadrature(t, &QuadratureControl::default())?;
                Ok(CfValue { value, method: CfMethod::Quadrature })
            }
        }
    }
}
