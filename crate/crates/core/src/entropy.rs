//! Tsallis entropy `TE_α = (1 - ∫ f^α) / (α - 1)`.
//!
//! For integer `α ≥ 2`, `f^α = c^α (Σ θᵢ xⁱ)^α e^{-αβx^d}` expands into
//! powers of `x`, each integrating to a gamma function:
//!
//! ```text
//! ∫ f^α = (c^α / d) Σ_s κ_s Γ((s+1)/d) / (αβ)^{(s+1)/d}
//! ```
//!
//! where `κ` are the coefficients of the polynomial `(Σ θᵢ xⁱ)^α`. `κ` is
//! computed by repeated convolution rather than by summing over all
//! `(p+1)^α` index tuples. Other orders go through quadrature.

use crate::error::{Error, Result};
use crate::family::Family;
use crate::numeric::log_sum_exp;
use crate::oracle::{self, first_below, QuadratureControl};
use crate::specfun::{ln_gamma, ln_upper_incomplete_gamma};

/// Largest integer order accepted by [`tsallis_integer`].
pub const DEFAULT_ORDER_CAP: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyMode {
    IntegerExact,
    Quadrature,
}

/// A validated entropy order together with the evaluation route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyOrder {
    alpha: f64,
    mode: EntropyMode,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Domain(format!("entropy order must be finite and positive, got {alpha}")));
    }
    if (alpha - 1.0).abs() <= 1e-9 {
        return Err(Error::Domain("entropy order 1 is the Shannon limit and is excluded".into()));
    }
    Ok(())
}

fn as_integer_order(alpha: f64) -> Option<u32> {
    (alpha.fract() == 0.0 && alpha >= 2.0 && alpha <= u32::MAX as f64).then_some(alpha as u32)
}

impl EntropyOrder {
    /// Picks the exact route for integer orders in `2..=DEFAULT_ORDER_CAP`, quadrature otherwise.
    pub fn new(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        let mode = match as_integer_order(alpha) {
            Some(k) if k <= DEFAULT_ORDER_CAP => EntropyMode::IntegerExact,
            _ => EntropyMode::Quadrature,
        };
        Ok(Self { alpha, mode })
    }

    pub fn with_mode(alpha: f64, mode: EntropyMode) -> Result<Self> {
        check_alpha(alpha)?;
        if mode == EntropyMode::IntegerExact && as_integer_order(alpha).is_none() {
            return Err(Error::Domain(format!("exact evaluation needs an integer order >= 2, got {alpha}")));
        }
        Ok(Self { alpha, mode })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mode(&self) -> EntropyMode {
        self.mode
    }
}

/// Coefficients of `(Σ θᵢ xⁱ)^alpha`, lowest degree first.
pub fn self_convolution(theta: &[f64], alpha: u32) -> Vec<f64> {
    let mut acc = vec![1.0];
    for _ in 0..alpha {
        let mut next = vec![0.0; acc.len() + theta.len() - 1];
        for (i, &a) in acc.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &t) in theta.iter().enumerate() {
                next[i + j] += a * t;
            }
        }
        acc = next;
    }
    acc
}

/// `∫ f^alpha` for integer `alpha ≥ 2` via the convolution form.
pub fn power_integral_integer(f: &Family, alpha: u32) -> Result<f64> {
    if alpha < 2 {
        return Err(Error::Domain(format!("integer entropy order must be >= 2, got {alpha}")));
    }
    let theta = f.theta();
    let scale = theta.iter().copied().fold(0.0, f64::max);
    let scaled: Vec<f64> = theta.iter().map(|t| t / scale).collect();
    let kappa = self_convolution(&scaled, alpha);
    let a = alpha as f64;
    let d = f.d();
    let ln_rate = (a * f.beta()).ln();
    let terms = kappa
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0.0)
        .map(|(s, &k)| {
            let shape = (s as f64 + 1.0) / d;
            Ok(k.ln() + ln_gamma(shape)? - shape * ln_rate)
        })
        .collect::<Result<Vec<_>>>()?;
    let ln_integral = a * (f.log_c() + scale.ln()) - d.ln() + log_sum_exp(terms);
    Ok(ln_integral.exp())
}

/// Exact Tsallis entropy for integer `alpha` in `2..=DEFAULT_ORDER_CAP`.
pub fn tsallis_integer(f: &Family, alpha: u32) -> Result<f64> {
    tsallis_integer_capped(f, alpha, DEFAULT_ORDER_CAP)
}

/// [`tsallis_integer`] with an explicit order cap.
pub fn tsallis_integer_capped(f: &Family, alpha: u32, cap: u32) -> Result<f64> {
    if alpha > cap {
        return Err(Error::OrderCap { alpha, cap });
    }
    let integral = power_integral_integer(f, alpha)?;
    Ok((1.0 - integral) / (alpha as f64 - 1.0))
}

/// Upper limit past which `∫ f^alpha` is below `mass`.
///
/// For `x ≥ 1`, `f(x)^α ≤ c^α Θ^α x^{pα} e^{-αβx^d}` with `Θ = Σ θᵢ`, whose
/// tail integral is an upper incomplete gamma.
fn power_tail_cutoff(f: &Family, alpha: f64, mass: f64) -> Result<f64> {
    let p = f.active_terms().last().unwrap_or(0) as f64;
    let d = f.d();
    let rate = alpha * f.beta();
    let shape = (p * alpha + 1.0) / d;
    let ln_theta_sum = f.theta().iter().sum::<f64>().ln();
    let prefix = alpha * (f.log_c() + ln_theta_sum) - d.ln() - shape * rate.ln();
    let ln_bound = |x: f64| -> Result<f64> {
        let x = x.max(1.0);
        Ok(prefix + ln_upper_incomplete_gamma(shape, rate * x.powf(d))?)
    };
    let start = f.beta().powf(-1.0 / d).max(1.0);
    Ok(first_below(ln_bound, start, mass.ln())?.max(1.0))
}

/// `∫ f^alpha` by adaptive quadrature, absolute error about `tol`.
pub fn power_integral_quadrature(f: &Family, alpha: f64, tol: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Domain(format!("power must be finite and positive, got {alpha}")));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let upper = power_tail_cutoff(f, alpha, 0.1 * tol)?;
    let ctl = QuadratureControl { abs_tol: (0.5 * tol).max(1e-15), ..QuadratureControl::default() };
    oracle::integrate_from_zero(
        |x| (alpha * f.ln_pdf(x).unwrap_or(f64::NEG_INFINITY)).exp(),
        upper,
        oracle::kink_exponent(f, alpha),
        &ctl,
    )
}

/// Tsallis entropy of real order `alpha > 0`, `alpha ≠ 1`, to absolute error about `tol`.
pub fn tsallis_quadrature(f: &Family, alpha: f64, tol: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let integral = power_integral_quadrature(f, alpha, tol * (alpha - 1.0).abs())?;
    Ok((1.0 - integral) / (alpha - 1.0))
}

/// Dispatches on the order's mode.
pub fn tsallis(f: &Family, order: &EntropyOrder, tol: f64) -> Result<f64> {
    match order.mode {
        EntropyMode::IntegerExact => tsallis_integer(f, order.alpha as u32),
        EntropyMode::Quadrature => tsallis_quadrature(f, order.alpha, tol),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{make_family, FamilyParams};

    fn fam(theta: &[f64], beta: f64, d: f64) -> Family {
        make_family(FamilyParams::new(theta.to_vec(), beta, d).unwrap()).unwrap()
    }

    /// The tuple-sum form: every `(i₁, …, i_α)` in `{0..p}^α`.
    fn power_integral_by_enumeration(f: &Family, alpha: u32) -> f64 {
        let theta = f.theta();
        let p1 = theta.len();
        let a = alpha as f64;
        let d = f.d();
        let mut total = 0.0;
        for code in 0..p1.pow(alpha) {
            let mut rest = code;
            let mut weight = 1.0;
            let mut s = 0usize;
            for _ in 0..alpha {
                let i = rest % p1;
                rest /= p1;
                weight *= theta[i];
                s += i;
            }
            if weight == 0.0 {
                continue;
            }
            let shape = (s as f64 + 1.0) / d;
            total += weight * ln_gamma(shape).unwrap().exp() / (a * f.beta()).powf(shape);
        }
        f.c().powf(a) / d * total
    }

    #[test]
    fn integer_order_examples() {
        assert!((tsallis_integer(&fam(&[1.0], 1.0, 1.0), 2).unwrap() - 0.5).abs() < 1e-15);
        assert!(tsallis_integer(&fam(&[1.0], 2.0, 1.0), 2).unwrap().abs() < 1e-15);
        let lindley = fam(&[1.0, 1.0], 1.0, 1.0);
        assert!((power_integral_integer(&lindley, 2).unwrap() - 5.0 / 16.0).abs() < 1e-15);
        assert!((tsallis_integer(&lindley, 2).unwrap() - 0.6875).abs() < 1e-15);
    }

    #[test]
    fn order_cap_and_domain() {
        let f = fam(&[1.0], 1.0, 1.0);
        assert_eq!(tsallis_integer(&f, 9).unwrap_err(), Error::OrderCap { alpha: 9, cap: 8 });
        assert!(tsallis_integer_capped(&f, 9, 12).is_ok());
        assert!(tsallis_integer(&f, 1).is_err());
        assert!(tsallis_quadrature(&f, 1.0, 1e-8).is_err());
        assert!(tsallis_quadrature(&f, 0.0, 1e-8).is_err());
        assert!(tsallis_quadrature(&f, -2.0, 1e-8).is_err());
    }

    #[test]
    fn entropy_order_modes() {
        assert_eq!(EntropyOrder::new(3.0).unwrap().mode(), EntropyMode::IntegerExact);
        assert_eq!(EntropyOrder::new(2.5).unwrap().mode(), EntropyMode::Quadrature);
        assert_eq!(EntropyOrder::new(0.5).unwrap().mode(), EntropyMode::Quadrature);
        assert_eq!(EntropyOrder::new(20.0).unwrap().mode(), EntropyMode::Quadrature);
        assert!(EntropyOrder::new(1.0 + 1e-12).is_err());
        assert!(EntropyOrder::with_mode(2.5, EntropyMode::IntegerExact).is_err());
        assert!(EntropyOrder::with_mode(2.0, EntropyMode::Quadrature).is_ok());
    }

    #[test]
    fn quadrature_examples() {
        let exp1 = fam(&[1.0], 1.0, 1.0);
        assert!((tsallis_quadrature(&exp1, 2.0, 1e-10).unwrap() - 0.5).abs() < 1e-10);
        // ∫ f^α = β^{α-1} / α for Exp(β)
        assert!((tsallis_quadrature(&exp1, 0.5, 1e-10).unwrap() - 2.0).abs() < 1e-10);
        for (alpha, beta) in [(0.01, 1.0), (0.3, 2.5), (1.7, 0.4)] {
            let f = fam(&[1.0], beta, 1.0);
            let want = (1.0 - beta.powf(alpha - 1.0) / alpha) / (alpha - 1.0);
            let got = tsallis_quadrature(&f, alpha, 1e-9).unwrap();
            assert!(got.is_finite());
            assert!((got - want).abs() < 1e-9, "alpha = {alpha}: {got} vs {want}");
        }
    }

    #[test]
    fn convolution_equals_enumeration() {
        for (theta, beta, d) in [
            (vec![1.0, 1.0, 1.0], 1.0, 1.0),
            (vec![0.5, 0.0, 2.0], 0.7, 2.0),
            (vec![3.0, 1.5], 2.0, 0.5),
            (vec![0.0, 1.0, 0.25], 4.0, 1.5),
        ] {
            let f = fam(&theta, beta, d);
            for alpha in 2..=3 {
                let conv = power_integral_integer(&f, alpha).unwrap();
                let brute = power_integral_by_enumeration(&f, alpha);
                assert!(((conv - brute) / brute).abs() < 1e-14, "{theta:?} α={alpha}: {conv} vs {brute}");
            }
        }
    }

    #[test]
    fn quadrature_handles_zero_leading_coefficient_below_one() {
        // θ₀ = 0 puts a x^{α} kink at the origin when α < 1
        let f = fam(&[0.0, 1.0, 1.0], 1.0, 1.0);
        let a = tsallis_quadrature(&f, 0.35, 1e-9).unwrap();
        let b = tsallis_quadrature(&f, 0.35, 1e-11).unwrap();
        assert!((a - b).abs() < 2e-9);
    }

    #[test]
    fn shannon_limit_is_bracketed() {
        let ctl = QuadratureControl::default();
        for f in [fam(&[1.0, 1.0], 1.0, 1.0), fam(&[1.0, 0.0, 1.0], 1.0, 2.0), fam(&[2.0, 1.0], 3.0, 0.5)] {
            let upper = oracle::tail_cutoff(&f, 1e-12).unwrap();
            let shannon = oracle::expect_up_to(&f, |x| -f.ln_pdf(x).unwrap(), upper, &ctl).unwrap();
            let below = tsallis_quadrature(&f, 1.0 - 1e-4, 1e-9).unwrap();
            let above = tsallis_quadrature(&f, 1.0 + 1e-4, 1e-9).unwrap();
            let (lo, hi) = (below.min(above), below.max(above));
            assert!(lo - 1e-2 <= shannon && shannon <= hi + 1e-2, "{lo} {shannon} {hi}");
        }
    }

    #[test]
    fn self_convolution_is_binomial_for_one_plus_x() {
        assert_eq!(self_convolution(&[1.0, 1.0], 4), vec![1.0, 4.0, 6.0, 4.0, 1.0]);
        assert_eq!(self_convolution(&[2.0], 3), vec![8.0]);
    }
}
