//! Stress-strength reliability `R = P(Y < X)` for independent strength `X`
//! and stress `Y`, both members of the family.
//!
//! Series form: expanding `γ(a*, β*x^{d*})` in powers of `x` and integrating
//! term by term gives
//!
//! ```text
//! R = 1/(D_X D_Y) Σᵢ Σⱼ θᵢ θ*ⱼ Σ_k (-1)^k β*^k Γ(b_k/d) / (k! (a*ⱼ + k) β^{b_k/d})
//! ```
//!
//! with `a*ⱼ = (j+1)/d*`, `b_k = i + j + 2 + k d*` and `D` the normalizing sums.
//! The inner series converges only when `d* < d`, or `d* = d` and `β* < β`.
//!
//! For `d* = d` the inner sum is `Γ(c)/a · ₂F₁(c, a; a+1; -ρ)` with
//! `c = (i+j+2)/d`, `a = a*ⱼ`, `ρ = β*/β`. The Pfaff transformation rewrites it as
//! `Γ(c) (1+ρ)^{-a} Σ_k (a+1-c)_k w^k / (k! (a+k))` with `w = ρ/(1+ρ) < 1`,
//! which converges for every `ρ`. For `d* > d` the terms grow factorially and
//! the Levin u-transform is tried; its answer is accepted only if it settles.

use crate::error::{Error, Result};
use crate::family::Family;
use crate::numeric::CompensatedSum;
use crate::oracle::{self, QuadratureControl};
use crate::specfun::{ln_gamma, SeriesControl};

/// Highest Levin order tried; beyond this the binomial weights cost more
/// digits than the transform gains.
const LEVIN_MAX_ORDER: usize = 60;
/// Consecutive Levin estimates that must agree before one is accepted.
const LEVIN_STABLE_RUN: usize = 3;
/// Series/quadrature gap above which callers should warn.
pub const DISCREPANCY_WARN: f64 = 1e-6;

/// How the series estimate was summed. When inner series needed different
/// treatments the last resort used is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SeriesSummation {
    Direct,
    /// Pfaff-transformed hypergeometric form (equal powers only).
    Pfaff,
    /// Levin u-transform of the divergent series.
    Levin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StressStrengthResult {
    pub r_quadrature: f64,
    /// `None` when the series could not be summed.
    pub r_series: Option<f64>,
    pub summation: Option<SeriesSummation>,
    /// Inner-series terms summed across all `(i, j)` pairs.
    pub terms_used: usize,
    pub discrepancy: Option<f64>,
    /// Why the series failed, if it did.
    pub series_error: Option<Error>,
}

/// `∫₀^∞ f_X(x) F_Y(x) dx` by adaptive quadrature, absolute error about `tol`.
pub fn reliability_quadrature(strength: &Family, stress: &Family, tol: f64) -> Result<f64> {
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(Error::Domain(format!("tolerance must lie in (0, 1e-3], got {tol}")));
    }
    let upper = oracle::tail_cutoff(strength, 0.1 * tol)?.max(oracle::tail_cutoff(stress, 0.1 * tol)?);
    let kink = oracle::kink_exponent(strength, 1.0).min(oracle::kink_exponent(stress, 1.0));
    let ctl = QuadratureControl { abs_tol: 0.5 * tol, ..QuadratureControl::default() };
    let r = oracle::integrate_from_zero(
        |x| strength.pdf(x).unwrap_or(0.0) * stress.cdf(x).unwrap_or(1.0),
        upper,
        kink,
        &ctl,
    )?;
    Ok(r.clamp(0.0, 1.0))
}

/// One inner series, pre-multiplied by its share of the outer prefactor, so
/// that its sum is the `(i, j)` contribution to `R`.
struct InnerSeries {
    ln_scale: f64,
    /// `ln(β* / β^{d*/d})`.
    ln_ratio: f64,
    shape_x: f64,
    step_x: f64,
    a_star: f64,
}

impl InnerSeries {
    fn term(&self, k: usize) -> Result<f64> {
        let kf = k as f64;
        let ln_mag = self.ln_scale + kf * self.ln_ratio + ln_gamma(self.shape_x + kf * self.step_x)?
            - ln_gamma(kf + 1.0)?
            - (self.a_star + kf).ln();
        let mag = ln_mag.exp();
        Ok(if k % 2 == 0 { mag } else { -mag })
    }
}

fn inner_series(strength: &Family, stress: &Family) -> Vec<InnerSeries> {
    let (d, beta) = (strength.d(), strength.beta());
    let (ds, bs) = (stress.d(), stress.beta());
    let ln_norm = -strength.log_denominator() - stress.log_denominator();
    let mut out = Vec::new();
    for i in strength.active_terms() {
        for j in stress.active_terms() {
            let shape_x = (i + j + 2) as f64 / d;
            out.push(InnerSeries {
                ln_scale: ln_norm + strength.theta()[i].ln() + stress.theta()[j].ln() - shape_x * beta.ln(),
                ln_ratio: bs.ln() - (ds / d) * beta.ln(),
                shape_x,
                step_x: ds / d,
                a_star: (j + 1) as f64 / ds,
            });
        }
    }
    out
}

/// Plain partial sums; stops once a term falls below `tol` while shrinking.
fn sum_direct(series: &InnerSeries, tol: f64, max_terms: usize) -> Result<(f64, usize)> {
    let mut sum = CompensatedSum::default();
    let mut max_term = 0.0_f64;
    let mut prev = f64::INFINITY;
    for k in 0..max_terms {
        let t = series.term(k)?;
        let mag = t.abs();
        if !mag.is_finite() || mag * f64::EPSILON * 8.0 > tol {
            return Err(Error::LossOfSignificance { terms: k + 1, max_term: mag, sum: sum.value() });
        }
        max_term = max_term.max(mag);
        sum.add(t);
        if mag < prev && mag < 0.1 * tol {
            if max_term * f64::EPSILON * 8.0 > tol {
                return Err(Error::LossOfSignificance { terms: k + 1, max_term, sum: sum.value() });
            }
            return Ok((sum.value(), k + 1));
        }
        prev = mag;
    }
    Err(Error::NonConvergence { terms: max_terms, detail: "stress-strength inner series".into() })
}

/// Pfaff form of an equal-power inner series.
fn sum_pfaff(series: &InnerSeries, tol: f64, max_terms: usize) -> Result<(f64, usize)> {
    let rho = series.ln_ratio.exp();
    let (a, c) = (series.a_star, series.shape_x);
    let w = rho / (1.0 + rho);
    let b = a + 1.0 - c;
    let pre = (series.ln_scale + ln_gamma(c)? - a * rho.ln_1p()).exp();
    let mut sum = CompensatedSum::default();
    let mut u = 1.0;
    let mut max_term = 0.0_f64;
    for k in 0..max_terms {
        let kf = k as f64;
        let term = pre * u / (a + kf);
        max_term = max_term.max(term.abs());
        sum.add(term);
        // once b + k ≥ 0 the signs are fixed and the term ratio stays below rr
        let rr = w * ((b + kf) / (kf + 1.0)).max(1.0);
        if b + kf >= 0.0 && rr < 1.0 && term.abs() * rr / (1.0 - rr) < 0.1 * tol {
            if max_term * f64::EPSILON * 8.0 > tol {
                return Err(Error::LossOfSignificance { terms: k + 1, max_term, sum: sum.value() });
            }
            return Ok((sum.value(), k + 1));
        }
        u *= (b + kf) / (kf + 1.0) * w;
        if u == 0.0 {
            return Ok((sum.value(), k + 1));
        }
    }
    Err(Error::NonConvergence { terms: max_terms, detail: "Pfaff-transformed stress-strength series".into() })
}

/// Levin u-transform of the partial sums `s_0..s_k` with remainder estimates
/// `ω_n = (n + 1) a_n`. Returns the estimate and a roundoff bound.
fn levin_u(partial: &[f64], terms: &[f64]) -> Option<(f64, f64)> {
    let k = partial.len() - 1;
    let kf = k as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    let mut num_abs = 0.0;
    let mut binom = 1.0;
    for j in 0..=k {
        if j > 0 {
            binom *= (k - j + 1) as f64 / j as f64;
        }
        let omega = (j as f64 + 1.0) * terms[j];
        if omega == 0.0 || !omega.is_finite() {
            return None;
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let w = sign * binom * ((j as f64 + 1.0) / (kf + 1.0)).powf(kf - 1.0) / omega;
        num += w * partial[j];
        num_abs += (w * partial[j]).abs();
        den += w;
    }
    let value = num / den;
    value.is_finite().then(|| (value, 4.0 * f64::EPSILON * num_abs / den.abs()))
}

/// Levin-accelerated sum, accepted after `LEVIN_STABLE_RUN` consecutive
/// orders agree to `tol` and roundoff stays below `tol`.
fn sum_levin(series: &InnerSeries, tol: f64, max_terms: usize) -> Result<(f64, usize)> {
    let order_cap = LEVIN_MAX_ORDER.min(max_terms);
    let mut terms = Vec::with_capacity(order_cap + 1);
    let mut partial = Vec::with_capacity(order_cap + 1);
    let mut running = CompensatedSum::default();
    let mut last: Option<f64> = None;
    let mut run = 0;
    for k in 0..=order_cap {
        let t = series.term(k)?;
        if !t.is_finite() {
            break;
        }
        running.add(t);
        terms.push(t);
        partial.push(running.value());
        if t == 0.0 {
            // the series terminated: the partial sum is exact
            return Ok((running.value(), k + 1));
        }
        let Some((est, roundoff)) = levin_u(&partial, &terms) else { break };
        match last {
            Some(prev) if (est - prev).abs() <= tol && roundoff <= tol => {
                run += 1;
                if run >= LEVIN_STABLE_RUN {
                    return Ok((est, k + 1));
                }
            }
            _ => run = 0,
        }
        last = Some(est);
    }
    Err(Error::NonConvergence {
        terms: terms.len(),
        detail: "stress-strength inner series did not settle under Levin summation".into(),
    })
}

/// `R` from the series. Each inner series is summed directly when it
/// converges cleanly, otherwise in Pfaff form or through the Levin transform. Returns the
/// value, the total number of inner terms and the summation used.
pub fn reliability_series_detailed(
    strength: &Family,
    stress: &Family,
    ctl: &SeriesControl,
) -> Result<(f64, usize, SeriesSummation)> {
    let pieces = inner_series(strength, stress);
    let tol = ctl.tol / pieces.len() as f64;
    let mut total = CompensatedSum::default();
    let mut used = 0;
    let mut summation = SeriesSummation::Direct;
    let equal_powers = strength.d() == stress.d();
    for series in &pieces {
        // with equal powers the raw series is known to diverge once ρ ≥ 1
        let direct = if equal_powers && series.ln_ratio >= 0.0 {
            Err(Error::NonConvergence { terms: 0, detail: "ratio at least one".into() })
        } else {
            sum_direct(series, tol, ctl.max_terms)
        };
        let (value, n) = match direct {
            Ok(v) => v,
            Err(e) if e.is_numerical() => {
                let how = if equal_powers { SeriesSummation::Pfaff } else { SeriesSummation::Levin };
                summation = summation.max(how);
                match how {
                    SeriesSummation::Pfaff => sum_pfaff(series, tol, ctl.max_terms)?,
                    _ => sum_levin(series, tol, ctl.max_terms)?,
                }
            }
            Err(e) => return Err(e),
        };
        total.add(value);
        used += n;
    }
    Ok((total.value(), used, summation))
}

/// `R` from the series, with the number of inner terms summed.
pub fn reliability_series(strength: &Family, stress: &Family, ctl: &SeriesControl) -> Result<(f64, usize)> {
    reliability_series_detailed(strength, stress, ctl).map(|(r, n, _)| (r, n))
}

/// Both estimates. Quadrature failures are errors; a series failure is
/// reported in the result instead.
pub fn reliability(
    strength: &Family,
    stress: &Family,
    ctl: &SeriesControl,
    quad_tol: f64,
) -> Result<StressStrengthResult> {
    let r_quadrature = reliability_quadrature(strength, stress, quad_tol)?;
    Ok(match reliability_series_detailed(strength, stress, ctl) {
        Ok((r, terms_used, summation)) => StressStrengthResult {
            r_quadrature,
            r_series: Some(r),
            summation: Some(summation),
            terms_used,
            discrepancy: Some((r - r_quadrature).abs()),
            series_error: None,
        },
        Err(e) => StressStrengthResult {
            r_quadrature,
            r_series: None,
            summation: None,
            terms_used: 0,
            discrepancy: None,
            series_error: Some(e),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build_named;
    use crate::family::{make_family, FamilyParams};
    use proptest::prelude::*;

    fn fam(theta: &[f64], beta: f64, d: f64) -> Family {
        make_family(FamilyParams::new(theta.to_vec(), beta, d).unwrap()).unwrap()
    }

    fn exp(beta: f64) -> Family {
        fam(&[1.0], beta, 1.0)
    }

    fn ctl() -> SeriesControl {
        SeriesControl::new(1e-12, 10_000).unwrap()
    }

    /// Term-by-term transcription with prefactor `c τ / d`, `τ = 1/D_Y`, in
    /// plain floating point. Only usable where the series converges fast.
    fn transcription(x: &Family, y: &Family, kmax: usize) -> f64 {
        let (d, beta) = (x.d(), x.beta());
        let (ds, bs) = (y.d(), y.beta());
        let tau = (-y.log_denominator()).exp();
        let mut total = 0.0;
        for (i, &ti) in x.theta().iter().enumerate() {
            for (j, &tj) in y.theta().iter().enumerate() {
                let a = (j + 1) as f64 / ds;
                let mut inner = 0.0;
                for k in 0..kmax {
                    let b = i as f64 + j as f64 + k as f64 * ds + 2.0;
                    let g = crate::specfun::gamma(b / d).unwrap();
                    let fact = crate::specfun::gamma(k as f64 + 1.0).unwrap();
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    inner += sign * bs.powf(a + k as f64) * g / (fact * (a + k as f64) * beta.powf(b / d));
                }
                total += ti * tj * bs.powf(-a) * inner;
            }
        }
        x.c() * tau / d * total
    }

    #[test]
    fn exponential_pairs() {
        for (bx, by) in [(1.0, 2.0), (2.0, 1.0), (1.0, 1.0), (3.0, 0.5), (0.5, 4.0)] {
            let want = by / (bx + by);
            let q = reliability_quadrature(&exp(bx), &exp(by), 1e-10).unwrap();
            let (s, _) = reliability_series(&exp(bx), &exp(by), &ctl()).unwrap();
            assert!((q - want).abs() < 1e-8, "quadrature {bx} {by}: {q}");
            assert!((s - want).abs() < 1e-8, "series {bx} {by}: {s}");
        }
    }

    #[test]
    fn convergent_case_sums_directly() {
        let (r, _, how) = reliability_series_detailed(&exp(2.0), &exp(1.0), &ctl()).unwrap();
        assert_eq!(how, SeriesSummation::Direct);
        assert!((r - 1.0 / 3.0).abs() < 1e-11);
        let (_, _, how) = reliability_series_detailed(&exp(1.0), &exp(2.0), &ctl()).unwrap();
        assert_eq!(how, SeriesSummation::Pfaff);
    }

    #[test]
    fn identical_families_give_one_half() {
        for f in [
            build_named("lindley", &[1.0]).unwrap(),
            build_named("akash", &[2.0]).unwrap(),
            fam(&[1.0, 0.0, 1.0], 1.0, 2.0),
        ] {
            assert!((reliability_quadrature(&f, &f, 1e-10).unwrap() - 0.5).abs() < 1e-8);
            let (s, _) = reliability_series(&f, &f, &ctl()).unwrap();
            assert!((s - 0.5).abs() < 1e-8, "{s}");
        }
    }

    #[test]
    fn akash_against_lindley() {
        let x = build_named("akash", &[1.0]).unwrap();
        let y = build_named("lindley", &[2.0]).unwrap();
        let q = reliability_quadrature(&x, &y, 1e-10).unwrap();
        let (s, _) = reliability_series(&x, &y, &ctl()).unwrap();
        assert!((q - s).abs() < 1e-6, "{q} vs {s}");
    }

    #[test]
    fn series_matches_printed_transcription() {
        for (x, y) in [
            (build_named("lindley", &[3.0]).unwrap(), build_named("akash", &[1.0]).unwrap()),
            (fam(&[1.0, 2.0], 2.0, 2.0), fam(&[0.5, 1.0], 0.4, 1.0)),
            (fam(&[1.0, 0.0, 1.0], 4.0, 1.0), fam(&[2.0, 1.0], 1.0, 1.0)),
        ] {
            let (s, _) = reliability_series(&x, &y, &ctl()).unwrap();
            let t = transcription(&x, &y, 120);
            assert!((s - t).abs() < 1e-11, "{s} vs {t}");
        }
    }

    #[test]
    fn lindley_against_exponential_by_monte_carlo() {
        let x = build_named("lindley", &[1.0]).unwrap();
        let q = reliability_quadrature(&x, &exp(1.0), 1e-10).unwrap();
        let mc = oracle::monte_carlo_reliability(&x, &exp(1.0), 1_000_000, 11).unwrap();
        assert!(mc.agrees_with(q, 4.0), "{q} vs {mc:?}");
    }

    #[test]
    fn combined_result_reports_discrepancy() {
        let r = reliability(&exp(1.0), &exp(2.0), &ctl(), 1e-10).unwrap();
        assert!(r.discrepancy.unwrap() < 1e-8);
        assert!(r.terms_used > 0);
        // d* > d: terms grow factorially
        let hard = reliability(&fam(&[1.0], 0.2, 1.0), &fam(&[1.0], 5.0, 3.0), &ctl(), 1e-10).unwrap();
        assert!((0.0..=1.0).contains(&hard.r_quadrature));
        if let Some(s) = hard.r_series {
            assert!((s - hard.r_quadrature).abs() < 1e-6);
        } else {
            assert!(hard.series_error.unwrap().is_numerical());
        }
    }

    #[test]
    fn strength_rate_monotonicity() {
        let y = build_named("lindley", &[1.0]).unwrap();
        let mut prev = f64::INFINITY;
        for k in 1..=12 {
            let r = reliability_quadrature(&exp(0.25 * k as f64), &y, 1e-10).unwrap();
            assert!(r < prev);
            prev = r;
        }
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(reliability_quadrature(&exp(1.0), &exp(1.0), 0.0).is_err());
        assert!(reliability_quadrature(&exp(1.0), &exp(1.0), 0.1).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn complementarity(
            tx in prop::collection::vec(0.0f64..3.0, 1..4),
            ty in prop::collection::vec(0.0f64..3.0, 1..4),
            bx in 0.3f64..4.0, by in 0.3f64..4.0,
            dx in prop::sample::select(vec![0.5, 1.0, 2.0]),
            dy in prop::sample::select(vec![0.5, 1.0, 2.0]),
        ) {
            let mut tx = tx; tx[0] += 0.1;
            let mut ty = ty; ty[0] += 0.1;
            let x = fam(&tx, bx, dx);
            let y = fam(&ty, by, dy);
            let a = reliability_quadrature(&x, &y, 1e-10).unwrap();
            let b = reliability_quadrature(&y, &x, 1e-10).unwrap();
            prop_assert!((a + b - 1.0).abs() < 2e-8, "{} + {}", a, b);
        }
    }
}
