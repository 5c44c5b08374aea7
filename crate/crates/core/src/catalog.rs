//! Named sub-models of the family, each with its published mixing proportions.

use crate::error::{Error, Result};
use crate::family::{make_family, Family, FamilyParams};

type BuildFn = fn(&[f64]) -> Result<FamilyParams>;
type MpFn = fn(&[f64]) -> Vec<f64>;

/// One named distribution: how to build it and its closed-form mixing
/// proportions over the nonzero coefficients, lowest index first.
#[derive(Clone, Copy)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub params: &'static [&'static str],
    pub reference: &'static str,
    /// True when some parameters must be positive integers.
    pub integer_params: &'static [bool],
    build: BuildFn,
    analytic_mp: MpFn,
}

impl std::fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CatalogEntry").field("name", &self.name).field("params", &self.params).finish()
    }
}

impl CatalogEntry {
    pub fn arity(&self) -> usize {
        self.params.len()
    }

    pub fn build(&self, params: &[f64]) -> Result<FamilyParams> {
        self.check_args(params)?;
        (self.build)(params)
    }

    pub fn analytic_mp(&self, params: &[f64]) -> Result<Vec<f64>> {
        self.check_args(params)?;
        Ok((self.analytic_mp)(params))
    }

    fn check_args(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.arity() {
            return Err(Error::Arity { name: self.name.into(), expected: self.arity(), got: params.len() });
        }
        for ((&v, &name), &integer) in params.iter().zip(self.params).zip(self.integer_params) {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("{}: {name} must be positive and finite, got {v}", self.name)));
            }
            if integer && v.fract() != 0.0 {
                return Err(Error::Domain(format!(
                    "{}: {name} must be an integer, got {v}; use a raw coefficient vector for non-integer shapes",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

fn unit_at(index: f64) -> Vec<f64> {
    let k = index as usize - 1;
    let mut theta = vec![0.0; k + 1];
    theta[k] = 1.0;
    theta
}

fn params(theta: Vec<f64>, beta: f64) -> Result<FamilyParams> {
    FamilyParams::new(theta, beta, 1.0)
}

/// Normalizes a list of unnormalized weights sharing a common denominator.
fn shares(parts: &[f64]) -> Vec<f64> {
    let total: f64 = parts.iter().sum();
    parts.iter().map(|p| p / total).collect()
}

const NO_INT: [bool; 3] = [false; 3];

macro_rules! entry {
    ($name:literal, [$($p:literal),*], $ints:expr, $reference:literal, $build:expr, $mp:expr) => {
        CatalogEntry {
            name: $name,
            params: &[$($p),*],
            reference: $reference,
            integer_params: $ints,
            build: $build,
            analytic_mp: $mp,
        }
    };
}

static CATALOG: [CatalogEntry; 24] = [
    entry!("exponential", ["beta"], &NO_INT, "Exp(beta)",
        |p| params(vec![1.0], p[0]),
        |_| vec![1.0]),
    entry!("gamma", ["alpha", "beta"], &[true, false], "Ga(alpha, beta), integer alpha",
        |p| params(unit_at(p[0]), p[1]),
        |_| vec![1.0]),
    entry!("weibull", ["d", "beta"], &[true, false], "Weibull (1951), Frechet (1927)",
        |p| FamilyParams::new(unit_at(p[0]), p[1], p[0]),
        |_| vec![1.0]),
    entry!("generalized_gamma", ["d", "beta", "b"], &[false, false, true], "Stacy (1962)",
        |p| FamilyParams::new(unit_at(p[2]), p[1], p[0]),
        |_| vec![1.0]),
    entry!("lindley", ["beta"], &NO_INT, "Lindley (1958)",
        |p| params(vec![1.0, 1.0], p[0]),
        |p| { let b = p[0]; vec![b / (b + 1.0), 1.0 / (b + 1.0)] }),
    entry!("aradhana", ["beta"], &NO_INT, "Shanker (2016), Aradhana",
        |p| params(vec![1.0, 2.0, 1.0], p[0]),
        |p| { let b = p[0]; shares(&[b * b, 2.0 * b, 2.0]) }),
    entry!("ishita", ["beta"], &NO_INT, "Shanker and Shukla (2017), Ishita",
        |p| params(vec![p[0], 0.0, 1.0], p[0]),
        |p| { let b3 = p[0].powi(3); vec![b3 / (b3 + 2.0), 2.0 / (b3 + 2.0)] }),
    entry!("akash", ["beta"], &NO_INT, "Shanker (2015), Akash",
        |p| params(vec![1.0, 0.0, 1.0], p[0]),
        |p| { let b2 = p[0] * p[0]; vec![b2 / (b2 + 2.0), 2.0 / (b2 + 2.0)] }),
    entry!("amarendra", ["beta"], &NO_INT, "Shanker (2016), Amarendra",
        |p| params(vec![1.0; 4], p[0]),
        |p| { let b = p[0]; shares(&[b.powi(3), b * b, 2.0 * b, 6.0]) }),
    entry!("sujatha", ["beta"], &NO_INT, "Shanker (2016), Sujatha",
        |p| params(vec![1.0; 3], p[0]),
        |p| { let b = p[0]; shares(&[b * b, b, 2.0]) }),
    entry!("shanker", ["beta"], &NO_INT, "Shanker (2015), Shanker",
        |p| params(vec![p[0], 1.0], p[0]),
        |p| { let b2 = p[0] * p[0]; vec![b2 / (b2 + 1.0), 1.0 / (b2 + 1.0)] }),
    entry!("akshaya", ["beta"], &NO_INT, "Shanker (2017), Akshaya",
        |p| params(vec![1.0, 3.0, 3.0, 1.0], p[0]),
        |p| { let b = p[0]; shares(&[b.powi(3), 3.0 * b * b, 6.0 * b, 6.0]) }),
    entry!("suja", ["beta"], &NO_INT, "Shanker (2017), Suja",
        |p| params(vec![1.0, 0.0, 0.0, 0.0, 1.0], p[0]),
        |p| { let b4 = p[0].powi(4); vec![b4 / (b4 + 24.0), 24.0 / (b4 + 24.0)] }),
    entry!("devya", ["beta"], &NO_INT, "Shanker (2016), Devya",
        |p| params(vec![1.0; 5], p[0]),
        |p| { let b = p[0]; shares(&[b.powi(4), b.powi(3), 2.0 * b * b, 6.0 * b, 24.0]) }),
    entry!("quasi_lindley", ["alpha", "beta"], &NO_INT, "Shanker and Mishra (2013), quasi Lindley",
        |p| params(vec![p[0], p[1]], p[1]),
        |p| { let a = p[0]; vec![a / (a + 1.0), 1.0 / (a + 1.0)] }),
    entry!("gen_sujatha", ["alpha", "beta"], &NO_INT, "Shanker (2017), generalized Sujatha",
        |p| params(vec![1.0, 1.0, p[0]], p[1]),
        |p| { let (a, b) = (p[0], p[1]); shares(&[b * b, b, 2.0 * a]) }),
    entry!("rani", ["beta"], &NO_INT, "Shanker (2017), Rani",
        |p| params(vec![p[0], 0.0, 0.0, 0.0, 1.0], p[0]),
        |p| { let b5 = p[0].powi(5); vec![b5 / (b5 + 24.0), 24.0 / (b5 + 24.0)] }),
    entry!("garima", ["beta"], &NO_INT, "Shanker (2016), Garima",
        |p| params(vec![p[0] + 1.0, p[0]], p[0]),
        |p| { let b = p[0]; vec![(b + 1.0) / (b + 2.0), 1.0 / (b + 2.0)] }),
    entry!("janardan", ["alpha", "mu"], &NO_INT, "Shanker (2013), Janardan",
        |p| params(vec![1.0, p[0]], p[1] / p[0]),
        |p| { let (a2, m) = (p[0] * p[0], p[1]); vec![m / (m + a2), a2 / (m + a2)] }),
    entry!("om", ["beta"], &NO_INT, "Shanker and Shukla (2018), Om",
        |p| params(vec![1.0, 4.0, 6.0, 4.0, 1.0], p[0]),
        |p| { let b = p[0]; shares(&[b.powi(4), 4.0 * b.powi(3), 12.0 * b * b, 24.0 * b, 24.0]) }),
    entry!("sushila", ["alpha", "mu"], &NO_INT, "Shanker et al. (2013), Sushila",
        |p| params(vec![1.0, 1.0 / p[0]], p[1] / p[0]),
        |p| { let m = p[1]; vec![m / (m + 1.0), 1.0 / (m + 1.0)] }),
    entry!("gen_aradhana", ["alpha", "beta"], &NO_INT, "Welday and Shanker (2018), generalized Aradhana",
        |p| params(vec![1.0, 2.0 * p[0], p[0] * p[0]], p[1]),
        |p| { let (a, b) = (p[0], p[1]); shares(&[b * b, 2.0 * a * b, 2.0 * a * a]) }),
    entry!("gen_lindley3", ["alpha", "lambda", "beta"], &NO_INT, "Shanker et al. (2017), three-parameter generalized Lindley",
        |p| params(vec![p[0], p[1]], p[2]),
        |p| { let (ab, l) = (p[0] * p[2], p[1]); vec![ab / (ab + l), l / (ab + l)] }),
    entry!("xgamma", ["beta"], &NO_INT, "Sen et al. (2016), xgamma",
        |p| params(vec![1.0, 0.0, 0.5 * p[0]], p[0]),
        |p| { let b = p[0]; vec![b / (b + 1.0), 1.0 / (b + 1.0)] }),
];

/// Every catalog entry, in table order.
pub fn entries() -> &'static [CatalogEntry] {
    &CATALOG
}

pub fn lookup(name: &str) -> Result<&'static CatalogEntry> {
    CATALOG.iter().find(|e| e.name == name).ok_or_else(|| Error::UnknownName(name.into()))
}

/// `(name, arity, reference)` for each entry.
pub fn list_catalog() -> Vec<(&'static str, usize, &'static str)> {
    CATALOG.iter().map(|e| (e.name, e.arity(), e.reference)).collect()
}

pub fn build_named(name: &str, params: &[f64]) -> Result<Family> {
    make_family(lookup(name)?.build(params)?)
}

fn binomial(n: u64, k: u64) -> Option<u64> {
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        // exact at every step: acc·(n-i) is divisible by (i+1)
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Coefficients of `(a + bx)^p`, `θ_s = C(p, s) a^{p-s} b^s`, with rate `beta` and `d = 1`.
pub fn build_binomial(a: f64, b: f64, p: u32, beta: f64) -> Result<Family> {
    if !(a > 0.0 && a.is_finite()) || !(b >= 0.0 && b.is_finite()) {
        return Err(Error::Domain(format!("need a > 0 and b >= 0, got a = {a}, b = {b}")));
    }
    let theta = (0..=p as u64)
        .map(|s| {
            let c = binomial(p as u64, s)
                .ok_or_else(|| Error::Overflow(format!("binomial coefficient C({p}, {s})")))?;
            let v = c as f64 * a.powi((p as u64 - s) as i32) * b.powi(s as i32);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Overflow(format!("coefficient {s} of (a + bx)^{p}")))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    make_family(FamilyParams::new(theta, beta, 1.0)?)
}

/// Closed-form mixing proportions of `(a + bx)^p e^{-βx}`:
/// `MP_m ∝ p!/(p-m)! · (b/(aβ))^m`.
pub fn binomial_mp(a: f64, b: f64, p: u32, beta: f64) -> Vec<f64> {
    let ratio = b / (a * beta);
    let mut parts = Vec::with_capacity(p as usize + 1);
    let mut falling = 1.0;
    for m in 0..=p {
        if m > 0 {
            falling *= (p - m + 1) as f64;
        }
        parts.push(falling * ratio.powi(m as i32));
    }
    shares(&parts)
}

/// Two-component generalized-gamma mixture with `θ = (1, 0, 1)`, `d = 2`.
pub fn build_example1(beta: f64) -> Result<Family> {
    make_family(FamilyParams::new(vec![1.0, 0.0, 1.0], beta, 2.0)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nonzero_mp(f: &Family) -> Vec<f64> {
        f.mixture_view().weights
    }

    fn grid(entry: &CatalogEntry) -> Vec<Vec<f64>> {
        let mut out = vec![vec![]];
        for &integer in &entry.integer_params[..entry.arity()] {
            let values: &[f64] = if integer { &[1.0, 2.0, 5.0] } else { &[0.5, 1.0, 2.0, 5.0] };
            out = out
                .iter()
                .flat_map(|prefix| {
                    values.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn catalog_has_all_rows() {
        let list = list_catalog();
        assert_eq!(list.len(), 24);
        assert!(list.contains(&("lindley", 1, "Lindley (1958)")));
        assert!(list.iter().any(|&(n, a, _)| n == "gen_lindley3" && a == 3));
        let mut names: Vec<_> = list.iter().map(|e| e.0).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 24);
    }

    #[test]
    fn mixing_proportions_match_closed_forms() {
        for entry in entries() {
            for p in grid(entry) {
                let f = build_named(entry.name, &p).unwrap();
                let want = entry.analytic_mp(&p).unwrap();
                assert!((want.iter().sum::<f64>() - 1.0).abs() < 1e-14);
                let got = nonzero_mp(&f);
                assert_eq!(got.len(), want.len(), "{} {p:?}", entry.name);
                for (g, w) in got.iter().zip(&want) {
                    assert!((g - w).abs() < 1e-12, "{} {p:?}: {got:?} vs {want:?}", entry.name);
                }
            }
        }
    }

    #[test]
    fn named_examples() {
        let l = build_named("lindley", &[2.0]).unwrap();
        assert_eq!(l.theta(), &[1.0, 1.0]);
        assert!((l.mixing_proportions()[0] - 2.0 / 3.0).abs() < 1e-15);
        let s = build_named("sujatha", &[1.0]).unwrap();
        for (g, w) in nonzero_mp(&s).iter().zip([0.25, 0.25, 0.5]) {
            assert!((g - w).abs() < 1e-15);
        }
        let x = build_named("xgamma", &[1.0]).unwrap();
        assert_eq!(x.theta(), &[1.0, 0.0, 0.5]);
        assert!((nonzero_mp(&x)[0] - 0.5).abs() < 1e-15);
        assert_eq!(build_named("rani", &[1.0]).unwrap().degree(), 4);
    }

    #[test]
    fn argument_errors() {
        assert_eq!(build_named("nope", &[1.0]).unwrap_err(), Error::UnknownName("nope".into()));
        assert!(matches!(build_named("lindley", &[2.0, 3.0]), Err(Error::Arity { expected: 1, got: 2, .. })));
        assert!(matches!(build_named("lindley", &[-1.0]), Err(Error::Domain(_))));
        assert!(matches!(build_named("gamma", &[2.5, 1.0]), Err(Error::Domain(_))));
        assert!(build_named("gamma", &[3.0, 1.0]).is_ok());
    }

    fn same_pdf(a: &Family, b: &Family) {
        for k in 0..50 {
            let x = k as f64 * 0.2;
            let (pa, pb) = (a.pdf(x).unwrap(), b.pdf(x).unwrap());
            assert!((pa - pb).abs() <= 1e-12 * pa.max(1e-300), "x = {x}: {pa} vs {pb}");
        }
    }

    #[test]
    fn reductions_to_simpler_rows() {
        for beta in [0.5, 1.0, 2.0, 5.0] {
            let lindley = build_named("lindley", &[beta]).unwrap();
            same_pdf(&build_named("janardan", &[1.0, beta]).unwrap(), &lindley);
            same_pdf(&build_named("sushila", &[1.0, beta]).unwrap(), &lindley);
            same_pdf(&build_named("quasi_lindley", &[beta, beta]).unwrap(), &lindley);
            same_pdf(
                &build_named("gen_aradhana", &[1.0, beta]).unwrap(),
                &build_named("aradhana", &[beta]).unwrap(),
            );
        }
    }

    #[test]
    fn weibull_matches_textbook_density() {
        for d in [1.0, 2.0, 3.0] {
            for beta in [0.5, 2.0] {
                let w = build_named("weibull", &[d, beta]).unwrap();
                for k in 1..40 {
                    let x = k as f64 * 0.1;
                    let want = d * beta * x.powf(d - 1.0) * (-beta * x.powf(d)).exp();
                    assert!((w.pdf(x).unwrap() - want).abs() <= 1e-12 * want.max(1e-300));
                }
            }
        }
    }

    #[test]
    fn binomial_builder() {
        let b = build_binomial(1.0, 1.0, 2, 1.7).unwrap();
        assert_eq!(b.theta(), build_named("aradhana", &[1.7]).unwrap().theta());
        let single = build_binomial(3.0, 2.0, 0, 1.0).unwrap();
        assert_eq!(single.theta(), &[1.0]);
        let two = build_binomial(2.0, 1.0, 1, 1.0).unwrap();
        assert_eq!(two.theta(), &[2.0, 1.0]);
        assert!((two.mixing_proportions()[0] - 2.0 / 3.0).abs() < 1e-15);
        for (a, bb, p, beta) in [(1.0, 2.0, 5, 0.7), (0.5, 0.3, 8, 2.0), (2.0, 1.0, 3, 1.0)] {
            let f = build_binomial(a, bb, p, beta).unwrap();
            for (g, w) in f.mixing_proportions().iter().zip(binomial_mp(a, bb, p, beta)) {
                assert!((g - w).abs() < 1e-12);
            }
        }
        assert!(matches!(build_binomial(1.0, 1.0, 80, 1.0), Err(Error::Overflow(_))));
        assert!(build_binomial(0.0, 1.0, 2, 1.0).is_err());
    }

    #[test]
    fn example1_builder() {
        let f = build_example1(1.0).unwrap();
        assert!((f.mixing_proportions()[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((f.c() - 4.0 / (3.0 * std::f64::consts::PI.sqrt())).abs() < 1e-14);
        assert!((build_example1(0.5).unwrap().mixing_proportions()[0] - 0.5).abs() < 1e-15);
    }
}
