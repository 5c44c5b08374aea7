use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Gamma;

use super::Family;
use crate::error::{Error, Result};
use crate::specfun::ln_gamma;

/// Generalized gamma component `GGa(d, β, i+1)`: density `∝ x^i e^{-βx^d}`,
/// so that `βX^d ~ Gamma(shape)` with `shape = (i+1)/d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component {
    /// Index `i` of the coefficient this component came from.
    pub index: usize,
    pub shape: f64,
    pub rate: f64,
    pub power: f64,
}

impl Component {
    pub fn ln_pdf(&self, x: f64) -> f64 {
        let ln_norm =
            self.power.ln() + self.shape * self.rate.ln() - ln_gamma(self.shape).unwrap_or(f64::NAN);
        if x == 0.0 {
            return if self.index == 0 { ln_norm } else { f64::NEG_INFINITY };
        }
        ln_norm + self.index as f64 * x.ln() - self.rate * x.powf(self.power)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    /// Short label in the catalog's notation: `Exp(β)`, `Ga(k,β)` or `GGa(d,β,b)`.
    pub fn describe(&self) -> String {
        if self.power == 1.0 {
            if self.index == 0 {
                format!("Exp({})", self.rate)
            } else {
                format!("Ga({},{})", self.index + 1, self.rate)
            }
        } else {
            format!("GGa({},{},{})", self.power, self.rate, self.index + 1)
        }
    }
}

/// The family written as an explicit finite mixture over its nonzero terms.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureView {
    pub components: Vec<Component>,
    pub weights: Vec<f64>,
}

impl MixtureView {
    /// `Σ wᵢ · componentᵢ(x)`.
    pub fn density(&self, x: f64) -> f64 {
        self.components.iter().zip(&self.weights).map(|(c, w)| w * c.pdf(x)).sum()
    }
}

impl Family {
    pub fn mixture_view(&self) -> MixtureView {
        let mp = self.mixing_proportions();
        let (components, weights) = self
            .active_terms()
            .map(|i| {
                let c = Component {
                    index: i,
                    shape: self.component_shape(i),
                    rate: self.beta(),
                    power: self.d(),
                };
                (c, mp[i])
            })
            .unzip();
        MixtureView { components, weights }
    }

    /// `n` independent draws, reproducible for a given `seed`.
    ///
    /// A component is picked by its mixing proportion, `G ~ Gamma(shape, rate β)`
    /// is drawn by Marsaglia-Tsang rejection, and `G^{1/d}` is returned.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>> {
        Ok(self.sample_labeled(n, seed)?.into_iter().map(|(x, _)| x).collect())
    }

    /// Like [`Family::sample`] but also returns the coefficient index each draw came from.
    pub fn sample_labeled(&self, n: usize, seed: u64) -> Result<Vec<(f64, usize)>> {
        if n == 0 {
            return Err(Error::Domain("sample size must be at least 1".into()));
        }
        let view = self.mixture_view();
        let picker = WeightedIndex::new(&view.weights)
            .map_err(|e| Error::InvalidParams(format!("mixing weights: {e}")))?;
        let gammas = view
            .components
            .iter()
            .map(|c| Gamma::new(c.shape, 1.0 / c.rate))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::InvalidParams(format!("component gamma: {e}")))?;
        let inv_power = 1.0 / self.d();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok((0..n)
            .map(|_| {
                let k = picker.sample(&mut rng);
                let g: f64 = gammas[k].sample(&mut rng);
                (g.powf(inv_power), view.components[k].index)
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use crate::family::{make_family, Family, FamilyParams};

    fn fam(theta: &[f64], beta: f64, d: f64) -> Family {
        make_family(FamilyParams::new(theta.to_vec(), beta, d).unwrap()).unwrap()
    }

    #[test]
    fn mixture_view_examples() {
        let lindley = fam(&[1.0, 1.0], 2.0, 1.0).mixture_view();
        assert_eq!(lindley.components.len(), 2);
        assert!((lindley.weights[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((lindley.weights[1] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(lindley.components[0].describe(), "Exp(2)");
        assert_eq!(lindley.components[1].describe(), "Ga(2,2)");

        let akash = fam(&[1.0, 0.0, 1.0], 1.0, 1.0).mixture_view();
        assert_eq!(akash.components.len(), 2);
        assert!((akash.weights[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((akash.weights[1] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(akash.components[1].describe(), "Ga(3,1)");

        let single = fam(&[0.0, 0.0, 4.0], 1.0, 2.0).mixture_view();
        assert_eq!(single.weights, vec![1.0]);
        assert_eq!(single.components[0].describe(), "GGa(2,1,3)");
    }

    #[test]
    fn mixture_density_matches_pdf() {
        for (theta, beta, d) in [
            (vec![1.0, 2.0, 0.0, 0.5], 1.3, 1.0),
            (vec![0.0, 1.0, 3.0], 0.4, 2.5),
            (vec![2.0, 0.0, 0.0, 1.0], 3.0, 0.5),
        ] {
            let f = fam(&theta, beta, d);
            let view = f.mixture_view();
            for k in 0..40 {
                let x = 0.05 + k as f64 * 0.2;
                let p = f.pdf(x).unwrap();
                assert!((view.density(x) - p).abs() <= 1e-12 * p, "x = {x}");
            }
            assert!((view.density(0.0) - f.pdf(0.0).unwrap()).abs() <= 1e-12);
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let f = fam(&[1.0, 1.0], 1.0, 1.0);
        assert_eq!(f.sample(100, 7).unwrap(), f.sample(100, 7).unwrap());
        assert_ne!(f.sample(100, 7).unwrap(), f.sample(100, 8).unwrap());
        assert!(f.sample(0, 1).is_err());
    }

    #[test]
    fn exponential_sample_mean_within_clt_bound() {
        let f = fam(&[1.0], 1.0, 1.0);
        let n = 1_000_000;
        let xs = f.sample(n, 2024).unwrap();
        let mean = xs.iter().sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 4.0 / (n as f64).sqrt());
        assert!(xs.iter().all(|&x| x >= 0.0));
    }
}
