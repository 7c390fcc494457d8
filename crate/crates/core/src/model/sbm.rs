use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::{CommunityAssignment, SymmetricMatrix};
use crate::rng::SeedStream;
use crate::scalar::Real;

/// Distribution of an edge weight, parameterised per edge class (in/out).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightLaw {
    /// `Ber(a_n/n)·N(μ_in, τ_in²)` inside communities and
    /// `Ber(b_n/n)·N(μ_out, τ_out²)` across them.
    ZeroInflatedGaussian {
        a_n: f64,
        b_n: f64,
        mu_in: f64,
        mu_out: f64,
        tau_in: f64,
        tau_out: f64,
    },
    Bernoulli { p_in: f64, p_out: f64 },
    Gaussian { mu_in: f64, mu_out: f64, sigma: f64 },
}

impl WeightLaw {
    pub fn name(&self) -> &'static str {
        match self {
            WeightLaw::ZeroInflatedGaussian { .. } => "zero-inflated-gaussian",
            WeightLaw::Bernoulli { .. } => "bernoulli",
            WeightLaw::Gaussian { .. } => "gaussian",
        }
    }
}

/// Variance factors and scale parameters of the centred edge weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubGammaParams {
    pub nu_in: f64,
    pub nu_out: f64,
    pub c_in: f64,
    pub c_out: f64,
    /// Global variance factor, at least `n·max(ν)`.
    pub w_plus: f64,
    /// `max(c)/√w₊`.
    pub theta: f64,
}

impl SubGammaParams {
    fn from_classes(n: usize, nu_in: f64, nu_out: f64, c_in: f64, c_out: f64) -> Self {
        let w_plus = n as f64 * nu_in.max(nu_out);
        let theta = if w_plus > 0.0 { c_in.max(c_out) / w_plus.sqrt() } else { f64::INFINITY };
        Self { nu_in, nu_out, c_in, c_out, w_plus, theta }
    }
}

/// Balanced weighted stochastic block model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SbmModel {
    n: usize,
    k: usize,
    law: WeightLaw,
}

impl SbmModel {
    pub fn new(n: usize, k: usize, law: WeightLaw) -> Result<Self> {
        if k == 0 || n == 0 || !n.is_multiple_of(k) {
            return Err(Error::Unbalanced { n, k });
        }
        let prob = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} = {p} is not a probability")))
            }
        };
        let nonneg = |name: &str, v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} = {v} must be finite and non-negative")))
            }
        };
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{name} is not finite")))
            }
        };
        match law {
            WeightLaw::ZeroInflatedGaussian { a_n, b_n, mu_in, mu_out, tau_in, tau_out } => {
                prob("a_n/n", a_n / n as f64)?;
                prob("b_n/n", b_n / n as f64)?;
                finite("mu_in", mu_in)?;
                finite("mu_out", mu_out)?;
                nonneg("tau_in", tau_in)?;
                nonneg("tau_out", tau_out)?;
            }
            WeightLaw::Bernoulli { p_in, p_out } => {
                prob("p_in", p_in)?;
                prob("p_out", p_out)?;
            }
            WeightLaw::Gaussian { mu_in, mu_out, sigma } => {
                finite("mu_in", mu_in)?;
                finite("mu_out", mu_out)?;
                nonneg("sigma", sigma)?;
            }
        }
        Ok(Self { n, k, law })
    }

    /// Zero-inflated Gaussian with a common density `ρ = a_n/n = b_n/n` and
    /// common noise level `τ`.
    pub fn zero_inflated_gaussian(
        n: usize,
        k: usize,
        rho: f64,
        mu_in: f64,
        mu_out: f64,
        tau: f64,
    ) -> Result<Self> {
        let d = rho * n as f64;
        Self::new(
            n,
            k,
            WeightLaw::ZeroInflatedGaussian { a_n: d, b_n: d, mu_in, mu_out, tau_in: tau, tau_out: tau },
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn law(&self) -> WeightLaw {
        self.law
    }

    /// Expected weight of a within-community edge.
    pub fn mean_in(&self) -> f64 {
        match self.law {
            WeightLaw::ZeroInflatedGaussian { a_n, mu_in, .. } => a_n / self.n as f64 * mu_in,
            WeightLaw::Bernoulli { p_in, .. } => p_in,
            WeightLaw::Gaussian { mu_in, .. } => mu_in,
        }
    }

    /// Expected weight of a between-community edge.
    pub fn mean_out(&self) -> f64 {
        match self.law {
            WeightLaw::ZeroInflatedGaussian { b_n, mu_out, .. } => b_n / self.n as f64 * mu_out,
            WeightLaw::Bernoulli { p_out, .. } => p_out,
            WeightLaw::Gaussian { mu_out, .. } => mu_out,
        }
    }

    /// Exact variance of a single edge weight in each class, `(in, out)`.
    pub fn edge_variances(&self) -> (f64, f64) {
        let n = self.n as f64;
        match self.law {
            WeightLaw::ZeroInflatedGaussian { a_n, b_n, mu_in, mu_out, tau_in, tau_out } => {
                let var = |p: f64, mu: f64, tau: f64| p * (mu * mu + tau * tau) - p * p * mu * mu;
                (var(a_n / n, mu_in, tau_in), var(b_n / n, mu_out, tau_out))
            }
            WeightLaw::Bernoulli { p_in, p_out } => (p_in * (1.0 - p_in), p_out * (1.0 - p_out)),
            WeightLaw::Gaussian { sigma, .. } => (sigma * sigma, sigma * sigma),
        }
    }

    /// Sub-gamma bookkeeping for any supported law.
    ///
    /// Bernoulli weights are bounded by 1 after centring, giving
    /// `ν = p(1−p)` and `c = 1/3`; Gaussian weights use `ν = σ²`, `c = 0`.
    pub fn subgamma(&self) -> SubGammaParams {
        match self.law {
            WeightLaw::ZeroInflatedGaussian { .. } => self.zig_params(),
            WeightLaw::Bernoulli { .. } => {
                let (nu_in, nu_out) = self.edge_variances();
                SubGammaParams::from_classes(self.n, nu_in, nu_out, 1.0 / 3.0, 1.0 / 3.0)
            }
            WeightLaw::Gaussian { sigma, .. } => {
                SubGammaParams::from_classes(self.n, sigma * sigma, sigma * sigma, 0.0, 0.0)
            }
        }
    }

    fn zig_params(&self) -> SubGammaParams {
        let WeightLaw::ZeroInflatedGaussian { a_n, b_n, mu_in, mu_out, tau_in, tau_out } = self.law
        else {
            unreachable!("caller checked the law")
        };
        let n = self.n as f64;
        let amp_in = mu_in.abs() + tau_in;
        let amp_out = mu_out.abs() + tau_out;
        let nu_in = 4.0 * (a_n / n) * amp_in * amp_in;
        let nu_out = 4.0 * (b_n / n) * amp_out * amp_out;
        let c_in = std::f64::consts::SQRT_2 * amp_in;
        let c_out = std::f64::consts::SQRT_2 * amp_out;
        let w_plus = (4.0 * a_n * amp_in * amp_in).max(4.0 * b_n * amp_out * amp_out);
        let theta = if w_plus > 0.0 { c_in.max(c_out) / w_plus.sqrt() } else { f64::INFINITY };
        SubGammaParams { nu_in, nu_out, c_in, c_out, w_plus, theta }
    }

    /// Checks mean separation (`M_in > M_out`, only meaningful for `K ≥ 2`)
    /// and, for the zero-inflated Gaussian law, `w₊ > 4`.
    pub fn check_assumptions(&self) -> Result<()> {
        if self.k >= 2 && self.mean_in() <= self.mean_out() {
            return Err(Error::InvalidParameter(format!(
                "mean separation requires M_in > M_out, got {} <= {}",
                self.mean_in(),
                self.mean_out()
            )));
        }
        if let WeightLaw::ZeroInflatedGaussian { .. } = self.law {
            let w_plus = self.zig_params().w_plus;
            if w_plus <= 4.0 {
                return Err(Error::InvalidParameter(format!("w_plus = {w_plus} must exceed 4")));
            }
        }
        Ok(())
    }

    fn check_assignment(&self, assignment: &CommunityAssignment) -> Result<()> {
        if assignment.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: assignment.n() });
        }
        if assignment.k() != self.k {
            return Err(Error::DimensionMismatch { expected: self.k, found: assignment.k() });
        }
        Ok(())
    }
}

/// Sub-gamma parameters of the zero-inflated Gaussian model.
pub fn zig_subgamma(model: &SbmModel) -> Result<SubGammaParams> {
    match model.law {
        WeightLaw::ZeroInflatedGaussian { .. } => Ok(model.zig_params()),
        other => Err(Error::UnsupportedLaw(other.name())),
    }
}

/// Draws one weighted adjacency matrix with zero diagonal.
///
/// Upper-triangle entries are drawn row by row from a single stream keyed by
/// `seed`, so equal seeds give bit-identical matrices.
pub fn sample_sbm(
    model: &SbmModel,
    assignment: &CommunityAssignment,
    seed: u64,
) -> Result<SymmetricMatrix<f64>> {
    model.check_assignment(assignment)?;
    let mut rng = SeedStream::new(seed).rng();
    let n = model.n;
    let nf = n as f64;
    let mut draw = |same: bool| -> f64 {
        match model.law {
            WeightLaw::ZeroInflatedGaussian { a_n, b_n, mu_in, mu_out, tau_in, tau_out } => {
                let (p, mu, tau) =
                    if same { (a_n / nf, mu_in, tau_in) } else { (b_n / nf, mu_out, tau_out) };
                let u: f64 = rng.random();
                let z: f64 = rng.sample(StandardNormal);
                if u < p {
                    mu + tau * z
                } else {
                    0.0
                }
            }
            WeightLaw::Bernoulli { p_in, p_out } => {
                let p = if same { p_in } else { p_out };
                let u: f64 = rng.random();
                if u < p {
                    1.0
                } else {
                    0.0
                }
            }
            WeightLaw::Gaussian { mu_in, mu_out, sigma } => {
                let mu = if same { mu_in } else { mu_out };
                let z: f64 = rng.sample(StandardNormal);
                mu + sigma * z
            }
        }
    };
    SymmetricMatrix::from_upper_fn(n, |i, j| if i == j { 0.0 } else { draw(assignment.same(i, j)) })
}

/// Mean matrix with `M_in` on same-community pairs, `M_out` elsewhere, and
/// zero diagonal.
pub fn mean_matrix<T: Real>(
    m_in: T,
    m_out: T,
    assignment: &CommunityAssignment,
) -> SymmetricMatrix<T> {
    SymmetricMatrix::from_upper_fn(assignment.n(), |i, j| {
        if i == j {
            T::zero()
        } else if assignment.same(i, j) {
            m_in
        } else {
            m_out
        }
    })
    .expect("finite means give finite entries")
}

/// Mean matrix under the one-community null: the equal-weight mixture
/// `(M_in + M_out)/2` off the diagonal.
pub fn null_mean_matrix<T: Real>(n: usize, m_in: T, m_out: T) -> SymmetricMatrix<T> {
    let mixed = (m_in + m_out) * T::lit(0.5);
    SymmetricMatrix::from_upper_fn(n, |i, j| if i == j { T::zero() } else { mixed })
        .expect("finite means give finite entries")
}
