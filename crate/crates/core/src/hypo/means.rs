use crate::error::{Error, Result};
use crate::model::{CommunityAssignment, SymmetricMatrix};

/// Class means over unordered off-diagonal pairs and the implied mean matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanEstimate {
    pub m_in: f64,
    /// `None` when every node shares one label.
    pub m_out: Option<f64>,
    /// Zero diagonal; `m_in` on same-label pairs, `m_out` elsewhere.
    pub m_hat: SymmetricMatrix<f64>,
}

/// Averages `w` over same-label and different-label pairs `i < j`.
pub fn estimate_means(w: &SymmetricMatrix<f64>, labels: &CommunityAssignment) -> Result<MeanEstimate> {
    let n = w.n();
    if labels.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: labels.n() });
    }
    let (mut sum_in, mut cnt_in, mut sum_out, mut cnt_out) = (0.0, 0usize, 0.0, 0usize);
    for j in 1..n {
        let col = w.column_slice(j);
        for (i, &v) in col.iter().enumerate().take(j) {
            if labels.same(i, j) {
                sum_in += v;
                cnt_in += 1;
            } else {
                sum_out += v;
                cnt_out += 1;
            }
        }
    }
    if cnt_in == 0 {
        return Err(Error::EmptyPairClass("in"));
    }
    let m_in = sum_in / cnt_in as f64;
    let distinct = labels.sizes().iter().filter(|&&s| s > 0).count();
    let m_out = match (cnt_out, distinct) {
        (0, 1) => None,
        (0, _) => return Err(Error::EmptyPairClass("out")),
        _ => Some(sum_out / cnt_out as f64),
    };
    let off = m_out.unwrap_or(m_in);
    let m_hat = SymmetricMatrix::from_upper_fn(n, |i, j| {
        if i == j {
            0.0
        } else if labels.same(i, j) {
            m_in
        } else {
            off
        }
    })?;
    Ok(MeanEstimate { m_in, m_out, m_hat })
}

/// Zero-inflated Gaussian parameters estimated from a weight matrix and the
/// resulting variance factor.
#[derive(Debug, Clone, PartialEq)]
pub struct PluginEstimate {
    /// Fraction of nonzero off-diagonal pairs.
    pub rho: f64,
    pub mu_in: f64,
    pub mu_out: f64,
    pub tau_in: f64,
    pub tau_out: f64,
    /// `max{4ρ̂n(|μ̂_in|+τ̂_in)², 4ρ̂n(|μ̂_out|+τ̂_out)²}`.
    pub w_plus: f64,
    /// Set when some class holds fewer than two nonzero entries.
    pub low_sample: bool,
}

#[derive(Default)]
struct Moments {
    count: usize,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.count += 1;
        self.sum += v;
        self.sum_sq += v * v;
    }

    fn mean(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.sum / self.count as f64
        }
    }

    /// Sample standard deviation; zero below two observations.
    fn std(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let c = self.count as f64;
        ((self.sum_sq - self.sum * self.sum / c) / (c - 1.0)).max(0.0).sqrt()
    }
}

/// Plug-in `w₊` under the zero-inflated Gaussian model.
pub fn w_plus_plugin(w: &SymmetricMatrix<f64>, labels: &CommunityAssignment) -> Result<PluginEstimate> {
    let n = w.n();
    if labels.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: labels.n() });
    }
    let (mut inside, mut outside) = (Moments::default(), Moments::default());
    for j in 1..n {
        for (i, &v) in w.column_slice(j).iter().enumerate().take(j) {
            if v != 0.0 {
                if labels.same(i, j) {
                    inside.push(v);
                } else {
                    outside.push(v);
                }
            }
        }
    }
    let nonzero = inside.count + outside.count;
    if nonzero == 0 {
        return Err(Error::InvalidParameter("plug-in needs at least one nonzero off-diagonal entry".into()));
    }
    let pairs = n * (n - 1) / 2;
    let rho = nonzero as f64 / pairs as f64;
    let (mu_in, tau_in) = (inside.mean(), inside.std());
    let (mu_out, tau_out) = (outside.mean(), outside.std());
    let a = rho * n as f64;
    let w_plus = (4.0 * a * (mu_in.abs() + tau_in).powi(2)).max(4.0 * a * (mu_out.abs() + tau_out).powi(2));
    let has_out = labels.sizes().iter().filter(|&&s| s > 0).count() > 1;
    let low_sample = inside.count < 2 || (has_out && outside.count < 2);
    Ok(PluginEstimate { rho, mu_in, mu_out, tau_in, tau_out, w_plus, low_sample })
}
