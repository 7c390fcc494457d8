//! Low-rank factorization solver for the elliptope.
//!
//! The point is `X = V Vᵀ` with unit rows `vᵢ ∈ ℝᵏ`. A sweep visits rows in
//! order and replaces `vᵢ` by the maximizer of the objective over the unit
//! sphere with the other rows fixed, which is `gᵢ/‖gᵢ‖` for
//! `gᵢ = Σ_{j≠i} Mᵢⱼ vⱼ`. Each update raises the objective by
//! `2(‖gᵢ‖ − ⟨gᵢ, vᵢ⟩) ≥ 0`, so the sweep trace is non-decreasing.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{Residuals, SdpPoint, SdpSolution, SolverOptions};
use crate::error::{Error, Result};
use crate::model::SymmetricMatrix;
use crate::rng::SeedStream;
use crate::scalar::Real;

/// Estimates `SDP(M)` with the default rank `⌈√(2n)⌉ + 1` (or `opts.rank`).
///
/// The objective is attained by the returned feasible factor, so it is
/// always a certified lower bound on `SDP(M)`.
pub fn sdp_psd1<T: Real>(m: &SymmetricMatrix<T>, opts: &SolverOptions) -> Result<SdpSolution<T>> {
    opts.validate()?;
    let k = opts.rank_for(m.n());
    solve(m, k, opts, None)
}

/// Best rank-`k` point found over `opts.restarts` random initializations.
pub fn opt_k<T: Real>(m: &SymmetricMatrix<T>, k: usize, opts: &SolverOptions) -> Result<SdpSolution<T>> {
    opts.validate()?;
    check_rank(m.n(), k)?;
    solve(m, k, opts, None)
}

/// `OPT_k` for `k = 2..=k_max`, non-decreasing in `k`.
///
/// Rank `k` restarts share the sub-seeds of rank `k − 1` and additionally
/// ascend from the previous optimum padded with a zero column, which is a
/// feasible rank-`k` point.
pub fn opt_k_path<T: Real>(
    m: &SymmetricMatrix<T>,
    k_max: usize,
    opts: &SolverOptions,
) -> Result<Vec<SdpSolution<T>>> {
    opts.validate()?;
    check_rank(m.n(), k_max)?;
    let mut out: Vec<SdpSolution<T>> = Vec::with_capacity(k_max.saturating_sub(1));
    for k in 2..=k_max {
        let warm = out.last().and_then(|prev| match &prev.point {
            SdpPoint::LowRank(v) => Some(pad_columns(v, k)),
            SdpPoint::Full(_) => None,
        });
        let sol = solve(m, k, opts, warm)?;
        out.push(sol);
    }
    Ok(out)
}

fn check_rank(n: usize, k: usize) -> Result<()> {
    if k < 2 || k > n {
        return Err(Error::InvalidParameter(format!("rank {k} outside 2..={n}")));
    }
    Ok(())
}

fn pad_columns<T: Real>(v: &DMatrix<T>, k: usize) -> DMatrix<T> {
    let mut out = DMatrix::zeros(v.nrows(), k);
    out.view_mut((0, 0), (v.nrows(), v.ncols())).copy_from(v);
    out
}

fn solve<T: Real>(
    m: &SymmetricMatrix<T>,
    k: usize,
    opts: &SolverOptions,
    warm: Option<DMatrix<T>>,
) -> Result<SdpSolution<T>> {
    let n = m.n();
    if n == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    if n == 1 || m.is_zero() {
        let mut v = DMatrix::zeros(n, k);
        v.column_mut(0).fill(T::one());
        let objective = m.trace();
        return Ok(SdpSolution {
            objective,
            point: SdpPoint::LowRank(v),
            iterations: 0,
            residuals: Residuals::default(),
            converged: true,
            trace: vec![objective],
        });
    }

    let root = SeedStream::new(opts.seed);
    let mut starts: Vec<Vec<T>> =
        (0..opts.restarts).map(|r| random_factor(n, k, root.split(r as u64))).collect();
    if let Some(w) = warm {
        starts.push(to_row_major(&w));
    }

    let mut best: Option<(T, Vec<T>, Run<T>)> = None;
    for mut v in starts {
        let run = ascend(m, &mut v, k, opts);
        let value = objective(m, &v, k);
        if best.as_ref().is_none_or(|(b, _, _)| value > *b) {
            best = Some((value, v, run));
        }
    }
    let (objective, v, run) = best.expect("at least one restart");
    let factor = DMatrix::from_row_slice(n, k, &v);
    Ok(SdpSolution {
        objective,
        point: SdpPoint::LowRank(factor),
        iterations: run.sweeps,
        residuals: Residuals { diagonal: max_row_norm_error(&v, k), ..Residuals::default() },
        converged: run.converged,
        trace: run.trace,
    })
}

fn random_factor<T: Real>(n: usize, k: usize, stream: SeedStream) -> Vec<T> {
    let mut rng = stream.rng();
    let mut v = Vec::with_capacity(n * k);
    for _ in 0..n {
        loop {
            let row: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                v.extend(row.iter().map(|x| T::lit(x / norm)));
                break;
            }
        }
    }
    v
}

fn to_row_major<T: Real>(v: &DMatrix<T>) -> Vec<T> {
    let (n, k) = v.shape();
    let mut out = Vec::with_capacity(n * k);
    for i in 0..n {
        out.extend(v.row(i).iter().copied());
    }
    out
}

struct Run<T> {
    trace: Vec<T>,
    sweeps: usize,
    converged: bool,
}

/// Gauss–Seidel sweeps until the objective stalls or the sweep cap is hit.
fn ascend<T: Real>(m: &SymmetricMatrix<T>, v: &mut [T], k: usize, opts: &SolverOptions) -> Run<T> {
    let n = m.n();
    let diag = m.trace();
    let mut obj = objective(m, v, k);
    let off_scale = m.with_zero_diagonal().frobenius_norm() * T::default_epsilon();
    let tol = T::lit(opts.tol_obj);
    let two = T::lit(2.0);
    let mut g = vec![T::zero(); k];
    let mut trace = vec![obj];
    let mut converged = false;
    let mut sweeps = 0;

    while sweeps < opts.max_sweeps {
        sweeps += 1;
        let mut gained = T::zero();
        for i in 0..n {
            g.iter_mut().for_each(|x| *x = T::zero());
            let col = m.column_slice(i);
            for (j, &a) in col.iter().enumerate() {
                if j == i || a == T::zero() {
                    continue;
                }
                let vj = &v[j * k..(j + 1) * k];
                for (gt, &vt) in g.iter_mut().zip(vj) {
                    *gt += a * vt;
                }
            }
            let norm = g.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt();
            if norm == T::zero() {
                continue;
            }
            let vi = &mut v[i * k..(i + 1) * k];
            let dot = g.iter().zip(vi.iter()).fold(T::zero(), |acc, (&a, &b)| acc + a * b);
            let gain = two * (norm - dot);
            if gain > T::zero() {
                gained += gain;
            }
            for (vt, &gt) in vi.iter_mut().zip(&g) {
                *vt = gt / norm;
            }
        }
        obj += gained;
        trace.push(obj);
        if gained == T::zero() {
            converged = true;
            break;
        }
        let w = opts.stall_window;
        if trace.len() > w {
            let t = trace.len() - 1;
            let scale = (obj - diag).abs().max(off_scale);
            if trace[t] - trace[t - w] <= tol * scale {
                converged = true;
                break;
            }
        }
    }
    Run { trace, sweeps, converged }
}

/// `⟨M, V Vᵀ⟩ = Σᵢ Mᵢᵢ + Σ_{i≠j} Mᵢⱼ ⟨vᵢ, vⱼ⟩` for unit rows.
fn objective<T: Real>(m: &SymmetricMatrix<T>, v: &[T], k: usize) -> T {
    let n = m.n();
    let mut total = T::zero();
    for i in 0..n {
        let vi = &v[i * k..(i + 1) * k];
        let col = m.column_slice(i);
        total += col[i];
        for (j, &a) in col.iter().enumerate().skip(i + 1) {
            if a == T::zero() {
                continue;
            }
            let vj = &v[j * k..(j + 1) * k];
            let dot = vi.iter().zip(vj).fold(T::zero(), |acc, (&x, &y)| acc + x * y);
            total += T::lit(2.0) * a * dot;
        }
    }
    total
}

fn max_row_norm_error<T: Real>(v: &[T], k: usize) -> f64 {
    v.chunks_exact(k)
        .map(|row| {
            let sq = row.iter().fold(T::zero(), |acc, &x| acc + x * x);
            (sq.sqrt() - T::one()).abs().as_f64()
        })
        .fold(0.0, f64::max)
}
