//! Splitting solver for the constrained elliptope variants
//!
//! * `D = {X ⪰ 0, Xᵢᵢ = 1, Σᵢⱼ Xᵢⱼ = 0}` (two balanced communities),
//! * `C = {Z ⪰ 0, Z ≥ 0, Zᵢᵢ = 1, Σᵢⱼ Zᵢⱼ = λ}` (membership matrices).
//!
//! ADMM on `X = Z` with `X` in the PSD cone and `Z` in the polyhedral part.
//! The PSD step clips negative eigenvalues; the polyhedral step fixes the
//! diagonal and projects the off-diagonal upper triangle onto a hyperplane
//! (set D) or a scaled simplex (set C). The penalty is rebalanced whenever
//! primal and dual residuals drift apart by more than a factor of ten, and
//! the splitting step is over-relaxed.
//!
//! Stopping happens either on small primal/dual residuals or once the
//! diagonally rescaled PSD iterate is feasible and its objective has stalled.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{Residuals, SdpPoint, SdpSolution, SolverOptions};
use crate::error::{Error, Result};
use crate::model::SymmetricMatrix;
use crate::scalar::Real;

const OVER_RELAXATION: f64 = 1.6;
const REBALANCE_EVERY: usize = 10;
const RHO_MIN: f64 = 1e-4;
const RHO_MAX: f64 = 1e4;
/// Minimum iterations over which the objective must stall.
const STALL_WINDOW: usize = 50;

#[derive(Debug, Clone, Copy)]
enum Polyhedron {
    /// Off-diagonal entries sum to `−n`.
    ZeroSum,
    /// Non-negative entries summing to `λ`.
    NonNegativeSum { lambda: f64 },
}

/// `max ⟨M, X⟩` over the balanced set `D`.
pub fn sdp_balanced<T: Real>(m: &SymmetricMatrix<T>, opts: &SolverOptions) -> Result<SdpSolution<T>> {
    opts.validate()?;
    if m.n() < 2 {
        return Err(Error::Infeasible("the zero-sum set is empty for n < 2".into()));
    }
    solve(m, Polyhedron::ZeroSum, opts)
}

/// `max ⟨W, Z⟩` over the membership set `C` with total mass `λ`.
pub fn sdp_membership<T: Real>(
    w: &SymmetricMatrix<T>,
    lambda: f64,
    opts: &SolverOptions,
) -> Result<SdpSolution<T>> {
    opts.validate()?;
    let n = w.n() as f64;
    if w.n() == 0 {
        return Err(Error::InvalidParameter("empty matrix".into()));
    }
    // Unit diagonal plus non-negativity forces n ≤ Σ Zᵢⱼ; |Zᵢⱼ| ≤ 1 forces Σ ≤ n².
    if !(lambda >= n && lambda <= n * n) {
        return Err(Error::Infeasible(format!("lambda = {lambda} outside [{n}, {}]", n * n)));
    }
    solve(w, Polyhedron::NonNegativeSum { lambda }, opts)
}

/// A feasible point of the polyhedral set that is also PSD.
fn interior_point<T: Real>(n: usize, set: Polyhedron) -> DMatrix<T> {
    let nf = n as f64;
    match set {
        // n/(n−1)·(I − 𝟙𝟙ᵀ/n): unit diagonal, zero row sums.
        Polyhedron::ZeroSum => {
            let off = T::lit(-1.0 / (nf - 1.0));
            DMatrix::from_fn(n, n, |i, j| if i == j { T::one() } else { off })
        }
        // α𝟙𝟙ᵀ + (1 − α)I with total mass λ.
        Polyhedron::NonNegativeSum { lambda } => {
            let alpha = if n > 1 { T::lit((lambda - nf) / (nf * nf - nf)) } else { T::zero() };
            DMatrix::from_fn(n, n, |i, j| if i == j { T::one() } else { alpha })
        }
    }
}

fn solve<T: Real>(m: &SymmetricMatrix<T>, set: Polyhedron, opts: &SolverOptions) -> Result<SdpSolution<T>> {
    let n = m.n();
    let nf = T::lit(n as f64);
    let z0 = interior_point::<T>(n, set);
    if m.is_zero() || n == 1 {
        let objective = m.inner(&z0);
        return Ok(finish(m, z0, set, 0, true, vec![objective], 0.0, 0.0));
    }

    let c = reduced_cost(m, set);
    // Scale so that ‖C‖_F matches ‖X‖_F ≈ n for feasible points.
    let scale = c.norm() / nf;
    if scale == T::zero() {
        let objective = m.inner(&z0);
        return Ok(finish(m, z0, set, 0, true, vec![objective], 0.0, 0.0));
    }
    let c = c / scale;
    let tol = T::lit(opts.tol_feas);
    let mut rho = T::one();
    let alpha = T::lit(OVER_RELAXATION);
    let mut z = z0;
    let mut u = DMatrix::<T>::zeros(n, n);
    let mut x = z.clone();
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let (mut primal, mut dual) = (T::zero(), T::zero());
    let window = STALL_WINDOW.max(opts.stall_window);

    while iterations < opts.max_sweeps {
        iterations += 1;
        let v = &z - &u + &c / rho;
        x = project_psd(v);
        let relaxed = &x * alpha + &z * (T::one() - alpha);
        let z_prev = std::mem::replace(&mut z, project_polyhedron(&(&relaxed + &u), set));
        u += &relaxed - &z;

        primal = (&x - &z).norm();
        dual = rho * (&z - &z_prev).norm();
        let candidate = normalize_diagonal(&x);
        let objective = m.inner(&candidate);
        trace.push(objective);

        let eps_primal = tol * nf + tol * x.norm().max(z.norm());
        let eps_dual = tol * nf + tol * rho * u.norm();
        if primal <= eps_primal && dual <= eps_dual {
            converged = true;
            break;
        }
        // The rescaled PSD iterate is often optimal long before the dual
        // settles: accept it once it is feasible and its value has stalled.
        if trace.len() > window && feasible(&candidate, set, opts.tol_feas) {
            let recent = &trace[trace.len() - window..];
            let (lo, hi) = recent.iter().fold((objective, objective), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            if hi - lo <= T::lit(opts.tol_obj) * objective.abs().max(T::one()) {
                converged = true;
                break;
            }
        }
        if iterations % REBALANCE_EVERY == 0 {
            let ten = T::lit(10.0);
            let two = T::lit(2.0);
            if primal > ten * dual && rho < T::lit(RHO_MAX) {
                rho *= two;
                u /= two;
            } else if dual > ten * primal && rho > T::lit(RHO_MIN) {
                rho /= two;
                u *= two;
            }
        }
    }

    // The PSD iterate rescaled by its diagonal stays PSD and gets an exact
    // unit diagonal; only the sum and sign constraints carry residual error.
    let point = normalize_diagonal(&x);
    Ok(finish(m, point, set, iterations, converged, trace, primal.as_f64(), dual.as_f64()))
}

#[allow(clippy::too_many_arguments)]
fn finish<T: Real>(
    m: &SymmetricMatrix<T>,
    point: DMatrix<T>,
    set: Polyhedron,
    iterations: usize,
    converged: bool,
    trace: Vec<T>,
    primal: f64,
    dual: f64,
) -> SdpSolution<T> {
    let report = super::check_elliptope(&point);
    let target = match set {
        Polyhedron::ZeroSum => 0.0,
        Polyhedron::NonNegativeSum { lambda } => lambda,
    };
    let negativity = match set {
        Polyhedron::ZeroSum => 0.0,
        Polyhedron::NonNegativeSum { .. } => (-report.min_entry).max(0.0),
    };
    let residuals = Residuals {
        diagonal: report.diagonal,
        total_sum: (report.total_sum - target).abs(),
        psd: (-report.min_eigenvalue).max(0.0),
        negativity,
        primal,
        dual,
    };
    SdpSolution {
        objective: m.inner(&point),
        point: SdpPoint::Full(point),
        iterations,
        residuals,
        converged,
        trace,
    }
}

/// Cost matrix with the same maximizers as `m` over the set.
///
/// The diagonal only adds the constant `tr(m)`. On `D` every feasible point
/// satisfies `X𝟙 = 0`, so `m` can be replaced by `P m P` with
/// `P = I − 𝟙𝟙ᵀ/n`; on `C` the total mass is fixed, so a multiple of `𝟙𝟙ᵀ`
/// only adds a constant. Removing these components keeps the iterates well
/// scaled.
fn reduced_cost<T: Real>(m: &SymmetricMatrix<T>, set: Polyhedron) -> DMatrix<T> {
    let n = m.n();
    let nf = T::lit(n as f64);
    let mut c = m.with_zero_diagonal().into_inner();
    match set {
        Polyhedron::ZeroSum => {
            let row_means: Vec<T> = (0..n).map(|j| c.column(j).sum() / nf).collect();
            let grand = row_means.iter().fold(T::zero(), |a, &b| a + b) / nf;
            for j in 0..n {
                for i in 0..n {
                    c[(i, j)] += grand - row_means[i] - row_means[j];
                }
            }
        }
        Polyhedron::NonNegativeSum { .. } => {
            let off_mean = c.sum() / (nf * (nf - T::one()));
            c.add_scalar_mut(-off_mean);
        }
    }
    c.fill_diagonal(T::zero());
    c
}

fn project_psd<T: Real>(v: DMatrix<T>) -> DMatrix<T> {
    let n = v.nrows();
    let eig = SymmetricEigen::new(v);
    let positive: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > T::zero()).collect();
    let mut b = DMatrix::<T>::zeros(n, positive.len());
    for (col, &i) in positive.iter().enumerate() {
        let s = eig.eigenvalues[i].sqrt();
        b.column_mut(col).copy_from(&(eig.eigenvectors.column(i) * s));
    }
    &b * b.transpose()
}

fn project_polyhedron<T: Real>(y: &DMatrix<T>, set: Polyhedron) -> DMatrix<T> {
    let n = y.nrows();
    let half = T::lit(0.5);
    let mut upper = Vec::with_capacity(n * (n - 1) / 2);
    for j in 1..n {
        for i in 0..j {
            upper.push((y[(i, j)] + y[(j, i)]) * half);
        }
    }
    let nf = n as f64;
    match set {
        Polyhedron::ZeroSum => {
            let target = T::lit(-nf / 2.0);
            let count = T::lit(upper.len() as f64);
            let shift = (upper.iter().fold(T::zero(), |a, &b| a + b) - target) / count;
            upper.iter_mut().for_each(|v| *v -= shift);
        }
        Polyhedron::NonNegativeSum { lambda } => {
            project_simplex(&mut upper, T::lit((lambda - nf) / 2.0));
        }
    }
    let mut z = DMatrix::<T>::identity(n, n);
    let mut it = upper.into_iter();
    for j in 1..n {
        for i in 0..j {
            let v = it.next().expect("upper triangle length");
            z[(i, j)] = v;
            z[(j, i)] = v;
        }
    }
    z
}

/// Euclidean projection onto `{z ≥ 0, Σ z = total}` (sort-based).
fn project_simplex<T: Real>(y: &mut [T], total: T) {
    if y.is_empty() {
        return;
    }
    if total <= T::zero() {
        y.iter_mut().for_each(|v| *v = T::zero());
        return;
    }
    let mut sorted: Vec<T> = y.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite iterate"));
    let mut cumulative = T::zero();
    let mut theta = T::zero();
    for (idx, &s) in sorted.iter().enumerate() {
        cumulative += s;
        let candidate = (cumulative - total) / T::lit((idx + 1) as f64);
        if s - candidate > T::zero() {
            theta = candidate;
        } else {
            break;
        }
    }
    y.iter_mut().for_each(|v| *v = (*v - theta).max(T::zero()));
}

/// Sum and sign constraints of a unit-diagonal PSD candidate.
fn feasible<T: Real>(x: &DMatrix<T>, set: Polyhedron, tol: f64) -> bool {
    let n = x.nrows() as f64;
    let total = x.iter().fold(0.0, |acc, v| acc + v.as_f64());
    match set {
        Polyhedron::ZeroSum => total.abs() <= tol * n * n,
        Polyhedron::NonNegativeSum { lambda } => {
            (total - lambda).abs() <= tol * n * n && x.iter().all(|v| v.as_f64() >= -tol)
        }
    }
}

fn normalize_diagonal<T: Real>(x: &DMatrix<T>) -> DMatrix<T> {
    let n = x.nrows();
    let floor = T::lit(1e-300_f64.max(f64::MIN_POSITIVE));
    let d: Vec<T> = (0..n).map(|i| T::one() / x[(i, i)].max(floor).sqrt()).collect();
    DMatrix::from_fn(n, n, |i, j| if i == j { T::one() } else { x[(i, j)] * d[i] * d[j] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{mean_matrix, sample_goe, CommunityAssignment};
    use crate::sdp::sdp_psd1;

    #[test]
    fn simplex_projection() {
        let mut y = vec![0.5, 2.0, -1.0, 0.1];
        project_simplex(&mut y, 1.0);
        assert!((y.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(y, vec![0.0, 1.0, 0.0, 0.0]);
        let mut y = vec![0.3f64, 0.3, 0.3];
        project_simplex(&mut y, 1.2);
        for v in y {
            assert!((v - 0.4).abs() < 1e-12);
        }
    }

    #[test]
    fn interior_points_are_feasible() {
        let x = interior_point::<f64>(7, Polyhedron::ZeroSum);
        let r = crate::sdp::check_elliptope(&x);
        assert!(r.in_elliptope(1e-12) && r.total_sum.abs() < 1e-12);
        let z = interior_point::<f64>(6, Polyhedron::NonNegativeSum { lambda: 18.0 });
        let r = crate::sdp::check_elliptope(&z);
        assert!(r.in_elliptope(1e-12) && (r.total_sum - 18.0).abs() < 1e-12 && r.min_entry >= 0.0);
    }

    #[test]
    fn all_ones_has_zero_value_on_balanced_set() {
        let s = sdp_balanced(&SymmetricMatrix::<f64>::ones(8), &SolverOptions::default()).unwrap();
        assert!(s.objective.abs() < 1e-4, "objective {}", s.objective);
    }

    #[test]
    fn balanced_two_block_mean_recovers_sign_vector() {
        let a = CommunityAssignment::canonical(20, 2).unwrap();
        let m = mean_matrix(3.0, 1.0, &a);
        let s = sdp_balanced(&m, &SolverOptions::default()).unwrap();
        let expected: f64 = 400.0 / 2.0 * (3.0 - 1.0) - 20.0 * 3.0;
        assert!((s.objective - expected).abs() <= 1e-4 * expected, "{} vs {expected}", s.objective);
    }

    #[test]
    fn balanced_not_above_plain() {
        let m = sample_goe(6, 8).unwrap();
        let d = sdp_balanced(&m, &SolverOptions::default()).unwrap();
        let p = sdp_psd1(&m, &SolverOptions::default()).unwrap();
        assert!(d.objective <= p.objective + 1e-6);
    }

    #[test]
    fn membership_rejects_infeasible_lambda() {
        let w = SymmetricMatrix::<f64>::zeros(4);
        assert!(sdp_membership(&w, 3.0, &SolverOptions::default()).is_err());
        assert!(sdp_membership(&w, 17.0, &SolverOptions::default()).is_err());
        let s = sdp_membership(&w, 8.0, &SolverOptions::default()).unwrap();
        assert_eq!(s.objective, 0.0);
        assert!(s.converged);
    }
}
