use crate::error::{Error, Result};
use crate::model::SymmetricMatrix;
use crate::scalar::Real;

/// Largest dimension accepted by [`norm_inf_to_one`].
pub const EXHAUSTIVE_LIMIT: usize = 22;

/// Exact `‖M‖_{∞→1} = max_{x,y ∈ {±1}ⁿ} ⟨x, M y⟩` by enumeration.
///
/// For fixed `x` the inner maximum over `y` is `Σⱼ |(Mx)ⱼ|`. `x` and `−x`
/// give the same value, so `x₀ = +1` is fixed and the remaining `2ⁿ⁻¹` sign
/// patterns are visited in Gray-code order, updating `Mx` with one column per
/// step.
pub fn norm_inf_to_one<T: Real>(m: &SymmetricMatrix<T>) -> Result<T> {
    let n = m.n();
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::TooLarge { n, limit: EXHAUSTIVE_LIMIT });
    }
    if n == 0 {
        return Ok(T::zero());
    }
    let mut x = vec![T::one(); n];
    let mut mx: Vec<T> = (0..n).map(|i| m.column_slice(i).iter().fold(T::zero(), |a, &b| a + b)).collect();
    let l1 = |v: &[T]| v.iter().fold(T::zero(), |a, &b| a + b.abs());
    let mut best = l1(&mx);
    let two = T::lit(2.0);
    for step in 1u64..(1u64 << (n - 1)) {
        // Gray code flips bit `trailing_zeros(step)`; bit b maps to node b + 1.
        let node = step.trailing_zeros() as usize + 1;
        let col = m.column_slice(node);
        let delta = -two * x[node];
        x[node] = -x[node];
        for (acc, &c) in mx.iter_mut().zip(col) {
            *acc += delta * c;
        }
        best = best.max(l1(&mx));
    }
    Ok(best)
}
