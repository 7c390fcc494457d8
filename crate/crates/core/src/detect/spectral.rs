use nalgebra::{DMatrix, SymmetricEigen};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{CommunityAssignment, SymmetricMatrix};
use crate::rng::SeedStream;
use crate::scalar::Real;

/// Independent k-means++ initializations; the lowest inertia wins.
pub const KMEANS_INITS: usize = 10;
pub const KMEANS_MAX_ITER: usize = 100;

/// Spectral clustering on the raw weighted matrix.
///
/// Rows of the eigenvectors for the `k` eigenvalues of largest magnitude are
/// clustered by Lloyd iterations. Labels may come out unbalanced.
pub fn spectral_clustering<T: Real>(w: &SymmetricMatrix<T>, k: usize, seed: u64) -> Result<CommunityAssignment> {
    let n = w.n();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("need 1 ≤ K ≤ n, got K = {k}, n = {n}")));
    }
    if k == 1 {
        return CommunityAssignment::new(vec![0; n], 1);
    }
    let eig = SymmetricEigen::new(w.cast::<f64>().into_inner());
    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps the decomposition's order among equal magnitudes.
    order.sort_by(|&a, &b| eig.eigenvalues[b].abs().total_cmp(&eig.eigenvalues[a].abs()));
    let embedding = DMatrix::from_fn(n, k, |i, c| eig.eigenvectors[(i, order[c])]);
    let points: Vec<Vec<f64>> = (0..n).map(|i| embedding.row(i).iter().copied().collect()).collect();

    let stream = SeedStream::new(seed);
    let best = (0..KMEANS_INITS)
        .map(|init| kmeans(&points, k, &stream.split(init as u64)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one initialization");
    CommunityAssignment::new(best.0, k)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(p: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    centers
        .iter()
        .enumerate()
        .map(|(c, center)| (c, sq_dist(p, center)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty centers")
}

fn seed_centers(points: &[Vec<f64>], k: usize, stream: &SeedStream) -> Vec<Vec<f64>> {
    let mut rng = stream.rng();
    let n = points.len();
    let mut centers = vec![points[rng.random_range(0..n)].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centers[0])).collect();
    while centers.len() < k {
        let next = match WeightedIndex::new(&d2) {
            Ok(dist) => dist.sample(&mut rng),
            // Every point already coincides with a center.
            Err(_) => rng.random_range(0..n),
        };
        centers.push(points[next].clone());
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, &centers[centers.len() - 1]));
        }
    }
    centers
}

/// One k-means++ run: labels and within-cluster sum of squares.
fn kmeans(points: &[Vec<f64>], k: usize, stream: &SeedStream) -> (Vec<usize>, f64) {
    let dim = points[0].len();
    let mut centers = seed_centers(points, k, stream);
    let mut labels = vec![usize::MAX; points.len()];
    for _ in 0..KMEANS_MAX_ITER {
        let mut changed = false;
        for (label, p) in labels.iter_mut().zip(points) {
            let (c, _) = nearest(p, &centers);
            if *label != c {
                *label = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (&l, p) in labels.iter().zip(points) {
            counts[l] += 1;
            sums[l].iter_mut().zip(p).for_each(|(s, x)| *s += x);
        }
        for c in 0..k {
            // An emptied cluster keeps its previous center.
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
    }
    let inertia = labels.iter().zip(points).map(|(&l, p)| sq_dist(p, &centers[l])).sum();
    (labels, inertia)
}
