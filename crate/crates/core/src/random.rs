//! Seeded random states for property suites.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{DensityMatrix, HermitianOperator, C64};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// `G G† / Tr(G G†)` for a `D × rank` complex Gaussian `G`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dims: &[usize], rank: usize) -> DensityMatrix {
    let order: usize = dims.iter().product();
    let g = ginibre(rng, order, rank.clamp(1, order));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::trusted(HermitianOperator::from_product(dims.to_vec(), m.unscale(tr)))
}

/// Convex mixture of `terms` random product states on `da ⊗ db`.
pub fn random_separable<R: Rng + ?Sized>(
    rng: &mut R,
    da: usize,
    db: usize,
    terms: usize,
) -> DensityMatrix {
    let weights: Vec<f64> = (0..terms).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let mut acc = DMatrix::<C64>::zeros(da * db, da * db);
    for w in weights {
        let rank_a = rng.random_range(1..=da);
        let rank_b = rng.random_range(1..=db);
        let a = random_density(rng, &[da], rank_a);
        let b = random_density(rng, &[db], rank_b);
        acc += a.op().kron(b.op()).into_matrix().scale(w / total);
    }
    DensityMatrix::trusted(HermitianOperator::from_product(vec![da, db], acc))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_states_are_valid() {
        let mut rng = seeded(7);
        for _ in 0..20 {
            let r = random_density(&mut rng, &[2, 3], 3);
            assert!(DensityMatrix::new(r.op().clone()).is_ok());
            let s = random_separable(&mut rng, 2, 2, 4);
            assert!(DensityMatrix::new(s.op().clone()).is_ok());
        }
    }

    #[test]
    fn seeds_are_reproducible() {
        let a = random_density(&mut seeded(3), &[2, 2], 2);
        let b = random_density(&mut seeded(3), &[2, 2], 2);
        assert_eq!(a.matrix(), b.matrix());
    }
}
