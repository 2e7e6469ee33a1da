#![allow(dead_code)]

use cp_phase::numerics::c;
use cp_phase::{ComplexMatrix, DensityMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// `G G† / tr(G G†)` for a random complex `G`; full rank almost surely.
pub fn random_density(dim: usize, rng: &mut impl Rng) -> DensityMatrix {
    let g = random_matrix(dim, rng);
    let rho = &g * g.adjoint();
    let tr = rho.trace().re;
    let rho = rho * c(1.0 / tr, 0.0);
    DensityMatrix::new((&rho + rho.adjoint()) * c(0.5, 0.0)).expect("random state is valid")
}

pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = random_matrix(dim, rng);
    (&g + g.adjoint()) * c(0.5, 0.0)
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

/// Relative error with the denominator floored at 0.01.
pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(0.01)
}

/// Least-squares fit of `a + b cos(x − phase)` via the linear model
/// `a + p cos x + q sin x`; returns `(a, b, phase)`.
pub fn fit_cosine(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let mut normal = nalgebra::Matrix3::<f64>::zeros();
    let mut rhs = nalgebra::Vector3::<f64>::zeros();
    for (&x, &y) in xs.iter().zip(ys) {
        let row = nalgebra::Vector3::new(1.0, x.cos(), x.sin());
        normal += row * row.transpose();
        rhs += row * y;
    }
    let sol = normal.lu().solve(&rhs).expect("well-posed fit");
    let (a, p, q) = (sol[0], sol[1], sol[2]);
    (a, p.hypot(q), q.atan2(p))
}
