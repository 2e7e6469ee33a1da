use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{c, hermitian_part, ComplexMatrix};

use super::KrausSet;

/// Largest completeness defect [`dilate`] accepts.
pub const MAX_DILATION_DEFECT: f64 = 1e-6;

/// Unitary `U_ip` on `H_i ⊗ H_p` realizing a Kraus set as
/// `W_n = ⟨ζ_n|U_ip|ζ_0⟩`, with the probe in its computational basis.
///
/// Index `(i, n)` of the product space is stored at `i·probe_dim + n`.
#[derive(Debug, Clone)]
pub struct Dilation {
    unitary: ComplexMatrix,
    internal_dim: usize,
    probe_dim: usize,
}

impl Dilation {
    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn into_unitary(self) -> ComplexMatrix {
        self.unitary
    }

    pub fn internal_dim(&self) -> usize {
        self.internal_dim
    }

    pub fn probe_dim(&self) -> usize {
        self.probe_dim
    }

    /// `⟨ζ_out|U_ip|ζ_in⟩` as an operator on the internal space.
    pub fn block(&self, out: usize, input: usize) -> ComplexMatrix {
        let (d, m) = (self.internal_dim, self.probe_dim);
        ComplexMatrix::from_fn(d, d, |i, j| self.unitary[(i * m + out, j * m + input)])
    }

    /// The orthonormalized Kraus operators `⟨ζ_n|U_ip|ζ_0⟩`.
    pub fn kraus_ops(&self) -> Vec<ComplexMatrix> {
        (0..self.probe_dim).map(|n| self.block(n, 0)).collect()
    }
}

/// `M^{-1/2}` for a Hermitian positive definite `M`.
fn inverse_sqrt(m: &ComplexMatrix) -> ComplexMatrix {
    let eig = hermitian_part(m).symmetric_eigen();
    let scaled = eig.eigenvalues.map(|l| c(1.0 / l.sqrt(), 0.0));
    let v = &eig.eigenvectors;
    v * ComplexMatrix::from_diagonal(&scaled) * v.adjoint()
}

/// Builds a unitary dilation of `kraus`.
///
/// The operators are first orthonormalized as `Ŵ_n = W_n (Σ W†W)^{-1/2}`,
/// which absorbs the completeness defect. The stacked `Ŵ_n` fill the columns
/// with the probe in `|ζ_0⟩`; the remaining columns are an orthonormal
/// completion obtained by Gram-Schmidt on the standard basis.
pub fn dilate(kraus: &KrausSet) -> Result<Dilation> {
    if kraus.completeness_defect() > MAX_DILATION_DEFECT {
        return Err(Error::DefectTooLarge {
            defect: kraus.completeness_defect(),
            bound: MAX_DILATION_DEFECT,
        });
    }
    let d = kraus.dim();
    let m = kraus.len();
    let total = d * m;
    let completeness = kraus
        .ops()
        .iter()
        .fold(ComplexMatrix::zeros(d, d), |acc, w| acc + w.adjoint() * w);
    let correction = inverse_sqrt(&completeness);

    let mut columns: Vec<DVector<Complex64>> = Vec::with_capacity(total);
    for j in 0..d {
        let mut col = DVector::zeros(total);
        for (n, w) in kraus.ops().iter().enumerate() {
            let w_hat = w * &correction;
            for i in 0..d {
                col[i * m + n] = w_hat[(i, j)];
            }
        }
        columns.push(col);
    }

    for k in 0..total {
        if columns.len() == total {
            break;
        }
        let mut v = DVector::zeros(total);
        v[k] = c(1.0, 0.0);
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for q in &columns {
                let overlap = q.dotc(&v);
                v -= q * overlap;
            }
        }
        let norm = v.norm();
        if norm > 0.5 {
            columns.push(v / c(norm, 0.0));
        }
    }
    debug_assert_eq!(columns.len(), total);

    // column (j, 0) holds the Kraus data; the completion fills the rest in order
    let mut unitary = ComplexMatrix::zeros(total, total);
    let mut extra = columns[d..].iter();
    for col_index in 0..total {
        let (j, n) = (col_index / m, col_index % m);
        let col = if n == 0 {
            &columns[j]
        } else {
            extra.next().expect("completion has d·(m−1) columns")
        };
        unitary.set_column(col_index, col);
    }

    Ok(Dilation {
        unitary,
        internal_dim: d,
        probe_dim: m,
    })
}
