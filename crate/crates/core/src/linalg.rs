//! Thin wrappers over nalgebra's symmetric eigensolver that return ascending
//! eigenpairs.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

/// Eigenpairs sorted by ascending eigenvalue; column `i` of `vectors` belongs
/// to `values[i]`.
#[derive(Clone, Debug)]
pub struct Eigh<T: nalgebra::Scalar> {
    pub values: Vec<f64>,
    pub vectors: DMatrix<T>,
}

fn sorted_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    order
}

pub fn eigh_real(m: DMatrix<f64>) -> Eigh<f64> {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let order = sorted_order(eig.eigenvalues.as_slice());
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Eigh { values, vectors }
}

pub fn eigh_complex(m: DMatrix<C64>) -> Eigh<C64> {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let order = sorted_order(eig.eigenvalues.as_slice());
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Eigh { values, vectors }
}
