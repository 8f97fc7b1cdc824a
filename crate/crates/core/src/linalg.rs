//! Small dense complex linear algebra used throughout the crate.
//!
//! Qubit 0 is the most significant bit of a basis index, so the full-space
//! operator for `A` on qubit 0 and `B` on qubit 1 is `A ⊗ B`.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

pub type Mat2 = Matrix2<Complex64>;
pub type Matrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Bit of `qubit` inside basis index `index` for an `n`-qubit register.
#[inline]
pub fn bit(index: usize, qubit: usize, n: usize) -> usize {
    (index >> (n - 1 - qubit)) & 1
}

#[inline]
pub fn mask(qubit: usize, n: usize) -> usize {
    1 << (n - 1 - qubit)
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    Matrix::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

pub fn mat2_to_dense(m: &Mat2) -> Matrix {
    Matrix::from_fn(2, 2, |i, j| m[(i, j)])
}

/// Embeds a single-qubit operator acting on `qubit` into the `n`-qubit space.
pub fn embed_single(m: &Mat2, qubit: usize, n: usize) -> Matrix {
    let dim = 1usize << n;
    let bit_mask = mask(qubit, n);
    Matrix::from_fn(dim, dim, |i, j| {
        if (i & !bit_mask) != (j & !bit_mask) {
            ZERO
        } else {
            m[(bit(i, qubit, n), bit(j, qubit, n))]
        }
    })
}

/// Full-space CNOT permutation matrix.
pub fn cnot_matrix(control: usize, target: usize, n: usize) -> Matrix {
    let dim = 1usize << n;
    let mut out = Matrix::zeros(dim, dim);
    for j in 0..dim {
        let i = if bit(j, control, n) == 1 {
            j ^ mask(target, n)
        } else {
            j
        };
        out[(i, j)] = ONE;
    }
    out
}

/// Left-multiplies `m` (an operator on the full register) by the single-qubit
/// operator `u` acting on `qubit`, in place.
pub fn apply_single_left(m: &mut Matrix, u: &Mat2, qubit: usize, n: usize) {
    let bit_mask = mask(qubit, n);
    let cols = m.ncols();
    for i0 in 0..(1usize << n) {
        if i0 & bit_mask != 0 {
            continue;
        }
        let i1 = i0 | bit_mask;
        for col in 0..cols {
            let a = m[(i0, col)];
            let b = m[(i1, col)];
            m[(i0, col)] = u[(0, 0)] * a + u[(0, 1)] * b;
            m[(i1, col)] = u[(1, 0)] * a + u[(1, 1)] * b;
        }
    }
}

/// Right-multiplies `m` by `u†` with `u` acting on `qubit`, in place.
pub fn apply_single_right_adjoint(m: &mut Matrix, u: &Mat2, qubit: usize, n: usize) {
    let bit_mask = mask(qubit, n);
    let rows = m.nrows();
    let ud = u.adjoint();
    for j0 in 0..(1usize << n) {
        if j0 & bit_mask != 0 {
            continue;
        }
        let j1 = j0 | bit_mask;
        for row in 0..rows {
            let a = m[(row, j0)];
            let b = m[(row, j1)];
            m[(row, j0)] = a * ud[(0, 0)] + b * ud[(1, 0)];
            m[(row, j1)] = a * ud[(0, 1)] + b * ud[(1, 1)];
        }
    }
}

/// Applies a CNOT permutation to the rows of `m`.
pub fn apply_cnot_rows(m: &mut Matrix, control: usize, target: usize, n: usize) {
    let (cm, tm) = (mask(control, n), mask(target, n));
    for i in 0..(1usize << n) {
        if i & cm != 0 && i & tm == 0 {
            m.swap_rows(i, i | tm);
        }
    }
}

/// Applies a CNOT permutation to the columns of `m` (right-multiplication by CNOT† = CNOT).
pub fn apply_cnot_cols(m: &mut Matrix, control: usize, target: usize, n: usize) {
    let (cm, tm) = (mask(control, n), mask(target, n));
    for j in 0..(1usize << n) {
        if j & cm != 0 && j & tm == 0 {
            m.swap_columns(j, j | tm);
        }
    }
}

/// `exp(i * t * h)` for Hermitian `h`, by eigendecomposition.
pub fn expm_i_hermitian(h: &Matrix, t: f64) -> Matrix {
    let eig = h.clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = Matrix::from_diagonal(&eig.eigenvalues.map(|lam| Complex64::from_polar(1.0, lam * t)));
    v * phases * v.adjoint()
}

pub fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Deviation of `u†u` from the identity.
pub fn unitarity_error(u: &Matrix) -> f64 {
    let id = Matrix::identity(u.nrows(), u.ncols());
    max_abs_diff(&(u.adjoint() * u), &id)
}

/// Largest elementwise deviation between `a` and `e^{iφ} b`, where the phase is
/// fixed by the largest-modulus entry of `b`.
pub fn phase_aligned_distance(a: &Matrix, b: &Matrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    let (idx, _) = b
        .iter()
        .enumerate()
        .fold((0, -1.0), |best, (k, z)| if z.norm() > best.1 { (k, z.norm()) } else { best });
    let (ra, rb) = (a.as_slice()[idx], b.as_slice()[idx]);
    if ra.norm() == 0.0 {
        return a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max).max(rb.norm());
    }
    let phase = (ra / rb) / (ra / rb).norm();
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - phase * y).norm())
        .fold(0.0, f64::max)
}

pub fn mat2_phase_aligned_distance(a: &Mat2, b: &Mat2) -> f64 {
    phase_aligned_distance(&mat2_to_dense(a), &mat2_to_dense(b))
}

pub fn trace(m: &Matrix) -> Complex64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> Mat2 {
        Mat2::new(ZERO, ONE, ONE, ZERO)
    }

    #[test]
    fn embed_matches_kron() {
        let id = Matrix::identity(2, 2);
        let xm = mat2_to_dense(&x());
        let expected = kron(&kron(&id, &xm), &id);
        assert!(max_abs_diff(&embed_single(&x(), 1, 3), &expected) < 1e-15);
    }

    #[test]
    fn in_place_application_matches_dense() {
        let n = 3;
        let u = Mat2::new(c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.8), c(0.6, 0.0));
        let m0 = Matrix::from_fn(8, 8, |i, j| c(i as f64 + 0.5 * j as f64, (i * j) as f64 * 0.1));
        let dense = embed_single(&u, 2, n);
        let mut m = m0.clone();
        apply_single_left(&mut m, &u, 2, n);
        apply_single_right_adjoint(&mut m, &u, 2, n);
        assert!(max_abs_diff(&m, &(&dense * &m0 * dense.adjoint())) < 1e-12);

        let cx = cnot_matrix(2, 0, n);
        let mut m = m0.clone();
        apply_cnot_rows(&mut m, 2, 0, n);
        apply_cnot_cols(&mut m, 2, 0, n);
        assert!(max_abs_diff(&m, &(&cx * &m0 * &cx)) < 1e-12);
    }

    #[test]
    fn hermitian_exponential_of_pauli() {
        let h = mat2_to_dense(&x());
        let u = expm_i_hermitian(&h, 0.3);
        let expected = Matrix::from_fn(2, 2, |i, j| {
            if i == j {
                real(0.3f64.cos())
            } else {
                c(0.0, 0.3f64.sin())
            }
        });
        assert!(max_abs_diff(&u, &expected) < 1e-14);
    }

    #[test]
    fn phase_alignment_ignores_global_phase() {
        let a = mat2_to_dense(&x());
        let b = a.map(|z| z * Complex64::from_polar(1.0, 1.234));
        assert!(phase_aligned_distance(&a, &b) < 1e-15);
        assert!(phase_aligned_distance(&a, &Matrix::identity(2, 2)) > 0.5);
    }
}
