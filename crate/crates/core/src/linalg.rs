//! Hermitian factorizations and the optimal `S → T` transformation.

use nalgebra::{ComplexField, DMatrix, DVector, SymmetricEigen, SVD};

use crate::error::{Result, SudoqError};
use crate::scalar::{from_f64, to_f64, Real, C};

/// Eigenvalues below `-NEGATIVE_TOLERANCE · max(1, λ_max)` mean "not PSD"
/// (floored at a small multiple of machine epsilon for `f32`).
pub const NEGATIVE_TOLERANCE: f64 = 1e-9;

/// Support of a PSD matrix: an orthonormal basis of its range and the square
/// roots of the matching eigenvalues.
#[derive(Clone, Debug)]
pub struct PsdFactor<R: Real> {
    dim: usize,
    /// `dim × rank`, orthonormal columns.
    basis: DMatrix<C<R>>,
    sqrt_eigenvalues: DVector<R>,
}

impl<R: Real> PsdFactor<R> {
    /// Eigendecomposes the Hermitian part of `m`; eigenvalues at or below
    /// `rank_tol · λ_max` are dropped.
    pub fn new(m: &DMatrix<C<R>>, rank_tol: f64) -> Result<Self> {
        let dim = m.nrows();
        assert_eq!(dim, m.ncols(), "square matrix expected");
        let half = from_f64::<R>(0.5);
        let mut hermitian = (m + m.adjoint()).map(|z| z * half);
        let eps = R::default_epsilon();
        // Entries below eps² of the largest one cannot move any eigenvalue at
        // working precision, but their squares underflow inside the QR sweeps.
        let largest = hermitian.iter().map(|z| z.modulus()).fold(R::zero(), |a, b| a.max(b));
        let flush = largest * eps * eps;
        hermitian.apply(|z| {
            if z.modulus() < flush {
                *z = C::new(R::zero(), R::zero());
            }
        });
        let eig = SymmetricEigen::new(hermitian);
        if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(SudoqError::NotPsd(f64::NAN));
        }
        let max = eig.eigenvalues.iter().copied().fold(R::zero(), |a, b| a.max(b));
        let min = eig.eigenvalues.iter().copied().fold(R::zero(), |a, b| a.min(b));
        let floor = from_f64::<R>(NEGATIVE_TOLERANCE).max(eps * from_f64(100.0)) * max.max(R::one());
        if min < -floor {
            return Err(SudoqError::NotPsd(to_f64(min)));
        }
        let cutoff = from_f64::<R>(rank_tol).max(eps * from_f64(10.0)) * max;
        let keep: Vec<usize> = (0..dim)
            .filter(|&i| eig.eigenvalues[i] > cutoff && eig.eigenvalues[i] > R::zero())
            .collect();
        let basis = DMatrix::from_fn(dim, keep.len(), |r, k| eig.eigenvectors[(r, keep[k])]);
        let sqrt_eigenvalues = DVector::from_iterator(keep.len(), keep.iter().map(|&i| eig.eigenvalues[i].sqrt()));
        Ok(PsdFactor {
            dim,
            basis,
            sqrt_eigenvalues,
        })
    }

    pub fn rank(&self) -> usize {
        self.sqrt_eigenvalues.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &DMatrix<C<R>> {
        &self.basis
    }

    /// Orthogonal projector onto the support.
    pub fn support_projector(&self) -> DMatrix<C<R>> {
        &self.basis * self.basis.adjoint()
    }

    /// `M^{1/2}`.
    pub fn sqrt(&self) -> DMatrix<C<R>> {
        self.spectral(|s| s)
    }

    /// Pseudo-inverse square root `M^{+1/2}`.
    pub fn pinv_sqrt(&self) -> DMatrix<C<R>> {
        self.spectral(|s| R::one() / s)
    }

    fn spectral(&self, f: impl Fn(R) -> R) -> DMatrix<C<R>> {
        let mut scaled = self.basis.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            let w = f(self.sqrt_eigenvalues[k]);
            col.iter_mut().for_each(|z| *z = z.scale(w));
        }
        scaled * self.basis.adjoint()
    }
}

/// Transformation `R` with `R S R* = T`, built as `T^{1/2} U S^{+1/2}` where `U`
/// is the polar partial isometry of `T^{1/2} S^{1/2}` between the two supports.
/// When `S = T` it is the projector onto the support, i.e. the identity there.
pub fn optimal_transformation<R: Real>(s: &DMatrix<C<R>>, t: &DMatrix<C<R>>, rank_tol: f64) -> Result<DMatrix<C<R>>> {
    let source = PsdFactor::new(s, rank_tol)?;
    let target = PsdFactor::new(t, rank_tol)?;
    transformation_between(&source, &target)
}

/// [`optimal_transformation`] from precomputed factors.
pub fn transformation_between<R: Real>(source: &PsdFactor<R>, target: &PsdFactor<R>) -> Result<DMatrix<C<R>>> {
    let rank = source.rank();
    if rank != target.rank() {
        return Err(SudoqError::RankMismatch {
            source_rank: rank,
            target_rank: target.rank(),
        });
    }
    let dim = source.dim();
    if rank == 0 {
        return Ok(DMatrix::zeros(dim, dim));
    }
    // Restricted to the supports, T^{1/2} S^{1/2} becomes
    // K = diag(√μ) B_T* B_S diag(√λ); its polar factor W V* is completed to a
    // full unitary on the rank-r core even when K is singular.
    let mut core = target.basis.adjoint() * &source.basis;
    for (i, mut row) in core.row_iter_mut().enumerate() {
        let w = target.sqrt_eigenvalues[i];
        row.iter_mut().for_each(|z| *z = z.scale(w));
    }
    for (j, mut col) in core.column_iter_mut().enumerate() {
        let w = source.sqrt_eigenvalues[j];
        col.iter_mut().for_each(|z| *z = z.scale(w));
    }
    let svd = SVD::new(core, true, true);
    let polar = svd.u.expect("requested u") * svd.v_t.expect("requested v_t");
    // R = B_T diag(√μ) (W V*) diag(1/√λ) B_S*
    let mut left = target.basis.clone();
    for (k, mut col) in left.column_iter_mut().enumerate() {
        let w = target.sqrt_eigenvalues[k];
        col.iter_mut().for_each(|z| *z = z.scale(w));
    }
    let mut right = source.basis.adjoint();
    for (k, mut row) in right.row_iter_mut().enumerate() {
        let w = R::one() / source.sqrt_eigenvalues[k];
        row.iter_mut().for_each(|z| *z = z.scale(w));
    }
    Ok(left * polar * right)
}

/// `Σ |x⟩⟨x|` over the given vectors.
pub fn projector_sum<'a, R: Real>(dim: usize, vectors: impl IntoIterator<Item = &'a DVector<C<R>>>) -> DMatrix<C<R>> {
    let mut sum = DMatrix::zeros(dim, dim);
    for v in vectors {
        sum.ger(
            C::new(R::one(), R::zero()),
            v,
            &v.conjugate(),
            C::new(R::one(), R::zero()),
        );
    }
    sum
}

/// `‖I - Σ |x⟩⟨x|‖_F`.
pub fn identity_residual<'a, R: Real>(dim: usize, vectors: impl IntoIterator<Item = &'a DVector<C<R>>>) -> R {
    let mut sum = projector_sum(dim, vectors);
    for i in 0..dim {
        sum[(i, i)] -= C::new(R::one(), R::zero());
    }
    sum.norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn diag(values: &[f64]) -> DMatrix<C<f64>> {
        DMatrix::from_diagonal(&DVector::from_iterator(values.len(), values.iter().map(|&v| c(v, 0.0))))
    }

    fn random_psd(rng: &mut ChaCha8Rng, dim: usize, rank: usize) -> DMatrix<C<f64>> {
        let x = DMatrix::from_fn(dim, rank, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        &x * x.adjoint()
    }

    #[test]
    fn identity_on_equal_projectors() {
        let s = diag(&[1.0, 1.0, 0.0, 0.0]);
        let r = optimal_transformation(&s, &s, 1e-12).unwrap();
        let err = (&r * &s - &s).norm();
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn scalar_case() {
        let s = diag(&[2.0, 0.0, 0.0, 0.0]);
        let t = diag(&[1.0, 0.0, 0.0, 0.0]);
        let r = optimal_transformation(&s, &t, 1e-12).unwrap();
        assert!((r[(0, 0)] - c(0.5f64.sqrt(), 0.0)).norm() < 1e-14);
        assert!((&r * &s * r.adjoint() - &t).norm() < 1e-14);
    }

    #[test]
    fn rank_and_psd_errors() {
        let s = diag(&[1.0, 0.0, 0.0, 0.0]);
        let t = diag(&[1.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            optimal_transformation(&s, &t, 1e-12),
            Err(SudoqError::RankMismatch {
                source_rank: 1,
                target_rank: 2
            })
        ));
        let bad = diag(&[1.0, -0.5, 0.0, 0.0]);
        assert!(matches!(
            optimal_transformation(&s, &bad, 1e-12),
            Err(SudoqError::NotPsd(_))
        ));
    }

    #[test]
    fn random_pairs_are_mapped() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let s = random_psd(&mut rng, 4, 3);
            let t = random_psd(&mut rng, 4, 3);
            let r = optimal_transformation(&s, &t, 1e-12).unwrap();
            let rel = (&r * &s * r.adjoint() - &t).norm() / t.norm();
            assert!(rel < 1e-9, "{rel}");
        }
    }

    #[test]
    fn orthogonal_supports_still_map() {
        // K is singular here: supp S ⟂ supp T.
        let s = diag(&[1.0, 0.0, 0.0, 0.0]);
        let t = diag(&[0.0, 3.0, 0.0, 0.0]);
        let r = optimal_transformation(&s, &t, 1e-12).unwrap();
        assert!((&r * &s * r.adjoint() - &t).norm() < 1e-12);
    }

    #[test]
    fn scaling_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = random_psd(&mut rng, 4, 2);
        let t = random_psd(&mut rng, 4, 2);
        let r = optimal_transformation(&s, &t, 1e-12).unwrap();
        let r4 = optimal_transformation(&s.scale(4.0), &t, 1e-12).unwrap();
        let p = PsdFactor::new(&s, 1e-12).unwrap().support_projector();
        assert!((&r4 * &p - (&r * &p).scale(0.5)).norm() < 1e-10);
    }

    #[test]
    fn tiny_entries_do_not_break_the_eigensolver() {
        // shape seen near convergence: a rank-2 projector plus entries near 1e-68 and 1e-136
        let mut s = diag(&[
            6.5e-17, 1.0, 1.0, 1.6e-135, 2.1e-135, 9.8e-136, 2.1e-136, 1.3e-135, 6.6e-136,
        ]);
        s[(0, 1)] = c(6.7e-9, 2.1e-9);
        s[(1, 0)] = s[(0, 1)].conj();
        for i in 3..9 {
            for j in 3..9 {
                if i != j {
                    s[(i, j)] = c(3e-136 * (i as f64 - j as f64), 1e-136 * (i + j) as f64);
                    s[(j, i)] = s[(i, j)].conj();
                }
            }
            s[(1, i)] = c(2e-68, -1.7e-68);
            s[(i, 1)] = s[(1, i)].conj();
        }
        let factor = PsdFactor::new(&s, 1e-12).unwrap();
        assert_eq!(factor.rank(), 2);
        let r = optimal_transformation(&s, &diag(&[0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]), 1e-12).unwrap();
        assert!(r.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
    }

    #[test]
    fn works_in_single_precision() {
        let s = DMatrix::<C<f32>>::from_diagonal_element(3, 3, C::new(2.0, 0.0));
        let t = DMatrix::<C<f32>>::identity(3, 3);
        let r = optimal_transformation(&s, &t, 1e-6).unwrap();
        assert!((&r * &s * r.adjoint() - &t).norm() < 1e-5);
    }

    #[test]
    fn residual_of_basis() {
        let basis: Vec<DVector<C<f64>>> = (0..3)
            .map(|k| DVector::from_fn(3, |i, _| if i == k { c(1.0, 0.0) } else { c(0.0, 0.0) }))
            .collect();
        assert!(identity_residual(3, basis.iter()) < 1e-15);
        assert!((identity_residual::<f64>(3, std::iter::empty()) - 3f64.sqrt()).abs() < 1e-15);
    }
}
