//! Small helpers over `nalgebra` for dense complex Hermitian algebra.
//!
//! Everything here operates on `DMatrix<Complex<f64>>`. Hermitian inputs are
//! re-symmetrized where float drift would otherwise accumulate, and positive
//! definite solves go through Cholesky so singularity surfaces as a typed
//! error instead of NaNs.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

/// Complex double-precision scalar used throughout the crate.
pub type C64 = Complex<f64>;

/// `e^{j·phase}` as a unit-modulus complex number.
#[inline]
pub fn cis(phase: f64) -> C64 {
    C64::new(phase.cos(), phase.sin())
}

/// Squared Frobenius norm (sum of `|a_ij|^2`).
#[inline]
pub fn frob_sq(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// Replace `m` with its Hermitian part `(m + m^H)/2`.
pub fn hermitize(m: &mut DMatrix<C64>) {
    let adj = m.adjoint();
    *m += adj;
    m.scale_mut(0.5);
}

/// Largest absolute deviation from Hermitian symmetry.
pub fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    let adj = m.adjoint();
    (m - adj).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Identity matrix of side `n`.
pub fn eye(n: usize) -> DMatrix<C64> {
    DMatrix::identity(n, n)
}

/// Eigendecomposition of a Hermitian matrix: `m = V diag(vals) V^H`.
///
/// Eigenvalues are real and returned in ascending order together with the
/// matching eigenvector columns.
pub fn herm_eigen(m: &DMatrix<C64>) -> (DVector<f64>, DMatrix<C64>) {
    let mut work = m.clone();
    hermitize(&mut work);
    let eig = work.symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vecs = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    (vals, vecs)
}

/// Solve `A X = B` for Hermitian positive definite `A` via Cholesky.
pub fn solve_hpd(a: &DMatrix<C64>, b: &DMatrix<C64>, what: &str) -> Result<DMatrix<C64>> {
    let mut work = a.clone();
    hermitize(&mut work);
    let chol = work
        .cholesky()
        .ok_or_else(|| Error::singular(format!("{what} is not positive definite")))?;
    Ok(chol.solve(b))
}

/// `ln det(A)` for Hermitian positive definite `A`.
pub fn lndet_hpd(a: &DMatrix<C64>, what: &str) -> Result<f64> {
    let mut work = a.clone();
    hermitize(&mut work);
    let chol = work
        .cholesky()
        .ok_or_else(|| Error::singular(format!("{what} is not positive definite")))?;
    let l = chol.l();
    let mut acc = 0.0;
    for i in 0..l.nrows() {
        let d = l[(i, i)].re;
        if d <= 0.0 || !d.is_finite() {
            return Err(Error::singular(format!("{what} has a non-positive pivot")));
        }
        acc += d.ln();
    }
    Ok(2.0 * acc)
}

/// Inverse of a Hermitian positive definite matrix, re-symmetrized.
pub fn inv_hpd(a: &DMatrix<C64>, what: &str) -> Result<DMatrix<C64>> {
    let n = a.nrows();
    let mut inv = solve_hpd(a, &eye(n), what)?;
    hermitize(&mut inv);
    Ok(inv)
}

/// `A^{-1/2}` for Hermitian positive definite `A`, via eigendecomposition.
pub fn inv_sqrt_hpd(a: &DMatrix<C64>, what: &str) -> Result<DMatrix<C64>> {
    let (vals, vecs) = herm_eigen(a);
    if vals.iter().any(|&v| v <= 0.0 || !v.is_finite()) {
        return Err(Error::singular(format!(
            "{what} has a non-positive eigenvalue"
        )));
    }
    let scaled = DMatrix::from_fn(vals.len(), vals.len(), |i, j| {
        if i == j {
            C64::new(1.0 / vals[i].sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let mut out = &vecs * scaled * vecs.adjoint();
    hermitize(&mut out);
    Ok(out)
}

/// `log2 det(I + C^{-1} A)` for Hermitian PD `C` and Hermitian PSD `A`,
/// computed as `(ln det(C + A) − ln det C) / ln 2`.
pub fn log2_det_ratio(c: &DMatrix<C64>, a: &DMatrix<C64>, what: &str) -> Result<f64> {
    let sum = c + a;
    Ok((lndet_hpd(&sum, what)? - lndet_hpd(c, what)?) / std::f64::consts::LN_2)
}

/// Real part of `tr(A B)`.
pub fn trace_product_re(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    // tr(AB) = sum_ij A_ij B_ji; avoids forming the product.
    let mut acc = 0.0;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
        DMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    fn random_hpd(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
        let a = random_matrix(n, rng);
        a.adjoint() * &a + eye(n).scale(0.1)
    }

    #[test]
    fn herm_eigen_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let m = random_hpd(6, &mut rng);
            let (vals, vecs) = herm_eigen(&m);
            let diag = DMatrix::from_fn(6, 6, |i, j| {
                if i == j {
                    C64::new(vals[i], 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            let rebuilt = &vecs * diag * vecs.adjoint();
            let err = (&rebuilt - &m).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(err < 1e-10, "reconstruction error {err}");
            for w in vals.as_slice().windows(2) {
                assert!(w[0] <= w[1], "eigenvalues not ascending");
            }
        }
    }

    #[test]
    fn solve_hpd_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random_hpd(5, &mut rng);
        let b = random_matrix(5, &mut rng);
        let x = solve_hpd(&a, &b, "test matrix").unwrap();
        let err = (&a * &x - &b).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "solve residual {err}");
    }

    #[test]
    fn lndet_matches_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_hpd(5, &mut rng);
        let (vals, _) = herm_eigen(&a);
        let expect: f64 = vals.iter().map(|v| v.ln()).sum();
        let got = lndet_hpd(&a, "test matrix").unwrap();
        assert!((got - expect).abs() < 1e-10);
    }

    #[test]
    fn inv_sqrt_sandwich() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let a = random_hpd(5, &mut rng);
        let s = inv_sqrt_hpd(&a, "test matrix").unwrap();
        let sandwich = &s * &a * s.adjoint();
        let err = (&sandwich - eye(5))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-10, "whitening residual {err}");
    }

    #[test]
    fn singular_matrix_is_reported() {
        let zero = DMatrix::<C64>::zeros(3, 3);
        assert!(matches!(
            lndet_hpd(&zero, "zero matrix"),
            Err(crate::error::Error::SingularMatrix(_))
        ));
    }

    #[test]
    fn trace_product_matches_full_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_matrix(4, &mut rng);
        let b = random_matrix(4, &mut rng);
        let full = (&a * &b).trace().re;
        assert!((trace_product_re(&a, &b) - full).abs() < 1e-12);
    }
}
