//! Dense complex kernels.
//!
//! Singular value decompositions go through faer: the nalgebra 0.35 SVD loses accuracy
//! on the sparse frame matrices of grid covers (reconstruction errors up to `0.4` were
//! observed), while QR-based checks on the same matrices are exact to `1e-14`.

use faer::Mat;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::Zero;

fn to_faer(a: &DMatrix<Complex64>) -> Mat<Complex64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

/// Smallest singular value of `a` (at least as many rows as columns) and a unit right
/// singular vector.
pub(crate) fn smallest_right(a: &DMatrix<Complex64>) -> (f64, Vec<Complex64>) {
    let n = a.ncols();
    let svd = to_faer(a).thin_svd().expect("svd converges");
    let s = svd.S().column_vector();
    let i = (0..n).min_by(|&x, &y| s[x].re.total_cmp(&s[y].re)).expect("nonempty");
    let v = svd.V();
    (s[i].re, (0..n).map(|j| v[(j, i)]).collect())
}

/// Minimum-norm least-squares solution of `a x = b`, dropping singular values below
/// `rel_cut * sigma_max`.
pub(crate) fn lstsq(a: &DMatrix<Complex64>, b: &DVector<Complex64>, rel_cut: f64) -> Option<DVector<Complex64>> {
    let (m, n) = a.shape();
    let svd = to_faer(a).thin_svd().ok()?;
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    let k = m.min(n);
    let smax = (0..k).map(|i| s[i].re).fold(0.0, f64::max);
    let mut x = DVector::from_element(n, Complex64::zero());
    for i in 0..k {
        if !(s[i].re > rel_cut * smax) {
            continue;
        }
        let c = (0..m).map(|r| u[(r, i)].conj() * b[r]).sum::<Complex64>() / s[i].re;
        for j in 0..n {
            x[j] += v[(j, i)] * c;
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DMatrix<Complex64> {
        DMatrix::from_fn(m, n, |_, _| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
    }

    #[test]
    fn smallest_matches_gram_eigenvalue() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let a = random(&mut rng, 12, 6);
            let (s, v) = smallest_right(&a);
            let lam = (a.adjoint() * &a).symmetric_eigen().eigenvalues.min();
            assert!((s - lam.sqrt()).abs() < 1e-12);
            let av = &a * DVector::from_vec(v.clone());
            assert!((av.norm() - s).abs() < 1e-12);
            assert!((DVector::from_vec(v).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lstsq_recovers_consistent_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random(&mut rng, 20, 8);
        let x0 = DVector::from_fn(8, |_, _| Complex64::new(rng.random::<f64>(), rng.random::<f64>()));
        let x = lstsq(&a, &(&a * &x0), 1e-14).unwrap();
        assert!((x - x0).norm() < 1e-12);
    }

    #[test]
    fn sparse_incidence_matrix_is_exact() {
        // shape of a 4x4 grid frame matrix, where the nalgebra SVD fails
        let m = 4;
        let nv = m * m;
        let mut a = DMatrix::from_element(4 * nv, nv, Complex64::zero());
        let tau = Complex64::new(0.0, 0.054);
        let mut row = 0;
        for v in 0..nv {
            let (x, y) = (v % m, v / m);
            for w in [
                ((x + 1) % m) + y * m,
                x + ((y + 1) % m) * m,
                ((x + 1) % m) + ((y + 1) % m) * m,
                ((x + m - 1) % m) + ((y + 1) % m) * m,
            ] {
                a[(row, w)] += Complex64::new(1.0, 0.0) + tau * (row % 3) as f64;
                a[(row, v)] -= Complex64::new(1.0, 0.0);
                row += 1;
            }
        }
        let x0 = DVector::from_fn(nv, |j, _| Complex64::new(j as f64 * 0.1, 1.0 - j as f64 * 0.05));
        let b = &a * &x0;
        let x = lstsq(&a, &b, 1e-14).unwrap();
        assert!((&a * &x - &b).norm() < 1e-12 * b.norm());
    }
}
