//! Dense complex linear algebra on top of ndarray + OpenBLAS/LAPACK.

use ndarray::{s, Array1, Array2, ArrayView2, ShapeBuilder};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::CmxError;

pub type Mat = Array2<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Blocks up to this size get a full SVD for the operator norm; larger ones
/// use power iteration.
pub const SVD_LIMIT: usize = 512;
const POWER_TOL: f64 = 1e-10;
const POWER_SEED: u64 = 0x5eed_0001;

pub fn adjoint(a: &ArrayView2<C64>) -> Mat {
    a.t().mapv(|z| z.conj())
}

pub fn identity(n: usize) -> Mat {
    Array2::from_diag_elem(n, ONE)
}

pub fn frobenius(a: &ArrayView2<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(a: &ArrayView2<C64>) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Largest singular value.
pub fn op_norm(a: &ArrayView2<C64>) -> f64 {
    let (r, c) = a.dim();
    if r == 0 || c == 0 {
        return 0.0;
    }
    if r == 1 || c == 1 {
        return frobenius(a);
    }
    if r.min(c) <= SVD_LIMIT {
        singular_values(a)
            .map(|s| s[0])
            .unwrap_or_else(|_| power_norm(a))
    } else {
        power_norm(a)
    }
}

/// Singular values in descending order (LAPACK `zgesvd`, no vectors).
pub fn singular_values(a: &ArrayView2<C64>) -> Result<Vec<f64>, CmxError> {
    let (m, n) = a.dim();
    let mut f = Array2::<C64>::zeros((m, n).f());
    f.assign(a);
    let (mi, ni) = (m as i32, n as i32);
    let k = m.min(n);
    let mut sv = vec![0.0; k];
    let mut rwork = vec![0.0; 5 * k];
    let mut info = 0;
    let mut lwork = -1i32;
    let mut work = vec![ZERO; 1];
    let mut dummy = [ZERO; 1];
    let one = 1i32;
    for pass in 0..2 {
        unsafe {
            lapack_sys::zgesvd_(
                b"N".as_ptr() as *const _,
                b"N".as_ptr() as *const _,
                &mi,
                &ni,
                f.as_mut_ptr() as *mut _,
                &mi,
                sv.as_mut_ptr(),
                dummy.as_mut_ptr() as *mut _,
                &one,
                dummy.as_mut_ptr() as *mut _,
                &one,
                work.as_mut_ptr() as *mut _,
                &lwork,
                rwork.as_mut_ptr(),
                &mut info,
            );
        }
        if info != 0 {
            return Err(CmxError::Lapack {
                routine: "zgesvd",
                info,
            });
        }
        if pass == 0 {
            lwork = work[0].re as i32;
            work = vec![ZERO; lwork.max(1) as usize];
        }
    }
    Ok(sv)
}

// Power iteration on A*A from a fixed-seed start vector.
fn power_norm(a: &ArrayView2<C64>) -> f64 {
    let n = a.ncols();
    let mut rng = ChaCha8Rng::seed_from_u64(POWER_SEED);
    let mut x: Array1<C64> = (0..n)
        .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let ah = a.t().mapv(|z| z.conj());
    let mut sigma = 0.0;
    for _ in 0..5000 {
        let nx = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nx == 0.0 {
            return 0.0;
        }
        x.mapv_inplace(|z| z / nx);
        let y = a.dot(&x);
        let next = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        x = ah.dot(&y);
        if (next - sigma).abs() <= POWER_TOL * next.max(1e-300) {
            return next;
        }
        sigma = next;
    }
    sigma
}

/// Eigendecomposition of a Hermitian matrix (`zheevd`, lower triangle):
/// ascending eigenvalues and unitary eigenvector columns.
pub fn eigh(a: &ArrayView2<C64>) -> Result<(Vec<f64>, Mat), CmxError> {
    let n = a.nrows();
    if n == 0 {
        return Ok((vec![], Array2::zeros((0, 0))));
    }
    let mut f = Array2::<C64>::zeros((n, n).f());
    f.assign(a);
    let ni = n as i32;
    let mut w = vec![0.0; n];
    let mut info = 0;
    let (mut lw, mut lrw, mut liw) = (-1i32, -1i32, -1i32);
    let mut work = vec![ZERO; 1];
    let mut rwork = vec![0.0; 1];
    let mut iwork = vec![0i32; 1];
    for pass in 0..2 {
        unsafe {
            lapack_sys::zheevd_(
                b"V".as_ptr() as *const _,
                b"L".as_ptr() as *const _,
                &ni,
                f.as_mut_ptr() as *mut _,
                &ni,
                w.as_mut_ptr(),
                work.as_mut_ptr() as *mut _,
                &lw,
                rwork.as_mut_ptr(),
                &lrw,
                iwork.as_mut_ptr(),
                &liw,
                &mut info,
            );
        }
        if info != 0 {
            return Err(CmxError::Lapack {
                routine: "zheevd",
                info,
            });
        }
        if pass == 0 {
            lw = work[0].re as i32;
            lrw = rwork[0] as i32;
            liw = iwork[0];
            work = vec![ZERO; lw.max(1) as usize];
            rwork = vec![0.0; lrw.max(1) as usize];
            iwork = vec![0; liw.max(1) as usize];
        }
    }
    let mut v = Array2::<C64>::zeros((n, n));
    v.assign(&f);
    Ok((w, v))
}

/// `V diag(d) V*`.
pub fn spectral_sum(v: &Mat, d: &[C64]) -> Mat {
    let mut vd = v.clone();
    for (mut col, &x) in vd.columns_mut().into_iter().zip(d) {
        col.mapv_inplace(|z| z * x);
    }
    vd.dot(&adjoint(&v.view()))
}

/// Seeded matrix with independent entries uniform in the unit square.
pub fn random_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> Mat {
    Array2::from_shape_simple_fn((rows, cols), || {
        C64::new(
            2.0 * rng.random::<f64>() - 1.0,
            2.0 * rng.random::<f64>() - 1.0,
        )
    })
}

pub fn random_hermitian(n: usize, rng: &mut impl Rng) -> Mat {
    let a = random_matrix(n, n, rng);
    (&a + &adjoint(&a.view())).mapv(|z| z * 0.5)
}

/// Top-left `rows x cols` corner.
pub fn corner(a: &Mat, rows: usize, cols: usize) -> Mat {
    a.slice(s![..rows, ..cols]).to_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn op_norm_of_diagonal() {
        let mut a = Array2::<C64>::zeros((3, 3));
        a[[0, 0]] = C64::new(1.0, 0.0);
        a[[1, 1]] = C64::new(0.0, -3.0);
        a[[2, 2]] = C64::new(2.0, 0.0);
        assert!((op_norm(&a.view()) - 3.0).abs() < 1e-14);
        assert!((power_norm(&a.view()) - 3.0).abs() < 1e-8);
    }

    #[test]
    fn power_iteration_agrees_with_svd() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(40, 25, &mut rng);
        let s = singular_values(&a.view()).unwrap()[0];
        assert!((power_norm(&a.view()) - s).abs() < 1e-7 * s);
    }

    #[test]
    fn eigh_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = random_hermitian(30, &mut rng);
        let (w, v) = eigh(&h.view()).unwrap();
        assert!(w.windows(2).all(|p| p[0] <= p[1]));
        let d: Vec<C64> = w.iter().map(|&x| C64::new(x, 0.0)).collect();
        let r = spectral_sum(&v, &d);
        assert!(max_abs(&(&r - &h).view()) < 1e-12);
        let u = adjoint(&v.view()).dot(&v);
        assert!(max_abs(&(&u - &identity(30)).view()) < 1e-12);
    }

    #[test]
    fn singular_values_of_rectangular() {
        let a =
            Array2::from_shape_vec((1, 2), vec![C64::new(3.0, 0.0), C64::new(0.0, 4.0)]).unwrap();
        assert!((op_norm(&a.view()) - 5.0).abs() < 1e-14);
        let b =
            Array2::from_shape_vec((2, 3), vec![ONE, ZERO, ZERO, ZERO, ONE * 2.0, ZERO]).unwrap();
        let s = singular_values(&b.view()).unwrap();
        assert!((s[0] - 2.0).abs() < 1e-14 && (s[1] - 1.0).abs() < 1e-14);
    }
}
