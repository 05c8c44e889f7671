//! Divided-difference kernels in an eigenbasis.

use cmx::linalg::Mat;
use ndarray::{s, Array2};

use crate::spectral::phase_average;
use crate::C64;

/// Gaps at or below this between the outer eigenvalues of a second-order
/// kernel are treated pair by pair instead of through the quotient.
pub const NEAR: f64 = 1e-5;

/// `(start, end)` ranges of equal values in a sorted slice.
pub(crate) fn clusters(lam: &[f64]) -> Vec<(usize, usize)> {
    let mut out = vec![];
    let mut start = 0;
    while start < lam.len() {
        let mut end = start + 1;
        while end < lam.len() && lam[end] == lam[start] {
            end += 1;
        }
        out.push((start, end));
        start = end;
    }
    out
}

/// `Σ_b L_ab R_bc ψ(a, b, c)` for a second-order kernel `ψ` on
/// `(λ_a, γ_b, λ_c)`. Far pairs use `ψ = (P_ab - Q_bc)/(λ_a - λ_c)`, two
/// dense products in total; equal pairs use one product per cluster with
/// `equal(a, b) = ψ(a, b, a)`; remaining near pairs sum `near(a, b, c)`.
pub(crate) fn ordered_second(
    lam: &[f64],
    l: &Mat,
    r: &Mat,
    p: &Mat,
    q: &Mat,
    near: impl Fn(usize, usize, usize) -> C64,
    equal: impl Fn(usize, usize) -> C64,
) -> Mat {
    let n = lam.len();
    let mid = l.ncols();
    let left = hadamard(l, p).dot(r);
    let right = l.dot(&hadamard(q, r));
    let mut out = Array2::zeros((n, n));
    for a in 0..n {
        for c in 0..n {
            let d = lam[a] - lam[c];
            if d.abs() > NEAR {
                out[[a, c]] = (left[[a, c]] - right[[a, c]]) / d;
            } else if d != 0.0 {
                out[[a, c]] = (0..mid)
                    .map(|b| l[[a, b]] * r[[b, c]] * near(a, b, c))
                    .sum();
            }
        }
    }
    for (lo, hi) in clusters(lam) {
        let kappa: Vec<C64> = (0..mid).map(|b| equal(lo, b)).collect();
        let mut scaled = r.slice(s![.., lo..hi]).to_owned();
        for (b, mut row) in scaled.rows_mut().into_iter().enumerate() {
            row.mapv_inplace(|z| z * kappa[b]);
        }
        out.slice_mut(s![lo..hi, lo..hi])
            .assign(&l.slice(s![lo..hi, ..]).dot(&scaled));
    }
    out
}

/// `A ∘ B`.
pub fn hadamard(a: &Mat, b: &Mat) -> Mat {
    let mut out = a.clone();
    out.zip_mut_with(b, |x, y| *x *= *y);
    out
}

/// `(e^z - 1 - z)/z² = ∫_0^1 (1-s) e^{zs} ds` for imaginary `z = iδ`.
fn phi2(delta: f64) -> C64 {
    let z = C64::new(0.0, delta);
    if delta.abs() < 0.1 {
        let mut term = C64::new(0.5, 0.0);
        let mut acc = term;
        for k in 3..12 {
            term = term * z / k as f64;
            acc += term;
        }
        acc
    } else {
        (z.exp() - 1.0 - z) / (z * z)
    }
}

/// Divided differences of `g(x) = e^{ipx}`, in closed form.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ExpKernel {
    pub p: f64,
}

impl ExpKernel {
    /// `g[x, y] = ip ∫_0^1 e^{ip((1-u)x + uy)} du`.
    pub(crate) fn first(self, x: f64, y: f64) -> C64 {
        C64::new(0.0, self.p) * C64::from_polar(1.0, self.p * x) * phase_average(self.p * (y - x))
    }

    /// `g[x, x, y]`.
    pub(crate) fn double(self, x: f64, y: f64) -> C64 {
        -self.p * self.p * C64::from_polar(1.0, self.p * x) * phi2(self.p * (y - x))
    }

    /// `g[x, y, z]`, pivoting on the widest pair.
    pub(crate) fn second(self, x: f64, y: f64, z: f64) -> C64 {
        let pts = [x, y, z];
        let (i, j) = [(0, 1), (0, 2), (1, 2)]
            .into_iter()
            .max_by(|a, b| {
                (pts[a.0] - pts[a.1])
                    .abs()
                    .total_cmp(&(pts[b.0] - pts[b.1]).abs())
            })
            .expect("three pairs");
        let k = 3 - i - j;
        let gap = pts[i] - pts[j];
        if gap.abs() * self.p.abs() <= 1e-5 {
            // g″/2 at the mean; the linear Taylor term cancels.
            let mean = (x + y + z) / 3.0;
            return -0.5 * self.p * self.p * C64::from_polar(1.0, self.p * mean);
        }
        (self.first(pts[i], pts[k]) - self.first(pts[k], pts[j])) / gap
    }
}
