//! Dense complex linear algebra and FFT kernels shared by the whole chain.
//!
//! Everything here is sized for space-time-range dimensions up to a few
//! hundred (MNK = 512 at full scale), so plain dense storage and
//! O(n^3) factorizations are the right tool. The Kronecker structure of the
//! covariance matrices is deliberately not exploited.

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::{C64, Error, Result};

// ── Vector helpers ──────────────────────────────────────────────────────────

/// Inner product `<a, b> = Σ conj(a_i) b_i`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Squared Euclidean norm.
pub fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// Unit phasor `exp(j 2π x)` with the argument reduced modulo 1 first, so
/// large cycle counts (for example carrier-times-delay products) keep full
/// phase precision.
pub fn phasor(cycles: f64) -> C64 {
    let frac = cycles - cycles.round();
    Complex::from_polar(1.0, std::f64::consts::TAU * frac)
}

/// Kronecker product of two vectors (`a ⊗ b`).
pub fn kron(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

/// Three-factor Kronecker product `a ⊗ b ⊗ c`.
pub fn kron3(a: &[C64], b: &[C64], c: &[C64]) -> Vec<C64> {
    kron(a, &kron(b, c))
}

// ── Dense matrices ──────────────────────────────────────────────────────────

/// Dense square complex matrix, row major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    dim: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex::default(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::new(1.0, 0.0);
        }
        m
    }

    pub fn scaled_identity(dim: usize, s: f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::new(s, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    /// `self += weight * col * colᴴ`.
    pub fn add_outer(&mut self, col: &[C64], weight: f64) {
        debug_assert_eq!(col.len(), self.dim);
        let n = self.dim;
        for i in 0..n {
            let wi = col[i] * weight;
            let row = &mut self.data[i * n..(i + 1) * n];
            for (j, r) in row.iter_mut().enumerate() {
                *r += wi * col[j].conj();
            }
        }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        debug_assert_eq!(x.len(), self.dim);
        let n = self.dim;
        (0..n)
            .map(|i| {
                let row = &self.data[i * n..(i + 1) * n];
                row.iter().zip(x).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    /// Real part of the trace.
    pub fn trace_re(&self) -> f64 {
        (0..self.dim).map(|i| self[(i, i)].re).sum()
    }

    /// Maximum deviation from Hermitian symmetry, relative to the largest
    /// entry magnitude.
    pub fn asymmetry(&self) -> f64 {
        let scale = self.data.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst / scale
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Hermitian matrix with symmetry checked at construction.
#[derive(Debug, Clone)]
pub struct HermitianMatrix {
    mat: CMat,
}

impl HermitianMatrix {
    /// Tolerance on relative asymmetry accepted at construction.
    pub const ASYMMETRY_TOL: f64 = 1e-12;

    pub fn new(mat: CMat) -> Result<Self> {
        let asym = mat.asymmetry();
        if asym >= Self::ASYMMETRY_TOL {
            return Err(Error::NotHermitian { asymmetry: asym });
        }
        Ok(Self { mat })
    }

    /// Builds `Σ w_i c_i c_iᴴ + diag_power I`, which is Hermitian by
    /// construction (no symmetry check needed).
    pub fn from_outer_products(dim: usize, cols: &[Vec<C64>], weights: &[f64], diag_power: f64) -> Self {
        debug_assert_eq!(cols.len(), weights.len());
        let mut m = CMat::scaled_identity(dim, diag_power);
        for (c, &w) in cols.iter().zip(weights) {
            m.add_outer(c, w);
        }
        Self { mat: m }
    }

    /// Wraps a matrix that is Hermitian up to rounding, averaging the
    /// conjugate pairs instead of scanning for asymmetry.
    pub fn symmetrized(mut m: CMat) -> Self {
        let n = m.dim();
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                m[(i, j)] = avg;
                m[(j, i)] = avg.conj();
            }
            let d = m[(i, i)].re;
            m[(i, i)] = Complex::new(d, 0.0);
        }
        Self { mat: m }
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn as_mat(&self) -> &CMat {
        &self.mat
    }

    pub fn trace_re(&self) -> f64 {
        self.mat.trace_re()
    }

    /// Real quadratic form `xᴴ A x`.
    pub fn quad_form(&self, x: &[C64]) -> f64 {
        inner(x, &self.mat.matvec(x)).re
    }

    /// Cholesky factorization of `A + loading·I`.
    pub fn cholesky(&self, loading: f64) -> Result<CholeskyFactor> {
        CholeskyFactor::new(&self.mat, loading)
    }

    /// Smallest eigenvalue lower bound check: returns true when
    /// `A + shift·I` admits a Cholesky factorization, i.e. all eigenvalues
    /// exceed `-shift`.
    pub fn is_psd_within(&self, shift: f64) -> bool {
        CholeskyFactor::new(&self.mat, shift).is_ok()
    }
}

/// Lower-triangular Cholesky factor of a Hermitian positive-definite matrix.
pub struct CholeskyFactor {
    dim: usize,
    l: Vec<C64>,
    loading: f64,
}

impl CholeskyFactor {
    fn new(a: &CMat, loading: f64) -> Result<Self> {
        let n = a.dim();
        let mut l = a.data().to_vec();
        for i in 0..n {
            l[i * n + i] += loading;
        }
        for j in 0..n {
            for k in 0..j {
                let ljk = l[j * n + k];
                let s = ljk.norm_sqr();
                l[j * n + j] -= s;
            }
            let djj = l[j * n + j].re;
            if djj <= 0.0 || !djj.is_finite() {
                return Err(Error::NotPositiveDefinite { loaded: loading > 0.0 });
            }
            let root = djj.sqrt();
            l[j * n + j] = Complex::new(root, 0.0);
            for i in (j + 1)..n {
                let mut s = l[i * n + j];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / root;
            }
        }
        // zero the strict upper triangle so the factor is self-describing
        for i in 0..n {
            for j in (i + 1)..n {
                l[i * n + j] = Complex::default();
            }
        }
        Ok(Self { dim: n, l, loading })
    }

    pub fn loading(&self) -> f64 {
        self.loading
    }

    /// Solves `(A + loading·I) x = b`.
    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.dim;
        debug_assert_eq!(b.len(), n);
        let mut y = b.to_vec();
        // forward: L y = b
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[i * n + k] * y[k];
            }
            y[i] = s / self.l[i * n + i].re;
        }
        // backward: Lᴴ x = y
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= self.l[k * n + i].conj() * y[k];
            }
            y[i] = s / self.l[i * n + i].re;
        }
        y
    }
}

/// Solves `(A + loading·I) x = b` for Hermitian positive-definite `A`.
pub fn hermitian_solve(a: &HermitianMatrix, b: &[C64], loading: f64) -> Result<Vec<C64>> {
    if b.len() != a.dim() {
        return Err(Error::DimensionMismatch {
            context: format!("solve rhs length {} vs matrix dim {}", b.len(), a.dim()),
        });
    }
    Ok(a.cholesky(loading)?.solve(b))
}

// ── Dirichlet kernel ────────────────────────────────────────────────────────

/// Dirichlet kernel `sin(nπx)/sin(πx)`, the array factor of an `n`-element
/// uniform sum of phasors. At integer `x` the removable singularity takes
/// its limit `n·(-1)^{x(n-1)}`.
pub fn dirichlet(n: usize, x: f64) -> f64 {
    let nf = n as f64;
    let den = (std::f64::consts::PI * x).sin();
    if den.abs() < 1e-12 {
        let l = x.round() as i64;
        let sign = if (l * (n as i64 - 1)).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        return nf * sign;
    }
    (nf * std::f64::consts::PI * x).sin() / den
}

// ── FFT helpers ─────────────────────────────────────────────────────────────

fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}

/// Forward FFT of length `data.len()` (in place planner call, new buffer).
pub fn fft(data: &[C64]) -> Vec<C64> {
    let mut buf = data.to_vec();
    FftPlanner::new().plan_fft_forward(buf.len()).process(&mut buf);
    buf
}

/// Inverse FFT, normalized by `1/len`.
pub fn ifft(data: &[C64]) -> Vec<C64> {
    let mut buf = data.to_vec();
    FftPlanner::new().plan_fft_inverse(buf.len()).process(&mut buf);
    let scale = 1.0 / buf.len() as f64;
    for z in &mut buf {
        *z *= scale;
    }
    buf
}

/// Linear convolution of `a` and `b` via zero-padded FFT.
/// Output length is `a.len() + b.len() - 1`.
pub fn fft_convolve(a: &[C64], b: &[C64]) -> Vec<C64> {
    let out_len = a.len() + b.len() - 1;
    let n = next_pow2(out_len);
    let mut fa = a.to_vec();
    fa.resize(n, Complex::default());
    let mut fb = b.to_vec();
    fb.resize(n, Complex::default());
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    planner.plan_fft_inverse(n).process(&mut fa);
    let scale = 1.0 / n as f64;
    fa.truncate(out_len);
    for z in &mut fa {
        *z *= scale;
    }
    fa
}

/// Direct O(n^2) convolution, kept as the independent reference for
/// [`fft_convolve`].
pub fn direct_convolve(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![Complex::default(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn random_vec(rng: &mut impl Rng, n: usize) -> Vec<C64> {
        (0..n).map(|_| Complex::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect()
    }

    fn random_pd(rng: &mut impl Rng, n: usize) -> HermitianMatrix {
        let cols: Vec<Vec<C64>> = (0..2 * n).map(|_| random_vec(rng, n)).collect();
        let weights = vec![1.0; cols.len()];
        HermitianMatrix::from_outer_products(n, &cols, &weights, 0.1)
    }

    #[test]
    fn solve_identity_returns_rhs() {
        let a = HermitianMatrix::new(CMat::identity(5)).unwrap();
        let b = vec![Complex::new(1.0, -2.0); 5];
        let x = hermitian_solve(&a, &b, 0.0).unwrap();
        for (xi, bi) in x.iter().zip(&b) {
            assert!((xi - bi).norm() < 1e-14);
        }
    }

    #[test]
    fn solve_diagonal_is_elementwise_division() {
        let mut m = CMat::zeros(4);
        for i in 0..4 {
            m[(i, i)] = Complex::new((i + 1) as f64, 0.0);
        }
        let a = HermitianMatrix::new(m).unwrap();
        let b = vec![Complex::new(2.0, 2.0); 4];
        let x = hermitian_solve(&a, &b, 0.0).unwrap();
        for i in 0..4 {
            let expect = b[i] / (i + 1) as f64;
            assert!((x[i] - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn solve_residual_small_on_random_pd() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for _ in 0..5 {
            let a = random_pd(&mut rng, 64);
            let b = random_vec(&mut rng, 64);
            let x = hermitian_solve(&a, &b, 0.0).unwrap();
            let r: Vec<C64> = a.as_mat().matvec(&x).iter().zip(&b).map(|(ax, bi)| ax - bi).collect();
            let rel = norm_sqr(&r).sqrt() / norm_sqr(&b).sqrt();
            assert!(rel <= 1e-10, "residual {rel}");
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let mut m = CMat::identity(3);
        m[(2, 2)] = Complex::new(-1.0, 0.0);
        let a = HermitianMatrix::new(m).unwrap();
        assert!(matches!(a.cholesky(0.0), Err(Error::NotPositiveDefinite { .. })));
        // enough loading makes it PD again
        assert!(a.cholesky(2.0).is_ok());
    }

    #[test]
    fn hermitian_construction_rejects_asymmetric() {
        let mut m = CMat::identity(3);
        m[(0, 1)] = Complex::new(0.5, 0.0);
        assert!(matches!(HermitianMatrix::new(m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn dirichlet_limits_and_zeros() {
        assert_eq!(dirichlet(8, 0.0), 8.0);
        assert!(dirichlet(8, 1.0 / 8.0).abs() < 1e-9);
        // periodic with period 1 (up to the (-1)^{x(n-1)} sign for even n)
        for x in [0.013, 0.21, 0.47] {
            let a = dirichlet(5, x);
            let b = dirichlet(5, x + 1.0);
            assert!((a - b).abs() < 1e-9, "period: {a} vs {b}");
            // even in x
            assert!((a - dirichlet(5, -x)).abs() < 1e-9);
        }
        // integer limit keeps the alternating sign for even n
        assert_eq!(dirichlet(4, 1.0), -4.0);
        assert_eq!(dirichlet(4, 2.0), 4.0);
    }

    #[test]
    fn fft_convolve_delta_is_identity() {
        let a = vec![
            Complex::new(1.0, 0.5),
            Complex::new(-2.0, 0.0),
            Complex::new(0.25, -1.0),
        ];
        let delta = vec![Complex::new(1.0, 0.0)];
        let out = fft_convolve(&a, &delta);
        assert_eq!(out.len(), 3);
        for (x, y) in out.iter().zip(&a) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn fft_convolve_rect_rect_is_triangle() {
        let rect = vec![Complex::new(1.0, 0.0); 4];
        let out = fft_convolve(&rect, &rect);
        let expect = [1.0, 2.0, 3.0, 4.0, 3.0, 2.0, 1.0];
        assert_eq!(out.len(), expect.len());
        for (z, e) in out.iter().zip(expect) {
            assert!((z.re - e).abs() < 1e-10 && z.im.abs() < 1e-10);
        }
    }

    #[test]
    fn fft_convolve_matches_direct_on_random_input() {
        let mut rng = ChaCha12Rng::seed_from_u64(99);
        let a = random_vec(&mut rng, 256);
        let b = random_vec(&mut rng, 131);
        let fast = fft_convolve(&a, &b);
        let slow = direct_convolve(&a, &b);
        let num: f64 = fast.iter().zip(&slow).map(|(x, y)| (x - y).norm_sqr()).sum();
        let den: f64 = slow.iter().map(|x| x.norm_sqr()).sum();
        assert!((num / den).sqrt() <= 1e-9);
    }

    #[test]
    fn phasor_keeps_precision_at_large_cycle_counts() {
        // 800000.25 cycles: naive 2π multiplication would lose ~1e-10 rad;
        // the reduced form must land exactly on +j.
        let z = phasor(800_000.25);
        assert!((z - Complex::new(0.0, 1.0)).norm() < 1e-12);
    }
}
