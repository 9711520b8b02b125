//! Dense complex linear algebra for the small Hermitian matrices (3x3, 4x4)
//! this crate works with: cyclic-Jacobi eigendecomposition, PSD square root,
//! trace norm and commutators. Everything is allocation-light and exact
//! enough at these dimensions that no external solver is needed.

use num_complex::Complex64;
use thiserror::Error;

/// Max allowed `|A[i][j] - conj(A[j][i])|` for a matrix treated as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Eigenvalues below this (after clamping window) violate positive
/// semidefiniteness.
pub const PSD_TOL: f64 = -1e-12;

/// Off-diagonal Frobenius mass at which Jacobi sweeps stop.
const JACOBI_OFF_TOL: f64 = 1e-14;

const MAX_SWEEPS: usize = 64;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is not Hermitian: max |A[i][j] - conj(A[j][i])| = {max_asymmetry:.3e}")]
    NotHermitian { max_asymmetry: f64 },
    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:.3e} below tolerance")]
    NotPsd { eigenvalue: f64 },
    #[error("dimension mismatch: {left}x{left} vs {right}x{right}")]
    DimMismatch { left: usize, right: usize },
    #[error("Jacobi sweeps did not converge (off-diagonal mass {off:.3e})")]
    NoConvergence { off: f64 },
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Build from row-major complex entries; panics if the length is not a
    /// perfect square matching `dim`.
    pub fn from_rows(dim: usize, entries: Vec<Complex64>) -> Self {
        assert_eq!(entries.len(), dim * dim, "entry count must be dim^2");
        Self { dim, data: entries }
    }

    /// Real diagonal matrix.
    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            dim: self.dim,
            data,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            dim: self.dim,
            data,
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max `|A[i][j] - conj(A[j][i])|` over all entries.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Replace the matrix by its Hermitian part (A + A†)/2.
    pub fn hermitize(&self) -> Self {
        self.add(&self.adjoint()).scale_re(0.5)
    }

    fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, j)]).collect()
    }

    fn off_diagonal_mass(&self) -> f64 {
        let mut sum = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j {
                    sum += self[(i, j)].norm_sqr();
                }
            }
        }
        sum.sqrt()
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

/// Result of a Hermitian eigendecomposition: `values` descending, `vectors`
/// holding the matching orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct EigH {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl EigH {
    /// V · diag(f(λ)) · V†.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMat {
        let n = self.vectors.dim();
        let mut out = CMat::zeros(n);
        for (k, &lam) in self.values.iter().enumerate() {
            let flam = f(lam);
            if flam == 0.0 {
                continue;
            }
            let v = self.vectors.column(k);
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += Complex64::new(flam, 0.0) * v[i] * v[j].conj();
                }
            }
        }
        out
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Rejects inputs whose hermiticity defect exceeds [`HERMITICITY_TOL`];
/// sweeps run until the off-diagonal Frobenius mass drops below 1e-14.
pub fn eig_hermitian(a: &CMat) -> Result<EigH, LinalgError> {
    let defect = a.hermiticity_defect();
    if defect > HERMITICITY_TOL {
        return Err(LinalgError::NotHermitian {
            max_asymmetry: defect,
        });
    }
    let n = a.dim();
    let mut m = a.hermitize();
    let mut v = CMat::identity(n);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if m.off_diagonal_mass() < JACOBI_OFF_TOL {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged && m.off_diagonal_mass() >= JACOBI_OFF_TOL {
        return Err(LinalgError::NoConvergence {
            off: m.off_diagonal_mass(),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diags: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diags[j].partial_cmp(&diags[i]).unwrap());

    let values: Vec<f64> = order.iter().map(|&i| diags[i]).collect();
    let mut vectors = CMat::zeros(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, new_col)] = v[(i, old_col)];
        }
    }
    Ok(EigH { values, vectors })
}

/// One complex Jacobi rotation zeroing m[p][q] of the Hermitian matrix `m`,
/// accumulated into `v`.
fn jacobi_rotate(m: &mut CMat, v: &mut CMat, p: usize, q: usize) {
    let apq = m[(p, q)];
    let b = apq.norm();
    if b == 0.0 {
        return;
    }
    // Strip the phase so the 2x2 pivot block becomes real symmetric, then
    // apply the classic rotation choice that zeroes the off-diagonal.
    let phase = apq / b;
    let alpha = m[(p, p)].re;
    let gamma = m[(q, q)].re;
    let tau = (gamma - alpha) / (2.0 * b);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // Update M <- G† M G and accumulate V <- V G: columns p,q of M·G first,
    // then rows p,q of G†·(M·G).
    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = -s * phase.conj();
    let g_qq = c * phase.conj();

    let n = m.dim();
    for i in 0..n {
        let mip = m[(i, p)];
        let miq = m[(i, q)];
        m[(i, p)] = mip * g_pp + miq * g_qp;
        m[(i, q)] = mip * g_pq + miq * g_qq;
    }
    for j in 0..n {
        let mpj = m[(p, j)];
        let mqj = m[(q, j)];
        m[(p, j)] = g_pp.conj() * mpj + g_qp.conj() * mqj;
        m[(q, j)] = g_pq.conj() * mpj + g_qq.conj() * mqj;
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);

    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * g_pp + viq * g_qp;
        v[(i, q)] = vip * g_pq + viq * g_qq;
    }
}

/// Hermitian PSD square root via eigendecomposition.
///
/// Eigenvalues in `[-1e-12, 0)` are round-off from analytically PSD states
/// and get clamped to zero; anything below that is a genuine PSD violation.
pub fn matrix_sqrt_psd(a: &CMat) -> Result<CMat, LinalgError> {
    let eig = eig_hermitian(a)?;
    if let Some(&min) = eig.values.last() {
        if min < PSD_TOL {
            return Err(LinalgError::NotPsd { eigenvalue: min });
        }
    }
    // Exact zeros of rank-deficient inputs come back as ~1e-16 noise, and
    // sqrt would amplify that to ~1e-8; zero them at rounding scale.
    let floor = eig.values.first().copied().unwrap_or(0.0).max(0.0) * 1e-14;
    Ok(eig
        .apply(|lam| if lam <= floor { 0.0 } else { lam.sqrt() })
        .hermitize())
}

/// Sum of singular values. Computed from the spectrum of A†A, which our
/// Hermitian solver handles for any square input.
pub fn trace_norm(a: &CMat) -> f64 {
    let h = a.adjoint().matmul(a).hermitize();
    match eig_hermitian(&h) {
        Ok(eig) => eig.values.iter().map(|&l| l.max(0.0).sqrt()).sum(),
        // A†A is Hermitian by construction; hermitize() above makes this
        // branch unreachable in practice.
        Err(_) => f64::NAN,
    }
}

/// Largest entrywise modulus of AB - BA.
pub fn commutator_max_abs(a: &CMat, b: &CMat) -> Result<f64, LinalgError> {
    if a.dim() != b.dim() {
        return Err(LinalgError::DimMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(a.matmul(b).sub(&b.matmul(a)).max_abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn reconstruct(eig: &EigH) -> CMat {
        eig.apply(|l| l)
    }

    #[test]
    fn identity_spectrum() {
        let eig = eig_hermitian(&CMat::identity(4)).unwrap();
        for &l in &eig.values {
            assert!((l - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn pauli_z_tensor_identity_spectrum() {
        let m = CMat::from_diag(&[1.0, 1.0, -1.0, -1.0]);
        let eig = eig_hermitian(&m).unwrap();
        assert_eq!(eig.values.len(), 4);
        assert!((eig.values[0] - 1.0).abs() < 1e-14);
        assert!((eig.values[1] - 1.0).abs() < 1e-14);
        assert!((eig.values[2] + 1.0).abs() < 1e-14);
        assert!((eig.values[3] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn bell_projector_spectrum() {
        // |v> = (|00> + |11>)/sqrt(2), projector has corners 1/2.
        let mut m = CMat::zeros(4);
        m[(0, 0)] = c(0.5, 0.0);
        m[(3, 3)] = c(0.5, 0.0);
        m[(0, 3)] = c(0.5, 0.0);
        m[(3, 0)] = c(0.5, 0.0);
        let eig = eig_hermitian(&m).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-14);
        for &l in &eig.values[1..] {
            assert!(l.abs() < 1e-14);
        }
    }

    #[test]
    fn eigen_residual_and_orthonormality() {
        // Dense Hermitian with nontrivial complex phases.
        let mut m = CMat::zeros(4);
        let entries = [
            (0, 0, 0.9, 0.0),
            (1, 1, -0.3, 0.0),
            (2, 2, 0.1, 0.0),
            (3, 3, 1.4, 0.0),
            (0, 1, 0.2, 0.7),
            (0, 2, -0.4, 0.1),
            (0, 3, 0.05, -0.3),
            (1, 2, 0.6, -0.2),
            (1, 3, -0.1, 0.4),
            (2, 3, 0.3, 0.3),
        ];
        for &(i, j, re, im) in &entries {
            m[(i, j)] = c(re, im);
            if i != j {
                m[(j, i)] = c(re, -im);
            }
        }
        let eig = eig_hermitian(&m).unwrap();

        // A v_k = λ_k v_k residual per column.
        for k in 0..4 {
            for i in 0..4 {
                let mut av = c(0.0, 0.0);
                for j in 0..4 {
                    av += m[(i, j)] * eig.vectors[(j, k)];
                }
                let res = av - c(eig.values[k], 0.0) * eig.vectors[(i, k)];
                assert!(res.norm() < 1e-10, "residual {}", res.norm());
            }
        }
        // Orthonormality.
        for k in 0..4 {
            for l in 0..4 {
                let mut dot = c(0.0, 0.0);
                for i in 0..4 {
                    dot += eig.vectors[(i, k)].conj() * eig.vectors[(i, l)];
                }
                let want = if k == l { 1.0 } else { 0.0 };
                assert!((dot - c(want, 0.0)).norm() < 1e-10);
            }
        }
        // Reconstruction.
        assert!(reconstruct(&eig).sub(&m).max_abs() < 1e-9);
    }

    #[test]
    fn known_three_by_three_spectrum() {
        // [[2,1,0],[1,2,1],[0,1,2]] has eigenvalues 2 and 2 ± sqrt(2).
        let mut m = CMat::from_diag(&[2.0, 2.0, 2.0]);
        m[(0, 1)] = c(1.0, 0.0);
        m[(1, 0)] = c(1.0, 0.0);
        m[(1, 2)] = c(1.0, 0.0);
        m[(2, 1)] = c(1.0, 0.0);
        let eig = eig_hermitian(&m).unwrap();
        let s = 2.0f64.sqrt();
        assert!((eig.values[0] - (2.0 + s)).abs() < 1e-12);
        assert!((eig.values[1] - 2.0).abs() < 1e-12);
        assert!((eig.values[2] - (2.0 - s)).abs() < 1e-12);
    }

    #[test]
    fn non_hermitian_rejected_with_diagnostic() {
        let mut m = CMat::identity(3);
        m[(0, 1)] = c(0.5, 0.0);
        match eig_hermitian(&m) {
            Err(LinalgError::NotHermitian { max_asymmetry }) => {
                assert!((max_asymmetry - 0.5).abs() < 1e-15);
            }
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn sqrt_of_identity_and_diagonal() {
        let s = matrix_sqrt_psd(&CMat::identity(4)).unwrap();
        assert!(s.sub(&CMat::identity(4)).max_abs() < 1e-12);

        let s = matrix_sqrt_psd(&CMat::from_diag(&[4.0, 0.0, 0.0, 0.0])).unwrap();
        assert!(s.sub(&CMat::from_diag(&[2.0, 0.0, 0.0, 0.0])).max_abs() < 1e-12);

        let quarter = CMat::identity(4).scale_re(0.25);
        let s = matrix_sqrt_psd(&quarter).unwrap();
        assert!(s.sub(&CMat::identity(4).scale_re(0.5)).max_abs() < 1e-12);
    }

    #[test]
    fn sqrt_squares_back() {
        let mut m = CMat::zeros(3);
        m[(0, 0)] = c(0.7, 0.0);
        m[(1, 1)] = c(0.2, 0.0);
        m[(2, 2)] = c(0.1, 0.0);
        m[(0, 1)] = c(0.1, 0.05);
        m[(1, 0)] = c(0.1, -0.05);
        let s = matrix_sqrt_psd(&m).unwrap();
        assert!(s.matmul(&s).sub(&m).max_abs() < 1e-9);
        // sqrt of sqrt, fourth power back.
        let q = matrix_sqrt_psd(&s).unwrap();
        let q4 = q.matmul(&q).matmul(&q).matmul(&q);
        assert!(q4.sub(&m).max_abs() < 1e-8);
    }

    #[test]
    fn sqrt_rejects_indefinite() {
        let m = CMat::from_diag(&[1.0, -0.5, 0.0]);
        match matrix_sqrt_psd(&m) {
            Err(LinalgError::NotPsd { eigenvalue }) => assert!((eigenvalue + 0.5).abs() < 1e-12),
            other => panic!("expected NotPsd, got {other:?}"),
        }
    }

    #[test]
    fn trace_norm_cases() {
        assert!(trace_norm(&CMat::zeros(4)) < 1e-14);
        assert!((trace_norm(&CMat::from_diag(&[1.0, -1.0, 0.0, 0.0])) - 2.0).abs() < 1e-12);
        let m = CMat::from_diag(&[0.5, 0.3, 0.1, 0.1]);
        assert!((trace_norm(&m) - 1.0).abs() < 1e-12);
        let z = CMat::zeros(4);
        assert_eq!(trace_norm(&m.sub(&m)), trace_norm(&z));
    }

    #[test]
    fn commutator_pauli_algebra() {
        // [σx⊗I, σy⊗I] = 2i σz⊗I, max modulus 2.
        let mut sx = CMat::zeros(4);
        sx[(0, 2)] = c(1.0, 0.0);
        sx[(1, 3)] = c(1.0, 0.0);
        sx[(2, 0)] = c(1.0, 0.0);
        sx[(3, 1)] = c(1.0, 0.0);
        let mut sy = CMat::zeros(4);
        sy[(0, 2)] = c(0.0, -1.0);
        sy[(1, 3)] = c(0.0, -1.0);
        sy[(2, 0)] = c(0.0, 1.0);
        sy[(3, 1)] = c(0.0, 1.0);
        assert!((commutator_max_abs(&sx, &sy).unwrap() - 2.0).abs() < 1e-14);

        let any = CMat::from_diag(&[0.3, 0.1, -2.0, 7.0]);
        assert!(commutator_max_abs(&CMat::identity(4), &any).unwrap() < 1e-15);

        assert!(matches!(
            commutator_max_abs(&CMat::identity(3), &any),
            Err(LinalgError::DimMismatch { .. })
        ));
    }
}
