//! Dense symmetric and Hermitian eigenvalues by cyclic Jacobi rotations, and
//! tolerance-banded inertia counting.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_INERTIA_TOL: f64 = 1e-7;
const MAX_SWEEPS: usize = 30;
const OFF_DIAGONAL_RTOL: f64 = 1e-12;

/// Real symmetric matrix stored row-major; `a[i][j] == a[j][i]` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    /// Fails unless `data` is square, finite and exactly symmetric.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 || data.len() != n * n {
            return Err(Error::Invalid(format!("expected {n}x{n} entries, got {}", data.len())));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("matrix entries must be finite".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if data[i * n + j] != data[j * n + i] {
                    return Err(Error::Invalid(format!("entry ({i},{j}) breaks symmetry")));
                }
            }
        }
        Ok(Self { n, data })
    }

    /// Builds `(A + Aᵀ)/2`.
    pub fn symmetrized(n: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), n * n);
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            out[i * n + i] = data[i * n + i];
            for j in 0..i {
                let v = 0.5 * (data[i * n + j] + data[j * n + i]);
                out[i * n + j] = v;
                out[j * n + i] = v;
            }
        }
        Self { n, data: out }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut data = vec![0.0; n * n];
        for (i, v) in values.iter().enumerate() {
            data[i * n + i] = *v;
        }
        Self { n, data }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }
}

/// Complex Hermitian matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if n == 0 || data.len() != n * n {
            return Err(Error::Invalid(format!("expected {n}x{n} entries, got {}", data.len())));
        }
        for i in 0..n {
            if data[i * n + i].im != 0.0 {
                return Err(Error::Invalid(format!("diagonal entry {i} is not real")));
            }
            for j in 0..i {
                if data[i * n + j] != data[j * n + i].conj() {
                    return Err(Error::Invalid(format!("entry ({i},{j}) breaks Hermitian symmetry")));
                }
            }
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Invalid("matrix entries must be finite".into()));
        }
        Ok(Self { n, data })
    }

    /// Builds `(A + Aᴴ)/2`.
    pub fn hermitized(n: usize, data: &[Complex64]) -> Self {
        assert_eq!(data.len(), n * n);
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            out[i * n + i] = Complex64::new(data[i * n + i].re, 0.0);
            for j in 0..i {
                let v = 0.5 * (data[i * n + j] + data[j * n + i].conj());
                out[i * n + j] = v;
                out[j * n + i] = v.conj();
            }
        }
        Self { n, data: out }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// `[[Re, -Im], [Im, Re]]`, the 2n×2n real symmetric embedding.
    pub fn real_embedding(&self) -> SymmetricMatrix {
        let n = self.n;
        let m = 2 * n;
        let mut data = vec![0.0; m * m];
        for i in 0..n {
            for j in 0..n {
                let z = self.get(i, j);
                data[i * m + j] = z.re;
                data[(i + n) * m + (j + n)] = z.re;
                data[i * m + (j + n)] = -z.im;
                data[(i + n) * m + j] = z.im;
            }
        }
        SymmetricMatrix { n: m, data }
    }
}

/// Eigenvalues in ascending order plus the matching unit eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..i {
            s += 2.0 * a[i * n + j] * a[i * n + j];
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi. Stops once the off-diagonal Frobenius norm drops below
/// `1e-12·‖m‖_F`; gives up after 30 sweeps.
pub fn eig_symmetric_vectors(m: &SymmetricMatrix) -> Result<EigenDecomposition> {
    let n = m.n;
    let mut a = m.data.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let threshold = OFF_DIAGONAL_RTOL * m.frobenius();
    let mut converged = false;
    for _ in 0..=MAX_SWEEPS {
        if off_diagonal_norm(&a, n) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                a[p * n + p] -= t * apq;
                a[q * n + q] += t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for r in 0..n {
                    if r != p && r != q {
                        let arp = a[r * n + p];
                        let arq = a[r * n + q];
                        let new_rp = c * arp - s * arq;
                        let new_rq = s * arp + c * arq;
                        a[r * n + p] = new_rp;
                        a[p * n + r] = new_rp;
                        a[r * n + q] = new_rq;
                        a[q * n + r] = new_rq;
                    }
                    let vrp = v[r * n + p];
                    let vrq = v[r * n + q];
                    v[r * n + p] = c * vrp - s * vrq;
                    v[r * n + q] = s * vrp + c * vrq;
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps: MAX_SWEEPS,
            residual: off_diagonal_norm(&a, n),
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    Ok(EigenDecomposition {
        values: order.iter().map(|&i| a[i * n + i]).collect(),
        vectors: order.iter().map(|&i| (0..n).map(|r| v[r * n + i]).collect()).collect(),
    })
}

/// Ascending eigenvalues of a real symmetric matrix.
pub fn eig_symmetric(m: &SymmetricMatrix) -> Result<Vec<f64>> {
    Ok(eig_symmetric_vectors(m)?.values)
}

/// Ascending eigenvalues of a Hermitian matrix, via the real embedding in
/// which every eigenvalue appears twice.
pub fn eig_hermitian(m: &HermitianMatrix) -> Result<Vec<f64>> {
    let embedded = m.real_embedding();
    let doubled = eig_symmetric(&embedded)?;
    let tol = 1e-9 * embedded.frobenius().max(1.0);
    let mut out = Vec::with_capacity(m.n);
    for pair in doubled.chunks(2) {
        let gap = (pair[1] - pair[0]).abs();
        if gap > tol {
            return Err(Error::Pairing { gap });
        }
        out.push(0.5 * (pair[0] + pair[1]));
    }
    Ok(out)
}

/// Counts of negative, zero and positive eigenvalues under a relative band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Inertia {
    pub negatives: usize,
    pub zeros: usize,
    pub positives: usize,
    pub tol: f64,
}

impl Inertia {
    /// `λ < -tol·scale` is negative, `|λ| <= tol·scale` zero, the rest positive.
    pub fn with_scale(eigs: &[f64], scale: f64, tol: f64) -> Self {
        let band = tol * scale;
        let mut out = Inertia {
            negatives: 0,
            zeros: 0,
            positives: 0,
            tol,
        };
        for &l in eigs {
            if l < -band {
                out.negatives += 1;
            } else if l.abs() <= band {
                out.zeros += 1;
            } else {
                out.positives += 1;
            }
        }
        out
    }

    /// Uses `scale = max(1, max |λ|)`.
    pub fn from_eigenvalues(eigs: &[f64], tol: f64) -> Self {
        let scale = eigs.iter().fold(1.0_f64, |m, l| m.max(l.abs()));
        Self::with_scale(eigs, scale, tol)
    }

    pub fn order(&self) -> usize {
        self.negatives + self.zeros + self.positives
    }

    /// Negative plus zero count, the index relevant for strict q-convexity.
    pub fn non_positive(&self) -> usize {
        self.negatives + self.zeros
    }
}

/// Inertia of a symmetric matrix with the default relative scale.
pub fn inertia(eigs: &[f64], tol: f64) -> Inertia {
    Inertia::from_eigenvalues(eigs, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(n: usize, v: &[f64]) -> SymmetricMatrix {
        SymmetricMatrix::new(n, v.to_vec()).unwrap()
    }

    #[test]
    fn small_analytic_spectra() {
        assert_eq!(eig_symmetric(&SymmetricMatrix::identity(3)).unwrap(), vec![1.0; 3]);
        let e = eig_symmetric(&sym(2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);
        assert_eq!(
            eig_symmetric(&SymmetricMatrix::diagonal(&[-2.0, 0.0])).unwrap(),
            vec![-2.0, 0.0]
        );
    }

    #[test]
    fn zero_matrix_converges_immediately() {
        let e = eig_symmetric(&SymmetricMatrix::diagonal(&[0.0, 0.0, 0.0])).unwrap();
        assert_eq!(e, vec![0.0; 3]);
    }

    #[test]
    fn eigenvectors_diagonalize() {
        let m = sym(3, &[2.0, -1.0, 0.5, -1.0, 3.0, 0.25, 0.5, 0.25, -1.0]);
        let d = eig_symmetric_vectors(&m).unwrap();
        for (l, v) in d.values.iter().zip(&d.vectors) {
            for i in 0..3 {
                let mv: f64 = (0..3).map(|j| m.get(i, j) * v[j]).sum();
                assert!((mv - l * v[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hermitian_examples() {
        let c = |re, im| Complex64::new(re, im);
        let id = HermitianMatrix::new(2, vec![c(1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]).unwrap();
        assert_eq!(eig_hermitian(&id).unwrap(), vec![1.0, 1.0]);
        let pauli = HermitianMatrix::new(2, vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]).unwrap();
        let e = eig_hermitian(&pauli).unwrap();
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);
        let d = HermitianMatrix::new(2, vec![c(-0.5, 0.), c(0., 0.), c(0., 0.), c(0., 0.)]).unwrap();
        assert_eq!(eig_hermitian(&d).unwrap(), vec![-0.5, 0.0]);
        assert!(HermitianMatrix::new(1, vec![c(1.0, 1.0)]).is_err());
    }

    #[test]
    fn inertia_examples() {
        let i = inertia(&[-2.0, 0.0], 1e-7);
        assert_eq!((i.negatives, i.zeros, i.positives), (1, 1, 0));
        let i = inertia(&[-1e-12, 1e-12], 1e-7);
        assert_eq!((i.negatives, i.zeros, i.positives), (0, 2, 0));
        let i = inertia(&[-2.0, -2.0], 1e-7);
        assert_eq!((i.negatives, i.zeros, i.positives), (2, 0, 0));
        assert_eq!(i.order(), 2);
    }

    #[test]
    fn asymmetric_input_is_rejected() {
        assert!(SymmetricMatrix::new(2, vec![0.0, 1.0, 1.0 + 1e-16 * 8.0, 0.0]).is_err());
        assert!(SymmetricMatrix::new(2, vec![0.0, 1.0]).is_err());
    }
}
