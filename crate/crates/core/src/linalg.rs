//! Small dense helpers. Matrices are row-major `Vec<f64>`; the only factorisations
//! needed are thin Gram–Schmidt on tall `n × k` blocks and symmetric eigenvalues of
//! `k × k` matrices with small `k`.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// Orthonormalises the columns of a row-major `n × k` matrix in place by modified
/// Gram–Schmidt with one re-orthogonalisation pass. Returns the diagonal of the
/// triangular factor, which is positive by construction.
///
/// Fails if a column is (numerically) dependent on its predecessors.
pub fn orthonormalize_columns(m: &mut [f64], n: usize, k: usize) -> Result<Vec<f64>> {
    debug_assert_eq!(m.len(), n * k);
    let mut diag = vec![0.0; k];
    for j in 0..k {
        let original = column_norm(m, n, k, j);
        for _pass in 0..2 {
            for i in 0..j {
                let proj = column_dot(m, n, k, i, j);
                for r in 0..n {
                    m[r * k + j] -= proj * m[r * k + i];
                }
            }
        }
        let nrm = column_norm(m, n, k, j);
        if !(nrm > 1e-10 * original) || nrm == 0.0 {
            return Err(Error::DegenerateDirection);
        }
        for r in 0..n {
            m[r * k + j] /= nrm;
        }
        diag[j] = nrm;
    }
    Ok(diag)
}

fn column_dot(m: &[f64], n: usize, k: usize, a: usize, b: usize) -> f64 {
    (0..n).map(|r| m[r * k + a] * m[r * k + b]).sum()
}

fn column_norm(m: &[f64], n: usize, k: usize, j: usize) -> f64 {
    libm::sqrt(column_dot(m, n, k, j, j))
}

/// `Mᵀ M` for a row-major `n × k` matrix.
pub fn gram(m: &[f64], n: usize, k: usize) -> Vec<f64> {
    let mut g = vec![0.0; k * k];
    for row in m.chunks_exact(k).take(n) {
        for a in 0..k {
            for b in 0..k {
                g[a * k + b] += row[a] * row[b];
            }
        }
    }
    g
}

/// Eigenvalues of a symmetric `k × k` matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(m: &[f64], k: usize) -> Result<Vec<f64>> {
    if m.len() != k * k {
        return Err(Error::DimensionMismatch {
            expected: k * k,
            got: m.len(),
        });
    }
    let scale = m.iter().fold(0.0f64, |s, x| s.max(x.abs())).max(f64::MIN_POSITIVE);
    for i in 0..k {
        for j in 0..i {
            if (m[i * k + j] - m[j * k + i]).abs() > 1e-12 * scale {
                return Err(Error::NotSymmetric);
            }
        }
    }
    let mut a = m.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..k)
            .flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * k + j] * a[i * k + j])
            .sum();
        if off <= (f64::EPSILON * scale) * (f64::EPSILON * scale) {
            break;
        }
        for p in 0..k {
            for q in p + 1..k {
                let apq = a[p * k + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * k + q] - a[p * k + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for r in 0..k {
                    let arp = a[r * k + p];
                    let arq = a[r * k + q];
                    a[r * k + p] = c * arp - s * arq;
                    a[r * k + q] = s * arp + c * arq;
                }
                for r in 0..k {
                    let apr = a[p * k + r];
                    let aqr = a[q * k + r];
                    a[p * k + r] = c * apr - s * aqr;
                    a[q * k + r] = s * apr + c * aqr;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..k).map(|i| a[i * k + i]).collect();
    eig.sort_by(|x, y| x.total_cmp(y));
    Ok(eig)
}

/// Determinant of a small square matrix by Gaussian elimination with partial pivoting.
pub fn determinant(m: &[f64], k: usize) -> f64 {
    let mut a = m.to_vec();
    let mut det = 1.0;
    for c in 0..k {
        let pivot = (c..k)
            .max_by(|&i, &j| a[i * k + c].abs().total_cmp(&a[j * k + c].abs()))
            .unwrap_or(c);
        if a[pivot * k + c] == 0.0 {
            return 0.0;
        }
        if pivot != c {
            for j in 0..k {
                a.swap(pivot * k + j, c * k + j);
            }
            det = -det;
        }
        let d = a[c * k + c];
        det *= d;
        for r in c + 1..k {
            let f = a[r * k + c] / d;
            for j in c..k {
                a[r * k + j] -= f * a[c * k + j];
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_two_by_two() {
        let eig = symmetric_eigenvalues(&[2.0, 1.0, 1.0, 2.0], 2).unwrap();
        assert!((eig[0] - 1.0).abs() < 1e-14 && (eig[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_three_by_three() {
        // eigenvalues of [[4,1,0],[1,3,1],[0,1,2]] are 3, 3 ± √3
        let eig = symmetric_eigenvalues(&[4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0], 3).unwrap();
        let s3 = libm::sqrt(3.0);
        assert!((eig[0] - (3.0 - s3)).abs() < 1e-13);
        assert!((eig[1] - 3.0).abs() < 1e-13);
        assert!((eig[2] - (3.0 + s3)).abs() < 1e-13);
    }

    #[test]
    fn asymmetric_rejected() {
        assert_eq!(symmetric_eigenvalues(&[1.0, 2.0, 0.0, 1.0], 2), Err(Error::NotSymmetric));
    }

    #[test]
    fn determinant_small() {
        assert!((determinant(&[0.0, 2.0, 3.0, 1.0], 2) + 6.0).abs() < 1e-15);
    }

    #[test]
    fn gram_schmidt_orthonormal() {
        let mut m = vec![1.0, 1.0, 1.0, 0.0, 0.0, 1.0];
        let d = orthonormalize_columns(&mut m, 3, 2).unwrap();
        assert!(d.iter().all(|&x| x > 0.0));
        let g = gram(&m, 3, 2);
        assert!((g[0] - 1.0).abs() < 1e-15 && g[1].abs() < 1e-15 && (g[3] - 1.0).abs() < 1e-15);
    }
}
