//! Thin SVD via one-sided Jacobi rotations. Accurate for the small dense
//! matrices that show up in sequential tensor-train sweeps; no external
//! linear algebra dependency.

use crate::error::Result;
use crate::tensor::DenseTensor;

pub struct Svd {
    /// Left singular vectors, `rows x k` with `k = min(rows, cols)`.
    pub u: DenseTensor,
    /// Singular values, descending.
    pub singular_values: Vec<f64>,
    /// Right singular vectors transposed, `k x cols`.
    pub vt: DenseTensor,
}

const MAX_SWEEPS: usize = 64;
const CONVERGENCE: f64 = 1e-15;

/// Computes a thin SVD `m = u * diag(s) * vt`.
pub fn svd(m: &DenseTensor) -> Result<Svd> {
    let (rows, cols) = (m.shape()[0], m.shape()[1]);
    if rows >= cols {
        svd_tall(m)
    } else {
        // Decompose the transpose and swap factors.
        let t = svd_tall(&m.transpose()?)?;
        Ok(Svd {
            u: t.vt.transpose()?,
            singular_values: t.singular_values,
            vt: t.u.transpose()?,
        })
    }
}

/// One-sided Jacobi for `rows >= cols`: orthogonalizes the columns of a
/// working copy of `m`, accumulating the rotations into `v`.
fn svd_tall(m: &DenseTensor) -> Result<Svd> {
    let (rows, cols) = (m.shape()[0], m.shape()[1]);
    let mut a = m.data().to_vec(); // column-major: column j at a[j*rows..]
    let mut v = DenseTensor::identity(cols).into_data();

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let (mut app, mut aqq, mut apq) = (0.0, 0.0, 0.0);
                for i in 0..rows {
                    let x = a[p * rows + i];
                    let y = a[q * rows + i];
                    app += x * x;
                    aqq += y * y;
                    apq += x * y;
                }
                if apq.abs() <= CONVERGENCE * (app * aqq).sqrt() {
                    continue;
                }
                off = off.max(apq.abs() / (app * aqq).sqrt().max(f64::MIN_POSITIVE));

                // Jacobi rotation zeroing the (p,q) inner product.
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let x = a[p * rows + i];
                    let y = a[q * rows + i];
                    a[p * rows + i] = c * x - s * y;
                    a[q * rows + i] = s * x + c * y;
                }
                for i in 0..cols {
                    let x = v[p * cols + i];
                    let y = v[q * cols + i];
                    v[p * cols + i] = c * x - s * y;
                    v[q * cols + i] = s * x + c * y;
                }
            }
        }
        if off < CONVERGENCE {
            break;
        }
    }

    // Column norms are the singular values; sort descending.
    let mut order: Vec<usize> = (0..cols).collect();
    let norms: Vec<f64> = (0..cols)
        .map(|j| {
            a[j * rows..(j + 1) * rows]
                .iter()
                .map(|&x| x * x)
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());

    let k = cols; // thin: k = min(rows, cols) since rows >= cols
    let mut u = DenseTensor::zeros(&[rows, k]);
    let mut vt = DenseTensor::zeros(&[k, cols]);
    let mut singular_values = Vec::with_capacity(k);
    for (dst, &src) in order.iter().enumerate() {
        let sigma = norms[src];
        singular_values.push(sigma);
        if sigma > f64::MIN_POSITIVE {
            for i in 0..rows {
                u.data_mut()[dst * rows + i] = a[src * rows + i] / sigma;
            }
        }
        for i in 0..cols {
            // vt[dst, i] = v[i, dst-th kept column]
            vt.data_mut()[dst + k * i] = v[src * cols + i];
        }
    }
    Ok(Svd {
        u,
        singular_values,
        vt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;

    fn reconstruct(s: &Svd) -> DenseTensor {
        let k = s.singular_values.len();
        let mut sv = DenseTensor::zeros(&[k, k]);
        for (i, &x) in s.singular_values.iter().enumerate() {
            sv.set(&[i, i], x);
        }
        s.u.matmul(&sv).unwrap().matmul(&s.vt).unwrap()
    }

    #[test]
    fn reconstructs_tall_matrix() {
        let m = reference::randomish_tensor(&[7, 4], 42);
        let s = svd(&m).unwrap();
        assert!(reconstruct(&s).max_abs_diff(&m) < 1e-12);
        for w in s.singular_values.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn reconstructs_wide_matrix() {
        let m = reference::randomish_tensor(&[3, 8], 43);
        let s = svd(&m).unwrap();
        assert_eq!(s.u.shape(), &[3, 3]);
        assert_eq!(s.vt.shape(), &[3, 8]);
        assert!(reconstruct(&s).max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn orthonormal_left_factor() {
        let m = reference::randomish_tensor(&[6, 4], 44);
        let s = svd(&m).unwrap();
        let gram = s.u.transpose().unwrap().matmul(&s.u).unwrap();
        assert!(gram.max_abs_diff(&DenseTensor::identity(4)) < 1e-12);
    }

    #[test]
    fn rank_one_matrix_has_one_nonzero_singular_value() {
        let u = [1.0, 2.0, -1.0];
        let v = [3.0, 0.5];
        let mut m = DenseTensor::zeros(&[3, 2]);
        for i in 0..3 {
            for j in 0..2 {
                m.set(&[i, j], u[i] * v[j]);
            }
        }
        let s = svd(&m).unwrap();
        assert!(s.singular_values[0] > 1.0);
        assert!(s.singular_values[1].abs() < 1e-12);
    }
}
