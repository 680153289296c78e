//! Slow, loop-based reference implementations used to validate the fast
//! paths. Nothing here is called from production code; tests and the
//! acceptance suite compare against these independently written routines.

use crate::error::Result;
use crate::tensor::{DenseTensor, ModeSpec};

/// Tensor whose linear buffer is 0, 1, 2, ...
pub fn counting_tensor(shape: &[usize]) -> DenseTensor {
    let n: usize = shape.iter().product();
    DenseTensor::new(shape.to_vec(), (0..n).map(|v| v as f64).collect()).unwrap()
}

/// Deterministic pseudo-random tensor from a tiny LCG; good enough for
/// oracle comparisons without pulling RNG machinery into reference code.
pub fn randomish_tensor(shape: &[usize], seed: u64) -> DenseTensor {
    let n: usize = shape.iter().product();
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let mut data = Vec::with_capacity(n);
    for _ in 0..n {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        // Map the top 53 bits to (-1, 1).
        let u = (state >> 11) as f64 / (1u64 << 53) as f64;
        data.push(2.0 * u - 1.0);
    }
    DenseTensor::new(shape.to_vec(), data).unwrap()
}

/// Nested-loop contraction: iterates every output entry and sums over the
/// joint contracted index space using element accessors only.
pub fn contract_naive(a: &DenseTensor, b: &DenseTensor, spec: &ModeSpec) -> Result<DenseTensor> {
    let con_a: Vec<usize> = spec.pairs().iter().map(|&(pa, _)| pa - 1).collect();
    let con_b: Vec<usize> = spec.pairs().iter().map(|&(_, pb)| pb - 1).collect();
    let unc_a: Vec<usize> = (0..a.order()).filter(|k| !con_a.contains(k)).collect();
    let unc_b: Vec<usize> = (0..b.order()).filter(|k| !con_b.contains(k)).collect();

    let mut out_shape: Vec<usize> = unc_a.iter().map(|&k| a.shape()[k]).collect();
    out_shape.extend(unc_b.iter().map(|&k| b.shape()[k]));
    let con_sizes: Vec<usize> = con_a.iter().map(|&k| a.shape()[k]).collect();

    let mut out = DenseTensor::zeros(&out_shape);
    let total: usize = out_shape.iter().product();
    let inner: usize = con_sizes.iter().product();

    let mut idx_a = vec![0usize; a.order()];
    let mut idx_b = vec![0usize; b.order()];
    for lin in 0..total {
        let out_idx = out.multi_index(lin);
        let mut sum = 0.0;
        for w in 0..inner.max(1) {
            // Decompose the joint contracted index, first pair fastest.
            let mut rem = w;
            for (p, &size) in con_sizes.iter().enumerate() {
                let wi = rem % size;
                rem /= size;
                idx_a[con_a[p]] = wi;
                idx_b[con_b[p]] = wi;
            }
            for (pos, &k) in unc_a.iter().enumerate() {
                idx_a[k] = out_idx[pos];
            }
            for (pos, &k) in unc_b.iter().enumerate() {
                idx_b[k] = out_idx[unc_a.len() + pos];
            }
            sum += a.get(&idx_a) * b.get(&idx_b);
        }
        out.data_mut()[lin] = sum;
    }
    Ok(out)
}

/// Kronecker product evaluated entry-by-entry through the combined-index
/// formula: the combined index along mode n is `j_n + i_n * J_n` (0-based).
pub fn kron_entry_formula(a: &DenseTensor, b: &DenseTensor) -> Result<DenseTensor> {
    let n = a.order();
    let out_shape: Vec<usize> = a
        .shape()
        .iter()
        .zip(b.shape())
        .map(|(&ia, &jb)| ia * jb)
        .collect();
    let mut out = DenseTensor::zeros(&out_shape);
    let total: usize = out_shape.iter().product();
    for lin in 0..total {
        let idx = out.multi_index(lin);
        let mut ia = vec![0usize; n];
        let mut jb = vec![0usize; n];
        for k in 0..n {
            ia[k] = idx[k] / b.shape()[k];
            jb[k] = idx[k] % b.shape()[k];
        }
        out.data_mut()[lin] = a.get(&ia) * b.get(&jb);
    }
    Ok(out)
}

/// Matrix applied to a tensor mode via explicit loops over every index.
pub fn mode_apply_naive(w: &DenseTensor, x: &DenseTensor, mode: usize) -> Result<DenseTensor> {
    let m0 = mode - 1;
    let mut out_shape = x.shape().to_vec();
    out_shape[m0] = w.shape()[0];
    let mut out = DenseTensor::zeros(&out_shape);
    let total: usize = out_shape.iter().product();
    for lin in 0..total {
        let idx = out.multi_index(lin);
        let j = idx[m0];
        let mut sum = 0.0;
        let mut src = idx.clone();
        for i in 0..x.shape()[m0] {
            src[m0] = i;
            sum += w.get(&[j, i]) * x.get(&src);
        }
        out.data_mut()[lin] = sum;
    }
    Ok(out)
}

/// Dense matrix-vector product; `v` is any tensor, consumed in linear order.
pub fn matvec(m: &DenseTensor, v: &DenseTensor) -> Result<DenseTensor> {
    let (rows, cols) = (m.shape()[0], m.shape()[1]);
    assert_eq!(cols, v.len(), "matvec width vs vector length");
    let mut out = vec![0.0; rows];
    for (lin, &x) in v.data().iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (r, o) in out.iter_mut().enumerate() {
            *o += m.get(&[r, lin]) * x;
        }
    }
    DenseTensor::new(vec![rows], out)
}

/// The matricized route for the order-4 graph filter: builds the full
/// `I + beta * (A kron P)` matrix and multiplies the vectorized signal.
pub fn filter_apply_matricized(
    a: &DenseTensor,
    p: &DenseTensor,
    beta: f64,
    signal: &DenseTensor,
) -> Result<DenseTensor> {
    let big = kron_entry_formula(a, p)?;
    let n = big.shape()[0];
    let m = DenseTensor::identity(n).add(&big.scale(beta))?;
    let flat = matvec(&m, signal)?;
    flat.reshape(signal.shape())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn naive_contract_matrix_case_is_matmul() {
        let a = randomish_tensor(&[3, 4], 1);
        let b = randomish_tensor(&[4, 2], 2);
        let got = contract_naive(&a, &b, &ModeSpec::single(2, 1)).unwrap();
        let expect = a.matmul(&b).unwrap();
        assert!(got.max_abs_diff(&expect) <= 1e-12);
    }

    #[test]
    fn matvec_matches_matmul() {
        let m = randomish_tensor(&[3, 5], 3);
        let v = randomish_tensor(&[5], 4);
        let got = matvec(&m, &v).unwrap();
        let expect = m.matmul(&v.reshape(&[5, 1]).unwrap()).unwrap();
        assert!(got.max_abs_diff(&expect.reshape(&[3]).unwrap()) <= 1e-12);
    }
}
