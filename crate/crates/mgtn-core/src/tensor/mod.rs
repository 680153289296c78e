//! Dense multi-dimensional arrays with first-index-fastest (Little-Endian)
//! linear storage, plus the reshaping, Kronecker and contraction machinery
//! the network layers are built from.
//!
//! Mode indices in public operation signatures are 1-based; element indices
//! and internal storage are 0-based.

mod io;

pub use io::{read_tensor, write_tensor};

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Order-N numeric array over `f64`.
///
/// The flat buffer is ordered with the first index varying fastest, so the
/// linear index of `(i_1, ..., i_N)` is `i_1 + i_2*I_1 + i_3*I_1*I_2 + ...`
/// (0-based). A matrix stored this way is column-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseTensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl std::fmt::Debug for DenseTensor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.data.len() <= 16 {
            write!(f, "DenseTensor{:?} {:?}", self.shape, self.data)
        } else {
            write!(f, "DenseTensor{:?} [{} entries]", self.shape, self.data.len())
        }
    }
}

impl DenseTensor {
    /// Builds a tensor from a shape and a flat buffer in linear order.
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let expected = shape.iter().product::<usize>();
        if data.len() != expected {
            return Err(CoreError::DataLength {
                shape,
                len: data.len(),
                expected,
            });
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: &[usize]) -> Self {
        let n = shape.iter().product();
        Self {
            shape: shape.to_vec(),
            data: vec![0.0; n],
        }
    }

    pub fn filled(shape: &[usize], value: f64) -> Self {
        let n = shape.iter().product();
        Self {
            shape: shape.to_vec(),
            data: vec![value; n],
        }
    }

    /// Order-0 tensor: empty shape, single entry.
    pub fn scalar(value: f64) -> Self {
        Self {
            shape: Vec::new(),
            data: vec![value],
        }
    }

    /// Identity matrix of size `n`.
    pub fn identity(n: usize) -> Self {
        let mut t = Self::zeros(&[n, n]);
        for i in 0..n {
            t.data[i + n * i] = 1.0;
        }
        t
    }

    /// Builds a matrix from rows (row-major input, converted internally).
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut t = Self::zeros(&[r, c]);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != c {
                return Err(CoreError::DataLength {
                    shape: vec![r, c],
                    len: row.len(),
                    expected: c,
                });
            }
            for (j, &v) in row.iter().enumerate() {
                t.data[i + r * j] = v;
            }
        }
        Ok(t)
    }

    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// Linear index of a 0-based multi-index (first index fastest).
    pub fn linear_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.shape.len());
        let mut lin = 0;
        let mut stride = 1;
        for (k, &i) in idx.iter().enumerate() {
            debug_assert!(i < self.shape[k]);
            lin += i * stride;
            stride *= self.shape[k];
        }
        lin
    }

    /// Decomposes a linear index back into a 0-based multi-index.
    pub fn multi_index(&self, mut lin: usize) -> Vec<usize> {
        let mut idx = vec![0; self.shape.len()];
        for (k, &s) in self.shape.iter().enumerate() {
            idx[k] = lin % s;
            lin /= s;
        }
        idx
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.linear_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], value: f64) {
        let lin = self.linear_index(idx);
        self.data[lin] = value;
    }

    /// Reinterprets the buffer under a new shape with the same element count.
    pub fn reshape(&self, shape: &[usize]) -> Result<Self> {
        let expected: usize = shape.iter().product();
        if expected != self.data.len() {
            return Err(CoreError::DataLength {
                shape: shape.to_vec(),
                len: self.data.len(),
                expected,
            });
        }
        Ok(Self {
            shape: shape.to_vec(),
            data: self.data.clone(),
        })
    }

    /// Reorders modes: output mode `k` is input mode `perm[k]` (0-based).
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let n = self.shape.len();
        let mut seen = vec![false; n];
        let valid = perm.len() == n
            && perm.iter().all(|&p| {
                if p >= n || seen[p] {
                    false
                } else {
                    seen[p] = true;
                    true
                }
            });
        if !valid {
            return Err(CoreError::ShapeMismatch {
                expected: (0..n).collect(),
                got: perm.to_vec(),
                context: "permutation".into(),
            });
        }
        let out_shape: Vec<usize> = perm.iter().map(|&p| self.shape[p]).collect();
        let mut out = Self::zeros(&out_shape);

        // Weight of input mode k in the output linear index.
        let mut out_strides = vec![0usize; n];
        {
            let mut stride = 1;
            for (j, &p) in perm.iter().enumerate() {
                out_strides[p] = stride;
                stride *= out_shape[j];
            }
        }

        // Odometer walk over input linear order, tracking the output index.
        let mut idx = vec![0usize; n];
        let mut out_lin = 0usize;
        for &v in &self.data {
            out.data[out_lin] = v;
            for k in 0..n {
                idx[k] += 1;
                out_lin += out_strides[k];
                if idx[k] < self.shape[k] {
                    break;
                }
                out_lin -= out_strides[k] * self.shape[k];
                idx[k] = 0;
            }
        }
        Ok(out)
    }

    /// Mode-`n` unfolding into an `I_n x (prod of the rest)` matrix.
    /// `mode` is 1-based.
    pub fn matricize(&self, mode: usize) -> Result<Self> {
        let order = self.order();
        if mode == 0 || mode > order {
            return Err(CoreError::ModeOutOfRange { mode, order });
        }
        let m0 = mode - 1;
        let mut perm = Vec::with_capacity(order);
        perm.push(m0);
        perm.extend((0..order).filter(|&k| k != m0));
        let moved = self.permute(&perm)?;
        let rows = self.shape[m0];
        let cols = self.data.len() / rows.max(1);
        moved.reshape(&[rows, cols])
    }

    /// Kronecker product of two tensors of equal order. The combined index
    /// along each mode groups the right operand's index fastest, so for
    /// matrices this is the classical Kronecker product.
    pub fn kronecker(&self, other: &Self) -> Result<Self> {
        if self.order() != other.order() {
            return Err(CoreError::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        let n = self.order();
        let out_shape: Vec<usize> = self
            .shape
            .iter()
            .zip(&other.shape)
            .map(|(&a, &b)| a * b)
            .collect();
        let mut out = Self::zeros(&out_shape);

        // Walk over (a-index, b-index) pairs; combined index c_k = j_k + i_k * J_k.
        let mut ia = vec![0usize; n];
        for &av in &self.data {
            let mut ib = vec![0usize; n];
            for &bv in &other.data {
                let mut lin = 0;
                let mut stride = 1;
                for k in 0..n {
                    lin += (ib[k] + ia[k] * other.shape[k]) * stride;
                    stride *= out_shape[k];
                }
                out.data[lin] = av * bv;
                step_odometer(&mut ib, &other.shape);
            }
            step_odometer(&mut ia, &self.shape);
        }
        Ok(out)
    }

    /// Matrix product for order-2 tensors.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.order() != 2 || other.order() != 2 || self.shape[1] != other.shape[0] {
            return Err(CoreError::ShapeMismatch {
                expected: self.shape.clone(),
                got: other.shape.clone(),
                context: "matmul inner dimensions".into(),
            });
        }
        let (r, k, c) = (self.shape[0], self.shape[1], other.shape[1]);
        let mut out = Self::zeros(&[r, c]);
        // Column-major friendly loop order.
        for j in 0..c {
            let out_col = &mut out.data[j * r..(j + 1) * r];
            for l in 0..k {
                let b = other.data[l + k * j];
                if b == 0.0 {
                    continue;
                }
                let a_col = &self.data[l * r..(l + 1) * r];
                for i in 0..r {
                    out_col[i] += a_col[i] * b;
                }
            }
        }
        Ok(out)
    }

    /// Matrix transpose for order-2 tensors.
    pub fn transpose(&self) -> Result<Self> {
        self.permute(&[1, 0])
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.shape != other.shape {
            return Err(CoreError::ShapeMismatch {
                expected: self.shape.clone(),
                got: other.shape.clone(),
                context: "elementwise op".into(),
            });
        }
        Ok(Self {
            shape: self.shape.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|v| v * s)
    }

    pub fn dot(&self, other: &Self) -> Result<f64> {
        if self.shape != other.shape {
            return Err(CoreError::ShapeMismatch {
                expected: self.shape.clone(),
                got: other.shape.clone(),
                context: "dot".into(),
            });
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| a * b)
            .sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|&v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.shape, other.shape);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

fn step_odometer(idx: &mut [usize], shape: &[usize]) {
    for k in 0..idx.len() {
        idx[k] += 1;
        if idx[k] < shape[k] {
            return;
        }
        idx[k] = 0;
    }
}

/// Inverse of [`DenseTensor::matricize`]: folds an `I_n x rest` matrix back
/// into `target_shape` along 1-based `mode`. Also usable as a general
/// grouped reshape when `mode == 1`.
pub fn tensorize(matrix: &DenseTensor, target_shape: &[usize], mode: usize) -> Result<DenseTensor> {
    let order = target_shape.len();
    if mode == 0 || mode > order {
        return Err(CoreError::ModeOutOfRange { mode, order });
    }
    let m0 = mode - 1;
    let expected: usize = target_shape.iter().product();
    if matrix.len() != expected {
        return Err(CoreError::DataLength {
            shape: target_shape.to_vec(),
            len: matrix.len(),
            expected,
        });
    }
    if matrix.order() != 2 || matrix.shape()[0] != target_shape[m0] {
        return Err(CoreError::ShapeMismatch {
            expected: vec![target_shape[m0], expected / target_shape[m0].max(1)],
            got: matrix.shape().to_vec(),
            context: "tensorize input".into(),
        });
    }
    // Undo matricize: reshape to (I_n, others...) then move mode n back.
    let mut moved_shape = Vec::with_capacity(order);
    moved_shape.push(target_shape[m0]);
    moved_shape.extend(
        target_shape
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != m0)
            .map(|(_, &s)| s),
    );
    let moved = matrix.reshape(&moved_shape)?;
    // moved mode 0 goes to position m0; the rest keep their relative order.
    let mut perm = Vec::with_capacity(order);
    for k in 0..order {
        if k == m0 {
            perm.push(0);
        } else if k < m0 {
            perm.push(k + 1);
        } else {
            perm.push(k);
        }
    }
    moved.permute(&perm)
}

/// Contraction axes: pairs of (mode in left operand, mode in right operand),
/// 1-based. Contracted sizes must agree pairwise and no mode may repeat.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeSpec {
    pairs: Vec<(usize, usize)>,
}

impl ModeSpec {
    pub fn new(pairs: Vec<(usize, usize)>) -> Result<Self> {
        for (i, &(a, b)) in pairs.iter().enumerate() {
            for &(a2, b2) in &pairs[i + 1..] {
                if a == a2 {
                    return Err(CoreError::DuplicateMode { mode: a });
                }
                if b == b2 {
                    return Err(CoreError::DuplicateMode { mode: b });
                }
            }
        }
        Ok(Self { pairs })
    }

    /// Single-pair contraction over mode `n` of the left and `m` of the right.
    pub fn single(n: usize, m: usize) -> Self {
        Self {
            pairs: vec![(n, m)],
        }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

/// Contracts `a` and `b` over the paired modes. Output modes are `a`'s
/// uncontracted modes in order followed by `b`'s uncontracted modes in
/// order; for multiple pairs the summation runs jointly over all of them.
pub fn contract(a: &DenseTensor, b: &DenseTensor, spec: &ModeSpec) -> Result<DenseTensor> {
    let (na, nb) = (a.order(), b.order());
    for &(pa, pb) in spec.pairs() {
        if pa == 0 || pa > na {
            return Err(CoreError::ModeOutOfRange {
                mode: pa,
                order: na,
            });
        }
        if pb == 0 || pb > nb {
            return Err(CoreError::ModeOutOfRange {
                mode: pb,
                order: nb,
            });
        }
        if a.shape()[pa - 1] != b.shape()[pb - 1] {
            return Err(CoreError::ContractionDimMismatch {
                left_mode: pa,
                left_size: a.shape()[pa - 1],
                right_mode: pb,
                right_size: b.shape()[pb - 1],
            });
        }
    }

    let con_a: Vec<usize> = spec.pairs().iter().map(|&(pa, _)| pa - 1).collect();
    let con_b: Vec<usize> = spec.pairs().iter().map(|&(_, pb)| pb - 1).collect();
    let unc_a: Vec<usize> = (0..na).filter(|k| !con_a.contains(k)).collect();
    let unc_b: Vec<usize> = (0..nb).filter(|k| !con_b.contains(k)).collect();

    // Left: (uncontracted..., contracted in pair order) -> matrix.
    let mut perm_a = unc_a.clone();
    perm_a.extend(&con_a);
    let rows_a: usize = unc_a.iter().map(|&k| a.shape()[k]).product();
    let inner: usize = con_a.iter().map(|&k| a.shape()[k]).product();
    let left = a.permute(&perm_a)?.reshape(&[rows_a, inner])?;

    // Right: (contracted in pair order, uncontracted...) -> matrix.
    let mut perm_b = con_b.clone();
    perm_b.extend(&unc_b);
    let cols_b: usize = unc_b.iter().map(|&k| b.shape()[k]).product();
    let right = b.permute(&perm_b)?.reshape(&[inner, cols_b])?;

    let prod = left.matmul(&right)?;
    let mut out_shape: Vec<usize> = unc_a.iter().map(|&k| a.shape()[k]).collect();
    out_shape.extend(unc_b.iter().map(|&k| b.shape()[k]));
    prod.reshape(&out_shape)
}

/// Applies a `J x I_mode` matrix to 1-based `mode` of `x`, keeping the mode
/// in place: the mode size changes from `I_mode` to `J`. Works directly on
/// the strided layout, slab by slab, with no intermediate permutes.
pub fn mode_apply(w: &DenseTensor, x: &DenseTensor, mode: usize) -> Result<DenseTensor> {
    let (left, i, right) = mode_apply_geometry(w, x, mode)?;
    let j = w.shape()[0];
    let mut target = x.shape().to_vec();
    target[mode - 1] = j;
    let mut out = DenseTensor::zeros(&target);

    // Buffer layout: x[l + left*(ii + i*r)], out[l + left*(jj + j*r)].
    for r in 0..right {
        let x_slab = &x.data[left * i * r..left * i * (r + 1)];
        let out_slab = &mut out.data[left * j * r..left * j * (r + 1)];
        for ii in 0..i {
            let x_col = &x_slab[left * ii..left * (ii + 1)];
            for jj in 0..j {
                let wv = w.data[jj + j * ii];
                if wv == 0.0 {
                    continue;
                }
                let out_col = &mut out_slab[left * jj..left * (jj + 1)];
                for l in 0..left {
                    out_col[l] += wv * x_col[l];
                }
            }
        }
    }
    Ok(out)
}

/// Validates shapes for a mode application and returns
/// `(left block, mode size, right block)` of the strided layout.
fn mode_apply_geometry(
    w: &DenseTensor,
    x: &DenseTensor,
    mode: usize,
) -> Result<(usize, usize, usize)> {
    if w.order() != 2 {
        return Err(CoreError::ShapeMismatch {
            expected: vec![0, 0],
            got: w.shape().to_vec(),
            context: "mode_apply weight must be a matrix".into(),
        });
    }
    if mode == 0 || mode > x.order() {
        return Err(CoreError::ModeOutOfRange {
            mode,
            order: x.order(),
        });
    }
    let i = x.shape()[mode - 1];
    if w.shape()[1] != i {
        return Err(CoreError::ShapeMismatch {
            expected: vec![w.shape()[1]],
            got: vec![i],
            context: format!("mode {mode} size vs matrix columns"),
        });
    }
    let left: usize = x.shape()[..mode - 1].iter().product();
    let right: usize = x.shape()[mode..].iter().product();
    Ok((left, i, right))
}

/// Gradient of [`mode_apply`] with respect to the matrix:
/// `dW[j, i] = sum over slabs of <g column j, x column i>`.
pub fn mode_apply_weight_grad(
    g: &DenseTensor,
    x: &DenseTensor,
    w_shape: (usize, usize),
    mode: usize,
) -> Result<DenseTensor> {
    let (j, i) = w_shape;
    let m0 = mode - 1;
    let left: usize = x.shape()[..m0].iter().product();
    let right: usize = x.shape()[m0 + 1..].iter().product();
    debug_assert_eq!(g.shape()[m0], j);
    debug_assert_eq!(x.shape()[m0], i);
    let mut dw = DenseTensor::zeros(&[j, i]);
    for r in 0..right {
        let x_slab = &x.data[left * i * r..left * i * (r + 1)];
        let g_slab = &g.data[left * j * r..left * j * (r + 1)];
        for ii in 0..i {
            let x_col = &x_slab[left * ii..left * (ii + 1)];
            for jj in 0..j {
                let g_col = &g_slab[left * jj..left * (jj + 1)];
                let mut sum = 0.0;
                for l in 0..left {
                    sum += g_col[l] * x_col[l];
                }
                dw.data[jj + j * ii] += sum;
            }
        }
    }
    Ok(dw)
}

/// Stacks equally shaped tensors along a new leading mode.
pub fn stack(tensors: &[DenseTensor]) -> Result<DenseTensor> {
    let first = tensors.first().ok_or_else(|| CoreError::DataLength {
        shape: vec![0],
        len: 0,
        expected: 1,
    })?;
    let b = tensors.len();
    let mut shape = Vec::with_capacity(first.order() + 1);
    shape.push(b);
    shape.extend_from_slice(first.shape());
    let mut out = DenseTensor::zeros(&shape);
    for (i, t) in tensors.iter().enumerate() {
        if t.shape() != first.shape() {
            return Err(CoreError::ShapeMismatch {
                expected: first.shape().to_vec(),
                got: t.shape().to_vec(),
                context: format!("stack member {i}"),
            });
        }
        for (lin, &v) in t.data().iter().enumerate() {
            out.data[i + b * lin] = v;
        }
    }
    Ok(out)
}

/// Splits a stacked `(B, ...)` tensor back into `B` tensors.
pub fn unstack(batch: &DenseTensor) -> Result<Vec<DenseTensor>> {
    if batch.order() == 0 {
        return Err(CoreError::ModeOutOfRange { mode: 1, order: 0 });
    }
    let b = batch.shape()[0];
    let rest: Vec<usize> = batch.shape()[1..].to_vec();
    let per: usize = rest.iter().product();
    let mut out = Vec::with_capacity(b);
    for i in 0..b {
        let mut data = Vec::with_capacity(per);
        for lin in 0..per {
            data.push(batch.data[i + b * lin]);
        }
        out.push(DenseTensor::new(rest.clone(), data)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;

    #[test]
    fn scalar_has_empty_shape_and_one_entry() {
        let s = DenseTensor::scalar(3.5);
        assert_eq!(s.order(), 0);
        assert_eq!(s.shape(), &[] as &[usize]);
        assert_eq!(s.data(), &[3.5]);
    }

    #[test]
    fn linear_index_roundtrip_exhaustive_small_shapes() {
        for shape in [vec![2, 3], vec![4], vec![2, 2, 2], vec![3, 1, 2, 2]] {
            let t = DenseTensor::zeros(&shape);
            for lin in 0..t.len() {
                let idx = t.multi_index(lin);
                assert_eq!(t.linear_index(&idx), lin);
                // 1-based closed form: sum (i_k - 1) * prod_{j<k} I_j.
                let mut expect = 0;
                let mut stride = 1;
                for (k, &i0) in idx.iter().enumerate() {
                    expect += ((i0 + 1) - 1) * stride;
                    stride *= shape[k];
                }
                assert_eq!(lin, expect);
            }
        }
    }

    #[test]
    fn kronecker_of_scalar_one_is_identity() {
        let b = DenseTensor::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        // Pad the scalar to matching order with size-1 modes.
        let one = DenseTensor::scalar(1.0).reshape(&[1, 1]).unwrap();
        let c = one.kronecker(&b).unwrap();
        assert_eq!(c.shape(), b.shape());
        assert_eq!(c.data(), b.data());
    }

    #[test]
    fn kronecker_shape_arithmetic() {
        let a = DenseTensor::zeros(&[2, 3]);
        let b = DenseTensor::zeros(&[4, 5]);
        assert_eq!(a.kronecker(&b).unwrap().shape(), &[8, 15]);
    }

    #[test]
    fn kronecker_matches_hand_example() {
        let a = DenseTensor::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let b = DenseTensor::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let c = a.kronecker(&b).unwrap();
        let expect = DenseTensor::from_rows(&[
            vec![0.0, 1.0, 0.0, 2.0],
            vec![1.0, 0.0, 2.0, 0.0],
            vec![0.0, 3.0, 0.0, 4.0],
            vec![3.0, 0.0, 4.0, 0.0],
        ])
        .unwrap();
        assert_eq!(c, expect);
    }

    #[test]
    fn kronecker_order_mismatch_reports_both_orders() {
        let a = DenseTensor::zeros(&[2]);
        let b = DenseTensor::zeros(&[2, 2]);
        let err = a.kronecker(&b).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains('1') && msg.contains('2'), "{msg}");
    }

    #[test]
    fn matricize_mode_one_of_matrix_is_identity() {
        let m = DenseTensor::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        assert_eq!(m.matricize(1).unwrap(), m);
    }

    #[test]
    fn matricize_mode_two_of_cube_matches_index_formula() {
        // 2x2x2 with linear data 0..7.
        let t = DenseTensor::new(vec![2, 2, 2], (0..8).map(f64::from).collect()).unwrap();
        let m = t.matricize(2).unwrap();
        assert_eq!(m.shape(), &[2, 4]);
        let expect =
            DenseTensor::from_rows(&[vec![0.0, 1.0, 4.0, 5.0], vec![2.0, 3.0, 6.0, 7.0]]).unwrap();
        assert_eq!(m, expect);
    }

    #[test]
    fn matricize_out_of_range_mode_errors() {
        let t = DenseTensor::zeros(&[2, 2]);
        assert!(t.matricize(0).is_err());
        assert!(t.matricize(3).is_err());
    }

    #[test]
    fn tensorize_inverts_matricize_order4() {
        let shape = vec![2, 3, 2, 4];
        let t = reference::counting_tensor(&shape);
        for mode in 1..=4 {
            let m = t.matricize(mode).unwrap();
            let back = tensorize(&m, &shape, mode).unwrap();
            assert_eq!(back, t);
        }
    }

    #[test]
    fn tensorize_shape_arithmetic_for_filter_layout() {
        let m = DenseTensor::zeros(&[6, 6]);
        let t = tensorize(&m.reshape(&[2, 18]).unwrap(), &[2, 3, 2, 3], 1).unwrap();
        assert_eq!(t.shape(), &[2, 3, 2, 3]);
    }

    #[test]
    fn matrix_tensor_matrix_roundtrip_bit_exact() {
        let m = reference::counting_tensor(&[4, 6]);
        let t = tensorize(&m.matricize(1).unwrap(), &[4, 6], 1).unwrap();
        assert_eq!(t, m);
        let folded = tensorize(&m, &[4, 3, 2], 1).unwrap().matricize(1).unwrap();
        let back = folded.reshape(&[4, 6]).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn contract_single_pair_shape_convention() {
        // Order-4 against order-4 over one matching mode.
        let a = DenseTensor::zeros(&[2, 3, 4, 5]);
        let b = DenseTensor::zeros(&[4, 6, 7, 8]);
        let c = contract(&a, &b, &ModeSpec::single(3, 1)).unwrap();
        assert_eq!(c.shape(), &[2, 3, 5, 6, 7, 8]);
    }

    #[test]
    fn contract_with_identity_permutes_modes_only() {
        let x = reference::counting_tensor(&[3, 4]);
        let eye = DenseTensor::identity(4);
        // Contract x's mode 2 with identity's column mode; x values survive.
        let c = contract(&x, &eye, &ModeSpec::single(2, 2)).unwrap();
        assert_eq!(c.shape(), &[3, 4]);
        assert_eq!(c, x);
    }

    #[test]
    fn contract_matches_loop_oracle() {
        let a = reference::randomish_tensor(&[3, 4, 2], 17);
        let b = reference::randomish_tensor(&[2, 5], 23);
        let spec = ModeSpec::single(3, 1);
        let got = contract(&a, &b, &spec).unwrap();
        let expect = reference::contract_naive(&a, &b, &spec).unwrap();
        assert_eq!(got.shape(), expect.shape());
        assert!(got.max_abs_diff(&expect) <= 1e-12);
    }

    #[test]
    fn contract_multi_pair_matches_loop_oracle() {
        let a = reference::randomish_tensor(&[2, 3, 4], 5);
        let b = reference::randomish_tensor(&[4, 2, 5], 7);
        let spec = ModeSpec::new(vec![(3, 1), (1, 2)]).unwrap();
        let got = contract(&a, &b, &spec).unwrap();
        let expect = reference::contract_naive(&a, &b, &spec).unwrap();
        assert_eq!(got.shape(), &[3, 5]);
        assert!(got.max_abs_diff(&expect) <= 1e-12);
    }

    #[test]
    fn contract_dimension_mismatch_errors() {
        let a = DenseTensor::zeros(&[2, 3]);
        let b = DenseTensor::zeros(&[4, 5]);
        assert!(contract(&a, &b, &ModeSpec::single(2, 1)).is_err());
    }

    #[test]
    fn mode_spec_rejects_duplicates() {
        assert!(ModeSpec::new(vec![(1, 2), (1, 3)]).is_err());
        assert!(ModeSpec::new(vec![(1, 2), (3, 2)]).is_err());
    }

    #[test]
    fn kronecker_then_matricize_matches_classical_matrix_kron() {
        let a = reference::randomish_tensor(&[3, 2], 11);
        let b = reference::randomish_tensor(&[2, 4], 13);
        let got = a.kronecker(&b).unwrap();
        let expect = reference::kron_entry_formula(&a, &b).unwrap();
        assert!(got.max_abs_diff(&expect) <= 1e-15);
        // Unfolding along mode 1 leaves a matrix unchanged.
        assert_eq!(got.matricize(1).unwrap(), got);
    }

    #[test]
    fn mode_apply_matches_naive() {
        let x = reference::randomish_tensor(&[3, 4, 2], 31);
        let w = reference::randomish_tensor(&[5, 4], 37);
        let got = mode_apply(&w, &x, 2).unwrap();
        let expect = reference::mode_apply_naive(&w, &x, 2).unwrap();
        assert_eq!(got.shape(), &[3, 5, 2]);
        assert!(got.max_abs_diff(&expect) <= 1e-12);
    }

    #[test]
    fn stack_unstack_roundtrip() {
        let a = reference::randomish_tensor(&[2, 3], 1);
        let b = reference::randomish_tensor(&[2, 3], 2);
        let s = stack(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(s.shape(), &[2, 2, 3]);
        let parts = unstack(&s).unwrap();
        assert_eq!(parts[0], a);
        assert_eq!(parts[1], b);
    }
}
