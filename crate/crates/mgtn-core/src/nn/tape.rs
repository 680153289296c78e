//! Reverse-mode differentiation over tensor operations. Layers record their
//! forward pass on a tape; a backward sweep then yields exact gradients for
//! every leaf, including scalar coefficients and tensor-train cores.

use crate::error::{CoreError, Result};
use crate::tensor::{contract, mode_apply, mode_apply_weight_grad, DenseTensor, ModeSpec};

use super::Activation;

/// Handle to a value recorded on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeId(usize);

enum Op {
    Leaf,
    Add(NodeId, NodeId),
    Sub(NodeId, NodeId),
    /// `scalar * tensor`, with the scalar an order-0 node.
    Scale { x: NodeId, s: NodeId },
    Kron(NodeId, NodeId),
    /// Matrix applied to a tensor mode (1-based), mode kept in place.
    ModeApply { w: NodeId, x: NodeId, mode: usize },
    Contract { a: NodeId, b: NodeId, spec: ModeSpec },
    Permute { x: NodeId, perm: Vec<usize> },
    Reshape { x: NodeId },
    /// `y = x * w^T + broadcast(b)` with `x (B, D)`, `w (U, D)`, `b (U)`.
    Linear { x: NodeId, w: NodeId, b: NodeId },
    /// Adds `b` to every slice along the leading mode of `x`.
    BiasAdd { x: NodeId, b: NodeId },
    Activation { x: NodeId, kind: Activation },
    /// Picks entry `indices[r]` from each row of a `(B, A)` matrix.
    SelectPerRow { x: NodeId, indices: Vec<usize> },
    /// Mean squared error against a constant target node.
    MseLoss { pred: NodeId, target: NodeId },
}

struct TapeNode {
    value: DenseTensor,
    op: Op,
}

/// Gradients per node after a backward sweep.
pub struct Gradients {
    grads: Vec<Option<DenseTensor>>,
}

impl Gradients {
    /// Gradient of the swept output with respect to `id`; zero tensors are
    /// materialized on demand.
    pub fn get(&self, id: NodeId, shape: &[usize]) -> DenseTensor {
        match &self.grads[id.0] {
            Some(g) => g.clone(),
            None => DenseTensor::zeros(shape),
        }
    }
}

#[derive(Default)]
pub struct Tape {
    nodes: Vec<TapeNode>,
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn value(&self, id: NodeId) -> &DenseTensor {
        &self.nodes[id.0].value
    }

    fn push(&mut self, value: DenseTensor, op: Op) -> NodeId {
        self.nodes.push(TapeNode { value, op });
        NodeId(self.nodes.len() - 1)
    }

    /// Records a leaf; used for parameters and constants alike.
    pub fn leaf(&mut self, value: DenseTensor) -> NodeId {
        self.push(value, Op::Leaf)
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        let v = self.value(a).add(self.value(b))?;
        Ok(self.push(v, Op::Add(a, b)))
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        let v = self.value(a).sub(self.value(b))?;
        Ok(self.push(v, Op::Sub(a, b)))
    }

    pub fn scale(&mut self, x: NodeId, s: NodeId) -> Result<NodeId> {
        if self.value(s).order() != 0 {
            return Err(CoreError::ShapeMismatch {
                expected: vec![],
                got: self.value(s).shape().to_vec(),
                context: "scale coefficient must be order-0".into(),
            });
        }
        let sv = self.value(s).data()[0];
        let v = self.value(x).scale(sv);
        Ok(self.push(v, Op::Scale { x, s }))
    }

    pub fn kron(&mut self, a: NodeId, b: NodeId) -> Result<NodeId> {
        let v = self.value(a).kronecker(self.value(b))?;
        Ok(self.push(v, Op::Kron(a, b)))
    }

    pub fn mode_apply(&mut self, w: NodeId, x: NodeId, mode: usize) -> Result<NodeId> {
        let v = mode_apply(self.value(w), self.value(x), mode)?;
        Ok(self.push(v, Op::ModeApply { w, x, mode }))
    }

    pub fn contract(&mut self, a: NodeId, b: NodeId, spec: ModeSpec) -> Result<NodeId> {
        let v = contract(self.value(a), self.value(b), &spec)?;
        Ok(self.push(v, Op::Contract { a, b, spec }))
    }

    pub fn permute(&mut self, x: NodeId, perm: Vec<usize>) -> Result<NodeId> {
        let v = self.value(x).permute(&perm)?;
        Ok(self.push(v, Op::Permute { x, perm }))
    }

    pub fn reshape(&mut self, x: NodeId, shape: &[usize]) -> Result<NodeId> {
        let v = self.value(x).reshape(shape)?;
        Ok(self.push(v, Op::Reshape { x }))
    }

    pub fn linear(&mut self, x: NodeId, w: NodeId, b: NodeId) -> Result<NodeId> {
        let xv = self.value(x);
        let wv = self.value(w);
        let bv = self.value(b);
        if xv.order() != 2 || wv.order() != 2 || xv.shape()[1] != wv.shape()[1] {
            return Err(CoreError::ShapeMismatch {
                expected: wv.shape().to_vec(),
                got: xv.shape().to_vec(),
                context: "linear input width vs weight columns".into(),
            });
        }
        if bv.shape() != [wv.shape()[0]] {
            return Err(CoreError::ShapeMismatch {
                expected: vec![wv.shape()[0]],
                got: bv.shape().to_vec(),
                context: "linear bias".into(),
            });
        }
        let mut v = xv.matmul(&wv.transpose()?)?;
        let (batch, units) = (v.shape()[0], v.shape()[1]);
        for u in 0..units {
            let add = bv.data()[u];
            for r in 0..batch {
                v.data_mut()[r + batch * u] += add;
            }
        }
        Ok(self.push(v, Op::Linear { x, w, b }))
    }

    pub fn bias_add(&mut self, x: NodeId, b: NodeId) -> Result<NodeId> {
        let xv = self.value(x);
        let bv = self.value(b);
        if xv.order() == 0 || xv.shape()[1..] != *bv.shape() {
            return Err(CoreError::ShapeMismatch {
                expected: bv.shape().to_vec(),
                got: xv.shape().to_vec(),
                context: "bias shape vs trailing modes".into(),
            });
        }
        let batch = xv.shape()[0];
        let mut v = xv.clone();
        for (lin, chunkval) in bv.data().iter().enumerate() {
            for r in 0..batch {
                v.data_mut()[r + batch * lin] += chunkval;
            }
        }
        Ok(self.push(v, Op::BiasAdd { x, b }))
    }

    pub fn activation(&mut self, x: NodeId, kind: Activation) -> NodeId {
        let v = self.value(x).map(|t| kind.apply(t));
        self.push(v, Op::Activation { x, kind })
    }

    pub fn select_per_row(&mut self, x: NodeId, indices: Vec<usize>) -> Result<NodeId> {
        let xv = self.value(x);
        if xv.order() != 2 || indices.len() != xv.shape()[0] {
            return Err(CoreError::ShapeMismatch {
                expected: vec![indices.len(), 0],
                got: xv.shape().to_vec(),
                context: "select_per_row".into(),
            });
        }
        let batch = xv.shape()[0];
        let mut out = Vec::with_capacity(batch);
        for (r, &c) in indices.iter().enumerate() {
            out.push(xv.get(&[r, c]));
        }
        let v = DenseTensor::new(vec![batch], out)?;
        Ok(self.push(v, Op::SelectPerRow { x, indices }))
    }

    pub fn mse_loss(&mut self, pred: NodeId, target: NodeId) -> Result<NodeId> {
        let p = self.value(pred);
        let t = self.value(target);
        let diff = p.sub(t)?;
        let n = diff.len() as f64;
        let v = diff.data().iter().map(|d| d * d).sum::<f64>() / n;
        Ok(self.push(DenseTensor::scalar(v), Op::MseLoss { pred, target }))
    }

    /// Backward sweep from `output`, which must be order-0.
    pub fn backward(&self, output: NodeId) -> Result<Gradients> {
        let mut grads: Vec<Option<DenseTensor>> = (0..self.nodes.len()).map(|_| None).collect();
        grads[output.0] = Some(DenseTensor::scalar(1.0));

        for idx in (0..=output.0).rev() {
            let Some(g) = grads[idx].take() else {
                continue;
            };
            match &self.nodes[idx].op {
                Op::Leaf => {}
                Op::Add(a, b) => {
                    accumulate(&mut grads, *a, g.clone())?;
                    accumulate(&mut grads, *b, g.clone())?;
                }
                Op::Sub(a, b) => {
                    accumulate(&mut grads, *a, g.clone())?;
                    accumulate(&mut grads, *b, g.scale(-1.0))?;
                }
                Op::Scale { x, s } => {
                    let sv = self.value(*s).data()[0];
                    accumulate(&mut grads, *x, g.scale(sv))?;
                    let ds = self.value(*x).dot(&g)?;
                    accumulate(&mut grads, *s, DenseTensor::scalar(ds))?;
                }
                Op::Kron(a, b) => {
                    let (da, db) = kron_backward(self.value(*a), self.value(*b), &g)?;
                    accumulate(&mut grads, *a, da)?;
                    accumulate(&mut grads, *b, db)?;
                }
                Op::ModeApply { w, x, mode } => {
                    let wv = self.value(*w);
                    let xv = self.value(*x);
                    let dw = mode_apply_weight_grad(
                        &g,
                        xv,
                        (wv.shape()[0], wv.shape()[1]),
                        *mode,
                    )?;
                    accumulate(&mut grads, *w, dw)?;
                    let dx = mode_apply(&wv.transpose()?, &g, *mode)?;
                    accumulate(&mut grads, *x, dx)?;
                }
                Op::Contract { a, b, spec } => {
                    let (da, db) =
                        contract_backward(self.value(*a), self.value(*b), spec, &g)?;
                    accumulate(&mut grads, *a, da)?;
                    accumulate(&mut grads, *b, db)?;
                }
                Op::Permute { x, perm } => {
                    let mut inverse = vec![0usize; perm.len()];
                    for (j, &p) in perm.iter().enumerate() {
                        inverse[p] = j;
                    }
                    accumulate(&mut grads, *x, g.permute(&inverse)?)?;
                }
                Op::Reshape { x } => {
                    let dx = g.reshape(self.value(*x).shape())?;
                    accumulate(&mut grads, *x, dx)?;
                }
                Op::Linear { x, w, b } => {
                    let xv = self.value(*x);
                    let wv = self.value(*w);
                    let dx = g.matmul(wv)?;
                    accumulate(&mut grads, *x, dx)?;
                    let dw = g.transpose()?.matmul(xv)?;
                    accumulate(&mut grads, *w, dw)?;
                    let (batch, units) = (g.shape()[0], g.shape()[1]);
                    let mut db = DenseTensor::zeros(&[units]);
                    for u in 0..units {
                        let mut sum = 0.0;
                        for r in 0..batch {
                            sum += g.data()[r + batch * u];
                        }
                        db.data_mut()[u] = sum;
                    }
                    accumulate(&mut grads, *b, db)?;
                }
                Op::BiasAdd { x, b } => {
                    accumulate(&mut grads, *x, g.clone())?;
                    let batch = g.shape()[0];
                    let bv_shape = self.value(*b).shape().to_vec();
                    let per: usize = bv_shape.iter().product();
                    let mut db = DenseTensor::zeros(&bv_shape);
                    for lin in 0..per {
                        let mut sum = 0.0;
                        for r in 0..batch {
                            sum += g.data()[r + batch * lin];
                        }
                        db.data_mut()[lin] = sum;
                    }
                    accumulate(&mut grads, *b, db)?;
                }
                Op::Activation { x, kind } => {
                    let xv = self.value(*x);
                    let yv = &self.nodes[idx].value;
                    let dx = match kind {
                        Activation::Linear => g.clone(),
                        Activation::Relu => g
                            .zip_with(xv, |go, xi| if xi > 0.0 { go } else { 0.0 })?,
                        Activation::Tanh => g.zip_with(yv, |go, yo| go * (1.0 - yo * yo))?,
                    };
                    accumulate(&mut grads, *x, dx)?;
                }
                Op::SelectPerRow { x, indices } => {
                    let xv = self.value(*x);
                    let batch = xv.shape()[0];
                    let mut dx = DenseTensor::zeros(xv.shape());
                    for (r, &c) in indices.iter().enumerate() {
                        dx.data_mut()[r + batch * c] += g.data()[r];
                    }
                    accumulate(&mut grads, *x, dx)?;
                }
                Op::MseLoss { pred, target } => {
                    let p = self.value(*pred);
                    let t = self.value(*target);
                    let n = p.len() as f64;
                    let go = g.data()[0];
                    let dp = p.zip_with(t, |pi, ti| go * 2.0 * (pi - ti) / n)?;
                    accumulate(&mut grads, *pred, dp)?;
                }
            }
            grads[idx] = Some(g);
        }
        Ok(Gradients { grads })
    }
}

fn accumulate(
    grads: &mut [Option<DenseTensor>],
    id: NodeId,
    delta: DenseTensor,
) -> Result<()> {
    match &mut grads[id.0] {
        Some(existing) => {
            *existing = existing.add(&delta)?;
        }
        slot @ None => {
            *slot = Some(delta);
        }
    }
    Ok(())
}

fn kron_backward(
    a: &DenseTensor,
    b: &DenseTensor,
    g: &DenseTensor,
) -> Result<(DenseTensor, DenseTensor)> {
    let n = a.order();
    let mut da = DenseTensor::zeros(a.shape());
    let mut db = DenseTensor::zeros(b.shape());
    let mut ia = vec![0usize; n];
    let mut ib = vec![0usize; n];
    for lin in 0..g.len() {
        let idx = g.multi_index(lin);
        for k in 0..n {
            ia[k] = idx[k] / b.shape()[k];
            ib[k] = idx[k] % b.shape()[k];
        }
        let gv = g.data()[lin];
        let a_lin = a.linear_index(&ia);
        let b_lin = b.linear_index(&ib);
        da.data_mut()[a_lin] += gv * b.data()[b_lin];
        db.data_mut()[b_lin] += gv * a.data()[a_lin];
    }
    Ok((da, db))
}

/// Gradients of `contract(a, b, spec)` with respect to both operands.
fn contract_backward(
    a: &DenseTensor,
    b: &DenseTensor,
    spec: &ModeSpec,
    g: &DenseTensor,
) -> Result<(DenseTensor, DenseTensor)> {
    let (na, nb) = (a.order(), b.order());
    let con_a: Vec<usize> = spec.pairs().iter().map(|&(pa, _)| pa - 1).collect();
    let con_b: Vec<usize> = spec.pairs().iter().map(|&(_, pb)| pb - 1).collect();
    let unc_a: Vec<usize> = (0..na).filter(|k| !con_a.contains(k)).collect();
    let unc_b: Vec<usize> = (0..nb).filter(|k| !con_b.contains(k)).collect();

    // dA = contract(g, b) over b's uncontracted modes, then reorder.
    let da = {
        let pairs: Vec<(usize, usize)> = unc_b
            .iter()
            .enumerate()
            .map(|(j, &q)| (unc_a.len() + j + 1, q + 1))
            .collect();
        let r = contract(g, b, &ModeSpec::new(pairs)?)?;
        // r modes: a's uncontracted in order, then b's contracted ascending.
        let mut con_b_sorted = con_b.clone();
        con_b_sorted.sort_unstable();
        let mut perm = Vec::with_capacity(na);
        for p in 0..na {
            if let Some(i) = unc_a.iter().position(|&u| u == p) {
                perm.push(i);
            } else {
                let k = con_a.iter().position(|&c| c == p).unwrap();
                let q = con_b[k];
                let rank = con_b_sorted.iter().position(|&s| s == q).unwrap();
                perm.push(unc_a.len() + rank);
            }
        }
        r.permute(&perm)?
    };

    // dB = contract(a, g) over a's uncontracted modes, then reorder.
    let db = {
        let pairs: Vec<(usize, usize)> = unc_a
            .iter()
            .enumerate()
            .map(|(i, &p)| (p + 1, i + 1))
            .collect();
        let r = contract(a, g, &ModeSpec::new(pairs)?)?;
        // r modes: a's contracted ascending, then b's uncontracted in order.
        let mut con_a_sorted = con_a.clone();
        con_a_sorted.sort_unstable();
        let mut perm = Vec::with_capacity(nb);
        for q in 0..nb {
            if let Some(j) = unc_b.iter().position(|&u| u == q) {
                perm.push(con_a_sorted.len() + j);
            } else {
                let k = con_b.iter().position(|&c| c == q).unwrap();
                let p = con_a[k];
                let rank = con_a_sorted.iter().position(|&s| s == p).unwrap();
                perm.push(rank);
            }
        }
        r.permute(&perm)?
    };

    Ok((da, db))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;

    /// Central finite differences of a scalar-valued tape program with
    /// respect to one leaf entry.
    fn numeric_grad(
        build: &dyn Fn(&mut Tape, &[DenseTensor]) -> NodeId,
        leaves: &[DenseTensor],
        leaf: usize,
        entry: usize,
        h: f64,
    ) -> f64 {
        let mut plus = leaves.to_vec();
        plus[leaf].data_mut()[entry] += h;
        let mut minus = leaves.to_vec();
        minus[leaf].data_mut()[entry] -= h;
        let eval = |ls: &[DenseTensor]| {
            let mut t = Tape::new();
            let out = build(&mut t, ls);
            t.value(out).data()[0]
        };
        (eval(&plus) - eval(&minus)) / (2.0 * h)
    }

    fn check_all_grads(
        build: &dyn Fn(&mut Tape, &[DenseTensor]) -> NodeId,
        leaves: &[DenseTensor],
        tol: f64,
    ) {
        let mut tape = Tape::new();
        let out = build(&mut tape, leaves);
        let grads = tape.backward(out).unwrap();
        for (li, leaf) in leaves.iter().enumerate() {
            let g = grads.get(NodeId(li), leaf.shape());
            for e in 0..leaf.len() {
                let fd = numeric_grad(build, leaves, li, e, 1e-5);
                let bp = g.data()[e];
                let denom = fd.abs().max(bp.abs()).max(1e-6);
                assert!(
                    ((fd - bp) / denom).abs() < tol,
                    "leaf {li} entry {e}: fd {fd} vs bp {bp}"
                );
            }
        }
    }

    // Leaves must be created first and in order so NodeId(i) matches leaf i.
    fn bind_all(t: &mut Tape, leaves: &[DenseTensor]) -> Vec<NodeId> {
        leaves.iter().map(|l| t.leaf(l.clone())).collect()
    }

    #[test]
    fn grad_of_scale_and_add() {
        let leaves = vec![
            reference::randomish_tensor(&[2, 3], 1),
            DenseTensor::scalar(0.7),
            reference::randomish_tensor(&[2, 3], 2),
        ];
        let build = |t: &mut Tape, ls: &[DenseTensor]| {
            let ids = bind_all(t, ls);
            let scaled = t.scale(ids[0], ids[1]).unwrap();
            let sum = t.add(scaled, ids[2]).unwrap();
            let target = t.leaf(DenseTensor::zeros(&[2, 3]));
            t.mse_loss(sum, target).unwrap()
        };
        check_all_grads(&build, &leaves, 1e-6);
    }

    #[test]
    fn grad_of_mode_apply() {
        let leaves = vec![
            reference::randomish_tensor(&[4, 3], 3), // w
            reference::randomish_tensor(&[2, 3, 2], 4), // x, mode 2 has size 3
        ];
        let build = |t: &mut Tape, ls: &[DenseTensor]| {
            let ids = bind_all(t, ls);
            let y = t.mode_apply(ids[0], ids[1], 2).unwrap();
            let target = t.leaf(DenseTensor::zeros(&[2, 4, 2]));
            t.mse_loss(y, target).unwrap()
        };
        check_all_grads(&build, &leaves, 1e-6);
    }

    #[test]
    fn grad_of_single_pair_contract() {
        let leaves = vec![
            reference::randomish_tensor(&[2, 3, 4], 5),
            reference::randomish_tensor(&[4, 2], 6),
        ];
        let build = |t: &mut Tape, ls: &[DenseTensor]| {
            let ids = bind_all(t, ls);
            let c = t
                .contract(ids[0], ids[1], ModeSpec::single(3, 1))
                .unwrap();
            let target = t.leaf(DenseTensor::zeros(&[2, 3, 2]));
            t.mse_loss(c, target).unwrap()
        };
        check_all_grads(&build, &leaves, 1e-6);
    }

    #[test]
    fn grad_of_multi_pair_contract() {
        let leaves = vec![
            reference::randomish_tensor(&[2, 3, 4], 7),
            reference::randomish_tensor(&[4, 5, 2], 8),
        ];
        let build = |t: &mut Tape, ls: &[DenseTensor]| {
            let ids = bind_all(t, ls);
            let spec = ModeSpec::new(vec![(3, 1), (1, 3)]).unwrap();
            let c = t.contract(ids[0], ids[1], spec).unwrap();
            let target = t.leaf(DenseTensor::zeros(&[3, 5]));
            t.mse_loss(c, target).unwrap()
        };
        check_all_grads(&build, &leaves, 1e-6);
    }

    #[test]
    fn grad_of_kron() {
        let leaves = vec![
            reference::randomish_tensor(&[2, 2], 9),
            reference::randomish_tensor(&[3, 2], 10),
        ];
        let build = |t: &mut Tape, ls: &[DenseTensor]| {
            let ids = bind_all(t, ls);
            let k = t.kron(ids[0], ids[1]).unwrap();
            let target = t.leaf(DenseTensor::zeros(&[6, 4]));
            t.mse_loss(k, target).unwrap()
        };
        check_all_grads(&build, &leaves, 1e-6);
    }

    #[test]
    fn grad_of_linear_and_activations() {
        let leaves = vec![
            reference::randomish_tensor(&[3, 4], 11), // x
            reference::randomish_tensor(&[2, 4], 12), // w
            reference::randomish_tensor(&[2], 13),    // b
        ];
        for kind in [Activation::Tanh, Activation::Linear, Activation::Relu] {
            let build = move |t: &mut Tape, ls: &[DenseTensor]| {
                let ids = bind_all(t, ls);
                let y = t.linear(ids[0], ids[1], ids[2]).unwrap();
                let a = t.activation(y, kind);
                let target = t.leaf(DenseTensor::filled(&[3, 2], 0.1));
                t.mse_loss(a, target).unwrap()
            };
            check_all_grads(&build, &leaves, 1e-5);
        }
    }

    #[test]
    fn grad_of_permute_reshape_bias_select() {
        let leaves = vec![
            reference::randomish_tensor(&[2, 3, 2], 14),
            reference::randomish_tensor(&[3, 2], 15), // bias over trailing modes after permute
        ];
        let build = |t: &mut Tape, ls: &[DenseTensor]| {
            let ids = bind_all(t, ls);
            let p = t.permute(ids[0], vec![2, 1, 0]).unwrap(); // (2,3,2)
            let biased = t.bias_add(p, ids[1]).unwrap();
            let flat = t.reshape(biased, &[2, 6]).unwrap();
            let sel = t.select_per_row(flat, vec![1, 4]).unwrap();
            let target = t.leaf(DenseTensor::zeros(&[2]));
            t.mse_loss(sel, target).unwrap()
        };
        check_all_grads(&build, &leaves, 1e-6);
    }

    #[test]
    fn zero_residual_gives_zero_gradients() {
        let x = reference::randomish_tensor(&[2, 2], 16);
        let mut t = Tape::new();
        let xid = t.leaf(x.clone());
        let target = t.leaf(x.clone());
        let loss = t.mse_loss(xid, target).unwrap();
        assert_eq!(t.value(loss).data()[0], 0.0);
        let grads = t.backward(loss).unwrap();
        let g = grads.get(xid, x.shape());
        assert!(g.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn beta_gradient_vanishes_for_zero_adjacency() {
        // scale(A, beta) with A = 0 gives d(beta) = 0 regardless of downstream.
        let mut t = Tape::new();
        let a = t.leaf(DenseTensor::zeros(&[3, 3]));
        let beta = t.leaf(DenseTensor::scalar(0.5));
        let scaled = t.scale(a, beta).unwrap();
        let eye = t.leaf(DenseTensor::identity(3));
        let f = t.add(eye, scaled).unwrap();
        let x = t.leaf(reference::randomish_tensor(&[2, 3, 2], 17));
        let y = t.mode_apply(f, x, 2).unwrap();
        let target = t.leaf(DenseTensor::zeros(&[2, 3, 2]));
        let loss = t.mse_loss(y, target).unwrap();
        let grads = t.backward(loss).unwrap();
        assert_eq!(grads.get(beta, &[]).data()[0], 0.0);
    }
}
