//! Tensor-train representations: sequential-SVD decomposition of dense
//! tensors into chains of order-3 cores, reconstruction, and tensor-train
//! structured linear maps used to compress dense layers.

mod svd;

pub use svd::{svd, Svd};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::rng::uniform_in;
use crate::tensor::{contract, DenseTensor, ModeSpec};

/// Chain of order-3 cores `G(n)` with shape `(R_{n-1}, I_n, R_n)` and
/// boundary ranks `R_0 = R_N = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TtVector {
    cores: Vec<DenseTensor>,
    ranks: Vec<usize>,
}

/// Rank selection policy for [`tt_svd`].
#[derive(Debug, Clone)]
pub enum Truncation {
    /// Hard caps `(R_0, ..., R_N)`; boundary entries must be 1.
    Ranks(Vec<usize>),
    /// Relative accuracy `delta` in (0, 1); each sweep step keeps the
    /// smallest rank whose discarded tail satisfies the per-step budget
    /// `delta * ||x||_F / sqrt(N - 1)`.
    Tolerance(f64),
}

impl TtVector {
    pub fn new(cores: Vec<DenseTensor>) -> Result<Self> {
        if cores.is_empty() {
            return Err(CoreError::InvalidRanks {
                ranks: vec![],
                reason: "a tensor-train needs at least one core".into(),
            });
        }
        let mut ranks = Vec::with_capacity(cores.len() + 1);
        ranks.push(cores[0].shape()[0]);
        for (n, core) in cores.iter().enumerate() {
            if core.order() != 3 {
                return Err(CoreError::InvalidRanks {
                    ranks,
                    reason: format!("core {n} has order {}, expected 3", core.order()),
                });
            }
            if core.shape()[0] != ranks[n] {
                let reason = format!(
                    "core {n} left rank {} does not match previous right rank {}",
                    core.shape()[0],
                    ranks[n]
                );
                return Err(CoreError::InvalidRanks { ranks, reason });
            }
            ranks.push(core.shape()[2]);
        }
        if ranks[0] != 1 || *ranks.last().unwrap() != 1 {
            return Err(CoreError::InvalidRanks {
                ranks,
                reason: "boundary ranks must be 1".into(),
            });
        }
        Ok(Self { cores, ranks })
    }

    pub fn cores(&self) -> &[DenseTensor] {
        &self.cores
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn mode_sizes(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.shape()[1]).collect()
    }

    /// Number of stored entries across all cores.
    pub fn param_count(&self) -> usize {
        self.cores.iter().map(DenseTensor::len).sum()
    }

    /// Contracts the chain left to right back into a dense tensor.
    pub fn reconstruct(&self) -> Result<DenseTensor> {
        let modes = self.mode_sizes();
        // Accumulator is kept as a (prod of modes so far, R_n) matrix.
        let first = &self.cores[0];
        let mut acc = first.reshape(&[modes[0], self.ranks[1]])?;
        for (n, core) in self.cores.iter().enumerate().skip(1) {
            let r_in = self.ranks[n];
            let r_out = self.ranks[n + 1];
            let flat_core = core.reshape(&[r_in, modes[n] * r_out])?;
            let merged = acc.matmul(&flat_core)?;
            let grown = merged.shape()[0] * modes[n];
            acc = merged.reshape(&[grown, r_out])?;
        }
        acc.reshape(&modes)
    }
}

/// Decomposes `x` into tensor-train form by a left-to-right sweep of thin
/// SVDs, truncating each step according to `truncation`.
pub fn tt_svd(x: &DenseTensor, truncation: &Truncation) -> Result<TtVector> {
    let order = x.order();
    if order < 2 {
        return Err(CoreError::TtOrderTooSmall(order));
    }
    let shape = x.shape().to_vec();
    match truncation {
        Truncation::Ranks(ranks) => {
            if ranks.len() != order + 1 {
                return Err(CoreError::InvalidRanks {
                    ranks: ranks.clone(),
                    reason: format!("expected {} entries for an order-{order} tensor", order + 1),
                });
            }
            if ranks[0] != 1 || ranks[order] != 1 {
                return Err(CoreError::InvalidRanks {
                    ranks: ranks.clone(),
                    reason: "boundary ranks must be 1".into(),
                });
            }
            if ranks.contains(&0) {
                return Err(CoreError::InvalidRanks {
                    ranks: ranks.clone(),
                    reason: "ranks must be positive".into(),
                });
            }
        }
        Truncation::Tolerance(delta) => {
            if !(*delta > 0.0 && *delta < 1.0) {
                return Err(CoreError::InvalidTolerance(*delta));
            }
        }
    }

    let step_budget = match truncation {
        Truncation::Tolerance(delta) => {
            delta * x.frobenius_norm() / ((order as f64 - 1.0).sqrt())
        }
        Truncation::Ranks(_) => 0.0,
    };

    let mut cores = Vec::with_capacity(order);
    let mut r_prev = 1usize;
    let mut current = x.reshape(&[shape[0], x.len() / shape[0]])?;

    for n in 0..order - 1 {
        let rest = current.shape()[1];
        let decomp = svd(&current)?;
        let full = decomp.singular_values.len();
        let keep = match truncation {
            Truncation::Ranks(ranks) => ranks[n + 1].min(full),
            Truncation::Tolerance(_) => {
                let mut tail: f64 = 0.0;
                let mut keep = full;
                for r in (1..=full).rev() {
                    let with = tail + decomp.singular_values[r - 1].powi(2);
                    if with.sqrt() <= step_budget {
                        tail = with;
                        keep = r - 1;
                    } else {
                        break;
                    }
                }
                keep.max(1)
            }
        };

        // Columns of u are contiguous, so truncation is a prefix copy.
        let rows = current.shape()[0];
        let u_trunc =
            DenseTensor::new(vec![rows, keep], decomp.u.data()[..rows * keep].to_vec())?;
        cores.push(u_trunc.reshape(&[r_prev, shape[n], keep])?);

        // Carry sigma * vt into the next step.
        let mut carry = DenseTensor::zeros(&[keep, rest]);
        for col in 0..rest {
            for row in 0..keep {
                carry.data_mut()[row + keep * col] =
                    decomp.singular_values[row] * decomp.vt.get(&[row, col]);
            }
        }
        r_prev = keep;
        let next_rows = keep * shape[n + 1];
        current = carry.reshape(&[next_rows, keep * rest / next_rows])?;
    }
    cores.push(current.reshape(&[r_prev, shape[order - 1], 1])?);
    TtVector::new(cores)
}

/// Tensor-train structured linear map from `R^{prod I_n}` to `R^{prod J_n}`
/// stored as order-4 cores `(R_{n-1}, I_n, J_n, R_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TtMatrix {
    cores: Vec<DenseTensor>,
    input_modes: Vec<usize>,
    output_modes: Vec<usize>,
    ranks: Vec<usize>,
}

impl TtMatrix {
    pub fn new(cores: Vec<DenseTensor>) -> Result<Self> {
        if cores.is_empty() {
            return Err(CoreError::InvalidRanks {
                ranks: vec![],
                reason: "a tensor-train matrix needs at least one core".into(),
            });
        }
        let mut ranks = Vec::with_capacity(cores.len() + 1);
        let mut input_modes = Vec::with_capacity(cores.len());
        let mut output_modes = Vec::with_capacity(cores.len());
        ranks.push(cores[0].shape()[0]);
        for (n, core) in cores.iter().enumerate() {
            if core.order() != 4 {
                return Err(CoreError::InvalidRanks {
                    ranks,
                    reason: format!("core {n} has order {}, expected 4", core.order()),
                });
            }
            if core.shape()[0] != ranks[n] {
                let reason = format!(
                    "core {n} left rank {} does not match previous right rank {}",
                    core.shape()[0],
                    ranks[n]
                );
                return Err(CoreError::InvalidRanks { ranks, reason });
            }
            input_modes.push(core.shape()[1]);
            output_modes.push(core.shape()[2]);
            ranks.push(core.shape()[3]);
        }
        if ranks[0] != 1 || *ranks.last().unwrap() != 1 {
            return Err(CoreError::InvalidRanks {
                ranks,
                reason: "boundary ranks must be 1".into(),
            });
        }
        Ok(Self {
            cores,
            input_modes,
            output_modes,
            ranks,
        })
    }

    /// Random map with the given factorizations and ranks; entries drawn
    /// uniformly with a per-core fan-in/fan-out bound.
    pub fn random(
        input_modes: &[usize],
        output_modes: &[usize],
        ranks: &[usize],
        rng: &mut impl Rng,
    ) -> Result<Self> {
        let n = input_modes.len();
        if output_modes.len() != n || ranks.len() != n + 1 {
            return Err(CoreError::InvalidRanks {
                ranks: ranks.to_vec(),
                reason: format!(
                    "need {n} output modes and {} ranks, got {} and {}",
                    n + 1,
                    output_modes.len(),
                    ranks.len()
                ),
            });
        }
        let mut cores = Vec::with_capacity(n);
        for k in 0..n {
            let shape = [ranks[k], input_modes[k], output_modes[k], ranks[k + 1]];
            let fan_in = ranks[k] * input_modes[k];
            let fan_out = output_modes[k] * ranks[k + 1];
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let mut core = DenseTensor::zeros(&shape);
            for v in core.data_mut() {
                *v = uniform_in(rng, bound);
            }
            cores.push(core);
        }
        Self::new(cores)
    }

    pub fn cores(&self) -> &[DenseTensor] {
        &self.cores
    }

    pub fn input_modes(&self) -> &[usize] {
        &self.input_modes
    }

    pub fn output_modes(&self) -> &[usize] {
        &self.output_modes
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn input_len(&self) -> usize {
        self.input_modes.iter().product()
    }

    pub fn output_len(&self) -> usize {
        self.output_modes.iter().product()
    }

    /// Number of stored entries across all cores.
    pub fn param_count(&self) -> usize {
        self.cores.iter().map(DenseTensor::len).sum()
    }

    /// Applies the map to a tensor shaped like the input factorization,
    /// contracting core by core; returns the output factorization shape.
    pub fn apply(&self, x: &DenseTensor) -> Result<DenseTensor> {
        if x.shape() != self.input_modes.as_slice() {
            return Err(CoreError::ShapeMismatch {
                expected: self.input_modes.clone(),
                got: x.shape().to_vec(),
                context: "tensor-train map input".into(),
            });
        }
        // Running tensor: (R_n, J_1..J_n, I_{n+1}..I_N).
        let mut z_shape = vec![1usize];
        z_shape.extend_from_slice(x.shape());
        let mut z = x.reshape(&z_shape)?;
        for (n, core) in self.cores.iter().enumerate() {
            // Contract rank with rank and this step's input mode.
            let i_pos = n + 2; // 1-based position of I_n within z
            let spec = ModeSpec::new(vec![(1, 1), (2, i_pos)])?;
            let mixed = contract(core, &z, &spec)?;
            // (J_n, R_n, J_1..J_{n-1}, I rest) -> (R_n, J_1..J_n, I rest).
            let order = mixed.order();
            let mut perm = Vec::with_capacity(order);
            perm.push(1);
            perm.extend(2..n + 2);
            perm.push(0);
            perm.extend(n + 2..order);
            z = mixed.permute(&perm)?;
        }
        z.reshape(&self.output_modes)
    }

    /// Reconstructs the dense `prod J x prod I` matrix represented by the
    /// chain; used as the reference route when validating [`Self::apply`].
    pub fn to_dense_matrix(&self) -> Result<DenseTensor> {
        // Merge (I_n, J_n) per core and reuse the vector-chain machinery.
        let merged: Vec<DenseTensor> = self
            .cores
            .iter()
            .enumerate()
            .map(|(n, c)| {
                c.reshape(&[
                    self.ranks[n],
                    self.input_modes[n] * self.output_modes[n],
                    self.ranks[n + 1],
                ])
            })
            .collect::<Result<_>>()?;
        let joint = TtVector::new(merged)?.reconstruct()?;

        let rows = self.output_len();
        let cols = self.input_len();
        let mut w = DenseTensor::zeros(&[rows, cols]);
        let n_modes = self.input_modes.len();
        for lin in 0..joint.len() {
            let joint_idx = joint.multi_index(lin);
            let mut row = 0;
            let mut col = 0;
            let mut row_stride = 1;
            let mut col_stride = 1;
            for k in 0..n_modes {
                let i = joint_idx[k] % self.input_modes[k];
                let j = joint_idx[k] / self.input_modes[k];
                col += i * col_stride;
                row += j * row_stride;
                col_stride *= self.input_modes[k];
                row_stride *= self.output_modes[k];
            }
            w.set(&[row, col], joint.data()[lin]);
        }
        Ok(w)
    }
}

/// Splits `value` into `count` near-equal integer factors whose product is
/// `value`; used to factor layer widths into tensor-train output modes.
pub fn near_equal_factors(value: usize, count: usize) -> Vec<usize> {
    assert!(value > 0 && count > 0);
    if count == 1 {
        return vec![value];
    }
    let target = (value as f64).powf(1.0 / count as f64);
    let mut best = 1usize;
    let mut best_dist = f64::INFINITY;
    for d in 1..=value {
        if !value.is_multiple_of(d) {
            continue;
        }
        let dist = (d as f64 - target).abs();
        if dist < best_dist {
            best = d;
            best_dist = dist;
        }
    }
    let mut out = vec![best];
    out.extend(near_equal_factors(value / best, count - 1));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn outer_product_rank_one(vectors: &[Vec<f64>]) -> DenseTensor {
        let shape: Vec<usize> = vectors.iter().map(Vec::len).collect();
        let mut t = DenseTensor::zeros(&shape);
        for lin in 0..t.len() {
            let idx = t.multi_index(lin);
            let mut v = 1.0;
            for (k, &i) in idx.iter().enumerate() {
                v *= vectors[k][i];
            }
            t.data_mut()[lin] = v;
        }
        t
    }

    fn random_tt(modes: &[usize], ranks: &[usize], seed: u64) -> TtVector {
        let mut cores = Vec::new();
        for (n, &m) in modes.iter().enumerate() {
            cores.push(reference::randomish_tensor(
                &[ranks[n], m, ranks[n + 1]],
                seed + n as u64,
            ));
        }
        TtVector::new(cores).unwrap()
    }

    #[test]
    fn rank_one_tensor_decomposes_at_unit_ranks() {
        let x = outer_product_rank_one(&[
            vec![1.0, 2.0],
            vec![0.5, -1.0, 2.0],
            vec![1.0, 3.0],
            vec![-2.0, 1.0],
        ]);
        let tt = tt_svd(&x, &Truncation::Tolerance(1e-10)).unwrap();
        assert_eq!(tt.ranks(), &[1, 1, 1, 1, 1]);
        let back = tt.reconstruct().unwrap();
        assert!(back.max_abs_diff(&x) / x.frobenius_norm() < 1e-12);
    }

    #[test]
    fn order_four_tensor_yields_four_cores() {
        let x = reference::randomish_tensor(&[2, 3, 4, 2], 5);
        let tt = tt_svd(&x, &Truncation::Ranks(vec![1, 2, 4, 2, 1])).unwrap();
        assert_eq!(tt.cores().len(), 4);
        assert_eq!(tt.mode_sizes(), vec![2, 3, 4, 2]);
        assert_eq!(tt.ranks()[0], 1);
        assert_eq!(tt.ranks()[4], 1);
    }

    #[test]
    fn planted_ranks_are_recovered_exactly() {
        let planted = random_tt(&[3, 4, 4, 3], &[1, 2, 2, 2, 1], 11);
        let x = planted.reconstruct().unwrap();
        let tt = tt_svd(&x, &Truncation::Ranks(vec![1, 2, 2, 2, 1])).unwrap();
        let back = tt.reconstruct().unwrap();
        let rel = back.sub(&x).unwrap().frobenius_norm() / x.frobenius_norm();
        assert!(rel <= 1e-8, "relative error {rel}");
    }

    #[test]
    fn full_rank_roundtrip_is_identity() {
        let x = reference::randomish_tensor(&[3, 2, 4, 3], 21);
        let tt = tt_svd(&x, &Truncation::Ranks(vec![1, 64, 64, 64, 1])).unwrap();
        let back = tt.reconstruct().unwrap();
        let rel = back.sub(&x).unwrap().frobenius_norm() / x.frobenius_norm();
        assert!(rel <= 1e-10, "relative error {rel}");
    }

    #[test]
    fn single_core_reconstruction_is_the_core() {
        let core = reference::randomish_tensor(&[1, 5, 1], 3);
        let tt = TtVector::new(vec![core.clone()]).unwrap();
        let back = tt.reconstruct().unwrap();
        assert_eq!(back.shape(), &[5]);
        assert_eq!(back.data(), core.data());
    }

    #[test]
    fn zero_cores_reconstruct_to_zero() {
        let tt = TtVector::new(vec![
            DenseTensor::zeros(&[1, 3, 2]),
            DenseTensor::zeros(&[2, 4, 1]),
        ])
        .unwrap();
        let back = tt.reconstruct().unwrap();
        assert_eq!(back.shape(), &[3, 4]);
        assert!(back.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn invalid_rank_tuples_are_rejected() {
        let x = reference::randomish_tensor(&[2, 2, 2], 4);
        assert!(tt_svd(&x, &Truncation::Ranks(vec![1, 2, 1])).is_err());
        assert!(tt_svd(&x, &Truncation::Ranks(vec![2, 2, 2, 1])).is_err());
        assert!(tt_svd(&x, &Truncation::Ranks(vec![1, 2, 2, 3])).is_err());
        assert!(tt_svd(&DenseTensor::scalar(1.0), &Truncation::Tolerance(0.1)).is_err());
    }

    #[test]
    fn truncation_error_non_increasing_in_rank_cap() {
        let x = reference::randomish_tensor(&[4, 4, 4], 33);
        let mut last = f64::INFINITY;
        for r in 1..=4 {
            let tt = tt_svd(&x, &Truncation::Ranks(vec![1, r, r, 1])).unwrap();
            let err = tt.reconstruct().unwrap().sub(&x).unwrap().frobenius_norm();
            assert!(err <= last + 1e-12, "rank {r}: {err} > {last}");
            last = err;
        }
        // Also when only one cap moves and the other stays fixed.
        let mut last = f64::INFINITY;
        for r in 1..=4 {
            let tt = tt_svd(&x, &Truncation::Ranks(vec![1, r, 3, 1])).unwrap();
            let err = tt.reconstruct().unwrap().sub(&x).unwrap().frobenius_norm();
            assert!(err <= last + 1e-12, "cap {r}: {err} > {last}");
            last = err;
        }
    }

    #[test]
    fn tolerance_mode_truncates_noisy_low_rank_tensors() {
        // Low-rank signal plus small noise: a loose tolerance recovers the
        // planted ranks, a tight one keeps more.
        let planted = random_tt(&[4, 4, 4], &[1, 2, 2, 1], 77);
        let signal = planted.reconstruct().unwrap();
        let noise = reference::randomish_tensor(&[4, 4, 4], 78).scale(1e-6);
        let x = signal.add(&noise).unwrap();
        let loose = tt_svd(&x, &Truncation::Tolerance(1e-3)).unwrap();
        assert!(loose.ranks().iter().max().unwrap() <= &2, "{:?}", loose.ranks());
        let err = loose.reconstruct().unwrap().sub(&x).unwrap().frobenius_norm()
            / x.frobenius_norm();
        assert!(err <= 1e-3, "loose error {err}");
        let tight = tt_svd(&x, &Truncation::Tolerance(1e-9)).unwrap();
        assert!(tight.ranks().iter().max().unwrap() > &2);
        assert!(tt_svd(&x, &Truncation::Tolerance(0.0)).is_err());
        assert!(tt_svd(&x, &Truncation::Tolerance(1.0)).is_err());
    }

    #[test]
    fn identity_like_map_preserves_input() {
        // Rank-1 cores acting as per-mode identities.
        let mut cores = Vec::new();
        for &m in &[2usize, 3] {
            let mut c = DenseTensor::zeros(&[1, m, m, 1]);
            for i in 0..m {
                c.set(&[0, i, i, 0], 1.0);
            }
            cores.push(c);
        }
        let map = TtMatrix::new(cores).unwrap();
        let x = reference::randomish_tensor(&[2, 3], 8);
        let y = map.apply(&x).unwrap();
        assert!(y.max_abs_diff(&x) < 1e-15);
    }

    #[test]
    fn apply_matches_reconstructed_dense_route() {
        let mut rng = ChaCha12Rng::seed_from_u64(400);
        let map = TtMatrix::random(&[4, 5, 3], &[3, 3, 3], &[1, 2, 2, 1], &mut rng).unwrap();
        let x = reference::randomish_tensor(&[4, 5, 3], 55);
        let fast = map.apply(&x).unwrap();
        let dense = map.to_dense_matrix().unwrap();
        let flat = reference::matvec(&dense, &x).unwrap();
        let rel = fast
            .reshape(&[map.output_len()])
            .unwrap()
            .sub(&flat)
            .unwrap()
            .frobenius_norm()
            / flat.frobenius_norm().max(1e-300);
        assert!(rel <= 1e-10, "relative error {rel}");
    }

    #[test]
    fn apply_matches_dense_route_across_many_configurations() {
        let mut rng = ChaCha12Rng::seed_from_u64(4242);
        for case in 0..50 {
            let n_modes = rand::Rng::random_range(&mut rng, 2..=4);
            let input: Vec<usize> = (0..n_modes)
                .map(|_| rand::Rng::random_range(&mut rng, 2..=4))
                .collect();
            let output: Vec<usize> = (0..n_modes)
                .map(|_| rand::Rng::random_range(&mut rng, 2..=3))
                .collect();
            let mut ranks = vec![1usize];
            for _ in 1..n_modes {
                ranks.push(rand::Rng::random_range(&mut rng, 1..=3));
            }
            ranks.push(1);
            let map = TtMatrix::random(&input, &output, &ranks, &mut rng).unwrap();
            let x = reference::randomish_tensor(&input, 5000 + case);
            let fast = map.apply(&x).unwrap();
            let dense = map.to_dense_matrix().unwrap();
            let flat = reference::matvec(&dense, &x).unwrap();
            let diff = fast
                .reshape(&[map.output_len()])
                .unwrap()
                .max_abs_diff(&flat);
            assert!(diff <= 1e-10, "case {case}: {diff}");
        }
    }

    #[test]
    fn param_count_closed_forms() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let unit = TtMatrix::random(&[2, 2], &[2, 2], &[1, 1, 1], &mut rng).unwrap();
        assert_eq!(unit.param_count(), 8);

        let trading = TtMatrix::random(&[16, 30, 9], &[3, 3, 3], &[1, 2, 2, 1], &mut rng).unwrap();
        assert_eq!(trading.param_count(), 96 + 360 + 54);
        assert!(trading.param_count() < trading.input_len() * trading.output_len());
    }

    #[test]
    fn near_equal_factorizations() {
        assert_eq!(near_equal_factors(27, 3), vec![3, 3, 3]);
        assert_eq!(near_equal_factors(8, 3), vec![2, 2, 2]);
        assert_eq!(near_equal_factors(12, 2), vec![3, 4]);
        assert_eq!(near_equal_factors(2, 3), vec![1, 1, 2]);
        assert_eq!(near_equal_factors(7, 1), vec![7]);
        for (v, n) in [(27, 3), (8, 3), (12, 2), (2, 3), (90, 4)] {
            assert_eq!(near_equal_factors(v, n).iter().product::<usize>(), v);
        }
    }
}
