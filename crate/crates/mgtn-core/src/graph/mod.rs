//! Graph structure and filtering: weighted adjacency matrices, symmetric
//! normalization, shift filters, the order-4 multi-linear graph filter, and
//! the adjacency builders used by the experiments (time chains, Gaussian
//! kernels, correlation graphs, carry graphs).

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::tensor::{tensorize, DenseTensor};

/// Square non-negative weight matrix; `weights[n, m] > 0` iff the edge
/// `(n, m)` exists, meaning node `m` feeds node `n` under the shift filter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjacencyMatrix {
    weights: DenseTensor,
    directed: bool,
}

impl AdjacencyMatrix {
    pub fn new(weights: DenseTensor, directed: bool) -> Result<Self> {
        if weights.order() != 2 || weights.shape()[0] != weights.shape()[1] {
            let (r, c) = match weights.shape() {
                [r, c] => (*r, *c),
                other => (other.first().copied().unwrap_or(0), 0),
            };
            return Err(CoreError::NotSquare { rows: r, cols: c });
        }
        let n = weights.shape()[0];
        for col in 0..n {
            for row in 0..n {
                let v = weights.get(&[row, col]);
                if v < 0.0 {
                    return Err(CoreError::NegativeWeight {
                        row,
                        col,
                        value: v,
                    });
                }
            }
        }
        Ok(Self { weights, directed })
    }

    pub fn node_count(&self) -> usize {
        self.weights.shape()[0]
    }

    pub fn weights(&self) -> &DenseTensor {
        &self.weights
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let n = self.node_count();
        for col in 0..n {
            for row in 0..col {
                if (self.weights.get(&[row, col]) - self.weights.get(&[col, row])).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Symmetric degree normalization with row-sum degrees; zero-degree
    /// nodes keep zero rows and columns rather than dividing by zero.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.node_count();
        let mut inv_sqrt = vec![0.0; n];
        for row in 0..n {
            let mut degree = 0.0;
            for col in 0..n {
                degree += self.weights.get(&[row, col]);
            }
            inv_sqrt[row] = if degree > 0.0 {
                1.0 / degree.sqrt()
            } else {
                0.0
            };
        }
        let mut out = DenseTensor::zeros(&[n, n]);
        for col in 0..n {
            for row in 0..n {
                let v = self.weights.get(&[row, col]) * inv_sqrt[row] * inv_sqrt[col];
                out.set(&[row, col], v);
            }
        }
        Self::new(out, self.directed)
    }

    /// Shift filter `(I + A) F` over node-major signals `F` of shape
    /// `(nodes, signals)`: every node keeps its value plus the weighted sum
    /// of its in-neighbours.
    pub fn shift(&self, signals: &DenseTensor) -> Result<DenseTensor> {
        let n = self.node_count();
        if signals.order() != 2 || signals.shape()[0] != n {
            return Err(CoreError::ShapeMismatch {
                expected: vec![n, signals.shape().last().copied().unwrap_or(0)],
                got: signals.shape().to_vec(),
                context: "graph shift signals".into(),
            });
        }
        let shifted = self.weights.matmul(signals)?;
        signals.add(&shifted)
    }

    /// Serializes as CSV with a header row of node names.
    pub fn to_csv(&self, names: &[String]) -> String {
        let n = self.node_count();
        let mut out = String::new();
        let header: Vec<String> = (0..n)
            .map(|i| names.get(i).cloned().unwrap_or_else(|| format!("n{i}")))
            .collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in 0..n {
            let cells: Vec<String> = (0..n)
                .map(|col| format!("{:?}", self.weights.get(&[row, col])))
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Parses the CSV form produced by [`Self::to_csv`]. Returns the matrix
    /// together with the node names from the header.
    pub fn from_csv(text: &str, directed: bool) -> Result<(Self, Vec<String>)> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| CoreError::AdjacencyFormat("empty file".into()))?;
        let names: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
        let n = names.len();
        let mut weights = DenseTensor::zeros(&[n, n]);
        let mut row = 0;
        for line in lines {
            if row >= n {
                return Err(CoreError::AdjacencyFormat(format!(
                    "more than {n} data rows"
                )));
            }
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() != n {
                return Err(CoreError::AdjacencyFormat(format!(
                    "row {row} has {} cells, expected {n}",
                    cells.len()
                )));
            }
            for (col, cell) in cells.iter().enumerate() {
                let v: f64 = cell.trim().parse().map_err(|e| {
                    CoreError::AdjacencyFormat(format!("row {row} col {col}: {e}"))
                })?;
                weights.set(&[row, col], v);
            }
            row += 1;
        }
        if row != n {
            return Err(CoreError::AdjacencyFormat(format!(
                "expected {n} data rows, found {row}"
            )));
        }
        Ok((Self::new(weights, directed)?, names))
    }
}

/// First-order shift filter `I + beta * A` as a plain matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphShiftFilter {
    filter: DenseTensor,
}

impl GraphShiftFilter {
    pub fn new(adjacency: &AdjacencyMatrix, beta: f64) -> Self {
        let n = adjacency.node_count();
        let filter = DenseTensor::identity(n)
            .add(&adjacency.weights().scale(beta))
            .expect("square shapes agree");
        Self { filter }
    }

    pub fn matrix(&self) -> &DenseTensor {
        &self.filter
    }
}

/// Order-4 filter `(J, I, J, I)` folding `I + beta * (A kron P)`, where `A`
/// couples the `I` graph nodes and `P` propagates across the `J` features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiLinearGraphFilter {
    filter: DenseTensor,
    beta: f64,
    adjacency: DenseTensor,
    propagation: DenseTensor,
}

impl MultiLinearGraphFilter {
    pub fn build(adjacency: &DenseTensor, propagation: &DenseTensor, beta: f64) -> Result<Self> {
        for m in [adjacency, propagation] {
            if m.order() != 2 || m.shape()[0] != m.shape()[1] {
                return Err(CoreError::NotSquare {
                    rows: m.shape().first().copied().unwrap_or(0),
                    cols: m.shape().last().copied().unwrap_or(0),
                });
            }
        }
        let i = adjacency.shape()[0];
        let j = propagation.shape()[0];
        let coupled = adjacency.kronecker(propagation)?; // (I*J, I*J), feature index fastest
        let flat = DenseTensor::identity(i * j).add(&coupled.scale(beta))?;
        let filter = tensorize(&flat.reshape(&[j, i * j * i])?, &[j, i, j, i], 1)?;
        Ok(Self {
            filter,
            beta,
            adjacency: adjacency.clone(),
            propagation: propagation.clone(),
        })
    }

    /// The order-4 tensor, shaped `(J, I, J, I)`.
    pub fn tensor(&self) -> &DenseTensor {
        &self.filter
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn adjacency(&self) -> &DenseTensor {
        &self.adjacency
    }

    pub fn propagation(&self) -> &DenseTensor {
        &self.propagation
    }

    /// Re-derives the tensor from the stored ingredients and compares; a
    /// consistency check for deserialized values.
    pub fn verify(&self, tol: f64) -> Result<bool> {
        let rebuilt = Self::build(&self.adjacency, &self.propagation, self.beta)?;
        Ok(rebuilt.filter.max_abs_diff(&self.filter) <= tol)
    }
}

/// Chain graph over time steps: `a[t, t-1] = 1`, optionally extended to
/// deeper hops with geometrically decaying weights, optionally symmetrized.
pub fn time_graph(steps: usize, bidirectional: bool, decay: Option<f64>) -> Result<AdjacencyMatrix> {
    if steps < 2 {
        return Err(CoreError::TooFewSteps(steps));
    }
    if let Some(d) = decay {
        if !(d > 0.0 && d <= 1.0) {
            return Err(CoreError::NonPositiveSigma(d));
        }
    }
    let mut w = DenseTensor::zeros(&[steps, steps]);
    for t in 1..steps {
        match decay {
            None => w.set(&[t, t - 1], 1.0),
            Some(d) => {
                for k in 1..=t {
                    w.set(&[t, t - k], d.powi(k as i32 - 1));
                }
            }
        }
    }
    if bidirectional {
        let sym = w.add(&w.transpose()?)?;
        AdjacencyMatrix::new(sym, false)
    } else {
        AdjacencyMatrix::new(w, true)
    }
}

/// Gaussian-kernel similarity graph over feature vectors. `sigma` defaults
/// to the median pairwise Euclidean distance when not supplied.
pub fn kernel_graph(features: &[Vec<f64>], sigma: Option<f64>) -> Result<AdjacencyMatrix> {
    let n = features.len();
    let mut dist = vec![0.0; n * n];
    let mut offdiag = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let d2: f64 = features[i]
                .iter()
                .zip(&features[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let d = d2.sqrt();
            dist[i * n + j] = d;
            dist[j * n + i] = d;
            offdiag.push(d);
        }
    }
    let sigma = match sigma {
        Some(s) => {
            if s <= 0.0 {
                return Err(CoreError::NonPositiveSigma(s));
            }
            s
        }
        None => {
            offdiag.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let median = if offdiag.is_empty() {
                1.0
            } else {
                offdiag[offdiag.len() / 2]
            };
            if median > 0.0 {
                median
            } else {
                1.0
            }
        }
    };
    let mut w = DenseTensor::zeros(&[n, n]);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let d = dist[i * n + j];
                w.set(&[i, j], (-d * d / (2.0 * sigma * sigma)).exp());
            }
        }
    }
    AdjacencyMatrix::new(w, false)
}

/// Non-negative Pearson correlation graph over per-node series; negative
/// correlations clamp to zero and the diagonal stays empty.
pub fn correlation_graph(series: &[Vec<f64>]) -> Result<AdjacencyMatrix> {
    let n = series.len();
    let mut centered = Vec::with_capacity(n);
    for (node, s) in series.iter().enumerate() {
        let mean = s.iter().sum::<f64>() / s.len() as f64;
        let c: Vec<f64> = s.iter().map(|v| v - mean).collect();
        let var: f64 = c.iter().map(|v| v * v).sum();
        if var <= 0.0 {
            return Err(CoreError::ConstantSeries { node });
        }
        centered.push((c, var.sqrt()));
    }
    let mut w = DenseTensor::zeros(&[n, n]);
    for i in 0..n {
        for j in (i + 1)..n {
            let (ref ci, ni) = centered[i];
            let (ref cj, nj) = centered[j];
            let cov: f64 = ci.iter().zip(cj).map(|(a, b)| a * b).sum();
            let rho = cov / (ni * nj);
            let clamped = rho.max(0.0);
            w.set(&[i, j], clamped);
            w.set(&[j, i], clamped);
        }
    }
    AdjacencyMatrix::new(w, false)
}

/// How pairwise carry values map to edge weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CarryMode {
    /// Keep positive carry only, then divide by the maximum.
    ReluNormalize,
    /// Use the carry magnitude, then divide by the maximum.
    AbsNormalize,
}

/// Directed carry graph from pairwise spot and forward rates: the carry of
/// pair `(i, j)` is `1 - forward/spot`, mapped to `[0, 1]` edge weights.
/// All-zero carry yields the zero matrix. Diagonals are ignored.
pub fn carry_graph(
    spot: &DenseTensor,
    forward: &DenseTensor,
    mode: CarryMode,
) -> Result<AdjacencyMatrix> {
    if spot.order() != 2 || spot.shape()[0] != spot.shape()[1] {
        return Err(CoreError::NotSquare {
            rows: spot.shape().first().copied().unwrap_or(0),
            cols: spot.shape().last().copied().unwrap_or(0),
        });
    }
    if spot.shape() != forward.shape() {
        return Err(CoreError::ShapeMismatch {
            expected: spot.shape().to_vec(),
            got: forward.shape().to_vec(),
            context: "spot vs forward".into(),
        });
    }
    let n = spot.shape()[0];
    let mut raw = DenseTensor::zeros(&[n, n]);
    let mut max_weight = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let rs = spot.get(&[i, j]);
            if rs <= 0.0 {
                return Err(CoreError::NonPositiveSpot {
                    row: i,
                    col: j,
                    value: rs,
                });
            }
            let carry = 1.0 - forward.get(&[i, j]) / rs;
            let weight = match mode {
                CarryMode::ReluNormalize => carry.max(0.0),
                CarryMode::AbsNormalize => carry.abs(),
            };
            raw.set(&[i, j], weight);
            max_weight = max_weight.max(weight);
        }
    }
    let scaled = if max_weight > 0.0 {
        raw.scale(1.0 / max_weight)
    } else {
        raw
    };
    AdjacencyMatrix::new(scaled, true)
}
