//! End-to-end checks of the layer stack against independently computed
//! routes: matricized filter evaluation, dense reconstructions of
//! tensor-train maps, closed-form parameter counts, and optimizer steps.

use mgtn_core::graph::AdjacencyMatrix;
use mgtn_core::nn::{
    fit, fmgtn_closed_form, gmgtn_closed_form, gradient_check, matricized_dense_count,
    Activation, DenseLayer, FitOptions, FmgtnLayer, GcnLayer, GmgtnLayer, InputAdapter, Layer,
    LossKind, MetricKind, Model, Optimizer, Parameter, TtDenseLayer,
};
use mgtn_core::reference;
use mgtn_core::rng::named_stream;
use mgtn_core::tensor::{stack, DenseTensor};

fn random_adjacency(n: usize, seed: u64) -> AdjacencyMatrix {
    let w = reference::randomish_tensor(&[n, n], seed).map(f64::abs);
    AdjacencyMatrix::new(w, true).unwrap()
}

fn forward_one(model: &Model, x: &DenseTensor) -> DenseTensor {
    let batch = stack(std::slice::from_ref(x)).unwrap();
    let out = model.predict_batch(&batch).unwrap();
    let shape: Vec<usize> = out.shape()[1..].to_vec();
    mgtn_core::tensor::unstack(&out).unwrap().remove(0).reshape(&shape).unwrap()
}

fn fmgtn_model(
    j0: usize,
    units: usize,
    graphs: Vec<AdjacencyMatrix>,
    activation: Activation,
    seed: u64,
) -> Model {
    let mut rng = named_stream(seed, "init");
    let layer = FmgtnLayer::init("layer0", j0, units, graphs, activation, 0.5, true, &mut rng)
        .unwrap();
    Model::new(vec![Layer::Fmgtn(layer)], LossKind::Mse, InputAdapter::Natural).unwrap()
}

#[test]
fn fmgtn_with_zero_betas_is_a_pure_feature_transform() {
    let graphs = vec![random_adjacency(5, 1), random_adjacency(4, 2)];
    let mut model = fmgtn_model(3, 6, graphs, Activation::Tanh, 10);
    // Zero every beta; the filters become identities.
    for p in model.params_mut() {
        if p.name().contains("beta") {
            p.value_mut().data_mut()[0] = 0.0;
        }
    }
    let w = model.params()[0].value().clone();
    let x = reference::randomish_tensor(&[3, 5, 4], 3);
    let got = forward_one(&model, &x);
    let expect = reference::mode_apply_naive(&w, &x, 1).unwrap().map(f64::tanh);
    assert!(got.max_abs_diff(&expect) <= 1e-12);
}

#[test]
fn fmgtn_output_shape_for_trading_layout() {
    let graphs = vec![random_adjacency(30, 4), random_adjacency(9, 5)];
    let model = fmgtn_model(4, 16, graphs, Activation::Relu, 11);
    let x = reference::randomish_tensor(&[4, 30, 9], 6);
    let y = forward_one(&model, &x);
    assert_eq!(y.shape(), &[16, 30, 9]);
}

#[test]
fn fmgtn_two_mode_forward_matches_kron_matricized_oracle() {
    let (j0, j1, i1, i2) = (3, 4, 5, 3);
    let graphs = vec![random_adjacency(i1, 7), random_adjacency(i2, 8)];
    let model = fmgtn_model(j0, j1, graphs.clone(), Activation::Tanh, 12);
    let params = model.params();
    let w = params[0].value().clone();
    let beta1 = params[1].value().data()[0];
    let beta2 = params[2].value().data()[0];

    let f1 = DenseTensor::identity(i1)
        .add(&graphs[0].weights().scale(beta1))
        .unwrap();
    let f2 = DenseTensor::identity(i2)
        .add(&graphs[1].weights().scale(beta2))
        .unwrap();
    // Full matricized route: one big operator on the vectorized sample.
    let big = reference::kron_entry_formula(
        &f2,
        &reference::kron_entry_formula(&f1, &w).unwrap(),
    )
    .unwrap();
    let x = reference::randomish_tensor(&[j0, i1, i2], 9);
    let flat = reference::matvec(&big, &x).unwrap();
    let expect = flat.reshape(&[j1, i1, i2]).unwrap().map(f64::tanh);

    let got = forward_one(&model, &x);
    assert!(got.max_abs_diff(&expect) <= 1e-10);
}

#[test]
fn filter_application_order_over_distinct_modes_commutes() {
    let a1 = random_adjacency(4, 13);
    let a2 = random_adjacency(3, 14);
    let f1 = DenseTensor::identity(4).add(&a1.weights().scale(0.7)).unwrap();
    let f2 = DenseTensor::identity(3).add(&a2.weights().scale(0.3)).unwrap();
    let z = reference::randomish_tensor(&[6, 4, 3], 15);
    let first = mgtn_core::mode_apply(&f2, &mgtn_core::mode_apply(&f1, &z, 2).unwrap(), 3).unwrap();
    let second = mgtn_core::mode_apply(&f1, &mgtn_core::mode_apply(&f2, &z, 3).unwrap(), 2).unwrap();
    assert!(first.max_abs_diff(&second) <= 1e-12);
}

#[test]
fn gmgtn_with_identity_propagation_reduces_to_fmgtn() {
    for (instance, m_count) in [(0u64, 1usize), (1, 2), (2, 3)] {
        let j0 = 3;
        let j = 4;
        let mode_sizes: Vec<usize> = (0..m_count).map(|m| 3 + m).collect();
        let graphs: Vec<AdjacencyMatrix> = mode_sizes
            .iter()
            .enumerate()
            .map(|(m, &n)| random_adjacency(n, 100 + instance * 10 + m as u64))
            .collect();

        let mut chain = vec![j0];
        chain.extend(std::iter::repeat_n(j, m_count));
        let mut rng = named_stream(500 + instance, "init");
        let mut glayer = GmgtnLayer::init(
            "g",
            &chain,
            graphs.clone(),
            Activation::Tanh,
            0.5,
            true,
            &mut rng,
        )
        .unwrap();
        // Exact identity propagation, identity feature transforms after the
        // first, and the betas copied below make the two layers coincide.
        let mut betas = Vec::new();
        for p in glayer.params_mut() {
            if p.name().contains("prop") {
                let n = p.value().shape()[0];
                *p.value_mut() = DenseTensor::identity(n);
            } else if p.name().contains("beta") {
                betas.push(p.value().data()[0]);
            } else if !p.name().ends_with("weight0") {
                let n = p.value().shape()[0];
                *p.value_mut() = DenseTensor::identity(n);
            }
        }
        let w0 = glayer.params()[0].value().clone();

        let mut rng2 = named_stream(900 + instance, "init");
        let mut flayer = FmgtnLayer::init(
            "f",
            j0,
            j,
            graphs.clone(),
            Activation::Tanh,
            0.5,
            true,
            &mut rng2,
        )
        .unwrap();
        for (i, p) in flayer.params_mut().into_iter().enumerate() {
            if i == 0 {
                *p.value_mut() = w0.clone();
            } else {
                p.value_mut().data_mut()[0] = betas[i - 1];
            }
        }

        let gm = Model::new(vec![Layer::Gmgtn(glayer)], LossKind::Mse, InputAdapter::Natural)
            .unwrap();
        let fm = Model::new(vec![Layer::Fmgtn(flayer)], LossKind::Mse, InputAdapter::Natural)
            .unwrap();

        let mut shape = vec![j0];
        shape.extend(&mode_sizes);
        let x = reference::randomish_tensor(&shape, 300 + instance);
        let yg = forward_one(&gm, &x);
        let yf = forward_one(&fm, &x);
        assert_eq!(yg.shape(), yf.shape());
        assert!(
            yg.max_abs_diff(&yf) <= 1e-10,
            "mismatch for M = {m_count}: {}",
            yg.max_abs_diff(&yf)
        );
    }
}

#[test]
fn single_time_graph_fmgtn_matches_recurrent_shift_oracle() {
    // One directed time graph: the layer must equal act((I + beta A) ap-
    // plied along time of W x), the single-graph recurrent forward.
    let steps = 6;
    let graph = mgtn_core::graph::time_graph(steps, false, None).unwrap();
    let model = fmgtn_model(3, 5, vec![graph.clone()], Activation::Tanh, 21);
    let params = model.params();
    let w = params[0].value().clone();
    let beta = params[1].value().data()[0];

    let x = reference::randomish_tensor(&[3, steps], 22);
    let z = reference::mode_apply_naive(&w, &x, 1).unwrap();
    let filter = DenseTensor::identity(steps)
        .add(&graph.weights().scale(beta))
        .unwrap();
    let expect = reference::mode_apply_naive(&filter, &z, 2)
        .unwrap()
        .map(f64::tanh);
    let got = forward_one(&model, &x);
    assert!(got.max_abs_diff(&expect) <= 1e-12);
}

#[test]
fn tt_dense_layer_matches_reconstructed_dense_layer() {
    let mut rng = named_stream(31, "init");
    let layer = TtDenseLayer::init(
        "tt",
        &[4, 5, 3],
        27,
        &[1, 2, 2, 1],
        None,
        Activation::Linear,
        &mut rng,
    )
    .unwrap();
    assert_eq!(layer.output_modes(), &[3, 3, 3]);
    let dense = layer.as_tt_matrix().unwrap().to_dense_matrix().unwrap();
    let model = Model::new(vec![Layer::TtDense(layer)], LossKind::Mse, InputAdapter::Natural)
        .unwrap();
    let x = reference::randomish_tensor(&[4, 5, 3], 32);
    let got = forward_one(&model, &x);
    let expect = reference::matvec(&dense, &x).unwrap();
    let rel = got
        .reshape(&[27])
        .unwrap()
        .sub(&expect)
        .unwrap()
        .frobenius_norm()
        / expect.frobenius_norm();
    assert!(rel <= 1e-10, "relative error {rel}");
}

#[test]
fn dense_identity_layer_passes_input_through() {
    let mut rng = named_stream(41, "init");
    let mut layer = DenseLayer::init("d", 4, 4, Activation::Linear, &mut rng).unwrap();
    for p in layer.params_mut() {
        if p.name().ends_with("weight") {
            *p.value_mut() = DenseTensor::identity(4);
        }
    }
    let model = Model::new(vec![Layer::Dense(layer)], LossKind::Mse, InputAdapter::Natural)
        .unwrap();
    let x = reference::randomish_tensor(&[4], 42);
    let y = forward_one(&model, &x);
    assert!(y.max_abs_diff(&x) <= 1e-15);
}

#[test]
fn two_unit_head_produces_action_values() {
    let mut rng = named_stream(51, "init");
    let graphs = vec![random_adjacency(6, 52), random_adjacency(4, 53)];
    let fm = FmgtnLayer::init("l0", 3, 5, graphs, Activation::Relu, 0.5, true, &mut rng).unwrap();
    let head = DenseLayer::init("l1", 5 * 6 * 4, 2, Activation::Linear, &mut rng).unwrap();
    let model = Model::new(
        vec![Layer::Fmgtn(fm), Layer::Dense(head)],
        LossKind::Mse,
        InputAdapter::Natural,
    )
    .unwrap();
    let x = reference::randomish_tensor(&[3, 6, 4], 54);
    let y = forward_one(&model, &x);
    assert_eq!(y.shape(), &[2]);
}

#[test]
fn gcn_layer_matches_hand_evaluation_on_matricized_input() {
    let mut rng = named_stream(61, "init");
    let graph = random_adjacency(4, 62).normalized().unwrap();
    let layer = GcnLayer::init("g", graph.clone(), 6, 3, Activation::Tanh, &mut rng).unwrap();
    let w = layer.params()[0].value().clone();
    let model = Model::new(
        vec![Layer::Gcn(layer)],
        LossKind::Mse,
        InputAdapter::MatricizeMode(2),
    )
    .unwrap();
    // Sample (J0=2, I1=4, I2=3): unfolding along mode 2 gives (4, 6).
    let x = reference::randomish_tensor(&[2, 4, 3], 63);
    let got = forward_one(&model, &x);
    assert_eq!(got.shape(), &[4, 3]);

    let unfolded = x.matricize(2).unwrap();
    let mixed = graph.weights().matmul(&unfolded).unwrap();
    let expect = mixed.matmul(&w.transpose().unwrap()).unwrap().map(f64::tanh);
    assert!(got.max_abs_diff(&expect) <= 1e-12);
}

#[test]
fn gradients_match_finite_differences_on_a_mixed_stack() {
    let mut rng = named_stream(71, "init");
    let graphs = vec![random_adjacency(4, 72)];
    let fm = FmgtnLayer::init("l0", 2, 3, graphs, Activation::Tanh, 0.5, true, &mut rng).unwrap();
    let tt = TtDenseLayer::init(
        "l1",
        &[3, 4],
        4,
        &[1, 2, 1],
        None,
        Activation::Tanh,
        &mut rng,
    )
    .unwrap();
    let head = DenseLayer::init("l2", 4, 2, Activation::Linear, &mut rng).unwrap();
    let mut model = Model::new(
        vec![Layer::Fmgtn(fm), Layer::TtDense(tt), Layer::Dense(head)],
        LossKind::Mse,
        InputAdapter::Natural,
    )
    .unwrap();
    let xs: Vec<DenseTensor> = (0..3)
        .map(|i| reference::randomish_tensor(&[2, 4], 80 + i))
        .collect();
    let ys: Vec<DenseTensor> = (0..3)
        .map(|i| reference::randomish_tensor(&[2], 90 + i))
        .collect();
    let x = stack(&xs).unwrap();
    let y = stack(&ys).unwrap();
    let (worst, failures) = gradient_check(&mut model, &x, &y, 1e-5, 1e-4).unwrap();
    assert!(failures.is_empty(), "worst relative error {worst}");
}

#[test]
fn gmgtn_gradients_match_finite_differences() {
    let mut rng = named_stream(75, "init");
    let graphs = vec![random_adjacency(3, 76), random_adjacency(2, 77)];
    let gl = GmgtnLayer::init("g0", &[2, 3, 3], graphs, Activation::Tanh, 0.5, true, &mut rng)
        .unwrap();
    let head = DenseLayer::init("g1", 3 * 3 * 2, 2, Activation::Linear, &mut rng).unwrap();
    let mut model = Model::new(
        vec![Layer::Gmgtn(gl), Layer::Dense(head)],
        LossKind::Mse,
        InputAdapter::Natural,
    )
    .unwrap();
    let x = stack(&[reference::randomish_tensor(&[2, 3, 2], 78)]).unwrap();
    let y = stack(&[reference::randomish_tensor(&[2], 79)]).unwrap();
    let (worst, failures) = gradient_check(&mut model, &x, &y, 1e-5, 1e-4).unwrap();
    assert!(failures.is_empty(), "worst relative error {worst}");
}

#[test]
fn parameter_counts_match_closed_forms() {
    let mut rng = named_stream(81, "init");
    let graphs = vec![random_adjacency(30, 82), random_adjacency(9, 83)];
    let fm = FmgtnLayer::init("l0", 4, 16, graphs.clone(), Activation::Relu, 0.5, true, &mut rng)
        .unwrap();
    assert_eq!(fm.param_count(), 66);
    assert_eq!(fmgtn_closed_form(4, 16, 2), 66);

    let gl = GmgtnLayer::init("g0", &[4, 6, 6], graphs, Activation::Relu, 0.5, true, &mut rng)
        .unwrap();
    assert_eq!(gl.param_count(), gmgtn_closed_form(&[4, 6, 6]));
    assert_eq!(gmgtn_closed_form(&[4, 6, 6]), 6 * 4 + 36 + 1 + 36 + 36 + 1);

    // Uniform chain: M * (J^2 + J^2) + M.
    assert_eq!(gmgtn_closed_form(&[6, 6, 6]), 2 * (36 + 36) + 2);

    // The shared-weight layer always beats the matricized dense treatment
    // once there are at least two modes of size, at least, two.
    for (j0, j1, modes) in [
        (4usize, 16usize, vec![30usize, 9]),
        (2, 2, vec![2, 2]),
        (3, 8, vec![2, 2, 2]),
        (11, 8, vec![10, 9]),
    ] {
        let fast = fmgtn_closed_form(j0, j1, modes.len());
        let dense = matricized_dense_count(j0, j1, &modes, 1);
        assert!(fast < dense, "{j0}->{j1} over {modes:?}: {fast} !< {dense}");
    }
}

#[test]
fn model_param_count_sums_layers_and_respects_frozen_betas() {
    let mut rng = named_stream(91, "init");
    let graphs = vec![random_adjacency(5, 92), random_adjacency(3, 93)];
    let fm = FmgtnLayer::init("l0", 2, 4, graphs.clone(), Activation::Relu, 0.5, true, &mut rng)
        .unwrap();
    let head = DenseLayer::init("l1", 4 * 5 * 3, 2, Activation::Linear, &mut rng).unwrap();
    let model = Model::new(
        vec![Layer::Fmgtn(fm), Layer::Dense(head)],
        LossKind::Mse,
        InputAdapter::Natural,
    )
    .unwrap();
    assert_eq!(model.param_count(), (2 * 4 + 2) + (60 * 2 + 2));

    let frozen = FmgtnLayer::init("l0", 2, 4, graphs, Activation::Relu, 0.5, false, &mut rng)
        .unwrap();
    let frozen_model =
        Model::new(vec![Layer::Fmgtn(frozen)], LossKind::Mse, InputAdapter::Natural).unwrap();
    assert_eq!(frozen_model.param_count(), 8);
}

#[test]
fn duplicate_parameter_names_are_rejected() {
    let mut rng = named_stream(95, "init");
    let a = DenseLayer::init("same", 2, 2, Activation::Linear, &mut rng).unwrap();
    let b = DenseLayer::init("same", 2, 2, Activation::Linear, &mut rng).unwrap();
    let err = Model::new(
        vec![Layer::Dense(a), Layer::Dense(b)],
        LossKind::Mse,
        InputAdapter::Natural,
    )
    .unwrap_err();
    assert!(err.to_string().contains("same"));
}

#[test]
fn adam_first_step_hand_case_and_zero_grad_noop() {
    let mut rng = named_stream(101, "init");
    let mut layer = DenseLayer::init("d", 1, 1, Activation::Linear, &mut rng).unwrap();
    for p in layer.params_mut() {
        if p.name().ends_with("weight") {
            *p.value_mut() = DenseTensor::new(vec![1, 1], vec![1.0]).unwrap();
        }
    }
    let mut model = Model::new(vec![Layer::Dense(layer)], LossKind::Mse, InputAdapter::Natural)
        .unwrap();

    // Gradient of exactly one on the weight: a single first step moves the
    // weight by almost exactly the learning rate.
    model.params_mut()[0].set_grad(DenseTensor::new(vec![1, 1], vec![1.0]).unwrap());
    model.params_mut()[1].set_grad(DenseTensor::zeros(&[1]));
    let mut adam = Optimizer::adam(0.1).unwrap();
    adam.step(&mut model).unwrap();
    let w = model.params()[0].value().data()[0];
    assert!((w - 0.9).abs() < 1e-6, "w = {w}");
    // The zero-gradient bias is untouched.
    assert_eq!(model.params()[1].value().data()[0], 0.0);

    let mut rms = Optimizer::rmsprop(1e-2).unwrap();
    model.params_mut()[0].set_grad(DenseTensor::zeros(&[1, 1]));
    model.params_mut()[1].set_grad(DenseTensor::zeros(&[1]));
    let before = model.params()[0].value().data()[0];
    rms.step(&mut model).unwrap();
    assert_eq!(model.params()[0].value().data()[0], before);

    assert!(Optimizer::adam(0.0).is_err());
    assert!(Optimizer::rmsprop(-1.0).is_err());
}

#[test]
fn full_batch_training_loss_is_non_increasing_at_small_lr() {
    let mut rng = named_stream(111, "init");
    let graphs = vec![random_adjacency(4, 112)];
    let fm = FmgtnLayer::init("l0", 2, 3, graphs, Activation::Tanh, 0.5, true, &mut rng).unwrap();
    let head = DenseLayer::init("l1", 12, 1, Activation::Linear, &mut rng).unwrap();
    let mut model = Model::new(
        vec![Layer::Fmgtn(fm), Layer::Dense(head)],
        LossKind::Mse,
        InputAdapter::Natural,
    )
    .unwrap();
    let xs: Vec<DenseTensor> = (0..8)
        .map(|i| reference::randomish_tensor(&[2, 4], 200 + i))
        .collect();
    let ys: Vec<DenseTensor> = (0..8)
        .map(|i| reference::randomish_tensor(&[1], 300 + i))
        .collect();
    let x = stack(&xs).unwrap();
    let y = stack(&ys).unwrap();

    let mut opt = Optimizer::adam(1e-3).unwrap();
    let mut last = f64::INFINITY;
    for step in 0..20 {
        let loss = model.train_step(&x, &y, step).unwrap();
        assert!(
            loss <= last * (1.0 + 1e-9),
            "loss rose at step {step}: {loss} > {last}"
        );
        last = loss;
        opt.step(&mut model).unwrap();
    }
}

#[test]
fn fit_reduces_error_and_reports_history() {
    let mut rng = named_stream(121, "init");
    let graphs = vec![random_adjacency(3, 122)];
    let fm = FmgtnLayer::init("l0", 2, 4, graphs, Activation::Tanh, 0.5, true, &mut rng).unwrap();
    let head = DenseLayer::init("l1", 12, 1, Activation::Linear, &mut rng).unwrap();
    let mut model = Model::new(
        vec![Layer::Fmgtn(fm), Layer::Dense(head)],
        LossKind::Mse,
        InputAdapter::Natural,
    )
    .unwrap();
    // Learnable target: mean of the input entries.
    let xs: Vec<DenseTensor> = (0..24)
        .map(|i| reference::randomish_tensor(&[2, 3], 400 + i))
        .collect();
    let ys: Vec<DenseTensor> = xs
        .iter()
        .map(|x| {
            DenseTensor::new(
                vec![1],
                vec![x.data().iter().sum::<f64>() / x.len() as f64],
            )
            .unwrap()
        })
        .collect();
    let mut opt = Optimizer::rmsprop(1e-2).unwrap();
    let mut shuffle = named_stream(121, "shuffle");
    let history = fit(
        &mut model,
        &mut opt,
        &xs,
        &ys,
        None,
        &FitOptions {
            epochs: 40,
            batch_size: 8,
            metric: MetricKind::Mse,
            early_stop: None,
        },
        &mut shuffle,
    )
    .unwrap();
    assert_eq!(history.len(), 40);
    let first = history.first().unwrap().train_metric;
    let final_ = history.last().unwrap().train_metric;
    assert!(final_ < first * 0.2, "train mse {first} -> {final_}");
}

#[test]
fn checkpoint_roundtrip_preserves_predictions() {
    let mut rng = named_stream(131, "init");
    let graphs = vec![random_adjacency(4, 132), random_adjacency(3, 133)];
    let fm = FmgtnLayer::init("l0", 2, 4, graphs, Activation::Tanh, 0.5, true, &mut rng).unwrap();
    let tt = TtDenseLayer::init(
        "l1",
        &[4, 4, 3],
        8,
        &[1, 2, 2, 1],
        None,
        Activation::Tanh,
        &mut rng,
    )
    .unwrap();
    let head = DenseLayer::init("l2", 8, 2, Activation::Linear, &mut rng).unwrap();
    let model = Model::new(
        vec![Layer::Fmgtn(fm), Layer::TtDense(tt), Layer::Dense(head)],
        LossKind::Mse,
        InputAdapter::Natural,
    )
    .unwrap();

    let mut buf = Vec::new();
    mgtn_core::nn::checkpoint::save_model(&mut buf, &model).unwrap();
    let loaded = mgtn_core::nn::checkpoint::load_model(buf.as_slice()).unwrap();

    let x = reference::randomish_tensor(&[2, 4, 3], 134);
    let a = forward_one(&model, &x);
    let b = forward_one(&loaded, &x);
    assert_eq!(a, b);
}

#[test]
fn non_finite_loss_reports_batch_index() {
    let mut rng = named_stream(141, "init");
    let mut layer = DenseLayer::init("d", 2, 1, Activation::Linear, &mut rng).unwrap();
    for p in layer.params_mut() {
        if p.name().ends_with("weight") {
            *p.value_mut() = DenseTensor::new(vec![1, 2], vec![f64::MAX, f64::MAX]).unwrap();
        }
    }
    let mut model = Model::new(vec![Layer::Dense(layer)], LossKind::Mse, InputAdapter::Natural)
        .unwrap();
    let x = stack(&[DenseTensor::filled(&[2], f64::MAX)]).unwrap();
    let y = stack(&[DenseTensor::zeros(&[1])]).unwrap();
    let err = model.train_step(&x, &y, 7).unwrap_err();
    assert!(err.to_string().contains("batch 7"), "{err}");
}

#[test]
fn unused_parameter_helper() {
    // Parameter construction rejects non-finite values.
    assert!(Parameter::new("bad", DenseTensor::scalar(f64::NAN), true).is_err());
}

#[test]
fn graph_mode_size_mismatch_names_the_mode() {
    // Second graph has 7 nodes but mode 2 of the input has size 3.
    let graphs = vec![random_adjacency(5, 151), random_adjacency(7, 152)];
    let model = fmgtn_model(2, 4, graphs, Activation::Relu, 153);
    let x = stack(&[reference::randomish_tensor(&[2, 5, 3], 154)]).unwrap();
    let err = model.predict_batch(&x).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("mode 2") && msg.contains('7') && msg.contains('3'), "{msg}");
}
