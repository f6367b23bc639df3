//! Release gate. One test per acceptance criterion; each prints a single
//! `criterion N: ...` verdict line (visible under `--nocapture`, and in
//! the failure output otherwise).
//!
//! Criteria 10 and 11 are quantitative-reproduction reports that need the
//! full arrhythmia database and hours of compute; they log deltas against
//! the published targets and never gate. Without `MITBIH_DIR` they print
//! SKIP and pass.

use clap::Parser;
use heartgan::commands::{self, Cli};
use heartgan::formats::beats::write_beats;
use heartgan_core::adam::{Adam, AdamConfig};
use heartgan_core::data::{
    build_split, one_hot_batch, smote_with_parents, toy_beats, Beat, BeatClass, ClassCounts,
    SplitMode, DS1, DS2, R_PEAK_OFFSET, SMOTE_K,
};
use heartgan_core::gradcheck::GradCheck;
use heartgan_core::metrics::{
    auc, cross_correlation, evaluate_discriminator, evaluate_generator, mse, nrmse, ssim_1d,
    ClassificationReport, ConfusionMatrix, SsimConfig,
};
use heartgan_core::model::{
    make_noise, DiscriminatorArch, DiscriminatorModel, GeneratorArch, GeneratorModel,
};
use heartgan_core::nn::{
    gaussian_init, leaky_relu, leaky_relu_backward, sigmoid, sigmoid_backward, softmax_backward_rows,
    softmax_rows, BatchNorm1d, Conv1d, ConvTranspose1d, Dense, Mode,
};
use heartgan_core::params::ParamSet;
use heartgan_core::seeds::seeded_stream;
use heartgan_core::train::losses::{adversarial_d, adversarial_g, class_cross_entropy, reconstruction_mse};
use heartgan_core::train::{batch_tensors, train, NullObserver, StepRecord, TrainObserver, TrainingConfig};
use heartgan_core::Tensor;
use rand::Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::time::Instant;

const BATCH: usize = 3;

fn dot(a: &Tensor, b: &Tensor) -> f64 {
    a.data().iter().zip(b.data()).map(|(x, y)| x * y).sum()
}

fn random_tensor(shape: &[usize], seed: u64, lo: f64, hi: f64) -> Tensor {
    let mut rng = seeded_stream(seed, 2);
    let mut t = Tensor::zeros(shape);
    for v in t.data_mut() {
        *v = rng.gen_range(lo..hi);
    }
    t
}

fn init_params<M: ParamSet + ?Sized>(m: &mut M, seed: u64) {
    let mut rng = seeded_stream(seed, 3);
    m.for_each_param_mut(&mut |_, t| gaussian_init(&mut rng, t, 0.4));
}

fn rel_err(analytic: f64, numeric: f64, floor: f64) -> f64 {
    let denom = analytic.abs().max(numeric.abs()).max(floor);
    (analytic - numeric).abs() / denom
}

/// Central finite differences of `f` with respect to every coordinate of
/// `x`, compared against an analytic input gradient.
fn fd_input_max_rel(
    f: &mut dyn FnMut(&Tensor) -> f64,
    x: &Tensor,
    analytic: &Tensor,
    step: f64,
    floor: f64,
) -> f64 {
    let mut probe = x.clone();
    let mut worst: f64 = 0.0;
    for i in 0..x.len() {
        let orig = probe.data()[i];
        probe.data_mut()[i] = orig + step;
        let up = f(&probe);
        probe.data_mut()[i] = orig - step;
        let down = f(&probe);
        probe.data_mut()[i] = orig;
        let numeric = (up - down) / (2.0 * step);
        worst = worst.max(rel_err(analytic.data()[i], numeric, floor));
    }
    worst
}

fn tiny_g() -> GeneratorArch {
    GeneratorArch {
        input_len: 280,
        encoder_channels: vec![3, 4],
        decoder_channels: vec![3],
        ..GeneratorArch::full()
    }
}

fn tiny_d() -> DiscriminatorArch {
    DiscriminatorArch {
        input_len: 280,
        conv_channels: vec![3, 4],
        dense_widths: vec![6],
        ..DiscriminatorArch::full()
    }
}

fn model_fixture(seed: u64) -> (Tensor, Tensor, Tensor) {
    let beats = toy_beats(BATCH, seed);
    let idxs: Vec<usize> = (0..BATCH).collect();
    let (x, y) = batch_tensors(&beats, &idxs).unwrap();
    let mut rng = seeded_stream(seed, 1);
    let z = make_noise(&mut rng, BATCH, 280, 4.0).unwrap();
    (x, y, z)
}

#[test]
fn c01_gradient_suite() {
    let started = Instant::now();
    let tol = 1e-4;
    let mut worst: f64 = 0.0;
    let mut checked = 0usize;

    // Layer primitives at reduced lengths, parameter gradients probed by
    // central differences of a fixed random projection loss.
    {
        let mut conv = Conv1d::new(3, 3, 4, 2, 1).unwrap();
        init_params(&mut conv, 40);
        let x = random_tensor(&[2, 12, 3], 41, -1.0, 1.0);
        let w = random_tensor(&[2, 6, 4], 42, -1.0, 1.0);
        conv.zero_grads();
        conv.backward(&x, &w).unwrap();
        let report = GradCheck::default()
            .run(&mut conv, |m| Ok(dot(&m.forward(&x)?, &w)))
            .unwrap();
        worst = worst.max(report.max_rel_err());
        checked += report.total_checked();
    }
    {
        let mut deconv = ConvTranspose1d::new(3, 3, 4, 2, 1, 1).unwrap();
        init_params(&mut deconv, 43);
        let x = random_tensor(&[2, 6, 3], 44, -1.0, 1.0);
        let out_len = deconv.out_len(6).unwrap();
        let w = random_tensor(&[2, out_len, 4], 45, -1.0, 1.0);
        deconv.zero_grads();
        deconv.backward(&x, &w).unwrap();
        let report = GradCheck::default()
            .run(&mut deconv, |m| Ok(dot(&m.forward(&x)?, &w)))
            .unwrap();
        worst = worst.max(report.max_rel_err());
        checked += report.total_checked();
    }
    {
        let mut dense = Dense::new(5, 3).unwrap();
        init_params(&mut dense, 46);
        let x = random_tensor(&[2, 5], 47, -1.0, 1.0);
        let w = random_tensor(&[2, 3], 48, -1.0, 1.0);
        dense.zero_grads();
        dense.backward(&x, &w).unwrap();
        let report = GradCheck::default()
            .run(&mut dense, |m| Ok(dot(&m.forward(&x)?, &w)))
            .unwrap();
        worst = worst.max(report.max_rel_err());
        checked += report.total_checked();
    }
    {
        let mut bn = BatchNorm1d::new(3).unwrap();
        init_params(&mut bn, 49);
        let x = random_tensor(&[2, 7, 3], 50, -1.0, 1.0);
        let w = random_tensor(&[2, 7, 3], 51, -1.0, 1.0);
        let (_, cache) = bn.forward(&x, Mode::Frozen).unwrap();
        bn.zero_grads();
        bn.backward(&cache.unwrap(), &w).unwrap();
        let report = GradCheck::default()
            .run(&mut bn, |m| Ok(dot(&m.forward(&x, Mode::Frozen)?.0, &w)))
            .unwrap();
        worst = worst.max(report.max_rel_err());
        checked += report.total_checked();
    }

    // Parameter-free activations: input gradients against central
    // differences. Leaky inputs stay clear of the kink at 0.
    {
        let mut x = random_tensor(&[2, 9], 52, 0.1, 1.0);
        let signs = random_tensor(&[2, 9], 53, -1.0, 1.0);
        for (v, s) in x.data_mut().iter_mut().zip(signs.data()) {
            if *s < 0.0 {
                *v = -*v;
            }
        }
        let w = random_tensor(&[2, 9], 54, -1.0, 1.0);
        let analytic = leaky_relu_backward(&x, &w, 0.2).unwrap();
        worst = worst.max(fd_input_max_rel(
            &mut |t| dot(&leaky_relu(t, 0.2), &w),
            &x,
            &analytic,
            1e-6,
            1e-6,
        ));
        checked += x.len();

        let x = random_tensor(&[2, 9], 55, -2.0, 2.0);
        let analytic = sigmoid_backward(&sigmoid(&x), &w).unwrap();
        worst = worst.max(fd_input_max_rel(
            &mut |t| dot(&sigmoid(t), &w),
            &x,
            &analytic,
            1e-6,
            1e-6,
        ));
        checked += x.len();

        let x = random_tensor(&[3, 4], 56, -2.0, 2.0);
        let w = random_tensor(&[3, 4], 57, -1.0, 1.0);
        let analytic = softmax_backward_rows(&softmax_rows(&x).unwrap(), &w).unwrap();
        worst = worst.max(fd_input_max_rel(
            &mut |t| dot(&softmax_rows(t).unwrap(), &w),
            &x,
            &analytic,
            1e-6,
            1e-6,
        ));
        checked += x.len();
    }
    assert!(worst < tol, "layer primitives max rel err {worst:.3e}");

    // Model level at the full 280-sample length. The probe step is 1e-7
    // (coarser steps walk pre-activations across the leaky kink) and the
    // relative floor 1e-3 (conv biases feeding batch norm have exactly
    // zero gradients, where the quotient is cancellation noise).
    let check = GradCheck { step: 1e-7, rel_floor: 1e-3, ..Default::default() };

    {
        let mut g = GeneratorModel::seeded(tiny_g(), 10).unwrap();
        let (x, y, z) = model_fixture(20);
        let w = random_tensor(&[BATCH, 280], 30, -1.0, 1.0);
        let (_, cache) = g.forward_train(&x, &y, &z, Mode::Frozen).unwrap();
        g.zero_grads();
        g.backward(&cache, &w).unwrap();
        let report = check
            .run(&mut g, |m| {
                let (out, _) = m.forward_train(&x, &y, &z, Mode::Frozen)?;
                Ok(dot(&out, &w))
            })
            .unwrap();
        assert!(report.total_checked() > 150);
        worst = worst.max(report.max_rel_err());
        checked += report.total_checked();
    }
    {
        let mut d = DiscriminatorModel::seeded(tiny_d(), 11).unwrap();
        let (x, y, _) = model_fixture(21);
        let wp = random_tensor(&[BATCH, 4], 31, -1.0, 1.0);
        let wr = random_tensor(&[BATCH, 1], 32, -1.0, 1.0);
        let (_, cache) = d.forward_train(&x, &y, Mode::Frozen).unwrap();
        d.zero_grads();
        d.backward(&cache, &wp, &wr).unwrap();
        let report = check
            .run(&mut d, |m| {
                let (out, _) = m.forward_train(&x, &y, Mode::Frozen)?;
                Ok(dot(&out.class_probs, &wp) + dot(&out.realness, &wr))
            })
            .unwrap();
        assert!(report.total_checked() > 500);
        worst = worst.max(report.max_rel_err());
        checked += report.total_checked();
    }
    {
        // Full generator objective chained through a frozen discriminator.
        let (lambda_rec, lambda_class) = (1.0, 10.0);
        let mut g = GeneratorModel::seeded(tiny_g(), 12).unwrap();
        let mut d = DiscriminatorModel::seeded(tiny_d(), 13).unwrap();
        let (x, y, z) = model_fixture(22);
        let (g_out, cache_g) = g.forward_train(&x, &y, &z, Mode::Frozen).unwrap();
        let (d_out, cache_d) = d.forward_train(&g_out, &y, Mode::Frozen).unwrap();
        let (_, grad_adv) = adversarial_g(&d_out.realness).unwrap();
        let (_, grad_rec) = reconstruction_mse(&g_out, &x).unwrap();
        let (_, grad_ce) = class_cross_entropy(&d_out.class_probs, &y).unwrap();
        let mut probs_grad = grad_ce;
        for v in probs_grad.data_mut() {
            *v *= lambda_class;
        }
        d.zero_grads();
        let mut grad_fake = d.backward(&cache_d, &probs_grad, &grad_adv).unwrap();
        for (a, &b) in grad_fake.data_mut().iter_mut().zip(grad_rec.data()) {
            *a += lambda_rec * b;
        }
        g.zero_grads();
        g.backward(&cache_g, &grad_fake).unwrap();
        let report = check
            .run(&mut g, |m| {
                let (out, _) = m.forward_train(&x, &y, &z, Mode::Frozen)?;
                let (scores, _) = d.forward_train(&out, &y, Mode::Frozen)?;
                let (adv, _) = adversarial_g(&scores.realness)?;
                let (rec, _) = reconstruction_mse(&out, &x)?;
                let (ce, _) = class_cross_entropy(&scores.class_probs, &y)?;
                Ok(adv + lambda_rec * rec + lambda_class * ce)
            })
            .unwrap();
        worst = worst.max(report.max_rel_err());
        checked += report.total_checked();
    }
    {
        // Sampled coordinates on the halved production widths.
        let sampled = GradCheck { coords_per_block: Some(4), seed: 9, ..check };
        let mut g = GeneratorModel::seeded(GeneratorArch::halved(), 14).unwrap();
        let (x, y, z) = model_fixture(23);
        let w = random_tensor(&[BATCH, 280], 33, -1.0, 1.0);
        let (_, cache) = g.forward_train(&x, &y, &z, Mode::Frozen).unwrap();
        g.zero_grads();
        g.backward(&cache, &w).unwrap();
        let report = sampled
            .run(&mut g, |m| {
                let (out, _) = m.forward_train(&x, &y, &z, Mode::Frozen)?;
                Ok(dot(&out, &w))
            })
            .unwrap();
        worst = worst.max(report.max_rel_err());
        checked += report.total_checked();

        let mut d = DiscriminatorModel::seeded(DiscriminatorArch::halved(), 15).unwrap();
        let wp = random_tensor(&[BATCH, 4], 34, -1.0, 1.0);
        let wr = random_tensor(&[BATCH, 1], 35, -1.0, 1.0);
        let (_, cache) = d.forward_train(&x, &y, Mode::Frozen).unwrap();
        d.zero_grads();
        d.backward(&cache, &wp, &wr).unwrap();
        let report = sampled
            .run(&mut d, |m| {
                let (out, _) = m.forward_train(&x, &y, Mode::Frozen)?;
                Ok(dot(&out.class_probs, &wp) + dot(&out.realness, &wr))
            })
            .unwrap();
        worst = worst.max(report.max_rel_err());
        checked += report.total_checked();
    }

    let elapsed = started.elapsed().as_secs_f64();
    assert!(worst < tol, "gradient suite max rel err {worst:.3e}");
    assert!(elapsed <= 120.0, "gradient suite took {elapsed:.1}s, limit 120s");
    println!(
        "criterion 1: PASS — {checked} coordinates, max rel err {worst:.2e}, {elapsed:.1}s"
    );
}

#[test]
fn c02_metric_oracles() {
    let started = Instant::now();
    let tol = 1e-10;
    let instances = 120;
    let mut rng = seeded_stream(2025, 0);
    let mut worst: f64 = 0.0;

    // Paired-signal metrics against naive recomputation.
    for _ in 0..instances {
        let window = rng.gen_range(2..=16usize);
        let len = rng.gen_range(window.max(11)..=64usize);
        let a: Vec<f64> = (0..len).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let b: Vec<f64> = (0..len).map(|_| rng.gen_range(-2.0..2.0)).collect();

        let mse_o = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() / len as f64;
        worst = worst.max((mse(&a, &b).unwrap() - mse_o).abs());

        let lo = b.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = b.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let nrmse_o = mse_o.sqrt() / (hi - lo);
        worst = worst.max((nrmse(&a, &b).unwrap() - nrmse_o).abs());

        let n = len as f64;
        let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
        let cov: f64 = a.iter().zip(&b).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let va: f64 = a.iter().map(|x| (x - ma) * (x - ma)).sum();
        let vb: f64 = b.iter().map(|y| (y - mb) * (y - mb)).sum();
        let corr_o = cov / (va * vb).sqrt();
        worst = worst.max((cross_correlation(&a, &b).unwrap() - corr_o).abs());

        let cfg = SsimConfig { window, ..SsimConfig::default() };
        let c1 = (cfg.k1 * cfg.dynamic_range).powi(2);
        let c2 = (cfg.k2 * cfg.dynamic_range).powi(2);
        let mut total = 0.0;
        let windows = len - window + 1;
        for s in 0..windows {
            let wa = &a[s..s + window];
            let wb = &b[s..s + window];
            let wf = window as f64;
            let mu_a = wa.iter().sum::<f64>() / wf;
            let mu_b = wb.iter().sum::<f64>() / wf;
            let var_a = wa.iter().map(|x| (x - mu_a) * (x - mu_a)).sum::<f64>() / wf;
            let var_b = wb.iter().map(|y| (y - mu_b) * (y - mu_b)).sum::<f64>() / wf;
            let cov = wa.iter().zip(wb).map(|(x, y)| (x - mu_a) * (y - mu_b)).sum::<f64>() / wf;
            total += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2))
                / ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
        }
        let ssim_o = total / windows as f64;
        worst = worst.max((ssim_1d(&a, &b, &cfg).unwrap() - ssim_o).abs());
    }

    // Confusion-derived per-class metrics against direct tp/fp/fn/tn
    // counting over the raw pair list.
    for _ in 0..instances {
        let n_classes = rng.gen_range(2..=6usize);
        let pairs: Vec<(usize, usize)> = (0..rng.gen_range(8..=60))
            .map(|_| (rng.gen_range(0..n_classes), rng.gen_range(0..n_classes)))
            .collect();
        let m = ConfusionMatrix::from_pairs(n_classes, &pairs).unwrap();
        let names: Vec<String> = (0..n_classes).map(|c| format!("c{c}")).collect();
        let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let report = ClassificationReport::from_confusion(m, &name_refs, None).unwrap();

        let total = pairs.len();
        let correct = pairs.iter().filter(|(l, p)| l == p).count();
        worst = worst.max((report.accuracy - correct as f64 / total as f64).abs());
        for c in 0..n_classes {
            let tp = pairs.iter().filter(|&&(l, p)| l == c && p == c).count();
            let fn_ = pairs.iter().filter(|&&(l, p)| l == c && p != c).count();
            let fp = pairs.iter().filter(|&&(l, p)| l != c && p == c).count();
            let tn = total - tp - fn_ - fp;
            let mut deg = false;
            let mut ratio = |num: usize, den: usize| {
                if den == 0 {
                    deg = true;
                    0.0
                } else {
                    num as f64 / den as f64
                }
            };
            let sens = ratio(tp, tp + fn_);
            let spec = ratio(tn, tn + fp);
            let prec = ratio(tp, tp + fp);
            let f1 = if prec + sens == 0.0 {
                deg = true;
                0.0
            } else {
                2.0 * prec * sens / (prec + sens)
            };
            let got = &report.classes[c];
            assert_eq!(got.support, tp + fn_);
            assert_eq!(got.degenerate, deg);
            worst = worst.max((got.sensitivity - sens).abs());
            worst = worst.max((got.specificity - spec).abs());
            worst = worst.max((got.precision - prec).abs());
            worst = worst.max((got.f1 - f1).abs());
        }
    }

    // AUC against the O(n^2) pairwise probability, ties counting half.
    for _ in 0..instances {
        let n = rng.gen_range(5..=80usize);
        let scores: Vec<f64> = (0..n).map(|_| rng.gen_range(0..=10) as f64 / 10.0).collect();
        let mut positive: Vec<bool> = (0..n).map(|_| rng.gen_range(0..2) == 1).collect();
        positive[0] = true;
        positive[n - 1] = false;
        let mut wins = 0.0;
        let mut pairs = 0u64;
        for i in 0..n {
            if !positive[i] {
                continue;
            }
            for j in 0..n {
                if positive[j] {
                    continue;
                }
                pairs += 1;
                if scores[i] > scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
        let auc_o = wins / pairs as f64;
        worst = worst.max((auc(&scores, &positive).unwrap() - auc_o).abs());
    }

    let elapsed = started.elapsed().as_secs_f64();
    assert!(worst <= tol, "oracle deviation {worst:.3e} exceeds {tol:.0e}");
    assert!(elapsed <= 60.0, "oracle suite took {elapsed:.1}s, limit 60s");
    println!(
        "criterion 2: PASS — {instances} instances per metric, max deviation {worst:.2e}, {elapsed:.1}s"
    );
}

#[test]
fn c03_loss_spot_values() {
    let mut probs = Tensor::zeros(&[2, 4]);
    probs.data_mut().fill(0.25);
    let y = one_hot_batch(&[BeatClass::Normal, BeatClass::Ventricular]).unwrap();
    let (ce, _) = class_cross_entropy(&probs, &y).unwrap();
    let ce_dev = (ce - 4.0f64.ln()).abs();
    assert!(ce_dev <= 1e-9, "uniform cross-entropy off by {ce_dev:.3e}");

    let d_real = Tensor::filled(&[3, 1], 1.0);
    let d_fake = Tensor::zeros(&[3, 1]);
    let (adv, _, _) = adversarial_d(&d_real, &d_fake).unwrap();
    assert_eq!(adv, 0.0, "perfect discriminator must score exactly 0");

    let target = random_tensor(&[2, 280], 60, 0.0, 0.9);
    let mut output = target.clone();
    for v in output.data_mut() {
        *v += 0.1;
    }
    let (rec, _) = reconstruction_mse(&output, &target).unwrap();
    let rec_dev = (rec - 0.01).abs();
    assert!(rec_dev <= 1e-12, "offset reconstruction off by {rec_dev:.3e}");

    println!(
        "criterion 3: PASS — ln4 dev {ce_dev:.1e}, adv exactly 0, rec dev {rec_dev:.1e}"
    );
}

#[test]
fn c04_shape_invariants() {
    let trace = GeneratorArch::full().length_trace();
    let mut dedup = vec![trace[0]];
    for &l in &trace[1..] {
        if l != *dedup.last().unwrap() {
            dedup.push(l);
        }
    }
    assert_eq!(dedup, [280, 140, 70, 35, 70, 140, 280]);

    let mut rng = seeded_stream(404, 0);
    let mut worst_sum_dev: f64 = 0.0;
    for (gi, (g_arch, d_arch)) in [
        (GeneratorArch::full(), DiscriminatorArch::full()),
        (GeneratorArch::halved(), DiscriminatorArch::halved()),
    ]
    .into_iter()
    .enumerate()
    {
        let mut g = GeneratorModel::seeded(g_arch, 1 + gi as u64).unwrap();
        let mut d = DiscriminatorModel::seeded(d_arch, 3 + gi as u64).unwrap();
        for round in 0..5 {
            let batch = 1 + (round % 4);
            let x = random_tensor(&[batch, 280], 100 + round as u64, 0.0, 1.0);
            let labels: Vec<BeatClass> =
                (0..batch).map(|_| BeatClass::ALL[rng.gen_range(0..4)]).collect();
            let y = one_hot_batch(&labels).unwrap();
            let z = make_noise(&mut rng, batch, 280, 4.0).unwrap();

            let out = g.synthesize(&x, &y, &z).unwrap();
            assert_eq!(out.shape(), [batch, 280]);
            assert!(out.data().iter().all(|&v| v > 0.0 && v < 1.0), "output leaves (0,1)");

            let scores = d.score(&out, &y).unwrap();
            assert_eq!(scores.class_probs.shape(), [batch, 4]);
            for row in 0..batch {
                let sum: f64 = scores.class_probs.data()[row * 4..(row + 1) * 4].iter().sum();
                worst_sum_dev = worst_sum_dev.max((sum - 1.0).abs());
            }
        }
    }
    assert!(worst_sum_dev <= 1e-9, "probability rows drift by {worst_sum_dev:.3e}");

    println!(
        "criterion 4: PASS — trace {dedup:?}, outputs in (0,1), prob row dev {worst_sum_dev:.1e}"
    );
}

struct RecTrace(Vec<f64>);

impl TrainObserver for RecTrace {
    fn on_step(&mut self, record: &StepRecord) -> heartgan_core::Result<()> {
        self.0.push(record.losses.g_rec);
        Ok(())
    }
}

#[test]
fn c05_overfit_one_sample() {
    let started = Instant::now();
    // Reconstruction-dominant limit: the adversarial terms stay active at
    // their defaults while the reconstruction weight dwarfs them, and the
    // step size is raised so 500 Adam steps can actually travel there.
    let cfg = TrainingConfig {
        adam: AdamConfig { alpha: 1e-3, ..AdamConfig::default() },
        lambda_rec: 1e4,
        batch_size: 2,
        epochs: 500,
        seed: 42,
        snapshot_every: 0,
        ..TrainingConfig::default()
    };
    let beat = toy_beats(1, 9).remove(0);
    let beats = vec![beat.clone(), beat];

    let mut g = GeneratorModel::seeded(GeneratorArch::halved(), cfg.seed).unwrap();
    let mut d = DiscriminatorModel::seeded(DiscriminatorArch::halved(), cfg.seed).unwrap();
    let mut opt_g = Adam::new(cfg.adam).unwrap();
    let mut opt_d = Adam::new(cfg.adam).unwrap();
    let mut trace = RecTrace(Vec::new());
    train(&mut g, &mut d, &mut opt_g, &mut opt_d, &beats, &cfg, 0, &mut trace).unwrap();
    let rec = trace.0;
    assert_eq!(rec.len(), 500);

    let min_rec = rec.iter().cloned().fold(f64::INFINITY, f64::min);
    let crossing = rec
        .iter()
        .position(|&r| r < 1e-3)
        .unwrap_or_else(|| panic!("reconstruction never fell below 1e-3 (min {min_rec:.3e})"));

    // Convergence must be steady, not a lucky dip: through the first
    // crossing the 10-step moving average never increases. (Well past
    // convergence the adversarial terms can destabilize the degenerate
    // two-beat equilibrium again, which is out of scope here.)
    let window = 10;
    let smoothed: Vec<f64> = (0..=crossing.saturating_sub(window))
        .map(|i| rec[i..i + window].iter().sum::<f64>() / window as f64)
        .collect();
    let mut max_rise: f64 = 0.0;
    for pair in smoothed.windows(2) {
        max_rise = max_rise.max(pair[1] - pair[0]);
    }
    assert!(max_rise <= 1e-9, "smoothed reconstruction rose by {max_rise:.3e} during descent");

    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed <= 180.0, "overfit run took {elapsed:.1}s, limit 180s");
    println!(
        "criterion 5: PASS — below 1e-3 at step {}, min {min_rec:.2e}, {elapsed:.1}s",
        crossing + 1
    );
}

#[test]
fn c06_toy_end_to_end() {
    let started = Instant::now();
    let beats = toy_beats(2000, 6);
    let (train_beats, test_beats) =
        build_split(beats, SplitMode::Intra { train_fraction: 0.8 }, 6).unwrap();
    assert_eq!(train_beats.len(), 1600);
    assert_eq!(test_beats.len(), 400);

    let cfg = TrainingConfig { epochs: 30, snapshot_every: 0, ..TrainingConfig::default() };
    let mut g = GeneratorModel::seeded(GeneratorArch::halved(), cfg.seed).unwrap();
    let mut d = DiscriminatorModel::seeded(DiscriminatorArch::halved(), cfg.seed).unwrap();
    let mut opt_g = Adam::new(cfg.adam).unwrap();
    let mut opt_d = Adam::new(cfg.adam).unwrap();
    train(&mut g, &mut d, &mut opt_g, &mut opt_d, &train_beats, &cfg, 0, &mut NullObserver)
        .unwrap();

    let sim =
        evaluate_generator(&mut g, &test_beats, cfg.noise_sigma, 7, &SsimConfig::default())
            .unwrap();
    let eval = evaluate_discriminator(&mut d, &mut g, &test_beats, cfg.noise_sigma, 7).unwrap();
    let accuracy = eval.class_real.accuracy;
    let detection_auc = eval.detection.auc.unwrap();
    let ssim = sim.overall.ssim;

    let elapsed = started.elapsed().as_secs_f64();
    assert!(accuracy >= 0.90, "held-out 4-class accuracy {accuracy:.4}");
    assert!(detection_auc >= 0.80, "detection AUC {detection_auc:.4}");
    assert!(ssim >= 0.90, "held-out SSIM {ssim:.4}");
    assert!(elapsed <= 900.0, "toy end-to-end took {elapsed:.1}s, limit 900s");
    println!(
        "criterion 6: PASS — accuracy {accuracy:.4}, detection AUC {detection_auc:.4}, SSIM {ssim:.4}, {elapsed:.0}s"
    );
}

fn run_cli(args: &[&str]) -> heartgan::Result<()> {
    let mut argv = vec!["heartgan"];
    argv.extend_from_slice(args);
    let cli = Cli::try_parse_from(argv).expect("argv parses");
    commands::run(&cli)
}

fn collect_files(root: &Path, base: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
    for entry in std::fs::read_dir(root).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            collect_files(&path, base, out);
        } else {
            let rel = path.strip_prefix(base).unwrap().to_str().unwrap().to_string();
            out.insert(rel, std::fs::read(&path).unwrap());
        }
    }
}

#[test]
fn c07_pipeline_determinism() {
    let source = toy_beats(48, 11);
    let mut trees = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        let all = root.join("source.csv");
        write_beats(&all, &source).unwrap();
        let prep = root.join("prep");
        let run = root.join("run");
        let eval = root.join("eval");
        run_cli(&["prepare", all.to_str().unwrap(), prep.to_str().unwrap(), "--seed", "42"])
            .unwrap();
        run_cli(&[
            "train",
            prep.join("train_beats.csv").to_str().unwrap(),
            run.to_str().unwrap(),
            "--epochs",
            "2",
            "--batch-size",
            "16",
            "--snapshot-every",
            "1",
            "--checkpoint-every",
            "1",
        ])
        .unwrap();
        run_cli(&[
            "evaluate",
            run.join("generator.ckpt").to_str().unwrap(),
            run.join("discriminator.ckpt").to_str().unwrap(),
            prep.join("test_beats.csv").to_str().unwrap(),
            eval.to_str().unwrap(),
            "--seed",
            "9",
        ])
        .unwrap();

        let mut files = BTreeMap::new();
        for sub in [&prep, &run, &eval] {
            collect_files(sub, root, &mut files);
        }
        trees.push(files);
    }

    let (a, b) = (&trees[0], &trees[1]);
    let names: Vec<&String> = a.keys().collect();
    assert_eq!(
        names,
        b.keys().collect::<Vec<_>>(),
        "replicas produced different file sets"
    );
    for name in names.iter() {
        assert_eq!(a[*name], b[*name], "{name} differs between replicas");
    }
    println!(
        "criterion 7: PASS — {} files byte-identical across replicas (full default arch, 2 epochs)",
        a.len()
    );
}

#[test]
fn c08_split_fidelity() {
    let template = toy_beats(8, 2);
    let mut beats = Vec::new();
    for (i, id) in DS1.iter().chain(DS2.iter()).enumerate() {
        for j in 0..3 {
            beats.push(
                Beat::new(
                    template[(i + j) % template.len()].samples.clone(),
                    BeatClass::ALL[(i + j) % 4],
                    id.to_string(),
                    R_PEAK_OFFSET,
                    false,
                )
                .unwrap(),
            );
        }
    }
    let total = beats.len();
    let (train_beats, test_beats) = build_split(beats, SplitMode::Inter, 0).unwrap();
    assert_eq!(train_beats.len() + test_beats.len(), total);

    let train_ids: BTreeSet<&str> = train_beats.iter().map(|b| b.record_id.as_str()).collect();
    let test_ids: BTreeSet<&str> = test_beats.iter().map(|b| b.record_id.as_str()).collect();
    let ds1: BTreeSet<&str> = DS1.iter().copied().collect();
    let ds2: BTreeSet<&str> = DS2.iter().copied().collect();
    assert_eq!(train_ids, ds1, "train records must be exactly the DS1 list");
    assert_eq!(test_ids, ds2, "test records must be exactly the DS2 list");
    assert!(train_ids.is_disjoint(&test_ids));

    println!(
        "criterion 8: PASS — {} train / {} test records, exact DS1/DS2 match, zero overlap",
        train_ids.len(),
        test_ids.len()
    );
}

#[test]
fn c09_smote_contract() {
    let pool = toy_beats(400, 13);
    let take = |class: BeatClass, n: usize| {
        pool.iter().filter(|b| b.label == class).take(n).cloned().collect::<Vec<_>>()
    };
    let mut imbalanced = Vec::new();
    imbalanced.extend(take(BeatClass::Normal, 40));
    imbalanced.extend(take(BeatClass::Supraventricular, 11));
    imbalanced.extend(take(BeatClass::Ventricular, 7));
    imbalanced.extend(take(BeatClass::Fusion, 25));
    let originals = imbalanced.len();

    let (balanced, parents) = smote_with_parents(&imbalanced, SMOTE_K, 5).unwrap();
    assert_eq!(ClassCounts::of(&balanced).counts, [40; 4]);
    assert_eq!(balanced.len(), originals + parents.len());
    for (orig, kept) in imbalanced.iter().zip(&balanced) {
        assert_eq!(orig.samples, kept.samples, "originals must pass through untouched");
    }

    let mut worst: f64 = 0.0;
    for (synth, parent) in balanced[originals..].iter().zip(&parents) {
        assert!(synth.synthetic);
        let base = &imbalanced[parent.base];
        let neighbor = &imbalanced[parent.neighbor];
        assert_eq!(base.label, synth.label);
        assert_eq!(neighbor.label, synth.label);
        for ((&s, &p), &q) in synth.samples.iter().zip(&base.samples).zip(&neighbor.samples) {
            let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
            worst = worst.max(lo - s).max(s - hi);
        }
    }
    assert!(worst <= 1e-9, "betweenness violated by {worst:.3e}");

    println!(
        "criterion 9: PASS — counts equalized at 40, {} synthetics within parents (max excess {worst:.1e})",
        parents.len()
    );
}

/// Full-database reproduction: reports deltas against the published
/// targets, never gates. Hours of compute; runs only when `MITBIH_DIR`
/// points at a directory of `<id>.sig.csv` / `<id>.ann.csv` files.
#[test]
fn c10_c11_quantitative_reproduction() {
    let dir = match std::env::var("MITBIH_DIR") {
        Ok(d) => d,
        Err(_) => {
            println!(
                "criterion 10: SKIP — set MITBIH_DIR to a <id>.sig.csv/<id>.ann.csv directory for the full generator evaluation (hours)"
            );
            println!(
                "criterion 11: SKIP — set MITBIH_DIR for the full adversarial classification run (hours)"
            );
            return;
        }
    };
    let data = Path::new(&dir);
    let work = tempfile::tempdir().unwrap();
    let root = work.path();

    // Inter-patient generator evaluation (Table-1-style targets).
    let prep = root.join("prep_inter");
    let run = root.join("run_inter");
    let eval = root.join("eval_inter");
    run_cli(&[
        "prepare",
        data.to_str().unwrap(),
        prep.to_str().unwrap(),
        "--mode",
        "inter",
    ])
    .unwrap();
    run_cli(&[
        "train",
        prep.join("train_beats.csv").to_str().unwrap(),
        run.to_str().unwrap(),
    ])
    .unwrap();
    run_cli(&[
        "evaluate",
        run.join("generator.ckpt").to_str().unwrap(),
        run.join("discriminator.ckpt").to_str().unwrap(),
        prep.join("test_beats.csv").to_str().unwrap(),
        eval.to_str().unwrap(),
    ])
    .unwrap();
    let sim: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(eval.join("similarity.json")).unwrap())
            .unwrap();
    let overall = &sim["overall"];
    let (ssim, mse_v) = (overall["ssim"].as_f64().unwrap(), overall["mse"].as_f64().unwrap());
    let (corr, nrmse_v) = (
        overall["cross_correlation"].as_f64().unwrap(),
        overall["nrmse"].as_f64().unwrap(),
    );
    let band10 = ssim >= 0.99 && nrmse_v <= 0.03;
    println!(
        "criterion 10: REPORT — SSIM {ssim:.4} (target 0.9982), MSE {mse_v:.5} (target 0.00038), corr {corr:.4} (target 0.9986), NRMSE {nrmse_v:.4} (target 0.0136); band {}",
        if band10 { "met" } else { "missed" }
    );

    // Intra-patient adversarial classification (Table-2-style target).
    let prep = root.join("prep_intra");
    let run = root.join("run_intra");
    let eval = root.join("eval_intra");
    run_cli(&[
        "prepare",
        data.to_str().unwrap(),
        prep.to_str().unwrap(),
        "--mode",
        "intra",
    ])
    .unwrap();
    run_cli(&[
        "train",
        prep.join("train_beats.csv").to_str().unwrap(),
        run.to_str().unwrap(),
    ])
    .unwrap();
    run_cli(&[
        "evaluate",
        run.join("generator.ckpt").to_str().unwrap(),
        run.join("discriminator.ckpt").to_str().unwrap(),
        prep.join("test_beats.csv").to_str().unwrap(),
        eval.to_str().unwrap(),
    ])
    .unwrap();
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(eval.join("manifest.json")).unwrap())
            .unwrap();
    let acc = manifest["details"]["class_accuracy_real"].as_f64().unwrap() * 100.0;
    let band11 = acc >= 97.0;
    println!(
        "criterion 11: REPORT — adversarial-classification ACC {acc:.2}% (target 99.89%); band {}",
        if band11 { "met" } else { "missed" }
    );
}
