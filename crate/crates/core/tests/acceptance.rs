//! Acceptance criteria, run in order in one test so the timings are not skewed
//! by other tests sharing the machine. Each criterion prints one PASS/FAIL line.

mod common;

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use mmssl::data::{SynthConfig, Task};
use mmssl::features::color::{default_white, quantize_colors, rgb_to_xyz, xyz_to_lab, LAB_L_COEFFICIENT_DEFAULT};
use mmssl::features::geometry::tongue_geometry;
use mmssl::features::{load_palette, BinaryMask};
use mmssl::harness::{compute_roc, run_experiment, DataSource, ExperimentSpec, Method, ModalitySet};
use mmssl::solvers::*;
use mmssl::Modality;
use nalgebra::DVector;
use rand::Rng;

/// Accuracies from the run that fixed the synthetic generator's defaults
/// (seed 42, 60 per class, 30 per class for training, split seeds 7..=11).
const FIXTURE_SRC: [(ModalitySet, f64); 3] = [
    (ModalitySet::Tongue, 0.87),
    (ModalitySet::Face, 0.8833333333333334),
    (ModalitySet::Sublingual, 0.84),
];
const FIXTURE_MMSSL: f64 = 0.95;
/// Required lead of fused accuracy over chance, from the fixture run less 0.05.
const FIXTURE_MARGIN: f64 = 0.40;
const FIXTURE_TOLERANCE: f64 = 0.02;

type Outcome = std::result::Result<String, String>;

fn check(cond: bool, msg: String) -> Outcome {
    if cond {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn within(elapsed: Duration, limit: Duration, detail: String) -> Outcome {
    check(
        elapsed < limit,
        format!("{detail}; {:.2}s (limit {}s)", elapsed.as_secs_f64(), limit.as_secs()),
    )
}

fn soft_threshold_exactness() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let mut mismatches = 0;
    for i in 0..10_000 {
        let t: f64 = if i % 10 == 0 { 0.0 } else { r.random_range(0.0..5.0) };
        let beta: f64 = match i % 4 {
            0 => t,
            1 => -t,
            _ => r.random_range(-10.0..10.0),
        };
        let got = soft_threshold(&DVector::from_element(1, beta), t).unwrap()[0];
        let ok = if beta > t {
            (got - (beta - t)).abs() <= 1e-15
        } else if beta < -t {
            (got - (beta + t)).abs() <= 1e-15
        } else {
            got.to_bits() == 0.0f64.to_bits()
        };
        if !ok {
            mismatches += 1;
        }
    }
    if mismatches > 0 {
        return Err(format!("{mismatches} of 10000 pairs differ"));
    }
    within(start.elapsed(), Duration::from_secs(1), "10000 pairs exact".into())
}

fn closed_form_update() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for seed in 0..50 {
        let mut r = rng(1000 + seed);
        let n = r.random_range(1..=20);
        let dicts: Vec<_> = (0..3)
            .map(|_| {
                let m = r.random_range(1..=12);
                uniform_matrix(&mut r, m, n)
            })
            .collect();
        let ys: Vec<_> = dicts.iter().map(|d| uniform_vector(&mut r, d.nrows())).collect();
        let s: Vec<_> = (0..3).map(|_| uniform_vector(&mut r, n)).collect();
        let mut state = AlmState::new(3, n, r.random_range(0.5..50.0));
        for k in 0..3 {
            state.relaxed[k] = uniform_vector(&mut r, n);
            state.multipliers[k] = uniform_vector(&mut r, n);
        }
        let tau = r.random_range(0.0..10.0);
        let got = update_alpha_c(&dicts, &ys, &s, &state, tau).map_err(|e| e.to_string())?;
        worst = worst.max(relative_error(&got, &stacked_alpha_c(&dicts, &ys, &s, &state, tau)));
    }
    if worst > 1e-8 {
        return Err(format!("worst relative error {worst:.3e} > 1e-8"));
    }
    within(start.elapsed(), Duration::from_secs(5), format!("worst relative error {worst:.3e}"))
}

/// Worst objective excess over the oracle and the number of instances above 1e-6.
fn lasso_gaps(cfg: &MmsslConfig<f64>) -> std::result::Result<(f64, usize), String> {
    let mut worst = f64::NEG_INFINITY;
    let mut over = 0;
    for seed in 0..100 {
        let mut r = rng(2000 + seed);
        let m = r.random_range(1..=8);
        let n = r.random_range(1..=12);
        let d = ModalDictionary::normalized(uniform_matrix(&mut r, m, n), vec![0..n])
            .map_err(|e| e.to_string())?
            .matrix;
        let y = uniform_vector(&mut r, m);
        let lambda = r.random_range(0.01..1.0);
        let s = solve_lasso_ipm(&d, &y, &DVector::zeros(n), lambda, cfg).map_err(|e| e.to_string())?;
        let oracle = lasso_bruteforce_oracle(&d, &y, lambda).map_err(|e| e.to_string())?;
        let gap = lasso_objective(&d, &y, &s, lambda) - lasso_objective(&d, &y, &oracle, lambda);
        worst = worst.max(gap);
        over += usize::from(gap > 1e-6);
    }
    Ok((worst, over))
}

fn lasso_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let cfg = MmsslConfig::<f64>::default();
    let (worst, over) = lasso_gaps(&cfg)?;
    let elapsed = start.elapsed();
    if worst > 1e-6 {
        // diagnostic only: the same instances with a ten times larger iteration cap
        let longer = MmsslConfig { max_inner: 10 * cfg.max_inner, ..cfg.clone() };
        let (w, o) = lasso_gaps(&longer)?;
        return Err(format!(
            "worst objective excess {worst:.3e} > 1e-6 on {over} of 100 instances at max_inner {}; \
             with max_inner {} the worst is {w:.3e} ({o} over)",
            cfg.max_inner, longer.max_inner
        ));
    }
    within(elapsed, Duration::from_secs(30), format!("worst objective excess {worst:.3e}"))
}

fn decoupled_instances() -> Vec<(Vec<ModalDictionary<f64>>, Vec<DVector<f64>>, MmsslSolution<f64>)> {
    let cfg = MmsslConfig { tau: 0.0, lambda: 0.1, ..MmsslConfig::default() };
    (0..25)
        .map(|seed| {
            let (dicts, ys) = multimodal_instance(seed);
            let sol = mmssl_solve(&dicts, &ys, &cfg).expect("solve");
            (dicts, ys, sol)
        })
        .collect()
}

fn tau_zero_decoupling(instances: &[(Vec<ModalDictionary<f64>>, Vec<DVector<f64>>, MmsslSolution<f64>)]) -> Outcome {
    let lambda = 0.1;
    let mut worst = f64::NEG_INFINITY;
    for (dicts, ys, sol) in instances {
        for k in 0..3 {
            let d = &dicts[k].matrix;
            let p = &sol.pairs[k];
            let got = (&ys[k] - d * p.combined()).norm_squared()
                + lambda * (p.alpha_c.lp_norm(1) + p.alpha_s.lp_norm(1));
            let oracle = lasso_bruteforce_oracle(d, &ys[k], lambda).map_err(|e| e.to_string())?;
            worst = worst.max((got - lasso_objective(d, &ys[k], &oracle, lambda)).abs());
        }
    }
    check(worst <= 1e-6, format!("worst |objective - oracle| {worst:.3e} over 75 modalities"))
}

fn alm_convergence(instances: &[(Vec<ModalDictionary<f64>>, Vec<DVector<f64>>, MmsslSolution<f64>)]) -> Outcome {
    let worst = instances.iter().map(|(_, _, s)| s.primal_residual).fold(0.0, f64::max);
    let iterations = instances.iter().map(|(_, _, s)| s.iterations).max().unwrap_or(0);
    check(
        worst <= 1e-6 && iterations <= 200,
        format!("worst primal residual {worst:.3e}, at most {iterations} outer iterations"),
    )
}

fn similarity_monotonicity() -> Outcome {
    let (dicts, ys) = multimodal_instance(4242);
    let mut spreads = Vec::new();
    for tau in [0.01, 0.1, 1.0, 10.0] {
        let cfg = MmsslConfig { tau, lambda: 0.1, ..MmsslConfig::default() };
        let sol = mmssl_solve(&dicts, &ys, &cfg).map_err(|e| e.to_string())?;
        spreads.push(similarity_spread(&sol.pairs));
    }
    let ok = spreads.windows(2).all(|w| w[1] <= w[0] + 1e-6);
    let shown: Vec<String> = spreads.iter().map(|v| format!("{v:.4e}")).collect();
    check(ok, format!("spread over tau 0.01, 0.1, 1, 10: [{}]", shown.join(", ")))
}

fn fusion_benefit() -> Outcome {
    let start = Instant::now();
    let mut spec = ExperimentSpec::new(DataSource::Synth(SynthConfig::default()), Task::Dm);
    spec.methods = vec![Method::Mmssl, Method::Src];
    spec.modalities = vec![
        ModalitySet::Tongue,
        ModalitySet::Face,
        ModalitySet::Sublingual,
        ModalitySet::All,
    ];
    // single-modality mmssl is not part of this comparison
    spec.train_sizes = vec![30];
    let src_only = {
        let mut s = spec.clone();
        s.methods = vec![Method::Src];
        s.modalities.pop();
        s
    };
    let mut fused_only = spec.clone();
    fused_only.methods = vec![Method::Mmssl];
    fused_only.modalities = vec![ModalitySet::All];
    let src = run_experiment(&src_only).map_err(|e| e.to_string())?;
    let fused = run_experiment(&fused_only).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    let mmssl = fused.cells[0].mean;
    let mut best_src: f64 = 0.0;
    let mut drift: f64 = (mmssl - FIXTURE_MMSSL).abs();
    let mut parts = Vec::new();
    for (set, fixture) in FIXTURE_SRC {
        let mean = src.cell(Method::Src, set, 30).ok_or("missing SRC cell")?.mean;
        best_src = best_src.max(mean);
        drift = drift.max((mean - fixture).abs());
        parts.push(format!("{set} {mean:.4}"));
    }
    let detail = format!(
        "MMSSL {mmssl:.4}, SRC {}; need >= {:.4} and >= {:.2}; fixture drift {drift:.4}",
        parts.join(", "),
        best_src - 0.02,
        0.5 + FIXTURE_MARGIN
    );
    if mmssl < best_src - 0.02 || mmssl < 0.5 + FIXTURE_MARGIN || drift > FIXTURE_TOLERANCE {
        return Err(detail);
    }
    within(elapsed, Duration::from_secs(120), detail)
}

fn feature_pipeline() -> Outcome {
    let start = Instant::now();
    let matrix = [
        [0.4124, 0.3576, 0.1805],
        [0.2126, 0.7152, 0.0722],
        [0.0193, 0.1192, 0.9505],
    ];
    for c in 0..3 {
        let mut rgb = [0.0f64; 3];
        rgb[c] = 1.0;
        let xyz = rgb_to_xyz(rgb);
        if (0..3).any(|r| xyz[r] != matrix[r][c]) {
            return Err(format!("column {c} of the RGB to XYZ matrix differs: {xyz:?}"));
        }
    }
    let white: [f64; 3] = default_white();
    let lab = xyz_to_lab(white, white, LAB_L_COEFFICIENT_DEFAULT).map_err(|e| e.to_string())?;
    if lab[1] != 0.0 || lab[2] != 0.0 {
        return Err(format!("white point maps to a = {}, b = {}", lab[1], lab[2]));
    }

    let palette_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../config/palettes/tongue.json");
    let palette = load_palette(&palette_path, Modality::Tongue).map_err(|e| e.to_string())?;
    let mut r = rng(8);
    let mut worst_sum: f64 = 0.0;
    for _ in 0..20 {
        let pixels: Vec<[f64; 3]> = (0..64 * 64)
            .map(|_| {
                let rgb = [r.random::<f64>(), r.random::<f64>(), r.random::<f64>()];
                xyz_to_lab(rgb_to_xyz(rgb), white, LAB_L_COEFFICIENT_DEFAULT).unwrap()
            })
            .collect();
        let ratios = quantize_colors(&pixels, &palette.entries).map_err(|e| e.to_string())?;
        worst_sum = worst_sum.max((ratios.iter().sum::<f64>() - 1.0).abs());
    }
    if worst_sum > 1e-9 {
        return Err(format!("color ratios sum off by {worst_sum:.3e}"));
    }

    let mut worst_ratio: f64 = 0.0;
    for radius in [50usize, 64, 80, 120] {
        let side = 2 * radius + 11;
        let c = side as f64 / 2.0;
        let disk = BinaryMask::from_fn(side, side, |x, y| {
            (x as f64 + 0.5 - c).powi(2) + (y as f64 + 0.5 - c).powi(2) <= (radius * radius) as f64
        });
        let g: Vec<f64> = tongue_geometry(&disk).map_err(|e| e.to_string())?;
        worst_ratio = worst_ratio.max((g[8] - 1.0).abs());
    }
    if worst_ratio > 0.05 {
        return Err(format!("disk area over circle area is off by {worst_ratio:.4}"));
    }
    within(
        start.elapsed(),
        Duration::from_secs(10),
        format!("matrix exact, white a = b = 0, ratio sums within {worst_sum:.1e}, disk ratio within {worst_ratio:.4}"),
    )
}

fn roc_checks() -> Outcome {
    let start = Instant::now();
    let auc = |s: &[f64], l: &[usize]| compute_roc(s, l).map(|r| r.auc).map_err(|e| e.to_string());
    let separated = auc(&[0.05, 0.2, 0.3, 0.6, 0.7, 0.95], &[0, 0, 0, 1, 1, 1])?;
    let constant = auc(&[0.4; 6], &[0, 1, 0, 1, 1, 0])?;
    let scores = [0.1, 0.4, 0.35, 0.8];
    let hand = auc(&scores, &[0, 0, 1, 1])?;
    // with labels (0, 1, 0, 1) these scores are perfectly separated
    let alternating = auc(&scores, &[0, 1, 0, 1])?;
    let oracle = pairwise_auc(&scores, &[0, 1, 0, 1]);
    let detail = format!(
        "separated {separated}, constant {constant}, 4-point {hand}, alternating labels {alternating} (pairwise {oracle})"
    );
    if separated != 1.0 || constant != 0.5 || hand != 0.75 || alternating != oracle {
        return Err(detail);
    }
    within(start.elapsed(), Duration::from_secs(1), detail)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let synth = dir.path().join("synth.json");
    std::fs::write(&synth, r#"{"samples_per_class": 16, "seed": 5}"#).map_err(|e| e.to_string())?;
    let run = |out: &Path| -> std::result::Result<(), String> {
        let status = Command::new(env!("CARGO_BIN_EXE_mmssl"))
            .args([
                "experiment",
                "--methods", "mmssl,src,gsrc,knn",
                "--modalities", "tongue,face,sublingual,all",
                "--train-sizes", "6,10",
                "--repeats", "2",
                "--synth",
            ])
            .arg(&synth)
            .arg("--out")
            .arg(out)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(String::from_utf8_lossy(&status.stderr).into_owned());
        }
        Ok(())
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run(&a)?;
    run(&b)?;
    let mut bytes = 0;
    for file in ["accuracy.csv", "aggregate.csv", "roc.csv"] {
        let x = std::fs::read(a.join(file)).map_err(|e| e.to_string())?;
        let y = std::fs::read(b.join(file)).map_err(|e| e.to_string())?;
        if x != y {
            return Err(format!("{file} differs between runs"));
        }
        bytes += x.len();
    }
    Ok(format!("three CSV files identical across two runs ({bytes} bytes)"))
}

fn line(n: usize, name: &str, outcome: &Outcome) {
    let (tag, detail) = match outcome {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    // bypasses the test harness's output capture
    let _ = writeln!(std::io::stderr(), "criterion {n:>2} [{tag}] {name}: {detail}");
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into()))
    })
}

#[test]
fn acceptance_criteria() {
    let mut failed = Vec::new();
    let mut record = |n: usize, name: &str, outcome: Outcome| {
        line(n, name, &outcome);
        if outcome.is_err() {
            failed.push(n);
        }
    };
    record(1, "soft-threshold exactness", guarded(soft_threshold_exactness));
    record(2, "closed-form similar-part update", guarded(closed_form_update));
    record(3, "lasso oracle equivalence", guarded(lasso_oracle_equivalence));

    let start = Instant::now();
    let mut instances = None;
    let solved = guarded(|| {
        instances = Some(decoupled_instances());
        Ok(String::new())
    });
    let elapsed = start.elapsed().as_secs_f64();
    match (&instances, solved) {
        (Some(inst), _) => {
            record(4, "tau = 0 decoupling", guarded(|| tau_zero_decoupling(inst).map(|d| format!("{d}; solves {elapsed:.2}s"))));
            record(5, "ALM convergence", guarded(|| alm_convergence(inst)));
        }
        (None, failure) => {
            let e = failure.err().unwrap_or_default();
            record(4, "tau = 0 decoupling", Err(e.clone()));
            record(5, "ALM convergence", Err(e));
        }
    }
    record(6, "similarity monotonicity", guarded(similarity_monotonicity));
    record(7, "fusion benefit on synthetic data", guarded(fusion_benefit));
    record(8, "feature pipeline", guarded(feature_pipeline));
    record(9, "ROC", guarded(roc_checks));
    record(10, "experiment determinism", guarded(determinism));
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
