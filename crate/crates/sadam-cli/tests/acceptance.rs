//! Acceptance suite: one test (and one pass/fail line) per criterion, every
//! tolerance pinned in code. Run with `cargo test -p sadam-cli --test
//! acceptance`; add `-- --nocapture` for the per-criterion timing lines.

use sadam_core::experiments::{
    lgi_field_scan, median, run_experiment, stability_study, ExperimentConfig, GridSpec,
    InitSpec, ObjectiveSpec, OptimizerSpec, StabilityConfig, TrajectoryEnv,
};
use sadam_core::lgi::{
    concentration_study, estimate_from_probes, lgi_probe, log_log_slope,
    population_lgi_quadratic, proximal_brake_gap, LgiConfig,
};
use sadam_core::matrix::SymMatrix;
use sadam_core::objectives::{
    synthetic_landscape, Constant, L1Quadratic, Linear, Objective, Quadratic, QuantizerConfig,
    Staircase,
};
use sadam_core::optimizers::{AdamW, AdamWParams, Optimizer, SAdam, SAdamParams, StepSchedule};
use sadam_core::rng::{RngStream, SeededRng};
use sadam_core::vector::ParamVector;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

fn report(criterion: &str, started: Instant, limit: Duration) {
    let elapsed = started.elapsed();
    println!(
        "ACCEPTANCE {criterion}: PASS ({:.2}s, limit {:.0}s)",
        elapsed.as_secs_f64(),
        limit.as_secs_f64()
    );
    assert!(
        elapsed < limit,
        "{criterion} exceeded its runtime limit: {elapsed:?} >= {limit:?}"
    );
}

// -------------------------------------------------------------------------
// 1. Score and brake bounds under fuzz: 1e5 (objective, point, config)
//    triples, zero violations, under one minute.
// -------------------------------------------------------------------------
#[test]
fn criterion_01_lgi_bound_fuzz() {
    let started = Instant::now();
    let mut param_rng = SeededRng::new(10_001, RngStream::Init);

    let staircase_q = QuantizerConfig::new(4.0, -16, 16).unwrap();
    for case in 0..100_000u64 {
        let objective: Box<dyn Objective> = match case % 6 {
            0 => Box::new(synthetic_landscape()),
            1 => {
                let d = 1 + (case as usize / 6) % 5;
                let anchor: Vec<f64> = (0..d).map(|_| param_rng.standard_normal()).collect();
                let quad: Vec<f64> =
                    (0..d).map(|_| param_rng.standard_normal().abs()).collect();
                let c = param_rng.standard_normal().abs();
                Box::new(L1Quadratic::new(anchor, c, quad).unwrap())
            }
            2 => {
                let d = 1 + (case as usize / 6) % 5;
                let g: Vec<f64> = (0..d).map(|_| param_rng.standard_normal()).collect();
                Box::new(Linear::new(ParamVector::new(g).unwrap()))
            }
            3 => {
                let d = 2 + (case as usize / 6) % 4;
                let g: Vec<f64> = (0..d).map(|_| param_rng.standard_normal()).collect();
                let mut h_rng = SeededRng::with_salt(77, RngStream::Init, case);
                let h = SymMatrix::random(&mut h_rng, d, 2.0).unwrap();
                Box::new(Quadratic::new(ParamVector::new(g).unwrap(), h).unwrap())
            }
            4 => Box::new(Staircase::with_dim(staircase_q, 0.7, 1 + (case as usize / 6) % 3)),
            _ => Box::new(Constant::new(1 + (case as usize / 6) % 4, 3.0)),
        };
        let d = objective.dim();
        let x = ParamVector::new(
            (0..d)
                .map(|_| param_rng.standard_normal() * 2.0)
                .collect(),
        )
        .unwrap();
        let k = 1 + (case as usize % 16);
        let delta = 1e-4 + param_rng.uniform(0.0, 1.0);
        let lambda = param_rng.uniform(1e-3, 8.0);
        let epsilon = 10f64.powf(param_rng.uniform(-9.0, -2.0));
        let cfg = LgiConfig {
            k,
            delta,
            epsilon,
            lambda,
            rho_cap: None,
        };
        let mut probe_rng = SeededRng::with_salt(20_002, RngStream::Probe, case);
        let est = lgi_probe(objective.as_ref(), &x, None, &cfg, &mut probe_rng).unwrap();
        assert!(est.rho >= 0.0, "case {case}: rho = {}", est.rho);
        assert!(est.rho < 1.0, "case {case}: rho = {}", est.rho);
        assert!(est.brake <= 1.0, "case {case}: brake = {}", est.brake);
        assert!(
            est.brake > (-lambda).exp(),
            "case {case}: brake = {} with lambda = {lambda}",
            est.brake
        );
        if k == 1 {
            assert_eq!(est.rho, 0.0, "case {case}: k = 1 must zero the score");
            assert_eq!(est.brake, 1.0);
        }
    }
    report("1 (LGI bound fuzz)", started, Duration::from_secs(60));
}

// -------------------------------------------------------------------------
// 2. Degeneration: S-Adam(lambda = 0) and S-Adam(k = 1) bit-identical to
//    AdamW over 1000 steps on 5 objectives x 3 seeds. Zero tolerance.
// -------------------------------------------------------------------------
fn lockstep_identical(
    f: &dyn Objective,
    mut sadam: SAdam,
    mut adamw: AdamW,
    w0: ParamVector,
    steps: u64,
    seed: u64,
    batch_size: Option<usize>,
) {
    let mut env_a = TrajectoryEnv::for_seed(seed);
    let mut env_b = TrajectoryEnv::for_seed(seed);
    let mut wa = w0.clone();
    let mut wb = w0;
    let n = f.num_samples();
    for t in 1..=steps {
        let batch: Option<Vec<usize>> = match (n, batch_size) {
            (Some(n), Some(b)) if b < n => {
                let idx: Vec<usize> = (0..b).map(|_| env_a.batch_rng.index(n)).collect();
                for _ in 0..b {
                    env_b.batch_rng.index(n);
                }
                Some(idx)
            }
            _ => None,
        };
        let eta = 0.01 / (t as f64).sqrt();
        wa = sadam
            .step(f, &wa, batch.as_deref(), eta, &mut env_a.probe_rng)
            .unwrap()
            .w_next;
        wb = adamw
            .step(f, &wb, batch.as_deref(), eta, &mut env_b.probe_rng)
            .unwrap()
            .w_next;
        for (i, (a, b)) in wa.iter().zip(wb.iter()).enumerate() {
            assert_eq!(
                a.to_bits(),
                b.to_bits(),
                "trajectories split at t = {t}, coordinate {i}: {a} vs {b}"
            );
        }
    }
}

#[test]
fn criterion_02_degeneration_bitwise() {
    let started = Instant::now();
    let objective_specs: Vec<ObjectiveSpec> = vec![
        ObjectiveSpec::Synthetic,
        ObjectiveSpec::L1Quadratic {
            anchor: vec![1.0, 1.0],
            l1_weight: 0.5,
            quad: vec![1.0, 1.0],
        },
        ObjectiveSpec::L1Quadratic {
            anchor: vec![2.0, -2.0, 1.5, 1.0, -1.0],
            l1_weight: 0.3,
            quad: vec![1.0, 2.0, 1.0, 0.5, 1.0],
        },
        ObjectiveSpec::Linear {
            gradient: vec![0.4, -0.3, 0.2],
        },
        ObjectiveSpec::BlobsMlp {
            n: 16,
            feature_dim: 2,
            separation: 3.0,
            hidden: vec![8],
            quantizer: None,
        },
    ];
    for spec in &objective_specs {
        for seed in [42u64, 1, 2] {
            let f = spec.build(seed).unwrap();
            let w0 = spec.build_init(seed, &InitSpec::Default, f.as_ref()).unwrap();
            let batch = match spec {
                ObjectiveSpec::BlobsMlp { .. } => Some(4),
                _ => None,
            };
            for lgi in [
                LgiConfig {
                    lambda: 0.0,
                    ..LgiConfig::default()
                },
                LgiConfig {
                    k: 1,
                    ..LgiConfig::default()
                },
            ] {
                let params = SAdamParams {
                    bias_correction: true, // matched to AdamW
                    lgi,
                    ..SAdamParams::default()
                };
                let sadam = SAdam::new(params, f.dim()).unwrap();
                let adamw = AdamW::new(AdamWParams::default(), f.dim()).unwrap();
                lockstep_identical(f.as_ref(), sadam, adamw, w0.clone(), 1000, seed, batch);
            }
        }
    }
    report("2 (degeneration, bit-exact)", started, Duration::from_secs(120));
}

// -------------------------------------------------------------------------
// 3. Oracle equivalence: million-probe Monte-Carlo score versus the exact
//    sphere-moment formula on 20 random quadratics, relative error < 1%.
// -------------------------------------------------------------------------
#[test]
fn criterion_03_population_oracle_equivalence() {
    let started = Instant::now();
    let dims = [2usize, 5, 20];
    let mut gen_rng = SeededRng::new(33, RngStream::Init);
    for case in 0..20usize {
        let d = dims[case % dims.len()];
        let g: Vec<f64> = (0..d).map(|_| gen_rng.standard_normal()).collect();
        let h = SymMatrix::random(&mut gen_rng, d, 2.0).unwrap();
        let f = Quadratic::new(ParamVector::new(g.clone()).unwrap(), h.clone()).unwrap();
        let cfg = LgiConfig {
            k: 1_000_000,
            ..LgiConfig::default()
        };
        let x = ParamVector::zeros(d).unwrap();
        let mut probe_rng = SeededRng::with_salt(34, RngStream::Probe, case as u64);
        let est = lgi_probe(&f, &x, None, &cfg, &mut probe_rng).unwrap();
        let pop = population_lgi_quadratic(&g, &h, cfg.delta, cfg.epsilon).unwrap();
        let rel = (est.rho - pop).abs() / pop;
        assert!(
            rel < 0.01,
            "case {case} (d = {d}): monte carlo {} vs population {pop} (rel {rel})",
            est.rho
        );
    }
    report("3 (oracle equivalence)", started, Duration::from_secs(300));
}

// -------------------------------------------------------------------------
// 4. Proximal approximation: |exp(-z) - 1/(1+z)| <= z^2/2 over the dense
//    grid z in [0, 0.5], float slack 1e-12 only.
// -------------------------------------------------------------------------
#[test]
fn criterion_04_proximal_bound() {
    let started = Instant::now();
    let mut i = 0u64;
    loop {
        let z = i as f64 * 1e-4;
        if z > 0.5 {
            break;
        }
        let (gap, bound) = proximal_brake_gap(z);
        assert!(
            gap <= bound + 1e-12,
            "bound violated at z = {z}: gap {gap} > {bound}"
        );
        i += 1;
    }
    assert_eq!(i, 5001, "grid must cover [0, 0.5] at step 1e-4");
    report("4 (proximal bound)", started, Duration::from_secs(60));
}

// -------------------------------------------------------------------------
// 5. Concentration: 0.95-quantile error versus k over {16, ..., 4096},
//    200 trials each, log-log slope <= -0.4 on the linear objective, d = 5.
// -------------------------------------------------------------------------
#[test]
fn criterion_05_concentration_slope() {
    let started = Instant::now();
    let g = vec![0.4, -0.2, 0.6, 0.1, -0.5];
    let g_sq: f64 = g.iter().map(|v| v * v).sum();
    let f = Linear::new(ParamVector::new(g).unwrap());
    let cfg = LgiConfig::default();
    let rho_ref = (g_sq / 5.0) / (g_sq / 5.0 + cfg.epsilon);
    let x = ParamVector::zeros(5).unwrap();
    let grid = [16usize, 32, 64, 128, 256, 512, 1024, 2048, 4096];
    let rows = concentration_study(&f, &x, &cfg, &grid, 200, 42, rho_ref).unwrap();
    let slope = log_log_slope(&rows, |r| r.q95_err);
    assert!(slope <= -0.4, "q95 slope {slope} too shallow: {rows:?}");
    report("5 (concentration slope)", started, Duration::from_secs(600));
}

// -------------------------------------------------------------------------
// 6. Stationarity property: under the eta0/t^0.6 schedule, the best Clarke
//    distance over 1e5 steps drops below 0.05 on every one of 10 seeds for
//    three objectives.
// -------------------------------------------------------------------------
#[test]
fn criterion_06_stationarity_convergence() {
    let started = Instant::now();
    let objectives = [
        ObjectiveSpec::Synthetic,
        ObjectiveSpec::L1Quadratic {
            anchor: vec![1.0, 1.0],
            l1_weight: 0.5,
            quad: vec![1.0, 1.0],
        },
        ObjectiveSpec::L1Quadratic {
            anchor: vec![2.0, -2.0, 1.5, 1.0, -1.0],
            l1_weight: 0.3,
            quad: vec![1.0, 2.0, 1.0, 0.5, 1.0],
        },
    ];
    for spec in objectives {
        let cfg = ExperimentConfig {
            objective: spec.clone(),
            optimizer: OptimizerSpec::Sadam(SAdamParams::default()),
            schedule: StepSchedule::RobbinsMonro { eta0: 0.5, p: 0.6 },
            total_steps: 100_000,
            batch_size: None,
            seeds: (1..=10).collect(),
            record_every: 100_000,
            init: InitSpec::Default,
            chatter_window: None,
            loss_threshold: None,
        };
        for record in run_experiment(&cfg).unwrap() {
            let min_clarke = record
                .summary
                .min_clarke_dist
                .expect("objective has an oracle");
            assert!(
                min_clarke < 0.05,
                "{} seed {}: min Clarke distance {min_clarke}",
                spec.id(),
                record.summary.seed
            );
        }
    }
    report("6 (stationarity property)", started, Duration::from_secs(300));
}

// -------------------------------------------------------------------------
// 7. Behavioral reproduction: (a) at matched constant eta = 0.1 over 1e4
//    steps and 10 seeds, the median chattering cosine component is strictly
//    lower for S-Adam than for AdamW; (b) at reference defaults
//    (eta = 0.001, T = 2e4, seed 42) the final iterate lands within 0.05 of
//    (1, 1) with value within 0.02 of 1.
// -------------------------------------------------------------------------
#[test]
fn criterion_07_behavioral_reproduction() {
    let started = Instant::now();
    let seeds: Vec<u64> = (1..=10).collect();
    let base = |optimizer: OptimizerSpec| ExperimentConfig {
        objective: ObjectiveSpec::Synthetic,
        optimizer,
        schedule: StepSchedule::Constant { eta0: 0.1 },
        total_steps: 10_000,
        batch_size: None,
        seeds: seeds.clone(),
        record_every: 10_000,
        init: InitSpec::Default,
        chatter_window: None,
        loss_threshold: None,
    };
    let chat = |recs: Vec<sadam_core::experiments::RunRecord>| -> f64 {
        let cos: Vec<f64> = recs
            .iter()
            .map(|r| r.summary.chatter_cosine.expect("window fits"))
            .collect();
        median(&cos)
    };
    let sadam_med = chat(run_experiment(&base(OptimizerSpec::Sadam(SAdamParams::default()))).unwrap());
    let adamw_med = chat(run_experiment(&base(OptimizerSpec::Adamw(AdamWParams::default()))).unwrap());
    assert!(
        sadam_med < adamw_med,
        "median chatter: sadam {sadam_med} vs adamw {adamw_med}"
    );

    let defaults_run = ExperimentConfig {
        objective: ObjectiveSpec::Synthetic,
        optimizer: OptimizerSpec::Sadam(SAdamParams::default()),
        schedule: StepSchedule::Constant { eta0: 0.001 },
        total_steps: 20_000,
        batch_size: None,
        seeds: vec![42],
        record_every: 20_000,
        init: InitSpec::Default,
        chatter_window: None,
        loss_threshold: None,
    };
    let record = &run_experiment(&defaults_run).unwrap()[0];
    let w = &record.final_w;
    let dist = ((w[0] - 1.0).powi(2) + (w[1] - 1.0).powi(2)).sqrt();
    assert!(dist < 0.05, "final iterate {:?} is {dist} from (1,1)", w.as_slice());
    let value = synthetic_landscape().value(w, None);
    assert!((value - 1.0).abs() < 0.02, "final value {value}");
    report("7 (behavioral reproduction)", started, Duration::from_secs(120));
}

// -------------------------------------------------------------------------
// 8. Field structure: on the 2-D staircase, nodes within delta of a
//    quantization jump score a strictly higher median than plateau-center
//    nodes, and a dense-direction oracle confirms the two designated nodes.
// -------------------------------------------------------------------------
#[test]
fn criterion_08_field_structure() {
    let started = Instant::now();
    let q = QuantizerConfig::new(4.0, -8, 8).unwrap();
    let f = Staircase::with_dim(q, 0.7, 2);
    let cfg = LgiConfig {
        k: 8,
        ..LgiConfig::default()
    };
    let grid = GridSpec {
        x_min: 0.0,
        x_max: 0.25,
        y_min: 0.0,
        y_max: 0.25,
        nx: 51,
        ny: 51,
    };
    let nodes = lgi_field_scan(&f, &grid, &cfg, 42).unwrap();
    let near_jump = |v: f64| (v - 0.125).abs() < cfg.delta;
    let near_center = |v: f64| v.min(0.25 - v) < cfg.delta;
    let jump: Vec<f64> = nodes
        .iter()
        .filter(|n| near_jump(n.x) || near_jump(n.y))
        .map(|n| n.rho)
        .collect();
    let center: Vec<f64> = nodes
        .iter()
        .filter(|n| near_center(n.x) && near_center(n.y))
        .map(|n| n.rho)
        .collect();
    assert!(!jump.is_empty() && !center.is_empty());
    assert!(
        median(&jump) > median(&center),
        "jump median {} vs plateau median {}",
        median(&jump),
        median(&center)
    );

    // Dense-direction oracle: 1e5 evenly spaced directions on the circle.
    let dense_rho = |x: f64, y: f64| {
        let point = ParamVector::new(vec![x, y]).unwrap();
        let base = f.value(&point, None);
        let m = 100_000usize;
        let probes: Vec<f64> = (0..m)
            .map(|i| {
                let theta = 2.0 * std::f64::consts::PI * (i as f64) / (m as f64);
                let shifted = ParamVector::new(vec![
                    x + cfg.delta * theta.cos(),
                    y + cfg.delta * theta.sin(),
                ])
                .unwrap();
                (f.value(&shifted, None) - base) / cfg.delta
            })
            .collect();
        estimate_from_probes(base, probes, &cfg).rho
    };
    // Designated plateau-center node: every direction stays on the
    // plateau, so the dense score is exactly zero.
    assert_eq!(dense_rho(0.0, 0.0), 0.0);
    // Designated near-jump node (within delta of the 0.125 boundary).
    let jump_rho = dense_rho(0.12, 0.0);
    assert!(jump_rho > 0.1, "dense near-jump score {jump_rho}");
    report("8 (field structure)", started, Duration::from_secs(120));
}

// -------------------------------------------------------------------------
// 9. Stability: one-sample swap on the quantized classifier over 20 seeds;
//    the median final-iterate drift ratio S-Adam/AdamW is at most 1.
// -------------------------------------------------------------------------
#[test]
fn criterion_09_stability_ratio() {
    let started = Instant::now();
    let cfg = StabilityConfig::default();
    assert_eq!(cfg.seeds.len(), 20);
    let rows = stability_study(&cfg).unwrap();
    assert!(rows.iter().all(|r| r.ok), "all trainings must complete");
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
    let med = median(&ratios);
    assert!(med <= 1.0, "median drift ratio {med} (per-seed: {ratios:?})");
    report("9 (stability ratio)", started, Duration::from_secs(600));
}

// -------------------------------------------------------------------------
// 10. Determinism: every subcommand, rerun on an identical config and
//     seed, reproduces byte-identical output files (SHA-256 match).
// -------------------------------------------------------------------------
fn sha256_file(path: &Path) -> String {
    let bytes = std::fs::read(path).unwrap();
    Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn run_cli(args: &[&str]) -> std::process::Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_sadam"))
        .args(args)
        .env_remove("SADAM_OUT_DIR")
        .output()
        .expect("binary runs")
}

#[test]
fn criterion_10_subcommand_determinism() {
    let started = Instant::now();
    let scratch = std::env::temp_dir().join(format!("sadam-accept-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&scratch);
    std::fs::create_dir_all(&scratch).unwrap();

    let write_cfg = |name: &str, body: &str| -> PathBuf {
        let path = scratch.join(name);
        std::fs::write(&path, body).unwrap();
        path
    };
    let run_cfg = write_cfg(
        "run.toml",
        r#"schema_version = 1
[experiment]
total_steps = 500
seeds = [42, 7]
record_every = 50
[experiment.objective]
kind = "synthetic"
"#,
    );
    let compare_cfg = write_cfg(
        "compare.toml",
        r#"schema_version = 1
[experiment]
total_steps = 300
seeds = [42]
record_every = 100
[experiment.objective]
kind = "synthetic"
[[compare.optimizers]]
kind = "sadam"
[[compare.optimizers]]
kind = "adamw"
[[compare.optimizers]]
kind = "prox_sgd"
"#,
    );
    let probe_cfg = write_cfg(
        "probe.toml",
        r#"schema_version = 1
[probe]
seed = 42
[probe.objective]
kind = "staircase"
scale = 4.0
q_min = -8
q_max = 8
target = 0.7
dim = 2
[probe.grid]
x_min = 0.0
x_max = 0.25
y_min = 0.0
y_max = 0.25
nx = 21
ny = 21
[probe.lgi]
k = 4
"#,
    );
    let conc_cfg = write_cfg(
        "conc.toml",
        r#"schema_version = 1
[concentration]
k_grid = [16, 64, 256]
trials = 40
seed = 42
[concentration.objective]
kind = "linear"
gradient = [0.4, -0.2, 0.6, 0.1, -0.5]
"#,
    );
    let stab_cfg = write_cfg(
        "stab.toml",
        r#"schema_version = 1
[stability]
n = 10
total_steps = 60
batch_size = 4
seeds = [0, 1, 2]
[stability.sadam]
bias_correction = true
"#,
    );

    let jobs: Vec<(&str, &PathBuf, Vec<&str>)> = vec![
        ("run", &run_cfg, vec!["run_seed42.csv", "run_seed42.json", "run_seed7.csv", "run_seed7.json"]),
        ("compare", &compare_cfg, vec!["compare.csv"]),
        ("probe", &probe_cfg, vec!["probe.csv"]),
        ("concentration", &conc_cfg, vec!["concentration.csv"]),
        ("stability", &stab_cfg, vec!["stability.csv"]),
    ];
    for (subcommand, cfg, artifacts) in jobs {
        let dir_a = scratch.join(format!("{subcommand}-a"));
        let dir_b = scratch.join(format!("{subcommand}-b"));
        for dir in [&dir_a, &dir_b] {
            let out = run_cli(&[
                subcommand,
                cfg.to_str().unwrap(),
                "--out",
                dir.to_str().unwrap(),
            ]);
            assert_eq!(out.status.code(), Some(0), "{subcommand}: {out:?}");
        }
        for name in artifacts {
            let (a, b) = (dir_a.join(name), dir_b.join(name));
            assert_eq!(
                sha256_file(&a),
                sha256_file(&b),
                "{subcommand}: {name} differs between reruns"
            );
        }
    }

    // `defaults` writes no files; its stdout must still be reproducible.
    assert_eq!(run_cli(&["defaults"]).stdout, run_cli(&["defaults"]).stdout);
    report("10 (subcommand determinism)", started, Duration::from_secs(300));
}
