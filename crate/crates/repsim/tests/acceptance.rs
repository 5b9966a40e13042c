//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured values. Closed-form oracles and seeded qualitative
//! reproductions; no criterion depends on network access or external data.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use repsim::bench::{
    cross_seed_baseline, detection_threshold, normalize_matrix, run_benchmark,
    CorrelationOutcome, LoadedSuite, SuiteConfig,
};
use repsim::io::load_suite;
use repsim::metrics::{
    distance, linear_cka_distance, mean_cca_distance, pwcca_distance, procrustes_distance,
    r2_cca_distance,
};
use repsim::perturb::{delete_components, random_invertible, PcDeletionSpec};
use repsim::repcore::{normalize, svd, CenteringAxis, Matrix, RawRepresentation};
use repsim::stats::{bootstrap_compare, kendall, kendall_brute_force, spearman};
use repsim::synth::{build_suite, SuitePreset, SynthConfig};
use repsim::MetricId;

fn random_matrix(p: usize, n: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Matrix::from_fn(p, n, |_, _| StandardNormal.sample(&mut rng))
}

fn normalized(p: usize, n: usize, seed: u64) -> Matrix {
    normalize_matrix(&random_matrix(p, n, seed), "fixture", CenteringAxis::PerNeuron).unwrap()
}

#[test]
fn criterion_01_metric_identity_and_range() {
    let start = std::time::Instant::now();
    let reps: Vec<Matrix> = (0..100).map(|i| normalized(6, 40, 1000 + i)).collect();
    for (i, rep) in reps.iter().enumerate() {
        for metric in MetricId::ALL {
            let d = distance(metric, rep, rep).unwrap();
            assert!(d <= 1e-8, "{metric} identity failed on rep {i}: {d}");
        }
    }
    let mut max_pair: f64 = 0.0;
    for pair in reps.windows(2) {
        let d = procrustes_distance(&pair[0], &pair[1]).unwrap();
        assert!(
            (0.0..=2.0 + 1e-10).contains(&d),
            "procrustes out of range: {d}"
        );
        max_pair = max_pair.max(d);
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 10, "took {elapsed:?}");
    println!(
        "PASS criterion 1: identity <= 1e-8 on 100 reps x 5 metrics; procrustes pairs in [0, 2] (max {max_pair:.4}); {elapsed:?}"
    );
}

#[test]
fn criterion_02_diagonal_closed_forms() {
    let start = std::time::Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_proc: f64 = 0.0;
    let mut worst_cka: f64 = 0.0;
    for _ in 0..200 {
        let p = rng.random_range(2..8);
        let s1: Vec<f64> = (0..p).map(|_| rng.random_range(0.05..2.0)).collect();
        let s2: Vec<f64> = (0..p).map(|_| rng.random_range(0.05..2.0)).collect();
        let (a, b) = repsim::perturb::diagonal_family(&s1, &s2).unwrap();

        let proc = procrustes_distance(&a, &b).unwrap();
        let proc_oracle: f64 = s1.iter().zip(&s2).map(|(x, y)| (x - y) * (x - y)).sum();
        worst_proc = worst_proc.max((proc - proc_oracle).abs());

        let cka = linear_cka_distance(&a, &b).unwrap();
        let sq1 = DVector::from_iterator(p, s1.iter().map(|x| x * x));
        let sq2 = DVector::from_iterator(p, s2.iter().map(|x| x * x));
        let cka_oracle = 1.0 - sq1.dot(&sq2) / (sq1.norm() * sq2.norm());
        worst_cka = worst_cka.max((cka - cka_oracle).abs());
    }
    assert!(worst_proc <= 1e-8, "procrustes closed form off by {worst_proc}");
    assert!(worst_cka <= 1e-8, "cka closed form off by {worst_cka}");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 5, "took {elapsed:?}");
    println!(
        "PASS criterion 2: 200 diagonal pairs; |procrustes - sum((s1-s2)^2)| <= {worst_proc:.2e}, |cka - squared-sv cosine| <= {worst_cka:.2e}; {elapsed:?}"
    );
}

#[test]
fn criterion_03_cca_invariance() {
    let mut worst_both: f64 = 0.0;
    let mut worst_pwcca: f64 = 0.0;
    for trial in 0..100u64 {
        let a = random_matrix(4, 60, 3000 + trial);
        let b = random_matrix(4, 60, 4000 + trial);
        let m = random_invertible(4, 5000 + trial, 100.0).unwrap();
        let n = random_invertible(4, 6000 + trial, 100.0).unwrap();
        let ta = &m * &a;
        let tb = &n * &b;
        for (base, moved) in [
            (mean_cca_distance(&a, &b), mean_cca_distance(&ta, &tb)),
            (r2_cca_distance(&a, &b), r2_cca_distance(&ta, &tb)),
        ] {
            worst_both = worst_both.max((base.unwrap() - moved.unwrap()).abs());
        }
        let base = pwcca_distance(&a, &b).unwrap();
        let moved = pwcca_distance(&a, &tb).unwrap();
        worst_pwcca = worst_pwcca.max((base - moved).abs());
    }
    assert!(worst_both <= 1e-6, "mean/r2 cca invariance off by {worst_both}");
    assert!(worst_pwcca <= 1e-6, "pwcca invariance off by {worst_pwcca}");
    println!(
        "PASS criterion 3: 100 invertible-transform trials; mean/r2 shift <= {worst_both:.2e}, pwcca (second argument) shift <= {worst_pwcca:.2e}"
    );
}

#[test]
fn criterion_04_truncation_law() {
    let mut worst_tail: f64 = 0.0;
    let mut worst_k0: f64 = 0.0;
    for trial in 0..50u64 {
        let rep = normalized(6, 50, 7000 + trial);
        let factors = svd(&rep).unwrap();
        for k in 0..6usize {
            let truncated = delete_components(&rep, k).unwrap();
            let proc = procrustes_distance(&rep, &truncated).unwrap();
            let tail: f64 = factors.sigma.iter().rev().take(k).map(|s| s * s).sum();
            worst_tail = worst_tail.max((proc - tail).abs());
        }
        let rotated = delete_components(&rep, 0).unwrap();
        for metric in MetricId::ALL {
            worst_k0 = worst_k0.max(distance(metric, &rep, &rotated).unwrap());
        }
    }
    assert!(worst_tail <= 1e-8, "truncation law off by {worst_tail}");
    assert!(worst_k0 <= 1e-6, "k=0 deletion moved a metric by {worst_k0}");
    println!(
        "PASS criterion 4: 50 reps x 6 deletions; |procrustes - tail energy| <= {worst_tail:.2e}; k=0 distance <= {worst_k0:.2e} across all metrics"
    );
}

/// Independent Spearman oracle: counting-based average ranks, then a
/// straight-line Pearson.
fn spearman_oracle(x: &[f64], y: &[f64]) -> Option<f64> {
    let rank = |values: &[f64]| -> Vec<f64> {
        values
            .iter()
            .map(|&v| {
                let below = values.iter().filter(|&&w| w < v).count() as f64;
                let equal = values.iter().filter(|&&w| w == v).count() as f64;
                below + (equal + 1.0) / 2.0
            })
            .collect()
    };
    let rx = rank(x);
    let ry = rank(y);
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for i in 0..x.len() {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

#[test]
fn criterion_05_rank_statistic_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0usize;
    for _ in 0..1000 {
        let n = rng.random_range(2..80);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(0..8) as f64).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(0..8) as f64).collect();
        match (kendall(&x, &y), kendall_brute_force(&x, &y)) {
            (Ok(fast), Ok(brute)) => {
                assert_eq!(fast.to_bits(), brute.to_bits(), "tau mismatch on {x:?} {y:?}");
                checked += 1;
            }
            (Err(_), Err(_)) => {}
            (a, b) => panic!("error mismatch: {a:?} vs {b:?}"),
        }
        match (spearman(&x, &y), spearman_oracle(&x, &y)) {
            (Ok(ours), Some(oracle)) => {
                assert!((ours - oracle).abs() <= 1e-12, "rho mismatch on {x:?} {y:?}");
            }
            (Err(_), None) => {}
            (a, b) => panic!("degeneracy mismatch: {a:?} vs {b:?}"),
        }
    }
    let tau = kendall(&[1.0, 2.0, 2.0, 3.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
    assert!((tau - 5.0 / 30.0f64.sqrt()).abs() <= 1e-12);
    println!(
        "PASS criterion 5: tau-b fast path bit-identical to the quadratic count on {checked} tied vectors; spearman matches pearson-on-ranks <= 1e-12; worked example tau = 5/sqrt(30)"
    );
}

/// Unit-Frobenius diagonal family whose procrustes distance to the k = 0
/// entry is a closed-form function of the deleted tail energy; functionality
/// is defined from that same closed form, so `|delta f|` equals the distance
/// by construction.
fn exact_procrustes_suite(order: &[usize]) -> LoadedSuite {
    let p = 8usize;
    // Base diagonal: descending, unit energy.
    let raw_base: Vec<f64> = (0..p).map(|l| 1.0 / (l as f64 + 2.0)).collect();
    let energy: f64 = raw_base.iter().map(|c| c * c).sum();
    let base: Vec<f64> = raw_base.iter().map(|c| c / energy.sqrt()).collect();
    let head_sq = base[0] * base[0];

    let tail_energy = |k: usize| -> f64 {
        base.iter().rev().take(k).map(|c| c * c).sum()
    };
    // Closed-form procrustes distance between entry 0 and entry k.
    let gap = |k: usize| -> f64 {
        let t = tail_energy(k);
        2.0 * t + 2.0 * head_sq - 2.0 * (head_sq * (head_sq + t)).sqrt()
    };

    let entries: Vec<(RawRepresentation, f64)> = order
        .iter()
        .map(|&k| {
            let mut diag = vec![0.0; p];
            diag[0] = (head_sq + tail_energy(k)).sqrt();
            diag[1..(p - k)].copy_from_slice(&base[1..(p - k)]);
            let matrix = Matrix::from_diagonal(&DVector::from_vec(diag));
            let rep = RawRepresentation::new(matrix, "diag", k as u32).unwrap();
            (rep, 1.0 - gap(k))
        })
        .collect();

    LoadedSuite::from_raw(
        entries,
        SuiteConfig {
            metrics: vec![MetricId::Procrustes],
            centering: CenteringAxis::None,
            ..SuiteConfig::default()
        },
    )
    .unwrap()
}

#[test]
fn criterion_06_benchmark_procedure() {
    let order: Vec<usize> = (0..7).collect();
    let suite = exact_procrustes_suite(&order);
    let report = run_benchmark(&suite).unwrap();
    let rc = match &report.correlations[&MetricId::Procrustes] {
        CorrelationOutcome::Defined(rc) => rc.clone(),
        other => panic!("expected defined correlation, got {other:?}"),
    };
    assert_eq!(rc.rho, 1.0, "rho should be exactly 1");
    assert_eq!(rc.tau, 1.0, "tau should be exactly 1");

    // Construction really does give d = |delta f| (up to float noise).
    for row in &report.pairs {
        let f_ref = 1.0; // entry k = 0
        let f_row = f_ref - row.delta_f;
        let _ = f_row;
        let d = row.distances[&MetricId::Procrustes];
        assert!(
            (d - row.delta_f).abs() <= 1e-9,
            "distance {d} != delta_f {} at layer {}",
            row.delta_f,
            row.layer_id
        );
    }

    let permuted = exact_procrustes_suite(&[4, 0, 6, 2, 5, 1, 3]);
    let report_permuted = run_benchmark(&permuted).unwrap();
    let bytes_a = serde_json::to_vec(&report).unwrap();
    let bytes_b = serde_json::to_vec(&report_permuted).unwrap();
    assert_eq!(bytes_a, bytes_b, "entry order changed the report bytes");
    println!(
        "PASS criterion 6: constructed suite gives rho = tau = 1 exactly; permuted entry order leaves the report byte-identical ({} bytes)",
        bytes_a.len()
    );
}

/// Diagonal suite with nested supports: mean-CCA sees only the rank pattern
/// (perfect correlation with functionality by construction) while linear CKA
/// sees only the random magnitudes (noise).
fn rank_vs_noise_suite() -> LoadedSuite {
    let p = 16usize;
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut entries = Vec::new();
    for rank_tail in 2..=13usize {
        for copy in 0..2 {
            let mut diag = vec![0.0; p];
            diag[0] = rng.random_range(3.0..5.0);
            for item in diag.iter_mut().take(rank_tail + 1).skip(1) {
                *item = rng.random_range(0.5..1.5);
            }
            let matrix = Matrix::from_diagonal(&DVector::from_vec(diag));
            let rep = RawRepresentation::new(
                matrix,
                format!("rank{rank_tail}-{copy}"),
                rank_tail as u32,
            )
            .unwrap();
            let f = (1 + rank_tail) as f64 / p as f64;
            entries.push((rep, f));
        }
    }
    LoadedSuite::from_raw(
        entries,
        SuiteConfig {
            metrics: vec![MetricId::MeanCca, MetricId::LinearCka],
            centering: CenteringAxis::None,
            ..SuiteConfig::default()
        },
    )
    .unwrap()
}

#[test]
fn criterion_07_bootstrap_protocol() {
    let suite = rank_vs_noise_suite();
    let metrics = [MetricId::MeanCca, MetricId::LinearCka];

    // Time the protocol run itself; the determinism re-runs below are test
    // overhead on top of it.
    let start = std::time::Instant::now();
    let reports = bootstrap_compare(&suite, &metrics, 2000, 99).unwrap();
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}");

    let rerun = bootstrap_compare(&suite, &metrics, 2000, 99).unwrap();
    assert_eq!(
        serde_json::to_vec(&reports).unwrap(),
        serde_json::to_vec(&rerun).unwrap(),
        "rerun changed the bootstrap report"
    );
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let single = pool.install(|| bootstrap_compare(&suite, &metrics, 2000, 99).unwrap());
    assert_eq!(
        serde_json::to_vec(&reports).unwrap(),
        serde_json::to_vec(&single).unwrap(),
        "thread count changed the bootstrap report"
    );

    for report in &reports {
        assert_eq!(report.pair, (MetricId::MeanCca, MetricId::LinearCka));
        assert_eq!(report.diffs.len() + report.degenerate_resamples, 2000);
        assert!(
            report.significant && report.ci_low > 0.0,
            "{} interval [{}, {}] should exclude 0",
            report.statistic,
            report.ci_low,
            report.ci_high
        );
    }
    let ci: Vec<String> = reports
        .iter()
        .map(|r| format!("{}: [{:.3}, {:.3}]", r.statistic, r.ci_low, r.ci_high))
        .collect();
    println!(
        "PASS criterion 7: 2000 resamples byte-identical across reruns and thread counts; perfect-vs-noise intervals exclude 0 ({}); {elapsed:?}",
        ci.join(", ")
    );
}

#[test]
fn criterion_08_pc_deletion_reproduction() {
    let start = std::time::Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let config = SynthConfig::preset_pc_deletion();
    let built = build_suite(&config, SuitePreset::PcDeletion, dir.path()).unwrap();

    // Probe accuracy is non-increasing along the grid within 2-point slack.
    let mut by_k: std::collections::BTreeMap<usize, Vec<f64>> = Default::default();
    for entry in &built.suite.entries {
        let k: usize = entry.tags["k"].parse().unwrap();
        by_k.entry(k).or_default().push(entry.functionality);
    }
    let curve: Vec<(usize, f64)> = by_k
        .iter()
        .map(|(k, accs)| (*k, accs.iter().sum::<f64>() / accs.len() as f64))
        .collect();
    let mut running_min = f64::MAX;
    for &(k, acc) in &curve {
        assert!(
            acc <= running_min + 0.02,
            "probe accuracy rose above slack at k = {k}: {acc:.3} vs min {running_min:.3}"
        );
        running_min = running_min.min(acc);
    }

    // Detection-threshold ordering: CKA >= procrustes >= PWCCA fractions.
    let full_reps: Vec<Matrix> = built
        .suite
        .entries
        .iter()
        .filter(|e| e.tags["k"] == "0")
        .map(|e| {
            let m = repsim::io::read_matrix(&dir.path().join(&e.path), Default::default()).unwrap();
            normalize_matrix(&m, &e.model_id, CenteringAxis::PerNeuron).unwrap()
        })
        .collect();
    assert_eq!(full_reps.len(), config.train_seeds.len());
    let width = full_reps[0].nrows();
    let grid = config.deletion_grid.clone().unwrap();

    let mut fractions = std::collections::BTreeMap::new();
    for metric in [MetricId::LinearCka, MetricId::Procrustes, MetricId::Pwcca] {
        let baseline = cross_seed_baseline(&full_reps, metric).unwrap();
        let mean_fraction = full_reps
            .iter()
            .map(|rep| {
                detection_threshold(rep, &grid, metric, baseline)
                    .unwrap()
                    .threshold_fraction
                    .unwrap_or(1.0)
            })
            .sum::<f64>()
            / full_reps.len() as f64;
        fractions.insert(metric, mean_fraction);
    }
    let cka = fractions[&MetricId::LinearCka];
    let proc = fractions[&MetricId::Procrustes];
    let pwcca = fractions[&MetricId::Pwcca];
    assert!(
        cka >= proc && proc >= pwcca,
        "detection fractions out of order: cka {cka:.3}, procrustes {proc:.3}, pwcca {pwcca:.3}"
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 600, "took {elapsed:?}");
    println!(
        "PASS criterion 8: width-{width} deletion preset; detection fractions cka {cka:.3} >= procrustes {proc:.3} >= pwcca {pwcca:.3}; probe curve non-increasing within slack; {elapsed:?}"
    );
}

#[test]
fn criterion_09_layer_depth_reproduction() {
    let start = std::time::Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let config = SynthConfig::preset_layer_depth();
    assert_eq!(config.train_seeds.len(), 6);
    assert_eq!(config.hidden_widths.len(), 4);
    let built = build_suite(&config, SuitePreset::LayerDepth, dir.path()).unwrap();
    assert_eq!(built.suite.entries.len(), 24);

    // Probe accuracy must vary substantially with depth.
    let mut by_layer: std::collections::BTreeMap<u32, Vec<f64>> = Default::default();
    for entry in &built.suite.entries {
        by_layer
            .entry(entry.layer_id)
            .or_default()
            .push(entry.functionality);
    }
    let means: Vec<f64> = by_layer
        .values()
        .map(|accs| accs.iter().sum::<f64>() / accs.len() as f64)
        .collect();
    let spread = means.iter().cloned().fold(f64::MIN, f64::max)
        - means.iter().cloned().fold(f64::MAX, f64::min);
    assert!(
        spread >= 0.05,
        "layer-depth probe spread too small: {spread:.3}"
    );

    let (_, loaded) = load_suite(&built.suite_path).unwrap();
    let report = run_benchmark(&loaded).unwrap();
    let mut summary = Vec::new();
    for metric in MetricId::ALL {
        match &report.correlations[&metric] {
            CorrelationOutcome::Defined(rc) => {
                assert!(
                    rc.rho >= 0.3,
                    "{metric} spearman rho {:.3} below 0.3",
                    rc.rho
                );
                summary.push(format!("{metric} {:.3}", rc.rho));
            }
            other => panic!("{metric} degenerate: {other:?}"),
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 600, "took {elapsed:?}");
    println!(
        "PASS criterion 9: 6 seeds x 4 layers, probe spread {spread:.3}; spearman rho >= 0.3 for all metrics ({}); {elapsed:?}",
        summary.join(", ")
    );
}

#[test]
fn criterion_10_file_format_round_trips() {
    let dir = tempfile::tempdir().unwrap();

    // NPY write -> read, bit exact.
    let matrix = random_matrix(5, 9, 10_000);
    let npy_path = dir.path().join("rep.npy");
    repsim::io::write_matrix(&npy_path, &matrix).unwrap();
    let back = repsim::io::read_matrix(&npy_path, Default::default()).unwrap();
    assert_eq!(matrix, back);

    // Corrupted magic rejected.
    let mut bytes = std::fs::read(&npy_path).unwrap();
    bytes[1] = b'X';
    let bad_path = dir.path().join("bad.npy");
    std::fs::write(&bad_path, &bytes).unwrap();
    match repsim::io::read_matrix(&bad_path, Default::default()) {
        Err(repsim::Error::Format(repsim::error::FormatError::BadMagic { .. })) => {}
        other => panic!("expected BadMagic, got {other:?}"),
    }

    // Suite JSON round trip through the real loader.
    let rep_a = dir.path().join("a.npy");
    let rep_b = dir.path().join("b.npy");
    repsim::io::write_matrix(&rep_a, &random_matrix(4, 30, 10_001)).unwrap();
    repsim::io::write_matrix(&rep_b, &random_matrix(4, 30, 10_002)).unwrap();
    let suite = repsim::io::SuiteFile {
        entries: vec![
            repsim::io::SuiteFileEntry {
                path: "a.npy".into(),
                functionality: 0.8,
                model_id: "a".into(),
                layer_id: 0,
                tags: Default::default(),
                orientation: Default::default(),
            },
            repsim::io::SuiteFileEntry {
                path: "b.npy".into(),
                functionality: 0.5,
                model_id: "b".into(),
                layer_id: 0,
                tags: Default::default(),
                orientation: Default::default(),
            },
        ],
        reference_rule: Default::default(),
        include_reference_pair: true,
        centering: CenteringAxis::PerNeuron,
        metrics: MetricId::ALL.to_vec(),
    };
    let suite_path = dir.path().join("suite.json");
    repsim::io::write_suite(&suite_path, &suite).unwrap();
    let (parsed, loaded) = load_suite(&suite_path).unwrap();
    assert_eq!(parsed, suite);
    assert_eq!(loaded.entries().len(), 2);

    // Report JSON round trip.
    let report = run_benchmark(&loaded).unwrap();
    let envelope = repsim::io::ReportFile::new(
        repsim::io::ReportPayload::Benchmark(report),
        serde_json::to_value(&suite).unwrap(),
    )
    .with_fingerprint(loaded.fingerprint());
    let report_path = dir.path().join("report.json");
    repsim::io::write_report(&report_path, &envelope).unwrap();
    let read_back = repsim::io::read_report(&report_path).unwrap();
    assert_eq!(envelope, read_back);

    println!(
        "PASS criterion 10: npy round trip bit-exact, corrupted magic rejected, suite and report JSON round trip losslessly"
    );
}

#[test]
fn normalization_contract_on_random_input() {
    // Shared protocol check used by several criteria: row sums vanish and
    // the Frobenius norm is exactly one after normalization.
    let raw = RawRepresentation::new(random_matrix(8, 50, 11_000), "m", 0).unwrap();
    let norm = normalize(&raw, CenteringAxis::PerNeuron).unwrap();
    for row in norm.data.row_iter() {
        assert!(row.sum().abs() <= 1e-9 * 50.0);
    }
    assert!((norm.data.norm() - 1.0).abs() <= 1e-12);
}

#[test]
fn deletion_grid_matches_scaled_default() {
    // The pc-deletion preset's grid is the scaled standard grid plus the
    // dense tail; the scaled grid at width 768 is the original.
    let spec = PcDeletionSpec::scaled_default(768).unwrap();
    assert_eq!(
        spec.k_values(),
        &[0, 100, 200, 300, 400, 500, 600, 650, 700, 725, 750, 758, 763, 767]
    );
    let preset = SynthConfig::preset_pc_deletion();
    let grid = preset.deletion_grid.unwrap();
    let scaled = PcDeletionSpec::scaled_default(64).unwrap();
    for k in scaled.k_values() {
        assert!(grid.contains(k), "grid missing scaled point {k}");
    }
}
