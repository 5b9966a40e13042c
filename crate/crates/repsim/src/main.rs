//! Command-line shell over the repsim library. Thin by design: every
//! subcommand parses flags, calls one library entry point, and serializes
//! the result.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use repsim::bench::{
    cross_seed_baseline, detection_threshold, normalize_matrix, pairwise_layer_matrix,
    run_benchmark,
};
use repsim::error::{Error, Result};
use repsim::io::{
    load_suite, read_matrix, write_matrix, write_pair_table, write_report, Orientation,
    ReportFile, ReportPayload,
};
use repsim::perturb::delete_components;
use repsim::repcore::{normalize, CenteringAxis, RawRepresentation};
use repsim::stats::bootstrap_compare;
use repsim::synth::{build_suite, SuitePreset, SynthConfig};
use repsim::MetricId;

#[derive(Parser)]
#[command(name = "repsim", version, about = "Representation similarity metrics and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonRepArgs {
    /// Centering applied before metrics: per-neuron, per-example, or none.
    #[arg(long, default_value = "per-neuron")]
    center: String,
    /// Stored layout of the npy files: neurons-rows or neurons-columns.
    #[arg(long, default_value = "neurons-rows")]
    orientation: String,
}

#[derive(Subcommand)]
enum Command {
    /// Print the distance between two representation files.
    Dist {
        /// Metric name, or "all" for every measure.
        #[arg(long)]
        metric: String,
        #[command(flatten)]
        rep: CommonRepArgs,
        a: PathBuf,
        b: PathBuf,
    },
    /// Pairwise layer-distance matrices between two model directories.
    Heatmap {
        #[arg(long)]
        metric: String,
        /// Two directories of npy files, one per model (layers sorted by
        /// file name).
        #[arg(long, num_args = 2, value_names = ["A_DIR", "B_DIR"])]
        models: Vec<PathBuf>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        rep: CommonRepArgs,
    },
    /// Delete the k smallest principal components of a representation.
    Pcdelete {
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        rep: CommonRepArgs,
        input: PathBuf,
        output: PathBuf,
    },
    /// Deletion curve and detection threshold against a cross-seed baseline.
    Threshold {
        #[arg(long)]
        metric: String,
        /// Comma-separated deletion counts.
        #[arg(long, value_delimiter = ',', required = true)]
        k_list: Vec<usize>,
        /// Directory of same-layer npy files from differently seeded models.
        #[arg(long)]
        baseline_suite: PathBuf,
        /// Optional report JSON output (prints a table otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        rep: CommonRepArgs,
        representation: PathBuf,
    },
    /// Run the benchmark procedure on a suite file.
    Bench {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write the per-pair table as CSV.
        #[arg(long)]
        pairs_csv: Option<PathBuf>,
        /// Stamp the report with the wall-clock time (off by default so
        /// reruns are byte-identical).
        #[arg(long)]
        timestamp: bool,
    },
    /// Bootstrap comparison of rank correlations between metrics.
    Bootstrap {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long, default_value_t = 2000)]
        resamples: usize,
        /// Resampling seed (required: all randomness is explicit).
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        timestamp: bool,
    },
    /// Synthetic model factory.
    Synth {
        #[command(subcommand)]
        command: SynthCommand,
    },
}

#[derive(Subcommand)]
enum SynthCommand {
    /// Train the preset's models and write a suite (npy files + suite.json).
    BuildSuite {
        /// layer-depth or pc-deletion.
        #[arg(long)]
        preset: String,
        /// Optional JSON config; missing fields take preset defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli.command) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Dist { metric, rep, a, b } => {
            let (center, orientation) = rep.parse()?;
            let ma = load_normalized(&a, orientation, center)?;
            let mb = load_normalized(&b, orientation, center)?;
            if metric == "all" {
                for m in MetricId::ALL {
                    println!("{m} {:.6}", repsim::metrics::distance(m, &ma, &mb)?);
                }
            } else {
                let m: MetricId = metric.parse()?;
                println!("{:.6}", repsim::metrics::distance(m, &ma, &mb)?);
            }
            Ok(())
        }
        Command::Heatmap {
            metric,
            models,
            out,
            rep,
        } => {
            let (center, orientation) = rep.parse()?;
            let metric: MetricId = metric.parse()?;
            let model_a = load_layer_dir(&models[0], orientation, center)?;
            let model_b = load_layer_dir(&models[1], orientation, center)?;
            let matrices = pairwise_layer_matrix(&model_a, &model_b, metric)?;
            let mut csv = String::from("block,row_layer,col_layer,distance\n");
            let blocks = [
                ("cross", &matrices.cross),
                ("within_a", &matrices.within_a),
                ("within_b", &matrices.within_b),
            ];
            for (name, matrix) in blocks {
                for i in 0..matrix.nrows() {
                    for j in 0..matrix.ncols() {
                        csv.push_str(&format!("{name},{i},{j},{}\n", matrix[(i, j)]));
                    }
                }
            }
            std::fs::write(&out, csv).map_err(|e| Error::io(&out, e))?;
            println!(
                "wrote {} ({}x{} cross block, metric {metric})",
                out.display(),
                matrices.cross.nrows(),
                matrices.cross.ncols()
            );
            Ok(())
        }
        Command::Pcdelete {
            k,
            rep,
            input,
            output,
        } => {
            let (_, orientation) = rep.parse()?;
            let matrix = read_matrix(&input, orientation)?;
            let deleted = delete_components(&matrix, k)?;
            write_matrix(&output, &deleted)?;
            println!(
                "wrote {} ({}x{} after deleting {k} components)",
                output.display(),
                deleted.nrows(),
                deleted.ncols()
            );
            Ok(())
        }
        Command::Threshold {
            metric,
            k_list,
            baseline_suite,
            out,
            rep,
            representation,
        } => {
            let (center, orientation) = rep.parse()?;
            let metric: MetricId = metric.parse()?;
            let baseline_reps: Vec<_> = load_layer_dir(&baseline_suite, orientation, center)?
                .into_iter()
                .map(|r| r.data)
                .collect();
            let baseline = cross_seed_baseline(&baseline_reps, metric)?;
            let target = load_normalized(&representation, orientation, center)?;
            let result = detection_threshold(&target, &k_list, metric, baseline)?;
            match out {
                Some(path) => {
                    let config = serde_json::json!({
                        "metric": metric,
                        "k_list": k_list,
                        "baseline_suite": baseline_suite,
                        "representation": representation,
                        "centering": center,
                    });
                    let report =
                        ReportFile::new(ReportPayload::Detection { metric, result }, config);
                    write_report(&path, &report)?;
                    println!("wrote {}", path.display());
                }
                None => {
                    println!("baseline {baseline:.6}");
                    for (k, d) in &result.curve {
                        println!("k {k} distance {d:.6}");
                    }
                    match result.threshold_k {
                        Some(k) => println!(
                            "threshold k {k} (fraction {:.4})",
                            result.threshold_fraction.unwrap_or(f64::NAN)
                        ),
                        None => println!("threshold not reached"),
                    }
                }
            }
            Ok(())
        }
        Command::Bench {
            suite,
            out,
            pairs_csv,
            timestamp,
        } => {
            let (file, loaded) = load_suite(&suite)?;
            let report = run_benchmark(&loaded)?;
            if let Some(path) = pairs_csv {
                write_pair_table(&path, &report)?;
            }
            for (metric, outcome) in &report.correlations {
                match outcome {
                    repsim::bench::CorrelationOutcome::Defined(rc) => {
                        println!("{metric} rho {:.4} tau {:.4}", rc.rho, rc.tau)
                    }
                    repsim::bench::CorrelationOutcome::Degenerate { reason } => {
                        println!("{metric} degenerate: {reason}")
                    }
                }
            }
            let fingerprint = report.suite_fingerprint.clone();
            let mut envelope = ReportFile::new(
                ReportPayload::Benchmark(report),
                serde_json::to_value(&file).expect("suite serializes"),
            )
            .with_fingerprint(fingerprint);
            if timestamp {
                envelope = envelope.with_timestamp(unix_now());
            }
            write_report(&out, &envelope)?;
            println!("wrote {}", out.display());
            Ok(())
        }
        Command::Bootstrap {
            suite,
            resamples,
            seed,
            out,
            timestamp,
        } => {
            let (file, loaded) = load_suite(&suite)?;
            let metrics = loaded.config().metrics.clone();
            let reports = bootstrap_compare(&loaded, &metrics, resamples, seed)?;
            for report in &reports {
                println!(
                    "{} - {} ({}): ci [{:.4}, {:.4}]{}",
                    report.pair.0,
                    report.pair.1,
                    report.statistic,
                    report.ci_low,
                    report.ci_high,
                    if report.significant { " significant" } else { "" }
                );
            }
            let mut envelope = ReportFile::new(
                ReportPayload::Bootstrap {
                    resamples,
                    seed,
                    metrics,
                    reports,
                },
                serde_json::to_value(&file).expect("suite serializes"),
            )
            .with_fingerprint(loaded.fingerprint());
            if timestamp {
                envelope = envelope.with_timestamp(unix_now());
            }
            write_report(&out, &envelope)?;
            println!("wrote {}", out.display());
            Ok(())
        }
        Command::Synth { command } => match command {
            SynthCommand::BuildSuite {
                preset,
                config,
                out,
            } => {
                let preset: SuitePreset = preset.parse()?;
                let base = match preset {
                    SuitePreset::LayerDepth => SynthConfig::preset_layer_depth(),
                    SuitePreset::PcDeletion => SynthConfig::preset_pc_deletion(),
                };
                let config = match config {
                    Some(path) => {
                        let text =
                            std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
                        let mut parsed: SynthConfig = serde_json::from_str(&text)
                            .map_err(|e| Error::InvalidConfig(format!("bad config: {e}")))?;
                        // A config file that omits the deletion grid keeps
                        // the preset's grid when it still fits the widths.
                        if parsed.deletion_grid.is_none()
                            && parsed.hidden_widths == base.hidden_widths
                        {
                            parsed.deletion_grid = base.deletion_grid.clone();
                        }
                        parsed
                    }
                    None => base,
                };
                let built = build_suite(&config, preset, &out)?;
                println!(
                    "wrote {} with {} entries",
                    built.suite_path.display(),
                    built.suite.entries.len()
                );
                Ok(())
            }
        },
    }
}

impl CommonRepArgs {
    fn parse(&self) -> Result<(CenteringAxis, Orientation)> {
        Ok((self.center.parse()?, self.orientation.parse()?))
    }
}

fn load_normalized(
    path: &Path,
    orientation: Orientation,
    center: CenteringAxis,
) -> Result<repsim::Matrix> {
    let matrix = read_matrix(path, orientation)?;
    normalize_matrix(&matrix, &path.display().to_string(), center)
}

/// Load every `.npy` in a directory as one model's layers, sorted by file
/// name, normalized.
fn load_layer_dir(
    dir: &Path,
    orientation: Orientation,
    center: CenteringAxis,
) -> Result<Vec<repsim::NormalizedRepresentation>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "npy"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "no .npy files in {}",
            dir.display()
        )));
    }
    let model_id = dir
        .file_name()
        .map(|n| n.to_string_lossy().to_string())
        .unwrap_or_else(|| "model".to_string());
    paths
        .iter()
        .enumerate()
        .map(|(layer, path)| {
            let matrix = read_matrix(path, orientation)?;
            let raw = RawRepresentation::new(matrix, model_id.clone(), layer as u32)?;
            normalize(&raw, center)
        })
        .collect()
}

fn unix_now() -> String {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs().to_string())
        .unwrap_or_else(|_| "0".to_string())
}
