use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use monitor_core::corpus::{
    builtin_registry, expand_probes, read_manifest, read_registry, read_triplets, write_manifest,
    ExpandOptions, TripletFormat,
};
use monitor_core::metrics::{
    pearson, probe_cost, read_results, score, write_results, write_score_outputs, AccuracyStats,
    Alphas, ScoreConfig, ScoreRow, SettingAccuracy,
};
use monitor_core::mocklm::{mock_score, read_profile};
use monitor_core::report::{
    aggregate, load_accuracy_dir, load_anchor_probs_dir, load_scores_dir, monitor_by_model,
    read_models_csv, write_report, AggregateOptions, Weighting,
};

#[derive(Parser)]
#[command(
    name = "monitor",
    version,
    about = "Probe corpora and MONITOR reliability scores"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightingArg {
    Mean,
    Triplets,
}

#[derive(Subcommand)]
enum Command {
    /// Expand fact triplets into a probe manifest.
    BuildCorpus {
        #[arg(long)]
        triplets: PathBuf,
        /// Relation template registry (TOML); defaults to the built-in set.
        #[arg(long)]
        templates: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        negatives: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Dataset name recorded in the manifest summary.
        #[arg(long)]
        name: Option<String>,
        /// Emit positively primed variants of every frame.
        #[arg(long)]
        positive_primes_all_frames: bool,
    },
    /// Score backend results against a manifest.
    Score {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        results: PathBuf,
        #[arg(long, default_value = "0.33,0.33,0.33")]
        alphas: Alphas,
        #[arg(long, default_value_t = false, action = clap::ArgAction::Set)]
        pfd_include_base: bool,
        #[arg(long)]
        renormalize_alphas: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Pearson correlation between overall MONITOR and average accuracy.
    Correlate {
        #[arg(long)]
        scores: PathBuf,
        /// Long-format accuracy CSV or a `model_id,avg_acc` table.
        #[arg(long)]
        acc: PathBuf,
    },
    /// Probe counts of a full accuracy study versus MONITOR.
    Cost {
        #[arg(long)]
        frames: usize,
        #[arg(long)]
        negatives: usize,
    },
    /// Run the simulated backend over a manifest.
    MockRun {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Aggregate score and accuracy directories into report tables.
    Report {
        #[arg(long)]
        scores: PathBuf,
        #[arg(long)]
        acc: PathBuf,
        #[arg(long)]
        meta: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = WeightingArg::Mean)]
        weighting: WeightingArg,
        /// Score directory of an alternative prompt setting to compare against.
        #[arg(long)]
        ablation_scores: Option<PathBuf>,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::BuildCorpus {
            triplets,
            templates,
            negatives,
            seed,
            out,
            name,
            positive_primes_all_frames,
        } => {
            let registry = match &templates {
                Some(p) => read_registry(p)?,
                None => builtin_registry(),
            };
            let facts = read_triplets(&triplets, TripletFormat::from_path(&triplets))?;
            let name = name.unwrap_or_else(|| {
                triplets
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "dataset".into())
            });
            let mut opts = ExpandOptions::new(negatives, seed);
            opts.positive_primes_all_frames = positive_primes_all_frames;
            let manifest = expand_probes(&name, &facts, &registry, opts)?;
            write_manifest(&manifest, &out)?;
            println!(
                "{} probes from {} triplets written to {}",
                manifest.probes.len(),
                facts.len(),
                out.display()
            );
        }
        Command::Score {
            manifest,
            results,
            alphas,
            pfd_include_base,
            renormalize_alphas,
            out,
        } => {
            let alphas = if renormalize_alphas {
                alphas.renormalized()?
            } else {
                alphas
            };
            let manifest = read_manifest(&manifest)?;
            let results = read_results(&results)?;
            let config = ScoreConfig {
                alphas,
                pfd_include_base,
            };
            let output = score(&manifest.probes, &results, &config)?;
            write_score_outputs(&output, &out)?;
            for r in &output.relations {
                let row = r.row();
                println!(
                    "{}\t{}\tmonitor={:.3}\tscored={}\texcluded={}",
                    row.model_id,
                    row.relation_id,
                    row.monitor,
                    row.scored_count,
                    row.excluded_count
                );
            }
        }
        Command::Correlate { scores, acc } => {
            let rows: Vec<ScoreRow> = monitor_core::metrics::read_scores_csv(&scores)?;
            let monitors = monitor_by_model(&rows, Weighting::Mean);
            let accs = read_avg_accuracy(&acc)?;
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for (model, m) in &monitors {
                let a = accs
                    .get(model)
                    .with_context(|| format!("no accuracy for model {model}"))?;
                xs.push(*m);
                ys.push(*a);
            }
            if accs.len() != monitors.len() {
                bail!("accuracy file lists models without scores");
            }
            let p = pearson(&xs, &ys)?;
            println!("n={} pearson_r={:.3} p_value={:.3}", p.n, p.r, p.p_value);
        }
        Command::Cost { frames, negatives } => {
            let c = probe_cost(frames, negatives)?;
            println!(
                "accuracy probes: {} (R*M)\nmonitor probes: {} (R+1+M)\nratio: {:.2}",
                c.accuracy_probes, c.monitor_probes, c.ratio
            );
        }
        Command::MockRun {
            manifest,
            profile,
            out,
        } => {
            let manifest = read_manifest(&manifest)?;
            let profile = read_profile(&profile)?;
            let results = mock_score(&manifest.probes, &profile)?;
            write_results(&results, &out)?;
            println!("{} results written to {}", results.len(), out.display());
        }
        Command::Report {
            scores,
            acc,
            meta,
            out,
            weighting,
            ablation_scores,
        } => {
            let weighting = match weighting {
                WeightingArg::Mean => Weighting::Mean,
                WeightingArg::Triplets => Weighting::Triplets,
            };
            let score_rows = load_scores_dir(&scores)?;
            let accuracy = AccuracyStats::by_relation(&load_accuracy_dir(&acc)?)?;
            let options = AggregateOptions {
                models: match &meta {
                    Some(p) => read_models_csv(p)?,
                    None => Vec::new(),
                },
                weighting,
                anchor_probs: load_anchor_probs_dir(&scores)?,
            };
            let mut report = aggregate(&score_rows, &accuracy, &options)?;
            if let Some(dir) = &ablation_scores {
                let other = monitor_by_model(&load_scores_dir(dir)?, weighting);
                let name = dir_name(dir);
                let a = report.add_ablation(&name, &other)?;
                println!(
                    "ablation {}: spearman={:.3} kendall={:.3} pearson={:.3}",
                    a.name,
                    a.consistency.spearman_rho,
                    a.consistency.kendall_tau,
                    a.consistency.pearson_r
                );
            }
            for path in write_report(&report, &out)? {
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn dir_name(dir: &Path) -> String {
    dir.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "ablation".into())
}

/// Average accuracy per model from either a long-format accuracy CSV
/// (mean over relations of each relation's mean setting accuracy) or a
/// two-column `model_id,avg_acc` table.
fn read_avg_accuracy(path: &Path) -> Result<BTreeMap<String, f64>> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    if headers.iter().any(|h| h == "avg_acc") {
        let model = headers
            .iter()
            .position(|h| h == "model_id")
            .context("missing model_id column")?;
        let avg = headers
            .iter()
            .position(|h| h == "avg_acc")
            .expect("checked above");
        let mut out = BTreeMap::new();
        for rec in reader.records() {
            let rec = rec?;
            out.insert(rec[model].to_string(), rec[avg].parse::<f64>()?);
        }
        return Ok(out);
    }
    let rows: Vec<SettingAccuracy> = monitor_core::metrics::read_accuracy_csv(path)?;
    let mut per_model: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for ((model, _), stats) in AccuracyStats::by_relation(&rows)? {
        per_model.entry(model).or_default().push(stats.avg);
    }
    Ok(per_model
        .into_iter()
        .map(|(m, v)| (m, v.iter().sum::<f64>() / v.len() as f64))
        .collect())
}
