//! `provio`: run tracked workloads, merge sub-graphs, query and render them.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use provio_core::merge::{merge_dir, read_graph};
use provio_core::query::{
    backward_lineage, config_accuracy_map, consistent_checkpoints, evaluate_with, file_modifiers, io_stats,
    literal_from_text, parse_query, Quality,
};
use provio_core::tracker::TrackingConfig;
use provio_core::turtle::serialize_turtle;
use provio_core::viz::{to_dot, RenderSpec};
use provio_core::workloads::{measure_overhead, reports_tsv, run_workload, RunEnv, WorkloadSpec};
use provio_core::{Execution, Guid, ProvGraph};

#[derive(Parser)]
#[command(name = "provio", version, about = "I/O provenance capture and query")]
struct Cli {
    /// Disable data-parallel execution.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Merged {
    /// Merged Turtle graph.
    graph: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run a synthetic workload under tracking.
    Run {
        /// `name[:key=value,...]`, e.g. `h5bench:workers=8,pattern=write+read`.
        #[arg(long)]
        workload: WorkloadSpec,
        /// Tracking config (INI); falls back to $PROVIO_CONFIG, then to tracking everything.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory for sub-graph files and the merged graph.
        #[arg(long)]
        out: PathBuf,
        /// Scratch directory for workload data [default: <out>/data].
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Record per-call durations.
        #[arg(long)]
        durations: bool,
    },
    /// Merge every sub-graph file in a directory.
    Merge {
        dir: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Evaluate a conjunctive query.
    Query {
        #[command(flatten)]
        merged: Merged,
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Backward lineage of a data object.
    Lineage {
        #[command(flatten)]
        merged: Merged,
        #[arg(long)]
        object: String,
        #[arg(long, default_value_t = 1)]
        levels: usize,
    },
    /// I/O operation counts per activity sub-class.
    Stats {
        #[command(flatten)]
        merged: Merged,
        #[arg(long)]
        durations: bool,
    },
    /// Program, thread and user behind each access to a file.
    Modifiers {
        #[command(flatten)]
        merged: Merged,
        #[arg(long)]
        file: String,
    },
    /// Configuration versions and the accuracies they influenced.
    Configs {
        #[command(flatten)]
        merged: Merged,
    },
    /// Checkpoints consistent with configuration values.
    Checkpoints {
        #[command(flatten)]
        merged: Merged,
        /// `name=value`; repeatable.
        #[arg(long = "where", required = true)]
        constraints: Vec<String>,
        /// e.g. `ns1:hasValue<2.5`.
        #[arg(long)]
        quality: Option<String>,
    },
    /// Render the graph as DOT.
    ExportDot {
        #[command(flatten)]
        merged: Merged,
        /// `PATH:N` highlights N levels of backward lineage of PATH.
        #[arg(long)]
        highlight_lineage: Option<String>,
        #[arg(long)]
        collapse: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Compare untracked and tracked wall time.
    Bench {
        #[arg(long)]
        workload: WorkloadSpec,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Scratch directory [default: a temporary directory].
        #[arg(long)]
        work: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::from(1)
        }
    }
}

fn load(m: &Merged) -> Result<ProvGraph> {
    read_graph(&m.graph).with_context(|| format!("reading {}", m.graph.display()))
}

fn tracking_config(path: Option<&Path>) -> Result<TrackingConfig> {
    Ok(match path {
        Some(p) => TrackingConfig::load(p)?,
        None => TrackingConfig::from_env()?.unwrap_or_else(|| TrackingConfig::all(".")),
    })
}

fn label(g: &ProvGraph, guid: &Guid) -> String {
    g.node(guid).map_or_else(|| guid.to_string(), |n| n.label.clone())
}

fn dispatch(cli: Cli) -> Result<String> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::default() };
    match cli.command {
        Command::Run {
            workload,
            config,
            out,
            data,
            seed,
            durations,
        } => {
            let spec = match seed {
                Some(s) => workload.with_seed(s),
                None => workload,
            };
            let mut cfg = tracking_config(config.as_deref())?.with_output(&out);
            if durations {
                cfg = cfg.with_durations(true);
            }
            let env = RunEnv::new(data.unwrap_or_else(|| out.join("data"))).with_exec(exec);
            let outcome = run_workload(&spec, &cfg, &env)?;
            Ok(reports_tsv(&[outcome.report]))
        }
        Command::Merge { dir, output } => {
            let g = merge_dir(&dir, exec)?;
            fs::write(&output, serialize_turtle(&g)).with_context(|| format!("writing {}", output.display()))?;
            Ok(format!("{} nodes, {} triples\n", g.node_count(), g.triple_count()))
        }
        Command::Query { merged, file, json } => {
            let g = load(&merged)?;
            let text = fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            let rows = evaluate_with(&g, &parse_query(&text)?, exec)?;
            Ok(if json {
                format!("{}\n", serde_json::to_string_pretty(&rows.to_json())?)
            } else {
                rows.to_tsv()
            })
        }
        Command::Lineage { merged, object, levels } => {
            let g = load(&merged)?;
            let tree = backward_lineage(&g, &Guid::new(object)?, levels)?;
            let mut out = String::from("level\tentity\tprogram\n");
            for (k, level) in tree.levels.iter().enumerate() {
                for step in level {
                    out.push_str(&format!("{}\t{}\t{}\n", k + 1, step.entity, label(&g, &step.program)));
                }
            }
            Ok(out)
        }
        Command::Stats { merged, durations } => {
            let g = load(&merged)?;
            let mut out = String::from(if durations { "class\tcount\telapsed_us\n" } else { "class\tcount\n" });
            for (class, s) in io_stats(&g, durations)? {
                match s.total_elapsed_us {
                    Some(us) if durations => out.push_str(&format!("{class}\t{}\t{us}\n", s.count)),
                    _ => out.push_str(&format!("{class}\t{}\n", s.count)),
                }
            }
            Ok(out)
        }
        Command::Modifiers { merged, file } => {
            let g = load(&merged)?;
            let mut out = String::from("program\tthread\tuser\n");
            for c in file_modifiers(&g, &Guid::new(file)?)? {
                out.push_str(&format!("{}\t{}\t{}\n", label(&g, &c.program), label(&g, &c.thread), label(&g, &c.user)));
            }
            Ok(out)
        }
        Command::Configs { merged } => {
            let g = load(&merged)?;
            let mut out = String::from("config\tversion\taccuracy\n");
            for row in config_accuracy_map(&g) {
                out.push_str(&format!("{}\t{}\t{}\n", row.config, row.version, row.accuracy));
            }
            Ok(out)
        }
        Command::Checkpoints {
            merged,
            constraints,
            quality,
        } => {
            let g = load(&merged)?;
            let constraints = constraints
                .iter()
                .map(|c| {
                    let (k, v) = c.split_once('=').ok_or_else(|| anyhow!("--where expects name=value, got `{c}`"))?;
                    Ok((k.trim().to_owned(), literal_from_text(v.trim())))
                })
                .collect::<Result<Vec<_>>>()?;
            let quality = quality.as_deref().map(Quality::parse).transpose()?;
            let hits = consistent_checkpoints(&g, &constraints, quality.as_ref())?;
            Ok(hits.iter().map(|c| format!("{c}\n")).collect())
        }
        Command::ExportDot {
            merged,
            highlight_lineage,
            collapse,
            output,
        } => {
            let g = load(&merged)?;
            let spec = match highlight_lineage {
                Some(arg) => {
                    let (path, n) = arg
                        .rsplit_once(':')
                        .and_then(|(p, n)| Some((p, n.parse::<usize>().ok()?)))
                        .ok_or_else(|| anyhow!("--highlight-lineage expects PATH:N, got `{arg}`"))?;
                    RenderSpec::from_lineage(&g, &backward_lineage(&g, &Guid::new(path)?, n)?)
                }
                None => RenderSpec::default(),
            };
            let dot = to_dot(&g, &spec.collapsed(collapse))?;
            fs::write(&output, dot).with_context(|| format!("writing {}", output.display()))?;
            Ok(String::new())
        }
        Command::Bench {
            workload,
            reps,
            config,
            work,
        } => {
            let tmp;
            let work = match work {
                Some(w) => w,
                None => {
                    tmp = tempfile::tempdir()?;
                    tmp.path().to_owned()
                }
            };
            let cfg = tracking_config(config.as_deref())?;
            let env = RunEnv::new(work.join("data")).with_exec(exec);
            let report = measure_overhead(&workload, &cfg, reps, &work, &env)?;
            Ok(format!("{}\n", serde_json::to_string_pretty(&report)?))
        }
    }
}
