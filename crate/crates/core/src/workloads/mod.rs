//! Synthetic workflows shaped like the four evaluation use cases, plus a
//! harness measuring tracking overhead and provenance size.
//!
//! Every workload drives the instrumented facade and keeps its own
//! driver-side log of the calls it made ([`LoggedEvent`]); tests compare
//! that log with what the tracker recorded.

mod dassa;
mod h5bench;
mod ml;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::facade::Sandbox;
use crate::graph::ProvGraph;
use crate::merge::{is_subgraph_file, merge_dir};
use crate::model::SubClass;
use crate::tracker::{AgentContext, Clock, Session, SystemClock, TrackingConfig};
use crate::turtle::serialize_turtle;

pub use h5bench::Pattern;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WorkloadKind {
    Dassa {
        input_files: usize,
    },
    H5bench {
        pattern: Pattern,
        workers: usize,
        ops_per_worker: usize,
        compute_ms: u64,
    },
    Topreco {
        epochs: usize,
        config_fields: usize,
    },
    Megatron {
        iterations: usize,
        batch_sizes: Vec<i64>,
        checkpoints: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WorkloadSpec {
    #[serde(flatten)]
    pub kind: WorkloadKind,
    pub seed: u64,
}

pub const DEFAULT_SEED: u64 = 0x5eed;

impl WorkloadSpec {
    pub fn dassa(input_files: usize) -> WorkloadSpec {
        WorkloadSpec::new(WorkloadKind::Dassa { input_files })
    }

    pub fn h5bench(pattern: Pattern, workers: usize, ops_per_worker: usize, compute_ms: u64) -> WorkloadSpec {
        WorkloadSpec::new(WorkloadKind::H5bench {
            pattern,
            workers,
            ops_per_worker,
            compute_ms,
        })
    }

    pub fn topreco(epochs: usize, config_fields: usize) -> WorkloadSpec {
        WorkloadSpec::new(WorkloadKind::Topreco { epochs, config_fields })
    }

    pub fn megatron(iterations: usize, batch_sizes: Vec<i64>) -> WorkloadSpec {
        WorkloadSpec::new(WorkloadKind::Megatron {
            iterations,
            batch_sizes,
            checkpoints: 3,
        })
    }

    fn new(kind: WorkloadKind) -> WorkloadSpec {
        WorkloadSpec {
            kind,
            seed: DEFAULT_SEED,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            WorkloadKind::Dassa { .. } => "dassa",
            WorkloadKind::H5bench { .. } => "h5bench",
            WorkloadKind::Topreco { .. } => "topreco",
            WorkloadKind::Megatron { .. } => "megatron",
        }
    }

    /// Builds a spec from a workload name and `key=value` overrides of the
    /// defaults (dassa: files; h5bench: pattern, workers, ops, compute_ms;
    /// topreco: epochs, configs; megatron: iterations, batch_sizes, checkpoints;
    /// all: seed).
    pub fn from_params(kind: &str, params: &[(String, String)]) -> Result<WorkloadSpec> {
        let mut spec = match kind {
            "dassa" => WorkloadSpec::dassa(1),
            "h5bench" => WorkloadSpec::h5bench(Pattern::WriteRead, 4, 4, 0),
            "topreco" => WorkloadSpec::topreco(8, 20),
            "megatron" => WorkloadSpec::megatron(50, vec![128, 256]),
            other => return Err(Error::InvalidWorkload(format!("unknown workload `{other}`"))),
        };
        let bad = |k: &str, v: &str| Error::InvalidWorkload(format!("bad value `{v}` for `{k}`"));
        for (k, v) in params {
            let int = || v.parse::<usize>().map_err(|_| bad(k, v));
            match (&mut spec.kind, k.as_str()) {
                (_, "seed") => spec.seed = v.parse().map_err(|_| bad(k, v))?,
                (WorkloadKind::Dassa { input_files }, "files") => *input_files = int()?,
                (WorkloadKind::H5bench { pattern, .. }, "pattern") => *pattern = v.parse()?,
                (WorkloadKind::H5bench { workers, .. }, "workers") => *workers = int()?,
                (WorkloadKind::H5bench { ops_per_worker, .. }, "ops") => *ops_per_worker = int()?,
                (WorkloadKind::H5bench { compute_ms, .. }, "compute_ms") => *compute_ms = int()? as u64,
                (WorkloadKind::Topreco { epochs, .. }, "epochs") => *epochs = int()?,
                (WorkloadKind::Topreco { config_fields, .. }, "configs") => *config_fields = int()?,
                (WorkloadKind::Megatron { iterations, .. }, "iterations") => *iterations = int()?,
                (WorkloadKind::Megatron { checkpoints, .. }, "checkpoints") => *checkpoints = int()?,
                (WorkloadKind::Megatron { batch_sizes, .. }, "batch_sizes") => {
                    *batch_sizes = v
                        .split(',')
                        .map(|s| s.trim().parse::<i64>().map_err(|_| bad(k, v)))
                        .collect::<Result<_>>()?
                }
                _ => {
                    return Err(Error::InvalidWorkload(format!(
                        "`{k}` is not a parameter of {}",
                        spec.name()
                    )))
                }
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: usize| {
            if v == 0 {
                Err(Error::InvalidWorkload(format!("{name} must be at least 1")))
            } else {
                Ok(())
            }
        };
        match &self.kind {
            WorkloadKind::Dassa { input_files } => positive("input_files", *input_files),
            WorkloadKind::H5bench {
                workers, ops_per_worker, ..
            } => {
                positive("workers", *workers)?;
                positive("ops_per_worker", *ops_per_worker)
            }
            WorkloadKind::Topreco { epochs, config_fields } => {
                positive("epochs", *epochs)?;
                positive("config_fields", *config_fields)
            }
            WorkloadKind::Megatron {
                iterations,
                batch_sizes,
                checkpoints,
            } => {
                positive("iterations", *iterations)?;
                positive("batch_sizes", batch_sizes.len())?;
                positive("checkpoints", *checkpoints)?;
                if batch_sizes.iter().any(|b| *b < 1) {
                    return Err(Error::InvalidWorkload("batch sizes must be positive".into()));
                }
                if batch_sizes.len() > 26 {
                    return Err(Error::InvalidWorkload("at most 26 batch sizes".into()));
                }
                Ok(())
            }
        }
    }

    /// Short `key=value` rendering of the parameters.
    pub fn params(&self) -> String {
        let p = match &self.kind {
            WorkloadKind::Dassa { input_files } => format!("files={input_files}"),
            WorkloadKind::H5bench {
                pattern,
                workers,
                ops_per_worker,
                compute_ms,
            } => format!("pattern={pattern},workers={workers},ops={ops_per_worker},compute_ms={compute_ms}"),
            WorkloadKind::Topreco { epochs, config_fields } => format!("epochs={epochs},configs={config_fields}"),
            WorkloadKind::Megatron {
                iterations,
                batch_sizes,
                checkpoints,
            } => {
                let b: Vec<String> = batch_sizes.iter().map(i64::to_string).collect();
                format!("iterations={iterations},batch_sizes={},checkpoints={checkpoints}", b.join(","))
            }
        };
        format!("{p},seed={}", self.seed)
    }
}

/// One facade call as the driver saw it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LoggedEvent {
    pub program: String,
    pub rank: u32,
    pub api_class: SubClass,
    pub api_name: &'static str,
    pub target_kind: SubClass,
    pub path: String,
}

impl LoggedEvent {
    /// True when `cfg` would record this call.
    pub fn tracked_by(&self, cfg: &TrackingConfig) -> bool {
        cfg.is_enabled(self.api_class) && cfg.is_enabled(self.target_kind)
    }
}

pub type ClockFactory = Arc<dyn Fn(&AgentContext) -> Arc<dyn Clock> + Send + Sync>;

/// Where and how a workload runs.
#[derive(Clone)]
pub struct RunEnv {
    /// Input and output data files live here.
    pub data_dir: PathBuf,
    pub user: String,
    pub exec: Execution,
    /// Per-session clock; the system clock when unset.
    pub clock: Option<ClockFactory>,
}

impl fmt::Debug for RunEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RunEnv")
            .field("data_dir", &self.data_dir)
            .field("user", &self.user)
            .field("exec", &self.exec)
            .field("clock", &self.clock.as_ref().map(|_| "custom"))
            .finish()
    }
}

impl RunEnv {
    pub fn new(data_dir: impl Into<PathBuf>) -> RunEnv {
        RunEnv {
            data_dir: data_dir.into(),
            user: "provio".into(),
            exec: Execution::default(),
            clock: None,
        }
    }

    pub fn with_user(mut self, user: impl Into<String>) -> Self {
        self.user = user.into();
        self
    }

    pub fn with_exec(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn with_clock(mut self, factory: ClockFactory) -> Self {
        self.clock = Some(factory);
        self
    }
}

/// A session plus the driver's own record of the calls made through it.
pub(crate) struct Worker {
    pub s: Session,
    pub log: Vec<LoggedEvent>,
}

impl Worker {
    pub fn start(env: &RunEnv, cfg: Option<&TrackingConfig>, program: &str, rank: u32) -> Result<Worker> {
        let ctx = AgentContext::new(env.user.clone(), program, rank);
        let s = match cfg {
            None => Session::untracked(ctx),
            Some(cfg) => {
                let clock: Arc<dyn Clock> = match &env.clock {
                    Some(f) => f(&ctx),
                    None => Arc::new(SystemClock::default()),
                };
                Session::begin_with_clock(ctx, cfg.clone(), clock)?
            }
        };
        Ok(Worker { s, log: Vec::new() })
    }

    pub fn note(&mut self, api_class: SubClass, api_name: &'static str, target_kind: SubClass, path: &str) {
        let ctx = self.s.context();
        self.log.push(LoggedEvent {
            program: ctx.program.clone(),
            rank: ctx.rank,
            api_class,
            api_name,
            target_kind,
            path: path.to_owned(),
        });
    }

    pub fn finish(self) -> Result<Vec<LoggedEvent>> {
        self.s.end()?;
        Ok(self.log)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub workload: &'static str,
    pub params: String,
    pub baseline_ms: Option<f64>,
    pub tracked_ms: f64,
    pub triple_count: usize,
    pub provenance_bytes: u64,
    /// Recorded events per activity sub-class, from the driver's log.
    pub event_counts: BTreeMap<SubClass, u64>,
}

/// Everything a run produced.
#[derive(Debug)]
pub struct RunOutcome {
    pub report: RunReport,
    pub events: Vec<LoggedEvent>,
    pub merged: ProvGraph,
    pub merged_path: PathBuf,
}

pub const MERGED_FILE: &str = "merged.ttl";

fn clear_subgraphs(dir: &Path) -> Result<()> {
    if dir.is_dir() {
        for entry in fs::read_dir(dir)? {
            let path = entry?.path();
            if is_subgraph_file(&path) {
                fs::remove_file(path)?;
            }
        }
    }
    Ok(())
}

/// Runs the workload with a fresh sandbox; `cfg = None` is the untracked
/// baseline. Returns the driver log and the measured wall time.
fn execute(spec: &WorkloadSpec, env: &RunEnv, cfg: Option<&TrackingConfig>) -> Result<(Vec<LoggedEvent>, f64)> {
    spec.validate()?;
    if env.data_dir.exists() {
        fs::remove_dir_all(&env.data_dir)?;
    }
    let sb = Sandbox::new(&env.data_dir)?;
    match &spec.kind {
        WorkloadKind::Dassa { input_files } => dassa::run(&sb, env, cfg, *input_files, spec.seed),
        WorkloadKind::H5bench {
            pattern,
            workers,
            ops_per_worker,
            compute_ms,
        } => h5bench::run(&sb, env, cfg, *pattern, *workers, *ops_per_worker, *compute_ms, spec.seed),
        WorkloadKind::Topreco { epochs, config_fields } => ml::topreco(&sb, env, cfg, *epochs, *config_fields, spec.seed),
        WorkloadKind::Megatron {
            iterations,
            batch_sizes,
            checkpoints,
        } => ml::megatron(&sb, env, cfg, *iterations, batch_sizes, *checkpoints, spec.seed),
    }
}

fn count_events<'a>(events: impl Iterator<Item = &'a LoggedEvent>) -> BTreeMap<SubClass, u64> {
    let mut out = BTreeMap::new();
    for e in events {
        *out.entry(e.api_class).or_default() += 1;
    }
    out
}

/// Runs `spec` under `cfg`, merges the sub-graph files in
/// `cfg.output_dir` (stale sub-graph files there are removed first) and
/// writes the merged graph next to them.
pub fn run_workload(spec: &WorkloadSpec, cfg: &TrackingConfig, env: &RunEnv) -> Result<RunOutcome> {
    clear_subgraphs(&cfg.output_dir)?;
    let (events, tracked_ms) = execute(spec, env, Some(cfg))?;
    let merged = merge_dir(&cfg.output_dir, env.exec)?;
    let text = serialize_turtle(&merged);
    let merged_path = cfg.output_dir.join(MERGED_FILE);
    fs::write(&merged_path, &text)?;
    let report = RunReport {
        workload: spec.name(),
        params: spec.params(),
        baseline_ms: None,
        tracked_ms,
        triple_count: merged.triple_count(),
        provenance_bytes: text.len() as u64,
        event_counts: count_events(events.iter().filter(|e| e.tracked_by(cfg))),
    };
    Ok(RunOutcome {
        report,
        events,
        merged,
        merged_path,
    })
}

/// Runs `spec` with no tracking at all.
pub fn run_baseline(spec: &WorkloadSpec, env: &RunEnv) -> Result<(Vec<LoggedEvent>, f64)> {
    execute(spec, env, None)
}

#[derive(Clone, Debug, Serialize)]
pub struct OverheadReport {
    pub workload: &'static str,
    pub params: String,
    pub baseline_ms: Vec<f64>,
    pub tracked_ms: Vec<f64>,
    /// Mean of per-repetition tracked/baseline ratios.
    pub mean_ratio: f64,
    pub provenance_bytes: u64,
}

/// Interleaves untracked and tracked runs `repetitions` times. Each run uses
/// fresh directories under `work_dir`.
pub fn measure_overhead(
    spec: &WorkloadSpec,
    cfg: &TrackingConfig,
    repetitions: usize,
    work_dir: &Path,
    env: &RunEnv,
) -> Result<OverheadReport> {
    if repetitions < 3 {
        return Err(Error::InvalidWorkload("overhead needs at least 3 repetitions".into()));
    }
    let mut baseline_ms = Vec::new();
    let mut tracked_ms = Vec::new();
    let mut provenance_bytes = 0;
    for rep in 0..repetitions {
        let base_env = RunEnv {
            data_dir: work_dir.join(format!("rep{rep}/baseline-data")),
            ..env.clone()
        };
        baseline_ms.push(run_baseline(spec, &base_env)?.1);
        let run_env = RunEnv {
            data_dir: work_dir.join(format!("rep{rep}/tracked-data")),
            ..env.clone()
        };
        let cfg = cfg.clone().with_output(work_dir.join(format!("rep{rep}/prov")));
        let out = run_workload(spec, &cfg, &run_env)?;
        tracked_ms.push(out.report.tracked_ms);
        provenance_bytes = out.report.provenance_bytes;
    }
    let ratios: Vec<f64> = tracked_ms.iter().zip(&baseline_ms).map(|(t, b)| t / b.max(1e-9)).collect();
    Ok(OverheadReport {
        workload: spec.name(),
        params: spec.params(),
        mean_ratio: ratios.iter().sum::<f64>() / ratios.len() as f64,
        baseline_ms,
        tracked_ms,
        provenance_bytes,
    })
}

/// Plot-ready table, one row per report.
pub fn reports_tsv(rows: &[RunReport]) -> String {
    let mut out = String::from("workload\tparams\tbaseline_ms\ttracked_ms\ttriple_count\tprovenance_bytes\tevents\n");
    for r in rows {
        let events: Vec<String> = r.event_counts.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push_str(&format!(
            "{}\t{}\t{}\t{:.3}\t{}\t{}\t{}\n",
            r.workload,
            r.params,
            r.baseline_ms.map_or_else(|| "-".to_owned(), |b| format!("{b:.3}")),
            r.tracked_ms,
            r.triple_count,
            r.provenance_bytes,
            events.join(",")
        ));
    }
    out
}

pub(crate) fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

impl FromStr for WorkloadSpec {
    type Err = Error;

    /// `name[:key=value,...]`, e.g. `h5bench:workers=8,pattern=write+read`.
    /// Megatron batch sizes are separated with `/` here.
    fn from_str(s: &str) -> Result<WorkloadSpec> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let params = rest
            .split(',')
            .filter(|p| !p.is_empty())
            .map(|p| {
                p.split_once('=')
                    .map(|(k, v)| (k.trim().to_owned(), v.trim().replace('/', ",")))
                    .ok_or_else(|| Error::InvalidWorkload(format!("`{p}` is not key=value")))
            })
            .collect::<Result<Vec<_>>>()?;
        WorkloadSpec::from_params(kind.trim(), &params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_parsing_and_validation() {
        let s: WorkloadSpec = "h5bench:workers=8,pattern=write+append+read,compute_ms=5".parse().unwrap();
        assert_eq!(
            s.kind,
            WorkloadKind::H5bench {
                pattern: Pattern::WriteAppendRead,
                workers: 8,
                ops_per_worker: 4,
                compute_ms: 5
            }
        );
        let m: WorkloadSpec = "megatron:batch_sizes=128/256,iterations=10".parse().unwrap();
        assert!(m.params().starts_with("iterations=10,batch_sizes=128,256"));
        assert!("dassa:files=0".parse::<WorkloadSpec>().is_err());
        assert!("topreco:files=2".parse::<WorkloadSpec>().is_err());
        assert!("bogus".parse::<WorkloadSpec>().is_err());
        assert!("megatron:batch_sizes=".parse::<WorkloadSpec>().is_err());
    }

    #[test]
    fn overhead_needs_three_reps() {
        let dir = tempfile::tempdir().unwrap();
        let spec = WorkloadSpec::topreco(1, 1);
        let cfg = TrackingConfig::all(dir.path());
        assert!(measure_overhead(&spec, &cfg, 2, dir.path(), &RunEnv::new(dir.path().join("d"))).is_err());
    }
}
