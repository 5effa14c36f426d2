use std::collections::BTreeMap;
use std::sync::Arc;

use provio_core::query::{backward_lineage, config_accuracy_map, consistent_checkpoints, io_stats, Quality};
use provio_core::tracker::{Clock, StepClock, TrackingConfig};
use provio_core::turtle::parse_turtle;
use provio_core::workloads::{run_workload, Pattern, RunEnv, WorkloadSpec};
use provio_core::{Execution, Guid, Literal, SubClass};

fn run(spec: &WorkloadSpec, dir: &std::path::Path) -> provio_core::workloads::RunOutcome {
    let cfg = TrackingConfig::all(dir.join("prov"));
    run_workload(spec, &cfg, &RunEnv::new(dir.join("data"))).unwrap()
}

fn id(s: &str) -> Guid {
    Guid::new(s).unwrap()
}

#[test]
fn dassa_outputs_have_depth_two_chains() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&WorkloadSpec::dassa(4), dir.path());
    for i in 0..4 {
        let t = backward_lineage(&out.merged, &id(&format!("decimate_{i}.h5")), 2).unwrap();
        assert_eq!(t.depth(), 2, "output {i}");
        assert!(t.entities_at(1).contains(&id(&format!("WestSac_{i}.h5"))));
        assert!(t.entities_at(2).contains(&id(&format!("WestSac_{i}.tdms"))));
    }
}

#[test]
fn report_matches_merged_file_and_stats() {
    let dir = tempfile::tempdir().unwrap();
    for spec in [
        WorkloadSpec::dassa(2),
        WorkloadSpec::h5bench(Pattern::WriteAppendRead, 3, 2, 0),
        WorkloadSpec::topreco(3, 4),
        WorkloadSpec::megatron(6, vec![128, 256]),
    ] {
        let out = run(&spec, &dir.path().join(spec.name()));
        let text = std::fs::read_to_string(&out.merged_path).unwrap();
        assert_eq!(parse_turtle(&text).unwrap().triple_count(), out.report.triple_count);
        assert_eq!(text.len() as u64, out.report.provenance_bytes);
        let stats: BTreeMap<SubClass, u64> =
            io_stats(&out.merged, false).unwrap().into_iter().map(|(k, v)| (k, v.count)).collect();
        assert_eq!(stats, out.report.event_counts, "{}", spec.name());
    }
}

#[test]
fn fixed_seed_and_clock_reproduce_triples() {
    let dir = tempfile::tempdir().unwrap();
    let spec = WorkloadSpec::h5bench(Pattern::WriteOverwriteRead, 4, 3, 0).with_seed(7);
    let graphs: Vec<_> = (0..2)
        .map(|k| {
            let clock = Arc::new(|_: &provio_core::tracker::AgentContext| Arc::new(StepClock::new(0, vec![3, 5])) as Arc<dyn Clock>);
            let env = RunEnv::new(dir.path().join(format!("d{k}"))).with_clock(clock);
            let cfg = TrackingConfig::all(dir.path().join(format!("p{k}"))).with_durations(true);
            run_workload(&spec, &cfg, &env).unwrap().merged
        })
        .collect();
    assert_eq!(graphs[0], graphs[1]);
}

#[test]
fn sequential_and_parallel_dassa_agree() {
    let dir = tempfile::tempdir().unwrap();
    let spec = WorkloadSpec::dassa(3);
    let a = run_workload(
        &spec,
        &TrackingConfig::all(dir.path().join("pa")),
        &RunEnv::new(dir.path().join("da")).with_exec(Execution::Sequential),
    )
    .unwrap();
    let b = run_workload(
        &spec,
        &TrackingConfig::all(dir.path().join("pb")),
        &RunEnv::new(dir.path().join("db")).with_exec(Execution::Parallel),
    )
    .unwrap();
    assert_eq!(a.merged, b.merged);
}

#[test]
fn megatron_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&WorkloadSpec::megatron(50, vec![128, 256]), dir.path());
    let c = |v| vec![("batch_size".to_owned(), Literal::Int(v))];
    assert_eq!(consistent_checkpoints(&out.merged, &c(256), None).unwrap(), [id("Checkpoint_3")]);
    assert_eq!(
        consistent_checkpoints(&out.merged, &c(128), None).unwrap(),
        [id("Checkpoint_1"), id("Checkpoint_2")]
    );
    let q = Quality::parse("ns1:hasValue<100").unwrap();
    assert_eq!(consistent_checkpoints(&out.merged, &c(128), Some(&q)).unwrap().len(), 2);
}

#[test]
fn topreco_accuracy_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&WorkloadSpec::topreco(3, 2), dir.path());
    // every configuration paired with every epoch's accuracy
    assert_eq!(config_accuracy_map(&out.merged).len(), 6);
}

#[test]
fn size_grows_with_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let mut last = 0;
    for n in [1, 2, 4] {
        let out = run(&WorkloadSpec::dassa(n), &dir.path().join(n.to_string()));
        assert!(out.report.provenance_bytes > last);
        last = out.report.provenance_bytes;
    }
}
