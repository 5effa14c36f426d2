//! Training-loop workloads: a GNN-style run recording per-epoch accuracy
//! against its hyper-parameters, and an LLM-style run recording per-iteration
//! loss plus checkpoints and the batch-size configurations behind them.

use std::time::Instant;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{elapsed_ms, LoggedEvent, RunEnv, Worker};
use crate::error::Result;
use crate::facade::{Mode, Sandbox};
use crate::model::{Literal, Predicate, SubClass};
use crate::tracker::TrackingConfig;

pub const TOPRECO: &str = "topreco";
pub const MEGATRON: &str = "megatron";
const TOPRECO_DATA: &str = "events.bin";
const CORPUS: &str = "corpus.bin";

fn round4(v: f64) -> f64 {
    (v * 1e4).round() / 1e4
}

/// Reads a whole input file through the facade, logging open and read.
fn read_input(sb: &Sandbox, w: &mut Worker, path: &str) -> Result<Vec<u8>> {
    let mut f = sb.open(&w.s, path, false, Mode::Read)?;
    w.note(SubClass::Open, "posix_open", SubClass::File, path);
    let bytes = f.read_to_end(&w.s)?;
    w.note(SubClass::Read, "posix_read", SubClass::File, path);
    f.close(&w.s);
    Ok(bytes)
}

pub(super) fn topreco(
    sb: &Sandbox,
    env: &RunEnv,
    cfg: Option<&TrackingConfig>,
    epochs: usize,
    configs: usize,
    seed: u64,
) -> Result<(Vec<LoggedEvent>, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = vec![0u8; 4096];
    rng.fill_bytes(&mut data);
    sb.write_untracked(TOPRECO_DATA, &data)?;

    let start = Instant::now();
    let mut w = Worker::start(env, cfg, TOPRECO, 0)?;
    let mut hparams = Vec::with_capacity(configs);
    for k in 0..configs {
        let value = Literal::dec(round4(rng.gen_range(0.0..1.0)))?;
        hparams.push(w.s.record_extensible(
            SubClass::Configuration,
            &format!("hparam_{k}"),
            &[(Predicate::Version, Literal::str("v1")), (Predicate::HasValue, value)],
            &[],
        )?);
    }
    let mut accuracy = 0.5;
    for epoch in 0..epochs {
        let batch = read_input(sb, &mut w, TOPRECO_DATA)?;
        let signal = batch.iter().map(|&b| b as f64).sum::<f64>() / (batch.len() as f64 * 255.0);
        accuracy = round4(accuracy + (1.0 - accuracy) * 0.1 * (0.5 + signal * rng.gen_range(0.5..1.0)));
        let metric = w.s.record_extensible(
            SubClass::Metrics,
            &format!("accuracy@epoch{epoch}"),
            &[(Predicate::HasAccuracy, Literal::dec(accuracy)?)],
            &[],
        )?;
        for h in &hparams {
            w.s.link(h, Predicate::Influenced, &metric)?;
        }
    }
    let log = w.finish()?;
    Ok((log, elapsed_ms(start)))
}

/// Batch-size configuration labels: Batch_Size_A, Batch_Size_B, ...
pub fn batch_label(i: usize) -> String {
    format!("Batch_Size_{}", (b'A' + i as u8) as char)
}

/// Which batch-size configuration produced checkpoint `k` (0-based) of `c`:
/// checkpoints are spread over the configurations in training order.
pub fn batch_for_checkpoint(k: usize, c: usize, b: usize) -> usize {
    (k * b / c).min(b - 1)
}

/// Iteration whose loss checkpoint `k` (0-based) of `c` records.
pub fn iteration_for_checkpoint(k: usize, c: usize, iterations: usize) -> usize {
    ((k + 1) * iterations / c).clamp(1, iterations) - 1
}

/// Training loss at `iteration`: a decaying curve with seeded jitter.
pub fn loss_curve(iterations: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1055);
    (0..iterations)
        .map(|i| round4(4.0 / (1.0 + 0.05 * i as f64) + rng.gen_range(-0.02..0.02)))
        .collect()
}

pub(super) fn megatron(
    sb: &Sandbox,
    env: &RunEnv,
    cfg: Option<&TrackingConfig>,
    iterations: usize,
    batch_sizes: &[i64],
    checkpoints: usize,
    seed: u64,
) -> Result<(Vec<LoggedEvent>, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut corpus = vec![0u8; 4096];
    rng.fill_bytes(&mut corpus);
    sb.write_untracked(CORPUS, &corpus)?;
    let losses = loss_curve(iterations, seed);

    let start = Instant::now();
    let mut w = Worker::start(env, cfg, MEGATRON, 0)?;
    for (i, loss) in losses.iter().enumerate() {
        read_input(sb, &mut w, CORPUS)?;
        w.s.record_extensible(
            SubClass::Metrics,
            &format!("loss@iter{i}"),
            &[(Predicate::HasValue, Literal::dec(*loss)?)],
            &[],
        )?;
    }

    let configs = batch_sizes
        .iter()
        .enumerate()
        .map(|(i, b)| {
            w.s.record_extensible(SubClass::Configuration, &batch_label(i), &[(Predicate::HasValue, Literal::Int(*b))], &[])
        })
        .collect::<Result<Vec<_>>>()?;
    for k in 0..checkpoints {
        let name = format!("Checkpoint_{}", k + 1);
        let file = format!("{name}.pt");
        let mut f = sb.open(&w.s, &file, true, Mode::Write)?;
        w.note(SubClass::Create, "posix_open", SubClass::File, &file);
        f.write(&w.s, &corpus[..256])?;
        w.note(SubClass::Write, "posix_write", SubClass::File, &file);
        f.close(&w.s);
        let loss = losses[iteration_for_checkpoint(k, checkpoints, iterations)];
        let ckpt = w
            .s
            .record_extensible(SubClass::Checkpoint, &name, &[(Predicate::HasValue, Literal::dec(loss)?)], &[])?;
        let config = &configs[batch_for_checkpoint(k, checkpoints, configs.len())];
        w.s.link(config, Predicate::Influenced, &ckpt)?;
    }
    let log = w.finish()?;
    Ok((log, elapsed_ms(start)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkpoint_assignment() {
        let owners: Vec<usize> = (0..3).map(|k| batch_for_checkpoint(k, 3, 2)).collect();
        assert_eq!(owners, [0, 0, 1]);
        assert_eq!(batch_for_checkpoint(0, 1, 3), 0);
        assert_eq!(iteration_for_checkpoint(2, 3, 50), 49);
        assert_eq!(iteration_for_checkpoint(0, 3, 1), 0);
        assert_eq!(batch_label(1), "Batch_Size_B");
    }

    #[test]
    fn loss_decreases_overall() {
        let l = loss_curve(50, 1);
        assert!(l[49] < l[0] - 1.0);
        assert_eq!(l, loss_curve(50, 1));
    }
}
