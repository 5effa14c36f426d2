//! Parallel I/O kernel: W workers share one container, each repeatedly
//! writing its own dataset and reading it back, with a compute sleep per
//! step.

use std::fmt;
use std::str::FromStr;
use std::thread;
use std::time::{Duration, Instant};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{elapsed_ms, LoggedEvent, RunEnv, Worker};
use crate::error::{Error, Result};
use crate::facade::{Container, Sandbox};
use crate::model::SubClass;
use crate::tracker::TrackingConfig;

pub const PROGRAM: &str = "h5bench";
pub const CONTAINER: &str = "h5bench.h5";
const GROUP: &str = "/h5bench";
const PAYLOAD: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Pattern {
    #[serde(rename = "write+read")]
    WriteRead,
    #[serde(rename = "write+overwrite+read")]
    WriteOverwriteRead,
    #[serde(rename = "write+append+read")]
    WriteAppendRead,
}

impl Pattern {
    pub const ALL: [Pattern; 3] = [Pattern::WriteRead, Pattern::WriteOverwriteRead, Pattern::WriteAppendRead];

    pub fn name(self) -> &'static str {
        match self {
            Pattern::WriteRead => "write+read",
            Pattern::WriteOverwriteRead => "write+overwrite+read",
            Pattern::WriteAppendRead => "write+append+read",
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Pattern> {
        let norm = s.trim().to_ascii_lowercase().replace(['-', '_', ' '], "+");
        Pattern::ALL
            .into_iter()
            .find(|p| p.name() == norm)
            .ok_or_else(|| Error::InvalidWorkload(format!("unknown pattern `{s}`")))
    }
}

pub fn dataset_path(rank: usize) -> String {
    format!("{GROUP}/rank_{rank}")
}

#[allow(clippy::too_many_arguments)]
pub(super) fn run(
    sb: &Sandbox,
    env: &RunEnv,
    cfg: Option<&TrackingConfig>,
    pattern: Pattern,
    workers: usize,
    ops: usize,
    compute_ms: u64,
    seed: u64,
) -> Result<(Vec<LoggedEvent>, f64)> {
    let start = Instant::now();
    let mut sessions = (0..workers)
        .map(|r| Worker::start(env, cfg, PROGRAM, r as u32))
        .collect::<Result<Vec<_>>>()?;

    let w0 = &mut sessions[0];
    let c = sb.create_container(&w0.s, CONTAINER)?;
    w0.note(SubClass::Create, "H5Fcreate", SubClass::File, CONTAINER);
    c.create(&w0.s, SubClass::Group, GROUP, None)?;
    w0.note(SubClass::Create, "H5Gcreate", SubClass::Group, GROUP);

    let results: Vec<Result<()>> = thread::scope(|scope| {
        let handles: Vec<_> = sessions
            .iter_mut()
            .enumerate()
            .map(|(rank, w)| {
                let c = c.clone();
                scope.spawn(move || worker(&c, w, rank, pattern, ops, compute_ms, seed))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    results.into_iter().collect::<Result<()>>()?;

    let w0 = &mut sessions[0];
    c.flush(&w0.s)?;
    w0.note(SubClass::Fsync, "H5Fflush", SubClass::File, CONTAINER);
    let mut log = Vec::new();
    for w in sessions {
        log.extend(w.finish()?);
    }
    Ok((log, elapsed_ms(start)))
}

fn worker(
    c: &Container,
    w: &mut Worker,
    rank: usize,
    pattern: Pattern,
    ops: usize,
    compute_ms: u64,
    seed: u64,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (rank as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let mut payload = vec![0u8; PAYLOAD];
    let path = dataset_path(rank);
    let mut d = c.create(&w.s, SubClass::Dataset, &path, None)?;
    w.note(SubClass::Create, "H5Dcreate2", SubClass::Dataset, &path);
    for _ in 0..ops {
        rng.fill_bytes(&mut payload);
        d.write(&w.s, &payload)?;
        w.note(SubClass::Write, "H5Dwrite", SubClass::Dataset, &path);
        let mut expected = payload.clone();
        match pattern {
            Pattern::WriteRead => {}
            Pattern::WriteOverwriteRead => {
                rng.fill_bytes(&mut payload);
                d.write(&w.s, &payload)?;
                w.note(SubClass::Write, "H5Dwrite", SubClass::Dataset, &path);
                expected.clone_from(&payload);
            }
            Pattern::WriteAppendRead => {
                rng.fill_bytes(&mut payload);
                d.append(&w.s, &payload)?;
                w.note(SubClass::Write, "H5Dwrite", SubClass::Dataset, &path);
                expected.extend_from_slice(&payload);
            }
        }
        let back = d.read(&w.s)?;
        w.note(SubClass::Read, "H5Dread", SubClass::Dataset, &path);
        if back != expected {
            return Err(Error::CorruptContainer {
                path: c.host_path().to_owned(),
                message: format!("{path} read back different bytes"),
            });
        }
        if compute_ms > 0 {
            thread::sleep(Duration::from_millis(compute_ms));
        }
    }
    d.close(&w.s);
    Ok(())
}
