//! Seismic pipeline: raw `.tdms` inputs are converted to containers by
//! `tdms2h5` (one rank per file), then `decimate` downsamples each
//! container into a new one.
//!
//! Per-file container layout: one group, two channel datasets, four
//! attributes per dataset.

use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{elapsed_ms, LoggedEvent, RunEnv, Worker};
use crate::error::Result;
use crate::exec;
use crate::facade::{Mode, Sandbox};
use crate::model::SubClass;
use crate::tracker::TrackingConfig;

pub const CONVERT: &str = "tdms2h5";
pub const DECIMATE: &str = "decimate";
const CHANNELS: [&str; 2] = ["ch0", "ch1"];
const ATTRIBUTES: [&str; 4] = ["sampling_rate", "units", "gain", "start_time"];
const CHANNEL_BYTES: usize = 2048;
const FACTOR: usize = 4;

/// Input stem for file `i` of `n`.
pub fn stem(i: usize, n: usize) -> String {
    if n == 1 {
        "WestSac".to_owned()
    } else {
        format!("WestSac_{i}")
    }
}

/// Output container for file `i` of `n`.
pub fn output_name(i: usize, n: usize) -> String {
    if n == 1 {
        "decimate.h5".to_owned()
    } else {
        format!("decimate_{i}.h5")
    }
}

pub(super) fn run(
    sb: &Sandbox,
    env: &RunEnv,
    cfg: Option<&TrackingConfig>,
    n: usize,
    seed: u64,
) -> Result<(Vec<LoggedEvent>, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..n {
        let mut raw = vec![0u8; CHANNEL_BYTES * CHANNELS.len()];
        rng.fill_bytes(&mut raw);
        sb.write_untracked(&format!("{}.tdms", stem(i, n)), &raw)?;
    }

    let ranks: Vec<usize> = (0..n).collect();
    let start = Instant::now();
    let mut log = Vec::new();
    let stages: [(&str, Stage); 2] = [(CONVERT, convert), (DECIMATE, decimate)];
    for (program, stage) in stages {
        let results = exec::map(env.exec, &ranks, |&i| -> Result<Vec<LoggedEvent>> {
            let mut w = Worker::start(env, cfg, program, i as u32)?;
            stage(sb, &mut w, i, n)?;
            w.finish()
        });
        for r in results {
            log.extend(r?);
        }
    }
    Ok((log, elapsed_ms(start)))
}

type Stage = fn(&Sandbox, &mut Worker, usize, usize) -> Result<()>;

fn convert(sb: &Sandbox, w: &mut Worker, i: usize, n: usize) -> Result<()> {
    let name = stem(i, n);
    let tdms = format!("{name}.tdms");
    let mut f = sb.open(&w.s, &tdms, false, Mode::Read)?;
    w.note(SubClass::Open, "posix_open", SubClass::File, &tdms);
    let raw = f.read_to_end(&w.s)?;
    w.note(SubClass::Read, "posix_read", SubClass::File, &tdms);
    f.close(&w.s);

    let h5 = format!("{name}.h5");
    let c = sb.create_container(&w.s, &h5)?;
    w.note(SubClass::Create, "H5Fcreate", SubClass::File, &h5);
    let group = format!("/{name}");
    c.create(&w.s, SubClass::Group, &group, None)?;
    w.note(SubClass::Create, "H5Gcreate", SubClass::Group, &group);
    for (k, ch) in CHANNELS.iter().enumerate() {
        let ds = format!("{group}/{ch}");
        let mut d = c.create(&w.s, SubClass::Dataset, &ds, None)?;
        w.note(SubClass::Create, "H5Dcreate2", SubClass::Dataset, &ds);
        d.write(&w.s, &raw[k * CHANNEL_BYTES..(k + 1) * CHANNEL_BYTES])?;
        w.note(SubClass::Write, "H5Dwrite", SubClass::Dataset, &ds);
        d.close(&w.s);
        for attr in ATTRIBUTES {
            let a = format!("{ds}/{attr}");
            let mut h = c.create(&w.s, SubClass::Attribute, &a, Some(attr.as_bytes()))?;
            w.note(SubClass::Create, "H5Acreate", SubClass::Attribute, &a);
            h.close(&w.s);
        }
    }
    c.flush(&w.s)?;
    w.note(SubClass::Fsync, "H5Fflush", SubClass::File, &h5);
    Ok(())
}

fn decimate(sb: &Sandbox, w: &mut Worker, i: usize, n: usize) -> Result<()> {
    let name = stem(i, n);
    let h5 = format!("{name}.h5");
    // the container library reads the file through POSIX underneath
    let mut f = sb.open(&w.s, &h5, false, Mode::Read)?;
    w.note(SubClass::Open, "posix_open", SubClass::File, &h5);
    f.read_to_end(&w.s)?;
    w.note(SubClass::Read, "posix_read", SubClass::File, &h5);
    f.close(&w.s);

    let input = sb.open_container(&w.s, &h5)?;
    w.note(SubClass::Open, "H5Fopen", SubClass::File, &h5);
    let out_name = output_name(i, n);
    let out = sb.create_container(&w.s, &out_name)?;
    w.note(SubClass::Create, "H5Fcreate", SubClass::File, &out_name);
    let group = format!("/{DECIMATE}_{name}");
    out.create(&w.s, SubClass::Group, &group, None)?;
    w.note(SubClass::Create, "H5Gcreate", SubClass::Group, &group);
    for ch in CHANNELS {
        let src = format!("/{name}/{ch}");
        let mut d = input.open(&w.s, SubClass::Dataset, &src)?;
        w.note(SubClass::Open, "H5Dopen2", SubClass::Dataset, &src);
        let samples = d.read(&w.s)?;
        w.note(SubClass::Read, "H5Dread", SubClass::Dataset, &src);
        d.close(&w.s);
        let reduced: Vec<u8> = samples.iter().step_by(FACTOR).copied().collect();
        let dst = format!("{group}/{ch}");
        let mut o = out.create(&w.s, SubClass::Dataset, &dst, None)?;
        w.note(SubClass::Create, "H5Dcreate2", SubClass::Dataset, &dst);
        o.write(&w.s, &reduced)?;
        w.note(SubClass::Write, "H5Dwrite", SubClass::Dataset, &dst);
        o.close(&w.s);
    }
    out.flush(&w.s)?;
    w.note(SubClass::Fsync, "H5Fflush", SubClass::File, &out_name);
    Ok(())
}
