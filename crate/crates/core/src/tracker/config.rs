use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Duration;

use ini::Ini;

use crate::error::{Error, Result};
use crate::model::{SubClass, SuperClass};

/// Environment variable naming a tracking config file.
pub const CONFIG_ENV: &str = "PROVIO_CONFIG";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlushPolicy {
    AtEnd,
    Periodic(Duration),
}

/// Which sub-classes to record, whether to time I/O calls, and where and
/// when sub-graph files are written.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrackingConfig {
    pub enabled: BTreeSet<SubClass>,
    pub track_duration: bool,
    pub flush_policy: FlushPolicy,
    pub output_dir: PathBuf,
}

impl TrackingConfig {
    /// Everything enabled, no durations, flush at end.
    pub fn all(output_dir: impl Into<PathBuf>) -> TrackingConfig {
        TrackingConfig {
            enabled: SubClass::ALL.into_iter().collect(),
            track_duration: false,
            flush_policy: FlushPolicy::AtEnd,
            output_dir: output_dir.into(),
        }
    }

    pub fn none(output_dir: impl Into<PathBuf>) -> TrackingConfig {
        TrackingConfig {
            enabled: BTreeSet::new(),
            ..TrackingConfig::all(output_dir)
        }
    }

    pub fn only(output_dir: impl Into<PathBuf>, classes: impl IntoIterator<Item = SubClass>) -> TrackingConfig {
        TrackingConfig {
            enabled: classes.into_iter().collect(),
            ..TrackingConfig::all(output_dir)
        }
    }

    pub fn with_durations(mut self, on: bool) -> Self {
        self.track_duration = on;
        self
    }

    pub fn with_flush(mut self, policy: FlushPolicy) -> Self {
        self.flush_policy = policy;
        self
    }

    pub fn with_output(mut self, dir: impl Into<PathBuf>) -> Self {
        self.output_dir = dir.into();
        self
    }

    pub fn disable(mut self, sub: SubClass) -> Self {
        self.enabled.remove(&sub);
        self
    }

    pub fn enable(mut self, sub: SubClass) -> Self {
        self.enabled.insert(sub);
        self
    }

    pub fn is_enabled(&self, sub: SubClass) -> bool {
        self.enabled.contains(&sub)
    }

    pub fn tracks_nothing(&self) -> bool {
        self.enabled.is_empty()
    }

    /// Checks the flush interval and enables the Program agent whenever an
    /// activity class is on (an activity always attaches to its program).
    pub fn normalized(mut self) -> Result<Self> {
        if let FlushPolicy::Periodic(d) = self.flush_policy {
            if d.is_zero() {
                return Err(Error::Config("periodic flush interval must be > 0".into()));
            }
        }
        if self.enabled.iter().any(|s| s.is(SuperClass::Activity)) {
            self.enabled.insert(SubClass::Program);
        }
        Ok(self)
    }

    /// Parses the INI form:
    ///
    /// ```text
    /// [classes]
    /// dataset=true
    /// read=false
    /// [tracking]
    /// durations=true
    /// flush=periodic:500
    /// output=/tmp/prov
    /// ```
    ///
    /// Classes not listed stay enabled.
    pub fn from_ini(text: &str) -> Result<TrackingConfig> {
        let ini = Ini::load_from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut cfg = TrackingConfig::all(".");
        for (section, props) in ini.iter() {
            match section {
                Some("classes") => {
                    for (key, value) in props.iter() {
                        let sub: SubClass = key.parse()?;
                        if parse_bool(key, value)? {
                            cfg.enabled.insert(sub);
                        } else {
                            cfg.enabled.remove(&sub);
                        }
                    }
                }
                Some("tracking") => {
                    for (key, value) in props.iter() {
                        match key {
                            "durations" => cfg.track_duration = parse_bool(key, value)?,
                            "flush" => cfg.flush_policy = parse_flush(value)?,
                            "output" => cfg.output_dir = PathBuf::from(value),
                            other => return Err(Error::Config(format!("unknown tracking key `{other}`"))),
                        }
                    }
                }
                None if props.is_empty() => {}
                other => {
                    return Err(Error::Config(format!(
                        "unknown section `{}`",
                        other.unwrap_or("<general>")
                    )))
                }
            }
        }
        cfg.normalized()
    }

    pub fn load(path: &Path) -> Result<TrackingConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        TrackingConfig::from_ini(&text)
    }

    /// Loads the file named by `PROVIO_CONFIG`, if set.
    pub fn from_env() -> Result<Option<TrackingConfig>> {
        match std::env::var_os(CONFIG_ENV) {
            Some(path) => TrackingConfig::load(Path::new(&path)).map(Some),
            None => Ok(None),
        }
    }

    pub fn to_ini(&self) -> String {
        let mut out = String::from("[classes]\n");
        for sub in SubClass::ALL {
            out.push_str(&format!("{}={}\n", sub.name().to_lowercase(), self.is_enabled(sub)));
        }
        out.push_str("[tracking]\n");
        out.push_str(&format!("durations={}\n", self.track_duration));
        match self.flush_policy {
            FlushPolicy::AtEnd => out.push_str("flush=atend\n"),
            FlushPolicy::Periodic(d) => out.push_str(&format!("flush=periodic:{}\n", d.as_millis())),
        }
        out.push_str(&format!("output={}\n", self.output_dir.display()));
        out
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        v => Err(Error::Config(format!("`{key}` expects true|false, got `{v}`"))),
    }
}

fn parse_flush(value: &str) -> Result<FlushPolicy> {
    let value = value.trim();
    if value == "atend" {
        return Ok(FlushPolicy::AtEnd);
    }
    let ms = value
        .strip_prefix("periodic:")
        .and_then(|ms| ms.parse::<u64>().ok())
        .ok_or_else(|| Error::Config(format!("bad flush policy `{value}`")))?;
    if ms == 0 {
        return Err(Error::Config("periodic flush interval must be > 0".into()));
    }
    Ok(FlushPolicy::Periodic(Duration::from_millis(ms)))
}
