use serde::{Deserialize, Serialize};
use std::time::Duration;

pub const FORMAT_VERSION: u32 = 1;

/// Everything needed to reproduce an artifact. Thread count and wall-clock
/// timing are deliberately absent: they never change the output, and
/// leaving them out keeps artifacts byte-identical across runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub assumptions: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, parameters: serde_json::Value, seed: Option<u64>, assumptions: Vec<String>) -> Self {
        Self {
            command: command.to_owned(),
            parameters,
            seed,
            version: env!("CARGO_PKG_VERSION").to_owned(),
            assumptions,
        }
    }
}

/// Wall-clock timing, reported on stderr only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Timing {
    pub seconds: f64,
    pub threads: usize,
}

impl Timing {
    pub fn new(elapsed: Duration, threads: usize) -> Self {
        Self { seconds: elapsed.as_secs_f64(), threads }
    }
}
