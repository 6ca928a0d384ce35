//! One module per subcommand. Every command reads the validated
//! [`RunConfig`], writes its artifacts under the output directory, and
//! returns the process exit code.

pub mod boyland;
pub mod deviate;
pub mod leb;
pub mod periodic;
pub mod rotset;
pub mod staircase;

use crate::config::RunConfig;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

/// Exit codes shared by all commands.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;
pub const EXIT_EVAL_FAULT: i32 = 4;

/// Options common to every command invocation.
pub struct Invocation {
    pub config: RunConfig,
    pub out_dir: PathBuf,
    pub refine: bool,
    pub timings: bool,
}

impl Invocation {
    pub fn out(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    /// JSON summary of the configured map, embedded in every artifact.
    pub fn map_json(&self) -> Value {
        serde_json::to_value(&self.config.map_spec).unwrap_or(Value::Null)
    }

    pub fn grid_json(&self) -> Value {
        json!({
            "resolution": self.config.grid.resolution,
            "offset": [self.config.grid.offset.x, self.config.grid.offset.y],
        })
    }

    /// Attach wall-clock timing only when explicitly requested, so default
    /// artifacts are byte-reproducible across runs.
    pub fn maybe_timing(&self, obj: &mut serde_json::Map<String, Value>, seconds: f64) {
        if self.timings {
            obj.insert("timing_seconds".into(), json!(seconds));
        }
    }
}

pub fn ensure_out_dir(path: &Path) -> std::io::Result<()> {
    std::fs::create_dir_all(path)
}

/// Map a core error onto the exit-code contract.
pub fn exit_code_for(err: &rotor_core::Error) -> i32 {
    use rotor_core::Error::*;
    match err {
        EvalFault { .. } | BatchFault { .. } | Internal(_) => EXIT_EVAL_FAULT,
        _ => EXIT_CONFIG,
    }
}
