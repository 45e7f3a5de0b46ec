//! Run-wide settings shared by every front end.

use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{MemoryBudget, DEFAULT_MEMORY_BUDGET, DEFAULT_SCALE_BITS, MAX_SCALE_BITS, MIN_SCALE_BITS};
use crate::parallel::Workers;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Unknown {
                kind: "output format",
                name: other.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub cache_path: Option<PathBuf>,
    pub memory_budget_bytes: u64,
    pub worker_count: usize,
    pub output_format: OutputFormat,
    pub precision_bits: u32,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            cache_path: None,
            memory_budget_bytes: DEFAULT_MEMORY_BUDGET,
            worker_count: std::thread::available_parallelism().map_or(1, |n| n.get()),
            output_format: OutputFormat::Csv,
            precision_bits: DEFAULT_SCALE_BITS,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.worker_count == 0 {
            return Err(Error::param("worker count must be at least 1"));
        }
        if !(MIN_SCALE_BITS..=MAX_SCALE_BITS).contains(&self.precision_bits) {
            return Err(Error::param(format!(
                "precision bits must lie in [{MIN_SCALE_BITS}, {MAX_SCALE_BITS}], got {}",
                self.precision_bits
            )));
        }
        Ok(())
    }

    pub fn budget(&self) -> MemoryBudget {
        MemoryBudget(self.memory_budget_bytes)
    }

    pub fn workers(&self) -> Result<Workers> {
        self.validate()?;
        Workers::new(self.worker_count)
    }
}
