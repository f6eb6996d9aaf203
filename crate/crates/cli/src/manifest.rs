use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use fflab_core::census::{BLOCK_SIZE, DEFAULT_FREQUENCY_BUDGET};
use fflab_core::finescale::{CorrelationConfig, PrecisionPolicy, MAX_ERROR_LOG2};
use fflab_core::ifs::DEFAULT_WORD_BUDGET;
use fflab_core::oscillatory::{BoundConfig, DecayConfig, GRID_SAFETY};

use crate::output::OutputDir;

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Library-wide defaults that shape every result.
fn library_knobs() -> Value {
    json!({
        "word_budget": DEFAULT_WORD_BUDGET,
        "grid_safety_factor": GRID_SAFETY,
        "census_block_size": BLOCK_SIZE,
        "census_frequency_budget": DEFAULT_FREQUENCY_BUDGET,
        "census_negative_frequencies": "mirrored from |mu_hat(-x)| = |mu_hat(x)|",
        "bound_scale_gamma": "(1/(1+alpha) + 1)/2",
        "bound_config_default": BoundConfig::default(),
        "decay_config_default": DecayConfig::default(),
        "precision_policy_default": PrecisionPolicy::default(),
        "max_fractional_error_log2": MAX_ERROR_LOG2,
        "correlation_config_default": CorrelationConfig::default(),
        "gap_s_grid": {"start": 0.0, "stop": 6.0, "step": 0.05},
        "rng": "ChaCha8, 64-bit seed",
    })
}

#[derive(Serialize)]
struct Manifest<'a, C: Serialize> {
    tool: &'static str,
    version: &'static str,
    subcommand: &'a str,
    invocation: &'a C,
    ifs_file: Option<String>,
    ifs_sha256: Option<String>,
    workers: usize,
    resolved: Value,
    library_defaults: Value,
    outputs: Vec<String>,
}

pub fn write<C: Serialize>(
    out: &OutputDir,
    subcommand: &str,
    invocation: &C,
    ifs: Option<&Path>,
    resolved: Value,
    outputs: &[std::path::PathBuf],
) -> Result<()> {
    let manifest = Manifest {
        tool: "fflab",
        version: env!("CARGO_PKG_VERSION"),
        subcommand,
        invocation,
        ifs_file: ifs.map(|p| p.display().to_string()),
        ifs_sha256: ifs.map(sha256_file).transpose()?,
        workers: rayon::current_num_threads(),
        resolved,
        library_defaults: library_knobs(),
        outputs: outputs
            .iter()
            .map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default())
            .collect(),
    };
    out.json("manifest.json", &manifest)?;
    Ok(())
}
