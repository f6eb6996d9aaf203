mod commands;
mod manifest;
mod output;
mod phase_spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

pub const IFS_SCHEMA: &str = r#"IFS config (TOML); numbers are decimal or fraction strings, read exactly:
  support = ["0", "1"]                       # interval J with f_i(J) inside J
  weights = ["1/2", "1/2"]                   # positive, summing to 1
  maps = [
    { ratio = "1/3", translation = "0" },    # f(x) = ratio * x + translation
    { ratio = "1/3", translation = "2/3" },  # 0 < |ratio| < 1
  ]"#;

#[derive(Debug, Parser, Serialize)]
#[command(name = "fflab", version, about = "Numerical experiments on self-similar measures")]
struct Cli {
    /// Directory for CSV/JSON outputs and the manifest.
    #[arg(long, global = true, default_value = "fflab-out")]
    out: PathBuf,
    /// Worker threads; overrides FFLAB_WORKERS.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Serialize)]
struct IfsArg {
    /// IFS config file.
    #[arg(long)]
    ifs: PathBuf,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Check an IFS config; report the attractor hull and a Frostman exponent estimate.
    Validate {
        #[command(flatten)]
        ifs: IfsArg,
        /// Finest ball radius used by the Frostman fit.
        #[arg(long, default_value_t = 1.0 / 4096.0)]
        finest_scale: f64,
    },
    /// Fourier transform at one frequency or over a log-spaced sweep.
    Fourier {
        #[command(flatten)]
        ifs: IfsArg,
        #[arg(long, conflicts_with_all = ["lambda_min", "lambda_max"])]
        lambda: Option<f64>,
        #[arg(long, requires = "lambda_max")]
        lambda_min: Option<f64>,
        #[arg(long, requires = "lambda_min")]
        lambda_max: Option<f64>,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Oscillatory integral and its linearized bound at one frequency.
    Oscillatory {
        #[command(flatten)]
        ifs: IfsArg,
        /// Phase: poly:c0,c1,... | sin:w | cos:w.
        #[arg(long)]
        phase: String,
        #[arg(long)]
        lambda: f64,
        /// Quadrature cut-set scale; derived from --tol when absent.
        #[arg(long)]
        scale: Option<f64>,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        /// Scale of the linearized bound; lambda^-gamma when absent.
        #[arg(long)]
        bound_scale: Option<f64>,
        #[arg(long, default_value_t = 0.1)]
        census_c: f64,
        #[arg(long, default_value_t = 0.05)]
        census_epsilon: f64,
    },
    /// Dyadic band maxima of the oscillatory integral and a fitted decay exponent.
    Decay {
        #[command(flatten)]
        ifs: IfsArg,
        #[arg(long)]
        phase: String,
        #[arg(long, default_value_t = 64.0)]
        t_min: f64,
        #[arg(long, default_value_t = 4096.0)]
        t_max: f64,
        #[arg(long, default_value_t = 256)]
        samples_per_band: usize,
        #[arg(long, default_value_t = 1e-3)]
        quadrature_tol: f64,
    },
    /// Count unit frequency intervals in [-e^t, e^t] where |mu_hat| >= e^{-ct}.
    Census {
        #[command(flatten)]
        ifs: IfsArg,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        #[arg(long, default_value_t = 1e7)]
        frequency_budget: f64,
    },
    /// Intervals covering where a sparse polynomial is small on [a, b].
    Covering {
        /// Terms as "coeff:exp,coeff:exp,...".
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        /// Exponent in the threshold a^{u1 - N^epsilon}.
        #[arg(long, conflicts_with = "q")]
        epsilon: Option<f64>,
        /// Small-value mode: threshold a^{-(N q)^2}.
        #[arg(long)]
        q: Option<f64>,
        /// Family term bound; defaults to the number of terms.
        #[arg(long)]
        k: Option<usize>,
        /// Family exponent bound; defaults to the smallest N admitting the
        /// degree and coefficients.
        #[arg(long)]
        n: Option<u32>,
    },
    /// Certify or refute max_{j<=k} |h^(j)| >= c0 on [lo, hi].
    Nonflat {
        #[arg(long)]
        phase: String,
        #[arg(long, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, allow_hyphen_values = true)]
        hi: f64,
        #[arg(long, default_value_t = 4)]
        k_max: usize,
        #[arg(long)]
        c0: f64,
    },
    /// k-level correlations and gaps of {xi x^n} for x sampled from the measure.
    Correlations {
        #[command(flatten)]
        ifs: IfsArg,
        #[command(flatten)]
        seq: SequenceArgs,
        /// Correlation orders, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "2")]
        k: Vec<usize>,
        /// Test function: bump | indicator | zero.
        #[arg(long, default_value = "bump")]
        test_function: String,
        /// Support radius of the bump, or half-width of the indicator box.
        #[arg(long, default_value_t = 1.0)]
        support: f64,
        #[arg(long, default_value_t = 5e7)]
        tuple_budget: f64,
        /// Never subsample, whatever the cost.
        #[arg(long)]
        exact: bool,
    },
    /// Gap distribution of {xi x^n} for sampled x, or for an explicit --x.
    Gaps {
        #[arg(long, required_unless_present = "x")]
        ifs: Option<PathBuf>,
        /// Explicit x as a decimal or fraction string.
        #[arg(long)]
        x: Option<String>,
        #[command(flatten)]
        seq: SequenceArgs,
    },
    /// Integral of e^{2 pi i g} for a correlation phase g against the measure.
    PhaseIntegral {
        #[command(flatten)]
        ifs: IfsArg,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        l: Vec<i64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        m: Vec<i64>,
        #[arg(long, value_delimiter = ',')]
        u: Vec<u32>,
        #[arg(long, value_delimiter = ',')]
        v: Vec<u32>,
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
    },
}

#[derive(Debug, Args, Serialize)]
struct SequenceArgs {
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    xi: f64,
    #[arg(long = "N", default_value_t = 2000)]
    n: usize,
    /// Number of seeds; seeds are seed-base, seed-base + 1, ...
    #[arg(long, default_value_t = 20)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    seed_base: u64,
    #[arg(long, default_value_t = 128)]
    guard_bits: u64,
    #[arg(long, default_value_t = 1)]
    precision_multiplier: u64,
}

fn workers(cli: &Cli) -> anyhow::Result<Option<usize>> {
    if let Some(w) = cli.workers {
        return Ok(Some(w));
    }
    match std::env::var("FFLAB_WORKERS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| anyhow::anyhow!("FFLAB_WORKERS = '{v}' is not a positive integer")),
        Err(_) => Ok(None),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            if !usage {
                return ExitCode::SUCCESS;
            }
            eprintln!("\n{IFS_SCHEMA}");
            return ExitCode::from(2);
        }
    };
    let threads = match workers(&cli) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(n) = threads.filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match commands::run(&cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<commands::UsageError>().is_some() {
                eprintln!("\n{IFS_SCHEMA}");
                return ExitCode::from(2);
            }
            if e.chain().any(|c| matches!(c.downcast_ref(), Some(fflab_core::Error::Config(_)))) {
                eprintln!("\n{IFS_SCHEMA}");
            }
            ExitCode::from(1)
        }
    }
}
