use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use alias_scope::cli::{self, AnalysisConfig, DEFAULT_TARGET_COUNT};
use alias_scope::significance::{DEFAULT_ALPHA, DEFAULT_CONFIDENCE};
use alias_scope::{RegimeChoice, Spacing};

#[derive(Parser)]
#[command(name = "alias-scope", version, about = "Echo-effect diagnosis for periodogram peaks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample autocorrelation with two-standard-error band.
    Acf(Common),
    /// FFT and Blackman-Tukey periodograms plus significance levels.
    Spectrum(Common),
    /// Significance gate and echo diagnosis for selected bins.
    Diagnose(Common),
    /// Threshold scan of local maxima and their spacings.
    Maxima(Common),
    /// Generate a synthetic series from a JSON description.
    Synth {
        /// JSON signal description.
        spec: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        /// Output file, or directory (writes synth.csv).
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "day")]
    spacing: Spacing,
    /// Running-mean window for detrending; omitted means no detrending.
    #[arg(long)]
    window: Option<usize>,
    /// Detrend with the spacing's default window.
    #[arg(long, conflicts_with = "window")]
    detrend: bool,
    #[arg(long)]
    pad_before: Option<PathBuf>,
    #[arg(long)]
    pad_after: Option<PathBuf>,
    /// Lag cutoff; several values select one by conformity.
    #[arg(long = "M", value_delimiter = ',')]
    max_lag: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    period: Vec<f64>,
    #[arg(long = "exclude-c", value_delimiter = ',')]
    exclude_c: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_CONFIDENCE)]
    confidence: f64,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    #[arg(long, default_value = "auto")]
    regime: RegimeChoice,
    #[arg(long)]
    period_cap: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_TARGET_COUNT)]
    target_count: usize,
    /// Accepted for reproducible invocations; analysis commands draw no randomness.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

impl Common {
    fn into_config(self) -> AnalysisConfig {
        let window = match (self.window, self.detrend) {
            (Some(w), _) => Some(w),
            (None, true) => Some(self.spacing.default_window()),
            (None, false) => None,
        };
        AnalysisConfig {
            input: self.input,
            pad_before: self.pad_before,
            pad_after: self.pad_after,
            spacing: self.spacing,
            window,
            max_lags: self.max_lag,
            harmonics: self.k,
            periods: self.period,
            exclude_c: self.exclude_c,
            confidence: self.confidence,
            alpha: self.alpha,
            regime: self.regime,
            period_cap: self.period_cap,
            target_count: self.target_count,
            out: self.out,
        }
    }
}

fn run(command: Command) -> alias_scope::Result<()> {
    match command {
        Command::Acf(c) => {
            let path = cli::cmd_acf(&c.into_config())?;
            println!("{}", path.display());
        }
        Command::Spectrum(c) => {
            let summary = cli::cmd_spectrum(&c.into_config())?;
            println!("M={} regime={:?}", summary.max_lag, summary.significance.regime);
        }
        Command::Diagnose(c) => {
            let output = cli::cmd_diagnose(&c.into_config())?;
            for e in &output.entries {
                match &e.report {
                    Some(r) => println!("{r}"),
                    None => println!("k={} period={}: not significant", e.k, e.period),
                }
            }
        }
        Command::Maxima(c) => {
            let report = cli::cmd_maxima(&c.into_config())?;
            println!("distances: {:?}", report.distances);
        }
        Command::Synth { spec, seed, out } => {
            let path = cli::cmd_synth(&spec, seed, &out)?;
            println!("{}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ALIAS_SCOPE_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
