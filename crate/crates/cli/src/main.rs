use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sepqkd_cli::config::{self, ConfigError, Draft, RunConfig};
use sepqkd_cli::figures::{figure_csv, FigurePreset};
use sepqkd_cli::report;
use sepqkd_cli::sweep::{self, RunError};
use sepqkd_core::protocol::{Detection, Displacement, MiPath, Variant};

#[derive(Parser)]
#[command(
    name = "sepqkd",
    version,
    about = "Covariance-matrix simulator for CV-QKD with separable Gaussian states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct ParamArgs {
    /// Flat key=value configuration file; flags override file entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Squeezing parameter (>= 0).
    #[arg(long)]
    tau: Option<f64>,
    /// Displacement strength (>= 0) or `bound`.
    #[arg(long)]
    x: Option<String>,
    /// Channel transmittance in (0, 1]; mutually exclusive with --distance-km.
    #[arg(long)]
    eta: Option<f64>,
    /// Channel length in km (eta = 10^(-L/50)).
    #[arg(long)]
    distance_km: Option<f64>,
    /// Environment thermal variance (>= 1).
    #[arg(long)]
    n0: Option<f64>,
    /// Reconciliation efficiency in (0, 1].
    #[arg(long)]
    xi: Option<f64>,
    /// Modulation variance in shot-noise units (> 0).
    #[arg(long)]
    phi: Option<f64>,
    /// `separable` or `traditional`.
    #[arg(long)]
    variant: Option<String>,
    /// `homodyne` or `heterodyne`.
    #[arg(long)]
    detection: Option<String>,
    /// Mutual-information path for the separable variant: `formula` or `cm`.
    #[arg(long)]
    mi_path: Option<String>,
    /// Sampler seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args, Default)]
struct SweepArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long)]
    sweep_param: Option<String>,
    #[arg(long)]
    sweep_start: Option<f64>,
    #[arg(long)]
    sweep_stop: Option<f64>,
    #[arg(long)]
    sweep_steps: Option<usize>,
    #[arg(long)]
    sweep2_param: Option<String>,
    #[arg(long)]
    sweep2_start: Option<f64>,
    #[arg(long)]
    sweep2_stop: Option<f64>,
    #[arg(long)]
    sweep2_steps: Option<usize>,
    /// Comma-separated output columns.
    #[arg(long)]
    outputs: Option<String>,
    /// Evaluate grid points one at a time (output is identical either way).
    #[arg(long)]
    serial: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a single operating point and print it as a table.
    Point(ParamArgs),
    /// Run a one- or two-axis parameter sweep and write a CSV file.
    Sweep(SweepArgs),
    /// Emit the data behind one of the canned figures.
    Figure {
        /// fig2a, fig2b, fig4, fig5, fig6, fig7, fig8 or fig9.
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// PPT-certify all bipartitions at each pipeline stage.
    Certify(ParamArgs),
    /// Draw correlated displacement samples and report their statistics.
    Sample {
        /// Displacement strength (>= 0).
        #[arg(long)]
        x: f64,
        /// Number of samples.
        #[arg(long, default_value_t = 10_000)]
        count: usize,
        /// RNG seed; identical seeds reproduce identical samples.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Also write the samples as CSV to this path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn flag_error(message: String) -> Vec<ConfigError> {
    vec![ConfigError { line: 0, message }]
}

impl ParamArgs {
    fn to_draft(&self) -> Result<Draft, Vec<ConfigError>> {
        let mut draft = Draft::default();
        let mut errors = Vec::new();
        if let Some(v) = self.tau {
            draft.tau = Some((0, v));
        }
        if let Some(x) = &self.x {
            if x == "bound" {
                draft.x = Some((0, Displacement::Bound));
            } else {
                match x.parse::<f64>() {
                    Ok(v) => draft.x = Some((0, Displacement::Value(v))),
                    Err(_) => errors.push(ConfigError {
                        line: 0,
                        message: format!("--x expects a number or `bound`, got `{x}`"),
                    }),
                }
            }
        }
        if let Some(v) = self.eta {
            draft.eta = Some((0, v));
        }
        if let Some(v) = self.distance_km {
            draft.distance_km = Some((0, v));
        }
        if let Some(v) = self.n0 {
            draft.n0 = Some((0, v));
        }
        if let Some(v) = self.xi {
            draft.xi = Some((0, v));
        }
        if let Some(v) = self.phi {
            draft.phi = Some((0, v));
        }
        if let Some(v) = &self.variant {
            match v.as_str() {
                "separable" => draft.variant = Some((0, Variant::Separable)),
                "traditional" => draft.variant = Some((0, Variant::Traditional)),
                _ => errors.push(ConfigError {
                    line: 0,
                    message: format!("--variant must be `separable` or `traditional`, got `{v}`"),
                }),
            }
        }
        if let Some(v) = &self.detection {
            match v.as_str() {
                "homodyne" => draft.detection = Some((0, Detection::Homodyne)),
                "heterodyne" => draft.detection = Some((0, Detection::Heterodyne)),
                _ => errors.push(ConfigError {
                    line: 0,
                    message: format!("--detection must be `homodyne` or `heterodyne`, got `{v}`"),
                }),
            }
        }
        if let Some(v) = &self.mi_path {
            match v.as_str() {
                "formula" => draft.mi_path = Some((0, MiPath::Formula)),
                "cm" => draft.mi_path = Some((0, MiPath::FromCm)),
                _ => errors.push(ConfigError {
                    line: 0,
                    message: format!("--mi-path must be `formula` or `cm`, got `{v}`"),
                }),
            }
        }
        if let Some(v) = self.seed {
            draft.seed = Some((0, v));
        }
        if let Some(v) = &self.out {
            draft.out = Some((0, v.clone()));
        }
        if errors.is_empty() {
            Ok(draft)
        } else {
            Err(errors)
        }
    }

    /// File draft (if any) overridden by flag values, validated.
    fn load(&self) -> Result<RunConfig, RunError> {
        let file_draft = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                config::parse_draft(&text).map_err(RunError::Config)?
            }
            None => Draft::default(),
        };
        let flags = self.to_draft().map_err(RunError::Config)?;
        config::finalize(&file_draft.overridden_by(flags)).map_err(RunError::Config)
    }
}

impl SweepArgs {
    fn load(&self) -> Result<RunConfig, RunError> {
        let mut flags = self.params.to_draft().map_err(RunError::Config)?;
        let mut errors = Vec::new();
        let parse_axis_param = |s: &Option<String>, flag: &str, errors: &mut Vec<ConfigError>| {
            s.as_ref().and_then(|name| match config::SweepParam::parse(name) {
                Some(p) => Some((0, p)),
                None => {
                    errors.push(ConfigError {
                        line: 0,
                        message: format!("{flag}: unknown sweep parameter `{name}`"),
                    });
                    None
                }
            })
        };
        flags.sweep_param = parse_axis_param(&self.sweep_param, "--sweep-param", &mut errors);
        flags.sweep2_param = parse_axis_param(&self.sweep2_param, "--sweep2-param", &mut errors);
        flags.sweep_start = self.sweep_start.map(|v| (0, v));
        flags.sweep_stop = self.sweep_stop.map(|v| (0, v));
        flags.sweep_steps = self.sweep_steps.map(|v| (0, v));
        flags.sweep2_start = self.sweep2_start.map(|v| (0, v));
        flags.sweep2_stop = self.sweep2_stop.map(|v| (0, v));
        flags.sweep2_steps = self.sweep2_steps.map(|v| (0, v));
        if let Some(cols) = &self.outputs {
            let mut parsed = Vec::new();
            for name in cols.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                match config::Column::parse(name) {
                    Some(c) => parsed.push(c),
                    None => errors.push(ConfigError {
                        line: 0,
                        message: format!("--outputs: unknown column `{name}`"),
                    }),
                }
            }
            if !parsed.is_empty() {
                flags.outputs = Some((0, parsed));
            }
        }
        if !errors.is_empty() {
            return Err(RunError::Config(errors));
        }

        let file_draft = match &self.params.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                config::parse_draft(&text).map_err(RunError::Config)?
            }
            None => Draft::default(),
        };
        config::finalize(&file_draft.overridden_by(flags)).map_err(RunError::Config)
    }
}

fn run(command: Command) -> Result<(), RunError> {
    match command {
        Command::Point(args) => {
            let config = args.load()?;
            let point = sweep::run_point(&config)?;
            print!("{}", report::point_table(&point));
            Ok(())
        }
        Command::Sweep(args) => {
            let config = args.load()?;
            let csv = sweep::sweep_csv(&config, !args.serial)?;
            let path = config
                .output_path
                .clone()
                .unwrap_or_else(|| "sweep.csv".to_string());
            std::fs::write(&path, &csv)?;
            let rows = csv
                .lines()
                .filter(|l| !l.starts_with('#') && !l.is_empty())
                .count()
                - 1;
            println!("wrote {rows} rows to {path}");
            Ok(())
        }
        Command::Figure { name, out } => {
            let preset = FigurePreset::from_name(&name).ok_or_else(|| {
                RunError::Config(flag_error(format!(
                    "unknown figure preset `{name}` (expected one of fig2a, fig2b, fig4, fig5, fig6, fig7, fig8, fig9)"
                )))
            })?;
            let csv = figure_csv(preset)?;
            let path = out.unwrap_or_else(|| PathBuf::from(preset.default_filename()));
            std::fs::write(&path, &csv)?;
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::Certify(args) => {
            let config = args.load()?;
            let resolved = config.params.resolve().map_err(|e| {
                RunError::Config(flag_error(e.to_string()))
            })?;
            print!("{}", report::certify_report(&resolved)?);
            Ok(())
        }
        Command::Sample { x, count, seed, out } => {
            let (summary, csv) = report::sample_report(x, count, seed, out.is_some())?;
            print!("{summary}");
            if let (Some(path), Some(csv)) = (out, csv) {
                std::fs::write(&path, csv)?;
                println!("wrote samples to {}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
