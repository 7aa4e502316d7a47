//! `swipt-cnoma`: run figure presets, custom sweeps and single-point
//! evaluations, or validate config files.

use std::env;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use swipt_cnoma::experiments::{self, format_sig9};
use swipt_cnoma::{
    estimate_with, figure_preset_with, run_sweep_with, ConfigMap, Error, Figure, Metric, Scheme,
    SweepSpec, Workers,
};

/// Environment variable naming the default directory for CSV output.
const OUT_DIR_ENV: &str = "SWIPT_CNOMA_OUT_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "swipt-cnoma",
    version,
    about = "SWIPT cooperative NOMA with OAM: Monte Carlo capacity and EE"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a reference figure preset (fig3..fig10)
    Figure {
        id: String,
        /// Extend δ sweeps to include 0 and 1
        #[arg(long)]
        inclusive_delta: bool,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run the sweep described by a config file
    Sweep {
        config: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Evaluate every scheme at one parameter set
    Point {
        /// Optional config file for the parameters
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Check a config file and exit 0 if it is valid
    Validate { config: PathBuf },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Monte Carlo trials per point [default: 100000, or the config's n_trials]
    #[arg(long)]
    trials: Option<u64>,
    /// Master seed [default: 42, or the config's seed]
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path; `-` for stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    workers: Option<usize>,
    /// Parameter overrides as key=value, comma separated or repeated
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    overrides: Vec<String>,
}

impl RunArgs {
    fn workers(&self) -> Workers {
        self.workers.map_or(Workers::Auto, Workers::Fixed)
    }

    /// Applies overrides and the trial/seed flags on top of `map`.
    fn build_spec(&self, mut map: ConfigMap) -> Result<SweepSpec, Error> {
        map.apply_overrides(&self.overrides)?;
        if let Some(t) = self.trials {
            map.set("n_trials", &t.to_string())?;
        }
        if let Some(s) = self.seed {
            map.set("seed", &s.to_string())?;
        }
        map.to_spec()
    }
}

enum Destination {
    Stdout,
    File(PathBuf),
}

fn destination(flag: Option<&Path>, configured: Option<&str>, default_name: &str) -> Destination {
    match (flag, configured) {
        (Some(p), _) if p.as_os_str() == "-" => Destination::Stdout,
        (Some(p), _) => Destination::File(p.to_path_buf()),
        (None, Some(p)) => Destination::File(PathBuf::from(p)),
        (None, None) => match env::var_os(OUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => {
                Destination::File(Path::new(&dir).join(format!("{default_name}.csv")))
            }
            _ => Destination::Stdout,
        },
    }
}

fn emit(dest: Destination, text: &str) -> Result<(), Error> {
    match dest {
        Destination::Stdout => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
        Destination::File(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|source| Error::Io {
                    path: dir.to_path_buf(),
                    source,
                })?;
            }
            std::fs::write(&path, text).map_err(|source| Error::Io { path, source })
        }
    }
}

fn run_spec(spec: &SweepSpec, run: &RunArgs, default_name: &str) -> Result<(), Error> {
    let rows = run_sweep_with(spec, run.workers())?;
    let dest = destination(
        run.out.as_deref(),
        spec.output_path.as_deref(),
        default_name,
    );
    emit(dest, &experiments::to_csv_string(&rows))
}

fn point(config: Option<&Path>, run: &RunArgs) -> Result<(), Error> {
    let map = match config {
        Some(p) => ConfigMap::from_file(p)?,
        None => ConfigMap::default(),
    };
    let spec = run.build_spec(map)?;
    let params = &spec.base_params;
    let mut text =
        String::from("scheme,c_ue1,c_ue1_se,c_ue2,c_ue2_se,c_sum,c_sum_se,ee,ee_se,n_trials\n");
    for scheme in Scheme::ALL {
        let est = estimate_with(params, scheme, spec.n_trials, spec.seed, run.workers())?;
        text.push_str(scheme.as_str());
        for metric in Metric::ALL {
            let e = est
                .iter()
                .find(|e| e.metric == metric)
                .expect("all metrics estimated");
            text.push_str(&format!(
                ",{},{}",
                format_sig9(e.mean),
                format_sig9(e.std_error)
            ));
        }
        text.push_str(&format!(",{}\n", spec.n_trials));
    }
    emit(destination(run.out.as_deref(), None, "point"), &text)
}

fn dispatch(cmd: Command) -> Result<(), Error> {
    match cmd {
        Command::Figure {
            id,
            inclusive_delta,
            run,
        } => {
            let fig: Figure = id.parse()?;
            let preset = figure_preset_with(fig, inclusive_delta);
            let spec = run.build_spec(ConfigMap::from_spec(&preset))?;
            run_spec(&spec, &run, fig.as_str())
        }
        Command::Sweep { config, run } => {
            let spec = run.build_spec(ConfigMap::from_file(&config)?)?;
            let name = config
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "sweep".into());
            run_spec(&spec, &run, &name)
        }
        Command::Point { config, run } => point(config.as_deref(), &run),
        Command::Validate { config } => {
            let spec = ConfigMap::from_file(&config)?.to_spec()?;
            eprintln!(
                "{}: ok ({} axis, {} points, {} rows)",
                config.display(),
                spec.axis,
                spec.axis_values.len(),
                spec.row_count()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
