use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use burgers_crit::cli::{self, CliError, CompareOptions, FitMode, ProfileGrid};
use burgers_crit::model::{load_problem_with, parse_list, ModelEntries, ProblemSpec};
use burgers_crit::numerics::DEFAULT_QUAD_TOL;

#[derive(Parser)]
#[command(name = "burgers-crit", version, about = "Gradient catastrophe experiments for generalized Burgers equations")]
struct Cli {
    /// Directory for CSV output.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

/// Model file plus per-key overrides. Values are passed through as text and
/// validated together with the file.
#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    name: Option<String>,
    #[arg(long = "a", value_name = "EXPR", allow_hyphen_values = true)]
    flux_a: Option<String>,
    #[arg(long = "b", value_name = "EXPR", allow_hyphen_values = true)]
    flux_b: Option<String>,
    #[arg(long = "c", value_name = "EXPR", allow_hyphen_values = true)]
    flux_c: Option<String>,
    #[arg(long = "F", value_name = "EXPR", allow_hyphen_values = true)]
    initial: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    branch_lo: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    branch_hi: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    x_min: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    x_max: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    nx: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<String>,
    /// Comma-separated viscosity values.
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    eps: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t_end: Option<String>,
}

impl ModelArgs {
    fn load(&self) -> Result<ProblemSpec, CliError> {
        if self.eps.as_deref().is_some_and(|e| e.trim().is_empty()) {
            return Err(CliError::Usage("the eps list is empty".into()));
        }
        let mut o = ModelEntries::new();
        let pairs = [
            ("name", &self.name),
            ("a", &self.flux_a),
            ("b", &self.flux_b),
            ("c", &self.flux_c),
            ("F", &self.initial),
            ("branch_lo", &self.branch_lo),
            ("branch_hi", &self.branch_hi),
            ("x_min", &self.x_min),
            ("x_max", &self.x_max),
            ("nx", &self.nx),
            ("tau", &self.tau),
            ("eps", &self.eps),
            ("t_end", &self.t_end),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                o.insert(k.to_string(), v.clone());
            }
        }
        Ok(load_problem_with(&self.model, &o)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FitArg {
    Mean,
    PerPoint,
}

#[derive(Subcommand)]
enum Command {
    /// Locate the gradient catastrophe and print the scaling constants.
    Catastrophe(ModelArgs),
    /// Compare the viscous solution with the Pearcey profile formula and
    /// fit the log-log slope of the difference against eps.
    Compare {
        #[command(flatten)]
        model: ModelArgs,
        /// Comparison time.
        #[arg(long)]
        t: f64,
        /// Comma-separated sample positions.
        #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value_t = DEFAULT_QUAD_TOL)]
        tol: f64,
        #[arg(long, value_enum, default_value = "mean")]
        fit: FitArg,
        /// Half width of the overlay window; 0 disables the overlay files.
        #[arg(long, default_value_t = 0.5)]
        overlay: f64,
    },
    /// Track the total mass for each eps up to t_end.
    Mass(ModelArgs),
    /// Tabulate the universal profile U(X, T).
    Profile {
        #[arg(long, default_value = "-4,4", allow_hyphen_values = true)]
        x_range: String,
        #[arg(long, default_value = "-4,4", allow_hyphen_values = true)]
        t_range: String,
        /// Grid sizes as `NX,NT`.
        #[arg(long, default_value = "81,81")]
        points: String,
        #[arg(long, default_value_t = DEFAULT_QUAD_TOL)]
        tol: f64,
    },
    /// Trace the inviscid shock front from the catastrophe to t_end.
    Shockfront {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
    },
    /// Run the viscous solver and write snapshots.
    Solve {
        #[command(flatten)]
        model: ModelArgs,
        /// Comma-separated snapshot times.
        #[arg(long, value_name = "LIST")]
        t: String,
    },
}

fn list(key: &str, s: &str) -> Result<Vec<f64>, CliError> {
    Ok(parse_list(key, s)?)
}

fn pair(key: &str, s: &str) -> Result<(f64, f64), CliError> {
    match list(key, s)?.as_slice() {
        &[a, b] => Ok((a, b)),
        _ => Err(CliError::Usage(format!("--{key} expects two numbers, got '{s}'"))),
    }
}

fn report_written(path: &Path) {
    println!("wrote {}", path.display());
}

fn run(cli: Cli) -> Result<(), CliError> {
    let out = cli.out;
    match cli.command {
        Command::Catastrophe(model) => {
            let spec = model.load()?;
            print!("{}", cli::cmd_catastrophe(&spec)?);
        }
        Command::Compare {
            model,
            t,
            x,
            tol,
            fit,
            overlay,
        } => {
            let spec = model.load()?;
            let opts = CompareOptions {
                t_star: t,
                xs: list("x", &x)?,
                eps: spec.eps.clone(),
                tol,
                mode: match fit {
                    FitArg::Mean => FitMode::Mean,
                    FitArg::PerPoint => FitMode::PerPoint,
                },
                overlay_half_width: overlay,
            };
            let report = cli::cmd_compare(&spec, &opts)?;
            let path = cli::compare_path(&out, &spec.name);
            cli::write_compare(&path, &report)?;
            report_written(&path);
            for o in &report.overlays {
                let path = cli::overlay_path(&out, &spec.name, o.eps);
                cli::write_overlay(&path, o)?;
                report_written(&path);
            }
            match report.fit {
                Some(f) => println!(
                    "slope {:.4} intercept {:.4} residual {:.3e}",
                    f.slope, f.intercept, f.residual
                ),
                None => println!("slope fit skipped: needs at least two eps values"),
            }
        }
        Command::Mass(model) => {
            let spec = model.load()?;
            let report = cli::cmd_mass(&spec, &spec.eps, spec.t_end)?;
            for s in &report.series {
                let path = cli::mass_path(&out, &spec.name, s.eps);
                cli::write_mass(&path, s)?;
                report_written(&path);
                println!("eps {} max relative drift {:.3e}", s.eps, s.max_relative_drift);
            }
        }
        Command::Profile {
            x_range,
            t_range,
            points,
            tol,
        } => {
            let (nx, nt) = pair("points", &points)?;
            if nx.fract() != 0.0 || nt.fract() != 0.0 || nx < 1.0 || nt < 1.0 {
                return Err(CliError::Usage(format!("--points expects two positive integers, got '{points}'")));
            }
            let grid = ProfileGrid {
                x_range: pair("x-range", &x_range)?,
                t_range: pair("t-range", &t_range)?,
                nx: nx as usize,
                nt: nt as usize,
                tol,
            };
            let rows = cli::cmd_profile(&grid)?;
            let path = cli::profile_path(&out);
            cli::write_profile(&path, &rows)?;
            report_written(&path);
        }
        Command::Shockfront { model, dt } => {
            let spec = model.load()?;
            let trace = cli::cmd_shockfront(&spec, spec.t_end, dt)?;
            let path = cli::shock_path(&out, &spec.name);
            cli::write_shock(&path, &spec, &trace)?;
            report_written(&path);
            let last = trace.last().state;
            println!(
                "t0 {:.10} x0 {:.10}; at t = {} the front is at x = {:.10}; max equal-area residual {:.3e}",
                trace.t0,
                trace.x0,
                last.t,
                last.x,
                trace.max_equal_area_residual()
            );
        }
        Command::Solve { model, t } => {
            let spec = model.load()?;
            let times = list("t", &t)?;
            for run in cli::cmd_solve(&spec, &spec.eps, &times)? {
                for snap in &run.snapshots {
                    let path = cli::snapshot_path(&out, &spec.name, run.eps, snap.t);
                    cli::write_snapshot(&path, &spec, run.eps, &run.grid, snap)?;
                    report_written(&path);
                }
            }
        }
    }
    Ok(())
}

fn error_line(kind: &str, message: &str) {
    let flat = message.split_whitespace().collect::<Vec<_>>().join(" ");
    eprintln!("error\tkind={kind}\tmessage={flat}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            error_line("usage", &e.kind().to_string());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error_line(e.kind(), &e.to_string());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
