//! Command-line front end: `simulate`, `steady`, `sweep` and `verify`.
//!
//! Exit codes: 0 success, 1 usage/configuration error, 2 numerical failure
//! (divergence, no convergence, no stationary state). The structured error
//! name is printed to stderr.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::{parse_config, RunConfig};
use crate::error::Error;
use crate::propagation::{propagate, Trajectory};
use crate::steady::{solve_steady_mean_field, steady_phonon_decomposition, SteadyResult};
use crate::sweeps::{
    figure_preset, run_sweep, AxisParam, FigurePreset, Observable, SweepAxis, SweepGrid, SweepSpec,
};
use crate::verify::run_invariant_suite;

#[derive(Parser)]
#[command(
    name = "optocool",
    version,
    about = "Cooling dynamics of dispersively and dissipatively coupled optomechanics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate mean field and covariance, write the trajectory as CSV
    Simulate {
        /// Run configuration (flat key=value file)
        #[arg(short, long)]
        config: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Solve the steady state for a target amplitude, write JSON
    Steady {
        #[arg(short, long)]
        config: PathBuf,
        /// Target intracavity amplitude as RE,IM
        #[arg(long, value_name = "RE,IM")]
        target_a: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Evaluate an observable over a parameter grid, write CSV
    Sweep(SweepArgs),
    /// Run the oracle-equivalence and invariant suite
    Verify,
}

#[derive(Args)]
struct SweepArgs {
    /// Figure preset name (fig1, fig2, fig3a..fig3c, fig4a..fig4d)
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Base run configuration for a custom sweep
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Axis as name=v1,v2,... or name=lo:hi:count; repeat for a 2-D grid.
    /// With --preset, replaces the grid of the named preset axis.
    #[arg(long = "axis", value_name = "NAME=VALUES")]
    axes: Vec<String>,
    /// Observable for custom sweeps
    #[arg(long, default_value = "phonon_at_t_end")]
    observable: String,
    /// Target amplitude RE,IM for steady observables
    #[arg(long, value_name = "RE,IM")]
    target_a: Option<String>,
    /// Worker threads
    #[arg(short = 'j', long, env = "OPTOCOOL_THREADS", default_value_t = 1)]
    workers: usize,
    #[arg(short, long)]
    output: PathBuf,
}

enum CliError {
    Usage(String),
    Numerical(Error),
    VerifyFailed { failed: usize },
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numerical(e)
    }
}

/// Render with 17 significant digits, enough to reproduce the f64 exactly.
fn g17(x: f64) -> String {
    format!("{x:.16e}")
}

fn read_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| CliError::Usage(e.to_string()))
}

fn write_output(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    let [re, im] = parts.as_slice() else {
        return Err(CliError::Usage(format!("expected RE,IM, got `{s}`")));
    };
    let re: f64 = re.trim().parse().map_err(|_| {
        CliError::Usage(format!("invalid real part `{re}`"))
    })?;
    let im: f64 = im.trim().parse().map_err(|_| {
        CliError::Usage(format!("invalid imaginary part `{im}`"))
    })?;
    Ok(Complex64::new(re, im))
}

fn parse_axis(arg: &str) -> Result<SweepAxis, CliError> {
    let Some((name, values)) = arg.split_once('=') else {
        return Err(CliError::Usage(format!(
            "expected NAME=VALUES in axis `{arg}`"
        )));
    };
    let param: AxisParam = name.parse().map_err(CliError::Usage)?;
    let values = parse_axis_values(values)
        .map_err(|e| CliError::Usage(format!("axis `{name}`: {e}")))?;
    if values.is_empty() {
        return Err(CliError::Usage(format!("axis `{name}` has no values")));
    }
    Ok(SweepAxis { param, values })
}

fn parse_axis_values(spec: &str) -> Result<Vec<f64>, String> {
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        let [lo, hi, count] = parts.as_slice() else {
            return Err(format!("expected LO:HI:COUNT, got `{spec}`"));
        };
        let lo: f64 = lo.parse().map_err(|_| format!("invalid bound `{lo}`"))?;
        let hi: f64 = hi.parse().map_err(|_| format!("invalid bound `{hi}`"))?;
        let count: usize = count
            .parse()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or(format!("invalid count `{count}`"))?;
        if !(lo.is_finite() && hi.is_finite()) {
            return Err("bounds must be finite".to_string());
        }
        Ok((0..count)
            .map(|i| {
                if count == 1 {
                    lo
                } else {
                    lo + i as f64 * (hi - lo) / (count - 1) as f64
                }
            })
            .collect())
    } else {
        spec.split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or(format!("invalid value `{v}`"))
            })
            .collect()
    }
}

fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from("t,re_a,im_a,re_b,im_b,n_phonon,n_photon,re_omega,im_omega\n");
    for s in &traj.samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            g17(s.t),
            g17(s.a.re),
            g17(s.a.im),
            g17(s.b.re),
            g17(s.b.im),
            g17(s.n_phonon),
            g17(s.n_photon),
            g17(s.omega.re),
            g17(s.omega.im),
        );
    }
    out
}

fn steady_json(res: &SteadyResult) -> String {
    let value = serde_json::json!({
        "omega0_re": res.omega0.re,
        "omega0_im": res.omega0.im,
        "a_ss_re": res.a_ss.re,
        "a_ss_im": res.a_ss.im,
        "b_ss_re": res.b_ss.re,
        "b_ss_im": res.b_ss.im,
        "n_total": res.n_total,
        "sigma_eq": res.sigma_eq,
        "s_bac": res.s_bac,
    });
    let mut text = serde_json::to_string_pretty(&value).expect("JSON serialization");
    text.push('\n');
    text
}

fn sweep_csv(grid: &SweepGrid) -> String {
    let mut out = String::new();
    let names: Vec<&str> = grid.axes.iter().map(|a| a.param.name()).collect();
    let _ = writeln!(out, "{},value,error", names.join(","));
    for (idx, value) in grid.values.iter().enumerate() {
        let coords = grid.coords(idx);
        for c in &coords {
            let _ = write!(out, "{},", g17(*c));
        }
        match value {
            Ok(v) => {
                let _ = writeln!(out, "{},", g17(*v));
            }
            Err(name) => {
                let _ = writeln!(out, ",{name}");
            }
        }
    }
    out
}

fn cmd_simulate(config: &Path, output: &Path) -> Result<(), CliError> {
    let cfg = read_config(config)?;
    let traj = propagate(
        &cfg.params,
        &cfg.drive,
        &cfg.mf0(),
        cfg.t_end,
        cfg.dt,
        cfg.sample_every,
    )?;
    write_output(output, &trajectory_csv(&traj))
}

fn cmd_steady(config: &Path, target_a: &str, output: &Path) -> Result<(), CliError> {
    let cfg = read_config(config)?;
    let target = parse_complex(target_a)?;
    let (omega0, b_ss) = solve_steady_mean_field(&cfg.params, target)?;
    let res = steady_phonon_decomposition(&cfg.params, omega0, target, b_ss)?;
    write_output(output, &steady_json(&res))
}

fn build_sweep_spec(args: &SweepArgs) -> Result<SweepSpec, CliError> {
    let axes: Vec<SweepAxis> = args
        .axes
        .iter()
        .map(|a| parse_axis(a))
        .collect::<Result<_, _>>()?;

    if let Some(name) = &args.preset {
        let preset: FigurePreset = name.parse().map_err(CliError::Usage)?;
        let mut spec = figure_preset(preset);
        for axis in axes {
            let Some(slot) = spec.axes.iter_mut().find(|a| a.param == axis.param) else {
                return Err(CliError::Usage(format!(
                    "preset `{name}` has no `{}` axis",
                    axis.param
                )));
            };
            slot.values = axis.values;
        }
        return Ok(spec);
    }

    let Some(config) = &args.config else {
        return Err(CliError::Usage(
            "sweep requires either --preset or --config".to_string(),
        ));
    };
    if axes.is_empty() || axes.len() > 2 {
        return Err(CliError::Usage(
            "custom sweeps take one or two --axis arguments".to_string(),
        ));
    }
    let cfg = read_config(config)?;
    let observable: Observable = args.observable.parse().map_err(CliError::Usage)?;
    let target_a = match &args.target_a {
        Some(s) => Some(parse_complex(s)?),
        None => None,
    };
    if observable.is_steady() && target_a.is_none() {
        return Err(CliError::Usage(format!(
            "observable `{}` requires --target-a",
            observable.name()
        )));
    }
    for axis in &axes {
        let needs_chirp = matches!(
            axis.param,
            AxisParam::Beta | AxisParam::Chi0 | AxisParam::Alpha | AxisParam::T0
        );
        if needs_chirp && !matches!(cfg.drive, crate::model::DriveSignal::Chirped(_)) {
            return Err(CliError::Usage(format!(
                "axis `{}` requires a chirped drive",
                axis.param
            )));
        }
    }
    Ok(SweepSpec {
        params: cfg.params,
        drive: cfg.drive,
        mf0: cfg.mf0(),
        t_end: cfg.t_end,
        dt: cfg.dt,
        sample_every: cfg.sample_every,
        axes,
        observable,
        target_a,
        chi0_scale: None,
    })
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    if args.workers < 1 {
        return Err(CliError::Usage("workers must be >= 1".to_string()));
    }
    let spec = build_sweep_spec(args)?;
    let grid = run_sweep(&spec, args.workers);
    write_output(&args.output, &sweep_csv(&grid))
}

fn cmd_verify() -> Result<(), CliError> {
    let results = run_invariant_suite();
    let mut failed = 0;
    for r in &results {
        println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
        if !r.passed {
            failed += 1;
        }
    }
    if failed == 0 {
        println!("verify: {} checks passed", results.len());
        Ok(())
    } else {
        Err(CliError::VerifyFailed { failed })
    }
}

/// Parse `argv` and run the requested command, returning the process exit
/// status.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };

    let outcome = match &cli.command {
        Command::Simulate { config, output } => cmd_simulate(config, output),
        Command::Steady {
            config,
            target_a,
            output,
        } => cmd_steady(config, target_a, output),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Verify => cmd_verify(),
    };

    match outcome {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(CliError::Numerical(e)) => {
            eprintln!("error: {e}");
            2
        }
        Err(CliError::VerifyFailed { failed }) => {
            eprintln!("error: verify: {failed} check(s) failed");
            2
        }
    }
}
