//! `snlevy` — evaluate two-point fluctuation identities of spectrally
//! negative Lévy processes, run the identity-check suite, and validate
//! against Monte Carlo.
//!
//! Output is CSV (one header line, 17-significant-digit numerics). Exit
//! codes: 0 success, 1 check failures, 2 argument or configuration
//! errors, 3 numerical faults and unsupported cases.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use snlevy_core::conditioned::{self, Approach};
use snlevy_core::entrance::{self, EntranceQuery};
use snlevy_core::killed::{self, Boundary, TwoPointConfig};
use snlevy_core::last_visit;
use snlevy_core::{Error as CoreError, ScaleEngine};
use snlevy_tools::mc::{self, McConfig};
use snlevy_tools::{checks, config, fmt_num};

#[derive(Parser)]
#[command(name = "snlevy", version, about = "Two-point fluctuation identities for spectrally negative Levy processes")]
struct Cli {
    /// Model configuration file (plain `key = value` text).
    #[arg(long, global = true)]
    model: Option<PathBuf>,

    /// Half-width of the two-point set `{-a, a}`.
    #[arg(long, global = true, default_value_t = 0.5)]
    a: f64,

    /// Write the CSV to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Random seed for Monte Carlo subcommands.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    /// Prepend a ready-to-paste gnuplot recipe as a `#` comment line.
    #[arg(long, global = true)]
    gnuplot_hint: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one quantity; prints a single CSV row.
    Eval {
        #[command(subcommand)]
        quantity: EvalCmd,
    },
    /// Run consistency suites.
    Check {
        #[command(subcommand)]
        what: CheckCmd,
    },
    /// Monte Carlo estimators.
    Mc {
        #[command(subcommand)]
        estimator: McCmd,
    },
}

#[derive(Subcommand)]
enum EvalCmd {
    /// Scale function `W^(q)(x)` and its derivative.
    W {
        #[arg(long)]
        q: f64,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
    },
    /// `Φ(q)` and `Φ'(q)`.
    Phi {
        #[arg(long)]
        q: f64,
    },
    /// Killed two-point resolvent density `v_q(x, y)`.
    Resolvent {
        #[arg(long)]
        q: f64,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, allow_negative_numbers = true)]
        y: f64,
    },
    /// Avoidance probability `h_q(x)`.
    H {
        #[arg(long)]
        q: f64,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
    },
    /// Local-time weight `α_{±a}(q)`.
    Alpha {
        #[arg(long)]
        q: f64,
        #[arg(long, value_enum)]
        which: BoundaryArg,
    },
    /// Boundary-limit density `z_{q,β}(y)` of the conditioned resolvent.
    Zlimit {
        #[arg(long)]
        q: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long, allow_negative_numbers = true)]
        y: f64,
        #[arg(long, value_enum)]
        side: ApproachArg,
    },
    /// Entrance-law density `dη̂^{±a}_β/dy`.
    Entrance {
        #[arg(long)]
        beta: f64,
        #[arg(long, allow_negative_numbers = true)]
        y: f64,
        #[arg(long, value_enum)]
        side: SideArg,
        #[arg(long, value_enum, default_value_t = PartArg::Total)]
        part: PartArg,
    },
    /// Last-visit transform `E^z[e^{−λ(T_y − S_{x,y})}]`.
    Lastvisit {
        #[arg(long, allow_negative_numbers = true)]
        lam: f64,
        #[arg(long, allow_negative_numbers = true)]
        z: f64,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, allow_negative_numbers = true)]
        y: f64,
    },
}

#[derive(Subcommand)]
enum CheckCmd {
    /// Run every cross-module identity check on the reference models.
    Identities,
}

#[derive(Subcommand)]
enum McCmd {
    /// Estimate the avoidance probability `h_q(x)`.
    H {
        #[arg(long)]
        q: f64,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Estimate the killed resolvent density on uniform bins.
    Vdensity {
        #[arg(long)]
        q: f64,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, default_value_t = -0.5, allow_negative_numbers = true)]
        bin_lo: f64,
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        bin_hi: f64,
        #[arg(long, default_value_t = 10)]
        bins: usize,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Estimate the last-visit transform.
    Lastvisit {
        #[arg(long, allow_negative_numbers = true)]
        lam: f64,
        #[arg(long, allow_negative_numbers = true)]
        z: f64,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, allow_negative_numbers = true)]
        y: f64,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

#[derive(clap::Args)]
struct BudgetArgs {
    #[arg(long, default_value_t = 100_000)]
    paths: u64,
    #[arg(long, default_value_t = 1e-4)]
    dt: f64,
    #[arg(long, default_value_t = 50.0)]
    horizon: f64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value_t = 1e-3)]
    small_jump_eps: f64,
}

impl BudgetArgs {
    fn to_config(&self, seed: u64) -> McConfig {
        McConfig {
            paths: self.paths,
            dt: self.dt,
            horizon: self.horizon,
            seed,
            workers: self.workers,
            small_jump_eps: self.small_jump_eps,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundaryArg {
    Upper,
    Lower,
}

#[derive(Clone, Copy, ValueEnum)]
enum ApproachArg {
    UpMinus,
    DownMinus,
    UpA,
    DownA,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Minus,
    Plus,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum PartArg {
    Total,
    Down,
    Up,
}

/// A process-level failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

fn arg_error(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn core_error(e: CoreError) -> Failure {
    let code = match e {
        CoreError::Unsupported(_) | CoreError::NumericalFault(_) | CoreError::Accuracy { .. } => 3,
        _ => 2,
    };
    Failure {
        code,
        message: e.to_string(),
    }
}

fn load_engine(cli: &Cli) -> Result<ScaleEngine, Failure> {
    let path = cli
        .model
        .as_ref()
        .ok_or_else(|| arg_error("this subcommand needs --model <file>"))?;
    let cfg = config::load(path).map_err(arg_error)?;
    cfg.engine().map_err(core_error)
}

fn two_point(cli: &Cli) -> Result<TwoPointConfig, Failure> {
    TwoPointConfig::new(cli.a).map_err(core_error)
}

fn run_eval(cli: &Cli, quantity: &EvalCmd) -> Result<String, Failure> {
    let engine = load_engine(cli)?;
    let (header, mut fields): (&str, Vec<f64>) = match quantity {
        EvalCmd::W { q, x } => (
            "quantity,q,x,value,derivative",
            vec![
                *q,
                *x,
                engine.w(*q, *x).map_err(core_error)?,
                engine.w_prime(*q, *x).map_err(core_error)?,
            ],
        ),
        EvalCmd::Phi { q } => (
            "quantity,q,value,derivative",
            vec![
                *q,
                engine.phi(*q).map_err(core_error)?,
                engine.phi_prime(*q).map_err(core_error)?,
            ],
        ),
        EvalCmd::Resolvent { q, x, y } => (
            "quantity,q,x,y,value",
            vec![
                *q,
                *x,
                *y,
                killed::v(&engine, &two_point(cli)?, *q, *x, *y).map_err(core_error)?,
            ],
        ),
        EvalCmd::H { q, x } => (
            "quantity,q,x,value",
            vec![
                *q,
                *x,
                killed::h(&engine, &two_point(cli)?, *q, *x).map_err(core_error)?,
            ],
        ),
        EvalCmd::Alpha { q, which } => {
            let b = match which {
                BoundaryArg::Upper => Boundary::Upper,
                BoundaryArg::Lower => Boundary::Lower,
            };
            (
                "quantity,q,value",
                vec![
                    *q,
                    killed::alpha(&engine, &two_point(cli)?, *q, b).map_err(core_error)?,
                ],
            )
        }
        EvalCmd::Zlimit { q, beta, y, side } => {
            let approach = match side {
                ApproachArg::UpMinus => Approach::UpToMinusA,
                ApproachArg::DownMinus => Approach::DownToMinusA,
                ApproachArg::UpA => Approach::UpToA,
                ApproachArg::DownA => Approach::DownToA,
            };
            (
                "quantity,q,beta,y,value",
                vec![
                    *q,
                    *beta,
                    *y,
                    conditioned::z_limit(&engine, &two_point(cli)?, *q, *beta, *y, approach)
                        .map_err(core_error)?,
                ],
            )
        }
        EvalCmd::Entrance {
            beta,
            y,
            side,
            part,
        } => {
            let query = EntranceQuery {
                beta: *beta,
                y: *y,
                side: match side {
                    SideArg::Minus => entrance::Side::Minus,
                    SideArg::Plus => entrance::Side::Plus,
                },
                part: match part {
                    PartArg::Total => entrance::Part::Total,
                    PartArg::Down => entrance::Part::DownStart,
                    PartArg::Up => entrance::Part::UpStart,
                },
            };
            (
                "quantity,beta,y,value",
                vec![
                    *beta,
                    *y,
                    entrance::entrance_density(&engine, &two_point(cli)?, &query)
                        .map_err(core_error)?,
                ],
            )
        }
        EvalCmd::Lastvisit { lam, z, x, y } => (
            "quantity,lam,z,x,y,value",
            vec![
                *lam,
                *z,
                *x,
                *y,
                last_visit::last_visit_laplace(&engine, *lam, *z, *x, *y).map_err(core_error)?,
            ],
        ),
    };
    let name = match quantity {
        EvalCmd::W { .. } => "w",
        EvalCmd::Phi { .. } => "phi",
        EvalCmd::Resolvent { .. } => "resolvent",
        EvalCmd::H { .. } => "h",
        EvalCmd::Alpha { .. } => "alpha",
        EvalCmd::Zlimit { .. } => "zlimit",
        EvalCmd::Entrance { .. } => "entrance",
        EvalCmd::Lastvisit { .. } => "lastvisit",
    };
    let row: Vec<String> = std::iter::once(name.to_string())
        .chain(fields.drain(..).map(fmt_num))
        .collect();
    Ok(format!("{header}\n{}\n", row.join(",")))
}

fn run_check() -> (String, bool) {
    let results = checks::run_identity_checks();
    let mut out = String::from("check,measured_error,tolerance,status\n");
    let mut all_pass = true;
    for r in &results {
        all_pass &= r.pass();
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.name,
            fmt_num(r.error),
            fmt_num(r.tol),
            if r.pass() { "pass" } else { "fail" }
        ));
    }
    (out, all_pass)
}

fn run_mc(cli: &Cli, estimator: &McCmd) -> Result<String, Failure> {
    let engine = load_engine(cli)?;
    let model = *engine.model();
    match estimator {
        McCmd::H { q, x, budget } => {
            let est = mc::estimate_h(&model, cli.a, *q, *x, &budget.to_config(cli.seed))
                .map_err(arg_error)?;
            Ok(format!(
                "estimator,q,x,a,paths,value,std_error,bias_bound\nh,{},{},{},{},{},{},{}\n",
                fmt_num(*q),
                fmt_num(*x),
                fmt_num(cli.a),
                est.paths_used,
                fmt_num(est.value),
                fmt_num(est.std_error),
                fmt_num(est.bias_bound)
            ))
        }
        McCmd::Vdensity {
            q,
            x,
            bin_lo,
            bin_hi,
            bins,
            budget,
        } => {
            if !(bin_lo < bin_hi) || *bins == 0 {
                return Err(arg_error("mc vdensity: need bin_lo < bin_hi and bins > 0"));
            }
            let edges: Vec<f64> = (0..=*bins)
                .map(|i| bin_lo + (bin_hi - bin_lo) * i as f64 / *bins as f64)
                .collect();
            let ests = mc::estimate_v_density(
                &model,
                cli.a,
                *q,
                *x,
                &edges,
                &budget.to_config(cli.seed),
            )
            .map_err(arg_error)?;
            let mut out =
                String::from("estimator,q,x,bin_lo,bin_hi,paths,value,std_error,bias_bound\n");
            for (i, est) in ests.iter().enumerate() {
                out.push_str(&format!(
                    "vdensity,{},{},{},{},{},{},{},{}\n",
                    fmt_num(*q),
                    fmt_num(*x),
                    fmt_num(edges[i]),
                    fmt_num(edges[i + 1]),
                    est.paths_used,
                    fmt_num(est.value),
                    fmt_num(est.std_error),
                    fmt_num(est.bias_bound)
                ));
            }
            Ok(out)
        }
        McCmd::Lastvisit {
            lam,
            z,
            x,
            y,
            budget,
        } => {
            let est = mc::estimate_last_visit(&model, *lam, *z, *x, *y, &budget.to_config(cli.seed))
                .map_err(arg_error)?;
            Ok(format!(
                "estimator,lam,z,x,y,paths,value,std_error,bias_bound\nlastvisit,{},{},{},{},{},{},{},{}\n",
                fmt_num(*lam),
                fmt_num(*z),
                fmt_num(*x),
                fmt_num(*y),
                est.paths_used,
                fmt_num(est.value),
                fmt_num(est.std_error),
                fmt_num(est.bias_bound)
            ))
        }
    }
}

fn gnuplot_hint(command: &Command) -> &'static str {
    match command {
        Command::Eval { .. } => "# gnuplot: set datafile separator ','; plot 'out.csv' skip 1 using 2:3 with points\n",
        Command::Check { .. } => "# gnuplot: set datafile separator ','; set logscale y; plot 'out.csv' skip 1 using 0:2 with boxes\n",
        Command::Mc { .. } => "# gnuplot: set datafile separator ','; plot 'out.csv' skip 1 using 2:($6):($7*3) with yerrorbars\n",
    }
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    let mut payload = String::new();
    if cli.gnuplot_hint {
        payload.push_str(gnuplot_hint(&cli.command));
    }
    payload.push_str(text);
    match &cli.out {
        Some(path) => std::fs::write(path, payload)
            .map_err(|e| arg_error(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result: Result<(String, u8), Failure> = match &cli.command {
        Command::Eval { quantity } => run_eval(&cli, quantity).map(|t| (t, 0)),
        Command::Check {
            what: CheckCmd::Identities,
        } => {
            let (text, ok) = run_check();
            Ok((text, if ok { 0 } else { 1 }))
        }
        Command::Mc { estimator } => run_mc(&cli, estimator).map(|t| (t, 0)),
    };
    match result {
        Ok((text, code)) => {
            if let Err(f) = emit(&cli, &text) {
                eprintln!("snlevy: {}", f.message);
                return ExitCode::from(f.code);
            }
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("snlevy: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
