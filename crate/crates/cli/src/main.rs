use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use westervelt::coercivity::{a1_report, reference_constant};
use westervelt::experiments::{exit_code, kernel_only_sweep, run_sweep, SweepConfig};
use westervelt::kernels::KernelSpec;
use westervelt::mlf::{ml_eval, ml_eval_in, MlQuery, Regime};
use westervelt::solver::{check_smallness, solve, DataPreset, PDEConfig};
use westervelt::volterra::{Scheme, Trajectory};

#[derive(Parser)]
#[command(name = "westervelt", version, about = "Nonlocal Westervelt solver and singular-limit sweeps")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate E_{a,b}(-x).
    Mlf {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, num_args = 1.., required = true)]
        x: Vec<f64>,
        /// Force a regime: series, contour or asymptotic.
        #[arg(long)]
        regime: Option<String>,
    },
    /// Kernel evaluation, norms, limits and rate checks.
    Kernel {
        #[command(subcommand)]
        cmd: KernelCmd,
    },
    /// Coercivity and boundedness report for a kernel family.
    Verify {
        #[arg(long)]
        kernel: KernelSpec,
        #[arg(long = "T", default_value_t = 1.0)]
        t_final: f64,
        #[arg(long, num_args = 1.., default_values_t = [0.1, 0.01, 0.001])]
        eps: Vec<f64>,
    },
    /// Linear (k = 0) solve; writes trajectory.csv and summary.json.
    SolveLinear {
        #[arg(long)]
        kernel: KernelSpec,
        #[arg(long, default_value = "single-mode:mode=1,amplitude=0.1")]
        data: DataPreset,
        #[arg(long = "L", default_value_t = 1.0)]
        length: f64,
        #[arg(long, default_value_t = 16)]
        n_modes: usize,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long)]
        dt: f64,
        #[arg(long = "T")]
        t_final: f64,
        /// Write every n-th node of the trajectory.
        #[arg(long, default_value_t = 1)]
        stride: usize,
        #[arg(long, default_value = "trapezoidal-cq")]
        scheme: String,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Quasilinear solve from a TOML or JSON config.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Optional CSV of the full modal trajectory.
        #[arg(long)]
        trajectory: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        stride: usize,
    },
    /// ε-sweep towards the singular limit. Exit code 0 if every verdict
    /// is match or above, 1 if any is below, 2 on failure.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        tag: Option<String>,
    },
}

#[derive(Subcommand)]
enum KernelCmd {
    /// K(t) and (K * 1)(t).
    Eval {
        #[arg(long)]
        kernel: KernelSpec,
        #[arg(long, num_args = 1.., required = true)]
        t: Vec<f64>,
    },
    /// Measure norm and ‖K * 1‖ on (0, T).
    Norms {
        #[arg(long)]
        kernel: KernelSpec,
        #[arg(long = "T", default_value_t = 1.0)]
        t_final: f64,
    },
    /// The ε → 0 limit kernel and the predicted rate.
    Limit {
        #[arg(long)]
        kernel: KernelSpec,
    },
    /// Slope of the closed-form kernel quantities over an ε grid.
    RateCheck {
        #[arg(long)]
        kernel: KernelSpec,
        #[arg(long = "T", default_value_t = 1.0)]
        t_final: f64,
        #[arg(long, num_args = 1.., default_values_t = [1e-3, 1e-4, 1e-5, 1e-6])]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 0.05)]
        tol: f64,
    },
}

fn print_json(v: &impl serde::Serialize) -> Result<()> {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{}", serde_json::to_string_pretty(v)?)?;
    Ok(())
}

fn parse_scheme(s: &str) -> Result<Scheme> {
    Ok(serde_json::from_value(json!(s)).with_context(|| format!("unknown scheme '{s}'"))?)
}

fn write_trajectory(path: &Path, traj: &Trajectory, stride: usize) -> Result<()> {
    if stride == 0 {
        bail!("stride must be at least 1");
    }
    let mut out = std::io::BufWriter::new(
        fs::File::create(path).with_context(|| format!("creating {}", path.display()))?,
    );
    let n = traj.xi.first().map_or(0, |x| x.len());
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain((1..=n).map(|i| format!("xi_{i}")))
        .collect();
    writeln!(out, "{}", header.join(","))?;
    for m in (0..traj.t_grid.len()).step_by(stride) {
        let row: Vec<String> = std::iter::once(traj.t_grid[m])
            .chain(traj.xi[m].iter().copied())
            .map(|v| format!("{v:e}"))
            .collect();
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    Ok(())
}

fn load_pde_config(path: &Path) -> Result<PDEConfig> {
    let src = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cfg = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&src)?
    } else {
        toml::from_str(&src).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?
    };
    Ok(cfg)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Mlf { a, b, x, regime } => {
            let regime = match regime.as_deref() {
                None => None,
                Some("series") => Some(Regime::Series),
                Some("contour") => Some(Regime::Contour),
                Some("asymptotic") => Some(Regime::Asymptotic),
                Some(r) => bail!("unknown regime '{r}'"),
            };
            let rows = x
                .iter()
                .map(|&x| {
                    let q = MlQuery::new(a, b, x)?;
                    let r = match regime {
                        Some(rg) => ml_eval_in(q, rg)?,
                        None => ml_eval(q)?,
                    };
                    Ok(json!({ "x": x, "value": r.value, "regime": r.regime, "est_abs_error": r.est_abs_error }))
                })
                .collect::<Result<Vec<_>>>()?;
            print_json(&rows)?;
        }
        Cmd::Kernel { cmd } => match cmd {
            KernelCmd::Eval { kernel, t } => {
                let rows = t
                    .iter()
                    .map(|&t| {
                        let k = match kernel {
                            KernelSpec::Dirac { .. } => None,
                            _ => Some(kernel.eval(t)?),
                        };
                        Ok(json!({ "t": t, "K": k, "K_conv_1": kernel.conv_one(t)? }))
                    })
                    .collect::<Result<Vec<_>>>()?;
                print_json(&rows)?;
            }
            KernelCmd::Norms { kernel, t_final } => print_json(&kernel.norms(t_final)?)?,
            KernelCmd::Limit { kernel } => {
                let limit = kernel.limit_kernel()?;
                print_json(&json!({
                    "kernel": kernel.to_string(),
                    "limit": limit.to_string(),
                    "predicted_rate": kernel.predicted_rate()?,
                }))?;
            }
            KernelCmd::RateCheck {
                kernel,
                t_final,
                eps,
                tol,
            } => {
                let fit = kernel_only_sweep(&kernel, &eps, t_final, tol)?;
                print_json(&fit)?;
                if !fit.verdict.is_consistent() {
                    return Ok(ExitCode::from(1));
                }
            }
        },
        Cmd::Verify { kernel, t_final, eps } => {
            let report = a1_report(&kernel, &eps, t_final)?;
            let reference = reference_constant(&kernel, t_final).ok();
            print_json(&json!({ "report": report, "reference_constant": reference }))?;
        }
        Cmd::SolveLinear {
            kernel,
            data,
            length,
            n_modes,
            c,
            dt,
            t_final,
            stride,
            scheme,
            out_dir,
        } => {
            let cfg = PDEConfig {
                c,
                k: 0.0,
                kernel,
                data,
                t_final,
                dt,
                n_modes,
                length,
                fp_tol: 1e-10,
                fp_max_iters: 1,
                relaxation: 1.0,
                scheme: parse_scheme(&scheme)?,
            };
            let res = solve(&cfg)?;
            fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
            write_trajectory(&out_dir.join("trajectory.csv"), &res.traj, stride)?;
            let summary = serde_json::to_string_pretty(&res.summary())? + "\n";
            let path = out_dir.join("summary.json");
            fs::write(&path, &summary).with_context(|| format!("writing {}", path.display()))?;
            std::io::stdout().lock().write_all(summary.as_bytes())?;
        }
        Cmd::Solve {
            config,
            trajectory,
            stride,
        } => {
            let cfg = load_pde_config(&config)?;
            let smallness = check_smallness(&cfg)?;
            let res = solve(&cfg)?;
            if let Some(p) = trajectory {
                write_trajectory(&p, &res.traj, stride)?;
            }
            print_json(&json!({ "summary": res.summary(), "smallness": smallness }))?;
        }
        Cmd::Sweep { config, jobs, tag } => {
            let mut cfg = SweepConfig::load(&config)?;
            if jobs.is_some() {
                cfg.jobs = jobs;
            }
            if tag.is_some() {
                cfg.tag = tag;
            }
            let (out, dir) = run_sweep(&cfg)?;
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            print_json(&json!({
                "dir": dir,
                "label": out.label,
                "slope": out.fit.slope,
                "predicted": out.fit.predicted,
                "verdict": out.fit.verdict,
                "bound_within_band": out.bounds.within_band,
            }))?;
            return Ok(ExitCode::from(exit_code(std::slice::from_ref(&out)) as u8));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        // a closed pipe (e.g. `| head`) is not a failure of the command
        Err(e)
            if e
                .downcast_ref::<std::io::Error>()
                .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
