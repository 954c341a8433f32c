//! ε-sweeps towards the singular limit: solve the family, measure the
//! energy-norm distance to the limit solution, fit log-log slopes and
//! compare them with the predicted rates and the kernel-norm bounds.

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::solver::{solve, PDEConfig, SolveResult};
use crate::volterra::{energy_norm, n_steps};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// Largest accepted `|slope - predicted|` for a "match" by default.
pub const DEFAULT_RATE_TOL: f64 = 0.15;
/// Allowed growth of err/bound as ε decreases.
pub const BOUND_BAND: f64 = 3.0;
/// Self-convergence error at the largest ε must stay below this fraction
/// of the ε-error.
pub const SELF_CONV_FRACTION: f64 = 0.1;
/// How many times the pre-check may halve dt before giving up.
pub const MAX_REFINEMENTS: usize = 2;

/// `10^{-1}, 10^{-1.5}, …, 10^{-3}`.
pub fn default_eps_list() -> Vec<f64> {
    (0..5).map(|i| 10f64.powf(-1.0 - 0.5 * i as f64)).collect()
}

fn default_rate_tol() -> f64 {
    DEFAULT_RATE_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitMode {
    /// Use [`KernelSpec::limit_kernel`].
    Auto,
    Explicit(KernelSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMode {
    /// `‖(K_ε - K_0) ∗ 1‖^{1/2}_{L¹(0,T)}`.
    SqrtConv1,
    /// `‖K_ε - K_0‖` as a measure on (0, T).
    Tv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub base: PDEConfig,
    #[serde(default = "default_eps_list")]
    pub eps_list: Vec<f64>,
    pub limit_mode: LimitMode,
    pub bound_mode: BoundMode,
    pub output_dir: PathBuf,
    #[serde(default = "default_rate_tol")]
    pub rate_tol: f64,
    /// Worker threads for the ε-solves; `None` uses the global pool.
    #[serde(default)]
    pub jobs: Option<usize>,
    /// Suffix of the run directory; a UNIX timestamp when absent.
    #[serde(default)]
    pub tag: Option<String>,
}

impl SweepConfig {
    pub fn from_toml_str(src: &str) -> Result<Self> {
        toml::from_str(src).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let src = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&src)
    }

    /// Checks the ε grid; returns warnings that do not stop a run.
    pub fn validate(&self) -> Result<Vec<String>> {
        self.base.validate()?;
        let e = &self.eps_list;
        if e.len() < 4 {
            return Err(Error::Config(format!(
                "eps_list needs at least 4 entries, got {}",
                e.len()
            )));
        }
        if e.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::Config("eps_list entries must be positive".into()));
        }
        if e.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::Config("eps_list must be strictly decreasing".into()));
        }
        if !(self.rate_tol > 0.0) {
            return Err(Error::Config("rate_tol must be positive".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        let mut warnings = Vec::new();
        let span = (e[0] / e[e.len() - 1]).log10();
        if span < 2.0 - 1e-12 {
            warnings.push(format!(
                "eps_list spans {span:.2} decades; slope fits need at least 2"
            ));
        }
        Ok(warnings)
    }

    fn limit_kernel(&self) -> Result<KernelSpec> {
        match &self.limit_mode {
            LimitMode::Auto => self.base.kernel.limit_kernel(),
            LimitMode::Explicit(k) => k.validated(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Match,
    Above,
    Below,
}

impl Verdict {
    /// Observed rates steeper than predicted are consistent with an upper
    /// bound.
    pub fn is_consistent(self) -> bool {
        self != Verdict::Below
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub pairs: Vec<(f64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub predicted: f64,
    pub verdict: Verdict,
}

/// Least squares of `log10 err` on `log10 ε`.
pub fn fit_rate(pairs: &[(f64, f64)], predicted: f64, tol: f64) -> Result<RateFit> {
    let pts: Vec<(f64, f64)> = pairs
        .iter()
        .filter(|(e, r)| *e > 0.0 && *r > 0.0)
        .map(|(e, r)| (e.log10(), r.log10()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::Sweep(
            "fewer than two positive (eps, error) pairs to fit".into(),
        ));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    let verdict = if (slope - predicted).abs() <= tol {
        Verdict::Match
    } else if slope > predicted {
        Verdict::Above
    } else {
        Verdict::Below
    };
    Ok(RateFit {
        pairs: pairs.to_vec(),
        slope,
        intercept,
        r_squared,
        predicted,
        verdict,
    })
}

/// The kernel-norm quantity bounding `‖u^ε - u^0‖_E` (up to a constant).
pub fn bound_quantity(kernel: &KernelSpec, limit: &KernelSpec, mode: BoundMode, t_final: f64) -> Result<f64> {
    if kernel == limit {
        return Ok(0.0);
    }
    if *limit != kernel.limit_kernel()? {
        return Err(Error::Unsupported(format!(
            "bounds are only available against the natural limit {}",
            kernel.limit_kernel()?
        )));
    }
    match mode {
        BoundMode::SqrtConv1 => Ok(kernel.diff_conv_one(t_final, 2)?.l1.sqrt()),
        BoundMode::Tv => kernel.tv_distance_to_limit(t_final),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub eps: f64,
    pub err: f64,
    pub bound: f64,
    /// `err / bound`; `None` when both vanish (an exact match).
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub rows: Vec<BoundRow>,
    /// The single constant C with err ≤ C·bound over the sweep.
    pub max_ratio: Option<f64>,
    /// `max ratio / min ratio`, reported only.
    pub band: Option<f64>,
    /// Largest ratio relative to the one at the largest ε. A ratio that
    /// falls as ε shrinks is still consistent with err ≤ C·bound.
    pub growth: Option<f64>,
    /// `growth ≤ 3`.
    pub within_band: bool,
    /// The ratio increases monotonically as ε decreases, by more than ×3.
    pub growing: bool,
}

pub fn bound_check(pairs: &[(f64, f64)], bounds: &[f64]) -> BoundCheck {
    let rows: Vec<BoundRow> = pairs
        .iter()
        .zip(bounds)
        .map(|(&(eps, err), &bound)| BoundRow {
            eps,
            err,
            bound,
            ratio: if bound == 0.0 && err == 0.0 {
                None
            } else {
                Some(err / bound)
            },
        })
        .collect();
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
    if ratios.is_empty() {
        return BoundCheck {
            rows,
            max_ratio: None,
            band: None,
            growth: None,
            within_band: true,
            growing: false,
        };
    }
    let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let band = max / min;
    // rows follow the ε list, which decreases
    let monotone_up = ratios.windows(2).all(|w| w[1] >= w[0]);
    let growth = max / ratios[0];
    BoundCheck {
        rows,
        max_ratio: Some(max),
        band: Some(band),
        growth: Some(growth),
        within_band: growth.is_finite() && growth <= BOUND_BAND,
        growing: monotone_up && ratios[ratios.len() - 1] / ratios[0] > BOUND_BAND,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfConvergence {
    pub dt: f64,
    /// Distance between the dt and dt/2 runs at the largest ε.
    pub self_err: f64,
    /// ‖u^ε - u^0‖_E at the largest ε.
    pub eps_err: f64,
    pub refinements: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub label: String,
    pub kernel: KernelSpec,
    pub limit: KernelSpec,
    pub bound_mode: BoundMode,
    pub fit: RateFit,
    pub bounds: BoundCheck,
    pub self_convergence: SelfConvergence,
    /// err(ε) never rises by more than 5% as ε decreases (diagnostic only).
    pub monotone: bool,
    pub warnings: Vec<String>,
}

fn with_kernel(base: &PDEConfig, kernel: KernelSpec, dt: f64) -> PDEConfig {
    PDEConfig {
        kernel,
        dt,
        ..base.clone()
    }
}

fn distance(a: &SolveResult, b: &SolveResult) -> Result<f64> {
    let sa = a.traj.t_grid.len() - 1;
    let sb = b.traj.t_grid.len() - 1;
    let (fine, coarse) = if sa >= sb { (a, b) } else { (b, a) };
    if sa.max(sb) % sa.min(sb) != 0 {
        return Err(Error::Sweep("time grids are not nested".into()));
    }
    let f = fine.traj.subsample(sa.max(sb) / sa.min(sb));
    Ok(energy_norm(&f.diff(&coarse.traj)?, &coarse.basis))
}

/// Runs the sweep and the self-convergence pre-check; no files are written.
pub fn run_sweep_in_memory(cfg: &SweepConfig) -> Result<SweepOutcome> {
    let warnings = cfg.validate()?;
    let limit = cfg.limit_kernel()?;
    let predicted = cfg.base.kernel.predicted_rate()?;
    let t_final = cfg.base.t_final;
    let kernels: Vec<KernelSpec> = cfg
        .eps_list
        .iter()
        .map(|&e| cfg.base.kernel.with_eps(e))
        .collect::<Result<_>>()?;

    // pick dt: self-convergence at the largest ε well below its ε-error
    let mut dt = cfg.base.dt;
    let mut refinements = 0;
    let (limit_sol, self_conv) = loop {
        n_steps(t_final, dt)?;
        let limit_sol = solve(&with_kernel(&cfg.base, limit, dt))
            .map_err(|e| Error::Sweep(format!("limit solve failed: {e}")))?;
        let coarse = solve(&with_kernel(&cfg.base, kernels[0], dt))
            .map_err(|e| Error::Sweep(format!("eps = {} failed: {e}", cfg.eps_list[0])))?;
        let fine = solve(&with_kernel(&cfg.base, kernels[0], dt / 2.0))
            .map_err(|e| Error::Sweep(format!("eps = {} failed: {e}", cfg.eps_list[0])))?;
        let self_err = distance(&fine, &coarse)?;
        let eps_err = distance(&coarse, &limit_sol)?;
        let sc = SelfConvergence {
            dt,
            self_err,
            eps_err,
            refinements,
        };
        if self_err <= SELF_CONV_FRACTION * eps_err {
            break (limit_sol, sc);
        }
        if refinements == MAX_REFINEMENTS {
            return Err(Error::Sweep(format!(
                "self-convergence error {self_err:e} exceeds {SELF_CONV_FRACTION} x eps-error {eps_err:e} at dt = {dt}"
            )));
        }
        dt /= 2.0;
        refinements += 1;
    };

    let solve_all = || -> Vec<Result<f64>> {
        kernels
            .par_iter()
            .map(|k| solve(&with_kernel(&cfg.base, *k, dt)).and_then(|s| distance(&s, &limit_sol)))
            .collect()
    };
    let errs = match cfg.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Error::Sweep(format!("thread pool: {e}")))?
            .install(solve_all),
        None => solve_all(),
    };
    let mut failed = Vec::new();
    let mut pairs = Vec::new();
    for (eps, r) in cfg.eps_list.iter().zip(errs) {
        match r {
            Ok(e) => pairs.push((*eps, e)),
            Err(e) => failed.push(format!("eps = {eps}: {e}")),
        }
    }
    if !failed.is_empty() {
        return Err(Error::Sweep(failed.join("; ")));
    }
    let bounds: Vec<f64> = kernels
        .iter()
        .map(|k| bound_quantity(k, &limit, cfg.bound_mode, t_final))
        .collect::<Result<_>>()?;
    let fit = fit_rate(&pairs, predicted, cfg.rate_tol)?;
    let monotone = pairs.windows(2).all(|w| w[1].1 <= 1.05 * w[0].1);
    Ok(SweepOutcome {
        monotone,
        label: cfg.base.kernel.label(),
        kernel: cfg.base.kernel,
        limit,
        bound_mode: cfg.bound_mode,
        bounds: bound_check(&pairs, &bounds),
        fit,
        self_convergence: self_conv,
        warnings,
    })
}

/// Runs the sweep and writes its artifacts to
/// `output_dir/<label>_<tag>/`; returns the outcome and that directory.
pub fn run_sweep(cfg: &SweepConfig) -> Result<(SweepOutcome, PathBuf)> {
    let out = run_sweep_in_memory(cfg)?;
    let tag = match &cfg.tag {
        Some(t) => t.clone(),
        None => std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs().to_string())
            .unwrap_or_else(|_| "0".into()),
    };
    let dir = cfg.output_dir.join(format!("{}_{tag}", out.label));
    write_artifacts(&out, &dir)?;
    emit_report(std::slice::from_ref(&out), &dir)?;
    Ok((out, dir))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// `results.csv` with columns eps, err_E, bound, log10_eps, log10_err.
pub fn results_csv(out: &SweepOutcome) -> String {
    let mut s = String::from("eps,err_E,bound,log10_eps,log10_err\n");
    for row in &out.bounds.rows {
        let _ = writeln!(
            s,
            "{:e},{:e},{:e},{:e},{:e}",
            row.eps,
            row.err,
            row.bound,
            row.eps.log10(),
            row.err.log10()
        );
    }
    s
}

#[derive(Serialize)]
struct FitJson<'a> {
    slope: f64,
    intercept: f64,
    r_squared: f64,
    predicted: f64,
    verdict: Verdict,
    bound_max_ratio: Option<f64>,
    bound_band: Option<f64>,
    bound_growth: Option<f64>,
    bound_within_band: bool,
    monotone: bool,
    self_convergence: &'a SelfConvergence,
}

pub fn write_artifacts(out: &SweepOutcome, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;
    write_file(&dir.join("results.csv"), &results_csv(out))?;
    let fit = FitJson {
        slope: out.fit.slope,
        intercept: out.fit.intercept,
        r_squared: out.fit.r_squared,
        predicted: out.fit.predicted,
        verdict: out.fit.verdict,
        bound_max_ratio: out.bounds.max_ratio,
        bound_band: out.bounds.band,
        bound_growth: out.bounds.growth,
        bound_within_band: out.bounds.within_band,
        monotone: out.monotone,
        self_convergence: &out.self_convergence,
    };
    let json = serde_json::to_string_pretty(&fit).map_err(|e| Error::Sweep(e.to_string()))?;
    write_file(&dir.join("fit.json"), &(json + "\n"))?;
    write_file(&dir.join("plot.gp"), &plot_script(out))
}

fn plot_script(out: &SweepOutcome) -> String {
    let f = &out.fit;
    format!(
        "set datafile separator ','\n\
         set logscale xy\n\
         set xlabel 'eps'\n\
         set ylabel 'energy-norm error'\n\
         set key left top\n\
         set title '{label}: slope {slope:.3} (predicted {pred})'\n\
         fit_line(x) = 10**({icpt:e}) * x**({slope:e})\n\
         plot 'results.csv' skip 1 using 1:2 with linespoints title 'err', \\\n     \
         fit_line(x) title 'least-squares fit'\n",
        label = out.label,
        slope = f.slope,
        pred = f.predicted,
        icpt = f.intercept,
    )
}

/// Which limit estimate a sweep reproduces.
fn estimate_name(k: &KernelSpec) -> &'static str {
    match k.ml_shape() {
        _ if matches!(k, KernelSpec::Abel { .. } | KernelSpec::Dirac { .. }) => {
            "vanishing-kernel limit, rate eps"
        }
        Some((a, b, _, _)) if a <= b => "limit with fixed tau_theta, rate eps^(a/2)",
        Some(_) => "limit with fixed ratio tau_theta/eps, rate eps^((a-b)/2)",
        None => "no eps dependence",
    }
}

/// Writes `report.md` with one section per sweep, sorted by label.
pub fn emit_report(outcomes: &[SweepOutcome], dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let path = dir.join("report.md");
    write_file(&path, &render_report(outcomes))?;
    Ok(path)
}

pub fn render_report(outcomes: &[SweepOutcome]) -> String {
    let mut s = String::from("# Singular-limit sweeps\n\n");
    if outcomes.is_empty() {
        s.push_str("No runs.\n");
        return s;
    }
    let mut sorted: Vec<&SweepOutcome> = outcomes.iter().collect();
    sorted.sort_by(|a, b| a.label.cmp(&b.label));
    for o in sorted {
        let f = &o.fit;
        let _ = writeln!(s, "## {}\n", o.label);
        let _ = writeln!(s, "- kernel: `{}`", o.kernel);
        let _ = writeln!(s, "- limit kernel: `{}`", o.limit);
        let _ = writeln!(s, "- estimate: {}", estimate_name(&o.kernel));
        let _ = writeln!(
            s,
            "- slope {:.4} (predicted {}, R² {:.4}), verdict: {}",
            f.slope,
            f.predicted,
            f.r_squared,
            serde_json::to_string(&f.verdict).unwrap_or_default().trim_matches('"')
        );
        let _ = writeln!(
            s,
            "- self-convergence at dt = {}: {:.3e} vs eps-error {:.3e}",
            o.self_convergence.dt, o.self_convergence.self_err, o.self_convergence.eps_err
        );
        for w in &o.warnings {
            let _ = writeln!(s, "- warning: {w}");
        }
        let _ = writeln!(s, "\n| eps | err_E | bound | err/bound |\n|---|---|---|---|");
        for r in &o.bounds.rows {
            let ratio = r.ratio.map_or("exact".to_string(), |v| format!("{v:.4e}"));
            let _ = writeln!(s, "| {:e} | {:.4e} | {:.4e} | {ratio} |", r.eps, r.err, r.bound);
        }
        let _ = writeln!(
            s,
            "\nerr/bound spread {}, growth {} ({}); err monotone in eps: {}\n",
            o.bounds.band.map_or("n/a".into(), |b| format!("{b:.3}")),
            o.bounds.growth.map_or("n/a".into(), |b| format!("{b:.3}")),
            if o.bounds.within_band { "within x3" } else { "outside x3" },
            if o.monotone { "yes" } else { "no" }
        );
    }
    s
}

/// Process exit code for a set of sweeps: 0 if every verdict is match or
/// above, 1 otherwise.
pub fn exit_code(outcomes: &[SweepOutcome]) -> i32 {
    if outcomes.iter().all(|o| o.fit.verdict.is_consistent()) {
        0
    } else {
        1
    }
}

/// Slopes of the closed-form kernel quantities themselves (no PDE solve):
/// `‖(K_ε - K_0) ∗ 1‖_{L¹}` when the limit is nonzero (expected slope a),
/// `‖K_ε ∗ 1‖_{L¹}` when it vanishes (a - b for fixed-ratio ML, 1 for
/// Abel and point-mass kernels).
pub fn kernel_only_sweep(kernel: &KernelSpec, eps_list: &[f64], t_final: f64, tol: f64) -> Result<RateFit> {
    let limit = kernel.limit_kernel()?;
    let predicted = match kernel.ml_shape() {
        _ if matches!(kernel, KernelSpec::Abel { .. } | KernelSpec::Dirac { .. }) => 1.0,
        Some((a, b, _, _)) if a <= b => a,
        Some((a, b, _, _)) => a - b,
        None => {
            return Err(Error::Unsupported(format!("{kernel} does not depend on eps")));
        }
    };
    let pairs = eps_list
        .iter()
        .map(|&e| {
            let k = kernel.with_eps(e)?;
            let q = if limit == KernelSpec::Zero {
                k.antiderivative(2, t_final)?
            } else {
                k.diff_conv_one(t_final, 2)?.l1
            };
            Ok((e, q))
        })
        .collect::<Result<Vec<_>>>()?;
    fit_rate(&pairs, predicted, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_fit() {
        let pairs: Vec<(f64, f64)> = [1e-1, 1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&e: &f64| (e, 3.0 * e.powf(0.7)))
            .collect();
        let f = fit_rate(&pairs, 0.5, 0.15).unwrap();
        assert!((f.slope - 0.7).abs() < 1e-12);
        assert!((f.intercept - 3f64.log10()).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(f.verdict, Verdict::Above);
        assert_eq!(fit_rate(&pairs, 0.7, 0.15).unwrap().verdict, Verdict::Match);
        assert_eq!(fit_rate(&pairs, 0.9, 0.15).unwrap().verdict, Verdict::Below);
    }

    #[test]
    fn zero_against_zero_is_exact() {
        let b = bound_check(&[(0.1, 0.0), (0.01, 0.0)], &[0.0, 0.0]);
        assert!(b.rows.iter().all(|r| r.ratio.is_none()));
        assert!(b.within_band && !b.growing);
        let k = KernelSpec::Zero;
        assert_eq!(bound_quantity(&k, &k, BoundMode::Tv, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn growing_ratio_flagged() {
        let pairs = [(1e-1, 1.0), (1e-2, 1.0), (1e-3, 1.0), (1e-4, 1.0)];
        let b = bound_check(&pairs, &[1.0, 0.5, 0.2, 0.1]);
        assert!(b.growing && !b.within_band);
        assert_eq!(b.band, Some(10.0));
        // a falling ratio is fine
        let b = bound_check(&pairs, &[0.1, 0.2, 0.5, 1.0]);
        assert!(!b.growing && b.within_band);
        assert_eq!(b.growth, Some(1.0));
    }

    #[test]
    fn empty_report_says_no_runs() {
        assert!(render_report(&[]).contains("No runs."));
    }

    #[test]
    fn eps_list_checks() {
        let base: PDEConfig = toml::from_str(
            r#"
            c = 1.0
            k = 0.1
            T = 0.5
            dt = 0.01
            n_modes = 8
            fp_tol = 1e-9
            fp_max_iters = 20
            kernel = { family = "abel", alpha = 0.5, eps = 0.1, tau_theta = 1.0 }
            data = { preset = "small-gauss-modes", amplitude = 0.1 }
        "#,
        )
        .unwrap();
        let mut cfg = SweepConfig {
            base,
            eps_list: default_eps_list(),
            limit_mode: LimitMode::Auto,
            bound_mode: BoundMode::Tv,
            output_dir: "out".into(),
            rate_tol: 0.15,
            jobs: None,
            tag: None,
        };
        assert!(cfg.validate().unwrap().is_empty());
        cfg.eps_list = vec![0.1, 0.05, 0.03, 0.02];
        assert_eq!(cfg.validate().unwrap().len(), 1);
        cfg.eps_list = vec![0.1, 0.01, 0.001];
        assert!(cfg.validate().is_err());
        cfg.eps_list = vec![0.1, 0.01, 0.02, 0.001];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn exponential_kernel_only_slope() {
        // ‖(K_ε - δ₀) ∗ 1‖_{L¹} = ε(1 - e^{-T/ε}) exactly
        let k = KernelSpec::exponential(0.1).unwrap();
        let f = kernel_only_sweep(&k, &[1e-2, 1e-3, 1e-4, 1e-5], 1.0, 0.05).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-6);
        assert_eq!(f.verdict, Verdict::Match);
    }
}
