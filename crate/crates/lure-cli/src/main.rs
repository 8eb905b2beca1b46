//! Command-line front end for the certification library.
//!
//! Subcommands: `certify`, `scan`, `simulate`, `zerodyn`, `report`.
//! Exit codes: 0 = certified / success, 1 = not certified, 2 = usage or
//! configuration error. Every report embeds the tool version and the
//! full resolved parameter set; identical scenario + seed produce
//! byte-identical CSV output.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use lure_core::linalg::RVec;
use lure_core::matio;
use lure_core::{
    certify, circle_bound, estimate_decay_rate, fdi_coefficients, fdi_grid_check,
    make_nonlinearity, optimal_linear_rate, popov_ti_bound, quartic_nonneg, simulate_hamiltonian,
    zero_dynamics, FdiCriterion, FdiInputs, GridSpec, HalfPlane, LtiSystem, OscillatorParams,
    SupplyRate, TheoremId,
};

const TOOL_NAME: &str = "lure";
const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = TOOL_NAME, version, about = "Exponential-stability certification for Lur'e feedback loops")]
struct Cli {
    /// Output directory (overrides LURE_OUT_DIR; default ".").
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// RNG seed override for simulation initial conditions.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Frequency-grid points per half-axis for raw FDI checks.
    #[arg(long, global = true)]
    grid_points: Option<usize>,
    /// Bisection tolerance for scanned supremal widths.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the theorem dispatch (or a raw FDI grid check) on a scenario.
    Certify {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Sweep one criterion parameter and emit a feasibility CSV.
    Scan(ScanArgs),
    /// Integrate a scenario's closed loop and fit decay rates.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Zero dynamics of a state-space system read from a matrix file.
    Zerodyn {
        #[arg(long)]
        system: PathBuf,
    },
    /// Validate a scenario and print its fully resolved parameters.
    Report {
        #[arg(long)]
        scenario: PathBuf,
    },
}

#[derive(Args)]
struct ScanArgs {
    /// circle | popov_ti | quasi_lambda0 | quasi_lambda1 | tau
    #[arg(long)]
    criterion: String,
    #[arg(long)]
    min: f64,
    #[arg(long)]
    max: f64,
    #[arg(long)]
    steps: usize,
    #[arg(long)]
    m: f64,
    #[arg(long)]
    sigma: f64,
    #[arg(long)]
    r: f64,
    #[arg(long, default_value_t = 0.0)]
    tau: f64,
    /// Fixed sector width for criteria whose scan variable is not l.
    #[arg(long)]
    l: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    #[arg(long, default_value_t = 0.0)]
    nu: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let out_dir = resolve_out_dir(cli.out.as_deref());
    let result = match &cli.cmd {
        Cmd::Certify { scenario } => cmd_certify(scenario, &out_dir, &cli),
        Cmd::Scan(args) => cmd_scan(args, &out_dir, &cli),
        Cmd::Simulate { scenario } => cmd_simulate(scenario, &out_dir, &cli),
        Cmd::Zerodyn { system } => cmd_zerodyn(system, &out_dir),
        Cmd::Report { scenario } => cmd_report(scenario),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn resolve_out_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Ok(env) = std::env::var("LURE_OUT_DIR") {
        if !env.is_empty() {
            return PathBuf::from(env);
        }
    }
    PathBuf::from(".")
}

fn write_output(dir: &Path, file: &str, content: &str) -> Result<PathBuf, String> {
    fs::create_dir_all(dir).map_err(|e| format!("cannot create output directory: {e}"))?;
    let path = dir.join(file);
    fs::write(&path, content).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    Ok(path)
}

fn tool_stamp() -> Value {
    json!({ "name": TOOL_NAME, "version": TOOL_VERSION })
}

// ---------------------------------------------------------------------------
// Scenario files
// ---------------------------------------------------------------------------

/// Flat key-value scenario grammar (TOML). `mode` selects between the
/// oscillator theorem dispatch ("theorem", default) and a raw FDI grid
/// check on matrices loaded from `system_file` ("raw_fdi").
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: String,
    mode: Option<String>,
    // theorem mode
    theorem: Option<String>,
    d: Option<usize>,
    m: Option<f64>,
    l: Option<toml::Value>,
    sigma: Option<f64>,
    tau: Option<f64>,
    r: Option<f64>,
    // raw_fdi mode
    system_file: Option<String>,
    rate_shift: Option<f64>,
    half_plane: Option<String>,
    // simulation settings
    nonlinearity: Option<String>,
    nonlinearity_m: Option<f64>,
    nonlinearity_l: Option<toml::Value>,
    dt: Option<f64>,
    t_final: Option<f64>,
    n_initial_conditions: Option<usize>,
    ic_radius: Option<f64>,
    fit_start: Option<f64>,
    fit_end: Option<f64>,
    seed: Option<u64>,
}

struct Scenario {
    name: String,
    mode: String,
    file: ScenarioFile,
    base_dir: PathBuf,
}

fn load_scenario(path: &Path) -> Result<Scenario, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read scenario {}: {e}", path.display()))?;
    let file: ScenarioFile =
        toml::from_str(&text).map_err(|e| format!("malformed scenario {}: {e}", path.display()))?;
    let mode = file.mode.clone().unwrap_or_else(|| "theorem".into());
    if mode != "theorem" && mode != "raw_fdi" {
        return Err(format!("unknown mode {mode:?} (expected \"theorem\" or \"raw_fdi\")"));
    }
    Ok(Scenario {
        name: file.name.clone(),
        mode,
        file,
        base_dir: path.parent().unwrap_or_else(|| Path::new(".")).to_path_buf(),
    })
}

/// Sector widths may be a number or the string "inf".
fn parse_width(v: Option<&toml::Value>, default: f64) -> Result<f64, String> {
    match v {
        None => Ok(default),
        Some(toml::Value::Float(x)) => Ok(*x),
        Some(toml::Value::Integer(n)) => Ok(*n as f64),
        Some(toml::Value::String(s)) if s.eq_ignore_ascii_case("inf") => Ok(f64::INFINITY),
        Some(other) => Err(format!("sector width must be a number or \"inf\", got {other}")),
    }
}

fn require_field<T: Copy>(v: Option<T>, name: &str) -> Result<T, String> {
    v.ok_or_else(|| format!("scenario is missing required key `{name}`"))
}

fn oscillator_params(sc: &Scenario) -> Result<OscillatorParams, String> {
    let f = &sc.file;
    let m = require_field(f.m, "m")?;
    let sigma = require_field(f.sigma, "sigma")?;
    let r = require_field(f.r, "r")?;
    let l = parse_width(f.l.as_ref(), f64::INFINITY)?;
    let tau = f.tau.unwrap_or(0.0);
    let d = f.d.unwrap_or(1);
    OscillatorParams::new(d, m, l, sigma, tau, r).map_err(|e| format!("invalid parameters: {e}"))
}

fn json_width(l: f64) -> Value {
    if l.is_finite() {
        json!(l)
    } else {
        json!("inf")
    }
}

fn resolved_params_json(sc: &Scenario, p: Option<&OscillatorParams>) -> Value {
    let f = &sc.file;
    let mut obj = json!({
        "name": sc.name,
        "mode": sc.mode,
    });
    if let Some(p) = p {
        obj["oscillator"] = json!({
            "d": p.d, "m": p.m, "l": json_width(p.l),
            "sigma": p.sigma, "tau": p.tau, "r": p.r,
        });
    }
    if let Some(t) = &f.theorem {
        obj["theorem"] = json!(t);
    }
    if let Some(sf) = &f.system_file {
        obj["system_file"] = json!(sf);
        obj["rate_shift"] = json!(f.rate_shift.unwrap_or(0.0));
        obj["half_plane"] = json!(f.half_plane.clone().unwrap_or_else(|| "axis".into()));
    }
    if let Some(nl) = &f.nonlinearity {
        obj["simulation"] = json!({
            "nonlinearity": nl,
            "nonlinearity_m": f.nonlinearity_m.unwrap_or(f.m.unwrap_or(f64::NAN)),
            "nonlinearity_l": json_width(
                parse_width(f.nonlinearity_l.as_ref(), f64::INFINITY).unwrap_or(f64::NAN)
            ),
            "dt": f.dt.unwrap_or(1e-3),
            "t_final": f.t_final.unwrap_or(20.0),
            "n_initial_conditions": f.n_initial_conditions.unwrap_or(10),
            "ic_radius": f.ic_radius.unwrap_or(1.0),
            "fit_window": [f.fit_start.unwrap_or(0.1), f.fit_end.unwrap_or(0.9)],
            "seed": f.seed.unwrap_or(0),
        });
    }
    obj
}

// ---------------------------------------------------------------------------
// certify
// ---------------------------------------------------------------------------

fn cmd_certify(path: &Path, out_dir: &Path, cli: &Cli) -> Result<u8, String> {
    let sc = load_scenario(path)?;
    if sc.mode == "raw_fdi" {
        return certify_raw_fdi(&sc, out_dir, cli);
    }
    let params = oscillator_params(&sc)?;
    let theorem_name = sc
        .file
        .theorem
        .clone()
        .ok_or_else(|| "scenario is missing required key `theorem`".to_string())?;
    let theorem = TheoremId::parse(&theorem_name).map_err(|e| e.to_string())?;
    let cert = certify(&params, theorem).map_err(|e| e.to_string())?;
    let report = json!({
        "tool": tool_stamp(),
        "parameters": resolved_params_json(&sc, Some(&params)),
        "certificate": cert.to_json(),
    });
    let file = format!("{}.certificate.json", sc.name);
    let written = write_output(out_dir, &file, &format!("{:#}\n", report))?;
    println!(
        "{}: theorem {} verdict {} (bound_L = {}) -> {}",
        sc.name,
        cert.theorem_id.as_str(),
        if cert.certified() { "certified" } else { "hypotheses_violated" },
        if cert.bound_l.is_finite() { format!("{:.9e}", cert.bound_l) } else { "inf".into() },
        written.display()
    );
    Ok(if cert.certified() { 0 } else { 1 })
}

fn certify_raw_fdi(sc: &Scenario, out_dir: &Path, cli: &Cli) -> Result<u8, String> {
    let f = &sc.file;
    let rel = f
        .system_file
        .as_ref()
        .ok_or_else(|| "raw_fdi mode needs `system_file`".to_string())?;
    let file_path = sc.base_dir.join(rel);
    let text = fs::read_to_string(&file_path)
        .map_err(|e| format!("cannot read {}: {e}", file_path.display()))?;
    let mats = matio::parse_matrices(&text).map_err(|e| e.to_string())?;
    let a = matio::require(&mats, "A").map_err(|e| e.to_string())?;
    let b = matio::require(&mats, "B").map_err(|e| e.to_string())?;
    let c = matio::require(&mats, "C").map_err(|e| e.to_string())?;
    let sys = match mats.get("D") {
        Some(d) => LtiSystem::from_real(a, b, c, d),
        None => LtiSystem::from_real_abc(a, b, c),
    }
    .map_err(|e| e.to_string())?;
    let q = matio::require(&mats, "Q").map_err(|e| e.to_string())?;
    let s = matio::require(&mats, "S").map_err(|e| e.to_string())?;
    let r = matio::require(&mats, "R").map_err(|e| e.to_string())?;
    let supply = SupplyRate::from_real(q, s, r).map_err(|e| e.to_string())?;
    let half_plane = match f.half_plane.as_deref().unwrap_or("axis") {
        "axis" => HalfPlane::AxisOnly,
        "closed_right" => HalfPlane::ClosedRight,
        other => return Err(format!("unknown half_plane {other:?}")),
    };
    let grid = match cli.grid_points {
        Some(n) => GridSpec::with_points(n),
        None => GridSpec::default(),
    };
    let rate_shift = f.rate_shift.unwrap_or(0.0);
    let report = fdi_grid_check(&sys, &supply, rate_shift, &grid, half_plane)
        .map_err(|e| e.to_string())?;
    let csv_path = write_output(out_dir, &format!("{}.fdi.csv", sc.name), &report.to_csv())?;
    let summary = json!({
        "tool": tool_stamp(),
        "parameters": resolved_params_json(sc, None),
        "fdi": {
            "feasible": report.feasible,
            "min_value": report.min_value,
            "worst_frequency": report.worst_frequency,
            "skipped_pole_count": report.skipped_pole_count,
            "tolerance": report.tol_fdi,
            "necessary_condition_only": report.necessary_only,
            "curve_csv": csv_path.display().to_string(),
        },
    });
    let written = write_output(out_dir, &format!("{}.fdi.json", sc.name), &format!("{:#}\n", summary))?;
    println!(
        "{}: FDI {} (min eigenvalue {:.6e} at omega = {:.6e}) -> {}",
        sc.name,
        if report.feasible { "feasible" } else { "infeasible" },
        report.min_value,
        report.worst_frequency,
        written.display()
    );
    Ok(if report.feasible { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// scan
// ---------------------------------------------------------------------------

fn grid_values(min: f64, max: f64, steps: usize) -> Result<Vec<f64>, String> {
    if steps == 0 || max < min || !min.is_finite() || !max.is_finite() {
        return Err(format!("empty scan range: min = {min}, max = {max}, steps = {steps}"));
    }
    if steps == 1 {
        return Ok(vec![min]);
    }
    Ok((0..steps).map(|i| min + (max - min) * i as f64 / (steps - 1) as f64).collect())
}

/// Supremal feasible width in `l` at otherwise fixed inputs, by
/// doubling then bisection on the quartic nonnegativity condition.
fn sup_feasible_width(
    criterion: FdiCriterion,
    base: &FdiInputs,
    tol: f64,
) -> Result<f64, String> {
    let feasible = |l: f64| -> Result<bool, String> {
        let inp = FdiInputs { l, ..*base };
        let cf = fdi_coefficients(criterion, &inp).map_err(|e| e.to_string())?;
        quartic_nonneg(&cf).map_err(|e| e.to_string())
    };
    if !feasible(1e-12)? {
        return Ok(0.0);
    }
    let mut lo = 1e-12;
    let mut hi = 1.0;
    let cap = 1e12;
    while feasible(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > cap {
            return Ok(f64::INFINITY);
        }
    }
    while hi - lo > tol * (1.0 + lo) {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn cmd_scan(args: &ScanArgs, out_dir: &Path, cli: &Cli) -> Result<u8, String> {
    let criterion = FdiCriterion::parse(&args.criterion).map_err(|e| e.to_string())?;
    let points = grid_values(args.min, args.max, args.steps)?;
    let tol = cli.tol.unwrap_or(1e-10);
    let base = FdiInputs {
        m: args.m,
        sigma: args.sigma,
        r: args.r,
        tau: args.tau,
        l: args.l.unwrap_or(f64::INFINITY),
        lambda: 1.0,
        mu: args.mu,
        nu: args.nu,
    };
    let mut csv = String::from("param,beta,gamma,feasible,closed_form_bound\n");
    for &p in &points {
        let (inputs, bound) = match criterion {
            // scan variable: l. Bound column: closed-form supremal width.
            FdiCriterion::Circle33 => (
                FdiInputs { l: p, mu: 0.0, nu: 0.0, ..base },
                circle_bound(args.m, args.sigma, args.r).map_err(|e| e.to_string())?,
            ),
            // scan variable: mu. Bound column: supremal width at this mu.
            FdiCriterion::PopovTi34 => {
                let at_mu = FdiInputs { mu: p, nu: 0.0, ..base };
                let w = sup_feasible_width(criterion, &at_mu, tol)?;
                (FdiInputs { l: w, ..at_mu }, w)
            }
            // scan variable: mu (lambda = 0 branch). Bound column as above.
            FdiCriterion::Quasi35Lambda0 => {
                let at_mu = FdiInputs { lambda: 0.0, mu: p, nu: 0.0, ..base };
                let w = sup_feasible_width(criterion, &at_mu, tol)?;
                (FdiInputs { l: w, ..at_mu }, w)
            }
            // scan variable: l at fixed (mu, nu). Bound column: supremal width.
            FdiCriterion::Quasi35Lambda1 => {
                let w = sup_feasible_width(criterion, &base, tol)?;
                (FdiInputs { l: p, ..base }, w)
            }
            // scan variable: tau. Bound column: minimax-optimal tau.
            FdiCriterion::Tau36 => {
                let (_, tau_star) =
                    optimal_linear_rate(args.m, args.sigma).map_err(|e| e.to_string())?;
                (FdiInputs { tau: p, ..base }, tau_star)
            }
        };
        let cf = fdi_coefficients(criterion, &inputs).map_err(|e| e.to_string())?;
        let ok = quartic_nonneg(&cf).map_err(|e| e.to_string())?;
        csv.push_str(&format!(
            "{:.17e},{:.17e},{:.17e},{},{:.17e}\n",
            p,
            cf.beta,
            cf.gamma,
            u8::from(ok),
            bound
        ));
    }
    let written = write_output(out_dir, &format!("{}_scan.csv", criterion.as_str()), &csv)?;
    println!(
        "scan {}: {} points over [{:.6e}, {:.6e}] -> {}",
        criterion.as_str(),
        points.len(),
        args.min,
        args.max,
        written.display()
    );
    if criterion == FdiCriterion::PopovTi34 {
        let (l_star, mu_star) =
            popov_ti_bound(args.m, args.sigma, args.r).map_err(|e| e.to_string())?;
        println!("closed form: l_star = {l_star:.9e} at mu_star = {mu_star:.9e}");
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn cmd_simulate(path: &Path, out_dir: &Path, cli: &Cli) -> Result<u8, String> {
    let sc = load_scenario(path)?;
    if sc.mode != "theorem" {
        return Err("simulate requires a theorem-mode scenario".into());
    }
    let f = &sc.file;
    let params = oscillator_params(&sc)?;
    let kind = f
        .nonlinearity
        .clone()
        .ok_or_else(|| "scenario is missing required key `nonlinearity`".to_string())?;
    let nl_m = f.nonlinearity_m.unwrap_or(params.m);
    let nl_l = parse_width(f.nonlinearity_l.as_ref(), params.l)?;
    let phi = make_nonlinearity(&kind, nl_m, nl_l).map_err(|e| e.to_string())?;
    let dt = f.dt.unwrap_or(1e-3);
    let t_final = f.t_final.unwrap_or(20.0);
    let n_ic = f.n_initial_conditions.unwrap_or(10);
    let radius = f.ic_radius.unwrap_or(1.0);
    let window = (f.fit_start.unwrap_or(0.1), f.fit_end.unwrap_or(0.9));
    let seed = cli.seed.or(f.seed).unwrap_or(0);

    let certificate = match &f.theorem {
        Some(t) => {
            let theorem = TheoremId::parse(t).map_err(|e| e.to_string())?;
            Some(certify(&params, theorem).map_err(|e| e.to_string())?)
        }
        None => None,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 2 * params.d;
    let mut runs = Vec::new();
    let mut r_hat_min = f64::INFINITY;
    for i in 0..n_ic {
        let v = RVec::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0));
        let scale = radius * rng.gen_range(0.5..1.0);
        let z0 = if v.norm() > 0.0 { &v / v.norm() * scale } else { RVec::zeros(dim) };
        let traj =
            simulate_hamiltonian(&params, &phi, &z0, t_final, dt).map_err(|e| e.to_string())?;
        let csv_name = format!("{}_traj_{i}.csv", sc.name);
        write_output(out_dir, &csv_name, &traj.to_csv(None))?;
        let est = estimate_decay_rate(&traj, Some(window)).map_err(|e| e.to_string())?;
        r_hat_min = r_hat_min.min(est.r_hat);
        runs.push(json!({
            "initial_condition": z0.iter().cloned().collect::<Vec<f64>>(),
            "trajectory_csv": csv_name,
            "r_hat": est.r_hat,
            "fit_window": [est.fit_window.0, est.fit_window.1],
            "residual": est.residual,
            "amplitude_c": est.amplitude_c,
        }));
    }
    let summary = json!({
        "tool": tool_stamp(),
        "parameters": resolved_params_json(&sc, Some(&params)),
        "certificate": certificate.as_ref().map(|c| c.to_json()),
        "r_hat_min": r_hat_min,
        "runs": runs,
    });
    let written = write_output(out_dir, &format!("{}.rates.json", sc.name), &format!("{:#}\n", summary))?;
    println!(
        "{}: {} trajectories, r_hat_min = {:.9e} -> {}",
        sc.name,
        n_ic,
        r_hat_min,
        written.display()
    );
    Ok(0)
}

// ---------------------------------------------------------------------------
// zerodyn
// ---------------------------------------------------------------------------

fn complex_rows(m: &lure_core::CMat) -> Value {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect();
    json!(rows)
}

fn cmd_zerodyn(system: &Path, out_dir: &Path) -> Result<u8, String> {
    let text = fs::read_to_string(system)
        .map_err(|e| format!("cannot read {}: {e}", system.display()))?;
    let mats = matio::parse_matrices(&text).map_err(|e| e.to_string())?;
    let a = matio::require(&mats, "A").map_err(|e| e.to_string())?;
    let b = matio::require(&mats, "B").map_err(|e| e.to_string())?;
    let c = matio::require(&mats, "C").map_err(|e| e.to_string())?;
    let sys = match mats.get("D") {
        Some(d) => LtiSystem::from_real(a, b, c, d),
        None => LtiSystem::from_real_abc(a, b, c),
    }
    .map_err(|e| e.to_string())?;
    let zd = zero_dynamics(&sys).map_err(|e| e.to_string())?;
    println!("invariant zeros ({}):", zd.zero_eigenvalues.len());
    for z in &zd.zero_eigenvalues {
        println!("  {:.12e} {:+.12e}i", z.re, z.im);
    }
    println!("restricted-dynamics subspace dimension: {}", zd.s_basis.ncols());
    let stem = system
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "system".into());
    let report = json!({
        "tool": tool_stamp(),
        "parameters": {
            "system_file": system.display().to_string(),
            "state_dim": sys.state_dim(),
            "input_dim": sys.input_dim(),
            "output_dim": sys.output_dim(),
        },
        "zeros": zd.zero_eigenvalues.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        "feedback_F": complex_rows(&zd.feedback),
        "s_basis": complex_rows(&zd.s_basis),
    });
    let written =
        write_output(out_dir, &format!("{stem}.zerodyn.json"), &format!("{:#}\n", report))?;
    println!("report -> {}", written.display());
    Ok(0)
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

fn cmd_report(path: &Path) -> Result<u8, String> {
    let sc = load_scenario(path)?;
    let params = if sc.mode == "theorem" { Some(oscillator_params(&sc)?) } else { None };
    let report = json!({
        "tool": tool_stamp(),
        "parameters": resolved_params_json(&sc, params.as_ref()),
    });
    println!("{:#}", report);
    Ok(0)
}
