use clap::{Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use wdirichlet::capacity::{
    assemble_form, capacity_with_form, grid_spacing, kernel_diag_estimate, point_polar_test, stieltjes_sums,
    CapacitySource,
};
use wdirichlet::config::{load_config, parse_config, Eta, Scenario};
use wdirichlet::cyclicity::{cyclic_distance, th4_test};
use wdirichlet::dirichlet::{dirichlet, douglas_type_form, Energy};
use wdirichlet::potentials::PotentialEvaluator;
use wdirichlet::sets::BoundarySet;
use wdirichlet::verify::run_verify;
use wdirichlet::{Error, C64};

/// Environment override for the worker count.
const WORKERS_ENV: &str = "WDIR_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "wdir", version, about = "Weighted Dirichlet space numerics")]
struct Cli {
    /// TOML scenario file; defaults describe the classical weight.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Boundary grid size N (power of two).
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Relative tolerance for route agreement.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a potential at the configured points.
    Eval { what: EvalKind },
    /// Dirichlet integral of the configured function by every route.
    Dirichlet,
    /// Variational capacity of the configured set over a dyadic sweep.
    Capacity {
        /// Also write the assembled form matrix (binary) to this file.
        #[arg(long)]
        export_form: Option<PathBuf>,
    },
    /// Distance curve d(k) of the configured function.
    Cyclicity,
    /// Run property suites and print a report.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Plot-ready sweeps: kernel growth, point polarity, or the sufficient-condition sums.
    Sweep { kind: SweepKind },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum EvalKind {
    Green,
    Poisson,
    Vmu,
    Psimu,
    Balayage,
    Amu,
    Kernel,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SweepKind {
    Kernel,
    Polarity,
    Th4,
}

enum Failure {
    Violation(String),
    Config(String),
    Cap(String),
    Solver(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Violation(_) => 1,
            Failure::Config(_) => 2,
            Failure::Cap(_) => 3,
            Failure::Solver(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Violation(m) | Failure::Config(m) | Failure::Cap(m) | Failure::Solver(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let m = e.to_string();
        match e {
            Error::Cap(_) => Failure::Cap(m),
            Error::Solver(_) => Failure::Solver(m),
            Error::Config { .. } | Error::Invalid(_) | Error::Io(_) => Failure::Config(m),
        }
    }
}

/// Output text plus a failure to report after it is written.
type Outcome = (String, Option<Failure>);

/// 15 significant digits, fixed notation for moderate magnitudes.
fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..15).contains(&e) {
        let decimals = (14 - e).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        let s = format!("{x:.14e}");
        let (m, exp) = s.split_once('e').unwrap();
        let m = if m.contains('.') { m.trim_end_matches('0').trim_end_matches('.') } else { m };
        format!("{m}e{exp}")
    }
}

fn fmt_complex(z: C64) -> String {
    let im = fmt_num(z.im.abs());
    let sign = if z.im < 0.0 && im != "0" { '-' } else { '+' };
    format!("{}{sign}{im}i", fmt_num(z.re))
}

fn csv_row(out: &mut String, cells: &[String]) {
    out.push_str(&cells.join(","));
    out.push('\n');
}

fn energy_cap(values: &[Energy]) -> Option<Failure> {
    values
        .iter()
        .find(|e| !e.is_finite())
        .map(|e| Failure::Cap(format!("an energy exceeded the cap (partial {e:?})")))
}

fn cmd_eval(sc: &Scenario, what: EvalKind) -> std::result::Result<Outcome, Failure> {
    let ev = PotentialEvaluator::new(&sc.weight);
    let mut out = String::new();
    let mut nonfinite = false;
    match what {
        EvalKind::Balayage => {
            out.push_str("theta,value\n");
            for &th in &sc.eval.angles {
                let v = ev.balayage(th);
                nonfinite |= !v.is_finite();
                csv_row(&mut out, &[fmt_num(th), fmt_num(v)]);
            }
        }
        EvalKind::Amu => {
            out.push_str("theta,psi,value\n");
            for &(th, psi) in &sc.eval.pairs {
                let v = ev.a_mu(th, psi);
                nonfinite |= !v.is_finite();
                csv_row(&mut out, &[fmt_num(th), fmt_num(psi), fmt_num(v)]);
            }
        }
        _ => {
            out.push_str("point,value\n");
            for &z in &sc.eval.points {
                if !(z.norm() < 1.0) {
                    return Err(Failure::Config(format!("config key `eval.points`: {} lies outside the open disc", fmt_complex(z))));
                }
                let v = match what {
                    EvalKind::Green => ev.green(z),
                    EvalKind::Poisson => ev.poisson(z),
                    EvalKind::Vmu => ev.v_mu(z),
                    EvalKind::Psimu => ev.psi_mu(z),
                    _ => kernel_diag_estimate(z, &sc.weight.mu)?,
                };
                nonfinite |= !v.is_finite();
                csv_row(&mut out, &[fmt_complex(z), fmt_num(v)]);
            }
        }
    }
    let fail = nonfinite.then(|| Failure::Cap("a potential value is not finite".into()));
    Ok((out, fail))
}

fn relative_gap(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else if a.is_infinite() || b.is_infinite() {
        if a == b {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (a - b).abs() / s
    }
}

fn cmd_dirichlet(sc: &Scenario) -> std::result::Result<Outcome, Failure> {
    let f = sc.build_function(sc.run.grid)?;
    let r = dirichlet(&f, &sc.weight);
    let mut routes: Vec<(&str, Energy)> = vec![("area", r.area), ("local", r.local)];
    if let Some(e) = r.entropy {
        routes.push(("entropy", e));
    }
    routes.push(("douglas", douglas_type_form(&f, &sc.weight)));
    let mut out = String::from("route,value");
    for (name, _) in &routes {
        let _ = write!(out, ",gap_{name}");
    }
    out.push('\n');
    for (name, v) in &routes {
        let mut cells = vec![name.to_string(), fmt_num(v.value())];
        cells.extend(routes.iter().map(|(_, w)| fmt_num(relative_gap(v.value(), w.value()))));
        csv_row(&mut out, &cells);
    }
    let energies: Vec<Energy> = routes.iter().map(|r| r.1).collect();
    Ok((out, energy_cap(&energies)))
}

fn log_gauge(t: f64) -> f64 {
    (1.0 / t).ln()
}

fn cmd_capacity(sc: &Scenario, export: Option<&PathBuf>) -> std::result::Result<Outcome, Failure> {
    let e = sc.boundary_set()?;
    let n = sc.run.grid;
    let q = assemble_form(&sc.weight, n)?;
    if let Some(p) = export {
        let file = std::fs::File::create(p).map_err(|err| Failure::Config(format!("{}: {err}", p.display())))?;
        q.write_binary(std::io::BufWriter::new(file))?;
    }
    let with_sums = sc.sweep.eta == Eta::Log;
    let mut out = String::from("t,capacity,iterations,kkt_residual,converged");
    if with_sums {
        out.push_str(",increment,partial_sum");
    }
    out.push('\n');
    if matches!(e, BoundarySet::Circle | BoundarySet::Empty) {
        let r = capacity_with_form(&q, e, 0.0)?;
        let cells = [fmt_num(0.0), fmt_num(r.value), r.iterations.to_string(), fmt_num(r.kkt_residual), r.converged.to_string()];
        csv_row(&mut out, &cells);
        return Ok((out, None));
    }
    let floor = grid_spacing(n);
    let radii: Vec<f64> = (sc.sweep.j_min..=sc.sweep.j_max)
        .map(|j| PI * 0.5f64.powi(j as i32))
        .filter(|&t| t >= floor)
        .collect();
    let mut rows = Vec::with_capacity(radii.len());
    for &t in &radii {
        rows.push(capacity_with_form(&q, e, t)?);
    }
    let sums = if with_sums {
        Some(stieltjes_sums(radii.clone(), rows.iter().map(|r| r.value).collect(), &log_gauge)?)
    } else {
        None
    };
    for (i, r) in rows.iter().enumerate() {
        let mut cells =
            vec![fmt_num(r.t), fmt_num(r.value), r.iterations.to_string(), fmt_num(r.kkt_residual), r.converged.to_string()];
        if let Some(s) = &sums {
            cells.push(fmt_num(s.increments[i]));
            cells.push(fmt_num(s.partial_sums[i]));
        }
        csv_row(&mut out, &cells);
    }
    let fail = (!rows.is_empty() && rows.iter().all(|r| !r.converged))
        .then(|| Failure::Solver("the solver did not converge for any radius".into()));
    Ok((out, fail))
}

fn cmd_cyclicity(sc: &Scenario) -> std::result::Result<Outcome, Failure> {
    let f = sc.build_function(sc.run.grid)?;
    let curve = cyclic_distance(&f, &sc.weight, sc.degree)?;
    let mut out = String::from("k,distance\n");
    for (k, d) in curve.distances.iter().enumerate() {
        csv_row(&mut out, &[k.to_string(), fmt_num(*d)]);
    }
    if let Some(k) = curve.truncated_at {
        eprintln!("curve truncated at degree {k} (pivot ratio² {:e})", curve.condition);
    }
    Ok((out, None))
}

fn cmd_sweep(sc: &Scenario, kind: SweepKind) -> std::result::Result<Outcome, Failure> {
    let mut out = String::new();
    match kind {
        SweepKind::Kernel => {
            out.push_str("k,gap,kernel\n");
            for k in 1..=sc.sweep.j_max.max(1) {
                let gap = 0.5f64.powi(k as i32);
                let v = kernel_diag_estimate(C64::new(1.0 - gap, 0.0), &sc.weight.mu)?;
                csv_row(&mut out, &[k.to_string(), fmt_num(gap), fmt_num(v)]);
            }
        }
        SweepKind::Polarity => {
            let rep = point_polar_test(0.0, &sc.weight.mu);
            out.push_str("level,increment,partial\n");
            for (k, (d, p)) in rep.increments.iter().zip(&rep.partials).enumerate() {
                csv_row(&mut out, &[(k + 1).to_string(), fmt_num(*d), fmt_num(*p)]);
            }
            eprintln!("point at angle 0: {:?}", rep.verdict);
        }
        SweepKind::Th4 => {
            let e = sc.boundary_set()?;
            let source = CapacitySource::ArcEstimate(&sc.weight.mu);
            let rep = th4_test(e, &source, sc.sweep.j_max)?;
            out.push_str("t,capacity,increment,partial_sum\n");
            let s = &rep.sums;
            for i in 0..s.radii.len() {
                csv_row(
                    &mut out,
                    &[fmt_num(s.radii[i]), fmt_num(s.capacities[i]), fmt_num(s.increments[i]), fmt_num(s.partial_sums[i])],
                );
            }
            eprintln!("sufficient condition: {:?}", rep.verdict);
        }
    }
    Ok((out, None))
}

fn load(cli: &Cli) -> std::result::Result<(Scenario, String), Failure> {
    let text = match &cli.config {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?,
        None => String::new(),
    };
    let mut sc = match &cli.config {
        Some(p) => load_config(p)?,
        None => parse_config("", std::path::Path::new("."))?,
    };
    let digest = format!("{:x}", Sha256::digest(text.as_bytes()));
    if let Some(g) = cli.grid {
        if !(g >= 8 && g.is_power_of_two()) {
            return Err(Failure::Config(format!("--grid {g} must be a power of two ≥ 8")));
        }
        sc.run.grid = g;
    }
    if let Some(s) = cli.seed {
        sc.run.seed = s;
    }
    if let Some(t) = cli.trials {
        sc.run.trials = t;
    }
    if let Some(t) = cli.tolerance {
        if !(t > 0.0) {
            return Err(Failure::Config("--tolerance must be positive".into()));
        }
        sc.run.tolerance = t;
    }
    if let Some(w) = cli.workers {
        sc.run.workers = w.max(1);
    }
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        sc.run.workers = v
            .parse::<usize>()
            .map_err(|_| Failure::Config(format!("{WORKERS_ENV}={v} is not a worker count")))?
            .max(1);
    }
    Ok((sc, digest))
}

fn command_echo(cli: &Cli, sc: &Scenario, suite: &str) -> String {
    let cfg = cli.config.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "-".into());
    format!("verify --suite {suite} --config {cfg} --grid {} --seed {} --trials {}", sc.run.grid, sc.run.seed, sc.run.trials)
}

fn run(cli: &Cli) -> std::result::Result<Outcome, Failure> {
    let (sc, digest) = load(cli)?;
    // a second initialization only happens in-process and is harmless
    let _ = rayon::ThreadPoolBuilder::new().num_threads(sc.run.workers).build_global();
    match &cli.command {
        Command::Eval { what } => cmd_eval(&sc, *what),
        Command::Dirichlet => cmd_dirichlet(&sc),
        Command::Capacity { export_form } => cmd_capacity(&sc, export_form.as_ref()),
        Command::Cyclicity => cmd_cyclicity(&sc),
        Command::Sweep { kind } => cmd_sweep(&sc, *kind),
        Command::Verify { suite } => {
            let rep = run_verify(&sc, suite, sc.run.seed, sc.run.trials, &command_echo(cli, &sc, suite), &digest)?;
            let fail = (!rep.ok()).then(|| {
                let first = rep.suites.iter().find(|s| !s.passed()).and_then(|s| s.violation.clone());
                Failure::Violation(format!("property violated: {}", first.unwrap_or_default()))
            });
            Ok((rep.render(), fail))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (text, fail) = match run(&cli) {
        Ok(o) => o,
        Err(f) => (String::new(), Some(f)),
    };
    let written = match &cli.out {
        Some(p) => std::fs::write(p, &text).map_err(|e| format!("{}: {e}", p.display())),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match fail {
        None => ExitCode::SUCCESS,
        Some(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
