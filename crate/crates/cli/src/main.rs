//! `gaplab`: generate `G(n, d)` instances, solve them, sweep ratios and run
//! the self-check suite.

mod args;

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use gaplab::numfmt::{sig, sig12};
use gaplab::ratio::{self, DRule, LpBackend, TourBackend};
use gaplab::verify::{self, VerifyConfig};
use gaplab::{exact, gline, subtour, tolerance, Error, InstanceSpec, Metric};

use args::{core_parse, parse_cap, parse_n_values, parse_spacing, parse_tolerance, NValues, Spacing};

#[derive(Parser, Debug)]
#[command(name = "gaplab", version, about = "Subtour LP integrality ratios on three-line TSP instances")]
struct Cli {
    /// Held-Karp point cap [default: $GAPLAB_HK_CAP or 20]
    #[arg(long, global = true, value_parser = parse_cap)]
    hk_cap: Option<usize>,

    /// Largest LP row or bound violation accepted when checking a solution
    #[arg(long, global = true, value_parser = parse_tolerance, default_value_t = tolerance::FEASIBILITY)]
    feasibility_tol: f64,

    /// Agreement required between numeric and closed-form values
    #[arg(long, global = true, value_parser = parse_tolerance, default_value_t = 1e-6)]
    compare_tol: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the point set of G(n, d)
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_spacing)]
        d: Spacing,
        /// Metric exponent: a positive integer or `inf`
        #[arg(long, default_value = "2", value_parser = core_parse::<Metric>)]
        p: Metric,
        #[arg(long, value_enum, default_value_t = GenFormat::Json)]
        format: GenFormat,
        /// Coordinate multiplier for TSPLIB output
        #[arg(long, default_value_t = 1000)]
        scale: u64,
        /// Output file [default: standard output]
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the LP optimum, the optimal tour or the integrality ratio
    Solve {
        #[arg(long)]
        n: usize,
        /// A number, `sqrt(n-1)` or `sqrt(n/2-1)`
        #[arg(long, value_parser = parse_spacing)]
        d: Spacing,
        #[arg(value_enum)]
        what: Quantity,
        /// Backend for the requested quantity (`lp`/`tour` only)
        #[arg(long)]
        backend: Option<String>,
        /// LP backend for `ratio`: cutting-plane or closed-form
        #[arg(long, default_value = "cutting-plane", value_parser = core_parse::<LpBackend>)]
        lp_backend: LpBackend,
        /// Tour backend for `ratio`: zvector, held-karp or closed-form
        #[arg(long, default_value = "zvector", value_parser = core_parse::<TourBackend>)]
        tour_backend: TourBackend,
        /// Print JSON instead of `key value` lines (`lp` and `tour` only)
        #[arg(long)]
        json: bool,
    },
    /// Write the ratio series over a range of n as CSV
    Sweep {
        /// `a:b:step`, `a:b` or a comma-separated list
        #[arg(long, value_parser = parse_n_values)]
        n: NValues,
        /// sqrt-n-1, sqrt-half, const:<v> or pow:<alpha>
        #[arg(long, default_value = "sqrt-n-1", value_parser = core_parse::<DRule>)]
        d_rule: DRule,
        #[arg(long, default_value = "closed-form", value_parser = core_parse::<LpBackend>)]
        lp: LpBackend,
        #[arg(long, default_value = "zvector", value_parser = core_parse::<TourBackend>)]
        tour: TourBackend,
        /// Output file [default: standard output]
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the self-check suite; exits 0 only when every check passes
    Verify {
        /// Offset added to the closed-form LP value (negative control)
        #[arg(long, hide = true, allow_hyphen_values = true, default_value_t = 0.0)]
        inject_lp_offset: f64,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum GenFormat {
    Json,
    Tsplib,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Quantity {
    Lp,
    Tour,
    Ratio,
}

/// Settings shared by all subcommands.
#[derive(Debug, Clone, PartialEq)]
struct Config {
    held_karp_cap: usize,
    feasibility_tol: f64,
    compare_tol: f64,
}

impl Config {
    fn from_cli(cli: &Cli) -> Config {
        Config {
            held_karp_cap: cli.hk_cap.unwrap_or_else(exact::held_karp_cap),
            feasibility_tol: cli.feasibility_tol,
            compare_tol: cli.compare_tol,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = Config::from_cli(&cli);
    match run(cli.command, &cfg) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            let precondition = err.downcast_ref::<Error>().is_some_and(Error::is_precondition);
            ExitCode::from(if precondition { 2 } else { 1 })
        }
    }
}

fn run(command: Command, cfg: &Config) -> anyhow::Result<ExitCode> {
    match command {
        Command::Gen { n, d, p, format, scale, out } => {
            let inst = gaplab::generate(InstanceSpec::new(n, d.resolve(n), p))?;
            let mut text = match format {
                GenFormat::Json => inst.to_json(),
                GenFormat::Tsplib => inst.to_tsplib(scale)?,
            };
            if !text.ends_with('\n') {
                text.push('\n');
            }
            emit(out, &text)?;
        }
        Command::Solve { n, d, what, backend, lp_backend, tour_backend, json } => {
            let d = d.resolve(n);
            let text = match what {
                Quantity::Lp => solve_lp(n, d, backend.as_deref(), json)?,
                Quantity::Tour => solve_tour(n, d, backend.as_deref(), json, cfg)?,
                Quantity::Ratio => {
                    if backend.is_some() || json {
                        bail!(Error::Domain(
                            "ratio takes --lp-backend/--tour-backend and prints text only".into()
                        ));
                    }
                    solve_ratio(n, d, lp_backend, tour_backend, cfg)?
                }
            };
            print!("{text}");
        }
        Command::Sweep { n, d_rule, lp, tour, out } => {
            let rows = ratio::sweep_with_cap(&n.0, d_rule, lp, tour, cfg.held_karp_cap);
            emit(out, &ratio::to_csv(&rows))?;
        }
        Command::Verify { inject_lp_offset } => {
            let vcfg = VerifyConfig {
                held_karp_cap: cfg.held_karp_cap,
                lp_tol: cfg.compare_tol,
                feasibility_tol: cfg.feasibility_tol,
                lp_constant_offset: inject_lp_offset,
                ..VerifyConfig::default()
            };
            let results = verify::run(&vcfg);
            let mut failed = 0;
            for r in &results {
                let tag = match (r.passed, r.skipped) {
                    (false, _) => "FAIL",
                    (true, true) => "SKIP",
                    (true, false) => "PASS",
                };
                failed += usize::from(!r.passed);
                println!("{tag} {}: {}", r.name, r.detail);
            }
            println!("{} checks, {failed} failed", results.len());
            if failed > 0 {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn emit(out: Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(&path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn instance(n: usize, d: f64) -> gaplab::Result<gaplab::Instance> {
    gaplab::generate(InstanceSpec::euclidean(n, d))
}

fn solve_lp(n: usize, d: f64, backend: Option<&str>, json: bool) -> anyhow::Result<String> {
    let backend: LpBackend = backend.unwrap_or("cutting-plane").parse()?;
    InstanceSpec::euclidean(n, d).validate()?;
    let mut out = String::new();
    match backend {
        LpBackend::ClosedForm => {
            if json {
                bail!(Error::Domain("--json needs the cutting-plane backend".into()));
            }
            let _ = writeln!(out, "objective {}", sig12(subtour::closed_form_lp_value(n, d)));
            let _ = writeln!(out, "objective_alt {}", sig12(subtour::closed_form_lp_value_alt(n, d)));
        }
        LpBackend::CuttingPlane => {
            let (x, cuts) = subtour::solve_subtour_lp(&instance(n, d)?)?;
            if json {
                out = x.to_json();
                out.push('\n');
                return Ok(out);
            }
            let _ = writeln!(out, "objective {}", sig12(x.objective_value()));
            let _ = writeln!(out, "closed_form {}", sig12(subtour::closed_form_lp_value(n, d)));
            let _ = writeln!(out, "cuts {}", cuts.len());
        }
    }
    let _ = writeln!(out, "backend {}", backend.name());
    Ok(out)
}

fn solve_tour(n: usize, d: f64, backend: Option<&str>, json: bool, cfg: &Config) -> anyhow::Result<String> {
    let backend: TourBackend = backend.unwrap_or("zvector").parse()?;
    let mut out = String::new();
    match backend {
        TourBackend::ZVector => {
            let (z, _) = gline::optimal_zvector(n, d)?;
            let tour = gline::tour_from_zvector(&instance(n, d)?, &z)?;
            if json {
                return Ok(format!("{}\n", tour.to_json()));
            }
            let _ = writeln!(out, "length {}", sig12(tour.length));
            let _ = writeln!(out, "z {}", join(z.entries()));
            let _ = writeln!(out, "order {}", join(&tour.tour.order));
        }
        TourBackend::HeldKarp => {
            let tour = exact::held_karp_with_cap(&instance(n, d)?, cfg.held_karp_cap)?;
            if json {
                return Ok(format!("{}\n", serde_json::to_string(&tour)?));
            }
            let _ = writeln!(out, "length {}", sig12(tour.length));
            let _ = writeln!(out, "order {}", join(&tour.order));
        }
        TourBackend::ClosedForm => {
            InstanceSpec::euclidean(n, d).validate()?;
            let Some(length) = ratio::closed_form_tour(n, d) else {
                bail!(Error::Domain(format!(
                    "no closed-form tour for n = {n}, d = {d}; needs even n >= 18 with d = sqrt(n-1) \
                     or even n >= 34 with d = sqrt(n/2-1)"
                )));
            };
            if json {
                bail!(Error::Domain("--json needs the zvector or held-karp backend".into()));
            }
            let _ = writeln!(out, "length {}", sig12(length));
        }
    }
    let _ = writeln!(out, "backend {}", backend.name());
    Ok(out)
}

fn solve_ratio(n: usize, d: f64, lp: LpBackend, tour: TourBackend, cfg: &Config) -> anyhow::Result<String> {
    let r = ratio::ratio_exact_with_cap(n, d, lp, tour, cfg.held_karp_cap)?;
    let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), sig12);
    let mut out = String::new();
    let _ = writeln!(out, "ratio {}", sig12(r.ratio_numeric));
    let _ = writeln!(out, "ratio_3sf {}", sig(r.ratio_numeric, 3));
    let _ = writeln!(out, "n {}", r.n);
    let _ = writeln!(out, "d {}", sig12(r.d));
    let _ = writeln!(out, "lp {}", sig12(r.lp_numeric));
    let _ = writeln!(out, "lp_closed {}", sig12(r.lp_closed));
    let _ = writeln!(out, "lp_closed_alt {}", sig12(r.lp_closed_alt));
    let _ = writeln!(out, "tour {}", sig12(r.tour_numeric));
    let _ = writeln!(out, "tour_closed {}", opt(r.tour_closed));
    let _ = writeln!(out, "ratio_closed {}", opt(r.ratio_closed));
    let _ = writeln!(out, "ratio_closed_alt {}", opt(r.ratio_closed_alt));
    let _ = writeln!(out, "ratio_lower_bound {}", ratio::ratio_lower_bound(n, d).map_or_else(|_| "-".into(), sig12));
    let _ = writeln!(out, "backend_lp {}", r.backend_lp.name());
    let _ = writeln!(out, "backend_tour {}", r.backend_tour.name());
    if r.lp_delta.abs() > cfg.compare_tol {
        let _ = writeln!(out, "warning lp differs from closed form by {}", sig12(r.lp_delta));
    }
    if let Some(delta) = r.tour_delta.filter(|t| t.abs() > cfg.compare_tol) {
        let _ = writeln!(out, "warning tour differs from closed form by {}", sig12(delta));
    }
    Ok(out)
}

fn join(xs: &[usize]) -> String {
    xs.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}
