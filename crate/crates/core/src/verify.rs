//! Self-check suite: oracle equivalences, closed forms and property sampling.
//!
//! Each check returns a [`CheckResult`]; a panicking check is reported as a
//! failure instead of unwinding into the caller.

use std::panic::{self, AssertUnwindSafe};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::exact;
use crate::gline::{self, ZVector};
use crate::instances::{generate, InstanceSpec, PointSet};
use crate::ratio::{self, DRule, LpBackend, TourBackend};
use crate::subtour;
use crate::tolerance;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    /// Largest instance handed to Held-Karp; larger cases are skipped.
    pub held_karp_cap: usize,
    /// Agreement between two exact routes to the same value.
    pub closed_form_tol: f64,
    /// Agreement between a cutting-plane optimum and a closed form.
    pub lp_tol: f64,
    /// Largest row or bound violation accepted in a replayed LP optimum.
    pub feasibility_tol: f64,
    /// Random triples for the square-root inequality.
    pub inequality_samples: usize,
    /// Random point sets for brute force vs Held-Karp.
    pub random_instances: usize,
    pub seed: u64,
    /// Added to the closed-form LP value before comparison. Nonzero only to
    /// confirm that the suite catches a wrong constant.
    pub lp_constant_offset: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            held_karp_cap: exact::held_karp_cap(),
            closed_form_tol: tolerance::CLOSED_FORM,
            lp_tol: tolerance::LP_COMPARE,
            feasibility_tol: tolerance::FEASIBILITY,
            inequality_samples: 100_000,
            random_instances: 100,
            seed: 0x5eed,
            lp_constant_offset: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// True when the whole check was gated off by the configuration.
    pub skipped: bool,
    pub detail: String,
}

impl CheckResult {
    fn from_outcome(name: &'static str, outcome: std::result::Result<Outcome, String>) -> Self {
        match outcome {
            Ok(Outcome::Pass(detail)) => CheckResult { name, passed: true, skipped: false, detail },
            Ok(Outcome::Skip(detail)) => CheckResult { name, passed: true, skipped: true, detail },
            Err(detail) => CheckResult { name, passed: false, skipped: false, detail },
        }
    }
}

enum Outcome {
    Pass(String),
    Skip(String),
}

type CheckFn = fn(&VerifyConfig) -> Result<std::result::Result<Outcome, String>>;

const CHECKS: &[(&str, CheckFn)] = &[
    ("worked-ratio", worked_ratio),
    ("lower-bound-example", lower_bound_example),
    ("zvector-vs-held-karp", zvector_vs_held_karp),
    ("lp-closed-form", lp_closed_form),
    ("directed-vs-undirected", directed_vs_undirected),
    ("closed-form-tour", closed_form_tour),
    ("convergence", convergence),
    ("variant-argmin", variant_argmin),
    ("sqrt-inequality", sqrt_inequality),
    ("structure-properties", structure_properties),
    ("brute-force-vs-held-karp", brute_force_vs_held_karp),
    ("lp-below-tour", lp_below_tour),
];

/// Names of all checks, in execution order.
pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|(n, _)| *n).collect()
}

/// Run every check. Never panics.
pub fn run(cfg: &VerifyConfig) -> Vec<CheckResult> {
    CHECKS.iter().map(|&(name, check)| run_one(name, check, cfg)).collect()
}

fn run_one(name: &'static str, check: CheckFn, cfg: &VerifyConfig) -> CheckResult {
    let outcome = match panic::catch_unwind(AssertUnwindSafe(|| check(cfg))) {
        Ok(Ok(o)) => o,
        Ok(Err(e)) => Err(format!("error: {e}")),
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            Err(format!("panicked: {msg}"))
        }
    };
    CheckResult::from_outcome(name, outcome)
}

/// Even integers from `lo` to `hi` inclusive, roughly `per_decade` per factor
/// of ten, always containing both ends.
pub fn even_log_grid(lo: usize, hi: usize, per_decade: usize) -> Vec<usize> {
    let lo = lo + lo % 2;
    let hi = hi - hi % 2;
    if lo > hi {
        return Vec::new();
    }
    let step = 10f64.powf(1.0 / per_decade.max(1) as f64);
    let mut out = vec![lo];
    let mut x = lo as f64;
    loop {
        x *= step;
        let mut n = x.round() as usize;
        n += n % 2;
        if n >= hi {
            break;
        }
        if n > *out.last().unwrap() {
            out.push(n);
        }
    }
    if *out.last().unwrap() != hi {
        out.push(hi);
    }
    out
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn worked_ratio(cfg: &VerifyConfig) -> Result<std::result::Result<Outcome, String>> {
    let d = 17f64.sqrt();
    let closed = ratio::ratio_exact(18, d, LpBackend::ClosedForm, TourBackend::ClosedForm)?;
    let expected = (68.0 + 2.0 * d) / (50.0 + 3.0 * d + 18f64.sqrt());
    let (_, tour) = gline::optimal_zvector(18, d)?;
    let lp = subtour::solve_subtour_lp(&generate(InstanceSpec::euclidean(18, d))?)?.0.objective_value();
    let lp_closed = closed.lp_closed + cfg.lp_constant_offset;
    let detail = format!("ratio {:.6}, tour {tour:.9}, lp {lp:.9}", closed.ratio_numeric);
    Ok(
        if close(closed.ratio_numeric, expected, cfg.closed_form_tol)
            && close(tour, closed.tour_numeric, cfg.closed_form_tol)
            && close(lp, lp_closed, cfg.lp_tol)
            && format!("{:.2}", closed.ratio_numeric) == "1.14"
        {
            Ok(Outcome::Pass(detail))
        } else {
            Err(format!("{detail}; expected lp {lp_closed:.9}"))
        },
    )
}

fn lower_bound_example(_: &VerifyConfig) -> Result<std::result::Result<Outcome, String>> {
    let lb = ratio::ratio_lower_bound(18, 17f64.sqrt())?;
    let detail = format!("bound {lb:.6}");
    Ok(if (lb - 1.01).abs() <= 0.005 { Ok(Outcome::Pass(detail)) } else { Err(detail) })
}

fn zvector_vs_held_karp(cfg: &VerifyConfig) -> Result<std::result::Result<Outcome, String>> {
    let (mut ran, mut skipped, mut worst) = (0, 0, 0.0f64);
    for n in [2usize, 4, 6] {
        for d in [4.0, 5.0, 6.5] {
            if 3 * n > cfg.held_karp_cap {
                skipped += 1;
                continue;
            }
            let inst = generate(InstanceSpec::euclidean(n, d))?;
            let hk = exact::held_karp_with_cap(&inst, cfg.held_karp_cap)?.length;
            let (_, z) = gline::optimal_zvector(n, d)?;
            let diff = (hk - z).abs();
            if diff > cfg.closed_form_tol {
                return Ok(Err(format!("G({n},{d}): held-karp {hk:.12} vs zvector {z:.12}")));
            }
            worst = worst.max(diff);
            ran += 1;
        }
    }
    let detail = format!("{ran} instances, max diff {worst:.1e}, {skipped} over cap");
    Ok(Ok(if ran == 0 { Outcome::Skip(detail) } else { Outcome::Pass(detail) }))
}

fn lp_closed_form(cfg: &VerifyConfig) -> Result<std::result::Result<Outcome, String>> {
    let mut worst = 0.0f64;
    for n in 3..=10 {
        for d in [3.0, 4.0] {
            let inst = generate(InstanceSpec::euclidean(n, d))?;
            let (x, _) = subtour::solve_subtour_lp(&inst)?;
            let feas = x.degree_violation().max(x.bound_violation());
            if feas > cfg.feasibility_tol || !x.is_subtour_feasible() {
                return Ok(Err(format!("G({n},{d}): LP optimum infeasible (violation {feas:.1e})")));
            }
            let half = subtour::build_half_integral(&inst)?;
            if let Some(cut) = subtour::separate(&half) {
                return Ok(Err(format!("G({n},{d}): half-integral point violates cut {:?}", cut.side)));
            }
            let expected = subtour::closed_form_lp_value(n, d) + cfg.lp_constant_offset;
            let got = x.objective_value();
            if !close(got, expected, cfg.lp_tol) || !close(half.objective_value(), expected, cfg.lp_tol) {
                return Ok(Err(format!(
                    "G({n},{d}): lp {got:.9}, half-integral {:.9}, closed form {expected:.9}",
                    half.objective_value()
                )));
            }
            worst = worst.max((got - expected).abs());
        }
    }
    Ok(Ok(Outcome::Pass(format!("n 3..10, d 3 and 4; max diff {worst:.1e}"))))
}

fn random_point_set(rng: &mut ChaCha8Rng, n: usize) -> PointSet {
    let coords: Vec<(f64, f64)> =
        (0..n).map(|_| (rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0))).collect();
    PointSet::euclidean(&coords)
}

fn directed_vs_undirected(cfg: &VerifyConfig) -> Result<std::result::Result<Outcome, String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xd1);
    let mut count = 0;
    for n in 3..=subtour::DIRECTED_MAX_POINTS {
        for _ in 0..3 {
            let pts = random_point_set(&mut rng, n);
            let a = subtour::solve_subtour_lp(&pts)?.0.objective_value();
            let b = subtour::solve_directed_subtour_lp(&pts)?;
            if !close(a, b, cfg.lp_tol) {
                return Ok(Err(format!("{n} random points: undirected {a:.9}, directed {b:.9}")));
            }
            count += 1;
        }
    }
    let g2 = generate(InstanceSpec::euclidean(2, 1.0))?;
    let a = subtour::solve_subtour_lp(&g2)?.0.objective_value();
    let b = subtour::solve_directed_subtour_lp(&g2)?;
    if !close(a, b, cfg.lp_tol) {
        return Ok(Err(format!("G(2,1): undirected {a:.9}, directed {b:.9}")));
    }
    Ok(Ok(Outcome::Pass(format!("{} point sets agree", count + 1))))
}

fn closed_form_tour(cfg: &VerifyConfig) -> Result<std::result::Result<Outcome, String>> {
    for n in (18..=2000).step_by(2) {
        let d = (n as f64 - 1.0).sqrt();
        let (_, z) = gline::optimal_zvector(n, d)?;
        let closed = gline::closed_form_tour_sqrt(n)?;
        if !close(z, closed, cfg.closed_form_tol) {
            return Ok(Err(format!("n = {n}: zvector {z:.12} vs closed form {closed:.12}")));
        }
        let nf = n as f64;
        let f1 = gline::f_value(1.0, d, nf);
        if let Some(k) = (2..=n / 2).find(|&k| gline::f_value(k as f64, d, nf) <= f1) {
            return Ok(Err(format!("n = {n}: f({k}) <= f(1)")));
        }
    }
    Ok(Ok(Outcome::Pass("even n 18..2000".into())))
}

fn convergence(_: &VerifyConfig) -> Result<std::result::Result<Outcome, String>> {
    let grid = even_log_grid(18, 1_000_000, 20);
    let rows = ratio::sweep(&grid, DRule::SqrtNMinus1, LpBackend::ClosedForm, TourBackend::ClosedForm);
    let mut prev = 0.0;
    for row in &rows {
        let r = row.report.as_ref().map_err(|e| crate::Error::Domain(e.clone()))?.ratio_numeric;
        if r < prev {
            return Ok(Err(format!("ratio decreases at n = {}: {r} < {prev}", row.n)));
        }
        prev = r;
    }
    if prev < 1.332 {
        return Ok(Err(format!("ratio at n = 10^6 is {prev:.6} < 1.332")));
    }
    let flat = ratio::sweep(&grid, DRule::Const(4.0), LpBackend::ClosedForm, TourBackend::ZVector);
    let mut top = 0.0f64;
    for row in &flat {
        let r = row.report.as_ref().map_err(|e| crate::Error::Domain(e.clone()))?.ratio_numeric;
        top = top.max(r);
    }
    if top >= 1.30 {
        return Ok(Err(format!("constant spacing reaches ratio {top:.6}")));
    }
    Ok(Ok(Outcome::Pass(format!(
        "{} points; sqrt rule ends at {prev:.6}, constant rule peaks at {top:.6}",
        grid.len()
    ))))
}

fn variant_argmin(_: &VerifyConfig) -> Result<std::result::Result<Outcome, String>> {
    for n in (40..=2000).step_by(2) {
        let d = (n as f64 / 2.0 - 1.0).sqrt();
        let k = ratio::f_argmin(n, d);
        if k != 2 {
            return Ok(Err(format!("n = {n}: argmin k = {k}")));
        }
        let (v, t) = (ratio::variant_ratio_sqrt_half(n)?, ratio::sqrt_rule_ratio(n)?);
        if v <= t {
            return Ok(Err(format!("n = {n}: variant {v:.9} <= sqrt(n-1) ratio {t:.9}")));
        }
    }
    Ok(Ok(Outcome::Pass("even n 40..2000".into())))
}

fn sqrt_inequality(cfg: &VerifyConfig) -> Result<std::result::Result<Outcome, String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x1e);
    for _ in 0..cfg.inequality_samples {
        let (a, b, c) = (rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0));
        if !gline::sqrt_inequality_holds(a, b, c)? {
            return Ok(Err(format!("fails at ({a}, {b}, {c})")));
        }
    }
    Ok(Ok(Outcome::Pass(format!("{} triples", cfg.inequality_samples))))
}

fn structure_properties(_: &VerifyConfig) -> Result<std::result::Result<Outcome, String>> {
    for d in [4.0, 10.0] {
        for i in 1..100 {
            let step = |i| gline::z_path_length(i + 1, d) - gline::z_path_length(i, d);
            if step(i + 1) < step(i) - 1e-12 {
                return Ok(Err(format!("z-path length not convex at i = {i}, d = {d}")));
            }
        }
    }
    for d in 4..=12 {
        for k in 1..=60 {
            let m = gline::end_dominance_margin(k, d as f64);
            if m < -1e-12 {
                return Ok(Err(format!("end dominance fails at k = {k}, d = {d}: {m}")));
            }
        }
    }
    for n in (4..=40).step_by(2) {
        for d in [4.0, 5.0, 8.0] {
            let (_, best) = gline::optimal_zvector(n, d)?;
            let lb = gline::tour_lower_bound(n, d)?;
            if lb > best + 1e-9 {
                return Ok(Err(format!("lower bound {lb} exceeds optimum {best} at n = {n}, d = {d}")));
            }
            let single = gline::zvector_tour_length(&ZVector::new(vec![n], n)?, d)?;
            let pair = gline::zvector_tour_length(&ZVector::balanced(n, 2)?, d)?;
            if single < pair - 1e-9 {
                return Ok(Err(format!("single z-path beats two at n = {n}, d = {d}")));
            }
        }
    }
    Ok(Ok(Outcome::Pass("convexity, end dominance, bounds".into())))
}

fn brute_force_vs_held_karp(cfg: &VerifyConfig) -> Result<std::result::Result<Outcome, String>> {
    let top = 9.min(cfg.held_karp_cap);
    if top < 3 {
        return Ok(Ok(Outcome::Skip("held-karp cap below 3".into())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xbf);
    for t in 0..cfg.random_instances {
        let n = rng.gen_range(3..=top);
        let pts = random_point_set(&mut rng, n);
        let a = exact::brute_force(&pts)?.length;
        let b = exact::held_karp_with_cap(&pts, cfg.held_karp_cap)?.length;
        if !close(a, b, cfg.closed_form_tol) {
            return Ok(Err(format!("instance {t} ({n} points): brute {a:.12}, held-karp {b:.12}")));
        }
    }
    Ok(Ok(Outcome::Pass(format!("{} instances up to {top} points", cfg.random_instances))))
}

fn lp_below_tour(cfg: &VerifyConfig) -> Result<std::result::Result<Outcome, String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x1b);
    let mut count = 0;
    let mut check = |label: String, lp: f64, tour: f64| {
        count += 1;
        if lp > tour + cfg.lp_tol {
            Err(format!("{label}: lp {lp:.9} > tour {tour:.9}"))
        } else {
            Ok(())
        }
    };
    let top = 10.min(cfg.held_karp_cap);
    for _ in 0..20 {
        if top < 3 {
            break;
        }
        let n = rng.gen_range(3..=top);
        let pts = random_point_set(&mut rng, n);
        let lp = subtour::solve_subtour_lp(&pts)?.0.objective_value();
        let tour = exact::held_karp_with_cap(&pts, cfg.held_karp_cap)?.length;
        if let Err(e) = check(format!("{n} random points"), lp, tour) {
            return Ok(Err(e));
        }
    }
    for n in 2..=6 {
        for d in [1.0, 3.0, 4.0] {
            if 3 * n > cfg.held_karp_cap {
                continue;
            }
            let inst = generate(InstanceSpec::euclidean(n, d))?;
            let lp = subtour::solve_subtour_lp(&inst)?.0.objective_value();
            let tour = exact::held_karp_with_cap(&inst, cfg.held_karp_cap)?.length;
            if let Err(e) = check(format!("G({n},{d})"), lp, tour) {
                return Ok(Err(e));
            }
        }
    }
    Ok(Ok(if count == 0 {
        Outcome::Skip("held-karp cap below 3".into())
    } else {
        Outcome::Pass(format!("{count} instances"))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> VerifyConfig {
        VerifyConfig { held_karp_cap: 12, inequality_samples: 1000, random_instances: 10, ..Default::default() }
    }

    #[test]
    fn grid_shape() {
        let g = even_log_grid(18, 1_000_000, 10);
        assert_eq!(g.first(), Some(&18));
        assert_eq!(g.last(), Some(&1_000_000));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(g.iter().all(|n| n % 2 == 0));
        assert_eq!(even_log_grid(19, 19, 5), Vec::<usize>::new());
        assert_eq!(even_log_grid(17, 18, 5), vec![18]);
    }

    #[test]
    fn small_cap_skips_but_passes() {
        let results = run(&quick());
        assert_eq!(results.len(), check_names().len());
        for r in &results {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
        let hk = results.iter().find(|r| r.name == "zvector-vs-held-karp").unwrap();
        assert!(hk.detail.contains("3 over cap"), "{}", hk.detail);
    }

    #[test]
    fn corrupted_lp_constant_is_caught() {
        let cfg = VerifyConfig { lp_constant_offset: 1.0, ..quick() };
        let results = run(&cfg);
        let failed: Vec<_> = results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
        assert!(failed.contains(&"lp-closed-form"));
        assert!(failed.contains(&"worked-ratio"));
    }

    #[test]
    fn panics_become_failures() {
        fn boom(_: &VerifyConfig) -> Result<std::result::Result<Outcome, String>> {
            panic!("deliberate")
        }
        let r = run_one("boom", boom, &quick());
        assert!(!r.passed);
        assert!(r.detail.contains("deliberate"));
    }
}
