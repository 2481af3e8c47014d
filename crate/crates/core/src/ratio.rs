//! Integrality ratios of `G(n, d)`: numeric backends, closed forms and sweeps.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact;
use crate::gline;
use crate::instances::{generate, InstanceSpec};
use crate::numfmt::sig12;
use crate::subtour;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpBackend {
    CuttingPlane,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TourBackend {
    ZVector,
    HeldKarp,
    ClosedForm,
}

impl LpBackend {
    pub fn name(self) -> &'static str {
        match self {
            LpBackend::CuttingPlane => "cutting-plane",
            LpBackend::ClosedForm => "closed-form",
        }
    }
}

impl TourBackend {
    pub fn name(self) -> &'static str {
        match self {
            TourBackend::ZVector => "zvector",
            TourBackend::HeldKarp => "held-karp",
            TourBackend::ClosedForm => "closed-form",
        }
    }
}

impl FromStr for LpBackend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cutting-plane" => Ok(LpBackend::CuttingPlane),
            "closed-form" | "closed" => Ok(LpBackend::ClosedForm),
            _ => Err(Error::Parse(format!("unknown LP backend `{s}`"))),
        }
    }
}

impl FromStr for TourBackend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zvector" => Ok(TourBackend::ZVector),
            "held-karp" => Ok(TourBackend::HeldKarp),
            "closed-form" | "closed" => Ok(TourBackend::ClosedForm),
            _ => Err(Error::Parse(format!("unknown tour backend `{s}`"))),
        }
    }
}

/// One `(n, d)` data point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub n: usize,
    pub d: f64,
    /// LP optimum from `backend_lp`.
    pub lp_numeric: f64,
    /// `3n - 4 + 3d + sqrt(d^2 + 1)`.
    pub lp_closed: f64,
    /// The `3n - 3` variant of `lp_closed`.
    pub lp_closed_alt: f64,
    /// Optimal tour length from `backend_tour`.
    pub tour_numeric: f64,
    /// Closed-form tour length, when `d` follows one of the two square-root rules.
    pub tour_closed: Option<f64>,
    pub ratio_numeric: f64,
    pub ratio_closed: Option<f64>,
    pub ratio_closed_alt: Option<f64>,
    pub lp_delta: f64,
    pub tour_delta: Option<f64>,
    pub backend_lp: LpBackend,
    pub backend_tour: TourBackend,
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(1.0)
}

/// Closed-form optimal tour length when `d` is `sqrt(n-1)` (even `n >= 18`)
/// or `sqrt(n/2-1)` (even `n >= 34`).
///
/// The second form is the length of four equal z-paths of real width `n/4`;
/// it is an exact optimum only when 4 divides `n`.
pub fn closed_form_tour(n: usize, d: f64) -> Option<f64> {
    let nf = n as f64;
    if n % 2 == 1 {
        return None;
    }
    if n >= 18 && same(d, (nf - 1.0).sqrt()) {
        return gline::closed_form_tour_sqrt(n).ok();
    }
    if n >= 34 && same(d, (nf / 2.0 - 1.0).sqrt()) {
        return Some(gline::f_value(2.0, d, nf));
    }
    None
}

pub fn ratio_exact(n: usize, d: f64, lp_mode: LpBackend, tour_mode: TourBackend) -> Result<RatioReport> {
    ratio_exact_with_cap(n, d, lp_mode, tour_mode, exact::held_karp_cap())
}

/// [`ratio_exact`] with an explicit Held-Karp point cap.
pub fn ratio_exact_with_cap(
    n: usize,
    d: f64,
    lp_mode: LpBackend,
    tour_mode: TourBackend,
    held_karp_cap: usize,
) -> Result<RatioReport> {
    let spec = InstanceSpec::euclidean(n, d);
    spec.validate()?;
    if n < 3 {
        return Err(Error::Domain(format!("ratio needs n >= 3, got {n}")));
    }
    let lp_closed = subtour::closed_form_lp_value(n, d);
    let lp_closed_alt = subtour::closed_form_lp_value_alt(n, d);
    let tour_closed = closed_form_tour(n, d);

    let lp_numeric = match lp_mode {
        LpBackend::ClosedForm => lp_closed,
        LpBackend::CuttingPlane => subtour::solve_subtour_lp(&generate(spec)?)?.0.objective_value(),
    };
    let tour_numeric = match tour_mode {
        TourBackend::ClosedForm => tour_closed.ok_or_else(|| {
            Error::Domain(format!(
                "no closed-form tour for n = {n}, d = {d}; needs even n >= 18 with d = sqrt(n-1) \
                 or even n >= 34 with d = sqrt(n/2-1)"
            ))
        })?,
        TourBackend::ZVector => gline::optimal_zvector(n, d)?.1,
        TourBackend::HeldKarp => exact::held_karp_with_cap(&generate(spec)?, held_karp_cap)?.length,
    };

    Ok(RatioReport {
        n,
        d,
        lp_numeric,
        lp_closed,
        lp_closed_alt,
        tour_numeric,
        tour_closed,
        ratio_numeric: tour_numeric / lp_numeric,
        ratio_closed: tour_closed.map(|t| t / lp_closed),
        ratio_closed_alt: tour_closed.map(|t| t / lp_closed_alt),
        lp_delta: lp_numeric - lp_closed,
        tour_delta: tour_closed.map(|t| tour_numeric - t),
        backend_lp: lp_mode,
        backend_tour: tour_mode,
    })
}

/// `(4n + 2d - 2 - 2n/(d+1)) / (3n + 4d)`, a lower bound on the integrality
/// ratio of `G(n, d)` for `d >= 4`.
pub fn ratio_lower_bound(n: usize, d: f64) -> Result<f64> {
    let tour = gline::tour_lower_bound(n, d)?;
    Ok(tour / (3.0 * n as f64 + 4.0 * d))
}

/// `(4n - 4 + 2 sqrt(n-1)) / (3n - 4 + 3 sqrt(n-1) + sqrt(n))`, the ratio of
/// `G(n, sqrt(n-1))` for even `n >= 18`.
pub fn sqrt_rule_ratio(n: usize) -> Result<f64> {
    let tour = gline::closed_form_tour_sqrt(n)?;
    Ok(tour / subtour::closed_form_lp_value(n, (n as f64 - 1.0).sqrt()))
}

/// [`sqrt_rule_ratio`] with the `3n - 3` LP constant.
pub fn sqrt_rule_ratio_alt(n: usize) -> Result<f64> {
    let tour = gline::closed_form_tour_sqrt(n)?;
    Ok(tour / subtour::closed_form_lp_value_alt(n, (n as f64 - 1.0).sqrt()))
}

/// `(4n - 6 + 2 sqrt(n/2-1)) / (3n - 4 + 3 sqrt(n/2-1) + sqrt(n/2))`, the ratio
/// for `d = sqrt(n/2 - 1)`; needs even `n` with `d >= 4`, i.e. `n >= 34`.
pub fn variant_ratio_sqrt_half(n: usize) -> Result<f64> {
    if n % 2 == 1 || n < 34 {
        return Err(Error::Domain(format!("variant ratio needs even n >= 34, got {n}")));
    }
    let nf = n as f64;
    let h = (nf / 2.0 - 1.0).sqrt();
    Ok((4.0 * nf - 6.0 + 2.0 * h) / (3.0 * nf - 4.0 + 3.0 * h + (nf / 2.0).sqrt()))
}

/// Smallest `k` in `1..=n/2` minimising [`gline::f_value`]`(k, d, n)`.
pub fn f_argmin(n: usize, d: f64) -> usize {
    let nf = n as f64;
    let mut best = (1, gline::f_value(1.0, d, nf));
    for k in 2..=(n / 2).max(1) {
        let v = gline::f_value(k as f64, d, nf);
        if v < best.1 {
            best = (k, v);
        }
    }
    best.0
}

/// Growth rule for the line spacing in a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DRule {
    /// `d = sqrt(n - 1)`.
    SqrtNMinus1,
    /// `d = sqrt(n/2 - 1)`.
    SqrtHalf,
    Const(f64),
    /// `d = n^alpha`.
    Pow(f64),
}

impl DRule {
    pub fn spacing(self, n: usize) -> f64 {
        let nf = n as f64;
        match self {
            DRule::SqrtNMinus1 => (nf - 1.0).sqrt(),
            DRule::SqrtHalf => (nf / 2.0 - 1.0).sqrt(),
            DRule::Const(v) => v,
            DRule::Pow(alpha) => nf.powf(alpha),
        }
    }
}

impl fmt::Display for DRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DRule::SqrtNMinus1 => f.write_str("sqrt-n-1"),
            DRule::SqrtHalf => f.write_str("sqrt-half"),
            DRule::Const(v) => write!(f, "const:{v}"),
            DRule::Pow(a) => write!(f, "pow:{a}"),
        }
    }
}

impl FromStr for DRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let num = |v: &str| {
            v.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::Parse(format!("bad number `{v}` in d-rule `{s}`")))
        };
        match s.trim() {
            "sqrt-n-1" => Ok(DRule::SqrtNMinus1),
            "sqrt-half" => Ok(DRule::SqrtHalf),
            other => match other.split_once(':') {
                Some(("const", v)) => Ok(DRule::Const(num(v)?)),
                Some(("pow", v)) => Ok(DRule::Pow(num(v)?)),
                _ => Err(Error::Parse(format!(
                    "unknown d-rule `{s}` (expected sqrt-n-1, sqrt-half, const:<v> or pow:<alpha>)"
                ))),
            },
        }
    }
}

/// One sweep point; per-point failures are kept rather than aborting the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub d: f64,
    pub backend_lp: LpBackend,
    pub backend_tour: TourBackend,
    pub report: std::result::Result<RatioReport, String>,
}

/// Evaluate [`ratio_exact`] at every `n`, in parallel, keeping input order.
pub fn sweep(ns: &[usize], rule: DRule, lp: LpBackend, tour: TourBackend) -> Vec<SweepRow> {
    sweep_with_cap(ns, rule, lp, tour, exact::held_karp_cap())
}

/// [`sweep`] with an explicit Held-Karp point cap.
pub fn sweep_with_cap(
    ns: &[usize],
    rule: DRule,
    lp: LpBackend,
    tour: TourBackend,
    held_karp_cap: usize,
) -> Vec<SweepRow> {
    ns.par_iter()
        .map(|&n| {
            let d = rule.spacing(n);
            SweepRow {
                n,
                d,
                backend_lp: lp,
                backend_tour: tour,
                report: ratio_exact_with_cap(n, d, lp, tour, held_karp_cap).map_err(|e| e.to_string()),
            }
        })
        .collect()
}

pub const CSV_HEADER: &str = "n,d,lp_numeric,lp_closed,tour_numeric,tour_closed,ratio_numeric,\
ratio_closed,backend_lp,backend_tour,lp_closed_alt,ratio_closed_alt,error";

/// Render sweep rows as CSV, floats with 12 significant digits.
pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let opt = |v: Option<f64>| v.map(sig12).unwrap_or_default();
    for row in rows {
        let _ = match &row.report {
            Ok(r) => writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},",
                r.n,
                sig12(r.d),
                sig12(r.lp_numeric),
                sig12(r.lp_closed),
                sig12(r.tour_numeric),
                opt(r.tour_closed),
                sig12(r.ratio_numeric),
                opt(r.ratio_closed),
                r.backend_lp.name(),
                r.backend_tour.name(),
                sig12(r.lp_closed_alt),
                opt(r.ratio_closed_alt),
            ),
            Err(e) => writeln!(
                out,
                "{},{},,,,,,,{},{},,,\"{}\"",
                row.n,
                sig12(row.d),
                row.backend_lp.name(),
                row.backend_tour.name(),
                e.replace('"', "\"\"")
            ),
        };
    }
    out
}
