//! Optimal tours of `G(n, d)` through z-structured tours.
//!
//! A z-structured tour covers the two lower rows with alternately oriented
//! z-shaped paths. The `i`-th path spans `z_i` consecutive columns: it runs
//! along one row, jumps diagonally back to the first column on the other row
//! and runs along that row. Consecutive paths are joined by unit edges and
//! the tour is closed by the top row and two vertical edges from the top row
//! down to the middle row. The vector `(z_1, .., z_k)` with `sum z_i = n`
//! fully determines the tour.
//!
//! Everything here assumes the Euclidean metric and, following the insertion
//! cost analysis it is built on, line spacing `d >= 4`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::Tour;
use crate::instances::{Instance, Metric, Row};

/// Smallest line spacing for which the insertion-cost results hold.
pub const MIN_SPACING: f64 = 4.0;

fn require_spacing(d: f64) -> Result<()> {
    if d >= MIN_SPACING {
        Ok(())
    } else {
        Err(Error::Domain(format!("line spacing d must be >= {MIN_SPACING}, got {d}")))
    }
}

/// Length of a z-shaped path covering `points` columns: two horizontal runs of
/// `points - 1` and one diagonal, `2(i-1) + sqrt((i-1)^2 + d^2)`.
pub fn z_path_length(points: usize, d: f64) -> f64 {
    debug_assert!(points >= 1);
    z_path_length_real(points as f64, d)
}

/// [`z_path_length`] extended to real arguments.
pub fn z_path_length_real(points: f64, d: f64) -> f64 {
    let run = points - 1.0;
    2.0 * run + run.hypot(d)
}

/// How a segment insertion cost is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertionCost {
    /// Cheapest insertion, `k-2 + sqrt((k-2)^2 + 4d^2)` for even `k` and the
    /// mean of the two neighbouring square roots for odd `k`.
    Exact,
    /// The coarser bound `k - 2 + max(2d, k - 2)`.
    LowerBound,
}

/// Cost of inserting a run of `k` inner points that contains neither `g_1`
/// nor `g_{n-2}` between two adjacent bottom-row points.
pub fn insertion_cost_inner(k: usize, d: f64, model: InsertionCost) -> Result<f64> {
    require_spacing(d)?;
    if k == 0 {
        return Err(Error::Domain("segment must contain at least one point".into()));
    }
    let k = k as f64;
    let dd = 4.0 * d * d;
    Ok(match model {
        InsertionCost::LowerBound => k - 2.0 + (2.0 * d).max(k - 2.0),
        InsertionCost::Exact if (k as usize).is_multiple_of(2) => k - 2.0 + ((k - 2.0).powi(2) + dd).sqrt(),
        InsertionCost::Exact => {
            k - 2.0 + 0.5 * (((k - 1.0).powi(2) + dd).sqrt() + ((k - 3.0).powi(2) + dd).sqrt())
        }
    })
}

/// Cost of inserting a run of `k` inner points containing `g_1` (or
/// `g_{n-2}`) by attaching it to the middle-row end point: `k - d + sqrt(k^2 + d^2)`.
pub fn insertion_cost_end(k: usize, d: f64) -> Result<f64> {
    require_spacing(d)?;
    if k == 0 {
        return Err(Error::Domain("segment must contain at least one point".into()));
    }
    let cost = end_attach_cost(k as f64, d);
    debug_assert!(end_dominance_margin(k, d) >= -1e-12);
    Ok(cost)
}

fn end_attach_cost(k: f64, d: f64) -> f64 {
    k - d + k.hypot(d)
}

/// `(k - 2 + sqrt((k-2)^2 + 4d^2)) - (k - d + sqrt(k^2 + d^2))`: how much more an
/// end segment costs when routed to the bottom row instead of attached to the
/// middle-row end point. Nonnegative for `d >= 4`.
pub fn end_dominance_margin(k: usize, d: f64) -> f64 {
    let k = k as f64;
    let bottom = k - 2.0 + (k - 2.0).hypot(2.0 * d);
    bottom - end_attach_cost(k, d)
}

/// Counts of middle-row points covered by each z-path.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct ZVector(Vec<usize>);

impl ZVector {
    /// Validate that all entries are positive and sum to `n`.
    pub fn new(entries: Vec<usize>, n: usize) -> Result<ZVector> {
        if entries.is_empty() {
            return Err(Error::Domain("z-vector must be non-empty".into()));
        }
        if entries.contains(&0) {
            return Err(Error::Domain("z-vector entries must be positive".into()));
        }
        let sum: usize = entries.iter().sum();
        if sum != n {
            return Err(Error::Domain(format!("z-vector sums to {sum}, expected n = {n}")));
        }
        Ok(ZVector(entries))
    }

    /// `k` entries differing by at most one; the `n mod k` larger entries come last.
    pub fn balanced(n: usize, k: usize) -> Result<ZVector> {
        if k == 0 || k > n {
            return Err(Error::Domain(format!("cannot split {n} columns into {k} z-paths")));
        }
        let (q, r) = (n / k, n % k);
        let entries = std::iter::repeat_n(q, k - r).chain(std::iter::repeat_n(q + 1, r)).collect();
        Ok(ZVector(entries))
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

/// Length of the tour described by `z` on `G(n, d)`, `n = sum z`.
///
/// For even `k` this is `n + k + 2d - 2 + sum c(z_i)`. A single z-path
/// (`k = 1`) cannot end on the middle row, so its tour is the one that runs
/// the top row, descends at the right end, sweeps the middle row leftwards to
/// column 2, jumps to the bottom-right corner, sweeps the bottom row and climbs
/// the left end: `3d + 3n - 4 + sqrt((n-2)^2 + d^2)`. Odd `k >= 3` does not
/// describe a z-structured tour.
pub fn zvector_tour_length(z: &ZVector, d: f64) -> Result<f64> {
    let n = z.total() as f64;
    let k = z.len();
    if k == 1 {
        return Ok(single_path_length(n, d));
    }
    if k % 2 == 1 {
        return Err(Error::Domain(format!("z-vector of odd length {k} > 1 has no z-structured tour")));
    }
    let paths: f64 = z.entries().iter().map(|&zi| z_path_length(zi, d)).sum();
    Ok(n + k as f64 + 2.0 * d - 2.0 + paths)
}

fn single_path_length(n: f64, d: f64) -> f64 {
    3.0 * d + 3.0 * n - 4.0 + (n - 2.0).hypot(d)
}

/// [`zvector_tour_length`] of [`ZVector::balanced`] in constant time.
fn balanced_length(n: usize, k: usize, d: f64) -> f64 {
    if k == 1 {
        return single_path_length(n as f64, d);
    }
    let (q, r) = (n / k, n % k);
    let paths = (k - r) as f64 * z_path_length(q, d)
        + if r > 0 { r as f64 * z_path_length(q + 1, d) } else { 0.0 };
    n as f64 + k as f64 + 2.0 * d - 2.0 + paths
}

/// A z-structured tour with its explicit point order.
#[derive(Debug, Clone, PartialEq)]
pub struct ZTour {
    pub zvec: ZVector,
    pub length: f64,
    pub tour: Tour,
}

impl ZTour {
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            z: &'a ZVector,
            length: f64,
            order: &'a [usize],
        }
        serde_json::to_string(&Out { z: &self.zvec, length: self.length, order: &self.tour.order })
            .expect("z-tour serializes")
    }
}

/// Realize `z` as an explicit tour of `inst`.
pub fn tour_from_zvector(inst: &Instance, z: &ZVector) -> Result<ZTour> {
    if inst.metric() != Metric::EUCLIDEAN {
        return Err(Error::Unsupported("z-structured tours assume the Euclidean metric".into()));
    }
    require_spacing(inst.d())?;
    let n = inst.n();
    if z.total() != n {
        return Err(Error::Domain(format!("z-vector sums to {}, instance has n = {n}", z.total())));
    }
    let length = zvector_tour_length(z, inst.d())?;
    let at = |c, r| inst.index(c, r);
    let mut order = Vec::with_capacity(inst.len());

    if z.len() == 1 {
        order.extend((1..=n).map(|c| at(c, Row::Upper)));
        order.extend((2..=n).rev().map(|c| at(c, Row::Middle)));
        order.extend((1..=n).rev().map(|c| at(c, Row::Lower)));
        order.push(at(1, Row::Middle));
    } else {
        order.push(at(1, Row::Upper));
        let mut first = 1;
        for (i, &zi) in z.entries().iter().enumerate() {
            let cols = first..first + zi;
            let (a, b) = if i % 2 == 0 { (Row::Middle, Row::Lower) } else { (Row::Lower, Row::Middle) };
            order.extend(cols.clone().map(|c| at(c, a)));
            order.extend(cols.map(|c| at(c, b)));
            first += zi;
        }
        order.extend((2..=n).rev().map(|c| at(c, Row::Upper)));
    }

    let tour = Tour::from_order(inst, order)?;
    debug_assert!((tour.length - length).abs() < 1e-9 * length.max(1.0));
    Ok(ZTour { zvec: z.clone(), length, tour })
}

/// Shortest z-structured tour of `G(n, d)` for even `n`.
///
/// Candidates are the single z-path and the balanced vectors of every even
/// length `2, 4, .., n`. Ties go to the shorter vector.
pub fn optimal_zvector(n: usize, d: f64) -> Result<(ZVector, f64)> {
    require_spacing(d)?;
    if n < 2 || n % 2 == 1 {
        return Err(Error::Domain(format!("n must be even and >= 2, got {n}")));
    }
    let mut best_k = 1;
    let mut best = balanced_length(n, 1, d);
    for k in (2..=n).step_by(2) {
        let len = balanced_length(n, k, d);
        if len < best {
            best = len;
            best_k = k;
        }
    }
    Ok((ZVector::balanced(n, best_k)?, best))
}

/// `f(k) = 3n - 2k + 2d - 2 + sqrt((n - 2k)^2 + 4 d^2 k^2)`: the tour length of
/// `2k` equal z-paths of real width `n / 2k`.
pub fn f_value(k: f64, d: f64, n: f64) -> f64 {
    3.0 * n - 2.0 * k + 2.0 * d - 2.0 + (n - 2.0 * k).hypot(2.0 * d * k)
}

/// `4n + 2d - 2 - 2n / (d + 1)`, a lower bound on the optimal tour length.
pub fn tour_lower_bound(n: usize, d: f64) -> Result<f64> {
    require_spacing(d)?;
    let n = n as f64;
    Ok(4.0 * n + 2.0 * d - 2.0 - 2.0 * n / (d + 1.0))
}

/// `min over 1 <= k <= n-2 of max(3n + 2k(d-1), 4(n-k) + 2d + 2)`, the bound
/// before relaxing `k` to the crossing point of the two linear terms.
pub fn segment_count_bound(n: usize, d: f64) -> Result<f64> {
    require_spacing(d)?;
    if n < 3 {
        return Err(Error::Domain(format!("need n >= 3, got {n}")));
    }
    let nf = n as f64;
    Ok((1..=n - 2)
        .map(|k| {
            let k = k as f64;
            (3.0 * nf + 2.0 * k * (d - 1.0)).max(4.0 * (nf - k) + 2.0 * d + 2.0)
        })
        .fold(f64::INFINITY, f64::min))
}

/// Optimal tour length of `G(n, sqrt(n - 1))` for even `n >= 18`:
/// `4n - 4 + 2 sqrt(n - 1)`.
pub fn closed_form_tour_sqrt(n: usize) -> Result<f64> {
    if n < 18 || n % 2 == 1 {
        return Err(Error::Domain(format!("closed-form tour needs even n >= 18, got {n}")));
    }
    let n = n as f64;
    Ok(4.0 * n - 4.0 + 2.0 * (n - 1.0).sqrt())
}

/// `a + sqrt(b^2 + c) >= sqrt((a + b)^2 + c)` for nonnegative `a, b, c`,
/// checked with `1e-12` relative slack.
pub fn sqrt_inequality_holds(a: f64, b: f64, c: f64) -> Result<bool> {
    if a < 0.0 || b < 0.0 || c < 0.0 || [a, b, c].iter().any(|v| v.is_nan()) {
        return Err(Error::Domain(format!("arguments must be nonnegative, got ({a}, {b}, {c})")));
    }
    let lhs = a + (b * b + c).sqrt();
    let rhs = ((a + b).powi(2) + c).sqrt();
    Ok(lhs - rhs >= -1e-12 * rhs.max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{generate, InstanceSpec};
    use proptest::prelude::*;

    /// Positional oracle: insert the run `(1, d) .. (k, d)` between `(a, 0)` and
    /// `(a + 1, 0)` for every `a` in `1..=k` and keep the cheapest.
    fn positional_insertion(k: usize, d: f64) -> f64 {
        (1..=k)
            .map(|a| {
                let (k, a) = (k as f64, a as f64);
                (k - 1.0) + (a - 1.0).hypot(d) + (k - a - 1.0).hypot(d) - 1.0
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn z_path_examples() {
        assert_eq!(z_path_length(1, 7.5), 7.5);
        assert!((z_path_length(2, 4.0) - (2.0 + 17f64.sqrt())).abs() < 1e-12);
        for d in [4.0, 10.0] {
            let diffs: Vec<f64> = (1..=101).map(|i| z_path_length(i + 1, d) - z_path_length(i, d)).collect();
            assert!(diffs.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        }
    }

    #[test]
    fn inner_insertion_examples() {
        assert!((insertion_cost_inner(2, 4.0, InsertionCost::Exact).unwrap() - 8.0).abs() < 1e-12);
        let k3 = 1.0 + 0.5 * 68f64.sqrt() + 4.0;
        assert!((insertion_cost_inner(3, 4.0, InsertionCost::Exact).unwrap() - k3).abs() < 1e-12);
        assert!((positional_insertion(2, 4.0) - 8.0).abs() < 1e-12);
        assert!((positional_insertion(3, 4.0) - k3).abs() < 1e-12);
        assert!(matches!(insertion_cost_inner(3, 3.9, InsertionCost::Exact), Err(Error::Domain(_))));
    }

    #[test]
    fn inner_insertion_matches_positional_oracle() {
        for d in [4.0, 6.0, 10.0, 17f64.sqrt()] {
            for k in 1..=40 {
                let exact = insertion_cost_inner(k, d, InsertionCost::Exact).unwrap();
                let lower = insertion_cost_inner(k, d, InsertionCost::LowerBound).unwrap();
                assert!((exact - positional_insertion(k, d)).abs() < 1e-9, "k={k} d={d}");
                assert!(lower <= exact + 1e-12, "k={k} d={d}");
            }
        }
    }

    #[test]
    fn end_insertion() {
        assert!((insertion_cost_end(1, 4.0).unwrap() - (17f64.sqrt() - 3.0)).abs() < 1e-12);
        assert!((insertion_cost_end(4, 4.0).unwrap() - 32f64.sqrt()).abs() < 1e-12);
        assert!(insertion_cost_end(4, 2.0).is_err());
        for d in 4..=12 {
            for k in 1..=60 {
                assert!(end_dominance_margin(k, d as f64) >= 0.0, "k={k} d={d}");
            }
        }
    }

    #[test]
    fn zvector_validation() {
        assert!(ZVector::new(vec![2, 2], 4).is_ok());
        assert!(ZVector::new(vec![2, 1], 4).is_err());
        assert!(ZVector::new(vec![4, 0], 4).is_err());
        assert!(ZVector::new(vec![], 0).is_err());
        assert_eq!(ZVector::balanced(10, 4).unwrap().entries(), &[2, 2, 3, 3]);
        assert!(ZVector::balanced(3, 4).is_err());
    }

    #[test]
    fn figure_tour_g28_3() {
        // z-structure drawings use d = 3 for legibility; the length identity
        // does not depend on d >= 4, so check the arithmetic directly.
        let z = ZVector::new(vec![4, 3, 3, 4, 4, 3, 4, 3], 28).unwrap();
        let c: f64 = z.entries().iter().map(|&zi| z_path_length(zi, 3.0)).sum();
        let len = zvector_tour_length(&z, 3.0).unwrap();
        assert!((len - (28.0 + 8.0 + 6.0 - 2.0 + c)).abs() < 1e-12);

        let inst = generate(InstanceSpec::euclidean(28, 4.0)).unwrap();
        let zt = tour_from_zvector(&inst, &z).unwrap();
        assert!((zt.tour.length - zt.length).abs() < 1e-9);
        assert!(tour_from_zvector(&generate(InstanceSpec::euclidean(28, 3.0)).unwrap(), &z).is_err());
    }

    #[test]
    fn single_path_g4_4() {
        let inst = generate(InstanceSpec::euclidean(4, 4.0)).unwrap();
        let z = ZVector::new(vec![4], 4).unwrap();
        let zt = tour_from_zvector(&inst, &z).unwrap();
        let expected = 12.0 + 12.0 - 4.0 + 20f64.sqrt();
        assert!((zt.length - expected).abs() < 1e-12);
        assert!((zt.tour.length - expected).abs() < 1e-9);
        let bad = ZVector::new(vec![1, 2, 1], 4).unwrap();
        assert!(tour_from_zvector(&inst, &bad).is_err());
        assert!(tour_from_zvector(&inst, &ZVector::new(vec![5], 5).unwrap()).is_err());
    }

    #[test]
    fn optimal_zvector_preconditions() {
        assert!(optimal_zvector(17, 4.0).is_err());
        assert!(optimal_zvector(18, 3.0).is_err());
        let (z, len) = optimal_zvector(18, 17f64.sqrt()).unwrap();
        assert_eq!(z.entries(), &[9, 9]);
        assert!((len - (68.0 + 2.0 * 17f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn f_value_identities() {
        for n in (18..=200).step_by(2) {
            let nf = n as f64;
            let d = (nf - 1.0).sqrt();
            assert!((f_value(1.0, d, nf) - (4.0 * nf - 4.0 + 2.0 * d)).abs() < 1e-9);
            let dh = (nf / 2.0 - 1.0).sqrt();
            assert!((f_value(2.0, dh, nf) - (4.0 * nf - 6.0 + 2.0 * dh)).abs() < 1e-9);
            // f(k) is the balanced length when 2k divides n.
            for k in 1..=n / 2 {
                if n % (2 * k) == 0 {
                    let z = ZVector::balanced(n, 2 * k).unwrap();
                    let len = zvector_tour_length(&z, d).unwrap();
                    assert!((len - f_value(k as f64, d, nf)).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn lower_bounds() {
        let s = 17f64.sqrt();
        let lb = tour_lower_bound(18, s).unwrap();
        assert!((lb - (72.0 + 2.0 * s - 2.0 - 36.0 / (s + 1.0))).abs() < 1e-12);
        assert!((lb - 71.22).abs() < 0.01);
        assert!(tour_lower_bound(18, 1.0).is_err());
        for n in (4..=40).step_by(2) {
            for d in [4.0, 5.0, 8.0] {
                let (_, opt) = optimal_zvector(n, d).unwrap();
                let lb = tour_lower_bound(n, d).unwrap();
                assert!(lb <= segment_count_bound(n, d).unwrap() + 1e-9);
                assert!(lb <= opt + 1e-9, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn closed_form_tour() {
        assert!(closed_form_tour_sqrt(17).is_err());
        assert!(closed_form_tour_sqrt(16).is_err());
        assert!((closed_form_tour_sqrt(18).unwrap() - (68.0 + 2.0 * 17f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn sqrt_inequality_edges() {
        assert!(sqrt_inequality_holds(0.0, 3.0, 5.0).unwrap());
        assert!(sqrt_inequality_holds(2.0, 3.0, 0.0).unwrap());
        assert!(sqrt_inequality_holds(-1.0, 0.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn sqrt_inequality_random(a in 0.0..100.0f64, b in 0.0..100.0f64, c in 0.0..100.0f64) {
            prop_assert!(sqrt_inequality_holds(a, b, c).unwrap());
        }

        #[test]
        fn balanced_beats_unbalanced(
            half_k in 1usize..6,
            extra in 0usize..30,
            cuts in prop::collection::vec(0usize..1000, 12),
            d in 4.0..12.0f64,
        ) {
            let k = 2 * half_k;
            let n = k + extra;
            // Random composition of n into k positive parts.
            let mut entries = vec![1usize; k];
            for (i, c) in cuts.iter().cycle().take(extra).enumerate() {
                entries[(c + i) % k] += 1;
            }
            let z = ZVector::new(entries.clone(), n).unwrap();
            let bal = ZVector::balanced(n, k).unwrap();
            prop_assert!(
                zvector_tour_length(&bal, d).unwrap() <= zvector_tour_length(&z, d).unwrap() + 1e-9
            );
            // Order of the entries does not matter.
            entries.reverse();
            let rev = ZVector::new(entries, n).unwrap();
            prop_assert!((zvector_tour_length(&rev, d).unwrap() - zvector_tour_length(&z, d).unwrap()).abs() < 1e-9);
        }

        #[test]
        fn explicit_tour_matches_formula(half_k in 1usize..5, extra in 0usize..12, d in 4.0..9.0f64) {
            let k = 2 * half_k;
            let n = k + extra;
            let inst = generate(InstanceSpec::euclidean(n, d)).unwrap();
            let zt = tour_from_zvector(&inst, &ZVector::balanced(n, k).unwrap()).unwrap();
            prop_assert!((zt.tour.length - zt.length).abs() < 1e-9);
        }
    }
}
