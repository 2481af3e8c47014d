//! Exact TSP oracles for small point sets.

use std::env;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instances::Distances;

/// Default point cap for [`held_karp`].
pub const HELD_KARP_CAP: usize = 20;

/// Point cap for [`brute_force`].
pub const BRUTE_FORCE_CAP: usize = 10;

/// Environment variable overriding [`HELD_KARP_CAP`].
pub const HELD_KARP_CAP_ENV: &str = "GAPLAB_HK_CAP";

/// Relative slack under which two partial tour lengths count as tied.
const TIE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tour {
    pub order: Vec<usize>,
    pub length: f64,
}

impl Tour {
    /// Build a tour from a visiting order, computing its closed length.
    pub fn from_order<D: Distances + ?Sized>(inst: &D, order: Vec<usize>) -> Result<Tour> {
        let n = inst.len();
        if order.len() != n {
            return Err(Error::Domain(format!("tour visits {} of {n} points", order.len())));
        }
        let mut seen = vec![false; n];
        for &v in &order {
            if v >= n {
                return Err(Error::IndexOutOfRange { index: v, len: n });
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::Domain(format!("point {v} visited twice")));
            }
        }
        let length = closed_length(inst, &order);
        Ok(Tour { order, length })
    }
}

/// Length of the closed walk through `order`.
pub fn closed_length<D: Distances + ?Sized>(inst: &D, order: &[usize]) -> f64 {
    if order.len() < 2 {
        return 0.0;
    }
    let body: f64 = order.windows(2).map(|w| inst.dist(w[0], w[1])).sum();
    body + inst.dist(order[order.len() - 1], order[0])
}

/// The Held-Karp point cap, honouring `GAPLAB_HK_CAP` when set.
pub fn held_karp_cap() -> usize {
    env::var(HELD_KARP_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&c: &usize| c > 0)
        .unwrap_or(HELD_KARP_CAP)
}

pub fn held_karp<D: Distances + ?Sized>(inst: &D) -> Result<Tour> {
    held_karp_with_cap(inst, held_karp_cap())
}

/// Optimal tour by bitmask dynamic programming over subsets of the points
/// other than point 0.
///
/// `suffix[S][j]` is the shortest path that starts at `j`, visits every point
/// of `S` and ends at point 0. The tour is then read off forwards from point
/// 0, always taking the smallest-index successor among the optimal ones, so
/// the returned order is the lexicographically smallest optimal tour.
pub fn held_karp_with_cap<D: Distances + ?Sized>(inst: &D, cap: usize) -> Result<Tour> {
    let n = inst.len();
    if n > cap {
        return Err(Error::TooLarge { points: n, cap });
    }
    if n < 3 {
        return Err(Error::Domain(format!("a tour needs >= 3 points, got {n}")));
    }
    // Others are 1..n, stored at bit/column v - 1.
    let k = n - 1;
    let full = (1usize << k) - 1;
    let dist: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| inst.dist(i, j)).collect()).collect();
    let mut suffix = vec![f64::INFINITY; (1usize << k) * k];
    for j in 0..k {
        suffix[j] = dist[j + 1][0];
    }
    for set in 1..=full {
        for j in 0..k {
            if set >> j & 1 == 1 {
                continue;
            }
            let mut best = f64::INFINITY;
            let mut rest = set;
            while rest != 0 {
                let t = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let cand = dist[j + 1][t + 1] + suffix[(set & !(1 << t)) * k + t];
                if cand < best {
                    best = cand;
                }
            }
            suffix[set * k + j] = best;
        }
    }

    // Forward reconstruction.
    let mut order = Vec::with_capacity(n);
    order.push(0);
    let mut remaining = full;
    let mut at = 0usize;
    let mut total = f64::INFINITY;
    while remaining != 0 {
        let mut best = f64::INFINITY;
        let mut pick = usize::MAX;
        let mut rest = remaining;
        let scores: Vec<(usize, f64)> = std::iter::from_fn(|| {
            if rest == 0 {
                return None;
            }
            let t = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some((t, dist[at][t + 1] + suffix[(remaining & !(1 << t)) * k + t]))
        })
        .collect();
        for &(_, s) in &scores {
            best = best.min(s);
        }
        for &(t, s) in &scores {
            if s <= best + TIE * best.abs().max(1.0) {
                pick = t;
                break;
            }
        }
        if order.len() == 1 {
            total = best;
        }
        remaining &= !(1 << pick);
        at = pick + 1;
        order.push(at);
    }
    let tour = Tour::from_order(inst, order)?;
    debug_assert!((tour.length - total).abs() <= 1e-9 * total.max(1.0));
    Ok(tour)
}

/// Optimal tour by enumerating every permutation with point 0 first.
pub fn brute_force<D: Distances + ?Sized>(inst: &D) -> Result<Tour> {
    let n = inst.len();
    if n > BRUTE_FORCE_CAP {
        return Err(Error::TooLarge { points: n, cap: BRUTE_FORCE_CAP });
    }
    if n < 3 {
        return Err(Error::Domain(format!("a tour needs >= 3 points, got {n}")));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best_len = closed_length(inst, &perm);
    let mut best = perm.clone();
    // Lexicographic successor over perm[1..]; the first strictly shorter
    // tour wins, so ties keep the lexicographically smallest order.
    while next_permutation(&mut perm[1..]) {
        let len = closed_length(inst, &perm);
        if len < best_len - TIE * best_len.max(1.0) {
            best_len = len;
            best.copy_from_slice(&perm);
        }
    }
    Tour::from_order(inst, best)
}

fn next_permutation(xs: &mut [usize]) -> bool {
    let Some(i) = xs.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = xs.iter().rposition(|&v| v > xs[i]).expect("successor exists");
    xs.swap(i, j);
    xs[i + 1..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{generate, InstanceSpec, PointSet};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn square() -> PointSet {
        PointSet::euclidean(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
    }

    #[test]
    fn unit_square() {
        let t = held_karp(&square()).unwrap();
        assert!((t.length - 4.0).abs() < 1e-12);
        assert_eq!(t.order, vec![0, 1, 2, 3]);
        assert!((brute_force(&square()).unwrap().length - 4.0).abs() < 1e-12);
    }

    #[test]
    fn triangle_perimeter() {
        let tri = PointSet::euclidean(&[(0.0, 0.0), (3.0, 0.0), (0.0, 4.0)]);
        assert!((held_karp(&tri).unwrap().length - 12.0).abs() < 1e-12);
        assert!((brute_force(&tri).unwrap().length - 12.0).abs() < 1e-12);
    }

    #[test]
    fn size_preconditions() {
        let pair = PointSet::euclidean(&[(0.0, 0.0), (1.0, 0.0)]);
        assert!(matches!(brute_force(&pair), Err(Error::Domain(_))));
        assert!(matches!(held_karp(&pair), Err(Error::Domain(_))));
        let g4 = generate(InstanceSpec::euclidean(4, 4.0)).unwrap();
        assert!(matches!(brute_force(&g4), Err(Error::TooLarge { points: 12, cap: 10 })));
        assert!(matches!(held_karp_with_cap(&g4, 11), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn matches_brute_force_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let n = rng.gen_range(3..=8);
            let coords: Vec<(f64, f64)> =
                (0..n).map(|_| (rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0))).collect();
            let pts = PointSet::euclidean(&coords);
            let a = held_karp(&pts).unwrap();
            let b = brute_force(&pts).unwrap();
            assert!((a.length - b.length).abs() < 1e-9);
            assert_eq!(a.order, b.order);
        }
    }

    #[test]
    fn length_invariant_under_rotation_and_reflection() {
        let g = generate(InstanceSpec::euclidean(3, 4.0)).unwrap();
        let t = held_karp(&g).unwrap();
        let mut order = t.order.clone();
        for _ in 0..order.len() {
            order.rotate_left(1);
            assert!((closed_length(&g, &order) - t.length).abs() < 1e-9);
            let mut rev = order.clone();
            rev.reverse();
            assert!((closed_length(&g, &rev) - t.length).abs() < 1e-9);
        }
    }

    #[test]
    fn tour_validation() {
        let sq = square();
        assert!(Tour::from_order(&sq, vec![0, 1, 1, 2]).is_err());
        assert!(Tour::from_order(&sq, vec![0, 1, 2]).is_err());
        assert!(Tour::from_order(&sq, vec![0, 1, 2, 7]).is_err());
        assert!((Tour::from_order(&sq, vec![0, 2, 1, 3]).unwrap().length - (2.0 + 2.0 * 2f64.sqrt())).abs() < 1e-12);
    }
}
