use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gaplab::ratio::{self, LpBackend, TourBackend};
use gaplab::subtour::{self, EdgeValueMap};
use gaplab::{generate, gline, InstanceSpec};

/// Smallest `x(delta(S))` over all proper subsets `S` containing point 0.
fn brute_min_cut(x: &EdgeValueMap) -> f64 {
    let n = x.points();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << (n - 1)) {
        let side = |v: usize| v == 0 || mask >> (v - 1) & 1 == 1;
        if (0..n).all(side) {
            continue;
        }
        let mut cut = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                if side(i) != side(j) {
                    cut += x.get(i, j);
                }
            }
        }
        best = best.min(cut);
    }
    best
}

fn random_support(rng: &mut ChaCha8Rng, n: usize) -> EdgeValueMap {
    let mut x = EdgeValueMap::zeros(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.35) {
                x.set(i, j, f64::from(rng.gen_range(1u8..=4)) / 4.0);
            }
        }
    }
    x
}

#[test]
fn separation_agrees_with_subset_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..300 {
        let n = rng.gen_range(3..=12);
        let x = random_support(&mut rng, n);
        let brute = brute_min_cut(&x);
        match subtour::separate(&x) {
            Some(cut) => {
                assert!(brute < 2.0 - 1e-6);
                let inside: Vec<bool> = (0..n).map(|v| cut.side.contains(&v)).collect();
                let mut value = 0.0;
                for i in 0..n {
                    for j in i + 1..n {
                        if inside[i] != inside[j] {
                            value += x.get(i, j);
                        }
                    }
                }
                assert!(value < 2.0 - 1e-6, "reported cut has weight {value}");
            }
            None => assert!(brute >= 2.0 - 1e-6, "missed a cut of weight {brute}"),
        }
    }
}

#[test]
fn cutting_plane_optimum_is_subtour_feasible() {
    for n in 3..=5 {
        for d in [0.5, 2.0, 4.0] {
            let inst = generate(InstanceSpec::euclidean(n, d)).unwrap();
            let (x, _) = subtour::solve_subtour_lp(&inst).unwrap();
            assert!(x.degree_violation() < 1e-7);
            assert!(x.bound_violation() < 1e-7);
            assert!(brute_min_cut(&x) >= 2.0 - 1e-6);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ratio_bounds(half in 2usize..200, d in 4.0f64..30.0) {
        let n = 2 * half;
        let r = ratio::ratio_exact(n, d, LpBackend::ClosedForm, TourBackend::ZVector).unwrap();
        let lb = ratio::ratio_lower_bound(n, d).unwrap();
        prop_assert!(r.ratio_numeric >= 1.0 - 1e-9);
        prop_assert!(r.ratio_numeric >= lb - 1e-6);
        prop_assert!(r.ratio_numeric < 1.5);
        prop_assert_eq!(r.ratio_numeric, r.tour_numeric / r.lp_numeric);
    }

    #[test]
    fn half_integral_value_matches_closed_form(n in 3usize..40, d in 0.1f64..20.0) {
        let inst = generate(InstanceSpec::euclidean(n, d)).unwrap();
        let x = subtour::build_half_integral(&inst).unwrap();
        prop_assert!(x.degree_violation() < 1e-12);
        prop_assert!((x.objective_value() - subtour::closed_form_lp_value(n, d)).abs() < 1e-9);
    }

    #[test]
    fn f_growth_chain(n in 18usize..400, k in 1usize..200) {
        let (nf, kf) = (n as f64, k as f64);
        prop_assert!(2.0 * kf * nf - nf >= (nf * nf + 4.0 * nf * kf * (kf - 1.0)).sqrt() - 1e-9);
    }

    #[test]
    fn zvector_never_below_lower_bound(half in 2usize..150, d in 4.0f64..25.0) {
        let n = 2 * half;
        let (_, best) = gline::optimal_zvector(n, d).unwrap();
        prop_assert!(gline::tour_lower_bound(n, d).unwrap() <= best + 1e-9);
    }
}
