mod common;

use locc_core::convertibility::{build_profiles, classify_locc_pair, majorize, DEFAULT_TOLERANCE};
use locc_core::entanglement::{default_alpha_grid, Block};
use locc_core::{Direction, ReducedSpectrum, RenyiCurve, SchmidtVector};
use proptest::prelude::*;

const TOL: f64 = DEFAULT_TOLERANCE;

fn normalize(raw: Vec<f64>) -> Vec<f64> {
    let total: f64 = raw.iter().sum();
    if total <= 0.0 {
        let n = raw.len() as f64;
        return vec![1.0 / n; raw.len()];
    }
    raw.iter().map(|x| x / total).collect()
}

/// Probability vectors with occasional exact zeros and ties.
fn prob(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![6 => 0.0..1.0f64, 1 => Just(0.0), 1 => Just(0.25)], 1..=max_len)
        .prop_map(normalize)
}

fn sv(p: &[f64]) -> SchmidtVector {
    SchmidtVector::new(p.to_vec()).unwrap()
}

/// `t·x + (1-t)·Px` where `P` swaps entries `i` and `j`; majorized by `x`.
fn t_transform(x: &[f64], i: usize, j: usize, t: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[i] = t * x[i] + (1.0 - t) * x[j];
    y[j] = t * x[j] + (1.0 - t) * x[i];
    y
}

fn chain() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    prob(16).prop_flat_map(|x| {
        let d = x.len();
        (Just(x), 0..d, 0..d, 0.0..=1.0f64, 0..d, 0..d, 0.0..=1.0f64).prop_map(|(x, i, j, s, k, l, t)| {
            let y = t_transform(&x, i, j, s);
            let z = t_transform(&y, k, l, t);
            (x, y, z)
        })
    })
}

fn entropies(p: &[f64]) -> Vec<f64> {
    RenyiCurve::compute(p, &default_alpha_grid()).unwrap().points().into_iter().map(|(_, s)| s).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn reflexive(a in prob(16)) {
        prop_assert_eq!(majorize(&sv(&a), &sv(&a), TOL).direction, Direction::BothWays);
    }

    #[test]
    fn swapping_arguments_swaps_direction(a in prob(16), b in prob(16)) {
        let ab = majorize(&sv(&a), &sv(&b), TOL);
        let ba = majorize(&sv(&b), &sv(&a), TOL);
        prop_assert_eq!(ab.direction.forward(), ba.direction.backward());
        prop_assert_eq!(ab.direction.backward(), ba.direction.forward());
        prop_assert_eq!(ab.forward_witness, ba.backward_witness);
    }

    #[test]
    fn antisymmetric_up_to_tolerance(a in prob(8), b in prob(8)) {
        if majorize(&sv(&a), &sv(&b), TOL).direction == Direction::BothWays {
            let (x, y) = (common::sorted_desc(a), common::sorted_desc(b));
            for k in 0..x.len().max(y.len()) {
                let (p, q) = (x.get(k).copied().unwrap_or(0.0), y.get(k).copied().unwrap_or(0.0));
                prop_assert!((p - q).abs() <= 2.0 * TOL);
            }
        }
    }

    #[test]
    fn transitive_along_mixing_chains((x, y, z) in chain()) {
        prop_assert!(majorize(&sv(&y), &sv(&x), TOL).direction.forward());
        prop_assert!(majorize(&sv(&z), &sv(&y), TOL).direction.forward());
        prop_assert!(majorize(&sv(&z), &sv(&x), TOL).direction.forward());
    }

    #[test]
    fn transitive_on_random_triples(a in prob(4), b in prob(4), c in prob(4)) {
        let ab = majorize(&sv(&a), &sv(&b), 0.0).direction.forward();
        let bc = majorize(&sv(&b), &sv(&c), 0.0).direction.forward();
        if ab && bc {
            prop_assert!(majorize(&sv(&a), &sv(&c), 0.0).direction.forward());
        }
    }

    #[test]
    fn uniform_and_point_mass_are_extremes(a in prob(16)) {
        let d = a.len();
        let uniform = vec![1.0 / d as f64; d];
        let mut point = vec![0.0; d];
        point[0] = 1.0;
        prop_assert!(majorize(&sv(&uniform), &sv(&a), TOL).direction.forward());
        prop_assert!(majorize(&sv(&a), &sv(&point), TOL).direction.forward());
    }

    #[test]
    fn witnesses_match_partial_sums(a in prob(16), b in prob(16)) {
        let v = majorize(&sv(&a), &sv(&b), TOL);
        let d = a.len().max(b.len());
        let (sa, sb) = (sv(&a).partial_sums(d), sv(&b).partial_sums(d));
        let first_fail = (0..d).find(|&l| sb[l] < sa[l] - TOL).map(|l| l + 1);
        prop_assert_eq!(v.forward_witness, first_fail);
        prop_assert_eq!(v.direction.forward(), first_fail.is_none());
    }

    #[test]
    fn majorization_orders_renyi_entropies((x, y, z) in chain()) {
        // z → y → x, so entropies must not increase along the chain
        let (sx, sy, sz) = (entropies(&x), entropies(&y), entropies(&z));
        for k in 0..sx.len() {
            prop_assert!(sz[k] >= sy[k] - 1e-9, "alpha index {}: {} < {}", k, sz[k], sy[k]);
            prop_assert!(sy[k] >= sx[k] - 1e-9);
        }
    }

    #[test]
    fn comparable_random_pairs_order_entropies(a in prob(6), b in prob(6)) {
        if majorize(&sv(&a), &sv(&b), 0.0).direction == Direction::LowerToHigher {
            for (sa, sb) in entropies(&a).into_iter().zip(entropies(&b)) {
                prop_assert!(sa >= sb - 1e-9);
            }
        }
    }

    #[test]
    fn pair_verdicts_agree_with_profile_increments(raw in prop::collection::vec(prop::collection::vec(0.0..1.0f64, 4).prop_map(normalize), 6)) {
        let spectra: Vec<ReducedSpectrum> = raw
            .into_iter()
            .enumerate()
            .map(|(k, l)| ReducedSpectrum::from_lambdas(8, 0.5 + 0.1 * k as f64, Block::pair(0), l).unwrap())
            .collect();
        let profile = build_profiles(&spectra).unwrap();
        for k in 0..spectra.len() - 1 {
            let v = classify_locc_pair(&spectra[k], &spectra[k + 1], TOL).unwrap();
            let rising = [&profile.f1, &profile.f2, &profile.f3].iter().all(|f| f[k + 1] - f[k] >= -TOL);
            let falling = [&profile.f1, &profile.f2, &profile.f3].iter().all(|f| f[k + 1] - f[k] <= TOL);
            prop_assert_eq!(v.direction.forward(), rising);
            prop_assert_eq!(v.direction.backward(), falling);
        }
    }
}
