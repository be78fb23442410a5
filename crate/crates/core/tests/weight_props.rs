use extrapolab_core::dyadic::{Family, StepFunction};
use extrapolab_core::exponent::{recips, rescale, translation_params, Recip, ScaleSetup, SplitMode};
use extrapolab_core::sample::{random_symmetric_weights, random_weight};
use extrapolab_core::weights::{
    classical_a1, extend_symmetric, rescale_weights, symmetric_constant, weight_constant, wconst_char, Weight,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn weights(seed: u64, m: usize, level: u32, sigma: f64) -> Vec<Weight> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m).map(|_| Weight::step(random_weight(level, sigma, &mut rng).unwrap()).unwrap()).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

/// An admissible setup with `1/p ≤ 1` and `1/s ≤ 1/p`.
fn setup() -> impl Strategy<Value = ScaleSetup> {
    (1usize..=3).prop_flat_map(|m| {
        (prop::collection::vec((0.2f64..1.0, 0.05f64..0.95), m), 0.0f64..1.0).prop_map(move |(rt, u)| {
            let r: Vec<f64> = rt.iter().map(|(r, _)| r / m as f64).collect();
            let p: Vec<f64> = rt.iter().map(|(r, t)| r * t / m as f64).collect();
            let s = p.iter().sum::<f64>() * u;
            ScaleSetup::new(recips(&r).unwrap(), Recip::new(s).unwrap(), recips(&p).unwrap()).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn constant_at_least_one(s in setup(), seed in any::<u64>()) {
        let w = weights(seed, s.m(), 6, 0.5);
        let c = weight_constant(&w, &s, Family::Dyadic).unwrap().value;
        prop_assert!(c >= 1.0 - 1e-12, "{c}");
    }

    #[test]
    fn three_grids_dominate_dyadic(s in setup(), seed in any::<u64>()) {
        let w = weights(seed, s.m(), 6, 0.5);
        let d = weight_constant(&w, &s, Family::Dyadic).unwrap().value;
        let t = weight_constant(&w, &s, Family::ThreeGrid).unwrap().value;
        prop_assert!(t >= d);
    }

    #[test]
    fn symmetric_constant_is_permutation_invariant(s in setup(), seed in any::<u64>(), rot in 1usize..4) {
        let w = weights(seed, s.m(), 6, 0.5);
        let (ext, sym) = extend_symmetric(&w, &s).unwrap();
        let base = symmetric_constant(&ext, &sym, Family::Dyadic).unwrap().value;
        let k = rot % ext.len();
        let (mut e2, mut s2) = (ext.clone(), sym.clone());
        e2.rotate_left(k);
        s2.p.rotate_left(k);
        s2.r.rotate_left(k);
        prop_assert_eq!(symmetric_constant(&e2, &s2, Family::Dyadic).unwrap().value, base);
        let direct = weight_constant(&w, &s, Family::Dyadic).unwrap().value;
        prop_assert!(rel(direct, base) <= 1e-12);
    }

    #[test]
    fn translation_identity(s in setup(), seed in any::<u64>()) {
        let w = weights(seed, s.m(), 6, 0.5);
        let tr = translation_params(&s.p, &s.r, s.s, SplitMode::Generic).unwrap();
        let a = weight_constant(&w, &s, Family::Dyadic).unwrap().value;
        let b = weight_constant(&w, &tr.setup().unwrap(), Family::Dyadic).unwrap().value;
        prop_assert!(rel(a, b) <= 1e-12, "{a} vs {b}");
    }

    #[test]
    fn rescaling_identity(s in setup(), seed in any::<u64>(), alpha in 0.2f64..1.0) {
        let w = weights(seed, s.m(), 6, 0.5);
        let scaled = rescale(&s, alpha).unwrap();
        let lhs = weight_constant(&w, &scaled, Family::Dyadic).unwrap().value.powf(1.0 / alpha);
        let rhs = weight_constant(&rescale_weights(&w, alpha).unwrap(), &s, Family::Dyadic).unwrap().value;
        prop_assert!(rel(lhs, rhs) <= 1e-12, "{lhs} vs {rhs}");
    }

    #[test]
    fn dual_exponent_identity(seed in any::<u64>(), p in 1.05f64..20.0) {
        let w = weights(seed, 1, 7, 0.6);
        let inv = vec![w[0].pow(-1.0).unwrap()];
        let r = recips(&[1.0]).unwrap();
        let sp = ScaleSetup::new(r.clone(), Recip::INF, vec![Recip::from_exponent(p).unwrap()]).unwrap();
        let sd = ScaleSetup::new(r, Recip::INF, vec![Recip::new(1.0 - 1.0 / p).unwrap()]).unwrap();
        let a = weight_constant(&w, &sp, Family::Dyadic).unwrap().value;
        let b = weight_constant(&inv, &sd, Family::Dyadic).unwrap().value;
        prop_assert!(rel(a, b) <= 1e-12, "{a} vs {b}");
    }

    #[test]
    fn endpoint_is_a1_of_reciprocal(seed in any::<u64>()) {
        let w = weights(seed, 1, 7, 0.6);
        let s = ScaleSetup::new(recips(&[1.0]).unwrap(), Recip::INF, vec![Recip::INF]).unwrap();
        let a = weight_constant(&w, &s, Family::Dyadic).unwrap().value;
        let inv: StepFunction = w[0].pow(-1.0).unwrap().as_step().unwrap().clone();
        prop_assert!(rel(a, classical_a1(&inv)) <= 1e-12);
    }

    #[test]
    fn characterization_matches_constant(seed in any::<u64>(), m in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w: Vec<Weight> = random_symmetric_weights(6, m, 0.5, &mut rng)
            .unwrap()
            .into_iter()
            .map(|x| Weight::step(x).unwrap())
            .collect();
        let p: Vec<f64> = vec![1.0 / (m + 1) as f64; m + 1];
        let sym = extrapolab_core::exponent::SymmetricTuple { p: recips(&p).unwrap(), r: recips(&vec![1.0; m + 1]).unwrap() };
        let c = symmetric_constant(&w, &sym, Family::Dyadic).unwrap();
        let ch = wconst_char(&w, &sym).unwrap();
        // With Σ 1/p_j = 1 the |Q| factors cancel and the two suprema coincide.
        prop_assert!(rel(ch.value, c.value) <= 1e-12, "{} vs {}", ch.value, c.value);
    }
}
