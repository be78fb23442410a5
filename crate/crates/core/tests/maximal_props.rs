use extrapolab_core::dyadic::{Family, StepFunction};
use extrapolab_core::exponent::{recips, Recip, ScaleSetup};
use extrapolab_core::maximal::{maximal, maximal_dyadic, n_operator, weighted_dyadic_maximal, NOperator};
use extrapolab_core::sample::{random_function, random_weight};
use extrapolab_core::weights::{weight_constant, Weight};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn functions(seed: u64, m: usize, level: u32) -> Vec<StepFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m).map(|_| random_function(level, &mut rng).unwrap()).collect()
}

/// Strictly admissible `(r, ∞)` setups.
fn setup() -> impl Strategy<Value = ScaleSetup> {
    prop::collection::vec((0.2f64..1.0, 0.05f64..0.95), 1..=3).prop_map(|rt| {
        let r: Vec<f64> = rt.iter().map(|(r, _)| *r).collect();
        let p: Vec<f64> = rt.iter().map(|(r, t)| r * t).collect();
        ScaleSetup::new(recips(&r).unwrap(), Recip::INF, recips(&p).unwrap()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn maximal_is_monotone(s in setup(), seed in any::<u64>(), family in prop_oneof![Just(Family::Dyadic), Just(Family::ThreeGrid)]) {
        let m = s.m();
        let f = functions(seed, m, 6);
        let extra = functions(seed ^ 0x9e37, m, 6);
        let g: Vec<StepFunction> = f.iter().zip(&extra).map(|(a, b)| a.zip_with(b, |x, y| x + y).unwrap()).collect();
        let mf = maximal(&f, &s.r, family).unwrap().total;
        let mg = maximal(&g, &s.r, family).unwrap().total;
        for (a, b) in mf.values().iter().zip(mg.values()) {
            prop_assert!(*a <= b * (1.0 + 1e-13));
        }
    }

    #[test]
    fn maximal_is_homogeneous(s in setup(), seed in any::<u64>(), c in prop::collection::vec(0.0f64..20.0, 3)) {
        let m = s.m();
        let f = functions(seed, m, 6);
        let scaled: Vec<StepFunction> = f.iter().zip(&c).map(|(x, cj)| x.map(|v| v * cj).unwrap()).collect();
        let k: f64 = c[..m].iter().product();
        let a = maximal_dyadic(&f, &s.r).unwrap();
        let b = maximal_dyadic(&scaled, &s.r).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x * k - y).abs() <= 1e-12 * y.max(x * k).max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn unit_weight_matches_unweighted(seed in any::<u64>(), rho in 0.0f64..2.0) {
        let f = functions(seed, 1, 7);
        let rho = Recip::new(rho).unwrap();
        let ones = StepFunction::constant(7, 1.0).unwrap();
        let a = weighted_dyadic_maximal(&ones, rho, &f[0]).unwrap();
        let b = maximal_dyadic(&f, &[rho]).unwrap();
        prop_assert_eq!(a.values(), b.values());
    }

    #[test]
    fn n_operators_dominate_maximal(s in setup(), seed in any::<u64>()) {
        let m = s.m();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w: Vec<StepFunction> = (0..m).map(|_| random_weight(6, 0.5, &mut rng).unwrap()).collect();
        let f: Vec<StepFunction> = (0..m).map(|_| random_function(6, &mut rng).unwrap()).collect();
        let ws: Vec<Weight> = w.iter().map(|x| Weight::step(x.clone()).unwrap()).collect();
        let c = weight_constant(&ws, &s, Family::Dyadic).unwrap().value.powf(s.buckley_exponent());
        let mf = maximal_dyadic(&f, &s.r).unwrap();
        let ns: Vec<StepFunction> = (0..m).map(|j| n_operator(&s, &w, j, &f[j]).unwrap()).collect();
        for cell in 0..64 {
            let rhs: f64 = c * ns.iter().map(|n| n.values()[cell]).product::<f64>();
            prop_assert!(mf.values()[cell] <= rhs * (1.0 + 1e-12), "cell {cell}: {} > {rhs}", mf.values()[cell]);
        }
    }

    #[test]
    fn n_operator_norm_bound(s in setup(), seed in any::<u64>()) {
        let m = s.m();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w: Vec<StepFunction> = (0..m).map(|_| random_weight(6, 0.5, &mut rng).unwrap()).collect();
        for j in 0..m {
            let op = NOperator::new(&s, &w, j).unwrap();
            let f = random_function(6, &mut rng).unwrap();
            let ratio = op.norm(&op.apply(f.values())) / op.norm(f.values());
            prop_assert!(ratio <= op.bound() * (1.0 + 1e-12), "{ratio} > {}", op.bound());
        }
    }
}
