use extrapolab_core::exponent::{
    central_exponents, extrapolation_exponent, max_ratio, recips, rescale, sparse_exponent, stage_map, step2_path,
    sum, translation_params, Recip, ScaleSetup, SplitMode,
};
use proptest::prelude::*;

/// Reciprocals summing to one, each strictly below its `1/r_j`.
fn symmetric_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
    (2usize..=4).prop_flat_map(|m1| {
        (
            prop::collection::vec(0.05f64..1.0, m1),
            prop::collection::vec(0.05f64..1.0, m1),
            prop::collection::vec(0.0f64..1.0, m1),
        )
            .prop_map(|(a, b, lift)| {
                let norm = |v: Vec<f64>| {
                    let s: f64 = v.iter().sum();
                    v.into_iter().map(|x| x / s).collect::<Vec<_>>()
                };
                let (p, q) = (norm(a), norm(b));
                let r = p
                    .iter()
                    .zip(&q)
                    .zip(&lift)
                    .map(|((x, y), t)| {
                        let lo = x.max(*y);
                        lo + t * (1.0 - lo) + 1e-3
                    })
                    .collect();
                (p, q, r)
            })
    })
}

fn rv(v: &[f64]) -> Vec<Recip> {
    recips(v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn gamma_product_matches_max_ratio((p, q, r) in symmetric_pair()) {
        let (p, q, r) = (rv(&p), rv(&q), rv(&r));
        let path = step2_path(&p, &q, &r).unwrap();
        let target = max_ratio(&p, &q, &r).unwrap();
        prop_assert!((path.gamma_product() - target).abs() <= 1e-12 * target);
        prop_assert_eq!(path.qk.first().unwrap(), &q);
        prop_assert_eq!(path.qk.last().unwrap(), &p);
        for t in &path.qk {
            prop_assert!((sum(t) - 1.0).abs() <= 1e-12);
        }
        prop_assert_eq!(path.theta[0], 0.0);
        prop_assert_eq!(*path.theta.last().unwrap(), 1.0);
        prop_assert!(path.theta.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn stage_map_is_nondecreasing(a in 0.0f64..1.0, d in 0.0f64..1.0, xs in prop::collection::vec(0.0f64..50.0, 2..40)) {
        let b = a + d * (1.0 - a);
        prop_assume!(b > 0.0);
        let mut xs = xs;
        xs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let ys: Vec<f64> = xs.iter().map(|&x| stage_map(a, b, x)).collect();
        for w in ys.windows(2) {
            prop_assert!(w[0] <= w[1] * (1.0 + 1e-15));
        }
    }

    #[test]
    fn exponent_is_permutation_invariant((p, q, r) in symmetric_pair(), rot in 0usize..4) {
        let m1 = p.len();
        let k = rot % m1;
        let roll = |v: &[f64]| { let mut v = v.to_vec(); v.rotate_left(k); v };
        let a = max_ratio(&rv(&p), &rv(&q), &rv(&r)).unwrap();
        let b = max_ratio(&rv(&roll(&p)), &rv(&roll(&q)), &rv(&roll(&r))).unwrap();
        prop_assert_eq!(a, b);
        let m = m1 - 1;
        let s = Recip::new(1.0 - r[m]).unwrap();
        let e = extrapolation_exponent(&rv(&p[..m]), &rv(&q[..m]), &rv(&r[..m]), s).unwrap();
        prop_assert!((e - a).abs() <= 1e-12 * a);
        prop_assert_eq!(extrapolation_exponent(&rv(&p[..m]), &rv(&p[..m]), &rv(&r[..m]), s).unwrap(), 1.0);
    }

    #[test]
    fn central_point_equalizes_ratios(r in prop::collection::vec(0.1f64..1.0, 1..4), s_frac in 0.0f64..1.0) {
        let rt: f64 = r.iter().sum();
        let s = Recip::new(s_frac * rt.min(1.0) * 0.9).unwrap();
        let r = rv(&r);
        let c = central_exponents(&r, s).unwrap();
        let setup = ScaleSetup::new(r.clone(), s, c.q.clone()).unwrap();
        let e = sparse_exponent(&c.q, &r, s).unwrap();
        prop_assert!((e - c.ratio).abs() <= 1e-12 * c.ratio);
        let tail = (1.0 - s.get()) / (setup.p_total() - s.get());
        prop_assert!((tail - c.ratio).abs() <= 1e-12 * c.ratio);
        for (rj, qj) in r.iter().zip(&c.q) {
            let x = rj.get() / (rj.get() - qj.get());
            prop_assert!((x - c.ratio).abs() <= 1e-12 * c.ratio);
        }
    }

    #[test]
    fn rescale_round_trip(r in prop::collection::vec(0.1f64..2.0, 1..4), t in 0.05f64..0.95, alpha in 0.1f64..10.0) {
        let p: Vec<f64> = r.iter().map(|x| x * t).collect();
        let s = ScaleSetup::new(rv(&r), Recip::new(p.iter().sum::<f64>() * t).unwrap(), rv(&p)).unwrap();
        let back = rescale(&rescale(&s, alpha).unwrap(), 1.0 / alpha).unwrap();
        for (a, b) in back.r.iter().chain(&back.p).zip(s.r.iter().chain(&s.p)) {
            prop_assert!((a.get() - b.get()).abs() <= 1e-15 * b.get().max(1.0));
        }
        prop_assert!((back.s.get() - s.s.get()).abs() <= 1e-15);
    }

    #[test]
    fn translation_conserves_sums(r in prop::collection::vec(0.1f64..1.0, 1..4), t in 0.05f64..0.95, u in 0.0f64..1.0) {
        let p: Vec<f64> = r.iter().map(|x| x * t).collect();
        let pt: f64 = p.iter().sum();
        let s = Recip::new(pt * u).unwrap();
        let tr = translation_params(&rv(&p), &rv(&r), s, SplitMode::Generic).unwrap();
        prop_assert!((tr.s.iter().sum::<f64>() - s.get()).abs() <= 1e-12);
        for (sj, pj) in tr.s.iter().zip(&p) {
            prop_assert!(*sj <= pj + 1e-15);
        }
        prop_assert!((sum(&tr.p) - (pt - s.get())).abs() <= 1e-12);
    }
}

#[test]
fn worked_path() {
    let p = rv(&[0.5, 0.25, 0.25]);
    let q = rv(&[0.25, 0.25, 0.5]);
    let r = rv(&[1.0, 1.0, 1.0]);
    let path = step2_path(&p, &q, &r).unwrap();
    assert_eq!(path.stages(), 1);
    assert_eq!(path.gamma_product(), 1.5);
}
