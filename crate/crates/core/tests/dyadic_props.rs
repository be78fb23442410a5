use extrapolab_core::dyadic::{cube_means, lp_norm, three_grid_cover, weak_norm, Family, Grid, StepFunction};
use extrapolab_core::exponent::Recip;
use extrapolab_core::maximal::{maximal_brute_force, maximal_on_grid};
use proptest::prelude::*;

fn function(level: u32) -> impl Strategy<Value = StepFunction> {
    prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..10.0, 1e-3f64..1e3], 1usize << level)
        .prop_map(move |v| StepFunction::new(level, v).unwrap())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// Prefix differences cancel, so the relative accuracy depends on the dynamic
    /// range of `f^t`; cubes and moderate values keep it within 1e-12.
    #[test]
    fn prefix_sums_match_direct_on_cubes(
        v in prop::collection::vec(0.5f64..2.0, 256),
        grid in 0u8..3,
        rho in 0.5f64..1.5,
    ) {
        let f = StepFunction::new(8, v).unwrap();
        let g = Grid::new(grid, 8).unwrap();
        let rho = Recip::new(rho).unwrap();
        let ps = f.prefix_sums(rho).unwrap();
        for q in g.cubes(8) {
            let cells = g.cell_range(&q);
            let direct = f.average(rho, cells.clone());
            let fast = ps.average(cells);
            prop_assert!(rel(direct, fast) <= 1e-12, "{q:?}: {direct} vs {fast}");
        }
    }

    #[test]
    fn average_is_monotone_in_the_function(f in function(5), extra in function(5), rho in 0.0f64..2.0, a in 0usize..32, len in 1usize..32) {
        let b = (a + len).min(32);
        prop_assume!(a < b);
        let g = f.zip_with(&extra, |x, y| x + y).unwrap();
        let rho = Recip::new(rho).unwrap();
        prop_assert!(f.average(rho, a..b) <= g.average(rho, a..b) * (1.0 + 1e-14));
    }

    #[test]
    fn power_means_increase_with_t(f in function(5), x in 0.01f64..3.0, y in 0.01f64..3.0, a in 0usize..32, len in 1usize..32) {
        let b = (a + len).min(32);
        prop_assume!(a < b);
        let (big, small) = if x > y { (x, y) } else { (y, x) };
        // Larger reciprocal means smaller exponent.
        let lo = f.average(Recip::new(big).unwrap(), a..b);
        let hi = f.average(Recip::new(small).unwrap(), a..b);
        prop_assert!(lo <= hi * (1.0 + 1e-13));
        prop_assert!(hi <= f.average(Recip::INF, a..b) * (1.0 + 1e-13));
    }

    #[test]
    fn cube_means_match_direct(f in function(6), grid in 0u8..3, rho in 0.0f64..2.0) {
        let g = Grid::new(grid, 6).unwrap();
        let rho = Recip::new(rho).unwrap();
        let t = cube_means(&g, f.values(), None, rho);
        for (q, v) in t.iter() {
            let d = f.average(rho, g.cell_range(&q));
            prop_assert!(rel(v, d) <= 1e-12, "{q:?}: {v} vs {d}");
        }
    }

    #[test]
    fn unit_weight_is_bitwise_unweighted(f in function(6), rho in 0.0f64..2.0) {
        let g = Grid::standard(6);
        let rho = Recip::new(rho).unwrap();
        let ones = vec![1.0; 64];
        let a = cube_means(&g, f.values(), None, rho).per_cell_sup();
        let b = cube_means(&g, f.values(), Some(&ones), rho).per_cell_sup();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn maximal_matches_brute_force(f1 in function(6), f2 in function(6), grid in 0u8..3, r1 in 0.2f64..1.5, r2 in 0.2f64..1.5) {
        let g = Grid::new(grid, 6).unwrap();
        let r = [Recip::new(r1).unwrap(), Recip::new(r2).unwrap()];
        let fs = [f1, f2];
        let fast = maximal_on_grid(&g, &fs, &r).unwrap();
        let slow = maximal_brute_force(&g, &fs, &r);
        for (a, b) in fast.values().iter().zip(&slow) {
            prop_assert!(rel(*a, *b) <= 1e-12);
        }
    }

    #[test]
    fn three_grid_cover_contains_interval(start in 0usize..256, len in 1usize..256) {
        let end = (start + len).min(256);
        prop_assume!(start < end);
        let c = three_grid_cover(8, start, end).unwrap();
        let g = Grid::new(c.cube.grid, 8).unwrap();
        let (a, b) = g.unclipped(&c.cube);
        prop_assert!(a <= start as i64 && b >= end as i64);
        prop_assert!(c.ratio <= 6.0);
    }

    #[test]
    fn weak_norm_below_strong(f in function(6), rho in 0.05f64..1.0) {
        let rho = Recip::new(rho).unwrap();
        let w = weak_norm(f.values(), None, rho);
        prop_assert!(w <= lp_norm(f.values(), rho) * (1.0 + 1e-13));
    }
}

#[test]
fn grids_nest_and_tile() {
    for level in 1..=8 {
        for g in Family::ThreeGrid.grids(level) {
            for k in 0..level {
                let mut covered = vec![0u32; g.cells()];
                for q in g.cubes(level).filter(|q| q.level == k + 1) {
                    let parent = g.parent(&q).unwrap();
                    let (pa, pb) = g.unclipped(&parent);
                    let (a, b) = g.unclipped(&q);
                    assert!(pa <= a && b <= pb);
                    for c in g.cell_range(&q) {
                        covered[c] += 1;
                    }
                }
                assert!(covered.iter().all(|&x| x == 1), "grid {} level {}", g.id(), k + 1);
            }
        }
    }
}
