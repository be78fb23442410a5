//! The quantitative checks behind `verify` and the acceptance suite.
//!
//! Each check draws its instances from a seeded ChaCha stream and reduces them
//! to worst-case assertions.

use extrapolab_core::dyadic::{Family, Grid, StepFunction};
use extrapolab_core::exponent::{
    central_exponents, extrapolation_exponent, recips, rescale, step2_path, sum, translation_params, Recip,
    ScaleSetup, SplitMode, SymmetricTuple,
};
use extrapolab_core::maximal::{maximal_dyadic, power_sweep_point, product_table, weak_norm_experiment, SweepPoint};
use extrapolab_core::pipeline::{
    extrapolation_pipeline_check, maximal_hypothesis, weak_maximal_hypothesis, weak_pipeline_check, PipelineStatus,
};
use extrapolab_core::power::PowerCellWeight;
use extrapolab_core::rdf::{build_weights, constant_transfer, rdf_property3_check, RdfOperator, DEFAULT_TERMS};
use extrapolab_core::sample::{fit_slope, random_function, random_symmetric_weights, random_weight};
use extrapolab_core::sparse::{cz_sparse, lambda_equiv_check, lambda_weight_bound, sparse_set_operator};
use extrapolab_core::weights::{
    classical_a1, extend_symmetric, rescale_weights, symmetric_constant, weight_constant, Weight,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::LabResult;
use crate::report::{worst, Assertion};

/// Points used by the slope fits: the smallest `ε`.
pub const FIT_POINTS: usize = 6;

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    (a - b).abs() / a.abs().max(b.abs())
}

fn simplex<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

fn steps(ws: &[StepFunction]) -> LabResult<Vec<Weight>> {
    Ok(ws.iter().map(|x| Weight::step(x.clone())).collect::<Result<Vec<_>, _>>()?)
}

/// Sweep output with both fitted slopes.
#[derive(Clone, Debug)]
pub struct Sweep {
    pub points: Vec<SweepPoint>,
    /// Slope of `log ratio` against `log [w]`.
    pub slope: f64,
    /// `max_j (1/r_j)/(1/r_j - 1/p_j)`.
    pub theory: f64,
    /// Slope of `log [w]` against `log ε`.
    pub weight_slope: f64,
    /// `1/p_J - 1/r_J` at the index attaining the maximum.
    pub weight_theory: f64,
}

pub fn sweep(setup: &ScaleSetup, eps: &[f64], level: u32) -> LabResult<Sweep> {
    let points = eps.iter().map(|&e| power_sweep_point(setup, e, level)).collect::<Result<Vec<_>, _>>()?;
    let mut tail: Vec<&SweepPoint> = points.iter().collect();
    tail.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    let tail = &tail[tail.len().saturating_sub(FIT_POINTS)..];
    let lw: Vec<f64> = tail.iter().map(|p| p.weight_constant.ln()).collect();
    let slope = fit_slope(&lw, &tail.iter().map(|p| p.ratio.ln()).collect::<Vec<_>>());
    let weight_slope = fit_slope(&tail.iter().map(|p| p.eps.ln()).collect::<Vec<_>>(), &lw);
    let ratios: Vec<f64> = setup.r.iter().zip(&setup.p).map(|(r, p)| r.get() / (r.get() - p.get())).collect();
    let j = (0..ratios.len()).fold(0, |b, j| if ratios[j] > ratios[b] { j } else { b });
    Ok(Sweep {
        points,
        slope,
        theory: ratios[j],
        weight_slope,
        weight_theory: setup.p[j].get() - setup.r[j].get(),
    })
}

/// Power-weight sweep at `r = (1,1)`, `p = (3,6)`, `s = ∞`.
pub fn sharpness_sweep(level: u32) -> LabResult<Vec<Assertion>> {
    let setup = ScaleSetup::new(recips(&[1.0, 1.0])?, Recip::INF, recips(&[1.0 / 3.0, 1.0 / 6.0])?)?;
    let eps: Vec<f64> = (2..=9).map(|k| 0.5f64.powi(k)).collect();
    let sw = sweep(&setup, &eps, level)?;
    let pt = setup.p_total();
    let norm_err = worst(sw.points.iter().map(|p| rel(p.product_norm, p.eps.powf(-pt))));
    Ok(vec![
        Assertion::at_least("sweep.slope.low", sw.slope, 1.35),
        Assertion::at_most("sweep.slope.high", sw.slope, 1.65),
        Assertion::note("sweep.slope.theory", sw.theory),
        Assertion::at_most("sweep.product_norm.rel_err", norm_err, 1e-12),
        Assertion::at_most("sweep.weight_slope.rel_dev", (sw.weight_slope / sw.weight_theory - 1.0).abs(), 0.1),
    ])
}

/// Test-function lower bound and random upper bound for the weak-type norm at `m = 2`.
pub fn weak_type_equality(count: usize, level: u32, seed: u64) -> LabResult<Vec<Assertion>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut low, mut high) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..count {
        let p = simplex(3, &mut rng);
        let r: Vec<f64> = p.iter().map(|x| x + rng.gen_range(0.1..=1.0) * (1.0 - x)).collect();
        let sym = SymmetricTuple { p: recips(&p)?, r: recips(&r)? };
        let w = random_symmetric_weights(level, 2, 0.4, &mut rng)?;
        let rep = weak_norm_experiment(&w, &sym, 8, 8, &mut rng)?;
        low = low.min(rep.lower / rep.constant);
        high = high.max(rep.upper / rep.constant);
    }
    Ok(vec![
        Assertion::at_least("weak.lower_over_constant", low, 1.0 - 1e-9),
        Assertion::at_most("weak.upper_over_constant", high, 1.0 + 1e-12),
    ])
}

/// Product of stage exponents against the maximal ratio on random symmetric tuples.
pub fn gamma_product(count: usize, seed: u64) -> LabResult<Vec<Assertion>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut prod_err, mut sum_err) = (0.0f64, 0.0f64);
    for _ in 0..count {
        let m1 = rng.gen_range(2..=4);
        let p = simplex(m1, &mut rng);
        let q = simplex(m1, &mut rng);
        let r: Vec<f64> = p.iter().zip(&q).map(|(a, b)| a.max(*b) + rng.gen_range(0.0..=1.0) * (1.0 - a.max(*b))).collect();
        let path = step2_path(&recips(&p)?, &recips(&q)?, &recips(&r)?)?;
        // Independent evaluation of max_j (1/r_j - 1/q_j)/(1/r_j - 1/p_j).
        let target = (0..m1)
            .map(|j| if r[j] == p[j] { 1.0 } else { (r[j] - q[j]) / (r[j] - p[j]) })
            .fold(f64::NEG_INFINITY, f64::max);
        prod_err = prod_err.max(rel(path.gamma_product(), target));
        for t in &path.qk {
            sum_err = sum_err.max((sum(t) - 1.0).abs());
        }
    }
    Ok(vec![
        Assertion::at_most("gamma.product.rel_err", prod_err, 1e-12),
        Assertion::at_most("gamma.intermediate_sums.abs_err", sum_err, 1e-12),
    ])
}

/// Ulps between two finite doubles.
fn ulps(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    (a.to_bits() as i64 - b.to_bits() as i64).unsigned_abs() as f64
}

/// `m = 1`, `r = 1`, `s = ∞` over `{4/3, 3/2, 2, 3, 4, ∞}²`.
pub fn exponent_grid() -> LabResult<Vec<Assertion>> {
    let grid = [4.0 / 3.0, 1.5, 2.0, 3.0, 4.0, f64::INFINITY];
    let r = recips(&[1.0])?;
    let (mut worst_ulps, mut unexpected, mut checked) = (0.0f64, 0.0, 0.0);
    for &p in &grid {
        for &q in &grid {
            let (rp, rq) = (Recip::from_exponent(p)?, Recip::from_exponent(q)?);
            // p/q and p'/q' in reciprocal form, with ∞/∞ read as 1.
            let ratio = |num: f64, den: f64| if num == den { 1.0 } else { num / den };
            let oracle = ratio(rq.get(), rp.get()).max(ratio(1.0 - rq.get(), 1.0 - rp.get()));
            match extrapolation_exponent(&[rp], &[rq], &r, Recip::INF) {
                Ok(e) if oracle.is_finite() => {
                    worst_ulps = worst_ulps.max(ulps(e, oracle));
                    checked += 1.0;
                }
                Err(_) if oracle.is_infinite() => {}
                _ => unexpected += 1.0,
            }
        }
    }
    Ok(vec![
        Assertion::at_most("exponent_grid.ulps", worst_ulps, 4.0),
        Assertion::at_most("exponent_grid.unexpected", unexpected, 0.0),
        Assertion::note("exponent_grid.pairs_checked", checked),
    ])
}

/// One random input of the sparse corpus.
struct SparseCase {
    setup: ScaleSetup,
    f: Vec<StepFunction>,
    w: Vec<StepFunction>,
}

fn sparse_case<R: Rng>(level: u32, rng: &mut R) -> LabResult<SparseCase> {
    let m = rng.gen_range(1..=2);
    let r: Vec<f64> = (0..m).map(|_| rng.gen_range(0.25..=1.0)).collect();
    let mut p: Vec<f64> = r.iter().map(|x| x * rng.gen_range(0.1..0.9)).collect();
    let total: f64 = p.iter().sum();
    if total > 0.9 {
        p.iter_mut().for_each(|x| *x *= 0.9 / total);
    }
    let setup = ScaleSetup::new(recips(&r)?, Recip::INF, recips(&p)?)?;
    let f = (0..=m).map(|_| random_function(level, rng)).collect::<Result<Vec<_>, _>>()?;
    let w = random_symmetric_weights(level, m, 0.4, rng)?;
    Ok(SparseCase { setup, f, w })
}

/// Sparsity, stopping inequality and `2^{2/r}` domination of the stopping collection.
pub fn sparse_construction(count: usize, level: u32, seed: u64) -> LabResult<Vec<Assertion>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = Grid::standard(level);
    let (mut invalid, mut half, mut below, mut above, mut dom) = (0.0, f64::INFINITY, f64::INFINITY, 0.0f64, 0.0f64);
    for _ in 0..count {
        let case = sparse_case(level, &mut rng)?;
        let m = case.setup.m();
        let (r, f) = (&case.setup.r, &case.f[..m]);
        let cz = cz_sparse(r, f)?;
        if cz.collection.validate().is_err() {
            invalid += 1.0;
        }
        let table = product_table(&grid, f, r)?;
        let step = sum(r).exp2();
        for (i, e) in cz.collection.entries.iter().enumerate() {
            half = half.min(2.0 * e.cells.len() as f64 / grid.cell_range(&e.cube).len() as f64);
            if Some(i) == cz.root {
                continue;
            }
            let t = cz.threshold(e.k.expect("stopping cubes carry k"), r);
            let v = table.get(&e.cube);
            below = below.min(v / t);
            above = above.max(v / (step * t));
        }
        let mf = maximal_dyadic(f, r)?;
        let a = sparse_set_operator(r, &cz.collection, f)?;
        for (x, y) in mf.values().iter().zip(a.values()) {
            if *x > 0.0 {
                dom = dom.max(x / (cz.constant * y));
            }
        }
    }
    Ok(vec![
        Assertion::at_most("sparse.validator_failures", invalid, 0.0),
        Assertion::at_least("sparse.min_2E_over_Q", half, 1.0),
        Assertion::at_least("sparse.stopping.lower_ratio", below, 1.0),
        Assertion::at_most("sparse.stopping.upper_ratio", above, 1.0 + 1e-12),
        Assertion::at_most("sparse.domination_ratio", dom, 1.0),
    ])
}

/// Corpus-wide constant of the weighted sparse bound, plus the two `Λ` comparisons.
fn sparse_forms_run(count: usize, level: u32, seed: u64, out: &mut Vec<Assertion>, tag: &str) -> LabResult<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut lower, mut upper, mut cube, mut c) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..count {
        let case = sparse_case(level, &mut rng)?;
        let m = case.setup.m();
        let eq = lambda_equiv_check(&case.setup.r, &case.f[..m], 8, &mut rng)?;
        lower = lower.max(eq.maximal_l1 / (eq.constant * eq.lambda_cz));
        upper = upper.max(eq.lambda_random_max / (2.0 * eq.maximal_l1));
        let sym = case.setup.symmetric()?;
        let cz = cz_sparse(&sym.r, &case.f)?;
        let rep = lambda_weight_bound(&sym, &case.w, &case.f, &cz.collection)?;
        cube = cube.max(rep.cube_ratio / rep.cube_constant);
        c = c.max(rep.measured_c);
    }
    out.push(Assertion::at_most(format!("sparse_form.{tag}.maximal_over_lambda"), lower, 1.0));
    out.push(Assertion::at_most(format!("sparse_form.{tag}.lambda_over_maximal"), upper, 1.0));
    out.push(Assertion::at_most(format!("sparse_form.{tag}.cube_ratio"), cube, 1.0 + 1e-12));
    out.push(Assertion::at_most(format!("sparse_form.{tag}.constant"), c, 1024.0));
    Ok(c)
}

/// Runs the corpus at two seeds and compares the constants.
pub fn sparse_forms(count: usize, level: u32, seed: u64) -> LabResult<Vec<Assertion>> {
    let mut out = Vec::new();
    let a = sparse_forms_run(count, level, seed, &mut out, "seed_a")?;
    let b = sparse_forms_run(count, level, seed.wrapping_add(1), &mut out, "seed_b")?;
    out.push(Assertion::at_most("sparse_form.constant.seed_drift", (a / b - 1.0).abs(), 0.2));
    Ok(out)
}

fn rdf_setup<R: Rng>(rng: &mut R) -> LabResult<ScaleSetup> {
    let m = rng.gen_range(1..=2);
    let r: Vec<f64> = (0..m).map(|_| rng.gen_range(0.2..=1.0)).collect();
    let p: Vec<f64> = r.iter().map(|x| x * rng.gen_range(0.05..0.95)).collect();
    Ok(ScaleSetup::new(recips(&r)?, Recip::INF, recips(&p)?)?)
}

/// Properties (i)–(iii) of the series at `K = 30`.
pub fn rdf_properties(count: usize, level: u32, seed: u64) -> LabResult<Vec<Assertion>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut majorant, mut growth, mut excess, mut c) = (f64::INFINITY, 0.0f64, 0.0f64, 0.0f64);
    let slack = 1.0 + 2f64.powi(-25);
    for _ in 0..count {
        let setup = rdf_setup(&mut rng)?;
        let m = setup.m();
        let w = (0..m).map(|_| random_weight(level, 0.4, &mut rng)).collect::<Result<Vec<_>, _>>()?;
        let f = (0..m).map(|_| random_function(level, &mut rng)).collect::<Result<Vec<_>, _>>()?;
        let mut ops = (0..m).map(|j| RdfOperator::new(&setup, &w, j, DEFAULT_TERMS)).collect::<Result<Vec<_>, _>>()?;
        let mut rf = Vec::with_capacity(m);
        for (op, fj) in ops.iter_mut().zip(&f) {
            let out = op.apply(fj)?.value;
            for (a, b) in fj.values().iter().zip(out.values()) {
                majorant = majorant.min(b - a);
            }
            growth = growth.max(op.norm(out.values()) / (2.0 * op.norm(fj.values())));
            rf.push(out);
        }
        let rep = rdf_property3_check(&ops, &setup, &w, &rf)?;
        excess = excess.max(rep.measured_c / (slack * rep.derived_c));
        c = c.max(rep.measured_c);
    }
    Ok(vec![
        Assertion::at_least("rdf.i.min_gap", majorant, 0.0),
        Assertion::at_most("rdf.ii.norm_over_2f", growth, 1.0),
        Assertion::at_most("rdf.iii.measured_over_derived", excess, 1.0),
        Assertion::at_most("rdf.iii.constant", c, 64.0),
    ])
}

/// `w = (u^{-1}, 1, u)` with `u² = ⟨x^{-(1-ε)}⟩` cellwise.
fn degenerate_weights(level: u32, eps: f64) -> LabResult<Vec<StepFunction>> {
    let a = PowerCellWeight::new(-(1.0 - eps)).cell_values(Recip::ONE, level)?;
    let u = StepFunction::new(level, a.iter().map(|x| x.sqrt()).collect())?;
    Ok(vec![u.powf(-1.0)?, StepFunction::constant(level, 1.0)?, u])
}

/// The worked reciprocal path `(1/2,1/4,1/4) → (1/4,1/4,1/2)` at `r = (1,1,1)`.
pub fn worked_path() -> LabResult<(Vec<Recip>, Vec<Recip>, Vec<Recip>)> {
    Ok((recips(&[0.5, 0.25, 0.25])?, recips(&[0.25, 0.25, 0.5])?, recips(&[1.0, 1.0, 1.0])?))
}

/// Product, norm transfer and constant growth of the constructed weights.
pub fn weight_construction(count: usize, level: u32, degenerate_level: u32, seed: u64) -> LabResult<Vec<Assertion>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut prod, mut total, mut stage, mut c) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut check = |f: &[StepFunction], w: &[StepFunction], p: &[Recip], q: &[Recip], r: &[Recip]| -> LabResult<()> {
        let m = (p.len() - 1) as i32;
        let out = build_weights(f, w, p, q, r, DEFAULT_TERMS)?;
        for cell in 0..out.weights[0].len() {
            prod = prod.max((out.weights.iter().map(|x| x.values()[cell]).product::<f64>() - 1.0).abs());
        }
        total = total.max(out.norm_ratio / 2f64.powi(m * m));
        stage = stage.max(worst(out.stages.iter().map(|s| s.norm_ratio / 2f64.powi(m))).max(0.0));
        c = c.max(constant_transfer(w, &out.weights, p, q, r)?.measured_c);
        Ok(())
    };
    let (wp, wq, wr) = worked_path()?;
    let mut done = 0;
    while done < count {
        let (m, p, q, r) = if done == 0 {
            (2, wp.clone(), wq.clone(), wr.clone())
        } else {
            let m = rng.gen_range(1..=2usize);
            let p = simplex(m + 1, &mut rng);
            let q = simplex(m + 1, &mut rng);
            let r: Vec<f64> = p.iter().zip(&q).map(|(a, b)| (a.max(*b) + rng.gen_range(0.05..0.5)).min(1.0)).collect();
            if p.iter().zip(&r).any(|(a, c)| a >= c) {
                continue;
            }
            (m, recips(&p)?, recips(&q)?, recips(&r)?)
        };
        let w = random_symmetric_weights(level, m, 0.4, &mut rng)?;
        let f = (0..=m).map(|_| random_function(level, &mut rng)).collect::<Result<Vec<_>, _>>()?;
        check(&f, &w, &p, &q, &r)?;
        done += 1;
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in 1..=9 {
        let w = degenerate_weights(degenerate_level, 0.5f64.powi(k))?;
        let f = vec![StepFunction::constant(degenerate_level, 1.0)?; 3];
        let out = build_weights(&f, &w, &wp, &wq, &wr, DEFAULT_TERMS)?;
        let ct = constant_transfer(&w, &out.weights, &wp, &wq, &wr)?;
        xs.push(ct.before.ln());
        ys.push(ct.after.ln());
    }
    let tail = xs.len() - FIT_POINTS;
    let slope = fit_slope(&xs[tail..], &ys[tail..]);
    let exponent = extrapolab_core::exponent::max_ratio(&wp, &wq, &wr)?;
    Ok(vec![
        Assertion::at_most("weights.product.abs_err", prod, 1e-10),
        Assertion::at_most("weights.norm_transfer_over_2^m2", total, 1.0),
        Assertion::at_most("weights.stage_transfer_over_2^m", stage, 1.0),
        Assertion::note("weights.constant", c),
        Assertion::note("weights.worked_exponent", exponent),
        Assertion::at_most("weights.degenerate_slope", slope, 1.05 * exponent),
    ])
}

fn identity_setup<R: Rng>(rng: &mut R) -> LabResult<ScaleSetup> {
    let m = rng.gen_range(1..=3usize);
    let rt: Vec<(f64, f64)> = (0..m).map(|_| (rng.gen_range(0.2..1.0), rng.gen_range(0.05..0.95))).collect();
    let r: Vec<f64> = rt.iter().map(|(r, _)| r / m as f64).collect();
    let p: Vec<f64> = rt.iter().map(|(r, t)| r * t / m as f64).collect();
    let s = p.iter().sum::<f64>() * rng.gen_range(0.0..1.0);
    Ok(ScaleSetup::new(recips(&r)?, Recip::new(s)?, recips(&p)?)?)
}

/// Permutation, rescaling, translation, duality and `A_1` identities.
pub fn structural_identities(count: usize, level: u32, seed: u64) -> LabResult<Vec<Assertion>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut errs = [0.0f64; 6];
    for _ in 0..count {
        let setup = identity_setup(&mut rng)?;
        let w = steps(&(0..setup.m()).map(|_| random_weight(level, 0.5, &mut rng)).collect::<Result<Vec<_>, _>>()?)?;
        let direct = weight_constant(&w, &setup, Family::Dyadic)?.value;

        let (ext, sym) = extend_symmetric(&w, &setup)?;
        let base = symmetric_constant(&ext, &sym, Family::Dyadic)?.value;
        let k = rng.gen_range(1..ext.len());
        let (mut e2, mut s2) = (ext.clone(), sym.clone());
        e2.rotate_left(k);
        s2.p.rotate_left(k);
        s2.r.rotate_left(k);
        errs[0] = errs[0].max(rel(symmetric_constant(&e2, &s2, Family::Dyadic)?.value, base));
        errs[1] = errs[1].max(rel(direct, base));

        let alpha = rng.gen_range(0.2..1.0);
        let lhs = weight_constant(&w, &rescale(&setup, alpha)?, Family::Dyadic)?.value.powf(1.0 / alpha);
        let rhs = weight_constant(&rescale_weights(&w, alpha)?, &setup, Family::Dyadic)?.value;
        errs[2] = errs[2].max(rel(lhs, rhs));

        let tr = translation_params(&setup.p, &setup.r, setup.s, SplitMode::Generic)?;
        errs[3] = errs[3].max(rel(direct, weight_constant(&w, &tr.setup()?, Family::Dyadic)?.value));

        let one = steps(&[random_weight(level, 0.6, &mut rng)?])?;
        let inv = vec![one[0].pow(-1.0)?];
        let p = rng.gen_range(1.05..20.0);
        let r1 = recips(&[1.0])?;
        let sp = ScaleSetup::new(r1.clone(), Recip::INF, vec![Recip::from_exponent(p)?])?;
        let sd = ScaleSetup::new(r1.clone(), Recip::INF, vec![Recip::new(1.0 - 1.0 / p)?])?;
        errs[4] = errs[4].max(rel(
            weight_constant(&one, &sp, Family::Dyadic)?.value,
            weight_constant(&inv, &sd, Family::Dyadic)?.value,
        ));

        let end = ScaleSetup::new(r1, Recip::INF, vec![Recip::INF])?;
        let a1 = match &inv[0] {
            Weight::Step(s) => classical_a1(s),
            Weight::Power { .. } => unreachable!("step weights stay step weights"),
        };
        errs[5] = errs[5].max(rel(weight_constant(&one, &end, Family::Dyadic)?.value, a1));
    }
    let ids = ["permutation", "symmetric_vs_direct", "rescaling", "translation", "duality", "a1_endpoint"];
    Ok(ids.iter().zip(errs).map(|(id, e)| Assertion::at_most(format!("identity.{id}.rel_err"), e, 1e-12)).collect())
}

/// `h = M f` extrapolated from the central exponents to random targets, strong and weak.
pub fn pipeline(targets: usize, level: u32, lambdas: usize, seed: u64) -> LabResult<Vec<Assertion>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut failures, mut mult, mut ratio) = (0.0, 0.0f64, 0.0f64);
    let (mut weak_failures, mut weak_mult, mut weak_gap, mut weak_seen) = (0.0, 0.0f64, 0.0f64, f64::INFINITY);
    for rr in [vec![1.0], vec![0.5, 0.5], vec![1.0, 1.0]] {
        let m = rr.len();
        let r = recips(&rr)?;
        let central = central_exponents(&r, Recip::INF)?;
        let setup_q = ScaleSetup::new(r.clone(), Recip::INF, central.q.clone())?;
        let phi = maximal_hypothesis(&setup_q)?;
        let phi_weak = weak_maximal_hypothesis(&setup_q)?;
        for _ in 0..targets {
            let p: Vec<f64> = rr.iter().map(|x| x * rng.gen_range(0.1..0.9)).collect();
            let setup = ScaleSetup::new(r.clone(), Recip::INF, recips(&p)?)?;
            let w = (0..m).map(|_| random_weight(level, 0.4, &mut rng)).collect::<Result<Vec<_>, _>>()?;
            let f = (0..m).map(|_| random_function(level, &mut rng)).collect::<Result<Vec<_>, _>>()?;
            let h = maximal_dyadic(&f, &r)?;
            let rep = extrapolation_pipeline_check(&f, &h, &w, &setup, &central.q, &phi, 3, DEFAULT_TERMS, &mut rng)?;
            if rep.status != PipelineStatus::Holds {
                failures += 1.0;
            }
            mult = mult.max(rep.multiplier);
            ratio = ratio.max(rep.lhs / rep.bound);
            let weak =
                weak_pipeline_check(&f, &h, &w, &setup, &central.q, &phi_weak, lambdas, 1, DEFAULT_TERMS, &mut rng)?;
            if weak.status != PipelineStatus::Holds {
                weak_failures += 1.0;
            }
            weak_mult = weak_mult.max(weak.max_multiplier);
            weak_gap = weak_gap.max(weak.sup_lhs / weak.weak_lhs);
            weak_seen = weak_seen.min(weak.sup_lhs / weak.weak_lhs);
        }
    }
    Ok(vec![
        Assertion::at_most("pipeline.strong.failures", failures, 0.0),
        Assertion::at_most("pipeline.strong.multiplier", mult, 4096.0),
        Assertion::note("pipeline.strong.lhs_over_bound", ratio),
        Assertion::at_most("pipeline.weak.failures", weak_failures, 0.0),
        Assertion::at_most("pipeline.weak.multiplier", weak_mult, 4096.0),
        Assertion::at_most("pipeline.weak.sup_over_weak_norm", weak_gap, 1.0 + 1e-12),
        Assertion::note("pipeline.weak.min_sup_over_weak_norm", weak_seen),
    ])
}
