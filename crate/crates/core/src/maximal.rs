//! Multisublinear maximal operators and their norm experiments.

use rand::Rng;
use serde::Serialize;

use crate::dyadic::{cube_means, lp_norm, weak_norm, CubeTable, DyadicCube, Family, Grid, StepFunction};
use crate::error::{Error, Result};
use crate::exponent::{check, constant_cpr, Recip, ScaleSetup, SymmetricTuple};
use crate::power::PowerCellWeight;
use crate::sample::random_function;
use crate::weights::{symmetric_constant, weight_constant, Weight};

fn common_level(fs: &[StepFunction]) -> Result<u32> {
    let l = fs.first().ok_or_else(|| Error::Invalid("no input functions".into()))?.level();
    match fs.iter().find(|f| f.level() != l) {
        Some(f) => Err(Error::LevelMismatch(l, f.level())),
        None => Ok(l),
    }
}

fn sorted_product(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).expect("finite averages"));
    s.iter().product()
}

/// `∏_j ⟨f_j⟩_{r_j,Q}` for every cube of `grid`.
pub fn product_table(grid: &Grid, fs: &[StepFunction], r: &[Recip]) -> Result<CubeTable> {
    if fs.len() != r.len() {
        return Err(Error::Invalid(format!("{} functions for {} exponents", fs.len(), r.len())));
    }
    let l = common_level(fs)?;
    if l != grid.level() {
        return Err(Error::LevelMismatch(grid.level(), l));
    }
    let tables: Vec<CubeTable> = fs.iter().zip(r).map(|(f, rj)| cube_means(grid, f.values(), None, *rj)).collect();
    let refs: Vec<&CubeTable> = tables.iter().collect();
    CubeTable::zip_map(&refs, sorted_product)
}

/// Values of the maximal operator on each grid and their sum.
#[derive(Clone, Debug, PartialEq)]
pub struct MaximalOutput {
    pub per_grid: Vec<StepFunction>,
    pub total: StepFunction,
}

pub fn maximal_on_grid(grid: &Grid, fs: &[StepFunction], r: &[Recip]) -> Result<StepFunction> {
    StepFunction::new(grid.level(), product_table(grid, fs, r)?.per_cell_sup())
}

/// `M_r(f)` over the dyadic grid, or each of the three grids with their sum.
pub fn maximal(fs: &[StepFunction], r: &[Recip], family: Family) -> Result<MaximalOutput> {
    let l = common_level(fs)?;
    let per_grid = family.grids(l).iter().map(|g| maximal_on_grid(g, fs, r)).collect::<Result<Vec<_>>>()?;
    let mut total = per_grid[0].clone();
    for f in &per_grid[1..] {
        total = total.zip_with(f, |a, b| a + b)?;
    }
    Ok(MaximalOutput { per_grid, total })
}

pub fn maximal_dyadic(fs: &[StepFunction], r: &[Recip]) -> Result<StepFunction> {
    maximal_on_grid(&Grid::standard(common_level(fs)?), fs, r)
}

/// Reference implementation: every cell scans every cube containing it.
pub fn maximal_brute_force(grid: &Grid, fs: &[StepFunction], r: &[Recip]) -> Vec<f64> {
    let mut out = vec![0.0f64; grid.cells()];
    for q in grid.cubes(grid.level()) {
        let cells = grid.cell_range(&q);
        let v: f64 = fs.iter().zip(r).map(|(f, rj)| f.average(*rj, cells.clone())).product();
        for c in cells {
            out[c] = out[c].max(v);
        }
    }
    out
}

/// `sup_{Q ∋ x} (Σ_Q h^t u / Σ_Q u)^{1/t}` over dyadic cubes, `1/t = rho`.
pub fn weighted_dyadic_maximal(u: &StepFunction, rho: Recip, h: &StepFunction) -> Result<StepFunction> {
    if u.level() != h.level() {
        return Err(Error::LevelMismatch(u.level(), h.level()));
    }
    let g = Grid::standard(h.level());
    StepFunction::new(h.level(), cube_means(&g, h.values(), Some(u.values()), rho).per_cell_sup())
}

/// The operator `N_j` built from a weight tuple at an `(r, ∞)` setup.
///
/// `‖N_j f‖_{L^{p_j}(w_j^{p_j})} ≤ bound() · ‖f‖_{L^{p_j}(w_j^{p_j})}` by Doob's
/// inequality for the two weighted dyadic maximal functions involved.
#[derive(Clone, Debug)]
pub struct NOperator {
    level: u32,
    rr: f64,
    pr: f64,
    /// `v_j` and `v_j^{-1/r_j}`.
    v: Vec<f64>,
    v_inv: Vec<f64>,
    /// `v_j^{1/p_j} w^{-(1/p_j)/(1/p)}`.
    lift: Vec<f64>,
    /// `w^{1/(1/p)}`.
    wp: Vec<f64>,
    /// `w^{(1/p_j)/(1/p)} w_j^{-1}`.
    drop: Vec<f64>,
    wj: Vec<f64>,
    wj_inv: Vec<f64>,
}

impl NOperator {
    pub fn new(setup: &ScaleSetup, w: &[StepFunction], j: usize) -> Result<Self> {
        if !setup.s.is_inf() {
            return Err(Error::Invalid("N operators need the s = ∞ form; translate first".into()));
        }
        if w.len() != setup.m() || j >= setup.m() {
            return Err(Error::Invalid(format!("index {j} with {} weights", w.len())));
        }
        let level = common_level(w)?;
        let rr = setup.r[j].get();
        let pr = setup.p[j].get();
        if pr >= rr {
            return Err(Error::Inadmissible(format!("violation at j={}", j + 1)));
        }
        let big_p = setup.p_total();
        let n = 1usize << level;
        let wprod: Vec<f64> = (0..n).map(|c| w.iter().map(|x| x.values()[c]).product()).collect();
        let wj = w[j].values().to_vec();
        let v: Vec<f64> = wj.iter().map(|x| x.powf(-1.0 / (rr - pr))).collect();
        let v_inv = v.iter().map(|x| x.powf(-rr)).collect();
        let (lift, wp, drop) = if pr == 0.0 {
            (vec![], vec![], vec![])
        } else {
            let lift = (0..n).map(|c| v[c].powf(pr) * wprod[c].powf(-pr / big_p)).collect();
            let wp = wprod.iter().map(|x| x.powf(1.0 / big_p)).collect();
            let drop = (0..n).map(|c| wprod[c].powf(pr / big_p) / wj[c]).collect();
            (lift, wp, drop)
        };
        let wj_inv = wj.iter().map(|x| 1.0 / x).collect();
        Ok(NOperator { level, rr, pr, v, v_inv, lift, wp, drop, wj, wj_inv })
    }

    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        let g = Grid::standard(self.level);
        let inner_in: Vec<f64> = f.iter().zip(&self.v_inv).map(|(a, b)| a * b).collect();
        let inner = cube_means(&g, &inner_in, Some(&self.v), Recip::new(self.rr).expect("positive")).per_cell_sup();
        if self.pr == 0.0 {
            let c = inner.iter().copied().fold(0.0, f64::max);
            return self.wj_inv.iter().map(|x| c * x).collect();
        }
        let h: Vec<f64> = inner.iter().zip(&self.lift).map(|(a, b)| a * b).collect();
        let rho = self.pr * self.rr / (self.rr - self.pr);
        let outer = cube_means(&g, &h, Some(&self.wp), Recip::new(rho).expect("positive")).per_cell_sup();
        outer.iter().zip(&self.drop).map(|(a, b)| a * b).collect()
    }

    /// `‖f‖_{L^{p_j}(w_j^{p_j})}`.
    pub fn norm(&self, f: &[f64]) -> f64 {
        let fw: Vec<f64> = f.iter().zip(&self.wj).map(|(a, b)| a * b).collect();
        lp_norm(&fw, Recip::new(self.pr).expect("nonnegative"))
    }

    /// `e^{1/r_j} [(1/r_j)/(1/r_j - 1/p_j)]^{1/r_j}`.
    pub fn bound(&self) -> f64 {
        self.rr.exp() * (self.rr / (self.rr - self.pr)).powf(self.rr)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn recip_p(&self) -> f64 {
        self.pr
    }
}

/// `N_j f` for a single application.
pub fn n_operator(setup: &ScaleSetup, w: &[StepFunction], j: usize, f: &StepFunction) -> Result<StepFunction> {
    let op = NOperator::new(setup, w, j)?;
    if f.level() != op.level {
        return Err(Error::LevelMismatch(op.level, f.level()));
    }
    StepFunction::new(op.level, op.apply(f.values()))
}

/// `sup_{Q ∋ x} ⟨|f - ⟨f⟩_{1,Q}|⟩_{1,Q}` over dyadic cubes.
pub fn sharp_maximal(f: &StepFunction) -> Result<StepFunction> {
    let g = Grid::standard(f.level());
    let osc = CubeTable::from_fn(&g, |q| {
        let cells = g.cell_range(q);
        let vals = &f.values()[cells];
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        Ok(vals.iter().map(|v| (v - mean).abs()).sum::<f64>() / vals.len() as f64)
    })?;
    StepFunction::new(f.level(), osc.per_cell_sup())
}

/// `‖(M^# f) w‖_∞`.
pub fn bmo_norm(f: &StepFunction, w: &StepFunction) -> Result<f64> {
    Ok(sharp_maximal(f)?.mul(w)?.values().iter().copied().fold(0.0, f64::max))
}

fn check_product_one(w: &[StepFunction]) -> Result<()> {
    let l = common_level(w)?;
    for c in 0..1usize << l {
        let p: f64 = w.iter().map(|x| x.values()[c]).product();
        if (p - 1.0).abs() > 1e-10 {
            return Err(Error::NotSymmetric);
        }
    }
    Ok(())
}

fn step_weights(w: &[StepFunction]) -> Result<Vec<Weight>> {
    w.iter().map(|x| Weight::step(x.clone())).collect()
}

/// Outcome of the weak-type experiment on a symmetric tuple.
#[derive(Clone, Debug, Serialize)]
pub struct WeakReport {
    pub constant: f64,
    pub attaining_cube: DyadicCube,
    /// Largest `‖M f‖_{L^{1,∞}} / ∏ ‖f_j‖` over the extremal test functions.
    pub lower: f64,
    /// Largest ratio over random inputs.
    pub upper: f64,
}

fn weighted_norms(fs: &[StepFunction], w: &[StepFunction], p: &[Recip]) -> Result<f64> {
    let mut out = 1.0;
    for ((f, wj), pj) in fs.iter().zip(w).zip(p) {
        out *= f.norm(*pj, Some(wj))?;
    }
    Ok(out)
}

/// Measures the `L^{p_1}(w_1^{p_1}) × … → L^{1,∞}` norm of the dyadic maximal operator
/// for a symmetric tuple against `[w]`.
///
/// The lower estimate uses `f_j = v_j^{1/r_j} χ_Q` at the cube attaining `[w]`
/// and at `extra_cubes` random cubes; the upper estimate uses `trials` random inputs.
pub fn weak_norm_experiment<R: Rng>(
    w: &[StepFunction],
    sym: &SymmetricTuple,
    trials: usize,
    extra_cubes: usize,
    rng: &mut R,
) -> Result<WeakReport> {
    check_product_one(w)?;
    let level = common_level(w)?;
    let grid = Grid::standard(level);
    let wc = symmetric_constant(&step_weights(w)?, sym, Family::Dyadic)?;
    for (j, (p, r)) in sym.p.iter().zip(&sym.r).enumerate() {
        if p.get() >= r.get() {
            return Err(Error::Inadmissible(format!("violation at j={}", j + 1)));
        }
    }
    let v: Vec<StepFunction> = w
        .iter()
        .zip(sym.p.iter().zip(&sym.r))
        .map(|(wj, (p, r))| wj.powf(-1.0 / (r.get() - p.get())))
        .collect::<Result<_>>()?;
    let mut cubes = vec![wc.cube];
    let all: Vec<DyadicCube> = grid.cubes(level).collect();
    for _ in 0..extra_cubes {
        cubes.push(all[rng.gen_range(0..all.len())]);
    }
    let mut lower = 0.0f64;
    for q in &cubes {
        let cells = grid.cell_range(q);
        let fs = v
            .iter()
            .zip(&sym.r)
            .map(|(vj, r)| {
                StepFunction::from_fn(level, |c| if cells.contains(&c) { vj.values()[c].powf(r.get()) } else { 0.0 })
            })
            .collect::<Result<Vec<_>>>()?;
        let m = maximal_dyadic(&fs, &sym.r)?;
        lower = lower.max(weak_norm(m.values(), None, Recip::ONE) / weighted_norms(&fs, w, &sym.p)?);
    }
    let mut upper = 0.0f64;
    for _ in 0..trials {
        let fs = (0..w.len()).map(|_| random_function(level, rng)).collect::<Result<Vec<_>>>()?;
        let m = maximal_dyadic(&fs, &sym.r)?;
        upper = upper.max(weak_norm(m.values(), None, Recip::ONE) / weighted_norms(&fs, w, &sym.p)?);
    }
    Ok(WeakReport { constant: wc.value, attaining_cube: wc.cube, lower, upper })
}

/// Outcome of the strong-type experiment.
#[derive(Clone, Debug, Serialize)]
pub struct StrongReport {
    pub constant: f64,
    pub gamma: f64,
    pub cpr: f64,
    pub max_ratio: f64,
    /// `max_ratio / (c_{p,r} [w]^γ)`.
    pub measured_c: f64,
    /// The constant that the `N_j` factorization guarantees, `e^{Σ 1/r_j}`.
    pub proven_c: f64,
}

/// `‖M f‖_{L^p(w^p)} / ∏ ‖f_j‖_{L^{p_j}(w_j^{p_j})}` on random inputs at an `(r, ∞)` setup.
pub fn strong_bound_check<R: Rng>(
    setup: &ScaleSetup,
    w: &[StepFunction],
    trials: usize,
    rng: &mut R,
) -> Result<StrongReport> {
    check(setup, true)?;
    if !setup.s.is_inf() {
        return Err(Error::Invalid("strong bound check needs s = ∞".into()));
    }
    let level = common_level(w)?;
    let wc = weight_constant(&step_weights(w)?, setup, Family::Dyadic)?;
    let gamma = setup.buckley_exponent();
    let cpr = constant_cpr(&setup.p, &setup.r)?;
    let n = 1usize << level;
    let wprod = StepFunction::new(level, (0..n).map(|c| w.iter().map(|x| x.values()[c]).product()).collect())?;
    let pt = Recip::new(setup.p_total())?;
    let mut max_ratio = 0.0f64;
    for _ in 0..trials {
        let fs = (0..w.len()).map(|_| random_function(level, rng)).collect::<Result<Vec<_>>>()?;
        let m = maximal_dyadic(&fs, &setup.r)?;
        let lhs = m.norm(pt, Some(&wprod))?;
        max_ratio = max_ratio.max(lhs / weighted_norms(&fs, w, &setup.p)?);
    }
    Ok(StrongReport {
        constant: wc.value,
        gamma,
        cpr,
        max_ratio,
        measured_c: max_ratio / (cpr * wc.value.powf(gamma)),
        proven_c: setup.r_total().exp(),
    })
}

/// One point of the power-weight family that saturates the strong bound.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepPoint {
    pub eps: f64,
    pub weight_constant: f64,
    pub maximal_norm: f64,
    pub product_norm: f64,
    pub ratio: f64,
}

/// The family `w_J = x^{(1-ε)(1/r_J - 1/p_J)}`, `w_j = 1` otherwise,
/// `f_J = x^{-(1-ε)/r_J}`, `f_j = x^{-(1-ε)/p_j}`, where `J` attains `γ`.
///
/// Cube averages are exact. The norm of `M f` sums the cells `[c/N, (c+1)/N)`,
/// `c ≥ 1`, and closes the first cell with the exact self-similarity
/// `∫_0^{h} = h^κ ∫_0^1`, `κ = 1 + p Σ_j (a_j + b_j)`.
pub fn power_sweep_point(setup: &ScaleSetup, eps: f64, level: u32) -> Result<SweepPoint> {
    check(setup, true)?;
    if !setup.s.is_inf() {
        return Err(Error::Invalid("the sweep runs at s = ∞".into()));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Invalid(format!("epsilon {eps} outside (0,1)")));
    }
    let m = setup.m();
    let ratios: Vec<f64> = setup.r.iter().zip(&setup.p).map(|(r, p)| r.get() / (r.get() - p.get())).collect();
    let jstar = (0..m).fold(0, |b, j| if ratios[j] > ratios[b] { j } else { b });
    let mut a = vec![0.0; m];
    let mut b = vec![0.0; m];
    for j in 0..m {
        let (rr, pr) = (setup.r[j].get(), setup.p[j].get());
        if j == jstar {
            a[j] = (1.0 - eps) * (rr - pr);
            b[j] = -(1.0 - eps) * rr;
        } else {
            b[j] = -(1.0 - eps) * pr;
        }
    }
    let weights: Vec<Weight> = a.iter().map(|&aj| Weight::power(level, aj)).collect();
    let wc = weight_constant(&weights, setup, Family::Dyadic)?.value;
    let mut product_norm = 1.0;
    for j in 0..m {
        product_norm *= PowerCellWeight::new(a[j] + b[j]).average(setup.p[j], 0.0, 1.0)?;
    }
    let grid = Grid::standard(level);
    let fs: Vec<PowerCellWeight> = b.iter().map(|&bj| PowerCellWeight::new(bj)).collect();
    let table = CubeTable::from_fn(&grid, |q| {
        let mut v = Vec::with_capacity(m);
        for (f, r) in fs.iter().zip(&setup.r) {
            v.push(f.cube_average(*r, &grid, q)?);
        }
        Ok(sorted_product(&v))
    })?;
    let sup = table.per_cell_sup();
    let p = 1.0 / setup.p_total();
    let wsum = PowerCellWeight::new(a.iter().sum());
    let n = grid.cells() as f64;
    let mut tail = 0.0;
    for (c, mc) in sup.iter().enumerate().skip(1) {
        tail += mc.powf(p) * wsum.integral(p, c as f64 / n, (c + 1) as f64 / n)?;
    }
    let kappa = 1.0 + p * (a.iter().sum::<f64>() + b.iter().sum::<f64>());
    if kappa <= 0.0 {
        return Err(Error::NonIntegrablePower);
    }
    let total = tail / -(-kappa * n.ln()).exp_m1();
    let maximal_norm = total.powf(1.0 / p);
    Ok(SweepPoint { eps, weight_constant: wc, maximal_norm, product_norm, ratio: maximal_norm / product_norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::recips;

    #[test]
    fn indicator_example() {
        let f = StepFunction::new(2, vec![1.0, 1.0, 0.0, 0.0]).unwrap();
        let m = maximal_dyadic(&[f], &[Recip::ONE]).unwrap();
        assert_eq!(m.values(), &[1.0, 1.0, 0.5, 0.5]);
    }

    #[test]
    fn constants_map_to_product() {
        let f = StepFunction::constant(4, 2.0).unwrap();
        let g = StepFunction::constant(4, 3.0).unwrap();
        let r = recips(&[1.0, 0.5]).unwrap();
        let m = maximal(&[f, g], &r, Family::ThreeGrid).unwrap();
        for v in m.per_grid[0].values() {
            assert!((v - 6.0).abs() < 1e-13);
        }
        assert_eq!(m.per_grid.len(), 3);
    }

    #[test]
    fn sharp_maximal_examples() {
        let f = StepFunction::new(2, vec![1.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(sharp_maximal(&f).unwrap().values(), &[0.5; 4]);
        let c = StepFunction::constant(3, 4.0).unwrap();
        assert_eq!(bmo_norm(&c, &StepFunction::constant(3, 2.0).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn n_of_zero_is_zero() {
        let w = vec![StepFunction::constant(3, 1.0).unwrap(); 2];
        let s = ScaleSetup::new(recips(&[1.0, 1.0]).unwrap(), Recip::INF, recips(&[0.5, 0.0]).unwrap()).unwrap();
        for j in 0..2 {
            let z = n_operator(&s, &w, j, &StepFunction::constant(3, 0.0).unwrap()).unwrap();
            assert!(z.is_zero());
        }
    }
}
