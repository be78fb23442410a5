//! The multilinear Rubio de Francia iteration and the construction of
//! extrapolated weights.

use serde::Serialize;

use crate::dyadic::{cube_extrema, lp_norm, CubeTable, Family, Grid, StepFunction};
use crate::error::{Error, Result};
use crate::exponent::{
    constant_cpr, max_ratio, step2_path, sum, translation_params, Recip, ScaleSetup, SplitMode, SymmetricTuple,
    EQ_TOL,
};
use crate::maximal::{product_table, NOperator};
use crate::weights::{symmetric_constant, weight_constant, Weight};

/// Default number of series terms after the identity term.
pub const DEFAULT_TERMS: usize = 30;
const MAX_DOUBLINGS: u32 = 20;

/// `R f = Σ_{k=0}^{K} N^k f / (2B)^k` for one index of an `(r, ∞)` setup.
#[derive(Clone, Debug)]
pub struct RdfOperator {
    n: NOperator,
    bound: f64,
    terms: usize,
    doublings: u32,
}

/// Result of one application.
#[derive(Clone, Debug)]
pub struct RdfOutput {
    pub value: StepFunction,
    /// `2^{-K} ‖f‖`, the size of the omitted tail.
    pub tail: f64,
}

impl RdfOperator {
    pub fn new(setup: &ScaleSetup, w: &[StepFunction], j: usize, terms: usize) -> Result<Self> {
        let n = NOperator::new(setup, w, j)?;
        if n.recip_p() > 1.0 {
            return Err(Error::Invalid(format!("index {} needs p_j ≥ 1 for the norm bound", j + 1)));
        }
        if terms == 0 {
            return Err(Error::Invalid("at least one series term".into()));
        }
        let bound = n.bound();
        Ok(RdfOperator { n, bound, terms, doublings: 0 })
    }

    /// The certified bound currently used in place of `‖N‖`.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn doublings(&self) -> u32 {
        self.doublings
    }

    pub fn norm(&self, f: &[f64]) -> f64 {
        self.n.norm(f)
    }

    pub fn apply_n(&self, f: &[f64]) -> Vec<f64> {
        self.n.apply(f)
    }

    /// Sums the series, doubling the bound whenever an iterate violates
    /// `‖N g‖ ≤ B ‖g‖`.
    pub fn apply(&mut self, f: &StepFunction) -> Result<RdfOutput> {
        if f.level() != self.n.level() {
            return Err(Error::LevelMismatch(self.n.level(), f.level()));
        }
        'calibrate: loop {
            let scale = 2.0 * self.bound;
            let mut term = f.values().to_vec();
            let mut acc = term.clone();
            let mut norm = self.n.norm(&term);
            for _ in 0..self.terms {
                if norm == 0.0 {
                    break;
                }
                let next = self.n.apply(&term);
                let next_norm = self.n.norm(&next);
                if next_norm > self.bound * norm {
                    self.doublings += 1;
                    if self.doublings > MAX_DOUBLINGS {
                        return Err(Error::NormBoundDiverged);
                    }
                    self.bound *= 2.0;
                    continue 'calibrate;
                }
                term = next.iter().map(|x| x / scale).collect();
                norm = next_norm / scale;
                acc.iter_mut().zip(&term).for_each(|(a, t)| *a += t);
            }
            let tail = (-(self.terms as f64)).exp2() * self.n.norm(f.values());
            return Ok(RdfOutput { value: StepFunction::new(f.level(), acc)?, tail });
        }
    }
}

/// Worst cube in the reverse-Hölder-type property of `R`.
#[derive(Clone, Debug, Serialize)]
pub struct Property3Report {
    /// `max_Q ∏⟨R f_j⟩_{r_j,Q} / min_Q ∏ R f_j`.
    pub max_ratio: f64,
    pub constant: f64,
    pub gamma: f64,
    pub cpr: f64,
    /// `max_ratio / (2^m c_{p,r} [w]^γ)`.
    pub measured_c: f64,
    /// `∏ B_j / c_j`, the constant the series guarantees when summed to infinity.
    pub derived_c: f64,
}

/// Evaluates `∏⟨R f_j⟩_{r_j,Q} ≤ C 2^m c_{p,r} [w]^γ inf_Q ∏ R f_j` over dyadic cubes.
pub fn rdf_property3_check(
    ops: &[RdfOperator],
    setup: &ScaleSetup,
    w: &[StepFunction],
    rf: &[StepFunction],
) -> Result<Property3Report> {
    let level = rf.first().ok_or_else(|| Error::Invalid("no functions".into()))?.level();
    let grid = Grid::standard(level);
    let means = product_table(&grid, rf, &setup.r)?;
    let n = 1usize << level;
    let cellwise: Vec<f64> = (0..n).map(|c| rf.iter().map(|f| f.values()[c]).product()).collect();
    let low = cube_extrema(&grid, &cellwise, false);
    let ratios = CubeTable::zip_map(&[&means, &low], |v| v[0] / v[1])?;
    let max_ratio = ratios.argmax().1;
    let weights = w.iter().map(|x| Weight::step(x.clone())).collect::<Result<Vec<_>>>()?;
    let constant = weight_constant(&weights, setup, Family::Dyadic)?.value;
    let gamma = setup.buckley_exponent();
    let cpr = constant_cpr(&setup.p, &setup.r)?;
    let m = setup.m() as i32;
    let derived_c = ops
        .iter()
        .zip(setup.r.iter().zip(&setup.p))
        .map(|(op, (r, p))| op.bound() / (r.get() / (r.get() - p.get())).powf(r.get()))
        .product();
    Ok(Property3Report {
        max_ratio,
        constant,
        gamma,
        cpr,
        measured_c: max_ratio / (2f64.powi(m) * cpr * constant.powf(gamma)),
        derived_c,
    })
}

/// One application of the single-direction construction.
#[derive(Clone, Debug, Serialize)]
pub struct StageReport {
    /// Index (0-based) whose exponent increases.
    pub pivot: usize,
    pub from: Vec<Recip>,
    pub to: Vec<Recip>,
    /// `1/s_j` for the indices other than the pivot, in their order.
    pub s_split: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub bounds: Vec<f64>,
    pub doublings: Vec<u32>,
    /// `∏ ‖f_j‖_{L^{q_j}(W_j^{q_j})} / ∏ ‖f_j‖_{L^{p_j}(w_j^{p_j})}`.
    pub norm_ratio: f64,
}

/// The weights at the target tuple and how they were obtained.
#[derive(Clone, Debug)]
pub struct ExtrapolatedWeights {
    pub weights: Vec<StepFunction>,
    pub stages: Vec<StageReport>,
    /// Product of the stage norm ratios.
    pub norm_ratio: f64,
}

fn check_tuple(f: &[StepFunction], w: &[StepFunction], p: &[Recip], q: &[Recip], r: &[Recip]) -> Result<u32> {
    let m1 = w.len();
    if f.len() != m1 || p.len() != m1 || q.len() != m1 || r.len() != m1 || m1 < 2 {
        return Err(Error::Invalid("all tuples must have the same length m+1 ≥ 2".into()));
    }
    let level = w[0].level();
    if let Some(x) = w.iter().chain(f).find(|x| x.level() != level) {
        return Err(Error::LevelMismatch(level, x.level()));
    }
    for c in 0..1usize << level {
        if (w.iter().map(|x| x.values()[c]).product::<f64>() - 1.0).abs() > 1e-10 {
            return Err(Error::NotSymmetric);
        }
    }
    for (j, (pj, rj)) in p.iter().zip(r).enumerate() {
        if pj.get() >= rj.get() {
            return Err(Error::Inadmissible(format!("violation at j={}", j + 1)));
        }
    }
    Ok(level)
}

/// Norm product `∏ ‖f_j W_j‖_{L^{p_j}}`.
pub fn norm_product(f: &[StepFunction], w: &[StepFunction], p: &[Recip]) -> Result<f64> {
    let mut out = 1.0;
    for ((fj, wj), pj) in f.iter().zip(w).zip(p) {
        out *= lp_norm(fj.mul(wj)?.values(), *pj);
    }
    Ok(out)
}

/// Moves from `p` to `q` when exactly one reciprocal increases.
pub fn build_weights_step1(
    f: &[StepFunction],
    w: &[StepFunction],
    p: &[Recip],
    q: &[Recip],
    r: &[Recip],
    terms: usize,
) -> Result<ExtrapolatedWeights> {
    let level = check_tuple(f, w, p, q, r)?;
    let m1 = w.len();
    let rising: Vec<usize> = (0..m1).filter(|&j| q[j].get() - p[j].get() > EQ_TOL).collect();
    let j0 = match rising.as_slice() {
        [] => {
            return Ok(ExtrapolatedWeights { weights: w.to_vec(), stages: vec![], norm_ratio: 1.0 });
        }
        [j] => *j,
        _ => return Err(Error::UseStep2),
    };
    let rest: Vec<usize> = (0..m1).filter(|&j| j != j0).collect();
    let pick = |v: &[Recip]| rest.iter().map(|&j| v[j]).collect::<Vec<_>>();
    let (p_r, q_r, r_r) = (pick(p), pick(q), pick(r));
    let s = Recip::new(1.0 - r[j0].get())?;
    let tr = translation_params(&p_r, &r_r, s, SplitMode::Step1 { q: &q_r })?;
    let q_s = tr.q.clone().expect("step-1 split carries q");
    let ps = sum(&tr.p);
    let qs = sum(&q_s);
    let alpha = (ps - qs) / ps;
    let beta = qs / ps;
    let w_r: Vec<StepFunction> = rest.iter().map(|&j| w[j].clone()).collect();
    let setup = tr.setup()?;
    let n = 1usize << level;
    let mut big_w: Vec<Option<StepFunction>> = vec![None; m1];
    let (mut bounds, mut doublings) = (Vec::new(), Vec::new());
    for (i, &j) in rest.iter().enumerate() {
        let pjs = tr.p[i].get();
        let g = if pjs == 0.0 {
            w[j].powf(-1.0)?
        } else {
            if f[j].is_zero() {
                return Err(Error::ZeroDatum(j + 1));
            }
            let e_f = pjs / p[j].get();
            let e_w = -tr.s[i] / p[j].get();
            f[j].zip_with(&w[j], |a, b| a.powf(e_f) * b.powf(e_w))?
        };
        let mut op = RdfOperator::new(&setup, &w_r, i, terms)?;
        let rg = op.apply(&g)?.value;
        bounds.push(op.bound());
        doublings.push(op.doublings());
        big_w[j] = Some(rg.zip_with(&w[j], |a, b| a.powf(-alpha) * b.powf(beta))?);
    }
    let last: Vec<f64> = (0..n)
        .map(|c| 1.0 / rest.iter().map(|&j| big_w[j].as_ref().expect("set above").values()[c]).product::<f64>())
        .collect();
    big_w[j0] = Some(StepFunction::new(level, last)?);
    let weights: Vec<StepFunction> = big_w.into_iter().map(|x| x.expect("every index set")).collect();
    let before = norm_product(f, w, p)?;
    let after = norm_product(f, &weights, q)?;
    let norm_ratio = if before > 0.0 { after / before } else { 0.0 };
    let stage = StageReport {
        pivot: j0,
        from: p.to_vec(),
        to: q.to_vec(),
        s_split: tr.s,
        alpha,
        beta,
        bounds,
        doublings,
        norm_ratio,
    };
    Ok(ExtrapolatedWeights { weights, stages: vec![stage], norm_ratio })
}

/// Moves from `p` to `q` along the path of single-direction stages.
pub fn build_weights(
    f: &[StepFunction],
    w: &[StepFunction],
    p: &[Recip],
    q: &[Recip],
    r: &[Recip],
    terms: usize,
) -> Result<ExtrapolatedWeights> {
    check_tuple(f, w, p, q, r)?;
    let path = step2_path(p, q, r)?;
    let mut cur = w.to_vec();
    let mut stages = Vec::new();
    let mut norm_ratio = 1.0;
    for k in (1..=path.stages()).rev() {
        let out = build_weights_step1(f, &cur, &path.qk[k], &path.qk[k - 1], r, terms)?;
        norm_ratio *= out.norm_ratio;
        stages.extend(out.stages);
        cur = out.weights;
    }
    Ok(ExtrapolatedWeights { weights: cur, stages, norm_ratio })
}

/// `[W]_q`, `[w]_p`, the exponent `E` and `C = [W]_q / [w]_p^E`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConstantTransfer {
    pub before: f64,
    pub after: f64,
    pub exponent: f64,
    pub measured_c: f64,
}

pub fn constant_transfer(
    w: &[StepFunction],
    big_w: &[StepFunction],
    p: &[Recip],
    q: &[Recip],
    r: &[Recip],
) -> Result<ConstantTransfer> {
    let ws = |v: &[StepFunction]| v.iter().map(|x| Weight::step(x.clone())).collect::<Result<Vec<_>>>();
    let before = symmetric_constant(&ws(w)?, &SymmetricTuple { p: p.to_vec(), r: r.to_vec() }, Family::Dyadic)?.value;
    let after = symmetric_constant(&ws(big_w)?, &SymmetricTuple { p: q.to_vec(), r: r.to_vec() }, Family::Dyadic)?.value;
    let exponent = max_ratio(p, q, r)?;
    Ok(ConstantTransfer { before, after, exponent, measured_c: after / before.powf(exponent) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::recips;

    #[test]
    fn rdf_of_zero() {
        let w = vec![StepFunction::constant(3, 1.0).unwrap(); 2];
        let s = ScaleSetup::new(recips(&[1.0, 1.0]).unwrap(), Recip::INF, recips(&[0.5, 0.25]).unwrap()).unwrap();
        let mut op = RdfOperator::new(&s, &w, 0, DEFAULT_TERMS).unwrap();
        let out = op.apply(&StepFunction::constant(3, 0.0).unwrap()).unwrap();
        assert!(out.value.is_zero());
    }

    #[test]
    fn equal_tuples_keep_weights() {
        let w = vec![
            StepFunction::new(1, vec![2.0, 0.5]).unwrap(),
            StepFunction::new(1, vec![0.5, 2.0]).unwrap(),
        ];
        let f = vec![StepFunction::constant(1, 1.0).unwrap(); 2];
        let p = recips(&[0.5, 0.5]).unwrap();
        let r = recips(&[1.0, 1.0]).unwrap();
        let out = build_weights(&f, &w, &p, &p, &r, DEFAULT_TERMS).unwrap();
        assert_eq!(out.weights, w);
        assert!(out.stages.is_empty());
    }

    #[test]
    fn zero_datum_rejected() {
        let w = vec![StepFunction::constant(2, 1.0).unwrap(); 3];
        let f = vec![
            StepFunction::constant(2, 0.0).unwrap(),
            StepFunction::constant(2, 1.0).unwrap(),
            StepFunction::constant(2, 1.0).unwrap(),
        ];
        let r = recips(&[1.0; 3]).unwrap();
        let p = recips(&[0.5, 0.25, 0.25]).unwrap();
        let q = recips(&[0.25, 0.25, 0.5]).unwrap();
        assert_eq!(build_weights_step1(&f, &w, &p, &q, &r, 5).unwrap_err(), Error::ZeroDatum(1));
        let two_up = recips(&[0.625, 0.375, 0.0]).unwrap();
        assert_eq!(build_weights_step1(&f, &w, &p, &two_up, &r, 5).unwrap_err(), Error::UseStep2);
    }
}
