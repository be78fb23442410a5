//! End-to-end check of quantitative extrapolation on concrete data.
//!
//! The hypothesis `‖h‖_{L^q(V^q)} ≤ φ_q([V]) ∏ ‖f_j V_j‖_{L^{q_j}}` is evaluated at
//! the weights the construction produces, and the conclusion at `p` is compared
//! with the composed power law.

use rand::Rng;
use serde::Serialize;

use crate::dyadic::{lp_norm, weak_norm, Family, StepFunction};
use crate::error::{Error, Result};
use crate::exponent::{extrapolation_exponent, phi_compose, rescale, PowerLaw, Recip, ScaleSetup};
use crate::rdf::{build_weights, constant_transfer, norm_product};
use crate::sample::random_function;
use crate::weights::{weight_constant, Weight};

/// Relative slack allowed for rounding when comparing two sides of an inequality.
pub const SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PipelineStatus {
    Holds,
    Fails,
    HypothesisViolated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DualKind {
    Extremal,
    Random,
}

/// One pass through the chain for a fixed `f_{m+1}`.
#[derive(Clone, Debug, Serialize)]
pub struct DualReport {
    pub kind: DualKind,
    /// `⟨h, f_{m+1}⟩` on the rescaled side.
    pub pairing: f64,
    /// `‖h W‖_{q} ‖f_{m+1} W_{m+1}‖_{q_{m+1}}`.
    pub holder: f64,
    /// Hypothesis sides on the original scale.
    pub hypothesis_lhs: f64,
    pub hypothesis_rhs: f64,
    pub norm_ratio: f64,
    pub measured_c: f64,
    /// `2^{m²} φ̃(C [w]^E) ∏_{j ≤ m+1} ‖f_j w_j‖_{p_j}` on the rescaled side.
    pub chain_rhs: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub status: PipelineStatus,
    /// `Σ 1/r_j`.
    pub rho: f64,
    pub exponent: f64,
    pub constant: f64,
    pub lhs: f64,
    pub norm_product: f64,
    pub measured_c: f64,
    pub multiplier: f64,
    pub bound: f64,
    pub composed: PowerLaw,
    pub duals: Vec<DualReport>,
}

fn within(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs * (1.0 + SLACK)
}

fn product_of(w: &[StepFunction]) -> Result<StepFunction> {
    let mut out = w[0].clone();
    for x in &w[1..] {
        out = out.mul(x)?;
    }
    Ok(out)
}

fn h_norm(h: &StepFunction, w: &StepFunction, p: f64) -> Result<f64> {
    Ok(lp_norm(h.mul(w)?.values(), Recip::new(p)?))
}

/// Runs the chain for `h` against the target setup `(r, s, p)` with the
/// hypothesis `phi_q` at `q`.
///
/// `duals` random functions are tried as `f_{m+1}` in addition to the
/// duality-extremal one.
#[allow(clippy::too_many_arguments)]
pub fn extrapolation_pipeline_check<R: Rng>(
    f: &[StepFunction],
    h: &StepFunction,
    w: &[StepFunction],
    setup: &ScaleSetup,
    q: &[Recip],
    phi_q: &PowerLaw,
    duals: usize,
    terms: usize,
    rng: &mut R,
) -> Result<PipelineReport> {
    let m = setup.m();
    if f.len() != m || w.len() != m || q.len() != m {
        return Err(Error::Invalid(format!("expected {m} functions, weights and exponents")));
    }
    let level = h.level();
    let setup_q = setup.with_p(q.to_vec())?;
    let rho = setup.r_total();
    let a = 1.0 / rho;
    let (tp, tq) = (rescale(setup, a)?, rescale(&setup_q, a)?);
    let (sp, sq) = (tp.symmetric()?, tq.symmetric()?);

    let mut wt: Vec<StepFunction> = w.iter().map(|x| x.powf(a)).collect::<Result<_>>()?;
    let w_prod = product_of(&wt)?;
    wt.push(w_prod.powf(-1.0)?);
    let ft: Vec<StepFunction> = f.iter().map(|x| x.powf(a)).collect::<Result<_>>()?;
    let ht = h.powf(a)?;

    let exponent = extrapolation_exponent(&setup.p, q, &setup.r, setup.s)?;
    let composed = phi_compose(phi_q, &setup.p, q, &setup.r, setup.s)?;
    let ws: Vec<Weight> = w.iter().map(|x| Weight::step(x.clone())).collect::<Result<_>>()?;
    let constant = weight_constant(&ws, setup, Family::Dyadic)?.value;
    let wt_constant = constant.powf(a);
    let fw_norm = norm_product(f, w, &setup.p)?;
    let lhs = h_norm(h, &product_of(w)?, setup.p_total())?;

    let pt = tp.p_total();
    let qt = tq.p_total();
    let q_last = Recip::new(1.0 - qt)?;
    let n = ht.len();
    let mut candidates = vec![(DualKind::Extremal, ht.zip_with(&w_prod, |x, y| (x * y).powf(1.0 / pt - 1.0) * y)?)];
    for _ in 0..duals {
        candidates.push((DualKind::Random, random_function(level, rng)?));
    }

    let mut reports = Vec::new();
    let mut status = PipelineStatus::Holds;
    let mut measured_c: f64 = 0.0;
    for (kind, g) in candidates {
        if g.is_zero() {
            continue;
        }
        let mut fx = ft.clone();
        fx.push(g.clone());
        let out = build_weights(&fx, &wt, &sp.p, &sq.p, &sp.r, terms)?;
        let big_w = &out.weights;
        let w_in = product_of(&big_w[..m])?;
        let pairing = ht.values().iter().zip(g.values()).map(|(x, y)| x * y).sum::<f64>() / n as f64;
        let g_norm = lp_norm(g.mul(&big_w[m])?.values(), q_last);
        let holder = lp_norm(ht.mul(&w_in)?.values(), Recip::new(qt)?) * g_norm;

        let v: Vec<StepFunction> = big_w[..m].iter().map(|x| x.powf(rho)).collect::<Result<_>>()?;
        let vs: Vec<Weight> = v.iter().map(|x| Weight::step(x.clone())).collect::<Result<_>>()?;
        let v_constant = weight_constant(&vs, &setup_q, Family::Dyadic)?.value;
        let hypothesis_lhs = h_norm(h, &product_of(&v)?, setup_q.p_total())?;
        let hypothesis_rhs = phi_q.eval(v_constant, 1.0) * norm_product(f, &v, q)?;

        let ct = constant_transfer(&wt, big_w, &sp.p, &sq.p, &sp.r)?;
        measured_c = measured_c.max(ct.measured_c);
        let phi_t = phi_q.eval((ct.measured_c * wt_constant.powf(exponent)).powf(rho), 1.0).powf(a);
        let mm = (m * m) as i32;
        let chain_rhs = 2f64.powi(mm) * phi_t * norm_product(&fx, &wt, &sp.p)?;

        if !within(hypothesis_lhs, hypothesis_rhs) {
            status = PipelineStatus::HypothesisViolated;
        } else if !(within(pairing, holder) && within(holder, chain_rhs) && within(out.norm_ratio, 2f64.powi(mm)))
        {
            status = PipelineStatus::Fails;
        }
        reports.push(DualReport {
            kind,
            pairing,
            holder,
            hypothesis_lhs,
            hypothesis_rhs,
            norm_ratio: out.norm_ratio,
            measured_c: ct.measured_c,
            chain_rhs,
        });
    }
    let multiplier = composed.multiplier(measured_c);
    let bound = composed.eval(constant, measured_c) * fw_norm;
    if status == PipelineStatus::Holds && !within(lhs, bound) {
        status = PipelineStatus::Fails;
    }
    Ok(PipelineReport {
        status,
        rho,
        exponent,
        constant,
        lhs,
        norm_product: fw_norm,
        measured_c,
        multiplier,
        bound,
        composed,
        duals: reports,
    })
}

/// `φ_q(t) = e^{Σ 1/r_j} c_{q,r} t^γ`, the strong bound for the dyadic maximal operator.
pub fn maximal_hypothesis(setup_q: &ScaleSetup) -> Result<PowerLaw> {
    let c = setup_q.r_total().exp() * crate::exponent::constant_cpr(&setup_q.p, &setup_q.r)?;
    PowerLaw::new(c, setup_q.buckley_exponent())
}

/// `φ(t) = m^{1/q} t`, the weak-type bound for the dyadic maximal operator.
pub fn weak_maximal_hypothesis(setup_q: &ScaleSetup) -> Result<PowerLaw> {
    PowerLaw::new((setup_q.m() as f64).powf(setup_q.p_total()), 1.0)
}

/// `λ χ_{h > λ}`.
pub fn level_set(h: &StepFunction, lambda: f64) -> Result<StepFunction> {
    h.map(|x| if x > lambda { lambda } else { 0.0 })
}

/// `count` geometric levels between the smallest positive value of `h` and just below its maximum.
pub fn lambda_grid(h: &StepFunction, count: usize) -> Vec<f64> {
    let hi = h.values().iter().copied().fold(0.0, f64::max);
    let lo = h.values().iter().copied().filter(|&x| x > 0.0).fold(hi, f64::min);
    if hi == 0.0 || count == 0 {
        return vec![];
    }
    let top = hi * (1.0 - 1e-9);
    let bottom = lo.min(top) * 0.5;
    if count == 1 {
        return vec![top];
    }
    (0..count)
        .map(|i| bottom * (top / bottom).powf(i as f64 / (count - 1) as f64))
        .collect()
}

/// Sup over the λ-grid of the concluded bounds for `λ χ_{h > λ}`.
#[derive(Clone, Debug, Serialize)]
pub struct WeakPipelineReport {
    pub status: PipelineStatus,
    pub lambdas: Vec<f64>,
    /// `‖h_λ w‖_{L^p} / bound_λ` per level.
    pub ratios: Vec<f64>,
    /// `‖h w‖_{L^{p,∞}}`, which is the sup of `‖h_λ w‖_{L^p}`.
    pub weak_lhs: f64,
    pub sup_lhs: f64,
    pub max_multiplier: f64,
}

/// The weak-type reduction: runs the pipeline for every `h_λ` with a weak hypothesis.
#[allow(clippy::too_many_arguments)]
pub fn weak_pipeline_check<R: Rng>(
    f: &[StepFunction],
    h: &StepFunction,
    w: &[StepFunction],
    setup: &ScaleSetup,
    q: &[Recip],
    phi_q: &PowerLaw,
    lambdas: usize,
    duals: usize,
    terms: usize,
    rng: &mut R,
) -> Result<WeakPipelineReport> {
    let grid = lambda_grid(h, lambdas);
    let mut status = PipelineStatus::Holds;
    let (mut ratios, mut sup_lhs, mut max_multiplier) = (Vec::new(), 0.0f64, 0.0f64);
    for &lambda in &grid {
        let hl = level_set(h, lambda)?;
        let rep = extrapolation_pipeline_check(f, &hl, w, setup, q, phi_q, duals, terms, rng)?;
        if rep.status != PipelineStatus::Holds && status == PipelineStatus::Holds {
            status = rep.status;
        }
        ratios.push(rep.lhs / rep.bound);
        sup_lhs = sup_lhs.max(rep.lhs);
        max_multiplier = max_multiplier.max(rep.multiplier);
    }
    let pt = setup.p_total();
    let n = h.len() as f64;
    let mass: Vec<f64> = product_of(w)?.values().iter().map(|x| x.powf(1.0 / pt) / n).collect();
    let weak_lhs = weak_norm(h.values(), Some(&mass), Recip::new(pt)?);
    Ok(WeakPipelineReport { status, lambdas: grid, ratios, weak_lhs, sup_lhs, max_multiplier })
}
