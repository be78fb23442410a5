//! Reciprocal-exponent arithmetic.
//!
//! Every exponent `p` is carried as `1/p`, so `p = ∞` is the value `0` and
//! Hölder relations become sums.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used when deciding that two reciprocals coincide.
pub const EQ_TOL: f64 = 1e-13;

/// An exponent stored as its reciprocal.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Recip(f64);

impl Recip {
    /// `p = ∞`.
    pub const INF: Recip = Recip(0.0);
    /// `p = 1`.
    pub const ONE: Recip = Recip(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value >= 0.0 {
            Ok(Recip(value))
        } else {
            Err(Error::InvalidExponent(format!("reciprocal {value} is not a finite nonnegative number")))
        }
    }

    /// Build from the exponent itself; `f64::INFINITY` maps to `INF`.
    pub fn from_exponent(p: f64) -> Result<Self> {
        if p.is_nan() || p <= 0.0 {
            return Err(Error::InvalidExponent(format!("exponent {p} must be positive")));
        }
        Ok(Recip(if p.is_infinite() { 0.0 } else { 1.0 / p }))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// The exponent `p` (possibly infinite).
    pub fn exponent(self) -> f64 {
        if self.0 == 0.0 {
            f64::INFINITY
        } else {
            1.0 / self.0
        }
    }

    pub fn is_inf(self) -> bool {
        self.0 == 0.0
    }

    /// `1 - 1/p`, defined only for `1/p ≤ 1`.
    pub fn dual(self) -> Result<Recip> {
        if self.0 > 1.0 + EQ_TOL {
            return Err(Error::InvalidExponent(format!("dual of reciprocal {} > 1", self.0)));
        }
        Ok(Recip((1.0 - self.0).max(0.0)))
    }

    /// Multiply the reciprocal by `alpha`, i.e. `p ↦ p/alpha`.
    pub fn scale(self, alpha: f64) -> Recip {
        Recip(self.0 * alpha)
    }

    /// Round reciprocals that are negative only through rounding up to zero.
    pub(crate) fn snapped(value: f64) -> Result<Recip> {
        if value < 0.0 && value > -EQ_TOL {
            Ok(Recip(0.0))
        } else {
            Recip::new(value)
        }
    }
}

impl fmt::Display for Recip {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inf() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.exponent())
        }
    }
}

pub fn sum(v: &[Recip]) -> f64 {
    v.iter().map(|x| x.0).sum()
}

pub fn recips(values: &[f64]) -> Result<Vec<Recip>> {
    values.iter().map(|&v| Recip::new(v)).collect()
}

/// The tuple `(m, r, s, p)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleSetup {
    pub r: Vec<Recip>,
    pub s: Recip,
    pub p: Vec<Recip>,
}

impl ScaleSetup {
    pub fn new(r: Vec<Recip>, s: Recip, p: Vec<Recip>) -> Result<Self> {
        if r.is_empty() || r.len() != p.len() {
            return Err(Error::Invalid(format!("r has {} entries, p has {}", r.len(), p.len())));
        }
        if let Some(j) = r.iter().position(|x| x.0 <= 0.0) {
            return Err(Error::InvalidExponent(format!("r_{} must be finite", j + 1)));
        }
        Ok(ScaleSetup { r, s, p })
    }

    pub fn m(&self) -> usize {
        self.r.len()
    }

    /// `1/p = Σ 1/p_j`.
    pub fn p_total(&self) -> f64 {
        sum(&self.p)
    }

    /// `1/r = Σ 1/r_j`.
    pub fn r_total(&self) -> f64 {
        sum(&self.r)
    }

    /// Same `r`, `s` with a different `p`.
    pub fn with_p(&self, p: Vec<Recip>) -> Result<Self> {
        ScaleSetup::new(self.r.clone(), self.s, p)
    }

    /// The symmetric `(m+1)`-tuple: `1/p_{m+1} = 1 - 1/p`, `1/r_{m+1} = 1 - 1/s`.
    pub fn symmetric(&self) -> Result<SymmetricTuple> {
        let pt = self.p_total();
        if pt > 1.0 + EQ_TOL || self.s.0 > 1.0 + EQ_TOL {
            return Err(Error::UseRescaleFirst);
        }
        let mut p = self.p.clone();
        p.push(Recip((1.0 - pt).max(0.0)));
        let mut r = self.r.clone();
        r.push(Recip((1.0 - self.s.0).max(0.0)));
        Ok(SymmetricTuple { p, r })
    }

    /// `γ = max_j (1/r_j)/(1/r_j - 1/p_j)`, the strong-type exponent in the `s = ∞` form.
    pub fn buckley_exponent(&self) -> f64 {
        self.r
            .iter()
            .zip(&self.p)
            .map(|(r, p)| pole_ratio(r.0, r.0 - p.0))
            .fold(0.0, f64::max)
    }
}

/// An `(m+1)`-tuple with reciprocal sums of `p` equal to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetricTuple {
    pub p: Vec<Recip>,
    pub r: Vec<Recip>,
}

impl SymmetricTuple {
    /// `γ = max_j (1/r_j)/(1/r_j - 1/p_j)`; indices with `1/r_j = 0` are skipped.
    pub fn gamma(&self) -> f64 {
        self.r
            .iter()
            .zip(&self.p)
            .filter(|(r, _)| r.0 > 0.0)
            .map(|(r, p)| pole_ratio(r.0, r.0 - p.0))
            .fold(0.0, f64::max)
    }
}

/// First violated admissibility condition. `index` is 1-based; `None` is the `s` condition.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub index: Option<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(j) => write!(f, "violation at j={j}: {}", self.message),
            None => write!(f, "violation of p ≤ s: {}", self.message),
        }
    }
}

/// Checks `(r,s) ≤ p`, or `(r,s) < p` when `strict`.
pub fn validate_setup(setup: &ScaleSetup, strict: bool) -> std::result::Result<(), Violation> {
    for (j, (r, p)) in setup.r.iter().zip(&setup.p).enumerate() {
        let ok = if strict { p.0 < r.0 } else { p.0 <= r.0 + EQ_TOL };
        if !ok {
            return Err(Violation {
                index: Some(j + 1),
                message: format!("1/p_j = {} against 1/r_j = {}", p.0, r.0),
            });
        }
    }
    let pt = setup.p_total();
    let ok = if strict { pt > setup.s.0 } else { pt + EQ_TOL >= setup.s.0 };
    if !ok {
        return Err(Violation { index: None, message: format!("1/p = {pt} against 1/s = {}", setup.s.0) });
    }
    Ok(())
}

pub(crate) fn check(setup: &ScaleSetup, strict: bool) -> Result<()> {
    validate_setup(setup, strict).map_err(|v| Error::Inadmissible(v.to_string()))
}

/// `num/den` where `0/0` counts as one.
fn ratio(num: f64, den: f64) -> Result<f64> {
    if den.abs() <= EQ_TOL {
        if num.abs() <= EQ_TOL {
            Ok(1.0)
        } else {
            Err(Error::InadmissiblePair)
        }
    } else {
        Ok(num / den)
    }
}

/// `num/den` with a vanishing denominator read as a pole.
fn pole_ratio(num: f64, den: f64) -> f64 {
    if den.abs() <= EQ_TOL {
        if num.abs() <= EQ_TOL {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        num / den
    }
}

/// `max_j (1/r_j - 1/q_j)/(1/r_j - 1/p_j)` over equal-length tuples.
pub fn max_ratio(p: &[Recip], q: &[Recip], r: &[Recip]) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for ((p, q), r) in p.iter().zip(q).zip(r) {
        best = best.max(ratio(r.0 - q.0, r.0 - p.0)?);
    }
    Ok(best)
}

/// The exponent multiplying `α` when extrapolating from `q` to `p`.
pub fn extrapolation_exponent(p: &[Recip], q: &[Recip], r: &[Recip], s: Recip) -> Result<f64> {
    let sp = ScaleSetup::new(r.to_vec(), s, p.to_vec())?;
    let sq = ScaleSetup::new(r.to_vec(), s, q.to_vec())?;
    check(&sp, false)?;
    check(&sq, false)?;
    let comp = max_ratio(p, q, r)?;
    let tail = ratio(sum(q) - s.0, sum(p) - s.0)?;
    Ok(comp.max(tail))
}

/// Factors of the extrapolated bound that the theory leaves implicit.
///
/// The true constant is `factor · C^c_exponent` for an unknown `C ≥ 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Uncertainty {
    pub factor: f64,
    pub c_exponent: f64,
}

/// `φ(t) = coeff · t^alpha`, times an uncertainty multiplier.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub coeff: f64,
    pub alpha: f64,
    pub uncertainty: Uncertainty,
}

impl PowerLaw {
    pub fn new(coeff: f64, alpha: f64) -> Result<Self> {
        if !(coeff > 0.0 && coeff.is_finite() && alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::Invalid(format!("power law c={coeff}, alpha={alpha}")));
        }
        Ok(PowerLaw { coeff, alpha, uncertainty: Uncertainty { factor: 1.0, c_exponent: 0.0 } })
    }

    /// Multiplier for a given value of the unknown constant.
    pub fn multiplier(&self, c: f64) -> f64 {
        self.uncertainty.factor * c.powf(self.uncertainty.c_exponent)
    }

    pub fn eval(&self, t: f64, c: f64) -> f64 {
        self.coeff * self.multiplier(c) * t.powf(self.alpha)
    }
}

/// The bound at `p` obtained from the hypothesis `phi_q` at `q`.
///
/// With `1/r = Σ 1/r_j`, the result is `2^{m²/r} C^{α/r} c t^{α E}`.
pub fn phi_compose(phi_q: &PowerLaw, p: &[Recip], q: &[Recip], r: &[Recip], s: Recip) -> Result<PowerLaw> {
    let e = extrapolation_exponent(p, q, r, s)?;
    let m = r.len() as f64;
    let rt = sum(r);
    Ok(PowerLaw {
        coeff: phi_q.coeff,
        alpha: phi_q.alpha * e,
        uncertainty: Uncertainty {
            factor: phi_q.uncertainty.factor * (m * m * rt).exp2(),
            c_exponent: phi_q.uncertainty.c_exponent + phi_q.alpha * rt,
        },
    })
}

/// How to split `1/s` over the components.
#[derive(Clone, Copy, Debug)]
pub enum SplitMode<'a> {
    /// `1/s_j = (1/p_j)/(1/p) · 1/s`.
    Generic,
    /// The split that keeps `1/s_j ≤ 1/q_j` along a direction towards `q`.
    Step1 { q: &'a [Recip] },
}

/// Result of splitting `1/s`.
#[derive(Clone, Debug, PartialEq)]
pub struct Translation {
    /// `1/s_j`; may be negative.
    pub s: Vec<f64>,
    pub p: Vec<Recip>,
    pub r: Vec<Recip>,
    /// Present in step-1 mode.
    pub q: Option<Vec<Recip>>,
}

impl Translation {
    /// The translated setup `(p(s), (r(s), ∞))`.
    pub fn setup(&self) -> Result<ScaleSetup> {
        ScaleSetup::new(self.r.clone(), Recip::INF, self.p.clone())
    }
}

pub fn translation_params(p: &[Recip], r: &[Recip], s: Recip, mode: SplitMode<'_>) -> Result<Translation> {
    let setup = ScaleSetup::new(r.to_vec(), s, p.to_vec())?;
    let pt = setup.p_total();
    let split: Vec<f64> = match mode {
        SplitMode::Generic => {
            check(&setup, false)?;
            if pt == 0.0 {
                if s.0 != 0.0 {
                    return Err(Error::InadmissiblePair);
                }
                vec![0.0; p.len()]
            } else {
                p.iter().map(|pj| pj.0 / pt * s.0).collect()
            }
        }
        SplitMode::Step1 { q } => {
            if q.len() != p.len() {
                return Err(Error::Invalid("q and p differ in length".into()));
            }
            let qt = sum(q);
            if (pt - qt).abs() <= EQ_TOL {
                return Err(Error::DegenerateDirection);
            }
            p.iter()
                .zip(q)
                .map(|(pj, qj)| {
                    if (pj.0 - qj.0).abs() <= EQ_TOL {
                        pj.0
                    } else {
                        ((pt - s.0) * qj.0 - (qt - s.0) * pj.0) / (pt - qt)
                    }
                })
                .collect()
        }
    };
    let shift = |v: &[Recip]| -> Result<Vec<Recip>> {
        v.iter().zip(&split).map(|(x, sj)| Recip::snapped(x.0 - sj)).collect()
    };
    let q = match mode {
        SplitMode::Step1 { q } => Some(shift(q)?),
        SplitMode::Generic => None,
    };
    Ok(Translation { p: shift(p)?, r: shift(r)?, q, s: split })
}

/// Multiply every reciprocal by `alpha`.
pub fn rescale(setup: &ScaleSetup, alpha: f64) -> Result<ScaleSetup> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Invalid(format!("rescale factor {alpha}")));
    }
    let sc = |v: &[Recip]| v.iter().map(|x| x.scale(alpha)).collect::<Vec<_>>();
    ScaleSetup::new(sc(&setup.r), setup.s.scale(alpha), sc(&setup.p))
}

/// The chain of intermediate tuples joining `p` to `q`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtrapolationPath {
    /// Number of indices with `1/p_j ≥ 1/q_j`.
    pub j1: usize,
    /// `perm[k]` is the original index at sorted position `k`.
    pub perm: Vec<usize>,
    pub theta: Vec<f64>,
    /// `qk[k]` in original index order; `qk[0] = q`, `qk[n] = p`.
    pub qk: Vec<Vec<Recip>>,
    pub gamma: Vec<f64>,
}

impl ExtrapolationPath {
    pub fn stages(&self) -> usize {
        self.gamma.len()
    }

    pub fn gamma_product(&self) -> f64 {
        self.gamma.iter().product()
    }

    /// Original index whose exponent moves from `p_j` to `q_j` in the stage `qk[k] → qk[k-1]`.
    pub fn pivot(&self, k: usize) -> usize {
        let m1 = self.perm.len();
        self.perm[m1 - k]
    }
}

fn sum_check(v: &[Recip], what: &str) -> Result<()> {
    let s = sum(v);
    if (s - 1.0).abs() > 1e-12 {
        return Err(Error::Invalid(format!("{what} reciprocals sum to {s}, expected 1")));
    }
    Ok(())
}

pub fn step2_path(p: &[Recip], q: &[Recip], r: &[Recip]) -> Result<ExtrapolationPath> {
    let m1 = p.len();
    if q.len() != m1 || r.len() != m1 || m1 < 2 {
        return Err(Error::Invalid("step2 tuples must share a length of at least 2".into()));
    }
    sum_check(p, "p")?;
    sum_check(q, "q")?;
    for j in 0..m1 {
        if q[j].0 > r[j].0 + EQ_TOL || p[j].0 > r[j].0 + EQ_TOL {
            return Err(Error::Inadmissible(format!("index {} exceeds 1/r_j", j + 1)));
        }
    }
    let d: Vec<f64> = (0..m1).map(|j| p[j].0 - q[j].0).collect();
    let mut perm: Vec<usize> = (0..m1).collect();
    perm.sort_by(|&a, &b| d[b].partial_cmp(&d[a]).expect("finite reciprocals"));
    let j1 = perm.iter().take_while(|&&j| d[j] >= 0.0).count();
    let n = m1 - j1;
    if n == 0 {
        return Ok(ExtrapolationPath { j1, perm, theta: vec![0.0], qk: vec![q.to_vec()], gamma: vec![] });
    }
    // θ_k: share of the decrease carried by the last k sorted indices.
    let partial = |k: usize| -> f64 { perm[m1 - k..].iter().rev().map(|&j| -d[j]).sum() };
    let total = partial(n);
    let theta: Vec<f64> = (0..=n).map(|k| partial(k) / total).collect();
    let mut qk = Vec::with_capacity(n + 1);
    for (k, &th) in theta.iter().enumerate() {
        let mut t = vec![Recip::INF; m1];
        for (pos, &j) in perm.iter().enumerate() {
            t[j] = if pos < j1 {
                if k == n {
                    p[j]
                } else {
                    Recip::new(q[j].0 + th * d[j])?
                }
            } else if pos >= m1 - k {
                p[j]
            } else {
                q[j]
            };
        }
        qk.push(t);
    }
    let mut gamma = Vec::with_capacity(n);
    for k in 1..=n {
        let mut g = f64::NEG_INFINITY;
        for &j in &perm[..j1] {
            g = g.max(ratio(r[j].0 - qk[k - 1][j].0, r[j].0 - qk[k][j].0)?);
        }
        if j1 == 0 {
            g = 1.0;
        }
        gamma.push(g);
    }
    let path = ExtrapolationPath { j1, perm, theta, qk, gamma };
    verify_path(&path, p, q, r)?;
    Ok(path)
}

fn verify_path(path: &ExtrapolationPath, p: &[Recip], q: &[Recip], r: &[Recip]) -> Result<()> {
    let th = &path.theta;
    if th[0] != 0.0 || *th.last().unwrap() != 1.0 || th.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Internal(format!("theta sequence {th:?}")));
    }
    for t in &path.qk {
        sum_check(t, "intermediate")?;
    }
    let target = max_ratio(p, q, r)?;
    let prod = path.gamma_product();
    if (prod - target).abs() > 1e-12 * target.abs().max(1.0) {
        return Err(Error::Internal(format!("gamma product {prod} against max ratio {target}")));
    }
    Ok(())
}

/// `((1-a)x + a)/((1-b)x + b)` for consecutive `θ_{k-1} = a ≤ θ_k = b`.
pub fn stage_map(a: f64, b: f64, x: f64) -> f64 {
    ((1.0 - a) * x + a) / ((1.0 - b) * x + b)
}

/// `max(max_j (1/r_j)/(1/r_j - 1/p_j), (1 - 1/s)/(1/p - 1/s))`; `+∞` at the boundary.
pub fn sparse_exponent(p: &[Recip], r: &[Recip], s: Recip) -> Result<f64> {
    let setup = ScaleSetup::new(r.to_vec(), s, p.to_vec())?;
    check(&setup, false)?;
    if s.0 > 1.0 + EQ_TOL {
        return Err(Error::EmptyRange);
    }
    let comp = setup.buckley_exponent();
    let tail = pole_ratio(1.0 - s.0, setup.p_total() - s.0);
    Ok(comp.max(tail))
}

/// The central point `1/q_j = τ/r_j` where all ratios of the sparse exponent agree.
#[derive(Clone, Debug, PartialEq)]
pub struct Central {
    pub tau: f64,
    pub q: Vec<Recip>,
    /// The common value `1/(1-τ)`.
    pub ratio: f64,
}

pub fn central_exponents(r: &[Recip], s: Recip) -> Result<Central> {
    if r.is_empty() || r.iter().any(|x| x.0 <= 0.0) || s.0 > 1.0 {
        return Err(Error::EmptyRange);
    }
    let inv_tau = (1.0 - s.0) + sum(r);
    if inv_tau <= 1.0 {
        return Err(Error::EmptyRange);
    }
    let tau = 1.0 / inv_tau;
    let q = r.iter().map(|x| x.scale(tau)).collect();
    Ok(Central { tau, q, ratio: 1.0 / (1.0 - tau) })
}

/// Exponent of the iterated (vector-valued) extrapolation.
pub fn vector_valued_exponent(p: &[Recip], q: &[Recip], r: &[Recip], s: Recip) -> Result<f64> {
    for t in [p, q] {
        check(&ScaleSetup::new(r.to_vec(), s, t.to_vec())?, true)?;
    }
    Ok(sparse_exponent(q, r, s)? * extrapolation_exponent(p, q, r, s)?)
}

/// `∏ [(1/r_j)/(1/r_j - 1/p_j)]^{1/r_j}` over any tuple.
pub fn constant_cpr(p: &[Recip], r: &[Recip]) -> Result<f64> {
    if p.len() != r.len() {
        return Err(Error::Invalid("p and r differ in length".into()));
    }
    let mut factors = Vec::with_capacity(p.len());
    for (j, (pj, rj)) in p.iter().zip(r).enumerate() {
        if rj.0 == 0.0 {
            continue;
        }
        let den = rj.0 - pj.0;
        if den <= EQ_TOL {
            return Err(Error::Pole(j + 1));
        }
        factors.push((rj.0 / den).powf(rj.0));
    }
    Ok(factors.iter().product())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rv(v: &[f64]) -> Vec<Recip> {
        recips(v).unwrap()
    }

    #[test]
    fn validate_examples() {
        let s = ScaleSetup::new(rv(&[1.0, 1.0]), Recip::INF, rv(&[0.5, 0.5])).unwrap();
        assert!(validate_setup(&s, true).is_ok());
        let s = ScaleSetup::new(rv(&[1.0]), Recip::INF, rv(&[1.0])).unwrap();
        assert_eq!(validate_setup(&s, true).unwrap_err().index, Some(1));
        assert!(validate_setup(&s, false).is_ok());
        // 1/p = 5/6 ≥ 1/s = 1/4, so this one is admissible.
        let s = ScaleSetup::new(rv(&[1.0, 0.5]), Recip::new(0.25).unwrap(), rv(&[0.5, 1.0 / 3.0])).unwrap();
        assert!(validate_setup(&s, true).is_ok());
        // 1/p below 1/s.
        let s = ScaleSetup::new(rv(&[1.0, 0.5]), Recip::new(0.9).unwrap(), rv(&[0.5, 1.0 / 3.0])).unwrap();
        assert_eq!(validate_setup(&s, false).unwrap_err().index, None);
    }

    #[test]
    fn extrapolation_examples() {
        let r = rv(&[1.0]);
        assert_eq!(extrapolation_exponent(&rv(&[0.25]), &rv(&[0.5]), &r, Recip::INF).unwrap(), 2.0);
        assert_eq!(extrapolation_exponent(&rv(&[0.5]), &rv(&[0.5]), &r, Recip::INF).unwrap(), 1.0);
        let e = extrapolation_exponent(&rv(&[1.0 / 3.0]), &rv(&[0.0]), &r, Recip::INF).unwrap();
        assert!((e - 1.5).abs() < 1e-15);
        // p = r with q ≠ r has no finite ratio.
        assert_eq!(
            extrapolation_exponent(&rv(&[1.0]), &rv(&[0.5]), &r, Recip::INF),
            Err(Error::InadmissiblePair)
        );
    }

    #[test]
    fn compose_examples() {
        let r = rv(&[1.0]);
        let sq = PowerLaw::new(1.0, 2.0).unwrap();
        let out = phi_compose(&sq, &rv(&[0.25]), &rv(&[0.5]), &r, Recip::INF).unwrap();
        assert_eq!(out.alpha, 4.0);
        assert_eq!(out.uncertainty.factor, 2.0);
        assert_eq!(out.uncertainty.c_exponent, 2.0);
        let id = PowerLaw::new(1.0, 1.0).unwrap();
        let out = phi_compose(&id, &rv(&[0.2]), &rv(&[0.0]), &r, Recip::INF).unwrap();
        assert!((out.alpha - 1.25).abs() < 1e-15);
    }

    #[test]
    fn translation_examples() {
        let t = translation_params(&rv(&[0.25, 0.25]), &rv(&[1.0, 1.0]), Recip::new(0.5).unwrap(), SplitMode::Generic)
            .unwrap();
        assert_eq!(t.s, vec![0.25, 0.25]);
        let q = rv(&[0.25, 0.25]);
        let t = translation_params(&rv(&[0.5, 0.25]), &rv(&[1.0, 1.0]), Recip::INF, SplitMode::Step1 { q: &q }).unwrap();
        assert!((t.s[0] + 0.25).abs() < 1e-15);
        assert_eq!(t.s[1], 0.25);
        assert_eq!(t.p[1], Recip::INF);
        let same = rv(&[0.5, 0.25]);
        assert_eq!(
            translation_params(&same, &rv(&[1.0, 1.0]), Recip::INF, SplitMode::Step1 { q: &same }),
            Err(Error::DegenerateDirection)
        );
    }

    #[test]
    fn rescale_examples() {
        let s = ScaleSetup::new(rv(&[1.0, 1.0]), Recip::INF, rv(&[0.25, 0.5])).unwrap();
        assert_eq!(rescale(&s, 1.0).unwrap(), s);
        assert_eq!(rescale(&s, 0.5).unwrap().r_total(), 1.0);
        assert_eq!(rescale(&s, 2.0).unwrap().p[0].get(), 0.5);
    }

    #[test]
    fn worked_path() {
        let path = step2_path(&rv(&[0.5, 0.25, 0.25]), &rv(&[0.25, 0.25, 0.5]), &rv(&[1.0; 3])).unwrap();
        assert_eq!(path.j1, 2);
        assert_eq!(path.gamma, vec![1.5]);
        assert_eq!(path.pivot(1), 2);
        let trivial = step2_path(&rv(&[0.5, 0.5]), &rv(&[0.5, 0.5]), &rv(&[1.0, 1.0])).unwrap();
        assert_eq!(trivial.gamma_product(), 1.0);
    }

    #[test]
    fn sparse_and_central() {
        let c = central_exponents(&rv(&[1.0]), Recip::INF).unwrap();
        assert_eq!(c.tau, 0.5);
        assert_eq!(c.q, rv(&[0.5]));
        assert_eq!(c.ratio, 2.0);
        let e = sparse_exponent(&rv(&[0.25, 0.5]), &rv(&[1.0, 1.0]), Recip::INF).unwrap();
        // max(p1', p2', p) = max(4/3, 2, 4/3)
        assert!((e - 2.0).abs() < 1e-15);
        assert_eq!(sparse_exponent(&rv(&[1.0, 0.0]), &rv(&[1.0, 1.0]), Recip::INF).unwrap(), f64::INFINITY);
        let v = vector_valued_exponent(&rv(&[0.25]), &rv(&[0.5]), &rv(&[1.0]), Recip::INF).unwrap();
        assert_eq!(v, 4.0);
        let v = vector_valued_exponent(&rv(&[0.25, 0.25]), &rv(&[0.5, 0.5]), &rv(&[1.0, 1.0]), Recip::INF).unwrap();
        assert_eq!(v, 4.0);
    }

    #[test]
    fn cpr_examples() {
        assert_eq!(constant_cpr(&rv(&[0.0, 0.0]), &rv(&[1.0, 1.0])).unwrap(), 1.0);
        assert_eq!(constant_cpr(&rv(&[0.5, 0.5]), &rv(&[1.0, 1.0])).unwrap(), 4.0);
        assert_eq!(constant_cpr(&rv(&[1.0]), &rv(&[1.0])), Err(Error::Pole(1)));
    }
}
