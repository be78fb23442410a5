//! Constants of the multilinear limited-range weight classes.

use crate::dyadic::{cube_extrema, cube_means, CubeTable, DyadicCube, Family, Grid, StepFunction};
use crate::error::{Error, Result};
use crate::exponent::{check, sum, Recip, ScaleSetup, SymmetricTuple, EQ_TOL};
use crate::power::PowerCellWeight;

/// A positive weight: cell-constant, or an exact power of `x`.
#[derive(Clone, Debug, PartialEq)]
pub enum Weight {
    Step(StepFunction),
    Power { level: u32, w: PowerCellWeight },
}

impl Weight {
    pub fn step(f: StepFunction) -> Result<Self> {
        if !f.is_positive() {
            return Err(Error::Invalid("weights must be strictly positive".into()));
        }
        Ok(Weight::Step(f))
    }

    pub fn power(level: u32, b: f64) -> Self {
        Weight::Power { level, w: PowerCellWeight::new(b) }
    }

    pub fn level(&self) -> u32 {
        match self {
            Weight::Step(f) => f.level(),
            Weight::Power { level, .. } => *level,
        }
    }

    pub fn pow(&self, e: f64) -> Result<Weight> {
        Ok(match self {
            Weight::Step(f) => Weight::Step(f.powf(e)?),
            Weight::Power { level, w } => Weight::Power { level: *level, w: w.pow(e) },
        })
    }

    /// Pointwise product; both factors must have the same kind.
    pub fn mul(&self, other: &Weight) -> Result<Weight> {
        match (self, other) {
            (Weight::Step(a), Weight::Step(b)) => Ok(Weight::Step(a.mul(b)?)),
            (Weight::Power { level: la, w: a }, Weight::Power { level: lb, w: b }) => {
                if la != lb {
                    return Err(Error::LevelMismatch(*la, *lb));
                }
                Ok(Weight::power(*la, a.b + b.b))
            }
            _ => Err(Error::Invalid("cannot multiply a step weight by a power weight".into())),
        }
    }

    pub fn product(ws: &[Weight]) -> Result<Weight> {
        let (first, rest) = ws.split_first().ok_or_else(|| Error::Invalid("empty weight tuple".into()))?;
        rest.iter().try_fold(first.clone(), |acc, w| acc.mul(w))
    }

    /// `⟨w⟩_{t,Q}` for every cube of `grid`, `1/t = rho`.
    pub fn means(&self, grid: &Grid, rho: Recip) -> Result<CubeTable> {
        if grid.level() != self.level() {
            return Err(Error::LevelMismatch(grid.level(), self.level()));
        }
        match self {
            Weight::Step(f) => Ok(cube_means(grid, f.values(), None, rho)),
            Weight::Power { w, .. } => CubeTable::from_fn(grid, |q| w.cube_average(rho, grid, q)),
        }
    }

    pub fn as_step(&self) -> Option<&StepFunction> {
        match self {
            Weight::Step(f) => Some(f),
            Weight::Power { .. } => None,
        }
    }
}

/// A supremum over cubes together with the first cube attaining it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightConstant {
    pub value: f64,
    pub cube: DyadicCube,
}

fn sorted_product(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).expect("finite averages"));
    s.iter().product()
}

/// `sup_Q ∏_j ⟨u_j⟩_{t_j,Q}` for `(weight, 1/t_j)` pairs.
fn sup_of_products(factors: &[(Weight, Recip)], family: Family) -> Result<WeightConstant> {
    let level = factors.first().ok_or_else(|| Error::Invalid("empty weight tuple".into()))?.0.level();
    let mut best: Option<WeightConstant> = None;
    for grid in family.grids(level) {
        let tables = factors.iter().map(|(w, rho)| w.means(&grid, *rho)).collect::<Result<Vec<_>>>()?;
        let refs: Vec<&CubeTable> = tables.iter().collect();
        let (cube, value) = CubeTable::zip_map(&refs, sorted_product)?.argmax();
        if best.map_or(true, |b| value > b.value) {
            best = Some(WeightConstant { value, cube });
        }
    }
    Ok(best.expect("at least one grid"))
}

fn gap(hi: Recip, lo: Recip) -> Result<Recip> {
    Recip::new((hi.get() - lo.get()).max(0.0))
}

fn check_levels(w: &[Weight]) -> Result<()> {
    let l = w.first().ok_or_else(|| Error::Invalid("empty weight tuple".into()))?.level();
    match w.iter().find(|x| x.level() != l) {
        Some(x) => Err(Error::LevelMismatch(l, x.level())),
        None => Ok(()),
    }
}

/// `[w]_{p,(r,s)} = sup_Q ∏_j ⟨w_j^{-1}⟩_{1/(1/r_j-1/p_j),Q} · ⟨w⟩_{1/(1/p-1/s),Q}` with `w = ∏ w_j`.
pub fn weight_constant(w: &[Weight], setup: &ScaleSetup, family: Family) -> Result<WeightConstant> {
    check(setup, false)?;
    if w.len() != setup.m() {
        return Err(Error::Invalid(format!("{} weights for m = {}", w.len(), setup.m())));
    }
    check_levels(w)?;
    let mut factors = Vec::with_capacity(w.len() + 1);
    for (j, wj) in w.iter().enumerate() {
        factors.push((wj.pow(-1.0)?, gap(setup.r[j], setup.p[j])?));
    }
    factors.push((Weight::product(w)?, gap(Recip::new(setup.p_total())?, setup.s)?));
    sup_of_products(&factors, family)
}

/// Append `w_{m+1} = (∏ w_j)^{-1}` and the matching exponents.
pub fn extend_symmetric(w: &[Weight], setup: &ScaleSetup) -> Result<(Vec<Weight>, SymmetricTuple)> {
    let sym = setup.symmetric()?;
    let mut ext = w.to_vec();
    ext.push(Weight::product(w)?.pow(-1.0)?);
    Ok((ext, sym))
}

fn check_symmetric(w: &[Weight], sym: &SymmetricTuple, strict: bool) -> Result<()> {
    if w.len() != sym.p.len() || sym.r.len() != sym.p.len() {
        return Err(Error::Invalid("tuple lengths differ".into()));
    }
    check_levels(w)?;
    if (sum(&sym.p) - 1.0).abs() > 1e-12 {
        return Err(Error::Inadmissible(format!("p reciprocals sum to {}", sum(&sym.p))));
    }
    for (j, (p, r)) in sym.p.iter().zip(&sym.r).enumerate() {
        let ok = if strict { p.get() < r.get() } else { p.get() <= r.get() + EQ_TOL };
        if !ok {
            return Err(Error::Inadmissible(format!("violation at j={}", j + 1)));
        }
    }
    Ok(())
}

/// `sup_Q ∏_{j ≤ m+1} ⟨w_j^{-1}⟩_{1/(1/r_j-1/p_j),Q}` for a symmetric tuple.
///
/// The factors are multiplied in sorted order, so the value does not depend on
/// the order of the indices.
pub fn symmetric_constant(w: &[Weight], sym: &SymmetricTuple, family: Family) -> Result<WeightConstant> {
    check_symmetric(w, sym, false)?;
    let factors = w
        .iter()
        .zip(sym.r.iter().zip(&sym.p))
        .map(|(wj, (r, p))| Ok((wj.pow(-1.0)?, gap(*r, *p)?)))
        .collect::<Result<Vec<_>>>()?;
    sup_of_products(&factors, family)
}

/// `sup_Q ⟨w⟩_{1,Q} (inf_Q w)^{-1}` over dyadic cubes.
pub fn classical_a1(w: &StepFunction) -> f64 {
    let g = Grid::standard(w.level());
    let avg = cube_means(&g, w.values(), None, Recip::ONE);
    let low = cube_extrema(&g, w.values(), false);
    CubeTable::zip_map(&[&avg, &low], |v| v[0] / v[1]).expect("same grid").argmax().1
}

/// `sup_Q ⟨w⟩_{1,Q} ⟨w^{1-p'}⟩_{1,Q}^{p-1}` over dyadic cubes, `1 < p < ∞`.
pub fn classical_ap(w: &StepFunction, p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidExponent(format!("A_p needs 1 < p < ∞, got {p}")));
    }
    let g = Grid::standard(w.level());
    let dual = w.powf(-1.0 / (p - 1.0))?;
    let a = cube_means(&g, w.values(), None, Recip::ONE);
    let b = cube_means(&g, dual.values(), None, Recip::ONE);
    Ok(CubeTable::zip_map(&[&a, &b], |v| v[0] * v[1].powf(p - 1.0))?.argmax().1)
}

/// `w_j^{1/alpha}`; pairs with rescaling the setup by `alpha`.
pub fn rescale_weights(w: &[Weight], alpha: f64) -> Result<Vec<Weight>> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Invalid(format!("rescale factor {alpha}")));
    }
    w.iter().map(|x| x.pow(1.0 / alpha)).collect()
}

/// The optimal `c` in `(∏ ⟨v_j⟩_{1,Q}^{1/r_j}) |Q| ≤ c ∏ v_j(Q)^{1/p_j}` over dyadic cubes,
/// with `v_j = w_j^{-1/(1/r_j - 1/p_j)}`.
pub fn wconst_char(w: &[Weight], sym: &SymmetricTuple) -> Result<WeightConstant> {
    check_symmetric(w, sym, true)?;
    let level = w[0].level();
    let grid = Grid::standard(level);
    let n = grid.cells() as f64;
    let mut tables = Vec::with_capacity(w.len());
    for (wj, (r, p)) in w.iter().zip(sym.r.iter().zip(&sym.p)) {
        let v = wj.pow(-1.0 / (r.get() - p.get()))?;
        tables.push(v.means(&grid, Recip::ONE)?);
    }
    let mut best = WeightConstant { value: f64::NEG_INFINITY, cube: grid.root() };
    for q in grid.cubes(level) {
        let size = grid.cell_range(&q).len() as f64 / n;
        let mut lhs = size;
        let mut rhs = 1.0;
        for (t, (r, p)) in tables.iter().zip(sym.r.iter().zip(&sym.p)) {
            let avg = t.get(&q);
            lhs *= avg.powf(r.get());
            rhs *= (avg * size).powf(p.get());
        }
        let c = lhs / rhs;
        if c > best.value {
            best = WeightConstant { value: c, cube: q };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::recips;

    fn step(v: &[f64]) -> Weight {
        let l = v.len().trailing_zeros();
        Weight::step(StepFunction::new(l, v.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn two_cell_example() {
        let w = [step(&[1.0, 2.0])];
        let s = ScaleSetup::new(recips(&[1.0]).unwrap(), Recip::INF, recips(&[0.5]).unwrap()).unwrap();
        let c = weight_constant(&w, &s, Family::Dyadic).unwrap();
        assert!((c.value - 1.25).abs() < 1e-15);
        assert_eq!(c.cube.level, 0);
        let sf = w[0].as_step().unwrap();
        assert!((classical_ap(&sf.powf(2.0).unwrap(), 2.0).unwrap().sqrt() - 1.25).abs() < 1e-15);
    }

    #[test]
    fn unit_weights() {
        let w = [step(&[1.0; 8]), step(&[1.0; 8])];
        let s = ScaleSetup::new(recips(&[1.0, 0.5]).unwrap(), Recip::new(0.2).unwrap(), recips(&[0.3, 0.25]).unwrap())
            .unwrap();
        assert!((weight_constant(&w, &s, Family::ThreeGrid).unwrap().value - 1.0).abs() < 1e-14);
        let (ext, sym) = extend_symmetric(&w, &s).unwrap();
        assert!((symmetric_constant(&ext, &sym, Family::Dyadic).unwrap().value - 1.0).abs() < 1e-14);
        assert!((wconst_char(&ext, &sym).unwrap().value - 1.0).abs() < 1e-14);
        assert_eq!(classical_a1(&StepFunction::constant(3, 2.0).unwrap()), 1.0);
    }

    #[test]
    fn rescale_needed() {
        let w = [step(&[1.0; 4]), step(&[1.0; 4])];
        let s = ScaleSetup::new(recips(&[1.0, 1.0]).unwrap(), Recip::INF, recips(&[0.75, 0.75]).unwrap()).unwrap();
        assert_eq!(extend_symmetric(&w, &s).unwrap_err(), Error::UseRescaleFirst);
    }
}
