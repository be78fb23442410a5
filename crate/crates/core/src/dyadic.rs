//! Dyadic cubes on `[0,1)` at a fixed resolution, three shifted grids, and
//! cell-constant functions.
//!
//! Resolution `L` splits `[0,1)` into `N = 2^L` cells. A grid with id `g`
//! places the level-`k` cube `i` on the cells
//! `[i·2^{L-k} + σ_k, (i+1)·2^{L-k} + σ_k)` clipped to `[0, N)`, where
//! `σ_k = (-1)^k · round(g·2^{L-k}/3)`. Grid 0 is the standard grid; grids 1
//! and 2 are the `±1/3` translates, rounded to the cell lattice.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::Recip;

/// Largest supported resolution.
pub const MAX_LEVEL: u32 = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicCube {
    pub grid: u8,
    pub level: u32,
    pub index: i64,
}

/// Which cubes a supremum ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Dyadic,
    ThreeGrid,
}

impl Family {
    pub fn grids(self, level: u32) -> Vec<Grid> {
        let ids: &[u8] = match self {
            Family::Dyadic => &[0],
            Family::ThreeGrid => &[0, 1, 2],
        };
        ids.iter().map(|&g| Grid { id: g, level }).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid {
    id: u8,
    level: u32,
}

fn div_floor(a: i64, b: i64) -> i64 {
    a.div_euclid(b)
}

impl Grid {
    pub fn new(id: u8, level: u32) -> Result<Self> {
        if id > 2 || level > MAX_LEVEL {
            return Err(Error::Invalid(format!("grid {id} at level {level}")));
        }
        Ok(Grid { id, level })
    }

    pub fn standard(level: u32) -> Self {
        Grid { id: 0, level }
    }

    pub fn id(&self) -> u8 {
        self.id
    }

    /// Resolution `L`.
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn cells(&self) -> usize {
        1 << self.level
    }

    /// Side length in cells at level `k`.
    pub fn side(&self, k: u32) -> i64 {
        1 << (self.level - k)
    }

    fn shift(&self, k: u32) -> i64 {
        let x = self.id as i64 * self.side(k);
        let r = (x + 1) / 3;
        if k % 2 == 0 {
            r
        } else {
            -r
        }
    }

    fn index_min(&self, k: u32) -> i64 {
        div_floor(-self.shift(k), self.side(k))
    }

    fn index_max(&self, k: u32) -> i64 {
        div_floor(self.cells() as i64 - 1 - self.shift(k), self.side(k))
    }

    /// Number of cubes meeting `[0,1)` at level `k`.
    pub fn count(&self, k: u32) -> usize {
        (self.index_max(k) - self.index_min(k) + 1) as usize
    }

    pub fn cube(&self, k: u32, index: i64) -> Result<DyadicCube> {
        if k > self.level || index < self.index_min(k) || index > self.index_max(k) {
            return Err(Error::Invalid(format!("cube ({k},{index}) outside grid {}", self.id)));
        }
        Ok(DyadicCube { grid: self.id, level: k, index })
    }

    pub fn root(&self) -> DyadicCube {
        DyadicCube { grid: self.id, level: 0, index: self.index_min(0) }
    }

    /// The level-`k` cube containing `cell`.
    pub fn cube_of_cell(&self, k: u32, cell: usize) -> DyadicCube {
        DyadicCube { grid: self.id, level: k, index: div_floor(cell as i64 - self.shift(k), self.side(k)) }
    }

    /// Cell range before clipping (may reach outside `[0, N)`).
    pub fn unclipped(&self, q: &DyadicCube) -> (i64, i64) {
        let a = self.side(q.level);
        let start = q.index * a + self.shift(q.level);
        (start, start + a)
    }

    /// Cells of `q` inside the ambient range.
    pub fn cell_range(&self, q: &DyadicCube) -> Range<usize> {
        let (a, b) = self.unclipped(q);
        let n = self.cells() as i64;
        (a.max(0) as usize)..(b.min(n) as usize)
    }

    pub fn is_clipped(&self, q: &DyadicCube) -> bool {
        let (a, b) = self.unclipped(q);
        a < 0 || b > self.cells() as i64
    }

    /// Position of `q` within its level's arrays.
    pub fn slot(&self, q: &DyadicCube) -> usize {
        (q.index - self.index_min(q.level)) as usize
    }

    pub fn parent(&self, q: &DyadicCube) -> Result<DyadicCube> {
        if q.level == 0 {
            return Err(Error::NoAncestor);
        }
        let (start, _) = self.unclipped(q);
        let k = q.level - 1;
        Ok(DyadicCube { grid: self.id, level: k, index: div_floor(start - self.shift(k), self.side(k)) })
    }

    /// The two children, possibly one of them entirely outside the ambient range.
    pub fn children(&self, q: &DyadicCube) -> Result<(DyadicCube, DyadicCube)> {
        if q.level >= self.level {
            return Err(Error::NoChildren);
        }
        let (start, _) = self.unclipped(q);
        let k = q.level + 1;
        let first = div_floor(start - self.shift(k), self.side(k));
        let c = |i| DyadicCube { grid: self.id, level: k, index: i };
        Ok((c(first), c(first + 1)))
    }

    /// All cubes up to `max_level`, coarse to fine, by index.
    pub fn cubes(&self, max_level: u32) -> impl Iterator<Item = DyadicCube> + '_ {
        (0..=max_level.min(self.level)).flat_map(move |k| {
            (self.index_min(k)..=self.index_max(k)).map(move |i| DyadicCube { grid: self.id, level: k, index: i })
        })
    }

    /// Parent slot of each slot at level `k + 1`.
    fn parent_slots(&self, k: u32) -> Vec<usize> {
        let lo = self.index_min(k + 1);
        (0..self.count(k + 1))
            .map(|s| {
                let q = DyadicCube { grid: self.id, level: k + 1, index: lo + s as i64 };
                self.slot(&self.parent(&q).expect("level ≥ 1"))
            })
            .collect()
    }
}

/// One value per cube of a grid, stored level by level.
#[derive(Clone, Debug, PartialEq)]
pub struct CubeTable {
    grid: Grid,
    levels: Vec<Vec<f64>>,
}

impl CubeTable {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn get(&self, q: &DyadicCube) -> f64 {
        self.levels[q.level as usize][self.grid.slot(q)]
    }

    pub fn level(&self, k: u32) -> &[f64] {
        &self.levels[k as usize]
    }

    /// `(cube, value)` in enumeration order.
    pub fn iter(&self) -> impl Iterator<Item = (DyadicCube, f64)> + '_ {
        self.grid.cubes(self.grid.level).map(move |q| (q, self.get(&q)))
    }

    /// Combine tables over the same grid cube by cube.
    pub fn zip_map(tables: &[&CubeTable], f: impl Fn(&[f64]) -> f64) -> Result<CubeTable> {
        let first = tables.first().ok_or_else(|| Error::Invalid("no tables".into()))?;
        if tables.iter().any(|t| t.grid != first.grid) {
            return Err(Error::Invalid("tables over different grids".into()));
        }
        let mut buf = vec![0.0; tables.len()];
        let levels = (0..first.levels.len())
            .map(|k| {
                (0..first.levels[k].len())
                    .map(|s| {
                        for (b, t) in buf.iter_mut().zip(tables) {
                            *b = t.levels[k][s];
                        }
                        f(&buf)
                    })
                    .collect()
            })
            .collect();
        Ok(CubeTable { grid: first.grid, levels })
    }

    /// Build directly from a per-cube function.
    pub fn from_fn(grid: &Grid, mut f: impl FnMut(&DyadicCube) -> Result<f64>) -> Result<CubeTable> {
        let mut levels = Vec::with_capacity(grid.level as usize + 1);
        for k in 0..=grid.level {
            let lo = grid.index_min(k);
            let row = (0..grid.count(k))
                .map(|s| f(&DyadicCube { grid: grid.id, level: k, index: lo + s as i64 }))
                .collect::<Result<Vec<_>>>()?;
            levels.push(row);
        }
        Ok(CubeTable { grid: *grid, levels })
    }

    /// Largest value and the first cube attaining it in enumeration order.
    pub fn argmax(&self) -> (DyadicCube, f64) {
        let mut best = (self.grid.root(), f64::NEG_INFINITY);
        for (q, v) in self.iter() {
            if v > best.1 {
                best = (q, v);
            }
        }
        best
    }

    /// For each cell, the largest value over cubes containing it.
    pub fn per_cell_sup(&self) -> Vec<f64> {
        let g = &self.grid;
        let mut run = self.levels[0].clone();
        for k in 0..g.level {
            let parents = g.parent_slots(k);
            run = self.levels[k as usize + 1]
                .iter()
                .zip(&parents)
                .map(|(&v, &ps)| v.max(run[ps]))
                .collect();
        }
        // Finest cubes are single cells with slot equal to the cell index.
        run
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Bottom-up reduction of per-cell values over every cube.
fn reduce(grid: &Grid, leaves: Vec<f64>, op: impl Fn(f64, f64) -> f64, identity: f64) -> Vec<Vec<f64>> {
    let l = grid.level as usize;
    let mut levels = vec![Vec::new(); l + 1];
    levels[l] = leaves;
    for k in (0..grid.level).rev() {
        let parents = grid.parent_slots(k);
        let mut row = vec![identity; grid.count(k)];
        for (&v, &ps) in levels[k as usize + 1].iter().zip(&parents) {
            row[ps] = op(row[ps], v);
        }
        levels[k as usize] = row;
    }
    levels
}

/// Weighted power means `(Σ_Q h^t u / Σ_Q u)^{1/t}` over every cube, `1/t = rho`.
///
/// `rho = 0` gives the maximum of `h` over cells. `u = None` is Lebesgue
/// measure and runs the same arithmetic as `u ≡ 1`.
pub fn cube_means(grid: &Grid, h: &[f64], u: Option<&[f64]>, rho: Recip) -> CubeTable {
    let n = grid.cells();
    assert_eq!(h.len(), n, "function level differs from grid level");
    if rho.is_inf() {
        let levels = reduce(grid, h.to_vec(), f64::max, f64::NEG_INFINITY);
        return CubeTable { grid: *grid, levels };
    }
    let t = rho.get();
    let lu: Vec<f64> = match u {
        Some(u) => u.iter().map(|x| x.ln()).collect(),
        None => vec![0.0; n],
    };
    let lh: Vec<f64> = h.iter().zip(&lu).map(|(x, l)| l + x.ln() / t).collect();
    let num = reduce(grid, lh, log_add, f64::NEG_INFINITY);
    let den = reduce(grid, lu, log_add, f64::NEG_INFINITY);
    let levels = num
        .iter()
        .zip(&den)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (t * (x - y)).exp()).collect())
        .collect();
    CubeTable { grid: *grid, levels }
}

/// Per-cube maximum (`max = true`) or minimum of cell values.
pub fn cube_extrema(grid: &Grid, v: &[f64], max: bool) -> CubeTable {
    let levels = if max {
        reduce(grid, v.to_vec(), f64::max, f64::NEG_INFINITY)
    } else {
        reduce(grid, v.to_vec(), f64::min, f64::INFINITY)
    };
    CubeTable { grid: *grid, levels }
}

/// A nonnegative cell-constant function at resolution `L`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepFunction {
    level: u32,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(level: u32, values: Vec<f64>) -> Result<Self> {
        if level > MAX_LEVEL || values.len() != 1 << level {
            return Err(Error::Invalid(format!("{} values at level {level}", values.len())));
        }
        if let Some(c) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Invalid(format!("cell {c} holds {}", values[c])));
        }
        Ok(StepFunction { level, values })
    }

    pub fn constant(level: u32, c: f64) -> Result<Self> {
        StepFunction::new(level, vec![c; 1 << level])
    }

    pub fn from_fn(level: u32, f: impl Fn(usize) -> f64) -> Result<Self> {
        StepFunction::new(level, (0..1usize << level).map(f).collect())
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_positive(&self) -> bool {
        self.values.iter().all(|&v| v > 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<StepFunction> {
        StepFunction::new(self.level, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &StepFunction, f: impl Fn(f64, f64) -> f64) -> Result<StepFunction> {
        if other.level != self.level {
            return Err(Error::LevelMismatch(self.level, other.level));
        }
        StepFunction::new(self.level, self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn powf(&self, e: f64) -> Result<StepFunction> {
        self.map(|v| if e == 0.0 { 1.0 } else { v.powf(e) })
    }

    pub fn mul(&self, other: &StepFunction) -> Result<StepFunction> {
        self.zip_with(other, |a, b| a * b)
    }

    /// `⟨f⟩_{t,I}` over a cell range by direct summation, `1/t = rho`.
    pub fn average(&self, rho: Recip, cells: Range<usize>) -> f64 {
        let vals = &self.values[cells];
        if rho.is_inf() {
            return vals.iter().copied().fold(0.0, f64::max);
        }
        power_mean(vals, rho.get())
    }

    /// `⟨f⟩_{t,Q}` for a cube.
    pub fn cube_average(&self, rho: Recip, grid: &Grid, q: &DyadicCube) -> Result<f64> {
        if grid.level() != self.level {
            return Err(Error::LevelMismatch(grid.level(), self.level));
        }
        Ok(self.average(rho, grid.cell_range(q)))
    }

    pub fn prefix_sums(&self, rho: Recip) -> Result<PrefixSums> {
        PrefixSums::new(self, rho)
    }

    /// `‖f·w‖_{L^t}` on `[0,1)`, `1/t = rho`.
    pub fn norm(&self, rho: Recip, weight: Option<&StepFunction>) -> Result<f64> {
        match weight {
            Some(w) => Ok(lp_norm(self.mul(w)?.values(), rho)),
            None => Ok(lp_norm(&self.values, rho)),
        }
    }
}

/// `((1/n) Σ v^{1/rho})^{rho}`, scaled to avoid overflow.
fn power_mean(vals: &[f64], rho: f64) -> f64 {
    let top = vals.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return 0.0;
    }
    let t = 1.0 / rho;
    let s: f64 = vals.iter().map(|v| (v / top).powf(t)).sum();
    top * (s / vals.len() as f64).powf(rho)
}

/// `L^t([0,1))` norm of cell values, `1/t = rho`; `rho = 0` is the maximum.
pub fn lp_norm(values: &[f64], rho: Recip) -> f64 {
    if rho.is_inf() {
        values.iter().copied().fold(0.0, f64::max)
    } else {
        power_mean(values, rho.get())
    }
}

/// `L^{t,∞}` quasinorm `sup_λ λ μ{g > λ}^{1/t}` with `μ` given by cell masses `u`
/// (Lebesgue when `None`).
///
/// The supremum is the left limit at one of the values, `max_v v·μ{g ≥ v}^{1/t}`.
pub fn weak_norm(values: &[f64], u: Option<&[f64]>, rho: Recip) -> f64 {
    let n = values.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).expect("finite values"));
    let mass = |c: usize| u.map_or(1.0 / n as f64, |u| u[c]);
    if rho.is_inf() {
        return lp_norm(values, rho);
    }
    let mut best = 0.0f64;
    let mut acc = 0.0;
    let mut i = 0;
    while i < n {
        let v = values[idx[i]];
        while i < n && values[idx[i]] == v {
            acc += mass(idx[i]);
            i += 1;
        }
        best = best.max(v * acc.powf(rho.get()));
    }
    best
}

/// Prefix sums of `f^{1/rho}` for interval averages.
#[derive(Clone, Debug)]
pub struct PrefixSums {
    rho: f64,
    sums: Vec<f64>,
}

impl PrefixSums {
    pub fn new(f: &StepFunction, rho: Recip) -> Result<Self> {
        if rho.is_inf() {
            return Err(Error::Invalid("prefix sums need a finite exponent".into()));
        }
        let t = 1.0 / rho.get();
        let mut sums = Vec::with_capacity(f.len() + 1);
        let mut acc = 0.0;
        sums.push(acc);
        for v in f.values() {
            acc += v.powf(t);
            sums.push(acc);
        }
        Ok(PrefixSums { rho: rho.get(), sums })
    }

    pub fn average(&self, cells: Range<usize>) -> f64 {
        let n = (cells.end - cells.start) as f64;
        ((self.sums[cells.end] - self.sums[cells.start]) / n).max(0.0).powf(self.rho)
    }
}

/// A covering cube from one of the three grids.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cover {
    pub cube: DyadicCube,
    /// Side length in cells.
    pub length: usize,
    /// `|Q| / |I|`.
    pub ratio: f64,
    pub clipped: bool,
}

/// Smallest cube among the three grids containing the cells `[start, end)`.
///
/// Ties go to the lowest grid id. Fails when no cube within ratio 6 exists,
/// which can only happen for intervals touching the boundary of `[0,1)`.
pub fn three_grid_cover(level: u32, start: usize, end: usize) -> Result<Cover> {
    let n = 1usize << level;
    if start >= end || end > n {
        return Err(Error::OutsideAmbient);
    }
    let mut best: Option<Cover> = None;
    for grid in Family::ThreeGrid.grids(level) {
        for k in (0..=level).rev() {
            let q = grid.cube_of_cell(k, start);
            let (_, b) = grid.unclipped(&q);
            if b >= end as i64 {
                let length = grid.side(k) as usize;
                if best.map_or(true, |c| length < c.length) {
                    best = Some(Cover {
                        cube: q,
                        length,
                        ratio: length as f64 / (end - start) as f64,
                        clipped: grid.is_clipped(&q),
                    });
                }
                break;
            }
        }
    }
    let cover = best.expect("the grid-0 root contains every interval");
    if cover.ratio > 6.0 {
        return Err(Error::OutsideAmbient);
    }
    Ok(cover)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_and_relations() {
        let g = Grid::standard(2);
        assert_eq!(g.cubes(2).count(), 7);
        let root = g.root();
        let (a, b) = g.children(&root).unwrap();
        assert_eq!((a.level, a.index, b.index), (1, 0, 1));
        assert_eq!(g.parent(&root), Err(Error::NoAncestor));
        for l in 1..=8 {
            for id in 0..3 {
                let g = Grid::new(id, l).unwrap();
                for q in g.cubes(l - 1) {
                    let (c0, c1) = g.children(&q).unwrap();
                    assert_eq!(g.parent(&c0).unwrap(), q);
                    assert_eq!(g.parent(&c1).unwrap(), q);
                    // Children tile the parent.
                    let (s, e) = g.unclipped(&q);
                    assert_eq!(g.unclipped(&c0).0, s);
                    assert_eq!(g.unclipped(&c1).1, e);
                    assert_eq!(g.unclipped(&c0).1, g.unclipped(&c1).0);
                }
                // Each level covers every cell exactly once.
                for k in 0..=l {
                    let mut hit = vec![0; g.cells()];
                    for i in g.index_min(k)..=g.index_max(k) {
                        for c in g.cell_range(&g.cube(k, i).unwrap()) {
                            hit[c] += 1;
                        }
                    }
                    assert!(hit.iter().all(|&h| h == 1));
                }
            }
        }
    }

    #[test]
    fn finest_level_is_cellwise() {
        for id in 0..3 {
            let g = Grid::new(id, 6).unwrap();
            for c in 0..g.cells() {
                let q = g.cube_of_cell(6, c);
                assert_eq!(g.slot(&q), c);
                assert_eq!(g.cell_range(&q), c..c + 1);
            }
        }
    }

    #[test]
    fn average_examples() {
        let f = StepFunction::new(1, vec![1.0, 0.0]).unwrap();
        let g = Grid::standard(1);
        assert_eq!(f.cube_average(Recip::ONE, &g, &g.root()).unwrap(), 0.5);
        let c = StepFunction::constant(3, 2.5).unwrap();
        for rho in [0.0, 0.3, 1.0, 2.0] {
            let r = Recip::new(rho).unwrap();
            assert!((c.average(r, 0..8) - 2.5).abs() < 1e-15);
            let t = cube_means(&Grid::standard(3), c.values(), None, r);
            assert!(t.iter().all(|(_, v)| (v - 2.5).abs() < 1e-14));
        }
    }

    #[test]
    fn cover_of_dyadic_interval_is_itself() {
        let c = three_grid_cover(4, 4, 8).unwrap();
        assert_eq!((c.cube.grid, c.length, c.ratio), (0, 4, 1.0));
        let c = three_grid_cover(3, 3, 5).unwrap();
        assert!(c.ratio <= 6.0);
        assert_eq!(three_grid_cover(3, 2, 9), Err(Error::OutsideAmbient));
    }

    #[test]
    fn weak_norm_left_limit() {
        // g = (2, 1): sup λ|{g>λ}| = max(2·1/2, 1·1) = 1.
        assert_eq!(weak_norm(&[2.0, 1.0], None, Recip::ONE), 1.0);
        assert_eq!(weak_norm(&[4.0, 1.0], None, Recip::ONE), 2.0);
    }
}
