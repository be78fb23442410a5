//! Sparse collections, the stopping-time construction dominating the dyadic
//! maximal operator, and sparse forms.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::dyadic::{CubeTable, DyadicCube, Grid, StepFunction};
use crate::error::{Error, Result};
use crate::exponent::{constant_cpr, sum, Recip, SymmetricTuple};
use crate::maximal::product_table;
use crate::weights::{symmetric_constant, Weight};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SparseEntry {
    pub cube: DyadicCube,
    /// The cells of `E_Q`, ascending.
    pub cells: Vec<usize>,
    /// Stopping level; `None` for collections not produced by a stopping time.
    pub k: Option<i64>,
}

/// Cubes with pairwise disjoint sets `E_Q ⊆ Q` and `|Q| ≤ 2|E_Q|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SparseCollection {
    pub level: u32,
    pub entries: Vec<SparseEntry>,
}

impl SparseCollection {
    pub fn empty(level: u32) -> Self {
        SparseCollection { level, entries: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Checks containment, disjointness and `|Q| ≤ 2|E_Q|` in integer cell counts.
    pub fn validate(&self) -> Result<()> {
        let mut used = vec![false; 1usize << self.level];
        for e in &self.entries {
            let grid = Grid::new(e.cube.grid, self.level)?;
            let range = grid.cell_range(&e.cube);
            if range.len() > 2 * e.cells.len() {
                return Err(Error::Internal(format!("cube {:?} is not half-covered by its set", e.cube)));
            }
            for &c in &e.cells {
                if !range.contains(&c) {
                    return Err(Error::Internal(format!("cell {c} outside {:?}", e.cube)));
                }
                if std::mem::replace(&mut used[c], true) {
                    return Err(Error::Internal(format!("cell {c} claimed twice")));
                }
            }
        }
        Ok(())
    }
}

/// The stopping collection together with its thresholds.
#[derive(Clone, Debug, Serialize)]
pub struct CzSparse {
    pub collection: SparseCollection,
    /// `2^{2/r}` with `1/r = Σ 1/r_j`.
    pub constant: f64,
    /// Thresholds are `scale · 2^{2k/r}`.
    pub scale: f64,
    /// Index of the entry holding the root cube, if any.
    pub root: Option<usize>,
}

impl CzSparse {
    /// `scale · 2^{2k/r}` for this collection's lattice.
    pub fn threshold(&self, k: i64, r: &[Recip]) -> f64 {
        threshold(self.scale, k, sum(r))
    }
}

/// `scale · 2^{2k/r}`.
fn threshold(scale: f64, k: i64, rt: f64) -> f64 {
    scale * (2.0 * k as f64 * rt).exp2()
}

/// Largest `k` with `threshold(k) < x`, for `x > 0`.
fn largest_below(scale: f64, x: f64, rt: f64) -> i64 {
    let mut k = ((x / scale).log2() / (2.0 * rt)).floor() as i64;
    while threshold(scale, k, rt) >= x {
        k -= 1;
    }
    while threshold(scale, k + 1, rt) < x {
        k += 1;
    }
    k
}

/// Stopping cubes of `Ω_k = {M f > 2^{2k/r}}` with `E_Q = Q \ Ω_{k+1}`.
///
/// The root is recorded once, at the largest `k` for which it qualifies. When
/// its product exceeds `2^{1/r}` times that threshold, `Ω_{k+1}` may cover more
/// than half of `[0,1)`; the lattice is then shifted to `x 2^{-1/r} 2^{2k/r}`,
/// `x` the root product, which restores the weak-type bound `|Ω_1| ≤ 1/2`.
pub fn cz_sparse(r: &[Recip], fs: &[StepFunction]) -> Result<CzSparse> {
    let level = fs.first().ok_or_else(|| Error::Invalid("no input functions".into()))?.level();
    let grid = Grid::standard(level);
    let rt = sum(r);
    let constant = (2.0 * rt).exp2();
    let table = product_table(&grid, fs, r)?;
    let m = table.per_cell_sup();
    let root_value = table.get(&grid.root());
    if root_value <= 0.0 {
        return Ok(CzSparse { collection: SparseCollection::empty(level), constant, scale: 1.0, root: None });
    }
    let mut scale = 1.0;
    let k_root = largest_below(scale, root_value, rt);
    let root_cells = m.iter().filter(|&&v| v <= threshold(scale, k_root + 1, rt)).count();
    if 2 * root_cells < m.len() {
        scale = root_value * (-rt).exp2();
    }
    let k_root = largest_below(scale, root_value, rt);
    let top = m.iter().copied().fold(0.0, f64::max);
    let k_max = largest_below(scale, top, rt);
    let mut entries = Vec::new();
    for k in k_root..=k_max {
        let t = threshold(scale, k, rt);
        let next = threshold(scale, k + 1, rt);
        for q in maximal_cubes(&grid, &table, t) {
            if q.level == 0 && k != k_root {
                continue;
            }
            let cells: Vec<usize> = grid.cell_range(&q).filter(|&c| m[c] <= next).collect();
            entries.push(SparseEntry { cube: q, cells, k: Some(k) });
        }
    }
    let root = entries.iter().position(|e| e.cube.level == 0);
    let collection = SparseCollection { level, entries };
    collection.validate()?;
    Ok(CzSparse { collection, constant, scale, root })
}

/// Maximal cubes with value strictly above `t`, coarse to fine.
fn maximal_cubes(grid: &Grid, table: &CubeTable, t: f64) -> Vec<DyadicCube> {
    let mut out = Vec::new();
    let mut stack = vec![grid.root()];
    while let Some(q) = stack.pop() {
        if table.get(&q) > t {
            out.push(q);
        } else if q.level < grid.level() {
            let (a, b) = grid.children(&q).expect("not the finest level");
            stack.push(b);
            stack.push(a);
        }
    }
    out.sort();
    out
}

fn cube_products(collection: &SparseCollection, r: &[Recip], fs: &[StepFunction]) -> Result<Vec<f64>> {
    let grid = Grid::standard(collection.level);
    let table = product_table(&grid, fs, r)?;
    Ok(collection.entries.iter().map(|e| table.get(&e.cube)).collect())
}

/// `A_{r,S} f = Σ_Q ∏ ⟨f_j⟩_{r_j,Q} χ_Q`.
pub fn sparse_operator(r: &[Recip], s: &SparseCollection, fs: &[StepFunction]) -> Result<StepFunction> {
    let grid = Grid::standard(s.level);
    let mut out = vec![0.0; grid.cells()];
    for (e, v) in s.entries.iter().zip(cube_products(s, r, fs)?) {
        for c in grid.cell_range(&e.cube) {
            out[c] += v;
        }
    }
    StepFunction::new(s.level, out)
}

/// `Σ_Q ∏ ⟨f_j⟩_{r_j,Q} χ_{E_Q}`.
pub fn sparse_set_operator(r: &[Recip], s: &SparseCollection, fs: &[StepFunction]) -> Result<StepFunction> {
    let mut out = vec![0.0; 1usize << s.level];
    for (e, v) in s.entries.iter().zip(cube_products(s, r, fs)?) {
        for &c in &e.cells {
            out[c] += v;
        }
    }
    StepFunction::new(s.level, out)
}

/// `Λ_{r,S} f = Σ_Q ∏ ⟨f_j⟩_{r_j,Q} |Q|`.
pub fn sparse_form(r: &[Recip], s: &SparseCollection, fs: &[StepFunction]) -> Result<f64> {
    let grid = Grid::standard(s.level);
    let n = grid.cells() as f64;
    let vals = cube_products(s, r, fs)?;
    Ok(s.entries.iter().zip(vals).map(|(e, v)| v * grid.cell_range(&e.cube).len() as f64 / n).sum())
}

/// A random valid collection: random cubes claim half of their still unclaimed cells.
pub fn random_sparse<R: Rng>(level: u32, attempts: usize, rng: &mut R) -> SparseCollection {
    let grid = Grid::standard(level);
    let mut used = vec![false; grid.cells()];
    let mut entries = Vec::new();
    for _ in 0..attempts {
        let k = rng.gen_range(0..=level);
        let q = grid.cube(k, rng.gen_range(0..1i64 << k)).expect("standard grid index");
        let mut free: Vec<usize> = grid.cell_range(&q).filter(|&c| !used[c]).collect();
        let need = grid.cell_range(&q).len().div_ceil(2);
        if free.len() < need {
            continue;
        }
        free.shuffle(rng);
        let mut cells = free[..need].to_vec();
        cells.sort_unstable();
        cells.iter().for_each(|&c| used[c] = true);
        entries.push(SparseEntry { cube: q, cells, k: None });
    }
    SparseCollection { level, entries }
}

/// Two-sided comparison of `‖M f‖_1` with sparse forms.
#[derive(Clone, Debug, Serialize)]
pub struct LambdaEquiv {
    pub maximal_l1: f64,
    pub lambda_cz: f64,
    pub constant: f64,
    /// Largest `Λ_{S'}` over the random collections.
    pub lambda_random_max: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

/// Checks `‖M f‖_1 ≤ 2^{2/r} Λ_{cz}` and `Λ_{S'} ≤ 2 ‖M f‖_1` for random `S'`.
pub fn lambda_equiv_check<R: Rng>(r: &[Recip], fs: &[StepFunction], random: usize, rng: &mut R) -> Result<LambdaEquiv> {
    let level = fs.first().ok_or_else(|| Error::Invalid("no input functions".into()))?.level();
    let grid = Grid::standard(level);
    let m = product_table(&grid, fs, r)?.per_cell_sup();
    let maximal_l1 = m.iter().sum::<f64>() / m.len() as f64;
    let cz = cz_sparse(r, fs)?;
    let lambda_cz = sparse_form(r, &cz.collection, fs)?;
    let mut lambda_random_max = 0.0f64;
    for _ in 0..random {
        let s = random_sparse(level, 4 * level as usize + 4, rng);
        s.validate()?;
        lambda_random_max = lambda_random_max.max(sparse_form(r, &s, fs)?);
    }
    Ok(LambdaEquiv {
        maximal_l1,
        lambda_cz,
        constant: cz.constant,
        lambda_random_max,
        lower_ok: maximal_l1 <= cz.constant * lambda_cz,
        upper_ok: lambda_random_max <= 2.0 * maximal_l1,
    })
}

/// The weighted sparse bound at a symmetric tuple.
#[derive(Clone, Debug, Serialize)]
pub struct LambdaWeightReport {
    pub constant: f64,
    pub gamma: f64,
    pub cpr: f64,
    pub lambda: f64,
    pub norms: f64,
    /// `Λ / (c_{p,r} [w]^γ ∏ ‖f_j‖)`.
    pub measured_c: f64,
    /// Largest per-cube ratio of `(∏ ⟨v_j⟩^{1/r_j}) |Q|` to `[w]^γ ∏ v_j(E_Q)^{1/p_j}`.
    pub cube_ratio: f64,
    /// The per-cube constant `2^{1 - Σ_j β_j}`, `β_j = 1/r_j - (1/r_j - 1/p_j) γ`.
    pub cube_constant: f64,
}

/// Evaluates both the per-cube inequality between `v_j(E_Q)` and `|Q|` and the global
/// bound `Λ_{r,S}(f) ≤ C c_{p,r} [w]^γ ∏ ‖f_j‖_{L^{p_j}(w_j^{p_j})}`.
pub fn lambda_weight_bound(
    sym: &SymmetricTuple,
    w: &[StepFunction],
    fs: &[StepFunction],
    s: &SparseCollection,
) -> Result<LambdaWeightReport> {
    let level = s.level;
    let n = 1usize << level;
    for c in 0..n {
        if (w.iter().map(|x| x.values()[c]).product::<f64>() - 1.0).abs() > 1e-10 {
            return Err(Error::NotSymmetric);
        }
    }
    let weights = w.iter().map(|x| Weight::step(x.clone())).collect::<Result<Vec<_>>>()?;
    let wc = symmetric_constant(&weights, sym, crate::dyadic::Family::Dyadic)?.value;
    let gamma = sym.gamma();
    let cpr = constant_cpr(&sym.p, &sym.r)?;
    let lambda = sparse_form(&sym.r, s, fs)?;
    let mut norms = 1.0;
    for ((f, wj), p) in fs.iter().zip(w).zip(&sym.p) {
        norms *= f.norm(*p, Some(wj))?;
    }
    let grid = Grid::standard(level);
    let v: Vec<StepFunction> = w
        .iter()
        .zip(sym.r.iter().zip(&sym.p))
        .map(|(wj, (r, p))| wj.powf(-1.0 / (r.get() - p.get())))
        .collect::<Result<_>>()?;
    let beta: f64 = sym.r.iter().zip(&sym.p).map(|(r, p)| r.get() - (r.get() - p.get()) * gamma).sum();
    let mut cube_ratio = 0.0f64;
    for e in &s.entries {
        let range = grid.cell_range(&e.cube);
        let size = range.len() as f64 / n as f64;
        let mut lhs = size;
        let mut rhs = wc.powf(gamma);
        for (vj, (r, p)) in v.iter().zip(sym.r.iter().zip(&sym.p)) {
            lhs *= vj.average(Recip::ONE, range.clone()).powf(r.get());
            let mass: f64 = e.cells.iter().map(|&c| vj.values()[c]).sum::<f64>() / n as f64;
            rhs *= mass.powf(p.get());
        }
        cube_ratio = cube_ratio.max(lhs / rhs);
    }
    Ok(LambdaWeightReport {
        constant: wc,
        gamma,
        cpr,
        lambda,
        norms,
        measured_c: lambda / (cpr * wc.powf(gamma) * norms),
        cube_ratio,
        cube_constant: (1.0 - beta).exp2(),
    })
}
