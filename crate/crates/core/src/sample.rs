//! Seeded random inputs for the experiments.

use rand::Rng;

use crate::dyadic::{Grid, StepFunction};
use crate::error::Result;

/// A positive weight built as a dyadic multiplicative cascade:
/// every cube multiplies its cells by `exp(sigma·U(-1,1))`.
pub fn random_weight<R: Rng>(level: u32, sigma: f64, rng: &mut R) -> Result<StepFunction> {
    let g = Grid::standard(level);
    let mut v = vec![1.0f64; g.cells()];
    for k in 1..=level {
        let side = g.side(k) as usize;
        for chunk in v.chunks_mut(side) {
            let f = (sigma * rng.gen_range(-1.0..1.0)).exp();
            chunk.iter_mut().for_each(|x| *x *= f);
        }
    }
    StepFunction::new(level, v)
}

/// `m` random weights followed by the reciprocal of their product.
pub fn random_symmetric_weights<R: Rng>(level: u32, m: usize, sigma: f64, rng: &mut R) -> Result<Vec<StepFunction>> {
    let mut w = (0..m).map(|_| random_weight(level, sigma, rng)).collect::<Result<Vec<_>>>()?;
    let n = 1usize << level;
    let last = (0..n).map(|c| 1.0 / w.iter().map(|x| x.values()[c]).product::<f64>()).collect();
    w.push(StepFunction::new(level, last)?);
    Ok(w)
}

/// A nonnegative, not identically zero test function.
///
/// Mixes three shapes: a cascade, a sum of cube indicators, and independent
/// cell values with random zeros.
pub fn random_function<R: Rng>(level: u32, rng: &mut R) -> Result<StepFunction> {
    let n = 1usize << level;
    let f = match rng.gen_range(0..3) {
        0 => random_weight(level, 0.6, rng)?,
        1 => {
            let mut v = vec![0.0; n];
            for _ in 0..rng.gen_range(1..6) {
                let k = rng.gen_range(0..=level);
                let side = n >> k;
                let i = rng.gen_range(0..1usize << k);
                let h = rng.gen_range(0.1..10.0);
                v[i * side..(i + 1) * side].iter_mut().for_each(|x| *x += h);
            }
            StepFunction::new(level, v)?
        }
        _ => {
            let v = (0..n)
                .map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..1.0f64).powi(3) * 5.0 })
                .collect();
            StepFunction::new(level, v)?
        }
    };
    if f.is_zero() {
        return StepFunction::constant(level, 1.0);
    }
    Ok(f)
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn symmetric_product_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let w = random_symmetric_weights(6, 2, 0.5, &mut rng).unwrap();
        for c in 0..64 {
            let p: f64 = w.iter().map(|x| x.values()[c]).product();
            assert!((p - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn slope_of_line() {
        assert!((fit_slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]) - 2.0).abs() < 1e-15);
    }
}
