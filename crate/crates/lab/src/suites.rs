//! Named groups of checks run by `verify`.
//!
//! Sizes and levels default to the acceptance values; `trials` replaces every
//! instance count and an explicit `level` replaces every corpus level.

use extrapolab_core::dyadic::{Family, StepFunction};
use extrapolab_core::exponent::{recips, Recip, ScaleSetup};
use extrapolab_core::weights::{weight_constant, Weight};

use crate::config::Config;
use crate::criteria;
use crate::error::{LabError, LabResult};
use crate::report::Assertion;

pub const SUITES: &[&str] = &["exponents", "weights", "maximal", "sparse", "rdf", "pipeline"];

struct Sizes<'a>(&'a Config);

impl Sizes<'_> {
    fn count(&self, default: usize) -> usize {
        self.0.trials.unwrap_or(default)
    }

    fn level(&self, default: u32) -> u32 {
        self.0.level.unwrap_or(default)
    }

    fn seed(&self, offset: u64) -> u64 {
        self.0.seed.wrapping_add(offset)
    }
}

/// Closed-form constants: `w ≡ 1` gives 1, the two-cell weight `(1, 2)` at `p = 2` gives 5/4.
fn weight_fixtures() -> LabResult<Vec<Assertion>> {
    let mut out = Vec::new();
    let setups = [
        ScaleSetup::new(recips(&[1.0])?, Recip::INF, recips(&[0.5])?)?,
        ScaleSetup::new(recips(&[1.0, 1.0])?, Recip::INF, recips(&[1.0 / 3.0, 1.0 / 6.0])?)?,
        ScaleSetup::new(recips(&[0.5, 0.5])?, Recip::new(0.1)?, recips(&[0.25, 0.25])?)?,
    ];
    let mut worst = 0.0f64;
    for setup in &setups {
        for family in [Family::Dyadic, Family::ThreeGrid] {
            let w = vec![Weight::step(StepFunction::constant(6, 1.0)?)?; setup.m()];
            worst = worst.max((weight_constant(&w, setup, family)?.value - 1.0).abs());
        }
    }
    out.push(Assertion::at_most("fixture.unit_weight.abs_err", worst, 1e-15));
    let w = vec![Weight::step(StepFunction::new(1, vec![1.0, 2.0])?)?];
    let v = weight_constant(&w, &setups[0], Family::Dyadic)?.value;
    out.push(Assertion::at_most("fixture.two_cell.abs_err", (v - 1.25).abs(), 1e-15));
    Ok(out)
}

/// Runs one suite; the result is grouped by check name.
pub fn run_suite(name: &str, cfg: &Config) -> LabResult<Vec<(String, Vec<Assertion>)>> {
    let z = Sizes(cfg);
    let named = |n: &str, a: LabResult<Vec<Assertion>>| a.map(|a| (n.to_string(), a));
    Ok(match name {
        "exponents" => vec![
            named("gamma_product", criteria::gamma_product(z.count(1000), z.seed(3)))?,
            named("exponent_grid", criteria::exponent_grid())?,
        ],
        "weights" => vec![
            named("fixtures", weight_fixtures())?,
            named("structural_identities", criteria::structural_identities(z.count(200), z.level(8), z.seed(9)))?,
        ],
        "maximal" => vec![
            named("weak_type_equality", criteria::weak_type_equality(z.count(50), z.level(10), z.seed(2)))?,
            named("sharpness_sweep", criteria::sharpness_sweep(z.level(14).max(12)))?,
        ],
        "sparse" => vec![
            named("sparse_construction", criteria::sparse_construction(z.count(100), z.level(10), z.seed(5)))?,
            named("sparse_forms", criteria::sparse_forms(z.count(100), z.level(10), z.seed(6)))?,
        ],
        "rdf" => vec![
            named("rdf_properties", criteria::rdf_properties(z.count(100), z.level(8), z.seed(7)))?,
            named("weight_construction", criteria::weight_construction(z.count(100), z.level(8), 12, z.seed(8)))?,
        ],
        "pipeline" => vec![named("pipeline", criteria::pipeline(z.count(10), z.level(8), 32, z.seed(7)))?],
        "all" => {
            let mut out = Vec::new();
            for s in SUITES {
                out.extend(run_suite(s, cfg)?);
            }
            out
        }
        other => {
            return Err(LabError::Usage(format!("unknown suite '{other}'; expected one of {} or all", SUITES.join(", "))))
        }
    })
}
