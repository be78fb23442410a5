//! Command-line front end.
//!
//! Flags are applied on top of `--config`, in the same `key = value` vocabulary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use extrapolab_core::dyadic::{Family, StepFunction};
use extrapolab_core::exponent::sum;
use extrapolab_core::maximal::maximal;
use extrapolab_core::rdf::{build_weights, constant_transfer, DEFAULT_TERMS};
use extrapolab_core::sample::{random_function, random_symmetric_weights, random_weight};
use extrapolab_core::sparse::cz_sparse;
use extrapolab_core::weights::{weight_constant, Weight};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::Config;
use crate::criteria::{sweep, FIT_POINTS};
use crate::error::{LabError, LabResult};
use crate::report::{all_pass, to_jsonl, Assertion};
use crate::suites::run_suite;
use crate::table::{provenance, sparse_to_csv, StepTable};

#[derive(Debug, Parser)]
#[command(name = "extrapolab", version, about = "Weighted dyadic experiments: constants, maximal functions, sparse forms and extrapolation")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// `key = value` file; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Grid level L (2^L cells), 4..=20.
    #[arg(long, global = true)]
    pub level: Option<String>,
    #[arg(long, global = true)]
    pub m: Option<String>,
    /// Comma-separated exponents; `inf` allowed.
    #[arg(long, global = true)]
    pub r: Option<String>,
    #[arg(long, global = true)]
    pub s: Option<String>,
    #[arg(long, global = true)]
    pub p: Option<String>,
    #[arg(long, global = true)]
    pub q: Option<String>,
    /// Comma-separated values in (0,1).
    #[arg(long, global = true)]
    pub eps: Option<String>,
    #[arg(long, global = true)]
    pub trials: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<String>,
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// `dyadic` or `three-grid`.
    #[arg(long, global = true)]
    pub family: Option<String>,
    /// CSV of input functions (`cell,f1,…`); random when absent.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// CSV of weights (`cell,w1,…`); random when absent.
    #[arg(long, global = true)]
    pub weights: Option<PathBuf>,
    /// Where `extrapolate` writes its JSON-lines report; stderr when absent.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weight constant of a tuple at (r, s, p).
    Wconst,
    /// Multisublinear dyadic maximal function of the input.
    Maximal,
    /// Stopping-time sparse collection of the input.
    Sparse,
    /// Extrapolated weights from p to q (symmetric (m+1)-tuples).
    Extrapolate,
    /// Power-weight sweep over eps.
    Sweep,
    /// Run a check suite and report JSON lines; exit status 1 if any check fails.
    Verify {
        /// exponents, weights, maximal, sparse, rdf, pipeline or all.
        suite: String,
    },
}

fn read(path: &Path) -> LabResult<String> {
    fs::read_to_string(path).map_err(|e| LabError::io(path, e))
}

impl Common {
    pub fn config(&self) -> LabResult<Config> {
        let mut cfg = Config::default();
        if let Some(path) = &self.config {
            cfg.apply_text(&read(path)?, &path.display().to_string())?;
        }
        let flags = [
            ("level", &self.level),
            ("m", &self.m),
            ("r", &self.r),
            ("s", &self.s),
            ("p", &self.p),
            ("q", &self.q),
            ("eps", &self.eps),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("out", &self.out),
            ("family", &self.family),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v).map_err(|e| LabError::Usage(format!("--{key}: {e}")))?;
            }
        }
        Ok(cfg)
    }
}

fn table(path: &Option<PathBuf>) -> LabResult<Option<StepTable>> {
    match path {
        Some(p) => Ok(Some(StepTable::from_csv(&read(p)?, &p.display().to_string())?)),
        None => Ok(None),
    }
}

fn width(t: &StepTable, want: usize, what: &str) -> LabResult<()> {
    if t.columns.len() != want {
        return Err(LabError::Usage(format!("{what} has {} columns, expected {want}", t.columns.len())));
    }
    Ok(())
}

/// Input functions from `--input`, or `count` random ones at the config level.
fn functions(common: &Common, cfg: &Config, count: usize, rng: &mut ChaCha8Rng) -> LabResult<Vec<StepFunction>> {
    match table(&common.input)? {
        Some(t) => {
            width(&t, count, "input")?;
            Ok(t.columns)
        }
        None => Ok((0..count).map(|_| random_function(cfg.level(), rng)).collect::<Result<_, _>>()?),
    }
}

fn family_name(f: Family) -> &'static str {
    match f {
        Family::Dyadic => "dyadic",
        Family::ThreeGrid => "three-grid",
    }
}

fn emit(cfg: &Config, text: &str) -> LabResult<()> {
    match &cfg.out {
        Some(path) => fs::write(path, text).map_err(|e| LabError::io(path, e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| LabError::io("<stdout>", e))
        }
    }
}

/// Runs a parsed command. `Ok(false)` means a check failed.
pub fn run(cli: &Cli) -> LabResult<bool> {
    let common = &cli.common;
    let cfg = common.config()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    match &cli.command {
        Command::Wconst => {
            let setup = cfg.setup(false)?;
            let w = match table(&common.weights)? {
                Some(t) => {
                    width(&t, setup.m(), "weights")?;
                    t.columns
                }
                None => (0..setup.m()).map(|_| random_weight(cfg.level(), 0.4, &mut rng)).collect::<Result<_, _>>()?,
            };
            let level = w[0].level();
            let w = w.into_iter().map(Weight::step).collect::<Result<Vec<_>, _>>()?;
            let c = weight_constant(&w, &setup, cfg.family)?;
            let line = json!({"command": "wconst", "family": family_name(cfg.family), "value": c.value, "cube": c.cube});
            emit(&cfg, &format!("{}{line}\n", provenance(cfg.seed, level)))?;
        }
        Command::Maximal => {
            let r = cfg.r()?;
            let f = functions(common, &cfg, r.len(), &mut rng)?;
            let out = maximal(&f, r, cfg.family)?;
            emit(&cfg, &StepTable::new(vec!["M".into()], vec![out.total])?.to_csv(cfg.seed))?;
        }
        Command::Sparse => {
            let r = cfg.r()?;
            let f = functions(common, &cfg, r.len(), &mut rng)?;
            emit(&cfg, &sparse_to_csv(&cz_sparse(r, &f)?.collection, cfg.seed))?;
        }
        Command::Extrapolate => return extrapolate(common, &cfg, &mut rng),
        Command::Sweep => {
            let setup = cfg.setup(true)?;
            let sw = sweep(&setup, &cfg.eps, cfg.level())?;
            let mut text = provenance(cfg.seed, cfg.level());
            text.push_str("eps,weight_constant,maximal_norm,product_norm,ratio\n");
            for p in &sw.points {
                text.push_str(&format!("{},{},{},{},{}\n", p.eps, p.weight_constant, p.maximal_norm, p.product_norm, p.ratio));
            }
            text.push_str(&format!("# fitted_slope={}, theory={}, points={}\n", sw.slope, sw.theory, sw.points.len().min(FIT_POINTS)));
            text.push_str(&format!("# weight_slope={}, theory={}\n", sw.weight_slope, sw.weight_theory));
            emit(&cfg, &text)?;
        }
        Command::Verify { suite } => {
            let groups = run_suite(suite, &cfg)?;
            let mut text = provenance(cfg.seed, cfg.level());
            let mut pass = true;
            for (name, a) in &groups {
                text.push_str(&to_jsonl(name, a));
                pass &= all_pass(a);
            }
            emit(&cfg, &text)?;
            return Ok(pass);
        }
    }
    Ok(true)
}

fn extrapolate(common: &Common, cfg: &Config, rng: &mut ChaCha8Rng) -> LabResult<bool> {
    let (p, q, r) = (cfg.p()?, cfg.q()?, cfg.r()?);
    let m1 = r.len();
    if p.len() != m1 || q.len() != m1 || m1 < 2 {
        return Err(LabError::Usage(format!("p, q and r need the same length m+1 ≥ 2; got {}, {}, {m1}", p.len(), q.len())));
    }
    for (name, t) in [("p", p), ("q", q)] {
        if (sum(t) - 1.0).abs() > 1e-12 {
            return Err(LabError::Usage(format!("reciprocals of {name} must sum to 1, got {}", sum(t))));
        }
    }
    let w = match table(&common.weights)? {
        Some(t) => {
            width(&t, m1, "weights")?;
            t.columns
        }
        None => random_symmetric_weights(cfg.level(), m1 - 1, 0.4, rng)?,
    };
    let f = match table(&common.input)? {
        Some(t) => {
            width(&t, m1, "input")?;
            t.columns
        }
        None => (0..m1).map(|_| random_function(w[0].level(), rng)).collect::<Result<_, _>>()?,
    };
    let out = build_weights(&f, &w, p, q, r, DEFAULT_TERMS)?;
    let ct = constant_transfer(&w, &out.weights, p, q, r)?;
    let m = (m1 - 1) as i32;
    let mut prod: f64 = 0.0;
    for c in 0..out.weights[0].len() {
        prod = prod.max((out.weights.iter().map(|x| x.values()[c]).product::<f64>() - 1.0).abs());
    }
    let mut checks = vec![
        Assertion::at_most("product.abs_err", prod, 1e-10),
        Assertion::at_most("norm_transfer", out.norm_ratio, 2f64.powi(m * m)),
        Assertion::note("constant.before", ct.before),
        Assertion::note("constant.after", ct.after),
        Assertion::note("constant.exponent", ct.exponent),
        Assertion::note("constant.measured_c", ct.measured_c),
    ];
    for (k, s) in out.stages.iter().enumerate() {
        checks.push(Assertion::at_most(format!("stage{}.norm_transfer", k + 1), s.norm_ratio, 2f64.powi(m)));
    }
    let mut report = provenance(cfg.seed, w[0].level());
    report.push_str(&to_jsonl("extrapolate", &checks));
    match &common.report {
        Some(path) => fs::write(path, &report).map_err(|e| LabError::io(path, e))?,
        None => eprint!("{report}"),
    }
    emit(cfg, &StepTable::numbered("w", out.weights)?.to_csv(cfg.seed))?;
    Ok(all_pass(&checks))
}
