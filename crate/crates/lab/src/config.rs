//! Flat `key = value` experiment configuration.

use std::path::PathBuf;

use extrapolab_core::dyadic::Family;
use extrapolab_core::exponent::{validate_setup, Recip, ScaleSetup};

use crate::error::{LabError, LabResult};

pub const MIN_LEVEL: u32 = 4;
pub const MAX_LEVEL: u32 = 20;
pub const DEFAULT_LEVEL: u32 = 10;

/// Every key the config file and the flags understand.
pub const KEYS: &[&str] = &["level", "m", "r", "s", "p", "q", "eps", "trials", "seed", "out", "family"];

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    /// `None` until set; see [`Config::level`].
    pub level: Option<u32>,
    pub m: Option<usize>,
    pub r: Option<Vec<Recip>>,
    pub s: Recip,
    pub p: Option<Vec<Recip>>,
    pub q: Option<Vec<Recip>>,
    pub eps: Vec<f64>,
    /// `None` lets each suite use its own default count.
    pub trials: Option<usize>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub family: Family,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            level: None,
            m: None,
            r: None,
            s: Recip::INF,
            p: None,
            q: None,
            eps: (2..=9).map(|k| 0.5f64.powi(k)).collect(),
            trials: None,
            seed: 0,
            out: None,
            family: Family::Dyadic,
        }
    }
}

/// An exponent in natural form: a positive number, `inf` or `∞`.
pub fn parse_exponent(text: &str) -> Result<Recip, String> {
    let t = text.trim();
    if matches!(t, "inf" | "Inf" | "infinity" | "∞") {
        return Ok(Recip::INF);
    }
    let v: f64 = t.parse().map_err(|_| format!("'{t}' is not an exponent"))?;
    Recip::from_exponent(v).map_err(|e| e.to_string())
}

pub fn parse_exponents(text: &str) -> Result<Vec<Recip>, String> {
    let out: Vec<Recip> = text.split(',').map(parse_exponent).collect::<Result<_, _>>()?;
    Ok(out)
}

fn parse_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| format!("'{}' is not a number", x.trim())))
        .collect()
}

impl Config {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let v = value.trim();
        match key {
            "level" => {
                let l: u32 = v.parse().map_err(|_| format!("level '{v}' is not an integer"))?;
                if !(MIN_LEVEL..=MAX_LEVEL).contains(&l) {
                    return Err(format!("level {l} outside [{MIN_LEVEL}, {MAX_LEVEL}]"));
                }
                self.level = Some(l);
            }
            "m" => {
                let m: usize = v.parse().map_err(|_| format!("m '{v}' is not an integer"))?;
                if m == 0 {
                    return Err("m must be at least 1".into());
                }
                self.m = Some(m);
            }
            "r" => self.r = Some(parse_exponents(v)?),
            "s" => self.s = parse_exponent(v)?,
            "p" => self.p = Some(parse_exponents(v)?),
            "q" => self.q = Some(parse_exponents(v)?),
            "eps" => {
                let e = parse_list(v)?;
                if let Some(bad) = e.iter().find(|x| !(**x > 0.0 && **x < 1.0)) {
                    return Err(format!("epsilon {bad} outside (0,1)"));
                }
                self.eps = e;
            }
            "trials" => self.trials = Some(v.parse().map_err(|_| format!("trials '{v}' is not an integer"))?),
            "seed" => self.seed = v.parse().map_err(|_| format!("seed '{v}' is not an integer"))?,
            "out" => self.out = Some(PathBuf::from(v)),
            "family" => {
                self.family = match v {
                    "dyadic" => Family::Dyadic,
                    "three-grid" => Family::ThreeGrid,
                    _ => return Err(format!("family '{v}' is neither dyadic nor three-grid")),
                }
            }
            _ => return Err(format!("unknown key '{key}'")),
        }
        Ok(())
    }

    /// Applies the lines of a config file; errors carry 1-based line numbers.
    pub fn apply_text(&mut self, text: &str, source: &str) -> LabResult<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse = |msg: String| LabError::Parse { file: source.to_string(), line: i + 1, message: msg };
            let (key, value) = line.split_once('=').ok_or_else(|| parse("expected key = value".into()))?;
            self.set(key.trim(), value).map_err(parse)?;
        }
        Ok(())
    }

    /// The grid level, 10 unless set.
    pub fn level(&self) -> u32 {
        self.level.unwrap_or(DEFAULT_LEVEL)
    }

    pub fn m(&self) -> LabResult<usize> {
        let from_r = self.r.as_ref().map(Vec::len);
        match (self.m, from_r) {
            (Some(m), Some(k)) if m != k => Err(LabError::Usage(format!("m = {m} but r has {k} entries"))),
            (Some(m), _) => Ok(m),
            (None, Some(k)) => Ok(k),
            (None, None) => Err(LabError::Usage("set m or r".into())),
        }
    }

    fn need<'a>(&self, v: &'a Option<Vec<Recip>>, key: &str) -> LabResult<&'a Vec<Recip>> {
        v.as_ref().ok_or_else(|| LabError::Usage(format!("missing {key}")))
    }

    pub fn r(&self) -> LabResult<&Vec<Recip>> {
        self.need(&self.r, "r")
    }

    pub fn p(&self) -> LabResult<&Vec<Recip>> {
        self.need(&self.p, "p")
    }

    pub fn q(&self) -> LabResult<&Vec<Recip>> {
        self.need(&self.q, "q")
    }

    /// The admissible setup `(r, s, p)` of length `m`.
    pub fn setup(&self, strict: bool) -> LabResult<ScaleSetup> {
        let m = self.m()?;
        let (r, p) = (self.r()?, self.p()?);
        if p.len() != m {
            return Err(LabError::Usage(format!("p has {} entries, expected {m}", p.len())));
        }
        let setup = ScaleSetup::new(r.clone(), self.s, p.clone())?;
        validate_setup(&setup, strict).map_err(|v| LabError::Usage(format!("inadmissible setup: {v}")))?;
        Ok(setup)
    }
}
