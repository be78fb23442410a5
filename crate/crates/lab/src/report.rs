//! Assertions and their JSON-lines form.

use serde::Serialize;

/// One checked inequality. `margin ≥ 0` exactly when it passes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assertion {
    pub id: String,
    pub measured: f64,
    pub bound: f64,
    pub margin: f64,
    pub pass: bool,
}

impl Assertion {
    /// `measured ≤ bound`.
    pub fn at_most(id: impl Into<String>, measured: f64, bound: f64) -> Self {
        let margin = bound - measured;
        Assertion { id: id.into(), measured, bound, margin, pass: measured <= bound }
    }

    /// `measured ≥ bound`.
    pub fn at_least(id: impl Into<String>, measured: f64, bound: f64) -> Self {
        let margin = measured - bound;
        Assertion { id: id.into(), measured, bound, margin, pass: measured >= bound }
    }

    /// `measured < bound`.
    pub fn below(id: impl Into<String>, measured: f64, bound: f64) -> Self {
        let margin = bound - measured;
        Assertion { id: id.into(), measured, bound, margin, pass: measured < bound }
    }

    /// A value reported for the record; always passes.
    pub fn note(id: impl Into<String>, measured: f64) -> Self {
        Assertion { id: id.into(), measured, bound: f64::NAN, margin: f64::NAN, pass: true }
    }
}

#[derive(Serialize)]
struct Line<'a> {
    suite: &'a str,
    id: &'a str,
    measured: Option<f64>,
    bound: Option<f64>,
    margin: Option<f64>,
    pass: bool,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// One JSON object per assertion; non-finite numbers become `null`.
pub fn to_jsonl(suite: &str, assertions: &[Assertion]) -> String {
    let mut out = String::new();
    for a in assertions {
        let line = Line {
            suite,
            id: &a.id,
            measured: finite(a.measured),
            bound: finite(a.bound),
            margin: finite(a.margin),
            pass: a.pass,
        };
        out.push_str(&serde_json::to_string(&line).expect("plain struct serializes"));
        out.push('\n');
    }
    out
}

pub fn all_pass(assertions: &[Assertion]) -> bool {
    assertions.iter().all(|a| a.pass)
}

/// Largest value, `-∞` for an empty input; NaN propagates so it cannot pass silently.
pub fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::NEG_INFINITY, |a, b| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_fails_both_directions() {
        assert!(!Assertion::at_most("x", f64::NAN, 1.0).pass);
        assert!(!Assertion::at_least("x", f64::NAN, 1.0).pass);
        assert!(worst([1.0, f64::NAN, 2.0]).is_nan());
    }

    #[test]
    fn jsonl_shape() {
        let s = to_jsonl("demo", &[Assertion::at_most("a", 1.0, 2.0), Assertion::note("c", 3.0)]);
        assert_eq!(
            s,
            "{\"suite\":\"demo\",\"id\":\"a\",\"measured\":1.0,\"bound\":2.0,\"margin\":1.0,\"pass\":true}\n\
             {\"suite\":\"demo\",\"id\":\"c\",\"measured\":3.0,\"bound\":null,\"margin\":null,\"pass\":true}\n"
        );
    }
}
