//! CSV formats: step-function tables and sparse collections.
//!
//! Every file starts with the provenance comment line. Readers skip `#` lines,
//! so a file written here always reads back to the same values.

use extrapolab_core::dyadic::{Grid, StepFunction, MAX_LEVEL};
use extrapolab_core::sparse::{SparseCollection, SparseEntry};

use crate::error::{LabError, LabResult};

/// `# extrapolab v…, seed=…, L=…`.
pub fn provenance(seed: u64, level: u32) -> String {
    format!("# extrapolab v{}, seed={seed}, L={level}\n", env!("CARGO_PKG_VERSION"))
}

/// Named step functions sharing one level.
#[derive(Clone, Debug, PartialEq)]
pub struct StepTable {
    pub names: Vec<String>,
    pub columns: Vec<StepFunction>,
}

impl StepTable {
    pub fn new(names: Vec<String>, columns: Vec<StepFunction>) -> LabResult<Self> {
        if names.len() != columns.len() || columns.is_empty() {
            return Err(LabError::Usage("a table needs one name per column and at least one column".into()));
        }
        let level = columns[0].level();
        if let Some(c) = columns.iter().find(|c| c.level() != level) {
            return Err(extrapolab_core::Error::LevelMismatch(level, c.level()).into());
        }
        Ok(StepTable { names, columns })
    }

    /// Columns named `{prefix}1, {prefix}2, …`.
    pub fn numbered(prefix: &str, columns: Vec<StepFunction>) -> LabResult<Self> {
        let names = (1..=columns.len()).map(|j| format!("{prefix}{j}")).collect();
        StepTable::new(names, columns)
    }

    pub fn level(&self) -> u32 {
        self.columns[0].level()
    }

    pub fn to_csv(&self, seed: u64) -> String {
        let mut out = provenance(seed, self.level());
        out.push_str("cell");
        for n in &self.names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for c in 0..self.columns[0].len() {
            out.push_str(&c.to_string());
            for col in &self.columns {
                out.push(',');
                out.push_str(&col.values()[c].to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str, file: &str) -> LabResult<Self> {
        let err = |line: u64, message: String| LabError::Parse { file: file.to_string(), line: line as usize, message };
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
        let header = rdr.headers().map_err(|e| err(e.position().map_or(1, |p| p.line()), e.to_string()))?.clone();
        if header.get(0) != Some("cell") || header.len() < 2 {
            return Err(err(header_line(text), "header must be cell,<name>,…".into()));
        }
        let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut values: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
            let line = rec.position().map_or(0, |p| p.line());
            let cell: usize = rec[0].parse().map_err(|_| err(line, format!("cell '{}' is not an index", &rec[0])))?;
            if cell != i {
                return Err(err(line, format!("expected cell {i}, found {cell}")));
            }
            for (j, col) in values.iter_mut().enumerate() {
                let v: f64 = rec[j + 1].parse().map_err(|_| err(line, format!("'{}' is not a number", &rec[j + 1])))?;
                if !(v.is_finite() && v >= 0.0) {
                    return Err(err(line, format!("value {v} must be finite and nonnegative")));
                }
                col.push(v);
            }
        }
        let n = values[0].len();
        if !n.is_power_of_two() || n.trailing_zeros() > MAX_LEVEL {
            return Err(err(header_line(text), format!("{n} rows is not a power of two up to 2^{MAX_LEVEL}")));
        }
        let level = n.trailing_zeros();
        let columns = values.into_iter().map(|v| StepFunction::new(level, v)).collect::<Result<Vec<_>, _>>()?;
        StepTable::new(names, columns)
    }
}

fn header_line(text: &str) -> u64 {
    text.lines().position(|l| !l.trim_start().starts_with('#')).map_or(1, |i| i as u64 + 1)
}

pub fn sparse_to_csv(s: &SparseCollection, seed: u64) -> String {
    let mut out = provenance(seed, s.level);
    out.push_str("grid,level,index,k,E_cells\n");
    for e in &s.entries {
        let k = e.k.map_or(String::new(), |k| k.to_string());
        let cells: Vec<String> = e.cells.iter().map(usize::to_string).collect();
        out.push_str(&format!("{},{},{},{},{}\n", e.cube.grid, e.cube.level, e.cube.index, k, cells.join(";")));
    }
    out
}

/// Reads a sparse collection; the level comes from the provenance line.
pub fn sparse_from_csv(text: &str, file: &str) -> LabResult<SparseCollection> {
    let err = |line: u64, message: String| LabError::Parse { file: file.to_string(), line: line as usize, message };
    let level = text
        .lines()
        .find_map(|l| l.strip_prefix("# extrapolab").and_then(|rest| rest.rsplit_once("L=")).map(|(_, v)| v.trim()))
        .ok_or_else(|| err(1, "missing provenance line with L=".into()))?
        .parse::<u32>()
        .map_err(|_| err(1, "L= is not a level".into()))?;
    let grid = Grid::standard(level);
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| err(1, e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != ["grid", "level", "index", "k", "E_cells"] {
        return Err(err(header_line(text), "header must be grid,level,index,k,E_cells".into()));
    }
    let mut entries = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let num = |i: usize| rec[i].parse::<i64>().map_err(|_| err(line, format!("'{}' is not an integer", &rec[i])));
        let (g, l, index) = (num(0)?, num(1)?, num(2)?);
        if g != 0 || !(0..=level as i64).contains(&l) {
            return Err(err(line, format!("cube ({g},{l},{index}) is not a standard dyadic cube at level {level}")));
        }
        let cube = grid.cube(l as u32, index).map_err(|e| err(line, e.to_string()))?;
        let k = if rec[3].is_empty() { None } else { Some(num(3)?) };
        let cells = if rec[4].is_empty() {
            Vec::new()
        } else {
            rec[4]
                .split(';')
                .map(|c| c.parse::<usize>().map_err(|_| err(line, format!("cell '{c}' is not an index"))))
                .collect::<LabResult<Vec<_>>>()?
        };
        entries.push(SparseEntry { cube, cells, k });
    }
    Ok(SparseCollection { level, entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_table_round_trips() {
        let f = StepFunction::new(2, vec![0.1, 1.0 / 3.0, 2.5e-17, 7.0]).unwrap();
        let g = StepFunction::constant(2, 1.0).unwrap();
        let t = StepTable::numbered("f", vec![f, g]).unwrap();
        let text = t.to_csv(5);
        assert!(text.starts_with("# extrapolab v"));
        assert_eq!(StepTable::from_csv(&text, "t.csv").unwrap(), t);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let text = "# extrapolab v0, seed=0, L=1\ncell,f1\n0,1\n1,abc\n";
        let e = StepTable::from_csv(text, "in.csv").unwrap_err();
        assert_eq!(e.to_string(), "in.csv:4: 'abc' is not a number");
        let e = StepTable::from_csv("cell,f1\n0,1\n1,2\n2,3\n", "odd.csv").unwrap_err();
        assert!(e.to_string().starts_with("odd.csv:1:"), "{e}");
    }
}
