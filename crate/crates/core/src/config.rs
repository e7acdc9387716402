//! Flat `key = value` suite configuration.
//!
//! ```text
//! # comment
//! suite_id  = smoke
//! seed      = 42
//! theorems  = classic, thm3, thm5
//! systems   = linear; exp@[0,1]
//! functions = convex:quadratic; perturbed:softmax:3:0.01
//! specimens = 4
//! pairs     = 10
//! error     = measured:33
//! ```

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::cheb::SystemSpec;
use crate::errmodel::ErrorSpec;
use crate::error::{HhError, Result};
use crate::func::{parse_f64, FunctionSpec};
use crate::measure::{parse_tuples, split_top, MeasureSpec};
use crate::residual::DEFAULT_EPS_GRID;
use crate::verify::{FamilySpec, TheoremId, DEFAULT_MARGIN_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub suite_id: String,
    pub seed: u64,
    pub theorems: Vec<TheoremId>,
    pub systems: Vec<SystemSpec>,
    pub functions: Vec<FamilySpec>,
    pub specimens: usize,
    pub pairs: usize,
    /// Error model of the mean-system and measure bounds.
    pub error: ErrorSpec,
    /// Weight of the classic bounds and of the lifted mean systems.
    pub rho: FunctionSpec,
    pub measure: MeasureSpec,
    /// Atoms `(p, q, c)` of the two-index power errors.
    pub power2: Vec<(f64, f64, f64)>,
    /// Atoms `(p, q, r, c)` of the three-index power errors.
    pub power3: Vec<(f64, f64, f64, f64)>,
    pub tolerance: f64,
    /// Worker threads; `0` picks the number of CPUs.
    pub workers: usize,
    /// Panel count; unset means `HH_QUAD_PANELS` or the default.
    pub quad_panels: Option<usize>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suite_id: "suite".into(),
            seed: 0,
            theorems: Vec::new(),
            systems: Vec::new(),
            functions: Vec::new(),
            specimens: 5,
            pairs: 10,
            error: ErrorSpec::Measured { grid: DEFAULT_EPS_GRID },
            rho: FunctionSpec::Const(1.0),
            measure: MeasureSpec::lebesgue(),
            power2: vec![(1.0, 1.0, 1.0)],
            power3: vec![(1.0, 1.0, 1.0, 1.0)],
            tolerance: DEFAULT_MARGIN_TOL,
            workers: 0,
            quad_panels: None,
        }
    }
}

const KEYS: [&str; 15] = [
    "suite_id",
    "seed",
    "theorems",
    "systems",
    "functions",
    "specimens",
    "pairs",
    "error",
    "rho",
    "measure",
    "power2",
    "power3",
    "tolerance",
    "workers",
    "quad_panels",
];

fn parse_uint<T: FromStr>(v: &str) -> Result<T> {
    v.parse().map_err(|_| HhError::parse(format!("expected a nonnegative integer, found `{v}`")))
}

fn parse_list<T>(v: &str, sep: char, item: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    split_top(v, sep)
        .into_iter()
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(item)
        .collect()
}

impl SuiteConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = SuiteConfig::default();
        let mut seen: Vec<&str> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("");
            if content.trim().is_empty() {
                continue;
            }
            let key_col = content.len() - content.trim_start().len() + 1;
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| HhError::parse("expected `key = value`").at(line, key_col))?;
            let key = key.trim();
            let after_eq = key_col + content.trim_start().find('=').unwrap_or(0) + 1;
            let value_col = after_eq + (value.len() - value.trim_start().len());
            let value = value.trim();
            let Some(&k) = KEYS.iter().find(|k| **k == key) else {
                return Err(HhError::parse(format!("unknown key `{key}`")).at(line, key_col));
            };
            if seen.contains(&k) {
                return Err(HhError::parse(format!("duplicate key `{key}`")).at(line, key_col));
            }
            seen.push(k);
            if value.is_empty() {
                return Err(HhError::parse(format!("missing value for `{key}`")).at(line, value_col));
            }
            cfg.set(k, value).map_err(|e| e.at(line, value_col))?;
        }
        for required in ["theorems", "systems", "functions"] {
            if !seen.contains(&required) {
                return Err(HhError::parse(format!("missing required key `{required}`")).at(text.lines().count().max(1), 1));
            }
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "suite_id" => self.suite_id = v.to_string(),
            "seed" => self.seed = parse_uint(v)?,
            "theorems" => {
                let lists = parse_list(v, ',', TheoremId::parse_entry)?;
                self.theorems = lists.into_iter().flatten().collect();
            }
            "systems" => self.systems = parse_list(v, ';', str::parse)?,
            "functions" => self.functions = parse_list(v, ';', str::parse)?,
            "specimens" => self.specimens = parse_uint(v)?,
            "pairs" => self.pairs = parse_uint(v)?,
            "error" => self.error = v.parse()?,
            "rho" => self.rho = v.parse()?,
            "measure" => self.measure = v.parse()?,
            "power2" => {
                self.power2 = parse_tuples(v, 3)?.into_iter().map(|t| (t[0], t[1], t[2])).collect();
            }
            "power3" => {
                self.power3 = parse_tuples(v, 4)?.into_iter().map(|t| (t[0], t[1], t[2], t[3])).collect();
            }
            "tolerance" => {
                self.tolerance = parse_f64(v)?;
                if !(self.tolerance >= 0.0) {
                    return Err(HhError::parse("tolerance must be >= 0"));
                }
            }
            "workers" => self.workers = parse_uint(v)?,
            "quad_panels" => {
                let p: usize = parse_uint(v)?;
                if p == 0 {
                    return Err(HhError::parse("quad_panels must be >= 1"));
                }
                self.quad_panels = Some(p);
            }
            _ => unreachable!("key list and setter agree"),
        }
        Ok(())
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| HhError::Io(format!("{}: {e}", path.display())))?;
        SuiteConfig::parse(&text)
    }

    /// Number of cells the suite will evaluate.
    pub fn cell_count(&self) -> usize {
        self.theorems.len() * self.systems.len() * self.functions.len() * self.specimens * self.pairs
    }
}

impl FromStr for SuiteConfig {
    type Err = HhError;

    fn from_str(s: &str) -> Result<Self> {
        SuiteConfig::parse(s)
    }
}

fn join<T: fmt::Display>(v: &[T], sep: &str) -> String {
    v.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(sep)
}

impl fmt::Display for SuiteConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite_id = {}", self.suite_id)?;
        writeln!(f, "seed = {}", self.seed)?;
        writeln!(f, "theorems = {}", join(&self.theorems, ", "))?;
        writeln!(f, "systems = {}", join(&self.systems, "; "))?;
        writeln!(f, "functions = {}", join(&self.functions, "; "))?;
        writeln!(f, "specimens = {}", self.specimens)?;
        writeln!(f, "pairs = {}", self.pairs)?;
        writeln!(f, "error = {}", self.error)?;
        writeln!(f, "rho = {}", self.rho)?;
        writeln!(f, "measure = {}", self.measure)?;
        let p2: Vec<String> = self.power2.iter().map(|(p, q, c)| format!("({p},{q},{c})")).collect();
        writeln!(f, "power2 = [{}]", p2.join(","))?;
        let p3: Vec<String> = self.power3.iter().map(|(p, q, r, c)| format!("({p},{q},{r},{c})")).collect();
        writeln!(f, "power3 = [{}]", p3.join(","))?;
        writeln!(f, "tolerance = {:e}", self.tolerance)?;
        writeln!(f, "workers = {}", self.workers)?;
        if let Some(p) = self.quad_panels {
            writeln!(f, "quad_panels = {p}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cheb::SystemKind;
    use crate::measure::MeasurePart;

    const SAMPLE: &str = "\
# smoke suite
suite_id = smoke
seed = 42
theorems = classic, thm3
systems = linear; poly([1],[0,1,1])@[0,1]
functions = convex:quadratic; fixed:poly:0,0,1
specimens = 2
pairs = 3
error = power2:[(1,1,0.5)]
measure = atoms:[(0,0.5),(1,0.5)]
";

    #[test]
    fn parses_sample() {
        let c = SuiteConfig::parse(SAMPLE).unwrap();
        assert_eq!(c.seed, 42);
        assert_eq!(c.theorems, vec![TheoremId::ClassicLower, TheoremId::ClassicUpper, TheoremId::Thm3]);
        assert_eq!(c.systems[0].kind, SystemKind::Linear);
        assert_eq!(c.systems.len(), 2);
        assert_eq!(c.error, ErrorSpec::Power2(vec![(1.0, 1.0, 0.5)]));
        assert_eq!(c.measure.parts, vec![MeasurePart::Atoms(vec![(0.0, 0.5), (1.0, 0.5)])]);
        assert_eq!(c.cell_count(), 3 * 2 * 2 * 2 * 3);
    }

    #[test]
    fn round_trips() {
        let c = SuiteConfig::parse(SAMPLE).unwrap();
        let again = SuiteConfig::parse(&c.to_string()).unwrap();
        assert_eq!(c, again);
        let mut d = c.clone();
        d.quad_panels = Some(16);
        d.tolerance = 1e-9;
        assert_eq!(SuiteConfig::parse(&d.to_string()).unwrap(), d);
    }

    #[test]
    fn errors_carry_positions() {
        let text = "theorems = thm3\nsystems = linear\nfunctions = span\n  bogus = 1\n";
        match SuiteConfig::parse(text) {
            Err(HhError::Parse { line, column, .. }) => assert_eq!((line, column), (4, 3)),
            other => panic!("{other:?}"),
        }
        let text = "theorems = thm3\nsystems = linear\nfunctions = span\nerror = power2:[(1,1)]\n";
        match SuiteConfig::parse(text) {
            Err(HhError::Parse { line, column, .. }) => assert_eq!((line, column), (4, 9)),
            other => panic!("{other:?}"),
        }
        assert!(SuiteConfig::parse("theorems = thm3\n").is_err());
        assert!(SuiteConfig::parse("theorems = thm3\ntheorems = thm4\nsystems = linear\nfunctions = span\n").is_err());
        assert!(SuiteConfig::parse("theorems = nope\nsystems = linear\nfunctions = span\n").is_err());
    }
}
