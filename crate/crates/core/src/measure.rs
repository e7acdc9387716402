//! Measures on `[0, 1]` made of a nonnegative density and finitely many atoms.
//!
//! Every integral against such a measure is turned into a weighted node set:
//! composite Gauss-Legendre nodes for the density part (weights already
//! multiplied by the density) followed by the atoms that fall into the
//! requested (half-)open interval.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{HhError, Result};
use crate::func::{parse_floats, FunctionSpec, RealFunction};
use crate::quad::{composite_nodes, graded_nodes, Grading, QuadratureConfig};

/// Total mass tolerance for calling a measure a probability measure.
pub const PROBABILITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Atom {
    pub position: f64,
    pub weight: f64,
}

/// A point of a node set: position and weight (density and rule weight folded in).
pub type Node = (f64, f64);

#[derive(Debug, Clone)]
pub struct UnitMeasure {
    density: Option<RealFunction>,
    atoms: Vec<Atom>,
    is_probability: bool,
    label: String,
}

/// Which ends of `[a, b]` are included for atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ends {
    pub include_a: bool,
    pub include_b: bool,
}

impl Ends {
    pub const CLOSED: Ends = Ends {
        include_a: true,
        include_b: true,
    };
    /// `]a, b]`
    pub const LEFT_OPEN: Ends = Ends {
        include_a: false,
        include_b: true,
    };
}

impl UnitMeasure {
    /// Builds a measure and decides whether it is a probability measure.
    ///
    /// The density is checked for nonnegativity at the nodes of `q`.
    pub fn new(density: Option<RealFunction>, atoms: Vec<Atom>, q: &QuadratureConfig) -> Result<Self> {
        for a in &atoms {
            if !(0.0..=1.0).contains(&a.position) {
                return Err(HhError::input(format!("atom at {} is outside [0, 1]", a.position)));
            }
            if !(a.weight > 0.0) || !a.weight.is_finite() {
                return Err(HhError::input(format!("atom weight {} must be positive", a.weight)));
            }
        }
        if let Some(d) = &density {
            for (t, _) in composite_nodes(0.0, 1.0, q) {
                let v = d.try_eval(t)?;
                if v < 0.0 {
                    return Err(HhError::input(format!("density `{}` is negative at {t}", d.name())));
                }
            }
        }
        let label = Self::make_label(&density, &atoms);
        let mut m = UnitMeasure {
            density,
            atoms,
            is_probability: false,
            label,
        };
        let mass = m.mass(0.0, 1.0, Ends::CLOSED, q);
        m.is_probability = (mass - 1.0).abs() <= PROBABILITY_TOL;
        Ok(m)
    }

    fn make_label(density: &Option<RealFunction>, atoms: &[Atom]) -> String {
        let mut parts = Vec::new();
        if let Some(d) = density {
            parts.push(format!("density:{}", d.name()));
        }
        if !atoms.is_empty() {
            parts.push(format!("atoms:{}", fmt_atoms(atoms)));
        }
        if parts.is_empty() {
            "zero".to_string()
        } else {
            parts.join("+")
        }
    }

    pub fn lebesgue() -> Self {
        UnitMeasure {
            density: Some(RealFunction::constant(1.0)),
            atoms: Vec::new(),
            is_probability: true,
            label: "lebesgue".to_string(),
        }
    }

    /// Purely atomic measure from `(position, weight)` pairs.
    pub fn atomic(atoms: &[(f64, f64)]) -> Result<Self> {
        let atoms = atoms
            .iter()
            .map(|&(position, weight)| Atom { position, weight })
            .collect();
        UnitMeasure::new(None, atoms, &QuadratureConfig::default())
    }

    pub fn dirac(position: f64) -> Result<Self> {
        UnitMeasure::atomic(&[(position, 1.0)])
    }

    pub fn with_density(density: RealFunction, q: &QuadratureConfig) -> Result<Self> {
        UnitMeasure::new(Some(density), Vec::new(), q)
    }

    pub fn density(&self) -> Option<&RealFunction> {
        self.density.as_ref()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn is_probability(&self) -> bool {
        self.is_probability
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    fn atom_in(a: &Atom, lo: f64, hi: f64, ends: Ends) -> bool {
        let t = a.position;
        let left = if ends.include_a { t >= lo } else { t > lo };
        let right = if ends.include_b { t <= hi } else { t < hi };
        left && right
    }

    fn push_atoms(&self, a: f64, b: f64, ends: Ends, out: &mut Vec<Node>) {
        out.extend(
            self.atoms
                .iter()
                .filter(|at| Self::atom_in(at, a, b, ends))
                .map(|at| (at.position, at.weight)),
        );
    }

    fn push_density(&self, raw: Vec<Node>, out: &mut Vec<Node>) {
        if let Some(d) = &self.density {
            out.extend(raw.into_iter().map(|(t, w)| (t, w * d.eval(t))));
        }
    }

    /// Node set representing the measure restricted to `[a, b]` (ends per `ends`).
    pub fn nodes(&self, a: f64, b: f64, ends: Ends, q: &QuadratureConfig) -> Vec<Node> {
        let mut out = Vec::new();
        if a < b {
            self.push_density(composite_nodes(a, b, q), &mut out);
        }
        self.push_atoms(a, b, ends, &mut out);
        out
    }

    /// Like [`UnitMeasure::nodes`], with panels graded toward the given end(s).
    pub fn graded(&self, a: f64, b: f64, ends: Ends, grading: Grading, q: &QuadratureConfig) -> Vec<Node> {
        let mut out = Vec::new();
        if a < b {
            self.push_density(graded_nodes(a, b, grading, q), &mut out);
        }
        self.push_atoms(a, b, ends, &mut out);
        out
    }

    /// `int_{[a,b]} g dmu`: composite Gauss-Legendre on the density plus the
    /// atoms selected by `ends`.
    pub fn integrate<G: Fn(f64) -> f64>(
        &self,
        g: G,
        a: f64,
        b: f64,
        ends: Ends,
        q: &QuadratureConfig,
    ) -> Result<f64> {
        if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) || a > b {
            return Err(HhError::input(format!("integration range [{a}, {b}] is not inside [0, 1]")));
        }
        let mut sum = 0.0;
        for (t, w) in self.nodes(a, b, ends, q) {
            let v = g(t);
            if !v.is_finite() {
                return Err(HhError::Evaluation {
                    name: "integrand".into(),
                    at: t,
                    value: v,
                });
            }
            sum += w * v;
        }
        Ok(sum)
    }

    pub fn mass(&self, a: f64, b: f64, ends: Ends, q: &QuadratureConfig) -> f64 {
        self.nodes(a, b, ends, q).iter().map(|n| n.1).sum()
    }

    pub fn total_mass(&self, q: &QuadratureConfig) -> f64 {
        self.mass(0.0, 1.0, Ends::CLOSED, q)
    }

    fn require_probability(&self) -> Result<()> {
        if self.is_probability {
            Ok(())
        } else {
            Err(HhError::contract(format!("`{}` is not a probability measure", self.label)))
        }
    }

    /// `mu_1 = int t dmu(t)` of a probability measure.
    pub fn first_moment(&self, q: &QuadratureConfig) -> Result<f64> {
        self.require_probability()?;
        let m = self.integrate(|t| t, 0.0, 1.0, Ends::CLOSED, q)?;
        Ok(m.clamp(0.0, 1.0))
    }

    /// `mu_1` together with the block split `[0, mu_1]` / `]mu_1, 1]`.
    pub fn split(&self, q: &QuadratureConfig) -> Result<MomentSplit> {
        let mu1 = self.first_moment(q)?;
        let left = self.nodes(0.0, mu1, Ends::CLOSED, q);
        let right = self.nodes(mu1, 1.0, Ends::LEFT_OPEN, q);
        let mass_left: f64 = left.iter().map(|n| n.1).sum();
        let mass_right: f64 = right.iter().map(|n| n.1).sum();
        let first_left: f64 = left.iter().map(|n| n.0 * n.1).sum();
        let first_right: f64 = right.iter().map(|n| n.0 * n.1).sum();
        if !(mass_left > 0.0 && mass_right > 0.0) {
            return Err(HhError::contract(format!(
                "support of `{}` is a singleton (block masses {mass_left}, {mass_right})",
                self.label
            )));
        }
        let s = mass_left * first_right - mass_right * first_left;
        if !(s > 0.0) {
            return Err(HhError::contract(format!("S(mu) = {s} is not positive for `{}`", self.label)));
        }
        Ok(MomentSplit {
            mu1,
            s,
            mass_left,
            mass_right,
            left,
            right,
        })
    }

    /// `S(mu) = mu([0,mu_1]) int_{]mu_1,1]} t dmu - mu(]mu_1,1]) int_{[0,mu_1]} t dmu`.
    pub fn s_functional(&self, q: &QuadratureConfig) -> Result<f64> {
        Ok(self.split(q)?.s)
    }
}

/// The first moment, `S(mu)` and the node sets of both blocks.
#[derive(Debug, Clone)]
pub struct MomentSplit {
    pub mu1: f64,
    pub s: f64,
    pub mass_left: f64,
    pub mass_right: f64,
    /// Nodes of `[0, mu_1]`; an atom at `mu_1` lands here.
    pub left: Vec<Node>,
    /// Nodes of `]mu_1, 1]`.
    pub right: Vec<Node>,
}

fn fmt_atoms(atoms: &[Atom]) -> String {
    let inner: Vec<String> = atoms
        .iter()
        .map(|a| format!("({},{})", a.position, a.weight))
        .collect();
    format!("[{}]", inner.join(","))
}

/// Config form of a measure: `lebesgue`, `density:<fn>`, `atoms:[(t,w),...]`,
/// or several of them joined by `+`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpec {
    pub parts: Vec<MeasurePart>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeasurePart {
    Lebesgue,
    Density(FunctionSpec),
    Atoms(Vec<(f64, f64)>),
}

impl MeasureSpec {
    pub fn lebesgue() -> Self {
        MeasureSpec {
            parts: vec![MeasurePart::Lebesgue],
        }
    }

    pub fn build(&self, q: &QuadratureConfig) -> Result<UnitMeasure> {
        if self.parts == [MeasurePart::Lebesgue] {
            return Ok(UnitMeasure::lebesgue());
        }
        let mut density: Option<RealFunction> = None;
        let mut atoms = Vec::new();
        for p in &self.parts {
            let add = match p {
                MeasurePart::Lebesgue => Some(RealFunction::constant(1.0)),
                MeasurePart::Density(f) => Some(f.build()),
                MeasurePart::Atoms(a) => {
                    atoms.extend(a.iter().map(|&(position, weight)| Atom { position, weight }));
                    None
                }
            };
            if let Some(f) = add {
                density = Some(match density {
                    None => f,
                    Some(d) => d.add(&f),
                });
            }
        }
        UnitMeasure::new(density, atoms, q)
    }
}

impl fmt::Display for MeasureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .parts
            .iter()
            .map(|p| match p {
                MeasurePart::Lebesgue => "lebesgue".to_string(),
                MeasurePart::Density(d) => format!("density:{d}"),
                MeasurePart::Atoms(a) => {
                    let v: Vec<Atom> = a.iter().map(|&(position, weight)| Atom { position, weight }).collect();
                    format!("atoms:{}", fmt_atoms(&v))
                }
            })
            .collect();
        write!(f, "{}", parts.join("+"))
    }
}

/// Parses `[(a,b,...),(c,d,...)]` into tuples of exactly `arity` numbers.
pub(crate) fn parse_tuples(s: &str, arity: usize) -> Result<Vec<Vec<f64>>> {
    let s = s.trim();
    let inner = s
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| HhError::parse(format!("expected `[(..),..]`, found `{s}`")))?;
    let mut out = Vec::new();
    let mut rest = inner.trim();
    while !rest.is_empty() {
        let open = rest
            .strip_prefix('(')
            .ok_or_else(|| HhError::parse(format!("expected `(` in `{rest}`")))?;
        let close = open
            .find(')')
            .ok_or_else(|| HhError::parse(format!("missing `)` in `{rest}`")))?;
        let nums = parse_floats(&open[..close])?;
        if nums.len() != arity {
            return Err(HhError::parse(format!(
                "expected {arity} numbers per tuple, got {} in `({})`",
                nums.len(),
                &open[..close]
            )));
        }
        out.push(nums);
        rest = open[close + 1..].trim_start();
        if let Some(r) = rest.strip_prefix(',') {
            rest = r.trim_start();
            if rest.is_empty() {
                return Err(HhError::parse("trailing `,` in tuple list"));
            }
        } else if !rest.is_empty() {
            return Err(HhError::parse(format!("expected `,` before `{rest}`")));
        }
    }
    Ok(out)
}

/// Splits on `sep` at bracket/parenthesis depth zero.
pub(crate) fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

impl FromStr for MeasureSpec {
    type Err = HhError;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = Vec::new();
        for part in split_top(s, '+') {
            let part = part.trim();
            let p = if part == "lebesgue" {
                MeasurePart::Lebesgue
            } else if let Some(f) = part.strip_prefix("density:") {
                MeasurePart::Density(f.parse()?)
            } else if let Some(a) = part.strip_prefix("atoms:") {
                MeasurePart::Atoms(parse_tuples(a, 2)?.into_iter().map(|v| (v[0], v[1])).collect())
            } else {
                return Err(HhError::parse(format!("unknown measure `{part}`")));
            };
            parts.push(p);
        }
        Ok(MeasureSpec { parts })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    fn two_point() -> UnitMeasure {
        UnitMeasure::atomic(&[(0.0, 0.5), (1.0, 0.5)]).unwrap()
    }

    #[test]
    fn integrate_examples() {
        let leb = UnitMeasure::lebesgue();
        assert!((leb.integrate(|t| t, 0.0, 1.0, Ends::CLOSED, &q()).unwrap() - 0.5).abs() < 1e-15);
        let tp = two_point();
        assert_eq!(tp.integrate(|t| t, 0.0, 1.0, Ends::CLOSED, &q()).unwrap(), 0.5);
        assert_eq!(tp.integrate(|t| t, 0.5, 1.0, Ends::LEFT_OPEN, &q()).unwrap(), 0.5);
        // the atom at 0 is excluded by an open left end
        assert_eq!(tp.integrate(|_| 1.0, 0.0, 1.0, Ends::LEFT_OPEN, &q()).unwrap(), 0.5);
    }

    #[test]
    fn integrate_reports_non_finite() {
        let leb = UnitMeasure::lebesgue();
        assert!(matches!(
            leb.integrate(|t| 1.0 / (t - t), 0.0, 1.0, Ends::CLOSED, &q()),
            Err(HhError::Evaluation { .. })
        ));
    }

    #[test]
    fn moments() {
        let leb = UnitMeasure::lebesgue();
        assert!((leb.first_moment(&q()).unwrap() - 0.5).abs() < 1e-15);
        assert!((leb.s_functional(&q()).unwrap() - 0.125).abs() < 1e-15);
        assert_eq!(two_point().first_moment(&q()).unwrap(), 0.5);
        assert_eq!(two_point().s_functional(&q()).unwrap(), 0.25);
        assert_eq!(UnitMeasure::dirac(0.3).unwrap().first_moment(&q()).unwrap(), 0.3);
    }

    #[test]
    fn singleton_support_is_a_contract_error() {
        let d = UnitMeasure::dirac(0.5).unwrap();
        assert!(matches!(d.s_functional(&q()), Err(HhError::Contract(_))));
    }

    #[test]
    fn non_probability_moment_is_a_contract_error() {
        let m = UnitMeasure::atomic(&[(0.2, 0.3)]).unwrap();
        assert!(!m.is_probability());
        assert!(matches!(m.first_moment(&q()), Err(HhError::Contract(_))));
    }

    #[test]
    fn atom_at_mean_goes_left() {
        let m = UnitMeasure::atomic(&[(0.0, 0.25), (0.5, 0.5), (1.0, 0.25)]).unwrap();
        let s = m.split(&q()).unwrap();
        assert_eq!(s.mu1, 0.5);
        assert_eq!(s.mass_left, 0.75);
        assert_eq!(s.mass_right, 0.25);
    }

    #[test]
    fn rejects_bad_atoms_and_negative_density() {
        assert!(UnitMeasure::atomic(&[(1.5, 1.0)]).is_err());
        assert!(UnitMeasure::atomic(&[(0.5, 0.0)]).is_err());
        let neg = RealFunction::poly(vec![-1.0, 1.0]);
        assert!(UnitMeasure::with_density(neg, &q()).is_err());
    }

    #[test]
    fn measure_spec_parse() {
        let m: MeasureSpec = "atoms:[(0,0.5),(1,0.5)]".parse().unwrap();
        let built = m.build(&q()).unwrap();
        assert!(built.is_probability());
        assert_eq!(built.atoms().len(), 2);
        let mixed: MeasureSpec = "density:poly(0,1)+atoms:[(0.25,0.5)]".parse().unwrap();
        assert!(mixed.build(&q()).unwrap().is_probability());
        assert!("atoms:[(0,0.5),]".parse::<MeasureSpec>().is_err());
        assert!("atoms:[(0,0.5,1)]".parse::<MeasureSpec>().is_err());
        assert!("counting".parse::<MeasureSpec>().is_err());
    }
}
