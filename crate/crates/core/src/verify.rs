//! Specimen generators and batch certification runs.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cheb::ChebyshevSystem;
use crate::classic::classic_bounds;
use crate::config::SuiteConfig;
use crate::errmodel::{ErrorModel, ErrorSpec, PowerMeasure2, PowerMeasure3};
use crate::error::{HhError, Result};
use crate::func::{parse_f64, FunctionSpec, Interval, RealFunction};
use crate::lower::{lower_bound_cor2hp1, lower_bound_cor4c2, lower_bound_thm3, lower_bound_thm4};
use crate::meansys::{lift_weighted_system, MeanSystem};
use crate::measure::UnitMeasure;
use crate::quad::QuadratureConfig;
use crate::report::BoundReport;
use crate::residual::{is_omega_convex, MeasuredEps};
use crate::upper::{upper_bound_cor6a, upper_bound_cor6b, upper_bound_thm5, upper_bound_thm6};

/// Identifier of the random generator, embedded in every report.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng/seed_from_u64";
/// Grid of the convexity scan that confirms generated specimens.
pub const CONFIRM_GRID: usize = 33;
/// Consecutive failed confirmations before generation gives up.
pub const MAX_ATTEMPTS: usize = 10;
pub const DEFAULT_MARGIN_TOL: f64 = 1e-8;

/// `splitmix64` step, used to derive independent seeds from a base seed and tags.
pub fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    let mut z = seed;
    for &t in tags {
        z = z.wrapping_add(t.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Convex profiles and generated specimens
// ---------------------------------------------------------------------------

/// An ordinary convex function `h` of the ratio `v = omega1 / omega0`.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexProfile {
    /// `a (v - b)^2 + c`, `a >= 0`
    Quadratic { a: f64, b: f64, c: f64 },
    /// `max_i (slope_i v + intercept_i)`
    MaxAffine(Vec<(f64, f64)>),
    /// `temperature * ln sum_i exp((slope_i v + intercept_i) / temperature)`
    SoftMaxAffine { pieces: Vec<(f64, f64)>, temperature: f64 },
}

impl ConvexProfile {
    pub fn eval(&self, v: f64) -> f64 {
        match self {
            ConvexProfile::Quadratic { a, b, c } => a * (v - b) * (v - b) + c,
            ConvexProfile::MaxAffine(p) => p.iter().map(|(s, i)| s * v + i).fold(f64::NEG_INFINITY, f64::max),
            ConvexProfile::SoftMaxAffine { pieces, temperature } => {
                let top = pieces.iter().map(|(s, i)| s * v + i).fold(f64::NEG_INFINITY, f64::max);
                let sum: f64 = pieces.iter().map(|(s, i)| ((s * v + i - top) / temperature).exp()).sum();
                top + temperature * sum.ln()
            }
        }
    }
}

impl fmt::Display for ConvexProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pieces = |p: &[(f64, f64)]| p.iter().map(|(s, i)| format!("({s:.4},{i:.4})")).collect::<Vec<_>>().join("");
        match self {
            ConvexProfile::Quadratic { a, b, c } => write!(f, "quad({a:.4},{b:.4},{c:.4})"),
            ConvexProfile::MaxAffine(p) => write!(f, "max{}", pieces(p)),
            ConvexProfile::SoftMaxAffine { pieces: p, temperature } => {
                write!(f, "softmax[{temperature:.4}]{}", pieces(p))
            }
        }
    }
}

/// `f = omega0 * h(omega1 / omega0)`, convex with respect to `sys` whenever `h` is convex.
pub fn omega_convex_from(sys: &ChebyshevSystem, h: &ConvexProfile) -> RealFunction {
    let (w0, w1, h2) = (sys.omega0.clone(), sys.omega1.clone(), h.clone());
    RealFunction::new(format!("{}∘{}", h, sys.name), Vec::new(), move |t| {
        let a = w0.eval(t);
        a * h2.eval(w1.eval(t) / a)
    })
}

/// Random family of convex profiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileFamily {
    Quadratic,
    MaxAffine(usize),
    SoftMax(usize),
}

impl ProfileFamily {
    /// Draws a profile whose features lie inside the ratio range `[lo, hi]`.
    pub fn sample(&self, rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> ConvexProfile {
        match *self {
            ProfileFamily::Quadratic => ConvexProfile::Quadratic {
                a: rng.random_range(0.2..2.0),
                b: rng.random_range(lo..hi),
                c: rng.random_range(-1.0..1.0),
            },
            ProfileFamily::MaxAffine(k) => ConvexProfile::MaxAffine(sample_pieces(rng, k, lo, hi)),
            ProfileFamily::SoftMax(k) => {
                let pieces = sample_pieces(rng, k, lo, hi);
                let spread = pieces.last().unwrap().0 - pieces[0].0;
                ConvexProfile::SoftMaxAffine {
                    temperature: 0.03 * (hi - lo) * spread.max(1e-3) / k.max(2) as f64,
                    pieces,
                }
            }
        }
    }
}

/// `k` affine pieces with increasing slopes whose successive crossings are
/// uniformly placed in `[lo, hi]`.
fn sample_pieces(rng: &mut ChaCha8Rng, k: usize, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let k = k.max(1);
    let mut slopes: Vec<f64> = (0..k).map(|_| rng.random_range(-2.0..2.0)).collect();
    slopes.sort_by(f64::total_cmp);
    let mut kinks: Vec<f64> = (1..k).map(|_| rng.random_range(lo..hi)).collect();
    kinks.sort_by(f64::total_cmp);
    let mut pieces = vec![(slopes[0], rng.random_range(-1.0..1.0))];
    for (i, &v) in kinks.iter().enumerate() {
        let (s, b) = pieces[i];
        let s2 = slopes[i + 1];
        pieces.push((s2, b + (s - s2) * v));
    }
    pieces
}

impl fmt::Display for ProfileFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileFamily::Quadratic => write!(f, "quadratic"),
            ProfileFamily::MaxAffine(k) => write!(f, "maxaffine:{k}"),
            ProfileFamily::SoftMax(k) => write!(f, "softmax:{k}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Specimen {
    pub function: RealFunction,
    pub profile: ConvexProfile,
    /// Attempts used, including the accepted one.
    pub attempts: usize,
}

fn ratio_range(sys: &ChebyshevSystem) -> (f64, f64) {
    let d = sys.domain;
    let (a, b) = (sys.ratio(d.lo), sys.ratio(d.hi));
    (a.min(b), a.max(b))
}

/// Random `omega`-convex function, confirmed by a grid scan before it is returned.
pub fn gen_omega_convex(sys: &ChebyshevSystem, family: ProfileFamily, seed: u64) -> Result<Specimen> {
    let (lo, hi) = ratio_range(sys);
    for attempt in 0..MAX_ATTEMPTS {
        let mut r = rng(derive_seed(seed, &[attempt as u64]));
        let profile = family.sample(&mut r, lo, hi);
        let function = omega_convex_from(sys, &profile);
        if is_omega_convex(&function, sys, CONFIRM_GRID).passed {
            return Ok(Specimen {
                function,
                profile,
                attempts: attempt + 1,
            });
        }
    }
    Err(HhError::Generator(format!(
        "no confirmed {family} specimen for `{}` after {MAX_ATTEMPTS} attempts",
        sys.name
    )))
}

/// `f0 + delta` with `delta = sum a_j sin(k_j t + phase_j)` and `sum |a_j| = bound`.
pub fn gen_perturbed(f0: &RealFunction, bound: f64, seed: u64) -> Result<RealFunction> {
    if !(bound >= 0.0) || !bound.is_finite() {
        return Err(HhError::input(format!("perturbation bound {bound} must be >= 0")));
    }
    if bound == 0.0 {
        return Ok(f0.clone());
    }
    let mut r = rng(seed);
    let mut waves: Vec<(f64, f64, f64)> = (0..4)
        .map(|_| (rng_amp(&mut r), r.random_range(3.0..20.0), r.random_range(0.0..std::f64::consts::TAU)))
        .collect();
    let total: f64 = waves.iter().map(|w| w.0).sum();
    for w in &mut waves {
        w.0 *= bound / total;
    }
    let f = f0.clone();
    Ok(RealFunction::new(
        format!("{}+wiggle[{bound}:{seed:x}]", f0.name()),
        Vec::new(),
        move |t| f.eval(t) + waves.iter().map(|&(a, k, p)| a * (k * t + p).sin()).sum::<f64>(),
    ))
}

fn rng_amp(r: &mut ChaCha8Rng) -> f64 {
    r.random_range(0.1..1.0)
}

// ---------------------------------------------------------------------------
// Suite configuration pieces
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TheoremId {
    ClassicLower,
    ClassicUpper,
    Thm3,
    Thm4,
    Thm5,
    Thm6,
    Cor2hp1,
    Cor4c2,
    Cor6a,
    Cor6b,
}

impl TheoremId {
    pub const ALL: [TheoremId; 10] = [
        TheoremId::ClassicLower,
        TheoremId::ClassicUpper,
        TheoremId::Thm3,
        TheoremId::Thm4,
        TheoremId::Thm5,
        TheoremId::Thm6,
        TheoremId::Cor2hp1,
        TheoremId::Cor4c2,
        TheoremId::Cor6a,
        TheoremId::Cor6b,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremId::ClassicLower => "classic-lower",
            TheoremId::ClassicUpper => "classic-upper",
            TheoremId::Thm3 => "thm3",
            TheoremId::Thm4 => "thm4",
            TheoremId::Thm5 => "thm5",
            TheoremId::Thm6 => "thm6",
            TheoremId::Cor2hp1 => "cor2hp1",
            TheoremId::Cor4c2 => "cor4c2",
            TheoremId::Cor6a => "cor6a",
            TheoremId::Cor6b => "cor6b",
        }
    }

    /// Parses one list entry; `classic` stands for both classic sides.
    pub fn parse_entry(s: &str) -> Result<Vec<TheoremId>> {
        let s = s.trim();
        if s == "classic" {
            return Ok(vec![TheoremId::ClassicLower, TheoremId::ClassicUpper]);
        }
        TheoremId::ALL
            .iter()
            .find(|t| t.as_str() == s)
            .map(|t| vec![*t])
            .ok_or_else(|| HhError::parse(format!("unknown theorem `{s}`")))
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Function family of a suite: `convex:<profile>`, `perturbed:<profile>:<bound>`,
/// `span`, or `fixed:<function>`.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySpec {
    Convex(ProfileFamily),
    Perturbed(ProfileFamily, f64),
    /// `a omega0 + b omega1`
    Span,
    Fixed(FunctionSpec),
}

impl FamilySpec {
    /// Whether specimens are convex with respect to the system.
    pub fn is_convex(&self) -> bool {
        matches!(self, FamilySpec::Convex(_) | FamilySpec::Span)
    }
}

fn piece_count(rest: &str) -> Result<(usize, &str)> {
    let (k, tail) = rest.split_once(':').unwrap_or((rest, ""));
    let k: usize = k
        .trim()
        .parse()
        .map_err(|_| HhError::parse(format!("bad piece count `{k}`")))?;
    if k == 0 {
        return Err(HhError::parse("piece count must be >= 1"));
    }
    Ok((k, tail))
}

fn parse_profile(s: &str) -> Result<(ProfileFamily, &str)> {
    let (name, rest) = s.split_once(':').unwrap_or((s, ""));
    match name.trim() {
        "quadratic" => Ok((ProfileFamily::Quadratic, rest)),
        "maxaffine" => piece_count(rest).map(|(k, t)| (ProfileFamily::MaxAffine(k), t)),
        "softmax" => piece_count(rest).map(|(k, t)| (ProfileFamily::SoftMax(k), t)),
        other => Err(HhError::parse(format!("unknown convex profile `{other}`"))),
    }
}

impl FromStr for FamilySpec {
    type Err = HhError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "span" {
            return Ok(FamilySpec::Span);
        }
        if let Some(f) = s.strip_prefix("fixed:") {
            return Ok(FamilySpec::Fixed(f.parse()?));
        }
        if let Some(p) = s.strip_prefix("convex:") {
            let (fam, rest) = parse_profile(p)?;
            if !rest.is_empty() {
                return Err(HhError::parse(format!("unexpected `{rest}` after profile")));
            }
            return Ok(FamilySpec::Convex(fam));
        }
        if let Some(p) = s.strip_prefix("perturbed:") {
            let (fam, rest) = parse_profile(p)?;
            let bound = parse_f64(rest.trim())?;
            if !(bound >= 0.0) {
                return Err(HhError::parse(format!("perturbation bound {bound} must be >= 0")));
            }
            return Ok(FamilySpec::Perturbed(fam, bound));
        }
        Err(HhError::parse(format!("unknown function family `{s}`")))
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Convex(p) => write!(f, "convex:{p}"),
            FamilySpec::Perturbed(p, b) => write!(f, "perturbed:{p}:{b}"),
            FamilySpec::Span => write!(f, "span"),
            FamilySpec::Fixed(g) => write!(f, "fixed:{g}"),
        }
    }
}

/// Draws specimen `index` of a family for a system.
pub fn draw_specimen(sys: &ChebyshevSystem, family: &FamilySpec, seed: u64) -> Result<RealFunction> {
    match family {
        FamilySpec::Convex(p) => Ok(gen_omega_convex(sys, *p, seed)?.function),
        FamilySpec::Perturbed(p, bound) => {
            let base = gen_omega_convex(sys, *p, seed)?.function;
            gen_perturbed(&base, *bound, derive_seed(seed, &[u64::MAX]))
        }
        FamilySpec::Span => {
            let mut r = rng(seed);
            let (a, b): (f64, f64) = (r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
            let (w0, w1) = (sys.omega0.clone(), sys.omega1.clone());
            Ok(RealFunction::new(
                format!("span({a:.4},{b:.4})"),
                vec![a, b],
                move |t| a * w0.eval(t) + b * w1.eval(t),
            ))
        }
        FamilySpec::Fixed(g) => Ok(g.build()),
    }
}

/// Random pair `x < y` in `domain` with `y - x` at least 2% of the width.
pub fn draw_pair(r: &mut ChaCha8Rng, domain: Interval) -> (f64, f64) {
    loop {
        let a = r.random_range(domain.lo..=domain.hi);
        let b = r.random_range(domain.lo..=domain.hi);
        let (x, y) = (a.min(b), a.max(b));
        if y - x >= 0.02 * domain.width() {
            return (x, y);
        }
    }
}

// ---------------------------------------------------------------------------
// Suite execution
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellReport {
    pub theorem: String,
    pub system: String,
    pub function: String,
    pub x: f64,
    pub y: f64,
    pub lhs: f64,
    pub rhs_main: f64,
    pub error_term: f64,
    pub margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremSummary {
    pub count: usize,
    /// Smallest margin; `null` when no cell produced one.
    pub worst_margin: Option<f64>,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub per_theorem: BTreeMap<String, TheoremSummary>,
    pub total_cells: usize,
    pub total_failures: usize,
    /// Indices into `cells` of the failed cells.
    pub failed_cells: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite_id: String,
    pub seed: u64,
    pub rng: String,
    pub tolerance: f64,
    pub cells: Vec<CellReport>,
    pub summary: SuiteSummary,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.summary.total_failures == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("suite reports serialize")
    }
}

/// Everything shared by the cells of one suite.
struct SuiteContext {
    q: QuadratureConfig,
    rho: RealFunction,
    error: ErrorSpec,
    measure: UnitMeasure,
    power2: PowerMeasure2,
    power3: PowerMeasure3,
}

struct Job {
    theorem: TheoremId,
    sys: usize,
    function: RealFunction,
    x: f64,
    y: f64,
}

fn unit_linear() -> ChebyshevSystem {
    ChebyshevSystem::linear(Interval::unit())
}

/// `eps` for a mean-system bound on `[x, y]`; a measured model is tabulated on that interval.
pub fn pair_error_model(spec: &ErrorSpec, f: &RealFunction, sys: &ChebyshevSystem, x: f64, y: f64) -> Result<ErrorModel> {
    match *spec {
        ErrorSpec::Measured { grid } => Ok(ErrorModel::Measured(MeasuredEps::build(f, sys, Interval::new(x, y)?, grid))),
        ref other => other.build(),
    }
}

/// `eta` for a measure bound along the segment trace `f_seg` on `[0, 1]`.
pub fn segment_error_model(spec: &ErrorSpec, f_seg: &RealFunction) -> Result<ErrorModel> {
    match *spec {
        ErrorSpec::Measured { grid } => Ok(ErrorModel::Measured(MeasuredEps::build(
            f_seg,
            &unit_linear(),
            Interval::unit(),
            grid,
        ))),
        ref other => other.build(),
    }
}

impl SuiteContext {
    fn eps_on(&self, f: &RealFunction, sys: &ChebyshevSystem, x: f64, y: f64) -> Result<ErrorModel> {
        pair_error_model(&self.error, f, sys, x, y)
    }

    fn eta_on(&self, f_seg: &RealFunction) -> Result<ErrorModel> {
        segment_error_model(&self.error, f_seg)
    }

    fn evaluate(&self, job: &Job, sys: &ChebyshevSystem, ms: &MeanSystem) -> Result<BoundReport> {
        let (f, x, y, q) = (&job.function, job.x, job.y, &self.q);
        let f_seg = f.segment(x, y);
        let s = y - x;
        match job.theorem {
            TheoremId::ClassicLower => Ok(classic_bounds(f, sys, &self.rho, x, y, q)?.lower),
            TheoremId::ClassicUpper => Ok(classic_bounds(f, sys, &self.rho, x, y, q)?.upper),
            TheoremId::Thm3 => lower_bound_thm3(f, ms, sys, &self.eps_on(f, sys, x, y)?, x, y, q),
            TheoremId::Thm5 => upper_bound_thm5(f, ms, sys, &self.eps_on(f, sys, x, y)?, x, y, q),
            TheoremId::Thm4 => lower_bound_thm4(&f_seg, &self.measure, &self.eta_on(&f_seg)?, s, q),
            TheoremId::Thm6 => upper_bound_thm6(&f_seg, &self.measure, &self.eta_on(&f_seg)?, s, q),
            TheoremId::Cor2hp1 => lower_bound_cor2hp1(&f_seg, &self.eta_on(&f_seg)?, s, q),
            TheoremId::Cor4c2 => lower_bound_cor4c2(&f_seg, &self.power2, s, q),
            TheoremId::Cor6a => upper_bound_cor6a(&f_seg, &self.measure, &self.power3, s, q),
            TheoremId::Cor6b => upper_bound_cor6b(&f_seg, &self.power3, s),
        }
    }
}

/// Runs every `theorem x system x family x specimen x pair` cell.
///
/// Specimens and pairs are drawn sequentially from seeds derived from the
/// suite seed; cells are then evaluated in parallel and collected in order,
/// so the report does not depend on the worker count.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    let q = match config.quad_panels {
        Some(p) => QuadratureConfig::default().with_panels(p),
        None => QuadratureConfig::from_env()?,
    };
    q.validate()?;
    let ctx = SuiteContext {
        q,
        rho: config.rho.build(),
        error: config.error.clone(),
        measure: config.measure.build(&q)?,
        power2: PowerMeasure2::from_tuples(&config.power2)?,
        power3: PowerMeasure3::from_tuples(&config.power3)?,
    };
    let systems = config.systems.iter().map(|s| s.build()).collect::<Result<Vec<_>>>()?;
    let mean_systems = systems
        .iter()
        .map(|s| lift_weighted_system(s, &ctx.rho, &q))
        .collect::<Result<Vec<_>>>()?;

    let mut specimens = Vec::new();
    for (si, sys) in systems.iter().enumerate() {
        for (fi, family) in config.functions.iter().enumerate() {
            for k in 0..config.specimens {
                let spec_seed = derive_seed(config.seed, &[si as u64, fi as u64, k as u64]);
                let function = draw_specimen(sys, family, spec_seed)?;
                let mut r = rng(derive_seed(spec_seed, &[0x5041_4952]));
                let pairs: Vec<(f64, f64)> = (0..config.pairs).map(|_| draw_pair(&mut r, sys.domain)).collect();
                specimens.push((si, function, pairs));
            }
        }
    }
    let mut jobs = Vec::new();
    for &theorem in &config.theorems {
        for (si, function, pairs) in &specimens {
            for &(x, y) in pairs {
                jobs.push(Job {
                    theorem,
                    sys: *si,
                    function: function.clone(),
                    x,
                    y,
                });
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| HhError::input(format!("cannot start {} workers: {e}", config.workers)))?;
    let cells: Vec<CellReport> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let sys = &systems[job.sys];
                let outcome = ctx.evaluate(job, sys, &mean_systems[job.sys]);
                let mut cell = CellReport {
                    theorem: job.theorem.to_string(),
                    system: sys.name.clone(),
                    function: job.function.name().to_string(),
                    x: job.x,
                    y: job.y,
                    lhs: f64::NAN,
                    rhs_main: f64::NAN,
                    error_term: f64::NAN,
                    margin: f64::NAN,
                    error: None,
                };
                match outcome {
                    Ok(r) => {
                        cell.lhs = r.lhs;
                        cell.rhs_main = r.rhs_main;
                        cell.error_term = r.error_term;
                        cell.margin = r.margin;
                    }
                    Err(e) => cell.error = Some(e.to_string()),
                }
                cell
            })
            .collect()
    });

    Ok(SuiteReport {
        suite_id: config.suite_id.clone(),
        seed: config.seed,
        rng: RNG_ALGORITHM.to_string(),
        tolerance: config.tolerance,
        summary: summarize(&cells, config.tolerance),
        cells,
    })
}

fn summarize(cells: &[CellReport], tol: f64) -> SuiteSummary {
    let mut per_theorem: BTreeMap<String, TheoremSummary> = BTreeMap::new();
    let mut failed_cells = Vec::new();
    for (i, c) in cells.iter().enumerate() {
        let entry = per_theorem.entry(c.theorem.clone()).or_insert(TheoremSummary {
            count: 0,
            worst_margin: None,
            failures: 0,
        });
        entry.count += 1;
        if c.margin.is_finite() {
            entry.worst_margin = Some(entry.worst_margin.map_or(c.margin, |w| w.min(c.margin)));
        }
        if !(c.margin >= -tol) {
            entry.failures += 1;
            failed_cells.push(i);
        }
    }
    SuiteSummary {
        per_theorem,
        total_cells: cells.len(),
        total_failures: failed_cells.len(),
        failed_cells,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residual::jensen_sup;

    fn lin() -> ChebyshevSystem {
        ChebyshevSystem::linear(Interval::new(-1.0, 2.0).unwrap())
    }

    fn expsys() -> ChebyshevSystem {
        ChebyshevSystem::new(
            "exp",
            RealFunction::constant(1.0),
            RealFunction::new("exp", vec![], f64::exp),
            Interval::new(-1.0, 2.0).unwrap(),
        )
    }

    #[test]
    fn profile_examples() {
        let sq = ConvexProfile::Quadratic { a: 1.0, b: 0.0, c: 0.0 };
        let f = omega_convex_from(&lin(), &sq);
        assert!((f.eval(0.7) - 0.49).abs() < 1e-15);
        let f = omega_convex_from(&expsys(), &sq);
        assert!((f.eval(0.3) - 0.6f64.exp()).abs() < 1e-13);
        assert!(is_omega_convex(&f, &expsys(), CONFIRM_GRID).passed);
        let vee = ConvexProfile::MaxAffine(vec![(-1.0, 1.0), (1.0, 0.0)]);
        let f = omega_convex_from(&lin(), &vee);
        assert_eq!(f.eval(0.2), 0.8);
        assert!(is_omega_convex(&f, &lin(), CONFIRM_GRID).passed);
    }

    #[test]
    fn generated_specimens_are_confirmed() {
        for fam in [ProfileFamily::Quadratic, ProfileFamily::MaxAffine(3), ProfileFamily::SoftMax(3)] {
            for seed in 0..5 {
                let s = gen_omega_convex(&expsys(), fam, seed).unwrap();
                assert!(is_omega_convex(&s.function, &expsys(), CONFIRM_GRID).passed);
            }
        }
    }

    #[test]
    fn perturbation_examples() {
        let f0 = RealFunction::poly(vec![0.0, 0.0, 1.0]);
        let same = gen_perturbed(&f0, 0.0, 7).unwrap();
        assert_eq!(same.eval(0.3), f0.eval(0.3));
        let f = gen_perturbed(&f0, 0.01, 7).unwrap();
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            assert!((f.eval(t) - f0.eval(t)).abs() <= 0.01 + 1e-15);
        }
        assert!(jensen_sup(&f.segment(0.0, 1.0), 201) <= 0.02);
        let g = gen_perturbed(&f0, 0.01, 7).unwrap();
        assert_eq!(f.eval(0.123), g.eval(0.123));
        assert!(gen_perturbed(&f0, -1.0, 7).is_err());
    }

    #[test]
    fn family_round_trip() {
        for s in ["convex:quadratic", "convex:maxaffine:3", "perturbed:softmax:2:0.01", "span", "fixed:poly:0,0,1"] {
            let f: FamilySpec = s.parse().unwrap();
            assert_eq!(f.to_string(), s);
        }
        assert!("convex:cubic".parse::<FamilySpec>().is_err());
        assert!("perturbed:quadratic:-1".parse::<FamilySpec>().is_err());
    }

    #[test]
    fn seeds_are_distinct() {
        assert_ne!(derive_seed(1, &[0, 0, 1]), derive_seed(1, &[0, 1, 0]));
        assert_eq!(derive_seed(5, &[2]), derive_seed(5, &[2]));
    }
}
