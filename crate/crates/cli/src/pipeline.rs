//! Task orchestration and the run report.

use std::collections::BTreeMap;
use std::time::Instant;

use brstkit_core::brst::{build_generator_adaptive, koszul_part_matches, terms_well_graded, BrstBuild, BrstStatus, Certificate};
use brstkit_core::cohomology::{fit_resolution, BrstComplex, CohomologyReport, CohomologyWindow, E1Slice, H0Comparison};
use brstkit_core::homotopy::PivotOrder;
use brstkit_core::ideal::{groebner_basis, IdealPresentation, InvariantBasis};
use brstkit_core::koszul_tate::{build_resolution, ResolutionGenerator, ResolutionStatus, ResolutionWindow};
use brstkit_core::rinehart::{redundancy_reduced, E1Comparison, RinehartComplex};
use brstkit_core::{poisson_bracket, Error as CoreError, Rational, SuperPolynomial, VarId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::problem::{Problem, ProblemSpec, Task, Window};

pub const SCHEMA: &str = "brstkit-report/1";

/// Adaptive window enlargements allowed per BRST build.
const MAX_ROUNDS: usize = 4;

#[derive(Debug, Clone, Serialize)]
pub struct StructureEntry {
    pub i: usize,
    pub j: usize,
    pub coefficients: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FirstClassOut {
    pub first_class: bool,
    pub groebner_basis: Vec<String>,
    pub structure: Vec<StructureEntry>,
    /// `{g_i, g_j}` and its nonzero normal form.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub i: usize,
    pub j: usize,
    pub bracket: String,
    pub remainder: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolutionOut {
    pub window: ResolutionWindow,
    pub status: ResolutionStatus,
    pub generators: Vec<ResolutionGenerator>,
    pub delta_squared_vanishes: bool,
    pub images_are_cycles: bool,
    /// `dim (P/I)_w` for `w = 0..=D`.
    pub quotient_dims: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BrstOut {
    pub resolution_window: ResolutionWindow,
    pub resolution_generators: usize,
    pub rounds: usize,
    pub status: BrstStatus,
    pub order: usize,
    /// Terms of ghost degree below this are final; absent when terminal.
    pub exact_below: Option<i32>,
    pub residual_level: Option<i32>,
    pub certificate: Certificate,
    pub terms_well_graded: bool,
    pub koszul_part_matches: bool,
    pub generator: String,
    pub terms: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CohomologyOut {
    #[serde(flatten)]
    pub report: CohomologyReport,
    pub squares_to_zero: bool,
    pub e1: Vec<E1Slice>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantsOut {
    pub dims: Vec<usize>,
    pub basis: Vec<Vec<String>>,
    /// Against `H⁰`, when cohomology ran.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<Vec<H0Comparison>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RinehartOut {
    pub syzygies: usize,
    pub squares_to_zero: bool,
    /// `(arity, weight, dim H)`.
    pub cohomology: Vec<(usize, i32, usize)>,
    pub invariant_dims: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e1: Option<E1Comparison>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RedundancyOut {
    pub kept: Vec<usize>,
    pub dropped: Vec<usize>,
    pub h0_full: Vec<usize>,
    pub h0_reduced: Vec<usize>,
    pub equal: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomsOut {
    pub seed: u64,
    pub triples: usize,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Input,
    Internal,
}

#[derive(Debug, Clone, Serialize)]
pub struct TaskError {
    pub task: String,
    pub kind: ErrorKind,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub problem: ProblemSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_class: Option<FirstClassOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<ResolutionOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub brst: Option<BrstOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cohomology: Option<CohomologyOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariants: Option<InvariantsOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rinehart: Option<RinehartOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub redundancy_check: Option<RedundancyOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bracket_axioms: Option<AxiomsOut>,
    /// Checks that came out false where the theory says true.
    pub falsifications: Vec<String>,
    pub errors: Vec<TaskError>,
    pub timings_ms: BTreeMap<String, u64>,
}

/// Process exit status for a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success = 0,
    InputError = 1,
    Falsified = 2,
    InternalError = 3,
}

impl RunReport {
    pub fn outcome(&self) -> Outcome {
        if self.errors.iter().any(|e| e.kind == ErrorKind::Input) {
            Outcome::InputError
        } else if !self.falsifications.is_empty() {
            Outcome::Falsified
        } else if !self.errors.is_empty() {
            Outcome::InternalError
        } else {
            Outcome::Success
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

fn strings(v: &[SuperPolynomial]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn classify(e: &CoreError) -> ErrorKind {
    match e {
        CoreError::NotFirstClass { .. }
        | CoreError::NotHomogeneous(_)
        | CoreError::NotBaseEven(_)
        | CoreError::Parse { .. }
        | CoreError::UnknownVariable { .. }
        | CoreError::DuplicateVariable(_)
        | CoreError::InvalidPairing(..) => ErrorKind::Input,
        _ => ErrorKind::Internal,
    }
}

struct Runner<'p> {
    problem: &'p Problem,
    window: Window,
    report: RunReport,
}

impl Runner<'_> {
    fn timed<T>(&mut self, name: &str, f: impl FnOnce(&mut Self) -> Result<T, CoreError>) -> Option<T> {
        let start = Instant::now();
        let out = f(self);
        self.report.timings_ms.insert(name.to_string(), start.elapsed().as_millis() as u64);
        match out {
            Ok(v) => Some(v),
            Err(e) => {
                let kind = match e {
                    CoreError::FiltrationViolation { .. } | CoreError::NotNilpotent { .. } => {
                        self.report.falsifications.push(format!("{name}: {e}"));
                        return None;
                    }
                    _ => classify(&e),
                };
                self.report.errors.push(TaskError { task: name.to_string(), kind, message: e.to_string() });
                None
            }
        }
    }

    fn falsified(&mut self, what: String) {
        self.report.falsifications.push(what);
    }

    fn wants(&self, t: Task) -> bool {
        self.problem.spec.tasks.contains(&t)
    }

    fn cohomology_window(&self) -> CohomologyWindow {
        CohomologyWindow { max_weight: self.window.max_weight, ghost_cap: self.window.ghost_cap }
    }

    fn resolution_window(&self) -> ResolutionWindow {
        ResolutionWindow { max_weight: self.window.max_weight, depth: self.window.depth }
    }

    /// Resolution fitted to the cohomology window, then the generator
    /// exact far enough for `H^{-1}`.
    fn build(&self, ideal: &IdealPresentation, w: CohomologyWindow) -> Result<BrstBuild, CoreError> {
        let start = ResolutionWindow { max_weight: w.max_weight, depth: self.window.depth };
        let res = fit_resolution(ideal, start, w)?;
        build_generator_adaptive(
            ideal,
            res.window(),
            PivotOrder::Forward,
            self.window.max_order,
            w.ghost_cap + 3,
            MAX_ROUNDS,
        )
    }
}

/// Cohomology totals that the ghost cap computes exactly.
fn totals(w: CohomologyWindow) -> std::ops::RangeInclusive<i32> {
    -1..=(w.ghost_cap - 1).min(1)
}

fn h0_dims(b: &BrstBuild, w: CohomologyWindow) -> Result<Vec<usize>, CoreError> {
    let x = BrstComplex::new(&b.resolution, &b.state, w);
    (0..=w.max_weight).map(|d| x.cohomology_slice(0, d).map(|s| s.dimension)).collect()
}

/// Runs the requested tasks in dependency order. Later tasks still run when
/// an unrelated earlier one fails.
pub fn run(problem: &Problem, seed: Option<u64>) -> RunReport {
    let mut r = Runner {
        problem,
        window: problem.spec.window,
        report: RunReport {
            schema: SCHEMA,
            problem: problem.spec.clone(),
            first_class: None,
            resolution: None,
            brst: None,
            cohomology: None,
            invariants: None,
            rinehart: None,
            redundancy_check: None,
            bracket_axioms: None,
            falsifications: Vec::new(),
            errors: Vec::new(),
            timings_ms: BTreeMap::new(),
        },
    };
    if let Some(seed) = seed {
        r.report.bracket_axioms = Some(bracket_axioms(problem, seed));
        if r.report.bracket_axioms.as_ref().is_some_and(|a| !a.holds) {
            r.falsified("bracket axioms fail on random triples".into());
        }
    }

    let Some(ideal) = r.timed("groebner", |r| groebner_basis(&r.problem.table, &r.problem.constraints)) else {
        return r.report;
    };

    let fc = ideal.is_first_class();
    let first_class = fc.first_class;
    if r.wants(Task::FirstClass) || !first_class {
        r.report.first_class = Some(FirstClassOut {
            first_class,
            groebner_basis: strings(ideal.groebner()),
            structure: fc
                .structure
                .iter()
                .map(|s| StructureEntry { i: s.i, j: s.j, coefficients: strings(&s.coefficients) })
                .collect(),
            witness: fc.witness.as_ref().map(|w| Witness {
                i: w.i,
                j: w.j,
                bracket: w.bracket.to_string(),
                remainder: w.remainder.to_string(),
            }),
        });
    }

    if r.wants(Task::Resolution) {
        let out = r.timed("resolution", |r| {
            let res = build_resolution(&ideal, r.resolution_window())?;
            Ok(ResolutionOut {
                window: res.window(),
                status: res.status().clone(),
                generators: res.generators().to_vec(),
                delta_squared_vanishes: res.delta_squared_vanishes(),
                images_are_cycles: res.images_are_cycles(),
                quotient_dims: (0..=r.window.max_weight).map(|w| res.quotient_dimension(w)).collect(),
            })
        });
        if let Some(o) = &out {
            if !o.delta_squared_vanishes || !o.images_are_cycles {
                r.falsified("resolution: δ² ≠ 0".into());
            }
            if let ResolutionStatus::Incomplete { degree, weight, dimension } = o.status {
                r.falsified(format!("resolution: homology of dimension {dimension} left at degree {degree}, weight {weight}"));
            }
        }
        r.report.resolution = out;
    }

    let needs_first_class = [Task::Brst, Task::Cohomology, Task::Invariants, Task::Rinehart, Task::RedundancyCheck];
    if !first_class {
        let message = fc.into_result().expect_err("not first class").to_string();
        let refused: Vec<Task> = needs_first_class.into_iter().filter(|&t| r.wants(t)).collect();
        for t in refused {
            r.report.errors.push(TaskError { task: t.name().into(), kind: ErrorKind::Input, message: message.clone() });
        }
        return r.report;
    }

    let cw = r.cohomology_window();
    let build = if r.wants(Task::Brst) || r.wants(Task::Cohomology) || r.wants(Task::Rinehart) {
        r.timed("brst", |r| r.build(&ideal, cw))
    } else {
        None
    };
    if let (true, Some(b)) = (r.wants(Task::Brst), &build) {
        let st = &b.state;
        let t = b.resolution.table();
        let probe = t
            .ids()
            .filter(|&v| !t.get(v).is_ghost())
            .fold(SuperPolynomial::zero(t), |acc, v| &acc + &SuperPolynomial::var(t, v));
        let out = BrstOut {
            resolution_window: b.resolution.window(),
            resolution_generators: b.resolution.generators().len(),
            rounds: b.rounds,
            status: st.status,
            order: st.order,
            exact_below: (st.exact_below() != i32::MAX).then(|| st.exact_below()),
            residual_level: st.residual_level,
            certificate: st.certificate,
            terms_well_graded: terms_well_graded(st),
            koszul_part_matches: koszul_part_matches(&b.resolution, st, &probe),
            generator: st.generator.to_string(),
            terms: strings(&st.terms),
        };
        if !out.terms_well_graded || !out.koszul_part_matches {
            r.falsified("brst: generator terms violate the grading or Koszul consistency".into());
        }
        r.report.brst = Some(out);
    }

    let mut comparison_source: Option<Vec<usize>> = None;
    if let (true, Some(b)) = (r.wants(Task::Cohomology), &build) {
        let out = r.timed("cohomology", |_| {
            let x = BrstComplex::new(&b.resolution, &b.state, cw);
            let report = x.report(totals(cw), Some(&b.homotopy))?;
            let mut squares = true;
            for total in totals(cw).map(|t| t - 1) {
                for w in 0..=cw.max_weight {
                    squares &= x.squares_to_zero(total, w)?;
                }
            }
            let e1 = totals(cw)
                .flat_map(|t| (0..=cw.max_weight).map(move |w| (t, w)))
                .map(|(t, w)| x.e1_slice(t, w))
                .collect();
            Ok(CohomologyOut { report, squares_to_zero: squares, e1 })
        });
        if let Some(o) = &out {
            if !o.squares_to_zero {
                r.falsified("cohomology: ∂² ≠ 0".into());
            }
            for s in o.report.slices.iter().filter(|s| s.total < 0 && s.dimension > 0) {
                r.falsified(format!("cohomology: H^{} in weight {} has dimension {}", s.total, s.weight, s.dimension));
            }
            if o.report.no_ghost.as_ref().is_some_and(|n| !n.holds) {
                r.falsified("cohomology: an H⁰ class has no ghost-free representative".into());
            }
            for e in o.e1.iter().filter(|e| e.dimension != e.expected) {
                r.falsified(format!(
                    "cohomology: E1 in total {} weight {} has dimension {}, expected {}",
                    e.total, e.weight, e.dimension, e.expected
                ));
            }
            comparison_source =
                Some(o.report.slices.iter().filter(|s| s.total == 0).map(|s| s.dimension).collect());
        }
        r.report.cohomology = out;
    }

    let mut invariant_basis: Option<InvariantBasis> = None;
    if r.wants(Task::Invariants) {
        let out = r.timed("invariants", |r| {
            let inv = ideal.invariant_basis(r.window.max_weight.max(0) as u32)?;
            let comparison = match (&build, comparison_source.is_some()) {
                (Some(b), true) => {
                    Some(BrstComplex::new(&b.resolution, &b.state, cw).compare_h0(&inv, cw.max_weight)?)
                }
                _ => None,
            };
            let out = InvariantsOut {
                dims: inv.dims(),
                basis: inv.by_degree.iter().map(|d| d.iter().map(|q| q.representative().to_string()).collect()).collect(),
                comparison,
            };
            invariant_basis = Some(inv);
            Ok(out)
        });
        if let Some(c) = out.as_ref().and_then(|o| o.comparison.as_ref()) {
            for row in c.iter().filter(|row| !row.equal) {
                r.falsified(format!(
                    "invariants: H⁰ in weight {} has dimension {}, invariants {}",
                    row.weight, row.brst_dimension, row.invariant_dimension
                ));
            }
        }
        r.report.invariants = out;
    }

    if r.wants(Task::Rinehart) {
        let out = r.timed("rinehart", |_| {
            let rc = RinehartComplex::new(&ideal, cw.max_weight + 4)?;
            let mut squares = true;
            let mut cohomology = Vec::new();
            let mut invariant_dims = Vec::new();
            for w in 0..=cw.max_weight {
                squares &= rc.squares_to_zero(0, w)? && rc.squares_to_zero(1, w)?;
                for arity in 0..=1 {
                    cohomology.push((arity, w, rc.cohomology_dimension(arity, w)?));
                }
                invariant_dims.push(rc.invariants(w)?.len());
            }
            let e1 = match &build {
                Some(b) if cw.ghost_cap >= 2 => {
                    Some(rc.compare_e1(&BrstComplex::new(&b.resolution, &b.state, cw), cw.max_weight)?)
                }
                _ => None,
            };
            Ok(RinehartOut { syzygies: rc.syzygies().len(), squares_to_zero: squares, cohomology, invariant_dims, e1 })
        });
        if let Some(o) = &out {
            if !o.squares_to_zero {
                r.falsified("rinehart: d² ≠ 0".into());
            }
            if let Some(inv) = &invariant_basis {
                if inv.dims() != o.invariant_dims {
                    r.falsified(format!(
                        "rinehart: arity-0 cocycles {:?} differ from invariants {:?}",
                        o.invariant_dims,
                        inv.dims()
                    ));
                }
            }
            if let Some(e) = o.e1.as_ref().filter(|e| e.identification_claimed) {
                if !e.dimensions_match || !e.d1_matches {
                    r.falsified("rinehart: E1 comparison with the BRST complex fails".into());
                }
            }
        }
        r.report.rinehart = out;
    }

    if r.wants(Task::RedundancyCheck) {
        let h0w = CohomologyWindow { max_weight: cw.max_weight, ghost_cap: 1 };
        let out = r.timed("redundancy_check", |r| {
            let (reduced, kept) = redundancy_reduced(&ideal)?;
            let dropped: Vec<usize> = (0..ideal.generators().len()).filter(|k| !kept.contains(k)).collect();
            let h0_full = h0_dims(&r.build(&ideal, h0w)?, h0w)?;
            let h0_reduced =
                if dropped.is_empty() { h0_full.clone() } else { h0_dims(&r.build(&reduced, h0w)?, h0w)? };
            Ok(RedundancyOut { equal: h0_full == h0_reduced, kept, dropped, h0_full, h0_reduced })
        });
        if let Some(o) = out.as_ref().filter(|o| !o.equal) {
            r.falsified(format!(
                "redundancy_check: H⁰ {:?} changes to {:?} without the redundant constraints",
                o.h0_full, o.h0_reduced
            ));
        }
        r.report.redundancy_check = out;
    }
    r.report
}

/// Graded antisymmetry, Jacobi and Leibniz on random triples over the
/// problem's variables.
fn bracket_axioms(problem: &Problem, seed: u64) -> AxiomsOut {
    const TRIPLES: usize = 100;
    let t = &problem.table;
    let vars: Vec<VarId> = t.ids().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random = |rng: &mut ChaCha8Rng| {
        let mut f = SuperPolynomial::zero(t);
        if vars.is_empty() {
            return SuperPolynomial::constant(t, Rational::from_integer(rng.gen_range(-3..=3).into()));
        }
        for _ in 0..3 {
            let mut m = SuperPolynomial::constant(t, Rational::new(rng.gen_range(-4..=4).into(), rng.gen_range(1..=3).into()));
            for _ in 0..rng.gen_range(0..=3) {
                m = &m * &SuperPolynomial::var(t, vars[rng.gen_range(0..vars.len())]);
            }
            f = &f + &m;
        }
        f
    };
    let sign = |a: &SuperPolynomial, b: &SuperPolynomial| {
        if a.parity() == Some(true) && b.parity() == Some(true) {
            -Rational::from_integer(1.into())
        } else {
            Rational::from_integer(1.into())
        }
    };
    let br = |a: &SuperPolynomial, b: &SuperPolynomial| poisson_bracket(a, b).expect("same table");
    let mut holds = true;
    let mut done = 0;
    while done < TRIPLES {
        let [a, b, c] = [random(&mut rng), random(&mut rng), random(&mut rng)];
        if [&a, &b, &c].iter().any(|f| f.parity().is_none()) {
            continue;
        }
        done += 1;
        let s = sign(&a, &b);
        holds &= br(&a, &b) == br(&b, &a).scale(&-s.clone());
        holds &= br(&a, &br(&b, &c)) == &br(&br(&a, &b), &c) + &br(&b, &br(&a, &c)).scale(&s);
        holds &= br(&a, &(&b * &c)) == &(&br(&a, &b) * &c) + &(&b * &br(&a, &c)).scale(&s);
    }
    AxiomsOut { seed, triples: TRIPLES, holds }
}
