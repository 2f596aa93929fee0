//! The BRST generator `Q = Σ Q_n` by homological perturbation.
//!
//! `Q_0 = Σ_g η_g δ(g)` and `Q_{n+1} = -s(½{R_n, R_n})` with
//! `R_n = Σ_{i<=n} Q_i`. The filtration is by ghost degree: `{Q_0, ·} - δ`
//! strictly raises it and `s` preserves it, which is what makes the
//! residual climb by at least one step per order.

use std::sync::Arc;

use num_bigint::BigInt;
use serde::Serialize;

use crate::algebra::{bracket, SuperPolynomial};
use crate::error::{Error, Result};
use crate::homotopy::{build_homotopy, HomotopyOperator, PivotOrder};
use crate::ideal::IdealPresentation;
use crate::koszul_tate::{build_resolution, ResolutionWindow, TateResolution};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BrstStatus {
    /// Still below the order limit with a nonzero residual.
    Open,
    /// `{R, R} = 0` exactly.
    Terminal,
    /// Stopped at the order limit; terms of ghost degree below `level` are
    /// final.
    Truncated { level: i32 },
    /// The homotopy could not be solved beyond `level`; terms of ghost
    /// degree below it are final.
    WindowExhausted { level: i32 },
}

/// Inductive hypotheses at the current order, checked on terms of ghost
/// degree below the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Certificate {
    /// `{R_n, R_n} ∈ 𝓕^{n+2}`.
    pub residual: bool,
    /// `δ{R_n, R_n} ∈ 𝓕^{n+3}`.
    pub delta_residual: bool,
}

#[derive(Debug, Clone)]
pub struct BrstState {
    pub generator: SuperPolynomial,
    pub terms: Vec<SuperPolynomial>,
    pub order: usize,
    /// `½{R_n, R_n}`.
    pub residual: SuperPolynomial,
    /// Smallest ghost degree in the residual, `None` once it vanishes.
    pub residual_level: Option<i32>,
    /// Ghost degree from which the construction is no longer reliable
    /// because the homotopy ran out of solvable slices.
    pub horizon: Option<i32>,
    pub certificate: Certificate,
    pub status: BrstStatus,
}

impl BrstState {
    pub fn is_terminal(&self) -> bool {
        self.status == BrstStatus::Terminal
    }

    /// Terms of the generator with ghost degree below this bound agree with
    /// every later order.
    pub fn exact_below(&self) -> i32 {
        if self.is_terminal() {
            return i32::MAX;
        }
        let level = self.residual_level.unwrap_or(i32::MAX);
        level.min(self.horizon.unwrap_or(i32::MAX))
    }
}

fn below(f: &SuperPolynomial, horizon: Option<i32>) -> SuperPolynomial {
    match horizon {
        None => f.clone(),
        Some(h) => {
            let t = f.table().clone();
            f.filter(|m| m.grading(&t).ghost < h)
        }
    }
}

fn half() -> Rational {
    Rational::new(BigInt::from(1), BigInt::from(2))
}

fn certify(
    res: &TateResolution,
    order: usize,
    residual: &SuperPolynomial,
    horizon: Option<i32>,
) -> Result<Certificate> {
    let n = order as i32;
    let visible = below(residual, horizon);
    if let Some(found) = visible.min_ghost_degree() {
        if found < n + 2 {
            return Err(Error::FiltrationViolation {
                order,
                what: "{R, R}",
                found,
                expected: n + 2,
            });
        }
    }
    let d = below(&res.delta(residual), horizon);
    if let Some(found) = d.min_ghost_degree() {
        if found < n + 3 {
            return Err(Error::FiltrationViolation {
                order,
                what: "δ{R, R}",
                found,
                expected: n + 3,
            });
        }
    }
    Ok(Certificate { residual: true, delta_residual: true })
}

fn state(
    res: &TateResolution,
    generator: SuperPolynomial,
    terms: Vec<SuperPolynomial>,
    horizon: Option<i32>,
) -> Result<BrstState> {
    let order = terms.len() - 1;
    let residual = bracket(&generator, &generator).scale(&half());
    let certificate = certify(res, order, &residual, horizon)?;
    let status = if residual.is_zero() { BrstStatus::Terminal } else { BrstStatus::Open };
    Ok(BrstState {
        generator,
        terms,
        order,
        residual_level: residual.min_ghost_degree(),
        residual,
        horizon,
        certificate,
        status,
    })
}

/// `Q_0 = Σ_g η_g δ(g)` over all resolution generators. Refuses ideals that
/// are not first class.
pub fn initial_generator(res: &TateResolution) -> Result<BrstState> {
    res.ideal().is_first_class().into_result()?;
    let table = res.table();
    let mut q0 = SuperPolynomial::zero(table);
    for g in res.generators() {
        let ghost = table.get(g.ghost);
        if !matches!(ghost.kind, crate::algebra::VarKind::Ghost { dual } if dual == g.var) {
            return Err(Error::MissingDualGhost(g.name.clone()));
        }
        q0 = &q0 + &(&SuperPolynomial::var(table, g.ghost) * &g.delta);
    }
    state(res, q0.clone(), vec![q0], None)
}

/// One step `R_{n+1} = R_n - s(½{R_n, R_n})`, with both filtration
/// certificates re-verified.
pub fn perturbation_step(st: &BrstState, s: &HomotopyOperator) -> Result<BrstState> {
    if st.is_terminal() {
        return Ok(st.clone());
    }
    let res = s.resolution();
    let image = s.apply_partial(&st.residual);
    let mut horizon = st.horizon;
    if let Some(level) = image.skipped.min_ghost_degree() {
        horizon = Some(horizon.map_or(level, |h| h.min(level)));
    }
    let q = -&image.value;
    let generator = &st.generator + &q;
    let mut terms = st.terms.clone();
    terms.push(q);
    let mut next = state(res, generator, terms, horizon)?;
    if let (Some(h), BrstStatus::Open) = (next.horizon, next.status) {
        if next.residual_level.is_some_and(|l| l >= h) {
            next.status = BrstStatus::WindowExhausted { level: h };
        }
    }
    Ok(next)
}

/// Iterates until the residual vanishes, the order reaches `max_order`, or
/// the homotopy runs out of solvable slices.
pub fn build_generator(
    res: &TateResolution,
    s: &HomotopyOperator,
    max_order: usize,
) -> Result<BrstState> {
    build_generator_until(res, s, max_order, i32::MAX)
}

/// Like [`build_generator`], but also stops once every term of ghost degree
/// below `level` is final.
pub fn build_generator_until(
    res: &TateResolution,
    s: &HomotopyOperator,
    max_order: usize,
    level: i32,
) -> Result<BrstState> {
    let mut st = initial_generator(res)?;
    while st.status == BrstStatus::Open && st.order < max_order && st.exact_below() < level {
        st = perturbation_step(&st, s)?;
    }
    if st.status == BrstStatus::Open {
        st.status = BrstStatus::Truncated { level: st.exact_below() };
    }
    Ok(st)
}

/// Everything the later stages need, built together.
#[derive(Debug)]
pub struct BrstBuild {
    pub resolution: Arc<TateResolution>,
    pub homotopy: HomotopyOperator,
    pub state: BrstState,
    pub rounds: usize,
}

/// Builds resolution, homotopy and generator, enlarging the resolution
/// window and starting over while the homotopy runs out of room before the
/// generator is final below ghost degree `level`, at most `max_rounds` times.
pub fn build_generator_adaptive(
    ideal: &IdealPresentation,
    window: ResolutionWindow,
    order: PivotOrder,
    max_order: usize,
    level: i32,
    max_rounds: usize,
) -> Result<BrstBuild> {
    let mut window = window;
    let mut rounds = 0;
    loop {
        rounds += 1;
        let resolution = Arc::new(build_resolution(ideal, window)?);
        let homotopy = build_homotopy(resolution.clone(), order);
        let state = build_generator_until(&resolution, &homotopy, max_order, level)?;
        let exhausted = matches!(state.status, BrstStatus::WindowExhausted { .. })
            && state.exact_below() < level;
        if !exhausted || rounds > max_rounds {
            return Ok(BrstBuild { resolution, homotopy, state, rounds });
        }
        let err = homotopy.apply_partial(&state.residual).error;
        window = match err {
            Some(Error::Unsolvable { degree, weight }) => ResolutionWindow {
                max_weight: window.max_weight.max(weight + 1),
                depth: window.depth.max(1 - degree),
            },
            _ => ResolutionWindow { max_weight: window.max_weight + 1, depth: window.depth + 1 },
        };
    }
}

/// `∂a = {R, a}`.
pub fn brst_differential(st: &BrstState, a: &SuperPolynomial) -> SuperPolynomial {
    bracket(&st.generator, a)
}

/// Every `Q_n` is odd of total degree 1 and `Q_n ∈ 𝓕^{n+1}` for `n >= 1`.
pub fn terms_well_graded(st: &BrstState) -> bool {
    st.terms.iter().enumerate().all(|(n, q)| {
        q.terms().all(|(m, _)| {
            let g = m.grading(q.table());
            m.is_odd() && g.total() == 1 && (n == 0 || g.ghost >= n as i32 + 1) && g.weight == 2
        })
    })
}

/// The part of `{Q_0, x}` that preserves ghost degree equals `δx`.
pub fn koszul_part_matches(res: &TateResolution, st: &BrstState, x: &SuperPolynomial) -> bool {
    let t = res.table().clone();
    let ghost = |m: &crate::algebra::Monomial| m.grading(&t).ghost;
    let mut degrees: Vec<i32> = x.gradings().map(|g| g.ghost).collect();
    degrees.sort_unstable();
    degrees.dedup();
    let mut preserved = SuperPolynomial::zero(&t);
    for r in degrees {
        let part = x.filter(|m| ghost(m) == r);
        preserved = &preserved + &bracket(&st.terms[0], &part).filter(|m| ghost(m) == r);
    }
    preserved == res.delta(x)
}
