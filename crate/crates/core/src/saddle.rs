//! Exact saddle points of bilinear zero-sum games from a
//! good-enough-response oracle.
//!
//! The max-player's strategy set may be huge; all the solver needs is an
//! oracle that, for any `y` in the (anchored) min-player polytope `Y`,
//! returns some `x` with `x^T A y >= 0` together with the row `x^T A`.
//! The solver runs the ellipsoid method on the deliberately infeasible
//! program `(D) = {y' in cone(Y) : row . y' <= -1 for every response
//! row}`, harvesting response rows as cutting planes, then solves the
//! compressed program over the convex hull of the collected rows and
//! verifies the result exactly. Verification failures escalate the
//! ellipsoid parameters and rerun; final correctness rests only on the
//! exact checks.

use crate::arith::{EncodingLength, Rat, RatMat, RatVec};
use crate::ellipsoid::{
    certify_empty_or_point, EllipsoidConfig, EllipsoidOutcome, EllipsoidTranscript, OracleFailure,
};
use crate::lp::{LpError, LpOutcome, LpProblem};
use crate::polytope::{homogenize, HPolytope, PolytopeError, SeparationResult};

use std::collections::HashMap;

#[derive(Debug, thiserror::Error)]
pub enum SaddleError {
    #[error("GER contract violation: response row evaluates to {value} < 0 at the queried point")]
    GerContractViolation {
        y: RatVec,
        row: RatVec,
        value: Rat,
    },
    #[error("GER response encoding length {got} exceeds the declared bound {bound}")]
    ResponseEncodingExceeded {
        got: EncodingLength,
        bound: EncodingLength,
    },
    #[error("anchor coordinate is not fixed to 1 on Y")]
    AnchorNotFixed,
    #[error("verification still failing after {escalations} parameter escalations")]
    VerificationFailedAfterMaxEscalations { escalations: u32 },
    #[error(transparent)]
    Ellipsoid(#[from] crate::ellipsoid::EllipsoidError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("oracle failure: {0}")]
    Oracle(#[source] Box<dyn std::error::Error + Send + Sync>),
    #[error("internal invariant violation: {0}")]
    Internal(String),
}

/// One oracle answer: an opaque strategy descriptor plus the row
/// `x^T A` it induces.
#[derive(Debug, Clone)]
pub struct GerResponse<H> {
    pub handle: H,
    pub row: RatVec,
}

/// Good-enough-response oracle: for `y` in the anchored `Y`, return a
/// strategy whose row satisfies `row . y >= 0`.
pub trait GerOracle {
    type Handle: Clone + std::fmt::Debug;

    fn respond(
        &mut self,
        y: &RatVec,
    ) -> Result<GerResponse<Self::Handle>, Box<dyn std::error::Error + Send + Sync>>;

    /// Declared bound on the encoding length of any response row.
    fn encoding_bound(&self) -> EncodingLength;
}

/// The min-player domain: the anchored polytope plus an exact linear
/// minimization oracle over it.
pub trait YDomain {
    fn polytope(&self) -> &HPolytope;
    fn anchor(&self) -> usize;
    /// Exact `min_{y in Y} r . y` with a vertex witness.
    fn minimize(&self, r: &RatVec) -> Result<(Rat, RatVec), SaddleError>;
}

/// Plain H-polytope domain. Minimization enumerates vertices at small
/// dimension and otherwise solves one LP per query.
pub struct PolytopeY {
    poly: HPolytope,
    anchor: usize,
    vertices: Option<Vec<RatVec>>,
}

impl PolytopeY {
    pub fn new(poly: HPolytope, anchor: usize) -> Result<Self, SaddleError> {
        let anchor_obj = RatVec::unit(poly.dim(), anchor);
        for sense in [crate::lp::LpSense::Min, crate::lp::LpSense::Max] {
            match poly.to_lp_problem().solve(&anchor_obj, sense)? {
                LpOutcome::Optimal { value, .. } if value == Rat::one() => {}
                _ => return Err(SaddleError::AnchorNotFixed),
            }
        }
        let vertices = poly.enumerate_vertices().ok();
        Ok(PolytopeY {
            poly,
            anchor,
            vertices,
        })
    }

    pub fn vertices(&self) -> Option<&[RatVec]> {
        self.vertices.as_deref()
    }
}

impl YDomain for PolytopeY {
    fn polytope(&self) -> &HPolytope {
        &self.poly
    }

    fn anchor(&self) -> usize {
        self.anchor
    }

    fn minimize(&self, r: &RatVec) -> Result<(Rat, RatVec), SaddleError> {
        if let Some(vertices) = &self.vertices {
            let mut best: Option<(Rat, &RatVec)> = None;
            for v in vertices {
                let val = r.dot(v);
                if best.as_ref().map_or(true, |(b, _)| val < *b) {
                    best = Some((val, v));
                }
            }
            let (val, v) = best.ok_or_else(|| {
                SaddleError::Internal("minimization over an empty vertex set".to_string())
            })?;
            return Ok((val, v.clone()));
        }
        match self.poly.to_lp_problem().minimize(r)? {
            LpOutcome::Optimal { point, value, .. } => Ok((value, point)),
            LpOutcome::Infeasible { .. } => Err(SaddleError::Internal(
                "Y is empty during minimization".to_string(),
            )),
            LpOutcome::Unbounded { .. } => Err(SaddleError::Internal(
                "Y is unbounded during minimization".to_string(),
            )),
        }
    }
}

/// Augments `A` so the game value shifts to zero: both players carry a
/// trailing 1 and the bilinear form becomes `x^T A y - opt`.
pub fn shift_to_zero(a: &RatMat, opt: &Rat) -> RatMat {
    let mut out = RatMat::zeros(a.rows() + 1, a.cols() + 1);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            *out.get_mut(i, j) = a.get(i, j).clone();
        }
    }
    *out.get_mut(a.rows(), a.cols()) = -opt;
    out
}

/// Algorithm-1 style combined separation oracle for `(D)`: a cone
/// separator first, the GER oracle on rescaled interior points second.
/// Returns the cutting hyperplane `(normal, offset)` and the response
/// when one was produced. At the cone apex the constant row `0 <= -1`
/// comes back, witnessing that the origin never satisfies `(D)`.
pub fn combined_oracle<O: GerOracle>(
    ger: &mut O,
    cone: &HPolytope,
    anchor: usize,
    y_prime: &RatVec,
) -> Result<(RatVec, Rat, Option<GerResponse<O::Handle>>), SaddleError> {
    match cone.separate(y_prime)? {
        SeparationResult::Violated { normal, offset } => Ok((normal, offset, None)),
        SeparationResult::Inside => {
            let alpha = &y_prime[anchor];
            if alpha.is_zero() {
                debug_assert!(y_prime.is_zero(), "bounded base admits only the apex at t = 0");
                return Ok((RatVec::zeros(cone.dim()), -Rat::one(), None));
            }
            let y = y_prime.scale(&alpha.recip());
            let response = ger.respond(&y).map_err(SaddleError::Oracle)?;
            let value = response.row.dot(&y);
            if value.is_negative() {
                return Err(SaddleError::GerContractViolation {
                    y,
                    row: response.row,
                    value,
                });
            }
            let got = response.row.encoding_length();
            if got > ger.encoding_bound() {
                return Err(SaddleError::ResponseEncodingExceeded {
                    got,
                    bound: ger.encoding_bound(),
                });
            }
            Ok((response.row.clone(), -Rat::one(), Some(response)))
        }
    }
}

#[derive(Debug, Clone)]
pub struct SaddleOptions {
    pub ellipsoid: EllipsoidConfig,
    pub escalation_cap: u32,
    /// Target mixture support; defaults to the dimension of `Y`.
    pub support_target: Option<usize>,
    pub record_transcript: bool,
    /// Rerun the ellipsoid once more and assert the transcript repeats
    /// (the determinism the compressed-program argument rests on).
    pub replay_check: bool,
}

impl Default for SaddleOptions {
    fn default() -> Self {
        let mut ellipsoid = EllipsoidConfig::default();
        // Harvest-driven runs may stop once cuts stop being new; exact
        // verification plus escalation covers the early exit.
        ellipsoid.stall_window = Some(64);
        SaddleOptions {
            ellipsoid,
            escalation_cap: 6,
            support_target: None,
            record_transcript: false,
            replay_check: false,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SaddleStats {
    pub ger_calls: usize,
    pub ellipsoid_iterations: usize,
    pub max_iters_budget: usize,
    pub escalations: u32,
    pub distinct_rows: usize,
}

#[derive(Debug, Clone)]
pub struct SaddleSolution<H> {
    /// Positive weights over oracle responses, summing to one.
    pub mixture: Vec<(GerResponse<H>, Rat)>,
    /// The exactly verified `min_{y in Y}` value of the mixed row.
    pub value_check: Rat,
    pub stats: SaddleStats,
    pub transcripts: Vec<EllipsoidTranscript>,
}

impl<H> SaddleSolution<H> {
    pub fn mixed_row(&self) -> RatVec {
        let dim = self.mixture[0].0.row.dim();
        let mut r = RatVec::zeros(dim);
        for (resp, w) in &self.mixture {
            r = r.add(&resp.row.scale(w));
        }
        r
    }
}

/// Ellipsoid Against Hope. Requires the underlying (shifted) game value
/// to be at least zero, `Y` anchored and bounded.
pub fn solve_saddle<O: GerOracle, Y: YDomain>(
    ger: &mut O,
    y_domain: &Y,
    phi_bound: EncodingLength,
    opts: &SaddleOptions,
) -> Result<SaddleSolution<O::Handle>, SaddleError> {
    let y_poly = y_domain.polytope();
    let anchor = y_domain.anchor();
    let ydim = y_poly.dim();
    let cone = homogenize(y_poly, anchor)?;
    let complexity = phi_bound
        .max(cone.facet_complexity())
        .max(ger.encoding_bound());

    // The apex fallback cut: t >= 2^-10 is valid for the infeasible (D)
    // and, unlike the constant row, gives the run a direction.
    let apex_normal = RatVec::unit(ydim, anchor).neg();
    let apex_offset = -Rat::pow2(-10);

    let mut rows: Vec<RatVec> = Vec::new();
    let mut responses: Vec<GerResponse<O::Handle>> = Vec::new();
    let mut row_index: HashMap<RatVec, usize> = HashMap::new();
    let mut stats = SaddleStats::default();
    let mut transcripts = Vec::new();

    for escalation in 0..=opts.escalation_cap {
        stats.escalations = escalation;
        let budget =
            crate::ellipsoid::EllipsoidParams::derive(ydim, complexity, &opts.ellipsoid, escalation)
                .max_iters;
        stats.max_iters_budget = stats.max_iters_budget.max(budget);

        let mut stash: Option<SaddleError> = None;
        let mut calls = 0usize;
        let mut oracle = |y_prime: &RatVec| -> Result<SeparationResult, OracleFailure> {
            if y_prime.is_zero() {
                return Ok(SeparationResult::Violated {
                    normal: apex_normal.clone(),
                    offset: apex_offset.clone(),
                });
            }
            match combined_oracle(&mut *ger, &cone, anchor, y_prime) {
                Ok((normal, offset, response)) => {
                    if let Some(resp) = response {
                        calls += 1;
                        if !row_index.contains_key(&resp.row) {
                            row_index.insert(resp.row.clone(), rows.len());
                            rows.push(resp.row.clone());
                            responses.push(resp);
                        }
                    }
                    Ok(SeparationResult::Violated { normal, offset })
                }
                Err(e) => {
                    let msg = e.to_string();
                    stash = Some(e);
                    Err(OracleFailure(msg))
                }
            }
        };

        let (eq_rows, eq_rhs) = cone.eqs();
        let run = certify_empty_or_point(
            &mut oracle,
            ydim,
            Some((eq_rows, eq_rhs)),
            complexity,
            &opts.ellipsoid,
            escalation,
            opts.record_transcript,
        );
        drop(oracle);
        if let Some(e) = stash {
            return Err(e);
        }
        let transcript = run?;
        stats.ger_calls += calls;
        stats.ellipsoid_iterations += transcript.iterations;
        if let EllipsoidOutcome::Feasible(point) = &transcript.outcome {
            return Err(SaddleError::Internal(format!(
                "(D) reported feasible at {point:?}; the combined oracle never answers inside"
            )));
        }
        if opts.record_transcript {
            transcripts.push(transcript.clone());
        }

        if opts.replay_check {
            replay_deterministically(
                ger,
                &cone,
                anchor,
                ydim,
                complexity,
                opts,
                escalation,
                &transcript,
                (&apex_normal, &apex_offset),
            )?;
        }

        if rows.is_empty() {
            continue;
        }
        let Some((weights, _)) = compressed_primal(&rows, y_domain, None)? else {
            continue;
        };

        let support: Vec<usize> = (0..rows.len())
            .filter(|&k| weights[k].is_positive())
            .collect();
        let target = opts.support_target.unwrap_or(ydim);
        let (support, weights) = reduce_support(&rows, y_domain, support, weights, target)?;

        let mut mixed = RatVec::zeros(ydim);
        let mut total = Rat::zero();
        for &k in &support {
            mixed = mixed.add(&rows[k].scale(&weights[k]));
            total += &weights[k];
        }
        if total != Rat::one() {
            return Err(SaddleError::Internal(
                "mixture weights do not sum to one".to_string(),
            ));
        }
        let (value_check, _) = y_domain.minimize(&mixed)?;
        if value_check.is_negative() {
            continue;
        }

        stats.distinct_rows = rows.len();
        let mixture = support
            .into_iter()
            .map(|k| (responses[k].clone(), weights[k].clone()))
            .collect();
        return Ok(SaddleSolution {
            mixture,
            value_check,
            stats,
            transcripts,
        });
    }
    Err(SaddleError::VerificationFailedAfterMaxEscalations {
        escalations: opts.escalation_cap,
    })
}

/// Solves the compressed primal over `co{rows}` by column generation:
/// maximize the worst-case value of the mixed row against a growing set
/// of minimizer witnesses until the exact minimum over `Y` is
/// nonnegative. `restrict` limits the usable rows.
fn compressed_primal<Y: YDomain>(
    rows: &[RatVec],
    y_domain: &Y,
    restrict: Option<&[usize]>,
) -> Result<Option<(Vec<Rat>, Rat)>, SaddleError> {
    let all: Vec<usize> = (0..rows.len()).collect();
    let active: &[usize] = restrict.unwrap_or(&all);
    if active.is_empty() {
        return Ok(None);
    }
    let l = active.len();
    let mut witnesses: Vec<RatVec> = vec![y_domain.minimize(&rows[active[0]])?.1];
    // Each round adds a vertex witness that cuts off the current
    // candidate; Y has finitely many vertices, so this terminates.
    loop {
        let mut lp = LpProblem::new(l + 1);
        for w in &witnesses {
            let mut coeffs: Vec<Rat> = active.iter().map(|&k| -rows[k].dot(w)).collect();
            coeffs.push(Rat::one());
            lp.add_le(RatVec::from_entries(coeffs), Rat::zero());
        }
        let mut ones: Vec<Rat> = vec![Rat::one(); l];
        ones.push(Rat::zero());
        lp.add_eq(RatVec::from_entries(ones), Rat::one());
        for k in 0..l {
            lp.add_ge(RatVec::unit(l + 1, k), Rat::zero());
        }
        let objective = RatVec::unit(l + 1, l);
        let outcome = lp.maximize(&objective)?;
        let LpOutcome::Optimal { point, value: t, .. } = outcome else {
            return Err(SaddleError::Internal(format!(
                "compressed primal LP not optimal: {outcome:?}"
            )));
        };
        if t.is_negative() {
            return Ok(None);
        }
        let mut mixed = RatVec::zeros(rows[0].dim());
        for (i, &k) in active.iter().enumerate() {
            if !point[i].is_zero() {
                mixed = mixed.add(&rows[k].scale(&point[i]));
            }
        }
        let (min_val, witness) = y_domain.minimize(&mixed)?;
        if !min_val.is_negative() {
            let mut weights = vec![Rat::zero(); rows.len()];
            for (i, &k) in active.iter().enumerate() {
                weights[k] = point[i].clone();
            }
            return Ok(Some((weights, min_val)));
        }
        witnesses.push(witness);
    }
}

/// Greedy support reduction: drop rows one at a time while the
/// compressed primal stays feasible, until the support meets the target.
fn reduce_support<Y: YDomain>(
    rows: &[RatVec],
    y_domain: &Y,
    mut support: Vec<usize>,
    mut weights: Vec<Rat>,
    target: usize,
) -> Result<(Vec<usize>, Vec<Rat>), SaddleError> {
    while support.len() > target {
        let mut reduced = false;
        for drop_pos in 0..support.len() {
            let subset: Vec<usize> = support
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != drop_pos)
                .map(|(_, &k)| k)
                .collect();
            if let Some((w, _)) = compressed_primal(rows, y_domain, Some(&subset))? {
                support = (0..rows.len()).filter(|&k| w[k].is_positive()).collect();
                weights = w;
                reduced = true;
                break;
            }
        }
        if !reduced {
            break;
        }
    }
    Ok((support, weights))
}

/// Replays the ellipsoid run and asserts the transcript repeats, which
/// is what lets the harvested rows stand in for the full program.
#[allow(clippy::too_many_arguments)]
fn replay_deterministically<O: GerOracle>(
    ger: &mut O,
    cone: &HPolytope,
    anchor: usize,
    ydim: usize,
    complexity: EncodingLength,
    opts: &SaddleOptions,
    escalation: u32,
    original: &EllipsoidTranscript,
    apex: (&RatVec, &Rat),
) -> Result<(), SaddleError> {
    let mut stash: Option<SaddleError> = None;
    let mut oracle = |y_prime: &RatVec| -> Result<SeparationResult, OracleFailure> {
        if y_prime.is_zero() {
            return Ok(SeparationResult::Violated {
                normal: apex.0.clone(),
                offset: apex.1.clone(),
            });
        }
        match combined_oracle(&mut *ger, cone, anchor, y_prime) {
            Ok((normal, offset, _)) => Ok(SeparationResult::Violated { normal, offset }),
            Err(e) => {
                let msg = e.to_string();
                stash = Some(e);
                Err(OracleFailure(msg))
            }
        }
    };
    let (eq_rows, eq_rhs) = cone.eqs();
    let replay = certify_empty_or_point(
        &mut oracle,
        ydim,
        Some((eq_rows, eq_rhs)),
        complexity,
        &opts.ellipsoid,
        escalation,
        !original.steps.is_empty(),
    );
    drop(oracle);
    if let Some(e) = stash {
        return Err(e);
    }
    let replay = replay?;
    if replay.iterations != original.iterations
        || !matches!(replay.outcome, EllipsoidOutcome::Empty)
    {
        return Err(SaddleError::Internal(
            "ellipsoid replay diverged; the method must be deterministic".to_string(),
        ));
    }
    for (a, b) in replay.steps.iter().zip(&original.steps) {
        if a.center != b.center || a.answer != b.answer {
            return Err(SaddleError::Internal(
                "ellipsoid replay produced a different transcript".to_string(),
            ));
        }
    }
    Ok(())
}

/// Best-response-over-vertices oracle for matrix games on simplices:
/// the harness GER used by the CLI and the cross-check tests. Rows are
/// the augmented vertex rows of the shifted matrix.
pub struct VertexBestResponseGer {
    rows: Vec<RatVec>,
    bound: EncodingLength,
}

impl VertexBestResponseGer {
    /// `a` is the original payoff matrix and `opt` its game value; the
    /// oracle plays best responses in the shifted game, which satisfy
    /// the good-enough contract with `OPT = 0`.
    pub fn new(a: &RatMat, opt: &Rat) -> Self {
        let shifted = shift_to_zero(a, opt);
        let rows: Vec<RatVec> = (0..a.rows())
            .map(|i| {
                let mut v = RatVec::unit(shifted.rows(), i);
                v.set(shifted.rows() - 1, Rat::one());
                shifted.tr_mul_vec(&v)
            })
            .collect();
        let bound = rows
            .iter()
            .map(RatVec::encoding_length)
            .max()
            .unwrap_or_default();
        VertexBestResponseGer { rows, bound }
    }

    pub fn response_rows(&self) -> &[RatVec] {
        &self.rows
    }
}

impl GerOracle for VertexBestResponseGer {
    type Handle = usize;

    fn respond(
        &mut self,
        y: &RatVec,
    ) -> Result<GerResponse<usize>, Box<dyn std::error::Error + Send + Sync>> {
        let mut best: Option<(usize, Rat)> = None;
        for (i, row) in self.rows.iter().enumerate() {
            let v = row.dot(y);
            if best.as_ref().map_or(true, |(_, b)| v > *b) {
                best = Some((i, v));
            }
        }
        let (i, _) = best.expect("matrix game has at least one row");
        Ok(GerResponse {
            handle: i,
            row: self.rows[i].clone(),
        })
    }

    fn encoding_bound(&self) -> EncodingLength {
        self.bound
    }
}

/// Exact value and a maximin strategy of the matrix game on simplices:
/// `max_{x in simplex} min_j (A^T x)_j` by one LP.
pub fn matrix_game_value(a: &RatMat) -> Result<(Rat, RatVec), SaddleError> {
    let m = a.rows();
    let n = a.cols();
    let mut lp = LpProblem::new(m + 1);
    for j in 0..n {
        let mut coeffs: Vec<Rat> = (0..m).map(|i| a.get(i, j).clone()).collect();
        coeffs.push(-Rat::one());
        lp.add_ge(RatVec::from_entries(coeffs), Rat::zero());
    }
    let mut ones = vec![Rat::one(); m];
    ones.push(Rat::zero());
    lp.add_eq(RatVec::from_entries(ones), Rat::one());
    for i in 0..m {
        lp.add_ge(RatVec::unit(m + 1, i), Rat::zero());
    }
    match lp.maximize(&RatVec::unit(m + 1, m))? {
        LpOutcome::Optimal { point, value, .. } => {
            let x = RatVec::from_entries(point.as_slice()[..m].to_vec());
            Ok((value, x))
        }
        other => Err(SaddleError::Internal(format!(
            "matrix game LP not optimal: {other:?}"
        ))),
    }
}

/// The anchored simplex domain for matrix-game harness runs.
pub fn anchored_simplex_domain(n: usize) -> Result<PolytopeY, SaddleError> {
    PolytopeY::new(HPolytope::simplex(n).embed_with_anchor(), n)
}
