//! Central-cut ellipsoid method over a separation oracle.
//!
//! Oracle queries and answers are exact rationals. The shape matrix is
//! carried in fixed-precision dyadic rationals (`precision_bits`
//! fractional bits) and inflated by `1 + 1/(4(n+1)^2)` per step so the
//! rounded ellipsoid keeps containing the feasible region; exact square
//! roots do not exist, and final correctness is re-established by the
//! callers' exact verification of whatever the run produces.
//!
//! [`certify_empty_or_point`] additionally restricts the run to the
//! affine hull spanned by caller-supplied equality rows, standing in for
//! the general non-full-dimensional machinery: without the restriction
//! a separation oracle for a lower-dimensional set would never see an
//! exactly feasible query point.

use crate::arith::{EncodingLength, Rat, RatMat, RatVec};
use crate::polytope::{affine_solution, kernel_basis, SeparationResult};
use num_bigint::BigInt;
use num_integer::Integer;

use std::collections::HashSet;

/// Opaque oracle failure propagated out of a run; the caller that built
/// the oracle closure keeps the typed error on the side.
#[derive(Debug, Clone, thiserror::Error)]
#[error("separation oracle failed: {0}")]
pub struct OracleFailure(pub String);

pub type OracleFn<'a> = dyn FnMut(&RatVec) -> Result<SeparationResult, OracleFailure> + 'a;

#[derive(Debug, Clone, thiserror::Error)]
pub enum EllipsoidError {
    #[error("oracle contract violation at iteration {iteration}: returned hyperplane does not cut the queried center")]
    OracleContractViolation {
        iteration: usize,
        center: RatVec,
        normal: RatVec,
        offset: Rat,
    },
    #[error(transparent)]
    Oracle(#[from] OracleFailure),
    #[error("equality system is inconsistent with itself")]
    InconsistentEqualities,
}

/// Run parameters. `radius_exp` and `eps_exp` are base-2 exponents:
/// the initial ball has radius `2^radius_exp` and the run declares
/// emptiness once the ellipsoid volume is certified below `2^-eps_exp`.
#[derive(Debug, Clone)]
pub struct EllipsoidParams {
    pub radius_exp: u64,
    pub eps_exp: u64,
    pub max_iters: usize,
    pub precision_bits: u32,
    /// Optional early exit: stop after this many iterations without a
    /// new distinct cut. Escalation-protected callers opt in; the
    /// default keeps the plain volume-or-iteration semantics.
    pub stall_window: Option<usize>,
    pub record_steps: bool,
    /// Test instrumentation: store `det P` alongside every step.
    pub record_determinants: bool,
}

/// Configured constants from which per-run parameters are derived.
/// The theoretical settings (`R = 2^(N^2 phi)`, `eps = 2^(-5 N^3 phi)`)
/// are capped by the configured ceilings; escalation doubles the
/// ceilings and the precision, so reruns approach the theory bounds.
#[derive(Debug, Clone)]
pub struct EllipsoidConfig {
    pub radius_exp_cap: u64,
    pub eps_exp_cap: u64,
    pub iter_coeff: u64,
    pub max_iters_cap: usize,
    pub precision_floor: u32,
    pub stall_window: Option<usize>,
}

impl Default for EllipsoidConfig {
    fn default() -> Self {
        EllipsoidConfig {
            radius_exp_cap: 16,
            eps_exp_cap: 64,
            iter_coeff: 10,
            max_iters_cap: 1_000_000,
            precision_floor: 96,
            stall_window: None,
        }
    }
}

impl EllipsoidParams {
    pub fn derive(
        dim: usize,
        phi: EncodingLength,
        config: &EllipsoidConfig,
        escalation: u32,
    ) -> EllipsoidParams {
        let n = dim as u64;
        let phi_bits = phi.bits.max(4);
        let radius_exp = (n * n * phi_bits).min(config.radius_exp_cap << escalation);
        let eps_exp = (5 * n * n * n * phi_bits).min(config.eps_exp_cap << escalation);
        let formula = config.iter_coeff * (n * eps_exp + n * n * radius_exp);
        let max_iters = (formula as usize).min(config.max_iters_cap << escalation);
        let precision_bits =
            (config.precision_floor.max(8 * dim as u32)) << escalation.min(8);
        EllipsoidParams {
            radius_exp,
            eps_exp,
            max_iters,
            precision_bits,
            stall_window: config.stall_window,
            record_steps: false,
            record_determinants: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    FoundFeasible,
    VolumeBound,
    MaxIters,
    Stalled,
    /// A returned cut had a zero normal: the feasible region lies in an
    /// empty halfspace.
    DegenerateCut,
    /// The dyadic shape matrix lost positive definiteness; the caller
    /// should escalate precision.
    PrecisionCollapse,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EllipsoidOutcome {
    Feasible(RatVec),
    Empty,
}

#[derive(Debug, Clone)]
pub struct TranscriptStep {
    pub center: RatVec,
    pub answer: SeparationResult,
    pub shape_det: Option<Rat>,
}

#[derive(Debug, Clone)]
pub struct EllipsoidTranscript {
    pub outcome: EllipsoidOutcome,
    pub stop_reason: StopReason,
    pub iterations: usize,
    pub steps: Vec<TranscriptStep>,
}

impl EllipsoidTranscript {
    pub fn is_empty_outcome(&self) -> bool {
        matches!(self.outcome, EllipsoidOutcome::Empty)
    }
}

/// Rounds to the dyadic grid with `bits` fractional bits, half up.
fn round_dyadic(x: &Rat, bits: u32) -> Rat {
    let scaled_num: BigInt = (x.numer() << (bits + 1)) + x.denom();
    let q = scaled_num.div_floor(&(x.denom() * BigInt::from(2)));
    Rat::from_big(q, BigInt::from(1) << bits)
}

/// Floor of `sqrt(x)` on the same dyadic grid; exact zero only when the
/// true root rounds below one grid cell.
fn dyadic_sqrt_floor(x: &Rat, bits: u32) -> Rat {
    debug_assert!(!x.is_negative());
    let scaled: BigInt = (x.numer() << (2 * bits)).div_floor(x.denom());
    let root = scaled.sqrt();
    Rat::from_big(root, BigInt::from(1) << bits)
}

/// Solves the strong nonemptiness problem for the set behind `oracle`:
/// either a point the oracle deems inside, or `Empty` once the volume
/// bound or the iteration budget is exhausted. Every cut is checked to
/// strictly cut off the queried center.
pub fn central_cut(
    oracle: &mut OracleFn<'_>,
    params: &EllipsoidParams,
    dim: usize,
) -> Result<EllipsoidTranscript, EllipsoidError> {
    assert!(dim >= 1, "central_cut needs dimension >= 1");
    let n = dim;
    let mut center = RatVec::zeros(n);
    let mut shape = RatMat::zeros(n, n);
    let radius_sq = Rat::pow2(2 * params.radius_exp as i64);
    for i in 0..n {
        *shape.get_mut(i, i) = radius_sq.clone();
    }

    // log2(vol) decreases by at least 1/(3(n+1)) per step, so emptiness
    // is certified after 3(n+1) (n (radius_exp + 1) + eps_exp) steps.
    let volume_steps = (3 * (n as u64 + 1))
        .saturating_mul(n as u64 * (params.radius_exp + 1) + params.eps_exp)
        as usize;

    let mut steps = Vec::new();
    let mut seen_cuts: HashSet<(RatVec, Rat)> = HashSet::new();
    let mut last_new_cut = 0usize;

    let factor = if n >= 2 {
        Rat::new((n * n) as i64, (n * n - 1) as i64)
    } else {
        Rat::one()
    };
    let two_over = Rat::new(2, n as i64 + 1);
    let blowup_den = 4 * (n as i64 + 1) * (n as i64 + 1);
    let blowup = Rat::new(blowup_den + 1, blowup_den);

    let mut iter = 0usize;
    let (stop_reason, outcome) = loop {
        if iter >= params.max_iters {
            break (StopReason::MaxIters, EllipsoidOutcome::Empty);
        }
        if iter >= volume_steps {
            break (StopReason::VolumeBound, EllipsoidOutcome::Empty);
        }
        if let Some(window) = params.stall_window {
            if iter >= 2 * (n + 1) && iter - last_new_cut >= window {
                break (StopReason::Stalled, EllipsoidOutcome::Empty);
            }
        }

        let answer = oracle(&center)?;
        if params.record_steps {
            steps.push(TranscriptStep {
                center: center.clone(),
                answer: answer.clone(),
                shape_det: params.record_determinants.then(|| shape.determinant()),
            });
        }
        let (normal, offset) = match answer {
            SeparationResult::Inside => {
                // Exact re-verification before returning the point.
                let check = oracle(&center)?;
                debug_assert!(check.is_inside(), "oracle is not deterministic");
                break (StopReason::FoundFeasible, EllipsoidOutcome::Feasible(center.clone()));
            }
            SeparationResult::Violated { normal, offset } => (normal, offset),
        };

        if !(normal.dot(&center) > offset) {
            return Err(EllipsoidError::OracleContractViolation {
                iteration: iter,
                center: center.clone(),
                normal,
                offset,
            });
        }
        if normal.is_zero() {
            break (StopReason::DegenerateCut, EllipsoidOutcome::Empty);
        }
        if seen_cuts.insert((normal.clone(), offset.clone())) {
            last_new_cut = iter;
        }

        let q = shape.mul_vec(&normal);
        let v = normal.dot(&q);
        if !v.is_positive() {
            break (StopReason::PrecisionCollapse, EllipsoidOutcome::Empty);
        }
        let s = dyadic_sqrt_floor(&v, params.precision_bits);
        if s.is_zero() {
            break (StopReason::PrecisionCollapse, EllipsoidOutcome::Empty);
        }

        let step_scale = (&s * &Rat::from_int(n as i64 + 1)).recip();
        let mut new_center = Vec::with_capacity(n);
        for i in 0..n {
            let moved = &center[i] - &(&q[i] * &step_scale);
            new_center.push(round_dyadic(&moved, params.precision_bits));
        }
        center = RatVec::from_entries(new_center);

        if n == 1 {
            let p_new = &(shape.get(0, 0) * &Rat::new(1, 4)) * &blowup;
            *shape.get_mut(0, 0) = round_dyadic(&p_new, params.precision_bits);
        } else {
            let mut next = RatMat::zeros(n, n);
            for i in 0..n {
                for j in i..n {
                    let rank1 = &(&q[i] * &q[j]) / &v;
                    let val = &(&factor * &(shape.get(i, j) - &(&two_over * &rank1))) * &blowup;
                    let rounded = round_dyadic(&val, params.precision_bits);
                    *next.get_mut(i, j) = rounded.clone();
                    *next.get_mut(j, i) = rounded;
                }
            }
            shape = next;
        }
        iter += 1;
    };

    Ok(EllipsoidTranscript {
        outcome,
        stop_reason,
        iterations: iter,
        steps,
    })
}

/// Emptiness certification with optional affine restriction.
///
/// When `equalities` is supplied the run is confined to the affine hull
/// `{x : E x = f}`: the ellipsoid iterates over kernel coordinates, the
/// oracle sees exact points of the hull, and cuts are pulled back along
/// the kernel basis. Parameters are derived from the dimension and the
/// facet-complexity bound; callers escalate by rerunning with a higher
/// `escalation` level when downstream exact verification fails.
pub fn certify_empty_or_point(
    oracle: &mut OracleFn<'_>,
    dim: usize,
    equalities: Option<(&[RatVec], &[Rat])>,
    phi_bound: EncodingLength,
    config: &EllipsoidConfig,
    escalation: u32,
    record_steps: bool,
) -> Result<EllipsoidTranscript, EllipsoidError> {
    let Some((eq_rows, eq_rhs)) = equalities else {
        let mut params = EllipsoidParams::derive(dim, phi_bound, config, escalation);
        params.record_steps = record_steps;
        return central_cut(oracle, &params, dim);
    };
    if eq_rows.is_empty() {
        let mut params = EllipsoidParams::derive(dim, phi_bound, config, escalation);
        params.record_steps = record_steps;
        return central_cut(oracle, &params, dim);
    }

    let Some(origin) = affine_solution(eq_rows, eq_rhs, dim) else {
        return Err(EllipsoidError::InconsistentEqualities);
    };
    let basis = kernel_basis(eq_rows, dim);
    if basis.is_empty() {
        let answer = oracle(&origin)?;
        let feasible = answer.is_inside();
        return Ok(EllipsoidTranscript {
            outcome: if feasible {
                EllipsoidOutcome::Feasible(origin.clone())
            } else {
                EllipsoidOutcome::Empty
            },
            stop_reason: if feasible {
                StopReason::FoundFeasible
            } else {
                StopReason::DegenerateCut
            },
            iterations: 1,
            steps: vec![TranscriptStep {
                center: origin,
                answer,
                shape_det: None,
            }],
        });
    }

    let k = basis.len();
    let lift = RatMat::from_rows(basis).transpose(); // dim x k
    let mut y_steps: Vec<TranscriptStep> = Vec::new();
    let mut wrapped = |z: &RatVec| -> Result<SeparationResult, OracleFailure> {
        let y = origin.add(&lift.mul_vec(z));
        let answer = oracle(&y)?;
        if record_steps {
            y_steps.push(TranscriptStep {
                center: y.clone(),
                answer: answer.clone(),
                shape_det: None,
            });
        }
        match answer {
            SeparationResult::Inside => Ok(SeparationResult::Inside),
            SeparationResult::Violated { normal, offset } => {
                let z_normal = lift.tr_mul_vec(&normal);
                let z_offset = &offset - &normal.dot(&origin);
                Ok(SeparationResult::Violated {
                    normal: z_normal,
                    offset: z_offset,
                })
            }
        }
    };

    let mut params = EllipsoidParams::derive(k, phi_bound, config, escalation);
    params.record_steps = false;
    let transcript = central_cut(&mut wrapped, &params, k)?;
    let outcome = match transcript.outcome {
        EllipsoidOutcome::Feasible(z) => EllipsoidOutcome::Feasible(origin.add(&lift.mul_vec(&z))),
        EllipsoidOutcome::Empty => EllipsoidOutcome::Empty,
    };
    Ok(EllipsoidTranscript {
        outcome,
        stop_reason: transcript.stop_reason,
        iterations: transcript.iterations,
        steps: y_steps,
    })
}

/// Separation closure over an H-polytope, for runs directly against a
/// stored constraint system.
pub fn polytope_oracle<'a>(
    p: &'a crate::polytope::HPolytope,
) -> impl FnMut(&RatVec) -> Result<SeparationResult, OracleFailure> + 'a {
    move |y: &RatVec| p.separate(y).map_err(|e| OracleFailure(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::HPolytope;

    fn default_params(dim: usize) -> EllipsoidParams {
        let mut p = EllipsoidParams::derive(
            dim,
            EncodingLength::from_bits(8),
            &EllipsoidConfig::default(),
            0,
        );
        p.record_steps = true;
        p
    }

    #[test]
    fn unit_box_feasible_at_origin() {
        let boxp = HPolytope::cube(2, Rat::from_int(-1), Rat::one());
        let mut oracle = polytope_oracle(&boxp);
        let mut params = default_params(2);
        params.radius_exp = 1;
        let t = central_cut(&mut oracle, &params, 2).unwrap();
        match t.outcome {
            EllipsoidOutcome::Feasible(p) => {
                assert!(boxp.contains(&p).unwrap());
                assert!(p.is_zero(), "origin is the first query center");
            }
            _ => panic!("expected feasible"),
        }
        assert_eq!(t.iterations, 0);
    }

    #[test]
    fn empty_interval_certified() {
        // {x <= -1, x >= 1} is empty.
        let mut p = HPolytope::new(1);
        p.add_ineq(RatVec::from_ints(&[1]), Rat::from_int(-1));
        p.add_ineq(RatVec::from_ints(&[-1]), Rat::from_int(-1));
        let mut oracle = polytope_oracle(&p);
        let mut params = default_params(1);
        params.radius_exp = 2;
        let t = central_cut(&mut oracle, &params, 1).unwrap();
        assert!(t.is_empty_outcome());
        assert!(t.iterations <= params.max_iters);
        // Cut validity: each recorded cut strictly cuts off its center.
        for step in &t.steps {
            if let SeparationResult::Violated { normal, offset } = &step.answer {
                assert!(normal.dot(&step.center) > *offset);
            }
        }
    }

    #[test]
    fn shifted_tiny_box_found() {
        let lo = Rat::new(9, 10);
        let boxp = HPolytope::cube(2, lo, Rat::one());
        let mut oracle = polytope_oracle(&boxp);
        let mut params = default_params(2);
        params.radius_exp = 1;
        let t = central_cut(&mut oracle, &params, 2).unwrap();
        match t.outcome {
            EllipsoidOutcome::Feasible(p) => assert!(boxp.contains(&p).unwrap()),
            _ => panic!("expected feasible, stopped with {:?}", t.stop_reason),
        }
    }

    #[test]
    fn determinism_identical_transcripts() {
        let boxp = HPolytope::cube(2, Rat::new(9, 10), Rat::one());
        let run = || {
            let mut oracle = polytope_oracle(&boxp);
            let params = default_params(2);
            central_cut(&mut oracle, &params, 2).unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.iterations, b.iterations);
        assert_eq!(a.steps.len(), b.steps.len());
        for (x, y) in a.steps.iter().zip(&b.steps) {
            assert_eq!(x.center, y.center);
            assert_eq!(x.answer, y.answer);
        }
    }

    #[test]
    fn volume_shrinks_per_step() {
        // Every central cut multiplies det(P) by at most the closed-form
        // factor (n^2/(n^2-1))^n (n-1)/(n+1), inflated by the rounding
        // blow-up; check the recorded determinants against it.
        let boxp = HPolytope::cube(2, Rat::new(9, 10), Rat::one());
        let mut oracle = polytope_oracle(&boxp);
        let mut params = default_params(2);
        params.record_determinants = true;
        params.radius_exp = 1;
        let t = central_cut(&mut oracle, &params, 2).unwrap();
        let n = 2i64;
        let exact = Rat::new(n * n, n * n - 1)
            * Rat::new(n * n, n * n - 1)
            * Rat::new(n - 1, n + 1);
        let blowup_den = 4 * (n + 1) * (n + 1);
        let blowup = Rat::new(blowup_den + 1, blowup_den);
        // Inflation applies per entry; det scales by blowup^n, plus a
        // small rounding tolerance.
        let bound = &(&exact * &blowup) * &(&blowup * &Rat::new(11, 10));
        let dets: Vec<&Rat> = t.steps.iter().filter_map(|s| s.shape_det.as_ref()).collect();
        assert!(dets.len() >= 2);
        for w in dets.windows(2) {
            let ratio = w[1] / w[0];
            assert!(
                ratio <= bound,
                "volume ratio {ratio:?} exceeds closed-form bound {bound:?}"
            );
            assert!(ratio.is_positive());
        }
    }

    #[test]
    fn certify_with_affine_restriction_finds_simplex_point() {
        // The probability simplex is not full-dimensional; the
        // restriction to its affine hull makes the run land exactly.
        let simplex = HPolytope::simplex(2);
        let (eq_rows, eq_rhs) = simplex.eqs();
        let mut oracle = polytope_oracle(&simplex);
        let t = certify_empty_or_point(
            &mut oracle,
            2,
            Some((eq_rows, eq_rhs)),
            EncodingLength::from_bits(8),
            &EllipsoidConfig::default(),
            0,
            true,
        )
        .unwrap();
        match t.outcome {
            EllipsoidOutcome::Feasible(p) => assert!(simplex.contains(&p).unwrap()),
            _ => panic!("expected feasible point in the simplex"),
        }
    }

    #[test]
    fn certify_empty_interval() {
        let mut p = HPolytope::new(1);
        p.add_ineq(RatVec::from_ints(&[1]), Rat::from_int(-1));
        p.add_ineq(RatVec::from_ints(&[-1]), Rat::from_int(-1));
        let mut oracle = polytope_oracle(&p);
        let t = certify_empty_or_point(
            &mut oracle,
            1,
            None,
            EncodingLength::from_bits(8),
            &EllipsoidConfig::default(),
            0,
            false,
        )
        .unwrap();
        assert!(t.is_empty_outcome());
    }

    #[test]
    fn matching_pennies_dual_cone_is_empty() {
        // Cone of the anchored simplex intersected with both response
        // rows of matching pennies forced below -1: infeasible because
        // the game value is 0.
        let y = HPolytope::simplex(2).embed_with_anchor();
        let mut cone = crate::polytope::homogenize(&y, 2).unwrap();
        cone.add_ineq(RatVec::from_ints(&[1, -1, 0]), -Rat::one());
        cone.add_ineq(RatVec::from_ints(&[-1, 1, 0]), -Rat::one());
        let (eq_rows, eq_rhs) = (cone.eqs().0.to_vec(), cone.eqs().1.to_vec());
        let mut oracle = polytope_oracle(&cone);
        let t = certify_empty_or_point(
            &mut oracle,
            3,
            Some((&eq_rows, &eq_rhs)),
            EncodingLength::from_bits(10),
            &EllipsoidConfig::default(),
            0,
            false,
        )
        .unwrap();
        assert!(t.is_empty_outcome());
    }

    #[test]
    fn oracle_contract_violation_detected() {
        // An oracle that claims a hyperplane not cutting the center.
        let mut bad = |_: &RatVec| {
            Ok(SeparationResult::Violated {
                normal: RatVec::from_ints(&[1]),
                offset: Rat::from_int(5),
            })
        };
        let params = default_params(1);
        let err = central_cut(&mut bad, &params, 1).unwrap_err();
        assert!(matches!(err, EllipsoidError::OracleContractViolation { .. }));
    }

    #[test]
    fn dyadic_helpers_round_and_bound() {
        let x = Rat::new(1, 3);
        let r = round_dyadic(&x, 8);
        assert!((&r - &x).abs() <= Rat::new(1, 512));
        let two = Rat::from_int(2);
        let s = dyadic_sqrt_floor(&two, 20);
        assert!(&s * &s <= two);
        let next = &s + &Rat::pow2(-20);
        assert!(&next * &next > two);
    }
}
