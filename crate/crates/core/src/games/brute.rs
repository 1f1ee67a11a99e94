//! Independent equilibrium machinery used to check the framework: a
//! brute-force solver over the full joint distribution and the exact
//! constraint verifier.

use super::{GameError, PolyhedralGame};
use crate::arith::{Rat, RatVec};
use crate::deviation::DeviationSet;
use crate::lp::{LpOutcome, LpProblem};
use crate::phi::{build_certificate, Certificate, PhiError, PureProfile};

/// Default cap on enumerated joint profiles.
pub const DEFAULT_BRUTE_CAP: usize = 4096;

/// Verdict of the exact verifier.
#[derive(Debug, Clone)]
pub enum VerifyOutcome {
    Pass {
        certificate: Certificate,
    },
    Violation {
        player: usize,
        vertex_index: usize,
        benefit: Rat,
    },
    /// The support is not a distribution over valid profiles at all.
    Invalid { reason: String },
}

impl VerifyOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, VerifyOutcome::Pass { .. })
    }
}

/// Exact verification of the equilibrium conditions via vertex
/// enumeration and per-player LPs; the two routes must agree. Support
/// profiles are membership-checked and weights must be a distribution.
pub fn verify_equilibrium<G: PolyhedralGame>(
    game: &G,
    devs: &[DeviationSet],
    support: &[(PureProfile, Rat)],
) -> Result<VerifyOutcome, PhiError> {
    let n = game.num_players();
    if devs.len() != n {
        return Err(PhiError::Mismatch(format!(
            "{} deviation sets for {} players",
            devs.len(),
            n
        )));
    }
    let mut total = Rat::zero();
    for (profile, w) in support {
        if !w.is_positive() {
            return Ok(VerifyOutcome::Invalid {
                reason: "nonpositive support weight".to_string(),
            });
        }
        total += w;
        if profile.strategies.len() != n {
            return Ok(VerifyOutcome::Invalid {
                reason: "profile arity mismatch".to_string(),
            });
        }
        for p in 0..n {
            if !game.strategy_set(p).contains(&profile.strategies[p])? {
                return Ok(VerifyOutcome::Invalid {
                    reason: format!("support strategy of player {} is outside its set", p + 1),
                });
            }
        }
    }
    if total != Rat::one() {
        return Ok(VerifyOutcome::Invalid {
            reason: format!("support weights sum to {total}"),
        });
    }

    let certificate = build_certificate(game, devs, support)?;
    for (p, benefits) in certificate.vertex_benefits.iter().enumerate() {
        for (i, b) in benefits.iter().enumerate() {
            if b.is_positive() {
                return Ok(VerifyOutcome::Violation {
                    player: p,
                    vertex_index: i,
                    benefit: b.clone(),
                });
            }
        }
        if certificate.lp_max_benefits[p].is_positive() {
            return Ok(VerifyOutcome::Violation {
                player: p,
                vertex_index: usize::MAX,
                benefit: certificate.lp_max_benefits[p].clone(),
            });
        }
    }
    Ok(VerifyOutcome::Pass { certificate })
}

/// Full enumeration report: the joint distribution over all pure
/// profiles found by one LP over the profile simplex.
#[derive(Debug, Clone)]
pub struct BruteForceReport {
    pub profiles: Vec<PureProfile>,
    pub weights: Vec<Rat>,
    pub feasible: bool,
    pub equilibrium: Option<Vec<(PureProfile, Rat)>>,
}

/// Solves the equilibrium feasibility program by direct LP over the
/// full joint distribution, with one constraint per generating
/// deviation vertex per player. Independent of the oracle framework.
pub fn brute_force_equilibrium<G: PolyhedralGame>(
    game: &G,
    devs: &[DeviationSet],
    cap: usize,
) -> Result<BruteForceReport, PhiError> {
    let n = game.num_players();
    let per_player: Vec<Vec<RatVec>> = (0..n)
        .map(|p| game.pure_strategies(p))
        .collect::<Result<_, GameError>>()?;
    let mut count = 1usize;
    for vs in &per_player {
        count = count.saturating_mul(vs.len());
        if count > cap {
            return Err(PhiError::Game(GameError::InstanceTooLarge {
                size: count,
                cap,
            }));
        }
    }

    let mut profiles: Vec<PureProfile> = vec![PureProfile { strategies: vec![] }];
    for vs in &per_player {
        let mut next = Vec::with_capacity(profiles.len() * vs.len());
        for base in &profiles {
            for v in vs {
                let mut s = base.strategies.clone();
                s.push(v.clone());
                next.push(PureProfile { strategies: s });
            }
        }
        profiles = next;
    }

    // One LP: x in the profile simplex, every generating deviation
    // vertex yields benefit <= 0.
    let m = profiles.len();
    let mut lp = LpProblem::new(m);
    for i in 0..m {
        lp.add_ge(RatVec::unit(m, i), Rat::zero());
    }
    lp.add_eq(RatVec::from_entries(vec![Rat::one(); m]), Rat::one());

    for (p, dev) in devs.iter().enumerate() {
        let d = dev.matrix_dim;
        // Per profile: benefit coefficient of this deviation vertex.
        let gens = dev.lp_generator_vertices()?;
        let mut per_profile: Vec<(Rat, RatVec)> = Vec::with_capacity(m);
        for profile in &profiles {
            let g = game.gradient(p, &profile.strategies)?;
            let u = g.dot(&profile.strategies[p]);
            per_profile.push((u, g));
        }
        for gen in gens {
            let mut row = Vec::with_capacity(m);
            for (profile, (u, g)) in profiles.iter().zip(&per_profile) {
                let s = &profile.strategies[p];
                let mut image = RatVec::zeros(d);
                for b in 0..d {
                    let mut acc = Rat::zero();
                    for a in 0..d {
                        let coeff = &gen[b * d + a];
                        if !coeff.is_zero() && !s[a].is_zero() {
                            acc += &(coeff * &s[a]);
                        }
                    }
                    image.set(b, acc);
                }
                row.push(g.dot(&image) - u);
            }
            lp.add_le(RatVec::from_entries(row), Rat::zero());
        }
    }

    match lp.minimize(&RatVec::zeros(m))? {
        LpOutcome::Optimal { point, .. } => {
            let weights: Vec<Rat> = point.as_slice().to_vec();
            let equilibrium: Vec<(PureProfile, Rat)> = profiles
                .iter()
                .zip(&weights)
                .filter(|(_, w)| w.is_positive())
                .map(|(s, w)| (s.clone(), w.clone()))
                .collect();
            Ok(BruteForceReport {
                profiles,
                weights,
                feasible: true,
                equilibrium: Some(equilibrium),
            })
        }
        LpOutcome::Infeasible { .. } => Ok(BruteForceReport {
            weights: vec![Rat::zero(); profiles.len()],
            profiles,
            feasible: false,
            equilibrium: None,
        }),
        LpOutcome::Unbounded { .. } => Err(PhiError::Mismatch(
            "brute-force program unbounded on a simplex".to_string(),
        )),
    }
}
