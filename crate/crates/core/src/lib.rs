//! Exact equilibrium computation for polyhedral games.
//!
//! Everything in this crate computes with arbitrary-precision rationals;
//! there is no floating point anywhere on a result path. The crate is
//! organised bottom-up:
//!
//! - [`arith`] — rational scalars, vectors, matrices, encoding lengths.
//! - [`lp`] — an exact two-phase simplex solver with Bland's rule and
//!   Farkas infeasibility certificates.
//! - [`polytope`] — rational polyhedra in H-representation: separation,
//!   conic-hull homogenization, algorithmic Carathéodory decomposition,
//!   vertex enumeration, and the generalized-Farkas case decision.
//! - [`ellipsoid`] — central-cut ellipsoid method over a separation
//!   oracle, with dyadic fixed-precision shape arithmetic and exact
//!   rational queries.
//! - [`saddle`] — min-max solving of bilinear zero-sum games from a
//!   good-enough-response oracle: the combined separation oracle, the
//!   run on the deliberately infeasible dual, and the compressed primal.
//! - [`deviation`] — polytopes of linear strategy transformations:
//!   swap (stochastic) deviations, constant deviations, hulls with the
//!   identity, and user-supplied sets.
//! - [`phi`] — the meta-game layer: meta rows, fixed points, the
//!   purified oracle, and the driver producing exact equilibria with
//!   verifiable certificates.
//! - [`games`] — normal-form and extensive-form (sequence-form) games,
//!   the brute-force oracle, and the exact verifier.

pub mod arith;
pub mod deviation;
pub mod ellipsoid;
pub mod games;
pub mod lp;
pub mod phi;
pub mod polytope;
pub mod saddle;

pub use arith::{EncodingLength, Rat, RatMat, RatVec};
pub use polytope::{HPolytope, SeparationResult};
