//! Symbolic and numerical calculus for total foliations on 3-manifolds.
//!
//! The library has two halves that check each other:
//!
//! * an exact integer/rational ledger — 2×2 integer matrix algebra
//!   ([`sl2z`]), closed-braid invariants ([`braidlink`]), the block algebra
//!   of twisted foliated slabs with its rotation ledger ([`folblocks`]),
//!   framing/surgery/spin/Hopf bookkeeping ([`invariants`]) and an
//!   end-to-end construction planner emitting verifiable certificates
//!   ([`planner`]);
//! * a numerical verifier ([`geomcheck`]) that evaluates the explicit model
//!   1-forms on grids and checks transversality, integrability residuals,
//!   slope bounds, boundary gluing and — via the rotation oracle — the
//!   ledger's rotation values.

pub mod braidlink;
pub mod folblocks;
pub mod geomcheck;
pub mod invariants;
pub mod planner;
pub mod sl2z;

pub use sl2z::Gl2z;
