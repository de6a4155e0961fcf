//! Equilibria in multiplayer games on graphs.
//!
//! Games are finite arenas with parity, mean-payoff, energy, discounted-sum or
//! terminal (simple stochastic) payoffs. The crate decides Nash and subgame-perfect
//! equilibrium questions through the negotiation function, verifies rational
//! behaviour of a leader through product games, and handles risk-sensitive
//! equilibria with extreme and entropic risk measures.

pub mod corpus;
pub mod error;
pub mod game;
pub mod graph;
pub mod lasso;
pub mod lp;
pub mod memory;
pub mod ne;
pub mod nego;
pub mod num;
pub mod poly;
pub mod product;
pub mod reduced;
pub mod risk;
pub mod spe;
pub mod ssg;
pub mod verification;
pub mod zs;

pub use error::{Error, Result};
pub use game::{Arena, Edge, Game, Mode, Owner, PayoffSpec, Vertex};
pub use lasso::{eval_lasso, Lasso};
pub use memory::MemoryProfile;
pub use num::{Ext, Q};
