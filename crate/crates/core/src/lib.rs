//! Exact combinatorial invariants of Legendrian products.
//!
//! A chord-generic Legendrian is represented purely by combinatorial data:
//! its dimension, Euler data, Reeb chords (exact rational action plus sign),
//! Morse perturbation points and Maslov vector.  On top of that model the
//! crate computes the Thurston-Bennequin number of two-factor products in
//! closed form, enumerates the Reeb chords of the Morse-perturbed product,
//! evaluates the three-knot closed form, parses planar Lagrangian-projection
//! diagrams, and explores achievable tb values under face-area constraints
//! with an exact rational Fourier-Motzkin solver.
//!
//! All arithmetic on chord actions is exact; no floating point enters any
//! invariant computation.

pub mod cli;
pub mod diagram;
pub mod explore;
pub mod feasibility;
pub mod model;
pub mod product;
pub mod rational;
pub mod sign;
pub mod triple;

pub use model::{LegendrianModel, MorseCritical, ReebChord};
pub use rational::Rational;
pub use sign::Sign;
