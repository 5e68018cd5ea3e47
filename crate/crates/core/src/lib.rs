//! Monolithic finite element solver for a 2D transient Stokes flow coupled to
//! a poroelastic (Biot) medium across a shared interface.
//!
//! The coupling conditions (mass conservation, normal/tangential stress
//! balance with a Beavers-Joseph-Saffman slip law, and Darcy flux continuity)
//! are enforced weakly through three interface Lagrange multipliers: the
//! normal fluid stress, the tangential fluid stress, and the Darcy flux. Each
//! backward-Euler step solves one symmetric-indefinite saddle point system in
//! dt-scaled variables; a fractional-norm stabilization block on the flux
//! multiplier makes the operator coercive.
//!
//! Alongside the time stepper, the `analysis` module measures the coercivity
//! constant and the discrete inf-sup constant of the assembled system and
//! monitors a per-step energy identity; `verification` provides manufactured
//! solutions, convergence studies, and independent solve oracles.

pub mod elements;
pub mod error;
pub mod forms;
pub mod mesh;
pub mod solver;
pub mod system;
pub mod sparse;

pub use error::{Error, Result};
pub use forms::PhysicalParams;
