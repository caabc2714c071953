//! Edge-element simulation of the spherical interface dynamo with the
//! quasi-vacuum boundary condition `B × n = 0`.
//!
//! The magnetic field is discretised with lowest-order Nédélec (Whitney)
//! elements on a tetrahedral mesh of the nested-shell ball. Each time step
//! solves `(M + τK) Bⁿ = M Bⁿ⁻¹ + τ F(Bⁿ⁻¹, tₙ)`, where the α-effect and
//! shear terms enter explicitly through their action on the curl of the
//! test functions.

pub mod assembly;
pub mod config;
pub mod dofmap;
pub mod dynamo;
pub mod error;
pub mod mesh;
pub mod model;
pub mod quadrature;
pub mod solver;
pub mod study;
pub mod sparse;
pub mod vtk;
pub mod whitney;

pub use assembly::{Discretization, FieldCoeffs};
pub use dofmap::EdgeDofMap;
pub use error::{Error, Result};
pub use mesh::{Mesh, Point3, Radii, Region};
pub use dynamo::{Mode, Simulation};
pub use model::Physics;
