//! Structured P1 meshes, nodal fields and assembly of the frozen-convection
//! energy `J(v) = ∫ A(|∇v|) - ∫ f v`.

mod assemble;
mod field;
mod mesh;
mod sparse;

pub use assemble::{
    assemble, assemble_serial, assemble_with, energy, nodal_residual, regularization_for, AssembledSystem,
};
pub use field::DiscreteField;
pub use mesh::{build_mesh, Domain, Mesh};
pub use sparse::SparseSym;
