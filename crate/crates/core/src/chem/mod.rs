//! SMILES parsing and native 2D molecular descriptors.
//!
//! All operations are pure functions on immutable inputs; nothing here holds
//! global state beyond the lazily parsed fragment table.

mod descriptors;
mod elements;
mod molecule;
mod rings;
mod smiles;
mod topology;
mod tpsa;

pub use descriptors::{
    compute_descriptors, count_aromatic_rings, count_hba, count_hbd, count_rotatable_bonds,
    fraction_csp3, DescriptorDiagnostics, DescriptorVector,
};
pub use elements::{Element, HYDROGEN_WEIGHT};
pub use molecule::{Atom, Bond, BondOrder, Molecule};
pub use rings::{minimum_cycle_basis, perceive_rings};
pub use smiles::{parse_smiles, write_smiles, write_smiles_ordered, SmilesError};
pub use topology::{bertz_ct, chi_indices, ChiIndices};
pub use tpsa::{tpsa_ertl, tpsa_ertl_with_diagnostics};
