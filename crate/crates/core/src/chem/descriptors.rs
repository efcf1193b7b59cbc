//! The 2D descriptor set computed natively from parsed molecules.

use super::elements::Element;
use super::molecule::{BondOrder, Molecule};
use super::topology::{bertz_ct, chi_indices};
use super::tpsa::tpsa_ertl_with_diagnostics;

/// Counters surfaced alongside descriptor values: how often total-function
/// fallbacks fired while computing them.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DescriptorDiagnostics {
    /// Polar atoms matched by the nearest-fragment fallback in the TPSA table.
    pub tpsa_fallback_atoms: usize,
    /// Atoms with non-positive valence delta, skipped by the chi indices.
    pub chi_skipped_atoms: usize,
}

/// The fixed named descriptor set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescriptorVector {
    pub mol_weight: f64,
    pub heavy_atoms: f64,
    pub num_hbd: f64,
    pub num_hba: f64,
    pub num_rotatable_bonds: f64,
    pub num_aromatic_rings: f64,
    pub fraction_csp3: f64,
    pub tpsa: f64,
    pub bertz_ct: f64,
    pub chi0n: f64,
    pub chi1n: f64,
    pub diagnostics: DescriptorDiagnostics,
}

impl DescriptorVector {
    /// Descriptor names in canonical output order.
    pub const NAMES: [&'static str; 11] = [
        "mol_weight",
        "heavy_atoms",
        "num_hbd",
        "num_hba",
        "num_rotatable_bonds",
        "num_aromatic_rings",
        "fraction_csp3",
        "tpsa",
        "bertz_ct",
        "chi0n",
        "chi1n",
    ];

    /// Values in the order of [`DescriptorVector::NAMES`].
    pub fn values(&self) -> [f64; 11] {
        [
            self.mol_weight,
            self.heavy_atoms,
            self.num_hbd,
            self.num_hba,
            self.num_rotatable_bonds,
            self.num_aromatic_rings,
            self.fraction_csp3,
            self.tpsa,
            self.bertz_ct,
            self.chi0n,
            self.chi1n,
        ]
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Self::NAMES
            .iter()
            .position(|&n| n == name)
            .map(|i| self.values()[i])
    }
}

/// Count of N or O atoms bearing at least one hydrogen.
pub fn count_hbd(mol: &Molecule) -> usize {
    mol.atoms
        .iter()
        .filter(|a| matches!(a.element, Element::N | Element::O) && a.hydrogens >= 1)
        .count()
}

/// Count of N and O atoms.
pub fn count_hba(mol: &Molecule) -> usize {
    mol.atoms
        .iter()
        .filter(|a| matches!(a.element, Element::N | Element::O))
        .count()
}

/// Whether the bond is an amide linkage: a single C-N bond where the carbon
/// carries a double bond to oxygen.
fn is_amide_bond(mol: &Molecule, a: usize, b: usize) -> bool {
    let carbonyl = |c: usize, n: usize| {
        mol.atoms[c].element == Element::C
            && mol.atoms[n].element == Element::N
            && mol.neighbors(c).iter().any(|&(o, order)| {
                order == BondOrder::Double && mol.atoms[o].element == Element::O
            })
    };
    carbonyl(a, b) || carbonyl(b, a)
}

/// Non-ring single bonds whose endpoints both have heavy degree >= 2,
/// excluding amide C-N bonds.
pub fn count_rotatable_bonds(mol: &Molecule) -> usize {
    let ring_edges = mol.ring_edges();
    mol.bonds
        .iter()
        .filter(|bond| bond.order == BondOrder::Single)
        .filter(|bond| !ring_edges.contains(&(bond.a.min(bond.b), bond.a.max(bond.b))))
        .filter(|bond| mol.heavy_degree(bond.a) >= 2 && mol.heavy_degree(bond.b) >= 2)
        .filter(|bond| !is_amide_bond(mol, bond.a, bond.b))
        .count()
}

/// Perceived rings whose atoms are all aromatic.
pub fn count_aromatic_rings(mol: &Molecule) -> usize {
    mol.rings
        .iter()
        .filter(|ring| ring.iter().all(|&i| mol.atoms[i].aromatic))
        .count()
}

/// Fraction of carbons that are sp3: non-aromatic carbons with no double or
/// triple bonds. Zero when the molecule has no carbons.
pub fn fraction_csp3(mol: &Molecule) -> f64 {
    let mut carbons = 0usize;
    let mut sp3 = 0usize;
    for (i, atom) in mol.atoms.iter().enumerate() {
        if atom.element != Element::C {
            continue;
        }
        carbons += 1;
        if atom.aromatic {
            continue;
        }
        let saturated = mol
            .neighbors(i)
            .iter()
            .all(|&(_, order)| !matches!(order, BondOrder::Double | BondOrder::Triple));
        if saturated {
            sp3 += 1;
        }
    }
    if carbons == 0 {
        0.0
    } else {
        sp3 as f64 / carbons as f64
    }
}

/// Computes the full named descriptor set. Expects rings to be perceived
/// (which [`crate::chem::parse_smiles`] always does).
pub fn compute_descriptors(mol: &Molecule) -> DescriptorVector {
    let (tpsa, tpsa_fallback_atoms) = tpsa_ertl_with_diagnostics(mol);
    let chi = chi_indices(mol);
    DescriptorVector {
        mol_weight: mol.molecular_weight(),
        heavy_atoms: mol.atoms.len() as f64,
        num_hbd: count_hbd(mol) as f64,
        num_hba: count_hba(mol) as f64,
        num_rotatable_bonds: count_rotatable_bonds(mol) as f64,
        num_aromatic_rings: count_aromatic_rings(mol) as f64,
        fraction_csp3: fraction_csp3(mol),
        tpsa,
        bertz_ct: bertz_ct(mol),
        chi0n: chi.chi0n,
        chi1n: chi.chi1n,
        diagnostics: DescriptorDiagnostics {
            tpsa_fallback_atoms,
            chi_skipped_atoms: chi.skipped_atoms,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::parse_smiles;

    #[test]
    fn ethanol_descriptor_examples() {
        let mol = parse_smiles("CCO").unwrap();
        let d = compute_descriptors(&mol);
        assert_eq!(d.num_hbd, 1.0);
        assert_eq!(d.num_hba, 1.0);
        assert_eq!(d.num_rotatable_bonds, 0.0);
        assert_eq!(d.num_aromatic_rings, 0.0);
        assert_eq!(d.fraction_csp3, 1.0);
    }

    #[test]
    fn benzene_descriptor_examples() {
        let mol = parse_smiles("c1ccccc1").unwrap();
        let d = compute_descriptors(&mol);
        assert_eq!(d.num_hbd, 0.0);
        assert_eq!(d.num_hba, 0.0);
        assert_eq!(d.fraction_csp3, 0.0);
        assert_eq!(d.num_aromatic_rings, 1.0);
    }

    #[test]
    fn butane_has_one_rotatable_bond() {
        let mol = parse_smiles("CCCC").unwrap();
        assert_eq!(count_rotatable_bonds(&mol), 1);
    }

    #[test]
    fn amide_bond_is_not_rotatable() {
        // N-methylacetamide: without the amide exclusion the bond between
        // carbonyl carbon and nitrogen would count.
        let mol = parse_smiles("CC(=O)NC").unwrap();
        assert_eq!(count_rotatable_bonds(&mol), 0);
        // Methyl acetate: the analogous C-O bond is not an amide and counts.
        let ester = parse_smiles("CC(=O)OC").unwrap();
        assert_eq!(count_rotatable_bonds(&ester), 1);
    }

    #[test]
    fn ring_bonds_are_not_rotatable() {
        let mol = parse_smiles("C1CCCCC1").unwrap();
        assert_eq!(count_rotatable_bonds(&mol), 0);
    }

    #[test]
    fn partially_aromatic_rings_are_not_aromatic_rings() {
        // Indane: one aromatic ring fused to one saturated ring.
        let mol = parse_smiles("C1Cc2ccccc2C1").unwrap();
        assert_eq!(count_aromatic_rings(&mol), 1);
        assert_eq!(mol.rings.len(), 2);
    }

    #[test]
    fn descriptor_names_align_with_values() {
        let mol = parse_smiles("CCO").unwrap();
        let d = compute_descriptors(&mol);
        assert_eq!(d.get("tpsa"), Some(d.tpsa));
        assert_eq!(d.get("chi1n"), Some(d.chi1n));
        assert_eq!(d.get("nope"), None);
        assert_eq!(DescriptorVector::NAMES.len(), d.values().len());
    }
}
