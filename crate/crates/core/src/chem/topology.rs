//! Graph-topological descriptors: Kier-Hall valence connectivity indices
//! and a simplified Bertz complexity index.

use std::collections::BTreeMap;

use super::molecule::{BondOrder, Molecule};

/// Valence connectivity indices of order zero and one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiIndices {
    pub chi0n: f64,
    pub chi1n: f64,
    /// Atoms with non-positive valence delta, skipped from both sums.
    pub skipped_atoms: usize,
}

/// Valence delta per heavy atom: `(Zv - h) / (Z - Zv - 1)` with `Zv` the
/// valence electron count, `h` the attached hydrogens and `Z` the atomic
/// number.
fn valence_delta(mol: &Molecule, idx: usize) -> f64 {
    let atom = &mol.atoms[idx];
    let zv = f64::from(atom.element.valence_electrons());
    let z = f64::from(atom.element.atomic_number());
    let h = f64::from(atom.hydrogens);
    (zv - h) / (z - zv - 1.0)
}

/// Computes chi0n (sum of `delta^-1/2` over atoms) and chi1n (sum of
/// `(delta_i * delta_j)^-1/2` over bonds). Atoms with `delta <= 0` are
/// skipped and counted; bonds touching a skipped atom are skipped too.
pub fn chi_indices(mol: &Molecule) -> ChiIndices {
    let deltas: Vec<f64> = (0..mol.atoms.len()).map(|i| valence_delta(mol, i)).collect();
    let mut chi0n = 0.0;
    let mut skipped = 0;
    for &d in &deltas {
        if d > 0.0 {
            chi0n += 1.0 / d.sqrt();
        } else {
            skipped += 1;
        }
    }
    let mut chi1n = 0.0;
    for bond in &mol.bonds {
        let (da, db) = (deltas[bond.a], deltas[bond.b]);
        if da > 0.0 && db > 0.0 {
            chi1n += 1.0 / (da * db).sqrt();
        }
    }
    ChiIndices {
        chi0n,
        chi1n,
        skipped_atoms: skipped,
    }
}

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Simplified Bertz complexity index `CT = C_connect + C_hetero`.
///
/// `C_connect = 2*P*log2(P) - sum_i p_i*log2(p_i)` where `P` counts the
/// length-2 paths (pairs of bonds sharing an atom) and the `p_i` are class
/// sizes grouping those connections by the sorted endpoint-degree pair and
/// the sorted pair of bond orders. `C_hetero = N*log2(N) - sum_e N_e*log2(N_e)`
/// over heavy-atom element counts. Classes are degree-based, not
/// automorphism-based, so exact parity with other toolkits is not expected.
pub fn bertz_ct(mol: &Molecule) -> f64 {
    let n_atoms = mol.atoms.len();
    let degrees: Vec<usize> = (0..n_atoms).map(|i| mol.heavy_degree(i)).collect();

    let mut classes: BTreeMap<(usize, usize, BondOrder, BondOrder), usize> = BTreeMap::new();
    let mut total_paths: usize = 0;
    for center in 0..n_atoms {
        let incident: Vec<(usize, BondOrder)> = mol.neighbors(center);
        for i in 0..incident.len() {
            for j in (i + 1)..incident.len() {
                let (u, order_u) = incident[i];
                let (w, order_w) = incident[j];
                let (dlo, dhi) = if degrees[u] <= degrees[w] {
                    (degrees[u], degrees[w])
                } else {
                    (degrees[w], degrees[u])
                };
                let (blo, bhi) = if order_u <= order_w {
                    (order_u, order_w)
                } else {
                    (order_w, order_u)
                };
                *classes.entry((dlo, dhi, blo, bhi)).or_insert(0) += 1;
                total_paths += 1;
            }
        }
    }

    let p = total_paths as f64;
    let connect = 2.0 * xlog2x(p)
        - classes
            .values()
            .map(|&count| xlog2x(count as f64))
            .sum::<f64>();

    let mut element_counts: BTreeMap<&'static str, usize> = BTreeMap::new();
    for atom in &mol.atoms {
        *element_counts.entry(atom.element.symbol()).or_insert(0) += 1;
    }
    let n = n_atoms as f64;
    let hetero = xlog2x(n)
        - element_counts
            .values()
            .map(|&count| xlog2x(count as f64))
            .sum::<f64>();

    connect + hetero
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::parse_smiles;

    #[test]
    fn ethane_chi_values() {
        // Each carbon: h = 3, delta = (4 - 3) / 1 = 1.
        let mol = parse_smiles("CC").unwrap();
        let chi = chi_indices(&mol);
        assert!((chi.chi0n - 2.0).abs() < 1e-12);
        assert!((chi.chi1n - 1.0).abs() < 1e-12);
        assert_eq!(chi.skipped_atoms, 0);
    }

    #[test]
    fn ethanol_chi0n() {
        // Deltas: CH3 -> 1, CH2 -> 2, OH -> 5.
        let mol = parse_smiles("CCO").unwrap();
        let chi = chi_indices(&mol);
        let expected = 1.0 + 1.0 / 2f64.sqrt() + 1.0 / 5f64.sqrt();
        assert!((chi.chi0n - expected).abs() < 1e-12);
    }

    #[test]
    fn methane_carbon_is_skipped() {
        // Lone carbon with four hydrogens: delta = 0, skipped.
        let mol = parse_smiles("C").unwrap();
        let chi = chi_indices(&mol);
        assert_eq!(chi.chi0n, 0.0);
        assert_eq!(chi.chi1n, 0.0);
        assert_eq!(chi.skipped_atoms, 1);
    }

    #[test]
    fn halogen_deltas_use_the_full_formula() {
        // Chloromethane: Cl delta = (7 - 0) / (17 - 7 - 1) = 7/9.
        let mol = parse_smiles("CCl").unwrap();
        let chi = chi_indices(&mol);
        let d_c: f64 = 1.0; // (4 - 3) / 1
        let d_cl: f64 = 7.0 / 9.0;
        assert!((chi.chi0n - (1.0 / d_c.sqrt() + 1.0 / d_cl.sqrt())).abs() < 1e-12);
        assert!((chi.chi1n - 1.0 / (d_c * d_cl).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn methane_and_ethane_have_zero_bertz() {
        assert_eq!(bertz_ct(&parse_smiles("C").unwrap()), 0.0);
        assert_eq!(bertz_ct(&parse_smiles("CC").unwrap()), 0.0);
    }

    #[test]
    fn butane_bertz_is_two() {
        // P = 2 length-2 paths, both in one class: 2*2*1 - 2*1 = 2.
        let mol = parse_smiles("CCCC").unwrap();
        assert!((bertz_ct(&mol) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn hetero_term_separates_elements() {
        // Ethanol: no length-2 path classes differ, but elements do.
        let mol = parse_smiles("CCO").unwrap();
        let expected_hetero = 3.0 * 3f64.log2() - 2.0 * 2f64.log2();
        let expected_connect = 2.0 * 1.0 * 0.0 - 0.0; // P = 1, log2(1) = 0
        assert!((bertz_ct(&mol) - (expected_hetero + expected_connect)).abs() < 1e-12);
    }
}
