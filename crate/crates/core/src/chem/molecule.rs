//! Molecular graph types: atoms, bonds and the molecule container.

use std::collections::BTreeSet;

use super::elements::{Element, HYDROGEN_WEIGHT};

/// Bond order in the molecular graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Contribution to an atom's bond order sum. Aromatic bonds count one
    /// unit; the aromatic pi contribution is added once per aromatic atom.
    pub fn valence_units(self) -> u32 {
        match self {
            BondOrder::Single | BondOrder::Aromatic => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
        }
    }
}

/// A heavy atom in the graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub element: Element,
    pub aromatic: bool,
    pub formal_charge: i32,
    /// Hydrogen count as written in a bracket atom; `None` for organic-subset
    /// atoms, whose hydrogens are assigned from default valences.
    pub explicit_h: Option<u32>,
    /// Resolved hydrogen count: `explicit_h` when given, otherwise the
    /// implicit count assigned after parsing.
    pub hydrogens: u32,
}

/// An undirected bond between two atom indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
}

impl Bond {
    /// The endpoint opposite `atom`, if `atom` is an endpoint.
    pub fn other(&self, atom: usize) -> Option<usize> {
        if self.a == atom {
            Some(self.b)
        } else if self.b == atom {
            Some(self.a)
        } else {
            None
        }
    }
}

/// A parsed molecule: heavy-atom graph plus perceived rings.
#[derive(Debug, Clone, PartialEq)]
pub struct Molecule {
    pub atoms: Vec<Atom>,
    pub bonds: Vec<Bond>,
    /// Minimum cycle basis, each ring as atom indices in cyclic order.
    pub rings: Vec<Vec<usize>>,
}

impl Molecule {
    /// Neighbors of `atom` as (neighbor index, bond order) pairs, in bond
    /// declaration order.
    pub fn neighbors(&self, atom: usize) -> Vec<(usize, BondOrder)> {
        self.bonds
            .iter()
            .filter_map(|b| b.other(atom).map(|o| (o, b.order)))
            .collect()
    }

    /// Count of heavy-atom neighbors.
    pub fn heavy_degree(&self, atom: usize) -> usize {
        self.bonds.iter().filter(|b| b.a == atom || b.b == atom).count()
    }

    pub fn bond_between(&self, a: usize, b: usize) -> Option<&Bond> {
        self.bonds
            .iter()
            .find(|x| (x.a == a && x.b == b) || (x.a == b && x.b == a))
    }

    /// Bond order sum for implicit-hydrogen purposes: one unit per single or
    /// aromatic bond, two per double, three per triple, plus one extra unit
    /// when the atom itself is aromatic (its share of the pi system).
    pub fn bond_order_sum(&self, atom: usize) -> u32 {
        let base: u32 = self
            .neighbors(atom)
            .iter()
            .map(|(_, order)| order.valence_units())
            .sum();
        if self.atoms[atom].aromatic {
            base + 1
        } else {
            base
        }
    }

    /// Assigns implicit hydrogen counts to atoms without an explicit count.
    ///
    /// The count is `max(0, adjusted_valence - bond_order_sum)` where the
    /// adjusted valence is the smallest charge-adjusted default valence that
    /// covers the bond order sum (see [`Element::charge_adjusted_valence`]).
    pub(crate) fn assign_implicit_hydrogens(&mut self) {
        for i in 0..self.atoms.len() {
            if let Some(h) = self.atoms[i].explicit_h {
                self.atoms[i].hydrogens = h;
                continue;
            }
            let sum = self.bond_order_sum(i);
            let atom = &self.atoms[i];
            let mut hydrogens = 0;
            for &v in atom.element.default_valences() {
                let adjusted = atom.element.charge_adjusted_valence(v, atom.formal_charge);
                if adjusted >= sum {
                    hydrogens = adjusted - sum;
                    break;
                }
            }
            self.atoms[i].hydrogens = hydrogens;
        }
    }

    /// Sum of standard atomic weights over heavy atoms and their hydrogens.
    pub fn molecular_weight(&self) -> f64 {
        self.atoms
            .iter()
            .map(|a| a.element.atomic_weight() + f64::from(a.hydrogens) * HYDROGEN_WEIGHT)
            .sum()
    }

    /// Unordered atom-index pairs that lie on some perceived ring.
    pub fn ring_edges(&self) -> BTreeSet<(usize, usize)> {
        let mut edges = BTreeSet::new();
        for ring in &self.rings {
            for k in 0..ring.len() {
                let a = ring[k];
                let b = ring[(k + 1) % ring.len()];
                edges.insert((a.min(b), a.max(b)));
            }
        }
        edges
    }

    /// Whether `atom` belongs to a perceived ring of exactly `size` atoms.
    pub fn in_ring_of_size(&self, atom: usize, size: usize) -> bool {
        self.rings
            .iter()
            .any(|r| r.len() == size && r.contains(&atom))
    }
}
