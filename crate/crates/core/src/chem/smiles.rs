//! SMILES subset parser and a non-canonical writer.
//!
//! Supported grammar: organic-subset atoms (B, C, N, O, P, S, F, Cl, Br, I),
//! lowercase aromatic atoms (b, c, n, o, p, s), bracket atoms with charge and
//! hydrogen count (isotope digits parsed and ignored), bond symbols `- = # :`,
//! branches `( )`, ring closures `1`-`9` and `%nn`, and dot disconnection.
//! Stereochemistry markers, wildcard atoms and atom maps are rejected.

use std::collections::BTreeMap;

use thiserror::Error;

use super::elements::Element;
use super::molecule::{Atom, Bond, BondOrder, Molecule};
use super::rings::perceive_rings;

/// Parse errors, each carrying the byte offset of the offending token.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmilesError {
    #[error("empty SMILES input")]
    EmptyInput,
    #[error("unknown or unsupported atom symbol `{token}` at byte {offset}")]
    UnknownAtomSymbol { offset: usize, token: String },
    #[error("unmatched parenthesis at byte {offset}")]
    UnmatchedParenthesis { offset: usize },
    #[error("unmatched or invalid ring closure at byte {offset}: {detail}")]
    UnmatchedRingClosure { offset: usize, detail: String },
}

impl SmilesError {
    /// Byte offset of the error, where applicable (0 for empty input).
    pub fn offset(&self) -> usize {
        match self {
            SmilesError::EmptyInput => 0,
            SmilesError::UnknownAtomSymbol { offset, .. }
            | SmilesError::UnmatchedParenthesis { offset }
            | SmilesError::UnmatchedRingClosure { offset, .. } => *offset,
        }
    }
}

fn unknown(offset: usize, token: impl Into<String>) -> SmilesError {
    SmilesError::UnknownAtomSymbol {
        offset,
        token: token.into(),
    }
}

fn ring_err(offset: usize, detail: impl Into<String>) -> SmilesError {
    SmilesError::UnmatchedRingClosure {
        offset,
        detail: detail.into(),
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    /// Atom the next bond attaches to; `None` at the start of a component.
    prev: Option<usize>,
    /// Explicit bond symbol awaiting its second endpoint, with its offset.
    pending_bond: Option<(BondOrder, usize)>,
    /// Open branch stack: (atom to return to, offset of the `(`).
    branch_stack: Vec<(Option<usize>, usize)>,
    /// Open ring closures: number -> (atom, bond symbol at opening, offset).
    ring_open: BTreeMap<u16, (usize, Option<BondOrder>, usize)>,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser {
            bytes: text.as_bytes(),
            pos: 0,
            atoms: Vec::new(),
            bonds: Vec::new(),
            prev: None,
            pending_bond: None,
            branch_stack: Vec::new(),
            ring_open: BTreeMap::new(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn add_bond(&mut self, a: usize, b: usize, order: BondOrder, offset: usize) -> Result<(), SmilesError> {
        if a == b {
            return Err(ring_err(offset, "bond endpoints are the same atom".to_string()));
        }
        if self
            .bonds
            .iter()
            .any(|x| (x.a == a && x.b == b) || (x.a == b && x.b == a))
        {
            return Err(ring_err(offset, "duplicate bond between atom pair".to_string()));
        }
        self.bonds.push(Bond { a, b, order });
        Ok(())
    }

    /// Bond order between two atoms when no symbol was written: aromatic if
    /// both endpoints are aromatic, single otherwise.
    fn default_order(&self, a: usize, b: usize) -> BondOrder {
        if self.atoms[a].aromatic && self.atoms[b].aromatic {
            BondOrder::Aromatic
        } else {
            BondOrder::Single
        }
    }

    fn push_atom(&mut self, atom: Atom, offset: usize) -> Result<(), SmilesError> {
        let idx = self.atoms.len();
        self.atoms.push(atom);
        match (self.prev, self.pending_bond.take()) {
            (Some(p), Some((order, bond_off))) => self.add_bond(p, idx, order, bond_off)?,
            (Some(p), None) => {
                let order = self.default_order(p, idx);
                self.add_bond(p, idx, order, offset)?;
            }
            (None, Some((_, bond_off))) => {
                return Err(unknown(bond_off, "bond symbol with no preceding atom"));
            }
            (None, None) => {}
        }
        self.prev = Some(idx);
        Ok(())
    }

    fn ring_closure(&mut self, number: u16, offset: usize) -> Result<(), SmilesError> {
        let current = match self.prev {
            Some(a) => a,
            None => return Err(ring_err(offset, "ring closure digit with no preceding atom".to_string())),
        };
        let pending = self.pending_bond.take().map(|(o, _)| o);
        match self.ring_open.remove(&number) {
            Some((other, opened_with, _)) => {
                let order = match (pending, opened_with) {
                    (None, None) => self.default_order(other, current),
                    (Some(o), None) | (None, Some(o)) => o,
                    (Some(a), Some(b)) if a == b => a,
                    (Some(_), Some(_)) => {
                        return Err(ring_err(offset, "conflicting bond orders on ring closure".to_string()))
                    }
                };
                self.add_bond(other, current, order, offset)
            }
            None => {
                self.ring_open.insert(number, (current, pending, offset));
                Ok(())
            }
        }
    }

    /// Parses the two-character or one-character element symbol starting at
    /// `self.pos` outside brackets. Handles Cl/Br lookahead.
    fn organic_atom(&mut self) -> Result<(), SmilesError> {
        let offset = self.pos;
        let b = self.bytes[self.pos];
        let (element, aromatic, len) = match b {
            b'C' if self.bytes.get(self.pos + 1) == Some(&b'l') => (Element::Cl, false, 2),
            b'B' if self.bytes.get(self.pos + 1) == Some(&b'r') => (Element::Br, false, 2),
            b'B' => (Element::B, false, 1),
            b'C' => (Element::C, false, 1),
            b'N' => (Element::N, false, 1),
            b'O' => (Element::O, false, 1),
            b'P' => (Element::P, false, 1),
            b'S' => (Element::S, false, 1),
            b'F' => (Element::F, false, 1),
            b'I' => (Element::I, false, 1),
            b'b' => (Element::B, true, 1),
            b'c' => (Element::C, true, 1),
            b'n' => (Element::N, true, 1),
            b'o' => (Element::O, true, 1),
            b'p' => (Element::P, true, 1),
            b's' => (Element::S, true, 1),
            other => return Err(unknown(offset, (other as char).to_string())),
        };
        self.pos += len;
        self.push_atom(
            Atom {
                element,
                aromatic,
                formal_charge: 0,
                explicit_h: None,
                hydrogens: 0,
            },
            offset,
        )
    }

    /// Parses a bracket atom starting at the `[`.
    fn bracket_atom(&mut self) -> Result<(), SmilesError> {
        let start = self.pos;
        self.pos += 1; // consume '['

        // Isotope digits: parsed and discarded.
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }

        let sym_off = self.pos;
        let (element, aromatic) = self.bracket_symbol(sym_off)?;
        if aromatic && !element.supports_aromatic() {
            return Err(unknown(sym_off, format!("aromatic form of {}", element.symbol())));
        }

        let mut explicit_h: u32 = 0;
        let mut charge: i32 = 0;
        loop {
            match self.peek() {
                Some(b']') => {
                    self.pos += 1;
                    break;
                }
                Some(b'H') => {
                    self.pos += 1;
                    explicit_h = self.digits().unwrap_or(1) as u32;
                }
                Some(b'+') => {
                    self.pos += 1;
                    charge += match self.digits() {
                        Some(n) => n as i32,
                        None => {
                            let mut c = 1;
                            while self.peek() == Some(b'+') {
                                self.pos += 1;
                                c += 1;
                            }
                            c
                        }
                    };
                }
                Some(b'-') => {
                    self.pos += 1;
                    charge -= match self.digits() {
                        Some(n) => n as i32,
                        None => {
                            let mut c = 1;
                            while self.peek() == Some(b'-') {
                                self.pos += 1;
                                c += 1;
                            }
                            c
                        }
                    };
                }
                Some(b'@') => return Err(unknown(self.pos, "@ (stereochemistry unsupported)")),
                Some(b':') => return Err(unknown(self.pos, ": (atom map unsupported)")),
                Some(other) => return Err(unknown(self.pos, (other as char).to_string())),
                None => return Err(unknown(start, "unterminated bracket atom")),
            }
        }

        self.push_atom(
            Atom {
                element,
                aromatic,
                formal_charge: charge,
                explicit_h: Some(explicit_h),
                hydrogens: 0,
            },
            start,
        )
    }

    fn bracket_symbol(&mut self, offset: usize) -> Result<(Element, bool), SmilesError> {
        let b = match self.peek() {
            Some(b) => b,
            None => return Err(unknown(offset, "unterminated bracket atom")),
        };
        if b == b'*' {
            return Err(unknown(offset, "* (wildcard atom unsupported)"));
        }
        if b.is_ascii_uppercase() {
            if let Some(&next) = self.bytes.get(self.pos + 1) {
                if next.is_ascii_lowercase() {
                    let two = &self.bytes[self.pos..self.pos + 2];
                    let two = std::str::from_utf8(two).unwrap_or("");
                    if let Some(el) = Element::from_symbol(two) {
                        self.pos += 2;
                        return Ok((el, false));
                    }
                }
            }
            let one = std::str::from_utf8(&self.bytes[self.pos..self.pos + 1]).unwrap_or("");
            if let Some(el) = Element::from_symbol(one) {
                self.pos += 1;
                return Ok((el, false));
            }
            return Err(unknown(offset, (b as char).to_string()));
        }
        if b.is_ascii_lowercase() {
            let el = match b {
                b'b' => Element::B,
                b'c' => Element::C,
                b'n' => Element::N,
                b'o' => Element::O,
                b'p' => Element::P,
                b's' => Element::S,
                other => return Err(unknown(offset, (other as char).to_string())),
            };
            self.pos += 1;
            return Ok((el, true));
        }
        Err(unknown(offset, (b as char).to_string()))
    }

    fn digits(&mut self) -> Option<u64> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            None
        } else {
            std::str::from_utf8(&self.bytes[start..self.pos])
                .ok()?
                .parse()
                .ok()
        }
    }

    fn run(mut self) -> Result<Molecule, SmilesError> {
        while let Some(b) = self.peek() {
            let offset = self.pos;
            match b {
                b'[' => self.bracket_atom()?,
                b'(' => {
                    if self.prev.is_none() {
                        return Err(SmilesError::UnmatchedParenthesis { offset });
                    }
                    if self.pending_bond.is_some() {
                        return Err(unknown(offset, "branch opening after bond symbol"));
                    }
                    self.branch_stack.push((self.prev, offset));
                    self.pos += 1;
                }
                b')' => {
                    if self.pending_bond.is_some() {
                        return Err(unknown(offset, "dangling bond before branch close"));
                    }
                    match self.branch_stack.pop() {
                        Some((saved, _)) => self.prev = saved,
                        None => return Err(SmilesError::UnmatchedParenthesis { offset }),
                    }
                    self.pos += 1;
                }
                b'-' => {
                    self.set_pending(BondOrder::Single, offset)?;
                }
                b'=' => {
                    self.set_pending(BondOrder::Double, offset)?;
                }
                b'#' => {
                    self.set_pending(BondOrder::Triple, offset)?;
                }
                b':' => {
                    self.set_pending(BondOrder::Aromatic, offset)?;
                }
                b'.' => {
                    if self.pending_bond.is_some() {
                        return Err(unknown(offset, ". after bond symbol"));
                    }
                    self.prev = None;
                    self.pos += 1;
                }
                b'0'..=b'9' => {
                    self.pos += 1;
                    self.ring_closure(u16::from(b - b'0'), offset)?;
                }
                b'%' => {
                    self.pos += 1;
                    let d1 = self.peek().filter(u8::is_ascii_digit);
                    let d2 = self.bytes.get(self.pos + 1).copied().filter(|c| c.is_ascii_digit());
                    match (d1, d2) {
                        (Some(a), Some(c)) => {
                            self.pos += 2;
                            self.ring_closure(u16::from(a - b'0') * 10 + u16::from(c - b'0'), offset)?;
                        }
                        _ => return Err(ring_err(offset, "% must be followed by two digits".to_string())),
                    }
                }
                b'/' | b'\\' => return Err(unknown(offset, "bond stereochemistry unsupported")),
                b'*' => return Err(unknown(offset, "* (wildcard atom unsupported)")),
                _ => self.organic_atom()?,
            }
        }

        if let Some((_, offset)) = self.pending_bond {
            return Err(unknown(offset, "bond symbol at end of input"));
        }
        if let Some(&(_, offset)) = self.branch_stack.first() {
            return Err(SmilesError::UnmatchedParenthesis { offset });
        }
        if let Some((&_num, &(_, _, offset))) = self.ring_open.iter().next() {
            return Err(ring_err(offset, "ring closure never matched".to_string()));
        }
        if self.atoms.is_empty() {
            return Err(SmilesError::EmptyInput);
        }

        let mut mol = Molecule {
            atoms: self.atoms,
            bonds: self.bonds,
            rings: Vec::new(),
        };
        mol.assign_implicit_hydrogens();
        mol.rings = perceive_rings(&mol);
        Ok(mol)
    }

    fn set_pending(&mut self, order: BondOrder, offset: usize) -> Result<(), SmilesError> {
        if self.pending_bond.is_some() {
            return Err(unknown(offset, "two consecutive bond symbols"));
        }
        if self.prev.is_none() {
            return Err(unknown(offset, "bond symbol with no preceding atom"));
        }
        self.pending_bond = Some((order, offset));
        self.pos += 1;
        Ok(())
    }
}

/// Parses a SMILES string into a [`Molecule`] with implicit hydrogens
/// assigned and rings perceived.
pub fn parse_smiles(text: &str) -> Result<Molecule, SmilesError> {
    if text.is_empty() {
        return Err(SmilesError::EmptyInput);
    }
    Parser::new(text).run()
}

/// Writes a (non-canonical) SMILES string for the molecule and returns the
/// order in which original atom indices were emitted. Parsing the returned
/// string yields a graph whose atom `j` corresponds to original atom
/// `order[j]`.
pub fn write_smiles_ordered(mol: &Molecule) -> (String, Vec<usize>) {
    let n = mol.atoms.len();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut out = String::new();

    // Ring-closure digits for back edges, assigned per edge.
    let mut ring_digits: BTreeMap<(usize, usize), u16> = BTreeMap::new();
    let mut next_digit: u16 = 1;
    let mut free_digits: Vec<u16> = Vec::new();

    // Pre-compute the DFS spanning forest to identify back edges.
    let mut tree_edge = vec![false; mol.bonds.len()];
    let mut back_edges_at: Vec<Vec<usize>> = vec![Vec::new(); n];
    {
        let mut seen = vec![false; n];
        for root in 0..n {
            if seen[root] {
                continue;
            }
            let mut stack = vec![root];
            seen[root] = true;
            while let Some(v) = stack.pop() {
                let mut nbrs: Vec<(usize, usize)> = mol
                    .bonds
                    .iter()
                    .enumerate()
                    .filter_map(|(ei, b)| b.other(v).map(|o| (o, ei)))
                    .collect();
                nbrs.sort();
                for (o, ei) in nbrs {
                    if !seen[o] {
                        seen[o] = true;
                        tree_edge[ei] = true;
                        stack.push(o);
                    }
                }
            }
        }
        // Re-walk to attach each back edge to both endpoints.
        for (ei, b) in mol.bonds.iter().enumerate() {
            if !tree_edge[ei] {
                back_edges_at[b.a].push(ei);
                back_edges_at[b.b].push(ei);
            }
        }
    }

    fn atom_token(mol: &Molecule, i: usize) -> String {
        let atom = &mol.atoms[i];
        let symbol = if atom.aromatic {
            atom.element.symbol().to_lowercase()
        } else {
            atom.element.symbol().to_string()
        };
        if atom.formal_charge == 0 && atom.explicit_h.is_none() {
            return symbol;
        }
        let mut t = format!("[{symbol}");
        match atom.hydrogens {
            0 => {}
            1 => t.push('H'),
            h => t.push_str(&format!("H{h}")),
        }
        match atom.formal_charge {
            0 => {}
            1 => t.push('+'),
            -1 => t.push('-'),
            c if c > 0 => t.push_str(&format!("+{c}")),
            c => t.push_str(&format!("-{}", -c)),
        }
        t.push(']');
        t
    }

    fn bond_token(mol: &Molecule, a: usize, b: usize, order: BondOrder) -> &'static str {
        let default = if mol.atoms[a].aromatic && mol.atoms[b].aromatic {
            BondOrder::Aromatic
        } else {
            BondOrder::Single
        };
        if order == default {
            return "";
        }
        match order {
            BondOrder::Single => "-",
            BondOrder::Double => "=",
            BondOrder::Triple => "#",
            BondOrder::Aromatic => ":",
        }
    }

    fn digit_token(d: u16) -> String {
        if d < 10 {
            d.to_string()
        } else {
            format!("%{d:02}")
        }
    }

    // Iterative DFS emission with explicit frames so branches close properly.
    #[allow(clippy::too_many_arguments)]
    fn emit(
        mol: &Molecule,
        v: usize,
        visited: &mut [bool],
        order: &mut Vec<usize>,
        out: &mut String,
        tree_edge: &[bool],
        back_edges_at: &[Vec<usize>],
        ring_digits: &mut BTreeMap<(usize, usize), u16>,
        next_digit: &mut u16,
        free_digits: &mut Vec<u16>,
    ) {
        visited[v] = true;
        order.push(v);
        out.push_str(&atom_token(mol, v));

        // Ring closure digits on this atom.
        for &ei in &back_edges_at[v] {
            let b = &mol.bonds[ei];
            let key = (b.a.min(b.b), b.a.max(b.b));
            match ring_digits.get(&key).copied() {
                Some(d) => {
                    // Second visit closes the ring; the bond symbol was
                    // written at the opening side.
                    out.push_str(&digit_token(d));
                    ring_digits.remove(&key);
                    free_digits.push(d);
                }
                None => {
                    let d = free_digits.pop().unwrap_or_else(|| {
                        let d = *next_digit;
                        *next_digit += 1;
                        d
                    });
                    ring_digits.insert(key, d);
                    out.push_str(bond_token(mol, b.a, b.b, b.order));
                    out.push_str(&digit_token(d));
                }
            }
        }

        let mut children: Vec<usize> = mol
            .bonds
            .iter()
            .enumerate()
            .filter(|(ei, _)| tree_edge[*ei])
            .filter_map(|(_, b)| b.other(v))
            .filter(|&o| !visited[o])
            .collect();
        children.sort_unstable();
        children.dedup();

        let last = children.len().saturating_sub(1);
        for (k, &child) in children.iter().enumerate() {
            if visited[child] {
                continue;
            }
            let bond = mol.bond_between(v, child).unwrap();
            let token = bond_token(mol, v, child, bond.order);
            if k < last {
                out.push('(');
                out.push_str(token);
                emit(
                    mol, child, visited, order, out, tree_edge, back_edges_at, ring_digits,
                    next_digit, free_digits,
                );
                out.push(')');
            } else {
                out.push_str(token);
                emit(
                    mol, child, visited, order, out, tree_edge, back_edges_at, ring_digits,
                    next_digit, free_digits,
                );
            }
        }
    }

    let mut first = true;
    for root in 0..n {
        if visited[root] {
            continue;
        }
        if !first {
            out.push('.');
        }
        first = false;
        emit(
            mol,
            root,
            &mut visited,
            &mut order,
            &mut out,
            &tree_edge,
            &back_edges_at,
            &mut ring_digits,
            &mut next_digit,
            &mut free_digits,
        );
    }
    (out, order)
}

/// Writes a (non-canonical) SMILES string for the molecule.
pub fn write_smiles(mol: &Molecule) -> String {
    write_smiles_ordered(mol).0
}
