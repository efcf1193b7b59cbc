//! Ring perception: a minimum cycle basis of the bond graph.
//!
//! Horton's construction: candidate cycles are built from per-vertex
//! shortest-path trees (`path(v,x) + edge(x,y) + path(y,v)`), sorted by
//! length, and greedily accepted while linearly independent over GF(2) in
//! edge space. For molecular graphs this yields the familiar smallest set of
//! smallest rings, with `|bonds| - |atoms| + components` members.

use std::collections::BTreeSet;

use super::molecule::Molecule;

/// Returns the minimum cycle basis of the molecule's bond graph.
///
/// Each cycle lists atom indices in cyclic order, rotated so the smallest
/// index comes first and oriented toward its smaller neighbor. Cycles are
/// sorted by smallest member index, then length, then lexicographically.
pub fn perceive_rings(mol: &Molecule) -> Vec<Vec<usize>> {
    let edges: Vec<(usize, usize)> = mol.bonds.iter().map(|b| (b.a, b.b)).collect();
    minimum_cycle_basis(mol.atoms.len(), &edges)
}

/// Minimum cycle basis of an undirected simple graph given as an edge list.
pub fn minimum_cycle_basis(n_atoms: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let m = edges.len();
    if n_atoms == 0 || m == 0 {
        return Vec::new();
    }

    let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n_atoms];
    for (ei, &(a, b)) in edges.iter().enumerate() {
        adjacency[a].push((b, ei));
        adjacency[b].push((a, ei));
    }

    let components = count_components(n_atoms, &adjacency);
    let dim = m + components;
    if dim <= n_atoms {
        return Vec::new();
    }
    let dim = dim - n_atoms;

    let words = m.div_ceil(64);
    let mut candidates: Vec<Candidate> = Vec::new();
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();

    for root in 0..n_atoms {
        let (dist, parent, parent_edge) = bfs(root, n_atoms, &adjacency);
        for (ei, &(x, y)) in edges.iter().enumerate() {
            if dist[x] == usize::MAX || dist[y] == usize::MAX {
                continue;
            }
            if parent_edge[x] == Some(ei) || parent_edge[y] == Some(ei) {
                continue; // tree edge of this root
            }
            let path_x = tree_path(x, &parent);
            let path_y = tree_path(y, &parent);
            if !disjoint_except_root(root, &path_x, &path_y) {
                continue;
            }
            // Cycle atoms in order: root..x then y..root (root listed once).
            let mut atoms: Vec<usize> = path_x.iter().rev().copied().collect();
            atoms.extend(path_y.iter().take(path_y.len() - 1).copied());
            let mut bits = vec![0u64; words];
            set_bit(&mut bits, ei);
            for &a in &[x, y] {
                let mut cur = a;
                while let Some(pe) = parent_edge[cur] {
                    set_bit(&mut bits, pe);
                    cur = parent[cur].unwrap();
                }
            }
            if seen.insert(bits.clone()) {
                let mut sorted = atoms.clone();
                sorted.sort_unstable();
                candidates.push(Candidate {
                    len: atoms.len(),
                    sorted,
                    atoms,
                    bits,
                });
            }
        }
    }

    candidates.sort_by(|a, b| {
        a.len
            .cmp(&b.len)
            .then_with(|| a.sorted.cmp(&b.sorted))
            .then_with(|| a.bits.cmp(&b.bits))
    });

    // Greedy GF(2) independence over edge space.
    let mut basis_rows: Vec<Vec<u64>> = Vec::new();
    let mut selected: Vec<Vec<usize>> = Vec::new();
    for cand in candidates {
        if selected.len() == dim {
            break;
        }
        let mut reduced = cand.bits.clone();
        for row in &basis_rows {
            let pivot = leading_bit(row);
            if bit_set(&reduced, pivot) {
                xor_into(&mut reduced, row);
            }
        }
        if reduced.iter().any(|&w| w != 0) {
            basis_rows.push(reduced);
            selected.push(canonical_cycle(cand.atoms));
        }
    }
    debug_assert_eq!(selected.len(), dim);

    selected.sort_by(|a, b| {
        a[0].cmp(&b[0])
            .then_with(|| a.len().cmp(&b.len()))
            .then_with(|| a.cmp(b))
    });
    selected
}

struct Candidate {
    len: usize,
    sorted: Vec<usize>,
    atoms: Vec<usize>,
    bits: Vec<u64>,
}

fn count_components(n: usize, adjacency: &[Vec<(usize, usize)>]) -> usize {
    let mut seen = vec![false; n];
    let mut components = 0;
    for root in 0..n {
        if seen[root] {
            continue;
        }
        components += 1;
        let mut stack = vec![root];
        seen[root] = true;
        while let Some(v) = stack.pop() {
            for &(o, _) in &adjacency[v] {
                if !seen[o] {
                    seen[o] = true;
                    stack.push(o);
                }
            }
        }
    }
    components
}

#[allow(clippy::type_complexity)]
fn bfs(
    root: usize,
    n: usize,
    adjacency: &[Vec<(usize, usize)>],
) -> (Vec<usize>, Vec<Option<usize>>, Vec<Option<usize>>) {
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![None; n];
    let mut parent_edge = vec![None; n];
    let mut queue = std::collections::VecDeque::new();
    dist[root] = 0;
    queue.push_back(root);
    while let Some(v) = queue.pop_front() {
        // Sorted neighbor order keeps shortest-path trees deterministic.
        let mut nbrs = adjacency[v].clone();
        nbrs.sort_unstable();
        for (o, ei) in nbrs {
            if dist[o] == usize::MAX {
                dist[o] = dist[v] + 1;
                parent[o] = Some(v);
                parent_edge[o] = Some(ei);
                queue.push_back(o);
            }
        }
    }
    (dist, parent, parent_edge)
}

/// Path from `v` up to its tree root, inclusive: `[v, parent(v), .., root]`.
fn tree_path(v: usize, parent: &[Option<usize>]) -> Vec<usize> {
    let mut path = vec![v];
    let mut cur = v;
    while let Some(p) = parent[cur] {
        path.push(p);
        cur = p;
    }
    path
}

fn disjoint_except_root(root: usize, path_x: &[usize], path_y: &[usize]) -> bool {
    let set_x: BTreeSet<usize> = path_x.iter().copied().collect();
    for &a in path_y {
        if a != root && set_x.contains(&a) {
            return false;
        }
    }
    true
}

fn set_bit(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

fn bit_set(bits: &[u64], i: usize) -> bool {
    bits[i / 64] & (1 << (i % 64)) != 0
}

fn leading_bit(bits: &[u64]) -> usize {
    for (w, &word) in bits.iter().enumerate() {
        if word != 0 {
            return w * 64 + word.trailing_zeros() as usize;
        }
    }
    unreachable!("basis rows are nonzero")
}

fn xor_into(target: &mut [u64], source: &[u64]) {
    for (t, s) in target.iter_mut().zip(source) {
        *t ^= s;
    }
}

/// Rotates the cycle so the smallest atom leads, oriented toward the smaller
/// of its two ring neighbors.
fn canonical_cycle(atoms: Vec<usize>) -> Vec<usize> {
    let len = atoms.len();
    let start = (0..len).min_by_key(|&i| atoms[i]).unwrap();
    let forward = atoms[(start + 1) % len];
    let backward = atoms[(start + len - 1) % len];
    let mut out = Vec::with_capacity(len);
    if forward <= backward {
        for k in 0..len {
            out.push(atoms[(start + k) % len]);
        }
    } else {
        for k in 0..len {
            out.push(atoms[(start + len - k) % len]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::parse_smiles;

    #[test]
    fn acyclic_graph_has_no_rings() {
        let mol = parse_smiles("CCO").unwrap();
        assert!(perceive_rings(&mol).is_empty());
    }

    #[test]
    fn benzene_has_one_six_ring() {
        let mol = parse_smiles("c1ccccc1").unwrap();
        let rings = perceive_rings(&mol);
        assert_eq!(rings.len(), 1);
        assert_eq!(rings[0].len(), 6);
        assert_eq!(rings[0][0], 0);
    }

    #[test]
    fn spiro_rings_are_separated() {
        // Spiro[4.4]nonane: two five-rings sharing one atom.
        let mol = parse_smiles("C1CCC2(C1)CCCC2").unwrap();
        let rings = perceive_rings(&mol);
        assert_eq!(rings.len(), 2);
        assert!(rings.iter().all(|r| r.len() == 5));
    }

    #[test]
    fn bicyclo222_picks_two_of_three_six_rings() {
        let mol = parse_smiles("C1CC2CCC1CC2").unwrap();
        let rings = perceive_rings(&mol);
        assert_eq!(rings.len(), 2);
        assert!(rings.iter().all(|r| r.len() == 6));
    }

    #[test]
    fn disconnected_components_count_separately() {
        let mol = parse_smiles("C1CC1.C1CCC1").unwrap();
        let rings = perceive_rings(&mol);
        assert_eq!(rings.len(), 2);
        assert_eq!(rings[0].len(), 3);
        assert_eq!(rings[1].len(), 4);
    }

    #[test]
    fn basis_is_deterministic() {
        let mol = parse_smiles("c1ccc2ccccc2c1").unwrap();
        let a = perceive_rings(&mol);
        let b = perceive_rings(&mol);
        assert_eq!(a, b);
    }
}
