//! Rotation systems: cyclic neighbor orders around every vertex.

use alloc::vec;
use alloc::vec::Vec;

use crate::instance::{Edge, VertexId};

/// Counterclockwise cyclic order of neighbors around each vertex.
/// Graphs handled here are simple, so a neighbor identifies an edge.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RotationSystem {
    pub rot: Vec<Vec<VertexId>>,
}

impl RotationSystem {
    pub fn new(rot: Vec<Vec<VertexId>>) -> Self {
        RotationSystem { rot }
    }

    pub fn n(&self) -> usize {
        self.rot.len()
    }

    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for (v, list) in self.rot.iter().enumerate() {
            for &w in list {
                if v < w {
                    out.push(Edge(v, w));
                }
            }
        }
        out
    }

    /// Keeps only the edges accepted by `keep`, preserving cyclic orders.
    pub fn restrict(&self, mut keep: impl FnMut(Edge) -> bool) -> RotationSystem {
        let rot = self
            .rot
            .iter()
            .enumerate()
            .map(|(v, list)| list.iter().copied().filter(|&w| keep(Edge::new(v, w))).collect())
            .collect();
        RotationSystem { rot }
    }

    /// Whether every edge appears at both endpoints exactly once.
    pub fn is_consistent(&self) -> bool {
        let n = self.n();
        for (v, list) in self.rot.iter().enumerate() {
            for (i, &w) in list.iter().enumerate() {
                if w >= n || w == v || list[..i].contains(&w) || !self.rot[w].contains(&v) {
                    return false;
                }
            }
        }
        true
    }

    /// Position of `w` in the rotation at `v`.
    pub fn index_of(&self, v: VertexId, w: VertexId) -> Option<usize> {
        self.rot[v].iter().position(|&x| x == w)
    }

    /// Face boundaries as dart sequences. After arriving at `v` from `u`
    /// the walk continues to the successor of `u` in the rotation at `v`.
    pub fn faces(&self) -> Vec<Vec<(VertexId, VertexId)>> {
        let n = self.n();
        let mut offset = vec![0usize; n + 1];
        for v in 0..n {
            offset[v + 1] = offset[v] + self.rot[v].len();
        }
        let mut seen = vec![false; offset[n]];
        let mut faces = Vec::new();
        for v in 0..n {
            for i in 0..self.rot[v].len() {
                if seen[offset[v] + i] {
                    continue;
                }
                let mut face = Vec::new();
                let (mut a, mut ai) = (v, i);
                while !seen[offset[a] + ai] {
                    seen[offset[a] + ai] = true;
                    let b = self.rot[a][ai];
                    face.push((a, b));
                    let back = self.index_of(b, a).expect("consistent rotation");
                    let next = (back + 1) % self.rot[b].len();
                    a = b;
                    ai = next;
                }
                faces.push(face);
            }
        }
        faces
    }

    /// Euler's formula per connected component.
    pub fn is_planar(&self) -> bool {
        if !self.is_consistent() {
            return false;
        }
        let n = self.n();
        let comp = components(&self.rot);
        let count = comp.iter().copied().max().map_or(0, |m| m + 1);
        let mut verts = vec![0i64; count];
        let mut edges = vec![0i64; count];
        let mut faces = vec![0i64; count];
        for v in 0..n {
            verts[comp[v]] += 1;
            edges[comp[v]] += self.rot[v].len() as i64;
        }
        for f in self.faces() {
            faces[comp[f[0].0]] += 1;
        }
        (0..count).all(|c| verts[c] - edges[c] / 2 + faces[c].max(1) == 2)
    }
}

/// Connected component index per vertex.
pub fn components(adj: &[Vec<VertexId>]) -> Vec<usize> {
    let n = adj.len();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    let mut stack = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        stack.push(s);
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if comp[w] == usize::MAX {
                    comp[w] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    comp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k4_embeddings() {
        // Planar rotation of K4 with vertex 3 in the middle of triangle 0,1,2.
        let planar = RotationSystem::new(vec![vec![1, 3, 2], vec![2, 3, 0], vec![0, 3, 1], vec![0, 1, 2]]);
        assert!(planar.is_planar());
        assert_eq!(planar.faces().len(), 4);
        let twisted = RotationSystem::new(vec![vec![1, 2, 3], vec![2, 3, 0], vec![0, 3, 1], vec![0, 1, 2]]);
        assert!(!twisted.is_planar());
    }

    #[test]
    fn isolated_vertices_and_forests() {
        let r = RotationSystem::new(vec![vec![], vec![2], vec![1]]);
        assert!(r.is_planar());
    }
}
