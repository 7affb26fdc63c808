//! Planarity testing and embedding by path addition into faces
//! (Demoucron, Malgrange and Pertuiset), applied per biconnected block.

use alloc::vec;
use alloc::vec::Vec;

use crate::instance::{Edge, VertexId};
use crate::rotation::RotationSystem;

/// Biconnected blocks of a simple graph, each as a list of edges.
/// Bridges form blocks of one edge.
pub fn biconnected_blocks(n: usize, edges: &[Edge]) -> Vec<Vec<Edge>> {
    let mut adj = vec![Vec::new(); n];
    for &e in edges {
        adj[e.0].push(e.1);
        adj[e.1].push(e.0);
    }
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut time = 0;
    let mut stack: Vec<Edge> = Vec::new();
    let mut blocks = Vec::new();
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        // Iterative DFS: frames of (vertex, parent, next neighbor index).
        let mut frames: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        disc[root] = time;
        low[root] = time;
        time += 1;
        while let Some(&mut (v, parent, ref mut i)) = frames.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                if disc[w] == usize::MAX {
                    stack.push(Edge::new(v, w));
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    frames.push((w, v, 0));
                } else if w != parent && disc[w] < disc[v] {
                    stack.push(Edge::new(v, w));
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                frames.pop();
                if parent != usize::MAX {
                    low[parent] = low[parent].min(low[v]);
                    if low[v] >= disc[parent] {
                        let mut block = Vec::new();
                        let split = Edge::new(parent, v);
                        while let Some(e) = stack.pop() {
                            block.push(e);
                            if e == split {
                                break;
                            }
                        }
                        blocks.push(block);
                    }
                }
            }
        }
    }
    blocks
}

/// Whether the graph is biconnected (connected, at least 3 vertices, no cut vertex).
pub fn is_biconnected(n: usize, edges: &[Edge]) -> bool {
    if n < 3 {
        return false;
    }
    let blocks = biconnected_blocks(n, edges);
    blocks.len() == 1 && {
        let mut seen = vec![false; n];
        for e in &blocks[0] {
            seen[e.0] = true;
            seen[e.1] = true;
        }
        seen.iter().all(|&s| s)
    }
}

pub fn is_planar(n: usize, edges: &[Edge]) -> bool {
    if n >= 3 && edges.len() > 3 * n - 6 {
        return false;
    }
    biconnected_blocks(n, edges).iter().all(|b| b.len() < 9 || embed_block(n, b).is_some())
}

/// A planar rotation system of a biconnected graph, or `None` if the graph
/// is not planar. Panics if the graph is not biconnected.
pub fn embed_biconnected(n: usize, edges: &[Edge]) -> Option<RotationSystem> {
    assert!(is_biconnected(n, edges), "embedding requires a biconnected graph");
    let faces = embed_block(n, edges)?;
    Some(rotation_from_faces(n, &faces))
}

/// Rotation system from oriented face cycles in which every edge is
/// traversed once in each direction.
pub fn rotation_from_faces(n: usize, faces: &[Vec<VertexId>]) -> RotationSystem {
    // succ[b] holds (a, c): after arriving at b from a the face goes on to c.
    let mut succ: Vec<Vec<(VertexId, VertexId)>> = vec![Vec::new(); n];
    for f in faces {
        let len = f.len();
        for i in 0..len {
            let (a, b, c) = (f[i], f[(i + 1) % len], f[(i + 2) % len]);
            succ[b].push((a, c));
        }
    }
    let mut rot = vec![Vec::new(); n];
    for v in 0..n {
        if succ[v].is_empty() {
            continue;
        }
        let start = succ[v].iter().map(|x| x.0).min().unwrap();
        let mut list = vec![start];
        let mut cur = start;
        loop {
            let next = succ[v].iter().find(|x| x.0 == cur).expect("closed rotation").1;
            if next == start {
                break;
            }
            list.push(next);
            cur = next;
        }
        rot[v] = list;
    }
    RotationSystem::new(rot)
}

/// Faces of a planar embedding of a biconnected block as oriented vertex
/// cycles, or `None` if the block is not planar.
fn embed_block(n: usize, edges: &[Edge]) -> Option<Vec<Vec<VertexId>>> {
    let mut adj = vec![Vec::new(); n];
    for &e in edges {
        adj[e.0].push(e.1);
        adj[e.1].push(e.0);
    }
    for l in &mut adj {
        l.sort_unstable();
    }
    let cycle = find_cycle(&adj, edges[0].0)?;
    let mut in_h = vec![false; n];
    let mut h_edges: alloc::collections::BTreeSet<Edge> = alloc::collections::BTreeSet::new();
    for i in 0..cycle.len() {
        in_h[cycle[i]] = true;
        h_edges.insert(Edge::new(cycle[i], cycle[(i + 1) % cycle.len()]));
    }
    let mut rev = cycle.clone();
    rev.reverse();
    let mut faces = vec![cycle, rev];
    loop {
        let frags = fragments(&adj, edges, &in_h, &h_edges);
        if frags.is_empty() {
            return Some(faces);
        }
        let mut choice: Option<(usize, usize)> = None;
        for (fi, frag) in frags.iter().enumerate() {
            let admissible: Vec<usize> = (0..faces.len())
                .filter(|&k| frag.attachments.iter().all(|a| faces[k].contains(a)))
                .collect();
            match admissible.len() {
                0 => return None,
                1 => {
                    choice = Some((fi, admissible[0]));
                    break;
                }
                _ => {
                    if choice.is_none() {
                        choice = Some((fi, admissible[0]));
                    }
                }
            }
        }
        let (fi, face) = choice.unwrap();
        let path = fragment_path(&adj, &in_h, &frags[fi]);
        for w in path.windows(2) {
            h_edges.insert(Edge::new(w[0], w[1]));
        }
        for &v in &path {
            in_h[v] = true;
        }
        let f = faces.swap_remove(face);
        let (f1, f2) = split_face(&f, &path);
        faces.push(f1);
        faces.push(f2);
    }
}

fn find_cycle(adj: &[Vec<VertexId>], start: VertexId) -> Option<Vec<VertexId>> {
    let n = adj.len();
    let mut parent = vec![usize::MAX; n];
    let mut depth = vec![usize::MAX; n];
    let mut stack = vec![(start, 0usize)];
    depth[start] = 0;
    while let Some((v, i)) = stack.pop() {
        if i < adj[v].len() {
            stack.push((v, i + 1));
            let w = adj[v][i];
            if depth[w] == usize::MAX {
                depth[w] = depth[v] + 1;
                parent[w] = v;
                stack.push((w, 0));
            } else if w != parent[v] && depth[w] < depth[v] {
                let mut cyc = vec![v];
                let mut x = v;
                while x != w {
                    x = parent[x];
                    cyc.push(x);
                }
                return Some(cyc);
            }
        }
    }
    None
}

struct Fragment {
    attachments: Vec<VertexId>,
    /// A single edge between embedded vertices, or the interior vertices.
    chord: Option<Edge>,
    interior: Vec<VertexId>,
}

fn fragments(
    adj: &[Vec<VertexId>],
    edges: &[Edge],
    in_h: &[bool],
    h_edges: &alloc::collections::BTreeSet<Edge>,
) -> Vec<Fragment> {
    let n = adj.len();
    let mut out = Vec::new();
    for &e in edges {
        if in_h[e.0] && in_h[e.1] && !h_edges.contains(&e) {
            out.push(Fragment { attachments: vec![e.0, e.1], chord: Some(e), interior: Vec::new() });
        }
    }
    let mut seen = vec![false; n];
    for s in 0..n {
        if in_h[s] || seen[s] || adj[s].is_empty() {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![s];
        let mut interior = Vec::new();
        let mut att = Vec::new();
        while let Some(v) = stack.pop() {
            interior.push(v);
            for &w in &adj[v] {
                if in_h[w] {
                    att.push(w);
                } else if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        att.sort_unstable();
        att.dedup();
        out.push(Fragment { attachments: att, chord: None, interior });
    }
    out
}

/// A path through the fragment between two distinct attachments.
fn fragment_path(adj: &[Vec<VertexId>], in_h: &[bool], frag: &Fragment) -> Vec<VertexId> {
    if let Some(e) = frag.chord {
        return vec![e.0, e.1];
    }
    let a = frag.attachments[0];
    let n = adj.len();
    let mut inside = vec![false; n];
    for &v in &frag.interior {
        inside[v] = true;
    }
    let mut parent = vec![usize::MAX; n];
    let mut queue = alloc::collections::VecDeque::new();
    for &w in &adj[a] {
        if inside[w] && parent[w] == usize::MAX {
            parent[w] = a;
            queue.push_back(w);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if in_h[w] && w != a {
                let mut path = vec![w, v];
                let mut x = v;
                while parent[x] != a {
                    x = parent[x];
                    path.push(x);
                }
                path.push(a);
                path.reverse();
                return path;
            }
            if inside[w] && parent[w] == usize::MAX {
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    unreachable!("fragments of a biconnected graph have two attachments")
}

/// Splits oriented face `f` along `path` (from `path[0]` to its last vertex).
fn split_face(f: &[VertexId], path: &[VertexId]) -> (Vec<VertexId>, Vec<VertexId>) {
    let a = path[0];
    let b = *path.last().unwrap();
    let len = f.len();
    let ia = f.iter().position(|&x| x == a).unwrap();
    let ib = f.iter().position(|&x| x == b).unwrap();
    // f = a .. b (X) then b .. a (Y).
    let mut x = Vec::new();
    let mut i = ia;
    while i != ib {
        x.push(f[i]);
        i = (i + 1) % len;
    }
    x.push(b);
    let mut y = Vec::new();
    let mut i = ib;
    while i != ia {
        y.push(f[i]);
        i = (i + 1) % len;
    }
    y.push(a);
    let inner = &path[1..path.len() - 1];
    // a X b, then back to a through the path reversed.
    let mut f1 = x;
    f1.extend(inner.iter().rev());
    // b Y a, then on to b through the path.
    let mut f2 = y;
    f2.extend(inner.iter());
    (f1, f2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Vec<Edge> {
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                out.push(Edge(a, b));
            }
        }
        out
    }

    fn k33() -> Vec<Edge> {
        let mut out = Vec::new();
        for a in 0..3 {
            for b in 3..6 {
                out.push(Edge(a, b));
            }
        }
        out
    }

    #[test]
    fn kuratowski_graphs() {
        assert!(is_planar(4, &complete(4)));
        assert!(!is_planar(5, &complete(5)));
        assert!(!is_planar(6, &k33()));
        let mut k33_minus = k33();
        k33_minus.pop();
        assert!(is_planar(6, &k33_minus));
    }

    #[test]
    fn subdivided_k33_is_not_planar() {
        // Every edge of K_{3,3} subdivided once: few edges, so the density
        // shortcut does not apply.
        let mut edges = Vec::new();
        let mut next = 6;
        for e in k33() {
            edges.push(Edge::new(e.0, next));
            edges.push(Edge::new(next, e.1));
            next += 1;
        }
        assert!(!is_planar(next, &edges));
    }

    #[test]
    fn embedding_is_planar() {
        let edges = complete(4);
        let r = embed_biconnected(4, &edges).unwrap();
        assert!(r.is_planar());
        // Wheel with 6 rim vertices.
        let mut w = Vec::new();
        for i in 0..6 {
            w.push(Edge::new(i, (i + 1) % 6));
            w.push(Edge::new(i, 6));
        }
        let r = embed_biconnected(7, &w).unwrap();
        assert!(r.is_planar());
        assert_eq!(r.faces().len(), 7);
    }

    #[test]
    fn blocks_of_two_triangles() {
        let edges = vec![Edge(0, 1), Edge(1, 2), Edge(0, 2), Edge(2, 3), Edge(3, 4), Edge(2, 4)];
        assert_eq!(biconnected_blocks(5, &edges).len(), 2);
        assert!(!is_biconnected(5, &edges));
        assert!(is_biconnected(3, &edges[..3]));
    }
}
