//! SPQR-trees of biconnected shared graphs and the reduction of the
//! biconnected two-graph problem to shared cycles: attachment
//! normalization, per-S-node instances, the cycle-to-path gadget, the
//! driver and the assembly of a rotation system from the per-node answers.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::constraints::check_sefe_orthogonality;
use crate::cyclesolver::{solve_cycle_run, CycleError, CycleRun};
use crate::instance::{CycleInstance, Edge, InstanceError, SunflowerInstance, VertexId};
use crate::planarity::{embed_biconnected, is_biconnected, is_planar};
use crate::rotation::RotationSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKind {
    S,
    P,
    R,
}

impl NodeKind {
    pub fn letter(self) -> char {
        match self {
            NodeKind::S => 'S',
            NodeKind::P => 'P',
            NodeKind::R => 'R',
        }
    }
}

/// What a skeleton edge stands for. Real edges play the role of Q-nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Link {
    /// Index into the decomposed graph's edge list.
    Real(usize),
    Virtual { node: usize, edge: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SkeletonEdge {
    pub a: VertexId,
    pub b: VertexId,
    pub link: Link,
}

/// Skeleton vertices keep the ids of the decomposed graph. For S-nodes the
/// edges are stored in cycle order with `edges[i].b == edges[i + 1].a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpqrNode {
    pub kind: NodeKind,
    pub edges: Vec<SkeletonEdge>,
}

impl SpqrNode {
    pub fn vertices(&self) -> Vec<VertexId> {
        let mut v: Vec<VertexId> = self.edges.iter().flat_map(|e| [e.a, e.b]).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Cycle order of an S-node's vertices.
    pub fn cycle(&self) -> Vec<VertexId> {
        self.edges.iter().map(|e| e.a).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpqrError {
    #[error("the graph is not biconnected")]
    NotBiconnected,
    #[error("the graph has a repeated edge")]
    Multigraph,
}

/// An SPQR-tree augmented so that no two P- or R-nodes are adjacent: such
/// pairs are separated by S-nodes with two virtual edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpqrTree {
    pub n: usize,
    pub graph: Vec<Edge>,
    pub nodes: Vec<SpqrNode>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Id {
    Real(usize),
    Virt(usize),
}

#[derive(Clone, Copy, Debug)]
struct CEdge {
    a: VertexId,
    b: VertexId,
    id: Id,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

fn comp_vertices(c: &[CEdge]) -> Vec<VertexId> {
    let mut v: Vec<VertexId> = c.iter().flat_map(|e| [e.a, e.b]).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Edge classes of `c` with respect to the pair {a, b}: two edges are in
/// one class when a path avoiding a and b as inner vertices joins them.
fn split_classes(c: &[CEdge], a: VertexId, b: VertexId) -> Vec<Vec<usize>> {
    let mut dsu = Dsu::new(c.len());
    let mut first: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (i, e) in c.iter().enumerate() {
        for x in [e.a, e.b] {
            if x == a || x == b {
                continue;
            }
            match first.get(&x) {
                Some(&j) => dsu.union(i, j),
                None => {
                    first.insert(x, i);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..c.len() {
        groups.entry(dsu.find(i)).or_default().push(i);
    }
    groups.into_values().collect()
}

fn find_split(c: &[CEdge]) -> Option<(VertexId, VertexId, Vec<usize>)> {
    let verts = comp_vertices(c);
    for (i, &a) in verts.iter().enumerate() {
        for &b in &verts[i + 1..] {
            let classes = split_classes(c, a, b);
            if classes.len() < 2 {
                continue;
            }
            if classes.len() == 2 && classes.iter().any(|k| k.len() == 1) {
                continue;
            }
            let side = classes.iter().find(|k| k.len() >= 2).unwrap().clone();
            return Some((a, b, side));
        }
    }
    None
}

fn is_cycle(c: &[CEdge]) -> bool {
    let mut deg: BTreeMap<VertexId, usize> = BTreeMap::new();
    for e in c {
        *deg.entry(e.a).or_default() += 1;
        *deg.entry(e.b).or_default() += 1;
    }
    // Split components are connected, so degree 2 everywhere is a cycle.
    deg.values().all(|&d| d == 2)
}

/// Splits into bonds, polygons and triconnected pieces.
fn split_components(edges: &[Edge]) -> Vec<(NodeKind, Vec<CEdge>)> {
    let mut next_virt = 0;
    let mut out = Vec::new();
    let start: Vec<CEdge> = edges.iter().enumerate().map(|(i, e)| CEdge { a: e.0, b: e.1, id: Id::Real(i) }).collect();
    let mut stack = vec![start];
    while let Some(c) = stack.pop() {
        let verts = comp_vertices(&c);
        if verts.len() == 2 {
            out.push((NodeKind::P, c));
            continue;
        }
        let mut by_pair: BTreeMap<(VertexId, VertexId), Vec<usize>> = BTreeMap::new();
        for (i, e) in c.iter().enumerate() {
            by_pair.entry((e.a.min(e.b), e.a.max(e.b))).or_default().push(i);
        }
        if let Some((&(a, b), idx)) = by_pair.iter().find(|(_, l)| l.len() >= 2) {
            let v = Id::Virt(next_virt);
            next_virt += 1;
            let mut bond: Vec<CEdge> = idx.iter().map(|&i| c[i]).collect();
            bond.push(CEdge { a, b, id: v });
            let mut rest: Vec<CEdge> = c.iter().enumerate().filter(|(i, _)| !idx.contains(i)).map(|(_, e)| *e).collect();
            rest.push(CEdge { a, b, id: v });
            out.push((NodeKind::P, bond));
            stack.push(rest);
            continue;
        }
        if is_cycle(&c) {
            out.push((NodeKind::S, c));
            continue;
        }
        match find_split(&c) {
            Some((a, b, side)) => {
                let v = Id::Virt(next_virt);
                next_virt += 1;
                let mut one: Vec<CEdge> = side.iter().map(|&i| c[i]).collect();
                one.push(CEdge { a, b, id: v });
                let mut two: Vec<CEdge> = c.iter().enumerate().filter(|(i, _)| !side.contains(i)).map(|(_, e)| *e).collect();
                two.push(CEdge { a, b, id: v });
                stack.push(two);
                stack.push(one);
            }
            None => out.push((NodeKind::R, c)),
        }
    }
    out
}

/// Orders a polygon's edges along the cycle, starting at its smallest vertex.
fn order_cycle(c: &[CEdge]) -> Vec<CEdge> {
    let start = comp_vertices(c)[0];
    let mut out = Vec::with_capacity(c.len());
    let mut used = vec![false; c.len()];
    let mut cur = start;
    // Leave through the incident edge with the smaller other endpoint.
    let mut first: Vec<usize> = (0..c.len()).filter(|&i| c[i].a == start || c[i].b == start).collect();
    first.sort_by_key(|&i| (if c[i].a == start { c[i].b } else { c[i].a }, c[i].id));
    let mut next = Some(first[0]);
    while let Some(i) = next {
        used[i] = true;
        let other = if c[i].a == cur { c[i].b } else { c[i].a };
        out.push(CEdge { a: cur, b: other, id: c[i].id });
        cur = other;
        next = (0..c.len()).find(|&j| !used[j] && (c[j].a == cur || c[j].b == cur));
    }
    out
}

impl SpqrTree {
    /// Decomposes a simple biconnected graph on vertices `0..n`.
    pub fn build(n: usize, graph: &[Edge]) -> Result<SpqrTree, SpqrError> {
        let set: BTreeSet<Edge> = graph.iter().copied().collect();
        if set.len() != graph.len() {
            return Err(SpqrError::Multigraph);
        }
        if !is_biconnected(n, graph) {
            return Err(SpqrError::NotBiconnected);
        }
        let comps = split_components(graph);
        // Merge polygons with polygons and bonds with bonds.
        let mut holders: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (ci, (_, c)) in comps.iter().enumerate() {
            for e in c {
                if let Id::Virt(v) = e.id {
                    holders.entry(v).or_default().push(ci);
                }
            }
        }
        let mut dsu = Dsu::new(comps.len());
        for h in holders.values() {
            let (x, y) = (h[0], h[1]);
            if comps[x].0 == comps[y].0 && comps[x].0 != NodeKind::R {
                dsu.union(x, y);
            }
        }
        let mut merged: BTreeMap<usize, (NodeKind, Vec<CEdge>)> = BTreeMap::new();
        for (ci, (kind, c)) in comps.iter().enumerate() {
            let root = dsu.find(ci);
            let entry = merged.entry(root).or_insert((*kind, Vec::new()));
            for e in c {
                let internal = match e.id {
                    Id::Virt(v) => {
                        let h = &holders[&v];
                        dsu.find(h[0]) == dsu.find(h[1])
                    }
                    Id::Real(_) => false,
                };
                if !internal {
                    entry.1.push(*e);
                }
            }
        }
        let mut nodes: Vec<SpqrNode> = Vec::new();
        let mut where_virt: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
        for (kind, mut c) in merged.into_values() {
            if kind == NodeKind::S {
                c = order_cycle(&c);
            } else {
                c.sort_by_key(|e| e.id);
            }
            let node = nodes.len();
            let mut edges = Vec::with_capacity(c.len());
            for (i, e) in c.iter().enumerate() {
                let link = match e.id {
                    Id::Real(r) => Link::Real(r),
                    Id::Virt(v) => {
                        where_virt.entry(v).or_default().push((node, i));
                        Link::Virtual { node: usize::MAX, edge: usize::MAX }
                    }
                };
                edges.push(SkeletonEdge { a: e.a, b: e.b, link });
            }
            nodes.push(SpqrNode { kind, edges });
        }
        for pair in where_virt.values() {
            let ((n1, e1), (n2, e2)) = (pair[0], pair[1]);
            nodes[n1].edges[e1].link = Link::Virtual { node: n2, edge: e2 };
            nodes[n2].edges[e2].link = Link::Virtual { node: n1, edge: e1 };
        }
        let mut t = SpqrTree { n, graph: graph.to_vec(), nodes };
        t.augment();
        debug_assert_eq!(t.validate(), Ok(()));
        Ok(t)
    }

    fn augment(&mut self) {
        let count = self.nodes.len();
        for x in 0..count {
            for i in 0..self.nodes[x].edges.len() {
                let Link::Virtual { node: y, edge: j } = self.nodes[x].edges[i].link else { continue };
                if x > y || self.nodes[x].kind == NodeKind::S || self.nodes[y].kind == NodeKind::S {
                    continue;
                }
                let s = self.nodes.len();
                let (a, b) = (self.nodes[x].edges[i].a, self.nodes[x].edges[i].b);
                self.nodes.push(SpqrNode {
                    kind: NodeKind::S,
                    edges: vec![
                        SkeletonEdge { a, b, link: Link::Virtual { node: x, edge: i } },
                        SkeletonEdge { a: b, b: a, link: Link::Virtual { node: y, edge: j } },
                    ],
                });
                self.nodes[x].edges[i].link = Link::Virtual { node: s, edge: 0 };
                self.nodes[y].edges[j].link = Link::Virtual { node: s, edge: 1 };
            }
        }
    }

    /// Tree neighbors of `node` with the connecting skeleton edge.
    pub fn neighbors(&self, node: usize) -> Vec<(usize, usize)> {
        self.nodes[node]
            .edges
            .iter()
            .enumerate()
            .filter_map(|(i, e)| match e.link {
                Link::Virtual { node: y, .. } => Some((i, y)),
                Link::Real(_) => None,
            })
            .collect()
    }

    /// Real edges represented by skeleton edge `edge` of `node`, that is,
    /// everything on the far side of it.
    pub fn expansion(&self, node: usize, edge: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![(node, edge)];
        while let Some((x, i)) = stack.pop() {
            match self.nodes[x].edges[i].link {
                Link::Real(r) => out.push(r),
                Link::Virtual { node: y, edge: j } => {
                    for k in 0..self.nodes[y].edges.len() {
                        if k != j {
                            stack.push((y, k));
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Vertices of the expansion of `(node, edge)` other than its endpoints.
    pub fn interior(&self, node: usize, edge: usize) -> Vec<VertexId> {
        let e = self.nodes[node].edges[edge];
        let mut v: Vec<VertexId> = self
            .expansion(node, edge)
            .iter()
            .flat_map(|&r| [self.graph[r].0, self.graph[r].1])
            .filter(|&x| x != e.a && x != e.b)
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// The real edges reachable from all skeletons, each exactly once.
    pub fn all_real(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .nodes
            .iter()
            .flat_map(|nd| nd.edges.iter())
            .filter_map(|e| match e.link {
                Link::Real(r) => Some(r),
                Link::Virtual { .. } => None,
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Structural checks: skeleton shapes, twin links, real edges covered
    /// exactly once, tree shape and no adjacent P/R pair.
    pub fn validate(&self) -> Result<(), String> {
        for (x, nd) in self.nodes.iter().enumerate() {
            let verts = nd.vertices();
            match nd.kind {
                NodeKind::S => {
                    let m = nd.edges.len();
                    if m < 2 || (0..m).any(|i| nd.edges[i].b != nd.edges[(i + 1) % m].a) || verts.len() != m {
                        return Err(format!("node {x}: not a cycle"));
                    }
                }
                NodeKind::P => {
                    if verts.len() != 2 || nd.edges.len() < 3 {
                        return Err(format!("node {x}: not a bond"));
                    }
                }
                NodeKind::R => {
                    let idx: BTreeMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
                    let local: Vec<Edge> = nd.edges.iter().map(|e| Edge::new(idx[&e.a], idx[&e.b])).collect();
                    let set: BTreeSet<Edge> = local.iter().copied().collect();
                    let c: Vec<CEdge> = nd.edges.iter().map(|e| CEdge { a: e.a, b: e.b, id: Id::Real(0) }).collect();
                    if verts.len() < 4 || set.len() != local.len() || find_split(&c).is_some() {
                        return Err(format!("node {x}: not triconnected"));
                    }
                }
            }
            for (i, e) in nd.edges.iter().enumerate() {
                if let Link::Virtual { node: y, edge: j } = e.link {
                    let back = self.nodes.get(y).and_then(|n| n.edges.get(j));
                    match back {
                        Some(f) if f.link == (Link::Virtual { node: x, edge: i }) && Edge::new(f.a, f.b) == Edge::new(e.a, e.b) => {}
                        _ => return Err(format!("node {x} edge {i}: broken twin")),
                    }
                    if nd.kind != NodeKind::S && self.nodes[y].kind != NodeKind::S {
                        return Err(format!("nodes {x} and {y}: adjacent without an S-node"));
                    }
                }
            }
        }
        if self.all_real() != (0..self.graph.len()).collect::<Vec<_>>() {
            return Err(String::from("real edges not covered exactly once"));
        }
        let links: usize = self.nodes.iter().map(|nd| self.neighbors_count(nd)).sum();
        if links / 2 + 1 != self.nodes.len() {
            return Err(String::from("not a tree"));
        }
        Ok(())
    }

    fn neighbors_count(&self, nd: &SpqrNode) -> usize {
        nd.edges.iter().filter(|e| matches!(e.link, Link::Virtual { .. })).count()
    }

    /// Counts of S, P and R nodes.
    pub fn census(&self) -> (usize, usize, usize) {
        let count = |k| self.nodes.iter().filter(|n| n.kind == k).count();
        (count(NodeKind::S), count(NodeKind::P), count(NodeKind::R))
    }

    /// Indented text: one line per node, one line per skeleton edge.
    pub fn dump(&self, names: &[String]) -> String {
        let mut s = String::new();
        for (x, nd) in self.nodes.iter().enumerate() {
            let _ = writeln!(s, "node {x} {}", nd.kind.letter());
            for (i, e) in nd.edges.iter().enumerate() {
                let (a, b) = (&names[e.a], &names[e.b]);
                match e.link {
                    Link::Real(_) => {
                        let _ = writeln!(s, "  {i}: {a}-{b} real");
                    }
                    Link::Virtual { node, edge } => {
                        let _ = writeln!(s, "  {i}: {a}-{b} virtual -> node {node} edge {edge}");
                    }
                }
            }
        }
        s
    }
}

/// Planar rotation of a skeleton as cyclic lists of skeleton edge indices
/// per vertex (counterclockwise). P-nodes follow `order`, R-nodes use the
/// planar embedder, S-nodes are trivial.
pub fn skeleton_rotation(nd: &SpqrNode, order: Option<&[usize]>) -> BTreeMap<VertexId, Vec<usize>> {
    let mut rot: BTreeMap<VertexId, Vec<usize>> = BTreeMap::new();
    match nd.kind {
        NodeKind::S => {
            for (i, e) in nd.edges.iter().enumerate() {
                rot.entry(e.a).or_default().push(i);
                rot.entry(e.b).or_default().push(i);
            }
        }
        NodeKind::P => {
            let default: Vec<usize> = (0..nd.edges.len()).collect();
            let order = order.unwrap_or(&default);
            let (s, t) = (nd.edges[0].a.min(nd.edges[0].b), nd.edges[0].a.max(nd.edges[0].b));
            rot.insert(s, order.to_vec());
            rot.insert(t, order.iter().rev().copied().collect());
        }
        NodeKind::R => {
            let verts = nd.vertices();
            let idx: BTreeMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            let local: Vec<Edge> = nd.edges.iter().map(|e| Edge::new(idx[&e.a], idx[&e.b])).collect();
            let r = embed_biconnected(verts.len(), &local).expect("R skeletons are planar for planar graphs");
            for (li, list) in r.rot.iter().enumerate() {
                let v = verts[li];
                let edges = list
                    .iter()
                    .map(|&lw| local.iter().position(|&e| e == Edge::new(li, lw)).unwrap())
                    .collect();
                rot.insert(v, edges);
            }
        }
    }
    rot
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BiconnectedError {
    #[error("exactly two graphs are required, found {0}")]
    GraphCount(usize),
    #[error(transparent)]
    Spqr(#[from] SpqrError),
    #[error("union degree of `{vertex}` is {degree}, at most 5 is supported")]
    UnionDegree { vertex: String, degree: usize },
    #[error("`{0}` has shared degree 4 and an exclusive edge")]
    DegreeFourEndpoint(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Cycle(#[from] CycleError),
    #[error("could not assemble a rotation system: {0}")]
    Assembly(String),
}

/// Names not yet used, with `'` appended on collision.
struct Namer(BTreeSet<String>);

impl Namer {
    fn new(names: &[String]) -> Self {
        Namer(names.iter().cloned().collect())
    }
    fn fresh(&mut self, base: String) -> String {
        let mut name = base;
        while self.0.contains(&name) {
            name.push('\'');
        }
        self.0.insert(name.clone());
        name
    }
}

/// Exclusive edges of `u` moved to the middle of a path `u, w1, w2, w3, x`
/// that replaced the shared edge `ux`; `w1w3` is an extra shared edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttachmentMove {
    pub u: VertexId,
    pub x: VertexId,
    pub w: [VertexId; 3],
}

/// Result of moving every exclusive endpoint to a vertex of shared degree 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub instance: SunflowerInstance,
    pub moves: Vec<AttachmentMove>,
}

/// Darts of each face of a skeleton rotation as (tail vertex, edge index).
fn skeleton_faces(nd: &SpqrNode, rot: &BTreeMap<VertexId, Vec<usize>>) -> Vec<Vec<(VertexId, usize)>> {
    let other = |i: usize, v: VertexId| if nd.edges[i].a == v { nd.edges[i].b } else { nd.edges[i].a };
    let mut seen: BTreeSet<(VertexId, usize)> = BTreeSet::new();
    let mut faces = Vec::new();
    for (&v, list) in rot {
        for &i in list {
            if seen.contains(&(v, i)) {
                continue;
            }
            let mut face = Vec::new();
            let (mut t, mut e) = (v, i);
            while seen.insert((t, e)) {
                face.push((t, e));
                let h = other(e, t);
                let l = &rot[&h];
                let p = l.iter().position(|&x| x == e).unwrap();
                t = h;
                e = l[(p + 1) % l.len()];
            }
            faces.push(face);
        }
    }
    faces
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Part {
    Vertex(VertexId),
    Edge(usize),
}

fn part_of(tree: &SpqrTree, node: usize, interiors: &BTreeMap<VertexId, usize>, w: VertexId) -> Part {
    if tree.nodes[node].edges.iter().any(|e| e.a == w || e.b == w) {
        Part::Vertex(w)
    } else {
        Part::Edge(interiors[&w])
    }
}

fn interiors(tree: &SpqrTree, node: usize) -> BTreeMap<VertexId, usize> {
    let mut m = BTreeMap::new();
    for i in 0..tree.nodes[node].edges.len() {
        for v in tree.interior(node, i) {
            m.insert(v, i);
        }
    }
    m
}

fn face_has(face: &[(VertexId, usize)], p: Part) -> bool {
    face.iter().any(|&(t, e)| match p {
        Part::Vertex(v) => t == v,
        Part::Edge(i) => e == i,
    })
}

/// Candidates for the shared edge `ux` next to which the exclusive edges
/// of the shared-degree-3 vertex `u` are embedded. One candidate when the
/// edge is forced; every branch of a P-node when the only exclusive edge
/// at `u` joins its poles and nothing else constrains it; `None` when no
/// face can hold the edges.
fn forced_edge(tree: &SpqrTree, inst: &SunflowerInstance, u: VertexId) -> Option<Vec<VertexId>> {
    let at_u: Vec<(usize, Edge)> =
        (0..2).flat_map(|g| inst.exclusive(g).iter().filter(|e| e.contains(u)).map(move |&e| (g, e))).collect();
    let (g, e) = at_u[0];
    let v = e.other(u);
    let node = (0..tree.nodes.len())
        .find(|&x| tree.nodes[x].edges.iter().filter(|s| s.a == u || s.b == u).count() == 3)
        .expect("a vertex of shared degree 3 has degree 3 in one skeleton");
    let nd = &tree.nodes[node];
    let inner = interiors(tree, node);
    let first_at = |eps: usize| {
        tree.expansion(node, eps).iter().map(|&r| tree.graph[r]).find(|s| s.contains(u)).map(|s| s.other(u)).unwrap()
    };
    let eps = match nd.kind {
        NodeKind::R => {
            let rot = skeleton_rotation(nd, None);
            let faces = skeleton_faces(nd, &rot);
            let pv = part_of(tree, node, &inner, v);
            let common: Vec<&Vec<(VertexId, usize)>> =
                faces.iter().filter(|f| face_has(f, Part::Vertex(u)) && face_has(f, pv)).collect();
            let at = |f: &[(VertexId, usize)]| -> Vec<usize> {
                let mut l: Vec<usize> = (0..f.len())
                    .filter(|&k| f[k].0 == u)
                    .flat_map(|k| [f[k].1, f[(k + f.len() - 1) % f.len()].1])
                    .collect();
                l.sort_unstable();
                l
            };
            match common.len() {
                0 => return None,
                1 => at(common[0])[0],
                _ => {
                    let (a, b) = (at(common[0]), at(common[1]));
                    *a.iter().find(|i| b.contains(i)).expect("two faces at u share an edge")
                }
            }
        }
        NodeKind::P => {
            let pole = if nd.edges[0].a == u { nd.edges[0].b } else { nd.edges[0].a };
            let target = if v == pole {
                // Use the other graph's edge at u or at the other pole.
                let Some(partner) = inst.exclusive(1 - g).iter().find(|f| f.contains(u) || f.contains(pole)) else {
                    return Some((0..nd.edges.len()).map(first_at).collect());
                };
                if partner.contains(u) {
                    partner.other(u)
                } else {
                    partner.other(pole)
                }
            } else {
                v
            };
            match part_of(tree, node, &inner, target) {
                Part::Edge(i) => i,
                Part::Vertex(_) => return None,
            }
        }
        NodeKind::S => unreachable!("S-node skeleton vertices have degree 2"),
    };
    Some(vec![first_at(eps)])
}

/// Makes every endpoint of an exclusive edge a vertex of shared degree 2 by
/// moving the exclusive edges of shared-degree-3 vertices onto
/// subdivisions. The instance is feasible iff one of the returned
/// alternatives is; several come back only when a pole-to-pole edge is
/// unconstrained, and none when some endpoint has no admissible face.
pub fn normalize_attachments(inst: &SunflowerInstance) -> Result<Vec<Normalized>, BiconnectedError> {
    if inst.k() != 2 {
        return Err(BiconnectedError::GraphCount(inst.k()));
    }
    let mut out = Vec::new();
    let start = Normalized { instance: inst.clone(), moves: Vec::new() };
    let mut stack = vec![start];
    while let Some(cur) = stack.pop() {
        let c = &cur.instance;
        let Some(u) = (0..c.n()).find(|&v| c.shared_degree(v) >= 3 && (0..2).any(|g| c.exclusive_degree(v, g) > 0)) else {
            out.push(cur);
            continue;
        };
        if c.shared_degree(u) > 3 {
            return Err(BiconnectedError::DegreeFourEndpoint(c.names()[u].clone()));
        }
        let tree = SpqrTree::build(c.n(), c.shared())?;
        let Some(options) = forced_edge(&tree, c, u) else { continue };
        for &x in options.iter().rev() {
            stack.push(move_attachments(&cur, u, x)?);
        }
    }
    Ok(out)
}

/// Subdivides `ux` by `w1, w2, w3`, adds `w1w3` and moves the exclusive
/// edges of `u` to `w2`.
fn move_attachments(cur: &Normalized, u: VertexId, x: VertexId) -> Result<Normalized, InstanceError> {
    let c = &cur.instance;
    let mut names = c.names().to_vec();
    let mut namer = Namer::new(&names);
    let w: [VertexId; 3] = core::array::from_fn(|i| {
        names.push(namer.fresh(format!("{}.w{}", c.names()[u], i + 1)));
        names.len() - 1
    });
    let mut shared: Vec<Edge> = c.shared().iter().copied().filter(|&e| e != Edge::new(u, x)).collect();
    shared.extend([Edge::new(u, w[0]), Edge::new(w[0], w[1]), Edge::new(w[1], w[2]), Edge::new(w[2], x), Edge::new(w[0], w[2])]);
    let exclusive = c
        .exclusive_all()
        .iter()
        .map(|list| list.iter().map(|&e| if e.contains(u) { Edge::new(w[1], e.other(u)) } else { e }).collect())
        .collect();
    let mut moves = cur.moves.clone();
    moves.push(AttachmentMove { u, x, w });
    Ok(Normalized { instance: SunflowerInstance::new(names, shared, exclusive)?, moves })
}

/// A virtual edge of an S-node replaced by a cycle through its poles and
/// the attachments: `cw` and `ccw` list the attachments on the two
/// pole-to-pole paths, both read from `u` to `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpandedEdge {
    pub edge: usize,
    pub u: VertexId,
    pub v: VertexId,
    pub cw: Vec<VertexId>,
    pub ccw: Vec<VertexId>,
}

/// The requirements of one S-node: its skeleton cycle, the expanded
/// virtual edges and the exclusive edges whose endpoints lie in different
/// parts of the skeleton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SNodeInstance {
    pub node: usize,
    pub cycle: Vec<VertexId>,
    pub expanded: Vec<ExpandedEdge>,
    /// Indices into the exclusive edge lists of the decomposed instance.
    pub important: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extraction {
    Instances(Vec<SNodeInstance>),
    /// A necessary condition on a P- or R-skeleton or an attachment order
    /// fails.
    Infeasible(String),
}

/// Which G2 edge of the cycle-to-path gadget starts at `a1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum GadgetVariant {
    /// `(a1, x3)`.
    #[default]
    A1X3,
    /// `(a1, x4)`.
    A1X4,
}

fn important_edges(tree: &SpqrTree, inst: &SunflowerInstance, node: usize) -> (BTreeMap<VertexId, usize>, Vec<Vec<usize>>) {
    let inner = interiors(tree, node);
    let imp = (0..2)
        .map(|g| {
            (0..inst.exclusive(g).len())
                .filter(|&j| {
                    let e = inst.exclusive(g)[j];
                    part_of(tree, node, &inner, e.0) != part_of(tree, node, &inner, e.1)
                })
                .collect()
        })
        .collect();
    (inner, imp)
}

/// Cyclic order of the poles and attachments around the outer face of the
/// expansion of `(node, edge)`, found by embedding the expansion plus one
/// extra vertex adjacent to all of them. `None` if that graph is not planar.
fn attachment_order(tree: &SpqrTree, node: usize, edge: usize, att: &[VertexId]) -> Option<(Vec<VertexId>, Vec<VertexId>)> {
    let sk = tree.nodes[node].edges[edge];
    let (u, v) = (sk.a, sk.b);
    let mut verts: Vec<VertexId> = tree.expansion(node, edge).iter().flat_map(|&r| [tree.graph[r].0, tree.graph[r].1]).collect();
    verts.sort_unstable();
    verts.dedup();
    let idx: BTreeMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let hub = verts.len();
    let mut local: Vec<Edge> = tree.expansion(node, edge).iter().map(|&r| Edge::new(idx[&tree.graph[r].0], idx[&tree.graph[r].1])).collect();
    for &x in [u, v].iter().chain(att) {
        local.push(Edge::new(idx[&x], hub));
    }
    let rot = embed_biconnected(hub + 1, &local)?;
    let around: Vec<VertexId> = rot.rot[hub].iter().map(|&l| verts[l]).collect();
    let s = around.iter().position(|&x| x == u).unwrap();
    let seq: Vec<VertexId> = (1..around.len()).map(|k| around[(s + k) % around.len()]).collect();
    let t = seq.iter().position(|&x| x == v).unwrap();
    let cw = seq[..t].to_vec();
    let mut ccw = seq[t + 1..].to_vec();
    ccw.reverse();
    Some((cw, ccw))
}

/// Cyclic order of a P-node's skeleton edges in which the parts of every
/// important edge are consecutive, first edge fixed.
fn bond_order(tree: &SpqrTree, inst: &SunflowerInstance, node: usize) -> Option<Vec<usize>> {
    let (inner, imp) = important_edges(tree, inst, node);
    let mut need: BTreeSet<(usize, usize)> = BTreeSet::new();
    for g in 0..2 {
        for &j in &imp[g] {
            let e = inst.exclusive(g)[j];
            if let (Part::Edge(a), Part::Edge(b)) = (part_of(tree, node, &inner, e.0), part_of(tree, node, &inner, e.1)) {
                need.insert((a.min(b), a.max(b)));
            }
        }
    }
    let m = tree.nodes[node].edges.len();
    let mut rest: Vec<usize> = (1..m).collect();
    let mut found = None;
    permute(&mut rest, 0, &mut |p| {
        let mut order = vec![0];
        order.extend_from_slice(p);
        let ok = need.iter().all(|&(a, b)| {
            let pa = order.iter().position(|&x| x == a).unwrap();
            let pb = order.iter().position(|&x| x == b).unwrap();
            (pa + 1) % m == pb || (pb + 1) % m == pa
        });
        if ok && found.is_none() {
            found = Some(order);
        }
    });
    found
}

fn permute(a: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == a.len() {
        f(a);
        return;
    }
    for i in k..a.len() {
        a.swap(k, i);
        permute(a, k + 1, f);
        a.swap(k, i);
    }
}

/// Whether the parts of every important edge of an R-node share a face of
/// its (unique up to flip) embedding.
fn rigid_ok(tree: &SpqrTree, inst: &SunflowerInstance, node: usize) -> bool {
    let nd = &tree.nodes[node];
    let faces = skeleton_faces(nd, &skeleton_rotation(nd, None));
    let (inner, imp) = important_edges(tree, inst, node);
    (0..2).all(|g| {
        imp[g].iter().all(|&j| {
            let e = inst.exclusive(g)[j];
            let (p, q) = (part_of(tree, node, &inner, e.0), part_of(tree, node, &inner, e.1));
            faces.iter().any(|f| face_has(f, p) && face_has(f, q))
        })
    })
}

/// Reference orders of the P-nodes (`None` for other nodes).
pub fn reference_orders(tree: &SpqrTree, inst: &SunflowerInstance) -> Result<Vec<Option<Vec<usize>>>, String> {
    let mut out = Vec::with_capacity(tree.nodes.len());
    for x in 0..tree.nodes.len() {
        match tree.nodes[x].kind {
            NodeKind::P => match bond_order(tree, inst, x) {
                Some(o) => out.push(Some(o)),
                None => return Err(format!("P-node {x}: no order keeps the parts of its exclusive edges together")),
            },
            NodeKind::R => {
                if !rigid_ok(tree, inst, x) {
                    return Err(format!("R-node {x}: an exclusive edge joins parts without a common face"));
                }
                out.push(None);
            }
            NodeKind::S => out.push(None),
        }
    }
    Ok(out)
}

/// One instance per S-node that has important edges. Requires every
/// exclusive endpoint to have shared degree 2.
pub fn extract_snode_instances(inst: &SunflowerInstance, tree: &SpqrTree) -> Extraction {
    if let Err(why) = reference_orders(tree, inst) {
        return Extraction::Infeasible(why);
    }
    let mut out = Vec::new();
    for node in 0..tree.nodes.len() {
        let nd = &tree.nodes[node];
        if nd.kind != NodeKind::S {
            continue;
        }
        let (inner, important) = important_edges(tree, inst, node);
        if important.iter().all(Vec::is_empty) {
            continue;
        }
        let mut att: BTreeMap<usize, BTreeSet<VertexId>> = BTreeMap::new();
        for g in 0..2 {
            for &j in &important[g] {
                let e = inst.exclusive(g)[j];
                for w in [e.0, e.1] {
                    if let Part::Edge(i) = part_of(tree, node, &inner, w) {
                        att.entry(i).or_default().insert(w);
                    }
                }
            }
        }
        let mut expanded = Vec::new();
        for (&i, set) in &att {
            let list: Vec<VertexId> = set.iter().copied().collect();
            let Some((cw, ccw)) = attachment_order(tree, node, i, &list) else {
                return Extraction::Infeasible(format!("S-node {node}: attachments of skeleton edge {i} do not fit on one face"));
            };
            expanded.push(ExpandedEdge { edge: i, u: nd.edges[i].a, v: nd.edges[i].b, cw, ccw });
        }
        out.push(SNodeInstance { node, cycle: nd.cycle(), expanded, important });
    }
    Extraction::Instances(out)
}

/// A flattened S-node instance with the origin of every vertex and
/// exclusive edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatInstance {
    pub cycle: CycleInstance,
    /// Vertex of the decomposed instance, `None` for gadget vertices.
    pub origin: Vec<Option<VertexId>>,
    /// Per graph, the exclusive edge index in the decomposed instance.
    pub edge_origin: Vec<Vec<Option<usize>>>,
}

impl SNodeInstance {
    fn vertices(&self) -> Vec<VertexId> {
        let mut v = self.cycle.clone();
        for x in &self.expanded {
            v.extend(x.cw.iter().chain(&x.ccw));
        }
        v
    }

    /// The instance before flattening: the skeleton cycle in which each
    /// expanded edge became a cycle. Returns it with the original id of
    /// every local vertex.
    pub fn to_sunflower(&self, inst: &SunflowerInstance) -> Result<(SunflowerInstance, Vec<VertexId>), InstanceError> {
        let verts = self.vertices();
        let idx: BTreeMap<VertexId, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let names = verts.iter().map(|&v| inst.names()[v].clone()).collect();
        let m = self.cycle.len();
        let mut shared = Vec::new();
        for i in 0..m {
            let (a, b) = (self.cycle[i], self.cycle[(i + 1) % m]);
            match self.expanded.iter().find(|x| x.edge == i) {
                None => shared.push(Edge::new(idx[&a], idx[&b])),
                Some(x) => {
                    for side in [&x.cw, &x.ccw] {
                        let path: Vec<VertexId> = core::iter::once(a).chain(side.iter().copied()).chain(core::iter::once(b)).collect();
                        for w in path.windows(2) {
                            shared.push(Edge::new(idx[&w[0]], idx[&w[1]]));
                        }
                    }
                }
            }
        }
        // Two-edge S-nodes can produce the same pole pair twice; one copy
        // carries the same constraints.
        shared.sort_unstable();
        shared.dedup();
        let exclusive = (0..2)
            .map(|g| self.important[g].iter().map(|&j| {
                let e = inst.exclusive(g)[j];
                Edge::new(idx[&e.0], idx[&e.1])
            }).collect())
            .collect();
        Ok((SunflowerInstance::new(names, shared, exclusive)?, verts))
    }

    /// Replaces every expanded cycle with poles `u, v` by the path
    /// `u, a1, a2, cw.., x1..x4, ccw.., b1, b2, v` plus the gadget edges
    /// `(a2,x3), (x1,x3), (x2,x4), (x2,b1)` in G1 and `(a1,x3)` or
    /// `(a1,x4)`, and `(x2,b2)` in G2.
    pub fn flatten(&self, inst: &SunflowerInstance, variant: GadgetVariant) -> Result<FlatInstance, InstanceError> {
        let mut names: Vec<String> = Vec::new();
        let mut origin: Vec<Option<VertexId>> = Vec::new();
        let mut local: BTreeMap<VertexId, usize> = BTreeMap::new();
        let mut namer = Namer::new(inst.names());
        let mut order = Vec::new();
        let mut gadget: Vec<Vec<Edge>> = vec![Vec::new(), Vec::new()];
        let mut add_orig = |v: VertexId, names: &mut Vec<String>, origin: &mut Vec<Option<VertexId>>, order: &mut Vec<usize>| {
            names.push(inst.names()[v].clone());
            origin.push(Some(v));
            local.insert(v, names.len() - 1);
            order.push(names.len() - 1);
        };
        for (i, &c) in self.cycle.iter().enumerate() {
            add_orig(c, &mut names, &mut origin, &mut order);
            let Some(x) = self.expanded.iter().find(|x| x.edge == i) else { continue };
            let mut special = |role: &str, names: &mut Vec<String>, origin: &mut Vec<Option<VertexId>>, order: &mut Vec<usize>| {
                names.push(namer.fresh(format!("{role}.{}.{}", self.node, i)));
                origin.push(None);
                order.push(names.len() - 1);
                names.len() - 1
            };
            let a1 = special("a1", &mut names, &mut origin, &mut order);
            let a2 = special("a2", &mut names, &mut origin, &mut order);
            for &w in &x.cw {
                add_orig(w, &mut names, &mut origin, &mut order);
            }
            let xs: Vec<usize> = (1..=4).map(|k| special(&format!("x{k}"), &mut names, &mut origin, &mut order)).collect();
            for &w in &x.ccw {
                add_orig(w, &mut names, &mut origin, &mut order);
            }
            let b1 = special("b1", &mut names, &mut origin, &mut order);
            let b2 = special("b2", &mut names, &mut origin, &mut order);
            gadget[0].extend([Edge::new(a2, xs[2]), Edge::new(xs[0], xs[2]), Edge::new(xs[1], xs[3]), Edge::new(xs[1], b1)]);
            let a1_to = if variant == GadgetVariant::A1X3 { xs[2] } else { xs[3] };
            gadget[1].extend([Edge::new(a1, a1_to), Edge::new(xs[1], b2)]);
        }
        let mut exclusive: Vec<Vec<Edge>> = vec![Vec::new(), Vec::new()];
        let mut edge_origin: Vec<Vec<Option<usize>>> = vec![Vec::new(), Vec::new()];
        for g in 0..2 {
            for &j in &self.important[g] {
                let e = inst.exclusive(g)[j];
                exclusive[g].push(Edge::new(local[&e.0], local[&e.1]));
                edge_origin[g].push(Some(j));
            }
            for &e in &gadget[g] {
                exclusive[g].push(e);
                edge_origin[g].push(None);
            }
        }
        let cycle = CycleInstance::new(names, order, Vec::new(), exclusive)?;
        Ok(FlatInstance { cycle, origin, edge_origin })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    Real(usize),
    Virt(usize, usize),
}

/// Rotation system of the decomposed graph obtained by gluing skeleton
/// rotations along twin edges, starting at node 0. `orders[x]` is the edge
/// order of a P-node; `flips[x]` mirrors the skeleton of node `x`.
pub fn glue_embedding(tree: &SpqrTree, orders: &[Option<Vec<usize>>], flips: &[bool]) -> RotationSystem {
    let local = |x: usize| -> BTreeMap<VertexId, Vec<Slot>> {
        let nd = &tree.nodes[x];
        skeleton_rotation(nd, orders[x].as_deref())
            .into_iter()
            .map(|(v, list)| {
                let mut l: Vec<Slot> = list
                    .into_iter()
                    .map(|i| match nd.edges[i].link {
                        Link::Real(r) => Slot::Real(r),
                        Link::Virtual { .. } => Slot::Virt(x, i),
                    })
                    .collect();
                if flips[x] {
                    l.reverse();
                }
                (v, l)
            })
            .collect()
    };
    let mut rot = local(0);
    let mut pending: Vec<(usize, usize)> = tree.neighbors(0).into_iter().map(|(i, _)| (0, i)).collect();
    while let Some((x, i)) = pending.pop() {
        let Link::Virtual { node: y, edge: j } = tree.nodes[x].edges[i].link else { unreachable!() };
        let sub = local(y);
        let poles = (tree.nodes[y].edges[j].a, tree.nodes[y].edges[j].b);
        for (v, list) in sub {
            if v == poles.0 || v == poles.1 {
                let p = list.iter().position(|&s| s == Slot::Virt(y, j)).unwrap();
                let rest: Vec<Slot> = (1..list.len()).map(|k| list[(p + k) % list.len()]).collect();
                let host = rot.get_mut(&v).unwrap();
                let q = host.iter().position(|&s| s == Slot::Virt(x, i)).unwrap();
                host.splice(q..=q, rest);
            } else {
                rot.insert(v, list);
            }
        }
        pending.extend(tree.neighbors(y).into_iter().filter(|&(k, _)| k != j).map(|(k, _)| (y, k)));
    }
    let mut out = vec![Vec::new(); tree.n];
    for (v, list) in rot {
        out[v] = list
            .into_iter()
            .map(|s| match s {
                Slot::Real(r) => tree.graph[r].other(v),
                Slot::Virt(..) => unreachable!("every virtual edge is replaced"),
            })
            .collect();
    }
    RotationSystem::new(out)
}

/// Calls `f` with every embedding of the decomposed graph: all cyclic
/// orders of every P-node and both flips of every R-node other than the
/// root. Stops when `f` returns `Some`.
pub fn for_each_embedding<T>(tree: &SpqrTree, mut f: impl FnMut(&RotationSystem) -> Option<T>) -> Option<T> {
    let mut choices: Vec<Vec<(Option<Vec<usize>>, bool)>> = Vec::new();
    for (x, nd) in tree.nodes.iter().enumerate() {
        match nd.kind {
            NodeKind::S => choices.push(vec![(None, false)]),
            NodeKind::R if x == 0 => choices.push(vec![(None, false)]),
            NodeKind::R => choices.push(vec![(None, false), (None, true)]),
            NodeKind::P => {
                let mut rest: Vec<usize> = (1..nd.edges.len()).collect();
                let mut all = Vec::new();
                permute(&mut rest, 0, &mut |p| {
                    let mut o = vec![0];
                    o.extend_from_slice(p);
                    all.push((Some(o), false));
                });
                choices.push(all);
            }
        }
    }
    let mut pick = vec![0usize; choices.len()];
    loop {
        let orders: Vec<Option<Vec<usize>>> = (0..pick.len()).map(|x| choices[x][pick[x]].0.clone()).collect();
        let flips: Vec<bool> = (0..pick.len()).map(|x| choices[x][pick[x]].1).collect();
        if let Some(t) = f(&glue_embedding(tree, &orders, &flips)) {
            return Some(t);
        }
        let mut x = 0;
        loop {
            if x == pick.len() {
                return None;
            }
            pick[x] += 1;
            if pick[x] < choices[x].len() {
                break;
            }
            pick[x] = 0;
            x += 1;
        }
    }
}

/// Places the exclusive edges of `inst` into the faces of the shared
/// embedding `shared` so that every graph stays planar and the
/// orthogonality rules hold. Returns the full rotation system.
pub fn place_exclusive(inst: &SunflowerInstance, shared: &RotationSystem) -> Option<RotationSystem> {
    let faces = shared.faces();
    // pos[f][v]: index of the dart leaving v on face f.
    let pos: Vec<BTreeMap<VertexId, usize>> =
        faces.iter().map(|f| f.iter().enumerate().map(|(i, &(t, _))| (t, i)).collect()).collect();
    let mut items: Vec<(usize, Edge, Vec<usize>)> = Vec::new();
    for g in 0..inst.k() {
        for &e in inst.exclusive(g) {
            let common: Vec<usize> = (0..faces.len()).filter(|&f| pos[f].contains_key(&e.0) && pos[f].contains_key(&e.1)).collect();
            if common.is_empty() {
                return None;
            }
            items.push((g, e, common));
        }
    }
    items.sort_by_key(|x| x.2.len());
    let mut at: Vec<Vec<usize>> = vec![Vec::new(); inst.n()];
    for (k, it) in items.iter().enumerate() {
        at[it.1 .0].push(k);
        at[it.1 .1].push(k);
    }
    let mut choice: Vec<Option<usize>> = vec![None; items.len()];
    let sdeg: Vec<usize> = (0..inst.n()).map(|v| inst.shared_degree(v)).collect();
    let vertex_ok = |v: VertexId, choice: &[Option<usize>]| -> bool {
        let placed: Vec<(usize, usize)> = at[v].iter().filter_map(|&k| choice[k].map(|f| (f, items[k].0))).collect();
        if sdeg[v] >= 3 {
            return placed.iter().all(|p| p.0 == placed[0].0);
        }
        placed.iter().all(|&(f, g)| {
            placed.iter().filter(|p| p.0 == f && p.1 == g).count() < 2 || placed.iter().all(|p| p.0 == f)
        })
    };
    fn go(
        k: usize,
        items: &[(usize, Edge, Vec<usize>)],
        pos: &[BTreeMap<VertexId, usize>],
        choice: &mut Vec<Option<usize>>,
        vertex_ok: &dyn Fn(VertexId, &[Option<usize>]) -> bool,
    ) -> bool {
        if k == items.len() {
            return true;
        }
        let (g, e, ref common) = items[k];
        for &f in common {
            let crosses = (0..k).any(|q| {
                let (h, d, _) = items[q];
                if h != g || choice[q] != Some(f) || e.shares_endpoint(&d) {
                    return false;
                }
                let p = &pos[f];
                let (a, b) = (p[&e.0].min(p[&e.1]), p[&e.0].max(p[&e.1]));
                let inside = |x: usize| a < x && x < b;
                inside(p[&d.0]) != inside(p[&d.1])
            });
            if crosses {
                continue;
            }
            choice[k] = Some(f);
            if vertex_ok(e.0, choice) && vertex_ok(e.1, choice) && go(k + 1, items, pos, choice, vertex_ok) {
                return true;
            }
            choice[k] = None;
        }
        false
    }
    if !go(0, &items, &pos, &mut choice, &vertex_ok) {
        return None;
    }
    // Face of the angle after shared neighbor a at u: the face of dart (a, u).
    let mut face_of_dart: BTreeMap<(VertexId, VertexId), usize> = BTreeMap::new();
    for (f, face) in faces.iter().enumerate() {
        for &d in face {
            face_of_dart.insert(d, f);
        }
    }
    let mut rot = vec![Vec::new(); inst.n()];
    for u in 0..inst.n() {
        for &a in &shared.rot[u] {
            rot[u].push(a);
            let f = face_of_dart[&(a, u)];
            let len = faces[f].len();
            let mut chords: Vec<(usize, VertexId)> = at[u]
                .iter()
                .filter(|&&k| choice[k] == Some(f))
                .map(|&k| {
                    let w = items[k].1.other(u);
                    ((pos[f][&w] + len - pos[f][&u]) % len, w)
                })
                .collect();
            chords.sort_unstable_by(|x, y| y.cmp(x));
            rot[u].extend(chords.into_iter().map(|c| c.1));
        }
    }
    Some(RotationSystem::new(rot))
}

/// A rotation system of the whole instance that passes
/// [`check_sefe_orthogonality`], searched over the embeddings described by
/// the SPQR-tree of the shared graph.
pub fn assemble_rotation(inst: &SunflowerInstance) -> Result<Option<RotationSystem>, BiconnectedError> {
    let tree = SpqrTree::build(inst.n(), inst.shared())?;
    Ok(for_each_embedding(&tree, |shared| {
        let r = place_exclusive(inst, shared)?;
        match check_sefe_orthogonality(inst, &r) {
            Ok(v) if v.feasible => Some(r),
            _ => None,
        }
    }))
}

/// Everything computed by [`solve_biconnected`].
#[derive(Clone, Debug)]
pub struct BiconnectedRun {
    pub feasible: bool,
    /// Why the instance was rejected before or without the cycle solver.
    pub reason: Option<String>,
    pub normalized: Option<Normalized>,
    pub snodes: Vec<SNodeInstance>,
    pub flats: Vec<FlatInstance>,
    pub runs: Vec<CycleRun>,
    /// Maximum union degree after each stage, labeled.
    pub degrees: Vec<(String, usize)>,
    /// A certified rotation system when feasible.
    pub rotation: Option<RotationSystem>,
}

impl BiconnectedRun {
    fn rejected(reason: String, degrees: Vec<(String, usize)>, normalized: Option<Normalized>) -> Self {
        BiconnectedRun {
            feasible: false,
            reason: Some(reason),
            normalized,
            snodes: Vec::new(),
            flats: Vec::new(),
            runs: Vec::new(),
            degrees,
            rotation: None,
        }
    }
}

pub fn solve_biconnected(inst: &SunflowerInstance) -> Result<BiconnectedRun, BiconnectedError> {
    solve_biconnected_with(inst, GadgetVariant::A1X3, |cs| cs.iter().map(solve_cycle_run).collect())
}

/// The driver with a pluggable batch solver for the flattened instances
/// (the command line runs them in parallel).
pub fn solve_biconnected_with(
    inst: &SunflowerInstance,
    variant: GadgetVariant,
    mut solve: impl FnMut(&[CycleInstance]) -> Vec<Result<CycleRun, CycleError>>,
) -> Result<BiconnectedRun, BiconnectedError> {
    if inst.k() != 2 {
        return Err(BiconnectedError::GraphCount(inst.k()));
    }
    if let Some(v) = (0..inst.n()).find(|&v| inst.union_degree(v) > 5) {
        return Err(BiconnectedError::UnionDegree { vertex: inst.names()[v].clone(), degree: inst.union_degree(v) });
    }
    if !is_biconnected(inst.n(), inst.shared()) {
        return Err(SpqrError::NotBiconnected.into());
    }
    let mut degrees = vec![(String::from("input"), inst.max_union_degree())];
    if !is_planar(inst.n(), inst.shared()) {
        return Ok(BiconnectedRun::rejected(String::from("the shared graph is not planar"), degrees, None));
    }
    let alternatives = normalize_attachments(inst)?;
    if alternatives.is_empty() {
        let why = String::from("the exclusive edges at a shared-degree-3 vertex have no common face");
        return Ok(BiconnectedRun::rejected(why, degrees, None));
    }
    let mut last = None;
    for norm in alternatives {
        let stage = decide_normalized(norm, variant, &mut degrees, &mut solve)?;
        if stage.feasible {
            let rotation = match assemble_rotation(inst)? {
                Some(r) => r,
                None => return Err(BiconnectedError::Assembly(String::from("no embedding of the shared graph accepts the exclusive edges"))),
            };
            return Ok(BiconnectedRun { rotation: Some(rotation), degrees, ..stage });
        }
        last = Some(stage);
    }
    Ok(BiconnectedRun { degrees, ..last.unwrap() })
}

fn decide_normalized(
    norm: Normalized,
    variant: GadgetVariant,
    degrees: &mut Vec<(String, usize)>,
    solve: &mut impl FnMut(&[CycleInstance]) -> Vec<Result<CycleRun, CycleError>>,
) -> Result<BiconnectedRun, BiconnectedError> {
    degrees.push((String::from("normalized"), norm.instance.max_union_degree()));
    // Moving endpoints can make a graph non-planar; the per-node instances
    // only see crossings that a planar graph could avoid.
    for g in 0..2 {
        let mut edges = norm.instance.shared().to_vec();
        edges.extend_from_slice(norm.instance.exclusive(g));
        if !is_planar(norm.instance.n(), &edges) {
            let why = format!("graph {} is not planar after moving attachments", g + 1);
            return Ok(BiconnectedRun::rejected(why, Vec::new(), Some(norm)));
        }
    }
    let tree = SpqrTree::build(norm.instance.n(), norm.instance.shared())?;
    let snodes = match extract_snode_instances(&norm.instance, &tree) {
        Extraction::Instances(s) => s,
        Extraction::Infeasible(why) => return Ok(BiconnectedRun::rejected(why, Vec::new(), Some(norm))),
    };
    let mut flats = Vec::with_capacity(snodes.len());
    for s in &snodes {
        let f = s.flatten(&norm.instance, variant)?;
        degrees.push((format!("S-node {} flattened", s.node), f.cycle.max_union_degree()));
        flats.push(f);
    }
    let cycles: Vec<CycleInstance> = flats.iter().map(|f| f.cycle.clone()).collect();
    let mut runs = Vec::with_capacity(cycles.len());
    for (s, r) in snodes.iter().zip(solve(&cycles)) {
        let r = r?;
        degrees.push((format!("S-node {} reduced", s.node), r.reduced.max_union_degree()));
        runs.push(r);
    }
    let feasible = runs.iter().all(|r| r.verdict.feasible);
    let reason = runs
        .iter()
        .position(|r| !r.verdict.feasible)
        .map(|i| format!("the instance of S-node {} is infeasible", snodes[i].node));
    Ok(BiconnectedRun { feasible, reason, normalized: Some(norm), snodes, flats, runs, degrees: Vec::new(), rotation: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    fn edges(list: &[(usize, usize)]) -> Vec<Edge> {
        list.iter().map(|&(a, b)| Edge::new(a, b)).collect()
    }

    #[test]
    fn small_shapes() {
        let k4 = edges(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let t = SpqrTree::build(4, &k4).unwrap();
        assert_eq!(t.census(), (0, 0, 1));
        let c5 = edges(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        let t = SpqrTree::build(5, &c5).unwrap();
        assert_eq!(t.census(), (1, 0, 0));
        assert_eq!(t.nodes[0].cycle(), vec![0, 1, 2, 3, 4]);
        // Theta: poles 0 and 1, paths 0-2-1, 0-3-1, 0-4-5-1.
        let theta = edges(&[(0, 2), (2, 1), (0, 3), (3, 1), (0, 4), (4, 5), (5, 1)]);
        let t = SpqrTree::build(6, &theta).unwrap();
        assert_eq!(t.census(), (3, 1, 0));
        let dump = t.dump(&names(6));
        assert!(dump.contains(" P\n"));
    }

    #[test]
    fn rigid_with_hanging_bonds() {
        // K4 on 0..4 with edge 0-1 doubled by the path 0-4-1 and 2-3 by 2-5-3.
        let g = edges(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (0, 4), (4, 1), (2, 5), (5, 3)]);
        let t = SpqrTree::build(6, &g).unwrap();
        assert_eq!(t.census(), (4, 2, 1));
        t.validate().unwrap();
        // Two R-nodes joined at a separation pair get an S-node between them.
        let g = edges(&[
            (0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3),
            (2, 4), (3, 4), (2, 5), (3, 5), (4, 5),
        ]);
        let t = SpqrTree::build(6, &g).unwrap();
        let (s, p, r) = t.census();
        assert_eq!((p, r), (1, 2));
        assert_eq!(s, 2);
    }

    #[test]
    fn rejects_cut_vertices() {
        let bowtie = edges(&[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]);
        assert_eq!(SpqrTree::build(5, &bowtie), Err(SpqrError::NotBiconnected));
    }

    #[test]
    fn expansions_partition_the_graph() {
        let g = edges(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (0, 4), (4, 1), (2, 5), (5, 3)]);
        let t = SpqrTree::build(6, &g).unwrap();
        for x in 0..t.nodes.len() {
            let mut all: Vec<usize> = (0..t.nodes[x].edges.len()).flat_map(|i| t.expansion(x, i)).collect();
            all.sort_unstable();
            assert_eq!(all, (0..g.len()).collect::<Vec<_>>());
        }
    }

    fn sunflower(n: usize, shared: &[(usize, usize)], g1: &[(usize, usize)], g2: &[(usize, usize)]) -> SunflowerInstance {
        SunflowerInstance::new(names(n), edges(shared), vec![edges(g1), edges(g2)]).unwrap()
    }

    #[test]
    fn degree_three_endpoint_in_a_rigid_node_is_moved() {
        // K4 on 0..3 with 0-3 subdivided by 4; G1 edge 1-4.
        let shared = [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (0, 4), (4, 3)];
        let inst = sunflower(5, &shared, &[(1, 4)], &[]);
        let out = normalize_attachments(&inst).unwrap();
        assert_eq!(out.len(), 1);
        let n = &out[0];
        assert_eq!(n.instance.n(), inst.n() + 3);
        // Three subdivision edges plus the edge w1w3.
        assert_eq!(n.instance.shared().len(), inst.shared().len() + 4);
        let mv = &n.moves[0];
        assert_eq!(mv.u, 1);
        // 1 and 4 share only the face 0-1-3-4, so x is 0 or 3.
        assert!(mv.x == 0 || mv.x == 3);
        assert_eq!(n.instance.exclusive(0), &[Edge::new(4, mv.w[1])]);
        assert_eq!(n.instance.shared_degree(mv.w[1]), 2);
    }

    #[test]
    fn already_normal_instances_are_unchanged() {
        let c5 = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)];
        let inst = sunflower(5, &c5, &[(0, 2)], &[(1, 3)]);
        let out = normalize_attachments(&inst).unwrap();
        assert_eq!(out, vec![Normalized { instance: inst, moves: Vec::new() }]);
    }

    #[test]
    fn unconstrained_pole_edge_gives_alternatives() {
        // Poles 0 and 1 with branches 0-2-1, 0-3-1, 0-4-1 and G1 edge 0-1.
        let shared = [(0, 2), (2, 1), (0, 3), (3, 1), (0, 4), (4, 1)];
        let inst = sunflower(5, &shared, &[(0, 1)], &[]);
        let out = normalize_attachments(&inst).unwrap();
        assert_eq!(out.len(), 3);
        assert!(solve_biconnected(&inst).unwrap().feasible);
    }

    #[test]
    fn cycle_gives_one_identical_instance() {
        let c6 = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)];
        let inst = sunflower(6, &c6, &[(0, 3), (1, 4)], &[(2, 5)]);
        let tree = SpqrTree::build(6, inst.shared()).unwrap();
        let Extraction::Instances(s) = extract_snode_instances(&inst, &tree) else { panic!() };
        assert_eq!(s.len(), 1);
        assert!(s[0].expanded.is_empty());
        let flat = s[0].flatten(&inst, GadgetVariant::A1X3).unwrap();
        assert_eq!(flat.cycle.n(), 6);
        let c = inst.as_cycle().unwrap();
        let same = |a: &CycleInstance, b: &CycleInstance| {
            let mut x: Vec<Vec<Edge>> = a.exclusive_all().to_vec();
            let mut y: Vec<Vec<Edge>> = b.exclusive_all().to_vec();
            x.iter_mut().chain(y.iter_mut()).for_each(|l| l.sort_unstable());
            x == y
        };
        assert!(same(&flat.cycle, &c));
        let run = solve_biconnected(&inst).unwrap();
        assert_eq!(run.feasible, crate::cyclesolver::solve_cycle(&c).unwrap().feasible);
    }

    #[test]
    fn theta_with_one_chord_per_branch() {
        // Poles 0 and 1; branches 0-2-3-4-1, 0-5-6-7-1, 0-8-9-10-1.
        let shared = [
            (0, 2), (2, 3), (3, 4), (4, 1),
            (0, 5), (5, 6), (6, 7), (7, 1),
            (0, 8), (8, 9), (9, 10), (10, 1),
        ];
        let inst = sunflower(11, &shared, &[(2, 4), (8, 10)], &[(5, 7)]);
        let tree = SpqrTree::build(11, inst.shared()).unwrap();
        let Extraction::Instances(s) = extract_snode_instances(&inst, &tree) else { panic!() };
        assert_eq!(s.len(), 3);
        for sn in &s {
            assert_eq!(sn.cycle.len(), 5);
            assert!(sn.expanded.is_empty());
            assert_eq!(sn.important.iter().map(Vec::len).sum::<usize>(), 1);
        }
        assert!(solve_biconnected(&inst).unwrap().feasible);
    }

    #[test]
    fn one_expanded_edge_becomes_the_gadget() {
        // S-node 0-2-1 (through 2) next to a bond whose other branches
        // are 0-3-1 and 0-4-1; G1 edges 2-3 and G2 edge 2-4.
        let shared = [(0, 2), (2, 1), (0, 3), (3, 1), (0, 4), (4, 1)];
        let inst = sunflower(5, &shared, &[(2, 3)], &[(2, 4)]);
        let tree = SpqrTree::build(5, inst.shared()).unwrap();
        let Extraction::Instances(s) = extract_snode_instances(&inst, &tree) else { panic!() };
        let sn = s.iter().find(|x| x.cycle.contains(&2)).unwrap();
        assert_eq!(sn.expanded.len(), 1);
        let x = &sn.expanded[0];
        let mut att: Vec<VertexId> = x.cw.iter().chain(&x.ccw).copied().collect();
        att.sort_unstable();
        assert_eq!(att, vec![3, 4]);
        for variant in [GadgetVariant::A1X3, GadgetVariant::A1X4] {
            let flat = sn.flatten(&inst, variant).unwrap();
            let special = flat.origin.iter().filter(|o| o.is_none()).count();
            assert_eq!(special, 8);
            assert_eq!(flat.cycle.n(), sn.cycle.len() + 2 + 8);
            assert_eq!(flat.cycle.exclusive(0).len(), 1 + 4);
            assert_eq!(flat.cycle.exclusive(1).len(), 1 + 2);
            let a1 = flat.cycle.names().iter().position(|n| n.starts_with("a1.")).unwrap();
            let target = if variant == GadgetVariant::A1X3 { "x3." } else { "x4." };
            let e = flat.cycle.exclusive(1).iter().find(|e| e.contains(a1)).unwrap();
            assert!(flat.cycle.names()[e.other(a1)].starts_with(target));
        }
        let run = solve_biconnected(&inst).unwrap();
        assert!(run.feasible);
        let r = run.rotation.unwrap();
        assert!(check_sefe_orthogonality(&inst, &r).unwrap().feasible);
    }

    #[test]
    fn non_planar_shared_graph_is_rejected() {
        // K_{3,3}
        let k33: Vec<(usize, usize)> = (0..3).flat_map(|a| (3..6).map(move |b| (a, b))).collect();
        let inst = sunflower(6, &k33, &[], &[]);
        let run = solve_biconnected(&inst).unwrap();
        assert!(!run.feasible);
        assert!(run.reason.unwrap().contains("planar"));
    }

    #[test]
    fn glued_embedding_of_a_bond_follows_the_order() {
        let shared = edges(&[(0, 2), (2, 1), (0, 3), (3, 1), (0, 4), (4, 1)]);
        let tree = SpqrTree::build(5, &shared).unwrap();
        let mut seen = BTreeSet::new();
        for_each_embedding(&tree, |r| {
            assert!(r.is_planar());
            let start = r.rot[0].iter().position(|&w| w == 2).unwrap();
            let l = r.rot[0].len();
            seen.insert((0..l).map(|k| r.rot[0][(start + k) % l]).collect::<Vec<_>>());
            None::<()>
        });
        assert_eq!(seen.len(), 2);
    }
}
