//! Polynomial decision pipeline for two graphs sharing a cycle: instance
//! transformations that make G1 outerplanar with maximum degree 3, the
//! encoding of the remaining orthogonality constraints as NAE-3SAT, and the
//! pullback of solutions through every transformation.
//!
//! Graph 0 plays the role of G1 and graph 1 of G2 throughout.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::constraints::{check_assignment, ConstraintError, Side, SideAssignment, Verdict};
use crate::instance::{CycleInstance, Edge, InstanceError, VertexId};
use crate::naesat::{nae_eval, nae_solve, Literal, NaeAssignment, NaeFormula};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CycleError {
    #[error("exactly two graphs are required, found {0}")]
    GraphCount(usize),
    #[error("every vertex must lie on the shared cycle")]
    OffCycle,
    #[error("union degree of `{vertex}` is {degree}, at most 5 is supported")]
    UnionDegree { vertex: String, degree: usize },
    #[error("`{0}` has degree 4 in both graphs")]
    DegreeFourInBoth(String),
    #[error("G1 has maximum degree above 3 at `{0}`")]
    G1Degree(String),
    #[error("exclusive edges of G1 alternate; outerplanarize first")]
    NotOuterplanar,
    #[error("G1 edge {0} leaves the region between an alternating pair")]
    Boundary(String),
    #[error("assignment does not satisfy the formula")]
    Unsatisfied,
    #[error("witness failed the re-check on the original instance")]
    WitnessRecheck,
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
}

/// Exclusive edges of one graph, joined when they alternate along the cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlternationGraph {
    pub graph: usize,
    /// Component per edge index; components are numbered by smallest member.
    pub comp: Vec<usize>,
    /// `false` for the part containing the smallest member.
    pub color: Vec<bool>,
    pub count: usize,
    pub bipartite: bool,
}

pub fn alternation_graph(c: &CycleInstance, graph: usize) -> AlternationGraph {
    let list = c.exclusive(graph);
    let m = list.len();
    let mut comp = vec![usize::MAX; m];
    let mut color = vec![false; m];
    let mut count = 0;
    let mut bipartite = true;
    for s in 0..m {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = count;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for y in 0..m {
                if y == x || !c.alternates(list[x], list[y]) {
                    continue;
                }
                if comp[y] == usize::MAX {
                    comp[y] = count;
                    color[y] = !color[x];
                    stack.push(y);
                } else if color[y] == color[x] {
                    bipartite = false;
                }
            }
        }
        count += 1;
    }
    AlternationGraph { graph, comp, color, count, bipartite }
}

/// Number of alternating pairs among the exclusive edges of `graph`.
pub fn alternating_pairs(c: &CycleInstance, graph: usize) -> usize {
    let list = c.exclusive(graph);
    let mut n = 0;
    for i in 0..list.len() {
        for j in i + 1..list.len() {
            if c.alternates(list[i], list[j]) {
                n += 1;
            }
        }
    }
    n
}

/// Vertices with two exclusive edges in `graph` (degree 4 on the cycle).
pub fn degree_four_vertices(c: &CycleInstance, graph: usize) -> Vec<VertexId> {
    c.order().iter().copied().filter(|&v| c.exclusive_degree(v, graph) == 2).collect()
}

/// Degree-4 vertices of G1 whose cycle path between their two G1
/// neighbors, taken through the vertex itself, passes another vertex
/// carrying an exclusive G1 edge.
pub fn crowded_vertices(c: &CycleInstance) -> Vec<VertexId> {
    let len = c.order().len();
    let mut out = Vec::new();
    for v in degree_four_vertices(c, 0) {
        let (u, w) = g1_neighbors_ordered(c, v);
        let p = c.position(v).unwrap();
        let back = (p + len - c.position(u).unwrap()) % len;
        let fwd = (c.position(w).unwrap() + len - p) % len;
        let order = c.order();
        let carries = |q: usize| c.exclusive_degree(order[q], 0) > 0;
        let busy = (1..back).any(|d| carries((p + len - d) % len)) || (1..fwd).any(|d| carries((p + d) % len));
        if busy {
            out.push(v);
        }
    }
    out
}

/// The two G1 neighbors of `v` as (reached going backward first, reached
/// going forward first).
fn g1_neighbors_ordered(c: &CycleInstance, v: VertexId) -> (VertexId, VertexId) {
    let len = c.order().len();
    let p = c.position(v).unwrap();
    let nb: Vec<VertexId> = c.exclusive(0).iter().filter(|e| e.contains(v)).map(|e| e.other(v)).collect();
    let fwd = |x: VertexId| (c.position(x).unwrap() + len - p) % len;
    if fwd(nb[0]) < fwd(nb[1]) {
        (nb[1], nb[0])
    } else {
        (nb[0], nb[1])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TransformKind {
    /// Removes one alternating pair of G1 edges.
    Outerplanarize,
    /// Removes one vertex of degree 4 in G1 (union degree at most 5).
    ReduceDegree,
    /// Moves the G1 edges of a crowded degree-4 vertex next to it.
    Isolate,
}

impl TransformKind {
    pub fn name(self) -> &'static str {
        match self {
            TransformKind::Outerplanarize => "outerplanarize",
            TransformKind::ReduceDegree => "reduce-degree",
            TransformKind::Isolate => "isolate-degree-four",
        }
    }
}

/// One application of a transformation. Vertex ids of the input are kept
/// in the output, new vertices are appended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformationTrace {
    pub kind: TransformKind,
    /// Edges of the input instance the step was applied to.
    pub site: Vec<Edge>,
    /// Role name and output vertex for every vertex the gadget uses.
    pub roles: Vec<(String, VertexId)>,
    /// For each exclusive edge (graph, index) of the input, the output edge
    /// whose side it takes.
    pub pullback: Vec<Vec<(usize, usize)>>,
    /// Termination measure before and after the step.
    pub measure: (usize, usize),
}

impl TransformationTrace {
    pub fn pull_back(&self, a: &SideAssignment) -> SideAssignment {
        SideAssignment {
            sides: self.pullback.iter().map(|l| l.iter().map(|&(g, i)| a.get(g, i)).collect()).collect(),
        }
    }
}

/// Pulls a solution of the last instance back through `traces`.
pub fn pull_back_all(traces: &[TransformationTrace], a: &SideAssignment) -> SideAssignment {
    traces.iter().rev().fold(a.clone(), |acc, t| t.pull_back(&acc))
}

struct Builder {
    names: Vec<String>,
    taken: BTreeSet<String>,
    order: Vec<VertexId>,
    ex: Vec<Vec<Edge>>,
    tag: String,
    roles: Vec<(String, VertexId)>,
}

impl Builder {
    fn new(c: &CycleInstance, tag: String) -> Self {
        Builder {
            names: c.names().to_vec(),
            taken: c.names().iter().cloned().collect(),
            order: c.order().to_vec(),
            ex: c.exclusive_all().to_vec(),
            tag,
            roles: Vec::new(),
        }
    }

    fn fresh(&mut self, role: &str) -> VertexId {
        let mut name = format!("{role}.{}", self.tag);
        while self.taken.contains(&name) {
            name.push('\'');
        }
        self.taken.insert(name.clone());
        self.names.push(name);
        let id = self.names.len() - 1;
        self.roles.push((String::from(role), id));
        id
    }

    fn role(&mut self, role: &str, v: VertexId) {
        self.roles.push((String::from(role), v));
    }

    fn path(&mut self, roles: &[&str]) -> Vec<VertexId> {
        roles.iter().map(|r| self.fresh(r)).collect()
    }

    fn remove(&mut self, g: usize, e: Edge) {
        self.ex[g].retain(|&f| f != e);
    }

    fn add(&mut self, g: usize, a: VertexId, b: VertexId) {
        self.ex[g].push(Edge::new(a, b));
    }

    /// Finishes the instance; `map` gives the output edge for an input edge.
    fn finish(
        self,
        input: &CycleInstance,
        kind: TransformKind,
        site: Vec<Edge>,
        map: impl Fn(usize, Edge) -> Edge,
        measure: impl Fn(&CycleInstance) -> usize,
    ) -> Result<(CycleInstance, TransformationTrace), CycleError> {
        let out = CycleInstance::new(self.names, self.order, Vec::new(), self.ex)?;
        let mut index = BTreeMap::new();
        for (g, list) in out.exclusive_all().iter().enumerate() {
            for (i, &e) in list.iter().enumerate() {
                index.insert((g, e), (g, i));
            }
        }
        let pullback = input
            .exclusive_all()
            .iter()
            .enumerate()
            .map(|(g, list)| list.iter().map(|&e| index[&(g, map(g, e))]).collect())
            .collect();
        let trace = TransformationTrace {
            kind,
            site,
            roles: self.roles,
            pullback,
            measure: (measure(input), measure(&out)),
        };
        Ok((out, trace))
    }
}

fn check_shape(c: &CycleInstance) -> Result<(), CycleError> {
    if c.k() != 2 {
        return Err(CycleError::GraphCount(c.k()));
    }
    if c.order().len() != c.n() {
        return Err(CycleError::OffCycle);
    }
    Ok(())
}

/// Replaces every vertex of degree 4 in G1 by a path in which its role is
/// taken by edges of G2. Requires every vertex to have degree at most 3 in
/// one of the two graphs.
pub fn reduce_degree(c: &CycleInstance) -> Result<(CycleInstance, Vec<TransformationTrace>), CycleError> {
    check_shape(c)?;
    for &v in c.order() {
        if c.exclusive_degree(v, 0) == 2 && c.exclusive_degree(v, 1) == 2 {
            return Err(CycleError::DegreeFourInBoth(c.names()[v].clone()));
        }
    }
    let mut cur = c.clone();
    let mut traces = Vec::new();
    let mut step = 0;
    while let Some(&v) = degree_four_vertices(&cur, 0).first() {
        step += 1;
        let (next, t) = degree_step(&cur, v, step)?;
        traces.push(t);
        cur = next;
    }
    Ok((cur, traces))
}

fn degree_step(c: &CycleInstance, v: VertexId, step: usize) -> Result<(CycleInstance, TransformationTrace), CycleError> {
    // e leads backward along the cycle, f forward, so e'' and f'' nest.
    let (ue, uf) = g1_neighbors_ordered(c, v);
    let e = Edge::new(v, ue);
    let f = Edge::new(v, uf);
    let h = c.exclusive(1).iter().copied().find(|g| g.contains(v));
    let mut b = Builder::new(c, format!("d{step}"));
    let mut roles = vec!["x1", "x2", "v_e", "x3", "y1", "y2", "v_f", "y3"];
    if h.is_some() {
        roles.extend(["z1", "z2", "v_h", "z3"]);
    }
    let p = b.path(&roles);
    b.role("v'", v);
    // v keeps its id and plays the vertex where e', f' and h' meet.
    let mut path: Vec<VertexId> = p[..8].to_vec();
    path.push(v);
    path.extend_from_slice(&p[8..]);
    let pos = c.position(v).unwrap();
    b.order.splice(pos..=pos, path);
    let (x1, x2, ve, x3, y1, y2, vf, y3) = (p[0], p[1], p[2], p[3], p[4], p[5], p[6], p[7]);
    b.remove(0, e);
    b.remove(0, f);
    b.add(0, ve, ue);
    b.add(0, vf, uf);
    b.add(1, x1, ve);
    b.add(1, x2, x3);
    b.add(1, y1, vf);
    b.add(1, y2, y3);
    b.add(1, ve, v);
    b.add(1, vf, v);
    let mut site = vec![e, f];
    let mut hh = None;
    if let Some(h) = h {
        let uh = h.other(v);
        let (z1, z2, vh, z3) = (p[8], p[9], p[10], p[11]);
        b.remove(1, h);
        b.add(0, vh, v);
        b.add(1, z1, vh);
        b.add(1, z2, z3);
        b.add(1, vh, uh);
        hh = Some((h, Edge::new(vh, uh)));
        site.push(h);
    }
    let (e2, f2) = (Edge::new(ve, ue), Edge::new(vf, uf));
    b.finish(
        c,
        TransformKind::ReduceDegree,
        site,
        |_, g| {
            if g == e {
                e2
            } else if g == f {
                f2
            } else if let Some((h, h2)) = hh.filter(|x| x.0 == g) {
                let _ = h;
                h2
            } else {
                g
            }
        },
        |x| degree_four_vertices(x, 0).len(),
    )
}

/// One alternating pair e = (u, v), f = (w, z) with u, w, v, z in this
/// order along `path`, the cycle walk from u to z through w and v.
struct Pair {
    e: Edge,
    f: Edge,
    path: Vec<VertexId>,
}

fn best_pair(c: &CycleInstance) -> Option<Pair> {
    let order = c.order();
    let len = order.len();
    let list = c.exclusive(0);
    let mut best: Option<((usize, Edge, Edge, VertexId, VertexId), Pair)> = None;
    for i in 0..list.len() {
        for j in i + 1..list.len() {
            if !c.alternates(list[i], list[j]) {
                continue;
            }
            for (e, f) in [(list[i], list[j]), (list[j], list[i])] {
                for u in [e.0, e.1] {
                    let v = e.other(u);
                    for z in [f.0, f.1] {
                        let w = f.other(z);
                        for dir in [1, len - 1] {
                            // Walk from u in direction dir; must meet w, v, z in order.
                            let pu = c.position(u).unwrap();
                            let step = |k: usize| order[(pu + k * dir) % len];
                            let idx = |x: VertexId| (0..len).find(|&k| step(k) == x).unwrap();
                            let (iw, iv, iz) = (idx(w), idx(v), idx(z));
                            if !(iw < iv && iv < iz) {
                                continue;
                            }
                            let key = (iz, e.min(f), e.max(f), u, z);
                            if best.as_ref().is_none_or(|b| key < b.0) {
                                let path = (0..=iz).map(step).collect();
                                best = Some((key, Pair { e, f, path }));
                            }
                        }
                    }
                }
            }
        }
    }
    best.map(|b| b.1)
}

/// Splices gadgets until no two exclusive edges of G1 alternate. G1 must
/// have maximum degree 3 or no crowded degree-4 vertex, and its
/// alternating pairs must be 2-colorable (otherwise the instance is
/// infeasible and `NotOuterplanar` is returned).
pub fn outerplanarize(c: &CycleInstance) -> Result<(CycleInstance, Vec<TransformationTrace>), CycleError> {
    check_shape(c)?;
    if !alternation_graph(c, 0).bipartite {
        return Err(CycleError::NotOuterplanar);
    }
    let deg4 = degree_four_vertices(c, 0);
    if !deg4.is_empty() && !crowded_vertices(c).is_empty() {
        return Err(CycleError::G1Degree(c.names()[deg4[0]].clone()));
    }
    let mut cur = c.clone();
    let mut traces = Vec::new();
    let mut step = 0;
    while let Some(pair) = best_pair(&cur) {
        step += 1;
        let (next, t) = outerplanar_step(&cur, pair, step)?;
        traces.push(t);
        cur = next;
    }
    Ok((cur, traces))
}

fn outerplanar_step(c: &CycleInstance, pair: Pair, step: usize) -> Result<(CycleInstance, TransformationTrace), CycleError> {
    let Pair { e, f, path } = pair;
    let u = path[0];
    let z = *path.last().unwrap();
    let v = e.other(u);
    let w = f.other(z);
    let iw = path.iter().position(|&x| x == w).unwrap();
    let iv = path.iter().position(|&x| x == v).unwrap();
    let h1 = &path[1..iw];
    let h2 = &path[iw + 1..iv];
    let h3 = &path[iv + 1..path.len() - 1];
    let inside: BTreeSet<VertexId> = h2.iter().copied().collect();
    for g in c.exclusive(0) {
        if inside.contains(&g.0) != inside.contains(&g.1) {
            return Err(CycleError::Boundary(c.edge_key(*g)));
        }
    }
    let mut b = Builder::new(c, format!("o{step}"));
    for (r, x) in [("u", u), ("v", v), ("w", w), ("z", z)] {
        b.role(r, x);
    }
    let wp = b.fresh("w'");
    let zp = b.fresh("z'");
    let x: Vec<VertexId> = b.path(&["x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8", "x9", "x10"]);
    let up = b.fresh("u'");
    let x11 = b.fresh("x11");
    let vp = b.fresh("v'");
    let mut np = vec![u];
    np.extend_from_slice(h1);
    np.push(wp);
    np.extend_from_slice(h2);
    if h2.is_empty() {
        // Keeps (w', z') from running parallel to a cycle edge.
        let filler = b.fresh("h");
        np.push(filler);
    }
    np.extend([zp, x[0], x[1], x[2], v, x[3], x[4], x[5], x[6], w, x[7], x[8], x[9], up, x11, vp]);
    np.extend_from_slice(h3);
    np.push(z);
    let on_path: BTreeSet<VertexId> = path.iter().copied().collect();
    // Rest of the cycle, continuing in the direction of the path.
    let order = c.order();
    let len = order.len();
    let dir = if order[(c.position(u).unwrap() + 1) % len] == path[1] { 1 } else { len - 1 };
    let pz = c.position(z).unwrap();
    let mut rest = Vec::new();
    let mut k = (pz + dir) % len;
    while !on_path.contains(&order[k]) {
        rest.push(order[k]);
        k = (k + dir) % len;
    }
    np.extend(rest);
    b.order = np;
    let rehome = |g: Edge| -> Edge {
        let a = if g.0 == w { wp } else if g.0 == v { vp } else { g.0 };
        let bb = if g.1 == w { wp } else if g.1 == v { vp } else { g.1 };
        Edge::new(a, bb)
    };
    b.ex[1] = c.exclusive(1).iter().map(|&g| rehome(g)).collect();
    b.add(0, up, vp);
    b.add(0, wp, zp);
    for (p, q) in [
        (zp, x[1]),
        (zp, x[2]),
        (x[0], v),
        (x[2], x[3]),
        (v, x[5]),
        (x[4], w),
        (x[6], x[7]),
        (w, x[9]),
        (x[7], up),
        (x[8], up),
    ] {
        b.add(1, p, q);
    }
    b.finish(
        c,
        TransformKind::Outerplanarize,
        vec![e, f],
        |g, edge| if g == 1 { rehome(edge) } else { edge },
        |x| alternating_pairs(x, 0),
    )
}

/// Splices gadgets until every degree-4 vertex of G1 has its G1 neighbors
/// next to it along the cycle (only edge-free vertices in between), then
/// outerplanarizes. The result has a cycle as shared graph, G1 outerplanar
/// and no crowded degree-4 vertex.
pub fn isolate_degree_four(c: &CycleInstance) -> Result<(CycleInstance, Vec<TransformationTrace>), CycleError> {
    check_shape(c)?;
    let mut cur = c.clone();
    let mut traces = Vec::new();
    let mut step = 0;
    while let Some(&v) = crowded_vertices(&cur).first() {
        step += 1;
        let (next, t) = isolate_step(&cur, v, step)?;
        traces.push(t);
        cur = next;
    }
    let (out, more) = outerplanarize(&cur)?;
    traces.extend(more);
    Ok((out, traces))
}

fn isolate_step(c: &CycleInstance, v: VertexId, step: usize) -> Result<(CycleInstance, TransformationTrace), CycleError> {
    let (u, w) = g1_neighbors_ordered(c, v);
    let e = Edge::new(u, v);
    let f = Edge::new(v, w);
    let mut b = Builder::new(c, format!("s{step}"));
    b.role("u", u);
    b.role("v", v);
    b.role("w", w);
    let xs = b.path(&["x1", "x2", "v_a", "x3", "x4", "x5", "x6", "x7", "x8", "u'", "x9", "x10"]);
    let ys = b.path(&["y1", "y2", "w'", "y3", "y4", "y5", "y6", "y7", "y8", "v_b", "y9", "y10"]);
    let mut path = xs.clone();
    path.push(v);
    path.extend_from_slice(&ys);
    let pos = c.position(v).unwrap();
    b.order.splice(pos..=pos, path);
    let x = |i: usize| xs[[0, 1, 3, 4, 5, 6, 7, 8, 10, 11][i - 1]];
    let y = |i: usize| ys[[0, 1, 3, 4, 5, 6, 7, 8, 10, 11][i - 1]];
    let (va, up, wp, vb) = (xs[2], xs[9], ys[2], ys[9]);
    b.remove(0, e);
    b.remove(0, f);
    b.add(0, u, va);
    b.add(0, up, v);
    b.add(0, v, wp);
    b.add(0, vb, w);
    for (p, q) in [
        (x(1), va),
        (x(2), x(3)),
        (va, x(5)),
        (x(4), x(7)),
        (x(6), up),
        (x(8), x(9)),
        (up, x(10)),
        (y(1), wp),
        (y(2), y(3)),
        (wp, y(5)),
        (y(4), y(7)),
        (y(6), vb),
        (y(8), y(9)),
        (vb, y(10)),
    ] {
        b.add(1, p, q);
    }
    let (e1, f1) = (Edge::new(u, va), Edge::new(vb, w));
    b.finish(
        c,
        TransformKind::Isolate,
        vec![e, f],
        |_, g| {
            if g == e {
                e1
            } else if g == f {
                f1
            } else {
                g
            }
        },
        |x| crowded_vertices(x).len(),
    )
}

/// What a variable of the reduction stands for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarMeaning {
    /// True iff the part of the component holding its smallest member lies Left.
    Component(usize),
    /// True iff the G1 edge with this index lies Right.
    Helper(usize),
}

/// Which G1 edge and endpoint a clause was built for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClauseOrigin {
    pub edge: usize,
    pub endpoint: VertexId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionCertificate {
    pub formula: NaeFormula,
    pub meaning: Vec<VarMeaning>,
    pub origins: Vec<ClauseOrigin>,
    pub alternation: AlternationGraph,
    /// Helper variable per G1 edge.
    pub helper: Vec<usize>,
}

/// Encodes the orthogonality constraints of an instance with G1 outerplanar
/// and of maximum degree 3 as NAE-3SAT. `None` when G2 cannot satisfy its
/// planarity constraints.
pub fn reduce_to_nae(c: &CycleInstance) -> Result<Option<ReductionCertificate>, CycleError> {
    check_shape(c)?;
    if alternating_pairs(c, 0) > 0 {
        return Err(CycleError::NotOuterplanar);
    }
    if let Some(v) = degree_four_vertices(c, 0).first() {
        return Err(CycleError::G1Degree(c.names()[*v].clone()));
    }
    let h = alternation_graph(c, 1);
    if !h.bipartite {
        return Ok(None);
    }
    let mut formula = NaeFormula::new(h.count);
    let mut meaning: Vec<VarMeaning> = (0..h.count).map(VarMeaning::Component).collect();
    let mut origins = Vec::new();
    let mut helper = Vec::new();
    // Literal that is true iff the G2 edge lies Left.
    let lit = |i: usize| Literal { var: h.comp[i], positive: !h.color[i] };
    for (j, e) in c.exclusive(0).iter().enumerate() {
        let x = formula.add_var();
        meaning.push(VarMeaning::Helper(j));
        helper.push(x);
        for (end, negate) in [(e.0, false), (e.1, true)] {
            let at: Vec<usize> = (0..c.exclusive(1).len()).filter(|&i| c.exclusive(1)[i].contains(end)).collect();
            // With fewer than two G2 edges at the endpoint nothing is forced there.
            if at.len() < 2 {
                continue;
            }
            let mut clause: Vec<Literal> = at.iter().map(|&i| if negate { !lit(i) } else { lit(i) }).collect();
            clause.push(if negate { Literal::neg(x) } else { Literal::pos(x) });
            formula.add_clause(clause);
            origins.push(ClauseOrigin { edge: j, endpoint: end });
        }
    }
    Ok(Some(ReductionCertificate { formula, meaning, origins, alternation: h, helper }))
}

/// Side assignment encoded by a satisfying assignment of the formula.
pub fn decode(c: &CycleInstance, cert: &ReductionCertificate, t: &NaeAssignment) -> Result<SideAssignment, CycleError> {
    if t.values.len() != cert.formula.vars || !nae_eval(&cert.formula, t) {
        return Err(CycleError::Unsatisfied);
    }
    let h = &cert.alternation;
    let g2 = (0..c.exclusive(1).len()).map(|i| Side::from_left(t.values[h.comp[i]] != h.color[i])).collect();
    let g1 = cert.helper.iter().map(|&x| Side::from_left(!t.values[x])).collect();
    Ok(SideAssignment { sides: vec![g1, g2] })
}

/// Everything the pipeline produced for one instance.
#[derive(Clone, Debug)]
pub struct CycleRun {
    pub verdict: Verdict,
    pub traces: Vec<TransformationTrace>,
    pub reduced: CycleInstance,
    pub certificate: Option<ReductionCertificate>,
}

/// Decides instances with two graphs, a shared cycle and union degree at
/// most 5. A feasible verdict carries a witness for the input instance.
pub fn solve_cycle(c: &CycleInstance) -> Result<Verdict, CycleError> {
    solve_cycle_run(c).map(|r| r.verdict)
}

pub fn solve_cycle_run(c: &CycleInstance) -> Result<CycleRun, CycleError> {
    check_shape(c)?;
    for &v in c.order() {
        let d = c.union_degree(v);
        if d > 5 {
            return Err(CycleError::UnionDegree { vertex: c.names()[v].clone(), degree: d });
        }
    }
    let infeasible = |traces, reduced| CycleRun { verdict: Verdict::infeasible(), traces, reduced, certificate: None };
    if !alternation_graph(c, 0).bipartite || !alternation_graph(c, 1).bipartite {
        return Ok(infeasible(Vec::new(), c.clone()));
    }
    let (low, mut traces) = reduce_degree(c)?;
    let (outer, more) = match outerplanarize(&low) {
        Ok(x) => x,
        Err(CycleError::NotOuterplanar) => return Ok(infeasible(traces, low)),
        Err(e) => return Err(e),
    };
    traces.extend(more);
    let Some(cert) = reduce_to_nae(&outer)? else {
        return Ok(infeasible(traces, outer));
    };
    let Some(t) = nae_solve(&cert.formula) else {
        return Ok(CycleRun { verdict: Verdict::infeasible(), traces, reduced: outer, certificate: Some(cert) });
    };
    let a = decode(&outer, &cert, &t)?;
    let witness = pull_back_all(&traces, &a);
    if !check_assignment(c, &witness)?.feasible {
        return Err(CycleError::WitnessRecheck);
    }
    Ok(CycleRun { verdict: Verdict::feasible(witness), traces, reduced: outer, certificate: Some(cert) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::oracle;
    use crate::naesat::is_planar_formula;
    use alloc::string::ToString;

    fn cyc(n: usize, g1: &[(usize, usize)], g2: &[(usize, usize)]) -> CycleInstance {
        let ex = vec![
            g1.iter().map(|&(a, b)| Edge::new(a, b)).collect(),
            g2.iter().map(|&(a, b)| Edge::new(a, b)).collect(),
        ];
        CycleInstance::new((0..n).map(|i| i.to_string()).collect(), (0..n).collect(), vec![], ex).unwrap()
    }

    #[test]
    fn single_alternating_pair_on_an_octagon() {
        let c = cyc(8, &[(0, 4), (2, 6)], &[]);
        let (out, traces) = outerplanarize(&c).unwrap();
        assert_eq!(traces.len(), 1);
        assert_eq!(out.n(), 8 + 15);
        assert_eq!(alternating_pairs(&out, 0), 0);
        assert_eq!(traces[0].measure, (1, 0));
        assert_eq!(oracle(&c).unwrap().feasible, oracle(&out).unwrap().feasible);
    }

    #[test]
    fn outerplanar_input_is_a_fixpoint() {
        let c = cyc(6, &[(0, 2), (3, 5)], &[(1, 4)]);
        let (out, traces) = outerplanarize(&c).unwrap();
        assert!(traces.is_empty());
        assert_eq!(out, c);
    }

    #[test]
    fn degree_four_vertex_is_split() {
        // Vertex 0 has G1 edges to 3 and 6 and a G2 edge to 4 (u_e, v, u_f, u_h order up to labels).
        let c = cyc(9, &[(0, 3), (0, 6)], &[(0, 4)]);
        let (out, traces) = reduce_degree(&c).unwrap();
        assert_eq!(traces.len(), 1);
        assert!(degree_four_vertices(&out, 0).is_empty());
        assert_eq!(out.n(), 9 + 12);
        assert_eq!(oracle(&c).unwrap().feasible, oracle(&out).unwrap().feasible);
    }

    #[test]
    fn crowded_vertex_gets_free_neighbors() {
        let c = cyc(9, &[(0, 3), (0, 6), (1, 7)], &[]);
        assert_eq!(crowded_vertices(&c), vec![0]);
        let (out, traces) = isolate_degree_four(&c).unwrap();
        assert!(traces[0].kind == TransformKind::Isolate);
        assert!(crowded_vertices(&out).is_empty());
        assert_eq!(alternating_pairs(&out, 0), 0);
        // The cycle neighbors of the degree-4 vertex carry no G1 edge.
        let p = out.position(0).unwrap();
        let len = out.order().len();
        for q in [(p + 1) % len, (p + len - 1) % len] {
            assert_eq!(out.exclusive_degree(out.order()[q], 0), 0);
        }
    }

    #[test]
    fn formula_without_g1_edges() {
        let c = cyc(6, &[], &[(0, 2), (1, 3)]);
        let cert = reduce_to_nae(&c).unwrap().unwrap();
        assert!(cert.formula.clauses.is_empty());
        let t = NaeAssignment { values: vec![false; cert.formula.vars] };
        let a = decode(&c, &cert, &t).unwrap();
        // Smallest member's part is Right under the all-false assignment.
        assert_eq!(a.sides[1], vec![Side::Right, Side::Left]);
    }

    #[test]
    fn odd_alternation_cycle_is_infeasible() {
        let c = cyc(6, &[], &[(0, 3), (1, 4), (2, 5)]);
        assert!(reduce_to_nae(&c).unwrap().is_none());
        assert!(!solve_cycle(&c).unwrap().feasible);
    }

    #[test]
    fn pipeline_on_a_small_instance() {
        let c = cyc(8, &[(0, 4), (2, 6), (1, 5)], &[(0, 2), (0, 6), (4, 7)]);
        let run = solve_cycle_run(&c).unwrap();
        assert_eq!(run.verdict.feasible, oracle(&c).unwrap().feasible);
        if let Some(cert) = &run.certificate {
            assert!(is_planar_formula(&cert.formula));
        }
    }
}
