//! Side assignments, the planarity and orthogonality constraints, the
//! exhaustive feasibility oracle for cycle instances, and the local
//! orthogonality test for rotation systems.
//!
//! `Left` means inside the shared cycle, `Right` outside.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::instance::{CycleInstance, Edge, SunflowerInstance, VertexId};
use crate::rotation::RotationSystem;

/// Default bound on the number of exclusive edges accepted by [`oracle`].
pub const DEFAULT_ORACLE_CAP: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    pub fn from_left(left: bool) -> Side {
        if left {
            Side::Left
        } else {
            Side::Right
        }
    }

    pub fn letter(self) -> char {
        match self {
            Side::Left => 'L',
            Side::Right => 'R',
        }
    }
}

/// One side per exclusive edge, indexed like `CycleInstance::exclusive`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SideAssignment {
    pub sides: Vec<Vec<Side>>,
}

impl SideAssignment {
    pub fn uniform(c: &CycleInstance, side: Side) -> Self {
        SideAssignment { sides: c.exclusive_all().iter().map(|l| vec![side; l.len()]).collect() }
    }

    pub fn get(&self, graph: usize, index: usize) -> Side {
        self.sides[graph][index]
    }

    pub fn flipped(&self) -> Self {
        SideAssignment { sides: self.sides.iter().map(|l| l.iter().map(|s| s.flip()).collect()).collect() }
    }

    /// Side of exclusive edge `e`, searching all graphs.
    pub fn side_of(&self, c: &CycleInstance, e: Edge) -> Option<Side> {
        for (g, list) in c.exclusive_all().iter().enumerate() {
            if let Some(i) = list.iter().position(|&f| f == e) {
                return self.sides.get(g).and_then(|l| l.get(i)).copied();
            }
        }
        None
    }

    pub fn is_total_for(&self, c: &CycleInstance) -> bool {
        self.sides.len() == c.k() && self.sides.iter().zip(c.exclusive_all()).all(|(s, e)| s.len() == e.len())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Two alternating edges of one graph on the same side.
    Planarity { graph: usize, e: Edge, f: Edge, side: Side },
    /// `graph` has two edges on `side` at `vertex`, but `offending` edges
    /// at the vertex lie on the other side.
    Orthogonality { vertex: VertexId, graph: usize, pair: (Edge, Edge), side: Side, offending: Vec<Edge> },
    /// Edges of one path through isolated vertices on different sides.
    ConnectorSplit { edges: Vec<Edge> },
    /// Two paths through isolated vertices whose anchors alternate, same side.
    ConnectorCrossing { first: (VertexId, VertexId), second: (VertexId, VertexId) },
    /// Shared degree 2: a graph has two edges in one gap, other edges elsewhere.
    GapSide { vertex: VertexId, graph: usize, edges: Vec<Edge> },
    /// Shared degree 3: exclusive edges spread over several gaps.
    GapSplit { vertex: VertexId, edges: Vec<Edge> },
}

impl Violation {
    pub fn describe(&self, names: &[String]) -> String {
        let e = |e: &Edge| format!("({}, {})", names[e.0], names[e.1]);
        let list = |l: &[Edge]| l.iter().map(e).collect::<Vec<_>>().join(", ");
        match self {
            Violation::Planarity { graph, e: a, f: b, side } => {
                format!("planarity: G{} edges {} and {} alternate and are both {:?}", graph + 1, e(a), e(b), side)
            }
            Violation::Orthogonality { vertex, graph, pair, side, offending } => format!(
                "orthogonality at {}: G{} edges {} and {} are {:?} but {} are not",
                names[*vertex],
                graph + 1,
                e(&pair.0),
                e(&pair.1),
                side,
                list(offending)
            ),
            Violation::ConnectorSplit { edges } => format!("path through isolated vertices split: {}", list(edges)),
            Violation::ConnectorCrossing { first, second } => format!(
                "paths {}..{} and {}..{} alternate on the same side",
                names[first.0], names[first.1], names[second.0], names[second.1]
            ),
            Violation::GapSide { vertex, graph, edges } => format!(
                "orthogonality at {}: G{} uses one gap twice, other edges elsewhere: {}",
                names[*vertex],
                graph + 1,
                list(edges)
            ),
            Violation::GapSplit { vertex, edges } => {
                format!("orthogonality at {}: exclusive edges in several gaps: {}", names[*vertex], list(edges))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Verdict {
    pub feasible: bool,
    pub witness: Option<SideAssignment>,
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn infeasible() -> Self {
        Verdict { feasible: false, witness: None, violations: Vec::new() }
    }

    pub fn feasible(witness: SideAssignment) -> Self {
        Verdict { feasible: true, witness: Some(witness), violations: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstraintError {
    #[error("assignment does not cover every exclusive edge exactly once")]
    Partial,
    #[error("{count} exclusive edges exceed the oracle cap of {cap}")]
    CapExceeded { count: usize, cap: usize },
    #[error("unsupported structure at isolated vertices: {0}")]
    Connector(String),
    #[error("rotation system does not match the union graph")]
    RotationMismatch,
    #[error("not a SEFE: the induced embedding of G{0} is not planar")]
    NotSefe(usize),
    #[error("the shared graph must be connected and cover every vertex")]
    SharedNotSpanning,
}

/// A path of exclusive edges through isolated vertices between two cycle
/// vertices. Colors alternate along the path, so it can pass any chord; only
/// its side matters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connector {
    /// (graph, index) of every edge on the path, in path order.
    pub edges: Vec<(usize, usize)>,
    pub anchors: (VertexId, VertexId),
}

impl Connector {
    /// Graph of the path edge at each anchor.
    pub fn end_graphs(&self) -> (usize, usize) {
        (self.edges[0].0, self.edges[self.edges.len() - 1].0)
    }
}

/// Extracts the paths through isolated vertices and checks that each one is
/// long enough to be routed past every chord it might have to cross.
pub fn connectors(c: &CycleInstance) -> Result<Vec<Connector>, ConstraintError> {
    let n = c.n();
    let mut inc: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (g, list) in c.exclusive_all().iter().enumerate() {
        for (i, e) in list.iter().enumerate() {
            if c.position(e.0).is_none() || c.position(e.1).is_none() {
                inc[e.0].push((g, i));
                inc[e.1].push((g, i));
            }
        }
    }
    let name = |v: VertexId| c.names()[v].clone();
    let mut used = vec![false; n];
    for &q in c.isolated() {
        if !inc[q].is_empty() && inc[q].len() != 2 {
            return Err(ConstraintError::Connector(format!("`{}` must have exactly two exclusive edges", name(q))));
        }
    }
    let mut out = Vec::new();
    for &p in c.isolated() {
        if used[p] || inc[p].is_empty() {
            continue;
        }
        // Walk both directions from p to the anchors.
        let mut ends = Vec::new();
        let mut halves: Vec<Vec<(usize, usize)>> = Vec::new();
        used[p] = true;
        for &start in &inc[p] {
            let mut path = vec![start];
            let mut cur = c.exclusive(start.0)[start.1].other(p);
            while c.position(cur).is_none() {
                if used[cur] {
                    return Err(ConstraintError::Connector(format!("cycle through `{}`", name(cur))));
                }
                used[cur] = true;
                let last = *path.last().unwrap();
                let next = *inc[cur].iter().find(|&&x| x != last).unwrap();
                path.push(next);
                cur = c.exclusive(next.0)[next.1].other(cur);
            }
            ends.push(cur);
            halves.push(path);
        }
        let mut first = halves[0].clone();
        first.reverse();
        first.extend_from_slice(&halves[1]);
        let (w, z) = (ends[0], ends[1]);
        if w == z {
            return Err(ConstraintError::Connector(format!("path through `{}` returns to `{}`", name(p), name(w))));
        }
        for pair in first.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(ConstraintError::Connector(format!("consecutive edges of one graph near `{}`", name(p))));
            }
        }
        let needed = 1 + crossing_bound(c, w, z);
        if first.len() < needed {
            return Err(ConstraintError::Connector(format!(
                "path {}..{} has {} edges, at least {} needed",
                name(w),
                name(z),
                first.len(),
                needed
            )));
        }
        out.push(Connector { edges: first, anchors: (w, z) });
    }
    Ok(out)
}

/// Upper bound on the chords a curve from `w` to `z` hugging the cheaper of
/// the two arcs has to cross.
pub fn crossing_bound(c: &CycleInstance, w: VertexId, z: VertexId) -> usize {
    let (a, b) = (c.position(w).unwrap(), c.position(z).unwrap());
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let mut alt = 0;
    let mut inner = 0;
    let mut outer = 0;
    for e in c.exclusive_all().iter().flatten() {
        let (Some(p), Some(q)) = (c.position(e.0), c.position(e.1)) else { continue };
        if e.contains(w) || e.contains(z) {
            continue;
        }
        let ip = lo < p && p < hi;
        let iq = lo < q && q < hi;
        match (ip, iq) {
            (true, true) => inner += 1,
            (false, false) => outer += 1,
            _ => alt += 1,
        }
    }
    alt + 2 * inner.min(outer)
}

fn validate(c: &CycleInstance, a: &SideAssignment) -> Result<(), ConstraintError> {
    if a.is_total_for(c) {
        Ok(())
    } else {
        Err(ConstraintError::Partial)
    }
}

/// Checks the planarity and orthogonality constraints of a side assignment.
/// All violations are listed.
pub fn check_assignment(c: &CycleInstance, a: &SideAssignment) -> Result<Verdict, ConstraintError> {
    validate(c, a)?;
    let conns = connectors(c)?;
    let mut violations = Vec::new();
    for (g, list) in c.exclusive_all().iter().enumerate() {
        for i in 0..list.len() {
            if c.position(list[i].0).is_none() || c.position(list[i].1).is_none() {
                continue;
            }
            for j in i + 1..list.len() {
                if c.position(list[j].0).is_none() || c.position(list[j].1).is_none() {
                    continue;
                }
                if a.get(g, i) == a.get(g, j) && c.alternates(list[i], list[j]) {
                    violations.push(Violation::Planarity { graph: g, e: list[i], f: list[j], side: a.get(g, i) });
                }
            }
        }
    }
    let mut conn_side = Vec::with_capacity(conns.len());
    for k in &conns {
        let s = a.get(k.edges[0].0, k.edges[0].1);
        if k.edges.iter().any(|&(g, i)| a.get(g, i) != s) {
            violations.push(Violation::ConnectorSplit { edges: k.edges.iter().map(|&(g, i)| c.exclusive(g)[i]).collect() });
        }
        conn_side.push(s);
    }
    for x in 0..conns.len() {
        for y in x + 1..conns.len() {
            let (p, q) = (conns[x].anchors, conns[y].anchors);
            if conn_side[x] == conn_side[y] && c.alternates(Edge::new(p.0, p.1), Edge::new(q.0, q.1)) {
                violations.push(Violation::ConnectorCrossing { first: p, second: q });
            }
        }
    }
    for &v in c.order() {
        let at = incidences(c, &conns, v, |g, i| a.get(g, i), &conn_side);
        violations.extend(orthogonality_at(v, &at));
    }
    Ok(Verdict { feasible: violations.is_empty(), witness: None, violations })
}

/// Exclusive edges at cycle vertex `v` as (graph, edge, side); a path through
/// isolated vertices contributes its end edge.
fn incidences(
    c: &CycleInstance,
    conns: &[Connector],
    v: VertexId,
    side: impl Fn(usize, usize) -> Side,
    conn_side: &[Side],
) -> Vec<(usize, Edge, Side)> {
    let mut out = Vec::new();
    for (g, list) in c.exclusive_all().iter().enumerate() {
        for (i, e) in list.iter().enumerate() {
            if e.contains(v) && c.position(e.other(v)).is_some() {
                out.push((g, *e, side(g, i)));
            }
        }
    }
    for (k, conn) in conns.iter().enumerate() {
        for &(g, i) in [conn.edges[0], conn.edges[conn.edges.len() - 1]].iter() {
            let e = c.exclusive(g)[i];
            if e.contains(v) {
                out.push((g, e, conn_side[k]));
            }
        }
    }
    out
}

fn orthogonality_at(v: VertexId, at: &[(usize, Edge, Side)]) -> Vec<Violation> {
    let mut out = Vec::new();
    for side in [Side::Left, Side::Right] {
        let graphs: BTreeSet<usize> = at.iter().map(|x| x.0).collect();
        for g in graphs {
            let same: Vec<Edge> = at.iter().filter(|x| x.0 == g && x.2 == side).map(|x| x.1).collect();
            if same.len() < 2 {
                continue;
            }
            let offending: Vec<Edge> = at.iter().filter(|x| x.2 != side).map(|x| x.1).collect();
            if !offending.is_empty() {
                out.push(Violation::Orthogonality { vertex: v, graph: g, pair: (same[0], same[1]), side, offending });
            }
            break;
        }
    }
    out
}

/// Exhaustive search over the characterization with the default cap.
pub fn oracle(c: &CycleInstance) -> Result<Verdict, ConstraintError> {
    oracle_with_cap(c, DEFAULT_ORACLE_CAP)
}

pub fn oracle_with_cap(c: &CycleInstance, cap: usize) -> Result<Verdict, ConstraintError> {
    let search = OracleSearch::new(c, cap)?;
    Ok(search.verdict(&[]).unwrap_or_else(Verdict::infeasible))
}

/// The search state of the oracle. Exclusive edges (and paths through
/// isolated vertices) that must lie on different sides are grouped into
/// two-colored components; only one flip bit per component remains free.
/// Components are explored in order with the first one fixed, flip `false`
/// before `true`, so the first solution found has the lowest flip vector.
pub struct OracleSearch<'a> {
    c: &'a CycleInstance,
    conns: Vec<Connector>,
    item_of: Vec<Vec<usize>>,
    comp: Vec<usize>,
    color: Vec<bool>,
    comp_count: usize,
    bipartite: bool,
    /// Per component, the cycle vertices where it has an incident edge.
    touched: Vec<Vec<VertexId>>,
    /// Per cycle vertex, (item, graph) of every incident exclusive edge.
    at: Vec<Vec<(usize, usize)>>,
}

impl<'a> OracleSearch<'a> {
    pub fn new(c: &'a CycleInstance, cap: usize) -> Result<Self, ConstraintError> {
        let count = c.exclusive_count();
        if count > cap {
            return Err(ConstraintError::CapExceeded { count, cap });
        }
        let conns = connectors(c)?;
        let mut item_of: Vec<Vec<usize>> = c.exclusive_all().iter().map(|l| vec![usize::MAX; l.len()]).collect();
        let mut items = 0usize;
        let mut chord_items: Vec<(usize, usize)> = Vec::new();
        for (g, list) in c.exclusive_all().iter().enumerate() {
            for (i, e) in list.iter().enumerate() {
                if c.position(e.0).is_some() && c.position(e.1).is_some() {
                    item_of[g][i] = items;
                    chord_items.push((g, i));
                    items += 1;
                }
            }
        }
        let first_conn = items;
        for conn in &conns {
            for &(g, i) in &conn.edges {
                item_of[g][i] = items;
            }
            items += 1;
        }
        let mut adj = vec![Vec::new(); items];
        for x in 0..chord_items.len() {
            for y in x + 1..chord_items.len() {
                let ((g, i), (h, j)) = (chord_items[x], chord_items[y]);
                if g == h && c.alternates(c.exclusive(g)[i], c.exclusive(h)[j]) {
                    adj[x].push(y);
                    adj[y].push(x);
                }
            }
        }
        for x in 0..conns.len() {
            for y in x + 1..conns.len() {
                let (p, q) = (conns[x].anchors, conns[y].anchors);
                if c.alternates(Edge::new(p.0, p.1), Edge::new(q.0, q.1)) {
                    adj[first_conn + x].push(first_conn + y);
                    adj[first_conn + y].push(first_conn + x);
                }
            }
        }
        let mut comp = vec![usize::MAX; items];
        let mut color = vec![false; items];
        let mut comp_count = 0;
        let mut bipartite = true;
        for s in 0..items {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = comp_count;
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for &y in &adj[x] {
                    if comp[y] == usize::MAX {
                        comp[y] = comp_count;
                        color[y] = !color[x];
                        stack.push(y);
                    } else if color[y] == color[x] {
                        bipartite = false;
                    }
                }
            }
            comp_count += 1;
        }
        // Renumber components by the first cycle position they reach so that
        // constraints at a vertex get checked soon after its edges are set.
        let pos = |v: VertexId| c.position(v).unwrap_or(usize::MAX);
        let mut key = vec![usize::MAX; comp_count];
        for (g, list) in c.exclusive_all().iter().enumerate() {
            for (i, e) in list.iter().enumerate() {
                let k = &mut key[comp[item_of[g][i]]];
                *k = (*k).min(pos(e.0)).min(pos(e.1));
            }
        }
        let mut order: Vec<usize> = (0..comp_count).collect();
        order.sort_by_key(|&x| (key[x], x));
        let mut rank = vec![0; comp_count];
        for (r, &x) in order.iter().enumerate() {
            rank[x] = r;
        }
        for x in comp.iter_mut() {
            *x = rank[*x];
        }
        let mut at = vec![Vec::new(); c.n()];
        for (g, list) in c.exclusive_all().iter().enumerate() {
            for (i, e) in list.iter().enumerate() {
                let item = item_of[g][i];
                if item < first_conn {
                    at[e.0].push((item, g));
                    at[e.1].push((item, g));
                }
            }
        }
        for (x, conn) in conns.iter().enumerate() {
            for &(g, i) in [conn.edges[0], conn.edges[conn.edges.len() - 1]].iter() {
                let e = c.exclusive(g)[i];
                let anchor = if c.position(e.0).is_some() { e.0 } else { e.1 };
                at[anchor].push((first_conn + x, g));
            }
        }
        let mut touched = vec![Vec::new(); comp_count];
        for v in 0..c.n() {
            let mut comps: Vec<usize> = at[v].iter().map(|&(it, _)| comp[it]).collect();
            comps.sort_unstable();
            comps.dedup();
            for k in comps {
                touched[k].push(v);
            }
        }
        Ok(OracleSearch { c, conns, item_of, comp, color, comp_count, bipartite, touched, at })
    }

    pub fn component_count(&self) -> usize {
        self.comp_count
    }

    pub fn is_bipartite(&self) -> bool {
        self.bipartite
    }

    /// Completes `prefix` (flips of components 1..=prefix.len()) to the
    /// lowest feasible flip vector, if any.
    pub fn search(&self, prefix: &[bool]) -> Option<Vec<bool>> {
        if !self.bipartite {
            return None;
        }
        if self.comp_count == 0 {
            return Some(Vec::new());
        }
        let mut flips = vec![false; self.comp_count];
        for (i, &b) in prefix.iter().enumerate() {
            if i + 1 < self.comp_count {
                flips[i + 1] = b;
            }
        }
        let fixed = (prefix.len() + 1).min(self.comp_count);
        for k in 0..fixed {
            if !self.consistent(k, &flips) {
                return None;
            }
        }
        if self.extend(fixed, &mut flips) {
            Some(flips)
        } else {
            None
        }
    }

    fn extend(&self, k: usize, flips: &mut Vec<bool>) -> bool {
        if k == self.comp_count {
            return true;
        }
        for b in [false, true] {
            flips[k] = b;
            if self.consistent(k, flips) && self.extend(k + 1, flips) {
                return true;
            }
        }
        flips[k] = false;
        false
    }

    fn item_left(&self, item: usize, flips: &[bool]) -> bool {
        !(self.color[item] ^ flips[self.comp[item]])
    }

    /// Orthogonality at the vertices touched by component `k`, restricted
    /// to edges of components `0..=k`.
    fn consistent(&self, k: usize, flips: &[bool]) -> bool {
        let mut list = Vec::new();
        self.touched[k].iter().all(|&v| {
            list.clear();
            list.extend(self.at[v].iter().copied().filter(|&(it, _)| self.comp[it] <= k));
            let list = &list;
            let mut count = [[0u8; 2]; 8];
            let mut total = [0usize; 2];
            let mut big = [false; 2];
            for &(item, g) in list.iter() {
                let s = self.item_left(item, flips) as usize;
                total[s] += 1;
                if g < 8 {
                    count[g][s] += 1;
                    if count[g][s] >= 2 {
                        big[s] = true;
                    }
                } else {
                    let same = list.iter().filter(|&&(it, h)| h == g && self.item_left(it, flips) as usize == s).count();
                    if same >= 2 {
                        big[s] = true;
                    }
                }
            }
            !(big[0] && total[1] > 0 || big[1] && total[0] > 0)
        })
    }

    pub fn assignment(&self, flips: &[bool]) -> SideAssignment {
        let sides = self
            .item_of
            .iter()
            .map(|l| l.iter().map(|&item| Side::from_left(self.item_left(item, flips))).collect())
            .collect();
        SideAssignment { sides }
    }

    /// Feasible verdict for the lowest completion of `prefix`, if any.
    pub fn verdict(&self, prefix: &[bool]) -> Option<Verdict> {
        let flips = self.search(prefix)?;
        let a = self.assignment(&flips);
        debug_assert!(check_assignment(self.c, &a).map(|v| v.feasible).unwrap_or(false));
        let _ = &self.conns;
        Some(Verdict::feasible(a))
    }
}

/// Checks that a rotation system of the union graph is a SEFE (every
/// induced embedding planar) and then checks the orthogonality rules at
/// shared-degree-2 and shared-degree-3 vertices. Interleaving of different
/// graphs' edges inside a gap is irrelevant. The shared graph must be
/// connected and spanning so that rotations describe the whole embedding.
pub fn check_sefe_orthogonality(inst: &SunflowerInstance, r: &RotationSystem) -> Result<Verdict, ConstraintError> {
    let n = inst.n();
    if r.n() != n || !r.is_consistent() {
        return Err(ConstraintError::RotationMismatch);
    }
    let mut union: BTreeSet<Edge> = inst.shared().iter().copied().collect();
    union.extend(inst.exclusive_all().iter().flatten().copied());
    let have: BTreeSet<Edge> = r.edges().into_iter().collect();
    if have != union {
        return Err(ConstraintError::RotationMismatch);
    }
    let shared: BTreeSet<Edge> = inst.shared().iter().copied().collect();
    let sadj = inst.shared_adjacency();
    if n > 1 && (sadj.iter().any(Vec::is_empty) || crate::rotation::components(&sadj).iter().any(|&x| x != 0)) {
        return Err(ConstraintError::SharedNotSpanning);
    }
    for g in 0..inst.k() {
        let own: BTreeSet<Edge> = inst.exclusive(g).iter().copied().collect();
        let sub = r.restrict(|e| shared.contains(&e) || own.contains(&e));
        if !sub.is_planar() {
            return Err(ConstraintError::NotSefe(g));
        }
    }
    let graph_of = |e: Edge| (0..inst.k()).find(|&g| inst.exclusive(g).contains(&e));
    let mut violations = Vec::new();
    for v in 0..n {
        let rot = &r.rot[v];
        let d = rot.iter().filter(|&&w| shared.contains(&Edge::new(v, w))).count();
        if d < 2 || d == rot.len() {
            continue;
        }
        // Gap index of every exclusive edge, counting shared edges from the first one.
        let start = rot.iter().position(|&w| shared.contains(&Edge::new(v, w))).unwrap();
        let mut gap = 0usize;
        let mut in_gap: Vec<(usize, usize, Edge)> = Vec::new();
        for step in 1..rot.len() {
            let w = rot[(start + step) % rot.len()];
            let e = Edge::new(v, w);
            if shared.contains(&e) {
                gap += 1;
            } else {
                in_gap.push((gap, graph_of(e).unwrap(), e));
            }
        }
        let edges: Vec<Edge> = in_gap.iter().map(|x| x.2).collect();
        if d == 2 {
            for side in 0..2 {
                for g in 0..inst.k() {
                    let same = in_gap.iter().filter(|x| x.0 == side && x.1 == g).count();
                    if same >= 2 && in_gap.iter().any(|x| x.0 != side) {
                        violations.push(Violation::GapSide { vertex: v, graph: g, edges: edges.clone() });
                    }
                }
            }
        } else if d == 3 && in_gap.iter().any(|x| x.0 != in_gap[0].0) {
            violations.push(Violation::GapSplit { vertex: v, edges });
        }
    }
    Ok(Verdict { feasible: violations.is_empty(), witness: None, violations })
}

/// Rotation system realizing a side assignment of a cycle instance without
/// isolated vertices: at every cycle vertex the Left edges come first
/// (between the successor and the predecessor), sorted so that same-side
/// chords nest.
pub fn rotation_from_assignment(c: &CycleInstance, a: &SideAssignment) -> RotationSystem {
    let order = c.order();
    let len = order.len();
    let mut rot = vec![Vec::new(); c.n()];
    for (p, &v) in order.iter().enumerate() {
        let next = order[(p + 1) % len];
        let prev = order[(p + len - 1) % len];
        let mut left: Vec<(usize, VertexId)> = Vec::new();
        let mut right: Vec<(usize, VertexId)> = Vec::new();
        for (g, list) in c.exclusive_all().iter().enumerate() {
            for (i, e) in list.iter().enumerate() {
                if e.contains(v) {
                    let w = e.other(v);
                    // Distance from v to w going forward along the cycle.
                    let dist = (c.position(w).unwrap() + len - p) % len;
                    match a.get(g, i) {
                        Side::Left => left.push((dist, w)),
                        Side::Right => right.push((dist, w)),
                    }
                }
            }
        }
        // With the cycle laid out counterclockwise, turning counterclockwise
        // from `next` meets the inside chords by increasing distance, then
        // `prev`, then the outside chords by decreasing distance.
        left.sort_by_key(|a| a.0);
        right.sort_by(|a, b| b.0.cmp(&a.0));
        let mut list = vec![next];
        list.extend(left.iter().map(|x| x.1));
        list.push(prev);
        list.extend(right.iter().map(|x| x.1));
        rot[v] = list;
    }
    RotationSystem::new(rot)
}
