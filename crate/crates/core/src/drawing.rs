//! Orthogonal grid drawings with at most three bends per edge for instances
//! whose shared graph is biconnected, plus a validator and SVG export.
//!
//! Vertices are placed bottom to top in an st-ordering of the shared graph.
//! Vertex `v_i` sits in row `3i + 1` and owns rows `3i..=3i + 2`; edges bend
//! only inside the bands of their endpoints and run vertically in between.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::constraints::{check_sefe_orthogonality, ConstraintError};
use crate::instance::{Edge, SunflowerInstance, VertexId};
use crate::planarity::is_biconnected;
use crate::rotation::RotationSystem;

pub type Point = (i64, i64);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DrawError {
    #[error("the shared graph must be biconnected with at least three vertices")]
    NotBiconnected,
    #[error("root ({0}, {1}) is not a shared edge")]
    NoSuchEdge(VertexId, VertexId),
    #[error(transparent)]
    Constraint(#[from] ConstraintError),
    #[error("the rotation system breaks the orthogonality rules: {0}")]
    Orthogonality(String),
    #[error("no port assignment for any root edge (last failure at `{0}`)")]
    NoLayout(String),
}

/// Vertices listed bottom to top. `order[0]` and `order[n-1]` are adjacent
/// and every other vertex has a shared neighbor on each side of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StOrdering {
    pub order: Vec<VertexId>,
}

impl StOrdering {
    pub fn rank(&self) -> Vec<usize> {
        let mut rank = vec![0; self.order.len()];
        for (i, &v) in self.order.iter().enumerate() {
            rank[v] = i;
        }
        rank
    }

    pub fn is_valid(&self, n: usize, edges: &[Edge]) -> bool {
        let mut seen = vec![false; n];
        if self.order.len() != n || self.order.iter().any(|&v| v >= n || core::mem::replace(&mut seen[v], true)) {
            return false;
        }
        if n < 2 {
            return true;
        }
        let rank = self.rank();
        let (s, t) = (self.order[0], self.order[n - 1]);
        if !edges.contains(&Edge::new(s, t)) {
            return false;
        }
        let mut below = vec![false; n];
        let mut above = vec![false; n];
        for e in edges {
            let (a, b) = if rank[e.0] < rank[e.1] { (e.0, e.1) } else { (e.1, e.0) };
            above[a] = true;
            below[b] = true;
        }
        self.order[1..n - 1].iter().all(|&v| below[v] && above[v])
    }
}

/// st-ordering with `s = root.0` first and `t = root.1` last, by list
/// insertion driven by DFS low points.
pub fn st_order(n: usize, edges: &[Edge], root: (VertexId, VertexId)) -> Result<StOrdering, DrawError> {
    let (s, t) = root;
    if s >= n || t >= n || !edges.contains(&Edge::new(s, t)) {
        return Err(DrawError::NoSuchEdge(s, t));
    }
    if n < 3 || !is_biconnected(n, edges) {
        return Err(DrawError::NotBiconnected);
    }
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.0].push(e.1);
        adj[e.1].push(e.0);
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    // t first at s, so the DFS tree starts with the edge (s, t).
    let at = adj[s].iter().position(|&x| x == t).unwrap();
    adj[s].swap(0, at);

    const NONE: usize = usize::MAX;
    let mut pre = vec![NONE; n];
    let mut parent = vec![NONE; n];
    let mut low = vec![0usize; n];
    let mut preorder = Vec::with_capacity(n);
    let mut frames: Vec<(usize, usize)> = vec![(s, 0)];
    pre[s] = 0;
    low[s] = s;
    preorder.push(s);
    while let Some(&mut (v, ref mut i)) = frames.last_mut() {
        if *i < adj[v].len() {
            let w = adj[v][*i];
            *i += 1;
            if pre[w] == NONE {
                pre[w] = preorder.len();
                preorder.push(w);
                parent[w] = v;
                low[w] = w;
                frames.push((w, 0));
            } else if w != parent[v] && pre[w] < pre[low[v]] {
                low[v] = w;
            }
        } else {
            frames.pop();
            let p = parent[v];
            if p != NONE && pre[low[v]] < pre[low[p]] {
                low[p] = low[v];
            }
        }
    }

    // Doubly linked list holding the ordering under construction.
    let mut next = vec![NONE; n];
    let mut prev = vec![NONE; n];
    next[s] = t;
    prev[t] = s;
    let mut minus = vec![false; n];
    minus[s] = true;
    for &v in &preorder[2..] {
        let p = parent[v];
        if minus[low[v]] {
            let q = prev[p];
            next[q] = v;
            prev[v] = q;
            next[v] = p;
            prev[p] = v;
            minus[p] = false;
        } else {
            let q = next[p];
            next[p] = v;
            prev[v] = p;
            next[v] = q;
            if q != NONE {
                prev[q] = v;
            }
            minus[p] = true;
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut v = s;
    while v != NONE {
        order.push(v);
        v = next[v];
    }
    let st = StOrdering { order };
    if !st.is_valid(n, edges) {
        return Err(DrawError::NotBiconnected);
    }
    Ok(st)
}

/// Side of a vertex an edge leaves from; the declaration order is
/// counterclockwise starting east.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Port {
    E,
    N,
    W,
    S,
}

impl Port {
    pub const ALL: [Port; 4] = [Port::E, Port::N, Port::W, Port::S];

    fn from_index(i: usize) -> Port {
        Port::ALL[i % 4]
    }

    /// Direction of the first step from a point in a path.
    pub fn of_step(from: Point, to: Point) -> Option<Port> {
        match (to.0 - from.0, to.1 - from.1) {
            (dx, 0) if dx > 0 => Some(Port::E),
            (dx, 0) if dx < 0 => Some(Port::W),
            (0, dy) if dy > 0 => Some(Port::N),
            (0, dy) if dy < 0 => Some(Port::S),
            _ => None,
        }
    }
}

/// Port of every incident edge, per vertex, as (neighbor, port) in the
/// counterclockwise order of the input rotation.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PortAssignment {
    pub ports: Vec<Vec<(VertexId, Port)>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgePath {
    pub edge: Edge,
    /// `None` for shared edges.
    pub graph: Option<usize>,
    /// Grid points from `edge.0` to `edge.1`; interior points are bends.
    pub points: Vec<Point>,
}

impl EdgePath {
    pub fn bends(&self) -> usize {
        count_bends(&self.points)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct OrthogonalDrawing {
    pub pos: Vec<Point>,
    pub paths: Vec<EdgePath>,
    pub st: Vec<VertexId>,
    /// `{v_1, v_n}` of the st-ordering, drawn around the left side.
    pub root: Option<Edge>,
    pub ports: PortAssignment,
}

impl OrthogonalDrawing {
    pub fn path(&self, e: Edge) -> Option<&EdgePath> {
        self.paths.iter().find(|p| p.edge == e)
    }

    pub fn max_bends(&self) -> usize {
        self.paths.iter().map(EdgePath::bends).max().unwrap_or(0)
    }

    /// Bends inside the three-row bands of the lower and the upper endpoint.
    pub fn band_bends(&self, e: Edge) -> Option<(usize, usize)> {
        let p = self.path(e)?;
        let (ya, yb) = (self.pos[e.0].1, self.pos[e.1].1);
        let (lo, hi) = (ya.min(yb), ya.max(yb));
        let mut counts = (0, 0);
        for b in bend_points(&p.points) {
            if (b.1 - lo).abs() <= 1 {
                counts.0 += 1;
            } else if (b.1 - hi).abs() <= 1 {
                counts.1 += 1;
            }
        }
        Some(counts)
    }

    /// Width and height of the bounding box.
    pub fn extent(&self) -> (i64, i64) {
        let pts = self.pos.iter().chain(self.paths.iter().flat_map(|p| p.points.iter()));
        let (mut x0, mut y0, mut x1, mut y1) = (i64::MAX, i64::MAX, i64::MIN, i64::MIN);
        for &(x, y) in pts {
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
        if x0 > x1 {
            (0, 0)
        } else {
            (x1 - x0, y1 - y0)
        }
    }

    /// Ports read off the geometry: the direction of the first segment of
    /// every path at each of its ends, listed per vertex.
    pub fn geometric_ports(&self) -> Vec<Vec<(VertexId, Port)>> {
        let mut out = vec![Vec::new(); self.pos.len()];
        for p in &self.paths {
            let pts = &p.points;
            if pts.len() < 2 {
                continue;
            }
            let first = pts.iter().skip(1).find(|&&q| q != pts[0]);
            let last = pts.iter().rev().skip(1).find(|&&q| q != pts[pts.len() - 1]);
            if let Some(port) = first.and_then(|&q| Port::of_step(pts[0], q)) {
                out[p.edge.0].push((p.edge.1, port));
            }
            if let Some(port) = last.and_then(|&q| Port::of_step(pts[pts.len() - 1], q)) {
                out[p.edge.1].push((p.edge.0, port));
            }
        }
        out
    }
}

fn bend_points(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = Vec::with_capacity(points.len());
    for &p in points {
        if pts.last() != Some(&p) {
            pts.push(p);
        }
    }
    let mut out = Vec::new();
    for w in pts.windows(3) {
        let d1 = ((w[1].0 - w[0].0).signum(), (w[1].1 - w[0].1).signum());
        let d2 = ((w[2].0 - w[1].0).signum(), (w[2].1 - w[1].1).signum());
        if d1 != d2 {
            out.push(w[1]);
        }
    }
    out
}

pub fn count_bends(points: &[Point]) -> usize {
    bend_points(points).len()
}

/// Draws the instance following the rotation system `r`, which must pass
/// `check_sefe_orthogonality`. Shared edges are tried as root in sorted
/// order until the port search succeeds at every vertex.
pub fn draw(inst: &SunflowerInstance, r: &RotationSystem) -> Result<OrthogonalDrawing, DrawError> {
    let n = inst.n();
    if n < 3 || !is_biconnected(n, inst.shared()) {
        return Err(DrawError::NotBiconnected);
    }
    let verdict = check_sefe_orthogonality(inst, r)?;
    if !verdict.feasible {
        let why: Vec<String> = verdict.violations.iter().map(|v| v.describe(inst.names())).collect();
        return Err(DrawError::Orthogonality(why.join("; ")));
    }
    let mut last = String::new();
    for &e in inst.shared() {
        for root in [(e.0, e.1), (e.1, e.0)] {
            match draw_rooted(inst, r, root) {
                Ok(d) => return Ok(d),
                Err(DrawError::NoLayout(v)) => last = v,
                Err(other) => return Err(other),
            }
        }
    }
    Err(DrawError::NoLayout(last))
}

/// Like [`draw`] with a fixed root: `root.0` becomes `v_1` and `root.1`
/// becomes `v_n`. The rotation system is not re-checked.
pub fn draw_rooted(
    inst: &SunflowerInstance,
    r: &RotationSystem,
    root: (VertexId, VertexId),
) -> Result<OrthogonalDrawing, DrawError> {
    let st = st_order(inst.n(), inst.shared(), root)?;
    let mut lay = Layout::new(inst, r, &st);
    for &w in &st.order {
        if !lay.place(w) {
            return Err(DrawError::NoLayout(inst.names()[w].clone()));
        }
    }
    Ok(lay.finish(st))
}

#[derive(Clone, Copy, Debug)]
struct Inc {
    edge: usize,
    graph: Option<usize>,
    up: bool,
}

#[derive(Clone, Debug)]
struct UnionEdge {
    e: Edge,
    graph: Option<usize>,
    col: usize,
    low_port: Port,
    high_port: Port,
}

struct Layout<'a> {
    k: usize,
    rank: Vec<usize>,
    rot: &'a [Vec<VertexId>],
    edges: Vec<UnionEdge>,
    index: BTreeMap<Edge, usize>,
    root: usize,
    /// Column ids from left to right; finished columns keep their place.
    order: Vec<usize>,
    pos: Vec<usize>,
    vcol: Vec<usize>,
    active: Vec<bool>,
    ports: Vec<Vec<(VertexId, Port)>>,
}

/// Bends added at the vertex being placed.
fn local_cost(up: bool, p: Port) -> usize {
    match (up, p) {
        (true, Port::N) | (true, Port::S) => 0,
        (_, Port::E) | (_, Port::W) => 1,
        (false, _) => 2,
    }
}

impl<'a> Layout<'a> {
    fn new(inst: &SunflowerInstance, r: &'a RotationSystem, st: &StOrdering) -> Self {
        let n = inst.n();
        let mut edges = Vec::new();
        for &e in inst.shared() {
            edges.push((e, None));
        }
        for g in 0..inst.k() {
            for &e in inst.exclusive(g) {
                edges.push((e, Some(g)));
            }
        }
        edges.sort();
        let edges: Vec<UnionEdge> = edges
            .into_iter()
            .map(|(e, graph)| UnionEdge { e, graph, col: usize::MAX, low_port: Port::N, high_port: Port::S })
            .collect();
        let index: BTreeMap<Edge, usize> = edges.iter().enumerate().map(|(i, u)| (u.e, i)).collect();
        let (s, t) = (st.order[0], st.order[n - 1]);
        let root = index[&Edge::new(s, t)];
        let mut lay = Layout {
            k: inst.k(),
            rank: st.rank(),
            rot: &r.rot,
            edges,
            index,
            root,
            order: vec![0],
            pos: vec![0],
            vcol: vec![usize::MAX; n],
            active: Vec::new(),
            ports: vec![Vec::new(); n],
        };
        lay.active = vec![false; lay.edges.len()];
        lay.edges[root].col = 0;
        lay.active[root] = true;
        lay
    }

    fn new_col(&mut self) -> usize {
        self.pos.push(usize::MAX);
        self.pos.len() - 1
    }

    fn in_graph(&self, edge: usize, g: usize) -> bool {
        self.edges[edge].graph.is_none_or(|h| h == g)
    }

    fn place(&mut self, w: VertexId) -> bool {
        let inc: Vec<Inc> = self.rot[w]
            .iter()
            .map(|&x| {
                let edge = self.index[&Edge::new(w, x)];
                Inc { edge, graph: self.edges[edge].graph, up: self.rank[x] > self.rank[w] }
            })
            .collect();
        let first = self.rank[w] == 0;
        let last = self.rank[w] + 1 == self.rank.len();

        // Insertion window: between the nearest columns of every graph that
        // pass this vertex.
        let mut lo = if first { self.pos[self.edges[self.root].col] + 1 } else { 0 };
        let mut hi = self.order.len();
        for g in 0..self.k {
            let block: Vec<usize> = inc
                .iter()
                .filter(|i| !i.up && self.in_graph(i.edge, g))
                .map(|i| self.pos[self.edges[i.edge].col])
                .collect();
            let (Some(&bmin), Some(&bmax)) = (block.iter().min(), block.iter().max()) else { continue };
            for (e, ue) in self.edges.iter().enumerate() {
                if !self.active[e] || ue.e.contains(w) || !self.in_graph(e, g) {
                    continue;
                }
                let p = self.pos[ue.col];
                if p < bmin {
                    lo = lo.max(p + 1);
                } else if p > bmax {
                    hi = hi.min(p);
                } else {
                    // The frontier of this graph does not match its embedding.
                    return false;
                }
            }
        }
        if lo > hi {
            return false;
        }
        let mut col_active = vec![false; self.pos.len()];
        for (e, ue) in self.edges.iter().enumerate() {
            if self.active[e] {
                col_active[ue.col] = true;
            }
        }
        let mut gaps = vec![lo];
        for idx in lo..hi {
            if col_active[self.order[idx]] {
                gaps.push(idx + 1);
            }
        }
        let shared_down: Vec<usize> =
            inc.iter().filter(|i| !i.up && i.graph.is_none()).map(|i| self.pos[self.edges[i.edge].col]).collect();
        let mid2 = match (shared_down.iter().min(), shared_down.iter().max()) {
            (Some(&a), Some(&b)) => (a + b + 1) as i64,
            _ => 2 * lo as i64,
        };

        let sh: Vec<usize> = (0..inc.len()).filter(|&i| inc[i].graph.is_none()).collect();
        let mut best: Option<((usize, i64), Vec<Port>, usize)> = None;
        let mut sp = Vec::with_capacity(sh.len());
        let mut placements = Vec::new();
        shared_placements(sh.len(), &mut sp, &mut placements);
        for sp in &placements {
            let ok = sh.iter().zip(sp).all(|(&i, &p)| {
                let port = Port::from_index(p);
                let is_root = inc[i].edge == self.root;
                if is_root && first {
                    port == Port::S
                } else if is_root && last {
                    port == Port::W
                } else {
                    !(inc[i].up && port == Port::S)
                }
            });
            if !ok {
                continue;
            }
            // Exclusive edges per angle after each shared edge, and the free
            // ports of that angle, both counterclockwise.
            let mut angle_of = vec![usize::MAX; inc.len()];
            let mut free: Vec<Vec<Port>> = Vec::with_capacity(sh.len());
            for j in 0..sh.len() {
                let (a, b) = (sh[j], sh[(j + 1) % sh.len()]);
                let mut i = (a + 1) % inc.len();
                while i != b {
                    angle_of[i] = j;
                    i = (i + 1) % inc.len();
                }
                let (pa, pb) = (sp[j], sp[(j + 1) % sh.len()]);
                let mut f = Vec::new();
                let mut p = (pa + 1) % 4;
                while p != pb {
                    f.push(Port::from_index(p));
                    p = (p + 1) % 4;
                }
                free.push(f);
            }
            let mut ports = vec![Port::N; inc.len()];
            for (&i, &p) in sh.iter().zip(sp) {
                ports[i] = Port::from_index(p);
            }
            for &gx in &gaps {
                let mut cost: usize = sh.iter().map(|&i| local_cost(inc[i].up, ports[i])).sum();
                let mut chosen = ports.clone();
                let mut all = true;
                for g in 0..self.k {
                    let mine: Vec<usize> = (0..inc.len()).filter(|&i| inc[i].graph == Some(g)).collect();
                    match self.best_for_graph(&inc, &mine, &angle_of, &free, &chosen, gx) {
                        Some((c, assign)) => {
                            cost += c;
                            for (&i, p) in mine.iter().zip(assign) {
                                chosen[i] = p;
                            }
                        }
                        None => {
                            all = false;
                            break;
                        }
                    }
                }
                if !all {
                    continue;
                }
                let key = (cost, (2 * gx as i64 - mid2).abs());
                if best.as_ref().is_none_or(|b| key < b.0) {
                    best = Some((key, chosen, gx));
                }
            }
        }
        let Some((_, chosen, gx)) = best else { return false };
        self.commit(w, &inc, &chosen, gx);
        true
    }

    /// Cheapest ports for the exclusive edges `mine` of one graph, given the
    /// ports already fixed for shared edges and the column of the vertex.
    fn best_for_graph(
        &self,
        inc: &[Inc],
        mine: &[usize],
        angle_of: &[usize],
        free: &[Vec<Port>],
        fixed: &[Port],
        gx: usize,
    ) -> Option<(usize, Vec<Port>)> {
        let mut per_angle: Vec<Vec<usize>> = vec![Vec::new(); free.len()];
        for (slot, &i) in mine.iter().enumerate() {
            per_angle[angle_of[i]].push(slot);
        }
        if per_angle.iter().zip(free).any(|(m, f)| m.len() > f.len()) {
            return None;
        }
        let mut options: Vec<Vec<Vec<Port>>> = Vec::new();
        for (m, f) in per_angle.iter().zip(free) {
            let mut opts = Vec::new();
            choose_increasing(f, m.len(), &mut Vec::new(), 0, &mut opts);
            options.push(opts);
        }
        let shared: Vec<(usize, Port)> =
            (0..inc.len()).filter(|&i| inc[i].graph.is_none()).map(|i| (i, fixed[i])).collect();
        let mut best: Option<(usize, Vec<Port>)> = None;
        let mut pick = vec![0usize; options.len()];
        loop {
            let mut assign = vec![Port::N; mine.len()];
            for (a, opts) in options.iter().enumerate() {
                for (&slot, &p) in per_angle[a].iter().zip(&opts[pick[a]]) {
                    assign[slot] = p;
                }
            }
            let mut list = shared.clone();
            list.extend(mine.iter().copied().zip(assign.iter().copied()));
            if self.geometry_ok(inc, &list, gx) {
                let cost = mine.iter().zip(&assign).map(|(&i, &p)| local_cost(inc[i].up, p)).sum();
                if best.as_ref().is_none_or(|b| cost < b.0) {
                    best = Some((cost, assign));
                }
            }
            // Next combination.
            let mut a = 0;
            while a < pick.len() {
                pick[a] += 1;
                if pick[a] < options[a].len() {
                    break;
                }
                pick[a] = 0;
                a += 1;
            }
            if a == pick.len() {
                break;
            }
        }
        best
    }

    /// Local crossing rules for the edges of one graph at the vertex being
    /// placed, with the vertex column inserted before index `gx`.
    fn geometry_ok(&self, inc: &[Inc], list: &[(usize, Port)], gx: usize) -> bool {
        let at = |p: Port| list.iter().find(|x| x.1 == p).map(|&(i, _)| i);
        let pos = |i: usize| self.pos[self.edges[inc[i].edge].col];
        for &(i, p) in list {
            if inc[i].up {
                if p == Port::S && inc[i].edge != self.root {
                    return false;
                }
                continue;
            }
            match p {
                Port::E if pos(i) < gx => return false,
                Port::W if pos(i) >= gx => return false,
                _ => {}
            }
        }
        let down = |p: Port| at(p).filter(|&i| !inc[i].up);
        let up = |p: Port| at(p).filter(|&i| inc[i].up);
        if let Some(s) = down(Port::S) {
            if pos(s) >= gx {
                if down(Port::E).is_some_and(|e| pos(e) <= pos(s)) {
                    return false;
                }
                if down(Port::N).is_some_and(|nn| pos(nn) >= gx && pos(nn) <= pos(s)) {
                    return false;
                }
            } else {
                if down(Port::W).is_some_and(|x| pos(x) >= pos(s)) {
                    return false;
                }
                if down(Port::N).is_some_and(|nn| pos(nn) < gx && pos(nn) >= pos(s)) {
                    return false;
                }
            }
        }
        if let Some(nn) = down(Port::N) {
            if pos(nn) >= gx {
                if up(Port::E).is_some() || down(Port::E).is_some_and(|e| pos(e) >= pos(nn)) {
                    return false;
                }
            } else if up(Port::W).is_some() || down(Port::W).is_some_and(|x| pos(x) <= pos(nn)) {
                return false;
            }
        }
        true
    }

    fn commit(&mut self, w: VertexId, inc: &[Inc], ports: &[Port], gx: usize) {
        let xcol = self.new_col();
        self.vcol[w] = xcol;
        let mut west = Vec::new();
        let mut east = Vec::new();
        for (i, (&x, &p)) in inc.iter().zip(ports).enumerate() {
            let ue = x.edge;
            self.ports[w].push((self.rot[w][i], p));
            if !x.up {
                self.edges[ue].high_port = p;
                self.active[ue] = false;
                continue;
            }
            self.edges[ue].low_port = p;
            self.active[ue] = true;
            match p {
                Port::N => self.edges[ue].col = xcol,
                Port::S => {}
                Port::E | Port::W => {
                    let c = self.new_col();
                    self.edges[ue].col = c;
                    if p == Port::E {
                        east.push(c);
                    } else {
                        west.push(c);
                    }
                }
            }
        }
        // Counterclockwise order puts the last west edge leftmost and the
        // first east edge rightmost.
        west.reverse();
        east.reverse();
        let mut splice = west;
        splice.push(xcol);
        splice.extend(east);
        self.order.splice(gx..gx, splice);
        for (idx, &c) in self.order.iter().enumerate() {
            self.pos[c] = idx;
        }
    }

    fn finish(self, st: StOrdering) -> OrthogonalDrawing {
        let n = self.rank.len();
        let y = |v: VertexId| 3 * self.rank[v] as i64 + 1;
        let x = |c: usize| self.pos[c] as i64;
        let pos: Vec<Point> = (0..n).map(|v| (x(self.vcol[v]), y(v))).collect();
        let mut paths = Vec::with_capacity(self.edges.len());
        for (id, ue) in self.edges.iter().enumerate() {
            let (a, b) = (ue.e.0, ue.e.1);
            let (lo, hi) = if self.rank[a] < self.rank[b] { (a, b) } else { (b, a) };
            let (pl, ph) = (pos[lo], pos[hi]);
            let c = x(ue.col);
            let mut pts = vec![pl];
            if id == self.root {
                pts.extend([(pl.0, pl.1 - 1), (c, pl.1 - 1), (c, ph.1)]);
            } else {
                if ue.low_port != Port::N {
                    pts.push((c, pl.1));
                }
                match ue.high_port {
                    Port::S => pts.extend([(c, ph.1 - 1), (ph.0, ph.1 - 1)]),
                    Port::N => pts.extend([(c, ph.1 + 1), (ph.0, ph.1 + 1)]),
                    Port::E | Port::W => pts.push((c, ph.1)),
                }
            }
            pts.push(ph);
            let mut pts = simplify(&pts);
            if lo != a {
                pts.reverse();
            }
            paths.push(EdgePath { edge: ue.e, graph: ue.graph, points: pts });
        }
        let root = Some(self.edges[self.root].e);
        OrthogonalDrawing { pos, paths, st: st.order, root, ports: PortAssignment { ports: self.ports } }
    }
}

/// Drops repeated and collinear interior points.
fn simplify(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = Vec::with_capacity(points.len());
    for &p in points {
        if pts.last() == Some(&p) {
            continue;
        }
        if pts.len() >= 2 {
            let (a, b) = (pts[pts.len() - 2], pts[pts.len() - 1]);
            if (a.0 == b.0 && b.0 == p.0) || (a.1 == b.1 && b.1 == p.1) {
                pts.pop();
            }
        }
        pts.push(p);
    }
    pts
}

/// Port indices for `s` shared edges that keep their cyclic order.
fn shared_placements(s: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == s {
        let descents = (0..s).filter(|&i| cur[(i + 1) % s] < cur[i]).count();
        if s < 2 || descents == 1 {
            out.push(cur.clone());
        }
        return;
    }
    for p in 0..4 {
        if !cur.contains(&p) {
            cur.push(p);
            shared_placements(s, cur, out);
            cur.pop();
        }
    }
}

fn choose_increasing(f: &[Port], m: usize, cur: &mut Vec<Port>, from: usize, out: &mut Vec<Vec<Port>>) {
    if cur.len() == m {
        out.push(cur.clone());
        return;
    }
    for i in from..f.len() {
        cur.push(f[i]);
        choose_increasing(f, m, cur, i + 1, out);
        cur.pop();
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DrawingProblem {
    VertexCount { expected: usize, found: usize },
    SamePoint(VertexId, VertexId),
    MissingEdge(Edge),
    UnknownEdge(Edge),
    DuplicateEdge(Edge),
    WrongGraph(Edge),
    Endpoints(Edge),
    NotRectilinear(Edge),
    TooManyBends { edge: Edge, bends: usize },
    ThroughVertex { edge: Edge, vertex: VertexId },
    SelfIntersection(Edge),
    Crossing { graph: usize, first: Edge, second: Edge, at: Point },
}

impl DrawingProblem {
    pub fn describe(&self, names: &[String]) -> String {
        let nm = |v: VertexId| names.get(v).cloned().unwrap_or_else(|| format!("#{v}"));
        let e = |e: &Edge| format!("({}, {})", nm(e.0), nm(e.1));
        match self {
            DrawingProblem::VertexCount { expected, found } => {
                format!("expected {expected} vertex points, found {found}")
            }
            DrawingProblem::SamePoint(a, b) => format!("{} and {} share a grid point", nm(*a), nm(*b)),
            DrawingProblem::MissingEdge(x) => format!("edge {} is not drawn", e(x)),
            DrawingProblem::UnknownEdge(x) => format!("edge {} is not in the instance", e(x)),
            DrawingProblem::DuplicateEdge(x) => format!("edge {} is drawn twice", e(x)),
            DrawingProblem::WrongGraph(x) => format!("edge {} is labelled with the wrong graph", e(x)),
            DrawingProblem::Endpoints(x) => format!("path of {} does not end at its vertices", e(x)),
            DrawingProblem::NotRectilinear(x) => format!("path of {} has a diagonal segment", e(x)),
            DrawingProblem::TooManyBends { edge, bends } => format!("edge {} has {bends} bends", e(edge)),
            DrawingProblem::ThroughVertex { edge, vertex } => {
                format!("edge {} passes through {}", e(edge), nm(*vertex))
            }
            DrawingProblem::SelfIntersection(x) => format!("path of {} meets itself", e(x)),
            DrawingProblem::Crossing { graph, first, second, at } => {
                format!("G{}: {} and {} meet at ({}, {})", graph + 1, e(first), e(second), at.0, at.1)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DrawingReport {
    pub valid: bool,
    pub problems: Vec<DrawingProblem>,
    pub max_bends: usize,
    /// Pairs of edges of each graph that meet outside a common endpoint.
    pub crossings: Vec<usize>,
}

/// Intersection of two axis-parallel segments as a box, if any.
fn meet(a: (Point, Point), b: (Point, Point)) -> Option<(Point, Point)> {
    let lo_x = a.0 .0.min(a.1 .0).max(b.0 .0.min(b.1 .0));
    let hi_x = a.0 .0.max(a.1 .0).min(b.0 .0.max(b.1 .0));
    let lo_y = a.0 .1.min(a.1 .1).max(b.0 .1.min(b.1 .1));
    let hi_y = a.0 .1.max(a.1 .1).min(b.0 .1.max(b.1 .1));
    (lo_x <= hi_x && lo_y <= hi_y).then_some(((lo_x, lo_y), (hi_x, hi_y)))
}

fn segments(points: &[Point]) -> Vec<(Point, Point)> {
    let mut pts: Vec<Point> = Vec::with_capacity(points.len());
    for &p in points {
        if pts.last() != Some(&p) {
            pts.push(p);
        }
    }
    pts.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Checks that `d` draws every graph of `inst` as a planar orthogonal grid
/// drawing with at most three bends per edge, shared edges drawn once.
pub fn validate_drawing(inst: &SunflowerInstance, d: &OrthogonalDrawing) -> DrawingReport {
    let n = inst.n();
    let k = inst.k();
    let mut problems = Vec::new();
    if d.pos.len() != n {
        problems.push(DrawingProblem::VertexCount { expected: n, found: d.pos.len() });
        return DrawingReport { valid: false, problems, max_bends: 0, crossings: vec![0; k] };
    }
    let mut at: BTreeMap<Point, VertexId> = BTreeMap::new();
    for (v, &p) in d.pos.iter().enumerate() {
        if let Some(&u) = at.get(&p) {
            problems.push(DrawingProblem::SamePoint(u, v));
        } else {
            at.insert(p, v);
        }
    }

    let mut expected: BTreeMap<Edge, Option<usize>> = inst.shared().iter().map(|&e| (e, None)).collect();
    for g in 0..k {
        for &e in inst.exclusive(g) {
            expected.insert(e, Some(g));
        }
    }
    let mut drawn: BTreeMap<Edge, usize> = BTreeMap::new();
    let mut max_bends = 0;
    for (i, p) in d.paths.iter().enumerate() {
        let e = p.edge;
        match expected.get(&e) {
            None => {
                problems.push(DrawingProblem::UnknownEdge(e));
                continue;
            }
            Some(&g) if g != p.graph => problems.push(DrawingProblem::WrongGraph(e)),
            _ => {}
        }
        if drawn.insert(e, i).is_some() {
            problems.push(DrawingProblem::DuplicateEdge(e));
            continue;
        }
        if p.points.first() != Some(&d.pos[e.0]) || p.points.last() != Some(&d.pos[e.1]) {
            problems.push(DrawingProblem::Endpoints(e));
        }
        let segs = segments(&p.points);
        if segs.iter().any(|s| s.0 .0 != s.1 .0 && s.0 .1 != s.1 .1) {
            problems.push(DrawingProblem::NotRectilinear(e));
            continue;
        }
        let bends = p.bends();
        max_bends = max_bends.max(bends);
        if bends > 3 {
            problems.push(DrawingProblem::TooManyBends { edge: e, bends });
        }
        for (v, &q) in d.pos.iter().enumerate() {
            if e.contains(v) {
                continue;
            }
            if segs.iter().any(|&s| meet(s, (q, q)).is_some()) {
                problems.push(DrawingProblem::ThroughVertex { edge: e, vertex: v });
            }
        }
        let mut selfish = false;
        for i in 0..segs.len() {
            for j in i + 1..segs.len() {
                if let Some(m) = meet(segs[i], segs[j]) {
                    let joint = j == i + 1 && m.0 == m.1 && m.0 == segs[i].1;
                    if !joint {
                        selfish = true;
                    }
                }
            }
        }
        if selfish {
            problems.push(DrawingProblem::SelfIntersection(e));
        }
    }
    for &e in expected.keys() {
        if !drawn.contains_key(&e) {
            problems.push(DrawingProblem::MissingEdge(e));
        }
    }

    let mut crossings = vec![0; k];
    let seg_of: BTreeMap<Edge, Vec<(Point, Point)>> =
        drawn.iter().map(|(&e, &i)| (e, segments(&d.paths[i].points))).collect();
    for (g, count) in crossings.iter_mut().enumerate() {
        let mine: Vec<Edge> =
            drawn.keys().copied().filter(|e| expected[e].is_none_or(|h| h == g)).collect();
        for (a, &e) in mine.iter().enumerate() {
            for &f in &mine[a + 1..] {
                let common = [e.0, e.1].into_iter().find(|&v| f.contains(v)).map(|v| d.pos[v]);
                let mut hit = None;
                'outer: for &s in &seg_of[&e] {
                    for &t in &seg_of[&f] {
                        if let Some(m) = meet(s, t) {
                            if !(m.0 == m.1 && Some(m.0) == common) {
                                hit = Some(m.0);
                                break 'outer;
                            }
                        }
                    }
                }
                if let Some(p) = hit {
                    *count += 1;
                    problems.push(DrawingProblem::Crossing { graph: g, first: e, second: f, at: p });
                }
            }
        }
    }
    DrawingReport { valid: problems.is_empty(), problems, max_bends, crossings }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SvgStyle {
    /// Pixels per grid unit.
    pub scale: i64,
    pub margin: i64,
    /// Stroke color of exclusive edges, by graph; cycled when short.
    pub colors: Vec<String>,
    pub labels: bool,
}

impl Default for SvgStyle {
    fn default() -> Self {
        let colors = ["red", "blue", "green", "orange", "purple", "teal"];
        SvgStyle { scale: 24, margin: 16, colors: colors.iter().map(|c| String::from(*c)).collect(), labels: true }
    }
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(c),
        }
    }
    out
}

/// SVG text for a drawing. Shared edges are black, exclusive edges use one
/// class per graph. The output depends only on the arguments.
pub fn export_svg(d: &OrthogonalDrawing, names: &[String], style: &SvgStyle) -> String {
    let pts = d.pos.iter().chain(d.paths.iter().flat_map(|p| p.points.iter()));
    let (mut x0, mut y0, mut x1, mut y1) = (0i64, 0i64, 0i64, 0i64);
    for (i, &(x, y)) in pts.enumerate() {
        if i == 0 {
            (x0, y0, x1, y1) = (x, y, x, y);
        }
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    let sc = style.scale;
    let m = style.margin;
    let width = (x1 - x0) * sc + 2 * m;
    let height = (y1 - y0) * sc + 2 * m;
    // SVG's y axis points down.
    let map = |p: Point| ((p.0 - x0) * sc + m, (y1 - p.1) * sc + m);
    let graphs = d.paths.iter().filter_map(|p| p.graph).max().map_or(0, |g| g + 1);

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    );
    s.push_str("<style>\npolyline { fill: none; stroke-width: 2; }\n.shared { stroke: black; }\n");
    for g in 0..graphs {
        let color = if style.colors.is_empty() { "gray" } else { &style.colors[g % style.colors.len()] };
        let _ = writeln!(s, ".g{} {{ stroke: {}; }}", g + 1, color);
    }
    s.push_str("circle { fill: white; stroke: black; stroke-width: 1.5; }\ntext { font: 10px sans-serif; }\n</style>\n");
    let mut order: Vec<&EdgePath> = d.paths.iter().filter(|p| p.graph.is_some()).collect();
    order.extend(d.paths.iter().filter(|p| p.graph.is_none()));
    for p in order {
        let class = match p.graph {
            None => String::from("shared"),
            Some(g) => format!("g{}", g + 1),
        };
        let coords: Vec<String> = p
            .points
            .iter()
            .map(|&q| {
                let (x, y) = map(q);
                format!("{x},{y}")
            })
            .collect();
        let _ = writeln!(s, "<polyline class=\"{class}\" points=\"{}\"/>", coords.join(" "));
    }
    for (v, &p) in d.pos.iter().enumerate() {
        let (x, y) = map(p);
        let _ = writeln!(s, "<circle cx=\"{x}\" cy=\"{y}\" r=\"4\"/>");
        if style.labels {
            let name = names.get(v).map_or_else(|| format!("{v}"), |n| xml_escape(n));
            let _ = writeln!(s, "<text x=\"{}\" y=\"{}\">{name}</text>", x + 5, y - 5);
        }
    }
    s.push_str("</svg>\n");
    s
}
