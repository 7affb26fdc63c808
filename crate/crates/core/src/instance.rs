//! Sunflower instances, cycle instances and the alternation test.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

/// Dense vertex index; names are kept on the instance.
pub type VertexId = usize;

/// Maximum degree of every input graph.
pub const MAX_DEGREE: usize = 4;

/// Undirected edge, stored with the smaller index first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge(pub VertexId, pub VertexId);

impl Edge {
    pub fn new(u: VertexId, v: VertexId) -> Edge {
        if u <= v {
            Edge(u, v)
        } else {
            Edge(v, u)
        }
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.0 == v || self.1 == v
    }

    /// The endpoint that is not `v`. `v` must be an endpoint.
    pub fn other(&self, v: VertexId) -> VertexId {
        if self.0 == v {
            self.1
        } else {
            debug_assert_eq!(self.1, v);
            self.0
        }
    }

    pub fn shares_endpoint(&self, f: &Edge) -> bool {
        self.contains(f.0) || self.contains(f.1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("graph count mismatch: k = {k} but {found} exclusive edge lists given")]
    GraphCount { k: usize, found: usize },
    #[error("k must be at least 1")]
    NoGraphs,
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("self-loop at `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge {0}")]
    DuplicateEdge(String),
    #[error("exclusive edge {edge} of G{graph} duplicates a shared edge")]
    DuplicatesShared { graph: usize, edge: String },
    #[error("sunflower violation: edge {edge} is exclusive to both G{first} and G{second}")]
    Sunflower { edge: String, first: usize, second: usize },
    #[error("degree bound: vertex `{vertex}` has degree {degree} in G{graph} (maximum 4)")]
    DegreeBound { vertex: String, graph: usize, degree: usize },
    #[error("cycle visits `{0}` more than once")]
    CycleRepeat(String),
    #[error("cycle must have at least 3 vertices")]
    ShortCycle,
    #[error("exactly one of \"cycle\" and \"shared\" must be present")]
    Shape,
    #[error("vertex `{0}` is neither on the cycle nor declared isolated")]
    Unplaced(String),
    #[error("vertex `{0}` is declared isolated but lies on the cycle")]
    IsolatedOnCycle(String),
    #[error("\"isolated\" is only allowed together with \"cycle\"")]
    IsolatedWithoutCycle,
    #[error("vertex `{0}` is not on the cycle")]
    NotOnCycle(String),
    #[error("edges must be distinct")]
    SameEdge,
}

/// Instance description by vertex names, as read from a file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawInstance {
    pub k: usize,
    pub vertices: Vec<String>,
    pub cycle: Option<Vec<String>>,
    pub shared: Option<Vec<(String, String)>>,
    pub exclusive: Vec<Vec<(String, String)>>,
    pub isolated: Option<Vec<String>>,
}

/// A validated instance: either a shared cycle or an explicit shared edge set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    Cycle(CycleInstance),
    Sunflower(SunflowerInstance),
}

impl Instance {
    pub fn names(&self) -> &[String] {
        match self {
            Instance::Cycle(c) => c.names(),
            Instance::Sunflower(s) => s.names(),
        }
    }

    pub fn k(&self) -> usize {
        match self {
            Instance::Cycle(c) => c.k(),
            Instance::Sunflower(s) => s.k(),
        }
    }

    pub fn to_raw(&self) -> RawInstance {
        match self {
            Instance::Cycle(c) => c.to_raw(),
            Instance::Sunflower(s) => s.to_raw(),
        }
    }

    pub fn to_sunflower(&self) -> SunflowerInstance {
        match self {
            Instance::Cycle(c) => c.to_sunflower(),
            Instance::Sunflower(s) => s.clone(),
        }
    }

    pub fn exclusive_degree(&self, v: VertexId, graph: usize) -> usize {
        match self {
            Instance::Cycle(c) => c.exclusive_degree(v, graph),
            Instance::Sunflower(s) => s.exclusive_degree(v, graph),
        }
    }
}

impl RawInstance {
    /// Validates and interns the description.
    pub fn build(&self) -> Result<Instance, InstanceError> {
        if self.k == 0 {
            return Err(InstanceError::NoGraphs);
        }
        if self.exclusive.len() != self.k {
            return Err(InstanceError::GraphCount { k: self.k, found: self.exclusive.len() });
        }
        let mut index = BTreeMap::new();
        for (i, name) in self.vertices.iter().enumerate() {
            if index.insert(name.as_str(), i).is_some() {
                return Err(InstanceError::DuplicateVertex(name.clone()));
            }
        }
        let lookup = |name: &String| -> Result<VertexId, InstanceError> {
            index.get(name.as_str()).copied().ok_or_else(|| InstanceError::UnknownVertex(name.clone()))
        };
        let mut exclusive = Vec::with_capacity(self.k);
        for list in &self.exclusive {
            let mut edges = Vec::with_capacity(list.len());
            for (a, b) in list {
                let (u, v) = (lookup(a)?, lookup(b)?);
                if u == v {
                    return Err(InstanceError::SelfLoop(a.clone()));
                }
                edges.push(Edge::new(u, v));
            }
            exclusive.push(edges);
        }
        let names = self.vertices.clone();
        match (&self.cycle, &self.shared) {
            (Some(cycle), None) => {
                let order = cycle.iter().map(lookup).collect::<Result<Vec<_>, _>>()?;
                let isolated = match &self.isolated {
                    Some(list) => list.iter().map(lookup).collect::<Result<Vec<_>, _>>()?,
                    None => Vec::new(),
                };
                CycleInstance::new(names, order, isolated, exclusive).map(Instance::Cycle)
            }
            (None, Some(shared)) => {
                if self.isolated.is_some() {
                    return Err(InstanceError::IsolatedWithoutCycle);
                }
                let mut edges = Vec::with_capacity(shared.len());
                for (a, b) in shared {
                    let (u, v) = (lookup(a)?, lookup(b)?);
                    if u == v {
                        return Err(InstanceError::SelfLoop(a.clone()));
                    }
                    edges.push(Edge::new(u, v));
                }
                SunflowerInstance::new(names, edges, exclusive).map(Instance::Sunflower)
            }
            _ => Err(InstanceError::Shape),
        }
    }
}

fn edge_label(names: &[String], e: Edge) -> String {
    edge_key(names, e)
}

/// Sorted endpoint names joined by `-`; the key used in witness files.
pub fn edge_key(names: &[String], e: Edge) -> String {
    let (a, b) = (&names[e.0], &names[e.1]);
    if a <= b {
        format!("{a}-{b}")
    } else {
        format!("{b}-{a}")
    }
}

/// Shared validation of the sunflower invariants and the degree bound.
fn validate_edges(names: &[String], shared: &[Edge], exclusive: &[Vec<Edge>]) -> Result<(), InstanceError> {
    let n = names.len();
    let mut shared_set = BTreeSet::new();
    for &e in shared {
        if e.0 == e.1 {
            return Err(InstanceError::SelfLoop(names[e.0].clone()));
        }
        if !shared_set.insert(e) {
            return Err(InstanceError::DuplicateEdge(edge_label(names, e)));
        }
    }
    let mut owner: BTreeMap<Edge, usize> = BTreeMap::new();
    for (g, list) in exclusive.iter().enumerate() {
        for &e in list {
            if e.0 == e.1 {
                return Err(InstanceError::SelfLoop(names[e.0].clone()));
            }
            if shared_set.contains(&e) {
                return Err(InstanceError::DuplicatesShared { graph: g + 1, edge: edge_label(names, e) });
            }
            match owner.get(&e) {
                Some(&h) if h == g => return Err(InstanceError::DuplicateEdge(edge_label(names, e))),
                Some(&h) => {
                    return Err(InstanceError::Sunflower { edge: edge_label(names, e), first: h + 1, second: g + 1 })
                }
                None => {
                    owner.insert(e, g);
                }
            }
        }
    }
    let mut shared_deg = vec![0usize; n];
    for e in shared {
        shared_deg[e.0] += 1;
        shared_deg[e.1] += 1;
    }
    for (g, list) in exclusive.iter().enumerate() {
        let mut deg = shared_deg.clone();
        for e in list {
            deg[e.0] += 1;
            deg[e.1] += 1;
        }
        if let Some(v) = (0..n).find(|&v| deg[v] > MAX_DEGREE) {
            return Err(InstanceError::DegreeBound { vertex: names[v].clone(), graph: g + 1, degree: deg[v] });
        }
    }
    Ok(())
}

/// k graphs on one vertex set sharing the edge set `shared`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SunflowerInstance {
    names: Vec<String>,
    shared: Vec<Edge>,
    exclusive: Vec<Vec<Edge>>,
}

impl SunflowerInstance {
    pub fn new(names: Vec<String>, mut shared: Vec<Edge>, exclusive: Vec<Vec<Edge>>) -> Result<Self, InstanceError> {
        if exclusive.is_empty() {
            return Err(InstanceError::NoGraphs);
        }
        check_names(&names)?;
        validate_edges(&names, &shared, &exclusive)?;
        shared.sort();
        Ok(SunflowerInstance { names, shared, exclusive })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn k(&self) -> usize {
        self.exclusive.len()
    }

    pub fn shared(&self) -> &[Edge] {
        &self.shared
    }

    pub fn exclusive(&self, graph: usize) -> &[Edge] {
        &self.exclusive[graph]
    }

    pub fn exclusive_all(&self) -> &[Vec<Edge>] {
        &self.exclusive
    }

    pub fn exclusive_degree(&self, v: VertexId, graph: usize) -> usize {
        self.exclusive[graph].iter().filter(|e| e.contains(v)).count()
    }

    pub fn shared_degree(&self, v: VertexId) -> usize {
        self.shared.iter().filter(|e| e.contains(v)).count()
    }

    /// Degree of `v` in the union of all graphs.
    pub fn union_degree(&self, v: VertexId) -> usize {
        self.shared_degree(v) + (0..self.k()).map(|g| self.exclusive_degree(v, g)).sum::<usize>()
    }

    pub fn max_union_degree(&self) -> usize {
        let mut deg = vec![0usize; self.n()];
        for e in self.shared.iter().chain(self.exclusive.iter().flatten()) {
            deg[e.0] += 1;
            deg[e.1] += 1;
        }
        deg.into_iter().max().unwrap_or(0)
    }

    /// Shared adjacency lists, neighbors sorted.
    pub fn shared_adjacency(&self) -> Vec<Vec<VertexId>> {
        let mut adj = vec![Vec::new(); self.n()];
        for e in &self.shared {
            adj[e.0].push(e.1);
            adj[e.1].push(e.0);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Reinterprets the instance as a cycle instance when the shared graph
    /// is one cycle plus vertices without shared edges.
    pub fn as_cycle(&self) -> Option<CycleInstance> {
        let adj = self.shared_adjacency();
        let start = (0..self.n()).find(|&v| !adj[v].is_empty())?;
        if adj.iter().any(|a| !a.is_empty() && a.len() != 2) {
            return None;
        }
        let mut order = vec![start];
        let mut prev = start;
        let mut cur = adj[start][0];
        while cur != start {
            order.push(cur);
            let next = if adj[cur][0] == prev { adj[cur][1] } else { adj[cur][0] };
            prev = cur;
            cur = next;
        }
        let on_cycle = order.len();
        let with_edges = adj.iter().filter(|a| !a.is_empty()).count();
        if on_cycle != with_edges {
            return None;
        }
        let isolated = (0..self.n()).filter(|&v| adj[v].is_empty()).collect();
        CycleInstance::new(self.names.clone(), order, isolated, self.exclusive.clone()).ok()
    }

    pub fn to_raw(&self) -> RawInstance {
        let pair = |e: &Edge| (self.names[e.0].clone(), self.names[e.1].clone());
        RawInstance {
            k: self.k(),
            vertices: self.names.clone(),
            cycle: None,
            shared: Some(self.shared.iter().map(pair).collect()),
            exclusive: self.exclusive.iter().map(|l| l.iter().map(pair).collect()).collect(),
            isolated: None,
        }
    }
}

fn check_names(names: &[String]) -> Result<(), InstanceError> {
    let mut seen = BTreeSet::new();
    for name in names {
        if !seen.insert(name.as_str()) {
            return Err(InstanceError::DuplicateVertex(name.clone()));
        }
    }
    Ok(())
}

/// k graphs whose shared graph is the cycle `order`, plus optional vertices
/// that carry no shared edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleInstance {
    names: Vec<String>,
    order: Vec<VertexId>,
    isolated: Vec<VertexId>,
    exclusive: Vec<Vec<Edge>>,
    pos: Vec<Option<usize>>,
}

impl CycleInstance {
    pub fn new(
        names: Vec<String>,
        order: Vec<VertexId>,
        mut isolated: Vec<VertexId>,
        exclusive: Vec<Vec<Edge>>,
    ) -> Result<Self, InstanceError> {
        if exclusive.is_empty() {
            return Err(InstanceError::NoGraphs);
        }
        check_names(&names)?;
        let n = names.len();
        if order.len() < 3 {
            return Err(InstanceError::ShortCycle);
        }
        let mut pos = vec![None; n];
        for (i, &v) in order.iter().enumerate() {
            if v >= n {
                return Err(InstanceError::UnknownVertex(format!("#{v}")));
            }
            if pos[v].is_some() {
                return Err(InstanceError::CycleRepeat(names[v].clone()));
            }
            pos[v] = Some(i);
        }
        isolated.sort_unstable();
        isolated.dedup();
        for &v in &isolated {
            if v >= n {
                return Err(InstanceError::UnknownVertex(format!("#{v}")));
            }
            if pos[v].is_some() {
                return Err(InstanceError::IsolatedOnCycle(names[v].clone()));
            }
        }
        if let Some(v) = (0..n).find(|&v| pos[v].is_none() && isolated.binary_search(&v).is_err()) {
            return Err(InstanceError::Unplaced(names[v].clone()));
        }
        for e in exclusive.iter().flatten() {
            if e.1 >= n {
                return Err(InstanceError::UnknownVertex(format!("#{}", e.1)));
            }
        }
        let shared = cycle_edges(&order);
        validate_edges(&names, &shared, &exclusive)?;
        Ok(CycleInstance { names, order, isolated, exclusive, pos })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn n(&self) -> usize {
        self.names.len()
    }

    pub fn k(&self) -> usize {
        self.exclusive.len()
    }

    pub fn order(&self) -> &[VertexId] {
        &self.order
    }

    pub fn isolated(&self) -> &[VertexId] {
        &self.isolated
    }

    pub fn exclusive(&self, graph: usize) -> &[Edge] {
        &self.exclusive[graph]
    }

    pub fn exclusive_all(&self) -> &[Vec<Edge>] {
        &self.exclusive
    }

    pub fn exclusive_count(&self) -> usize {
        self.exclusive.iter().map(Vec::len).sum()
    }

    pub fn position(&self, v: VertexId) -> Option<usize> {
        self.pos[v]
    }

    pub fn shared_edges(&self) -> Vec<Edge> {
        cycle_edges(&self.order)
    }

    pub fn exclusive_degree(&self, v: VertexId, graph: usize) -> usize {
        self.exclusive[graph].iter().filter(|e| e.contains(v)).count()
    }

    /// Degree of `v` in the union graph.
    pub fn union_degree(&self, v: VertexId) -> usize {
        let shared = if self.pos[v].is_some() { 2 } else { 0 };
        shared + (0..self.k()).map(|g| self.exclusive_degree(v, g)).sum::<usize>()
    }

    pub fn max_union_degree(&self) -> usize {
        let mut deg: Vec<usize> = self.pos.iter().map(|p| if p.is_some() { 2 } else { 0 }).collect();
        for e in self.exclusive.iter().flatten() {
            deg[e.0] += 1;
            deg[e.1] += 1;
        }
        deg.into_iter().max().unwrap_or(0)
    }

    /// Whether every exclusive edge joins two cycle vertices.
    pub fn all_chords(&self) -> bool {
        self.exclusive.iter().flatten().all(|e| self.pos[e.0].is_some() && self.pos[e.1].is_some())
    }

    /// Whether two chords interleave along the cycle. Fails if an endpoint is
    /// off the cycle or the edges coincide.
    pub fn alternate(&self, e: Edge, f: Edge) -> Result<bool, InstanceError> {
        if e == f {
            return Err(InstanceError::SameEdge);
        }
        for v in [e.0, e.1, f.0, f.1] {
            if v >= self.n() {
                return Err(InstanceError::UnknownVertex(format!("#{v}")));
            }
            if self.pos[v].is_none() {
                return Err(InstanceError::NotOnCycle(self.names[v].clone()));
            }
        }
        Ok(self.alternates(e, f))
    }

    /// Alternation test for chords known to lie on the cycle.
    pub fn alternates(&self, e: Edge, f: Edge) -> bool {
        if e.shares_endpoint(&f) {
            return false;
        }
        let (Some(a), Some(b), Some(c), Some(d)) = (self.pos[e.0], self.pos[e.1], self.pos[f.0], self.pos[f.1]) else {
            return false;
        };
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let inside = |x: usize| lo < x && x < hi;
        inside(c) != inside(d)
    }

    pub fn edge_key(&self, e: Edge) -> String {
        edge_key(&self.names, e)
    }

    pub fn to_sunflower(&self) -> SunflowerInstance {
        SunflowerInstance::new(self.names.clone(), self.shared_edges(), self.exclusive.clone())
            .expect("a valid cycle instance is a valid sunflower instance")
    }

    pub fn to_raw(&self) -> RawInstance {
        let pair = |e: &Edge| (self.names[e.0].clone(), self.names[e.1].clone());
        RawInstance {
            k: self.k(),
            vertices: self.names.clone(),
            cycle: Some(self.order.iter().map(|&v| self.names[v].clone()).collect()),
            shared: None,
            exclusive: self.exclusive.iter().map(|l| l.iter().map(pair).collect()).collect(),
            isolated: if self.isolated.is_empty() {
                None
            } else {
                Some(self.isolated.iter().map(|&v| self.names[v].clone()).collect())
            },
        }
    }

    /// Same instance with the cycle traversed in the opposite direction.
    pub fn reflected(&self) -> CycleInstance {
        let mut order = self.order.clone();
        order.reverse();
        CycleInstance::new(self.names.clone(), order, self.isolated.clone(), self.exclusive.clone())
            .expect("reflection keeps validity")
    }
}

pub(crate) fn cycle_edges(order: &[VertexId]) -> Vec<Edge> {
    let n = order.len();
    (0..n).map(|i| Edge::new(order[i], order[(i + 1) % n])).collect()
}
