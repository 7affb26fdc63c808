//! Instance generators: the three-graph and two-graph hardness
//! constructions from positive NAE3SAT formulas, and seeded random cycle
//! instances.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constraints::{crossing_bound, Side, SideAssignment};
use crate::instance::{CycleInstance, Edge, InstanceError, SunflowerInstance, VertexId};
use crate::planarity::is_planar;
use crate::naesat::{Literal, NaeAssignment, NaeFormula};

/// A positive exactly-three NAE3SAT formula. Variables are `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaeInput {
    pub n: usize,
    pub clauses: Vec<[usize; 3]>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GadgetError {
    #[error("clause {0} does not have three distinct variables below n")]
    BadClause(usize),
    #[error("the formula has no clauses")]
    NoClauses,
    #[error("cannot place {wanted} edges under the degree caps (placed {placed})")]
    Budget { wanted: usize, placed: usize },
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

impl NaeInput {
    pub fn new(n: usize, clauses: Vec<[usize; 3]>) -> Result<Self, GadgetError> {
        let f = NaeInput { n, clauses };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<(), GadgetError> {
        if self.clauses.is_empty() {
            return Err(GadgetError::NoClauses);
        }
        for (j, c) in self.clauses.iter().enumerate() {
            if c.iter().any(|&x| x >= self.n) || c[0] == c[1] || c[1] == c[2] || c[0] == c[2] {
                return Err(GadgetError::BadClause(j));
            }
        }
        Ok(())
    }

    pub fn to_formula(&self) -> NaeFormula {
        let mut f = NaeFormula::new(self.n);
        for c in &self.clauses {
            f.add_clause(c.iter().map(|&x| Literal::pos(x)).collect());
        }
        f
    }

    /// The clause's variables as (a, b, c): decreasing for odd (1-based)
    /// clauses, increasing for even ones.
    pub fn ordered(&self, j: usize) -> [usize; 3] {
        let mut c = self.clauses[j];
        c.sort_unstable();
        if j.is_multiple_of(2) {
            c.reverse();
        }
        c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VariableRoles {
    pub s: VertexId,
    pub u: VertexId,
    pub w: VertexId,
    pub v: VertexId,
    pub z: VertexId,
    pub r: VertexId,
    pub t: VertexId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClauseRoles {
    pub s: VertexId,
    pub alpha: VertexId,
    pub y_a: VertexId,
    pub beta: VertexId,
    pub y_b: VertexId,
    pub d: [VertexId; 6],
    pub gamma: VertexId,
    pub y_c: VertexId,
    pub delta: VertexId,
    pub t: VertexId,
}

/// Where every gadget role ended up. `vars[j][i]` is the gadget of
/// variable `i` in clause `j` (both 0-based).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetMap {
    pub vars: Vec<Vec<VariableRoles>>,
    pub clauses: Vec<ClauseRoles>,
    /// Graph index holding the truth edges and gadget edges.
    pub main_graph: usize,
}

impl GadgetMap {
    pub fn truth_edge(&self, i: usize) -> Edge {
        let g = &self.vars[0][i];
        Edge::new(g.u, g.v)
    }

    /// Variable `i` is true iff its truth edge lies inside (Left).
    pub fn decode(&self, c: &CycleInstance, a: &SideAssignment) -> NaeAssignment {
        let list = c.exclusive(self.main_graph);
        let values = (0..self.vars[0].len())
            .map(|i| {
                let e = self.truth_edge(i);
                let idx = list.iter().position(|&f| f == e).expect("truth edge present");
                a.get(self.main_graph, idx) == Side::Left
            })
            .collect();
        NaeAssignment { values }
    }
}

struct Layout {
    names: Vec<String>,
    order: Vec<VertexId>,
    map: GadgetMap,
}

impl Layout {
    fn vertex(&mut self, name: String) -> VertexId {
        self.names.push(name);
        self.order.push(self.names.len() - 1);
        self.names.len() - 1
    }
}

/// Lays out the cycle: per clause the variable gadgets (increasing order
/// for odd clauses, decreasing for even), then the clause gadget. The last
/// vertex of each gadget is the first vertex of the next one, and the cycle
/// closes at the first gadget.
fn layout(f: &NaeInput) -> Layout {
    let (n, m) = (f.n, f.clauses.len());
    let mut l = Layout {
        names: Vec::new(),
        order: Vec::new(),
        map: GadgetMap { vars: Vec::new(), clauses: Vec::new(), main_graph: 0 },
    };
    let placeholder = VariableRoles { s: 0, u: 0, w: 0, v: 0, z: 0, r: 0, t: 0 };
    let mut pending_t: Vec<(bool, usize, usize)> = Vec::new();
    for j in 0..m {
        let sup = j + 1;
        let mut row = vec![placeholder; n];
        let seq: Vec<usize> = if j % 2 == 0 { (0..n).collect() } else { (0..n).rev().collect() };
        for &i in &seq {
            let x = i + 1;
            let s = l.vertex(format!("s_{x}^{sup}"));
            pending_t.push((true, j, i));
            let u = l.vertex(format!("u_{x}^{sup}"));
            let w = l.vertex(format!("w_{x}^{sup}"));
            let v = l.vertex(format!("v_{x}^{sup}"));
            let z = l.vertex(format!("z_{x}^{sup}"));
            let r = l.vertex(format!("r_{x}^{sup}"));
            row[i] = VariableRoles { s, u, w, v, z, r, t: 0 };
        }
        l.map.vars.push(row);
        let s = l.vertex(format!("s^{sup}"));
        pending_t.push((false, j, 0));
        let alpha = l.vertex(format!("alpha^{sup}"));
        let y_a = l.vertex(format!("y_a^{sup}"));
        let beta = l.vertex(format!("beta^{sup}"));
        let y_b = l.vertex(format!("y_b^{sup}"));
        let mut d = [0; 6];
        for (k, slot) in d.iter_mut().enumerate() {
            *slot = l.vertex(format!("d_{}^{sup}", k + 1));
        }
        let gamma = l.vertex(format!("gamma^{sup}"));
        let y_c = l.vertex(format!("y_c^{sup}"));
        let delta = l.vertex(format!("delta^{sup}"));
        l.map.clauses.push(ClauseRoles { s, alpha, y_a, beta, y_b, d, gamma, y_c, delta, t: 0 });
    }
    // Each gadget's t is the s of the gadget after it.
    for (idx, &(is_var, j, i)) in pending_t.iter().enumerate() {
        let (nv, nj, ni) = pending_t[(idx + 1) % pending_t.len()];
        let next_s = if nv { l.map.vars[nj][ni].s } else { l.map.clauses[nj].s };
        if is_var {
            l.map.vars[j][i].t = next_s;
        } else {
            l.map.clauses[j].t = next_s;
        }
    }
    l
}

/// Gadget edges in the main graph, clause-graph edges, and the transmission
/// edges `(j, i, edge)` connecting clause `j` to `j + 1`.
struct Wiring {
    main: Vec<Edge>,
    clause_side: Vec<Edge>,
    transmissions: Vec<(usize, Edge)>,
}

fn wiring(f: &NaeInput, map: &GadgetMap) -> Wiring {
    let (n, m) = (f.n, f.clauses.len());
    let mut main = Vec::new();
    let mut clause_side = Vec::new();
    for j in 0..m {
        let order = f.ordered(j);
        let cg = &map.clauses[j];
        for i in 0..n {
            let g = &map.vars[j][i];
            main.push(Edge::new(g.u, g.v));
            main.push(Edge::new(g.w, g.z));
            let target = match order.iter().position(|&x| x == i) {
                Some(0) => cg.y_a,
                Some(1) => cg.y_b,
                Some(_) => cg.y_c,
                None => g.r,
            };
            main.push(Edge::new(g.w, target));
        }
        let d = cg.d;
        main.extend([
            Edge::new(cg.alpha, cg.beta),
            Edge::new(cg.beta, cg.gamma),
            Edge::new(cg.gamma, cg.delta),
            Edge::new(d[0], d[2]),
            Edge::new(d[1], d[3]),
            Edge::new(d[2], d[4]),
            Edge::new(d[3], d[5]),
        ]);
        clause_side.push(Edge::new(cg.beta, d[2]));
        clause_side.push(Edge::new(d[3], cg.gamma));
    }
    let mut transmissions = Vec::new();
    for j in 0..m.saturating_sub(1) {
        for i in 0..n {
            transmissions.push((j, Edge::new(map.vars[j][i].w, map.vars[j + 1][i].w)));
        }
    }
    Wiring { main, clause_side, transmissions }
}

fn outerplanar(c: &CycleInstance, g: usize) -> bool {
    let list = c.exclusive(g);
    (0..list.len()).all(|i| (i + 1..list.len()).all(|j| !c.alternates(list[i], list[j])))
}

/// The three-graph construction. Graph 0 holds the clause-gadget edges
/// `{beta,d_3}`, `{d_4,gamma}` and the transmissions leaving even clauses,
/// graph 1 the transmissions leaving odd clauses, graph 2 everything else.
pub fn generate_theorem3(f: &NaeInput) -> Result<(CycleInstance, GadgetMap), GadgetError> {
    f.validate()?;
    let Layout { names, order, mut map } = layout(f);
    map.main_graph = 2;
    let w = wiring(f, &map);
    let mut g1 = w.clause_side;
    let mut g2 = Vec::new();
    for (j, e) in w.transmissions {
        // 0-based j even is an odd clause.
        if j % 2 == 0 {
            g2.push(e);
        } else {
            g1.push(e);
        }
    }
    let c = CycleInstance::new(names, order, Vec::new(), vec![g1, g2, w.main])?;
    debug_assert!(outerplanar(&c, 0) && outerplanar(&c, 1));
    debug_assert!((0..c.n()).all(|v| c.exclusive_degree(v, 0) <= 1 && c.exclusive_degree(v, 1) <= 1));
    Ok((c, map))
}

/// The two-graph construction: graph 0 keeps the first graph of the
/// three-graph construction, graph 1 its gadget graph, and every
/// transmission of the dropped graph becomes a path through new vertices
/// off the cycle whose edges alternate between the graphs, starting and
/// ending in graph 0.
pub fn generate_theorem4(f: &NaeInput) -> Result<(CycleInstance, GadgetMap), GadgetError> {
    let (c3, mut map) = generate_theorem3(f)?;
    map.main_graph = 1;
    let mut names = c3.names().to_vec();
    let order = c3.order().to_vec();
    let mut g0 = c3.exclusive(0).to_vec();
    let mut g1 = c3.exclusive(2).to_vec();
    let bare = CycleInstance::new(names.clone(), order.clone(), Vec::new(), vec![g0.clone(), g1.clone()])?;
    let mut isolated = Vec::new();
    for (t, e) in c3.exclusive(1).iter().enumerate() {
        let mut len = 1 + crossing_bound(&bare, e.0, e.1);
        if len.is_multiple_of(2) {
            len += 1;
        }
        let mut prev = e.0;
        for step in 0..len {
            let next = if step + 1 == len {
                e.1
            } else {
                names.push(format!("p{}_{}", t + 1, step + 1));
                isolated.push(names.len() - 1);
                names.len() - 1
            };
            if step % 2 == 0 {
                g0.push(Edge::new(prev, next));
            } else {
                g1.push(Edge::new(prev, next));
            }
            prev = next;
        }
    }
    Ok((CycleInstance::new(names, order, isolated, vec![g0, g1])?, map))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomParams {
    pub n: usize,
    /// Exclusive edges wanted per graph; its length is the graph count.
    pub budgets: Vec<usize>,
    /// Bound on the union degree of every vertex, shared edges included.
    pub union_cap: usize,
    pub seed: u64,
}

/// A random cycle `v0..v{n-1}` with chords drawn uniformly and rejected
/// when they repeat an edge or break a degree cap.
pub fn generate_random(p: &RandomParams) -> Result<CycleInstance, GadgetError> {
    let n = p.n;
    let wanted: usize = p.budgets.iter().sum();
    let chords = if n >= 3 { n * (n - 3) / 2 } else { 0 };
    let slots = n * p.union_cap.saturating_sub(2) / 2;
    if wanted > chords || wanted > slots || p.budgets.is_empty() || n < 3 {
        return Err(GadgetError::Budget { wanted, placed: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut udeg = vec![2usize; n];
    let mut gdeg = vec![vec![2usize; n]; p.budgets.len()];
    let mut used: Vec<Edge> = Vec::new();
    let mut lists = vec![Vec::new(); p.budgets.len()];
    let mut placed = 0;
    for (g, &b) in p.budgets.iter().enumerate() {
        let mut attempts = 0;
        while lists[g].len() < b {
            attempts += 1;
            if attempts > 200 * (b + 1) {
                return Err(GadgetError::Budget { wanted, placed });
            }
            let a = rng.random_range(0..n);
            let d = rng.random_range(0..n);
            let e = Edge::new(a, d);
            if a == d || (e.1 - e.0) % n == 1 || (e.0 == 0 && e.1 == n - 1) || used.contains(&e) {
                continue;
            }
            if udeg[a] >= p.union_cap || udeg[d] >= p.union_cap || gdeg[g][a] >= 4 || gdeg[g][d] >= 4 {
                continue;
            }
            udeg[a] += 1;
            udeg[d] += 1;
            gdeg[g][a] += 1;
            gdeg[g][d] += 1;
            used.push(e);
            lists[g].push(e);
            placed += 1;
        }
    }
    Ok(CycleInstance::new(names, (0..n).collect(), Vec::new(), lists)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiconnectedParams {
    pub n: usize,
    /// Extra shared edges added as single-edge ears once all vertices exist.
    pub chords: usize,
    pub budgets: Vec<usize>,
    pub union_cap: usize,
    pub seed: u64,
}

/// A random planar biconnected shared graph grown by ears from a cycle,
/// with shared degree at most 4, plus random exclusive edges under the
/// same caps as [`generate_random`].
pub fn generate_random_biconnected(p: &BiconnectedParams) -> Result<SunflowerInstance, GadgetError> {
    let n = p.n;
    let wanted: usize = p.budgets.iter().sum();
    if n < 3 || p.budgets.is_empty() {
        return Err(GadgetError::Budget { wanted, placed: 0 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let start = rng.random_range(3..=n);
    let mut shared: Vec<Edge> = (0..start).map(|i| Edge::new(i, (i + 1) % start)).collect();
    let mut count = start;
    let mut sdeg = vec![0usize; n];
    for e in &shared {
        sdeg[e.0] += 1;
        sdeg[e.1] += 1;
    }
    let mut attempts = 0;
    let mut chords = 0;
    while count < n || chords < p.chords {
        attempts += 1;
        if attempts > 400 * n {
            return Err(GadgetError::Budget { wanted, placed: 0 });
        }
        let a = rng.random_range(0..count);
        let b = rng.random_range(0..count);
        if a == b || sdeg[a] >= 4 || sdeg[b] >= 4 {
            continue;
        }
        let len = if count < n { rng.random_range(1..=(n - count).min(3)) } else { 0 };
        if len == 0 && shared.contains(&Edge::new(a, b)) {
            continue;
        }
        let mut path = vec![a];
        path.extend(count..count + len);
        path.push(b);
        let mut next = shared.clone();
        next.extend(path.windows(2).map(|w| Edge::new(w[0], w[1])));
        if !is_planar(count + len, &next) {
            continue;
        }
        shared = next;
        sdeg[a] += 1;
        sdeg[b] += 1;
        for v in count..count + len {
            sdeg[v] = 2;
        }
        count += len;
        if len == 0 {
            chords += 1;
        }
    }
    let mut udeg = sdeg.clone();
    let mut gdeg = vec![sdeg.clone(); p.budgets.len()];
    let mut used: Vec<Edge> = shared.clone();
    let mut lists = vec![Vec::new(); p.budgets.len()];
    let mut placed = 0;
    for (g, &b) in p.budgets.iter().enumerate() {
        let mut attempts = 0;
        while lists[g].len() < b {
            attempts += 1;
            if attempts > 200 * (b + 1) {
                return Err(GadgetError::Budget { wanted, placed });
            }
            let a = rng.random_range(0..n);
            let d = rng.random_range(0..n);
            let e = Edge::new(a, d);
            if a == d || used.contains(&e) {
                continue;
            }
            if udeg[a] >= p.union_cap || udeg[d] >= p.union_cap || gdeg[g][a] >= 4 || gdeg[g][d] >= 4 {
                continue;
            }
            udeg[a] += 1;
            udeg[d] += 1;
            gdeg[g][a] += 1;
            gdeg[g][d] += 1;
            used.push(e);
            lists[g].push(e);
            placed += 1;
        }
    }
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    Ok(SunflowerInstance::new(names, shared, lists)?)
}
