//! Brute-force reference searches. Nothing here shares code with the
//! solvers in `orthosefe-core` beyond the data types and the two checkers
//! (`check_assignment`, `check_sefe_orthogonality`) that define the answer.

use std::collections::BTreeMap;

use orthosefe_core::constraints::check_assignment;
use orthosefe_core::{check_sefe_orthogonality, CycleInstance, NaeFormula, RotationSystem, Side, SideAssignment, SunflowerInstance, VertexId};

/// Every one of the 2^m side assignments, in binary counting order.
pub fn naive_side_search(c: &CycleInstance) -> Option<SideAssignment> {
    let sizes: Vec<usize> = c.exclusive_all().iter().map(Vec::len).collect();
    let m: usize = sizes.iter().sum();
    assert!(m < 30, "too many exclusive edges for enumeration");
    for mask in 0u64..1 << m {
        let mut bit = 0;
        let sides = sizes
            .iter()
            .map(|&s| {
                (0..s)
                    .map(|_| {
                        bit += 1;
                        Side::from_left(mask >> (bit - 1) & 1 == 0)
                    })
                    .collect()
            })
            .collect();
        let a = SideAssignment { sides };
        if check_assignment(c, &a).map(|v| v.feasible).unwrap_or(false) {
            return Some(a);
        }
    }
    None
}

/// NAE satisfiability by truth table.
pub fn nae_truth_table(f: &NaeFormula) -> bool {
    assert!(f.vars < 25);
    (0u32..1 << f.vars).any(|m| {
        f.clauses.iter().all(|c| {
            let t = c.iter().filter(|l| (m >> l.var & 1 == 1) == l.positive).count();
            t > 0 && t < c.len()
        })
    })
}

/// Calls `f` with every combination of cyclic orders of the lists in
/// `base`, where each list keeps its first element in front.
fn each_rotation(base: &[Vec<VertexId>], f: &mut dyn FnMut(&[Vec<VertexId>]) -> bool) -> bool {
    fn perms(rest: &[VertexId]) -> Vec<Vec<VertexId>> {
        if rest.is_empty() {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for i in 0..rest.len() {
            let mut r = rest.to_vec();
            let x = r.remove(i);
            for mut p in perms(&r) {
                p.insert(0, x);
                out.push(p);
            }
        }
        out
    }
    let options: Vec<Vec<Vec<VertexId>>> = base
        .iter()
        .map(|l| match l.split_first() {
            None => vec![Vec::new()],
            Some((h, rest)) => perms(rest)
                .into_iter()
                .map(|mut p| {
                    p.insert(0, *h);
                    p
                })
                .collect(),
        })
        .collect();
    let mut pick = vec![0usize; base.len()];
    let mut cur: Vec<Vec<VertexId>> = options.iter().map(|o| o[0].clone()).collect();
    loop {
        if f(&cur) {
            return true;
        }
        let mut v = 0;
        loop {
            if v == base.len() {
                return false;
            }
            pick[v] += 1;
            if pick[v] < options[v].len() {
                cur[v] = options[v][pick[v]].clone();
                break;
            }
            pick[v] = 0;
            cur[v] = options[v][0].clone();
            v += 1;
        }
    }
}

/// Gap index of every exclusive neighbor at each vertex: the number of
/// shared neighbors seen before it when the rotation is read from the
/// first shared neighbor.
fn gaps(rot: &[Vec<VertexId>], shared: &[Vec<VertexId>]) -> Vec<Vec<(VertexId, usize)>> {
    rot.iter()
        .zip(shared)
        .map(|(r, s)| {
            if s.is_empty() {
                return Vec::new();
            }
            let start = r.iter().position(|&w| w == s[0]).unwrap();
            let mut gap = 0;
            let mut out = Vec::new();
            for k in 1..r.len() {
                let w = r[(start + k) % r.len()];
                if s.contains(&w) {
                    gap += 1;
                } else {
                    out.push((w, gap));
                }
            }
            out
        })
        .collect()
}

/// Searches all rotation systems of the union graph: every planar rotation
/// of the shared graph, every planar extension of it to each graph, and
/// every combination of those, judged by `check_sefe_orthogonality`. Two
/// graphs only; the shared graph must be connected and spanning.
pub fn exhaustive_rotation_search(inst: &SunflowerInstance) -> Option<RotationSystem> {
    assert_eq!(inst.k(), 2);
    let n = inst.n();
    let sadj = inst.shared_adjacency();
    let mut found = None;
    each_rotation(&sadj, &mut |srot| {
        if !RotationSystem::new(srot.to_vec()).is_planar() {
            return false;
        }
        // Per graph: gap signature -> one planar extension realizing it.
        let mut ext: Vec<BTreeMap<Vec<Vec<(VertexId, usize)>>, Vec<Vec<VertexId>>>> = Vec::new();
        for g in 0..2 {
            let mut own: Vec<Vec<VertexId>> = vec![Vec::new(); n];
            for e in inst.exclusive(g) {
                own[e.0].push(e.1);
                own[e.1].push(e.0);
            }
            let mut seen = BTreeMap::new();
            each_insertion(srot, &own, &mut |r| {
                if RotationSystem::new(r.to_vec()).is_planar() {
                    seen.entry(gaps(r, srot)).or_insert_with(|| r.to_vec());
                }
            });
            if seen.is_empty() {
                return false;
            }
            ext.push(seen);
        }
        for r1 in ext[0].values() {
            for r2 in ext[1].values() {
                let r = combine(srot, r1, r2);
                if check_sefe_orthogonality(inst, &r).map(|v| v.feasible).unwrap_or(false) {
                    found = Some(r);
                    return true;
                }
            }
        }
        false
    });
    found
}

/// Every way of inserting the neighbors in `own` into the cyclic orders of
/// `base`, keeping `base` as a subsequence.
fn each_insertion(base: &[Vec<VertexId>], own: &[Vec<VertexId>], f: &mut dyn FnMut(&[Vec<VertexId>])) {
    fn at_vertex(list: Vec<VertexId>, rest: &[VertexId], out: &mut Vec<Vec<VertexId>>) {
        let Some((&x, tail)) = rest.split_first() else {
            out.push(list);
            return;
        };
        // Position 0 and position len coincide cyclically.
        for p in 1..=list.len().max(1) {
            let mut l = list.clone();
            l.insert(p.min(l.len()), x);
            at_vertex(l, tail, out);
        }
    }
    let options: Vec<Vec<Vec<VertexId>>> = base
        .iter()
        .zip(own)
        .map(|(b, o)| {
            let mut out = Vec::new();
            at_vertex(b.clone(), o, &mut out);
            out
        })
        .collect();
    let mut pick = vec![0usize; base.len()];
    let mut cur: Vec<Vec<VertexId>> = options.iter().map(|o| o[0].clone()).collect();
    loop {
        f(&cur);
        let mut v = 0;
        loop {
            if v == base.len() {
                return;
            }
            pick[v] += 1;
            if pick[v] < options[v].len() {
                cur[v] = options[v][pick[v]].clone();
                break;
            }
            pick[v] = 0;
            cur[v] = options[v][0].clone();
            v += 1;
        }
    }
}

/// Union rotation: in every gap the first graph's edges, then the second's.
fn combine(shared: &[Vec<VertexId>], r1: &[Vec<VertexId>], r2: &[Vec<VertexId>]) -> RotationSystem {
    let part = |r: &[VertexId], s: &[VertexId]| -> Vec<Vec<VertexId>> {
        let mut out = vec![Vec::new(); s.len()];
        if s.is_empty() {
            return out;
        }
        let start = r.iter().position(|&w| w == s[0]).unwrap();
        let mut gap = 0;
        for k in 1..r.len() {
            let w = r[(start + k) % r.len()];
            if s.contains(&w) {
                gap += 1;
            } else {
                out[gap].push(w);
            }
        }
        out
    };
    let rot = (0..shared.len())
        .map(|v| {
            let (a, b) = (part(&r1[v], &shared[v]), part(&r2[v], &shared[v]));
            let mut l = Vec::new();
            for (i, &s) in shared[v].iter().enumerate() {
                l.push(s);
                l.extend(&a[i]);
                l.extend(&b[i]);
            }
            l
        })
        .collect();
    RotationSystem::new(rot)
}

/// Cycle instance viewed as a sunflower instance, for the rotation search.
pub fn cycle_has_rotation(c: &CycleInstance) -> Option<RotationSystem> {
    exhaustive_rotation_search(&c.to_sunflower())
}
