//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero when any criterion fails.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use orthosefe_core::constraints::{check_assignment, check_sefe_orthogonality, oracle_with_cap, rotation_from_assignment};
use orthosefe_core::cyclesolver::{
    alternating_pairs, alternation_graph, crowded_vertices, degree_four_vertices, isolate_degree_four, outerplanarize, reduce_degree,
    solve_cycle, CycleError, TransformationTrace,
};
use orthosefe_core::drawing::{draw, OrthogonalDrawing};
use orthosefe_core::gadgets::{generate_random, generate_random_biconnected, generate_theorem3, generate_theorem4, BiconnectedParams, NaeInput, RandomParams};
use orthosefe_core::spqr::{extract_snode_instances, normalize_attachments, solve_biconnected, Extraction, GadgetVariant, SpqrTree};
use orthosefe_core::{nae_eval, nae_solve, CycleInstance, Edge, RawInstance, RotationSystem, Side, SideAssignment, SunflowerInstance};
use orthosefe_oracles::{cycle_has_rotation, exhaustive_rotation_search, nae_truth_table};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn feasible(c: &CycleInstance) -> bool {
    oracle_with_cap(c, usize::MAX).expect("oracle").feasible
}

fn within(t: Instant, limit: u64) -> Result<Duration, String> {
    let d = t.elapsed();
    ensure(d < Duration::from_secs(limit), || format!("took {:.1}s, limit {limit}s", d.as_secs_f64()))?;
    Ok(d)
}

fn names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

// Criterion 1 ----------------------------------------------------------------

/// Every chord set of size at most `max` on an `n`-cycle, two graphs, one
/// representative per orbit of rotations, reflections and graph swap.
fn cycle_family(n: usize, max: usize) -> Vec<CycleInstance> {
    let chords: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 2..n).map(move |b| (a, b))).filter(|&(a, b)| !(a == 0 && b == n - 1)).collect();
    let mut out = Vec::new();
    let mut pick: Vec<(usize, usize, usize)> = Vec::new();
    fn images(n: usize, set: &[(usize, usize, usize)]) -> impl Iterator<Item = Vec<(usize, usize, usize)>> + '_ {
        (0..n).flat_map(move |r| {
            [false, true].into_iter().flat_map(move |mirror| {
                [false, true].into_iter().map(move |swap| {
                    let map = |v: usize| if mirror { (n - v + r) % n } else { (v + r) % n };
                    let mut img: Vec<(usize, usize, usize)> = set
                        .iter()
                        .map(|&(a, b, g)| {
                            let (x, y) = (map(a), map(b));
                            (x.min(y), x.max(y), if swap { 1 - g } else { g })
                        })
                        .collect();
                    img.sort_unstable();
                    img
                })
            })
        })
    }
    fn rec(
        n: usize,
        max: usize,
        chords: &[(usize, usize)],
        from: usize,
        pick: &mut Vec<(usize, usize, usize)>,
        out: &mut Vec<CycleInstance>,
    ) {
        let mut sorted = pick.clone();
        sorted.sort_unstable();
        if images(n, pick).all(|img| sorted <= img) {
            let mut ex = vec![Vec::new(), Vec::new()];
            for &(a, b, g) in pick.iter() {
                ex[g].push(Edge::new(a, b));
            }
            // Sets breaking the degree bound of 4 per graph are not instances.
            if let Ok(c) = CycleInstance::new(names(n), (0..n).collect(), Vec::new(), ex) {
                out.push(c);
            }
        }
        if pick.len() == max {
            return;
        }
        for i in from..chords.len() {
            for g in 0..2 {
                pick.push((chords[i].0, chords[i].1, g));
                rec(n, max, chords, i + 1, pick, out);
                pick.pop();
            }
        }
    }
    rec(n, max, &chords, 0, &mut pick, &mut out);
    out
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let (mut count, mut yes) = (0, 0);
    for n in 4..=8 {
        for c in cycle_family(n, 5) {
            let v = oracle_with_cap(&c, usize::MAX).map_err(|e| e.to_string())?;
            let r = cycle_has_rotation(&c);
            ensure(v.feasible == r.is_some(), || format!("oracle {} vs rotation search {}: {:?}", v.feasible, r.is_some(), c.to_raw()))?;
            if let Some(w) = &v.witness {
                ensure(check_assignment(&c, w).map(|x| x.feasible) == Ok(true), || format!("oracle witness rejected: {:?}", c.to_raw()))?;
            }
            count += 1;
            yes += v.feasible as usize;
        }
    }
    let d = within(t, 60)?;
    Ok(format!("{count} instances up to symmetry, {yes} feasible, {:.1}s", d.as_secs_f64()))
}

// Criterion 2 ----------------------------------------------------------------

fn cycle_corpus(count: usize, seed0: u64) -> Vec<CycleInstance> {
    let mut out = Vec::new();
    let mut seed = seed0;
    while out.len() < count {
        seed += 1;
        let p = RandomParams {
            n: 6 + (seed % 7) as usize,
            budgets: vec![(seed / 7 % 8) as usize, (seed / 56 % 7) as usize],
            union_cap: 5,
            seed,
        };
        if let Ok(c) = generate_random(&p) {
            if c.exclusive_count() <= 14 {
                out.push(c);
            }
        }
    }
    out
}

fn criterion_2(feasible_out: &mut Vec<(CycleInstance, SideAssignment)>) -> Outcome {
    let t = Instant::now();
    let corpus = cycle_corpus(300, 1000);
    for c in &corpus {
        ensure(c.n() <= 12 && c.max_union_degree() <= 5, || format!("corpus instance out of range: {:?}", c.to_raw()))?;
        let v = solve_cycle(c).map_err(|e| format!("{e}: {:?}", c.to_raw()))?;
        let want = feasible(c);
        ensure(v.feasible == want, || format!("solve_cycle {} vs oracle {want}: {:?}", v.feasible, c.to_raw()))?;
        if let Some(w) = v.witness {
            ensure(check_assignment(c, &w).map(|x| x.feasible) == Ok(true), || format!("witness rejected: {:?}", c.to_raw()))?;
            feasible_out.push((c.clone(), w));
        }
    }
    let d = within(t, 120)?;
    Ok(format!("{} instances, {} feasible, {:.1}s", corpus.len(), feasible_out.len(), d.as_secs_f64()))
}

// Criterion 3 ----------------------------------------------------------------

type Transform = fn(&CycleInstance) -> Result<(CycleInstance, Vec<TransformationTrace>), CycleError>;

fn transform_family(name: &str, f: Transform, seed0: u64, keep: impl Fn(&CycleInstance) -> bool) -> Outcome {
    let (mut applied, mut steps, mut refused, mut yes) = (0, 0, 0, 0);
    let mut seed = seed0;
    while applied < 100 {
        seed += 1;
        ensure(seed < seed0 + 2_000_000, || format!("{name}: only {applied} applicable instances found"))?;
        let p = RandomParams { n: 6 + (seed % 7) as usize, budgets: vec![(seed / 7 % 8) as usize, (seed / 56 % 7) as usize], union_cap: 5, seed };
        let Ok(c) = generate_random(&p) else { continue };
        if c.exclusive_count() > 10 || !keep(&c) {
            continue;
        }
        let (out, traces) = match f(&c) {
            Ok(x) => x,
            // Outside the transformation's precondition.
            Err(CycleError::Boundary(_)) => {
                refused += 1;
                continue;
            }
            Err(e) => return Err(format!("{name}: {e}: {:?}", c.to_raw())),
        };
        ensure(!traces.is_empty(), || format!("{name}: no step on an applicable instance {:?}", c.to_raw()))?;
        // Isolation finishes with outerplanarization steps, which have their own measure.
        for w in traces.windows(2).filter(|w| w[0].kind == w[1].kind) {
            ensure(w[1].measure.0 == w[0].measure.1, || format!("{name}: measures do not chain"))?;
        }
        for tr in &traces {
            ensure(tr.measure.1 < tr.measure.0, || format!("{name}: measure {:?} does not decrease", tr.measure))?;
        }
        let before = feasible(&c);
        ensure(before == feasible(&out), || format!("{name}: feasibility changed on {:?}", c.to_raw()))?;
        applied += 1;
        steps += traces.len();
        yes += before as usize;
    }
    Ok(format!("{name} {applied} ({steps} steps, {yes} feasible, {refused} refused)"))
}

fn criterion_3() -> Outcome {
    let a = transform_family("outerplanarize", outerplanarize, 9000, |c| {
        alternating_pairs(c, 0) > 0 && alternation_graph(c, 0).bipartite && degree_four_vertices(c, 0).is_empty()
    })?;
    let b = transform_family("reduce-degree", reduce_degree, 5000, |c| {
        !degree_four_vertices(c, 0).is_empty() && c.order().iter().all(|&v| c.exclusive_degree(v, 0) < 2 || c.exclusive_degree(v, 1) < 2)
    })?;
    let c = transform_family("isolate-degree-four", isolate_degree_four, 13000, |c| {
        !crowded_vertices(c).is_empty() && alternation_graph(c, 0).bipartite
    })?;
    Ok(format!("{a}; {b}; {c}"))
}

// Criterion 4 ----------------------------------------------------------------

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Formulas over `n` variables with `m` clauses, one per orbit of variable
/// renaming and clause reordering.
fn formulas(n: usize, m: usize) -> Vec<Vec<[usize; 3]>> {
    let triples: Vec<[usize; 3]> =
        (0..n).flat_map(|a| (a + 1..n).flat_map(move |b| (b + 1..n).map(move |c| [a, b, c]))).collect();
    let perms = permutations(n);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut idx = vec![0usize; m];
    loop {
        let f: Vec<[usize; 3]> = idx.iter().map(|&i| triples[i]).collect();
        {
            let canon = perms
                .iter()
                .map(|p| {
                    let mut g: Vec<[usize; 3]> = f
                        .iter()
                        .map(|c| {
                            let mut d = c.map(|v| p[v]);
                            d.sort_unstable();
                            d
                        })
                        .collect();
                    g.sort_unstable();
                    g
                })
                .min()
                .expect("nonempty");
            if seen.insert(canon.clone()) {
                out.push(canon);
            }
        }
        // Next non-decreasing index vector.
        let mut k = m;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if idx[k] + 1 < triples.len() {
                idx[k] += 1;
                for j in k + 1..m {
                    idx[j] = idx[k];
                }
                break;
            }
        }
    }
}

fn criterion_4() -> Outcome {
    let mut list: Vec<NaeInput> = Vec::new();
    for n in 3..=5 {
        for m in 1..=3 {
            for f in formulas(n, m) {
                list.push(NaeInput::new(n, f).map_err(|e| e.to_string())?);
            }
        }
    }
    let small = list.len();
    // The lines of the Fano plane: the smallest NAE-unsatisfiable formula.
    let fano = vec![[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 3, 5], [1, 4, 6], [2, 3, 6], [2, 4, 5]];
    list.push(NaeInput::new(7, fano).map_err(|e| e.to_string())?);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    while list.len() < small + 51 {
        let n = rng.random_range(6..=7);
        let m = rng.random_range(4..=12);
        let clauses = (0..m)
            .map(|_| {
                let mut c = [0usize; 3];
                let mut k = 0;
                while k < 3 {
                    let v = rng.random_range(0..n);
                    if !c[..k].contains(&v) {
                        c[k] = v;
                        k += 1;
                    }
                }
                c
            })
            .collect();
        if let Ok(f) = NaeInput::new(n, clauses) {
            list.push(f);
        }
    }
    let mut sat = 0;
    for f in &list {
        let formula = f.to_formula();
        let want = nae_truth_table(&formula);
        ensure(nae_solve(&formula).is_some() == want, || format!("nae_solve disagrees with the truth table on {:?}", f.clauses))?;
        sat += want as usize;
        for (k, built) in [(3, generate_theorem3(f)), (2, generate_theorem4(f))] {
            let (c, map) = built.map_err(|e| e.to_string())?;
            ensure(c.k() == k, || format!("construction has {} graphs, expected {k}", c.k()))?;
            let v = oracle_with_cap(&c, usize::MAX).map_err(|e| e.to_string())?;
            ensure(v.feasible == want, || format!("k={k}: instance feasible {} but formula NAE-satisfiable {want}: {:?}", v.feasible, f.clauses))?;
            if let Some(w) = &v.witness {
                ensure(nae_eval(&formula, &map.decode(&c, w)), || format!("k={k}: truth edges decode to a non-solution of {:?}", f.clauses))?;
            }
        }
    }
    Ok(format!("{small} small formulas up to symmetry + {} larger, {sat} NAE-satisfiable, k=3 and k=2 agree", list.len() - small))
}

// Criterion 5 ----------------------------------------------------------------

fn data(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn exit_code(args: &[&str]) -> Option<i32> {
    Command::new(env!("CARGO_BIN_EXE_orthosefe")).args(args).output().ok()?.status.code()
}

fn criterion_5() -> Outcome {
    let path = data("blocked_chord.json");
    let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    let inst = orthosefe::io::parse_instance(&text).map_err(|e| e.message)?;
    let orthosefe_core::Instance::Cycle(c) = inst else { return Err(String::from("fixture is not a cycle instance")) };
    ensure(c.n() == 14 && c.k() == 2, || String::from("fixture is not a two-graph 14-cycle"))?;
    let solved = solve_cycle(&c).map_err(|e| e.to_string())?;
    ensure(!solved.feasible, || String::from("solve_cycle reports feasible"))?;
    ensure(!feasible(&c), || String::from("oracle reports feasible"))?;
    ensure(cycle_has_rotation(&c).is_none(), || String::from("rotation search finds an orthogonal embedding"))?;
    // A SEFE: every graph's chords split by the two-coloring of its
    // alternation graph, no orthogonality requirement.
    let sides = (0..2)
        .map(|g| {
            let h = alternation_graph(&c, g);
            (0..c.exclusive(g).len()).map(|i| Side::from_left(!h.color[i])).collect()
        })
        .collect();
    let r = rotation_from_assignment(&c, &SideAssignment { sides });
    let s = c.to_sunflower();
    for g in 0..2 {
        let keep: Vec<Edge> = s.shared().iter().chain(s.exclusive(g)).copied().collect();
        ensure(r.restrict(|e| keep.contains(&e)).is_planar(), || format!("G{} is not planar in the exhibited SEFE", g + 1))?;
    }
    let v = check_sefe_orthogonality(&s, &r).map_err(|e| format!("not a SEFE: {e}"))?;
    ensure(!v.feasible, || String::from("the exhibited SEFE is orthogonal"))?;
    // The blue chord alone is the obstruction.
    let mut without = c.to_raw();
    without.exclusive[1].clear();
    let without = match RawInstance::build(&without).map_err(|e| e.to_string())? {
        orthosefe_core::Instance::Cycle(c) => c,
        _ => return Err(String::from("shape changed")),
    };
    ensure(feasible(&without), || String::from("still infeasible without the G2 chord"))?;
    let p = path.to_str().expect("utf-8 path");
    ensure(exit_code(&["check", p]) == Some(1), || String::from("`check` does not exit 1"))?;
    ensure(exit_code(&["oracle", p]) == Some(1), || String::from("`oracle` does not exit 1"))?;
    Ok(format!("infeasible by solve_cycle, oracle and CLI; SEFE exhibited ({} violations)", v.violations.len()))
}

// Criterion 6 ----------------------------------------------------------------

fn biconnected_corpus(count: usize, seed0: u64) -> Vec<SunflowerInstance> {
    let mut out = Vec::new();
    let mut seed = seed0;
    while out.len() < count {
        seed += 1;
        let p = BiconnectedParams {
            n: 5 + (seed % 8) as usize,
            chords: (seed / 8 % 3) as usize,
            budgets: vec![1 + (seed / 24 % 3) as usize, (seed / 72 % 4) as usize],
            union_cap: 5,
            seed,
        };
        if let Ok(inst) = generate_random_biconnected(&p) {
            out.push(inst);
        }
    }
    out
}

fn degree(s: &SunflowerInstance, v: usize) -> usize {
    s.union_degree(v)
}

fn criterion_6(feasible_out: &mut Vec<(SunflowerInstance, RotationSystem)>) -> Outcome {
    let t = Instant::now();
    let corpus = biconnected_corpus(100, 0);
    let mut gadget_peaks = 0;
    for inst in &corpus {
        ensure(inst.n() <= 14 && inst.max_union_degree() <= 5, || format!("corpus instance out of range: {:?}", inst.to_raw()))?;
        let want = exhaustive_rotation_search(inst).is_some();
        let run = solve_biconnected(inst).map_err(|e| format!("{e}: {:?}", inst.to_raw()))?;
        ensure(run.feasible == want, || format!("solve_biconnected {} vs exhaustive {want}: {:?}", run.feasible, inst.to_raw()))?;
        for (stage, d) in &run.degrees {
            ensure(*d <= 5, || format!("stage {stage} has max union degree {d}: {:?}", inst.to_raw()))?;
        }
        // Per vertex, the degree of an input vertex never grows.
        if let Some(norm) = &run.normalized {
            let ni = &norm.instance;
            for v in 0..inst.n().min(ni.n()) {
                ensure(degree(ni, v) <= degree(inst, v), || format!("normalization raises the degree of {}", inst.names()[v]))?;
            }
            for flat in &run.flats {
                let fs = flat.cycle.to_sunflower();
                for (x, o) in flat.origin.iter().enumerate() {
                    match o {
                        Some(v) => ensure(degree(&fs, x) <= degree(ni, *v), || format!("flattening raises the degree of {}", ni.names()[*v]))?,
                        None => gadget_peaks += (degree(&fs, x) > inst.max_union_degree()) as usize,
                    }
                }
            }
        }
        if let Some(r) = run.rotation {
            ensure(check_sefe_orthogonality(inst, &r).map(|v| v.feasible) == Ok(true), || String::from("rotation rejected"))?;
            feasible_out.push((inst.clone(), r));
        }
    }
    let d = t.elapsed();
    Ok(format!(
        "{} instances, {} feasible, degrees within 5 at every stage, {gadget_peaks} gadget vertices above the input maximum, {:.1}s",
        corpus.len(),
        feasible_out.len(),
        d.as_secs_f64()
    ))
}

// Criterion 7 ----------------------------------------------------------------

fn drawing_ok(inst: &SunflowerInstance, d: &OrthogonalDrawing) -> Result<(), String> {
    let report = orthosefe_core::drawing::validate_drawing(inst, d);
    let problems: Vec<String> = report.problems.iter().map(|p| p.describe(inst.names())).collect();
    ensure(report.valid, || format!("invalid drawing: {}", problems.join("; ")))?;
    ensure(report.max_bends <= 3, || format!("{} bends on one edge", report.max_bends))?;
    ensure(report.crossings.iter().all(|&c| c == 0), || format!("crossings {:?}", report.crossings))?;
    let root = d.root.ok_or_else(|| String::from("no root edge"))?;
    let bends = d.path(root).map(|p| p.bends()).unwrap_or(usize::MAX);
    ensure(bends == 3, || format!("root edge has {bends} bends"))
}

fn criterion_7(cycles: &[(CycleInstance, SideAssignment)], biconnected: &[(SunflowerInstance, RotationSystem)]) -> Outcome {
    let mut max_bends = 0;
    for (c, w) in cycles {
        let s = c.to_sunflower();
        let d = draw(&s, &rotation_from_assignment(c, w)).map_err(|e| format!("{e}: {:?}", c.to_raw()))?;
        drawing_ok(&s, &d).map_err(|e| format!("{e}: {:?}", c.to_raw()))?;
        max_bends = max_bends.max(d.max_bends());
    }
    for (s, r) in biconnected {
        let d = draw(s, r).map_err(|e| format!("{e}: {:?}", s.to_raw()))?;
        drawing_ok(s, &d).map_err(|e| format!("{e}: {:?}", s.to_raw()))?;
        max_bends = max_bends.max(d.max_bends());
    }
    Ok(format!("{} + {} drawings valid, root 3 bends, max {max_bends} bends per edge", cycles.len(), biconnected.len()))
}

// Criterion 8 ----------------------------------------------------------------

fn sunflower(n: usize, shared: &[(usize, usize)], g1: &[(usize, usize)], g2: &[(usize, usize)]) -> SunflowerInstance {
    let e = |l: &[(usize, usize)]| l.iter().map(|&(a, b)| Edge::new(a, b)).collect::<Vec<_>>();
    SunflowerInstance::new(names(n), e(shared), vec![e(g1), e(g2)]).expect("hand-built instance")
}

/// Small biconnected instances whose SPQR-trees have S-nodes with
/// expanded virtual edges.
fn hand_built() -> Vec<SunflowerInstance> {
    // Three paths between 0 and 1.
    let theta = [(0, 2), (2, 3), (3, 1), (0, 4), (4, 1), (0, 5), (5, 6), (6, 1)];
    // A subdivided K4 on 0..4.
    let k4 = [(0, 4), (4, 5), (5, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 6), (6, 3)];
    // A hexagon with a two-edge handle between 0 and 3.
    let handle = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 6), (6, 3)];
    vec![
        sunflower(7, &theta, &[(2, 4)], &[(4, 6)]),
        sunflower(7, &theta, &[(2, 4), (4, 6)], &[(3, 4)]),
        sunflower(7, &theta, &[(2, 5)], &[(3, 6)]),
        sunflower(7, &theta, &[(2, 4), (3, 4)], &[(5, 4)]),
        sunflower(7, &k4, &[(4, 6)], &[(5, 6)]),
        sunflower(7, &k4, &[(4, 2), (5, 3)], &[(6, 4)]),
        sunflower(7, &handle, &[(1, 6), (2, 6)], &[(4, 6)]),
        sunflower(7, &handle, &[(1, 5)], &[(2, 4), (6, 1)]),
        sunflower(7, &handle, &[(1, 6)], &[(2, 6), (4, 6)]),
        sunflower(7, &handle, &[(1, 4), (2, 6)], &[(5, 6)]),
    ]
}

fn criterion_8() -> Outcome {
    let (mut cases, mut x4_agree, mut infeasible, mut expanded) = (0, 0, 0, 0);
    let mut x4_misses = Vec::new();
    for inst in hand_built().into_iter().chain(biconnected_corpus(150, 5000)) {
        let Ok(alternatives) = normalize_attachments(&inst) else { continue };
        for norm in alternatives {
            let ni = &norm.instance;
            let tree = SpqrTree::build(ni.n(), ni.shared()).map_err(|e| e.to_string())?;
            let Extraction::Instances(list) = extract_snode_instances(ni, &tree) else { continue };
            for sn in list {
                let (sf, _) = sn.to_sunflower(ni).map_err(|e| e.to_string())?;
                if sf.n() > 12 {
                    continue;
                }
                let want = exhaustive_rotation_search(&sf).is_some();
                let flat = |v| sn.flatten(ni, v).map(|f| feasible(&f.cycle)).map_err(|e| e.to_string());
                let (x3, x4) = (flat(GadgetVariant::A1X3)?, flat(GadgetVariant::A1X4)?);
                ensure(x3 == want, || format!("(a1,x3) gives {x3}, exhaustive {want}: {:?}", sf.to_raw()))?;
                cases += 1;
                infeasible += !want as usize;
                expanded += !sn.expanded.is_empty() as usize;
                if x4 == want {
                    x4_agree += 1;
                } else if x4_misses.is_empty() {
                    x4_misses.push(format!("{:?}", sf.to_raw()));
                }
            }
        }
    }
    ensure(expanded > 0 && infeasible > 0, || String::from("the S-node cases do not exercise the gadget"))?;
    Ok(format!(
        "(a1,x3) agrees on all {cases} S-node cases ({expanded} with gadgets, {infeasible} infeasible); (a1,x4) agrees on {x4_agree}{}",
        if x4_misses.is_empty() { String::new() } else { format!(", first disagreement {}", x4_misses[0]) }
    ))
}

fn main() {
    let mut cycles = Vec::new();
    let mut biconnected = Vec::new();
    let mut failed = 0;
    let mut report = |id: u32, name: &str, r: Outcome| match r {
        Ok(detail) => println!("criterion {id} ({name}): PASS - {detail}"),
        Err(why) => {
            failed += 1;
            println!("criterion {id} ({name}): FAIL - {why}");
        }
    };
    report(1, "characterization oracle", criterion_1());
    report(2, "cycle pipeline vs oracle", criterion_2(&mut cycles));
    report(3, "transformations", criterion_3());
    report(4, "hardness constructions", criterion_4());
    report(5, "SEFE without OrthoSEFE", criterion_5());
    report(6, "biconnected solver", criterion_6(&mut biconnected));
    report(7, "drawings", criterion_7(&cycles, &biconnected));
    report(8, "S-node gadget variants", criterion_8());
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
