//! The subcommands. Each returns an exit code or a [`CliError`].

use std::io::Write;

use orthosefe_core::constraints::{check_assignment, check_sefe_orthogonality, rotation_from_assignment, ConstraintError, OracleSearch};
use orthosefe_core::cyclesolver::{
    isolate_degree_four, outerplanarize, reduce_degree, reduce_to_nae, solve_cycle_run, CycleError, CycleRun, TransformationTrace,
};
use orthosefe_core::drawing::{draw, draw_rooted, export_svg, validate_drawing, DrawError, SvgStyle};
use orthosefe_core::gadgets::{generate_random, generate_random_biconnected, generate_theorem3, generate_theorem4, BiconnectedParams, RandomParams};
use orthosefe_core::instance::edge_key;
use orthosefe_core::planarity::is_biconnected;
use orthosefe_core::spqr::{solve_biconnected_with, BiconnectedError, GadgetVariant, SpqrTree};
use orthosefe_core::{CycleInstance, Instance, RotationSystem, SunflowerInstance, Verdict};
use rayon::prelude::*;
use serde::Serialize;

use crate::io;
use crate::{CheckArgs, CliError, Command, DrawArgs, GenerateArgs, OracleArgs, SpqrArgs, TransformArgs, TransformName, ValidateArgs, Variant};
use crate::{FEASIBLE, INFEASIBLE};

macro_rules! say {
    ($out:expr, $($arg:tt)*) => {
        writeln!($out, $($arg)*).map_err(|e| CliError::internal(format!("cannot write report: {e}")))?
    };
}

pub fn dispatch(cmd: &Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        Command::Check(a) => check(a, out),
        Command::Oracle(a) => oracle(a, out),
        Command::Transform(a) => transform(a, out),
        Command::Generate(a) => generate(a, out),
        Command::Draw(a) => draw_cmd(a, out),
        Command::Spqr(a) => spqr(a, out),
        Command::Validate(a) => validate(a, out),
    }
}

fn pool(jobs: u16) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs as usize)
        .build()
        .map_err(|e| CliError::internal(format!("cannot start workers: {e}")))
}

fn verdict_code(feasible: bool) -> i32 {
    if feasible {
        FEASIBLE
    } else {
        INFEASIBLE
    }
}

/// Cycle instances (no isolated vertices) and biconnected ones are the two
/// shapes `check` decides.
enum Shape {
    Cycle(CycleInstance),
    Biconnected(SunflowerInstance),
    Other(String),
}

fn shape(inst: &Instance) -> Shape {
    let cycle = match inst {
        Instance::Cycle(c) => Some(c.clone()),
        Instance::Sunflower(s) => s.as_cycle(),
    };
    if let Some(c) = cycle {
        if c.isolated().is_empty() {
            return Shape::Cycle(c);
        }
        return Shape::Other(String::from("the shared graph is a cycle plus isolated vertices; use `oracle`"));
    }
    let s = inst.to_sunflower();
    if is_biconnected(s.n(), s.shared()) {
        Shape::Biconnected(s)
    } else {
        Shape::Other(String::from("the shared graph is neither a cycle nor biconnected"))
    }
}

fn cycle_error(e: CycleError) -> CliError {
    match e {
        CycleError::WitnessRecheck => CliError::internal(e.to_string()),
        _ => CliError::input(e.to_string()),
    }
}

fn biconnected_error(e: BiconnectedError) -> CliError {
    match e {
        BiconnectedError::Cycle(c) => cycle_error(c),
        BiconnectedError::Assembly(_) => CliError::internal(e.to_string()),
        _ => CliError::input(e.to_string()),
    }
}

fn describe(out: &mut dyn Write, inst: &Instance) -> Result<(), CliError> {
    let s = inst.to_sunflower();
    let exclusive: Vec<String> = (0..s.k()).map(|g| s.exclusive(g).len().to_string()).collect();
    say!(
        out,
        "instance: {} vertices, {} shared edges, k = {}, exclusive edges [{}], max union degree {}",
        s.n(),
        s.shared().len(),
        s.k(),
        exclusive.join(", "),
        s.max_union_degree()
    );
    Ok(())
}

fn report_violations(out: &mut dyn Write, names: &[String], v: &Verdict) -> Result<(), CliError> {
    for x in &v.violations {
        say!(out, "  {}", x.describe(names));
    }
    Ok(())
}

fn report_traces(out: &mut dyn Write, traces: &[TransformationTrace], names: &[String]) -> Result<(), CliError> {
    for t in traces {
        let site: Vec<String> = t.site.iter().map(|&e| edge_key(names, e)).collect();
        say!(out, "  {} at [{}], measure {} -> {}", t.kind.name(), site.join(", "), t.measure.0, t.measure.1);
    }
    Ok(())
}

/// Runs the cycle pipeline and re-checks its witness on the input.
pub fn decide_cycle(c: &CycleInstance) -> Result<CycleRun, CliError> {
    let run = solve_cycle_run(c).map_err(cycle_error)?;
    if let Some(w) = &run.verdict.witness {
        let again = check_assignment(c, w).map_err(|e| CliError::internal(e.to_string()))?;
        if !again.feasible {
            return Err(CliError::internal("witness failed the re-check on the input instance"));
        }
    }
    Ok(run)
}

fn check(a: &CheckArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let inst = io::load_instance(&a.file)?;
    describe(out, &inst)?;
    match shape(&inst) {
        Shape::Cycle(c) => {
            if c.k() != 2 {
                return Err(CliError::input(format!("`check` decides two graphs, found {}; use `oracle`", c.k())));
            }
            say!(out, "route: shared cycle");
            let run = decide_cycle(&c)?;
            say!(out, "transformations: {}", run.traces.len());
            report_traces(out, &run.traces, run.reduced.names())?;
            if let Some(cert) = &run.certificate {
                say!(out, "formula: {} variables, {} clauses", cert.formula.vars, cert.formula.clauses.len());
            }
            say!(out, "verdict: {}", if run.verdict.feasible { "feasible" } else { "infeasible" });
            if let (Some(path), Some(w)) = (&a.emit_witness, &run.verdict.witness) {
                io::write(path, &io::to_json(&io::witness_file(&c, w)))?;
                say!(out, "witness: {}", path.display());
            }
            Ok(verdict_code(run.verdict.feasible))
        }
        Shape::Biconnected(s) => {
            say!(out, "route: biconnected shared graph");
            let (feasible, rotation) = decide_biconnected(out, &s, a.variant, a.jobs.jobs)?;
            say!(out, "verdict: {}", if feasible { "feasible" } else { "infeasible" });
            if let (Some(path), Some(r)) = (&a.emit_witness, &rotation) {
                io::write(path, &io::to_json(&io::rotation_file(s.names(), r)))?;
                say!(out, "witness: {}", path.display());
            }
            Ok(verdict_code(feasible))
        }
        Shape::Other(why) => Err(CliError::input(why)),
    }
}

fn decide_biconnected(
    out: &mut dyn Write,
    s: &SunflowerInstance,
    variant: Variant,
    jobs: u16,
) -> Result<(bool, Option<RotationSystem>), CliError> {
    let variant = match variant {
        Variant::A1x3 => GadgetVariant::A1X3,
        Variant::A1x4 => GadgetVariant::A1X4,
    };
    let workers = pool(jobs)?;
    let run = solve_biconnected_with(s, variant, |cs: &[CycleInstance]| workers.install(|| cs.par_iter().map(solve_cycle_run).collect()))
        .map_err(biconnected_error)?;
    say!(out, "S-node instances: {}", run.snodes.len());
    for (flat, r) in run.flats.iter().zip(&run.runs) {
        say!(
            out,
            "  cycle of {} vertices, {} + {} exclusive edges: {}",
            flat.cycle.order().len(),
            flat.cycle.exclusive(0).len(),
            flat.cycle.exclusive(1).len(),
            if r.verdict.feasible { "feasible" } else { "infeasible" }
        );
    }
    let degrees: Vec<String> = run.degrees.iter().map(|(stage, d)| format!("{stage} {d}")).collect();
    say!(out, "max union degree by stage: {}", degrees.join(", "));
    if let Some(why) = &run.reason {
        say!(out, "reason: {why}");
    }
    if run.feasible {
        let r = run.rotation.ok_or_else(|| CliError::internal("feasible run without a rotation system"))?;
        let again = check_sefe_orthogonality(s, &r).map_err(|e| CliError::internal(e.to_string()))?;
        if !again.feasible {
            return Err(CliError::internal("rotation system failed the re-check on the input instance"));
        }
        return Ok((true, Some(r)));
    }
    Ok((false, None))
}

/// Exhaustive search with the flip space split into `2^b >= jobs` blocks.
/// The block results are merged in order, so the lowest flip vector wins
/// whatever the worker count.
pub fn parallel_oracle(c: &CycleInstance, cap: usize, jobs: u16) -> Result<Verdict, CliError> {
    let search = OracleSearch::new(c, cap).map_err(|e| CliError::input(e.to_string()))?;
    let free = search.component_count().saturating_sub(1);
    let bits = ((jobs as usize).next_power_of_two().trailing_zeros() as usize).min(free);
    let prefixes: Vec<Vec<bool>> = (0..1usize << bits).map(|i| (0..bits).map(|b| (i >> (bits - 1 - b)) & 1 == 1).collect()).collect();
    let workers = pool(jobs)?;
    let found = workers.install(|| prefixes.par_iter().map(|p| search.search(p)).collect::<Vec<_>>());
    let Some(flips) = found.into_iter().flatten().next() else {
        return Ok(Verdict::infeasible());
    };
    let a = search.assignment(&flips);
    let again = check_assignment(c, &a).map_err(|e| CliError::internal(e.to_string()))?;
    if !again.feasible {
        return Err(CliError::internal("oracle witness failed the re-check"));
    }
    Ok(Verdict::feasible(a))
}

fn oracle(a: &OracleArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let inst = io::load_instance(&a.file)?;
    describe(out, &inst)?;
    let c = match &inst {
        Instance::Cycle(c) => c.clone(),
        Instance::Sunflower(s) => s.as_cycle().ok_or_else(|| CliError::input("`oracle` needs a shared cycle (plus isolated vertices)"))?,
    };
    let v = parallel_oracle(&c, a.cap, a.jobs.jobs)?;
    say!(out, "verdict: {}", if v.feasible { "feasible" } else { "infeasible" });
    if let (Some(path), Some(w)) = (&a.emit_witness, &v.witness) {
        io::write(path, &io::to_json(&io::witness_file(&c, w)))?;
        say!(out, "witness: {}", path.display());
    }
    Ok(verdict_code(v.feasible))
}

#[derive(Serialize)]
struct TraceEntry {
    kind: &'static str,
    site: Vec<[String; 2]>,
    roles: Vec<(String, String)>,
    measure: (usize, usize),
}

fn transform(a: &TransformArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let inst = io::load_instance(&a.file)?;
    let c = match &inst {
        Instance::Cycle(c) => c.clone(),
        Instance::Sunflower(s) => s.as_cycle().ok_or_else(|| CliError::input("transformations need a shared cycle"))?,
    };
    describe(out, &inst)?;
    let step = match a.kind {
        TransformName::Outerplanarize => outerplanarize(&c),
        TransformName::ReduceDegree => reduce_degree(&c),
        TransformName::IsolateDegreeFour => isolate_degree_four(&c),
    };
    let (result, traces) = step.map_err(cycle_error)?;
    say!(out, "steps: {}", traces.len());
    report_traces(out, &traces, result.names())?;
    say!(
        out,
        "result: {} vertices, {} + {} exclusive edges, max union degree {}",
        result.n(),
        result.exclusive(0).len(),
        result.exclusive(1).len(),
        result.max_union_degree()
    );
    if let Some(path) = &a.output {
        io::write(path, &io::cycle_json(&result))?;
        say!(out, "instance: {}", path.display());
    }
    if let Some(path) = &a.emit_trace {
        let names = result.names();
        let entries: Vec<TraceEntry> = traces
            .iter()
            .map(|t| TraceEntry {
                kind: t.kind.name(),
                site: t.site.iter().map(|e| [names[e.0].clone(), names[e.1].clone()]).collect(),
                roles: t.roles.iter().map(|(role, v)| (role.clone(), names[*v].clone())).collect(),
                measure: t.measure,
            })
            .collect();
        io::write(path, &io::to_json(&entries))?;
        say!(out, "trace: {}", path.display());
    }
    if let Some(path) = &a.emit_formula {
        match reduce_to_nae(&result).map_err(cycle_error)? {
            Some(cert) => {
                io::write(path, &cert.formula.dimacs())?;
                say!(out, "formula: {} variables, {} clauses -> {}", cert.formula.vars, cert.formula.clauses.len(), path.display());
            }
            None => say!(out, "formula: none, the G2 edges cannot be split into two non-crossing sides"),
        }
    }
    Ok(FEASIBLE)
}

fn env_seed() -> Result<u64, CliError> {
    match std::env::var("ORTHOSEFE_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| CliError::input(format!("ORTHOSEFE_SEED is not an integer: {s:?}"))),
        Err(_) => Ok(0),
    }
}

fn generate(a: &GenerateArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let json = if let Some(path) = &a.nae3sat {
        let (f, _) = io::load_nae(path)?;
        let built = match a.theorem {
            Some(3) => generate_theorem3(&f),
            _ => generate_theorem4(&f),
        };
        let (c, _) = built.map_err(|e| CliError::input(e.to_string()))?;
        io::cycle_json(&c)
    } else if let Some(pairs) = &a.random {
        let (mut n, mut m, mut k, mut cap, mut seed) = (8usize, 4usize, 2usize, 5usize, None);
        for p in pairs {
            let (key, value) = p.split_once('=').ok_or_else(|| CliError::input(format!("expected key=value, got {p:?}")))?;
            let bad = || CliError::input(format!("{key}: not a non-negative integer: {value:?}"));
            match key {
                "n" => n = value.parse().map_err(|_| bad())?,
                "m" => m = value.parse().map_err(|_| bad())?,
                "k" => k = value.parse().map_err(|_| bad())?,
                "cap" => cap = value.parse().map_err(|_| bad())?,
                "seed" => seed = Some(value.parse().map_err(|_| bad())?),
                _ => return Err(CliError::input(format!("unknown key {key:?} (n, m, k, cap, seed)"))),
            }
        }
        if k == 0 {
            return Err(CliError::input("k must be at least 1"));
        }
        let seed = match seed {
            Some(s) => s,
            None => env_seed()?,
        };
        let budgets: Vec<usize> = (0..k).map(|g| m / k + usize::from(g < m % k)).collect();
        let inst = match a.biconnected {
            Some(chords) => generate_random_biconnected(&BiconnectedParams { n, chords, budgets, union_cap: cap, seed }).map(Instance::Sunflower),
            None => generate_random(&RandomParams { n, budgets, union_cap: cap, seed }).map(Instance::Cycle),
        };
        io::instance_json(&inst.map_err(|e| CliError::input(e.to_string()))?)
    } else {
        return Err(CliError::input("give --nae3sat <file> --theorem 3|4, or --random n=.. m=.. seed=.."));
    };
    match &a.output {
        Some(path) => {
            io::write(path, &json)?;
            say!(out, "instance: {}", path.display());
        }
        None => write!(out, "{json}").map_err(|e| CliError::internal(e.to_string()))?,
    }
    Ok(FEASIBLE)
}

/// A rotation system for `inst` from the solvers, `None` when infeasible.
fn computed_rotation(out: &mut dyn Write, inst: &Instance, jobs: u16) -> Result<Option<RotationSystem>, CliError> {
    match shape(inst) {
        Shape::Cycle(c) => {
            let v = if c.k() == 2 { decide_cycle(&c)?.verdict } else { parallel_oracle(&c, orthosefe_core::constraints::DEFAULT_ORACLE_CAP, jobs)? };
            Ok(v.witness.map(|w| rotation_from_assignment(&c, &w)))
        }
        Shape::Biconnected(s) => Ok(decide_biconnected(out, &s, Variant::A1x3, jobs)?.1),
        Shape::Other(why) => Err(CliError::input(why)),
    }
}

fn find_root(s: &SunflowerInstance, root: &str) -> Result<(usize, usize), CliError> {
    let names = s.names();
    for e in s.shared() {
        for (a, b) in [(e.0, e.1), (e.1, e.0)] {
            if format!("{}-{}", names[a], names[b]) == root {
                return Ok((a, b));
            }
        }
    }
    Err(CliError::input(format!("root {root:?} is not a shared edge `u-v`")))
}

fn draw_cmd(a: &DrawArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let inst = io::load_instance(&a.file)?;
    describe(out, &inst)?;
    let s = inst.to_sunflower();
    let r = match &a.embedding {
        Some(path) => io::rotation_from(s.names(), &io::load_rotation(path)?)?,
        None => match computed_rotation(out, &inst, a.jobs.jobs)? {
            Some(r) => r,
            None => {
                say!(out, "verdict: infeasible, nothing to draw");
                return Ok(INFEASIBLE);
            }
        },
    };
    let drawn = match &a.root {
        Some(root) => {
            let root = find_root(&s, root)?;
            // draw_rooted trusts its rotation system.
            let v = check_sefe_orthogonality(&s, &r).map_err(|e| CliError::input(e.to_string()))?;
            if !v.feasible {
                say!(out, "embedding breaks the orthogonality rules:");
                report_violations(out, s.names(), &v)?;
                return Ok(INFEASIBLE);
            }
            draw_rooted(&s, &r, root)
        }
        None => draw(&s, &r),
    };
    let d = match drawn {
        Ok(d) => d,
        Err(DrawError::Orthogonality(why)) => {
            say!(out, "embedding breaks the orthogonality rules: {why}");
            return Ok(INFEASIBLE);
        }
        Err(e @ DrawError::NoLayout(_)) => return Err(CliError::internal(e.to_string())),
        Err(e) => return Err(CliError::input(e.to_string())),
    };
    let report = validate_drawing(&s, &d);
    if !report.valid {
        for p in &report.problems {
            say!(out, "  {}", p.describe(s.names()));
        }
        return Err(CliError::internal("the drawing failed validation"));
    }
    let (w, h) = d.extent();
    let total: usize = d.paths.iter().map(|p| p.bends()).sum();
    say!(out, "grid: {w} x {h}");
    say!(out, "bends: {total} total, {} at most per edge", report.max_bends);
    if let Some(root) = d.root {
        let bends = d.path(root).map_or(0, |p| p.bends());
        say!(out, "root: {} with {bends} bends", edge_key(s.names(), root));
    }
    if let Some(path) = &a.output {
        io::write(path, &export_svg(&d, s.names(), &SvgStyle::default()))?;
        say!(out, "svg: {}", path.display());
    }
    Ok(FEASIBLE)
}

fn spqr(a: &SpqrArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let inst = io::load_instance(&a.file)?;
    let s = inst.to_sunflower();
    let tree = SpqrTree::build(s.n(), s.shared()).map_err(|e| CliError::input(e.to_string()))?;
    let (sn, pn, rn) = tree.census();
    say!(out, "nodes: {} (S {sn}, P {pn}, R {rn})", tree.nodes.len());
    write!(out, "{}", tree.dump(s.names())).map_err(|e| CliError::internal(e.to_string()))?;
    Ok(FEASIBLE)
}

fn validate(a: &ValidateArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let inst = io::load_instance(&a.file)?;
    let names = inst.names().to_vec();
    let verdict = if let Some(path) = &a.witness {
        let c = match &inst {
            Instance::Cycle(c) => c.clone(),
            Instance::Sunflower(s) => s.as_cycle().ok_or_else(|| CliError::input("side assignments need a shared cycle; pass --embedding"))?,
        };
        let sides = io::assignment_from(&c, &io::load_witness(path)?)?;
        check_assignment(&c, &sides).map_err(|e| CliError::input(e.to_string()))?
    } else if let Some(path) = &a.embedding {
        let s = inst.to_sunflower();
        let r = io::rotation_from(&names, &io::load_rotation(path)?)?;
        match check_sefe_orthogonality(&s, &r) {
            Ok(v) => v,
            Err(e @ (ConstraintError::RotationMismatch | ConstraintError::NotSefe(_))) => {
                say!(out, "invalid: {e}");
                return Ok(INFEASIBLE);
            }
            Err(e) => return Err(CliError::input(e.to_string())),
        }
    } else {
        return Err(CliError::input("give --witness or --embedding"));
    };
    if verdict.feasible {
        say!(out, "valid");
    } else {
        say!(out, "invalid:");
        report_violations(out, &names, &verdict)?;
    }
    Ok(verdict_code(verdict.feasible))
}
