use std::path::{Path, PathBuf};
use std::process::Command;

use orthosefe::io::{self, InstanceFile};
use orthosefe_core::constraints::check_assignment;
use orthosefe_core::gadgets::{generate_random, generate_random_biconnected, BiconnectedParams, RandomParams};
use orthosefe_core::{CycleInstance, Instance};
use proptest::prelude::*;
use tempfile::TempDir;

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut argv = vec!["orthosefe"];
    argv.extend_from_slice(args);
    let code = orthosefe::run(argv, &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn write_instance(dir: &TempDir, name: &str, json: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, json).unwrap();
    path
}

fn cycles(count: usize, seed0: u64) -> Vec<CycleInstance> {
    let mut out = Vec::new();
    let mut seed = seed0;
    while out.len() < count {
        seed += 1;
        let params = RandomParams { n: 6 + (seed % 6) as usize, budgets: vec![(seed / 6 % 8) as usize, (seed / 48 % 7) as usize], union_cap: 5, seed };
        if let Ok(c) = generate_random(&params) {
            out.push(c);
        }
    }
    out
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

#[test]
fn exit_codes_of_the_binary() {
    let bin = env!("CARGO_BIN_EXE_orthosefe");
    let dir = TempDir::new().unwrap();
    let empty = write_instance(&dir, "empty.json", r#"{"k":2,"vertices":["a","b","c"],"cycle":["a","b","c"],"exclusive":[[],[]]}"#);
    let bad = write_instance(&dir, "bad.json", r#"{"k":2,"vertices":["a"],"#);
    let unknown = write_instance(&dir, "unknown.json", r#"{"k":1,"vertices":["a","b","c"],"cycle":["a","b","x"],"exclusive":[[]]}"#);
    let code = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(code(&["oracle", p(&empty)]), Some(0));
    assert_eq!(code(&["check", p(&empty)]), Some(0));
    assert_eq!(code(&["check", p(&data("blocked_chord.json"))]), Some(1));
    assert_eq!(code(&["check", p(&bad)]), Some(2));
    assert_eq!(code(&["check", p(&unknown)]), Some(2));
    assert_eq!(code(&["check", "/nonexistent/file.json"]), Some(2));
    assert_eq!(code(&["frobnicate"]), Some(2));
    assert_eq!(code(&["check"]), Some(2));
    assert_eq!(code(&["--help"]), Some(0));
}

#[test]
fn witness_round_trip_and_agreement_with_the_oracle() {
    let dir = TempDir::new().unwrap();
    let (mut yes, mut no) = (0, 0);
    for (i, c) in cycles(80, 0).iter().enumerate() {
        let inst = write_instance(&dir, &format!("i{i}.json"), &io::cycle_json(c));
        let w = dir.path().join(format!("w{i}.json"));
        let (checked, report) = run(&["check", p(&inst), "--emit-witness", p(&w)]);
        let (oracle, _) = run(&["oracle", p(&inst)]);
        assert_eq!(checked, oracle, "{report}");
        match checked {
            0 => {
                yes += 1;
                assert_eq!(run(&["validate", p(&inst), "--witness", p(&w)]).0, 0);
                // Flip one side; validate must agree with the checker.
                let mut file = io::load_witness(&w).unwrap();
                if let Some((_, side)) = file.assignment.iter_mut().next() {
                    *side = if side == "L" { "R".into() } else { "L".into() };
                    let flipped = io::assignment_from(c, &file).unwrap();
                    let want = check_assignment(c, &flipped).unwrap().feasible;
                    std::fs::write(&w, io::to_json(&file)).unwrap();
                    assert_eq!(run(&["validate", p(&inst), "--witness", p(&w)]).0, if want { 0 } else { 1 });
                }
            }
            1 => {
                no += 1;
                assert!(!w.exists());
            }
            other => panic!("exit {other}: {report}"),
        }
    }
    assert!(yes > 10 && no > 10, "{yes} feasible, {no} infeasible");
}

#[test]
fn oracle_witness_does_not_depend_on_jobs() {
    let dir = TempDir::new().unwrap();
    for (i, c) in cycles(30, 500).iter().enumerate() {
        let inst = write_instance(&dir, &format!("i{i}.json"), &io::cycle_json(c));
        let mut found = Vec::new();
        for jobs in ["1", "3", "8"] {
            let w = dir.path().join(format!("w{i}-{jobs}.json"));
            let (code, _) = run(&["oracle", p(&inst), "--jobs", jobs, "--emit-witness", p(&w)]);
            found.push((code, std::fs::read_to_string(&w).ok()));
        }
        assert!(found.windows(2).all(|x| x[0] == x[1]), "{:?}", c.to_raw());
    }
}

#[test]
fn biconnected_check_emits_a_valid_rotation() {
    let dir = TempDir::new().unwrap();
    let mut feasible = 0;
    for seed in 1..40u64 {
        let params = BiconnectedParams { n: 6 + (seed % 5) as usize, chords: 1, budgets: vec![1 + (seed % 2) as usize, 1], union_cap: 5, seed };
        let Ok(s) = generate_random_biconnected(&params) else { continue };
        let inst = write_instance(&dir, "b.json", &io::instance_json(&Instance::Sunflower(s)));
        let w = dir.path().join("r.json");
        let _ = std::fs::remove_file(&w);
        let (code, report) = run(&["check", p(&inst), "--emit-witness", p(&w), "--jobs", "2"]);
        assert!(code <= 1, "{report}");
        assert_eq!(run(&["check", p(&inst)]).0, code);
        if code == 0 {
            feasible += 1;
            assert_eq!(run(&["validate", p(&inst), "--embedding", p(&w)]).0, 0);
            let svg = dir.path().join("d.svg");
            let (drawn, report) = run(&["draw", p(&inst), "--embedding", p(&w), "-o", p(&svg)]);
            assert_eq!(drawn, 0, "{report}");
            assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
        }
        let (code, report) = run(&["spqr", p(&inst)]);
        assert_eq!(code, 0);
        assert!(report.starts_with("nodes: "));
    }
    assert!(feasible > 3);
}

#[test]
fn generate_uses_the_seed_from_the_environment() {
    let bin = env!("CARGO_BIN_EXE_orthosefe");
    let explicit = Command::new(bin).args(["generate", "--random", "n=9", "m=5", "seed=17"]).output().unwrap();
    let from_env = Command::new(bin).args(["generate", "--random", "n=9", "m=5"]).env("ORTHOSEFE_SEED", "17").output().unwrap();
    let other = Command::new(bin).args(["generate", "--random", "n=9", "m=5"]).env("ORTHOSEFE_SEED", "18").output().unwrap();
    assert_eq!(explicit.status.code(), Some(0));
    assert_eq!(explicit.stdout, from_env.stdout);
    assert_ne!(explicit.stdout, other.stdout);
    let bad = Command::new(bin).args(["generate", "--random", "n=9"]).env("ORTHOSEFE_SEED", "x").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let inst = io::parse_instance(std::str::from_utf8(&explicit.stdout).unwrap()).unwrap();
    assert_eq!(inst.names().len(), 9);
}

#[test]
fn generated_hardness_instances_feed_the_oracle() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("f.txt");
    std::fs::write(&f, "# one clause per line\na b c\n\nb c d\n").unwrap();
    for (theorem, graphs) in [("3", 3), ("4", 2)] {
        let out = dir.path().join(format!("t{theorem}.json"));
        assert_eq!(run(&["generate", "--nae3sat", p(&f), "--theorem", theorem, "-o", p(&out)]).0, 0);
        let inst = io::load_instance(&out).unwrap();
        assert_eq!(inst.k(), graphs);
        assert_eq!(run(&["oracle", p(&out), "--cap", "1000"]).0, 0);
        assert_eq!(run(&["oracle", p(&out)]).0, 2, "default cap refuses large instances");
    }
    std::fs::write(&f, "a b\n").unwrap();
    assert_eq!(run(&["generate", "--nae3sat", p(&f), "--theorem", "3"]).0, 2);
}

#[test]
fn transform_writes_instance_trace_and_formula() {
    let dir = TempDir::new().unwrap();
    let c = cycles(400, 9000)
        .into_iter()
        .find(|c| orthosefe_core::cyclesolver::degree_four_vertices(c, 0).len() == 1 && c.exclusive(1).len() >= 2)
        .expect("a G1 vertex of degree 4");
    let inst = write_instance(&dir, "in.json", &io::cycle_json(&c));
    let (out, trace, formula) = (dir.path().join("out.json"), dir.path().join("t.json"), dir.path().join("f.cnf"));
    let (code, report) = run(&["transform", "reduce-degree", p(&inst), "-o", p(&out), "--emit-trace", p(&trace)]);
    assert_eq!(code, 0, "{report}");
    assert!(report.contains("reduce-degree at"));
    let steps: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(steps[0]["kind"], "reduce-degree");
    let (code, report) = run(&["transform", "outerplanarize", p(&out), "--emit-formula", p(&formula)]);
    assert_eq!(code, 0, "{report}");
    if report.contains("variables") {
        assert!(std::fs::read_to_string(&formula).unwrap().starts_with("p nae "));
    }
    // Degree 4 in G1 is outside outerplanarize's precondition.
    assert_eq!(run(&["transform", "outerplanarize", p(&inst)]).0, 2);
}

#[test]
fn draw_refuses_infeasible_instances() {
    let (code, report) = run(&["draw", p(&data("blocked_chord.json"))]);
    assert_eq!(code, 1, "{report}");
    let dir = TempDir::new().unwrap();
    let c = cycles(50, 0).into_iter().find(|c| orthosefe_core::cyclesolver::solve_cycle(c).map(|v| v.feasible).unwrap_or(false)).unwrap();
    let inst = write_instance(&dir, "i.json", &io::cycle_json(&c));
    let (code, report) = run(&["draw", p(&inst), "--root", "v1-v0"]);
    assert_eq!(code, 0, "{report}");
    assert!(report.contains("root: v0-v1 with 3 bends"));
    assert_eq!(run(&["draw", p(&inst), "--root", "v0-v3"]).0, 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn instance_json_round_trips(seed in 0u64..5000, n in 5usize..12) {
        let params = RandomParams { n, budgets: vec![(seed % 4) as usize, (seed / 4 % 4) as usize], union_cap: 5, seed };
        if let Ok(c) = generate_random(&params) {
            let text = io::cycle_json(&c);
            let back = io::parse_instance(&text).unwrap();
            prop_assert_eq!(back, Instance::Cycle(c));
            let file: InstanceFile = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(io::to_json(&file), text);
        }
    }

    #[test]
    fn malformed_input_is_an_input_error(text in ".{0,200}") {
        if let Err(e) = io::parse_instance(&text) {
            prop_assert_eq!(e.code, orthosefe::INPUT_ERROR);
        }
    }

    #[test]
    fn damaged_instances_are_input_errors(seed in 0u64..500, cut in 0usize..400, len in 1usize..20, junk in "[\\[\\]{}\",:a-z0-9]{0,4}") {
        let params = RandomParams { n: 8, budgets: vec![2, 2], union_cap: 5, seed };
        let text = io::cycle_json(&generate_random(&params).unwrap());
        let cut = cut.min(text.len());
        let end = (cut + len).min(text.len());
        let damaged = format!("{}{}{}", &text[..cut], junk, &text[end..]);
        match io::parse_instance(&damaged) {
            Ok(inst) => prop_assert_eq!(inst.k(), 2),
            Err(e) => prop_assert_eq!(e.code, orthosefe::INPUT_ERROR),
        }
    }

    #[test]
    fn nae_files_never_panic(text in "([a-e ]{0,12}\n){0,6}") {
        let _ = io::parse_nae(&text);
    }
}
