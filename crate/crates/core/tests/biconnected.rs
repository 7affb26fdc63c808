use orthosefe_core::check_sefe_orthogonality;
use orthosefe_core::gadgets::{generate_random_biconnected, BiconnectedParams};
use orthosefe_core::spqr::{for_each_embedding, solve_biconnected, SpqrTree};
use orthosefe_core::SunflowerInstance;
use orthosefe_oracles::exhaustive_rotation_search;

fn corpus(count: usize, seed0: u64) -> Vec<SunflowerInstance> {
    let mut out = Vec::new();
    let mut seed = seed0;
    while out.len() < count {
        seed += 1;
        let p = BiconnectedParams {
            n: 5 + (seed % 6) as usize,
            chords: (seed / 6 % 3) as usize,
            budgets: vec![1 + (seed / 18 % 3) as usize, (seed / 54 % 4) as usize],
            union_cap: 5,
            seed,
        };
        if let Ok(inst) = generate_random_biconnected(&p) {
            out.push(inst);
        }
    }
    out
}

#[test]
fn glued_embeddings_are_planar() {
    for inst in corpus(60, 100) {
        let tree = SpqrTree::build(inst.n(), inst.shared()).unwrap();
        let mut count = 0;
        for_each_embedding(&tree, |r| {
            assert!(r.is_planar(), "{}", tree.dump(inst.names()));
            count += 1;
            None::<()>
        });
        assert!(count >= 1);
    }
}

#[test]
fn verdicts_match_exhaustive_search() {
    let mut feasible = 0;
    let insts = corpus(120, 0);
    for (k, inst) in insts.iter().enumerate() {
        let want = exhaustive_rotation_search(inst);
        let run = match solve_biconnected(inst) {
            Ok(r) => r,
            Err(e) => panic!("instance {k}: {e}; exhaustive {}; {:?}", want.is_some(), inst.to_raw()),
        };
        assert_eq!(run.feasible, want.is_some(), "instance {k}: {:?} reason {:?}", inst.to_raw(), run.reason);
        if let Some(r) = &run.rotation {
            assert!(check_sefe_orthogonality(inst, r).unwrap().feasible);
            feasible += 1;
        }
    }
    eprintln!("feasible {feasible} of {}", insts.len());
    assert!(feasible > 10 && feasible < 110);
}

#[test]
fn flattening_preserves_snode_feasibility() {
    use orthosefe_core::oracle_with_cap;
    use orthosefe_core::spqr::{extract_snode_instances, normalize_attachments, Extraction, GadgetVariant};
    let (mut cases, mut x4_agree, mut expanded, mut infeasible) = (0, 0, 0, 0);
    for inst in corpus(150, 5000) {
        for norm in normalize_attachments(&inst).unwrap() {
            let ni = &norm.instance;
            let tree = SpqrTree::build(ni.n(), ni.shared()).unwrap();
            let Extraction::Instances(list) = extract_snode_instances(ni, &tree) else { continue };
            for sn in list {
                let (sf, _) = sn.to_sunflower(ni).unwrap();
                if sf.n() > 12 {
                    continue;
                }
                let want = exhaustive_rotation_search(&sf).is_some();
                let x3 = oracle_with_cap(&sn.flatten(ni, GadgetVariant::A1X3).unwrap().cycle, 40).unwrap().feasible;
                let x4 = oracle_with_cap(&sn.flatten(ni, GadgetVariant::A1X4).unwrap().cycle, 40).unwrap().feasible;
                assert_eq!(x3, want, "{:?}", sf.to_raw());
                cases += 1;
                infeasible += !want as usize;
                expanded += !sn.expanded.is_empty() as usize;
                x4_agree += (x4 == want) as usize;
            }
        }
    }
    eprintln!("S-node cases {cases}, infeasible {infeasible}, with expansions {expanded}, (a1,x4) agrees on {x4_agree}");
    assert!(expanded > 20 && infeasible > 5);
}
