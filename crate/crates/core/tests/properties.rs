use proptest::prelude::*;

use orthosefe_core::constraints::{check_assignment, SideAssignment, Side};
use orthosefe_core::cyclesolver::solve_cycle;
use orthosefe_core::drawing::st_order;
use orthosefe_core::gadgets::{generate_random, generate_random_biconnected, BiconnectedParams, RandomParams};
use orthosefe_core::spqr::{solve_biconnected, SpqrTree};
use orthosefe_core::{nae_eval, CycleInstance, Edge, Literal, NaeAssignment, NaeFormula};

fn cycle_instance() -> impl Strategy<Value = CycleInstance> {
    (6usize..11, 0usize..7, 0usize..6, any::<u64>()).prop_filter_map("generator gave up", |(n, b1, b2, seed)| {
        generate_random(&RandomParams { n, budgets: vec![b1, b2], union_cap: 5, seed }).ok()
    })
}

fn biconnected_instance() -> impl Strategy<Value = orthosefe_core::SunflowerInstance> {
    (5usize..11, 0usize..3, 1usize..4, 0usize..3, any::<u64>()).prop_filter_map(
        "generator gave up",
        |(n, chords, b1, b2, seed)| {
            generate_random_biconnected(&BiconnectedParams { n, chords, budgets: vec![b1, b2], union_cap: 5, seed })
                .ok()
        },
    )
}

fn relabel(c: &CycleInstance, perm: &[usize]) -> CycleInstance {
    let names = (0..c.n()).map(|v| c.names()[perm.iter().position(|&p| p == v).unwrap()].clone()).collect();
    let order = c.order().iter().map(|&v| perm[v]).collect();
    let exclusive = c.exclusive_all().iter().map(|l| l.iter().map(|e| Edge::new(perm[e.0], perm[e.1])).collect()).collect();
    CycleInstance::new(names, order, vec![], exclusive).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn alternation_is_symmetric(c in cycle_instance()) {
        let chords: Vec<Edge> = c.exclusive_all().iter().flatten().copied().collect();
        for &e in &chords {
            for &f in &chords {
                if e != f {
                    prop_assert_eq!(c.alternates(e, f), c.alternates(f, e));
                    prop_assert_eq!(c.alternates(e, f), c.reflected().alternates(e, f));
                }
            }
        }
    }

    #[test]
    fn flipping_every_side_keeps_feasibility(c in cycle_instance(), bits in any::<u64>()) {
        let mut i = 0;
        let sides = c.exclusive_all().iter().map(|l| l.iter().map(|_| { i += 1; Side::from_left(bits >> (i % 64) & 1 == 1) }).collect()).collect();
        let a = SideAssignment { sides };
        let v = check_assignment(&c, &a).unwrap();
        let w = check_assignment(&c, &a.flipped()).unwrap();
        prop_assert_eq!(v.feasible, w.feasible);
    }

    #[test]
    fn verdict_ignores_vertex_names(c in cycle_instance(), seed in any::<u64>()) {
        let n = c.n();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed | 1;
        for i in (1..n).rev() {
            s ^= s << 13; s ^= s >> 7; s ^= s << 17;
            perm.swap(i, (s % (i as u64 + 1)) as usize);
        }
        let d = relabel(&c, &perm);
        prop_assert_eq!(solve_cycle(&c).unwrap().feasible, solve_cycle(&d).unwrap().feasible);
    }

    #[test]
    fn biconnected_solver_agrees_on_cycles(c in cycle_instance()) {
        let cyc = solve_cycle(&c).unwrap().feasible;
        let run = solve_biconnected(&c.to_sunflower()).unwrap();
        prop_assert_eq!(cyc, run.feasible);
    }

    #[test]
    fn nae_complement_is_a_solution(vars in 3usize..7, raw in proptest::collection::vec((0usize..7, any::<bool>()), 3..18), bits in any::<u32>()) {
        let mut f = NaeFormula::new(vars);
        for ch in raw.chunks(3) {
            f.add_clause(ch.iter().map(|&(v, p)| Literal { var: v % vars, positive: p }).collect());
        }
        let t = NaeAssignment { values: (0..vars).map(|i| bits >> i & 1 == 1).collect() };
        prop_assert_eq!(nae_eval(&f, &t), nae_eval(&f, &t.complement()));
    }

    #[test]
    fn spqr_expansions_cover_each_edge_once(inst in biconnected_instance()) {
        let tree = SpqrTree::build(inst.n(), inst.shared()).unwrap();
        prop_assert!(tree.validate().is_ok());
        let all: Vec<usize> = (0..inst.shared().len()).collect();
        prop_assert_eq!(tree.all_real(), all.clone());
        for x in 0..tree.nodes.len() {
            for (i, _) in tree.neighbors(x) {
                let mut both = tree.expansion(x, i);
                let (y, j) = match tree.nodes[x].edges[i].link {
                    orthosefe_core::spqr::Link::Virtual { node, edge } => (node, edge),
                    _ => unreachable!(),
                };
                both.extend(tree.expansion(y, j));
                both.sort_unstable();
                prop_assert_eq!(&both, &all);
            }
        }
    }

    #[test]
    fn st_orders_are_valid(inst in biconnected_instance(), pick in any::<prop::sample::Index>(), rev in any::<bool>()) {
        let e = inst.shared()[pick.index(inst.shared().len())];
        let root = if rev { (e.1, e.0) } else { (e.0, e.1) };
        let st = st_order(inst.n(), inst.shared(), root).unwrap();
        prop_assert!(st.is_valid(inst.n(), inst.shared()));
        prop_assert_eq!((st.order[0], st.order[inst.n() - 1]), root);
    }
}
