use std::collections::BTreeSet;

use proptest::prelude::*;

use crossing_forge::cnf::{brute_force_sat, parse_dimacs, serialize_dimacs, Assignment, CnfInstance};
use crossing_forge::drawing::geometry::on_segment;
use crossing_forge::drawing::{
    audit_good_drawing, build_canonical_drawing, count_crossings, extract_assignment, intersect_segments, read_drawing,
    write_drawing, Point, RoutingPlan, SegmentIntersection,
};
use crossing_forge::graph::{
    exact_pathwidth, read_decomposition, read_graph, validate_decomposition, write_decomposition, write_graph,
    Decomposition, PathDecomposition, SimpleGraph,
};
use crossing_forge::reduction::{check_instance, reduce};
use crossing_forge::weights::ColorClass;
use crossing_forge::widths::{instance_path_decomposition, instance_tree_decomposition};

/// Integer-only segment test: do the closed segments share a point?
fn oracle_touch(p: [(i64, i64); 4]) -> bool {
    let orient = |a: (i64, i64), b: (i64, i64), c: (i64, i64)| {
        let v = (b.0 - a.0) as i128 * (c.1 - a.1) as i128 - (b.1 - a.1) as i128 * (c.0 - a.0) as i128;
        v.signum()
    };
    let within = |a: (i64, i64), b: (i64, i64), c: (i64, i64)| {
        a.0.min(b.0) <= c.0 && c.0 <= a.0.max(b.0) && a.1.min(b.1) <= c.1 && c.1 <= a.1.max(b.1)
    };
    let [a, b, c, d] = p;
    let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    (o1 == 0 && within(a, b, c)) || (o2 == 0 && within(a, b, d)) || (o3 == 0 && within(c, d, a)) || (o4 == 0 && within(c, d, b))
}

fn pt() -> impl Strategy<Value = (i64, i64)> {
    (-6i64..=6, -6i64..=6)
}

fn cnf() -> impl Strategy<Value = CnfInstance> {
    (1usize..=4, 1usize..=3).prop_flat_map(|(n, l)| {
        let clause = proptest::collection::btree_map(1..=n as i64, any::<bool>(), 1..=n.min(3));
        proptest::collection::vec(clause, l).prop_map(move |cs| {
            let clauses = cs
                .into_iter()
                .map(|m| m.into_iter().map(|(v, s)| if s { v } else { -v }).collect())
                .collect();
            CnfInstance::new(n, clauses).expect("generated clauses are well formed")
        })
    })
}

fn small_graph() -> impl Strategy<Value = SimpleGraph> {
    (1usize..=8).prop_flat_map(|n| {
        proptest::collection::btree_set((0..n, 0..n), 0..=n * 2).prop_map(move |pairs| {
            let edges: BTreeSet<(usize, usize)> =
                pairs.into_iter().filter(|(a, b)| a != b).map(|(a, b)| (a.min(b), a.max(b))).collect();
            SimpleGraph::new(n, edges.into_iter().collect())
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, .. ProptestConfig::default() })]

    #[test]
    fn intersection_agrees_with_orientation_oracle(a in pt(), b in pt(), c in pt(), d in pt()) {
        prop_assume!(a != b && c != d);
        let p = |q: (i64, i64)| Point::int(q.0, q.1);
        let got = intersect_segments(&p(a), &p(b), &p(c), &p(d));
        let expected = oracle_touch([a, b, c, d]);
        match &got {
            SegmentIntersection::None => prop_assert!(!expected),
            SegmentIntersection::Overlap => prop_assert!(expected),
            SegmentIntersection::Point(x) => {
                prop_assert!(expected);
                prop_assert!(on_segment(x, &p(a), &p(b)));
                prop_assert!(on_segment(x, &p(c), &p(d)));
            }
        }
        prop_assert_eq!(got, intersect_segments(&p(c), &p(d), &p(a), &p(b)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, .. ProptestConfig::default() })]

    #[test]
    fn generated_instances_are_consistent(inst in cnf()) {
        let (g, trace) = reduce(&inst).unwrap();
        check_instance(&g).unwrap();
        trace.check_partition(&g).unwrap();
        prop_assert_eq!(g.omega, (g.num_edges() as u64).pow(2));
        for e in g.edges() {
            e.weight.check_coefficients_below(g.omega).unwrap();
        }
        let gs = g.edges().iter().filter(|e| e.color == ColorClass::G).count();
        prop_assert_eq!(gs, inst.num_clauses());
        prop_assert!(g.parallel_edges().is_empty());
    }

    #[test]
    fn dimacs_round_trip(inst in cnf()) {
        let text = serialize_dimacs(&inst);
        let back = parse_dimacs(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(serialize_dimacs(&back), text);
    }

    #[test]
    fn graph_file_round_trip(inst in cnf()) {
        let (g, _) = reduce(&inst).unwrap();
        let text = write_graph(&g);
        let back = read_graph(&text).unwrap();
        prop_assert_eq!(write_graph(&back), text);
    }

    #[test]
    fn canonical_drawing_encodes_the_assignment(inst in cnf(), bits in any::<u8>()) {
        let n = inst.num_vars();
        let tau = Assignment::new((0..n).map(|i| bits >> i & 1 == 1).collect());
        let tau = if inst.is_satisfied_by(&tau) {
            tau
        } else if let Some(t) = brute_force_sat(&inst).unwrap() {
            t
        } else {
            return Ok(());
        };
        let (g, _) = reduce(&inst).unwrap();
        let plan = RoutingPlan::from_assignment(&inst, &tau).unwrap();
        let d = build_canonical_drawing(&g, &tau, &plan).unwrap();
        prop_assert_eq!(extract_assignment(&g, &d).unwrap(), tau);
        let cs = count_crossings(&g, &d).unwrap();
        prop_assert!(audit_good_drawing(&cs).passed());
        let text = write_drawing(&d);
        let back = read_drawing(&text).unwrap();
        prop_assert_eq!(write_drawing(&back), text);
    }

    #[test]
    fn instance_decompositions_stay_within_bounds(inst in cnf()) {
        let (g, _) = reduce(&inst).unwrap();
        let pd = instance_path_decomposition(&g).unwrap();
        prop_assert!(pd.width() <= 12);
        let td = instance_tree_decomposition(&g).unwrap();
        prop_assert!(td.width() <= 9);
        for d in [Decomposition::Path(pd), Decomposition::Tree(td)] {
            let text = write_decomposition(&d);
            let back = read_decomposition(&text).unwrap();
            prop_assert_eq!(write_decomposition(&back), text);
            prop_assert!(validate_decomposition(&g, &back).is_valid());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, .. ProptestConfig::default() })]

    #[test]
    fn exact_pathwidth_bounded_by_valid_decompositions(
        (g, order) in small_graph().prop_flat_map(|g| {
            let n = g.n;
            (Just(g), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
        })
    ) {
        let pw = exact_pathwidth(&g).unwrap();
        // layout decomposition: bag k holds vertex k of the order and every
        // earlier vertex with a neighbour at or after position k
        let at: Vec<usize> = {
            let mut at = vec![0; g.n];
            for (k, &v) in order.iter().enumerate() {
                at[v] = k;
            }
            at
        };
        let bags: Vec<BTreeSet<usize>> = (0..g.n)
            .map(|k| {
                let mut b: BTreeSet<usize> = [order[k]].into_iter().collect();
                for &(u, v) in &g.edges {
                    for (x, y) in [(u, v), (v, u)] {
                        if at[x] < k && at[y] >= k {
                            b.insert(x);
                        }
                    }
                }
                b
            })
            .collect();
        let d = Decomposition::Path(PathDecomposition { bags });
        let w = validate_decomposition(&g, &d).width();
        prop_assert!(w.is_some());
        prop_assert!(pw <= w.unwrap());
    }
}
