use crossing_forge::cnf::{parse_dimacs, Assignment, CnfInstance};
use crossing_forge::drawing::{
    audit_good_drawing, audit_necessary_conditions, build_canonical_drawing, build_forced_drawing, count_crossings,
    extract_assignment, DrawingError, RoutingPlan,
};
use crossing_forge::reduction::reduce;
use crossing_forge::weights::ColorClass;

fn check_satisfied(inst: &CnfInstance, tau: &Assignment) {
    let (g, _) = reduce(inst).unwrap();
    let plan = RoutingPlan::from_assignment(inst, tau).unwrap();
    let d = build_canonical_drawing(&g, tau, &plan).unwrap();
    let cs = count_crossings(&g, &d).unwrap();
    let good = audit_good_drawing(&cs);
    assert!(good.passed(), "{}: {:?}", good.summary(), good);
    let report = audit_necessary_conditions(&g, &d).unwrap();
    for layer in &report.layers {
        assert!(layer.passed, "{} failed: {:?}", layer.name, layer.details);
    }
    let (n, l, h) = (g.n as u64, g.l as u64, g.h as u64);
    let t = &cs.total;
    assert_eq!(t.coeff(8), 0u32.into());
    assert_eq!(t.coeff(7), (2 * n * (2 * h + 1)).into());
    assert_eq!(t.coeff(6), (2 * n * l).into());
    let s1: u64 = (2..=h + 1).map(|j| j * (j + 1)).sum();
    let s2: u64 = (1..=h + 1).map(|j| j * (j + 2)).sum();
    assert_eq!(t.coeff(4), (4 * n * l + 2 * n * s1 + 2 * n * s2).into());
    assert_eq!(t.coeff(2), (n * l).into());
    assert!(t.coeff(1) < (g.omega as u128 * g.omega as u128 - 1).into());
    assert_eq!(extract_assignment(&g, &d).unwrap(), *tau);
}

#[test]
fn smallest_instance_is_within_budget() {
    let inst = CnfInstance::new(1, vec![vec![1]]).unwrap();
    check_satisfied(&inst, &Assignment::new(vec![true]));
}

#[test]
fn running_example_plan_is_within_budget() {
    let inst = parse_dimacs("p cnf 5 3\n1 -2 4 -5 0\n-1 -3 5 0\n2 3 -4 0\n").unwrap();
    let tau = Assignment::parse_bits("TTFFF").unwrap();
    check_satisfied(&inst, &tau);
    let (g, _) = reduce(&inst).unwrap();
    let plan = RoutingPlan { jumps: vec![5, 3, 2] };
    let d = build_canonical_drawing(&g, &tau, &plan).unwrap();
    assert!(audit_necessary_conditions(&g, &d).unwrap().passed());
}

#[test]
fn plan_through_unsatisfied_cell_is_refused() {
    let inst = parse_dimacs("p cnf 5 3\n1 -2 4 -5 0\n-1 -3 5 0\n2 3 -4 0\n").unwrap();
    let (g, _) = reduce(&inst).unwrap();
    let tau = Assignment::parse_bits("TTFFF").unwrap();
    let plan = RoutingPlan { jumps: vec![5, 1, 2] };
    assert_eq!(
        build_canonical_drawing(&g, &tau, &plan),
        Err(DrawingError::PlanDoesNotSatisfy { clause: 2, var: 1 })
    );
}

#[test]
fn contradiction_exceeds_budget_for_both_assignments() {
    let inst = CnfInstance::new(1, vec![vec![1], vec![-1]]).unwrap();
    let (g, _) = reduce(&inst).unwrap();
    for value in [true, false] {
        let tau = Assignment::new(vec![value]);
        let plan = RoutingPlan::forced(&inst, &tau);
        let d = build_forced_drawing(&g, &tau, &plan).unwrap();
        let cs = count_crossings(&g, &d).unwrap();
        let most_c = (1..=g.n)
            .map(|i| {
                cs.crossings
                    .iter()
                    .filter(|c| {
                        let (e, f) = (g.edge(c.e), g.edge(c.f));
                        let pair = [e, f];
                        pair.iter().any(|x| x.color == ColorClass::G)
                            && pair.iter().any(|x| {
                                x.color == ColorClass::C && matches!(x.u, crossing_forge::graph::VertexId::V { i: gi, .. } if gi == i)
                            })
                    })
                    .count()
            })
            .max()
            .unwrap();
        assert!(most_c >= 2, "value {value}: {most_c}");
        let report = audit_necessary_conditions(&g, &d).unwrap();
        assert!(report.total_value > report.k_value);
    }
}

#[test]
fn formula_is_recovered_from_cells() {
    let inst = parse_dimacs("p cnf 5 3\n1 -2 4 -5 0\n-1 -3 5 0\n2 3 -4 0\n").unwrap();
    let (g, _) = reduce(&inst).unwrap();
    assert_eq!(crossing_forge::drawing::recover_instance(&g).unwrap(), inst);
}
