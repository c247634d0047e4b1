//! One PASS/FAIL line per acceptance criterion. Run with `--nocapture` to
//! see the lines; the test fails if any criterion fails.

use std::collections::BTreeMap;
use std::fs;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crossing_forge::analysis::{a_of_h, all_placements, brute_force_min_placement, check_induction_identities, StairPlacement};
use crossing_forge::cnf::{brute_force_sat, parse_dimacs, serialize_dimacs, Assignment, CnfInstance};
use crossing_forge::drawing::{
    audit_crossings, audit_good_drawing, build_canonical_drawing, build_forced_drawing, count_crossings,
    extract_assignment, read_drawing, write_drawing, RoutingPlan,
};
use crossing_forge::graph::{
    exact_pathwidth, read_decomposition, read_graph, validate_decomposition, write_decomposition, write_graph,
    Decomposition, PathDecomposition, ReductionGraph, SimpleGraph, VertexId,
};
use crossing_forge::reduction::reduce;
use crossing_forge::weights::{ColorClass, WeightPoly};
use crossing_forge::widths::{
    check_monotone, instance_path_decomposition, instance_path_strategy, instance_tree_decomposition,
    simple_path_decomposition,
};
use crossing_forge_cli::selfcheck::budget_matches_reference;
use crossing_forge_cli::{cmd_end_to_end, EndToEndOptions, Verdict};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn running_example() -> CnfInstance {
    parse_dimacs("p cnf 5 3\n1 -2 4 -5 0\n-1 -3 5 0\n2 3 -4 0\n").unwrap()
}

fn random_cnf(rng: &mut ChaCha8Rng, n: usize, l: usize) -> CnfInstance {
    let clauses = (0..l)
        .map(|_| {
            let size = rng.gen_range(1..=n.min(3));
            let mut vars: Vec<i64> = (1..=n as i64).collect();
            vars.shuffle(rng);
            vars.truncate(size);
            vars.sort_unstable();
            vars.into_iter().map(|v| if rng.gen_bool(0.5) { v } else { -v }).collect()
        })
        .collect();
    CnfInstance::new(n, clauses).unwrap()
}

/// Up to 4 variables and 3 clauses.
fn random_small(rng: &mut ChaCha8Rng) -> CnfInstance {
    let (n, l) = (rng.gen_range(1..=4), rng.gen_range(1..=3));
    random_cnf(rng, n, l)
}

fn all_assignments(n: usize) -> impl Iterator<Item = Assignment> {
    (0u32..1 << n).map(move |bits| Assignment::new((0..n).map(|i| bits >> i & 1 == 1).collect()))
}

fn budget() -> Outcome {
    for n in 1..=5 {
        for l in 1..=4 {
            budget_matches_reference(n, l)?;
        }
    }
    let (g, _) = reduce(&parse_dimacs("p cnf 1 1\n1 0\n").unwrap()).map_err(|e| e.to_string())?;
    let w = g.omega;
    ensure(w == (g.num_edges() as u64).pow(2), || format!("omega {w} is not |E|^2"))?;
    let poly = WeightPoly::monomial(7, 14u64)
        + WeightPoly::monomial(6, 2u64)
        + WeightPoly::monomial(4, 180u64)
        + WeightPoly::monomial(2, 2u64);
    let k = g.k.clone().ok_or("no budget")?;
    ensure(k.symbolic == poly && k.offset == -1, || format!("k(1,1) = {k}"))?;
    let expected = poly.eval(w).to_string().parse::<i128>().unwrap() - 1;
    ensure(g.k_value().unwrap().to_string() == expected.to_string(), || "k_value differs".into())?;
    Ok(format!("20 (n, l) pairs match; k(1,1) = {k} = {expected} at omega = {w}"))
}

/// Checks the canonical drawing of `inst` under `tau`.
fn forward(inst: &CnfInstance, tau: &Assignment) -> Result<(), String> {
    let (g, _) = reduce(inst).map_err(|e| e.to_string())?;
    let plan = RoutingPlan::from_assignment(inst, tau).map_err(|e| e.to_string())?;
    let d = build_canonical_drawing(&g, tau, &plan).map_err(|e| e.to_string())?;
    let cs = count_crossings(&g, &d).map_err(|e| e.to_string())?;
    let good = audit_good_drawing(&cs);
    ensure(good.passed(), || good.summary())?;
    let audit = audit_crossings(&g, &cs);
    if let Some(l) = audit.first_failure() {
        return Err(format!("layer {} failed: {:?}", l.name, l.details));
    }
    let (n, l, h) = (g.n as u64, g.l as u64, g.h as u64);
    let t = &audit.total;
    let s1: u64 = (2..=h + 1).map(|j| j * (j + 1)).sum();
    let s2: u64 = (1..=h + 1).map(|j| j * (j + 2)).sum();
    let want: BTreeMap<u32, u64> =
        [(7, 2 * n * (2 * h + 1)), (6, 2 * n * l), (4, 4 * n * l + 2 * n * s1 + 2 * n * s2), (2, n * l)].into();
    for (&d, &c) in &want {
        ensure(t.coeff(d) == c.into(), || format!("omega^{d} coefficient {} != {c}", t.coeff(d)))?;
    }
    ensure(t.coeff(1) < (g.omega * g.omega).into(), || "omega^1 coefficient too large".into())?;
    ensure(
        t.terms().all(|(d, _)| want.contains_key(&d) || d == 1),
        || format!("unexpected degree in {t}"),
    )?;
    ensure(audit.total_value <= audit.k_value, || "over budget".into())?;
    Ok(())
}

fn forward_direction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut cases = vec![(running_example(), Assignment::parse_bits("11000").unwrap())];
    while cases.len() < 26 {
        let inst = random_small(&mut rng);
        if let Some(tau) = brute_force_sat(&inst).unwrap() {
            cases.push((inst, tau));
        }
    }
    for (inst, tau) in &cases {
        forward(inst, tau).map_err(|e| format!("{}: {e}", serialize_dimacs(inst).replace('\n', " ")))?;
    }
    Ok(format!("{} satisfiable instances: all layers pass with exact coefficients", cases.len()))
}

/// Largest number of C edges one clause edge crosses inside one gadget.
fn max_c_per_gadget(g: &ReductionGraph, cs: &crossing_forge::drawing::CrossingSet) -> usize {
    let mut per: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for c in &cs.crossings {
        for (a, b) in [(c.e, c.f), (c.f, c.e)] {
            if g.edge(a).color == ColorClass::G && g.edge(b).color == ColorClass::C {
                if let VertexId::V { i, .. } = g.edge(b).u {
                    *per.entry((a, i)).or_default() += 1;
                }
            }
        }
    }
    per.values().copied().max().unwrap_or(0)
}

fn negative_direction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut cases = vec![(
        parse_dimacs("p cnf 1 2\n1 0\n-1 0\n").unwrap(),
        Assignment::parse_bits("1").unwrap(),
    )];
    while cases.len() < 11 {
        let n = rng.gen_range(1..=4);
        let l = rng.gen_range(1..=3);
        let inst = random_cnf(&mut rng, n, l);
        let tau = Assignment::new((0..n).map(|_| rng.gen_bool(0.5)).collect());
        if !inst.is_satisfied_by(&tau) {
            cases.push((inst, tau));
        }
    }
    for (inst, tau) in &cases {
        let (g, _) = reduce(inst).map_err(|e| e.to_string())?;
        let plan = RoutingPlan::forced(inst, tau);
        let d = build_forced_drawing(&g, tau, &plan).map_err(|e| e.to_string())?;
        let cs = count_crossings(&g, &d).map_err(|e| e.to_string())?;
        let audit = audit_crossings(&g, &cs);
        let worst = max_c_per_gadget(&g, &cs);
        ensure(worst >= 2 && audit.total_value > audit.k_value, || {
            format!(
                "{} under {}: {worst} C crossings, total {} vs k {}",
                serialize_dimacs(inst).replace('\n', " "),
                tau.to_bits(),
                audit.total_value,
                audit.k_value
            )
        })?;
    }
    Ok(format!("{} forced drawings: >= 2 C crossings in a gadget and over budget", cases.len()))
}

fn staircase() -> Outcome {
    for h in 1..=6 {
        let m = brute_force_min_placement(h).map_err(|e| e.to_string())?;
        let a = a_of_h(h).map_err(|e| e.to_string())?;
        ensure(m.min_cost == a, || format!("h = {h}: minimum {} but a(h) = {a}", m.min_cost))?;
        ensure(m.minimizers == vec![StairPlacement::alternating(h)], || {
            format!("h = {h}: minimizers {:?}", m.minimizers)
        })?;
    }
    let costs: Vec<WeightPoly> = all_placements(1).iter().map(|p| p.cost()).collect();
    let want: Vec<WeightPoly> = [18u64, 17, 18]
        .iter()
        .map(|&c| WeightPoly::monomial(7, 3u64) + WeightPoly::monomial(4, c))
        .collect();
    ensure(costs == want, || format!("h = 1 costs {costs:?}"))?;
    let r = check_induction_identities(50).map_err(|e| e.to_string())?;
    ensure(r.passed(), || format!("{} identity failures", r.failures.len()))?;
    Ok(format!("unique alternating minimizer for h <= 6; h = 1 costs 18/17/18; {} identity checks", r.checks))
}

fn widths() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = (0, 0, 0);
    for n in 1..=5 {
        for l in 1..=4 {
            let inst = random_cnf(&mut rng, n, l);
            let (g, _) = reduce(&inst).map_err(|e| e.to_string())?;
            let tag = format!("(n={n}, l={l})");
            let s = instance_path_strategy(&g).map_err(|e| format!("{tag}: {e}"))?;
            check_monotone(&g, &s).map_err(|e| format!("{tag}: strategy not monotone: {e}"))?;
            let pd = instance_path_decomposition(&g).map_err(|e| format!("{tag}: {e}"))?;
            let td = instance_tree_decomposition(&g).map_err(|e| format!("{tag}: {e}"))?;
            let (sub, spd) = simple_path_decomposition(&g).map_err(|e| format!("{tag}: {e}"))?;
            let p = validate_decomposition(&g, &Decomposition::Path(pd)).width();
            let t = validate_decomposition(&g, &Decomposition::Tree(td)).width();
            let q = validate_decomposition(&sub.graph, &Decomposition::Path(spd)).width();
            match (p, t, q) {
                (Some(p), Some(t), Some(q)) if p <= 12 && t <= 9 && q <= 13 => {
                    worst = (worst.0.max(p), worst.1.max(t), worst.2.max(q));
                }
                _ => return Err(format!("{tag}: widths {p:?} {t:?} {q:?}")),
            }
        }
    }
    Ok(format!(
        "20 instances: max path width {}, tree width {}, subdivided path width {}",
        worst.0, worst.1, worst.2
    ))
}

fn layout_decomposition(g: &SimpleGraph, order: &[usize]) -> Decomposition<usize> {
    let mut at = vec![0; g.n];
    for (k, &v) in order.iter().enumerate() {
        at[v] = k;
    }
    let bags = (0..g.n)
        .map(|k| {
            let mut bag: std::collections::BTreeSet<usize> = [order[k]].into();
            for &(u, v) in &g.edges {
                for (x, y) in [(u, v), (v, u)] {
                    if at[x] < k && at[y] >= k {
                        bag.insert(x);
                    }
                }
            }
            bag
        })
        .collect();
    Decomposition::Path(PathDecomposition { bags })
}

fn oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut decompositions = 0;
    for _ in 0..50 {
        let n = rng.gen_range(1..=12);
        let p = rng.gen_range(0.1..0.6);
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen_bool(p) {
                    edges.push((a, b));
                }
            }
        }
        let g = SimpleGraph::new(n, edges);
        let pw = exact_pathwidth(&g).map_err(|e| e.to_string())?;
        let single: Decomposition<usize> = Decomposition::Path(PathDecomposition {
            bags: vec![(0..n).collect()],
        });
        let mut candidates = vec![single];
        for _ in 0..20 {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            candidates.push(layout_decomposition(&g, &order));
        }
        for d in &candidates {
            let w = validate_decomposition(&g, d).width().ok_or("validator rejected a layout decomposition")?;
            decompositions += 1;
            ensure(pw <= w, || format!("pathwidth {pw} above a valid decomposition of width {w}"))?;
        }
    }
    for t in 2..=10 {
        let pairs = [(SimpleGraph::path(t), 1), (SimpleGraph::complete(t), t - 1)];
        for (g, want) in pairs.into_iter().chain((t >= 3).then(|| (SimpleGraph::cycle(t), 2))) {
            let got = exact_pathwidth(&g).map_err(|e| e.to_string())?;
            ensure(got == want, || format!("t = {t}: got {got}, expected {want}"))?;
        }
    }
    Ok(format!("50 random graphs against {decompositions} valid decompositions; paths, cycles, cliques exact"))
}

fn round_trips() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut instances = vec![running_example()];
    for _ in 0..12 {
        instances.push(random_small(&mut rng));
    }
    let mut extracted = 0;
    for inst in &instances {
        let text = serialize_dimacs(inst);
        let back = parse_dimacs(&text).map_err(|e| e.to_string())?;
        ensure(&back == inst && serialize_dimacs(&back) == text, || "DIMACS round trip".into())?;
        let (g, _) = reduce(inst).map_err(|e| e.to_string())?;
        let gt = write_graph(&g);
        ensure(read_graph(&gt).map(|b| write_graph(&b) == gt) == Ok(true), || "graph round trip".into())?;
        for d in [
            Decomposition::Path(instance_path_decomposition(&g).map_err(|e| e.to_string())?),
            Decomposition::Tree(instance_tree_decomposition(&g).map_err(|e| e.to_string())?),
        ] {
            let dt = write_decomposition(&d);
            let back = read_decomposition(&dt).map_err(|e| e.to_string())?;
            ensure(write_decomposition(&back) == dt && back == d, || "decomposition round trip".into())?;
        }
        for tau in all_assignments(inst.num_vars()).filter(|t| inst.is_satisfied_by(t)) {
            let plan = RoutingPlan::from_assignment(inst, &tau).map_err(|e| e.to_string())?;
            let d = build_canonical_drawing(&g, &tau, &plan).map_err(|e| e.to_string())?;
            let got = extract_assignment(&g, &d).map_err(|e| e.to_string())?;
            ensure(got == tau, || format!("extracted {} from {}", got.to_bits(), tau.to_bits()))?;
            let dt = write_drawing(&d);
            let back = read_drawing(&dt).map_err(|e| e.to_string())?;
            ensure(write_drawing(&back) == dt && back == d, || "drawing round trip".into())?;
            extracted += 1;
        }
    }
    Ok(format!("{} instances, {extracted} assignments extracted; all formats byte-stable", instances.len()))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data");
    let mut files = 0;
    for name in ["single.cnf", "running.cnf", "contradiction.cnf"] {
        let input = std::path::Path::new(data).join(name);
        let mut runs = Vec::new();
        for r in ["a", "b"] {
            let out = dir.path().join(format!("{name}-{r}"));
            let report = cmd_end_to_end(&input, &EndToEndOptions::new(&out)).map_err(|e| format!("{e:#}"))?;
            ensure(report.verdict != Verdict::Fail, || format!("{name}: pipeline failed"))?;
            runs.push((out, report));
        }
        let (a, b) = (&runs[0], &runs[1]);
        ensure(a.1 == b.1, || format!("{name}: reports differ"))?;
        for art in &a.1.artifacts {
            let x = fs::read(a.0.join(art)).map_err(|e| e.to_string())?;
            let y = fs::read(b.0.join(art)).map_err(|e| e.to_string())?;
            ensure(x == y, || format!("{name}: {art} differs"))?;
            files += 1;
        }
    }
    Ok(format!("3 inputs run twice, {files} artifacts byte-identical"))
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 8] = [
        ("budget formula", budget),
        ("canonical drawings within budget", forward_direction),
        ("forced routing exceeds budget", negative_direction),
        ("staircase algebra", staircase),
        ("width bounds", widths),
        ("path-width oracle", oracle),
        ("round trips", round_trips),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (idx, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = f();
        let secs = start.elapsed().as_secs_f64();
        match res {
            Ok(msg) => println!("PASS criterion {}: {name}: {msg} ({secs:.2}s)", idx + 1),
            Err(msg) => {
                println!("FAIL criterion {}: {name}: {msg} ({secs:.2}s)", idx + 1);
                failed.push(idx + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
