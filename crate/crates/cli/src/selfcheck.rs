//! Desk-scale verification suite: staircase algebra, budget formula, weight
//! arithmetic and the segment predicate, with optional golden values.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crossing_forge::analysis::{all_placements, a_of_h, brute_force_min_placement, check_induction_identities, StairPlacement};
use crossing_forge::drawing::{intersect_segments, Point, SegmentIntersection};
use crossing_forge::reduction::compute_k;
use crossing_forge::weights::WeightPoly;

#[derive(Debug, Clone)]
pub struct SelfcheckOptions {
    pub max_h: usize,
    pub brute_h: usize,
    pub seed: u64,
    /// Contents of a golden file to compare the computed values against.
    pub golden: Option<String>,
}

impl Default for SelfcheckOptions {
    fn default() -> Self {
        Self {
            max_h: 50,
            brute_h: 6,
            seed: 7,
            golden: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelfcheckReport {
    pub checks: Vec<Check>,
    /// Computed values in golden-file order.
    pub values: BTreeMap<String, String>,
}

impl SelfcheckReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(s, "[{tag}] {}: {}", c.name, c.detail);
        }
        s
    }

    /// The computed values as a golden file.
    pub fn golden_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.values {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}

/// Coefficients of the budget, term by term, as `(degree, coefficient)`
/// with the trailing `omega^2 - 1` kept separate, plus the constant.
pub fn reference_budget(n: u64, l: u64) -> (BTreeMap<u32, u64>, i64) {
    let h = 4 * l + n - 2;
    let m = h + 1;
    // sum_{j=1}^{m} j(j+1) = m(m+1)(m+2)/3, minus the j = 1 term
    let s1 = m * (m + 1) * (m + 2) / 3 - 2;
    // sum_{j=1}^{m} j(j+2) = m(m+1)(2m+1)/6 + m(m+1)
    let s2 = m * (m + 1) * (2 * m + 1) / 6 + m * (m + 1);
    let mut c = BTreeMap::new();
    c.insert(7, 2 * n * (2 * h + 1));
    c.insert(6, 2 * n * l);
    c.insert(4, 4 * n * l + 2 * n * s1 + 2 * n * s2);
    c.insert(2, n * l + 1);
    (c, -1)
}

/// Compares `compute_k` with [`reference_budget`] coefficient by coefficient.
pub fn budget_matches_reference(n: usize, l: usize) -> Result<(), String> {
    let k = compute_k(n, l).map_err(|e| e.to_string())?;
    let (want, offset) = reference_budget(n as u64, l as u64);
    let got: BTreeMap<u32, String> = k.symbolic.terms().map(|(d, c)| (d, c.to_string())).collect();
    let want: BTreeMap<u32, String> = want.into_iter().map(|(d, c)| (d, c.to_string())).collect();
    if got != want || k.offset != offset {
        return Err(format!("(n={n}, l={l}): got {k}, expected {want:?} with offset {offset}"));
    }
    Ok(())
}

fn orientation_touch(p: [(i64, i64); 4]) -> bool {
    let orient = |a: (i64, i64), b: (i64, i64), c: (i64, i64)| ((b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)).signum();
    let within = |a: (i64, i64), b: (i64, i64), c: (i64, i64)| {
        a.0.min(b.0) <= c.0 && c.0 <= a.0.max(b.0) && a.1.min(b.1) <= c.1 && c.1 <= a.1.max(b.1)
    };
    let [a, b, c, d] = p;
    let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
    (o1 * o2 < 0 && o3 * o4 < 0)
        || (o1 == 0 && within(a, b, c))
        || (o2 == 0 && within(a, b, d))
        || (o3 == 0 && within(c, d, a))
        || (o4 == 0 && within(c, d, b))
}

/// Every pair of segments between points of a `side x side` grid.
fn geometry_check(side: i64) -> Check {
    let pts: Vec<(i64, i64)> = (0..side).flat_map(|x| (0..side).map(move |y| (x, y))).collect();
    let mut segs = Vec::new();
    for (i, &a) in pts.iter().enumerate() {
        for &b in &pts[i + 1..] {
            segs.push((a, b));
        }
    }
    let p = |q: (i64, i64)| Point::int(q.0, q.1);
    let mut pairs = 0usize;
    let mut bad = Vec::new();
    for &(a, b) in &segs {
        for &(c, d) in &segs {
            pairs += 1;
            let got = !matches!(intersect_segments(&p(a), &p(b), &p(c), &p(d)), SegmentIntersection::None);
            if got != orientation_touch([a, b, c, d]) && bad.len() < 4 {
                bad.push(format!("{a:?}-{b:?} vs {c:?}-{d:?}"));
            }
        }
    }
    Check {
        name: "geometry".into(),
        passed: bad.is_empty(),
        detail: if bad.is_empty() {
            format!("{pairs} segment pairs agree with the orientation test")
        } else {
            format!("disagreements: {}", bad.join(", "))
        },
    }
}

fn random_poly(rng: &mut ChaCha8Rng) -> WeightPoly {
    let mut p = WeightPoly::zero();
    for d in 0..rng.gen_range(0..6u32) {
        p += &WeightPoly::monomial(d, rng.gen_range(0..1000u64));
    }
    p
}

fn ring_check(seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let trials = 200;
    for t in 0..trials {
        let (a, b, c) = (random_poly(&mut rng), random_poly(&mut rng), random_poly(&mut rng));
        let omega = rng.gen_range(2..10_000u64);
        let ok = &a + &b == &b + &a
            && &a * &b == &b * &a
            && &(&a + &b) + &c == &a + &(&b + &c)
            && &(&a * &b) * &c == &a * &(&b * &c)
            && &a * &(&b + &c) == &(&a * &b) + &(&a * &c)
            && (&a + &b).eval(omega) == a.eval(omega) + b.eval(omega)
            && (&a * &b).eval(omega) == a.eval(omega) * b.eval(omega)
            && (&a + &b).checked_sub(&b).as_ref() == Some(&a)
            && WeightPoly::parse_coeff_array(&a.coeff_array_string()).ok().as_ref() == Some(&a);
        if !ok && failures.len() < 4 {
            failures.push(format!("trial {t}: a = {a}, b = {b}, c = {c}, omega = {omega}"));
        }
    }
    Check {
        name: "weight-ring".into(),
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{trials} random triples satisfy the ring laws and evaluation is a homomorphism")
        } else {
            failures.join("; ")
        },
    }
}

/// Runs the suite. Never errors; every problem is a failed check.
pub fn cmd_selfcheck(opts: &SelfcheckOptions) -> SelfcheckReport {
    let mut checks = Vec::new();
    let mut values = BTreeMap::new();
    let mut push = |name: &str, passed: bool, detail: String| {
        checks.push(Check {
            name: name.into(),
            passed,
            detail,
        })
    };

    match check_induction_identities(opts.max_h) {
        Ok(r) => {
            values.insert(format!("identities.{}.checks", r.max_h), r.checks.to_string());
            let detail = match r.failures.first() {
                None => format!("{} checks up to h = {}", r.checks, r.max_h),
                Some(f) => format!("{} failures, first at h = {}, j = {}: {} vs {}", r.failures.len(), f.h, f.j, f.lhs, f.rhs),
            };
            push("identities", r.passed(), detail);
        }
        Err(e) => push("identities", false, e.to_string()),
    }

    let mut brute_fail = Vec::new();
    for h in 1..=opts.brute_h {
        let (m, a) = match (brute_force_min_placement(h), a_of_h(h)) {
            (Ok(m), Ok(a)) => (m, a),
            (Err(e), _) | (_, Err(e)) => {
                brute_fail.push(format!("h = {h}: {e}"));
                continue;
            }
        };
        values.insert(format!("a_of_h.{h}"), a.to_string());
        values.insert(format!("brute_min.{h}.placements"), m.placements.to_string());
        let unique = m.minimizers.len() == 1 && m.minimizers[0] == StairPlacement::alternating(h);
        if m.min_cost != a || !unique {
            brute_fail.push(format!("h = {h}: minimum {} with {} minimizers, a(h) = {a}", m.min_cost, m.minimizers.len()));
        }
    }
    let detail = if brute_fail.is_empty() {
        format!("alternating placement is the unique minimizer for h <= {}", opts.brute_h)
    } else {
        brute_fail.join("; ")
    };
    push("brute-min", brute_fail.is_empty(), detail);

    let costs: Vec<WeightPoly> = all_placements(1).iter().map(|p| p.cost()).collect();
    let expected: Vec<WeightPoly> = [18u64, 17, 18]
        .iter()
        .map(|&c| WeightPoly::monomial(7, 3u64) + WeightPoly::monomial(4, c))
        .collect();
    let shown: Vec<String> = costs.iter().map(|c| c.to_string()).collect();
    values.insert("placements.1".into(), shown.join(", "));
    push("height-one-costs", costs == expected, shown.join(", "));

    let mut k_fail = Vec::new();
    for n in 1..=5 {
        for l in 1..=4 {
            if let Err(e) = budget_matches_reference(n, l) {
                k_fail.push(e);
            }
            if let Ok(k) = compute_k(n, l) {
                values.insert(format!("k.{n}.{l}"), k.to_string());
            }
        }
    }
    push(
        "budget",
        k_fail.is_empty(),
        if k_fail.is_empty() {
            "compute_k matches the term-by-term evaluation for n <= 5, l <= 4".into()
        } else {
            k_fail.join("; ")
        },
    );

    let ring = ring_check(opts.seed);
    push(&ring.name, ring.passed, ring.detail);
    let geo = geometry_check(4);
    push(&geo.name, geo.passed, geo.detail);

    if let Some(golden) = &opts.golden {
        let (ok, detail) = compare_golden(golden, &values);
        push("golden", ok, detail);
    }

    SelfcheckReport { checks, values }
}

/// Compares `key = value` lines against computed values; keys the run did
/// not compute (for a smaller `max_h`, say) are skipped.
fn compare_golden(text: &str, values: &BTreeMap<String, String>) -> (bool, String) {
    let mut diffs = Vec::new();
    let mut compared = 0;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once(" = ") else {
            diffs.push(format!("line {}: expected `key = value`", lineno + 1));
            continue;
        };
        let Some(got) = values.get(k.trim()) else {
            continue;
        };
        compared += 1;
        if got != v.trim() {
            diffs.push(format!("{}: golden {} but computed {}", k.trim(), v.trim(), got));
        }
    }
    if diffs.is_empty() {
        (true, format!("{compared} golden values match"))
    } else {
        (false, diffs.join("; "))
    }
}
