//! The end-to-end run: reduce, draw, audit, extract, decompose, validate.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crossing_forge::cnf::{brute_force_sat, parse_dimacs, serialize_dimacs, Assignment, BRUTE_FORCE_MAX_VARS};
use crossing_forge::drawing::{
    audit_crossings, audit_good_drawing, build_canonical_drawing, build_forced_drawing, count_crossings,
    export_svg, extract_assignment, read_drawing, write_drawing, RoutingPlan, SvgStyle,
};
use crossing_forge::graph::{
    read_decomposition, read_graph, validate_decomposition, write_decomposition, write_graph, Decomposition,
    ReductionGraph,
};
use crossing_forge::reduction::reduce;
use crossing_forge::weights::ColorClass;
use crossing_forge::widths::{instance_path_decomposition, instance_tree_decomposition, simple_path_decomposition};

pub const PATH_WIDTH_BOUND: usize = 12;
pub const TREE_WIDTH_BOUND: usize = 9;
pub const SIMPLE_PATH_WIDTH_BOUND: usize = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StageStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stage {
    pub name: String,
    pub status: StageStatus,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    /// The formula is unsatisfiable and the over-budget drawing was shown.
    UnsatDemonstrated,
    Fail,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Headline {
    pub n: usize,
    pub l: usize,
    pub h: usize,
    pub vertices: usize,
    pub edges: usize,
    pub omega: u64,
    pub k: String,
    pub k_value: String,
    pub crossings: Option<usize>,
    pub crossing_total: Option<String>,
    pub crossing_value: Option<String>,
    pub path_width: Option<usize>,
    pub tree_width: Option<usize>,
    pub simple_path_width: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PipelineReport {
    pub input: String,
    pub stages: Vec<Stage>,
    /// File names relative to the output directory, in write order.
    pub artifacts: Vec<String>,
    pub headline: Headline,
    pub verdict: Verdict,
}

impl PipelineReport {
    pub fn stage(&self, name: &str) -> Option<&Stage> {
        self.stages.iter().find(|s| s.name == name)
    }

    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Pass | Verdict::UnsatDemonstrated => 0,
            Verdict::Fail => 1,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let h = &self.headline;
        let mut s = String::new();
        let _ = writeln!(s, "input: {}", self.input);
        let _ = writeln!(s, "n = {}, l = {}, h = {}", h.n, h.l, h.h);
        let _ = writeln!(s, "|V| = {}, |E| = {}, omega = {}", h.vertices, h.edges, h.omega);
        let _ = writeln!(s, "k = {}", h.k);
        let _ = writeln!(s, "k_value = {}", h.k_value);
        if let (Some(c), Some(t), Some(v)) = (h.crossings, &h.crossing_total, &h.crossing_value) {
            let _ = writeln!(s, "crossings = {c}, total = {t} = {v}");
        }
        let width = |w: Option<usize>| w.map_or("-".to_string(), |w| w.to_string());
        let _ = writeln!(
            s,
            "widths: path {}, tree {}, subdivided path {}",
            width(h.path_width),
            width(h.tree_width),
            width(h.simple_path_width)
        );
        for st in &self.stages {
            let tag = match st.status {
                StageStatus::Pass => "PASS",
                StageStatus::Fail => "FAIL",
                StageStatus::Skipped => "SKIP",
            };
            let _ = writeln!(s, "[{tag}] {}: {}", st.name, st.detail);
        }
        let verdict = match self.verdict {
            Verdict::Pass => "pass",
            Verdict::UnsatDemonstrated => "unsat-demonstrated",
            Verdict::Fail => "fail",
        };
        let _ = writeln!(s, "verdict: {verdict}");
        s
    }
}

#[derive(Debug, Clone)]
pub struct EndToEndOptions {
    pub out_dir: PathBuf,
    /// Largest variable count for which satisfiability is decided by brute force.
    pub max_brute_vars: usize,
}

impl EndToEndOptions {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        Self {
            out_dir: out_dir.into(),
            max_brute_vars: 16,
        }
    }
}

struct Run<'a> {
    dir: &'a Path,
    stages: Vec<Stage>,
    artifacts: Vec<String>,
}

impl Run<'_> {
    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.artifacts.push(name.to_string());
        Ok(())
    }

    fn stage(&mut self, name: &str, status: StageStatus, detail: impl Into<String>) {
        self.stages.push(Stage {
            name: name.to_string(),
            status,
            detail: detail.into(),
        });
    }

    fn check(&mut self, name: &str, ok: bool, detail: impl Into<String>) -> bool {
        let status = if ok { StageStatus::Pass } else { StageStatus::Fail };
        self.stage(name, status, detail);
        ok
    }
}

/// Runs the full pipeline on a DIMACS file and writes every artifact into
/// `opts.out_dir`. Stage failures are recorded in the report; only I/O and
/// input errors are returned as `Err`.
pub fn cmd_end_to_end(cnf_path: &Path, opts: &EndToEndOptions) -> Result<PipelineReport> {
    let text = fs::read_to_string(cnf_path).with_context(|| format!("reading {}", cnf_path.display()))?;
    let inst = parse_dimacs(&text).with_context(|| format!("parsing {}", cnf_path.display()))?;
    fs::create_dir_all(&opts.out_dir).with_context(|| format!("creating {}", opts.out_dir.display()))?;
    let mut run = Run {
        dir: &opts.out_dir,
        stages: Vec::new(),
        artifacts: Vec::new(),
    };
    let input = cnf_path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();

    let (g, trace) = reduce(&inst).with_context(|| format!("stage reduce: {}", cnf_path.display()))?;
    run.write("instance.cnf", &serialize_dimacs(&inst))?;
    let graph_text = write_graph(&g);
    run.write("graph.cfg", &graph_text)?;
    run.write("trace.txt", &trace.to_text(&g))?;
    let reread = read_graph(&graph_text).map(|back| write_graph(&back) == graph_text);
    run.check(
        "reduce",
        matches!(reread, Ok(true)),
        format!(
            "{} vertices, {} edges, {} clause edges, h = {}",
            g.num_vertices(),
            g.num_edges(),
            g.edges().iter().filter(|e| e.color == ColorClass::G).count(),
            g.h
        ),
    );

    let mut headline = Headline {
        n: g.n,
        l: g.l,
        h: g.h,
        vertices: g.num_vertices(),
        edges: g.num_edges(),
        omega: g.omega,
        k: g.k.as_ref().map(|k| k.to_string()).unwrap_or_default(),
        k_value: g.k_value().map(|k| k.to_string()).unwrap_or_default(),
        ..Headline::default()
    };

    let guard = opts.max_brute_vars.min(BRUTE_FORCE_MAX_VARS);
    let mut unsat = false;
    if inst.num_vars() > guard {
        for name in ["draw", "audit", "extract"] {
            run.stage(name, StageStatus::Skipped, format!("more than {guard} variables"));
        }
    } else {
        match brute_force_sat(&inst)? {
            Some(tau) => draw_stages(&mut run, &g, &inst, &tau, &mut headline)?,
            None => {
                unsat = true;
                run.stage("draw", StageStatus::Skipped, "no satisfying assignment");
                forced_stage(&mut run, &g, &inst)?;
            }
        }
    }

    decomposition_stages(&mut run, &g, &mut headline)?;

    let failed = run.stages.iter().any(|s| s.status == StageStatus::Fail);
    let verdict = match (failed, unsat) {
        (true, _) => Verdict::Fail,
        (false, true) => Verdict::UnsatDemonstrated,
        (false, false) => Verdict::Pass,
    };
    let mut report = PipelineReport {
        input,
        stages: run.stages,
        artifacts: run.artifacts,
        headline,
        verdict,
    };
    report.artifacts.push("report.json".into());
    report.artifacts.push("report.txt".into());
    let dir = &opts.out_dir;
    fs::write(dir.join("report.json"), report.to_json()).context("writing report.json")?;
    fs::write(dir.join("report.txt"), report.to_text()).context("writing report.txt")?;
    Ok(report)
}

fn draw_stages(
    run: &mut Run<'_>,
    g: &ReductionGraph,
    inst: &crossing_forge::cnf::CnfInstance,
    tau: &Assignment,
    headline: &mut Headline,
) -> Result<()> {
    let plan = RoutingPlan::from_assignment(inst, tau)?;
    let d = match build_canonical_drawing(g, tau, &plan) {
        Ok(d) => d,
        Err(e) => {
            run.check("draw", false, e.to_string());
            return Ok(());
        }
    };
    let cs = match count_crossings(g, &d) {
        Ok(cs) => cs,
        Err(e) => {
            run.check("draw", false, e.to_string());
            return Ok(());
        }
    };
    let drawing_text = write_drawing(&d);
    run.write("drawing.drw", &drawing_text)?;
    run.write("drawing.svg", &export_svg(g, &d, &SvgStyle { crossings: Some(&cs) }))?;
    run.write("plan.json", &(serde_json::to_string_pretty(&plan)? + "\n"))?;
    run.check(
        "draw",
        true,
        format!("assignment {}, plan {:?}", tau.to_bits(), plan.jumps),
    );

    let good = audit_good_drawing(&cs);
    let audit = audit_crossings(g, &cs);
    run.write("audit.json", &(serde_json::to_string_pretty(&audit)? + "\n"))?;
    headline.crossings = Some(audit.crossings);
    headline.crossing_total = Some(audit.total.to_string());
    headline.crossing_value = Some(audit.total_value.to_string());
    let detail = match audit.first_failure() {
        Some(l) => format!("layer {} failed: {}", l.name, l.details.join("; ")),
        None if !good.passed() => good.summary(),
        None => format!("all layers pass, {} <= {}", audit.total_value, audit.k_value),
    };
    run.check("audit", audit.passed() && good.passed(), detail);

    let back = read_drawing(&drawing_text).map(|d2| write_drawing(&d2) == drawing_text);
    match extract_assignment(g, &d) {
        Ok(got) => {
            let ok = &got == tau && matches!(back, Ok(true));
            run.check("extract", ok, format!("recovered {}", got.to_bits()));
        }
        Err(e) => {
            run.check("extract", false, e.to_string());
        }
    }
    Ok(())
}

/// Draws the all-true assignment anyway and checks that the drawing is
/// over budget.
fn forced_stage(run: &mut Run<'_>, g: &ReductionGraph, inst: &crossing_forge::cnf::CnfInstance) -> Result<()> {
    let tau = Assignment::all(inst.num_vars(), true);
    let plan = RoutingPlan::forced(inst, &tau);
    let d = build_forced_drawing(g, &tau, &plan)?;
    let cs = count_crossings(g, &d)?;
    let audit = audit_crossings(g, &cs);
    run.write("forced.drw", &write_drawing(&d))?;
    run.write("forced-audit.json", &(serde_json::to_string_pretty(&audit)? + "\n"))?;
    let budget_failed = audit.layer("BUDGET").is_some_and(|l| !l.passed);
    run.check(
        "forced-routing",
        budget_failed && audit.total_value > audit.k_value,
        format!(
            "assignment {} costs {} against k = {}: BUDGET {}",
            tau.to_bits(),
            audit.total_value,
            audit.k_value,
            if budget_failed { "fail" } else { "pass" }
        ),
    );
    Ok(())
}

fn decomposition_stages(run: &mut Run<'_>, g: &ReductionGraph, headline: &mut Headline) -> Result<()> {
    match instance_path_decomposition(g) {
        Ok(pd) => {
            let d = Decomposition::Path(pd);
            let text = write_decomposition(&d);
            run.write("path.dec", &text)?;
            let w = reread_width(g, &text);
            headline.path_width = w;
            run.check("path-decomposition", w.is_some_and(|w| w <= PATH_WIDTH_BOUND), width_detail(w, PATH_WIDTH_BOUND));
        }
        Err(e) => {
            run.check("path-decomposition", false, e.to_string());
        }
    }
    match instance_tree_decomposition(g) {
        Ok(td) => {
            let d = Decomposition::Tree(td);
            let text = write_decomposition(&d);
            run.write("tree.dec", &text)?;
            let w = reread_width(g, &text);
            headline.tree_width = w;
            run.check("tree-decomposition", w.is_some_and(|w| w <= TREE_WIDTH_BOUND), width_detail(w, TREE_WIDTH_BOUND));
        }
        Err(e) => {
            run.check("tree-decomposition", false, e.to_string());
        }
    }
    match simple_path_decomposition(g) {
        Ok((sub, pd)) => {
            let graph_text = write_graph(&sub.graph);
            run.write("simple.cfg", &graph_text)?;
            let text = write_decomposition(&Decomposition::Path(pd));
            run.write("simple.dec", &text)?;
            let w = reread_width(&sub.graph, &text);
            headline.simple_path_width = w;
            let detail = format!("{} edges subdivided, {}", sub.subdivided.len(), width_detail(w, SIMPLE_PATH_WIDTH_BOUND));
            run.check("simple-decomposition", w.is_some_and(|w| w <= SIMPLE_PATH_WIDTH_BOUND), detail);
        }
        Err(e) => {
            run.check("simple-decomposition", false, e.to_string());
        }
    }
    Ok(())
}

/// Width of the decomposition as read back from its file, if valid.
fn reread_width(g: &ReductionGraph, text: &str) -> Option<usize> {
    let d = read_decomposition(text).ok()?;
    (write_decomposition(&d) == text).then_some(())?;
    validate_decomposition(g, &d).width()
}

fn width_detail(w: Option<usize>, bound: usize) -> String {
    match w {
        Some(w) => format!("valid, width {w} (bound {bound})"),
        None => "invalid decomposition".to_string(),
    }
}
