use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{ArgGroup, Parser, Subcommand};
use serde::Serialize;

use crossing_forge::analysis::{a_of_h, brute_force_min_placement, check_induction_identities};
use crossing_forge::cnf::{brute_force_sat, parse_dimacs, Assignment};
use crossing_forge::drawing::{
    audit_crossings, audit_good_drawing, build_canonical_drawing, build_forced_drawing, count_crossings,
    export_svg, extract_assignment, read_drawing, recover_instance, write_drawing, Drawing, DrawingError,
    RoutingPlan, SvgStyle,
};
use crossing_forge::graph::{
    exact_pathwidth, read_decomposition, read_graph, validate_decomposition, write_decomposition, write_graph,
    Decomposition, ReductionGraph, SimpleGraph, Validity,
};
use crossing_forge::reduction::reduce;
use crossing_forge::widths::{instance_path_decomposition, instance_tree_decomposition, simple_path_decomposition};
use crossing_forge_cli::{cmd_end_to_end, cmd_selfcheck, EndToEndOptions, SelfcheckOptions, OUT_DIR_ENV};

#[derive(Parser)]
#[command(name = "crossing-forge", version)]
#[command(about = "Builds and checks weighted crossing number instances from CNF formulas")]
struct Cli {
    /// Print machine-readable JSON instead of text
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the weighted graph and budget from a DIMACS file
    Reduce {
        cnf: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the phase manifest next to the graph
        #[arg(long)]
        trace: bool,
    },
    /// Build the canonical drawing for an assignment
    Draw {
        graph: PathBuf,
        /// Bit string such as 10110, or `auto` to search for one
        #[arg(long)]
        assignment: String,
        /// `auto`, or comma-separated variables, one per clause
        #[arg(long, default_value = "auto")]
        plan: String,
        /// Route unsatisfied clauses anyway
        #[arg(long)]
        forced: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Check a drawing against the budget and the required crossing structure
    Audit { graph: PathBuf, drawing: PathBuf },
    /// Read the assignment encoded by a drawing
    Extract { graph: PathBuf, drawing: PathBuf },
    /// Emit a path or tree decomposition of an instance
    #[command(group(ArgGroup::new("kind").required(true).args(["path", "tree"])))]
    Decompose {
        graph: PathBuf,
        #[arg(long)]
        path: bool,
        #[arg(long)]
        tree: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a decomposition file against a graph file
    ValidateDecomposition { graph: PathBuf, decomposition: PathBuf },
    /// Staircase cost analysis
    Analyze {
        #[command(subcommand)]
        what: Analyze,
    },
    /// Subdivide parallel edges and lift the path decomposition
    Simplify {
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the lifted path decomposition
        #[arg(long)]
        decomposition: Option<PathBuf>,
    },
    /// Exact path-width of a small graph given as `n <count>` then `u v` lines
    PwExact { edges: PathBuf },
    /// Run the verification suite
    Selfcheck {
        #[arg(long, default_value_t = 50)]
        max_h: usize,
        #[arg(long, default_value_t = 6)]
        brute_h: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Compare computed values against this file
        #[arg(long)]
        golden: Option<PathBuf>,
        /// Write the computed values to this file instead of comparing
        #[arg(long, conflicts_with = "golden")]
        bless: Option<PathBuf>,
    },
    /// Run every stage on a DIMACS file and write all artifacts
    EndToEnd {
        cnf: PathBuf,
        /// Defaults to $CROSSING_FORGE_OUT, then ./crossing-forge-out
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 16)]
        max_brute_vars: usize,
    },
}

#[derive(Subcommand)]
enum Analyze {
    /// Minimum staircase cost a(h)
    AOfH {
        #[arg(long)]
        h: usize,
    },
    /// Check the induction identities for every height up to max-h
    Identities {
        #[arg(long)]
        max_h: usize,
    },
    /// Exhaustive minimum over all stair placements
    BruteMin {
        #[arg(long)]
        h: usize,
    },
}

/// A command result: `Ok(true)` is success, `Ok(false)` a failed check.
type Outcome = Result<bool>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let json = cli.json;
    match &cli.command {
        Command::Reduce { cnf, out, trace } => cmd_reduce(cnf, out.as_deref(), *trace),
        Command::Draw {
            graph,
            assignment,
            plan,
            forced,
            out,
            svg,
        } => cmd_draw(graph, assignment, plan, *forced, out.as_deref(), svg.as_deref(), json),
        Command::Audit { graph, drawing } => cmd_audit(graph, drawing, json),
        Command::Extract { graph, drawing } => cmd_extract(graph, drawing, json),
        Command::Decompose { graph, path, out, .. } => cmd_decompose(graph, *path, out.as_deref(), json),
        Command::ValidateDecomposition { graph, decomposition } => cmd_validate(graph, decomposition, json),
        Command::Analyze { what } => cmd_analyze(what, json),
        Command::Simplify {
            graph,
            out,
            decomposition,
        } => cmd_simplify(graph, out.as_deref(), decomposition.as_deref(), json),
        Command::PwExact { edges } => cmd_pw_exact(edges, json),
        Command::Selfcheck {
            max_h,
            brute_h,
            seed,
            golden,
            bless,
        } => {
            let golden = golden
                .as_ref()
                .map(|p| read(p))
                .transpose()?;
            let report = cmd_selfcheck(&SelfcheckOptions {
                max_h: *max_h,
                brute_h: *brute_h,
                seed: *seed,
                golden,
            });
            if let Some(p) = bless {
                write(p, &report.golden_text())?;
            }
            print!("{}", if json { report.to_json() } else { report.to_text() });
            Ok(report.passed())
        }
        Command::EndToEnd {
            cnf,
            out_dir,
            max_brute_vars,
        } => {
            let dir = out_dir
                .clone()
                .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("crossing-forge-out"));
            let mut opts = EndToEndOptions::new(dir);
            opts.max_brute_vars = *max_brute_vars;
            let report = cmd_end_to_end(cnf, &opts)?;
            print!("{}", if json { report.to_json() } else { report.to_text() });
            Ok(report.exit_code() == 0)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

/// Writes to `out`, else into `$CROSSING_FORGE_OUT/<default_name>`, else stdout.
fn emit(out: Option<&Path>, default_name: &str, contents: &str) -> Result<()> {
    let target = out
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(|d| PathBuf::from(d).join(default_name)));
    match target {
        Some(p) => write(&p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn load_graph(path: &Path) -> Result<ReductionGraph> {
    read_graph(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_drawing(path: &Path) -> Result<Drawing> {
    read_drawing(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn cmd_reduce(cnf: &Path, out: Option<&Path>, trace: bool) -> Outcome {
    let inst = parse_dimacs(&read(cnf)?).with_context(|| format!("parsing {}", cnf.display()))?;
    let (g, tr) = reduce(&inst)?;
    emit(out, "graph.cfg", &write_graph(&g))?;
    if trace {
        let path = match out {
            Some(p) => p.with_extension("trace.txt"),
            None => std::env::var_os(OUT_DIR_ENV)
                .map(|d| PathBuf::from(d).join("trace.txt"))
                .ok_or_else(|| anyhow!("--trace needs --out or ${OUT_DIR_ENV}"))?,
        };
        write(&path, &tr.to_text(&g))?;
    }
    Ok(true)
}

fn cmd_draw(
    graph: &Path,
    assignment: &str,
    plan: &str,
    forced: bool,
    out: Option<&Path>,
    svg: Option<&Path>,
    json: bool,
) -> Outcome {
    let g = load_graph(graph)?;
    let inst = recover_instance(&g)?;
    let tau = if assignment == "auto" {
        match brute_force_sat(&inst)? {
            Some(t) => t,
            None => {
                eprintln!("no satisfying assignment");
                return Ok(false);
            }
        }
    } else {
        Assignment::parse_bits(assignment).ok_or_else(|| anyhow!("bad assignment `{assignment}`"))?
    };
    let plan = if plan == "auto" {
        if forced {
            RoutingPlan::forced(&inst, &tau)
        } else {
            match RoutingPlan::from_assignment(&inst, &tau) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("{e}");
                    return Ok(false);
                }
            }
        }
    } else {
        let jumps = plan
            .split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .with_context(|| format!("bad plan `{plan}`"))?;
        RoutingPlan { jumps }
    };
    let built = if forced {
        build_forced_drawing(&g, &tau, &plan)
    } else {
        build_canonical_drawing(&g, &tau, &plan)
    };
    let d = match built {
        Ok(d) => d,
        Err(e @ (DrawingError::PlanDoesNotSatisfy { .. } | DrawingError::Unsatisfied { .. })) => {
            eprintln!("{e}");
            return Ok(false);
        }
        Err(e) => return Err(e.into()),
    };
    emit(out, "drawing.drw", &write_drawing(&d))?;
    if let Some(p) = svg {
        let cs = count_crossings(&g, &d)?;
        write(p, &export_svg(&g, &d, &SvgStyle { crossings: Some(&cs) }))?;
    }
    if json && out.is_some() {
        print_json(&serde_json::json!({ "assignment": tau.to_bits(), "plan": plan.jumps }))?;
    }
    Ok(true)
}

fn cmd_audit(graph: &Path, drawing: &Path, json: bool) -> Outcome {
    let g = load_graph(graph)?;
    let d = load_drawing(drawing)?;
    let cs = match count_crossings(&g, &d) {
        Ok(cs) => cs,
        Err(e) => {
            eprintln!("drawing rejected: {e}");
            return Ok(false);
        }
    };
    let report = audit_crossings(&g, &cs);
    let good = audit_good_drawing(&cs);
    if json {
        print_json(&serde_json::json!({ "good_drawing": good.passed(), "audit": report }))?;
    } else {
        println!("{}", good.summary());
        for l in &report.layers {
            println!("[{}] {}: {}", if l.passed { "PASS" } else { "FAIL" }, l.name, l.condition);
            for d in &l.details {
                println!("    {d}");
            }
        }
        println!("crossings {}, total {} = {}, k = {}", report.crossings, report.total, report.total_value, report.k_value);
    }
    Ok(report.passed() && good.passed())
}

fn cmd_extract(graph: &Path, drawing: &Path, json: bool) -> Outcome {
    let g = load_graph(graph)?;
    let d = load_drawing(drawing)?;
    if let Err(e) = d.check_shape(&g) {
        eprintln!("drawing rejected: {e}");
        return Ok(false);
    }
    match extract_assignment(&g, &d) {
        Ok(tau) => {
            if json {
                print_json(&serde_json::json!({ "assignment": tau.to_bits() }))?;
            } else {
                println!("{}", tau.to_bits());
            }
            Ok(true)
        }
        Err(e) => {
            eprintln!("{e}");
            Ok(false)
        }
    }
}

fn cmd_decompose(graph: &Path, path: bool, out: Option<&Path>, json: bool) -> Outcome {
    let g = load_graph(graph)?;
    let built = if path {
        instance_path_decomposition(&g).map(Decomposition::Path)
    } else {
        instance_tree_decomposition(&g).map(Decomposition::Tree)
    };
    let d = match built {
        Ok(d) => d,
        Err(e) => {
            eprintln!("{e}");
            return Ok(false);
        }
    };
    emit(out, if path { "path.dec" } else { "tree.dec" }, &write_decomposition(&d))?;
    let validity = validate_decomposition(&g, &d);
    if out.is_some() {
        report_validity(&validity, json)?;
    }
    Ok(validity.is_valid())
}

fn report_validity(v: &Validity, json: bool) -> Result<()> {
    if json {
        return print_json(v);
    }
    match v {
        Validity::Valid { width } => println!("valid, width {width}"),
        Validity::Invalid(why) => println!("invalid: {why}"),
    }
    Ok(())
}

fn cmd_validate(graph: &Path, dec: &Path, json: bool) -> Outcome {
    let g = load_graph(graph)?;
    let d = read_decomposition(&read(dec)?).with_context(|| format!("parsing {}", dec.display()))?;
    let v = validate_decomposition(&g, &d);
    report_validity(&v, json)?;
    Ok(v.is_valid())
}

fn cmd_analyze(what: &Analyze, json: bool) -> Outcome {
    match what {
        Analyze::AOfH { h } => {
            let a = a_of_h(*h)?;
            if json {
                print_json(&serde_json::json!({ "h": h, "a": a }))?;
            } else {
                println!("a({h}) = {a}");
            }
            Ok(true)
        }
        Analyze::Identities { max_h } => {
            let r = check_induction_identities(*max_h)?;
            if json {
                print_json(&r)?;
            } else {
                println!("{} checks up to h = {}, {} failures", r.checks, r.max_h, r.failures.len());
                for f in &r.failures {
                    println!("    {:?} h = {} j = {}: {} vs {} ({})", f.case, f.h, f.j, f.lhs, f.rhs, f.ordering);
                }
            }
            Ok(r.passed())
        }
        Analyze::BruteMin { h } => {
            let m = brute_force_min_placement(*h)?;
            let a = a_of_h(*h)?;
            if json {
                print_json(&m)?;
            } else {
                println!("h = {}: {} placements, minimum {}", m.h, m.placements, m.min_cost);
                for p in &m.minimizers {
                    println!("    {p}{}", if p.is_alternating() { " (alternating)" } else { "" });
                }
            }
            Ok(m.min_cost == a && m.minimizers.len() == 1 && m.minimizers[0].is_alternating())
        }
    }
}

fn cmd_simplify(graph: &Path, out: Option<&Path>, dec: Option<&Path>, json: bool) -> Outcome {
    let g = load_graph(graph)?;
    let (sub, pd) = match simple_path_decomposition(&g) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("{e}");
            return Ok(false);
        }
    };
    emit(out, "simple.cfg", &write_graph(&sub.graph))?;
    let d = Decomposition::Path(pd);
    let validity = validate_decomposition(&sub.graph, &d);
    if let Some(p) = dec {
        write(p, &write_decomposition(&d))?;
    }
    if out.is_some() {
        if json {
            print_json(&serde_json::json!({ "subdivided": sub.subdivided.len(), "decomposition": validity }))?;
        } else {
            println!("{} edges subdivided", sub.subdivided.len());
            report_validity(&validity, false)?;
        }
    }
    Ok(validity.is_valid())
}

fn parse_edge_list(text: &str) -> Result<SimpleGraph> {
    let mut n = None;
    let mut edges = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        match (n, parts.as_slice()) {
            (None, ["n", count]) => n = Some(count.parse::<usize>().with_context(|| format!("line {}", i + 1))?),
            (Some(count), [u, v]) => {
                let (u, v): (usize, usize) = (
                    u.parse().with_context(|| format!("line {}", i + 1))?,
                    v.parse().with_context(|| format!("line {}", i + 1))?,
                );
                if u >= count || v >= count || u == v {
                    bail!("line {}: bad edge {u} {v}", i + 1);
                }
                edges.push((u, v));
            }
            _ => bail!("line {}: expected `n <count>` first, then `u v`", i + 1),
        }
    }
    let n = n.ok_or_else(|| anyhow!("missing `n <count>` line"))?;
    Ok(SimpleGraph::new(n, edges))
}

fn cmd_pw_exact(path: &Path, json: bool) -> Outcome {
    let g = parse_edge_list(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    let pw = exact_pathwidth(&g)?;
    if json {
        print_json(&serde_json::json!({ "vertices": g.n, "edges": g.edges.len(), "pathwidth": pw }))?;
    } else {
        println!("{pw}");
    }
    Ok(true)
}
