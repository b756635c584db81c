//! `mdl`: classify diagrams, emit axioms, build and check frame constructions.

use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use mdl_core::catalog;
use mdl_core::constructions::{
    build_bundle, isomorphism_to_f_minus, pseudoproduct, verify_rank1, ConstructionError, Graph,
};
use mdl_core::diagram::{parse_diagram, parse_graph, Diagram};
use mdl_core::dot;
use mdl_core::formula::{build_eta, gamma_m, reduced_tree, render, AxiomError, AxiomSpec, Format};
use mdl_core::minimizer::{classify, minimize};
use mdl_core::verify::{run_suite, Options, VerifyError, REPORT_SCHEMA_VERSION};

#[derive(Parser)]
#[command(name = "mdl", version, about = "Diagram classification, axioms and frame constructions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimize and report POSITIVE or NEGATIVE with the property table.
    Classify(Target),
    /// Minimize and print the deletion log.
    Minimize(Target),
    /// Emit gamma^D_m.
    Axioms(Target),
    /// Emit eta^D and its reduced tree.
    Eta(Target),
    /// Build F+ and F- and check C-i .. C-vi.
    Rank1(Target),
    /// Build the pseudoproduct with `--graph`.
    Pseudoproduct(Target),
    /// Run a verification suite: soundness, c2, c1, complete1, uf3, minimality.
    Verify {
        suite: String,
        #[command(flatten)]
        target: Target,
    },
    /// Print the input diagram (DOT by default).
    Export(Target),
}

#[derive(Args)]
struct Target {
    /// Catalog name or path to a diagram file.
    input: String,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OutFormat {
    Text,
    Json,
    Dot,
    Latex,
}

#[derive(Args)]
struct Flags {
    #[arg(long)]
    m: Option<usize>,
    #[arg(long = "guard-depth")]
    guard_depth: Option<usize>,
    /// complete:<n>, cycle:<n>, mycielski:<selector or n>, file:<path>
    #[arg(long)]
    graph: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "max-size")]
    max_size: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<OutFormat>,
    #[arg(long = "budget-valuations")]
    budget_valuations: Option<u64>,
    #[arg(long = "cap-expansion")]
    cap_expansion: Option<u64>,
}

/// Exit status 2 with a message.
struct Usage(String);

impl<E: std::fmt::Display> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.to_string())
    }
}

struct Outcome {
    text: String,
    ok: bool,
}

fn load_input(input: &str) -> Result<Diagram, Usage> {
    if Path::new(input).is_file() {
        let text = std::fs::read_to_string(input)?;
        let parsed = parse_diagram(&text).map_err(|e| Usage(format!("{input}:{e}")))?;
        for w in &parsed.warnings {
            eprintln!("warning: {input}: {w}");
        }
        return Ok(parsed.value);
    }
    Ok(catalog::load(input)?)
}

/// Graph selector and, for complete graphs, a chromatic lower bound.
fn parse_selector(sel: &str) -> Result<(Graph, Option<usize>), Usage> {
    let (kind, arg) = sel
        .split_once(':')
        .ok_or_else(|| Usage(format!("bad graph selector `{sel}`; expected kind:arg")))?;
    let number = |s: &str| s.parse::<usize>().map_err(|_| Usage(format!("bad number `{s}` in graph selector")));
    match kind {
        "complete" => {
            let n = number(arg)?;
            Ok((Graph::complete(n), Some(n)))
        }
        "cycle" => Ok((Graph::cycle(number(arg)?), None)),
        "mycielski" => {
            let base = match arg.parse::<usize>() {
                Ok(n) => Graph::complete(n),
                Err(_) => parse_selector(arg)?.0,
            };
            Ok((base.mycielski(), None))
        }
        "file" => {
            let text = std::fs::read_to_string(arg)?;
            let parsed = parse_graph(&text).map_err(|e| Usage(format!("{arg}:{e}")))?;
            Ok((parsed.value, None))
        }
        other => Err(Usage(format!("unknown graph kind `{other}`; expected complete, cycle, mycielski or file"))),
    }
}

fn spec_for(d: &Diagram, flags: &Flags) -> Result<AxiomSpec, Usage> {
    let spec = AxiomSpec::new(d.clone())?;
    Ok(match flags.guard_depth {
        Some(g) => spec.with_guard_depth(g),
        None => spec,
    })
}

fn json_text(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize") + "\n"
}

fn cap_error(e: AxiomError) -> Usage {
    match e {
        AxiomError::ExpansionCapExceeded { .. } => {
            Usage(format!("{e}; raise --cap-expansion or lower --m"))
        }
        other => Usage(other.to_string()),
    }
}

fn construction_error(e: ConstructionError) -> Usage {
    Usage(format!("cannot build the construction: {e}"))
}

fn format_of(flags: &Flags, default: OutFormat) -> OutFormat {
    flags.format.unwrap_or(default)
}

fn classify_cmd(t: &Target) -> Result<Outcome, Usage> {
    let d = load_input(&t.input)?;
    let v = classify(&d)?;
    let text = match format_of(&t.flags, OutFormat::Text) {
        OutFormat::Json => json_text(&v),
        OutFormat::Dot => dot::diagram_to_dot(&v.minimal_diagram),
        _ => {
            let mut out = format!("class: {}\ninner cycle: {}\ndeletions: {}\nminimal diagram:\n", v.class, v.inner_cycle, v.deletions.len());
            for line in v.minimal_diagram.to_dsl().lines() {
                out.push_str(&format!("  {line}\n"));
            }
            for ((name, text), (_, holds)) in mdl_core::minimizer::PROPERTIES.iter().zip(v.property_table()) {
                out.push_str(&format!("{name:<7} {:<4}  {text}\n", if holds { "hold" } else { "fail" }));
            }
            out
        }
    };
    Ok(Outcome { text, ok: true })
}

fn minimize_cmd(t: &Target) -> Result<Outcome, Usage> {
    let d = load_input(&t.input)?;
    let m = minimize(&d)?;
    let text = match format_of(&t.flags, OutFormat::Text) {
        OutFormat::Json => json_text(&json!({
            "schema_version": REPORT_SCHEMA_VERSION,
            "minimal": m.diagram.to_dsl(),
            "deletions": m.log,
        })),
        OutFormat::Dot => dot::diagram_to_dot(&m.diagram),
        _ => {
            let mut out = String::new();
            for del in &m.log {
                out.push_str(&format!("delete {}", del.edge));
                if !del.dropped.is_empty() {
                    let dropped: Vec<String> = del.dropped.iter().map(|x| format!("x{x}")).collect();
                    out.push_str(&format!(" (drops {})", dropped.join(", ")));
                }
                out.push('\n');
            }
            out.push_str(&m.diagram.to_dsl());
            out
        }
    };
    Ok(Outcome { text, ok: true })
}

fn axioms_cmd(t: &Target) -> Result<Outcome, Usage> {
    let d = load_input(&t.input)?;
    let spec = spec_for(&d, &t.flags)?;
    let m = t.flags.m.unwrap_or(2);
    let cap = t.flags.cap_expansion.unwrap_or(mdl_core::formula::DEFAULT_EXPANSION_CAP);
    let phi = gamma_m(&spec, m, cap).map_err(cap_error)?;
    let text = match format_of(&t.flags, OutFormat::Text) {
        OutFormat::Latex => render(&phi, Format::Latex) + "\n",
        OutFormat::Json => json_text(&json!({
            "schema_version": REPORT_SCHEMA_VERSION,
            "m": m,
            "guard_depth": spec.guard_depth,
            "formula": render(&phi, Format::Text),
        })),
        OutFormat::Dot => return Err(Usage("axioms support text, json and latex".into())),
        OutFormat::Text => render(&phi, Format::Text) + "\n",
    };
    Ok(Outcome { text, ok: true })
}

fn eta_cmd(t: &Target) -> Result<Outcome, Usage> {
    let d = load_input(&t.input)?;
    let spec = spec_for(&d, &t.flags)?;
    let eta = build_eta(&spec);
    let tree = reduced_tree(&eta)?;
    let labels: Vec<String> = (0..tree.len())
        .map(|n| {
            let xs: Vec<String> = tree.label(n).iter().map(|x| format!("x{x}")).collect();
            format!("{{{}}}", xs.join(","))
        })
        .collect();
    let text = match format_of(&t.flags, OutFormat::Text) {
        OutFormat::Latex => render(&eta, Format::Latex) + "\n",
        OutFormat::Dot => dot::frame_to_dot(&tree.to_frame()),
        OutFormat::Json => json_text(&json!({
            "schema_version": REPORT_SCHEMA_VERSION,
            "eta": render(&eta, Format::Text),
            "tree": (0..tree.len()).map(|n| json!({
                "node": n,
                "parent": tree.parent(n).map(|(p, _)| *p),
                "label": tree.parent(n).map(|(_, l)| l.to_string()),
                "points": tree.label(n),
            })).collect::<Vec<_>>(),
            "point_map": tree.point_map(),
        })),
        OutFormat::Text => {
            let mut out = format!("eta: {}\nreduced tree:\n", render(&eta, Format::Text));
            for (n, label) in labels.iter().enumerate() {
                let indent = "  ".repeat(tree.depth_of(n) + 1);
                let edge = tree.parent(n).map(|(_, l)| format!("<{l}> ")).unwrap_or_default();
                out.push_str(&format!("{indent}{edge}t{n} {label}\n"));
            }
            out
        }
    };
    Ok(Outcome { text, ok: true })
}

fn rank1_cmd(t: &Target) -> Result<Outcome, Usage> {
    let d = load_input(&t.input)?;
    let b = build_bundle(&d).map_err(construction_error)?;
    let r = verify_rank1(&d, &b);
    let text = match format_of(&t.flags, OutFormat::Text) {
        OutFormat::Dot => dot::bundle_to_dot(&b),
        OutFormat::Json => json_text(&json!({
            "schema_version": REPORT_SCHEMA_VERSION,
            "b": b.b(),
            "rounds": b.rounds,
            "g": b.g,
            "selected": b.selected,
            "reflexive_point": b.reflexive_point,
            "conditions": r.conditions,
            "homomorphisms": r.homomorphisms,
            "passed": r.all_hold(),
        })),
        _ => {
            let sel = b.selected.as_ref().map(|e| e.to_string()).unwrap_or_default();
            let mut out = format!("b = {}, chase rounds = {}, selected {sel}, closing point {}\n", b.b(), b.rounds, b.reflexive_point);
            for c in &r.conditions {
                out.push_str(&format!("{:<6} {}  {}\n", c.name, if c.holds { "PASS" } else { "FAIL" }, c.detail));
            }
            out
        }
    };
    Ok(Outcome { text, ok: r.all_hold() })
}

fn pseudoproduct_cmd(t: &Target) -> Result<Outcome, Usage> {
    let d = load_input(&t.input)?;
    let (g, _) = parse_selector(t.flags.graph.as_deref().unwrap_or("complete:2"))?;
    let b = build_bundle(&d).map_err(construction_error)?;
    let pp = pseudoproduct(&b, &g).map_err(construction_error)?;
    let iso = (g.vertex_count() == 1).then(|| isomorphism_to_f_minus(&b, &pp));
    let ok = iso.as_ref().is_none_or(|m| m.is_some());
    let text = match format_of(&t.flags, OutFormat::Text) {
        OutFormat::Dot => dot::pseudoproduct_to_dot(&b, &pp),
        OutFormat::Json => json_text(&json!({
            "schema_version": REPORT_SCHEMA_VERSION,
            "b": b.b(),
            "vertices": g.vertex_count(),
            "frame": pp.frame,
            "pr": pp.pr,
            "h": pp.h,
            "definitions_agree": true,
            "isomorphism_to_f_minus": iso,
        })),
        _ => {
            let mut out = format!(
                "points: {} = 1 + ({} - 1) * {}\nedges: {}\nfive-clause and projection definitions agree\n",
                pp.size(),
                b.b(),
                g.vertex_count(),
                pp.frame.edge_count()
            );
            if let Some(m) = &iso {
                out.push_str(match m {
                    Some(_) => "isomorphic to F- via (y, v0) -> y\n",
                    None => "NOT isomorphic to F-\n",
                });
            }
            out
        }
    };
    Ok(Outcome { text, ok })
}

fn verify_cmd(suite: &str, t: &Target) -> Result<Outcome, Usage> {
    let d = if suite == "uf3" && catalog::load(&t.input).is_err() && !Path::new(&t.input).is_file() {
        None
    } else {
        Some(load_input(&t.input)?)
    };
    let f = &t.flags;
    let (graph, chromatic_at_least) = match &f.graph {
        Some(sel) => {
            let (g, n) = parse_selector(sel)?;
            (Some(g), n)
        }
        None => (None, None),
    };
    let defaults = Options::default();
    let opts = Options {
        m: f.m,
        guard_depth: f.guard_depth,
        graph,
        chromatic_at_least,
        samples: f.samples,
        seed: f.seed,
        max_size: f.max_size,
        budget_valuations: f.budget_valuations.unwrap_or(defaults.budget_valuations),
        cap_expansion: f.cap_expansion.unwrap_or(defaults.cap_expansion),
        ..defaults
    };
    let report = run_suite(suite, d.as_ref(), &opts).map_err(|e| match e {
        VerifyError::Semantics(ref s) => Usage(format!("{s}; raise --budget-valuations or lower --max-size")),
        VerifyError::Axiom(a) => cap_error(a),
        other => Usage(other.to_string()),
    })?;
    let text = match format_of(f, OutFormat::Text) {
        OutFormat::Json => json_text(&report),
        _ => report.text(),
    };
    Ok(Outcome { text, ok: report.passed })
}

fn export_cmd(t: &Target) -> Result<Outcome, Usage> {
    let d = load_input(&t.input)?;
    let text = match format_of(&t.flags, OutFormat::Dot) {
        OutFormat::Dot => dot::diagram_to_dot(&d),
        OutFormat::Json => json_text(&json!({"schema_version": REPORT_SCHEMA_VERSION, "diagram": d.frame()})),
        _ => d.to_dsl(),
    };
    Ok(Outcome { text, ok: true })
}

fn run(cli: &Cli) -> Result<Outcome, Usage> {
    match &cli.command {
        Command::Classify(t) => classify_cmd(t),
        Command::Minimize(t) => minimize_cmd(t),
        Command::Axioms(t) => axioms_cmd(t),
        Command::Eta(t) => eta_cmd(t),
        Command::Rank1(t) => rank1_cmd(t),
        Command::Pseudoproduct(t) => pseudoproduct_cmd(t),
        Command::Verify { suite, target } => verify_cmd(suite, target),
        Command::Export(t) => export_cmd(t),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selectors() {
        let (g, n) = parse_selector("complete:4").ok().unwrap();
        assert_eq!((g.vertex_count(), n), (4, Some(4)));
        assert_eq!(parse_selector("mycielski:2").ok().unwrap().0.vertex_count(), 5);
        assert_eq!(parse_selector("mycielski:mycielski:2").ok().unwrap().0.vertex_count(), 11);
        assert_eq!(parse_selector("cycle:5").ok().unwrap().1, None);
        assert!(parse_selector("complete").is_err());
        assert!(parse_selector("star:3").is_err());
    }
}
