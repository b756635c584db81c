//! Self-contained verification suites with seeded random inputs.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::catalog;
use crate::constructions::{
    build_bundle, c1_sample_check, c2_check, chromatic_number, find_colouring, verify_complete1,
    ConstructionError, Graph, GraphError, DEFAULT_CHROMATIC_BUDGET,
};
use crate::diagram::{Diagram, DiagramError, Edge, Frame, Label};
use crate::formula::{gamma_m, AxiomError, AxiomSpec, DEFAULT_EXPANSION_CAP};
use crate::minimizer::{
    entails_globally, entails_locally, is_globally_minimal, is_locally_minimal, minimize, MinimizerError,
};
use crate::semantics::gamma::GammaChecker;
use crate::semantics::{
    eval, random_valuation, satisfies_e, satisfies_e_globally, ultrafilter_extension_finite, valid_at,
    SemanticsError, DEFAULT_VALUATION_BUDGET,
};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Minimizer(#[from] MinimizerError),
    #[error(transparent)]
    Axiom(#[from] AxiomError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("{0}")]
    Usage(String),
}

/// Knobs shared by the suites. Unset fields fall back to per-suite defaults.
#[derive(Clone, Debug)]
pub struct Options {
    pub m: Option<usize>,
    pub guard_depth: Option<usize>,
    pub graph: Option<Graph>,
    /// Known lower bound on the chromatic number of `graph`.
    pub chromatic_at_least: Option<usize>,
    pub k: usize,
    pub samples: Option<usize>,
    pub seed: u64,
    pub max_size: Option<usize>,
    pub budget_valuations: u64,
    pub cap_expansion: u64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            m: None,
            guard_depth: None,
            graph: None,
            chromatic_at_least: None,
            k: 1,
            samples: None,
            seed: 0,
            max_size: None,
            budget_valuations: DEFAULT_VALUATION_BUDGET,
            cap_expansion: DEFAULT_EXPANSION_CAP,
        }
    }
}

impl Options {
    fn spec(&self, d: &Diagram) -> Result<AxiomSpec, VerifyError> {
        let spec = AxiomSpec::new(d.clone())?;
        Ok(match self.guard_depth {
            Some(g) => spec.with_guard_depth(g),
            None => spec,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub suite: String,
    pub passed: bool,
    pub lines: Vec<String>,
    pub detail: Value,
}

impl SuiteReport {
    fn new(suite: &str, passed: bool, lines: Vec<String>, detail: Value) -> Self {
        SuiteReport { schema_version: REPORT_SCHEMA_VERSION, suite: suite.to_string(), passed, lines, detail }
    }

    pub fn text(&self) -> String {
        let mut out = format!("suite {}: {}\n", self.suite, if self.passed { "PASS" } else { "FAIL" });
        for l in &self.lines {
            out.push_str("  ");
            out.push_str(l);
            out.push('\n');
        }
        out
    }
}

/// A frame with `1..=max_points` points; each possible edge is present with
/// a per-frame density drawn uniformly.
pub fn random_frame(rng: &mut impl Rng, max_points: usize, labels: &[Label]) -> Frame {
    let n = rng.gen_range(1..=max_points.max(1));
    let density: f64 = rng.gen_range(0.1..0.9);
    let mut edges = Vec::new();
    for l in labels {
        for s in 0..n {
            for t in 0..n {
                if rng.gen_bool(density) {
                    edges.push(Edge::new(s, t, l.clone()));
                }
            }
        }
    }
    Frame::new(n, edges).expect("points are in range")
}

/// A rooted diagram: a random tree from `x0` plus up to `extra` further edges.
pub fn random_rooted_diagram(rng: &mut impl Rng, max_points: usize, extra: usize, labels: &[Label]) -> Diagram {
    let n = rng.gen_range(1..=max_points.max(1));
    let mut edges = Vec::new();
    for x in 1..n {
        let l = labels[rng.gen_range(0..labels.len())].clone();
        edges.push(Edge::new(rng.gen_range(0..x), x, l));
    }
    for _ in 0..rng.gen_range(0..=extra) {
        let l = labels[rng.gen_range(0..labels.len())].clone();
        edges.push(Edge::new(rng.gen_range(0..n), rng.gen_range(0..n), l));
    }
    Diagram::new(n, edges).expect("points are in range")
}

fn labels_of(ds: &[&Diagram]) -> Vec<Label> {
    let mut ls: Vec<Label> = ds.iter().flat_map(|d| d.labels().cloned()).collect();
    ls.sort();
    ls.dedup();
    if ls.is_empty() {
        ls.push(Label::new("a").expect("valid label"));
    }
    ls
}

/// Every point satisfying `e^D` validates `gamma^D_m`, by exhaustive
/// valuation search, on random frames.
pub fn soundness(d: &Diagram, opts: &Options) -> Result<SuiteReport, VerifyError> {
    let m = opts.m.unwrap_or(2);
    let frames = opts.samples.unwrap_or(100);
    let max = opts.max_size.unwrap_or(6);
    let spec = opts.spec(d)?;
    let phi = gamma_m(&spec, m, opts.cap_expansion)?;
    let labels = labels_of(&[d]);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut checked = 0usize;
    let mut violations = Vec::new();
    for i in 0..frames {
        let f = random_frame(&mut rng, max, &labels);
        for w in f.points() {
            if satisfies_e(&f, w, d).is_some() {
                checked += 1;
                if !valid_at(&f, w, &phi, opts.budget_valuations)? {
                    violations.push(json!({"frame": i, "point": w, "edges": f.edges()}));
                }
            }
        }
    }
    let passed = violations.is_empty();
    let lines = vec![
        format!("{frames} frames with at most {max} points, gamma^D_{m}"),
        format!("{checked} points satisfy e^D; {} violations", violations.len()),
    ];
    Ok(SuiteReport::new("soundness", passed, lines, json!({"m": m, "frames": frames, "points_checked": checked, "violations": violations})))
}

fn chromatic_evidence(g: &Graph, opts: &Options) -> Result<usize, VerifyError> {
    if let Some(n) = opts.chromatic_at_least {
        return Ok(n);
    }
    chromatic_number(g, DEFAULT_CHROMATIC_BUDGET)?
        .ok_or_else(|| VerifyError::Usage("graph has a loop and admits no colouring".into()))
}

/// C2: a proper `N`-colouring refutes `gamma^D_{N(b-1)+1}` at `w0`.
pub fn c2(d: &Diagram, opts: &Options) -> Result<SuiteReport, VerifyError> {
    let g = opts.graph.clone().unwrap_or_else(|| Graph::complete(2));
    let n = chromatic_evidence(&g, opts)?;
    let colouring = find_colouring(&g, n)
        .ok_or_else(|| VerifyError::Usage(format!("graph has no {n}-colouring")))?;
    let b = build_bundle(d)?;
    let spec = opts.spec(d)?;
    let r = c2_check(&spec, &b, &g, &colouring, n)?;
    let verdict = if r.refuted() { "refuted" } else { "NOT refuted" };
    let lines = vec![
        format!("b = {}, N = {n}, |V| = {}", b.b(), g.vertex_count()),
        format!("C2: γ^D_{} {verdict} at w0", r.m),
    ];
    Ok(SuiteReport::new("c2", r.refuted(), lines, serde_json::to_value(&r).expect("serializable")))
}

/// C1: sampled `k`-generated valuations never refute `gamma^D_m`.
pub fn c1(d: &Diagram, opts: &Options) -> Result<SuiteReport, VerifyError> {
    let b = build_bundle(d)?;
    let bound_bits = b.b() * opts.k;
    let (g, evidence) = match &opts.graph {
        Some(g) => (g.clone(), chromatic_evidence(g, opts)?),
        None if bound_bits <= 10 => {
            let n = (1usize << bound_bits) + 1;
            (Graph::complete(n), n)
        }
        None => {
            return Err(VerifyError::Usage(format!(
                "default graph K_(2^{bound_bits}+1) is too large; pass --graph"
            )))
        }
    };
    let m = opts.m.unwrap_or(2);
    let samples = opts.samples.unwrap_or(200);
    let spec = opts.spec(d)?;
    let r = c1_sample_check(&spec, &b, &g, evidence, opts.k, m, samples, opts.seed)?;
    let passed = r.holds() && r.precondition_met;
    let mut lines = vec![
        format!("b = {}, k = {}, |V| = {}, chromatic evidence {evidence} vs 2^(bk) = {}", b.b(), opts.k, g.vertex_count(), r.colour_bound),
        format!("C1: {samples} samples of γ^D_{m}, {} reached the consequent", r.guarded),
    ];
    lines.push(match &r.counterexample {
        None => "no counterexample".to_string(),
        Some(c) => format!("counterexample at point {} in sample {}", c.point, c.sample),
    });
    if !r.precondition_met {
        lines.push("precondition not met: graph may be paintable in 2^(bk) colours".into());
    }
    Ok(SuiteReport::new("c1", passed, lines, serde_json::to_value(&r).expect("serializable")))
}

/// `e^D` fails at the root of `F± x K_alpha` and holds elsewhere.
pub fn complete1(d: &Diagram, opts: &Options) -> Result<SuiteReport, VerifyError> {
    let alpha_max = opts.max_size.unwrap_or(6);
    let b = build_bundle(d)?;
    let rows = verify_complete1(&b, alpha_max)?;
    let passed = rows.iter().all(|r| r.holds());
    let lines = rows
        .iter()
        .map(|r| {
            format!(
                "K_{}: {} points, e^D at w0 {}, other points {}",
                r.alpha,
                r.points,
                if r.root_refutes { "fails" } else { "HOLDS" },
                if r.others_satisfy { "satisfy" } else { "DO NOT all satisfy" }
            )
        })
        .collect();
    Ok(SuiteReport::new("complete1", passed, lines, serde_json::to_value(&rows).expect("serializable")))
}

/// Random finite frames are isomorphic to their ultrafilter extensions via
/// principal ultrafilters.
pub fn uf3(d: Option<&Diagram>, opts: &Options) -> Result<SuiteReport, VerifyError> {
    let frames = opts.samples.unwrap_or(100);
    let max = opts.max_size.unwrap_or(5);
    let labels = match d {
        Some(d) => labels_of(&[d]),
        None => vec![Label::new("a").expect("valid"), Label::new("b").expect("valid")],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut failures = Vec::new();
    for i in 0..frames {
        let f = random_frame(&mut rng, max, &labels);
        let ue = ultrafilter_extension_finite(&f)?;
        if !ue.is_isomorphism_from(&f) || !ue.ultrafilters.iter().all(|u| u.is_ultrafilter()) {
            failures.push(i);
        }
    }
    let lines = vec![format!("{frames} frames with at most {max} points; {} failures", failures.len())];
    Ok(SuiteReport::new("uf3", failures.is_empty(), lines, json!({"frames": frames, "failures": failures})))
}

/// Minimality flags, idempotence of `minimize`, verdict preservation on
/// random frames, and consistency of the entailment checks.
pub fn minimality(d: &Diagram, opts: &Options) -> Result<SuiteReport, VerifyError> {
    let frames = opts.samples.unwrap_or(100);
    let max = opts.max_size.unwrap_or(5);
    let local = is_locally_minimal(d);
    let global = is_globally_minimal(d)?;
    let m = minimize(d)?;
    let again = minimize(&m.diagram)?;
    let idempotent = again.diagram == m.diagram && again.log.is_empty();
    let labels = labels_of(&[d]);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut disagreements = 0;
    for _ in 0..frames {
        let f = random_frame(&mut rng, max, &labels);
        if satisfies_e_globally(&f, d) != satisfies_e_globally(&f, &m.diagram) {
            disagreements += 1;
        }
    }
    let lines = vec![
        format!("locally minimal: {local}"),
        format!("globally minimal: {global}"),
        format!("minimize: {} deletions, idempotent: {idempotent}", m.log.len()),
        format!("{frames} random frames, {disagreements} global verdicts changed by minimizing"),
    ];
    let passed = idempotent && disagreements == 0 && (!global || local);
    Ok(SuiteReport::new(
        "minimality",
        passed,
        lines,
        json!({"locally_minimal": local, "globally_minimal": global, "idempotent": idempotent, "disagreements": disagreements, "minimal": m.diagram.to_dsl()}),
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub instances: usize,
    pub disagreements: usize,
    pub expansion_skipped: usize,
}

/// The semantic `gamma` checker against evaluation of the expanded formula
/// on random catalog diagrams, frames of at most `max_points`, `m <= 2`.
pub fn gamma_oracle(instances: usize, max_points: usize, seed: u64) -> Result<OracleReport, VerifyError> {
    let diagrams = catalog::all();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut formulas: BTreeMap<(usize, usize), _> = BTreeMap::new();
    let mut disagreements = 0;
    let mut expansion_skipped = 0;
    for _ in 0..instances {
        let di = rng.gen_range(0..diagrams.len());
        let m = rng.gen_range(1..=2);
        let d = &diagrams[di].1;
        let spec = AxiomSpec::new(d.clone())?;
        let entry = formulas.entry((di, m)).or_insert_with(|| gamma_m(&spec, m, DEFAULT_EXPANSION_CAP));
        let Ok(phi) = entry.as_ref() else {
            expansion_skipped += 1;
            continue;
        };
        let f = random_frame(&mut rng, max_points, &labels_of(&[d]));
        let v = random_valuation(&mut rng, f.size(), 1..=m);
        let w = rng.gen_range(0..f.size());
        if GammaChecker::new(&spec, m).holds(&f, w, &v) != eval(&f, &v, w, phi)? {
            disagreements += 1;
        }
    }
    Ok(OracleReport { instances, disagreements, expansion_skipped })
}

#[derive(Clone, Debug, Serialize)]
pub struct EntailmentReport {
    pub pairs: usize,
    /// Pairs with local but not global entailment.
    pub local_without_global: Vec<(String, String)>,
    /// Catalog pairs judged entailing that a random frame refutes.
    pub refuted_entailments: Vec<(String, String)>,
    /// Catalog pairs judged non-entailing, with whether a countermodel was found.
    pub countermodels: Vec<(String, String, bool)>,
}

impl EntailmentReport {
    pub fn consistent(&self) -> bool {
        self.local_without_global.is_empty() && self.refuted_entailments.is_empty()
    }
}

fn is_countermodel(f: &Frame, d1: &Diagram, d2: &Diagram) -> bool {
    satisfies_e_globally(f, d1) && !satisfies_e_globally(f, d2)
}

/// Chase of `d1` up to the rank of `d2`, closed off by a point that is
/// reflexive for every label and reached from the last round.
fn closed_chase(d1: &Diagram, d2: &Diagram) -> Result<Frame, VerifyError> {
    let r = crate::diagram::paths::max_rank(d2)?;
    let c = crate::minimizer::chase(d1, r);
    let circ = c.size();
    let mut edges: Vec<Edge> = c.frame.edges().iter().cloned().collect();
    for l in labels_of(&[d1, d2]) {
        edges.push(Edge::new(circ, circ, l.clone()));
        edges.extend(c.active.iter().map(|&a| Edge::new(a, circ, l.clone())));
    }
    Ok(Frame::new(circ + 1, edges)?)
}

/// Local entailment implies global entailment, and global verdicts survive
/// random countermodel search.
pub fn entailment_consistency(
    random_pairs: usize,
    frames: usize,
    seed: u64,
) -> Result<EntailmentReport, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cat = catalog::all();
    let mut report = EntailmentReport {
        pairs: 0,
        local_without_global: vec![],
        refuted_entailments: vec![],
        countermodels: vec![],
    };
    let a = [Label::new("a").expect("valid")];
    for (n1, d1) in &cat {
        for (n2, d2) in &cat {
            report.pairs += 1;
            let global = entails_globally(d1, d2)?;
            if entails_locally(d1, d2) && !global {
                report.local_without_global.push((n1.to_string(), n2.to_string()));
            }
            let labels = labels_of(&[d1, d2]);
            if global {
                if (0..frames).any(|_| is_countermodel(&random_frame(&mut rng, 5, &labels), d1, d2)) {
                    report.refuted_entailments.push((n1.to_string(), n2.to_string()));
                }
            } else {
                let found = is_countermodel(&closed_chase(d1, d2)?, d1, d2)
                    || (0..frames).any(|_| is_countermodel(&random_frame(&mut rng, 5, &labels), d1, d2));
                report.countermodels.push((n1.to_string(), n2.to_string(), found));
            }
        }
    }
    for _ in 0..random_pairs {
        let d1 = random_rooted_diagram(&mut rng, 4, 3, &a);
        let d2 = random_rooted_diagram(&mut rng, 4, 3, &a);
        report.pairs += 1;
        if entails_locally(&d1, &d2) && !entails_globally(&d1, &d2)? {
            report.local_without_global.push((d1.to_dsl(), d2.to_dsl()));
        }
    }
    Ok(report)
}

/// Runs a named suite. `d` is required by all suites except `uf3`.
pub fn run_suite(name: &str, d: Option<&Diagram>, opts: &Options) -> Result<SuiteReport, VerifyError> {
    let need = || d.ok_or_else(|| VerifyError::Usage(format!("suite {name} needs a diagram")));
    match name {
        "soundness" => soundness(need()?, opts),
        "c2" => c2(need()?, opts),
        "c1" => c1(need()?, opts),
        "complete1" => complete1(need()?, opts),
        "uf3" => uf3(d, opts),
        "minimality" => minimality(need()?, opts),
        other => Err(VerifyError::Usage(format!(
            "unknown suite `{other}`; expected soundness, c2, c1, complete1, uf3 or minimality"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_generators_are_seeded() {
        let a = [Label::new("a").unwrap()];
        let f1 = random_frame(&mut ChaCha8Rng::seed_from_u64(3), 5, &a);
        let f2 = random_frame(&mut ChaCha8Rng::seed_from_u64(3), 5, &a);
        assert_eq!(f1, f2);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            assert!(random_rooted_diagram(&mut rng, 4, 3, &a).is_rooted());
        }
    }

    #[test]
    fn c2_report_line() {
        let r = c2(&catalog::load("D_tri").unwrap(), &Options::default()).unwrap();
        assert!(r.passed);
        assert!(r.lines.iter().any(|l| l.contains("γ^D_7 refuted at w0")));
    }

    #[test]
    fn small_suites_pass() {
        let opts = Options { samples: Some(20), ..Options::default() };
        let d = catalog::load("D_refsucc").unwrap();
        for name in ["soundness", "c1", "complete1", "uf3", "minimality"] {
            let r = run_suite(name, Some(&d), &opts).unwrap();
            assert!(r.passed, "{}", r.text());
        }
        assert!(run_suite("nope", Some(&d), &opts).is_err());
        assert!(run_suite("c2", None, &opts).is_err());
    }

    #[test]
    fn closed_chase_refutes_missing_entailments() {
        let chain = catalog::load("D_chain").unwrap();
        let tri = catalog::load("D_tri").unwrap();
        let f = closed_chase(&chain, &tri).unwrap();
        assert!(is_countermodel(&f, &chain, &tri));
    }
}
