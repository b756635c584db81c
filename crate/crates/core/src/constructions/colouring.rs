//! Colourings of `G` against `gamma^D_m` on `F± x G`.
//!
//! A proper `N`-colouring yields a valuation refuting `gamma^D_{N(b-1)+1}` at
//! the root. Conversely, when `G` needs more than `2^(bk)` colours, no
//! `k`-generated valuation refutes any `gamma^D_m`; that direction is only
//! sampled here.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{pseudoproduct, Colouring, ConstructionBundle, ConstructionError, Graph, Pseudoproduct};
use crate::formula::AxiomSpec;
use crate::semantics::gamma::GammaChecker;
use crate::semantics::{satisfies_e, Valuation};

/// Variable index of `p_0`.
pub fn root_variable() -> usize {
    1
}

/// Variable index of `p_i^c` for `1 <= i <= b - 1` and `1 <= c <= n`.
pub fn layer_variable(i: usize, c: usize, n: usize) -> usize {
    1 + (i - 1) * n + c
}

/// `p_0` true exactly at `w0`; `p_i^c` true at `(w_i, v)` when `v` has colour `c`.
pub fn refuting_valuation(b: &ConstructionBundle, pp: &Pseudoproduct, c: &Colouring, n: usize) -> Valuation {
    let mut theta = Valuation::new().with(root_variable(), [0]);
    for i in 1..b.b() {
        for v in 0..pp.vertices {
            theta.insert(layer_variable(i, c.colour(v), n), pp.point(i, v));
        }
    }
    theta
}

/// `m = N(b - 1) + 1`.
pub fn refuted_index(b: &ConstructionBundle, n: usize) -> usize {
    n * (b.b() - 1) + 1
}

#[derive(Clone, Debug, Serialize)]
pub struct C2Report {
    pub colours: usize,
    pub m: usize,
    pub valuation: Valuation,
    /// `gamma^D_m` evaluated at `w0` under the valuation.
    pub holds_at_root: bool,
}

impl C2Report {
    pub fn refuted(&self) -> bool {
        !self.holds_at_root
    }
}

/// Builds the product, the valuation, and evaluates `gamma^D_{N(b-1)+1}` at `w0`.
pub fn c2_check(
    spec: &AxiomSpec,
    b: &ConstructionBundle,
    g: &Graph,
    c: &Colouring,
    n: usize,
) -> Result<C2Report, ConstructionError> {
    if !c.is_proper_for(g) || c.count() > n {
        return Err(ConstructionError::BadColouring);
    }
    let pp = pseudoproduct(b, g)?;
    let valuation = refuting_valuation(b, &pp, c, n);
    let m = refuted_index(b, n);
    let holds_at_root = GammaChecker::new(spec, m).holds(&pp.frame, 0, &valuation);
    Ok(C2Report { colours: n, m, valuation, holds_at_root })
}

#[derive(Clone, Debug, Serialize)]
pub struct C1Report {
    pub k: usize,
    pub m: usize,
    pub samples: usize,
    /// `2^(bk)`; the sampled statement needs more colours than this.
    pub colour_bound: u128,
    pub precondition_met: bool,
    /// Samples whose guard held at some point, so the consequent was tested.
    pub guarded: usize,
    pub counterexample: Option<C1Counterexample>,
}

#[derive(Clone, Debug, Serialize)]
pub struct C1Counterexample {
    pub sample: usize,
    pub point: usize,
    pub valuation: Valuation,
}

impl C1Report {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// A random `k`-generated valuation over `1..=m`: `k` distinct variables, each
/// true at a point with a per-variable probability drawn uniformly.
pub fn random_k_generated(rng: &mut impl Rng, size: usize, k: usize, m: usize) -> Valuation {
    let mut v = Valuation::new();
    for var in sample(rng, m, k.min(m)).into_iter().map(|i| i + 1) {
        let density: f64 = rng.gen();
        v.set(var, (0..size).filter(|_| rng.gen_bool(density)));
    }
    v
}

/// Samples `k`-generated valuations on `F± x G` and checks `gamma^D_m` at
/// every point. `chromatic_at_least` is evidence that `G` needs at least
/// that many colours.
pub fn c1_sample_check(
    spec: &AxiomSpec,
    b: &ConstructionBundle,
    g: &Graph,
    chromatic_at_least: usize,
    k: usize,
    m: usize,
    samples: usize,
    seed: u64,
) -> Result<C1Report, ConstructionError> {
    let pp = pseudoproduct(b, g)?;
    let colour_bound = 1u128.checked_shl((b.b() * k) as u32).unwrap_or(u128::MAX);
    let checker = GammaChecker::new(spec, m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut guarded = 0;
    let mut counterexample = None;
    for s in 0..samples {
        let valuation = random_k_generated(&mut rng, pp.size(), k, m);
        let mut any_guard = false;
        let bad = pp.frame.points().find(|&w| {
            let guard = checker.guard_holds(&pp.frame, w, &valuation);
            any_guard |= guard;
            guard && !checker.consequent_holds(&pp.frame, w, &valuation)
        });
        guarded += usize::from(any_guard);
        if let Some(point) = bad {
            counterexample = Some(C1Counterexample { sample: s, point, valuation });
            break;
        }
    }
    Ok(C1Report {
        k,
        m,
        samples,
        colour_bound,
        precondition_met: (chromatic_at_least as u128) > colour_bound,
        guarded,
        counterexample,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Complete1Row {
    pub alpha: usize,
    pub points: usize,
    /// `e^D` fails at `w0`.
    pub root_refutes: bool,
    /// `e^D` holds at every other point.
    pub others_satisfy: bool,
}

impl Complete1Row {
    pub fn holds(&self) -> bool {
        self.root_refutes && self.others_satisfy
    }
}

/// `e^D` on `F± x K_alpha` for `alpha = 1..=alpha_max`.
pub fn verify_complete1(b: &ConstructionBundle, alpha_max: usize) -> Result<Vec<Complete1Row>, ConstructionError> {
    (1..=alpha_max)
        .map(|alpha| {
            let pp = pseudoproduct(b, &Graph::complete(alpha))?;
            let d = &b.diagram;
            Ok(Complete1Row {
                alpha,
                points: pp.size(),
                root_refutes: satisfies_e(&pp.frame, 0, d).is_none(),
                others_satisfy: (1..pp.size()).all(|w| satisfies_e(&pp.frame, w, d).is_some()),
            })
        })
        .collect()
}
