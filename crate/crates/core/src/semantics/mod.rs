//! Kripke semantics: truth, validity, homomorphism search and the semantic
//! reading of the colour axioms.

pub mod bisim;
pub mod gamma;
pub mod hom;
pub mod ultrafilter;

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::diagram::Frame;
use crate::formula::Formula;

pub use bisim::{is_bisimulation, is_pmorphism};
pub use gamma::gamma_semantic;
pub use hom::{
    all_homs, count_homs, failing_points, find_hom, satisfies_e, satisfies_e_globally, HomAssignment,
};
pub use ultrafilter::{ultrafilter_extension_finite, UEResult, Ultrafilter, UE_MAX_POINTS};

/// Default ceiling on the number of valuations `valid_at` may enumerate.
pub const DEFAULT_VALUATION_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("nominal j{0} has no meaning in a plain Kripke model")]
    Nominal(usize),
    #[error("point {point} is outside a frame of {size} points")]
    PointOutOfRange { point: usize, size: usize },
    #[error("exhaustive search needs 2^{bits} valuations, above the budget of {budget}; use sampled mode")]
    BudgetExceeded { bits: u64, budget: u64 },
    #[error("frame has {size} points; the ultrafilter extension is materialised only up to {max}")]
    FrameTooLarge { size: usize, max: usize },
}

/// Variable index -> set of points. Unmapped variables denote the empty set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Valuation {
    sets: BTreeMap<usize, BTreeSet<usize>>,
}

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: usize, points: impl IntoIterator<Item = usize>) -> Self {
        self.set(var, points);
        self
    }

    pub fn set(&mut self, var: usize, points: impl IntoIterator<Item = usize>) {
        let s: BTreeSet<usize> = points.into_iter().collect();
        if s.is_empty() {
            self.sets.remove(&var);
        } else {
            self.sets.insert(var, s);
        }
    }

    pub fn insert(&mut self, var: usize, point: usize) {
        self.sets.entry(var).or_default().insert(point);
    }

    pub fn get(&self, var: usize) -> Option<&BTreeSet<usize>> {
        self.sets.get(&var)
    }

    pub fn holds(&self, var: usize, point: usize) -> bool {
        self.sets.get(&var).is_some_and(|s| s.contains(&point))
    }

    /// Variables with a nonempty extension.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.sets.keys().copied()
    }

    /// At most `k` variables are nonempty.
    pub fn is_k_generated(&self, k: usize) -> bool {
        self.sets.len() <= k
    }

    pub fn check(&self, f: &Frame) -> Result<(), SemanticsError> {
        for &p in self.sets.values().flatten() {
            if p >= f.size() {
                return Err(SemanticsError::PointOutOfRange { point: p, size: f.size() });
            }
        }
        Ok(())
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(self.sets.iter().map(|(k, v)| (format!("p{k}"), v)))
    }
}

impl<'de> Deserialize<'de> for Valuation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw: BTreeMap<String, Vec<usize>> = BTreeMap::deserialize(d)?;
        let mut v = Valuation::new();
        for (name, points) in raw {
            let k = name
                .strip_prefix('p')
                .and_then(|n| n.parse::<usize>().ok())
                .ok_or_else(|| serde::de::Error::custom(format!("bad variable name `{name}`")))?;
            v.set(k, points);
        }
        Ok(v)
    }
}

/// Truth sets evaluated for up to 64 valuations at once: bit `i` of
/// `masks[x]` is the truth value at point `x` under valuation `i`.
fn truth_masks(
    f: &Frame,
    phi: &Formula,
    atom: &dyn Fn(usize) -> Vec<u64>,
) -> Result<Vec<u64>, SemanticsError> {
    let n = f.size();
    Ok(match phi {
        Formula::Bot => vec![0; n],
        Formula::Var(k) => atom(*k),
        Formula::Nominal(k) => return Err(SemanticsError::Nominal(*k)),
        Formula::Not(a) => truth_masks(f, a, atom)?.into_iter().map(|m| !m).collect(),
        Formula::And(xs) => {
            let mut acc = vec![!0u64; n];
            for x in xs {
                for (a, m) in acc.iter_mut().zip(truth_masks(f, x, atom)?) {
                    *a &= m;
                }
            }
            acc
        }
        Formula::Or(xs) => {
            let mut acc = vec![0u64; n];
            for x in xs {
                for (a, m) in acc.iter_mut().zip(truth_masks(f, x, atom)?) {
                    *a |= m;
                }
            }
            acc
        }
        Formula::Implies(a, b) => {
            let (ta, tb) = (truth_masks(f, a, atom)?, truth_masks(f, b, atom)?);
            ta.into_iter().zip(tb).map(|(x, y)| !x | y).collect()
        }
        Formula::Diamond(l, a) => {
            let ta = truth_masks(f, a, atom)?;
            match f.relation(l) {
                None => vec![0; n],
                Some(r) => {
                    (0..n).map(|x| r.successors(x).iter().fold(0, |acc, &y| acc | ta[y])).collect()
                }
            }
        }
        Formula::Box(l, a) => {
            let ta = truth_masks(f, a, atom)?;
            match f.relation(l) {
                None => vec![!0; n],
                Some(r) => {
                    (0..n).map(|x| r.successors(x).iter().fold(!0, |acc, &y| acc & ta[y])).collect()
                }
            }
        }
    })
}

fn single_atoms<'a>(f: &Frame, v: &'a Valuation) -> impl Fn(usize) -> Vec<u64> + 'a {
    let n = f.size();
    move |k| (0..n).map(|x| if v.holds(k, x) { !0 } else { 0 }).collect()
}

/// Truth set of `phi` under `v`.
pub fn truth_set(f: &Frame, v: &Valuation, phi: &Formula) -> Result<Vec<bool>, SemanticsError> {
    v.check(f)?;
    Ok(truth_masks(f, phi, &single_atoms(f, v))?.into_iter().map(|m| m & 1 == 1).collect())
}

/// `F, v, w |= phi`. Errors on nominals.
pub fn eval(f: &Frame, v: &Valuation, w: usize, phi: &Formula) -> Result<bool, SemanticsError> {
    if w >= f.size() {
        return Err(SemanticsError::PointOutOfRange { point: w, size: f.size() });
    }
    Ok(truth_set(f, v, phi)?[w])
}

/// Lane pattern for bit `b < 6` of the lane index.
const LANE_PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// The valuation with index `idx`: bit `vi * size + x` puts `x` into the
/// `vi`-th variable of `vars`.
fn valuation_from_index(vars: &[usize], size: usize, idx: u64) -> Valuation {
    let mut v = Valuation::new();
    for (vi, &var) in vars.iter().enumerate() {
        v.set(var, (0..size).filter(|x| idx >> (vi * size + x) & 1 == 1));
    }
    v
}

/// Searches all valuations of `phi`'s variables for one refuting `phi` at
/// `w`. Returns the least such valuation in enumeration order.
pub fn find_countervaluation(
    f: &Frame,
    w: usize,
    phi: &Formula,
    budget: u64,
) -> Result<Option<Valuation>, SemanticsError> {
    let n = f.size();
    if w >= n {
        return Err(SemanticsError::PointOutOfRange { point: w, size: n });
    }
    if let Some(k) = phi.nominals().into_iter().next() {
        return Err(SemanticsError::Nominal(k));
    }
    let vars: Vec<usize> = phi.variables().into_iter().collect();
    let bits = (vars.len() * n) as u64;
    if bits >= 63 || 1u64 << bits > budget {
        return Err(SemanticsError::BudgetExceeded { bits, budget });
    }
    let lane_bits = bits.min(6);
    let live_lanes = if lane_bits == 6 { !0u64 } else { (1u64 << (1u64 << lane_bits)) - 1 };
    let batches = 1u64 << (bits - lane_bits);
    let var_pos: BTreeMap<usize, usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    for batch in 0..batches {
        let atom = |k: usize| -> Vec<u64> {
            let Some(&vi) = var_pos.get(&k) else { return vec![0; n] };
            (0..n)
                .map(|x| {
                    let b = (vi * n + x) as u64;
                    if b < 6 {
                        LANE_PATTERNS[b as usize]
                    } else if batch >> (b - 6) & 1 == 1 {
                        !0
                    } else {
                        0
                    }
                })
                .collect()
        };
        let at_w = truth_masks(f, phi, &atom)?[w];
        let failures = !at_w & live_lanes;
        if failures != 0 {
            let idx = (batch << lane_bits) | failures.trailing_zeros() as u64;
            return Ok(Some(valuation_from_index(&vars, n, idx)));
        }
    }
    Ok(None)
}

/// `F, w |= phi` for every valuation, by exhaustive enumeration within `budget`.
pub fn valid_at(f: &Frame, w: usize, phi: &Formula, budget: u64) -> Result<bool, SemanticsError> {
    Ok(find_countervaluation(f, w, phi, budget)?.is_none())
}

/// Outcome of a sampled validity check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sampled {
    pub samples: usize,
    pub counterexample: Option<Valuation>,
}

impl Sampled {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// A uniformly random valuation of `vars` (each point in each set with probability 1/2).
pub fn random_valuation(rng: &mut impl Rng, size: usize, vars: impl IntoIterator<Item = usize>) -> Valuation {
    let mut v = Valuation::new();
    for var in vars {
        v.set(var, (0..size).filter(|_| rng.gen_bool(0.5)));
    }
    v
}

/// Evaluates `phi` at `w` under `samples` seeded random valuations.
pub fn valid_sampled(
    f: &Frame,
    w: usize,
    phi: &Formula,
    samples: usize,
    seed: u64,
) -> Result<Sampled, SemanticsError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vars = phi.variables();
    for i in 0..samples {
        let v = random_valuation(&mut rng, f.size(), vars.iter().copied());
        if !eval(f, &v, w, phi)? {
            return Ok(Sampled { samples: i + 1, counterexample: Some(v) });
        }
    }
    Ok(Sampled { samples, counterexample: None })
}
