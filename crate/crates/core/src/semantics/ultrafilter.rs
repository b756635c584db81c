//! Ultrafilter extensions of finite frames.
//!
//! Subsets of the carrier are bitmasks; an ultrafilter is stored as the full
//! membership table over all `2^n` subsets, and the extension relation is
//! computed from its definition: `u R v` iff `<l>X` is in `u` for every `X`
//! in `v`, where `<l>X` is the set of points with an `l`-successor in `X`.

use serde::Serialize;

use super::SemanticsError;
use crate::diagram::{Edge, Frame, Label};

/// Largest carrier whose extension is materialised.
pub const UE_MAX_POINTS: usize = 16;

/// A family of subsets of `0..n`, as a membership bit table indexed by mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ultrafilter {
    points: usize,
    members: Vec<u64>,
}

impl Ultrafilter {
    /// `pi_a = { X : a in X }`.
    pub fn principal(points: usize, a: usize) -> Self {
        let mut members = vec![0u64; (1usize << points).div_ceil(64)];
        for x in 0..1u32 << points {
            if x >> a & 1 == 1 {
                members[x as usize / 64] |= 1 << (x % 64);
            }
        }
        Ultrafilter { points, members }
    }

    pub fn contains(&self, set: u32) -> bool {
        self.members[set as usize / 64] >> (set % 64) & 1 == 1
    }

    fn full(&self) -> u32 {
        ((1u64 << self.points) - 1) as u32
    }

    /// Proper filter (contains the carrier, not the empty set, closed under
    /// supersets and intersections) that contains each set or its complement.
    pub fn is_ultrafilter(&self) -> bool {
        let full = self.full();
        if !self.contains(full) || self.contains(0) {
            return false;
        }
        let sets: Vec<u32> = (0..=full).filter(|&x| self.contains(x)).collect();
        let upward = sets.iter().all(|&x| {
            // Every one-point enlargement stays inside; that generates all supersets.
            (0..self.points).all(|b| self.contains(x | 1 << b))
        });
        // An upward-closed finite family is closed under meets iff it holds
        // the meet of all its members.
        let meets = self.contains(sets.iter().fold(full, |acc, &x| acc & x));
        let decides = (0..=full).all(|x| self.contains(x) != self.contains(full & !x));
        upward && meets && decides
    }

    /// Index of the unique block of `partition` that belongs to the filter,
    /// or `None` when zero or several do.
    pub fn unique_block(&self, partition: &[u32]) -> Option<usize> {
        let hits: Vec<usize> = (0..partition.len()).filter(|&i| self.contains(partition[i])).collect();
        match hits.as_slice() {
            [i] => Some(*i),
            _ => None,
        }
    }
}

/// The extension frame, with `iso[a]` the point standing for `pi_a`.
#[derive(Clone, Debug, Serialize)]
pub struct UEResult {
    pub frame: Frame,
    pub iso: Vec<usize>,
    #[serde(skip)]
    pub ultrafilters: Vec<Ultrafilter>,
}

impl UEResult {
    /// `a R b` iff `iso(a) R^ue iso(b)`, for every pair and label.
    pub fn is_isomorphism_from(&self, f: &Frame) -> bool {
        let labels: Vec<&Label> = f.labels().chain(self.frame.labels()).collect();
        self.iso.len() == f.size()
            && self.frame.size() == f.size()
            && f.points().all(|a| {
                f.points().all(|b| {
                    labels
                        .iter()
                        .all(|l| f.has_edge(a, b, l) == self.frame.has_edge(self.iso[a], self.iso[b], l))
                })
            })
    }
}

/// Materialises the principal ultrafilters of a finite frame and the
/// extension relations between them.
pub fn ultrafilter_extension_finite(f: &Frame) -> Result<UEResult, SemanticsError> {
    let n = f.size();
    if n > UE_MAX_POINTS {
        return Err(SemanticsError::FrameTooLarge { size: n, max: UE_MAX_POINTS });
    }
    let ultrafilters: Vec<Ultrafilter> = (0..n).map(|a| Ultrafilter::principal(n, a)).collect();
    debug_assert!(ultrafilters.iter().all(Ultrafilter::is_ultrafilter));
    let full: u32 = if n == 0 { 0 } else { ((1u64 << n) - 1) as u32 };
    let mut edges = Vec::new();
    for l in f.labels() {
        // pre[X] = <l>X, built one lowest bit at a time.
        let pred_mask: Vec<u32> =
            (0..n).map(|y| f.predecessors(y, l).iter().fold(0u32, |m, &x| m | 1 << x)).collect();
        let mut pre = vec![0u32; 1usize << n];
        for x in 1..=full {
            let low = x.trailing_zeros() as usize;
            pre[x as usize] = pre[(x & (x - 1)) as usize] | pred_mask[low];
        }
        for (i, u) in ultrafilters.iter().enumerate() {
            for (j, v) in ultrafilters.iter().enumerate() {
                if (0..=full).filter(|&x| v.contains(x)).all(|x| u.contains(pre[x as usize])) {
                    edges.push(Edge::new(i, j, l.clone()));
                }
            }
        }
    }
    let frame = Frame::new(n, edges).expect("indices lie in range");
    Ok(UEResult { frame, iso: (0..n).collect(), ultrafilters })
}
