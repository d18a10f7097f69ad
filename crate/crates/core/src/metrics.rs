//! Dominance, Pareto filtering, hypervolume and inter-map distances.
//!
//! All objectives are minimized.

use log::warn;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

use crate::fourier::{self, SpectralBasis, SpectralCoefficients};
use crate::moes::SolutionRecord;
use crate::{Error, Result};

/// `a` dominates `b`: no worse in every component and strictly better in one.
pub fn dominates(a: &[f64], b: &[f64]) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    Ok(dominates_unchecked(a, b))
}

fn dominates_unchecked(a: &[f64], b: &[f64]) -> bool {
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        strict |= x < y;
    }
    strict
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Indices of the vectors no other vector dominates, in input order.
///
/// A dominator always precedes its victim lexicographically, so a single pass in
/// lexicographic order only has to test candidates against the nondominated
/// vectors found so far.
pub fn pareto_filter<V: AsRef<[f64]>>(vectors: &[V]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..vectors.len()).collect();
    order.sort_by(|&i, &j| lex_cmp(vectors[i].as_ref(), vectors[j].as_ref()));
    let mut kept: Vec<usize> = Vec::new();
    for i in order {
        let v = vectors[i].as_ref();
        if !kept
            .iter()
            .any(|&k| dominates_unchecked(vectors[k].as_ref(), v))
        {
            kept.push(i);
        }
    }
    kept.sort_unstable();
    kept
}

/// Lebesgue measure of the union of boxes `[p, reference]`, for one to three objectives.
///
/// Points that exceed the reference in any component are dropped with a warning.
pub fn hypervolume<V: AsRef<[f64]>>(front: &[V], reference: &[f64]) -> Result<f64> {
    let m = reference.len();
    if !(1..=3).contains(&m) {
        return Err(Error::param(
            "reference",
            format!("hypervolume supports 1 to 3 objectives, got {m}"),
        ));
    }
    let mut pts: Vec<&[f64]> = Vec::with_capacity(front.len());
    let mut clipped = 0;
    for p in front {
        let p = p.as_ref();
        if p.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: p.len(),
            });
        }
        if p.iter().zip(reference).all(|(x, r)| x <= r) {
            pts.push(p);
        } else {
            clipped += 1;
        }
    }
    if clipped > 0 {
        warn!("hypervolume: {clipped} point(s) beyond the reference point ignored");
    }
    if pts.is_empty() {
        warn!("hypervolume of an empty front is 0");
        return Ok(0.0);
    }
    Ok(match m {
        1 => reference[0] - pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min),
        2 => {
            let mut xy: Vec<[f64; 2]> = pts.iter().map(|p| [p[0], p[1]]).collect();
            sweep_2d(&mut xy, [reference[0], reference[1]])
        }
        _ => slice_3d(&pts, reference),
    })
}

/// Sorted sweep over x; each nondominated point adds the strip up to the next x.
fn sweep_2d(pts: &mut [[f64; 2]], r: [f64; 2]) -> f64 {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut area = 0.0;
    let mut best_y = r[1];
    let mut stair: Vec<[f64; 2]> = Vec::with_capacity(pts.len());
    for p in pts.iter() {
        if p[1] < best_y {
            stair.push(*p);
            best_y = p[1];
        }
    }
    for (i, p) in stair.iter().enumerate() {
        let next_x = stair.get(i + 1).map_or(r[0], |q| q[0]);
        area += (next_x - p[0]) * (r[1] - p[1]);
    }
    area
}

/// Slabs between consecutive z levels, each measured by a 2-D sweep.
fn slice_3d(pts: &[&[f64]], r: &[f64]) -> f64 {
    let mut sorted: Vec<&[f64]> = pts.to_vec();
    sorted.sort_by(|a, b| a[2].total_cmp(&b[2]));
    let mut volume = 0.0;
    let mut active: Vec<[f64; 2]> = Vec::with_capacity(sorted.len());
    for (i, p) in sorted.iter().enumerate() {
        active.push([p[0], p[1]]);
        let top = sorted.get(i + 1).map_or(r[2], |q| q[2]);
        let depth = top - p[2];
        if depth > 0.0 {
            volume += depth * sweep_2d(&mut active, [r[0], r[1]]);
        }
    }
    volume
}

/// Ergodic metric between two maps' coefficient tables.
pub fn map_distance(
    a: &SpectralCoefficients,
    b: &SpectralCoefficients,
    basis: &SpectralBasis,
) -> Result<f64> {
    fourier::ergodic_metric(a, b, basis)
}

/// Solution records with their nondominated subset and hypervolume reference.
#[derive(Clone, Debug)]
pub struct ParetoArchive {
    pub records: Vec<SolutionRecord>,
    pub nondominated: Vec<usize>,
    pub reference: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontSummary {
    pub hypervolume: f64,
    pub reference: Vec<f64>,
    pub solutions: usize,
    pub nondominated: usize,
    /// Solutions ignored because they exceed the reference point.
    pub beyond_reference: usize,
}

impl ParetoArchive {
    /// Archive with the default reference point `(1, ..., 1)`.
    pub fn new(records: Vec<SolutionRecord>) -> Self {
        let m = records.first().map_or(0, |r| r.ergodic_vector.len());
        Self::with_reference(records, vec![1.0; m])
    }

    pub fn with_reference(records: Vec<SolutionRecord>, reference: Vec<f64>) -> Self {
        let nondominated = pareto_filter(
            &records
                .iter()
                .map(|r| r.ergodic_vector.as_slice())
                .collect::<Vec<_>>(),
        );
        Self {
            records,
            nondominated,
            reference,
        }
    }

    pub fn front(&self) -> Vec<&[f64]> {
        self.nondominated
            .iter()
            .map(|&i| self.records[i].ergodic_vector.as_slice())
            .collect()
    }

    pub fn is_nondominated(&self, i: usize) -> bool {
        self.nondominated.binary_search(&i).is_ok()
    }

    pub fn hypervolume(&self) -> Result<f64> {
        hypervolume(&self.front(), &self.reference)
    }

    pub fn summary(&self) -> Result<FrontSummary> {
        Ok(FrontSummary {
            hypervolume: self.hypervolume()?,
            reference: self.reference.clone(),
            solutions: self.records.len(),
            nondominated: self.nondominated.len(),
            beyond_reference: self
                .records
                .iter()
                .filter(|r| {
                    r.ergodic_vector
                        .iter()
                        .zip(&self.reference)
                        .any(|(e, r)| e > r)
                })
                .count(),
        })
    }
}
