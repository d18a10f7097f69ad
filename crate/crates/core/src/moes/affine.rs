//! Weight space re-embedded so that corner separations follow inter-map distances.
//!
//! Corners of the transformed simplex correspond to the maps. The affine map back
//! to weights is the barycentric-coordinate map of that simplex, so a point's
//! weight vector is exactly its barycentric coordinates.

use serde::{Deserialize, Serialize};

use super::weights::{check_map_count, lattice_moves, WeightVector};
use super::MapFamily;
use crate::{Error, Result};

/// Simplices with smaller volume (length for two maps) are degenerate.
pub const DEGENERATE_VOLUME: f64 = 1e-9;
/// Slack on barycentric coordinates when testing containment.
pub const CONTAINMENT_TOL: f64 = 1e-9;

/// How a pairwise map distance becomes an edge length.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeLength {
    /// Square root of the ergodic metric between the maps (a true metric).
    #[default]
    Sqrt,
    /// The ergodic metric between the maps, unmodified.
    Raw,
}

impl EdgeLength {
    pub fn apply(self, e: f64) -> f64 {
        match self {
            EdgeLength::Sqrt => e.max(0.0).sqrt(),
            EdgeLength::Raw => e,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineWeightSpace {
    m: usize,
    /// Corner `i` corresponds to map `i`. For two maps the second coordinate is 0.
    corners: Vec<[f64; 2]>,
    edges: Vec<Vec<f64>>,
    volume: f64,
    degenerate: bool,
}

impl AffineWeightSpace {
    /// Places corners from a symmetric table of edge lengths: the first corner
    /// at the origin, the second on the x axis, the third by the law of cosines.
    pub fn from_edges(edges: &[Vec<f64>]) -> Result<Self> {
        let m = edges.len();
        check_map_count(m)?;
        for (i, row) in edges.iter().enumerate() {
            if row.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    got: row.len(),
                });
            }
            for (j, &e) in row.iter().enumerate() {
                if !(e.is_finite() && e >= 0.0) || (e - edges[j][i]).abs() > 1e-12 * e.max(1.0) {
                    return Err(Error::param("edges", "must be a symmetric nonnegative table"));
                }
            }
        }
        let d12 = edges[0][1];
        let (corners, volume) = if m == 2 {
            (vec![[0.0, 0.0], [d12, 0.0]], d12)
        } else {
            let (d13, d23) = (edges[0][2], edges[1][2]);
            let scale = d12.max(d13).max(d23).max(f64::MIN_POSITIVE);
            for (a, b, c) in [(d12, d13, d23), (d13, d23, d12), (d23, d12, d13)] {
                if a > b + c + 1e-9 * scale {
                    return Err(Error::TriangleInequality(format!(
                        "edges ({d12}, {d13}, {d23})"
                    )));
                }
            }
            if d12 <= DEGENERATE_VOLUME {
                (vec![[0.0, 0.0], [0.0, 0.0], [d13, 0.0]], 0.0)
            } else {
                let zx = (d13 * d13 + d12 * d12 - d23 * d23) / (2.0 * d12);
                let zy = (d13 * d13 - zx * zx).max(0.0).sqrt();
                (vec![[0.0, 0.0], [d12, 0.0], [zx, zy]], 0.5 * d12 * zy)
            }
        };
        Ok(Self {
            m,
            corners,
            edges: edges.to_vec(),
            volume,
            degenerate: volume < DEGENERATE_VOLUME,
        })
    }

    pub fn corners(&self) -> &[[f64; 2]] {
        &self.corners
    }

    pub fn edges(&self) -> &[Vec<f64>] {
        &self.edges
    }

    pub fn maps(&self) -> usize {
        self.m
    }

    /// Length (two maps) or area (three maps).
    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Barycentric coordinates of `p`; negative entries mean `p` lies outside.
    pub fn barycentric(&self, p: [f64; 2]) -> Vec<f64> {
        let c = &self.corners;
        if self.m == 2 {
            let w2 = p[0] / c[1][0];
            vec![1.0 - w2, w2]
        } else {
            // p - c0 = a (c1 - c0) + b (c2 - c0); c0 is the origin, c1 on the x axis
            let b = p[1] / c[2][1];
            let a = (p[0] - b * c[2][0]) / c[1][0];
            vec![1.0 - a - b, a, b]
        }
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        (self.m == 3 || p[1] == 0.0) && self.barycentric(p).iter().all(|&l| l >= -CONTAINMENT_TOL)
    }

    /// The forward map: a point of the transformed simplex to the weight it scalarizes with.
    pub fn to_weight(&self, p: [f64; 2]) -> Result<WeightVector> {
        if self.degenerate {
            return Err(Error::DegenerateWeightSpace);
        }
        WeightVector::clipped(&self.barycentric(p))
    }

    /// The inverse map: `sum_i w_i corner_i`.
    pub fn from_weight(&self, w: &WeightVector) -> Result<[f64; 2]> {
        if w.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: w.len(),
            });
        }
        let mut p = [0.0; 2];
        for (wi, c) in w.as_slice().iter().zip(&self.corners) {
            p[0] += wi * c[0];
            p[1] += wi * c[1];
        }
        Ok(p)
    }
}

/// Builds the transformed simplex from a family's pairwise ergodic distances.
pub fn build_affine_space(family: &MapFamily, edge: EdgeLength) -> Result<AffineWeightSpace> {
    let edges: Vec<Vec<f64>> = family
        .distances()
        .iter()
        .map(|row| row.iter().map(|&e| edge.apply(e)).collect())
        .collect();
    AffineWeightSpace::from_edges(&edges)
}

/// Moves `step` along each coordinate axis of the transformed simplex and maps the
/// points that stay inside back to weights.
pub fn adaptive_neighbors(
    w: &WeightVector,
    space: &AffineWeightSpace,
    step: f64,
) -> Result<Vec<WeightVector>> {
    if space.is_degenerate() {
        return Err(Error::DegenerateWeightSpace);
    }
    if !(step > 0.0) {
        return Err(Error::param("adaptive_step", "must be positive"));
    }
    let p = space.from_weight(w)?;
    lattice_moves(space.maps())
        .iter()
        .map(|mv| [p[0] + mv[0] as f64 * step, p[1] + mv[1] as f64 * step])
        .filter(|q| space.contains(*q))
        .map(|q| space.to_weight(q))
        .collect()
}
