use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Components at or below this are treated as zero when testing strict positivity.
pub const ZERO_TOL: f64 = 1e-9;
/// Floor applied when a corner (single-map) weight is requested explicitly.
pub const CORNER_CLIP: f64 = 1e-6;

/// A point of the open simplex: all components positive, summing to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::Empty("weight vector"));
        }
        if let Some(c) = w.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
            return Err(Error::param("weight", format!("component {c} is not positive")));
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::param("weight", format!("components sum to {sum}, not 1")));
        }
        Ok(Self(w))
    }

    /// Floors every component at [`CORNER_CLIP`] and renormalizes.
    pub fn clipped(w: &[f64]) -> Result<Self> {
        let floored: Vec<f64> = w.iter().map(|c| c.max(CORNER_CLIP)).collect();
        let sum: f64 = floored.iter().sum();
        Self::new(floored.into_iter().map(|c| c / sum).collect())
    }

    pub fn barycenter(m: usize) -> Self {
        Self(vec![1.0 / m as f64; m])
    }

    /// Preference for map `i` alone, clipped into the open simplex.
    pub fn corner(m: usize, i: usize) -> Self {
        let mut w = vec![0.0; m];
        w[i] = 1.0;
        Self::clipped(&w).expect("clipped corner is a valid weight")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub(crate) fn from_chart(chart: &[f64]) -> Option<Self> {
        let last = 1.0 - chart.iter().sum::<f64>();
        let mut w = chart.to_vec();
        w.push(last);
        if w.iter().any(|c| *c <= ZERO_TOL) {
            return None;
        }
        Some(Self(w))
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(w: WeightVector) -> Self {
        w.0
    }
}

/// Integer offsets of a lattice point from the initial weight, one per sampling axis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeKey(pub Vec<i32>);

impl LatticeKey {
    pub fn origin(axes: usize) -> Self {
        Self(vec![0; axes])
    }

    /// Number of lattice steps from the origin.
    pub fn radius(&self) -> u32 {
        self.0.iter().map(|i| i.unsigned_abs()).sum()
    }

    pub(crate) fn offset(&self, delta: &[i32]) -> Self {
        Self(self.0.iter().zip(delta).map(|(a, b)| a + b).collect())
    }
}

/// Lattice moves in push order: `+`/`-` along the single axis for two maps,
/// `(0,+) (0,-) (+,0) (-,0)` for three.
pub(crate) fn lattice_moves(m: usize) -> &'static [[i32; 2]] {
    match m {
        2 => &[[1, 0], [-1, 0]],
        _ => &[[0, 1], [0, -1], [1, 0], [-1, 0]],
    }
}

pub(crate) fn check_map_count(m: usize) -> Result<()> {
    if m == 2 || m == 3 {
        Ok(())
    } else {
        Err(Error::param("maps", format!("neighbor sampling supports 2 or 3 maps, got {m}")))
    }
}

/// Neighbors `d` away along the simplex chart `(w_1, ..., w_{m-1})`; the last
/// component is implied. Candidates leaving the open simplex are dropped.
pub fn basic_neighbors(w: &WeightVector, d: f64, m: usize) -> Result<Vec<WeightVector>> {
    check_map_count(m)?;
    if w.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: w.len(),
        });
    }
    if !(d > 0.0 && d < 1.0) {
        return Err(Error::param("step", "must lie in (0, 1)"));
    }
    let chart = &w.as_slice()[..m - 1];
    Ok(lattice_moves(m)
        .iter()
        .filter_map(|mv| {
            let moved: Vec<f64> = chart
                .iter()
                .zip(mv)
                .map(|(c, &k)| c + k as f64 * d)
                .collect();
            WeightVector::from_chart(&moved)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &WeightVector, b: &[f64]) -> bool {
        a.as_slice().iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn weight_validation() {
        assert!(WeightVector::new(vec![0.5, 0.5]).is_ok());
        assert!(WeightVector::new(vec![1.0, 0.0]).is_err());
        assert!(WeightVector::new(vec![0.6, 0.6]).is_err());
        assert!(WeightVector::new(vec![]).is_err());
        let c = WeightVector::corner(3, 1);
        assert!(c.as_slice()[1] > 0.99 && c.as_slice()[0] > 0.0);
        assert!(serde_json::from_str::<WeightVector>("[0.2, 0.9]").is_err());
    }

    #[test]
    fn two_map_neighbors() {
        let w = WeightVector::new(vec![0.5, 0.5]).unwrap();
        let n = basic_neighbors(&w, 0.2, 2).unwrap();
        assert_eq!(n.len(), 2);
        assert!(close(&n[0], &[0.7, 0.3]));
        assert!(close(&n[1], &[0.3, 0.7]));

        let w = WeightVector::new(vec![0.9, 0.1]).unwrap();
        let n = basic_neighbors(&w, 0.2, 2).unwrap();
        assert_eq!(n.len(), 1);
        assert!(close(&n[0], &[0.7, 0.3]));
    }

    #[test]
    fn three_map_neighbors_stay_on_simplex() {
        let n = basic_neighbors(&WeightVector::barycenter(3), 0.1, 3).unwrap();
        assert_eq!(n.len(), 4);
        for w in &n {
            assert!((w.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(w.as_slice().iter().all(|c| *c > 0.0));
        }
        let near_edge = WeightVector::new(vec![0.05, 0.9, 0.05]).unwrap();
        assert!(basic_neighbors(&near_edge, 0.1, 3).unwrap().len() < 4);
    }

    #[test]
    fn neighbor_preconditions() {
        let w = WeightVector::barycenter(2);
        assert!(basic_neighbors(&w, 0.0, 2).is_err());
        assert!(basic_neighbors(&w, 1.0, 2).is_err());
        assert!(basic_neighbors(&w, 0.1, 3).is_err());
        assert!(basic_neighbors(&WeightVector::barycenter(4), 0.1, 4).is_err());
    }

    #[test]
    fn key_radius() {
        assert_eq!(LatticeKey(vec![-2, 3]).radius(), 5);
        assert_eq!(LatticeKey::origin(2).offset(&[1, -1]), LatticeKey(vec![1, -1]));
    }
}
