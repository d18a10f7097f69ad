//! Multi-map planning: scalarization over the weight simplex and breadth-first
//! coverage of that simplex with warm-started ergodic searches.

pub mod affine;
pub mod sles;
mod weights;

use serde::{Deserialize, Serialize};

pub use affine::{adaptive_neighbors, build_affine_space, AffineWeightSpace, EdgeLength};
pub use sles::{
    enumerate_lattice, naive_scalarization, sles, LatticeNode, Planner, SamplingMode, SlesConfig,
    SlesOutcome,
};
pub use weights::{basic_neighbors, LatticeKey, WeightVector, CORNER_CLIP, ZERO_TOL};

use crate::dynamics::{ControlSequence, Trajectory};
use crate::ergopt::Termination;
use crate::fourier::{self, BasisSignature, SpectralBasis, SpectralCoefficients};
use crate::{Error, Result};

/// Coefficient tables of several maps on one basis, with their pairwise ergodic distances.
#[derive(Clone, Debug, PartialEq)]
pub struct MapFamily {
    signature: BasisSignature,
    coeffs: Vec<SpectralCoefficients>,
    distances: Vec<Vec<f64>>,
}

impl MapFamily {
    pub fn new(coeffs: Vec<SpectralCoefficients>, basis: &SpectralBasis) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Empty("map family"));
        }
        for c in &coeffs {
            basis.check(c)?;
        }
        let m = coeffs.len();
        let mut distances = vec![vec![0.0; m]; m];
        for i in 0..m {
            for j in i + 1..m {
                let e = fourier::ergodic_metric(&coeffs[i], &coeffs[j], basis)?;
                distances[i][j] = e;
                distances[j][i] = e;
            }
        }
        Ok(Self {
            signature: basis.signature().clone(),
            coeffs,
            distances,
        })
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[SpectralCoefficients] {
        &self.coeffs
    }

    /// `E[i][j]`, the ergodic metric between maps `i` and `j`.
    pub fn distances(&self) -> &[Vec<f64>] {
        &self.distances
    }

    pub fn signature(&self) -> &BasisSignature {
        &self.signature
    }
}

/// Coefficients of the weighted-sum map, computed per index as `w . Phi_k`.
pub fn scalarize(family: &MapFamily, w: &WeightVector) -> Result<SpectralCoefficients> {
    if w.len() != family.len() {
        return Err(Error::DimensionMismatch {
            expected: family.len(),
            got: w.len(),
        });
    }
    let n = family.coeffs[0].len();
    let mut values = vec![0.0; n];
    for (wi, c) in w.as_slice().iter().zip(&family.coeffs) {
        for (v, p) in values.iter_mut().zip(c.values()) {
            *v += wi * p;
        }
    }
    Ok(SpectralCoefficients::from_parts(family.signature.clone(), values))
}

/// Ergodic metric of one trajectory against every map of the family.
pub fn ergodic_vector(
    trajectory: &Trajectory,
    family: &MapFamily,
    basis: &SpectralBasis,
) -> Result<Vec<f64>> {
    let c = fourier::trajectory_coefficients(&trajectory.samples(), trajectory.dt, basis)?;
    family
        .coeffs
        .iter()
        .map(|phi| fourier::ergodic_metric(&c.coeffs, phi, basis))
        .collect()
}

/// One solved weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    /// Position in solve order.
    pub episode: usize,
    pub weight: WeightVector,
    /// Lattice identity; absent for weights solved outside a lattice.
    pub key: Option<LatticeKey>,
    /// Episode whose controls seeded this one.
    pub parent: Option<usize>,
    pub ergodic_vector: Vec<f64>,
    pub iterations: usize,
    pub termination: Termination,
    pub initial_objective: f64,
    pub final_objective: f64,
    pub final_metric: f64,
    #[serde(skip)]
    pub controls: ControlSequence,
    /// Penalized objective after every accepted step.
    #[serde(skip)]
    pub trace: Vec<f64>,
}
