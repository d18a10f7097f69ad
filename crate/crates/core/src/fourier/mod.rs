//! Cosine spectral basis on a box workspace `[0, L_1] x ... x [0, L_nu]`.
//!
//! Basis functions are `F_k(x) = (1/h_k) prod_j cos(k_j pi x_j / L_j)` for every
//! multi-index `k` with `0 <= k_j <= order`. `h_k` makes each `F_k` L2-orthonormal
//! on the box, and coefficients are weighted by `lambda_k = (1 + |k|^2)^(-(nu+1)/2)`
//! in the ergodic metric.

mod map;

pub use map::{GaussianComponent, GaussianMixture, InfoMap};

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::{Error, Execution, Result};

/// Default per-dimension order for planar workspaces (121 coefficients).
pub const DEFAULT_ORDER: usize = 10;

/// Identity of a basis: coefficient tables built on different signatures are not comparable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisSignature {
    pub lengths: Vec<f64>,
    pub order: usize,
}

#[derive(Clone, Debug)]
pub struct SpectralBasis {
    signature: BasisSignature,
    /// Flat multi-indices, `dims` entries per basis function, first dimension slowest.
    multi: Vec<usize>,
    lambda: Vec<f64>,
    norm: Vec<f64>,
}

impl SpectralBasis {
    pub fn new(dims: usize, lengths: &[f64], order: usize) -> Result<Self> {
        if dims == 0 {
            return Err(Error::param("dims", "workspace dimension must be at least 1"));
        }
        if lengths.len() != dims {
            return Err(Error::DimensionMismatch {
                expected: dims,
                got: lengths.len(),
            });
        }
        if let Some(l) = lengths.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(Error::param("lengths", format!("{l} is not a positive length")));
        }
        let side = order + 1;
        let count = side.pow(dims as u32);
        let mut multi = Vec::with_capacity(count * dims);
        let mut lambda = Vec::with_capacity(count);
        let mut norm = Vec::with_capacity(count);
        let exponent = -(dims as f64 + 1.0) / 2.0;
        for flat in 0..count {
            let start = multi.len();
            let mut rem = flat;
            let mut stride = count / side;
            for _ in 0..dims {
                multi.push(rem / stride);
                rem %= stride;
                stride = (stride / side).max(1);
            }
            let k = &multi[start..];
            let sq: f64 = k.iter().map(|&kj| (kj * kj) as f64).sum();
            lambda.push((1.0 + sq).powf(exponent));
            let h2: f64 = k
                .iter()
                .zip(lengths)
                .map(|(&kj, &l)| if kj == 0 { l } else { l / 2.0 })
                .product();
            norm.push(h2.sqrt());
        }
        Ok(Self {
            signature: BasisSignature {
                lengths: lengths.to_vec(),
                order,
            },
            multi,
            lambda,
            norm,
        })
    }

    /// Planar basis on `[0, l1] x [0, l2]`.
    pub fn planar(l1: f64, l2: f64, order: usize) -> Result<Self> {
        Self::new(2, &[l1, l2], order)
    }

    pub fn dims(&self) -> usize {
        self.signature.lengths.len()
    }

    pub fn lengths(&self) -> &[f64] {
        &self.signature.lengths
    }

    pub fn order(&self) -> usize {
        self.signature.order
    }

    pub fn signature(&self) -> &BasisSignature {
        &self.signature
    }

    /// Number of basis functions, `(order + 1)^dims`.
    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }

    pub fn index(&self, flat: usize) -> &[usize] {
        let d = self.dims();
        &self.multi[flat * d..(flat + 1) * d]
    }

    /// Flat position of a multi-index, if it is retained by this basis.
    pub fn flat_index(&self, k: &[usize]) -> Option<usize> {
        if k.len() != self.dims() || k.iter().any(|&kj| kj > self.order()) {
            return None;
        }
        let side = self.order() + 1;
        Some(k.iter().fold(0, |acc, &kj| acc * side + kj))
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// Normalizers `h_k`.
    pub fn norm(&self) -> &[f64] {
        &self.norm
    }

    pub fn check(&self, coeffs: &SpectralCoefficients) -> Result<()> {
        if coeffs.signature != self.signature {
            return Err(Error::BasisMismatch(format!(
                "table built for {:?}, basis is {:?}",
                coeffs.signature, self.signature
            )));
        }
        Ok(())
    }

    fn cos_tables(&self, x: &[f64]) -> Vec<f64> {
        let side = self.order() + 1;
        let mut t = Vec::with_capacity(side * self.dims());
        for (xj, lj) in x.iter().zip(self.lengths()) {
            let w = PI * xj / lj;
            t.extend((0..side).map(|k| (k as f64 * w).cos()));
        }
        t
    }

    /// `F_k(x)` for a single basis function.
    pub fn eval(&self, flat: usize, x: &[f64]) -> f64 {
        let k = self.index(flat);
        let prod: f64 = k
            .iter()
            .zip(x.iter().zip(self.lengths()))
            .map(|(&kj, (xj, lj))| (kj as f64 * PI * xj / lj).cos())
            .product();
        prod / self.norm[flat]
    }

    /// Adds `scale * F_k(x)` to `out[k]` for every basis function.
    pub fn accumulate(&self, x: &[f64], scale: f64, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.len());
        let side = self.order() + 1;
        let d = self.dims();
        let t = self.cos_tables(x);
        for (flat, o) in out.iter_mut().enumerate() {
            let k = &self.multi[flat * d..(flat + 1) * d];
            let mut p = scale / self.norm[flat];
            for (j, &kj) in k.iter().enumerate() {
                p *= t[j * side + kj];
            }
            *o += p;
        }
    }

    /// Gradients of every basis function at `x`, laid out `[k * dims + j]`.
    pub fn gradients(&self, x: &[f64]) -> Vec<f64> {
        let side = self.order() + 1;
        let d = self.dims();
        let mut cos_t = Vec::with_capacity(side * d);
        let mut dcos_t = Vec::with_capacity(side * d);
        for (xj, lj) in x.iter().zip(self.lengths()) {
            let w = PI / lj;
            for k in 0..side {
                let a = k as f64 * w;
                cos_t.push((a * xj).cos());
                dcos_t.push(-a * (a * xj).sin());
            }
        }
        let mut out = vec![0.0; self.len() * d];
        for flat in 0..self.len() {
            let k = &self.multi[flat * d..(flat + 1) * d];
            for j in 0..d {
                let mut p = dcos_t[j * side + k[j]] / self.norm[flat];
                for (l, &kl) in k.iter().enumerate() {
                    if l != j {
                        p *= cos_t[l * side + kl];
                    }
                }
                out[flat * d + j] = p;
            }
        }
        out
    }

    /// `sum_k weights[k] * grad F_k(x)`.
    pub fn weighted_gradient(&self, x: &[f64], weights: &[f64]) -> Vec<f64> {
        debug_assert_eq!(weights.len(), self.len());
        let side = self.order() + 1;
        let d = self.dims();
        let mut cos_t = Vec::with_capacity(side * d);
        let mut dsin_t = Vec::with_capacity(side * d);
        for (xj, lj) in x.iter().zip(self.lengths()) {
            let w = PI / lj;
            for k in 0..side {
                let a = k as f64 * w;
                cos_t.push((a * xj).cos());
                dsin_t.push(-a * (a * xj).sin());
            }
        }
        let mut grad = vec![0.0; d];
        for (flat, &wk) in weights.iter().enumerate() {
            if wk == 0.0 {
                continue;
            }
            let k = &self.multi[flat * d..(flat + 1) * d];
            let s = wk / self.norm[flat];
            for (j, g) in grad.iter_mut().enumerate() {
                let mut p = s * dsin_t[j * side + k[j]];
                for (l, &kl) in k.iter().enumerate() {
                    if l != j {
                        p *= cos_t[l * side + kl];
                    }
                }
                *g += p;
            }
        }
        grad
    }

    pub fn zeros(&self) -> SpectralCoefficients {
        SpectralCoefficients {
            signature: self.signature.clone(),
            values: vec![0.0; self.len()],
        }
    }

    /// Wraps raw values as a coefficient table on this basis.
    pub fn coefficients(&self, values: Vec<f64>) -> Result<SpectralCoefficients> {
        if values.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: values.len(),
            });
        }
        Ok(SpectralCoefficients {
            signature: self.signature.clone(),
            values,
        })
    }
}

/// Coefficient table (`phi_k` of a map, or `c_k` of a trajectory) tied to a basis signature.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralCoefficients {
    signature: BasisSignature,
    values: Vec<f64>,
}

impl SpectralCoefficients {
    pub(crate) fn from_parts(signature: BasisSignature, values: Vec<f64>) -> Self {
        Self { signature, values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn signature(&self) -> &BasisSignature {
        &self.signature
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryCoefficients {
    pub coeffs: SpectralCoefficients,
    /// Horizon in seconds.
    pub horizon: f64,
    pub samples: usize,
}

/// Fourier coefficients of a map by midpoint quadrature on its storage grid.
pub fn map_coefficients(map: &InfoMap, basis: &SpectralBasis) -> Result<SpectralCoefficients> {
    map_coefficients_with(map, basis, Execution::default())
}

pub fn map_coefficients_with(
    map: &InfoMap,
    basis: &SpectralBasis,
    exec: Execution,
) -> Result<SpectralCoefficients> {
    let dims = basis.dims();
    if map.dims() != dims {
        return Err(Error::DimensionMismatch {
            expected: dims,
            got: map.dims(),
        });
    }
    if map
        .lengths()
        .iter()
        .zip(basis.lengths())
        .any(|(a, b)| (a - b).abs() > 1e-12 * b.abs().max(1.0))
    {
        return Err(Error::BasisMismatch(format!(
            "map box {:?} differs from basis box {:?}",
            map.lengths(),
            basis.lengths()
        )));
    }
    let side = basis.order() + 1;
    for (dim, &cells) in map.resolution().iter().enumerate() {
        if cells < 2 * side {
            return Err(Error::UnderResolved {
                dim,
                cells,
                order: basis.order(),
                needed: 2 * side,
            });
        }
    }

    // Separable cosine transform, contracting one axis at a time from the last.
    let mut shape = map.resolution().to_vec();
    let mut data = map.values().to_vec();
    for axis in (0..dims).rev() {
        let n = shape[axis];
        let cell = map.lengths()[axis] / n as f64;
        let mut table = vec![0.0; side * n];
        for k in 0..side {
            let w = k as f64 * PI / map.lengths()[axis];
            for i in 0..n {
                table[k * n + i] = (w * (i as f64 + 0.5) * cell).cos() * cell;
            }
        }
        let inner: usize = shape[axis + 1..].iter().product();
        let outer: usize = shape[..axis].iter().product();
        let mut out = vec![0.0; outer * side * inner];
        let src = &data;
        exec.fill_chunks(&mut out, side * inner, |o, block| {
            let src_block = &src[o * n * inner..(o + 1) * n * inner];
            for k in 0..side {
                let row = &table[k * n..(k + 1) * n];
                let dst = &mut block[k * inner..(k + 1) * inner];
                for (i, &c) in row.iter().enumerate() {
                    let s = &src_block[i * inner..(i + 1) * inner];
                    for (d, v) in dst.iter_mut().zip(s) {
                        *d += c * v;
                    }
                }
            }
        });
        shape[axis] = side;
        data = out;
    }
    for (v, h) in data.iter_mut().zip(basis.norm()) {
        *v /= h;
    }
    basis.coefficients(data)
}

/// Time-averaged basis statistics `c_k = (1/N) sum_i F_k(q(t_i))` of uniformly spaced samples.
pub fn trajectory_coefficients<P: AsRef<[f64]>>(
    points: &[P],
    dt: f64,
    basis: &SpectralBasis,
) -> Result<TrajectoryCoefficients> {
    if points.is_empty() {
        return Err(Error::Empty("trajectory samples"));
    }
    let mut values = vec![0.0; basis.len()];
    for p in points {
        let p = p.as_ref();
        if p.len() != basis.dims() {
            return Err(Error::DimensionMismatch {
                expected: basis.dims(),
                got: p.len(),
            });
        }
        basis.accumulate(p, 1.0, &mut values);
    }
    let n = points.len() as f64;
    values.iter_mut().for_each(|v| *v /= n);
    Ok(TrajectoryCoefficients {
        coeffs: basis.coefficients(values)?,
        horizon: dt * points.len() as f64,
        samples: points.len(),
    })
}

/// `sum_k lambda_k (a_k - b_k)^2` for two tables on the same basis.
pub fn ergodic_metric(
    a: &SpectralCoefficients,
    b: &SpectralCoefficients,
    basis: &SpectralBasis,
) -> Result<f64> {
    basis.check(a)?;
    basis.check(b)?;
    Ok(weighted_sq_distance(a.values(), b.values(), basis.lambda()))
}

pub(crate) fn weighted_sq_distance(a: &[f64], b: &[f64], lambda: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(lambda)
        .map(|((x, y), l)| l * (x - y) * (x - y))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> SpectralBasis {
        SpectralBasis::planar(1.0, 1.0, 2).unwrap()
    }

    #[test]
    fn basis_closed_forms() {
        let b = unit();
        let k00 = b.flat_index(&[0, 0]).unwrap();
        let k11 = b.flat_index(&[1, 1]).unwrap();
        let k20 = b.flat_index(&[2, 0]).unwrap();
        assert_eq!(b.norm()[k00], 1.0);
        assert_eq!(b.lambda()[k00], 1.0);
        assert_eq!(b.eval(k00, &[0.13, 0.77]), 1.0);
        assert!((b.lambda()[k11] - 3f64.powf(-1.5)).abs() < 1e-15);
        assert!((b.lambda()[k11] - 0.19245).abs() < 1e-5);
        assert!((b.norm()[k20] - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(b.len(), 9);
        assert_eq!(b.index(k20), &[2, 0]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SpectralBasis::new(0, &[], 3).is_err());
        assert!(SpectralBasis::new(2, &[1.0, 0.0], 3).is_err());
        assert!(SpectralBasis::new(2, &[1.0, -2.0], 3).is_err());
        assert!(SpectralBasis::new(2, &[1.0], 3).is_err());
        assert_eq!(SpectralBasis::new(3, &[1.0, 2.0, 3.0], 0).unwrap().len(), 1);
    }

    #[test]
    fn lambda_decreases_with_index_norm() {
        let b = SpectralBasis::planar(1.0, 1.0, 10).unwrap();
        let norm_sq = |f: usize| b.index(f).iter().map(|k| k * k).sum::<usize>();
        for i in 0..b.len() {
            assert!(b.lambda()[i] > 0.0 && b.lambda()[i] <= 1.0);
            for j in 0..b.len() {
                if norm_sq(i) < norm_sq(j) {
                    assert!(b.lambda()[i] > b.lambda()[j]);
                }
            }
        }
    }

    #[test]
    fn basis_functions_are_orthonormal() {
        // midpoint quadrature is exact for these trigonometric products at this resolution
        let b = SpectralBasis::planar(2.0, 0.5, 3).unwrap();
        let n = 64;
        for f in 0..b.len() {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let x = [(i as f64 + 0.5) * 2.0 / n as f64, (j as f64 + 0.5) * 0.5 / n as f64];
                    acc += b.eval(f, &x).powi(2) * (2.0 / n as f64) * (0.5 / n as f64);
                }
            }
            assert!((acc - 1.0).abs() < 1e-12, "k={:?} -> {acc}", b.index(f));
        }
    }

    #[test]
    fn stationary_center_coefficients() {
        let b = unit();
        let pts = vec![[0.5, 0.5]; 7];
        let c = trajectory_coefficients(&pts, 0.1, &b).unwrap();
        let v = c.coeffs.values();
        assert!(v[b.flat_index(&[1, 0]).unwrap()].abs() < 1e-15);
        assert_eq!(v[b.flat_index(&[0, 0]).unwrap()], 1.0);
        // oracle: cos(pi) / sqrt(1/2), summed and averaged by hand
        let oracle: f64 = (0..7).map(|_| (PI).cos() / 0.5f64.sqrt()).sum::<f64>() / 7.0;
        assert!((v[b.flat_index(&[2, 0]).unwrap()] - oracle).abs() < 1e-12);
        assert!((oracle + 2f64.sqrt()).abs() < 1e-12);
        assert!((c.horizon - 0.7).abs() < 1e-12);
        assert_eq!(c.samples, 7);
    }

    #[test]
    fn empty_trajectory_is_rejected() {
        let pts: Vec<[f64; 2]> = vec![];
        assert!(matches!(
            trajectory_coefficients(&pts, 0.1, &unit()),
            Err(Error::Empty(_))
        ));
    }

    #[test]
    fn metric_identity_scaling_and_mismatch() {
        let b = unit();
        let pts = vec![[0.2, 0.9], [0.4, 0.1], [0.8, 0.5]];
        let c = trajectory_coefficients(&pts, 0.1, &b).unwrap().coeffs;
        assert_eq!(ergodic_metric(&c, &c, &b).unwrap(), 0.0);
        let zero = b.zeros();
        let doubled = b
            .coefficients(c.values().iter().map(|v| 2.0 * v).collect())
            .unwrap();
        let e1 = ergodic_metric(&c, &zero, &b).unwrap();
        let e2 = ergodic_metric(&doubled, &zero, &b).unwrap();
        assert!((e2 - 4.0 * e1).abs() < 1e-12 * e2);

        let other = SpectralBasis::planar(1.0, 1.0, 3).unwrap();
        assert!(matches!(
            ergodic_metric(&c, &zero, &other),
            Err(Error::BasisMismatch(_))
        ));
        let stretched = SpectralBasis::planar(1.0, 2.0, 2).unwrap();
        assert!(ergodic_metric(&c, &zero, &stretched).is_err());
    }

    #[test]
    fn stationary_center_vs_uniform_matches_brute_force() {
        let b = unit();
        let map = InfoMap::uniform(&[32, 32], &[1.0, 1.0]).unwrap();
        let phi = map_coefficients(&map, &b).unwrap();
        let c = trajectory_coefficients(&[[0.5, 0.5]], 0.1, &b).unwrap().coeffs;
        let mut oracle = 0.0;
        for k1 in 0..=2usize {
            for k2 in 0..=2usize {
                if k1 + k2 == 0 {
                    continue;
                }
                let h = (if k1 == 0 { 1.0 } else { 0.5 } * if k2 == 0 { 1.0 } else { 0.5 } as f64).sqrt();
                let ck = (k1 as f64 * PI / 2.0).cos() * (k2 as f64 * PI / 2.0).cos() / h;
                let lam = (1.0 + (k1 * k1 + k2 * k2) as f64).powf(-1.5);
                oracle += lam * ck * ck;
            }
        }
        let e = ergodic_metric(&c, &phi, &b).unwrap();
        assert!((e - oracle).abs() < 1e-12, "{e} vs {oracle}");
    }

    #[test]
    fn weighted_gradient_matches_finite_differences() {
        let b = SpectralBasis::planar(1.0, 1.5, 4).unwrap();
        let w: Vec<f64> = (0..b.len()).map(|i| ((i * 37 % 11) as f64 - 5.0) / 7.0).collect();
        let x = [0.31, 0.92];
        let g = b.weighted_gradient(&x, &w);
        let f = |x: [f64; 2]| {
            let mut out = vec![0.0; b.len()];
            b.accumulate(&x, 1.0, &mut out);
            out.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>()
        };
        let h = 1e-6;
        for j in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[j] += h;
            xm[j] -= h;
            let fd = (f(xp) - f(xm)) / (2.0 * h);
            assert!((fd - g[j]).abs() < 1e-6 * fd.abs().max(1.0), "{fd} vs {}", g[j]);
        }
    }

    #[test]
    fn uniform_map_is_constant_indicator() {
        let b = SpectralBasis::planar(1.0, 1.0, 10).unwrap();
        let map = InfoMap::uniform(&[40, 40], &[1.0, 1.0]).unwrap();
        let phi = map_coefficients(&map, &b).unwrap();
        for (f, v) in phi.values().iter().enumerate() {
            if f == 0 {
                assert!((v - 1.0).abs() < 1e-12);
            } else {
                assert!(v.abs() < 1e-12, "k={:?} -> {v}", b.index(f));
            }
        }
    }

    #[test]
    fn under_resolved_grid_is_rejected() {
        let b = SpectralBasis::planar(1.0, 1.0, 10).unwrap();
        let map = InfoMap::uniform(&[21, 40], &[1.0, 1.0]).unwrap();
        assert!(matches!(
            map_coefficients(&map, &b),
            Err(Error::UnderResolved { dim: 0, .. })
        ));
    }

    #[test]
    fn parallel_and_sequential_quadrature_agree() {
        let b = SpectralBasis::planar(1.0, 1.0, 6).unwrap();
        let mix = GaussianMixture::new(vec![
            GaussianComponent::new([0.3, 0.7], 0.1, 1.0),
            GaussianComponent::new([0.8, 0.2], 0.15, 0.5),
        ]);
        let map = mix.rasterize(&[50, 60], &[1.0, 1.0]).unwrap();
        let a = map_coefficients_with(&map, &b, Execution::Sequential).unwrap();
        let c = map_coefficients_with(&map, &b, Execution::Parallel).unwrap();
        assert_eq!(a, c);
    }
}
