use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::BufRead;

use crate::{Error, Result};

/// Mass tolerance on `sum(values) * cell_volume == 1`.
const MASS_TOL: f64 = 1e-9;

/// A probability density on a box, stored as cell-centred samples on a regular grid.
///
/// Values are row-major with the first dimension slowest: for a planar map, cell
/// `(r, c)` sits at `x_1 = (r + 0.5) L_1 / rows`, `x_2 = (c + 0.5) L_2 / cols`.
#[derive(Clone, Debug, PartialEq)]
pub struct InfoMap {
    resolution: Vec<usize>,
    lengths: Vec<f64>,
    values: Vec<f64>,
}

impl InfoMap {
    /// Builds a map from nonnegative density samples, renormalizing to unit mass.
    pub fn from_density(resolution: &[usize], lengths: &[f64], mut values: Vec<f64>) -> Result<Self> {
        if resolution.is_empty() || resolution.len() != lengths.len() {
            return Err(Error::InvalidMap(format!(
                "resolution {resolution:?} does not match box {lengths:?}"
            )));
        }
        if resolution.contains(&0) {
            return Err(Error::InvalidMap("grid has an empty dimension".into()));
        }
        if lengths.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(Error::InvalidMap(format!("box lengths {lengths:?} must be positive")));
        }
        let cells: usize = resolution.iter().product();
        if values.len() != cells {
            return Err(Error::InvalidMap(format!(
                "expected {cells} grid values, found {}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidMap(format!("grid value {v} is not a nonnegative number")));
        }
        let vol: f64 = resolution
            .iter()
            .zip(lengths)
            .map(|(&n, &l)| l / n as f64)
            .product();
        let mass: f64 = values.iter().sum::<f64>() * vol;
        if mass <= 0.0 {
            return Err(Error::InvalidMap("map has zero total mass".into()));
        }
        values.iter_mut().for_each(|v| *v /= mass);
        let map = Self {
            resolution: resolution.to_vec(),
            lengths: lengths.to_vec(),
            values,
        };
        debug_assert!((map.mass() - 1.0).abs() < MASS_TOL);
        Ok(map)
    }

    /// Samples `density` at every cell centre and normalizes.
    pub fn from_fn(resolution: &[usize], lengths: &[f64], density: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let cells: usize = resolution.iter().product();
        let mut values = Vec::with_capacity(cells);
        let mut x = vec![0.0; resolution.len()];
        for flat in 0..cells {
            let mut rem = flat;
            for d in (0..resolution.len()).rev() {
                let i = rem % resolution[d];
                rem /= resolution[d];
                x[d] = (i as f64 + 0.5) * lengths[d] / resolution[d] as f64;
            }
            values.push(density(&x));
        }
        Self::from_density(resolution, lengths, values)
    }

    pub fn uniform(resolution: &[usize], lengths: &[f64]) -> Result<Self> {
        Self::from_fn(resolution, lengths, |_| 1.0)
    }

    /// Reads the planar CSV grid format: a header line `rows,cols,L1,L2`, then `rows`
    /// lines of `cols` comma-separated values. A literal `rows,cols,L1,L2` name line
    /// before the numeric header is accepted.
    pub fn read_csv_grid(reader: impl BufRead) -> Result<Self> {
        let mut lines = reader
            .lines()
            .map(|l| l.map_err(|e| Error::InvalidMap(e.to_string())))
            .filter(|l| l.as_ref().map_or(true, |s| !s.trim().is_empty()));
        let mut header = lines
            .next()
            .ok_or_else(|| Error::InvalidMap("missing header line".into()))??;
        if header.trim().eq_ignore_ascii_case("rows,cols,L1,L2") {
            header = lines
                .next()
                .ok_or_else(|| Error::InvalidMap("missing header values".into()))??;
        }
        let fields: Vec<&str> = header.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(Error::InvalidMap(format!("header `{header}` must be rows,cols,L1,L2")));
        }
        let rows: usize = fields[0]
            .parse()
            .map_err(|_| Error::InvalidMap(format!("bad row count `{}`", fields[0])))?;
        let cols: usize = fields[1]
            .parse()
            .map_err(|_| Error::InvalidMap(format!("bad column count `{}`", fields[1])))?;
        let l1: f64 = fields[2]
            .parse()
            .map_err(|_| Error::InvalidMap(format!("bad length `{}`", fields[2])))?;
        let l2: f64 = fields[3]
            .parse()
            .map_err(|_| Error::InvalidMap(format!("bad length `{}`", fields[3])))?;
        let mut values = Vec::with_capacity(rows * cols);
        for (r, line) in lines.enumerate() {
            let line = line?;
            let before = values.len();
            for tok in line.split(',') {
                let v: f64 = tok
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidMap(format!("row {r}: bad value `{tok}`")))?;
                values.push(v);
            }
            if values.len() - before != cols {
                return Err(Error::InvalidMap(format!(
                    "row {r} has {} values, expected {cols}",
                    values.len() - before
                )));
            }
        }
        if values.len() != rows * cols {
            return Err(Error::InvalidMap(format!(
                "expected {rows} rows, found {}",
                values.len() / cols.max(1)
            )));
        }
        Self::from_density(&[rows, cols], &[l1, l2], values)
    }

    pub fn write_csv_grid(&self, mut w: impl std::io::Write) -> std::io::Result<()> {
        assert_eq!(self.dims(), 2, "CSV grids are planar");
        let (rows, cols) = (self.resolution[0], self.resolution[1]);
        writeln!(w, "{},{},{},{}", rows, cols, self.lengths[0], self.lengths[1])?;
        for r in 0..rows {
            let row: Vec<String> = self.values[r * cols..(r + 1) * cols]
                .iter()
                .map(|v| v.to_string())
                .collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn dims(&self) -> usize {
        self.resolution.len()
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cell_size(&self) -> Vec<f64> {
        self.resolution
            .iter()
            .zip(&self.lengths)
            .map(|(&n, &l)| l / n as f64)
            .collect()
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_size().iter().product()
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_volume()
    }

    /// Pointwise weighted sum of maps on the same grid, renormalized.
    pub fn weighted_sum(maps: &[&InfoMap], weights: &[f64]) -> Result<Self> {
        let first = maps.first().ok_or(Error::Empty("maps"))?;
        if maps.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                expected: maps.len(),
                got: weights.len(),
            });
        }
        if maps
            .iter()
            .any(|m| m.resolution != first.resolution || m.lengths != first.lengths)
        {
            return Err(Error::InvalidMap("maps live on different grids".into()));
        }
        let mut values = vec![0.0; first.values.len()];
        for (m, w) in maps.iter().zip(weights) {
            for (acc, v) in values.iter_mut().zip(&m.values) {
                *acc += w * v;
            }
        }
        Self::from_density(&first.resolution, &first.lengths, values)
    }
}

/// One isotropic Gaussian of a mixture, in the JSON layout `{mean, sigma, weight}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianComponent {
    pub mean: Vec<f64>,
    pub sigma: f64,
    pub weight: f64,
}

impl GaussianComponent {
    pub fn new(mean: [f64; 2], sigma: f64, weight: f64) -> Self {
        Self {
            mean: mean.to_vec(),
            sigma,
            weight,
        }
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        let d = self.mean.len() as f64;
        let r2: f64 = x.iter().zip(&self.mean).map(|(a, b)| (a - b) * (a - b)).sum();
        let s2 = self.sigma * self.sigma;
        self.weight * (-r2 / (2.0 * s2)).exp() / (2.0 * PI * s2).powf(d / 2.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GaussianMixture {
    pub components: Vec<GaussianComponent>,
}

impl GaussianMixture {
    pub fn new(components: Vec<GaussianComponent>) -> Self {
        Self { components }
    }

    pub fn validate(&self, dims: usize) -> Result<()> {
        if self.components.is_empty() {
            return Err(Error::InvalidMap("mixture has no components".into()));
        }
        for (i, c) in self.components.iter().enumerate() {
            if c.mean.len() != dims {
                return Err(Error::InvalidMap(format!(
                    "component {i}: mean has {} entries, workspace has {dims}",
                    c.mean.len()
                )));
            }
            if !(c.sigma.is_finite() && c.sigma > 0.0) {
                return Err(Error::InvalidMap(format!("component {i}: sigma must be positive")));
            }
            if !(c.weight.is_finite() && c.weight >= 0.0) {
                return Err(Error::InvalidMap(format!("component {i}: weight must be nonnegative")));
            }
        }
        Ok(())
    }

    /// Unnormalized mixture density (the box truncation is absorbed by rasterization).
    pub fn density(&self, x: &[f64]) -> f64 {
        self.components.iter().map(|c| c.density(x)).sum()
    }

    pub fn rasterize(&self, resolution: &[usize], lengths: &[f64]) -> Result<InfoMap> {
        self.validate(lengths.len())?;
        InfoMap::from_fn(resolution, lengths, |x| self.density(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_to_unit_mass() {
        let m = InfoMap::from_density(&[2, 3], &[2.0, 1.0], vec![1.0, 2.0, 3.0, 0.0, 5.0, 1.0]).unwrap();
        assert!((m.mass() - 1.0).abs() < MASS_TOL);
        assert!(m.values().iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn rejects_invalid_grids() {
        assert!(InfoMap::from_density(&[2, 2], &[1.0, 1.0], vec![0.0; 4]).is_err());
        assert!(InfoMap::from_density(&[2, 2], &[1.0, 1.0], vec![1.0, -1.0, 1.0, 1.0]).is_err());
        assert!(InfoMap::from_density(&[2, 2], &[1.0, 1.0], vec![1.0; 3]).is_err());
        assert!(InfoMap::from_density(&[2, 2], &[1.0, 0.0], vec![1.0; 4]).is_err());
        assert!(InfoMap::from_density(&[2, 2], &[1.0, 1.0], vec![f64::NAN, 1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn csv_grid_round_trips() {
        let mix = GaussianMixture::new(vec![GaussianComponent::new([0.3, 0.6], 0.2, 1.0)]);
        let map = mix.rasterize(&[6, 4], &[1.0, 2.0]).unwrap();
        let mut buf = Vec::new();
        map.write_csv_grid(&mut buf).unwrap();
        let back = InfoMap::read_csv_grid(&buf[..]).unwrap();
        assert_eq!(back.resolution(), map.resolution());
        for (a, b) in back.values().iter().zip(map.values()) {
            assert!((a - b).abs() < 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn csv_accepts_name_line_and_rejects_ragged_rows() {
        let text = "rows,cols,L1,L2\n2,2,1,1\n1,2\n3,4\n";
        let m = InfoMap::read_csv_grid(text.as_bytes()).unwrap();
        assert!((m.values()[3] / m.values()[0] - 4.0).abs() < 1e-12);
        assert!(InfoMap::read_csv_grid("2,2,1,1\n1,2\n3\n".as_bytes()).is_err());
        assert!(InfoMap::read_csv_grid("2,2,1,1\n1,2\n".as_bytes()).is_err());
        assert!(InfoMap::read_csv_grid("2,2,1\n1,2\n3,4\n".as_bytes()).is_err());
    }

    #[test]
    fn mixture_json_layout() {
        let json = r#"[{"mean":[0.3,0.7],"sigma":0.1,"weight":2.0},{"mean":[0.6,0.2],"sigma":0.05,"weight":1.0}]"#;
        let mix: GaussianMixture = serde_json::from_str(json).unwrap();
        assert_eq!(mix.components.len(), 2);
        assert_eq!(mix.components[0].mean, vec![0.3, 0.7]);
        assert!(mix.validate(2).is_ok());
        assert!(mix.validate(3).is_err());
    }

    #[test]
    fn weighted_sum_is_pointwise() {
        let a = InfoMap::from_density(&[1, 2], &[1.0, 1.0], vec![1.0, 0.0]).unwrap();
        let b = InfoMap::from_density(&[1, 2], &[1.0, 1.0], vec![0.0, 1.0]).unwrap();
        let s = InfoMap::weighted_sum(&[&a, &b], &[0.25, 0.75]).unwrap();
        assert!((s.values()[0] - 0.5).abs() < 1e-12);
        assert!((s.values()[1] - 1.5).abs() < 1e-12);
    }
}
