use crate::error::{Error, Result};

/// `n` points in `dim`-dimensional real space, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    coords: Vec<f64>,
    n: usize,
    dim: usize,
}

impl PointCloud {
    /// Builds a cloud from row-major coordinates.
    pub fn from_flat(coords: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Argument("point dimension must be at least 1".into()));
        }
        if coords.len() % dim != 0 {
            return Err(Error::Argument(format!(
                "{} coordinates do not divide into points of dimension {dim}",
                coords.len()
            )));
        }
        let n = coords.len() / dim;
        if n < 2 {
            return Err(Error::Argument(format!("a point cloud needs at least 2 points, got {n}")));
        }
        if let Some(pos) = coords.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite coordinate in point {}", pos / dim)));
        }
        Ok(Self { coords, n, dim })
    }

    /// Builds a cloud from a list of equally sized points.
    pub fn from_points<P: AsRef<[f64]>>(points: &[P]) -> Result<Self> {
        let dim = points.first().map_or(0, |p| p.as_ref().len());
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::Argument(format!("point {i} has dimension {} but expected {dim}", p.len())));
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(coords, dim)
    }

    /// One-dimensional cloud from scalar samples.
    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        Self::from_flat(values.to_vec(), 1)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// Keeps only the listed coordinate axes, in the given order.
    pub fn project(&self, axes: &[usize]) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::Argument("projection needs at least one axis".into()));
        }
        if let Some(&bad) = axes.iter().find(|&&a| a >= self.dim) {
            return Err(Error::Argument(format!("axis {bad} out of range for dimension {}", self.dim)));
        }
        let mut coords = Vec::with_capacity(self.n * axes.len());
        for p in self.points() {
            coords.extend(axes.iter().map(|&a| p[a]));
        }
        Self::from_flat(coords, axes.len())
    }

    /// Applies `f` to every coordinate, keeping the shape.
    pub fn map_coords(&self, mut f: impl FnMut(usize, usize, f64) -> f64) -> Result<Self> {
        let dim = self.dim;
        let coords = self.coords.iter().enumerate().map(|(k, &v)| f(k / dim, k % dim, v)).collect();
        Self::from_flat(coords, dim)
    }

    /// Length of the bounding-box diagonal.
    pub fn bounding_diameter(&self) -> f64 {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.points() {
            for (j, &v) in p.iter().enumerate() {
                lo[j] = lo[j].min(v);
                hi[j] = hi[j].max(v);
            }
        }
        lo.iter().zip(&hi).map(|(l, h)| (h - l) * (h - l)).sum::<f64>().sqrt()
    }
}

/// Squared Euclidean distance, summed in axis order.
#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_shapes() {
        assert!(PointCloud::from_flat(vec![1.0], 1).is_err());
        assert!(PointCloud::from_flat(vec![1.0, 2.0, 3.0], 2).is_err());
        assert!(PointCloud::from_flat(vec![1.0, 2.0], 0).is_err());
        assert!(PointCloud::from_flat(vec![1.0, f64::NAN], 1).is_err());
        assert!(PointCloud::from_points(&[vec![1.0, 2.0], vec![3.0]]).is_err());
    }

    #[test]
    fn projection_selects_axes() {
        let c = PointCloud::from_points(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]).unwrap();
        let p = c.project(&[2, 0]).unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.point(1), &[6.0, 4.0]);
        assert!(c.project(&[3]).is_err());
        assert!(c.project(&[]).is_err());
    }
}
