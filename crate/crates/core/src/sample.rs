use alloc::format;
use alloc::vec::Vec;

use crate::error::{invalid, Result};

/// An ordered list of p-dimensional observations stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    dim: usize,
    coords: Vec<f64>,
}

impl Sample {
    /// Builds a sample from a list of points.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points
            .first()
            .map(Vec::len)
            .ok_or_else(|| invalid("a sample needs at least one point"))?;
        let mut coords = Vec::with_capacity(dim * points.len());
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(invalid(format!(
                    "point {i} has dimension {} but point 0 has dimension {dim}",
                    p.len()
                )));
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords)
    }

    /// Builds a sample from row-major coordinates.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        if coords.is_empty() {
            return Err(invalid("a sample needs at least one point"));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(invalid(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!(
                "point {} has a non-finite coordinate",
                pos / dim
            )));
        }
        Ok(Self { dim, coords })
    }

    /// Builds a univariate sample.
    pub fn univariate(values: &[f64]) -> Result<Self> {
        Self::from_flat(1, values.to_vec())
    }

    /// Dimension p.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    /// Always false: samples hold at least one point.
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// The `i`-th point.
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Iterates over points in order.
    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    /// Row-major coordinates.
    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    /// Applies `f(component, value)` to every coordinate. The caller is
    /// responsible for keeping the result finite.
    pub fn map_coords(&self, mut f: impl FnMut(usize, f64) -> f64) -> Result<Self> {
        let dim = self.dim;
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(i, &v)| f(i % dim, v))
            .collect();
        Self::from_flat(dim, coords)
    }

    /// Reorders the coordinate axes: new component `k` is old component
    /// `order[k]`.
    pub fn permute_components(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.dim {
            return Err(invalid("component permutation has the wrong length"));
        }
        let mut seen = alloc::vec![false; self.dim];
        for &c in order {
            if c >= self.dim || seen[c] {
                return Err(invalid("component order is not a permutation"));
            }
            seen[c] = true;
        }
        let mut coords = Vec::with_capacity(self.coords.len());
        for p in self.iter() {
            coords.extend(order.iter().map(|&c| p[c]));
        }
        Ok(Self {
            dim: self.dim,
            coords,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_ragged_points() {
        assert!(Sample::new(vec![vec![1.0, 2.0], vec![3.0]]).is_err());
    }

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(Sample::new(vec![]).is_err());
        assert!(Sample::univariate(&[1.0, f64::NAN]).is_err());
        assert!(Sample::univariate(&[f64::INFINITY]).is_err());
    }

    #[test]
    fn permutes_components() {
        let s = Sample::new(vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        let t = s.permute_components(&[2, 0, 1]).unwrap();
        assert_eq!(t.point(0), &[3.0, 1.0, 2.0]);
        assert_eq!(t.point(1), &[6.0, 4.0, 5.0]);
        assert!(s.permute_components(&[0, 0, 1]).is_err());
    }
}
