use std::fmt;
use std::ops::Index;

use crate::error::{check_dim, Error, Result};

/// A non-empty vector of finite reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some((index, &value)) = components.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Vector(components))
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![0.0; dim])
    }

    /// Callers guarantee the invariants (non-empty, finite).
    pub(crate) fn from_raw(components: Vec<f64>) -> Self {
        debug_assert!(!components.is_empty());
        Vector(components)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Euclidean length.
    pub fn norm(&self) -> f64 {
        dot_slices(&self.0, &self.0).sqrt()
    }

    pub fn dot(&self, other: &Vector) -> Result<f64> {
        dot(self, other)
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Vector::new(v)
    }
}

impl TryFrom<&[f64]> for Vector {
    type Error = Error;

    fn try_from(v: &[f64]) -> Result<Self> {
        Vector::new(v.to_vec())
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

pub(crate) fn dot_slices(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Inner product `Σ aᵢ·bᵢ`.
pub fn dot(a: &Vector, b: &Vector) -> Result<f64> {
    check_dim(a.dim(), b.dim())?;
    Ok(dot_slices(&a.0, &b.0))
}

/// Cosine of the angle between `a` and `b`, clamped to `[-1, 1]`.
pub fn cosine_angle(a: &Vector, b: &Vector) -> Result<f64> {
    check_dim(a.dim(), b.dim())?;
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Err(Error::DegenerateVector);
    }
    Ok((dot_slices(&a.0, &b.0) / (na * nb)).clamp(-1.0, 1.0))
}

/// Scalar projection of `w` along the direction of `x`: `(w·x)/‖x‖`.
pub fn project(w: &Vector, x: &Vector) -> Result<f64> {
    check_dim(w.dim(), x.dim())?;
    let nx = x.norm();
    if nx == 0.0 {
        return Err(Error::DegenerateVector);
    }
    Ok(dot_slices(&w.0, &x.0) / nx)
}
