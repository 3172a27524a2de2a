//! Real coefficient vectors tagged with their system type.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::system::SystemType;

/// A state, subnormalized state or effect, written in the system's
/// coordinates. Composite coordinates are Kronecker-ordered, first atom
/// most significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GptVector {
    system: SystemType,
    coeffs: Vec<f64>,
}

impl GptVector {
    pub fn new(system: SystemType, coeffs: Vec<f64>) -> Result<Self> {
        let expected = system.dimension();
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch {
                system: system.to_string(),
                expected,
                found: coeffs.len(),
            });
        }
        Ok(GptVector { system, coeffs })
    }

    pub fn zeros(system: SystemType) -> Self {
        let n = system.dimension();
        GptVector {
            system,
            coeffs: vec![0.0; n],
        }
    }

    /// Element of the trivial system.
    pub fn scalar(x: f64) -> Self {
        GptVector {
            system: SystemType::trivial(),
            coeffs: vec![x],
        }
    }

    pub fn system(&self) -> &SystemType {
        &self.system
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn same_system(&self, other: &GptVector) -> Result<()> {
        if self.system != other.system {
            return Err(Error::SystemMismatch {
                expected: self.system.to_string(),
                found: other.system.to_string(),
            });
        }
        Ok(())
    }

    /// Euclidean pairing of coordinates, i.e. an effect evaluated on a state.
    pub fn inner(&self, other: &GptVector) -> Result<f64> {
        self.same_system(other)?;
        Ok(dot(&self.coeffs, &other.coeffs))
    }

    pub fn scale(&self, s: f64) -> GptVector {
        GptVector {
            system: self.system.clone(),
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &GptVector) -> Result<GptVector> {
        self.same_system(other)?;
        Ok(GptVector {
            system: self.system.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &GptVector) -> Result<GptVector> {
        self.add(&other.scale(-1.0))
    }

    /// Largest coordinate difference; infinite when the systems differ.
    pub fn max_abs_diff(&self, other: &GptVector) -> f64 {
        if self.system != other.system {
            return f64::INFINITY;
        }
        max_abs_diff(&self.coeffs, &other.coeffs)
    }

    pub fn with_system(self, system: SystemType) -> Result<GptVector> {
        GptVector::new(system, self.coeffs)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub(crate) fn kron(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        out.extend(b.iter().map(|y| x * y));
    }
    out
}

/// Contracts the tensor `coeffs` (shape `dims`) with `e` on the listed
/// axes. `e` is laid out over those axes in the listed order; the result
/// keeps the remaining axes in their original order.
pub(crate) fn contract(coeffs: &[f64], dims: &[usize], axes: &[usize], e: &[f64]) -> Vec<f64> {
    let n = dims.len();
    let mut is_contracted = vec![false; n];
    for &a in axes {
        is_contracted[a] = true;
    }
    let keep: Vec<usize> = (0..n).filter(|i| !is_contracted[*i]).collect();

    // strides of the output and of e, per original axis
    let mut out_stride = vec![0usize; n];
    let mut s = 1;
    for &i in keep.iter().rev() {
        out_stride[i] = s;
        s *= dims[i];
    }
    let out_len = s;
    let mut e_stride = vec![0usize; n];
    let mut s = 1;
    for &i in axes.iter().rev() {
        e_stride[i] = s;
        s *= dims[i];
    }
    debug_assert_eq!(s, e.len());

    let mut out = vec![0.0; out_len];
    let mut idx = vec![0usize; n];
    for &c in coeffs {
        if c != 0.0 {
            let mut o = 0;
            let mut k = 0;
            for i in 0..n {
                o += idx[i] * out_stride[i];
                k += idx[i] * e_stride[i];
            }
            out[o] += c * e[k];
        }
        // increment the multi-index, last axis fastest
        for i in (0..n).rev() {
            idx[i] += 1;
            if idx[i] < dims[i] {
                break;
            }
            idx[i] = 0;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_is_checked() {
        assert!(GptVector::new(SystemType::quantum(2), vec![0.0; 3]).is_err());
        assert!(GptVector::new(SystemType::quantum(2), vec![0.0; 4]).is_ok());
    }

    #[test]
    fn contraction_matches_explicit_sums() {
        // 2 x 3 tensor
        let t = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        assert_eq!(contract(&t, &[2, 3], &[0], &[1.0, 10.0]), vec![41.0, 52.0, 63.0]);
        assert_eq!(contract(&t, &[2, 3], &[1], &[1.0, 0.0, 1.0]), vec![4.0, 10.0]);
        assert_eq!(contract(&t, &[2, 3], &[1, 0], &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0]), vec![7.0]);
    }

    #[test]
    fn mismatched_systems_do_not_pair() {
        let a = GptVector::zeros(SystemType::classical(4));
        let b = GptVector::zeros(SystemType::quantum(2));
        assert!(a.inner(&b).is_err());
        assert_eq!(a.max_abs_diff(&b), f64::INFINITY);
    }
}
