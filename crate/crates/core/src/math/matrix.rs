use std::ops::Mul;

use serde::{Deserialize, Serialize};

use super::C64;
use crate::error::{Error, Result};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// A 2×2 or 3×3 complex matrix stored row-major.
///
/// Storage is always 3×3; only the leading `dim × dim` block is meaningful and
/// the remainder is kept at zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallMatrix {
    dim: usize,
    entries: [[C64; 3]; 3],
}

impl SmallMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            entries: [[ZERO; 3]; 3],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.entries[i][i] = ONE;
        }
        Ok(m)
    }

    /// Builds a matrix from rows; rejects non-square input and non-finite entries.
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.len();
        let mut m = Self::zeros(dim)?;
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::range(format!(
                    "row {i} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            for (j, z) in row.iter().enumerate() {
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::range(format!("entry ({i},{j}) is not finite")));
                }
                m.entries[i][j] = *z;
            }
        }
        Ok(m)
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let complex: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&complex)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        assert!(
            i < self.dim && j < self.dim,
            "index ({i},{j}) out of bounds"
        );
        self.entries[i][j]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, z: C64) {
        self.entries[i][j] = z;
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        (0..self.dim)
            .map(|i| self.entries[i][..self.dim].to_vec())
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = *self;
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.entries[i][j] = self.entries[j][i].conj();
            }
        }
        out
    }

    /// Largest `|m_ij − conj(m_ji)|`, including imaginary parts on the diagonal.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                worst = worst.max((self.entries[i][j] - self.entries[j][i].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.entries[i][j] - other.entries[i][j]).norm());
            }
        }
        worst
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.entries[i][j] * v[j]).sum())
            .collect()
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = *self;
        for row in out.entries.iter_mut() {
            for z in row.iter_mut() {
                *z *= s;
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut out = *self;
        for i in 0..3 {
            for j in 0..3 {
                out.entries[i][j] += other.entries[i][j];
            }
        }
        out
    }

    /// Outer product `u v†`.
    pub fn outer(u: &[C64], v: &[C64]) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::range("outer product of unequal lengths"));
        }
        let mut out = Self::zeros(u.len())?;
        for (i, a) in u.iter().enumerate() {
            for (j, b) in v.iter().enumerate() {
                out.entries[i][j] = a * b.conj();
            }
        }
        Ok(out)
    }
}

impl Mul for SmallMatrix {
    type Output = SmallMatrix;

    #[allow(clippy::op_ref)]
    fn mul(self, rhs: SmallMatrix) -> SmallMatrix {
        &self * &rhs
    }
}

impl Mul for &SmallMatrix {
    type Output = SmallMatrix;

    fn mul(self, rhs: &SmallMatrix) -> SmallMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = SmallMatrix {
            dim: self.dim,
            entries: [[ZERO; 3]; 3],
        };
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.entries[i][j] = (0..self.dim)
                    .map(|k| self.entries[i][k] * rhs.entries[k][j])
                    .sum();
            }
        }
        out
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(Error::range(format!(
            "matrix dimension {dim} not in {{2, 3}}"
        )))
    }
}
