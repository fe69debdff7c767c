use std::fmt;

use serde::{Deserialize, Serialize};

use super::field::GaloisField;

/// Square matrix over a finite field, entries stored row-major as field
/// element values.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatrixRep {
    pub size: usize,
    pub entries: Vec<u32>,
}

impl MatrixRep {
    pub fn zero(size: usize) -> Self {
        MatrixRep { size, entries: vec![0; size * size] }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zero(size);
        for i in 0..size {
            m.set(i, i, 1);
        }
        m
    }

    /// The matrix unit with a single one at `(row, col)` (zero-based).
    pub fn unit(size: usize, row: usize, col: usize) -> Self {
        let mut m = Self::zero(size);
        m.set(row, col, 1);
        m
    }

    pub fn from_rows(rows: &[&[u32]]) -> Self {
        let size = rows.len();
        assert!(rows.iter().all(|r| r.len() == size), "rows must form a square matrix");
        MatrixRep { size, entries: rows.iter().flat_map(|r| r.iter().copied()).collect() }
    }

    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.entries[row * self.size + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: u32) {
        self.entries[row * self.size + col] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }

    /// Block diagonal sum `diag(self, other)`.
    pub fn direct_sum(&self, other: &MatrixRep) -> MatrixRep {
        let n = self.size + other.size;
        let mut out = MatrixRep::zero(n);
        for i in 0..self.size {
            for j in 0..self.size {
                out.set(i, j, self.get(i, j));
            }
        }
        for i in 0..other.size {
            for j in 0..other.size {
                out.set(self.size + i, self.size + j, other.get(i, j));
            }
        }
        out
    }

    /// Square sub-block starting at `(offset, offset)`.
    pub fn block(&self, offset: usize, size: usize) -> MatrixRep {
        let mut out = MatrixRep::zero(size);
        for i in 0..size {
            for j in 0..size {
                out.set(i, j, self.get(offset + i, offset + j));
            }
        }
        out
    }

    pub fn render(&self, field: &GaloisField) -> String {
        let rows: Vec<String> = (0..self.size)
            .map(|i| {
                let cells: Vec<String> = (0..self.size).map(|j| field.render(self.get(i, j))).collect();
                format!("[{}]", cells.join(","))
            })
            .collect();
        format!("[{}]", rows.join(","))
    }
}

impl fmt::Display for MatrixRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.size {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str("[")?;
            for j in 0..self.size {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}
