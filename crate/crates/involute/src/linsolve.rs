//! Exact dense linear algebra over `Q(i)`: Gaussian elimination with full
//! rank accounting, used by the degree-by-degree normal-form solver.
//!
//! Systems here are small (a few dozen unknowns) but must be solved exactly
//! and must distinguish "unique solution" from "consistent but
//! underdetermined", because uniqueness of the normalized transform is
//! itself one of the certified claims.

use crate::error::Result;
use crate::scalar::GaussRational;

/// Outcome of an exact solve.
#[derive(Debug, Clone, PartialEq)]
pub enum SolveOutcome {
    /// Exactly one solution; the vector is ordered like the columns.
    Unique(Vec<GaussRational>),
    /// No solution: some row reduces to `0 = nonzero`.
    Inconsistent,
    /// Solutions form an affine space of positive dimension.
    Underdetermined { rank: usize },
}

/// An augmented system `A x = b` collected row by row.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    ncols: usize,
    rows: Vec<Vec<GaussRational>>, // each row has ncols + 1 entries (augmented)
}

impl LinearSystem {
    pub fn new(ncols: usize) -> Self {
        LinearSystem {
            ncols,
            rows: Vec::new(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn push_row(&mut self, coeffs: Vec<GaussRational>, rhs: GaussRational) {
        assert_eq!(coeffs.len(), self.ncols, "row width mismatch");
        let mut row = coeffs;
        row.push(rhs);
        self.rows.push(row);
    }

    /// Exact elimination. Pivots on the first nonzero entry in each column
    /// (any nonzero pivot is as good as any other in exact arithmetic).
    pub fn solve(mut self) -> Result<SolveOutcome> {
        let n = self.ncols;
        let m = self.rows.len();
        let mut pivot_row_of_col: Vec<Option<usize>> = vec![None; n];
        let mut next_row = 0usize;

        for (col, pivot_slot) in pivot_row_of_col.iter_mut().enumerate() {
            // Find a pivot at or below next_row.
            let Some(p) = (next_row..m).find(|&r| !self.rows[r][col].is_zero()) else {
                continue;
            };
            self.rows.swap(next_row, p);
            let inv = self.rows[next_row][col].inv()?;
            for e in self.rows[next_row].iter_mut() {
                *e *= &inv;
            }
            // Eliminate the column everywhere else.
            for r in 0..m {
                if r == next_row || self.rows[r][col].is_zero() {
                    continue;
                }
                let factor = self.rows[r][col].clone();
                for c in col..=n {
                    let delta = &factor * &self.rows[next_row][c];
                    let cur = &self.rows[r][c] - &delta;
                    self.rows[r][c] = cur;
                }
            }
            *pivot_slot = Some(next_row);
            next_row += 1;
            if next_row == m {
                break;
            }
        }

        // Inconsistency: a zero row with nonzero rhs.
        for row in &self.rows {
            if row[..n].iter().all(|e| e.is_zero()) && !row[n].is_zero() {
                return Ok(SolveOutcome::Inconsistent);
            }
        }

        let rank = pivot_row_of_col.iter().filter(|p| p.is_some()).count();
        if rank < n {
            return Ok(SolveOutcome::Underdetermined { rank });
        }

        let mut x = vec![GaussRational::zero(); n];
        for (col, p) in pivot_row_of_col.iter().enumerate() {
            let r = p.expect("full rank implies a pivot per column");
            x[col] = self.rows[r][n].clone();
        }
        Ok(SolveOutcome::Unique(x))
    }
}
