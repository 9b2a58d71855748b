//! Exact Gaussian elimination over the rationals and the search for a
//! solution with no coordinate equal to 1/3.

use serde::Serialize;

use super::rational::Rational;
use crate::error::{Error, Result};

/// Rows `c . x = d` over `num_vars` unknowns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RationalLinearSystem {
    pub num_vars: usize,
    pub rows: Vec<(Vec<Rational>, Rational)>,
}

impl RationalLinearSystem {
    pub fn new(num_vars: usize, rows: Vec<(Vec<Rational>, Rational)>) -> Result<Self> {
        if let Some((c, _)) = rows.iter().find(|(c, _)| c.len() != num_vars) {
            return Err(Error::InvalidParameter(format!(
                "row has {} coefficients, expected {num_vars}",
                c.len()
            )));
        }
        Ok(RationalLinearSystem { num_vars, rows })
    }

    pub fn is_solution(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars
            && self.rows.iter().all(|(c, d)| {
                c.iter()
                    .zip(x)
                    .fold(Rational::zero(), |acc, (a, v)| &acc + &(a * v))
                    == *d
            })
    }
}

/// `constant + sum_j coefficients[j] * t_j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AffineForm {
    pub constant: Rational,
    pub coefficients: Vec<Rational>,
}

impl AffineForm {
    pub fn evaluate(&self, t: &[Rational]) -> Rational {
        self.coefficients
            .iter()
            .zip(t)
            .fold(self.constant.clone(), |acc, (a, v)| &acc + &(a * v))
    }

    pub fn is_constant(&self) -> bool {
        self.coefficients.iter().all(Rational::is_zero)
    }

    /// Index of the last parameter with a nonzero coefficient.
    pub fn last_parameter(&self) -> Option<usize> {
        self.coefficients.iter().rposition(|c| !c.is_zero())
    }
}

/// All solutions of a consistent system: every variable as an affine form
/// in the parameters `t_1, ..., t_m`, one per free variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParametrizedSolution {
    /// Free variables; `free[j]` is `t_{j+1}`.
    pub free: Vec<usize>,
    /// Pivot variables in order of their pivot rows.
    pub pivots: Vec<usize>,
    /// One form per variable.
    pub forms: Vec<AffineForm>,
}

impl ParametrizedSolution {
    pub fn num_parameters(&self) -> usize {
        self.free.len()
    }

    pub fn evaluate(&self, t: &[Rational]) -> Vec<Rational> {
        self.forms.iter().map(|f| f.evaluate(t)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Elimination {
    Solved(ParametrizedSolution),
    /// Elimination produced the row `0 = constant` with `constant != 0`.
    Inconsistent { constant: Rational },
}

/// Reduced row echelon form. The pivot is the first column with a nonzero
/// entry below the current row, taken from the first such row.
pub fn eliminate_rational(sys: &RationalLinearSystem) -> Elimination {
    let n = sys.num_vars;
    let mut rows: Vec<Vec<Rational>> = sys
        .rows
        .iter()
        .map(|(c, d)| c.iter().cloned().chain([d.clone()]).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(found) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, found);
        let inv = rows[r][col].recip().expect("nonzero pivot");
        for v in rows[r].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                *v = &*v - &(&factor * p);
            }
        }
        pivots.push(col);
        r += 1;
    }
    if let Some(row) = rows[r..].iter().find(|row| !row[n].is_zero()) {
        return Elimination::Inconsistent {
            constant: row[n].clone(),
        };
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let m = free.len();
    let mut forms: Vec<AffineForm> = (0..n)
        .map(|_| AffineForm {
            constant: Rational::zero(),
            coefficients: vec![Rational::zero(); m],
        })
        .collect();
    for (j, &v) in free.iter().enumerate() {
        forms[v].coefficients[j] = Rational::one();
    }
    for (i, &v) in pivots.iter().enumerate() {
        forms[v].constant = rows[i][n].clone();
        for (j, &f) in free.iter().enumerate() {
            forms[v].coefficients[j] = -&rows[i][f];
        }
    }
    Elimination::Solved(ParametrizedSolution { free, pivots, forms })
}

/// A point of the solution set with no coordinate equal to 1/3.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThirdFreePoint {
    pub parameters: Vec<Rational>,
    pub values: Vec<Rational>,
}

/// Chooses the parameters one at a time so that no variable equals 1/3.
///
/// A variable whose form last depends on `t_j` is settled when `t_j` is
/// chosen: with `t_1..t_{j-1}` fixed it rules out exactly one value of
/// `t_j`. Each `t_j` is the smallest non-negative integer not ruled out.
/// Returns `None` only if some variable is the constant 1/3.
pub fn avoid_third(ps: &ParametrizedSolution) -> Option<ThirdFreePoint> {
    let third = Rational::third();
    if ps.forms.iter().any(|f| f.is_constant() && f.constant == third) {
        return None;
    }
    let m = ps.num_parameters();
    let mut by_last: Vec<Vec<&AffineForm>> = vec![Vec::new(); m];
    for f in &ps.forms {
        if let Some(j) = f.last_parameter() {
            by_last[j].push(f);
        }
    }
    let mut t: Vec<Rational> = Vec::with_capacity(m);
    for (j, forms) in by_last.iter().enumerate() {
        // value of t_j that would make the form equal 1/3
        let forbidden: Vec<Rational> = forms
            .iter()
            .map(|f| {
                let partial = f.coefficients[..j]
                    .iter()
                    .zip(&t)
                    .fold(f.constant.clone(), |acc, (a, v)| &acc + &(a * v));
                &(&third - &partial) / &f.coefficients[j]
            })
            .collect();
        let choice = (0i64..)
            .map(Rational::integer)
            .find(|c| !forbidden.contains(c))
            .expect("finitely many forbidden values");
        t.push(choice);
    }
    let values = ps.evaluate(&t);
    debug_assert!(values.iter().all(|v| *v != third));
    Some(ThirdFreePoint { parameters: t, values })
}
