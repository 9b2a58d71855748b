//! Linear systems over `Z_p`.
//!
//! Text format: a `modp <p>` header, one row `c_1 ... c_k | d` per
//! equation `c_1 x_1 + ... + c_k x_k = d`, then `end`. All rows have the
//! same length. The header may name the number of unknowns,
//! `modp <p> <k>`; it is written only for systems without rows.

use std::fmt::Write as _;

use serde::Serialize;

use crate::builtin::{is_prime, parse_lin_symbol};
use crate::error::{Error, Result};
use crate::instance::PPInstance;
use crate::text;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModPSystem {
    pub p: usize,
    pub num_vars: usize,
    pub rows: Vec<(Vec<usize>, usize)>,
}

impl ModPSystem {
    pub fn new(p: usize, num_vars: usize, rows: Vec<(Vec<usize>, usize)>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidParameter(format!("{p} is not prime")));
        }
        for (coeffs, d) in &rows {
            if coeffs.len() != num_vars {
                return Err(Error::InvalidParameter(format!(
                    "row has {} coefficients, expected {num_vars}",
                    coeffs.len()
                )));
            }
            if let Some(v) = coeffs.iter().chain([d]).find(|&&v| v >= p) {
                return Err(Error::InvalidParameter(format!("{v} is not reduced mod {p}")));
            }
        }
        Ok(ModPSystem { p, num_vars, rows })
    }

    pub fn is_solution(&self, x: &[usize]) -> bool {
        x.len() == self.num_vars
            && self.rows.iter().all(|(c, d)| {
                c.iter().zip(x).fold(0, |acc, (a, v)| (acc + a * v) % self.p) == *d
            })
    }

    pub fn parse(source: &str) -> Result<Self> {
        let lines = text::lines(source, false);
        let header = lines.first().ok_or_else(|| text::unexpected_eof(source, "modp"))?;
        let words = header.words();
        if !(2..=3).contains(&words.len()) || words[0].1 != "modp" {
            return Err(header.error("expected `modp <p>` or `modp <p> <unknowns>`"));
        }
        let p = text::parse_usize(header, words[1].0, words[1].1)?;
        if !is_prime(p) {
            return Err(header.error_at(words[1].0, format!("{p} is not prime")));
        }
        let mut rows = Vec::new();
        let mut width = match words.get(2) {
            Some(&(col, w)) => Some(text::parse_usize(header, col, w)?),
            None => None,
        };
        for (i, line) in lines.iter().enumerate().skip(1) {
            let words = line.words();
            if words.len() == 1 && words[0].1 == "end" {
                if let Some(extra) = lines.get(i + 1) {
                    return Err(extra.error("unexpected text after `end`"));
                }
                return ModPSystem::new(p, width.unwrap_or(0), rows);
            }
            let Some(bar) = words.iter().position(|&(_, w)| w == "|") else {
                return Err(line.error("expected `c_1 ... c_k | d`"));
            };
            if bar + 2 != words.len() {
                return Err(line.error("expected exactly one constant after `|`"));
            }
            let mut read = |&(col, w): &(usize, &str)| -> Result<usize> {
                let v = text::parse_usize(line, col, w)?;
                if v >= p {
                    return Err(line.error_at(col, format!("{v} is not reduced mod {p}")));
                }
                Ok(v)
            };
            let coeffs = words[..bar].iter().map(&mut read).collect::<Result<Vec<_>>>()?;
            let d = read(&words[bar + 1])?;
            if *width.get_or_insert(coeffs.len()) != coeffs.len() {
                return Err(line.error("all rows must have the same number of coefficients"));
            }
            rows.push((coeffs, d));
        }
        Err(text::unexpected_eof(source, "modp"))
    }

    pub fn to_text(&self) -> String {
        let mut out = if self.rows.is_empty() && self.num_vars > 0 {
            format!("modp {} {}\n", self.p, self.num_vars)
        } else {
            format!("modp {}\n", self.p)
        };
        for (c, d) in &self.rows {
            for v in c {
                let _ = write!(out, "{v} ");
            }
            let _ = writeln!(out, "| {d}");
        }
        out.push_str("end\n");
        out
    }
}

fn pow_mod(mut base: u128, mut exp: u128, p: u128) -> u128 {
    let mut acc = 1;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

fn inverse(a: usize, p: usize) -> usize {
    pow_mod(a as u128, p as u128 - 2, p as u128) as usize
}

/// One solution (free variables set to 0), or `None` when inconsistent.
pub fn solve_mod_p(sys: &ModPSystem) -> Result<Option<Vec<usize>>> {
    let p = sys.p;
    if !is_prime(p) {
        return Err(Error::InvalidParameter(format!("{p} is not prime")));
    }
    let n = sys.num_vars;
    let mulmod = |a: usize, b: usize| ((a as u128 * b as u128) % p as u128) as usize;
    let mut rows: Vec<Vec<usize>> = sys
        .rows
        .iter()
        .map(|(c, d)| c.iter().copied().chain([*d]).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(found) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, found);
        let inv = inverse(rows[r][col], p);
        for v in rows[r].iter_mut() {
            *v = mulmod(*v, inv);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[col] != 0 {
                let factor = row[col];
                for (v, &q) in row.iter_mut().zip(&pivot_row) {
                    *v = (*v + p - mulmod(factor, q)) % p;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| row[n] != 0) {
        return Ok(None);
    }
    let mut x = vec![0; n];
    for (i, &col) in pivots.iter().enumerate() {
        x[col] = rows[i][n];
    }
    debug_assert!(sys.is_solution(&x));
    Ok(Some(x))
}

/// Reads each `L_abcd(x, y, z)` conjunct as `ax + by + cz = d (mod p)`;
/// a variable repeated in a conjunct has its coefficients added.
pub fn lin_instance_to_system(inst: &PPInstance, p: usize) -> Result<ModPSystem> {
    if !is_prime(p) {
        return Err(Error::InvalidParameter(format!("{p} is not prime")));
    }
    if !inst.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let normal = inst;
    let n = normal.variables.len();
    let mut rows = Vec::with_capacity(normal.conjuncts.len());
    for c in &normal.conjuncts {
        let coeffs = parse_lin_symbol(p, &c.symbol)
            .ok_or_else(|| Error::SignatureMismatch(format!("`{}` is not a 3LIN_{p} relation", c.symbol)))?;
        if c.args.len() != 3 {
            return Err(Error::ArityMismatch {
                symbol: c.symbol.clone(),
                expected: 3,
                found: c.args.len(),
            });
        }
        let mut row = vec![0; n];
        for (&v, &a) in c.args.iter().zip(&coeffs[..3]) {
            row[v] = (row[v] + a) % p;
        }
        rows.push((row, coeffs[3]));
    }
    ModPSystem::new(p, n, rows)
}
