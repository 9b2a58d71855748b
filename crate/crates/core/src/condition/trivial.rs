//! Triviality: satisfaction by projections on a two-element set.
//!
//! For a minor condition, interpreting `f` as its `c(f)`-th projection
//! makes `f(u) = g(v)` hold on `{0,1}` exactly when `u[c(f)]` and `v[c(g)]`
//! are the same variable, so the search is purely syntactic.

use serde::Serialize;

use super::{satisfies, Interpretation, MinorCondition, StrongMaltsevCondition};
use crate::error::{Error, Result};
use crate::function::projection;

/// A projection for each symbol: `(name, arity, coordinate)` with the
/// coordinate counted from 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectionChoice(pub Vec<(String, usize, usize)>);

impl ProjectionChoice {
    /// Projection tables on `0..domain`.
    pub fn to_interpretation(&self, domain: usize) -> Result<Interpretation> {
        let mut interp = Interpretation::new(domain, domain);
        for (symbol, arity, index) in &self.0 {
            interp.insert(symbol.clone(), projection(*arity, *index, domain)?)?;
        }
        Ok(interp)
    }

    /// One `name -> pi^k_i` line per symbol.
    pub fn to_text(&self) -> String {
        self.0
            .iter()
            .map(|(s, k, i)| format!("{s} -> pi^{k}_{i}\n"))
            .collect()
    }
}

impl MinorCondition {
    /// A projection choice satisfying every equation, if one exists.
    ///
    /// Coordinate domains are narrowed to arc consistency before each
    /// branch; the smallest open domain is branched on first.
    pub fn triviality_witness(&self) -> Option<Vec<usize>> {
        let mut domains: Vec<Vec<bool>> = self.symbols.iter().map(|&(_, a)| vec![true; a]).collect();
        // f(u) = f(v): the coordinate must agree on both sides.
        for (l, r) in &self.equations {
            if l.symbol == r.symbol {
                for (i, keep) in domains[l.symbol].iter_mut().enumerate() {
                    *keep &= l.args[i] == r.args[i];
                }
            }
        }
        self.branch(domains).map(|d| {
            d.iter()
                .map(|dom| dom.iter().position(|&b| b).expect("singleton domain"))
                .collect()
        })
    }

    pub fn is_trivial(&self) -> bool {
        self.triviality_witness().is_some()
    }

    /// The witness as named 1-based coordinates.
    pub fn projection_choice(&self) -> Option<ProjectionChoice> {
        self.triviality_witness().map(|w| {
            ProjectionChoice(
                self.symbols
                    .iter()
                    .zip(w)
                    .map(|((s, a), c)| (s.clone(), *a, c + 1))
                    .collect(),
            )
        })
    }

    /// Projection tables on `0..domain` for 0-based coordinates.
    pub fn projections(&self, coordinates: &[usize], domain: usize) -> Result<Interpretation> {
        let mut interp = Interpretation::new(domain, domain);
        for ((s, a), &c) in self.symbols.iter().zip(coordinates) {
            interp.insert(s.clone(), projection(*a, c + 1, domain)?)?;
        }
        Ok(interp)
    }

    fn branch(&self, mut domains: Vec<Vec<bool>>) -> Option<Vec<Vec<bool>>> {
        if !self.propagate(&mut domains) {
            return None;
        }
        let open = (0..domains.len())
            .filter(|&s| domains[s].iter().filter(|&&b| b).count() > 1)
            .min_by_key(|&s| domains[s].iter().filter(|&&b| b).count());
        let Some(s) = open else {
            return Some(domains);
        };
        for c in 0..domains[s].len() {
            if domains[s][c] {
                let mut next = domains.clone();
                next[s] = vec![false; next[s].len()];
                next[s][c] = true;
                if let Some(done) = self.branch(next) {
                    return Some(done);
                }
            }
        }
        None
    }

    /// Removes coordinates with no support in some equation. Returns false
    /// once a domain is wiped out.
    fn propagate(&self, domains: &mut [Vec<bool>]) -> bool {
        loop {
            let mut changed = false;
            for (l, r) in &self.equations {
                if l.symbol == r.symbol {
                    continue;
                }
                for (a, b) in [(l, r), (r, l)] {
                    for i in 0..domains[a.symbol].len() {
                        if !domains[a.symbol][i] {
                            continue;
                        }
                        let var = a.args[i];
                        let supported = b
                            .args
                            .iter()
                            .zip(&domains[b.symbol])
                            .any(|(&v, &ok)| ok && v == var);
                        if !supported {
                            domains[a.symbol][i] = false;
                            changed = true;
                        }
                    }
                }
            }
            if domains.iter().any(|d| !d.contains(&true)) {
                return false;
            }
            if !changed {
                return true;
            }
        }
    }
}

impl StrongMaltsevCondition {
    /// Exhaustive search over projection interpretations on `{0,1}`,
    /// checked with [`satisfies`]. Returns 0-based coordinates.
    pub fn triviality_witness(&self, budget: u64) -> Result<Option<Vec<usize>>> {
        if self.symbols.iter().any(|&(_, a)| a == 0) {
            return Ok(None);
        }
        let total = self
            .symbols
            .iter()
            .try_fold(1u64, |acc, &(_, a)| acc.checked_mul(a as u64))
            .filter(|&t| t <= budget)
            .ok_or(Error::ResourceLimit { budget })?;
        let mut choice = vec![0usize; self.symbols.len()];
        for _ in 0..total {
            let mut interp = Interpretation::new(2, 2);
            for ((s, a), &c) in self.symbols.iter().zip(&choice) {
                interp.insert(s.clone(), projection(*a, c + 1, 2)?)?;
            }
            if satisfies(self, &interp)? {
                return Ok(Some(choice));
            }
            for (digit, &(_, a)) in choice.iter_mut().zip(&self.symbols).rev() {
                *digit += 1;
                if *digit < a {
                    break;
                }
                *digit = 0;
            }
        }
        Ok(None)
    }
}
