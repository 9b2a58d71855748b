//! A small finite-domain backtracking engine.
//!
//! Variables are assigned in index order, values in increasing order, so
//! solutions come out in lexicographic order. Every constraint is attached
//! to the largest variable of its scope and is checked the moment that
//! variable receives a value: a partial assignment is abandoned as soon as
//! some fully determined constraint is violated.

use std::collections::hash_map::Entry;
use std::collections::HashSet;
use std::sync::Arc;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::structure::Relation;

/// Default number of value trials before a search gives up.
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;

const DENSE_LIMIT: usize = 1 << 22;
const DENSE_SCOPE_LIMIT: usize = 1 << 22;
const NO_SET: u32 = u32::MAX;

/// Membership set for tuples of a fixed arity over `0..domain`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum TupleSet {
    Dense { domain: usize, arity: usize, bits: Vec<u64> },
    Sparse { arity: usize, tuples: HashSet<Vec<usize>> },
}

impl TupleSet {
    pub fn from_tuples<'a>(domain: usize, arity: usize, tuples: impl IntoIterator<Item = &'a Vec<usize>>) -> Self {
        match checked_pow(domain, arity) {
            Some(size) if size <= DENSE_LIMIT => {
                let mut bits = vec![0u64; size.div_ceil(64).max(1)];
                for t in tuples {
                    let i = radix(domain, t.iter().copied());
                    bits[i / 64] |= 1 << (i % 64);
                }
                TupleSet::Dense { domain, arity, bits }
            }
            _ => TupleSet::Sparse {
                arity,
                tuples: tuples.into_iter().cloned().collect(),
            },
        }
    }

    pub fn from_relation(domain: usize, relation: &Relation) -> Self {
        Self::from_tuples(domain, relation.arity, &relation.tuples)
    }

    pub fn arity(&self) -> usize {
        match self {
            TupleSet::Dense { arity, .. } | TupleSet::Sparse { arity, .. } => *arity,
        }
    }

    pub fn contains(&self, values: impl Iterator<Item = usize> + Clone) -> bool {
        match self {
            TupleSet::Dense { domain, bits, .. } => {
                let i = radix(*domain, values);
                bits[i / 64] >> (i % 64) & 1 == 1
            }
            TupleSet::Sparse { tuples, .. } => tuples.contains(&values.collect::<Vec<_>>()),
        }
    }

    fn intersect(&self, other: &TupleSet) -> TupleSet {
        match (self, other) {
            (
                TupleSet::Dense { domain, arity, bits },
                TupleSet::Dense { bits: other_bits, .. },
            ) => TupleSet::Dense {
                domain: *domain,
                arity: *arity,
                bits: bits.iter().zip(other_bits).map(|(a, b)| a & b).collect(),
            },
            (TupleSet::Sparse { arity, tuples }, TupleSet::Sparse { tuples: other_tuples, .. }) => {
                TupleSet::Sparse {
                    arity: *arity,
                    tuples: tuples.intersection(other_tuples).cloned().collect(),
                }
            }
            _ => unreachable!("tuple sets over one domain share a representation"),
        }
    }
}

/// First-argument-most-significant radix encoding.
pub(crate) fn radix(base: usize, digits: impl Iterator<Item = usize>) -> usize {
    digits.fold(0, |acc, d| acc * base + d)
}

pub(crate) fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Inverse of [`radix`] for a fixed number of digits.
pub(crate) fn digits(base: usize, len: usize, mut index: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = index % base;
        index /= base;
    }
    out
}

/// Counts work against a node budget.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Budget {
    pub limit: u64,
    used: u64,
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit, used: 0 }
    }

    pub fn spend(&mut self, amount: u64) -> Result<()> {
        self.used = self.used.saturating_add(amount);
        if self.used > self.limit {
            Err(Error::ResourceLimit { budget: self.limit })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug)]
pub(crate) struct Problem {
    num_vars: usize,
    domain: usize,
    scopes: Vec<u32>,
    offsets: Vec<usize>,
    allowed: Vec<u32>,
    sets: Vec<TupleSet>,
    by_last: Vec<Vec<u32>>,
    /// Constraints left with one unassigned variable once this one is set.
    by_second: Vec<Vec<u32>>,
    /// Constraints over a single distinct variable.
    unary: Vec<u32>,
}

/// Domains up to this size are tracked as bit masks for forward checking.
const MASK_LIMIT: usize = 64;

/// Collects constraints, merging those that share a scope.
#[derive(Debug)]
pub(crate) struct ProblemBuilder {
    num_vars: usize,
    domain: usize,
    sets: Vec<TupleSet>,
    by_scope: FxHashMap<Vec<u32>, u32>,
    /// For short scopes over few variables: set id per radix-encoded
    /// scope, indexed by scope length. `NO_SET` marks a free slot.
    dense_scopes: Vec<Option<Vec<u32>>>,
    intersections: FxHashMap<(u32, u32), u32>,
    /// Dense sets by `(arity, bits)`, so equal intersections share an id.
    by_content: FxHashMap<(usize, Vec<u64>), u32>,
    key: Vec<u32>,
}

impl ProblemBuilder {
    pub fn new(num_vars: usize, domain: usize) -> Self {
        ProblemBuilder {
            num_vars,
            domain,
            sets: Vec::new(),
            by_scope: FxHashMap::default(),
            dense_scopes: Vec::new(),
            intersections: FxHashMap::default(),
            by_content: FxHashMap::default(),
            key: Vec::new(),
        }
    }

    pub fn add_set(&mut self, set: TupleSet) -> u32 {
        let id = self.sets.len() as u32;
        if let TupleSet::Dense { arity, bits, .. } = &set {
            match self.by_content.entry((*arity, bits.clone())) {
                Entry::Occupied(e) => return *e.get(),
                Entry::Vacant(e) => {
                    e.insert(id);
                }
            }
        }
        self.sets.push(set);
        id
    }

    /// Requires the values of `scope` (in order) to form a tuple of `set`.
    pub fn constrain(&mut self, scope: &[usize], set: u32) {
        debug_assert_eq!(self.sets[set as usize].arity(), scope.len());
        let len = scope.len();
        if checked_pow(self.num_vars, len).is_some_and(|size| size <= DENSE_SCOPE_LIMIT) {
            if self.dense_scopes.len() <= len {
                self.dense_scopes.resize(len + 1, None);
            }
            let size = self.num_vars.pow(len as u32);
            let index = radix(self.num_vars, scope.iter().copied());
            let existing = self.dense_scopes[len].get_or_insert_with(|| vec![NO_SET; size])[index];
            let merged = self.merge(existing, set);
            self.dense_scopes[len].as_mut().expect("allocated")[index] = merged;
            return;
        }
        self.key.clear();
        self.key.extend(scope.iter().map(|&v| v as u32));
        match self.by_scope.get(self.key.as_slice()).copied() {
            None => {
                self.by_scope.insert(self.key.clone(), set);
            }
            Some(existing) => {
                let merged = self.merge(existing, set);
                *self.by_scope.get_mut(self.key.as_slice()).expect("present") = merged;
            }
        }
    }

    /// The id of the intersection of two sets.
    fn merge(&mut self, existing: u32, set: u32) -> u32 {
        if existing == NO_SET || existing == set {
            return set;
        }
        let pair = (existing.min(set), existing.max(set));
        if let Some(&m) = self.intersections.get(&pair) {
            return m;
        }
        let m = self.sets[pair.0 as usize].intersect(&self.sets[pair.1 as usize]);
        let id = self.add_set(m);
        self.intersections.insert(pair, id);
        id
    }

    pub fn build(self) -> Problem {
        let mut entries: Vec<(Vec<u32>, u32)> = self.by_scope.into_iter().collect();
        for (len, table) in self.dense_scopes.iter().enumerate() {
            let Some(table) = table else { continue };
            for (index, &set) in table.iter().enumerate() {
                if set != NO_SET {
                    let scope = digits(self.num_vars, len, index).into_iter().map(|v| v as u32).collect();
                    entries.push((scope, set));
                }
            }
        }
        entries.sort_unstable();
        let mut scopes = Vec::new();
        let mut offsets = vec![0];
        let mut allowed = Vec::with_capacity(entries.len());
        let mut by_last = vec![Vec::new(); self.num_vars];
        let mut by_second = vec![Vec::new(); self.num_vars];
        let mut unary = Vec::new();
        for (id, (scope, set)) in entries.into_iter().enumerate() {
            // Nullary constraints are settled once, in `trivially_false`.
            let mut distinct = scope.clone();
            distinct.sort_unstable();
            distinct.dedup();
            match distinct.len() {
                0 => {}
                1 => unary.push(id as u32),
                k => by_second[distinct[k - 2] as usize].push(id as u32),
            }
            if let Some(&last) = distinct.last() {
                by_last[last as usize].push(id as u32);
            }
            scopes.extend_from_slice(&scope);
            offsets.push(scopes.len());
            allowed.push(set);
        }
        Problem {
            num_vars: self.num_vars,
            domain: self.domain,
            scopes,
            offsets,
            allowed,
            sets: self.sets,
            by_last,
            by_second,
            unary,
        }
    }
}

impl Problem {
    /// Constraints with an empty scope that reject the empty tuple.
    fn trivially_false(&self) -> bool {
        (0..self.allowed.len()).any(|c| {
            self.offsets[c] == self.offsets[c + 1]
                && !self.sets[self.allowed[c] as usize].contains(std::iter::empty())
        })
    }

    fn scope(&self, c: u32) -> &[u32] {
        &self.scopes[self.offsets[c as usize]..self.offsets[c as usize + 1]]
    }

    fn allows(&self, c: u32, values: impl Iterator<Item = usize> + Clone) -> bool {
        self.sets[self.allowed[c as usize] as usize].contains(values)
    }

    fn uses_masks(&self) -> bool {
        self.domain <= MASK_LIMIT
    }

    /// Initial domains with unary constraints applied.
    fn initial_masks(&self) -> Vec<u64> {
        let full = if self.domain == 64 { u64::MAX } else { (1u64 << self.domain) - 1 };
        let mut masks = vec![full; self.num_vars];
        for &c in &self.unary {
            let scope = self.scope(c);
            let var = scope[0] as usize;
            for x in 0..self.domain {
                if !self.allows(c, scope.iter().map(|_| x)) {
                    masks[var] &= !(1 << x);
                }
            }
        }
        masks
    }

    fn consistent(&self, var: usize, values: &[usize]) -> bool {
        self.by_last[var].iter().all(|&c| {
            let c = c as usize;
            let scope = &self.scopes[self.offsets[c]..self.offsets[c + 1]];
            self.sets[self.allowed[c] as usize].contains(scope.iter().map(|&v| values[v as usize]))
        })
    }

    pub fn solutions(self: &Arc<Self>, budget: u64) -> Solutions {
        Solutions::new(Arc::clone(self), budget, 0..self.domain)
    }

    /// Lexicographically first solution, or `None` once the space is exhausted.
    ///
    /// With `threads > 1` the values of the first variable are split into
    /// contiguous ranges searched concurrently; the witness from the lowest
    /// range wins, so the answer matches the sequential one. Each range
    /// gets the full budget.
    pub fn first_solution(self: &Arc<Self>, budget: u64, threads: usize) -> Result<Option<Vec<usize>>> {
        if threads <= 1 || self.num_vars == 0 || self.domain <= 1 {
            return self.solutions(budget).next().transpose();
        }
        let chunks = threads.min(self.domain);
        let ranges: Vec<_> = (0..chunks)
            .map(|i| (i * self.domain / chunks)..((i + 1) * self.domain / chunks))
            .collect();
        let results: Vec<Result<Option<Vec<usize>>>> = std::thread::scope(|scope| {
            let handles: Vec<_> = ranges
                .into_iter()
                .map(|range| {
                    let problem = Arc::clone(self);
                    scope.spawn(move || Solutions::new(problem, budget, range).next().transpose())
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("search thread panicked")).collect()
        });
        for result in results {
            match result {
                Ok(None) => continue,
                other => return other,
            }
        }
        Ok(None)
    }
}

/// Lazy stream of solutions; no work happens between calls to `next`.
pub(crate) struct Solutions {
    problem: Arc<Problem>,
    values: Vec<usize>,
    next_value: Vec<usize>,
    root_end: usize,
    depth: usize,
    nodes: u64,
    budget: u64,
    started: bool,
    done: bool,
    masks: Vec<u64>,
    /// Saved masks `(var, old)` to restore on backtrack.
    trail: Vec<(usize, u64)>,
    /// Trail length when each depth was entered.
    marks: Vec<usize>,
}

impl Solutions {
    fn new(problem: Arc<Problem>, budget: u64, root: std::ops::Range<usize>) -> Self {
        let n = problem.num_vars;
        let mut next_value = vec![0; n];
        if n > 0 {
            next_value[0] = root.start;
        }
        let masks = if problem.uses_masks() { problem.initial_masks() } else { Vec::new() };
        let done = problem.trivially_false() || masks.contains(&0);
        Solutions {
            masks,
            trail: Vec::new(),
            marks: vec![0; n],
            problem,
            values: vec![0; n],
            next_value,
            root_end: root.end,
            depth: 0,
            nodes: 0,
            budget,
            started: false,
            done,
        }
    }
}

impl Solutions {
    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (var, old) = self.trail.pop().expect("non-empty trail");
            self.masks[var] = old;
        }
    }

    /// Prunes the last variable of every constraint that `var` leaves with
    /// one open variable. False on a wiped-out domain.
    fn forward_check(&mut self, var: usize) -> bool {
        let problem = Arc::clone(&self.problem);
        for &c in &problem.by_second[var] {
            let scope = problem.scope(c);
            let last = *scope.iter().max().expect("non-empty scope") as usize;
            let old = self.masks[last];
            let mut mask = old;
            let mut rest = old;
            while rest != 0 {
                let x = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let values = &self.values;
                let tuple = scope.iter().map(|&w| if w as usize == last { x } else { values[w as usize] });
                if !problem.allows(c, tuple) {
                    mask &= !(1 << x);
                }
            }
            if mask != old {
                self.trail.push((last, old));
                self.masks[last] = mask;
                if mask == 0 {
                    return false;
                }
            }
        }
        true
    }
}

impl Iterator for Solutions {
    type Item = Result<Vec<usize>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let n = self.problem.num_vars;
        if self.started {
            if n == 0 {
                self.done = true;
                return None;
            }
            self.depth = n - 1;
        }
        self.started = true;
        let fc = self.problem.uses_masks();
        loop {
            if self.depth == n {
                return Some(Ok(self.values.clone()));
            }
            let var = self.depth;
            let end = if var == 0 { self.root_end } else { self.problem.domain };
            let mut advanced = false;
            while self.next_value[var] < end {
                let v = self.next_value[var];
                self.next_value[var] += 1;
                if fc && self.masks[var] >> v & 1 == 0 {
                    continue;
                }
                self.nodes += 1;
                if self.nodes > self.budget {
                    self.done = true;
                    return Some(Err(Error::ResourceLimit { budget: self.budget }));
                }
                self.values[var] = v;
                let ok = if fc {
                    self.undo_to(self.marks[var]);
                    self.forward_check(var)
                } else {
                    self.problem.consistent(var, &self.values)
                };
                if ok {
                    advanced = true;
                    break;
                }
            }
            if advanced {
                self.depth += 1;
                if self.depth < n {
                    self.next_value[self.depth] = 0;
                    self.marks[self.depth] = self.trail.len();
                }
            } else if var == 0 {
                self.done = true;
                return None;
            } else {
                self.depth -= 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn neq(domain: usize) -> TupleSet {
        let tuples: Vec<Vec<usize>> = (0..domain)
            .flat_map(|a| (0..domain).filter(move |&b| b != a).map(move |b| vec![a, b]))
            .collect();
        TupleSet::from_tuples(domain, 2, &tuples)
    }

    #[test]
    fn radix_roundtrip() {
        assert_eq!(radix(3, [1, 0, 2].into_iter()), 11);
        assert_eq!(digits(3, 3, 11), vec![1, 0, 2]);
        assert_eq!(radix(5, std::iter::empty()), 0);
    }

    #[test]
    fn triangle_colorings_in_order() {
        let mut b = ProblemBuilder::new(3, 3);
        let s = b.add_set(neq(3));
        b.constrain(&[0, 1], s);
        b.constrain(&[1, 2], s);
        b.constrain(&[0, 2], s);
        let p = Arc::new(b.build());
        let all: Vec<_> = p.solutions(1000).map(|r| r.unwrap()).collect();
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], vec![0, 1, 2]);
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(all, sorted);
    }

    #[test]
    fn shared_scopes_intersect() {
        let mut b = ProblemBuilder::new(2, 2);
        let lt = b.add_set(TupleSet::from_tuples(2, 2, &vec![vec![0, 1]]));
        let any_neq = b.add_set(neq(2));
        b.constrain(&[0, 1], any_neq);
        b.constrain(&[0, 1], lt);
        let p = Arc::new(b.build());
        let all: Vec<_> = p.solutions(100).map(|r| r.unwrap()).collect();
        assert_eq!(all, vec![vec![0, 1]]);
    }

    #[test]
    fn budget_is_reported() {
        let b = ProblemBuilder::new(20, 2);
        let p = Arc::new(b.build());
        let err = p.solutions(5).find_map(|r| r.err()).unwrap();
        assert_eq!(err, Error::ResourceLimit { budget: 5 });
    }

    #[test]
    fn threaded_search_matches_sequential() {
        let mut b = ProblemBuilder::new(4, 4);
        let s = b.add_set(neq(4));
        for (x, y) in [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)] {
            b.constrain(&[x, y], s);
        }
        let p = Arc::new(b.build());
        let seq = p.first_solution(10_000, 1).unwrap();
        for t in 2..=5 {
            assert_eq!(p.first_solution(10_000, t).unwrap(), seq);
        }
    }

    #[test]
    fn empty_problem_has_one_solution() {
        let p = Arc::new(ProblemBuilder::new(0, 3).build());
        let all: Vec<_> = p.solutions(10).collect();
        assert_eq!(all, vec![Ok(vec![])]);
    }
}
