//! 2SAT through the implication graph.
//!
//! `R_ab(x, y)` forbids exactly `x = a, y = b`, i.e. it is the clause
//! `x != a  or  y != b`.

use crate::error::{Error, Result};
use crate::instance::PPInstance;

/// Literal node: `2 * v` is "v = 1", `2 * v + 1` is "v = 0".
fn literal(var: usize, value: usize) -> usize {
    2 * var + (1 - value)
}

fn forbidden_pair(symbol: &str) -> Option<(usize, usize)> {
    match symbol {
        "R_00" => Some((0, 0)),
        "R_01" => Some((0, 1)),
        "R_10" => Some((1, 0)),
        "R_11" => Some((1, 1)),
        _ => None,
    }
}

/// A satisfying assignment over `{0,1}`, or `None` if there is none.
///
/// Only the binary `R_ab` symbols are accepted.
pub fn solve_2sat(inst: &PPInstance) -> Result<Option<Vec<usize>>> {
    let (normal, map) = inst.normalize_with_map();
    let n = normal.variables.len();
    let mut graph = vec![Vec::new(); 2 * n];
    for c in &normal.conjuncts {
        let (a, b) = forbidden_pair(&c.symbol)
            .ok_or_else(|| Error::SignatureMismatch(format!("`{}` is not a 2SAT relation", c.symbol)))?;
        if c.args.len() != 2 {
            return Err(Error::ArityMismatch {
                symbol: c.symbol.clone(),
                expected: 2,
                found: c.args.len(),
            });
        }
        let (x, y) = (c.args[0], c.args[1]);
        // clause (x != a) or (y != b): x = a implies y != b, and back
        graph[literal(x, a)].push(literal(y, 1 - b));
        graph[literal(y, b)].push(literal(x, 1 - a));
    }
    let comp = tarjan(&graph);
    let mut values = vec![0; n];
    for (v, value) in values.iter_mut().enumerate() {
        let (t, f) = (comp[literal(v, 1)], comp[literal(v, 0)]);
        if t == f {
            return Ok(None);
        }
        // Components come out in reverse topological order.
        *value = usize::from(t < f);
    }
    Ok(Some(map.iter().map(|&m| values[m]).collect()))
}

/// Strongly connected components, numbered in the order they complete.
fn tarjan(graph: &[Vec<usize>]) -> Vec<usize> {
    let n = graph.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut counter = 0;
    let mut components = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut frames: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut next)) = frames.last_mut() {
            if let Some(&w) = graph[v].get(*next) {
                *next += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            frames.pop();
            if let Some(&(parent, _)) = frames.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("component on stack");
                    on_stack[w] = false;
                    comp[w] = components;
                    if w == v {
                        break;
                    }
                }
                components += 1;
            }
        }
    }
    comp
}
