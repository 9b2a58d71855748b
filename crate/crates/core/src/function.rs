//! Total functions `A^k -> B` stored as value tables.
//!
//! The table is indexed by the radix-`|A|` encoding of the argument tuple
//! with the first argument most significant: for `A = {0,1}` and `k = 3`
//! the entries are `f(0,0,0), f(0,0,1), f(0,1,0), ..., f(1,1,1)`.
//!
//! Text format: `fn <in_n> <out_n> <arity>`, the entries in index order
//! (whitespace separated, any line breaks), then `end`.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::search::{checked_pow, digits, radix};
use crate::text;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FunctionTable {
    pub in_domain: usize,
    pub out_domain: usize,
    pub arity: usize,
    pub table: Vec<usize>,
}

impl FunctionTable {
    pub fn new(in_domain: usize, out_domain: usize, arity: usize, table: Vec<usize>) -> Result<Self> {
        let expected = checked_pow(in_domain, arity)
            .ok_or_else(|| Error::InvalidParameter(format!("{in_domain}^{arity} cells do not fit in memory")))?;
        if table.len() != expected {
            return Err(Error::InvalidParameter(format!(
                "table has {} entries, expected {in_domain}^{arity} = {expected}",
                table.len()
            )));
        }
        if let Some(&bad) = table.iter().find(|&&v| v >= out_domain) {
            return Err(Error::InvalidParameter(format!(
                "table entry {bad} is outside 0..{out_domain}"
            )));
        }
        Ok(FunctionTable {
            in_domain,
            out_domain,
            arity,
            table,
        })
    }

    /// Tabulates `f` over every argument tuple in index order.
    pub fn from_fn(in_domain: usize, out_domain: usize, arity: usize, mut f: impl FnMut(&[usize]) -> usize) -> Self {
        let cells = in_domain.pow(arity as u32);
        let table = (0..cells).map(|i| f(&digits(in_domain, arity, i))).collect();
        FunctionTable::new(in_domain, out_domain, arity, table).expect("from_fn produced an out-of-range value")
    }

    /// Every `arity`-ary table from `0..in_domain` to `0..out_domain`, in
    /// lexicographic order of the table.
    pub fn all(in_domain: usize, out_domain: usize, arity: usize) -> impl Iterator<Item = FunctionTable> {
        let cells = in_domain.pow(arity as u32);
        (0..out_domain.pow(cells as u32)).map(move |code| FunctionTable {
            in_domain,
            out_domain,
            arity,
            table: digits(out_domain, cells, code),
        })
    }

    pub fn cells(&self) -> usize {
        self.table.len()
    }

    pub fn index_of(&self, args: &[usize]) -> usize {
        radix(self.in_domain, args.iter().copied())
    }

    /// Evaluates the function, checking arity and argument ranges.
    pub fn apply(&self, args: &[usize]) -> Result<usize> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch {
                symbol: "function".into(),
                expected: self.arity,
                found: args.len(),
            });
        }
        if let Some(&bad) = args.iter().find(|&&a| a >= self.in_domain) {
            return Err(Error::DomainMismatch(format!(
                "argument {bad} is outside 0..{}",
                self.in_domain
            )));
        }
        Ok(self.table[self.index_of(args)])
    }

    /// Composition `self(g_1(x), ..., g_k(x))`; needs `|A| = |B|` throughout.
    pub fn compose(&self, inner: &[FunctionTable]) -> Result<FunctionTable> {
        if inner.len() != self.arity {
            return Err(Error::ArityMismatch {
                symbol: "outer function".into(),
                expected: self.arity,
                found: inner.len(),
            });
        }
        let m = inner.first().map_or(0, |g| g.arity);
        if inner.iter().any(|g| g.arity != m || g.in_domain != self.in_domain || g.out_domain != self.in_domain)
            || self.in_domain != self.out_domain
        {
            return Err(Error::DomainMismatch("composition needs one common domain".into()));
        }
        Ok(FunctionTable::from_fn(self.in_domain, self.out_domain, m, |x| {
            let args: Vec<usize> = inner.iter().map(|g| g.table[g.index_of(x)]).collect();
            self.table[self.index_of(&args)]
        }))
    }

    pub fn parse(source: &str) -> Result<Self> {
        let lines = text::lines(source, false);
        let (table, rest) = parse_table(&lines, source)?;
        if let Some(extra) = rest.first() {
            return Err(extra.error("unexpected text after `end`"));
        }
        Ok(table)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "fn {} {} {}", self.in_domain, self.out_domain, self.arity);
        // One row per value of the first argument keeps large tables readable.
        let row = if self.arity == 0 { 1 } else { self.cells() / self.in_domain };
        for chunk in self.table.chunks(row.max(1)) {
            let entries: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", entries.join(" "));
        }
        out.push_str("end\n");
        out
    }
}

/// Parses one `fn ... end` block from the front of `lines`, returning the
/// unread remainder.
pub(crate) fn parse_table<'a, 'b>(
    lines: &'b [text::Line<'a>],
    source: &str,
) -> Result<(FunctionTable, &'b [text::Line<'a>])> {
    let header = lines.first().ok_or_else(|| text::unexpected_eof(source, "fn"))?;
    let words = header.words();
    if words[0].1 != "fn" || words.len() != 4 {
        return Err(header.error("expected `fn <in_n> <out_n> <arity>`"));
    }
    let in_domain = text::parse_usize(header, words[1].0, words[1].1)?;
    let out_domain = text::parse_usize(header, words[2].0, words[2].1)?;
    let arity = text::parse_usize(header, words[3].0, words[3].1)?;
    let expected = checked_pow(in_domain, arity)
        .ok_or_else(|| header.error("table size overflows"))?;
    let mut table = Vec::with_capacity(expected);
    for (i, line) in lines.iter().enumerate().skip(1) {
        let words = line.words();
        if words.len() == 1 && words[0].1 == "end" {
            if table.len() != expected {
                return Err(line.error(format!(
                    "table has {} entries, expected {expected}",
                    table.len()
                )));
            }
            let f = FunctionTable::new(in_domain, out_domain, arity, table)
                .map_err(|e| header.error(e.to_string()))?;
            return Ok((f, &lines[i + 1..]));
        }
        for (col, w) in words {
            let v = text::parse_usize(line, col, w)?;
            if v >= out_domain {
                return Err(line.error_at(col, format!("{v} is outside 0..{out_domain}")));
            }
            table.push(v);
        }
    }
    Err(text::unexpected_eof(source, "fn"))
}

/// The built-in function families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NamedFunction {
    /// `pi^k_i` on `0..domain`, with `index` counted from 1.
    Projection { arity: usize, index: usize, domain: usize },
    /// Ternary majority on `{0,1}`.
    Majority2,
    /// `t_1 x_1 + ... + t_k x_k (mod p)` with `sum t_i = 1 (mod p)`.
    Affine { modulus: usize, coefficients: Vec<usize> },
    /// `{0,1}^k -> {0,1}`, 1 iff the mean of the arguments exceeds 1/3; `k` not divisible by 3.
    Threshold13 { arity: usize },
}

pub fn named_function(family: &NamedFunction) -> Result<FunctionTable> {
    match *family {
        NamedFunction::Projection { arity, index, domain } => projection(arity, index, domain),
        NamedFunction::Majority2 => Ok(majority2()),
        NamedFunction::Affine { modulus, ref coefficients } => affine(modulus, coefficients),
        NamedFunction::Threshold13 { arity } => threshold13(arity),
    }
}

pub fn projection(arity: usize, index: usize, domain: usize) -> Result<FunctionTable> {
    if index == 0 || index > arity {
        return Err(Error::InvalidParameter(format!(
            "projection index {index} is not in 1..={arity}"
        )));
    }
    if domain == 0 {
        return Err(Error::InvalidParameter("projection needs a non-empty domain".into()));
    }
    Ok(FunctionTable::from_fn(domain, domain, arity, |x| x[index - 1]))
}

pub fn majority2() -> FunctionTable {
    FunctionTable::from_fn(2, 2, 3, |x| usize::from(x[0] + x[1] + x[2] >= 2))
}

pub fn affine(modulus: usize, coefficients: &[usize]) -> Result<FunctionTable> {
    if !crate::builtin::is_prime(modulus) {
        return Err(Error::InvalidParameter(format!("{modulus} is not prime")));
    }
    let sum: usize = coefficients.iter().sum();
    if sum % modulus != 1 % modulus {
        return Err(Error::InvalidParameter(format!(
            "coefficients sum to {} (mod {modulus}), expected 1",
            sum % modulus
        )));
    }
    Ok(FunctionTable::from_fn(modulus, modulus, coefficients.len(), |x| {
        x.iter().zip(coefficients).map(|(a, t)| a * t).sum::<usize>() % modulus
    }))
}

pub fn threshold13(arity: usize) -> Result<FunctionTable> {
    if arity.is_multiple_of(3) {
        return Err(Error::InvalidParameter(format!(
            "threshold arity must not be divisible by 3, got {arity}"
        )));
    }
    // sum/k > 1/3  <=>  3 * sum > k
    Ok(FunctionTable::from_fn(2, 2, arity, |x| {
        usize::from(3 * x.iter().sum::<usize>() > arity)
    }))
}
