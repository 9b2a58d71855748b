//! Finite relational structures, signatures, homomorphisms and PCSP templates.
//!
//! Domain elements are always `0..domain_size`. That canonical order is
//! relied upon by every file format and by certificate decoding in
//! [`crate::reduction`].

use std::collections::{BTreeMap, HashSet};
use std::fmt::{self, Write as _};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::search::{ProblemBuilder, TupleSet, DEFAULT_NODE_BUDGET};
use crate::text::{self, Line};

/// A named relation. Tuples keep their declaration order (duplicates are
/// dropped); that order is the enumeration used by the reductions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Relation {
    pub symbol: String,
    pub arity: usize,
    pub tuples: Vec<Vec<usize>>,
}

impl Relation {
    pub fn new(symbol: impl Into<String>, arity: usize, tuples: impl IntoIterator<Item = Vec<usize>>) -> Self {
        let mut seen = HashSet::new();
        let tuples = tuples.into_iter().filter(|t| seen.insert(t.clone())).collect();
        Relation {
            symbol: symbol.into(),
            arity,
            tuples,
        }
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, tuple: &[usize]) -> bool {
        self.tuples.iter().any(|t| t == tuple)
    }

    /// True iff the relation is all of `domain^arity`.
    pub fn is_full(&self, domain: usize) -> bool {
        crate::search::checked_pow(domain, self.arity) == Some(self.tuples.len())
    }
}

/// Relation symbols with their arities, in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Signature(pub Vec<(String, usize)>);

impl Signature {
    pub fn arity_of(&self, symbol: &str) -> Option<usize> {
        self.0.iter().find(|(s, _)| s == symbol).map(|&(_, a)| a)
    }

    /// Same symbols with the same arities, ignoring order.
    pub fn is_similar(&self, other: &Signature) -> bool {
        let mine: BTreeMap<_, _> = self.0.iter().cloned().collect();
        let theirs: BTreeMap<_, _> = other.0.iter().cloned().collect();
        mine == theirs && mine.len() == self.0.len() && theirs.len() == other.0.len()
    }
}

/// A single broken invariant found by [`RelationalStructure::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    EmptyDomain,
    ZeroArity { symbol: String },
    DuplicateSymbol { symbol: String },
    OutOfRange { symbol: String, tuple: Vec<usize>, value: usize },
    ArityMismatch { symbol: String, tuple: Vec<usize>, arity: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EmptyDomain => write!(f, "domain is empty"),
            Violation::ZeroArity { symbol } => write!(f, "relation {symbol} has arity 0"),
            Violation::DuplicateSymbol { symbol } => write!(f, "relation symbol {symbol} declared twice"),
            Violation::OutOfRange { symbol, tuple, value } => {
                write!(f, "relation {symbol}: tuple {tuple:?} contains {value}, outside the domain")
            }
            Violation::ArityMismatch { symbol, tuple, arity } => {
                write!(f, "relation {symbol}: tuple {tuple:?} does not have arity {arity}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationalStructure {
    pub name: String,
    pub domain_size: usize,
    pub relations: Vec<Relation>,
}

impl RelationalStructure {
    /// Builds a structure, rejecting it if [`validate`](Self::validate) reports anything.
    pub fn new(name: impl Into<String>, domain_size: usize, relations: Vec<Relation>) -> Result<Self> {
        let s = RelationalStructure {
            name: name.into(),
            domain_size,
            relations,
        };
        let report = s.validate();
        if report.is_empty() {
            Ok(s)
        } else {
            let msgs: Vec<String> = report.iter().map(|v| v.to_string()).collect();
            Err(Error::InvalidStructure(format!("{}: {}", s.name, msgs.join("; "))))
        }
    }

    /// Lists every invariant violation; an empty list means the structure is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.domain_size == 0 {
            out.push(Violation::EmptyDomain);
        }
        let mut seen = HashSet::new();
        for rel in &self.relations {
            if !seen.insert(rel.symbol.as_str()) {
                out.push(Violation::DuplicateSymbol {
                    symbol: rel.symbol.clone(),
                });
            }
            if rel.arity == 0 {
                out.push(Violation::ZeroArity {
                    symbol: rel.symbol.clone(),
                });
            }
            for t in &rel.tuples {
                if t.len() != rel.arity {
                    out.push(Violation::ArityMismatch {
                        symbol: rel.symbol.clone(),
                        tuple: t.clone(),
                        arity: rel.arity,
                    });
                }
                if let Some(&value) = t.iter().find(|&&v| v >= self.domain_size) {
                    out.push(Violation::OutOfRange {
                        symbol: rel.symbol.clone(),
                        tuple: t.clone(),
                        value,
                    });
                }
            }
        }
        out
    }

    pub fn signature(&self) -> Signature {
        Signature(self.relations.iter().map(|r| (r.symbol.clone(), r.arity)).collect())
    }

    pub fn relation(&self, symbol: &str) -> Option<&Relation> {
        self.relations.iter().find(|r| r.symbol == symbol)
    }

    pub fn is_similar(&self, other: &RelationalStructure) -> bool {
        self.signature().is_similar(&other.signature())
    }

    pub(crate) fn check_similar(&self, other: &RelationalStructure) -> Result<()> {
        if self.is_similar(other) {
            Ok(())
        } else {
            Err(Error::SignatureMismatch(format!(
                "{} and {} do not share a signature",
                self.name, other.name
            )))
        }
    }

    /// Relations of `self` paired with the same-named relations of `other`.
    pub(crate) fn paired<'a>(&'a self, other: &'a RelationalStructure) -> Result<Vec<(&'a Relation, &'a Relation)>> {
        self.check_similar(other)?;
        Ok(self
            .relations
            .iter()
            .map(|r| (r, other.relation(&r.symbol).expect("similar structures")))
            .collect())
    }

    /// Parses one `structure ... end` block.
    pub fn parse(source: &str) -> Result<Self> {
        let lines = text::lines(source, false);
        let mut iter = lines.iter().peekable();
        let s = parse_block(&mut iter, "structure", source)?;
        if let Some(extra) = iter.next() {
            return Err(extra.error("unexpected text after `end`"));
        }
        Ok(s)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        write_block(&mut out, "structure", self);
        out
    }
}

type LineIter<'a, 'b> = std::iter::Peekable<std::slice::Iter<'b, Line<'a>>>;

fn parse_block(iter: &mut LineIter<'_, '_>, keyword: &str, source: &str) -> Result<RelationalStructure> {
    let header = iter
        .next()
        .ok_or_else(|| text::unexpected_eof(source, keyword))?;
    let words = header.words();
    if words[0].1 != keyword || words.len() != 2 {
        return Err(header.error(format!("expected `{keyword} <name>`")));
    }
    let name = words[1].1.to_string();

    let domain_line = iter
        .next()
        .ok_or_else(|| text::unexpected_eof(source, keyword))?;
    let words = domain_line.words();
    if words[0].1 != "domain" || words.len() != 2 {
        return Err(domain_line.error("expected `domain <n>`"));
    }
    let domain_size = text::parse_usize(domain_line, words[1].0, words[1].1)?;

    let mut relations: Vec<Relation> = Vec::new();
    let mut current: Option<(String, usize, Vec<Vec<usize>>)> = None;
    loop {
        let line = iter
            .next()
            .ok_or_else(|| text::unexpected_eof(source, keyword))?;
        let words = line.words();
        match words[0].1 {
            "end" if words.len() == 1 => {
                if let Some((sym, arity, tuples)) = current.take() {
                    relations.push(Relation::new(sym, arity, tuples));
                }
                break;
            }
            "relation" => {
                if words.len() != 3 || !text::is_identifier(words[1].1) {
                    return Err(line.error("expected `relation <Symbol> <arity>`"));
                }
                if let Some((sym, arity, tuples)) = current.take() {
                    relations.push(Relation::new(sym, arity, tuples));
                }
                let arity = text::parse_usize(line, words[2].0, words[2].1)?;
                current = Some((words[1].1.to_string(), arity, Vec::new()));
            }
            _ => {
                let Some((sym, arity, tuples)) = current.as_mut() else {
                    return Err(line.error("tuple outside of a `relation` section"));
                };
                let tuple = words
                    .iter()
                    .map(|&(col, w)| text::parse_usize(line, col, w))
                    .collect::<Result<Vec<_>>>()?;
                if tuple.len() != *arity {
                    return Err(line.error(format!(
                        "relation {sym} has arity {arity} but this tuple has {} entries",
                        tuple.len()
                    )));
                }
                if let Some(pos) = tuple.iter().position(|&v| v >= domain_size) {
                    return Err(line.error_at(
                        words[pos].0,
                        format!("{} is outside the domain 0..{}", tuple[pos], domain_size),
                    ));
                }
                tuples.push(tuple);
            }
        }
    }
    let s = RelationalStructure {
        name,
        domain_size,
        relations,
    };
    if let Some(v) = s.validate().first() {
        return Err(header.error(v.to_string()));
    }
    Ok(s)
}

fn write_block(out: &mut String, keyword: &str, s: &RelationalStructure) {
    let _ = writeln!(out, "{keyword} {}", s.name);
    let _ = writeln!(out, "domain {}", s.domain_size);
    for rel in &s.relations {
        let _ = writeln!(out, "relation {} {}", rel.symbol, rel.arity);
        for t in &rel.tuples {
            let row: Vec<String> = t.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
    }
    out.push_str("end\n");
}

/// A total map between domains, `0..len` to `0..target`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomMap(pub Vec<usize>);

impl HomMap {
    pub fn identity(n: usize) -> Self {
        HomMap((0..n).collect())
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x]
    }
}

/// True iff `h` sends every tuple of every relation of `a` into the
/// same-named relation of `b`.
pub fn is_homomorphism(h: &HomMap, a: &RelationalStructure, b: &RelationalStructure) -> Result<bool> {
    let pairs = a.paired(b)?;
    if h.0.len() != a.domain_size {
        return Err(Error::DomainMismatch(format!(
            "map covers {} elements but {} has {}",
            h.0.len(),
            a.name,
            a.domain_size
        )));
    }
    if let Some(&bad) = h.0.iter().find(|&&v| v >= b.domain_size) {
        return Err(Error::DomainMismatch(format!("{bad} is outside the domain of {}", b.name)));
    }
    Ok(pairs.iter().all(|(ra, rb)| {
        let target = TupleSet::from_relation(b.domain_size, rb);
        ra.tuples.iter().all(|t| target.contains(t.iter().map(|&x| h.0[x])))
    }))
}

/// Exhaustive backtracking for a homomorphism `a -> b` within `budget` node visits.
pub fn find_homomorphism(a: &RelationalStructure, b: &RelationalStructure, budget: u64) -> Result<Option<HomMap>> {
    let pairs = a.paired(b)?;
    let mut builder = ProblemBuilder::new(a.domain_size, b.domain_size);
    for (ra, rb) in pairs {
        let set = builder.add_set(TupleSet::from_relation(b.domain_size, rb));
        for t in &ra.tuples {
            builder.constrain(t, set);
        }
    }
    let problem = Arc::new(builder.build());
    Ok(problem.first_solution(budget, 1)?.map(HomMap))
}

/// A pair of similar structures with a homomorphism from the first to the second.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PcspTemplate {
    pub yes: RelationalStructure,
    pub no: RelationalStructure,
    pub witness: HomMap,
}

impl PcspTemplate {
    /// Pairs `yes` with `no`, searching for the homomorphism with the default budget.
    pub fn new(yes: RelationalStructure, no: RelationalStructure) -> Result<Self> {
        match find_homomorphism(&yes, &no, DEFAULT_NODE_BUDGET)? {
            Some(witness) => Ok(PcspTemplate { yes, no, witness }),
            None => Err(Error::InvalidStructure(format!(
                "no homomorphism from {} to {}",
                yes.name, no.name
            ))),
        }
    }

    pub fn with_witness(yes: RelationalStructure, no: RelationalStructure, witness: HomMap) -> Result<Self> {
        if is_homomorphism(&witness, &yes, &no)? {
            Ok(PcspTemplate { yes, no, witness })
        } else {
            Err(Error::InvalidStructure("supplied map is not a homomorphism".into()))
        }
    }

    /// The template `(s, s)`: the CSP over `s` seen as a promise problem.
    pub fn csp(s: RelationalStructure) -> Self {
        let witness = HomMap::identity(s.domain_size);
        PcspTemplate {
            yes: s.clone(),
            no: s,
            witness,
        }
    }

    /// Parses a `yes-structure ... end` block followed by a `no-structure ... end` block.
    pub fn parse(source: &str) -> Result<Self> {
        let lines = text::lines(source, false);
        let mut iter = lines.iter().peekable();
        let yes = parse_block(&mut iter, "yes-structure", source)?;
        let no = parse_block(&mut iter, "no-structure", source)?;
        if let Some(extra) = iter.next() {
            return Err(extra.error("unexpected text after the no-structure"));
        }
        Self::new(yes, no)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        write_block(&mut out, "yes-structure", &self.yes);
        write_block(&mut out, "no-structure", &self.no);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{k_coloring, one_in_three, three_nae};

    fn constant_map(n: usize, c: usize) -> HomMap {
        HomMap(vec![c; n])
    }

    #[test]
    fn builtins_validate_cleanly() {
        assert!(k_coloring(3).unwrap().validate().is_empty());
    }

    #[test]
    fn out_of_range_entry_is_reported() {
        let s = RelationalStructure {
            name: "S".into(),
            domain_size: 2,
            relations: vec![Relation::new("R", 2, vec![vec![0, 2]])],
        };
        let report = s.validate();
        assert_eq!(report.len(), 1);
        assert!(matches!(report[0], Violation::OutOfRange { value: 2, .. }));
    }

    #[test]
    fn arity_mismatch_is_reported() {
        let s = RelationalStructure {
            name: "S".into(),
            domain_size: 2,
            relations: vec![Relation::new("R", 3, vec![vec![0, 1]])],
        };
        let report = s.validate();
        assert_eq!(report.len(), 1);
        assert!(matches!(report[0], Violation::ArityMismatch { arity: 3, .. }));
    }

    #[test]
    fn duplicate_symbols_are_reported() {
        let s = RelationalStructure {
            name: "S".into(),
            domain_size: 2,
            relations: vec![Relation::new("R", 1, vec![]), Relation::new("R", 1, vec![])],
        };
        assert_eq!(
            s.validate(),
            vec![Violation::DuplicateSymbol { symbol: "R".into() }]
        );
        assert!(RelationalStructure::new("S", 2, s.relations.clone()).is_err());
    }

    #[test]
    fn homomorphism_checks() {
        let k2 = k_coloring(2).unwrap();
        let k3 = k_coloring(3).unwrap();
        assert!(is_homomorphism(&HomMap::identity(3), &k3, &k3).unwrap());
        assert!(is_homomorphism(&HomMap(vec![0, 1]), &k2, &k3).unwrap());
        assert!(!is_homomorphism(&constant_map(3, 0), &k3, &k3).unwrap());
        assert!(matches!(
            is_homomorphism(&HomMap::identity(2), &k2, &one_in_three()),
            Err(Error::SignatureMismatch(_))
        ));
    }

    #[test]
    fn homomorphism_search() {
        let k2 = k_coloring(2).unwrap();
        let k3 = k_coloring(3).unwrap();
        let h = find_homomorphism(&k2, &k3, 1000).unwrap().unwrap();
        assert_ne!(h.0[0], h.0[1]);
        assert_eq!(find_homomorphism(&k3, &k2, 1000).unwrap(), None);
        let onein3 = one_in_three();
        let nae = three_nae(2).unwrap();
        assert_eq!(
            find_homomorphism(&onein3, &nae, 1000).unwrap(),
            Some(HomMap::identity(2))
        );
    }

    #[test]
    fn homomorphism_search_respects_budget() {
        let k4 = k_coloring(4).unwrap();
        let k3 = k_coloring(3).unwrap();
        assert!(matches!(
            find_homomorphism(&k4, &k3, 10),
            Err(Error::ResourceLimit { budget: 10 })
        ));
    }

    /// Oracle: for every map between small built-ins, compare against a
    /// direct tuple-by-tuple check.
    #[test]
    fn is_homomorphism_agrees_with_direct_check() {
        let structures = vec![
            k_coloring(1).unwrap(),
            k_coloring(2).unwrap(),
            k_coloring(3).unwrap(),
        ];
        for a in &structures {
            for b in &structures {
                let total = b.domain_size.pow(a.domain_size as u32);
                for code in 0..total {
                    let h = HomMap(crate::search::digits(b.domain_size, a.domain_size, code));
                    let direct = a.relations.iter().all(|ra| {
                        let rb = b.relation(&ra.symbol).unwrap();
                        ra.tuples.iter().all(|t| {
                            let image: Vec<usize> = t.iter().map(|&x| h.0[x]).collect();
                            rb.tuples.contains(&image)
                        })
                    });
                    assert_eq!(is_homomorphism(&h, a, b).unwrap(), direct);
                }
            }
        }
    }

    #[test]
    fn structure_text_roundtrip() {
        let k3 = k_coloring(3).unwrap();
        let text = k3.to_text();
        assert!(text.starts_with("structure K_3\ndomain 3\nrelation N 2\n0 1\n"));
        assert_eq!(RelationalStructure::parse(&text).unwrap(), k3);
    }

    #[test]
    fn structure_parse_errors_carry_positions() {
        let src = "structure S\ndomain 2\nrelation R 2\n0 1\n1 5\nend\n";
        match RelationalStructure::parse(src) {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (5, 3)),
            other => panic!("unexpected {other:?}"),
        }
        let src = "structure S\ndomain 2\nrelation R 2\n0 1 1\nend\n";
        assert!(matches!(
            RelationalStructure::parse(src),
            Err(Error::Syntax { line: 4, .. })
        ));
        assert!(RelationalStructure::parse("structure S\ndomain 2\n").is_err());
    }

    #[test]
    fn template_text_roundtrip() {
        let t = crate::builtin::one_in_three_vs_nae();
        let parsed = PcspTemplate::parse(&t.to_text()).unwrap();
        assert_eq!(parsed, t);
    }

    #[test]
    fn template_requires_homomorphism() {
        let k3 = k_coloring(3).unwrap();
        let k2 = k_coloring(2).unwrap();
        assert!(PcspTemplate::new(k3, k2).is_err());
    }
}
