//! Built-in templates: SAT, graph and hypergraph coloring, one-in-three,
//! linear equations mod p, and the promise pairs built from them.

use crate::error::{Error, Result};
use crate::search::digits;
use crate::structure::{HomMap, PcspTemplate, Relation, RelationalStructure};

/// Either a single structure or a promise template.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Builtin {
    Structure(RelationalStructure),
    Template(PcspTemplate),
}

impl Builtin {
    /// Views a plain structure `S` as the template `(S, S)`.
    pub fn into_template(self) -> PcspTemplate {
        match self {
            Builtin::Structure(s) => PcspTemplate::csp(s),
            Builtin::Template(t) => t,
        }
    }

    pub fn into_structure(self) -> Result<RelationalStructure> {
        match self {
            Builtin::Structure(s) => Ok(s),
            Builtin::Template(t) => Err(Error::InvalidParameter(format!(
                "expected a structure, got the template ({}, {})",
                t.yes.name, t.no.name
            ))),
        }
    }
}

/// Names accepted by [`builtin`], with their parameter shapes.
pub const BUILTIN_NAMES: &[&str] = &[
    "k-coloring:k",
    "nae:k",
    "onein3",
    "2sat",
    "3sat",
    "lin:p",
    "onein3-vs-nae",
    "coloring-pair:k,l",
    "nae-pair:k,l",
];

/// Looks up a built-in by name.
pub fn builtin(name: &str, params: &[usize]) -> Result<Builtin> {
    let want = |n: usize| -> Result<()> {
        if params.len() == n {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "`{name}` takes {n} parameter(s), got {}",
                params.len()
            )))
        }
    };
    Ok(match name {
        "k-coloring" => {
            want(1)?;
            Builtin::Structure(k_coloring(params[0])?)
        }
        "nae" => {
            want(1)?;
            Builtin::Structure(three_nae(params[0])?)
        }
        "onein3" => {
            want(0)?;
            Builtin::Structure(one_in_three())
        }
        "2sat" => {
            want(0)?;
            Builtin::Structure(two_sat())
        }
        "3sat" => {
            want(0)?;
            Builtin::Structure(three_sat())
        }
        "lin" => {
            want(1)?;
            Builtin::Structure(lin(params[0])?)
        }
        "onein3-vs-nae" => {
            want(0)?;
            Builtin::Template(one_in_three_vs_nae())
        }
        "coloring-pair" => {
            want(2)?;
            Builtin::Template(PcspTemplate::new(k_coloring(params[0])?, k_coloring(params[1])?)?)
        }
        "nae-pair" => {
            want(2)?;
            Builtin::Template(PcspTemplate::new(three_nae(params[0])?, three_nae(params[1])?)?)
        }
        _ => return Err(Error::UnknownTemplate(name.to_string())),
    })
}

/// Parses `name` or `name:p1,p2,...` and looks it up.
pub fn builtin_from_spec(spec: &str) -> Result<Builtin> {
    let (name, params) = match spec.split_once(':') {
        Some((n, p)) => {
            let params = p
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::InvalidParameter(format!("bad parameter `{x}` in `{spec}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            (n, params)
        }
        None => (spec, Vec::new()),
    };
    builtin(name, &params)
}

fn all_tuples(domain: usize, arity: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..domain.pow(arity as u32)).map(move |i| digits(domain, arity, i))
}

fn positive(k: usize, what: &str) -> Result<()> {
    if k == 0 {
        Err(Error::InvalidParameter(format!("{what} needs k >= 1")))
    } else {
        Ok(())
    }
}

/// `K_k`: the inequality relation `N` on `0..k`.
pub fn k_coloring(k: usize) -> Result<RelationalStructure> {
    positive(k, "k-coloring")?;
    let n = Relation::new("N", 2, all_tuples(k, 2).filter(|t| t[0] != t[1]));
    RelationalStructure::new(format!("K_{k}"), k, vec![n])
}

/// `3NAE_k`: ternary not-all-equal on `0..k`, symbol `R`.
pub fn three_nae(k: usize) -> Result<RelationalStructure> {
    positive(k, "nae")?;
    let r = Relation::new("R", 3, all_tuples(k, 3).filter(|t| !(t[0] == t[1] && t[1] == t[2])));
    RelationalStructure::new(format!("3NAE_{k}"), k, vec![r])
}

/// `1IN3`: exactly one coordinate is 1, symbol `R`.
///
/// Tuples are listed with the 1 moving left to right, the order the
/// reductions use when naming the arguments of conjunct symbols.
pub fn one_in_three() -> RelationalStructure {
    let r = Relation::new("R", 3, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
    RelationalStructure::new("1IN3", 2, vec![r]).expect("valid by construction")
}

/// `2SAT`: relations `R_ab` = all pairs except `(a, b)`.
pub fn two_sat() -> RelationalStructure {
    let relations = all_tuples(2, 2)
        .map(|forbidden| {
            let symbol = format!("R_{}{}", forbidden[0], forbidden[1]);
            Relation::new(symbol, 2, all_tuples(2, 2).filter(|t| *t != forbidden))
        })
        .collect();
    RelationalStructure::new("2SAT", 2, relations).expect("valid by construction")
}

/// `3SAT`: relations `R_abc` = all triples except `(a, b, c)`.
pub fn three_sat() -> RelationalStructure {
    let relations = all_tuples(2, 3)
        .map(|forbidden| {
            let symbol = format!("R_{}{}{}", forbidden[0], forbidden[1], forbidden[2]);
            Relation::new(symbol, 3, all_tuples(2, 3).filter(|t| *t != forbidden))
        })
        .collect();
    RelationalStructure::new("3SAT", 2, relations).expect("valid by construction")
}

pub(crate) fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Name of the relation `{(x,y,z) : ax + by + cz = d (mod p)}`.
///
/// Coefficients are concatenated (`L_1234`) when every one is a single
/// digit, and separated by underscores (`L_1_12_3_4`) otherwise.
pub fn lin_symbol(p: usize, coeffs: [usize; 4]) -> String {
    if p <= 10 {
        format!("L_{}{}{}{}", coeffs[0], coeffs[1], coeffs[2], coeffs[3])
    } else {
        format!("L_{}_{}_{}_{}", coeffs[0], coeffs[1], coeffs[2], coeffs[3])
    }
}

/// Inverse of [`lin_symbol`].
pub fn parse_lin_symbol(p: usize, symbol: &str) -> Option<[usize; 4]> {
    let rest = symbol.strip_prefix("L_")?;
    let parts: Vec<usize> = if p <= 10 {
        if rest.len() != 4 {
            return None;
        }
        rest.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect::<Option<_>>()?
    } else {
        rest.split('_').map(|x| x.parse().ok()).collect::<Option<_>>()?
    };
    let coeffs: [usize; 4] = parts.try_into().ok()?;
    coeffs.iter().all(|&c| c < p).then_some(coeffs)
}

/// `3LIN_p`: all `p^4` relations `L_abcd`, including the degenerate
/// `a = b = c = 0` ones (full when `d = 0`, empty otherwise).
pub fn lin(p: usize) -> Result<RelationalStructure> {
    if !is_prime(p) {
        return Err(Error::InvalidParameter(format!("lin needs a prime modulus, got {p}")));
    }
    let points: Vec<Vec<usize>> = all_tuples(p, 3).collect();
    let relations = all_tuples(p, 4)
        .map(|c| {
            let coeffs = [c[0], c[1], c[2], c[3]];
            let tuples = points
                .iter()
                .filter(|t| (coeffs[0] * t[0] + coeffs[1] * t[1] + coeffs[2] * t[2]) % p == coeffs[3])
                .cloned();
            Relation::new(lin_symbol(p, coeffs), 3, tuples)
        })
        .collect();
    RelationalStructure::new(format!("3LIN_{p}"), p, relations)
}

/// `(1IN3, 3NAE_2)` with the identity as homomorphism.
pub fn one_in_three_vs_nae() -> PcspTemplate {
    PcspTemplate::with_witness(one_in_three(), three_nae(2).expect("k = 2"), HomMap::identity(2))
        .expect("identity maps 1IN3 into 3NAE_2")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::find_homomorphism;

    #[test]
    fn k3_has_six_edges() {
        let Builtin::Structure(k3) = builtin("k-coloring", &[3]).unwrap() else {
            panic!()
        };
        assert_eq!(k3.domain_size, 3);
        assert_eq!(k3.relations.len(), 1);
        assert_eq!(k3.relations[0].len(), 6);
    }

    #[test]
    fn onein3_tuples() {
        let s = one_in_three();
        assert_eq!(s.domain_size, 2);
        assert_eq!(
            s.relations[0].tuples,
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]
        );
    }

    /// Each non-degenerate equation over `E_5^3` has 25 solutions; counted by brute force.
    #[test]
    fn lin5_relation_sizes() {
        let s = lin(5).unwrap();
        assert_eq!(s.relations.len(), 625);
        for rel in &s.relations {
            let c = parse_lin_symbol(5, &rel.symbol).unwrap();
            let mut count = 0;
            for x in 0..5 {
                for y in 0..5 {
                    for z in 0..5 {
                        if (c[0] * x + c[1] * y + c[2] * z) % 5 == c[3] {
                            count += 1;
                        }
                    }
                }
            }
            assert_eq!(rel.len(), count);
            if c[..3] != [0, 0, 0] {
                assert_eq!(rel.len(), 25, "{}", rel.symbol);
            } else {
                assert_eq!(rel.len(), if c[3] == 0 { 125 } else { 0 });
            }
        }
    }

    #[test]
    fn lin_symbols_roundtrip() {
        assert_eq!(lin_symbol(5, [1, 2, 3, 4]), "L_1234");
        assert_eq!(parse_lin_symbol(5, "L_1234"), Some([1, 2, 3, 4]));
        assert_eq!(parse_lin_symbol(5, "L_1294"), None);
        assert_eq!(lin_symbol(11, [1, 10, 3, 4]), "L_1_10_3_4");
        assert_eq!(parse_lin_symbol(11, "L_1_10_3_4"), Some([1, 10, 3, 4]));
    }

    #[test]
    fn bad_parameters() {
        assert!(matches!(builtin("lin", &[4]), Err(Error::InvalidParameter(_))));
        assert!(matches!(builtin("k-coloring", &[0]), Err(Error::InvalidParameter(_))));
        assert!(matches!(builtin("nosuch", &[]), Err(Error::UnknownTemplate(_))));
        assert!(matches!(builtin("onein3", &[1]), Err(Error::InvalidParameter(_))));
        assert!(builtin("coloring-pair", &[4, 3]).is_err());
    }

    #[test]
    fn spec_strings() {
        assert!(matches!(builtin_from_spec("lin:3").unwrap(), Builtin::Structure(s) if s.domain_size == 3));
        assert!(matches!(builtin_from_spec("coloring-pair:2,3").unwrap(), Builtin::Template(_)));
        assert!(builtin_from_spec("lin:x").is_err());
    }

    #[test]
    fn every_builtin_validates_and_templates_have_homomorphisms() {
        let structures = vec![
            k_coloring(1).unwrap(),
            k_coloring(4).unwrap(),
            three_nae(3).unwrap(),
            one_in_three(),
            two_sat(),
            three_sat(),
            lin(2).unwrap(),
            lin(3).unwrap(),
        ];
        for s in &structures {
            assert!(s.validate().is_empty(), "{}", s.name);
        }
        let templates = vec![
            one_in_three_vs_nae(),
            builtin("coloring-pair", &[2, 3]).unwrap().into_template(),
            builtin("nae-pair", &[2, 3]).unwrap().into_template(),
        ];
        for t in &templates {
            assert!(t.yes.validate().is_empty() && t.no.validate().is_empty());
            assert!(find_homomorphism(&t.yes, &t.no, 10_000).unwrap().is_some());
        }
    }
}
