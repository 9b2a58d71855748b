//! `PCSP(1IN3, 3NAE_2)` through a rational relaxation.
//!
//! Every hyperedge `R(x,y,z)` becomes `x + y + z = 1` over the rationals.
//! A solution avoiding 1/3 everywhere rounds to a not-all-equal coloring:
//! three values summing to 1 cannot all exceed 1/3, and cannot all be
//! below it.

use serde::Serialize;

use super::linear::{avoid_third, eliminate_rational, Elimination, RationalLinearSystem};
use super::rational::Rational;
use crate::error::{Error, Result};
use crate::instance::PPInstance;

/// One row per conjunct, coefficient = multiplicity of the variable.
pub fn build_1in3_system(inst: &PPInstance) -> Result<RationalLinearSystem> {
    if !inst.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let n = inst.variables.len();
    let mut rows = Vec::with_capacity(inst.conjuncts.len());
    for c in &inst.conjuncts {
        if c.symbol != "R" {
            return Err(Error::SignatureMismatch(format!("`{}` is not the 1IN3 relation `R`", c.symbol)));
        }
        if c.args.len() != 3 {
            return Err(Error::ArityMismatch {
                symbol: c.symbol.clone(),
                expected: 3,
                found: c.args.len(),
            });
        }
        let mut row = vec![Rational::zero(); n];
        for &v in &c.args {
            row[v] = &row[v] + &Rational::one();
        }
        rows.push((row, Rational::one()));
    }
    RationalLinearSystem::new(n, rows)
}

/// Output of [`solve_1in3_nae`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NaeColoring {
    /// The rational solution that was rounded, one value per variable.
    pub rational: Vec<Rational>,
    /// 1 where the rational value exceeds 1/3, else 0.
    pub coloring: Vec<usize>,
}

/// A `3NAE_2` coloring of an instance promised to be true in `1IN3`.
///
/// Fails with a promise violation when some variable is forced to 1/3 or
/// when the rounded coloring does not check out. (The all-1/3 vector
/// solves every such system, so inconsistency cannot actually occur.)
/// Inputs outside the promise may still succeed.
pub fn solve_1in3_nae(inst: &PPInstance) -> Result<NaeColoring> {
    let (normal, map) = inst.normalize_with_map();
    let sys = build_1in3_system(&normal)?;
    let ps = match eliminate_rational(&sys) {
        Elimination::Solved(ps) => ps,
        Elimination::Inconsistent { constant } => {
            return Err(Error::PromiseViolation(format!(
                "the equations x + y + z = 1 are inconsistent (0 = {constant})"
            )))
        }
    };
    let point = avoid_third(&ps)
        .ok_or_else(|| Error::PromiseViolation("some variable is forced to equal 1/3".into()))?;
    let third = Rational::third();
    let coloring: Vec<usize> = point.values.iter().map(|v| usize::from(*v > third)).collect();
    for c in &normal.conjuncts {
        let colors: Vec<usize> = c.args.iter().map(|&v| coloring[v]).collect();
        if colors.iter().all(|&x| x == colors[0]) {
            return Err(Error::PromiseViolation("rounding produced a monochromatic hyperedge".into()));
        }
    }
    Ok(NaeColoring {
        rational: map.iter().map(|&m| point.values[m].clone()).collect(),
        coloring: map.iter().map(|&m| coloring[m]).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::three_nae;

    #[test]
    fn rows() {
        let sys = build_1in3_system(&PPInstance::parse("vars a b c\nR(a,b,c) ∧ R(a,a,b)").unwrap()).unwrap();
        let r = Rational::integer;
        assert_eq!(sys.rows[0], (vec![r(1), r(1), r(1)], r(1)));
        assert_eq!(sys.rows[1], (vec![r(2), r(1), r(0)], r(1)));
        assert!(build_1in3_system(&PPInstance::default()).unwrap().rows.is_empty());
    }

    #[test]
    fn single_hyperedge() {
        let inst = PPInstance::parse("vars x y z\nR(x,y,z)").unwrap();
        let out = solve_1in3_nae(&inst).unwrap();
        assert!(out.coloring.contains(&0) && out.coloring.contains(&1));
        assert!(inst.is_satisfied_by(&out.coloring, &three_nae(2).unwrap()));
    }

    #[test]
    fn constant_hyperedge_breaks_the_promise() {
        let inst = PPInstance::parse("vars x\nR(x,x,x)").unwrap();
        assert!(matches!(solve_1in3_nae(&inst), Err(Error::PromiseViolation(_))));
    }

    #[test]
    fn forced_thirds_break_the_promise() {
        // 3y = 1, then 2x + y = 1 and x + y + z = 1 pin x and z to 1/3 too.
        let inst = PPInstance::parse("vars x y z\nR(x,y,z) ∧ R(x,x,y) ∧ R(x,x,z) ∧ R(y,y,y)").unwrap();
        assert!(matches!(solve_1in3_nae(&inst), Err(Error::PromiseViolation(_))));
    }

    #[test]
    fn equalities() {
        let inst = PPInstance::parse("vars a b c d\nR(a,b,c) ∧ R(d,b,c)\neq a d").unwrap();
        let out = solve_1in3_nae(&inst).unwrap();
        assert_eq!(out.coloring[0], out.coloring[3]);
        assert!(inst.is_satisfied_by(&out.coloring, &three_nae(2).unwrap()));
    }
}
