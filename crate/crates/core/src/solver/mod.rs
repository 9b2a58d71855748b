//! Solvers: the brute-force oracle, 2SAT, linear equations modulo a prime,
//! and the rational-relaxation algorithm for `(1IN3, 3NAE_2)`.

pub mod brute;
pub mod linear;
pub mod modp;
pub mod onein3;
pub mod rational;
pub mod twosat;

pub use brute::{brute_force_decide, brute_force_pcsp, PcspVerdict};
pub use linear::{avoid_third, eliminate_rational, AffineForm, Elimination, ParametrizedSolution, RationalLinearSystem};
pub use modp::{lin_instance_to_system, solve_mod_p, ModPSystem};
pub use onein3::{build_1in3_system, solve_1in3_nae, NaeColoring};
pub use rational::Rational;
pub use twosat::solve_2sat;
