//! Incremental decision and optimization engine over clauses and linear
//! pseudo-Boolean constraints.
//!
//! The engine is a conflict-driven clause-learning solver extended with a
//! counting propagator for weighted linear constraints. Constraints may be
//! added between `solve` calls and learned state persists across calls.
//! There is no removal API: callers emulate removal with activation
//! variables passed as assumptions.

mod heap;
mod solver;

pub use solver::{Solver, SolverStats};

use std::fmt;
use thiserror::Error;

/// A Boolean variable, identified by a positive integer id.
///
/// Ids are issued densely from 1 by [`Solver::new_var`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Var(u32);

impl Var {
    /// Wraps an externally known id. Panics if `id` is zero.
    pub fn from_id(id: u32) -> Var {
        assert!(id > 0, "variable ids start at 1");
        Var(id)
    }

    pub fn id(self) -> u32 {
        self.0
    }

    /// Positive literal over this variable.
    pub fn pos(self) -> Lit {
        Lit::positive(self)
    }

    /// Negated literal over this variable.
    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Lit {
        Lit::negative(self)
    }

    pub(crate) fn index(self) -> usize {
        (self.0 - 1) as usize
    }

    pub(crate) fn from_index(index: usize) -> Var {
        Var(index as u32 + 1)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A literal: a variable together with a sign.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Lit(u32);

impl Lit {
    pub fn positive(var: Var) -> Lit {
        Lit((var.index() as u32) << 1)
    }

    pub fn negative(var: Var) -> Lit {
        Lit(((var.index() as u32) << 1) | 1)
    }

    pub fn var(self) -> Var {
        Var::from_index((self.0 >> 1) as usize)
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    /// Dense code usable as an index; positive and negated literals of the
    /// same variable get adjacent codes.
    pub(crate) fn code(self) -> usize {
        self.0 as usize
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_negated() {
            write!(f, "-x{}", self.var().id())
        } else {
            write!(f, "x{}", self.var().id())
        }
    }
}

/// A disjunction of literals.
///
/// Construction normalizes the literal list: literals are sorted by variable
/// id and duplicates are dropped. A clause containing both polarities of a
/// variable is a tautology; [`Solver::add_clause`] discards those.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    /// Builds a normalized clause. Panics on an empty literal list.
    pub fn new(mut lits: Vec<Lit>) -> Clause {
        assert!(!lits.is_empty(), "clauses must be non-empty");
        lits.sort_unstable();
        lits.dedup();
        Clause { lits }
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    /// True when the clause contains a variable in both polarities.
    pub fn is_tautology(&self) -> bool {
        self.lits
            .windows(2)
            .any(|w| w[0].var() == w[1].var() && w[0] != w[1])
    }

    /// Evaluates the clause under a total assignment.
    pub fn eval(&self, model: &Model) -> bool {
        self.lits.iter().any(|&l| model.lit(l))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, l) in self.lits.iter().enumerate() {
            if k > 0 {
                write!(f, " | ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

/// Comparison relation of a [`LinearConstraint`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Relation {
    GreaterEq,
    Equal,
}

/// A weighted sum of literals compared against an integer bound.
///
/// The surface form accepts arbitrary signed weights so callers can state
/// constraints the way their derivation produces them (negative weights show
/// up when negated literals are rewritten away). The solver normalizes to
/// positive weights with at most one term per variable before storing.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LinearConstraint {
    terms: Vec<(i64, Lit)>,
    relation: Relation,
    bound: i64,
}

impl LinearConstraint {
    pub fn greater_eq(terms: Vec<(i64, Lit)>, bound: i64) -> LinearConstraint {
        LinearConstraint {
            terms,
            relation: Relation::GreaterEq,
            bound,
        }
    }

    pub fn equal(terms: Vec<(i64, Lit)>, bound: i64) -> LinearConstraint {
        LinearConstraint {
            terms,
            relation: Relation::Equal,
            bound,
        }
    }

    pub fn terms(&self) -> &[(i64, Lit)] {
        &self.terms
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    /// Evaluates the constraint under a total assignment.
    pub fn eval(&self, model: &Model) -> bool {
        let sum: i64 = self
            .terms
            .iter()
            .filter(|&&(_, l)| model.lit(l))
            .map(|&(w, _)| w)
            .sum();
        match self.relation {
            Relation::GreaterEq => sum >= self.bound,
            Relation::Equal => sum == self.bound,
        }
    }

    /// Rewrites the constraint into one or two `>=` forms with positive
    /// weights and each variable appearing at most once.
    pub(crate) fn normalized(&self) -> Vec<NormLinear> {
        match self.relation {
            Relation::GreaterEq => vec![normalize_ge(&self.terms, self.bound)],
            Relation::Equal => {
                // a = b  <=>  a >= b  and  -a >= -b
                let flipped: Vec<(i64, Lit)> =
                    self.terms.iter().map(|&(w, l)| (-w, l)).collect();
                vec![
                    normalize_ge(&self.terms, self.bound),
                    normalize_ge(&flipped, -self.bound),
                ]
            }
        }
    }
}

impl fmt::Display for LinearConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (w, l)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{w:+}·{l}")?;
        }
        let rel = match self.relation {
            Relation::GreaterEq => ">=",
            Relation::Equal => "=",
        };
        write!(f, " {rel} {}", self.bound)
    }
}

/// Internal `>=` form: positive weights, one term per variable.
#[derive(Clone, Debug)]
pub(crate) struct NormLinear {
    pub terms: Vec<(u64, Lit)>,
    pub bound: i64,
}

fn normalize_ge(terms: &[(i64, Lit)], bound: i64) -> NormLinear {
    use std::collections::BTreeMap;

    // Fold everything onto positive literals first: w·(~x) = w - w·x.
    let mut coeff: BTreeMap<Var, i128> = BTreeMap::new();
    let mut b = bound as i128;
    for &(w, l) in terms {
        let w = w as i128;
        if l.is_negated() {
            b -= w;
            *coeff.entry(l.var()).or_insert(0) -= w;
        } else {
            *coeff.entry(l.var()).or_insert(0) += w;
        }
    }
    // Then flip negative coefficients back onto negated literals.
    let mut out = Vec::with_capacity(coeff.len());
    for (v, s) in coeff {
        match s.cmp(&0) {
            std::cmp::Ordering::Greater => out.push((s as u64, v.pos())),
            std::cmp::Ordering::Less => {
                out.push(((-s) as u64, v.neg()));
                b += -s;
            }
            std::cmp::Ordering::Equal => {}
        }
    }
    NormLinear {
        terms: out,
        bound: i64::try_from(b).expect("constraint bound overflow"),
    }
}

/// A total assignment over the issued variables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Model {
    values: Vec<bool>,
}

impl Model {
    /// Assignment from a value vector; index k holds the value of the
    /// variable with id k+1.
    pub fn new(values: Vec<bool>) -> Model {
        Model { values }
    }

    pub fn num_vars(&self) -> usize {
        self.values.len()
    }

    /// Value of a variable. Panics if the variable is outside the model.
    pub fn value(&self, var: Var) -> bool {
        self.values[var.index()]
    }

    /// Value of a literal under the assignment.
    pub fn lit(&self, lit: Lit) -> bool {
        self.value(lit.var()) != lit.is_negated()
    }
}

/// Outcome of a decision query.
#[derive(Clone, Debug)]
pub enum SolveResult {
    Sat(Model),
    Unsat,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }

    pub fn model(&self) -> Option<&Model> {
        match self {
            SolveResult::Sat(m) => Some(m),
            SolveResult::Unsat => None,
        }
    }
}

/// Outcome of an optimization query.
#[derive(Clone, Debug)]
pub enum MaxResult {
    /// A model maximizing the number of satisfied objective literals,
    /// together with that optimum.
    Optimal { model: Model, value: usize },
    Unsat,
}

impl MaxResult {
    pub fn value(&self) -> Option<usize> {
        match self {
            MaxResult::Optimal { value, .. } => Some(*value),
            MaxResult::Unsat => None,
        }
    }
}

/// Solver behaviour knobs.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Phase assigned to fresh variables; used by decisions until
    /// overridden per variable with [`Solver::set_polarity`].
    pub default_phase: bool,
    /// Multiplicative decay of variable activities per conflict.
    pub var_decay: f64,
    /// Multiplicative decay of learnt-clause activities per conflict.
    pub clause_decay: f64,
    /// Base unit (in conflicts) of the Luby restart sequence.
    pub restart_base: u32,
    /// Probability of picking a random decision variable.
    pub random_decision_freq: f64,
    /// Seed for the solver-internal RNG.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            default_phase: false,
            var_decay: 0.95,
            clause_decay: 0.999,
            restart_base: 100,
            random_decision_freq: 0.0,
            seed: 0,
        }
    }
}

/// Errors reported by constraint insertion.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PbError {
    #[error("literal references variable x{0}, which was never issued")]
    UnknownVariable(u32),
}
