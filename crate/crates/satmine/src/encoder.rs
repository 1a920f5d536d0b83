//! Translation of (database, θ, options) into solver constraints.
//!
//! The canonical variable layout allocates one variable `I_i` per item and
//! one variable `T_t` per transaction; models then correspond to (itemset,
//! coverage) pairs. Coverage is clausal: for every zero cell `D[t][i] = 0`
//! the binary clause `(~T_t | ~I_i)` forbids covering a transaction that
//! misses a chosen item, and one long clause per transaction forces `T_t`
//! back on when no missing item is chosen. Frequency is one weighted
//! constraint per item: `θ·~I_i + Σ_{t: D[t][i]=1} T_t >= θ`.
//!
//! Options rewrite this baseline: `reduced` collapses each row's binary
//! clauses into a single weighted constraint, `positive_only` eliminates
//! negated literals by folding `~x = 1 - x` into the bounds, the removal
//! modes add the selector variables `N_i` (and control variable `y`) used to
//! emulate clause removal through assumptions, and `dual` flips the
//! frequency side so models decode to infrequent itemsets.

use thiserror::Error;

use crate::dataset::{Itemset, ItemsetDatabase, TransactionSet};
use crate::pbsat::{Clause, LinearConstraint, Lit, Model, PbError, Solver, Var};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EncodeError {
    #[error("support threshold must lie in 1..={max}, got {theta}")]
    ThetaOutOfRange { theta: usize, max: usize },
    #[error("frequency threshold must lie in (0, 1], got {0}")]
    BadFrequency(f64),
    #[error("the dual encoding cannot be combined with the fixed removal mode")]
    DualWithFixed,
    #[error("CNF export requires a pure-clausal instance; `{0}` is not a clause")]
    NotClausal(String),
}

/// Support threshold as given on the surface: an absolute count or a
/// frequency in (0, 1] that is resolved against the transaction count.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum Threshold {
    Count(usize),
    Frequency(f64),
}

impl Threshold {
    /// Absolute support threshold; frequencies convert via ⌈freq·m⌉.
    pub fn resolve(self, num_transactions: usize) -> Result<usize, EncodeError> {
        match self {
            Threshold::Count(theta) => {
                if theta == 0 || theta > num_transactions {
                    Err(EncodeError::ThetaOutOfRange {
                        theta,
                        max: num_transactions,
                    })
                } else {
                    Ok(theta)
                }
            }
            Threshold::Frequency(f) => {
                if !(f > 0.0 && f <= 1.0) {
                    Err(EncodeError::BadFrequency(f))
                } else {
                    Ok((f * num_transactions as f64).ceil() as usize)
                }
            }
        }
    }
}

/// How clause removal is emulated (selector variables per item).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum RemovalMode {
    #[default]
    None,
    /// `N_i` selectors and the clauses `(I_i | N_i)`; growth searches assume
    /// selectors false to pin items.
    Incremental,
    /// Same selectors plus control variable `y` and the constraint
    /// `y + ΣI_i + ΣN_i >= n+1`, so growth is forced without new clauses.
    Fixed,
}

/// Encoding options.
#[derive(Clone, Copy, PartialEq, Debug, Default)]
pub struct EncodeOptions {
    /// Replace each row's binary-clause block with one weighted constraint.
    pub reduced: bool,
    /// Rewrite all negated literals away (`~x = 1 - x`), leaving only
    /// weighted constraints over positive literals.
    pub positive_only: bool,
    pub removal_mode: RemovalMode,
    /// Assert `sup < θ` instead of `sup >= θ`; models decode to infrequent
    /// itemsets.
    pub dual: bool,
    /// Add per-item length selectors `A_i` and the equality
    /// `ΣI_i + ΣA_i = n` used by length-directed search.
    pub length_aux: bool,
}

/// Solver variables of an encoded instance, tied to mining semantics.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VarMap {
    item_vars: Vec<Var>,
    trans_vars: Vec<Var>,
    aux_n: Option<Vec<Var>>,
    aux_a: Option<Vec<Var>>,
    control_y: Option<Var>,
    num_vars: usize,
}

impl VarMap {
    fn for_database(db: &ItemsetDatabase, options: &EncodeOptions) -> VarMap {
        let n = db.num_items();
        let m = db.num_transactions();
        let mut next = 1u32;
        let mut take = |count: usize| -> Vec<Var> {
            let vars: Vec<Var> = (0..count).map(|k| Var::from_id(next + k as u32)).collect();
            next += count as u32;
            vars
        };
        let item_vars = take(n);
        let trans_vars = take(m);
        let aux_n = match options.removal_mode {
            RemovalMode::None => None,
            _ => Some(take(n)),
        };
        let aux_a = options.length_aux.then(|| take(n));
        let control_y = matches!(options.removal_mode, RemovalMode::Fixed)
            .then(|| take(1)[0]);
        VarMap {
            item_vars,
            trans_vars,
            aux_n,
            aux_a,
            control_y,
            num_vars: (next - 1) as usize,
        }
    }

    /// A map with no variables; useful for exporting bare formulas.
    pub fn empty() -> VarMap {
        VarMap {
            item_vars: Vec::new(),
            trans_vars: Vec::new(),
            aux_n: None,
            aux_a: None,
            control_y: None,
            num_vars: 0,
        }
    }

    pub fn num_items(&self) -> usize {
        self.item_vars.len()
    }

    pub fn num_transactions(&self) -> usize {
        self.trans_vars.len()
    }

    /// Total variable count including auxiliaries.
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn item(&self, i: usize) -> Var {
        self.item_vars[i]
    }

    pub fn trans(&self, t: usize) -> Var {
        self.trans_vars[t]
    }

    pub fn item_vars(&self) -> &[Var] {
        &self.item_vars
    }

    pub fn trans_vars(&self) -> &[Var] {
        &self.trans_vars
    }

    pub fn aux_n(&self) -> Option<&[Var]> {
        self.aux_n.as_deref()
    }

    pub fn aux_a(&self) -> Option<&[Var]> {
        self.aux_a.as_deref()
    }

    pub fn control_y(&self) -> Option<Var> {
        self.control_y
    }
}

/// Formula plus variable map and the absolute support threshold.
#[derive(Clone, Debug)]
pub struct EncodedInstance {
    pub varmap: VarMap,
    pub clauses: Vec<Clause>,
    pub linears: Vec<LinearConstraint>,
    pub theta: usize,
}

impl EncodedInstance {
    /// Allocates this instance's variables in a fresh solver and adds every
    /// constraint. The solver must not have issued variables yet.
    pub fn load_into(&self, solver: &mut Solver) -> Result<(), PbError> {
        assert_eq!(
            solver.num_vars(),
            0,
            "instances must be loaded into a fresh solver"
        );
        for _ in 0..self.varmap.num_vars() {
            solver.new_var();
        }
        for clause in &self.clauses {
            solver.add_clause(clause.lits())?;
        }
        for linear in &self.linears {
            solver.add_linear(linear)?;
        }
        Ok(())
    }
}

/// Clausal coverage encoding: per transaction, one binary clause per absent
/// item plus one pull-back clause. A transaction containing every item
/// yields the unit clause `(T_t)`.
pub fn encode_coverage(db: &ItemsetDatabase, varmap: &VarMap) -> Vec<Clause> {
    let mut clauses = Vec::new();
    for t in 0..db.num_transactions() {
        let t_var = varmap.trans(t);
        let absent: Vec<usize> = (0..db.num_items())
            .filter(|&i| !db.row(t).contains(i))
            .collect();
        for &i in &absent {
            clauses.push(Clause::new(vec![t_var.neg(), varmap.item(i).neg()]));
        }
        let mut long = vec![t_var.pos()];
        long.extend(absent.iter().map(|&i| varmap.item(i).pos()));
        clauses.push(Clause::new(long));
    }
    clauses
}

/// Weighted frequency encoding: per item `i`,
/// `θ·~I_i + Σ_{t: D[t][i]=1} T_t >= θ`.
pub fn encode_frequency(
    db: &ItemsetDatabase,
    theta: usize,
    varmap: &VarMap,
) -> Result<Vec<LinearConstraint>, EncodeError> {
    if theta == 0 || theta > db.num_transactions() {
        return Err(EncodeError::ThetaOutOfRange {
            theta,
            max: db.num_transactions(),
        });
    }
    let mut constraints = Vec::with_capacity(db.num_items());
    for i in 0..db.num_items() {
        let mut terms: Vec<(i64, Lit)> = vec![(theta as i64, varmap.item(i).neg())];
        for t in 0..db.num_transactions() {
            if db.row(t).contains(i) {
                terms.push((1, varmap.trans(t).pos()));
            }
        }
        constraints.push(LinearConstraint::greater_eq(terms, theta as i64));
    }
    Ok(constraints)
}

/// Builds the full instance for the given options.
pub fn encode(
    db: &ItemsetDatabase,
    theta: usize,
    options: &EncodeOptions,
) -> Result<EncodedInstance, EncodeError> {
    if theta == 0 || theta > db.num_transactions() {
        return Err(EncodeError::ThetaOutOfRange {
            theta,
            max: db.num_transactions(),
        });
    }
    if options.dual && options.removal_mode == RemovalMode::Fixed {
        return Err(EncodeError::DualWithFixed);
    }
    let varmap = VarMap::for_database(db, options);
    let n = db.num_items();
    let m = db.num_transactions();
    let mut clauses = Vec::new();
    let mut linears = Vec::new();

    if options.reduced {
        // One weighted constraint per row: z_t·~T_t - Σ_{absent i} I_i >= 0,
        // with the pull-back clauses kept.
        for t in 0..m {
            let absent: Vec<usize> =
                (0..n).filter(|&i| !db.row(t).contains(i)).collect();
            if !absent.is_empty() {
                let mut terms: Vec<(i64, Lit)> =
                    vec![(absent.len() as i64, varmap.trans(t).neg())];
                terms.extend(absent.iter().map(|&i| (-1, varmap.item(i).pos())));
                linears.push(LinearConstraint::greater_eq(terms, 0));
            }
            let mut long = vec![varmap.trans(t).pos()];
            long.extend(absent.iter().map(|&i| varmap.item(i).pos()));
            clauses.push(Clause::new(long));
        }
    } else {
        clauses.extend(encode_coverage(db, &varmap));
    }

    if options.dual {
        // sup < θ as one constraint: Σ T_t <= θ-1, i.e. Σ ~T_t >= m-θ+1.
        let terms: Vec<(i64, Lit)> =
            (0..m).map(|t| (1, varmap.trans(t).neg())).collect();
        linears.push(LinearConstraint::greater_eq(
            terms,
            (m - theta + 1) as i64,
        ));
    } else {
        linears.extend(encode_frequency(db, theta, &varmap)?);
    }

    if let Some(selectors) = varmap.aux_n() {
        for (&item, &selector) in varmap.item_vars().iter().zip(selectors) {
            clauses.push(Clause::new(vec![item.pos(), selector.pos()]));
        }
    }
    if let Some(y) = varmap.control_y() {
        let mut terms: Vec<(i64, Lit)> = vec![(1, y.pos())];
        terms.extend(varmap.item_vars().iter().map(|v| (1i64, v.pos())));
        terms.extend(varmap.aux_n().unwrap().iter().map(|v| (1i64, v.pos())));
        linears.push(LinearConstraint::greater_eq(terms, n as i64 + 1));
    }
    if let Some(lengths) = varmap.aux_a() {
        let mut terms: Vec<(i64, Lit)> =
            varmap.item_vars().iter().map(|v| (1i64, v.pos())).collect();
        terms.extend(lengths.iter().map(|v| (1i64, v.pos())));
        linears.push(LinearConstraint::equal(terms, n as i64));
    }

    if options.positive_only {
        let mut rewritten: Vec<LinearConstraint> = Vec::new();
        for clause in &clauses {
            rewritten.push(positivize_clause(clause));
        }
        for linear in &linears {
            rewritten.push(positivize_linear(linear));
        }
        clauses.clear();
        linears = rewritten;
    }

    Ok(EncodedInstance {
        varmap,
        clauses,
        linears,
        theta,
    })
}

/// A clause as a sum over positive literals: each `~x` becomes `1 - x`, with
/// the constants folded into the bound.
fn positivize_clause(clause: &Clause) -> LinearConstraint {
    let mut terms = Vec::with_capacity(clause.len());
    let mut bound = 1i64;
    for &l in clause.lits() {
        if l.is_negated() {
            terms.push((-1, l.var().pos()));
            bound -= 1;
        } else {
            terms.push((1, l));
        }
    }
    LinearConstraint::greater_eq(terms, bound)
}

fn positivize_linear(linear: &LinearConstraint) -> LinearConstraint {
    let mut terms = Vec::with_capacity(linear.terms().len());
    let mut bound = linear.bound();
    for &(w, l) in linear.terms() {
        if l.is_negated() {
            terms.push((-w, l.var().pos()));
            bound -= w;
        } else {
            terms.push((w, l));
        }
    }
    match linear.relation() {
        crate::pbsat::Relation::GreaterEq => LinearConstraint::greater_eq(terms, bound),
        crate::pbsat::Relation::Equal => LinearConstraint::equal(terms, bound),
    }
}

/// Reads the (itemset, transaction set) pair off a model.
pub fn decode(model: &Model, varmap: &VarMap) -> (Itemset, TransactionSet) {
    let itemset = Itemset::from_indices(
        varmap.num_items(),
        (0..varmap.num_items()).filter(|&i| model.value(varmap.item(i))),
    );
    let transactions = TransactionSet::from_indices(
        varmap.num_transactions(),
        (0..varmap.num_transactions()).filter(|&t| model.value(varmap.trans(t))),
    );
    (itemset, transactions)
}

/// Instance file formats.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ExportFormat {
    Cnf,
    Opb,
}

/// Serializes the instance.
///
/// CNF requires a clausal instance: weighted constraints that are clauses in
/// disguise (any single satisfied literal meets the bound) are clausified,
/// anything else is an error naming the offending constraint.
pub fn export(
    instance: &EncodedInstance,
    format: ExportFormat,
) -> Result<String, EncodeError> {
    match format {
        ExportFormat::Cnf => {
            let mut clauses = instance.clauses.clone();
            for linear in &instance.linears {
                match linear_as_clause(linear) {
                    ClauseForm::Trivial => {}
                    ClauseForm::Clause(clause) => clauses.push(clause),
                    ClauseForm::NotClausal => {
                        return Err(EncodeError::NotClausal(linear.to_string()))
                    }
                }
            }
            Ok(write_cnf(instance.varmap.num_vars(), &clauses))
        }
        ExportFormat::Opb => Ok(write_opb(
            instance.varmap.num_vars(),
            &instance.clauses,
            &instance.linears,
        )),
    }
}

enum ClauseForm {
    Trivial,
    Clause(Clause),
    NotClausal,
}

/// A `>=` constraint is a clause exactly when every literal alone reaches
/// the bound (after normalization to positive weights).
fn linear_as_clause(linear: &LinearConstraint) -> ClauseForm {
    if linear.relation() != crate::pbsat::Relation::GreaterEq {
        return ClauseForm::NotClausal;
    }
    let norm = &linear.normalized()[0];
    if norm.bound <= 0 {
        return ClauseForm::Trivial;
    }
    let bound = norm.bound as u64;
    if norm.terms.is_empty() || norm.terms.iter().any(|&(w, _)| w < bound) {
        return ClauseForm::NotClausal;
    }
    ClauseForm::Clause(Clause::new(norm.terms.iter().map(|&(_, l)| l).collect()))
}

fn write_cnf(num_vars: usize, clauses: &[Clause]) -> String {
    use std::fmt::Write;
    let mut out = format!("p cnf {} {}\n", num_vars, clauses.len());
    for clause in clauses {
        for &l in clause.lits() {
            let id = l.var().id() as i64;
            let _ = write!(out, "{} ", if l.is_negated() { -id } else { id });
        }
        out.push_str("0\n");
    }
    out
}

fn opb_lit(l: Lit) -> String {
    if l.is_negated() {
        format!("~x{}", l.var().id())
    } else {
        format!("x{}", l.var().id())
    }
}

fn write_opb(num_vars: usize, clauses: &[Clause], linears: &[LinearConstraint]) -> String {
    use std::fmt::Write;
    let mut out = format!(
        "* #variable= {} #constraint= {}\n",
        num_vars,
        clauses.len() + linears.len()
    );
    for clause in clauses {
        for &l in clause.lits() {
            let _ = write!(out, "+1 {} ", opb_lit(l));
        }
        out.push_str(">= 1 ;\n");
    }
    for linear in linears {
        for &(w, l) in linear.terms() {
            let _ = write!(out, "{:+} {} ", w, opb_lit(l));
        }
        let rel = match linear.relation() {
            crate::pbsat::Relation::GreaterEq => ">=",
            crate::pbsat::Relation::Equal => "=",
        };
        let _ = writeln!(out, "{} {} ;", rel, linear.bound());
    }
    out
}
