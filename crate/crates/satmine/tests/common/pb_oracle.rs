//! Random constraint instances plus an exhaustive evaluator, shared by the
//! solver cross-check suites. The evaluator works on the raw instance data
//! and never consults the solver.

use rand::rngs::StdRng;
use rand::Rng;
use satmine::pbsat::{LinearConstraint, Lit, Solver, SolverConfig, Var};

/// Raw instance mirrored in plain data.
#[derive(Clone, Debug)]
pub struct RawInstance {
    pub num_vars: usize,
    pub clauses: Vec<Vec<(bool, usize)>>, // (negated, var index)
    pub linears: Vec<RawLinear>,
}

#[derive(Clone, Debug)]
pub struct RawLinear {
    pub terms: Vec<(i64, bool, usize)>, // (weight, negated, var index)
    pub equal: bool,
    pub bound: i64,
}

pub fn lit_true(mask: u32, negated: bool, var: usize) -> bool {
    ((mask >> var) & 1 == 1) != negated
}

pub fn raw_satisfied(inst: &RawInstance, mask: u32) -> bool {
    for clause in &inst.clauses {
        if !clause.iter().any(|&(neg, v)| lit_true(mask, neg, v)) {
            return false;
        }
    }
    for lin in &inst.linears {
        let sum: i64 = lin
            .terms
            .iter()
            .filter(|&&(_, neg, v)| lit_true(mask, neg, v))
            .map(|&(w, _, _)| w)
            .sum();
        let ok = if lin.equal {
            sum == lin.bound
        } else {
            sum >= lin.bound
        };
        if !ok {
            return false;
        }
    }
    true
}

/// Exhaustive status plus optimum of `objective` over satisfying masks,
/// restricted to assignments extending `assumptions`.
pub fn brute_force(
    inst: &RawInstance,
    assumptions: &[(bool, usize)],
    objective: &[(bool, usize)],
) -> (bool, usize) {
    let mut sat = false;
    let mut best = 0usize;
    for mask in 0..(1u32 << inst.num_vars) {
        if !assumptions.iter().all(|&(neg, v)| lit_true(mask, neg, v)) {
            continue;
        }
        if !raw_satisfied(inst, mask) {
            continue;
        }
        sat = true;
        let value = objective
            .iter()
            .filter(|&&(neg, v)| lit_true(mask, neg, v))
            .count();
        best = best.max(value);
    }
    (sat, best)
}

pub fn random_instance(rng: &mut StdRng, max_vars: usize) -> RawInstance {
    let num_vars = rng.gen_range(2..=max_vars);
    let num_clauses = rng.gen_range(0..=2 * num_vars);
    let clauses = (0..num_clauses)
        .map(|_| {
            let len = rng.gen_range(1..=3.min(num_vars));
            (0..len)
                .map(|_| (rng.gen_bool(0.5), rng.gen_range(0..num_vars)))
                .collect()
        })
        .collect();
    let num_linears = rng.gen_range(0..=num_vars / 2 + 1);
    let linears = (0..num_linears)
        .map(|_| {
            let len = rng.gen_range(1..=5.min(num_vars));
            let terms: Vec<(i64, bool, usize)> = (0..len)
                .map(|_| {
                    (
                        rng.gen_range(1..=4),
                        rng.gen_bool(0.4),
                        rng.gen_range(0..num_vars),
                    )
                })
                .collect();
            let max_sum: i64 = terms.iter().map(|&(w, _, _)| w).sum();
            let equal = rng.gen_bool(0.15);
            let bound = if equal {
                rng.gen_range(0..=max_sum)
            } else {
                rng.gen_range(-2..=max_sum + 2)
            };
            RawLinear {
                terms,
                equal,
                bound,
            }
        })
        .collect();
    RawInstance {
        num_vars,
        clauses,
        linears,
    }
}

pub fn build_solver(inst: &RawInstance, seed: u64) -> (Solver, Vec<Var>) {
    let mut solver = Solver::new(SolverConfig {
        seed,
        ..SolverConfig::default()
    });
    let vars: Vec<Var> = (0..inst.num_vars).map(|_| solver.new_var()).collect();
    for clause in &inst.clauses {
        let lits: Vec<Lit> = clause
            .iter()
            .map(|&(neg, v)| if neg { vars[v].neg() } else { vars[v].pos() })
            .collect();
        solver.add_clause(&lits).unwrap();
    }
    for lin in &inst.linears {
        let terms: Vec<(i64, Lit)> = lin
            .terms
            .iter()
            .map(|&(w, neg, v)| (w, if neg { vars[v].neg() } else { vars[v].pos() }))
            .collect();
        let c = if lin.equal {
            LinearConstraint::equal(terms, lin.bound)
        } else {
            LinearConstraint::greater_eq(terms, lin.bound)
        };
        solver.add_linear(&c).unwrap();
    }
    (solver, vars)
}

pub fn to_lits(vars: &[Var], raw: &[(bool, usize)]) -> Vec<Lit> {
    raw.iter()
        .map(|&(neg, v)| if neg { vars[v].neg() } else { vars[v].pos() })
        .collect()
}
