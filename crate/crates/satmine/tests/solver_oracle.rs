//! Randomized cross-check of the solver against exhaustive enumeration.

mod common;

use common::pb_oracle::{
    brute_force, build_solver, random_instance, raw_satisfied, to_lits, RawInstance,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use satmine::pbsat::{LinearConstraint, Lit, MaxResult, SolveResult, Solver, SolverConfig, Var};

fn check_model(inst: &RawInstance, vars: &[Var], result: &SolveResult) {
    let model = result.model().expect("SAT result carries a model");
    let mut mask = 0u32;
    for (i, &v) in vars.iter().enumerate() {
        if model.value(v) {
            mask |= 1 << i;
        }
    }
    assert!(
        raw_satisfied(inst, mask),
        "solver model violates the raw instance: {inst:?}"
    );
}

#[test]
fn status_matches_exhaustive_enumeration() {
    let mut rng = StdRng::seed_from_u64(0xB01D);
    for round in 0..700 {
        let inst = random_instance(&mut rng, 12);
        let (expect_sat, _) = brute_force(&inst, &[], &[]);
        let (mut solver, vars) = build_solver(&inst, round);
        let got = solver.solve(&[]);
        assert_eq!(
            got.is_sat(),
            expect_sat,
            "round {round}: status mismatch on {inst:?}"
        );
        if got.is_sat() {
            check_model(&inst, &vars, &got);
        }
    }
}

#[test]
fn status_matches_on_larger_instances() {
    let mut rng = StdRng::seed_from_u64(0xFEED);
    for round in 0..80 {
        let inst = random_instance(&mut rng, 16);
        let (expect_sat, _) = brute_force(&inst, &[], &[]);
        let (mut solver, vars) = build_solver(&inst, round);
        let got = solver.solve(&[]);
        assert_eq!(got.is_sat(), expect_sat, "round {round}: {inst:?}");
        if got.is_sat() {
            check_model(&inst, &vars, &got);
        }
    }
}

#[test]
fn status_matches_at_twenty_variables() {
    let mut rng = StdRng::seed_from_u64(0x20AB);
    let mut checked = 0;
    while checked < 10 {
        let inst = random_instance(&mut rng, 20);
        if inst.num_vars < 17 {
            continue;
        }
        checked += 1;
        let (expect_sat, _) = brute_force(&inst, &[], &[]);
        let (mut solver, vars) = build_solver(&inst, checked);
        let got = solver.solve(&[]);
        assert_eq!(got.is_sat(), expect_sat, "{inst:?}");
        if got.is_sat() {
            check_model(&inst, &vars, &got);
        }
    }
}

#[test]
fn assumptions_match_restricted_enumeration() {
    let mut rng = StdRng::seed_from_u64(0xA55);
    for round in 0..400 {
        let inst = random_instance(&mut rng, 10);
        let k = rng.gen_range(0..=3.min(inst.num_vars));
        let mut picked: Vec<usize> = (0..inst.num_vars).collect();
        // partial shuffle
        for i in 0..k {
            let j = rng.gen_range(i..picked.len());
            picked.swap(i, j);
        }
        let assumptions: Vec<(bool, usize)> = picked[..k]
            .iter()
            .map(|&v| (rng.gen_bool(0.5), v))
            .collect();
        let (expect_sat, _) = brute_force(&inst, &assumptions, &[]);
        let (mut solver, vars) = build_solver(&inst, round);
        let lits = to_lits(&vars, &assumptions);
        let got = solver.solve(&lits);
        assert_eq!(
            got.is_sat(),
            expect_sat,
            "round {round}: assumptions {assumptions:?} on {inst:?}"
        );
        if let SolveResult::Sat(ref m) = got {
            for &l in &lits {
                assert!(m.lit(l), "model must extend the assumptions");
            }
            check_model(&inst, &vars, &got);
        } else {
            // Assumption monotonicity: any superset stays UNSAT.
            if k < inst.num_vars {
                let extra = picked[k];
                let mut bigger = lits.clone();
                bigger.push(if rng.gen_bool(0.5) {
                    vars[extra].neg()
                } else {
                    vars[extra].pos()
                });
                assert!(
                    !solver.solve(&bigger).is_sat(),
                    "superset of an UNSAT assumption set became SAT"
                );
            }
        }
    }
}

#[test]
fn maximize_matches_exhaustive_optimum() {
    let mut rng = StdRng::seed_from_u64(0x0B7);
    for round in 0..300 {
        let inst = random_instance(&mut rng, 10);
        let obj_len = rng.gen_range(1..=inst.num_vars);
        let objective: Vec<(bool, usize)> = (0..obj_len)
            .map(|_| (rng.gen_bool(0.3), rng.gen_range(0..inst.num_vars)))
            .collect();
        let (expect_sat, expect_best) = brute_force(&inst, &[], &objective);
        let (mut solver, vars) = build_solver(&inst, round);
        let obj_lits = to_lits(&vars, &objective);
        match solver.maximize(&obj_lits, &[]) {
            MaxResult::Optimal { model, value } => {
                assert!(expect_sat, "round {round}: spurious SAT on {inst:?}");
                assert_eq!(
                    value, expect_best,
                    "round {round}: optimum mismatch on {inst:?} obj {objective:?}"
                );
                assert_eq!(obj_lits.iter().filter(|&&l| model.lit(l)).count(), value);
            }
            MaxResult::Unsat => {
                assert!(!expect_sat, "round {round}: spurious UNSAT on {inst:?}");
            }
        }
    }
}

#[test]
fn staged_additions_track_the_growing_store() {
    let mut rng = StdRng::seed_from_u64(0x57A6E);
    for round in 0..150 {
        let full = random_instance(&mut rng, 10);
        let mut solver = Solver::new(SolverConfig::default());
        let vars: Vec<Var> = (0..full.num_vars).map(|_| solver.new_var()).collect();
        let mut staged = RawInstance {
            num_vars: full.num_vars,
            clauses: Vec::new(),
            linears: Vec::new(),
        };
        for clause in &full.clauses {
            let lits = to_lits(
                &vars,
                &clause.iter().map(|&(n, v)| (n, v)).collect::<Vec<_>>(),
            );
            solver.add_clause(&lits).unwrap();
            staged.clauses.push(clause.clone());
            if staged.clauses.len().is_multiple_of(3) {
                let (expect, _) = brute_force(&staged, &[], &[]);
                assert_eq!(solver.solve(&[]).is_sat(), expect, "round {round}");
            }
        }
        for lin in &full.linears {
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
            staged.linears.push(lin.clone());
            let (expect, _) = brute_force(&staged, &[], &[]);
            assert_eq!(solver.solve(&[]).is_sat(), expect, "round {round}");
        }
    }
}

#[test]
fn fixed_seed_runs_are_identical() {
    let mut rng = StdRng::seed_from_u64(0xD373);
    for _ in 0..40 {
        let inst = random_instance(&mut rng, 10);
        let (mut a, vars_a) = build_solver(&inst, 42);
        let (mut b, vars_b) = build_solver(&inst, 42);
        let ra = a.solve(&[]);
        let rb = b.solve(&[]);
        assert_eq!(ra.is_sat(), rb.is_sat());
        if let (SolveResult::Sat(ma), SolveResult::Sat(mb)) = (&ra, &rb) {
            let bits_a: Vec<bool> = vars_a.iter().map(|&v| ma.value(v)).collect();
            let bits_b: Vec<bool> = vars_b.iter().map(|&v| mb.value(v)).collect();
            assert_eq!(bits_a, bits_b, "same seed must reproduce the same model");
        }
        let obj_a: Vec<Lit> = vars_a.iter().map(|&v| v.pos()).collect();
        let obj_b: Vec<Lit> = vars_b.iter().map(|&v| v.pos()).collect();
        assert_eq!(
            a.maximize(&obj_a, &[]).value(),
            b.maximize(&obj_b, &[]).value()
        );
    }
}
