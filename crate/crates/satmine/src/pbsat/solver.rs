//! Conflict-driven clause learning with counter-based propagation for
//! linear pseudo-Boolean constraints.
//!
//! Linear constraints never enter the clause database: each one keeps a
//! running count of the weight still available on its non-false literals and
//! propagates (or conflicts) when the count drops too close to the bound.
//! Conflict analysis stays purely clausal; a linear constraint involved in a
//! conflict contributes the implied clause over its falsified literals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::heap::VarHeap;
use super::{
    Clause, LinearConstraint, Lit, MaxResult, Model, NormLinear, PbError, SolveResult,
    SolverConfig, Var,
};

const ACTIVITY_RESCALE: f64 = 1e100;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Reason {
    Decision,
    Clause(u32),
    Linear(u32),
}

#[derive(Clone, Copy, Debug)]
enum Conflict {
    Clause(u32),
    Linear(u32),
}

struct ClauseSlot {
    lits: Vec<Lit>,
    learnt: bool,
    activity: f64,
    deleted: bool,
}

struct PbSlot {
    /// Positive weights, one term per variable.
    terms: Vec<(u64, Lit)>,
    bound: u64,
    /// Total weight over terms whose literal is not currently false,
    /// maintained incrementally along the trail.
    available: u64,
    max_weight: u64,
}

#[derive(Clone, Copy)]
struct Watcher {
    cref: u32,
    blocker: Lit,
}

/// Counters exposed for diagnostics and benchmarking.
#[derive(Clone, Copy, Default, Debug)]
pub struct SolverStats {
    pub solves: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
    pub restarts: u64,
}

/// Incremental CDCL solver over clauses and linear constraints.
///
/// A solver instance is single-threaded; distinct instances are independent.
pub struct Solver {
    cfg: SolverConfig,

    // Per-variable state, indexed by `Var::index`.
    assign: Vec<Option<bool>>,
    level: Vec<u32>,
    reason: Vec<Reason>,
    trail_pos: Vec<usize>,
    phase: Vec<bool>,
    activity: Vec<f64>,
    heap: VarHeap,
    seen: Vec<bool>,

    // Clause store. `watches` is indexed by literal code: assigning a
    // literal true triggers the watchers registered under its code.
    clauses: Vec<ClauseSlot>,
    watches: Vec<Vec<Watcher>>,
    learnts: Vec<u32>,
    num_problem_clauses: usize,

    // Linear store. `pb_occ[code]` lists (constraint, weight) pairs whose
    // term literal is falsified when the code's literal becomes true.
    pbs: Vec<PbSlot>,
    pb_occ: Vec<Vec<(u32, u64)>>,

    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,

    /// False once the constraint store is known unsatisfiable outright.
    ok: bool,

    var_inc: f64,
    cla_inc: f64,
    learnt_budget: f64,

    rng: ChaCha8Rng,
    stats: SolverStats,
}

impl Solver {
    pub fn new(cfg: SolverConfig) -> Solver {
        let rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        Solver {
            cfg,
            assign: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            trail_pos: Vec::new(),
            phase: Vec::new(),
            activity: Vec::new(),
            heap: VarHeap::new(),
            seen: Vec::new(),
            clauses: Vec::new(),
            watches: Vec::new(),
            learnts: Vec::new(),
            num_problem_clauses: 0,
            pbs: Vec::new(),
            pb_occ: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            ok: true,
            var_inc: 1.0,
            cla_inc: 1.0,
            learnt_budget: 2000.0,
            rng,
            stats: SolverStats::default(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.assign.len()
    }

    pub fn stats(&self) -> SolverStats {
        self.stats
    }

    /// Issues the next variable id (dense, starting at 1).
    pub fn new_var(&mut self) -> Var {
        let v = Var::from_index(self.assign.len());
        self.assign.push(None);
        self.level.push(0);
        self.reason.push(Reason::Decision);
        self.trail_pos.push(0);
        self.phase.push(self.cfg.default_phase);
        self.activity.push(0.0);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.pb_occ.push(Vec::new());
        self.pb_occ.push(Vec::new());
        self.heap.grow();
        self.heap.insert(v.index(), &self.activity);
        v
    }

    /// Sets the phase a decision on `var` will try first.
    pub fn set_polarity(&mut self, var: Var, phase: bool) {
        assert!(var.index() < self.num_vars(), "unknown variable {var}");
        self.phase[var.index()] = phase;
    }

    fn check_lit(&self, lit: Lit) -> Result<(), PbError> {
        if lit.var().index() >= self.num_vars() {
            Err(PbError::UnknownVariable(lit.var().id()))
        } else {
            Ok(())
        }
    }

    fn value_lit(&self, lit: Lit) -> Option<bool> {
        self.assign[lit.var().index()].map(|b| b != lit.is_negated())
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    /// Adds a clause, active for all subsequent solves.
    ///
    /// Tautologies are discarded; an empty (or fully falsified) clause makes
    /// the store permanently unsatisfiable.
    pub fn add_clause(&mut self, lits: &[Lit]) -> Result<(), PbError> {
        for &l in lits {
            self.check_lit(l)?;
        }
        if !self.ok {
            return Ok(());
        }
        debug_assert_eq!(self.decision_level(), 0);
        if lits.is_empty() {
            self.ok = false;
            return Ok(());
        }
        let clause = Clause::new(lits.to_vec());
        if clause.is_tautology() {
            return Ok(());
        }
        // Simplify against the top-level assignment.
        let mut out: Vec<Lit> = Vec::with_capacity(clause.len());
        for &l in clause.lits() {
            match self.value_lit(l) {
                Some(true) => return Ok(()),
                Some(false) => {}
                None => out.push(l),
            }
        }
        match out.len() {
            0 => self.ok = false,
            1 => {
                self.enqueue(out[0], Reason::Decision);
                if self.propagate().is_some() {
                    self.ok = false;
                }
            }
            _ => {
                self.alloc_clause(out, false);
            }
        }
        Ok(())
    }

    /// Adds a linear constraint, active for all subsequent solves.
    pub fn add_linear(&mut self, constraint: &LinearConstraint) -> Result<(), PbError> {
        for &(_, l) in constraint.terms() {
            self.check_lit(l)?;
        }
        if !self.ok {
            return Ok(());
        }
        debug_assert_eq!(self.decision_level(), 0);
        for norm in constraint.normalized() {
            self.add_norm(norm);
            if !self.ok {
                return Ok(());
            }
        }
        Ok(())
    }

    fn add_norm(&mut self, norm: NormLinear) {
        if norm.bound <= 0 {
            return; // trivially satisfied
        }
        let bound = norm.bound as u64;
        let total: u64 = norm.terms.iter().map(|&(w, _)| w).sum();
        if total < bound {
            self.ok = false;
            return;
        }
        let idx = self.pbs.len() as u32;
        let mut available = total;
        let mut max_weight = 0;
        for &(w, l) in &norm.terms {
            self.pb_occ[(!l).code()].push((idx, w));
            if self.value_lit(l) == Some(false) {
                available -= w;
            }
            max_weight = max_weight.max(w);
        }
        self.pbs.push(PbSlot {
            terms: norm.terms,
            bound,
            available,
            max_weight,
        });
        // Top-level consequences of the new constraint.
        if available < bound {
            self.ok = false;
            return;
        }
        if available < bound + max_weight {
            let props: Vec<Lit> = self.pbs[idx as usize]
                .terms
                .iter()
                .filter(|&&(w, l)| {
                    self.value_lit(l).is_none() && available.saturating_sub(w) < bound
                })
                .map(|&(_, l)| l)
                .collect();
            for l in props {
                if self.value_lit(l).is_none() {
                    self.enqueue(l, Reason::Linear(idx));
                }
            }
        }
        if self.propagate().is_some() {
            self.ok = false;
        }
    }

    fn alloc_clause(&mut self, lits: Vec<Lit>, learnt: bool) -> u32 {
        debug_assert!(lits.len() >= 2);
        let cref = self.clauses.len() as u32;
        let w0 = Watcher {
            cref,
            blocker: lits[1],
        };
        let w1 = Watcher {
            cref,
            blocker: lits[0],
        };
        self.watches[(!lits[0]).code()].push(w0);
        self.watches[(!lits[1]).code()].push(w1);
        self.clauses.push(ClauseSlot {
            lits,
            learnt,
            activity: if learnt { self.cla_inc } else { 0.0 },
            deleted: false,
        });
        if learnt {
            self.learnts.push(cref);
        } else {
            self.num_problem_clauses += 1;
        }
        cref
    }

    fn enqueue(&mut self, lit: Lit, reason: Reason) {
        debug_assert!(self.value_lit(lit).is_none());
        let v = lit.var().index();
        self.assign[v] = Some(!lit.is_negated());
        self.level[v] = self.decision_level() as u32;
        self.reason[v] = reason;
        self.trail_pos[v] = self.trail.len();
        self.trail.push(lit);
    }

    fn cancel_until(&mut self, target: usize) {
        if self.decision_level() <= target {
            return;
        }
        let new_len = self.trail_lim[target];
        for pos in (new_len..self.trail.len()).rev() {
            let p = self.trail[pos];
            // Counter updates were applied when the literal was dequeued;
            // only those have anything to undo.
            if pos < self.qhead {
                for k in 0..self.pb_occ[p.code()].len() {
                    let (ci, w) = self.pb_occ[p.code()][k];
                    self.pbs[ci as usize].available += w;
                }
            }
            let v = p.var().index();
            self.assign[v] = None;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(new_len);
        self.trail_lim.truncate(target);
        self.qhead = self.trail.len();
    }

    /// Propagates until fixpoint or conflict.
    fn propagate(&mut self) -> Option<Conflict> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;

            // Linear constraints: apply all counter updates for `p` first so
            // the undo in cancel_until stays exact, then check each touched
            // constraint.
            let n_occ = self.pb_occ[p.code()].len();
            for k in 0..n_occ {
                let (ci, w) = self.pb_occ[p.code()][k];
                self.pbs[ci as usize].available -= w;
            }
            for k in 0..n_occ {
                let (ci, _) = self.pb_occ[p.code()][k];
                let slot = &self.pbs[ci as usize];
                if slot.available < slot.bound {
                    return Some(Conflict::Linear(ci));
                }
                if slot.available < slot.bound + slot.max_weight {
                    let available = slot.available;
                    let bound = slot.bound;
                    let props: Vec<Lit> = slot
                        .terms
                        .iter()
                        .filter(|&&(w, l)| {
                            available.saturating_sub(w) < bound && self.value_lit(l).is_none()
                        })
                        .map(|&(_, l)| l)
                        .collect();
                    for l in props {
                        self.enqueue(l, Reason::Linear(ci));
                    }
                }
            }

            if let Some(conflict) = self.propagate_clauses(p) {
                return Some(conflict);
            }
        }
        None
    }

    fn propagate_clauses(&mut self, p: Lit) -> Option<Conflict> {
        let code = p.code();
        let mut ws = std::mem::take(&mut self.watches[code]);
        let mut i = 0;
        'watchers: while i < ws.len() {
            let w = ws[i];
            if self.value_lit(w.blocker) == Some(true) {
                i += 1;
                continue;
            }
            let cref = w.cref as usize;
            let false_lit = !p;
            {
                let lits = &mut self.clauses[cref].lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                debug_assert_eq!(lits[1], false_lit);
            }
            let first = self.clauses[cref].lits[0];
            if self.value_lit(first) == Some(true) {
                ws[i] = Watcher {
                    cref: w.cref,
                    blocker: first,
                };
                i += 1;
                continue;
            }
            // Look for a non-false replacement watch.
            for k in 2..self.clauses[cref].lits.len() {
                if self.value_lit(self.clauses[cref].lits[k]) != Some(false) {
                    self.clauses[cref].lits.swap(1, k);
                    let new_watch = self.clauses[cref].lits[1];
                    self.watches[(!new_watch).code()].push(Watcher {
                        cref: w.cref,
                        blocker: first,
                    });
                    ws.swap_remove(i);
                    continue 'watchers;
                }
            }
            // Unit or conflicting.
            if self.value_lit(first) == Some(false) {
                self.watches[code] = ws;
                return Some(Conflict::Clause(w.cref));
            }
            self.enqueue(first, Reason::Clause(w.cref));
            ws[i] = Watcher {
                cref: w.cref,
                blocker: first,
            };
            i += 1;
        }
        self.watches[code] = ws;
        None
    }

    /// Literals of the conflicting constraint, all currently false.
    fn conflict_lits(&self, conflict: Conflict) -> Vec<Lit> {
        match conflict {
            Conflict::Clause(c) => self.clauses[c as usize].lits.clone(),
            Conflict::Linear(ci) => self.pbs[ci as usize]
                .terms
                .iter()
                .filter(|&&(_, l)| self.value_lit(l) == Some(false))
                .map(|&(_, l)| l)
                .collect(),
        }
    }

    /// Antecedent literals of `lit` (excluding `lit` itself), all false at
    /// the time `lit` was propagated.
    fn reason_lits(&mut self, lit: Lit) -> Vec<Lit> {
        let v = lit.var().index();
        match self.reason[v] {
            Reason::Decision => unreachable!("decisions have no antecedent"),
            Reason::Clause(c) => {
                self.bump_clause(c);
                self.clauses[c as usize]
                    .lits
                    .iter()
                    .copied()
                    .filter(|&l| l != lit)
                    .collect()
            }
            Reason::Linear(ci) => {
                let pos = self.trail_pos[v];
                self.pbs[ci as usize]
                    .terms
                    .iter()
                    .filter(|&&(_, l)| {
                        self.value_lit(l) == Some(false)
                            && self.trail_pos[l.var().index()] < pos
                    })
                    .map(|&(_, l)| l)
                    .collect()
            }
        }
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first) and the backjump level.
    fn analyze(&mut self, conflict: Conflict) -> (Vec<Lit>, usize) {
        if let Conflict::Clause(c) = conflict {
            self.bump_clause(c);
        }
        let current = self.decision_level() as u32;
        let mut learnt: Vec<Lit> = vec![Lit::positive(Var::from_id(1))]; // slot 0 overwritten
        let mut pending = self.conflict_lits(conflict);
        let mut counter = 0usize;
        let mut idx = self.trail.len();
        let uip;

        loop {
            for &q in &pending {
                let v = q.var().index();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(v);
                    if self.level[v] == current {
                        counter += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            // Walk back to the next marked trail literal.
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var().index()] {
                    break;
                }
            }
            let p = self.trail[idx];
            self.seen[p.var().index()] = false;
            counter -= 1;
            if counter == 0 {
                uip = p;
                break;
            }
            pending = self.reason_lits(p);
        }

        learnt[0] = !uip;
        for &l in &learnt[1..] {
            self.seen[l.var().index()] = false;
        }

        // Backjump to the second-highest level in the clause.
        let backjump = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for k in 2..learnt.len() {
                if self.level[learnt[k].var().index()] > self.level[learnt[max_i].var().index()] {
                    max_i = k;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var().index()] as usize
        };
        (learnt, backjump)
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > ACTIVITY_RESCALE {
            for a in &mut self.activity {
                *a /= ACTIVITY_RESCALE;
            }
            self.var_inc /= ACTIVITY_RESCALE;
        }
        self.heap.bumped(v, &self.activity);
    }

    fn bump_clause(&mut self, c: u32) {
        let slot = &mut self.clauses[c as usize];
        if !slot.learnt {
            return;
        }
        slot.activity += self.cla_inc;
        if slot.activity > ACTIVITY_RESCALE {
            for &cr in &self.learnts {
                self.clauses[cr as usize].activity /= ACTIVITY_RESCALE;
            }
            self.cla_inc /= ACTIVITY_RESCALE;
        }
    }

    fn decay_activities(&mut self) {
        self.var_inc /= self.cfg.var_decay;
        self.cla_inc /= self.cfg.clause_decay;
    }

    fn locked(&self, cref: u32) -> bool {
        let lits = &self.clauses[cref as usize].lits;
        self.value_lit(lits[0]) == Some(true)
            && self.reason[lits[0].var().index()] == Reason::Clause(cref)
    }

    /// Drops roughly half of the learnt clauses, lowest activity first.
    fn reduce_learnts(&mut self) {
        let mut ranked = self.learnts.clone();
        ranked.sort_by(|&a, &b| {
            self.clauses[a as usize]
                .activity
                .partial_cmp(&self.clauses[b as usize].activity)
                .unwrap()
        });
        let target = ranked.len() / 2;
        let mut removed = 0;
        for &cref in &ranked {
            if removed >= target {
                break;
            }
            if self.locked(cref) || self.clauses[cref as usize].lits.len() == 2 {
                continue;
            }
            self.detach_clause(cref);
            self.clauses[cref as usize].deleted = true;
            removed += 1;
        }
        self.learnts
            .retain(|&cref| !self.clauses[cref as usize].deleted);
        self.learnt_budget *= 1.1;
    }

    fn detach_clause(&mut self, cref: u32) {
        for k in 0..2 {
            let watch_code = (!self.clauses[cref as usize].lits[k]).code();
            self.watches[watch_code].retain(|w| w.cref != cref);
        }
    }

    fn pick_decision_var(&mut self) -> Option<usize> {
        if self.cfg.random_decision_freq > 0.0
            && self.rng.gen::<f64>() < self.cfg.random_decision_freq
        {
            let unassigned: Vec<usize> = (0..self.num_vars())
                .filter(|&v| self.assign[v].is_none())
                .collect();
            if let Some(&v) = unassigned.get(self.rng.gen_range(0..unassigned.len().max(1))) {
                return Some(v);
            }
        }
        while let Some(v) = self.heap.pop_max(&self.activity) {
            if self.assign[v].is_none() {
                return Some(v);
            }
        }
        None
    }

    /// Decides satisfiability under `assumptions`.
    ///
    /// On SAT the model assigns every issued variable and extends the
    /// assumptions. Learned clauses persist across calls. Panics if an
    /// assumption references an unissued variable.
    pub fn solve(&mut self, assumptions: &[Lit]) -> SolveResult {
        for &l in assumptions {
            assert!(
                l.var().index() < self.num_vars(),
                "assumption over unknown variable {l}"
            );
        }
        self.stats.solves += 1;
        if !self.ok {
            return SolveResult::Unsat;
        }
        debug_assert_eq!(self.decision_level(), 0);
        if self.propagate().is_some() {
            self.ok = false;
            return SolveResult::Unsat;
        }

        let mut restart_number = 0u32;
        let mut conflicts_here = 0u64;
        let mut budget = luby(restart_number) * self.cfg.restart_base as u64;

        loop {
            match self.propagate() {
                Some(conflict) => {
                    self.stats.conflicts += 1;
                    conflicts_here += 1;
                    if self.decision_level() == 0 {
                        self.ok = false;
                        return SolveResult::Unsat;
                    }
                    let (learnt, backjump) = self.analyze(conflict);
                    self.cancel_until(backjump);
                    if learnt.len() == 1 {
                        debug_assert_eq!(self.decision_level(), 0);
                        self.enqueue(learnt[0], Reason::Decision);
                    } else {
                        let asserting = learnt[0];
                        let cref = self.alloc_clause(learnt, true);
                        self.enqueue(asserting, Reason::Clause(cref));
                    }
                    self.decay_activities();
                }
                None => {
                    if conflicts_here >= budget {
                        self.stats.restarts += 1;
                        restart_number += 1;
                        conflicts_here = 0;
                        budget = luby(restart_number) * self.cfg.restart_base as u64;
                        self.cancel_until(0);
                        continue;
                    }
                    if self.learnts.len() as f64 > self.learnt_budget {
                        self.reduce_learnts();
                    }
                    if self.decision_level() < assumptions.len() {
                        let p = assumptions[self.decision_level()];
                        match self.value_lit(p) {
                            Some(true) => {
                                self.trail_lim.push(self.trail.len());
                            }
                            Some(false) => {
                                self.cancel_until(0);
                                return SolveResult::Unsat;
                            }
                            None => {
                                self.trail_lim.push(self.trail.len());
                                self.enqueue(p, Reason::Decision);
                            }
                        }
                    } else {
                        match self.pick_decision_var() {
                            None => {
                                let model = self.extract_model();
                                self.cancel_until(0);
                                return SolveResult::Sat(model);
                            }
                            Some(v) => {
                                self.stats.decisions += 1;
                                let lit = if self.phase[v] {
                                    Var::from_index(v).pos()
                                } else {
                                    Var::from_index(v).neg()
                                };
                                self.trail_lim.push(self.trail.len());
                                self.enqueue(lit, Reason::Decision);
                            }
                        }
                    }
                }
            }
        }
    }

    fn extract_model(&self) -> Model {
        let values: Vec<bool> = self
            .assign
            .iter()
            .map(|a| a.expect("total assignment at SAT exit"))
            .collect();
        let model = Model::new(values);
        debug_assert!(self.model_satisfies_store(&model));
        model
    }

    /// Direct evaluation of every stored constraint; debug-mode safety net.
    fn model_satisfies_store(&self, model: &Model) -> bool {
        for slot in &self.clauses {
            if slot.deleted || slot.learnt {
                continue;
            }
            if !slot.lits.iter().any(|&l| model.lit(l)) {
                return false;
            }
        }
        for pb in &self.pbs {
            let sum: u64 = pb
                .terms
                .iter()
                .filter(|&&(_, l)| model.lit(l))
                .map(|&(w, _)| w)
                .sum();
            if sum < pb.bound {
                return false;
            }
        }
        true
    }

    /// Finds a model maximizing the number of satisfied objective literals.
    ///
    /// Implemented by iterative bound strengthening: each satisfying model of
    /// value `v` adds (under a fresh activation assumption) the constraint
    /// that at least `v + 1` objective literals hold, until UNSAT. The
    /// optimum is exact.
    pub fn maximize(&mut self, objective: &[Lit], assumptions: &[Lit]) -> MaxResult {
        for &l in objective {
            assert!(
                l.var().index() < self.num_vars(),
                "objective over unknown variable {l}"
            );
        }
        let mut best: Option<(Model, usize)> = None;
        let mut assumps = assumptions.to_vec();
        loop {
            match self.solve(&assumps) {
                SolveResult::Unsat => {
                    return match best {
                        Some((model, value)) => MaxResult::Optimal { model, value },
                        None => MaxResult::Unsat,
                    };
                }
                SolveResult::Sat(model) => {
                    let value = objective.iter().filter(|&&l| model.lit(l)).count();
                    best = Some((model, value));
                    if value == objective.len() {
                        let (model, value) = best.unwrap();
                        return MaxResult::Optimal { model, value };
                    }
                    let activator = self.new_var();
                    self.set_polarity(activator, false);
                    let mut terms: Vec<(i64, Lit)> =
                        objective.iter().map(|&l| (1, l)).collect();
                    terms.push((value as i64 + 1, activator.neg()));
                    let stronger =
                        LinearConstraint::greater_eq(terms, value as i64 + 1);
                    self.add_linear(&stronger)
                        .expect("activation constraint uses issued variables");
                    assumps = assumptions.to_vec();
                    assumps.push(activator.pos());
                }
            }
        }
    }
}

/// Luby restart sequence: 1 1 2 1 1 2 4 1 1 2 1 1 2 4 8 ...
fn luby(i: u32) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < i as u64 + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    let mut x = i as u64;
    while size - 1 != x {
        size = (size - 1) / 2;
        seq -= 1;
        x %= size;
    }
    1 << seq
}

#[cfg(test)]
mod tests {
    use super::*;
    

    fn vars(solver: &mut Solver, n: usize) -> Vec<Var> {
        (0..n).map(|_| solver.new_var()).collect()
    }

    #[test]
    fn ids_issued_densely_from_one() {
        let mut s = Solver::new(SolverConfig::default());
        let v = vars(&mut s, 3);
        assert_eq!(v.iter().map(|v| v.id()).collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    #[test]
    fn empty_solver_is_sat_with_empty_model() {
        let mut s = Solver::new(SolverConfig::default());
        match s.solve(&[]) {
            SolveResult::Sat(m) => assert_eq!(m.num_vars(), 0),
            SolveResult::Unsat => panic!("empty store must be satisfiable"),
        }
    }

    #[test]
    fn polarity_hint_drives_first_decision() {
        let mut s = Solver::new(SolverConfig {
            default_phase: true,
            ..SolverConfig::default()
        });
        let v = s.new_var();
        match s.solve(&[]) {
            SolveResult::Sat(m) => assert!(m.value(v)),
            SolveResult::Unsat => unreachable!(),
        }
        let mut s = Solver::new(SolverConfig::default());
        let v = s.new_var();
        s.set_polarity(v, false);
        match s.solve(&[]) {
            SolveResult::Sat(m) => assert!(!m.value(v)),
            SolveResult::Unsat => unreachable!(),
        }
    }

    #[test]
    fn contradictory_units_are_unsat() {
        let mut s = Solver::new(SolverConfig::default());
        let v = s.new_var();
        s.add_clause(&[v.pos()]).unwrap();
        s.add_clause(&[v.neg()]).unwrap();
        assert!(!s.solve(&[]).is_sat());
    }

    #[test]
    fn unknown_variable_is_rejected() {
        let mut s = Solver::new(SolverConfig::default());
        let v = s.new_var();
        let ghost = Var::from_id(7);
        assert_eq!(
            s.add_clause(&[v.pos(), ghost.pos()]),
            Err(PbError::UnknownVariable(7))
        );
        assert_eq!(
            s.add_linear(&LinearConstraint::greater_eq(vec![(1, ghost.pos())], 1)),
            Err(PbError::UnknownVariable(7))
        );
    }

    /// Enumerates all models of the current store over `all` by repeated
    /// solving with full blocking clauses.
    fn enumerate_models(s: &mut Solver, all: &[Var]) -> Vec<Vec<bool>> {
        let mut models = Vec::new();
        loop {
            match s.solve(&[]) {
                SolveResult::Unsat => return models,
                SolveResult::Sat(m) => {
                    let bits: Vec<bool> = all.iter().map(|&v| m.value(v)).collect();
                    let block: Vec<Lit> = all
                        .iter()
                        .map(|&v| if m.value(v) { v.neg() } else { v.pos() })
                        .collect();
                    models.push(bits);
                    s.add_clause(&block).unwrap();
                }
            }
        }
    }

    #[test]
    fn cardinality_at_least_two_has_four_models() {
        let mut s = Solver::new(SolverConfig::default());
        let v = vars(&mut s, 3);
        let terms = v.iter().map(|&x| (1, x.pos())).collect();
        s.add_linear(&LinearConstraint::greater_eq(terms, 2)).unwrap();
        let models = enumerate_models(&mut s, &v);
        assert_eq!(models.len(), 4);
        for m in models {
            assert!(m.iter().filter(|&&b| b).count() >= 2);
        }
    }

    #[test]
    fn weighted_negated_literal_forces_assignment() {
        // 3·~a + b + c >= 3: a true would require b + c >= 3, impossible.
        let mut s = Solver::new(SolverConfig::default());
        let v = vars(&mut s, 3);
        let (a, b, c) = (v[0], v[1], v[2]);
        s.add_linear(&LinearConstraint::greater_eq(
            vec![(3, a.neg()), (1, b.pos()), (1, c.pos())],
            3,
        ))
        .unwrap();
        let models = enumerate_models(&mut s, &v);
        assert_eq!(models.len(), 4); // a=false, b/c free
        for m in models {
            assert!(!m[0]);
        }
    }

    #[test]
    fn assumption_guides_unit_propagation() {
        let mut s = Solver::new(SolverConfig::default());
        let v = vars(&mut s, 2);
        s.add_clause(&[v[0].pos(), v[1].pos()]).unwrap();
        match s.solve(&[v[0].neg()]) {
            SolveResult::Sat(m) => {
                assert!(!m.value(v[0]));
                assert!(m.value(v[1]));
            }
            SolveResult::Unsat => panic!("satisfiable under assumption"),
        }
        // The store itself stays satisfiable afterwards.
        assert!(s.solve(&[]).is_sat());
    }

    #[test]
    fn all_four_binary_clauses_are_unsat() {
        let mut s = Solver::new(SolverConfig::default());
        let v = vars(&mut s, 2);
        let (a, b) = (v[0], v[1]);
        s.add_clause(&[a.pos(), b.pos()]).unwrap();
        s.add_clause(&[a.neg(), b.pos()]).unwrap();
        s.add_clause(&[a.pos(), b.neg()]).unwrap();
        s.add_clause(&[a.neg(), b.neg()]).unwrap();
        assert!(!s.solve(&[]).is_sat());
    }

    #[test]
    fn assumption_restricts_cardinality_models() {
        let mut s = Solver::new(SolverConfig::default());
        let v = vars(&mut s, 3);
        let terms = v.iter().map(|&x| (1, x.pos())).collect();
        s.add_linear(&LinearConstraint::greater_eq(terms, 2)).unwrap();
        match s.solve(&[v[0].neg()]) {
            SolveResult::Sat(m) => {
                assert!(m.value(v[1]) && m.value(v[2]));
            }
            SolveResult::Unsat => panic!("satisfiable under assumption"),
        }
    }

    #[test]
    fn maximize_respects_clausal_cap() {
        // x1+x2+x3 >= 2 plus (~x1 | ~x2 | ~x3) caps the optimum at 2.
        let mut s = Solver::new(SolverConfig::default());
        let v = vars(&mut s, 3);
        let terms = v.iter().map(|&x| (1, x.pos())).collect();
        s.add_linear(&LinearConstraint::greater_eq(terms, 2)).unwrap();
        s.add_clause(&[v[0].neg(), v[1].neg(), v[2].neg()]).unwrap();
        let objective: Vec<Lit> = v.iter().map(|&x| x.pos()).collect();
        match s.maximize(&objective, &[]) {
            MaxResult::Optimal { model, value } => {
                assert_eq!(value, 2);
                assert_eq!(objective.iter().filter(|&&l| model.lit(l)).count(), 2);
            }
            MaxResult::Unsat => panic!("instance is satisfiable"),
        }
    }

    #[test]
    fn maximize_unconstrained_and_forced_zero() {
        let mut s = Solver::new(SolverConfig::default());
        let v = s.new_var();
        assert_eq!(s.maximize(&[v.pos()], &[]).value(), Some(1));

        let mut s = Solver::new(SolverConfig::default());
        let v = s.new_var();
        s.add_clause(&[v.neg()]).unwrap();
        assert_eq!(s.maximize(&[v.pos()], &[]).value(), Some(0));
    }

    #[test]
    fn maximize_reports_unsat() {
        let mut s = Solver::new(SolverConfig::default());
        let v = s.new_var();
        s.add_clause(&[v.pos()]).unwrap();
        s.add_clause(&[v.neg()]).unwrap();
        assert!(matches!(s.maximize(&[v.pos()], &[]), MaxResult::Unsat));
    }

    #[test]
    fn equality_constraint_pins_count() {
        let mut s = Solver::new(SolverConfig::default());
        let v = vars(&mut s, 4);
        let terms = v.iter().map(|&x| (1, x.pos())).collect();
        s.add_linear(&LinearConstraint::equal(terms, 2)).unwrap();
        let models = enumerate_models(&mut s, &v);
        assert_eq!(models.len(), 6); // C(4,2)
        for m in models {
            assert_eq!(m.iter().filter(|&&b| b).count(), 2);
        }
    }

    #[test]
    fn incremental_additions_strengthen_the_store() {
        let mut s = Solver::new(SolverConfig::default());
        let v = vars(&mut s, 3);
        let terms: Vec<(i64, Lit)> = v.iter().map(|&x| (1, x.pos())).collect();
        s.add_linear(&LinearConstraint::greater_eq(terms.clone(), 1))
            .unwrap();
        assert!(s.solve(&[]).is_sat());
        s.add_linear(&LinearConstraint::greater_eq(terms, 3)).unwrap();
        match s.solve(&[]) {
            SolveResult::Sat(m) => assert!(v.iter().all(|&x| m.value(x))),
            SolveResult::Unsat => panic!("all-true model exists"),
        }
        s.add_clause(&[v[1].neg()]).unwrap();
        assert!(!s.solve(&[]).is_sat());
        // Further additions on a dead store are accepted and stay UNSAT.
        s.add_clause(&[v[0].pos()]).unwrap();
        assert!(!s.solve(&[]).is_sat());
    }

    #[test]
    fn tautologies_and_duplicates_are_normalized() {
        let mut s = Solver::new(SolverConfig::default());
        let v = vars(&mut s, 2);
        s.add_clause(&[v[0].pos(), v[0].neg()]).unwrap(); // tautology: dropped
        s.add_clause(&[v[1].pos(), v[1].pos()]).unwrap(); // dedups to a unit
        match s.solve(&[]) {
            SolveResult::Sat(m) => assert!(m.value(v[1])),
            SolveResult::Unsat => unreachable!(),
        }
    }

    #[test]
    fn luby_prefix_matches_known_sequence() {
        let expected = [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8];
        let got: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(got, expected);
    }
}
