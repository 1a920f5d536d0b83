//! Mining drivers.
//!
//! Every driver owns one solver, loads one encoded instance, and iterates
//! solve/block rounds:
//!
//! * `simple`: plain model enumeration; with simple blocking it emits every
//!   frequent itemset exactly once,
//! * `lsm`: repeated maximization of the itemset size; each round returns a
//!   maximal frequent itemset, largest first,
//! * `cmg`: alternation of α-searches (find any frequent itemset) and
//!   β-searches (grow it); a failed growth certifies maximality,
//! * `ld`: fixes the itemset length through selector assumptions and walks
//!   it downwards from n to 1,
//! * `dual`: enumerates infrequent itemsets and reports the minimal
//!   infrequent border.
//!
//! The empty itemset is trivially frequent (its coverage is every
//! transaction); primal drivers exclude it up front with the clause
//! requiring at least one item.

use std::time::Instant;

use thiserror::Error;

use crate::dataset::{DatasetError, Itemset, ItemsetDatabase};
use crate::encoder::{self, EncodeError, EncodeOptions, EncodedInstance, RemovalMode};
use crate::enumeration::{BlockOutcome, Blocker, BlockingKind, DEFAULT_EXPLICIT_CAP};
use crate::pbsat::{Clause, Lit, MaxResult, SolveResult, Solver, SolverConfig, Var};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("{strategy:?} search requires a subsets-negation blocking kind, got {blocking:?}")]
    NeedsSubsetsBlocking {
        strategy: StrategyKind,
        blocking: BlockingKind,
    },
    #[error("dual search requires a supersets-negation blocking kind, got {0:?}")]
    NeedsSupersetsBlocking(BlockingKind),
    #[error("superset blocking kinds are only valid in dual mode")]
    SupersetsInPrimal,
    #[error("{0:?} search requires a removal mode (incremental or fixed)")]
    NeedsRemovalMode(StrategyKind),
    #[error("expanding the maximal collection would exceed {0} itemsets")]
    ExpansionTooLarge(usize),
}

/// Search strategies.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum StrategyKind {
    Simple,
    Lsm,
    Cmg,
    Ld,
    Dual,
}

/// Per-run knobs shared by all drivers.
#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub encode: EncodeOptions,
    /// Decision phase for item variables. `None` picks the strategy
    /// default: positive for primal searches (favours large itemsets),
    /// negative for the dual (favours small infrequent seeds).
    pub item_phase: Option<bool>,
    /// Decision phase for transaction variables; `None` defaults to
    /// negative.
    pub trans_phase: Option<bool>,
    pub solver: SolverConfig,
    /// Clause budget per iteration for explicit blocking kinds.
    pub explicit_cap: usize,
    /// Cooperative timeout, checked at iteration boundaries.
    pub deadline: Option<Instant>,
    /// Record per-iteration [`SearchEvent`]s in the outcome.
    pub record_trace: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            encode: EncodeOptions::default(),
            item_phase: None,
            trans_phase: None,
            solver: SolverConfig::default(),
            explicit_cap: DEFAULT_EXPLICIT_CAP,
            deadline: None,
            record_trace: false,
        }
    }
}

/// Search counters: the per-kind solve tallies mirror the usual reporting
/// for these strategies (α/β for CMG, sat/unsat everywhere).
#[derive(Clone, Copy, Default, Debug, PartialEq, Eq)]
pub struct SearchStats {
    /// Recorded itemsets (driver rounds that produced output).
    pub iterations: usize,
    /// Satisfiable α-searches (CMG only).
    pub alpha: usize,
    /// Satisfiable β-searches (CMG only).
    pub beta: usize,
    /// Satisfiable solver calls.
    pub sat: usize,
    /// Unsatisfiable solver calls.
    pub unsat: usize,
    /// Wall time spent inside the solver.
    pub solve_millis: u128,
}

/// One step of a mining run, recorded when tracing is enabled.
#[derive(Clone, Debug, PartialEq)]
pub enum SearchEvent {
    Alpha(Itemset),
    AlphaExhausted,
    Beta {
        from: Itemset,
        grown: Option<Itemset>,
    },
    Committed {
        itemset: Itemset,
        clauses: Vec<Clause>,
    },
    Found(Itemset),
}

/// Result of a mining run.
#[derive(Clone, Debug)]
pub struct MiningOutcome {
    /// Itemsets with supports. For primal runs all supports are >= θ; for
    /// dual runs this is the minimal infrequent border (supports < θ).
    pub found: Vec<(Itemset, usize)>,
    pub maximal_only: bool,
    pub dual_border: bool,
    /// Set when the deadline cut the run short; `found` is a valid prefix.
    pub timed_out: bool,
    pub stats: SearchStats,
    pub trace: Vec<SearchEvent>,
}

struct Driver {
    instance: EncodedInstance,
    solver: Solver,
    blocker: Blocker,
    found: Vec<(Itemset, usize)>,
    stats: SearchStats,
    trace: Vec<SearchEvent>,
    record_trace: bool,
    deadline: Option<Instant>,
    timed_out: bool,
}

impl Driver {
    fn new(
        db: &ItemsetDatabase,
        theta: usize,
        encode_opts: EncodeOptions,
        blocking: BlockingKind,
        options: &SearchOptions,
    ) -> Result<Driver, SearchError> {
        let instance = encoder::encode(db, theta, &encode_opts)?;
        let mut solver = Solver::new(options.solver.clone());
        instance
            .load_into(&mut solver)
            .expect("encoded instances reference only their own variables");
        let item_phase = options.item_phase.unwrap_or(!encode_opts.dual);
        let trans_phase = options.trans_phase.unwrap_or(false);
        for &v in instance.varmap.item_vars() {
            solver.set_polarity(v, item_phase);
        }
        for &v in instance.varmap.trans_vars() {
            solver.set_polarity(v, trans_phase);
        }
        if let Some(selectors) = instance.varmap.aux_n() {
            for &v in selectors {
                solver.set_polarity(v, true);
            }
        }
        if let Some(lengths) = instance.varmap.aux_a() {
            for &v in lengths {
                solver.set_polarity(v, false);
            }
        }
        if let Some(y) = instance.varmap.control_y() {
            solver.set_polarity(y, true);
        }
        if !encode_opts.dual {
            // The empty itemset is always a model; rule it out once.
            let non_empty: Vec<Lit> =
                instance.varmap.item_vars().iter().map(|v| v.pos()).collect();
            solver.add_clause(&non_empty).unwrap();
        }
        Ok(Driver {
            instance,
            solver,
            blocker: Blocker::with_cap(blocking, options.explicit_cap),
            found: Vec::new(),
            stats: SearchStats::default(),
            trace: Vec::new(),
            record_trace: options.record_trace,
            deadline: options.deadline,
            timed_out: false,
        })
    }

    fn item_vars(&self) -> &[Var] {
        self.instance.varmap.item_vars()
    }

    fn over_deadline(&mut self) -> bool {
        if let Some(deadline) = self.deadline {
            if Instant::now() >= deadline {
                self.timed_out = true;
                return true;
            }
        }
        false
    }

    fn solve(&mut self, assumptions: &[Lit]) -> SolveResult {
        let start = Instant::now();
        let result = self.solver.solve(assumptions);
        self.stats.solve_millis += start.elapsed().as_millis();
        match result {
            SolveResult::Sat(_) => self.stats.sat += 1,
            SolveResult::Unsat => self.stats.unsat += 1,
        }
        result
    }

    fn decode(&self, result: &SolveResult) -> (Itemset, usize) {
        let model = result.model().expect("decode requires a SAT result");
        let (itemset, transactions) = encoder::decode(model, &self.instance.varmap);
        // Coverage clauses pin the transaction variables to the coverage of
        // the decoded itemset, so its cardinality is the support.
        (itemset, transactions.len())
    }

    fn event(&mut self, event: SearchEvent) {
        if self.record_trace {
            self.trace.push(event);
        }
    }

    /// Adds the blocking clauses for `found`; on exhaustion the store is
    /// closed with the empty clause so remaining searches report UNSAT.
    fn block(&mut self, found: &Itemset) -> Vec<Clause> {
        let item_vars: Vec<Var> = self.item_vars().to_vec();
        match self.blocker.block(found, &item_vars) {
            BlockOutcome::Clauses(clauses) => {
                for clause in &clauses {
                    self.solver.add_clause(clause.lits()).unwrap();
                }
                clauses
            }
            BlockOutcome::Exhausted => {
                self.solver.add_clause(&[]).unwrap();
                Vec::new()
            }
        }
    }

    fn finish(self, maximal_only: bool, dual_border: bool) -> MiningOutcome {
        MiningOutcome {
            found: self.found,
            maximal_only,
            dual_border,
            timed_out: self.timed_out,
            stats: self.stats,
            trace: self.trace,
        }
    }
}

fn require_subsets(strategy: StrategyKind, blocking: BlockingKind) -> Result<(), SearchError> {
    if blocking.is_subsets() {
        Ok(())
    } else {
        Err(SearchError::NeedsSubsetsBlocking { strategy, blocking })
    }
}

/// Plain enumeration: solve, record, block, repeat until UNSAT.
pub fn mine_simple(
    db: &ItemsetDatabase,
    theta: usize,
    blocking: BlockingKind,
    options: &SearchOptions,
) -> Result<MiningOutcome, SearchError> {
    if blocking.is_supersets() {
        return Err(SearchError::SupersetsInPrimal);
    }
    let encode_opts = EncodeOptions {
        dual: false,
        ..options.encode
    };
    let mut driver = Driver::new(db, theta, encode_opts, blocking, options)?;
    loop {
        if driver.over_deadline() {
            break;
        }
        match driver.solve(&[]) {
            SolveResult::Unsat => break,
            result @ SolveResult::Sat(_) => {
                let (itemset, support) = driver.decode(&result);
                debug_assert!(!itemset.is_empty());
                driver.stats.iterations += 1;
                driver.event(SearchEvent::Found(itemset.clone()));
                driver.found.push((itemset.clone(), support));
                driver.block(&itemset);
            }
        }
    }
    Ok(driver.finish(false, false))
}

/// Largest-to-shortest maximal search: maximize the number of selected
/// items, record the optimum itemset, block its subsets, repeat.
pub fn mine_lsm(
    db: &ItemsetDatabase,
    theta: usize,
    blocking: BlockingKind,
    options: &SearchOptions,
) -> Result<MiningOutcome, SearchError> {
    require_subsets(StrategyKind::Lsm, blocking)?;
    let encode_opts = EncodeOptions {
        dual: false,
        ..options.encode
    };
    let mut driver = Driver::new(db, theta, encode_opts, blocking, options)?;
    let objective: Vec<Lit> = driver.item_vars().iter().map(|v| v.pos()).collect();
    loop {
        if driver.over_deadline() {
            break;
        }
        let start = Instant::now();
        let result = driver.solver.maximize(&objective, &[]);
        driver.stats.solve_millis += start.elapsed().as_millis();
        match result {
            MaxResult::Unsat => {
                driver.stats.unsat += 1;
                break;
            }
            MaxResult::Optimal { model, value } => {
                driver.stats.sat += 1;
                driver.stats.iterations += 1;
                let (itemset, transactions) = encoder::decode(&model, &driver.instance.varmap);
                debug_assert_eq!(itemset.len(), value);
                driver.event(SearchEvent::Found(itemset.clone()));
                driver.found.push((itemset.clone(), transactions.len()));
                driver.block(&itemset);
            }
        }
    }
    Ok(driver.finish(true, false))
}

/// Constrained monotonic growing: α-searches find a seed itemset, β-searches
/// grow it by at least one item until UNSAT certifies maximality; the
/// committed itemset is then blocked together with its subsets.
///
/// β growth is enforced per Table-3 mode: `incremental` adds a temporary
/// clause over the items outside the current set, guarded by a fresh
/// activation variable assumed for the round; `fixed` assumes the control
/// variable false so the stored counting constraint demands one more item.
pub fn mine_cmg(
    db: &ItemsetDatabase,
    theta: usize,
    removal: RemovalMode,
    blocking: BlockingKind,
    options: &SearchOptions,
) -> Result<MiningOutcome, SearchError> {
    require_subsets(StrategyKind::Cmg, blocking)?;
    if removal == RemovalMode::None {
        return Err(SearchError::NeedsRemovalMode(StrategyKind::Cmg));
    }
    let encode_opts = EncodeOptions {
        dual: false,
        removal_mode: removal,
        ..options.encode
    };
    let mut driver = Driver::new(db, theta, encode_opts, blocking, options)?;
    let selectors: Vec<Var> = driver.instance.varmap.aux_n().unwrap().to_vec();
    let control = driver.instance.varmap.control_y();
    let num_items = db.num_items();

    'alpha: loop {
        if driver.over_deadline() {
            break;
        }
        let mut assumptions: Vec<Lit> = selectors.iter().map(|v| v.pos()).collect();
        if let Some(y) = control {
            assumptions.push(y.pos());
        }
        match driver.solve(&assumptions) {
            SolveResult::Unsat => {
                driver.event(SearchEvent::AlphaExhausted);
                break;
            }
            result @ SolveResult::Sat(_) => {
                driver.stats.alpha += 1;
                let (mut current, mut support) = driver.decode(&result);
                driver.event(SearchEvent::Alpha(current.clone()));
                loop {
                    if driver.over_deadline() {
                        break 'alpha;
                    }
                    let mut beta_assumptions: Vec<Lit> =
                        current.iter().map(|i| selectors[i].neg()).collect();
                    match removal {
                        RemovalMode::Incremental => {
                            let guard = driver.solver.new_var();
                            driver.solver.set_polarity(guard, false);
                            let mut grow = vec![guard.neg()];
                            grow.extend(
                                (0..num_items)
                                    .filter(|&i| !current.contains(i))
                                    .map(|i| driver.item_vars()[i].pos()),
                            );
                            driver.solver.add_clause(&grow).unwrap();
                            beta_assumptions.push(guard.pos());
                        }
                        RemovalMode::Fixed => {
                            beta_assumptions.push(control.unwrap().neg());
                        }
                        RemovalMode::None => unreachable!(),
                    }
                    match driver.solve(&beta_assumptions) {
                        result @ SolveResult::Sat(_) => {
                            driver.stats.beta += 1;
                            let (grown, grown_support) = driver.decode(&result);
                            debug_assert!(current.is_subset(&grown) && grown.len() > current.len());
                            driver.event(SearchEvent::Beta {
                                from: current.clone(),
                                grown: Some(grown.clone()),
                            });
                            current = grown;
                            support = grown_support;
                        }
                        SolveResult::Unsat => {
                            driver.event(SearchEvent::Beta {
                                from: current.clone(),
                                grown: None,
                            });
                            driver.stats.iterations += 1;
                            driver.found.push((current.clone(), support));
                            let clauses = driver.block(&current);
                            driver.event(SearchEvent::Committed {
                                itemset: current.clone(),
                                clauses,
                            });
                            continue 'alpha;
                        }
                    }
                }
            }
        }
    }
    Ok(driver.finish(true, false))
}

/// Length-decreasing search: the instance carries length selectors `A_i` and
/// the equality `ΣI + ΣA = n`; assuming exactly `n-k` selectors true pins
/// the itemset size to `k`. Walking k from n down to 1 yields each maximal
/// itemset at its own length and exactly one UNSAT search per length.
pub fn mine_ld(
    db: &ItemsetDatabase,
    theta: usize,
    blocking: BlockingKind,
    options: &SearchOptions,
) -> Result<MiningOutcome, SearchError> {
    require_subsets(StrategyKind::Ld, blocking)?;
    if options.encode.removal_mode == RemovalMode::None {
        return Err(SearchError::NeedsRemovalMode(StrategyKind::Ld));
    }
    let encode_opts = EncodeOptions {
        dual: false,
        length_aux: true,
        ..options.encode
    };
    let mut driver = Driver::new(db, theta, encode_opts, blocking, options)?;
    let lengths: Vec<Var> = driver.instance.varmap.aux_a().unwrap().to_vec();
    let n = db.num_items();

    'lengths: for k in (1..=n).rev() {
        // Canonical selector assignment: the lexicographically first n-k
        // selectors are true, the rest false.
        let assumptions: Vec<Lit> = (0..n)
            .map(|j| {
                if j < n - k {
                    lengths[j].pos()
                } else {
                    lengths[j].neg()
                }
            })
            .collect();
        loop {
            if driver.over_deadline() {
                break 'lengths;
            }
            match driver.solve(&assumptions) {
                SolveResult::Unsat => break,
                result @ SolveResult::Sat(_) => {
                    let (itemset, support) = driver.decode(&result);
                    debug_assert_eq!(itemset.len(), k);
                    driver.stats.iterations += 1;
                    driver.event(SearchEvent::Found(itemset.clone()));
                    driver.found.push((itemset.clone(), support));
                    driver.block(&itemset);
                }
            }
        }
    }
    Ok(driver.finish(true, false))
}

/// Dual enumeration: models decode to infrequent itemsets; superset blocking
/// walks the space bottom-up and the minimal infrequent border is reported.
pub fn mine_dual(
    db: &ItemsetDatabase,
    theta: usize,
    blocking: BlockingKind,
    options: &SearchOptions,
) -> Result<MiningOutcome, SearchError> {
    if !blocking.is_supersets() {
        return Err(SearchError::NeedsSupersetsBlocking(blocking));
    }
    let encode_opts = EncodeOptions {
        dual: true,
        ..options.encode
    };
    let mut driver = Driver::new(db, theta, encode_opts, blocking, options)?;
    loop {
        if driver.over_deadline() {
            break;
        }
        match driver.solve(&[]) {
            SolveResult::Unsat => break,
            result @ SolveResult::Sat(_) => {
                let (itemset, support) = driver.decode(&result);
                debug_assert!(!itemset.is_empty(), "the empty itemset is never infrequent");
                driver.stats.iterations += 1;
                driver.event(SearchEvent::Found(itemset.clone()));
                driver.found.push((itemset.clone(), support));
                driver.block(&itemset);
            }
        }
    }
    // Keep only the minimal infrequent itemsets: the discovered border.
    let all = driver.found.clone();
    driver.found.retain(|(set, _)| {
        !all.iter()
            .any(|(other, _)| other.len() < set.len() && other.is_subset(set))
    });
    driver.found.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(driver.finish(false, true))
}

/// Dispatch by strategy kind. CMG takes its removal mode from
/// `options.encode.removal_mode`.
pub fn mine(
    db: &ItemsetDatabase,
    theta: usize,
    strategy: StrategyKind,
    blocking: BlockingKind,
    options: &SearchOptions,
) -> Result<MiningOutcome, SearchError> {
    match strategy {
        StrategyKind::Simple => mine_simple(db, theta, blocking, options),
        StrategyKind::Lsm => mine_lsm(db, theta, blocking, options),
        StrategyKind::Cmg => mine_cmg(
            db,
            theta,
            options.encode.removal_mode,
            blocking,
            options,
        ),
        StrategyKind::Ld => mine_ld(db, theta, blocking, options),
        StrategyKind::Dual => mine_dual(db, theta, blocking, options),
    }
}

const EXPANSION_LIMIT: usize = 1 << 24;

/// Expands maximal itemsets into the full frequent collection: the union of
/// all non-empty subsets, deduplicated, each annotated with its support.
/// Sound because every subset of a frequent itemset is frequent.
pub fn expand_maximal(
    maximals: &[Itemset],
    db: &ItemsetDatabase,
) -> Result<Vec<(Itemset, usize)>, SearchError> {
    let budget: usize = maximals
        .iter()
        .map(|m| 1usize.checked_shl(m.len() as u32).unwrap_or(usize::MAX))
        .fold(0usize, usize::saturating_add);
    if budget > EXPANSION_LIMIT {
        return Err(SearchError::ExpansionTooLarge(EXPANSION_LIMIT));
    }
    let n = db.num_items();
    let mut out = std::collections::BTreeMap::new();
    for maximal in maximals {
        let members: Vec<usize> = maximal.iter().collect();
        for mask in 1u64..(1 << members.len()) {
            let subset = Itemset::from_indices(
                n,
                members
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| (mask >> k) & 1 == 1)
                    .map(|(_, &i)| i),
            );
            if let std::collections::btree_map::Entry::Vacant(slot) = out.entry(subset) {
                let support = db.support(slot.key())?;
                slot.insert(support);
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// All non-empty itemsets that do not contain any border element: the
/// frequent collection characterized by a minimal infrequent border.
/// Exhaustive over the lattice; desk-scale only.
pub fn frequent_from_border(border: &[Itemset], num_items: usize) -> Vec<Itemset> {
    assert!(num_items <= 24, "border complement is a desk-scale tool");
    let mut out = Vec::new();
    for mask in 1u64..(1 << num_items) {
        let set = Itemset::from_indices(
            num_items,
            (0..num_items).filter(|&i| (mask >> i) & 1 == 1),
        );
        if border.iter().all(|b| !b.is_subset(&set)) {
            out.push(set);
        }
    }
    out
}
