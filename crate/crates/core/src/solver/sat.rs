//! Conflict-driven clause-learning SAT solver.
//!
//! Two watched literals per clause with blocker literals, 1-UIP learning with
//! local minimization, VSIDS branching on a binary heap, phase saving, Luby
//! restarts and activity-based learnt clause reduction. Assumptions are
//! decided first; when they conflict, the failed subset is available through
//! [`SatSolver::core`].

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lit::{Lit, Var};
use crate::solver::SolverConfig;

/// Internal literal code: `2 * var_index + negated`.
type Code = u32;
type ClauseRef = u32;

const UNDEF: i8 = 0;
const TRUE: i8 = 1;
const FALSE: i8 = -1;
const NO_REASON: ClauseRef = ClauseRef::MAX;

#[inline]
fn code_of(l: Lit) -> Code {
    2 * (l.var() - 1) + l.is_negated() as u32
}

#[inline]
fn lit_of(c: Code) -> Lit {
    Lit::new(c / 2 + 1, c & 1 == 1)
}

#[inline]
fn var_of(c: Code) -> usize {
    (c / 2) as usize
}

/// Outcome of a single [`SatSolver::solve`] call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SatOutcome {
    Sat,
    Unsat,
    /// A conflict or time budget ran out.
    Unknown,
}

#[derive(Debug, Clone)]
struct ClauseData {
    lits: Vec<Code>,
    learnt: bool,
    deleted: bool,
    activity: f64,
}

#[derive(Debug, Clone, Copy)]
struct Watcher {
    cref: ClauseRef,
    blocker: Code,
}

/// Max-heap of variables keyed by activity.
#[derive(Debug, Default, Clone)]
struct VarHeap {
    heap: Vec<usize>,
    pos: Vec<usize>,
}

const NOT_IN_HEAP: usize = usize::MAX;

impl VarHeap {
    fn grow(&mut self, n: usize) {
        self.pos.resize(n, NOT_IN_HEAP);
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v] != NOT_IN_HEAP
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.pos[v] = self.heap.len();
        self.heap.push(v);
        self.sift_up(self.heap.len() - 1, act);
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top] = NOT_IN_HEAP;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last] = 0;
            self.sift_down(0, act);
        }
        Some(top)
    }

    fn bumped(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            self.sift_up(self.pos[v], act);
        }
    }

    fn better(a: usize, b: usize, act: &[f64]) -> bool {
        act[a] > act[b] || (act[a] == act[b] && a < b)
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            let p = self.heap[parent];
            if !Self::better(v, p, act) {
                break;
            }
            self.heap[i] = p;
            self.pos[p] = i;
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v] = i;
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let child = if r < n && Self::better(self.heap[r], self.heap[l], act) {
                r
            } else {
                l
            };
            if !Self::better(self.heap[child], v, act) {
                break;
            }
            self.heap[i] = self.heap[child];
            self.pos[self.heap[i]] = i;
            i = child;
        }
        self.heap[i] = v;
        self.pos[v] = i;
    }
}

/// Finite Luby sequence value for restart index `i` (0-based).
fn luby(mut i: u64) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < i + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != i {
        size = (size - 1) / 2;
        seq -= 1;
        i %= size;
    }
    1u64 << seq
}

#[derive(Debug, Clone, Default)]
pub struct SatStats {
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
    pub restarts: u64,
    pub learnt_clauses: usize,
}

#[derive(Debug, Clone)]
pub struct SatSolver {
    clauses: Vec<ClauseData>,
    watches: Vec<Vec<Watcher>>,
    values: Vec<i8>,
    levels: Vec<u32>,
    reasons: Vec<ClauseRef>,
    phases: Vec<bool>,
    activity: Vec<f64>,
    heap: VarHeap,
    trail: Vec<Code>,
    trail_lim: Vec<usize>,
    qhead: usize,
    seen: Vec<bool>,
    ok: bool,

    var_inc: f64,
    var_decay: f64,
    cla_inc: f64,
    cla_decay: f64,
    restart_base: u64,
    max_learnts: f64,
    num_learnts: usize,

    conflict_limit: Option<u64>,
    deadline: Option<Instant>,
    rng: ChaCha8Rng,

    model: Vec<bool>,
    core: Vec<Lit>,
    stats: SatStats,
}

impl SatSolver {
    pub fn new(cfg: &SolverConfig) -> SatSolver {
        SatSolver {
            clauses: Vec::new(),
            watches: Vec::new(),
            values: Vec::new(),
            levels: Vec::new(),
            reasons: Vec::new(),
            phases: Vec::new(),
            activity: Vec::new(),
            heap: VarHeap::default(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            seen: Vec::new(),
            ok: true,
            var_inc: 1.0,
            var_decay: cfg.var_decay,
            cla_inc: 1.0,
            cla_decay: cfg.clause_decay,
            restart_base: cfg.restart_base.max(1),
            max_learnts: 0.0,
            num_learnts: 0,
            conflict_limit: cfg.conflict_limit,
            deadline: cfg.timeout.map(|t| Instant::now() + t),
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            model: Vec::new(),
            core: Vec::new(),
            stats: SatStats::default(),
        }
    }

    pub fn num_vars(&self) -> Var {
        self.values.len() as Var
    }

    pub fn stats(&self) -> SatStats {
        SatStats {
            learnt_clauses: self.num_learnts,
            ..self.stats.clone()
        }
    }

    pub fn new_var(&mut self) -> Var {
        let v = self.values.len();
        self.values.push(UNDEF);
        self.levels.push(0);
        self.reasons.push(NO_REASON);
        self.phases.push(false);
        // tiny seeded jitter breaks ties in the initial branching order
        self.activity.push(self.rng.gen::<f64>() * 1e-5);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.heap.grow(v + 1);
        self.heap.insert(v, &self.activity);
        (v + 1) as Var
    }

    /// Makes sure variables `1..=n` exist.
    pub fn reserve_vars(&mut self, n: Var) {
        while self.num_vars() < n {
            self.new_var();
        }
    }

    pub fn set_conflict_limit(&mut self, limit: Option<u64>) {
        self.conflict_limit = limit;
    }

    pub fn set_deadline(&mut self, deadline: Option<Instant>) {
        self.deadline = deadline;
    }

    pub fn is_ok(&self) -> bool {
        self.ok
    }

    #[inline]
    fn value(&self, c: Code) -> i8 {
        let v = self.values[var_of(c)];
        if c & 1 == 1 {
            -v
        } else {
            v
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    /// Adds a clause at decision level 0. Returns `false` once the clause set
    /// is known to be unsatisfiable.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        if !self.ok {
            return false;
        }
        debug_assert_eq!(self.decision_level(), 0);
        if let Some(max) = lits.iter().map(|l| l.var()).max() {
            self.reserve_vars(max);
        }
        let mut codes: Vec<Code> = lits.iter().map(|&l| code_of(l)).collect();
        codes.sort_unstable();
        codes.dedup();
        let mut simplified = Vec::with_capacity(codes.len());
        for (i, &c) in codes.iter().enumerate() {
            if i + 1 < codes.len() && codes[i + 1] == c ^ 1 {
                return true; // tautology
            }
            match self.value(c) {
                TRUE => return true,
                FALSE => {}
                _ => simplified.push(c),
            }
        }
        match simplified.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(simplified[0], NO_REASON);
                if self.propagate().is_some() {
                    self.ok = false;
                }
                self.ok
            }
            _ => {
                self.attach(simplified, false);
                true
            }
        }
    }

    fn attach(&mut self, lits: Vec<Code>, learnt: bool) -> ClauseRef {
        let cref = self.clauses.len() as ClauseRef;
        self.watches[lits[0] as usize].push(Watcher {
            cref,
            blocker: lits[1],
        });
        self.watches[lits[1] as usize].push(Watcher {
            cref,
            blocker: lits[0],
        });
        if learnt {
            self.num_learnts += 1;
        }
        self.clauses.push(ClauseData {
            lits,
            learnt,
            deleted: false,
            activity: 0.0,
        });
        cref
    }

    fn enqueue(&mut self, c: Code, reason: ClauseRef) {
        let v = var_of(c);
        debug_assert_eq!(self.values[v], UNDEF);
        self.values[v] = if c & 1 == 1 { FALSE } else { TRUE };
        self.levels[v] = self.decision_level();
        self.reasons[v] = reason;
        self.trail.push(c);
    }

    /// Unit propagation. Returns the conflicting clause, if any.
    fn propagate(&mut self) -> Option<ClauseRef> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = p ^ 1;
            let mut ws = std::mem::take(&mut self.watches[false_lit as usize]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref;
                if self.clauses[cref as usize].deleted {
                    continue;
                }
                {
                    let lits = &mut self.clauses[cref as usize].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                }
                let first = self.clauses[cref as usize].lits[0];
                if first != w.blocker && self.value(first) == TRUE {
                    ws[j] = Watcher {
                        cref,
                        blocker: first,
                    };
                    j += 1;
                    continue;
                }
                // look for a new literal to watch
                let len = self.clauses[cref as usize].lits.len();
                let mut moved = false;
                for k in 2..len {
                    let lk = self.clauses[cref as usize].lits[k];
                    if self.value(lk) != FALSE {
                        let lits = &mut self.clauses[cref as usize].lits;
                        lits.swap(1, k);
                        self.watches[lk as usize].push(Watcher {
                            cref,
                            blocker: first,
                        });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watcher {
                    cref,
                    blocker: first,
                };
                j += 1;
                if self.value(first) == FALSE {
                    conflict = Some(cref);
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, cref);
                }
            }
            ws.truncate(j);
            // watchers added for false_lit during this loop cannot exist: a
            // clause never re-watches the literal that was just falsified
            debug_assert!(self.watches[false_lit as usize].is_empty());
            self.watches[false_lit as usize] = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.bumped(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: ClauseRef) {
        let c = &mut self.clauses[cref as usize];
        if !c.learnt {
            return;
        }
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for c in self.clauses.iter_mut().filter(|c| c.learnt) {
                c.activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// 1-UIP conflict analysis. Returns the learnt clause (asserting literal
    /// first) and the backjump level.
    fn analyze(&mut self, mut confl: ClauseRef) -> (Vec<Code>, u32) {
        let mut learnt: Vec<Code> = vec![0];
        let mut path = 0usize;
        let mut p: Option<Code> = None;
        let mut index = self.trail.len();
        let level = self.decision_level();

        loop {
            self.bump_clause(confl);
            let lits = self.clauses[confl as usize].lits.clone();
            let start = if p.is_some() { 1 } else { 0 };
            for &q in &lits[start..] {
                let v = var_of(q);
                if !self.seen[v] && self.levels[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(v);
                    if self.levels[v] >= level {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            // next literal on the trail involved in the conflict
            loop {
                index -= 1;
                if self.seen[var_of(self.trail[index])] {
                    break;
                }
            }
            let pl = self.trail[index];
            p = Some(pl);
            confl = self.reasons[var_of(pl)];
            self.seen[var_of(pl)] = false;
            path -= 1;
            if path == 0 {
                break;
            }
        }
        learnt[0] = p.unwrap() ^ 1;

        // local minimization: drop literals whose reason is subsumed by the clause
        let keep: Vec<bool> = learnt
            .iter()
            .enumerate()
            .map(|(i, &q)| {
                if i == 0 {
                    return true;
                }
                let r = self.reasons[var_of(q)];
                if r == NO_REASON {
                    return true;
                }
                self.clauses[r as usize].lits[1..]
                    .iter()
                    .any(|&x| !self.seen[var_of(x)] && self.levels[var_of(x)] > 0)
            })
            .collect();
        for &q in &learnt[1..] {
            self.seen[var_of(q)] = false;
        }
        let mut learnt: Vec<Code> = learnt
            .into_iter()
            .zip(keep)
            .filter_map(|(q, k)| k.then_some(q))
            .collect();

        let bt_level = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.levels[var_of(learnt[i])] > self.levels[var_of(learnt[max_i])] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.levels[var_of(learnt[1])]
        };
        (learnt, bt_level)
    }

    /// Collects the assumptions responsible for assumption `p` being false.
    fn analyze_final(&mut self, p: Code) {
        self.core.clear();
        self.core.push(lit_of(p));
        if self.decision_level() == 0 {
            return;
        }
        self.seen[var_of(p)] = true;
        for i in (self.trail_lim[0]..self.trail.len()).rev() {
            let x = self.trail[i];
            let v = var_of(x);
            if !self.seen[v] {
                continue;
            }
            let r = self.reasons[v];
            if r == NO_REASON {
                if v != var_of(p) {
                    self.core.push(lit_of(x));
                }
            } else {
                for &q in &self.clauses[r as usize].lits[1..] {
                    if self.levels[var_of(q)] > 0 {
                        self.seen[var_of(q)] = true;
                    }
                }
            }
            self.seen[v] = false;
        }
        self.seen[var_of(p)] = false;
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for i in (lim..self.trail.len()).rev() {
            let c = self.trail[i];
            let v = var_of(c);
            self.phases[v] = c & 1 == 0;
            self.values[v] = UNDEF;
            self.reasons[v] = NO_REASON;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = lim;
    }

    fn pick_branch(&mut self) -> Option<Code> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.values[v] == UNDEF {
                return Some(2 * v as Code + (!self.phases[v]) as Code);
            }
        }
        None
    }

    fn locked(&self, cref: ClauseRef) -> bool {
        let c = &self.clauses[cref as usize];
        let first = c.lits[0];
        self.value(first) == TRUE && self.reasons[var_of(first)] == cref
    }

    fn reduce_db(&mut self) {
        let mut candidates: Vec<ClauseRef> = (0..self.clauses.len() as ClauseRef)
            .filter(|&cr| {
                let c = &self.clauses[cr as usize];
                c.learnt && !c.deleted && c.lits.len() > 2 && !self.locked(cr)
            })
            .collect();
        candidates.sort_by(|&a, &b| {
            self.clauses[a as usize]
                .activity
                .partial_cmp(&self.clauses[b as usize].activity)
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let remove = candidates.len() / 2;
        for &cr in &candidates[..remove] {
            self.clauses[cr as usize].deleted = true;
            self.clauses[cr as usize].lits.shrink_to_fit();
            self.num_learnts -= 1;
        }
        // drop stale watchers eagerly
        for ws in &mut self.watches {
            ws.retain(|w| !self.clauses[w.cref as usize].deleted);
        }
    }

    fn out_of_budget(&self, conflicts_this_call: u64) -> bool {
        if let Some(limit) = self.conflict_limit {
            if conflicts_this_call >= limit {
                return true;
            }
        }
        if let Some(deadline) = self.deadline {
            if conflicts_this_call.is_multiple_of(64) && Instant::now() >= deadline {
                return true;
            }
        }
        false
    }

    /// Solves under `assumptions`. On `Sat` the model is available through
    /// [`SatSolver::model`]; on `Unsat` the failed assumptions through
    /// [`SatSolver::core`] (empty when the clauses alone are unsatisfiable).
    pub fn solve(&mut self, assumptions: &[Lit]) -> SatOutcome {
        self.core.clear();
        self.model.clear();
        if !self.ok {
            return SatOutcome::Unsat;
        }
        if let Some(max) = assumptions.iter().map(|l| l.var()).max() {
            self.reserve_vars(max);
        }
        let assumps: Vec<Code> = assumptions.iter().map(|&l| code_of(l)).collect();
        self.max_learnts = (self.clauses.len() as f64 / 3.0).max(2000.0);
        let mut conflicts: u64 = 0;
        let mut restart_idx: u64 = 0;
        let mut restart_budget = luby(restart_idx) * self.restart_base;
        let mut since_restart: u64 = 0;

        let outcome = loop {
            if let Some(confl) = self.propagate() {
                conflicts += 1;
                since_restart += 1;
                self.stats.conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    break SatOutcome::Unsat;
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let asserting = learnt[0];
                    let cref = self.attach(learnt, true);
                    self.bump_clause(cref);
                    self.enqueue(asserting, cref);
                }
                self.var_inc /= self.var_decay;
                self.cla_inc /= self.cla_decay;
                if self.out_of_budget(conflicts) {
                    break SatOutcome::Unknown;
                }
                continue;
            }

            if since_restart >= restart_budget {
                self.stats.restarts += 1;
                restart_idx += 1;
                restart_budget = luby(restart_idx) * self.restart_base;
                since_restart = 0;
                self.cancel_until(0);
                continue;
            }
            if self.num_learnts as f64 >= self.max_learnts + self.trail.len() as f64 {
                self.reduce_db();
                self.max_learnts *= 1.1;
            }

            let mut next = None;
            while (self.decision_level() as usize) < assumps.len() {
                let p = assumps[self.decision_level() as usize];
                match self.value(p) {
                    TRUE => self.trail_lim.push(self.trail.len()),
                    FALSE => {
                        self.analyze_final(p);
                        self.cancel_until(0);
                        return SatOutcome::Unsat;
                    }
                    _ => {
                        next = Some(p);
                        break;
                    }
                }
            }
            let decision = match next {
                Some(p) => p,
                None => match self.pick_branch() {
                    Some(p) => p,
                    None => {
                        self.model = self.values.iter().map(|&v| v == TRUE).collect();
                        break SatOutcome::Sat;
                    }
                },
            };
            self.stats.decisions += 1;
            self.trail_lim.push(self.trail.len());
            self.enqueue(decision, NO_REASON);
        };
        self.cancel_until(0);
        outcome
    }

    pub fn model(&self) -> &[bool] {
        &self.model
    }

    pub fn core(&self) -> &[Lit] {
        &self.core
    }
}
