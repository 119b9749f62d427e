//! Compiles an [`Instance`] into a weighted partial Max-SAT formula.
//!
//! Variable families (one block each, in this order):
//!
//! - `ct(s, t)`: session `s` takes place in timeslot `t`
//! - `cd(s, d)`: session `s` takes place on day `d`
//! - `cr(s, r)`: session `s` takes place in room `r`
//! - `kt(k, t)`: some session of curriculum `k` takes place in timeslot `t`
//!
//! followed by auxiliaries introduced by cardinality encodings.
//!
//! Hard families: ct↔cd linking, ct↔kt linking, curriculum clashes, teacher
//! clashes, room clashes, room assignment and meeting count. Soft families:
//! registration clashes, timeslot unavailability and room capacity.

use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::cardinality::{encode_exactly, CardError, CardScheme};
use crate::cnf::{Clause, ClauseError, FormulaError, WcnfFormula, Weight};
use crate::lit::{Lit, Var, VarAllocator};
use crate::model::{
    has_errors, validate_instance, CourseId, CurriculumId, DayId, Finding, Instance, RoomId, SessionId,
    SessionKind, TimeslotId,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RegistrationWeight {
    Unit,
    #[default]
    StudentCount,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CapacityWeight {
    Unit,
    #[default]
    OverflowCount,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodeOptions {
    /// `false` gives plain partial Max-SAT: every soft clause weighs 1.
    pub weighted: bool,
    /// `None` picks per constraint via [`CardScheme::auto`].
    pub card_scheme: Option<CardScheme>,
    pub unavailability_weight: u64,
    pub registration_weight: RegistrationWeight,
    pub capacity_weight: CapacityWeight,
    /// Emit the `kt` variables and their linking clauses.
    pub emit_kt: bool,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        EncodeOptions::weighted()
    }
}

impl EncodeOptions {
    pub fn weighted() -> Self {
        EncodeOptions {
            weighted: true,
            card_scheme: None,
            unavailability_weight: 10,
            registration_weight: RegistrationWeight::StudentCount,
            capacity_weight: CapacityWeight::OverflowCount,
            emit_kt: true,
        }
    }

    pub fn partial() -> Self {
        EncodeOptions {
            weighted: false,
            ..EncodeOptions::weighted()
        }
    }

    pub fn registration_weight(&self, students: u64) -> u64 {
        match (self.weighted, self.registration_weight) {
            (true, RegistrationWeight::StudentCount) => students,
            _ => 1,
        }
    }

    pub fn unavailability_weight(&self) -> u64 {
        if self.weighted {
            self.unavailability_weight
        } else {
            1
        }
    }

    pub fn capacity_weight(&self, overflow: u64) -> u64 {
        match (self.weighted, self.capacity_weight) {
            (true, CapacityWeight::OverflowCount) => overflow,
            _ => 1,
        }
    }
}

/// Constraint family a clause comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    CtCdLink,
    CtKtLink,
    CurriculumClash,
    RegistrationClash,
    TeacherClash,
    RoomClash,
    Unavailability,
    RoomCapacity,
    RoomAssignment,
    MeetingCount,
}

impl Family {
    pub const ALL: [Family; 10] = [
        Family::CtCdLink,
        Family::CtKtLink,
        Family::CurriculumClash,
        Family::RegistrationClash,
        Family::TeacherClash,
        Family::RoomClash,
        Family::Unavailability,
        Family::RoomCapacity,
        Family::RoomAssignment,
        Family::MeetingCount,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::CtCdLink => "ct_cd_link",
            Family::CtKtLink => "ct_kt_link",
            Family::CurriculumClash => "curriculum_clash",
            Family::RegistrationClash => "registration_clash",
            Family::TeacherClash => "teacher_clash",
            Family::RoomClash => "room_clash",
            Family::Unavailability => "unavailability",
            Family::RoomCapacity => "room_capacity",
            Family::RoomAssignment => "room_assignment",
            Family::MeetingCount => "meeting_count",
        }
    }

    pub fn is_soft(self) -> bool {
        matches!(
            self,
            Family::RegistrationClash | Family::Unavailability | Family::RoomCapacity
        )
    }
}

/// Small set of families; a clause shared by two families carries both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct FamilySet(u16);

impl FamilySet {
    pub fn of(f: Family) -> Self {
        FamilySet(1 << f as u16)
    }

    pub fn with(self, f: Family) -> Self {
        FamilySet(self.0 | 1 << f as u16)
    }

    pub fn contains(self, f: Family) -> bool {
        self.0 & (1 << f as u16) != 0
    }

    pub fn iter(self) -> impl Iterator<Item = Family> {
        Family::ALL.into_iter().filter(move |&f| self.contains(f))
    }
}

/// What a CNF variable stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemanticVar {
    Ct { session: SessionId, timeslot: TimeslotId },
    Cd { session: SessionId, day: DayId },
    Cr { session: SessionId, room: RoomId },
    Kt { curriculum: CurriculumId, timeslot: TimeslotId },
    Aux { index: usize },
}

/// Origin of an auxiliary variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxOrigin {
    pub scheme: CardScheme,
    pub constraint: String,
    /// 1-based position among the auxiliaries of that constraint.
    pub ordinal: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("variable {var} is out of range 1..={max}")]
pub struct VarOutOfRange {
    pub var: Var,
    pub max: Var,
}

/// Bijection between semantic variables and dense CNF indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarMap {
    n_sessions: usize,
    n_slots: usize,
    n_days: usize,
    n_rooms: usize,
    n_curricula: usize,
    kt_emitted: bool,
    aux: Vec<AuxOrigin>,
    session_names: Vec<String>,
    slot_labels: Vec<String>,
    day_labels: Vec<String>,
    room_labels: Vec<String>,
    curriculum_labels: Vec<String>,
}

impl VarMap {
    pub fn new(i: &Instance, emit_kt: bool) -> VarMap {
        VarMap {
            n_sessions: i.sessions.len(),
            n_slots: i.timeslots.len(),
            n_days: i.days.len(),
            n_rooms: i.rooms.len(),
            n_curricula: i.curricula.len(),
            kt_emitted: emit_kt,
            aux: Vec::new(),
            session_names: (0..i.sessions.len()).map(|s| i.session_name(s)).collect(),
            slot_labels: i.timeslots.iter().map(|t| t.label.clone()).collect(),
            day_labels: i.days.iter().map(|d| d.label.clone()).collect(),
            room_labels: i.rooms.iter().map(|r| r.label.clone()).collect(),
            curriculum_labels: i.curricula.iter().map(|k| k.label.clone()).collect(),
        }
    }

    fn cd_base(&self) -> usize {
        self.n_sessions * self.n_slots
    }

    fn cr_base(&self) -> usize {
        self.cd_base() + self.n_sessions * self.n_days
    }

    fn kt_base(&self) -> usize {
        self.cr_base() + self.n_sessions * self.n_rooms
    }

    /// Number of ct/cd/cr/kt variables.
    pub fn num_semantic_vars(&self) -> Var {
        let kt = if self.kt_emitted {
            self.n_curricula * self.n_slots
        } else {
            0
        };
        (self.kt_base() + kt) as Var
    }

    pub fn num_aux_vars(&self) -> Var {
        self.aux.len() as Var
    }

    pub fn num_vars(&self) -> Var {
        self.num_semantic_vars() + self.num_aux_vars()
    }

    pub fn ct(&self, s: SessionId, t: TimeslotId) -> Var {
        debug_assert!(s < self.n_sessions && t < self.n_slots);
        (s * self.n_slots + t + 1) as Var
    }

    pub fn cd(&self, s: SessionId, d: DayId) -> Var {
        debug_assert!(s < self.n_sessions && d < self.n_days);
        (self.cd_base() + s * self.n_days + d + 1) as Var
    }

    pub fn cr(&self, s: SessionId, r: RoomId) -> Var {
        debug_assert!(s < self.n_sessions && r < self.n_rooms);
        (self.cr_base() + s * self.n_rooms + r + 1) as Var
    }

    /// `None` when kt variables are not emitted.
    pub fn kt(&self, k: CurriculumId, t: TimeslotId) -> Option<Var> {
        debug_assert!(k < self.n_curricula && t < self.n_slots);
        self.kt_emitted
            .then(|| (self.kt_base() + k * self.n_slots + t + 1) as Var)
    }

    pub fn kt_emitted(&self) -> bool {
        self.kt_emitted
    }

    /// Allocator positioned after every variable handed out so far.
    pub fn allocator(&self) -> VarAllocator {
        VarAllocator::new(self.num_vars())
    }

    /// Records auxiliaries `first..=alloc.max_var()` as belonging to `constraint`.
    fn register_aux(&mut self, alloc: &VarAllocator, scheme: CardScheme, constraint: &str) {
        let start = self.num_vars();
        debug_assert!(alloc.max_var() >= start);
        for ordinal in 1..=(alloc.max_var() - start) as usize {
            self.aux.push(AuxOrigin {
                scheme,
                constraint: constraint.to_string(),
                ordinal,
            });
        }
    }

    pub fn aux_origin(&self, index: usize) -> Option<&AuxOrigin> {
        self.aux.get(index)
    }

    pub fn semantic(&self, v: Var) -> Result<SemanticVar, VarOutOfRange> {
        if v == 0 || v > self.num_vars() {
            return Err(VarOutOfRange {
                var: v,
                max: self.num_vars(),
            });
        }
        let i = (v - 1) as usize;
        Ok(if i < self.cd_base() {
            SemanticVar::Ct {
                session: i / self.n_slots,
                timeslot: i % self.n_slots,
            }
        } else if i < self.cr_base() {
            let j = i - self.cd_base();
            SemanticVar::Cd {
                session: j / self.n_days,
                day: j % self.n_days,
            }
        } else if i < self.kt_base() {
            let j = i - self.cr_base();
            SemanticVar::Cr {
                session: j / self.n_rooms,
                room: j % self.n_rooms,
            }
        } else if i < self.num_semantic_vars() as usize {
            let j = i - self.kt_base();
            SemanticVar::Kt {
                curriculum: j / self.n_slots,
                timeslot: j % self.n_slots,
            }
        } else {
            SemanticVar::Aux {
                index: i - self.num_semantic_vars() as usize,
            }
        })
    }

    /// Human-readable meaning of `v`, e.g. `ct(CS101/lecture, t3)`.
    pub fn explain_var(&self, v: Var) -> Result<String, VarOutOfRange> {
        Ok(match self.semantic(v)? {
            SemanticVar::Ct { session, timeslot } => format!(
                "ct({}, {})",
                self.session_names[session], self.slot_labels[timeslot]
            ),
            SemanticVar::Cd { session, day } => {
                format!("cd({}, {})", self.session_names[session], self.day_labels[day])
            }
            SemanticVar::Cr { session, room } => {
                format!("cr({}, {})", self.session_names[session], self.room_labels[room])
            }
            SemanticVar::Kt {
                curriculum,
                timeslot,
            } => format!(
                "kt({}, {})",
                self.curriculum_labels[curriculum], self.slot_labels[timeslot]
            ),
            SemanticVar::Aux { index } => {
                let o = &self.aux[index];
                format!(
                    "aux({} #{} of constraint {})",
                    o.scheme.name(),
                    o.ordinal,
                    o.constraint
                )
            }
        })
    }

    /// Sidecar text: one `var <index> <meaning>` line per variable.
    pub fn to_sidecar(&self) -> String {
        let mut out = String::new();
        for v in 1..=self.num_vars() {
            out.push_str(&format!("var {v} {}\n", self.explain_var(v).expect("in range")));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("instance is invalid: {}", .0.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidInstance(Vec<Finding>),
    #[error("lab session {0} has no lab room available")]
    NoLabRoom(String),
    #[error(transparent)]
    Cardinality(#[from] CardError),
    #[error(transparent)]
    Clause(#[from] ClauseError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

type HardClauses = Vec<Vec<Lit>>;
type SoftClauses = Vec<(Vec<Lit>, u64)>;

fn neg(v: Var) -> Lit {
    Lit::neg(v)
}

fn pos(v: Var) -> Lit {
    Lit::pos(v)
}

/// ct→cd and cd→ct clauses for one session: `|T| + |D|` clauses.
pub fn link_ct_cd_session(i: &Instance, vm: &VarMap, s: SessionId) -> HardClauses {
    let mut out = Vec::with_capacity(i.timeslots.len() + i.days.len());
    for (t, slot) in i.timeslots.iter().enumerate() {
        out.push(vec![neg(vm.ct(s, t)), pos(vm.cd(s, slot.day))]);
    }
    for d in 0..i.days.len() {
        let mut c = vec![neg(vm.cd(s, d))];
        c.extend(i.timeslots_of_day(d).into_iter().map(|t| pos(vm.ct(s, t))));
        out.push(c);
    }
    out
}

/// ct↔cd linking for every session.
pub fn link_ct_cd(i: &Instance, vm: &VarMap) -> HardClauses {
    (0..i.sessions.len())
        .flat_map(|s| link_ct_cd_session(i, vm, s))
        .collect()
}

/// ct→kt clauses per session and timeslot, then kt→ct clauses per
/// curriculum and timeslot. Empty when kt variables are disabled.
pub fn link_ct_kt(i: &Instance, vm: &VarMap) -> HardClauses {
    if !vm.kt_emitted() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for s in 0..i.sessions.len() {
        let k = i.curriculum_of_session(s);
        for t in 0..i.timeslots.len() {
            out.push(vec![neg(vm.ct(s, t)), pos(vm.kt(k, t).unwrap())]);
        }
    }
    for k in 0..i.curricula.len() {
        let members = i.curriculum_sessions(k);
        for t in 0..i.timeslots.len() {
            let mut c = vec![neg(vm.kt(k, t).unwrap())];
            c.extend(members.iter().map(|&s| pos(vm.ct(s, t))));
            out.push(c);
        }
    }
    out
}

fn pair_clash(vm: &VarMap, a: SessionId, b: SessionId, n_slots: usize) -> impl Iterator<Item = Vec<Lit>> + '_ {
    (0..n_slots).map(move |t| vec![neg(vm.ct(a, t)), neg(vm.ct(b, t))])
}

/// Unordered session pairs inside each curriculum, in curriculum then list order.
fn curriculum_pairs(i: &Instance) -> Vec<(SessionId, SessionId)> {
    let mut pairs = Vec::new();
    for k in 0..i.curricula.len() {
        let members = i.curriculum_sessions(k);
        for (x, &a) in members.iter().enumerate() {
            for &b in &members[x + 1..] {
                pairs.push((a, b));
            }
        }
    }
    pairs
}

/// Sessions of one curriculum (including a course's own two sessions) never share a timeslot.
pub fn curriculum_clashes(i: &Instance, vm: &VarMap) -> HardClauses {
    curriculum_pairs(i)
        .into_iter()
        .flat_map(|(a, b)| pair_clash(vm, a, b, i.timeslots.len()))
        .collect()
}

/// Cross-curriculum course pairs with their aggregated student counts.
pub fn cross_curriculum_demand(i: &Instance) -> Vec<((CourseId, CourseId), u64)> {
    i.course_pair_demand()
        .into_iter()
        .filter(|((a, b), _)| i.courses[*a].curriculum != i.courses[*b].curriculum)
        .collect()
}

/// Soft clashes between sessions of courses students take together.
pub fn registration_clashes(i: &Instance, vm: &VarMap, opts: &EncodeOptions) -> SoftClauses {
    let mut out = Vec::new();
    for ((c1, c2), students) in cross_curriculum_demand(i) {
        let w = opts.registration_weight(students);
        for &s1 in &i.courses[c1].sessions {
            for &s2 in &i.courses[c2].sessions {
                out.extend(pair_clash(vm, s1, s2, i.timeslots.len()).map(|c| (c, w)));
            }
        }
    }
    out
}

/// Session pairs sharing a staff member that curriculum clashes do not already cover.
fn teacher_pairs(i: &Instance) -> Vec<(SessionId, SessionId)> {
    let mut pairs = Vec::new();
    for a in 0..i.sessions.len() {
        for b in a + 1..i.sessions.len() {
            if i.sessions[a].staff == i.sessions[b].staff
                && i.curriculum_of_session(a) != i.curriculum_of_session(b)
            {
                pairs.push((a, b));
            }
        }
    }
    pairs
}

/// Sessions sharing a staff member never share a timeslot. Pairs within one
/// curriculum are left to [`curriculum_clashes`], which emits identical clauses.
pub fn teacher_clashes(i: &Instance, vm: &VarMap) -> HardClauses {
    teacher_pairs(i)
        .into_iter()
        .flat_map(|(a, b)| pair_clash(vm, a, b, i.timeslots.len()))
        .collect()
}

/// No two sessions in the same room at the same timeslot.
pub fn room_clashes(i: &Instance, vm: &VarMap) -> HardClauses {
    let n = i.sessions.len();
    let mut out = Vec::with_capacity(i.rooms.len() * i.timeslots.len() * n * n.saturating_sub(1) / 2);
    for r in 0..i.rooms.len() {
        for t in 0..i.timeslots.len() {
            for a in 0..n {
                for b in a + 1..n {
                    out.push(vec![
                        neg(vm.ct(a, t)),
                        neg(vm.ct(b, t)),
                        neg(vm.cr(a, r)),
                        neg(vm.cr(b, r)),
                    ]);
                }
            }
        }
    }
    out
}

/// Soft unit `¬ct(s, t)` for every forbidden timeslot.
pub fn timeslot_unavailability(i: &Instance, vm: &VarMap, opts: &EncodeOptions) -> SoftClauses {
    let w = opts.unavailability_weight();
    let mut out = Vec::new();
    for (s, session) in i.sessions.iter().enumerate() {
        for &t in &session.forbidden {
            out.push((vec![neg(vm.ct(s, t))], w));
        }
    }
    out
}

/// Soft unit `¬cr(s, r)` for every room too small for the session.
pub fn room_capacity(i: &Instance, vm: &VarMap, opts: &EncodeOptions) -> SoftClauses {
    let mut out = Vec::new();
    for (s, session) in i.sessions.iter().enumerate() {
        for (r, room) in i.rooms.iter().enumerate() {
            if room.capacity < session.enrollment {
                let overflow = (session.enrollment - room.capacity) as u64;
                out.push((vec![neg(vm.cr(s, r))], opts.capacity_weight(overflow)));
            }
        }
    }
    out
}

fn exactly_one(
    vars: &[Var],
    vm: &mut VarMap,
    opts: &EncodeOptions,
    constraint: String,
) -> Result<HardClauses, EncodeError> {
    let lits: Vec<Lit> = vars.iter().map(|&v| pos(v)).collect();
    let scheme = opts.card_scheme.unwrap_or_else(|| CardScheme::auto(1, lits.len()));
    let mut alloc = vm.allocator();
    let clauses = encode_exactly(1, &lits, scheme, &mut alloc)?;
    vm.register_aux(&alloc, scheme, &constraint);
    Ok(clauses)
}

/// Names a per-session constraint, e.g. `room_assignment/CS202-lab`.
fn constraint_tag(i: &Instance, family: Family, s: SessionId) -> String {
    let session = &i.sessions[s];
    format!("{}/{}-{}", family.name(), i.courses[session.course].label, session.kind.name())
}

/// Each session sits in exactly one eligible room; labs are barred from non-lab rooms.
pub fn room_assignment(i: &Instance, vm: &mut VarMap, opts: &EncodeOptions) -> Result<HardClauses, EncodeError> {
    let mut out = Vec::new();
    for s in 0..i.sessions.len() {
        let eligible = i.eligible_rooms(s);
        if eligible.is_empty() {
            return Err(EncodeError::NoLabRoom(i.session_name(s)));
        }
        let vars: Vec<Var> = eligible.iter().map(|&r| vm.cr(s, r)).collect();
        let tag = constraint_tag(i, Family::RoomAssignment, s);
        out.extend(exactly_one(&vars, vm, opts, tag)?);
        if i.sessions[s].kind == SessionKind::Lab {
            for r in (0..i.rooms.len()).filter(|&r| !i.rooms[r].is_lab) {
                out.push(vec![neg(vm.cr(s, r))]);
            }
        }
    }
    Ok(out)
}

/// Each session meets in exactly one timeslot.
pub fn meeting_count(i: &Instance, vm: &mut VarMap, opts: &EncodeOptions) -> Result<HardClauses, EncodeError> {
    let mut out = Vec::new();
    for s in 0..i.sessions.len() {
        let vars: Vec<Var> = (0..i.timeslots.len()).map(|t| vm.ct(s, t)).collect();
        let tag = constraint_tag(i, Family::MeetingCount, s);
        out.extend(exactly_one(&vars, vm, opts, tag)?);
    }
    Ok(out)
}

/// A compiled instance: formula, variable map and the families of each clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Encoding {
    pub formula: WcnfFormula,
    pub varmap: VarMap,
    /// Parallel to `formula.clauses()`.
    pub families: Vec<FamilySet>,
}

impl Encoding {
    /// Indices of clauses tagged with `family`.
    pub fn clauses_of(&self, family: Family) -> impl Iterator<Item = usize> + '_ {
        self.families
            .iter()
            .enumerate()
            .filter(move |(_, fs)| fs.contains(family))
            .map(|(i, _)| i)
    }
}

fn instance_digest(i: &Instance) -> String {
    let digest = Sha256::digest(i.to_json().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Encodes every constraint family. Clause order is family order (as in
/// [`Family::ALL`]) and instance order within a family.
pub fn encode(i: &Instance, opts: &EncodeOptions) -> Result<Encoding, EncodeError> {
    let findings = validate_instance(i);
    if has_errors(&findings) {
        return Err(EncodeError::InvalidInstance(
            findings
                .into_iter()
                .filter(|f| f.severity == crate::model::Severity::Error)
                .collect(),
        ));
    }
    let mut vm = VarMap::new(i, opts.emit_kt);
    let n_slots = i.timeslots.len();

    // pairs whose curriculum clash clauses also realize a teacher clash
    let shared_staff: Vec<bool> = curriculum_pairs(i)
        .into_iter()
        .flat_map(|(a, b)| {
            let shared = i.sessions[a].staff == i.sessions[b].staff;
            std::iter::repeat_n(shared, n_slots)
        })
        .collect();

    let mut hard: Vec<(Family, HardClauses)> = vec![
        (Family::CtCdLink, link_ct_cd(i, &vm)),
        (Family::CtKtLink, link_ct_kt(i, &vm)),
        (Family::CurriculumClash, curriculum_clashes(i, &vm)),
    ];
    let registration = registration_clashes(i, &vm, opts);
    let teacher = teacher_clashes(i, &vm);
    let rooms = room_clashes(i, &vm);
    let unavailable = timeslot_unavailability(i, &vm, opts);
    let capacity = room_capacity(i, &vm, opts);
    let assignment = room_assignment(i, &mut vm, opts)?;
    let meetings = meeting_count(i, &mut vm, opts)?;

    let mut formula = WcnfFormula::new(vm.num_vars());
    formula.push_meta(format!("ttsat {}", env!("CARGO_PKG_VERSION")));
    formula.push_meta(format!("instance sha256:{}", instance_digest(i)));
    formula.push_meta(format!(
        "mode {}",
        if opts.weighted { "weighted" } else { "partial" }
    ));
    let mut families = Vec::new();

    let mut push = |lits: Vec<Lit>, weight: Weight, tags: FamilySet| -> Result<(), EncodeError> {
        formula.add(Clause::new(lits, weight)?)?;
        families.push(tags);
        Ok(())
    };

    for (family, clauses) in hard.drain(..) {
        for (idx, c) in clauses.into_iter().enumerate() {
            let mut tags = FamilySet::of(family);
            if family == Family::CurriculumClash && shared_staff[idx] {
                tags = tags.with(Family::TeacherClash);
            }
            push(c, Weight::Hard, tags)?;
        }
    }
    for (c, w) in registration {
        push(c, Weight::Soft(w), FamilySet::of(Family::RegistrationClash))?;
    }
    for c in teacher {
        push(c, Weight::Hard, FamilySet::of(Family::TeacherClash))?;
    }
    for c in rooms {
        push(c, Weight::Hard, FamilySet::of(Family::RoomClash))?;
    }
    for (c, w) in unavailable {
        push(c, Weight::Soft(w), FamilySet::of(Family::Unavailability))?;
    }
    for (c, w) in capacity {
        push(c, Weight::Soft(w), FamilySet::of(Family::RoomCapacity))?;
    }
    for c in assignment {
        push(c, Weight::Hard, FamilySet::of(Family::RoomAssignment))?;
    }
    for c in meetings {
        push(c, Weight::Hard, FamilySet::of(Family::MeetingCount))?;
    }

    Ok(Encoding {
        formula,
        varmap: vm,
        families,
    })
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
