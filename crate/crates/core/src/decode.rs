//! Turning models back into timetables, scoring them and printing them.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::encoder::{cross_curriculum_demand, EncodeOptions, VarMap};
use crate::model::{CourseId, CurriculumId, Instance, RoomId, SessionId, SessionKind, StaffId, TimeslotId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Placement {
    pub timeslot: TimeslotId,
    pub room: RoomId,
}

/// One placement per session, indexed by session id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Timetable {
    pub placements: Vec<Placement>,
}

impl Timetable {
    pub fn placement(&self, s: SessionId) -> Placement {
        self.placements[s]
    }

    /// Sessions placed in room `r` at timeslot `t`, in session order.
    pub fn occupants(&self, r: RoomId, t: TimeslotId) -> Vec<SessionId> {
        self.placements
            .iter()
            .enumerate()
            .filter(|(_, p)| p.room == r && p.timeslot == t)
            .map(|(s, _)| s)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("model has {got} variables, expected at least {expected}")]
    ModelLength { got: usize, expected: usize },
    #[error("session {session} is placed in {count} timeslots")]
    Timeslots { session: String, count: usize },
    #[error("session {session} is placed in {count} rooms")]
    Rooms { session: String, count: usize },
    #[error("day variables of session {0} disagree with its timeslot")]
    Day(String),
    #[error("curriculum variable kt({curriculum}, {timeslot}) disagrees with its sessions")]
    Curriculum { curriculum: String, timeslot: String },
}

/// Reads a timetable out of a model of the encoding. Besides exactly one
/// timeslot and room per session, the day and curriculum indicator
/// variables must agree with the timeslots chosen.
pub fn decode_timetable(i: &Instance, vm: &VarMap, model: &[bool]) -> Result<Timetable, DecodeError> {
    let expected = vm.num_semantic_vars() as usize;
    if model.len() < expected {
        return Err(DecodeError::ModelLength {
            got: model.len(),
            expected,
        });
    }
    let value = |v: u32| model[(v - 1) as usize];
    let mut placements = Vec::with_capacity(i.sessions.len());
    for s in 0..i.sessions.len() {
        let slots: Vec<TimeslotId> = (0..i.timeslots.len()).filter(|&t| value(vm.ct(s, t))).collect();
        if slots.len() != 1 {
            return Err(DecodeError::Timeslots {
                session: i.session_name(s),
                count: slots.len(),
            });
        }
        let rooms: Vec<RoomId> = (0..i.rooms.len()).filter(|&r| value(vm.cr(s, r))).collect();
        if rooms.len() != 1 {
            return Err(DecodeError::Rooms {
                session: i.session_name(s),
                count: rooms.len(),
            });
        }
        let day = i.timeslots[slots[0]].day;
        if (0..i.days.len()).any(|d| value(vm.cd(s, d)) != (d == day)) {
            return Err(DecodeError::Day(i.session_name(s)));
        }
        placements.push(Placement {
            timeslot: slots[0],
            room: rooms[0],
        });
    }
    if vm.kt_emitted() {
        for k in 0..i.curricula.len() {
            let members = i.curriculum_sessions(k);
            for t in 0..i.timeslots.len() {
                let used = members.iter().any(|&s| placements[s].timeslot == t);
                if value(vm.kt(k, t).expect("kt emitted")) != used {
                    return Err(DecodeError::Curriculum {
                        curriculum: i.curricula[k].label.clone(),
                        timeslot: i.timeslots[t].label.clone(),
                    });
                }
            }
        }
    }
    Ok(Timetable { placements })
}

/// A soft constraint the timetable violates, with the weight it costs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SoftViolation {
    Registration {
        courses: (CourseId, CourseId),
        sessions: (SessionId, SessionId),
        timeslot: TimeslotId,
        weight: u64,
    },
    Unavailable {
        session: SessionId,
        timeslot: TimeslotId,
        weight: u64,
    },
    Capacity {
        session: SessionId,
        room: RoomId,
        weight: u64,
    },
}

impl SoftViolation {
    pub fn weight(&self) -> u64 {
        match *self {
            SoftViolation::Registration { weight, .. }
            | SoftViolation::Unavailable { weight, .. }
            | SoftViolation::Capacity { weight, .. } => weight,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ViolationReport {
    pub violations: Vec<SoftViolation>,
    pub total: u64,
}

impl ViolationReport {
    pub fn describe(&self, i: &Instance) -> Vec<String> {
        self.violations
            .iter()
            .map(|v| match *v {
                SoftViolation::Registration {
                    sessions: (a, b),
                    timeslot,
                    weight,
                    ..
                } => format!(
                    "registration clash: {} and {} share {} (weight {weight})",
                    i.session_name(a),
                    i.session_name(b),
                    i.timeslots[timeslot].label
                ),
                SoftViolation::Unavailable {
                    session,
                    timeslot,
                    weight,
                } => format!(
                    "unavailable timeslot: {} in {} (weight {weight})",
                    i.session_name(session),
                    i.timeslots[timeslot].label
                ),
                SoftViolation::Capacity { session, room, weight } => format!(
                    "room too small: {} ({} students) in {} ({} seats) (weight {weight})",
                    i.session_name(session),
                    i.sessions[session].enrollment,
                    i.rooms[room].label,
                    i.rooms[room].capacity
                ),
            })
            .collect()
    }
}

/// Scores a timetable against the soft constraints under `opts`. For a
/// decoded model the total equals the model's Max-SAT cost.
pub fn compute_cost(i: &Instance, tt: &Timetable, opts: &EncodeOptions) -> ViolationReport {
    let mut violations = Vec::new();
    for ((c1, c2), students) in cross_curriculum_demand(i) {
        for &s1 in &i.courses[c1].sessions {
            for &s2 in &i.courses[c2].sessions {
                let t = tt.placements[s1].timeslot;
                if t == tt.placements[s2].timeslot {
                    violations.push(SoftViolation::Registration {
                        courses: (c1, c2),
                        sessions: (s1, s2),
                        timeslot: t,
                        weight: opts.registration_weight(students),
                    });
                }
            }
        }
    }
    for (s, session) in i.sessions.iter().enumerate() {
        let t = tt.placements[s].timeslot;
        if session.forbidden.contains(&t) {
            violations.push(SoftViolation::Unavailable {
                session: s,
                timeslot: t,
                weight: opts.unavailability_weight(),
            });
        }
    }
    for (s, session) in i.sessions.iter().enumerate() {
        let r = tt.placements[s].room;
        let capacity = i.rooms[r].capacity;
        if capacity < session.enrollment {
            violations.push(SoftViolation::Capacity {
                session: s,
                room: r,
                weight: opts.capacity_weight((session.enrollment - capacity) as u64),
            });
        }
    }
    let total = violations.iter().map(SoftViolation::weight).sum();
    ViolationReport { violations, total }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HardViolation {
    RoomClash {
        room: RoomId,
        timeslot: TimeslotId,
        sessions: (SessionId, SessionId),
    },
    CurriculumClash {
        curriculum: CurriculumId,
        timeslot: TimeslotId,
        sessions: (SessionId, SessionId),
    },
    TeacherClash {
        staff: StaffId,
        timeslot: TimeslotId,
        sessions: (SessionId, SessionId),
    },
    LabRoom {
        session: SessionId,
        room: RoomId,
    },
    OutOfRange {
        session: SessionId,
    },
}

impl HardViolation {
    pub fn describe(&self, i: &Instance) -> String {
        match *self {
            HardViolation::RoomClash {
                room,
                timeslot,
                sessions: (a, b),
            } => format!(
                "room clash: {} and {} both in {} at {}",
                i.session_name(a),
                i.session_name(b),
                i.rooms[room].label,
                i.timeslots[timeslot].label
            ),
            HardViolation::CurriculumClash {
                curriculum,
                timeslot,
                sessions: (a, b),
            } => format!(
                "curriculum clash in {}: {} and {} both at {}",
                i.curricula[curriculum].label,
                i.session_name(a),
                i.session_name(b),
                i.timeslots[timeslot].label
            ),
            HardViolation::TeacherClash {
                staff,
                timeslot,
                sessions: (a, b),
            } => format!(
                "{} teaches {} and {} both at {}",
                i.staff[staff].label,
                i.session_name(a),
                i.session_name(b),
                i.timeslots[timeslot].label
            ),
            HardViolation::LabRoom { session, room } => format!(
                "lab {} placed in non-lab room {}",
                i.session_name(session),
                i.rooms[room].label
            ),
            HardViolation::OutOfRange { session } => {
                format!("session {} has an out-of-range placement", i.session_name(session))
            }
        }
    }
}

/// Lists every hard constraint the timetable breaks; empty means feasible.
pub fn check_hard(i: &Instance, tt: &Timetable) -> Vec<HardViolation> {
    let mut out = Vec::new();
    let n = i.sessions.len().min(tt.placements.len());
    let in_range =
        |s: SessionId| tt.placements[s].timeslot < i.timeslots.len() && tt.placements[s].room < i.rooms.len();
    for s in 0..n {
        if !in_range(s) {
            out.push(HardViolation::OutOfRange { session: s });
        }
    }
    if !out.is_empty() {
        return out;
    }
    for a in 0..n {
        let pa = tt.placements[a];
        if i.sessions[a].kind == SessionKind::Lab && !i.rooms[pa.room].is_lab {
            out.push(HardViolation::LabRoom {
                session: a,
                room: pa.room,
            });
        }
        for b in a + 1..n {
            let pb = tt.placements[b];
            if pa.timeslot != pb.timeslot {
                continue;
            }
            let sessions = (a, b);
            let timeslot = pa.timeslot;
            if pa.room == pb.room {
                out.push(HardViolation::RoomClash {
                    room: pa.room,
                    timeslot,
                    sessions,
                });
            }
            let k = i.curriculum_of_session(a);
            if k == i.curriculum_of_session(b) {
                out.push(HardViolation::CurriculumClash {
                    curriculum: k,
                    timeslot,
                    sessions,
                });
            }
            if i.sessions[a].staff == i.sessions[b].staff {
                out.push(HardViolation::TeacherClash {
                    staff: i.sessions[a].staff,
                    timeslot,
                    sessions,
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RenderFormat {
    #[default]
    Text,
    Csv,
}

impl std::str::FromStr for RenderFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(RenderFormat::Text),
            "csv" => Ok(RenderFormat::Csv),
            other => Err(format!("unknown format `{other}` (expected text or csv)")),
        }
    }
}

impl fmt::Display for RenderFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RenderFormat::Text => "text",
            RenderFormat::Csv => "csv",
        })
    }
}

const CELL_SEPARATOR: &str = "; ";

fn grid(i: &Instance, tt: &Timetable) -> Vec<Vec<String>> {
    (0..i.rooms.len())
        .map(|r| {
            (0..i.timeslots.len())
                .map(|t| {
                    tt.occupants(r, t)
                        .into_iter()
                        .map(|s| i.session_short_name(s))
                        .collect::<Vec<_>>()
                        .join(CELL_SEPARATOR)
                })
                .collect()
        })
        .collect()
}

/// Room-by-timeslot grid. Cells name the sessions in them, e.g. `M271 lect.`.
pub fn render_timetable(i: &Instance, tt: &Timetable, format: RenderFormat) -> String {
    let cells = grid(i, tt);
    match format {
        RenderFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["room".to_string()];
            header.extend(i.timeslots.iter().map(|t| t.label.clone()));
            w.write_record(&header).expect("write to memory");
            for (r, row) in cells.iter().enumerate() {
                let mut record = vec![i.rooms[r].label.clone()];
                record.extend(row.iter().cloned());
                w.write_record(&record).expect("write to memory");
            }
            String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 input")
        }
        RenderFormat::Text => {
            let mut rows: Vec<Vec<String>> = Vec::with_capacity(cells.len() + 2);
            let mut days = vec![String::new()];
            let mut slots = vec![String::new()];
            for (t, slot) in i.timeslots.iter().enumerate() {
                let first_of_day = t == 0 || i.timeslots[t - 1].day != slot.day;
                days.push(if first_of_day {
                    i.days[slot.day].label.clone()
                } else {
                    String::new()
                });
                slots.push(slot.label.clone());
            }
            rows.push(days);
            rows.push(slots);
            for (r, row) in cells.into_iter().enumerate() {
                let mut line = vec![i.rooms[r].label.clone()];
                line.extend(row);
                rows.push(line);
            }
            let widths: Vec<usize> = (0..rows[0].len())
                .map(|c| rows.iter().map(|row| row[c].chars().count()).max().unwrap_or(0))
                .collect();
            let mut out = String::new();
            for row in rows {
                let line: Vec<String> = row
                    .iter()
                    .zip(&widths)
                    .map(|(cell, &w)| format!("{cell:<w$}"))
                    .collect();
                out.push_str(line.join(" | ").trim_end());
                out.push('\n');
            }
            out
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TimetableParseError {
    #[error("malformed CSV: {0}")]
    Csv(String),
    #[error("header must be `room` followed by the timeslot labels in order")]
    Header,
    #[error("unknown room `{0}`")]
    UnknownRoom(String),
    #[error("room `{0}` appears twice")]
    DuplicateRoom(String),
    #[error("row for room `{room}` has {got} cells, expected {expected}")]
    RowLength { room: String, got: usize, expected: usize },
    #[error("unknown session `{0}`")]
    UnknownSession(String),
    #[error("session `{0}` is placed more than once")]
    DuplicateSession(String),
    #[error("session `{0}` is not placed")]
    MissingSession(String),
}

/// Reads back the CSV produced by [`render_timetable`]. Every session must
/// appear exactly once; rooms may be omitted only if they hold nothing.
pub fn parse_timetable_csv(i: &Instance, text: &str) -> Result<Timetable, TimetableParseError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| TimetableParseError::Csv(e.to_string()))?
        .clone();
    let expected_header = std::iter::once("room").chain(i.timeslots.iter().map(|t| t.label.as_str()));
    if !header.iter().eq(expected_header) {
        return Err(TimetableParseError::Header);
    }
    let rooms: HashMap<&str, RoomId> = i.rooms.iter().enumerate().map(|(r, x)| (x.label.as_str(), r)).collect();
    let sessions: HashMap<String, SessionId> = (0..i.sessions.len()).map(|s| (i.session_short_name(s), s)).collect();

    let mut seen_rooms = vec![false; i.rooms.len()];
    let mut placements: Vec<Option<Placement>> = vec![None; i.sessions.len()];
    for record in reader.records() {
        let record = record.map_err(|e| TimetableParseError::Csv(e.to_string()))?;
        let label = record.get(0).unwrap_or("");
        let &r = rooms
            .get(label)
            .ok_or_else(|| TimetableParseError::UnknownRoom(label.to_string()))?;
        if std::mem::replace(&mut seen_rooms[r], true) {
            return Err(TimetableParseError::DuplicateRoom(label.to_string()));
        }
        if record.len() != i.timeslots.len() + 1 {
            return Err(TimetableParseError::RowLength {
                room: label.to_string(),
                got: record.len(),
                expected: i.timeslots.len() + 1,
            });
        }
        for (t, cell) in record.iter().skip(1).enumerate() {
            for name in cell.split(';').map(str::trim).filter(|n| !n.is_empty()) {
                let &s = sessions
                    .get(name)
                    .ok_or_else(|| TimetableParseError::UnknownSession(name.to_string()))?;
                if placements[s].replace(Placement { timeslot: t, room: r }).is_some() {
                    return Err(TimetableParseError::DuplicateSession(name.to_string()));
                }
            }
        }
    }
    let placements = placements
        .into_iter()
        .enumerate()
        .map(|(s, p)| p.ok_or_else(|| TimetableParseError::MissingSession(i.session_short_name(s))))
        .collect::<Result<_, _>>()?;
    Ok(Timetable { placements })
}
