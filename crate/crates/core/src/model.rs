//! Timetabling instances: data model, JSON file format and semantic checks.
//!
//! Every course has exactly two weekly sessions: a lecture and a second
//! meeting that is either a section or a lab. Sessions are the schedulable
//! unit; session `2c` is the lecture of course `c` and `2c + 1` its second
//! meeting.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type DayId = usize;
pub type TimeslotId = usize;
pub type RoomId = usize;
pub type StaffId = usize;
pub type CourseId = usize;
pub type SessionId = usize;
pub type CurriculumId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Day {
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Timeslot {
    pub label: String,
    pub day: DayId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Room {
    pub label: String,
    pub capacity: u32,
    pub is_lab: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Staff {
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SessionKind {
    Lecture,
    Section,
    Lab,
}

impl SessionKind {
    pub fn name(self) -> &'static str {
        match self {
            SessionKind::Lecture => "lecture",
            SessionKind::Section => "section",
            SessionKind::Lab => "lab",
        }
    }

    /// Abbreviation used in rendered timetables.
    pub fn short(self) -> &'static str {
        match self {
            SessionKind::Lecture => "lect.",
            SessionKind::Section => "sec.",
            SessionKind::Lab => "lab",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Session {
    pub course: CourseId,
    pub kind: SessionKind,
    pub staff: StaffId,
    pub enrollment: u32,
    pub forbidden: BTreeSet<TimeslotId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Course {
    pub label: String,
    pub name: Option<String>,
    pub curriculum: CurriculumId,
    /// Lecture first, then the section or lab.
    pub sessions: [SessionId; 2],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Curriculum {
    pub label: String,
    pub courses: Vec<CourseId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegistrationGroup {
    pub courses: Vec<CourseId>,
    pub students: u32,
}

/// A complete timetabling problem. Cross references are indices into the
/// sibling vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub days: Vec<Day>,
    pub timeslots: Vec<Timeslot>,
    pub rooms: Vec<Room>,
    pub staff: Vec<Staff>,
    pub courses: Vec<Course>,
    pub sessions: Vec<Session>,
    pub curricula: Vec<Curriculum>,
    pub registrations: Vec<RegistrationGroup>,
}

impl Instance {
    /// `CS101/lecture` style identifier.
    pub fn session_name(&self, s: SessionId) -> String {
        let session = &self.sessions[s];
        format!("{}/{}", self.courses[session.course].label, session.kind.name())
    }

    /// `CS101 lect.` style cell text.
    pub fn session_short_name(&self, s: SessionId) -> String {
        let session = &self.sessions[s];
        format!("{} {}", self.courses[session.course].label, session.kind.short())
    }

    pub fn curriculum_of_session(&self, s: SessionId) -> CurriculumId {
        self.courses[self.sessions[s].course].curriculum
    }

    /// Sessions of all courses in curriculum `k`, in course order.
    pub fn curriculum_sessions(&self, k: CurriculumId) -> Vec<SessionId> {
        self.curricula[k]
            .courses
            .iter()
            .flat_map(|&c| self.courses[c].sessions)
            .collect()
    }

    pub fn timeslots_of_day(&self, d: DayId) -> Vec<TimeslotId> {
        (0..self.timeslots.len())
            .filter(|&t| self.timeslots[t].day == d)
            .collect()
    }

    /// Rooms a session may occupy: lab rooms for labs, every room otherwise.
    pub fn eligible_rooms(&self, s: SessionId) -> Vec<RoomId> {
        let lab = self.sessions[s].kind == SessionKind::Lab;
        (0..self.rooms.len())
            .filter(|&r| !lab || self.rooms[r].is_lab)
            .collect()
    }

    /// Student counts per unordered course pair `(a, b)`, `a < b`, summed over
    /// all registration groups. Pairs inside one curriculum are included.
    pub fn course_pair_demand(&self) -> Vec<((CourseId, CourseId), u64)> {
        let mut demand: std::collections::BTreeMap<(CourseId, CourseId), u64> = Default::default();
        for g in &self.registrations {
            let courses: BTreeSet<CourseId> = g.courses.iter().copied().collect();
            let courses: Vec<CourseId> = courses.into_iter().collect();
            for (i, &a) in courses.iter().enumerate() {
                for &b in &courses[i + 1..] {
                    *demand.entry((a, b)).or_default() += g.students as u64;
                }
            }
        }
        demand.into_iter().collect()
    }

    /// Parses the JSON instance format.
    pub fn from_json(text: &str) -> Result<Instance, InstanceError> {
        parse_instance(text)
    }

    /// Serializes to the JSON instance format (pretty-printed, trailing newline).
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&InstanceFile::from(self))
            .expect("instance serialization cannot fail");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("syntax error at line {line}, column {column}: {msg}")]
    Syntax { line: usize, column: usize, msg: String },
    #[error("unknown {kind} `{label}`{context}")]
    UnknownReference {
        kind: &'static str,
        label: String,
        context: String,
    },
    #[error("duplicate {kind} label `{label}`")]
    DuplicateLabel { kind: &'static str, label: String },
    #[error("instance needs at least one {0}")]
    Empty(&'static str),
    #[error("{0}")]
    Invalid(String),
}

// ---- file format ---------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    days: Vec<String>,
    timeslots: Vec<TimeslotEntry>,
    rooms: Vec<RoomEntry>,
    staff: Vec<String>,
    courses: Vec<CourseEntry>,
    curricula: Vec<String>,
    #[serde(default)]
    registrations: Vec<RegistrationEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TimeslotEntry {
    label: String,
    day: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RoomEntry {
    label: String,
    capacity: u32,
    lab: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CourseEntry {
    label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    curriculum: String,
    lecture: LectureEntry,
    second: SecondEntry,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LectureEntry {
    staff: String,
    enrollment: u32,
    #[serde(default)]
    forbidden: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum SecondKind {
    Section,
    Lab,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SecondEntry {
    kind: SecondKind,
    staff: String,
    enrollment: u32,
    #[serde(default)]
    forbidden: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegistrationEntry {
    courses: Vec<String>,
    students: u32,
}

impl From<&Instance> for InstanceFile {
    fn from(i: &Instance) -> Self {
        let forbidden = |s: &Session| -> Vec<String> {
            s.forbidden
                .iter()
                .map(|&t| i.timeslots[t].label.clone())
                .collect()
        };
        InstanceFile {
            days: i.days.iter().map(|d| d.label.clone()).collect(),
            timeslots: i
                .timeslots
                .iter()
                .map(|t| TimeslotEntry {
                    label: t.label.clone(),
                    day: i.days[t.day].label.clone(),
                })
                .collect(),
            rooms: i
                .rooms
                .iter()
                .map(|r| RoomEntry {
                    label: r.label.clone(),
                    capacity: r.capacity,
                    lab: r.is_lab,
                })
                .collect(),
            staff: i.staff.iter().map(|s| s.label.clone()).collect(),
            courses: i
                .courses
                .iter()
                .map(|c| {
                    let lecture = &i.sessions[c.sessions[0]];
                    let second = &i.sessions[c.sessions[1]];
                    CourseEntry {
                        label: c.label.clone(),
                        name: c.name.clone(),
                        curriculum: i.curricula[c.curriculum].label.clone(),
                        lecture: LectureEntry {
                            staff: i.staff[lecture.staff].label.clone(),
                            enrollment: lecture.enrollment,
                            forbidden: forbidden(lecture),
                        },
                        second: SecondEntry {
                            kind: if second.kind == SessionKind::Lab {
                                SecondKind::Lab
                            } else {
                                SecondKind::Section
                            },
                            staff: i.staff[second.staff].label.clone(),
                            enrollment: second.enrollment,
                            forbidden: forbidden(second),
                        },
                    }
                })
                .collect(),
            curricula: i.curricula.iter().map(|k| k.label.clone()).collect(),
            registrations: i
                .registrations
                .iter()
                .map(|g| RegistrationEntry {
                    courses: g.courses.iter().map(|&c| i.courses[c].label.clone()).collect(),
                    students: g.students,
                })
                .collect(),
        }
    }
}

/// Label → index table that rejects duplicates.
struct Labels<'a> {
    kind: &'static str,
    index: HashMap<&'a str, usize>,
}

impl<'a> Labels<'a> {
    fn build(kind: &'static str, labels: impl Iterator<Item = &'a str>) -> Result<Self, InstanceError> {
        let mut index = HashMap::new();
        for (i, label) in labels.enumerate() {
            if index.insert(label, i).is_some() {
                return Err(InstanceError::DuplicateLabel {
                    kind,
                    label: label.to_string(),
                });
            }
        }
        Ok(Labels { kind, index })
    }

    fn resolve(&self, label: &str, context: impl fmt::Display) -> Result<usize, InstanceError> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| InstanceError::UnknownReference {
                kind: self.kind,
                label: label.to_string(),
                context: format!(" referenced by {context}"),
            })
    }
}

/// Parses and cross-links an instance file. Ids follow file order.
pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| InstanceError::Syntax {
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })?;
    build_instance(&file)
}

fn build_instance(file: &InstanceFile) -> Result<Instance, InstanceError> {
    if file.days.is_empty() {
        return Err(InstanceError::Empty("day"));
    }
    if file.timeslots.is_empty() {
        return Err(InstanceError::Empty("timeslot"));
    }
    if file.rooms.is_empty() {
        return Err(InstanceError::Empty("room"));
    }

    let days = Labels::build("day", file.days.iter().map(String::as_str))?;
    let slots = Labels::build("timeslot", file.timeslots.iter().map(|t| t.label.as_str()))?;
    Labels::build("room", file.rooms.iter().map(|r| r.label.as_str()))?;
    let staff = Labels::build("staff member", file.staff.iter().map(String::as_str))?;
    let courses = Labels::build("course", file.courses.iter().map(|c| c.label.as_str()))?;
    let curricula = Labels::build("curriculum", file.curricula.iter().map(String::as_str))?;

    let timeslots = file
        .timeslots
        .iter()
        .map(|t| {
            Ok(Timeslot {
                label: t.label.clone(),
                day: days.resolve(&t.day, format_args!("timeslot `{}`", t.label))?,
            })
        })
        .collect::<Result<Vec<_>, InstanceError>>()?;

    let mut out_courses = Vec::with_capacity(file.courses.len());
    let mut sessions = Vec::with_capacity(2 * file.courses.len());
    let mut members: Vec<Vec<CourseId>> = vec![Vec::new(); file.curricula.len()];
    for (cid, c) in file.courses.iter().enumerate() {
        let curriculum = curricula.resolve(&c.curriculum, format_args!("course `{}`", c.label))?;
        members[curriculum].push(cid);
        let forbidden = |labels: &[String], what: &str| -> Result<BTreeSet<TimeslotId>, InstanceError> {
            labels
                .iter()
                .map(|t| slots.resolve(t, format_args!("{what} of course `{}`", c.label)))
                .collect()
        };
        sessions.push(Session {
            course: cid,
            kind: SessionKind::Lecture,
            staff: staff.resolve(&c.lecture.staff, format_args!("lecture of course `{}`", c.label))?,
            enrollment: c.lecture.enrollment,
            forbidden: forbidden(&c.lecture.forbidden, "lecture")?,
        });
        let kind = match c.second.kind {
            SecondKind::Section => SessionKind::Section,
            SecondKind::Lab => SessionKind::Lab,
        };
        sessions.push(Session {
            course: cid,
            kind,
            staff: staff.resolve(&c.second.staff, format_args!("{} of course `{}`", kind.name(), c.label))?,
            enrollment: c.second.enrollment,
            forbidden: forbidden(&c.second.forbidden, kind.name())?,
        });
        out_courses.push(Course {
            label: c.label.clone(),
            name: c.name.clone(),
            curriculum,
            sessions: [2 * cid, 2 * cid + 1],
        });
    }

    let registrations = file
        .registrations
        .iter()
        .enumerate()
        .map(|(gi, g)| {
            let courses = g
                .courses
                .iter()
                .map(|c| courses.resolve(c, format_args!("registration group #{}", gi + 1)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(RegistrationGroup {
                courses,
                students: g.students,
            })
        })
        .collect::<Result<Vec<_>, InstanceError>>()?;

    Ok(Instance {
        days: file.days.iter().map(|d| Day { label: d.clone() }).collect(),
        timeslots,
        rooms: file
            .rooms
            .iter()
            .map(|r| Room {
                label: r.label.clone(),
                capacity: r.capacity,
                is_lab: r.lab,
            })
            .collect(),
        staff: file.staff.iter().map(|s| Staff { label: s.clone() }).collect(),
        courses: out_courses,
        sessions,
        curricula: file
            .curricula
            .iter()
            .zip(members)
            .map(|(label, courses)| Curriculum {
                label: label.clone(),
                courses,
            })
            .collect(),
        registrations,
    })
}

// ---- validation -------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{tag}: {}", self.message)
    }
}

pub fn has_errors(findings: &[Finding]) -> bool {
    findings.iter().any(|f| f.severity == Severity::Error)
}

fn duplicate_labels<'a>(kind: &str, labels: impl Iterator<Item = &'a str>, out: &mut Vec<Finding>) {
    let mut seen = BTreeSet::new();
    for l in labels {
        if !seen.insert(l) {
            out.push(Finding {
                severity: Severity::Error,
                message: format!("duplicate {kind} label `{l}`"),
            });
        }
    }
}

/// Checks structural invariants (errors) and satisfiability red flags (warnings).
pub fn validate_instance(i: &Instance) -> Vec<Finding> {
    let mut out = Vec::new();
    let mut error = |msg: String| {
        out.push(Finding {
            severity: Severity::Error,
            message: msg,
        })
    };
    let n_days = i.days.len();
    let n_slots = i.timeslots.len();

    if i.days.is_empty() {
        error("instance needs at least one day".into());
    }
    if i.rooms.is_empty() {
        error("instance needs at least one room".into());
    }
    for t in &i.timeslots {
        if t.day >= n_days {
            error(format!("timeslot `{}` refers to missing day #{}", t.label, t.day));
        }
    }
    for (d, day) in i.days.iter().enumerate() {
        if !i.timeslots.iter().any(|t| t.day == d) {
            error(format!("day `{}` has no timeslots", day.label));
        }
    }
    if i.sessions.len() != 2 * i.courses.len() {
        error(format!(
            "{} sessions for {} courses; every course needs exactly two",
            i.sessions.len(),
            i.courses.len()
        ));
    }
    for (c, course) in i.courses.iter().enumerate() {
        if course.curriculum >= i.curricula.len() {
            error(format!("course `{}` refers to missing curriculum", course.label));
        }
        for (slot, &s) in course.sessions.iter().enumerate() {
            let Some(session) = i.sessions.get(s) else {
                error(format!("course `{}` refers to missing session #{s}", course.label));
                continue;
            };
            if session.course != c {
                error(format!("session #{s} does not point back to course `{}`", course.label));
            }
            let lecture_slot = slot == 0;
            if lecture_slot != (session.kind == SessionKind::Lecture) {
                error(format!(
                    "course `{}` must have one lecture followed by a section or lab",
                    course.label
                ));
            }
        }
    }
    for (s, session) in i.sessions.iter().enumerate() {
        if session.staff >= i.staff.len() {
            error(format!("session #{s} refers to missing staff member"));
        }
        if let Some(&t) = session.forbidden.iter().find(|&&t| t >= n_slots) {
            error(format!("session #{s} forbids missing timeslot #{t}"));
        }
    }
    let mut membership = vec![0usize; i.courses.len()];
    for k in &i.curricula {
        if k.courses.is_empty() {
            error(format!("curriculum `{}` has no courses", k.label));
        }
        for &c in &k.courses {
            if c < membership.len() {
                membership[c] += 1;
            } else {
                error(format!("curriculum `{}` refers to missing course #{c}", k.label));
            }
        }
    }
    for (c, &count) in membership.iter().enumerate() {
        let declared = i.courses[c].curriculum;
        let listed = i
            .curricula
            .get(declared)
            .is_some_and(|k| k.courses.contains(&c));
        if count != 1 || !listed {
            error(format!(
                "course `{}` must belong to exactly one curriculum",
                i.courses[c].label
            ));
        }
    }
    for (gi, g) in i.registrations.iter().enumerate() {
        let distinct: BTreeSet<_> = g.courses.iter().collect();
        if distinct.len() != g.courses.len() {
            error(format!("registration group #{} lists a course twice", gi + 1));
        }
        if g.courses.len() < 2 {
            error(format!("registration group #{} needs at least two courses", gi + 1));
        }
        if g.courses.iter().any(|&c| c >= i.courses.len()) {
            error(format!("registration group #{} refers to a missing course", gi + 1));
        }
        if g.students == 0 {
            error(format!("registration group #{} has no students", gi + 1));
        }
    }
    let has_lab_room = i.rooms.iter().any(|r| r.is_lab);
    if !has_lab_room && i.sessions.iter().any(|s| s.kind == SessionKind::Lab) {
        error("lab sessions exist but there is no lab room".into());
    }
    duplicate_labels("day", i.days.iter().map(|d| d.label.as_str()), &mut out);
    duplicate_labels("timeslot", i.timeslots.iter().map(|t| t.label.as_str()), &mut out);
    duplicate_labels("room", i.rooms.iter().map(|r| r.label.as_str()), &mut out);
    duplicate_labels("staff member", i.staff.iter().map(|s| s.label.as_str()), &mut out);
    duplicate_labels("course", i.courses.iter().map(|c| c.label.as_str()), &mut out);
    duplicate_labels("curriculum", i.curricula.iter().map(|k| k.label.as_str()), &mut out);

    if has_errors(&out) {
        return out;
    }

    // warnings: pigeonhole-style red flags for the hard clauses
    let mut warn = |msg: String| {
        out.push(Finding {
            severity: Severity::Warning,
            message: msg,
        })
    };
    if n_slots < 2 && !i.courses.is_empty() {
        warn(format!(
            "only {n_slots} timeslot exists; each course needs two distinct timeslots"
        ));
    }
    for k in &i.curricula {
        let needed = 2 * k.courses.len();
        if needed > n_slots {
            warn(format!(
                "curriculum `{}` needs {needed} distinct timeslots, only {n_slots} exist",
                k.label
            ));
        }
    }
    for (st, member) in i.staff.iter().enumerate() {
        let load = i.sessions.iter().filter(|s| s.staff == st).count();
        if load > n_slots {
            warn(format!(
                "staff member `{}` teaches {load} sessions but only {n_slots} timeslots exist",
                member.label
            ));
        }
    }
    let lab_rooms = i.rooms.iter().filter(|r| r.is_lab).count();
    let labs = i.sessions.iter().filter(|s| s.kind == SessionKind::Lab).count();
    if labs > lab_rooms * n_slots {
        warn(format!(
            "{labs} lab sessions but only {} lab room slots",
            lab_rooms * n_slots
        ));
    }
    if i.sessions.len() > i.rooms.len() * n_slots {
        warn(format!(
            "{} sessions but only {} room slots",
            i.sessions.len(),
            i.rooms.len() * n_slots
        ));
    }
    for s in 0..i.sessions.len() {
        if n_slots > 0 && i.sessions[s].forbidden.len() == n_slots {
            warn(format!("session {}: all slots soft-forbidden", i.session_name(s)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
        "days": ["mon"],
        "timeslots": [{"label": "m1", "day": "mon"}, {"label": "m2", "day": "mon"}],
        "rooms": [{"label": "r1", "capacity": 30, "lab": true}],
        "staff": ["ann", "bob"],
        "courses": [{
            "label": "C1",
            "curriculum": "k1",
            "lecture": {"staff": "ann", "enrollment": 20, "forbidden": ["m1"]},
            "second": {"kind": "lab", "staff": "bob", "enrollment": 20}
        }],
        "curricula": ["k1"],
        "registrations": []
    }"#;

    #[test]
    fn parses_small_instance() {
        let i = parse_instance(SMALL).unwrap();
        assert_eq!(i.sessions.len(), 2);
        assert_eq!(i.sessions[0].forbidden, BTreeSet::from([0]));
        assert_eq!(i.sessions[1].kind, SessionKind::Lab);
        assert_eq!(i.curricula[0].courses, vec![0]);
        assert_eq!(i.session_name(1), "C1/lab");
        assert_eq!(i.session_short_name(0), "C1 lect.");
        assert!(validate_instance(&i).is_empty());
    }

    #[test]
    fn zero_rooms() {
        let text = SMALL.replace(r#"[{"label": "r1", "capacity": 30, "lab": true}]"#, "[]");
        let err = parse_instance(&text).unwrap_err();
        assert_eq!(err, InstanceError::Empty("room"));
        assert!(err.to_string().contains("at least one room"));
    }

    #[test]
    fn dangling_day() {
        let text = SMALL.replace(r#""label": "m2", "day": "mon""#, r#""label": "m2", "day": "tue""#);
        let err = parse_instance(&text).unwrap_err();
        assert!(matches!(&err, InstanceError::UnknownReference { kind: "day", label, .. } if label == "tue"));
        assert!(err.to_string().contains("tue"));
    }

    #[test]
    fn duplicate_label() {
        let text = SMALL.replace(r#"["ann", "bob"]"#, r#"["ann", "ann"]"#);
        assert!(matches!(
            parse_instance(&text),
            Err(InstanceError::DuplicateLabel { kind: "staff member", .. })
        ));
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_instance("{\n  \"days\": [,]\n}").unwrap_err();
        assert!(matches!(err, InstanceError::Syntax { line: 2, .. }));
    }

    #[test]
    fn all_slots_forbidden_warns() {
        let text = SMALL.replace(r#""forbidden": ["m1"]"#, r#""forbidden": ["m1", "m2"]"#);
        let findings = validate_instance(&parse_instance(&text).unwrap());
        assert_eq!(findings.len(), 1);
        assert_eq!(findings[0].severity, Severity::Warning);
        assert!(findings[0].message.contains("all slots soft-forbidden"));
    }

    #[test]
    fn single_timeslot_is_only_a_warning() {
        let text = SMALL.replace(r#", {"label": "m2", "day": "mon"}"#, "");
        let findings = validate_instance(&parse_instance(&text).unwrap());
        assert!(!has_errors(&findings));
        assert!(findings.iter().any(|f| f.message.contains("two distinct timeslots")));
    }

    #[test]
    fn lab_without_lab_room_is_an_error() {
        let text = SMALL.replace(r#""lab": true"#, r#""lab": false"#);
        let findings = validate_instance(&parse_instance(&text).unwrap());
        assert!(has_errors(&findings));
    }

    #[test]
    fn registration_needs_two_courses() {
        let text = SMALL.replace(r#""registrations": []"#, r#""registrations": [{"courses": ["C1"], "students": 3}]"#);
        let findings = validate_instance(&parse_instance(&text).unwrap());
        assert!(has_errors(&findings));
    }

    #[test]
    fn json_round_trip() {
        let i = parse_instance(SMALL).unwrap();
        assert_eq!(parse_instance(&i.to_json()).unwrap(), i);
    }
}
