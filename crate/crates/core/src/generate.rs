//! Seeded random instance generator for tests and benchmarks.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{
    Course, Curriculum, Day, Instance, RegistrationGroup, Room, Session, SessionKind, Staff, Timeslot,
};

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub days: usize,
    pub slots_per_day: usize,
    pub rooms: usize,
    pub courses: usize,
    pub curricula: usize,
    /// Probability that a given course pair is co-registered.
    pub overlap_density: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("parameter `{0}` must be positive")]
    NotPositive(&'static str),
    #[error("{curricula} curricula cannot be filled from {courses} courses")]
    TooManyCurricula { curricula: usize, courses: usize },
    #[error("overlap density {0} is outside [0, 1]")]
    Density(f64),
}

/// Generates an instance that passes [`crate::model::validate_instance`]
/// without errors. The result depends only on `seed` and `params`.
///
/// The last room is always a lab so that lab sessions have somewhere to go.
/// Forbidden timeslots are drawn per course and apply to its lecture.
pub fn gen_random_instance(seed: u64, params: &GenParams) -> Result<Instance, GenError> {
    for (name, v) in [
        ("days", params.days),
        ("slots_per_day", params.slots_per_day),
        ("rooms", params.rooms),
        ("courses", params.courses),
        ("curricula", params.curricula),
    ] {
        if v == 0 {
            return Err(GenError::NotPositive(name));
        }
    }
    if params.curricula > params.courses {
        return Err(GenError::TooManyCurricula {
            curricula: params.curricula,
            courses: params.courses,
        });
    }
    if !(0.0..=1.0).contains(&params.overlap_density) {
        return Err(GenError::Density(params.overlap_density));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_slots = params.days * params.slots_per_day;

    let days = (0..params.days)
        .map(|d| Day {
            label: format!("d{}", d + 1),
        })
        .collect();
    let timeslots = (0..n_slots)
        .map(|t| Timeslot {
            label: format!("t{}", t + 1),
            day: t / params.slots_per_day,
        })
        .collect();
    let rooms = (0..params.rooms)
        .map(|r| {
            let is_lab = r + 1 == params.rooms || rng.gen_bool(0.25);
            Room {
                label: if is_lab {
                    format!("lab{}", r + 1)
                } else {
                    format!("r{}", r + 1)
                },
                capacity: 10 * rng.gen_range(2..=10),
                is_lab,
            }
        })
        .collect();

    let n_teachers = params.courses.div_ceil(2).max(1);
    let n_assistants = params.courses.div_ceil(2).max(1);
    let mut staff: Vec<Staff> = (0..n_teachers)
        .map(|i| Staff {
            label: format!("I{}", i + 1),
        })
        .collect();
    staff.extend((0..n_assistants).map(|i| Staff {
        label: format!("TA{}", i + 1),
    }));

    // the first `curricula` courses seed one curriculum each
    let mut membership: Vec<usize> = (0..params.courses)
        .map(|c| {
            if c < params.curricula {
                c
            } else {
                rng.gen_range(0..params.curricula)
            }
        })
        .collect();
    membership.shuffle(&mut rng);

    let mut courses = Vec::with_capacity(params.courses);
    let mut sessions = Vec::with_capacity(2 * params.courses);
    for (c, &curriculum) in membership.iter().enumerate() {
        let enrollment = 5 * rng.gen_range(2..=20);
        let forbidden: BTreeSet<usize> = (0..n_slots).filter(|_| rng.gen_bool(0.15)).collect();
        let second_kind = if rng.gen_bool(0.5) {
            SessionKind::Lab
        } else {
            SessionKind::Section
        };
        sessions.push(Session {
            course: c,
            kind: SessionKind::Lecture,
            staff: rng.gen_range(0..n_teachers),
            enrollment,
            forbidden,
        });
        sessions.push(Session {
            course: c,
            kind: second_kind,
            staff: n_teachers + rng.gen_range(0..n_assistants),
            enrollment,
            forbidden: BTreeSet::new(),
        });
        courses.push(Course {
            label: format!("C{}", c + 1),
            name: None,
            curriculum,
            sessions: [2 * c, 2 * c + 1],
        });
    }
    let curricula = (0..params.curricula)
        .map(|k| Curriculum {
            label: format!("k{}", k + 1),
            courses: (0..params.courses).filter(|&c| membership[c] == k).collect(),
        })
        .collect();

    let mut registrations = Vec::new();
    for a in 0..params.courses {
        for b in a + 1..params.courses {
            if rng.gen_bool(params.overlap_density) {
                registrations.push(RegistrationGroup {
                    courses: vec![a, b],
                    students: rng.gen_range(1..=30),
                });
            }
        }
    }

    Ok(Instance {
        days,
        timeslots,
        rooms,
        staff,
        courses,
        sessions,
        curricula,
        registrations,
    })
}
