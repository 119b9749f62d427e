//! The bundled seven-course example instance.
//!
//! Per-session enrollment is the sum of the registration rows naming the
//! course; the file's single-course row (55 students of CS101) only
//! contributes to that sum and is not a registration group.

use crate::model::{parse_instance, Instance};

pub const EXAMPLE_JSON: &str = include_str!("../fixtures/example.json");

pub fn example_instance() -> Instance {
    parse_instance(EXAMPLE_JSON).expect("bundled example parses")
}
