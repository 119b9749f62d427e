//! Shared workloads for the pipeline benchmarks.

use ttsat_core::{encode, gen_random_instance, EncodeOptions, Encoding, GenParams, Instance};

/// Generator settings for a benchmark of the given size class.
pub fn params(courses: usize) -> GenParams {
    GenParams {
        days: 3,
        slots_per_day: 2,
        rooms: 3,
        courses,
        curricula: courses.div_ceil(2),
        overlap_density: 0.3,
    }
}

pub fn instance(seed: u64, courses: usize) -> Instance {
    gen_random_instance(seed, &params(courses)).expect("valid benchmark parameters")
}

pub fn encoding(instance: &Instance) -> Encoding {
    encode(instance, &EncodeOptions::default()).expect("generated instances encode")
}
