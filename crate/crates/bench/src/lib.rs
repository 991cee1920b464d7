//! Program generators for benchmarks.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const NAMES: [&str; 6] = ["a", "b", "count", "total", "x", "y"];

/// A loop-free program of exactly `lines` statements. Integer variables are
/// assigned before use, strings only go to `msg` and conditions nest at most
/// two levels, so it always runs.
pub fn loop_free_program(lines: usize, seed: u64) -> String {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = String::new();
    for name in NAMES.iter().take(lines) {
        out.push_str(&format!("{name} = {}\n", rng.random_range(0..100)));
    }
    let mut depth = 0usize;
    for i in NAMES.len().min(lines)..lines {
        let indent = "    ".repeat(depth);
        let name = NAMES[rng.random_range(0..NAMES.len())];
        let other = NAMES[rng.random_range(0..NAMES.len())];
        let last = i + 1 == lines;
        match rng.random_range(0..4) {
            0 if depth < 2 && !last => {
                out.push_str(&format!("{indent}if {name} > {}:\n", rng.random_range(0..100)));
                depth += 1;
                continue;
            }
            1 => out.push_str(&format!("{indent}print({name})\n")),
            2 => out.push_str(&format!("{indent}{name} = {other} + {}\n", rng.random_range(1..10))),
            _ => out.push_str(&format!("{indent}msg = \"{other}\"\n")),
        }
        if depth > 0 && rng.random_bool(0.4) {
            depth -= 1;
        }
    }
    out
}

/// The counted loop used in examples, with a configurable range bound.
pub fn countdown_program(iterations: u32) -> String {
    format!("x = 90\nfor i in range({iterations}):\n    x = x - 10\n    print(x)\n")
}
