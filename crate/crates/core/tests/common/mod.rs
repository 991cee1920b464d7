//! Random program generators shared by the property and acceptance tests.
#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};

const WORDS: [&str; 6] = ["hello", "yes", "no", "battery", "apple", "It's even!"];

#[derive(Debug, Clone, Copy, PartialEq)]
enum Ty {
    Int,
    Bool,
    Str,
}

/// Builds loop-free programs as `(depth, text)` lines. Expressions are
/// mostly well typed so traces run deep; a few are not, to exercise faults.
struct LoopFree {
    rng: StdRng,
    lines: Vec<(usize, String)>,
    max_lines: usize,
    vars: Vec<(String, Ty)>,
    /// Functions that have been defined but not called yet, with their arity.
    uncalled: Vec<(String, usize)>,
    next_fn: usize,
}

impl LoopFree {
    fn room(&self) -> usize {
        self.max_lines.saturating_sub(self.lines.len())
    }

    fn push(&mut self, depth: usize, text: String) {
        self.lines.push((depth, text));
    }

    fn any_ty(&mut self) -> Ty {
        *[Ty::Int, Ty::Int, Ty::Bool, Ty::Str].choose(&mut self.rng).unwrap()
    }

    fn atom(&mut self, ty: Ty, locals: &[String]) -> String {
        let mut names: Vec<&str> = self.vars.iter().filter(|(_, t)| *t == ty).map(|(n, _)| n.as_str()).collect();
        if ty == Ty::Int {
            names.extend(locals.iter().map(String::as_str));
        }
        if !names.is_empty() && self.rng.random_bool(0.5) {
            return names.choose(&mut self.rng).unwrap().to_string();
        }
        match ty {
            Ty::Int => self.rng.random_range(-5..100).to_string(),
            Ty::Bool => if self.rng.random_bool(0.5) { "True" } else { "False" }.to_string(),
            Ty::Str => format!("\"{}\"", WORDS.choose(&mut self.rng).unwrap()),
        }
    }

    fn expr(&mut self, ty: Ty, locals: &[String]) -> String {
        if self.rng.random_bool(0.01) {
            // Deliberately ill typed.
            let (a, b) = (self.any_ty(), self.any_ty());
            return format!("{} + {}", self.atom(a, locals), self.atom(b, locals));
        }
        match (ty, self.rng.random_range(0..3)) {
            (Ty::Int, 0) => {
                let op = ["+", "-", "*", "/"].choose(&mut self.rng).unwrap();
                format!("{} {op} {}", self.atom(Ty::Int, locals), self.atom(Ty::Int, locals))
            }
            (Ty::Bool, 0) => self.condition(locals),
            _ => self.atom(ty, locals),
        }
    }

    fn condition(&mut self, locals: &[String]) -> String {
        let ty = self.any_ty();
        let op = if ty == Ty::Int {
            *["==", "!=", "<", ">", "<=", ">="].choose(&mut self.rng).unwrap()
        } else {
            *["==", "!="].choose(&mut self.rng).unwrap()
        };
        format!("{} {op} {}", self.atom(ty, locals), self.atom(ty, locals))
    }

    fn assign(&mut self, depth: usize, ty: Ty, value: String) {
        let existing: Vec<String> = self.vars.iter().filter(|(_, t)| *t == ty).map(|(n, _)| n.clone()).collect();
        let name = if !existing.is_empty() && (depth > 0 || self.rng.random_bool(0.4)) {
            existing.choose(&mut self.rng).unwrap().clone()
        } else if depth > 0 {
            // Names first bound in a branch may never exist at run time.
            "scratch".to_string()
        } else {
            let pool = match ty {
                Ty::Int => ["x", "n", "total", "count"].as_slice(),
                Ty::Bool => ["flag", "done"].as_slice(),
                Ty::Str => ["msg", "name"].as_slice(),
            };
            let name = pool.choose(&mut self.rng).unwrap().to_string();
            self.vars.retain(|(n, _)| *n != name);
            self.vars.push((name.clone(), ty));
            name
        };
        self.push(depth, format!("{name} = {value}"));
    }

    fn simple(&mut self, depth: usize, locals: &[String], top_level: bool) {
        let choice = self.rng.random_range(0..4);
        if choice == 0 && top_level && !self.uncalled.is_empty() {
            let i = self.rng.random_range(0..self.uncalled.len());
            let (name, arity) = self.uncalled.remove(i);
            let args: Vec<String> = (0..arity).map(|_| self.atom(Ty::Int, locals)).collect();
            let call = format!("{name}({})", args.join(", "));
            if self.rng.random_bool(0.5) {
                self.push(depth, call);
            } else {
                self.assign(depth, Ty::Int, call);
            }
        } else if choice == 1 {
            let ty = self.any_ty();
            let e = self.expr(ty, locals);
            self.push(depth, format!("print({e})"));
        } else {
            let ty = self.any_ty();
            let e = self.expr(ty, locals);
            self.assign(depth, ty, e);
        }
    }

    /// One statement, possibly compound, fitting in the remaining room.
    fn statement(&mut self, depth: usize, locals: &[String], in_function: bool) {
        let room = self.room();
        let kind = self.rng.random_range(0..10);
        if kind < 2 && room >= 2 && depth < 3 {
            let c = self.condition(locals);
            self.push(depth, format!("if {c}:"));
            self.body(depth + 1, locals, in_function);
        } else if kind == 2 && room >= 2 && depth == 0 && !in_function {
            let name = format!("f{}", self.next_fn);
            self.next_fn += 1;
            let params: Vec<String> = (0..self.rng.random_range(0..3)).map(|i| format!("p{i}")).collect();
            self.push(depth, format!("def {name}({}):", params.join(", ")));
            if self.room() >= 2 && self.rng.random_bool(0.5) {
                let e = self.expr(Ty::Str, &params);
                self.push(depth + 1, format!("print({e})"));
            }
            let e = self.expr(Ty::Int, &params);
            self.push(depth + 1, format!("return {e}"));
            self.uncalled.push((name, params.len()));
        } else {
            self.simple(depth, locals, depth == 0 && !in_function);
        }
    }

    fn body(&mut self, depth: usize, locals: &[String], in_function: bool) {
        let n = self.rng.random_range(1..=3);
        self.statement(depth, locals, in_function);
        for _ in 1..n {
            if self.room() == 0 {
                break;
            }
            self.statement(depth, locals, in_function);
        }
    }
}

fn render(lines: &[(usize, String)]) -> String {
    lines.iter().map(|(d, t)| format!("{}{t}\n", "    ".repeat(*d))).collect()
}

/// A loop-free program of 1..=`max_lines` statements. Every function is
/// called at most once, from the top level, so no line can run twice.
pub fn loop_free_program(seed: u64, max_lines: usize) -> String {
    let mut rng = StdRng::seed_from_u64(seed);
    let lines = rng.random_range(1..=max_lines.max(1));
    generate(rng, lines)
}

/// Like [`loop_free_program`] with exactly `lines` statements.
pub fn loop_free_program_exact(seed: u64, lines: usize) -> String {
    generate(StdRng::seed_from_u64(seed), lines)
}

fn generate(rng: StdRng, lines: usize) -> String {
    let mut g = LoopFree { rng, lines: Vec::new(), max_lines: lines, vars: Vec::new(), uncalled: Vec::new(), next_fn: 0 };
    while g.room() > 0 {
        g.statement(0, &[], false);
    }
    render(&g.lines)
}

/// Sprinkles blank and comment lines through `source`.
pub fn with_noise(source: &str, seed: u64) -> String {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = String::new();
    for line in source.lines() {
        match rng.random_range(0..6) {
            0 => out.push('\n'),
            1 => out.push_str("# note\n"),
            2 => out.push_str("   \n"),
            _ => {}
        }
        out.push_str(line);
        if rng.random_bool(0.2) {
            out.push_str("  # trailing");
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone)]
pub struct LoopProgram {
    pub source: String,
    /// Top-level statements outside the loop.
    pub outside: usize,
    /// Statements in the loop body.
    pub body: usize,
    /// Iterations the program would run without a cap.
    pub iterations: u32,
    pub is_while: bool,
}

/// A program with exactly one loop whose body has at most `max_body`
/// simple statements and which runs 1..=`max_iterations` times without faults.
pub fn single_loop_program(seed: u64, max_body: usize, max_iterations: u32) -> LoopProgram {
    let mut rng = StdRng::seed_from_u64(seed);
    let is_while = rng.random_bool(0.5);
    let iterations = rng.random_range(1..=max_iterations);
    let mut lines: Vec<String> = Vec::new();
    let vars = ["a", "b", "total"];
    let prefix = rng.random_range(1..=3);
    for v in vars.iter().take(prefix) {
        lines.push(format!("{v} = {}", rng.random_range(0..50)));
    }
    if is_while {
        lines.push("c = 0".into());
    }
    let outside_before = lines.len();
    let body_len = rng.random_range(1..=max_body);
    let mut body: Vec<String> = Vec::new();
    if is_while {
        lines.push(format!("while c < {iterations}:"));
        body.push("c = c + 1".into());
    } else {
        lines.push(format!("for i in range({iterations}):"));
    }
    let defined = &vars[..prefix];
    while body.len() < body_len {
        let v = defined.choose(&mut rng).unwrap();
        if rng.random_bool(0.4) {
            body.push(format!("print({v})"));
        } else {
            let w = defined.choose(&mut rng).unwrap();
            body.push(format!("{v} = {w} + {}", rng.random_range(1..10)));
        }
    }
    lines.extend(body.iter().map(|s| format!("    {s}")));
    let suffix = rng.random_range(0..=3);
    for _ in 0..suffix {
        let v = defined.choose(&mut rng).unwrap();
        lines.push(format!("print({v})"));
    }
    let source = lines.join("\n") + "\n";
    LoopProgram { source, outside: outside_before + suffix, body: body_len, iterations, is_while }
}

/// Random fills for a subset of `ids`.
pub fn random_fills(ids: &[String], seed: u64) -> std::collections::BTreeMap<String, String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let words = ["apple", "phone", "BATTERY", "tastes", "has", "good", "cat", "reads,", "5 o'clock", "my dog"];
    let mut fills = std::collections::BTreeMap::new();
    for id in ids {
        if rng.random_bool(0.5) {
            fills.insert(id.clone(), words.choose(&mut rng).unwrap().to_string());
        }
    }
    fills
}

#[cfg(test)]
mod tests {
    #[test]
    fn generators_are_deterministic() {
        assert_eq!(super::loop_free_program(3, 30), super::loop_free_program(3, 30));
        assert_eq!(super::loop_free_program_exact(9, 100).lines().count(), 100);
    }
}
