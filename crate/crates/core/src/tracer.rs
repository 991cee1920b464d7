//! Bounded concrete interpreter producing an [`ExecutionTrace`].
//!
//! The trace records what the comic needs: assignments with their values,
//! condition outcomes, loop iterations, printed text and returned values.
//! Loops stop after `max_iterations_per_loop` iterations per dynamic loop
//! instance and set [`ExecutionTrace::truncated`]; a runtime fault stops
//! execution but keeps every event recorded before it.

use std::collections::BTreeMap;
use std::fmt;
use std::num::NonZeroU32;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ast::{BinOp, CmpOp, CodeAst, Expr, Stmt, StmtKind};

pub const DEFAULT_MAX_ITERATIONS: u32 = 3;
pub const DEFAULT_MAX_EVENTS: u32 = 10_000;
pub const MAX_CALL_DEPTH: u32 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Str(String),
}

impl fmt::Display for Value {
    /// Same text Python's `str()` would produce.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(true) => f.write_str("True"),
            Value::Bool(false) => f.write_str("False"),
            Value::Str(s) => f.write_str(s),
        }
    }
}

impl Value {
    /// Source-like rendering: strings keep their quotes.
    pub fn literal_text(&self) -> String {
        match self {
            Value::Str(s) => crate::frontend::quote(s),
            other => other.to_string(),
        }
    }

    fn type_name(&self) -> &'static str {
        match self {
            Value::Int(_) => "int",
            Value::Bool(_) => "bool",
            Value::Str(_) => "str",
        }
    }

    fn truthy(&self) -> bool {
        match self {
            Value::Int(n) => *n != 0,
            Value::Bool(b) => *b,
            Value::Str(s) => !s.is_empty(),
        }
    }
}

/// One step of a dynamic loop nesting: which loop (by line) and which iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IterStep {
    pub line: u32,
    pub index: u32,
}

pub type IterPath = Vec<IterStep>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Assigned { line: u32, iter_path: IterPath, var: String, value: Value },
    CondEvaluated { line: u32, iter_path: IterPath, outcome: bool },
    /// `iter_path` is the path enclosing the loop; the new iteration is `index`.
    IterationBegan { line: u32, iter_path: IterPath, loop_var: Option<String>, index: u32 },
    Printed { line: u32, iter_path: IterPath, text: String },
    Returned { line: u32, iter_path: IterPath, value: Value },
    /// A loop statement was reached; `count` is the `range` bound for counted loops.
    LoopEntered { line: u32, iter_path: IterPath, count: Option<i64> },
    /// The loop instance wanted another iteration but hit the cap.
    LoopCapped { line: u32, iter_path: IterPath },
    Defined { line: u32, iter_path: IterPath, name: String },
    Called { line: u32, iter_path: IterPath, callee: String },
}

impl Event {
    pub fn line(&self) -> u32 {
        match self {
            Event::Assigned { line, .. }
            | Event::CondEvaluated { line, .. }
            | Event::IterationBegan { line, .. }
            | Event::Printed { line, .. }
            | Event::Returned { line, .. }
            | Event::LoopEntered { line, .. }
            | Event::LoopCapped { line, .. }
            | Event::Defined { line, .. }
            | Event::Called { line, .. } => *line,
        }
    }

    pub fn iter_path(&self) -> &[IterStep] {
        match self {
            Event::Assigned { iter_path, .. }
            | Event::CondEvaluated { iter_path, .. }
            | Event::IterationBegan { iter_path, .. }
            | Event::Printed { iter_path, .. }
            | Event::Returned { iter_path, .. }
            | Event::LoopEntered { iter_path, .. }
            | Event::LoopCapped { iter_path, .. }
            | Event::Defined { iter_path, .. }
            | Event::Called { iter_path, .. } => iter_path,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Error)]
#[serde(tag = "fault", rename_all = "snake_case")]
pub enum FaultKind {
    #[error("name '{name}' is not defined")]
    UndefinedName { name: String },
    #[error("function '{name}' is not defined")]
    UndefinedFunction { name: String },
    #[error("type mismatch: {detail}")]
    TypeMismatch { detail: String },
    #[error("division by zero")]
    DivisionByZero,
    #[error("integer overflow")]
    Overflow,
    #[error("'{name}' expects {expected} arguments, got {got}")]
    ArityMismatch { name: String, expected: usize, got: usize },
    #[error("'{name}' did not return a value")]
    NoValue { name: String },
    #[error("call depth exceeded {limit}")]
    RecursionLimit { limit: u32 },
    #[error("trace exceeded {limit} events")]
    EventLimit { limit: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Error)]
#[error("runtime fault at line {line}: {kind}")]
pub struct RuntimeFault {
    pub line: u32,
    pub kind: FaultKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutionTrace {
    pub source_hash: String,
    pub events: Vec<Event>,
    pub truncated: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault: Option<RuntimeFault>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceLimits {
    pub max_iterations_per_loop: NonZeroU32,
    pub max_total_events: NonZeroU32,
}

impl Default for TraceLimits {
    fn default() -> Self {
        TraceLimits {
            max_iterations_per_loop: NonZeroU32::new(DEFAULT_MAX_ITERATIONS).unwrap(),
            max_total_events: NonZeroU32::new(DEFAULT_MAX_EVENTS).unwrap(),
        }
    }
}

impl TraceLimits {
    /// Returns `None` when either limit is zero.
    pub fn new(max_iterations_per_loop: u32, max_total_events: u32) -> Option<Self> {
        Some(TraceLimits {
            max_iterations_per_loop: NonZeroU32::new(max_iterations_per_loop)?,
            max_total_events: NonZeroU32::new(max_total_events)?,
        })
    }

    pub fn with_iterations(max_iterations_per_loop: u32) -> Option<Self> {
        Self::new(max_iterations_per_loop, DEFAULT_MAX_EVENTS)
    }
}

pub fn trace(ast: &CodeAst, limits: TraceLimits) -> ExecutionTrace {
    let mut machine = Machine {
        limits,
        functions: BTreeMap::new(),
        globals: BTreeMap::new(),
        frames: Vec::new(),
        events: Vec::new(),
        path: Vec::new(),
        truncated: false,
    };
    let fault = machine.block(&ast.statements).err();
    ExecutionTrace { source_hash: ast.source_hash(), events: machine.events, truncated: machine.truncated, fault }
}

struct Function<'a> {
    params: &'a [String],
    body: &'a [Stmt],
}

enum Flow {
    Normal,
    Return(Value),
}

type Exec<T> = Result<T, RuntimeFault>;

struct Machine<'a> {
    limits: TraceLimits,
    functions: BTreeMap<&'a str, Function<'a>>,
    globals: BTreeMap<String, Value>,
    frames: Vec<BTreeMap<String, Value>>,
    events: Vec<Event>,
    path: IterPath,
    truncated: bool,
}

impl<'a> Machine<'a> {
    fn emit(&mut self, line: u32, event: Event) -> Exec<()> {
        let limit = self.limits.max_total_events.get();
        if self.events.len() >= limit as usize {
            return Err(RuntimeFault { line, kind: FaultKind::EventLimit { limit } });
        }
        self.events.push(event);
        Ok(())
    }

    fn set(&mut self, name: &str, value: Value) {
        let scope = self.frames.last_mut().unwrap_or(&mut self.globals);
        scope.insert(name.to_string(), value);
    }

    fn get(&self, name: &str, line: u32) -> Exec<Value> {
        self.frames
            .last()
            .and_then(|f| f.get(name))
            .or_else(|| self.globals.get(name))
            .cloned()
            .ok_or_else(|| RuntimeFault { line, kind: FaultKind::UndefinedName { name: name.to_string() } })
    }

    fn block(&mut self, stmts: &'a [Stmt]) -> Exec<Flow> {
        for stmt in stmts {
            if let Flow::Return(v) = self.stmt(stmt)? {
                return Ok(Flow::Return(v));
            }
        }
        Ok(Flow::Normal)
    }

    fn stmt(&mut self, stmt: &'a Stmt) -> Exec<Flow> {
        let line = stmt.line;
        match &stmt.kind {
            StmtKind::Assign { target, value } => {
                let value = self.eval(value, line)?;
                self.set(target, value.clone());
                let event = Event::Assigned { line, iter_path: self.path.clone(), var: target.clone(), value };
                self.emit(line, event)?;
            }
            StmtKind::If { cond, body } => {
                let outcome = self.eval(cond, line)?.truthy();
                self.emit(line, Event::CondEvaluated { line, iter_path: self.path.clone(), outcome })?;
                if outcome {
                    return self.block(body);
                }
            }
            StmtKind::While { cond, body } => {
                self.emit(line, Event::LoopEntered { line, iter_path: self.path.clone(), count: None })?;
                let mut index = 0;
                loop {
                    let outcome = self.eval(cond, line)?.truthy();
                    self.emit(line, Event::CondEvaluated { line, iter_path: self.path.clone(), outcome })?;
                    if !outcome {
                        break;
                    }
                    if index == self.limits.max_iterations_per_loop.get() {
                        self.truncated = true;
                        self.emit(line, Event::LoopCapped { line, iter_path: self.path.clone() })?;
                        break;
                    }
                    if let Flow::Return(v) = self.iteration(line, None, index, body)? {
                        return Ok(Flow::Return(v));
                    }
                    index += 1;
                }
            }
            StmtKind::ForRange { var, count, body } => {
                let count = match self.eval(count, line)? {
                    Value::Int(n) => n,
                    other => {
                        let detail = format!("range() expects int, got {}", other.type_name());
                        return Err(RuntimeFault { line, kind: FaultKind::TypeMismatch { detail } });
                    }
                };
                self.emit(line, Event::LoopEntered { line, iter_path: self.path.clone(), count: Some(count) })?;
                let mut index: u32 = 0;
                while i64::from(index) < count {
                    if index == self.limits.max_iterations_per_loop.get() {
                        self.truncated = true;
                        self.emit(line, Event::LoopCapped { line, iter_path: self.path.clone() })?;
                        break;
                    }
                    self.set(var, Value::Int(i64::from(index)));
                    if let Flow::Return(v) = self.iteration(line, Some(var), index, body)? {
                        return Ok(Flow::Return(v));
                    }
                    index += 1;
                }
            }
            StmtKind::FuncDef { name, params, body } => {
                self.functions.insert(name, Function { params, body });
                self.emit(line, Event::Defined { line, iter_path: self.path.clone(), name: name.clone() })?;
            }
            StmtKind::CallStmt { callee, args } => {
                if callee == "print" {
                    self.print(args, line)?;
                } else {
                    self.emit(line, Event::Called { line, iter_path: self.path.clone(), callee: callee.clone() })?;
                    self.call(callee, args, line)?;
                }
            }
            StmtKind::Return { value } => {
                let value = self.eval(value, line)?;
                self.emit(line, Event::Returned { line, iter_path: self.path.clone(), value: value.clone() })?;
                return Ok(Flow::Return(value));
            }
        }
        Ok(Flow::Normal)
    }

    fn iteration(&mut self, line: u32, var: Option<&str>, index: u32, body: &'a [Stmt]) -> Exec<Flow> {
        let event = Event::IterationBegan {
            line,
            iter_path: self.path.clone(),
            loop_var: var.map(str::to_string),
            index,
        };
        self.emit(line, event)?;
        self.path.push(IterStep { line, index });
        let flow = self.block(body);
        self.path.pop();
        flow
    }

    fn print(&mut self, args: &[Expr], line: u32) -> Exec<()> {
        let mut parts = Vec::with_capacity(args.len());
        for arg in args {
            parts.push(self.eval(arg, line)?.to_string());
        }
        self.emit(line, Event::Printed { line, iter_path: self.path.clone(), text: parts.join(" ") })
    }

    /// Runs a user-defined function; `None` when it finishes without `return`.
    fn call(&mut self, name: &str, args: &[Expr], line: u32) -> Exec<Option<Value>> {
        let Some(function) = self.functions.get(name) else {
            return Err(RuntimeFault { line, kind: FaultKind::UndefinedFunction { name: name.to_string() } });
        };
        let (params, body) = (function.params, function.body);
        if params.len() != args.len() {
            let kind = FaultKind::ArityMismatch { name: name.to_string(), expected: params.len(), got: args.len() };
            return Err(RuntimeFault { line, kind });
        }
        if self.frames.len() as u32 >= MAX_CALL_DEPTH {
            return Err(RuntimeFault { line, kind: FaultKind::RecursionLimit { limit: MAX_CALL_DEPTH } });
        }
        let mut frame = BTreeMap::new();
        for (param, arg) in params.iter().zip(args) {
            frame.insert(param.clone(), self.eval(arg, line)?);
        }
        self.frames.push(frame);
        let flow = self.block(body);
        self.frames.pop();
        Ok(match flow? {
            Flow::Return(v) => Some(v),
            Flow::Normal => None,
        })
    }

    fn eval(&mut self, expr: &Expr, line: u32) -> Exec<Value> {
        match expr {
            Expr::Int { value } => Ok(Value::Int(*value)),
            Expr::Bool { value } => Ok(Value::Bool(*value)),
            Expr::Str { value } => Ok(Value::Str(value.clone())),
            Expr::Name { id } => self.get(id, line),
            Expr::BinOp { op, left, right } => {
                let l = self.eval(left, line)?;
                let r = self.eval(right, line)?;
                arith(*op, &l, &r).map_err(|kind| RuntimeFault { line, kind })
            }
            Expr::Compare { op, left, right } => {
                let l = self.eval(left, line)?;
                let r = self.eval(right, line)?;
                compare(*op, &l, &r).map(Value::Bool).map_err(|kind| RuntimeFault { line, kind })
            }
            Expr::Call { callee, args } => {
                if callee == "print" {
                    self.print(args, line)?;
                    return Err(RuntimeFault { line, kind: FaultKind::NoValue { name: callee.clone() } });
                }
                self.call(callee, args, line)?
                    .ok_or_else(|| RuntimeFault { line, kind: FaultKind::NoValue { name: callee.clone() } })
            }
        }
    }
}

fn arith(op: BinOp, l: &Value, r: &Value) -> Result<Value, FaultKind> {
    let (Value::Int(a), Value::Int(b)) = (l, r) else {
        let detail = format!("unsupported operand types for {}: {} and {}", op.symbol(), l.type_name(), r.type_name());
        return Err(FaultKind::TypeMismatch { detail });
    };
    let (a, b) = (*a, *b);
    let result = match op {
        BinOp::Add => a.checked_add(b),
        BinOp::Sub => a.checked_sub(b),
        BinOp::Mul => a.checked_mul(b),
        BinOp::Div => {
            if b == 0 {
                return Err(FaultKind::DivisionByZero);
            }
            // Floor division, matching Python's `//` on integers.
            a.checked_div(b).map(|q| if (a % b != 0) && ((a < 0) != (b < 0)) { q - 1 } else { q })
        }
    };
    result.map(Value::Int).ok_or(FaultKind::Overflow)
}

fn compare(op: CmpOp, l: &Value, r: &Value) -> Result<bool, FaultKind> {
    let ordering = match (l, r) {
        (Value::Int(a), Value::Int(b)) => a.cmp(b),
        (Value::Bool(a), Value::Bool(b)) => a.cmp(b),
        (Value::Str(a), Value::Str(b)) => a.cmp(b),
        _ => {
            let detail = format!("cannot compare {} with {}", l.type_name(), r.type_name());
            return Err(FaultKind::TypeMismatch { detail });
        }
    };
    Ok(match op {
        CmpOp::Eq => ordering.is_eq(),
        CmpOp::NotEq => ordering.is_ne(),
        CmpOp::Lt => ordering.is_lt(),
        CmpOp::Gt => ordering.is_gt(),
        CmpOp::LtE => ordering.is_le(),
        CmpOp::GtE => ordering.is_ge(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse;

    fn run(src: &str) -> ExecutionTrace {
        trace(&parse(src).unwrap(), TraceLimits::default())
    }

    fn assigned(line: u32, path: &[(u32, u32)], var: &str, value: Value) -> Event {
        Event::Assigned {
            line,
            iter_path: path.iter().map(|&(line, index)| IterStep { line, index }).collect(),
            var: var.into(),
            value,
        }
    }

    #[test]
    fn conditional_program_events() {
        let t = run("x = True\nif x == True:\n    print(True)");
        assert_eq!(
            t.events,
            vec![
                assigned(1, &[], "x", Value::Bool(true)),
                Event::CondEvaluated { line: 2, iter_path: vec![], outcome: true },
                Event::Printed { line: 3, iter_path: vec![], text: "True".into() },
            ]
        );
        assert!(!t.truncated);
        assert!(t.fault.is_none());
    }

    #[test]
    fn single_assignment() {
        let t = run("x = 90");
        assert_eq!(t.events, vec![assigned(1, &[], "x", Value::Int(90))]);
        assert!(!t.truncated);
    }

    #[test]
    fn counted_loop_values() {
        let t = run("x = 90\nfor i in range(3):\n    x = x - 10");
        let body: Vec<&Event> = t.events.iter().filter(|e| e.line() == 3).collect();
        assert_eq!(
            body,
            vec![
                &assigned(3, &[(2, 0)], "x", Value::Int(80)),
                &assigned(3, &[(2, 1)], "x", Value::Int(70)),
                &assigned(3, &[(2, 2)], "x", Value::Int(60)),
            ]
        );
        let indices: Vec<u32> = t
            .events
            .iter()
            .filter_map(|e| match e {
                Event::IterationBegan { loop_var: Some(v), index, .. } if v == "i" => Some(*index),
                _ => None,
            })
            .collect();
        assert_eq!(indices, vec![0, 1, 2]);
        assert!(!t.truncated);
    }

    #[test]
    fn loops_are_capped_and_flagged() {
        let t = run("x = 0\nwhile x < 100:\n    x = x + 1");
        let iterations = t.events.iter().filter(|e| matches!(e, Event::IterationBegan { .. })).count();
        assert_eq!(iterations, 3);
        assert!(t.truncated);
        assert!(t.events.iter().any(|e| matches!(e, Event::LoopCapped { line: 2, .. })));

        let t = trace(&parse("for i in range(10):\n    print(i)").unwrap(), TraceLimits::with_iterations(5).unwrap());
        assert_eq!(t.events.iter().filter(|e| matches!(e, Event::Printed { .. })).count(), 5);
        assert!(t.truncated);
    }

    #[test]
    fn nested_loops_get_full_paths() {
        let t = run("for i in range(2):\n    for j in range(2):\n        print(j)");
        let paths: Vec<&[IterStep]> =
            t.events.iter().filter(|e| matches!(e, Event::Printed { .. })).map(Event::iter_path).collect();
        let step = |line, index| IterStep { line, index };
        assert_eq!(
            paths,
            vec![
                &[step(1, 0), step(2, 0)][..],
                &[step(1, 0), step(2, 1)][..],
                &[step(1, 1), step(2, 0)][..],
                &[step(1, 1), step(2, 1)][..],
            ]
        );
    }

    #[test]
    fn false_branch_records_only_the_condition() {
        let t = run("x = 1\nif x > 5:\n    print(x)");
        assert_eq!(t.events.len(), 2);
        assert_eq!(t.events[1], Event::CondEvaluated { line: 2, iter_path: vec![], outcome: false });
    }

    #[test]
    fn functions_are_called_by_value() {
        let t = run("def double(n):\n    n = n * 2\n    return n\nn = 5\nx = double(n)\nprint(n, x)");
        let printed: Vec<&str> = t
            .events
            .iter()
            .filter_map(|e| match e {
                Event::Printed { text, .. } => Some(text.as_str()),
                _ => None,
            })
            .collect();
        assert_eq!(printed, vec!["5 10"]);
        assert!(t.events.iter().any(|e| matches!(e, Event::Returned { line: 3, value: Value::Int(10), .. })));
    }

    #[test]
    fn runtime_faults_keep_prior_events() {
        let t = run("x = 1\ny = x / 0\nprint(y)");
        assert_eq!(t.events.len(), 1);
        assert_eq!(t.fault, Some(RuntimeFault { line: 2, kind: FaultKind::DivisionByZero }));

        let t = run("print(z)");
        assert_eq!(t.fault.unwrap().kind, FaultKind::UndefinedName { name: "z".into() });
        let t = run("x = 1 + True");
        assert!(matches!(t.fault.unwrap().kind, FaultKind::TypeMismatch { .. }));
        let t = run("greet()");
        assert!(matches!(t.fault.unwrap().kind, FaultKind::UndefinedFunction { .. }));
        let t = run("x = 9223372036854775807 + 1");
        assert_eq!(t.fault.unwrap().kind, FaultKind::Overflow);
    }

    #[test]
    fn recursion_is_capped() {
        let t = run("def f(n):\n    return f(n + 1)\nx = f(0)");
        assert_eq!(t.fault.unwrap().kind, FaultKind::RecursionLimit { limit: MAX_CALL_DEPTH });
    }

    #[test]
    fn event_limit_stops_the_trace() {
        let src = "for i in range(3):\n    for j in range(3):\n        print(j)";
        let t = trace(&parse(src).unwrap(), TraceLimits::new(3, 5).unwrap());
        assert_eq!(t.events.len(), 5);
        assert_eq!(t.fault.unwrap().kind, FaultKind::EventLimit { limit: 5 });
    }

    #[test]
    fn floor_division() {
        assert_eq!(arith(BinOp::Div, &Value::Int(7), &Value::Int(2)), Ok(Value::Int(3)));
        assert_eq!(arith(BinOp::Div, &Value::Int(-7), &Value::Int(2)), Ok(Value::Int(-4)));
        assert_eq!(arith(BinOp::Div, &Value::Int(i64::MIN), &Value::Int(-1)), Err(FaultKind::Overflow));
    }

    #[test]
    fn limits_reject_zero() {
        assert!(TraceLimits::new(0, 10).is_none());
        assert!(TraceLimits::new(1, 0).is_none());
    }

    #[test]
    fn trace_json_shape() {
        let t = run("x = 90");
        let json = serde_json::to_string(&t).unwrap();
        assert!(json.contains(r#"{"event":"assigned","line":1,"iter_path":[],"var":"x","value":90}"#), "{json}");
        let back: ExecutionTrace = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
    }
}
