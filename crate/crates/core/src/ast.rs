//! Typed syntax tree for the supported Python subset.
//!
//! Every statement carries its 1-based source line and its indentation depth.
//! The tree serializes to JSON with a `kind` tag on every node, for example
//!
//! ```json
//! {"line": 1, "depth": 0, "kind": "assign", "target": "x",
//!  "value": {"kind": "bool", "value": true}}
//! ```

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CodeAst {
    pub statements: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stmt {
    pub line: u32,
    pub depth: u32,
    #[serde(flatten)]
    pub kind: StmtKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StmtKind {
    Assign { target: String, value: Expr },
    If { cond: Expr, body: Vec<Stmt> },
    While { cond: Expr, body: Vec<Stmt> },
    ForRange { var: String, count: Expr, body: Vec<Stmt> },
    FuncDef { name: String, params: Vec<String>, body: Vec<Stmt> },
    CallStmt { callee: String, args: Vec<Expr> },
    Return { value: Expr },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinOp {
    #[serde(rename = "+")]
    Add,
    #[serde(rename = "-")]
    Sub,
    #[serde(rename = "*")]
    Mul,
    #[serde(rename = "/")]
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CmpOp {
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = "!=")]
    NotEq,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "<=")]
    LtE,
    #[serde(rename = ">=")]
    GtE,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Expr {
    Int { value: i64 },
    Bool { value: bool },
    Str { value: String },
    Name { id: String },
    BinOp { op: BinOp, left: Box<Expr>, right: Box<Expr> },
    Compare { op: CmpOp, left: Box<Expr>, right: Box<Expr> },
    Call { callee: String, args: Vec<Expr> },
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 2,
            BinOp::Mul | BinOp::Div => 3,
        }
    }
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::NotEq => "!=",
            CmpOp::Lt => "<",
            CmpOp::Gt => ">",
            CmpOp::LtE => "<=",
            CmpOp::GtE => ">=",
        }
    }
}

impl Expr {
    pub fn int(value: i64) -> Self {
        Expr::Int { value }
    }

    pub fn boolean(value: bool) -> Self {
        Expr::Bool { value }
    }

    pub fn string(value: impl Into<String>) -> Self {
        Expr::Str { value: value.into() }
    }

    pub fn name(id: impl Into<String>) -> Self {
        Expr::Name { id: id.into() }
    }

    pub fn binop(op: BinOp, left: Expr, right: Expr) -> Self {
        Expr::BinOp { op, left: Box::new(left), right: Box::new(right) }
    }

    pub fn compare(op: CmpOp, left: Expr, right: Expr) -> Self {
        Expr::Compare { op, left: Box::new(left), right: Box::new(right) }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Expr::Int { .. } | Expr::Bool { .. } | Expr::Str { .. })
    }

    pub(crate) fn precedence(&self) -> u8 {
        match self {
            Expr::Compare { .. } => 1,
            Expr::BinOp { op, .. } => op.precedence(),
            _ => 4,
        }
    }
}

impl Stmt {
    /// Nested statements, empty for simple statements.
    pub fn body(&self) -> &[Stmt] {
        match &self.kind {
            StmtKind::If { body, .. }
            | StmtKind::While { body, .. }
            | StmtKind::ForRange { body, .. }
            | StmtKind::FuncDef { body, .. } => body,
            _ => &[],
        }
    }

    pub fn is_loop(&self) -> bool {
        matches!(self.kind, StmtKind::While { .. } | StmtKind::ForRange { .. })
    }

    /// Short construct name, used in diagnostics and row descriptions.
    pub fn construct(&self) -> &'static str {
        match self.kind {
            StmtKind::Assign { .. } => "assign",
            StmtKind::If { .. } => "if",
            StmtKind::While { .. } => "while",
            StmtKind::ForRange { .. } => "for",
            StmtKind::FuncDef { .. } => "def",
            StmtKind::CallStmt { .. } => "call",
            StmtKind::Return { .. } => "return",
        }
    }
}

impl CodeAst {
    /// Pre-order walk over every statement, including nested bodies.
    pub fn walk(&self) -> impl Iterator<Item = &Stmt> {
        let mut stack: Vec<&Stmt> = self.statements.iter().rev().collect();
        std::iter::from_fn(move || {
            let next = stack.pop()?;
            stack.extend(next.body().iter().rev());
            Some(next)
        })
    }

    pub fn statement_count(&self) -> usize {
        self.walk().count()
    }

    /// Compares two trees ignoring line numbers, which differ when the same
    /// program is written with different blank or comment lines.
    pub fn structurally_eq(&self, other: &CodeAst) -> bool {
        fn same(a: &[Stmt], b: &[Stmt]) -> bool {
            a.len() == b.len()
                && a.iter().zip(b).all(|(x, y)| {
                    x.depth == y.depth
                        && same(x.body(), y.body())
                        && match (&x.kind, &y.kind) {
                            (StmtKind::Assign { target: t1, value: v1 }, StmtKind::Assign { target: t2, value: v2 }) => {
                                t1 == t2 && v1 == v2
                            }
                            (StmtKind::If { cond: c1, .. }, StmtKind::If { cond: c2, .. })
                            | (StmtKind::While { cond: c1, .. }, StmtKind::While { cond: c2, .. }) => c1 == c2,
                            (
                                StmtKind::ForRange { var: v1, count: c1, .. },
                                StmtKind::ForRange { var: v2, count: c2, .. },
                            ) => v1 == v2 && c1 == c2,
                            (
                                StmtKind::FuncDef { name: n1, params: p1, .. },
                                StmtKind::FuncDef { name: n2, params: p2, .. },
                            ) => n1 == n2 && p1 == p2,
                            (
                                StmtKind::CallStmt { callee: c1, args: a1 },
                                StmtKind::CallStmt { callee: c2, args: a2 },
                            ) => c1 == c2 && a1 == a2,
                            (StmtKind::Return { value: v1 }, StmtKind::Return { value: v2 }) => v1 == v2,
                            _ => false,
                        }
                })
        }
        same(&self.statements, &other.statements)
    }

    pub fn contains_loop(&self) -> bool {
        self.walk().any(Stmt::is_loop)
    }

    /// Content hash identifying which program a template, trace, or comic
    /// was derived from. Covers line numbers, so inserting a blank line
    /// changes it.
    pub fn source_hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("ast serializes");
        let digest = Sha256::digest(&json);
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}
