use crate::ast::{CodeAst, Expr, Stmt, StmtKind};

/// Canonical source text: 4-space indentation, single spaces around binary
/// operators, double-quoted strings, and the minimum parentheses needed to
/// reproduce the tree.
pub fn pretty_print(ast: &CodeAst) -> String {
    let mut out = String::new();
    for stmt in &ast.statements {
        write_stmt(&mut out, stmt, 0);
    }
    out
}

fn write_stmt(out: &mut String, stmt: &Stmt, depth: usize) {
    out.push_str(&"    ".repeat(depth));
    match &stmt.kind {
        StmtKind::Assign { target, value } => {
            out.push_str(target);
            out.push_str(" = ");
            out.push_str(&expr_text(value));
        }
        StmtKind::If { cond, .. } => {
            out.push_str("if ");
            out.push_str(&expr_text(cond));
            out.push(':');
        }
        StmtKind::While { cond, .. } => {
            out.push_str("while ");
            out.push_str(&expr_text(cond));
            out.push(':');
        }
        StmtKind::ForRange { var, count, .. } => {
            out.push_str(&format!("for {var} in range({}):", expr_text(count)));
        }
        StmtKind::FuncDef { name, params, .. } => {
            out.push_str(&format!("def {name}({}):", params.join(", ")));
        }
        StmtKind::CallStmt { callee, args } => out.push_str(&call_text(callee, args)),
        StmtKind::Return { value } => {
            out.push_str("return ");
            out.push_str(&expr_text(value));
        }
    }
    out.push('\n');
    for child in stmt.body() {
        write_stmt(out, child, depth + 1);
    }
}

/// Canonical text of one expression.
pub fn expr_text(expr: &Expr) -> String {
    match expr {
        Expr::Int { value } => value.to_string(),
        Expr::Bool { value } => if *value { "True" } else { "False" }.to_string(),
        Expr::Str { value } => quote(value),
        Expr::Name { id } => id.clone(),
        Expr::Call { callee, args } => call_text(callee, args),
        Expr::BinOp { op, left, right } => {
            let prec = op.precedence();
            format!(
                "{} {} {}",
                wrap(left, left.precedence() < prec),
                op.symbol(),
                wrap(right, right.precedence() <= prec)
            )
        }
        Expr::Compare { op, left, right } => format!(
            "{} {} {}",
            wrap(left, left.precedence() <= 1),
            op.symbol(),
            wrap(right, right.precedence() <= 1)
        ),
    }
}

fn wrap(expr: &Expr, parens: bool) -> String {
    if parens {
        format!("({})", expr_text(expr))
    } else {
        expr_text(expr)
    }
}

fn call_text(callee: &str, args: &[Expr]) -> String {
    let args: Vec<String> = args.iter().map(expr_text).collect();
    format!("{callee}({})", args.join(", "))
}

pub(crate) fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
