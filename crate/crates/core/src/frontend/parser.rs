//! Recursive-descent parser over the logical lines produced by the lexer.
//!
//! ```text
//! block     → stmt+                       (all at the same depth)
//! stmt      → "if" expr ":" block
//!           | "while" expr ":" block
//!           | "for" NAME "in" "range" "(" expr ")" ":" block
//!           | "def" NAME "(" params? ")" ":" block
//!           | "return" expr
//!           | NAME "=" expr
//!           | NAME "(" args? ")"
//! expr      → arith (cmp_op arith)?
//! arith     → term (("+" | "-") term)*
//! term      → unary (("*" | "/") unary)*
//! unary     → "-" INT | atom
//! atom      → INT | STRING | "True" | "False" | NAME | NAME "(" args? ")" | "(" expr ")"
//! ```

use super::error::ParseError;
use super::lexer::{LogicalLine, Tok, Token};
use crate::ast::{BinOp, CmpOp, Expr, Stmt, StmtKind};

const MAX_NESTING: u32 = 64;

// Valid Python keywords and soft keywords that the subset does not cover.
const UNSUPPORTED_KEYWORDS: &[&str] = &[
    "else", "elif", "class", "import", "from", "try", "except", "finally", "with", "lambda",
    "break", "continue", "pass", "global", "nonlocal", "del", "assert", "yield", "raise", "async",
    "await", "and", "or", "not", "is", "None", "match", "case",
];

const RESERVED: &[&str] = &["if", "while", "for", "in", "def", "return", "True", "False"];

pub(crate) fn parse_lines(lines: &[LogicalLine]) -> Result<Vec<Stmt>, ParseError> {
    let mut parser = BlockParser { lines, pos: 0, func_depth: 0 };
    if let Some(first) = lines.first() {
        if first.depth != 0 {
            return Err(ParseError::syntax(first.line, 1, "unexpected indent"));
        }
    }
    let stmts = parser.block(0)?;
    debug_assert_eq!(parser.pos, lines.len());
    Ok(stmts)
}

struct BlockParser<'a> {
    lines: &'a [LogicalLine],
    pos: usize,
    func_depth: u32,
}

enum Header {
    Simple(StmtKind),
    If(Expr),
    While(Expr),
    For(String, Expr),
    Def(String, Vec<String>),
}

impl<'a> BlockParser<'a> {
    fn block(&mut self, depth: u32) -> Result<Vec<Stmt>, ParseError> {
        let mut stmts = Vec::new();
        while let Some(line) = self.lines.get(self.pos) {
            if line.depth < depth {
                break;
            }
            if line.depth > depth {
                return Err(ParseError::syntax(line.line, 1, "unexpected indent"));
            }
            self.pos += 1;
            let header = LineParser::new(line, self.func_depth > 0).statement()?;
            let kind = match header {
                Header::Simple(kind) => kind,
                Header::If(cond) => StmtKind::If { cond, body: self.body(line)? },
                Header::While(cond) => StmtKind::While { cond, body: self.body(line)? },
                Header::For(var, count) => StmtKind::ForRange { var, count, body: self.body(line)? },
                Header::Def(name, params) => {
                    self.func_depth += 1;
                    let body = self.body(line);
                    self.func_depth -= 1;
                    StmtKind::FuncDef { name, params, body: body? }
                }
            };
            stmts.push(Stmt { line: line.line, depth, kind });
        }
        Ok(stmts)
    }

    fn body(&mut self, header: &LogicalLine) -> Result<Vec<Stmt>, ParseError> {
        match self.lines.get(self.pos) {
            Some(next) if next.depth == header.depth + 1 => {
                if next.depth > MAX_NESTING {
                    return Err(ParseError::syntax(next.line, 1, "blocks are nested too deeply"));
                }
                self.block(header.depth + 1)
            }
            Some(next) if next.depth > header.depth + 1 => {
                Err(ParseError::syntax(next.line, 1, "unexpected indent"))
            }
            _ => Err(ParseError::syntax(header.line, header.end_col, "expected an indented block")),
        }
    }
}

struct LineParser<'a> {
    line: &'a LogicalLine,
    pos: usize,
    in_function: bool,
    nesting: u32,
}

impl<'a> LineParser<'a> {
    fn new(line: &'a LogicalLine, in_function: bool) -> Self {
        LineParser { line, pos: 0, in_function, nesting: 0 }
    }

    fn line_no(&self) -> u32 {
        self.line.line
    }

    fn peek(&self) -> Option<&'a Tok> {
        self.line.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, offset: usize) -> Option<&'a Tok> {
        self.line.tokens.get(self.pos + offset).map(|t| &t.tok)
    }

    fn col(&self) -> u32 {
        self.line.tokens.get(self.pos).map_or(self.line.end_col, |t: &Token| t.col)
    }

    fn next(&mut self) -> Option<&'a Tok> {
        let tok = self.peek();
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    fn at_op(&self, op: &str) -> bool {
        matches!(self.peek(), Some(Tok::Op(o)) if *o == op)
    }

    fn at_name(&self, name: &str) -> bool {
        matches!(self.peek(), Some(Tok::Name(n)) if n == name)
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::syntax(self.line_no(), self.col(), message)
    }

    fn expect_op(&mut self, op: &str) -> Result<(), ParseError> {
        if self.at_op(op) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{op}'")))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.at_name(kw) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{kw}'")))
        }
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(Tok::Op(";")) => Err(ParseError::unsupported(self.line_no(), "multiple statements on one line")),
            Some(Tok::Name(n)) if UNSUPPORTED_KEYWORDS.contains(&n.as_str()) => {
                Err(ParseError::unsupported(self.line_no(), n.clone()))
            }
            Some(Tok::Name(n)) if n == "if" => Err(ParseError::unsupported(self.line_no(), "conditional expression")),
            Some(Tok::Name(n)) if n == "in" => Err(ParseError::unsupported(self.line_no(), "in")),
            Some(_) => Err(self.error("unexpected token")),
        }
    }

    fn identifier(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Name(n)) if UNSUPPORTED_KEYWORDS.contains(&n.as_str()) => {
                Err(ParseError::unsupported(self.line_no(), n.clone()))
            }
            Some(Tok::Name(n)) if RESERVED.contains(&n.as_str()) => {
                Err(self.error(format!("expected {what}, found keyword '{n}'")))
            }
            Some(Tok::Name(n)) => {
                self.pos += 1;
                Ok(n.clone())
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    fn block_header_end(&mut self) -> Result<(), ParseError> {
        self.expect_op(":")?;
        if self.peek().is_some() {
            return Err(ParseError::unsupported(self.line_no(), "statement on the same line as its block header"));
        }
        Ok(())
    }

    fn statement(mut self) -> Result<Header, ParseError> {
        let Some(first) = self.peek() else {
            return Err(self.error("empty statement"));
        };
        let header = match first {
            Tok::Name(kw) if UNSUPPORTED_KEYWORDS.contains(&kw.as_str()) => {
                return Err(ParseError::unsupported(self.line_no(), kw.clone()));
            }
            Tok::Name(kw) if kw == "if" => {
                self.pos += 1;
                let cond = self.expr()?;
                self.block_header_end()?;
                Header::If(cond)
            }
            Tok::Name(kw) if kw == "while" => {
                self.pos += 1;
                let cond = self.expr()?;
                self.block_header_end()?;
                Header::While(cond)
            }
            Tok::Name(kw) if kw == "for" => {
                self.pos += 1;
                let var = self.identifier("a loop variable")?;
                if self.at_op(",") {
                    return Err(ParseError::unsupported(self.line_no(), "tuple unpacking"));
                }
                self.expect_keyword("in")?;
                if !(self.at_name("range") && matches!(self.peek_at(1), Some(Tok::Op("(")))) {
                    return Err(ParseError::unsupported(self.line_no(), "for over an iterable"));
                }
                self.pos += 2;
                let count = self.expr()?;
                if self.at_op(",") {
                    return Err(ParseError::unsupported(self.line_no(), "range with start or step"));
                }
                self.expect_op(")")?;
                self.block_header_end()?;
                Header::For(var, count)
            }
            Tok::Name(kw) if kw == "def" => {
                self.pos += 1;
                let name = self.identifier("a function name")?;
                self.expect_op("(")?;
                let mut params = Vec::new();
                if !self.at_op(")") {
                    loop {
                        if self.at_op("*") || self.at_op("**") {
                            return Err(ParseError::unsupported(self.line_no(), "variadic parameters"));
                        }
                        let param = self.identifier("a parameter name")?;
                        if self.at_op("=") {
                            return Err(ParseError::unsupported(self.line_no(), "default parameter values"));
                        }
                        if self.at_op(":") {
                            return Err(ParseError::unsupported(self.line_no(), "type annotations"));
                        }
                        if params.contains(&param) {
                            return Err(self.error(format!("duplicate parameter '{param}'")));
                        }
                        params.push(param);
                        if self.at_op(",") {
                            self.pos += 1;
                        } else {
                            break;
                        }
                    }
                }
                self.expect_op(")")?;
                if self.at_op("->") {
                    return Err(ParseError::unsupported(self.line_no(), "type annotations"));
                }
                self.block_header_end()?;
                Header::Def(name, params)
            }
            Tok::Name(kw) if kw == "return" => {
                if !self.in_function {
                    return Err(self.error("'return' outside function"));
                }
                self.pos += 1;
                if self.peek().is_none() {
                    return Err(ParseError::unsupported(self.line_no(), "bare return"));
                }
                let value = self.expr()?;
                self.expect_end()?;
                Header::Simple(StmtKind::Return { value })
            }
            Tok::Name(_) => self.simple_statement()?,
            Tok::Op("@") => return Err(ParseError::unsupported(self.line_no(), "decorator")),
            _ => return Err(ParseError::unsupported(self.line_no(), "expression statement")),
        };
        Ok(header)
    }

    fn simple_statement(&mut self) -> Result<Header, ParseError> {
        match self.peek_at(1) {
            Some(Tok::Op("=")) => {
                let target = match self.peek() {
                    Some(Tok::Name(n)) if RESERVED.contains(&n.as_str()) => {
                        return Err(self.error(format!("cannot assign to '{n}'")));
                    }
                    _ => self.identifier("an assignment target")?,
                };
                self.pos += 1;
                let value = self.expr()?;
                if self.at_op("=") {
                    return Err(ParseError::unsupported(self.line_no(), "chained assignment"));
                }
                if self.at_op(",") {
                    return Err(ParseError::unsupported(self.line_no(), "tuple assignment"));
                }
                self.expect_end()?;
                Ok(Header::Simple(StmtKind::Assign { target, value }))
            }
            Some(Tok::Op(op)) if op.len() >= 2 && op.ends_with('=') && !matches!(*op, "==" | "!=" | "<=" | ">=") => {
                Err(ParseError::unsupported(self.line_no(), "augmented assignment"))
            }
            Some(Tok::Op(",")) => Err(ParseError::unsupported(self.line_no(), "tuple assignment")),
            Some(Tok::Op(".")) => Err(ParseError::unsupported(self.line_no(), "attribute access")),
            Some(Tok::Op("[")) => Err(ParseError::unsupported(self.line_no(), "subscript")),
            Some(Tok::Op(":")) => Err(ParseError::unsupported(self.line_no(), "annotated assignment")),
            Some(Tok::Op("(")) => {
                let expr = self.expr()?;
                if self.at_op("=") {
                    return Err(self.error("cannot assign to function call"));
                }
                self.expect_end()?;
                match expr {
                    Expr::Call { callee, args } => Ok(Header::Simple(StmtKind::CallStmt { callee, args })),
                    _ => Err(ParseError::unsupported(self.line_no(), "expression statement")),
                }
            }
            _ => {
                // Validate the expression first so malformed lines report syntax errors.
                self.expr()?;
                if self.at_op("=") {
                    return Err(self.error("cannot assign to expression"));
                }
                self.expect_end()?;
                Err(ParseError::unsupported(self.line_no(), "expression statement"))
            }
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.nesting += 1;
        if self.nesting > MAX_NESTING {
            return Err(self.error("expression is nested too deeply"));
        }
        let left = self.arith()?;
        let result = match self.cmp_op() {
            Some(op) => {
                self.pos += 1;
                let right = self.arith()?;
                if self.cmp_op().is_some() {
                    return Err(ParseError::unsupported(self.line_no(), "chained comparison"));
                }
                Expr::compare(op, left, right)
            }
            None => left,
        };
        self.nesting -= 1;
        Ok(result)
    }

    fn cmp_op(&self) -> Option<CmpOp> {
        match self.peek()? {
            Tok::Op("==") => Some(CmpOp::Eq),
            Tok::Op("!=") => Some(CmpOp::NotEq),
            Tok::Op("<") => Some(CmpOp::Lt),
            Tok::Op(">") => Some(CmpOp::Gt),
            Tok::Op("<=") => Some(CmpOp::LtE),
            Tok::Op(">=") => Some(CmpOp::GtE),
            _ => None,
        }
    }

    fn arith(&mut self) -> Result<Expr, ParseError> {
        let mut left = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Op("+")) => BinOp::Add,
                Some(Tok::Op("-")) => BinOp::Sub,
                _ => break,
            };
            self.pos += 1;
            let right = self.term()?;
            left = Expr::binop(op, left, right);
        }
        Ok(left)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut left = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Op("*")) => BinOp::Mul,
                Some(Tok::Op("/")) => BinOp::Div,
                Some(Tok::Op(op @ ("%" | "//" | "**" | "@" | "&" | "|" | "^" | "<<" | ">>"))) => {
                    return Err(ParseError::unsupported(self.line_no(), format!("operator {op}")));
                }
                _ => break,
            };
            self.pos += 1;
            let right = self.unary()?;
            left = Expr::binop(op, left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(Tok::Op("-")) => match self.peek_at(1) {
                Some(Tok::Int(n)) => {
                    let n = *n;
                    self.pos += 2;
                    if n > i64::MAX as u64 + 1 {
                        return Err(self.error("integer literal is too large"));
                    }
                    Ok(Expr::int((n as i128).wrapping_neg() as i64))
                }
                _ => Err(ParseError::unsupported(self.line_no(), "unary minus on a non-literal")),
            },
            Some(Tok::Op(op @ ("+" | "~"))) => {
                Err(ParseError::unsupported(self.line_no(), format!("unary {op}")))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let col = self.col();
        let Some(tok) = self.next() else {
            return Err(self.error("expected an expression"));
        };
        match tok {
            Tok::Int(n) => {
                if *n > i64::MAX as u64 {
                    return Err(ParseError::syntax(self.line_no(), col, "integer literal is too large"));
                }
                Ok(Expr::int(*n as i64))
            }
            Tok::Str(s) => Ok(Expr::string(s.clone())),
            Tok::Name(n) if n == "True" => Ok(Expr::boolean(true)),
            Tok::Name(n) if n == "False" => Ok(Expr::boolean(false)),
            Tok::Name(n) if UNSUPPORTED_KEYWORDS.contains(&n.as_str()) => {
                Err(ParseError::unsupported(self.line_no(), n.clone()))
            }
            Tok::Name(n) if RESERVED.contains(&n.as_str()) => {
                Err(ParseError::syntax(self.line_no(), col, format!("unexpected keyword '{n}'")))
            }
            Tok::Name(n) => {
                if self.at_op("(") {
                    self.pos += 1;
                    let args = self.call_args()?;
                    Ok(Expr::Call { callee: n.clone(), args })
                } else if self.at_op(".") {
                    Err(ParseError::unsupported(self.line_no(), "attribute access"))
                } else if self.at_op("[") {
                    Err(ParseError::unsupported(self.line_no(), "subscript"))
                } else {
                    Ok(Expr::name(n.clone()))
                }
            }
            Tok::Op("(") => {
                if self.at_op(")") {
                    return Err(ParseError::unsupported(self.line_no(), "tuple literal"));
                }
                let inner = self.expr()?;
                if self.at_op(",") {
                    return Err(ParseError::unsupported(self.line_no(), "tuple literal"));
                }
                self.expect_op(")")?;
                Ok(inner)
            }
            Tok::Op("[") => Err(ParseError::unsupported(self.line_no(), "list literal")),
            Tok::Op("{") => Err(ParseError::unsupported(self.line_no(), "dict or set literal")),
            Tok::Op(op) => Err(ParseError::syntax(self.line_no(), col, format!("unexpected '{op}'"))),
        }
    }

    fn call_args(&mut self) -> Result<Vec<Expr>, ParseError> {
        let mut args = Vec::new();
        if self.at_op(")") {
            self.pos += 1;
            return Ok(args);
        }
        loop {
            if matches!(self.peek(), Some(Tok::Name(_))) && matches!(self.peek_at(1), Some(Tok::Op("="))) {
                return Err(ParseError::unsupported(self.line_no(), "keyword arguments"));
            }
            args.push(self.expr()?);
            if self.at_op(",") {
                self.pos += 1;
                if self.at_op(")") {
                    self.pos += 1;
                    return Ok(args);
                }
            } else {
                self.expect_op(")")?;
                return Ok(args);
            }
        }
    }
}
