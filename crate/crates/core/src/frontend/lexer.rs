//! Line-oriented tokenizer.
//!
//! Source is split into physical lines first; each non-blank line becomes one
//! [`LogicalLine`] with its indentation depth and token list. Comments are
//! dropped here, so blank and comment-only lines never reach the parser.

use super::error::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Name(String),
    Int(u64),
    Str(String),
    Op(&'static str),
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub col: u32,
}

#[derive(Debug, Clone)]
pub(crate) struct LogicalLine {
    pub line: u32,
    pub depth: u32,
    pub tokens: Vec<Token>,
    /// Column just past the last character, for end-of-line diagnostics.
    pub end_col: u32,
}

// Longest first so that `==` wins over `=`.
const OPERATORS: &[&str] = &[
    "**=", "//=", ">>=", "<<=", "**", "//", "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=", "%=",
    "&=", "|=", "^=", "@=", "->", ":=", "<<", ">>", "+", "-", "*", "/", "%", "=", "<", ">", "(",
    ")", ",", ":", ".", "[", "]", "{", "}", "@", "&", "|", "^", "~", ";",
];

const STRING_PREFIXES: &[&str] = &["f", "r", "b", "u", "rb", "br", "fr", "rf"];

pub(crate) fn split_lines(source: &str, indent_unit: u32) -> Result<Vec<LogicalLine>, ParseError> {
    let normalized;
    let text = if source.contains('\r') {
        normalized = source.replace("\r\n", "\n").replace('\r', "\n");
        normalized.as_str()
    } else {
        source
    };

    let mut out = Vec::new();
    for (idx, raw) in text.split('\n').enumerate() {
        let line_no = u32::try_from(idx + 1).unwrap_or(u32::MAX);
        if let Some(pos) = raw.chars().position(|c| c == '\t') {
            return Err(ParseError::syntax(line_no, pos as u32 + 1, "tab characters are not allowed"));
        }
        let spaces = raw.chars().take_while(|&c| c == ' ').count();
        let tokens = tokenize(&raw[spaces..], line_no, spaces as u32 + 1)?;
        if tokens.is_empty() {
            continue;
        }
        if !(spaces as u32).is_multiple_of(indent_unit) {
            return Err(ParseError::syntax(
                line_no,
                1,
                format!("indentation of {spaces} spaces is not a multiple of {indent_unit}"),
            ));
        }
        out.push(LogicalLine {
            line: line_no,
            depth: spaces as u32 / indent_unit,
            tokens,
            end_col: raw.trim_end().chars().count() as u32 + 1,
        });
    }
    Ok(out)
}

fn tokenize(rest: &str, line: u32, first_col: u32) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = rest.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = first_col + i as u32;
        match c {
            ' ' => i += 1,
            '#' => break,
            '\\' => return Err(ParseError::unsupported(line, "line continuation")),
            '"' | '\'' => {
                let (value, next) = lex_string(&chars, i, line, col)?;
                tokens.push(Token { tok: Tok::Str(value), col });
                i = next;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == '.' || chars[i] == 'e' || chars[i] == 'E') {
                    return Err(ParseError::unsupported(line, "float literal"));
                }
                if i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    return Err(ParseError::syntax(line, col, "invalid number literal"));
                }
                let digits: String = chars[start..i].iter().collect();
                if digits.len() > 1 && digits.starts_with('0') {
                    return Err(ParseError::syntax(line, col, "leading zeros are not permitted in integer literals"));
                }
                let value = digits
                    .parse::<u64>()
                    .map_err(|_| ParseError::syntax(line, col, "integer literal is too large"))?;
                tokens.push(Token { tok: Tok::Int(value), col });
            }
            c if c == '_' || c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && (chars[i] == '_' || chars[i].is_ascii_alphanumeric()) {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                if i < chars.len() && (chars[i] == '"' || chars[i] == '\'') {
                    let lower = word.to_ascii_lowercase();
                    if STRING_PREFIXES.contains(&lower.as_str()) {
                        return Err(ParseError::unsupported(line, format!("{lower}-string literal")));
                    }
                }
                if i < chars.len() && !chars[i].is_ascii() && chars[i].is_alphanumeric() {
                    return Err(ParseError::syntax(line, first_col + i as u32, "identifiers must be ASCII"));
                }
                tokens.push(Token { tok: Tok::Name(word), col });
            }
            '.' if chars.get(i + 1).is_some_and(char::is_ascii_digit) => {
                return Err(ParseError::unsupported(line, "float literal"));
            }
            _ => {
                let op = OPERATORS.iter().find(|op| {
                    op.chars().enumerate().all(|(k, oc)| chars.get(i + k) == Some(&oc))
                });
                match op {
                    Some(op) => {
                        tokens.push(Token { tok: Tok::Op(op), col });
                        i += op.chars().count();
                    }
                    None => {
                        return Err(ParseError::syntax(line, col, format!("unexpected character {c:?}")));
                    }
                }
            }
        }
    }
    Ok(tokens)
}

fn lex_string(chars: &[char], start: usize, line: u32, col: u32) -> Result<(String, usize), ParseError> {
    let quote = chars[start];
    if chars.get(start + 1) == Some(&quote) && chars.get(start + 2) == Some(&quote) {
        return Err(ParseError::unsupported(line, "triple-quoted string"));
    }
    let mut value = String::new();
    let mut i = start + 1;
    while i < chars.len() {
        match chars[i] {
            c if c == quote => return Ok((value, i + 1)),
            '\\' => {
                let Some(&next) = chars.get(i + 1) else { break };
                match next {
                    'n' => value.push('\n'),
                    't' => value.push('\t'),
                    '\\' => value.push('\\'),
                    '\'' => value.push('\''),
                    '"' => value.push('"'),
                    other => {
                        value.push('\\');
                        value.push(other);
                    }
                }
                i += 2;
            }
            c => {
                value.push(c);
                i += 1;
            }
        }
    }
    Err(ParseError::syntax(line, col, "unterminated string literal"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s, 1, 1).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn operators_use_longest_match() {
        assert_eq!(toks("a<=b"), vec![Tok::Name("a".into()), Tok::Op("<="), Tok::Name("b".into())]);
        assert_eq!(toks("x == 1"), vec![Tok::Name("x".into()), Tok::Op("=="), Tok::Int(1)]);
    }

    #[test]
    fn comments_are_dropped() {
        assert_eq!(toks("x = 1  # set x"), vec![Tok::Name("x".into()), Tok::Op("="), Tok::Int(1)]);
        assert!(toks("# only a comment").is_empty());
        assert_eq!(toks("s = '#'"), vec![Tok::Name("s".into()), Tok::Op("="), Tok::Str("#".into())]);
    }

    #[test]
    fn string_escapes() {
        assert_eq!(toks(r#""a\"b\n""#), vec![Tok::Str("a\"b\n".into())]);
        assert_eq!(toks(r"'it\'s'"), vec![Tok::Str("it's".into())]);
    }

    #[test]
    fn rejects_tabs_with_position() {
        let err = split_lines("x = 1\n\tprint(x)", 4).unwrap_err();
        assert_eq!(err, ParseError::syntax(2, 1, "tab characters are not allowed"));
    }

    #[test]
    fn rejects_ragged_indentation() {
        let err = split_lines("if x:\n  y = 1", 4).unwrap_err();
        assert!(matches!(err, ParseError::SyntaxError { line: 2, .. }));
        assert!(split_lines("if x:\n  y = 1", 2).is_ok());
    }

    #[test]
    fn skips_blank_and_comment_lines() {
        let lines = split_lines("\n# c\nx = 1\n\n    \n", 4).unwrap();
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].line, 3);
    }

    #[test]
    fn crlf_is_normalized() {
        let lines = split_lines("x = 1\r\ny = 2\r\n", 4).unwrap();
        assert_eq!(lines.iter().map(|l| l.line).collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn unsupported_literals() {
        assert!(matches!(tokenize("1.5", 3, 1), Err(ParseError::UnsupportedConstruct { line: 3, .. })));
        assert!(matches!(tokenize("f'hi'", 1, 1), Err(ParseError::UnsupportedConstruct { .. })));
        assert!(matches!(tokenize("'''doc'''", 1, 1), Err(ParseError::UnsupportedConstruct { .. })));
        assert!(matches!(tokenize("'open", 1, 1), Err(ParseError::SyntaxError { .. })));
        assert!(matches!(tokenize("x = $", 1, 1), Err(ParseError::SyntaxError { col: 5, .. })));
    }
}
