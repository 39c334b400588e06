//! S-expression reader with source positions.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum SexpKind {
    /// Symbol, numeral, decimal or keyword; `|quoted|` symbols lose their bars.
    Atom(String),
    Str(String),
    List(Vec<Sexp>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sexp {
    pub kind: SexpKind,
    pub line: usize,
    pub column: usize,
}

impl Sexp {
    pub fn as_atom(&self) -> Option<&str> {
        match &self.kind {
            SexpKind::Atom(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match &self.kind {
            SexpKind::List(v) => Some(v),
            _ => None,
        }
    }

    pub fn head(&self) -> Option<&str> {
        self.as_list().and_then(|l| l.first()).and_then(Sexp::as_atom)
    }

    pub fn error(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.line, self.column, msg)
    }

    pub fn unsupported(&self, what: impl Into<String>) -> Error {
        Error::unsupported(self.line, self.column, what)
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl Reader<'_> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Option<Sexp>> {
        self.skip_trivia();
        let (line, column) = (self.line, self.column);
        let Some(&c) = self.chars.peek() else {
            return Ok(None);
        };
        let kind = match c {
            '(' => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => return Err(Error::parse(line, column, "unclosed '('")),
                        Some(')') => {
                            self.bump();
                            break;
                        }
                        Some(_) => items.push(self.read()?.expect("peeked a char")),
                    }
                }
                SexpKind::List(items)
            }
            ')' => return Err(Error::parse(line, column, "unexpected ')'")),
            '"' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return Err(Error::parse(line, column, "unterminated string")),
                        Some('"') => {
                            // "" is an escaped quote
                            if self.chars.peek() == Some(&'"') {
                                self.bump();
                                s.push('"');
                            } else {
                                break;
                            }
                        }
                        Some(c) => s.push(c),
                    }
                }
                SexpKind::Str(s)
            }
            '|' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return Err(Error::parse(line, column, "unterminated |symbol|")),
                        Some('|') => break,
                        Some(c) => s.push(c),
                    }
                }
                SexpKind::Atom(s)
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | ';' | '"' | '|') {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                SexpKind::Atom(s)
            }
        };
        Ok(Some(Sexp { kind, line, column }))
    }
}

/// Reads every top-level s-expression in `text`.
pub fn read_all(text: &str) -> Result<Vec<Sexp>> {
    let mut r = Reader {
        chars: text.chars().peekable(),
        line: 1,
        column: 1,
    };
    let mut out = Vec::new();
    while let Some(s) = r.read()? {
        out.push(s);
    }
    Ok(out)
}

/// Paren balance of a chunk of text, ignoring strings, quoted symbols and comments.
pub(crate) fn paren_depth(text: &str) -> i64 {
    let mut depth = 0;
    let mut in_str = false;
    let mut in_bar = false;
    let mut in_comment = false;
    for c in text.chars() {
        if in_comment {
            in_comment = c != '\n';
            continue;
        }
        match c {
            '"' if !in_bar => in_str = !in_str,
            '|' if !in_str => in_bar = !in_bar,
            ';' if !in_str && !in_bar => in_comment = true,
            '(' if !in_str && !in_bar => depth += 1,
            ')' if !in_str && !in_bar => depth -= 1,
            _ => {}
        }
    }
    depth
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_with_positions() {
        let v = read_all("; comment\n(assert\n  (or a |b c|))").unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].line, v[0].column), (2, 1));
        let items = v[0].as_list().unwrap();
        let or = &items[1];
        assert_eq!((or.line, or.column), (3, 3));
        assert_eq!(or.as_list().unwrap()[2].as_atom(), Some("b c"));
    }

    #[test]
    fn reports_unbalanced_input() {
        let e = read_all("(assert (a)").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, column: 1, .. }), "{e}");
        let e = read_all("a )").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, column: 3, .. }), "{e}");
    }

    #[test]
    fn depth_ignores_quoted_parens() {
        assert_eq!(paren_depth("(a \"(\" |)|"), 1);
        assert_eq!(paren_depth("(a) ; (("), 0);
    }
}
