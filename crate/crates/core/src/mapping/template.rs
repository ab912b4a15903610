//! `{expr}` placeholders inside mapping strings.
//!
//! ```text
//! template := (text | "{" expr "}")*
//! expr     := call | path
//! call     := ident "(" [expr ("," expr)*] ")"
//! path     := ident ("." ident)*
//! ```
//!
//! `{{` and `}}` stand for literal braces. Whitespace is allowed around
//! tokens inside a placeholder.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Path(Vec<String>),
    Call(String, Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Segment {
    Text(String),
    Placeholder(Expr),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub source: String,
    pub segments: Vec<Segment>,
}

impl Template {
    pub fn parse(source: &str) -> Result<Self> {
        let mut p = Parser { src: source, pos: 0 };
        let segments = p.template()?;
        Ok(Template {
            source: source.to_string(),
            segments,
        })
    }

    pub fn placeholders(&self) -> impl Iterator<Item = &Expr> {
        self.segments.iter().filter_map(|s| match s {
            Segment::Placeholder(e) => Some(e),
            Segment::Text(_) => None,
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Path(p) => f.write_str(&p.join(".")),
            Expr::Call(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, reason: impl Into<String>) -> Result<T> {
        Err(Error::TemplateSyntax {
            position: self.pos,
            reason: reason.into(),
        })
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn template(&mut self) -> Result<Vec<Segment>> {
        let mut out = Vec::new();
        let mut text = String::new();
        while let Some(c) = self.peek() {
            match c {
                '{' if self.src[self.pos..].starts_with("{{") => {
                    self.pos += 2;
                    text.push('{');
                }
                '}' if self.src[self.pos..].starts_with("}}") => {
                    self.pos += 2;
                    text.push('}');
                }
                '}' => return self.err("unmatched `}`"),
                '{' => {
                    self.bump();
                    if !text.is_empty() {
                        out.push(Segment::Text(std::mem::take(&mut text)));
                    }
                    self.skip_ws();
                    let e = self.expr()?;
                    self.skip_ws();
                    match self.bump() {
                        Some('}') => out.push(Segment::Placeholder(e)),
                        Some(c) => {
                            self.pos -= c.len_utf8();
                            return self.err(format!("expected `}}`, found `{c}`"));
                        }
                        None => return self.err("unterminated placeholder"),
                    }
                }
                c => {
                    self.bump();
                    text.push(c);
                }
            }
        }
        if !text.is_empty() {
            out.push(Segment::Text(text));
        }
        Ok(out)
    }

    fn ident(&mut self) -> Result<String> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
            Some(c) => return self.err(format!("expected identifier, found `{c}`")),
            None => return self.err("unterminated placeholder"),
        }
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
            self.bump();
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn expr(&mut self) -> Result<Expr> {
        let head = self.ident()?;
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.bump();
                let mut args = Vec::new();
                self.skip_ws();
                if self.peek() == Some(')') {
                    self.bump();
                    return Ok(Expr::Call(head, args));
                }
                loop {
                    self.skip_ws();
                    args.push(self.expr()?);
                    self.skip_ws();
                    match self.bump() {
                        Some(',') => continue,
                        Some(')') => return Ok(Expr::Call(head, args)),
                        Some(c) => {
                            self.pos -= c.len_utf8();
                            return self.err(format!("expected `,` or `)`, found `{c}`"));
                        }
                        None => return self.err("unterminated call"),
                    }
                }
            }
            _ => {
                let mut path = vec![head];
                while self.peek() == Some('.') {
                    self.bump();
                    path.push(self.ident()?);
                }
                Ok(Expr::Path(path))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(p: &[&str]) -> Expr {
        Expr::Path(p.iter().map(|s| s.to_string()).collect())
    }

    #[test]
    fn parses_figure_forms() {
        let t = Template::parse("http://data.urbandatacentre.ca/catalogue/{ckanField.id}").unwrap();
        assert_eq!(
            t.segments,
            [
                Segment::Text("http://data.urbandatacentre.ca/catalogue/".into()),
                Segment::Placeholder(path(&["ckanField", "id"]))
            ]
        );
        let t = Template::parse("{to_date(published_date)}").unwrap();
        assert_eq!(t.segments, [Segment::Placeholder(Expr::Call("to_date".into(), vec![path(&["published_date"])]))]);
        let t = Template::parse("{ generate_uuid( ) }").unwrap();
        assert_eq!(t.segments, [Segment::Placeholder(Expr::Call("generate_uuid".into(), vec![]))]);
        let t = Template::parse("{f(a.b, g(c))}").unwrap();
        assert_eq!(t.placeholders().next().unwrap().to_string(), "f(a.b, g(c))");
    }

    #[test]
    fn escapes_and_plain_text() {
        let t = Template::parse("{{x}} and }}").unwrap();
        assert_eq!(t.segments, [Segment::Text("{x} and }".into())]);
        assert_eq!(Template::parse("").unwrap().segments, []);
    }

    #[test]
    fn syntax_errors() {
        for (src, pos) in [("{ckanField.", 11), ("{a", 2), ("x}", 1), ("{}", 1), ("{f(a b)}", 5), ("{a.1}", 3), ("{f(a,", 5)] {
            match Template::parse(src) {
                Err(Error::TemplateSyntax { position, .. }) => assert_eq!(position, pos, "{src}"),
                other => panic!("{src}: {other:?}"),
            }
        }
    }
}
