use super::{ParseError, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    /// Unsigned decimal literal, kept as text for exact conversion.
    Number(String),
    Sym(&'static str),
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(s) => format!("number `{s}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: Span,
}

const SYMBOLS: [&str; 11] = ["->", "(", ")", "{", "}", ",", "+", "-", "*", "/", "="];

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut last = Span { line: 1, column: 1 };
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        let span = Span { line, column: col };
        if c == '\n' {
            line += 1;
            col = 1;
            k += 1;
            continue;
        }
        if c.is_whitespace() {
            last = span;
            col += 1;
            k += 1;
            continue;
        }
        if c == '/' && chars.get(k + 1) == Some(&'/') {
            while k < chars.len() && chars[k] != '\n' {
                last = Span { line, column: col };
                k += 1;
                col += 1;
            }
            continue;
        }
        let start = k;
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            while k < chars.len() && (chars[k].is_ascii_alphanumeric() || chars[k] == '_') {
                k += 1;
            }
            Tok::Ident(chars[start..k].iter().collect())
        } else if c.is_ascii_digit() || (c == '.' && chars.get(k + 1).is_some_and(|d| d.is_ascii_digit())) {
            while k < chars.len() && chars[k].is_ascii_digit() {
                k += 1;
            }
            if k < chars.len() && chars[k] == '.' {
                k += 1;
                while k < chars.len() && chars[k].is_ascii_digit() {
                    k += 1;
                }
            }
            if k < chars.len() && (chars[k].is_ascii_alphabetic() || chars[k] == '_' || chars[k] == '.') {
                return Err(ParseError::Syntax {
                    line,
                    column: col + (k - start),
                    expected: "a number".into(),
                    found: format!("`{}`", chars[k]),
                });
            }
            Tok::Number(chars[start..k].iter().collect())
        } else {
            let rest: String = chars[k..chars.len().min(k + 2)].iter().collect();
            match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
                Some(s) => {
                    k += s.len();
                    Tok::Sym(s)
                }
                None => {
                    return Err(ParseError::Syntax {
                        line,
                        column: col,
                        expected: "a token".into(),
                        found: format!("`{c}`"),
                    })
                }
            }
        };
        col += k - start;
        last = Span { line, column: col - 1 };
        out.push(Token { tok, span });
    }
    out.push(Token { tok: Tok::Eof, span: last });
    Ok(out)
}
