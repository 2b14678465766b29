use super::{ParseError, SourceSpan};

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    Keyword(&'static str),
    Number(f64),
    Str(String),
    Symbol(&'static str),
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
    /// Source text of the token.
    pub text: String,
}

pub const KEYWORDS: &[&str] = &[
    "model", "device", "cpu", "memory", "battery", "link", "connects", "bandwidth", "component",
    "contextual", "connector", "port", "data", "in", "out", "context", "control", "qos", "role",
    "source", "sink", "service", "reduce", "quality", "high", "medium", "low", "requires",
    "param", "configuration", "level", "PIM", "CPIM", "use", "as", "with", "attach", "to",
    "deploy", "on", "buffer", "capacity", "fill", "drain", "weight", "family", "member",
    "subfamily", "state", "transition", "event", "overflow", "underflow", "fault", "move", "do",
    "set", "add", "remove", "substitute", "attachsub", "detachsub", "moveto", "thresholds",
    "coupling", "cohesion", "complexity", "MIPS", "MB", "kbps", "KB",
];

const SYMBOLS: &[&str] = &[
    "<=", ">=", "->", "{", "}", ";", "=", ",", ".", ":", "(", ")", "%",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !is_keyword(s)
}

pub fn tokenize(input: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = input.chars().collect();
    let mut tokens = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);

    macro_rules! advance {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance!();
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                advance!();
            }
            continue;
        }
        let (start, sline, scol) = (i, line, col);
        let kind = if c.is_ascii_alphabetic() {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                advance!();
            }
            let word: String = chars[start..i].iter().collect();
            match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => TokenKind::Keyword(k),
                None => TokenKind::Ident(word),
            }
        } else if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance!();
            }
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                advance!();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    advance!();
                }
            }
            let text: String = chars[start..i].iter().collect();
            // Digits with an optional fraction always parse.
            TokenKind::Number(text.parse().expect("decimal literal"))
        } else if c == '"' {
            advance!();
            let mut value = String::new();
            loop {
                if i >= chars.len() || chars[i] == '\n' {
                    return Err(ParseError::new(
                        SourceSpan::new(sline, scol, i - start),
                        "closing '\"'",
                        "end of line",
                    ));
                }
                match chars[i] {
                    '"' => {
                        advance!();
                        break;
                    }
                    '\\' if i + 1 < chars.len() && matches!(chars[i + 1], '"' | '\\') => {
                        advance!();
                        value.push(chars[i]);
                        advance!();
                    }
                    ch => {
                        value.push(ch);
                        advance!();
                    }
                }
            }
            TokenKind::Str(value)
        } else {
            let rest: String = chars[i..(i + 2).min(chars.len())].iter().collect();
            match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
                Some(sym) => {
                    for _ in 0..sym.len() {
                        advance!();
                    }
                    TokenKind::Symbol(sym)
                }
                None => {
                    return Err(ParseError::new(
                        SourceSpan::new(sline, scol, 1),
                        "a token",
                        c.to_string(),
                    ))
                }
            }
        };
        tokens.push(Token {
            kind,
            span: SourceSpan::new(sline, scol, i - start),
            text: chars[start..i].iter().collect(),
        });
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        span: SourceSpan::new(line, col, 0),
        text: String::new(),
    });
    Ok(tokens)
}
