use super::PredicateError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Str(String),
    LParen,
    RParen,
    Comma,
    Eq,
    /// `::` inside attribute paths.
    PathSep,
    /// Anything else the attribute scanner has to step over.
    Other(char),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub offset: usize,
}

/// Tokenize predicate/attribute text. Comments are skipped; `base` is added to
/// every reported offset.
pub(crate) fn lex(text: &str, base: usize) -> Result<Vec<Token>, PredicateError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'/' if bytes.get(i + 1) == Some(&b'/') => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'/' if bytes.get(i + 1) == Some(&b'*') => {
                i += 2;
                let mut depth = 1;
                while i < bytes.len() && depth > 0 {
                    if bytes[i] == b'/' && bytes.get(i + 1) == Some(&b'*') {
                        depth += 1;
                        i += 2;
                    } else if bytes[i] == b'*' && bytes.get(i + 1) == Some(&b'/') {
                        depth -= 1;
                        i += 2;
                    } else {
                        i += 1;
                    }
                }
                if depth > 0 {
                    return Err(PredicateError::Syntax { offset: base + start, message: "unterminated block comment".into() });
                }
            }
            b'(' => {
                out.push(Token { tok: Tok::LParen, offset: base + i });
                i += 1;
            }
            b')' => {
                out.push(Token { tok: Tok::RParen, offset: base + i });
                i += 1;
            }
            b',' => {
                out.push(Token { tok: Tok::Comma, offset: base + i });
                i += 1;
            }
            b'=' => {
                out.push(Token { tok: Tok::Eq, offset: base + i });
                i += 1;
            }
            b':' if bytes.get(i + 1) == Some(&b':') => {
                out.push(Token { tok: Tok::PathSep, offset: base + i });
                i += 2;
            }
            b'"' => {
                i += 1;
                let mut value = String::new();
                loop {
                    let Some(&b) = bytes.get(i) else {
                        return Err(PredicateError::Syntax {
                            offset: base + start,
                            message: "unterminated string literal".into(),
                        });
                    };
                    match b {
                        b'"' => {
                            i += 1;
                            break;
                        }
                        b'\\' => {
                            let esc = bytes.get(i + 1).copied();
                            value.push(match esc {
                                Some(b'n') => '\n',
                                Some(b't') => '\t',
                                Some(b'r') => '\r',
                                Some(b'0') => '\0',
                                Some(b'\\') => '\\',
                                Some(b'"') => '"',
                                Some(b'\'') => '\'',
                                _ => {
                                    return Err(PredicateError::Syntax {
                                        offset: base + i,
                                        message: "unsupported escape".into(),
                                    })
                                }
                            });
                            i += 2;
                        }
                        _ => {
                            let ch = text[i..].chars().next().expect("in bounds");
                            value.push(ch);
                            i += ch.len_utf8();
                        }
                    }
                }
                out.push(Token { tok: Tok::Str(value), offset: base + start });
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token { tok: Tok::Ident(text[start..i].to_string()), offset: base + start });
            }
            _ => {
                let ch = text[i..].chars().next().expect("in bounds");
                out.push(Token { tok: Tok::Other(ch), offset: base + i });
                i += ch.len_utf8();
            }
        }
    }
    Ok(out)
}
