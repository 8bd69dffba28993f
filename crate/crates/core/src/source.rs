//! Minimal lexical walker over Rust source text.
//!
//! Knows just enough about comments, string/char literals and raw strings to
//! find attribute openers that sit in real code, and to cut out a balanced
//! delimiter group. Nothing here understands Rust grammar beyond that.

/// Byte-level cursor that skips comments and literals.
#[derive(Debug, Clone)]
pub struct CodeCursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> CodeCursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Self { src, pos: 0 }
    }

    fn bytes(&self) -> &'a [u8] {
        self.src.as_bytes()
    }

    fn peek(&self, off: usize) -> Option<u8> {
        self.bytes().get(self.pos + off).copied()
    }

    /// If the cursor sits on a comment or literal, skip past it and return
    /// true. Unterminated constructs run to the end of input.
    fn skip_trivia_or_literal(&mut self) -> bool {
        let b = self.bytes();
        let Some(c) = self.peek(0) else { return false };
        match c {
            b'/' if self.peek(1) == Some(b'/') => {
                while self.pos < b.len() && b[self.pos] != b'\n' {
                    self.pos += 1;
                }
                true
            }
            b'/' if self.peek(1) == Some(b'*') => {
                self.pos += 2;
                let mut depth = 1usize;
                while self.pos < b.len() && depth > 0 {
                    if b[self.pos] == b'/' && self.peek(1) == Some(b'*') {
                        depth += 1;
                        self.pos += 2;
                    } else if b[self.pos] == b'*' && self.peek(1) == Some(b'/') {
                        depth -= 1;
                        self.pos += 2;
                    } else {
                        self.pos += 1;
                    }
                }
                true
            }
            b'"' => {
                self.skip_quoted();
                true
            }
            b'b' if self.peek(1) == Some(b'"') && !self.prev_is_ident() => {
                self.pos += 1;
                self.skip_quoted();
                true
            }
            b'r' | b'b' if !self.prev_is_ident() && self.raw_string_hashes().is_some() => {
                self.skip_raw_string();
                true
            }
            b'\'' => {
                self.skip_char_or_lifetime();
                true
            }
            _ => false,
        }
    }

    fn prev_is_ident(&self) -> bool {
        self.pos > 0 && {
            let p = self.bytes()[self.pos - 1];
            p.is_ascii_alphanumeric() || p == b'_'
        }
    }

    fn skip_quoted(&mut self) {
        let b = self.bytes();
        self.pos += 1;
        while self.pos < b.len() {
            match b[self.pos] {
                b'\\' => self.pos += 2,
                b'"' => {
                    self.pos += 1;
                    return;
                }
                _ => self.pos += 1,
            }
        }
        self.pos = self.pos.min(b.len());
    }

    /// Number of `#` in a raw string opener at the cursor (`r#"`, `br"`).
    fn raw_string_hashes(&self) -> Option<usize> {
        let b = self.bytes();
        let mut i = self.pos;
        if b.get(i) == Some(&b'b') {
            i += 1;
        }
        if b.get(i) != Some(&b'r') {
            return None;
        }
        i += 1;
        let mut hashes = 0;
        while b.get(i) == Some(&b'#') {
            hashes += 1;
            i += 1;
        }
        (b.get(i) == Some(&b'"')).then_some(hashes)
    }

    fn skip_raw_string(&mut self) {
        let hashes = self.raw_string_hashes().unwrap_or(0);
        let b = self.bytes();
        while self.pos < b.len() && b[self.pos] != b'"' {
            self.pos += 1;
        }
        self.pos += 1;
        while self.pos < b.len() {
            if b[self.pos] == b'"' && b[self.pos + 1..].iter().take(hashes).filter(|&&h| h == b'#').count() == hashes
            {
                self.pos += 1 + hashes;
                return;
            }
            self.pos += 1;
        }
    }

    fn skip_char_or_lifetime(&mut self) {
        let b = self.bytes();
        // '\n', '\'', '\u{..}'
        if self.peek(1) == Some(b'\\') {
            self.pos += 2;
            while self.pos < b.len() && b[self.pos] != b'\'' && b[self.pos] != b'\n' {
                self.pos += 1;
            }
            self.pos = (self.pos + 1).min(b.len());
            return;
        }
        // 'x' where x may be multi-byte
        let rest = &self.src[self.pos + 1..];
        if let Some(ch) = rest.chars().next() {
            let after = self.pos + 1 + ch.len_utf8();
            if b.get(after) == Some(&b'\'') {
                self.pos = after + 1;
                return;
            }
        }
        // lifetime or label
        self.pos += 1;
    }

    /// Advance one unit of code: skips a whole comment/literal or one char.
    pub fn bump(&mut self) {
        if !self.skip_trivia_or_literal() {
            let ch = self.src[self.pos..].chars().next().map_or(1, char::len_utf8);
            self.pos += ch;
        }
    }

    pub fn is_eof(&self) -> bool {
        self.pos >= self.src.len()
    }

    /// Position of the next occurrence of `pred` matching in code, leaving the
    /// cursor on it.
    pub fn find<F: Fn(&str) -> Option<usize>>(&mut self, pred: F) -> Option<(usize, usize)> {
        while !self.is_eof() {
            if self.skip_trivia_or_literal() {
                continue;
            }
            if let Some(len) = pred(&self.src[self.pos..]) {
                return Some((self.pos, len));
            }
            let ch = self.src[self.pos..].chars().next().map_or(1, char::len_utf8);
            self.pos += ch;
        }
        None
    }

    pub fn advance_to(&mut self, pos: usize) {
        self.pos = pos;
    }

    /// With the cursor on an opening delimiter, return the byte range of the
    /// group including both delimiters. Errors carry the offset of the
    /// offending byte.
    pub fn balanced_group(&mut self) -> Result<(usize, usize), usize> {
        let start = self.pos;
        let mut stack: Vec<u8> = Vec::new();
        while !self.is_eof() {
            if self.skip_trivia_or_literal() {
                continue;
            }
            let c = self.bytes()[self.pos];
            match c {
                b'(' | b'[' | b'{' => stack.push(c),
                b')' | b']' | b'}' => {
                    let open = match c {
                        b')' => b'(',
                        b']' => b'[',
                        _ => b'{',
                    };
                    if stack.pop() != Some(open) {
                        return Err(self.pos);
                    }
                    if stack.is_empty() {
                        self.pos += 1;
                        return Ok((start, self.pos));
                    }
                }
                _ => {}
            }
            self.bump();
        }
        Err(self.src.len())
    }
}

/// 1-based line number of a byte offset.
pub fn line_of(src: &str, offset: usize) -> usize {
    src.as_bytes()[..offset.min(src.len())].iter().filter(|&&b| b == b'\n').count() + 1
}
