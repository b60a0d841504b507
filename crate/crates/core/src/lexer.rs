//! Tokenizer shared by the Turtle and SPARQL-subset parsers.

use crate::turtle::{DiagnosticKind, ParseDiagnostic};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    /// `<...>` with escapes resolved, not yet resolved against a base.
    IriRef(String),
    /// `prefix:local`; an empty local part is a bare namespace name.
    PName { prefix: String, local: String },
    Blank(String),
    Var(String),
    Str(String),
    LangTag(String),
    AtKeyword(String),
    Integer(String),
    Decimal(String),
    Double(String),
    Word(String),
    Punct(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
    pub lexeme: String,
}

impl Token {
    pub fn diagnostic(&self, kind: DiagnosticKind, message: impl Into<String>) -> ParseDiagnostic {
        ParseDiagnostic {
            line: self.line,
            column: self.column,
            message: message.into(),
            lexeme: self.lexeme.clone(),
            kind,
        }
    }

    pub fn is_word(&self, word: &str) -> bool {
        matches!(&self.tok, Tok::Word(w) if w.eq_ignore_ascii_case(word))
    }

    pub fn is_punct(&self, p: &str) -> bool {
        matches!(&self.tok, Tok::Punct(q) if *q == p)
    }
}

pub(crate) struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
    peeked: Option<Token>,
    /// Position of the last token handed out, for end-of-input diagnostics.
    last: Option<Token>,
    after_string: bool,
}

const PUNCT: &[(&str, &str)] = &[
    ("!=", "!="),
    ("^^", "^^"),
    ("&&", "&&"),
    ("||", "||"),
    ("<=", "<="),
    (">=", ">="),
    (".", "."),
    (";", ";"),
    (",", ","),
    ("{", "{"),
    ("}", "}"),
    ("(", "("),
    (")", ")"),
    ("[", "["),
    ("]", "]"),
    ("=", "="),
    ("*", "*"),
    ("/", "/"),
    ("|", "|"),
    ("^", "^"),
    ("+", "+"),
    ("-", "-"),
    ("!", "!"),
    ("?", "?"),
    ("<", "<"),
    (">", ">"),
];

impl Lexer {
    pub fn new(input: &str) -> Self {
        Lexer {
            chars: input.chars().collect(),
            pos: 0,
            line: 1,
            column: 1,
            peeked: None,
            last: None,
            after_string: false,
        }
    }

    pub fn peek(&mut self) -> Result<&Token, ParseDiagnostic> {
        if self.peeked.is_none() {
            let token = self.lex()?;
            self.peeked = Some(token);
        }
        Ok(self.peeked.as_ref().expect("just filled"))
    }

    pub fn next_token(&mut self) -> Result<Token, ParseDiagnostic> {
        let token = match self.peeked.take() {
            Some(t) => t,
            None => self.lex()?,
        };
        if token.tok != Tok::Eof {
            self.last = Some(token.clone());
        }
        Ok(token)
    }

    /// An error located at the most recent real token, used when input ends
    /// early so the position still points inside the input.
    pub fn eof_diagnostic(&self, message: impl Into<String>) -> ParseDiagnostic {
        match &self.last {
            Some(t) => t.diagnostic(DiagnosticKind::Syntax, message),
            None => ParseDiagnostic {
                line: 1,
                column: 1,
                message: message.into(),
                lexeme: String::new(),
                kind: DiagnosticKind::Syntax,
            },
        }
    }

    fn cur(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.cur()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.cur() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.cur() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    fn error(&self, line: usize, column: usize, lexeme: String, message: impl Into<String>) -> ParseDiagnostic {
        ParseDiagnostic {
            line,
            column,
            message: message.into(),
            lexeme,
            kind: DiagnosticKind::Syntax,
        }
    }

    fn lex(&mut self) -> Result<Token, ParseDiagnostic> {
        self.skip_trivia();
        let (line, column, start) = (self.line, self.column, self.pos);
        let after_string = std::mem::replace(&mut self.after_string, false);
        let Some(c) = self.cur() else {
            return Ok(Token {
                tok: Tok::Eof,
                line,
                column,
                lexeme: String::new(),
            });
        };
        let tok = match c {
            '<' if self.looks_like_iri() => self.lex_iri(line, column)?,
            '"' | '\'' => {
                let s = self.lex_string(line, column)?;
                self.after_string = true;
                Tok::Str(s)
            }
            '@' => {
                self.bump();
                let word = self.take_while(|c| c.is_ascii_alphanumeric() || c == '-');
                if word.is_empty() {
                    return Err(self.error(line, column, "@".into(), "expected a keyword or language tag after '@'"));
                }
                if after_string {
                    Tok::LangTag(word)
                } else {
                    Tok::AtKeyword(word)
                }
            }
            '?' | '$' if self.at(1).is_some_and(is_name_char) => {
                self.bump();
                Tok::Var(self.take_while(is_name_char))
            }
            '_' if self.at(1) == Some(':') => {
                self.bump();
                self.bump();
                let label = self.take_local();
                if label.is_empty() {
                    return Err(self.error(line, column, "_:".into(), "empty blank node label"));
                }
                Tok::Blank(label)
            }
            ':' => {
                self.bump();
                Tok::PName {
                    prefix: String::new(),
                    local: self.take_local(),
                }
            }
            c if c.is_ascii_digit()
                || (matches!(c, '+' | '-') && self.at(1).is_some_and(|d| d.is_ascii_digit()))
                || (c == '.' && self.at(1).is_some_and(|d| d.is_ascii_digit())) =>
            {
                self.lex_number()
            }
            c if c.is_alphabetic() || c == '_' => {
                let word = self.take_while(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'));
                // A trailing '.' terminates the statement rather than the name.
                let word = self.give_back_dots(word);
                if self.cur() == Some(':') {
                    self.bump();
                    Tok::PName {
                        prefix: word,
                        local: self.take_local(),
                    }
                } else {
                    Tok::Word(word)
                }
            }
            _ => {
                let rest: String = self.chars[self.pos..].iter().take(2).collect();
                match PUNCT.iter().find(|(text, _)| rest.starts_with(text)) {
                    Some((text, p)) => {
                        for _ in 0..text.chars().count() {
                            self.bump();
                        }
                        Tok::Punct(p)
                    }
                    None => {
                        self.bump();
                        return Err(self.error(line, column, c.to_string(), format!("unexpected character '{c}'")));
                    }
                }
            }
        };
        let lexeme: String = self.chars[start..self.pos].iter().collect();
        Ok(Token {
            tok,
            line,
            column,
            lexeme,
        })
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut out = String::new();
        while let Some(c) = self.cur() {
            if !pred(c) {
                break;
            }
            out.push(c);
            self.bump();
        }
        out
    }

    fn give_back_dots(&mut self, mut word: String) -> String {
        while word.ends_with('.') {
            word.pop();
            self.pos -= 1;
            self.column -= 1;
        }
        word
    }

    /// Local part of a prefixed name or blank node label.
    fn take_local(&mut self) -> String {
        let word = self.take_while(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':' | '%'));
        self.give_back_dots(word)
    }

    fn looks_like_iri(&self) -> bool {
        for c in self.chars[self.pos + 1..].iter() {
            match c {
                '>' => return true,
                c if c.is_whitespace() || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') => return false,
                _ => {}
            }
        }
        false
    }

    fn lex_iri(&mut self, line: usize, column: usize) -> Result<Tok, ParseDiagnostic> {
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                Some('>') => return Ok(Tok::IriRef(out)),
                Some('\\') => out.push(self.lex_unicode_escape(line, column)?),
                Some(c) => out.push(c),
                None => return Err(self.error(line, column, format!("<{out}"), "unterminated IRI")),
            }
        }
    }

    fn lex_unicode_escape(&mut self, line: usize, column: usize) -> Result<char, ParseDiagnostic> {
        let width = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            other => {
                return Err(self.error(
                    line,
                    column,
                    format!("\\{}", other.map(String::from).unwrap_or_default()),
                    "invalid escape sequence",
                ))
            }
        };
        let hex: String = (0..width).filter_map(|_| self.bump()).collect();
        u32::from_str_radix(&hex, 16)
            .ok()
            .filter(|_| hex.len() == width)
            .and_then(char::from_u32)
            .ok_or_else(|| self.error(line, column, hex.clone(), "invalid unicode escape"))
    }

    fn lex_string(&mut self, line: usize, column: usize) -> Result<String, ParseDiagnostic> {
        let quote = self.bump().expect("caller saw a quote");
        let long = self.cur() == Some(quote) && self.at(1) == Some(quote);
        if long {
            self.bump();
            self.bump();
        } else if self.cur() == Some(quote) {
            self.bump();
            return Ok(String::new());
        }
        let mut out = String::new();
        loop {
            let Some(c) = self.bump() else {
                return Err(self.error(line, column, out, "unterminated string literal"));
            };
            match c {
                c if c == quote && !long => return Ok(out),
                c if c == quote => {
                    let mut run = 1;
                    while self.at(run - 1) == Some(quote) {
                        run += 1;
                    }
                    if run < 3 {
                        out.push(c);
                        continue;
                    }
                    // The last three quotes close the string; any before belong to it.
                    for _ in 0..run - 3 {
                        out.push(quote);
                    }
                    for _ in 0..run - 1 {
                        self.bump();
                    }
                    return Ok(out);
                }
                '\n' | '\r' if !long => {
                    return Err(self.error(line, column, out, "line break in single-line string literal"))
                }
                '\\' => {
                    let escaped = match self.cur() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') | Some('U') => {
                            out.push(self.lex_unicode_escape(line, column)?);
                            continue;
                        }
                        _ => return Err(self.error(self.line, self.column, "\\".into(), "invalid escape sequence")),
                    };
                    self.bump();
                    out.push(escaped);
                }
                c => out.push(c),
            }
        }
    }

    fn lex_number(&mut self) -> Tok {
        let mut text = String::new();
        if let Some(sign @ ('+' | '-')) = self.cur() {
            text.push(sign);
            self.bump();
        }
        text.push_str(&self.take_while(|c| c.is_ascii_digit()));
        let mut decimal = false;
        if self.cur() == Some('.') && self.at(1).is_some_and(|c| c.is_ascii_digit()) {
            decimal = true;
            text.push('.');
            self.bump();
            text.push_str(&self.take_while(|c| c.is_ascii_digit()));
        }
        let exponent_follows = matches!(self.cur(), Some('e' | 'E'))
            && (self.at(1).is_some_and(|c| c.is_ascii_digit())
                || (matches!(self.at(1), Some('+' | '-')) && self.at(2).is_some_and(|c| c.is_ascii_digit())));
        if exponent_follows {
            text.push(self.bump().expect("checked"));
            if let Some(sign @ ('+' | '-')) = self.cur() {
                text.push(sign);
                self.bump();
            }
            text.push_str(&self.take_while(|c| c.is_ascii_digit()));
            Tok::Double(text)
        } else if decimal {
            Tok::Decimal(text)
        } else {
            Tok::Integer(text)
        }
    }
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}
