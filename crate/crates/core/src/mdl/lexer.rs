// SPDX-License-Identifier: Apache-2.0

//! Tokenizer for MDL sources.

use std::fmt;

use super::MdlError;
use super::Span;

/// Reserved words of the MDL wrapper and of the accepted Verilog subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    MechanicalModule,
    EndMechanicalModule,
    Boundary,
    Line,
    Sensor,
    Actuator,
    Location,
    Values,
    Type,
    Module,
    EndModule,
    Input,
    Output,
    Wire,
    Reg,
    LocalParam,
    Always,
    Posedge,
    Begin,
    End,
    If,
    Else,
    Case,
    EndCase,
    Default,
}

impl Keyword {
    pub fn from_ident(word: &str) -> Option<Keyword> {
        use Keyword::*;
        Some(match word {
            "mechanicalmodule" => MechanicalModule,
            "endmechanicalmodule" => EndMechanicalModule,
            "boundary" => Boundary,
            "line" => Line,
            "sensor" => Sensor,
            "actuator" => Actuator,
            "location" => Location,
            "values" => Values,
            "type" => Type,
            "module" => Module,
            "endmodule" => EndModule,
            "input" => Input,
            "output" => Output,
            "wire" => Wire,
            "reg" => Reg,
            "localparam" => LocalParam,
            "always" => Always,
            "posedge" => Posedge,
            "begin" => Begin,
            "end" => End,
            "if" => If,
            "else" => Else,
            "case" => Case,
            "endcase" => EndCase,
            "default" => Default,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        use Keyword::*;
        match self {
            MechanicalModule => "mechanicalmodule",
            EndMechanicalModule => "endmechanicalmodule",
            Boundary => "boundary",
            Line => "line",
            Sensor => "sensor",
            Actuator => "actuator",
            Location => "location",
            Values => "values",
            Type => "type",
            Module => "module",
            EndModule => "endmodule",
            Input => "input",
            Output => "output",
            Wire => "wire",
            Reg => "reg",
            LocalParam => "localparam",
            Always => "always",
            Posedge => "posedge",
            Begin => "begin",
            End => "end",
            If => "if",
            Else => "else",
            Case => "case",
            EndCase => "endcase",
            Default => "default",
        }
    }
}

/// Punctuation and operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Punct {
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    At,
    Assign,
    /// `<=`, a nonblocking assignment in statement position.
    LessEq,
    EqEq,
    NotEq,
    AndAnd,
    OrOr,
    Bang,
    Tilde,
    Amp,
    Pipe,
    Caret,
    Minus,
}

impl Punct {
    pub fn as_str(self) -> &'static str {
        use Punct::*;
        match self {
            LBrace => "{",
            RBrace => "}",
            LParen => "(",
            RParen => ")",
            LBracket => "[",
            RBracket => "]",
            Comma => ",",
            Semi => ";",
            Colon => ":",
            At => "@",
            Assign => "=",
            LessEq => "<=",
            EqEq => "==",
            NotEq => "!=",
            AndAnd => "&&",
            OrOr => "||",
            Bang => "!",
            Tilde => "~",
            Amp => "&",
            Pipe => "|",
            Caret => "^",
            Minus => "-",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident(String),
    /// Unsigned decimal number, integral or fractional, kept as written.
    Number(String),
    /// Verilog based literal such as `2'd3` or `4'b000`.
    Based {
        width: Option<u32>,
        base: char,
        digits: String,
    },
    Str(String),
    Punct(Punct),
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Keyword(k) => write!(f, "keyword `{}`", k.as_str()),
            TokenKind::Ident(s) => write!(f, "identifier `{s}`"),
            TokenKind::Number(s) => write!(f, "number `{s}`"),
            TokenKind::Based { width, base, digits } => match width {
                Some(w) => write!(f, "literal `{w}'{base}{digits}`"),
                None => write!(f, "literal `'{base}{digits}`"),
            },
            TokenKind::Str(s) => write!(f, "string \"{s}\""),
            TokenKind::Punct(p) => write!(f, "`{}`", p.as_str()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl<'a> Cursor<'a> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn span(&self) -> Span {
        Span::new(self.line, self.col)
    }

    fn eat_while(&mut self, mut pred: impl FnMut(char) -> bool, out: &mut String) {
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            out.push(c);
            self.bump();
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '$'
}

/// Splits MDL source text into tokens. `//` and `/* */` comments are dropped.
pub fn tokenize(source: &str) -> Result<Vec<Token>, MdlError> {
    let mut cur = Cursor {
        chars: source.chars().peekable(),
        line: 1,
        col: 1,
    };
    let mut tokens = Vec::new();
    while let Some(c) = cur.peek() {
        let span = cur.span();
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '/' {
            cur.bump();
            match cur.peek() {
                Some('/') => {
                    while let Some(c) = cur.peek() {
                        if c == '\n' {
                            break;
                        }
                        cur.bump();
                    }
                    continue;
                }
                Some('*') => {
                    cur.bump();
                    let mut prev = '\0';
                    let mut closed = false;
                    while let Some(c) = cur.bump() {
                        if prev == '*' && c == '/' {
                            closed = true;
                            break;
                        }
                        prev = c;
                    }
                    if !closed {
                        return Err(MdlError::Lex {
                            span,
                            message: "unterminated block comment".into(),
                        });
                    }
                    continue;
                }
                _ => {
                    return Err(MdlError::Lex {
                        span,
                        message: "illegal character `/`".into(),
                    })
                }
            }
        }
        let kind = if is_ident_start(c) {
            let mut word = String::new();
            cur.eat_while(is_ident_continue, &mut word);
            match Keyword::from_ident(&word) {
                Some(k) => TokenKind::Keyword(k),
                None => TokenKind::Ident(word),
            }
        } else if c.is_ascii_digit() {
            let mut num = String::new();
            cur.eat_while(|c| c.is_ascii_digit() || c == '_', &mut num);
            if cur.peek() == Some('\'') {
                cur.bump();
                let width: u32 = num.replace('_', "").parse().map_err(|_| MdlError::Lex {
                    span,
                    message: format!("invalid literal width `{num}`"),
                })?;
                based_literal(&mut cur, span, Some(width))?
            } else {
                if cur.peek() == Some('.') {
                    num.push('.');
                    cur.bump();
                    cur.eat_while(|c| c.is_ascii_digit(), &mut num);
                }
                TokenKind::Number(num)
            }
        } else if c == '\'' {
            cur.bump();
            based_literal(&mut cur, span, None)?
        } else if c == '"' {
            cur.bump();
            let mut text = String::new();
            loop {
                match cur.bump() {
                    Some('"') => break,
                    Some('\n') | None => {
                        return Err(MdlError::Lex {
                            span,
                            message: "unterminated string".into(),
                        })
                    }
                    Some('\\') => match cur.bump() {
                        Some(e) => text.push(e),
                        None => {
                            return Err(MdlError::Lex {
                                span,
                                message: "unterminated string".into(),
                            })
                        }
                    },
                    Some(ch) => text.push(ch),
                }
            }
            TokenKind::Str(text)
        } else {
            cur.bump();
            let two = |cur: &mut Cursor, next: char, yes: Punct, no: Punct| {
                if cur.peek() == Some(next) {
                    cur.bump();
                    yes
                } else {
                    no
                }
            };
            let p = match c {
                '{' => Punct::LBrace,
                '}' => Punct::RBrace,
                '(' => Punct::LParen,
                ')' => Punct::RParen,
                '[' => Punct::LBracket,
                ']' => Punct::RBracket,
                ',' => Punct::Comma,
                ';' => Punct::Semi,
                ':' => Punct::Colon,
                '@' => Punct::At,
                '~' => Punct::Tilde,
                '^' => Punct::Caret,
                '-' => Punct::Minus,
                '=' => two(&mut cur, '=', Punct::EqEq, Punct::Assign),
                '!' => two(&mut cur, '=', Punct::NotEq, Punct::Bang),
                '&' => two(&mut cur, '&', Punct::AndAnd, Punct::Amp),
                '|' => two(&mut cur, '|', Punct::OrOr, Punct::Pipe),
                '<' if cur.peek() == Some('=') => {
                    cur.bump();
                    Punct::LessEq
                }
                other => {
                    return Err(MdlError::Lex {
                        span,
                        message: format!("illegal character `{other}`"),
                    })
                }
            };
            TokenKind::Punct(p)
        };
        tokens.push(Token { kind, span });
    }
    Ok(tokens)
}

fn based_literal(cur: &mut Cursor, span: Span, width: Option<u32>) -> Result<TokenKind, MdlError> {
    let base = match cur.bump().map(|c| c.to_ascii_lowercase()) {
        Some(b @ ('b' | 'd' | 'h' | 'o')) => b,
        _ => {
            return Err(MdlError::Lex {
                span,
                message: "expected base `b`, `d`, `h` or `o` after `'`".into(),
            })
        }
    };
    let mut digits = String::new();
    cur.eat_while(|c| c.is_ascii_hexdigit() || c == '_', &mut digits);
    if digits.is_empty() {
        return Err(MdlError::Lex {
            span,
            message: "based literal without digits".into(),
        });
    }
    Ok(TokenKind::Based { width, base, digits })
}
