// SPDX-License-Identifier: Apache-2.0

//! Mechanical description language: lexer, parser, validator and printer.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod validate;

use std::fmt;

use thiserror::Error;

pub use ast::*;
pub use lexer::{tokenize, Keyword, Punct, Token, TokenKind};
pub use parser::{parse_document, parse_source};
pub use printer::print_document;
pub use validate::{validate, Diagnostic, Severity};

/// Source position (1-based). Spans never take part in equality, so documents that differ
/// only in layout compare equal.
#[derive(Debug, Clone, Copy, Default, Eq)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub const fn new(line: u32, col: u32) -> Self {
        Span { line, col }
    }
}

impl PartialEq for Span {
    fn eq(&self, _other: &Span) -> bool {
        true
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Error)]
pub enum MdlError {
    #[error("{span}: {message}")]
    Lex { span: Span, message: String },
    #[error("{span}: {message}")]
    Parse { span: Span, message: String },
    #[error("{span}: duplicate {section} section")]
    DuplicateSection { span: Span, section: &'static str },
    #[error("{span}: missing behavior module")]
    MissingModule { span: Span },
}

impl MdlError {
    pub fn span(&self) -> Span {
        match self {
            MdlError::Lex { span, .. }
            | MdlError::Parse { span, .. }
            | MdlError::DuplicateSection { span, .. }
            | MdlError::MissingModule { span } => *span,
        }
    }
}
