// SPDX-License-Identifier: Apache-2.0

//! Recursive-descent parser. Delimiters are accepted leniently: trailing commas inside
//! braces and the `;` after a closing brace are optional.

use super::ast::*;
use super::lexer::{tokenize, Keyword, Punct, Token, TokenKind};
use super::{MdlError, Span};

/// Tokenizes and parses a complete MDL source.
pub fn parse_source(source: &str) -> Result<MdlDocument, MdlError> {
    parse_document(&tokenize(source)?)
}

pub fn parse_document(tokens: &[Token]) -> Result<MdlDocument, MdlError> {
    let mut p = Parser { tokens, pos: 0 };
    let doc = p.document()?;
    if let Some(tok) = p.peek() {
        return Err(p.error_at(tok.span, format!("unexpected {} after end of document", tok.kind)));
    }
    Ok(doc)
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
}

type PResult<T> = Result<T, MdlError>;

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<&'t TokenKind> {
        self.peek().map(|t| &t.kind)
    }

    fn span(&self) -> Span {
        match self.peek() {
            Some(t) => t.span,
            None => self.tokens.last().map(|t| t.span).unwrap_or(Span::new(1, 1)),
        }
    }

    fn error_at(&self, span: Span, message: String) -> MdlError {
        MdlError::Parse { span, message }
    }

    fn unexpected(&self, expected: &str) -> MdlError {
        match self.peek() {
            Some(t) => self.error_at(t.span, format!("expected {expected}, found {}", t.kind)),
            None => self.error_at(self.span(), format!("expected {expected}, found end of input")),
        }
    }

    fn bump(&mut self) -> Option<&'t Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn at_punct(&self, p: Punct) -> bool {
        matches!(self.peek_kind(), Some(TokenKind::Punct(q)) if *q == p)
    }

    fn at_kw(&self, k: Keyword) -> bool {
        matches!(self.peek_kind(), Some(TokenKind::Keyword(q)) if *q == k)
    }

    fn eat_punct(&mut self, p: Punct) -> bool {
        if self.at_punct(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: Keyword) -> bool {
        if self.at_kw(k) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: Punct) -> PResult<Span> {
        let span = self.span();
        if self.eat_punct(p) {
            Ok(span)
        } else {
            Err(self.unexpected(&format!("`{}`", p.as_str())))
        }
    }

    fn expect_kw(&mut self, k: Keyword) -> PResult<Span> {
        let span = self.span();
        if self.eat_kw(k) {
            Ok(span)
        } else {
            Err(self.unexpected(&format!("`{}`", k.as_str())))
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Ident(name),
                span,
            }) => {
                self.pos += 1;
                Ok((name.clone(), *span))
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn string(&mut self) -> PResult<String> {
        match self.peek_kind() {
            Some(TokenKind::Str(s)) => {
                self.pos += 1;
                Ok(s.clone())
            }
            _ => Err(self.unexpected("string")),
        }
    }

    fn integer(&mut self) -> PResult<i64> {
        let negative = self.eat_punct(Punct::Minus);
        let span = self.span();
        match self.peek_kind() {
            Some(TokenKind::Number(n)) if !n.contains('.') => {
                self.pos += 1;
                let v: i64 = n
                    .replace('_', "")
                    .parse()
                    .map_err(|_| self.error_at(span, format!("integer `{n}` out of range")))?;
                Ok(if negative { -v } else { v })
            }
            _ => Err(self.unexpected("integer")),
        }
    }

    fn unsigned(&mut self) -> PResult<u32> {
        let span = self.span();
        let v = self.integer()?;
        u32::try_from(v).map_err(|_| self.error_at(span, format!("expected a non-negative index, found {v}")))
    }

    fn fraction(&mut self) -> PResult<f64> {
        let span = self.span();
        match self.peek_kind() {
            Some(TokenKind::Number(n)) => {
                self.pos += 1;
                n.parse()
                    .map_err(|_| self.error_at(span, format!("invalid number `{n}`")))
            }
            _ => Err(self.unexpected("number")),
        }
    }

    /// Parses `item (, item)* ,?` up to (not including) the closing punctuation.
    fn comma_list<T>(&mut self, close: Punct, mut item: impl FnMut(&mut Self) -> PResult<T>) -> PResult<Vec<T>> {
        let mut out = Vec::new();
        while !self.at_punct(close) {
            out.push(item(self)?);
            if !self.eat_punct(Punct::Comma) {
                break;
            }
        }
        Ok(out)
    }

    fn document(&mut self) -> PResult<MdlDocument> {
        let span = self.expect_kw(Keyword::MechanicalModule)?;
        let (name, _) = self.ident()?;
        if self.eat_punct(Punct::LParen) {
            self.expect_punct(Punct::RParen)?;
        }
        self.expect_punct(Punct::Semi)?;

        let mut boundary: Option<Vec<BoundaryLine>> = None;
        let mut ios = Vec::new();
        let mut behavior: Option<BehaviorAst> = None;
        loop {
            let here = self.span();
            match self.peek_kind() {
                Some(TokenKind::Keyword(Keyword::Boundary)) => {
                    if boundary.is_some() {
                        return Err(MdlError::DuplicateSection {
                            span: here,
                            section: "boundary",
                        });
                    }
                    boundary = Some(self.boundary()?);
                }
                Some(TokenKind::Keyword(Keyword::Sensor)) => ios.push(self.io(IoKind::Sensor)?),
                Some(TokenKind::Keyword(Keyword::Actuator)) => ios.push(self.io(IoKind::Actuator)?),
                Some(TokenKind::Keyword(Keyword::Module)) => {
                    if behavior.is_some() {
                        return Err(MdlError::DuplicateSection {
                            span: here,
                            section: "module",
                        });
                    }
                    behavior = Some(self.module()?);
                }
                Some(TokenKind::Keyword(Keyword::EndMechanicalModule)) => {
                    self.pos += 1;
                    let behavior = behavior.ok_or(MdlError::MissingModule { span: here })?;
                    return Ok(MdlDocument {
                        name,
                        boundary: boundary.unwrap_or_default(),
                        ios,
                        behavior,
                        span,
                    });
                }
                Some(TokenKind::Punct(Punct::Semi)) => {
                    self.pos += 1;
                }
                _ => return Err(self.unexpected("`boundary`, `sensor`, `actuator`, `module` or `endmechanicalmodule`")),
            }
        }
    }

    fn boundary(&mut self) -> PResult<Vec<BoundaryLine>> {
        self.expect_kw(Keyword::Boundary)?;
        self.expect_punct(Punct::LBrace)?;
        let lines = self.comma_list(Punct::RBrace, |p| p.boundary_line())?;
        self.expect_punct(Punct::RBrace)?;
        self.eat_punct(Punct::Semi);
        Ok(lines)
    }

    fn boundary_line(&mut self) -> PResult<BoundaryLine> {
        let span = self.expect_kw(Keyword::Line)?;
        let (name, _) = self.ident()?;
        self.expect_punct(Punct::LBrace)?;
        let p1 = self.point()?;
        self.expect_punct(Punct::Comma)?;
        let p2 = self.point()?;
        self.eat_punct(Punct::Comma);
        self.expect_punct(Punct::RBrace)?;
        Ok(BoundaryLine { name, p1, p2, span })
    }

    fn point(&mut self) -> PResult<Point> {
        self.expect_punct(Punct::LParen)?;
        let x = self.integer()?;
        self.expect_punct(Punct::Comma)?;
        let y = self.integer()?;
        self.expect_punct(Punct::RParen)?;
        Ok(Point::new(x, y))
    }

    fn io(&mut self, kind: IoKind) -> PResult<IoDecl> {
        let span = self.span();
        self.pos += 1;
        let (name, _) = self.ident()?;
        self.expect_punct(Punct::LBrace)?;
        let mut decl = IoDecl {
            name,
            kind,
            actuator_type: None,
            locations: Vec::new(),
            values: Vec::new(),
            span,
        };
        let mut seen_location = false;
        let mut seen_values = false;
        while !self.at_punct(Punct::RBrace) {
            let field_span = self.span();
            let dup =
                |p: &Self, what: &str| p.error_at(field_span, format!("duplicate `{what}` field in `{}`", decl.name));
            if self.eat_kw(Keyword::Location) {
                if seen_location {
                    return Err(dup(self, "location"));
                }
                seen_location = true;
                self.expect_punct(Punct::Assign)?;
                self.expect_punct(Punct::LBrace)?;
                decl.locations = self.comma_list(Punct::RBrace, |p| {
                    let span = p.expect_punct(Punct::LParen)?;
                    let (line, _) = p.ident()?;
                    p.expect_punct(Punct::Comma)?;
                    let fraction = p.fraction()?;
                    p.expect_punct(Punct::RParen)?;
                    Ok(Location { line, fraction, span })
                })?;
                self.expect_punct(Punct::RBrace)?;
            } else if self.eat_kw(Keyword::Values) {
                if seen_values {
                    return Err(dup(self, "values"));
                }
                seen_values = true;
                self.expect_punct(Punct::Assign)?;
                self.expect_punct(Punct::LBrace)?;
                decl.values = self.comma_list(Punct::RBrace, |p| {
                    let code = p.string()?;
                    p.expect_punct(Punct::Colon)?;
                    let label = p.string()?;
                    Ok((code, label))
                })?;
                self.expect_punct(Punct::RBrace)?;
            } else if self.eat_kw(Keyword::Type) {
                if decl.actuator_type.is_some() {
                    return Err(dup(self, "type"));
                }
                self.expect_punct(Punct::Assign)?;
                decl.actuator_type = Some(self.string()?);
            } else {
                return Err(self.unexpected("`location`, `values` or `type`"));
            }
            if !self.eat_punct(Punct::Comma) {
                break;
            }
        }
        self.expect_punct(Punct::RBrace)?;
        self.eat_punct(Punct::Semi);
        Ok(decl)
    }

    fn range(&mut self) -> PResult<Option<Range>> {
        if !self.eat_punct(Punct::LBracket) {
            return Ok(None);
        }
        let msb = self.unsigned()?;
        self.expect_punct(Punct::Colon)?;
        let lsb = self.unsigned()?;
        self.expect_punct(Punct::RBracket)?;
        Ok(Some(Range { msb, lsb }))
    }

    fn module(&mut self) -> PResult<BehaviorAst> {
        let span = self.expect_kw(Keyword::Module)?;
        let (name, _) = self.ident()?;
        let mut ports = Vec::new();
        if self.eat_punct(Punct::LParen) {
            let mut last: Option<(Direction, NetType, Option<Range>)> = None;
            ports = self.comma_list(Punct::RParen, |p| {
                let span = p.span();
                let head = if p.eat_kw(Keyword::Input) {
                    let ty = p.net_type(NetType::Wire);
                    Some((Direction::Input, ty, p.range()?))
                } else if p.eat_kw(Keyword::Output) {
                    let ty = p.net_type(NetType::Wire);
                    Some((Direction::Output, ty, p.range()?))
                } else {
                    None
                };
                let (direction, net_type, range) = match head.or(last) {
                    Some(h) => h,
                    None => return Err(p.unexpected("`input` or `output`")),
                };
                last = Some((direction, net_type, range));
                let (name, _) = p.ident()?;
                let init = if p.eat_punct(Punct::Assign) {
                    Some(p.expr()?)
                } else {
                    None
                };
                Ok(Port {
                    direction,
                    net_type,
                    range,
                    name,
                    init,
                    span,
                })
            })?;
            self.expect_punct(Punct::RParen)?;
        }
        self.expect_punct(Punct::Semi)?;

        let mut ast = BehaviorAst {
            name,
            ports,
            params: Vec::new(),
            regs: Vec::new(),
            processes: Vec::new(),
            span,
        };
        loop {
            let here = self.span();
            if self.eat_kw(Keyword::EndModule) {
                return Ok(ast);
            } else if self.eat_kw(Keyword::LocalParam) {
                let range = self.range()?;
                let params = self.comma_list(Punct::Semi, |p| {
                    let (name, span) = p.ident()?;
                    p.expect_punct(Punct::Assign)?;
                    let value = p.expr()?;
                    Ok(LocalParam {
                        name,
                        range,
                        value,
                        span,
                    })
                })?;
                self.expect_punct(Punct::Semi)?;
                ast.params.extend(params);
            } else if self.eat_kw(Keyword::Reg) {
                let range = self.range()?;
                let regs = self.comma_list(Punct::Semi, |p| {
                    let (name, span) = p.ident()?;
                    let init = if p.eat_punct(Punct::Assign) {
                        Some(p.expr()?)
                    } else {
                        None
                    };
                    Ok(RegDecl {
                        name,
                        range,
                        init,
                        span,
                    })
                })?;
                self.expect_punct(Punct::Semi)?;
                ast.regs.extend(regs);
            } else if self.eat_kw(Keyword::Always) {
                self.expect_punct(Punct::At)?;
                self.expect_punct(Punct::LParen)?;
                self.expect_kw(Keyword::Posedge)?;
                let (clock, _) = self.ident()?;
                self.expect_punct(Punct::RParen)?;
                let body = self.stmt()?;
                ast.processes.push(Process {
                    clock,
                    body,
                    span: here,
                });
            } else if self.eat_punct(Punct::Semi) {
            } else if self.at_kw(Keyword::Wire) {
                return Err(self.error_at(here, "wire declarations inside the module are not supported".into()));
            } else {
                return Err(self.unexpected("`localparam`, `reg`, `always` or `endmodule`"));
            }
        }
    }

    fn net_type(&mut self, default: NetType) -> NetType {
        if self.eat_kw(Keyword::Wire) {
            NetType::Wire
        } else if self.eat_kw(Keyword::Reg) {
            NetType::Reg
        } else {
            default
        }
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        match self.peek_kind() {
            Some(TokenKind::Keyword(Keyword::Begin)) => {
                self.pos += 1;
                let mut body = Vec::new();
                while !self.eat_kw(Keyword::End) {
                    if self.peek().is_none() {
                        return Err(self.unexpected("`end`"));
                    }
                    body.push(self.stmt()?);
                }
                // A single wrapped statement is the statement itself.
                if body.len() == 1 {
                    return Ok(body.pop().expect("length checked"));
                }
                Ok(Stmt::Block(body))
            }
            Some(TokenKind::Keyword(Keyword::If)) => {
                self.pos += 1;
                self.expect_punct(Punct::LParen)?;
                let cond = self.expr()?;
                self.expect_punct(Punct::RParen)?;
                let then_branch = Box::new(self.stmt()?);
                let else_branch = if self.eat_kw(Keyword::Else) {
                    Some(Box::new(self.stmt()?))
                } else {
                    None
                };
                Ok(Stmt::If {
                    cond,
                    then_branch,
                    else_branch,
                })
            }
            Some(TokenKind::Keyword(Keyword::Case)) => {
                self.pos += 1;
                self.expect_punct(Punct::LParen)?;
                let subject = self.expr()?;
                self.expect_punct(Punct::RParen)?;
                let mut arms = Vec::new();
                let mut default = None;
                loop {
                    let here = self.span();
                    if self.eat_kw(Keyword::EndCase) {
                        break;
                    }
                    if self.eat_kw(Keyword::Default) {
                        if default.is_some() {
                            return Err(self.error_at(here, "duplicate `default` arm".into()));
                        }
                        self.eat_punct(Punct::Colon);
                        default = Some(Box::new(self.stmt()?));
                        continue;
                    }
                    if self.peek().is_none() {
                        return Err(self.unexpected("`endcase`"));
                    }
                    let mut labels = vec![self.expr()?];
                    while self.eat_punct(Punct::Comma) {
                        labels.push(self.expr()?);
                    }
                    self.expect_punct(Punct::Colon)?;
                    let body = self.stmt()?;
                    arms.push(CaseArm { labels, body });
                }
                Ok(Stmt::Case { subject, arms, default })
            }
            Some(TokenKind::Punct(Punct::Semi)) => {
                self.pos += 1;
                Ok(Stmt::Empty)
            }
            Some(TokenKind::Ident(_)) => {
                let (name, span) = self.ident()?;
                let index = if self.eat_punct(Punct::LBracket) {
                    let i = self.unsigned()?;
                    self.expect_punct(Punct::RBracket)?;
                    Some(i)
                } else {
                    None
                };
                let blocking = if self.eat_punct(Punct::Assign) {
                    true
                } else if self.eat_punct(Punct::LessEq) {
                    false
                } else {
                    return Err(self.unexpected("`=` or `<=`"));
                };
                let rhs = self.expr()?;
                self.expect_punct(Punct::Semi)?;
                Ok(Stmt::Assign {
                    lhs: LValue { name, index, span },
                    rhs,
                    blocking,
                })
            }
            _ => Err(self.unexpected("statement")),
        }
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binary_op(&self) -> Option<BinaryOp> {
        match self.peek_kind()? {
            TokenKind::Punct(p) => Some(match p {
                Punct::EqEq => BinaryOp::Eq,
                Punct::NotEq => BinaryOp::Ne,
                Punct::AndAnd => BinaryOp::LogicalAnd,
                Punct::OrOr => BinaryOp::LogicalOr,
                Punct::Amp => BinaryOp::BitAnd,
                Punct::Pipe => BinaryOp::BitOr,
                Punct::Caret => BinaryOp::BitXor,
                _ => return None,
            }),
            _ => None,
        }
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binary_op() {
            if op.precedence() < min_prec {
                break;
            }
            self.pos += 1;
            let rhs = self.binary(op.precedence() + 1)?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let op = if self.eat_punct(Punct::Bang) {
            Some(UnaryOp::LogicalNot)
        } else if self.eat_punct(Punct::Tilde) {
            Some(UnaryOp::BitNot)
        } else {
            None
        };
        match op {
            Some(op) => Ok(Expr::Unary {
                op,
                operand: Box::new(self.unary()?),
            }),
            None => self.primary(),
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        let span = self.span();
        match self.peek_kind() {
            Some(TokenKind::Punct(Punct::LParen)) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_punct(Punct::RParen)?;
                Ok(e)
            }
            Some(TokenKind::Ident(_)) => {
                let (name, span) = self.ident()?;
                if self.eat_punct(Punct::LBracket) {
                    let index = self.unsigned()?;
                    self.expect_punct(Punct::RBracket)?;
                    Ok(Expr::Index { name, index, span })
                } else {
                    Ok(Expr::Ident { name, span })
                }
            }
            Some(TokenKind::Number(n)) => {
                let n = n.clone();
                self.bump();
                let value = n
                    .replace('_', "")
                    .parse()
                    .map_err(|_| self.error_at(span, format!("invalid integer literal `{n}`")))?;
                Ok(Expr::Literal {
                    width: None,
                    base: None,
                    value,
                    span,
                })
            }
            Some(TokenKind::Based { width, base, digits }) => {
                let (width, base, digits) = (*width, *base, digits.clone());
                self.bump();
                let base = LiteralBase::from_char(base).expect("lexer only emits known bases");
                let value = u64::from_str_radix(&digits.replace('_', ""), base.radix())
                    .map_err(|_| self.error_at(span, format!("invalid digits `{digits}`")))?;
                if let Some(w) = width {
                    if w == 0 || w > 64 {
                        return Err(self.error_at(span, format!("unsupported literal width {w}")));
                    }
                    if w < 64 && value >> w != 0 {
                        return Err(self.error_at(span, format!("literal value {value} does not fit in {w} bits")));
                    }
                }
                Ok(Expr::Literal {
                    width,
                    base: Some(base),
                    value,
                    span,
                })
            }
            _ => Err(self.unexpected("expression")),
        }
    }
}
