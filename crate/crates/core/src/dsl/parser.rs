//! Recursive-descent parser and the declaration/type check that follows it.

use std::collections::HashMap;

use super::ast::*;
use super::error::{FrontendError, ParseError, SemanticError};
use super::lexer::{tokenize, Tok, Token};

type PResult<T> = Result<T, FrontendError>;

/// Parse and check one subject program.
pub fn parse(src: &str) -> Result<Program, FrontendError> {
    let tokens = tokenize(src)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        next_decision: 0,
    };
    let program = parser.program()?;
    check(&program)?;
    Ok(program)
}

/// Parse a standalone expression (used for schema cost formulas).
pub fn parse_expr(src: &str) -> Result<Expr, FrontendError> {
    let tokens = tokenize(src)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        next_decision: 0,
    };
    let e = parser.expr()?;
    if *parser.peek() != Tok::Eof {
        return parser.error(&["end of input"]);
    }
    Ok(e)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    next_decision: u32,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> PResult<T> {
        Err(ParseError {
            span: self.span(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        }
        .into())
    }

    fn expect(&mut self, tok: Tok) -> PResult<Span> {
        if *self.peek() == tok {
            Ok(self.bump().span)
        } else {
            self.error(&[&format!("`{}`", tok.text())])
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let span = self.bump().span;
                Ok((name, span))
            }
            _ => self.error(&["identifier"]),
        }
    }

    fn fresh_decision(&mut self) -> DecisionId {
        let id = DecisionId(self.next_decision);
        self.next_decision += 1;
        id
    }

    fn program(&mut self) -> PResult<Program> {
        let span = self.expect(Tok::Fn)?;
        let (name, _) = self.ident()?;
        self.expect(Tok::LParen)?;
        let mut params = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                params.push(self.param()?);
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        let body = self.block()?;
        if *self.peek() != Tok::Eof {
            return self.error(&["end of input"]);
        }
        Ok(Program {
            name,
            params,
            body,
            span,
        })
    }

    fn param(&mut self) -> PResult<Param> {
        let (name, span) = self.ident()?;
        self.expect(Tok::Colon)?;
        self.expect(Tok::IntType)?;
        let mut kind = ParamKind::Int;
        if *self.peek() == Tok::LBracket {
            self.bump();
            self.expect(Tok::RBracket)?;
            kind = ParamKind::IntArray;
            if *self.peek() == Tok::LBracket {
                self.bump();
                self.expect(Tok::RBracket)?;
                kind = ParamKind::IntMatrix;
            }
        }
        Ok(Param { name, kind, span })
    }

    fn block(&mut self) -> PResult<Block> {
        let span = self.expect(Tok::LBrace)?;
        let mut stmts = Vec::new();
        while *self.peek() != Tok::RBrace {
            if *self.peek() == Tok::Eof {
                return self.error(&["`}`", "statement"]);
            }
            stmts.push(self.stmt()?);
        }
        self.bump();
        Ok(Block { stmts, span })
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let span = self.span();
        let kind = match self.peek() {
            Tok::Let => {
                self.bump();
                let (name, _) = self.ident()?;
                let init = if *self.peek() == Tok::Assign {
                    self.bump();
                    Some(self.expr()?)
                } else {
                    None
                };
                self.expect(Tok::Semi)?;
                StmtKind::Let { name, init }
            }
            Tok::If => {
                self.bump();
                let decision = self.fresh_decision();
                self.expect(Tok::LParen)?;
                let cond = self.expr()?;
                self.expect(Tok::RParen)?;
                let then_block = self.block()?;
                let else_block = if *self.peek() == Tok::Else {
                    self.bump();
                    Some(self.block()?)
                } else {
                    None
                };
                StmtKind::If {
                    decision,
                    cond,
                    then_block,
                    else_block,
                }
            }
            Tok::While => {
                self.bump();
                let decision = self.fresh_decision();
                self.expect(Tok::LParen)?;
                let cond = self.expr()?;
                self.expect(Tok::RParen)?;
                let body = self.block()?;
                StmtKind::While {
                    decision,
                    cond,
                    body,
                }
            }
            Tok::For => {
                self.bump();
                let decision = self.fresh_decision();
                self.expect(Tok::LParen)?;
                let init = if *self.peek() == Tok::Semi {
                    None
                } else {
                    Some(self.assign()?)
                };
                self.expect(Tok::Semi)?;
                let cond = self.expr()?;
                self.expect(Tok::Semi)?;
                let update = if *self.peek() == Tok::RParen {
                    None
                } else {
                    Some(self.assign()?)
                };
                self.expect(Tok::RParen)?;
                let body = self.block()?;
                StmtKind::For {
                    decision,
                    init,
                    cond,
                    update,
                    body,
                }
            }
            Tok::Return => {
                self.bump();
                let value = if *self.peek() == Tok::Semi {
                    None
                } else {
                    Some(self.expr()?)
                };
                self.expect(Tok::Semi)?;
                StmtKind::Return(value)
            }
            Tok::Ident(_) => {
                let a = self.assign()?;
                self.expect(Tok::Semi)?;
                StmtKind::Assign(a)
            }
            _ => return self.error(&["statement"]),
        };
        Ok(Stmt { kind, span })
    }

    fn assign(&mut self) -> PResult<Assign> {
        let span = self.span();
        let (name, name_span) = self.ident()?;
        let target = match self.peek() {
            Tok::LParen => return Err(call_error(&name, name_span)),
            Tok::LBracket => {
                self.bump();
                let i = self.expr()?;
                self.expect(Tok::RBracket)?;
                if *self.peek() == Tok::LBracket {
                    self.bump();
                    let j = self.expr()?;
                    self.expect(Tok::RBracket)?;
                    LValue::Index2(name, Box::new(i), Box::new(j))
                } else {
                    LValue::Index(name, Box::new(i))
                }
            }
            _ => LValue::Var(name),
        };
        self.expect(Tok::Assign)?;
        let value = self.expr()?;
        Ok(Assign {
            target,
            value,
            span,
        })
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binop(&self) -> Option<BinOp> {
        Some(match self.peek() {
            Tok::OrOr => BinOp::Or,
            Tok::AndAnd => BinOp::And,
            Tok::EqEq => BinOp::Eq,
            Tok::NotEq => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            Tok::Plus => BinOp::Add,
            Tok::Minus => BinOp::Sub,
            Tok::Star => BinOp::Mul,
            Tok::Slash => BinOp::Div,
            Tok::Percent => BinOp::Rem,
            _ => return None,
        })
    }

    // Precedence climbing over left-associative binary operators.
    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.binop() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.bump();
            let rhs = self.binary(prec + 1)?;
            let span = lhs.span;
            lhs = Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let span = self.span();
        let op = match self.peek() {
            Tok::Minus => UnOp::Neg,
            Tok::Bang => UnOp::Not,
            _ => return self.primary(),
        };
        self.bump();
        let inner = self.unary()?;
        Ok(Expr::new(ExprKind::Unary(op, Box::new(inner)), span))
    }

    fn primary(&mut self) -> PResult<Expr> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::new(ExprKind::Int(v), span))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                match self.peek() {
                    Tok::LParen => Err(call_error(&name, span)),
                    Tok::LBracket => {
                        self.bump();
                        let i = self.expr()?;
                        self.expect(Tok::RBracket)?;
                        if *self.peek() == Tok::LBracket {
                            self.bump();
                            let j = self.expr()?;
                            self.expect(Tok::RBracket)?;
                            Ok(Expr::new(
                                ExprKind::Index2(name, Box::new(i), Box::new(j)),
                                span,
                            ))
                        } else {
                            Ok(Expr::new(ExprKind::Index(name, Box::new(i)), span))
                        }
                    }
                    _ => Ok(Expr::new(ExprKind::Var(name), span)),
                }
            }
            _ => self.error(&["expression"]),
        }
    }
}

fn call_error(name: &str, span: Span) -> FrontendError {
    SemanticError {
        span,
        message: format!("call to `{name}`: function calls are not supported"),
    }
    .into()
}

/// Kind of every name visible at some point of the function body.
struct Scope {
    kinds: HashMap<String, ParamKind>,
}

fn check(program: &Program) -> Result<(), SemanticError> {
    let mut scope = Scope {
        kinds: HashMap::new(),
    };
    for p in &program.params {
        if scope.kinds.insert(p.name.clone(), p.kind).is_some() {
            return Err(SemanticError {
                span: p.span,
                message: format!("duplicate parameter `{}`", p.name),
            });
        }
    }
    check_block(&program.body, &mut scope)
}

fn check_block(block: &Block, scope: &mut Scope) -> Result<(), SemanticError> {
    for stmt in &block.stmts {
        check_stmt(stmt, scope)?;
    }
    Ok(())
}

fn check_stmt(stmt: &Stmt, scope: &mut Scope) -> Result<(), SemanticError> {
    match &stmt.kind {
        StmtKind::Let { name, init } => {
            if let Some(e) = init {
                check_int_expr(e, scope)?;
            }
            if scope.kinds.contains_key(name) {
                return Err(SemanticError {
                    span: stmt.span,
                    message: format!("`{name}` is already declared"),
                });
            }
            scope.kinds.insert(name.clone(), ParamKind::Int);
        }
        StmtKind::Assign(a) => check_assign(a, scope)?,
        StmtKind::If {
            cond,
            then_block,
            else_block,
            ..
        } => {
            check_condition(cond, scope)?;
            check_block(then_block, scope)?;
            if let Some(e) = else_block {
                check_block(e, scope)?;
            }
        }
        StmtKind::While { cond, body, .. } => {
            check_condition(cond, scope)?;
            check_block(body, scope)?;
        }
        StmtKind::For {
            init,
            cond,
            update,
            body,
            ..
        } => {
            if let Some(a) = init {
                check_assign(a, scope)?;
            }
            check_condition(cond, scope)?;
            if let Some(a) = update {
                check_assign(a, scope)?;
            }
            check_block(body, scope)?;
        }
        StmtKind::Return(value) => {
            if let Some(e) = value {
                check_int_expr(e, scope)?;
            }
        }
    }
    Ok(())
}

fn check_assign(a: &Assign, scope: &Scope) -> Result<(), SemanticError> {
    let name = a.target.name();
    let kind = lookup(scope, name, a.span)?;
    match (&a.target, kind) {
        (LValue::Var(_), ParamKind::Int) => {}
        (LValue::Index(_, i), ParamKind::IntArray) => check_int_expr(i, scope)?,
        (LValue::Index2(_, i, j), ParamKind::IntMatrix) => {
            check_int_expr(i, scope)?;
            check_int_expr(j, scope)?;
        }
        (_, kind) => {
            return Err(SemanticError {
                span: a.span,
                message: format!("cannot assign to `{name}` of type {kind} through this access"),
            })
        }
    }
    check_int_expr(&a.value, scope)
}

fn check_condition(cond: &Expr, scope: &Scope) -> Result<(), SemanticError> {
    if let ExprKind::Var(name) = &cond.kind {
        let kind = lookup(scope, name, cond.span)?;
        if kind != ParamKind::Int {
            return Err(SemanticError {
                span: cond.span,
                message: format!("non-integer condition: `{name}` has type {kind}"),
            });
        }
    }
    check_int_expr(cond, scope)
}

fn lookup(scope: &Scope, name: &str, span: Span) -> Result<ParamKind, SemanticError> {
    scope.kinds.get(name).copied().ok_or_else(|| SemanticError {
        span,
        message: format!("undeclared variable `{name}`"),
    })
}

fn check_int_expr(e: &Expr, scope: &Scope) -> Result<(), SemanticError> {
    match &e.kind {
        ExprKind::Int(_) => Ok(()),
        ExprKind::Var(name) => match lookup(scope, name, e.span)? {
            ParamKind::Int => Ok(()),
            kind => Err(SemanticError {
                span: e.span,
                message: format!("non-integer expression: `{name}` has type {kind}"),
            }),
        },
        ExprKind::Index(name, i) => match lookup(scope, name, e.span)? {
            ParamKind::IntArray => check_int_expr(i, scope),
            kind => Err(SemanticError {
                span: e.span,
                message: format!("`{name}` has type {kind} and cannot take one index"),
            }),
        },
        ExprKind::Index2(name, i, j) => match lookup(scope, name, e.span)? {
            ParamKind::IntMatrix => {
                check_int_expr(i, scope)?;
                check_int_expr(j, scope)
            }
            kind => Err(SemanticError {
                span: e.span,
                message: format!("`{name}` has type {kind} and cannot take two indices"),
            }),
        },
        ExprKind::Unary(_, inner) => check_int_expr(inner, scope),
        ExprKind::Binary(_, a, b) => {
            check_int_expr(a, scope)?;
            check_int_expr(b, scope)
        }
    }
}
