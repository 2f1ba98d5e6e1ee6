//! Syntax tree for the subject language.

use std::fmt;

/// Start position of a node in the source text, 1-based.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn new(line: u32, col: u32) -> Self {
        Span { line, col }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamKind {
    Int,
    IntArray,
    IntMatrix,
}

impl ParamKind {
    pub fn type_name(self) -> &'static str {
        match self {
            ParamKind::Int => "int",
            ParamKind::IntArray => "int[]",
            ParamKind::IntMatrix => "int[][]",
        }
    }
}

impl fmt::Display for ParamKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.type_name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub kind: ParamKind,
    pub span: Span,
}

/// Dense index of a decision statement, assigned in source order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DecisionId(pub u32);

impl DecisionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub name: String,
    pub params: Vec<Param>,
    pub body: Block,
    pub span: Span,
}

impl Program {
    pub fn param(&self, name: &str) -> Option<&Param> {
        self.params.iter().find(|p| p.name == name)
    }

    /// Copy of the program with every span reset, for structural comparison.
    pub fn without_spans(&self) -> Program {
        let mut p = self.clone();
        p.span = Span::default();
        for param in &mut p.params {
            param.span = Span::default();
        }
        p.body.clear_spans();
        p
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub stmts: Vec<Stmt>,
    pub span: Span,
}

impl Block {
    fn clear_spans(&mut self) {
        self.span = Span::default();
        for s in &mut self.stmts {
            s.clear_spans();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    Let {
        name: String,
        init: Option<Expr>,
    },
    Assign(Assign),
    If {
        decision: DecisionId,
        cond: Expr,
        then_block: Block,
        else_block: Option<Block>,
    },
    While {
        decision: DecisionId,
        cond: Expr,
        body: Block,
    },
    For {
        decision: DecisionId,
        init: Option<Assign>,
        cond: Expr,
        update: Option<Assign>,
        body: Block,
    },
    Return(Option<Expr>),
}

impl Stmt {
    /// Decision id carried by `if`/`while`/`for`.
    pub fn decision(&self) -> Option<DecisionId> {
        match &self.kind {
            StmtKind::If { decision, .. }
            | StmtKind::While { decision, .. }
            | StmtKind::For { decision, .. } => Some(*decision),
            _ => None,
        }
    }

    /// Nested blocks in source order.
    pub fn blocks(&self) -> Vec<&Block> {
        match &self.kind {
            StmtKind::If {
                then_block,
                else_block,
                ..
            } => {
                let mut v = vec![then_block];
                if let Some(e) = else_block {
                    v.push(e);
                }
                v
            }
            StmtKind::While { body, .. } | StmtKind::For { body, .. } => vec![body],
            _ => Vec::new(),
        }
    }

    fn clear_spans(&mut self) {
        self.span = Span::default();
        match &mut self.kind {
            StmtKind::Let { init, .. } => {
                if let Some(e) = init {
                    e.clear_spans();
                }
            }
            StmtKind::Assign(a) => a.clear_spans(),
            StmtKind::If {
                cond,
                then_block,
                else_block,
                ..
            } => {
                cond.clear_spans();
                then_block.clear_spans();
                if let Some(e) = else_block {
                    e.clear_spans();
                }
            }
            StmtKind::While { cond, body, .. } => {
                cond.clear_spans();
                body.clear_spans();
            }
            StmtKind::For {
                init,
                cond,
                update,
                body,
                ..
            } => {
                if let Some(a) = init {
                    a.clear_spans();
                }
                cond.clear_spans();
                if let Some(a) = update {
                    a.clear_spans();
                }
                body.clear_spans();
            }
            StmtKind::Return(e) => {
                if let Some(e) = e {
                    e.clear_spans();
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assign {
    pub target: LValue,
    pub value: Expr,
    pub span: Span,
}

impl Assign {
    fn clear_spans(&mut self) {
        self.span = Span::default();
        self.target.clear_spans();
        self.value.clear_spans();
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LValue {
    Var(String),
    Index(String, Box<Expr>),
    Index2(String, Box<Expr>, Box<Expr>),
}

impl LValue {
    pub fn name(&self) -> &str {
        match self {
            LValue::Var(n) | LValue::Index(n, _) | LValue::Index2(n, _, _) => n,
        }
    }

    fn clear_spans(&mut self) {
        match self {
            LValue::Var(_) => {}
            LValue::Index(_, i) => i.clear_spans(),
            LValue::Index2(_, i, j) => {
                i.clear_spans();
                j.clear_spans();
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    /// Binding strength; all binary operators are left-associative.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne => 3,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 4,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul | BinOp::Div | BinOp::Rem => 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprKind {
    Int(i64),
    Var(String),
    Index(String, Box<Expr>),
    Index2(String, Box<Expr>, Box<Expr>),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    fn clear_spans(&mut self) {
        self.span = Span::default();
        match &mut self.kind {
            ExprKind::Int(_) | ExprKind::Var(_) => {}
            ExprKind::Index(_, i) | ExprKind::Unary(_, i) => i.clear_spans(),
            ExprKind::Index2(_, a, b) | ExprKind::Binary(_, a, b) => {
                a.clear_spans();
                b.clear_spans();
            }
        }
    }

    /// Every variable name read by the expression, in evaluation order.
    pub fn variables(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match &self.kind {
            ExprKind::Int(_) => {}
            ExprKind::Var(n) => out.push(n),
            ExprKind::Index(n, i) => {
                out.push(n);
                i.collect_vars(out);
            }
            ExprKind::Index2(n, i, j) => {
                out.push(n);
                i.collect_vars(out);
                j.collect_vars(out);
            }
            ExprKind::Unary(_, e) => e.collect_vars(out),
            ExprKind::Binary(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }
}
