//! Tree-walking interpreter that records one event per decision evaluation.

use std::collections::HashMap;

use thiserror::Error;

use crate::dsl::{
    Assign, BinOp, Block, DecisionId, DecisionTable, Expr, ExprKind, LValue, ParamKind, Program,
    Span, StmtKind, UnOp,
};
use crate::schema::{InputVector, SchemaError, Value};
use crate::trace::{Event, Trace};

pub const DEFAULT_STEP_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error("step budget of {budget} exhausted (possible infinite loop)")]
    BudgetExceeded { budget: u64, partial: Trace },
    #[error("{span}: runtime error: {message}")]
    Runtime {
        message: String,
        span: Span,
        partial: Trace,
    },
    #[error(transparent)]
    Input(#[from] SchemaError),
    #[error("step budget must be at least 1")]
    ZeroBudget,
}

impl ExecError {
    pub fn partial_trace(&self) -> Option<&Trace> {
        match self {
            ExecError::BudgetExceeded { partial, .. } | ExecError::Runtime { partial, .. } => {
                Some(partial)
            }
            _ => None,
        }
    }
}

/// Final parameter values and the returned value, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outputs {
    pub params: InputVector,
    pub returned: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub trace: Trace,
    pub outputs: Outputs,
}

/// Run `program` on `input`, stopping after `step_budget` steps.
pub fn execute(
    program: &Program,
    table: &DecisionTable,
    input: &InputVector,
    step_budget: u64,
) -> Result<Execution, ExecError> {
    Interpreter::new(program, table).run(input, step_budget)
}

#[derive(Debug, Clone, Copy)]
enum Slot {
    Int(usize),
    Array(usize),
    Matrix(usize),
}

#[derive(Debug)]
enum CExpr {
    Int(i64),
    Local(usize),
    Load1(usize, Box<CExpr>, Span),
    Load2(usize, Box<CExpr>, Box<CExpr>, Span),
    Neg(Box<CExpr>),
    Not(Box<CExpr>),
    And(Box<CExpr>, Box<CExpr>),
    Or(Box<CExpr>, Box<CExpr>),
    Bin(BinOp, Box<CExpr>, Box<CExpr>, Span),
}

#[derive(Debug)]
enum CStmt {
    Set(usize, CExpr),
    Store1(usize, CExpr, CExpr, Span),
    Store2(usize, CExpr, CExpr, CExpr, Span),
    If(DecisionId, CExpr, Vec<CStmt>, Vec<CStmt>),
    While(DecisionId, CExpr, Vec<CStmt>),
    For(
        DecisionId,
        Option<Box<CStmt>>,
        CExpr,
        Option<Box<CStmt>>,
        Vec<CStmt>,
    ),
    Return(Option<CExpr>),
}

struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

/// A program lowered to slot-addressed form, reusable across executions.
pub struct Interpreter {
    params: Vec<(String, ParamKind, Slot)>,
    n_ints: usize,
    n_arrays: usize,
    n_matrices: usize,
    body: Vec<CStmt>,
    decisions: usize,
}

struct Lowering {
    slots: HashMap<String, Slot>,
    n_ints: usize,
    n_arrays: usize,
    n_matrices: usize,
}

impl Lowering {
    fn declare(&mut self, name: &str, kind: ParamKind) -> Slot {
        let slot = match kind {
            ParamKind::Int => {
                self.n_ints += 1;
                Slot::Int(self.n_ints - 1)
            }
            ParamKind::IntArray => {
                self.n_arrays += 1;
                Slot::Array(self.n_arrays - 1)
            }
            ParamKind::IntMatrix => {
                self.n_matrices += 1;
                Slot::Matrix(self.n_matrices - 1)
            }
        };
        self.slots.insert(name.to_string(), slot);
        slot
    }

    fn slot(&self, name: &str) -> Slot {
        // The frontend guarantees declaration before use.
        self.slots[name]
    }

    fn block(&mut self, b: &Block) -> Vec<CStmt> {
        b.stmts.iter().map(|s| self.stmt(&s.kind)).collect()
    }

    fn stmt(&mut self, s: &StmtKind) -> CStmt {
        match s {
            StmtKind::Let { name, init } => {
                let value = init.as_ref().map_or(CExpr::Int(0), |e| self.expr(e));
                match self.declare(name, ParamKind::Int) {
                    Slot::Int(i) => CStmt::Set(i, value),
                    _ => unreachable!(),
                }
            }
            StmtKind::Assign(a) => self.assign(a),
            StmtKind::If {
                decision,
                cond,
                then_block,
                else_block,
            } => CStmt::If(
                *decision,
                self.expr(cond),
                self.block(then_block),
                else_block
                    .as_ref()
                    .map(|b| self.block(b))
                    .unwrap_or_default(),
            ),
            StmtKind::While {
                decision,
                cond,
                body,
            } => CStmt::While(*decision, self.expr(cond), self.block(body)),
            StmtKind::For {
                decision,
                init,
                cond,
                update,
                body,
            } => CStmt::For(
                *decision,
                init.as_ref().map(|a| Box::new(self.assign(a))),
                self.expr(cond),
                update.as_ref().map(|a| Box::new(self.assign(a))),
                self.block(body),
            ),
            StmtKind::Return(v) => CStmt::Return(v.as_ref().map(|e| self.expr(e))),
        }
    }

    fn assign(&mut self, a: &Assign) -> CStmt {
        let value = self.expr(&a.value);
        match (&a.target, self.slot(a.target.name())) {
            (LValue::Var(_), Slot::Int(i)) => CStmt::Set(i, value),
            (LValue::Index(_, idx), Slot::Array(i)) => {
                CStmt::Store1(i, self.expr(idx), value, a.span)
            }
            (LValue::Index2(_, r, c), Slot::Matrix(i)) => {
                CStmt::Store2(i, self.expr(r), self.expr(c), value, a.span)
            }
            _ => unreachable!("checked by the frontend"),
        }
    }

    fn expr(&self, e: &Expr) -> CExpr {
        match &e.kind {
            ExprKind::Int(v) => CExpr::Int(*v),
            ExprKind::Var(n) => match self.slot(n) {
                Slot::Int(i) => CExpr::Local(i),
                _ => unreachable!("checked by the frontend"),
            },
            ExprKind::Index(n, idx) => match self.slot(n) {
                Slot::Array(i) => CExpr::Load1(i, Box::new(self.expr(idx)), e.span),
                _ => unreachable!("checked by the frontend"),
            },
            ExprKind::Index2(n, r, c) => match self.slot(n) {
                Slot::Matrix(i) => {
                    CExpr::Load2(i, Box::new(self.expr(r)), Box::new(self.expr(c)), e.span)
                }
                _ => unreachable!("checked by the frontend"),
            },
            ExprKind::Unary(UnOp::Neg, inner) => CExpr::Neg(Box::new(self.expr(inner))),
            ExprKind::Unary(UnOp::Not, inner) => CExpr::Not(Box::new(self.expr(inner))),
            ExprKind::Binary(BinOp::And, a, b) => {
                CExpr::And(Box::new(self.expr(a)), Box::new(self.expr(b)))
            }
            ExprKind::Binary(BinOp::Or, a, b) => {
                CExpr::Or(Box::new(self.expr(a)), Box::new(self.expr(b)))
            }
            ExprKind::Binary(op, a, b) => {
                CExpr::Bin(*op, Box::new(self.expr(a)), Box::new(self.expr(b)), e.span)
            }
        }
    }
}

impl Interpreter {
    pub fn new(program: &Program, table: &DecisionTable) -> Interpreter {
        let mut low = Lowering {
            slots: HashMap::new(),
            n_ints: 0,
            n_arrays: 0,
            n_matrices: 0,
        };
        let params = program
            .params
            .iter()
            .map(|p| (p.name.clone(), p.kind, low.declare(&p.name, p.kind)))
            .collect();
        let body = low.block(&program.body);
        Interpreter {
            params,
            n_ints: low.n_ints,
            n_arrays: low.n_arrays,
            n_matrices: low.n_matrices,
            body,
            decisions: table.len(),
        }
    }

    pub fn run(&self, input: &InputVector, step_budget: u64) -> Result<Execution, ExecError> {
        if step_budget == 0 {
            return Err(ExecError::ZeroBudget);
        }
        let mut m = Machine {
            ints: vec![0; self.n_ints],
            arrays: vec![Vec::new(); self.n_arrays],
            matrices: (0..self.n_matrices)
                .map(|_| Matrix {
                    rows: 0,
                    cols: 0,
                    data: Vec::new(),
                })
                .collect(),
            events: Vec::new(),
            steps: 0,
            budget: step_budget,
        };
        self.bind(input, &mut m)?;
        let flow = m.block(&self.body);
        let returned = match flow {
            Ok(Flow::Return(v)) => v,
            Ok(Flow::Normal) => None,
            Err(fault) => return Err(m.fail(fault)),
        };
        debug_assert!(m.events.iter().all(|e| e.decision.index() < self.decisions));
        let params = self.unbind(&m);
        Ok(Execution {
            trace: Trace {
                events: m.events,
                steps_used: m.steps,
            },
            outputs: Outputs { params, returned },
        })
    }

    fn bind(&self, input: &InputVector, m: &mut Machine) -> Result<(), SchemaError> {
        let mut problems = Vec::new();
        for (name, kind, slot) in &self.params {
            let Some(value) = input.get(name) else {
                problems.push(format!("{name}: missing from input"));
                continue;
            };
            if !value.fits(*kind) {
                problems.push(format!("{name}: value {value} does not fit {kind}"));
                continue;
            }
            match (slot, value) {
                (Slot::Int(i), Value::Int(v)) => m.ints[*i] = *v,
                (Slot::Array(i), Value::Array(v)) => m.arrays[*i] = v.clone(),
                (Slot::Matrix(i), Value::Array(_)) => {
                    m.matrices[*i] = Matrix {
                        rows: 0,
                        cols: 0,
                        data: Vec::new(),
                    }
                }
                (Slot::Matrix(i), Value::Matrix(rows)) => {
                    m.matrices[*i] = Matrix {
                        rows: rows.len(),
                        cols: rows.first().map_or(0, Vec::len),
                        data: rows.iter().flatten().copied().collect(),
                    }
                }
                _ => unreachable!(),
            }
        }
        for name in input.bindings.keys() {
            if !self.params.iter().any(|(n, _, _)| n == name) {
                problems.push(format!("{name}: not a parameter"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(SchemaError {
                mismatches: problems,
            })
        }
    }

    fn unbind(&self, m: &Machine) -> InputVector {
        let mut out = InputVector::new();
        for (name, _, slot) in &self.params {
            let value = match slot {
                Slot::Int(i) => Value::Int(m.ints[*i]),
                Slot::Array(i) => Value::Array(m.arrays[*i].clone()),
                Slot::Matrix(i) => {
                    let mat = &m.matrices[*i];
                    let rows = (0..mat.rows)
                        .map(|r| mat.data[r * mat.cols..(r + 1) * mat.cols].to_vec())
                        .collect();
                    Value::matrix(rows)
                }
            };
            out.bindings.insert(name.clone(), value);
        }
        out
    }
}

enum Flow {
    Normal,
    Return(Option<i64>),
}

enum Fault {
    Budget,
    Runtime(String, Span),
}

struct Machine {
    ints: Vec<i64>,
    arrays: Vec<Vec<i64>>,
    matrices: Vec<Matrix>,
    events: Vec<Event>,
    steps: u64,
    budget: u64,
}

type Step<T> = Result<T, Fault>;

impl Machine {
    fn fail(self, fault: Fault) -> ExecError {
        let partial = Trace {
            events: self.events,
            steps_used: self.steps,
        };
        match fault {
            Fault::Budget => ExecError::BudgetExceeded {
                budget: self.budget,
                partial,
            },
            Fault::Runtime(message, span) => ExecError::Runtime {
                message,
                span,
                partial,
            },
        }
    }

    #[inline]
    fn tick(&mut self) -> Step<()> {
        if self.steps >= self.budget {
            return Err(Fault::Budget);
        }
        self.steps += 1;
        Ok(())
    }

    fn decide(&mut self, d: DecisionId, cond: &CExpr) -> Step<bool> {
        self.tick()?;
        let taken = self.eval(cond)? != 0;
        self.events.push(Event { decision: d, taken });
        Ok(taken)
    }

    fn block(&mut self, stmts: &[CStmt]) -> Step<Flow> {
        for s in stmts {
            if let Flow::Return(v) = self.stmt(s)? {
                return Ok(Flow::Return(v));
            }
        }
        Ok(Flow::Normal)
    }

    fn stmt(&mut self, s: &CStmt) -> Step<Flow> {
        match s {
            CStmt::Set(i, e) => {
                self.tick()?;
                self.ints[*i] = self.eval(e)?;
            }
            CStmt::Store1(a, idx, e, span) => {
                self.tick()?;
                let idx = self.eval(idx)?;
                let v = self.eval(e)?;
                let arr = &mut self.arrays[*a];
                let i = index(idx, arr.len(), *span)?;
                arr[i] = v;
            }
            CStmt::Store2(mi, r, c, e, span) => {
                self.tick()?;
                let r = self.eval(r)?;
                let c = self.eval(c)?;
                let v = self.eval(e)?;
                let m = &mut self.matrices[*mi];
                let (r, c) = (index(r, m.rows, *span)?, index(c, m.cols, *span)?);
                m.data[r * m.cols + c] = v;
            }
            CStmt::If(d, cond, then_b, else_b) => {
                self.tick()?;
                let branch = if self.decide(*d, cond)? {
                    then_b
                } else {
                    else_b
                };
                return self.block(branch);
            }
            CStmt::While(d, cond, body) => {
                self.tick()?;
                while self.decide(*d, cond)? {
                    if let Flow::Return(v) = self.block(body)? {
                        return Ok(Flow::Return(v));
                    }
                }
            }
            CStmt::For(d, init, cond, update, body) => {
                self.tick()?;
                if let Some(init) = init {
                    self.stmt(init)?;
                }
                while self.decide(*d, cond)? {
                    if let Flow::Return(v) = self.block(body)? {
                        return Ok(Flow::Return(v));
                    }
                    if let Some(update) = update {
                        self.stmt(update)?;
                    }
                }
            }
            CStmt::Return(v) => {
                self.tick()?;
                let v = match v {
                    Some(e) => Some(self.eval(e)?),
                    None => None,
                };
                return Ok(Flow::Return(v));
            }
        }
        Ok(Flow::Normal)
    }

    fn eval(&self, e: &CExpr) -> Step<i64> {
        Ok(match e {
            CExpr::Int(v) => *v,
            CExpr::Local(i) => self.ints[*i],
            CExpr::Load1(a, idx, span) => {
                let arr = &self.arrays[*a];
                arr[index(self.eval(idx)?, arr.len(), *span)?]
            }
            CExpr::Load2(mi, r, c, span) => {
                let m = &self.matrices[*mi];
                let r = index(self.eval(r)?, m.rows, *span)?;
                let c = index(self.eval(c)?, m.cols, *span)?;
                m.data[r * m.cols + c]
            }
            CExpr::Neg(inner) => self.eval(inner)?.wrapping_neg(),
            CExpr::Not(inner) => (self.eval(inner)? == 0) as i64,
            CExpr::And(a, b) => (self.eval(a)? != 0 && self.eval(b)? != 0) as i64,
            CExpr::Or(a, b) => (self.eval(a)? != 0 || self.eval(b)? != 0) as i64,
            CExpr::Bin(op, a, b, span) => {
                let (a, b) = (self.eval(a)?, self.eval(b)?);
                match op {
                    BinOp::Add => a.wrapping_add(b),
                    BinOp::Sub => a.wrapping_sub(b),
                    BinOp::Mul => a.wrapping_mul(b),
                    BinOp::Div | BinOp::Rem if b == 0 => {
                        return Err(Fault::Runtime("division by zero".into(), *span))
                    }
                    BinOp::Div => a.wrapping_div(b),
                    BinOp::Rem => a.wrapping_rem(b),
                    BinOp::Eq => (a == b) as i64,
                    BinOp::Ne => (a != b) as i64,
                    BinOp::Lt => (a < b) as i64,
                    BinOp::Le => (a <= b) as i64,
                    BinOp::Gt => (a > b) as i64,
                    BinOp::Ge => (a >= b) as i64,
                    BinOp::And | BinOp::Or => unreachable!("lowered to short-circuit form"),
                }
            }
        })
    }
}

fn index(i: i64, len: usize, span: Span) -> Step<usize> {
    if i < 0 || i as u64 >= len as u64 {
        Err(Fault::Runtime(
            format!("index {i} out of bounds for length {len}"),
            span,
        ))
    } else {
        Ok(i as usize)
    }
}
