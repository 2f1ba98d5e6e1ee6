//! Canonical source rendering. Output re-parses to the same tree.

use std::fmt::Write;

use super::ast::*;

pub fn pretty(program: &Program) -> String {
    let mut out = String::new();
    let params: Vec<String> = program
        .params
        .iter()
        .map(|p| format!("{}: {}", p.name, p.kind))
        .collect();
    let _ = write!(out, "fn {}({}) ", program.name, params.join(", "));
    block(&mut out, &program.body, 0);
    out.push('\n');
    out
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("    ");
    }
}

fn block(out: &mut String, b: &Block, level: usize) {
    out.push_str("{\n");
    for s in &b.stmts {
        stmt(out, s, level + 1);
    }
    indent(out, level);
    out.push('}');
}

fn stmt(out: &mut String, s: &Stmt, level: usize) {
    indent(out, level);
    match &s.kind {
        StmtKind::Let { name, init } => {
            out.push_str("let ");
            out.push_str(name);
            if let Some(e) = init {
                out.push_str(" = ");
                out.push_str(&expr(e));
            }
            out.push(';');
        }
        StmtKind::Assign(a) => {
            out.push_str(&assign(a));
            out.push(';');
        }
        StmtKind::If {
            cond,
            then_block,
            else_block,
            ..
        } => {
            let _ = write!(out, "if ({}) ", expr(cond));
            block(out, then_block, level);
            if let Some(e) = else_block {
                out.push_str(" else ");
                block(out, e, level);
            }
        }
        StmtKind::While { cond, body, .. } => {
            let _ = write!(out, "while ({}) ", expr(cond));
            block(out, body, level);
        }
        StmtKind::For {
            init,
            cond,
            update,
            body,
            ..
        } => {
            let init = init.as_ref().map(assign).unwrap_or_default();
            let update = update.as_ref().map(assign).unwrap_or_default();
            let _ = write!(out, "for ({init}; {}; {update}) ", expr(cond));
            block(out, body, level);
        }
        StmtKind::Return(value) => match value {
            Some(e) => {
                let _ = write!(out, "return {};", expr(e));
            }
            None => out.push_str("return;"),
        },
    }
    out.push('\n');
}

fn assign(a: &Assign) -> String {
    let target = match &a.target {
        LValue::Var(n) => n.clone(),
        LValue::Index(n, i) => format!("{n}[{}]", expr(i)),
        LValue::Index2(n, i, j) => format!("{n}[{}][{}]", expr(i), expr(j)),
    };
    format!("{target} = {}", expr(&a.value))
}

pub fn expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, 0);
    out
}

fn write_expr(out: &mut String, e: &Expr, min_prec: u8) {
    match &e.kind {
        ExprKind::Int(v) => {
            if *v < 0 {
                let _ = write!(out, "({v})");
            } else {
                let _ = write!(out, "{v}");
            }
        }
        ExprKind::Var(n) => out.push_str(n),
        ExprKind::Index(n, i) => {
            let _ = write!(out, "{n}[{}]", expr(i));
        }
        ExprKind::Index2(n, i, j) => {
            let _ = write!(out, "{n}[{}][{}]", expr(i), expr(j));
        }
        ExprKind::Unary(op, inner) => {
            out.push(match op {
                UnOp::Neg => '-',
                UnOp::Not => '!',
            });
            // Unary binds tighter than every binary operator.
            write_expr(out, inner, 7);
        }
        ExprKind::Binary(op, lhs, rhs) => {
            let prec = op.precedence();
            let wrap = prec < min_prec;
            if wrap {
                out.push('(');
            }
            write_expr(out, lhs, prec);
            let _ = write!(out, " {} ", op.symbol());
            write_expr(out, rhs, prec + 1);
            if wrap {
                out.push(')');
            }
        }
    }
}
