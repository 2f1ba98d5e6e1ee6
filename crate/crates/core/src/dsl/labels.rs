//! Branch labels: one per decision statement, in source order.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::ast::{Block, DecisionId, Program, Span, Stmt, StmtKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecisionKind {
    Loop,
    Branch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub id: DecisionId,
    pub label: String,
    pub kind: DecisionKind,
    /// Number of enclosing decision statements.
    pub nesting_depth: u32,
    /// A loop with no loop anywhere in its body.
    pub innermost_loop: bool,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DecisionTable {
    pub entries: Vec<Decision>,
}

impl DecisionTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: DecisionId) -> Option<&Decision> {
        self.entries.get(id.index())
    }

    pub fn by_label(&self, label: &str) -> Option<&Decision> {
        let index = index_for_label(label)?;
        self.entries.get(index)
    }

    pub fn is_innermost_loop(&self, id: DecisionId) -> bool {
        self.get(id).is_some_and(|d| d.innermost_loop)
    }
}

/// Bijective base-26 label: 0 → `a`, 25 → `z`, 26 → `aa`, 27 → `ab`, …
pub fn label_for(index: usize) -> String {
    let mut n = index + 1;
    let mut out = Vec::new();
    while n > 0 {
        n -= 1;
        out.push(b'a' + (n % 26) as u8);
        n /= 26;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii")
}

/// Inverse of [`label_for`].
pub fn index_for_label(label: &str) -> Option<usize> {
    if label.is_empty() {
        return None;
    }
    let mut n: usize = 0;
    for b in label.bytes() {
        if !b.is_ascii_lowercase() {
            return None;
        }
        n = n.checked_mul(26)?.checked_add((b - b'a') as usize + 1)?;
    }
    Some(n - 1)
}

/// Order of labels in the base-26 numbering (shorter labels first).
pub fn compare_labels(a: &str, b: &str) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

pub fn assign_labels(program: &Program) -> DecisionTable {
    let mut entries = Vec::new();
    walk_block(&program.body, 0, &mut entries);
    entries.sort_by_key(|d: &Decision| d.id);
    DecisionTable { entries }
}

fn walk_block(block: &Block, depth: u32, out: &mut Vec<Decision>) {
    for stmt in &block.stmts {
        walk_stmt(stmt, depth, out);
    }
}

fn walk_stmt(stmt: &Stmt, depth: u32, out: &mut Vec<Decision>) {
    if let Some(id) = stmt.decision() {
        let kind = match stmt.kind {
            StmtKind::If { .. } => DecisionKind::Branch,
            _ => DecisionKind::Loop,
        };
        let innermost_loop =
            kind == DecisionKind::Loop && !stmt.blocks().iter().any(|b| block_has_loop(b));
        out.push(Decision {
            id,
            label: label_for(id.index()),
            kind,
            nesting_depth: depth,
            innermost_loop,
            span: stmt.span,
        });
        for b in stmt.blocks() {
            walk_block(b, depth + 1, out);
        }
    }
}

fn block_has_loop(block: &Block) -> bool {
    block.stmts.iter().any(|s| {
        matches!(s.kind, StmtKind::While { .. } | StmtKind::For { .. })
            || s.blocks().iter().any(|b| block_has_loop(b))
    })
}
