use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::dsl::DecisionTable;
use crate::schema::InputVector;
use crate::trace::PathKey;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathRecord {
    pub path: PathKey,
    pub input: InputVector,
    pub first_k: u64,
    pub length: usize,
    pub cost: u64,
}

/// Unique feasible paths, each with the first input that produced it.
#[derive(Debug, Clone, Default)]
pub struct PathSet {
    index: HashMap<PathKey, usize>,
    records: Vec<PathRecord>,
}

impl PathSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn contains(&self, key: &PathKey) -> bool {
        self.index.contains_key(key)
    }

    pub fn get(&self, key: &PathKey) -> Option<&PathRecord> {
        self.index.get(key).map(|&i| &self.records[i])
    }

    /// Records in insertion order.
    pub fn records(&self) -> &[PathRecord] {
        &self.records
    }

    pub fn keys(&self) -> impl Iterator<Item = &PathKey> {
        self.records.iter().map(|r| &r.path)
    }

    pub fn longest_length(&self) -> usize {
        self.records.iter().map(|r| r.length).max().unwrap_or(0)
    }

    /// Record `key` unless already present. Length and cost are derived
    /// from the key; labels unknown to `table` count zero cost.
    pub fn insert(
        &mut self,
        key: PathKey,
        input: InputVector,
        k: u64,
        table: &DecisionTable,
    ) -> bool {
        if self.index.contains_key(&key) {
            return false;
        }
        let length = key.len();
        let cost = key.cost(table).unwrap_or(0);
        self.index.insert(key.clone(), self.records.len());
        self.records.push(PathRecord {
            path: key,
            input,
            first_k: k,
            length,
            cost,
        });
        true
    }

    /// Set union; on conflicts the receiver keeps its record.
    pub fn absorb(&mut self, other: PathSet) {
        for r in other.records {
            if !self.index.contains_key(&r.path) {
                self.index.insert(r.path.clone(), self.records.len());
                self.records.push(r);
            }
        }
    }

    pub fn is_subset_of(&self, other: &PathSet) -> bool {
        self.keys().all(|k| other.contains(k))
    }

    pub fn same_paths(&self, other: &PathSet) -> bool {
        self.len() == other.len() && self.is_subset_of(other)
    }
}

impl FromIterator<PathRecord> for PathSet {
    fn from_iter<T: IntoIterator<Item = PathRecord>>(iter: T) -> Self {
        let mut set = PathSet::new();
        for r in iter {
            if !set.index.contains_key(&r.path) {
                set.index.insert(r.path.clone(), set.records.len());
                set.records.push(r);
            }
        }
        set
    }
}

/// Free-function form of [`PathSet::insert`].
pub fn insert_path(
    set: &mut PathSet,
    key: PathKey,
    input: InputVector,
    k: u64,
    table: &DecisionTable,
) -> bool {
    set.insert(key, input, k, table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::interp::execute;
    use crate::schema::Value;
    use crate::trace::render_trace;

    fn linear_input(a: Vec<i64>, z: i64) -> InputVector {
        let d = a.len() as i64;
        InputVector::new()
            .with("a", Value::Array(a))
            .with("d", Value::Int(d))
            .with("z", Value::Int(z))
    }

    #[test]
    fn first_insert_wins() {
        let s = corpus::linear_search();
        let mut set = PathSet::new();
        let key = PathKey::from_raw("a -b -a");
        assert!(insert_path(
            &mut set,
            key.clone(),
            linear_input(vec![0], 7),
            0,
            &s.table
        ));
        assert!(!insert_path(
            &mut set,
            key.clone(),
            linear_input(vec![1], 7),
            3,
            &s.table
        ));
        let r = set.get(&key).unwrap();
        assert_eq!(r.input, linear_input(vec![0], 7));
        assert_eq!((r.first_k, r.length, r.cost), (0, 3, 1));
        assert_eq!(set.len(), 1);
    }

    #[test]
    fn equal_decisions_deduplicate() {
        let s = corpus::linear_search();
        let mut set = PathSet::new();
        for (a, z) in [(vec![5], 5), (vec![9], 9)] {
            let input = linear_input(a, z);
            let run = execute(&s.program, &s.table, &input, 1000).unwrap();
            let key = render_trace(&run.trace, &s.table).unwrap();
            assert_eq!(key.as_str(), "a b -a");
            set.insert(key, input, 1, &s.table);
        }
        assert_eq!(set.len(), 1);
        assert_eq!(set.records()[0].input, linear_input(vec![5], 5));
    }
}
