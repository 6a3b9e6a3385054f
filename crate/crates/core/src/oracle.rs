//! Exact result sizes by evaluating plans over the stores.
//!
//! Bag semantics throughout. Joins are hash joins on the shared variables and
//! may combine bindings from different sources. Every intermediate result is
//! checked against a binding cap before it is materialized.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::estimators::Expression;
use crate::query::TriplePattern;
use crate::rdf::{Term, TripleStore};

pub const DEFAULT_ORACLE_CAP: u64 = 10_000_000;

pub const ORACLE_CAP_ENV: &str = "FEDCARD_ORACLE_CAP";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("oracle blow-up: {size} bindings exceed the cap of {cap}")]
    Blowup { size: u128, cap: u64 },
}

/// Cap from `FEDCARD_ORACLE_CAP`, falling back to the default when unset or
/// unparsable.
pub fn oracle_cap_from_env() -> u64 {
    std::env::var(ORACLE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_ORACLE_CAP)
}

/// A multiset of solutions over `vars`; values are interned term ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Bindings {
    pub vars: Vec<String>,
    pub rows: Vec<Vec<u32>>,
}

impl Bindings {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    fn column(&self, var: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == var)
    }
}

/// Exact counts for every node of a plan.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PlanCounts {
    /// Leaf counts by pattern ordinal.
    pub leaves: BTreeMap<usize, u64>,
    /// Join counts in post-order.
    pub joins: Vec<u64>,
}

impl PlanCounts {
    pub fn tp_vector(&self) -> Vec<f64> {
        self.leaves.values().map(|&c| c as f64).collect()
    }

    pub fn join_vector(&self) -> Vec<f64> {
        self.joins.iter().map(|&c| c as f64).collect()
    }

    pub fn root(&self) -> u64 {
        match self.joins.last() {
            Some(&c) => c,
            None => self.leaves.values().next().copied().unwrap_or(0),
        }
    }
}

pub struct Oracle<'a> {
    stores: &'a [TripleStore],
    cap: u64,
    ids: HashMap<&'a Term, u32>,
}

impl<'a> Oracle<'a> {
    pub fn new(stores: &'a [TripleStore], cap: u64) -> Self {
        Oracle {
            stores,
            cap,
            ids: HashMap::new(),
        }
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    fn check(&self, size: u128) -> Result<(), OracleError> {
        if size > self.cap as u128 {
            Err(OracleError::Blowup { size, cap: self.cap })
        } else {
            Ok(())
        }
    }

    fn intern(&mut self, term: &'a Term) -> u32 {
        let next = self.ids.len() as u32;
        *self.ids.entry(term).or_insert(next)
    }

    /// Number of triples matching `tp` across all stores.
    pub fn tp_count(&self, tp: &TriplePattern) -> u64 {
        self.stores.iter().map(|s| s.count_matching(tp) as u64).sum()
    }

    /// Solutions of a single pattern across all stores.
    pub fn match_pattern(&mut self, tp: &TriplePattern) -> Result<Bindings, OracleError> {
        self.check(self.tp_count(tp) as u128)?;
        let vars: Vec<String> = tp.variables().into_iter().map(str::to_string).collect();
        let positions: Vec<_> = vars.iter().map(|v| tp.positions_of(v)[0]).collect();
        let stores = self.stores;
        let mut rows = Vec::new();
        for store in stores {
            for triple in store.matching(tp) {
                let row = positions.iter().map(|&pos| self.intern(triple.term_at(pos))).collect();
                rows.push(row);
            }
        }
        Ok(Bindings { vars, rows })
    }

    /// Bag join on the shared variables; a cartesian product when there are
    /// none.
    pub fn join(&self, left: &Bindings, right: &Bindings) -> Result<Bindings, OracleError> {
        let shared: Vec<(usize, usize)> = left
            .vars
            .iter()
            .enumerate()
            .filter_map(|(i, v)| right.column(v).map(|j| (i, j)))
            .collect();
        let extra: Vec<usize> = (0..right.vars.len())
            .filter(|j| !shared.iter().any(|&(_, sj)| sj == *j))
            .collect();
        let mut vars = left.vars.clone();
        vars.extend(extra.iter().map(|&j| right.vars[j].clone()));

        let mut table: HashMap<Vec<u32>, Vec<usize>> = HashMap::new();
        for (idx, row) in right.rows.iter().enumerate() {
            let key = shared.iter().map(|&(_, j)| row[j]).collect();
            table.entry(key).or_default().push(idx);
        }
        let size: u128 = left
            .rows
            .iter()
            .map(|row| {
                let key: Vec<u32> = shared.iter().map(|&(i, _)| row[i]).collect();
                table.get(&key).map_or(0, |m| m.len() as u128)
            })
            .sum();
        self.check(size)?;

        let mut rows = Vec::with_capacity(size as usize);
        for row in &left.rows {
            let key: Vec<u32> = shared.iter().map(|&(i, _)| row[i]).collect();
            if let Some(matches) = table.get(&key) {
                for &idx in matches {
                    let mut out = row.clone();
                    out.extend(extra.iter().map(|&j| right.rows[idx][j]));
                    rows.push(out);
                }
            }
        }
        Ok(Bindings { vars, rows })
    }

    /// Solutions of a whole expression.
    pub fn evaluate(&mut self, expr: &Expression) -> Result<Bindings, OracleError> {
        let mut counts = PlanCounts::default();
        self.walk(expr, &mut counts)
    }

    fn walk(&mut self, expr: &Expression, counts: &mut PlanCounts) -> Result<Bindings, OracleError> {
        match expr {
            Expression::Leaf(tp) => {
                let b = self.match_pattern(tp)?;
                counts.leaves.insert(tp.ordinal, b.len() as u64);
                Ok(b)
            }
            Expression::Join { left, right, .. } => {
                let l = self.walk(left, counts)?;
                let r = self.walk(right, counts)?;
                let b = self.join(&l, &r)?;
                counts.joins.push(b.len() as u64);
                Ok(b)
            }
        }
    }

    /// Exact counts at every node of `plan`.
    pub fn plan_counts(&mut self, plan: &Expression) -> Result<PlanCounts, OracleError> {
        let mut counts = PlanCounts::default();
        self.walk(plan, &mut counts)?;
        Ok(counts)
    }

    /// Result size of `expr`.
    pub fn cardinality(&mut self, expr: &Expression) -> Result<u64, OracleError> {
        Ok(self.evaluate(expr)?.len() as u64)
    }

    /// Number of distinct solutions projected onto `projection`.
    pub fn distinct_cardinality(&mut self, expr: &Expression, projection: &[String]) -> Result<u64, OracleError> {
        let b = self.evaluate(expr)?;
        let cols: Vec<usize> = projection.iter().filter_map(|v| b.column(v)).collect();
        let set: BTreeSet<Vec<u32>> = b
            .rows
            .iter()
            .map(|row| cols.iter().map(|&c| row[c]).collect())
            .collect();
        Ok(set.len() as u64)
    }
}
