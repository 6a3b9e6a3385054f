//! Greedy left-deep planning and plan-quality classification.

use std::fmt;

use crate::estimators::{Expression, SourceSelection};
use crate::query::{BasicGraphPattern, JoinEdge, TriplePattern};
use crate::rdf::TripleStore;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanClass {
    Optimal,
    SubOptimal,
    OnlyPlan,
    Failed(String),
}

impl PlanClass {
    /// Report label.
    pub fn label(&self) -> &'static str {
        match self {
            PlanClass::Optimal => "OptP",
            PlanClass::SubOptimal => "subOpt",
            PlanClass::OnlyPlan => "OnlyP",
            PlanClass::Failed(_) => "Failed",
        }
    }
}

impl fmt::Display for PlanClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

fn connected(a: usize, b: usize, edges: &[JoinEdge]) -> bool {
    edges.iter().any(|e| e.touches(a) && e.touches(b))
}

fn connected_to_left(left: &Expression, tp: usize, edges: &[JoinEdge]) -> bool {
    left.ordinals().iter().any(|&o| connected(o, tp, edges))
}

/// Candidate first joins: connected pairs, or every pair when no pair is
/// connected. Ordered by ordinals.
fn first_candidates(patterns: &[TriplePattern], edges: &[JoinEdge]) -> Vec<(usize, usize)> {
    let mut all = Vec::new();
    let mut linked = Vec::new();
    for i in 0..patterns.len() {
        for j in i + 1..patterns.len() {
            let pair = (i, j);
            all.push(pair);
            if connected(patterns[i].ordinal, patterns[j].ordinal, edges) {
                linked.push(pair);
            }
        }
    }
    if linked.is_empty() {
        all
    } else {
        linked
    }
}

/// Remaining patterns that may extend `left`: those connected to it, or all of
/// them when none is.
fn next_candidates<'p>(
    left: &Expression,
    remaining: &[&'p TriplePattern],
    edges: &[JoinEdge],
) -> Vec<&'p TriplePattern> {
    let linked: Vec<_> = remaining
        .iter()
        .copied()
        .filter(|tp| connected_to_left(left, tp.ordinal, edges))
        .collect();
    if linked.is_empty() {
        remaining.to_vec()
    } else {
        linked
    }
}

/// Index of the smallest score; the first one wins ties.
fn argmin<E>(scores: impl IntoIterator<Item = Result<f64, E>>) -> Result<Option<usize>, E> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in scores.into_iter().enumerate() {
        let s = s?;
        if best.is_none_or(|(_, b)| s < b) {
            best = Some((i, s));
        }
    }
    Ok(best.map(|(i, _)| i))
}

/// Greedy left-deep plan: start with the cheapest candidate pair, then keep
/// adding the cheapest candidate pattern. Each candidate is scored by `card`
/// applied to the join it would produce. Ties go to the lowest ordinals.
pub fn greedy_left_deep_plan<E, F>(bgp: &BasicGraphPattern, mut card: F) -> Result<Expression, E>
where
    F: FnMut(&Expression) -> Result<f64, E>,
{
    let patterns = &bgp.patterns;
    assert!(!patterns.is_empty(), "a query has at least one pattern");
    if patterns.len() == 1 {
        return Ok(Expression::leaf(patterns[0].clone()));
    }
    let edges = bgp.join_edges();
    let pair_join = |(i, j): (usize, usize)| {
        Expression::join(
            Expression::leaf(patterns[i].clone()),
            Expression::leaf(patterns[j].clone()),
            &edges,
        )
    };
    let pairs = first_candidates(patterns, &edges);
    let joins: Vec<Expression> = pairs.iter().map(|&p| pair_join(p)).collect();
    let pick = argmin(joins.iter().map(&mut card))?.expect("at least one pair");
    let mut left = joins.into_iter().nth(pick).expect("picked index exists");

    let (a, b) = pairs[pick];
    let mut remaining: Vec<&TriplePattern> = patterns
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != a && *k != b)
        .map(|(_, tp)| tp)
        .collect();
    while !remaining.is_empty() {
        let candidates = next_candidates(&left, &remaining, &edges);
        let joins: Vec<Expression> = candidates
            .iter()
            .map(|tp| Expression::join(left.clone(), Expression::leaf((*tp).clone()), &edges))
            .collect();
        let pick = argmin(joins.iter().map(&mut card))?.expect("at least one candidate");
        let chosen = candidates[pick].ordinal;
        left = joins.into_iter().nth(pick).expect("picked index exists");
        remaining.retain(|tp| tp.ordinal != chosen);
    }
    Ok(left)
}

/// Whether every join of a left-deep `plan` has the smallest real cardinality
/// among the joins that could have been chosen at that step.
pub fn classify_plan<E, F>(plan: &Expression, bgp: &BasicGraphPattern, mut real: F) -> PlanClass
where
    E: fmt::Display,
    F: FnMut(&Expression) -> Result<f64, E>,
{
    if plan.join_count() <= 1 {
        return PlanClass::OnlyPlan;
    }
    if !plan.is_left_deep() {
        return PlanClass::Failed("plan is not left-deep".to_string());
    }
    let edges = bgp.join_edges();
    let mut optimal = true;
    for node in plan.join_nodes() {
        let Expression::Join { left, .. } = node else {
            unreachable!("join_nodes yields joins")
        };
        let chosen = match real(node) {
            Ok(v) => v,
            Err(e) => return PlanClass::Failed(e.to_string()),
        };
        let alternatives: Vec<Expression> = match left.as_leaf() {
            Some(_) => first_candidates(&bgp.patterns, &edges)
                .into_iter()
                .map(|(i, j)| {
                    Expression::join(
                        Expression::leaf(bgp.patterns[i].clone()),
                        Expression::leaf(bgp.patterns[j].clone()),
                        &edges,
                    )
                })
                .collect(),
            None => {
                let used = left.ordinals();
                let remaining: Vec<&TriplePattern> =
                    bgp.patterns.iter().filter(|tp| !used.contains(&tp.ordinal)).collect();
                next_candidates(left, &remaining, &edges)
                    .into_iter()
                    .map(|tp| Expression::join((**left).clone(), Expression::leaf(tp.clone()), &edges))
                    .collect()
            }
        };
        for alt in &alternatives {
            match real(alt) {
                Ok(v) if v < chosen => optimal = false,
                Ok(_) => {}
                Err(e) => return PlanClass::Failed(e.to_string()),
            }
        }
    }
    if optimal {
        PlanClass::Optimal
    } else {
        PlanClass::SubOptimal
    }
}

/// `#T`: pattern-wise count of relevant sources.
pub fn tp_sources_count(bgp: &BasicGraphPattern, stores: &[TripleStore]) -> usize {
    SourceSelection::compute(bgp, stores).total()
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;
    use std::convert::Infallible;

    use super::*;
    use crate::fixtures;
    use crate::query::parse_query;

    /// Leaf estimates from a table, joins as the product of their leaves.
    fn product_of(leaves: &[f64]) -> impl FnMut(&Expression) -> Result<f64, Infallible> + '_ {
        move |e| Ok(e.leaves().iter().map(|tp| leaves[tp.ordinal]).product())
    }

    fn real_counts() -> BTreeMap<Vec<usize>, f64> {
        BTreeMap::from([
            (vec![0, 1], 50.0),
            (vec![0, 2], 100.0),
            (vec![1, 2], 50.0),
            (vec![0, 1, 2], 50.0),
        ])
    }

    fn star_real(e: &Expression) -> Result<f64, Infallible> {
        Ok(real_counts()[&e.ordinals().into_iter().collect::<Vec<_>>()])
    }

    #[test]
    fn star_engine_plans() {
        let bgp = parse_query(fixtures::STAR_QUERY).unwrap();
        let one = greedy_left_deep_plan(&bgp, product_of(&[90.0, 250.0, 300.0])).unwrap();
        assert_eq!(one.to_string(), "((tp0 ⋈ tp1) ⋈ tp2)");
        assert_eq!(classify_plan(&one, &bgp, star_real), PlanClass::Optimal);
        let two = greedy_left_deep_plan(&bgp, product_of(&[200.0, 600.0, 500.0])).unwrap();
        assert_eq!(two.to_string(), "((tp0 ⋈ tp2) ⋈ tp1)");
        assert_eq!(classify_plan(&two, &bgp, star_real), PlanClass::SubOptimal);
    }

    #[test]
    fn small_queries() {
        let bgp = parse_query("SELECT * WHERE { ?x <http://x/p> ?y }").unwrap();
        let plan = greedy_left_deep_plan(&bgp, product_of(&[1.0])).unwrap();
        assert!(plan.is_leaf());
        assert_eq!(classify_plan(&plan, &bgp, star_real), PlanClass::OnlyPlan);
        let bgp = parse_query("SELECT * WHERE { ?x <http://x/p> ?y . ?x <http://x/q> ?z }").unwrap();
        let plan = greedy_left_deep_plan(&bgp, product_of(&[1.0, 1.0])).unwrap();
        assert_eq!(classify_plan(&plan, &bgp, star_real), PlanClass::OnlyPlan);
    }

    #[test]
    fn disconnected_patterns_come_last() {
        let bgp = parse_query(
            "SELECT * WHERE { ?a <http://x/p> ?b . ?c <http://x/q> ?d . ?a <http://x/q> ?e }",
        )
        .unwrap();
        // tp1 is cheapest but shares nothing
        let plan = greedy_left_deep_plan(&bgp, product_of(&[10.0, 1.0, 10.0])).unwrap();
        assert_eq!(plan.to_string(), "((tp0 ⋈ tp2) ⋈ tp1)");
    }

    #[test]
    fn oracle_errors_fail_the_classification() {
        let bgp = parse_query(fixtures::STAR_QUERY).unwrap();
        let plan = greedy_left_deep_plan(&bgp, product_of(&[1.0, 2.0, 3.0])).unwrap();
        let class = classify_plan(&plan, &bgp, |_| Err::<f64, _>("oracle blow-up"));
        assert_eq!(class, PlanClass::Failed("oracle blow-up".into()));
        assert_eq!(class.label(), "Failed");
    }

    #[test]
    fn labels() {
        let labels: Vec<_> = [PlanClass::Optimal, PlanClass::SubOptimal, PlanClass::OnlyPlan]
            .iter()
            .map(PlanClass::label)
            .collect();
        assert_eq!(labels, ["OptP", "subOpt", "OnlyP"]);
    }

    #[test]
    fn source_count_on_toy_federation() {
        let stores = fixtures::toy_federation();
        let bgp = parse_query("SELECT * WHERE { ?x <http://x/p> ?y . ?x <http://x/q> ?z . ?x <http://x/zz> ?w }")
            .unwrap();
        assert_eq!(tp_sources_count(&bgp, &stores), 3);
    }
}
