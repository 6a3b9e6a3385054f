use std::collections::{BTreeMap, BTreeSet};

use super::{Engine, EstimateCard, SourceSet};
use crate::query::TriplePattern;
use crate::summaries::{CharSetSummary, CharacteristicSet};

/// `count(C) · Π occ(p, C) / count(C)`, arranged so that a single predicate
/// yields `occ(p, C)` exactly.
fn scaled_occurrences<'a>(cs: &CharacteristicSet, predicates: impl Iterator<Item = &'a str>) -> f64 {
    let mut num = 1.0;
    let mut n = 0;
    for p in predicates {
        num *= cs.occurrences_of(p) as f64;
        n += 1;
    }
    if n == 0 {
        return cs.count as f64;
    }
    num / (cs.count as f64).powi(n - 1)
}

fn predicate_set(patterns: &[TriplePattern]) -> BTreeSet<&str> {
    patterns.iter().filter_map(|tp| tp.predicate_iri()).collect()
}

/// Star estimate over the characteristic sets containing every predicate of
/// `star`, summed over sources. The distinct variant counts entities only.
pub fn odyssey_star_card(
    star: &[TriplePattern],
    distinct: bool,
    summary: &CharSetSummary,
    sources: &SourceSet,
) -> EstimateCard {
    let predicates = predicate_set(star);
    let required: Vec<&str> = predicates.iter().copied().collect();
    let mut total = 0.0;
    for stats in sources.iter().filter_map(|name| summary.source(name)) {
        for (_, cs) in stats.supersets(&required) {
            total += if distinct {
                cs.count as f64
            } else {
                scaled_occurrences(cs, required.iter().copied())
            };
        }
    }
    EstimateCard::new(Engine::Odyssey, total)
}

/// Estimate for two stars joined by `link`, a predicate of `star_k` whose
/// object is the subject of `star_l`, from the characteristic pairs.
pub fn odyssey_linked_card(
    star_k: &BTreeSet<String>,
    star_l: &BTreeSet<String>,
    link: &str,
    summary: &CharSetSummary,
    sources: &SourceSet,
) -> EstimateCard {
    let mut total = 0.0;
    for stats in sources.iter().filter_map(|name| summary.source(name)) {
        for pair in stats.pairs.iter().filter(|cp| cp.predicate == link) {
            let ci = &stats.sets[pair.from];
            let cj = &stats.sets[pair.to];
            if !ci.contains_all(star_k.iter().map(String::as_str))
                || !cj.contains_all(star_l.iter().map(String::as_str))
            {
                continue;
            }
            let mut value = pair.count as f64;
            for p in star_k.iter().filter(|p| p.as_str() != link) {
                value *= ci.occurrences_of(p) as f64 / ci.count as f64;
            }
            for p in star_l {
                value *= cj.occurrences_of(p) as f64 / cj.count as f64;
            }
            total += value;
        }
    }
    EstimateCard::new(Engine::Odyssey, total)
}

/// How a set of patterns maps onto the characteristic-set statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OdysseyShape {
    /// Patterns sharing one subject variable.
    Star(Vec<TriplePattern>),
    /// Two stars where the object of `link` in `from` is the subject of `to`.
    Linked {
        from: Vec<TriplePattern>,
        to: Vec<TriplePattern>,
        link: Box<TriplePattern>,
    },
    /// Anything the statistics do not cover.
    Other,
}

/// Variable subject, bound predicate, variable object distinct from the
/// subject.
pub(crate) fn star_eligible(tp: &TriplePattern) -> bool {
    match (tp.subject.as_var(), tp.predicate_iri(), tp.object.as_var()) {
        (Some(s), Some(_), Some(o)) => s != o,
        _ => false,
    }
}

fn objects_are_private(group: &[TriplePattern], others: &[&TriplePattern]) -> bool {
    let mut seen = BTreeSet::new();
    for tp in group {
        let o = tp.object.as_var().expect("eligible pattern");
        if !seen.insert(o) {
            return false;
        }
        if others.iter().any(|t| t.variables().contains(&o)) {
            return false;
        }
    }
    true
}

impl OdysseyShape {
    pub fn of(patterns: &[&TriplePattern]) -> Self {
        if patterns.is_empty() || !patterns.iter().all(|tp| star_eligible(tp)) {
            return OdysseyShape::Other;
        }
        let mut groups: BTreeMap<&str, Vec<TriplePattern>> = BTreeMap::new();
        for tp in patterns {
            groups
                .entry(tp.subject.as_var().expect("eligible pattern"))
                .or_default()
                .push((*tp).clone());
        }
        match groups.len() {
            1 => {
                let star = groups.into_values().next().expect("one group");
                if objects_are_private(&star, &[]) {
                    OdysseyShape::Star(star)
                } else {
                    OdysseyShape::Other
                }
            }
            2 => Self::linked(groups),
            _ => OdysseyShape::Other,
        }
    }

    fn linked(groups: BTreeMap<&str, Vec<TriplePattern>>) -> Self {
        let mut it = groups.into_iter();
        let (sa, a) = it.next().expect("two groups");
        let (sb, b) = it.next().expect("two groups");
        let links_ab: Vec<&TriplePattern> = a.iter().filter(|tp| tp.object.as_var() == Some(sb)).collect();
        let links_ba: Vec<&TriplePattern> = b.iter().filter(|tp| tp.object.as_var() == Some(sa)).collect();
        let (link, from, to) = match (links_ab.as_slice(), links_ba.as_slice()) {
            ([l], []) => ((*l).clone(), a.clone(), b.clone()),
            ([], [l]) => ((*l).clone(), b.clone(), a.clone()),
            _ => return OdysseyShape::Other,
        };
        // apart from the link, the two stars must not share variables
        let rest_from: Vec<TriplePattern> = from.iter().filter(|tp| **tp != link).cloned().collect();
        let to_refs: Vec<&TriplePattern> = to.iter().collect();
        let from_refs: Vec<&TriplePattern> = from.iter().collect();
        if !objects_are_private(&rest_from, &to_refs) || !objects_are_private(&to, &from_refs) {
            return OdysseyShape::Other;
        }
        let mut link_and_rest = rest_from.clone();
        link_and_rest.push(link.clone());
        if !objects_are_private(&link_and_rest, &[]) {
            return OdysseyShape::Other;
        }
        OdysseyShape::Linked {
            from,
            to,
            link: Box::new(link),
        }
    }

    /// Estimate for a covered shape; `None` for `Other`.
    pub fn estimate(&self, summary: &CharSetSummary, sources: &SourceSet) -> Option<EstimateCard> {
        match self {
            OdysseyShape::Star(star) => Some(odyssey_star_card(star, false, summary, sources)),
            OdysseyShape::Linked { from, to, link } => {
                let owned = |ps: &[TriplePattern]| -> BTreeSet<String> {
                    predicate_set(ps).into_iter().map(str::to_string).collect()
                };
                let p = link.predicate_iri().expect("eligible pattern");
                Some(odyssey_linked_card(&owned(from), &owned(to), p, summary, sources))
            }
            OdysseyShape::Other => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::query::parse_query;
    use crate::summaries::build_charsets;

    fn star(query: &str, distinct: bool) -> f64 {
        let bgp = parse_query(query).unwrap();
        let cs = build_charsets(&[fixtures::toy1()]);
        odyssey_star_card(&bgp.patterns, distinct, &cs, &SourceSet::new(["A"])).value
    }

    fn set(ps: &[&str]) -> BTreeSet<String> {
        ps.iter().map(|p| format!("http://x/{p}")).collect()
    }

    #[test]
    fn star_estimates_on_toy1() {
        let pq = "SELECT * WHERE { ?s <http://x/p> ?a . ?s <http://x/q> ?b }";
        assert_eq!(star(pq, false), 1.0);
        assert_eq!(star(pq, true), 1.0);
        assert_eq!(star("SELECT * WHERE { ?s <http://x/p> ?a }", false), 3.0);
    }

    #[test]
    fn linked_estimates_on_toy2() {
        let cs = build_charsets(&[fixtures::toy2()]);
        let a = SourceSet::new(["A"]);
        let q = "http://x/q";
        assert_eq!(odyssey_linked_card(&set(&["q"]), &set(&["p"]), q, &cs, &a).value, 3.0);
        assert_eq!(odyssey_linked_card(&set(&["p", "q"]), &set(&["p"]), q, &cs, &a).value, 1.5);
        let empty = CharSetSummary::default();
        assert_eq!(odyssey_linked_card(&set(&["q"]), &set(&["p"]), q, &empty, &a).value, 0.0);
    }

    #[test]
    fn shapes() {
        let bgp = parse_query(
            "SELECT * WHERE { ?s <http://x/q> ?o . ?o <http://x/p> ?z . ?s <http://x/p> ?w }",
        )
        .unwrap();
        let refs: Vec<_> = bgp.patterns.iter().collect();
        assert!(matches!(OdysseyShape::of(&refs[..1]), OdysseyShape::Star(_)));
        assert!(matches!(OdysseyShape::of(&[refs[0], refs[2]]), OdysseyShape::Star(_)));
        match OdysseyShape::of(&refs) {
            OdysseyShape::Linked { from, to, link } => {
                assert_eq!(link.ordinal, 0);
                assert_eq!(from.len(), 2);
                assert_eq!(to.len(), 1);
            }
            other => panic!("expected linked, got {other:?}"),
        }
        let path = parse_query("SELECT * WHERE { ?a <http://x/p> ?b . ?b <http://x/p> ?c . ?c <http://x/p> ?d }")
            .unwrap();
        let refs: Vec<_> = path.patterns.iter().collect();
        assert_eq!(OdysseyShape::of(&refs), OdysseyShape::Other);
        let bound = parse_query("SELECT * WHERE { ?a <http://x/p> <http://x/o1> }").unwrap();
        assert_eq!(OdysseyShape::of(&[&bound.patterns[0]]), OdysseyShape::Other);
    }

    #[test]
    fn linked_shape_matches_direct_formula() {
        let bgp = parse_query("SELECT * WHERE { ?s <http://x/q> ?o . ?o <http://x/p> ?z }").unwrap();
        let refs: Vec<_> = bgp.patterns.iter().collect();
        let cs = build_charsets(&[fixtures::toy2()]);
        let est = OdysseyShape::of(&refs).estimate(&cs, &SourceSet::new(["A"])).unwrap();
        assert_eq!(est.value, 3.0);
    }
}
