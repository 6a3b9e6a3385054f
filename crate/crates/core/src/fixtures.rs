//! Small hand-built datasets and a seeded synthetic federation, used by tests,
//! benchmarks and the `fixtures` CLI command.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rdf::{Term, Triple, TripleStore};

fn x(local: &str) -> Term {
    Term::iri(format!("http://x/{local}"))
}

fn xt(s: &str, p: &str, o: &str) -> Triple {
    Triple::new(x(s), x(p), x(o)).expect("fixture triples are well-formed")
}

/// Source `A`: `(s1,p,o1) (s1,p,o2) (s2,p,o1) (s2,q,o3) (s3,q,o3)`.
pub fn toy1() -> TripleStore {
    TripleStore::new("A", toy1_triples())
}

fn toy1_triples() -> Vec<Triple> {
    vec![
        xt("s1", "p", "o1"),
        xt("s1", "p", "o2"),
        xt("s2", "p", "o1"),
        xt("s2", "q", "o3"),
        xt("s3", "q", "o3"),
    ]
}

/// `toy1` plus `(o3,p,o1)`, which turns `o3` into an entity.
pub fn toy2() -> TripleStore {
    let mut triples = toy1_triples();
    triples.push(xt("o3", "p", "o1"));
    TripleStore::new("A", triples)
}

/// Source `B`: the single triple `(u,q,v)`.
pub fn toy_b() -> TripleStore {
    TripleStore::new("B", vec![xt("u", "q", "v")])
}

/// `toy1` as source `A` next to `toy_b`.
pub fn toy_federation() -> Vec<TripleStore> {
    vec![toy1(), toy_b()]
}

/// Query of the motivating example: a three-pattern subject star.
pub const STAR_QUERY: &str =
    "SELECT * WHERE { ?s <http://x/p1> ?o1 . ?s <http://x/p2> ?o2 . ?s <http://x/p3> ?o3 }";

/// A single source in which the motivating query has pattern cardinalities
/// (100, 200, 300), `|tp1 ⋈ tp2| = 50`, `|tp1 ⋈ tp3| = 100`,
/// `|tp2 ⋈ tp3| = 50` and a final result of 50.
pub fn star_store() -> TripleStore {
    let mut triples = Vec::new();
    let mut add = |s: String, p: &str, o: String| {
        triples.push(Triple::new(x(&s), x(p), x(&o)).expect("well-formed"));
    };
    // 50 subjects carrying all three predicates
    for i in 0..50 {
        add(format!("s{i}"), "p1", format!("a{i}"));
        add(format!("s{i}"), "p2", format!("b{i}"));
        add(format!("s{i}"), "p3", format!("c{i}"));
    }
    // 50 subjects with p1 and p3 only
    for i in 0..50 {
        add(format!("t{i}"), "p1", format!("a{i}"));
        add(format!("t{i}"), "p3", format!("c{i}"));
    }
    // 150 subjects with p2 only
    for i in 0..150 {
        add(format!("u{i}"), "p2", format!("b{i}"));
    }
    // 200 subjects with p3 only
    for i in 0..200 {
        add(format!("v{i}"), "p3", format!("c{i}"));
    }
    TripleStore::new("F", triples)
}

const NS: &str = "http://fed.example/";
const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
const XSD_INT: &str = "http://www.w3.org/2001/XMLSchema#integer";

fn ent(kind: &str, i: usize) -> Term {
    Term::iri(format!("{NS}{kind}/{i}"))
}

fn voc(name: &str) -> Term {
    if name == "type" {
        Term::iri(RDF_TYPE)
    } else {
        Term::iri(format!("{NS}vocab/{name}"))
    }
}

fn voc_iri(name: &str) -> String {
    format!("<{}>", voc(name).as_iri().expect("iri"))
}

/// A generated federation together with its queries.
#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub stores: Vec<TripleStore>,
    /// `(query id, SPARQL text)` pairs.
    pub queries: Vec<(String, String)>,
}

const PEOPLE: usize = 300;
const PAPERS: usize = 400;
const CITIES: usize = 60;
const COUNTRIES: usize = 12;
const VENUES: usize = 25;
const ORGS: usize = 30;

/// Three sources (`people`, `pubs`, `geo`) with cross-source links and about
/// fifty queries of star, path, hybrid and bound-constant shapes. Fully
/// determined by `seed`.
pub fn synthetic_corpus(seed: u64) -> SyntheticCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut people = Vec::new();
    let mut pubs = Vec::new();
    let mut geo = Vec::new();
    let push = |v: &mut Vec<Triple>, s: Term, p: &str, o: Term| {
        v.push(Triple::new(s, voc(p), o).expect("well-formed"));
    };

    for i in 0..PEOPLE {
        let me = ent("person", i);
        push(&mut people, me.clone(), "type", voc("Person"));
        push(&mut people, me.clone(), "name", Term::plain_literal(format!("Person {i}")));
        if rng.gen_bool(0.8) {
            let age = rng.gen_range(18..80);
            push(&mut people, me.clone(), "age", Term::typed_literal(age.to_string(), XSD_INT));
        }
        // skewed city popularity
        let city = (rng.gen_range(0.0f64..1.0).powi(2) * CITIES as f64) as usize;
        push(&mut people, me.clone(), "livesIn", ent("city", city));
        for _ in 0..rng.gen_range(0..4) {
            push(&mut people, me.clone(), "knows", ent("person", rng.gen_range(0..PEOPLE)));
        }
        if rng.gen_bool(0.6) {
            push(&mut people, me.clone(), "worksFor", ent("org", rng.gen_range(0..ORGS)));
        }
    }
    for o in 0..ORGS {
        push(&mut people, ent("org", o), "type", voc("Organisation"));
        push(&mut people, ent("org", o), "name", Term::plain_literal(format!("Org {o}")));
        push(&mut people, ent("org", o), "basedIn", ent("city", rng.gen_range(0..CITIES)));
    }

    for i in 0..PAPERS {
        let me = ent("paper", i);
        push(&mut pubs, me.clone(), "type", voc("Paper"));
        push(&mut pubs, me.clone(), "title", Term::plain_literal(format!("Paper {i}")));
        let year = rng.gen_range(2000..2021);
        push(&mut pubs, me.clone(), "year", Term::typed_literal(year.to_string(), XSD_INT));
        push(&mut pubs, me.clone(), "venue", ent("venue", rng.gen_range(0..VENUES)));
        for _ in 0..rng.gen_range(1..4) {
            push(&mut pubs, me.clone(), "author", ent("person", rng.gen_range(0..PEOPLE)));
        }
        if i > 0 {
            for _ in 0..rng.gen_range(0..3) {
                push(&mut pubs, me.clone(), "cites", ent("paper", rng.gen_range(0..i)));
            }
        }
    }
    for v in 0..VENUES {
        push(&mut pubs, ent("venue", v), "type", voc("Venue"));
        push(&mut pubs, ent("venue", v), "name", Term::plain_literal(format!("Venue {v}")));
        push(&mut pubs, ent("venue", v), "heldIn", ent("city", rng.gen_range(0..CITIES)));
    }

    for c in 0..CITIES {
        let me = ent("city", c);
        push(&mut geo, me.clone(), "type", voc("City"));
        push(&mut geo, me.clone(), "name", Term::plain_literal(format!("City {c}")));
        push(&mut geo, me.clone(), "country", ent("country", c % COUNTRIES));
        let pop = rng.gen_range(10_000..5_000_000);
        push(&mut geo, me.clone(), "population", Term::typed_literal(pop.to_string(), XSD_INT));
    }
    for k in 0..COUNTRIES {
        push(&mut geo, ent("country", k), "type", voc("Country"));
        push(&mut geo, ent("country", k), "name", Term::plain_literal(format!("Country {k}")));
    }

    let stores = vec![
        TripleStore::new("people", people),
        TripleStore::new("pubs", pubs),
        TripleStore::new("geo", geo),
    ];
    let queries = synthetic_queries(&mut rng);
    SyntheticCorpus { stores, queries }
}

type Template = Box<dyn Fn(&mut ChaCha8Rng) -> String>;

fn synthetic_queries(rng: &mut ChaCha8Rng) -> Vec<(String, String)> {
    let v = voc_iri;
    let e = |kind: &str, i: usize| format!("<{NS}{kind}/{i}>");
    let mut templates: Vec<Template> = Vec::new();

    // stars
    templates.push(Box::new(move |_| {
        format!("?p {} {} . ?p {} ?n . ?p {} ?a", v("type"), v("Person"), v("name"), v("age"))
    }));
    templates.push(Box::new(move |_| {
        format!("?p {} ?n . ?p {} ?c . ?p {} ?o", v("name"), v("livesIn"), v("worksFor"))
    }));
    templates.push(Box::new(move |_| {
        format!("?x {} ?t . ?x {} ?y . ?x {} ?v . ?x {} ?a", v("title"), v("year"), v("venue"), v("author"))
    }));
    templates.push(Box::new(move |r| {
        let c = r.gen_range(0..CITIES / 2);
        format!("?p {} {} . ?p {} ?n", v("livesIn"), e("city", c), v("name"))
    }));
    // paths
    templates.push(Box::new(move |_| {
        format!("?x {} ?p . ?p {} ?c . ?c {} ?k", v("author"), v("livesIn"), v("country"))
    }));
    templates.push(Box::new(move |_| {
        format!("?a {} ?b . ?b {} ?v . ?v {} ?n", v("cites"), v("venue"), v("name"))
    }));
    templates.push(Box::new(move |r| {
        let p = r.gen_range(0..PEOPLE);
        format!("{} {} ?f . ?f {} ?n", e("person", p), v("knows"), v("name"))
    }));
    templates.push(Box::new(move |_| {
        format!("?o {} ?c . ?c {} ?n . ?c {} ?k", v("basedIn"), v("name"), v("country"))
    }));
    // hybrid star + path
    templates.push(Box::new(move |r| {
        let y = r.gen_range(2000..2021);
        format!(
            "?x {} \"{y}\"^^<{XSD_INT}> . ?x {} ?p . ?p {} ?n . ?p {} ?c",
            v("year"), v("author"), v("name"), v("livesIn")
        )
    }));
    templates.push(Box::new(move |_| {
        format!("?x {} ?v . ?v {} ?c . ?c {} ?k . ?k {} ?n", v("venue"), v("heldIn"), v("country"), v("name"))
    }));
    // object-object join
    templates.push(Box::new(move |r| {
        let p = r.gen_range(0..PEOPLE);
        format!("{} {} ?c . ?q {} ?c . ?q {} ?n", e("person", p), v("livesIn"), v("livesIn"), v("name"))
    }));
    // unbound predicate
    templates.push(Box::new(move |r| {
        let p = r.gen_range(0..PEOPLE);
        format!("{} ?pred ?o", e("person", p))
    }));
    templates.push(Box::new(move |r| {
        let c = r.gen_range(0..CITIES);
        format!("?s ?pred {} . ?s {} ?n", e("city", c), v("name"))
    }));
    // multi-source predicate
    templates.push(Box::new(move |r| {
        let classes = ["Person", "Paper", "City", "Venue"];
        let class = classes.choose(r).expect("non-empty");
        format!("?s {} {} . ?s {} ?n", v("type"), v(class), v("name"))
    }));

    let mut queries = Vec::new();
    let target = 50;
    for i in 0..target {
        let body = templates[i % templates.len()](rng);
        queries.push((format!("Q{:02}", i + 1), format!("SELECT * WHERE {{ {body} }}")));
    }
    queries
}

/// Writes `<store>.nt` for every store in `dir`.
pub fn write_ntriples(dir: &Path, stores: &[TripleStore]) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    for store in stores {
        let mut text = String::new();
        for t in store.triples() {
            writeln!(text, "{t}").expect("writing to a String cannot fail");
        }
        fs::write(dir.join(format!("{}.nt", store.name())), text)?;
    }
    Ok(())
}

/// Writes `<id>.rq` for every query in `dir`.
pub fn write_queries(dir: &Path, queries: &[(String, String)]) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    for (id, text) in queries {
        fs::write(dir.join(format!("{id}.rq")), format!("{text}\n"))?;
    }
    Ok(())
}

/// Writes all fixtures below `dir`:
/// `toy/{A,B}.nt`, `toy2/A.nt`, `star/F.nt` + `star/queries/star.rq`,
/// `synthetic/data/*.nt` + `synthetic/queries/*.rq`.
pub fn write_all(dir: &Path, seed: u64) -> io::Result<()> {
    write_ntriples(&dir.join("toy"), &toy_federation())?;
    write_ntriples(&dir.join("toy2"), &[toy2()])?;
    write_ntriples(&dir.join("star"), &[star_store()])?;
    write_queries(
        &dir.join("star").join("queries"),
        &[("star".to_string(), STAR_QUERY.to_string())],
    )?;
    let corpus = synthetic_corpus(seed);
    write_ntriples(&dir.join("synthetic").join("data"), &corpus.stores)?;
    write_queries(&dir.join("synthetic").join("queries"), &corpus.queries)?;
    Ok(())
}
