//! RDF terms, N-Triples input and per-source triple stores.

mod lexer;
mod ntriples;
mod persist;
mod store;
mod term;

pub(crate) use lexer::{LexError, Scanner};
pub use ntriples::{parse_line, parse_ntriples, ParseError, ParseErrorKind};
pub use persist::{load_store, load_store_dir, save_store, store_path, StoreError, STORE_FORMAT_VERSION};
pub use store::{PredicateCounts, TripleStore};
pub use term::{Literal, Term, Triple};
