pub mod bench;
pub mod conformance;
pub mod datagen;
pub mod engine;
pub mod fixtures;
pub mod ntriples;
pub mod ontology;
pub mod rdf;
pub mod query;
pub mod sqr;
pub mod storage;
