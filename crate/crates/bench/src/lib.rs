//! Seeded synthetic inputs shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use triplescore::kg::vocab::{RDFS_LABEL, RDFS_SUBCLASS_OF, RDF_TYPE};
use triplescore::{Iri, Literal, Triple};

const WORDS: [&str; 12] = [
    "austria",
    "austrian",
    "germany",
    "german",
    "berlin",
    "united",
    "states",
    "america",
    "physicist",
    "composer",
    "birth",
    "place",
];

fn iri(s: &str) -> Iri {
    Iri::new(s).expect("generated IRIs are valid")
}

fn phrase(rng: &mut ChaCha8Rng) -> String {
    let n = rng.random_range(1..=3);
    (0..n)
        .map(|_| WORDS[rng.random_range(0..WORDS.len())])
        .collect::<Vec<_>>()
        .join(" ")
}

/// `n` triples over a class hierarchy of `classes` nodes with typed instances.
pub fn class_graph(n: usize, classes: usize, seed: u64) -> Vec<Triple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let class = |i: usize| iri(&format!("e:C{i}"));
    let mut out = Vec::with_capacity(n);
    for i in 1..classes.min(n + 1) {
        out.push(Triple::new(
            class(i),
            iri(RDFS_SUBCLASS_OF),
            class(rng.random_range(0..i)),
        ));
    }
    while out.len() < n {
        let x = iri(&format!("e:x{}", rng.random_range(0..n)));
        out.push(Triple::new(x, iri(RDF_TYPE), class(rng.random_range(0..classes))));
    }
    out
}

/// Statements about `e:s` with labelled objects, for path matching.
pub fn subject_graph(statements: usize, seed: u64) -> Vec<Triple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(statements * 2);
    for i in 0..statements {
        let object = iri(&format!("e:o{i}"));
        out.push(Triple::new(iri("e:s"), iri("e:birthPlace"), object.clone()));
        out.push(Triple::new(object, iri(RDFS_LABEL), Literal::plain(phrase(&mut rng))));
    }
    out
}

/// Feature rows with a noiseless linear target.
pub fn regression(n: usize, seed: u64) -> (Vec<[f64; 5]>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x: Vec<[f64; 5]> = (0..n)
        .map(|_| std::array::from_fn(|_| rng.random_range(0.0..7.0)))
        .collect();
    let y = x
        .iter()
        .map(|r| 0.5 * r[0] + 0.4 * r[1] + 0.3 * r[2] + 0.2 * r[3] + 0.1 * r[4] - 0.5)
        .collect();
    (x, y)
}

/// Integer score pairs in `0..=7`, with many ties.
pub fn score_pairs(n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || (0..n).map(|_| f64::from(rng.random_range(0..=7u8))).collect::<Vec<_>>();
    (draw(), draw())
}
