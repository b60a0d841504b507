use daont_core::corpus::{load_fixture, FIXTURES};
use daont_core::query::{brute_force_eval, evaluate};
use daont_core::rules::builtin_rules;
use daont_core::vocab::schema_graph;

#[test]
fn builtin_queries_agree_on_fixtures() {
    for f in &FIXTURES {
        let plain = load_fixture(f.name).unwrap();
        let merged = schema_graph().merge(&plain);
        for g in [&plain, &merged] {
            for rule in builtin_rules() {
                let q = rule.parse().unwrap();
                let fast = evaluate(g, &q).unwrap();
                let slow = brute_force_eval(g, &q).unwrap_or_else(|e| panic!("{} {}: {e}", f.name, rule.id));
                assert_eq!(fast, slow, "{} {}", f.name, rule.id);
            }
        }
    }
}

mod common;

use rand::rngs::StdRng;
use rand::SeedableRng;

#[test]
fn random_graphs_and_queries_agree() {
    let mut rng = StdRng::seed_from_u64(0x0dae);
    let mut nonempty = 0;
    for case in 0..200 {
        let g = common::random_graph(&mut rng, 12);
        let q = common::random_query(&mut rng, &g);
        let fast = evaluate(&g, &q).unwrap();
        let slow = brute_force_eval(&g, &q).unwrap_or_else(|e| panic!("case {case}: {e}"));
        assert_eq!(fast, slow, "case {case}: {q:?}");
        nonempty += usize::from(!fast.is_empty());
    }
    assert!(nonempty > 20, "only {nonempty} cases produced solutions");
}
