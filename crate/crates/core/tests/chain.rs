use valued_groups::fraisse::{
    build_chain, chain_json, enumerate_catalog, verify_ledger, verify_tasks, ChainBudget, ChainConfig, ChainExport,
    DEFAULT_SEARCH_BUDGET, DEFAULT_TABLE_BUDGET,
};
use valued_groups::json;
use valued_groups::values::validate_value;
use valued_groups::Cap;

fn small() -> ChainConfig {
    ChainConfig { grid_denominator_log2: 1, cap: Cap::One, n: 2, max_order: 4, rounds: 2, max_value: None }
}

#[test]
fn chain_invariants() {
    let cfg = small();
    let catalog = enumerate_catalog(&cfg.grid().unwrap(), cfg.n, cfg.max_order, DEFAULT_TABLE_BUDGET).unwrap();
    let chain = build_chain(&catalog, cfg.rounds, &ChainBudget::default()).unwrap();
    let last = chain.stages.len() - 1;

    for (i, s) in chain.stages.iter().enumerate() {
        assert!(validate_value(s.group(), s.values().to_vec(), Cap::One, 2).is_ok(), "stage {i}");
        assert!(s.is_grid_valued(2), "stage {i} off the grid");
    }
    for from in 0..=last {
        let e = chain.embedding(from, last);
        let s = &chain.stages[from];
        for x in s.group().elements() {
            for y in s.group().elements() {
                assert_eq!(chain.last().dist(e[x], e[y]), s.dist(x, y));
            }
        }
    }
    verify_ledger(&chain, &catalog).unwrap();

    let early: Vec<_> = chain.ledger.iter().filter(|l| l.task.stage <= 1).map(|l| l.task.clone()).collect();
    assert!(!early.is_empty());
    let counts: Vec<usize> =
        (1..=last).map(|to| verify_tasks(&chain, &catalog, &early, to, DEFAULT_SEARCH_BUDGET).satisfied).collect();
    assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{counts:?}");
    assert_eq!(*counts.last().unwrap(), early.len());

    let again = build_chain(&catalog, cfg.rounds, &ChainBudget::default()).unwrap();
    let text = json::to_pretty(&chain_json(&chain));
    assert_eq!(text, json::to_pretty(&chain_json(&again)));
    let back = json::parse::<ChainExport>(&text).unwrap().build(&catalog).unwrap();
    assert_eq!(json::to_pretty(&chain_json(&back)), text);
}
