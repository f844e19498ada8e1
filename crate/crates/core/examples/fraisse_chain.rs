//! A finite Fraisse chain over the quarter grid with cap 1 and exponent 2.
//!
//! ```text
//! cargo run --release --example fraisse_chain
//! ```

use valued_groups::fraisse::{
    build_chain, enumerate_catalog, verify_embeddings, verify_ledger, ChainBudget, DEFAULT_SEARCH_BUDGET,
    DEFAULT_TABLE_BUDGET,
};
use valued_groups::suites::fraisse_config;

fn main() -> valued_groups::Result<()> {
    let cfg = fraisse_config();
    let catalog = enumerate_catalog(&cfg.grid()?, cfg.n, cfg.max_order, DEFAULT_TABLE_BUDGET)?;
    println!("catalog: {} groups of order <= {}", catalog.len(), cfg.max_order);

    let chain = build_chain(&catalog, cfg.rounds, &ChainBudget::default())?;
    for (i, s) in chain.stages.iter().enumerate() {
        println!("G{i}: order {:>5}, rank {}", s.order(), s.group().rank());
    }
    verify_ledger(&chain, &catalog)?;
    let emb = verify_embeddings(chain.last(), &catalog, DEFAULT_SEARCH_BUDGET);
    println!("ledger {} tasks, embeddings {}/{}", chain.ledger.len(), emb.satisfied, emb.tasks);
    Ok(())
}
