//! Low-utility sequential pattern mining over quantitative sequence
//! databases.
//!
//! A pattern's utility is the sum of `quantity * external utility` over every
//! embedding of the pattern in every sequence. Given a threshold `minUtil`
//! and an optional length bound, the miners return every pattern that occurs
//! in the database with `0 < u(P) <= minUtil`.
//!
//! Three miners share one result type:
//! - [`mine_baseline`] enumerates all distinct subsequences;
//! - [`mine_shrink`] searches downward from maximal pruned sequences;
//! - [`mine_extend`] grows patterns position by position inside each root.
//!
//! ```
//! use luspm::{fixtures, mine_shrink, MiningConfig};
//!
//! let db = fixtures::table2();
//! let result = mine_shrink(&db, &MiningConfig::absolute(7, Some(2))).unwrap();
//! assert!(result.contains(&fixtures::pat("c")));
//! ```

pub mod error;
pub mod fixtures;
pub mod harness;
pub mod miner_base;
pub mod miner_extend;
pub mod miner_shrink;
pub mod occurrence;
pub mod preprocess;
pub mod seqdb;
pub mod session;
pub mod utility;

pub use error::{Error, Result};
pub use harness::{run_once, run_sweep, sample_database, Algorithm, MetricsReport, RunStatus};
pub use miner_base::{mine_baseline, mine_baseline_with, LuspRecord, LuspResult};
pub use miner_extend::{mine_extend, mine_extend_with};
pub use miner_shrink::{mine_shrink, mine_shrink_with};
pub use occurrence::{SuChain, UtilityCounter};
pub use seqdb::{
    generate_synthetic, parse_spmf, parse_utility_table, ExternalUtilityTable, ItemId, MinUtilSpec,
    MiningConfig, Pattern, QItem, QSequence, QSequenceDatabase, SyntheticSpec,
};
pub use session::{MineOptions, NoopObserver, SearchObserver};
pub use utility::{Threshold, Utility};

/// Runs the named algorithm with default options.
pub fn mine(
    db: &QSequenceDatabase,
    cfg: &MiningConfig,
    algorithm: Algorithm,
) -> Result<LuspResult> {
    match algorithm {
        Algorithm::Base => mine_baseline(db, cfg),
        Algorithm::Shrink => mine_shrink(db, cfg),
        Algorithm::Extend => mine_extend(db, cfg),
    }
}
