//! The six-sequence running example database, with items `a..g` mapped to
//! ids `1..7`. Used by tests, the acceptance suite and the CLI docs.

use crate::seqdb::{ExternalUtilityTable, ItemId, Pattern, QItem, QSequence, QSequenceDatabase};

pub const A: u32 = 1;
pub const B: u32 = 2;
pub const C: u32 = 3;
pub const D: u32 = 4;
pub const E: u32 = 5;
pub const F: u32 = 6;
pub const G: u32 = 7;

pub const TABLE2_SPMF: &str = "\
1[1] -1 2[2] -1 3[1] -1 1[2] -1 2[3] -1 4[3] -1 1[3] -1 -2
7[1] -1 1[1] -1 2[2] -1 3[2] -1 4[1] -1 -2
5[2] -1 6[2] -1 1[1] -1 2[2] -1 5[2] -1 -2
6[1] -1 5[2] -1 1[2] -1 2[2] -1 1[2] -1 2[2] -1 -2
4[2] -1 1[1] -1 3[3] -1 4[2] -1 -2
3[1] -1 1[2] -1 4[3] -1 1[3] -1 -2
";

pub const TABLE3_UTILS: &str = "1 1\n2 3\n3 1\n4 2\n5 1\n6 3\n7 3\n";

fn q(item: u32, quantity: u32) -> QItem {
    QItem::new(item, quantity)
}

pub fn table2_sequences() -> Vec<QSequence> {
    vec![
        QSequence::new(
            1,
            vec![
                q(A, 1),
                q(B, 2),
                q(C, 1),
                q(A, 2),
                q(B, 3),
                q(D, 3),
                q(A, 3),
            ],
        ),
        QSequence::new(2, vec![q(G, 1), q(A, 1), q(B, 2), q(C, 2), q(D, 1)]),
        QSequence::new(3, vec![q(E, 2), q(F, 2), q(A, 1), q(B, 2), q(E, 2)]),
        QSequence::new(
            4,
            vec![q(F, 1), q(E, 2), q(A, 2), q(B, 2), q(A, 2), q(B, 2)],
        ),
        QSequence::new(5, vec![q(D, 2), q(A, 1), q(C, 3), q(D, 2)]),
        QSequence::new(6, vec![q(C, 1), q(A, 2), q(D, 3), q(A, 3)]),
    ]
}

pub fn table3() -> ExternalUtilityTable {
    ExternalUtilityTable::from_integers(&[(A, 1), (B, 3), (C, 1), (D, 2), (E, 1), (F, 3), (G, 3)])
        .expect("valid table")
}

/// Sequences with their listed external utilities.
pub fn table2() -> QSequenceDatabase {
    QSequenceDatabase::new(table2_sequences(), table3()).expect("valid database")
}

/// Same sequences with every external utility set to 1.
pub fn table2_unit() -> QSequenceDatabase {
    QSequenceDatabase::with_unit_utilities(table2_sequences()).expect("valid database")
}

/// Pattern from letters, e.g. `pat("abc")`.
pub fn pat(letters: &str) -> Pattern {
    Pattern(
        letters
            .bytes()
            .map(|b| ItemId(u32::from(b - b'a') + 1))
            .collect(),
    )
}
