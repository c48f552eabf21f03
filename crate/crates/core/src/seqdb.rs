//! Quantitative sequence databases: data model, SPMF and utility-table I/O,
//! synthetic generation and threshold resolution.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rust_decimal::Decimal;

use crate::error::{Error, Result};
use crate::utility::{Threshold, Utility};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemId(pub u32);

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An item with its internal utility (purchase quantity).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QItem {
    pub item: ItemId,
    pub quantity: u32,
}

impl QItem {
    pub fn new(item: u32, quantity: u32) -> QItem {
        QItem {
            item: ItemId(item),
            quantity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QSequence {
    pub sid: u32,
    pub elements: Vec<QItem>,
}

impl QSequence {
    pub fn new(sid: u32, elements: Vec<QItem>) -> QSequence {
        QSequence { sid, elements }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// The item sequence with quantities dropped.
    pub fn pattern(&self) -> Pattern {
        Pattern(self.elements.iter().map(|e| e.item).collect())
    }
}

/// An ordered list of items. Ordering is lexicographic on item ids, which is
/// the order results are written in.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern(pub Vec<ItemId>);

impl Pattern {
    pub fn from_ids(ids: &[u32]) -> Pattern {
        Pattern(ids.iter().copied().map(ItemId).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn items(&self) -> &[ItemId] {
        &self.0
    }

    /// Copy of this pattern without position `idx`.
    pub fn without(&self, idx: usize) -> Pattern {
        let mut items = Vec::with_capacity(self.0.len().saturating_sub(1));
        items.extend_from_slice(&self.0[..idx]);
        items.extend_from_slice(&self.0[idx + 1..]);
        Pattern(items)
    }

    /// Copy of this pattern restricted to the given (ascending) positions.
    pub fn select(&self, positions: &[usize]) -> Pattern {
        Pattern(positions.iter().map(|&p| self.0[p]).collect())
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, item) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{item}")?;
        }
        Ok(())
    }
}

/// Per-item external utilities, held both as exact decimals and as integers
/// scaled by `10^decimals`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExternalUtilityTable {
    values: BTreeMap<ItemId, Decimal>,
    scaled: HashMap<ItemId, u64>,
    decimals: u32,
}

impl ExternalUtilityTable {
    pub fn from_values<I>(values: I) -> Result<ExternalUtilityTable>
    where
        I: IntoIterator<Item = (ItemId, Decimal)>,
    {
        let mut map = BTreeMap::new();
        for (item, value) in values {
            if value <= Decimal::ZERO {
                return Err(Error::InvalidParameter(format!(
                    "external utility of item {item} must be positive, got {value}"
                )));
            }
            if map.insert(item, value.normalize()).is_some() {
                return Err(Error::InvalidParameter(format!(
                    "duplicate external utility for item {item}"
                )));
            }
        }
        let decimals = map.values().map(|v| v.scale()).max().unwrap_or(0);
        let mut scaled = HashMap::with_capacity(map.len());
        for (&item, value) in &map {
            let factor = 10u128.pow(decimals - value.scale());
            let raw = u128::try_from(value.mantissa())
                .ok()
                .and_then(|m| m.checked_mul(factor))
                .and_then(|m| u64::try_from(m).ok())
                .ok_or_else(|| {
                    Error::InvalidParameter(format!("external utility of item {item} too large"))
                })?;
            scaled.insert(item, raw);
        }
        Ok(ExternalUtilityTable {
            values: map,
            scaled,
            decimals,
        })
    }

    /// Integer utilities, e.g. `[(1, 1), (2, 3)]`.
    pub fn from_integers(values: &[(u32, u64)]) -> Result<ExternalUtilityTable> {
        Self::from_values(
            values
                .iter()
                .map(|&(item, v)| (ItemId(item), Decimal::from(v))),
        )
    }

    /// Every listed item gets external utility 1.
    pub fn ones<I: IntoIterator<Item = ItemId>>(items: I) -> ExternalUtilityTable {
        let unique: HashSet<ItemId> = items.into_iter().collect();
        Self::from_values(unique.into_iter().map(|i| (i, Decimal::ONE)))
            .expect("unit utilities are valid")
    }

    pub fn get(&self, item: ItemId) -> Option<Decimal> {
        self.values.get(&item).copied()
    }

    pub fn scaled(&self, item: ItemId) -> Option<u64> {
        self.scaled.get(&item).copied()
    }

    /// Number of decimal places of the integer scale.
    pub fn decimals(&self) -> u32 {
        self.decimals
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ItemId, Decimal)> + '_ {
        self.values.iter().map(|(&k, &v)| (k, v))
    }

    /// `<item> <value>` per line, ascending item order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (item, value) in &self.values {
            out.push_str(&format!("{item} {value}\n"));
        }
        out
    }
}

/// A database of q-sequences plus its external utility table. Immutable once
/// built; every item is guaranteed to have an external utility.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSequenceDatabase {
    sequences: Vec<QSequence>,
    utilities: ExternalUtilityTable,
    // q-item utilities (quantity * scaled external) per sequence position
    item_utils: Vec<Vec<u64>>,
}

impl QSequenceDatabase {
    pub fn new(sequences: Vec<QSequence>, utilities: ExternalUtilityTable) -> Result<Self> {
        let mut sids = HashSet::with_capacity(sequences.len());
        let mut item_utils = Vec::with_capacity(sequences.len());
        for seq in &sequences {
            if !sids.insert(seq.sid) {
                return Err(Error::DuplicateSid(seq.sid));
            }
            if seq.is_empty() {
                return Err(Error::InvalidParameter(format!(
                    "sequence {} is empty",
                    seq.sid
                )));
            }
            let mut row = Vec::with_capacity(seq.len());
            for e in &seq.elements {
                if e.quantity == 0 {
                    return Err(Error::InvalidParameter(format!(
                        "sequence {}: item {} has quantity 0",
                        seq.sid, e.item
                    )));
                }
                let ex = utilities
                    .scaled(e.item)
                    .ok_or(Error::MissingUtility(e.item))?;
                row.push(ex.checked_mul(u64::from(e.quantity)).ok_or_else(|| {
                    Error::InvalidParameter(format!("utility overflow in sequence {}", seq.sid))
                })?);
            }
            item_utils.push(row);
        }
        Ok(QSequenceDatabase {
            sequences,
            utilities,
            item_utils,
        })
    }

    /// Builds a database whose external utilities are all 1.
    pub fn with_unit_utilities(sequences: Vec<QSequence>) -> Result<Self> {
        let table = ExternalUtilityTable::ones(
            sequences
                .iter()
                .flat_map(|s| s.elements.iter().map(|e| e.item)),
        );
        Self::new(sequences, table)
    }

    pub fn sequences(&self) -> &[QSequence] {
        &self.sequences
    }

    pub fn utilities(&self) -> &ExternalUtilityTable {
        &self.utilities
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }

    pub fn decimals(&self) -> u32 {
        self.utilities.decimals()
    }

    /// q-item utility at `pos` of the `idx`-th sequence, in scaled units.
    #[inline]
    pub fn item_utility(&self, idx: usize, pos: usize) -> u64 {
        self.item_utils[idx][pos]
    }

    pub fn item_utilities(&self, idx: usize) -> &[u64] {
        &self.item_utils[idx]
    }

    /// Sum of all q-item utilities, in scaled units.
    pub fn total_utility(&self) -> Utility {
        self.item_utils
            .iter()
            .flatten()
            .map(|&u| Utility(u128::from(u)))
            .sum()
    }

    pub fn to_spmf(&self) -> String {
        to_spmf(&self.sequences)
    }

    /// Same sequences, different table.
    pub fn with_utilities(&self, utilities: ExternalUtilityTable) -> Result<Self> {
        Self::new(self.sequences.clone(), utilities)
    }

    /// Keeps the sequences at the given indices (in the given order).
    pub fn subset(&self, indices: &[usize]) -> QSequenceDatabase {
        // the whole table is kept so a sample shares the parent's scale
        QSequenceDatabase {
            sequences: indices.iter().map(|&i| self.sequences[i].clone()).collect(),
            utilities: self.utilities.clone(),
            item_utils: indices
                .iter()
                .map(|&i| self.item_utils[i].clone())
                .collect(),
        }
    }
}

/// Parses an SPMF sequence file. Itemset separators (`-1`) are flattened,
/// `-2` ends a sequence, and `item[q]` sets an explicit quantity (default 1).
/// Blank lines and lines starting with `#`, `%` or `@` are skipped. Sequence
/// ids are assigned 1, 2, ... in file order.
pub fn parse_spmf(text: &str) -> Result<Vec<QSequence>> {
    let mut sequences = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with(['#', '%', '@']) {
            continue;
        }
        let err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let mut elements = Vec::new();
        let mut terminated = false;
        for token in trimmed.split_whitespace() {
            if terminated {
                return Err(err(format!("unexpected token '{token}' after -2")));
            }
            match token {
                "-1" => {}
                "-2" => terminated = true,
                _ => elements.push(parse_qitem(token).map_err(err)?),
            }
        }
        if !terminated {
            return Err(err("missing -2 terminator".into()));
        }
        if elements.is_empty() {
            return Err(err("empty sequence".into()));
        }
        let sid =
            u32::try_from(sequences.len() + 1).map_err(|_| err("too many sequences".into()))?;
        sequences.push(QSequence::new(sid, elements));
    }
    Ok(sequences)
}

fn parse_qitem(token: &str) -> std::result::Result<QItem, String> {
    let (item_str, quantity) = match token.strip_suffix(']') {
        Some(body) => {
            let (item, q) = body
                .split_once('[')
                .ok_or_else(|| format!("malformed token '{token}'"))?;
            let q: u32 = q
                .parse()
                .map_err(|_| format!("malformed quantity in '{token}'"))?;
            if q < 1 {
                return Err(format!("quantity must be at least 1 in '{token}'"));
            }
            (item, q)
        }
        None => (token, 1),
    };
    let item: u32 = item_str
        .parse()
        .map_err(|_| format!("malformed token '{token}'"))?;
    Ok(QItem::new(item, quantity))
}

/// Writes sequences in SPMF form, one item per itemset; quantities other
/// than 1 use the `item[q]` suffix.
pub fn to_spmf(sequences: &[QSequence]) -> String {
    let mut out = String::new();
    for seq in sequences {
        for e in &seq.elements {
            if e.quantity == 1 {
                out.push_str(&format!("{} -1 ", e.item));
            } else {
                out.push_str(&format!("{}[{}] -1 ", e.item, e.quantity));
            }
        }
        out.push_str("-2\n");
    }
    out
}

/// Parses `<item> <value>` lines; blank and `#` lines are skipped.
pub fn parse_utility_table(text: &str) -> Result<ExternalUtilityTable> {
    let mut values = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let err = |message: String| Error::UtilityTable {
            line: lineno + 1,
            message,
        };
        let mut parts = trimmed.split_whitespace();
        let (Some(item), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(err(format!("expected '<item> <value>', got '{trimmed}'")));
        };
        let item: u32 = item
            .parse()
            .map_err(|_| err(format!("bad item id '{item}'")))?;
        let value =
            Decimal::from_str(value).map_err(|_| err(format!("bad utility value '{value}'")))?;
        if value <= Decimal::ZERO {
            return Err(err(format!("utility of item {item} must be positive")));
        }
        if values.insert(ItemId(item), value).is_some() {
            return Err(err(format!("duplicate entry for item {item}")));
        }
    }
    ExternalUtilityTable::from_values(values)
}

/// Parameters of the synthetic generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyntheticSpec {
    pub num_seqs: usize,
    pub alphabet_size: u32,
    pub min_len: usize,
    pub max_len: usize,
    pub max_quantity: u32,
    pub max_external: u32,
    pub seed: u64,
}

/// Generates a random database. Items are drawn uniformly from
/// `1..=alphabet_size`, lengths from `[min_len, max_len]`, quantities from
/// `[1, max_quantity]` and integer external utilities from `[1, max_external]`.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<QSequenceDatabase> {
    let SyntheticSpec {
        num_seqs,
        alphabet_size,
        min_len,
        max_len,
        max_quantity,
        max_external,
        seed,
    } = *spec;
    if num_seqs == 0 || alphabet_size == 0 || min_len == 0 || max_quantity == 0 || max_external == 0
    {
        return Err(Error::InvalidParameter(
            "generator parameters must be positive".into(),
        ));
    }
    if min_len > max_len {
        return Err(Error::InvalidParameter(format!(
            "min_len {min_len} exceeds max_len {max_len}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let externals: Vec<(u32, u64)> = (1..=alphabet_size)
        .map(|item| (item, u64::from(rng.gen_range(1..=max_external))))
        .collect();
    let mut sequences = Vec::with_capacity(num_seqs);
    for sid in 1..=num_seqs {
        let len = rng.gen_range(min_len..=max_len);
        let elements = (0..len)
            .map(|_| {
                QItem::new(
                    rng.gen_range(1..=alphabet_size),
                    rng.gen_range(1..=max_quantity),
                )
            })
            .collect();
        sequences.push(QSequence::new(sid as u32, elements));
    }
    QSequenceDatabase::new(sequences, ExternalUtilityTable::from_integers(&externals)?)
}

/// `u(D)`: the sum of `quantity * ex(item)` over every position of every sequence.
pub fn database_utility(db: &QSequenceDatabase) -> Decimal {
    db.total_utility()
        .to_decimal(db.decimals())
        .expect("database utility fits a decimal")
}

/// Threshold given either absolutely or as a fraction of `u(D)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinUtilSpec {
    Absolute(Decimal),
    Fraction(Decimal),
}

impl fmt::Display for MinUtilSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MinUtilSpec::Absolute(v) => write!(f, "{v}"),
            MinUtilSpec::Fraction(s) => write!(f, "sigma={s}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MiningConfig {
    pub min_util: MinUtilSpec,
    /// `None` means unlimited.
    pub max_len: Option<usize>,
}

impl MiningConfig {
    pub fn absolute(min_util: impl Into<Decimal>, max_len: Option<usize>) -> MiningConfig {
        MiningConfig {
            min_util: MinUtilSpec::Absolute(min_util.into()),
            max_len,
        }
    }

    pub fn fraction(sigma: Decimal, max_len: Option<usize>) -> MiningConfig {
        MiningConfig {
            min_util: MinUtilSpec::Fraction(sigma),
            max_len,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.min_util {
            MinUtilSpec::Absolute(v) if v < Decimal::ZERO => {
                return Err(Error::InvalidConfig(format!("minUtil {v} is negative")))
            }
            MinUtilSpec::Fraction(s) if s <= Decimal::ZERO || s >= Decimal::ONE => {
                return Err(Error::InvalidConfig(format!(
                    "sigma {s} must lie strictly between 0 and 1"
                )))
            }
            _ => {}
        }
        if self.max_len == Some(0) {
            return Err(Error::InvalidConfig("maxLen must be at least 1".into()));
        }
        Ok(())
    }

    pub fn length_ok(&self, len: usize) -> bool {
        self.max_len.is_none_or(|m| len <= m)
    }
}

/// Resolves the threshold: absolute values pass through; fractions become
/// `sigma * u(D)` with no rounding.
pub fn resolve_min_util(cfg: &MiningConfig, db: &QSequenceDatabase) -> Result<Threshold> {
    cfg.validate()?;
    let value = match cfg.min_util {
        MinUtilSpec::Absolute(v) => v,
        MinUtilSpec::Fraction(sigma) => sigma
            .checked_mul(database_utility(db))
            .ok_or_else(|| Error::InvalidConfig("sigma * u(D) overflows".into()))?
            .normalize(),
    };
    Ok(Threshold::new(value, db.decimals()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn parse_flattens_itemsets() {
        let seqs = parse_spmf("1 -1 2 3 -1 -2").unwrap();
        assert_eq!(seqs.len(), 1);
        assert_eq!(
            seqs[0].elements,
            vec![QItem::new(1, 1), QItem::new(2, 1), QItem::new(3, 1)]
        );
    }

    #[test]
    fn parse_explicit_quantities() {
        let seqs = parse_spmf("5[2] -1 5[3] -2").unwrap();
        assert_eq!(seqs[0].elements, vec![QItem::new(5, 2), QItem::new(5, 3)]);
    }

    #[test]
    fn parse_two_lines_round_trips() {
        let text = "1 -1 2 -2\n2 -1 1 -2";
        let seqs = parse_spmf(text).unwrap();
        assert_eq!(seqs.len(), 2);
        assert!(seqs.iter().all(|s| s.len() == 2));
        assert_eq!(parse_spmf(&to_spmf(&seqs)).unwrap(), seqs);
    }

    #[test]
    fn parse_errors_name_the_line() {
        for (text, line) in [
            ("1 -1 -2\n1 x -2", 2),
            ("1 -1 2", 1),
            ("1 -2\n\n3[0] -2", 3),
            ("1 -2 4", 1),
            ("1 -1 -5 -2", 1),
            ("-1 -2", 1),
        ] {
            match parse_spmf(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: expected parse error, got {other:?}"),
            }
        }
    }

    #[test]
    fn utility_table_examples() {
        let t = parse_utility_table("1 1\n2 3\n3 1").unwrap();
        assert_eq!(t.get(ItemId(1)), Some(Decimal::from(1)));
        assert_eq!(t.get(ItemId(2)), Some(Decimal::from(3)));
        assert_eq!(t.get(ItemId(3)), Some(Decimal::from(1)));
        assert!(parse_utility_table("").unwrap().is_empty());
        assert!(matches!(
            parse_utility_table("4 0"),
            Err(Error::UtilityTable { line: 1, .. })
        ));
        assert!(parse_utility_table("1 2\n1 3").is_err());
        assert!(parse_utility_table("1").is_err());
        assert!(parse_utility_table("1 -2").is_err());
    }

    #[test]
    fn decimal_table_scales() {
        let t = parse_utility_table("1 0.5\n2 1.25\n3 2").unwrap();
        assert_eq!(t.decimals(), 2);
        assert_eq!(t.scaled(ItemId(1)), Some(50));
        assert_eq!(t.scaled(ItemId(2)), Some(125));
        assert_eq!(t.scaled(ItemId(3)), Some(200));
        assert_eq!(parse_utility_table(&t.to_text()).unwrap(), t);
    }

    #[test]
    fn missing_utility_is_rejected() {
        let seqs = parse_spmf("1 -1 9 -2").unwrap();
        let table = ExternalUtilityTable::from_integers(&[(1, 1)]).unwrap();
        assert!(matches!(
            QSequenceDatabase::new(seqs, table),
            Err(Error::MissingUtility(ItemId(9)))
        ));
    }

    #[test]
    fn table2_database_utility() {
        let db = fixtures::table2();
        assert_eq!(database_utility(&db), Decimal::from(104));
        let per_seq: Vec<u128> = (0..db.len())
            .map(|i| db.item_utilities(i).iter().map(|&u| u128::from(u)).sum())
            .collect();
        assert_eq!(per_seq, vec![28, 14, 17, 21, 12, 12]);
    }

    #[test]
    fn unit_database_utility_is_quantity_sum() {
        let db = fixtures::table2_unit();
        let quantities: u32 = db
            .sequences()
            .iter()
            .flat_map(|s| s.elements.iter().map(|e| e.quantity))
            .sum();
        assert_eq!(database_utility(&db), Decimal::from(quantities));
    }

    #[test]
    fn single_item_database_utility() {
        let db =
            QSequenceDatabase::with_unit_utilities(vec![QSequence::new(1, vec![QItem::new(1, 1)])])
                .unwrap();
        assert_eq!(database_utility(&db), Decimal::ONE);
    }

    #[test]
    fn resolve_thresholds() {
        let db = fixtures::table2();
        let t = resolve_min_util(&MiningConfig::absolute(14, None), &db).unwrap();
        assert_eq!(t.value(), Decimal::from(14));
        let t = resolve_min_util(
            &MiningConfig::fraction(Decimal::from_str("0.05").unwrap(), None),
            &db,
        )
        .unwrap();
        assert_eq!(t.value(), Decimal::from_str("5.2").unwrap());

        let empty = QSequenceDatabase::new(vec![], ExternalUtilityTable::default()).unwrap();
        let t = resolve_min_util(
            &MiningConfig::fraction(Decimal::from_str("0.3").unwrap(), None),
            &empty,
        )
        .unwrap();
        assert_eq!(t.value(), Decimal::ZERO);
    }

    #[test]
    fn invalid_configs() {
        assert!(MiningConfig::absolute(-1, None).validate().is_err());
        assert!(MiningConfig::fraction(Decimal::ONE, None)
            .validate()
            .is_err());
        assert!(MiningConfig::fraction(Decimal::ZERO, None)
            .validate()
            .is_err());
        assert!(MiningConfig::absolute(1, Some(0)).validate().is_err());
    }

    #[test]
    fn generator_is_deterministic() {
        let spec = SyntheticSpec {
            num_seqs: 2,
            alphabet_size: 3,
            min_len: 2,
            max_len: 2,
            max_quantity: 1,
            max_external: 1,
            seed: 7,
        };
        let a = generate_synthetic(&spec).unwrap();
        let b = generate_synthetic(&spec).unwrap();
        assert_eq!(a.to_spmf(), b.to_spmf());
        assert_eq!(a.utilities().to_text(), b.utilities().to_text());
    }

    #[test]
    fn generator_respects_bounds() {
        let db = generate_synthetic(&SyntheticSpec {
            num_seqs: 100,
            alphabet_size: 10,
            min_len: 5,
            max_len: 15,
            max_quantity: 5,
            max_external: 5,
            seed: 1,
        })
        .unwrap();
        assert_eq!(db.len(), 100);
        for s in db.sequences() {
            assert!((5..=15).contains(&s.len()));
            for e in &s.elements {
                assert!((1..=10).contains(&e.item.0));
                assert!((1..=5).contains(&e.quantity));
            }
        }
        for (_, v) in db.utilities().iter() {
            assert!(v >= Decimal::ONE && v <= Decimal::from(5));
        }
    }

    #[test]
    fn generator_single_item_alphabet() {
        let db = generate_synthetic(&SyntheticSpec {
            num_seqs: 1,
            alphabet_size: 1,
            min_len: 3,
            max_len: 3,
            max_quantity: 2,
            max_external: 2,
            seed: 0,
        })
        .unwrap();
        assert_eq!(db.len(), 1);
        let seq = &db.sequences()[0];
        assert_eq!(seq.len(), 3);
        assert!(seq.elements.iter().all(|e| e.item == ItemId(1)));
        assert!(seq.elements.iter().all(|e| (1..=2).contains(&e.quantity)));
    }

    #[test]
    fn generator_rejects_bad_parameters() {
        let mut spec = SyntheticSpec {
            num_seqs: 1,
            alphabet_size: 1,
            min_len: 4,
            max_len: 3,
            max_quantity: 1,
            max_external: 1,
            seed: 0,
        };
        assert!(generate_synthetic(&spec).is_err());
        spec.max_len = 5;
        spec.alphabet_size = 0;
        assert!(generate_synthetic(&spec).is_err());
    }
}
