//! In-memory relational algebra with set semantics: projections, natural
//! joins, semijoins, degree statistics, and the degree-based partitioning
//! primitive the evaluation engine is built on.
//!
//! Values are interned integers; tuples are stored row-oriented in a sorted
//! set so that all operations are deterministic. Schemas are kept in
//! ascending variable order throughout.

use crate::attrset::AttrSet;
use crate::error::Error;
use crate::rule::RelId;
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// Interned value.
pub type Value = u32;

/// An in-memory relation: a schema of variable indices (ascending) and a
/// set of tuples.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Relation {
    schema: Vec<usize>,
    tuples: BTreeSet<Vec<Value>>,
}

impl Relation {
    /// Builds a relation, normalizing the schema to ascending variable order
    /// (permuting tuple columns accordingly) and dropping duplicates.
    pub fn new(schema: Vec<usize>, rows: impl IntoIterator<Item = Vec<Value>>) -> Result<Relation, Error> {
        let mut seen = BTreeSet::new();
        for &v in &schema {
            if !seen.insert(v) {
                return Err(Error::Domain(format!("schema repeats variable {v}")));
            }
        }
        let mut order: Vec<usize> = (0..schema.len()).collect();
        order.sort_by_key(|&i| schema[i]);
        let sorted_schema: Vec<usize> = order.iter().map(|&i| schema[i]).collect();
        let mut tuples = BTreeSet::new();
        for row in rows {
            if row.len() != schema.len() {
                return Err(Error::Domain(format!(
                    "tuple arity {} does not match schema arity {}",
                    row.len(),
                    schema.len()
                )));
            }
            tuples.insert(order.iter().map(|&i| row[i]).collect());
        }
        Ok(Relation {
            schema: sorted_schema,
            tuples,
        })
    }

    pub fn empty(schema: Vec<usize>) -> Relation {
        Relation::new(schema, std::iter::empty()).expect("valid schema")
    }

    /// The nullary relation containing the empty tuple.
    pub fn unit() -> Relation {
        Relation::new(vec![], [vec![]]).expect("unit")
    }

    pub fn schema(&self) -> &[usize] {
        &self.schema
    }

    pub fn attrs(&self) -> AttrSet {
        AttrSet::from_iter(self.schema.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuples(&self) -> impl Iterator<Item = &Vec<Value>> {
        self.tuples.iter()
    }

    pub fn contains(&self, row: &[Value]) -> bool {
        self.tuples.contains(row)
    }

    fn positions_of(&self, x: AttrSet) -> Result<Vec<usize>, Error> {
        if !x.is_subset(self.attrs()) {
            return Err(Error::Domain(format!(
                "attributes {x} not covered by schema {:?}",
                self.schema
            )));
        }
        Ok(self
            .schema
            .iter()
            .enumerate()
            .filter(|(_, v)| x.contains(**v))
            .map(|(i, _)| i)
            .collect())
    }

    fn key_at(row: &[Value], positions: &[usize]) -> Vec<Value> {
        positions.iter().map(|&i| row[i]).collect()
    }
}

/// Distinct projection of `r` onto the attributes `x`.
pub fn project(r: &Relation, x: AttrSet) -> Result<Relation, Error> {
    let pos = r.positions_of(x)?;
    let schema: Vec<usize> = pos.iter().map(|&i| r.schema[i]).collect();
    let tuples: BTreeSet<Vec<Value>> = r
        .tuples
        .iter()
        .map(|row| Relation::key_at(row, &pos))
        .collect();
    Ok(Relation { schema, tuples })
}

/// Natural join. Shared variables define the join condition; disjoint
/// schemas give the cross product. The smaller side is indexed on the
/// shared variables.
pub fn join(r: &Relation, s: &Relation) -> Relation {
    let (small, big) = if r.len() <= s.len() { (r, s) } else { (s, r) };
    let shared = small.attrs().intersect(big.attrs());
    let small_pos = small.positions_of(shared).expect("shared ⊆ schema");
    let big_pos = big.positions_of(shared).expect("shared ⊆ schema");

    // Result schema: ascending union; values come from `big`, then the
    // non-shared columns of `small`.
    let out_attrs = small.attrs().union(big.attrs());
    let out_schema: Vec<usize> = out_attrs.iter().collect();
    let small_extra: Vec<usize> = (0..small.schema.len())
        .filter(|i| !shared.contains(small.schema[*i]))
        .collect();

    let mut index: HashMap<Vec<Value>, Vec<&Vec<Value>>> = HashMap::new();
    for row in small.tuples.iter() {
        index
            .entry(Relation::key_at(row, &small_pos))
            .or_default()
            .push(row);
    }

    let mut source: BTreeMap<usize, (bool, usize)> = BTreeMap::new(); // var -> (from_small_extra, position)
    for (i, &v) in big.schema.iter().enumerate() {
        source.insert(v, (false, i));
    }
    for &i in &small_extra {
        source.insert(small.schema[i], (true, i));
    }

    let mut tuples = BTreeSet::new();
    for brow in big.tuples.iter() {
        let key = Relation::key_at(brow, &big_pos);
        if let Some(matches) = index.get(&key) {
            for srow in matches {
                let row: Vec<Value> = out_schema
                    .iter()
                    .map(|v| {
                        let (from_small, pos) = source[v];
                        if from_small {
                            srow[pos]
                        } else {
                            brow[pos]
                        }
                    })
                    .collect();
                tuples.insert(row);
            }
        }
    }
    Relation {
        schema: out_schema,
        tuples,
    }
}

/// Semijoin `r ⋉ s`: tuples of `r` whose projection on the shared variables
/// appears in `s`.
pub fn semijoin(r: &Relation, s: &Relation) -> Relation {
    let shared = r.attrs().intersect(s.attrs());
    let r_pos = r.positions_of(shared).expect("shared ⊆ schema");
    let s_pos = s.positions_of(shared).expect("shared ⊆ schema");
    let keys: BTreeSet<Vec<Value>> = s
        .tuples
        .iter()
        .map(|row| Relation::key_at(row, &s_pos))
        .collect();
    let tuples = r
        .tuples
        .iter()
        .filter(|row| keys.contains(&Relation::key_at(row, &r_pos)))
        .cloned()
        .collect();
    Relation {
        schema: r.schema.clone(),
        tuples,
    }
}

/// `deg_r(Y | X)`: the maximum over `X`-tuples of the number of distinct
/// `Y`-projections extending them. `degree(r, F, ∅) = |Π_F(r)|`.
pub fn degree(r: &Relation, y: AttrSet, x: AttrSet) -> Result<u64, Error> {
    if !x.is_strict_subset(y) {
        return Err(Error::Domain(format!("degree needs X ⊂ Y, got X={x}, Y={y}")));
    }
    let y_pos = r.positions_of(y)?;
    let x_pos = r.positions_of(x)?;
    let mut per_key: BTreeMap<Vec<Value>, BTreeSet<Vec<Value>>> = BTreeMap::new();
    for row in r.tuples.iter() {
        per_key
            .entry(Relation::key_at(row, &x_pos))
            .or_default()
            .insert(Relation::key_at(row, &y_pos));
    }
    Ok(per_key.values().map(|s| s.len() as u64).max().unwrap_or(0))
}

/// One part of a degree-based partition, with its measured statistics.
#[derive(Clone, Debug)]
pub struct DegreePart {
    pub relation: Relation,
    /// `|Π_X(part)|`.
    pub n_x: u64,
    /// Max degree of `Y` given `X` within the part.
    pub n_yx: u64,
}

/// Partitions `r` by the log-degree of its `X`-keys with respect to `Y`,
/// splitting each log-bucket into two halves by `X`-projection count.
///
/// Every part satisfies `n_x · n_yx <= |Π_Y(r)|`, the invariant the
/// decomposition step of the evaluation engine relies on; the number of
/// parts is at most `2·ceil(log2 |Π_Y(r)|) + 2`.
pub fn partition_by_degree(r: &Relation, y: AttrSet, x: AttrSet) -> Result<Vec<DegreePart>, Error> {
    if !x.is_strict_subset(y) {
        return Err(Error::Domain(format!(
            "partition needs X ⊂ Y, got X={x}, Y={y}"
        )));
    }
    if r.is_empty() {
        return Err(Error::Domain("cannot partition an empty relation".into()));
    }
    let y_pos = r.positions_of(y)?;
    let x_pos = r.positions_of(x)?;

    let mut per_key: BTreeMap<Vec<Value>, BTreeSet<Vec<Value>>> = BTreeMap::new();
    for row in r.tuples.iter() {
        per_key
            .entry(Relation::key_at(row, &x_pos))
            .or_default()
            .insert(Relation::key_at(row, &y_pos));
    }
    let total_y: u64 = project(r, y)?.len() as u64;

    // Bucket keys by floor(log2 degree); keys inside a bucket stay in their
    // canonical order, and the extra key of an odd bucket goes to the first
    // half.
    let mut buckets: BTreeMap<u32, Vec<Vec<Value>>> = BTreeMap::new();
    for (key, exts) in &per_key {
        let d = exts.len() as u64;
        buckets.entry(63 - d.leading_zeros()).or_default().push(key.clone());
    }

    let mut parts = Vec::new();
    for keys in buckets.values() {
        let half = keys.len().div_ceil(2);
        for chunk in [&keys[..half], &keys[half..]] {
            if chunk.is_empty() {
                continue;
            }
            let chunk_set: BTreeSet<&Vec<Value>> = chunk.iter().collect();
            let tuples: BTreeSet<Vec<Value>> = r
                .tuples
                .iter()
                .filter(|row| chunk_set.contains(&Relation::key_at(row, &x_pos)))
                .cloned()
                .collect();
            let relation = Relation {
                schema: r.schema.clone(),
                tuples,
            };
            let n_x = chunk.len() as u64;
            let n_yx = chunk
                .iter()
                .map(|k| per_key[k].len() as u64)
                .max()
                .unwrap_or(0);
            assert!(
                n_x * n_yx <= total_y,
                "degree partition violated its product bound: {n_x} * {n_yx} > {total_y}"
            );
            parts.push(DegreePart { relation, n_x, n_yx });
        }
    }
    let cap = 2 * (64 - (total_y.max(1) - 1).leading_zeros() as usize) + 2;
    assert!(parts.len() <= cap.max(2), "too many degree-partition parts");
    Ok(parts)
}

/// Exact natural join of all inputs by naive nested iteration; the
/// ground-truth oracle the engine is checked against.
pub fn brute_force_join(relations: &[&Relation]) -> Relation {
    let mut acc = Relation::unit();
    for r in relations {
        let mut rows: Vec<Vec<Value>> = Vec::new();
        let out_attrs = acc.attrs().union(r.attrs());
        let out_schema: Vec<usize> = out_attrs.iter().collect();
        for t in acc.tuples.iter() {
            for s in r.tuples.iter() {
                // Compatible iff they agree on every shared variable.
                let compatible = acc.schema.iter().enumerate().all(|(i, v)| {
                    match r.schema.iter().position(|w| w == v) {
                        Some(j) => t[i] == s[j],
                        None => true,
                    }
                });
                if compatible {
                    let row = out_schema
                        .iter()
                        .map(|v| {
                            if let Some(i) = acc.schema.iter().position(|w| w == v) {
                                t[i]
                            } else {
                                let j = r.schema.iter().position(|w| w == v).unwrap();
                                s[j]
                            }
                        })
                        .collect();
                    rows.push(row);
                }
            }
        }
        acc = Relation {
            schema: out_schema,
            tuples: rows.into_iter().collect(),
        };
    }
    acc
}

/// A model of a disjunctive rule: one table per target, keyed by the target
/// attribute set; each table's schema equals its key.
pub type Model = BTreeMap<AttrSet, Relation>;

/// Checks that `model` really is a model of the rule body join: every body
/// tuple projects into at least one target table.
pub fn is_model_of(model: &Model, body_join: &Relation, targets: &[AttrSet]) -> bool {
    let mut projections: Vec<(AttrSet, Vec<usize>)> = Vec::new();
    for b in targets {
        let pos = body_join.positions_of(*b).expect("target ⊆ join schema");
        projections.push((*b, pos));
    }
    body_join.tuples().all(|t| {
        projections.iter().any(|(b, pos)| {
            model
                .get(b)
                .is_some_and(|table| table.contains(&Relation::key_at(t, pos)))
        })
    })
}

/// Map from relation id to its table.
pub type Database = BTreeMap<RelId, Relation>;
