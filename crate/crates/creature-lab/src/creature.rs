//! Creatures, valuations and min-of-linear averaging functionals.
//!
//! A creature describes how one tree node may branch: a level, a stem node
//! of that length, a nonnegative norm measuring its richness, and a
//! family-specific payload that determines the successor letters. The
//! averaging function attached to a creature is always represented as a
//! finite set of nonnegative linear functionals evaluated by taking the
//! pointwise minimum; nonnegative coefficients give monotonicity and the
//! min-of-linear form gives exact positive homogeneity and upper
//! continuity.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::node::{Letter, Node, PartialBits};
use crate::rational::{check_unit, fmt_rat, Rational};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum FamilyKind {
    Star,
    Random,
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyKind::Star => write!(f, "star"),
            FamilyKind::Random => write!(f, "random"),
        }
    }
}

/// Payload of a star creature: a partial bit constraint `g`, the retained
/// letter set `P` (every member extends `g`), and the natural norm `n`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct StarPayload {
    pub g: PartialBits,
    pub p: BTreeSet<Letter>,
    pub n: u64,
}

/// Payload of a binary-family creature: the retained subset of {0,1}.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct RandomPayload {
    pub p: BTreeSet<Letter>,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Payload {
    Star(StarPayload),
    Random(RandomPayload),
}

/// One node's local tree creature.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Creature {
    pub level: usize,
    pub stem: Node,
    pub norm: Rational,
    pub payload: Payload,
}

impl Creature {
    pub fn family(&self) -> FamilyKind {
        match self.payload {
            Payload::Star(_) => FamilyKind::Star,
            Payload::Random(_) => FamilyKind::Random,
        }
    }

    pub fn letters(&self) -> &BTreeSet<Letter> {
        match &self.payload {
            Payload::Star(s) => &s.p,
            Payload::Random(r) => &r.p,
        }
    }

    /// The possibilities: one-step extensions of the stem by each retained
    /// letter, in letter order.
    pub fn pos(&self) -> Vec<Node> {
        self.letters().iter().map(|&l| self.stem.child(l)).collect()
    }

    pub fn pos_count(&self) -> usize {
        self.letters().len()
    }

    pub fn star(&self) -> Result<&StarPayload> {
        match &self.payload {
            Payload::Star(s) => Ok(s),
            Payload::Random(_) => Err(Error::input("expected a star creature")),
        }
    }

    pub fn random(&self) -> Result<&RandomPayload> {
        match &self.payload {
            Payload::Random(r) => Ok(r),
            Payload::Star(_) => Err(Error::input("expected a random-family creature")),
        }
    }
}

/// An exact-rational map into [0,1] from a designated node set. Missing
/// entries read as 0, matching the zero-padding of partial valuations.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Valuation(BTreeMap<Node, Rational>);

impl Valuation {
    pub fn new() -> Valuation {
        Valuation(BTreeMap::new())
    }

    pub fn from_entries(entries: Vec<(Node, Rational)>) -> Result<Valuation> {
        let mut map = BTreeMap::new();
        for (node, value) in entries {
            check_unit(&value, &format!("valuation at {node}"))?;
            if map.insert(node.clone(), value).is_some() {
                return Err(Error::input(format!("duplicate valuation entry at {node}")));
            }
        }
        Ok(Valuation(map))
    }

    /// Constant valuation on the given nodes.
    pub fn constant<'a>(nodes: impl IntoIterator<Item = &'a Node>, value: Rational) -> Valuation {
        Valuation(nodes.into_iter().map(|n| (n.clone(), value.clone())).collect())
    }

    pub fn insert(&mut self, node: Node, value: Rational) -> Result<()> {
        check_unit(&value, &format!("valuation at {node}"))?;
        self.0.insert(node, value);
        Ok(())
    }

    pub fn get(&self, node: &Node) -> Option<&Rational> {
        self.0.get(node)
    }

    pub fn get_or_zero(&self, node: &Node) -> Rational {
        self.0.get(node).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Node, &Rational)> {
        self.0.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Node> {
        self.0.keys()
    }

    /// Keep only the entries whose node satisfies the predicate.
    pub fn restrict(&self, mut keep: impl FnMut(&Node) -> bool) -> Valuation {
        Valuation(
            self.0
                .iter()
                .filter(|(n, _)| keep(n))
                .map(|(n, v)| (n.clone(), v.clone()))
                .collect(),
        )
    }

    /// Errors unless the domain is exactly `nodes`.
    pub fn check_total_on(&self, nodes: &BTreeSet<Node>, what: &str) -> Result<()> {
        for n in nodes {
            if !self.0.contains_key(n) {
                return Err(Error::input(format!("{what} is missing an entry at {n}")));
            }
        }
        for n in self.0.keys() {
            if !nodes.contains(n) {
                return Err(Error::input(format!("{what} has a stray entry at {n}")));
            }
        }
        Ok(())
    }

    /// Errors if some entry lies outside `nodes`.
    pub fn check_within(&self, nodes: &BTreeSet<Node>, what: &str) -> Result<()> {
        for n in self.0.keys() {
            if !nodes.contains(n) {
                return Err(Error::input(format!("{what} has an entry at {n} outside its domain")));
            }
        }
        Ok(())
    }

    pub fn support(&self) -> BTreeSet<Node> {
        self.0
            .iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(n, _)| n.clone())
            .collect()
    }
}

impl FromIterator<(Node, Rational)> for Valuation {
    fn from_iter<T: IntoIterator<Item = (Node, Rational)>>(iter: T) -> Self {
        Valuation(iter.into_iter().collect())
    }
}

/// Label identifying where a functional row came from.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum RowLabel {
    /// star row: the extension `h` of the creature's constraint
    Extension(PartialBits),
    /// the arithmetic-mean row of the binary family
    Mean,
    /// the single normalized-sum row of the auxiliary average
    NormalizedSum,
}

impl fmt::Display for RowLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowLabel::Extension(h) => write!(f, "h={h}"),
            RowLabel::Mean => write!(f, "mean"),
            RowLabel::NormalizedSum => write!(f, "normalized-sum"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Row {
    pub label: RowLabel,
    /// nonnegative coefficient per possibility; missing reads as 0
    pub coeffs: BTreeMap<Node, Rational>,
}

impl Row {
    pub fn dot(&self, r: &Valuation) -> Rational {
        let mut acc = Rational::zero();
        for (node, c) in &self.coeffs {
            if c.is_zero() {
                continue;
            }
            if let Some(v) = r.get(node) {
                acc += c * v;
            }
        }
        acc
    }
}

/// A finite set of nonnegative linear functionals; the averaging function
/// is their pointwise minimum.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FunctionalSet {
    rows: Vec<Row>,
}

impl FunctionalSet {
    pub fn new(rows: Vec<Row>) -> Result<FunctionalSet> {
        if rows.is_empty() {
            return Err(Error::input("a functional set needs at least one row"));
        }
        for row in &rows {
            for (node, c) in &row.coeffs {
                if c < &Rational::zero() {
                    return Err(Error::input(format!(
                        "negative coefficient {} at {node} in row {}",
                        fmt_rat(c),
                        row.label
                    )));
                }
            }
        }
        Ok(FunctionalSet { rows })
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// Structural check backing the monotonicity axiom: at least one row,
    /// all coefficients nonnegative. Construction already enforces it; this
    /// re-decides it for reporting.
    pub fn coefficients_nonnegative(&self) -> bool {
        !self.rows.is_empty()
            && self
                .rows
                .iter()
                .all(|row| row.coeffs.values().all(|c| c >= &Rational::zero()))
    }

    /// Minimum over rows of the exact dot product with `r` (zero-padded).
    pub fn eval(&self, r: &Valuation) -> Rational {
        let mut best: Option<Rational> = None;
        for row in &self.rows {
            let v = row.dot(r);
            best = match best {
                None => Some(v),
                Some(b) => Some(b.min(v)),
            };
        }
        best.expect("functional set has at least one row")
    }

    /// Value of every row, labeled, in row order.
    pub fn row_values(&self, r: &Valuation) -> Vec<(RowLabel, Rational)> {
        self.rows.iter().map(|row| (row.label.clone(), row.dot(r))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn letters01() -> (Node, Node) {
        let root = Node::root();
        (root.child(Letter::Index(0)), root.child(Letter::Index(1)))
    }

    #[test]
    fn min_of_linear_evaluation() {
        let (n0, n1) = letters01();
        let rows = vec![
            Row {
                label: RowLabel::Mean,
                coeffs: BTreeMap::from([(n0.clone(), rat(1, 2)), (n1.clone(), rat(1, 2))]),
            },
            Row {
                label: RowLabel::NormalizedSum,
                coeffs: BTreeMap::from([(n0.clone(), rat_int(1))]),
            },
        ];
        let f = FunctionalSet::new(rows).unwrap();
        let r = Valuation::from_entries(vec![(n0, rat(1, 4)), (n1, rat_int(1))]).unwrap();
        // mean row 5/8, single row 1/4
        assert_eq!(f.eval(&r), rat(1, 4));
        assert!(f.coefficients_nonnegative());
    }

    #[test]
    fn negative_coefficients_rejected() {
        let (n0, _) = letters01();
        let rows = vec![Row {
            label: RowLabel::Mean,
            coeffs: BTreeMap::from([(n0, rat(-1, 2))]),
        }];
        assert!(FunctionalSet::new(rows).is_err());
        assert!(FunctionalSet::new(vec![]).is_err());
    }

    #[test]
    fn valuation_domain_checks() {
        let (n0, n1) = letters01();
        let v = Valuation::from_entries(vec![(n0.clone(), rat(1, 2))]).unwrap();
        let all: BTreeSet<Node> = [n0.clone(), n1.clone()].into_iter().collect();
        assert!(v.check_within(&all, "r").is_ok());
        assert!(v.check_total_on(&all, "r").is_err());
        assert!(Valuation::from_entries(vec![(n1, rat(3, 2))]).is_err());
        assert_eq!(v.get_or_zero(&Node::root()), Rational::zero());
    }
}
