//! The star family: creatures whose letters are fixed-width bit words
//! constrained by a partial function `g`, averaged by the minimum over
//! small extensions of `g` of normalized sums.

pub mod profile;
pub mod split;
pub mod stabilize;
pub mod transfer;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::candidate::FiniteCandidate;
use crate::creature::{
    Creature, FamilyKind, FunctionalSet, Payload, Row, RowLabel, StarPayload,
};
use crate::error::{Error, Result};
use crate::family::{expect_family, MeasuredFamily};
use crate::guard::Guards;
use crate::node::{Letter, Node, PartialBits};
use crate::rational::{pow2_neg, rat_int, Rational};

pub use profile::{paper_profile, simple_toy_profile, toy_profile, ProfileMode, StarProfile, Thresholds};

#[derive(Clone, Debug)]
pub struct StarFamily {
    pub profile: StarProfile,
    pub guards: Guards,
}

impl StarFamily {
    pub fn new(profile: StarProfile, guards: Guards) -> StarFamily {
        StarFamily { profile, guards }
    }

    /// Builds and validates a star creature at level `k`.
    pub fn creature(
        &self,
        k: usize,
        stem: Node,
        n: u64,
        g: PartialBits,
        p: BTreeSet<Letter>,
    ) -> Result<Creature> {
        let c = Creature {
            level: k,
            stem,
            norm: rat_int(n as i64),
            payload: Payload::Star(StarPayload { g, p, n }),
        };
        self.validate_creature(&c)?;
        Ok(c)
    }

    /// All letters of level `k` extending the constraint `g`.
    pub fn letters_extending(&self, k: usize, g: &PartialBits) -> Result<Vec<Letter>> {
        let width = self.profile.toy_width(k)?;
        for coord in g.domain() {
            if coord >= width {
                return Err(Error::input(format!(
                    "constraint coordinate {coord} outside width {width}"
                )));
            }
        }
        let free: Vec<u8> = (0..width).filter(|c| g.get(*c).is_none()).collect();
        let count = 1u64
            .checked_shl(free.len() as u32)
            .ok_or_else(|| Error::guard("letter enumeration", "2^free", self.guards.max_pos))?;
        self.guards.check_pos(count)?;
        let mut out = Vec::with_capacity(count as usize);
        for mask in 0..count {
            let mut bits = 0u32;
            for (j, coord) in free.iter().copied().enumerate() {
                if mask >> j & 1 == 1 {
                    bits |= 1 << (width - 1 - coord);
                }
            }
            for (coord, b) in g.pairs() {
                if *b {
                    bits |= 1 << (width - 1 - coord);
                }
            }
            out.push(Letter::word(width, bits));
        }
        out.sort();
        Ok(out)
    }

    /// Enumerates, per partial constraint `h` extending `g` by at most the
    /// budget, the row labels of the averaging function.
    fn row_constraints(&self, k: usize, g: &PartialBits) -> Result<Vec<PartialBits>> {
        let width = self.profile.toy_width(k)?;
        let budget = self.profile.budget_at(k)?;
        let rows = self.profile.row_count(k, g.len() as u64)?;
        let rows = rows.to_u64().ok_or_else(|| {
            Error::guard("functional rows", "overflow", self.guards.max_rows)
        })?;
        self.guards.check_rows(rows).map_err(|_| {
            Error::guard(
                format!("functional rows at level {k} (use a toy profile)"),
                rows,
                self.guards.max_rows,
            )
        })?;
        let free: Vec<u8> = (0..width).filter(|c| g.get(*c).is_none()).collect();
        let mut out = vec![g.clone()];
        let budget = budget.min(free.len() as u64) as usize;
        let mut subsets: Vec<Vec<u8>> = vec![vec![]];
        for size in 1..=budget {
            let mut stack = vec![(0usize, Vec::new())];
            while let Some((start, prefix)) = stack.pop() {
                if prefix.len() == size {
                    subsets.push(prefix);
                    continue;
                }
                for (i, coord) in free.iter().enumerate().skip(start) {
                    let mut next = prefix.clone();
                    next.push(*coord);
                    stack.push((i + 1, next));
                }
            }
        }
        for u in subsets.into_iter().filter(|u| !u.is_empty()) {
            for mask in 0..(1u64 << u.len()) {
                let mut pairs: Vec<(u8, bool)> = g.pairs().to_vec();
                for (j, &coord) in u.iter().enumerate() {
                    pairs.push((coord, mask >> j & 1 == 1));
                }
                out.push(PartialBits::new(pairs)?);
            }
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Enumerates all star creatures at `(k, stem)` with norm in the given
    /// range: every admissible constraint times every nonempty retained set
    /// of letters extending it. Deterministic order, guarded.
    pub fn enumerate_creatures(
        &self,
        k: usize,
        stem: &Node,
        norms: std::ops::RangeInclusive<u64>,
    ) -> Result<Vec<Creature>> {
        if self.profile.mode == ProfileMode::PaperExact {
            return Err(Error::input(
                "paper-exact profiles do not materialize creatures; use a toy profile",
            ));
        }
        let width = self.profile.toy_width(k)?;
        let mut out = Vec::new();
        let mut count = 0u64;
        for n in norms {
            if n > k as u64 {
                continue;
            }
            let cap = self.profile.cap_at(k, k as u64 - n)?;
            for g in self.all_constraints(width, &cap)? {
                let ext = self.letters_extending(k, &g)?;
                if ext.is_empty() {
                    continue;
                }
                if ext.len() as u64 > 20 {
                    return Err(Error::guard(
                        "retained-set enumeration",
                        format!("2^{}", ext.len()),
                        self.guards.max_sigma,
                    ));
                }
                for mask in 1u64..(1 << ext.len()) {
                    count += 1;
                    self.guards.check_sigma(count)?;
                    let p: BTreeSet<Letter> = ext
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &l)| l)
                        .collect();
                    out.push(self.creature(k, stem.clone(), n, g.clone(), p)?);
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// All partial constraints of the given width with size at most `cap`.
    fn all_constraints(&self, width: u8, cap: &BigUint) -> Result<Vec<PartialBits>> {
        let cap = cap.to_u64().unwrap_or(u64::MAX).min(width as u64) as usize;
        let mut out = vec![PartialBits::empty()];
        let mut frontier = vec![PartialBits::empty()];
        for _ in 0..cap {
            let mut next = Vec::new();
            for g in &frontier {
                let start = g.domain().max().map_or(0, |c| c + 1);
                for coord in start..width {
                    for bit in [false, true] {
                        let mut pairs = g.pairs().to_vec();
                        pairs.push((coord, bit));
                        let bigger = PartialBits::new(pairs)?;
                        out.push(bigger.clone());
                        next.push(bigger);
                    }
                }
            }
            frontier = next;
        }
        out.sort();
        Ok(out)
    }

    /// The single-row normalized-sum functional: every possibility carries
    /// coefficient 2^(|g| - width). It dominates the averaging function,
    /// whose row at the bare constraint is exactly this row.
    pub fn auxiliary_average(&self, t: &Creature) -> Result<FunctionalSet> {
        expect_family(t, FamilyKind::Star)?;
        let payload = t.star()?;
        let width = self.profile.toy_width(t.level)?;
        let coeff = pow2_neg(width as u64 - payload.g.len() as u64);
        FunctionalSet::new(vec![Row {
            label: RowLabel::NormalizedSum,
            coeffs: t.pos().into_iter().map(|nu| (nu, coeff.clone())).collect(),
        }])
    }

    /// The cover of a candidate: same skeleton, every creature's retained
    /// set widened to all letters extending its constraint (off-tree nodes
    /// take the empty constraint and norm equal to their level), built up
    /// to the candidate's height.
    pub fn cover(&self, s: &FiniteCandidate) -> Result<FiniteCandidate> {
        if s.family().is_some() && s.family() != Some(FamilyKind::Star) {
            return Err(Error::input("covers widen star candidates"));
        }
        let mut creatures: Vec<Creature> = Vec::new();
        let mut frontier = vec![s.root().clone()];
        while let Some(node) = frontier.pop() {
            if node.len() == s.height() {
                continue;
            }
            let k = node.len();
            let (g, norm) = match s.creature_at(&node) {
                Some(t) => (t.star()?.g.clone(), t.star()?.n),
                None => (PartialBits::empty(), k as u64),
            };
            let p: BTreeSet<Letter> = self.letters_extending(k, &g)?.into_iter().collect();
            let t = self.creature(k, node.clone(), norm, g, p)?;
            frontier.extend(t.pos());
            creatures.push(t);
        }
        FiniteCandidate::from_creatures(s.root().clone(), s.height(), creatures)
    }
}

impl MeasuredFamily for StarFamily {
    fn kind(&self) -> FamilyKind {
        FamilyKind::Star
    }

    fn validate_creature(&self, t: &Creature) -> Result<()> {
        expect_family(t, FamilyKind::Star)?;
        let payload = t.star()?;
        self.profile.check_level(t.level)?;
        if t.stem.len() != t.level {
            return Err(Error::input(format!(
                "stem {} has length {}, expected level {}",
                t.stem,
                t.stem.len(),
                t.level
            )));
        }
        for (i, letter) in t.stem.letters().iter().enumerate() {
            let expect = self.profile.toy_width(i)?;
            if letter.width() != expect || matches!(letter, Letter::Index(_)) {
                return Err(Error::input(format!(
                    "stem letter {letter} at position {i} is not a width-{expect} word"
                )));
            }
        }
        if payload.n > t.level as u64 {
            return Err(Error::input(format!(
                "norm {} exceeds the level {}",
                payload.n, t.level
            )));
        }
        if t.norm != rat_int(payload.n as i64) {
            return Err(Error::input("creature norm differs from its payload norm"));
        }
        let cap = self.profile.cap_at(t.level, t.level as u64 - payload.n)?;
        if BigUint::from(payload.g.len() as u64) > cap {
            return Err(Error::input(format!(
                "constraint size {} exceeds the cap {cap} at deficiency {}",
                payload.g.len(),
                t.level as u64 - payload.n
            )));
        }
        if payload.p.is_empty() {
            return Err(Error::input(format!(
                "creature at {} retains no letters",
                t.stem
            )));
        }
        let width = self.profile.toy_width(t.level)?;
        self.guards.check_pos(payload.p.len() as u64)?;
        for letter in &payload.p {
            if letter.width() != width || matches!(letter, Letter::Index(_)) {
                return Err(Error::input(format!(
                    "retained letter {letter} is not a width-{width} word"
                )));
            }
            if !payload.g.constrains(letter) {
                return Err(Error::input(format!(
                    "retained letter {letter} violates the constraint {}",
                    payload.g
                )));
            }
        }
        for coord in payload.g.domain() {
            if coord >= width {
                return Err(Error::input(format!(
                    "constraint coordinate {coord} outside width {width}"
                )));
            }
        }
        Ok(())
    }

    fn functionals(&self, t: &Creature) -> Result<FunctionalSet> {
        self.validate_creature(t)?;
        let payload = t.star()?;
        let width = self.profile.toy_width(t.level)?;
        let mut rows = Vec::new();
        for h in self.row_constraints(t.level, &payload.g)? {
            let coeff = pow2_neg(width as u64 - h.len() as u64);
            let coeffs: BTreeMap<Node, Rational> = payload
                .p
                .iter()
                .filter(|letter| h.constrains(letter))
                .map(|&letter| (t.stem.child(letter), coeff.clone()))
                .collect();
            rows.push(Row {
                label: RowLabel::Extension(h),
                coeffs,
            });
        }
        FunctionalSet::new(rows)
    }

    fn sigma(&self, t: &Creature) -> Result<Vec<Creature>> {
        self.validate_creature(t)?;
        if self.profile.mode == ProfileMode::PaperExact {
            return Err(Error::input(
                "paper-exact profiles only decide composition membership; enumeration needs a toy profile",
            ));
        }
        let payload = t.star()?;
        let width = self.profile.toy_width(t.level)?;
        let mut out = Vec::new();
        let mut count = 0u64;
        for n in 0..=payload.n {
            let cap = self.profile.cap_at(t.level, t.level as u64 - n)?;
            for g in self.all_constraints(width, &cap)? {
                if !payload.g.subset_of(&g) {
                    continue;
                }
                let compatible: Vec<Letter> = payload
                    .p
                    .iter()
                    .filter(|l| g.constrains(l))
                    .copied()
                    .collect();
                if compatible.is_empty() {
                    continue;
                }
                if compatible.len() > 20 {
                    return Err(Error::guard(
                        "composition enumeration",
                        format!("2^{}", compatible.len()),
                        self.guards.max_sigma,
                    ));
                }
                for mask in 1u64..(1 << compatible.len()) {
                    count += 1;
                    self.guards.check_sigma(count)?;
                    let p: BTreeSet<Letter> = compatible
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &l)| l)
                        .collect();
                    out.push(self.creature(t.level, t.stem.clone(), n, g.clone(), p)?);
                }
            }
        }
        out.sort();
        Ok(out)
    }

    fn sigma_contains(&self, t: &Creature, s: &Creature) -> Result<bool> {
        self.validate_creature(t)?;
        self.validate_creature(s)?;
        let tp = t.star()?;
        let sp = s.star()?;
        Ok(s.stem == t.stem
            && sp.n <= tp.n
            && tp.g.subset_of(&sp.g)
            && sp.p.is_subset(&tp.p))
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use num_traits::{One, Zero};

    use crate::creature::Valuation;

    /// widths 2 then 4: level-one creatures carry width-4 letters and can
    /// hold norm one
    pub(crate) fn family_n4() -> StarFamily {
        StarFamily::new(
            simple_toy_profile(vec![2, 4], vec![1, 1]).unwrap(),
            Guards::default(),
        )
    }

    /// the all-zero width-2 stem below a level-one creature
    pub(crate) fn stem1() -> Node {
        Node::new(vec![Letter::word(2, 0)])
    }

    pub(crate) fn family_n2() -> StarFamily {
        StarFamily::new(
            simple_toy_profile(vec![2, 2, 2], vec![1, 1, 1]).unwrap(),
            Guards::default(),
        )
    }

    #[test]
    fn full_retained_set_averages_to_one() {
        let fam = family_n4();
        let p: BTreeSet<Letter> = fam
            .letters_extending(1, &PartialBits::empty())
            .unwrap()
            .into_iter()
            .collect();
        assert_eq!(p.len(), 16);
        let t = fam
            .creature(1, stem1(), 0, PartialBits::empty(), p)
            .unwrap();
        let rows = fam.functionals(&t).unwrap();
        assert_eq!(rows.row_count(), 9);
        let ones = Valuation::constant(t.pos().iter(), Rational::one());
        // every row's coefficients sum to one on the full retained set
        assert_eq!(fam.eval(&t, &ones).unwrap(), Rational::one());
    }

    #[test]
    fn constrained_half_space_min_row_vanishes() {
        // retained letters: the eight with leading bit zero; the row
        // constraining the leading bit to one meets none of them
        let fam = family_n4();
        let p: BTreeSet<Letter> = fam
            .letters_extending(1, &PartialBits::new(vec![(0, false)]).unwrap())
            .unwrap()
            .into_iter()
            .collect();
        assert_eq!(p.len(), 8);
        let t = fam
            .creature(1, stem1(), 0, PartialBits::empty(), p)
            .unwrap();
        let ones = Valuation::constant(t.pos().iter(), Rational::one());
        assert_eq!(fam.eval(&t, &ones).unwrap(), Rational::zero());
    }

    #[test]
    fn zero_padding_matches_explicit_zeros() {
        let fam = family_n4();
        let p: BTreeSet<Letter> = fam
            .letters_extending(1, &PartialBits::empty())
            .unwrap()
            .into_iter()
            .collect();
        let t = fam
            .creature(1, stem1(), 0, PartialBits::empty(), p)
            .unwrap();
        let pos = t.pos();
        let partial =
            Valuation::from_entries(vec![(pos[0].clone(), Rational::one())]).unwrap();
        let mut padded = Valuation::new();
        for nu in &pos {
            padded
                .insert(nu.clone(), if nu == &pos[0] { Rational::one() } else { Rational::zero() })
                .unwrap();
        }
        assert_eq!(fam.eval(&t, &partial).unwrap(), fam.eval(&t, &padded).unwrap());
        let stray = Valuation::from_entries(vec![(Node::root(), Rational::one())]).unwrap();
        assert!(fam.eval(&t, &stray).is_err());
    }

    #[test]
    #[allow(clippy::reversed_empty_ranges)]
    fn creature_count_matches_closed_form() {
        // width 2, cap 2, norm 0: sum over constraints of
        // 2^(extensions) - 1 nonempty retained sets
        let fam = StarFamily::new(
            toy_profile(vec![2], vec![vec![2]], vec![1], Thresholds::default()).unwrap(),
            Guards::default(),
        );
        let all = fam.enumerate_creatures(0, &Node::root(), 0..=0).unwrap();
        let mut expected = 0u64;
        for g in fam.all_constraints(2, &BigUint::from(2u32)).unwrap() {
            let ext = fam.letters_extending(0, &g).unwrap().len() as u32;
            expected += (1u64 << ext) - 1;
        }
        assert_eq!(expected, 31);
        assert_eq!(all.len(), 31);
        assert!(fam.enumerate_creatures(0, &Node::root(), 1..=0).unwrap().is_empty());
        // the cap excludes nothing here, but a tighter cap must
        let tight = StarFamily::new(
            toy_profile(vec![2], vec![vec![0]], vec![1], Thresholds::default()).unwrap(),
            Guards::default(),
        );
        let constrained = tight.enumerate_creatures(0, &Node::root(), 0..=0).unwrap();
        assert_eq!(constrained.len(), 15);
        assert!(constrained.iter().all(|c| c.star().unwrap().g.is_empty()));
    }

    #[test]
    fn sigma_reflexive_and_transitive_small() {
        let fam = family_n2();
        let p: BTreeSet<Letter> = fam
            .letters_extending(0, &PartialBits::empty())
            .unwrap()
            .into_iter()
            .collect();
        let t = fam
            .creature(0, Node::root(), 0, PartialBits::empty(), p)
            .unwrap();
        assert!(fam.sigma_contains(&t, &t).unwrap());
        let all = fam.sigma(&t).unwrap();
        assert!(all.contains(&t));
        for s in &all {
            for u in fam.sigma(s).unwrap() {
                assert!(fam.sigma_contains(&t, &u).unwrap(), "{s:?} -> {u:?}");
            }
        }
    }

    #[test]
    fn row_coefficients_are_dyadic_and_min_is_attained() {
        use crate::creature::RowLabel;
        let fam = family_n4();
        let p: BTreeSet<Letter> = fam
            .letters_extending(1, &PartialBits::new(vec![(0, false)]).unwrap())
            .unwrap()
            .into_iter()
            .take(5)
            .collect();
        let t = fam
            .creature(1, stem1(), 1, PartialBits::empty(), p)
            .unwrap();
        let rows = fam.functionals(&t).unwrap();
        let width = 4u64;
        for row in rows.rows() {
            let RowLabel::Extension(h) = &row.label else {
                panic!("star rows carry their constraint")
            };
            let expect = pow2_neg(width - h.len() as u64);
            for c in row.coeffs.values() {
                assert_eq!(c, &expect);
            }
        }
        let r = Valuation::constant(t.pos().iter(), Rational::new(1.into(), 3.into()));
        let value = fam.eval(&t, &r).unwrap();
        let attained = rows
            .row_values(&r)
            .into_iter()
            .map(|(_, v)| v)
            .min()
            .unwrap();
        assert_eq!(value, attained);
    }

    #[test]
    fn cover_widening() {
        use crate::candidate::FiniteCandidate;
        let fam = family_n2();
        let all: BTreeSet<Letter> = fam
            .letters_extending(0, &PartialBits::empty())
            .unwrap()
            .into_iter()
            .collect();

        // full retained sets: the cover is the candidate itself
        let full = fam
            .creature(0, Node::root(), 0, PartialBits::empty(), all.clone())
            .unwrap();
        let s = FiniteCandidate::from_creatures(Node::root(), 1, vec![full]).unwrap();
        assert_eq!(fam.cover(&s).unwrap(), s);

        // a pruned root widens to every letter extending its constraint
        let g = PartialBits::new(vec![(0, false)]).unwrap();
        let pruned = fam
            .creature(0, Node::root(), 0, g.clone(), {
                let mut one = BTreeSet::new();
                one.insert(*all.iter().next().unwrap());
                one
            })
            .unwrap();
        let s = FiniteCandidate::from_creatures(Node::root(), 1, vec![pruned]).unwrap();
        let cover = fam.cover(&s).unwrap();
        let root_creature = cover.creature_at(&Node::root()).unwrap();
        assert_eq!(root_creature.pos_count(), 2); // 2^(width - |g|)
        assert_eq!(root_creature.star().unwrap().g, g);

        // every retained-set size in a cover is a power of two; off-tree
        // completions take the empty constraint and norm equal to the level
        let deep = fam.cover(&s.truncate(1).unwrap()).unwrap();
        for t in deep.creatures().values() {
            assert!(t.pos_count().is_power_of_two());
        }
    }

    #[test]
    fn height_one_measure_example() {
        // width 2, budget 1, empty constraint, full four letters; the
        // valuation lives on one boundary node, so the row pinning the
        // complementary bit evaluates to zero
        use crate::candidate::FiniteCandidate;
        use crate::measure::{front_value, mval};
        let fam = family_n2();
        let all: BTreeSet<Letter> = fam
            .letters_extending(0, &PartialBits::empty())
            .unwrap()
            .into_iter()
            .collect();
        let t = fam
            .creature(0, Node::root(), 0, PartialBits::empty(), all)
            .unwrap();
        let s = FiniteCandidate::from_creatures(Node::root(), 1, vec![t]).unwrap();
        let target = Node::new(vec![Letter::parse_word("00").unwrap()]);
        let f: Valuation = s
            .boundary()
            .map(|n| {
                let v = if n == &target { Rational::one() } else { Rational::zero() };
                (n.clone(), v)
            })
            .collect();
        let m = mval(&fam, &s, &f).unwrap();
        assert_eq!(m.root_value(), &Rational::zero());

        // with the all-ones valuation every level front keeps value one
        let ones = Valuation::constant(s.boundary(), Rational::one());
        let m = mval(&fam, &s, &ones).unwrap();
        assert_eq!(m.root_value(), &Rational::one());
        for level in 0..=1 {
            assert_eq!(front_value(&fam, &s, level).unwrap(), Rational::one());
        }
    }

    #[test]
    fn auxiliary_average_dominates() {
        let fam = family_n4();
        let letters = fam.letters_extending(1, &PartialBits::empty()).unwrap();
        let p: BTreeSet<Letter> = letters.iter().take(8).copied().collect();
        let t = fam
            .creature(1, stem1(), 0, PartialBits::empty(), p)
            .unwrap();
        let aux = fam.auxiliary_average(&t).unwrap();
        let ones = Valuation::constant(t.pos().iter(), Rational::one());
        assert_eq!(aux.eval(&ones), Rational::new(1.into(), 2.into()));
        assert!(fam.eval(&t, &ones).unwrap() <= aux.eval(&ones));
    }
}
