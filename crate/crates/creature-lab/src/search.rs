//! Brute-force searches over sub-candidates: specialization and the
//! pigeonhole stabilization of candidate sequences.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::candidate::FiniteCandidate;
use crate::creature::{Creature, Valuation};
use crate::error::{Error, Result};
use crate::family::MeasuredFamily;
use crate::guard::Guards;
use crate::measure::{classify_candidate, ClassifyReport};
use crate::node::Node;
use crate::rational::Rational;

#[derive(Clone, Debug)]
pub enum SpecializeOutcome {
    /// a special sub-candidate, its restricted boundary valuation, and the
    /// classification that certified it
    Found {
        candidate: FiniteCandidate,
        valuation: Valuation,
        report: ClassifyReport,
    },
    /// no special sub-candidate exists within the norm-drop budget
    Exhausted {
        /// total number of sub-candidates in the search space
        space: BigUint,
        /// assemblies actually classified
        explored: u64,
    },
}

fn sorted_choices(
    family: &dyn MeasuredFamily,
    t: &Creature,
    drop: &Rational,
    guards: &Guards,
) -> Result<Vec<Creature>> {
    let floor = t.norm.clone() - drop.clone();
    let mut all: Vec<Creature> = family
        .sigma(t)?
        .into_iter()
        .filter(|s| s.norm >= floor)
        .collect();
    guards.check_sigma(all.len() as u64)?;
    // larger norm first, then lexicographic on the retained letter sequence
    all.sort_by(|a, b| {
        b.norm.cmp(&a.norm).then_with(|| {
            a.letters()
                .iter()
                .collect::<Vec<_>>()
                .cmp(&b.letters().iter().collect())
        })
    });
    Ok(all)
}

/// Counts the assemblies the depth-first search ranges over.
fn space_size(
    family: &dyn MeasuredFamily,
    s: &FiniteCandidate,
    node: &Node,
    drop: &Rational,
    guards: &Guards,
    cache: &mut BTreeMap<Node, BigUint>,
) -> Result<BigUint> {
    if node.len() == s.height() {
        return Ok(BigUint::one());
    }
    if let Some(hit) = cache.get(node) {
        return Ok(hit.clone());
    }
    let t = s
        .creature_at(node)
        .ok_or_else(|| Error::input(format!("no creature at {node}")))?;
    let mut total = BigUint::zero();
    for choice in sorted_choices(family, t, drop, guards)? {
        let mut product = BigUint::one();
        for child in choice.pos() {
            product *= space_size(family, s, &child, drop, guards, cache)?;
        }
        total += product;
    }
    cache.insert(node.clone(), total.clone());
    Ok(total)
}

struct SpecializeSearch<'a> {
    family: &'a dyn MeasuredFamily,
    original: &'a FiniteCandidate,
    f: &'a Valuation,
    drop: &'a Rational,
    guards: &'a Guards,
    explored: u64,
}

impl SpecializeSearch<'_> {
    /// Depth-first assembly over the pending stack of undecided nodes.
    /// Boundary nodes need no decision and are dropped as they surface;
    /// internal nodes are restored on backtracking, so ancestors see a
    /// consistent stack.
    fn dfs(
        &mut self,
        pending: &mut Vec<Node>,
        chosen: &mut BTreeMap<Node, Creature>,
    ) -> Result<Option<FiniteCandidate>> {
        let next = loop {
            match pending.pop() {
                None => {
                    self.explored += 1;
                    self.guards.check_search(self.explored)?;
                    let sub = FiniteCandidate::from_creatures(
                        self.original.root().clone(),
                        self.original.height(),
                        chosen.values().cloned().collect(),
                    )?;
                    let f_sub = self.f.restrict(|n| sub.boundary_set().contains(n));
                    let report = classify_candidate(self.family, &sub, &f_sub)?;
                    return Ok(if report.special { Some(sub) } else { None });
                }
                Some(n) if n.len() == self.original.height() => continue,
                Some(n) => break n,
            }
        };
        let t = self
            .original
            .creature_at(&next)
            .ok_or_else(|| Error::input(format!("no creature at {next}")))?;
        for choice in sorted_choices(self.family, t, self.drop, self.guards)? {
            let kids = choice.pos();
            chosen.insert(next.clone(), choice);
            let mark = pending.len();
            pending.extend(kids);
            if let Some(found) = self.dfs(pending, chosen)? {
                return Ok(Some(found));
            }
            pending.truncate(mark);
        }
        chosen.remove(&next);
        pending.push(next);
        Ok(None)
    }
}

/// Searches the sub-candidates of `s` (each creature replaced by a
/// composition keeping `norm >= norm - drop`, the boundary valuation
/// restricted accordingly) for one that classifies as special.
///
/// The unmodified candidate is checked first; the depth-first search then
/// prefers larger creature norm and lexicographically smaller retained
/// letter sequences. On exhaustion the certificate records the size of the
/// search space.
pub fn specialize_search(
    family: &dyn MeasuredFamily,
    s: &FiniteCandidate,
    f: &Valuation,
    drop: &Rational,
    guards: &Guards,
) -> Result<SpecializeOutcome> {
    let own = classify_candidate(family, s, f)?;
    if own.special {
        return Ok(SpecializeOutcome::Found {
            candidate: s.clone(),
            valuation: f.clone(),
            report: own,
        });
    }

    let mut search = SpecializeSearch {
        family,
        original: s,
        f,
        drop,
        guards,
        explored: 0,
    };
    let mut chosen = BTreeMap::new();
    let mut pending = vec![s.root().clone()];
    if let Some(found) = search.dfs(&mut pending, &mut chosen)? {
        let valuation = f.restrict(|n| found.boundary_set().contains(n));
        let report = classify_candidate(family, &found, &valuation)?;
        return Ok(SpecializeOutcome::Found {
            candidate: found,
            valuation,
            report,
        });
    }
    let mut cache = BTreeMap::new();
    Ok(SpecializeOutcome::Exhausted {
        space: space_size(family, s, s.root(), drop, guards, &mut cache)?,
        explored: search.explored,
    })
}

#[derive(Clone, Debug)]
pub enum MergeOutcome {
    /// an index set of the requested size agreeing below every requested
    /// level, together with the common prefix
    Merged {
        prefix: FiniteCandidate,
        indices: Vec<usize>,
    },
    /// no index set of the requested size agrees; the best achievable
    Failure {
        best_quota: usize,
        best_indices: Vec<usize>,
    },
}

/// Pigeonhole stabilization: finds at least `quota` candidates that agree
/// (tree and creatures) below each requested level. Agreement below every
/// level is agreement below the deepest one, so candidates are bucketed by
/// their truncation there.
pub fn stabilized_merge(
    seq: &[FiniteCandidate],
    levels: &[usize],
    quota: usize,
) -> Result<MergeOutcome> {
    if seq.is_empty() {
        return Err(Error::input("empty candidate sequence"));
    }
    let root = seq[0].root().clone();
    for s in seq {
        if s.root() != &root {
            return Err(Error::input("candidates do not share a root"));
        }
        if s.family().is_some() && seq[0].family().is_some() && s.family() != seq[0].family() {
            return Err(Error::input("candidates do not share a family"));
        }
    }
    let cut = levels.iter().copied().max().unwrap_or(0).max(root.len());
    for s in seq {
        if s.height() < cut {
            return Err(Error::input(format!(
                "candidate of height {} cannot agree below level {cut}",
                s.height()
            )));
        }
    }

    let mut buckets: BTreeMap<FiniteCandidate, Vec<usize>> = BTreeMap::new();
    for (i, s) in seq.iter().enumerate() {
        buckets.entry(s.truncate(cut)?).or_default().push(i);
    }
    let (prefix, indices) = buckets
        .into_iter()
        .max_by_key(|(_, v)| v.len())
        .expect("nonempty");
    if indices.len() >= quota {
        Ok(MergeOutcome::Merged { prefix, indices })
    } else {
        Ok(MergeOutcome::Failure {
            best_quota: indices.len(),
            best_indices: indices,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::candidate::tests::full_binary;
    use crate::random_family::RandomFamily;
    use crate::rational::rat_int;
    use num_traits::One;

    #[test]
    fn already_special_returns_itself() {
        let s = full_binary(2, 4);
        let f = Valuation::constant(s.boundary(), Rational::one());
        match specialize_search(&RandomFamily, &s, &f, &rat_int(0), &Guards::default()).unwrap() {
            SpecializeOutcome::Found { candidate, .. } => assert_eq!(candidate, s),
            other => panic!("expected the candidate itself, got {other:?}"),
        }
    }

    #[test]
    fn zero_valuation_exhausts() {
        let s = full_binary(2, 3);
        let f = Valuation::constant(s.boundary(), Rational::zero());
        match specialize_search(&RandomFamily, &s, &f, &rat_int(0), &Guards::default()).unwrap() {
            SpecializeOutcome::Exhausted { space, explored } => {
                assert!(explored > 0);
                assert!(space > BigUint::zero());
            }
            other => panic!("expected exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn pruning_a_dead_leaf_specializes() {
        // one dead leaf makes the full tree non-special; dropping that leaf
        // restores the floors
        let s = full_binary(2, 3);
        let mut f = Valuation::constant(s.boundary(), Rational::one());
        let victim = s.boundary().next().unwrap().clone();
        f.insert(victim.clone(), Rational::zero()).unwrap();
        match specialize_search(&RandomFamily, &s, &f, &rat_int(0), &Guards::default()).unwrap() {
            SpecializeOutcome::Found {
                candidate, report, ..
            } => {
                assert!(report.special);
                assert!(!candidate.boundary_set().contains(&victim));
            }
            other => panic!("expected a special sub-candidate, got {other:?}"),
        }
    }

    #[test]
    fn merge_trivial_and_pigeonhole() {
        let a = full_binary(0, 2);
        let seq: Vec<_> = (0..4).map(|_| a.clone()).collect();
        match stabilized_merge(&seq, &[1], 4).unwrap() {
            MergeOutcome::Merged { indices, prefix } => {
                assert_eq!(indices, vec![0, 1, 2, 3]);
                assert_eq!(prefix, a.truncate(1).unwrap());
            }
            other => panic!("{other:?}"),
        }

        // two species alternating: half the count is achievable
        let s = crate::measure::tests::pruned_left();
        let mixed: Vec<_> = (0..6)
            .map(|i| if i % 2 == 0 { a.clone() } else { s.clone() })
            .collect();
        match stabilized_merge(&mixed, &[2], 3).unwrap() {
            MergeOutcome::Merged { indices, .. } => {
                assert_eq!(indices.len(), 3);
                let parity = indices[0] % 2;
                assert!(indices.iter().all(|i| i % 2 == parity));
            }
            other => panic!("{other:?}"),
        }
        match stabilized_merge(&mixed, &[2], 5).unwrap() {
            MergeOutcome::Failure { best_quota, .. } => assert_eq!(best_quota, 3),
            other => panic!("{other:?}"),
        }
        assert!(stabilized_merge(&[], &[1], 1).is_err());
    }

    #[test]
    fn merge_matches_exhaustive_subset_oracle() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let shapes = [full_binary(0, 2), crate::measure::tests::pruned_left()];
        let seq: Vec<FiniteCandidate> = (0..16)
            .map(|_| shapes[rng.gen_range(0..shapes.len())].clone())
            .collect();
        let quota = 3;
        let got = stabilized_merge(&seq, &[1], quota).unwrap();

        // oracle: the largest agreeing index set, by direct comparison
        let mut best = 0usize;
        for i in 0..seq.len() {
            let key = seq[i].truncate(1).unwrap();
            let count = seq
                .iter()
                .filter(|s| s.truncate(1).unwrap() == key)
                .count();
            best = best.max(count);
        }
        match got {
            MergeOutcome::Merged { indices, .. } => {
                assert!(indices.len() >= quota);
                assert_eq!(indices.len(), best);
            }
            MergeOutcome::Failure { best_quota, .. } => {
                assert!(best < quota);
                assert_eq!(best_quota, best);
            }
        }
    }
}
