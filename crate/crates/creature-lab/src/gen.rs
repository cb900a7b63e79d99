//! Deterministic sample generators for tests, fuzz suites and examples.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::candidate::FiniteCandidate;
use crate::creature::{Creature, Valuation};
use crate::error::Result;
use crate::node::{Letter, Node, PartialBits};
use crate::random_family::creature_r;
use crate::rational::{rat, Rational};
use crate::star::StarFamily;

pub fn rand_unit(rng: &mut ChaCha8Rng, max_den: u64) -> Rational {
    let den = rng.gen_range(1..=max_den);
    let num = rng.gen_range(0..=den);
    rat(num as i64, den as i64)
}

/// The full binary candidate between the given levels.
pub fn full_binary_candidate(root_level: usize, height: usize) -> FiniteCandidate {
    let both: BTreeSet<Letter> = [Letter::Index(0), Letter::Index(1)].into_iter().collect();
    let root = Node::new(vec![Letter::Index(0); root_level]);
    let mut creatures = Vec::new();
    let mut frontier = vec![root.clone()];
    for level in root_level..height {
        let mut next = Vec::new();
        for n in &frontier {
            creatures.push(creature_r(level, n.clone(), both.clone()).expect("valid"));
            next.push(n.child(Letter::Index(0)));
            next.push(n.child(Letter::Index(1)));
        }
        frontier = next;
    }
    FiniteCandidate::from_creatures(root, height, creatures).expect("valid")
}

/// A random binary-family candidate: every internal node keeps a random
/// nonempty subset of the two letters.
pub fn rand_random_candidate(
    rng: &mut ChaCha8Rng,
    root_level: usize,
    height: usize,
) -> FiniteCandidate {
    let root = Node::new(vec![Letter::Index(0); root_level]);
    let mut creatures = Vec::new();
    let mut frontier = vec![root.clone()];
    for level in root_level..height {
        let mut next = Vec::new();
        for n in &frontier {
            let p: BTreeSet<Letter> = match rng.gen_range(0..3) {
                0 => [Letter::Index(0)].into(),
                1 => [Letter::Index(1)].into(),
                _ => [Letter::Index(0), Letter::Index(1)].into(),
            };
            let c = creature_r(level, n.clone(), p).expect("valid");
            next.extend(c.pos());
            creatures.push(c);
        }
        frontier = next;
    }
    FiniteCandidate::from_creatures(root, height, creatures).expect("valid")
}

/// A random star candidate over the family's profile: at each internal
/// node a random small constraint and a random retained set of at most
/// `max_pos` letters.
pub fn rand_star_candidate(
    fam: &StarFamily,
    rng: &mut ChaCha8Rng,
    root_level: usize,
    height: usize,
    max_pos: usize,
) -> Result<FiniteCandidate> {
    let mut root_letters = Vec::new();
    for level in 0..root_level {
        let width = fam.profile.toy_width(level)?;
        let bits = rng.gen_range(0..(1u32 << width));
        root_letters.push(Letter::word(width, bits));
    }
    let root = Node::new(root_letters);
    let mut creatures: Vec<Creature> = Vec::new();
    let mut frontier = vec![root.clone()];
    for level in root_level..height {
        let width = fam.profile.toy_width(level)?;
        let mut next = Vec::new();
        for n in &frontier {
            let g = if rng.gen_bool(0.5) {
                PartialBits::empty()
            } else {
                PartialBits::new(vec![(rng.gen_range(0..width), rng.gen_bool(0.5))])
                    .expect("single pair")
            };
            let ext = fam.letters_extending(level, &g)?;
            let keep = rng.gen_range(1..=max_pos.min(ext.len()));
            let mut pool = ext;
            let mut p = BTreeSet::new();
            for _ in 0..keep {
                let i = rng.gen_range(0..pool.len());
                p.insert(pool.swap_remove(i));
            }
            let norm = rng.gen_range(0..=level as u64);
            let c = fam.creature(level, n.clone(), norm, g, p)?;
            next.extend(c.pos());
            creatures.push(c);
        }
        frontier = next;
    }
    FiniteCandidate::from_creatures(root, height, creatures)
}

/// A random boundary valuation with the given denominator bound.
pub fn rand_valuation(rng: &mut ChaCha8Rng, s: &FiniteCandidate, max_den: u64) -> Valuation {
    s.boundary()
        .map(|n| (n.clone(), rand_unit(rng, max_den)))
        .collect()
}

/// Enumerates every binary-family candidate shape between the two levels:
/// each internal node independently keeps one of the three nonempty letter
/// subsets.
pub fn all_random_candidates(root_level: usize, height: usize) -> Vec<FiniteCandidate> {
    let root = Node::new(vec![Letter::Index(0); root_level]);
    let subsets: [BTreeSet<Letter>; 3] = [
        [Letter::Index(0)].into(),
        [Letter::Index(1)].into(),
        [Letter::Index(0), Letter::Index(1)].into(),
    ];
    // grow candidate prefixes level by level, splitting on each node's
    // retained subset
    let mut partial: Vec<(Vec<Creature>, Vec<Node>)> = vec![(Vec::new(), vec![root.clone()])];
    for level in root_level..height {
        let mut next = Vec::new();
        for (creatures, frontier) in partial {
            // choice vector: one subset index per frontier node
            let n = frontier.len();
            let mut counter = vec![0usize; n];
            loop {
                let mut cs = creatures.clone();
                let mut fr = Vec::new();
                for (node, &choice) in frontier.iter().zip(&counter) {
                    let c = creature_r(level, node.clone(), subsets[choice].clone())
                        .expect("valid");
                    fr.extend(c.pos());
                    cs.push(c);
                }
                next.push((cs, fr));
                // odometer increment
                let mut i = 0;
                loop {
                    if i == n {
                        break;
                    }
                    counter[i] += 1;
                    if counter[i] < subsets.len() {
                        break;
                    }
                    counter[i] = 0;
                    i += 1;
                }
                if i == n {
                    break;
                }
            }
        }
        partial = next;
    }
    partial
        .into_iter()
        .map(|(creatures, _)| {
            FiniteCandidate::from_creatures(root.clone(), height, creatures).expect("valid")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn shape_counts_match_the_recurrence() {
        // t(0) = 1, t(h+1) = 2 t(h) + t(h)^2
        assert_eq!(all_random_candidates(0, 0).len(), 1);
        assert_eq!(all_random_candidates(0, 1).len(), 3);
        assert_eq!(all_random_candidates(0, 2).len(), 15);
        assert_eq!(all_random_candidates(0, 3).len(), 255);
    }

    #[test]
    fn random_candidates_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let s = rand_random_candidate(&mut rng, 1, 4);
            let report =
                crate::candidate::validate_candidate(&crate::random_family::RandomFamily, &s);
            assert!(report.ok());
        }
    }
}
