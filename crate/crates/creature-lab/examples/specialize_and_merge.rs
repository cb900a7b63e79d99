//! Search utilities: locate a high-measure node, specialize a candidate
//! by pruning below the double-exponential floors, and stabilize a
//! sequence of candidates by the pigeonhole.

use creature_lab::creature::Valuation;
use creature_lab::gen::full_binary_candidate;
use creature_lab::guard::Guards;
use creature_lab::measure::{classify_candidate, find_large_node};
use creature_lab::random_family::RandomFamily;
use creature_lab::rational::{fmt_rat, rat, rat_int, Rational};
use creature_lab::search::{specialize_search, stabilized_merge, MergeOutcome, SpecializeOutcome};
use num_traits::{One, Zero};

fn main() -> creature_lab::Result<()> {
    let s = full_binary_candidate(2, 4);
    let mut f = Valuation::constant(s.boundary(), Rational::one());
    let victim = s.boundary().next().unwrap().clone();
    f.insert(victim.clone(), Rational::zero())?;

    let hit = find_large_node(&RandomFamily, &s, &f, &rat(1, 8))?;
    match hit {
        Some((node, value)) => println!("large node: {node} at {}", fmt_rat(&value)),
        None => println!("large node: none at this scale"),
    }

    let before = classify_candidate(&RandomFamily, &s, &f)?;
    println!("full tree special = {} (dead leaf {victim})", before.special);
    match specialize_search(&RandomFamily, &s, &f, &rat_int(0), &Guards::default())? {
        SpecializeOutcome::Found { candidate, report, .. } => {
            println!(
                "specialized: {} boundary nodes, special = {}, dead leaf kept = {}",
                candidate.boundary_set().len(),
                report.special,
                candidate.boundary_set().contains(&victim)
            );
        }
        SpecializeOutcome::Exhausted { space, explored } => {
            println!("exhausted a space of {space} after {explored} assemblies");
        }
    }

    // two shapes alternating: the pigeonhole finds the majority species
    let a = full_binary_candidate(0, 2);
    let b = {
        let t = a.truncate(1)?;
        // grow the truncation back to height 2 along letter zero only
        let mut creatures: Vec<_> = t.creatures().values().cloned().collect();
        for node in t.boundary() {
            creatures.push(creature_lab::random_family::creature_r(
                1,
                node.clone(),
                [creature_lab::node::Letter::Index(0)].into(),
            )?);
        }
        creature_lab::candidate::FiniteCandidate::from_creatures(
            t.root().clone(),
            2,
            creatures,
        )?
    };
    let seq: Vec<_> = (0..9)
        .map(|i| if i % 3 == 0 { b.clone() } else { a.clone() })
        .collect();
    match stabilized_merge(&seq, &[1, 2], 5)? {
        MergeOutcome::Merged { indices, prefix } => {
            println!("merged {} candidates agreeing below level 2", indices.len());
            println!("  indices = {indices:?}");
            println!("  common prefix holds {} nodes", prefix.nodes().len());
        }
        MergeOutcome::Failure { best_quota, .. } => {
            println!("quota unreachable; best agreeing set has {best_quota}");
        }
    }
    Ok(())
}
