//! Seeded randomized property suites with shrinking counterexamples.
//!
//! Each suite draws instances from a deterministic generator, checks one
//! exact property, and on failure shrinks the instance (smaller trees,
//! simpler valuations) while the failure persists, reporting the smallest
//! failing instance as JSON. Runs are deterministic for a fixed seed.

use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::candidate::FiniteCandidate;
use crate::creature::Valuation;
use crate::error::{Error, Result};
use crate::family::MeasuredFamily;
use crate::gen::{rand_random_candidate, rand_star_candidate, rand_unit, rand_valuation};
use crate::guard::Guards;
use crate::json::{candidate_to_doc, valuation_to_doc};
use crate::measure::{check_semi_measure, front_value, mval, SemiMeasureVerdict};
use crate::random_family::{dyadic_oracle, RandomFamily};
use crate::rational::{beta_threshold, Rational};
use crate::report::Report;
use crate::split::beta_split;
use crate::star::{simple_toy_profile, StarFamily};

pub const SUITES: &[&str] = &[
    "monotone",
    "scaling",
    "fronts",
    "semimeasure",
    "oracle-random",
    "sigma-transitivity",
    "beta-random",
];

struct Instance {
    family_star: bool,
    candidate: FiniteCandidate,
    valuation: Valuation,
}

fn star_family(guards: &Guards) -> StarFamily {
    StarFamily::new(
        simple_toy_profile(vec![2, 2, 2, 2], vec![1, 1, 1, 1]).expect("valid toy profile"),
        guards.clone(),
    )
}

fn draw_instance(rng: &mut ChaCha8Rng, star: &StarFamily, both_families: bool) -> Instance {
    let family_star = both_families && rng.gen_bool(0.5);
    let root_level = rng.gen_range(0..2);
    let height = root_level + rng.gen_range(1..3);
    let candidate = if family_star {
        rand_star_candidate(star, rng, root_level, height, 3).expect("valid star candidate")
    } else {
        rand_random_candidate(rng, root_level, height)
    };
    let valuation = rand_valuation(rng, &candidate, 8);
    Instance {
        family_star,
        candidate,
        valuation,
    }
}

/// The property each suite decides; true means the instance passes.
fn run_property(
    suite: &str,
    inst: &Instance,
    rng: &mut ChaCha8Rng,
    star: &StarFamily,
    guards: &Guards,
) -> Result<bool> {
    let family: &dyn MeasuredFamily = if inst.family_star { star } else { &RandomFamily };
    let s = &inst.candidate;
    let f = &inst.valuation;
    match suite {
        "monotone" => {
            let higher: Valuation = f
                .iter()
                .map(|(n, v)| {
                    let slack = rand_unit(rng, 8) * (Rational::one() - v.clone());
                    (n.clone(), v.clone() + slack)
                })
                .collect();
            let low = mval(family, s, f)?;
            let high = mval(family, s, &higher)?;
            let ok = low.iter().all(|(n, v)| v <= high.get(n).expect("same tree"));
            Ok(ok)
        }
        "scaling" => {
            let b = rand_unit(rng, 8);
            let scaled: Valuation = f
                .iter()
                .map(|(n, v)| (n.clone(), b.clone() * v.clone()))
                .collect();
            let base = mval(family, s, f)?;
            let scaled_m = mval(family, s, &scaled)?;
            let ok = base
                .iter()
                .all(|(n, v)| scaled_m.get(n).expect("same tree") == &(b.clone() * v.clone()));
            Ok(ok)
        }
        "fronts" => {
            let mut prev = Rational::one();
            for level in s.root().len()..=s.height() {
                let value = front_value(family, s, level)?;
                if value > prev {
                    return Ok(false);
                }
                prev = value;
            }
            Ok(true)
        }
        "semimeasure" => {
            let m = mval(family, s, f)?;
            if check_semi_measure(family, s, m.entries())?.verdict != SemiMeasureVerdict::Exact {
                return Ok(false);
            }
            // lower by factors nonincreasing toward the root: the lowered
            // map stays a semi-measure dominated by the exact one
            let mut factors: std::collections::BTreeMap<crate::node::Node, Rational> =
                std::collections::BTreeMap::new();
            let mut nodes: Vec<_> = s.nodes().iter().cloned().collect();
            nodes.sort_by_key(|n| std::cmp::Reverse(n.len()));
            for n in &nodes {
                let own = rand_unit(rng, 4);
                let child_min = s
                    .successors(n)
                    .iter()
                    .map(|c| factors[c].clone())
                    .min()
                    .unwrap_or_else(Rational::one);
                factors.insert(n.clone(), own.min(child_min));
            }
            let lowered: std::collections::BTreeMap<crate::node::Node, Rational> = m
                .iter()
                .map(|(n, v)| (n.clone(), factors[n].clone() * v.clone()))
                .collect();
            let verdict = check_semi_measure(family, s, &lowered)?.verdict;
            if verdict == SemiMeasureVerdict::Neither {
                return Ok(false);
            }
            Ok(lowered.iter().all(|(n, v)| v <= m.get(n).expect("same tree")))
        }
        "oracle-random" => {
            if inst.family_star {
                return Ok(true);
            }
            let m = mval(family, s, f)?;
            Ok(m.root_value() == &dyadic_oracle(s, f)?)
        }
        "sigma-transitivity" => {
            let node = s.internal().next().cloned();
            let Some(node) = node else { return Ok(true) };
            let t = s.creature_at(&node).expect("internal").clone();
            for sub in family.sigma(&t)? {
                for subsub in family.sigma(&sub)? {
                    if !family.sigma_contains(&t, &subsub)? {
                        return Ok(false);
                    }
                }
                if !family.sigma_contains(&t, &sub)? {
                    return Ok(false);
                }
            }
            Ok(family.sigma_contains(&t, &t)?)
        }
        "beta-random" => {
            if inst.family_star {
                return Ok(true);
            }
            let node = s.internal().next().cloned();
            let Some(node) = node else { return Ok(true) };
            let t = s.creature_at(&node).expect("internal").clone();
            let pos = t.pos();
            let r: Valuation = pos
                .iter()
                .map(|nu| (nu.clone(), rand_unit(rng, 8)))
                .collect();
            let r0: Valuation = pos
                .iter()
                .map(|nu| (nu.clone(), rand_unit(rng, 4) * r.get_or_zero(nu)))
                .collect();
            let r1: Valuation = pos
                .iter()
                .map(|nu| (nu.clone(), r.get_or_zero(nu) - r0.get_or_zero(nu)))
                .collect();
            let theta = beta_threshold(t.level);
            let report = beta_split(family, &t, &r, &r0, &r1, &theta, &Rational::zero(), guards)?;
            Ok(report.feasible)
        }
        other => Err(Error::input(format!("unknown suite {other:?}"))),
    }
}

fn shrink(
    suite: &str,
    inst: Instance,
    prop_seed: u64,
    star: &StarFamily,
    guards: &Guards,
) -> Instance {
    let still_fails = |cand: &Instance| {
        let mut rng = ChaCha8Rng::seed_from_u64(prop_seed);
        matches!(run_property(suite, cand, &mut rng, star, guards), Ok(false))
    };
    let mut best = inst;
    // zeroing boundary entries and truncating the tree preserve failure
    // often enough to be worth trying; keep any simpler failing variant
    loop {
        let mut improved = false;
        let boundary: Vec<_> = best.candidate.boundary().cloned().collect();
        for node in boundary {
            if best.valuation.get_or_zero(&node).is_zero() {
                continue;
            }
            let mut v = best.valuation.clone();
            let _ = v.insert(node.clone(), Rational::zero());
            let cand = Instance {
                family_star: best.family_star,
                candidate: best.candidate.clone(),
                valuation: v,
            };
            if still_fails(&cand) {
                best = cand;
                improved = true;
                break;
            }
        }
        if best.candidate.height() > best.candidate.root().len() + 1 {
            if let Ok(cut) = best.candidate.truncate(best.candidate.height() - 1) {
                let v = Valuation::constant(cut.boundary(), Rational::zero());
                let cand = Instance {
                    family_star: best.family_star,
                    candidate: cut,
                    valuation: v,
                };
                if still_fails(&cand) {
                    best = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            return best;
        }
    }
}

/// Runs a named suite for `count` seeded instances; deterministic for a
/// fixed seed. Failures shrink and land in the report as JSON.
pub fn fuzz_suite(suite: &str, seed: u64, count: u64, guards: &Guards) -> Result<Report> {
    if !SUITES.contains(&suite) {
        return Err(Error::input(format!(
            "unknown suite {suite:?}; available: {}",
            SUITES.join(", ")
        )));
    }
    let star = star_family(guards);
    let both = matches!(
        suite,
        "monotone" | "scaling" | "fronts" | "semimeasure" | "sigma-transitivity"
    );
    let mut report = Report::new(&format!("fuzz {suite}"));
    report.value("suite", suite);
    report.value("seed", seed);
    report.value("count", count);
    let mut failures = 0u64;
    for case in 0..count {
        // independent streams for instance generation and property draws,
        // so shrinking replays the property deterministically
        let gen_seed = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(case);
        let prop_seed = gen_seed.wrapping_add(0x5851f42d4c957f2d);
        let mut gen_rng = ChaCha8Rng::seed_from_u64(gen_seed);
        let inst = draw_instance(&mut gen_rng, &star, both);
        let mut prop_rng = ChaCha8Rng::seed_from_u64(prop_seed);
        let pass = run_property(suite, &inst, &mut prop_rng, &star, guards)?;
        if !pass {
            failures += 1;
            let small = shrink(suite, inst, prop_seed, &star, guards);
            report.certificate(
                &format!("counterexample_{case}"),
                serde_json::json!({
                    "family": if small.family_star { "star" } else { "random" },
                    "candidate": candidate_to_doc(&small.candidate),
                    "valuation": valuation_to_doc(&small.valuation),
                }),
            );
            if failures >= 3 {
                break;
            }
        }
    }
    report.value("failures", failures);
    report.set_verdict(failures == 0);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass_briefly() {
        let guards = Guards::default();
        for suite in SUITES {
            let report = fuzz_suite(suite, 1, 25, &guards).unwrap();
            assert_eq!(report.exit_code(), 0, "suite {suite} failed: {report:?}");
        }
        assert!(fuzz_suite("nope", 1, 1, &guards).is_err());
    }

    #[test]
    fn identical_seeds_render_identically() {
        let guards = Guards::default();
        let a = fuzz_suite("monotone", 42, 30, &guards).unwrap();
        let b = fuzz_suite("monotone", 42, 30, &guards).unwrap();
        assert_eq!(
            a.render(crate::report::Format::Json),
            b.render(crate::report::Format::Json)
        );
    }
}
