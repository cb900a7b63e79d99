//! The niceness axioms as decision procedures: structural facts from the
//! min-of-linear representation plus exact spot checks, on one creature of
//! each family.

use creature_lab::axioms::check_axioms;
use creature_lab::guard::Guards;
use creature_lab::node::{Letter, Node, PartialBits};
use creature_lab::random_family::creature_r;
use creature_lab::star::{simple_toy_profile, StarFamily};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> creature_lab::Result<()> {
    let guards = Guards::default();

    let binary = creature_r(
        2,
        Node::new(vec![Letter::Index(0); 2]),
        [Letter::Index(0), Letter::Index(1)].into(),
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let report = check_axioms(&creature_lab::RandomFamily, &binary, 50, &mut rng, &guards)?;
    println!("binary creature at level 2:");
    println!("  rows                 = {}", report.rows);
    println!("  monotone structural  = {}", report.monotone_structural);
    println!("  homogeneous          = {}", report.homogeneous_structural);
    println!("  zero law             = {}", report.zero_law);
    println!("  monotone samples ok  = {}", report.monotone_samples_ok);
    println!("  scaling samples ok   = {}", report.homogeneity_samples_ok);
    println!(
        "  splits feasible      = {}/{}",
        report.split_feasible, report.split_sampled
    );

    let fam = StarFamily::new(simple_toy_profile(vec![2, 4], vec![1, 1])?, guards.clone());
    let p = fam
        .letters_extending(1, &PartialBits::empty())?
        .into_iter()
        .take(4)
        .collect();
    let star = fam.creature(1, Node::new(vec![Letter::word(2, 0)]), 1, PartialBits::empty(), p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let report = check_axioms(&fam, &star, 10, &mut rng, &guards)?;
    println!("star creature at level 1 (width 4, four letters):");
    println!("  rows                 = {}", report.rows);
    println!("  monotone structural  = {}", report.monotone_structural);
    println!("  zero law             = {}", report.zero_law);
    println!(
        "  splits feasible      = {}/{} (star splitting may need larger norms)",
        report.split_feasible, report.split_sampled
    );
    Ok(())
}
