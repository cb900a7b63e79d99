//! The splitting decision: cover a (1 - theta) fraction of a creature's
//! value by compositions living on the two sides of a decomposition.

use creature_lab::creature::Valuation;
use creature_lab::guard::Guards;
use creature_lab::node::{Letter, Node};
use creature_lab::random_family::{creature_r, RandomFamily};
use creature_lab::rational::{fmt_rat, rat, Rational};
use creature_lab::split::beta_split;
use num_traits::One;

fn main() -> creature_lab::Result<()> {
    let t = creature_r(
        2,
        Node::new(vec![Letter::Index(0); 2]),
        [Letter::Index(0), Letter::Index(1)].into(),
    )?;
    let pos = t.pos();
    let r = Valuation::constant(pos.iter(), Rational::one());
    let r0 = Valuation::from_entries(vec![(pos[0].clone(), Rational::one())])?;
    let r1 = Valuation::from_entries(vec![(pos[1].clone(), Rational::one())])?;

    let report = beta_split(
        &RandomFamily,
        &t,
        &r,
        &r0,
        &r1,
        &rat(1, 16),
        &Rational::one(),
        &Guards::default(),
    )?;
    println!("value F(r)        = {}", fmt_rat(&report.value));
    println!("target (1-θ)F(r)  = {}", fmt_rat(&report.target));
    println!(
        "side maxima       = {} and {}",
        report.max0.as_ref().map(fmt_rat).unwrap_or_else(|| "none".into()),
        report.max1.as_ref().map(fmt_rat).unwrap_or_else(|| "none".into()),
    );
    println!("feasible          = {}", report.feasible);
    let w = report.witness.expect("feasible instance");
    println!("witness c0        = {}", fmt_rat(&w.c0));
    println!("witness c1        = {}", fmt_rat(&w.c1));
    println!(
        "side creatures    = {:?} / {:?}",
        w.s0.map(|s| s.letters().iter().map(|l| l.to_string()).collect::<Vec<_>>()),
        w.s1.map(|s| s.letters().iter().map(|l| l.to_string()).collect::<Vec<_>>()),
    );
    Ok(())
}
