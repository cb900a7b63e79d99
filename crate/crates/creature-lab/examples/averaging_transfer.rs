//! Averaging transfer: bound the average of per-index best composition
//! values from below by the creature's own value, in the plain and the
//! bit-pinned modes, and compare the averaging function against the
//! single-row normalized sum that dominates it.

use std::collections::BTreeMap;

use creature_lab::creature::Valuation;
use creature_lab::guard::Guards;
use creature_lab::node::{Letter, Node, PartialBits};
use creature_lab::rational::{fmt_rat, rat, Rational};
use creature_lab::star::transfer::{TransferInstance, TransferMode};
use creature_lab::star::{simple_toy_profile, StarFamily};
use creature_lab::MeasuredFamily;
use num_traits::One;

fn main() -> creature_lab::Result<()> {
    let fam = StarFamily::new(simple_toy_profile(vec![2, 4], vec![1, 1])?, Guards::default());
    // four letters hitting both bits of every coordinate, so no row of the
    // averaging function vanishes
    let p = ["0000", "0111", "1011", "1100"]
        .into_iter()
        .map(Letter::parse_word)
        .collect::<creature_lab::Result<_>>()?;
    let t = fam.creature(1, Node::new(vec![Letter::word(2, 0)]), 1, PartialBits::empty(), p)?;
    let r = Valuation::constant(t.pos().iter(), rat(1, 2));

    let aux = fam.auxiliary_average(&t)?;
    println!("value F(r)            = {}", fmt_rat(&fam.eval(&t, &r)?));
    println!("normalized-sum bound  = {}", fmt_rat(&aux.eval(&r)));

    // plain mode: two indices; bit-split mode: one base index crossed
    // with the four letter coordinates, base-major
    for (mode, y_size, per_node) in [
        (TransferMode::Plain, 2usize, vec![rat(1, 2), rat(3, 4)]),
        (
            TransferMode::BitSplit,
            1,
            vec![rat(1, 2), rat(3, 4), rat(1, 2), rat(3, 4)],
        ),
    ] {
        let u: BTreeMap<Node, Vec<Rational>> = t
            .pos()
            .into_iter()
            .map(|nu| (nu, per_node.clone()))
            .collect();
        let inst = TransferInstance {
            creature: t.clone(),
            r: r.clone(),
            gamma: rat(7, 8),
            y_size,
            u,
        };
        let report = fam.transfer_bound(&inst, mode, &Rational::one())?;
        println!("{mode:?}:");
        println!("  lhs γ·a·(1-2^-2^k) = {}", fmt_rat(&report.lhs));
        println!("  rhs average        = {}", fmt_rat(&report.rhs));
        println!("  bound holds        = {}", report.holds);
        println!("  compositions seen  = {}", report.inspected);
    }
    Ok(())
}
