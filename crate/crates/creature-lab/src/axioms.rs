//! The niceness axioms as decision procedures on a single creature.
//!
//! Monotonicity, positive homogeneity and the two continuity clauses are
//! consequences of the min-of-linear representation: nonnegative
//! coefficients give monotonicity, linearity of each row gives exact
//! homogeneity, and a finite minimum of continuous functions is
//! continuous. The procedures decide the structural facts and spot-check
//! the equalities with exact arithmetic at zero tolerance; the splitting
//! axiom is exercised through the split decision on sampled admissible
//! triples.

use num_traits::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::creature::{Creature, Valuation};
use crate::error::Result;
use crate::family::MeasuredFamily;
use crate::guard::Guards;
use crate::rational::{rat, Rational};
use crate::split::beta_split;

#[derive(Clone, Debug)]
pub struct AxiomReport {
    pub rows: usize,
    /// at least one row, every coefficient nonnegative
    pub monotone_structural: bool,
    /// min-of-linear rows scale exactly; recorded structurally
    pub homogeneous_structural: bool,
    /// finite minima of linear rows are continuous both ways
    pub continuous_structural: bool,
    /// evaluation at the zero valuation
    pub zero_law: bool,
    pub samples: u64,
    pub monotone_samples_ok: bool,
    pub homogeneity_samples_ok: bool,
    /// splitting feasibility over the sampled admissible triples
    pub split_feasible: u64,
    pub split_sampled: u64,
}

impl AxiomReport {
    pub fn all_hold(&self) -> bool {
        self.monotone_structural
            && self.homogeneous_structural
            && self.continuous_structural
            && self.zero_law
            && self.monotone_samples_ok
            && self.homogeneity_samples_ok
            && self.split_feasible == self.split_sampled
    }
}

pub fn rand_unit(rng: &mut ChaCha8Rng, max_den: u64) -> Rational {
    let den = rng.gen_range(1..=max_den);
    let num = rng.gen_range(0..=den);
    rat(num as i64, den as i64)
}

/// Runs the axiom decision procedures on `t` with `samples` seeded random
/// valuations.
pub fn check_axioms(
    family: &dyn MeasuredFamily,
    t: &Creature,
    samples: u64,
    rng: &mut ChaCha8Rng,
    guards: &Guards,
) -> Result<AxiomReport> {
    let rows = family.functionals(t)?;
    let monotone_structural = rows.coefficients_nonnegative();
    let pos = t.pos();

    let zero_law = family.eval(t, &Valuation::new())?.is_zero();

    let mut monotone_ok = true;
    let mut homogeneity_ok = true;
    let mut split_feasible = 0u64;
    let mut split_sampled = 0u64;
    for _ in 0..samples {
        let low: Valuation = pos
            .iter()
            .map(|nu| (nu.clone(), rand_unit(rng, 8)))
            .collect();
        let high: Valuation = pos
            .iter()
            .map(|nu| {
                let base = low.get_or_zero(nu);
                let slack = rand_unit(rng, 8) * (Rational::from_integer(1.into()) - base.clone());
                (nu.clone(), base + slack)
            })
            .collect();
        if family.eval(t, &low)? > family.eval(t, &high)? {
            monotone_ok = false;
        }
        let b = rand_unit(rng, 8);
        let scaled: Valuation = low
            .iter()
            .map(|(nu, v)| (nu.clone(), b.clone() * v.clone()))
            .collect();
        if family.eval(t, &scaled)? != b.clone() * family.eval(t, &low)? {
            homogeneity_ok = false;
        }

        // an admissible triple: split each value in two, then top the
        // second side up by a random slack
        let r0: Valuation = pos
            .iter()
            .map(|nu| {
                let share = rand_unit(rng, 4);
                (nu.clone(), share * low.get_or_zero(nu))
            })
            .collect();
        let r1: Valuation = pos
            .iter()
            .map(|nu| {
                let rest = low.get_or_zero(nu) - r0.get_or_zero(nu);
                let slack = rand_unit(rng, 4) * (Rational::from_integer(1.into()) - rest.clone());
                (nu.clone(), rest + slack)
            })
            .collect();
        let theta = crate::rational::beta_threshold(t.level);
        let report = beta_split(
            family,
            t,
            &low,
            &r0,
            &r1,
            &theta,
            &Rational::from_integer(1.into()),
            guards,
        )?;
        split_sampled += 1;
        if report.feasible {
            split_feasible += 1;
        }
    }

    Ok(AxiomReport {
        rows: rows.row_count(),
        monotone_structural,
        homogeneous_structural: monotone_structural,
        continuous_structural: monotone_structural,
        zero_law,
        samples,
        monotone_samples_ok: monotone_ok,
        homogeneity_samples_ok: homogeneity_ok,
        split_feasible,
        split_sampled,
    })
}
