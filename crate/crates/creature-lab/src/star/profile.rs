//! Parameter profiles for the star family.
//!
//! A profile fixes, per level: the bit width of the letters, the cap table
//! bounding the constraint size by norm deficiency, the extension budget
//! of the functional rows, and the thresholds the splitting and
//! stabilization procedures check. Paper-exact profiles carry the cap
//! table as big integers grown by a certified increment; toy profiles keep
//! everything small enough for exhaustive enumeration.

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::rational::{pow2_neg, Rational};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ProfileMode {
    Toy,
    PaperExact,
}

impl std::fmt::Display for ProfileMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProfileMode::Toy => write!(f, "toy"),
            ProfileMode::PaperExact => write!(f, "paper-exact"),
        }
    }
}

/// Thresholds the star operations check and record. `beta` is the
/// splitting threshold (defaults to 2^(-2^k) at level k),
/// `stabilize_threshold` the stabilization hypothesis floor (defaults to
/// 2^(-budget(k))), `stabilize_gain` the per-round growth factor minus one.
#[derive(Clone, Debug)]
pub struct Thresholds {
    pub beta: Option<Rational>,
    pub stabilize_threshold: Option<Rational>,
    pub stabilize_gain: Rational,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            beta: None,
            stabilize_threshold: None,
            stabilize_gain: Rational::new(1.into(), 8.into()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct StarProfile {
    pub mode: ProfileMode,
    /// letter width per level; a power of two
    pub width: Vec<BigUint>,
    /// cap[k][d]: largest constraint size at level k and norm deficiency d
    pub cap: Vec<Vec<BigUint>>,
    /// row-extension budget per level
    pub budget: Vec<u64>,
    pub thresholds: Thresholds,
    /// paper-exact cap growth certificate, one line per level
    pub increment_certificate: Vec<String>,
}

impl StarProfile {
    pub fn levels(&self) -> usize {
        self.width.len()
    }

    pub fn check_level(&self, k: usize) -> Result<()> {
        if k >= self.levels() {
            return Err(Error::input(format!(
                "level {k} outside the profile (holds {} levels)",
                self.levels()
            )));
        }
        Ok(())
    }

    /// Letter width at level `k` as a machine integer; refuses paper-exact
    /// widths, which are far beyond materialization.
    pub fn toy_width(&self, k: usize) -> Result<u8> {
        self.check_level(k)?;
        u8::try_from(&self.width[k])
            .ok()
            .filter(|w| *w >= 1 && *w <= 32)
            .ok_or_else(|| {
                Error::input(format!(
                    "level-{k} letters have width {}, not materializable",
                    self.width[k]
                ))
            })
    }

    pub fn cap_at(&self, k: usize, deficiency: u64) -> Result<BigUint> {
        self.check_level(k)?;
        let row = &self.cap[k];
        let d = usize::try_from(deficiency).unwrap_or(usize::MAX);
        row.get(d)
            .cloned()
            .ok_or_else(|| Error::input(format!("no cap entry at level {k}, deficiency {deficiency}")))
    }

    pub fn budget_at(&self, k: usize) -> Result<u64> {
        self.check_level(k)?;
        Ok(self.budget[k])
    }

    /// Splitting threshold at level `k`.
    pub fn beta_threshold(&self, k: usize) -> Rational {
        self.thresholds
            .beta
            .clone()
            .unwrap_or_else(|| crate::rational::beta_threshold(k))
    }

    /// Stabilization hypothesis floor at level `k`.
    pub fn stabilize_threshold(&self, k: usize) -> Result<Rational> {
        Ok(self
            .thresholds
            .stabilize_threshold
            .clone()
            .unwrap_or(pow2_neg(self.budget_at(k)?)))
    }

    /// Number of functional rows at level `k` for a constraint of the given
    /// size: extensions by at most the budget many new coordinates.
    pub fn row_count(&self, k: usize, g_len: u64) -> Result<BigUint> {
        let width = BigUint::from(
            u64::try_from(&self.width[k]).map_err(|_| {
                Error::input(format!("width at level {k} too large for row counting"))
            })?,
        );
        let free = &width - BigUint::from(g_len);
        let budget = self.budget_at(k)?;
        let mut total = BigUint::one();
        let mut choose = BigUint::one();
        let free_u64 = u64::try_from(&free).unwrap_or(u64::MAX);
        for j in 1..=budget.min(free_u64) {
            choose = choose * (&free - BigUint::from(j - 1)) / BigUint::from(j);
            total += &choose * BigUint::from(2u8).pow(j as u32);
        }
        Ok(total)
    }
}

/// Builds a toy profile: widths must be powers of two small enough to
/// enumerate, the cap table carries one row per level with entries for
/// every deficiency, budgets bound the row extensions. Records the row
/// counts at empty constraint as a feasibility estimate.
pub fn toy_profile(
    width: Vec<u64>,
    cap: Vec<Vec<u64>>,
    budget: Vec<u64>,
    thresholds: Thresholds,
) -> Result<StarProfile> {
    if width.is_empty() {
        return Err(Error::input("a profile needs at least one level"));
    }
    if cap.len() != width.len() || budget.len() != width.len() {
        return Err(Error::input(
            "width, cap and budget must agree on the number of levels",
        ));
    }
    for (k, &w) in width.iter().enumerate() {
        if w == 0 || !w.is_power_of_two() {
            return Err(Error::input(format!("level-{k} width {w} is not a power of two")));
        }
        if w > 32 {
            return Err(Error::input(format!("level-{k} width {w} exceeds the toy limit 32")));
        }
        if budget[k] > w {
            return Err(Error::input(format!(
                "level-{k} budget {} exceeds the width {w}",
                budget[k]
            )));
        }
        if cap[k].is_empty() {
            return Err(Error::input(format!("level-{k} cap row is empty")));
        }
    }
    let profile = StarProfile {
        mode: ProfileMode::Toy,
        width: width.iter().map(|&w| BigUint::from(w)).collect(),
        cap: cap
            .into_iter()
            .map(|row| row.into_iter().map(BigUint::from).collect())
            .collect(),
        budget,
        thresholds,
        increment_certificate: Vec::new(),
    };
    Ok(profile)
}

/// Convenience toy profile: cap rows filled with the width (no effective
/// cap), default thresholds.
pub fn simple_toy_profile(width: Vec<u64>, budget: Vec<u64>) -> Result<StarProfile> {
    let cap = width
        .iter()
        .map(|&w| vec![w; (width.len() + 1).max(8)])
        .collect();
    toy_profile(width, cap, budget, Thresholds::default())
}

/// The certified cap increment: the growth constraint divides a budget
/// term by log2(1 + 2^-2^(2k+7)); bounding log2(1+x) below by x/2 for
/// 0 < x <= 1 turns it into the integer 2^(2k+8+2^(2k+7)), so adding
/// 2^(2^(k+3)) + 2^(2k+8+2^(2k+7)) + 1 is a sufficient integer increment.
fn paper_increment(k: u64) -> BigUint {
    let a = BigUint::one() << (1u64 << (k + 3));
    let b = BigUint::one() << (2 * k + 8 + (1u64 << (2 * k + 7)));
    a + b + BigUint::one()
}

/// Builds the paper-exact profile up to `k_max`: cap tables start at
/// 2^(k+4) and grow by the certified increment; widths are the least
/// powers of two strictly above the cap at deficiency k+1.
pub fn paper_profile(k_max: u64, guard_k_max: u64) -> Result<StarProfile> {
    if k_max > guard_k_max {
        return Err(Error::guard("paper profile level", k_max, guard_k_max));
    }
    let mut cap = Vec::new();
    let mut width = Vec::new();
    let mut certificate = Vec::new();
    for k in 0..=k_max {
        let mut row = Vec::with_capacity(k as usize + 2);
        row.push(BigUint::one() << (k + 4));
        let inc = paper_increment(k);
        for _ in 0..=k {
            let last = row.last().expect("nonempty").clone();
            row.push(last + &inc);
        }
        // least power of two strictly above the deficiency-(k+1) cap
        let top = row.last().expect("nonempty");
        width.push(BigUint::one() << top.bits());
        certificate.push(format!(
            "level {k}: increment 2^(2^{}) + 2^({}+2^{}) + 1, {} bits",
            k + 3,
            2 * k + 8,
            2 * k + 7,
            inc.bits()
        ));
        cap.push(row);
    }
    Ok(StarProfile {
        mode: ProfileMode::PaperExact,
        width,
        cap,
        budget: (0..=k_max).map(|k| 1u64 << (k + 3)).collect(),
        thresholds: Thresholds {
            beta: None,
            stabilize_threshold: None,
            stabilize_gain: Rational::new(1.into(), 8.into()),
        },
        increment_certificate: certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_base_values() {
        let p = paper_profile(1, 8).unwrap();
        assert_eq!(p.cap[0][0], BigUint::from(16u32));
        assert_eq!(p.cap[1][0], BigUint::from(32u32));
        assert_eq!(p.budget, vec![8, 16]);
    }

    #[test]
    fn widths_are_tight_powers_of_two() {
        let p = paper_profile(3, 8).unwrap();
        for k in 0..=3usize {
            let top = p.cap[k].last().unwrap();
            let w = &p.width[k];
            assert!(w > top, "width must exceed the top cap");
            assert!(w <= &(top * 2u32), "width at most twice the top cap");
            assert_eq!(w.count_ones(), 1, "width is a power of two");
        }
    }

    #[test]
    fn increments_clear_the_budget_term() {
        let p = paper_profile(4, 8).unwrap();
        for k in 0..=4usize {
            for i in 1..p.cap[k].len() {
                let gap = &p.cap[k][i] - &p.cap[k][i - 1];
                assert!(gap > (BigUint::one() << (1u64 << (k as u64 + 3))));
            }
        }
    }

    #[test]
    fn toy_profile_validation() {
        assert!(simple_toy_profile(vec![4], vec![1]).is_ok());
        assert!(simple_toy_profile(vec![3], vec![1]).is_err());
        assert!(simple_toy_profile(vec![4], vec![5]).is_err());
        let two = simple_toy_profile(vec![4, 8], vec![1, 2]).unwrap();
        // row count at level 0, empty constraint: 1 + C(4,1)*2 = 9
        assert_eq!(two.row_count(0, 0).unwrap(), BigUint::from(9u32));
        // level 1, budget 2: 1 + 8*2 + 28*4 = 129
        assert_eq!(two.row_count(1, 0).unwrap(), BigUint::from(129u32));
        assert_eq!(paper_profile(9, 8).unwrap_err().exit_code(), 3);
    }
}
