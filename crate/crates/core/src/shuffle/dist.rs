//! Probability distributions on a group, total variation distance, and the
//! exact single-card law of the shuffles.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::group::{Element, Group};

/// Probability weights: exact rationals or floats.
pub trait Weight: Clone + PartialOrd + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn ratio(num: u64, den: u64) -> Self;
    fn add(&self, other: &Self) -> Self;
    /// `|self − other|`.
    fn distance(&self, other: &Self) -> Self;
    fn half(&self) -> Self;
    fn to_f64(&self) -> f64;
    /// `p/q` rendering for exact weights.
    fn exact_string(&self) -> Option<String>;
    fn sums_to_one(total: &Self) -> bool;
}

impl Weight for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn ratio(num: u64, den: u64) -> Self {
        BigRational::new(num.into(), den.into())
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn distance(&self, other: &Self) -> Self {
        (self - other).abs()
    }
    fn half(&self) -> Self {
        self / BigInt::from(2)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn exact_string(&self) -> Option<String> {
        Some(format!("{}/{}", self.numer(), self.denom()))
    }
    fn sums_to_one(total: &Self) -> bool {
        total.is_one()
    }
}

impl Weight for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn distance(&self, other: &Self) -> Self {
        (self - other).abs()
    }
    fn half(&self) -> Self {
        self / 2.0
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn exact_string(&self) -> Option<String> {
        None
    }
    fn sums_to_one(total: &Self) -> bool {
        (total - 1.0).abs() <= 1e-12
    }
}

/// A distribution on a group, indexed canonically.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution<W = BigRational> {
    group: Group,
    probs: Vec<W>,
}

impl<W: Weight> Distribution<W> {
    pub fn new(group: Group, probs: Vec<W>) -> Result<Self> {
        if probs.len() as u64 != group.order() {
            return Err(Error::Domain(format!(
                "distribution on {group} needs {} entries, got {}",
                group.order(),
                probs.len()
            )));
        }
        if probs.iter().any(|p| *p < W::zero()) {
            return Err(Error::Domain("negative probability".into()));
        }
        let total = probs.iter().fold(W::zero(), |acc, p| acc.add(p));
        if !W::sums_to_one(&total) {
            return Err(Error::Domain(format!("probabilities sum to {total:?}")));
        }
        Ok(Distribution { group, probs })
    }

    pub fn point_mass(x: &Element) -> Result<Self> {
        let group = x.group().clone();
        let mut probs = vec![W::zero(); to_len(&group)?];
        probs[x.index() as usize] = W::one();
        Ok(Distribution { group, probs })
    }

    pub fn uniform(group: &Group) -> Result<Self> {
        let n = to_len(group)?;
        Ok(Distribution {
            group: group.clone(),
            probs: vec![W::ratio(1, n as u64); n],
        })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn probs(&self) -> &[W] {
        &self.probs
    }

    pub fn prob(&self, x: &Element) -> Result<&W> {
        self.group.check(x)?;
        Ok(&self.probs[x.index() as usize])
    }

    /// Rows `index,decimal,p/q` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,probability,exact\n");
        for (i, p) in self.probs.iter().enumerate() {
            let exact = p.exact_string().unwrap_or_default();
            let _ = writeln!(out, "{i},{},{exact}", p.to_f64());
        }
        out
    }
}

fn to_len(group: &Group) -> Result<usize> {
    group.enumerate_with_cap(crate::group::DEFAULT_ENUMERATION_CAP)?;
    Ok(group.order() as usize)
}

/// `½ Σ |μ(x) − ν(x)|`.
pub fn tvd<W: Weight>(mu: &Distribution<W>, nu: &Distribution<W>) -> Result<W> {
    if mu.group != nu.group {
        return Err(Error::GroupMismatch {
            expected: mu.group.to_string(),
            found: nu.group.to_string(),
        });
    }
    let sum = mu
        .probs
        .iter()
        .zip(&nu.probs)
        .fold(W::zero(), |acc, (a, b)| acc.add(&a.distance(b)));
    Ok(sum.half())
}

/// Propagates a single card through `r` rounds, where one round moves a
/// card at `x` to each `y` with integer weight `weights(x)` summing to
/// `2|G|`. Returns the exact law.
fn single_card<F>(group: &Group, rounds: u32, x0: &Element, mut step: F) -> Result<Distribution>
where
    F: FnMut(&Element, &mut [u64]) -> Result<()>,
{
    group.check(x0)?;
    let all = group.enumerate()?;
    let n = all.len();
    // transition counts, row x -> column y
    let mut matrix = vec![0u64; n * n];
    for x in &all {
        let row = &mut matrix[x.index() as usize * n..][..n];
        step(x, row)?;
        debug_assert_eq!(row.iter().sum::<u64>(), 2 * n as u64);
    }
    let mut current = vec![BigInt::zero(); n];
    current[x0.index() as usize] = BigInt::one();
    for _ in 0..rounds {
        let mut next = vec![BigInt::zero(); n];
        for (x, mass) in current.iter().enumerate() {
            if mass.is_zero() {
                continue;
            }
            for (y, &w) in matrix[x * n..][..n].iter().enumerate() {
                if w != 0 {
                    next[y] += mass * w;
                }
            }
        }
        current = next;
    }
    let denom = BigInt::from(2 * n as u64).pow(rounds);
    let probs = current
        .into_iter()
        .map(|num| BigRational::new(num, denom.clone()))
        .collect();
    Distribution::new(group.clone(), probs)
}

/// Exact law of a card's position after `r` Scoot-or-Not rounds with
/// uniform key `k_i` and uniform bit `b_i`: each `(k, b)` pair has weight 1,
/// with `b = 0` leaving the card and `b = 1` moving it to `k·x`.
pub fn sc_single_card_distribution(
    group: &Group,
    rounds: u32,
    x0: &Element,
) -> Result<Distribution> {
    let keys = group.enumerate()?;
    single_card(group, rounds, x0, |x, row| {
        for k in &keys {
            row[x.index() as usize] += 1;
            row[k.op(x)?.index() as usize] += 1;
        }
        Ok(())
    })
}

/// Exact single-card law of Swap-or-Not with uniform `K_i` and a uniform
/// decision bit for the card's pair.
pub fn sn_single_card_distribution(
    group: &Group,
    rounds: u32,
    x0: &Element,
) -> Result<Distribution> {
    if !group.is_abelian() {
        return Err(Error::NonAbelian(group.to_string()));
    }
    let keys = group.enumerate()?;
    single_card(group, rounds, x0, |x, row| {
        for k in &keys {
            let partner = k.op(&x.inv())?;
            row[x.index() as usize] += 1;
            row[partner.index() as usize] += 1;
        }
        Ok(())
    })
}

/// `2^{-r}(1 − 1/N)`, the single-card distance from uniform for both
/// shuffles.
pub fn single_card_tvd_closed_form(order: u64, rounds: u32) -> BigRational {
    let n = BigInt::from(order);
    BigRational::new(&n - 1, n * BigInt::from(2).pow(rounds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::ConstantBit;
    use crate::shuffle::sc_round;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn zmod(n: u64) -> Group {
        Group::cyclic(n).unwrap()
    }

    #[test]
    fn tvd_basics() {
        let g = zmod(5);
        let u: Distribution = Distribution::uniform(&g).unwrap();
        let p: Distribution = Distribution::point_mass(&g.element(2).unwrap()).unwrap();
        let p2: Distribution = Distribution::point_mass(&g.element(3).unwrap()).unwrap();
        assert_eq!(tvd(&u, &u).unwrap(), q(0, 1));
        assert_eq!(tvd(&p, &u).unwrap(), q(4, 5));
        assert_eq!(tvd(&u, &p).unwrap(), q(4, 5));
        assert_eq!(tvd(&p, &p2).unwrap(), q(1, 1));
        let other: Distribution = Distribution::uniform(&zmod(6)).unwrap();
        assert!(tvd(&u, &other).is_err());
    }

    #[test]
    fn float_distributions() {
        let g = zmod(4);
        let d = Distribution::<f64>::new(g.clone(), vec![0.25; 4]).unwrap();
        let p = Distribution::<f64>::point_mass(&g.identity()).unwrap();
        assert!((tvd(&d, &p).unwrap() - 0.75).abs() < 1e-15);
        assert!(Distribution::<f64>::new(g.clone(), vec![0.3; 4]).is_err());
        assert!(Distribution::<f64>::new(g, vec![-0.25, 0.5, 0.5, 0.25]).is_err());
    }

    #[test]
    fn csv_rendering() {
        let g = zmod(2);
        let d: Distribution = Distribution::new(g, vec![q(1, 4), q(3, 4)]).unwrap();
        assert_eq!(
            d.to_csv(),
            "index,probability,exact\n0,0.25,1/4\n1,0.75,3/4\n"
        );
    }

    #[test]
    fn zero_rounds_is_point_mass() {
        let g = zmod(6);
        let x = g.element(4).unwrap();
        let d = sc_single_card_distribution(&g, 0, &x).unwrap();
        assert_eq!(d, Distribution::point_mass(&x).unwrap());
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(single_card_tvd_closed_form(8, 10), q(7, 8 * 1024));
        let v = Weight::to_f64(&single_card_tvd_closed_form(8, 10));
        assert!((v - 8.544921875e-4).abs() < 1e-15);
    }

    /// All `(k_1, b_1, …, k_r, b_r)` sequences, walked depth-first.
    fn brute_force(group: &Group, rounds: u32, x0: &Element) -> Vec<u64> {
        fn walk(keys: &[Element], x: &Element, left: u32, counts: &mut [u64]) {
            if left == 0 {
                counts[x.index() as usize] += 1;
                return;
            }
            for k in keys {
                for b in [false, true] {
                    let y = sc_round(k, &ConstantBit(b), x).unwrap();
                    walk(keys, &y, left - 1, counts);
                }
            }
        }
        let keys = group.enumerate().unwrap();
        let mut counts = vec![0u64; keys.len()];
        walk(&keys, x0, rounds, &mut counts);
        counts
    }

    #[test]
    fn transition_law_matches_brute_force_on_small_cases() {
        for g in [zmod(3), Group::symmetric(3).unwrap()] {
            for r in 0..=3u32 {
                let x0 = g.element(1).unwrap();
                let counts = brute_force(&g, r, &x0);
                let total = (2 * g.order()).pow(r);
                let d = sc_single_card_distribution(&g, r, &x0).unwrap();
                for (c, p) in counts.iter().zip(d.probs()) {
                    assert_eq!(*p, BigRational::new((*c).into(), total.into()));
                }
            }
        }
    }
}
