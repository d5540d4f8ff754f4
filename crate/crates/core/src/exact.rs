//! Exhaustive enumeration of randomized computations.
//!
//! A randomized procedure written against [`Sampler`] can be run once per
//! possible sequence of random choices by handing it a [`Branch`]. The
//! branch replays a recorded prefix of choices, extends it with the first
//! option for every new draw, and remembers the range of each draw; the
//! driver then advances the path like an odometer. Each complete path has
//! probability `Π 1/n_i`, so the output law is obtained exactly as a map of
//! arbitrary-precision rationals.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::rc::Rc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::rng::Sampler;

#[derive(Debug, Default)]
struct Path {
    /// `(choice, range)` for every draw on the current path.
    choices: Vec<(u64, u64)>,
    cursor: usize,
}

/// Sampler that walks one path of the choice tree. Clones share the same
/// path, so several oracles may draw from one branch.
#[derive(Clone, Debug, Default)]
pub struct Branch(Rc<RefCell<Path>>);

impl Sampler for Branch {
    fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "cannot sample from an empty range");
        let mut path = self.0.borrow_mut();
        let at = path.cursor;
        path.cursor += 1;
        if let Some(&(choice, range)) = path.choices.get(at) {
            assert_eq!(
                range, n,
                "enumerated computation is not deterministic given its choices"
            );
            choice
        } else {
            path.choices.push((0, n));
            0
        }
    }
}

impl Branch {
    fn probability(&self) -> BigRational {
        let path = self.0.borrow();
        let denom = path.choices[..path.cursor]
            .iter()
            .fold(BigInt::one(), |acc, &(_, n)| acc * BigInt::from(n));
        BigRational::new(BigInt::one(), denom)
    }

    /// Moves to the next path. Returns false when the tree is exhausted.
    fn advance(&self) -> bool {
        let mut path = self.0.borrow_mut();
        let used = path.cursor;
        path.choices.truncate(used);
        path.cursor = 0;
        while let Some((choice, range)) = path.choices.pop() {
            if choice + 1 < range {
                path.choices.push((choice + 1, range));
                return true;
            }
        }
        false
    }
}

/// Exact output distribution of `f` over all of its random choices.
pub fn enumerate_exact<T, F>(mut f: F) -> BTreeMap<T, BigRational>
where
    T: Ord,
    F: FnMut(&mut Branch) -> T,
{
    let mut out: BTreeMap<T, BigRational> = BTreeMap::new();
    let branch = Branch::default();
    loop {
        let value = f(&mut branch.clone());
        let p = branch.probability();
        *out.entry(value).or_insert_with(BigRational::zero) += p;
        if !branch.advance() {
            return out;
        }
    }
}

/// Number of leaves `f` would visit, for sizing tests.
pub fn count_paths<F: FnMut(&mut Branch)>(mut f: F) -> u64 {
    let mut n = 0;
    let branch = Branch::default();
    loop {
        f(&mut branch.clone());
        n += 1;
        if !branch.advance() {
            return n;
        }
    }
}

/// Probability of `event` under `f`'s choices.
pub fn probability<F: FnMut(&mut Branch) -> bool>(f: F) -> BigRational {
    enumerate_exact(f)
        .remove(&true)
        .unwrap_or_else(BigRational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ratio(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn single_die() {
        let d = enumerate_exact(|b| b.below(6));
        assert_eq!(d.len(), 6);
        assert!(d.values().all(|p| *p == ratio(1, 6)));
    }

    #[test]
    fn sum_of_two_dice() {
        let d = enumerate_exact(|b| 1 + b.below(6) + 1 + b.below(6));
        assert_eq!(d[&7], ratio(6, 36));
        assert_eq!(d[&2], ratio(1, 36));
        let total: BigRational = d.values().sum();
        assert_eq!(total, BigRational::one());
    }

    #[test]
    fn data_dependent_ranges() {
        // draw n in {1,2,3}, then a value below n
        let d = enumerate_exact(|b| {
            let n = b.below(3) + 1;
            b.below(n)
        });
        assert_eq!(
            d[&0],
            ratio(1, 3) * (ratio(1, 1) + ratio(1, 2) + ratio(1, 3))
        );
        assert_eq!(d[&2], ratio(1, 9));
        assert_eq!(
            count_paths(|b| {
                let n = b.below(3) + 1;
                b.below(n);
            }),
            6
        );
    }

    #[test]
    fn clones_share_the_path() {
        let d = enumerate_exact(|b| {
            let mut other = b.clone();
            (b.below(2), other.below(2))
        });
        assert_eq!(d.len(), 4);
        assert!(d.values().all(|p| *p == ratio(1, 4)));
    }

    #[test]
    fn probability_of_event() {
        let p = probability(|b| b.coin() && b.coin());
        assert_eq!(p, ratio(1, 4));
    }
}
