//! Lazily sampled random oracles and the traits the constructions use to
//! talk to them.
//!
//! Oracles take `&self` and keep their tables behind a `RefCell`, because
//! the same function is consulted by several parties at once (a Feistel
//! cipher uses `f` in two rounds while the adversary also queries it). They
//! may move between threads but are never shared across them.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::group::{Element, Group};
use crate::rng::{RandomStream, Sampler};

/// A bijection on a group with access to both directions.
pub trait Permutation {
    fn domain(&self) -> &Group;
    fn forward(&self, x: &Element) -> Result<Element>;
    fn backward(&self, y: &Element) -> Result<Element>;
}

impl<P: Permutation + ?Sized> Permutation for &P {
    fn domain(&self) -> &Group {
        (**self).domain()
    }
    fn forward(&self, x: &Element) -> Result<Element> {
        (**self).forward(x)
    }
    fn backward(&self, y: &Element) -> Result<Element> {
        (**self).backward(y)
    }
}

impl<P: Permutation + ?Sized> Permutation for Rc<P> {
    fn domain(&self) -> &Group {
        (**self).domain()
    }
    fn forward(&self, x: &Element) -> Result<Element> {
        (**self).forward(x)
    }
    fn backward(&self, y: &Element) -> Result<Element> {
        (**self).backward(y)
    }
}

impl<P: Permutation + ?Sized> Permutation for Box<P> {
    fn domain(&self) -> &Group {
        (**self).domain()
    }
    fn forward(&self, x: &Element) -> Result<Element> {
        (**self).forward(x)
    }
    fn backward(&self, y: &Element) -> Result<Element> {
        (**self).backward(y)
    }
}

/// A function `G → G'`, typically a Feistel round function.
pub trait RoundFunction {
    fn eval(&self, x: &Element) -> Result<Element>;
}

impl<F> RoundFunction for F
where
    F: Fn(&Element) -> Result<Element>,
{
    fn eval(&self, x: &Element) -> Result<Element> {
        self(x)
    }
}

/// A function `G → {0,1}`, the decision of a shuffle round.
pub trait BitFunction {
    fn decide(&self, x: &Element) -> Result<bool>;
}

/// A decision that ignores its input, i.e. a recorded round bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConstantBit(pub bool);

impl BitFunction for ConstantBit {
    fn decide(&self, _: &Element) -> Result<bool> {
        Ok(self.0)
    }
}

/// Adapter turning a closure into a [`BitFunction`].
pub struct BitFn<F>(pub F);

impl<F: Fn(&Element) -> Result<bool>> BitFunction for BitFn<F> {
    fn decide(&self, x: &Element) -> Result<bool> {
        (self.0)(x)
    }
}

/// The indices `0..n` not yet used, supporting uniform sampling and removal
/// of a named index in O(1). It is a Fisher–Yates array stored sparsely:
/// only positions that differ from the identity are kept.
#[derive(Clone, Debug)]
struct FreeIndices {
    len: u64,
    slot: HashMap<u64, u64>,
    position: HashMap<u64, u64>,
}

impl FreeIndices {
    fn new(n: u64) -> Self {
        FreeIndices {
            len: n,
            slot: HashMap::new(),
            position: HashMap::new(),
        }
    }

    fn value_at(&self, i: u64) -> u64 {
        self.slot.get(&i).copied().unwrap_or(i)
    }

    fn position_of(&self, v: u64) -> u64 {
        self.position.get(&v).copied().unwrap_or(v)
    }

    fn swap(&mut self, i: u64, j: u64) {
        let vi = self.value_at(i);
        let vj = self.value_at(j);
        self.slot.insert(i, vj);
        self.slot.insert(j, vi);
        self.position.insert(vj, i);
        self.position.insert(vi, j);
    }

    /// Removes `v`, which must be present.
    fn remove(&mut self, v: u64) {
        let i = self.position_of(v);
        debug_assert!(i < self.len);
        self.swap(i, self.len - 1);
        self.len -= 1;
    }

    /// Removes and returns a uniformly chosen remaining index.
    fn take<S: Sampler + ?Sized>(&mut self, sampler: &mut S) -> u64 {
        assert!(self.len > 0, "no unused values remain");
        let i = sampler.below(self.len);
        let v = self.value_at(i);
        self.remove(v);
        v
    }
}

#[derive(Debug)]
struct PermTables<S> {
    forward: HashMap<u64, u64>,
    backward: HashMap<u64, u64>,
    unused_images: FreeIndices,
    unused_inputs: FreeIndices,
    rng: S,
}

/// A uniformly random permutation of a group, sampled on demand. The first
/// query at a point draws uniformly from the values not yet used in the
/// other direction and records the pair both ways.
#[derive(Debug)]
pub struct LazyPermutation<S = RandomStream> {
    group: Group,
    tables: RefCell<PermTables<S>>,
}

impl<S: Sampler> LazyPermutation<S> {
    pub fn new(group: Group, rng: S) -> Self {
        let n = group.order();
        LazyPermutation {
            group,
            tables: RefCell::new(PermTables {
                forward: HashMap::new(),
                backward: HashMap::new(),
                unused_images: FreeIndices::new(n),
                unused_inputs: FreeIndices::new(n),
                rng,
            }),
        }
    }

    /// Recorded image of `x`, without sampling.
    pub fn peek_forward(&self, x: &Element) -> Option<Element> {
        let t = self.tables.borrow();
        t.forward.get(&x.index()).map(|&y| self.group.at(y))
    }

    /// Recorded preimage of `y`, without sampling.
    pub fn peek_backward(&self, y: &Element) -> Option<Element> {
        let t = self.tables.borrow();
        t.backward.get(&y.index()).map(|&x| self.group.at(x))
    }

    /// Number of points at which the permutation has been fixed.
    pub fn defined(&self) -> usize {
        self.tables.borrow().forward.len()
    }

    /// Recorded `(x, P(x))` pairs in input index order.
    pub fn table(&self) -> Vec<(Element, Element)> {
        let t = self.tables.borrow();
        let mut pairs: Vec<_> = t.forward.iter().map(|(&x, &y)| (x, y)).collect();
        pairs.sort_unstable();
        pairs
            .into_iter()
            .map(|(x, y)| (self.group.at(x), self.group.at(y)))
            .collect()
    }
}

impl<S: Sampler> Permutation for LazyPermutation<S> {
    fn domain(&self) -> &Group {
        &self.group
    }

    fn forward(&self, x: &Element) -> Result<Element> {
        self.group.check(x)?;
        let mut guard = self.tables.borrow_mut();
        let t = &mut *guard;
        if let Some(&y) = t.forward.get(&x.index()) {
            return Ok(self.group.at(y));
        }
        let y = t.unused_images.take(&mut t.rng);
        t.unused_inputs.remove(x.index());
        t.forward.insert(x.index(), y);
        t.backward.insert(y, x.index());
        Ok(self.group.at(y))
    }

    fn backward(&self, y: &Element) -> Result<Element> {
        self.group.check(y)?;
        let mut guard = self.tables.borrow_mut();
        let t = &mut *guard;
        if let Some(&x) = t.backward.get(&y.index()) {
            return Ok(self.group.at(x));
        }
        let x = t.unused_inputs.take(&mut t.rng);
        t.unused_images.remove(y.index());
        t.forward.insert(x, y.index());
        t.backward.insert(y.index(), x);
        Ok(self.group.at(x))
    }
}

/// A fixed permutation given by its table of image indices.
#[derive(Clone, Debug)]
pub struct TablePermutation {
    group: Group,
    forward: Vec<u64>,
    backward: Vec<u64>,
}

impl TablePermutation {
    pub fn new(group: Group, images: Vec<u64>) -> Result<Self> {
        let n = group.order();
        if images.len() as u64 != n {
            return Err(Error::Domain(format!(
                "permutation table has {} entries, {group} has {n} elements",
                images.len()
            )));
        }
        let mut backward = vec![u64::MAX; images.len()];
        for (x, &y) in images.iter().enumerate() {
            if y >= n || backward[y as usize] != u64::MAX {
                return Err(Error::Domain(format!(
                    "table is not a bijection on {group}"
                )));
            }
            backward[y as usize] = x as u64;
        }
        Ok(TablePermutation {
            group,
            forward: images,
            backward,
        })
    }

    /// Permutation given by a function on elements, tabulated once.
    pub fn from_fn(group: Group, f: impl Fn(&Element) -> Element) -> Result<Self> {
        let images = group.enumerate()?.iter().map(|x| f(x).index()).collect();
        Self::new(group, images)
    }

    pub fn identity(group: Group) -> Result<Self> {
        let n = group.order();
        let images = (0..n).collect();
        Self::new(group, images)
    }
}

impl Permutation for TablePermutation {
    fn domain(&self) -> &Group {
        &self.group
    }

    fn forward(&self, x: &Element) -> Result<Element> {
        self.group.check(x)?;
        Ok(self.group.at(self.forward[x.index() as usize]))
    }

    fn backward(&self, y: &Element) -> Result<Element> {
        self.group.check(y)?;
        Ok(self.group.at(self.backward[y.index() as usize]))
    }
}

/// The identity map on a group of any size.
#[derive(Clone, Debug)]
pub struct IdentityPermutation(pub Group);

impl Permutation for IdentityPermutation {
    fn domain(&self) -> &Group {
        &self.0
    }
    fn forward(&self, x: &Element) -> Result<Element> {
        self.0.check(x)?;
        Ok(x.clone())
    }
    fn backward(&self, y: &Element) -> Result<Element> {
        self.0.check(y)?;
        Ok(y.clone())
    }
}

#[derive(Debug)]
struct FuncTable<S> {
    table: HashMap<u64, u64>,
    rng: S,
}

/// A uniformly random function `domain → codomain`, sampled on demand.
#[derive(Debug)]
pub struct LazyFunction<S = RandomStream> {
    domain: Group,
    codomain: Group,
    state: RefCell<FuncTable<S>>,
}

impl<S: Sampler> LazyFunction<S> {
    pub fn new(domain: Group, codomain: Group, rng: S) -> Self {
        LazyFunction {
            domain,
            codomain,
            state: RefCell::new(FuncTable {
                table: HashMap::new(),
                rng,
            }),
        }
    }

    /// A random function from a group to itself.
    pub fn on(group: Group, rng: S) -> Self {
        Self::new(group.clone(), group, rng)
    }

    pub fn domain(&self) -> &Group {
        &self.domain
    }

    pub fn codomain(&self) -> &Group {
        &self.codomain
    }

    pub fn peek(&self, x: &Element) -> Option<Element> {
        let s = self.state.borrow();
        s.table.get(&x.index()).map(|&y| self.codomain.at(y))
    }

    /// Number of points at which the function has been fixed.
    pub fn defined(&self) -> usize {
        self.state.borrow().table.len()
    }
}

impl<S: Sampler> RoundFunction for LazyFunction<S> {
    fn eval(&self, x: &Element) -> Result<Element> {
        self.domain.check(x)?;
        let mut guard = self.state.borrow_mut();
        let s = &mut *guard;
        let n = self.codomain.order();
        let y = *s.table.entry(x.index()).or_insert_with(|| s.rng.below(n));
        Ok(self.codomain.at(y))
    }
}

#[derive(Debug)]
struct BitTable<S> {
    table: HashMap<u64, bool>,
    rng: S,
}

/// A uniformly random predicate on a group, sampled on demand.
#[derive(Debug)]
pub struct LazyBitFunction<S = RandomStream> {
    domain: Group,
    state: RefCell<BitTable<S>>,
}

impl<S: Sampler> LazyBitFunction<S> {
    pub fn new(domain: Group, rng: S) -> Self {
        LazyBitFunction {
            domain,
            state: RefCell::new(BitTable {
                table: HashMap::new(),
                rng,
            }),
        }
    }

    pub fn domain(&self) -> &Group {
        &self.domain
    }
}

impl<S: Sampler> BitFunction for LazyBitFunction<S> {
    fn decide(&self, x: &Element) -> Result<bool> {
        self.domain.check(x)?;
        let mut guard = self.state.borrow_mut();
        let s = &mut *guard;
        Ok(*s.table.entry(x.index()).or_insert_with(|| s.rng.coin()))
    }
}

impl<B: BitFunction + ?Sized> BitFunction for Rc<B> {
    fn decide(&self, x: &Element) -> Result<bool> {
        (**self).decide(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::enumerate_exact;
    use num_rational::BigRational;
    use std::collections::HashSet;

    fn zmod(n: u64) -> Group {
        Group::cyclic(n).unwrap()
    }

    #[test]
    fn permutation_roundtrip_and_injectivity() {
        let g = zmod(1000);
        let p = LazyPermutation::new(g.clone(), RandomStream::new(1, "p"));
        let mut seen = HashSet::new();
        let mut rng = RandomStream::new(2, "inputs");
        for _ in 0..300 {
            let x = g.sample(&mut rng);
            let y = p.forward(&x).unwrap();
            assert_eq!(p.backward(&y).unwrap(), x);
            seen.insert((x.index(), y.index()));
        }
        let images: HashSet<_> = seen.iter().map(|&(_, y)| y).collect();
        let inputs: HashSet<_> = seen.iter().map(|&(x, _)| x).collect();
        assert_eq!(images.len(), inputs.len());
        for _ in 0..300 {
            let y = g.sample(&mut rng);
            let x = p.backward(&y).unwrap();
            assert_eq!(p.forward(&x).unwrap(), y);
        }
    }

    #[test]
    fn exhausting_a_small_group_gives_a_bijection() {
        let g = Group::bits(3).unwrap();
        let p = LazyPermutation::new(g.clone(), RandomStream::new(3, "small"));
        let images: HashSet<u64> = g
            .enumerate()
            .unwrap()
            .iter()
            .map(|x| p.forward(x).unwrap().index())
            .collect();
        assert_eq!(images.len(), 8);
    }

    #[test]
    fn mixed_direction_queries_stay_consistent() {
        let g = zmod(6);
        let p = LazyPermutation::new(g.clone(), RandomStream::new(4, "mixed"));
        for i in 0..3 {
            p.backward(&g.element(i).unwrap()).unwrap();
        }
        for i in 0..6 {
            let x = g.element(i).unwrap();
            let y = p.forward(&x).unwrap();
            assert_eq!(p.backward(&y).unwrap(), x);
        }
        let images: HashSet<u64> = p.table().iter().map(|(_, y)| y.index()).collect();
        assert_eq!(images.len(), 6);
    }

    #[test]
    fn huge_domains_are_supported() {
        let g = Group::bits(63).unwrap();
        let p = LazyPermutation::new(g.clone(), RandomStream::new(5, "huge"));
        let x = g.element(123).unwrap();
        let y = p.forward(&x).unwrap();
        assert_eq!(p.backward(&y).unwrap(), x);
        assert_eq!(p.defined(), 1);
    }

    #[test]
    fn lazy_permutation_is_exactly_uniform() {
        for g in [zmod(3), zmod(4), Group::symmetric(3).unwrap()] {
            let all = g.enumerate().unwrap();
            let law = enumerate_exact(|b| {
                let p = LazyPermutation::new(g.clone(), b.clone());
                // mix directions so both free sets are exercised
                let mut table = vec![u64::MAX; all.len()];
                for (i, e) in all.iter().enumerate() {
                    if i % 2 == 0 {
                        table[e.index() as usize] = p.forward(e).unwrap().index();
                    } else {
                        let x = p.backward(e).unwrap();
                        table[x.index() as usize] = e.index();
                    }
                }
                for x in &all {
                    table[x.index() as usize] = p.forward(x).unwrap().index();
                }
                table
            });
            let n = all.len() as i64;
            let fact: i64 = (1..=n).product();
            assert_eq!(law.len() as i64, fact, "{g}");
            let expected = BigRational::new(1.into(), fact.into());
            assert!(law.values().all(|p| *p == expected), "{g}");
        }
    }

    #[test]
    fn unused_codomain_draw_is_uniform() {
        // after fixing some points, the next fresh image is uniform over the rest
        for n in 2..=7u64 {
            let g = zmod(n);
            let fixed = (n / 2) as usize;
            let law = enumerate_exact(|b| {
                let p = LazyPermutation::new(g.clone(), b.clone());
                let mut used = vec![];
                for i in 0..fixed as u64 {
                    used.push(p.forward(&g.element(i).unwrap()).unwrap().index());
                }
                used.sort_unstable();
                (used, p.forward(&g.element(n - 1).unwrap()).unwrap().index())
            });
            let mut per_prefix: HashMap<Vec<u64>, Vec<BigRational>> = HashMap::new();
            for ((used, y), p) in law {
                assert!(!used.contains(&y));
                per_prefix.entry(used).or_default().push(p);
            }
            for probs in per_prefix.values() {
                assert_eq!(probs.len() as u64, n - fixed as u64);
                assert!(probs.iter().all(|p| *p == probs[0]));
            }
        }
    }

    #[test]
    fn function_replays_and_is_deterministic() {
        let g = zmod(50);
        let f1 = LazyFunction::on(g.clone(), RandomStream::new(9, "f"));
        let f2 = LazyFunction::on(g.clone(), RandomStream::new(9, "f"));
        for i in 0..50 {
            let x = g.element(i).unwrap();
            let a = f1.eval(&x).unwrap();
            assert_eq!(f1.eval(&x).unwrap(), a);
            assert_eq!(f2.eval(&x).unwrap(), a);
        }
    }

    #[test]
    fn function_outputs_are_uniform() {
        let domain = zmod(100_000);
        let f = LazyFunction::new(domain.clone(), zmod(4), RandomStream::new(10, "u"));
        let mut counts = [0u64; 4];
        for i in 0..100_000 {
            counts[f.eval(&domain.element(i).unwrap()).unwrap().index() as usize] += 1;
        }
        let sd = (100_000.0f64 * 0.25 * 0.75).sqrt();
        for c in counts {
            assert!((c as f64 - 25_000.0).abs() < 5.0 * sd, "{counts:?}");
        }
    }

    #[test]
    fn bit_function_is_a_fair_replayed_coin() {
        let domain = zmod(100_000);
        let b = LazyBitFunction::new(domain.clone(), RandomStream::new(11, "bits"));
        let mut ones = 0u64;
        for i in 0..100_000 {
            let x = domain.element(i).unwrap();
            let v = b.decide(&x).unwrap();
            assert_eq!(b.decide(&x).unwrap(), v);
            ones += v as u64;
        }
        let sd = (100_000.0f64 * 0.25).sqrt();
        assert!((ones as f64 - 50_000.0).abs() < 5.0 * sd);

        let other = LazyBitFunction::new(domain.clone(), RandomStream::new(11, "bits2"));
        let agree = (0..1000)
            .filter(|&i| {
                let x = domain.element(i).unwrap();
                b.decide(&x).unwrap() == other.decide(&x).unwrap()
            })
            .count();
        assert!((350..650).contains(&agree));
    }

    #[test]
    fn table_permutation_validation() {
        let g = zmod(4);
        assert!(TablePermutation::new(g.clone(), vec![1, 2, 3, 0]).is_ok());
        assert!(TablePermutation::new(g.clone(), vec![1, 1, 3, 0]).is_err());
        assert!(TablePermutation::new(g.clone(), vec![1, 2, 0]).is_err());
        let p = TablePermutation::new(g.clone(), vec![2, 0, 3, 1]).unwrap();
        let x = g.element(3).unwrap();
        assert_eq!(p.forward(&x).unwrap().index(), 1);
        assert_eq!(p.backward(&g.element(1).unwrap()).unwrap(), x);
    }
}
