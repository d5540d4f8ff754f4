//! Swap-or-Not (abelian groups) and Scoot-or-Not (any group) shuffles.
//!
//! A Swap-or-Not round pairs `x` with `K·x⁻¹` and swaps the pair when the
//! round decision, evaluated at the pair's canonical member (the one with
//! the larger index), is 1. A Scoot-or-Not round moves `x` to `k·x` when the
//! decision at `x̂ = (k·x)·x⁻¹ = k` is 1, so every round, and therefore the
//! whole shuffle, is a left translation.

use std::rc::Rc;

use crate::error::{Error, Result};
use crate::group::{Element, Group};
use crate::oracle::{BitFunction, ConstantBit, LazyBitFunction, Permutation};
use crate::rng::RandomStream;

pub mod bounds;
pub mod dist;

pub use bounds::{sc_cca_bound, sc_mixing_bound, sc_summary_bound};
pub use dist::{
    sc_single_card_distribution, single_card_tvd_closed_form, sn_single_card_distribution, tvd,
    Distribution, Weight,
};

/// Round keys and round decisions of an r-round shuffle.
#[derive(Clone)]
pub struct ShuffleParams {
    group: Group,
    keys: Vec<Element>,
    decisions: Vec<Rc<dyn BitFunction>>,
}

impl ShuffleParams {
    pub fn new(
        group: Group,
        keys: Vec<Element>,
        decisions: Vec<Rc<dyn BitFunction>>,
    ) -> Result<Self> {
        if keys.len() != decisions.len() {
            return Err(Error::Domain(format!(
                "{} round keys but {} round decisions",
                keys.len(),
                decisions.len()
            )));
        }
        for k in &keys {
            group.check(k)?;
        }
        Ok(ShuffleParams {
            group,
            keys,
            decisions,
        })
    }

    /// Recorded round bits `b_1..b_r` in place of round functions.
    pub fn with_bits(group: Group, keys: Vec<Element>, bits: &[bool]) -> Result<Self> {
        let decisions = bits
            .iter()
            .map(|&b| Rc::new(ConstantBit(b)) as Rc<dyn BitFunction>)
            .collect();
        Self::new(group, keys, decisions)
    }

    /// Uniform round keys and lazily sampled round functions, drawn from
    /// substreams `keys` and `f/<i>` of `rng`.
    pub fn random(group: Group, rounds: usize, rng: &RandomStream) -> Self {
        let mut key_stream = rng.substream("keys");
        let keys = (0..rounds).map(|_| group.sample(&mut key_stream)).collect();
        let decisions = (0..rounds)
            .map(|i| {
                Rc::new(LazyBitFunction::new(
                    group.clone(),
                    rng.substream(&format!("f/{i}")),
                )) as Rc<dyn BitFunction>
            })
            .collect();
        ShuffleParams {
            group,
            keys,
            decisions,
        }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn rounds(&self) -> usize {
        self.keys.len()
    }

    pub fn keys(&self) -> &[Element] {
        &self.keys
    }

    /// Parameters of `self` followed by those of `other`.
    pub fn concat(&self, other: &ShuffleParams) -> Result<ShuffleParams> {
        if self.group != other.group {
            return Err(Error::GroupMismatch {
                expected: self.group.to_string(),
                found: other.group.to_string(),
            });
        }
        let mut keys = self.keys.clone();
        keys.extend(other.keys.iter().cloned());
        let mut decisions = self.decisions.clone();
        decisions.extend(other.decisions.iter().cloned());
        Ok(ShuffleParams {
            group: self.group.clone(),
            keys,
            decisions,
        })
    }

    /// The same rounds in the opposite order.
    pub fn reversed(&self) -> ShuffleParams {
        ShuffleParams {
            group: self.group.clone(),
            keys: self.keys.iter().rev().cloned().collect(),
            decisions: self.decisions.iter().rev().cloned().collect(),
        }
    }
}

/// The member of `{a, b}` with the larger canonical index.
pub fn canonical<'a>(a: &'a Element, b: &'a Element) -> &'a Element {
    if a.index() >= b.index() {
        a
    } else {
        b
    }
}

/// One Swap-or-Not round on an abelian group: `x' = k·x⁻¹`, swap iff the
/// decision at the canonical member of `{x, x'}` is 1.
pub fn sn_round<B: BitFunction + ?Sized>(
    k: &Element,
    decision: &B,
    x: &Element,
) -> Result<Element> {
    let g = x.group();
    if !g.is_abelian() {
        return Err(Error::NonAbelian(g.to_string()));
    }
    let partner = k.op(&x.inv())?;
    if decision.decide(canonical(x, &partner))? {
        Ok(partner)
    } else {
        Ok(x.clone())
    }
}

/// A single bit-string round: `x' = K ⊕ X`. Vectors are big-endian.
pub fn sn_round_bits<B: BitFunction + ?Sized>(
    n: u32,
    k: &[u8],
    decision: &B,
    x: &[u8],
) -> Result<Vec<u8>> {
    let g = Group::bits(n)?;
    let out = sn_round(&g.bit_string(k)?, decision, &g.bit_string(x)?)?;
    match out.payload() {
        crate::group::Payload::Bits(bits) => Ok(bits),
        _ => unreachable!("bits group payload"),
    }
}

pub fn sn_shuffle(params: &ShuffleParams, x: &Element) -> Result<Element> {
    params.group.check(x)?;
    let mut x = x.clone();
    for (k, f) in params.keys.iter().zip(&params.decisions) {
        x = sn_round(k, &**f, &x)?;
    }
    Ok(x)
}

/// Inverse of [`sn_shuffle`]: the same rounds from last to first.
pub fn sn_unshuffle(params: &ShuffleParams, x: &Element) -> Result<Element> {
    params.group.check(x)?;
    let mut x = x.clone();
    for (k, f) in params.keys.iter().zip(&params.decisions).rev() {
        x = sn_round(k, &**f, &x)?;
    }
    Ok(x)
}

pub fn sc_round<B: BitFunction + ?Sized>(
    k: &Element,
    decision: &B,
    x: &Element,
) -> Result<Element> {
    let moved = k.op(x)?;
    let hat = moved.op(&x.inv())?;
    if decision.decide(&hat)? {
        Ok(moved)
    } else {
        Ok(x.clone())
    }
}

/// Inverse round: `x' = k⁻¹·x`, `x̂ = x'·x⁻¹`, move iff the decision at
/// `x̂⁻¹` is 1.
pub fn sc_round_inv<B: BitFunction + ?Sized>(
    k: &Element,
    decision: &B,
    x: &Element,
) -> Result<Element> {
    let moved = k.inv().op(x)?;
    let hat = moved.op(&x.inv())?;
    if decision.decide(&hat.inv())? {
        Ok(moved)
    } else {
        Ok(x.clone())
    }
}

pub fn sc_shuffle(params: &ShuffleParams, x: &Element) -> Result<Element> {
    params.group.check(x)?;
    let mut x = x.clone();
    for (k, f) in params.keys.iter().zip(&params.decisions) {
        x = sc_round(k, &**f, &x)?;
    }
    Ok(x)
}

/// Exact inverse of [`sc_shuffle`]; rounds run from `r` down to 1.
pub fn sc_inverse(params: &ShuffleParams, x: &Element) -> Result<Element> {
    params.group.check(x)?;
    let mut x = x.clone();
    for (k, f) in params.keys.iter().zip(&params.decisions).rev() {
        x = sc_round_inv(k, &**f, &x)?;
    }
    Ok(x)
}

/// `SC^{-1}` with rounds taken in the order `1..r`, i.e. the loop exactly as
/// it is usually printed. It inverts [`sc_shuffle`] only when the selected
/// keys commute.
pub fn sc_inverse_in_listed_order(params: &ShuffleParams, x: &Element) -> Result<Element> {
    params.group.check(x)?;
    let mut x = x.clone();
    for (k, f) in params.keys.iter().zip(&params.decisions) {
        x = sc_round_inv(k, &**f, &x)?;
    }
    Ok(x)
}

/// The translation `K` with `sc_shuffle(x) = K·x` for all `x`: the product
/// of the selected keys, latest round leftmost.
pub fn sc_translation(params: &ShuffleParams) -> Result<Element> {
    let mut acc = params.group.identity();
    for (k, f) in params.keys.iter().zip(&params.decisions) {
        if f.decide(k)? {
            acc = k.op(&acc)?;
        }
    }
    Ok(acc)
}

#[derive(Clone)]
pub struct SwapOrNot(pub ShuffleParams);

impl Permutation for SwapOrNot {
    fn domain(&self) -> &Group {
        &self.0.group
    }
    fn forward(&self, x: &Element) -> Result<Element> {
        sn_shuffle(&self.0, x)
    }
    fn backward(&self, y: &Element) -> Result<Element> {
        sn_unshuffle(&self.0, y)
    }
}

#[derive(Clone)]
pub struct ScootOrNot(pub ShuffleParams);

impl Permutation for ScootOrNot {
    fn domain(&self) -> &Group {
        &self.0.group
    }
    fn forward(&self, x: &Element) -> Result<Element> {
        sc_shuffle(&self.0, x)
    }
    fn backward(&self, y: &Element) -> Result<Element> {
        sc_inverse(&self.0, y)
    }
}

/// The cipher `M⁻¹ ∘ L`: forward `M⁻¹(L(x))`, backward `L⁻¹(M(y))`.
pub struct Composed<L, M> {
    first: L,
    second: M,
}

pub fn compose_cipher<L: Permutation, M: Permutation>(
    first: L,
    second: M,
) -> Result<Composed<L, M>> {
    if first.domain() != second.domain() {
        return Err(Error::GroupMismatch {
            expected: first.domain().to_string(),
            found: second.domain().to_string(),
        });
    }
    Ok(Composed { first, second })
}

impl<L: Permutation, M: Permutation> Permutation for Composed<L, M> {
    fn domain(&self) -> &Group {
        self.first.domain()
    }
    fn forward(&self, x: &Element) -> Result<Element> {
        self.second.backward(&self.first.forward(x)?)
    }
    fn backward(&self, y: &Element) -> Result<Element> {
        self.first.backward(&self.second.forward(y)?)
    }
}

/// `M` viewed as its own inverse: forward and backward exchanged.
pub struct Inverted<P>(pub P);

impl<P: Permutation> Permutation for Inverted<P> {
    fn domain(&self) -> &Group {
        self.0.domain()
    }
    fn forward(&self, x: &Element) -> Result<Element> {
        self.0.backward(x)
    }
    fn backward(&self, y: &Element) -> Result<Element> {
        self.0.forward(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::TablePermutation;
    use std::collections::HashSet;

    fn zmod(n: u64) -> Group {
        Group::cyclic(n).unwrap()
    }

    #[test]
    fn bit_round_examples() {
        let zero = ConstantBit(false);
        let one = ConstantBit(true);
        assert_eq!(
            sn_round_bits(3, &[1, 0, 1], &zero, &[0, 1, 1]).unwrap(),
            vec![0, 1, 1]
        );
        assert_eq!(
            sn_round_bits(3, &[0, 0, 0], &one, &[0, 1, 1]).unwrap(),
            vec![0, 1, 1]
        );
        let k = [1, 1];
        let pairs = [
            ([0, 0], [1, 1]),
            ([0, 1], [1, 0]),
            ([1, 0], [0, 1]),
            ([1, 1], [0, 0]),
        ];
        for (x, y) in pairs {
            let once = sn_round_bits(2, &k, &one, &x).unwrap();
            assert_eq!(once, y.to_vec());
            assert_eq!(sn_round_bits(2, &k, &one, &once).unwrap(), x.to_vec());
        }
    }

    #[test]
    fn swap_or_not_hand_trace() {
        let g = zmod(5);
        let params =
            ShuffleParams::with_bits(g.clone(), vec![g.residue(3).unwrap()], &[true]).unwrap();
        let image: Vec<u64> = (0..5)
            .map(|x| sn_shuffle(&params, &g.element(x).unwrap()).unwrap().index())
            .collect();
        assert_eq!(image, vec![3, 2, 1, 0, 4]);

        let off =
            ShuffleParams::with_bits(g.clone(), vec![g.residue(3).unwrap()], &[false]).unwrap();
        for x in g.enumerate().unwrap() {
            assert_eq!(sn_shuffle(&off, &x).unwrap(), x);
        }
    }

    #[test]
    fn swap_or_not_rejects_non_abelian_groups() {
        let g = Group::symmetric(3).unwrap();
        let x = g.element(1).unwrap();
        assert!(matches!(
            sn_round(&x, &ConstantBit(true), &x),
            Err(Error::NonAbelian(_))
        ));
    }

    #[test]
    fn scoot_examples() {
        let g = zmod(10);
        let k = vec![g.residue(7).unwrap()];
        let off = ShuffleParams::with_bits(g.clone(), k.clone(), &[false]).unwrap();
        let on = ShuffleParams::with_bits(g.clone(), k, &[true]).unwrap();
        let x = g.residue(2).unwrap();
        assert_eq!(sc_shuffle(&off, &x).unwrap(), x);
        assert_eq!(sc_shuffle(&on, &x).unwrap(), g.residue(9).unwrap());
        assert_eq!(sc_inverse(&on, &g.residue(9).unwrap()).unwrap(), x);
    }

    #[test]
    fn scoot_is_a_left_translation_for_every_parameter_choice() {
        let g = zmod(4);
        let all = g.enumerate().unwrap();
        for r in 1..=3usize {
            let total = 8u64.pow(r as u32);
            for code in 0..total {
                let mut c = code;
                let mut keys = vec![];
                let mut bits = vec![];
                for _ in 0..r {
                    keys.push(g.element(c % 4).unwrap());
                    bits.push((c / 4) % 2 == 1);
                    c /= 8;
                }
                let params = ShuffleParams::with_bits(g.clone(), keys, &bits).unwrap();
                let shifts: HashSet<u64> = all
                    .iter()
                    .map(|x| {
                        sc_shuffle(&params, x)
                            .unwrap()
                            .op(&x.inv())
                            .unwrap()
                            .index()
                    })
                    .collect();
                assert_eq!(shifts.len(), 1);
                let k = sc_translation(&params).unwrap();
                assert_eq!(*shifts.iter().next().unwrap(), k.index());
            }
        }
    }

    #[test]
    fn scoot_inverse_on_symmetric_group() {
        let g = Group::symmetric(4).unwrap();
        let root = RandomStream::new(5, "sym-sc");
        for t in 0..1000 {
            let params = ShuffleParams::random(g.clone(), 3, &root.substream(&t.to_string()));
            let mut rng = root.substream(&format!("x/{t}"));
            let x = g.sample(&mut rng);
            let y = sc_shuffle(&params, &x).unwrap();
            assert_eq!(sc_inverse(&params, &y).unwrap(), x);
            assert_eq!(
                sc_shuffle(&params, &sc_inverse(&params, &x).unwrap()).unwrap(),
                x
            );
        }
    }

    #[test]
    fn listed_order_inverse_fails_without_commuting_keys() {
        let g = Group::symmetric(3).unwrap();
        let a = g.permutation(&[1, 0, 2]).unwrap();
        let b = g.permutation(&[0, 2, 1]).unwrap();
        let params = ShuffleParams::with_bits(g.clone(), vec![a, b], &[true, true]).unwrap();
        let x = g.identity();
        let y = sc_shuffle(&params, &x).unwrap();
        assert_eq!(sc_inverse(&params, &y).unwrap(), x);
        assert_ne!(sc_inverse_in_listed_order(&params, &y).unwrap(), x);
    }

    #[test]
    fn swap_or_not_is_a_bijection_and_rounds_are_involutions() {
        for n in [2u64, 5, 10, 31, 64] {
            let g = zmod(n);
            let all = g.enumerate().unwrap();
            let root = RandomStream::new(n, "sn-bij");
            for t in 0..20 {
                let params = ShuffleParams::random(g.clone(), 6, &root.substream(&t.to_string()));
                let images: HashSet<u64> = all
                    .iter()
                    .map(|x| sn_shuffle(&params, x).unwrap().index())
                    .collect();
                assert_eq!(images.len() as u64, n);
                for x in &all {
                    let y = sn_shuffle(&params, x).unwrap();
                    assert_eq!(sn_unshuffle(&params, &y).unwrap(), *x);
                }
            }
        }
    }

    #[test]
    fn composition_identities() {
        let g = zmod(7);
        let p = TablePermutation::new(g.clone(), vec![3, 5, 0, 6, 1, 2, 4]).unwrap();
        let same = compose_cipher(&p, &p).unwrap();
        for x in g.enumerate().unwrap() {
            assert_eq!(same.forward(&x).unwrap(), x);
        }
        let q = TablePermutation::new(g.clone(), vec![1, 2, 3, 4, 5, 6, 0]).unwrap();
        let c = compose_cipher(&p, &q).unwrap();
        for x in g.enumerate().unwrap() {
            assert_eq!(c.backward(&c.forward(&x).unwrap()).unwrap(), x);
        }
        assert!(compose_cipher(&p, &TablePermutation::identity(zmod(6)).unwrap()).is_err());
    }

    #[test]
    fn composed_scoot_equals_longer_scoot() {
        // SC_A followed by (SC_B^{-1})^{-1} = SC_B is SC with rounds A then B
        for g in [
            zmod(16),
            Group::symmetric(3).unwrap(),
            "prod:zmod:2,sym:3".parse().unwrap(),
        ] {
            let root = RandomStream::new(8, "compose");
            for t in 0..25 {
                let a = ShuffleParams::random(g.clone(), 4, &root.substream(&format!("a/{t}")));
                let b = ShuffleParams::random(g.clone(), 4, &root.substream(&format!("b/{t}")));
                let inverse_b = Inverted(ScootOrNot(b.clone()));
                let composed = compose_cipher(ScootOrNot(a.clone()), inverse_b).unwrap();
                let long = a.concat(&b).unwrap();
                for x in g.enumerate().unwrap() {
                    assert_eq!(
                        composed.forward(&x).unwrap(),
                        sc_shuffle(&long, &x).unwrap()
                    );
                    assert_eq!(
                        composed.backward(&x).unwrap(),
                        sc_inverse(&long, &x).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn composed_with_listed_order_inverse_reverses_second_half() {
        // applying the listed-order inverse loop of SC^{-1}_B as a cipher and
        // inverting it amounts to running B's rounds in reverse
        let g = zmod(12);
        let root = RandomStream::new(9, "listed");
        for t in 0..25 {
            let a = ShuffleParams::random(g.clone(), 3, &root.substream(&format!("a/{t}")));
            let b = ShuffleParams::random(g.clone(), 3, &root.substream(&format!("b/{t}")));
            let long = a.concat(&b.reversed()).unwrap();
            for x in g.enumerate().unwrap() {
                let mid = sc_shuffle(&a, &x).unwrap();
                // find y with listed-order inverse(y) = mid
                let y = g
                    .enumerate()
                    .unwrap()
                    .into_iter()
                    .find(|y| sc_inverse_in_listed_order(&b, y).unwrap() == mid)
                    .unwrap();
                assert_eq!(y, sc_shuffle(&long, &x).unwrap());
            }
        }
    }
}
