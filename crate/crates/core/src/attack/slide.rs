//! Slide attack on the group Even-Mansour cipher.
//!
//! For uniformly chosen `x_1..x_d` and `y_1..y_d`, a pair with
//! `y_j = x_i·k` ("slid") satisfies `E(x_i)·y_j⁻¹ = P(y_j)·x_i⁻¹`, and then
//! `k = x_i⁻¹·y_j`. With `d² ≈ |G|` pairs a slid pair exists with
//! probability about `1 − 1/e`.

use std::collections::HashMap;

use crate::error::Result;
use crate::group::{Element, Group};
use crate::rng::RandomStream;

/// Which `(i, j)` pairs are tested.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlideMatching {
    /// All `d²` pairs. Abelian groups use a hash join on `E(x)·x = P(y)·y`;
    /// other groups scan every pair.
    CrossIndex,
    /// Only `i = j`, which succeeds with probability about `d/|G|`.
    SameIndex,
}

/// Queries `d` uniform points to `encrypt` and `d` to `perm`, then checks
/// each candidate key on `verify` fresh points (`E(v) = P(v·k̂)·k̂`) before
/// returning it. Returns `None` when no candidate survives.
pub fn slide_attack<E, P>(
    group: &Group,
    encrypt: E,
    perm: P,
    d: usize,
    verify: usize,
    matching: SlideMatching,
    rng: &mut RandomStream,
) -> Result<Option<Element>>
where
    E: Fn(&Element) -> Result<Element>,
    P: Fn(&Element) -> Result<Element>,
{
    let xs: Vec<Element> = (0..d).map(|_| group.sample(rng)).collect();
    let ys: Vec<Element> = (0..d).map(|_| group.sample(rng)).collect();
    let es = xs.iter().map(&encrypt).collect::<Result<Vec<_>>>()?;
    let ps = ys.iter().map(&perm).collect::<Result<Vec<_>>>()?;
    let candidates = slid_candidates(group, &xs, &es, &ys, &ps, matching)?;

    'candidates: for k in candidates {
        for _ in 0..verify {
            let v = group.sample(rng);
            if encrypt(&v)? != perm(&v.op(&k)?)?.op(&k)? {
                continue 'candidates;
            }
        }
        return Ok(Some(k));
    }
    Ok(None)
}

/// Candidate keys `x_i⁻¹·y_j` from pairs passing the slid-pair test, given
/// `es[i] = E(xs[i])` and `ps[j] = P(ys[j])`. Duplicates are removed;
/// order follows discovery.
pub fn slid_candidates(
    group: &Group,
    xs: &[Element],
    es: &[Element],
    ys: &[Element],
    ps: &[Element],
    matching: SlideMatching,
) -> Result<Vec<Element>> {
    let mut candidates: Vec<Element> = Vec::new();
    let mut push = |k: Element| {
        if !candidates.contains(&k) {
            candidates.push(k);
        }
    };
    match matching {
        SlideMatching::SameIndex => {
            for i in 0..xs.len().min(ys.len()) {
                if es[i].op(&ys[i].inv())? == ps[i].op(&xs[i].inv())? {
                    push(xs[i].inv().op(&ys[i])?);
                }
            }
        }
        SlideMatching::CrossIndex if group.is_abelian() => {
            let mut table: HashMap<u64, Vec<usize>> = HashMap::new();
            for i in 0..xs.len() {
                table.entry(es[i].op(&xs[i])?.index()).or_default().push(i);
            }
            for j in 0..ys.len() {
                if let Some(is) = table.get(&ps[j].op(&ys[j])?.index()) {
                    for &i in is {
                        push(xs[i].inv().op(&ys[j])?);
                    }
                }
            }
        }
        SlideMatching::CrossIndex => {
            let y_inv: Vec<Element> = ys.iter().map(Element::inv).collect();
            let x_inv: Vec<Element> = xs.iter().map(Element::inv).collect();
            for i in 0..xs.len() {
                for j in 0..ys.len() {
                    if es[i].op(&y_inv[j])? == ps[j].op(&x_inv[i])? {
                        push(x_inv[i].op(&ys[j])?);
                    }
                }
            }
        }
    }
    Ok(candidates)
}
