//! The one-key group Even-Mansour cipher `E_k(m) = P(m·k)·k` and its
//! multi-round variant.

use std::rc::Rc;

use crate::error::{Error, Result};
use crate::group::{Element, Group};
use crate::oracle::Permutation;
use crate::rng::Sampler;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmKey(pub Element);

impl EmKey {
    pub fn generate<S: Sampler + ?Sized>(group: &Group, sampler: &mut S) -> EmKey {
        EmKey(group.sample(sampler))
    }

    pub fn element(&self) -> &Element {
        &self.0
    }
}

pub fn em_encrypt<P: Permutation + ?Sized>(p: &P, k: &EmKey, m: &Element) -> Result<Element> {
    p.domain().check(m)?;
    p.forward(&m.op(&k.0)?)?.op(&k.0)
}

pub fn em_decrypt<P: Permutation + ?Sized>(p: &P, k: &EmKey, c: &Element) -> Result<Element> {
    p.domain().check(c)?;
    let kinv = k.0.inv();
    p.backward(&c.op(&kinv)?)?.op(&kinv)
}

/// A keyed instance; the public permutation is shared with whoever else
/// holds the `Rc`.
#[derive(Clone)]
pub struct EvenMansour {
    perm: Rc<dyn Permutation>,
    key: EmKey,
}

impl EvenMansour {
    pub fn new(perm: Rc<dyn Permutation>, key: EmKey) -> Result<Self> {
        perm.domain().check(&key.0)?;
        Ok(EvenMansour { perm, key })
    }

    pub fn key(&self) -> &EmKey {
        &self.key
    }

    pub fn public_permutation(&self) -> &Rc<dyn Permutation> {
        &self.perm
    }
}

impl Permutation for EvenMansour {
    fn domain(&self) -> &Group {
        self.perm.domain()
    }
    fn forward(&self, m: &Element) -> Result<Element> {
        em_encrypt(&*self.perm, &self.key, m)
    }
    fn backward(&self, c: &Element) -> Result<Element> {
        em_decrypt(&*self.perm, &self.key, c)
    }
}

/// Round keys `k_1..k_r` with an independent permutation per round.
#[derive(Clone)]
pub struct EmMultiKey {
    keys: Vec<Element>,
    perms: Vec<Rc<dyn Permutation>>,
}

impl EmMultiKey {
    pub fn new(keys: Vec<Element>, perms: Vec<Rc<dyn Permutation>>) -> Result<Self> {
        if keys.is_empty() || keys.len() != perms.len() {
            return Err(Error::Domain(format!(
                "multi-round Even-Mansour needs r >= 1 keys and as many permutations, got {} and {}",
                keys.len(),
                perms.len()
            )));
        }
        let group = perms[0].domain().clone();
        for (k, p) in keys.iter().zip(&perms) {
            group.check(k)?;
            if p.domain() != &group {
                return Err(Error::GroupMismatch {
                    expected: group.to_string(),
                    found: p.domain().to_string(),
                });
            }
        }
        Ok(EmMultiKey { keys, perms })
    }

    pub fn rounds(&self) -> usize {
        self.keys.len()
    }
}

/// `x_0 = m`, `x_i = P_i(x_{i-1}·k_i)·k_i`, returns `x_r`.
pub fn em_multi_encrypt(mk: &EmMultiKey, m: &Element) -> Result<Element> {
    let mut x = m.clone();
    for (k, p) in mk.keys.iter().zip(&mk.perms) {
        p.domain().check(&x)?;
        x = p.forward(&x.op(k)?)?.op(k)?;
    }
    Ok(x)
}

pub fn em_multi_decrypt(mk: &EmMultiKey, c: &Element) -> Result<Element> {
    let mut x = c.clone();
    for (k, p) in mk.keys.iter().zip(&mk.perms).rev() {
        p.domain().check(&x)?;
        let kinv = k.inv();
        x = p.backward(&x.op(&kinv)?)?.op(&kinv)?;
    }
    Ok(x)
}

impl Permutation for EmMultiKey {
    fn domain(&self) -> &Group {
        self.perms[0].domain()
    }
    fn forward(&self, m: &Element) -> Result<Element> {
        em_multi_encrypt(self, m)
    }
    fn backward(&self, c: &Element) -> Result<Element> {
        em_multi_decrypt(self, c)
    }
}
