//! Feistel networks on `G × G` with round `(x, y) ↦ (y, x·f(y))`, and the
//! keyed construction `Ψ_k(x) = F_{g,f,f,g}(x·k)·k`.

use std::rc::Rc;

use crate::error::{Error, Result};
use crate::group::{Element, Group};
use crate::oracle::{LazyFunction, Permutation, RoundFunction};
use crate::rng::{RandomStream, Sampler};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FeistelState {
    pub left: Element,
    pub right: Element,
}

impl FeistelState {
    pub fn new(left: Element, right: Element) -> Result<Self> {
        left.group().check(&right)?;
        Ok(FeistelState { left, right })
    }

    /// Splits an element of `G × G`.
    pub fn from_element(e: &Element) -> Result<Self> {
        let (left, right) = e.split()?;
        Self::new(left, right)
    }

    /// Packs the state into `square`, which must be `G × G`.
    pub fn to_element(&self, square: &Group) -> Result<Element> {
        square.pair(&self.left, &self.right)
    }

    pub fn group(&self) -> &Group {
        self.left.group()
    }
}

pub fn feistel_round<F: RoundFunction + ?Sized>(f: &F, s: &FeistelState) -> Result<FeistelState> {
    let t = f.eval(&s.right)?;
    Ok(FeistelState {
        left: s.right.clone(),
        right: s.left.op(&t)?,
    })
}

/// `R_{i-1} = L_i`, `L_{i-1} = R_i · f(R_{i-1})⁻¹`; exact for any `f`.
pub fn feistel_round_inv<F: RoundFunction + ?Sized>(
    f: &F,
    s: &FeistelState,
) -> Result<FeistelState> {
    let t = f.eval(&s.left)?;
    Ok(FeistelState {
        left: s.right.op(&t.inv())?,
        right: s.left.clone(),
    })
}

/// An r-round Feistel cipher `F_{f_1,…,f_r}` on `G × G`.
#[derive(Clone)]
pub struct Feistel {
    base: Group,
    square: Group,
    rounds: Vec<Rc<dyn RoundFunction>>,
}

impl Feistel {
    pub fn new(base: Group, rounds: Vec<Rc<dyn RoundFunction>>) -> Result<Self> {
        let square = base.square()?;
        Ok(Feistel {
            base,
            square,
            rounds,
        })
    }

    /// `rounds` lazily sampled round functions, the i-th drawn from
    /// substream `f/<i>` of `rng`.
    pub fn random(base: Group, rounds: usize, rng: &RandomStream) -> Result<Self> {
        let fs = (0..rounds)
            .map(|i| {
                Rc::new(LazyFunction::on(
                    base.clone(),
                    rng.substream(&format!("f/{i}")),
                )) as Rc<dyn RoundFunction>
            })
            .collect();
        Feistel::new(base, fs)
    }

    pub fn base(&self) -> &Group {
        &self.base
    }

    pub fn rounds(&self) -> usize {
        self.rounds.len()
    }

    pub fn encrypt(&self, s: &FeistelState) -> Result<FeistelState> {
        self.base.check(&s.left)?;
        let mut s = s.clone();
        for f in &self.rounds {
            s = feistel_round(&**f, &s)?;
        }
        Ok(s)
    }

    pub fn decrypt(&self, s: &FeistelState) -> Result<FeistelState> {
        self.base.check(&s.left)?;
        let mut s = s.clone();
        for f in self.rounds.iter().rev() {
            s = feistel_round_inv(&**f, &s)?;
        }
        Ok(s)
    }
}

impl Permutation for Feistel {
    fn domain(&self) -> &Group {
        &self.square
    }

    fn forward(&self, x: &Element) -> Result<Element> {
        self.square.check(x)?;
        self.encrypt(&FeistelState::from_element(x)?)?
            .to_element(&self.square)
    }

    fn backward(&self, y: &Element) -> Result<Element> {
        self.square.check(y)?;
        self.decrypt(&FeistelState::from_element(y)?)?
            .to_element(&self.square)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiKey {
    pub left: Element,
    pub right: Element,
}

impl PsiKey {
    /// Two independent uniform subkeys.
    pub fn generate<S: Sampler + ?Sized>(base: &Group, sampler: &mut S) -> PsiKey {
        let left = base.sample(sampler);
        let right = base.sample(sampler);
        PsiKey { left, right }
    }

    pub fn identity(base: &Group) -> PsiKey {
        PsiKey {
            left: base.identity(),
            right: base.identity(),
        }
    }
}

/// `Ψ_k^{f,g}`: coordinatewise key mixing around the four-round network
/// with round functions `(g, f, f, g)`.
#[derive(Clone)]
pub struct Psi {
    network: Feistel,
    key: PsiKey,
}

impl Psi {
    pub fn new(
        base: Group,
        f: Rc<dyn RoundFunction>,
        g: Rc<dyn RoundFunction>,
        key: PsiKey,
    ) -> Result<Self> {
        base.check(&key.left)?;
        base.check(&key.right)?;
        let network = Feistel::new(base, vec![g.clone(), f.clone(), f, g])?;
        Ok(Psi { network, key })
    }

    pub fn key(&self) -> &PsiKey {
        &self.key
    }

    pub fn base(&self) -> &Group {
        self.network.base()
    }

    pub fn encrypt(&self, x: &FeistelState) -> Result<FeistelState> {
        let mixed = FeistelState {
            left: x.left.op(&self.key.left)?,
            right: x.right.op(&self.key.right)?,
        };
        let y = self.network.encrypt(&mixed)?;
        Ok(FeistelState {
            left: y.left.op(&self.key.left)?,
            right: y.right.op(&self.key.right)?,
        })
    }

    pub fn decrypt(&self, y: &FeistelState) -> Result<FeistelState> {
        let kl = self.key.left.inv();
        let kr = self.key.right.inv();
        let unmixed = FeistelState {
            left: y.left.op(&kl)?,
            right: y.right.op(&kr)?,
        };
        let x = self.network.decrypt(&unmixed)?;
        Ok(FeistelState {
            left: x.left.op(&kl)?,
            right: x.right.op(&kr)?,
        })
    }
}

impl Permutation for Psi {
    fn domain(&self) -> &Group {
        self.network.domain()
    }

    fn forward(&self, x: &Element) -> Result<Element> {
        self.domain().check(x)?;
        self.encrypt(&FeistelState::from_element(x)?)?
            .to_element(self.domain())
    }

    fn backward(&self, y: &Element) -> Result<Element> {
        self.domain().check(y)?;
        self.decrypt(&FeistelState::from_element(y)?)?
            .to_element(self.domain())
    }
}

/// Base group `G` of a state space written as `G × G`.
pub fn base_of_square(square: &Group) -> Result<Group> {
    square.square_root().cloned().ok_or_else(|| {
        Error::Domain(format!(
            "Feistel state space must be a product G×G, got {square}"
        ))
    })
}
