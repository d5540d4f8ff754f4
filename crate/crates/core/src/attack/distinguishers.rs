//! Structural distinguishers for Feistel networks and Scoot-or-Not.
//!
//! Each takes the adversary's [`OracleBundle`] and its own coins and
//! returns the bit "this is the construction".

use crate::error::{Error, Result};
use crate::feistel::{base_of_square, FeistelState};
use crate::group::Element;
use crate::rng::RandomStream;

use super::{sample_distinct, OracleBundle};

fn query(bundle: &OracleBundle, s: &FeistelState) -> Result<FeistelState> {
    let y = bundle.encrypt(&s.to_element(bundle.domain())?)?;
    FeistelState::from_element(&y)
}

fn query_inverse(bundle: &OracleBundle, s: &FeistelState) -> Result<FeistelState> {
    let x = bundle.decrypt(&s.to_element(bundle.domain())?)?;
    FeistelState::from_element(&x)
}

/// One random query `(L, R)`; accept iff the left output equals `R`.
pub fn feistel1_distinguisher(bundle: &OracleBundle, rng: &mut RandomStream) -> Result<bool> {
    let g = base_of_square(bundle.domain())?;
    let x = FeistelState::new(g.sample(rng), g.sample(rng))?;
    Ok(query(bundle, &x)?.left == x.right)
}

/// Queries `(1, r)` and `(L₀', r)` with `L₀' ≠ 1`; accept iff the left
/// outputs satisfy `L₂'·L₂⁻¹ = L₀'`.
pub fn feistel2_distinguisher(bundle: &OracleBundle, rng: &mut RandomStream) -> Result<bool> {
    let g = base_of_square(bundle.domain())?;
    let r = g.sample(rng);
    let l0 = sample_distinct(&g, &[g.identity()], rng)?;
    let first = query(bundle, &FeistelState::new(g.identity(), r.clone())?)?;
    let second = query(bundle, &FeistelState::new(l0.clone(), r)?)?;
    Ok(second.left.op(&first.left.inv())? == l0)
}

/// The inputs of [`feistel3_attack_with`].
#[derive(Clone, Debug)]
pub struct Feistel3Inputs {
    pub l0: Element,
    pub l0_prime: Element,
    pub r0: Element,
}

/// Intermediate values of one run of the three-round attack.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Feistel3Trace {
    pub first: FeistelState,
    pub second: FeistelState,
    pub decrypted: FeistelState,
    pub predicted_r0: Element,
    pub accept: bool,
}

/// Four steps: encrypt `(L₀, R₀)` and `(L₀', R₀)`; decrypt
/// `(L₃', L₀·L₀'⁻¹·R₃')` to get `(L₀'', R₀'')`; accept iff
/// `R₀'' = L₃'·L₃⁻¹·R₀`.
pub fn feistel3_attack_with(
    bundle: &OracleBundle,
    inputs: &Feistel3Inputs,
) -> Result<Feistel3Trace> {
    if inputs.l0 == inputs.l0_prime {
        return Err(Error::Domain("the attack needs L0 != L0'".into()));
    }
    let first = query(
        bundle,
        &FeistelState::new(inputs.l0.clone(), inputs.r0.clone())?,
    )?;
    let second = query(
        bundle,
        &FeistelState::new(inputs.l0_prime.clone(), inputs.r0.clone())?,
    )?;
    let right = inputs.l0.op(&inputs.l0_prime.inv())?.op(&second.right)?;
    let decrypted = query_inverse(bundle, &FeistelState::new(second.left.clone(), right)?)?;
    let predicted_r0 = second.left.op(&first.left.inv())?.op(&inputs.r0)?;
    let accept = decrypted.right == predicted_r0;
    Ok(Feistel3Trace {
        first,
        second,
        decrypted,
        predicted_r0,
        accept,
    })
}

/// [`feistel3_attack_with`] on uniformly chosen `L₀ ≠ L₀'` and `R₀`.
pub fn feistel3_sprp_attack(bundle: &OracleBundle, rng: &mut RandomStream) -> Result<bool> {
    let g = base_of_square(bundle.domain())?;
    let l0 = g.sample(rng);
    let l0_prime = sample_distinct(&g, std::slice::from_ref(&l0), rng)?;
    let r0 = g.sample(rng);
    Ok(feistel3_attack_with(bundle, &Feistel3Inputs { l0, l0_prime, r0 })?.accept)
}

/// Two distinct queries; accept iff `c₁·m₁⁻¹ = c₂·m₂⁻¹`.
pub fn sc_translation_distinguisher(bundle: &OracleBundle, rng: &mut RandomStream) -> Result<bool> {
    let g = bundle.domain().clone();
    let m1 = g.sample(rng);
    let m2 = sample_distinct(&g, std::slice::from_ref(&m1), rng)?;
    translation_test(bundle, &m1, &m2)
}

/// The translation test on fixed distinct queries.
pub fn translation_test(bundle: &OracleBundle, m1: &Element, m2: &Element) -> Result<bool> {
    if m1 == m2 {
        return Err(Error::Domain(
            "translation test needs distinct queries".into(),
        ));
    }
    let c1 = bundle.encrypt(m1)?;
    let c2 = bundle.encrypt(m2)?;
    Ok(c1.op(&m1.inv())? == c2.op(&m2.inv())?)
}
