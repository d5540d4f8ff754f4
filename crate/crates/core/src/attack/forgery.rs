//! Forgery (EFP) and cracking (CP) games against the group Even-Mansour
//! cipher, with a few concrete adversaries.

use std::rc::Rc;

use crate::em::{EmKey, EvenMansour};
use crate::error::{Error, Result};
use crate::group::{Element, Group};
use crate::oracle::{LazyPermutation, Permutation};
use crate::rng::RandomStream;

use super::distinguishers::translation_test;
use super::slide::{slide_attack, SlideMatching};
use super::{sample_distinct, OracleBundle, WorldFactory, CIPHER, PERM};

/// Name of the public permutation in the game bundles.
pub const P: &str = "P";

/// Group, and query budgets `s` for E/D and `t` for P/P⁻¹.
#[derive(Clone, Debug)]
pub struct EmGame {
    pub group: Group,
    pub s: u64,
    pub t: u64,
}

/// Outputs a claimed forgery `(m, c)`.
pub trait EfpAdversary: Fn(&OracleBundle, &mut RandomStream) -> Result<(Element, Element)> {}
impl<F: Fn(&OracleBundle, &mut RandomStream) -> Result<(Element, Element)>> EfpAdversary for F {}

/// Given the challenge `c₀`, outputs a guess for `m₀`.
pub trait CpAdversary: Fn(&OracleBundle, &Element, &mut RandomStream) -> Result<Element> {}
impl<F: Fn(&OracleBundle, &Element, &mut RandomStream) -> Result<Element>> CpAdversary for F {}

fn instance(game: &EmGame, rng: &RandomStream) -> EvenMansour {
    let perm: Rc<dyn Permutation> = Rc::new(LazyPermutation::new(
        game.group.clone(),
        rng.substream("perm"),
    ));
    let key = EmKey::generate(&game.group, &mut rng.substream("key"));
    EvenMansour::new(perm, key).expect("key drawn from the permutation's group")
}

fn bundle(game: &EmGame, cipher: EvenMansour) -> OracleBundle {
    let perm = cipher.public_permutation().clone();
    OracleBundle::new(cipher)
        .with_inverse()
        .with_permutation(P, perm)
        .with_budget(CIPHER, game.s)
        .with_budget(PERM, game.t)
}

/// One EFP trial: success iff `E_k(m) = c` and `(m, c)` was not seen
/// through E or D.
pub fn run_efp_game<A: EfpAdversary + ?Sized>(
    game: &EmGame,
    adversary: &A,
    rng: &RandomStream,
) -> Result<bool> {
    let cipher = instance(game, rng);
    let check = cipher.clone();
    let oracles = bundle(game, cipher);
    let (m, c) = adversary(&oracles, &mut rng.substream("adversary"))?;
    let fresh = !oracles.cipher_pairs().contains(&(m.clone(), c.clone()));
    Ok(fresh && check.forward(&m)? == c)
}

/// One CP trial: the challenge is `c₀ = E_k(m₀)` for uniform `m₀`, the
/// decryption oracle refuses `c₀`, and success means outputting `m₀`.
pub fn run_cp_game<A: CpAdversary + ?Sized>(
    game: &EmGame,
    adversary: &A,
    rng: &RandomStream,
) -> Result<bool> {
    let cipher = instance(game, rng);
    let m0 = game.group.sample(&mut rng.substream("challenge"));
    let c0 = cipher.forward(&m0)?;
    let oracles = bundle(game, cipher).refusing(c0.clone());
    let guess = adversary(&oracles, &c0, &mut rng.substream("adversary"))?;
    Ok(guess == m0)
}

/// Guesses a uniform pair without querying.
pub fn random_forger(oracles: &OracleBundle, rng: &mut RandomStream) -> Result<(Element, Element)> {
    let g = oracles.domain();
    Ok((g.sample(rng), g.sample(rng)))
}

/// Queries one plaintext and replays the answer.
pub fn replay_forger(oracles: &OracleBundle, rng: &mut RandomStream) -> Result<(Element, Element)> {
    let m = oracles.domain().sample(rng);
    let c = oracles.encrypt(&m)?;
    Ok((m, c))
}

/// Guesses `m₀` uniformly.
pub fn random_cracker(
    oracles: &OracleBundle,
    _c0: &Element,
    rng: &mut RandomStream,
) -> Result<Element> {
    Ok(oracles.domain().sample(rng))
}

/// Key recovery through the cross-index slide attack with `d` queries per
/// oracle and `verify` checks per candidate. Needs `s ≥ d + verify` and
/// `t ≥ d + verify`.
pub fn recover_key(
    oracles: &OracleBundle,
    d: usize,
    verify: usize,
    rng: &mut RandomStream,
) -> Result<Option<Element>> {
    let g = oracles.domain().clone();
    slide_attack(
        &g,
        |m: &Element| oracles.encrypt(m),
        |x: &Element| oracles.perm(P, x),
        d,
        verify,
        SlideMatching::CrossIndex,
        rng,
    )
}

/// Forger that recovers the key, then encrypts an unqueried plaintext
/// with one more P query. Falls back to a random guess.
pub fn slide_forger(
    d: usize,
    verify: usize,
) -> impl Fn(&OracleBundle, &mut RandomStream) -> Result<(Element, Element)> {
    move |oracles, rng| match recover_key(oracles, d, verify, rng)? {
        Some(k) => {
            let seen: Vec<Element> = oracles.cipher_pairs().into_iter().map(|(m, _)| m).collect();
            let m = sample_distinct(oracles.domain(), &seen, rng)?;
            let c = oracles.perm(P, &m.op(&k)?)?.op(&k)?;
            Ok((m, c))
        }
        None => random_forger(oracles, rng),
    }
}

/// Cracker that recovers the key and decrypts `c₀` as
/// `P⁻¹(c₀·k⁻¹)·k⁻¹`. Falls back to a random guess.
pub fn slide_cracker(
    d: usize,
    verify: usize,
) -> impl Fn(&OracleBundle, &Element, &mut RandomStream) -> Result<Element> {
    move |oracles, c0, rng| match recover_key(oracles, d, verify, rng)? {
        Some(k) => {
            let k_inv = k.inv();
            oracles.perm_inv(P, &c0.op(&k_inv)?)?.op(&k_inv)
        }
        None => random_cracker(oracles, c0, rng),
    }
}

/// SPRP real world: Even-Mansour with its inverse and `P`, `P⁻¹`.
pub fn em_real_world(game: &EmGame) -> impl WorldFactory + '_ {
    move |rng: &mut RandomStream| Ok(bundle(game, instance(game, rng)))
}

/// SPRP ideal world: an independent random permutation in place of the
/// cipher, next to the same kind of public `P`.
pub fn em_ideal_world(game: &EmGame) -> impl WorldFactory + '_ {
    move |rng: &mut RandomStream| {
        let cipher = LazyPermutation::new(game.group.clone(), rng.substream("cipher"));
        let perm: Rc<dyn Permutation> = Rc::new(LazyPermutation::new(
            game.group.clone(),
            rng.substream("perm"),
        ));
        Ok(OracleBundle::new(cipher)
            .with_inverse()
            .with_permutation(P, perm)
            .with_budget(CIPHER, game.s)
            .with_budget(PERM, game.t))
    }
}

/// Accepts iff the slide attack returns a key. Running out of budget while
/// verifying candidates counts as a reject.
pub fn em_slide_distinguisher(
    d: usize,
    verify: usize,
) -> impl Fn(&OracleBundle, &mut RandomStream) -> Result<bool> + Sync {
    move |oracles, rng| match recover_key(oracles, d, verify, rng) {
        Ok(k) => Ok(k.is_some()),
        Err(Error::BudgetExceeded { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Guesses a key and checks `E(m) = P(m·k)·k` on one random point.
pub fn em_key_guess_distinguisher(oracles: &OracleBundle, rng: &mut RandomStream) -> Result<bool> {
    let g = oracles.domain().clone();
    let k = g.sample(rng);
    let m = g.sample(rng);
    Ok(oracles.encrypt(&m)? == oracles.perm(P, &m.op(&k)?)?.op(&k)?)
}

/// The two-query translation test, applied to Even-Mansour.
pub fn em_translation_distinguisher(
    oracles: &OracleBundle,
    rng: &mut RandomStream,
) -> Result<bool> {
    let g = oracles.domain().clone();
    let m1 = g.sample(rng);
    let m2 = sample_distinct(&g, std::slice::from_ref(&m1), rng)?;
    translation_test(oracles, &m1, &m2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attack::run_distinguisher_game;

    fn game(n: u64, s: u64, t: u64) -> EmGame {
        EmGame {
            group: Group::cyclic(n).unwrap(),
            s,
            t,
        }
    }

    fn rate(trials: u64, f: impl Fn(&RandomStream) -> bool) -> f64 {
        let root = RandomStream::new(7, "forgery");
        (0..trials)
            .filter(|i| f(&root.substream(&i.to_string())))
            .count() as f64
            / trials as f64
    }

    #[test]
    fn replayed_pairs_never_count() {
        let gm = game(16, 4, 4);
        assert_eq!(
            rate(500, |r| run_efp_game(&gm, &replay_forger, r).unwrap()),
            0.0
        );
    }

    #[test]
    fn replaying_a_decryption_never_counts() {
        let gm = game(16, 4, 4);
        let adv = |o: &OracleBundle, rng: &mut RandomStream| {
            let c = o.domain().sample(rng);
            Ok((o.decrypt(&c)?, c))
        };
        assert_eq!(rate(300, |r| run_efp_game(&gm, &adv, r).unwrap()), 0.0);
    }

    #[test]
    fn random_guesses_succeed_about_once_per_group_order() {
        let gm = game(1024, 0, 0);
        let p = rate(40_000, |r| run_efp_game(&gm, &random_forger, r).unwrap());
        assert!((p - 1.0 / 1024.0).abs() < 0.0008, "{p}");
        let p = rate(40_000, |r| run_cp_game(&gm, &random_cracker, r).unwrap());
        assert!((p - 1.0 / 1024.0).abs() < 0.0008, "{p}");
    }

    #[test]
    fn decrypting_the_challenge_is_refused() {
        let gm = game(64, 4, 0);
        let adv = |o: &OracleBundle, c0: &Element, _: &mut RandomStream| o.decrypt(c0);
        let err = run_cp_game(&gm, &adv, &RandomStream::new(1, "cp")).unwrap_err();
        assert_eq!(err, Error::Refused);
    }

    #[test]
    fn budgets_are_enforced() {
        let gm = game(64, 2, 2);
        let greedy = slide_forger(8, 1);
        let err = run_efp_game(&gm, &greedy, &RandomStream::new(2, "budget")).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn slide_adversaries_win_when_the_key_is_found() {
        // d² = |G|: both should win about 1 − 1/e of the time; false candidates eat verify queries
        let gm = game(256, 48, 48);
        let efp = rate(400, |r| run_efp_game(&gm, &slide_forger(16, 4), r).unwrap());
        let cp = rate(400, |r| run_cp_game(&gm, &slide_cracker(16, 4), r).unwrap());
        for p in [efp, cp] {
            assert!((p - 0.632).abs() < 0.1, "{p}");
        }
    }

    #[test]
    fn slide_distinguisher_separates_worlds_with_enough_queries() {
        let gm = game(256, 48, 48);
        let est = run_distinguisher_game(
            em_real_world(&gm),
            em_ideal_world(&gm),
            em_slide_distinguisher(16, 4),
            1000,
            &RandomStream::new(3, "em-sprp"),
        )
        .unwrap();
        assert!((est.p_real - 0.632).abs() < 0.08, "{est:?}");
        assert_eq!(est.p_ideal, 0.0);
    }

    #[test]
    fn key_guess_always_passes_on_z2() {
        // every permutation of Z_2 is a translation, so every guess passes
        let gm = game(2, 4, 4);
        let est = run_distinguisher_game(
            em_real_world(&gm),
            em_ideal_world(&gm),
            em_key_guess_distinguisher,
            20_000,
            &RandomStream::new(4, "guess"),
        )
        .unwrap();
        assert_eq!(est.p_real, 1.0);
        assert!((est.p_ideal - 0.5).abs() < 0.02, "{est:?}");
    }
}
