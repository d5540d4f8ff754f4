//! Adversary harness: oracle bundles with query accounting, two-world
//! distinguishing games, success-rate estimation, and concrete attacks.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::rc::Rc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::feistel::Feistel;
use crate::group::{Element, Group};
use crate::oracle::{LazyPermutation, Permutation, RoundFunction};
use crate::rng::RandomStream;
use crate::shuffle::{ScootOrNot, ShuffleParams};

pub mod distinguishers;
pub mod forgery;
pub mod slide;

pub use distinguishers::{
    feistel1_distinguisher, feistel2_distinguisher, feistel3_sprp_attack,
    sc_translation_distinguisher,
};
pub use forgery::{
    em_ideal_world, em_key_guess_distinguisher, em_real_world, em_slide_distinguisher,
    em_translation_distinguisher, run_cp_game, run_efp_game, CpAdversary, EfpAdversary, EmGame,
};
pub use slide::{slide_attack, SlideMatching};

/// Counter name shared by the encryption and decryption oracles.
pub const CIPHER: &str = "cipher";
/// Counter name shared by all public permutations and their inverses.
pub const PERM: &str = "perm";

/// One answered query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryRecord {
    pub oracle: String,
    pub input: Element,
    pub output: Element,
}

/// The oracles handed to an adversary in one trial, with per-oracle
/// counters and optional budgets. Counters are keyed by [`CIPHER`],
/// [`PERM`] and the names of auxiliary functions.
pub struct OracleBundle {
    cipher: Box<dyn Permutation>,
    inverse_allowed: bool,
    perms: BTreeMap<String, Rc<dyn Permutation>>,
    funcs: BTreeMap<String, Rc<dyn RoundFunction>>,
    budgets: BTreeMap<String, u64>,
    counts: RefCell<BTreeMap<String, u64>>,
    refused: Option<Element>,
    log: RefCell<Vec<QueryRecord>>,
}

impl OracleBundle {
    /// Forward-only access to `cipher`.
    pub fn new(cipher: impl Permutation + 'static) -> Self {
        OracleBundle {
            cipher: Box::new(cipher),
            inverse_allowed: false,
            perms: BTreeMap::new(),
            funcs: BTreeMap::new(),
            budgets: BTreeMap::new(),
            counts: RefCell::new(BTreeMap::new()),
            refused: None,
            log: RefCell::new(Vec::new()),
        }
    }

    pub fn with_inverse(mut self) -> Self {
        self.inverse_allowed = true;
        self
    }

    pub fn with_permutation(mut self, name: &str, p: Rc<dyn Permutation>) -> Self {
        self.perms.insert(name.to_string(), p);
        self
    }

    pub fn with_function(mut self, name: &str, f: Rc<dyn RoundFunction>) -> Self {
        self.funcs.insert(name.to_string(), f);
        self
    }

    pub fn with_budget(mut self, counter: &str, limit: u64) -> Self {
        self.budgets.insert(counter.to_string(), limit);
        self
    }

    /// Makes the decryption oracle refuse `c`.
    pub fn refusing(mut self, c: Element) -> Self {
        self.refused = Some(c);
        self
    }

    pub fn domain(&self) -> &Group {
        self.cipher.domain()
    }

    pub fn has_inverse(&self) -> bool {
        self.inverse_allowed
    }

    fn charge(&self, counter: &str) -> Result<()> {
        let mut counts = self.counts.borrow_mut();
        let n = counts.entry(counter.to_string()).or_insert(0);
        if let Some(&limit) = self.budgets.get(counter) {
            if *n >= limit {
                return Err(Error::BudgetExceeded {
                    oracle: counter.to_string(),
                    limit,
                });
            }
        }
        *n += 1;
        Ok(())
    }

    fn record(&self, oracle: &str, input: &Element, output: &Element) {
        self.log.borrow_mut().push(QueryRecord {
            oracle: oracle.to_string(),
            input: input.clone(),
            output: output.clone(),
        });
    }

    pub fn encrypt(&self, x: &Element) -> Result<Element> {
        self.charge(CIPHER)?;
        let y = self.cipher.forward(x)?;
        self.record("E", x, &y);
        Ok(y)
    }

    pub fn decrypt(&self, y: &Element) -> Result<Element> {
        if !self.inverse_allowed {
            return Err(Error::MissingOracle("D".into()));
        }
        if self.refused.as_ref() == Some(y) {
            return Err(Error::Refused);
        }
        self.charge(CIPHER)?;
        let x = self.cipher.backward(y)?;
        self.record("D", y, &x);
        Ok(x)
    }

    fn permutation(&self, name: &str) -> Result<&Rc<dyn Permutation>> {
        self.perms
            .get(name)
            .ok_or_else(|| Error::MissingOracle(name.to_string()))
    }

    pub fn perm(&self, name: &str, x: &Element) -> Result<Element> {
        let p = self.permutation(name)?;
        self.charge(PERM)?;
        let y = p.forward(x)?;
        self.record(name, x, &y);
        Ok(y)
    }

    pub fn perm_inv(&self, name: &str, y: &Element) -> Result<Element> {
        let p = self.permutation(name)?;
        self.charge(PERM)?;
        let x = p.backward(y)?;
        self.record(&format!("{name}^-1"), y, &x);
        Ok(x)
    }

    pub fn func(&self, name: &str, x: &Element) -> Result<Element> {
        let f = self
            .funcs
            .get(name)
            .ok_or_else(|| Error::MissingOracle(name.to_string()))?;
        self.charge(name)?;
        let y = f.eval(x)?;
        self.record(name, x, &y);
        Ok(y)
    }

    pub fn count(&self, counter: &str) -> u64 {
        self.counts.borrow().get(counter).copied().unwrap_or(0)
    }

    pub fn transcript(&self) -> Vec<QueryRecord> {
        self.log.borrow().clone()
    }

    /// `(m, c)` pairs seen through the encryption and decryption oracles.
    pub fn cipher_pairs(&self) -> Vec<(Element, Element)> {
        self.log
            .borrow()
            .iter()
            .filter_map(|q| match q.oracle.as_str() {
                "E" => Some((q.input.clone(), q.output.clone())),
                "D" => Some((q.output.clone(), q.input.clone())),
                _ => None,
            })
            .collect()
    }
}

/// Half-width of a two-sided 95% Hoeffding interval:
/// `sqrt(ln(2/0.05) / (2·trials))`.
pub fn hoeffding_halfwidth(trials: u64) -> f64 {
    ((2.0f64 / 0.05).ln() / (2.0 * trials as f64)).sqrt()
}

/// Empirical acceptance rates in the real and ideal worlds.
#[derive(Clone, Debug, PartialEq)]
pub struct AdvantageEstimate {
    pub p_real: f64,
    pub p_ideal: f64,
    pub advantage: f64,
    pub trials: u64,
    pub ci_halfwidth: f64,
    pub bound_value: Option<f64>,
    pub bound_name: String,
}

impl AdvantageEstimate {
    pub fn from_counts(real_accepts: u64, ideal_accepts: u64, trials: u64) -> Self {
        let p_real = real_accepts as f64 / trials as f64;
        let p_ideal = ideal_accepts as f64 / trials as f64;
        AdvantageEstimate {
            p_real,
            p_ideal,
            advantage: (p_real - p_ideal).abs(),
            trials,
            ci_halfwidth: hoeffding_halfwidth(trials),
            bound_value: None,
            bound_name: String::new(),
        }
    }

    pub fn with_bound(mut self, name: &str, value: f64) -> Self {
        self.bound_name = name.to_string();
        self.bound_value = Some(value);
        self
    }

    /// `advantage ≤ bound + ci`; vacuously true without a bound.
    pub fn within_bound(&self) -> bool {
        self.bound_value
            .is_none_or(|b| self.advantage <= b + self.ci_halfwidth)
    }
}

/// Empirical success rate of a single-world experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct RateEstimate {
    pub successes: u64,
    pub trials: u64,
    pub rate: f64,
    pub ci_halfwidth: f64,
}

/// Runs `trial` for indices `0..trials` in parallel; trial `i` receives the
/// substream `"<prefix>/<i>"` of `rng`, so the result does not depend on
/// scheduling.
pub fn estimate_rate<F>(
    trials: u64,
    rng: &RandomStream,
    prefix: &str,
    trial: F,
) -> Result<RateEstimate>
where
    F: Fn(&mut RandomStream) -> Result<bool> + Sync,
{
    if trials == 0 {
        return Err(Error::Domain("need at least one trial".into()));
    }
    let successes = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut s = rng.substream(&format!("{prefix}/{i}"));
            trial(&mut s).map(u64::from)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(RateEstimate {
        successes,
        trials,
        rate: successes as f64 / trials as f64,
        ci_halfwidth: hoeffding_halfwidth(trials),
    })
}

/// Builds the oracles of one world from that trial's randomness.
pub trait WorldFactory: Fn(&mut RandomStream) -> Result<OracleBundle> + Sync {}
impl<F: Fn(&mut RandomStream) -> Result<OracleBundle> + Sync> WorldFactory for F {}

/// Decides a bit from oracle access and its own coins.
pub trait Distinguisher: Fn(&OracleBundle, &mut RandomStream) -> Result<bool> + Sync {}
impl<F: Fn(&OracleBundle, &mut RandomStream) -> Result<bool> + Sync> Distinguisher for F {}

/// Runs `trials` independent trials in each world with fresh oracles.
/// Trial `i` of the real world draws its oracles from substream
/// `real/<i>/world` and the distinguisher's coins from `real/<i>/adversary`;
/// likewise for `ideal`.
pub fn run_distinguisher_game<R, I, D>(
    real_world: R,
    ideal_world: I,
    distinguisher: D,
    trials: u64,
    rng: &RandomStream,
) -> Result<AdvantageEstimate>
where
    R: WorldFactory,
    I: WorldFactory,
    D: Distinguisher,
{
    let play = |make: &(dyn Fn(&mut RandomStream) -> Result<OracleBundle> + Sync), label: &str| {
        estimate_rate(trials, rng, label, |s| {
            let bundle = make(&mut s.substream("world"))?;
            distinguisher(&bundle, &mut s.substream("adversary"))
        })
    };
    let real = play(&real_world, "real")?;
    let ideal = play(&ideal_world, "ideal")?;
    Ok(AdvantageEstimate::from_counts(
        real.successes,
        ideal.successes,
        trials,
    ))
}

/// Forward and inverse access to a Feistel network over `base` with
/// `rounds` fresh lazily sampled round functions.
pub fn feistel_world(base: Group, rounds: usize) -> impl WorldFactory {
    move |rng: &mut RandomStream| {
        Ok(OracleBundle::new(Feistel::random(base.clone(), rounds, rng)?).with_inverse())
    }
}

/// Forward and inverse access to a lazily sampled permutation of `domain`.
pub fn random_world(domain: Group) -> impl WorldFactory {
    move |rng: &mut RandomStream| {
        Ok(OracleBundle::new(LazyPermutation::new(domain.clone(), rng.clone())).with_inverse())
    }
}

/// Forward and inverse access to an r-round Scoot-or-Not shuffle.
pub fn sc_world(group: Group, rounds: usize) -> impl WorldFactory {
    move |rng: &mut RandomStream| {
        Ok(OracleBundle::new(ScootOrNot(ShuffleParams::random(
            group.clone(),
            rounds,
            rng,
        )))
        .with_inverse())
    }
}

/// Uniform element different from every element of `avoid`. Intended for
/// small exclusion lists relative to the group.
pub fn sample_distinct(
    group: &Group,
    avoid: &[Element],
    rng: &mut RandomStream,
) -> Result<Element> {
    if avoid.len() as u64 >= group.order() {
        return Err(Error::Exhausted);
    }
    loop {
        let x = group.sample(rng);
        if !avoid.contains(&x) {
            return Ok(x);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::TablePermutation;
    use crate::rng::Sampler;

    fn world(group: Group) -> impl WorldFactory {
        move |s: &mut RandomStream| {
            Ok(OracleBundle::new(LazyPermutation::new(group.clone(), s.clone())).with_inverse())
        }
    }

    #[test]
    fn hoeffding_reference() {
        assert!((hoeffding_halfwidth(10_000) - 0.013_581).abs() < 1e-6);
    }

    #[test]
    fn constant_distinguisher_has_zero_advantage() {
        let g = Group::cyclic(32).unwrap();
        let rng = RandomStream::new(1, "const");
        let est = run_distinguisher_game(
            world(g.clone()),
            world(g.clone()),
            |_: &OracleBundle, _: &mut RandomStream| Ok(true),
            200,
            &rng,
        )
        .unwrap();
        assert_eq!(est.p_real, 1.0);
        assert_eq!(est.advantage, 0.0);
    }

    #[test]
    fn coin_flip_is_within_ci() {
        let g = Group::cyclic(32).unwrap();
        let rng = RandomStream::new(2, "coin");
        let est = run_distinguisher_game(
            world(g.clone()),
            world(g.clone()),
            |_: &OracleBundle, s: &mut RandomStream| Ok(s.coin()),
            4000,
            &rng,
        )
        .unwrap();
        assert!(est.advantage <= est.ci_halfwidth);
    }

    #[test]
    fn budgets_and_counters() {
        let g = Group::cyclic(8).unwrap();
        let p: Rc<dyn Permutation> = Rc::new(TablePermutation::identity(g.clone()).unwrap());
        let b = OracleBundle::new(TablePermutation::identity(g.clone()).unwrap())
            .with_permutation("P", p)
            .with_budget(CIPHER, 2)
            .with_budget(PERM, 1);
        let x = g.element(3).unwrap();
        b.encrypt(&x).unwrap();
        b.encrypt(&x).unwrap();
        assert_eq!(
            b.encrypt(&x),
            Err(Error::BudgetExceeded {
                oracle: CIPHER.into(),
                limit: 2
            })
        );
        assert_eq!(b.count(CIPHER), 2);
        b.perm("P", &x).unwrap();
        assert!(matches!(
            b.perm_inv("P", &x),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(matches!(b.decrypt(&x), Err(Error::MissingOracle(_))));
        assert!(matches!(b.perm("Q", &x), Err(Error::MissingOracle(_))));
        assert_eq!(b.transcript().len(), 3);
    }

    #[test]
    fn budget_errors_abort_the_game() {
        let g = Group::cyclic(8).unwrap();
        let rng = RandomStream::new(3, "budget");
        let bounded = move |s: &mut RandomStream| {
            Ok(
                OracleBundle::new(LazyPermutation::new(g.clone(), s.clone()))
                    .with_budget(CIPHER, 1),
            )
        };
        let greedy = |b: &OracleBundle, s: &mut RandomStream| {
            let g = b.domain().clone();
            b.encrypt(&g.sample(s))?;
            b.encrypt(&g.sample(s))?;
            Ok(true)
        };
        let err = run_distinguisher_game(&bounded, &bounded, greedy, 10, &rng).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn refusal_sentinel() {
        let g = Group::cyclic(8).unwrap();
        let c0 = g.element(5).unwrap();
        let b = OracleBundle::new(TablePermutation::identity(g.clone()).unwrap())
            .with_inverse()
            .refusing(c0.clone());
        assert_eq!(b.decrypt(&c0), Err(Error::Refused));
        assert_eq!(b.count(CIPHER), 0);
        assert!(b.decrypt(&g.element(4).unwrap()).is_ok());
        assert_eq!(b.cipher_pairs().len(), 1);
    }

    #[test]
    fn rates_do_not_depend_on_thread_count() {
        let rng = RandomStream::new(4, "threads");
        let run = || estimate_rate(500, &rng, "t", |s| Ok(s.below(3) == 0)).unwrap();
        let a = run();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(run);
        assert_eq!(a, b);
    }
}
