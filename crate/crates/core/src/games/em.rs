//! The oracle games behind the Even-Mansour indistinguishability proof.
//!
//! * Game R answers every query uniformly from the values not yet used on
//!   that side and raises the flag when the secret key relates a new pair
//!   to an old one.
//! * Game X answers like the real cipher: it redefines an answer forced by
//!   an earlier pair, and redraws an answer that would clash with one.
//! * Game X′ lazily samples one public permutation and derives E and D
//!   from it.
//! * Game R′ is Game R with the key drawn after the last query.
//!
//! "P(m·k) ∈ T²" in the game boxes means that P is already defined at
//! `m·k`, i.e. `m·k ∈ T¹`; the other three membership tests read the same
//! way.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::enumerate_exact;
use crate::group::{Element, Group};
use crate::rng::Sampler;

/// Largest group order accepted by [`transcript_distribution`].
pub const EXACT_GAME_MAX_ORDER: u64 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GameKind {
    R,
    X,
    XPrime,
    RPrime,
}

impl fmt::Display for GameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GameKind::R => "R",
            GameKind::X => "X",
            GameKind::XPrime => "X'",
            GameKind::RPrime => "R'",
        })
    }
}

/// How Game X handles a drawn answer that would clash.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RetryMode {
    /// Draw again until the answer is admissible.
    Loop,
    /// Keep the first draw only to decide the flag, then draw once from the
    /// admissible answers. Same law as `Loop`, with a finite choice tree.
    Conditional,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QueryKind {
    E,
    D,
    P,
    PInv,
}

impl fmt::Display for QueryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QueryKind::E => "E",
            QueryKind::D => "D",
            QueryKind::P => "P",
            QueryKind::PInv => "P^-1",
        })
    }
}

/// Ordered query/answer pairs with lookups in both directions.
#[derive(Clone, Debug, Default)]
pub struct PairTable {
    pairs: Vec<(Element, Element)>,
    forward: HashMap<u64, Element>,
    backward: HashMap<u64, Element>,
}

impl PairTable {
    pub fn pairs(&self) -> &[(Element, Element)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn image(&self, a: &Element) -> Option<&Element> {
        self.forward.get(&a.index())
    }

    pub fn preimage(&self, b: &Element) -> Option<&Element> {
        self.backward.get(&b.index())
    }

    /// Indices of the first coordinates.
    pub fn firsts(&self) -> BTreeSet<u64> {
        self.forward.keys().copied().collect()
    }

    /// Indices of the second coordinates.
    pub fn seconds(&self) -> BTreeSet<u64> {
        self.backward.keys().copied().collect()
    }

    /// Adds `(a, b)`. Overlapping pairs are a caller bug.
    pub fn insert(&mut self, a: Element, b: Element) {
        debug_assert!(self.image(&a).is_none() && self.preimage(&b).is_none());
        self.forward.insert(a.index(), b.clone());
        self.backward.insert(b.index(), a.clone());
        self.pairs.push((a, b));
    }
}

/// The cipher pairs `S` and permutation pairs `T` an adversary has seen.
#[derive(Clone, Debug, Default)]
pub struct TranscriptSets {
    pub s: PairTable,
    pub t: PairTable,
}

impl TranscriptSets {
    /// `s` cipher pairs and `t` permutation pairs, each side without
    /// repeated inputs or outputs.
    pub fn random<S: Sampler + ?Sized>(
        group: &Group,
        s: usize,
        t: usize,
        rng: &mut S,
    ) -> Result<Self> {
        let mut out = TranscriptSets::default();
        for (table, n) in [(&mut out.s, s), (&mut out.t, t)] {
            for _ in 0..n {
                let a = pick_outside(group, &table.firsts(), rng)?;
                let b = pick_outside(group, &table.seconds(), rng)?;
                table.insert(a, b);
            }
        }
        Ok(out)
    }
}

/// A key is bad when `m·k = x` or `c·k⁻¹ = y` for some `(m, c) ∈ S` and
/// `(x, y) ∈ T`.
pub fn is_bad_key(k: &Element, sets: &TranscriptSets) -> Result<bool> {
    let k_inv = k.inv();
    for (m, c) in sets.s.pairs() {
        let mk = m.op(k)?;
        let ck = c.op(&k_inv)?;
        if sets.t.image(&mk).is_some() || sets.t.preimage(&ck).is_some() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Number of bad keys, by enumerating the group.
pub fn bad_key_count(group: &Group, sets: &TranscriptSets) -> Result<u64> {
    let mut n = 0;
    for k in group.enumerate()? {
        n += u64::from(is_bad_key(&k, sets)?);
    }
    Ok(n)
}

/// Uniform element outside `excluded` (a set of indices).
pub fn pick_outside<S: Sampler + ?Sized>(
    group: &Group,
    excluded: &BTreeSet<u64>,
    rng: &mut S,
) -> Result<Element> {
    let free = group.order() - excluded.len() as u64;
    if free == 0 {
        return Err(Error::Exhausted);
    }
    let mut value = rng.below(free);
    for &e in excluded {
        if e <= value {
            value += 1;
        } else {
            break;
        }
    }
    Ok(group.at(value))
}

/// One run of a game.
pub struct GameState<S> {
    kind: GameKind,
    group: Group,
    key: Option<Element>,
    bad: bool,
    retry: RetryMode,
    sets: TranscriptSets,
    /// Game X′ only: the lazily sampled public permutation.
    perm: PairTable,
    rng: S,
}

impl<S: Sampler> GameState<S> {
    /// Starts a game; every game but R′ draws its key first.
    pub fn new(kind: GameKind, group: Group, mut rng: S) -> Self {
        let key = match kind {
            GameKind::RPrime => None,
            _ => Some(group.sample(&mut rng)),
        };
        GameState {
            kind,
            group,
            key,
            bad: false,
            retry: RetryMode::Loop,
            sets: TranscriptSets::default(),
            perm: PairTable::default(),
            rng,
        }
    }

    pub fn with_retry(mut self, retry: RetryMode) -> Self {
        self.retry = retry;
        self
    }

    pub fn kind(&self) -> GameKind {
        self.kind
    }

    pub fn key(&self) -> Option<&Element> {
        self.key.as_ref()
    }

    pub fn is_bad(&self) -> bool {
        self.bad
    }

    pub fn sets(&self) -> &TranscriptSets {
        &self.sets
    }

    fn set_bad(&mut self) {
        self.bad = true;
    }

    fn check_fresh(&self, kind: QueryKind, q: &Element) -> Result<()> {
        self.group.check(q)?;
        let repeated = match kind {
            QueryKind::E => self.sets.s.image(q).is_some(),
            QueryKind::D => self.sets.s.preimage(q).is_some(),
            QueryKind::P => self.sets.t.image(q).is_some(),
            QueryKind::PInv => self.sets.t.preimage(q).is_some(),
        };
        if repeated {
            return Err(Error::RepeatedQuery {
                oracle: kind.to_string(),
                input: q.index(),
            });
        }
        Ok(())
    }

    /// Answers one query following the selected game's steps.
    pub fn step(&mut self, kind: QueryKind, q: &Element) -> Result<Element> {
        self.check_fresh(kind, q)?;
        let answer = match self.kind {
            GameKind::R | GameKind::RPrime => self.step_r(kind, q)?,
            GameKind::X => self.step_x(kind, q)?,
            GameKind::XPrime => self.step_x_prime(kind, q)?,
        };
        match kind {
            QueryKind::E => self.sets.s.insert(q.clone(), answer.clone()),
            QueryKind::D => self.sets.s.insert(answer.clone(), q.clone()),
            QueryKind::P => self.sets.t.insert(q.clone(), answer.clone()),
            QueryKind::PInv => self.sets.t.insert(answer.clone(), q.clone()),
        }
        Ok(answer)
    }

    /// For each query kind: the side of the answer, and the two badness
    /// tests `(query related to an old pair, answer related to an old pair)`.
    fn relations(
        &self,
        kind: QueryKind,
        q: &Element,
        a: &Element,
        k: &Element,
    ) -> Result<(bool, bool)> {
        let k_inv = k.inv();
        let sets = &self.sets;
        Ok(match kind {
            QueryKind::E => (
                sets.t.image(&q.op(k)?).is_some(),
                sets.t.preimage(&a.op(&k_inv)?).is_some(),
            ),
            QueryKind::D => (
                sets.t.preimage(&q.op(&k_inv)?).is_some(),
                sets.t.image(&a.op(k)?).is_some(),
            ),
            QueryKind::P => (
                sets.s.image(&q.op(&k_inv)?).is_some(),
                sets.s.preimage(&a.op(k)?).is_some(),
            ),
            QueryKind::PInv => (
                sets.s.preimage(&q.op(k)?).is_some(),
                sets.s.image(&a.op(&k_inv)?).is_some(),
            ),
        })
    }

    /// Values already used on the answer's side.
    fn used_answers(&self, kind: QueryKind) -> BTreeSet<u64> {
        match kind {
            QueryKind::E => self.sets.s.seconds(),
            QueryKind::D => self.sets.s.firsts(),
            QueryKind::P => self.sets.t.seconds(),
            QueryKind::PInv => self.sets.t.firsts(),
        }
    }

    fn step_r(&mut self, kind: QueryKind, q: &Element) -> Result<Element> {
        let a = pick_outside(&self.group, &self.used_answers(kind), &mut self.rng)?;
        if let (GameKind::R, Some(k)) = (self.kind, self.key.clone()) {
            let (old, new) = self.relations(kind, q, &a, &k)?;
            if old || new {
                self.set_bad();
            }
        }
        Ok(a)
    }

    /// The answer forced by an earlier pair, if any.
    fn forced(&self, kind: QueryKind, q: &Element, k: &Element) -> Result<Option<Element>> {
        let k_inv = k.inv();
        let sets = &self.sets;
        Ok(match kind {
            QueryKind::E => match sets.t.image(&q.op(k)?) {
                Some(y) => Some(y.op(k)?),
                None => None,
            },
            QueryKind::D => match sets.t.preimage(&q.op(&k_inv)?) {
                Some(x) => Some(x.op(&k_inv)?),
                None => None,
            },
            QueryKind::P => match sets.s.image(&q.op(&k_inv)?) {
                Some(c) => Some(c.op(&k_inv)?),
                None => None,
            },
            QueryKind::PInv => match sets.s.preimage(&q.op(k)?) {
                Some(m) => Some(m.op(k)?),
                None => None,
            },
        })
    }

    /// Answers that would relate to an old pair through the key.
    fn clashing_answers(&self, kind: QueryKind, k: &Element) -> Result<BTreeSet<u64>> {
        let k_inv = k.inv();
        let mut out = BTreeSet::new();
        match kind {
            // c with c·k⁻¹ ∈ T²
            QueryKind::E => {
                for (_, y) in self.sets.t.pairs() {
                    out.insert(y.op(k)?.index());
                }
            }
            // m with m·k ∈ T¹
            QueryKind::D => {
                for (x, _) in self.sets.t.pairs() {
                    out.insert(x.op(&k_inv)?.index());
                }
            }
            // y with y·k ∈ S²
            QueryKind::P => {
                for (_, c) in self.sets.s.pairs() {
                    out.insert(c.op(&k_inv)?.index());
                }
            }
            // x with x·k⁻¹ ∈ S¹
            QueryKind::PInv => {
                for (m, _) in self.sets.s.pairs() {
                    out.insert(m.op(k)?.index());
                }
            }
        }
        Ok(out)
    }

    fn step_x(&mut self, kind: QueryKind, q: &Element) -> Result<Element> {
        let k = self.key.clone().expect("game X draws its key up front");
        let used = self.used_answers(kind);
        let first = pick_outside(&self.group, &used, &mut self.rng)?;
        if let Some(a) = self.forced(kind, q, &k)? {
            self.set_bad();
            return Ok(a);
        }
        let clashing = self.clashing_answers(kind, &k)?;
        if !clashing.contains(&first.index()) {
            return Ok(first);
        }
        self.set_bad();
        let mut admissible_excluded = used.clone();
        admissible_excluded.extend(clashing.iter().copied());
        match self.retry {
            RetryMode::Conditional => {
                pick_outside(&self.group, &admissible_excluded, &mut self.rng)
            }
            RetryMode::Loop => {
                if admissible_excluded.len() as u64 >= self.group.order() {
                    return Err(Error::Exhausted);
                }
                loop {
                    let a = pick_outside(&self.group, &used, &mut self.rng)?;
                    if !clashing.contains(&a.index()) {
                        return Ok(a);
                    }
                }
            }
        }
    }

    fn step_x_prime(&mut self, kind: QueryKind, q: &Element) -> Result<Element> {
        let k = self.key.clone().expect("game X' draws its key up front");
        let k_inv = k.inv();
        // translate the query to a point of P or P⁻¹, answer there, and
        // translate back
        let (forward, point) = match kind {
            QueryKind::E => (true, q.op(&k)?),
            QueryKind::D => (false, q.op(&k_inv)?),
            QueryKind::P => (true, q.clone()),
            QueryKind::PInv => (false, q.clone()),
        };
        let value = if forward {
            match self.perm.image(&point) {
                Some(y) => y.clone(),
                None => {
                    let y = pick_outside(&self.group, &self.perm.seconds(), &mut self.rng)?;
                    self.perm.insert(point, y.clone());
                    y
                }
            }
        } else {
            match self.perm.preimage(&point) {
                Some(x) => x.clone(),
                None => {
                    let x = pick_outside(&self.group, &self.perm.firsts(), &mut self.rng)?;
                    self.perm.insert(x.clone(), point);
                    x
                }
            }
        };
        match kind {
            QueryKind::E => value.op(&k),
            QueryKind::D => value.op(&k_inv),
            QueryKind::P | QueryKind::PInv => Ok(value),
        }
    }

    /// Ends the game. Game R′ draws its key here and raises the flag iff
    /// the key is bad for the final transcript; the other games keep their
    /// flag. Returns the final flag.
    pub fn finalize(&mut self) -> Result<bool> {
        if self.kind == GameKind::RPrime && self.key.is_none() {
            let k = self.group.sample(&mut self.rng);
            if is_bad_key(&k, &self.sets)? {
                self.set_bad();
            }
            self.key = Some(k);
        }
        Ok(self.bad)
    }
}

/// Argument of a scripted query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueryArg {
    /// The element with this index.
    Fixed(u64),
    /// The answer to the previous query.
    PrevAnswer,
    /// The first index at or after this one (cyclically) not yet used as
    /// an input of this query kind.
    Fresh(u64),
}

/// A deterministic adversary: a fixed list of possibly adaptive queries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Script {
    pub name: &'static str,
    pub steps: Vec<(QueryKind, QueryArg)>,
}

/// Two-query scripts covering every ordered pairing of oracle sides that
/// can interact through the key.
pub fn script_catalog() -> Vec<Script> {
    use QueryArg::*;
    use QueryKind::*;
    let s = |name, steps| Script { name, steps };
    vec![
        s("E-E", vec![(E, Fixed(0)), (E, Fixed(1))]),
        s("E-D", vec![(E, Fixed(0)), (D, Fresh(1))]),
        s("E-P", vec![(E, Fixed(0)), (P, Fixed(1))]),
        s("E-Pinv", vec![(E, Fixed(1)), (PInv, Fixed(0))]),
        s("P-Pinv", vec![(P, Fixed(0)), (PInv, Fresh(1))]),
        s("D-P", vec![(D, Fixed(0)), (P, Fixed(0))]),
        s("P-E", vec![(P, Fixed(2)), (E, Fixed(0))]),
        s("Pinv-D", vec![(PInv, Fixed(1)), (D, Fixed(2))]),
        s("E-P(answer)", vec![(E, Fixed(0)), (P, PrevAnswer)]),
        s("P-D(answer)", vec![(P, Fixed(1)), (D, PrevAnswer)]),
    ]
}

fn resolve<S: Sampler>(
    state: &GameState<S>,
    kind: QueryKind,
    arg: QueryArg,
    prev: Option<&Element>,
) -> Result<Element> {
    let g = &state.group;
    match arg {
        QueryArg::Fixed(i) => g.element(i),
        QueryArg::PrevAnswer => prev
            .cloned()
            .ok_or_else(|| Error::Domain("first query cannot use a previous answer".into())),
        QueryArg::Fresh(start) => {
            let used = match kind {
                QueryKind::E => state.sets.s.firsts(),
                QueryKind::D => state.sets.s.seconds(),
                QueryKind::P => state.sets.t.firsts(),
                QueryKind::PInv => state.sets.t.seconds(),
            };
            let n = g.order();
            (0..n)
                .map(|j| (start + j) % n)
                .find(|i| !used.contains(i))
                .map(|i| g.at(i))
                .ok_or(Error::Exhausted)
        }
    }
}

/// Plays `script` against `state`, then finalizes it. Returns the answers.
pub fn run_script<S: Sampler>(state: &mut GameState<S>, script: &Script) -> Result<Vec<Element>> {
    let mut answers: Vec<Element> = Vec::new();
    for &(kind, arg) in &script.steps {
        let q = resolve(state, kind, arg, answers.last())?;
        answers.push(state.step(kind, &q)?);
    }
    state.finalize()?;
    Ok(answers)
}

/// Exact law of one game against one script.
#[derive(Clone, Debug, PartialEq)]
pub struct TranscriptLaw {
    /// Probability of each answer sequence (by element index).
    pub answers: BTreeMap<Vec<u64>, BigRational>,
    /// Probability that the flag ends up bad.
    pub bad: BigRational,
}

impl TranscriptLaw {
    /// Total variation distance between the answer laws.
    pub fn distance(&self, other: &TranscriptLaw) -> BigRational {
        let zero = BigRational::zero();
        let keys: BTreeSet<&Vec<u64>> = self.answers.keys().chain(other.answers.keys()).collect();
        let sum = keys
            .into_iter()
            .map(|k| {
                let a = self.answers.get(k).unwrap_or(&zero);
                let b = other.answers.get(k).unwrap_or(&zero);
                if a > b {
                    a - b
                } else {
                    b - a
                }
            })
            .fold(BigRational::zero(), |acc, x| acc + x);
        sum / BigRational::from_integer(2.into())
    }
}

/// Enumerates every random choice of `kind` against `script` on `group`
/// (order at most [`EXACT_GAME_MAX_ORDER`]). Game X uses
/// [`RetryMode::Conditional`].
pub fn transcript_distribution(
    kind: GameKind,
    script: &Script,
    group: &Group,
) -> Result<TranscriptLaw> {
    if group.order() > EXACT_GAME_MAX_ORDER {
        return Err(Error::EnumerationCap {
            group: group.to_string(),
            order: group.order(),
            cap: EXACT_GAME_MAX_ORDER,
        });
    }
    let mut failure: Option<Error> = None;
    let joint = enumerate_exact(|b| {
        let mut state =
            GameState::new(kind, group.clone(), b.clone()).with_retry(RetryMode::Conditional);
        match run_script(&mut state, script) {
            Ok(answers) => Some((
                answers.iter().map(Element::index).collect::<Vec<_>>(),
                state.is_bad(),
            )),
            Err(e) => {
                failure.get_or_insert(e);
                None
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let mut answers: BTreeMap<Vec<u64>, BigRational> = BTreeMap::new();
    let mut bad = BigRational::zero();
    for (outcome, p) in joint {
        let (a, flag) = outcome.expect("failures returned above");
        if flag {
            bad += &p;
        }
        *answers.entry(a).or_insert_with(BigRational::zero) += p;
    }
    Ok(TranscriptLaw { answers, bad })
}
