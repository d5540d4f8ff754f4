//! Transcript bookkeeping for the four-round keyed Feistel construction
//! `Ψ_k^{f,g}`: the bad events on keys and round functions, the
//! "answer fresh cipher queries uniformly" oracle R̃, and the bound
//! formulas.

use std::collections::HashMap;
use std::rc::Rc;

use crate::attack::{estimate_rate, OracleBundle, RateEstimate, CIPHER};
use crate::error::{Error, Result};
use crate::feistel::{feistel_round, feistel_round_inv, FeistelState, Psi, PsiKey};
use crate::group::{Element, Group};
use crate::oracle::{LazyFunction, LazyPermutation, Permutation, RoundFunction};
use crate::rng::{RandomStream, Sampler};

use super::em::pick_outside;

/// Tag of one query in a Ψ transcript.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PsiQuery {
    Forward,
    Inverse,
    F,
    G,
}

/// Cipher pair `(x, y)` over `G²` and the direction it was asked in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CipherPair {
    pub x: FeistelState,
    pub y: FeistelState,
    pub tag: PsiQuery,
}

/// The three transcripts `T_P`, `T_f`, `T_g` and the interleaving of the
/// queries that produced them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiTranscript {
    base: Group,
    cipher: Vec<CipherPair>,
    f: Vec<(Element, Element)>,
    g: Vec<(Element, Element)>,
    order: Vec<PsiQuery>,
}

fn state_key(s: &FeistelState) -> (u64, u64) {
    (s.left.index(), s.right.index())
}

impl PsiTranscript {
    pub fn new(base: Group) -> Self {
        PsiTranscript {
            base,
            cipher: Vec::new(),
            f: Vec::new(),
            g: Vec::new(),
            order: Vec::new(),
        }
    }

    pub fn base(&self) -> &Group {
        &self.base
    }

    pub fn cipher(&self) -> &[CipherPair] {
        &self.cipher
    }

    pub fn f_pairs(&self) -> &[(Element, Element)] {
        &self.f
    }

    pub fn g_pairs(&self) -> &[(Element, Element)] {
        &self.g
    }

    pub fn order(&self) -> &[PsiQuery] {
        &self.order
    }

    pub fn qc(&self) -> usize {
        self.cipher.len()
    }

    pub fn qf(&self) -> usize {
        self.f.len()
    }

    pub fn qg(&self) -> usize {
        self.g.len()
    }

    pub fn push_cipher(&mut self, x: FeistelState, y: FeistelState, tag: PsiQuery) -> Result<()> {
        if !matches!(tag, PsiQuery::Forward | PsiQuery::Inverse) {
            return Err(Error::Domain(
                "cipher pairs are tagged Forward or Inverse".into(),
            ));
        }
        for s in [&x, &y] {
            self.base.check(&s.left)?;
        }
        self.cipher.push(CipherPair { x, y, tag });
        self.order.push(tag);
        Ok(())
    }

    pub fn push_f(&mut self, x: Element, y: Element) -> Result<()> {
        self.base.check(&x)?;
        self.base.check(&y)?;
        self.f.push((x, y));
        self.order.push(PsiQuery::F);
        Ok(())
    }

    pub fn push_g(&mut self, x: Element, y: Element) -> Result<()> {
        self.base.check(&x)?;
        self.base.check(&y)?;
        self.g.push((x, y));
        self.order.push(PsiQuery::G);
        Ok(())
    }

    /// No two cipher pairs share an input or an output, and no oracle
    /// input repeats.
    pub fn is_consistent(&self) -> bool {
        fn distinct<T: Eq + std::hash::Hash>(items: impl Iterator<Item = T>) -> bool {
            let mut seen = std::collections::HashSet::new();
            items.into_iter().all(|t| seen.insert(t))
        }
        distinct(self.cipher.iter().map(|p| state_key(&p.x)))
            && distinct(self.cipher.iter().map(|p| state_key(&p.y)))
            && distinct(self.f.iter().map(|p| p.0.index()))
            && distinct(self.g.iter().map(|p| p.0.index()))
    }

    /// A consistent transcript with uniformly drawn values: `qc` cipher
    /// pairs with distinct inputs and distinct outputs and random
    /// directions, then `qf` and `qg` oracle pairs with distinct inputs.
    pub fn random<S: Sampler + ?Sized>(
        base: &Group,
        qc: usize,
        qf: usize,
        qg: usize,
        rng: &mut S,
    ) -> Result<Self> {
        let square = base.square()?;
        let mut t = PsiTranscript::new(base.clone());
        let mut xs = std::collections::BTreeSet::new();
        let mut ys = std::collections::BTreeSet::new();
        for _ in 0..qc {
            let x = pick_outside(&square, &xs, rng)?;
            let y = pick_outside(&square, &ys, rng)?;
            xs.insert(x.index());
            ys.insert(y.index());
            let tag = if rng.coin() {
                PsiQuery::Forward
            } else {
                PsiQuery::Inverse
            };
            t.push_cipher(
                FeistelState::from_element(&x)?,
                FeistelState::from_element(&y)?,
                tag,
            )?;
        }
        for (n, is_f) in [(qf, true), (qg, false)] {
            let mut used = std::collections::BTreeSet::new();
            for _ in 0..n {
                let a = pick_outside(base, &used, rng)?;
                used.insert(a.index());
                let b = base.sample(rng);
                if is_f {
                    t.push_f(a, b)?;
                } else {
                    t.push_g(a, b)?;
                }
            }
        }
        Ok(t)
    }
}

/// `x_i^R·k^R = x_j''` (BG1) or `y_i^L·(k^L)⁻¹ = x_j''` (BG2) for some
/// cipher pair `i` and g-query `j`.
pub fn badg_detect(sigma: &PsiTranscript, k: &PsiKey) -> Result<bool> {
    let kl_inv = k.left.inv();
    for p in &sigma.cipher {
        let first = p.x.right.op(&k.right)?;
        let last = p.y.left.op(&kl_inv)?;
        if sigma.g.iter().any(|(x2, _)| *x2 == first || *x2 == last) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// `X_i = x_i^L·k^L·g(x_i^R·k^R)`, the input to f in the second round.
pub fn second_round_input(p: &CipherPair, k: &PsiKey, g: &dyn RoundFunction) -> Result<Element> {
    p.x.left.op(&k.left)?.op(&g.eval(&p.x.right.op(&k.right)?)?)
}

/// `Y_i = y_i^R·(k^R)⁻¹·g(y_i^L·(k^L)⁻¹)⁻¹`, the input to f in the third
/// round.
pub fn third_round_input(p: &CipherPair, k: &PsiKey, g: &dyn RoundFunction) -> Result<Element> {
    let gy = g.eval(&p.y.left.op(&k.left.inv())?)?;
    p.y.right.op(&k.right.inv())?.op(&gy.inv())
}

/// Which of the five collision events among f-inputs hold.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BadEvents {
    /// `X_i = X_j`, `i < j`.
    pub b1: bool,
    /// `Y_i = Y_j`, `i < j`.
    pub b2: bool,
    /// `X_i = Y_j`, any `i, j`.
    pub b3: bool,
    /// `X_i = x_j'`.
    pub b4: bool,
    /// `Y_i = x_j'`.
    pub b5: bool,
}

impl BadEvents {
    pub fn any(&self) -> bool {
        self.b1 || self.b2 || self.b3 || self.b4 || self.b5
    }
}

pub fn bad_events(sigma: &PsiTranscript, k: &PsiKey, g: &dyn RoundFunction) -> Result<BadEvents> {
    let xs = sigma
        .cipher
        .iter()
        .map(|p| second_round_input(p, k, g))
        .collect::<Result<Vec<_>>>()?;
    let ys = sigma
        .cipher
        .iter()
        .map(|p| third_round_input(p, k, g))
        .collect::<Result<Vec<_>>>()?;
    let pairwise = |v: &[Element]| (0..v.len()).any(|i| (i + 1..v.len()).any(|j| v[i] == v[j]));
    let hits_f = |v: &[Element]| v.iter().any(|a| sigma.f.iter().any(|(x1, _)| x1 == a));
    Ok(BadEvents {
        b1: pairwise(&xs),
        b2: pairwise(&ys),
        b3: xs.iter().any(|a| ys.contains(a)),
        b4: hits_f(&xs),
        b5: hits_f(&ys),
    })
}

/// True iff any of the five events holds.
pub fn bad_detect(sigma: &PsiTranscript, k: &PsiKey, g: &dyn RoundFunction) -> Result<bool> {
    Ok(bad_events(sigma, k, g)?.any())
}

/// The f-inputs a Ψ evaluation with key `k` and first/last round function
/// `g` would use to map each `x_i` to `y_i`: the state after the first
/// round, computed forward from `x_i`, and the state before the last
/// round, computed backward from `y_i`. The f-oracle inputs follow.
pub fn replay_f_inputs(
    sigma: &PsiTranscript,
    k: &PsiKey,
    g: &dyn RoundFunction,
) -> Result<Vec<Element>> {
    let mut out = Vec::new();
    for p in &sigma.cipher {
        let mixed = FeistelState::new(p.x.left.op(&k.left)?, p.x.right.op(&k.right)?)?;
        let after_first = feistel_round(g, &mixed)?;
        let unmixed =
            FeistelState::new(p.y.left.op(&k.left.inv())?, p.y.right.op(&k.right.inv())?)?;
        let before_last = feistel_round_inv(g, &unmixed)?;
        out.push(after_first.right);
        out.push(before_last.left);
    }
    out.extend(sigma.f.iter().map(|(x, _)| x.clone()));
    Ok(out)
}

/// An f table under which `Ψ_k^{f,g}` maps every `x_i` to `y_i` and which
/// agrees with the f-oracle pairs. `None` when two requirements collide on
/// one input with different values.
pub fn completing_f_table(
    sigma: &PsiTranscript,
    k: &PsiKey,
    g: &dyn RoundFunction,
) -> Result<Option<HashMap<u64, Element>>> {
    let mut table: HashMap<u64, Element> = HashMap::new();
    let mut require = |x: &Element, v: Element| -> bool {
        match table.get(&x.index()) {
            Some(old) => *old == v,
            None => {
                table.insert(x.index(), v);
                true
            }
        }
    };
    for p in &sigma.cipher {
        let xi = second_round_input(p, k, g)?;
        let yi = third_round_input(p, k, g)?;
        // x^R·k^R·f(X) = Y and X·f(Y) = y^L·(k^L)⁻¹
        let f_x = p.x.right.op(&k.right)?.inv().op(&yi)?;
        let f_y = xi.inv().op(&p.y.left)?.op(&k.left.inv())?;
        if !require(&xi, f_x) || !require(&yi, f_y) {
            return Ok(None);
        }
    }
    for (x, y) in &sigma.f {
        if !require(x, y.clone()) {
            return Ok(None);
        }
    }
    Ok(Some(table))
}

/// Frequency of BadG over uniform keys, for a fixed transcript.
pub fn badg_frequency(
    sigma: &PsiTranscript,
    trials: u64,
    rng: &RandomStream,
) -> Result<RateEstimate> {
    let base = sigma.base.clone();
    estimate_rate(trials, rng, "badg", |s| {
        let k = PsiKey::generate(&base, s);
        badg_detect(sigma, &k)
    })
}

/// Frequency of Bad over uniform keys and lazily sampled `g`.
pub fn bad_frequency(
    sigma: &PsiTranscript,
    trials: u64,
    rng: &RandomStream,
) -> Result<RateEstimate> {
    let base = sigma.base.clone();
    estimate_rate(trials, rng, "bad", |s| {
        let k = PsiKey::generate(&base, s);
        let g = LazyFunction::on(base.clone(), s.substream("g"));
        bad_detect(sigma, &k, &g)
    })
}

/// Cipher oracle that repeats old answers on repeated inputs and otherwise
/// answers uniformly over `G²`, so it need not be a permutation.
pub struct RTilde<S = RandomStream> {
    square: Group,
    pairs: Vec<(Element, Element)>,
    inconsistent: bool,
    rng: S,
}

impl<S: Sampler> RTilde<S> {
    pub fn new(base: &Group, rng: S) -> Result<Self> {
        Ok(RTilde {
            square: base.square()?,
            pairs: Vec::new(),
            inconsistent: false,
            rng,
        })
    }

    pub fn domain(&self) -> &Group {
        &self.square
    }

    pub fn pairs(&self) -> &[(Element, Element)] {
        &self.pairs
    }

    /// Whether two recorded pairs agree on one side only.
    pub fn is_inconsistent(&self) -> bool {
        self.inconsistent
    }

    fn record(&mut self, x: Element, y: Element) {
        if self.pairs.iter().any(|(a, b)| (*a == x) != (*b == y)) {
            self.inconsistent = true;
        }
        self.pairs.push((x, y));
    }

    pub fn forward(&mut self, x: &Element) -> Result<Element> {
        self.square.check(x)?;
        if let Some((_, y)) = self.pairs.iter().find(|(a, _)| a == x) {
            let y = y.clone();
            self.pairs.push((x.clone(), y.clone()));
            return Ok(y);
        }
        let y = self.square.sample(&mut self.rng);
        self.record(x.clone(), y.clone());
        Ok(y)
    }

    pub fn backward(&mut self, y: &Element) -> Result<Element> {
        self.square.check(y)?;
        if let Some((x, _)) = self.pairs.iter().find(|(_, b)| b == y) {
            let x = x.clone();
            self.pairs.push((x.clone(), y.clone()));
            return Ok(x);
        }
        let x = self.square.sample(&mut self.rng);
        self.record(x.clone(), y.clone());
        Ok(x)
    }
}

/// Frequency with which `qc` fresh, distinct queries to R̃ (directions
/// alternating) produce an inconsistent transcript.
pub fn rtilde_inconsistency(
    base: &Group,
    qc: usize,
    trials: u64,
    rng: &RandomStream,
) -> Result<RateEstimate> {
    let base = base.clone();
    estimate_rate(trials, rng, "rtilde", |s| {
        let mut oracle = RTilde::new(&base, s.substream("oracle"))?;
        let square = oracle.domain().clone();
        let mut asked_x = std::collections::BTreeSet::new();
        let mut asked_y = std::collections::BTreeSet::new();
        for i in 0..qc {
            if i % 2 == 0 {
                let x = pick_outside(&square, &asked_x, s)?;
                asked_x.insert(x.index());
                let y = oracle.forward(&x)?;
                asked_y.insert(y.index());
            } else {
                let y = pick_outside(&square, &asked_y, s)?;
                asked_y.insert(y.index());
                let x = oracle.backward(&y)?;
                asked_x.insert(x.index());
            }
        }
        Ok(oracle.is_inconsistent())
    })
}

/// Oracle names for f and g in Ψ bundles.
pub const F: &str = "f";
pub const G: &str = "g";

/// `Ψ` with a uniform key and lazily sampled `f`, `g`, exposing the cipher
/// (both directions), f and g, with budgets `(qc, qf, qg)`.
pub fn psi_world(
    base: &Group,
    budgets: (u64, u64, u64),
    rng: &mut RandomStream,
) -> Result<OracleBundle> {
    let f: Rc<dyn RoundFunction> = Rc::new(LazyFunction::on(base.clone(), rng.substream("f")));
    let g: Rc<dyn RoundFunction> = Rc::new(LazyFunction::on(base.clone(), rng.substream("g")));
    let key = PsiKey::generate(base, &mut rng.substream("key"));
    let psi = Psi::new(base.clone(), f.clone(), g.clone(), key)?;
    Ok(bundle(psi, f, g, budgets))
}

/// A lazily sampled permutation of `G²` with independent f and g oracles.
pub fn random_psi_world(
    base: &Group,
    budgets: (u64, u64, u64),
    rng: &mut RandomStream,
) -> Result<OracleBundle> {
    let f: Rc<dyn RoundFunction> = Rc::new(LazyFunction::on(base.clone(), rng.substream("f")));
    let g: Rc<dyn RoundFunction> = Rc::new(LazyFunction::on(base.clone(), rng.substream("g")));
    let perm = LazyPermutation::new(base.square()?, rng.substream("perm"));
    Ok(bundle(perm, f, g, budgets))
}

fn bundle(
    cipher: impl Permutation + 'static,
    f: Rc<dyn RoundFunction>,
    g: Rc<dyn RoundFunction>,
    (qc, qf, qg): (u64, u64, u64),
) -> OracleBundle {
    OracleBundle::new(cipher)
        .with_inverse()
        .with_function(F, f)
        .with_function(G, g)
        .with_budget(CIPHER, qc)
        .with_budget(F, qf)
        .with_budget(G, qg)
}

fn choose2(q: u64) -> f64 {
    (q * q.saturating_sub(1)) as f64 / 2.0
}

/// `2·q_g·q_c/|G|`.
pub fn badg_bound(qc: u64, qg: u64, n: u64) -> f64 {
    2.0 * (qg * qc) as f64 / n as f64
}

/// `(q_c² + 2q_f·q_c + 2·C(q_c,2))/|G|`.
pub fn bad_bound(qc: u64, qf: u64, n: u64) -> f64 {
    ((qc * qc + 2 * qf * qc) as f64 + 2.0 * choose2(qc)) / n as f64
}

/// `C(q_c,2)/|G|²`.
pub fn inconsistency_bound(qc: u64, n: u64) -> f64 {
    choose2(qc) / (n as f64 * n as f64)
}

fn tail(qc: u64, n: u64) -> f64 {
    let nf = n as f64;
    2.0 * choose2(qc) * (2.0 / nf + 1.0 / (nf * nf))
}

/// The advantage bound as stated:
/// `(2q_c² + 4q_f q_c + 4q_g q_c + q_c² − q_c)/|G| + 2·C(q_c,2)·(2/|G| + 1/|G|²)`.
pub fn psi_bound_stated(qc: u64, qf: u64, qg: u64, n: u64) -> f64 {
    let lead = (2 * qc * qc + 4 * qf * qc + 4 * qg * qc + qc * qc) as f64 - qc as f64;
    lead / n as f64 + tail(qc, n)
}

/// The same bound with the last line of its derivation:
/// `(2q_c² + 4q_g q_c + 4q_f q_c + 2q_c² − 2q_c)/|G| + 2·C(q_c,2)·(2/|G| + 1/|G|²)`.
pub fn psi_bound_proof_final(qc: u64, qf: u64, qg: u64, n: u64) -> f64 {
    let lead = (2 * qc * qc + 4 * qg * qc + 4 * qf * qc + 2 * qc * qc) as f64 - 2.0 * qc as f64;
    lead / n as f64 + tail(qc, n)
}

/// `2(3q² − 2q)/|G| + (q² − q)/|G|²` for `q` total queries.
pub fn psi_total_query_bound(q: u64, n: u64) -> f64 {
    let (qf, nf) = (q as f64, n as f64);
    2.0 * (3.0 * qf * qf - 2.0 * qf) / nf + (qf * qf - qf) / (nf * nf)
}

/// The summary variant `2(3q² − q)/|G| + (q² − q)/|G|²`.
pub fn psi_total_query_bound_summary(q: u64, n: u64) -> f64 {
    let (qf, nf) = (q as f64, n as f64);
    2.0 * (3.0 * qf * qf - qf) / nf + (qf * qf - qf) / (nf * nf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u64) -> Group {
        Group::cyclic(n).unwrap()
    }

    fn st(g: &Group, l: u64, r: u64) -> FeistelState {
        FeistelState::new(g.element(l).unwrap(), g.element(r).unwrap()).unwrap()
    }

    #[test]
    fn bound_reference_values() {
        let a = psi_bound_stated(4, 2, 2, 256);
        let b = psi_bound_proof_final(4, 2, 2, 256);
        assert!((a - 0.515_808_105).abs() < 1e-8, "{a}");
        assert!((b - 0.562_683_105).abs() < 1e-8, "{b}");
        assert!(psi_total_query_bound_summary(5, 100) > psi_total_query_bound(5, 100));
        // with q_f = q_g = 0 the stated lead term is 3q_c² − q_c
        assert!(
            (psi_bound_stated(3, 0, 0, 1 << 20) - (24.0 / (1 << 20) as f64 + tail(3, 1 << 20)))
                .abs()
                < 1e-15
        );
    }

    #[test]
    fn total_query_bound_dominates_psi_bound() {
        for (qc, qf, qg) in [(1, 0, 0), (4, 2, 2), (3, 7, 1), (10, 0, 5)] {
            let q = qc + qf + qg;
            for n in [16u64, 256, 65536] {
                assert!(psi_bound_stated(qc, qf, qg, n) <= psi_total_query_bound(q, n) + 1e-12);
            }
        }
    }

    #[test]
    fn no_g_queries_never_badg() {
        let g = z(16);
        let mut rng = RandomStream::new(1, "badg");
        let sigma = PsiTranscript::random(&g, 4, 2, 0, &mut rng).unwrap();
        for _ in 0..100 {
            let k = PsiKey::generate(&g, &mut rng);
            assert!(!badg_detect(&sigma, &k).unwrap());
        }
    }

    #[test]
    fn planted_badg() {
        let g = z(16);
        let mut rng = RandomStream::new(2, "planted");
        let k = PsiKey::generate(&g, &mut rng);
        let mut sigma = PsiTranscript::new(g.clone());
        sigma
            .push_cipher(st(&g, 3, 5), st(&g, 7, 9), PsiQuery::Forward)
            .unwrap();
        sigma
            .push_g(
                g.element(5).unwrap().op(&k.right).unwrap(),
                g.element(0).unwrap(),
            )
            .unwrap();
        assert!(badg_detect(&sigma, &k).unwrap());
        let mut sigma = PsiTranscript::new(g.clone());
        sigma
            .push_cipher(st(&g, 3, 5), st(&g, 7, 9), PsiQuery::Inverse)
            .unwrap();
        sigma
            .push_g(
                g.element(7).unwrap().op(&k.left.inv()).unwrap(),
                g.element(0).unwrap(),
            )
            .unwrap();
        assert!(badg_detect(&sigma, &k).unwrap());
    }

    #[test]
    fn no_cipher_queries_never_bad() {
        let g = z(8);
        let mut rng = RandomStream::new(3, "nobad");
        let sigma = PsiTranscript::random(&g, 0, 5, 3, &mut rng).unwrap();
        for i in 0..50 {
            let k = PsiKey::generate(&g, &mut rng);
            let gf = LazyFunction::on(g.clone(), rng.substream(&i.to_string()));
            assert!(!bad_detect(&sigma, &k, &gf).unwrap());
        }
    }

    #[test]
    fn planted_b4() {
        let g = z(16);
        let mut rng = RandomStream::new(4, "b4");
        let k = PsiKey::generate(&g, &mut rng);
        let gf = LazyFunction::on(g.clone(), rng.substream("g"));
        let mut sigma = PsiTranscript::new(g.clone());
        sigma
            .push_cipher(st(&g, 1, 2), st(&g, 3, 4), PsiQuery::Forward)
            .unwrap();
        let x1 = second_round_input(&sigma.cipher()[0], &k, &gf).unwrap();
        sigma.push_f(x1, g.element(0).unwrap()).unwrap();
        assert!(bad_events(&sigma, &k, &gf).unwrap().b4);
    }

    #[test]
    fn psi_evaluation_uses_the_derived_f_inputs() {
        // run Ψ with a recording f and compare its two f-inputs with X and Y
        let base = Group::symmetric(3).unwrap();
        for t in 0..200 {
            let mut rng = RandomStream::new(t, "inputs");
            let k = PsiKey::generate(&base, &mut rng);
            let g: Rc<dyn RoundFunction> =
                Rc::new(LazyFunction::on(base.clone(), rng.substream("g")));
            let inner = LazyFunction::on(base.clone(), rng.substream("f"));
            let seen = Rc::new(std::cell::RefCell::new(Vec::new()));
            let log = seen.clone();
            let f: Rc<dyn RoundFunction> = Rc::new(move |x: &Element| {
                log.borrow_mut().push(x.clone());
                inner.eval(x)
            });
            let psi = Psi::new(base.clone(), f, g.clone(), k.clone()).unwrap();
            let x = FeistelState::new(base.sample(&mut rng), base.sample(&mut rng)).unwrap();
            let y = psi.encrypt(&x).unwrap();
            let pair = CipherPair {
                x,
                y,
                tag: PsiQuery::Forward,
            };
            let inputs = seen.borrow().clone();
            assert_eq!(inputs[0], second_round_input(&pair, &k, &*g).unwrap());
            assert_eq!(inputs[1], third_round_input(&pair, &k, &*g).unwrap());
        }
    }

    #[test]
    fn no_bad_event_means_distinct_f_inputs_and_a_completing_f() {
        let mut bad_seen = 0;
        for base in [z(5), Group::symmetric(3).unwrap()] {
            for t in 0..300 {
                let mut rng = RandomStream::new(t, "complete");
                let sigma = PsiTranscript::random(&base, 3, 2, 1, &mut rng).unwrap();
                let k = PsiKey::generate(&base, &mut rng);
                let g: Rc<dyn RoundFunction> =
                    Rc::new(LazyFunction::on(base.clone(), rng.substream("g")));
                let bad = bad_detect(&sigma, &k, &*g).unwrap();
                let inputs = replay_f_inputs(&sigma, &k, &*g).unwrap();
                let distinct = (0..inputs.len())
                    .all(|i| (i + 1..inputs.len()).all(|j| inputs[i] != inputs[j]));
                assert_eq!(!bad, distinct);
                if bad {
                    bad_seen += 1;
                    continue;
                }
                let table = completing_f_table(&sigma, &k, &*g)
                    .unwrap()
                    .expect("distinct inputs");
                let rest = LazyFunction::on(base.clone(), rng.substream("rest"));
                let f: Rc<dyn RoundFunction> =
                    Rc::new(move |x: &Element| match table.get(&x.index()) {
                        Some(v) => Ok(v.clone()),
                        None => rest.eval(x),
                    });
                let psi = Psi::new(base.clone(), f.clone(), g.clone(), k.clone()).unwrap();
                for p in sigma.cipher() {
                    assert_eq!(psi.encrypt(&p.x).unwrap(), p.y);
                }
                for (x, y) in sigma.f_pairs() {
                    assert_eq!(f.eval(x).unwrap(), *y);
                }
            }
        }
        assert!(bad_seen > 0);
    }

    #[test]
    fn rtilde_rules() {
        let base = z(3);
        let mut o = RTilde::new(&base, RandomStream::new(5, "rt")).unwrap();
        let sq = o.domain().clone();
        let x = sq.element(4).unwrap();
        let y = o.forward(&x).unwrap();
        assert_eq!(o.forward(&x).unwrap(), y);
        assert_eq!(o.backward(&y).unwrap(), x);
        assert!(!o.is_inconsistent());
        // fresh queries until a collision makes the table inconsistent
        let mut hit = false;
        for i in 0..9 {
            let x = sq.element(i).unwrap();
            if o.pairs().iter().any(|(a, _)| *a == x) {
                continue;
            }
            o.forward(&x).unwrap();
            hit |= o.is_inconsistent();
        }
        let ys: std::collections::HashSet<u64> = o.pairs().iter().map(|(_, b)| b.index()).collect();
        let xs: std::collections::HashSet<u64> = o.pairs().iter().map(|(a, _)| a.index()).collect();
        assert_eq!(hit, ys.len() < xs.len());
    }

    #[test]
    fn rtilde_inconsistency_rate_is_small() {
        let est = rtilde_inconsistency(&z(4), 4, 20_000, &RandomStream::new(6, "rate")).unwrap();
        // exact: 1 − Π_{i<4} (1 − i/16) for distinct fresh queries
        let exact = 1.0 - (15.0 / 16.0) * (14.0 / 16.0) * (13.0 / 16.0);
        assert!((est.rate - exact).abs() < 0.015, "{} vs {exact}", est.rate);
        assert!(est.rate <= inconsistency_bound(4, 4) + est.ci_halfwidth);
    }

    #[test]
    fn random_transcripts_are_consistent() {
        let g = z(4);
        let mut rng = RandomStream::new(7, "consistent");
        for _ in 0..100 {
            let t = PsiTranscript::random(&g, 6, 3, 3, &mut rng).unwrap();
            assert!(t.is_consistent());
            assert_eq!((t.qc(), t.qf(), t.qg()), (6, 3, 3));
            assert_eq!(t.order().len(), 12);
        }
    }
}
