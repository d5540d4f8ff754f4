//! Named experiments. Each one turns a config into result rows and has a
//! smoke-test flag set that also supplies its default settings.

use std::rc::Rc;

use grouplab::attack::forgery::{
    random_cracker, random_forger, run_cp_game, run_efp_game, slide_cracker, slide_forger,
};
use grouplab::attack::slide::{slide_attack, SlideMatching};
use grouplab::attack::{
    em_ideal_world, em_key_guess_distinguisher, em_real_world, em_slide_distinguisher,
    em_translation_distinguisher, estimate_rate, feistel1_distinguisher, feistel2_distinguisher,
    feistel3_sprp_attack, feistel_world, hoeffding_halfwidth, random_world, run_distinguisher_game,
    sc_translation_distinguisher, sc_world, AdvantageEstimate, Distinguisher, EmGame, WorldFactory,
};
use grouplab::em::{EmKey, EmMultiKey, EvenMansour};
use grouplab::feistel::{base_of_square, Feistel, Psi, PsiKey};
use grouplab::games::psi::{
    bad_bound, bad_frequency, badg_bound, badg_frequency, inconsistency_bound,
    psi_bound_proof_final, psi_bound_stated, psi_total_query_bound, psi_total_query_bound_summary,
    psi_world, random_psi_world, rtilde_inconsistency,
};
use grouplab::games::{
    bad_key_count, script_catalog, transcript_distribution, GameKind, PsiTranscript, TranscriptSets,
};
use grouplab::shuffle::{
    sc_cca_bound, sc_mixing_bound, sc_single_card_distribution, sc_summary_bound,
    single_card_tvd_closed_form, sn_round, sn_shuffle, sn_single_card_distribution, tvd,
    Distribution, ScootOrNot, ShuffleParams, SwapOrNot, Weight,
};
use grouplab::{
    Element, LazyBitFunction, LazyFunction, LazyPermutation, Permutation, RandomStream,
    RoundFunction,
};
use num_rational::BigRational;

use crate::config::{ExperimentConfig, Settings};
use crate::error::CliError;
use crate::output::{ResultRow, RowContext, Value};

type Rows = Result<Vec<ResultRow>, CliError>;

pub struct Experiment {
    pub name: &'static str,
    pub about: &'static str,
    /// `run` flags of the documented smoke test, seed excluded.
    pub smoke: &'static str,
    run: fn(&ExperimentConfig, &RowContext, &RandomStream) -> Rows,
}

impl Experiment {
    pub fn smoke_settings(&self) -> Settings {
        Settings::from_flags(self.smoke.split_whitespace()).expect("smoke flags are valid")
    }

    /// The full smoke-test command line.
    pub fn smoke_command(&self) -> String {
        format!(
            "grouplab run --experiment {} --seed 1 {}",
            self.name, self.smoke
        )
    }
}

pub const CATALOG: &[Experiment] = &[
    Experiment {
        name: "roundtrip",
        about: "decrypt(encrypt(x)) = x for every cipher on one group",
        smoke: "--group zmod:97 --trials 2000 --r 4",
        run: roundtrip,
    },
    Experiment {
        name: "slide-attack",
        about: "Even-Mansour key recovery, cross-index vs same-index matching",
        smoke: "--group zmod:1024 --d 32 --trials 2000",
        run: slide,
    },
    Experiment {
        name: "feistel1",
        about: "one-round Feistel distinguisher (group is G×G)",
        smoke: "--group prod:zmod:97,zmod:97 --trials 1000",
        run: feistel1,
    },
    Experiment {
        name: "feistel2",
        about: "two-round Feistel distinguisher (group is G×G)",
        smoke: "--group prod:zmod:97,zmod:97 --trials 1000",
        run: feistel2,
    },
    Experiment {
        name: "feistel3-sprp",
        about: "three-round Feistel attack with one decryption query (group is G×G)",
        smoke: "--group prod:zmod:7,zmod:7 --trials 1000",
        run: feistel3,
    },
    Experiment {
        name: "em-sprp",
        about: "Even-Mansour distinguishers against the 2st/|G| bound",
        smoke: "--group zmod:65536 --s 16 --t 16 --d 12 --trials 10000",
        run: em_sprp,
    },
    Experiment {
        name: "bad-keys",
        about: "bad-key count and fraction over random transcripts",
        smoke: "--group zmod:64 --s 4 --t 4 --trials 100",
        run: bad_keys,
    },
    Experiment {
        name: "psi-bad-events",
        about: "BadG and Bad frequencies on 20 random transcripts (group is G×G)",
        smoke: "--group prod:zmod:16,zmod:16 --qc 2 --qf 2 --qg 2 --trials 2000",
        run: psi_bad_events,
    },
    Experiment {
        name: "psi-sprp",
        about: "distinguishers against the four-round keyed Feistel (group is G×G)",
        smoke: "--group prod:zmod:256,zmod:256 --qc 4 --qf 2 --qg 2 --trials 10000",
        run: psi_sprp,
    },
    Experiment {
        name: "game-equivalence",
        about: "exact game laws and bad-flag probabilities for every script",
        smoke: "--group zmod:3 --trials 1",
        run: game_equivalence,
    },
    Experiment {
        name: "sc-mixing",
        about: "exact single-card distance of Scoot-or-Not from uniform",
        smoke: "--group zmod:8 --r 10 --trials 1",
        run: sc_mixing,
    },
    Experiment {
        name: "sc-translation",
        about: "two-query translation test against Scoot-or-Not",
        smoke: "--group zmod:101 --r 16 --trials 10000",
        run: sc_translation,
    },
    Experiment {
        name: "sn-shuffle",
        about: "Swap-or-Not bijectivity, round involution and single-card distance",
        smoke: "--group zmod:52 --r 16 --trials 100",
        run: sn_shuffle_checks,
    },
    Experiment {
        name: "efp",
        about: "forgery game: random and slide-attack forgers",
        smoke: "--group zmod:256 --s 48 --t 48 --d 16 --trials 1000",
        run: efp,
    },
    Experiment {
        name: "cp",
        about: "cracking game: random and slide-attack crackers",
        smoke: "--group zmod:256 --s 48 --t 48 --d 16 --trials 1000",
        run: cp,
    },
    Experiment {
        name: "bounds",
        about: "bound variants side by side (N = |group|)",
        smoke: "--group zmod:16 --q 4 --r 20 --qc 4 --qf 2 --qg 2 --trials 1",
        run: bounds,
    },
    Experiment {
        name: "rtilde",
        about: "inconsistency rate of the lazily answering cipher oracle (group is G×G)",
        smoke: "--group prod:zmod:16,zmod:16 --qc 4 --trials 100000",
        run: rtilde,
    },
];

pub fn find(name: &str) -> Option<&'static Experiment> {
    CATALOG.iter().find(|e| e.name == name)
}

/// Runs the configured experiment. Deterministic in `(config, seed)`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Rows {
    let experiment =
        find(&cfg.experiment).ok_or_else(|| CliError::UnknownExperiment(cfg.experiment.clone()))?;
    let ctx = RowContext {
        experiment: cfg.experiment.clone(),
        group: cfg.group.to_string(),
        params: cfg.params(),
    };
    let rng = RandomStream::new(cfg.seed, cfg.experiment.clone());
    (experiment.run)(cfg, &ctx, &rng).map_err(|e| match e {
        CliError::Run { source, .. } => CliError::Run {
            experiment: cfg.experiment.clone(),
            source,
        },
        other => other,
    })
}

fn rate(
    cfg: &ExperimentConfig,
    rng: &RandomStream,
    label: &str,
    trial: impl Fn(&mut RandomStream) -> grouplab::Result<bool> + Sync,
) -> Result<f64, CliError> {
    Ok(estimate_rate(cfg.trials, rng, label, trial)?.rate)
}

fn world_rate<W: WorldFactory, D: Distinguisher>(
    cfg: &ExperimentConfig,
    rng: &RandomStream,
    label: &str,
    world: &W,
    d: &D,
) -> Result<f64, CliError> {
    rate(cfg, rng, label, |s| {
        d(
            &world(&mut s.substream("world"))?,
            &mut s.substream("adversary"),
        )
    })
}

fn advantage<R: WorldFactory, I: WorldFactory, D: Distinguisher>(
    cfg: &ExperimentConfig,
    rng: &RandomStream,
    label: &str,
    real: R,
    ideal: I,
    d: D,
) -> Result<AdvantageEstimate, CliError> {
    Ok(run_distinguisher_game(
        real,
        ideal,
        d,
        cfg.trials,
        &rng.substream(label),
    )?)
}

fn ci(cfg: &ExperimentConfig) -> f64 {
    hoeffding_halfwidth(cfg.trials)
}

fn ratio(r: &BigRational) -> Value {
    Value::exact(r.numer(), r.denom())
}

fn round_trips(p: &dyn Permutation, x: &Element) -> grouplab::Result<bool> {
    Ok(p.backward(&p.forward(x)?)? == *x && p.forward(&p.backward(x)?)? == *x)
}

fn roundtrip(cfg: &ExperimentConfig, ctx: &RowContext, rng: &RandomStream) -> Rows {
    let g = cfg.group.clone();
    let rounds = cfg.budget("r")? as usize;
    let sq = g.square()?;
    let lazy_fn =
        |s: RandomStream| Rc::new(LazyFunction::on(g.clone(), s)) as Rc<dyn RoundFunction>;
    type Build<'a> =
        Box<dyn Fn(&RandomStream) -> grouplab::Result<Box<dyn Permutation>> + Sync + 'a>;
    let mut ciphers: Vec<(&str, Build, bool)> = vec![
        (
            "even-mansour",
            Box::new(|s: &RandomStream| {
                let p = Rc::new(LazyPermutation::new(g.clone(), s.substream("p")));
                Ok(Box::new(EvenMansour::new(
                    p,
                    EmKey::generate(&g, &mut s.substream("k")),
                )?) as Box<dyn Permutation>)
            }),
            false,
        ),
        (
            "multi-round-even-mansour",
            Box::new(|s: &RandomStream| {
                let mut ks = s.substream("k");
                let keys = (0..rounds.max(1)).map(|_| g.sample(&mut ks)).collect();
                let perms = (0..rounds.max(1))
                    .map(|i| {
                        Rc::new(LazyPermutation::new(
                            g.clone(),
                            s.substream(&format!("p/{i}")),
                        )) as Rc<dyn Permutation>
                    })
                    .collect();
                Ok(Box::new(EmMultiKey::new(keys, perms)?) as Box<dyn Permutation>)
            }),
            false,
        ),
        (
            "feistel",
            Box::new(|s: &RandomStream| {
                Ok(Box::new(Feistel::random(g.clone(), rounds, s)?) as Box<dyn Permutation>)
            }),
            true,
        ),
        (
            "psi",
            Box::new(|s: &RandomStream| {
                let key = PsiKey::generate(&g, &mut s.substream("k"));
                Ok(Box::new(Psi::new(
                    g.clone(),
                    lazy_fn(s.substream("f")),
                    lazy_fn(s.substream("g")),
                    key,
                )?) as Box<dyn Permutation>)
            }),
            true,
        ),
        (
            "scoot-or-not",
            Box::new(|s: &RandomStream| {
                Ok(
                    Box::new(ScootOrNot(ShuffleParams::random(g.clone(), rounds, s)))
                        as Box<dyn Permutation>,
                )
            }),
            false,
        ),
    ];
    if g.is_abelian() {
        ciphers.push((
            "swap-or-not",
            Box::new(|s: &RandomStream| {
                Ok(
                    Box::new(SwapOrNot(ShuffleParams::random(g.clone(), rounds, s)))
                        as Box<dyn Permutation>,
                )
            }),
            false,
        ));
    }
    let mut rows = vec![];
    for (name, build, on_square) in &ciphers {
        let domain = if *on_square { &sq } else { &g };
        let ok = estimate_rate(cfg.trials, rng, name, |s| {
            let cipher = build(&s.substream("cipher"))?;
            round_trips(&*cipher, &domain.sample(s))
        })?;
        let failures = ok.trials - ok.successes;
        rows.push(ctx.exact(
            &format!("{name}-failures"),
            Value::exact(failures, cfg.trials),
            "no failures",
            Value::exact(0, cfg.trials),
        ));
    }
    Ok(rows)
}

fn slide(cfg: &ExperimentConfig, ctx: &RowContext, rng: &RandomStream) -> Rows {
    let g = cfg.group.clone();
    let d = cfg.budget("d")? as usize;
    let n = g.order() as f64;
    let run = |matching: SlideMatching, label: &str| {
        rate(cfg, rng, label, |s| {
            let perm = Rc::new(LazyPermutation::new(g.clone(), s.substream("p")));
            let key = EmKey::generate(&g, &mut s.substream("k"));
            let em = EvenMansour::new(perm.clone(), key.clone())?;
            let found = slide_attack(
                &g,
                |m: &Element| em.forward(m),
                |x: &Element| perm.forward(x),
                d,
                5,
                matching,
                &mut s.substream("adversary"),
            )?;
            Ok(found.as_ref() == Some(key.element()))
        })
    };
    let cross = run(SlideMatching::CrossIndex, "cross")?;
    let same = run(SlideMatching::SameIndex, "same")?;
    let birthday = 1.0 - (1.0 - 1.0 / n).powf((d * d) as f64);
    Ok(vec![
        ctx.target(
            "cross-index-success",
            cross,
            ci(cfg),
            "1-(1-1/|G|)^(d^2)",
            birthday,
        ),
        ctx.target(
            "same-index-success",
            same,
            ci(cfg),
            "1-(1-1/|G|)^d",
            1.0 - (1.0 - 1.0 / n).powf(d as f64),
        ),
    ])
}

fn short_feistel(
    cfg: &ExperimentConfig,
    ctx: &RowContext,
    rng: &RandomStream,
    rounds: usize,
) -> Rows {
    let base = base_of_square(&cfg.group)?;
    let n = base.order() as f64;
    let (ideal_name, ideal_rate): (&str, f64) = if rounds == 1 {
        ("1/|G|", 1.0 / n)
    } else {
        ("|G|/(|G|^2-1)", n / (n * n - 1.0))
    };
    let d = if rounds == 1 {
        feistel1_distinguisher
    } else {
        feistel2_distinguisher
    };
    let est = advantage(
        cfg,
        rng,
        "game",
        feistel_world(base, rounds),
        random_world(cfg.group.clone()),
        d,
    )?;
    Ok(vec![
        ctx.exact(
            "accept-vs-feistel",
            Value::decimal(est.p_real),
            "1",
            Value::decimal(1.0),
        ),
        ctx.target(
            "accept-vs-random",
            est.p_ideal,
            est.ci_halfwidth,
            ideal_name,
            ideal_rate,
        ),
        ctx.lower(
            "advantage",
            est.advantage,
            est.ci_halfwidth,
            &format!("1-{ideal_name}"),
            1.0 - ideal_rate,
        ),
    ])
}

fn feistel1(cfg: &ExperimentConfig, ctx: &RowContext, rng: &RandomStream) -> Rows {
    short_feistel(cfg, ctx, rng, 1)
}

fn feistel2(cfg: &ExperimentConfig, ctx: &RowContext, rng: &RandomStream) -> Rows {
    short_feistel(cfg, ctx, rng, 2)
}

fn feistel3(cfg: &ExperimentConfig, ctx: &RowContext, rng: &RandomStream) -> Rows {
    let base = base_of_square(&cfg.group)?;
    let n = base.order() as f64;
    let est = advantage(
        cfg,
        rng,
        "game",
        feistel_world(base, 3),
        random_world(cfg.group.clone()),
        feistel3_sprp_attack,
    )?;
    Ok(vec![
        ctx.exact(
            "accept-vs-feistel3",
            Value::decimal(est.p_real),
            "1",
            Value::decimal(1.0),
        ),
        ctx.upper(
            "accept-vs-random",
            est.p_ideal,
            est.ci_halfwidth,
            "3/|G|",
            3.0 / n,
        ),
        ctx.info(
            "advantage",
            Value::decimal(est.advantage),
            Some(est.ci_halfwidth),
            "",
            None,
        ),
    ])
}

fn em_sprp(cfg: &ExperimentConfig, ctx: &RowContext, rng: &RandomStream) -> Rows {
    let game = EmGame {
        group: cfg.group.clone(),
        s: cfg.budget("s")?,
        t: cfg.budget("t")?,
    };
    let d = cfg.budget("d")? as usize;
    let verify = (game.s.min(game.t) as usize).saturating_sub(d).clamp(1, 2);
    let bound = 2.0 * (game.s * game.t) as f64 / game.group.order() as f64;
    let (real, ideal) = (em_real_world(&game), em_ideal_world(&game));
    let results = [
        (
            "slide-advantage",
            advantage(
                cfg,
                rng,
                "slide",
                &real,
                &ideal,
                em_slide_distinguisher(d, verify),
            )?,
        ),
        (
            "key-guess-advantage",
            advantage(cfg, rng, "guess", &real, &ideal, em_key_guess_distinguisher)?,
        ),
        (
            "translation-advantage",
            advantage(
                cfg,
                rng,
                "translation",
                &real,
                &ideal,
                em_translation_distinguisher,
            )?,
        ),
    ];
    Ok(results
        .iter()
        .map(|(name, e)| ctx.upper(name, e.advantage, e.ci_halfwidth, "2st/|G|", bound))
        .collect())
}

fn bad_keys(cfg: &ExperimentConfig, ctx: &RowContext, rng: &RandomStream) -> Rows {
    let g = &cfg.group;
    let (s, t) = (cfg.budget("s")?, cfg.budget("t")?);
    let n = g.order();
    let mut max_count = 0;
    let mut total = 0u64;
    let mut stream = rng.substream("transcripts");
    for _ in 0..cfg.trials {
        let sets = TranscriptSets::random(g, s as usize, t as usize, &mut stream)?;
        let count = bad_key_count(g, &sets)?;
        max_count = max_count.max(count);
        total += count;
    }
    let limit = 2 * s * t;
    Ok(vec![
        ctx.upper(
            "max-bad-key-count",
            max_count as f64,
            0.0,
            "2st",
            limit as f64,
        ),
        ctx.upper(
            "max-bad-key-fraction",
            max_count as f64 / n as f64,
            0.0,
            "2st/|G|",
            limit as f64 / n as f64,
        ),
        ctx.info(
            "mean-bad-key-fraction",
            Value::decimal(total as f64 / (cfg.trials * n) as f64),
            None,
            "",
            None,
        ),
    ])
}

fn psi_bad_events(cfg: &ExperimentConfig, ctx: &RowContext, rng: &RandomStream) -> Rows {
    let base = base_of_square(&cfg.group)?;
    let n = base.order();
    let (qc, qf, qg) = (cfg.budget("qc")?, cfg.budget("qf")?, cfg.budget("qg")?);
    let mut worst_g: f64 = 0.0;
    let mut worst_b: f64 = 0.0;
    for j in 0..20 {
        let sigma = PsiTranscript::random(
            &base,
            qc as usize,
            qf as usize,
            qg as usize,
            &mut rng.substream(&format!("sigma/{j}")),
        )?;
        worst_g = worst_g
            .max(badg_frequency(&sigma, cfg.trials, &rng.substream(&format!("badg/{j}")))?.rate);
        worst_b = worst_b
            .max(bad_frequency(&sigma, cfg.trials, &rng.substream(&format!("bad/{j}")))?.rate);
    }
    Ok(vec![
        ctx.upper(
            "max-badg-frequency",
            worst_g,
            ci(cfg),
            "2*qg*qc/|G|",
            badg_bound(qc, qg, n),
        ),
        ctx.upper(
            "max-bad-frequency",
            worst_b,
            ci(cfg),
            "(qc^2+2*qf*qc+2*C(qc,2))/|G|",
            bad_bound(qc, qf, n),
        ),
    ])
}

fn psi_sprp(cfg: &ExperimentConfig, ctx: &RowContext, rng: &RandomStream) -> Rows {
    let base = base_of_square(&cfg.group)?;
    let n = base.order();
    let (qc, qf, qg) = (cfg.budget("qc")?, cfg.budget("qf")?, cfg.budget("qg")?);
    let stated = psi_bound_stated(qc, qf, qg, n);
    let proof_final = psi_bound_proof_final(qc, qf, qg, n);
    let bound = stated.max(proof_final);
    let real = |s: &mut RandomStream| psi_world(&base, (qc, qf, qg), s);
    let ideal = |s: &mut RandomStream| random_psi_world(&base, (qc, qf, qg), s);
    let f3 = advantage(cfg, rng, "feistel3", real, ideal, feistel3_sprp_attack)?;
    let tr = advantage(
        cfg,
        rng,
        "translation",
        real,
        ideal,
        sc_translation_distinguisher,
    )?;
    Ok(vec![
        ctx.upper(
            "feistel3-advantage",
            f3.advantage,
            f3.ci_halfwidth,
            "max(stated,proof-final)",
            bound,
        ),
        ctx.upper(
            "translation-advantage",
            tr.advantage,
            tr.ci_halfwidth,
            "max(stated,proof-final)",
            bound,
        ),
        ctx.info(
            "bound-stated-vs-proof-final",
            Value::decimal(stated),
            None,
            "proof-final",
            Some(Value::decimal(proof_final)),
        ),
    ])
}

fn game_equivalence(cfg: &ExperimentConfig, ctx: &RowContext, _rng: &RandomStream) -> Rows {
    let g = &cfg.group;
    let mut rows = vec![];
    for script in script_catalog() {
        let x = transcript_distribution(GameKind::X, &script, g)?;
        let xp = transcript_distribution(GameKind::XPrime, &script, g)?;
        let r = transcript_distribution(GameKind::R, &script, g)?;
        let rp = transcript_distribution(GameKind::RPrime, &script, g)?;
        let name = script.name;
        rows.push(ctx.exact(
            &format!("{name}:tvd(X,X')"),
            ratio(&x.distance(&xp)),
            "0",
            Value::exact(0, 1),
        ));
        rows.push(ctx.exact(
            &format!("{name}:Pr_R[BAD]"),
            ratio(&r.bad),
            "Pr_R'[BAD]",
            ratio(&rp.bad),
        ));
        rows.push(ctx.exact(
            &format!("{name}:Pr_X[BAD]"),
            ratio(&x.bad),
            "Pr_R[BAD]",
            ratio(&r.bad),
        ));
    }
    Ok(rows)
}

fn sc_mixing(cfg: &ExperimentConfig, ctx: &RowContext, _rng: &RandomStream) -> Rows {
    let g = &cfg.group;
    let r = cfg.budget("r")?;
    let n = g.order();
    let d = sc_single_card_distribution(g, r as u32, &g.identity())?;
    let dist = tvd(&d, &Distribution::uniform(g)?)?;
    let closed = single_card_tvd_closed_form(n, r as u32);
    let mut rows = vec![ctx.exact("tvd-exact", ratio(&dist), "2^-r(1-1/|G|)", ratio(&closed))];
    if r >= 1 {
        rows.push(ctx.upper(
            "tvd",
            dist.to_f64(),
            0.0,
            "mixing bound q=1",
            sc_mixing_bound(n, 1, r)?,
        ));
    }
    Ok(rows)
}

fn sc_translation(cfg: &ExperimentConfig, ctx: &RowContext, rng: &RandomStream) -> Rows {
    let g = cfg.group.clone();
    let r = cfg.budget("r")?;
    let n = g.order();
    let on_sc = world_rate(
        cfg,
        rng,
        "sc",
        &sc_world(g.clone(), r as usize),
        &sc_translation_distinguisher,
    )?;
    let on_random = world_rate(
        cfg,
        rng,
        "random",
        &random_world(g.clone()),
        &sc_translation_distinguisher,
    )?;
    let mut rows = vec![
        ctx.exact(
            "accept-vs-sc",
            Value::decimal(on_sc),
            "1",
            Value::decimal(1.0),
        ),
        ctx.upper(
            "accept-vs-random",
            on_random,
            ci(cfg),
            "2/|G|",
            2.0 / n as f64,
        ),
    ];
    if n >= 2 && r >= 1 {
        rows.push(ctx.info(
            "two-query-advantage",
            Value::decimal(on_sc - on_random),
            Some(ci(cfg)),
            "mixing bound q=2",
            Some(Value::decimal(sc_mixing_bound(n, 2, r)?)),
        ));
    }
    Ok(rows)
}

fn sn_shuffle_checks(cfg: &ExperimentConfig, ctx: &RowContext, rng: &RandomStream) -> Rows {
    let g = cfg.group.clone();
    let r = cfg.budget("r")?;
    let n = g.order();
    let elems = g.enumerate()?;
    let bijective = estimate_rate(cfg.trials, rng, "bijective", |s| {
        let params = ShuffleParams::random(g.clone(), r as usize, s);
        let mut seen = vec![false; n as usize];
        for x in &elems {
            seen[sn_shuffle(&params, x)?.index() as usize] = true;
        }
        Ok(seen.into_iter().all(|b| b))
    })?;
    let involution = estimate_rate(cfg.trials, rng, "involution", |s| {
        let k = g.sample(s);
        let decision = LazyBitFunction::new(g.clone(), s.substream("bit"));
        for x in &elems {
            if sn_round(&k, &decision, &sn_round(&k, &decision, x)?)? != *x {
                return Ok(false);
            }
        }
        Ok(true)
    })?;
    let mut rows = vec![
        ctx.exact(
            "non-bijective-draws",
            Value::exact(cfg.trials - bijective.successes, cfg.trials),
            "0",
            Value::exact(0, cfg.trials),
        ),
        ctx.exact(
            "non-involutive-rounds",
            Value::exact(cfg.trials - involution.successes, cfg.trials),
            "0",
            Value::exact(0, cfg.trials),
        ),
    ];
    if r >= 1 {
        let d = sn_single_card_distribution(&g, r as u32, &g.identity())?;
        let dist = tvd(&d, &Distribution::uniform(&g)?)?.to_f64();
        rows.push(ctx.upper(
            "tvd",
            dist,
            0.0,
            "mixing bound q=1",
            sc_mixing_bound(n, 1, r)?,
        ));
    }
    Ok(rows)
}

fn em_game(cfg: &ExperimentConfig) -> Result<(EmGame, usize), CliError> {
    let game = EmGame {
        group: cfg.group.clone(),
        s: cfg.budget("s")?,
        t: cfg.budget("t")?,
    };
    Ok((game, cfg.budget("d")? as usize))
}

fn efp(cfg: &ExperimentConfig, ctx: &RowContext, rng: &RandomStream) -> Rows {
    let (game, d) = em_game(cfg)?;
    let n = game.group.order() as f64;
    let random = rate(cfg, rng, "random", |s| {
        run_efp_game(&game, &random_forger, s)
    })?;
    let slide = rate(cfg, rng, "slide", |s| {
        run_efp_game(&game, &slide_forger(d, 4), s)
    })?;
    forgery_rows(ctx, cfg, &game, d, n, random, slide)
}

fn cp(cfg: &ExperimentConfig, ctx: &RowContext, rng: &RandomStream) -> Rows {
    let (game, d) = em_game(cfg)?;
    let n = game.group.order() as f64;
    let random = rate(cfg, rng, "random", |s| {
        run_cp_game(&game, &random_cracker, s)
    })?;
    let slide = rate(cfg, rng, "slide", |s| {
        run_cp_game(&game, &slide_cracker(d, 4), s)
    })?;
    forgery_rows(ctx, cfg, &game, d, n, random, slide)
}

fn forgery_rows(
    ctx: &RowContext,
    cfg: &ExperimentConfig,
    game: &EmGame,
    d: usize,
    n: f64,
    random: f64,
    slide: f64,
) -> Rows {
    let st = (game.s * game.t) as f64;
    Ok(vec![
        ctx.target("random-success", random, ci(cfg), "1/|G|", 1.0 / n),
        ctx.upper("slide-success", slide, ci(cfg), "2st/|G|", 2.0 * st / n),
        ctx.info(
            "slide-success-vs-birthday",
            Value::decimal(slide),
            Some(ci(cfg)),
            "1-(1-1/|G|)^(d^2)",
            Some(Value::decimal(1.0 - (1.0 - 1.0 / n).powf((d * d) as f64))),
        ),
    ])
}

fn bounds(cfg: &ExperimentConfig, ctx: &RowContext, _rng: &RandomStream) -> Rows {
    let n = cfg.group.order();
    let (q, r) = (cfg.budget("q")?, cfg.budget("r")?);
    let (qc, qf, qg) = (cfg.budget("qc")?, cfg.budget("qf")?, cfg.budget("qg")?);
    let total = qc + qf + qg;
    let info = |metric: &str, a: f64, name: &str, b: f64| {
        ctx.info(
            metric,
            Value::decimal(a),
            None,
            name,
            Some(Value::decimal(b)),
        )
    };
    Ok(vec![
        info(
            "sc-cca-bound-vs-mixing-bound",
            sc_cca_bound(n, q, r)?,
            "mixing bound",
            sc_mixing_bound(n, q, r)?,
        ),
        info(
            "sc-cca-bound-vs-summary-at-2r",
            sc_cca_bound(n, q, r)?,
            "summary bound at 2r",
            sc_summary_bound(n, q, 2 * r)?,
        ),
        info(
            "psi-bound-stated-vs-proof-final",
            psi_bound_stated(qc, qf, qg, n),
            "proof-final",
            psi_bound_proof_final(qc, qf, qg, n),
        ),
        info(
            "psi-total-query-bound-vs-summary",
            psi_total_query_bound(total, n),
            "summary",
            psi_total_query_bound_summary(total, n),
        ),
    ])
}

fn rtilde(cfg: &ExperimentConfig, ctx: &RowContext, rng: &RandomStream) -> Rows {
    let base = base_of_square(&cfg.group)?;
    let qc = cfg.budget("qc")?;
    let est = rtilde_inconsistency(&base, qc as usize, cfg.trials, rng)?;
    Ok(vec![ctx.upper(
        "inconsistency-frequency",
        est.rate,
        est.ci_halfwidth,
        "C(qc,2)/|G|^2",
        inconsistency_bound(qc, base.order()),
    )])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique_and_smoke_flags_parse() {
        for (i, e) in CATALOG.iter().enumerate() {
            assert!(
                CATALOG[i + 1..].iter().all(|o| o.name != e.name),
                "{}",
                e.name
            );
            let s = e.smoke_settings();
            assert!(s.group.is_some() && s.trials.is_some(), "{}", e.name);
            assert!(s.seed.is_none(), "{}", e.name);
        }
    }
}
