//! Executable versions of the games and bad events used in the security
//! proofs, with exact and Monte Carlo checks of the individual claims.

use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::group::Group;

pub mod em;
pub mod psi;

pub use em::{
    bad_key_count, is_bad_key, run_script, script_catalog, transcript_distribution, GameKind,
    GameState, QueryArg, QueryKind, RetryMode, Script, TranscriptLaw, TranscriptSets,
};
pub use psi::{bad_detect, badg_detect, PsiQuery, PsiTranscript, RTilde};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        })
    }
}

/// One checked claim: an equality (`bound` absent, exact comparison of
/// `lhs` and `rhs`) or an inequality `lhs ≤ bound`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub lemma: String,
    pub instance: String,
    pub lhs: String,
    pub rhs: String,
    pub bound: Option<f64>,
    pub verdict: Verdict,
}

fn ratio_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn law_string(law: &TranscriptLaw) -> String {
    law.answers
        .iter()
        .map(|(a, p)| format!("{a:?}:{}", ratio_string(p)))
        .collect::<Vec<_>>()
        .join(" ")
}

/// The three exact game identities for one script on one group:
/// X and X′ give the same answer law, and R, R′ and X raise the flag with
/// the same probability.
pub fn check_game_equivalences(group: &Group, script: &Script) -> Result<Vec<LemmaCheck>> {
    let x = transcript_distribution(GameKind::X, script, group)?;
    let xp = transcript_distribution(GameKind::XPrime, script, group)?;
    let r = transcript_distribution(GameKind::R, script, group)?;
    let rp = transcript_distribution(GameKind::RPrime, script, group)?;
    let instance = format!("{group} script {}", script.name);
    let eq = |lemma: &str, lhs: String, rhs: String| LemmaCheck {
        lemma: lemma.into(),
        instance: instance.clone(),
        verdict: Verdict::from_bool(lhs == rhs),
        lhs,
        rhs,
        bound: None,
    };
    Ok(vec![
        eq("answers X = answers X'", law_string(&x), law_string(&xp)),
        eq(
            "Pr_R[BAD] = Pr_R'[BAD]",
            ratio_string(&r.bad),
            ratio_string(&rp.bad),
        ),
        eq(
            "Pr_R[BAD] = Pr_X[BAD]",
            ratio_string(&r.bad),
            ratio_string(&x.bad),
        ),
    ])
}

/// `measured ≤ bound + ci`.
pub fn check_bound(lemma: &str, instance: &str, measured: f64, ci: f64, bound: f64) -> LemmaCheck {
    LemmaCheck {
        lemma: lemma.into(),
        instance: instance.into(),
        lhs: measured.to_string(),
        rhs: format!("{bound} + {ci}"),
        bound: Some(bound),
        verdict: Verdict::from_bool(measured <= bound + ci),
    }
}
