use crate::bridge::{LangToStruct, MinimalSuperset, StructToLang};
use crate::character::Character;
use crate::error::{Error, Result};
use crate::learners::{
    Alternating, ClassCount, Constant, FinLearner, Learner, LearnerM, LearnerMStar, Parity, SubsetLearner,
    TextLearner, TwoStage,
};
use crate::adversaries::locking_transform;

pub const LEARNER_HELP: &str = "mstar, m, fin, subset, two-stage, superset, roundtrip, constant:I, \
parity:I,J, alternating:I,J, class-count:E; prefix txt- for the text version, lock- for the locking transform";

fn member(fam: &[Character], arg: &str) -> Result<Character> {
    let i: usize = arg
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("member index expected, got {arg:?}")))?;
    fam.get(i)
        .cloned()
        .ok_or_else(|| Error::Parse(format!("family has no member {i}")))
}

fn two_members(fam: &[Character], arg: &str) -> Result<(Character, Character)> {
    let (a, b) = arg
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("expected I,J, got {arg:?}")))?;
    Ok((member(fam, a)?, member(fam, b)?))
}

/// Builds a learner from its command-line name.
pub fn build_learner(spec: &str, fam: &[Character]) -> Result<Box<dyn Learner>> {
    if let Some(rest) = spec.strip_prefix("txt-") {
        return Ok(Box::new(TextLearner::new(build_learner(rest, fam)?)));
    }
    if let Some(rest) = spec.strip_prefix("lock-") {
        return Ok(Box::new(locking_transform(build_learner(rest, fam)?)));
    }
    let (name, arg) = match spec.split_once(':') {
        Some((n, a)) => (n, Some(a)),
        None => (spec, None),
    };
    let need = |what: &str| Error::Parse(format!("learner {name} needs {what}"));
    let fam_vec = fam.to_vec();
    Ok(match (name, arg) {
        ("mstar", None) => Box::new(LearnerMStar::new(fam_vec)?),
        ("m", None) => Box::new(LearnerM::new(fam_vec)?),
        ("fin", None) => Box::new(FinLearner::new(fam_vec)?),
        ("subset", None) => Box::new(SubsetLearner::new(fam_vec)),
        ("two-stage", None) => Box::new(TwoStage::new()),
        ("superset", None) => Box::new(LangToStruct::new(Box::new(MinimalSuperset::new(fam_vec)))),
        ("roundtrip", None) => Box::new(LangToStruct::new(Box::new(StructToLang::new(Box::new(
            LearnerMStar::new(fam_vec)?,
        ))))),
        ("constant", Some(a)) => Box::new(Constant(member(fam, a)?)),
        ("constant", None) => return Err(need("a member index")),
        ("parity", Some(a)) => {
            let (x, y) = two_members(fam, a)?;
            Box::new(Parity::new(x, y))
        }
        ("alternating", Some(a)) => {
            let (x, y) = two_members(fam, a)?;
            Box::new(Alternating::new(x, y))
        }
        ("parity" | "alternating", None) => return Err(need("two member indices")),
        ("class-count", Some(a)) => {
            let e = a
                .parse()
                .map_err(|_| Error::Parse(format!("class size expected, got {a:?}")))?;
            Box::new(ClassCount::new(e))
        }
        ("class-count", None) => return Err(need("a class size")),
        _ => return Err(Error::Parse(format!("unknown learner {spec:?} (known: {LEARNER_HELP})"))),
    })
}
