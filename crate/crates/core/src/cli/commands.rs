use serde_json::{json, Value};

use crate::adversaries::{diagonalizer, limit_adversary, txt_adversary, weak_locking_search, SearchMode};
use crate::bridge::{collapse_demo, g_of_char, telltale_report, LanguageDesc};
use crate::character::Character;
use crate::error::{Error, Result};
use crate::learners::{fin_shape, run_simulation, Relation};
use crate::par::par_map;
use crate::presentation::{FairStream, Prefix, Schedule};
use crate::separability::{
    fin_antichain, finitely_separable, is_limit_infinite_bounded, separator_of, Family,
};

use super::learner_spec::build_learner;
use super::{AdversaryKind, Opts, Outcome, EXIT_OK, EXIT_VIOLATION};

fn required(family: Option<&Family>) -> Result<&Family> {
    family.ok_or_else(|| Error::Parse("this command needs --family".into()))
}

fn members(family: Option<&Family>) -> Vec<Character> {
    family.map(|f| f.members.clone()).unwrap_or_default()
}

fn targets(fam: &[Character], opts: &Opts) -> Result<Vec<usize>> {
    match opts.target {
        Some(t) if t < fam.len() => Ok(vec![t]),
        Some(t) => Err(Error::Parse(format!("family has no member {t}"))),
        None => Ok((0..fam.len()).collect()),
    }
}

/// Runs one command. Deterministic in `opts` and `family`.
pub fn execute(command: &str, opts: &Opts, family: Option<&Family>) -> Result<Outcome> {
    match command {
        "check" => check(required(family)?, opts),
        "simulate" => simulate(&required(family)?.members, opts),
        "adversary" => adversary(&members(family), opts),
        "diagonalize" => diagonalize(&members(family), opts),
        "locking" => locking(&required(family)?.members, opts),
        "bridge-translate" => translate(&required(family)?.members),
        "bridge-telltale" => telltale(&required(family)?.members, opts),
        "bridge-roundtrip" => roundtrip(&required(family)?.members, opts),
        other => Err(Error::Parse(format!("unknown command {other:?}"))),
    }
}

fn check(family: &Family, opts: &Opts) -> Result<Outcome> {
    let fam = &family.members;
    let sep = finitely_separable(fam)?;
    let separators = fam
        .iter()
        .map(|c| {
            let s = separator_of(c, fam)?;
            let comps: Vec<String> = s.components.iter().map(ToString::to_string).collect();
            Ok(json!({ "member": c, "separator": comps }))
        })
        .collect::<Result<Vec<_>>>()?;
    let generator = match &family.generator {
        None => Value::Null,
        Some(spec) => {
            let g = family.generator()?;
            let verdicts = fam
                .iter()
                .map(|c| Ok(json!({ "member": c, "limit": is_limit_infinite_bounded(c, g.as_ref(), opts.bound)? })))
                .collect::<Result<Vec<_>>>()?;
            json!({ "name": spec.name, "params": spec.params, "bound": opts.bound, "verdicts": verdicts })
        }
    };
    let counterexample = sep
        .counterexample
        .as_ref()
        .map(|(limit, witness)| json!({ "limit": limit, "witness": witness }));
    Ok(Outcome::new(
        EXIT_OK,
        json!({
            "finitely_separable": sep.separable,
            "counterexample": counterexample,
            "fin_antichain": fin_antichain(fam),
            "separators": separators,
            "generator": generator,
        }),
    ))
}

fn simulate(fam: &[Character], opts: &Opts) -> Result<Outcome> {
    // Fail early on bad learner names.
    build_learner(&opts.learner, fam)?;
    let cells: Vec<(usize, u64)> = targets(fam, opts)?
        .into_iter()
        .flat_map(|t| (opts.seed..opts.seed + opts.seeds.max(1)).map(move |s| (t, s)))
        .collect();
    let text = opts.mode == SearchMode::Text;
    let runs = par_map(&cells, |&(t, seed)| -> Result<_> {
        let mut learner = build_learner(&opts.learner, fam)?;
        let mut stream = FairStream::new(&fam[t], seed, text, Schedule::variant(opts.schedule))?;
        let sim = run_simulation(learner.as_mut(), &mut stream, opts.horizon, &fam[t], opts.relation, opts.window)?;
        Ok((t, seed, sim))
    });
    let mut out_cells = Vec::new();
    let mut files = Vec::new();
    let mut all = true;
    for run in runs {
        let (t, seed, sim) = run?;
        all &= sim.converged();
        out_cells.push(json!({
            "target": t,
            "seed": seed,
            "summary": sim.summary(),
            "fin_shape": fin_shape(&sim.trace),
        }));
        files.push((format!("trace-t{t}-s{seed}.txt"), sim.trace.to_text()));
        files.push((format!("input-t{t}-s{seed}.txt"), sim.input.to_trace()));
    }
    let summary = json!({
        "command": "simulate",
        "learner": opts.learner,
        "mode": opts.mode,
        "relation": opts.relation,
        "schedule": opts.schedule,
        "all_converged": all,
        "cells": out_cells,
    });
    let code = if all { EXIT_OK } else { EXIT_VIOLATION };
    Ok(files.into_iter().fold(Outcome::new(code, summary), |o, (n, c)| o.file(n, c)))
}

fn adversary(fam: &[Character], opts: &Opts) -> Result<Outcome> {
    let mut learner = build_learner(&opts.learner, fam)?;
    match opts.kind {
        AdversaryKind::Limit => {
            let limit = match opts.target {
                Some(t) => fam.get(t).cloned().ok_or_else(|| Error::Parse(format!("family has no member {t}")))?,
                None => finitely_separable(fam)?
                    .counterexample
                    .map(|(l, _)| l)
                    .ok_or_else(|| Error::Precondition("family has no limit; pass --target".into()))?,
            };
            let witnesses: Vec<Character> = fam.iter().filter(|c| !c.iso_eq(&limit)).cloned().collect();
            let run = limit_adversary(learner.as_mut(), &limit, &witnesses, opts.horizon)?;
            let summary = run.summary(&learner.name(), opts.min_changes);
            let code = if summary.forced { EXIT_OK } else { EXIT_VIOLATION };
            Ok(Outcome::new(code, json!({ "command": "adversary", "kind": "limit", "limit": limit, "report": summary }))
                .file("trace.txt", run.trace.to_text())
                .file("input.txt", run.prefix.to_trace()))
        }
        AdversaryKind::Text => {
            let run = txt_adversary(learner.as_ref(), opts.depth, opts.width, opts.rounds, opts.horizon)?;
            Ok(Outcome::new(EXIT_OK, json!({ "command": "adversary", "kind": "text", "report": run }))
                .file("input.txt", run.text.to_trace()))
        }
    }
}

fn diagonalize(fam: &[Character], opts: &Opts) -> Result<Outcome> {
    let learner = build_learner(&opts.learner, fam)?;
    let r = diagonalizer(learner.as_ref(), opts.e, opts.horizon, opts.window)?;
    let code = if r.violations.is_empty() { EXIT_OK } else { EXIT_VIOLATION };
    Ok(Outcome::new(code, json!({ "command": "diagonalize", "report": r }))
        .file("sigma.txt", r.sigma_prefix.to_trace())
        .file("tau.txt", r.tau_prefix.to_trace())
        .file("nu.txt", r.nu_prefix.to_trace()))
}

fn locking(fam: &[Character], opts: &Opts) -> Result<Outcome> {
    let learner = build_learner(&opts.learner, fam)?;
    let t = targets(fam, opts)?[0];
    let v = weak_locking_search(learner.as_ref(), &fam[t], &Prefix::default(), opts.depth, opts.width, opts.mode)?;
    Ok(Outcome::new(
        EXIT_OK,
        json!({ "command": "locking", "learner": learner.name(), "target": fam[t], "mode": opts.mode, "result": v }),
    ))
}

fn translate(fam: &[Character]) -> Result<Outcome> {
    let rows = fam
        .iter()
        .map(|c| {
            let g = g_of_char(c)?;
            let l = LanguageDesc::new(g.clone());
            Ok(json!({ "member": c, "g": g, "language": l.to_string(), "first_members": l.members_up_to(64) }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Outcome::new(EXIT_OK, json!({ "command": "bridge-translate", "members": rows })))
}

/// Languages sampled per member in `bridge telltale`: transpositions below this.
pub const TELLTALE_SAMPLE: u64 = 6;

fn telltale(fam: &[Character], opts: &Opts) -> Result<Outcome> {
    let report = telltale_report(fam, opts.bound, TELLTALE_SAMPLE)?;
    let all_found = report.iter().all(|r| r.telltale.is_some());
    let separable = finitely_separable(fam)?.separable;
    let single = collapse_demo(fam, opts.bound)?;
    let code = if all_found == separable { EXIT_OK } else { EXIT_VIOLATION };
    Ok(Outcome::new(
        code,
        json!({
            "command": "bridge-telltale",
            "bound": opts.bound,
            "finitely_separable": separable,
            "all_telltales_found": all_found,
            "languages": report,
            "single_language_map": {
                "telltales_found": single.telltales.iter().all(Option::is_some),
                "telltales": single.telltales,
            },
        }),
    ))
}

fn roundtrip(fam: &[Character], opts: &Opts) -> Result<Outcome> {
    let cells: Vec<(usize, u64)> = targets(fam, opts)?
        .into_iter()
        .flat_map(|t| (opts.seed..opts.seed + opts.seeds.max(1)).map(move |s| (t, s)))
        .collect();
    let runs = par_map(&cells, |&(t, seed)| -> Result<Value> {
        let mut finals = Vec::new();
        for name in ["roundtrip", "mstar"] {
            let mut l = build_learner(name, fam)?;
            let mut s = FairStream::new(&fam[t], seed, false, Schedule::default())?;
            let sim = run_simulation(l.as_mut(), &mut s, opts.horizon, &fam[t], Relation::Iso, opts.window)?;
            finals.push((sim.converged(), sim.final_conjecture()));
        }
        let agree = finals[0].0 && finals[1].0 && finals[0].1 == finals[1].1;
        Ok(json!({
            "target": t,
            "seed": seed,
            "roundtrip": { "converged": finals[0].0, "final": finals[0].1 },
            "mstar": { "converged": finals[1].0, "final": finals[1].1 },
            "agree": agree,
        }))
    });
    let rows = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let all = rows.iter().all(|r| r["agree"] == Value::Bool(true));
    let code = if all { EXIT_OK } else { EXIT_VIOLATION };
    Ok(Outcome::new(code, json!({ "command": "bridge-roundtrip", "all_agree": all, "cells": rows })))
}
