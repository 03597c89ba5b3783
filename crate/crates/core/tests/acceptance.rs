//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Bounds and tolerances are the constants below.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use limitlearn::adversaries::{
    diagonalizer, limit_adversary, locking_transform, txt_adversary, weak_locking_search, SearchMode, TextVerdict,
};
use limitlearn::bridge::{collapse_demo, telltale_report, LangToStruct, StructToLang};
use limitlearn::corpus::{example_one, example_two, kronecker_slice, limit_family, separable_corpus};
use limitlearn::learners::{
    fin_shape, run_simulation, Alternating, ClassCount, Constant, FinLearner, Learner, LearnerM,
    LearnerMStar, Parity, Relation, Simulation, SubsetLearner, TextLearner, TwoStage,
};
use limitlearn::par::par_map;
use limitlearn::presentation::{FairStream, Prefix, Schedule};
use limitlearn::separability::{
    fin_antichain, finitely_separable, is_limit_infinite_bounded, FiveNTail, Kronecker, LimitVerdict,
};
use limitlearn::character::all_sizes_but;
use limitlearn::{Character, Fin, Omega};

const HORIZON: usize = 10_000;
const WINDOW: usize = 200;
const SEEDS: u64 = 20;
/// Alternative fair schedules per member on top of the seeded default.
const VARIANTS: u64 = 5;
/// Generator members inspected by the bounded limit check.
const LIMIT_BOUND: u64 = 32;
const KRONECKER_EXCLUDED: u64 = 4;
const MIN_CHANGES: usize = 5;
const DIAG_E: u64 = 2;
const DIAG_STAGES: usize = 200;
const DIAG_WINDOW: usize = 50;
const LOCK_DEPTH: usize = 50;
const LOCK_WIDTH: usize = 4;
const TEXT_ROUNDS: usize = 5;
const CODE_BOUND: u64 = 64;
/// Seeds for the costlier wrapped learners (round trip, locking transform).
const WRAPPED_SEEDS: u64 = 3;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn simulate(
    l: &mut dyn Learner,
    c: &Character,
    seed: u64,
    schedule: Schedule,
    text: bool,
    relation: Relation,
) -> Simulation {
    let mut stream = FairStream::new(c, seed, text, schedule).expect("member has a presentation");
    run_simulation(l, &mut stream, HORIZON, c, relation, WINDOW).expect("positive horizon")
}

fn informant(l: &mut dyn Learner, c: &Character, seed: u64) -> Simulation {
    simulate(l, c, seed, Schedule::default(), false, Relation::Iso)
}

fn cells(fam: &[Character], seeds: u64) -> Vec<(usize, u64)> {
    (0..fam.len()).flat_map(|t| (0..seeds).map(move |s| (t, s))).collect()
}

fn mstar(fam: &[Character]) -> Box<dyn Learner> {
    Box::new(LearnerMStar::new(fam.to_vec()).expect("family has finite classes"))
}

fn c1_oracle() -> Outcome {
    let chars = common::small_characters();
    let pairs: Vec<(usize, usize)> = (0..chars.len()).flat_map(|i| (0..chars.len()).map(move |j| (i, j))).collect();
    let bad: Vec<bool> = par_map(&pairs, |&(i, j)| {
        let (a, b) = (&chars[i], &chars[j]);
        a.embeds(b) != common::embeds(a, b) || a.fin_embeds(b) != common::fin_embeds(a, b)
    });
    let n = bad.iter().filter(|&&b| b).count();
    check(n == 0, format!("{n} mismatches over {} pairs", pairs.len()))
}

fn c2_fin_learner() -> Outcome {
    let fam = example_one();
    let fin = FinLearner::new(fam.clone()).map_err(|e| e.to_string())?;
    let ok = par_map(&cells(&fam, SEEDS), |&(t, seed)| {
        let mut l = fin.clone_box();
        let sim = informant(&mut *l, &fam[t], seed);
        sim.converged() && fin_shape(&sim.trace).is_some_and(|c| c.iso_eq(&fam[t]))
    });
    let n = ok.iter().filter(|&&b| b).count();
    check(n == ok.len(), format!("{n}/{} runs Fin-shaped and correct", ok.len()))
}

fn c3_example_two() -> Outcome {
    let fam = example_two();
    let antichain = fin_antichain(&fam);
    let ok = par_map(&cells(&fam, SEEDS), |&(t, seed)| informant(&mut *mstar(&fam), &fam[t], seed).converged());
    let n = ok.iter().filter(|&&b| b).count();
    check(
        !antichain && n == ok.len(),
        format!("fin antichain {antichain}, Mstar converged {n}/{}", ok.len()),
    )
}

fn limit_roster(fam: &[Character]) -> Vec<Box<dyn Learner>> {
    let (a, b) = (fam[0].clone(), fam[1].clone());
    vec![
        mstar(fam),
        Box::new(LearnerM::new(fam.to_vec()).expect("finite classes")),
        Box::new(SubsetLearner::new(fam.to_vec())),
        Box::new(Constant(a.clone())),
        Box::new(Constant(b.clone())),
        Box::new(Parity::new(a.clone(), b.clone())),
        Box::new(Alternating::new(a.clone(), b.clone())),
        Box::new(ClassCount::new(5)),
        Box::new(locking_transform(mstar(fam))),
        Box::new(LangToStruct::new(Box::new(StructToLang::new(mstar(fam))))),
    ]
}

fn c4_limit_family() -> Outcome {
    let fam = limit_family();
    let sep = finitely_separable(&fam).map_err(|e| e.to_string())?;
    let Some((limit, _)) = sep.counterexample.clone() else {
        return Err("limit family reported separable".into());
    };
    let biembed = par_map(&cells(&fam, SEEDS), |&(t, seed)| {
        let mut l = Constant(limit.clone());
        simulate(&mut l, &fam[t], seed, Schedule::default(), false, Relation::Biembed).converged()
    });
    let slots: Vec<usize> = (0..limit_roster(&fam).len()).collect();
    let forced = par_map(&slots, |&i| {
        let mut l = limit_roster(&fam).swap_remove(i);
        let run = limit_adversary(&mut *l, &limit, &fam, HORIZON).expect("limit is a limit");
        (l.name(), run.forced(MIN_CHANGES))
    });
    let escaped: Vec<&String> = forced.iter().filter(|(_, f)| !f).map(|(n, _)| n).collect();
    let up_to_biembed = biembed.iter().all(|&b| b);
    check(
        !sep.separable && up_to_biembed && escaped.is_empty(),
        format!(
            "separable {}, constant up to biembedding {up_to_biembed}, forced {}/{} (escaped: {escaped:?})",
            sep.separable,
            forced.len() - escaped.len(),
            forced.len()
        ),
    )
}

fn c5_corpus() -> Outcome {
    let corpus = separable_corpus();
    let mut failures = Vec::new();
    let mut total = 0;
    for f in &corpus {
        let mut runs: Vec<(usize, u64, Schedule)> =
            cells(&f.members, SEEDS).into_iter().map(|(t, s)| (t, s, Schedule::default())).collect();
        for t in 0..f.members.len() {
            runs.extend((1..=VARIANTS).map(|k| (t, k, Schedule::variant(k))));
        }
        let ok = par_map(&runs, |&(t, seed, sched)| {
            simulate(&mut *mstar(&f.members), &f.members[t], seed, sched, false, Relation::Iso).converged()
        });
        total += ok.len();
        let bad = ok.iter().filter(|&&b| !b).count();
        if bad > 0 {
            failures.push(format!("{}: {bad}", f.name));
        }
    }
    check(
        failures.is_empty(),
        format!("{} families, {total} runs, failures {failures:?}", corpus.len()),
    )
}

fn c6_infinite_limits() -> Outcome {
    let five = is_limit_infinite_bounded(&Character::listed(&[(5, Omega)]), &FiveNTail, LIMIT_BOUND)
        .map_err(|e| e.to_string())?;
    let mut slices = Vec::new();
    for m in 2..=6 {
        let fam = kronecker_slice(m);
        let sep = finitely_separable(&fam).map_err(|e| e.to_string())?.separable;
        slices.push((m, sep, fin_antichain(&fam)));
    }
    let mut excluded = Vec::new();
    for i in 1..=KRONECKER_EXCLUDED {
        let g = Kronecker { exclude: Some(i) };
        excluded.push(is_limit_infinite_bounded(&all_sizes_but(i), &g, LIMIT_BOUND).map_err(|e| e.to_string())?);
    }
    let ok = five == LimitVerdict::Limit
        && slices.iter().all(|&(_, sep, _)| sep)
        && excluded.iter().all(|v| *v == LimitVerdict::Limit);
    let antichains: Vec<bool> = slices.iter().map(|s| s.2).collect();
    check(
        ok,
        format!("five_n_tail {five:?}, slices separable {}, fin antichain {antichains:?}, excluded {excluded:?}",
            slices.iter().all(|s| s.1)),
    )
}

fn c7_diagonalizer() -> Outcome {
    let fam = example_one();
    let e2 = Character::listed(&[(2, Omega)]);
    let roster = || -> Vec<Box<dyn Learner>> {
        vec![
            Box::new(Constant(e2.clone())),
            Box::new(ClassCount::new(DIAG_E)),
            Box::new(Parity::new(e2.clone(), Character::listed(&[(1, Omega)]))),
            Box::new(TwoStage::new()),
            mstar(&fam),
        ]
    };
    let slots: Vec<usize> = (0..roster().len()).collect();
    let reports = par_map(&slots, |&i| {
        diagonalizer(&*roster().swap_remove(i), DIAG_E, DIAG_STAGES, DIAG_WINDOW).expect("e >= 2")
    });
    let violations: usize = reports.iter().map(|r| r.violations.len()).sum();
    let branches: Vec<String> = reports.iter().map(|r| format!("{}:{:?}", r.learner, r.branch)).collect();
    check(violations == 0, format!("{violations} violations; {}", branches.join(" ")))
}

fn c8_text() -> Outcome {
    let mut failures = Vec::new();
    let mut total = 0;
    for f in separable_corpus() {
        if f.members.iter().any(Character::has_infinite_classes) {
            continue;
        }
        let ok = par_map(&cells(&f.members, SEEDS), |&(t, seed)| {
            let c = &f.members[t];
            let mut txt = TextLearner::new(mstar(&f.members));
            let on_text = simulate(&mut txt, c, seed, Schedule::default(), true, Relation::Iso);
            let on_informant = informant(&mut *mstar(&f.members), c, seed);
            on_text.converged() && on_text.final_conjecture() == on_informant.final_conjecture()
        });
        total += ok.len();
        let bad = ok.iter().filter(|&&b| !b).count();
        if bad > 0 {
            failures.push(format!("{}: {bad}", f.name));
        }
    }
    check(failures.is_empty(), format!("{total} text runs, failures {failures:?}"))
}

fn learns_both_from_text(l: &dyn Learner, one: &Character, two: &Character) -> bool {
    [one, two].iter().all(|c| {
        (0..SEEDS).all(|seed| {
            let mut l = l.clone_box();
            simulate(&mut *l, c, seed, Schedule::default(), true, Relation::Iso).converged()
        })
    })
}

fn c9_infinite_classes() -> Outcome {
    let one = Character::infinite_classes(Fin(1));
    let two = Character::infinite_classes(Fin(2));
    let fam = [one.clone(), two.clone()];
    let informant_ok = par_map(&cells(&fam, SEEDS), |&(t, seed)| informant(&mut TwoStage::new(), &fam[t], seed).converged());
    let two_stage = informant_ok.iter().all(|&b| b);
    let constants: Vec<TextVerdict> = fam
        .iter()
        .map(|c| {
            txt_adversary(&Constant(c.clone()), LOCK_DEPTH, LOCK_WIDTH, TEXT_ROUNDS, HORIZON)
                .expect("bounded search")
                .verdict
        })
        .collect();
    let roster = || -> Vec<Box<dyn Learner>> {
        vec![
            Box::new(Constant(one.clone())),
            Box::new(Constant(two.clone())),
            Box::new(TwoStage::new()),
            Box::new(TextLearner::new(Box::new(TwoStage::new()))),
            Box::new(Parity::new(one.clone(), two.clone())),
            Box::new(Alternating::new(one.clone(), two.clone())),
        ]
    };
    let slots: Vec<usize> = (0..roster().len()).collect();
    let both: Vec<String> = par_map(&slots, |&i| {
        let l = roster().swap_remove(i);
        let defeated = txt_adversary(&*l, LOCK_DEPTH, LOCK_WIDTH, TEXT_ROUNDS, HORIZON)
            .expect("bounded search")
            .verdict
            == TextVerdict::Defeated;
        (!defeated && learns_both_from_text(&*l, &one, &two)).then(|| l.name())
    })
    .into_iter()
    .flatten()
    .collect();
    let defeated = constants.iter().all(|v| *v == TextVerdict::Defeated);
    check(
        two_stage && defeated && both.is_empty(),
        format!("two_stage on informants {two_stage}, constants {constants:?}, learn both from text {both:?}"),
    )
}

fn c10_bridge() -> Outcome {
    let mut failures = Vec::new();
    for f in separable_corpus() {
        let agree = par_map(&cells(&f.members, WRAPPED_SEEDS), |&(t, seed)| {
            let c = &f.members[t];
            let mut rt = LangToStruct::new(Box::new(StructToLang::new(mstar(&f.members))));
            let a = informant(&mut rt, c, seed);
            let b = informant(&mut *mstar(&f.members), c, seed);
            a.converged() && a.final_conjecture() == b.final_conjecture()
        });
        if !agree.iter().all(|&b| b) {
            failures.push(format!("round trip {}", f.name));
        }
        let report = telltale_report(&f.members, CODE_BOUND, 6).map_err(|e| e.to_string())?;
        if report.iter().any(|r| r.telltale.is_none()) {
            failures.push(format!("tell-tale {}", f.name));
        }
    }
    let limit = limit_family();
    let missing = telltale_report(&limit, CODE_BOUND, 6)
        .map_err(|e| e.to_string())?
        .iter()
        .any(|r| r.telltale.is_none());
    if !missing {
        failures.push("limit family has all tell-tales".into());
    }
    let collapse = collapse_demo(&limit, CODE_BOUND).map_err(|e| e.to_string())?.collapses();
    if !collapse {
        failures.push("single-language map does not collapse".into());
    }
    check(
        failures.is_empty(),
        format!("limit family lacks a tell-tale {missing}, collapse {collapse}, failures {failures:?}"),
    )
}

fn c11_locking() -> Outcome {
    let mut failures = Vec::new();
    for f in separable_corpus() {
        let same = par_map(&cells(&f.members, WRAPPED_SEEDS), |&(t, seed)| {
            let c = &f.members[t];
            let base = informant(&mut *mstar(&f.members), c, seed);
            let locked = informant(&mut locking_transform(mstar(&f.members)), c, seed);
            !base.converged() || (locked.converged() && locked.final_conjecture() == base.final_conjecture())
        });
        if !same.iter().all(|&b| b) {
            failures.push(f.name.clone());
        }
    }
    let empty = Prefix::default();
    let mut candidates = Vec::new();
    for c in example_one().iter().chain(&limit_family()) {
        let v = weak_locking_search(&Constant(c.clone()), c, &empty, LOCK_DEPTH, LOCK_WIDTH, SearchMode::Informant)
            .map_err(|e| e.to_string())?;
        candidates.push(v.is_candidate());
    }
    let two = Character::infinite_classes(Fin(2));
    let violator = !weak_locking_search(&TwoStage::new(), &two, &empty, LOCK_DEPTH, LOCK_WIDTH, SearchMode::Informant)
        .map_err(|e| e.to_string())?
        .is_candidate();
    check(
        failures.is_empty() && candidates.iter().all(|&b| b) && violator,
        format!("transform changed finals on {failures:?}, constants locked {candidates:?}, two_stage violator {violator}"),
    )
}

fn quiet<const N: usize>(args: [&str; N]) -> i32 {
    limitlearn::cli::run_to(args, &mut std::io::sink())
}

fn c12_replay() -> Outcome {
    let runs = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/runs");
    let mut dirs: Vec<_> = std::fs::read_dir(&runs).map_err(|e| e.to_string())?.map(|e| e.unwrap().path()).collect();
    dirs.sort();
    let mut drifted = Vec::new();
    for d in &dirs {
        if quiet(["limitlearn", "replay", d.to_str().unwrap()]) != 0 {
            drifted.push(d.file_name().unwrap().to_string_lossy().into_owned());
        }
    }
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = tmp.path().join("fresh");
    let fam = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../families/example2.json");
    let args = ["limitlearn", "simulate", "--family", fam.to_str().unwrap(), "--seeds", "3", "--horizon", "3000"];
    let first = limitlearn::cli::run_to(
        args.iter().copied().chain(["--out", out.to_str().unwrap()]),
        &mut std::io::sink(),
    );
    let fresh = first == 0 && quiet(["limitlearn", "replay", out.to_str().unwrap()]) == 0;
    check(
        drifted.is_empty() && !dirs.is_empty() && fresh,
        format!("{} golden runs, drifted {drifted:?}, fresh run replays {fresh}", dirs.len()),
    )
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("embedding and finite embedding agree with a matching oracle", c1_oracle),
        ("FinLearner learns [5:ω,6:2] and [5:ω,7:1] mind-change-free", c2_fin_learner),
        ("[5:ω] and [6:ω]: no fin antichain, yet Mstar learns both", c3_example_two),
        ("limit family: inseparable, learnable up to biembedding, roster forced", c4_limit_family),
        ("Mstar learns every separable corpus family", c5_corpus),
        ("bounded infinite limit checks", c6_infinite_limits),
        ("diagonalizer dichotomy holds", c7_diagonalizer),
        ("text learning matches informant learning", c8_text),
        ("[ω:1] versus [ω:2] on informants and texts", c9_infinite_classes),
        ("language bridge: round trip, tell-tales, collapse", c10_bridge),
        ("locking transform and locking searches", c11_locking),
        ("replay is byte-identical", c12_replay),
    ];
    let mut failed = 0;
    for (i, (title, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(d) => println!("PASS {:>2} {title}: {d} [{secs:.1}s]", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {:>2} {title}: {d} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
