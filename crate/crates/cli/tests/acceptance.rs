//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any failed.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ttsat_core::encoder::SemanticVar;
use ttsat_core::fixture::example_instance;
use ttsat_core::model::SessionKind;
use ttsat_core::{
    brute_force_maxsat, check_hard, compute_cost, decode_timetable, encode, gen_random_instance, parse_dimacs,
    solve_maxsat, write_dimacs, BoundKind, CardRequest, CardScheme, Clause, EncodeOptions, Family, GenParams,
    Instance, Lit, MaxSatResult, Optimizer, SolverConfig, VarAllocator, WcnfFormula, Weight,
};

/// Optimum of the bundled example in weighted mode. Computed once with RC2
/// (python-sat 1.9.dev15) on the WCNF written by `ttsat encode`; the
/// pairwise, sequential-counter and totalizer encodings all gave 10.
const EXAMPLE_WEIGHTED_OPTIMUM: u64 = 10;
/// Same provenance, `--mode partial`.
const EXAMPLE_PARTIAL_OPTIMUM: u64 = 2;

type Verdict = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn optimum(r: &MaxSatResult) -> Result<Option<u64>, String> {
    match r {
        MaxSatResult::Optimum(m) => Ok(Some(m.cost())),
        MaxSatResult::HardUnsat => Ok(None),
        other => Err(format!("solver gave up: {other:?}")),
    }
}

fn configs() -> [SolverConfig; 2] {
    [Optimizer::CoreGuided, Optimizer::BranchAndBound].map(|optimizer| SolverConfig {
        optimizer,
        ..SolverConfig::default()
    })
}

// ---- 1 -------------------------------------------------------------------

fn micro_formulas() -> Verdict {
    let max3 = "p wcnf 3 4 5\n1 1 -2 0\n1 -1 3 0\n1 2 3 0\n1 -3 0\n";
    let partial = "p wcnf 3 4 3\n3 1 -2 0\n3 -1 3 0\n1 2 3 0\n1 -3 0\n";
    let weighted = "p wcnf 3 4 8\n8 1 -2 0\n8 -1 3 0\n3 2 3 0\n4 -3 0\n";
    let mut slowest = Duration::ZERO;
    for (name, text, cost) in [("max-sat", max3, 1), ("partial", partial, 1), ("weighted", weighted, 3)] {
        let f = parse_dimacs(text).map_err(|e| e.to_string())?;
        for cfg in configs() {
            let start = Instant::now();
            let r = solve_maxsat(&f, &cfg).map_err(|e| e.to_string())?;
            let took = start.elapsed();
            slowest = slowest.max(took);
            ensure!(took < Duration::from_millis(1), "{name}: {took:?} exceeds 1 ms");
            ensure!(optimum(&r)? == Some(cost), "{name}: cost {:?}, want {cost}", r.cost());
            let m = r.model().unwrap();
            let falsified = f.soft_clauses().filter(|(c, _)| !c.is_satisfied(m.assignment())).count();
            ensure!(falsified == 1, "{name}: {falsified} soft clauses falsified, want exactly 1");
        }
    }
    let all_false = [false; 3];
    let f = parse_dimacs(weighted).unwrap();
    ensure!(f.cost(&all_false) == Some(3), "all-false is not a cost-3 witness");
    let f = parse_dimacs(max3).unwrap();
    let satisfied = f.clauses().iter().filter(|c| c.is_satisfied(&all_false)).count();
    ensure!(satisfied == 3, "all-false satisfies {satisfied} clauses, want 3");
    Ok(format!("costs 1/1/3 for both optimizers, slowest {slowest:?}"))
}

// ---- 2 -------------------------------------------------------------------

/// Satisfiability by backtracking with unit propagation.
fn dpll(clauses: &[Vec<Lit>], assignment: &mut [Option<bool>]) -> bool {
    loop {
        let mut changed = false;
        for c in clauses {
            let mut unassigned = Vec::new();
            let mut satisfied = false;
            for &l in c {
                match assignment[l.var() as usize] {
                    Some(v) if v != l.is_negated() => satisfied = true,
                    Some(_) => {}
                    None => unassigned.push(l),
                }
            }
            if satisfied {
                continue;
            }
            match unassigned.as_slice() {
                [] => return false,
                [l] => {
                    assignment[l.var() as usize] = Some(!l.is_negated());
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }
    let Some(v) = (1..assignment.len()).find(|&v| assignment[v].is_none()) else {
        return true;
    };
    [false, true].into_iter().any(|value| {
        let mut trial = assignment.to_vec();
        trial[v] = Some(value);
        dpll(clauses, &mut trial)
    })
}

fn cardinality_exhaustive() -> Verdict {
    let start = Instant::now();
    let mut checked = 0;
    let mut at_most_2_of_4 = BTreeSet::new();
    for scheme in CardScheme::ALL {
        for kind in [BoundKind::AtMost, BoundKind::AtLeast, BoundKind::Exactly] {
            for n in 1..=6u32 {
                for k in 0..=n as usize {
                    let literals: Vec<Lit> = (1..=n).map(Lit::pos).collect();
                    let mut alloc = VarAllocator::new(n);
                    let clauses = CardRequest {
                        bound_kind: kind,
                        k,
                        literals,
                        scheme,
                    }
                    .encode(&mut alloc)
                    .map_err(|e| e.to_string())?;
                    let mut models = 0;
                    for mask in 0..1u32 << n {
                        let mut a = vec![None; alloc.max_var() as usize + 1];
                        for i in 0..n {
                            a[i as usize + 1] = Some(mask >> i & 1 == 1);
                        }
                        let got = dpll(&clauses, &mut a);
                        let ones = mask.count_ones() as usize;
                        let want = match kind {
                            BoundKind::AtMost => ones <= k,
                            BoundKind::AtLeast => ones >= k,
                            BoundKind::Exactly => ones == k,
                        };
                        ensure!(got == want, "{kind:?} {k} of {n} ({scheme:?}) wrong on inputs {mask:0w$b}", w = n as usize);
                        models += got as usize;
                    }
                    if kind == BoundKind::AtMost && n == 4 && k == 2 {
                        at_most_2_of_4.insert(models);
                    }
                    checked += 1;
                }
            }
        }
    }
    ensure!(at_most_2_of_4 == BTreeSet::from([11]), "at_most(2,4) projected models {at_most_2_of_4:?}");
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(10), "took {took:?}");
    Ok(format!("{checked} constraints exact, at_most(2,4) = 11 models, {took:?}"))
}

// ---- 3 -------------------------------------------------------------------

fn fixture_families() -> Verdict {
    let i = example_instance();
    let enc = encode(&i, &EncodeOptions::weighted()).map_err(|e| e.to_string())?;
    let vm = &enc.varmap;
    let clauses = enc.formula.clauses();
    let (s, t, d, r, k) = (i.sessions.len(), i.timeslots.len(), i.days.len(), i.rooms.len(), i.curricula.len());
    let of = |f: Family| enc.clauses_of(f).map(|idx| &clauses[idx]).collect::<Vec<_>>();

    let links = of(Family::CtCdLink).len();
    ensure!(s * (t + d) == 112 && links == 112, "ct/cd linking {links}, formula {}", s * (t + d));

    let is_kt = |l: &Lit| matches!(vm.semantic(l.var()), Ok(SemanticVar::Kt { .. }));
    let kt_family = of(Family::CtKtLink);
    let forward = kt_family.iter().filter(|c| c.lits().iter().any(|l| is_kt(l) && !l.is_negated())).count();
    let backward = kt_family.iter().filter(|c| c.lits().iter().any(|l| is_kt(l) && l.is_negated())).count();
    ensure!(s * t == 70 && forward == 70, "ct->kt {forward}, formula {}", s * t);
    ensure!(k * t == 20 && backward == 20, "kt->ct {backward}, formula {}", k * t);

    let rooms = of(Family::RoomClash).len();
    let formula = r * t * s * (s - 1) / 2;
    ensure!(formula == 1820 && rooms == 1820, "room clashes {rooms}, formula {formula}");

    let m271 = i.courses.iter().find(|c| c.label == "M271").unwrap();
    let capacity = of(Family::RoomCapacity);
    for session in m271.sessions {
        for room in ["r1", "lab1"] {
            let rid = i.rooms.iter().position(|x| x.label == room).unwrap();
            let found = capacity
                .iter()
                .any(|c| c.lits() == [Lit::neg(vm.cr(session, rid))] && c.weight() == Weight::Soft(40));
            ensure!(found, "no weight-40 capacity clause for {} in {room}", i.session_name(session));
        }
    }

    let mut pairs: BTreeMap<(String, String), BTreeSet<u64>> = BTreeMap::new();
    for c in of(Family::RegistrationClash) {
        let mut courses: Vec<String> = c
            .lits()
            .iter()
            .map(|l| match vm.semantic(l.var()) {
                Ok(SemanticVar::Ct { session, .. }) => i.courses[i.sessions[session].course].label.clone(),
                other => panic!("registration clause over {other:?}"),
            })
            .collect();
        courses.sort();
        let w = c.weight().soft().unwrap();
        pairs.entry((courses[0].clone(), courses[1].clone())).or_default().insert(w);
    }
    let want: BTreeMap<(String, String), BTreeSet<u64>> = [
        ("CS101", "M271", 20),
        ("CS305", "M271", 15),
        ("CS408", "M271", 5),
        ("CS304", "CS402", 10),
    ]
    .into_iter()
    .map(|(a, b, w)| ((a.to_string(), b.to_string()), BTreeSet::from([w])))
    .collect();
    ensure!(pairs == want, "registration pairs {pairs:?}");
    Ok("112 / 70+20 / 1820 / M271 weight 40 / 4 pairs {20,15,5,10}".into())
}

// ---- 4 and 6 -------------------------------------------------------------

/// Minimum soft cost over every placement of every session, computed from
/// the instance alone. `None` if no placement satisfies the hard rules.
#[allow(clippy::needless_range_loop)]
fn semantic_optimum(i: &Instance, weighted: bool) -> Option<u64> {
    let n = i.sessions.len();
    let (nt, nr) = (i.timeslots.len(), i.rooms.len());
    let curriculum = |s: usize| i.courses[i.sessions[s].course].curriculum;
    let mut demand: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for g in &i.registrations {
        for (x, &a) in g.courses.iter().enumerate() {
            for &b in &g.courses[x + 1..] {
                let key = (a.min(b), a.max(b));
                *demand.entry(key).or_default() += g.students as u64;
            }
        }
    }
    demand.retain(|(a, b), _| i.courses[*a].curriculum != i.courses[*b].curriculum);

    let mut best = None;
    let total = (nt * nr).pow(n as u32);
    'outer: for code in 0..total {
        let mut c = code;
        let mut place = Vec::with_capacity(n);
        for _ in 0..n {
            place.push(((c % (nt * nr)) / nr, c % nr));
            c /= nt * nr;
        }
        for a in 0..n {
            let (ta, ra) = place[a];
            if i.sessions[a].kind == SessionKind::Lab && !i.rooms[ra].is_lab {
                continue 'outer;
            }
            for b in a + 1..n {
                let (tb, rb) = place[b];
                if ta == tb
                    && (ra == rb || curriculum(a) == curriculum(b) || i.sessions[a].staff == i.sessions[b].staff)
                {
                    continue 'outer;
                }
            }
        }
        let mut cost = 0;
        for (&(ca, cb), &students) in &demand {
            for &sa in &i.courses[ca].sessions {
                for &sb in &i.courses[cb].sessions {
                    if place[sa].0 == place[sb].0 {
                        cost += if weighted { students } else { 1 };
                    }
                }
            }
        }
        for (s, session) in i.sessions.iter().enumerate() {
            if session.forbidden.contains(&place[s].0) {
                cost += if weighted { 10 } else { 1 };
            }
            let capacity = i.rooms[place[s].1].capacity;
            if capacity < session.enrollment {
                cost += if weighted { (session.enrollment - capacity) as u64 } else { 1 };
            }
        }
        best = Some(best.map_or(cost, |b: u64| b.min(cost)));
    }
    best
}

#[derive(Default)]
struct Closure {
    checked: usize,
    failures: Vec<String>,
}

/// Solves `i`, then checks the decoded timetable against the solver's cost.
fn solve_and_close(
    i: &Instance,
    opts: &EncodeOptions,
    cfg: &SolverConfig,
    closure: &mut Closure,
    label: &str,
) -> Result<Option<u64>, String> {
    let enc = encode(i, opts).map_err(|e| format!("{label}: {e}"))?;
    let r = solve_maxsat(&enc.formula, cfg).map_err(|e| format!("{label}: {e}"))?;
    let cost = optimum(&r)?;
    if let Some(m) = r.model() {
        closure.checked += 1;
        match decode_timetable(i, &enc.varmap, m.assignment()) {
            Err(e) => closure.failures.push(format!("{label}: decode: {e}")),
            Ok(tt) => {
                let hard = check_hard(i, &tt);
                if !hard.is_empty() {
                    closure.failures.push(format!("{label}: {} hard violations", hard.len()));
                }
                let total = compute_cost(i, &tt, opts).total;
                if total != m.cost() {
                    closure.failures.push(format!("{label}: timetable cost {total}, solver {}", m.cost()));
                }
            }
        }
    }
    Ok(cost)
}

fn pipeline_optimality(closure: &mut Closure) -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let schemes = [None, Some(CardScheme::Pairwise), Some(CardScheme::SequentialCounter), Some(CardScheme::Totalizer)];
    let (mut feasible, mut unsat) = (0, 0);
    let mut seed = 0u64;
    // keep drawing until 50 instances with a feasible timetable have been compared
    while feasible < 50 {
        ensure!(seed < 1000, "only {feasible} feasible instances in {seed} draws");
        let courses = rng.gen_range(1..=2);
        let days = rng.gen_range(1..=2);
        let params = GenParams {
            days,
            slots_per_day: rng.gen_range(1..=4 / days),
            rooms: if rng.gen_bool(0.75) { 2 } else { 1 },
            courses,
            curricula: rng.gen_range(1..=courses),
            overlap_density: 0.7,
        };
        let i = gen_random_instance(seed, &params).map_err(|e| e.to_string())?;
        ensure!(i.sessions.len() <= 4 && i.timeslots.len() <= 4 && i.rooms.len() <= 2, "instance too large");
        for weighted in [true, false] {
            let opts = EncodeOptions {
                card_scheme: schemes[seed as usize % 4],
                ..if weighted { EncodeOptions::weighted() } else { EncodeOptions::partial() }
            };
            let cfg = &configs()[seed as usize % 2];
            let label = format!("seed {seed} weighted={weighted}");
            let got = solve_and_close(&i, &opts, cfg, closure, &label)?;
            let want = semantic_optimum(&i, weighted);
            ensure!(got == want, "{label}: solver {got:?}, enumeration {want:?}");
            if weighted {
                if want.is_some() {
                    feasible += 1;
                } else {
                    unsat += 1;
                }
            }
        }
        seed += 1;
    }
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(60), "took {took:?}");
    Ok(format!(
        "{} instances x 2 modes exact ({feasible} feasible, {unsat} hard-unsat), {took:?}",
        feasible + unsat
    ))
}

fn cross_validation(closure: &mut Closure) -> Verdict {
    let i = example_instance();
    for (opts, mode) in [(EncodeOptions::weighted(), "weighted"), (EncodeOptions::partial(), "partial")] {
        for cfg in configs() {
            let label = format!("example {mode} {:?}", cfg.optimizer);
            solve_and_close(&i, &opts, &cfg, closure, &label)?;
        }
    }
    for seed in 0..10 {
        let params = GenParams {
            days: 3,
            slots_per_day: 2,
            rooms: 3,
            courses: 4,
            curricula: 2,
            overlap_density: 0.4,
        };
        let g = gen_random_instance(1000 + seed, &params).map_err(|e| e.to_string())?;
        solve_and_close(&g, &EncodeOptions::weighted(), &SolverConfig::default(), closure, &format!("gen {seed}"))?;
    }
    ensure!(closure.failures.is_empty(), "{}", closure.failures.join("; "));
    Ok(format!("{} solved models decode, re-score equal and are hard-feasible", closure.checked))
}

// ---- 5 -------------------------------------------------------------------

fn random_formula(rng: &mut ChaCha8Rng, max_vars: u32, max_clauses: usize) -> WcnfFormula {
    let n = rng.gen_range(1..=max_vars);
    let mut f = WcnfFormula::new(n);
    for _ in 0..rng.gen_range(0..=max_clauses) {
        let mut vars: Vec<u32> = (1..=n).collect();
        let len = rng.gen_range(1..=(n as usize).min(4));
        let lits = (0..len)
            .map(|_| Lit::new(vars.swap_remove(rng.gen_range(0..vars.len())), rng.gen_bool(0.5)))
            .collect();
        let weight = if rng.gen_bool(0.2) {
            Weight::Hard
        } else {
            Weight::Soft(rng.gen_range(1..=9))
        };
        f.add(Clause::new(lits, weight).unwrap()).unwrap();
    }
    f
}

fn solver_vs_oracle() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut unsat = 0;
    for round in 0..200 {
        let f = random_formula(&mut rng, 18, 60);
        let want = optimum(&brute_force_maxsat(&f).map_err(|e| e.to_string())?)?;
        for cfg in configs() {
            let cfg = SolverConfig { seed: round, ..cfg };
            let got = optimum(&solve_maxsat(&f, &cfg).map_err(|e| e.to_string())?)?;
            ensure!(got == want, "round {round} {:?}: {got:?} vs brute force {want:?}", cfg.optimizer);
        }
        unsat += want.is_none() as usize;
    }
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(120), "took {took:?}");
    Ok(format!("200 formulas x 2 optimizers exact ({unsat} hard-unsat), {took:?}"))
}

// ---- 7 -------------------------------------------------------------------

fn example_end_to_end() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_ttsat");
    let instance = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/example.json");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let csv = dir.path().join("example.csv");
    let start = Instant::now();
    let out = Command::new(bin)
        .arg("solve")
        .arg(&instance)
        .args(["--format", "csv", "-o"])
        .arg(&csv)
        .output()
        .map_err(|e| e.to_string())?;
    let took = start.elapsed();
    let stdout = String::from_utf8_lossy(&out.stdout);
    ensure!(out.status.code() == Some(0), "exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr));
    ensure!(took < Duration::from_secs(10), "took {took:?}");
    let want = format!("o {EXAMPLE_WEIGHTED_OPTIMUM}\ns OPTIMUM FOUND\n");
    ensure!(stdout == want, "stdout {stdout:?}, want {want:?}");

    let check = Command::new(bin)
        .arg("validate")
        .arg(&instance)
        .arg(&csv)
        .output()
        .map_err(|e| e.to_string())?;
    let report = String::from_utf8_lossy(&check.stdout);
    ensure!(check.status.code() == Some(0), "validate: {report}");
    ensure!(!report.contains("hard:"), "hard violations: {report}");
    ensure!(report.contains(&format!("cost {EXAMPLE_WEIGHTED_OPTIMUM}\n")), "validate cost: {report}");

    let partial = Command::new(bin)
        .arg("solve")
        .arg(&instance)
        .args(["--mode", "partial"])
        .output()
        .map_err(|e| e.to_string())?;
    let first = String::from_utf8_lossy(&partial.stdout).lines().next().unwrap_or("").to_string();
    ensure!(first == format!("o {EXAMPLE_PARTIAL_OPTIMUM}"), "partial mode: {first}");
    Ok(format!("OPTIMUM {EXAMPLE_WEIGHTED_OPTIMUM}, feasible, {took:?}"))
}

// ---- 8 -------------------------------------------------------------------

fn dimacs_round_trip() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut formulas: Vec<WcnfFormula> = (0..100)
        .map(|n| {
            let mut f = random_formula(&mut rng, 40, 80);
            if n % 3 == 0 {
                f.push_meta(format!("random formula {n}"));
            }
            f
        })
        .collect();
    for card in [None, Some(CardScheme::Totalizer)] {
        let opts = EncodeOptions {
            card_scheme: card,
            ..EncodeOptions::weighted()
        };
        formulas.push(encode(&example_instance(), &opts).map_err(|e| e.to_string())?.formula);
    }
    for (n, f) in formulas.iter().enumerate() {
        let first = write_dimacs(f);
        let parsed = parse_dimacs(&first).map_err(|e| format!("formula {n}: {e}"))?;
        ensure!(write_dimacs(&parsed) == first, "formula {n} differs after round trip");
    }
    Ok(format!("{} formulas byte-identical", formulas.len()))
}

fn main() -> ExitCode {
    let mut closure = Closure::default();
    let mut failed = 0;
    let mut report = |n: usize, name: &str, verdict: std::thread::Result<Verdict>| {
        let line = match verdict {
            Ok(Ok(detail)) => format!("PASS  criterion {n}: {name}: {detail}"),
            Ok(Err(why)) => format!("FAIL  criterion {n}: {name}: {why}"),
            Err(_) => format!("FAIL  criterion {n}: {name}: panicked"),
        };
        failed += line.starts_with("FAIL") as usize;
        println!("{line}");
    };
    report(1, "micro formulas", catch_unwind(micro_formulas));
    report(2, "cardinality exhaustive", catch_unwind(cardinality_exhaustive));
    report(3, "example encoding families", catch_unwind(fixture_families));
    report(
        4,
        "pipeline optimality",
        catch_unwind(AssertUnwindSafe(|| pipeline_optimality(&mut closure))),
    );
    report(5, "solver vs brute force", catch_unwind(solver_vs_oracle));
    report(
        6,
        "cross-validation closure",
        catch_unwind(AssertUnwindSafe(|| cross_validation(&mut closure))),
    );
    report(7, "example end to end", catch_unwind(example_end_to_end));
    report(8, "DIMACS round trip", catch_unwind(dimacs_round_trip));
    if failed == 0 {
        println!("acceptance: all 8 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
