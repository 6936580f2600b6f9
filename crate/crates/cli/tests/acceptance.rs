//! One line per acceptance criterion. Criteria listed in `UNATTAINABLE` are
//! expected to print FAIL; anything else failing, or any `hard` error, fails
//! the test.

use std::collections::BTreeSet;
use std::process::Command;

use belief_core::laws::{
    check_contraction_postulates, check_dp, check_identities, check_revision_postulates,
    check_update_postulates, semantic_classes, Grid, LawReport, Operator, Verdict,
};
use belief_core::oracle::{
    dalal_revise, delta_min, extension_models, forbus_update, formula_models, naive_max_eq,
    satoh_revise, skeptical_models, winslett_update,
};
use belief_core::scenario::{
    enumeration_terms, extension_rep, flip_rep, greedy_pass, max_eq, Extensions, MaximalityMode,
};
use belief_core::update::update_with_mode;
use belief_core::{
    contract, entails, equivalent, parse, query, revise, Atom, BeliefBase, ChangeOptions, Formula,
    Reasoner, Scenario, SelectionStrategy,
};

/// Seeded random pairs over 3 atoms required by the grid criteria.
const RANDOM_PAIRS: usize = 1000;
const SEED: u64 = 2024;
/// Connective joining the kept part of K to alpha.
const SIZE_OVERHEAD: usize = 1;

type Criterion = (&'static str, fn() -> Check);

const UNATTAINABLE: &[&str] = &["postulate-suites", "update"];

struct Check {
    pass: bool,
    detail: String,
    /// Failures that break the build even for an unattainable criterion.
    hard: Vec<String>,
}

impl Check {
    fn from(failures: Vec<String>, ok: String) -> Check {
        let pass = failures.is_empty();
        let detail = if pass { ok } else { failures.join("; ") };
        Check { pass, detail, hard: Vec::new() }
    }
}

fn f(s: &str) -> Formula {
    parse(s).unwrap()
}

fn kb(s: &str) -> BeliefBase {
    BeliefBase::from_formula(f(s))
}

fn base(k: &Formula) -> BeliefBase {
    BeliefBase::from_formula(k.clone())
}

fn sat(x: &Formula) -> bool {
    !formula_models(x, &x.vocab()).unwrap().is_empty()
}

fn members(fam: &belief_core::ExtensionFamily) -> Vec<String> {
    fam.eq_sets().iter().map(ToString::to_string).collect()
}

/// All pairs over 2 atoms, then `RANDOM_PAIRS` random pairs over 3 atoms.
fn grid() -> Vec<(Formula, Formula)> {
    let classes = semantic_classes(2);
    let mut out: Vec<(Formula, Formula)> = classes
        .iter()
        .flat_map(|k| classes.iter().map(move |a| (k.clone(), a.clone())))
        .collect();
    out.extend(Grid::random(3, RANDOM_PAIRS, SEED).pairs());
    out
}

/// Satisfiable pairs, topped up until `RANDOM_PAIRS` of them are random.
fn satisfiable_grid() -> Vec<(Formula, Formula)> {
    let classes = semantic_classes(2);
    let mut out: Vec<(Formula, Formula)> = classes
        .iter()
        .flat_map(|k| classes.iter().map(move |a| (k.clone(), a.clone())))
        .filter(|(k, a)| sat(k) && sat(a))
        .collect();
    let random: Vec<_> = Grid::random(3, 2 * RANDOM_PAIRS, SEED)
        .pairs()
        .into_iter()
        .filter(|(k, a)| sat(k) && sat(a))
        .take(RANDOM_PAIRS)
        .collect();
    assert_eq!(random.len(), RANDOM_PAIRS);
    out.extend(random);
    out
}

fn table_rows(
    rows: &[(&str, &str, &[&str], &str)],
    op: fn(&Reasoner, &BeliefBase, &Formula) -> BeliefBase,
    scenario: fn(BeliefBase, Formula) -> Scenario,
) -> Vec<String> {
    let r = Reasoner::default();
    let mut failures = Vec::new();
    for (k, a, eqs, expected) in rows {
        let b = scenario(kb(k), f(a));
        let fam = max_eq(&r, &b, MaximalityMode::Inclusion, &Extensions::All);
        if members(&fam) != *eqs {
            failures.push(format!("{k} / {a}: EQ {:?}", members(&fam)));
        }
        let out = op(&r, &kb(k), &f(a));
        if !equivalent(&out.conjunction(), &f(expected)) {
            failures.push(format!("{k} / {a}: got {}", out.conjunction()));
        }
    }
    failures
}

fn revision_rows() -> Check {
    let rows: &[(&str, &str, &[&str], &str)] = &[
        ("p & q", "~q", &["{p}"], "p & ~q"),
        ("~p <-> q", "~q", &["{p, q}"], "p & ~q"),
        ("p | q", "~p | ~q", &["{p, q}"], "p <-> ~q"),
        ("p & q", "~p | ~q", &["{p}", "{q}"], "p <-> ~q"),
    ];
    let failures = table_rows(
        rows,
        |r, k, a| revise(r, k, a, &ChangeOptions::skeptical()).unwrap(),
        |k, a| Scenario::revision(k, a).unwrap(),
    );
    Check::from(failures, "4/4 rows, EQ sets exact".into())
}

fn contraction_rows() -> Check {
    let rows: &[(&str, &str, &[&str], &str)] = &[
        ("p & q", "q", &["{p}"], "p"),
        ("p & q & r", "p | q", &["{r}"], "r"),
        ("p | q", "p & q", &["{p, q}"], "p | q"),
        ("p & q", "p & q", &["{p}", "{q}"], "p | q"),
    ];
    let failures = table_rows(
        rows,
        |r, k, a| contract(r, k, a, &ChangeOptions::skeptical()).unwrap(),
        |k, a| Scenario::contraction(k, a).unwrap(),
    );
    Check::from(failures, "4/4 rows, EQ sets exact".into())
}

fn worked_examples() -> Check {
    let r = Reasoner::default();
    let mut failures = Vec::new();
    let b = Scenario::revision(kb("p & q"), f("~p | ~q")).unwrap();
    let fam = max_eq(&r, &b, MaximalityMode::Inclusion, &Extensions::All);
    if members(&fam) != ["{p}", "{q}"] {
        failures.push(format!("example 1 EQ {:?}", members(&fam)));
    }
    let out = revise(&r, &kb("p & q"), &f("~p | ~q"), &ChangeOptions::skeptical()).unwrap();
    for goal in ["~p | ~q", "p | q"] {
        if !entails(out.formulas(), &f(goal)) {
            failures.push(format!("example 1 does not derive {goal}"));
        }
    }
    let out = contract(&r, &kb("p & q"), &f("q"), &ChangeOptions::skeptical()).unwrap();
    if !equivalent(&out.conjunction(), &f("p")) {
        failures.push(format!("example 2 gives {}", out.conjunction()));
    }
    if fam.revision_rep() != f("(p & ~q | ~p & q) & (~p | ~q)") {
        failures.push(format!("flip form {}", fam.revision_rep()));
    }
    let b = Scenario::contraction(kb("p & ~q"), f("~q")).unwrap();
    let fam = max_eq(&r, &b, MaximalityMode::Inclusion, &Extensions::All);
    let rep = fam.enumeration_rep().unwrap();
    if !equivalent(&rep, &f("(p & false) | (p & true)")) || !equivalent(&rep, &f("p")) {
        failures.push(format!("enumeration form {rep}"));
    }
    Check::from(failures, "two-extension revision, single contraction, flip and enumeration forms".into())
}

fn iterated_example() -> Check {
    let r = Reasoner::default();
    let o = ChangeOptions::skeptical();
    let mut failures = Vec::new();
    let first = revise(&r, &kb("~p"), &f("p | q"), &o).unwrap();
    let twice = revise(&r, &BeliefBase::from_formula(first.conjunction()), &f("p"), &o).unwrap();
    if !equivalent(&twice.conjunction(), &f("p & q")) {
        failures.push(format!("(~p * (p | q)) * p = {}", twice.conjunction()));
    }
    let once = revise(&r, &kb("~p"), &f("p"), &o).unwrap();
    if !equivalent(&once.conjunction(), &f("p")) {
        failures.push(format!("~p * p = {}", once.conjunction()));
    }
    let op = Operator::revision(o);
    let grid = Grid::Explicit(vec![
        vec![f("~p"), f("p | q"), f("p")],
        vec![f("true"), f("r & s"), f("~r")],
    ]);
    let reports = check_dp(&op, &grid);
    for law in ["DP-C1", "DP-C2"] {
        let rep = reports.iter().find(|x| x.law == law).unwrap();
        if rep.verdict != Verdict::Violated {
            failures.push(format!("{law} not violated on the witnesses"));
        }
    }
    Check::from(failures, "(K * mu) * a = p & q, K * a = p; DP-C1, DP-C2 violated".into())
}

fn delta_min_complements() -> Check {
    let r = Reasoner::default();
    let pairs = satisfiable_grid();
    let mut failures = Vec::new();
    for (k, a) in &pairs {
        let b = Scenario::revision(base(k), a.clone()).unwrap();
        let fam = max_eq(&r, &b, MaximalityMode::Inclusion, &Extensions::All);
        let ours: BTreeSet<BTreeSet<Atom>> = fam.complements().into_iter().collect();
        let theirs: BTreeSet<BTreeSet<Atom>> =
            delta_min(&base(k), a).unwrap().into_iter().map(|d| d.atoms).collect();
        if ours != theirs {
            failures.push(format!("K = {k}, alpha = {a}"));
        }
    }
    Check::from(failures, format!("{} pairs, 0 mismatches", pairs.len()))
}

fn finite_representations() -> Check {
    let r = Reasoner::default();
    let mut failures = Vec::new();
    let pairs = grid();
    for (k, a) in &pairs {
        let b = Scenario::revision(base(k), a.clone()).unwrap();
        let vocabulary = b.candidates(false);
        let fam = max_eq(&r, &b, MaximalityMode::Inclusion, &Extensions::All);
        for eq in fam.eq_sets() {
            let flipped = Formula::and(flip_rep(&b, eq), a.clone());
            let forgotten = extension_rep(&r, &b, eq).unwrap();
            let flip_models = formula_models(&flipped, &vocabulary).unwrap();
            if flip_models != formula_models(&forgotten, &vocabulary).unwrap()
                || flip_models != extension_models(&b, eq).unwrap()
            {
                failures.push(format!("revision K = {k}, alpha = {a}, EQ = {eq}"));
            }
        }
        let skeptical = skeptical_models(&b, MaximalityMode::Inclusion).unwrap();
        if formula_models(&fam.revision_rep(), &vocabulary).unwrap() != skeptical {
            failures.push(format!("revision intersection K = {k}, alpha = {a}"));
        }

        let b = Scenario::contraction(base(k), a.clone()).unwrap();
        let vocabulary = b.candidates(false);
        let fam = max_eq(&r, &b, MaximalityMode::Inclusion, &Extensions::All);
        for eq in fam.eq_sets() {
            let terms = Formula::disjoin(enumeration_terms(&b, eq).unwrap());
            if formula_models(&terms, &vocabulary).unwrap() != extension_models(&b, eq).unwrap() {
                failures.push(format!("contraction K = {k}, alpha = {a}, EQ = {eq}"));
            }
        }
        let skeptical = skeptical_models(&b, MaximalityMode::Inclusion).unwrap();
        if formula_models(&fam.enumeration_rep().unwrap(), &vocabulary).unwrap() != skeptical {
            failures.push(format!("contraction intersection K = {k}, alpha = {a}"));
        }
    }
    Check::from(failures, format!("{} pairs, 0 mismatches", pairs.len()))
}

fn vocabulary_restriction() -> Check {
    let r = Reasoner::default();
    let mut failures = Vec::new();
    let pairs = grid();
    for (k, a) in &pairs {
        let one_sided: BTreeSet<Atom> = k.vocab().symmetric_difference(&a.vocab()).cloned().collect();
        for b in [
            Scenario::revision(base(k), a.clone()).unwrap(),
            Scenario::contraction(base(k), a.clone()).unwrap(),
        ] {
            for mode in [MaximalityMode::Inclusion, MaximalityMode::Cardinality] {
                let naive = naive_max_eq(&b, mode).unwrap();
                if naive.eq_sets().iter().any(|eq| !one_sided.is_subset(eq.included())) {
                    failures.push(format!("forced atom missing, K = {k}, alpha = {a}"));
                }
                let restricted = max_eq(&r, &b, mode, &Extensions::All);
                if restricted.eq_sets() != naive.eq_sets() {
                    failures.push(format!("restricted differs, K = {k}, alpha = {a}, {mode:?}"));
                }
            }
        }
    }
    Check::from(failures, format!("{} pairs x 2 scenarios x 2 modes, 0 mismatches", pairs.len()))
}

fn must_hold(reports: &[LawReport], laws: &[&str], failures: &mut Vec<String>) {
    for law in laws {
        let rep = reports.iter().find(|x| x.law == *law).unwrap();
        if !rep.holds() {
            failures.push(format!(
                "{law} ({}) {} violations, e.g. {}",
                rep.operator,
                rep.violation_count,
                rep.violations
                    .first()
                    .map(|v| v.inputs.iter().map(|l| format!("{} = {}", l.name, l.formula)).collect::<Vec<_>>().join(", "))
                    .unwrap_or_default()
            ));
        }
    }
}

fn postulate_suites() -> Check {
    let grid = Grid::exhaustive(2);
    let mut failures = Vec::new();
    let skeptical = ChangeOptions::skeptical();
    let choice = ChangeOptions::choice(SelectionStrategy::default());
    let revision = ["AGM-R1", "AGM-R2", "AGM-R3", "AGM-R4", "AGM-R5w", "AGM-R6", "AGM-R7"];
    for opts in [skeptical.clone(), choice.clone()] {
        let reports = check_revision_postulates(&Operator::revision(opts), &grid);
        must_hold(&reports, &revision, &mut failures);
    }
    let rev = Operator::revision(skeptical.clone());
    let con = Operator::contraction(skeptical);
    let reports = check_contraction_postulates(&con, &grid);
    must_hold(&reports, &["AGM-C1", "AGM-C2", "AGM-C3", "AGM-C4", "AGM-C6", "AGM-C7"], &mut failures);
    let weak_c4 = reports.iter().find(|x| x.law == "AGM-C4w").unwrap().holds();
    let reports = check_contraction_postulates(&Operator::contraction(choice), &grid);
    must_hold(&reports, &["AGM-C1", "AGM-C2", "AGM-C3", "AGM-C4", "AGM-C6"], &mut failures);
    let identities = check_identities(&rev, &con, &grid);
    must_hold(&identities, &["Levi", "Harper", "Iterated"], &mut failures);
    let harper = identities.iter().find(|x| x.law == "Harper").unwrap();
    if harper.witness_count == 0 {
        failures.push("Harper has no strict witness".into());
    }
    let mut check = Check::from(
        failures,
        format!("all hold, Harper strict witnesses: {}", harper.witness_count),
    );
    if !check.pass {
        check.detail.push_str(&format!(
            " [C4 restricted to consistent K holds: {weak_c4}; Harper strict witnesses: {}]",
            harper.witness_count
        ));
    }
    check
}

fn update_criterion() -> Check {
    let r = Reasoner::default();
    let pairs = satisfiable_grid();
    let mut failures = Vec::new();
    let mut hard = Vec::new();
    let (mut winslett, mut dalal, mut forbus, mut satoh) = (0, 0, 0, 0);
    let mut first_winslett = None;
    for (k, a) in &pairs {
        let ours = update_with_mode(&r, &base(k), a, MaximalityMode::Inclusion).unwrap();
        if !equivalent(&ours.conjunction(), &winslett_update(&base(k), a).unwrap().conjunction()) {
            winslett += 1;
            first_winslett.get_or_insert_with(|| format!("K = {k}, alpha = {a}"));
        }
        let card = update_with_mode(&r, &base(k), a, MaximalityMode::Cardinality).unwrap();
        if !equivalent(&card.conjunction(), &forbus_update(&base(k), a).unwrap().conjunction()) {
            forbus += 1;
        }
        let rev = revise(&r, &base(k), a, &ChangeOptions::skeptical()).unwrap();
        if !equivalent(&rev.conjunction(), &satoh_revise(&base(k), a).unwrap().conjunction()) {
            satoh += 1;
        }
        let opts = ChangeOptions::skeptical().with_mode(MaximalityMode::Cardinality);
        let rev = revise(&r, &base(k), a, &opts).unwrap();
        if !equivalent(&rev.conjunction(), &dalal_revise(&base(k), a).unwrap().conjunction()) {
            dalal += 1;
        }
    }
    if winslett > 0 {
        failures.push(format!(
            "Winslett disagrees on {winslett}/{} pairs, e.g. {}",
            pairs.len(),
            first_winslett.unwrap()
        ));
    }
    let reports = check_update_postulates(&Operator::update(MaximalityMode::Inclusion), &Grid::exhaustive(2));
    must_hold(
        &reports,
        &["KM-U1", "KM-U2", "KM-U3", "KM-U4", "KM-U5", "KM-U6", "KM-U7", "KM-U8"],
        &mut failures,
    );
    if satoh > 0 {
        hard.push(format!("inclusion revision disagrees with Satoh on {satoh} pairs"));
    }
    let reported = format!(
        "Satoh mismatches {satoh}, Dalal mismatches {dalal} (reported), Forbus mismatches {forbus} (reported)"
    );
    let mut check = Check::from(failures, reported.clone());
    if !check.pass {
        check.detail.push_str(&format!(" [{reported}]"));
    }
    check.hard = hard;
    check
}

fn size_bound() -> Check {
    let r = Reasoner::default();
    let orders = [
        vec![],
        vec![Atom::new("q")],
        vec![Atom::new("r"), Atom::new("p")],
    ];
    let mut failures = Vec::new();
    let mut worst = 0isize;
    let pairs = grid();
    for (k, a) in &pairs {
        for order in &orders {
            for mode in [MaximalityMode::Inclusion, MaximalityMode::Cardinality] {
                let opts = ChangeOptions::choice(SelectionStrategy::with_order(order.clone())).with_mode(mode);
                let out = revise(&r, &base(k), a, &opts).unwrap().conjunction();
                let bound = k.size() + a.size() + SIZE_OVERHEAD;
                worst = worst.max(out.size() as isize - (k.size() + a.size()) as isize);
                if out.size() > bound {
                    failures.push(format!("K = {k}, alpha = {a}: {} > {bound}", out.size()));
                }
            }
        }
    }
    Check::from(
        failures,
        format!("{} instances, worst size - (|K| + |alpha|) = {worst}", pairs.len() * orders.len() * 2),
    )
}

fn call_complexity() -> Check {
    let beta = f("p | q");
    let orders = [vec![], vec![Atom::new("r"), Atom::new("q")]];
    let mut failures = Vec::new();
    let pairs = grid();
    for (k, a) in &pairs {
        let b = Scenario::revision(base(k), a.clone()).unwrap();
        let n = b.candidates(true).len();
        for order in &orders {
            let s = SelectionStrategy::with_order(order.clone());
            let r = Reasoner::default();
            greedy_pass(&r, &b, &s);
            if r.sat_calls() != n {
                failures.push(format!("greedy K = {k}, alpha = {a}: {} calls, {n} candidates", r.sat_calls()));
            }
            let r = Reasoner::default();
            query(&r, &base(k), a, &beta, &ChangeOptions::choice(s)).unwrap();
            if r.sat_calls() != n + 1 {
                failures.push(format!("query K = {k}, alpha = {a}: {} calls, {n} candidates", r.sat_calls()));
            }
        }
    }
    Check::from(failures, format!("{} instances: greedy n calls, query n + 1", pairs.len() * orders.len()))
}

fn belief(dir: &std::path::Path, args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_belief"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

fn cli() -> Check {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("kb.txt"), "p & q\n").unwrap();
    let mut failures = Vec::new();

    let (code, out) = belief(dir.path(), &["revise", "kb.txt", "~p | ~q", "--show-eq"]);
    let lines: Vec<&str> = out.lines().collect();
    if code != 0 || lines.len() != 3 || lines[0] != "EQ1 = {p}" || lines[1] != "EQ2 = {q}" {
        failures.push(format!("revise: exit {code}, output {out:?}"));
    } else if !equivalent(&f(lines[2]), &f("p <-> ~q")) {
        failures.push(format!("revise result {}", lines[2]));
    }

    let (code, out) = belief(dir.path(), &["contract", "kb.txt", "q"]);
    if code != 0 || !equivalent(&f(out.trim()), &f("p")) {
        failures.push(format!("contract: exit {code}, output {out:?}"));
    }

    let (code, out) = belief(dir.path(), &["query", "kb.txt", "~q", "p"]);
    if code != 0 || out.trim() != "true" {
        failures.push(format!("query: exit {code}, output {out:?}"));
    }

    let r = Reasoner::default();
    for (op, alpha) in [("revise", "~p | ~q"), ("contract", "q"), ("update", "~p | ~q")] {
        let (_, out) = belief(dir.path(), &[op, "kb.txt", alpha, "--format", "records"]);
        let record: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        let printed = f(record["result"].as_str().unwrap());
        let library = match op {
            "revise" => revise(&r, &kb("p & q"), &f(alpha), &ChangeOptions::skeptical()),
            "contract" => contract(&r, &kb("p & q"), &f(alpha), &ChangeOptions::skeptical()),
            _ => belief_core::update(&r, &kb("p & q"), &f(alpha)),
        }
        .unwrap();
        if !equivalent(&printed, &library.conjunction()) {
            failures.push(format!("{op} record does not round-trip: {printed}"));
        }
    }
    Check::from(failures, "3 invocations and record round trips".into())
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("revision-rows", revision_rows),
        ("contraction-rows", contraction_rows),
        ("worked-examples", worked_examples),
        ("iterated-revision", iterated_example),
        ("delta-min-complements", delta_min_complements),
        ("finite-representations", finite_representations),
        ("vocabulary-restriction", vocabulary_restriction),
        ("postulate-suites", postulate_suites),
        ("update", update_criterion),
        ("choice-size-bound", size_bound),
        ("choice-call-complexity", call_complexity),
        ("cli", cli),
    ];
    let mut unexpected = Vec::new();
    for (name, run) in criteria {
        let check = run();
        let tag = if check.pass { "PASS" } else { "FAIL" };
        println!("{tag} {name}: {}", check.detail);
        for h in &check.hard {
            println!("     hard failure: {h}");
            unexpected.push(format!("{name}: {h}"));
        }
        if check.pass == UNATTAINABLE.contains(&name) {
            unexpected.push(format!("{name} {tag}"));
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcomes: {unexpected:?}");
        std::process::exit(1);
    }
}
