//! Postulate auditing over instance grids.
//!
//! An [`Operator`] is a memoized function from a base formula and an input
//! formula to a result formula. Each law is a check over a fixed number of
//! grid formulas; running a catalogue over a [`Grid`] yields one
//! [`LawReport`] per law, with replayable counterexamples.

use std::collections::{BTreeSet, HashMap};
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::change::{contract, revise, ChangeOptions, Variant};
use crate::error::{Error, Result};
use crate::formula::{parse, Atom, BeliefBase, Formula, Reasoner};
use crate::oracle;
use crate::scenario::MaximalityMode;
use crate::update::update_with_mode;

type ApplyFn = dyn Fn(&Formula, &Formula) -> Formula + Send + Sync;

/// A change operator `(K, α) ↦ result`, memoized on its inputs.
pub struct Operator {
    name: String,
    apply: Box<ApplyFn>,
    memo: Mutex<HashMap<(Formula, Formula), Formula>>,
}

impl std::fmt::Debug for Operator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Operator").field("name", &self.name).finish()
    }
}

fn describe(opts: &ChangeOptions) -> String {
    let variant = match &opts.variant {
        Variant::Skeptical => "skeptical",
        Variant::Choice(_) => "choice",
    };
    let mode = match opts.mode {
        MaximalityMode::Inclusion => "inclusion",
        MaximalityMode::Cardinality => "cardinality",
    };
    format!("{variant}/{mode}")
}

fn oracle_or_bottom(res: Result<BeliefBase>) -> Formula {
    match res {
        Ok(b) => b.conjunction(),
        Err(Error::OracleDomain(_)) => Formula::False,
        Err(e) => panic!("oracle failed on a grid instance: {e}"),
    }
}

impl Operator {
    pub fn new<F>(name: impl Into<String>, apply: F) -> Operator
    where
        F: Fn(&Formula, &Formula) -> Formula + Send + Sync + 'static,
    {
        Operator {
            name: name.into(),
            apply: Box::new(apply),
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn apply(&self, k: &Formula, alpha: &Formula) -> Formula {
        let key = (k.clone(), alpha.clone());
        if let Some(hit) = self.memo.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let out = (self.apply)(k, alpha);
        self.memo.lock().unwrap().insert(key, out.clone());
        out
    }

    pub fn revision(opts: ChangeOptions) -> Operator {
        let r = Reasoner::truth_table();
        Operator::new(format!("revision/{}", describe(&opts)), move |k, a| {
            revise(&r, &BeliefBase::from_formula(k.clone()), a, &opts)
                .expect("grid instances are within limits")
                .conjunction()
        })
    }

    pub fn contraction(opts: ChangeOptions) -> Operator {
        let r = Reasoner::truth_table();
        Operator::new(format!("contraction/{}", describe(&opts)), move |k, a| {
            contract(&r, &BeliefBase::from_formula(k.clone()), a, &opts)
                .expect("grid instances are within limits")
                .conjunction()
        })
    }

    pub fn update(mode: MaximalityMode) -> Operator {
        let r = Reasoner::truth_table();
        let name = format!("update/{}", describe(&ChangeOptions::skeptical().with_mode(mode)));
        Operator::new(name, move |k, a| {
            update_with_mode(&r, &BeliefBase::from_formula(k.clone()), a, mode)
                .expect("grid instances are within limits")
                .conjunction()
        })
    }

    /// Satoh revision; `⊥` outside the oracle's domain.
    pub fn satoh() -> Operator {
        Operator::new("oracle/satoh", |k, a| {
            oracle_or_bottom(oracle::satoh_revise(&BeliefBase::from_formula(k.clone()), a))
        })
    }

    pub fn dalal() -> Operator {
        Operator::new("oracle/dalal", |k, a| {
            oracle_or_bottom(oracle::dalal_revise(&BeliefBase::from_formula(k.clone()), a))
        })
    }

    pub fn winslett() -> Operator {
        Operator::new("oracle/winslett", |k, a| {
            oracle_or_bottom(oracle::winslett_update(&BeliefBase::from_formula(k.clone()), a))
        })
    }

    pub fn forbus() -> Operator {
        Operator::new("oracle/forbus", |k, a| {
            oracle_or_bottom(oracle::forbus_update(&BeliefBase::from_formula(k.clone()), a))
        })
    }
}

/// Grid atoms: `p, q, r, s`, then `a4, a5, ...`.
pub fn grid_atoms(n: usize) -> Vec<Atom> {
    (0..n)
        .map(|i| match i {
            0..=3 => Atom::new(["p", "q", "r", "s"][i]),
            _ => Atom::new(&format!("a{i}")),
        })
        .collect()
}

/// One formula per semantic class over `n` atoms (`2^(2^n)` of them), each
/// written as a disjunction of terms over its essential atoms.
pub fn semantic_classes(n: usize) -> Vec<Formula> {
    assert!(n <= 4, "semantic classes are enumerated for at most 4 atoms");
    let atoms: BTreeSet<Atom> = grid_atoms(n).into_iter().collect();
    let ordered: Vec<Atom> = atoms.iter().cloned().collect();
    let worlds: Vec<BTreeSet<Atom>> = (0..1usize << n)
        .map(|w| {
            (0..n)
                .filter(|i| w >> i & 1 == 1)
                .map(|i| ordered[i].clone())
                .collect()
        })
        .collect();
    (0..1u64 << (1 << n))
        .map(|mask| {
            let chosen = worlds
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, w)| w);
            Formula::from_worlds(&atoms, chosen)
        })
        .collect()
}

/// A random formula over `atoms` of depth at most `depth`.
pub fn random_formula<R: Rng>(rng: &mut R, atoms: &[Atom], depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::var(atoms[rng.gen_range(0..atoms.len())].clone()),
        };
    }
    let sub = |rng: &mut R| random_formula(rng, atoms, depth - 1);
    match rng.gen_range(0..5) {
        0 => Formula::not(sub(rng)),
        1 => Formula::and(sub(rng), sub(rng)),
        2 => Formula::or(sub(rng), sub(rng)),
        3 => Formula::implies(sub(rng), sub(rng)),
        _ => Formula::iff(sub(rng), sub(rng)),
    }
}

#[derive(Clone, Debug)]
pub enum Grid {
    /// Every tuple of semantic classes over `atoms` atoms.
    Exhaustive { atoms: usize },
    /// `count` random tuples of random formulas, from a fixed seed.
    Random { atoms: usize, count: usize, seed: u64 },
    /// Given instances; a law of arity `n` uses the first `n` formulas.
    Explicit(Vec<Vec<Formula>>),
}

impl Grid {
    pub fn exhaustive(atoms: usize) -> Grid {
        Grid::Exhaustive { atoms }
    }

    pub fn random(atoms: usize, count: usize, seed: u64) -> Grid {
        Grid::Random { atoms, count, seed }
    }

    pub fn describe(&self) -> String {
        match self {
            Grid::Exhaustive { atoms } => format!("exhaustive, {atoms} atoms"),
            Grid::Random { atoms, count, seed } => {
                format!("random, {atoms} atoms, {count} instances, seed {seed}")
            }
            Grid::Explicit(xs) => format!("explicit, {} instances", xs.len()),
        }
    }

    pub fn instances(&self, arity: usize) -> Vec<Vec<Formula>> {
        match self {
            Grid::Exhaustive { atoms } => {
                let classes = semantic_classes(*atoms);
                let mut out: Vec<Vec<Formula>> = vec![Vec::new()];
                for _ in 0..arity {
                    out = out
                        .into_iter()
                        .flat_map(|prefix| {
                            classes.iter().map(move |c| {
                                let mut t = prefix.clone();
                                t.push(c.clone());
                                t
                            })
                        })
                        .collect();
                }
                out
            }
            Grid::Random { atoms, count, seed } => {
                let names = grid_atoms(*atoms);
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                (0..*count)
                    .map(|_| (0..arity).map(|_| random_formula(&mut rng, &names, 3)).collect())
                    .collect()
            }
            Grid::Explicit(xs) => xs
                .iter()
                .filter(|x| x.len() >= arity)
                .map(|x| x[..arity].to_vec())
                .collect(),
        }
    }

    pub fn pairs(&self) -> Vec<(Formula, Formula)> {
        self.instances(2)
            .into_iter()
            .map(|mut v| {
                let b = v.pop().unwrap();
                let a = v.pop().unwrap();
                (a, b)
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    HoldsOnGrid,
    Violated,
}

/// A named list of formulas.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Labeled {
    pub name: String,
    pub formula: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub inputs: Vec<Labeled>,
    pub relation: String,
    pub observed: Vec<Labeled>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LawReport {
    pub law: String,
    pub relation: String,
    pub operator: String,
    pub grid: String,
    pub instances: usize,
    pub violation_count: usize,
    /// The first few violations.
    pub violations: Vec<Violation>,
    /// Instances where an inclusion law holds strictly, for laws that track
    /// them.
    pub witness_count: usize,
    pub witnesses: Vec<Violation>,
    pub verdict: Verdict,
}

impl LawReport {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::HoldsOnGrid
    }
}

/// Stored violations and witnesses per report.
pub const KEEP: usize = 8;

enum Outcome {
    Holds,
    /// Holds, and strictly.
    Witness(Vec<(&'static str, Formula)>),
    Fails(Vec<(&'static str, Formula)>),
}

struct Ctx<'a> {
    op: &'a Operator,
    aux: Option<&'a Operator>,
    r: Reasoner,
}

impl Ctx<'_> {
    fn f(&self, k: &Formula, a: &Formula) -> Formula {
        self.op.apply(k, a)
    }

    fn g(&self, k: &Formula, a: &Formula) -> Formula {
        self.aux.expect("law needs a second operator").apply(k, a)
    }

    fn sat(&self, f: &Formula) -> bool {
        self.r.satisfiable(std::slice::from_ref(f))
    }

    fn ent(&self, a: &Formula, b: &Formula) -> bool {
        self.r.entails(std::slice::from_ref(a), b)
    }

    fn eqv(&self, a: &Formula, b: &Formula) -> bool {
        self.r.equivalent(a, b)
    }
}

fn and(a: &Formula, b: &Formula) -> Formula {
    Formula::and(a.clone(), b.clone())
}

fn or(a: &Formula, b: &Formula) -> Formula {
    Formula::or(a.clone(), b.clone())
}

fn not(a: &Formula) -> Formula {
    Formula::not(a.clone())
}

fn require(ok: bool, observed: Vec<(&'static str, Formula)>) -> Outcome {
    if ok {
        Outcome::Holds
    } else {
        Outcome::Fails(observed)
    }
}

/// Syntactic variants of an input, all equivalent to it.
fn variants(a: &Formula) -> Vec<Formula> {
    vec![
        not(&not(a)),
        or(a, a),
        and(a, &Formula::True),
    ]
}

fn vocab_within(result: &Formula, inputs: &[&Formula]) -> bool {
    let allowed: BTreeSet<Atom> = inputs.iter().flat_map(|f| f.vocab()).collect();
    result.vocab().is_subset(&allowed)
}

type Check = fn(&Ctx, &[Formula]) -> Outcome;

struct Law {
    id: &'static str,
    relation: &'static str,
    inputs: &'static [&'static str],
    check: Check,
}

const KAB: &[&str] = &["K", "alpha", "beta"];
const KA: &[&str] = &["K", "alpha"];

fn revision_laws() -> Vec<Law> {
    vec![
        Law {
            id: "AGM-R1",
            relation: "K*a mentions only atoms of K and a",
            inputs: KA,
            check: |c, x| {
                let r = c.f(&x[0], &x[1]);
                require(vocab_within(&r, &[&x[0], &x[1]]), vec![("K*a", r)])
            },
        },
        Law {
            id: "AGM-R2",
            relation: "K*a |= a",
            inputs: KA,
            check: |c, x| {
                let r = c.f(&x[0], &x[1]);
                require(c.ent(&r, &x[1]), vec![("K*a", r)])
            },
        },
        Law {
            id: "AGM-R3",
            relation: "K & a |= K*a",
            inputs: KA,
            check: |c, x| {
                let r = c.f(&x[0], &x[1]);
                require(c.ent(&and(&x[0], &x[1]), &r), vec![("K*a", r)])
            },
        },
        Law {
            id: "AGM-R4",
            relation: "if K & a is consistent then K*a |= K & a",
            inputs: KA,
            check: |c, x| {
                let ka = and(&x[0], &x[1]);
                if !c.sat(&ka) {
                    return Outcome::Holds;
                }
                let r = c.f(&x[0], &x[1]);
                require(c.ent(&r, &ka), vec![("K*a", r)])
            },
        },
        Law {
            id: "AGM-R5",
            relation: "K*a is inconsistent only if a is",
            inputs: KA,
            check: |c, x| {
                let r = c.f(&x[0], &x[1]);
                require(!c.sat(&x[1]) || c.sat(&r), vec![("K*a", r)])
            },
        },
        Law {
            id: "AGM-R5w",
            relation: "K*a is inconsistent iff K or a is",
            inputs: KA,
            check: |c, x| {
                let r = c.f(&x[0], &x[1]);
                let expect_bottom = !c.sat(&x[0]) || !c.sat(&x[1]);
                require(c.sat(&r) != expect_bottom, vec![("K*a", r)])
            },
        },
        Law {
            id: "AGM-R6",
            relation: "a == b implies K*a == K*b (tested on syntactic variants of a)",
            inputs: KA,
            check: |c, x| {
                let r = c.f(&x[0], &x[1]);
                for v in variants(&x[1]) {
                    let rv = c.f(&x[0], &v);
                    if !c.eqv(&r, &rv) {
                        return Outcome::Fails(vec![("K*a", r), ("b", v), ("K*b", rv)]);
                    }
                }
                Outcome::Holds
            },
        },
        Law {
            id: "AGM-R7",
            relation: "(K*a) & b |= K*(a & b)",
            inputs: KAB,
            check: |c, x| {
                let ra = c.f(&x[0], &x[1]);
                let rab = c.f(&x[0], &and(&x[1], &x[2]));
                require(c.ent(&and(&ra, &x[2]), &rab), vec![("K*a", ra), ("K*(a&b)", rab)])
            },
        },
        Law {
            id: "AGM-R8",
            relation: "if (K*a) & b is consistent then K*(a & b) |= (K*a) & b",
            inputs: KAB,
            check: |c, x| {
                let ra = c.f(&x[0], &x[1]);
                let rab_in = and(&ra, &x[2]);
                if !c.sat(&rab_in) {
                    return Outcome::Holds;
                }
                let rab = c.f(&x[0], &and(&x[1], &x[2]));
                require(c.ent(&rab, &rab_in), vec![("K*a", ra), ("K*(a&b)", rab)])
            },
        },
    ]
}

fn contraction_laws() -> Vec<Law> {
    vec![
        Law {
            id: "AGM-C1",
            relation: "K-a mentions only atoms of K and a",
            inputs: KA,
            check: |c, x| {
                let r = c.f(&x[0], &x[1]);
                require(vocab_within(&r, &[&x[0], &x[1]]), vec![("K-a", r)])
            },
        },
        Law {
            id: "AGM-C2",
            relation: "K |= K-a",
            inputs: KA,
            check: |c, x| {
                let r = c.f(&x[0], &x[1]);
                require(c.ent(&x[0], &r), vec![("K-a", r)])
            },
        },
        Law {
            id: "AGM-C3",
            relation: "if K does not entail a then K-a |= K",
            inputs: KA,
            check: |c, x| {
                if c.ent(&x[0], &x[1]) {
                    return Outcome::Holds;
                }
                let r = c.f(&x[0], &x[1]);
                require(c.ent(&r, &x[0]), vec![("K-a", r)])
            },
        },
        Law {
            id: "AGM-C4",
            relation: "if a is not valid then K-a does not entail a",
            inputs: KA,
            check: |c, x| {
                if !c.sat(&not(&x[1])) {
                    return Outcome::Holds;
                }
                let r = c.f(&x[0], &x[1]);
                require(!c.ent(&r, &x[1]), vec![("K-a", r)])
            },
        },
        Law {
            id: "AGM-C4w",
            relation: "if K is consistent and a is not valid then K-a does not entail a",
            inputs: KA,
            check: |c, x| {
                if !c.sat(&x[0]) || !c.sat(&not(&x[1])) {
                    return Outcome::Holds;
                }
                let r = c.f(&x[0], &x[1]);
                require(!c.ent(&r, &x[1]), vec![("K-a", r)])
            },
        },
        Law {
            id: "AGM-C5",
            relation: "(K-a) & a |= K",
            inputs: KA,
            check: |c, x| {
                let r = c.f(&x[0], &x[1]);
                require(c.ent(&and(&r, &x[1]), &x[0]), vec![("K-a", r)])
            },
        },
        Law {
            id: "AGM-C6",
            relation: "a == b implies K-a == K-b (tested on syntactic variants of a)",
            inputs: KA,
            check: |c, x| {
                let r = c.f(&x[0], &x[1]);
                for v in variants(&x[1]) {
                    let rv = c.f(&x[0], &v);
                    if !c.eqv(&r, &rv) {
                        return Outcome::Fails(vec![("K-a", r), ("b", v), ("K-b", rv)]);
                    }
                }
                Outcome::Holds
            },
        },
        Law {
            id: "AGM-C7",
            relation: "K-(a & b) |= (K-a) | (K-b)",
            inputs: KAB,
            check: |c, x| {
                let ca = c.f(&x[0], &x[1]);
                let cb = c.f(&x[0], &x[2]);
                let cab = c.f(&x[0], &and(&x[1], &x[2]));
                require(
                    c.ent(&cab, &or(&ca, &cb)),
                    vec![("K-a", ca), ("K-b", cb), ("K-(a&b)", cab)],
                )
            },
        },
        Law {
            id: "AGM-C8",
            relation: "if K-(a & b) does not entail a then K-a |= K-(a & b)",
            inputs: KAB,
            check: |c, x| {
                let cab = c.f(&x[0], &and(&x[1], &x[2]));
                if c.ent(&cab, &x[1]) {
                    return Outcome::Holds;
                }
                let ca = c.f(&x[0], &x[1]);
                require(c.ent(&ca, &cab), vec![("K-a", ca), ("K-(a&b)", cab)])
            },
        },
    ]
}

fn identity_laws() -> Vec<Law> {
    vec![
        Law {
            id: "Levi",
            relation: "K*a == (K-~a) & a",
            inputs: KA,
            check: |c, x| {
                let r = c.f(&x[0], &x[1]);
                let con = c.g(&x[0], &not(&x[1]));
                require(c.eqv(&r, &and(&con, &x[1])), vec![("K*a", r), ("K-~a", con)])
            },
        },
        Law {
            id: "Harper",
            relation: "K | K*~a |= K-a (strict when K-a does not entail K | K*~a)",
            inputs: KA,
            check: |c, x| {
                let con = c.g(&x[0], &x[1]);
                let r = c.f(&x[0], &not(&x[1]));
                let meet = or(&x[0], &r);
                let observed = vec![("K-a", con.clone()), ("K*~a", r)];
                if !c.ent(&meet, &con) {
                    Outcome::Fails(observed)
                } else if !c.ent(&con, &meet) {
                    Outcome::Witness(observed)
                } else {
                    Outcome::Holds
                }
            },
        },
        Law {
            id: "Iterated",
            relation: "(a*b)*a == b*a",
            inputs: &["alpha", "beta"],
            check: |c, x| {
                let ab = c.f(&x[0], &x[1]);
                let lhs = c.f(&ab, &x[0]);
                let rhs = c.f(&x[1], &x[0]);
                require(c.eqv(&lhs, &rhs), vec![("a*b", ab), ("(a*b)*a", lhs), ("b*a", rhs)])
            },
        },
    ]
}

const KMA: &[&str] = &["K", "mu", "alpha"];

fn iterate(c: &Ctx, x: &[Formula]) -> (Formula, Formula) {
    let kmu = c.f(&x[0], &x[1]);
    (c.f(&kmu, &x[2]), c.f(&x[0], &x[2]))
}

fn dp_laws() -> Vec<Law> {
    vec![
        Law {
            id: "DP-C1",
            relation: "if a |= mu then (K*mu)*a == K*a",
            inputs: KMA,
            check: |c, x| {
                if !c.ent(&x[2], &x[1]) {
                    return Outcome::Holds;
                }
                let (lhs, rhs) = iterate(c, x);
                require(c.eqv(&lhs, &rhs), vec![("(K*mu)*a", lhs), ("K*a", rhs)])
            },
        },
        Law {
            id: "DP-C2",
            relation: "if a |= ~mu then (K*mu)*a == K*a",
            inputs: KMA,
            check: |c, x| {
                if !c.ent(&x[2], &not(&x[1])) {
                    return Outcome::Holds;
                }
                let (lhs, rhs) = iterate(c, x);
                require(c.eqv(&lhs, &rhs), vec![("(K*mu)*a", lhs), ("K*a", rhs)])
            },
        },
        Law {
            id: "DP-C3",
            relation: "if K*a |= mu then (K*mu)*a |= mu",
            inputs: KMA,
            check: |c, x| {
                let (lhs, rhs) = iterate(c, x);
                if !c.ent(&rhs, &x[1]) {
                    return Outcome::Holds;
                }
                require(c.ent(&lhs, &x[1]), vec![("(K*mu)*a", lhs), ("K*a", rhs)])
            },
        },
        Law {
            id: "DP-C4",
            relation: "if K*a is consistent with mu then so is (K*mu)*a",
            inputs: KMA,
            check: |c, x| {
                let (lhs, rhs) = iterate(c, x);
                if !c.sat(&and(&rhs, &x[1])) {
                    return Outcome::Holds;
                }
                require(c.sat(&and(&lhs, &x[1])), vec![("(K*mu)*a", lhs), ("K*a", rhs)])
            },
        },
        Law {
            id: "DP-Conj",
            relation: "if mu & a is consistent then (K*mu)*a == K*(mu & a)",
            inputs: KMA,
            check: |c, x| {
                let both = and(&x[1], &x[2]);
                if !c.sat(&both) {
                    return Outcome::Holds;
                }
                let (lhs, _) = iterate(c, x);
                let rhs = c.f(&x[0], &both);
                require(c.eqv(&lhs, &rhs), vec![("(K*mu)*a", lhs), ("K*(mu&a)", rhs)])
            },
        },
    ]
}

fn update_laws() -> Vec<Law> {
    vec![
        Law {
            id: "KM-U1",
            relation: "K<>a |= a",
            inputs: KA,
            check: |c, x| {
                let u = c.f(&x[0], &x[1]);
                require(c.ent(&u, &x[1]), vec![("K<>a", u)])
            },
        },
        Law {
            id: "KM-U2",
            relation: "if K |= a then K<>a == K",
            inputs: KA,
            check: |c, x| {
                if !c.ent(&x[0], &x[1]) {
                    return Outcome::Holds;
                }
                let u = c.f(&x[0], &x[1]);
                require(c.eqv(&u, &x[0]), vec![("K<>a", u)])
            },
        },
        Law {
            id: "KM-U3",
            relation: "if K and a are consistent then so is K<>a",
            inputs: KA,
            check: |c, x| {
                if !c.sat(&x[0]) || !c.sat(&x[1]) {
                    return Outcome::Holds;
                }
                let u = c.f(&x[0], &x[1]);
                require(c.sat(&u), vec![("K<>a", u)])
            },
        },
        Law {
            id: "KM-U4",
            relation: "equivalent inputs give equivalent results (tested on syntactic variants)",
            inputs: KA,
            check: |c, x| {
                let u = c.f(&x[0], &x[1]);
                for (k2, a2) in variants(&x[0])
                    .into_iter()
                    .map(|k| (k, x[1].clone()))
                    .chain(variants(&x[1]).into_iter().map(|a| (x[0].clone(), a)))
                {
                    let u2 = c.f(&k2, &a2);
                    if !c.eqv(&u, &u2) {
                        return Outcome::Fails(vec![("K<>a", u), ("K2", k2), ("b", a2), ("K2<>b", u2)]);
                    }
                }
                Outcome::Holds
            },
        },
        Law {
            id: "KM-U5",
            relation: "(K<>a) & b |= K<>(a & b)",
            inputs: KAB,
            check: |c, x| {
                let ua = c.f(&x[0], &x[1]);
                let uab = c.f(&x[0], &and(&x[1], &x[2]));
                require(c.ent(&and(&ua, &x[2]), &uab), vec![("K<>a", ua), ("K<>(a&b)", uab)])
            },
        },
        Law {
            id: "KM-U6",
            relation: "if K<>a |= b and K<>b |= a then K<>a == K<>b",
            inputs: KAB,
            check: |c, x| {
                let ua = c.f(&x[0], &x[1]);
                let ub = c.f(&x[0], &x[2]);
                if !(c.ent(&ua, &x[2]) && c.ent(&ub, &x[1])) {
                    return Outcome::Holds;
                }
                require(c.eqv(&ua, &ub), vec![("K<>a", ua), ("K<>b", ub)])
            },
        },
        Law {
            id: "KM-U7",
            relation: "if K is complete then (K<>a) & (K<>b) |= K<>(a | b)",
            inputs: KAB,
            check: |c, x| {
                let alphabet: BTreeSet<Atom> = x.iter().flat_map(|f| f.vocab()).collect();
                let complete = c
                    .r
                    .models(std::slice::from_ref(&x[0]), &alphabet)
                    .map(|m| m.len() == 1)
                    .unwrap_or(false);
                if !complete {
                    return Outcome::Holds;
                }
                let ua = c.f(&x[0], &x[1]);
                let ub = c.f(&x[0], &x[2]);
                let uab = c.f(&x[0], &or(&x[1], &x[2]));
                require(
                    c.ent(&and(&ua, &ub), &uab),
                    vec![("K<>a", ua), ("K<>b", ub), ("K<>(a|b)", uab)],
                )
            },
        },
        Law {
            id: "KM-U8",
            relation: "(K1 | K2)<>a == (K1<>a) | (K2<>a)",
            inputs: &["K1", "K2", "alpha"],
            check: |c, x| {
                let lhs = c.f(&or(&x[0], &x[1]), &x[2]);
                let u1 = c.f(&x[0], &x[2]);
                let u2 = c.f(&x[1], &x[2]);
                require(
                    c.eqv(&lhs, &or(&u1, &u2)),
                    vec![("(K1|K2)<>a", lhs), ("K1<>a", u1), ("K2<>a", u2)],
                )
            },
        },
    ]
}

fn labeled(names: &[&str], fs: &[Formula]) -> Vec<Labeled> {
    names
        .iter()
        .zip(fs)
        .map(|(n, f)| Labeled {
            name: n.to_string(),
            formula: f.to_string(),
        })
        .collect()
}

fn observed(obs: Vec<(&'static str, Formula)>) -> Vec<Labeled> {
    obs.into_iter()
        .map(|(n, f)| Labeled {
            name: n.to_string(),
            formula: f.to_string(),
        })
        .collect()
}

fn run(laws: Vec<Law>, op: &Operator, aux: Option<&Operator>, grid: &Grid) -> Vec<LawReport> {
    let ctx = Ctx {
        op,
        aux,
        r: Reasoner::truth_table(),
    };
    let operator = match aux {
        Some(a) => format!("{} + {}", op.name(), a.name()),
        None => op.name().to_string(),
    };
    let mut cache: HashMap<usize, Vec<Vec<Formula>>> = HashMap::new();
    laws.into_iter()
        .map(|law| {
            let instances = cache
                .entry(law.inputs.len())
                .or_insert_with(|| grid.instances(law.inputs.len()));
            let mut report = LawReport {
                law: law.id.to_string(),
                relation: law.relation.to_string(),
                operator: operator.clone(),
                grid: grid.describe(),
                instances: instances.len(),
                violation_count: 0,
                violations: Vec::new(),
                witness_count: 0,
                witnesses: Vec::new(),
                verdict: Verdict::HoldsOnGrid,
            };
            for x in instances.iter() {
                match (law.check)(&ctx, x) {
                    Outcome::Holds => {}
                    Outcome::Witness(obs) => {
                        report.witness_count += 1;
                        if report.witnesses.len() < KEEP {
                            report.witnesses.push(Violation {
                                inputs: labeled(law.inputs, x),
                                relation: law.relation.to_string(),
                                observed: observed(obs),
                            });
                        }
                    }
                    Outcome::Fails(obs) => {
                        report.violation_count += 1;
                        if report.violations.len() < KEEP {
                            report.violations.push(Violation {
                                inputs: labeled(law.inputs, x),
                                relation: law.relation.to_string(),
                                observed: observed(obs),
                            });
                        }
                    }
                }
            }
            if report.violation_count > 0 {
                report.verdict = Verdict::Violated;
            }
            report
        })
        .collect()
}

/// AGM revision postulates 1–8 and the weakened consistency postulate.
pub fn check_revision_postulates(op: &Operator, grid: &Grid) -> Vec<LawReport> {
    run(revision_laws(), op, None, grid)
}

/// AGM contraction postulates 1–8, and 4 restricted to consistent bases;
/// postulate 5 is recovery.
pub fn check_contraction_postulates(op: &Operator, grid: &Grid) -> Vec<LawReport> {
    run(contraction_laws(), op, None, grid)
}

/// Levi and partial Harper identities, and the iterated identity.
pub fn check_identities(revision: &Operator, contraction: &Operator, grid: &Grid) -> Vec<LawReport> {
    run(identity_laws(), revision, Some(contraction), grid)
}

/// Darwiche–Pearl C1–C4 and Conj, with belief bases as epistemic states.
pub fn check_dp(revision: &Operator, grid: &Grid) -> Vec<LawReport> {
    run(dp_laws(), revision, None, grid)
}

/// Katsuno–Mendelzon update postulates U1–U8.
pub fn check_update_postulates(op: &Operator, grid: &Grid) -> Vec<LawReport> {
    run(update_laws(), op, None, grid)
}

/// Re-evaluates a recorded violation. `Ok(true)` means it still fails.
pub fn replay(
    law: &str,
    violation: &Violation,
    op: &Operator,
    aux: Option<&Operator>,
) -> Result<bool> {
    let found = revision_laws()
        .into_iter()
        .chain(contraction_laws())
        .chain(identity_laws())
        .chain(dp_laws())
        .chain(update_laws())
        .find(|l| l.id == law)
        .ok_or_else(|| Error::Precondition(format!("unknown law `{law}`")))?;
    let inputs = violation
        .inputs
        .iter()
        .map(|l| parse(&l.formula).map_err(Error::from))
        .collect::<Result<Vec<_>>>()?;
    if inputs.len() != found.inputs.len() {
        return Err(Error::Precondition(format!(
            "law `{law}` takes {} inputs, got {}",
            found.inputs.len(),
            inputs.len()
        )));
    }
    let ctx = Ctx {
        op,
        aux,
        r: Reasoner::truth_table(),
    };
    Ok(matches!((found.check)(&ctx, &inputs), Outcome::Fails(_)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::equivalent;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn semantic_classes_are_distinct() {
        let cs = semantic_classes(2);
        assert_eq!(cs.len(), 16);
        for (i, a) in cs.iter().enumerate() {
            for b in &cs[i + 1..] {
                assert!(!equivalent(a, b));
            }
        }
        assert_eq!(cs[0], Formula::False);
        assert_eq!(cs[15], Formula::True);
    }

    #[test]
    fn random_grid_is_deterministic() {
        let g = Grid::random(3, 20, 7);
        assert_eq!(g.instances(2), g.instances(2));
        assert_ne!(g.instances(2), Grid::random(3, 20, 8).instances(2));
    }

    #[test]
    fn original_consistency_postulate_fails_on_bottom() {
        let op = Operator::revision(ChangeOptions::skeptical());
        let reports = check_revision_postulates(&op, &Grid::exhaustive(1));
        let r5 = reports.iter().find(|r| r.law == "AGM-R5").unwrap();
        assert_eq!(r5.verdict, Verdict::Violated);
        assert!(r5.violations.iter().all(|v| v.inputs[0].formula == "false"));
        let r5w = reports.iter().find(|r| r.law == "AGM-R5w").unwrap();
        assert!(r5w.holds());
    }

    #[test]
    fn violations_replay() {
        let op = Operator::revision(ChangeOptions::skeptical());
        let reports = check_revision_postulates(&op, &Grid::exhaustive(1));
        for r in &reports {
            for v in &r.violations {
                assert!(replay(&r.law, v, &op, None).unwrap());
            }
        }
    }

    #[test]
    fn dp_witnesses_from_explicit_grid() {
        let op = Operator::revision(ChangeOptions::skeptical());
        let grid = Grid::Explicit(vec![vec![f("~p"), f("p | q"), f("p")]]);
        let reports = check_dp(&op, &grid);
        let c1 = reports.iter().find(|r| r.law == "DP-C1").unwrap();
        assert_eq!(c1.verdict, Verdict::Violated);
    }

    #[test]
    fn memo_reuses_results() {
        let op = Operator::new("count", |k, a| Formula::and(k.clone(), a.clone()));
        let a = op.apply(&f("p"), &f("q"));
        let b = op.apply(&f("p"), &f("q"));
        assert_eq!(a, b);
        assert_eq!(op.memo.lock().unwrap().len(), 1);
    }
}
