//! Certified facts and the induction rules that lift them to all `n`.
//!
//! Goals are proved by backward chaining. Each goal shape matches at most
//! one of `P1`..`P4` in its domain, so there is no search; a goal that is
//! neither a fact nor the conclusion of an applicable rule is reported as
//! missing.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{classify, known_exception, s_i, t, AbundanceClass, Statement};
use crate::monomials::dim_sd;
use crate::verifier::{replay, Certificate};

/// Whitelisted axiom sources.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AxiomTag {
    /// Prior computation covering every `T(n, 3; s)` with `n <= 9`.
    SmallN,
    /// Injected by hand, e.g. in tests of the rule engine.
    Assumed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Certificate { file: Option<String>, seed: u64, prime: u32, rank: usize },
    Axiom(AxiomTag),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Certificate { file, seed, prime, rank } => {
                write!(f, "certificate (seed {seed}, F_{prime}, rank {rank}")?;
                if let Some(file) = file {
                    write!(f, ", {file}")?;
                }
                f.write_str(")")
            }
            Provenance::Axiom(AxiomTag::SmallN) => f.write_str("axiom: n <= 9"),
            Provenance::Axiom(AxiomTag::Assumed) => f.write_str("axiom: assumed"),
        }
    }
}

/// A set of statements known to be true.
#[derive(Clone, Debug, Default)]
pub struct FactBase {
    facts: BTreeMap<Statement, Provenance>,
    small_n_axiom: bool,
}

impl FactBase {
    pub fn new() -> Self {
        Self::default()
    }

    /// Turns on the blanket axiom for cubic secant statements with `n <= 9`.
    pub fn with_small_n_axiom(mut self, on: bool) -> Self {
        self.small_n_axiom = on;
        self
    }

    pub fn small_n_axiom(&self) -> bool {
        self.small_n_axiom
    }

    /// Replays the certificate and records its statement if proven.
    pub fn add_certificate(&mut self, cert: &Certificate, file: Option<String>) -> Result<Statement> {
        let st = cert.statement()?;
        match replay(cert) {
            Ok(v) if v.is_proven() => {
                self.facts.insert(
                    st,
                    Provenance::Certificate {
                        file,
                        seed: cert.seed,
                        prime: cert.prime,
                        rank: cert.rank,
                    },
                );
                Ok(st)
            }
            Ok(_) => Err(Error::FactRejected {
                statement: st,
                reason: "verdict is unknown".into(),
            }),
            Err(e) => Err(Error::FactRejected {
                statement: st,
                reason: e.to_string(),
            }),
        }
    }

    pub fn add_axiom(&mut self, st: Statement, tag: AxiomTag) -> Result<()> {
        if tag == AxiomTag::SmallN && !small_n_covers(&st) {
            return Err(Error::FactRejected {
                statement: st,
                reason: "outside the n <= 9 axiom".into(),
            });
        }
        self.facts.insert(st, Provenance::Axiom(tag));
        Ok(())
    }

    /// Loads every `*.json` certificate in `dir`. Rejected files are
    /// returned alongside the base instead of aborting the load.
    pub fn load_dir(&mut self, dir: &Path) -> Result<Vec<(String, Error)>> {
        let mut rejected = Vec::new();
        let entries = std::fs::read_dir(dir).map_err(|e| Error::InvalidArgument(format!("{}: {e}", dir.display())))?;
        let mut paths: Vec<_> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        for path in paths {
            let name = path.display().to_string();
            let outcome = std::fs::read_to_string(&path)
                .map_err(|e| Error::MalformedCertificate(e.to_string()))
                .and_then(|text| Certificate::from_json(&text))
                .and_then(|cert| self.add_certificate(&cert, Some(name.clone())));
            if let Err(e) = outcome {
                rejected.push((name, e));
            }
        }
        Ok(rejected)
    }

    pub fn lookup(&self, st: &Statement) -> Option<Provenance> {
        if let Some(p) = self.facts.get(st) {
            return Some(p.clone());
        }
        (self.small_n_axiom && small_n_covers(st)).then_some(Provenance::Axiom(AxiomTag::SmallN))
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn statements(&self) -> impl Iterator<Item = &Statement> {
        self.facts.keys()
    }
}

fn small_n_covers(st: &Statement) -> bool {
    st.n() <= 9 && st.d() == 3 && st.is_unconstrained()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    /// True and subabundant at `s + 1` gives true at `s`.
    MonoMinus,
    /// True and superabundant at `s - 1` gives true at `s`.
    MonoPlus,
    P1,
    P2,
    P3,
    P4,
}

impl Rule {
    pub const INDUCTION: [Rule; 4] = [Rule::P1, Rule::P2, Rule::P3, Rule::P4];

    /// Smallest `n` at which the rule applies.
    pub fn min_n(self) -> usize {
        match self {
            Rule::MonoMinus | Rule::MonoPlus => 1,
            Rule::P1 => 32,
            Rule::P2 => 56,
            Rule::P3 => 80,
            Rule::P4 => 72,
        }
    }

    /// Premises that yield `goal` under this rule, or `None` when `goal`
    /// does not have the rule's conclusion shape inside its domain.
    pub fn premises(self, goal: &Statement) -> Option<Vec<Statement>> {
        let n = goal.n();
        if n < self.min_n() {
            return None;
        }
        let cubic = |n, s, a| Statement::cubic(n, s, a).ok();
        match self {
            Rule::MonoMinus | Rule::MonoPlus => {
                let s = if self == Rule::MonoMinus { goal.s() + 1 } else { goal.s().checked_sub(1)? };
                let prem = Statement::new(n, goal.d(), s, goal.a(), goal.b()).ok()?;
                let side = if self == Rule::MonoMinus {
                    AbundanceClass::Subabundant
                } else {
                    AbundanceClass::Superabundant
                };
                let class = classify(&prem);
                let ok = class == side || class == AbundanceClass::Equiabundant;
                (goal.is_unconstrained() && ok).then(|| vec![prem])
            }
            _ if goal.d() != 3 || goal.b() != 24 => None,
            Rule::P1 => {
                let i = index_of_s(n, goal.s())?;
                if !goal.is_unconstrained() {
                    return None;
                }
                Some(vec![
                    cubic(n, t(n).ok()?, [s_i(i, n - 24).ok()?, 0, 0])?,
                    cubic(n - 24, s_i(i, n - 24).ok()?, [0; 3])?,
                ])
            }
            Rule::P2 => {
                let [a1, a2, a3] = goal.a();
                let i = index_of_s(n - 24, a1)?;
                if goal.s() != t(n).ok()? || a2 != 0 || a3 != 0 {
                    return None;
                }
                let tp = t(n - 24).ok()?;
                Some(vec![
                    cubic(n, 96, [tp, tp, 0])?,
                    cubic(n - 24, tp, [s_i(i, n - 48).ok()?, 0, 0])?,
                ])
            }
            Rule::P3 => {
                let tp = t(n - 24).ok()?;
                if goal.s() != 96 || goal.a() != [tp, tp, 0] {
                    return None;
                }
                let tpp = t(n - 48).ok()?;
                Some(vec![cubic(n, 0, [96, 96, 96])?, cubic(n - 24, 96, [tpp, tpp, 0])?])
            }
            Rule::P4 => {
                if goal.s() != 0 || goal.a() != [96, 96, 96] {
                    return None;
                }
                Some(vec![cubic(71, 0, [96, 96, 96])?])
            }
        }
    }
}

/// Which `i` has `s_i(n) = s`, if any.
fn index_of_s(n: usize, s: usize) -> Option<u8> {
    [1u8, 2].into_iter().find(|&i| s_i(i, n).ok() == Some(s))
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::MonoMinus => "Mono-",
            Rule::MonoPlus => "Mono+",
            Rule::P1 => "P1",
            Rule::P2 => "P2",
            Rule::P3 => "P3",
            Rule::P4 => "P4",
        })
    }
}

/// A proof tree whose leaves are facts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Derivation {
    Fact { statement: Statement, provenance: Provenance },
    Rule { rule: Rule, conclusion: Statement, premises: Vec<Derivation> },
}

impl Derivation {
    pub fn conclusion(&self) -> &Statement {
        match self {
            Derivation::Fact { statement, .. } => statement,
            Derivation::Rule { conclusion, .. } => conclusion,
        }
    }

    /// Checks every leaf against `facts` and every rule instance against
    /// its premises and domain.
    pub fn validate(&self, facts: &FactBase) -> Result<()> {
        match self {
            Derivation::Fact { statement, provenance } => match facts.lookup(statement) {
                Some(p) if &p == provenance => Ok(()),
                _ => Err(Error::InvalidArgument(format!("{statement} is not a recorded fact"))),
            },
            Derivation::Rule { rule, conclusion, premises } => {
                let want = rule
                    .premises(conclusion)
                    .ok_or_else(|| Error::InvalidArgument(format!("{rule} does not conclude {conclusion}")))?;
                let got: Vec<Statement> = premises.iter().map(|d| *d.conclusion()).collect();
                if want != got {
                    return Err(Error::InvalidArgument(format!("premises of {rule} at {conclusion} do not match")));
                }
                premises.iter().try_for_each(|d| d.validate(facts))
            }
        }
    }

    /// Leaves in depth-first order.
    pub fn leaves(&self) -> Vec<&Statement> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a Statement>) {
        match self {
            Derivation::Fact { statement, .. } => out.push(statement),
            Derivation::Rule { premises, .. } => premises.iter().for_each(|d| d.collect_leaves(out)),
        }
    }

    /// Rule nodes in depth-first order as `(rule, n)`.
    pub fn rule_trace(&self) -> Vec<(Rule, usize)> {
        let mut out = Vec::new();
        self.collect_rules(&mut out);
        out
    }

    fn collect_rules(&self, out: &mut Vec<(Rule, usize)>) {
        if let Derivation::Rule { rule, conclusion, premises } = self {
            out.push((*rule, conclusion.n()));
            premises.iter().for_each(|d| d.collect_rules(out));
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("derivation serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write_text(&mut out, 0);
        out
    }

    fn write_text(&self, out: &mut String, depth: usize) {
        let pad = "  ".repeat(depth);
        match self {
            Derivation::Fact { statement, provenance } => {
                let _ = writeln!(out, "{pad}{statement}  [{provenance}]");
            }
            Derivation::Rule { rule, conclusion, premises } => {
                let _ = writeln!(out, "{pad}{conclusion}  by {rule}");
                premises.iter().for_each(|d| d.write_text(out, depth + 1));
            }
        }
    }
}

/// Why a goal could not be derived.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConcludeError {
    /// Statements that would complete the derivation if added as facts.
    Missing(BTreeSet<Statement>),
    Domain(Error),
}

impl fmt::Display for ConcludeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConcludeError::Missing(m) => {
                writeln!(f, "missing {} fact(s):", m.len())?;
                for st in m {
                    writeln!(f, "  {st}")?;
                }
                Ok(())
            }
            ConcludeError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for ConcludeError {}

struct Prover<'a> {
    facts: &'a FactBase,
    memo: HashMap<Statement, std::result::Result<Derivation, BTreeSet<Statement>>>,
}

impl Prover<'_> {
    fn prove(&mut self, goal: Statement) -> std::result::Result<Derivation, BTreeSet<Statement>> {
        if let Some(hit) = self.memo.get(&goal) {
            return hit.clone();
        }
        let out = if let Some(provenance) = self.facts.lookup(&goal) {
            Ok(Derivation::Fact {
                statement: goal,
                provenance,
            })
        } else if let Some((rule, prem)) = Rule::INDUCTION.iter().find_map(|r| r.premises(&goal).map(|p| (*r, p))) {
            let mut children = Vec::new();
            let mut missing = BTreeSet::new();
            for p in prem {
                match self.prove(p) {
                    Ok(d) => children.push(d),
                    Err(m) => missing.extend(m),
                }
            }
            if missing.is_empty() {
                Ok(Derivation::Rule {
                    rule,
                    conclusion: goal,
                    premises: children,
                })
            } else {
                Err(missing)
            }
        } else {
            Err(BTreeSet::from([goal]))
        };
        self.memo.insert(goal, out.clone());
        out
    }
}

/// Derives an arbitrary goal from `facts` by backward chaining.
pub fn derive(facts: &FactBase, goal: Statement) -> std::result::Result<Derivation, ConcludeError> {
    Prover {
        facts,
        memo: HashMap::new(),
    }
    .prove(goal)
    .map_err(ConcludeError::Missing)
}

/// Derives `T(n, s_i(n); 0, 0, 0)`.
pub fn conclude(facts: &FactBase, n: usize, i: u8) -> std::result::Result<Derivation, ConcludeError> {
    let s = s_i(i, n).map_err(ConcludeError::Domain)?;
    let goal = Statement::cubic(n, s, [0; 3]).map_err(ConcludeError::Domain)?;
    derive(facts, goal)
}

/// Outcome for one side of the abundance threshold.
#[derive(Clone, Debug)]
pub struct SideReport {
    pub s: usize,
    pub class: AbundanceClass,
    pub result: std::result::Result<Derivation, ConcludeError>,
}

/// Whether `sigma_s(T_n)` is nondefective for every `s`.
#[derive(Clone, Debug)]
pub struct TheoremReport {
    pub n: usize,
    pub lower: SideReport,
    pub upper: SideReport,
    /// Defective values of `s` between the two sides.
    pub exceptions: Vec<usize>,
}

impl TheoremReport {
    /// True when both sides are derived; the monotonicity rules then cover
    /// every `s` outside the exception list.
    pub fn complete(&self) -> bool {
        self.lower.result.is_ok() && self.upper.result.is_ok()
    }
}

impl fmt::Display for TheoremReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n = {}: N(n) = {}, 2n+1 = {}", self.n, dim_sd(self.n, 3), 2 * self.n + 1)?;
        for (label, side) in [("lower", &self.lower), ("upper", &self.upper)] {
            match &side.result {
                Ok(d) => {
                    writeln!(f, "{label} side s = {} ({}): derived", side.s, side.class)?;
                    for line in d.to_text().lines() {
                        writeln!(f, "  {line}")?;
                    }
                }
                Err(e) => {
                    writeln!(f, "{label} side s = {} ({}): not derived", side.s, side.class)?;
                    for line in e.to_string().lines() {
                        writeln!(f, "  {line}")?;
                    }
                }
            }
        }
        for s in &self.exceptions {
            writeln!(f, "exception: s = {s} is known defective")?;
        }
        if self.complete() {
            if self.exceptions.is_empty() {
                writeln!(
                    f,
                    "sigma_s(T_{}) is nondefective for all s (Mono- below s = {}, Mono+ above s = {})",
                    self.n, self.lower.s, self.upper.s
                )?;
            } else {
                writeln!(
                    f,
                    "sigma_s(T_{}) is nondefective for all s except the listed exceptions (Mono- below s = {}, Mono+ above s = {})",
                    self.n, self.lower.s, self.upper.s
                )?;
            }
        } else {
            writeln!(f, "nondefectivity of sigma_s(T_{}) is not established", self.n)?;
        }
        Ok(())
    }
}

/// Checks both sides of the threshold `N(n) / (2n + 1)` for cubics.
///
/// For `n >= 8` the sides are `s_1(n)` and `s_2(n)` through [`conclude`].
/// Smaller `n` need direct facts at the nearest non-exceptional `s` on
/// each side.
pub fn theorem_report(facts: &FactBase, n: usize) -> Result<TheoremReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let side = |s: usize, result| {
        let st = Statement::cubic(n, s, [0; 3]).expect("positive s");
        SideReport {
            s,
            class: classify(&st),
            result,
        }
    };
    if n >= 8 {
        let (lo, hi) = (s_i(1, n)?, s_i(2, n)?);
        return Ok(TheoremReport {
            n,
            lower: side(lo, conclude(facts, n, 1)),
            upper: side(hi, conclude(facts, n, 2)),
            exceptions: Vec::new(),
        });
    }
    let big_n = dim_sd(n, 3);
    let q = 2 * n + 1;
    let mut lo = big_n / q;
    let mut hi = big_n.div_ceil(q);
    let mut exceptions = BTreeSet::new();
    while lo > 0 && known_exception(n, 3, lo) {
        exceptions.insert(lo);
        lo -= 1;
    }
    while known_exception(n, 3, hi) {
        exceptions.insert(hi);
        hi += 1;
    }
    let direct = |s: usize| derive(facts, Statement::cubic(n, s, [0; 3]).expect("positive s"));
    let lo = lo.max(1);
    let lower = side(lo, direct(lo));
    Ok(TheoremReport {
        n,
        lower,
        upper: side(hi, direct(hi)),
        exceptions: exceptions.into_iter().collect(),
    })
}
