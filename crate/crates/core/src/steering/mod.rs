//! Steering assemblages: data model, no-signalling checks and wiring.

mod lhs;
mod named;
mod realize;

pub use lhs::{lhs_check, LhsModel, LhsOutcome, SteeringInequality, MAX_STRATEGIES};
pub use named::{
    bwi_star, bwi_star_star, default_gleason_witness, gleason, instrumental_star, named_assemblage,
    pauli_measurements, pr_box_assemblage, NAMED_ASSEMBLAGES,
};
pub use realize::{assemblage_from_realization, BobStage, ControlledMeasurement};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::atomic::{atomic_state_check, unit_effect};
use crate::error::{Error, Result};
use crate::system::{AtomicSystem, SystemType};
use crate::vector::GptVector;
use crate::verdict::{MembershipVerdict, Witness};

/// Steering scenario of an assemblage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Bipartite,
    Multipartite(usize),
    BobWithInput,
    Instrumental,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scenario::Bipartite => write!(f, "bipartite"),
            Scenario::Multipartite(n) => write!(f, "multipartite({n})"),
            Scenario::BobWithInput => write!(f, "bob-with-input"),
            Scenario::Instrumental => write!(f, "instrumental"),
        }
    }
}

impl Scenario {
    /// Number of black-box parties.
    pub fn parties(&self) -> usize {
        match *self {
            Scenario::Multipartite(n) => n,
            _ => 1,
        }
    }
}

/// Position of one element: outcomes `a`, settings `x`, and Bob's input
/// `y` in the Bob-with-input scenario.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AsmIndex {
    pub a: Vec<usize>,
    pub x: Vec<usize>,
    pub y: Option<usize>,
}

impl fmt::Display for AsmIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        write!(f, "a={}|x={}", join(&self.a), join(&self.x))?;
        if let Some(y) = self.y {
            write!(f, "|y={y}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for AsmIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed assemblage key {s:?}"));
        let list = |part: &str, tag: &str| -> Result<Vec<usize>> {
            let body = part.strip_prefix(tag).ok_or_else(bad)?;
            if body.is_empty() {
                return Ok(vec![]);
            }
            body.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
        };
        let parts: Vec<&str> = s.split('|').collect();
        match parts[..] {
            [a, x] => Ok(AsmIndex { a: list(a, "a=")?, x: list(x, "x=")?, y: None }),
            [a, x, y] => {
                let y = list(y, "y=")?;
                if y.len() != 1 {
                    return Err(bad());
                }
                Ok(AsmIndex { a: list(a, "a=")?, x: list(x, "x=")?, y: Some(y[0]) })
            }
            _ => Err(bad()),
        }
    }
}

/// An indexed family of subnormalized states of Bob's quantum system.
///
/// `settings` lists the black-box parties' setting cardinalities; in the
/// Bob-with-input scenario it has one more entry, `|Y|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Assemblage {
    scenario: Scenario,
    outcomes: Vec<usize>,
    settings: Vec<usize>,
    bob_dim: usize,
    elements: Vec<GptVector>,
}

fn mixed_radix(counts: &[usize]) -> Vec<Vec<usize>> {
    counts.iter().fold(vec![vec![]], |acc, &c| {
        acc.iter()
            .flat_map(|p| {
                (0..c).map(move |i| {
                    let mut q = p.clone();
                    q.push(i);
                    q
                })
            })
            .collect()
    })
}

fn flat(digits: &[usize], counts: &[usize]) -> usize {
    digits.iter().zip(counts).fold(0, |acc, (&d, &c)| acc * c + d)
}

impl Assemblage {
    /// Builds an assemblage from its elements in [`Assemblage::indices`]
    /// order. Every element must be a positive semidefinite operator on
    /// the same quantum atom, within `tol`.
    pub fn new(
        scenario: Scenario,
        outcomes: Vec<usize>,
        settings: Vec<usize>,
        elements: Vec<GptVector>,
        tol: f64,
    ) -> Result<Self> {
        let parties = scenario.parties();
        let expected_settings = parties + usize::from(scenario == Scenario::BobWithInput);
        if outcomes.len() != parties || settings.len() != expected_settings {
            return Err(Error::InvalidArgument(format!(
                "{scenario} scenario needs {parties} outcome and {expected_settings} setting cardinalities"
            )));
        }
        if outcomes.iter().chain(&settings).any(|&c| c == 0) {
            return Err(Error::InvalidArgument("cardinalities must be positive".into()));
        }
        let count = outcomes.iter().product::<usize>() * settings.iter().product::<usize>();
        if elements.len() != count {
            return Err(Error::InvalidArgument(format!(
                "expected {count} elements, found {}",
                elements.len()
            )));
        }
        let bob_dim = match elements[0].system().atoms() {
            [AtomicSystem::Quantum(d)] => *d,
            _ => {
                return Err(Error::WrongSystem {
                    expected: "a single quantum atom".into(),
                    found: elements[0].system().to_string(),
                })
            }
        };
        let sys = SystemType::quantum(bob_dim);
        for (i, e) in elements.iter().enumerate() {
            if e.system() != &sys {
                return Err(Error::SystemMismatch {
                    expected: sys.to_string(),
                    found: e.system().to_string(),
                });
            }
            if atomic_state_check(e, tol)?.is_rejected() {
                return Err(Error::InvalidArgument(format!("element {i} is not positive semidefinite")));
            }
        }
        Ok(Assemblage {
            scenario,
            outcomes,
            settings,
            bob_dim,
            elements,
        })
    }

    /// Tabulates `f` over [`Assemblage::indices`].
    pub fn from_fn<F>(scenario: Scenario, outcomes: Vec<usize>, settings: Vec<usize>, tol: f64, f: F) -> Result<Self>
    where
        F: FnMut(&AsmIndex) -> Result<GptVector>,
    {
        let idx = Self::enumerate(scenario, &outcomes, &settings);
        let elements = idx.iter().map(f).collect::<Result<Vec<_>>>()?;
        Assemblage::new(scenario, outcomes, settings, elements, tol)
    }

    fn enumerate(scenario: Scenario, outcomes: &[usize], settings: &[usize]) -> Vec<AsmIndex> {
        let bwi = scenario == Scenario::BobWithInput;
        let xs = if bwi { &settings[..settings.len() - 1] } else { settings };
        let ys = if bwi { settings[settings.len() - 1] } else { 1 };
        let mut out = Vec::new();
        for a in mixed_radix(outcomes) {
            for x in mixed_radix(xs) {
                for y in 0..ys {
                    out.push(AsmIndex {
                        a: a.clone(),
                        x: x.clone(),
                        y: bwi.then_some(y),
                    });
                }
            }
        }
        out
    }

    /// All positions, outcome-major, then settings, then Bob's input.
    pub fn indices(&self) -> Vec<AsmIndex> {
        Self::enumerate(self.scenario, &self.outcomes, &self.settings)
    }

    fn position(&self, idx: &AsmIndex) -> Option<usize> {
        let xs = self.alice_settings();
        let ys = self.bob_settings().unwrap_or(1);
        let in_range = |v: &[usize], c: &[usize]| v.len() == c.len() && v.iter().zip(c).all(|(a, b)| a < b);
        if !in_range(&idx.a, &self.outcomes) || !in_range(&idx.x, xs) {
            return None;
        }
        let y = match (idx.y, self.bob_settings()) {
            (Some(y), Some(n)) if y < n => y,
            (None, None) => 0,
            _ => return None,
        };
        let xcount: usize = xs.iter().product();
        Some((flat(&idx.a, &self.outcomes) * xcount + flat(&idx.x, xs)) * ys + y)
    }

    pub fn get(&self, idx: &AsmIndex) -> Option<&GptVector> {
        self.position(idx).map(|p| &self.elements[p])
    }

    /// Element for outcomes `a`, settings `x`, and Bob input `y` if any.
    pub fn element(&self, a: &[usize], x: &[usize], y: Option<usize>) -> Result<&GptVector> {
        let idx = AsmIndex { a: a.to_vec(), x: x.to_vec(), y };
        self.get(&idx)
            .ok_or_else(|| Error::InvalidArgument(format!("no element at {idx}")))
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn outcomes(&self) -> &[usize] {
        &self.outcomes
    }

    pub fn settings(&self) -> &[usize] {
        &self.settings
    }

    /// Setting cardinalities of the black-box parties.
    pub fn alice_settings(&self) -> &[usize] {
        match self.scenario {
            Scenario::BobWithInput => &self.settings[..self.settings.len() - 1],
            _ => &self.settings,
        }
    }

    pub fn bob_settings(&self) -> Option<usize> {
        match self.scenario {
            Scenario::BobWithInput => self.settings.last().copied(),
            _ => None,
        }
    }

    pub fn bob_dim(&self) -> usize {
        self.bob_dim
    }

    pub fn elements(&self) -> &[GptVector] {
        &self.elements
    }

    pub fn iter(&self) -> impl Iterator<Item = (AsmIndex, &GptVector)> {
        self.indices().into_iter().zip(self.elements.iter())
    }

    /// Largest coefficient difference between matching elements.
    pub fn max_abs_diff(&self, other: &Assemblage) -> f64 {
        if self.scenario != other.scenario
            || self.outcomes != other.outcomes
            || self.settings != other.settings
            || self.bob_dim != other.bob_dim
        {
            return f64::INFINITY;
        }
        self.elements
            .iter()
            .zip(&other.elements)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }

    fn trace(&self, v: &GptVector) -> f64 {
        unit_effect(&SystemType::quantum(self.bob_dim))
            .inner(v)
            .expect("element system")
    }

    fn positivity(&self, tol: f64) -> Result<MembershipVerdict> {
        let mut margin = f64::INFINITY;
        for (idx, e) in self.iter() {
            let v = atomic_state_check(e, tol)?;
            if let MembershipVerdict::Rejected { margin, .. } = v {
                return Ok(condition(format!("element {idx} is not positive"), -margin, tol));
            }
            margin = margin.min(v.margin());
        }
        Ok(MembershipVerdict::Accepted { margin })
    }
}

fn condition(description: String, deviation: f64, tol: f64) -> MembershipVerdict {
    if deviation <= tol {
        MembershipVerdict::Accepted { margin: -deviation }
    } else {
        MembershipVerdict::Rejected {
            margin: -deviation,
            witness: Witness::Condition {
                description,
                deviation,
            },
        }
    }
}

fn sum(vs: impl IntoIterator<Item = GptVector>, d: usize) -> GptVector {
    vs.into_iter()
        .fold(GptVector::zeros(SystemType::quantum(d)), |acc, v| acc.add(&v).expect("same system"))
}

/// Runs the checks in order, stopping at the first rejection; the margin
/// is the worst seen.
fn first_failure(checks: Vec<MembershipVerdict>) -> MembershipVerdict {
    checks
        .into_iter()
        .reduce(|acc, v| if acc.is_rejected() { acc } else { acc.and(v) })
        .expect("at least one check")
}

fn require(asm: &Assemblage, ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "expected a {what} assemblage, found {}",
            asm.scenario
        )))
    }
}

/// Normalization of a marginal `ρ^B`: `tr ρ^B = 1`.
fn normalization(asm: &Assemblage, rho: &GptVector, tol: f64) -> MembershipVerdict {
    condition("Bob's reduced state is not normalized".into(), (asm.trace(rho) - 1.0).abs(), tol)
}

/// Positivity, setting-independence of `Σ_a σ_{a|x}` and normalization.
pub fn ns_check_bipartite(asm: &Assemblage, tol: f64) -> Result<MembershipVerdict> {
    require(asm, asm.scenario == Scenario::Bipartite, "bipartite")?;
    multipartite_conditions(asm, tol)
}

/// Positivity, normalization, and well-defined marginals for every subset
/// of black-box parties.
pub fn ns_check_multipartite(asm: &Assemblage, tol: f64) -> Result<MembershipVerdict> {
    require(asm, matches!(asm.scenario, Scenario::Multipartite(_)), "multipartite")?;
    multipartite_conditions(asm, tol)
}

fn multipartite_conditions(asm: &Assemblage, tol: f64) -> Result<MembershipVerdict> {
    let n = asm.outcomes.len();
    let d = asm.bob_dim;
    let mut checks = vec![asm.positivity(tol)?];
    // for each nonempty set T of parties summed out, the partial sum must
    // not depend on the settings in T
    for mask in 1usize..(1 << n) {
        let summed: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let kept: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 0).collect();
        let kept_out: Vec<usize> = kept.iter().map(|&i| asm.outcomes[i]).collect();
        let kept_set: Vec<usize> = kept.iter().map(|&i| asm.settings[i]).collect();
        let sum_out: Vec<usize> = summed.iter().map(|&i| asm.outcomes[i]).collect();
        let sum_set: Vec<usize> = summed.iter().map(|&i| asm.settings[i]).collect();
        let mut worst = 0.0f64;
        for ak in mixed_radix(&kept_out) {
            for xk in mixed_radix(&kept_set) {
                let mut reference: Option<GptVector> = None;
                for xs in mixed_radix(&sum_set) {
                    let marginal = sum(
                        mixed_radix(&sum_out).into_iter().map(|as_| {
                            let (mut a, mut x) = (vec![0; n], vec![0; n]);
                            for (k, &i) in kept.iter().enumerate() {
                                a[i] = ak[k];
                                x[i] = xk[k];
                            }
                            for (k, &i) in summed.iter().enumerate() {
                                a[i] = as_[k];
                                x[i] = xs[k];
                            }
                            asm.element(&a, &x, None).expect("in range").clone()
                        }),
                        d,
                    );
                    match &reference {
                        None => {
                            if kept.is_empty() {
                                checks.push(normalization(asm, &marginal, tol));
                            }
                            reference = Some(marginal);
                        }
                        Some(r) => worst = worst.max(r.max_abs_diff(&marginal)),
                    }
                }
            }
        }
        let names: Vec<String> = summed.iter().map(|i| (i + 1).to_string()).collect();
        checks.push(condition(
            format!("marginal over parties {{{}}} depends on their settings", names.join(",")),
            worst,
            tol,
        ));
    }
    Ok(first_failure(checks))
}

/// Positivity, `x`-independence of `Σ_a σ_{a|xy}` for each `y`,
/// `y`-independence of `tr σ_{a|xy}`, and normalization.
pub fn ns_check_bob_with_input(asm: &Assemblage, tol: f64) -> Result<MembershipVerdict> {
    require(asm, asm.scenario == Scenario::BobWithInput, "bob-with-input")?;
    let na = asm.outcomes[0];
    let nx = asm.settings[0];
    let ny = asm.settings[1];
    let d = asm.bob_dim;
    let mut checks = vec![asm.positivity(tol)?];
    let mut signalling = 0.0f64;
    let mut norm = 0.0f64;
    for y in 0..ny {
        let rho = |x: usize| sum((0..na).map(|a| asm.element(&[a], &[x], Some(y)).expect("in range").clone()), d);
        let r0 = rho(0);
        norm = norm.max((asm.trace(&r0) - 1.0).abs());
        for x in 1..nx {
            signalling = signalling.max(r0.max_abs_diff(&rho(x)));
        }
    }
    let mut input_dependence = 0.0f64;
    for a in 0..na {
        for x in 0..nx {
            let t0 = asm.trace(asm.element(&[a], &[x], Some(0))?);
            for y in 1..ny {
                input_dependence = input_dependence.max((asm.trace(asm.element(&[a], &[x], Some(y))?) - t0).abs());
            }
        }
    }
    checks.push(condition("Bob's marginal depends on Alice's setting".into(), signalling, tol));
    checks.push(condition("Alice's outcome statistics depend on Bob's input".into(), input_dependence, tol));
    checks.push(condition("Bob's reduced state is not normalized".into(), norm, tol));
    Ok(first_failure(checks))
}

/// Positivity and per-setting normalization `Σ_a tr σ_{a|x} = 1`.
pub fn ns_check_instrumental(asm: &Assemblage, tol: f64) -> Result<MembershipVerdict> {
    require(asm, asm.scenario == Scenario::Instrumental, "instrumental")?;
    let mut checks = vec![asm.positivity(tol)?];
    let mut norm = 0.0f64;
    for x in 0..asm.settings[0] {
        let total: f64 = (0..asm.outcomes[0])
            .map(|a| asm.trace(asm.element(&[a], &[x], None).expect("in range")))
            .sum();
        norm = norm.max((total - 1.0).abs());
    }
    checks.push(condition("outcome weights are not normalized".into(), norm, tol));
    Ok(first_failure(checks))
}

/// The no-signalling check matching the assemblage's scenario.
pub fn ns_check(asm: &Assemblage, tol: f64) -> Result<MembershipVerdict> {
    match asm.scenario {
        Scenario::Bipartite => ns_check_bipartite(asm, tol),
        Scenario::Multipartite(_) => ns_check_multipartite(asm, tol),
        Scenario::BobWithInput => ns_check_bob_with_input(asm, tol),
        Scenario::Instrumental => ns_check_instrumental(asm, tol),
    }
}

/// Wires Alice's outcome into Bob's input: `σ^I_{a|x} = σ_{a|x,y=a}`.
pub fn wire_instrumental(bwi: &Assemblage, tol: f64) -> Result<Assemblage> {
    let v = ns_check_bob_with_input(bwi, tol)?;
    if v.is_rejected() {
        return Err(Error::InvalidArgument(
            "only no-signalling Bob-with-input assemblages can be wired".into(),
        ));
    }
    let na = bwi.outcomes[0];
    if bwi.settings[1] != na {
        return Err(Error::InvalidArgument(format!(
            "Bob's input takes {} values but Alice has {na} outcomes",
            bwi.settings[1]
        )));
    }
    Assemblage::from_fn(Scenario::Instrumental, vec![na], vec![bwi.settings[0]], tol, |idx| {
        bwi.element(&idx.a, &idx.x, Some(idx.a[0])).cloned()
    })
}
