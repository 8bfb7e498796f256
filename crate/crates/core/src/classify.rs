//! Class membership: bireversibility, reset automata, polynomial activity
//! and the self-loop normal form of polynomial-activity automata.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::automaton::MealyAutomaton;
use crate::element::{Element, IdentityVerdict};
use crate::error::{Error, Result};
use crate::graph::strongly_connected_components;

/// Default cap on `k^l` for [`activity_count`].
pub const DEFAULT_ACTIVITY_WORD_CAP: usize = 1 << 12;

/// Growth class of the activity function of the states of an automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Activity {
    NotPolynomial,
    /// Every path eventually falls into the identity (degree -1).
    Finitary,
    Polynomial(u32),
}

impl Activity {
    /// `Some(-1)` for finitary, `Some(d)` for polynomial, `None` otherwise.
    pub fn degree(self) -> Option<i32> {
        match self {
            Activity::NotPolynomial => None,
            Activity::Finitary => Some(-1),
            Activity::Polynomial(d) => Some(d as i32),
        }
    }

    pub fn is_polynomial(self) -> bool {
        self != Activity::NotPolynomial
    }
}

impl fmt::Display for Activity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Activity::NotPolynomial => f.write_str("not-polynomial"),
            Activity::Finitary => f.write_str("finitary"),
            Activity::Polynomial(d) => write!(f, "polynomial({d})"),
        }
    }
}

impl FromStr for Activity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "not-polynomial" => Ok(Activity::NotPolynomial),
            "finitary" => Ok(Activity::Finitary),
            _ => s
                .strip_prefix("polynomial(")
                .and_then(|r| r.strip_suffix(')'))
                .and_then(|d| d.parse().ok())
                .map(Activity::Polynomial)
                .ok_or_else(|| Error::parse(format!("unknown activity class {s:?}"))),
        }
    }
}

/// Outcome of every membership test. Serializes flat; `activity` is
/// written as `"polynomial(0)"`, `"finitary"`, `"not-polynomial"` or
/// `"undetermined"` (no identity state declared).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassReport {
    pub invertible: bool,
    pub reversible: bool,
    pub bireversible: bool,
    pub reset: bool,
    #[serde(with = "activity_field")]
    pub activity: Option<Activity>,
    pub connected: bool,
}

mod activity_field {
    use super::Activity;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Option<Activity>, s: S) -> Result<S::Ok, S::Error> {
        match value {
            Some(a) => s.collect_str(a),
            None => s.serialize_str("undetermined"),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Activity>, D::Error> {
        let text = String::deserialize(d)?;
        if text == "undetermined" {
            return Ok(None);
        }
        text.parse().map(Some).map_err(serde::de::Error::custom)
    }
}

/// `O_r`: the output letters on edges entering each state `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputSets {
    sets: Vec<BTreeSet<usize>>,
}

impl OutputSets {
    pub fn get(&self, r: usize) -> &BTreeSet<usize> {
        &self.sets[r]
    }

    pub fn all_full(&self, k: usize) -> bool {
        self.sets.iter().all(|s| s.len() == k)
    }
}

pub fn output_sets(a: &MealyAutomaton) -> OutputSets {
    let mut sets = vec![BTreeSet::new(); a.num_states()];
    for p in 0..a.num_states() {
        for i in 0..a.num_letters() {
            sets[a.delta(i, p)].insert(a.rho(p, i));
        }
    }
    OutputSets { sets }
}

/// Bireversibility, computed twice: through the inverse automaton and
/// through the output sets. The two must agree.
pub fn is_bireversible(a: &MealyAutomaton) -> Result<bool> {
    if !a.is_invertible() || !a.is_reversible() {
        return Ok(false);
    }
    let via_inverse = a.inverse()?.is_reversible();
    let via_outputs = output_sets(a).all_full(a.num_letters());
    if via_inverse != via_outputs {
        return Err(Error::Internal(format!(
            "bireversibility: inverse route says {via_inverse}, output-set route says {via_outputs}"
        )));
    }
    Ok(via_inverse)
}

pub fn is_reset(a: &MealyAutomaton) -> bool {
    a.delta_table().iter().all(|col| col.iter().all(|&q| q == col[0]))
}

/// An unfolded reset automaton together with the renaming: state `x` of
/// `automaton` behaves as state `origin[x]` of the input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnfoldedReset {
    pub automaton: MealyAutomaton,
    pub origin: Vec<usize>,
    /// Input states removed for lack of ingoing edges.
    pub pruned: Vec<usize>,
}

/// Prunes states without ingoing edges (repeatedly) and renames the rest so
/// that the stateset is the alphabet and `phi` is the identity.
pub fn unfold_reset(a: &MealyAutomaton) -> Result<UnfoldedReset> {
    if !is_reset(a) {
        return Err(Error::Capability("unfolding needs a reset automaton".into()));
    }
    let n = a.num_states();
    let k = a.num_letters();
    let mut alive = vec![true; n];
    loop {
        let mut has_ingoing = vec![false; n];
        for q in (0..n).filter(|&q| alive[q]) {
            for x in 0..k {
                has_ingoing[a.delta(x, q)] = true;
            }
        }
        let before = alive.iter().filter(|&&b| b).count();
        for q in 0..n {
            alive[q] &= has_ingoing[q];
        }
        if alive.iter().filter(|&&b| b).count() == before {
            break;
        }
    }
    let origin: Vec<usize> = (0..k).map(|x| a.delta(x, 0)).collect();
    let pruned = (0..n).filter(|&q| !alive[q]).collect();
    let delta = (0..k).map(|y| vec![y; k]).collect();
    let rho = origin.iter().map(|&q| a.rho_table()[q].clone()).collect();
    let automaton = MealyAutomaton::new(a.letter_names().to_vec(), a.letter_names().to_vec(), delta, rho, None)?;
    Ok(UnfoldedReset {
        automaton,
        origin,
        pruned,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComponentKind {
    /// No cycle through the component.
    Trivial,
    SimpleCycle,
    Entangled,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleComponent {
    pub states: Vec<usize>,
    pub kind: ComponentKind,
}

/// Transition digraph on the non-identity states, split into strongly
/// connected components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleStructure {
    pub components: Vec<CycleComponent>,
    /// Component index of each state; `None` for the identity state.
    pub component_of: Vec<Option<usize>>,
    /// Distinct successor components, per component.
    pub successors: Vec<BTreeSet<usize>>,
    /// Most nontrivial cycles met along a directed path, when no component
    /// is entangled.
    pub max_cycles_on_path: Option<usize>,
}

pub fn cycle_structure(a: &MealyAutomaton) -> Result<CycleStructure> {
    let id = a
        .id_state()
        .ok_or_else(|| Error::Capability("activity needs a declared identity state".into()))?;
    let n = a.num_states();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for q in (0..n).filter(|&q| q != id) {
        let targets: BTreeSet<usize> = (0..a.num_letters())
            .map(|x| a.delta(x, q))
            .filter(|&t| t != id)
            .collect();
        adj[q] = targets.into_iter().collect();
    }
    let sccs = strongly_connected_components(&adj);

    // Tarjan numbering maps the isolated identity vertex to its own
    // component; drop it and renumber.
    let mut renumber = vec![None; sccs.count()];
    let mut components = Vec::new();
    for (c, members) in sccs.members.iter().enumerate() {
        if members == &[id] {
            continue;
        }
        renumber[c] = Some(components.len());
        let inside = |v: usize| sccs.component[v] == c;
        let cyclic = members.len() > 1 || adj[members[0]].contains(&members[0]);
        let kind = if !cyclic {
            ComponentKind::Trivial
        } else if members.iter().all(|&v| {
            // parallel edges count: two letters into the component already
            // give exponentially many paths
            (0..a.num_letters()).filter(|&x| inside(a.delta(x, v))).count() == 1
        }) {
            ComponentKind::SimpleCycle
        } else {
            ComponentKind::Entangled
        };
        components.push(CycleComponent {
            states: members.clone(),
            kind,
        });
    }
    let component_of: Vec<Option<usize>> = (0..n)
        .map(|q| if q == id { None } else { renumber[sccs.component[q]] })
        .collect();
    let mut successors = vec![BTreeSet::new(); components.len()];
    for q in (0..n).filter(|&q| q != id) {
        let cq = component_of[q].expect("non-identity state has a component");
        for &t in &adj[q] {
            let ct = component_of[t].expect("non-identity state has a component");
            if ct != cq {
                successors[cq].insert(ct);
            }
        }
    }

    let max_cycles_on_path = if components.iter().any(|c| c.kind == ComponentKind::Entangled) {
        None
    } else {
        // reverse topological numbering survives the renumbering:
        // successors always have smaller indices
        let mut best = vec![0usize; components.len()];
        for c in 0..components.len() {
            let own = usize::from(components[c].kind == ComponentKind::SimpleCycle);
            let tail = successors[c].iter().map(|&s| best[s]).max().unwrap_or(0);
            best[c] = own + tail;
        }
        Some(best.into_iter().max().unwrap_or(0))
    };

    Ok(CycleStructure {
        components,
        component_of,
        successors,
        max_cycles_on_path,
    })
}

/// Activity class read off the cycle structure: entangled components mean
/// exponential activity; otherwise the degree is the most nontrivial
/// cycles on a path, minus one.
pub fn activity_class(a: &MealyAutomaton) -> Result<Activity> {
    let cs = cycle_structure(a)?;
    Ok(match cs.max_cycles_on_path {
        None => Activity::NotPolynomial,
        Some(0) => Activity::Finitary,
        Some(c) => Activity::Polynomial((c - 1) as u32),
    })
}

/// Brute-force activity: number of words of length `l` whose section at
/// state `t` is not the identity state.
pub fn activity_count(a: &MealyAutomaton, t: usize, l: usize, cap: usize) -> Result<u64> {
    let id = a
        .id_state()
        .ok_or_else(|| Error::Capability("activity needs a declared identity state".into()))?;
    if t >= a.num_states() {
        return Err(Error::Domain(format!("state index {t} out of range")));
    }
    let k = a.num_letters();
    let words = u32::try_from(l)
        .ok()
        .and_then(|e| (k as u128).checked_pow(e))
        .unwrap_or(u128::MAX);
    if words > cap as u128 {
        return Err(Error::Size {
            what: "activity enumeration",
            size: words,
            cap: cap as u128,
        });
    }
    let mut count = 0;
    let mut word = vec![0usize; l];
    for _ in 0..words {
        let end = word.iter().fold(t, |q, &x| a.delta(x, q));
        if end != id {
            count += 1;
        }
        // odometer increment
        for slot in word.iter_mut().rev() {
            *slot += 1;
            if *slot < k {
                break;
            }
            *slot = 0;
        }
    }
    Ok(count)
}

/// Normal form of a polynomial-activity automaton: letters grouped by
/// `cycle_lcm * depth`, after which every cycle is a self-loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    pub automaton: MealyAutomaton,
    /// lcm of the simple cycle lengths (1 when there are none).
    pub cycle_lcm: usize,
    /// Longest run of non-self-loop states before a self-loop state, at
    /// least 1.
    pub depth: usize,
}

impl NormalForm {
    pub fn block_length(&self) -> usize {
        self.cycle_lcm * self.depth
    }
}

pub fn normal_form(a: &MealyAutomaton, cap: usize) -> Result<NormalForm> {
    let cs = cycle_structure(a)?;
    if cs.max_cycles_on_path.is_none() {
        return Err(Error::Capability("normal form needs polynomial activity".into()));
    }
    let cycle_lcm = cs
        .components
        .iter()
        .filter(|c| c.kind == ComponentKind::SimpleCycle)
        .fold(1usize, |acc, c| acc.lcm(&c.states.len()));

    let grouped = a.wop(cycle_lcm, cap)?;
    let n = grouped.num_states();
    let kb = grouped.num_letters();
    let self_loop: Vec<bool> = (0..n).map(|q| (0..kb).any(|b| grouped.delta(b, q) == q)).collect();

    // longest path through non-self-loop states ending at a self-loop state
    let mut longest = vec![None::<usize>; n];
    let mut depth = 1;
    for q in 0..n {
        if !self_loop[q] {
            depth = depth.max(longest_to_loop(
                &grouped,
                &self_loop,
                q,
                &mut longest,
                &mut vec![false; n],
            )?);
        }
    }

    let automaton = a.wop(cycle_lcm * depth, cap)?;
    Ok(NormalForm {
        automaton,
        cycle_lcm,
        depth,
    })
}

fn longest_to_loop(
    a: &MealyAutomaton,
    self_loop: &[bool],
    q: usize,
    memo: &mut Vec<Option<usize>>,
    active: &mut Vec<bool>,
) -> Result<usize> {
    if self_loop[q] {
        return Ok(0);
    }
    if let Some(v) = memo[q] {
        return Ok(v);
    }
    if active[q] {
        return Err(Error::Internal(
            "grouped automaton has a cycle that is not a self-loop".into(),
        ));
    }
    active[q] = true;
    let mut best = 0;
    for b in 0..a.num_letters() {
        best = best.max(1 + longest_to_loop(a, self_loop, a.delta(b, q), memo, active)?);
    }
    active[q] = false;
    memo[q] = Some(best);
    Ok(best)
}

/// Strict identity detection: fails if a state other than the declared
/// identity acts trivially (or if nothing is declared and one does).
pub fn check_identity_states(a: &MealyAutomaton, budget: usize) -> Result<()> {
    for q in 0..a.num_states() {
        if Some(q) == a.id_state() {
            continue;
        }
        if Element::generator(q).is_identity(a, budget) == IdentityVerdict::Identity {
            return Err(Error::Invariant(format!(
                "state {:?} acts as the identity but is not the declared identity state",
                a.state_name(q)
            )));
        }
    }
    Ok(())
}

pub fn is_strongly_connected(a: &MealyAutomaton) -> bool {
    let adj: Vec<Vec<usize>> = (0..a.num_states())
        .map(|q| (0..a.num_letters()).map(|x| a.delta(x, q)).collect())
        .collect();
    strongly_connected_components(&adj).count() == 1
}

pub fn classify(a: &MealyAutomaton) -> Result<ClassReport> {
    let activity = match a.id_state() {
        Some(_) => Some(activity_class(a)?),
        None => None,
    };
    Ok(ClassReport {
        invertible: a.is_invertible(),
        reversible: a.is_reversible(),
        bireversible: is_bireversible(a)?,
        reset: is_reset(a),
        activity,
        connected: is_strongly_connected(a),
    })
}

/// [`classify`] preceded by [`check_identity_states`].
pub fn classify_strict(a: &MealyAutomaton, budget: usize) -> Result<ClassReport> {
    check_identity_states(a, budget)?;
    classify(a)
}
