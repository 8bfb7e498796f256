//! Orders of automaton group elements.
//!
//! Three class certificates prove infinite order without search:
//!
//! * reset automata whose map `q -> rho_q^{-1}(q)` is not a permutation,
//! * polynomial-activity automata whose normal form has a self-loop
//!   `t --i|j--> t` with `i != j`,
//! * invertible reversible automata with no bireversible connected
//!   component (every positive word has infinite order).
//!
//! Otherwise the orbit signalizer is built breadth first. When it closes,
//! the order is infinite iff some cycle carries a label above 1, and finite
//! otherwise, equal to the lcm over paths of the product of labels.

use std::collections::{HashMap, VecDeque};

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::automaton::{decode_block, MealyAutomaton, DEFAULT_SIZE_CAP};
use crate::classify::{activity_class, is_bireversible, is_reset, normal_form, unfold_reset};
use crate::element::{elements_equal, Element, IdentityVerdict, DEFAULT_IDENTITY_BUDGET};
use crate::error::{Error, Result};
use crate::graph::strongly_connected_components;

/// Search limits for order computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderBudget {
    /// Distinct vertices of an orbit signalizer.
    pub signalizer_vertices: usize,
    /// Distinct sections per identity test.
    pub identity_sections: usize,
    /// Distinct sections per vertex-equality test inside the signalizer.
    pub equality_sections: usize,
    /// Largest power tried by the brute-force fallback.
    pub power_cap: usize,
    /// Longest letter word accepted by [`orbit`].
    pub word_length_cap: usize,
    /// Longest (reduced) section word kept as a signalizer vertex.
    pub max_section_length: usize,
    /// Size cap handed to the normal form construction.
    pub size_cap: usize,
}

impl Default for OrderBudget {
    fn default() -> Self {
        Self {
            signalizer_vertices: 10_000,
            identity_sections: DEFAULT_IDENTITY_BUDGET,
            equality_sections: 10_000,
            power_cap: 64,
            word_length_cap: 12,
            max_section_length: 4096,
            size_cap: DEFAULT_SIZE_CAP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum OrderVerdict {
    Infinite,
    Finite { order: u64 },
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    ResetPi,
    BoundedSelfloop,
    ReversibleNonbireversible,
    OrbitSignalizer,
    BruteForce,
}

/// Rule-specific evidence. Indices refer to state and letter positions of
/// the automaton the certificate was issued for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    None,
    /// `pi[q] = rho_q^{-1}(q)` on the unfolded automaton; `x0` lies off
    /// every cycle of `pi` and `pi(x0) = cycle[0]`. The words
    /// `x0 (cycle)^alpha` are moved by every power `q^s`, `0 < s <= |cycle| alpha`.
    ResetPi {
        pi: Vec<usize>,
        x0: usize,
        cycle: Vec<usize>,
        /// Input state behind each unfolded state.
        origin: Vec<usize>,
    },
    /// In the normal form (blocks of `block_length` letters) state `state`
    /// loops on `block` and rewrites it to `image`.
    SelfLoop {
        state: usize,
        block: Vec<usize>,
        image: Vec<usize>,
        block_length: usize,
    },
    /// Connected components of the automaton, none bireversible on its own.
    Components {
        components: Vec<Vec<usize>>,
        reading: String,
    },
    Signalizer {
        vertices: usize,
        edges: usize,
        /// An edge on a cycle with label > 1, for infinite verdicts.
        cycle_edge: Option<SignalizerEdge>,
        /// Whether `t^m = 1` and `t^{m/p} != 1` were confirmed, for finite
        /// verdicts.
        identity_checked: Option<bool>,
    },
    BruteForce {
        power: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderCertificate {
    #[serde(flatten)]
    pub verdict: OrderVerdict,
    pub rule: Option<Rule>,
    pub witness: Witness,
}

impl OrderCertificate {
    pub fn inconclusive() -> Self {
        Self {
            verdict: OrderVerdict::Inconclusive,
            rule: None,
            witness: Witness::None,
        }
    }

    fn infinite(rule: Rule, witness: Witness) -> Self {
        Self {
            verdict: OrderVerdict::Infinite,
            rule: Some(rule),
            witness,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.verdict == OrderVerdict::Infinite
    }

    pub fn is_inconclusive(&self) -> bool {
        self.verdict == OrderVerdict::Inconclusive
    }
}

/// Size of the orbit of `x` under `t`: least `alpha > 0` with `t^alpha(x) = x`.
pub fn orbit(a: &MealyAutomaton, t: &Element, x: &[usize], budget: &OrderBudget) -> Result<u64> {
    if !a.is_invertible() {
        return Err(Error::Capability("orbits need an invertible automaton".into()));
    }
    if x.len() > budget.word_length_cap {
        return Err(Error::Size {
            what: "orbit word",
            size: x.len() as u128,
            cap: budget.word_length_cap as u128,
        });
    }
    let start = t.act(a, x)?;
    let mut current = start.clone();
    let mut count = 1u64;
    while current != x {
        current = t.act_unchecked(a, &current);
        count += 1;
    }
    Ok(count)
}

fn cycle_length(perm: &[usize], y: usize) -> usize {
    let mut len = 1;
    let mut z = perm[y];
    while z != y {
        z = perm[z];
        len += 1;
    }
    len
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignalizerEdge {
    pub from: usize,
    pub letter: usize,
    pub label: u64,
    pub to: usize,
}

/// Graph whose vertices are the sections `t^{Orb_t(x)}|_x` and whose edge
/// `x -> xy` is labelled by the orbit of `y` under the source vertex.
#[derive(Debug, Clone)]
pub struct OrbitSignalizer {
    pub root: Element,
    pub vertices: Vec<Element>,
    pub edges: Vec<SignalizerEdge>,
    pub complete: bool,
}

/// Result of reading the order off a signalizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalizerOrder {
    Infinite(SignalizerEdge),
    Finite(u64),
    Unknown,
}

/// Vertices compared per new section. Missing a merge leaves a duplicate
/// vertex, which costs completeness but not soundness.
const MERGE_CANDIDATES: usize = 8;

/// Undecided merge tests tolerated before the exploration is abandoned as
/// incomplete.
const UNDECIDED_MERGES: usize = 16;

pub fn orbit_signalizer(a: &MealyAutomaton, t: &Element, budget: &OrderBudget) -> Result<OrbitSignalizer> {
    t.validate(a)?;
    if !a.is_invertible() {
        return Err(Error::Capability(
            "orbit signalizers need an invertible automaton".into(),
        ));
    }
    let k = a.num_letters();
    let fingerprint_depth = {
        let mut d = 1;
        while d < 6 && k.pow(d as u32 + 1) <= 64 {
            d += 1;
        }
        d
    };
    // all words of a short depth, then a few fixed longer words
    let mut rng = ChaCha8Rng::seed_from_u64(0x0b17_5167);
    let probes: Vec<Vec<usize>> = (0..k.pow(fingerprint_depth as u32))
        .map(|i| decode_block(i, k, fingerprint_depth))
        .chain((0..4).map(|_| (0..32).map(|_| rng.random_range(0..k)).collect()))
        .collect();
    let fingerprint = |g: &Element| -> Vec<usize> { probes.iter().flat_map(|w| g.act_unchecked(a, w)).collect() };

    let root = t.reduced(a);
    let mut vertices = vec![root.clone()];
    let mut exact: HashMap<Element, usize> = HashMap::from([(root.clone(), 0)]);
    let mut buckets: HashMap<Vec<usize>, Vec<usize>> = HashMap::from([(fingerprint(&root), vec![0])]);
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    let mut complete = true;
    let mut undecided = 0;

    'explore: while let Some(v) = queue.pop_front() {
        let g = vertices[v].clone();
        let perm: Vec<usize> = (0..k).map(|y| g.root_image(a, y)).collect();
        for y in 0..k {
            let m = cycle_length(&perm, y);
            let child = g.pow(m).step(a, y).1.reduced(a);
            if child.len() > budget.max_section_length {
                complete = false;
                break 'explore;
            }
            let to = match exact.get(&child) {
                Some(&i) => i,
                None => {
                    let fp = fingerprint(&child);
                    let mut found = None;
                    for &i in buckets.get(&fp).into_iter().flatten().take(MERGE_CANDIDATES) {
                        match elements_equal(a, &child, &vertices[i], budget.equality_sections)? {
                            IdentityVerdict::Identity => {
                                found = Some(i);
                                break;
                            }
                            IdentityVerdict::Moves(_) => {}
                            IdentityVerdict::Inconclusive => {
                                undecided += 1;
                                if undecided > UNDECIDED_MERGES {
                                    complete = false;
                                    break 'explore;
                                }
                            }
                        }
                    }
                    match found {
                        Some(i) => {
                            exact.insert(child, i);
                            i
                        }
                        None => {
                            if vertices.len() >= budget.signalizer_vertices {
                                complete = false;
                                break 'explore;
                            }
                            let i = vertices.len();
                            vertices.push(child.clone());
                            exact.insert(child, i);
                            buckets.entry(fp).or_default().push(i);
                            queue.push_back(i);
                            i
                        }
                    }
                }
            };
            edges.push(SignalizerEdge {
                from: v,
                letter: y,
                label: m as u64,
                to,
            });
        }
    }

    Ok(OrbitSignalizer {
        root,
        vertices,
        edges,
        complete,
    })
}

impl OrbitSignalizer {
    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.from].push(e.to);
        }
        adj
    }

    /// Reads the order of the root off a complete signalizer.
    pub fn order(&self) -> SignalizerOrder {
        if !self.complete {
            return SignalizerOrder::Unknown;
        }
        let sccs = strongly_connected_components(&self.adjacency());
        let comp = &sccs.component;
        if let Some(e) = self.edges.iter().find(|e| e.label > 1 && comp[e.from] == comp[e.to]) {
            return SignalizerOrder::Infinite(*e);
        }
        // labels > 1 only on edges between components; propagate the lcm of
        // path products in topological order (decreasing component index)
        let mut acc = vec![0u128; sccs.count()];
        acc[comp[0]] = 1;
        let mut by_source: Vec<Vec<&SignalizerEdge>> = vec![Vec::new(); sccs.count()];
        for e in &self.edges {
            by_source[comp[e.from]].push(e);
        }
        for c in (0..sccs.count()).rev() {
            if acc[c] == 0 {
                continue;
            }
            for e in &by_source[c] {
                let target = comp[e.to];
                if target == c {
                    continue;
                }
                let Some(product) = acc[c].checked_mul(e.label as u128) else {
                    return SignalizerOrder::Unknown;
                };
                acc[target] = if acc[target] == 0 {
                    product
                } else {
                    acc[target].lcm(&product)
                };
            }
        }
        let order = acc.iter().filter(|&&v| v > 0).fold(1u128, |l, &v| l.lcm(&v));
        u64::try_from(order)
            .map(SignalizerOrder::Finite)
            .unwrap_or(SignalizerOrder::Unknown)
    }

    /// lcm over paths of length at most `depth` of the product of labels.
    /// This is the order of the root restricted to words of that length.
    pub fn level_order(&self, depth: usize) -> u64 {
        let mut out: Vec<Vec<&SignalizerEdge>> = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            out[e.from].push(e);
        }
        let mut frontier: HashMap<usize, Vec<u64>> = HashMap::from([(0, vec![1])]);
        let mut result = 1u64;
        for _ in 0..depth {
            let mut next: HashMap<usize, Vec<u64>> = HashMap::new();
            for (v, products) in &frontier {
                for e in &out[*v] {
                    for &p in products {
                        let q = p * e.label;
                        result = result.lcm(&q);
                        let slot = next.entry(e.to).or_default();
                        if !slot.contains(&q) {
                            slot.push(q);
                        }
                    }
                }
            }
            frontier = next;
        }
        result
    }
}

/// The map `pi(q) = rho_q^{-1}(q)` of an unfolded reset automaton.
pub fn reset_pi(a: &MealyAutomaton) -> Result<Vec<usize>> {
    check_unfolded_reset(a)?;
    Ok((0..a.num_states())
        .map(|q| a.rho_inverse(q, q).expect("checked invertible"))
        .collect())
}

fn check_unfolded_reset(a: &MealyAutomaton) -> Result<()> {
    let unfolded =
        a.num_states() == a.num_letters() && (0..a.num_letters()).all(|x| a.delta_table()[x].iter().all(|&q| q == x));
    if !unfolded {
        return Err(Error::Capability("expected an unfolded reset automaton".into()));
    }
    if !a.is_invertible() {
        return Err(Error::Capability(
            "reset certificate needs an invertible automaton".into(),
        ));
    }
    Ok(())
}

/// A point off every cycle of `map` whose image lies on a cycle, with that
/// cycle listed from the image. `None` iff `map` is a permutation.
pub fn tail_into_cycle(map: &[usize]) -> Option<(usize, Vec<usize>)> {
    let n = map.len();
    let mut on_cycle = vec![false; n];
    for start in 0..n {
        // the point reached after n steps lies on a cycle
        let mut z = start;
        for _ in 0..n {
            z = map[z];
        }
        let first = z;
        loop {
            on_cycle[z] = true;
            z = map[z];
            if z == first {
                break;
            }
        }
    }
    let x0 = (0..n).find(|&x| !on_cycle[x] && on_cycle[map[x]])?;
    let x1 = map[x0];
    let mut cycle = vec![x1];
    let mut z = map[x1];
    while z != x1 {
        cycle.push(z);
        z = map[z];
    }
    Some((x0, cycle))
}

/// Infinite-order certificate for unfolded reset automata: if `pi` is not
/// a permutation, every state (indeed every positive word) has infinite order.
pub fn cert_reset(a: &MealyAutomaton) -> Result<OrderCertificate> {
    let pi = reset_pi(a)?;
    Ok(match tail_into_cycle(&pi) {
        None => OrderCertificate::inconclusive(),
        Some((x0, cycle)) => OrderCertificate::infinite(
            Rule::ResetPi,
            Witness::ResetPi {
                pi,
                x0,
                cycle,
                origin: (0..a.num_states()).collect(),
            },
        ),
    })
}

/// `x0 (x1 ... xl)^alpha`, the words moved by every power of a state.
pub fn reset_witness_word(x0: usize, cycle: &[usize], alpha: usize) -> Vec<usize> {
    let mut word = Vec::with_capacity(1 + cycle.len() * alpha);
    word.push(x0);
    for _ in 0..alpha {
        word.extend_from_slice(cycle);
    }
    word
}

/// Self-loops `t --i|j--> t` with `i != j` in the normal form, one per state
/// (the first such block).
pub fn moved_self_loops(a: &MealyAutomaton, cap: usize) -> Result<Vec<Witness>> {
    if !activity_class(a)?.is_polynomial() {
        return Err(Error::Capability(
            "self-loop certificate needs polynomial activity".into(),
        ));
    }
    let nf = normal_form(a, cap)?;
    let b = &nf.automaton;
    let block_length = nf.block_length();
    let k = a.num_letters();
    Ok((0..b.num_states())
        .filter(|&t| Some(t) != b.id_state())
        .filter_map(|t| {
            (0..b.num_letters())
                .find(|&i| b.delta(i, t) == t && b.rho(t, i) != i)
                .map(|i| Witness::SelfLoop {
                    state: t,
                    block: decode_block(i, k, block_length),
                    image: decode_block(b.rho(t, i), k, block_length),
                    block_length,
                })
        })
        .collect())
}

/// Infinite-order certificate for polynomial-activity automata. The
/// certified element is the state recorded in the witness.
pub fn cert_bounded(a: &MealyAutomaton, cap: usize) -> Result<OrderCertificate> {
    let loops = moved_self_loops(a, cap)?;
    Ok(match loops.into_iter().next() {
        Some(w) => OrderCertificate::infinite(Rule::BoundedSelfloop, w),
        None => OrderCertificate::inconclusive(),
    })
}

/// Connected components of the underlying undirected transition graph.
pub fn connected_components(a: &MealyAutomaton) -> Vec<Vec<usize>> {
    let n = a.num_states();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for q in 0..n {
        for x in 0..a.num_letters() {
            let (r1, r2) = (find(&mut parent, q), find(&mut parent, a.delta(x, q)));
            if r1 != r2 {
                parent[r1.max(r2)] = r1.min(r2);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for q in 0..n {
        let root = find(&mut parent, q);
        let i = *slot.entry(root).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[i].push(q);
    }
    groups
}

/// Torsion-freeness certificate for invertible reversible automata: when
/// no connected component is bireversible, every nonempty positive word of
/// states has infinite order.
pub fn cert_reversible(a: &MealyAutomaton) -> Result<OrderCertificate> {
    if !a.is_invertible() || !a.is_reversible() {
        return Err(Error::Capability(
            "reversible certificate needs an invertible reversible automaton".into(),
        ));
    }
    let components = connected_components(a);
    for comp in &components {
        if is_bireversible(&a.restrict(comp)?)? {
            return Ok(OrderCertificate::inconclusive());
        }
    }
    Ok(OrderCertificate::infinite(
        Rule::ReversibleNonbireversible,
        Witness::Components {
            components,
            reading: "connected components of the automaton".into(),
        },
    ))
}

/// Class-level certificates, computed once per automaton.
#[derive(Debug, Clone)]
struct ClassCertificates {
    reset: Option<OrderCertificate>,
    reversible: Option<OrderCertificate>,
    bounded: Vec<Witness>,
}

impl ClassCertificates {
    fn compute(a: &MealyAutomaton, budget: &OrderBudget) -> Self {
        let reset = (a.is_invertible() && is_reset(a))
            .then(|| unfold_reset(a).ok())
            .flatten()
            .and_then(|u| {
                let mut cert = cert_reset(&u.automaton).ok()?;
                if let Witness::ResetPi { origin, .. } = &mut cert.witness {
                    *origin = u.origin.clone();
                }
                cert.is_infinite().then_some(cert)
            });
        let reversible = (a.is_invertible() && a.is_reversible())
            .then(|| cert_reversible(a).ok())
            .flatten()
            .filter(OrderCertificate::is_infinite);
        let bounded = match a.id_state().map(|_| activity_class(a)) {
            Some(Ok(act)) if act.is_polynomial() && a.is_invertible() => {
                moved_self_loops(a, budget.size_cap).unwrap_or_default()
            }
            _ => Vec::new(),
        };
        Self {
            reset,
            reversible,
            bounded,
        }
    }

    fn for_element(&self, a: &MealyAutomaton, t: &Element) -> Option<OrderCertificate> {
        let reduced = t.reduced(a);
        if reduced.is_empty() || !reduced.is_positive() {
            return None;
        }
        if let Some(c) = &self.reset {
            return Some(c.clone());
        }
        if let Some(c) = &self.reversible {
            return Some(c.clone());
        }
        if let [g] = reduced.generators() {
            return self
                .bounded
                .iter()
                .find(|w| matches!(w, Witness::SelfLoop { state, .. } if *state == g.state))
                .map(|w| OrderCertificate::infinite(Rule::BoundedSelfloop, w.clone()));
        }
        None
    }
}

fn signalizer_certificate(a: &MealyAutomaton, t: &Element, budget: &OrderBudget) -> Result<OrderCertificate> {
    let sig = orbit_signalizer(a, t, budget)?;
    let (vertices, edges) = (sig.vertices.len(), sig.edges.len());
    Ok(match sig.order() {
        SignalizerOrder::Infinite(edge) => OrderCertificate::infinite(
            Rule::OrbitSignalizer,
            Witness::Signalizer {
                vertices,
                edges,
                cycle_edge: Some(edge),
                identity_checked: None,
            },
        ),
        SignalizerOrder::Finite(m) => {
            let checked = confirm_order(a, t, m, budget.identity_sections);
            if checked == Some(false) {
                debug_assert!(false, "signalizer order {m} contradicted by the identity test");
                return Ok(OrderCertificate::inconclusive());
            }
            OrderCertificate {
                verdict: OrderVerdict::Finite { order: m },
                rule: Some(Rule::OrbitSignalizer),
                witness: Witness::Signalizer {
                    vertices,
                    edges,
                    cycle_edge: None,
                    identity_checked: checked,
                },
            }
        }
        SignalizerOrder::Unknown => OrderCertificate::inconclusive(),
    })
}

/// `Some(true)` if `t^m = 1` and `t^{m/p} != 1` for every prime `p | m`,
/// `Some(false)` on a contradiction, `None` if a test ran out of budget.
pub fn confirm_order(a: &MealyAutomaton, t: &Element, m: u64, budget: usize) -> Option<bool> {
    let power = |e: u64| t.pow(e as usize).is_identity(a, budget);
    match power(m) {
        IdentityVerdict::Identity => {}
        IdentityVerdict::Moves(_) => return Some(false),
        IdentityVerdict::Inconclusive => return None,
    }
    let mut rest = m;
    let mut p = 2;
    let mut undecided = false;
    while rest > 1 {
        if rest.is_multiple_of(p) {
            while rest.is_multiple_of(p) {
                rest /= p;
            }
            match power(m / p) {
                IdentityVerdict::Moves(_) => {}
                IdentityVerdict::Identity => return Some(false),
                IdentityVerdict::Inconclusive => undecided = true,
            }
        }
        p += 1;
    }
    (!undecided).then_some(true)
}

fn brute_force(a: &MealyAutomaton, t: &Element, budget: &OrderBudget) -> OrderCertificate {
    for m in 1..=budget.power_cap {
        match t.pow(m).is_identity(a, budget.identity_sections) {
            IdentityVerdict::Moves(_) => continue,
            IdentityVerdict::Identity => {
                return OrderCertificate {
                    verdict: OrderVerdict::Finite { order: m as u64 },
                    rule: Some(Rule::BruteForce),
                    witness: Witness::BruteForce { power: m },
                }
            }
            IdentityVerdict::Inconclusive => break,
        }
    }
    OrderCertificate::inconclusive()
}

/// Order of `t` through its orbit signalizer; falls back to the class
/// certificates and then to brute force when the signalizer is truncated.
pub fn order_of(a: &MealyAutomaton, t: &Element, budget: &OrderBudget) -> Result<OrderCertificate> {
    t.validate(a)?;
    if !a.is_invertible() {
        return Ok(OrderCertificate::inconclusive());
    }
    let cert = signalizer_certificate(a, t, budget)?;
    if !cert.is_inconclusive() {
        return Ok(cert);
    }
    if let Some(c) = ClassCertificates::compute(a, budget).for_element(a, t) {
        return Ok(c);
    }
    Ok(brute_force(a, t, budget))
}

/// Cheapest-first: class certificates, then the signalizer, then brute force.
pub fn certify_element(a: &MealyAutomaton, t: &Element, budget: &OrderBudget) -> Result<OrderCertificate> {
    t.validate(a)?;
    if !a.is_invertible() {
        return Ok(OrderCertificate::inconclusive());
    }
    let classes = ClassCertificates::compute(a, budget);
    certify_with(a, t, budget, &classes)
}

fn certify_with(
    a: &MealyAutomaton,
    t: &Element,
    budget: &OrderBudget,
    classes: &ClassCertificates,
) -> Result<OrderCertificate> {
    if let Some(c) = classes.for_element(a, t) {
        return Ok(c);
    }
    let cert = signalizer_certificate(a, t, budget)?;
    if !cert.is_inconclusive() {
        return Ok(cert);
    }
    Ok(brute_force(a, t, budget))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateCertificate {
    pub state: String,
    pub certificate: OrderCertificate,
}

/// Certificates for every state of the automaton.
pub fn analyze(a: &MealyAutomaton, budget: &OrderBudget) -> Result<Vec<StateCertificate>> {
    if !a.is_invertible() {
        return Ok((0..a.num_states())
            .map(|q| StateCertificate {
                state: a.state_name(q).to_string(),
                certificate: OrderCertificate::inconclusive(),
            })
            .collect());
    }
    let classes = ClassCertificates::compute(a, budget);
    (0..a.num_states())
        .map(|q| {
            Ok(StateCertificate {
                state: a.state_name(q).to_string(),
                certificate: certify_with(a, &Element::generator(q), budget, &classes)?,
            })
        })
        .collect()
}
