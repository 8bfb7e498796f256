//! Group elements as words over signed generators, their action on letter
//! words, wreath recursions and the identity/equality decision procedure.
//!
//! A word `u = q1 q2 ... qm` acts as `q1` first, then `q2`, and so on
//! (`rho_{qu} = rho_u . rho_q`). Inverse generators are run through the
//! inverse tables precomputed on the automaton.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::automaton::MealyAutomaton;
use crate::error::{Error, Result};

/// Default number of distinct sections [`Element::is_identity`] may visit.
pub const DEFAULT_IDENTITY_BUDGET: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Generator {
    pub state: usize,
    pub inverse: bool,
}

impl Generator {
    pub fn new(state: usize) -> Self {
        Self { state, inverse: false }
    }

    pub fn inv(state: usize) -> Self {
        Self { state, inverse: true }
    }

    fn flipped(self) -> Self {
        Self {
            state: self.state,
            inverse: !self.inverse,
        }
    }

    /// Reads letter `x`, returns `(output, next generator)`.
    #[inline]
    fn step(self, a: &MealyAutomaton, x: usize) -> (usize, Generator) {
        if self.inverse {
            let y = a
                .rho_inverse(self.state, x)
                .expect("inverse generators require an invertible automaton");
            (y, Generator::inv(a.delta(y, self.state)))
        } else {
            (a.rho(self.state, x), Generator::new(a.delta(x, self.state)))
        }
    }
}

/// A finite word over signed generators. The empty word is the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Element {
    word: Vec<Generator>,
}

/// Outcome of the identity (or equality) decision procedure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "witness", rename_all = "kebab-case")]
pub enum IdentityVerdict {
    Identity,
    /// A letter word moved by the element (or on which two elements
    /// differ). Shortest when found by the exhaustive search; a probe hit is
    /// trimmed to its shortest moved prefix.
    Moves(Vec<usize>),
    Inconclusive,
}

impl IdentityVerdict {
    pub fn is_identity(&self) -> bool {
        matches!(self, IdentityVerdict::Identity)
    }

    pub fn is_moves(&self) -> bool {
        matches!(self, IdentityVerdict::Moves(_))
    }
}

/// `g = (g|_0, ..., g|_{k-1}) sigma_g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WreathRecursion {
    pub sections: Vec<Element>,
    pub root_permutation: Vec<usize>,
}

impl Element {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn generator(state: usize) -> Self {
        Self {
            word: vec![Generator::new(state)],
        }
    }

    pub fn from_generators(word: Vec<Generator>) -> Self {
        Self { word }
    }

    /// Positive word `q1 q2 ... qm`.
    pub fn from_states(states: &[usize]) -> Self {
        Self {
            word: states.iter().map(|&q| Generator::new(q)).collect(),
        }
    }

    pub fn generators(&self) -> &[Generator] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn is_positive(&self) -> bool {
        self.word.iter().all(|g| !g.inverse)
    }

    /// Checks the word against the automaton it is meant to live over.
    pub fn validate(&self, a: &MealyAutomaton) -> Result<()> {
        if let Some(g) = self.word.iter().find(|g| g.state >= a.num_states()) {
            return Err(Error::Domain(format!("state index {} out of range", g.state)));
        }
        if !self.is_positive() && !a.is_invertible() {
            return Err(Error::Capability(
                "inverse generators over a non-invertible automaton".into(),
            ));
        }
        Ok(())
    }

    /// Parses a word such as `"b c d^-1"` or `"bcd^-1"`. Tokens are state
    /// names separated by whitespace, optionally suffixed by `^-1` or `'`.
    /// A token that is not a state name is split into single-character
    /// names, the suffix binding to the last one.
    pub fn parse(a: &MealyAutomaton, text: &str) -> Result<Self> {
        let mut word = Vec::new();
        for token in text.split_whitespace() {
            let (body, inverse) = if let Some(b) = token.strip_suffix("^-1") {
                (b, true)
            } else if let Some(b) = token.strip_suffix('\'') {
                (b, true)
            } else {
                (token, false)
            };
            if let Some(q) = a.state_index(body) {
                word.push(Generator { state: q, inverse });
                continue;
            }
            let chars: Vec<String> = body.chars().map(String::from).collect();
            let states: Option<Vec<usize>> = chars.iter().map(|c| a.state_index(c)).collect();
            let states = states
                .filter(|s| !s.is_empty())
                .ok_or_else(|| Error::Domain(format!("unknown generator {body:?}")))?;
            let last = states.len() - 1;
            word.extend(states.into_iter().enumerate().map(|(i, q)| Generator {
                state: q,
                inverse: inverse && i == last,
            }));
        }
        let el = Self { word };
        el.validate(a)?;
        Ok(el)
    }

    pub fn display<'a>(&'a self, a: &'a MealyAutomaton) -> impl fmt::Display + 'a {
        DisplayElement { el: self, a }
    }

    pub fn inverse(&self) -> Self {
        Self {
            word: self.word.iter().rev().map(|g| g.flipped()).collect(),
        }
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Self) -> Self {
        let mut word = self.word.clone();
        word.extend_from_slice(&other.word);
        Self { word }
    }

    pub fn pow(&self, m: usize) -> Self {
        Self {
            word: self.word.repeat(m),
        }
    }

    /// Drops occurrences of the identity state and cancels adjacent
    /// `q q^-1` pairs. The result denotes the same transformation.
    pub fn reduced(&self, a: &MealyAutomaton) -> Self {
        let id = a.id_state();
        let mut word: Vec<Generator> = Vec::with_capacity(self.word.len());
        for &g in &self.word {
            if Some(g.state) == id {
                continue;
            }
            if word.last() == Some(&g.flipped()) {
                word.pop();
            } else {
                word.push(g);
            }
        }
        Self { word }
    }

    /// Reads one letter: returns the output letter and the (unreduced)
    /// section at that letter.
    pub fn step(&self, a: &MealyAutomaton, x: usize) -> (usize, Element) {
        let mut letter = x;
        let word = self
            .word
            .iter()
            .map(|&g| {
                let (y, next) = g.step(a, letter);
                letter = y;
                next
            })
            .collect();
        (letter, Self { word })
    }

    /// Image of a letter word.
    pub fn act(&self, a: &MealyAutomaton, letters: &[usize]) -> Result<Vec<usize>> {
        self.validate(a)?;
        if let Some(&x) = letters.iter().find(|&&x| x >= a.num_letters()) {
            return Err(Error::Domain(format!("letter index {x} out of range")));
        }
        Ok(self.act_unchecked(a, letters))
    }

    pub(crate) fn act_unchecked(&self, a: &MealyAutomaton, letters: &[usize]) -> Vec<usize> {
        let mut out = letters.to_vec();
        for &g in &self.word {
            let mut gen = g;
            for slot in out.iter_mut() {
                let (y, next) = gen.step(a, *slot);
                *slot = y;
                gen = next;
            }
        }
        out
    }

    /// Image of a single letter.
    pub fn root_image(&self, a: &MealyAutomaton, x: usize) -> usize {
        self.word.iter().fold(x, |letter, &g| g.step(a, letter).0)
    }

    pub fn wreath_recursion(&self, a: &MealyAutomaton) -> WreathRecursion {
        let (root_permutation, sections) = (0..a.num_letters()).map(|x| self.step(a, x)).unzip();
        WreathRecursion {
            sections,
            root_permutation,
        }
    }

    /// Decides whether the element acts trivially by exploring the finite
    /// set of its sections breadth first. `budget` bounds the number of
    /// distinct sections visited. When it runs out, long pseudo-random words
    /// are probed; only the exhaustive search can return `Identity`.
    pub fn is_identity(&self, a: &MealyAutomaton, budget: usize) -> IdentityVerdict {
        match self.identity_search(a, budget) {
            IdentityVerdict::Inconclusive => self.probe(a, budget),
            verdict => verdict,
        }
    }

    /// Acts on deterministic pseudo-random words of growing length, spending
    /// at most `budget * 32` generator steps.
    fn probe(&self, a: &MealyAutomaton, budget: usize) -> IdentityVerdict {
        let k = a.num_letters();
        let g = self.reduced(a);
        if g.is_empty() || k < 2 {
            return IdentityVerdict::Inconclusive;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_f1de);
        let mut spent = 0usize;
        let mut len = 16usize;
        while len <= 512 {
            for _ in 0..8 {
                spent += len * g.len();
                if spent > budget.saturating_mul(32) {
                    return IdentityVerdict::Inconclusive;
                }
                let w: Vec<usize> = (0..len).map(|_| rng.random_range(0..k)).collect();
                let Ok(image) = g.act(a, &w) else {
                    return IdentityVerdict::Inconclusive;
                };
                if let Some(i) = w.iter().zip(&image).position(|(x, y)| x != y) {
                    return IdentityVerdict::Moves(w[..=i].to_vec());
                }
            }
            len *= 2;
        }
        IdentityVerdict::Inconclusive
    }

    fn identity_search(&self, a: &MealyAutomaton, budget: usize) -> IdentityVerdict {
        debug_assert!(self.validate(a).is_ok());
        let k = a.num_letters();
        let start = self.reduced(a);
        // nodes[i] = (section, parent index, letter read from parent)
        let mut nodes: Vec<(Element, usize, usize)> = vec![(start.clone(), usize::MAX, 0)];
        let mut seen: HashMap<Element, ()> = HashMap::from([(start, ())]);
        let mut queue = VecDeque::from([0usize]);

        while let Some(i) = queue.pop_front() {
            let current = nodes[i].0.clone();
            if current.is_empty() {
                continue;
            }
            for x in 0..k {
                let (y, section) = current.step(a, x);
                if y != x {
                    let mut witness = vec![x];
                    let mut j = i;
                    while nodes[j].1 != usize::MAX {
                        witness.push(nodes[j].2);
                        j = nodes[j].1;
                    }
                    witness.reverse();
                    return IdentityVerdict::Moves(witness);
                }
                let section = section.reduced(a);
                if seen.contains_key(&section) {
                    continue;
                }
                if seen.len() >= budget {
                    return IdentityVerdict::Inconclusive;
                }
                seen.insert(section.clone(), ());
                nodes.push((section, i, x));
                queue.push_back(nodes.len() - 1);
            }
        }
        IdentityVerdict::Identity
    }
}

/// Decides `g = h`. Over an invertible automaton this is `g h^-1 = 1`;
/// otherwise both words must be positive and the pair of section closures
/// is explored jointly.
pub fn elements_equal(a: &MealyAutomaton, g: &Element, h: &Element, budget: usize) -> Result<IdentityVerdict> {
    g.validate(a)?;
    h.validate(a)?;
    if a.is_invertible() {
        return Ok(g.then(&h.inverse()).is_identity(a, budget));
    }
    Ok(equal_by_pairs(a, g, h, budget))
}

fn equal_by_pairs(a: &MealyAutomaton, g: &Element, h: &Element, budget: usize) -> IdentityVerdict {
    let k = a.num_letters();
    let start = (g.reduced(a), h.reduced(a));
    let mut nodes = vec![(start.clone(), usize::MAX, 0)];
    let mut seen = HashMap::from([(start, ())]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let (left, right) = nodes[i].0.clone();
        if left == right {
            continue;
        }
        for x in 0..k {
            let (y1, s1) = left.step(a, x);
            let (y2, s2) = right.step(a, x);
            if y1 != y2 {
                let mut witness = vec![x];
                let mut j = i;
                while nodes[j].1 != usize::MAX {
                    witness.push(nodes[j].2);
                    j = nodes[j].1;
                }
                witness.reverse();
                return IdentityVerdict::Moves(witness);
            }
            let key = (s1.reduced(a), s2.reduced(a));
            if seen.contains_key(&key) {
                continue;
            }
            if seen.len() >= budget {
                return IdentityVerdict::Inconclusive;
            }
            seen.insert(key.clone(), ());
            nodes.push((key, i, x));
            queue.push_back(nodes.len() - 1);
        }
    }
    IdentityVerdict::Identity
}

/// `rho_u(s)` for a signed state word `u`.
pub fn act(a: &MealyAutomaton, u: &Element, s: &[usize]) -> Result<Vec<usize>> {
    u.act(a, s)
}

struct DisplayElement<'a> {
    el: &'a Element,
    a: &'a MealyAutomaton,
}

impl fmt::Display for DisplayElement<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.el.is_empty() {
            return f.write_str("1");
        }
        for (i, g) in self.el.word.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(self.a.state_name(g.state))?;
            if g.inverse {
                f.write_str("^-1")?;
            }
        }
        Ok(())
    }
}
