//! The automaton document format and DOT export.
//!
//! ```json
//! {
//!   "states": ["p", "id"],
//!   "alphabet": ["0", "1"],
//!   "delta": { "0": ["id", "id"], "1": ["p", "id"] },
//!   "rho": { "p": ["1", "0"], "id": ["0", "1"] },
//!   "id_state": "id"
//! }
//! ```
//!
//! `delta` maps each letter to the target state of every state, in state
//! order; `rho` maps each state to its output on every letter, in letter
//! order.

use std::fmt::Write as _;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::automaton::MealyAutomaton;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomatonDocument {
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub delta: IndexMap<String, Vec<String>>,
    pub rho: IndexMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id_state: Option<String>,
}

impl AutomatonDocument {
    pub fn from_automaton(a: &MealyAutomaton) -> Self {
        let delta = (0..a.num_letters())
            .map(|x| {
                let targets = (0..a.num_states())
                    .map(|q| a.state_name(a.delta(x, q)).to_string())
                    .collect();
                (a.letter_name(x).to_string(), targets)
            })
            .collect();
        let rho = (0..a.num_states())
            .map(|q| {
                let outputs = (0..a.num_letters())
                    .map(|x| a.letter_name(a.rho(q, x)).to_string())
                    .collect();
                (a.state_name(q).to_string(), outputs)
            })
            .collect();
        Self {
            states: a.state_names().to_vec(),
            alphabet: a.letter_names().to_vec(),
            delta,
            rho,
            id_state: a.id_state().map(|e| a.state_name(e).to_string()),
        }
    }

    /// Resolves names into tables. Structural problems are parse errors;
    /// a bad identity state surfaces as [`Error::Invariant`].
    pub fn to_automaton(&self) -> Result<MealyAutomaton> {
        let n = self.states.len();
        let k = self.alphabet.len();
        let state_of = |name: &str| {
            self.states
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| Error::parse(format!("unknown state {name:?}")))
        };
        let letter_of = |name: &str| {
            self.alphabet
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| Error::parse(format!("unknown letter {name:?}")))
        };

        if self.delta.len() != k {
            return Err(Error::parse(format!("delta must have one entry per letter ({k})")));
        }
        let mut delta = vec![Vec::new(); k];
        for (letter, targets) in &self.delta {
            let x = letter_of(letter)?;
            if targets.len() != n {
                return Err(Error::parse(format!(
                    "delta[{letter:?}] has {} entries, expected {n}",
                    targets.len()
                )));
            }
            delta[x] = targets.iter().map(|t| state_of(t)).collect::<Result<_>>()?;
        }

        if self.rho.len() != n {
            return Err(Error::parse(format!("rho must have one entry per state ({n})")));
        }
        let mut rho = vec![Vec::new(); n];
        for (state, outputs) in &self.rho {
            let q = state_of(state)?;
            if outputs.len() != k {
                return Err(Error::parse(format!(
                    "rho[{state:?}] has {} entries, expected {k}",
                    outputs.len()
                )));
            }
            rho[q] = outputs.iter().map(|y| letter_of(y)).collect::<Result<_>>()?;
        }

        let id_state = self.id_state.as_deref().map(state_of).transpose()?;
        MealyAutomaton::new(self.states.clone(), self.alphabet.clone(), delta, rho, id_state)
    }
}

/// Parses an automaton document; syntax errors carry their line and column.
pub fn parse_automaton(text: &str) -> Result<MealyAutomaton> {
    let doc: AutomatonDocument = serde_json::from_str(text).map_err(|e| Error::Parse {
        message: e.to_string(),
        position: Some((e.line(), e.column())),
    })?;
    doc.to_automaton()
}

/// Serializes in the canonical layout (state and letter order preserved,
/// two-space indentation, trailing newline).
pub fn write_automaton(a: &MealyAutomaton) -> String {
    let mut out = serde_json::to_string_pretty(&AutomatonDocument::from_automaton(a))
        .expect("automaton documents always serialize");
    out.push('\n');
    out
}

/// DOT export: one node per state, one edge per (state, letter) labelled
/// `x|y`. Output is fully determined by state and letter order.
pub fn to_dot(a: &MealyAutomaton, name: &str) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(name)).unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    for q in 0..a.num_states() {
        let shape = if Some(q) == a.id_state() {
            "doublecircle"
        } else {
            "circle"
        };
        writeln!(out, "  {} [shape={shape}];", quote(a.state_name(q))).unwrap();
    }
    for q in 0..a.num_states() {
        for x in 0..a.num_letters() {
            let label = format!("{}|{}", a.letter_name(x), a.letter_name(a.rho(q, x)));
            writeln!(
                out,
                "  {} -> {} [label={}];",
                quote(a.state_name(q)),
                quote(a.state_name(a.delta(x, q))),
                quote(&label)
            )
            .unwrap();
        }
    }
    out.push_str("}\n");
    out
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}
