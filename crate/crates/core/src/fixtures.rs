//! The automata drawn in the reference figures, bundled as documents.

use crate::automaton::MealyAutomaton;
use crate::io::parse_automaton;

pub const GRIGORCHUK_JSON: &str = include_str!("../../../fixtures/grigorchuk.json");
pub const ADDING_MACHINE_JSON: &str = include_str!("../../../fixtures/adding_machine.json");
pub const FIG2_JSON: &str = include_str!("../../../fixtures/fig2.json");
pub const GRIGORCHUK_NF3_JSON: &str = include_str!("../../../fixtures/grigorchuk_nf3.json");
pub const RESET_K2_NONPERM_JSON: &str = include_str!("../../../fixtures/reset_k2_nonperm.json");
pub const RESET_K2_PERM_JSON: &str = include_str!("../../../fixtures/reset_k2_perm.json");
pub const RESET_PRUNED_JSON: &str = include_str!("../../../fixtures/reset_pruned.json");

fn load(text: &str) -> MealyAutomaton {
    parse_automaton(text).expect("bundled fixture parses")
}

/// Five-state automaton generating the Grigorchuk group.
pub fn grigorchuk() -> MealyAutomaton {
    load(GRIGORCHUK_JSON)
}

/// Binary adding machine `p = (id, p)(0 1)`.
pub fn adding_machine() -> MealyAutomaton {
    load(ADDING_MACHINE_JSON)
}

/// Six-state, three-letter invertible reversible automaton that is not
/// bireversible.
pub fn fig2() -> MealyAutomaton {
    load(FIG2_JSON)
}

/// The Grigorchuk automaton read over blocks of three letters.
pub fn grigorchuk_nf3() -> MealyAutomaton {
    load(GRIGORCHUK_NF3_JSON)
}

/// Unfolded reset automaton on two letters with `rho_0 = id`, `rho_1 = (0 1)`.
pub fn reset_k2_nonperm() -> MealyAutomaton {
    load(RESET_K2_NONPERM_JSON)
}

/// Unfolded reset automaton on two letters with both rows `(0 1)`.
pub fn reset_k2_perm() -> MealyAutomaton {
    load(RESET_K2_PERM_JSON)
}

/// Three-state reset automaton whose third state has no ingoing edge.
pub fn reset_pruned() -> MealyAutomaton {
    load(RESET_PRUNED_JSON)
}
