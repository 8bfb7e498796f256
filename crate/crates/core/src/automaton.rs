//! Dense Mealy automata and the table-level constructions on them:
//! dual, inverse, powers and letter grouping.
//!
//! States and letters are plain indices. Names are carried alongside for
//! I/O only; every algorithm works on the two tables
//!
//! * `delta[x][q]`, the state reached from `q` on input letter `x`,
//! * `rho[q][x]`, the letter output by `q` on input letter `x`.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// Default cap on the number of states of [`MealyAutomaton::power`] and
/// letters of [`MealyAutomaton::wop`].
pub const DEFAULT_SIZE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MealyAutomaton {
    state_names: Vec<String>,
    letter_names: Vec<String>,
    delta: Vec<Vec<usize>>,
    rho: Vec<Vec<usize>>,
    id_state: Option<usize>,
    // rho_inv[q][y] = rho_q^{-1}(y), present iff every rho_q is a bijection
    rho_inv: Option<Vec<Vec<usize>>>,
}

impl MealyAutomaton {
    /// Builds an automaton from named tables. `delta` is indexed
    /// `[letter][state]`, `rho` is indexed `[state][letter]`.
    pub fn new(
        state_names: Vec<String>,
        letter_names: Vec<String>,
        delta: Vec<Vec<usize>>,
        rho: Vec<Vec<usize>>,
        id_state: Option<usize>,
    ) -> Result<Self> {
        let n = state_names.len();
        let k = letter_names.len();
        if n == 0 {
            return Err(Error::Invariant("the stateset is empty".into()));
        }
        if k == 0 {
            return Err(Error::Invariant("the alphabet is empty".into()));
        }
        check_unique(&state_names, "state")?;
        check_unique(&letter_names, "letter")?;
        if delta.len() != k || delta.iter().any(|col| col.len() != n) {
            return Err(Error::Invariant(format!(
                "transition table must be {k} x {n} (letters x states)"
            )));
        }
        if rho.len() != n || rho.iter().any(|row| row.len() != k) {
            return Err(Error::Invariant(format!(
                "production table must be {n} x {k} (states x letters)"
            )));
        }
        if let Some(bad) = delta.iter().flatten().find(|&&q| q >= n) {
            return Err(Error::Invariant(format!("transition target {bad} is not a state")));
        }
        if let Some(bad) = rho.iter().flatten().find(|&&x| x >= k) {
            return Err(Error::Invariant(format!("output {bad} is not a letter")));
        }
        if let Some(e) = id_state {
            if e >= n {
                return Err(Error::Invariant(format!("identity state {e} is not a state")));
            }
            for x in 0..k {
                if rho[e][x] != x || delta[x][e] != e {
                    return Err(Error::Invariant(format!(
                        "declared identity state {:?} is not a self-loop identity on letter {:?}",
                        state_names[e], letter_names[x]
                    )));
                }
            }
        }
        let rho_inv = invert_rows(&rho, k);
        Ok(Self {
            state_names,
            letter_names,
            delta,
            rho,
            id_state,
            rho_inv,
        })
    }

    /// Same as [`MealyAutomaton::new`] with states named `q0, q1, ...` and
    /// letters named `0, 1, ...`.
    pub fn from_tables(delta: Vec<Vec<usize>>, rho: Vec<Vec<usize>>, id_state: Option<usize>) -> Result<Self> {
        let n = rho.len();
        let k = delta.len();
        let states = (0..n).map(|q| format!("q{q}")).collect();
        let letters = (0..k).map(|x| x.to_string()).collect();
        Self::new(states, letters, delta, rho, id_state)
    }

    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn num_letters(&self) -> usize {
        self.letter_names.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn letter_names(&self) -> &[String] {
        &self.letter_names
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.state_names[q]
    }

    pub fn letter_name(&self, x: usize) -> &str {
        &self.letter_names[x]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.state_names.iter().position(|s| s == name)
    }

    pub fn letter_index(&self, name: &str) -> Option<usize> {
        self.letter_names.iter().position(|s| s == name)
    }

    pub fn id_state(&self) -> Option<usize> {
        self.id_state
    }

    /// Transition table, indexed `[letter][state]`.
    pub fn delta_table(&self) -> &[Vec<usize>] {
        &self.delta
    }

    /// Production table, indexed `[state][letter]`.
    pub fn rho_table(&self) -> &[Vec<usize>] {
        &self.rho
    }

    #[inline]
    pub fn delta(&self, x: usize, q: usize) -> usize {
        self.delta[x][q]
    }

    #[inline]
    pub fn rho(&self, q: usize, x: usize) -> usize {
        self.rho[q][x]
    }

    /// `rho_q^{-1}(y)`, when the automaton is invertible.
    #[inline]
    pub fn rho_inverse(&self, q: usize, y: usize) -> Option<usize> {
        self.rho_inv.as_ref().map(|inv| inv[q][y])
    }

    /// The cross-transition of `q` on `x`: `(delta_x(q), rho_q(x))`.
    pub fn step(&self, q: usize, x: usize) -> Result<(usize, usize)> {
        if q >= self.num_states() {
            return Err(Error::Domain(format!("state index {q} out of range")));
        }
        if x >= self.num_letters() {
            return Err(Error::Domain(format!("letter index {x} out of range")));
        }
        Ok((self.delta[x][q], self.rho[q][x]))
    }

    /// Runs state `q` on a letter word; returns the output and the final state.
    pub fn run_state(&self, q: usize, word: &[usize]) -> (Vec<usize>, usize) {
        let mut state = q;
        let out = word
            .iter()
            .map(|&x| {
                let y = self.rho[state][x];
                state = self.delta[x][state];
                y
            })
            .collect();
        (out, state)
    }

    pub fn is_invertible(&self) -> bool {
        self.rho_inv.is_some()
    }

    pub fn is_reversible(&self) -> bool {
        let n = self.num_states();
        self.delta.iter().all(|col| is_permutation(col, n))
    }

    /// Returns a copy with the given identity state declared (validated).
    pub fn with_id_state(&self, id_state: Option<usize>) -> Result<Self> {
        Self::new(
            self.state_names.clone(),
            self.letter_names.clone(),
            self.delta.clone(),
            self.rho.clone(),
            id_state,
        )
    }

    /// The dual automaton: stateset and alphabet exchanged, `delta` and
    /// `rho` swapped. No identity state is carried over.
    pub fn dual(&self) -> Self {
        Self::new(
            self.letter_names.clone(),
            self.state_names.clone(),
            self.rho.clone(),
            self.delta.clone(),
            None,
        )
        .expect("the dual of a valid automaton is valid")
    }

    /// The inverse automaton: every transition `p --x|y--> q` becomes
    /// `p --y|x--> q`. State `q` of the result stands for `q^{-1}` and keeps
    /// the name of `q`.
    pub fn inverse(&self) -> Result<Self> {
        let inv = self
            .rho_inv
            .as_ref()
            .ok_or_else(|| Error::Capability("inverse of a non-invertible automaton".into()))?;
        let n = self.num_states();
        let k = self.num_letters();
        let delta = (0..k)
            .map(|y| (0..n).map(|q| self.delta[inv[q][y]][q]).collect())
            .collect();
        Self::new(
            self.state_names.clone(),
            self.letter_names.clone(),
            delta,
            inv.clone(),
            self.id_state,
        )
    }

    /// The `l`-th power: stateset `Q^l`, where the tuple `(q1, ..., ql)`
    /// acts as `q1` followed by `q2`, and so on.
    pub fn power(&self, l: usize, cap: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::Domain("power exponent must be at least 1".into()));
        }
        let n = self.num_states();
        let k = self.num_letters();
        let size = checked_size(n, l, cap, "power stateset")?;
        let decode = |mut idx: usize| {
            let mut tuple = vec![0; l];
            for slot in tuple.iter_mut().rev() {
                *slot = idx % n;
                idx /= n;
            }
            tuple
        };
        let encode = |tuple: &[usize]| tuple.iter().fold(0, |acc, &q| acc * n + q);

        let mut delta = vec![vec![0; size]; k];
        let mut rho = vec![vec![0; k]; size];
        for idx in 0..size {
            let tuple = decode(idx);
            for x in 0..k {
                let mut letter = x;
                let mut next = Vec::with_capacity(l);
                for &q in &tuple {
                    next.push(self.delta[letter][q]);
                    letter = self.rho[q][letter];
                }
                delta[x][idx] = encode(&next);
                rho[idx][x] = letter;
            }
        }
        let names = (0..size)
            .map(|idx| {
                let parts: Vec<&str> = decode(idx).iter().map(|&q| self.state_name(q)).collect();
                join_names(&parts)
            })
            .collect();
        let id_state = self.id_state.map(|e| encode(&vec![e; l]));
        Self::new(names, self.letter_names.clone(), delta, rho, id_state)
    }

    /// Letter grouping: the same states read blocks of `l` letters at once.
    /// Block `x1 x2 ... xl` has index `x1 * k^(l-1) + ... + xl`.
    pub fn wop(&self, l: usize, cap: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::Domain("grouping length must be at least 1".into()));
        }
        let n = self.num_states();
        let k = self.num_letters();
        let size = checked_size(k, l, cap, "grouped alphabet")?;

        let mut delta = vec![vec![0; n]; size];
        let mut rho = vec![vec![0; size]; n];
        for block in 0..size {
            let word = decode_block(block, k, l);
            for q in 0..n {
                let (out, end) = self.run_state(q, &word);
                delta[block][q] = end;
                rho[q][block] = encode_block(&out, k);
            }
        }
        let names = (0..size)
            .map(|block| {
                let parts: Vec<&str> = decode_block(block, k, l).iter().map(|&x| self.letter_name(x)).collect();
                join_names(&parts)
            })
            .collect();
        Self::new(self.state_names.clone(), names, delta, rho, self.id_state)
    }

    /// Sub-automaton on a set of states closed under every transition.
    pub fn restrict(&self, states: &[usize]) -> Result<Self> {
        let mut index = vec![usize::MAX; self.num_states()];
        for (i, &q) in states.iter().enumerate() {
            if q >= self.num_states() {
                return Err(Error::Domain(format!("state index {q} out of range")));
            }
            index[q] = i;
        }
        let mut delta = vec![Vec::with_capacity(states.len()); self.num_letters()];
        for (x, col) in delta.iter_mut().enumerate() {
            for &q in states {
                let target = index[self.delta[x][q]];
                if target == usize::MAX {
                    return Err(Error::Capability("state subset is not closed under transitions".into()));
                }
                col.push(target);
            }
        }
        let rho = states.iter().map(|&q| self.rho[q].clone()).collect();
        let names = states.iter().map(|&q| self.state_names[q].clone()).collect();
        let id_state = self.id_state.and_then(|e| (index[e] != usize::MAX).then_some(index[e]));
        Self::new(names, self.letter_names.clone(), delta, rho, id_state)
    }

    /// Looks for a bijection `f` of states with `rho_q = rho'_{f(q)}` and
    /// `f(delta_x(q)) = delta'_x(f(q))`, letters matched by index and name.
    pub fn state_isomorphism(&self, other: &Self) -> Option<Vec<usize>> {
        if self.num_states() != other.num_states() || self.letter_names != other.letter_names {
            return None;
        }
        let n = self.num_states();
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        if self.extend_isomorphism(other, &mut map, &mut used) {
            Some(map)
        } else {
            None
        }
    }

    fn extend_isomorphism(&self, other: &Self, map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let Some(q) = map.iter().position(|&m| m == usize::MAX) else {
            return true;
        };
        for candidate in 0..other.num_states() {
            if used[candidate] {
                continue;
            }
            let (saved_map, saved_used) = (map.clone(), used.clone());
            if self.propagate(other, q, candidate, map, used) && self.extend_isomorphism(other, map, used) {
                return true;
            }
            *map = saved_map;
            *used = saved_used;
        }
        false
    }

    fn propagate(&self, other: &Self, q: usize, image: usize, map: &mut [usize], used: &mut [bool]) -> bool {
        let mut pending = vec![(q, image)];
        while let Some((p, p_img)) = pending.pop() {
            if map[p] == p_img {
                continue;
            }
            if map[p] != usize::MAX || used[p_img] || self.rho[p] != other.rho[p_img] {
                return false;
            }
            map[p] = p_img;
            used[p_img] = true;
            for x in 0..self.num_letters() {
                pending.push((self.delta[x][p], other.delta[x][p_img]));
            }
        }
        true
    }
}

fn check_unique(names: &[String], what: &str) -> Result<()> {
    let mut seen = HashSet::new();
    for name in names {
        if !seen.insert(name.as_str()) {
            return Err(Error::Invariant(format!("duplicate {what} name {name:?}")));
        }
    }
    Ok(())
}

fn checked_size(base: usize, exp: usize, cap: usize, what: &'static str) -> Result<usize> {
    let size = u32::try_from(exp)
        .ok()
        .and_then(|e| (base as u128).checked_pow(e))
        .unwrap_or(u128::MAX);
    if size > cap as u128 {
        return Err(Error::Size {
            what,
            size,
            cap: cap as u128,
        });
    }
    Ok(size as usize)
}

pub(crate) fn is_permutation(map: &[usize], size: usize) -> bool {
    if map.len() != size {
        return false;
    }
    let mut seen = vec![false; size];
    map.iter().all(|&v| v < size && !std::mem::replace(&mut seen[v], true))
}

fn invert_rows(rows: &[Vec<usize>], k: usize) -> Option<Vec<Vec<usize>>> {
    rows.iter()
        .map(|row| {
            if !is_permutation(row, k) {
                return None;
            }
            let mut inv = vec![0; k];
            for (x, &y) in row.iter().enumerate() {
                inv[y] = x;
            }
            Some(inv)
        })
        .collect()
}

fn join_names(parts: &[&str]) -> String {
    if parts.iter().all(|p| p.chars().count() == 1) {
        parts.concat()
    } else {
        parts.join(".")
    }
}

/// Splits a grouped letter into its `l` letters, most significant first.
pub fn decode_block(mut block: usize, k: usize, l: usize) -> Vec<usize> {
    let mut word = vec![0; l];
    for slot in word.iter_mut().rev() {
        *slot = block % k;
        block /= k;
    }
    word
}

pub fn encode_block(word: &[usize], k: usize) -> usize {
    word.iter().fold(0, |acc, &x| acc * k + x)
}
