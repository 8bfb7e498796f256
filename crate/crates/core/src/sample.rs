//! Seed-reproducible uniform sampling of automata in the studied classes.
//!
//! Every trial draws from its own ChaCha8 stream seeded by
//! `seed ^ splitmix64(trial_index)`, so a sample depends only on
//! `(seed, trial_index)` and never on thread scheduling.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::automaton::MealyAutomaton;
use crate::classify::{activity_class, Activity};
use crate::error::{Error, Result};

/// Published identity of the generator and stream derivation.
pub const RNG_IDENTITY: &str = "ChaCha8Rng (rand_chacha 0.9), stream seed = seed ^ splitmix64(trial_index)";

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_160_601;

pub const DEFAULT_MAX_REJECTS: u64 = 1_000_000;

/// Stream index reserved for draws shared by all trials.
const SHARED_STREAM: u64 = u64::MAX;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn trial_rng(seed: u64, trial_index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ splitmix64(trial_index))
}

fn random_permutation<R: Rng + ?Sized>(size: usize, rng: &mut R) -> Vec<usize> {
    let mut p: Vec<usize> = (0..size).collect();
    p.shuffle(rng);
    p
}

fn letter_names(k: usize) -> Vec<String> {
    (0..k).map(|x| x.to_string()).collect()
}

fn check_sizes(n: usize, k: usize) -> Result<()> {
    if n == 0 || k == 0 {
        return Err(Error::Domain(format!("need n, k >= 1, got n = {n}, k = {k}")));
    }
    Ok(())
}

/// Uniform invertible reversible automaton: every `delta_x` a uniform
/// permutation of the states, every `rho_q` one of the letters.
pub fn sample_invertible_reversible<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<MealyAutomaton> {
    check_sizes(n, k)?;
    let delta = (0..k).map(|_| random_permutation(n, rng)).collect();
    let rho = (0..n).map(|_| random_permutation(k, rng)).collect();
    MealyAutomaton::from_tables(delta, rho, None)
}

/// Uniform unfolded reset automaton: states are the letters, `delta_x(q) = x`,
/// and the `rho_q` are independent uniform permutations.
pub fn sample_reset<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<MealyAutomaton> {
    check_sizes(1, k)?;
    let rho = (0..k).map(|_| random_permutation(k, rng)).collect();
    reset_from_rows(rho)
}

pub(crate) fn reset_from_rows(rho: Vec<Vec<usize>>) -> Result<MealyAutomaton> {
    let k = rho.len();
    let delta = (0..k).map(|x| vec![x; k]).collect();
    MealyAutomaton::new(letter_names(k), letter_names(k), delta, rho, None)
}

/// [`sample_reset`] conditioned on pairwise distinct rows, by rejection.
pub fn sample_reset_minimal<R: Rng + ?Sized>(k: usize, rng: &mut R, max_rejects: u64) -> Result<MealyAutomaton> {
    if k < 2 {
        return Err(Error::Capability(
            "distinct reset rows need at least two letters".into(),
        ));
    }
    for _ in 0..=max_rejects {
        let a = sample_reset(k, rng)?;
        let rows = a.rho_table();
        let distinct = (0..k).all(|p| (p + 1..k).all(|q| rows[p] != rows[q]));
        if distinct {
            return Ok(a);
        }
    }
    Err(Error::SamplingExhausted { rejects: max_rejects })
}

/// Target of the polynomial-activity rejection sampler. Degree -1 is finitary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeTarget {
    pub degree: i32,
    /// Accept every degree up to `degree` instead of exactly `degree`.
    #[serde(default)]
    pub at_most: bool,
}

impl DegreeTarget {
    pub fn exactly(degree: i32) -> Self {
        Self { degree, at_most: false }
    }

    pub fn at_most(degree: i32) -> Self {
        Self { degree, at_most: true }
    }

    pub fn accepts(self, activity: Activity) -> bool {
        match activity.degree() {
            None => false,
            Some(d) if self.at_most => d <= self.degree,
            Some(d) => d == self.degree,
        }
    }
}

fn pol_state_names(n: usize) -> Vec<String> {
    std::iter::once("id".to_string())
        .chain((1..n).map(|q| format!("q{q}")))
        .collect()
}

/// Uniform transition skeleton with identity state 0: the identity state
/// loops on every letter, every other transition is a uniform state. The
/// production rows are all identities.
pub fn sample_skeleton<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<MealyAutomaton> {
    check_sizes(n, k)?;
    let delta = (0..k)
        .map(|_| {
            std::iter::once(0)
                .chain((1..n).map(|_| rng.random_range(0..n)))
                .collect()
        })
        .collect();
    MealyAutomaton::new(
        pol_state_names(n),
        letter_names(k),
        delta,
        vec![(0..k).collect(); n],
        Some(0),
    )
}

/// Replaces the production row of every non-identity state by an
/// independent uniform permutation.
fn resample_rows<R: Rng + ?Sized>(skeleton: &MealyAutomaton, rng: &mut R) -> Result<MealyAutomaton> {
    let k = skeleton.num_letters();
    let rho = (0..skeleton.num_states())
        .map(|q| {
            if Some(q) == skeleton.id_state() {
                (0..k).collect()
            } else {
                random_permutation(k, rng)
            }
        })
        .collect();
    MealyAutomaton::new(
        skeleton.state_names().to_vec(),
        skeleton.letter_names().to_vec(),
        skeleton.delta_table().to_vec(),
        rho,
        skeleton.id_state(),
    )
}

/// Full rejection: a uniform skeleton is kept iff its activity hits the
/// target, then uniform production rows are attached. The output is uniform
/// over skeletons in the target class, times all row choices.
pub fn sample_pol<R: Rng + ?Sized>(
    target: DegreeTarget,
    n: usize,
    k: usize,
    rng: &mut R,
    max_rejects: u64,
) -> Result<MealyAutomaton> {
    for _ in 0..=max_rejects {
        let skeleton = sample_skeleton(n, k, rng)?;
        if target.accepts(activity_class(&skeleton)?) {
            return resample_rows(&skeleton, rng);
        }
    }
    Err(Error::SamplingExhausted { rejects: max_rejects })
}

/// Same skeleton and identity row, fresh uniform rows for every other state.
pub fn sample_pol_conditional<R: Rng + ?Sized>(skeleton: &MealyAutomaton, rng: &mut R) -> Result<MealyAutomaton> {
    if skeleton.id_state().is_none() {
        return Err(Error::Capability("conditional sampling needs an identity state".into()));
    }
    match activity_class(skeleton)? {
        Activity::Polynomial(_) => resample_rows(skeleton, rng),
        other => Err(Error::Capability(format!(
            "conditional sampling needs a polynomial, non-finitary skeleton, got {other}"
        ))),
    }
}

/// A non-identity state with a self-loop letter, if any: `delta_i(t) = t`.
pub fn self_loop(a: &MealyAutomaton) -> Option<(usize, usize)> {
    (0..a.num_states())
        .filter(|&t| Some(t) != a.id_state())
        .find_map(|t| (0..a.num_letters()).find(|&i| a.delta(i, t) == t).map(|i| (t, i)))
}

/// Skeleton shared by every trial of the conditional scheme: a Pol(0),
/// non-finitary skeleton with a letter-level self-loop at a non-identity
/// state, drawn from a stream that does not depend on the trial index.
pub fn conditional_skeleton(n: usize, k: usize, seed: u64, max_rejects: u64) -> Result<MealyAutomaton> {
    if n < 2 {
        return Err(Error::Capability(
            "a non-finitary skeleton needs at least two states".into(),
        ));
    }
    let mut rng = trial_rng(seed, SHARED_STREAM);
    for _ in 0..=max_rejects {
        let s = sample_skeleton(n, k, &mut rng)?;
        if activity_class(&s)? == Activity::Polynomial(0) && self_loop(&s).is_some() {
            return Ok(s);
        }
    }
    Err(Error::SamplingExhausted { rejects: max_rejects })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum SamplerClass {
    InvertibleReversible,
    ResetUnfolded,
    ResetMinimal,
    Pol(DegreeTarget),
    Pol0Conditional,
}

/// Everything that determines one sampled automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerSpec {
    #[serde(flatten)]
    pub class: SamplerClass,
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    #[serde(default)]
    pub trial_index: u64,
    #[serde(default = "default_max_rejects")]
    pub max_rejects: u64,
}

fn default_max_rejects() -> u64 {
    DEFAULT_MAX_REJECTS
}

impl SamplerSpec {
    pub fn new(class: SamplerClass, n: usize, k: usize, seed: u64) -> Self {
        Self {
            class,
            n,
            k,
            seed,
            trial_index: 0,
            max_rejects: DEFAULT_MAX_REJECTS,
        }
    }

    pub fn with_trial(self, trial_index: u64) -> Self {
        Self { trial_index, ..self }
    }

    /// Reset classes ignore `n`: the stateset is the alphabet.
    pub fn sample(&self) -> Result<MealyAutomaton> {
        let mut rng = trial_rng(self.seed, self.trial_index);
        match self.class {
            SamplerClass::InvertibleReversible => sample_invertible_reversible(self.n, self.k, &mut rng),
            SamplerClass::ResetUnfolded => sample_reset(self.k, &mut rng),
            SamplerClass::ResetMinimal => sample_reset_minimal(self.k, &mut rng, self.max_rejects),
            SamplerClass::Pol(target) => sample_pol(target, self.n, self.k, &mut rng, self.max_rejects),
            SamplerClass::Pol0Conditional => {
                let skeleton = conditional_skeleton(self.n, self.k, self.seed, self.max_rejects)?;
                sample_pol_conditional(&skeleton, &mut rng)
            }
        }
    }
}
