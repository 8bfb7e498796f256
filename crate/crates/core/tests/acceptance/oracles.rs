//! Reference computations written directly against the raw tables, sharing
//! no code with the library beyond table accessors.

use mealy_core::MealyAutomaton;

/// All words of length exactly `len` over `k` letters.
pub fn words(k: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..k).map(move |x| {
                    let mut v = w.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    out
}

/// Image of `word` under the positive state word `states`, the first state
/// acting first.
pub fn run_states(a: &MealyAutomaton, states: &[usize], word: &[usize]) -> Vec<usize> {
    let mut w = word.to_vec();
    for &q0 in states {
        let mut q = q0;
        for x in w.iter_mut() {
            let y = a.rho_table()[q][*x];
            q = a.delta_table()[*x][q];
            *x = y;
        }
    }
    w
}

/// Whether `q^m` fixes every word up to length `max_len`.
pub fn power_fixes_all(a: &MealyAutomaton, q: usize, m: usize, max_len: usize) -> bool {
    let states = vec![q; m];
    (0..=max_len).all(|l| {
        words(a.num_letters(), l)
            .iter()
            .all(|w| &run_states(a, &states, w) == w)
    })
}

fn is_perm(map: &[usize]) -> bool {
    let mut seen = vec![false; map.len()];
    map.iter()
        .all(|&v| v < map.len() && !std::mem::replace(&mut seen[v], true))
}

/// Bireversibility straight from the definition: invertible, reversible and
/// the inverse automaton reversible. The inverse reads `y`, writes
/// `rho_q^{-1}(y)` and moves along that letter.
pub fn bireversible(delta: &[Vec<usize>], rho: &[Vec<usize>]) -> bool {
    let (k, n) = (delta.len(), rho.len());
    if !rho.iter().all(|r| is_perm(r)) || !delta.iter().all(|d| is_perm(d)) {
        return false;
    }
    (0..k).all(|y| {
        let col: Vec<usize> = (0..n)
            .map(|q| {
                let x = rho[q].iter().position(|&v| v == y).unwrap();
                delta[x][q]
            })
            .collect();
        is_perm(&col)
    })
}

/// Lexicographic list of all permutations of `0..size`.
pub fn permutations(size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(size - 1) {
        for pos in 0..=p.len() {
            let mut v = p.clone();
            v.insert(pos, size - 1);
            out.push(v);
        }
    }
    out.sort();
    out
}

/// Count of row tuples `(rho_0, ..., rho_{k-1})` with `q -> rho_q^{-1}(q)`
/// not a bijection.
pub fn reset_non_permutation_count(k: usize) -> (u64, u64) {
    let perms = permutations(k);
    let mut hits = 0;
    let mut total = 0;
    let mut idx = vec![0usize; k];
    loop {
        total += 1;
        let pi: Vec<usize> = (0..k)
            .map(|q| perms[idx[q]].iter().position(|&v| v == q).unwrap())
            .collect();
        hits += (!is_perm(&pi)) as u64;
        let mut i = 0;
        loop {
            if i == k {
                return (hits, total);
            }
            idx[i] += 1;
            if idx[i] < perms.len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// Number of paths of length `len` avoiding state `id`, from each state,
/// counting parallel letters separately.
pub fn path_counts(delta: &[Vec<usize>], id: usize, len: usize) -> Vec<f64> {
    let n = delta[0].len();
    let mut count = vec![1.0; n];
    count[id] = 0.0;
    for _ in 0..len {
        count = (0..n)
            .map(|q| {
                if q == id {
                    0.0
                } else {
                    delta.iter().map(|d| count[d[q]]).sum()
                }
            })
            .collect();
    }
    count
}

/// Activity degree at most 0 and exactly 0 from path counts at a long
/// length: zero paths means finitary, a small constant means bounded.
pub fn bounded_by_paths(delta: &[Vec<usize>], id: usize) -> (bool, bool) {
    let n = delta[0].len();
    let peak = (96..=100)
        .flat_map(|l| path_counts(delta, id, l))
        .fold(0.0f64, f64::max);
    let finitary = peak == 0.0;
    let bounded = peak <= (n * n) as f64;
    (finitary, bounded && !finitary)
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}
