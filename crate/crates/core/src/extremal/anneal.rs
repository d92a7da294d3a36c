//! Simulated annealing over `m`-subsets with swap moves.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{MinCountEstimate, SolutionIndex};

const T_START: f64 = 2.0;
const T_END: f64 = 0.05;

struct State<'a> {
    index: &'a SolutionIndex,
    inside: Vec<u8>,
    member: Vec<bool>,
    energy: i64,
}

impl State<'_> {
    fn toggle(&mut self, x: usize, add: bool) {
        let k = self.index.k as u8;
        self.member[x] = add;
        for &s in &self.index.by_element[x] {
            let c = &mut self.inside[s as usize];
            if add {
                *c += 1;
                if *c == k {
                    self.energy += 1;
                }
            } else {
                if *c == k {
                    self.energy -= 1;
                }
                *c -= 1;
            }
        }
    }
}

pub(super) fn anneal(
    index: &SolutionIndex,
    n: u64,
    m: u64,
    moves: u64,
    seed: u64,
) -> MinCountEstimate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = n as usize;
    let mut state = State {
        index,
        inside: vec![0; index.tuples.len()],
        member: vec![false; n + 1],
        energy: 0,
    };
    let start = rand::seq::index::sample(&mut rng, n, m as usize);
    let mut ins: Vec<usize> = start.iter().map(|i| i + 1).collect();
    let mut outs: Vec<usize> = (1..=n).filter(|x| !ins.contains(x)).collect();
    for &x in &ins {
        state.toggle(x, true);
    }

    let mut best_energy = state.energy;
    let mut best_members = ins.clone();
    let can_move = !ins.is_empty() && !outs.is_empty();
    let cooling = if moves > 1 {
        (T_END / T_START).powf(1.0 / (moves - 1) as f64)
    } else {
        1.0
    };
    let mut temperature = T_START;
    let mut proposed = 0;
    while can_move && proposed < moves && best_energy > 0 {
        proposed += 1;
        let (i, j) = (rng.gen_range(0..ins.len()), rng.gen_range(0..outs.len()));
        let (u, v) = (ins[i], outs[j]);
        let before = state.energy;
        state.toggle(u, false);
        state.toggle(v, true);
        let delta = (state.energy - before) as f64;
        if delta <= 0.0 || rng.gen::<f64>() < (-delta / temperature).exp() {
            ins[i] = v;
            outs[j] = u;
            if state.energy < best_energy {
                best_energy = state.energy;
                best_members = ins.clone();
            }
        } else {
            state.toggle(v, false);
            state.toggle(u, true);
        }
        temperature *= cooling;
    }

    best_members.sort_unstable();
    MinCountEstimate {
        n: n as u64,
        m,
        min_count: best_energy as u64,
        exact: false,
        witness: best_members.into_iter().map(|x| x as u64).collect(),
        evaluated: proposed,
    }
}
