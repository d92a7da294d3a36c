//! Branch and bound for the largest subset of `[n]` with no solution in
//! distinct integers.
//!
//! Elements are decided in increasing order, include-branch first. Including
//! `x` forbids every larger `z` that would complete a distinct solution with
//! `x` and earlier members, so a partial set never contains a solution and the
//! bound `|chosen| + |allowed future elements|` is valid. Only strictly better
//! sets are accepted, which makes the reported witness the lexicographically
//! smallest optimum.

use crate::error::{Error, Result};

pub const HARD_MAX_N: u64 = 127;

pub(crate) struct Outcome {
    pub size: usize,
    pub witness: Vec<u64>,
    pub nodes: u64,
}

struct Solver<'a> {
    coeffs: &'a [i64],
    n: u64,
    best_size: Option<usize>,
    best: Vec<u64>,
    nodes: u64,
    node_budget: Option<u64>,
}

fn future_mask(from: u64, n: u64) -> u128 {
    if from > n {
        return 0;
    }
    let upto = if n >= 127 {
        u128::MAX
    } else {
        (1u128 << (n + 1)) - 1
    };
    upto & !((1u128 << from) - 1)
}

impl Solver<'_> {
    fn run(&mut self, x: u64, chosen: &mut Vec<u64>, forbidden: u128) -> Result<()> {
        self.nodes += 1;
        if let Some(budget) = self.node_budget {
            if self.nodes > budget {
                return Err(Error::Budget(format!(
                    "search exceeded {budget} nodes at n = {}",
                    self.n
                )));
            }
        }
        let available = (future_mask(x, self.n) & !forbidden).count_ones() as usize;
        if let Some(best) = self.best_size {
            if chosen.len() + available <= best {
                return Ok(());
            }
        }
        if x > self.n {
            self.best_size = Some(chosen.len());
            self.best = chosen.clone();
            return Ok(());
        }
        if forbidden >> x & 1 == 0 {
            let extra = self.completions(chosen, x);
            chosen.push(x);
            self.run(x + 1, chosen, forbidden | extra)?;
            chosen.pop();
        }
        self.run(x + 1, chosen, forbidden)
    }

    /// Mask of values `z > x` completing a distinct solution that uses `x`
    /// together with members of `chosen`.
    fn completions(&self, chosen: &[u64], x: u64) -> u128 {
        let k = self.coeffs.len();
        let mut mask = 0u128;
        let mut slots = vec![0u64; k];
        for solved in 0..k {
            for x_pos in (0..k).filter(|&j| j != solved) {
                let rest: Vec<usize> = (0..k).filter(|&j| j != solved && j != x_pos).collect();
                slots[x_pos] = x;
                self.fill(chosen, &rest, 0, &mut slots, solved, x, &mut mask);
            }
        }
        mask
    }

    #[allow(clippy::too_many_arguments)]
    fn fill(
        &self,
        chosen: &[u64],
        rest: &[usize],
        depth: usize,
        slots: &mut [u64],
        solved: usize,
        x: u64,
        mask: &mut u128,
    ) {
        if depth == rest.len() {
            let partial: i128 = (0..slots.len())
                .filter(|&j| j != solved)
                .map(|j| self.coeffs[j] as i128 * slots[j] as i128)
                .sum();
            let a = self.coeffs[solved] as i128;
            if partial % a == 0 {
                let z = -partial / a;
                if z > x as i128 && z <= self.n as i128 {
                    *mask |= 1u128 << z;
                }
            }
            return;
        }
        let pos = rest[depth];
        for &y in chosen {
            if rest[..depth].iter().any(|&q| slots[q] == y) {
                continue;
            }
            slots[pos] = y;
            self.fill(chosen, rest, depth + 1, slots, solved, x, mask);
        }
    }
}

pub(crate) fn branch_and_bound(
    coeffs: &[i64],
    n: u64,
    node_budget: Option<u64>,
) -> Result<Outcome> {
    if n > HARD_MAX_N {
        return Err(Error::Budget(format!(
            "exact search supports n <= {HARD_MAX_N}"
        )));
    }
    let mut solver = Solver {
        coeffs,
        n,
        best_size: None,
        best: Vec::new(),
        nodes: 0,
        node_budget,
    };
    solver.run(1, &mut Vec::new(), 0)?;
    Ok(Outcome {
        size: solver.best_size.unwrap_or(0),
        witness: solver.best,
        nodes: solver.nodes,
    })
}
