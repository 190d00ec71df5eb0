//! Brute-force reference values, sharing no solver code with the library.
//!
//! Every MD strategy is enumerated; each induced chain is solved by dense
//! exact Gauss–Jordan elimination, and bottom components are found from
//! explicit reachability sets.

use mdpsynth::{FiniteMdp, Rational};
use num_traits::{One, Zero};

#[derive(Clone, Debug)]
pub enum Goal {
    Reach(Vec<bool>),
    Safety(Vec<bool>),
    /// Largest color seen infinitely often is even.
    Parity,
}

/// Explicit copy of a finite MDP.
#[derive(Clone, Debug)]
pub struct Explicit {
    pub controller: Vec<bool>,
    pub color: Vec<u32>,
    /// Controller options, or the random distribution.
    pub options: Vec<Vec<usize>>,
    pub dist: Vec<Vec<(usize, Rational)>>,
}

impl Explicit {
    pub fn of(m: &FiniteMdp) -> Self {
        let n = m.len();
        let mut x = Explicit { controller: vec![], color: vec![], options: vec![], dist: vec![] };
        for i in 0..n {
            x.controller.push(m.is_controller(i));
            x.color.push(m.color(i));
            if m.is_controller(i) {
                x.options.push(m.succ(i).to_vec());
                x.dist.push(Vec::new());
            } else {
                x.options.push(Vec::new());
                x.dist.push(m.succ(i).iter().copied().zip(m.probs(i).iter().cloned()).collect());
            }
        }
        x
    }

    pub fn len(&self) -> usize {
        self.controller.len()
    }

    pub fn is_empty(&self) -> bool {
        self.controller.is_empty()
    }

    /// Chain rows induced by a choice of option index per controller.
    pub fn rows(&self, pick: &[usize]) -> Vec<Vec<(usize, Rational)>> {
        (0..self.len())
            .map(|i| {
                if self.controller[i] {
                    vec![(self.options[i][pick[i]], Rational::one())]
                } else {
                    self.dist[i].clone()
                }
            })
            .collect()
    }

    /// Number of MD strategies.
    pub fn strategy_count(&self) -> u128 {
        self.options.iter().filter(|o| !o.is_empty()).map(|o| o.len() as u128).product()
    }

    /// Calls `f` on every option-index vector.
    pub fn for_each_strategy(&self, mut f: impl FnMut(&[usize])) {
        let mut pick = vec![0usize; self.len()];
        loop {
            f(&pick);
            let mut i = 0;
            loop {
                if i == self.len() {
                    return;
                }
                if self.controller[i] && pick[i] + 1 < self.options[i].len() {
                    pick[i] += 1;
                    break;
                }
                pick[i] = 0;
                i += 1;
            }
        }
    }
}

fn reachable(rows: &[Vec<(usize, Rational)>], from: usize) -> Vec<bool> {
    let mut seen = vec![false; rows.len()];
    seen[from] = true;
    let mut stack = vec![from];
    while let Some(i) = stack.pop() {
        for (j, _) in &rows[i] {
            if !seen[*j] {
                seen[*j] = true;
                stack.push(*j);
            }
        }
    }
    seen
}

/// Exact hitting probabilities of `target` on a finite chain.
pub fn chain_reach(rows: &[Vec<(usize, Rational)>], target: &[bool]) -> Vec<Rational> {
    let n = rows.len();
    let reach: Vec<Vec<bool>> = (0..n).map(|i| reachable(rows, i)).collect();
    let live: Vec<bool> = (0..n).map(|i| !target[i] && (0..n).any(|j| target[j] && reach[i][j])).collect();
    let vars: Vec<usize> = (0..n).filter(|&i| live[i]).collect();
    let m = vars.len();
    let mut slot = vec![usize::MAX; n];
    for (k, &i) in vars.iter().enumerate() {
        slot[i] = k;
    }
    // Augmented matrix [I - P | b].
    let mut a = vec![vec![Rational::zero(); m + 1]; m];
    for (k, &i) in vars.iter().enumerate() {
        a[k][k] += Rational::one();
        for (j, p) in &rows[i] {
            if target[*j] {
                a[k][m] += p;
            } else if live[*j] {
                a[k][slot[*j]] -= p;
            }
        }
    }
    for col in 0..m {
        let piv = (col..m).find(|&r| !a[r][col].is_zero()).expect("nonsingular after pruning");
        a.swap(col, piv);
        let inv = Rational::one() / &a[col][col];
        for c in col..=m {
            a[col][c] = &a[col][c] * &inv;
        }
        for r in 0..m {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..=m {
                    let d = &f * &a[col][c];
                    a[r][c] -= d;
                }
            }
        }
    }
    (0..n)
        .map(|i| {
            if target[i] {
                Rational::one()
            } else if live[i] {
                a[slot[i]][m].clone()
            } else {
                Rational::zero()
            }
        })
        .collect()
}

/// States in bottom components whose largest color is even.
pub fn winning_bottom(rows: &[Vec<(usize, Rational)>], color: &[u32]) -> Vec<bool> {
    let n = rows.len();
    let reach: Vec<Vec<bool>> = (0..n).map(|i| reachable(rows, i)).collect();
    (0..n)
        .map(|i| {
            let bottom = (0..n).all(|j| !reach[i][j] || reach[j][i]);
            let top = (0..n).filter(|&j| reach[i][j]).map(|j| color[j]).max().unwrap_or(0);
            bottom && top % 2 == 0
        })
        .collect()
}

pub fn chain_value(rows: &[Vec<(usize, Rational)>], color: &[u32], goal: &Goal) -> Vec<Rational> {
    match goal {
        Goal::Reach(t) => chain_reach(rows, t),
        Goal::Safety(t) => chain_reach(rows, t).into_iter().map(|v| Rational::one() - v).collect(),
        Goal::Parity => chain_reach(rows, &winning_bottom(rows, color)),
    }
}

/// Value of one MD strategy, given as option indices.
pub fn strategy_value(x: &Explicit, pick: &[usize], goal: &Goal) -> Vec<Rational> {
    chain_value(&x.rows(pick), &x.color, goal)
}

/// Value of an MD strategy given as chosen successor per state index.
pub fn successor_value(x: &Explicit, succ: &[Option<usize>], goal: &Goal) -> Vec<Rational> {
    let pick: Vec<usize> = (0..x.len())
        .map(|i| match succ[i] {
            Some(t) if x.controller[i] => x.options[i].iter().position(|&o| o == t).expect("valid choice"),
            _ => 0,
        })
        .collect();
    strategy_value(x, &pick, goal)
}

/// Pointwise maximum over all MD strategies.
pub fn brute_force(x: &Explicit, goal: &Goal) -> Vec<Rational> {
    let mut best = vec![Rational::zero(); x.len()];
    x.for_each_strategy(|pick| {
        for (b, v) in best.iter_mut().zip(strategy_value(x, pick, goal)) {
            if v > *b {
                *b = v;
            }
        }
    });
    best
}
