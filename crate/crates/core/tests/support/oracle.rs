//! Brute-force reference implementation. Shares nothing with the library
//! beyond reading strategy counts and raw payoff tensors: profiles are
//! enumerated as explicit index vectors and every max/min is a nested loop.

use coalition_core::FiniteGame;

pub const EPS: f64 = 1e-9;

pub struct Oracle<'a> {
    game: &'a FiniteGame,
    counts: Vec<usize>,
    profiles: Vec<Vec<usize>>,
}

fn all_assignments(counts: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &m in counts {
        let mut next = Vec::new();
        for prefix in &out {
            for k in 0..m {
                let mut p = prefix.clone();
                p.push(k);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

fn members(n: usize, mask: u32) -> Vec<usize> {
    (0..n).filter(|&i| mask & (1 << i) != 0).collect()
}

impl<'a> Oracle<'a> {
    pub fn new(game: &'a FiniteGame) -> Self {
        let counts: Vec<usize> = (0..game.n()).map(|i| game.strategy_count(i)).collect();
        let profiles = all_assignments(&counts);
        Oracle { game, counts, profiles }
    }

    pub fn n(&self) -> usize {
        self.counts.len()
    }

    pub fn profiles(&self) -> &[Vec<usize>] {
        &self.profiles
    }

    pub fn u(&self, i: usize, a: &[usize]) -> f64 {
        let mut flat = 0;
        for (p, &k) in a.iter().enumerate() {
            flat = flat * self.counts[p] + k;
        }
        self.game.payoff_tensor(i)[flat]
    }

    pub fn group(&self, mask: u32, a: &[usize]) -> f64 {
        members(self.n(), mask).iter().map(|&i| self.u(i, a)).sum()
    }

    /// Joint assignments for the players in `who`, in lexicographic order.
    fn joint(&self, who: &[usize]) -> Vec<Vec<usize>> {
        all_assignments(&who.iter().map(|&i| self.counts[i]).collect::<Vec<_>>())
    }

    fn with(&self, base: &[usize], who: &[usize], values: &[usize]) -> Vec<usize> {
        let mut a = base.to_vec();
        for (&i, &k) in who.iter().zip(values) {
            a[i] = k;
        }
        a
    }

    pub fn best_responds(&self, i: usize, a: &[usize]) -> bool {
        let here = self.u(i, a);
        (0..self.counts[i]).all(|k| self.u(i, &self.with(a, &[i], &[k])) <= here + EPS)
    }

    pub fn coalition_best_responds(&self, mask: u32, a: &[usize]) -> bool {
        let who = members(self.n(), mask);
        let here = self.group(mask, a);
        self.joint(&who)
            .iter()
            .all(|dev| self.group(mask, &self.with(a, &who, dev)) <= here + EPS)
    }

    pub fn is_nash(&self, a: &[usize]) -> bool {
        (0..self.n()).all(|i| self.best_responds(i, a))
    }

    pub fn nash(&self) -> Vec<Vec<usize>> {
        self.profiles.iter().filter(|a| self.is_nash(a)).cloned().collect()
    }

    pub fn social_value(&self) -> f64 {
        let full = (1u32 << self.n()) - 1;
        self.profiles
            .iter()
            .map(|a| self.group(full, a))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn boundary(&self, mask: u32) -> Option<f64> {
        let full = (1u32 << self.n()) - 1;
        if mask == 0 {
            Some(0.0)
        } else if mask == full {
            Some(self.social_value())
        } else {
            None
        }
    }

    pub fn alpha(&self, mask: u32) -> f64 {
        if let Some(b) = self.boundary(mask) {
            return b;
        }
        let n = self.n();
        let inside = members(n, mask);
        let outside = members(n, !mask & ((1 << n) - 1));
        let base = vec![0; n];
        let mut best = f64::NEG_INFINITY;
        for a in self.joint(&inside) {
            let mut worst = f64::INFINITY;
            for b in self.joint(&outside) {
                let p = self.with(&self.with(&base, &inside, &a), &outside, &b);
                worst = worst.min(self.group(mask, &p));
            }
            best = best.max(worst);
        }
        best
    }

    pub fn beta(&self, mask: u32) -> f64 {
        if let Some(b) = self.boundary(mask) {
            return b;
        }
        let n = self.n();
        let inside = members(n, mask);
        let outside = members(n, !mask & ((1 << n) - 1));
        let base = vec![0; n];
        let mut worst = f64::INFINITY;
        for b in self.joint(&outside) {
            let mut best = f64::NEG_INFINITY;
            for a in self.joint(&inside) {
                let p = self.with(&self.with(&base, &inside, &a), &outside, &b);
                best = best.max(self.group(mask, &p));
            }
            worst = worst.min(best);
        }
        worst
    }

    fn best_over<F: Fn(&[usize]) -> bool>(&self, mask: u32, admit: F) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for a in &self.profiles {
            if admit(a) {
                best = best.max(self.group(mask, a));
            }
        }
        best
    }

    pub fn gamma(&self, mask: u32) -> f64 {
        if let Some(b) = self.boundary(mask) {
            return b;
        }
        let n = self.n();
        let outside = members(n, !mask & ((1 << n) - 1));
        self.best_over(mask, |a| {
            self.coalition_best_responds(mask, a) && outside.iter().all(|&j| self.best_responds(j, a))
        })
    }

    pub fn delta(&self, mask: u32) -> f64 {
        if let Some(b) = self.boundary(mask) {
            return b;
        }
        let rest = !mask & ((1 << self.n()) - 1);
        self.best_over(mask, |a| {
            self.coalition_best_responds(mask, a) && self.coalition_best_responds(rest, a)
        })
    }

    /// Follower equilibria of the reduction where the players in `mask`
    /// commit to `commit` (their strategies in ascending player order).
    pub fn follower_equilibria(&self, mask: u32, commit: &[usize]) -> Vec<Vec<usize>> {
        let n = self.n();
        let inside = members(n, mask);
        let outside = members(n, !mask & ((1 << n) - 1));
        let base = self.with(&vec![0; n], &inside, commit);
        self.joint(&outside)
            .into_iter()
            .map(|b| self.with(&base, &outside, &b))
            .filter(|p| outside.iter().all(|&j| self.best_responds(j, p)))
            .collect()
    }

    pub fn lambda_generalised(&self, mask: u32) -> f64 {
        if let Some(b) = self.boundary(mask) {
            return b;
        }
        let inside = members(self.n(), mask);
        let mut best = f64::NEG_INFINITY;
        for a in self.joint(&inside) {
            for p in self.follower_equilibria(mask, &a) {
                best = best.max(self.group(mask, &p));
            }
        }
        best
    }

    /// `None` when some reduction has zero or several follower equilibria.
    pub fn lambda_srp(&self, mask: u32) -> Option<f64> {
        if let Some(b) = self.boundary(mask) {
            return Some(b);
        }
        let inside = members(self.n(), mask);
        let mut best = f64::NEG_INFINITY;
        for a in self.joint(&inside) {
            let eq = self.follower_equilibria(mask, &a);
            if eq.len() != 1 {
                return None;
            }
            best = best.max(self.group(mask, &eq[0]));
        }
        Some(best)
    }

    pub fn srp_holds(&self) -> bool {
        let n = self.n();
        (1..(1u32 << n) - 1).all(|mask| {
            let inside = members(n, mask);
            self.joint(&inside)
                .iter()
                .all(|a| self.follower_equilibria(mask, a).len() == 1)
        })
    }

    pub fn all_worths(&self, f: impl Fn(u32) -> f64) -> Vec<f64> {
        (0..1u32 << self.n()).map(f).collect()
    }

    /// Profiles whose payoff vector is efficient and unblocked under `worths`.
    pub fn profile_core(&self, worths: &[f64]) -> Vec<Vec<usize>> {
        let n = self.n();
        let full = (1u32 << n) - 1;
        self.profiles
            .iter()
            .filter(|a| {
                (self.group(full, a) - worths[full as usize]).abs() <= EPS
                    && (1..full).all(|m| self.group(m, a) >= worths[m as usize] - EPS)
            })
            .cloned()
            .collect()
    }
}

/// `x(S) ≥ v(S) - eps` for every `S`, and `x(N) = v(N)` within `eps`.
pub fn in_core(worths: &[f64], x: &[f64]) -> bool {
    let n = x.len();
    let full = (1usize << n) - 1;
    let sum = |m: usize| -> f64 { (0..n).filter(|&i| m & (1 << i) != 0).map(|i| x[i]).sum() };
    (sum(full) - worths[full]).abs() <= 1e-7 && (1..full).all(|m| sum(m) >= worths[m] - 1e-7)
}
