//! Deterministic DPLL search with two watched literals and chronological
//! backtracking. Clauses can be added between calls to [`Dpll::search`].

use crate::frontend::Literal;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchResult {
    /// Every variable is assigned and no clause is falsified.
    Total,
    /// The requested number of decisions was made without conflict.
    Checkpoint,
    /// No assignment satisfies the clause database.
    Exhausted,
}

#[derive(Clone, Copy, Debug)]
struct Decision {
    trail_len: usize,
    lit: Literal,
    flipped: bool,
}

pub struct Dpll {
    value: Vec<Option<bool>>,
    trail_pos: Vec<usize>,
    trail: Vec<Literal>,
    qhead: usize,
    decisions: Vec<Decision>,
    clauses: Vec<Vec<Literal>>,
    /// Watch lists indexed by literal code: clauses to visit when the literal becomes false.
    watches: Vec<Vec<usize>>,
    units: Vec<Literal>,
    order: Vec<u32>,
    positive_phase: bool,
    unsat: bool,
    since_checkpoint: u32,
    pub n_decisions: u64,
    pub n_propagations: u64,
}

impl Dpll {
    /// `order` lists every variable in branching order.
    pub fn new(n_vars: usize, order: Vec<u32>, positive_phase: bool) -> Self {
        debug_assert_eq!(order.len(), n_vars);
        Dpll {
            value: vec![None; n_vars],
            trail_pos: vec![usize::MAX; n_vars],
            trail: Vec::with_capacity(n_vars),
            qhead: 0,
            decisions: Vec::new(),
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * n_vars],
            units: Vec::new(),
            order,
            positive_phase,
            unsat: false,
            since_checkpoint: 0,
            n_decisions: 0,
            n_propagations: 0,
        }
    }

    pub fn value_of(&self, l: Literal) -> Option<bool> {
        self.value[l.atom() as usize].map(|v| l.holds(v))
    }

    pub fn value(&self, var: u32) -> Option<bool> {
        self.value[var as usize]
    }

    pub fn is_unsat(&self) -> bool {
        self.unsat
    }

    /// Current assignment as literals, in trail order.
    pub fn trail(&self) -> &[Literal] {
        &self.trail
    }

    fn assign(&mut self, l: Literal) {
        let v = l.atom() as usize;
        debug_assert!(self.value[v].is_none());
        self.value[v] = Some(l.is_positive());
        self.trail_pos[v] = self.trail.len();
        self.trail.push(l);
    }

    fn undo_to(&mut self, len: usize) {
        while self.trail.len() > len {
            let l = self.trail.pop().unwrap();
            self.value[l.atom() as usize] = None;
            self.trail_pos[l.atom() as usize] = usize::MAX;
        }
        self.qhead = self.qhead.min(len);
    }

    /// Flips the deepest unflipped decision. False when the tree is exhausted.
    fn backtrack(&mut self) -> bool {
        while let Some(d) = self.decisions.pop() {
            if d.flipped {
                continue;
            }
            self.undo_to(d.trail_len);
            let lit = d.lit.negate();
            self.decisions.push(Decision {
                trail_len: d.trail_len,
                lit,
                flipped: true,
            });
            self.assign(lit);
            return true;
        }
        self.undo_to(0);
        self.unsat = true;
        false
    }

    /// Unit propagation to fixpoint. False on conflict.
    fn propagate(&mut self) -> bool {
        for i in 0..self.units.len() {
            let u = self.units[i];
            match self.value_of(u) {
                Some(true) => {}
                Some(false) => return false,
                None => self.assign(u),
            }
        }
        while self.qhead < self.trail.len() {
            let falsified = self.trail[self.qhead].negate();
            self.qhead += 1;
            let mut ws = std::mem::take(&mut self.watches[falsified.code()]);
            let mut i = 0;
            let mut conflict = false;
            while i < ws.len() {
                let ci = ws[i];
                let c = &mut self.clauses[ci];
                if c[0] == falsified {
                    c.swap(0, 1);
                }
                let first = c[0];
                if self.value[first.atom() as usize].map(|v| first.holds(v)) == Some(true) {
                    i += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..c.len() {
                    let l = c[k];
                    if self.value[l.atom() as usize].map(|v| l.holds(v)) != Some(false) {
                        c.swap(1, k);
                        self.watches[l.code()].push(ci);
                        ws.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                i += 1;
                match self.value_of(first) {
                    Some(false) => {
                        conflict = true;
                        break;
                    }
                    None => {
                        self.n_propagations += 1;
                        self.assign(first);
                    }
                    Some(true) => unreachable!(),
                }
            }
            // Keep the watch list intact, including entries not yet visited.
            let rest = std::mem::take(&mut self.watches[falsified.code()]);
            ws.extend(rest);
            self.watches[falsified.code()] = ws;
            if conflict {
                return false;
            }
        }
        true
    }

    /// Adds a clause, backtracking first while it is falsified.
    pub fn add_clause(&mut self, clause: &[Literal]) {
        if self.unsat {
            return;
        }
        let mut c: Vec<Literal> = clause.to_vec();
        c.sort();
        c.dedup();
        if c.windows(2).any(|w| w[0].atom() == w[1].atom()) {
            return;
        }
        if c.is_empty() {
            self.undo_to(0);
            self.decisions.clear();
            self.unsat = true;
            return;
        }
        while c.iter().all(|&l| self.value_of(l) == Some(false)) {
            if !self.backtrack() {
                return;
            }
        }
        if c.len() == 1 {
            self.units.push(c[0]);
            if self.value_of(c[0]).is_none() {
                self.assign(c[0]);
            }
            return;
        }
        // Non-false first, then false literals assigned latest.
        let key = |l: &Literal, s: &Self| match s.value_of(*l) {
            Some(false) => (1, usize::MAX - s.trail_pos[l.atom() as usize]),
            _ => (0, 0),
        };
        c.sort_by_key(|l| key(l, self));
        let ci = self.clauses.len();
        self.watches[c[0].code()].push(ci);
        self.watches[c[1].code()].push(ci);
        let unit = self.value_of(c[0]).is_none() && self.value_of(c[1]) == Some(false);
        let first = c[0];
        self.clauses.push(c);
        if unit {
            self.assign(first);
        }
    }

    fn next_unassigned(&self) -> Option<u32> {
        self.order
            .iter()
            .copied()
            .find(|&v| self.value[v as usize].is_none())
    }

    /// Runs until a total assignment, a checkpoint (every `prune_every`
    /// decisions) or exhaustion.
    pub fn search(&mut self, prune_every: Option<u32>) -> SearchResult {
        if self.unsat {
            return SearchResult::Exhausted;
        }
        loop {
            if !self.propagate() {
                if !self.backtrack() {
                    return SearchResult::Exhausted;
                }
                continue;
            }
            if let Some(k) = prune_every {
                if self.since_checkpoint >= k {
                    self.since_checkpoint = 0;
                    return SearchResult::Checkpoint;
                }
            }
            let Some(v) = self.next_unassigned() else {
                return SearchResult::Total;
            };
            let lit = Literal::new(v, self.positive_phase);
            self.n_decisions += 1;
            self.since_checkpoint += 1;
            self.decisions.push(Decision {
                trail_len: self.trail.len(),
                lit,
                flipped: false,
            });
            self.assign(lit);
        }
    }
}
