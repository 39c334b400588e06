//! Symbol-disjoint partitioning of the atom set.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::frontend::AtomTable;

/// Disjoint-set forest with path compression and union by rank.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    /// Atom-index sets, each ascending. Theory components come first,
    /// ordered by smallest member.
    pub components: Vec<Vec<u32>>,
    /// Index of the component holding all Boolean atoms, if any exist.
    pub boolean_component: Option<usize>,
}

impl Partition {
    /// Theory components only, in iteration order.
    pub fn theory_components(&self) -> impl Iterator<Item = &Vec<u32>> {
        self.components
            .iter()
            .enumerate()
            .filter(move |(i, _)| Some(*i) != self.boolean_component)
            .map(|(_, c)| c)
    }

    pub fn n_theory_components(&self) -> usize {
        self.components.len() - usize::from(self.boolean_component.is_some())
    }
}

/// Theory atoms are connected when they share a variable; Boolean atoms form
/// one extra component.
pub fn partition_atoms(table: &AtomTable) -> Partition {
    let n = table.len();
    let mut uf = UnionFind::new(n);
    let mut owner: HashMap<&str, usize> = HashMap::new();
    for i in 0..n {
        for s in &table.entry(i as u32).symbols {
            match owner.get(s.as_str()) {
                Some(&j) => {
                    uf.union(i, j);
                }
                None => {
                    owner.insert(s, i);
                }
            }
        }
    }
    let mut by_root: HashMap<usize, usize> = HashMap::new();
    let mut components: Vec<Vec<u32>> = Vec::new();
    let mut booleans = Vec::new();
    for i in 0..n {
        if !table.is_theory(i as u32) {
            booleans.push(i as u32);
            continue;
        }
        let r = uf.find(i);
        let c = *by_root.entry(r).or_insert_with(|| {
            components.push(Vec::new());
            components.len() - 1
        });
        components[c].push(i as u32);
    }
    let boolean_component = if booleans.is_empty() {
        None
    } else {
        components.push(booleans);
        Some(components.len() - 1)
    };
    Partition {
        components,
        boolean_component,
    }
}
