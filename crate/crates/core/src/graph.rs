//! Directed-graph helpers over the positive-flow network: topological order
//! (Kahn), reachability, and cycle extraction for error certificates.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::model::{FlowState, TechId};

/// Adjacency of the positive good-flow network.
#[derive(Debug, Clone, Default)]
pub struct FlowGraph {
    pub nodes: BTreeSet<TechId>,
    pub succ: BTreeMap<TechId, Vec<TechId>>,
    pub pred: BTreeMap<TechId, Vec<TechId>>,
}

impl FlowGraph {
    pub fn from_state(state: &FlowState) -> Self {
        let mut g = FlowGraph::default();
        for t in state.outputs.keys() {
            g.nodes.insert(t.clone());
        }
        for ((from, to), amount) in &state.good_flows {
            if *amount > 0.0 {
                g.nodes.insert(from.clone());
                g.nodes.insert(to.clone());
                g.succ.entry(from.clone()).or_default().push(to.clone());
                g.pred.entry(to.clone()).or_default().push(from.clone());
            }
        }
        for v in g.succ.values_mut() {
            v.sort();
            v.dedup();
        }
        for v in g.pred.values_mut() {
            v.sort();
            v.dedup();
        }
        g
    }

    pub fn successors(&self, t: &TechId) -> &[TechId] {
        self.succ.get(t).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn predecessors(&self, t: &TechId) -> &[TechId] {
        self.pred.get(t).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Kahn topological order, restricted to `subset` when given. Returns
    /// `Err(cycle)` with one directed cycle when the (sub)graph is cyclic.
    pub fn topo_order(&self, subset: Option<&BTreeSet<TechId>>) -> Result<Vec<TechId>, Vec<TechId>> {
        let contains = |t: &TechId| subset.map(|s| s.contains(t)).unwrap_or(true);
        let mut indeg: BTreeMap<&TechId, usize> = BTreeMap::new();
        for n in &self.nodes {
            if contains(n) {
                indeg.insert(n, 0);
            }
        }
        for (from, tos) in &self.succ {
            if !contains(from) {
                continue;
            }
            for to in tos {
                if contains(to) {
                    *indeg.get_mut(to).expect("node indexed") += 1;
                }
            }
        }
        let mut queue: VecDeque<&TechId> = indeg
            .iter()
            .filter(|(_, d)| **d == 0)
            .map(|(t, _)| *t)
            .collect();
        let mut order = Vec::with_capacity(indeg.len());
        while let Some(t) = queue.pop_front() {
            order.push(t.clone());
            for s in self.successors(t) {
                if let Some(d) = indeg.get_mut(s) {
                    *d -= 1;
                    if *d == 0 {
                        queue.push_back(s);
                    }
                }
            }
        }
        if order.len() == indeg.len() {
            Ok(order)
        } else {
            let remaining: BTreeSet<TechId> = indeg
                .keys()
                .filter(|t| !order.contains(t))
                .map(|t| (*t).clone())
                .collect();
            Err(self.find_cycle(&remaining))
        }
    }

    /// One directed cycle inside `within`, as a node list with the start
    /// repeated at the end. `within` must be a Kahn remainder: every node
    /// keeps at least one predecessor inside it, so a backward walk repeats.
    pub fn find_cycle(&self, within: &BTreeSet<TechId>) -> Vec<TechId> {
        let start = within.iter().next().expect("non-empty remainder");
        let mut path = vec![start.clone()];
        let mut seen: BTreeMap<TechId, usize> = BTreeMap::new();
        seen.insert(start.clone(), 0);
        let mut cur = start.clone();
        loop {
            let next = self
                .predecessors(&cur)
                .iter()
                .find(|s| within.contains(*s))
                .expect("remainder node keeps an internal predecessor")
                .clone();
            if let Some(&i) = seen.get(&next) {
                // The backward walk path[i..] traverses the cycle against
                // edge direction; reverse it for the certificate.
                let mut cycle: Vec<TechId> = path[i..].to_vec();
                cycle.reverse();
                cycle.insert(0, next);
                return cycle;
            }
            seen.insert(next.clone(), path.len());
            path.push(next.clone());
            cur = next;
        }
    }

    /// All nodes reachable from `sources` by directed edges, sources included.
    pub fn descendants(&self, sources: &BTreeSet<TechId>) -> BTreeSet<TechId> {
        self.reach(sources, |t| self.successors(t))
    }

    /// All nodes with a directed path to some member of `sinks`, sinks included.
    pub fn ancestors(&self, sinks: &BTreeSet<TechId>) -> BTreeSet<TechId> {
        self.reach(sinks, |t| self.predecessors(t))
    }

    fn reach<'a, F>(&'a self, start: &BTreeSet<TechId>, step: F) -> BTreeSet<TechId>
    where
        F: Fn(&TechId) -> &'a [TechId],
    {
        let mut seen: BTreeSet<TechId> = start.clone();
        let mut stack: Vec<TechId> = start.iter().cloned().collect();
        while let Some(t) = stack.pop() {
            for s in step(&t) {
                if seen.insert(s.clone()) {
                    stack.push(s.clone());
                }
            }
        }
        seen
    }

    /// True when the undirected version of the graph is acyclic (a forest).
    pub fn is_undirected_forest(&self) -> bool {
        let mut edges = 0usize;
        let mut seen: BTreeSet<(TechId, TechId)> = BTreeSet::new();
        for (from, tos) in &self.succ {
            for to in tos {
                let key = if from < to {
                    (from.clone(), to.clone())
                } else {
                    (to.clone(), from.clone())
                };
                if seen.insert(key) {
                    edges += 1;
                }
            }
        }
        // A forest has |E| = |V| - #components.
        let components = self.undirected_components();
        edges + components == self.nodes.len()
    }

    fn undirected_components(&self) -> usize {
        let mut seen: BTreeSet<TechId> = BTreeSet::new();
        let mut count = 0;
        for n in &self.nodes {
            if seen.contains(n) {
                continue;
            }
            count += 1;
            let mut stack = vec![n.clone()];
            seen.insert(n.clone());
            while let Some(t) = stack.pop() {
                for s in self.successors(&t).iter().chain(self.predecessors(&t)) {
                    if seen.insert(s.clone()) {
                        stack.push(s.clone());
                    }
                }
            }
        }
        count
    }
}
