//! Dinic max-flow on small integer-capacity networks.

use std::collections::VecDeque;

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: i64,
}

/// Directed flow network; arcs are stored in pairs so `a ^ 1` is the reverse of `a`.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl FlowNetwork {
    pub fn new(n: usize) -> Self {
        FlowNetwork { arcs: Vec::new(), adj: vec![Vec::new(); n], level: vec![0; n], iter: vec![0; n] }
    }

    pub fn num_nodes(&self) -> usize {
        self.adj.len()
    }

    /// Adds arcs `u -> v` with capacity `cap_uv` and `v -> u` with `cap_vu`.
    pub fn add_edge(&mut self, u: usize, v: usize, cap_uv: i64, cap_vu: i64) {
        assert!(cap_uv >= 0 && cap_vu >= 0, "capacities must be nonnegative");
        self.adj[u].push(self.arcs.len());
        self.arcs.push(Arc { to: v, cap: cap_uv });
        self.adj[v].push(self.arcs.len());
        self.arcs.push(Arc { to: u, cap: cap_vu });
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.fill(-1);
        self.level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &a in &self.adj[u] {
                let Arc { to, cap } = self.arcs[a];
                if cap > 0 && self.level[to] < 0 {
                    self.level[to] = self.level[u] + 1;
                    q.push_back(to);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, pushed: i64) -> i64 {
        if u == t {
            return pushed;
        }
        while self.iter[u] < self.adj[u].len() {
            let a = self.adj[u][self.iter[u]];
            let Arc { to, cap } = self.arcs[a];
            if cap > 0 && self.level[to] == self.level[u] + 1 {
                let d = self.dfs(to, t, pushed.min(cap));
                if d > 0 {
                    self.arcs[a].cap -= d;
                    self.arcs[a ^ 1].cap += d;
                    return d;
                }
            }
            self.iter[u] += 1;
        }
        0
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut flow = 0;
        while self.bfs(s, t) {
            self.iter.fill(0);
            loop {
                let f = self.dfs(s, t, i64::MAX);
                if f == 0 {
                    break;
                }
                flow += f;
            }
        }
        flow
    }

    /// Nodes reachable from `s` in the residual graph (call after `max_flow`).
    pub fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.num_nodes()];
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &a in &self.adj[u] {
                let Arc { to, cap } = self.arcs[a];
                if cap > 0 && !seen[to] {
                    seen[to] = true;
                    q.push_back(to);
                }
            }
        }
        seen
    }
}

/// Binary labeling problem solved by a single s-t cut.
///
/// `terminal[i] = (source_cap, sink_cap)`: node `i` pays `source_cap` when it
/// ends on the sink side and `sink_cap` when on the source side. Each pair
/// `(i, j, c_ij, c_ji)` adds `c_ij` when `i` is on the source side and `j` on
/// the sink side (and `c_ji` for the opposite). Returns the cut value and the
/// source-side flag per node.
pub fn min_cut(terminal: &[(i64, i64)], pairs: &[(usize, usize, i64, i64)]) -> (i64, Vec<bool>) {
    let n = terminal.len();
    let (s, t) = (n, n + 1);
    let mut net = FlowNetwork::new(n + 2);
    for (i, &(cs, ct)) in terminal.iter().enumerate() {
        if cs > 0 {
            net.add_edge(s, i, cs, 0);
        }
        if ct > 0 {
            net.add_edge(i, t, ct, 0);
        }
    }
    for &(i, j, cij, cji) in pairs {
        if cij > 0 || cji > 0 {
            net.add_edge(i, j, cij, cji);
        }
    }
    let cut = net.max_flow(s, t);
    let mut side = net.source_side(s);
    side.truncate(n);
    (cut, side)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cut_cost(terminal: &[(i64, i64)], pairs: &[(usize, usize, i64, i64)], side: &[bool]) -> i64 {
        let mut c = 0;
        for (i, &(cs, ct)) in terminal.iter().enumerate() {
            c += if side[i] { ct } else { cs };
        }
        for &(i, j, cij, cji) in pairs {
            if side[i] && !side[j] {
                c += cij;
            }
            if !side[i] && side[j] {
                c += cji;
            }
        }
        c
    }

    fn brute(terminal: &[(i64, i64)], pairs: &[(usize, usize, i64, i64)]) -> i64 {
        let n = terminal.len();
        (0..1u32 << n)
            .map(|m| {
                let side: Vec<bool> = (0..n).map(|i| m >> i & 1 == 1).collect();
                cut_cost(terminal, pairs, &side)
            })
            .min()
            .unwrap()
    }

    #[test]
    fn two_independent_nodes() {
        let (cut, side) = min_cut(&[(5, 3), (2, 4)], &[(0, 1, 0, 0)]);
        assert_eq!(cut, 5);
        assert_eq!(side, vec![true, false]);
    }

    #[test]
    fn single_node() {
        assert_eq!(min_cut(&[(7, 2)], &[]).0, 2);
    }

    #[test]
    fn strongly_coupled_path() {
        let term = [(3, 1), (1, 4), (2, 2)];
        let pairs = [(0, 1, 100, 100), (1, 2, 100, 100)];
        let (cut, side) = min_cut(&term, &pairs);
        // all-sink pays 3+1+2, all-source pays 1+4+2
        assert_eq!(cut, 6);
        assert!(side.iter().all(|&s| s == side[0]));
    }

    proptest! {
        #[test]
        fn matches_enumeration(
            term in prop::collection::vec((0i64..20, 0i64..20), 1..9),
            raw in prop::collection::vec((0usize..8, 0usize..8, 0i64..15, 0i64..15), 0..16),
        ) {
            let n = term.len();
            let pairs: Vec<_> = raw.into_iter().filter(|p| p.0 < n && p.1 < n && p.0 != p.1).collect();
            let (cut, side) = min_cut(&term, &pairs);
            prop_assert_eq!(cut, brute(&term, &pairs));
            prop_assert_eq!(cut_cost(&term, &pairs, &side), cut);
        }
    }
}
