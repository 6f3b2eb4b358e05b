//! Small explicit-graph toolkit shared by the monitor analyses, the region
//! solvers and the verifier. Graphs are adjacency lists over `0..n`.

use std::collections::VecDeque;

pub type Adjacency = Vec<Vec<usize>>;

/// Strongly connected components, listed sinks first (reverse topological order).
#[derive(Clone, Debug)]
pub struct Sccs {
    pub comp: Vec<usize>,
    pub comps: Vec<Vec<usize>>,
    /// A component is nontrivial when it carries a cycle: several nodes, or a self-loop.
    pub nontrivial: Vec<bool>,
}

impl Sccs {
    pub fn new(adj: &Adjacency) -> Self {
        let n = adj.len();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut comp = vec![usize::MAX; n];
        let mut comps: Vec<Vec<usize>> = Vec::new();
        let mut counter = 0;
        let mut call: Vec<(usize, usize)> = Vec::new();
        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            call.push((root, 0));
            index[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut i)) = call.last_mut() {
                if *i < adj[v].len() {
                    let w = adj[v][*i];
                    *i += 1;
                    if index[w] == usize::MAX {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(u, _)) = call.last() {
                        low[u] = low[u].min(low[v]);
                    }
                    if low[v] == index[v] {
                        let id = comps.len();
                        let mut members = Vec::new();
                        loop {
                            let w = stack.pop().expect("tarjan stack");
                            on_stack[w] = false;
                            comp[w] = id;
                            members.push(w);
                            if w == v {
                                break;
                            }
                        }
                        members.sort_unstable();
                        comps.push(members);
                    }
                }
            }
        }
        let nontrivial = comps
            .iter()
            .map(|c| c.len() > 1 || adj[c[0]].contains(&c[0]))
            .collect();
        Sccs { comp, comps, nontrivial }
    }

    pub fn is_recurrent(&self, v: usize) -> bool {
        self.nontrivial[self.comp[v]]
    }
}

pub fn reachable(adj: &Adjacency, starts: impl IntoIterator<Item = usize>) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::new();
    for s in starts {
        if !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Shortest path `start = v0, v1, …, vk` with `goal(vk)`, moving only through
/// nodes accepted by `allowed` (the start is always allowed).
pub fn bfs_path(
    adj: &Adjacency,
    start: usize,
    allowed: impl Fn(usize) -> bool,
    goal: impl Fn(usize) -> bool,
) -> Option<Vec<usize>> {
    let mut parent = vec![usize::MAX; adj.len()];
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(v) = queue.pop_front() {
        if goal(v) {
            let mut path = vec![v];
            let mut cur = v;
            while cur != start {
                cur = parent[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for &w in &adj[v] {
            if !seen[w] && allowed(w) {
                seen[w] = true;
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    None
}

/// A cycle `v, …, v` (first node repeated at the end is omitted) through `v`
/// staying inside `allowed`. Requires `v` to lie on such a cycle.
pub fn cycle_through(adj: &Adjacency, v: usize, allowed: impl Fn(usize) -> bool) -> Option<Vec<usize>> {
    let mut best: Option<Vec<usize>> = None;
    for &w in &adj[v] {
        if !allowed(w) {
            continue;
        }
        if w == v {
            return Some(vec![v]);
        }
        if let Some(path) = bfs_path(adj, w, &allowed, |x| x == v) {
            let mut cyc = vec![v];
            cyc.extend_from_slice(&path[..path.len() - 1]);
            if best.as_ref().is_none_or(|b| cyc.len() < b.len()) {
                best = Some(cyc);
            }
        }
    }
    best
}

/// Nodes that have an infinite path staying inside `keep`.
pub fn infinite_inside(adj: &Adjacency, keep: &[bool]) -> Vec<bool> {
    let mut alive: Vec<bool> = keep.to_vec();
    let mut out_count: Vec<usize> = (0..adj.len())
        .map(|v| if alive[v] { adj[v].iter().filter(|&&w| alive[w]).count() } else { 0 })
        .collect();
    let mut rev: Adjacency = vec![Vec::new(); adj.len()];
    for (v, succ) in adj.iter().enumerate() {
        for &w in succ {
            rev[w].push(v);
        }
    }
    let mut queue: VecDeque<usize> = (0..adj.len()).filter(|&v| alive[v] && out_count[v] == 0).collect();
    while let Some(v) = queue.pop_front() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for &u in &rev[v] {
            if alive[u] {
                out_count[u] -= 1;
                if out_count[u] == 0 {
                    queue.push_back(u);
                }
            }
        }
    }
    alive
}
