use std::collections::{BTreeSet, VecDeque};
use std::time::Instant;

use rustc_hash::FxHashMap as HashMap;

use crate::automata::{AutomataError, LassoTrace, OmegaAutomaton, StateId};
use crate::program::Letter;

/// Exploration limits for emptiness checks on lazy automata.
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub max_states: usize,
    pub deadline: Option<Instant>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_states: 1_000_000,
            deadline: None,
        }
    }
}

impl Limits {
    fn check(&self, explored: usize) -> Result<(), AutomataError> {
        if explored > self.max_states {
            return Err(AutomataError::StateBudget(self.max_states));
        }
        if let Some(d) = self.deadline {
            if Instant::now() > d {
                return Err(AutomataError::Timeout);
            }
        }
        Ok(())
    }
}

pub fn is_empty(a: &dyn OmegaAutomaton) -> Result<Option<LassoTrace>, AutomataError> {
    is_empty_with(a, &Limits::default())
}

/// The reachable part, densely indexed in BFS order.
struct Graph {
    order: Vec<StateId>,
    succ: Vec<Vec<(Letter, usize)>>,
    parent: Vec<Option<(usize, Letter)>>,
    dist: Vec<usize>,
}

/// BFS over the reachable part; parents give the lexicographically least
/// among shortest stems.
fn explore(a: &dyn OmegaAutomaton, limits: &Limits) -> Result<Graph, AutomataError> {
    let alphabet = a.alphabet();
    let mut g = Graph {
        order: Vec::new(),
        succ: Vec::new(),
        parent: Vec::new(),
        dist: Vec::new(),
    };
    let mut idx: HashMap<StateId, usize> = HashMap::default();
    let mut init = a.initial_states();
    init.sort_unstable();
    for s in init {
        idx.entry(s).or_insert_with(|| {
            g.order.push(s);
            g.parent.push(None);
            g.dist.push(0);
            g.order.len() - 1
        });
    }
    while g.succ.len() < g.order.len() {
        let v = g.succ.len();
        limits.check(v + 1)?;
        let s = g.order[v];
        let mut out = Vec::new();
        for &l in &alphabet {
            for t in a.successors(s, l)? {
                let w = *idx.entry(t).or_insert_with(|| {
                    g.order.push(t);
                    g.parent.push(Some((v, l)));
                    g.dist.push(g.dist[v] + 1);
                    g.order.len() - 1
                });
                out.push((l, w));
            }
        }
        g.succ.push(out);
    }
    Ok(g)
}

/// Tarjan, iterative. Returns the component index of every node.
fn tarjan(n: usize, succ: impl Fn(usize) -> Vec<usize>) -> Vec<usize> {
    const NONE: usize = usize::MAX;
    let mut index = vec![NONE; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![NONE; n];
    let mut next = 0;
    let mut ncomp = 0;
    for root in 0..n {
        if index[root] != NONE {
            continue;
        }
        let mut work = vec![(root, succ(root), 0usize)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some((v, ws, i)) = work.last_mut() {
            let v = *v;
            if *i < ws.len() {
                let w = ws[*i];
                *i += 1;
                if index[w] == NONE {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    work.push((w, succ(w), 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                work.pop();
                if let Some((u, _, _)) = work.last() {
                    low[*u] = low[*u].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    comp
}

/// Shortest, then lexicographically least, cycle through `q` inside its
/// component.
fn shortest_cycle(g: &Graph, comp: &[usize], q: usize) -> Option<Vec<Letter>> {
    let c = comp[q];
    let mut parent: HashMap<usize, (usize, Letter)> = HashMap::default();
    let mut queue = VecDeque::new();
    // Virtual source at q: the first layer are q's successors.
    for &(l, t) in &g.succ[q] {
        if comp[t] != c {
            continue;
        }
        if t == q {
            return Some(vec![l]);
        }
        if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(t) {
            e.insert((q, l));
            queue.push_back(t);
        }
    }
    while let Some(s) = queue.pop_front() {
        for &(l, t) in &g.succ[s] {
            if comp[t] != c {
                continue;
            }
            if t == q {
                let mut word = vec![l];
                let mut cur = s;
                while cur != q {
                    let (p, pl) = parent[&cur];
                    word.push(pl);
                    cur = p;
                }
                word.reverse();
                return Some(word);
            }
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(t) {
                e.insert((s, l));
                queue.push_back(t);
            }
        }
    }
    None
}

fn stem_to(g: &Graph, q: usize) -> Vec<Letter> {
    let mut word = Vec::new();
    let mut cur = q;
    while let Some((p, l)) = g.parent[cur] {
        word.push(l);
        cur = p;
    }
    word.reverse();
    word
}

/// `None` iff the language is empty; otherwise a short accepted lasso.
/// Candidates are ranked by total length, then stem, then loop.
pub fn is_empty_with(a: &dyn OmegaAutomaton, limits: &Limits) -> Result<Option<LassoTrace>, AutomataError> {
    let g = explore(a, limits)?;
    let comp = tarjan(g.order.len(), |v| g.succ[v].iter().map(|&(_, w)| w).collect());
    let mut size = vec![0usize; g.order.len()];
    for &c in &comp {
        size[c] += 1;
    }
    let mut best: Option<(usize, Vec<Letter>, Vec<Letter>)> = None;
    for q in 0..g.order.len() {
        if !a.is_accepting(g.order[q]) {
            continue;
        }
        if size[comp[q]] == 1 && !g.succ[q].iter().any(|&(_, w)| w == q) {
            continue;
        }
        let d = g.dist[q];
        if let Some((len, _, _)) = &best {
            if d + 1 > *len {
                continue;
            }
        }
        let Some(cycle) = shortest_cycle(&g, &comp, q) else {
            continue;
        };
        let stem = stem_to(&g, q);
        let cand = (stem.len() + cycle.len(), stem, cycle);
        if best.as_ref().map_or(true, |b| cand < *b) {
            best = Some(cand);
        }
    }
    Ok(best.map(|(_, s, c)| LassoTrace::new(s, c)))
}

pub fn lasso_member(a: &dyn OmegaAutomaton, t: &LassoTrace) -> Result<bool, AutomataError> {
    Ok(lasso_members(a, std::slice::from_ref(&t.stem), &t.cycle)?[0])
}

/// Membership of `u·cycle^ω` for every stem `u`; the product with the loop
/// is built once.
pub fn lasso_members(a: &dyn OmegaAutomaton, stems: &[Vec<Letter>], cycle: &[Letter]) -> Result<Vec<bool>, AutomataError> {
    assert!(!cycle.is_empty(), "empty loop");
    let init: BTreeSet<StateId> = a.initial_states().into_iter().collect();
    let mut starts: Vec<BTreeSet<StateId>> = Vec::with_capacity(stems.len());
    for u in stems {
        let mut cur = init.clone();
        for &l in u {
            let mut next = BTreeSet::new();
            for &s in &cur {
                next.extend(a.successors(s, l)?);
            }
            cur = next;
        }
        starts.push(cur);
    }
    // Nodes (state, position in the loop), numbered in discovery order.
    let n = cycle.len();
    let mut ids: HashMap<(StateId, usize), usize> = HashMap::default();
    let mut nodes: Vec<(StateId, usize)> = Vec::new();
    let mut succ: Vec<Vec<usize>> = Vec::new();
    for &s in starts.iter().flatten() {
        ids.entry((s, 0)).or_insert_with(|| {
            nodes.push((s, 0));
            nodes.len() - 1
        });
    }
    while succ.len() < nodes.len() {
        let (s, i) = nodes[succ.len()];
        let mut out = Vec::new();
        for q in a.successors(s, cycle[i])? {
            let x = (q, (i + 1) % n);
            let id = *ids.entry(x).or_insert_with(|| {
                nodes.push(x);
                nodes.len() - 1
            });
            out.push(id);
        }
        succ.push(out);
    }
    // Backward closure of the accepting nodes that lie on a cycle.
    let cyclic = on_cycle(&succ);
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for (v, ws) in succ.iter().enumerate() {
        for &w in ws {
            pred[w].push(v);
        }
    }
    let mut good = vec![false; nodes.len()];
    let mut stack: Vec<usize> = (0..nodes.len()).filter(|&v| cyclic[v] && a.is_accepting(nodes[v].0)).collect();
    for &v in &stack {
        good[v] = true;
    }
    while let Some(v) = stack.pop() {
        for &u in &pred[v] {
            if !good[u] {
                good[u] = true;
                stack.push(u);
            }
        }
    }
    Ok(starts.iter().map(|ss| ss.iter().any(|&s| good[ids[&(s, 0)]])).collect())
}

/// Nodes lying on some cycle.
fn on_cycle(succ: &[Vec<usize>]) -> Vec<bool> {
    let comp = tarjan(succ.len(), |v| succ[v].clone());
    let mut size = vec![0usize; succ.len()];
    for &c in &comp {
        size[c] += 1;
    }
    (0..succ.len()).map(|v| size[comp[v]] > 1 || succ[v].contains(&v)).collect()
}
