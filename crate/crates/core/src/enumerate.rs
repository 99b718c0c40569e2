//! Graph and spanning-tree enumeration used by the exact oracles and corpora.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::budget::{BudgetExceeded, Meter};
use crate::graph::{Graph, NodeId, Weight};

/// Union-find with undo, for backtracking searches.
#[derive(Clone, Debug)]
pub struct RollbackDsu {
    parent: Vec<usize>,
    size: Vec<usize>,
    history: Vec<Option<(usize, usize)>>,
    components: usize,
}

impl RollbackDsu {
    pub fn new(n: usize) -> Self {
        RollbackDsu {
            parent: (0..n).collect(),
            size: vec![1; n],
            history: Vec::new(),
            components: n,
        }
    }

    pub fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    /// Merges the sets of `a` and `b`; returns false if already merged.
    /// Every call pushes exactly one history entry.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            self.history.push(None);
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.history.push(Some((rb, ra)));
        self.components -= 1;
        true
    }

    pub fn undo(&mut self) {
        if let Some(Some((child, root))) = self.history.pop() {
            self.parent[child] = child;
            self.size[root] -= self.size[child];
            self.components += 1;
        }
    }

    pub fn components(&self) -> usize {
        self.components
    }
}

/// Calls `visit` with the edge positions of every spanning tree of `g`.
/// `visit` returns `false` to stop early.
pub fn for_each_spanning_tree<F>(g: &Graph, meter: &mut Meter, mut visit: F) -> Result<(), BudgetExceeded>
where
    F: FnMut(&[usize]) -> bool,
{
    let n = g.n();
    let mut dsu = RollbackDsu::new(n);
    let mut chosen = Vec::with_capacity(n.saturating_sub(1));
    let mut stop = false;
    spanning_rec(g, 0, &mut dsu, &mut chosen, meter, &mut visit, &mut stop)
}

fn spanning_rec<F>(
    g: &Graph,
    pos: usize,
    dsu: &mut RollbackDsu,
    chosen: &mut Vec<usize>,
    meter: &mut Meter,
    visit: &mut F,
    stop: &mut bool,
) -> Result<(), BudgetExceeded>
where
    F: FnMut(&[usize]) -> bool,
{
    if *stop {
        return Ok(());
    }
    meter.tick()?;
    let need = g.n() - 1;
    if chosen.len() == need {
        if !visit(chosen) {
            *stop = true;
        }
        return Ok(());
    }
    let m = g.edge_count();
    if chosen.len() + (m - pos) < need {
        return Ok(());
    }
    let (a, b) = g.edges()[pos];
    if dsu.union(a, b) {
        chosen.push(pos);
        spanning_rec(g, pos + 1, dsu, chosen, meter, visit, stop)?;
        chosen.pop();
    }
    dsu.undo();
    spanning_rec(g, pos + 1, dsu, chosen, meter, visit, stop)
}

/// All spanning trees as edge-position lists.
pub fn spanning_trees(g: &Graph, meter: &mut Meter) -> Result<Vec<Vec<usize>>, BudgetExceeded> {
    let mut out = Vec::new();
    for_each_spanning_tree(g, meter, |t| {
        out.push(t.to_vec());
        true
    })?;
    Ok(out)
}

/// Adjacency (as index lists) of the subgraph formed by the given edge positions.
pub fn edge_subgraph_adjacency(g: &Graph, edges: &[usize]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); g.n()];
    for &k in edges {
        let (a, b) = g.edges()[k];
        adj[a].push(b);
        adj[b].push(a);
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    adj
}

/// Parent of every node in the tree `adj` rooted at `root` (`None` at the root).
pub fn tree_parents(adj: &[Vec<usize>], root: usize) -> Vec<Option<usize>> {
    let (parent, _) = bfs_tree(adj, root);
    parent
}

/// BFS parents and hop distances from `root` over `adj`. Unreached nodes get
/// distance `usize::MAX`.
pub fn bfs_tree(adj: &[Vec<usize>], root: usize) -> (Vec<Option<usize>>, Vec<usize>) {
    let n = adj.len();
    let mut parent = vec![None; n];
    let mut dist = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    dist[root] = 0;
    queue.push_back(root);
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if dist[w] == usize::MAX {
                dist[w] = dist[u] + 1;
                parent[w] = Some(u);
                queue.push_back(w);
            }
        }
    }
    (parent, dist)
}

/// Full adjacency of `g` as index lists.
pub fn graph_adjacency(g: &Graph) -> Vec<Vec<usize>> {
    (0..g.n()).map(|i| g.neighbors(i).to_vec()).collect()
}

fn pair_bit(n: usize, a: usize, b: usize) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    // Row-major position of (a, b) in the strict upper triangle.
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

fn graph_from_mask(n: usize, mask: u64) -> Option<Graph> {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if mask >> pair_bit(n, a, b) & 1 == 1 {
                edges.push((NodeId(a as u64 + 1), NodeId(b as u64 + 1), None));
            }
        }
    }
    Graph::new((1..=n as u64).map(NodeId), edges).ok()
}

/// Every connected graph on ids `1..=n` (labeled, not up to isomorphism).
/// Intended for `n <= 5`.
pub fn all_connected_graphs(n: usize) -> Vec<Arc<Graph>> {
    assert!((1..=6).contains(&n), "labeled enumeration is limited to n <= 6");
    let pairs = n * (n - 1) / 2;
    (0..1u64 << pairs)
        .filter_map(|mask| graph_from_mask(n, mask))
        .map(Arc::new)
        .collect()
}

fn mask_adjacency(n: usize, mask: u64) -> Vec<u16> {
    let mut rows = vec![0u16; n];
    for a in 0..n {
        for b in a + 1..n {
            if mask >> pair_bit(n, a, b) & 1 == 1 {
                rows[a] |= 1 << b;
                rows[b] |= 1 << a;
            }
        }
    }
    rows
}

fn refine_colors(n: usize, rows: &[u16]) -> Vec<usize> {
    let mut colors: Vec<usize> = rows.iter().map(|r| r.count_ones() as usize).collect();
    loop {
        let sigs: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut ns: Vec<usize> = (0..n)
                    .filter(|&w| rows[v] >> w & 1 == 1)
                    .map(|w| colors[w])
                    .collect();
                ns.sort_unstable();
                (colors[v], ns)
            })
            .collect();
        let distinct: BTreeSet<&(usize, Vec<usize>)> = sigs.iter().collect();
        let ranked: Vec<&(usize, Vec<usize>)> = distinct.into_iter().collect();
        let next: Vec<usize> = sigs
            .iter()
            .map(|s| ranked.binary_search(&s).expect("signature is present"))
            .collect();
        let before = colors.iter().collect::<BTreeSet<_>>().len();
        let after = ranked.len();
        colors = next;
        if after == before {
            return colors;
        }
    }
}

/// Canonical upper-triangle code of a graph on `n <= 11` vertices: the
/// minimum code over vertex orders that sort vertices by refined color.
pub fn canonical_code(n: usize, mask: u64) -> u64 {
    let rows = mask_adjacency(n, mask);
    let colors = refine_colors(n, &rows);
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut distinct: Vec<usize> = colors.clone();
    distinct.sort_unstable();
    distinct.dedup();
    for c in distinct {
        classes.push((0..n).filter(|&v| colors[v] == c).collect());
    }
    let mut best = u64::MAX;
    let mut order = Vec::with_capacity(n);
    let mut used = vec![false; n];
    canon_rec(n, &rows, &classes, 0, &mut order, &mut used, &mut best);
    best
}

fn canon_rec(
    n: usize,
    rows: &[u16],
    classes: &[Vec<usize>],
    class: usize,
    order: &mut Vec<usize>,
    used: &mut [bool],
    best: &mut u64,
) {
    if order.len() == n {
        let mut code = 0u64;
        for a in 0..n {
            for b in a + 1..n {
                if rows[order[a]] >> order[b] & 1 == 1 {
                    code |= 1 << pair_bit(n, a, b);
                }
            }
        }
        *best = (*best).min(code);
        return;
    }
    let members = &classes[class];
    let placed_in_class = members.iter().filter(|&&v| used[v]).count();
    for &v in members {
        if used[v] {
            continue;
        }
        used[v] = true;
        order.push(v);
        let next_class = if placed_in_class + 1 == members.len() {
            class + 1
        } else {
            class
        };
        canon_rec(n, rows, classes, next_class, order, used, best);
        order.pop();
        used[v] = false;
    }
}

/// One representative per isomorphism class of connected graphs on `n`
/// vertices (ids `1..=n`), for `1 <= n <= 8`.
pub fn connected_graph_classes(n: usize) -> Vec<Arc<Graph>> {
    assert!((1..=8).contains(&n), "class enumeration is limited to n <= 8");
    let mut codes: BTreeSet<u64> = BTreeSet::new();
    codes.insert(0);
    for size in 1..n {
        let mut next = BTreeSet::new();
        for &code in &codes {
            let rows = mask_adjacency(size, code);
            for subset in 1u32..1 << size {
                let mut mask = 0u64;
                for (a, row) in rows.iter().enumerate().take(size) {
                    for b in a + 1..size {
                        if row >> b & 1 == 1 {
                            mask |= 1 << pair_bit(size + 1, a, b);
                        }
                    }
                    if subset >> a & 1 == 1 {
                        mask |= 1 << pair_bit(size + 1, a, size);
                    }
                }
                next.insert(canonical_code(size + 1, mask));
            }
        }
        codes = next;
    }
    codes
        .into_iter()
        .map(|c| Arc::new(graph_from_mask(n, c).expect("augmented graphs are connected")))
        .collect()
}

/// Random connected graph on ids `1..=n`: a random tree plus each other pair
/// independently with probability `extra`.
pub fn random_connected_graph<R: Rng>(rng: &mut R, n: usize, extra: f64) -> Graph {
    let mut edges = BTreeSet::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.insert((u, v));
    }
    for a in 0..n {
        for b in a + 1..n {
            if !edges.contains(&(a, b)) && rng.gen_bool(extra) {
                edges.insert((a, b));
            }
        }
    }
    Graph::new(
        (1..=n as u64).map(NodeId),
        edges
            .into_iter()
            .map(|(a, b)| (NodeId(a as u64 + 1), NodeId(b as u64 + 1), None)),
    )
    .expect("a tree plus edges is connected")
}

/// Same topology with a random permutation of `1..=m` as weights.
pub fn with_random_weights<R: Rng>(rng: &mut R, g: &Graph) -> Graph {
    let mut ws: Vec<i64> = (1..=g.edge_count() as i64).collect();
    ws.shuffle(rng);
    reweighted(g, |k| Weight::from_integer(ws[k]))
}

/// Same topology with weights given by edge position.
pub fn reweighted(g: &Graph, weight: impl Fn(usize) -> Weight) -> Graph {
    Graph::new(
        g.ids().iter().copied(),
        g.edges()
            .iter()
            .enumerate()
            .map(|(k, &(a, b))| (g.id(a), g.id(b), Some(weight(k)))),
    )
    .expect("reweighting keeps the graph valid")
}

/// Path `1 - 2 - ... - n`.
pub fn path_graph(n: usize) -> Graph {
    Graph::new(
        (1..=n as u64).map(NodeId),
        (1..n as u64).map(|i| (NodeId(i), NodeId(i + 1), None)),
    )
    .expect("paths are connected")
}

/// Cycle `1 - 2 - ... - n - 1`, `n >= 3`.
pub fn cycle_graph(n: usize) -> Graph {
    circulant_graph(n, &[1], 1).expect("cycles on three or more nodes exist")
}

/// Circulant graph on ids `first..first+m` where node `i` is adjacent to
/// `i ± s (mod m)` for every offset `s`.
pub fn circulant_graph(m: usize, offsets: &[usize], first: u64) -> Option<Graph> {
    let mut edges = BTreeSet::new();
    for i in 0..m {
        for &s in offsets {
            if s == 0 || s >= m {
                return None;
            }
            let j = (i + s) % m;
            let e = if i < j { (i, j) } else { (j, i) };
            edges.insert(e);
        }
    }
    Graph::new(
        (0..m as u64).map(|i| NodeId(first + i)),
        edges
            .into_iter()
            .map(|(a, b)| (NodeId(first + a as u64), NodeId(first + b as u64), None)),
    )
    .ok()
}

/// Offsets of a `d`-regular circulant on `m` nodes, if one exists.
pub fn regular_offsets(d: usize, m: usize) -> Option<Vec<usize>> {
    if d == 0 || m <= d || !(d * m).is_multiple_of(2) {
        return None;
    }
    let mut offsets: Vec<usize> = (1..=d / 2).collect();
    if d % 2 == 1 {
        offsets.push(m / 2);
    }
    Some(offsets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::Budget;

    #[test]
    fn counts_connected_labeled_graphs() {
        let counts: Vec<usize> = (1..=5).map(|n| all_connected_graphs(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 4, 38, 728]);
    }

    #[test]
    fn counts_connected_classes() {
        let counts: Vec<usize> = (1..=7).map(|n| connected_graph_classes(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 6, 21, 112, 853]);
    }

    #[test]
    fn canonical_code_is_relabeling_invariant() {
        // Paw graph under two labelings.
        let a = 1 << pair_bit(4, 0, 1) | 1 << pair_bit(4, 1, 2) | 1 << pair_bit(4, 0, 2) | 1 << pair_bit(4, 2, 3);
        let b = 1 << pair_bit(4, 3, 1) | 1 << pair_bit(4, 1, 0) | 1 << pair_bit(4, 3, 0) | 1 << pair_bit(4, 0, 2);
        assert_eq!(canonical_code(4, a), canonical_code(4, b));
    }

    #[test]
    fn cayley_counts_for_complete_graphs() {
        for n in 1..=6 {
            let g = graph_from_mask(n, (1u64 << (n * (n - 1) / 2)) - 1).unwrap();
            let trees = spanning_trees(&g, &mut Budget::unlimited().meter()).unwrap();
            assert_eq!(trees.len() as u64, (n as u64).pow(n.saturating_sub(2) as u32));
        }
    }

    #[test]
    fn circulants_are_regular() {
        for (d, m) in [(2, 20), (3, 20), (3, 6), (4, 9)] {
            let offs = regular_offsets(d, m).unwrap();
            let g = circulant_graph(m, &offs, 1).unwrap();
            assert!((0..m).all(|i| g.degree(i) == d), "d={d} m={m}");
        }
        assert!(regular_offsets(3, 7).is_none());
        assert!(regular_offsets(4, 4).is_none());
    }

    #[test]
    fn dsu_undo_restores_components() {
        let mut d = RollbackDsu::new(4);
        assert!(d.union(0, 1));
        assert!(!d.union(1, 0));
        assert!(d.union(2, 3));
        assert_eq!(d.components(), 2);
        d.undo();
        d.undo();
        assert_eq!(d.components(), 3);
        d.undo();
        assert_eq!(d.components(), 4);
    }
}
