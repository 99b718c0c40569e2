//! Membership deciders and exact edit distance for the six languages.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::budget::{Budget, BudgetExceeded, Meter};
use crate::enumerate::{edge_subgraph_adjacency, for_each_spanning_tree, tree_parents, RollbackDsu};
use crate::graph::{Graph, Label, LabelKind, LabeledGraph, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LanguageId {
    #[serde(rename = "ACYCLIC")]
    Acyclic,
    #[serde(rename = "LEADER")]
    Leader,
    #[serde(rename = "ST_P")]
    StP,
    #[serde(rename = "ST_L")]
    StL,
    #[serde(rename = "MST_L")]
    MstL,
    #[serde(rename = "REGULAR")]
    Regular,
}

impl LanguageId {
    pub const ALL: [LanguageId; 6] = [
        LanguageId::Acyclic,
        LanguageId::Leader,
        LanguageId::StP,
        LanguageId::StL,
        LanguageId::MstL,
        LanguageId::Regular,
    ];

    pub fn label_kind(self) -> LabelKind {
        match self {
            LanguageId::Acyclic | LanguageId::StP => LabelKind::Pointer,
            LanguageId::StL | LanguageId::MstL | LanguageId::Regular => LabelKind::Adjlist,
            LanguageId::Leader => LabelKind::Bool,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LanguageId::Acyclic => "ACYCLIC",
            LanguageId::Leader => "LEADER",
            LanguageId::StP => "ST_P",
            LanguageId::StL => "ST_L",
            LanguageId::MstL => "MST_L",
            LanguageId::Regular => "REGULAR",
        }
    }
}

impl fmt::Display for LanguageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LanguageId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        LanguageId::ALL
            .into_iter()
            .find(|l| l.name() == norm)
            .ok_or_else(|| format!("unknown language {s:?}"))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LanguageError {
    #[error("{lang} expects {expected} labels, instance has {found} labels")]
    KindMismatch {
        lang: LanguageId,
        expected: LabelKind,
        found: LabelKind,
    },
    #[error("MST_L needs a weighted graph")]
    MissingWeights,
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

fn check_kind(lang: LanguageId, inst: &LabeledGraph) -> Result<(), LanguageError> {
    let expected = lang.label_kind();
    if inst.kind() != expected {
        return Err(LanguageError::KindMismatch {
            lang,
            expected,
            found: inst.kind(),
        });
    }
    if lang == LanguageId::MstL && inst.graph().edge_count() > 0 && !inst.graph().is_weighted() {
        return Err(LanguageError::MissingWeights);
    }
    Ok(())
}

/// Pointer target as a neighbor index: `Some(None)` for null, `Some(Some(j))`
/// for a neighbor, `None` if the label is not a well-formed pointer.
pub fn pointer_target(g: &Graph, i: usize, label: &Label) -> Option<Option<usize>> {
    match label {
        Label::Pointer(None) => Some(None),
        Label::Pointer(Some(t)) => {
            let j = g.index_of(*t)?;
            g.has_edge(i, j).then_some(Some(j))
        }
        _ => None,
    }
}

/// Neighbor indices listed by an adjlist label, if every entry is a neighbor.
pub fn adjlist_targets(g: &Graph, i: usize, label: &Label) -> Option<Vec<usize>> {
    let set = label.as_adjlist()?;
    let mut out = Vec::with_capacity(set.len());
    for id in set {
        let j = g.index_of(*id)?;
        if !g.has_edge(i, j) {
            return None;
        }
        out.push(j);
    }
    out.sort_unstable();
    Some(out)
}

/// Symmetric, well-formed adjlist labeling as an edge-position list.
fn symmetric_edges(inst: &LabeledGraph) -> Option<Vec<usize>> {
    let g = inst.graph();
    let lists: Vec<Vec<usize>> = (0..g.n())
        .map(|i| adjlist_targets(g, i, inst.label(i)))
        .collect::<Option<_>>()?;
    let mut edges = Vec::new();
    for (i, list) in lists.iter().enumerate() {
        for &j in list {
            if lists[j].binary_search(&i).is_err() {
                return None;
            }
            if i < j {
                edges.push(g.edge_position(i, j).expect("targets are neighbors"));
            }
        }
    }
    edges.sort_unstable();
    Some(edges)
}

fn is_spanning_tree(g: &Graph, edges: &[usize]) -> bool {
    if edges.len() + 1 != g.n() {
        return false;
    }
    let mut dsu = RollbackDsu::new(g.n());
    edges.iter().all(|&k| {
        let (a, b) = g.edges()[k];
        dsu.union(a, b)
    })
}

/// True iff the tree is minimum: every non-tree edge is heavier than every
/// tree edge on the cycle it closes.
fn satisfies_cycle_property(g: &Graph, tree: &[usize]) -> bool {
    let adj = edge_subgraph_adjacency(g, tree);
    let in_tree: std::collections::HashSet<usize> = tree.iter().copied().collect();
    for (k, &(a, b)) in g.edges().iter().enumerate() {
        if in_tree.contains(&k) {
            continue;
        }
        let parents = tree_parents(&adj, a);
        let w = g.weight_of_edge(k).expect("weighted");
        let mut v = b;
        while let Some(p) = parents[v] {
            if g.weight(v, p).expect("weighted") > w {
                return false;
            }
            v = p;
        }
    }
    true
}

fn pointer_targets(inst: &LabeledGraph) -> Option<Vec<Option<usize>>> {
    let g = inst.graph();
    (0..g.n())
        .map(|i| pointer_target(g, i, inst.label(i)))
        .collect()
}

fn has_pointer_cycle(ptr: &[Option<usize>]) -> bool {
    let n = ptr.len();
    // 0 = unvisited, 1 = on current walk, 2 = done
    let mut state = vec![0u8; n];
    for start in 0..n {
        let mut walk = Vec::new();
        let mut v = start;
        loop {
            match state[v] {
                1 => return true,
                2 => break,
                _ => {}
            }
            state[v] = 1;
            walk.push(v);
            match ptr[v] {
                Some(p) => v = p,
                None => break,
            }
        }
        for w in walk {
            state[w] = 2;
        }
    }
    false
}

pub fn decide_membership(lang: LanguageId, inst: &LabeledGraph) -> Result<bool, LanguageError> {
    check_kind(lang, inst)?;
    let g = inst.graph();
    Ok(match lang {
        LanguageId::Leader => {
            let mut leaders = 0;
            for l in inst.labels() {
                match l.as_bool() {
                    Some(true) => leaders += 1,
                    Some(false) => {}
                    None => return Ok(false),
                }
            }
            leaders == 1
        }
        LanguageId::Acyclic => match pointer_targets(inst) {
            Some(ptr) => !has_pointer_cycle(&ptr),
            None => false,
        },
        LanguageId::StP => match pointer_targets(inst) {
            Some(ptr) => ptr.iter().filter(|p| p.is_none()).count() == 1 && !has_pointer_cycle(&ptr),
            None => false,
        },
        LanguageId::StL => symmetric_edges(inst).is_some_and(|e| is_spanning_tree(g, &e)),
        LanguageId::MstL => symmetric_edges(inst)
            .is_some_and(|e| is_spanning_tree(g, &e) && satisfies_cycle_property(g, &e)),
        LanguageId::Regular => match symmetric_edges(inst) {
            Some(_) => {
                let degrees: Vec<usize> = inst
                    .labels()
                    .iter()
                    .map(|l| l.as_adjlist().map_or(0, |s| s.len()))
                    .collect();
                degrees.windows(2).all(|w| w[0] == w[1])
            }
            None => false,
        },
    })
}

/// Exact distance from `inst` to the language, together with one nearest
/// legal labeling.
pub fn nearest_member(
    lang: LanguageId,
    inst: &LabeledGraph,
    budget: Budget,
) -> Result<(usize, Vec<Label>), LanguageError> {
    check_kind(lang, inst)?;
    let mut meter = budget.meter();
    match lang {
        LanguageId::Leader => Ok(leader_nearest(inst)),
        LanguageId::Acyclic => acyclic_nearest(inst, &mut meter),
        LanguageId::StL => {
            let (d, tree) = st_l_nearest(inst, &mut meter)?;
            Ok((d, adjlist_labels(inst.graph(), &tree)))
        }
        LanguageId::StP => stp_nearest(inst, &mut meter),
        LanguageId::MstL => {
            let tree = minimum_spanning_tree_by_enumeration(inst.graph(), &mut meter)?;
            let labels = adjlist_labels(inst.graph(), &tree);
            Ok((crate::graph::label_diff(inst.labels(), &labels), labels))
        }
        LanguageId::Regular => regular_nearest(inst, &mut meter),
    }
}

pub fn edit_distance_to_language(
    lang: LanguageId,
    inst: &LabeledGraph,
    budget: Budget,
) -> Result<usize, LanguageError> {
    nearest_member(lang, inst, budget).map(|(d, _)| d)
}

/// Adjlist labeling of the subgraph with the given edge positions.
pub fn adjlist_labels(g: &Graph, edges: &[usize]) -> Vec<Label> {
    edge_subgraph_adjacency(g, edges)
        .into_iter()
        .map(|list| Label::AdjList(list.into_iter().map(|j| g.id(j)).collect()))
        .collect()
}

/// Pointer labeling of a tree (given as edge positions) rooted at `root`.
pub fn pointer_labels(g: &Graph, edges: &[usize], root: usize) -> Vec<Label> {
    let adj = edge_subgraph_adjacency(g, edges);
    tree_parents(&adj, root)
        .into_iter()
        .map(|p| Label::Pointer(p.map(|j| g.id(j))))
        .collect()
}

fn leader_nearest(inst: &LabeledGraph) -> (usize, Vec<Label>) {
    let mut leaders = Vec::new();
    let mut ill = Vec::new();
    for (i, l) in inst.labels().iter().enumerate() {
        match l.as_bool() {
            Some(true) => leaders.push(i),
            Some(false) => {}
            None => ill.push(i),
        }
    }
    let keep = leaders.first().or(ill.first()).copied().unwrap_or(0);
    let target: Vec<Label> = (0..inst.n()).map(|i| Label::Bool(i == keep)).collect();
    // Keep one leader and clear the rest; with no leader, an ill-formed node
    // (which must change anyway) is promoted for free.
    let m = leaders.len();
    let b = ill.len();
    let d = b + if m == 0 { usize::from(b == 0) } else { m - 1 };
    debug_assert_eq!(d, crate::graph::label_diff(inst.labels(), &target));
    (d, target)
}

struct AcyclicSearch<'a> {
    ptr: &'a [Option<Option<usize>>],
    cycle_of: Vec<Option<usize>>,
    cycle_cut: Vec<bool>,
    cycles: usize,
    order: Vec<usize>,
    best: usize,
    best_cut: Vec<bool>,
}

impl AcyclicSearch<'_> {
    /// `cut[v]` means node `v` gets the null pointer.
    fn rec(&mut self, pos: usize, cost: usize, open_cycles: usize, cut: &mut Vec<bool>, meter: &mut Meter) -> Result<(), BudgetExceeded> {
        meter.tick()?;
        if cost + open_cycles >= self.best {
            return Ok(());
        }
        if pos == self.order.len() {
            self.best = cost;
            self.best_cut = cut.clone();
            return Ok(());
        }
        let v = self.order[pos];
        let cyc = self.cycle_of[v];
        let remaining_on_cycle = |s: &Self, c: usize| (pos + 1..s.order.len()).any(|q| s.cycle_of[s.order[q]] == Some(c));
        // Keep the current pointer.
        let closes = cyc.is_some_and(|c| !self.cycle_cut[c] && !remaining_on_cycle(self, c));
        if !closes {
            self.rec(pos + 1, cost, open_cycles, cut, meter)?;
        }
        // Replace it by null.
        cut[v] = true;
        match cyc {
            Some(c) if !self.cycle_cut[c] => {
                self.cycle_cut[c] = true;
                self.rec(pos + 1, cost + 1, open_cycles - 1, cut, meter)?;
                self.cycle_cut[c] = false;
            }
            _ => self.rec(pos + 1, cost + 1, open_cycles, cut, meter)?,
        }
        cut[v] = false;
        Ok(())
    }
}

/// Per-node enumeration with branch and bound. A changed label can always be
/// taken to be null: that costs the same as any other change and never closes
/// a cycle, so each node only branches on keep / null.
fn acyclic_nearest(inst: &LabeledGraph, meter: &mut Meter) -> Result<(usize, Vec<Label>), LanguageError> {
    let g = inst.graph();
    let n = g.n();
    let ptr: Vec<Option<Option<usize>>> = (0..n).map(|i| pointer_target(g, i, inst.label(i))).collect();
    let forced: Vec<usize> = (0..n).filter(|&i| ptr[i].is_none()).collect();
    let free: Vec<usize> = (0..n).filter(|&i| matches!(ptr[i], Some(Some(_)))).collect();

    // Directed cycles among well-formed pointers.
    let succ: Vec<Option<usize>> = ptr.iter().map(|p| p.flatten()).collect();
    let mut cycle_of = vec![None; n];
    let mut cycles = 0;
    let mut state = vec![0u8; n];
    for start in 0..n {
        let mut walk = Vec::new();
        let mut v = start;
        while state[v] == 0 {
            state[v] = 1;
            walk.push(v);
            match succ[v] {
                Some(p) => v = p,
                None => break,
            }
        }
        if state[v] == 1 && succ[v].is_some() && walk.contains(&v) {
            let mut w = v;
            loop {
                cycle_of[w] = Some(cycles);
                w = succ[w].expect("on a cycle");
                if w == v {
                    break;
                }
            }
            cycles += 1;
        }
        for w in walk {
            state[w] = 2;
        }
    }

    let mut search = AcyclicSearch {
        ptr: &ptr,
        cycle_of,
        cycle_cut: vec![false; cycles],
        cycles,
        order: free,
        best: usize::MAX,
        best_cut: vec![false; n],
    };
    let mut cut = vec![false; n];
    let open = search.cycles;
    search.rec(0, 0, open, &mut cut, meter)?;
    let _ = search.ptr;
    let labels: Vec<Label> = (0..n)
        .map(|i| {
            if search.best_cut[i] || forced.contains(&i) {
                Label::Pointer(None)
            } else {
                inst.label(i).clone()
            }
        })
        .collect();
    Ok((search.best + forced.len(), labels))
}

/// Per-node mismatch tracking for edge-subset searches over adjlist labels.
struct EdgeSearch<'a> {
    g: &'a Graph,
    /// Wanted neighbor set per node; `None` if the label is ill-formed and the
    /// node must change whatever happens.
    wanted: Vec<Option<Vec<bool>>>,
    mismatch: Vec<u32>,
    cost: usize,
}

impl<'a> EdgeSearch<'a> {
    fn new(inst: &'a LabeledGraph) -> Self {
        let g = inst.graph();
        let n = g.n();
        let wanted: Vec<Option<Vec<bool>>> = (0..n)
            .map(|i| {
                adjlist_targets(g, i, inst.label(i)).map(|t| {
                    let mut row = vec![false; n];
                    for j in t {
                        row[j] = true;
                    }
                    row
                })
            })
            .collect();
        let cost = wanted.iter().filter(|w| w.is_none()).count();
        EdgeSearch {
            g,
            mismatch: vec![0; n],
            wanted,
            cost,
        }
    }

    /// Records the decision for edge `k`; returns the undo token.
    fn decide(&mut self, k: usize, included: bool) -> [bool; 2] {
        let (a, b) = self.g.edges()[k];
        let mut changed = [false; 2];
        for (slot, (x, y)) in [(a, b), (b, a)].into_iter().enumerate() {
            if let Some(row) = &self.wanted[x] {
                if row[y] != included {
                    if self.mismatch[x] == 0 {
                        self.cost += 1;
                    }
                    self.mismatch[x] += 1;
                    changed[slot] = true;
                }
            }
        }
        changed
    }

    fn undo(&mut self, k: usize, token: [bool; 2]) {
        let (a, b) = self.g.edges()[k];
        for (slot, x) in [a, b].into_iter().enumerate() {
            if token[slot] {
                self.mismatch[x] -= 1;
                if self.mismatch[x] == 0 {
                    self.cost -= 1;
                }
            }
        }
    }
}

/// Spanning-tree enumeration with branch and bound on the number of nodes
/// whose adjlist already disagrees with the partial tree.
pub(crate) fn st_l_nearest(inst: &LabeledGraph, meter: &mut Meter) -> Result<(usize, Vec<usize>), BudgetExceeded> {
    struct Ctx<'a> {
        s: EdgeSearch<'a>,
        dsu: RollbackDsu,
        chosen: Vec<usize>,
        best: usize,
        best_tree: Vec<usize>,
    }
    fn rec(c: &mut Ctx<'_>, pos: usize, meter: &mut Meter) -> Result<(), BudgetExceeded> {
        meter.tick()?;
        if c.s.cost >= c.best {
            return Ok(());
        }
        let g = c.s.g;
        let need = g.n() - 1;
        let m = g.edge_count();
        if c.chosen.len() + (m - pos) < need {
            return Ok(());
        }
        if pos == m {
            c.best = c.s.cost;
            c.best_tree = c.chosen.clone();
            return Ok(());
        }
        let (a, b) = g.edges()[pos];
        if c.chosen.len() < need {
            if c.dsu.union(a, b) {
                let t = c.s.decide(pos, true);
                c.chosen.push(pos);
                rec(c, pos + 1, meter)?;
                c.chosen.pop();
                c.s.undo(pos, t);
            }
            c.dsu.undo();
        }
        let t = c.s.decide(pos, false);
        rec(c, pos + 1, meter)?;
        c.s.undo(pos, t);
        Ok(())
    }
    let mut c = Ctx {
        s: EdgeSearch::new(inst),
        dsu: RollbackDsu::new(inst.n()),
        chosen: Vec::new(),
        best: usize::MAX,
        best_tree: Vec::new(),
    };
    rec(&mut c, 0, meter)?;
    Ok((c.best, c.best_tree))
}

/// Spanning trees times root choices.
fn stp_nearest(inst: &LabeledGraph, meter: &mut Meter) -> Result<(usize, Vec<Label>), LanguageError> {
    let g = inst.graph();
    let n = g.n();
    let ptr: Vec<Option<Option<usize>>> = (0..n).map(|i| pointer_target(g, i, inst.label(i))).collect();
    let mut best = (usize::MAX, Vec::new(), 0usize);
    for_each_spanning_tree(g, meter, |tree| {
        let adj = edge_subgraph_adjacency(g, tree);
        for root in 0..n {
            let parents = tree_parents(&adj, root);
            let d = (0..n).filter(|&v| ptr[v] != Some(parents[v])).count();
            if d < best.0 {
                best = (d, tree.to_vec(), root);
            }
        }
        best.0 > 0
    })?;
    let labels = pointer_labels(g, &best.1, best.2);
    Ok((best.0, labels))
}

/// Minimum spanning tree found by enumerating all spanning trees.
pub fn minimum_spanning_tree_by_enumeration(g: &Graph, meter: &mut Meter) -> Result<Vec<usize>, LanguageError> {
    if g.edge_count() > 0 && !g.is_weighted() {
        return Err(LanguageError::MissingWeights);
    }
    let mut best: Option<(Weight, Vec<usize>)> = None;
    for_each_spanning_tree(g, meter, |tree| {
        let total: Weight = tree.iter().map(|&k| *g.weight_of_edge(k).expect("weighted")).sum();
        if best.as_ref().is_none_or(|(w, _)| total < *w) {
            best = Some((total, tree.to_vec()));
        }
        true
    })?;
    Ok(best.expect("connected graphs have a spanning tree").1)
}

/// Per target degree, edge-subset enumeration with degree feasibility and
/// mismatch bounds. Legal labelings are symmetric, so they are exactly the
/// regular spanning subgraphs.
fn regular_nearest(inst: &LabeledGraph, meter: &mut Meter) -> Result<(usize, Vec<Label>), LanguageError> {
    struct Ctx<'a> {
        s: EdgeSearch<'a>,
        r: usize,
        deg: Vec<usize>,
        left: Vec<usize>,
        chosen: Vec<usize>,
        best: usize,
        best_edges: Vec<usize>,
    }
    fn rec(c: &mut Ctx<'_>, pos: usize, meter: &mut Meter) -> Result<(), BudgetExceeded> {
        meter.tick()?;
        if c.s.cost >= c.best {
            return Ok(());
        }
        let g = c.s.g;
        if pos == g.edge_count() {
            if c.deg.iter().all(|&d| d == c.r) {
                c.best = c.s.cost;
                c.best_edges = c.chosen.clone();
            }
            return Ok(());
        }
        let (a, b) = g.edges()[pos];
        c.left[a] -= 1;
        c.left[b] -= 1;
        if c.deg[a] < c.r && c.deg[b] < c.r {
            c.deg[a] += 1;
            c.deg[b] += 1;
            let t = c.s.decide(pos, true);
            c.chosen.push(pos);
            rec(c, pos + 1, meter)?;
            c.chosen.pop();
            c.s.undo(pos, t);
            c.deg[a] -= 1;
            c.deg[b] -= 1;
        }
        if c.deg[a] + c.left[a] >= c.r && c.deg[b] + c.left[b] >= c.r {
            let t = c.s.decide(pos, false);
            rec(c, pos + 1, meter)?;
            c.s.undo(pos, t);
        }
        c.left[a] += 1;
        c.left[b] += 1;
        Ok(())
    }
    let g = inst.graph();
    let n = g.n();
    let mut best = usize::MAX;
    let mut best_edges = Vec::new();
    // Targets ordered by how many labels already have that size.
    let sizes: Vec<Option<usize>> = (0..n)
        .map(|i| adjlist_targets(g, i, inst.label(i)).map(|t| t.len()))
        .collect();
    let mut targets: Vec<(usize, usize)> = (0..=g.max_degree())
        .map(|r| (sizes.iter().filter(|s| **s != Some(r)).count(), r))
        .collect();
    targets.sort_unstable();
    for (lower, r) in targets {
        if lower >= best {
            continue;
        }
        let mut c = Ctx {
            s: EdgeSearch::new(inst),
            r,
            deg: vec![0; n],
            left: (0..n).map(|i| g.degree(i)).collect(),
            chosen: Vec::new(),
            best,
            best_edges: Vec::new(),
        };
        rec(&mut c, 0, meter)?;
        if c.best < best {
            best = c.best;
            best_edges = c.best_edges;
        }
    }
    Ok((best, adjlist_labels(g, &best_edges)))
}

/// Lower bound on the distance to REGULAR: for every target degree, each node
/// whose label is ill-formed or has a different size must change.
pub fn regular_degree_lower_bound(inst: &LabeledGraph) -> usize {
    let g = inst.graph();
    let sizes: Vec<Option<usize>> = (0..g.n())
        .map(|i| adjlist_targets(g, i, inst.label(i)).map(|t| t.len()))
        .collect();
    (0..=g.max_degree())
        .map(|r| sizes.iter().filter(|s| **s != Some(r)).count())
        .min()
        .unwrap_or(0)
}

/// Every legal labeling of the language on `g`.
pub fn enumerate_members(lang: LanguageId, g: &std::sync::Arc<Graph>, budget: Budget) -> Result<Vec<Vec<Label>>, LanguageError> {
    let mut meter = budget.meter();
    let n = g.n();
    let mut out = Vec::new();
    match lang {
        LanguageId::Leader => {
            for leader in 0..n {
                out.push((0..n).map(|i| Label::Bool(i == leader)).collect());
            }
        }
        LanguageId::Acyclic => {
            let mut ptr: Vec<Option<usize>> = vec![None; n];
            acyclic_members(g, 0, &mut ptr, &mut out, &mut meter)?;
        }
        LanguageId::StP => {
            for_each_spanning_tree(g, &mut meter, |tree| {
                for root in 0..n {
                    out.push(pointer_labels(g, tree, root));
                }
                true
            })?;
        }
        LanguageId::StL => {
            for_each_spanning_tree(g, &mut meter, |tree| {
                out.push(adjlist_labels(g, tree));
                true
            })?;
        }
        LanguageId::MstL => {
            let tree = minimum_spanning_tree_by_enumeration(g, &mut meter)?;
            out.push(adjlist_labels(g, &tree));
        }
        LanguageId::Regular => {
            for r in 0..=g.max_degree() {
                let mut deg = vec![0; n];
                let mut left: Vec<usize> = (0..n).map(|i| g.degree(i)).collect();
                let mut chosen = Vec::new();
                regular_members(g, r, 0, &mut deg, &mut left, &mut chosen, &mut out, &mut meter)?;
            }
        }
    }
    Ok(out)
}

fn acyclic_members(
    g: &Graph,
    v: usize,
    ptr: &mut Vec<Option<usize>>,
    out: &mut Vec<Vec<Label>>,
    meter: &mut Meter,
) -> Result<(), BudgetExceeded> {
    meter.tick()?;
    let n = g.n();
    if v == n {
        out.push(ptr.iter().map(|p| Label::Pointer(p.map(|j| g.id(j)))).collect());
        return Ok(());
    }
    let options: Vec<Option<usize>> = std::iter::once(None)
        .chain(g.neighbors(v).iter().map(|&j| Some(j)))
        .collect();
    for opt in options {
        ptr[v] = opt;
        // Only walks through already-assigned nodes can close a cycle at v.
        let mut closes = false;
        let mut w = opt;
        let mut steps = 0;
        while let Some(x) = w {
            if x == v {
                closes = true;
                break;
            }
            if x > v || steps > n {
                break;
            }
            w = ptr[x];
            steps += 1;
        }
        if !closes {
            acyclic_members(g, v + 1, ptr, out, meter)?;
        }
    }
    ptr[v] = None;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn regular_members(
    g: &Graph,
    r: usize,
    pos: usize,
    deg: &mut Vec<usize>,
    left: &mut Vec<usize>,
    chosen: &mut Vec<usize>,
    out: &mut Vec<Vec<Label>>,
    meter: &mut Meter,
) -> Result<(), BudgetExceeded> {
    meter.tick()?;
    if pos == g.edge_count() {
        if deg.iter().all(|&d| d == r) {
            out.push(adjlist_labels(g, chosen));
        }
        return Ok(());
    }
    let (a, b) = g.edges()[pos];
    left[a] -= 1;
    left[b] -= 1;
    if deg[a] < r && deg[b] < r {
        deg[a] += 1;
        deg[b] += 1;
        chosen.push(pos);
        regular_members(g, r, pos + 1, deg, left, chosen, out, meter)?;
        chosen.pop();
        deg[a] -= 1;
        deg[b] -= 1;
    }
    if deg[a] + left[a] >= r && deg[b] + left[b] >= r {
        regular_members(g, r, pos + 1, deg, left, chosen, out, meter)?;
    }
    left[a] += 1;
    left[b] += 1;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeId;
    use std::sync::Arc;

    fn inst(g: Graph, kind: LabelKind, labels: Vec<Label>) -> LabeledGraph {
        LabeledGraph::new(Arc::new(g), kind, labels).unwrap()
    }

    fn ptr(p: Option<u64>) -> Label {
        Label::Pointer(p.map(NodeId))
    }

    fn triangle() -> Graph {
        Graph::from_edges(&[1, 2, 3], &[(1, 2), (2, 3), (1, 3)]).unwrap()
    }

    #[test]
    fn leader_examples() {
        let g = Graph::from_edges(&[1, 2, 3, 4, 5], &[(1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        let mut labels = vec![Label::Bool(false); 5];
        labels[2] = Label::Bool(true);
        let x = inst(g.clone(), LabelKind::Bool, labels);
        assert!(decide_membership(LanguageId::Leader, &x).unwrap());
        let zeros = inst(g.clone(), LabelKind::Bool, vec![Label::Bool(false); 5]);
        assert_eq!(edit_distance_to_language(LanguageId::Leader, &zeros, Budget::default()).unwrap(), 1);
        let ones = inst(g, LabelKind::Bool, vec![Label::Bool(true); 5]);
        assert_eq!(edit_distance_to_language(LanguageId::Leader, &ones, Budget::default()).unwrap(), 4);
    }

    #[test]
    fn ill_formed_leader_labels_are_promoted() {
        let g = Arc::new(crate::enumerate::path_graph(4));
        let x = LabeledGraph::new(
            g,
            LabelKind::Bool,
            vec![Label::Raw(vec![1]), Label::Bool(false), Label::Raw(vec![]), Label::Bool(false)],
        )
        .unwrap();
        assert!(!decide_membership(LanguageId::Leader, &x).unwrap());
        assert_eq!(edit_distance_to_language(LanguageId::Leader, &x, Budget::default()).unwrap(), 2);
    }

    #[test]
    fn stp_path_member() {
        let g = crate::enumerate::path_graph(4);
        let x = inst(g, LabelKind::Pointer, vec![ptr(Some(2)), ptr(Some(3)), ptr(Some(4)), ptr(None)]);
        assert!(decide_membership(LanguageId::StP, &x).unwrap());
        assert!(decide_membership(LanguageId::Acyclic, &x).unwrap());
    }

    #[test]
    fn mutual_pointers_form_a_cycle() {
        let g = crate::enumerate::path_graph(2);
        let x = inst(g, LabelKind::Pointer, vec![ptr(Some(2)), ptr(Some(1))]);
        assert!(!decide_membership(LanguageId::Acyclic, &x).unwrap());
        assert!(!decide_membership(LanguageId::StP, &x).unwrap());
        assert_eq!(edit_distance_to_language(LanguageId::Acyclic, &x, Budget::default()).unwrap(), 1);
    }

    #[test]
    fn mst_triangle() {
        let g = Graph::from_weighted_edges(&[1, 2, 3], &[(1, 2, 1), (2, 3, 2), (1, 3, 3)]).unwrap();
        let good = inst(
            g.clone(),
            LabelKind::Adjlist,
            vec![Label::adjlist([2]), Label::adjlist([1, 3]), Label::adjlist([2])],
        );
        let bad = inst(
            g,
            LabelKind::Adjlist,
            vec![Label::adjlist([2, 3]), Label::adjlist([1]), Label::adjlist([1])],
        );
        assert!(decide_membership(LanguageId::MstL, &good).unwrap());
        assert!(!decide_membership(LanguageId::MstL, &bad).unwrap());
        assert!(decide_membership(LanguageId::StL, &bad).unwrap());
        // Every node's list differs from the true tree's.
        assert_eq!(edit_distance_to_language(LanguageId::MstL, &bad, Budget::default()).unwrap(), 3);
    }

    #[test]
    fn mst_needs_weights() {
        let x = inst(triangle(), LabelKind::Adjlist, vec![Label::adjlist([]); 3]);
        assert_eq!(decide_membership(LanguageId::MstL, &x), Err(LanguageError::MissingWeights));
    }

    #[test]
    fn kind_mismatch_is_an_error() {
        let x = inst(triangle(), LabelKind::Bool, vec![Label::Bool(true); 3]);
        assert!(matches!(
            decide_membership(LanguageId::StL, &x),
            Err(LanguageError::KindMismatch { .. })
        ));
    }

    #[test]
    fn full_triangle_is_two_from_a_tree() {
        let x = inst(
            triangle(),
            LabelKind::Adjlist,
            vec![Label::adjlist([2, 3]), Label::adjlist([1, 3]), Label::adjlist([1, 2])],
        );
        assert!(!decide_membership(LanguageId::StL, &x).unwrap());
        assert_eq!(edit_distance_to_language(LanguageId::StL, &x, Budget::default()).unwrap(), 2);
        assert!(decide_membership(LanguageId::Regular, &x).unwrap());
    }

    #[test]
    fn asymmetric_lists_are_not_members() {
        let x = inst(
            triangle(),
            LabelKind::Adjlist,
            vec![Label::adjlist([2]), Label::adjlist([3]), Label::adjlist([2])],
        );
        assert!(!decide_membership(LanguageId::StL, &x).unwrap());
        assert!(!decide_membership(LanguageId::Regular, &x).unwrap());
    }

    #[test]
    fn budget_is_enforced() {
        let g = crate::enumerate::circulant_graph(9, &[1, 2, 3, 4], 1).unwrap();
        let x = inst(g, LabelKind::Adjlist, vec![Label::adjlist([]); 9]);
        assert!(matches!(
            edit_distance_to_language(LanguageId::StL, &x, Budget::new(10)),
            Err(LanguageError::Budget(_))
        ));
    }

    #[test]
    fn member_counts() {
        let k4 = Arc::new(crate::enumerate::circulant_graph(4, &[1, 2], 1).unwrap());
        let b = Budget::default();
        // Rooted spanning forests of K4: (n+1)^(n-1).
        assert_eq!(enumerate_members(LanguageId::Acyclic, &k4, b).unwrap().len(), 125);
        assert_eq!(enumerate_members(LanguageId::StL, &k4, b).unwrap().len(), 16);
        assert_eq!(enumerate_members(LanguageId::StP, &k4, b).unwrap().len(), 64);
        assert_eq!(enumerate_members(LanguageId::Leader, &k4, b).unwrap().len(), 4);
        // 0-factor, 3 perfect matchings, 3 Hamiltonian cycles, K4 itself.
        assert_eq!(enumerate_members(LanguageId::Regular, &k4, b).unwrap().len(), 8);
    }

    #[test]
    fn nearest_members_agree_with_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for round in 0..120 {
            let n = rng.gen_range(2..=6);
            let base = crate::enumerate::random_connected_graph(&mut rng, n, 0.4);
            let g = Arc::new(crate::enumerate::with_random_weights(&mut rng, &base));
            for lang in LanguageId::ALL {
                let labels: Vec<Label> = (0..n)
                    .map(|i| {
                        let nbrs: Vec<NodeId> = g.neighbors(i).iter().map(|&j| g.id(j)).collect();
                        match lang.label_kind() {
                            LabelKind::Pointer => Label::Pointer(
                                (rng.gen_bool(0.7)).then(|| nbrs[rng.gen_range(0..nbrs.len())]),
                            ),
                            LabelKind::Bool => Label::Bool(rng.gen_bool(0.3)),
                            _ => Label::AdjList(nbrs.into_iter().filter(|_| rng.gen_bool(0.5)).collect()),
                        }
                    })
                    .collect();
                let x = LabeledGraph::new(g.clone(), lang.label_kind(), labels).unwrap();
                let (d, near) = nearest_member(lang, &x, Budget::default()).unwrap();
                let brute = enumerate_members(lang, &g, Budget::default())
                    .unwrap()
                    .iter()
                    .map(|m| crate::graph::label_diff(x.labels(), m))
                    .min()
                    .unwrap();
                assert_eq!(d, brute, "{lang} round {round}");
                assert_eq!(crate::graph::label_diff(x.labels(), &near), d);
                assert!(decide_membership(lang, &x.relabel(near).unwrap()).unwrap(), "{lang} round {round}");
            }
        }
    }

    #[test]
    fn parse_language_names() {
        assert_eq!("st_l".parse::<LanguageId>().unwrap(), LanguageId::StL);
        assert_eq!("MST-L".parse::<LanguageId>().unwrap(), LanguageId::MstL);
        assert!("tree".parse::<LanguageId>().is_err());
    }
}
