//! Exact and bounded searches over certificate assignments, sensitivity
//! measurement over corpora, and a strong local stability probe.
//!
//! Every search ranges over a finite per-node certificate domain. Results
//! are exact relative to that domain (and any extra seed assignments), which
//! is what the `exhaustive` flags in reports mean.

mod corpus;
mod probe;
mod seeds;
mod sensitivity;
mod spaces;

pub use corpus::{
    dedup_isomorphic, member_corpus, mst_corruption_corpus, nonmember_corpus, st_corruption_corpus, CorpusItem,
};
pub use probe::{strong_local_stability_probe, ProbeOutcome, ProbeWitness};
pub use sensitivity::{forest_repair, is_tree_language, sensitivity_sweep, REPORT_NOTE, ForestRepair, SensitivityReport, SensitivityRow};
pub use seeds::{labeled_spanning_tree, mst_seeds, st_seeds, transfer_from_universal};
pub use spaces::{acyclic_space, mst_space, st_space, universal_space, wrapped_space};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::budget::{Budget, BudgetExceeded, Meter};
use crate::graph::LabeledGraph;
use crate::languages::{decide_membership, LanguageError};
use crate::pls::{run_typed, verify_node, view_at, Params, Scheme};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    Language(#[from] LanguageError),
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
    #[error("certificate space has {0} assignments and no step budget")]
    SpaceTooLarge(String),
}

/// One finite certificate domain per node (indexed like the instance).
#[derive(Clone, Debug)]
pub struct CertSpace<C> {
    pub domains: Vec<Vec<C>>,
}

impl<C: PartialEq> CertSpace<C> {
    /// Number of assignments, if it fits in 128 bits.
    pub fn size(&self) -> Option<u128> {
        self.domains
            .iter()
            .try_fold(1u128, |acc, d| acc.checked_mul(d.len() as u128))
    }

    pub fn contains(&self, certs: &[C]) -> bool {
        certs.len() == self.domains.len() && certs.iter().zip(&self.domains).all(|(c, d)| d.contains(c))
    }
}

/// Search limits and the seed for randomized fallback search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub budget: Budget,
    pub seed: u64,
    /// Moves of the local search run when the exhaustive search runs out of
    /// budget.
    pub local_moves: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget: Budget::new(2_000_000),
            seed: 0,
            local_moves: 4_000,
        }
    }
}

/// Fewest rejecting nodes found, with a certificate assignment achieving it.
#[derive(Clone, Debug, PartialEq)]
pub struct MinRejections<C> {
    pub k: usize,
    pub witness: Vec<C>,
    /// The search covered the whole space, so `k` is its exact minimum.
    pub exhaustive: bool,
    pub steps: u64,
}

const UNSET: usize = usize::MAX;

/// A rejection count with an assignment achieving it.
pub type Found<C> = (usize, Vec<C>);

/// Search outcome together with the steps it used.
type Counted<C> = (Option<Found<C>>, u64);

struct Search<'a, S: Scheme> {
    scheme: &'a S,
    inst: &'a LabeledGraph,
    params: Params,
    space: &'a CertSpace<S::Cert>,
    /// Nodes whose closed neighborhood is fully assigned once the node at
    /// each index is.
    completes: Vec<Vec<usize>>,
    closed: Vec<Vec<usize>>,
    assign: Vec<usize>,
    meter: Meter,
    best: usize,
    witness: Option<Vec<usize>>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Open,
    Accepts,
    Rejects,
}

impl<'a, S: Scheme> Search<'a, S> {
    fn new(scheme: &'a S, inst: &'a LabeledGraph, space: &'a CertSpace<S::Cert>, cap: usize, budget: Budget) -> Self {
        let g = inst.graph();
        let n = g.n();
        let closed: Vec<Vec<usize>> = (0..n)
            .map(|v| {
                let mut c = g.neighbors(v).to_vec();
                c.push(v);
                c
            })
            .collect();
        let mut completes = vec![Vec::new(); n];
        for (v, c) in closed.iter().enumerate() {
            completes[*c.iter().max().expect("non-empty")].push(v);
        }
        Search {
            scheme,
            inst,
            params: Params::of(inst),
            space,
            completes,
            closed,
            assign: vec![UNSET; n],
            meter: budget.meter(),
            best: cap,
            witness: None,
        }
    }

    fn cert(&self, j: usize) -> Option<&'a S::Cert> {
        let a = self.assign[j];
        (a != UNSET).then(|| &self.space.domains[j][a])
    }

    fn status_after(&self, v: usize, depth: usize) -> Status {
        let view = view_at(self.inst, &self.params, v, |j| self.cert(j));
        if self.closed[v].iter().all(|&j| j <= depth) {
            if verify_node(self.scheme, &view) {
                Status::Accepts
            } else {
                Status::Rejects
            }
        } else if v <= depth && self.scheme.rejects_early(&view) {
            Status::Rejects
        } else {
            Status::Open
        }
    }

    /// Nodes that reject whatever certificates they and their neighbors get:
    /// every own certificate is rejected early with no neighbor assigned.
    fn forced(&mut self) -> Result<Vec<Status>, BudgetExceeded> {
        let n = self.assign.len();
        let mut status = vec![Status::Open; n];
        for (v, st) in status.iter_mut().enumerate() {
            let mut all = true;
            for value in 0..self.space.domains[v].len() {
                self.meter.tick()?;
                self.assign[v] = value;
                let view = view_at(self.inst, &self.params, v, |j| self.cert(j));
                if !self.scheme.rejects_early(&view) {
                    all = false;
                    break;
                }
            }
            self.assign[v] = UNSET;
            if all {
                *st = Status::Rejects;
            }
        }
        Ok(status)
    }

    fn run(&mut self, depth: usize, status: &[Status], rejects: usize) -> Result<(), BudgetExceeded> {
        let n = self.assign.len();
        if rejects >= self.best {
            return Ok(());
        }
        if depth == n {
            if rejects < self.best {
                self.best = rejects;
                self.witness = Some(self.assign.clone());
            }
            return Ok(());
        }
        for value in 0..self.space.domains[depth].len() {
            self.meter.tick()?;
            self.assign[depth] = value;
            let mut next = status.to_vec();
            let mut count = rejects;
            let touched: Vec<usize> = self.closed[depth]
                .iter()
                .chain(&self.completes[depth])
                .copied()
                .collect();
            for v in touched {
                if next[v] != Status::Open {
                    continue;
                }
                next[v] = self.status_after(v, depth);
                if next[v] == Status::Rejects {
                    count += 1;
                }
            }
            if count < self.best {
                self.run(depth + 1, &next, count)?;
            }
            if self.best == 0 {
                break;
            }
        }
        self.assign[depth] = UNSET;
        Ok(())
    }
}

/// Fewest rejections strictly below `cap` over the whole space, with the
/// lexicographically first assignment achieving it (domains in their given
/// order, nodes in index order); `None` if every assignment has at least
/// `cap` rejections.
pub fn search_below<S: Scheme>(
    scheme: &S,
    inst: &LabeledGraph,
    space: &CertSpace<S::Cert>,
    cap: usize,
    budget: Budget,
) -> Result<Option<Found<S::Cert>>, BudgetExceeded> {
    Ok(search_below_counted(scheme, inst, space, cap, budget)?.0)
}

fn search_below_counted<S: Scheme>(
    scheme: &S,
    inst: &LabeledGraph,
    space: &CertSpace<S::Cert>,
    cap: usize,
    budget: Budget,
) -> Result<Counted<S::Cert>, BudgetExceeded> {
    assert_eq!(space.domains.len(), inst.n(), "one domain per node");
    if space.domains.iter().any(Vec::is_empty) {
        return Ok((None, 0));
    }
    let mut search = Search::new(scheme, inst, space, cap, budget);
    let status = search.forced()?;
    let forced = status.iter().filter(|s| **s == Status::Rejects).count();
    search.run(0, &status, forced)?;
    let steps = search.meter.used();
    Ok((
        search.witness.map(|w| {
            let certs = w
                .iter()
                .enumerate()
                .map(|(j, &a)| space.domains[j][a].clone())
                .collect();
            (search.best, certs)
        }),
        steps,
    ))
}

/// Whether some assignment in the space is accepted everywhere.
pub fn find_accepting<S: Scheme>(
    scheme: &S,
    inst: &LabeledGraph,
    space: &CertSpace<S::Cert>,
    budget: Budget,
) -> Result<Option<Vec<S::Cert>>, BudgetExceeded> {
    Ok(search_below(scheme, inst, space, 1, budget)?.map(|(_, w)| w))
}

/// Minimum number of rejecting nodes over the space and the given seed
/// assignments. Members get `0` with the prover's certificates. When the
/// exhaustive search exceeds the budget, a seeded local search continues
/// from the best assignment known and the result is flagged non-exhaustive.
pub fn min_rejections<S: Scheme>(
    scheme: &S,
    inst: &LabeledGraph,
    space: &CertSpace<S::Cert>,
    seeds: &[Vec<S::Cert>],
    config: &SearchConfig,
) -> Result<MinRejections<S::Cert>, OracleError> {
    if space.size().is_none() && config.budget == Budget::unlimited() {
        return Err(OracleError::SpaceTooLarge(format!(
            "more than 2^128 ({} nodes)",
            space.domains.len()
        )));
    }
    if decide_membership(scheme.language(), inst)? {
        let witness = scheme.prove(inst).expect("members have prover certificates");
        return Ok(MinRejections {
            k: 0,
            witness,
            exhaustive: true,
            steps: 0,
        });
    }
    let mut best: Option<(usize, Vec<S::Cert>)> = None;
    for s in seeds {
        let k = run_typed(scheme, inst, s).k;
        if best.as_ref().is_none_or(|(b, _)| k < *b) {
            best = Some((k, s.clone()));
        }
    }
    // Raising the cap one step at a time keeps the pruning tight: minima
    // are usually far below the seed bound.
    let upper = best.as_ref().map_or(inst.n() + 1, |(k, _)| *k);
    let mut steps = 0u64;
    for cap in 1..=upper {
        let remaining = Budget::new(config.budget.max_steps.saturating_sub(steps));
        match search_below_counted(scheme, inst, space, cap, remaining) {
            Ok((found, used)) => {
                steps += used;
                if let Some(found) = found {
                    best = Some(found);
                    break;
                }
            }
            Err(_) => {
                let (k, witness) = local_search(scheme, inst, space, best, config);
                return Ok(MinRejections {
                    k,
                    witness,
                    exhaustive: false,
                    steps: config.budget.max_steps,
                });
            }
        }
    }
    let (k, witness) = best.expect("some assignment has at most n rejections");
    Ok(MinRejections {
        k,
        witness,
        exhaustive: true,
        steps,
    })
}

/// Single-node moves within the space, accepting moves that do not increase
/// the rejection count; restarts from random assignments when nothing is
/// known yet.
fn local_search<S: Scheme>(
    scheme: &S,
    inst: &LabeledGraph,
    space: &CertSpace<S::Cert>,
    start: Option<(usize, Vec<S::Cert>)>,
    config: &SearchConfig,
) -> (usize, Vec<S::Cert>) {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = inst.n();
    let random = |rng: &mut ChaCha8Rng| -> Vec<S::Cert> {
        (0..n)
            .map(|j| space.domains[j][rng.gen_range(0..space.domains[j].len())].clone())
            .collect()
    };
    let mut best = start.unwrap_or_else(|| {
        let c = random(&mut rng);
        (run_typed(scheme, inst, &c).k, c)
    });
    let mut current = best.clone();
    for step in 0..config.local_moves {
        if best.0 == 0 {
            break;
        }
        if step > 0 && step % 1000 == 0 {
            current = best.clone();
        }
        let v = rng.gen_range(0..n);
        let mut next = current.1.clone();
        next[v] = space.domains[v][rng.gen_range(0..space.domains[v].len())].clone();
        let k = run_typed(scheme, inst, &next).k;
        if k <= current.0 {
            current = (k, next);
            if current.0 < best.0 {
                best = current.clone();
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_path_stp, directed_cycle};
    use crate::schemes::{AcyclicScheme, StPScheme};

    #[test]
    fn directed_triangle_needs_one_rejection() {
        let inst = directed_cycle(3).unwrap();
        let space = acyclic_space(&inst);
        assert_eq!(space.size(), Some(27));
        let r = min_rejections(&AcyclicScheme, &inst, &space, &[], &SearchConfig::default()).unwrap();
        assert_eq!(r.k, 1);
        assert!(r.exhaustive);
        // first minimum in lexicographic order
        assert_eq!(r.witness, vec![0, 2, 1]);
        assert_eq!(run_typed(&AcyclicScheme, &inst, &r.witness).k, 1);
        assert!(find_accepting(&AcyclicScheme, &inst, &space, Budget::default()).unwrap().is_none());
    }

    #[test]
    fn members_need_no_search() {
        let inst = directed_cycle(3).unwrap().with_label(0, crate::Label::Pointer(None)).unwrap();
        let r = min_rejections(&AcyclicScheme, &inst, &acyclic_space(&inst), &[], &SearchConfig::default()).unwrap();
        assert_eq!((r.k, r.exhaustive), (0, true));
    }

    #[test]
    fn spliced_path_seed_bounds_the_search() {
        let (inst, certs) = build_path_stp(10).unwrap();
        let space = st_space(&inst);
        let config = SearchConfig {
            budget: Budget::new(20_000),
            ..SearchConfig::default()
        };
        let r = min_rejections(&StPScheme, &inst, &space, &[certs], &config).unwrap();
        assert!(r.k <= 2);
    }

    #[test]
    fn enlarging_the_space_never_increases_the_minimum() {
        let inst = directed_cycle(4).unwrap();
        let full = acyclic_space(&inst);
        let small = CertSpace {
            domains: full.domains.iter().map(|d| d[..2].to_vec()).collect(),
        };
        let cfg = SearchConfig::default();
        let a = min_rejections(&AcyclicScheme, &inst, &small, &[], &cfg).unwrap();
        let b = min_rejections(&AcyclicScheme, &inst, &full, &[], &cfg).unwrap();
        assert!(b.k <= a.k);
    }
}
