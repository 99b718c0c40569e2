//! Rejection counts against distances over a corpus, and the edge-removal
//! repair of a spanning-tree labeling from its rejecting nodes.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::{min_rejections, CertSpace, CorpusItem, OracleError, SearchConfig};
use crate::enumerate::RollbackDsu;
use crate::graph::{label_diff, Label, LabeledGraph};
use crate::languages::{adjlist_labels, adjlist_targets, edit_distance_to_language, LanguageId};
use crate::pls::{CertificateMap, Scheme};

#[derive(Clone, Debug, Serialize)]
pub struct SensitivityRow {
    pub instance_id: String,
    pub n: usize,
    pub distance: usize,
    pub k_min: usize,
    /// `k_min / distance`; absent when the distance is zero.
    pub ratio: Option<f64>,
    pub exhaustive: bool,
    #[serde(skip)]
    pub witness: CertificateMap,
}

#[derive(Clone, Debug, Serialize)]
pub struct SensitivityReport {
    pub scheme: String,
    pub language: String,
    pub rows: Vec<SensitivityRow>,
}

pub const REPORT_NOTE: &str = "minimum rejections are taken over the listed corpus and the bounded certificate space \
(plus seeded maps); rows with exhaustive=false are upper bounds on the true minimum";

impl SensitivityReport {
    pub fn min_ratio(&self) -> Option<f64> {
        self.rows.iter().filter_map(|r| r.ratio).min_by(f64::total_cmp)
    }

    /// Largest `distance / k_min`; infinite if some nonmember has `k_min = 0`.
    pub fn max_distance_per_rejection(&self) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| r.distance > 0)
            .map(|r| {
                if r.k_min == 0 {
                    f64::INFINITY
                } else {
                    r.distance as f64 / r.k_min as f64
                }
            })
            .max_by(f64::total_cmp)
    }

    /// Whether `distance <= factor * k_min` holds on every row.
    pub fn distance_within(&self, factor: usize) -> bool {
        self.rows.iter().all(|r| r.distance <= factor * r.k_min)
    }

    pub fn exhaustive_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.exhaustive).count()
    }

    /// Witness file name used by [`SensitivityReport::to_csv`].
    pub fn witness_file(row: &SensitivityRow) -> String {
        format!("witnesses/{}.json", row.instance_id)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# scheme={} language={}", self.scheme, self.language).unwrap();
        writeln!(s, "# {REPORT_NOTE}").unwrap();
        s.push_str("instance-id,n,edit-distance,k-min,ratio,exhaustive,witness-file\n");
        for r in &self.rows {
            let ratio = r.ratio.map_or(String::new(), |x| format!("{x:.6}"));
            writeln!(
                s,
                "{},{},{},{},{},{},{}",
                r.instance_id,
                r.n,
                r.distance,
                r.k_min,
                ratio,
                r.exhaustive,
                Self::witness_file(r)
            )
            .unwrap();
        }
        s
    }

    pub fn summary_json(&self) -> serde_json::Value {
        serde_json::json!({
            "scheme": self.scheme,
            "language": self.language,
            "note": REPORT_NOTE,
            "instances": self.rows.len(),
            "exhaustive_rows": self.exhaustive_rows(),
            "min_ratio": self.min_ratio(),
            "max_distance_per_rejection": self.max_distance_per_rejection().map(|x| if x.is_finite() { serde_json::json!(x) } else { serde_json::json!("inf") }),
        })
    }
}

/// One row per corpus item: exact distance and the smallest rejection count
/// over `space_of(instance)` and `seeds_of(item)`. Rows are computed in
/// parallel; item `i` uses search seed `config.seed + i`.
pub fn sensitivity_sweep<S, FS, FD>(
    scheme: &S,
    corpus: &[CorpusItem],
    space_of: FS,
    seeds_of: FD,
    config: &SearchConfig,
) -> Result<SensitivityReport, OracleError>
where
    S: Scheme,
    FS: Fn(&LabeledGraph) -> Result<CertSpace<S::Cert>, OracleError> + Sync,
    FD: Fn(&CorpusItem) -> Vec<Vec<S::Cert>> + Sync,
{
    let lang = scheme.language();
    let rows = corpus
        .par_iter()
        .enumerate()
        .map(|(i, item)| {
            let inst = &item.instance;
            let distance = edit_distance_to_language(lang, inst, config.budget)?;
            let space = space_of(inst)?;
            let cfg = SearchConfig {
                seed: config.seed.wrapping_add(i as u64),
                ..*config
            };
            let r = min_rejections(scheme, inst, &space, &seeds_of(item), &cfg)?;
            Ok(SensitivityRow {
                instance_id: item.id.clone(),
                n: inst.n(),
                distance,
                k_min: r.k,
                ratio: (distance > 0).then(|| r.k as f64 / distance as f64),
                exhaustive: r.exhaustive,
                witness: CertificateMap::encode_all(scheme, inst, &r.witness),
            })
        })
        .collect::<Result<Vec<_>, OracleError>>()?;
    Ok(SensitivityReport {
        scheme: scheme.name(),
        language: lang.name().to_string(),
        rows,
    })
}

/// Outcome of repairing an adjacency-list tree labeling from its rejecting
/// nodes alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForestRepair {
    /// Graph edges with both endpoints rejecting.
    pub removed_edges: usize,
    /// Whether the remaining labeled edges contain no cycle.
    pub acyclic: bool,
    /// Trees of the remaining labeled edges, isolated nodes included.
    pub trees: usize,
    /// A spanning tree labeling: the remaining labeled edges (minus any that
    /// close a cycle) joined by extra graph edges.
    pub repaired: Vec<Label>,
    /// Nodes whose label differs between the input and `repaired`.
    pub changed: usize,
}

/// Drops every edge with two rejecting endpoints, keeps the edges listed by
/// either endpoint in the remaining labels, and completes them to a spanning
/// tree. `changed` bounds the distance to spanning trees from above.
pub fn forest_repair(inst: &LabeledGraph, rejecting: &[bool]) -> ForestRepair {
    let g = inst.graph();
    let n = g.n();
    let removed = |a: usize, b: usize| rejecting[a] && rejecting[b];
    let removed_edges = g.edges().iter().filter(|&&(a, b)| removed(a, b)).count();
    let mut labeled: Vec<usize> = Vec::new();
    for (k, &(a, b)) in g.edges().iter().enumerate() {
        if removed(a, b) {
            continue;
        }
        let listed = |u: usize, w: usize| adjlist_targets(g, u, inst.label(u)).is_some_and(|t| t.contains(&w));
        if listed(a, b) || listed(b, a) {
            labeled.push(k);
        }
    }
    let mut dsu = RollbackDsu::new(n);
    let mut tree = Vec::new();
    let mut acyclic = true;
    for &k in &labeled {
        let (a, b) = g.edges()[k];
        if dsu.union(a, b) {
            tree.push(k);
        } else {
            acyclic = false;
        }
    }
    let trees = dsu.components();
    for (k, &(a, b)) in g.edges().iter().enumerate() {
        if dsu.union(a, b) {
            tree.push(k);
        }
    }
    tree.sort();
    let repaired = adjlist_labels(g, &tree);
    let changed = label_diff(inst.labels(), &repaired);
    ForestRepair {
        removed_edges,
        acyclic,
        trees,
        repaired,
        changed,
    }
}

/// Languages whose labels are adjacency lists of a spanning tree.
pub fn is_tree_language(lang: LanguageId) -> bool {
    matches!(lang, LanguageId::StL | LanguageId::MstL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{st_corruption_corpus, st_space};
    use crate::pls::run_typed;
    use crate::schemes::StLScheme;
    use crate::Budget;

    #[test]
    fn repair_from_the_rejecting_set_stays_within_the_tree_bound() {
        let corpus = st_corruption_corpus(11, 40, 6).unwrap();
        let config = SearchConfig {
            budget: Budget::new(200_000),
            ..SearchConfig::default()
        };
        let report = sensitivity_sweep(
            &StLScheme,
            &corpus,
            |inst| Ok(st_space(inst)),
            |item| vec![StLScheme.prove(item.origin.as_ref().unwrap()).unwrap()],
            &config,
        )
        .unwrap();
        assert_eq!(report.rows.len(), 40);
        for (row, item) in report.rows.iter().zip(&corpus) {
            assert!(row.k_min >= 1);
            assert!(row.distance <= 4 * row.k_min, "{row:?}");
            // re-run the witness to get its rejecting set
            let scheme = StLScheme;
            let certs: Vec<_> = item
                .instance
                .graph()
                .ids()
                .iter()
                .map(|id| scheme.decode(row.witness.get(*id).unwrap(), &crate::Params::of(&item.instance)).unwrap())
                .collect();
            let v = run_typed(&scheme, &item.instance, &certs);
            assert_eq!(v.k, row.k_min);
            let rejecting: Vec<bool> = v.accepted.iter().map(|a| !a).collect();
            let fix = forest_repair(&item.instance, &rejecting);
            assert!(fix.acyclic, "{}", row.instance_id);
            assert!(fix.trees <= 2 * row.k_min);
            assert!(row.distance <= fix.changed);
        }
        let csv = report.to_csv();
        assert!(csv.starts_with("# scheme=st language=ST_L\n# "));
        assert_eq!(csv.lines().count(), 3 + 40);
    }
}
