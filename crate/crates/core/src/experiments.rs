//! Comparison harness, CoA metric and the search-cost bound.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{derive_seed, route_ga, route_no_interference, route_random_avg, GaParams};
use crate::error::{Error, Result};
use crate::linkbudget::RadioConfig;
use crate::model::RadioModel;
use crate::router::{route, Counters, GroupingPlan, SearchMode, UserTrees};
use crate::topology::{generate_network, GenParams, MeshNetwork};

/// Cost of Algorithm: the worst path cost over all users.
pub fn coa<I: IntoIterator<Item = f64>>(costs: I) -> Result<f64> {
    costs
        .into_iter()
        .reduce(f64::min)
        .ok_or_else(|| Error::domain("CoA of an empty cost set"))
}

/// Size of one user's search tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeStats {
    /// N: valid paths in the tree.
    pub valid_paths: u64,
    /// v: nodes in the tree.
    pub tree_nodes: u64,
}

impl TreeStats {
    pub fn of(trees: &UserTrees, user: crate::topology::NodeId) -> Self {
        Self {
            valid_paths: trees.tree(user).num_valid_paths() as u64,
            tree_nodes: trees.tree(user).node_count() as u64,
        }
    }
}

fn others_product(group: &[TreeStats], skip: usize) -> u128 {
    group
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != skip)
        .map(|(_, s)| u128::from(s.valid_paths))
        .product()
}

/// Operation-count upper bound of the grouped search,
/// `sum_groups sum_i (prod_{i' != i} N_i') (8 v_i + (v_i + 3 (U_j - 1)) x)`,
/// with `x_unit` the cost of one SNIR evaluation.
pub fn operation_bound(groups: &[Vec<TreeStats>], x_unit: f64) -> f64 {
    groups
        .iter()
        .map(|group| {
            let dependents = group.len().saturating_sub(1) as f64;
            group
                .iter()
                .enumerate()
                .map(|(k, s)| {
                    let v = s.tree_nodes as f64;
                    others_product(group, k) as f64 * (8.0 * v + (v + 3.0 * dependents) * x_unit)
                })
                .sum::<f64>()
        })
        .sum()
}

/// The same bound counted in SNIR evaluations only:
/// `sum_i (prod_{i' != i} N_i') (v_i + 3 (U_j - 1))` for one group.
pub fn snir_eval_bound(group: &[TreeStats]) -> u128 {
    let dependents = group.len().saturating_sub(1) as u128;
    group
        .iter()
        .enumerate()
        .map(|(k, s)| others_product(group, k) * (u128::from(s.tree_nodes) + 3 * dependents))
        .sum()
}

/// Mesh size and the settings it is evaluated with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub num_bs: usize,
    pub num_users: usize,
    pub num_core: usize,
    pub num_groups: usize,
    pub ga_population: usize,
    pub ga_survivors: usize,
    pub ga_generations: usize,
}

impl Scenario {
    /// Scenario with GA settings picked by size: the three reference meshes
    /// use (20,10)/20, (40,20)/50 and (100,50)/200.
    pub fn new(num_bs: usize, num_users: usize, num_core: usize, num_groups: usize) -> Self {
        let (k, j, g) = match num_bs {
            0..=10 => (20, 10, 20),
            11..=20 => (40, 20, 50),
            _ => (100, 50, 200),
        };
        Self {
            num_bs,
            num_users,
            num_core,
            num_groups,
            ga_population: k,
            ga_survivors: j,
            ga_generations: g,
        }
    }

    /// The three reference meshes (B, U, C, G).
    pub fn reference_meshes() -> Vec<Scenario> {
        vec![
            Scenario::new(10, 4, 3, 1),
            Scenario::new(20, 10, 3, 4),
            Scenario::new(30, 15, 5, 6),
        ]
    }

    /// Parses `table1` or a `;`-separated list of `B,U,C,G` tuples.
    pub fn parse_list(text: &str) -> Result<Vec<Scenario>> {
        if text.trim() == "table1" {
            return Ok(Self::reference_meshes());
        }
        text.split(';')
            .filter(|s| !s.trim().is_empty())
            .map(str::parse)
            .collect()
    }

    pub fn gen_params(&self, seed: u64, h_max: usize) -> GenParams {
        GenParams {
            h_max,
            ..GenParams::new(self.num_bs, self.num_users, self.num_core, seed)
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}-{}-{}-{}",
            self.num_bs, self.num_users, self.num_core, self.num_groups
        )
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<usize> = s
            .trim()
            .trim_matches(|c| c == '(' || c == ')')
            .split([',', '-'])
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::validation("scenario", format!("{s:?}: {e}")))?;
        match parts[..] {
            [b, u, c, g] => Ok(Scenario::new(b, u, c, g)),
            _ => Err(Error::validation(
                "scenario",
                format!("{s:?}: expected four numbers B,U,C,G"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareOptions {
    pub seeds: Vec<u64>,
    pub radio: RadioConfig,
    pub h_max: usize,
    pub mode: SearchMode,
    pub random_runs: usize,
    pub ga_runs: usize,
    pub ga_mutation_prob: f64,
    /// Wall-clock timings vary between runs; leave them out for
    /// reproducible output.
    pub record_wall_time: bool,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            seeds: (0..5).collect(),
            radio: RadioConfig::default(),
            h_max: 4,
            mode: SearchMode::default(),
            random_runs: 1000,
            ga_runs: 50,
            ga_mutation_prob: 0.1,
            record_wall_time: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// The interference-aware grouped tree search.
    Ours,
    /// The same search with interference masked by a huge noise floor.
    Noint,
    /// Uniformly random path per user, averaged over many runs.
    Random,
    Ga,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Ours => "ours",
            Algorithm::Noint => "noint",
            Algorithm::Random => "random",
            Algorithm::Ga => "ga",
        }
    }
}

/// Counted vs allowed SNIR evaluations of one routed group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub counted: u64,
    pub bound: u128,
}

impl BoundCheck {
    pub fn holds(&self) -> bool {
        u128::from(self.counted) <= self.bound
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmResult {
    pub coa_db: f64,
    pub counters: Counters,
    pub wall_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaSummary {
    pub runs: Vec<AlgorithmResult>,
    pub min_db: f64,
    pub max_db: f64,
    pub avg_db: f64,
    /// Whether every run's best fitness never decreased between generations.
    pub monotone: bool,
}

/// Results of every algorithm on one generated network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: Scenario,
    pub seed: u64,
    pub ours: AlgorithmResult,
    pub noint: AlgorithmResult,
    pub random: AlgorithmResult,
    pub ga: Option<GaSummary>,
    pub bound_checks: Vec<BoundCheck>,
}

fn timed<T>(record: bool, f: impl FnOnce() -> Result<T>) -> Result<(T, Option<f64>)> {
    let start = Instant::now();
    let out = f()?;
    let ms = record.then(|| start.elapsed().as_secs_f64() * 1e3);
    Ok((out, ms))
}

/// Generates the network of one scenario cell and runs every algorithm.
pub fn run_cell(scenario: &Scenario, seed: u64, opts: &CompareOptions) -> Result<RunReport> {
    let net = generate_network(&scenario.gen_params(seed, opts.h_max))?;
    run_on_network(&net, scenario, seed, opts)
}

pub fn run_on_network(
    net: &MeshNetwork,
    scenario: &Scenario,
    seed: u64,
    opts: &CompareOptions,
) -> Result<RunReport> {
    let trees = UserTrees::build(net, opts.h_max)?;
    trees.ensure_routable()?;
    let model = RadioModel::new(net, &opts.radio)?;
    let plan = GroupingPlan::contiguous(net, scenario.num_groups, opts.mode)?;
    let rec = opts.record_wall_time;

    let (ours, ours_ms) = timed(rec, || route(net, &trees, &model, &plan))?;
    let bound_checks = ours
        .groups
        .iter()
        .map(|g| {
            let stats: Vec<_> = g.users.iter().map(|&u| TreeStats::of(&trees, u)).collect();
            BoundCheck {
                counted: g.counters.snir_evals,
                bound: snir_eval_bound(&stats),
            }
        })
        .collect();
    let (noint, noint_ms) = timed(rec, || route_no_interference(net, &trees, &model, &plan))?;
    let (random, random_ms) = timed(rec, || {
        route_random_avg(net, &trees, &model, opts.random_runs, derive_seed(seed, 1))
    })?;

    let ga = if opts.ga_runs > 0 {
        let runs = (0..opts.ga_runs as u64)
            .into_par_iter()
            .map(|r| {
                let params = GaParams {
                    mutation_prob: opts.ga_mutation_prob,
                    ..GaParams::new(
                        scenario.ga_population,
                        scenario.ga_survivors,
                        scenario.ga_generations,
                        derive_seed(derive_seed(seed, 2), r),
                    )
                };
                timed(rec, || route_ga(net, &trees, &model, &params))
            })
            .collect::<Result<Vec<_>>>()?;
        let monotone = runs
            .iter()
            .all(|(o, _)| o.best_history.windows(2).all(|w| w[1] >= w[0]));
        let results: Vec<AlgorithmResult> = runs
            .into_iter()
            .map(|(o, ms)| AlgorithmResult {
                coa_db: o.assignment.coa_db(),
                counters: o.counters,
                wall_ms: ms,
            })
            .collect();
        let coas = results.iter().map(|r| r.coa_db);
        Some(GaSummary {
            min_db: coas.clone().fold(f64::INFINITY, f64::min),
            max_db: coas.clone().fold(f64::NEG_INFINITY, f64::max),
            avg_db: coas.sum::<f64>() / results.len() as f64,
            runs: results,
            monotone,
        })
    } else {
        None
    };

    Ok(RunReport {
        scenario: *scenario,
        seed,
        ours: AlgorithmResult {
            coa_db: ours.assignment.coa_db(),
            counters: ours.counters(),
            wall_ms: ours_ms,
        },
        noint: AlgorithmResult {
            coa_db: noint.assignment.coa_db(),
            counters: noint.counters(),
            wall_ms: noint_ms,
        },
        random: AlgorithmResult {
            coa_db: random.mean_coa_db,
            counters: random.counters,
            wall_ms: random_ms,
        },
        ga,
        bound_checks,
    })
}

/// Outcome of one scenario x seed cell.
#[derive(Debug)]
pub struct CellOutcome {
    pub scenario: Scenario,
    pub seed: u64,
    pub result: Result<RunReport>,
}

/// Runs every scenario for every seed. Cells run in parallel; the output is
/// ordered by scenario (as given) and then seed (as given).
pub fn run_comparison(scenarios: &[Scenario], opts: &CompareOptions) -> Vec<CellOutcome> {
    let cells: Vec<(Scenario, u64)> = scenarios
        .iter()
        .flat_map(|s| opts.seeds.iter().map(move |&seed| (*s, seed)))
        .collect();
    cells
        .into_par_iter()
        .map(|(scenario, seed)| CellOutcome {
            scenario,
            seed,
            result: run_cell(&scenario, seed, opts),
        })
        .collect()
}

/// One line of the comparison CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub scenario: String,
    pub seed: u64,
    pub algorithm: String,
    pub coa_db: Option<f64>,
    pub snir_evals: Option<u64>,
    pub path_cost_evals: Option<u64>,
    pub combinations: Option<u64>,
    pub wall_ms: Option<f64>,
    pub ga_run_index: Option<usize>,
}

impl CsvRow {
    fn from_result(
        report: &RunReport,
        algorithm: Algorithm,
        r: &AlgorithmResult,
        run: Option<usize>,
    ) -> Self {
        Self {
            scenario: report.scenario.to_string(),
            seed: report.seed,
            algorithm: algorithm.as_str().to_string(),
            coa_db: Some(r.coa_db),
            snir_evals: Some(r.counters.snir_evals),
            path_cost_evals: Some(r.counters.path_cost_evals),
            combinations: Some(r.counters.combinations),
            wall_ms: r.wall_ms,
            ga_run_index: run,
        }
    }
}

pub fn csv_rows(cells: &[CellOutcome]) -> Vec<CsvRow> {
    let mut rows = Vec::new();
    for cell in cells {
        match &cell.result {
            Ok(r) => {
                rows.push(CsvRow::from_result(r, Algorithm::Ours, &r.ours, None));
                rows.push(CsvRow::from_result(r, Algorithm::Noint, &r.noint, None));
                rows.push(CsvRow::from_result(r, Algorithm::Random, &r.random, None));
                if let Some(ga) = &r.ga {
                    for (k, run) in ga.runs.iter().enumerate() {
                        rows.push(CsvRow::from_result(r, Algorithm::Ga, run, Some(k)));
                    }
                }
            }
            Err(_) => rows.push(CsvRow {
                scenario: cell.scenario.to_string(),
                seed: cell.seed,
                algorithm: "error".to_string(),
                coa_db: None,
                snir_evals: None,
                path_cost_evals: None,
                combinations: None,
                wall_ms: None,
                ga_run_index: None,
            }),
        }
    }
    rows
}

pub fn write_csv<W: std::io::Write>(rows: &[CsvRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<CsvRow>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

/// Mean of the per-seed values, `None` when there are none.
pub fn mean<I: IntoIterator<Item = f64>>(values: I) -> Option<f64> {
    let (sum, n) = values
        .into_iter()
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}
