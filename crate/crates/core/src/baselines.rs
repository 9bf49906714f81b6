//! Reference algorithms the router is compared against. All of them are
//! scored with [`crate::router::evaluate_assignment`].

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::coa;
use crate::model::RadioModel;
use crate::pathtree::Path;
use crate::router::{
    evaluate_assignment_counted, path_costs_with_others, route, Assignment, Counters, GroupingPlan,
    RouteOutcome, UserTrees,
};
use crate::topology::{MeshNetwork, NodeId};

/// Noise power that drowns out every interference term.
pub const INTERFERENCE_BLIND_NOISE_DBM: f64 = 30.0;

/// SplitMix64 finalizer over `base` and `stream`, for independent per-run
/// seeds.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The router run with an overwhelming noise floor, so that it optimizes
/// received power only; the returned assignment is scored under the real
/// noise and interference.
pub fn route_no_interference(
    net: &MeshNetwork,
    trees: &UserTrees,
    model: &RadioModel,
    plan: &GroupingPlan,
) -> Result<RouteOutcome> {
    let blind = model.with_noise_dbm(INTERFERENCE_BLIND_NOISE_DBM);
    let mut outcome = route(net, trees, &blind, plan)?;
    let mut evaluation = Counters::default();
    outcome.assignment =
        evaluate_assignment_counted(net, model, outcome.assignment.chosen, &mut evaluation)?;
    outcome.evaluation += evaluation;
    Ok(outcome)
}

fn assignment_from_genome(trees: &UserTrees, genome: &[usize]) -> BTreeMap<NodeId, Path> {
    trees
        .users()
        .zip(genome)
        .map(|(u, &g)| (u, trees.paths(u)[g].clone()))
        .collect()
}

fn genome_coa(
    trees: &UserTrees,
    model: &RadioModel,
    genome: &[usize],
    counters: &mut Counters,
) -> f64 {
    let paths: Vec<&Path> = trees
        .users()
        .zip(genome)
        .map(|(u, &g)| &trees.paths(u)[g])
        .collect();
    coa(path_costs_with_others(model, &paths, counters)).expect("at least one user")
}

fn random_genome(trees: &UserTrees, rng: &mut ChaCha8Rng) -> Vec<usize> {
    trees
        .users()
        .map(|u| rng.gen_range(0..trees.paths(u).len()))
        .collect()
}

/// Every user picks one of its valid paths uniformly at random.
pub fn route_random(
    net: &MeshNetwork,
    trees: &UserTrees,
    model: &RadioModel,
    seed: u64,
) -> Result<(Assignment, Counters)> {
    trees.ensure_routable()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let genome = random_genome(trees, &mut rng);
    let mut counters = Counters::default();
    let a = evaluate_assignment_counted(
        net,
        model,
        assignment_from_genome(trees, &genome),
        &mut counters,
    )?;
    Ok((a, counters))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomSummary {
    pub runs: usize,
    pub mean_coa_db: f64,
    pub min_coa_db: f64,
    pub max_coa_db: f64,
    pub counters: Counters,
}

/// Mean CoA of `runs` independent random assignments; run `r` uses seed
/// `derive_seed(seed, r)`.
pub fn route_random_avg(
    net: &MeshNetwork,
    trees: &UserTrees,
    model: &RadioModel,
    runs: usize,
    seed: u64,
) -> Result<RandomSummary> {
    if runs == 0 {
        return Err(Error::validation("runs", "must be at least 1"));
    }
    let results = (0..runs as u64)
        .into_par_iter()
        .map(|r| route_random(net, trees, model, derive_seed(seed, r)))
        .collect::<Result<Vec<_>>>()?;
    let mut counters = Counters::default();
    let mut sum = 0.0;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (a, c) in &results {
        let v = a.coa_db();
        sum += v;
        lo = lo.min(v);
        hi = hi.max(v);
        counters += *c;
    }
    Ok(RandomSummary {
        runs,
        mean_coa_db: sum / runs as f64,
        min_coa_db: lo,
        max_coa_db: hi,
        counters,
    })
}

/// Elitist genetic algorithm over per-user path indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaParams {
    /// Population size K.
    pub population: usize,
    /// Survivors J kept each generation.
    pub survivors: usize,
    pub generations: usize,
    pub mutation_prob: f64,
    pub seed: u64,
}

impl GaParams {
    pub fn new(population: usize, survivors: usize, generations: usize, seed: u64) -> Self {
        Self {
            population,
            survivors,
            generations,
            mutation_prob: 0.1,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.survivors == 0 || self.survivors >= self.population {
            return Err(Error::validation(
                "ga",
                format!(
                    "need 1 <= J < K, got K = {}, J = {}",
                    self.population, self.survivors
                ),
            ));
        }
        if self.generations == 0 {
            return Err(Error::validation("ga", "generations must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.mutation_prob) {
            return Err(Error::validation(
                "ga",
                "mutation probability must lie in [0, 1]",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct GaOutcome {
    pub assignment: Assignment,
    /// Best fitness in the population, initially and after each generation.
    pub best_history: Vec<f64>,
    pub counters: Counters,
}

pub fn route_ga(
    net: &MeshNetwork,
    trees: &UserTrees,
    model: &RadioModel,
    ga: &GaParams,
) -> Result<GaOutcome> {
    route_ga_seeded(net, trees, model, ga, &[])
}

/// Like [`route_ga`], with `initial` genomes placed at the front of the
/// first population; the rest is drawn at random.
pub fn route_ga_seeded(
    net: &MeshNetwork,
    trees: &UserTrees,
    model: &RadioModel,
    ga: &GaParams,
    initial: &[Vec<usize>],
) -> Result<GaOutcome> {
    ga.validate()?;
    trees.ensure_routable()?;
    if initial.len() > ga.population {
        return Err(Error::validation(
            "ga",
            "more initial genomes than population slots",
        ));
    }
    for g in initial {
        let ok = g.len() == net.num_users()
            && trees.users().zip(g).all(|(u, &i)| i < trees.paths(u).len());
        if !ok {
            return Err(Error::validation(
                "ga",
                "initial genome does not fit the network",
            ));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(ga.seed);
    let mut counters = Counters::default();
    let mut population: Vec<(Vec<usize>, f64)> = Vec::with_capacity(ga.population);
    for g in initial {
        let f = genome_coa(trees, model, g, &mut counters);
        population.push((g.clone(), f));
    }
    while population.len() < ga.population {
        let g = random_genome(trees, &mut rng);
        let f = genome_coa(trees, model, &g, &mut counters);
        population.push((g, f));
    }

    let fittest =
        |pop: &[(Vec<usize>, f64)]| pop.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let mut best_history = vec![fittest(&population)];
    let users: Vec<NodeId> = trees.users().collect();

    for _ in 0..ga.generations {
        // stable: equal fitness keeps the older genome first
        population.sort_by(|a, b| b.1.total_cmp(&a.1));
        population.truncate(ga.survivors);
        while population.len() < ga.population {
            let a = rng.gen_range(0..ga.survivors);
            let b = rng.gen_range(0..ga.survivors);
            let mut child: Vec<usize> = population[a]
                .0
                .iter()
                .zip(&population[b].0)
                .map(|(&x, &y)| if rng.gen_bool(0.5) { x } else { y })
                .collect();
            for (gene, &u) in child.iter_mut().zip(&users) {
                if rng.gen_bool(ga.mutation_prob) {
                    *gene = rng.gen_range(0..trees.paths(u).len());
                }
            }
            let f = genome_coa(trees, model, &child, &mut counters);
            population.push((child, f));
        }
        best_history.push(fittest(&population));
    }

    let best = population
        .iter()
        .enumerate()
        .fold(None, |acc: Option<(usize, f64)>, (i, p)| match acc {
            Some((_, f)) if f >= p.1 => acc,
            _ => Some((i, p.1)),
        })
        .map(|(i, _)| i)
        .expect("population is not empty");
    let chosen = assignment_from_genome(trees, &population[best].0);
    let assignment = evaluate_assignment_counted(net, model, chosen, &mut counters)?;
    Ok(GaOutcome {
        assignment,
        best_history,
        counters,
    })
}

/// Genome (per-user path indices) of an assignment, if every chosen path is
/// one of the user's valid paths.
pub fn genome_of(trees: &UserTrees, assignment: &Assignment) -> Option<Vec<usize>> {
    trees
        .users()
        .map(|u| {
            let p = assignment.chosen.get(&u)?;
            trees.paths(u).iter().position(|q| q == p)
        })
        .collect()
}
