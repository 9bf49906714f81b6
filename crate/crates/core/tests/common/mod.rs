//! Independent reference implementations used as test oracles. Nothing in
//! here goes through the router, the path trees or the precomputed model.

#![allow(dead_code)]

use std::collections::BTreeSet;

use meshroute::linkbudget::{link_snir_db, DirectedLink, InterferenceContext, RadioConfig};
use meshroute::MeshNetwork;

/// Every simple path from `user` through base stations to a core base
/// station with at most `h_max` links, as node sequences.
pub fn brute_force_paths(net: &MeshNetwork, user: usize, h_max: usize) -> BTreeSet<Vec<usize>> {
    fn walk(
        net: &MeshNetwork,
        h_max: usize,
        stack: &mut Vec<usize>,
        out: &mut BTreeSet<Vec<usize>>,
    ) {
        let here = *stack.last().unwrap();
        if stack.len() > 1 && net.is_core(here) {
            out.insert(stack.clone());
            return;
        }
        if stack.len() - 1 == h_max {
            return;
        }
        for next in 0..net.num_bs() {
            if net.is_adjacent(here, next) && !stack.contains(&next) {
                stack.push(next);
                walk(net, h_max, stack, out);
                stack.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    walk(net, h_max, &mut vec![user], &mut out);
    out
}

/// Number of maximal branches: simple walks from `user` over base stations
/// that stop at a core, at `h_max` links, or where no extension exists.
pub fn brute_force_branch_count(net: &MeshNetwork, user: usize, h_max: usize) -> usize {
    fn walk(net: &MeshNetwork, h_max: usize, stack: &mut Vec<usize>) -> usize {
        let here = *stack.last().unwrap();
        if (stack.len() > 1 && net.is_core(here)) || stack.len() - 1 == h_max {
            return 1;
        }
        let mut total = 0;
        let mut extended = false;
        for next in 0..net.num_bs() {
            if net.is_adjacent(here, next) && !stack.contains(&next) {
                extended = true;
                stack.push(next);
                total += walk(net, h_max, stack);
                stack.pop();
            }
        }
        if extended {
            total
        } else {
            1
        }
    }
    walk(net, h_max, &mut vec![user])
}

pub fn backhaul(nodes: &[usize]) -> Vec<DirectedLink> {
    nodes[1..]
        .windows(2)
        .map(|w| DirectedLink::new(w[0], w[1]))
        .collect()
}

/// Bottleneck SNIR of a node path, straight from the link budget.
pub fn oracle_path_cost(
    net: &MeshNetwork,
    cfg: &RadioConfig,
    nodes: &[usize],
    active: &InterferenceContext,
) -> f64 {
    backhaul(nodes)
        .into_iter()
        .map(|l| link_snir_db(l, active, net, cfg).unwrap())
        .fold(f64::INFINITY, f64::min)
}

/// Per-user costs when every user's path is active: each user sees the
/// backhaul links of all other users' paths.
pub fn oracle_costs(net: &MeshNetwork, cfg: &RadioConfig, choice: &[&Vec<usize>]) -> Vec<f64> {
    (0..choice.len())
        .map(|k| {
            let active: InterferenceContext = choice
                .iter()
                .enumerate()
                .filter(|&(q, _)| q != k)
                .flat_map(|(_, p)| backhaul(p))
                .collect();
            oracle_path_cost(net, cfg, choice[k], &active)
        })
        .collect()
}

pub fn oracle_coa(net: &MeshNetwork, cfg: &RadioConfig, choice: &[&Vec<usize>]) -> f64 {
    oracle_costs(net, cfg, choice)
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

/// Best worst-user cost over every joint choice of paths.
pub fn exhaustive_best(net: &MeshNetwork, cfg: &RadioConfig, path_sets: &[Vec<Vec<usize>>]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    let mut idx = vec![0usize; path_sets.len()];
    loop {
        let choice: Vec<&Vec<usize>> = idx.iter().zip(path_sets).map(|(&i, s)| &s[i]).collect();
        best = best.max(oracle_coa(net, cfg, &choice));
        let mut pos = path_sets.len();
        loop {
            if pos == 0 {
                return best;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < path_sets[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}
