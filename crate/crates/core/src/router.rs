//! Interference-aware max-min SNIR routing.
//!
//! For every user of a group, and for every combination of paths of the
//! other users of the group, the user's tree is searched for the path with
//! the widest bottleneck given the interference of that combination. The
//! combination whose worst path is best wins for that user; the user with the
//! best winning combination decides the paths of the whole group.
//!
//! Interference semantics are shared by every evaluation in the crate: when
//! a path is scored, the active links are the backhaul links of the other
//! users' paths, filtered per victim link by
//! [`crate::linkbudget::is_excluded`]. A path's own links never interfere
//! with each other.

use std::collections::BTreeMap;
use std::ops::{Add, AddAssign};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::coa;
use crate::linkbudget::{DirectedLink, InterferenceContext};
use crate::model::LinkModel;
use crate::pathtree::{build_tree, valid_paths, LeafKind, Path, PathTree};
use crate::topology::{MeshNetwork, NodeId};

/// Work done by a search, in units the complexity bound is stated in.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub snir_evals: u64,
    pub path_cost_evals: u64,
    pub combinations: u64,
}

impl AddAssign for Counters {
    fn add_assign(&mut self, rhs: Self) {
        self.snir_evals += rhs.snir_evals;
        self.path_cost_evals += rhs.path_cost_evals;
        self.combinations += rhs.combinations;
    }
}

impl Add for Counters {
    type Output = Counters;

    fn add(mut self, rhs: Self) -> Counters {
        self += rhs;
        self
    }
}

/// Trees and valid paths of every user of a network.
#[derive(Debug, Clone)]
pub struct UserTrees {
    first_user: NodeId,
    trees: Vec<PathTree>,
    paths: Vec<Vec<Path>>,
}

impl UserTrees {
    pub fn build(net: &MeshNetwork, h_max: usize) -> Result<Self> {
        let trees = net
            .users()
            .map(|u| build_tree(net, u, h_max))
            .collect::<Result<Vec<_>>>()?;
        let paths = trees.iter().map(valid_paths).collect();
        Ok(Self {
            first_user: net.num_bs(),
            trees,
            paths,
        })
    }

    pub fn users(&self) -> std::ops::Range<NodeId> {
        self.first_user..self.first_user + self.trees.len()
    }

    pub fn tree(&self, user: NodeId) -> &PathTree {
        &self.trees[user - self.first_user]
    }

    pub fn paths(&self, user: NodeId) -> &[Path] {
        &self.paths[user - self.first_user]
    }

    /// Fails with [`Error::NoValidPath`] for the first user without a path.
    pub fn ensure_routable(&self) -> Result<()> {
        match self.users().find(|&u| self.paths(u).is_empty()) {
            Some(u) => Err(Error::NoValidPath(u)),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestPath {
    /// Index into the tree's valid paths.
    pub path_index: usize,
    pub cost_db: f64,
}

/// Widest (max-min SNIR) valid path of `tree` under the interference of
/// `ctx`, found by one depth-first pass with the bottleneck recursion
/// `C(node) = min(SNIR(parent -> node), max over children C(child))`.
///
/// The access link out of the user costs nothing (+inf). Subtrees without a
/// core leaf are skipped. Ties go to the child explored first.
pub fn best_path_in_tree<M: LinkModel>(
    model: &M,
    tree: &PathTree,
    ctx: &InterferenceContext,
    counters: &mut Counters,
) -> Result<BestPath> {
    let (cost_db, leaf) = descend(model, tree, 0, ctx, counters, &mut |_, _| {})
        .ok_or(Error::NoValidPath(tree.root()))?;
    let path_index = tree
        .valid_leaves()
        .binary_search(&leaf)
        .expect("search ends on a core leaf");
    Ok(BestPath {
        path_index,
        cost_db,
    })
}

/// Bottleneck cost of every tree node on the way to its best core leaf,
/// `None` for subtrees that reach no core base station.
pub fn subtree_costs<M: LinkModel>(
    model: &M,
    tree: &PathTree,
    ctx: &InterferenceContext,
) -> Vec<Option<f64>> {
    let mut out = vec![None; tree.node_count()];
    let mut counters = Counters::default();
    descend(model, tree, 0, ctx, &mut counters, &mut |idx, c| {
        out[idx] = Some(c)
    });
    out
}

fn descend<M: LinkModel, R: FnMut(usize, f64)>(
    model: &M,
    tree: &PathTree,
    idx: usize,
    ctx: &InterferenceContext,
    counters: &mut Counters,
    record: &mut R,
) -> Option<(f64, usize)> {
    let node = tree.node(idx);
    if !node.reaches_core {
        return None;
    }
    let (below, leaf) = if node.leaf == Some(LeafKind::Core) {
        (f64::INFINITY, idx)
    } else {
        let mut best: Option<(f64, usize)> = None;
        for &child in &node.children {
            if let Some(found) = descend(model, tree, child, ctx, counters, record) {
                if best.is_none_or(|b| found.0 > b.0) {
                    best = Some(found);
                }
            }
        }
        best?
    };
    let own = match node.parent {
        Some(p) if tree.node(p).parent.is_some() => {
            counters.snir_evals += 1;
            model.link_snir_db(DirectedLink::new(tree.node(p).node, node.node), ctx)
        }
        // the root itself, or the access link out of the user
        _ => f64::INFINITY,
    };
    let cost = own.min(below);
    record(idx, cost);
    Some((cost, leaf))
}

/// Bottleneck SNIR of `path`: the minimum over its backhaul links, or +inf
/// when the user attaches directly to a core base station.
pub fn path_cost<M: LinkModel>(
    model: &M,
    path: &Path,
    ctx: &InterferenceContext,
    counters: &mut Counters,
) -> f64 {
    counters.path_cost_evals += 1;
    path.backhaul_links()
        .iter()
        .map(|&l| {
            counters.snir_evals += 1;
            model.link_snir_db(l, ctx)
        })
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    /// Every group is optimized without seeing the other groups.
    Isolated,
    /// Groups are optimized in order; paths fixed by earlier groups are
    /// active interferers for later ones. Visits exactly the same
    /// combinations as `Isolated`.
    #[default]
    Sequential,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupingPlan {
    pub groups: Vec<Vec<NodeId>>,
    pub mode: SearchMode,
}

impl GroupingPlan {
    /// `num_groups` blocks of consecutive user ids; earlier blocks take the
    /// remainder when the split is uneven.
    pub fn contiguous(net: &MeshNetwork, num_groups: usize, mode: SearchMode) -> Result<Self> {
        let sizes = split_sizes(net.num_users(), num_groups)?;
        let mut next = net.num_bs();
        let groups = sizes
            .into_iter()
            .map(|s| {
                let g: Vec<_> = (next..next + s).collect();
                next += s;
                g
            })
            .collect();
        Ok(Self { groups, mode })
    }

    /// Users dealt to the groups in turn.
    pub fn round_robin(net: &MeshNetwork, num_groups: usize, mode: SearchMode) -> Result<Self> {
        split_sizes(net.num_users(), num_groups)?;
        let mut groups = vec![Vec::new(); num_groups];
        for (k, u) in net.users().enumerate() {
            groups[k % num_groups].push(u);
        }
        Ok(Self { groups, mode })
    }

    pub fn single(net: &MeshNetwork) -> Result<Self> {
        Self::contiguous(net, 1, SearchMode::default())
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        self.groups.iter().map(Vec::len).collect()
    }

    pub fn validate(&self, net: &MeshNetwork) -> Result<()> {
        if self.groups.is_empty() {
            return Err(Error::validation(
                "groups",
                "at least one group is required",
            ));
        }
        let mut seen = vec![false; net.num_nodes()];
        for (k, g) in self.groups.iter().enumerate() {
            if g.is_empty() {
                return Err(Error::validation(format!("groups[{k}]"), "empty group"));
            }
            for &u in g {
                if !net.is_user(u) {
                    return Err(Error::validation(
                        format!("groups[{k}]"),
                        format!("{u} is not a user"),
                    ));
                }
                if std::mem::replace(&mut seen[u], true) {
                    return Err(Error::validation(
                        format!("groups[{k}]"),
                        format!("user {u} appears in more than one group"),
                    ));
                }
            }
        }
        if let Some(u) = net.users().find(|&u| !seen[u]) {
            return Err(Error::validation(
                "groups",
                format!("user {u} is not in any group"),
            ));
        }
        let sizes = self.group_sizes();
        let (lo, hi) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
        if hi - lo > 1 {
            return Err(Error::validation(
                "groups",
                format!("group sizes {sizes:?} differ by more than one"),
            ));
        }
        Ok(())
    }
}

fn split_sizes(num_users: usize, num_groups: usize) -> Result<Vec<usize>> {
    if num_groups == 0 || num_groups > num_users {
        return Err(Error::validation(
            "groups",
            format!("need 1 <= G <= U, got G = {num_groups} with U = {num_users}"),
        ));
    }
    let (base, extra) = (num_users / num_groups, num_users % num_groups);
    Ok((0..num_groups)
        .map(|k| base + usize::from(k < extra))
        .collect())
}

/// Result of optimizing one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupOutcome {
    /// Users of the group in ascending id order.
    pub users: Vec<NodeId>,
    /// Chosen valid-path index per user, aligned with `users`.
    pub chosen: Vec<usize>,
    /// Best combination cost `C_i` found while optimizing each user.
    pub user_costs_db: Vec<f64>,
    /// User whose winning combination was adopted.
    pub winner: NodeId,
    pub cost_db: f64,
    pub counters: Counters,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    cost: f64,
    combo: usize,
    own_path: usize,
}

fn better(a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
    match (a, b) {
        (Some(x), Some(y)) => {
            if y.cost > x.cost || (y.cost == x.cost && y.combo < x.combo) {
                Some(y)
            } else {
                Some(x)
            }
        }
        (x, None) => x,
        (None, y) => y,
    }
}

fn decode(mut combo: usize, radices: &[usize], digits: &mut [usize]) {
    for pos in (0..radices.len()).rev() {
        digits[pos] = combo % radices[pos];
        combo /= radices[pos];
    }
}

/// Runs the combination search over one group of users.
///
/// Combinations of the other users' paths are enumerated in mixed radix
/// order with the highest user id varying fastest; ties in every argmax go
/// to the lowest combination index and then the lowest user id. Evaluations
/// run in parallel, the reduction is order independent.
pub fn route_group<M: LinkModel>(
    model: &M,
    trees: &UserTrees,
    group: &[NodeId],
    fixed_ctx: &InterferenceContext,
) -> Result<GroupOutcome> {
    let mut users = group.to_vec();
    users.sort_unstable();
    users.dedup();
    if users.len() != group.len() || users.is_empty() {
        return Err(Error::Routing(format!("invalid group {group:?}")));
    }
    for &u in &users {
        if trees.paths(u).is_empty() {
            return Err(Error::NoValidPath(u));
        }
    }

    let mut counters = Counters::default();
    let mut user_costs_db = Vec::with_capacity(users.len());
    let mut best: Option<(f64, NodeId, Vec<usize>)> = None;

    for (k, &user) in users.iter().enumerate() {
        let deps: Vec<NodeId> = users.iter().copied().filter(|&d| d != user).collect();
        let radices: Vec<usize> = deps.iter().map(|&d| trees.paths(d).len()).collect();
        let total = radices
            .iter()
            .try_fold(1usize, |acc, &r| acc.checked_mul(r))
            .ok_or_else(|| Error::Routing("combination count overflows".into()))?;

        let evaluate = |combo: usize| -> (Option<Candidate>, Counters) {
            let mut cnt = Counters {
                combinations: 1,
                ..Counters::default()
            };
            let mut digits = vec![0; deps.len()];
            decode(combo, &radices, &mut digits);
            let dep_paths: Vec<&Path> = deps
                .iter()
                .zip(&digits)
                .map(|(&d, &i)| &trees.paths(d)[i])
                .collect();

            let mut ctx = fixed_ctx.clone();
            ctx.extend(
                dep_paths
                    .iter()
                    .flat_map(|p| p.backhaul_links().iter().copied()),
            );
            let own = best_path_in_tree(model, trees.tree(user), &ctx, &mut cnt)
                .expect("user has valid paths");
            let own_path = &trees.paths(user)[own.path_index];

            let mut cost = own.cost_db;
            for (pos, dep) in dep_paths.iter().enumerate() {
                let mut dctx = fixed_ctx.clone();
                dctx.extend(
                    std::iter::once(own_path)
                        .chain(
                            dep_paths
                                .iter()
                                .enumerate()
                                .filter(|&(q, _)| q != pos)
                                .map(|(_, p)| *p),
                        )
                        .flat_map(|p| p.backhaul_links().iter().copied()),
                );
                cost = cost.min(path_cost(model, dep, &dctx, &mut cnt));
            }
            (
                Some(Candidate {
                    cost,
                    combo,
                    own_path: own.path_index,
                }),
                cnt,
            )
        };

        let (cand, cnt) = (0..total).into_par_iter().map(evaluate).reduce(
            || (None, Counters::default()),
            |a, b| (better(a.0, b.0), a.1 + b.1),
        );
        counters += cnt;
        let cand = cand.expect("at least one combination");
        user_costs_db.push(cand.cost);

        if best.as_ref().is_none_or(|b| cand.cost > b.0) {
            let mut digits = vec![0; deps.len()];
            decode(cand.combo, &radices, &mut digits);
            let mut chosen = Vec::with_capacity(users.len());
            let mut it = digits.into_iter();
            for pos in 0..users.len() {
                chosen.push(if pos == k {
                    cand.own_path
                } else {
                    it.next().unwrap()
                });
            }
            best = Some((cand.cost, user, chosen));
        }
    }

    let (cost_db, winner, chosen) = best.expect("group is not empty");
    Ok(GroupOutcome {
        users,
        chosen,
        user_costs_db,
        winner,
        cost_db,
        counters,
    })
}

/// Chosen paths with their costs under full-network interference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub chosen: BTreeMap<NodeId, Path>,
    pub per_user_cost_db: BTreeMap<NodeId, f64>,
    pub active_links: Vec<DirectedLink>,
}

impl Assignment {
    /// Cost of the worst-served user.
    pub fn coa_db(&self) -> f64 {
        coa(self.per_user_cost_db.values().copied()).expect("assignments cover at least one user")
    }
}

#[derive(Debug, Clone)]
pub struct RouteOutcome {
    pub assignment: Assignment,
    pub groups: Vec<GroupOutcome>,
    /// Work spent re-scoring the final assignment.
    pub evaluation: Counters,
}

impl RouteOutcome {
    pub fn counters(&self) -> Counters {
        self.groups
            .iter()
            .fold(self.evaluation, |acc, g| acc + g.counters)
    }
}

/// Routes every group of `plan` and scores the result network-wide.
pub fn route<M: LinkModel>(
    net: &MeshNetwork,
    trees: &UserTrees,
    model: &M,
    plan: &GroupingPlan,
) -> Result<RouteOutcome> {
    plan.validate(net)?;
    trees.ensure_routable()?;
    let mut fixed = InterferenceContext::empty();
    let mut chosen = BTreeMap::new();
    let mut groups = Vec::with_capacity(plan.groups.len());
    for group in &plan.groups {
        let outcome = route_group(model, trees, group, &fixed)?;
        for (&u, &p) in outcome.users.iter().zip(&outcome.chosen) {
            let path = trees.paths(u)[p].clone();
            if plan.mode == SearchMode::Sequential {
                fixed.extend(path.backhaul_links().iter().copied());
            }
            chosen.insert(u, path);
        }
        groups.push(outcome);
    }
    let mut evaluation = Counters::default();
    let assignment = evaluate_assignment_counted(net, model, chosen, &mut evaluation)?;
    Ok(RouteOutcome {
        assignment,
        groups,
        evaluation,
    })
}

/// Cost of every user's path when all other users' paths are active.
pub fn evaluate_assignment<M: LinkModel>(
    net: &MeshNetwork,
    model: &M,
    chosen: BTreeMap<NodeId, Path>,
) -> Result<Assignment> {
    evaluate_assignment_counted(net, model, chosen, &mut Counters::default())
}

pub fn evaluate_assignment_counted<M: LinkModel>(
    net: &MeshNetwork,
    model: &M,
    chosen: BTreeMap<NodeId, Path>,
    counters: &mut Counters,
) -> Result<Assignment> {
    if net.num_users() == 0 {
        return Err(Error::Routing("network has no users".into()));
    }
    for u in net.users() {
        match chosen.get(&u) {
            Some(p) if p.user() == u => {}
            Some(_) => {
                return Err(Error::Routing(format!(
                    "path for user {u} starts elsewhere"
                )))
            }
            None => return Err(Error::Routing(format!("user {u} has no chosen path"))),
        }
    }
    if chosen.len() != net.num_users() {
        return Err(Error::Routing(
            "assignment contains non-user entries".into(),
        ));
    }
    let paths: Vec<&Path> = chosen.values().collect();
    let costs = path_costs_with_others(model, &paths, counters);
    let per_user_cost_db = chosen.keys().copied().zip(costs).collect();
    let mut active_links: Vec<DirectedLink> = paths
        .iter()
        .flat_map(|p| p.backhaul_links().iter().copied())
        .collect();
    active_links.sort_unstable();
    active_links.dedup();
    Ok(Assignment {
        chosen,
        per_user_cost_db,
        active_links,
    })
}

/// Cost of each path while the backhaul links of all the other paths are
/// active.
pub fn path_costs_with_others<M: LinkModel>(
    model: &M,
    paths: &[&Path],
    counters: &mut Counters,
) -> Vec<f64> {
    let mut usage: BTreeMap<DirectedLink, u32> = BTreeMap::new();
    for p in paths {
        for &l in p.backhaul_links() {
            *usage.entry(l).or_default() += 1;
        }
    }
    paths
        .iter()
        .map(|p| {
            let own = p.backhaul_links();
            let ctx: InterferenceContext = usage
                .iter()
                .filter(|&(l, &n)| n > u32::from(own.contains(l)))
                .map(|(&l, _)| l)
                .collect();
            path_cost(model, p, &ctx, counters)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linkbudget::RadioConfig;
    use crate::model::{CountingModel, RadioModel};
    use crate::topology::{generate_network, GenParams};

    fn setup(b: usize, u: usize, c: usize, seed: u64) -> (MeshNetwork, UserTrees, RadioModel) {
        let net = generate_network(&GenParams::new(b, u, c, seed)).unwrap();
        let trees = UserTrees::build(&net, 4).unwrap();
        let model = RadioModel::new(&net, &RadioConfig::default()).unwrap();
        (net, trees, model)
    }

    #[test]
    fn plan_sizes() {
        let net = generate_network(&GenParams::new(30, 15, 5, 2)).unwrap();
        let plan = GroupingPlan::contiguous(&net, 6, SearchMode::Isolated).unwrap();
        assert_eq!(plan.group_sizes(), vec![3, 3, 3, 2, 2, 2]);
        plan.validate(&net).unwrap();
        let rr = GroupingPlan::round_robin(&net, 6, SearchMode::Isolated).unwrap();
        assert_eq!(rr.groups[0], vec![30, 36, 42]);
        rr.validate(&net).unwrap();
        assert!(GroupingPlan::contiguous(&net, 0, SearchMode::Isolated).is_err());
        assert!(GroupingPlan::contiguous(&net, 16, SearchMode::Isolated).is_err());
        let even = GroupingPlan::contiguous(&net, 5, SearchMode::Isolated).unwrap();
        assert_eq!(even.group_sizes(), vec![3; 5]);
    }

    #[test]
    fn plan_validation_catches_overlap_and_gaps() {
        let net = generate_network(&GenParams::new(10, 4, 3, 2)).unwrap();
        let overlap = GroupingPlan {
            groups: vec![vec![10, 11], vec![11, 12, 13]],
            mode: SearchMode::Isolated,
        };
        assert!(overlap.validate(&net).is_err());
        let gap = GroupingPlan {
            groups: vec![vec![10, 11], vec![12]],
            mode: SearchMode::Isolated,
        };
        assert!(gap.validate(&net).is_err());
        let lopsided = GroupingPlan {
            groups: vec![vec![10, 11, 12], vec![13]],
            mode: SearchMode::Isolated,
        };
        assert!(lopsided.validate(&net).is_err());
    }

    #[test]
    fn single_path_cost_is_min_of_links() {
        let (net, trees, model) = setup(10, 2, 2, 11);
        let ctx = InterferenceContext::empty();
        for u in net.users() {
            for p in trees.paths(u) {
                let mut c = Counters::default();
                let cost = path_cost(&model, p, &ctx, &mut c);
                let expected = p
                    .backhaul_links()
                    .iter()
                    .map(|&l| model.link_snir_db(l, &ctx))
                    .fold(f64::INFINITY, f64::min);
                assert_eq!(cost, expected);
                assert_eq!(c.snir_evals as usize, p.hops() - 1);
            }
        }
    }

    #[test]
    fn tree_search_matches_path_enumeration() {
        for seed in 0..20 {
            let (net, trees, model) = setup(10, 3, 2, seed);
            let other = net.users().last().unwrap();
            let ctx: InterferenceContext = trees.paths(other)[0]
                .backhaul_links()
                .iter()
                .copied()
                .collect();
            for u in net.users() {
                let mut c = Counters::default();
                let best = best_path_in_tree(&model, trees.tree(u), &ctx, &mut c).unwrap();
                let brute = trees
                    .paths(u)
                    .iter()
                    .map(|p| path_cost(&model, p, &ctx, &mut Counters::default()))
                    .fold(f64::NEG_INFINITY, f64::max);
                assert_eq!(best.cost_db, brute, "seed {seed} user {u}");
                let chosen = &trees.paths(u)[best.path_index];
                assert_eq!(
                    path_cost(&model, chosen, &ctx, &mut Counters::default()),
                    brute
                );
                assert!(c.snir_evals as usize <= trees.tree(u).node_count());
            }
        }
    }

    #[test]
    fn recursion_trace_is_consistent() {
        let (net, trees, model) = setup(12, 2, 2, 4);
        let ctx = InterferenceContext::empty();
        for u in net.users() {
            let tree = trees.tree(u);
            let costs = subtree_costs(&model, tree, &ctx);
            for (idx, node) in tree.nodes().iter().enumerate() {
                let Some(c) = costs[idx] else { continue };
                let own = match node.parent {
                    Some(p) if tree.node(p).parent.is_some() => {
                        model.link_snir_db(DirectedLink::new(tree.node(p).node, node.node), &ctx)
                    }
                    _ => f64::INFINITY,
                };
                let below = node
                    .children
                    .iter()
                    .filter_map(|&ch| costs[ch])
                    .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))))
                    .unwrap_or(f64::INFINITY);
                assert_eq!(c, own.min(below));
            }
        }
    }

    #[test]
    fn singleton_group_takes_widest_path() {
        let (net, trees, model) = setup(10, 3, 2, 8);
        let u = net.users().next().unwrap();
        let out = route_group(&model, &trees, &[u], &InterferenceContext::empty()).unwrap();
        let widest = trees
            .paths(u)
            .iter()
            .map(|p| {
                path_cost(
                    &model,
                    p,
                    &InterferenceContext::empty(),
                    &mut Counters::default(),
                )
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(out.cost_db, widest);
        assert_eq!(out.counters.combinations, 1);
    }

    #[test]
    fn combination_counts_per_user() {
        // Find an instance with two users and a handful of paths.
        for seed in 0..200 {
            let (net, trees, model) = setup(8, 2, 2, seed);
            let users: Vec<_> = net.users().collect();
            let n0 = trees.paths(users[0]).len() as u64;
            let n1 = trees.paths(users[1]).len() as u64;
            let out = route_group(&model, &trees, &users, &InterferenceContext::empty()).unwrap();
            assert_eq!(out.counters.combinations, n0 + n1);
            assert_eq!(out.counters.path_cost_evals, n0 + n1);
        }
    }

    #[test]
    fn counters_match_counting_decorator() {
        for seed in 0..10 {
            let (net, trees, model) = setup(12, 4, 3, seed);
            let counted = CountingModel::new(&model);
            let plan = GroupingPlan::contiguous(&net, 2, SearchMode::Sequential).unwrap();
            let out = route(&net, &trees, &counted, &plan).unwrap();
            assert_eq!(out.counters().snir_evals, counted.calls());
        }
    }

    #[test]
    fn sequential_and_isolated_agree_for_one_group() {
        let (net, trees, model) = setup(10, 3, 2, 21);
        let a = route(&net, &trees, &model, &GroupingPlan::single(&net).unwrap()).unwrap();
        let b = route(
            &net,
            &trees,
            &model,
            &GroupingPlan::contiguous(&net, 1, SearchMode::Sequential).unwrap(),
        )
        .unwrap();
        assert_eq!(a.assignment, b.assignment);
    }

    #[test]
    fn evaluation_requires_every_user() {
        let (net, trees, model) = setup(10, 3, 2, 3);
        let mut chosen: BTreeMap<_, _> = net
            .users()
            .map(|u| (u, trees.paths(u)[0].clone()))
            .collect();
        assert!(evaluate_assignment(&net, &model, chosen.clone()).is_ok());
        chosen.remove(&net.num_bs());
        assert!(evaluate_assignment(&net, &model, chosen).is_err());
    }

    #[test]
    fn coa_is_order_free() {
        let (net, trees, model) = setup(10, 3, 2, 6);
        let chosen: BTreeMap<_, _> = net
            .users()
            .map(|u| (u, trees.paths(u).last().unwrap().clone()))
            .collect();
        let a = evaluate_assignment(&net, &model, chosen.clone()).unwrap();
        let paths: Vec<&Path> = chosen.values().rev().collect();
        let costs = path_costs_with_others(&model, &paths, &mut Counters::default());
        let b = coa(costs).unwrap();
        assert_eq!(a.coa_db(), b);
    }
}
