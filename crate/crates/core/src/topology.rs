//! Mesh network model: base stations, core base stations and users placed in
//! the plane, plus the random generator used for experiments.
//!
//! Node ids follow one layout throughout the crate: base stations occupy
//! `0..num_bs` and users occupy `num_bs..num_bs + num_users`.

use std::collections::VecDeque;
use std::fs;
use std::path::Path as FsPath;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = usize;

pub type Point = [f64; 2];

/// Anything that can place node ids in the plane.
pub trait Geometry {
    fn position(&self, node: NodeId) -> Point;

    fn distance_m(&self, a: NodeId, b: NodeId) -> Result<f64> {
        let d = euclidean(self.position(a), self.position(b));
        if d > 0.0 {
            Ok(d)
        } else {
            Err(Error::domain(format!(
                "nodes {a} and {b} have coincident coordinates"
            )))
        }
    }

    /// Unsigned angle in `[0, pi]` at `at` between the rays toward `a` and `b`.
    fn angle_at(&self, at: NodeId, a: NodeId, b: NodeId) -> Result<f64> {
        angle_between(self.position(at), self.position(a), self.position(b)).map_err(|_| {
            Error::domain(format!(
                "angle at node {at} toward {a} and {b} is undefined"
            ))
        })
    }
}

impl Geometry for [Point] {
    fn position(&self, node: NodeId) -> Point {
        self[node]
    }
}

impl Geometry for Vec<Point> {
    fn position(&self, node: NodeId) -> Point {
        self[node]
    }
}

pub fn euclidean(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Angle at `at` between the rays toward `a` and `b`.
pub fn angle_between(at: Point, a: Point, b: Point) -> Result<f64> {
    let u = [a[0] - at[0], a[1] - at[1]];
    let v = [b[0] - at[0], b[1] - at[1]];
    if (u[0] == 0.0 && u[1] == 0.0) || (v[0] == 0.0 && v[1] == 0.0) {
        return Err(Error::domain("angle with a zero-length ray"));
    }
    let cross = u[0] * v[1] - u[1] * v[0];
    let dot = u[0] * v[0] + u[1] * v[1];
    Ok(cross.abs().atan2(dot))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshNetwork {
    num_bs: usize,
    num_users: usize,
    core_ids: Vec<NodeId>,
    is_core: Vec<bool>,
    coords: Vec<Point>,
    adjacency: Vec<bool>,
    neighbors: Vec<Vec<NodeId>>,
}

impl MeshNetwork {
    /// Builds a network from an undirected edge list, checking every
    /// structural invariant.
    pub fn new(
        num_bs: usize,
        num_users: usize,
        core_ids: Vec<NodeId>,
        coords: Vec<Point>,
        edges: &[(NodeId, NodeId)],
    ) -> Result<Self> {
        let n = num_bs + num_users;
        if coords.len() != n {
            return Err(Error::validation(
                "coords",
                format!("expected {n} positions, found {}", coords.len()),
            ));
        }
        for (i, c) in coords.iter().enumerate() {
            if !c[0].is_finite() || !c[1].is_finite() {
                return Err(Error::validation(format!("coords[{i}]"), "not finite"));
            }
        }
        let mut core_ids = core_ids;
        core_ids.sort_unstable();
        let mut is_core = vec![false; n];
        for (k, &c) in core_ids.iter().enumerate() {
            if c >= num_bs {
                return Err(Error::validation(
                    "core_ids",
                    format!("{c} is not a base station id (< {num_bs})"),
                ));
            }
            if k > 0 && core_ids[k - 1] == c {
                return Err(Error::validation("core_ids", format!("duplicate id {c}")));
            }
            is_core[c] = true;
        }
        let mut adjacency = vec![false; n * n];
        for (k, &(i, j)) in edges.iter().enumerate() {
            if i >= n || j >= n {
                return Err(Error::validation(
                    format!("edges[{k}]"),
                    format!("[{i}, {j}] references a node outside 0..{n}"),
                ));
            }
            if i == j {
                return Err(Error::validation(
                    format!("edges[{k}]"),
                    format!("self loop on node {i}"),
                ));
            }
            adjacency[i * n + j] = true;
            adjacency[j * n + i] = true;
        }
        Self::from_matrix(num_bs, num_users, core_ids, is_core, coords, adjacency)
    }

    fn from_matrix(
        num_bs: usize,
        num_users: usize,
        core_ids: Vec<NodeId>,
        is_core: Vec<bool>,
        coords: Vec<Point>,
        adjacency: Vec<bool>,
    ) -> Result<Self> {
        let n = num_bs + num_users;
        let mut neighbors = vec![Vec::new(); n];
        for i in 0..n {
            if adjacency[i * n + i] {
                return Err(Error::validation(
                    "adjacency",
                    format!("nonzero diagonal at {i}"),
                ));
            }
            for j in 0..n {
                if adjacency[i * n + j] != adjacency[j * n + i] {
                    return Err(Error::validation(
                        "adjacency",
                        format!("asymmetric entry between {i} and {j}"),
                    ));
                }
                if adjacency[i * n + j] {
                    neighbors[i].push(j);
                }
            }
        }
        for (user, nbrs) in neighbors.iter().enumerate().skip(num_bs) {
            if nbrs.len() != 2 {
                return Err(Error::validation(
                    "edges",
                    format!("user {user} has degree {} (expected 2)", nbrs.len()),
                ));
            }
            if let Some(&other) = nbrs.iter().find(|&&j| j >= num_bs) {
                return Err(Error::validation(
                    "edges",
                    format!("user {user} is linked to user {other}"),
                ));
            }
        }
        Ok(Self {
            num_bs,
            num_users,
            core_ids,
            is_core,
            coords,
            adjacency,
            neighbors,
        })
    }

    pub fn num_bs(&self) -> usize {
        self.num_bs
    }

    pub fn num_users(&self) -> usize {
        self.num_users
    }

    pub fn num_nodes(&self) -> usize {
        self.num_bs + self.num_users
    }

    pub fn num_core(&self) -> usize {
        self.core_ids.len()
    }

    pub fn core_ids(&self) -> &[NodeId] {
        &self.core_ids
    }

    pub fn coords(&self) -> &[Point] {
        &self.coords
    }

    pub fn users(&self) -> std::ops::Range<NodeId> {
        self.num_bs..self.num_nodes()
    }

    pub fn is_bs(&self, i: NodeId) -> bool {
        i < self.num_bs
    }

    pub fn is_user(&self, i: NodeId) -> bool {
        i >= self.num_bs && i < self.num_nodes()
    }

    pub fn is_core(&self, i: NodeId) -> bool {
        self.is_core.get(i).copied().unwrap_or(false)
    }

    pub fn is_adjacent(&self, i: NodeId, j: NodeId) -> bool {
        let n = self.num_nodes();
        i < n && j < n && self.adjacency[i * n + j]
    }

    /// Neighbors of `i` in ascending id order.
    pub fn neighbors(&self, i: NodeId) -> Result<&[NodeId]> {
        self.neighbors
            .get(i)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::domain(format!("node {i} out of range 0..{}", self.num_nodes())))
    }

    /// Undirected edges as `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::new();
        for (i, nbrs) in self.neighbors.iter().enumerate() {
            out.extend(nbrs.iter().filter(|&&j| j > i).map(|&j| (i, j)));
        }
        out
    }

    /// Whether `user` can reach a core base station in at most `h_max` links
    /// without passing through another user.
    pub fn has_valid_path(&self, user: NodeId, h_max: usize) -> bool {
        let mut hops = vec![usize::MAX; self.num_nodes()];
        let mut queue = VecDeque::new();
        hops[user] = 0;
        queue.push_back(user);
        while let Some(i) = queue.pop_front() {
            if hops[i] >= h_max {
                continue;
            }
            for &j in &self.neighbors[i] {
                if !self.is_bs(j) || hops[j] != usize::MAX {
                    continue;
                }
                hops[j] = hops[i] + 1;
                if self.is_core(j) {
                    return true;
                }
                queue.push_back(j);
            }
        }
        false
    }
}

impl Geometry for MeshNetwork {
    fn position(&self, node: NodeId) -> Point {
        self.coords[node]
    }
}

/// `supp(row i) \ {i}` of the adjacency matrix.
pub fn neighbors(net: &MeshNetwork, i: NodeId) -> Result<&[NodeId]> {
    net.neighbors(i)
}

pub fn distance_m(net: &MeshNetwork, i: NodeId, j: NodeId) -> Result<f64> {
    check_ids(net, &[i, j])?;
    net.distance_m(i, j)
}

pub fn angle_at(net: &MeshNetwork, at: NodeId, toward_a: NodeId, toward_b: NodeId) -> Result<f64> {
    check_ids(net, &[at, toward_a, toward_b])?;
    net.angle_at(at, toward_a, toward_b)
}

fn check_ids(net: &MeshNetwork, ids: &[NodeId]) -> Result<()> {
    match ids.iter().find(|&&i| i >= net.num_nodes()) {
        Some(i) => Err(Error::domain(format!(
            "node {i} out of range 0..{}",
            net.num_nodes()
        ))),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub num_bs: usize,
    pub num_users: usize,
    pub num_core: usize,
    pub grid_side_m: f64,
    pub min_bs_sep_m: f64,
    pub bs_link_radius_m: f64,
    pub bs_link_prob: f64,
    /// Hop limit used for the "every user has a valid path" acceptance check.
    pub h_max: usize,
    pub seed: u64,
    pub max_retries: usize,
}

/// 0.01 degree of longitude at the equator.
pub const DEFAULT_GRID_SIDE_M: f64 = 1113.2;

impl GenParams {
    pub fn new(num_bs: usize, num_users: usize, num_core: usize, seed: u64) -> Self {
        Self {
            num_bs,
            num_users,
            num_core,
            grid_side_m: DEFAULT_GRID_SIDE_M,
            min_bs_sep_m: 40.0,
            bs_link_radius_m: 500.0,
            bs_link_prob: 0.5,
            h_max: 4,
            seed,
            max_retries: 1000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_core > self.num_bs {
            return Err(Error::validation(
                "core",
                format!(
                    "number of core base stations ({}) exceeds number of base stations ({})",
                    self.num_core, self.num_bs
                ),
            ));
        }
        if self.num_core == 0 {
            return Err(Error::validation(
                "core",
                "at least one core base station is required",
            ));
        }
        if self.num_users > 0 && self.num_bs < 2 {
            return Err(Error::validation(
                "bs",
                "users attach to two base stations, so at least 2 are required",
            ));
        }
        if !self.grid_side_m.is_finite() || self.grid_side_m <= 0.0 {
            return Err(Error::validation(
                "grid_side_m",
                "must be positive and finite",
            ));
        }
        if self.min_bs_sep_m.is_nan()
            || self.min_bs_sep_m < 0.0
            || self.min_bs_sep_m >= self.grid_side_m
        {
            return Err(Error::validation(
                "min_bs_sep_m",
                "must be non-negative and smaller than the grid side",
            ));
        }
        if self.bs_link_radius_m.is_nan() || self.bs_link_radius_m <= 0.0 {
            return Err(Error::validation("bs_link_radius_m", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.bs_link_prob) {
            return Err(Error::validation("bs_link_prob", "must lie in [0, 1]"));
        }
        if self.h_max == 0 {
            return Err(Error::validation("h_max", "must be at least 1"));
        }
        if self.max_retries == 0 {
            return Err(Error::validation("max_retries", "must be at least 1"));
        }
        Ok(())
    }
}

const PLACEMENT_ATTEMPTS_PER_BS: usize = 10_000;

/// Random network: base stations uniformly in the square with a minimum
/// separation, random links between nearby base stations, users attached to
/// their two nearest base stations. Networks where some user cannot reach a
/// core base station within `h_max` links are redrawn.
pub fn generate_network(params: &GenParams) -> Result<MeshNetwork> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    for _ in 0..params.max_retries {
        let net = sample_network(params, &mut rng)?;
        if net.users().all(|u| net.has_valid_path(u, params.h_max)) {
            return Ok(net);
        }
    }
    Err(Error::Generation(format!(
        "no network with a valid path for every user after {} attempts",
        params.max_retries
    )))
}

fn sample_network(params: &GenParams, rng: &mut ChaCha8Rng) -> Result<MeshNetwork> {
    let side = params.grid_side_m;
    let (b, u) = (params.num_bs, params.num_users);
    let mut coords: Vec<Point> = Vec::with_capacity(b + u);
    let mut attempts = 0;
    while coords.len() < b {
        attempts += 1;
        if attempts > PLACEMENT_ATTEMPTS_PER_BS * b {
            return Err(Error::Generation(format!(
                "could not place {b} base stations {} m apart in a {side} m square",
                params.min_bs_sep_m
            )));
        }
        let p = [rng.gen_range(0.0..side), rng.gen_range(0.0..side)];
        if coords
            .iter()
            .all(|&q| euclidean(p, q) >= params.min_bs_sep_m)
        {
            coords.push(p);
        }
    }

    let mut core_ids = sample(rng, b, params.num_core).into_vec();
    core_ids.sort_unstable();

    let mut edges = Vec::new();
    for i in 0..b {
        for j in i + 1..b {
            if euclidean(coords[i], coords[j]) <= params.bs_link_radius_m
                && rng.gen_bool(params.bs_link_prob)
            {
                edges.push((i, j));
            }
        }
    }

    for k in 0..u {
        let p = [rng.gen_range(0.0..side), rng.gen_range(0.0..side)];
        let mut by_distance: Vec<(f64, NodeId)> =
            (0..b).map(|i| (euclidean(p, coords[i]), i)).collect();
        by_distance.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        coords.push(p);
        edges.push((by_distance[0].1, b + k));
        edges.push((by_distance[1].1, b + k));
    }

    MeshNetwork::new(b, u, core_ids, coords, &edges)
}

/// On-disk form of a network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub b: usize,
    pub u: usize,
    pub core_ids: Vec<NodeId>,
    pub coords: Vec<Point>,
    pub edges: Vec<[NodeId; 2]>,
}

impl From<&MeshNetwork> for NetworkFile {
    fn from(net: &MeshNetwork) -> Self {
        Self {
            b: net.num_bs,
            u: net.num_users,
            core_ids: net.core_ids.clone(),
            coords: net.coords.clone(),
            edges: net.edges().into_iter().map(|(i, j)| [i, j]).collect(),
        }
    }
}

impl TryFrom<NetworkFile> for MeshNetwork {
    type Error = Error;

    fn try_from(file: NetworkFile) -> Result<Self> {
        for (k, e) in file.edges.iter().enumerate() {
            if e[0] >= e[1] {
                return Err(Error::validation(
                    format!("edges[{k}]"),
                    format!("[{}, {}] must satisfy i < j", e[0], e[1]),
                ));
            }
        }
        let edges: Vec<_> = file.edges.iter().map(|e| (e[0], e[1])).collect();
        MeshNetwork::new(file.b, file.u, file.core_ids, file.coords, &edges)
    }
}

pub fn network_to_json(net: &MeshNetwork) -> String {
    let mut s = serde_json::to_string_pretty(&NetworkFile::from(net))
        .expect("network serialization cannot fail");
    s.push('\n');
    s
}

pub fn network_from_json(text: &str) -> Result<MeshNetwork> {
    let file: NetworkFile = serde_json::from_str(text)?;
    MeshNetwork::try_from(file)
}

pub fn save_network(net: &MeshNetwork, path: impl AsRef<FsPath>) -> Result<()> {
    fs::write(path, network_to_json(net))?;
    Ok(())
}

pub fn load_network(path: impl AsRef<FsPath>) -> Result<MeshNetwork> {
    network_from_json(&fs::read_to_string(path)?)
}
