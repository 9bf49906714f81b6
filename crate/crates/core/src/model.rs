//! Link SNIR evaluation behind a trait, so routing code can be instrumented
//! or backed by precomputed tables.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::Result;
use crate::linkbudget::{
    dbm_to_mw, interference_power_dbm, is_excluded, link_received_power_dbm, mw_to_dbm,
    DirectedLink, InterferenceContext, RadioConfig,
};
use crate::topology::MeshNetwork;

/// Evaluates the SNIR of one backhaul link given the active links.
pub trait LinkModel: Sync {
    fn link_snir_db(&self, link: DirectedLink, ctx: &InterferenceContext) -> f64;
}

impl<M: LinkModel + ?Sized> LinkModel for &M {
    fn link_snir_db(&self, link: DirectedLink, ctx: &InterferenceContext) -> f64 {
        (**self).link_snir_db(link, ctx)
    }
}

/// Link budget of a fixed network, with every received power and every
/// pairwise interference term precomputed.
///
/// Results are bit-identical to [`crate::linkbudget::link_snir_db`]: the
/// stored terms are the same values and they are summed in the same order.
#[derive(Debug, Clone)]
pub struct RadioModel {
    cfg: RadioConfig,
    noise_mw: f64,
    num_nodes: usize,
    /// `slots[tx * num_nodes + rx]`: position of the link in the tables.
    slots: Vec<u32>,
    rx_power_dbm: Vec<f64>,
    /// `interference_mw[v * n + t]`: power of link `t` at the receiver of `v`.
    interference_mw: Vec<f64>,
}

impl RadioModel {
    pub fn new(net: &MeshNetwork, cfg: &RadioConfig) -> Result<Self> {
        cfg.validate()?;
        let mut links = Vec::new();
        for (i, j) in net.edges() {
            if net.is_bs(i) && net.is_bs(j) {
                links.push(DirectedLink::new(i, j));
                links.push(DirectedLink::new(j, i));
            }
        }
        links.sort_unstable();
        let n = links.len();
        let num_nodes = net.num_nodes();
        let mut slots = vec![u32::MAX; num_nodes * num_nodes];
        for (k, l) in links.iter().enumerate() {
            slots[l.tx * num_nodes + l.rx] = k as u32;
        }
        let rx_power_dbm = links
            .iter()
            .map(|&l| link_received_power_dbm(l, net, cfg))
            .collect::<Result<Vec<_>>>()?;
        let mut interference_mw = vec![0.0; n * n];
        for (v, &victim) in links.iter().enumerate() {
            for (t, &other) in links.iter().enumerate() {
                if !is_excluded(victim, other) {
                    interference_mw[v * n + t] =
                        dbm_to_mw(interference_power_dbm(victim, other, net, cfg)?);
                }
            }
        }
        Ok(Self {
            cfg: *cfg,
            noise_mw: dbm_to_mw(cfg.noise_dbm),
            num_nodes,
            slots,
            rx_power_dbm,
            interference_mw,
        })
    }

    pub fn config(&self) -> &RadioConfig {
        &self.cfg
    }

    /// The same network with a different noise power; no recomputation of
    /// the propagation terms is needed.
    pub fn with_noise_dbm(&self, noise_dbm: f64) -> Self {
        let mut out = self.clone();
        out.cfg.noise_dbm = noise_dbm;
        out.noise_mw = dbm_to_mw(noise_dbm);
        out
    }

    pub fn num_links(&self) -> usize {
        self.rx_power_dbm.len()
    }

    fn slot(&self, link: DirectedLink) -> usize {
        let slot = if link.tx < self.num_nodes && link.rx < self.num_nodes {
            self.slots[link.tx * self.num_nodes + link.rx]
        } else {
            u32::MAX
        };
        assert!(
            slot != u32::MAX,
            "{link:?} is not a backhaul link of this network"
        );
        slot as usize
    }
}

impl LinkModel for RadioModel {
    fn link_snir_db(&self, link: DirectedLink, ctx: &InterferenceContext) -> f64 {
        let n = self.rx_power_dbm.len();
        let v = self.slot(link);
        let row = &self.interference_mw[v * n..(v + 1) * n];
        let mut denom = self.noise_mw;
        for other in ctx.interferers(link) {
            denom += row[self.slot(other)];
        }
        self.rx_power_dbm[v] - mw_to_dbm(denom)
    }
}

/// Counts every SNIR evaluation passed through to the inner model.
#[derive(Debug, Default)]
pub struct CountingModel<M> {
    inner: M,
    calls: AtomicU64,
}

impl<M> CountingModel<M> {
    pub fn new(inner: M) -> Self {
        Self {
            inner,
            calls: AtomicU64::new(0),
        }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn reset(&self) -> u64 {
        self.calls.swap(0, Ordering::Relaxed)
    }

    pub fn inner(&self) -> &M {
        &self.inner
    }
}

impl<M: LinkModel> LinkModel for CountingModel<M> {
    fn link_snir_db(&self, link: DirectedLink, ctx: &InterferenceContext) -> f64 {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.link_snir_db(link, ctx)
    }
}
