//! Link budget for the 60 GHz backhaul links between base stations.
//!
//! Powers are in dBm, gains and losses in dB. Interference and noise are
//! always summed in linear milliwatts before converting back, so a link's
//! SNIR is `P_rx - 10 log10(P_noise + sum P_in)` with every term in mW.
//!
//! Antennas are modelled with a sinc-shaped main lobe clamped at a floor:
//!
//! ```text
//! G(theta) = G0 + max(floor, 20 log10 |sin(Bw theta) / (Bw theta)|)
//! ```
//!
//! Every established link is assumed to have both ends aimed at each other,
//! so the wanted signal always sees `G(0)` at both ends while interference
//! arrives off-boresight.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::{angle_between, Geometry, NodeId};

/// Speed of light used in the path-loss term, m/s. The rounded value keeps
/// results in line with the usual link-budget tables (108.005 dB of free
/// space loss for 100 m at 60 GHz).
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioConfig {
    pub tx_power_dbm: f64,
    pub carrier_hz: f64,
    pub rain_margin_db_per_m: f64,
    pub o2_atten_db_per_m: f64,
    pub boresight_gain_db: f64,
    pub noise_dbm: f64,
    /// Main-lobe shape factor `Bw` of the sinc pattern, rad^-1.
    pub pattern_shape: f64,
    /// Relative gain floor of the pattern, dB (<= 0).
    pub pattern_floor_db: f64,
    /// When set, `tx_power_dbm` is read as EIRP and the transmit antenna's
    /// boresight gain is not added again.
    pub eirp_mode: bool,
}

impl Default for RadioConfig {
    fn default() -> Self {
        Self {
            tx_power_dbm: 30.0,
            carrier_hz: 60e9,
            rain_margin_db_per_m: 0.0205,
            o2_atten_db_per_m: 0.016,
            boresight_gain_db: 20.0,
            noise_dbm: -100.0,
            pattern_shape: 10.0,
            pattern_floor_db: -30.0,
            eirp_mode: false,
        }
    }
}

impl RadioConfig {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("tx_power_dbm", self.tx_power_dbm),
            ("carrier_hz", self.carrier_hz),
            ("rain_margin_db_per_m", self.rain_margin_db_per_m),
            ("o2_atten_db_per_m", self.o2_atten_db_per_m),
            ("boresight_gain_db", self.boresight_gain_db),
            ("noise_dbm", self.noise_dbm),
            ("pattern_shape", self.pattern_shape),
            ("pattern_floor_db", self.pattern_floor_db),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::validation(name, "must be finite"));
            }
        }
        if self.carrier_hz <= 0.0 {
            return Err(Error::validation("carrier_hz", "must be > 0"));
        }
        if self.rain_margin_db_per_m < 0.0 {
            return Err(Error::validation("rain_margin_db_per_m", "must be >= 0"));
        }
        if self.o2_atten_db_per_m < 0.0 {
            return Err(Error::validation("o2_atten_db_per_m", "must be >= 0"));
        }
        if self.pattern_shape <= 0.0 {
            return Err(Error::validation("pattern_shape", "must be > 0"));
        }
        if self.pattern_floor_db > 0.0 {
            return Err(Error::validation("pattern_floor_db", "must be <= 0"));
        }
        Ok(())
    }

    /// Same configuration with a different receiver noise power.
    pub fn with_noise_dbm(mut self, noise_dbm: f64) -> Self {
        self.noise_dbm = noise_dbm;
        self
    }

    fn tx_gain_db(&self, theta_rad: f64) -> f64 {
        let g = antenna_gain_db(theta_rad, self);
        if self.eirp_mode {
            g - self.boresight_gain_db
        } else {
            g
        }
    }

    fn atmospheric_loss_db(&self, distance_m: f64) -> f64 {
        distance_m * self.rain_margin_db_per_m + distance_m * self.o2_atten_db_per_m
    }
}

/// A transmission from `tx` to `rx`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DirectedLink {
    pub tx: NodeId,
    pub rx: NodeId,
}

impl DirectedLink {
    pub fn new(tx: NodeId, rx: NodeId) -> Self {
        assert_ne!(tx, rx, "a link needs two distinct endpoints");
        Self { tx, rx }
    }

    pub fn reversed(self) -> Self {
        Self {
            tx: self.rx,
            rx: self.tx,
        }
    }
}

/// Whether `candidate` is left out of the interference seen by `victim`.
///
/// A link never interferes with itself, a node does not interfere with its
/// own receiver, and a base station has a single transmit beam, so another
/// transmission from the victim's transmitter is not counted either.
pub fn is_excluded(victim: DirectedLink, candidate: DirectedLink) -> bool {
    candidate == victim || candidate.tx == victim.rx || candidate.tx == victim.tx
}

/// The set of concurrently active backhaul links.
///
/// Stored sorted and deduplicated so that interference sums are always
/// accumulated in the same order, whatever order the links were supplied in.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct InterferenceContext {
    links: Vec<DirectedLink>,
}

impl InterferenceContext {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn links(&self) -> &[DirectedLink] {
        &self.links
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn contains(&self, link: DirectedLink) -> bool {
        self.links.binary_search(&link).is_ok()
    }

    pub fn insert(&mut self, link: DirectedLink) {
        if let Err(pos) = self.links.binary_search(&link) {
            self.links.insert(pos, link);
        }
    }

    pub fn extend<I: IntoIterator<Item = DirectedLink>>(&mut self, links: I) {
        self.links.extend(links);
        self.links.sort_unstable();
        self.links.dedup();
    }

    /// Links of the context that interfere with `victim`.
    pub fn interferers(&self, victim: DirectedLink) -> impl Iterator<Item = DirectedLink> + '_ {
        self.links
            .iter()
            .copied()
            .filter(move |&l| !is_excluded(victim, l))
    }
}

impl FromIterator<DirectedLink> for InterferenceContext {
    fn from_iter<I: IntoIterator<Item = DirectedLink>>(iter: I) -> Self {
        let mut links: Vec<_> = iter.into_iter().collect();
        links.sort_unstable();
        links.dedup();
        Self { links }
    }
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

/// Converts milliwatts to dBm; zero power maps to negative infinity.
pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// Free-space path loss `20 log10(4 pi f d / c)` in dB.
pub fn fspl_db(carrier_hz: f64, distance_m: f64) -> Result<f64> {
    if carrier_hz.is_nan() || carrier_hz <= 0.0 {
        return Err(Error::domain(format!(
            "carrier frequency must be positive, got {carrier_hz} Hz"
        )));
    }
    if distance_m.is_nan() || distance_m <= 0.0 {
        return Err(Error::domain(format!(
            "distance must be positive, got {distance_m} m"
        )));
    }
    Ok(20.0 * (4.0 * PI * carrier_hz * distance_m / SPEED_OF_LIGHT).log10())
}

/// Antenna gain in dB at `theta_rad` off boresight.
pub fn antenna_gain_db(theta_rad: f64, cfg: &RadioConfig) -> f64 {
    let x = cfg.pattern_shape * theta_rad;
    let sinc = if x == 0.0 { 1.0 } else { x.sin() / x };
    let relative = 20.0 * sinc.abs().log10();
    // log10(0) is -inf, which the floor absorbs.
    cfg.boresight_gain_db + relative.max(cfg.pattern_floor_db)
}

/// Received power over an established link of length `distance_m`.
pub fn received_power_dbm(distance_m: f64, cfg: &RadioConfig) -> Result<f64> {
    let path_loss = fspl_db(cfg.carrier_hz, distance_m)?;
    Ok(cfg.tx_power_dbm + antenna_gain_db(0.0, cfg)
        - path_loss
        - cfg.atmospheric_loss_db(distance_m)
        + cfg.tx_gain_db(0.0))
}

/// Received power of `link` using node positions from `geometry`.
pub fn link_received_power_dbm<G: Geometry + ?Sized>(
    link: DirectedLink,
    geometry: &G,
    cfg: &RadioConfig,
) -> Result<f64> {
    let d = geometry.distance_m(link.tx, link.rx)?;
    received_power_dbm(d, cfg)
}

/// Power that `interferer` leaks into the receiver of `victim`, in dBm.
///
/// The victim receiver is aimed at its own transmitter and the interfering
/// transmitter at its own receiver; `alpha` and `beta` are the off-boresight
/// angles of the interfering path at each end.
pub fn interference_power_dbm<G: Geometry + ?Sized>(
    victim: DirectedLink,
    interferer: DirectedLink,
    geometry: &G,
    cfg: &RadioConfig,
) -> Result<f64> {
    if interferer.tx == victim.rx {
        return Err(Error::domain(format!(
            "node {} cannot interfere with its own receiver",
            victim.rx
        )));
    }
    let d = geometry.distance_m(victim.rx, interferer.tx)?;
    let victim_rx = geometry.position(victim.rx);
    let interferer_tx = geometry.position(interferer.tx);
    let alpha = angle_between(victim_rx, geometry.position(victim.tx), interferer_tx)?;
    let beta = angle_between(interferer_tx, geometry.position(interferer.rx), victim_rx)?;
    Ok(cfg.tx_power_dbm + antenna_gain_db(alpha, cfg)
        - fspl_db(cfg.carrier_hz, d)?
        - cfg.atmospheric_loss_db(d)
        + cfg.tx_gain_db(beta))
}

/// Total interference at the receiver of `victim` from the links in `ctx`
/// (after exclusions). An empty sum is negative infinity.
pub fn total_interference_dbm<G: Geometry + ?Sized>(
    victim: DirectedLink,
    ctx: &InterferenceContext,
    geometry: &G,
    cfg: &RadioConfig,
) -> Result<f64> {
    let mut total_mw = 0.0;
    for interferer in ctx.interferers(victim) {
        total_mw += dbm_to_mw(interference_power_dbm(victim, interferer, geometry, cfg)?);
    }
    Ok(mw_to_dbm(total_mw))
}

/// SNIR of `link` in dB while the links of `ctx` are active.
pub fn link_snir_db<G: Geometry + ?Sized>(
    link: DirectedLink,
    ctx: &InterferenceContext,
    geometry: &G,
    cfg: &RadioConfig,
) -> Result<f64> {
    let rx = link_received_power_dbm(link, geometry, cfg)?;
    let mut denom_mw = dbm_to_mw(cfg.noise_dbm);
    for interferer in ctx.interferers(link) {
        denom_mw += dbm_to_mw(interference_power_dbm(link, interferer, geometry, cfg)?);
    }
    Ok(rx - mw_to_dbm(denom_mw))
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-9;

    fn straight_line(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
        points.to_vec()
    }

    #[test]
    fn fspl_reference_value() {
        // 20 log10(4 pi * 60e9 * 100 / c), evaluated by hand.
        let expected = 20.0 * (4.0 * std::f64::consts::PI * 6e12 / 3.0e8f64).log10();
        let got = fspl_db(60e9, 100.0).unwrap();
        assert!((got - expected).abs() < EPS);
        assert!((got - 108.005).abs() < 5e-4, "{got}");
    }

    #[test]
    fn fspl_doubling_distance_adds_six_db() {
        let a = fspl_db(60e9, 137.0).unwrap();
        let b = fspl_db(60e9, 274.0).unwrap();
        assert!((b - a - 20.0 * 2f64.log10()).abs() < EPS);
        assert!((b - a - 6.0206).abs() < 1e-4);
    }

    #[test]
    fn fspl_unit_argument_is_zero() {
        let f = 60e9;
        let d = SPEED_OF_LIGHT / (4.0 * PI * f);
        assert!(fspl_db(f, d).unwrap().abs() < EPS);
    }

    #[test]
    fn fspl_rejects_bad_inputs() {
        assert!(matches!(fspl_db(60e9, 0.0), Err(Error::Domain(_))));
        assert!(matches!(fspl_db(60e9, -3.0), Err(Error::Domain(_))));
        assert!(matches!(fspl_db(0.0, 10.0), Err(Error::Domain(_))));
        assert!(matches!(fspl_db(60e9, f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn boresight_gain_is_twenty_db() {
        assert_eq!(antenna_gain_db(0.0, &RadioConfig::default()), 20.0);
    }

    #[test]
    fn gain_is_even_and_floored() {
        let cfg = RadioConfig::default();
        for t in [0.01, 0.1, 0.2, 0.7, 1.5, 3.0] {
            assert_eq!(antenna_gain_db(t, &cfg), antenna_gain_db(-t, &cfg));
        }
        // First null of sinc(10 theta) is at pi/10.
        assert_eq!(antenna_gain_db(PI / 10.0, &cfg), 20.0 - 30.0);
        assert_eq!(antenna_gain_db(PI, &cfg), -10.0);
    }

    #[test]
    fn received_power_at_100_and_500_m() {
        let cfg = RadioConfig::default();
        let p100 = received_power_dbm(100.0, &cfg).unwrap();
        let expected = 30.0 + 20.0 - fspl_db(60e9, 100.0).unwrap() - 2.05 - 1.6 + 20.0;
        assert!((p100 - expected).abs() < EPS);
        assert!((p100 + 41.655).abs() < 5e-4, "{p100}");
        let p500 = received_power_dbm(500.0, &cfg).unwrap();
        assert!((p500 + 70.234).abs() < 5e-4, "{p500}");
    }

    #[test]
    fn eirp_mode_drops_tx_gain() {
        let cfg = RadioConfig {
            eirp_mode: true,
            ..RadioConfig::default()
        };
        let p = received_power_dbm(100.0, &cfg).unwrap();
        let q = received_power_dbm(100.0, &RadioConfig::default()).unwrap();
        assert!((q - p - 20.0).abs() < EPS);
    }

    #[test]
    fn all_terms_vanish() {
        let cfg = RadioConfig {
            tx_power_dbm: 0.0,
            rain_margin_db_per_m: 0.0,
            o2_atten_db_per_m: 0.0,
            boresight_gain_db: 0.0,
            ..RadioConfig::default()
        };
        let d = SPEED_OF_LIGHT / (4.0 * PI * cfg.carrier_hz);
        assert!(received_power_dbm(d, &cfg).unwrap().abs() < EPS);
    }

    #[test]
    fn aligned_interferer_matches_received_power() {
        // victim: 0 -> 1 along +x; interferer 2 -> 3 with 2 on the ray from 1
        // through 0 and 1 on 2's boresight.
        let geo = straight_line(&[[100.0, 0.0], [200.0, 0.0], [0.0, 0.0], [300.0, 0.0]]);
        let cfg = RadioConfig::default();
        let victim = DirectedLink::new(0, 1);
        let interferer = DirectedLink::new(2, 3);
        let pin = interference_power_dbm(victim, interferer, &geo[..], &cfg).unwrap();
        let prx = received_power_dbm(200.0, &cfg).unwrap();
        assert!((pin - prx).abs() < EPS);
    }

    #[test]
    fn both_ends_in_floor() {
        // Victim receiver at origin looking +x, interferer at +y looking +y.
        let geo = [[100.0, 0.0], [0.0, 0.0], [0.0, 100.0], [0.0, 200.0]];
        let cfg = RadioConfig::default();
        let pin = interference_power_dbm(
            DirectedLink::new(0, 1),
            DirectedLink::new(2, 3),
            &geo[..],
            &cfg,
        )
        .unwrap();
        // alpha = pi/2 and beta = pi: both beyond the main lobe.
        let prx = received_power_dbm(100.0, &cfg).unwrap();
        assert!((pin - (prx + 2.0 * cfg.pattern_floor_db)).abs() < EPS);
    }

    #[test]
    fn square_layout_right_angles() {
        // Victim 0 -> 1, receiver at origin aimed at (100,0). Interferer at
        // (0,100) aimed at (100,100): alpha = beta = pi/2.
        let geo = [[100.0, 0.0], [0.0, 0.0], [0.0, 100.0], [100.0, 100.0]];
        let cfg = RadioConfig::default();
        let pin = interference_power_dbm(
            DirectedLink::new(0, 1),
            DirectedLink::new(2, 3),
            &geo[..],
            &cfg,
        )
        .unwrap();
        let g = antenna_gain_db(PI / 2.0, &cfg) - cfg.boresight_gain_db;
        let expected = received_power_dbm(100.0, &cfg).unwrap() + 2.0 * g;
        assert!((pin - expected).abs() < EPS);
        assert!((expected - (-41.655 + 2.0 * g)).abs() < 5e-4);
    }

    #[test]
    fn interferer_at_victim_receiver_is_rejected() {
        let geo = [[0.0, 0.0], [10.0, 0.0], [20.0, 0.0]];
        let cfg = RadioConfig::default();
        let err = interference_power_dbm(
            DirectedLink::new(0, 1),
            DirectedLink::new(1, 2),
            &geo[..],
            &cfg,
        );
        assert!(err.is_err());
        let coincident = [[0.0, 0.0], [10.0, 0.0], [10.0, 0.0], [20.0, 0.0]];
        assert!(interference_power_dbm(
            DirectedLink::new(0, 1),
            DirectedLink::new(2, 3),
            &coincident[..],
            &cfg,
        )
        .is_err());
    }

    #[test]
    fn total_interference_sums() {
        let cfg = RadioConfig::default();
        let geo = [
            [0.0, 0.0],
            [100.0, 0.0],
            [50.0, 80.0],
            [50.0, 200.0],
            [50.0, -80.0],
            [50.0, -200.0],
        ];
        let victim = DirectedLink::new(0, 1);
        assert_eq!(
            total_interference_dbm(victim, &InterferenceContext::empty(), &geo[..], &cfg).unwrap(),
            f64::NEG_INFINITY
        );
        let a = DirectedLink::new(2, 3);
        let b = DirectedLink::new(4, 5);
        let one: InterferenceContext = [a].into_iter().collect();
        let pa = interference_power_dbm(victim, a, &geo[..], &cfg).unwrap();
        // dBm -> mW -> dBm round trip
        assert!((total_interference_dbm(victim, &one, &geo[..], &cfg).unwrap() - pa).abs() < 1e-12);
        // b mirrors a across the victim's axis, so both have equal power.
        let pb = interference_power_dbm(victim, b, &geo[..], &cfg).unwrap();
        assert!((pa - pb).abs() < 1e-9);
        let two: InterferenceContext = [a, b].into_iter().collect();
        let total = total_interference_dbm(victim, &two, &geo[..], &cfg).unwrap();
        assert!((total - (pa + 10.0 * 2f64.log10())).abs() < 1e-9);
        assert!((total - pa - 3.0103).abs() < 1e-4);
    }

    #[test]
    fn exclusions_apply() {
        let v = DirectedLink::new(1, 2);
        assert!(is_excluded(v, v));
        assert!(is_excluded(v, DirectedLink::new(2, 3)));
        assert!(is_excluded(v, DirectedLink::new(1, 3)));
        assert!(is_excluded(v, v.reversed()));
        assert!(!is_excluded(v, DirectedLink::new(0, 1)));
        assert!(!is_excluded(v, DirectedLink::new(3, 2)));
    }

    #[test]
    fn noise_limited_snir() {
        let cfg = RadioConfig::default();
        let geo = [[0.0, 0.0], [100.0, 0.0]];
        let link = DirectedLink::new(0, 1);
        let snir = link_snir_db(link, &InterferenceContext::empty(), &geo[..], &cfg).unwrap();
        let prx = received_power_dbm(100.0, &cfg).unwrap();
        assert!((snir - (prx - cfg.noise_dbm)).abs() < 1e-12);
        assert!((snir - 58.345).abs() < 5e-4);
    }

    #[test]
    fn interferer_at_noise_level_costs_three_db() {
        // Pick the noise floor equal to the single interferer's power.
        let geo = [[0.0, 0.0], [100.0, 0.0], [50.0, 90.0], [50.0, 300.0]];
        let link = DirectedLink::new(0, 1);
        let int = DirectedLink::new(2, 3);
        let base = RadioConfig::default();
        let pin = interference_power_dbm(link, int, &geo[..], &base).unwrap();
        let cfg = base.with_noise_dbm(pin);
        let ctx: InterferenceContext = [int].into_iter().collect();
        let snir = link_snir_db(link, &ctx, &geo[..], &cfg).unwrap();
        let prx = received_power_dbm(100.0, &cfg).unwrap();
        assert!((snir - (prx - pin - 10.0 * 2f64.log10())).abs() < 1e-9);
    }

    #[test]
    fn high_noise_masks_interference() {
        let cfg = RadioConfig::default().with_noise_dbm(30.0);
        let geo = [[0.0, 0.0], [100.0, 0.0], [50.0, 90.0], [50.0, 300.0]];
        let link = DirectedLink::new(0, 1);
        let ctx: InterferenceContext = [DirectedLink::new(2, 3)].into_iter().collect();
        let total = total_interference_dbm(link, &ctx, &geo[..], &cfg).unwrap();
        assert!(total <= -40.0, "{total}");
        let with = link_snir_db(link, &ctx, &geo[..], &cfg).unwrap();
        let without = link_snir_db(link, &InterferenceContext::empty(), &geo[..], &cfg).unwrap();
        assert!((with - without).abs() < 1e-3);
    }

    #[test]
    fn context_is_canonical() {
        let a = DirectedLink::new(3, 4);
        let b = DirectedLink::new(1, 2);
        let x: InterferenceContext = [a, b, a].into_iter().collect();
        let mut y = InterferenceContext::empty();
        y.insert(b);
        y.insert(a);
        y.insert(b);
        assert_eq!(x, y);
        assert_eq!(x.links(), &[b, a]);
    }

    #[test]
    fn config_validation() {
        assert!(RadioConfig::default().validate().is_ok());
        let bad = RadioConfig {
            pattern_floor_db: 1.0,
            ..RadioConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = RadioConfig {
            carrier_hz: 0.0,
            ..RadioConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
