use meshroute::topology::{
    euclidean, load_network, network_from_json, network_to_json, save_network,
};
use meshroute::{generate_network, Error, GenParams};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = GenParams> {
    (2usize..=30, 0usize..=10, any::<u64>()).prop_flat_map(|(b, u, seed)| {
        (1usize..=b.min(5)).prop_map(move |c| GenParams::new(b, u, c, seed))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn generated_networks_satisfy_the_model(p in params()) {
        let net = match generate_network(&p) {
            Ok(net) => net,
            Err(Error::Generation(_)) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert_eq!(net.num_bs(), p.num_bs);
        prop_assert_eq!(net.num_users(), p.num_users);
        prop_assert_eq!(net.num_core(), p.num_core);
        prop_assert!(net.core_ids().iter().all(|&c| net.is_bs(c)));

        for &q in net.coords() {
            prop_assert!((0.0..p.grid_side_m).contains(&q[0]));
            prop_assert!((0.0..p.grid_side_m).contains(&q[1]));
        }
        for i in 0..net.num_bs() {
            for j in i + 1..net.num_bs() {
                let d = euclidean(net.coords()[i], net.coords()[j]);
                prop_assert!(d >= p.min_bs_sep_m);
                if net.is_adjacent(i, j) {
                    prop_assert!(d <= p.bs_link_radius_m);
                }
            }
        }
        for u in net.users() {
            let nb = net.neighbors(u).unwrap();
            prop_assert_eq!(nb.len(), 2);
            prop_assert!(nb.iter().all(|&b| net.is_bs(b)));
            // no other base station is strictly closer than either neighbor
            let here = net.coords()[u];
            let far = nb.iter().map(|&b| euclidean(here, net.coords()[b])).fold(0.0, f64::max);
            let closer = (0..net.num_bs())
                .filter(|b| !nb.contains(b))
                .filter(|&b| euclidean(here, net.coords()[b]) < far)
                .count();
            prop_assert_eq!(closer, 0);
            prop_assert!(net.has_valid_path(u, p.h_max));
        }
        for (i, j) in net.edges() {
            prop_assert!(net.is_adjacent(j, i));
            prop_assert!(!(net.is_user(i) && net.is_user(j)));
        }
    }

    #[test]
    fn json_round_trip(p in params()) {
        if let Ok(net) = generate_network(&p) {
            let text = network_to_json(&net);
            let back = network_from_json(&text).unwrap();
            prop_assert_eq!(network_to_json(&back), text);
        }
    }
}

#[test]
fn same_seed_same_network() {
    let p = GenParams::new(20, 10, 3, 77);
    let a = network_to_json(&generate_network(&p).unwrap());
    let b = network_to_json(&generate_network(&p).unwrap());
    assert_eq!(a, b);
    let other = network_to_json(&generate_network(&GenParams::new(20, 10, 3, 78)).unwrap());
    assert_ne!(a, other);
}

#[test]
fn too_many_cores_is_rejected() {
    let err = generate_network(&GenParams::new(10, 4, 11, 0)).unwrap_err();
    assert!(matches!(err, Error::Validation { .. }));
    assert!(err.to_string().contains("exceeds number of base stations"));
}

#[test]
fn save_and_load() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("net.json");
    let net = generate_network(&GenParams::new(12, 4, 2, 3)).unwrap();
    save_network(&net, &file).unwrap();
    let back = load_network(&file).unwrap();
    assert_eq!(network_to_json(&back), network_to_json(&net));
}

#[test]
fn malformed_files_are_rejected() {
    assert!(network_from_json("{").is_err());
    let net = generate_network(&GenParams::new(6, 1, 1, 2)).unwrap();
    let text = network_to_json(&net).replacen("\"b\"", "\"bs\"", 1);
    assert!(network_from_json(&text).is_err());
}
