use duality_pricer::analytic::bsm_price;
use duality_pricer::binomial::crr_params;
use duality_pricer::greeks::{all_greeks, bsm_delta};
use duality_pricer::pricing::price;
use duality_pricer::stochastic::{sample_brownian, PathBatch, RngStream, TimeGrid};
use duality_pricer::{ModelParams, OptionKind, OptionSpec};

#[test]
fn crr_lattice_approaches_bsm_for_puts_too() {
    let spec = OptionSpec::european(OptionKind::Put, 110.0, 0.5, 100.0);
    let exact = bsm_price(0.5, 100.0, 110.0, 0.03, 0.25, OptionKind::Put).unwrap().price;
    // CRR error oscillates in n away from the money, so only the trend is checked
    let err = |n| (price(&spec, &crr_params(0.25, 0.03, 0.5, n)).unwrap().price - exact).abs();
    let (coarse, fine) = (err(50), err(800));
    assert!(fine < coarse, "{coarse} {fine}");
    assert!(fine / exact < 1e-3);
}

#[test]
fn american_put_carries_an_early_exercise_premium() {
    let params = crr_params(0.2, 0.08, 1.0, 500);
    let am = price(&OptionSpec::american(OptionKind::Put, 110.0, 1.0, 100.0), &params).unwrap();
    let eu = price(&OptionSpec::european(OptionKind::Put, 110.0, 1.0, 100.0), &params).unwrap();
    assert!(am.price > eu.price + 0.1);
    assert!(am.diagnostic("exercise_nodes").unwrap() > 0.0);
}

#[test]
fn finite_difference_delta_matches_closed_form() {
    let params = ModelParams::Bsm { r: 0.05, sigma: 0.2 };
    for kind in [OptionKind::Call, OptionKind::Put] {
        for s0 in [80.0, 100.0, 125.0] {
            let spec = OptionSpec::european(kind, 100.0, 1.0, s0);
            let g = all_greeks(&spec, &params).unwrap();
            let exact = bsm_delta(1.0, s0, 100.0, 0.05, 0.2, kind).unwrap();
            assert!((g["delta"] - exact).abs() < 1e-6, "{kind:?} {s0}");
        }
    }
}

#[test]
fn path_files_round_trip_through_disk() {
    let grid = TimeGrid::uniform(16, 2.0).unwrap();
    let batch = sample_brownian(&grid, 5, &RngStream::new(77, 3));
    let file = tempfile::NamedTempFile::new().unwrap();
    batch.write_csv(std::fs::File::create(file.path()).unwrap()).unwrap();
    let text = std::fs::read_to_string(file.path()).unwrap();
    assert!(text.starts_with("path_id,step,t,value\n"));
    assert_eq!(text.lines().count(), 1 + 5 * 17);
    let back = PathBatch::read_csv(std::fs::File::open(file.path()).unwrap()).unwrap();
    for p in 0..5 {
        let bits = |xs: &[f64]| xs.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(back.path(p)), bits(batch.path(p)));
    }
    assert_eq!(back.grid().times(), grid.times());
}

#[test]
fn same_seed_same_batch() {
    let grid = TimeGrid::uniform(32, 1.0).unwrap();
    let a = sample_brownian(&grid, 100, &RngStream::new(5, 0));
    let b = sample_brownian(&grid, 100, &RngStream::new(5, 0));
    let c = sample_brownian(&grid, 100, &RngStream::new(6, 0));
    assert_eq!(a, b);
    assert_ne!(a, c);
}
