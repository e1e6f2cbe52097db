use std::f64::consts::{PI, SQRT_2};

use hopspin_core::analysis::{compare_exact_effective, estimate_period, peak_times};
use hopspin_core::dynamics::{
    analytic_period, qst_trajectory, run_trajectory, AnalyticLattice, CouplingModel,
    HamiltonianKind, ObservableRecord, TimeGrid,
};
use hopspin_core::model::encode_state;
use hopspin_core::{EffectiveVariant, ModelSpec, Spin, StateVector, StaticPreset};

fn start(spec: &ModelSpec, label: usize) -> StateVector {
    let layout = spec.layout().unwrap();
    encode_state(
        &layout,
        layout.site_from_label(label).unwrap(),
        Spin::Up,
        StaticPreset::DownDown,
    )
    .unwrap()
}

fn exact(spec: &ModelSpec, label: usize) -> Vec<ObservableRecord> {
    run_trajectory(
        spec,
        HamiltonianKind::Exact,
        &start(spec, label),
        &TimeGrid::default(),
    )
    .unwrap()
}

fn max_of(records: &[ObservableRecord], f: impl Fn(&ObservableRecord) -> f64) -> f64 {
    records.iter().map(f).fold(f64::NEG_INFINITY, f64::max)
}

fn f_plus_series(records: &[ObservableRecord]) -> Vec<(f64, f64)> {
    records.iter().map(|r| (r.t, r.f_plus)).collect()
}

#[test]
fn xy_weak_hopping_leaks_into_the_singlet() {
    assert!(max_of(&exact(&ModelSpec::xy(2, 1.0, 1.0), 1), |r| r.f_minus) > 0.3);
}

#[test]
fn xy_strong_hopping_stays_in_the_triplet() {
    let records = exact(&ModelSpec::xy(2, 10.0, 1.0), 1);
    assert!(max_of(&records, |r| r.f_plus) >= 0.98);
    assert!(max_of(&records, |r| r.f_minus) <= 0.02);
    let period = estimate_period(&f_plus_series(&records)).unwrap();
    let target = analytic_period(CouplingModel::Xy, AnalyticLattice::TwoSite, 1.0);
    assert!((period / target - 1.0).abs() <= 0.02, "{period}");
}

#[test]
fn heisenberg_strong_hopping_caps_the_transfer() {
    let records = exact(&ModelSpec::heisenberg(2, 10.0, 1.0), 1);
    assert!((max_of(&records, |r| r.f_plus) - 8.0 / 9.0).abs() <= 0.02);
    let period = estimate_period(&f_plus_series(&records)).unwrap();
    assert!((period / (16.0 * PI / 3.0) - 1.0).abs() <= 0.02, "{period}");
}

#[test]
fn state_transfer() {
    let grid = TimeGrid::default();
    let xy = qst_trajectory(&ModelSpec::xy(2, 20.0, 1.0), HamiltonianKind::Exact, &grid).unwrap();
    assert!(max_of(&xy, |r| r.f2) >= 0.99);
    let series: Vec<(f64, f64)> = xy.iter().map(|r| (r.t, r.f2)).collect();
    let first = peak_times(&series).unwrap()[0];
    assert!((first / (SQRT_2 * PI) - 1.0).abs() < 0.02, "{first}");

    let heis = qst_trajectory(
        &ModelSpec::heisenberg(2, 20.0, 1.0),
        HamiltonianKind::Exact,
        &grid,
    )
    .unwrap();
    assert!(max_of(&heis, |r| r.f2) <= 0.77);
}

#[test]
fn three_site_middle_start_follows_the_quartered_chain() {
    let spec = ModelSpec::xy(3, 10.0, 1.0);
    let period = estimate_period(&f_plus_series(&exact(&spec, 0))).unwrap();
    let target = analytic_period(
        CouplingModel::Xy,
        AnalyticLattice::ThreeSiteMiddleStart,
        1.0,
    );
    assert!((period / target - 1.0).abs() <= 0.03, "{period}");

    let grid = TimeGrid::default();
    let chain = EffectiveVariant::ThreeSiteMiddleStart;
    let middle = compare_exact_effective(&spec, chain, &start(&spec, 0), &grid).unwrap();
    let side = compare_exact_effective(&spec, chain, &start(&spec, 1), &grid).unwrap();
    assert!(
        middle.max_state_infidelity <= 0.05,
        "{}",
        middle.max_state_infidelity
    );
    assert!(side.max_state_infidelity > 0.05);
    assert!(side.gaps.f_plus >= 0.1);
}

#[test]
fn side_start_is_captured_by_the_projector_variant() {
    let spec = ModelSpec::xy(3, 10.0, 1.0);
    let grid = TimeGrid::default();
    let projector = compare_exact_effective(
        &spec,
        EffectiveVariant::ThreeSiteProjector,
        &start(&spec, 1),
        &grid,
    )
    .unwrap();
    let chain = compare_exact_effective(
        &spec,
        EffectiveVariant::ThreeSiteMiddleStart,
        &start(&spec, 1),
        &grid,
    )
    .unwrap();
    assert!(projector.gaps.f_plus < 0.05, "{}", projector.gaps.f_plus);
    assert!(projector.gaps.f_plus < chain.gaps.f_plus);
}

#[test]
fn deviation_ordering_in_eta() {
    let grid = TimeGrid::default();
    for spec in [
        ModelSpec::xy(2, 1.0, 1.0),
        ModelSpec::heisenberg(2, 1.0, 1.0),
    ] {
        let reports: Vec<_> = [1.0, 2.0, 10.0, 100.0]
            .iter()
            .map(|&eta| {
                let s = ModelSpec {
                    eta,
                    ..spec.clone()
                };
                compare_exact_effective(&s, EffectiveVariant::TwoSite, &start(&s, 1), &grid)
                    .unwrap()
            })
            .collect();
        for w in reports.windows(2) {
            // Full-state overlaps of long weak-hopping runs are saturated near zero.
            let saturated =
                w[0].max_state_infidelity >= 1.0 - 1e-4 && w[1].max_state_infidelity >= 1.0 - 1e-4;
            assert!(saturated || w[1].max_state_infidelity <= w[0].max_state_infidelity);
            assert!(w[1].gaps.f_plus < w[0].gaps.f_plus);
        }
    }
}
