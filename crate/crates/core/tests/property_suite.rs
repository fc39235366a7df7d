mod properties;

use properties::*;

fn assert_holds(outcome: Outcome) {
    match outcome {
        Ok(detail) => println!("{detail}"),
        Err(detail) => panic!("{detail}"),
    }
}

#[test]
fn amplitude_statistics_hold() {
    assert_holds(amplitude_statistics());
}

#[test]
fn energy_bookkeeping_holds() {
    assert_holds(energy_bookkeeping());
}

#[test]
fn field_is_stationary() {
    assert_holds(field_stationarity());
}

#[test]
fn sampling_is_deterministic() {
    assert_holds(sampling_determinism());
}

#[test]
fn boost_round_trip_recovers_spectrum() {
    assert_holds(boost_round_trip());
}

#[test]
fn decoupled_limit_conserves_energy() {
    assert_holds(decoupled_energy());
}

#[test]
fn harmonic_response_is_linear() {
    assert_holds(linearity());
}

#[test]
fn ensemble_is_deterministic() {
    assert_holds(ensemble_determinism());
}

#[test]
fn small_ensemble_is_stationary_and_virial() {
    let mut config = sedsim::sed_dynamics::SedConfig::harmonic_default(
        sedsim::UnitSystem::reduced(0.01).unwrap(),
    );
    config.n_trajectories = 64;
    let stats = sedsim::sed_dynamics::run_ensemble(&config, 2024).unwrap();
    assert_holds(sed_stationarity(&stats));
    assert_holds(sed_virial(&stats));
}

#[test]
fn quadratic_potential_is_exact_at_every_order() {
    assert_holds(quadratic_exactness());
}

#[test]
fn evolution_conserves_normalization() {
    assert_holds(normalization_conservation());
}

#[test]
fn free_particle_means_move_classically() {
    assert_holds(free_particle_means());
}

#[test]
fn min_w_changes_continuously() {
    assert_holds(min_w_continuity());
}

#[test]
fn expectations_converge_under_refinement() {
    assert_holds(grid_refinement());
}

#[test]
fn row_partition_does_not_matter() {
    assert_holds(partition_independence());
}

#[test]
fn oracle_gaussians_are_pure() {
    assert_holds(purity_saturation());
}

#[test]
fn rotation_preserves_area() {
    assert_holds(symplectic_area());
}

#[test]
fn quartic_oracle_satisfies_virial() {
    assert_holds(quartic_virial());
}
