use ffnet::data::{gen_logic, LogicTask};
use ffnet::sweep::{run_sweep, SweepGrid};
use ffnet::train::is_local_minimum_stalled;
use ffnet::{train_mlp, TrainConfig};

fn grid(lrs: &[f64], momenta: &[f64], epochs: usize, replicates: usize, seed: u64, shuffle: bool) -> SweepGrid {
    SweepGrid {
        learning_rates: lrs.to_vec(),
        momenta: momenta.to_vec(),
        epoch_caps: vec![epochs],
        seeds_per_cell: replicates,
        base_seed: seed,
        shuffle_each_epoch: shuffle,
    }
}

#[test]
fn small_learning_rate_is_slower_on_xor() {
    let xor = gen_logic(LogicTask::Xor);
    let result = run_sweep(
        &xor,
        &[2, 2, 1],
        &grid(&[0.01, 0.5], &[0.0], 10_000, 5, 11, false),
        0.05,
    )
    .unwrap();
    let best = result.best();
    assert_eq!(best.cell.learning_rate, 0.5);
    let slow = result.records.iter().find(|r| r.cell.learning_rate == 0.01).unwrap();
    let fast = best.median_epochs_to_target.expect("η=0.5 converges");
    assert!(slow.median_epochs_to_target.is_none_or(|e| e > fast));
}

// How often a replicate oscillates depends heavily on the seed; base seed 2
// gives 6 of 10 replicates, base seed 0 gives none.
#[test]
fn large_step_with_momentum_oscillates() {
    let xor = gen_logic(LogicTask::Xor);
    let result = run_sweep(&xor, &[2, 2, 1], &grid(&[0.99], &[0.9], 10_000, 10, 2, true), 0.05).unwrap();
    let record = &result.records[0];
    assert!(record.oscillation);
    assert!(record.replicates.iter().any(|r| r.oscillation));
}

#[test]
fn stalled_run_is_detected() {
    // With momentum 0.9 this seed settles on the 0.25 plateau.
    let xor = gen_logic(LogicTask::Xor);
    let cfg = TrainConfig {
        learning_rate: 0.5,
        momentum: 0.9,
        max_epochs: 10_000,
        target_error: 0.05,
        seed: 7,
        shuffle_each_epoch: false,
    };
    let (_, report) = train_mlp(&xor, &[2, 2, 1], &cfg).unwrap();
    assert!(!report.converged);
    assert!(is_local_minimum_stalled(&report, 100, 1e-6).unwrap());
}
