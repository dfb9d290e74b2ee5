use renyite_cli::output::sweep_csv_bytes;
use renyite_cli::sweep::{cell_seed, run_sweep, run_sweep_resuming};
use renyite_cli::{SweepConfig, SweepResult};

const SMALL: &str = "
series.length = 1500
series.transient = 200
sweep.epsilon_grid = 0.05, 0.1, 0.16
sweep.directions = x1->y1, y1->x1
estimator.alpha_grid = 0.8, 1.0, 1.5
estimator.n_min = 3
estimator.n_max = 8
surrogate.count = 3
surrogate.seed = 11
";

fn small() -> SweepConfig {
    SweepConfig::parse(SMALL).unwrap()
}

#[test]
fn one_row_per_cell_and_direction() {
    let r = run_sweep(&small());
    assert_eq!(r.rows.len(), 18);
    assert_eq!(r.failures(), 0);
    assert_eq!(r.quantities(), ["rte_effective.short"]);
    assert_eq!(r.directions("rte_effective.short"), ["x1->y1", "y1->x1"]);
    for row in &r.rows {
        assert_eq!(row.n_effective, 1500 - 2);
        assert_eq!(row.seed, cell_seed(11, &row.quantity, &row.direction, row.epsilon));
        assert!(row.value.is_finite() && row.std >= 0.0);
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let cfg = small();
    assert_eq!(sweep_csv_bytes(&run_sweep(&cfg)), sweep_csv_bytes(&run_sweep(&cfg)));
}

#[test]
fn resume_keeps_finished_cells_and_fills_the_rest() {
    let cfg = small();
    let full = run_sweep(&cfg);

    // Drop every cell at epsilon = 0.1 and the alpha = 1.5 cells at 0.16, and
    // mark one kept cell so a recomputation would be visible.
    let mut partial = SweepResult {
        rows: full
            .rows
            .iter()
            .filter(|r| r.epsilon != 0.1 && !(r.epsilon == 0.16 && r.alpha == 1.5))
            .cloned()
            .collect(),
    };
    let kept = partial.rows.len();
    partial.rows[0].value = 42.0;

    let mut reported = Vec::new();
    let resumed = run_sweep_resuming(&cfg, partial, |p| reported.push((p.epsilon, p.result.rows.len())));
    assert_eq!(resumed.rows.len(), full.rows.len());
    assert_eq!(resumed.rows.iter().filter(|r| r.value == 42.0).count(), 1);
    assert_eq!(kept, 18 - 6 - 2);

    let mut restored = resumed.clone();
    restored.rows.iter_mut().filter(|r| r.value == 42.0).for_each(|r| r.value = full.rows[0].value);
    assert_eq!(sweep_csv_bytes(&restored), sweep_csv_bytes(&full));
    assert_eq!(reported.len(), 3);
    assert_eq!(reported.last().unwrap().1, full.rows.len());
}

#[test]
fn failed_cells_become_marker_rows_and_are_retried() {
    // Rank 1 only converges for alpha < 1 + 1/(2 dim); the three-dimensional
    // embedding cloud rejects alpha = 1.2.
    let cfg = SweepConfig::parse(
        &format!("{SMALL}\nestimator.n_min = 1\nestimator.alpha_grid = 1.0, 1.2\n")
            .replace("estimator.n_min = 3\n", "")
            .replace("estimator.alpha_grid = 0.8, 1.0, 1.5\n", ""),
    )
    .unwrap();
    let r = run_sweep(&cfg);
    assert_eq!(r.rows.len(), 12);
    assert!(r.failures() > 0);
    let failed = r.rows.iter().find(|r| r.is_failure()).unwrap();
    assert!(failed.std.is_nan() && failed.n_effective == 0);

    let mut attempts = 0;
    let again = run_sweep_resuming(&cfg, r.clone(), |p| attempts += p.errors.len());
    assert_eq!(again.failures(), r.failures());
    assert!(attempts > 0);
}
