use twophoton::scenarios::{analyze_curve, delay_grid, run_scan, Scenario, ScenarioKind};

fn main() -> twophoton::Result<()> {
    let scenario = Scenario::with_defaults(ScenarioKind::HomDip, 0.5)?;
    let tc = scenario.filter.coherence_time_fs();
    let scan = run_scan(&scenario, &delay_grid(-6.0 * tc, 6.0 * tc, 241)?, 1.0)?;
    let dip = analyze_curve(&scan.coincidence_curve(0))?;
    println!(
        "visibility {:.3}, fwhm {:?} fs",
        dip.visibility, dip.fwhm_fs
    );
    Ok(())
}
