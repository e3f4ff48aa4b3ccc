//! Full spectral report at one parameter point: branches, roots, critical
//! couplings, gaps, and the case-table classification.

use spinboson::model::m1;
use spinboson::pencil::{critical_couplings, PencilParams};
use spinboson::spectrum::{ess_spectrum, ess_spectrum_table};

fn main() {
    let model = m1();
    let p = PencilParams::new(0.0, 3.0);

    let report = ess_spectrum(&model, &p).expect("sign-path spectrum");
    println!("gamma = {}, alpha = {}", report.gamma, report.alpha);
    println!("essential spectrum, {} components:", report.spectrum.n_components());
    for (lo, hi) in report.spectrum.intervals() {
        println!("  [{lo:.6}, {hi:.6}]");
    }
    println!("E = {:?}", report.e_root.value);
    println!("F = {:?}", report.f_root.value);
    if let Some(g) = report.gap_lower {
        println!("lower gap: ({:.6}, {:.6})", g.0, g.1);
    }
    if let Some(g) = report.gap_upper {
        println!("upper gap: ({:.6}, {:.6})", g.0, g.1);
    }

    let thr = critical_couplings(&model, p.gamma).expect("critical couplings");
    println!("thresholds: {thr:?}");

    // The case-table classification agrees with the sign formulas whenever
    // its thresholds are ordered; here they are not, so the sign path is the
    // authority.
    match ess_spectrum_table(&model, &p) {
        Ok(t) => println!("case: {}", t.case_id.unwrap()),
        Err(e) => println!("table path declined: {e}"),
    }
}
