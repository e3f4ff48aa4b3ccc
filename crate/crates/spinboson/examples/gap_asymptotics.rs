//! Compare the analytic gap-opening slope at the critical coupling against
//! finite differences of the computed pencil root.

use spinboson::model::m1;
use spinboson::pencil::{find_e, find_f, gap_asymptotics, GapEdge, PencilParams};

fn main() {
    let model = m1();
    for (gamma, edge) in [(0.0, GapEdge::Lower), (0.0, GapEdge::Upper), (0.5, GapEdge::Lower)] {
        let exp = gap_asymptotics(&model, gamma, edge).expect("expansion in range");
        println!(
            "{edge:?} edge at gamma={gamma}: alpha_crit={:.6}, anchor={:.6}, slope={:.6}",
            exp.alpha_crit, exp.anchor, exp.slope
        );
        for h in [1e-3, 1e-4, 1e-5] {
            let p = PencilParams::new(gamma, exp.alpha_crit + h);
            let root = match edge {
                GapEdge::Lower => find_e(&model, &p),
                GapEdge::Upper => find_f(&model, &p),
            }
            .unwrap()
            .value
            .expect("root exists just above threshold");
            let fd = (root - exp.anchor) / h;
            println!(
                "  h={h:>7.0e}: fd slope = {fd:+.6}, relative error = {:.2e}",
                (fd - exp.slope).abs() / exp.slope.abs()
            );
        }
    }
}
