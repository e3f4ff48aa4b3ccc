//! Count gap eigenvalues two independent ways: negative eigenvalues of the
//! signed Schur complement and eigenvalues of the Birman-Schwinger operator
//! below -1. The counts agree exactly, point by point.

use spinboson::discretize::build_grid;
use spinboson::model::m1;
use spinboson::pencil::PencilParams;
use spinboson::schur::{
    birman_schwinger_t, count_negative, discretize_s, symbol_sign, BsSide, DiscretizedKernel,
};
use spinboson::spectrum::ess_spectrum;

fn main() {
    let model = m1();
    let p = PencilParams::new(0.0, 3.0);
    let report = ess_spectrum(&model, &p).unwrap();
    let grid = build_grid(&model, 48);

    for (label, gap, side) in [
        ("lower", report.gap_lower, BsSide::BandEdgeBottom),
        ("upper", report.gap_upper, BsSide::BandEdgeTop),
    ] {
        let Some((lo, hi)) = gap else { continue };
        println!("{label} gap ({lo:.4}, {hi:.4}):");
        for i in 0..7 {
            let z = lo + (hi - lo) * (0.125 + 0.125 * i as f64);
            let sign = symbol_sign(&model, &p, &grid, z).unwrap();
            let s = discretize_s(&model, &p, &grid, z).unwrap();
            let mut signed = s.matrix.clone();
            signed.iter_mut().for_each(|v| *v *= sign);
            let sc = count_negative(&DiscretizedKernel { matrix: signed, ..s }, None).unwrap();
            let t = birman_schwinger_t(&model, &p, &grid, side, z).unwrap();
            let tc = count_negative(&t, None).unwrap();
            assert_eq!(sc.negatives, tc.negatives);
            println!(
                "  z = {z:+.4}: {} eigenvalues below z-side of the gap (both routes)",
                sc.negatives
            );
        }
    }
}
