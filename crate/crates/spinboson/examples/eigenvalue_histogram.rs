//! Diagonalize the discretized reduced matrix and compare the eigenvalue
//! distribution against the predicted essential-spectrum union.

use spinboson::discretize::{build_a_matrix, build_grid, compare_spectrum, eig_sym};
use spinboson::model::m1;
use spinboson::pencil::PencilParams;
use spinboson::spectrum::ess_spectrum;

fn main() {
    let model = m1();
    let p = PencilParams::new(0.0, 3.0);
    let predicted = ess_spectrum(&model, &p).unwrap().spectrum;
    println!("predicted: {:?}", predicted.intervals());

    for n in [16, 32, 48] {
        let grid = build_grid(&model, n);
        let h = grid.weights[0];
        let a = build_a_matrix(&model, &p, &grid);
        let eigs = eig_sym(&a.matrix).unwrap();
        let rep = compare_spectrum(&eigs, &predicted, 3.0 * h);
        println!(
            "n={n:3}: {} eigenvalues, {} inside predicted union (tol {:.3}), {} outliers",
            eigs.len(),
            rep.inside_predicted,
            rep.residual_bound,
            rep.outliers.len()
        );
        for (e, d) in rep.outliers.iter().take(5) {
            println!("   outlier {e:+.6} at distance {d:.3e}");
        }
    }
}
