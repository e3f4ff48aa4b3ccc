//! Verify numerically that a spin-sector permutation block-diagonalizes the
//! full Hamiltonian into the two reduced matrices up to a remainder of rank
//! at most four.

use spinboson::discretize::{build_a_matrix, build_grid, build_h_matrix, block_diag_check};
use spinboson::model::m1;
use spinboson::pencil::PencilParams;

fn main() {
    let model = m1();
    let epsilon = 0.5;
    for alpha in [0.0, 0.5, 1.0, 2.0] {
        let grid = build_grid(&model, 16);
        let h = build_h_matrix(&model, epsilon, alpha, &grid);
        let aplus = build_a_matrix(&model, &PencilParams::new(epsilon, alpha), &grid);
        let aminus = build_a_matrix(&model, &PencilParams::new(-epsilon, alpha), &grid);
        let sv = block_diag_check(&h, &aplus, &aminus).unwrap();
        println!(
            "alpha = {alpha}: leading remainder singular values {:?}, 5th/1st = {:.2e}",
            &sv[..5].iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>(),
            sv[4] / sv[0]
        );
    }
}
