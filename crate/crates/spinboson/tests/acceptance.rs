//! Acceptance gate: one test per release criterion, each ending in a single
//! pass line with its measured runtime.

use spinboson::discretize::{
    self, build_a_matrix, build_grid, build_h_matrix, block_diag_check,
};
use spinboson::model::{m1, m2, m3, m4, ModelSpec, C64};
use spinboson::pencil::{
    critical_couplings, find_e, find_f, gap_asymptotics, GapEdge, PencilParams, Threshold,
};
use spinboson::schur::{
    birman_schwinger_t, count_negative, discretize_s, psi2_edge_bound, split_k, split_psi,
    symbol_sign, BsSide, DiscretizedKernel,
};
use spinboson::spectrum::{ess_spectrum, ess_spectrum_hamiltonian, ess_spectrum_table};
use spinboson::Error;
use std::f64::consts::PI;
use std::time::Instant;

fn pass(n: u32, what: &str, t: Instant) {
    println!("[criterion {n:02}] PASS ({:.2}s) {what}", t.elapsed().as_secs_f64());
}

fn xorshift(state: &mut u64) -> f64 {
    *state ^= *state << 13;
    *state ^= *state >> 7;
    *state ^= *state << 17;
    (*state >> 11) as f64 / (1u64 << 53) as f64
}

#[test]
fn criterion_01_critical_coupling_closed_form() {
    let t = Instant::now();
    let thr = critical_couplings(&m1(), -1.0).unwrap();
    let expect = (2.0 / PI).sqrt();
    match thr.alpha1 {
        Threshold::Defined(v) => {
            assert!((v - expect).abs() <= 1e-6, "alpha1 = {v}, want {expect}")
        }
        other => panic!("alpha1 should be defined, got {other:?}"),
    }
    pass(1, "alpha1(M1, gamma=-1) matches sqrt(2/pi) within 1e-6", t);
}

#[test]
fn criterion_02_root_residuals_and_monotonicity() {
    let t = Instant::now();
    let m = m1();
    for gamma in [-2.0, -1.0, 0.0, 1.0] {
        let mut last_e = f64::INFINITY;
        let mut last_f = f64::NEG_INFINITY;
        for i in 0..50 {
            let alpha = 0.06 + 2.94 * i as f64 / 49.0;
            let p = PencilParams::new(gamma, alpha);
            let e = find_e(&m, &p).unwrap();
            if let Some(v) = e.value {
                assert!(e.residual.abs() <= 1e-10, "E residual {} at ({gamma},{alpha})", e.residual);
                assert!(v <= last_e + 1e-12, "E not monotone at ({gamma},{alpha})");
                last_e = v;
            }
            let f = find_f(&m, &p).unwrap();
            if let Some(v) = f.value {
                assert!(f.residual.abs() <= 1e-10, "F residual {} at ({gamma},{alpha})", f.residual);
                assert!(v >= last_f - 1e-12, "F not monotone at ({gamma},{alpha})");
                last_f = v;
            }
        }
    }
    pass(2, "root residuals <= 1e-10 and monotone over 4x50 parameter grid", t);
}

#[test]
fn criterion_03_table_and_sign_paths_agree() {
    let t = Instant::now();
    // one model per regularity class
    let models: [(&str, ModelSpec); 4] =
        [("m1", m1()), ("m2", m2()), ("m3", m3()), ("m4", m4())];
    let mut compared = 0usize;
    let mut skipped = 0usize;
    for (name, m) in &models {
        let mut model_compared = 0usize;
        for gamma in [-1.5, -0.75, -0.3, 0.25, 0.8] {
            for i in 0..8 {
                let alpha = 0.2 + 2.6 * i as f64 / 7.0;
                let p = PencilParams::new(gamma, alpha);
                let sign = ess_spectrum(m, &p).unwrap();
                match ess_spectrum_table(m, &p) {
                    Ok(table) => {
                        let dev = sign.spectrum.deviation_from(&table.spectrum);
                        assert!(
                            dev <= 1e-9,
                            "{name} gamma={gamma} alpha={alpha}: deviation {dev}"
                        );
                        assert!(table.case_id.is_some());
                        compared += 1;
                        model_compared += 1;
                    }
                    // unordered thresholds: the sign formulas remain the
                    // authority and the table declines explicitly
                    Err(Error::OrderingViolation { .. }) => skipped += 1,
                    Err(e) => panic!("{name} gamma={gamma} alpha={alpha}: {e}"),
                }
            }
        }
        assert!(model_compared > 0, "{name}: no ordered table cases found");
    }
    pass(
        3,
        &format!("paths agree within 1e-9 on {compared} points across all regularity classes ({skipped} unordered-table points deferred to sign path)"),
        t,
    );
}

#[test]
fn criterion_04_gap_asymptotics_match_finite_differences() {
    let t = Instant::now();
    let m = m1();
    let h = 1e-4;
    for gamma in [0.0, 0.5] {
        for edge in [GapEdge::Lower, GapEdge::Upper] {
            let exp = gap_asymptotics(&m, gamma, edge).unwrap();
            let p = PencilParams::new(gamma, exp.alpha_crit + h);
            let root = match edge {
                GapEdge::Lower => find_e(&m, &p),
                GapEdge::Upper => find_f(&m, &p),
            }
            .unwrap()
            .value
            .expect("root exists just above threshold");
            let fd = (root - exp.anchor) / h;
            let rel = (fd - exp.slope).abs() / exp.slope.abs();
            assert!(rel <= 0.01, "gamma={gamma} {edge:?}: relative error {rel}");
        }
    }
    pass(4, "analytic slopes within 1% of finite differences at h=1e-4", t);
}

#[test]
fn criterion_05_gap_eigenvalue_counts_at_n256() {
    let t = Instant::now();
    let m = m1();
    for alpha in [0.1, 1.0, 3.0] {
        let p = PencilParams::new(0.0, alpha);
        let predicted = ess_spectrum(&m, &p).unwrap().spectrum;
        let hull = predicted.hull().unwrap();
        let mut per_gap: Vec<Vec<usize>> = Vec::new();
        for n in [128usize, 256] {
            let grid = build_grid(&m, n);
            let tol = 3.0 * grid.weights[0];
            let below = discretize::count_below(&m, &p, &grid, hull.0 - tol).unwrap();
            assert!(below <= 10, "alpha={alpha} n={n}: {below} below the hull");
            let mut counts = Vec::new();
            for (lo, hi) in predicted.gaps() {
                if hi - lo <= 2.5 * tol {
                    counts.push(0);
                    continue;
                }
                let c = discretize::count_in_interval(&m, &p, &grid, lo + tol, hi - tol).unwrap();
                assert!(c <= 10, "alpha={alpha} n={n}: {c} eigenvalues in gap ({lo},{hi})");
                counts.push(c);
            }
            per_gap.push(counts);
        }
        for (g, (a, b)) in per_gap[0].iter().zip(&per_gap[1]).enumerate() {
            assert!(a.abs_diff(*b) <= 1, "alpha={alpha} gap {g}: {a} vs {b}");
        }
    }
    pass(5, "exact inertia gap counts bounded by 10 and stable from n=128 to n=256", t);
}

#[test]
fn criterion_06_kernel_split_rank_and_sign() {
    let t = Instant::now();
    let m = m1();
    let p = PencilParams::new(0.0, 3.0);
    let e = find_e(&m, &p).unwrap().value.unwrap();
    let z = 2.0 + e;

    let grid = build_grid(&m, 64);
    let (k1, _) = split_k(&m, &p, &grid, z).unwrap();
    let mut sv: Vec<f64> = k1.matrix.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    assert!(sv[2] <= 1e-8 * sv[0], "3rd singular value {} vs {}", sv[2], sv[0]);

    let mut state = 0x1234_5678_9abc_def1u64;
    for _ in 0..10_000 {
        let k = -PI + 2.0 * PI * xorshift(&mut state);
        let q = -PI + 2.0 * PI * xorshift(&mut state);
        let (_, p2) = split_psi(&m, k, q, 0.0, z).unwrap();
        assert!(p2 >= -1e-14, "psi2 = {p2} at ({k}, {q})");
        let bound = psi2_edge_bound(&m, 0.0, e, k, q);
        assert!(p2 <= bound * (1.0 + 1e-10) + 1e-14, "bound violated at ({k}, {q})");
    }
    pass(6, "regular part has rank 2, singular part nonnegative and within its bound", t);
}

#[test]
fn criterion_07_kernel_hilbert_schmidt_bound() {
    let t = Instant::now();
    let m = m1();
    let p = PencilParams::new(0.0, 1.7);
    let grid = build_grid(&m, 40);
    let norm_sq = m.coupling_norm_sq();
    let zs: Vec<f64> = (0..10)
        .map(|i| -0.5 - i as f64)
        .chain((0..10).map(|i| 4.5 + 0.7 * i as f64))
        .collect();
    assert_eq!(zs.len(), 20);
    for z in zs {
        let s = discretize_s(&m, &p, &grid, z).unwrap();
        let mut k = s.matrix.clone();
        for i in 0..k.nrows() {
            let d = spinboson::schur::delta(&m, &p, grid.nodes[i], z).unwrap();
            k[(i, i)] = C64::new(d, 0.0) - k[(i, i)];
        }
        let kn = k.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let dist = if z < 0.0 { -z } else { z - 4.0 };
        let bound = 2.0 * p.alpha * p.alpha * norm_sq / dist;
        assert!(kn <= bound + 1e-6, "z={z}: {kn} > {bound}");
    }
    pass(7, "Frobenius norm of K within 2 alpha^2 ||lambda||^2 / dist for 20 gap points", t);
}

#[test]
fn criterion_08_block_diagonalization_rank() {
    let t = Instant::now();
    let m = m1();
    let grid = build_grid(&m, 32);
    let eps = 0.5;
    let alpha = 1.0;
    let h = build_h_matrix(&m, eps, alpha, &grid);
    let ap = build_a_matrix(&m, &PencilParams::new(eps, alpha), &grid);
    let am = build_a_matrix(&m, &PencilParams::new(-eps, alpha), &grid);
    let sv = block_diag_check(&h, &ap, &am).unwrap();
    assert!(sv[4] <= 1e-10 * sv[0], "5th singular value ratio {}", sv[4] / sv[0]);
    pass(8, "block-diagonalization remainder has rank at most 4 at n=32", t);
}

#[test]
fn criterion_09_zscan_count_equality_and_weyl() {
    let t = Instant::now();
    let m = m1();
    let p = PencilParams::new(0.0, 3.0);
    let report = ess_spectrum(&m, &p).unwrap();
    let (lo, hi) = report.gap_upper.expect("upper gap open at alpha=3");
    let grid = build_grid(&m, 48);

    let t_edge = birman_schwinger_t(&m, &p, &grid, BsSide::BandEdgeTop, lo).unwrap();
    let edge_half = count_negative(&t_edge, Some(-0.5)).unwrap().negatives;

    for i in 0..20 {
        let z = lo + (hi - lo) * (0.04 + 0.92 * i as f64 / 19.0);
        let sign = symbol_sign(&m, &p, &grid, z).unwrap();
        let s = discretize_s(&m, &p, &grid, z).unwrap();
        let mut signed = s.matrix.clone();
        signed.iter_mut().for_each(|v| *v *= sign);
        let sc = count_negative(&DiscretizedKernel { matrix: signed, ..s }, None)
            .unwrap()
            .negatives;
        let tk = birman_schwinger_t(&m, &p, &grid, BsSide::BandEdgeTop, z).unwrap();
        let tc = count_negative(&tk, None).unwrap().negatives;
        assert_eq!(sc, tc, "counts differ at z={z}");

        // Weyl sandwich against the band-edge operator
        assert_eq!(tk.kept, t_edge.kept);
        let diff = &tk.matrix - &t_edge.matrix;
        let diff_half = count_negative(
            &DiscretizedKernel {
                matrix: diff,
                ..tk.clone()
            },
            Some(-0.5),
        )
        .unwrap()
        .negatives;
        assert!(
            tc <= edge_half + diff_half,
            "Weyl sandwich violated at z={z}: {tc} > {edge_half} + {diff_half}"
        );
    }
    pass(9, "S and T gap counts agree exactly on a 20-point z-scan, Weyl sandwich holds", t);
}

#[test]
fn criterion_10_every_spectrum_is_a_small_disjoint_union() {
    let t = Instant::now();
    let check_union = |u: &spinboson::spectrum::IntervalUnion, max: usize, ctx: &str| {
        let iv = u.intervals();
        assert!(!iv.is_empty() && iv.len() <= max, "{ctx}: {} components", iv.len());
        for w in iv.windows(2) {
            assert!(w[0].1 < w[1].0, "{ctx}: overlapping intervals");
        }
        for &(lo, hi) in iv {
            assert!(lo <= hi, "{ctx}: inverted interval");
        }
    };
    for m in [m1(), m2(), m3(), m4()] {
        for gamma in [-1.0, 0.0, 0.5] {
            for i in 0..6 {
                let alpha = 0.3 + 2.5 * i as f64 / 5.0;
                let r = ess_spectrum(&m, &PencilParams::new(gamma, alpha)).unwrap();
                check_union(&r.spectrum, 3, &format!("gamma={gamma} alpha={alpha}"));
            }
        }
    }
    let m = m1();
    for eps in [0.25, 0.5, 1.0] {
        for alpha in [0.5, 1.5, 3.0] {
            let h = ess_spectrum_hamiltonian(&m, eps, alpha).unwrap();
            check_union(&h.spectrum, 6, &format!("eps={eps} alpha={alpha}"));
        }
    }
    pass(10, "all emitted spectra are small disjoint unions of closed intervals", t);
}
