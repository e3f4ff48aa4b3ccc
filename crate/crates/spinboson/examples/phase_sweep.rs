//! Sweep the coupling at fixed detuning and print one CSV row per point,
//! tracking how gaps open as the coupling crosses the thresholds.

use spinboson::model::m1;
use spinboson::pencil::PencilParams;
use spinboson::spectrum::ess_spectrum;

fn main() {
    let model = m1();
    println!("gamma,alpha,n_components,E,F,gap1_lo,gap1_hi,gap2_lo,gap2_hi");
    for gamma in [-1.0, 0.0] {
        for i in 0..13 {
            let alpha = 0.25 * (i + 1) as f64;
            let r = ess_spectrum(&model, &PencilParams::new(gamma, alpha)).unwrap();
            let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
            let gap = |g: Option<(f64, f64)>| match g {
                Some((lo, hi)) => (format!("{lo:.6}"), format!("{hi:.6}")),
                None => (String::new(), String::new()),
            };
            let (g1l, g1h) = gap(r.gap_lower);
            let (g2l, g2h) = gap(r.gap_upper);
            println!(
                "{gamma},{alpha},{},{},{},{g1l},{g1h},{g2l},{g2h}",
                r.spectrum.n_components(),
                opt(r.e_root.value),
                opt(r.f_root.value),
            );
        }
    }
}
