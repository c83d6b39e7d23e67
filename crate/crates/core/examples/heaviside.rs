//! Regularized switch and the volatility it produces across the threshold.

use migfem::model::{effective_volatility, smoothed_heaviside, smoothed_heaviside_deriv};
use migfem::ModelParams;

fn main() -> migfem::Result<()> {
    let params = ModelParams::default();
    let threshold = params.threshold().value(0.0);
    println!("threshold at t=0: {threshold:.4}, eps = {}", params.epsilon);
    println!("{:>10} {:>10} {:>10} {:>10}", "u", "H", "H'", "sigma");
    for k in -6..=6 {
        let d = k as f64 * params.epsilon / 4.0;
        let u = threshold + d;
        println!(
            "{u:>10.5} {:>10.6} {:>10.4} {:>10.6}",
            smoothed_heaviside(d, params.epsilon)?,
            smoothed_heaviside_deriv(d, params.epsilon)?,
            effective_volatility(u, 0.0, &params)?
        );
    }
    Ok(())
}
