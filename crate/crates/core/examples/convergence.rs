//! Spatial and temporal convergence tables.
//!
//! `cargo run --release --example convergence -- [epsilon]`; a wider
//! regularization band reaches the asymptotic regime on coarser meshes.

use migfem::verify::{spatial_convergence_study, temporal_convergence_study, Norm};
use migfem::ModelParams;

fn main() -> migfem::Result<()> {
    let mut params = ModelParams::default();
    if let Some(eps) = std::env::args().nth(1).and_then(|s| s.parse().ok()) {
        params.epsilon = eps;
    }
    println!("epsilon = {}", params.epsilon);

    let spatial = spatial_convergence_study(&params, &[1, 2], &[32, 64, 128, 256], 1024)?;
    spatial.write_csv(std::io::stdout().lock())?;
    for f in &spatial.fitted {
        println!("order {}: fitted L2 {:?}, pairwise L∞ {:?}", f.order, f.l2, spatial.pairwise(f.order, Norm::Linf));
    }

    let temporal = temporal_convergence_study(&params, &[32, 64, 128, 256], 512, 1)?;
    temporal.write_csv(std::io::stdout().lock())?;
    println!("temporal fitted L2 {:?}", temporal.fitted[0].l2);
    Ok(())
}
