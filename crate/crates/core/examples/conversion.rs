//! Coherence on A converts into at most the same amount of discord.
//!
//! A CNOT with control A maps |+>|0> to a Bell state and saturates the
//! bound; random controlled permutations stay below it.
//!
//! cargo run --example conversion

use decometry::channels::{random_commuting_bipartite_sio, KrausChannel};
use decometry::discord::{conversion_check, OptimizerConfig};
use decometry::qstate::{maximally_coherent, random_density, DensityMatrix};

fn main() -> decometry::Result<()> {
    let cfg = OptimizerConfig::default();
    let p = 0.5;
    let plus = maximally_coherent(2, &[0.0, 0.0])?;
    let zero = DensityMatrix::basis_state(2, 0);
    let r = conversion_check(&plus, &zero, &KrausChannel::cnot(), p, &cfg)?;
    println!("CNOT: C_in {:.8}  D_out {:.8}  slack {:+.2e}", r.c_in, r.d_out, r.slack);

    let sigma_b = DensityMatrix::diagonal(&[0.6, 0.3, 0.1])?;
    for seed in 0..5 {
        let rho_a = random_density(2, 1 + (seed as usize % 2), seed)?;
        let e = random_commuting_bipartite_sio(2, 3, 3, 100 + seed)?;
        let r = conversion_check(&rho_a, &sigma_b, &e, p, &cfg)?;
        println!("seed {seed}: C_in {:.6}  D_out {:.6}  slack {:+.3e}", r.c_in, r.d_out, r.slack);
    }
    Ok(())
}
