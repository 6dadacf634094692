//! Discord of maximally entangled, classical-quantum and random states.
//!
//! cargo run --example discord_bell

use decometry::coherence::max_coherence;
use decometry::discord::{discord, discord_qubit_a_grid, OptimizerConfig};
use decometry::qstate::{cq_state, maximally_entangled, random_density, BipartiteState, DensityMatrix, Unitary};

fn main() -> decometry::Result<()> {
    let cfg = OptimizerConfig::default().with_seed(1);
    for d in [2, 3] {
        let r = discord(&maximally_entangled(d), 0.5, &cfg)?;
        println!(
            "d={d}: D_0.5 = {:.8} (bound {:.8}), {} starts, best start {}",
            r.value,
            max_coherence(d, 0.5)?,
            r.starts,
            r.best_start
        );
    }

    // Classical on A in the Hadamard basis: zero once the optimizer finds it.
    let conds = [DensityMatrix::basis_state(2, 0), DensityMatrix::maximally_mixed(2)];
    let cq = cq_state(&[0.3, 0.7], &Unitary::hadamard(), &conds)?;
    let r = discord(&cq, 0.5, &cfg)?;
    println!("CQ state: {:.2e}", r.value);
    println!("argmin basis:\n{}", r.argmin_basis.matrix());

    // A random two-qubit state against the Bloch-axis grid.
    let rho = BipartiteState::new(random_density(4, 4, 5)?, (2, 2))?;
    let opt = discord(&rho, 0.4, &cfg.clone().without_grid())?;
    let grid = discord_qubit_a_grid(&rho, 0.4)?;
    println!(
        "random state: optimizer {:.9}, grid {:.9}, axis {:?}",
        opt.value, grid.value, grid.axis
    );
    Ok(())
}
