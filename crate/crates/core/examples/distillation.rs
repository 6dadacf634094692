//! Whether `C_0` is finite, and why strictly incoherent operations cannot
//! distill a pure coherent state from a full-rank one.
//!
//! cargo run --example distillation

use decometry::channels::{measure_ensemble, random_sio, sio_to_kraus, DephasingChannel};
use decometry::coherence::{c0_is_finite, qfi_dephasing};
use decometry::qstate::{maximally_coherent, random_density, DensityMatrix, Unitary};

fn main() -> decometry::Result<()> {
    let id = Unitary::identity(3);
    let at_zero = DephasingChannel::computational(3, 0.0)?;
    let samples = [
        ("full rank", random_density(3, 3, 1)?),
        ("rank 2", random_density(3, 2, 2)?),
        ("max coherent", maximally_coherent(3, &[0.0, 1.0, 2.0])?),
        ("diagonal rank 2", DensityMatrix::diagonal(&[0.5, 0.5, 0.0])?),
    ];
    for (name, rho) in &samples {
        println!(
            "{name:>16}: C_0 finite {:5}  C_0 = {}",
            c0_is_finite(rho, &id)?,
            qfi_dephasing(rho, &at_zero)?.value
        );
    }

    // Every branch of an SIO applied to a full-rank state keeps C_0 finite.
    let rho = random_density(3, 3, 4)?;
    let ch = sio_to_kraus(&random_sio(3, 3, 5)?);
    for (prob, branch) in measure_ensemble(&rho, &ch)? {
        println!("branch prob {prob:.4}: C_0 finite {}", c0_is_finite(&branch, &id)?);
    }
    Ok(())
}
