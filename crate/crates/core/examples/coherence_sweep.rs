//! Sweeps `C_p` over `p` for a few qubit and qutrit states and checks the
//! qubit closed form and the maximally coherent bound along the way.
//!
//! cargo run --example coherence_sweep

use decometry::channels::DephasingChannel;
use decometry::coherence::{coherence_qubit_closed_form, max_coherence, qfi_dephasing, qfi_fd_oracle};
use decometry::qstate::{bloch_from_qubit, maximally_coherent, random_density, random_pure};

fn main() -> decometry::Result<()> {
    let plus = maximally_coherent(2, &[0.0, 0.0])?;
    let mixed = random_density(2, 2, 3)?;
    let v = bloch_from_qubit(&mixed)?;
    println!("{:>5} {:>12} {:>12} {:>12} {:>12}", "p", "C_p(|+>)", "bound d=2", "C_p(mixed)", "closed form");
    for k in 1..=10 {
        let p = k as f64 / 10.0;
        let ch = DephasingChannel::computational(2, p)?;
        println!(
            "{p:>5.1} {:>12.8} {:>12.8} {:>12.8} {:>12.8}",
            qfi_dephasing(&plus, &ch)?.value,
            max_coherence(2, p)?,
            qfi_dephasing(&mixed, &ch)?.value,
            coherence_qubit_closed_form(&v, p)?,
        );
    }

    // At p = 0 a pure coherent state has no finite Fisher information.
    let at_zero = qfi_dephasing(&plus, &DephasingChannel::computational(2, 0.0)?)?;
    println!("\nC_0(|+>) = {} ({} dropped terms)", at_zero.value, at_zero.dropped_terms);

    // Random qutrit pure states stay below the maximally coherent value.
    let p = 0.3;
    let ch = DephasingChannel::computational(3, p)?;
    let worst = (0..200)
        .map(|s| qfi_dephasing(&random_pure(3, s).unwrap(), &ch).unwrap().value)
        .fold(0.0, f64::max);
    println!("d=3, p={p}: max over 200 pure states {worst:.6} <= {:.6}", max_coherence(3, p)?);

    // The fidelity finite difference agrees with the spectral sum.
    let full_rank = random_density(3, 3, 11)?;
    let spectral = qfi_dephasing(&full_rank, &ch)?.value;
    let fd = qfi_fd_oracle(&full_rank, &ch, 1e-4)?;
    println!("spectral {spectral:.8}  finite difference {fd:.8}");
    Ok(())
}
