//! Estimating the dephasing strength from measurements on |+>.
//!
//! The ± measurement attains the quantum Fisher information, so the MLE
//! variance should sit on the Cramér–Rao line 1/(μ C_p).
//!
//! cargo run --release --example cramer_rao

use decometry::channels::{projective_povm, DephasingChannel};
use decometry::coherence::{crb_bound, p_from_time, qfi_dephasing};
use decometry::estimation::{classical_fisher_information, simulate_estimation};
use decometry::qstate::{maximally_coherent, Unitary};

fn main() -> decometry::Result<()> {
    let plus = maximally_coherent(2, &[0.0, 0.0])?;
    let povm = projective_povm(&Unitary::hadamard());
    let p = p_from_time(1.0, 1.0 / std::f64::consts::LN_2)?;
    let ch = DephasingChannel::computational(2, p)?;
    let qfi = qfi_dephasing(&plus, &ch)?.value;
    let cfi = classical_fisher_information(&plus, &ch, &povm)?;
    println!("p = {p:.6}  QFI {qfi:.6}  CFI of the ± POVM {cfi:.6}");

    println!("{:>8} {:>12} {:>12} {:>8}", "mu", "variance", "CRB", "ratio");
    for mu in [1_000u64, 10_000, 100_000] {
        let run = simulate_estimation(&plus, &Unitary::identity(2), p, mu, 400, &povm, 9)?;
        let crb = crb_bound(qfi, mu)?;
        println!("{mu:>8} {:>12.4e} {:>12.4e} {:>8.3}", run.variance, crb, run.variance / crb);
    }
    Ok(())
}
