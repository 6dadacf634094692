//! Channels that cannot create coherence, checked through their Choi
//! matrices.
//!
//! cargo run --example ecpo_channels

use decometry::channels::{
    choi_is_cptp, choi_matrix, choi_of_map, ecpo_to_channel, is_cptp, projective_povm, random_sio, sio_to_kraus,
    EcpoSpec,
};
use decometry::linalg::{self, real, CMatrix};
use decometry::qstate::{random_unitary, Unitary};

fn main() -> decometry::Result<()> {
    let semi = EcpoSpec::semiclassical(projective_povm(&Unitary::hadamard()), random_unitary(2, 1)?)?;
    let ch = ecpo_to_channel(&semi, 2)?;
    println!("semiclassical: {} Kraus operators, CPTP {}", ch.kraus().len(), is_cptp(&ch));

    for t in [0.0, 0.5, 1.0] {
        let iso = ecpo_to_channel(&EcpoSpec::isotropic(t, Unitary::fourier(3))?, 3)?;
        println!("isotropic t={t:.1}: CPTP {}", is_cptp(&iso));
    }

    // With the transpose in place of a unitary the map is only CP for
    // t in [-1/(d-1), 1/(d+1)]; for a qubit that is [-1, 1/3].
    for t in [-1.0, 0.25, 1.0 / 3.0, 0.5, 1.0] {
        let map = |m: &CMatrix| m.transpose().scale(t) + linalg::identity(2) * (linalg::trace(m) * real((1.0 - t) / 2.0));
        println!("transpose-isotropic t={t:+.3}: CPTP {}", choi_is_cptp(&choi_of_map(2, map), 2, 2));
    }

    let sio = sio_to_kraus(&random_sio(3, 4, 7)?);
    let choi = choi_matrix(&sio);
    println!("random SIO: Choi trace {:.6}, CPTP {}", choi.trace().re, choi_is_cptp(&choi, 3, 3));
    Ok(())
}
