//! Writing and reading the JSON formats the binary consumes.
//!
//! cargo run --example state_files -- /tmp/decometry-example

use std::path::PathBuf;

use decometry::channels::KrausChannel;
use decometry::io;
use decometry::qstate::{maximally_coherent, maximally_entangled, Unitary};

fn main() -> decometry::Result<()> {
    let dir = std::env::args().nth(1).map_or_else(std::env::temp_dir, PathBuf::from);
    std::fs::create_dir_all(&dir)?;

    let plus = dir.join("plus.json");
    io::write_state(&plus, &maximally_coherent(2, &[0.0, 0.0])?)?;
    let bell = dir.join("bell.json");
    io::write_bipartite(&bell, &maximally_entangled(2))?;
    let basis = dir.join("hadamard.json");
    io::write_unitary(&basis, &Unitary::hadamard())?;
    let cnot = dir.join("cnot.json");
    io::write_channel(&cnot, &KrausChannel::cnot())?;

    println!("{}", std::fs::read_to_string(&bell)?);
    assert_eq!(io::read_bipartite(&bell, None)?.dims(), (2, 2));
    assert_eq!(io::read_channel(&cnot)?, KrausChannel::cnot());
    println!("try:\n  decometry coherence {} --p 0.25,0.5,1", plus.display());
    println!("  decometry coherence {} --p 0.5 --basis-file {}", plus.display(), basis.display());
    println!("  decometry discord {} --p 0.5 --emit-basis {}", bell.display(), dir.join("argmin.json").display());
    Ok(())
}
