//! Measuring sites of a weighted graph state and undoing the phase kick with
//! local unitaries.

use wgslab::exact::{build_wgs, lu_correction, measure_sequence, verify_theorem1, StateVector};
use wgslab::lattice::{CouplingModel, Range};

fn main() -> wgslab::Result<()> {
    let model = CouplingModel::chain(6, 1.0, Range::Full)?;
    let t = 1.9;
    let sites = [1, 4];

    for outcomes in [[0u8, 0], [1, 0], [0, 1], [1, 1]] {
        let check = verify_theorem1(&model, t, &sites, &outcomes)?;
        println!(
            "outcomes {outcomes:?}: p = {:.4}, fidelity {:.12} corrected, {:.6} uncorrected",
            check.record.probability, check.fidelity, check.fidelity_without_lu
        );
    }

    let pairs = [(1, 1), (4, 1)];
    for l in [0, 2, 3, 5] {
        let u = lu_correction(&model, t, &pairs, l)?;
        println!("  site {l}: diag({:.4}, {:.4})", u.d0, u.d1);
    }

    // Round trip through the binary state format.
    let (_, post) = measure_sequence(&build_wgs(&model, t)?, &sites, &[1, 1])?;
    let mut buf = Vec::new();
    post.write_wgsv(&mut buf)?;
    let back = StateVector::read_wgsv(buf.as_slice())?;
    println!("dumped {} bytes, reread {} qubits, overlap {:.12}", buf.len(), back.n_qubits(), back.fidelity(&post)?);
    Ok(())
}
