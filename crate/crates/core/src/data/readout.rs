use serde::{Deserialize, Serialize};

use super::code::{CodeSpec, PauliOp};
use crate::error::{Error, Result};
use crate::lattice::{DataPlane, LatticeState};
use crate::structure::toom_step;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Readout {
    Value(u8),
    Tie,
}

/// Applies Toom's rule to the data bits (repetition-code correction).
pub fn classical_data_step(lat: &mut LatticeState) -> Result<()> {
    let n = lat.n;
    let bits = lat
        .data
        .bits_mut()
        .ok_or_else(|| Error::Config("classical data step needs a bit data plane".into()))?;
    *bits = toom_step(bits, n);
    Ok(())
}

/// Global majority of the data plane; frame planes decode every site's
/// block first (bit-flip component) and then take the majority.
pub fn logical_readout(lat: &LatticeState, code: Option<&CodeSpec>) -> Result<Readout> {
    let (ones, total) = match &lat.data {
        DataPlane::Bits(b) => (b.iter().filter(|&&v| v == 1).count(), b.len()),
        DataPlane::Frames { x, z, .. } => {
            let code = code.ok_or_else(|| Error::Config("frame readout needs a code".into()))?;
            let flips = x
                .iter()
                .zip(z)
                .filter(|(&x, &z)| code.ideal_decode(&PauliOp::new(x, z)).logical_x)
                .count();
            (flips, x.len())
        }
        DataPlane::Opaque { .. } => return Err(Error::Config("opaque data has no logical readout".into())),
    };
    Ok(match (2 * ones).cmp(&total) {
        std::cmp::Ordering::Less => Readout::Value(0),
        std::cmp::Ordering::Greater => Readout::Value(1),
        std::cmp::Ordering::Equal => Readout::Tie,
    })
}
