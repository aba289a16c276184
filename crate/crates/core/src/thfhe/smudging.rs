use num_rational::Ratio;

use crate::error::{Error, Result};

/// Largest total-variation distance between `U[-B2, B2]` and
/// `e + U[-B2, B2]` over shifts `|e| <= B1`, which is `B1 / (2·B2 + 1)`.
pub fn smudging_tv_distance(b1: u64, b2: u64) -> Result<Ratio<u64>> {
    if b1 > b2 {
        return Err(Error::param(format!("shift bound {b1} exceeds smudging bound {b2}")));
    }
    Ok(Ratio::new(b1, 2 * b2 + 1))
}
