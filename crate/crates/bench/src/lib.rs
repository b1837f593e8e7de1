//! Fixed instances shared by the benchmarks.

use nctheta::verify::cycle;
use nctheta::{random, NcGraph, Result, WeightMatrix};

/// A random graph spanned by `I` and two Hermitian matrices, with a random weight.
pub fn random_instance(n: usize, seed: u64) -> Result<(NcGraph, WeightMatrix)> {
    let mut rng = random::rng(seed);
    let g = random::nc_graph(n, 2, &mut rng)?;
    let w = WeightMatrix::new(random::psd(n, &mut rng))?;
    Ok((g, w))
}

/// The classical `n`-cycle with unit weights.
pub fn cycle_instance(n: usize) -> Result<(NcGraph, WeightMatrix)> {
    Ok((NcGraph::from_classical_graph(&cycle(n))?, WeightMatrix::identity(n)))
}
