//! Exact symbolic toolkit for simply-laced isomonodromy systems on complete
//! k-partite graphs: classical potentials and their necklace brackets, Weyl
//! algebra quantisation through anchored cycles, strong flatness checks, and
//! the reductions to KZ-type connections.

pub mod anchored;
pub mod cycles;
pub mod flatness;
pub mod quiver;
pub mod reductions;
pub mod scalars;
pub mod weyl;
