/// Size caps for the search routines, all flag-overridable from the CLI.
#[derive(Debug, Clone, Copy)]
pub struct Caps {
    /// Isomorphism backtracking refuses tables larger than this.
    pub max_iso: usize,
    /// Witness searches (equivalence g and epsilon, transversal fiber
    /// products) give up past this many candidates.
    pub max_witness: usize,
    /// Multiplier enumeration refuses ideals larger than this.
    pub max_mult: usize,
    /// Endomorphism enumeration refuses algebras larger than this.
    pub max_endo: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_iso: 64,
            max_witness: 1_000_000,
            max_mult: 10,
            max_endo: 12,
        }
    }
}
