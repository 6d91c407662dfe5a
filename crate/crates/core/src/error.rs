use thiserror::Error;

/// Errors reported by table validation, structure certification and the
/// search routines. Every "not X" variant carries a minimal witness: the
/// counterexamples are the product.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("not associative: (s{0} s{1}) s{2} != s{0} (s{1} s{2})")]
    NotAssociative(usize, usize, usize),

    #[error("not regular: element {0} has no inverse")]
    NotRegular(usize),

    #[error("not an inverse semigroup: {0}")]
    NotInverse(String),

    #[error("not a group: {0}")]
    NotGroup(String),

    #[error("not a semilattice of groups: {0}")]
    NotClifford(String),

    #[error("invalid kernel normal system: {0}")]
    InvalidKns(String),

    #[error("axiom {axiom} fails at {witness:?}")]
    AxiomViolation { axiom: String, witness: Vec<usize> },

    #[error("size cap exceeded for {what}: {size} > {cap}")]
    SizeCapExceeded {
        what: String,
        size: usize,
        cap: usize,
    },

    #[error("not E-unitary: witness {0:?}")]
    NotEUnitary((usize, usize)),

    #[error("sieben condition fails at (s,e)={0:?}")]
    NotSieben((usize, usize)),

    #[error("not admissible: order condition fails at {0:?}")]
    NotAdmissible((usize, usize)),

    #[error("diagram failure in square {square} at element {witness}")]
    DiagramFailure { square: String, witness: usize },

    #[error("factorization failure at element {0}")]
    FactorizationFailure(usize),

    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn axiom(axiom: &str, witness: &[usize]) -> Self {
        Error::AxiomViolation {
            axiom: axiom.to_string(),
            witness: witness.to_vec(),
        }
    }

    pub fn cap(what: &str, size: usize, cap: usize) -> Self {
        Error::SizeCapExceeded {
            what: what.to_string(),
            size,
            cap,
        }
    }
}
