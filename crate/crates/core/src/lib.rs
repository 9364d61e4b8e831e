//! Exact arithmetic for arboreal Galois representations of polynomials over ℚ:
//! tree automorphism groups, iterate discriminants, square classes, index
//! certificates and a replayable field construction.

pub mod arboreal;
pub mod bigjson;
pub mod construct;
pub mod exactpoly;
pub mod factor;
pub mod sqclass;
pub mod supernat;
pub mod treegroup;

use thiserror::Error;

/// Any error raised by this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Factor(#[from] factor::FactorError),
    #[error(transparent)]
    Poly(#[from] exactpoly::PolyError),
    #[error(transparent)]
    Class(#[from] sqclass::ClassError),
    #[error(transparent)]
    Supernat(#[from] supernat::SupernatError),
    #[error(transparent)]
    Tree(#[from] treegroup::TreeError),
    #[error(transparent)]
    Arbor(#[from] arboreal::ArborError),
    #[error(transparent)]
    Construct(#[from] construct::ConstructError),
}

impl Error {
    /// Whether a search or work budget ran out, as opposed to bad input.
    pub fn is_exhaustion(&self) -> bool {
        use arboreal::ArborError;
        use sqclass::ClassError;
        fn class(e: &ClassError) -> bool {
            matches!(
                e,
                ClassError::Factor(_)
                    | ClassError::DepthExhausted { .. }
                    | ClassError::Poly(exactpoly::PolyError::Factor(_))
            )
        }
        fn arbor(e: &ArborError) -> bool {
            match e {
                ArborError::NoGoodPrimes(_) => true,
                ArborError::Class(c) => class(c),
                ArborError::Poly(exactpoly::PolyError::Factor(_)) => true,
                _ => false,
            }
        }
        match self {
            Error::Factor(factor::FactorError::BudgetExhausted { .. }) => true,
            Error::Poly(exactpoly::PolyError::Factor(_)) => true,
            Error::Class(c) => class(c),
            Error::Arbor(a) => arbor(a),
            Error::Construct(c) => match c {
                construct::ConstructError::Class(e) => class(e),
                construct::ConstructError::Arbor(e) => arbor(e),
                other => other.is_exhaustion(),
            },
            _ => false,
        }
    }
}
