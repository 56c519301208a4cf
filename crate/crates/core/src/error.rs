use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid lattice data: {0}")]
    Lattice(String),

    #[error("invalid tree at {path}: {message}")]
    Tree { path: String, message: String },

    #[error("division by the zero function")]
    DivisionByZero,

    #[error("{0}")]
    NotRepresentable(String),

    #[error("not a polynomial: primitive {order}-th roots of unity have multiplicity {multiplicity}")]
    NotPolynomial { order: String, multiplicity: i64 },

    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("constant term: the polynomial does not vanish at the origin")]
    ConstantTerm,

    #[error("zero polynomial")]
    ZeroPolynomial,

    #[error("polynomial is divisible by x or y; divide out the monomial factor first")]
    MonomialFactor,

    #[error("degenerate polynomial: face {face} has face polynomial {face_poly} with repeated factor {gcd}")]
    Degenerate {
        face: String,
        face_poly: String,
        gcd: String,
    },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

impl Error {
    pub(crate) fn tree(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Tree {
            path: path.into(),
            message: message.into(),
        }
    }
}
