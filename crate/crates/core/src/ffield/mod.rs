//! Prime-field arithmetic, dense `Z_p` matrices with exact rank, and a
//! fraction-free rational oracle.

pub mod exact;
pub mod matrix;
pub mod modulus;
pub mod rank;

pub use exact::{bareiss_rank, ExactRing, IntegerMatrix, DEFAULT_ORACLE_LIMIT};
pub use matrix::FieldMatrix;
pub use modulus::{fe_inv, is_prime, FieldElement, FieldModulus, DEFAULT_PRIME};
pub use rank::{rank_mod_p, rank_mod_p_owned};

use crate::error::Result;
use num_bigint::BigInt;

/// Exact rank over `Q` of an integer matrix, within the default size limit.
pub fn rank_rational(m: &IntegerMatrix<BigInt>) -> Result<usize> {
    m.rank()
}

/// Reduces an integer matrix modulo `p`.
pub fn reduce_mod_p(m: &IntegerMatrix<BigInt>, modulus: FieldModulus) -> FieldMatrix {
    let p = BigInt::from(modulus.get());
    FieldMatrix::from_fn(m.rows(), m.cols(), modulus, |i, j| {
        let r = ((m.get(i, j) % &p) + &p) % &p;
        u64::try_from(r).expect("residue fits")
    })
}
