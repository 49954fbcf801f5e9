//! p-adic valuations of `a^n ± b^n`, Wieferich primes to base pairs, and
//! the checks built on them: a higher-order Wieferich test on Pythagorean
//! triples and the squarefree / powerful splitting of `a^n - 1`.

pub mod abc;
pub mod arith;
pub mod error;
pub mod fermat;
pub mod flt;
pub mod fuzz;
pub mod identity;
pub mod scan;

pub use arith::{is_prime, Prime};
pub use error::{Error, ErrorKind, Result};
pub use fermat::WieferichOrder;
pub use identity::{BasePair, DefectReport, Sign};
