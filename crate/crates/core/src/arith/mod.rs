//! Exact arithmetic primitives: valuations, modular powers, orders,
//! primes and factoring.

pub mod factor;
pub mod modpow;
pub mod order;
pub mod prime;
pub mod sieve;
pub mod valuation;

pub use factor::{factor_big, factor_u64, FactorBudget, Factorization};
pub use modpow::{modpow, modpow_u64};
pub use order::{multiplicative_order, OrderResult};
pub use prime::{is_prime, is_probable_prime_big, Prime};
pub use sieve::{primes_in, primes_in_with_span, PrimeRange};
pub use valuation::{vp, vp_rational};
