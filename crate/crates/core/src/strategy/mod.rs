//! Alice's hyperplane strategy and the adversaries it is tested against.

pub mod alice;
pub mod bob;
pub mod levels;
pub mod params;
pub mod setup;

pub use levels::{classify_ball, find_ek, prime_check, vb_class, EkRecord};
pub use params::{derive_params, Mode, ParamMode, StrategyParams};
pub use setup::PlaySetup;
