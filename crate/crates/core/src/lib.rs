pub mod certify;
pub mod chardet;
pub mod error;
pub mod evp;
pub mod gridscan;
pub mod hermite;
pub mod numerics;
pub mod sdpsolve;
pub mod sosgram;
pub mod system;
pub mod trigpoly;

pub use error::{Error, Result};
pub use system::DelaySystem;
