//! File formats, experiment harness, and output emitters for the green bin
//! packing toolkit. The `gbp` binary is a thin wrapper over these modules.

pub mod formats;
pub mod harness;
pub mod output;
