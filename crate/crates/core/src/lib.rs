pub mod contfrac;
pub mod cyclo;
pub mod error;
pub mod exactgeom;
pub mod io;
pub mod lattice;
pub mod oracle;
pub mod quantize;
pub mod shapes;
pub mod swf;
pub mod unfold;

pub use error::{Error, Result};
