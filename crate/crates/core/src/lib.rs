//! Construction and verification of bipartite unique-neighbour expanders.
//!
//! The crate covers biregular multigraphs and their port maps ([`bigraph`],
//! [`io`]), spectral certification ([`spectral`]), non-backtracking path
//! operators and their bounds ([`nbwalk`]), gadget sampling and exhaustive
//! verification ([`gadget`]), the routed product ([`product`]) and the
//! parameter calculations that tie them together ([`params`]).
//!
//! ```
//! use une::bigraph::{even_cycle, BipartiteMultigraph};
//! use une::gadget::{verify_unique_neighbour_upto, VerifyOptions, VerifyStatus};
//! use une::product::routed_product;
//! use une::spectral::spectrum;
//!
//! let big = even_cycle(3);
//! assert!(spectrum(&big).unwrap().ramanujan);
//!
//! let gadget = BipartiteMultigraph::new(2, 2, vec![(0, 0), (1, 1)]).unwrap();
//! let cert = verify_unique_neighbour_upto(&gadget, 2, VerifyOptions::default()).unwrap();
//! assert_eq!(cert.status, VerifyStatus::Verified);
//!
//! let rp = routed_product(&big, &gadget).unwrap();
//! assert_eq!(rp.product.n_right(), 6);
//! ```
//!
//! A longer guide lives in `book/`; its code blocks run as doctests of this
//! crate.

pub mod bigraph;
pub mod gadget;
pub mod io;
pub mod nbwalk;
pub mod params;
pub mod precise;
pub mod product;
pub mod spectral;

// Each guide chapter becomes an empty module so `cargo test --doc` runs its
// code blocks.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    pub mod graphs {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    pub mod spectral {}
    #[doc = include_str!("../../../book/src/nonbacktracking.md")]
    pub mod nonbacktracking {}
    #[doc = include_str!("../../../book/src/gadgets.md")]
    pub mod gadgets {}
    #[doc = include_str!("../../../book/src/product.md")]
    pub mod product {}
    #[doc = include_str!("../../../book/src/parameters.md")]
    pub mod parameters {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
