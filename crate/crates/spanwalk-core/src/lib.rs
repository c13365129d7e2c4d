//! Random spanning tree generation for undirected graphs.
//!
//! The headline samplers run a random walk that is allowed to shortcut
//! across already-covered low-diameter regions of the graph: the graph is
//! partitioned by [`decompose`], exit distributions for each region are
//! obtained from electrical-flow solves in [`laplacian`] and packaged into
//! cumulative lookup tables in [`tables`], and [`walk`] consumes those
//! tables to produce a first-entry arborescence many steps faster than the
//! plain cover-time walk. [`arborescence`] turns transcripts into spanning
//! trees, including the exact resampling step the vertex-shortcut walk
//! needs, and [`oracle`] holds the independent exact references (tree
//! counts, enumeration, absorbing-chain probabilities, distribution tests)
//! the rest of the crate is validated against.
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the CLI live
//! in the companion `spanwalk-cli` crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod arborescence;
pub mod decompose;
pub mod generators;
pub mod graph;
pub mod laplacian;
pub mod oracle;
pub mod pipeline;
pub mod tables;
pub mod walk;

mod exact;
