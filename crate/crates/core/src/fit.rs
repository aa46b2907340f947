//! Inverse spectral fitting.
