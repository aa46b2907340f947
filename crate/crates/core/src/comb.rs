//! Comb-domain parameters.
