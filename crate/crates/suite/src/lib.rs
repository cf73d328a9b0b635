//! Holds the acceptance runner in `tests/acceptance.rs`. Run it with
//! `cargo test -p attn-suite --test acceptance`.
