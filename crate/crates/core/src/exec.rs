//! Execution strategy for the Monte Carlo loops.
//!
//! Every batch loop in the crate goes through [`map_indexed`]: item `i` is a
//! pure function of `i` (it owns substream `i`), and results come back in
//! index order, so the output is identical under either mode. With the
//! `parallel` feature disabled, [`Mode::Parallel`] runs sequentially.

use std::sync::atomic::{AtomicU8, Ordering};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Sequential,
    Parallel,
}

const SEQUENTIAL: u8 = 0;
const PARALLEL: u8 = 1;

static MODE: AtomicU8 = AtomicU8::new(if cfg!(feature = "parallel") { PARALLEL } else { SEQUENTIAL });

pub fn mode() -> Mode {
    match MODE.load(Ordering::Relaxed) {
        PARALLEL => Mode::Parallel,
        _ => Mode::Sequential,
    }
}

/// Process-wide switch; mainly for benchmarks comparing both paths.
pub fn set_mode(mode: Mode) {
    let raw = match mode {
        Mode::Sequential => SEQUENTIAL,
        Mode::Parallel => PARALLEL,
    };
    MODE.store(raw, Ordering::Relaxed);
}

pub fn parallel_available() -> bool {
    cfg!(feature = "parallel")
}

pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match mode() {
        #[cfg(feature = "parallel")]
        Mode::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}
