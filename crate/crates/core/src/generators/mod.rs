//! Synthetic graphs and call logs with known structure.

mod log_synth;
mod pa;
mod uniform;

pub use log_synth::{subscriber_id, synthesize_log, LogSynthParams, SynthCall, SyntheticLog, REGIONS};
pub use pa::{generate_pa, generate_pa_with_stats, PAParams, PAStats, MAX_LINK_ATTEMPTS};
pub use uniform::generate_uniform;
