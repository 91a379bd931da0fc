//! Writes the synthetic end-to-end fixture.
//!
//! `cargo run --example make_fixture -- fixtures/e2e`

use std::path::PathBuf;

use figlex::synth::{write_fixture, SynthSpec};

fn main() -> figlex::Result<()> {
    let dir = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("fixtures/e2e"));
    write_fixture(&dir, &SynthSpec::default())?;
    println!("wrote {}", dir.display());
    Ok(())
}
