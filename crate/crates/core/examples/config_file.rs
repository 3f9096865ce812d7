//! Loading a JSON scenario and running the optimize command on it.

use std::path::PathBuf;

use ma_outage::experiment::{cmd_optimize, RunOptions};

pub fn run_example() -> ma_outage::Result<()> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let out = std::env::temp_dir().join(format!("ma-outage-example-{}", std::process::id()));
    let mut opts = RunOptions::new(root.join("configs/reference.json"), &out);
    opts.starts = Some(2);

    let outcome = cmd_optimize(&opts)?;
    println!("{}", outcome.summary);
    for f in &outcome.files {
        println!("  {}", out.join(f).display());
    }
    std::fs::remove_dir_all(&out)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> ma_outage::Result<()> {
    run_example()
}
