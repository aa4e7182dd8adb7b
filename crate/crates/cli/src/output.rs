use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::Context;

/// Writes `body` to `out` (or stdout) and the one-line summary to stdout, or
/// to stderr when stdout already carries the CSV.
pub fn emit(out: Option<&Path>, body: &str, summary: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
            println!("{summary}");
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(body.as_bytes()).context("writing stdout")?;
            stdout.flush().context("writing stdout")?;
            eprintln!("{summary}");
        }
    }
    Ok(())
}
