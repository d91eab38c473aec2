//! Writes a channel to its canonical file, reads it back and checks the bytes.

use losekit::io::{named_metadata, ChannelFile};
use losekit::zoo;

fn main() -> losekit::Result<()> {
    let dir = std::env::temp_dir().join("losekit-example");
    std::fs::create_dir_all(&dir).map_err(|e| losekit::Error::Format(e.to_string()))?;
    let path = dir.join("dfp.json");
    let file = ChannelFile::from_channel(&zoo::dfp(zoo::DFP_ALPHA)?, named_metadata("dfp"));
    file.write(&path)?;
    let back = ChannelFile::read(&path)?;
    let identical = back.to_canonical()? == file.to_canonical()?;
    let ch = back.to_channel()?;
    println!("{} ({}), byte-identical: {}, Choi dim {}", path.display(), ch.gtype(), identical, ch.choi().rows());
    Ok(())
}
