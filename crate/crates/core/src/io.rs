//! Canonical text files for channels and games.
//!
//! Files are JSON with a fixed key order and layout; numbers use the
//! shortest decimal representation that round-trips to the same double, so
//! reading a canonical file and writing it back reproduces it byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;
use serde_json::Value;

use crate::channel::{validate, Channel, ValidationReport};
use crate::error::{Error, Result};
use crate::games::{Game, GameForm};
use crate::linalg::{c, CMatrix};
use crate::types::{GlobalType, SystemType};

pub const CHANNEL_FORMAT: &str = "losekit-channel/1";
pub const GAME_FORMAT: &str = "losekit-game/1";

pub type Metadata = BTreeMap<String, Value>;

/// A channel as stored on disk: type, raw Choi operator and metadata. The
/// Choi operator is not validated on read.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelFile {
    pub gtype: GlobalType,
    pub choi: CMatrix,
    pub metadata: Metadata,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatrix {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannelFile {
    format_version: String,
    gtype: GlobalType,
    choi: RawMatrix,
    #[serde(default)]
    metadata: Metadata,
}

fn format_err(e: impl std::fmt::Display) -> Error {
    Error::Format(e.to_string())
}

fn number(x: f64) -> Result<String> {
    if !x.is_finite() {
        return Err(Error::Format(format!("non-finite number {}", x)));
    }
    serde_json::to_string(&x).map_err(format_err)
}

fn wire_json(t: SystemType) -> String {
    format!("{{\"kind\": \"{}\", \"dim\": {}}}", kind_name(t), t.dim())
}

fn kind_name(t: SystemType) -> &'static str {
    match t.kind() {
        crate::types::SystemKind::Trivial => "trivial",
        crate::types::SystemKind::Classical => "classical",
        crate::types::SystemKind::Quantum => "quantum",
    }
}

fn write_gtype(out: &mut String, g: &GlobalType) {
    out.push_str("  \"gtype\": {\n");
    let wires = [("x", g.x), ("y", g.y), ("a", g.a), ("b", g.b)];
    for (i, (name, t)) in wires.iter().enumerate() {
        let sep = if i + 1 < wires.len() { "," } else { "" };
        let _ = writeln!(out, "    \"{}\": {}{}", name, wire_json(*t), sep);
    }
    out.push_str("  },\n");
}

fn write_matrix(out: &mut String, key: &str, m: &CMatrix, last: bool) -> Result<()> {
    let n = m.rows();
    let _ = writeln!(out, "  \"{}\": {{", key);
    let _ = writeln!(out, "    \"dim\": {},", n);
    out.push_str("    \"entries\": [\n");
    for i in 0..n {
        out.push_str("      ");
        for j in 0..n {
            let z = m[(i, j)];
            let _ = write!(out, "[{},{}]", number(z.re)?, number(z.im)?);
            if j + 1 < n {
                out.push_str(", ");
            }
        }
        out.push_str(if i + 1 < n { ",\n" } else { "\n" });
    }
    out.push_str("    ]\n");
    out.push_str(if last { "  }\n" } else { "  },\n" });
    Ok(())
}

fn write_metadata(out: &mut String, meta: &Metadata) -> Result<()> {
    if meta.is_empty() {
        out.push_str("  \"metadata\": {}\n");
        return Ok(());
    }
    out.push_str("  \"metadata\": {\n");
    for (i, (k, v)) in meta.iter().enumerate() {
        let sep = if i + 1 < meta.len() { "," } else { "" };
        let key = serde_json::to_string(k).map_err(format_err)?;
        let val = serde_json::to_string(v).map_err(format_err)?;
        let _ = writeln!(out, "    {}: {}{}", key, val, sep);
    }
    out.push_str("  }\n");
    Ok(())
}

fn matrix_from_raw(raw: RawMatrix, expected: usize, what: &str) -> Result<CMatrix> {
    if raw.dim != expected {
        return Err(Error::Format(format!(
            "{} declares dim {} but the type implies {}",
            what, raw.dim, expected
        )));
    }
    if raw.entries.len() != expected * expected {
        return Err(Error::Format(format!(
            "{} has {} entries, expected {}",
            what,
            raw.entries.len(),
            expected * expected
        )));
    }
    let data = raw.entries.into_iter().map(|[re, im]| c(re, im)).collect();
    CMatrix::from_vec(expected, expected, data)
}

impl ChannelFile {
    pub fn new(gtype: GlobalType, choi: CMatrix, metadata: Metadata) -> Result<Self> {
        let n = gtype.choi_dim();
        if !choi.is_square() || choi.rows() != n {
            return Err(Error::DimensionMismatch(format!(
                "Choi {}x{} for type {}",
                choi.rows(),
                choi.cols(),
                gtype
            )));
        }
        Ok(ChannelFile { gtype, choi, metadata })
    }

    pub fn from_channel(ch: &Channel, metadata: Metadata) -> Self {
        ChannelFile {
            gtype: *ch.gtype(),
            choi: ch.choi().clone(),
            metadata,
        }
    }

    /// Validated channel (CPTP, nonsignaling, classical wires).
    pub fn to_channel(&self) -> Result<Channel> {
        Channel::from_choi(self.gtype, self.choi.clone())
    }

    /// Validator deviations for the stored operator.
    pub fn validation(&self) -> Result<ValidationReport> {
        validate(&self.gtype, &self.choi)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawChannelFile = serde_json::from_str(text).map_err(format_err)?;
        if raw.format_version != CHANNEL_FORMAT {
            return Err(Error::Format(format!(
                "unsupported format_version '{}' (expected '{}')",
                raw.format_version, CHANNEL_FORMAT
            )));
        }
        let choi = matrix_from_raw(raw.choi, raw.gtype.choi_dim(), "choi")?;
        Ok(ChannelFile {
            gtype: raw.gtype,
            choi,
            metadata: raw.metadata,
        })
    }

    /// Canonical text.
    pub fn to_canonical(&self) -> Result<String> {
        let mut out = String::new();
        out.push_str("{\n");
        let _ = writeln!(out, "  \"format_version\": \"{}\",", CHANNEL_FORMAT);
        write_gtype(&mut out, &self.gtype);
        write_matrix(&mut out, "choi", &self.choi, false)?;
        write_metadata(&mut out, &self.metadata)?;
        out.push_str("}\n");
        Ok(out)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Format(format!("cannot read {}: {}", path.display(), e)))?;
        ChannelFile::parse(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_canonical()?)
            .map_err(|e| Error::Format(format!("cannot write {}: {}", path.display(), e)))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPayoff {
    input_dist: Vec<Vec<f64>>,
    /// `table[a][b][x][y]`
    table: Vec<Vec<Vec<Vec<f64>>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGameFile {
    format_version: String,
    gtype: GlobalType,
    #[serde(default)]
    payoff: Option<RawPayoff>,
    #[serde(default)]
    witness: Option<RawMatrix>,
    #[serde(default)]
    metadata: Metadata,
}

/// A game as stored on disk.
#[derive(Clone, Debug, PartialEq)]
pub struct GameFile {
    pub game: Game,
    pub metadata: Metadata,
}

impl GameFile {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawGameFile = serde_json::from_str(text).map_err(format_err)?;
        if raw.format_version != GAME_FORMAT {
            return Err(Error::Format(format!(
                "unsupported format_version '{}' (expected '{}')",
                raw.format_version, GAME_FORMAT
            )));
        }
        let g = raw.gtype;
        let game = match (raw.payoff, raw.witness) {
            (Some(p), None) => {
                let [na, nb, nx, ny] = g.choi_dims();
                let shape_ok = p.table.len() == na
                    && p.table.iter().all(|t| {
                        t.len() == nb && t.iter().all(|t| t.len() == nx && t.iter().all(|t| t.len() == ny))
                    });
                if !shape_ok {
                    return Err(Error::Format(format!(
                        "payoff table must have shape [{}][{}][{}][{}]",
                        na, nb, nx, ny
                    )));
                }
                let flat = p.table.into_iter().flatten().flatten().flatten().collect();
                Game::payoff(g, p.input_dist, flat)?
            }
            (None, Some(w)) => Game::witness(g, matrix_from_raw(w, g.choi_dim(), "witness")?)?,
            _ => return Err(Error::Format("a game needs exactly one of 'payoff' or 'witness'".into())),
        };
        Ok(GameFile {
            game,
            metadata: raw.metadata,
        })
    }

    pub fn to_canonical(&self) -> Result<String> {
        let mut out = String::new();
        out.push_str("{\n");
        let _ = writeln!(out, "  \"format_version\": \"{}\",", GAME_FORMAT);
        write_gtype(&mut out, self.game.gtype());
        match self.game.form() {
            GameForm::Payoff { input_dist, payoff } => {
                let [na, nb, nx, ny] = self.game.gtype().choi_dims();
                let row = |v: &[f64]| -> Result<String> {
                    Ok(format!("[{}]", v.iter().map(|&x| number(x)).collect::<Result<Vec<_>>>()?.join(", ")))
                };
                out.push_str("  \"payoff\": {\n");
                let dist: Vec<String> = input_dist.iter().map(|r| row(r)).collect::<Result<_>>()?;
                let _ = writeln!(out, "    \"input_dist\": [{}],", dist.join(", "));
                out.push_str("    \"table\": [\n");
                for a in 0..na {
                    let mut blocks = Vec::new();
                    for b in 0..nb {
                        let mut xs = Vec::new();
                        for x in 0..nx {
                            let start = ((a * nb + b) * nx + x) * ny;
                            xs.push(row(&payoff[start..start + ny])?);
                        }
                        blocks.push(format!("[{}]", xs.join(", ")));
                    }
                    let sep = if a + 1 < na { "," } else { "" };
                    let _ = writeln!(out, "      [{}]{}", blocks.join(", "), sep);
                }
                out.push_str("    ]\n  },\n");
            }
            GameForm::Witness(w) => write_matrix(&mut out, "witness", w, false)?,
        }
        write_metadata(&mut out, &self.metadata)?;
        out.push_str("}\n");
        Ok(out)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Format(format!("cannot read {}: {}", path.display(), e)))?;
        GameFile::parse(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_canonical()?)
            .map_err(|e| Error::Format(format!("cannot write {}: {}", path.display(), e)))
    }
}

/// Metadata with a single `name` entry.
pub fn named_metadata(name: &str) -> Metadata {
    let mut m = Metadata::new();
    m.insert("name".into(), Value::String(name.into()));
    m
}
