//! Flat-file serialization for every instance kind.
//!
//! One JSON document per file with explicit `kind` and `version` fields.
//! Numeric fields are integers only; edges are sorted index pairs; dense
//! cost matrices are nested arrays with a `{"trivial": true}` shortcut.
//! Loading validates everything and reports the offending field path.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::games::{CoordinationGame, StrategyProfile};
use crate::market::{Allocation, CostSpec, MarketInstance};
use crate::reductions::{CutAssignment, GameReductionMap, MaxCutInstance, MaxCutReductionMap};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("validation error at {path}: {rule}")]
    Validation { path: String, rule: String },
}

impl IoError {
    fn invalid(path: impl Into<String>, rule: impl std::fmt::Display) -> Self {
        IoError::Validation {
            path: path.into(),
            rule: rule.to_string(),
        }
    }
}

impl From<serde_json::Error> for IoError {
    fn from(err: serde_json::Error) -> Self {
        IoError::Parse {
            line: err.line(),
            column: err.column(),
            message: err.to_string(),
        }
    }
}

fn check_header(kind: &str, version: u32, expected: &str) -> Result<(), IoError> {
    if kind != expected {
        return Err(IoError::invalid(
            "kind",
            format!("expected \"{expected}\", found \"{kind}\""),
        ));
    }
    if version != FORMAT_VERSION {
        return Err(IoError::invalid(
            "version",
            format!("unsupported version {version}"),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
enum CostFile {
    Trivial {
        trivial: bool,
    },
    Dense {
        dense: Vec<Vec<i64>>,
    },
    Partitioned {
        labels: Vec<u8>,
        table: [[i64; 2]; 2],
    },
}

impl CostFile {
    fn to_spec(&self, agent: usize) -> Result<CostSpec, IoError> {
        match self {
            CostFile::Trivial { trivial } => {
                if !trivial {
                    return Err(IoError::invalid(
                        format!("costs[{agent}].trivial"),
                        "must be true when present",
                    ));
                }
                Ok(CostSpec::Trivial)
            }
            CostFile::Dense { dense } => Ok(CostSpec::Dense(dense.clone())),
            CostFile::Partitioned { labels, table } => {
                if labels.iter().any(|&l| l > 1) {
                    return Err(IoError::invalid(
                        format!("costs[{agent}].labels"),
                        "labels must be 0 or 1",
                    ));
                }
                Ok(CostSpec::Partitioned {
                    labels: labels.iter().map(|&l| l == 1).collect(),
                    table: *table,
                })
            }
        }
    }

    fn from_spec(spec: &CostSpec) -> Self {
        match spec {
            CostSpec::Trivial => CostFile::Trivial { trivial: true },
            CostSpec::Dense(m) => CostFile::Dense { dense: m.clone() },
            CostSpec::Partitioned { labels, table } => CostFile::Partitioned {
                labels: labels.iter().map(|&l| l as u8).collect(),
                table: *table,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketFile {
    pub kind: String,
    pub version: u32,
    pub n: usize,
    pub agent_edges: Vec<(usize, usize, i64)>,
    pub item_edges: Vec<(usize, usize)>,
    pub valuations: Vec<Vec<i64>>,
    costs: Vec<CostFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agent_names: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub item_names: Option<Vec<String>>,
}

pub fn market_to_file(inst: &MarketInstance) -> MarketFile {
    MarketFile {
        kind: "market".into(),
        version: FORMAT_VERSION,
        n: inst.num_agents(),
        agent_edges: inst.agent_edges().to_vec(),
        item_edges: inst.item_edges().to_vec(),
        valuations: inst.valuations().to_vec(),
        costs: (0..inst.num_agents())
            .map(|i| CostFile::from_spec(inst.cost_spec(i)))
            .collect(),
        agent_names: None,
        item_names: None,
    }
}

pub fn market_from_file(file: &MarketFile) -> Result<MarketInstance, IoError> {
    check_header(&file.kind, file.version, "market")?;
    if file.n == 0 {
        return Err(IoError::invalid("n", "n >= 1"));
    }
    if file.valuations.len() != file.n {
        return Err(IoError::invalid(
            "valuations",
            format!("need one row per agent (|A| = |N| = {})", file.n),
        ));
    }
    if let Some(names) = &file.agent_names {
        if names.len() != file.n {
            return Err(IoError::invalid("agent_names", "length must equal n"));
        }
    }
    if let Some(names) = &file.item_names {
        if names.len() != file.n {
            return Err(IoError::invalid("item_names", "length must equal n"));
        }
    }
    let costs = file
        .costs
        .iter()
        .enumerate()
        .map(|(i, c)| c.to_spec(i))
        .collect::<Result<Vec<_>, _>>()?;
    MarketInstance::new(
        file.n,
        file.agent_edges.clone(),
        file.item_edges.clone(),
        file.valuations.clone(),
        costs,
    )
    .map_err(|e| IoError::invalid("market", e))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    pub kind: String,
    pub version: u32,
    pub num_players: usize,
    pub m: u32,
    pub edges: Vec<(usize, usize)>,
    pub strategy_sets: Vec<Vec<u32>>,
}

pub fn game_to_file(game: &CoordinationGame) -> GameFile {
    GameFile {
        kind: "coordgame".into(),
        version: FORMAT_VERSION,
        num_players: game.num_players(),
        m: game.universe(),
        edges: game.edges().to_vec(),
        strategy_sets: (0..game.num_players())
            .map(|i| game.strategy_set(i).to_vec())
            .collect(),
    }
}

pub fn game_from_file(file: &GameFile) -> Result<CoordinationGame, IoError> {
    check_header(&file.kind, file.version, "coordgame")?;
    CoordinationGame::new(
        file.num_players,
        file.edges.clone(),
        file.m,
        file.strategy_sets.clone(),
    )
    .map_err(|e| IoError::invalid("coordgame", e))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaxCutFile {
    pub kind: String,
    pub version: u32,
    pub num_vertices: usize,
    pub edges: Vec<(usize, usize, i64)>,
}

pub fn maxcut_to_file(inst: &MaxCutInstance) -> MaxCutFile {
    MaxCutFile {
        kind: "maxcut".into(),
        version: FORMAT_VERSION,
        num_vertices: inst.num_vertices(),
        edges: inst.edges().to_vec(),
    }
}

pub fn maxcut_from_file(file: &MaxCutFile) -> Result<MaxCutInstance, IoError> {
    check_header(&file.kind, file.version, "maxcut")?;
    MaxCutInstance::new(file.num_vertices, file.edges.clone())
        .map_err(|e| IoError::invalid("maxcut", e))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AllocationFile {
    pub kind: String,
    pub version: u32,
    pub assignment: Vec<usize>,
}

pub fn allocation_to_file(alloc: &Allocation) -> AllocationFile {
    AllocationFile {
        kind: "allocation".into(),
        version: FORMAT_VERSION,
        assignment: alloc.as_slice().to_vec(),
    }
}

pub fn allocation_from_file(file: &AllocationFile) -> Result<Allocation, IoError> {
    check_header(&file.kind, file.version, "allocation")?;
    Allocation::new(file.assignment.clone()).map_err(|e| IoError::invalid("assignment", e))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileFile {
    pub kind: String,
    pub version: u32,
    pub strategies: Vec<u32>,
}

pub fn profile_to_file(profile: &StrategyProfile) -> ProfileFile {
    ProfileFile {
        kind: "profile".into(),
        version: FORMAT_VERSION,
        strategies: profile.strategies().to_vec(),
    }
}

pub fn profile_from_file(file: &ProfileFile) -> Result<StrategyProfile, IoError> {
    check_header(&file.kind, file.version, "profile")?;
    Ok(StrategyProfile::from_vec(file.strategies.clone()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutFile {
    pub kind: String,
    pub version: u32,
    pub assignment: Vec<u8>,
}

pub fn cut_to_file(cut: &CutAssignment) -> CutFile {
    CutFile {
        kind: "cut".into(),
        version: FORMAT_VERSION,
        assignment: cut.sides().to_vec(),
    }
}

pub fn cut_from_file(file: &CutFile) -> Result<CutAssignment, IoError> {
    check_header(&file.kind, file.version, "cut")?;
    CutAssignment::new(file.assignment.clone()).map_err(|e| IoError::invalid("assignment", e))
}

/// Sidecar emitted next to a reduced market so solutions can be mapped back.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReductionMapFile {
    pub kind: String,
    pub version: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub game: Option<GameReductionMap>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub maxcut: Option<MaxCutReductionMap>,
}

pub fn game_map_to_file(map: &GameReductionMap) -> ReductionMapFile {
    ReductionMapFile {
        kind: "reduction-map".into(),
        version: FORMAT_VERSION,
        game: Some(map.clone()),
        maxcut: None,
    }
}

pub fn maxcut_map_to_file(map: &MaxCutReductionMap) -> ReductionMapFile {
    ReductionMapFile {
        kind: "reduction-map".into(),
        version: FORMAT_VERSION,
        game: None,
        maxcut: Some(map.clone()),
    }
}

pub fn map_from_file(file: &ReductionMapFile) -> Result<(), IoError> {
    check_header(&file.kind, file.version, "reduction-map")?;
    if file.game.is_none() == file.maxcut.is_none() {
        return Err(IoError::invalid(
            "reduction-map",
            "exactly one of `game` and `maxcut` must be present",
        ));
    }
    Ok(())
}

pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn load_market(path: &Path) -> Result<MarketInstance, IoError> {
    market_from_file(&load_json(path)?)
}

pub fn save_market(path: &Path, inst: &MarketInstance) -> Result<(), IoError> {
    save_json(path, &market_to_file(inst))
}

pub fn load_game(path: &Path) -> Result<CoordinationGame, IoError> {
    game_from_file(&load_json(path)?)
}

pub fn save_game(path: &Path, game: &CoordinationGame) -> Result<(), IoError> {
    save_json(path, &game_to_file(game))
}

pub fn load_maxcut(path: &Path) -> Result<MaxCutInstance, IoError> {
    maxcut_from_file(&load_json(path)?)
}

pub fn save_maxcut(path: &Path, inst: &MaxCutInstance) -> Result<(), IoError> {
    save_json(path, &maxcut_to_file(inst))
}

pub fn load_allocation(path: &Path) -> Result<Allocation, IoError> {
    allocation_from_file(&load_json(path)?)
}

pub fn save_allocation(path: &Path, alloc: &Allocation) -> Result<(), IoError> {
    save_json(path, &allocation_to_file(alloc))
}

pub fn load_profile(path: &Path) -> Result<StrategyProfile, IoError> {
    profile_from_file(&load_json(path)?)
}

pub fn save_profile(path: &Path, profile: &StrategyProfile) -> Result<(), IoError> {
    save_json(path, &profile_to_file(profile))
}

pub fn load_cut(path: &Path) -> Result<CutAssignment, IoError> {
    cut_from_file(&load_json(path)?)
}

pub fn save_cut(path: &Path, cut: &CutAssignment) -> Result<(), IoError> {
    save_json(path, &cut_to_file(cut))
}

pub fn load_reduction_map(path: &Path) -> Result<ReductionMapFile, IoError> {
    let file: ReductionMapFile = load_json(path)?;
    map_from_file(&file)?;
    Ok(file)
}
