//! Game JSON format:
//! `{"players": n, "strategies": [[labels…]…], "payoffs": [[values…]…]}` with
//! each payoff array flat and row-major over profiles, player 1 most
//! significant.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{GameError, Result};
use crate::game::{FiniteGame, StrategyGrid};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameFile {
    players: usize,
    strategies: Vec<Vec<f64>>,
    payoffs: Vec<Vec<f64>>,
}

fn parse_error(e: serde_json::Error) -> GameError {
    GameError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

pub fn game_from_json(text: &str) -> Result<FiniteGame> {
    let file: GameFile = serde_json::from_str(text).map_err(parse_error)?;
    if file.players != file.strategies.len() {
        return Err(GameError::InvalidGame(format!(
            "\"players\" is {} but {} strategy lists were given",
            file.players,
            file.strategies.len()
        )));
    }
    let grids = file
        .strategies
        .into_iter()
        .map(StrategyGrid::new)
        .collect::<Result<Vec<_>>>()?;
    FiniteGame::new(grids, file.payoffs)
}

pub fn game_to_json(game: &FiniteGame) -> String {
    let file = GameFile {
        players: game.n(),
        strategies: game.grids().iter().map(|g| g.points().to_vec()).collect(),
        payoffs: game.payoff_tensors().to_vec(),
    };
    serde_json::to_string(&file).expect("finite values always serialize")
}

pub fn read_game_file(path: &Path) -> Result<FiniteGame> {
    let text = fs::read_to_string(path).map_err(|e| GameError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    game_from_json(&text)
}

pub fn write_text_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| GameError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}
