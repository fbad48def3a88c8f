//! Retained posterior draws and their on-disk format.
//!
//! Binary layout, all integers and floats little-endian:
//!
//! ```text
//! offset  size  field
//! 0       8     magic  b"ARMDRAW1"
//! 8       4     n_players (u32)
//! 12      8     n_draws   (u64)
//! 20      ...   n_draws rows of (2 * n_players + 2) f64:
//!               mu_1 .. mu_N, sigma2_1 .. sigma2_N, mu0, tau2
//! ```
//!
//! Player identifiers are stored in a companion index CSV with header
//! `player_id,column`, where `column` is the player's `mu` column (its
//! `sigma2` column is `n_players + column`).

use std::io::{Read, Write};

use crate::model::ModelState;
use crate::table::read_rows;
use crate::{Error, Result};

pub const MAGIC: &[u8; 8] = b"ARMDRAW1";
pub const INDEX_HEADER: &[&str] = &["player_id", "column"];

#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorDraws {
    player_ids: Vec<String>,
    n_draws: usize,
    mu: Vec<f64>,
    sigma2: Vec<f64>,
    mu0: Vec<f64>,
    tau2: Vec<f64>,
}

impl PosteriorDraws {
    pub fn with_capacity(player_ids: Vec<String>, draws: usize) -> Self {
        let n = player_ids.len();
        PosteriorDraws {
            player_ids,
            n_draws: 0,
            mu: Vec::with_capacity(n * draws),
            sigma2: Vec::with_capacity(n * draws),
            mu0: Vec::with_capacity(draws),
            tau2: Vec::with_capacity(draws),
        }
    }

    pub fn push(&mut self, state: &ModelState) {
        assert_eq!(state.mu.len(), self.player_ids.len());
        self.mu.extend_from_slice(&state.mu);
        self.sigma2.extend_from_slice(&state.sigma2);
        self.mu0.push(state.mu0);
        self.tau2.push(state.tau2);
        self.n_draws += 1;
    }

    /// Builds draws from `mu` columns only; `sigma2`, `mu0` and `tau2` are
    /// filled with NaN.
    pub fn from_mu_columns(player_ids: Vec<String>, columns: &[Vec<f64>]) -> Result<Self> {
        if columns.len() != player_ids.len() {
            return Err(Error::Draws("one column per player required".into()));
        }
        let n_draws = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != n_draws) {
            return Err(Error::Draws("columns must have equal length".into()));
        }
        let n = player_ids.len();
        let mut mu = Vec::with_capacity(n * n_draws);
        for k in 0..n_draws {
            mu.extend(columns.iter().map(|c| c[k]));
        }
        Ok(PosteriorDraws {
            player_ids,
            n_draws,
            sigma2: vec![f64::NAN; mu.len()],
            mu,
            mu0: vec![f64::NAN; n_draws],
            tau2: vec![f64::NAN; n_draws],
        })
    }

    pub fn player_ids(&self) -> &[String] {
        &self.player_ids
    }

    pub fn n_players(&self) -> usize {
        self.player_ids.len()
    }

    pub fn n_draws(&self) -> usize {
        self.n_draws
    }

    pub fn index_of(&self, player_id: &str) -> Option<usize> {
        self.player_ids.iter().position(|p| p == player_id)
    }

    pub fn mu(&self, player: usize) -> Vec<f64> {
        self.mu.iter().skip(player).step_by(self.n_players()).copied().collect()
    }

    pub fn sigma2(&self, player: usize) -> Vec<f64> {
        self.sigma2.iter().skip(player).step_by(self.n_players()).copied().collect()
    }

    /// All `sigma2` draws, row-major.
    pub fn sigma2_all(&self) -> &[f64] {
        &self.sigma2
    }

    pub fn mu0(&self) -> &[f64] {
        &self.mu0
    }

    pub fn tau2(&self) -> &[f64] {
        &self.tau2
    }

    pub fn write_binary<W: Write>(&self, mut out: W) -> Result<()> {
        let n = self.n_players();
        out.write_all(MAGIC)?;
        out.write_all(&(n as u32).to_le_bytes())?;
        out.write_all(&(self.n_draws as u64).to_le_bytes())?;
        let mut row = Vec::with_capacity((2 * n + 2) * 8);
        for k in 0..self.n_draws {
            row.clear();
            let cols = self.mu[k * n..(k + 1) * n]
                .iter()
                .chain(&self.sigma2[k * n..(k + 1) * n])
                .chain([&self.mu0[k], &self.tau2[k]]);
            for v in cols {
                row.extend_from_slice(&v.to_le_bytes());
            }
            out.write_all(&row)?;
        }
        Ok(())
    }

    /// Reads the binary body; `player_ids` come from the index file.
    pub fn read_binary<R: Read>(mut source: R, player_ids: Vec<String>) -> Result<Self> {
        let mut magic = [0u8; 8];
        source
            .read_exact(&mut magic)
            .map_err(|_| Error::Draws("truncated header".into()))?;
        if &magic != MAGIC {
            return Err(Error::Draws("bad magic".into()));
        }
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        source
            .read_exact(&mut b4)
            .and_then(|_| source.read_exact(&mut b8))
            .map_err(|_| Error::Draws("truncated header".into()))?;
        let n = u32::from_le_bytes(b4) as usize;
        let n_draws = u64::from_le_bytes(b8) as usize;
        if n != player_ids.len() {
            return Err(Error::Draws(format!(
                "file has {n} players but the index lists {}",
                player_ids.len()
            )));
        }
        let mut out = PosteriorDraws::with_capacity(player_ids, n_draws);
        let mut state = crate::model::ModelState {
            mu: vec![0.0; n],
            sigma2: vec![0.0; n],
            mu0: 0.0,
            tau2: 0.0,
        };
        let mut row = vec![0u8; (2 * n + 2) * 8];
        for k in 0..n_draws {
            source
                .read_exact(&mut row)
                .map_err(|_| Error::Draws(format!("truncated at draw {k} of {n_draws}")))?;
            let mut vals = row
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()));
            for v in state.mu.iter_mut().chain(state.sigma2.iter_mut()) {
                *v = vals.next().unwrap();
            }
            state.mu0 = vals.next().unwrap();
            state.tau2 = vals.next().unwrap();
            out.push(&state);
        }
        let mut extra = [0u8; 1];
        if source.read(&mut extra)? != 0 {
            return Err(Error::Draws("trailing bytes after last draw".into()));
        }
        Ok(out)
    }

    pub fn write_index<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", INDEX_HEADER.join(","))?;
        for (i, p) in self.player_ids.iter().enumerate() {
            writeln!(out, "{p},{i}")?;
        }
        Ok(())
    }
}

/// Player identifiers ordered by column.
pub fn read_index<R: Read>(source: R) -> Result<Vec<String>> {
    let rows = read_rows(source, INDEX_HEADER)?;
    let mut ids = vec![None; rows.len()];
    for row in &rows {
        let col: usize = row.parse("column")?;
        match ids.get_mut(col) {
            Some(slot @ None) => *slot = Some(row.field("player_id").to_string()),
            Some(Some(_)) => return Err(row.error("column", format!("duplicate column {col}"))),
            None => return Err(row.error("column", format!("column {col} out of range"))),
        }
    }
    Ok(ids.into_iter().map(|p| p.expect("all columns filled")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> PosteriorDraws {
        let mut d = PosteriorDraws::with_capacity(vec!["x".into(), "y".into()], 3);
        for k in 0..3 {
            let k = k as f64;
            d.push(&ModelState {
                mu: vec![k, -k],
                sigma2: vec![1.0 + k, 2.0 + k],
                mu0: 0.1 * k,
                tau2: 3.0 + k,
            });
        }
        d
    }

    #[test]
    fn columns() {
        let d = sample();
        assert_eq!(d.mu(1), vec![0.0, -1.0, -2.0]);
        assert_eq!(d.sigma2(0), vec![1.0, 2.0, 3.0]);
        assert_eq!(d.index_of("y"), Some(1));
    }

    #[test]
    fn binary_layout_and_round_trip() {
        let d = sample();
        let mut buf = Vec::new();
        d.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 20 + 3 * 6 * 8);
        assert_eq!(&buf[..8], MAGIC);
        assert_eq!(u32::from_le_bytes(buf[8..12].try_into().unwrap()), 2);
        assert_eq!(u64::from_le_bytes(buf[12..20].try_into().unwrap()), 3);
        // second row, sigma2 of player "x"
        let off = 20 + 6 * 8 + 2 * 8;
        assert_eq!(f64::from_le_bytes(buf[off..off + 8].try_into().unwrap()), 2.0);

        let mut idx = Vec::new();
        d.write_index(&mut idx).unwrap();
        let ids = read_index(idx.as_slice()).unwrap();
        assert_eq!(PosteriorDraws::read_binary(buf.as_slice(), ids.clone()).unwrap(), d);

        assert!(PosteriorDraws::read_binary(&buf[..buf.len() - 1], ids.clone()).is_err());
        let mut extra = buf.clone();
        extra.push(0);
        assert!(PosteriorDraws::read_binary(extra.as_slice(), ids).is_err());
    }
}
