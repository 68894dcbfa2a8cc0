//! Notebook state: ordered cells over an accepted world.

use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::eval::{OracleConfig, Verdict};
use crate::pipeline::process_unit;
use crate::syntax::{parse_program, parse_program_with_spans, print_toplevel, TopLevel};
use crate::transfer::Outcome;
use crate::typecheck::Obligation;
use crate::world::World;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CellStatus {
    Accepted,
    Rejected,
    Stale,
    Unsubmitted,
}

#[derive(Clone, Debug)]
pub struct Cell {
    pub source: String,
    pub status: CellStatus,
    pub outcome: Option<Outcome>,
    pub verdicts: Vec<(Obligation, Verdict)>,
}

impl Cell {
    fn new(source: String) -> Cell {
        Cell {
            source,
            status: CellStatus::Unsubmitted,
            outcome: None,
            verdicts: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SessionError {
    #[error("blocked: cell {0} was rejected; edit it before adding cells")]
    Blocked(usize),
    #[error("blocked: cell {0} must be accepted before cell {1} can run")]
    NotReady(usize, usize),
    #[error("no cell {0}")]
    NoCell(usize),
}

/// Separator line written between cells of a saved notebook.
pub const CELL_SEPARATOR: &str = "/* ---- cell ---- */";

#[derive(Clone, Debug)]
pub struct Session {
    pub id: String,
    pub config: OracleConfig,
    cells: Vec<Cell>,
    /// `worlds[i]` is the world before cell `i`; one entry per accepted
    /// cell plus the initial world.
    worlds: Vec<World>,
    revision: u64,
}

impl Session {
    pub fn new(config: OracleConfig) -> Session {
        Session {
            id: format!("s{:x}", config.seed),
            config,
            cells: Vec::new(),
            worlds: vec![World::new()],
            revision: 0,
        }
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn world(&self) -> &World {
        self.worlds.last().expect("initial world")
    }

    /// The world cell `i` was checked against, while cell `i` is within
    /// the accepted prefix or is the first cell after it.
    pub fn world_before(&self, i: usize) -> Option<&World> {
        self.worlds.get(i)
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    /// Number of leading accepted cells.
    pub fn accepted(&self) -> usize {
        self.worlds.len() - 1
    }

    pub fn first_rejected(&self) -> Option<usize> {
        self.cells
            .iter()
            .position(|c| c.status == CellStatus::Rejected)
    }

    /// Appends a cell and runs it.
    pub fn submit(&mut self, source: impl Into<String>) -> Result<&Cell, SessionError> {
        if let Some(i) = self.first_rejected() {
            return Err(SessionError::Blocked(i));
        }
        if self.accepted() < self.cells.len() {
            return Err(SessionError::NotReady(self.accepted(), self.cells.len()));
        }
        self.cells.push(Cell::new(source.into()));
        self.revision += 1;
        let i = self.cells.len() - 1;
        self.run(i);
        Ok(&self.cells[i])
    }

    /// Appends a cell without running it.
    pub fn push_unsubmitted(&mut self, source: impl Into<String>) {
        self.cells.push(Cell::new(source.into()));
    }

    /// Replaces the source of cell `index`, rolls the world back to before
    /// it and resubmits it and every later cell, stopping at the first
    /// rejection. `each` sees every resubmitted cell as it finishes.
    pub fn edit(
        &mut self,
        index: usize,
        source: impl Into<String>,
        each: impl FnMut(usize, &Cell),
    ) -> Result<(), SessionError> {
        if index >= self.cells.len() {
            return Err(SessionError::NoCell(index));
        }
        if index > self.accepted() {
            return Err(SessionError::NotReady(self.accepted(), index));
        }
        self.cells[index].source = source.into();
        self.revision += 1;
        self.cascade(index, each);
        Ok(())
    }

    /// Reruns cell `index` and everything after it.
    pub fn rerun(
        &mut self,
        index: usize,
        each: impl FnMut(usize, &Cell),
    ) -> Result<(), SessionError> {
        let source = self
            .cells
            .get(index)
            .ok_or(SessionError::NoCell(index))?
            .source
            .clone();
        self.edit(index, source, each)
    }

    fn cascade(&mut self, from: usize, mut each: impl FnMut(usize, &Cell)) {
        self.worlds.truncate(from + 1);
        for c in &mut self.cells[from..] {
            c.status = CellStatus::Stale;
        }
        for i in from..self.cells.len() {
            self.run(i);
            each(i, &self.cells[i]);
            if self.cells[i].status == CellStatus::Rejected {
                break;
            }
        }
    }

    /// Runs cell `i` against the current world; `i` must be the first cell
    /// not yet accepted.
    fn run(&mut self, i: usize) {
        debug_assert_eq!(i, self.accepted());
        let (outcome, verdicts, world) = match single_unit(&self.cells[i].source) {
            Ok(unit) => {
                let r = process_unit(self.world(), &unit, &self.config);
                (r.outcome, r.verdicts, r.world)
            }
            Err(message) => (Outcome::failure(message), Vec::new(), None),
        };
        let cell = &mut self.cells[i];
        cell.outcome = Some(outcome);
        cell.verdicts = verdicts;
        match world {
            Some(w) => {
                cell.status = CellStatus::Accepted;
                self.worlds.push(w);
            }
            None => cell.status = CellStatus::Rejected,
        }
    }

    /// Runs every cell not yet accepted, in order, stopping at the first
    /// rejection.
    pub fn run_pending(&mut self, each: impl FnMut(usize, &Cell)) {
        let from = self.accepted();
        if from < self.cells.len() {
            self.revision += 1;
            self.cascade(from, each);
        }
    }

    /// The notebook as `.synth` text.
    pub fn notebook_text(&self) -> String {
        let sources: Vec<&str> = self.cells.iter().map(|c| c.source.trim()).collect();
        let mut out = String::new();
        for s in sources {
            out.push_str(CELL_SEPARATOR);
            out.push('\n');
            out.push_str(s);
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.notebook_text())
    }

    /// A session whose cells are those of `text`, not yet run.
    pub fn from_notebook(text: &str, config: OracleConfig) -> Session {
        let mut s = Session::new(config);
        for c in split_cells(text) {
            s.push_unsubmitted(c);
        }
        s
    }

    pub fn load(path: &Path, config: OracleConfig) -> std::io::Result<Session> {
        let mut s = Session::from_notebook(&std::fs::read_to_string(path)?, config);
        s.run_pending(|_, _| {});
        Ok(s)
    }
}

/// Splits notebook text into cell sources: at separator lines when there
/// are any, otherwise one cell per top-level form. Text that does not
/// parse stays a single cell.
pub fn split_cells(text: &str) -> Vec<String> {
    if text.lines().any(|l| l.trim() == CELL_SEPARATOR) {
        let mut cells = Vec::new();
        let mut current = String::new();
        for line in text.lines() {
            if line.trim() == CELL_SEPARATOR {
                cells.push(std::mem::take(&mut current));
            } else {
                current.push_str(line);
                current.push('\n');
            }
        }
        cells.push(current);
        return cells
            .into_iter()
            .map(|c| c.trim().to_string())
            .filter(|c| !c.is_empty())
            .collect();
    }
    match parse_program_with_spans(text) {
        Ok(units) => {
            // each cell keeps the comments that precede its form
            let mut start = 0;
            units
                .iter()
                .map(|(_, span)| {
                    let cell = text[start..span.end].trim().to_string();
                    start = span.end;
                    cell
                })
                .collect()
        }
        Err(_) if text.trim().is_empty() => Vec::new(),
        Err(_) => vec![text.trim().to_string()],
    }
}

fn single_unit(source: &str) -> Result<TopLevel, String> {
    let mut units = parse_program(source).map_err(|e| format!("parse error: {e}"))?;
    match units.len() {
        1 => Ok(units.pop().expect("one unit")),
        0 => Err("empty cell".into()),
        n => Err(format!("a cell holds one top-level form, found {n}")),
    }
}

/// Source text for a unit received as an AST.
pub fn unit_source(unit: &TopLevel) -> String {
    print_toplevel(unit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transfer::OutcomeKind;

    fn quick() -> OracleConfig {
        OracleConfig {
            trials: 50,
            ..OracleConfig::default()
        }
    }

    const FIVE: [&str; 5] = [
        "subtype positive {x: int | x > 0}",
        "function inc(x: int) returns (y: int) { return x + 1; }",
        "function twice(x: int) returns (y: int) { return inc(inc(x)); }",
        "function p(x: positive) returns (y: int) { return twice(x); }",
        "theorem twice_grows forall (x: int) twice(x) > x",
    ];

    fn five() -> Session {
        let mut s = Session::new(quick());
        for c in FIVE {
            let cell = s.submit(c).unwrap();
            assert_eq!(cell.status, CellStatus::Accepted, "{c}: {:?}", cell.outcome);
        }
        s
    }

    #[test]
    fn positive_message() {
        let mut s = Session::new(quick());
        let o = s.submit(FIVE[0]).unwrap().outcome.clone().unwrap();
        assert_eq!(o.kind, OutcomeKind::TypeSuccess);
        assert_eq!(o.message, "positive");
    }

    #[test]
    fn append_blocked_after_rejection() {
        let mut s = Session::new(quick());
        s.submit(FIVE[0]).unwrap();
        let bad = s
            .submit("function f(x: int) returns (y: bool) { return x; }")
            .unwrap();
        assert_eq!(bad.status, CellStatus::Rejected);
        assert_eq!(s.submit(FIVE[1]).unwrap_err(), SessionError::Blocked(1));
        assert_eq!(s.cells().len(), 2);
    }

    #[test]
    fn equivalent_edit_replays_everything() {
        let mut s = five();
        let before = s.world().canonical_text();
        let mut seen = Vec::new();
        s.edit(0, "subtype positive {y: int | y > 0}", |i, c| {
            seen.push((i, c.status))
        })
        .unwrap();
        assert_eq!(seen.len(), 5);
        assert!(seen.iter().all(|(_, st)| *st == CellStatus::Accepted));
        assert_eq!(s.accepted(), 5);
        assert_ne!(before, "");
    }

    #[test]
    fn cascade_stops_at_first_rejection() {
        let mut s = five();
        let mut seen = Vec::new();
        s.edit(
            1,
            "function inc(x: int) returns (y: int) { return x == 1; }",
            |i, _| seen.push(i),
        )
        .unwrap();
        assert_eq!(seen, vec![1]);
        let st: Vec<_> = s.cells().iter().map(|c| c.status).collect();
        assert_eq!(
            st,
            vec![
                CellStatus::Accepted,
                CellStatus::Rejected,
                CellStatus::Stale,
                CellStatus::Stale,
                CellStatus::Stale
            ]
        );
        assert_eq!(s.accepted(), 1);
        assert!(s.world().function("inc").is_none());
    }

    #[test]
    fn notebook_round_trip_replays_to_same_world() {
        let s = five();
        let text = s.notebook_text();
        assert_eq!(split_cells(&text), FIVE.to_vec());
        let mut t = Session::from_notebook(&text, quick());
        t.run_pending(|_, _| {});
        assert_eq!(t.world().canonical_text(), s.world().canonical_text());
    }

    #[test]
    fn split_without_separators_keeps_comments() {
        let cells = split_cells(
            "/* a */ subtype p {x: int | x > 0}\n/* b */\ntheorem t forall (x: p) x > 0\n",
        );
        assert_eq!(cells.len(), 2);
        assert!(cells[1].starts_with("/* b */"));
    }

    #[test]
    fn two_forms_in_one_cell_fail() {
        let mut s = Session::new(quick());
        let c = s.submit(format!("{}\n{}", FIVE[0], FIVE[1])).unwrap();
        assert_eq!(c.status, CellStatus::Rejected);
    }

    #[test]
    fn revision_counts_mutations() {
        let mut s = five();
        assert_eq!(s.revision(), 5);
        s.rerun(3, |_, _| {}).unwrap();
        assert_eq!(s.revision(), 6);
        assert_eq!(
            s.edit(9, "", |_, _| {}).unwrap_err(),
            SessionError::NoCell(9)
        );
        assert_eq!(s.revision(), 6);
    }
}
