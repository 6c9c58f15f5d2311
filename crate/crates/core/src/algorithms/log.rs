//! Transition log: one record per line,
//!
//! ```text
//! <board>,<action>,<reward>,<terminal>,<next board>,<next action>,<discount>
//! ```
//!
//! Boards use the engine's text format with line breaks written as `|`.
//! The first four fields are the core record; the trailing three make the
//! transition replayable on its own. `next action` is `-` when absent.

use std::fmt::Write as _;

use crate::action::ActionMask;
use crate::error::{Error, Result};
use crate::hex::Board;

use super::Transition;

fn board_field(b: &Board) -> String {
    b.to_string().replace('\n', "|")
}

fn parse_board(s: &str) -> Result<Board> {
    s.replace('|', "\n").parse()
}

pub fn write_transition_log(ts: &[Transition<Board, f64>]) -> String {
    let mut out = String::new();
    for t in ts {
        let next = t.a_next.map_or("-".to_string(), |a| a.to_string());
        writeln!(
            out,
            "{},{},{:?},{},{},{next},{:?}",
            board_field(&t.s),
            t.a,
            t.r,
            t.terminal as u8,
            board_field(&t.s_next),
            t.discount
        )
        .unwrap();
    }
    out
}

pub fn parse_transition_log(text: &str) -> Result<Vec<Transition<Board, f64>>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, line)| {
            let bad = |what: &str| Error::format(format!("line {}: {what}", n + 1));
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 7 {
                return Err(bad("expected 7 comma-separated fields"));
            }
            let s = parse_board(f[0])?;
            let s_next = parse_board(f[4])?;
            let a: usize = f[1].parse().map_err(|_| bad("bad action"))?;
            let r: f64 = f[2].parse().map_err(|_| bad("bad reward"))?;
            let terminal = match f[3] {
                "0" => false,
                "1" => true,
                _ => return Err(bad("terminal flag must be 0 or 1")),
            };
            let a_next = match f[5] {
                "-" => None,
                v => Some(v.parse().map_err(|_| bad("bad next action"))?),
            };
            let discount: f64 = f[6].parse().map_err(|_| bad("bad discount"))?;
            let legal_next = if terminal { ActionMask::EMPTY } else { s_next.legal_mask() };
            Ok(Transition {
                s,
                a,
                r,
                s_next,
                legal_next,
                a_next,
                terminal,
                discount,
            })
        })
        .collect()
}
