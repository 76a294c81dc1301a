//! JSON descriptions of systems and schedules.
//!
//! System files:
//! `{"alphabet": 2}` (full shift), `{"alphabet": 2, "forbidden": [[1,1]]}`,
//! or `{"alphabet": 2, "matrix": [[1,1],[1,0]]}` — forbidden words and a
//! matrix are mutually exclusive.
//!
//! Schedule files:
//! `{"preperiod": [[0],[0,1]], "period": [[0,1],[0]], "two_sided": "free"}`
//! where `two_sided` is `"free"`, `"mirrored"`, `{"pinned_word": [..]}`,
//! or omitted (free).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::schedule::{DigitSetSchedule, ScheduleError, TwoSidedRule};
use super::shift::{ShiftError, SubshiftSpec};
use super::word::{Symbol, SymbolSet, Word};

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("JSON parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("system spec: supply at most one of \"forbidden\" and \"matrix\"")]
    AmbiguousConstraint,
    #[error("matrix entries must be 0 or 1, found {0}")]
    BadMatrixEntry(u8),
    #[error(transparent)]
    Shift(#[from] ShiftError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDto {
    pub alphabet: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forbidden: Option<Vec<Vec<Symbol>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<u8>>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleDto {
    #[serde(default)]
    pub preperiod: Vec<Vec<Symbol>>,
    pub period: Vec<Vec<Symbol>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub two_sided: Option<TwoSidedDto>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TwoSidedDto {
    Free,
    Mirrored,
    PinnedWord(Vec<Symbol>),
}

pub fn parse_system(text: &str) -> Result<SubshiftSpec, JsonError> {
    let dto: SystemDto = serde_json::from_str(text)?;
    system_from_dto(dto)
}

pub fn system_from_dto(dto: SystemDto) -> Result<SubshiftSpec, JsonError> {
    match (dto.forbidden, dto.matrix) {
        (Some(_), Some(_)) => Err(JsonError::AmbiguousConstraint),
        (Some(words), None) => Ok(SubshiftSpec::from_forbidden(
            dto.alphabet,
            words.into_iter().map(Word).collect(),
        )?),
        (None, Some(rows)) => {
            let mut matrix = Vec::with_capacity(rows.len());
            for row in rows {
                let mut out = Vec::with_capacity(row.len());
                for v in row {
                    match v {
                        0 => out.push(false),
                        1 => out.push(true),
                        bad => return Err(JsonError::BadMatrixEntry(bad)),
                    }
                }
                matrix.push(out);
            }
            Ok(SubshiftSpec::from_matrix(matrix)?)
        }
        (None, None) => Ok(SubshiftSpec::full_shift(dto.alphabet)),
    }
}

pub fn parse_schedule(text: &str) -> Result<DigitSetSchedule, JsonError> {
    let dto: ScheduleDto = serde_json::from_str(text)?;
    schedule_from_dto(dto)
}

pub fn schedule_from_dto(dto: ScheduleDto) -> Result<DigitSetSchedule, JsonError> {
    let alphabet = dto
        .preperiod
        .iter()
        .chain(dto.period.iter())
        .flat_map(|set| set.iter())
        .map(|&s| s as usize + 1)
        .max()
        .unwrap_or(1);
    let to_sets = |lists: &[Vec<Symbol>]| -> Vec<SymbolSet> {
        lists
            .iter()
            .map(|set| SymbolSet::from_symbols(set.iter().copied()))
            .collect()
    };
    let rule = match dto.two_sided {
        None | Some(TwoSidedDto::Free) => TwoSidedRule::Free,
        Some(TwoSidedDto::Mirrored) => TwoSidedRule::Mirrored,
        Some(TwoSidedDto::PinnedWord(w)) => TwoSidedRule::PinnedToWord(Word(w)),
    };
    Ok(DigitSetSchedule::new(
        alphabet,
        to_sets(&dto.preperiod),
        to_sets(&dto.period),
        rule,
    )?)
}

/// Schedule serialization, used when a lowering run emits its result.
pub fn schedule_to_dto(sched: &DigitSetSchedule) -> ScheduleDto {
    let to_lists = |sets: &[SymbolSet]| -> Vec<Vec<Symbol>> {
        sets.iter().map(|set| set.iter().collect()).collect()
    };
    ScheduleDto {
        preperiod: to_lists(sched.preperiod()),
        period: to_lists(sched.period()),
        two_sided: match sched.two_sided() {
            TwoSidedRule::Free => None,
            TwoSidedRule::Mirrored => Some(TwoSidedDto::Mirrored),
            TwoSidedRule::PinnedToWord(w) => Some(TwoSidedDto::PinnedWord(w.0.clone())),
        },
    }
}

pub fn schedule_to_json(sched: &DigitSetSchedule) -> String {
    serde_json::to_string_pretty(&schedule_to_dto(sched)).expect("schedule serializes")
}

/// A schedule re-anchored to a possibly larger alphabet (schedules parsed
/// from JSON infer the smallest alphabet; runs pair them with a system).
pub fn widen_alphabet(
    sched: &DigitSetSchedule,
    alphabet: usize,
) -> Result<DigitSetSchedule, ScheduleError> {
    DigitSetSchedule::new(
        alphabet,
        sched.preperiod().to_vec(),
        sched.period().to_vec(),
        sched.two_sided().clone(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_full_and_forbidden_and_matrix() {
        let full = parse_system(r#"{"alphabet": 3}"#).unwrap();
        assert_eq!(full.alphabet_size(), 3);
        let gm = parse_system(r#"{"alphabet": 2, "forbidden": [[1,1]]}"#).unwrap();
        assert_eq!(gm.memory(), 2);
        let mx = parse_system(r#"{"alphabet": 2, "matrix": [[1,1],[1,0]]}"#).unwrap();
        assert_eq!(mx.memory(), 2);
        assert!(parse_system(r#"{"alphabet": 2, "forbidden": [], "matrix": [[1]]}"#).is_err());
    }

    #[test]
    fn schedule_roundtrip() {
        let text = r#"{"preperiod": [[1]], "period": [[0,1],[0]], "two_sided": {"pinned_word": [0,1]}}"#;
        let sched = parse_schedule(text).unwrap();
        assert_eq!(sched.alphabet_size(), 2);
        assert_eq!(sched.preperiod_len(), 1);
        let json = schedule_to_json(&sched);
        let again = parse_schedule(&json).unwrap();
        assert_eq!(sched, again);
    }

    #[test]
    fn parse_error_carries_location() {
        let err = parse_system("{bad json").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line") || msg.contains("column"), "{msg}");
    }
}
