//! Temporal alignment of utterances with arm pushes.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prosody::Utterance;

/// Default maximum gap, in seconds, between an utterance and a related push.
pub const MAX_GAP: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemporalRelation {
    NoPush,
    BeforePush,
    OverlapBefore,
    OverlapBeforeAndAfter,
    AfterPush,
    OverlapAfter,
    BetweenPushes,
    DuringSeveralPushes,
    DuringPush,
}

impl TemporalRelation {
    pub const ALL: [TemporalRelation; 9] = [
        TemporalRelation::NoPush,
        TemporalRelation::BeforePush,
        TemporalRelation::OverlapBefore,
        TemporalRelation::OverlapBeforeAndAfter,
        TemporalRelation::AfterPush,
        TemporalRelation::OverlapAfter,
        TemporalRelation::BetweenPushes,
        TemporalRelation::DuringSeveralPushes,
        TemporalRelation::DuringPush,
    ];

    /// Most specific first.
    pub const PRIORITY: [TemporalRelation; 9] = [
        TemporalRelation::DuringSeveralPushes,
        TemporalRelation::DuringPush,
        TemporalRelation::OverlapBeforeAndAfter,
        TemporalRelation::OverlapBefore,
        TemporalRelation::OverlapAfter,
        TemporalRelation::BetweenPushes,
        TemporalRelation::BeforePush,
        TemporalRelation::AfterPush,
        TemporalRelation::NoPush,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TemporalRelation::NoPush => "no_push",
            TemporalRelation::BeforePush => "before_push",
            TemporalRelation::OverlapBefore => "overlap_before",
            TemporalRelation::OverlapBeforeAndAfter => "overlap_before_and_after",
            TemporalRelation::AfterPush => "after_push",
            TemporalRelation::OverlapAfter => "overlap_after",
            TemporalRelation::BetweenPushes => "between_pushes",
            TemporalRelation::DuringSeveralPushes => "during_several_pushes",
            TemporalRelation::DuringPush => "during_push",
        }
    }

    pub fn from_name(s: &str) -> Option<TemporalRelation> {
        TemporalRelation::ALL.into_iter().find(|r| r.name() == s)
    }
}

impl fmt::Display for TemporalRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(rename = "t_start")]
    pub start: f64,
    #[serde(rename = "t_end")]
    pub end: f64,
}

impl Interval {
    pub fn new(start: f64, end: f64) -> Result<Interval> {
        if start < end {
            Ok(Interval { start, end })
        } else {
            Err(Error::InvalidInterval(start, end))
        }
    }
}

/// Classifies how an utterance interval aligns with a set of disjoint pushes.
pub fn classify_relation(u: Interval, pushes: &[Interval], max_gap: f64) -> Result<TemporalRelation> {
    let mut ps = pushes.to_vec();
    ps.sort_by(|a, b| a.start.total_cmp(&b.start));
    for w in ps.windows(2) {
        if w[0].end > w[1].start {
            return Err(Error::OverlappingPushes(w[0].start, w[0].end, w[1].start, w[1].end));
        }
    }

    let mut during = false;
    let mut inside = false;
    let mut overlap_before = false;
    let mut overlap_after = false;
    let mut before = false;
    let mut after = false;
    let mut seen_overlap_after = false;
    let mut seen_after = false;
    let mut several = false;
    let mut between = false;
    for p in &ps {
        let ob = u.start < p.start && p.start < u.end && u.end <= p.end;
        let oa = p.start <= u.start && u.start < p.end && p.end < u.end;
        let bp = p.start - u.end > 0.0 && p.start - u.end <= max_gap;
        let ap = u.start - p.end > 0.0 && u.start - p.end <= max_gap;
        during |= p.start <= u.start && u.end <= p.end;
        inside |= u.start < p.start && p.end < u.end;
        several |= ob && seen_overlap_after;
        between |= bp && seen_after;
        overlap_before |= ob;
        overlap_after |= oa;
        before |= bp;
        after |= ap;
        seen_overlap_after |= oa;
        seen_after |= ap;
    }
    let holds = [
        (several, TemporalRelation::DuringSeveralPushes),
        (during, TemporalRelation::DuringPush),
        (inside, TemporalRelation::OverlapBeforeAndAfter),
        (overlap_before, TemporalRelation::OverlapBefore),
        (overlap_after, TemporalRelation::OverlapAfter),
        (between, TemporalRelation::BetweenPushes),
        (before, TemporalRelation::BeforePush),
        (after, TemporalRelation::AfterPush),
    ];
    Ok(holds
        .into_iter()
        .find(|(h, _)| *h)
        .map_or(TemporalRelation::NoPush, |(_, r)| r))
}

pub type RelationCounts = BTreeMap<TemporalRelation, usize>;

pub fn empty_counts() -> RelationCounts {
    TemporalRelation::ALL.into_iter().map(|r| (r, 0)).collect()
}

/// Tabulates the relation of every prohibition or disallowance utterance.
pub fn relation_counts(transcript: &[Utterance], pushes: &[Interval]) -> Result<RelationCounts> {
    let mut counts = empty_counts();
    for u in transcript {
        if u.neg_type.and_then(|t| t.human()).is_some_and(|h| h.is_prohibition_plus()) {
            let r = classify_relation(Interval::new(u.t_start, u.t_end)?, pushes, MAX_GAP)?;
            *counts.entry(r).or_default() += 1;
        }
    }
    Ok(counts)
}
