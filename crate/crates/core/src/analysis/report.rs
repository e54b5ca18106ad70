//! Recomputes the fixture-derivable statistics and compares them with the
//! published values.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::anova::one_way_anova;
use super::fixtures::{Fixtures, SessionKey, NEGATION_TYPES, NEGATIVE_MEASURES, TEMPORAL_RELATIONS, UTTERANCE_MEASURES, WORD_FREQUENCIES};
use super::ranked_pairs::ranked_pairs;
use super::relation::TemporalRelation;
use crate::error::{Error, Result};
use crate::teacher::HumanNegType;

/// Experiment groups in table order.
pub const GROUPS: [&str; 3] = ["saunders", "rejection", "prohibition"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub section: String,
    pub item: String,
    pub computed: Option<f64>,
    pub reported: Option<f64>,
    pub note: String,
}

impl ReportRow {
    pub fn delta(&self) -> Option<f64> {
        Some(self.computed? - self.reported?)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub rows: Vec<ReportRow>,
}

fn fmt_opt(v: Option<f64>, prec: usize) -> String {
    v.map(|x| format!("{x:.prec$}")).unwrap_or_else(|| "-".into())
}

impl Report {
    fn push(&mut self, section: &str, item: impl Into<String>, computed: Option<f64>, reported: Option<f64>, note: impl Into<String>) {
        self.rows.push(ReportRow {
            section: section.into(),
            item: item.into(),
            computed,
            reported,
            note: note.into(),
        });
    }

    pub fn get(&self, section: &str, item: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.section == section && r.item == item)
    }

    pub fn computed(&self, section: &str, item: &str) -> Option<f64> {
        self.get(section, item).and_then(|r| r.computed)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("fixture reproduction report\n");
        let mut last = "";
        for r in &self.rows {
            if r.section != last {
                let _ = write!(s, "\n[{}]\n", r.section);
                last = &r.section;
            }
            let _ = write!(
                s,
                "  {:<44} computed {:>10}  reported {:>8}  delta {:>8}",
                r.item,
                fmt_opt(r.computed, 4),
                fmt_opt(r.reported, 4),
                fmt_opt(r.delta(), 4)
            );
            if !r.note.is_empty() {
                let _ = write!(s, "  {}", r.note);
            }
            s.push('\n');
        }
        s
    }

    pub fn to_tsv(&self) -> String {
        let mut s = String::from("section\titem\tcomputed\treported\tdelta\tnote\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}\t{}",
                r.section,
                r.item,
                fmt_opt(r.computed, 6),
                fmt_opt(r.reported, 6),
                fmt_opt(r.delta(), 6),
                r.note
            );
        }
        s
    }
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn sample_sd(v: &[f64]) -> Option<f64> {
    let m = mean(v)?;
    (v.len() > 1).then(|| (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt())
}

const SESSIONS: [SessionKey; 5] = [
    SessionKey::Session(1),
    SessionKey::Session(2),
    SessionKey::Session(3),
    SessionKey::Session(4),
    SessionKey::Session(5),
];

fn rate_section(rep: &mut Report, fx: &Fixtures, table: &str, measure: &str) -> Result<()> {
    for s in SESSIONS {
        let mut groups = vec![];
        for g in GROUPS {
            let v = fx.values(table, g, s, measure);
            rep.push(measure, format!("s{s} {g} mean"), mean(&v), fx.reference(g, s, &format!("{measure}.mean")), format!("n={}", v.len()));
            rep.push(measure, format!("s{s} {g} sd"), sample_sd(&v), fx.reference(g, s, &format!("{measure}.sd")), "");
            groups.push(v);
        }
        let a = one_way_anova(&groups)?;
        let reported_f = fx.reference("comparison", s, &format!("{measure}.F"));
        let mut note = format!("F({},{})={:.2}", a.df_between, a.df_within, a.f);
        if a.df_within != 26 {
            note.push_str(&format!("; table prints F(2,26), available data give df_within={}", a.df_within));
        }
        rep.push("anova", format!("{measure} s{s} F"), Some(a.f), reported_f, note);
        rep.push(
            "anova",
            format!("{measure} s{s} p"),
            Some(a.p),
            fx.reference("comparison", s, &format!("{measure}.p")),
            format!("p={:.4}", a.p),
        );
    }
    Ok(())
}

fn negative_share(fx: &Fixtures, group: &str) -> (f64, f64) {
    (fx.total(NEGATIVE_MEASURES, group, &SESSIONS, "nu"), fx.total(UTTERANCE_MEASURES, group, &SESSIONS, "u"))
}

/// Mean over participants of the per-participant mean negative rate across sessions.
fn mean_negative_rate(fx: &Fixtures, group: &str) -> Option<f64> {
    let all: Vec<f64> = SESSIONS.iter().flat_map(|s| fx.values(NEGATIVE_MEASURES, group, *s, "nu_per_min")).collect();
    mean(&all)
}

fn share_section(rep: &mut Report, fx: &Fixtures) {
    let mut shares = BTreeMap::new();
    for g in GROUPS {
        let (nu, u) = negative_share(fx, g);
        let share = (u > 0.0).then(|| nu / u);
        shares.insert(g, share);
        let note = match share {
            Some(x) if x > 0.0 => format!("{nu}/{u}; one negative utterance in {:.2}", 1.0 / x),
            _ => format!("{nu}/{u}"),
        };
        rep.push("negative_share", format!("{g} share"), share, None, note);
    }
    for g in ["prohibition", "rejection"] {
        let reported = fx.reference(g, SessionKey::All, "negative_utterance_increase_pct");
        let ratio = match (shares[g], shares["saunders"]) {
            (Some(a), Some(b)) if b > 0.0 => Some(100.0 * a / b),
            _ => None,
        };
        rep.push(
            "negative_share",
            format!("{g} increase vs saunders (share ratio)"),
            ratio,
            reported,
            "best effort; the published computation is unspecified",
        );
        let rate = match (mean_negative_rate(fx, g), mean_negative_rate(fx, "saunders")) {
            (Some(a), Some(b)) if b > 0.0 => Some(100.0 * a / b),
            _ => None,
        };
        rep.push(
            "negative_share",
            format!("{g} increase vs saunders (rate ratio)"),
            rate,
            reported,
            "best effort; ratio of mean nu/min",
        );
    }
}

fn temporal_section(rep: &mut Report, fx: &Fixtures) {
    let mut totals: BTreeMap<TemporalRelation, f64> = TemporalRelation::ALL.iter().map(|r| (*r, 0.0)).collect();
    for r in fx.table(TEMPORAL_RELATIONS) {
        if let Some(rel) = r.measure.strip_prefix("relation:").and_then(TemporalRelation::from_name) {
            *totals.get_mut(&rel).unwrap() += r.value.unwrap_or(0.0);
        }
    }
    let grand: f64 = totals.values().sum();
    rep.push("temporal", "total", Some(grand), None, "prohibition+ utterances, sessions 1-3");
    for rel in TemporalRelation::PRIORITY.iter().rev() {
        let n = totals[rel];
        rep.push("temporal", format!("{rel} count"), Some(n), None, "");
        let reported = fx.reference("prohibition", SessionKey::All, &format!("{rel}_pct"));
        let share = (grand > 0.0).then(|| 100.0 * n / grand);
        rep.push("temporal", format!("{rel} pct"), share, reported, if reported.is_some() { "reported value rounded" } else { "" });
    }
}

/// Count-weighted salience rate of a negation type over participants.
pub fn weighted_type_salience(fx: &Fixtures, experiment: &str, t: HumanNegType) -> Option<(f64, f64)> {
    let key = t.fixture_key();
    let counts = fx.per_participant(NEGATION_TYPES, experiment, SessionKey::All, &format!("type_count:{key}"));
    let pcts: BTreeMap<String, Option<f64>> = fx
        .per_participant(NEGATION_TYPES, experiment, SessionKey::All, &format!("type_salient_pct:{key}"))
        .into_iter()
        .collect();
    let (mut hits, mut n) = (0.0, 0.0);
    for (p, c) in counts {
        if let (Some(c), Some(Some(pct))) = (c, pcts.get(&p)) {
            if c > 0.0 {
                hits += c * pct / 100.0;
                n += c;
            }
        }
    }
    (n > 0.0).then(|| (100.0 * hits / n, n))
}

fn salience_section(rep: &mut Report, fx: &Fixtures) {
    for g in ["prohibition", "rejection"] {
        for t in HumanNegType::ALL {
            if let Some((rate, n)) = weighted_type_salience(fx, g, t) {
                let reported = if g == "prohibition" {
                    fx.reference(g, SessionKey::All, &format!("salience_pct:{}", t.fixture_key()))
                } else {
                    None
                };
                rep.push("salience", format!("{g} {}", t.fixture_key()), Some(rate), reported, format!("n={n}"));
            }
        }
    }
}

fn word_rank_section(rep: &mut Report, fx: &Fixtures) {
    for g in GROUPS {
        for corpus in ["all", "salient"] {
            let get = |m: &str| fx.lookup(WORD_FREQUENCIES, g, "ALL", SessionKey::All, &format!("{corpus}.{m}:no"));
            let text_rank = if corpus == "all" {
                fx.reference(g, SessionKey::All, "text_rank:no")
            } else {
                None
            };
            let note = match (get("rank"), text_rank) {
                (Some(r), Some(t)) if r != t => format!("flag: table rank {r} differs from the rank {t} given in the text"),
                _ => String::new(),
            };
            rep.push("word_rank", format!("{g} {corpus} no rank"), get("rank"), text_rank, note);
            rep.push("word_rank", format!("{g} {corpus} no pct"), get("pct"), None, "");
        }
    }
}

/// Per-participant ballots of negation types ordered by frequency, ties by name.
pub fn type_ballots(fx: &Fixtures, experiment: &str) -> Vec<Vec<String>> {
    let mut by_participant: BTreeMap<String, Vec<(f64, String)>> = BTreeMap::new();
    for r in fx.table(NEGATION_TYPES) {
        if r.experiment != experiment {
            continue;
        }
        if let (Some(key), Some(c)) = (r.measure.strip_prefix("type_count:"), r.value) {
            if c > 0.0 && key != HumanNegType::Unknown.fixture_key() {
                by_participant.entry(r.participant.clone()).or_default().push((c, key.to_string()));
            }
        }
    }
    by_participant
        .into_values()
        .map(|mut v| {
            v.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            v.into_iter().map(|(_, k)| k).collect()
        })
        .collect()
}

fn ranking_section(rep: &mut Report, fx: &Fixtures) {
    for g in ["prohibition", "rejection"] {
        let ranking = ranked_pairs(&type_ballots(fx, g));
        for (i, tier) in ranking.iter().enumerate().take(5) {
            rep.push("ranked_pairs", format!("{g} rank {}", i + 1), Some((i + 1) as f64), None, tier.join(", "));
        }
    }
}

/// Recomputes every fixture-derivable statistic in `dir`.
pub fn reproduce_report(dir: &Path) -> Result<Report> {
    let fx = Fixtures::load(dir)?;
    reproduce_from(&fx)
}

pub fn reproduce_from(fx: &Fixtures) -> Result<Report> {
    let mut rep = Report::default();
    rate_section(&mut rep, fx, UTTERANCE_MEASURES, "u_per_min")?;
    rate_section(&mut rep, fx, NEGATIVE_MEASURES, "nu_per_min")?;
    // anova rows are interleaved per measure; group them for reading
    let (mut anova, rest): (Vec<ReportRow>, Vec<ReportRow>) = rep.rows.drain(..).partition(|r| r.section == "anova");
    rep.rows = rest;
    rep.rows.append(&mut anova);
    share_section(&mut rep, fx);
    temporal_section(&mut rep, fx);
    salience_section(&mut rep, fx);
    word_rank_section(&mut rep, fx);
    ranking_section(&mut rep, fx);
    if rep.rows.is_empty() {
        return Err(Error::Stats("empty report".into()));
    }
    Ok(rep)
}
