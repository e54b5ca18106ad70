use negacq_core::analysis::{
    corpus, motivation_cooccurrence, proxy_felicity, relation_counts, utterance_metrics, TemporalRelation, MAX_GAP,
};
use negacq_core::io::{find_session_dirs, load_lexicon, load_session, lexicon_file_name, save_experiment};
use negacq_core::teacher::{negation_lexicon, ProhibitionResponseDist};
use negacq_core::{run_experiment, ExperimentOptions, HumanNegType, MatchFeatureSpec, MotivationConfig, Scenario, TeacherProfile};

fn short(sessions: u8) -> ExperimentOptions {
    ExperimentOptions {
        sessions,
        duration: 120.0,
        ..ExperimentOptions::default()
    }
}

#[test]
fn forced_relation_concentrates_counts() {
    for rel in TemporalRelation::ALL {
        let mut p = TeacherProfile::prohibition();
        p.prohibition_response = ProhibitionResponseDist::only(rel);
        let e = run_experiment(&p, 3, &short(2)).unwrap();
        let mut total = 0;
        let mut hit = 0;
        for s in &e.sessions {
            // pushes planned after the session end never happen
            let settled: Vec<_> = s.transcript.iter().filter(|u| u.t_end + MAX_GAP < s.config.duration).cloned().collect();
            let c = relation_counts(&settled, &s.pushes).unwrap();
            total += c.values().sum::<usize>();
            hit += c[&rel];
        }
        assert!(total > 0, "{rel}: no prohibitive utterances");
        assert!(hit as f64 >= total as f64, "{rel}: {hit} of {total}");
    }
}

#[test]
fn saved_logs_feed_every_analysis() {
    let opts = short(5);
    let e = run_experiment(&TeacherProfile::prohibition(), 4, &opts).unwrap();
    let dir = tempfile::tempdir().unwrap();
    save_experiment(&e, dir.path(), &opts.robot.languaging).unwrap();
    let dirs = find_session_dirs(dir.path()).unwrap();
    assert_eq!(dirs.len(), 5);
    let neg = negation_lexicon();
    let mcfg = MotivationConfig::default();
    let mut prohibition_sessions = 0;
    for d in &dirs {
        let log = load_session(d).unwrap();
        let m = utterance_metrics(log.teacher_utterances(), log.config.duration, &neg);
        assert!(m.u > 0 && m.nu <= m.u);
        assert!(!corpus(&log.transcript, true, &neg).is_empty());
        let c = relation_counts(&log.transcript, &log.pushes).unwrap();
        if log.config.scenario == Scenario::Prohibition {
            prohibition_sessions += 1;
            assert!(c.values().sum::<usize>() > 0);
        } else {
            assert_eq!(c.values().sum::<usize>(), 0);
        }
        let types = [HumanNegType::NII, HumanNegType::Prohibition].into_iter().collect();
        motivation_cooccurrence(&log.transcript, &log.body_memory, &types, &mcfg);
        if log.config.session_index > 1 {
            assert!(proxy_felicity(&log.speech, &log.body_memory, &neg, &mcfg).is_ok());
        }
    }
    assert_eq!(prohibition_sessions, 3);
    let lex = load_lexicon(&dir.path().join(lexicon_file_name(5)), &e.participant, &MatchFeatureSpec::default()).unwrap();
    assert_eq!(&lex, e.lexicons.last().unwrap());
    assert!(lex.words().contains("no"));
}

#[test]
fn lexicon_grows_monotonically() {
    let e = run_experiment(&TeacherProfile::rejection(), 9, &short(4)).unwrap();
    let sizes: Vec<u64> = e
        .lexicons
        .iter()
        .map(|l| l.entries.iter().map(|g| u64::from(g.weight)).sum())
        .collect();
    assert!(sizes.windows(2).all(|w| w[0] < w[1]), "{sizes:?}");
    assert!(e.sessions[0].speech.is_empty());
    assert!(e.sessions.iter().skip(1).any(|s| !s.speech.is_empty()));
}
