use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use negacq_core::analysis::{
    bundled_fixtures_dir, corpus, empty_counts, felicity_counts, motivation_cooccurrence, relation_counts, reproduce_report, utterance_metrics, ClassCounts,
};
use negacq_core::io::{find_session_dirs, load_lexicon, load_session, save_experiment, save_lexicon};
use negacq_core::session::between_sessions;
use negacq_core::teacher::negation_lexicon;
use negacq_core::{
    run_experiment, EmbodiedLexicon, ExperimentOptions, HumanNegType, RobotConfig, Scenario, SessionLog, TeacherProfile,
};
use negacq_service::{Server, ServiceConfig};
use serde::Deserialize;

#[derive(Parser, Debug)]
#[command(name = "negacq", version, about = "Negation acquisition simulations, analyses and live sessions")]
struct Cli {
    /// Base random seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// TOML config file with optional [teacher] and [robot] tables.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run scripted experiments and write their logs.
    Simulate {
        #[arg(long, value_enum)]
        scenario: Option<ScenarioArg>,
        /// TOML teacher profile; overrides the config's [teacher] table.
        #[arg(long)]
        profile: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        sessions: u8,
        /// Number of experiments; experiment k uses seed + k.
        #[arg(long, default_value_t = 1)]
        participants: u64,
        /// Session length in seconds.
        #[arg(long)]
        duration: Option<f64>,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Ground session logs into a lexicon, in session order.
    Ground {
        #[arg(long)]
        logs: PathBuf,
        /// Lexicon to extend; starts empty when absent.
        #[arg(long)]
        lexicon: Option<PathBuf>,
    },
    /// Tabulate session logs.
    Analyze {
        #[arg(long)]
        logs: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = Table::all())]
        tables: Vec<Table>,
        /// Count only each utterance's salient word in the corpus table.
        #[arg(long)]
        salient_only: bool,
    },
    /// Recompute the published results from the fixture tables.
    Reproduce {
        #[arg(long, env = "NEGACQ_DATA")]
        fixtures: Option<PathBuf>,
    },
    /// Run the live session server.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 8765)]
        port: u16,
        /// Starting lexicon for every participant.
        #[arg(long)]
        lexicon: Option<PathBuf>,
        /// Simulation speed relative to real time.
        #[arg(long, default_value_t = 1.0)]
        speed: f64,
        /// Sessions end by themselves after this many seconds.
        #[arg(long, default_value_t = 300.0)]
        max_duration: f64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ScenarioArg {
    Rejection,
    Prohibition,
}

impl From<ScenarioArg> for Scenario {
    fn from(s: ScenarioArg) -> Scenario {
        match s {
            ScenarioArg::Rejection => Scenario::Rejection,
            ScenarioArg::Prohibition => Scenario::Prohibition,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
enum Table {
    Relation,
    Corpus,
    Metrics,
    Cooccur,
    Felicity,
}

impl Table {
    fn all() -> Vec<Table> {
        vec![Table::Relation, Table::Corpus, Table::Metrics, Table::Cooccur, Table::Felicity]
    }

    fn name(self) -> &'static str {
        match self {
            Table::Relation => "relation",
            Table::Corpus => "corpus",
            Table::Metrics => "metrics",
            Table::Cooccur => "cooccur",
            Table::Felicity => "felicity",
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Config {
    duration: Option<f64>,
    teacher: Option<TeacherProfile>,
    robot: RobotConfig,
}

fn read_toml<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    let config: Config = match &cli.config {
        Some(p) => read_toml(p)?,
        None => Config::default(),
    };
    config.robot.validate()?;
    match cli.cmd {
        Command::Simulate {
            scenario,
            profile,
            sessions,
            participants,
            duration,
            jobs,
        } => {
            let mut teacher = match (profile, config.teacher) {
                (Some(p), _) => read_toml(&p)?,
                (None, Some(t)) => t,
                (None, None) => TeacherProfile::for_scenario(scenario.map_or(Scenario::Prohibition, Into::into)),
            };
            if let Some(s) = scenario {
                teacher.scenario = s.into();
            }
            teacher.validate()?;
            let opts = ExperimentOptions {
                sessions,
                duration: duration.or(config.duration).unwrap_or(300.0),
                robot: config.robot,
            };
            let out = cli.out.unwrap_or_else(|| PathBuf::from("runs"));
            simulate(&teacher, cli.seed, participants, jobs, &opts, &out)
        }
        Command::Ground { logs, lexicon } => {
            let out = cli.out.unwrap_or_else(|| PathBuf::from("."));
            ground(&logs, lexicon.as_deref(), &config.robot, &out)
        }
        Command::Analyze { logs, tables, salient_only } => {
            let out = cli.out.unwrap_or_else(|| PathBuf::from("analysis"));
            analyze(&logs, &tables, salient_only, &config.robot, &out)
        }
        Command::Reproduce { fixtures } => {
            let dir = fixtures.unwrap_or_else(bundled_fixtures_dir);
            let report = reproduce_report(&dir)?;
            let out = cli.out.unwrap_or_else(|| PathBuf::from("reproduce"));
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let text = report.to_text();
            fs::write(out.join("report.txt"), &text)?;
            fs::write(out.join("report.tsv"), report.to_tsv())?;
            print!("{text}");
            Ok(())
        }
        Command::Serve {
            host,
            port,
            lexicon,
            speed,
            max_duration,
        } => {
            let cfg = ServiceConfig {
                out_dir: cli.out.unwrap_or_else(|| PathBuf::from("sessions")),
                lexicon,
                robot: config.robot,
                seed: cli.seed,
                speed,
                max_duration,
            };
            if let Some(l) = &cfg.lexicon {
                if !l.is_file() {
                    bail!("lexicon {} does not exist", l.display());
                }
            }
            let server = Server::bind((host.as_str(), port), cfg)?;
            eprintln!("listening on ws://{}", server.local_addr()?);
            server.run()?;
            Ok(())
        }
    }
}

fn simulate(teacher: &TeacherProfile, seed: u64, participants: u64, jobs: usize, opts: &ExperimentOptions, out: &Path) -> Result<()> {
    if jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    if participants == 0 {
        bail!("--participants must be at least 1");
    }
    let seeds: Vec<u64> = (0..participants).map(|k| seed + k).collect();
    let chunk = seeds.len().div_ceil(jobs);
    let summaries: Vec<Result<String>> = std::thread::scope(|scope| {
        let handles: Vec<_> = seeds
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().map(|&s| simulate_one(teacher, s, opts, out)).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    });
    for s in summaries {
        print!("{}", s?);
    }
    Ok(())
}

fn simulate_one(teacher: &TeacherProfile, seed: u64, opts: &ExperimentOptions, out: &Path) -> Result<String> {
    let e = run_experiment(teacher, seed, opts)?;
    let dir = out.join(&e.participant);
    save_experiment(&e, &dir, &opts.robot.languaging)?;
    let neg = negation_lexicon();
    let mut s = String::new();
    for (log, lex) in e.sessions.iter().zip(&e.lexicons) {
        let m = utterance_metrics(log.teacher_utterances(), log.config.duration, &neg);
        writeln!(
            s,
            "{}\t{}\tu/min={:.2}\tnu/min={:.2}\tlexicon={}",
            e.participant,
            log.config.label(),
            m.u_per_min,
            m.nu_per_min,
            lex.len()
        )?;
    }
    Ok(s)
}

fn load_logs(root: &Path) -> Result<Vec<(PathBuf, SessionLog)>> {
    let dirs = find_session_dirs(root).with_context(|| format!("searching {}", root.display()))?;
    if dirs.is_empty() {
        bail!("no session logs under {}", root.display());
    }
    dirs.into_iter()
        .map(|d| {
            let log = load_session(&d).with_context(|| format!("loading {}", d.display()))?;
            Ok((d, log))
        })
        .collect()
}

fn ground(logs: &Path, lexicon: Option<&Path>, robot: &RobotConfig, out: &Path) -> Result<()> {
    let mut sessions = load_logs(logs)?;
    sessions.sort_by_key(|(_, l)| l.config.session_index);
    let participant = sessions[0].1.config.participant.clone();
    let mut lex = match lexicon {
        Some(p) => load_lexicon(p, &participant, &robot.match_spec)?,
        None => EmbodiedLexicon::new(&participant),
    };
    for (d, log) in &sessions {
        between_sessions(log, &mut lex, robot).with_context(|| format!("grounding {}", d.display()))?;
    }
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let path = out.join("lexicon.jsonl");
    save_lexicon(&lex, &path)?;
    println!("{}\t{} sessions\t{} exemplars\t{} words", path.display(), sessions.len(), lex.len(), lex.words().len());
    Ok(())
}

fn analyze(root: &Path, tables: &[Table], salient_only: bool, robot: &RobotConfig, out: &Path) -> Result<()> {
    let logs = load_logs(root)?;
    let neg = negation_lexicon();
    let label = |d: &Path| d.strip_prefix(root).unwrap_or(d).display().to_string();
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let tables: BTreeSet<Table> = tables.iter().copied().collect();
    for t in tables {
        let mut s = String::new();
        match t {
            Table::Relation => {
                let mut counts = empty_counts();
                for (d, log) in &logs {
                    let c = relation_counts(&log.transcript, &log.pushes).with_context(|| format!("relations in {}", d.display()))?;
                    for (r, n) in c {
                        *counts.entry(r).or_default() += n;
                    }
                }
                let total: usize = counts.values().sum();
                writeln!(s, "relation\tcount\tpercent")?;
                for (r, n) in counts {
                    writeln!(s, "{}\t{n}\t{}", r.name(), pct(n, total))?;
                }
            }
            Table::Corpus => {
                let entries = corpus(logs.iter().flat_map(|(_, l)| l.teacher_utterances()), salient_only, &neg);
                writeln!(s, "rank\tword\tcount\tpercent\tnegation")?;
                for e in entries {
                    writeln!(s, "{}\t{}\t{}\t{:.2}\t{}", e.rank, e.word, e.count, e.percent, e.negation)?;
                }
            }
            Table::Metrics => {
                writeln!(s, "session\tduration\tu\tnu\tu_per_min\tnu_per_min\tmlu\tnmlu")?;
                for (d, log) in &logs {
                    let m = utterance_metrics(log.teacher_utterances(), log.body_memory.len() as f64 / 30.0, &neg);
                    writeln!(
                        s,
                        "{}\t{:.2}\t{}\t{}\t{:.2}\t{:.2}\t{:.2}\t{:.2}",
                        label(d),
                        m.duration,
                        m.u,
                        m.nu,
                        m.u_per_min,
                        m.nu_per_min,
                        m.mlu,
                        m.nmlu
                    )?;
                }
            }
            Table::Cooccur => {
                let types: BTreeSet<HumanNegType> = logs
                    .iter()
                    .flat_map(|(_, l)| l.teacher_utterances().filter_map(|u| u.neg_type.and_then(|t| t.human())))
                    .collect();
                let mut total: std::collections::BTreeMap<HumanNegType, ClassCounts> = types.iter().map(|t| (*t, ClassCounts::default())).collect();
                for (_, log) in &logs {
                    for (t, c) in motivation_cooccurrence(&log.transcript, &log.body_memory, &types, &robot.motivation) {
                        let e = total.entry(t).or_default();
                        e.negative += c.negative;
                        e.neutral += c.neutral;
                        e.positive += c.positive;
                    }
                }
                writeln!(s, "type\tnegative\tneutral\tpositive\tnegative_share")?;
                for (t, c) in total {
                    let share = c.negative_share().map_or("na".to_string(), |x| format!("{:.4}", x));
                    writeln!(s, "{t:?}\t{}\t{}\t{}\t{share}", c.negative, c.neutral, c.positive)?;
                }
            }
            Table::Felicity => {
                writeln!(s, "session\tnegations\tunder_negative\tfelicity_pct")?;
                let (mut all_n, mut all_hits) = (0, 0);
                for (d, log) in &logs {
                    let (n, hits) = felicity_counts(&log.speech, &log.body_memory, &neg, &robot.motivation);
                    all_n += n;
                    all_hits += hits;
                    writeln!(s, "{}\t{n}\t{hits}\t{}", label(d), pct(hits, n))?;
                }
                writeln!(s, "all\t{all_n}\t{all_hits}\t{}", pct(all_hits, all_n))?;
            }
        }
        fs::write(out.join(format!("{}.tsv", t.name())), &s)?;
        println!("## {}\n{s}", t.name());
    }
    Ok(())
}

fn pct(n: usize, total: usize) -> String {
    if total == 0 {
        "na".into()
    } else {
        format!("{:.2}", 100.0 * n as f64 / total as f64)
    }
}
