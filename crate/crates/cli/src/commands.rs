use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use armvalue::catcher::{self, CatcherTabulation};
use armvalue::draws::read_index;
use armvalue::event::{
    parse_catcher_opportunities, parse_outfield_opportunities, write_catcher_opportunities,
    write_outfield_opportunities,
};
use armvalue::ledger::{read_ledger, write_ledger};
use armvalue::model::run_gibbs;
use armvalue::outfield::{self, outfield_run_value, tabulate_outfield};
use armvalue::report::{self, Direction, PosteriorSummary};
use armvalue::run_matrix::{load_catcher_transitions, load_matrix, load_outfield_transitions};
use armvalue::synth::{generate_catcher_ledger, generate_model_observations, generate_outfield_ledger, random_model_truth, SimulationSpec};
use armvalue::{HyperParams, ModelData, PosteriorDraws, RunTables, RunValueLedger, SamplerConfig};
use log::info;

use crate::config::{Role, RunConfig};
use crate::{Cli, Command, EvaluateArgs, FitArgs, PipelineArgs, ReportArgs, SamplerArgs, SimulateArgs, TableArgs, TabulateArgs};

const DEFAULT_TOP: usize = 10;

struct Session {
    cfg: RunConfig,
    role: Role,
    seed: u64,
}

pub fn run(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let ctx = Session {
        role: cli.role.or(cfg.role).unwrap_or(Role::Catcher),
        seed: cli.seed.or(cfg.seed).unwrap_or(SamplerConfig::default().seed),
        cfg,
    };
    match cli.command {
        Command::Tabulate(a) => tabulate(&ctx, a),
        Command::Evaluate(a) => evaluate(&ctx, a),
        Command::Fit(a) => fit(&ctx, a),
        Command::Report(a) => report_cmd(a),
        Command::Simulate(a) => simulate(&ctx, a),
        Command::Pipeline(a) => pipeline(&ctx, a),
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .with_context(|| format!("cannot open {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .with_context(|| format!("cannot create {}", path.display()))
}

fn write_with(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> armvalue::Result<()>) -> Result<()> {
    let mut out = create(path)?;
    f(&mut out).with_context(|| format!("writing {}", path.display()))?;
    out.flush().with_context(|| format!("writing {}", path.display()))
}

fn input_path(flag: Option<PathBuf>, cfg: &RunConfig) -> Result<PathBuf> {
    flag.or_else(|| cfg.input.clone())
        .ok_or_else(|| anyhow!("no input file: pass --in or set `input` in the config"))
}

fn load_tables(ctx: &Session, args: &TableArgs) -> Result<RunTables> {
    let mut tables = RunTables::reference();
    if let Some(p) = args.matrix.as_ref().or(ctx.cfg.matrix.as_ref()) {
        tables.matrix = load_matrix(open(p)?).with_context(|| format!("reading {}", p.display()))?;
    }
    if let Some(p) = args.transitions.as_ref().or(ctx.cfg.transitions.as_ref()) {
        let ctx_msg = || format!("reading {}", p.display());
        match ctx.role {
            Role::Catcher => tables.catcher = load_catcher_transitions(open(p)?).with_context(ctx_msg)?,
            Role::Outfield => tables.outfield = load_outfield_transitions(open(p)?).with_context(ctx_msg)?,
        }
    }
    Ok(tables)
}

fn sampler_settings(ctx: &Session, args: &SamplerArgs) -> (HyperParams, SamplerConfig) {
    let d = SamplerConfig::default();
    let s = &ctx.cfg.sampler;
    let config = SamplerConfig {
        burnin: args.burnin.or(s.burnin).unwrap_or(d.burnin),
        draws: args.draws.or(s.draws).unwrap_or(d.draws),
        thin: args.thin.or(s.thin).unwrap_or(d.thin),
        seed: ctx.seed,
    };
    let h = HyperParams::default();
    let p = &ctx.cfg.prior;
    let hyper = HyperParams {
        nu: args.nu.or(p.nu).unwrap_or(h.nu),
        beta: args.beta.or(p.beta).unwrap_or(h.beta),
        gamma: args.gamma.or(p.gamma).unwrap_or(h.gamma),
    };
    (hyper, config)
}

fn read_catcher(path: &Path) -> Result<CatcherTabulation> {
    let records = parse_catcher_opportunities(open(path)?).with_context(|| format!("reading {}", path.display()))?;
    Ok(catcher::tabulate(&records))
}

fn tabulate(ctx: &Session, a: TabulateArgs) -> Result<()> {
    let input = input_path(a.input, &ctx.cfg)?;
    match ctx.role {
        Role::Catcher => {
            let tab = read_catcher(&input)?;
            write_with(&a.out, |w| catcher::write_cells(w, &tab))
        }
        Role::Outfield => {
            let records = parse_outfield_opportunities(open(&input)?)
                .with_context(|| format!("reading {}", input.display()))?;
            let tab = tabulate_outfield(&records)?;
            write_with(&a.out, |w| outfield::write_cells(w, &tab))
        }
    }
}

/// Run values, plus the catcher tabulation when the role has one.
fn run_values(ctx: &Session, input: &Path, from_cells: bool, tables: &RunTables) -> Result<(RunValueLedger, Option<CatcherTabulation>)> {
    match ctx.role {
        Role::Catcher => {
            let tab = if from_cells {
                catcher::read_cells(open(input)?).with_context(|| format!("reading {}", input.display()))?
            } else {
                read_catcher(input)?
            };
            let ledger = catcher::catcher_run_value(&tab, &tables.matrix, &tables.catcher);
            Ok((ledger, Some(tab)))
        }
        Role::Outfield => {
            if from_cells {
                bail!("--from-cells applies to the catcher role only");
            }
            let records = parse_outfield_opportunities(open(input)?)
                .with_context(|| format!("reading {}", input.display()))?;
            let tab = tabulate_outfield(&records)?;
            Ok((outfield_run_value(&tab, &tables.matrix, &tables.outfield)?, None))
        }
    }
}

fn evaluate(ctx: &Session, a: EvaluateArgs) -> Result<()> {
    let input = input_path(a.input, &ctx.cfg)?;
    let tables = load_tables(ctx, &a.tables)?;
    let (ledger, tab) = run_values(ctx, &input, a.from_cells, &tables)?;
    write_with(&a.out, |w| write_ledger(w, &ledger))?;
    if let Some(path) = a.situations {
        let tab = tab.ok_or_else(|| anyhow!("--situations applies to the catcher role only"))?;
        let values = catcher::situation_values(&tab, &tables.matrix, &tables.catcher);
        write_with(&path, |w| catcher::write_situation_values(w, &values))?;
    }
    Ok(())
}

fn index_path(draws: &Path) -> PathBuf {
    draws.with_extension("index.csv")
}

fn fit_ledger(ctx: &Session, ledger: &RunValueLedger, args: &SamplerArgs) -> Result<PosteriorDraws> {
    let (hyper, config) = sampler_settings(ctx, args);
    let data = ModelData::from_ledger(ledger)?;
    info!(
        "fitting {} players: burnin {}, draws {}, thin {}, seed {}",
        data.n_players(),
        config.burnin,
        config.draws,
        config.thin,
        config.seed
    );
    Ok(run_gibbs(&data, &hyper, &config)?)
}

fn write_draws(draws: &PosteriorDraws, path: &Path) -> Result<()> {
    write_with(path, |w| draws.write_binary(w))?;
    write_with(&index_path(path), |w| draws.write_index(w))
}

fn read_ledger_file(path: &Path) -> Result<RunValueLedger> {
    read_ledger(open(path)?).with_context(|| format!("reading {}", path.display()))
}

fn fit(ctx: &Session, a: FitArgs) -> Result<()> {
    let ledger = read_ledger_file(&a.ledger)?;
    let draws = fit_ledger(ctx, &ledger, &a.sampler)?;
    write_draws(&draws, &a.out)?;
    if let Some(path) = a.trace {
        let mut out = create(&path)?;
        writeln!(out, "draw,mu0,tau2")?;
        for (k, (m, t)) in draws.mu0().iter().zip(draws.tau2()).enumerate() {
            writeln!(out, "{},{m:?},{t:?}", k + 1)?;
        }
        out.flush()?;
    }
    Ok(())
}

fn print_rankings(summaries: &[PosteriorSummary], k: usize) -> Result<()> {
    let k = k.min(summaries.len());
    for (title, dir) in [("best", Direction::Best), ("worst", Direction::Worst)] {
        println!("{title} {k}:");
        for (i, s) in report::rank(summaries, k, dir)?.iter().enumerate() {
            println!(
                "{:>4}  {:<16} {:>9.2}  [{:.2}, {:.2}]{}",
                i + 1,
                s.player_id,
                s.mean_individual,
                s.interval_individual.0,
                s.interval_individual.1,
                if s.significant { " *" } else { "" }
            );
        }
    }
    println!(
        "{} of {} players significant",
        report::significance_count(summaries),
        summaries.len()
    );
    Ok(())
}

fn report_cmd(a: ReportArgs) -> Result<()> {
    let ids = read_index(open(&index_path(&a.draws))?)
        .with_context(|| format!("reading {}", index_path(&a.draws).display()))?;
    let draws = PosteriorDraws::read_binary(open(&a.draws)?, ids)
        .with_context(|| format!("reading {}", a.draws.display()))?;
    let ledger = read_ledger_file(&a.ledger)?;
    let rates: Option<BTreeMap<String, f64>> = match &a.cells {
        Some(p) => Some(
            catcher::read_cells(open(p)?)
                .with_context(|| format!("reading {}", p.display()))?
                .attempt_rates(),
        ),
        None => None,
    };
    let summaries = report::summarize(&draws, &ledger, rates.as_ref())?;
    write_with(&a.out, |w| report::write_summary(w, &summaries))?;
    if let Some(p) = a.plot_data {
        write_with(&p, |w| report::export_interval_plot_data(w, &summaries))?;
    }
    if let Some(k) = a.top {
        print_rankings(&summaries, k)?;
    }
    Ok(())
}

fn simulate(ctx: &Session, a: SimulateArgs) -> Result<()> {
    let text = fs::read_to_string(&a.spec).with_context(|| format!("cannot read {}", a.spec.display()))?;
    let spec: SimulationSpec = toml::from_str(&text).with_context(|| format!("invalid spec {}", a.spec.display()))?;
    fs::create_dir_all(&a.out_dir).with_context(|| format!("cannot create {}", a.out_dir.display()))?;
    let mut truth = String::from("role,player_id,parameter,value\n");
    if let Some(pop) = &spec.catcher {
        let t = pop.truth(&spec.seasons, ctx.seed)?;
        let records = generate_catcher_ledger(&t)?;
        write_with(&a.out_dir.join("catcher_opportunities.csv"), |w| write_catcher_opportunities(w, &records))?;
        for p in &t.players {
            truth += &format!("catcher,{},attempt_prob_r1,{:?}\n", p.player_id, p.attempt_prob[0]);
            truth += &format!("catcher,{},steal_success_prob,{:?}\n", p.player_id, p.steal_success_prob);
        }
    }
    if let Some(pop) = &spec.outfield {
        let t = pop.truth(&spec.seasons, ctx.seed)?;
        let records = generate_outfield_ledger(&t)?;
        write_with(&a.out_dir.join("outfield_opportunities.csv"), |w| write_outfield_opportunities(w, &records))?;
        for p in &t.players {
            truth += &format!("outfield,{},throw_out_prob,{:?}\n", p.player_id, p.throw_out_prob);
            truth += &format!("outfield,{},advance_prob,{:?}\n", p.player_id, p.advance_prob);
        }
    }
    if let Some(m) = &spec.model {
        let t = random_model_truth(&m.population(&spec.seasons), ctx.seed)?;
        let ledger = generate_model_observations(&t)?;
        write_with(&a.out_dir.join("model_runvalues.csv"), |w| write_ledger(w, &ledger))?;
        for p in &t.players {
            truth += &format!("model,{},mu,{:?}\n", p.player_id, p.mu);
            truth += &format!("model,{},sigma2,{:?}\n", p.player_id, p.sigma2);
        }
    }
    let path = a.out_dir.join("truth.csv");
    fs::write(&path, truth).with_context(|| format!("cannot write {}", path.display()))
}

fn pipeline(ctx: &Session, a: PipelineArgs) -> Result<()> {
    let input = input_path(a.input, &ctx.cfg)?;
    let out_dir = a
        .out_dir
        .or_else(|| ctx.cfg.out_dir.clone())
        .ok_or_else(|| anyhow!("no output directory: pass --out-dir or set `out_dir` in the config"))?;
    fs::create_dir_all(&out_dir).with_context(|| format!("cannot create {}", out_dir.display()))?;
    let tables = load_tables(ctx, &a.tables)?;
    let (ledger, tab) = run_values(ctx, &input, false, &tables)?;
    write_with(&out_dir.join("runvalues.csv"), |w| write_ledger(w, &ledger))?;
    if let Some(tab) = &tab {
        write_with(&out_dir.join("cells.csv"), |w| catcher::write_cells(w, tab))?;
    }

    let draws = fit_ledger(ctx, &ledger, &a.sampler)?;
    write_draws(&draws, &out_dir.join("draws.bin"))?;

    let rates = tab.as_ref().map(CatcherTabulation::attempt_rates);
    let summaries = report::summarize(&draws, &ledger, rates.as_ref())?;
    write_with(&out_dir.join("summary.csv"), |w| report::write_summary(w, &summaries))?;
    write_with(&out_dir.join("plot.csv"), |w| report::export_interval_plot_data(w, &summaries))?;
    let k = a.top.or(ctx.cfg.top).unwrap_or(DEFAULT_TOP).min(summaries.len());
    for (name, dir) in [("ranking_best.csv", Direction::Best), ("ranking_worst.csv", Direction::Worst)] {
        let ranked = report::rank(&summaries, k, dir)?;
        write_with(&out_dir.join(name), |w| report::write_summary(w, &ranked))?;
    }
    println!(
        "{} players, {} significant; outputs in {}",
        summaries.len(),
        report::significance_count(&summaries),
        out_dir.display()
    );
    Ok(())
}
