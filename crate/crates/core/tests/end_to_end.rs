use std::io::Cursor;

use armvalue::catcher::{self, catcher_run_value, tabulate};
use armvalue::event::{
    parse_catcher_opportunities, parse_outfield_opportunities, write_catcher_opportunities,
    write_outfield_opportunities,
};
use armvalue::ledger::{read_ledger, write_ledger};
use armvalue::model::run_gibbs;
use armvalue::outfield::{outfield_run_value, tabulate_outfield};
use armvalue::report::{self, significance_count, summarize};
use armvalue::run_matrix::{load_catcher_transitions, load_matrix, load_outfield_transitions};
use armvalue::synth::{
    generate_model_observations, CatcherPopulation, ModelPlayerTruth, ModelTruth,
    OutfieldPopulation,
};
use armvalue::{
    CatcherTransitions, ExpectedRunsMatrix, HyperParams, ModelData, OutfieldTransitions,
    PosteriorDraws, RunTables, SamplerConfig,
};

const SEASONS: [u16; 3] = [2003, 2004, 2005];

fn quick() -> SamplerConfig {
    SamplerConfig {
        burnin: 500,
        draws: 4000,
        ..SamplerConfig::default()
    }
}

#[test]
fn bundled_tables_load_through_public_parsers() {
    let m = load_matrix(Cursor::new(include_str!("../data/run_matrix.csv"))).unwrap();
    assert_eq!(m, ExpectedRunsMatrix::reference());
    assert!(m.monotonicity_violations().is_empty());
    let c = load_catcher_transitions(Cursor::new(include_str!("../data/transitions_catcher.csv"))).unwrap();
    assert_eq!(c, CatcherTransitions::reference());
    let o = load_outfield_transitions(Cursor::new(include_str!("../data/transitions_outfield.csv"))).unwrap();
    assert_eq!(o, OutfieldTransitions::reference());
}

#[test]
fn catcher_csv_to_summary() {
    let pop = CatcherPopulation {
        players: 15,
        opportunities: (200, 500),
        attempt_rate: (0.03, 0.15),
        steal_success: (0.5, 0.85),
    };
    let records = armvalue::synth::generate_catcher_ledger(&pop.truth(&SEASONS, 3).unwrap()).unwrap();
    let mut csv = Vec::new();
    write_catcher_opportunities(&mut csv, &records).unwrap();
    let parsed = parse_catcher_opportunities(csv.as_slice()).unwrap();
    assert_eq!(parsed, records);

    let tab = tabulate(&parsed);
    let tables = RunTables::reference();
    let ledger = catcher_run_value(&tab, &tables.matrix, &tables.catcher);
    assert_eq!(ledger.len(), 15 * SEASONS.len());

    let mut out = Vec::new();
    write_ledger(&mut out, &ledger).unwrap();
    let ledger = read_ledger(out.as_slice()).unwrap();

    let data = ModelData::from_ledger(&ledger).unwrap();
    let draws = run_gibbs(&data, &HyperParams::default(), &quick()).unwrap();
    let rates = tab.attempt_rates();
    let summaries = summarize(&draws, &ledger, Some(&rates)).unwrap();
    assert_eq!(summaries.len(), 15);
    for s in &summaries {
        assert!(s.interval_scaled.0 <= s.mean_scaled && s.mean_scaled <= s.interval_scaled.1);
        let pct = s.attempt_pct.unwrap();
        assert!((0.0..=100.0).contains(&pct));
    }
    let mut cells = Vec::new();
    catcher::write_cells(&mut cells, &tab).unwrap();
    assert_eq!(catcher::read_cells(cells.as_slice()).unwrap(), tab);
}

#[test]
fn outfield_csv_to_ledger() {
    let pop = OutfieldPopulation {
        players: 10,
        opportunities: (40, 80),
        throw_out_rate: (0.02, 0.1),
        advance_rate: (0.2, 0.5),
        x_range: (-150.0, 150.0),
        y_range: (180.0, 330.0),
    };
    let records = armvalue::synth::generate_outfield_ledger(&pop.truth(&SEASONS, 4).unwrap()).unwrap();
    let mut csv = Vec::new();
    write_outfield_opportunities(&mut csv, &records).unwrap();
    let parsed = parse_outfield_opportunities(csv.as_slice()).unwrap();
    assert_eq!(parsed, records);
    let tables = RunTables::reference();
    let ledger = outfield_run_value(&tabulate_outfield(&parsed).unwrap(), &tables.matrix, &tables.outfield).unwrap();
    assert_eq!(ledger.len(), 10 * SEASONS.len());
    assert!(ledger.entries().iter().all(|e| e.run_value.is_finite()));
}

fn extreme_truth() -> (ModelTruth, Vec<bool>) {
    let mut players = Vec::new();
    let mut extreme = Vec::new();
    for i in 0..30 {
        let is_extreme = i % 2 == 0;
        let mu = match (is_extreme, i % 4) {
            (true, 0) => 12.0,
            (true, _) => -12.0,
            (false, _) => 0.0,
        };
        players.push(ModelPlayerTruth {
            player_id: format!("p{i:02}"),
            mu,
            sigma2: 1.0,
            opportunities: SEASONS.iter().map(|&s| (s, 400)).collect(),
        });
        extreme.push(is_extreme);
    }
    (ModelTruth { players, seed: 11 }, extreme)
}

#[test]
fn significance_count_tracks_extreme_players() {
    let (truth, extreme) = extreme_truth();
    let ledger = generate_model_observations(&truth).unwrap();
    let data = ModelData::from_ledger(&ledger).unwrap();
    let draws = run_gibbs(&data, &HyperParams::default(), &quick()).unwrap();
    let summaries = summarize(&draws, &ledger, None).unwrap();
    let n_extreme = extreme.iter().filter(|e| **e).count();
    let count = significance_count(&summaries);
    assert!(count.abs_diff(n_extreme) <= 2, "{count} significant, {n_extreme} extreme");
    for (s, e) in summaries.iter().zip(&extreme) {
        if *e {
            assert!(s.significant, "{}", s.player_id);
        }
    }
}

#[test]
fn variance_draws_are_positive_and_runs_repeat() {
    let (truth, _) = extreme_truth();
    let data = ModelData::from_ledger(&generate_model_observations(&truth).unwrap()).unwrap();
    let a = run_gibbs(&data, &HyperParams::default(), &quick()).unwrap();
    assert!(a.sigma2_all().iter().all(|v| *v > 0.0));
    assert!(a.tau2().iter().all(|v| *v > 0.0));
    let b = run_gibbs(&data, &HyperParams::default(), &quick()).unwrap();
    assert_eq!(a, b);

    let mut bin = Vec::new();
    a.write_binary(&mut bin).unwrap();
    let back = PosteriorDraws::read_binary(bin.as_slice(), a.player_ids().to_vec()).unwrap();
    assert_eq!(back, a);
}

#[test]
fn single_season_players_are_kept() {
    let truth = ModelTruth {
        players: (0..6)
            .map(|i| ModelPlayerTruth {
                player_id: format!("q{i}"),
                mu: i as f64 - 2.5,
                sigma2: 2.0,
                opportunities: if i == 0 { vec![(2002, 300)] } else { vec![(2002, 300), (2003, 250)] },
            })
            .collect(),
        seed: 2,
    };
    let ledger = generate_model_observations(&truth).unwrap();
    let data = ModelData::from_ledger(&ledger).unwrap();
    assert_eq!(data.groups[0].seasons(), 1);
    let draws = run_gibbs(&data, &HyperParams::default(), &quick()).unwrap();
    let s = summarize(&draws, &ledger, None).unwrap();
    assert_eq!(s.len(), 6);
    assert!(draws.mu(0).iter().all(|x| x.is_finite()));
}

#[test]
fn ranking_agrees_across_scales_for_equal_opportunities() {
    let (truth, _) = extreme_truth();
    let ledger = generate_model_observations(&truth).unwrap();
    let data = ModelData::from_ledger(&ledger).unwrap();
    let draws = run_gibbs(&data, &HyperParams::default(), &quick()).unwrap();
    let summaries = summarize(&draws, &ledger, None).unwrap();
    let by_individual: Vec<_> = report::rank(&summaries, summaries.len(), report::Direction::Best)
        .unwrap()
        .into_iter()
        .map(|s| s.player_id)
        .collect();
    let mut by_scaled = summaries.clone();
    by_scaled.sort_by(|a, b| b.mean_scaled.total_cmp(&a.mean_scaled).then_with(|| a.player_id.cmp(&b.player_id)));
    let by_scaled: Vec<_> = by_scaled.into_iter().map(|s| s.player_id).collect();
    assert_eq!(by_individual, by_scaled);
}
