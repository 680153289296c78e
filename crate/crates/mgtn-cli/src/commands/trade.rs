//! Trading experiment runner: per-currency value agents over the windowed
//! return stream, averaged financial metrics, and equity curves.

use serde::Serialize;

use mgtn_data::SampleSet;
use mgtn_trade::{
    dqn_train, equity_curve, evaluate_greedy, financial_metrics, DqnConfig, FinancialMetrics,
    MarketEnv,
};

use crate::build::{build_model, prepare};
use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::{CliError, Result};
use crate::report::{fmt_f64, CsvBuilder, RunDir};

#[derive(Debug, Serialize)]
pub struct CurrencyReport {
    pub currency: String,
    pub in_sample: FinancialMetrics,
    pub out_of_sample: FinancialMetrics,
}

#[derive(Debug, Serialize)]
pub struct TradeReport {
    pub experiment: &'static str,
    pub seed: u64,
    pub trainable_parameters: usize,
    pub currencies: Vec<CurrencyReport>,
    pub average_out_of_sample_tr_pct: f64,
    pub average_out_of_sample_sharpe: f64,
}

fn concat(a: &SampleSet, b: &SampleSet) -> SampleSet {
    let mut out = a.clone();
    out.inputs.extend(b.inputs.iter().cloned());
    out.targets.extend(b.targets.iter().cloned());
    out.timestamps.extend(b.timestamps.iter().cloned());
    out
}

pub fn run_trade(config: &ExperimentConfig, out: &RunDir) -> Result<TradeReport> {
    config.validate()?;
    if config.experiment != ExperimentKind::Trade {
        return Err(CliError::Config(
            "the trade command needs experiment = trade".into(),
        ));
    }
    let trade = config.trade.clone().expect("validated above");
    out.write_preamble("trade", config)?;

    let prepared = prepare(config)?;
    // Validation has no role in value learning; train on the full
    // pre-boundary stream.
    let train_set = concat(&prepared.train, &prepared.val);
    let entity_count = prepared
        .train
        .targets
        .first()
        .map(|t| t.len())
        .unwrap_or(0);

    let mut curves = CsvBuilder::new(&[
        "currency", "episode", "steps", "epsilon", "mean_loss", "tr_pct", "sharpe", "md_pct",
        "hr_pct",
    ]);
    let mut currencies = Vec::new();
    let mut test_equities: Vec<(String, Vec<f64>)> = Vec::new();
    let mut np = 0usize;

    for &currency in &trade.currencies {
        if currency >= entity_count {
            return Err(CliError::Config(format!(
                "trade.currencies entry {currency} out of range ({entity_count} currencies)"
            )));
        }
        let name = prepared.train.entity_names[currency].clone();
        let model = build_model(config, &prepared)?;
        np = model.param_count();

        let mut train_env = MarketEnv::from_samples(&train_set, currency, trade.transaction_cost)?;
        let dqn_config = DqnConfig {
            episodes: trade.episodes,
            batch_size: trade.batch_size,
            learning_rate: trade.learning_rate,
            gamma: trade.gamma,
            epsilon_start: trade.epsilon_start,
            epsilon_end: trade.epsilon_end,
            epsilon_decay_fraction: trade.epsilon_decay_fraction,
            target_sync_interval: trade.target_sync_interval,
            replay_capacity: trade.replay_capacity,
            seed: config.seed.wrapping_add(currency as u64).wrapping_mul(0x9e3779b97f4a7c15),
        };
        let outcome = dqn_train(model, &mut train_env, &dqn_config)?;
        for log in &outcome.log {
            curves.row(&[
                name.clone(),
                log.episode.to_string(),
                log.steps.to_string(),
                fmt_f64(log.final_epsilon),
                fmt_f64(log.mean_loss),
                fmt_f64(log.metrics.total_return_pct),
                fmt_f64(log.metrics.sharpe),
                fmt_f64(log.metrics.max_drawdown_pct),
                fmt_f64(log.metrics.hit_rate_pct),
            ]);
        }

        let mut in_env = MarketEnv::from_samples(&train_set, currency, trade.transaction_cost)?;
        let (in_rewards, _) = evaluate_greedy(&outcome.model, &mut in_env)?;
        let mut test_env =
            MarketEnv::from_samples(&prepared.test, currency, trade.transaction_cost)?;
        let (test_rewards, _) = evaluate_greedy(&outcome.model, &mut test_env)?;
        test_equities.push((name.clone(), equity_curve(1000.0, &test_rewards)));
        let report = CurrencyReport {
            currency: name,
            in_sample: financial_metrics(&in_rewards)?,
            out_of_sample: financial_metrics(&test_rewards)?,
        };
        eprintln!(
            "{}: {} episodes done, out-of-sample TR {:.4}%",
            report.currency, trade.episodes, report.out_of_sample.total_return_pct
        );
        currencies.push(report);
    }
    out.write_text("curves.csv", &curves.finish())?;

    // Equity curves, one column per currency plus the average.
    let steps = test_equities.first().map(|(_, e)| e.len()).unwrap_or(0);
    let mut header: Vec<&str> = vec!["step"];
    let names: Vec<String> = test_equities.iter().map(|(n, _)| n.clone()).collect();
    for n in &names {
        header.push(n.as_str());
    }
    header.push("average");
    let mut equity_csv = CsvBuilder::new(&header);
    for step in 0..steps {
        let mut cells = vec![step.to_string()];
        let mut sum = 0.0;
        for (_, e) in &test_equities {
            sum += e[step];
            cells.push(fmt_f64(e[step]));
        }
        cells.push(fmt_f64(sum / test_equities.len().max(1) as f64));
        equity_csv.row(&cells);
    }
    out.write_text("equity.csv", &equity_csv.finish())?;

    let avg_tr = currencies
        .iter()
        .map(|c| c.out_of_sample.total_return_pct)
        .sum::<f64>()
        / currencies.len().max(1) as f64;
    let avg_sharpe = currencies.iter().map(|c| c.out_of_sample.sharpe).sum::<f64>()
        / currencies.len().max(1) as f64;
    let report = TradeReport {
        experiment: "trade",
        seed: config.seed,
        trainable_parameters: np,
        currencies,
        average_out_of_sample_tr_pct: avg_tr,
        average_out_of_sample_sharpe: avg_sharpe,
    };
    out.write_json("metrics.json", &report)?;

    let mut text = format!(
        "experiment: trade\nseed: {}\ntrainable parameters: {}\n",
        report.seed, report.trainable_parameters
    );
    for c in &report.currencies {
        text.push_str(&format!(
            "{}: TR {:.4}% SR {:.4} MD {:.4}% HR {:.2}% (out-of-sample)\n",
            c.currency,
            c.out_of_sample.total_return_pct,
            c.out_of_sample.sharpe,
            c.out_of_sample.max_drawdown_pct,
            c.out_of_sample.hit_rate_pct
        ));
    }
    text.push_str(&format!(
        "average out-of-sample TR: {:.4}%  SR: {:.4}\n",
        report.average_out_of_sample_tr_pct, report.average_out_of_sample_sharpe
    ));
    out.write_text("report.txt", &text)?;
    Ok(report)
}
