//! Seeded synthetic datasets shaped like the four experiment feeds: spot
//! price walks with a planted carry structure, class-conditional brain-wave
//! features, seasonal city temperatures, and correlated multi-site
//! pollution series.

use mgtn_core::rng::named_stream;
use mgtn_core::DenseTensor;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::table::{ColumnData, NumericTable, RawColumn, RawTable};

fn normal(rng: &mut impl Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub const OHLC: [&str; 4] = ["open", "high", "low", "close"];

#[derive(Debug, Clone)]
pub struct FxConfig {
    pub minutes: usize,
    pub currencies: usize,
    /// Per-minute log-return noise scale.
    pub noise: f64,
    /// Half-width of the planted per-currency carry spread.
    pub carry_spread: f64,
    /// Per-minute drift contributed by one unit of carry.
    pub drift_per_carry: f64,
}

impl Default for FxConfig {
    fn default() -> Self {
        Self {
            minutes: 2000,
            currencies: 9,
            noise: 2e-4,
            carry_spread: 0.01,
            drift_per_carry: 0.02,
        }
    }
}

/// Spot-price table plus the pairwise rate matrices the carry graph needs.
#[derive(Debug, Clone)]
pub struct FxBundle {
    /// OHLC features over `(time, currency)`.
    pub table: NumericTable,
    /// Pairwise spot rates (price of currency i in units of currency j).
    pub spot: DenseTensor,
    /// Pairwise forward rates embedding the planted carry differentials.
    pub forward: DenseTensor,
    /// The planted per-currency carry values.
    pub planted_carry: Vec<f64>,
}

/// Geometric random walks whose drift is proportional to a planted carry
/// vector; carry differentials are embedded in the forward-rate matrix.
pub fn synth_fx(seed: u64, config: &FxConfig) -> FxBundle {
    let mut rng = named_stream(seed, "data:fx");
    let c = config.currencies;
    let t_len = config.minutes;

    let planted_carry: Vec<f64> = (0..c)
        .map(|i| {
            if c == 1 {
                0.0
            } else {
                config.carry_spread * (2.0 * i as f64 / (c - 1) as f64 - 1.0)
            }
        })
        .collect();

    // Close paths first, then open/high/low around them.
    let mut closes = vec![0.0; t_len * c];
    for e in 0..c {
        let mut log_price: f64 = 0.0;
        let drift = config.drift_per_carry * planted_carry[e];
        for t in 0..t_len {
            log_price += drift + config.noise * normal(&mut rng);
            closes[t * c + e] = 100.0 * log_price.exp();
        }
    }
    let feature_len = t_len * c;
    let mut values = vec![0.0; 4 * feature_len];
    for e in 0..c {
        for t in 0..t_len {
            let close = closes[t * c + e];
            let open = if t == 0 { 100.0 } else { closes[(t - 1) * c + e] };
            let jitter = config.noise * normal(&mut rng).abs();
            let high = open.max(close) * (1.0 + jitter);
            let low = open.min(close) * (1.0 - jitter);
            values[t * c + e] = open;
            values[feature_len + t * c + e] = high;
            values[2 * feature_len + t * c + e] = low;
            values[3 * feature_len + t * c + e] = close;
        }
    }
    let table = NumericTable::new(
        OHLC.iter().map(|s| s.to_string()).collect(),
        (0..t_len as i64).collect(),
        (0..c).map(|i| format!("cur{i}")).collect(),
        values,
    )
    .expect("consistent by construction");

    let mut spot = DenseTensor::filled(&[c, c], 1.0);
    let mut forward = DenseTensor::filled(&[c, c], 1.0);
    for i in 0..c {
        for j in 0..c {
            if i == j {
                continue;
            }
            let rate = closes[(t_len - 1) * c + i] / closes[(t_len - 1) * c + j];
            spot.set(&[i, j], rate);
            // Forward embeds the carry differential exactly.
            forward.set(&[i, j], rate * (1.0 - (planted_carry[i] - planted_carry[j])));
        }
    }
    FxBundle {
        table,
        spot,
        forward,
        planted_carry,
    }
}

pub const EEG_FEATURES: [&str; 11] = [
    "Attention",
    "Meditation",
    "Raw",
    "Delta",
    "Theta",
    "Alpha1",
    "Alpha2",
    "Beta1",
    "Beta2",
    "Gamma1",
    "Gamma2",
];

#[derive(Debug, Clone)]
pub struct EegConfig {
    pub videos: usize,
    pub steps_per_video: usize,
    pub students: usize,
    /// Mean shift applied to band features under the positive class.
    pub signal: f64,
    pub noise: f64,
}

impl Default for EegConfig {
    fn default() -> Self {
        Self {
            videos: 10,
            steps_per_video: 30,
            students: 9,
            signal: 2.0,
            noise: 0.5,
        }
    }
}

/// Class-conditional band-power series; every (video, student) block gets a
/// binary label that shifts the band features. Returns the table, per-cell
/// labels (`labels[t * students + e]`), and the per-step video index.
pub fn synth_eeg(seed: u64, config: &EegConfig) -> (NumericTable, Vec<f64>, Vec<usize>) {
    let mut rng = named_stream(seed, "data:eeg");
    let t_len = config.videos * config.steps_per_video;
    let s = config.students;
    let f_len = EEG_FEATURES.len();

    let mut block_labels = vec![0.0; config.videos * s];
    for v in &mut block_labels {
        *v = if rng.random::<bool>() { 1.0 } else { 0.0 };
    }

    let mut labels = vec![0.0; t_len * s];
    let mut video_index = vec![0usize; t_len];
    let mut values = vec![0.0; f_len * t_len * s];
    for t in 0..t_len {
        let video = t / config.steps_per_video;
        video_index[t] = video;
        for e in 0..s {
            let label = block_labels[video * s + e];
            labels[t * s + e] = label;
            for f in 0..f_len {
                // Band features (Delta onward) carry the class signal.
                let weight = if f >= 3 { 1.0 } else { 0.3 };
                let base = f as f64 * 0.1;
                let v = base + label * config.signal * weight + config.noise * normal(&mut rng);
                values[(f * t_len + t) * s + e] = v;
            }
        }
    }
    let table = NumericTable::new(
        EEG_FEATURES.iter().map(|s| s.to_string()).collect(),
        (0..t_len as i64).collect(),
        (0..s).map(|i| format!("student{i}")).collect(),
        values,
    )
    .expect("consistent by construction");
    (table, labels, video_index)
}

#[derive(Debug, Clone)]
pub struct TemperatureConfig {
    pub months: usize,
    pub cities: usize,
    pub noise: f64,
}

impl Default for TemperatureConfig {
    fn default() -> Self {
        Self {
            months: 180,
            cities: 92,
            noise: 0.8,
        }
    }
}

/// Seasonal temperatures with a per-city offset; also returns synthetic
/// latitude/longitude pairs for the geographic kernel graph.
pub fn synth_temperature(
    seed: u64,
    config: &TemperatureConfig,
) -> (RawTable, Vec<(f64, f64)>) {
    let mut rng = named_stream(seed, "data:temperature");
    let t_len = config.months;
    let c = config.cities;
    let coords: Vec<(f64, f64)> = (0..c)
        .map(|_| {
            (
                rng.random_range(25.0..48.0),
                rng.random_range(-124.0..-67.0),
            )
        })
        .collect();

    let mut temperature = vec![0.0; t_len * c];
    let mut uncertainty = vec![0.0; t_len * c];
    let mut months = vec![0u32; t_len];
    for t in 0..t_len {
        let month = (t % 12) as u32 + 1;
        months[t] = month;
        let phase = std::f64::consts::TAU * (month as f64 - 3.0) / 12.0;
        for e in 0..c {
            let (lat, lon) = coords[e];
            let base = 25.0 - 0.5 * (lat - 25.0);
            let amplitude = 8.0 + 2.0 * (lon.to_radians()).sin();
            temperature[t * c + e] =
                base + amplitude * phase.sin() + config.noise * normal(&mut rng);
            uncertainty[t * c + e] = 0.3 + 0.1 * normal(&mut rng).abs();
        }
    }
    let table = RawTable {
        timestamps: (0..t_len as i64).collect(),
        months: Some(months),
        entities: (0..c).map(|i| format!("city{i}")).collect(),
        columns: vec![
            RawColumn {
                name: "AverageTemperature".into(),
                data: ColumnData::Numeric(temperature),
            },
            RawColumn {
                name: "AverageTemperatureUncertainty".into(),
                data: ColumnData::Numeric(uncertainty),
            },
        ],
    };
    (table, coords)
}

pub const AIR_NUMERIC: [&str; 11] = [
    "PM2.5", "PM10", "SO2", "NO2", "CO", "O3", "TEMP", "PRES", "DEWP", "RAIN", "WSPM",
];

pub const WIND_DIRECTIONS: [&str; 16] = [
    "N", "NNE", "NE", "ENE", "E", "ESE", "SE", "SSE", "S", "SSW", "SW", "WSW", "W", "WNW", "NW",
    "NNW",
];

#[derive(Debug, Clone)]
pub struct AirQualityConfig {
    pub hours: usize,
    pub sites: usize,
    /// Autoregression coefficient of the shared driver.
    pub persistence: f64,
    /// Strength of the shared driver relative to site noise.
    pub coupling: f64,
    pub noise: f64,
}

impl Default for AirQualityConfig {
    fn default() -> Self {
        Self {
            hours: 1500,
            sites: 12,
            persistence: 0.9,
            coupling: 1.0,
            noise: 0.5,
        }
    }
}

/// Correlated AR(1) pollution levels across sites, plus weather covariates
/// and a categorical wind direction column.
pub fn synth_airquality(seed: u64, config: &AirQualityConfig) -> RawTable {
    let mut rng = named_stream(seed, "data:airquality");
    let t_len = config.hours;
    let s = config.sites;

    let mut shared = 0.0f64;
    let mut site_state = vec![0.0f64; s];
    let mut numeric: Vec<Vec<f64>> = (0..AIR_NUMERIC.len())
        .map(|_| vec![0.0; t_len * s])
        .collect();
    let mut wind = vec![String::new(); t_len * s];

    for t in 0..t_len {
        shared = config.persistence * shared + normal(&mut rng);
        let hour_angle = std::f64::consts::TAU * (t % 24) as f64 / 24.0;
        for e in 0..s {
            site_state[e] = config.persistence * site_state[e]
                + config.coupling * shared
                + config.noise * normal(&mut rng);
            let level = site_state[e];
            let set = |col: usize, v: f64, numeric: &mut Vec<Vec<f64>>| {
                numeric[col][t * s + e] = v;
            };
            set(0, 60.0 + 25.0 * level, &mut numeric); // PM2.5
            set(1, 80.0 + 28.0 * level + 2.0 * normal(&mut rng), &mut numeric); // PM10
            set(2, 12.0 + 3.0 * level + normal(&mut rng), &mut numeric); // SO2
            set(3, 40.0 + 8.0 * level + normal(&mut rng), &mut numeric); // NO2
            set(4, 900.0 + 150.0 * level + 20.0 * normal(&mut rng), &mut numeric); // CO
            set(5, 50.0 - 6.0 * level + 2.0 * normal(&mut rng), &mut numeric); // O3
            set(6, 12.0 + 8.0 * hour_angle.sin() + normal(&mut rng), &mut numeric); // TEMP
            set(7, 1012.0 + 3.0 * normal(&mut rng), &mut numeric); // PRES
            set(8, 2.0 + 4.0 * normal(&mut rng), &mut numeric); // DEWP
            set(9, (normal(&mut rng) - 1.8).max(0.0), &mut numeric); // RAIN
            set(10, 1.5 + normal(&mut rng).abs(), &mut numeric); // WSPM
            let dir = rng.random_range(0..WIND_DIRECTIONS.len());
            wind[t * s + e] = WIND_DIRECTIONS[dir].to_string();
        }
    }

    let mut columns: Vec<RawColumn> = AIR_NUMERIC
        .iter()
        .zip(numeric)
        .map(|(name, data)| RawColumn {
            name: name.to_string(),
            data: ColumnData::Numeric(data),
        })
        .collect();
    // Keep the categorical column in its schema position (before WSPM).
    let wspm = columns.pop().unwrap();
    columns.push(RawColumn {
        name: "wd".into(),
        data: ColumnData::Categorical(wind),
    });
    columns.push(wspm);

    RawTable {
        timestamps: (0..t_len as i64).collect(),
        months: None,
        entities: (0..s).map(|i| format!("site{i}")).collect(),
        columns,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::{encode_features, EncodeOptions};
    use crate::features::log_returns;

    #[test]
    fn same_seed_produces_identical_output() {
        let a = synth_fx(7, &FxConfig::default());
        let b = synth_fx(7, &FxConfig::default());
        assert_eq!(a.table.series(3, 0), b.table.series(3, 0));
        assert_eq!(a.spot, b.spot);
        let (ta, la, _) = synth_eeg(7, &EegConfig::default());
        let (tb, lb, _) = synth_eeg(7, &EegConfig::default());
        assert_eq!(ta.series(5, 2), tb.series(5, 2));
        assert_eq!(la, lb);
    }

    #[test]
    fn zero_noise_zero_carry_walk_is_flat() {
        let config = FxConfig {
            minutes: 50,
            currencies: 3,
            noise: 0.0,
            carry_spread: 0.0,
            drift_per_carry: 0.02,
        };
        let fx = synth_fx(3, &config);
        for e in 0..3 {
            let closes = fx.table.series(3, e);
            let returns = log_returns(&closes).unwrap();
            assert!(returns.iter().all(|&r| r.abs() < 1e-15));
        }
    }

    #[test]
    fn planted_carry_orders_mean_returns() {
        let config = FxConfig {
            minutes: 10_000,
            currencies: 5,
            noise: 2e-4,
            carry_spread: 0.01,
            drift_per_carry: 0.02,
        };
        let fx = synth_fx(11, &config);
        // Regress mean log-return on planted carry: the slope must be
        // clearly positive (close to drift_per_carry).
        let means: Vec<f64> = (0..5)
            .map(|e| {
                let r = log_returns(&fx.table.series(3, e)).unwrap();
                r.iter().sum::<f64>() / r.len() as f64
            })
            .collect();
        let carry = &fx.planted_carry;
        let cbar = carry.iter().sum::<f64>() / carry.len() as f64;
        let mbar = means.iter().sum::<f64>() / means.len() as f64;
        let cov: f64 = carry
            .iter()
            .zip(&means)
            .map(|(c, m)| (c - cbar) * (m - mbar))
            .sum();
        let var: f64 = carry.iter().map(|c| (c - cbar) * (c - cbar)).sum();
        let slope = cov / var;
        assert!(
            (slope - config.drift_per_carry).abs() < 0.5 * config.drift_per_carry,
            "slope {slope}"
        );
    }

    #[test]
    fn carry_matrices_recover_differentials() {
        let fx = synth_fx(5, &FxConfig::default());
        let (i, j) = (8, 0); // extreme carries
        let implied = 1.0 - fx.forward.get(&[i, j]) / fx.spot.get(&[i, j]);
        let expect = fx.planted_carry[i] - fx.planted_carry[j];
        assert!((implied - expect).abs() < 1e-12);
    }

    #[test]
    fn eeg_layout_matches_expected_modes() {
        let (table, labels, videos) = synth_eeg(1, &EegConfig::default());
        assert_eq!(table.feature_count(), 11);
        assert_eq!(table.entity_count(), 9);
        assert_eq!(table.time_len(), 300);
        assert_eq!(labels.len(), 300 * 9);
        assert_eq!(videos[29], 0);
        assert_eq!(videos[30], 1);
        assert!(labels.iter().all(|&l| l == 0.0 || l == 1.0));
    }

    #[test]
    fn airquality_encodes_to_27_features() {
        let raw = synth_airquality(2, &AirQualityConfig { hours: 40, sites: 3, ..Default::default() });
        let (numeric, encoders) = encode_features(
            &raw,
            &EncodeOptions {
                one_hot: vec!["wd".into()],
                append_month_sin: false,
                append_month_cos: false,
            },
        )
        .unwrap();
        // 11 numeric + 16 wind directions.
        assert_eq!(numeric.feature_count(), 27);
        assert_eq!(encoders[0].width(), 16);
    }

    #[test]
    fn temperature_table_has_months_and_coords() {
        let (table, coords) = synth_temperature(4, &TemperatureConfig { months: 36, cities: 5, noise: 0.1 });
        assert_eq!(coords.len(), 5);
        assert_eq!(table.months.as_ref().unwrap().len(), 36);
        let (numeric, _) = encode_features(
            &table,
            &EncodeOptions {
                one_hot: vec![],
                append_month_sin: true,
                append_month_cos: false,
            },
        )
        .unwrap();
        assert_eq!(numeric.feature_count(), 3);
        // Seasonality: same month across years correlates strongly.
        let series = numeric.series(0, 0);
        let (jan0, jan1) = (series[0], series[12]);
        let (jul0,) = (series[6],);
        assert!((jan0 - jan1).abs() < (jan0 - jul0).abs());
    }
}
