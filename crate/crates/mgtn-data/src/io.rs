//! CSV readers and writers for the four documented dataset schemas:
//!
//! * spot prices: one file per currency with `timestamp,open,high,low,close`,
//!   plus a pairwise rate file `base,quote,spot,forward`;
//! * brain-wave recordings per `(subject, video)` row block
//!   (`SubjectID,VideoID,<11 signals>,predefinedlabel,user-definedlabeln`);
//! * city temperatures
//!   (`dt,AverageTemperature,AverageTemperatureUncertainty,City,Country,Latitude,Longitude`);
//! * multi-site air quality, one file per site
//!   (`No,year,month,day,hour,<numeric columns>,wd,WSPM,station`).

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use mgtn_core::DenseTensor;

use crate::error::{DataError, Result};
use crate::synth::{EEG_FEATURES, AIR_NUMERIC, OHLC};
use crate::table::{ColumnData, NumericTable, RawColumn, RawTable};

fn parse_f64(name: &str, row: usize, cell: &str) -> Result<f64> {
    let trimmed = cell.trim();
    if trimmed.is_empty() || trimmed == "NA" {
        return Ok(f64::NAN);
    }
    trimmed.parse().map_err(|e| DataError::BadCell {
        name: name.to_string(),
        row,
        reason: format!("{e}"),
    })
}

// ---------------------------------------------------------------------------
// Spot prices
// ---------------------------------------------------------------------------

pub fn write_fx_csv<W: Write>(w: W, table: &NumericTable, entity: usize) -> Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    writer.write_record(["timestamp", "open", "high", "low", "close"])?;
    for t in 0..table.time_len() {
        let mut record = vec![table.timestamps[t].to_string()];
        for f in 0..4 {
            record.push(format!("{:?}", table.value(f, t, entity)));
        }
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Loads per-currency OHLC files; all files must share the same timestamps.
pub fn load_fx_csvs(sources: &[(String, Vec<u8>)]) -> Result<NumericTable> {
    let mut timestamps: Option<Vec<i64>> = None;
    let c = sources.len();
    let mut per_currency: Vec<Vec<[f64; 4]>> = Vec::with_capacity(c);
    for (name, bytes) in sources {
        let mut reader = csv::Reader::from_reader(bytes.as_slice());
        let mut ts = Vec::new();
        let mut rows = Vec::new();
        for (row, record) in reader.records().enumerate() {
            let record = record?;
            let stamp: i64 = record
                .get(0)
                .unwrap_or("")
                .trim()
                .parse()
                .map_err(|e| DataError::BadCell {
                    name: format!("{name}:timestamp"),
                    row,
                    reason: format!("{e}"),
                })?;
            ts.push(stamp);
            let mut ohlc = [0.0; 4];
            for f in 0..4 {
                ohlc[f] = parse_f64(name, row, record.get(f + 1).unwrap_or(""))?;
            }
            rows.push(ohlc);
        }
        match &timestamps {
            None => timestamps = Some(ts),
            Some(existing) => {
                if *existing != ts {
                    return Err(DataError::Inconsistent(format!(
                        "timestamps of {name} differ from the first file"
                    )));
                }
            }
        }
        per_currency.push(rows);
    }
    let timestamps = timestamps.ok_or_else(|| DataError::Inconsistent("no spot files".into()))?;
    let t_len = timestamps.len();
    let mut values = vec![0.0; 4 * t_len * c];
    for (e, rows) in per_currency.iter().enumerate() {
        for (t, ohlc) in rows.iter().enumerate() {
            for f in 0..4 {
                values[(f * t_len + t) * c + e] = ohlc[f];
            }
        }
    }
    NumericTable::new(
        OHLC.iter().map(|s| s.to_string()).collect(),
        timestamps,
        sources.iter().map(|(n, _)| n.clone()).collect(),
        values,
    )
}

pub fn write_rates_csv<W: Write>(
    w: W,
    names: &[String],
    spot: &DenseTensor,
    forward: &DenseTensor,
) -> Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    writer.write_record(["base", "quote", "spot", "forward"])?;
    let n = names.len();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            writer.write_record([
                names[i].as_str(),
                names[j].as_str(),
                &format!("{:?}", spot.get(&[i, j])),
                &format!("{:?}", forward.get(&[i, j])),
            ])?;
        }
    }
    writer.flush()?;
    Ok(())
}

/// Reads pairwise spot/forward rates into matrices over `names` order.
pub fn load_rates_csv<R: Read>(r: R, names: &[String]) -> Result<(DenseTensor, DenseTensor)> {
    let n = names.len();
    let index = |name: &str| names.iter().position(|x| x == name);
    let mut spot = DenseTensor::filled(&[n, n], 1.0);
    let mut forward = DenseTensor::filled(&[n, n], 1.0);
    let mut reader = csv::Reader::from_reader(r);
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let base = record.get(0).unwrap_or("").trim();
        let quote = record.get(1).unwrap_or("").trim();
        let (Some(i), Some(j)) = (index(base), index(quote)) else {
            continue;
        };
        spot.set(&[i, j], parse_f64("spot", row, record.get(2).unwrap_or(""))?);
        forward.set(&[i, j], parse_f64("forward", row, record.get(3).unwrap_or(""))?);
    }
    Ok((spot, forward))
}

// ---------------------------------------------------------------------------
// Brain-wave recordings
// ---------------------------------------------------------------------------

pub fn write_eeg_csv<W: Write>(
    w: W,
    table: &NumericTable,
    labels: &[f64],
    video_index: &[usize],
) -> Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    let mut header = vec!["SubjectID".to_string(), "VideoID".to_string()];
    // The public schema spells the second signal "Mediation".
    header.extend(
        EEG_FEATURES
            .iter()
            .map(|f| if *f == "Meditation" { "Mediation".to_string() } else { f.to_string() }),
    );
    header.push("predefinedlabel".into());
    header.push("user-definedlabeln".into());
    writer.write_record(&header)?;
    let e_len = table.entity_count();
    for e in 0..e_len {
        for t in 0..table.time_len() {
            let mut record = vec![format!("{e}.0"), format!("{}.0", video_index[t])];
            for f in 0..table.feature_count() {
                record.push(format!("{:?}", table.value(f, t, e)));
            }
            record.push("0.0".into());
            record.push(format!("{:?}", labels[t * e_len + e]));
            writer.write_record(&record)?;
        }
    }
    writer.flush()?;
    Ok(())
}

/// Parses rows grouped by `(subject, video)`. Videos are concatenated along
/// time, truncated per video to the shortest subject block so every time
/// step has all subjects.
pub fn load_eeg_csv<R: Read>(r: R) -> Result<(NumericTable, Vec<f64>, Vec<usize>)> {
    let mut reader = csv::Reader::from_reader(r);
    let headers = reader.headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| DataError::MissingColumn(name.to_string()))
    };
    let subject_col = col("SubjectID")?;
    let video_col = col("VideoID")?;
    let label_col = col("user-definedlabeln")?;
    let feature_cols: Vec<usize> = EEG_FEATURES
        .iter()
        .map(|f| {
            let schema_name = if *f == "Meditation" { "Mediation" } else { f };
            col(schema_name)
        })
        .collect::<Result<_>>()?;

    // Rows of features plus the block label, keyed by (video, subject).
    type Block = (Vec<Vec<f64>>, f64);
    let mut blocks: BTreeMap<(u32, u32), Block> = BTreeMap::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let subject = parse_f64("SubjectID", row, record.get(subject_col).unwrap_or(""))? as u32;
        let video = parse_f64("VideoID", row, record.get(video_col).unwrap_or(""))? as u32;
        let label = parse_f64("label", row, record.get(label_col).unwrap_or(""))?;
        let features: Vec<f64> = feature_cols
            .iter()
            .map(|&c| parse_f64("feature", row, record.get(c).unwrap_or("")))
            .collect::<Result<_>>()?;
        let entry = blocks.entry((video, subject)).or_insert_with(|| (Vec::new(), label));
        entry.0.push(features);
        entry.1 = label;
    }

    let mut subjects: Vec<u32> = blocks.keys().map(|&(_, s)| s).collect();
    subjects.sort_unstable();
    subjects.dedup();
    let mut videos: Vec<u32> = blocks.keys().map(|&(v, _)| v).collect();
    videos.sort_unstable();
    videos.dedup();
    let s_len = subjects.len();

    let mut values: Vec<f64> = Vec::new(); // appended per time step below
    let mut labels: Vec<f64> = Vec::new();
    let mut video_of_step: Vec<usize> = Vec::new();
    let mut per_feature: Vec<Vec<f64>> = vec![Vec::new(); EEG_FEATURES.len()];
    for &v in &videos {
        let min_len = subjects
            .iter()
            .map(|&s| blocks.get(&(v, s)).map_or(0, |(rows, _)| rows.len()))
            .min()
            .unwrap_or(0);
        if min_len == 0 {
            continue;
        }
        for t in 0..min_len {
            for (si, &s) in subjects.iter().enumerate() {
                let (rows, label) = &blocks[&(v, s)];
                for (f, value) in rows[t].iter().enumerate() {
                    per_feature[f].push(*value);
                }
                labels.push(*label);
                let _ = si;
            }
            video_of_step.push(v as usize);
        }
    }
    let t_len = video_of_step.len();
    if t_len == 0 {
        return Err(DataError::NoCompleteRows);
    }
    for f in per_feature {
        values.extend(f);
    }
    let table = NumericTable::new(
        EEG_FEATURES.iter().map(|s| s.to_string()).collect(),
        (0..t_len as i64).collect(),
        subjects.iter().map(|s| format!("student{s}")).collect(),
        values,
    )?;
    debug_assert_eq!(labels.len(), t_len * s_len);
    Ok((table, labels, video_of_step))
}

// ---------------------------------------------------------------------------
// City temperatures
// ---------------------------------------------------------------------------

fn format_coordinate(value: f64, positive: char, negative: char) -> String {
    if value >= 0.0 {
        format!("{:.2}{positive}", value)
    } else {
        format!("{:.2}{negative}", -value)
    }
}

fn parse_coordinate(cell: &str, row: usize) -> Result<f64> {
    let trimmed = cell.trim();
    if trimmed.is_empty() {
        return Ok(f64::NAN);
    }
    let (digits, sign) = match trimmed.chars().last() {
        Some('N') | Some('E') => (&trimmed[..trimmed.len() - 1], 1.0),
        Some('S') | Some('W') => (&trimmed[..trimmed.len() - 1], -1.0),
        _ => (trimmed, 1.0),
    };
    digits
        .parse::<f64>()
        .map(|v| sign * v)
        .map_err(|e| DataError::BadCell {
            name: "coordinate".into(),
            row,
            reason: format!("{e}"),
        })
}

pub fn write_temperature_csv<W: Write>(
    w: W,
    table: &RawTable,
    coords: &[(f64, f64)],
) -> Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    writer.write_record([
        "dt",
        "AverageTemperature",
        "AverageTemperatureUncertainty",
        "City",
        "Country",
        "Latitude",
        "Longitude",
    ])?;
    let months = table
        .months
        .as_ref()
        .ok_or_else(|| DataError::Inconsistent("temperature table needs months".into()))?;
    let temp = match &table.column("AverageTemperature")?.data {
        ColumnData::Numeric(v) => v,
        _ => return Err(DataError::Inconsistent("temperature must be numeric".into())),
    };
    let unc = match &table.column("AverageTemperatureUncertainty")?.data {
        ColumnData::Numeric(v) => v,
        _ => return Err(DataError::Inconsistent("uncertainty must be numeric".into())),
    };
    let e_len = table.entity_count();
    for (e, city) in table.entities.iter().enumerate() {
        let mut year = 2000;
        let mut last_month = 0;
        for t in 0..table.time_len() {
            let month = months[t];
            if month <= last_month {
                year += 1;
            }
            last_month = month;
            writer.write_record([
                format!("{year}-{month:02}-01"),
                format!("{:?}", temp[t * e_len + e]),
                format!("{:?}", unc[t * e_len + e]),
                city.clone(),
                "Synthetica".to_string(),
                format_coordinate(coords[e].0, 'N', 'S'),
                format_coordinate(coords[e].1, 'E', 'W'),
            ])?;
        }
    }
    writer.flush()?;
    Ok(())
}

/// Loads the city-temperature schema, keeping the `max_cities` cities with
/// the most observed months over the common date range.
pub fn load_temperature_csv<R: Read>(
    r: R,
    max_cities: usize,
) -> Result<(RawTable, Vec<(f64, f64)>)> {
    #[derive(Default)]
    struct City {
        coords: (f64, f64),
        by_date: BTreeMap<(i32, u32), (f64, f64)>,
    }
    let mut cities: BTreeMap<String, City> = BTreeMap::new();
    let mut reader = csv::Reader::from_reader(r);
    let headers = reader.headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DataError::MissingColumn(name.to_string()))
    };
    let (dt_c, t_c, u_c, city_c, lat_c, lon_c) = (
        col("dt")?,
        col("AverageTemperature")?,
        col("AverageTemperatureUncertainty")?,
        col("City")?,
        col("Latitude")?,
        col("Longitude")?,
    );
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let dt = record.get(dt_c).unwrap_or("");
        let mut parts = dt.split('-');
        let (Some(y), Some(m)) = (parts.next(), parts.next()) else {
            continue;
        };
        let (Ok(year), Ok(month)) = (y.parse::<i32>(), m.parse::<u32>()) else {
            continue;
        };
        let temperature = parse_f64("AverageTemperature", row, record.get(t_c).unwrap_or(""))?;
        if temperature.is_nan() {
            continue;
        }
        let uncertainty =
            parse_f64("AverageTemperatureUncertainty", row, record.get(u_c).unwrap_or(""))?;
        let name = record.get(city_c).unwrap_or("").to_string();
        let entry = cities.entry(name).or_default();
        entry.coords = (
            parse_coordinate(record.get(lat_c).unwrap_or(""), row)?,
            parse_coordinate(record.get(lon_c).unwrap_or(""), row)?,
        );
        entry.by_date.insert((year, month), (temperature, uncertainty));
    }

    let mut ranked: Vec<(String, City)> = cities.into_iter().collect();
    ranked.sort_by(|a, b| b.1.by_date.len().cmp(&a.1.by_date.len()).then(a.0.cmp(&b.0)));
    ranked.truncate(max_cities);
    if ranked.is_empty() {
        return Err(DataError::NoCompleteRows);
    }

    // Common date range: intersection of months observed by every kept city.
    let mut dates: Vec<(i32, u32)> = ranked[0].1.by_date.keys().cloned().collect();
    dates.retain(|d| ranked.iter().all(|(_, c)| c.by_date.contains_key(d)));
    if dates.is_empty() {
        return Err(DataError::NoCompleteRows);
    }

    let e_len = ranked.len();
    let t_len = dates.len();
    let mut temp = vec![f64::NAN; t_len * e_len];
    let mut unc = vec![f64::NAN; t_len * e_len];
    for (e, (_, city)) in ranked.iter().enumerate() {
        for (t, d) in dates.iter().enumerate() {
            let (tv, uv) = city.by_date[d];
            temp[t * e_len + e] = tv;
            unc[t * e_len + e] = if uv.is_nan() { 0.0 } else { uv };
        }
    }
    let table = RawTable {
        timestamps: dates
            .iter()
            .map(|&(y, m)| i64::from(y) * 12 + i64::from(m))
            .collect(),
        months: Some(dates.iter().map(|&(_, m)| m).collect()),
        entities: ranked.iter().map(|(n, _)| n.clone()).collect(),
        columns: vec![
            RawColumn {
                name: "AverageTemperature".into(),
                data: ColumnData::Numeric(temp),
            },
            RawColumn {
                name: "AverageTemperatureUncertainty".into(),
                data: ColumnData::Numeric(unc),
            },
        ],
    };
    let coords = ranked.iter().map(|(_, c)| c.coords).collect();
    Ok((table, coords))
}

// ---------------------------------------------------------------------------
// Multi-site air quality
// ---------------------------------------------------------------------------

pub fn write_airquality_csv<W: Write>(w: W, table: &RawTable, entity: usize) -> Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    let mut header = vec!["No", "year", "month", "day", "hour"];
    header.extend(AIR_NUMERIC[..10].iter().copied());
    header.push("wd");
    header.push("WSPM");
    header.push("station");
    writer.write_record(&header)?;
    let e_len = table.entity_count();
    for t in 0..table.time_len() {
        let stamp = table.timestamps[t];
        let hour = stamp % 24;
        let day = (stamp / 24) % 30 + 1;
        let month = (stamp / (24 * 30)) % 12 + 1;
        let year = 2013 + stamp / (24 * 360);
        let mut record = vec![
            (t + 1).to_string(),
            year.to_string(),
            month.to_string(),
            day.to_string(),
            hour.to_string(),
        ];
        for col in &table.columns {
            match &col.data {
                ColumnData::Numeric(v) => record.push(format!("{:?}", v[t * e_len + entity])),
                ColumnData::Categorical(v) => record.push(v[t * e_len + entity].clone()),
            }
        }
        record.push(table.entities[entity].clone());
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Loads per-site files; rows align by file order and must agree in count.
pub fn load_airquality_csvs(sources: &[(String, Vec<u8>)]) -> Result<RawTable> {
    let mut site_rows: Vec<(Vec<Vec<f64>>, Vec<String>)> = Vec::new();
    for (name, bytes) in sources {
        let mut reader = csv::Reader::from_reader(bytes.as_slice());
        let headers = reader.headers()?.clone();
        let col = |want: &str| -> Result<usize> {
            headers
                .iter()
                .position(|h| h == want)
                .ok_or_else(|| DataError::MissingColumn(format!("{name}: {want}")))
        };
        let numeric_cols: Vec<usize> =
            AIR_NUMERIC.iter().map(|c| col(c)).collect::<Result<_>>()?;
        let wd_col = col("wd")?;
        let mut numeric = Vec::new();
        let mut wind = Vec::new();
        for (row, record) in reader.records().enumerate() {
            let record = record?;
            let vals: Vec<f64> = numeric_cols
                .iter()
                .map(|&c| parse_f64("air", row, record.get(c).unwrap_or("")))
                .collect::<Result<_>>()?;
            numeric.push(vals);
            wind.push(record.get(wd_col).unwrap_or("").trim().to_string());
        }
        site_rows.push((numeric, wind));
    }
    let t_len = site_rows
        .iter()
        .map(|(n, _)| n.len())
        .min()
        .ok_or_else(|| DataError::Inconsistent("no site files".into()))?;
    if t_len == 0 {
        return Err(DataError::NoCompleteRows);
    }
    let s = site_rows.len();
    let mut columns: Vec<RawColumn> = Vec::new();
    for (f, name) in AIR_NUMERIC.iter().enumerate() {
        let mut data = vec![f64::NAN; t_len * s];
        for (e, (numeric, _)) in site_rows.iter().enumerate() {
            for t in 0..t_len {
                data[t * s + e] = numeric[t][f];
            }
        }
        columns.push(RawColumn {
            name: name.to_string(),
            data: ColumnData::Numeric(data),
        });
    }
    let mut wind = vec![String::new(); t_len * s];
    for (e, (_, w)) in site_rows.iter().enumerate() {
        for t in 0..t_len {
            wind[t * s + e] = w[t].clone();
        }
    }
    // Schema position: wd before WSPM.
    let wspm = columns.pop().unwrap();
    columns.push(RawColumn {
        name: "wd".into(),
        data: ColumnData::Categorical(wind),
    });
    columns.push(wspm);
    Ok(RawTable {
        timestamps: (0..t_len as i64).collect(),
        months: None,
        entities: sources.iter().map(|(n, _)| n.clone()).collect(),
        columns,
    })
}

/// Convenience: read a whole file into memory tagged with a display name.
pub fn read_named(path: &Path) -> Result<(String, Vec<u8>)> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    Ok((name, std::fs::read(path)?))
}
