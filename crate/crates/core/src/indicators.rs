//! Indicator time series, country economies and peer-country tables.
//!
//! Everything here is validated at construction and immutable afterwards.
//! Series CSVs use the header `year,value`; peer tables use the fixed
//! eleven-column header listed in [`PEER_HEADER`]. Columns are matched by
//! header name, never by position.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IndicatorError {
    #[error("line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("duplicate year {0}")]
    DuplicateYear(i32),
    #[error("non-finite value for year {0}")]
    NonFinite(i32),
    #[error("no data rows after the header")]
    EmptyBody,
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("line {line}: missing value for `{column}`")]
    MissingCell { line: u64, column: String },
    #[error("line {line}: `{column}` is not numeric: {text:?}")]
    NonNumeric {
        line: u64,
        column: String,
        text: String,
    },
    #[error("missing series `{0}`")]
    MissingSeries(String),
    #[error("series `{series}` is in {found}, expected {expected}")]
    UnitMismatch {
        series: String,
        found: Unit,
        expected: Unit,
    },
    #[error("{field} = {value} is outside [0, 1)")]
    RateOutOfRange { field: &'static str, value: f64 },
    #[error("series `{series}` covers {found}, but gdp covers {expected}")]
    YearRangeMismatch {
        series: String,
        found: String,
        expected: String,
    },
    #[error("series `{0}` has gaps between years")]
    NonContiguous(String),
    #[error("series `{series}` has non-positive value {value} in {year}")]
    NonPositive {
        series: String,
        year: i32,
        value: f64,
    },
    #[error("series `{series}` has negative value {value} in {year}")]
    Negative {
        series: String,
        year: i32,
        value: f64,
    },
    #[error("peer `{country}`: {reason}")]
    InvalidPeer { country: String, reason: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = IndicatorError> = std::result::Result<T, E>;

/// Unit a series is declared in. Never inferred from magnitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    BillionsUsd,
    Percent,
    ThousandsUsd,
    Fraction,
}

impl Unit {
    pub fn as_str(self) -> &'static str {
        match self {
            Unit::BillionsUsd => "billions_usd",
            Unit::Percent => "percent",
            Unit::ThousandsUsd => "thousands_usd",
            Unit::Fraction => "fraction",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Unit {
    type Err = IndicatorError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "billions_usd" => Ok(Unit::BillionsUsd),
            "percent" => Ok(Unit::Percent),
            "thousands_usd" => Ok(Unit::ThousandsUsd),
            "fraction" => Ok(Unit::Fraction),
            other => Err(IndicatorError::Config(format!("unknown unit `{other}`"))),
        }
    }
}

/// Parses a decimal number, accepting accounting negatives such as `(15.29)`.
///
/// Returns `None` for anything that is not a plain `.`-decimal number;
/// thousands separators are rejected.
pub fn parse_number(text: &str) -> Option<f64> {
    let text = text.trim();
    let (negate, body) = match text.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
        Some(inner) => (true, inner.trim()),
        None => (false, text),
    };
    if body.is_empty() || body.contains(',') {
        return None;
    }
    let value: f64 = body.parse().ok()?;
    Some(if negate { -value } else { value })
}

/// A year-indexed sequence of one economic quantity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndicatorSeries {
    name: String,
    unit: Unit,
    points: Vec<(i32, f64)>,
}

impl IndicatorSeries {
    /// Builds a series, sorting by year and rejecting duplicates,
    /// non-finite values and empty input.
    pub fn new(name: impl Into<String>, unit: Unit, mut points: Vec<(i32, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(IndicatorError::EmptyBody);
        }
        points.sort_by_key(|&(year, _)| year);
        for pair in points.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(IndicatorError::DuplicateYear(pair[0].0));
            }
        }
        if let Some(&(year, _)) = points.iter().find(|(_, v)| !v.is_finite()) {
            return Err(IndicatorError::NonFinite(year));
        }
        Ok(Self {
            name: name.into(),
            unit,
            points,
        })
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn points(&self) -> &[(i32, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        self.points.iter().map(|&(y, _)| y)
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|&(_, v)| v)
    }

    pub fn first_year(&self) -> i32 {
        self.points[0].0
    }

    pub fn last_year(&self) -> i32 {
        self.points[self.points.len() - 1].0
    }

    pub fn last_value(&self) -> f64 {
        self.points[self.points.len() - 1].1
    }

    pub fn value_at(&self, year: i32) -> Option<f64> {
        self.points
            .binary_search_by_key(&year, |&(y, _)| y)
            .ok()
            .map(|i| self.points[i].1)
    }

    pub fn is_contiguous(&self) -> bool {
        self.points.windows(2).all(|p| p[1].0 == p[0].0 + 1)
    }

    /// `first–last` span, used in diagnostics.
    pub fn span(&self) -> String {
        format!("{}-{}", self.first_year(), self.last_year())
    }

    /// Renders the series back to `year,value` CSV. Values use the shortest
    /// representation that round-trips exactly.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("year,value\n");
        for &(year, value) in &self.points {
            out.push_str(&format!("{year},{value}\n"));
        }
        out
    }
}

fn csv_error(err: csv::Error) -> IndicatorError {
    let line = err.position().map(|p| p.line()).unwrap_or(0);
    IndicatorError::MalformedRow {
        line,
        reason: err.to_string(),
    }
}

fn column_index(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| IndicatorError::MissingColumn(name.to_string()))
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

/// Parses a `year,value` CSV into a series with the declared unit.
pub fn parse_series(csv_text: &str, expected_unit: Unit) -> Result<IndicatorSeries> {
    if csv_text.trim().is_empty() {
        return Err(IndicatorError::EmptyBody);
    }
    let mut reader = csv_reader(csv_text);
    let headers = reader.headers().map_err(csv_error)?.clone();
    let year_col = column_index(&headers, "year")?;
    let value_col = column_index(&headers, "value")?;

    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let year_text = record.get(year_col).unwrap_or("");
        let year: i32 = year_text
            .parse()
            .map_err(|_| IndicatorError::MalformedRow {
                line,
                reason: format!("year {year_text:?} is not an integer"),
            })?;
        let value_text = record.get(value_col).unwrap_or("");
        if value_text.is_empty() {
            return Err(IndicatorError::MalformedRow {
                line,
                reason: "empty value".into(),
            });
        }
        let value = parse_number(value_text).ok_or_else(|| IndicatorError::MalformedRow {
            line,
            reason: format!("value {value_text:?} is not a number"),
        })?;
        points.push((year, value));
    }
    IndicatorSeries::new("series", expected_unit, points)
}

/// Names of the five series every economy carries, in canonical order.
pub const ECONOMY_SERIES: [&str; 5] = [
    "gdp",
    "produced_capital",
    "human_capital",
    "natural_capital",
    "net_foreign_assets",
];

/// One country's GDP, rates and wealth components over a common year range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountryEconomy {
    country: String,
    gdp: IndicatorSeries,
    aggregate_tax_rate: f64,
    central_bank_rate: f64,
    produced_capital: IndicatorSeries,
    human_capital: IndicatorSeries,
    natural_capital: IndicatorSeries,
    net_foreign_assets: IndicatorSeries,
}

pub(crate) fn check_unit_rate(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && (0.0..1.0).contains(&value) {
        Ok(())
    } else {
        Err(IndicatorError::RateOutOfRange { field, value })
    }
}

impl CountryEconomy {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        country: impl Into<String>,
        gdp: IndicatorSeries,
        aggregate_tax_rate: f64,
        central_bank_rate: f64,
        produced_capital: IndicatorSeries,
        human_capital: IndicatorSeries,
        natural_capital: IndicatorSeries,
        net_foreign_assets: IndicatorSeries,
    ) -> Result<Self> {
        check_unit_rate("aggregate_tax_rate", aggregate_tax_rate)?;
        check_unit_rate("central_bank_rate", central_bank_rate)?;

        let series = [
            gdp.renamed("gdp"),
            produced_capital.renamed("produced_capital"),
            human_capital.renamed("human_capital"),
            natural_capital.renamed("natural_capital"),
            net_foreign_assets.renamed("net_foreign_assets"),
        ];
        for s in &series {
            if s.unit() != Unit::BillionsUsd {
                return Err(IndicatorError::UnitMismatch {
                    series: s.name().to_string(),
                    found: s.unit(),
                    expected: Unit::BillionsUsd,
                });
            }
        }
        if !series[0].is_contiguous() {
            return Err(IndicatorError::NonContiguous("gdp".into()));
        }
        let gdp_years: Vec<i32> = series[0].years().collect();
        for s in &series[1..] {
            if !s.years().eq(gdp_years.iter().copied()) {
                return Err(IndicatorError::YearRangeMismatch {
                    series: s.name().to_string(),
                    found: s.span(),
                    expected: series[0].span(),
                });
            }
        }
        if let Some(&(year, value)) = series[0].points().iter().find(|(_, v)| *v <= 0.0) {
            return Err(IndicatorError::NonPositive {
                series: "gdp".into(),
                year,
                value,
            });
        }
        // Net foreign assets alone may be negative.
        for s in &series[1..4] {
            if let Some(&(year, value)) = s.points().iter().find(|(_, v)| *v < 0.0) {
                return Err(IndicatorError::Negative {
                    series: s.name().to_string(),
                    year,
                    value,
                });
            }
        }

        let [gdp, produced_capital, human_capital, natural_capital, net_foreign_assets] = series;
        Ok(Self {
            country: country.into(),
            gdp,
            aggregate_tax_rate,
            central_bank_rate,
            produced_capital,
            human_capital,
            natural_capital,
            net_foreign_assets,
        })
    }

    pub fn country(&self) -> &str {
        &self.country
    }

    pub fn gdp(&self) -> &IndicatorSeries {
        &self.gdp
    }

    pub fn aggregate_tax_rate(&self) -> f64 {
        self.aggregate_tax_rate
    }

    pub fn central_bank_rate(&self) -> f64 {
        self.central_bank_rate
    }

    pub fn produced_capital(&self) -> &IndicatorSeries {
        &self.produced_capital
    }

    pub fn human_capital(&self) -> &IndicatorSeries {
        &self.human_capital
    }

    pub fn natural_capital(&self) -> &IndicatorSeries {
        &self.natural_capital
    }

    pub fn net_foreign_assets(&self) -> &IndicatorSeries {
        &self.net_foreign_assets
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        self.gdp.years()
    }

    pub fn base_year(&self) -> i32 {
        self.gdp.last_year()
    }

    pub fn base_gdp(&self) -> f64 {
        self.gdp.last_value()
    }

    /// Copy of this economy with a different central bank rate.
    pub fn with_central_bank_rate(&self, rate: f64) -> Result<Self> {
        check_unit_rate("central_bank_rate", rate)?;
        Ok(Self {
            central_bank_rate: rate,
            ..self.clone()
        })
    }
}

/// A series given either inline as `{"2014": 17.63, ...}` or as a path to
/// a series CSV relative to the configuration file.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum SeriesSource {
    Inline(BTreeMap<String, serde_json::Value>),
    Path(String),
}

impl SeriesSource {
    /// Resolves the source to a series. Files read along the way are pushed
    /// onto `read`.
    pub fn resolve(
        &self,
        name: &str,
        unit: Unit,
        base_dir: Option<&Path>,
        read: &mut Vec<PathBuf>,
    ) -> Result<IndicatorSeries> {
        match self {
            SeriesSource::Inline(map) => {
                let mut points = Vec::with_capacity(map.len());
                for (key, value) in map {
                    let year: i32 = key.trim().parse().map_err(|_| {
                        IndicatorError::Config(format!(
                            "series `{name}`: key {key:?} is not a year"
                        ))
                    })?;
                    let number = match value {
                        serde_json::Value::Number(n) => n.as_f64(),
                        serde_json::Value::String(s) => parse_number(s),
                        _ => None,
                    }
                    .ok_or_else(|| {
                        IndicatorError::Config(format!(
                            "series `{name}`: value for {year} is not a number"
                        ))
                    })?;
                    points.push((year, number));
                }
                IndicatorSeries::new(name, unit, points)
            }
            SeriesSource::Path(rel) => {
                let path = match base_dir {
                    Some(dir) => dir.join(rel),
                    None => PathBuf::from(rel),
                };
                let text = std::fs::read_to_string(&path).map_err(|source| IndicatorError::Io {
                    path: path.clone(),
                    source,
                })?;
                read.push(path);
                Ok(parse_series(&text, unit)?.renamed(name))
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EconomySeriesConfig {
    gdp: Option<SeriesSource>,
    produced_capital: Option<SeriesSource>,
    human_capital: Option<SeriesSource>,
    natural_capital: Option<SeriesSource>,
    net_foreign_assets: Option<SeriesSource>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EconomyConfig {
    country: String,
    aggregate_tax_rate: f64,
    central_bank_rate: f64,
    series: EconomySeriesConfig,
}

/// An economy together with the series files it was assembled from.
#[derive(Debug, Clone)]
pub struct LoadedEconomy {
    pub economy: CountryEconomy,
    pub sources: Vec<PathBuf>,
}

/// Loads an economy from JSON configuration text. Relative series paths
/// resolve against the working directory.
pub fn load_economy(config_text: &str) -> Result<CountryEconomy> {
    load_economy_in(config_text, None).map(|l| l.economy)
}

/// Loads an economy with relative series paths resolved against `base_dir`.
pub fn load_economy_in(config_text: &str, base_dir: Option<&Path>) -> Result<LoadedEconomy> {
    let config: EconomyConfig =
        serde_json::from_str(config_text).map_err(|e| IndicatorError::Config(e.to_string()))?;
    let mut sources = Vec::new();
    let s = &config.series;
    let slots = [
        &s.gdp,
        &s.produced_capital,
        &s.human_capital,
        &s.natural_capital,
        &s.net_foreign_assets,
    ];
    let mut resolved = Vec::with_capacity(5);
    for (name, slot) in ECONOMY_SERIES.iter().zip(slots) {
        let source = slot
            .as_ref()
            .ok_or_else(|| IndicatorError::MissingSeries(name.to_string()))?;
        resolved.push(source.resolve(name, Unit::BillionsUsd, base_dir, &mut sources)?);
    }
    let mut it = resolved.into_iter();
    let mut next = || it.next().expect("five series resolved");
    let economy = CountryEconomy::new(
        config.country,
        next(),
        config.aggregate_tax_rate,
        config.central_bank_rate,
        next(),
        next(),
        next(),
        next(),
    )?;
    Ok(LoadedEconomy { economy, sources })
}

/// Loads an economy configuration file; series paths are relative to it.
pub fn load_economy_file(path: &Path) -> Result<LoadedEconomy> {
    let text = std::fs::read_to_string(path).map_err(|source| IndicatorError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    load_economy_in(&text, path.parent())
}

/// The nine sovereign-rating indicators compared against the peer group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Indicator {
    NominalGdp,
    GdpPerCapita,
    RealGdpGrowth,
    CurrentAccountBalanceGdp,
    GrossExtFinancingNeeds,
    FiscalBalanceGdp,
    DebtGdp,
    NetDebtGdp,
    CpiGrowth,
}

impl Indicator {
    pub const ALL: [Indicator; 9] = [
        Indicator::NominalGdp,
        Indicator::GdpPerCapita,
        Indicator::RealGdpGrowth,
        Indicator::CurrentAccountBalanceGdp,
        Indicator::GrossExtFinancingNeeds,
        Indicator::FiscalBalanceGdp,
        Indicator::DebtGdp,
        Indicator::NetDebtGdp,
        Indicator::CpiGrowth,
    ];

    pub fn column(self) -> &'static str {
        match self {
            Indicator::NominalGdp => "nominal_gdp",
            Indicator::GdpPerCapita => "gdp_per_capita",
            Indicator::RealGdpGrowth => "real_gdp_growth",
            Indicator::CurrentAccountBalanceGdp => "current_account_balance_gdp",
            Indicator::GrossExtFinancingNeeds => "gross_ext_financing_needs",
            Indicator::FiscalBalanceGdp => "fiscal_balance_gdp",
            Indicator::DebtGdp => "debt_gdp",
            Indicator::NetDebtGdp => "net_debt_gdp",
            Indicator::CpiGrowth => "cpi_growth",
        }
    }

    pub fn unit(self) -> Unit {
        match self {
            Indicator::NominalGdp => Unit::BillionsUsd,
            Indicator::GdpPerCapita => Unit::ThousandsUsd,
            _ => Unit::Percent,
        }
    }

    /// Polarity used for gap classification.
    pub fn higher_is_better(self) -> bool {
        matches!(
            self,
            Indicator::NominalGdp
                | Indicator::GdpPerCapita
                | Indicator::RealGdpGrowth
                | Indicator::CurrentAccountBalanceGdp
                | Indicator::FiscalBalanceGdp
        )
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Indicator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.column())
    }
}

impl FromStr for Indicator {
    type Err = IndicatorError;

    fn from_str(s: &str) -> Result<Self> {
        Indicator::ALL
            .into_iter()
            .find(|i| i.column() == s)
            .ok_or_else(|| IndicatorError::Config(format!("unknown indicator `{s}`")))
    }
}

pub const PEER_HEADER: &str = "country,rating,nominal_gdp,gdp_per_capita,real_gdp_growth,current_account_balance_gdp,gross_ext_financing_needs,fiscal_balance_gdp,debt_gdp,net_debt_gdp,cpi_growth";

/// One country's row of the rating-indicator table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeerIndicatorRecord {
    pub country: String,
    pub rating: String,
    values: [f64; 9],
}

impl PeerIndicatorRecord {
    /// `values` is ordered as [`Indicator::ALL`].
    pub fn new(
        country: impl Into<String>,
        rating: impl Into<String>,
        values: [f64; 9],
    ) -> Result<Self> {
        let country = country.into();
        let invalid = |reason: String| IndicatorError::InvalidPeer {
            country: country.clone(),
            reason,
        };
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!("{} is not finite", Indicator::ALL[i])));
        }
        for ind in [Indicator::NominalGdp, Indicator::GdpPerCapita] {
            if values[ind.index()] <= 0.0 {
                return Err(invalid(format!("{ind} must be positive")));
            }
        }
        Ok(Self {
            country,
            rating: rating.into(),
            values,
        })
    }

    pub fn get(&self, indicator: Indicator) -> f64 {
        self.values[indicator.index()]
    }

    pub fn values(&self) -> &[f64; 9] {
        &self.values
    }
}

/// Parses a peer indicator table. Every row must carry all nine indicators.
pub fn parse_peer_table(csv_text: &str) -> Result<Vec<PeerIndicatorRecord>> {
    if csv_text.trim().is_empty() {
        return Err(IndicatorError::EmptyBody);
    }
    let mut reader = csv_reader(csv_text);
    let headers = reader.headers().map_err(csv_error)?.clone();
    let country_col = column_index(&headers, "country")?;
    let rating_col = column_index(&headers, "rating")?;
    let mut indicator_cols = [0usize; 9];
    for ind in Indicator::ALL {
        indicator_cols[ind.index()] = column_index(&headers, ind.column())?;
    }

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let cell = |col: usize, name: &str| -> Result<String> {
            match record.get(col) {
                Some(text) if !text.is_empty() => Ok(text.to_string()),
                _ => Err(IndicatorError::MissingCell {
                    line,
                    column: name.to_string(),
                }),
            }
        };
        let country = cell(country_col, "country")?;
        let rating = cell(rating_col, "rating")?;
        let mut values = [0.0; 9];
        for ind in Indicator::ALL {
            let text = cell(indicator_cols[ind.index()], ind.column())?;
            values[ind.index()] =
                parse_number(&text).ok_or_else(|| IndicatorError::NonNumeric {
                    line,
                    column: ind.column().to_string(),
                    text: text.clone(),
                })?;
        }
        rows.push(PeerIndicatorRecord::new(country, rating, values)?);
    }
    if rows.is_empty() {
        return Err(IndicatorError::EmptyBody);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GEORGIA: &str = include_str!("../fixtures/georgia/economy.json");
    const PEERS: &str = include_str!("../fixtures/georgia/peers.csv");

    #[test]
    fn parses_gdp_rows() {
        let s = parse_series("year,value\n2014,17.63\n2015,14.95", Unit::BillionsUsd).unwrap();
        assert_eq!(s.points(), &[(2014, 17.63), (2015, 14.95)]);
        assert_eq!(s.unit(), Unit::BillionsUsd);
    }

    #[test]
    fn header_only_is_empty_body() {
        let err = parse_series("year,value\n", Unit::Percent).unwrap_err();
        assert!(matches!(err, IndicatorError::EmptyBody), "{err}");
    }

    #[test]
    fn duplicate_year_rejected() {
        let err = parse_series("year,value\n2014,1.0\n2014,2.0", Unit::Percent).unwrap_err();
        assert!(matches!(err, IndicatorError::DuplicateYear(2014)), "{err}");
    }

    #[test]
    fn malformed_row_reports_line() {
        let err = parse_series("year,value\n2014,1.0\n2015,abc\n", Unit::Percent).unwrap_err();
        match err {
            IndicatorError::MalformedRow { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other}"),
        }
        let err = parse_series("year,value\n2014,1.0,9\n", Unit::Percent).unwrap_err();
        assert!(
            matches!(err, IndicatorError::MalformedRow { line: 2, .. }),
            "{err}"
        );
    }

    #[test]
    fn non_finite_rejected() {
        let err = parse_series("year,value\n2014,NaN\n", Unit::Percent).unwrap_err();
        assert!(matches!(err, IndicatorError::NonFinite(2014)), "{err}");
        let err = parse_series("year,value\n2014,inf\n", Unit::Percent).unwrap_err();
        assert!(matches!(err, IndicatorError::NonFinite(2014)), "{err}");
    }

    #[test]
    fn rows_sorted_and_columns_by_name() {
        let s = parse_series("value,year\n2.0,2016\n1.0,2015\n", Unit::Fraction).unwrap();
        assert_eq!(s.points(), &[(2015, 1.0), (2016, 2.0)]);
    }

    #[test]
    fn accounting_negatives() {
        assert_eq!(parse_number("(15.29)"), Some(-15.29));
        assert_eq!(parse_number(" -2.5 "), Some(-2.5));
        assert_eq!(parse_number("3,909"), None);
        assert_eq!(parse_number("()"), None);
        let s = parse_series("year,value\n2014,(15.29)\n", Unit::BillionsUsd).unwrap();
        assert_eq!(s.points(), &[(2014, -15.29)]);
    }

    #[test]
    fn georgia_fixture_loads() {
        let econ = load_economy(GEORGIA).unwrap();
        assert_eq!(econ.country(), "Georgia");
        assert_eq!(
            econ.years().collect::<Vec<_>>(),
            (2014..=2022).collect::<Vec<_>>()
        );
        assert_eq!(econ.aggregate_tax_rate(), 0.122);
        assert_eq!(econ.gdp().value_at(2014), Some(17.63));
        assert_eq!(econ.net_foreign_assets().value_at(2022), Some(-21.62));
    }

    #[test]
    fn rate_out_of_range() {
        let text = GEORGIA.replace(
            "\"central_bank_rate\": 0.08248",
            "\"central_bank_rate\": 1.5",
        );
        let err = load_economy(&text).unwrap_err();
        assert!(
            matches!(
                err,
                IndicatorError::RateOutOfRange {
                    field: "central_bank_rate",
                    ..
                }
            ),
            "{err}"
        );
        let text = GEORGIA.replace(
            "\"aggregate_tax_rate\": 0.122",
            "\"aggregate_tax_rate\": 1.0",
        );
        assert!(matches!(
            load_economy(&text).unwrap_err(),
            IndicatorError::RateOutOfRange {
                field: "aggregate_tax_rate",
                ..
            }
        ));
    }

    #[test]
    fn year_range_mismatch() {
        let mut config: serde_json::Value = serde_json::from_str(GEORGIA).unwrap();
        config["series"]["human_capital"]
            .as_object_mut()
            .unwrap()
            .remove("2022");
        let err = load_economy(&config.to_string()).unwrap_err();
        match err {
            IndicatorError::YearRangeMismatch { series, found, .. } => {
                assert_eq!(series, "human_capital");
                assert_eq!(found, "2014-2021");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn missing_series() {
        let mut config: serde_json::Value = serde_json::from_str(GEORGIA).unwrap();
        config["series"]
            .as_object_mut()
            .unwrap()
            .remove("natural_capital");
        let err = load_economy(&config.to_string()).unwrap_err();
        assert!(matches!(err, IndicatorError::MissingSeries(ref s) if s == "natural_capital"));
    }

    #[test]
    fn gap_in_years_rejected() {
        let mut config: serde_json::Value = serde_json::from_str(GEORGIA).unwrap();
        for name in ECONOMY_SERIES {
            config["series"][name]
                .as_object_mut()
                .unwrap()
                .remove("2018");
        }
        let err = load_economy(&config.to_string()).unwrap_err();
        assert!(matches!(err, IndicatorError::NonContiguous(_)), "{err}");
    }

    #[test]
    fn negative_capital_only_for_nfa() {
        let mut config: serde_json::Value = serde_json::from_str(GEORGIA).unwrap();
        config["series"]["natural_capital"]["2016"] = serde_json::json!(-1.0);
        let err = load_economy(&config.to_string()).unwrap_err();
        assert!(
            matches!(err, IndicatorError::Negative { year: 2016, .. }),
            "{err}"
        );
    }

    #[test]
    fn peer_table_fixture() {
        let peers = parse_peer_table(PEERS).unwrap();
        let names: Vec<_> = peers.iter().map(|p| p.country.as_str()).collect();
        assert_eq!(names, ["Greece", "Hungary", "India", "Kazakhstan"]);
        assert_eq!(peers[2].get(Indicator::NominalGdp), 3909.0);
        assert_eq!(peers[0].get(Indicator::DebtGdp), 150.7);
    }

    #[test]
    fn peer_table_missing_cell() {
        let text = format!("{PEER_HEADER}\nGreece,BBB-,255,24.5,2.4,-5.7,314.1,-0.5,,136.3,2.8\n");
        let err = parse_peer_table(&text).unwrap_err();
        assert!(
            matches!(err, IndicatorError::MissingCell { line: 2, ref column } if column == "debt_gdp"),
            "{err}"
        );
    }

    #[test]
    fn peer_table_missing_column_and_non_numeric() {
        let header = PEER_HEADER.replace(",cpi_growth", "");
        let err = parse_peer_table(&format!("{header}\n")).unwrap_err();
        assert!(matches!(err, IndicatorError::MissingColumn(ref c) if c == "cpi_growth"));

        let text = format!("{PEER_HEADER}\nGreece,BBB-,255,24.5,2.4,-5.7,x,-0.5,150.7,136.3,2.8\n");
        let err = parse_peer_table(&text).unwrap_err();
        assert!(matches!(err, IndicatorError::NonNumeric { .. }), "{err}");
    }

    #[test]
    fn peer_table_single_row() {
        let text =
            format!("{PEER_HEADER}\nGreece,BBB-,255,24.5,2.4,-5.7,314.1,-0.5,150.7,136.3,2.8\n");
        let peers = parse_peer_table(&text).unwrap();
        assert_eq!(peers.len(), 1);
    }

    #[test]
    fn peer_requires_positive_gdp() {
        let text = format!("{PEER_HEADER}\nX,BBB,0,24.5,2.4,-5.7,314.1,-0.5,150.7,136.3,2.8\n");
        assert!(matches!(
            parse_peer_table(&text).unwrap_err(),
            IndicatorError::InvalidPeer { .. }
        ));
    }
}
