//! Subcommands as library functions. Each reads its inputs, runs the
//! pipeline stage and returns a [`ReportDocument`]; the binary only parses
//! flags and chooses a rendering.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::eva::{eva_series, implied_cbr, EvaSeries};
use crate::indicators::{
    load_economy_file, parse_peer_table, parse_series, CountryEconomy, Indicator, IndicatorError,
    PeerIndicatorRecord, Unit,
};
use crate::projection::{
    cumulative_pv, load_projection_file, present_value, project_eva, project_gdp, project_rd_share,
    ProjectionConfig,
};
use crate::ratinggap::{
    load_gap_config, rating_gap_report, EvaStream, ExclusionRule, RatingGapError, RatingGapReport,
    YearsToClose,
};
use crate::regression::{estimate_elasticity, RegressionError};
use crate::report::{format_fixed, inputs_digest, Cell, ReportDocument, Section};

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input files or configuration.
    #[error("{0}")]
    Input(String),
    /// Inputs are valid but the analysis cannot be completed.
    #[error("{0}")]
    Infeasible(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Infeasible(_) => 3,
        }
    }
}

impl From<IndicatorError> for CliError {
    fn from(e: IndicatorError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<RegressionError> for CliError {
    fn from(e: RegressionError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<crate::eva::EvaError> for CliError {
    fn from(e: crate::eva::EvaError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<crate::projection::ProjectionError> for CliError {
    fn from(e: crate::projection::ProjectionError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<RatingGapError> for CliError {
    fn from(e: RatingGapError) -> Self {
        match e {
            RatingGapError::EmptyInclusion(_) | RatingGapError::NoPeers => {
                CliError::Infeasible(e.to_string())
            }
            other => CliError::Input(other.to_string()),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

/// Bytes of every file a command read, in reading order.
#[derive(Debug, Default)]
struct Inputs {
    contents: Vec<Vec<u8>>,
}

impl Inputs {
    fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        let text = String::from_utf8(bytes.clone())
            .map_err(|_| CliError::Input(format!("{} is not UTF-8", path.display())))?;
        self.contents.push(bytes);
        Ok(text)
    }

    fn read_all(&mut self, paths: &[PathBuf]) -> Result<()> {
        for p in paths {
            self.read(p)?;
        }
        Ok(())
    }

    fn digest(&self) -> String {
        inputs_digest(self.contents.iter().map(Vec::as_slice))
    }
}

fn load_economy_input(inputs: &mut Inputs, path: &Path) -> Result<CountryEconomy> {
    inputs.read(path)?;
    let loaded = load_economy_file(path)?;
    inputs.read_all(&loaded.sources)?;
    Ok(loaded.economy)
}

fn load_projection_input(inputs: &mut Inputs, path: &Path) -> Result<ProjectionConfig> {
    inputs.read(path)?;
    let loaded = load_projection_file(path)?;
    inputs.read_all(&loaded.sources)?;
    Ok(loaded.config)
}

fn prefixed(prefix: &str, path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("{prefix} {}: {e}", path.display()))
}

// ---------------------------------------------------------------------------
// regress

#[derive(Debug, Clone)]
pub struct RegressArgs {
    pub rd: PathBuf,
    pub gdp: PathBuf,
}

fn regress_sections(inputs: &mut Inputs, args: &RegressArgs) -> Result<Vec<Section>> {
    let rd_text = inputs.read(&args.rd)?;
    let gdp_text = inputs.read(&args.gdp)?;
    let rd = parse_series(&rd_text, Unit::BillionsUsd)
        .map_err(|e| prefixed("rd series", &args.rd, e))?
        .renamed("rd");
    let gdp = parse_series(&gdp_text, Unit::BillionsUsd)
        .map_err(|e| prefixed("gdp series", &args.gdp, e))?
        .renamed("gdp");
    let res = estimate_elasticity(&rd, &gdp)?;
    Ok(vec![Section::entries(
        "Log-log regression of GDP on R&D",
        vec![
            ("n".into(), Cell::Int(res.n as i64)),
            ("years".into(), Cell::text(rd.span())),
            ("slope (elasticity)".into(), Cell::Coef(res.slope)),
            ("intercept".into(), Cell::Coef(res.intercept)),
            ("r".into(), Cell::Rate(res.pearson_r)),
            ("r_squared".into(), Cell::Rate(res.r_squared)),
            ("t".into(), Cell::Coef(res.t_statistic)),
            ("df".into(), Cell::Int(res.n as i64 - 2)),
            ("p".into(), Cell::Prob(res.p_value)),
            (
                "gdp change per 10% R&D rise (%)".into(),
                Cell::Rate(res.slope * 10.0),
            ),
        ],
    )])
}

pub fn cmd_regress(args: &RegressArgs) -> Result<ReportDocument> {
    let mut inputs = Inputs::default();
    let sections = regress_sections(&mut inputs, args)?;
    let mut doc = ReportDocument::new("regress", inputs.digest());
    doc.sections = sections;
    Ok(doc)
}

// ---------------------------------------------------------------------------
// eva

#[derive(Debug, Clone)]
pub struct EvaArgs {
    pub economy: PathBuf,
}

fn year_columns(first: &str, years: impl Iterator<Item = i32>) -> Vec<String> {
    std::iter::once(first.to_string())
        .chain(years.map(|y| y.to_string()))
        .collect()
}

fn row(label: &str, cells: impl Iterator<Item = Cell>) -> Vec<Cell> {
    std::iter::once(Cell::text(label)).chain(cells).collect()
}

fn summary_section(title: &str, series: &EvaSeries, period: &str) -> Section {
    let s = series.summary();
    Section::entries(
        title,
        vec![
            ("mean EVA".into(), Cell::Money(s.mean)),
            ("min EVA".into(), Cell::Money(s.min)),
            (format!("min {period}"), Cell::Int(s.min_year.into())),
            ("max EVA".into(), Cell::Money(s.max)),
            (format!("max {period}"), Cell::Int(s.max_year.into())),
            (
                "summary".into(),
                Cell::text(format!(
                    "mean {}, min {} ({}), max {} ({})",
                    format_fixed(s.mean, 2),
                    format_fixed(s.min, 2),
                    s.min_year,
                    format_fixed(s.max, 2),
                    s.max_year
                )),
            ),
        ],
    )
}

fn eva_sections(econ: &CountryEconomy) -> Result<Vec<Section>> {
    let series = eva_series(econ)?;
    let recs = series.records();
    let n = recs.len();
    let atr = econ.aggregate_tax_rate();
    let cbr = econ.central_bank_rate();
    let implied = recs
        .iter()
        .map(|r| implied_cbr(r.gdp, atr, r.total_wealth, r.eva).map(Cell::Rate))
        .collect::<Result<Vec<_>, _>>();
    let mut rows = vec![
        row("GDP", recs.iter().map(|r| Cell::Money(r.gdp))),
        row(
            "Aggregate tax rate",
            std::iter::repeat_n(Cell::Rate(atr), n),
        ),
        row("NOPAT", recs.iter().map(|r| Cell::Money(r.nopat))),
        row("Central bank rate", std::iter::repeat_n(Cell::Rate(cbr), n)),
        row(
            "Produced capital",
            econ.produced_capital().values().map(Cell::Money),
        ),
        row(
            "Human capital",
            econ.human_capital().values().map(Cell::Money),
        ),
        row(
            "Natural capital",
            econ.natural_capital().values().map(Cell::Money),
        ),
        row(
            "Net foreign assets",
            econ.net_foreign_assets().values().map(Cell::Money),
        ),
        row(
            "Total wealth",
            recs.iter().map(|r| Cell::Money(r.total_wealth)),
        ),
        row(
            "Capital charge",
            recs.iter().map(|r| Cell::Money(r.capital_charge)),
        ),
        row("EVA", recs.iter().map(|r| Cell::Money(r.eva))),
    ];
    if let Ok(implied) = implied {
        // Sanity row: recovers the configured rate from each year's EVA.
        rows.push(row("Implied central bank rate", implied.into_iter()));
    }
    Ok(vec![
        Section::table(
            format!("EVA of {} (billions USD)", econ.country()),
            year_columns("item", econ.years()),
            rows,
        ),
        summary_section("EVA summary", &series, "year"),
    ])
}

pub fn cmd_eva(args: &EvaArgs) -> Result<ReportDocument> {
    let mut inputs = Inputs::default();
    let econ = load_economy_input(&mut inputs, &args.economy)?;
    let mut doc = ReportDocument::new("eva", inputs.digest());
    doc.sections = eva_sections(&econ)?;
    Ok(doc)
}

// ---------------------------------------------------------------------------
// project

#[derive(Debug, Clone)]
pub struct ProjectArgs {
    pub economy: PathBuf,
    pub projection: PathBuf,
}

struct ProjectionRun {
    sections: Vec<Section>,
    warnings: Vec<String>,
    eva: Vec<f64>,
    discount_rate: f64,
}

fn projection_run(econ: &CountryEconomy, cfg: &ProjectionConfig) -> Result<ProjectionRun> {
    let mut warnings = Vec::new();
    let series = project_eva(econ, cfg)?;
    let recs = series.records();
    let n = recs.len();
    let base_gdp = econ.base_gdp();
    let gdp = project_gdp(base_gdp, cfg)?;
    let share = project_rd_share(cfg, base_gdp, &gdp)?;
    let rate = cfg.discount_rate_for(econ);
    if cfg.configured_discount_rate().is_none() {
        warnings.push(format!(
            "discount rate defaults to the central bank rate {}",
            format_fixed(rate, 5)
        ));
    }
    if let Some(target) = cfg.ai_share_target() {
        warnings.push(format!(
            "ai_share_target {} is recorded as an annotation and enters no calculation",
            format_fixed(target, 4)
        ));
    }
    let eva = series.eva_values();
    let pv = present_value(&eva, rate)?;
    let cumulative = cumulative_pv(&eva, rate)?;

    let grid = Section::table(
        format!(
            "Projected EVA of {} (billions USD, offsets from {})",
            econ.country(),
            cfg.base_year()
        ),
        year_columns("item", 1..=n as i32),
        vec![
            row("GDP", recs.iter().map(|r| Cell::Money(r.gdp))),
            row(
                "Aggregate tax rate",
                std::iter::repeat_n(Cell::Rate(econ.aggregate_tax_rate()), n),
            ),
            row("NOPAT", recs.iter().map(|r| Cell::Money(r.nopat))),
            row(
                "Central bank rate",
                std::iter::repeat_n(Cell::Rate(econ.central_bank_rate()), n),
            ),
            row(
                "Total wealth",
                recs.iter().map(|r| Cell::Money(r.total_wealth)),
            ),
            row(
                "Capital charge",
                recs.iter().map(|r| Cell::Money(r.capital_charge)),
            ),
            row("EVA", recs.iter().map(|r| Cell::Money(r.eva))),
            row(
                "Cumulative PV of EVA",
                cumulative.iter().map(|&v| Cell::Money(v)),
            ),
        ],
    );
    let share_table = Section::table(
        "R&D share of GDP",
        year_columns("item", 0..=n as i32),
        vec![row(
            "R&D share",
            std::iter::once(Cell::Rate(cfg.base_rd_share())).chain(share.values().map(Cell::Rate)),
        )],
    );
    let scenario = Section::entries(
        "Scenario",
        vec![
            ("base year".into(), Cell::Int(cfg.base_year().into())),
            ("base GDP".into(), Cell::Money(base_gdp)),
            ("horizon".into(), Cell::Int(cfg.horizon().into())),
            ("R&D growth".into(), Cell::Rate(cfg.rd_growth())),
            ("elasticity".into(), Cell::Coef(cfg.elasticity())),
            (
                "GDP growth per year".into(),
                Cell::Rate(cfg.gdp_growth_factor() - 1.0),
            ),
            (
                "AI share target (annotation)".into(),
                cfg.ai_share_target().map_or(Cell::Empty, Cell::Rate),
            ),
        ],
    );
    let pv_section = Section::entries(
        "Present value",
        vec![
            ("discount rate".into(), Cell::Rate(rate)),
            (
                format!("PV(EVA, {})", format_fixed(rate, 4)),
                Cell::Money(pv),
            ),
        ],
    );
    Ok(ProjectionRun {
        sections: vec![
            scenario,
            grid,
            summary_section("Projected EVA summary", &series, "offset"),
            share_table,
            pv_section,
        ],
        warnings,
        eva,
        discount_rate: rate,
    })
}

pub fn cmd_project(args: &ProjectArgs) -> Result<ReportDocument> {
    let mut inputs = Inputs::default();
    let econ = load_economy_input(&mut inputs, &args.economy)?;
    let cfg = load_projection_input(&mut inputs, &args.projection)?;
    let run = projection_run(&econ, &cfg)?;
    let mut doc = ReportDocument::new("project", inputs.digest());
    doc.sections = run.sections;
    doc.warnings = run.warnings;
    Ok(doc)
}

// ---------------------------------------------------------------------------
// rating-gap

#[derive(Debug, Clone)]
pub struct RatingGapArgs {
    pub subject: PathBuf,
    pub peers: PathBuf,
    pub gap_config: PathBuf,
    pub economy: Option<PathBuf>,
    pub projection: Option<PathBuf>,
    pub strict: bool,
}

fn indicator_cell(indicator: Indicator, value: f64) -> Cell {
    match indicator.unit() {
        Unit::BillionsUsd => Cell::Money(value),
        _ => Cell::Rate(value),
    }
}

fn rating_gap_sections(
    report: &RatingGapReport,
    peers: &[PeerIndicatorRecord],
    cfg_rules: &crate::ratinggap::ExclusionRules,
    discount_rate: Option<f64>,
    warnings: &mut Vec<String>,
) -> Vec<Section> {
    let mut columns = vec!["indicator".to_string()];
    columns.extend(peers.iter().map(|p| p.country.clone()));
    columns.push("peer average".into());
    columns.push("excluded".into());
    let peer_rows = report
        .aggregate
        .entries()
        .iter()
        .map(|e| {
            let mut r = vec![Cell::text(e.indicator.column())];
            r.extend(
                peers
                    .iter()
                    .map(|p| indicator_cell(e.indicator, p.get(e.indicator))),
            );
            r.push(indicator_cell(e.indicator, e.average));
            r.push(Cell::text(e.excluded.join(" ")));
            r
        })
        .collect();

    for e in report.aggregate.entries() {
        if !e.excluded.is_empty() {
            let how = match cfg_rules.get(e.indicator) {
                Some(ExclusionRule::Outlier { .. }) => "outlier rule",
                _ => "mask",
            };
            warnings.push(format!(
                "{}: excluded {} from the peer average ({how})",
                e.indicator,
                e.excluded.join(", ")
            ));
        }
    }

    let gap_rows = report
        .gaps
        .iter()
        .map(|g| {
            vec![
                Cell::text(g.indicator.column()),
                indicator_cell(g.indicator, g.subject_value),
                indicator_cell(g.indicator, g.peer_average),
                Cell::text(if g.higher_is_better {
                    "higher"
                } else {
                    "lower"
                }),
                Cell::text(g.direction.as_str()),
            ]
        })
        .collect();

    let mut components: Vec<(String, Cell)> = report
        .investment_components
        .iter()
        .map(|c| (c.name.clone(), Cell::Money(c.amount)))
        .collect();
    components.push((
        "total required investment".into(),
        Cell::Money(report.total_required_investment),
    ));

    let mut sections = vec![
        Section::table("Peer indicators", columns, peer_rows),
        Section::table(
            format!("{} against the peer average", report.subject_country),
            vec![
                "indicator".into(),
                report.subject_country.clone(),
                "peer average".into(),
                "better when".into(),
                "direction".into(),
            ],
            gap_rows,
        ),
        Section::entries("Required investment (billions USD)", components),
    ];
    if !report.informational.is_empty() {
        sections.push(Section::entries(
            "Informational requirements (not in total)",
            report
                .informational
                .iter()
                .map(|i| (i.name.clone(), Cell::Money(i.amount)))
                .collect(),
        ));
    }
    if let (Some(ytc), Some(rate)) = (report.years_to_close, discount_rate) {
        let value = match ytc {
            YearsToClose::Years(k) => Cell::Int(k.into()),
            YearsToClose::Unreachable => Cell::text("unreachable within horizon"),
        };
        sections.push(Section::entries(
            "Years to close",
            vec![
                ("discount rate".into(), Cell::Rate(rate)),
                (
                    "required".into(),
                    Cell::Money(report.total_required_investment),
                ),
                ("years to close".into(), value),
            ],
        ));
    }
    sections
}

struct GapRun {
    sections: Vec<Section>,
    warnings: Vec<String>,
}

fn rating_gap_run(
    inputs: &mut Inputs,
    args: &RatingGapArgs,
    projection: Option<&ProjectionRun>,
) -> Result<GapRun> {
    let subject_text = inputs.read(&args.subject)?;
    let peers_text = inputs.read(&args.peers)?;
    let gap_text = inputs.read(&args.gap_config)?;
    let mut subjects =
        parse_peer_table(&subject_text).map_err(|e| prefixed("subject", &args.subject, e))?;
    if subjects.len() != 1 {
        return Err(CliError::Input(format!(
            "subject {} must hold exactly one row, found {}",
            args.subject.display(),
            subjects.len()
        )));
    }
    let subject = subjects.remove(0);
    let peers = parse_peer_table(&peers_text).map_err(|e| prefixed("peers", &args.peers, e))?;
    let cfg =
        load_gap_config(&gap_text).map_err(|e| prefixed("gap config", &args.gap_config, e))?;

    let stream = projection.map(|p| EvaStream {
        values: &p.eva,
        discount_rate: p.discount_rate,
    });
    let report = rating_gap_report(&subject, &peers, &cfg, stream)?;
    let mut warnings = Vec::new();
    if report.years_to_close == Some(YearsToClose::Unreachable) {
        let msg = format!(
            "cumulative discounted EVA never covers the required {} within the horizon",
            format_fixed(report.total_required_investment, 2)
        );
        if args.strict {
            return Err(CliError::Infeasible(msg));
        }
        warnings.push(msg);
    }
    let sections = rating_gap_sections(
        &report,
        &peers,
        &cfg.exclusions,
        projection.map(|p| p.discount_rate),
        &mut warnings,
    );
    Ok(GapRun { sections, warnings })
}

fn optional_projection(
    inputs: &mut Inputs,
    economy: Option<&PathBuf>,
    projection: Option<&PathBuf>,
) -> Result<Option<(CountryEconomy, ProjectionConfig)>> {
    match (economy, projection) {
        (Some(e), Some(p)) => {
            let econ = load_economy_input(inputs, e)?;
            let cfg = load_projection_input(inputs, p)?;
            Ok(Some((econ, cfg)))
        }
        (None, None) => Ok(None),
        _ => Err(CliError::Input(
            "--economy and --projection must be given together".into(),
        )),
    }
}

pub fn cmd_rating_gap(args: &RatingGapArgs) -> Result<ReportDocument> {
    let mut inputs = Inputs::default();
    let projected =
        optional_projection(&mut inputs, args.economy.as_ref(), args.projection.as_ref())?;
    let run = projected
        .as_ref()
        .map(|(econ, cfg)| projection_run(econ, cfg))
        .transpose()?;
    let gap = rating_gap_run(&mut inputs, args, run.as_ref())?;
    let mut doc = ReportDocument::new("rating-gap", inputs.digest());
    doc.sections = gap.sections;
    doc.warnings = gap.warnings;
    Ok(doc)
}

// ---------------------------------------------------------------------------
// report

#[derive(Debug, Clone)]
pub struct ReportArgs {
    pub economy: PathBuf,
    pub projection: PathBuf,
    pub subject: PathBuf,
    pub peers: PathBuf,
    pub gap_config: PathBuf,
    pub regress: Option<RegressArgs>,
    pub strict: bool,
}

/// Runs every stage and concatenates their sections.
pub fn cmd_report(args: &ReportArgs) -> Result<ReportDocument> {
    let mut inputs = Inputs::default();
    let mut sections = Vec::new();
    let mut warnings = Vec::new();
    if let Some(regress) = &args.regress {
        sections.extend(regress_sections(&mut inputs, regress)?);
    } else {
        warnings.push("no --rd/--gdp given; regression stage skipped".into());
    }
    let econ = load_economy_input(&mut inputs, &args.economy)?;
    let cfg = load_projection_input(&mut inputs, &args.projection)?;
    sections.extend(eva_sections(&econ)?);
    let run = projection_run(&econ, &cfg)?;
    let gap_args = RatingGapArgs {
        subject: args.subject.clone(),
        peers: args.peers.clone(),
        gap_config: args.gap_config.clone(),
        economy: None,
        projection: None,
        strict: args.strict,
    };
    let gap = rating_gap_run(&mut inputs, &gap_args, Some(&run))?;
    sections.extend(run.sections);
    warnings.extend(run.warnings);
    sections.extend(gap.sections);
    warnings.extend(gap.warnings);

    let mut doc = ReportDocument::new("report", inputs.digest());
    doc.sections = sections;
    doc.warnings = warnings;
    Ok(doc)
}
