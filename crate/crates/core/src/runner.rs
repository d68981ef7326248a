//! Command dispatch: runs a scenario and writes the CSV reports.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::appmodels::{self, OrbitLink};
use crate::astro::{self, areostationary_altitude, GLOBAL_DUST_STORM_INTERVAL_YEARS};
use crate::constellation::{default_ground_stations, load_ground_stations, Constellation, GroundStation};
use crate::coverage::{self, coverage_half_angle, min_equatorial_ring, rtt_ms, slant_range, time_steps, CoverageReport};
use crate::exec::Execution;
use crate::feasibility::{self, LinkReference};
use crate::network::{self, build_plus_grid, handover_timeline, NodeId, TopologySnapshot};
use crate::report::{fmt_num, Table};
use crate::scenario::Scenario;
use crate::{Error, Result, TOOL_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Coverage,
    Rtt,
    Route,
    Handover,
    LinkBudget,
    Mass,
    Apps,
    All,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Coverage,
        Command::Rtt,
        Command::Route,
        Command::Handover,
        Command::LinkBudget,
        Command::Mass,
        Command::Apps,
        Command::All,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Coverage => "coverage",
            Command::Rtt => "rtt",
            Command::Route => "route",
            Command::Handover => "handover",
            Command::LinkBudget => "linkbudget",
            Command::Mass => "mass",
            Command::Apps => "apps",
            Command::All => "all",
        }
    }
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::UnknownCommand(s.to_string()))
    }
}

/// Everything a command needs, resolved once.
struct Context<'a> {
    scenario: &'a Scenario,
    constellation: Constellation,
    stations: Vec<GroundStation>,
    times: Vec<f64>,
    execution: Execution,
}

impl Context<'_> {
    fn header(&self, table: &mut Table, command: Command) {
        table.comment(TOOL_VERSION).comment(format!("command={}", command.name()));
        for (k, v) in self.scenario.effective() {
            table.comment(format!("{k}={v}"));
        }
    }

    fn snapshots(&self) -> Result<Vec<TopologySnapshot>> {
        let w = &self.scenario.walker;
        let topo = build_plus_grid(w.planes, w.sats_per_plane, self.scenario.cross_seam)?;
        network::snapshot_series(
            &self.scenario.body,
            &self.constellation,
            &topo,
            &self.stations,
            &self.times,
            self.execution,
        )
    }

    fn require_pair(&self, command: Command) -> Result<()> {
        if self.stations.len() < 2 {
            return Err(Error::invalid(
                "stations.catalog",
                format!(
                    "`{}` needs at least two ground stations, catalog has {}",
                    command.name(),
                    self.stations.len()
                ),
            ));
        }
        Ok(())
    }

    fn require_any(&self, command: Command) -> Result<()> {
        if self.stations.is_empty() {
            return Err(Error::invalid(
                "stations.catalog",
                format!("`{}` needs at least one ground station", command.name()),
            ));
        }
        Ok(())
    }

    /// Worst-case ground-to-constellation RTT at the minimum elevation.
    fn edge_rtt_ms(&self) -> f64 {
        let sc = self.scenario;
        rtt_ms(slant_range(sc.body.radius_km, sc.walker.altitude_km, sc.min_elevation_deg))
    }
}

pub fn load_stations(scenario: &Scenario) -> Result<Vec<GroundStation>> {
    match &scenario.stations_catalog {
        None => Ok(default_ground_stations()),
        Some(path) => {
            let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
            load_ground_stations(file)
        }
    }
}

/// Runs `command` and writes its CSV files into `output_dir`.
/// Returns the written paths in order.
pub fn run(command: Command, scenario: &Scenario, output_dir: &Path) -> Result<Vec<PathBuf>> {
    run_with(command, scenario, output_dir, Execution::default())
}

pub fn run_with(command: Command, scenario: &Scenario, output_dir: &Path, execution: Execution) -> Result<Vec<PathBuf>> {
    scenario.validate()?;
    let ctx = Context {
        scenario,
        constellation: scenario.constellation()?,
        stations: load_stations(scenario)?,
        times: time_steps(scenario.t0_s, scenario.t1(), scenario.dt_s)?,
        execution,
    };

    let commands: Vec<Command> = if command == Command::All {
        Command::ALL[..7].to_vec()
    } else {
        vec![command]
    };
    // build every table before touching the filesystem
    let mut outputs: Vec<(&str, Table)> = Vec::new();
    let mut snapshots: Option<Vec<TopologySnapshot>> = None;
    for cmd in commands {
        let table = match cmd {
            Command::Coverage => coverage_table(&ctx)?,
            Command::Rtt => rtt_table(&ctx)?,
            Command::Route => {
                ctx.require_pair(cmd)?;
                if snapshots.is_none() {
                    snapshots = Some(ctx.snapshots()?);
                }
                route_table(&ctx, snapshots.as_deref().unwrap_or_default())
            }
            Command::Handover => {
                ctx.require_any(cmd)?;
                handover_table(&ctx)?
            }
            Command::LinkBudget => linkbudget_table(&ctx)?,
            Command::Mass => mass_table(&ctx)?,
            Command::Apps => {
                if snapshots.is_none() && ctx.stations.len() >= 2 {
                    snapshots = Some(ctx.snapshots()?);
                }
                apps_table(&ctx, snapshots.as_deref().unwrap_or_default())?
            }
            Command::All => unreachable!("expanded above"),
        };
        outputs.push((file_name(cmd), table));
    }

    fs::create_dir_all(output_dir).map_err(|e| Error::io(output_dir, e))?;
    let mut written = Vec::new();
    let effective: String = scenario
        .effective()
        .into_iter()
        .map(|(k, v)| format!("{k}={v}\n"))
        .collect();
    let echo = output_dir.join("scenario.effective.txt");
    fs::write(&echo, format!("# {TOOL_VERSION}\n{effective}")).map_err(|e| Error::io(&echo, e))?;
    written.push(echo);
    for (name, table) in outputs {
        let path = output_dir.join(name);
        fs::write(&path, table.render()).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}

pub fn file_name(command: Command) -> &'static str {
    match command {
        Command::Coverage => "coverage.csv",
        Command::Rtt => "rtt.csv",
        Command::Route => "routes.csv",
        Command::Handover => "handover.csv",
        Command::LinkBudget => "linkbudget.csv",
        Command::Mass => "mass.csv",
        Command::Apps => "apps.csv",
        Command::All => "",
    }
}

pub fn coverage_of(scenario: &Scenario, execution: Execution) -> Result<CoverageReport> {
    let mut params = scenario.coverage_params();
    params.execution = execution;
    coverage::coverage_report(&scenario.constellation()?, &scenario.body, &params)
}

fn coverage_table(ctx: &Context) -> Result<Table> {
    let report = coverage_of(ctx.scenario, ctx.execution)?;
    let mut t = Table::new(&["lat_band_deg", "covered_fraction", "max_rtt_ms", "mean_rtt_ms"]);
    ctx.header(&mut t, Command::Coverage);
    t.comment(format!("steps={}", report.steps))
        .comment(format!("grid_points={}", report.grid_points))
        .comment(format!("max_gap_s={}", fmt_num(report.max_gap_s)))
        .comment(format!("never_covered_points={}", report.never_covered_points));
    for b in &report.bands {
        t.row([
            format!("{}:{}", b.lat_min_deg, b.lat_max_deg),
            fmt_num(b.covered_fraction),
            fmt_num(b.max_rtt_ms),
            fmt_num(b.mean_rtt_ms),
        ]);
    }
    t.row([
        "ALL".to_string(),
        fmt_num(report.covered_fraction),
        fmt_num(report.max_rtt_ms),
        fmt_num(report.mean_rtt_ms),
    ]);
    Ok(t)
}

fn quantity_table() -> Table {
    Table::new(&["quantity", "value", "unit"])
}

fn rtt_table(ctx: &Context) -> Result<Table> {
    let sc = ctx.scenario;
    let body = &sc.body;
    let r = body.radius_km;
    let eps = sc.min_elevation_deg;
    let h_sync = areostationary_altitude(body);
    let sync_alpha = coverage_half_angle(r, h_sync, eps);
    let h = sc.walker.altitude_km;
    let alpha = coverage_half_angle(r, h, eps);
    let h_ref = sc.link.target_altitude_km;

    let mut t = quantity_table();
    ctx.header(&mut t, Command::Rtt);
    let mut q = |name: &str, v: f64, unit: &str| {
        t.row([name.to_string(), fmt_num(v), unit.to_string()]);
    };
    q("synchronous_altitude", h_sync, "km");
    q("synchronous_coverage_half_angle", sync_alpha, "deg");
    q("synchronous_equatorial_ring", f64::from(min_equatorial_ring(sync_alpha)?), "satellites");
    q("synchronous_edge_slant_range", slant_range(r, h_sync, eps), "km");
    q("synchronous_edge_rtt", rtt_ms(slant_range(r, h_sync, eps)), "ms");
    q("constellation_altitude", h, "km");
    q("constellation_period", astro::period_at_radius(body, r + h), "s");
    q("constellation_coverage_half_angle", alpha, "deg");
    if alpha > 0.0 {
        q("constellation_equatorial_ring", f64::from(min_equatorial_ring(alpha)?), "satellites");
    }
    q("constellation_edge_slant_range", slant_range(r, h, eps), "km");
    q("constellation_edge_rtt", rtt_ms(slant_range(r, h, eps)), "ms");
    q("constellation_nadir_rtt", rtt_ms(h), "ms");
    q("reference_altitude", h_ref, "km");
    q("reference_edge_slant_range", slant_range(r, h_ref, eps), "km");
    q("reference_edge_rtt", rtt_ms(slant_range(r, h_ref, eps)), "ms");
    Ok(t)
}

fn route_table(ctx: &Context, snapshots: &[TopologySnapshot]) -> Table {
    let mut t = Table::new(&["t_s", "src", "dst", "delay_ms", "hops", "path"]);
    ctx.header(&mut t, Command::Route);
    let n = ctx.stations.len();
    let rows = crate::exec::map_slice(ctx.execution, snapshots, |snap| {
        let mut rows = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                let route = snap.route_between(NodeId::Station(a), NodeId::Station(b));
                let (delay, hops, path) = match route {
                    Some(r) => (
                        fmt_num(r.delay_ms),
                        r.hops().to_string(),
                        r.nodes.iter().map(|&i| snap.label(i)).collect::<Vec<_>>().join(">"),
                    ),
                    None => ("unreachable".to_string(), String::new(), String::new()),
                };
                rows.push([
                    fmt_num(snap.time_s),
                    ctx.stations[a].name.clone(),
                    ctx.stations[b].name.clone(),
                    delay,
                    hops,
                    path,
                ]);
            }
        }
        rows
    });
    for r in rows.into_iter().flatten() {
        t.row(r);
    }
    t
}

fn handover_table(ctx: &Context) -> Result<Table> {
    let sc = ctx.scenario;
    let mut t = Table::new(&["t_start_s", "t_end_s", "station", "satellite"]);
    ctx.header(&mut t, Command::Handover);
    for station in &ctx.stations {
        let timeline = handover_timeline(
            &sc.body,
            &ctx.constellation,
            station,
            sc.t0_s,
            sc.t1(),
            sc.dt_s,
            sc.handover_policy,
            ctx.execution,
        )?;
        t.comment(format!("{}: handovers={}", station.name, network::handover_count(&timeline)));
        for iv in timeline {
            t.row([
                fmt_num(iv.t_start_s),
                fmt_num(iv.t_end_s),
                station.name.clone(),
                iv.satellite
                    .map_or_else(|| "none".to_string(), |i| ctx.constellation.satellites()[i].label()),
            ]);
        }
    }
    Ok(t)
}

fn linkbudget_table(ctx: &Context) -> Result<Table> {
    let sc = ctx.scenario;
    let r = sc.body.radius_km;
    let mode = sc.link.distance_mode;
    let ref_distance = mode.distance_km(r, sc.ref_altitude_km(), sc.min_elevation_deg);
    let target_distance = mode.distance_km(r, sc.link.target_altitude_km, sc.min_elevation_deg);
    let reference = LinkReference::new(sc.link.ref_power_w, sc.link.ref_rate_bps, ref_distance)?;
    let power = feasibility::scale_power(&reference, target_distance);
    let factor = feasibility::attenuation_factor(sc.link.dust_attenuation_db);

    let mut t = quantity_table();
    ctx.header(&mut t, Command::LinkBudget);
    let mut q = |name: &str, v: f64, unit: &str| {
        t.row([name.to_string(), fmt_num(v), unit.to_string()]);
    };
    q("reference_altitude", sc.ref_altitude_km(), "km");
    q("reference_distance", ref_distance, "km");
    q("reference_power", sc.link.ref_power_w, "W");
    q("reference_rate", sc.link.ref_rate_bps, "bit/s");
    q("target_altitude", sc.link.target_altitude_km, "km");
    q("target_distance", target_distance, "km");
    q("target_power", power, "W");
    q("power_reduction", sc.link.ref_power_w / power, "ratio");
    q("dust_attenuation", sc.link.dust_attenuation_db, "dB");
    q("dust_received_power_factor", factor, "ratio");
    q("target_power_with_dust_margin", power / factor, "W");
    q("global_dust_storm_interval", GLOBAL_DUST_STORM_INTERVAL_YEARS, "earth_years");
    Ok(t)
}

fn mass_table(ctx: &Context) -> Result<Table> {
    let sc = ctx.scenario;
    let (total, ratio) = feasibility::mass_overhead(&sc.mass)?;
    let processors = ctx.constellation.len() as f64;
    let mut t = quantity_table();
    ctx.header(&mut t, Command::Mass);
    let mut q = |name: &str, v: f64, unit: &str| {
        t.row([name.to_string(), fmt_num(v), unit.to_string()]);
    };
    q("payload", sc.mass.payload_kg, "kg");
    for (name, m) in &sc.mass.edl_components {
        q(name, *m, "kg");
    }
    q("edl_total", total, "kg");
    q("edl_overhead_ratio", ratio, "ratio");
    q("edl_overhead", 100.0 * ratio, "%");
    q("soft_error_rate", sc.soft_error_rate_per_day, "1/processor/day");
    q("processors", processors, "count");
    q("mission_days", sc.soft_error_days, "days");
    q(
        "expected_soft_errors",
        feasibility::expected_soft_errors(sc.soft_error_rate_per_day, processors, sc.soft_error_days),
        "count",
    );
    Ok(t)
}

fn apps_table(ctx: &Context, snapshots: &[TopologySnapshot]) -> Result<Table> {
    let sc = ctx.scenario;
    let app = &sc.apps;
    let orbit = OrbitLink {
        rtt_ms: app.orbit_rtt_ms.unwrap_or_else(|| ctx.edge_rtt_ms()),
        bandwidth_bps: app.orbit_bandwidth_bps,
    };
    orbit.validate()?;
    let sync_rtt = rtt_ms(slant_range(sc.body.radius_km, areostationary_altitude(&sc.body), sc.min_elevation_deg));
    let sync = OrbitLink {
        rtt_ms: sync_rtt,
        ..orbit
    };
    let bw_note = format!(
        "orbit bandwidth {} bit/s assumed; orbit rtt {} ms",
        fmt_num(orbit.bandwidth_bps),
        fmt_num(orbit.rtt_ms)
    );

    let mut t = Table::new(&["scenario", "quantity", "value", "unit", "assumptions"]);
    ctx.header(&mut t, Command::Apps);
    let mut q = |scenario: &str, name: &str, v: String, unit: &str, note: &str| {
        t.row([scenario.to_string(), name.to_string(), v, unit.to_string(), note.to_string()]);
    };

    let offload_note = format!(
        "{} bit payload at {} bit/s; {} s execution",
        fmt_num(app.payload_bits),
        fmt_num(app.uplink_bps),
        fmt_num(app.exec_time_s)
    );
    q(
        "offload",
        "latency_constellation",
        fmt_num(appmodels::offload_latency(app.payload_bits, app.uplink_bps, app.exec_time_s, &orbit)),
        "s",
        &offload_note,
    );
    q(
        "offload",
        "latency_synchronous",
        fmt_num(appmodels::offload_latency(app.payload_bits, app.uplink_bps, app.exec_time_s, &sync)),
        "s",
        &format!("{offload_note}; synchronous-orbit rtt {} ms", fmt_num(sync_rtt)),
    );

    let mut delays = Vec::new();
    let mut unreachable = 0usize;
    let n = ctx.stations.len();
    for snap in snapshots {
        for a in 0..n {
            for b in a + 1..n {
                match appmodels::collaboration_latency(snap, a, b) {
                    Some(d) => delays.push(d + app.service_time_ms),
                    None => unreachable += 1,
                }
            }
        }
    }
    let collab_note = format!(
        "all station pairs over the window; one-way; service time {} ms",
        fmt_num(app.service_time_ms)
    );
    if let Some((min, median, max)) = appmodels::summary(&delays) {
        q("collaboration", "one_way_min", fmt_num(min), "ms", &collab_note);
        q("collaboration", "one_way_median", fmt_num(median), "ms", &collab_note);
        q("collaboration", "one_way_max", fmt_num(max), "ms", &collab_note);
    }
    let total = delays.len() + unreachable;
    if total > 0 {
        q(
            "collaboration",
            "unreachable_fraction",
            fmt_num(unreachable as f64 / total as f64),
            "ratio",
            &collab_note,
        );
    }

    let cache_note = format!(
        "{} bit object; earth rtt {} s at {} bit/s; {bw_note}",
        fmt_num(app.object_bits),
        fmt_num(app.earth.rtt_s),
        fmt_num(app.earth.bandwidth_bps)
    );
    q(
        "cache",
        "fetch_hit",
        fmt_num(appmodels::cache_fetch_latency(app.object_bits, true, &app.earth, &orbit)),
        "s",
        &cache_note,
    );
    q(
        "cache",
        "fetch_miss",
        fmt_num(appmodels::cache_fetch_latency(app.object_bits, false, &app.earth, &orbit)),
        "s",
        &cache_note,
    );

    let pre = appmodels::preprocess_uplink_rate(app.raw_bps, app.retention_fraction, &app.earth)?;
    let pre_note = format!(
        "{} bit/s raw; retention {}; earth link {} bit/s",
        fmt_num(app.raw_bps),
        fmt_num(app.retention_fraction),
        fmt_num(app.earth.bandwidth_bps)
    );
    q("preprocess", "uplink_rate", fmt_num(pre.rate_bps), "bit/s", &pre_note);
    q("preprocess", "fits_earth_link", pre.fits.to_string(), "bool", &pre_note);
    Ok(t)
}
