//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::fs;
use std::path::Path;
use std::process::Command as Process;

use marsnet_core::appmodels::{cache_fetch_latency, EarthLink, OrbitLink};
use marsnet_core::astro::{self, areostationary_altitude, orbital_period, BodyParameters, CircularOrbit, Vec3};
use marsnet_core::constellation::{generate_walker, WalkerConfig};
use marsnet_core::coverage::{
    coverage_half_angle, coverage_report, elevation, min_equatorial_ring, rtt_ms, slant_range, CoverageParams,
};
use marsnet_core::feasibility::{
    attenuation_factor, expected_soft_errors, mass_overhead, scale_power, LinkReference, MassBudget,
};
use marsnet_core::network::{build_plus_grid, shortest_path, Graph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Frozen regression value of the default constellation's covered fraction
/// (one period, dt = 10 s, 2° grid, 25° elevation).
const FROZEN_COVERED_FRACTION: f64 = 0.999_954_674_749_081_2;

type Check = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn mars() -> BodyParameters {
    BodyParameters::mars()
}

fn c01_synchronous_altitude() -> Outcome {
    let h = areostationary_altitude(&mars());
    outcome((16_989.0..=17_089.0).contains(&h), format!("altitude {h:.3} km"))
}

fn c02_coverage_latitude() -> Outcome {
    let body = mars();
    let alpha = coverage_half_angle(body.radius_km, areostationary_altitude(&body), 25.0);
    outcome((alpha - 56.3).abs() <= 0.1, format!("half-angle {alpha:.4} deg"))
}

fn c03_equatorial_ring() -> Outcome {
    let body = mars();
    let alpha = coverage_half_angle(body.radius_km, areostationary_altitude(&body), 25.0);
    match min_equatorial_ring(alpha) {
        Ok(n) => outcome(n == 4, format!("{n} satellites")),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn c04_rtt_anchors() -> Outcome {
    let body = mars();
    let r = body.radius_km;
    let sync = rtt_ms(slant_range(r, areostationary_altitude(&body), 25.0));
    let leo = rtt_ms(slant_range(r, 1_120.0, 25.0));
    let km1000 = rtt_ms(slant_range(r, 1_000.0, 25.0));
    let pass = (sync - 125.0).abs() <= 1.0 && (leo - 12.5).abs() <= 0.1 && (km1000 - 11.4).abs() <= 0.2;
    outcome(
        pass,
        format!(
            "synchronous {sync:.3} ms, 1120 km {leo:.3} ms, 1000 km {km1000:.3} ms (geometric; commonly rounded to 12 ms)"
        ),
    )
}

fn c05_constellation() -> Outcome {
    let body = mars();
    let c = match generate_walker(&WalkerConfig::default()) {
        Ok(c) => c,
        Err(e) => return outcome(false, e.to_string()),
    };
    let planes = c.satellites().iter().map(|s| s.plane).max().map_or(0, |p| p + 1);
    let period = orbital_period(&body, &c.satellites()[0].orbit);
    let report = match coverage_report(&c, &body, &CoverageParams::with_window(period)) {
        Ok(r) => r,
        Err(e) => return outcome(false, e.to_string()),
    };
    let pass = c.len() == 81
        && planes == 9
        && report.max_rtt_ms <= 12.5
        && (report.covered_fraction - FROZEN_COVERED_FRACTION).abs() < 1e-12;
    outcome(
        pass,
        format!(
            "{} satellites in {planes} planes; max rtt {:.4} ms; covered_fraction {:.10} (frozen {FROZEN_COVERED_FRACTION}); longest gap {} s",
            c.len(),
            report.max_rtt_ms,
            report.covered_fraction,
            report.max_gap_s
        ),
    )
}

fn c06_power_scaling() -> Outcome {
    let body = mars();
    let r = body.radius_km;
    let reference = LinkReference::new(10.0, 1_000.0, slant_range(r, areostationary_altitude(&body), 25.0)).unwrap();
    let p = scale_power(&reference, slant_range(r, 1_000.0, 25.0));
    outcome((0.03..=0.13).contains(&p), format!("{p:.4} W"))
}

fn c07_mass_overhead() -> Outcome {
    match mass_overhead(&MassBudget::mars_2020()) {
        Ok((total, ratio)) => outcome(total == 2_085.0 && ratio > 2.0, format!("{total} kg, ratio {ratio:.4}")),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn c08_attenuation() -> Outcome {
    let f = attenuation_factor(3.0);
    outcome((f - 0.501).abs() <= 0.001, format!("factor {f:.5}"))
}

fn c09_soft_errors() -> Outcome {
    let n = expected_soft_errors(1e-3, 81.0, 1.0);
    outcome(n == 0.081, format!("{n:?} expected errors"))
}

fn brute_force(g: &Graph, src: usize, dst: usize) -> Option<f64> {
    fn walk(g: &Graph, node: usize, dst: usize, acc: f64, seen: &mut Vec<bool>, best: &mut Option<f64>) {
        if node == dst {
            *best = Some(best.map_or(acc, |b: f64| b.min(acc)));
            return;
        }
        for &(next, w) in g.neighbors(node) {
            if !seen[next] {
                seen[next] = true;
                walk(g, next, dst, acc + w, seen, best);
                seen[next] = false;
            }
        }
    }
    let mut seen = vec![false; g.node_count()];
    seen[src] = true;
    let mut best = None;
    walk(g, src, dst, 0.0, &mut seen, &mut best);
    best
}

fn c10_routing_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut checked = 0;
    for _ in 0..200 {
        let n = rng.gen_range(1..=8);
        let density = rng.gen_range(0.2..0.9);
        let mut g = Graph::new(n);
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen_bool(density) {
                    g.add_edge(a, b, rng.gen_range(0.01..20.0));
                }
            }
        }
        for src in 0..n {
            for dst in 0..n {
                let fast = shortest_path(&g, src, dst).map(|r| r.delay_ms);
                if fast != brute_force(&g, src, dst) {
                    return outcome(false, format!("mismatch {src}->{dst}: {fast:?}"));
                }
                checked += 1;
            }
        }
    }
    outcome(true, format!("200 graphs, {checked} pairs, exact agreement"))
}

fn c11_property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let body = mars();
    let mut failures = Vec::new();

    // orbital periodicity
    for _ in 0..500 {
        let orbit = CircularOrbit::new(
            rng.gen_range(100.0..20_000.0),
            rng.gen_range(0.0..180.0),
            rng.gen_range(0.0..360.0),
            rng.gen_range(0.0..360.0),
        )
        .unwrap();
        let period = orbital_period(&body, &orbit);
        let t = rng.gen_range(0.0..10.0) * period;
        let d = astro::propagate(&body, &orbit, t + period).distance(astro::propagate(&body, &orbit, t));
        if d >= 1e-6 {
            failures.push(format!("periodicity drift {d}"));
            break;
        }
    }
    // rotation preserves norms
    for _ in 0..500 {
        let p = Vec3::new(rng.gen_range(-1e4..1e4), rng.gen_range(-1e4..1e4), rng.gen_range(-1e4..1e4));
        let q = astro::body_fixed_from_inertial(&body, p, rng.gen_range(-1e7..1e7));
        if ((q.norm() - p.norm()) / p.norm()).abs() >= 1e-12 {
            failures.push("rotation changed a norm".into());
            break;
        }
    }
    // slant range and elevation are inverse
    for _ in 0..500 {
        let r = body.radius_km;
        let h = rng.gen_range(200.0..30_000.0);
        let eps = rng.gen_range(0.0..89.5);
        let a = r + h;
        let d = slant_range(r, h, eps);
        let gamma = ((r * r + a * a - d * d) / (2.0 * r * a)).clamp(-1.0, 1.0).acos();
        let el = elevation(Vec3::new(r, 0.0, 0.0), Vec3::new(gamma.cos(), gamma.sin(), 0.0) * a).unwrap();
        if (el - eps).abs() > 0.05 {
            failures.push(format!("elevation {el} for {eps}"));
            break;
        }
    }
    // +GRID edge counts
    for p in 2..=12 {
        for s in 3..=12 {
            let open = build_plus_grid(p, s, false).unwrap();
            if open.edges.len() != p * s + (p - 1) * s {
                failures.push(format!("+GRID {p}x{s} open"));
            }
            if p >= 3 && build_plus_grid(p, s, true).unwrap().edges.len() != 2 * p * s {
                failures.push(format!("+GRID {p}x{s} closed"));
            }
        }
    }
    // dB additivity
    for _ in 0..500 {
        let (a, b) = (rng.gen_range(0.0..40.0), rng.gen_range(0.0..40.0));
        let lhs = attenuation_factor(a + b);
        if ((lhs - attenuation_factor(a) * attenuation_factor(b)) / lhs).abs() >= 1e-12 {
            failures.push("dB additivity".into());
            break;
        }
    }
    // cache hit beats miss
    let earth = EarthLink::default();
    let orbit = OrbitLink {
        rtt_ms: 12.5,
        bandwidth_bps: 1e8,
    };
    for _ in 0..500 {
        let bits = 10f64.powf(rng.gen_range(-3.0..12.0));
        if cache_fetch_latency(bits, true, &earth, &orbit) >= cache_fetch_latency(bits, false, &earth, &orbit) {
            failures.push(format!("cache hit not faster for {bits} bits"));
            break;
        }
    }
    if failures.is_empty() {
        outcome(true, "periodicity, rotation, slant/elevation, +GRID, dB, cache")
    } else {
        outcome(false, failures.join("; "))
    }
}

fn run_cli(out: &Path) -> Result<(), String> {
    let status = Process::new(env!("CARGO_BIN_EXE_marsnet"))
        .args(["--command", "all", "--output"])
        .arg(out)
        .output()
        .map_err(|e| e.to_string())?;
    if status.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&status.stderr).into_owned())
    }
}

fn c12_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    if let Err(e) = run_cli(&a).and_then(|_| run_cli(&b)) {
        return outcome(false, e);
    }
    let mut names: Vec<_> = fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    for name in &names {
        let (x, y) = (fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).ok());
        if Some(&x) != y.as_ref() {
            return outcome(false, format!("{} differs", name.to_string_lossy()));
        }
    }
    outcome(names.len() == 8, format!("{} files byte-identical across two runs", names.len()))
}

fn main() {
    let criteria: [(&str, Check); 12] = [
        ("1 synchronous altitude", c01_synchronous_altitude),
        ("2 coverage latitude", c02_coverage_latitude),
        ("3 equatorial ring", c03_equatorial_ring),
        ("4 rtt anchors", c04_rtt_anchors),
        ("5 constellation coverage", c05_constellation),
        ("6 power scaling", c06_power_scaling),
        ("7 mass overhead", c07_mass_overhead),
        ("8 dust attenuation", c08_attenuation),
        ("9 soft errors", c09_soft_errors),
        ("10 routing oracle", c10_routing_oracle),
        ("11 property suites", c11_property_suites),
        ("12 determinism", c12_determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let o = check();
        println!("{} criterion {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
