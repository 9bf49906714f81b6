use std::fs::File;
use std::io::{self, BufWriter, Write};

use meshroute::baselines::{route_ga, route_no_interference, route_random, GaParams};
use meshroute::experiments::{
    csv_rows, mean, run_comparison, write_csv, CompareOptions, RunReport, Scenario,
};
use meshroute::topology::{load_network, save_network};
use meshroute::{
    generate_network, route as route_ours, Assignment, Counters, Error, GenParams, GroupingPlan,
    MeshNetwork, RadioConfig, RadioModel, Result, UserTrees,
};
use serde::Serialize;

use crate::dot::{self, Overlay};
use crate::{Algo, CompareArgs, ExportDotArgs, GenerateArgs, PlanArgs, RadioArgs, RouteArgs};

pub fn fmt_db(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.2}")
    }
}

fn radio_config(args: &RadioArgs) -> Result<RadioConfig> {
    let mut cfg = RadioConfig::default();
    if let Some(n) = args.noise_dbm {
        cfg = cfg.with_noise_dbm(n);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn plan(net: &MeshNetwork, args: &PlanArgs) -> Result<GroupingPlan> {
    if args.round_robin {
        GroupingPlan::round_robin(net, args.groups, args.mode.into())
    } else {
        GroupingPlan::contiguous(net, args.groups, args.mode.into())
    }
}

fn routable(net: &MeshNetwork, h_max: usize) -> Result<UserTrees> {
    if h_max == 0 {
        return Err(Error::Validation {
            field: "hmax".into(),
            reason: "must be at least 1".into(),
        });
    }
    let trees = UserTrees::build(net, h_max)?;
    trees.ensure_routable()?;
    Ok(trees)
}

pub fn generate(args: &GenerateArgs) -> Result<()> {
    let mut p = GenParams::new(args.bs, args.users, args.core, args.seed);
    p.h_max = args.hmax;
    if let Some(v) = args.grid_side_m {
        p.grid_side_m = v;
    }
    if let Some(v) = args.min_sep_m {
        p.min_bs_sep_m = v;
    }
    if let Some(v) = args.link_radius_m {
        p.bs_link_radius_m = v;
    }
    if let Some(v) = args.link_prob {
        p.bs_link_prob = v;
    }
    let net = generate_network(&p)?;
    save_network(&net, &args.output)?;
    println!(
        "B={} U={} C={} edges={} -> {}",
        net.num_bs(),
        net.num_users(),
        net.num_core(),
        net.edges().len(),
        args.output.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct UserReport {
    user: usize,
    path: Vec<usize>,
    cost_db: f64,
}

#[derive(Serialize)]
struct RouteReport {
    algorithm: &'static str,
    groups: usize,
    users: Vec<UserReport>,
    coa_db: f64,
    counters: Counters,
}

impl RouteReport {
    fn new(algorithm: &'static str, groups: usize, a: &Assignment, counters: Counters) -> Self {
        let users = a
            .chosen
            .iter()
            .map(|(&user, path)| UserReport {
                user,
                path: path.nodes(),
                cost_db: a.per_user_cost_db[&user],
            })
            .collect();
        Self {
            algorithm,
            groups,
            users,
            coa_db: a.coa_db(),
            counters,
        }
    }

    fn print_text(&self, out: &mut impl Write) -> io::Result<()> {
        writeln!(
            out,
            "algorithm {} ({} group(s))",
            self.algorithm, self.groups
        )?;
        for u in &self.users {
            let path: Vec<String> = u.path.iter().map(ToString::to_string).collect();
            writeln!(
                out,
                "user {:>4}  cost {:>8} dB  path {}",
                u.user,
                fmt_db(u.cost_db),
                path.join(" -> ")
            )?;
        }
        writeln!(out, "CoA {} dB", fmt_db(self.coa_db))?;
        writeln!(
            out,
            "snir_evals {}  path_cost_evals {}  combinations {}",
            self.counters.snir_evals, self.counters.path_cost_evals, self.counters.combinations
        )
    }
}

pub fn route(args: &RouteArgs) -> Result<()> {
    let net = load_network(&args.network)?;
    let cfg = radio_config(&args.radio)?;
    let trees = routable(&net, args.radio.hmax)?;
    let model = RadioModel::new(&net, &cfg)?;
    let plan = plan(&net, &args.plan)?;
    let groups = plan.groups.len();
    let report = match args.algo {
        Algo::Ours => {
            let o = route_ours(&net, &trees, &model, &plan)?;
            RouteReport::new("ours", groups, &o.assignment, o.counters())
        }
        Algo::Noint => {
            let o = route_no_interference(&net, &trees, &model, &plan)?;
            RouteReport::new("noint", groups, &o.assignment, o.counters())
        }
        Algo::Random => {
            let (a, c) = route_random(&net, &trees, &model, args.seed)?;
            RouteReport::new("random", groups, &a, c)
        }
        Algo::Ga => {
            let ga = GaParams {
                mutation_prob: args.ga_mutation,
                ..GaParams::new(args.ga_k, args.ga_j, args.ga_generations, args.seed)
            };
            let o = route_ga(&net, &trees, &model, &ga)?;
            RouteReport::new("ga", groups, &o.assignment, o.counters)
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if args.json {
        serde_json::to_writer_pretty(&mut out, &report)?;
        writeln!(out)?;
    } else {
        report.print_text(&mut out)?;
    }
    Ok(())
}

fn print_summary(
    reports: &[&RunReport],
    scenarios: &[Scenario],
    out: &mut impl Write,
) -> io::Result<()> {
    writeln!(
        out,
        "{:<12} {:>5} {:>7} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}",
        "scenario", "seeds", "trivial", "ours", "alg_B", "alg_C", "ga_min", "ga_max", "ga_avg"
    )?;
    let cell = |v: Option<f64>| v.map_or_else(|| "-".to_string(), fmt_db);
    for s in scenarios {
        let all: Vec<_> = reports.iter().filter(|r| r.scenario == *s).collect();
        // every user adjacent to a core: all algorithms score +inf
        let rs: Vec<_> = all.iter().filter(|r| r.ours.coa_db.is_finite()).collect();
        let ga = |f: fn(&meshroute::experiments::GaSummary) -> f64| {
            mean(rs.iter().filter_map(|r| r.ga.as_ref().map(f)))
        };
        writeln!(
            out,
            "{:<12} {:>5} {:>7} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}",
            s.to_string(),
            all.len(),
            all.len() - rs.len(),
            cell(mean(rs.iter().map(|r| r.ours.coa_db))),
            cell(mean(rs.iter().map(|r| r.noint.coa_db))),
            cell(mean(rs.iter().map(|r| r.random.coa_db))),
            cell(ga(|g| g.min_db)),
            cell(ga(|g| g.max_db)),
            cell(ga(|g| g.avg_db)),
        )?;
    }
    Ok(())
}

pub fn compare(args: &CompareArgs) -> Result<()> {
    let scenarios = Scenario::parse_list(&args.scenarios)?;
    if scenarios.is_empty() {
        return Err(Error::Validation {
            field: "scenarios".into(),
            reason: "no scenario given".into(),
        });
    }
    if args.seeds == 0 || args.runs == 0 {
        return Err(Error::Validation {
            field: "seeds/runs".into(),
            reason: "must be at least 1".into(),
        });
    }
    let opts = CompareOptions {
        seeds: (args.first_seed..args.first_seed + args.seeds).collect(),
        radio: radio_config(&args.radio)?,
        h_max: args.radio.hmax,
        mode: args.mode.into(),
        random_runs: args.runs,
        ga_runs: args.ga_runs,
        ga_mutation_prob: args.ga_mutation,
        record_wall_time: !args.no_wall_time,
    };
    let cells = run_comparison(&scenarios, &opts);
    for c in &cells {
        if let Err(e) = &c.result {
            eprintln!("warning: scenario {} seed {}: {e}", c.scenario, c.seed);
        }
    }
    let rows = csv_rows(&cells);
    let reports: Vec<&RunReport> = cells
        .iter()
        .filter_map(|c| c.result.as_ref().ok())
        .collect();
    match &args.output {
        Some(path) => {
            write_csv(&rows, BufWriter::new(File::create(path)?))?;
            print_summary(&reports, &scenarios, &mut io::stdout().lock())?;
        }
        None => {
            write_csv(&rows, io::stdout().lock())?;
            print_summary(&reports, &scenarios, &mut io::stderr().lock())?;
        }
    }
    Ok(())
}

pub fn export_dot(args: &ExportDotArgs) -> Result<()> {
    let net = load_network(&args.network)?;
    let cfg = radio_config(&args.radio)?;
    let trees = routable(&net, args.radio.hmax)?;
    let model = RadioModel::new(&net, &cfg)?;
    let plan = plan(&net, &args.plan)?;
    let ours = route_ours(&net, &trees, &model, &plan)?;
    let blind = route_no_interference(&net, &trees, &model, &plan)?;
    let text = dot::render(
        &net,
        &[
            Overlay {
                label: "ours",
                color: "red",
                assignment: &ours.assignment,
            },
            Overlay {
                label: "noint",
                color: "green",
                assignment: &blind.assignment,
            },
        ],
    );
    std::fs::write(&args.output, text)?;
    println!(
        "ours CoA {} dB (red), Algorithm B CoA {} dB (green) -> {}",
        fmt_db(ours.assignment.coa_db()),
        fmt_db(blind.assignment.coa_db()),
        args.output.display()
    );
    Ok(())
}
