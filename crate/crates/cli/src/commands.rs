use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use rho_cusum::simulate::{
    derive_seed, power_table, preset, BreakProfile, Outlier, QFormula, Scenario,
};
use rho_cusum::{bpc_test, critical_value, spearman_constancy_test, Error, TestConfig, TestOutcome};
use serde_json::json;

use crate::input::{read_csv, CsvDataset};
use crate::svg::{render, Series};
use crate::{BreakArg, CriticalValuesArgs, Format, QFormulaArg, SimulateArgs, TestArgs, TestOptions};

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_DATA: u8 = 2;
pub const EXIT_DEGENERATE: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

type CmdResult = Result<(), Failure>;

fn usage(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        error: error.into(),
    }
}

fn data(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: EXIT_DATA,
        error: error.into(),
    }
}

/// Maps a library error from a test run onto an exit code.
fn from_test_error(e: Error) -> Failure {
    let code = match e {
        Error::DegenerateVariance(_) | Error::ZeroVariancePrefix(_) => EXIT_DEGENERATE,
        Error::AlphaOutOfRange(_) | Error::InvalidBandwidth(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    };
    Failure {
        code,
        error: e.into(),
    }
}

fn config(options: &TestOptions, min_k: usize) -> Result<TestConfig, Failure> {
    let cfg = TestConfig {
        kernel: options.kernel,
        bandwidth: options.bandwidth,
        alpha: options.alpha,
        min_k,
    };
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn argmax_label(ds: &CsvDataset, k: usize) -> Option<&str> {
    ds.labels.as_ref().map(|l| l[k - 1].as_str())
}

fn text_section(out: &mut String, title: &str, o: &TestOutcome, ds: &CsvDataset, final_name: &str) {
    let _ = writeln!(out, "{title}");
    let _ = writeln!(out, "  statistic W       {}", o.statistic_w);
    let _ = writeln!(out, "  p-value           {}", o.p_value);
    let _ = match argmax_label(ds, o.argmax_k) {
        Some(label) => writeln!(out, "  argmax k          {} ({label})", o.argmax_k),
        None => writeln!(out, "  argmax k          {}", o.argmax_k),
    };
    let _ = writeln!(out, "  D'                {}", o.d_hat_prime);
    let _ = writeln!(out, "  {final_name:<18}{}", o.rho_path[o.n() - 1]);
    let decision = if o.rejects() {
        "reject constancy"
    } else {
        "do not reject constancy"
    };
    let _ = writeln!(out, "  at alpha = {:<7}{decision}", o.alpha);
}

fn json_section(o: &TestOutcome, ds: &CsvDataset) -> serde_json::Value {
    json!({
        "statistic_w": o.statistic_w,
        "p_value": o.p_value,
        "argmax_k": o.argmax_k,
        "argmax_label": argmax_label(ds, o.argmax_k),
        "d_hat_prime": o.d_hat_prime,
        "final_estimate": o.rho_path[o.n() - 1],
        "rejects": o.rejects(),
        "tie_counts": o.tie_counts,
    })
}

fn write_trace(path: &Path, ds: &CsvDataset, sp: &TestOutcome, bpc: Option<&TestOutcome>) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = Vec::new();
    if ds.labels.is_some() {
        header.push("label");
    }
    header.extend(["k", "rho_k", "psi_k"]);
    if bpc.is_some() {
        header.extend(["r_k", "b_k"]);
    }
    w.write_record(&header)?;
    for k in 1..=sp.n() {
        let mut rec = Vec::with_capacity(header.len());
        if let Some(l) = argmax_label(ds, k) {
            rec.push(l.to_string());
        }
        rec.push(k.to_string());
        rec.push(sp.rho_path[k - 1].to_string());
        rec.push(sp.trace[k - 1].to_string());
        if let Some(b) = bpc {
            rec.push(b.rho_path[k - 1].to_string());
            rec.push(b.trace[k - 1].to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn test(args: &TestArgs) -> CmdResult {
    let cfg = config(&args.options, args.min_k)?;
    let ds = read_csv(&args.input, args.columns.as_deref(), args.label_column.as_ref()).map_err(data)?;
    if args.bpc && ds.sample.d() != 2 {
        return Err(usage(anyhow!(
            "--bpc needs exactly two data columns, {} selected",
            ds.sample.d()
        )));
    }
    let sp = spearman_constancy_test(&ds.sample, &cfg).map_err(from_test_error)?;
    let bpc = if args.bpc {
        Some(bpc_test(&ds.sample, &cfg).map_err(from_test_error)?)
    } else {
        None
    };

    let mut warnings = Vec::new();
    for (name, &ties) in ds.header.iter().zip(&sp.tie_counts) {
        if ties > 0 {
            warnings.push(format!("column '{name}' has {ties} tied pairs; average ranks used"));
        }
    }
    if !ds.skipped_lines.is_empty() {
        warnings.push(format!("skipped empty lines {:?}", ds.skipped_lines));
    }

    match args.format {
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(
                out,
                "n = {}, d = {}, columns: {}",
                ds.sample.n(),
                ds.sample.d(),
                ds.header.join(", ")
            );
            let _ = writeln!(
                out,
                "kernel {}, bandwidth {}",
                cfg.kernel.name(),
                sp.bandwidth
            );
            text_section(&mut out, "Spearman's rho constancy test", &sp, &ds, "final rho");
            if let Some(b) = &bpc {
                text_section(&mut out, "Pearson correlation (BPC) test", b, &ds, "final r");
            }
            print!("{out}");
            for w in &warnings {
                eprintln!("warning: {w}");
            }
        }
        Format::Json => {
            let report = json!({
                "n": ds.sample.n(),
                "d": ds.sample.d(),
                "columns": ds.header,
                "kernel": cfg.kernel.name(),
                "bandwidth": sp.bandwidth,
                "alpha": cfg.alpha,
                "spearman": json_section(&sp, &ds),
                "bpc": bpc.as_ref().map(|b| json_section(b, &ds)),
                "warnings": warnings,
            });
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
        }
    }

    if let Some(path) = &args.trace {
        write_trace(path, &ds, &sp, bpc.as_ref())
            .with_context(|| format!("cannot write trace to {}", path.display()))
            .map_err(data)?;
    }
    if let Some(path) = &args.svg {
        let mut series = vec![Series {
            name: "psi_k (Spearman)",
            values: &sp.trace,
            color: "black",
        }];
        if let Some(b) = &bpc {
            series.push(Series {
                name: "b_k (Pearson)",
                values: &b.trace,
                color: "#1f5fbf",
            });
        }
        let cv = critical_value(cfg.alpha).map_err(usage)?;
        let title = format!("Fluctuation trace, n = {}", sp.n());
        fs::write(path, render(&title, &series, cv))
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(data)?;
    }
    Ok(())
}

fn parse_outlier(spec: &str, position_max: usize) -> anyhow::Result<Outlier> {
    let (pos, vals) = spec
        .split_once(':')
        .ok_or_else(|| anyhow!("outlier '{spec}' is not of the form position:v1,v2"))?;
    let position: usize = pos.trim().parse().with_context(|| format!("bad outlier position '{pos}'"))?;
    if position == 0 || position > position_max {
        return Err(anyhow!("outlier position {position} outside 1..={position_max}"));
    }
    let values = vals
        .split(',')
        .map(|v| v.trim().parse::<f64>().with_context(|| format!("bad outlier value '{v}'")))
        .collect::<anyhow::Result<Vec<f64>>>()?;
    Ok(Outlier { position, values })
}

fn custom_scenario(args: &SimulateArgs, q_formula: QFormula) -> anyhow::Result<Scenario> {
    let break_profile = match args.break_profile {
        BreakArg::None => BreakProfile::None,
        BreakArg::Abrupt => BreakProfile::AbruptAtFraction(args.tau),
        BreakArg::Drift => BreakProfile::LinearDrift,
    };
    let contamination = args
        .outlier
        .iter()
        .map(|s| parse_outlier(s, args.n))
        .collect::<anyhow::Result<_>>()?;
    let scenario = Scenario {
        label: "custom".into(),
        n: args.n,
        d: args.d,
        nu: args.nu,
        theta: args.theta.clone().unwrap_or_else(|| vec![0.0; args.d]),
        rho0: args.rho0,
        rho1: args.rho1.unwrap_or(args.rho0),
        break_profile,
        contamination,
        strong_outliers: args.strong_outliers,
        q_formula,
        seed: derive_seed(args.seed, 0),
    };
    scenario.validate()?;
    Ok(scenario)
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = OsString::from(prefix.as_os_str());
    s.push(suffix);
    PathBuf::from(s)
}

pub fn simulate(args: &SimulateArgs) -> CmdResult {
    let cfg = config(&args.options, 1)?;
    let q_formula = match args.q_formula {
        QFormulaArg::Exact => QFormula::Exact,
        QFormulaArg::Printed => QFormula::Printed,
    };
    let grid = match &args.preset {
        Some(name) => preset(name, args.seed, q_formula).map_err(usage)?,
        None => vec![custom_scenario(args, q_formula).map_err(usage)?],
    };
    let jobs = args
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let mut table = power_table(&grid, args.reps as usize, &cfg, jobs).map_err(usage)?;

    let argv: Vec<String> = std::env::args().collect();
    table.push_metadata("command", argv.join(" "));
    table.push_metadata("master_seed", args.seed);
    table.push_metadata("q_formula", q_formula.name());
    match &args.preset {
        Some(name) => table.push_metadata("preset", name),
        None => {
            let sc = &grid[0];
            table.push_metadata("scenario_seed", sc.seed);
            table.push_metadata("theta", format!("{:?}", sc.theta));
            table.push_metadata("break", format!("{:?}", sc.break_profile));
            table.push_metadata("contamination", format!("{:?}", sc.contamination));
            table.push_metadata("strong_outliers", sc.strong_outliers);
        }
    }

    let text = table.to_text();
    if let Some(prefix) = &args.out {
        let csv_path = with_suffix(prefix, ".csv");
        let txt_path = with_suffix(prefix, ".txt");
        fs::write(&csv_path, table.to_csv_string())
            .with_context(|| format!("cannot write {}", csv_path.display()))
            .map_err(data)?;
        fs::write(&txt_path, &text)
            .with_context(|| format!("cannot write {}", txt_path.display()))
            .map_err(data)?;
        eprintln!("wrote {} and {}", csv_path.display(), txt_path.display());
    }
    print!("{text}");
    Ok(())
}

pub fn critical_values(args: &CriticalValuesArgs) -> CmdResult {
    let rows = args
        .alpha
        .iter()
        .map(|&a| critical_value(a).map(|c| (a, c)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(usage)?;
    println!("alpha\tcritical_value");
    for (a, c) in rows {
        println!("{a}\t{c}");
    }
    Ok(())
}
