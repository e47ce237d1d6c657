use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use vmedad::io::{load_csv, load_wdbc, ColumnSelector, ReportConfig, ReportDocument, WDBC_URL};
use vmedad::refdist::{figure2_curve, normal_reference, t_reference, write_curve_csv, Family};
use vmedad::simulate::{
    run_breakdown_n, run_consistency, run_equivariance_check, run_figure1, sample_mvt, Design, ExperimentResult,
};
use vmedad::{CovDivisor, DepthScaling, ShellOrder, VMedadConfig};

mod table;

use table::{render, sig4, vec4};

type AnyResult<T> = Result<T, Box<dyn std::error::Error>>;

#[derive(Parser)]
#[command(name = "vmedad", version, about = "Depth-based vector MedAD moments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct MomentArgs {
    /// Highest shell count; moments up to order b_max + 1
    #[arg(long, default_value_t = 3)]
    b_max: usize,
    /// center-out or depth-ascending
    #[arg(long, default_value = "center-out")]
    shell_order: ShellOrder,
    /// covariance (affine-invariant) or none (Euclidean)
    #[arg(long, default_value = "covariance")]
    depth_scaling: DepthScaling,
    /// Skip Mardia and MRSz
    #[arg(long)]
    no_baselines: bool,
    /// Covariance divisor for the baselines: sample (n-1) or population (n)
    #[arg(long, default_value = "sample")]
    cov_divisor: CovDivisor,
}

impl MomentArgs {
    fn config(&self, seed: Option<u64>) -> ReportConfig {
        ReportConfig {
            vmedad: VMedadConfig {
                b_max: self.b_max,
                shell_order: self.shell_order,
                depth_scaling: self.depth_scaling,
                ..Default::default()
            },
            emit_baselines: !self.no_baselines,
            cov_divisor: self.cov_divisor,
            seed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Analyse numeric CSV columns and write a JSON report
    Analyze {
        input: PathBuf,
        /// Column names or zero-based indices, comma-separated (default: all)
        #[arg(long)]
        cols: Option<String>,
        /// The first row holds data, not column names
        #[arg(long)]
        no_header: bool,
        #[command(flatten)]
        moments: MomentArgs,
        /// Recorded in the report metadata
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce the Wisconsin breast cancer analysis
    Wdbc {
        #[arg(long, default_value = "wdbc.data")]
        file: PathBuf,
        /// Feature names, comma-separated
        #[arg(long, default_value = "radius_mean,concavity_mean")]
        features: String,
        #[command(flatten)]
        moments: MomentArgs,
        /// Also write the full JSON report here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Population reference values for normal and t laws
    Reference {
        #[arg(long, default_value = "normal")]
        family: Family,
        #[arg(long, default_value_t = 1)]
        d: usize,
        /// Degrees of freedom (t family)
        #[arg(long)]
        nu: Option<f64>,
        /// Print JSON at full precision instead of a table
        #[arg(long)]
        json: bool,
    },
    /// Phi2^Med of the t law against degrees of freedom, as CSV
    Figure2 {
        #[arg(long, default_value = "1,2,3")]
        d: String,
        /// Degrees of freedom grid (default 1..=50)
        #[arg(long)]
        nu: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mixture example scatter and moment arrows, as CSV
    Figure1 {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimation error along a sample-size grid
    Consistency {
        #[arg(long, default_value = "normal")]
        family: Family,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 3.0)]
        nu: f64,
        #[arg(long, default_value = "500,2000,8000")]
        n: String,
        #[arg(long, default_value_t = 20)]
        replicates: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Per-replicate CSV
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON summary
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Effect of gross contamination on the moments
    Breakdown {
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 2000)]
        n: usize,
        #[arg(long, default_value = "0,0.05,0.1,0.2,0.3,0.4")]
        eps: String,
        #[arg(long, default_value_t = 1e6)]
        magnitude: f64,
        #[arg(long, default_value_t = 20)]
        replicates: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Check the equivariance identities under random transforms
    Equivariance {
        /// CSV input (default: a simulated t sample)
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        cols: Option<String>,
        #[arg(long)]
        no_header: bool,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Download the WDBC data file
    Fetch {
        #[arg(long, default_value = WDBC_URL)]
        url: String,
        #[arg(long, default_value = "wdbc.data")]
        out: PathBuf,
    },
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> AnyResult<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<T>().map_err(|_| format!("invalid {what} {p:?}").into()))
        .collect()
}

fn write_out(path: Option<&Path>, bytes: &[u8]) -> AnyResult<()> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| format!("cannot write {}: {e}", p.display()).into()),
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn experiment_output(res: &ExperimentResult, out: Option<&Path>, summary: Option<&Path>) -> AnyResult<()> {
    if let Some(p) = out {
        let mut buf = Vec::new();
        res.write_csv(&mut buf)?;
        write_out(Some(p), &buf)?;
    }
    if let Some(p) = summary {
        write_out(Some(p), res.summary_json()?.as_bytes())?;
    }
    let mut header = vec![res.group_by.as_str()];
    header.extend(res.metrics.iter().map(String::as_str));
    let rows: Vec<Vec<String>> = res
        .summary
        .iter()
        .map(|g| {
            let mut r = vec![g.group.to_string()];
            r.extend(res.metrics.iter().map(|m| sig4(g.metrics[m].median)));
            r
        })
        .collect();
    println!(
        "{} on {} ({} replicates, seed {}); medians per group",
        res.experiment, res.design, res.replicates, res.seed
    );
    print!("{}", render(&header, &rows));
    for n in &res.notes {
        println!("note: {n}");
    }
    Ok(())
}

struct CompareRow {
    label: &'static str,
    ours: Vec<f64>,
    published: Option<&'static str>,
}

fn wdbc_table(doc: &ReportDocument, compare: bool) -> String {
    let r = &doc.vmedad;
    let p = |v: &'static str| compare.then_some(v);
    let mut rows = vec![
        CompareRow {
            label: "Phi1",
            ours: r.phi1.clone(),
            published: p("(13.36, 0.064)"),
        },
        CompareRow {
            label: "Phi2",
            ours: r.phi2_vec.clone(),
            published: p("(0.01, -0.002)"),
        },
        CompareRow {
            label: "Phi2^Med",
            ours: vec![r.phi2_scale],
            published: p("1.90"),
        },
    ];
    if let Some(v) = r.phi.get(&3) {
        rows.push(CompareRow {
            label: "Phi3",
            ours: v.clone(),
            published: p("(1.775, 0.054)"),
        });
    }
    if let Some(v) = r.phi.get(&4) {
        rows.push(CompareRow {
            label: "Phi4",
            ours: v.clone(),
            published: p("(-1.525, -0.066)"),
        });
    }
    if let Some(v) = r.psi_k(3) {
        rows.push(CompareRow {
            label: "Psi3",
            ours: v.to_vec(),
            published: p("(0.934, 0.028)"),
        });
    }
    if let Some(v) = r.psi_k(4) {
        rows.push(CompareRow {
            label: "Psi4",
            ours: v.to_vec(),
            published: p("(-0.803, -0.035)"),
        });
    }
    for (k, published) in [(3, "1.776"), (4, "1.527")] {
        if let Some(v) = r.norms.get(&k) {
            rows.push(CompareRow {
                label: if k == 3 { "|Phi3|" } else { "|Phi4|" },
                ours: vec![*v],
                published: p(published),
            });
        }
    }
    if let Some(pn) = &r.psi_norms {
        for (k, published) in [(3, "0.934"), (4, "0.803")] {
            if let Some(v) = pn.get(&k) {
                rows.push(CompareRow {
                    label: if k == 3 { "|Psi3|" } else { "|Psi4|" },
                    ours: vec![*v],
                    published: p(published),
                });
            }
        }
    }
    if let Some(b) = &doc.baselines {
        rows.push(CompareRow {
            label: "Mardia skew",
            ours: vec![b.mardia_skew],
            published: p("4.03"),
        });
        rows.push(CompareRow {
            label: "Mardia kurt",
            ours: vec![b.mardia_kurt],
            published: p("14.984"),
        });
        rows.push(CompareRow {
            label: "MRSz gamma",
            ours: b.mrsz_skew.clone(),
            published: p("(1.046, 1.982)"),
        });
        rows.push(CompareRow {
            label: "MRSz ku (centered)",
            ours: b.mrsz_kurt_centered.clone(),
            published: p("(1.21, -0.37, -0.37, 5.76)"),
        });
    }
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|row| {
            let fmt = |v: &[f64]| if v.len() == 1 { sig4(v[0]) } else { vec4(v) };
            let mut cells = vec![row.label.to_string(), fmt(&row.ours)];
            if compare {
                cells.push(row.published.unwrap_or_default().to_string());
            }
            cells
        })
        .collect();
    if compare {
        render(&["quantity", "computed", "published"], &body)
    } else {
        render(&["quantity", "computed"], &body)
    }
}

fn run(cli: Cli) -> AnyResult<()> {
    match cli.command {
        Command::Analyze {
            input,
            cols,
            no_header,
            moments,
            seed,
            out,
        } => {
            let selectors = cols.as_deref().map(ColumnSelector::parse_list).unwrap_or_default();
            let loaded = load_csv(&input, &selectors, !no_header)?;
            if loaded.dropped > 0 {
                eprintln!("warning: dropped {} malformed row(s)", loaded.dropped);
            }
            let doc = ReportDocument::build(
                &loaded.data,
                loaded.columns,
                Some(input.display().to_string()),
                &moments.config(seed),
            )?;
            let mut json = doc.to_json()?;
            json.push('\n');
            write_out(out.as_deref(), json.as_bytes())
        }
        Command::Wdbc {
            file,
            features,
            moments,
            out,
        } => {
            let w = load_wdbc(&file)?;
            for warn in &w.warnings {
                eprintln!("warning: {warn}");
            }
            let names: Vec<&str> = features.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            let x = w.select(&names)?;
            let doc = ReportDocument::build(
                &x,
                names.iter().map(|s| s.to_string()).collect(),
                Some(file.display().to_string()),
                &moments.config(None),
            )?;
            let compare = names == ["radius_mean", "concavity_mean"];
            println!("WDBC: n = {}, features = {}", x.nrows(), names.join(", "));
            print!("{}", wdbc_table(&doc, compare));
            if let Some(p) = out {
                let mut json = doc.to_json()?;
                json.push('\n');
                write_out(Some(&p), json.as_bytes())?;
            }
            Ok(())
        }
        Command::Reference { family, d, nu, json } => {
            let r = match family {
                Family::Normal => normal_reference(d)?,
                Family::StudentT => t_reference(d, nu.ok_or("the t family needs --nu")?)?,
            };
            if json {
                println!("{}", serde_json::to_string_pretty(&r)?);
            } else {
                let rows = vec![
                    vec!["phi2_scale".into(), sig4(r.phi2_scale)],
                    vec!["c_med_diag".into(), sig4(r.c_med_diag)],
                    vec!["phi2_vec".into(), vec4(&r.phi2_vec)],
                    vec!["phi3".into(), vec4(&r.phi3)],
                    vec!["phi4".into(), vec4(&r.phi4)],
                ];
                match r.nu {
                    Some(nu) => println!("t, d = {d}, nu = {nu}"),
                    None => println!("normal, d = {d}"),
                }
                print!("{}", render(&["quantity", "value"], &rows));
            }
            Ok(())
        }
        Command::Figure2 { d, nu, out } => {
            let ds: Vec<usize> = parse_list(&d, "dimension")?;
            let nus: Vec<f64> = match nu {
                Some(s) => parse_list(&s, "degrees of freedom")?,
                None => (1..=50).map(f64::from).collect(),
            };
            let mut buf = Vec::new();
            write_curve_csv(&figure2_curve(&ds, &nus)?, &mut buf)?;
            write_out(out.as_deref(), &buf)
        }
        Command::Figure1 { seed, out } => {
            let rec = run_figure1(seed)?;
            let mut buf = Vec::new();
            rec.write_csv(&mut buf)?;
            write_out(out.as_deref(), &buf)?;
            if out.is_some() {
                println!(
                    "median {}  phi3 {} ({} deg)  gamma2 {} ({} deg)",
                    vec4(&rec.median),
                    vec4(&rec.phi3),
                    sig4(rec.angle_phi3),
                    vec4(&rec.gamma2),
                    sig4(rec.angle_gamma2)
                );
            }
            Ok(())
        }
        Command::Consistency {
            family,
            d,
            nu,
            n,
            replicates,
            seed,
            out,
            summary,
        } => {
            let design = match family {
                Family::Normal => Design::Normal { d },
                Family::StudentT => Design::StudentT { d, nu },
            };
            let grid: Vec<usize> = parse_list(&n, "sample size")?;
            let res = run_consistency(&design, &grid, replicates, seed)?;
            experiment_output(&res, out.as_deref(), summary.as_deref())
        }
        Command::Breakdown {
            d,
            n,
            eps,
            magnitude,
            replicates,
            seed,
            out,
            summary,
        } => {
            let grid: Vec<f64> = parse_list(&eps, "contamination fraction")?;
            let res = run_breakdown_n(&Design::Normal { d }, n, &grid, magnitude, replicates, seed)?;
            experiment_output(&res, out.as_deref(), summary.as_deref())
        }
        Command::Equivariance {
            input,
            cols,
            no_header,
            trials,
            seed,
            out,
            summary,
        } => {
            let x = match input {
                Some(p) => {
                    let selectors = cols.as_deref().map(ColumnSelector::parse_list).unwrap_or_default();
                    load_csv(&p, &selectors, !no_header)?.data
                }
                None => sample_mvt(
                    200,
                    &[1.0, -2.0, 0.5],
                    &[2.0, 0.6, 0.0, 0.6, 1.0, -0.3, 0.0, -0.3, 0.5],
                    4.0,
                    seed,
                )?,
            };
            let res = run_equivariance_check(&x, trials, seed)?;
            if let Some(p) = out {
                let mut buf = Vec::new();
                res.write_csv(&mut buf)?;
                write_out(Some(&p), &buf)?;
            }
            if let Some(p) = summary {
                write_out(Some(&p), res.summary_json()?.as_bytes())?;
            }
            let rows: Vec<Vec<String>> = res
                .metrics
                .iter()
                .map(|m| vec![m.clone(), sig4(res.summary[0].metrics[m].max)])
                .collect();
            println!("equivariance on {} ({} trials, seed {})", res.design, trials, seed);
            print!("{}", render(&["deviation", "max"], &rows));
            Ok(())
        }
        Command::Fetch { url, out } => {
            let body = ureq::get(&url)
                .call()
                .map_err(|e| format!("download from {url} failed: {e}"))?
                .into_string()?;
            fs::write(&out, &body).map_err(|e| format!("cannot write {}: {e}", out.display()))?;
            let w = load_wdbc(&out)?;
            for warn in &w.warnings {
                eprintln!("warning: {warn}");
            }
            println!("wrote {} ({} rows)", out.display(), w.features.nrows());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
