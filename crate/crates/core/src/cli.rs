//! Command-line front end. Exit codes: 0 success, 1 usage, 2 data or
//! configuration error, 3 network or credential error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::contextual::{render_dataset, DescriptorMode};
use crate::descriptors::{load_bundled, DescriptorCatalog, DescriptorService};
use crate::error::{Error, Result};
use crate::eval::{render_report, run_grid, ExperimentSpec, ExternalImputation, ReportFormat};
use crate::finetune::{records_from_lines, write_records};
use crate::impute::{fit_transform, tune_k, ImputerKind, DEFAULT_K_GRID, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::missingness::{audit, inject, MarParams, Mechanism, MissingnessSpec};
use crate::pipeline::{run_all, PipelineConfig};
use crate::table::{load_csv, save_csv, Dataset, Schema};
use crate::{bundled, eval};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NETWORK: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ctximpute", version, about = "Missingness injection, imputation baselines and missingness-aware text corpora")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Where a table comes from: a CSV plus schema, or a bundled dataset.
#[derive(Debug, Args)]
struct TableArgs {
    /// Input CSV.
    #[arg(long = "in", value_name = "CSV")]
    input: Option<PathBuf>,
    /// Schema TOML for the input.
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Bundled dataset name (supplies the schema, and the rows when --in is absent).
    #[arg(long)]
    dataset: Option<String>,
}

impl TableArgs {
    fn schema(&self) -> Result<Schema> {
        match (&self.schema, &self.dataset) {
            (Some(p), _) => Schema::load(p),
            (None, Some(name)) => bundled::schema(name),
            (None, None) => Err(Error::Config("pass --schema or --dataset".into())),
        }
    }

    fn load(&self) -> Result<Dataset> {
        match (&self.input, &self.dataset) {
            (Some(p), _) => load_csv(p, Arc::new(self.schema()?)),
            (None, Some(name)) => bundled::dataset(name),
            (None, None) => Err(Error::Config("pass --in or --dataset".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MechanismArg {
    Mcar,
    Mar,
    Mnar,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Mean,
    Knn,
    Chained,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Specific,
    Generic,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Markdown,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mask cells under MCAR, MAR or MNAR.
    Inject {
        #[command(flatten)]
        table: TableArgs,
        #[arg(long, value_enum)]
        mechanism: MechanismArg,
        /// MCAR per-feature rate.
        #[arg(long, default_value_t = 0.30)]
        rate: f64,
        /// MNAR self-masking quantile.
        #[arg(long, default_value_t = 0.30)]
        quantile: f64,
        /// MAR independent feature (defaults to the first).
        #[arg(long)]
        independent: Option<String>,
        #[arg(long, default_value_t = 0.30)]
        subset_quantile: f64,
        #[arg(long, default_value_t = 0.60)]
        removal_rate: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        allow_compounding: bool,
        #[arg(long)]
        out: PathBuf,
        /// Write the per-feature missingness report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Fill missing cells with a classical imputer.
    Impute {
        #[command(flatten)]
        table: TableArgs,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// Fit on this CSV (same schema) and only transform the input.
        #[arg(long)]
        train: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Choose k for the k-NN imputer by downstream proxy accuracy.
    TuneK {
        #[command(flatten)]
        table: TableArgs,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_K_GRID)]
        grid: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        proxy_k: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Render records as sentences, one line per record.
    Contextualize {
        #[command(flatten)]
        table: TableArgs,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long, default_value = "NaN")]
        generic_token: String,
        #[arg(long)]
        with_target: bool,
        /// Descriptor catalog TOML (bundled catalog by default).
        #[arg(long)]
        catalog: Option<PathBuf>,
        /// Output file (standard output when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Produce a missing-value descriptor catalog.
    Descriptors {
        #[arg(long)]
        dataset: Option<String>,
        #[arg(long)]
        schema: Option<PathBuf>,
        /// File holding the dataset description sent to the model.
        #[arg(long)]
        describe_file: Option<PathBuf>,
        /// Use the bundled catalog even if an endpoint is configured.
        #[arg(long)]
        offline: bool,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Turn a contextual corpus into instruction-tuning JSON lines.
    Emit {
        /// Contextual corpus, one record per line.
        #[arg(long = "in", value_name = "TXT")]
        input: PathBuf,
        #[arg(long)]
        schema: Option<PathBuf>,
        #[arg(long)]
        dataset: Option<String>,
        #[arg(long)]
        out: PathBuf,
        /// Emit empty outputs (inference records).
        #[arg(long)]
        no_target: bool,
        /// Leave out the descriptor guidance sentence.
        #[arg(long)]
        plain: bool,
    },
    /// Run the repeated split/mask/impute/score grid.
    Evaluate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum, default_value = "markdown")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Imputer to compute gains against.
        #[arg(long)]
        baseline: Option<String>,
        /// External imputation as NAME=CSV; repeatable.
        #[arg(long, value_name = "NAME=CSV")]
        imputed: Vec<String>,
        /// Masked table the external tools were given.
        #[arg(long)]
        incomplete: Option<PathBuf>,
    },
    /// Run the full pipeline from a config file.
    RunAll {
        #[arg(long)]
        config: PathBuf,
    },
    /// Check a CSV against its schema (and optionally a catalog).
    Validate {
        #[command(flatten)]
        table: TableArgs,
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::file(p, e)),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes())?;
            so.flush()?;
            Ok(())
        }
    }
}

fn mechanism(
    arg: MechanismArg,
    rate: f64,
    quantile: f64,
    independent: Option<String>,
    subset_quantile: f64,
    removal_rate: f64,
) -> Mechanism {
    match arg {
        MechanismArg::Mcar => Mechanism::Mcar { rate },
        MechanismArg::Mar => Mechanism::Mar(MarParams {
            independent_col: independent,
            subset_quantile,
            removal_rate,
        }),
        MechanismArg::Mnar => Mechanism::Mnar { quantile },
    }
}

fn catalog_for(schema: &Schema, path: Option<&Path>) -> Result<DescriptorCatalog> {
    let cat = match path {
        Some(p) => DescriptorCatalog::load(p)?,
        None => load_bundled(&schema.dataset)?,
    };
    cat.validate(schema)?;
    Ok(cat)
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Inject {
            table,
            mechanism: m,
            rate,
            quantile,
            independent,
            subset_quantile,
            removal_rate,
            seed,
            allow_compounding,
            out,
            report,
        } => {
            let ds = table.load()?;
            let mut spec = MissingnessSpec::new(
                mechanism(m, rate, quantile, independent, subset_quantile, removal_rate),
                seed,
            );
            spec.allow_compounding = allow_compounding;
            let masked = inject(&ds, &spec)?;
            save_csv(&masked, &out)?;
            let rep = audit(&masked).with_spec(&spec);
            eprintln!("masked {} of {} cells", rep.missing_cells, rep.n * rep.d);
            if let Some(p) = report {
                write_out(Some(&p), &(serde_json::to_string_pretty(&rep)? + "\n"))?;
            }
        }
        Command::Impute {
            table,
            method,
            k,
            max_iter,
            tol,
            train,
            out,
        } => {
            let ds = table.load()?;
            let kind = match method {
                MethodArg::Mean => ImputerKind::Mean,
                MethodArg::Knn => ImputerKind::Knn { k },
                MethodArg::Chained => ImputerKind::Chained { max_iter, tol },
            };
            let result = match train {
                Some(p) => {
                    let fit_on = load_csv(&p, ds.schema_arc().clone())?;
                    fit_transform(&fit_on, &kind)?.1.transform(&ds)?
                }
                None => fit_transform(&ds, &kind)?.0,
            };
            if matches!(kind, ImputerKind::Chained { .. }) {
                eprintln!("sweeps: {}, converged: {}", result.sweeps, result.converged);
            }
            save_csv(&result.dataset, &out)?;
        }
        Command::TuneK {
            table,
            grid,
            proxy_k,
            seed,
        } => {
            let ds = table.load()?;
            let (k, scores) = tune_k(&ds, &grid, &eval::KnnProxy { k: proxy_k }, seed)?;
            for (g, s) in &scores {
                eprintln!("k = {g}: proxy accuracy {s:.4}");
            }
            println!("{k}");
        }
        Command::Contextualize {
            table,
            mode,
            generic_token,
            with_target,
            catalog,
            out,
        } => {
            let ds = table.load()?;
            let mode = match mode {
                ModeArg::Specific => DescriptorMode::FeatureSpecific(catalog_for(ds.schema(), catalog.as_deref())?),
                ModeArg::Generic => DescriptorMode::generic(generic_token)?,
            };
            let text: String = render_dataset(&ds, &mode, with_target)?
                .iter()
                .map(|r| r.line() + "\n")
                .collect();
            write_out(out.as_deref(), &text)?;
        }
        Command::Descriptors {
            dataset,
            schema,
            describe_file,
            offline,
            cache_dir,
            out,
        } => {
            let table = TableArgs {
                input: None,
                schema,
                dataset,
            };
            let schema = table.schema()?;
            let description = match describe_file {
                Some(p) => fs::read_to_string(&p).map_err(|e| Error::file(&p, e))?,
                None => schema.description.clone(),
            };
            let svc = if offline {
                DescriptorService::offline()
            } else {
                DescriptorService::from_env(cache_dir)?
            };
            if svc.is_offline() {
                eprintln!("no endpoint configured; using the bundled catalog");
            }
            let cat = svc.descriptors(&schema, &description)?;
            write_out(out.as_deref(), &cat.to_toml_string())?;
        }
        Command::Emit {
            input,
            schema,
            dataset,
            out,
            no_target,
            plain,
        } => {
            let schema = TableArgs {
                input: None,
                schema,
                dataset,
            }
            .schema()?;
            let text = fs::read_to_string(&input).map_err(|e| Error::file(&input, e))?;
            let lines: Vec<&str> = text.lines().filter(|l| !l.is_empty()).collect();
            let records = records_from_lines(&lines, &schema, !plain, !no_target)?;
            let file = fs::File::create(&out).map_err(|e| Error::file(&out, e))?;
            let n = write_records(&records, std::io::BufWriter::new(file))?;
            eprintln!("wrote {n} records");
        }
        Command::Evaluate {
            spec,
            format,
            out,
            baseline,
            imputed,
            incomplete,
        } => {
            let mut spec = ExperimentSpec::load(&spec)?;
            for entry in imputed {
                let (name, path) = entry
                    .split_once('=')
                    .ok_or_else(|| Error::Config(format!("--imputed expects NAME=CSV, got `{entry}`")))?;
                spec.external.push(ExternalImputation {
                    name: name.to_string(),
                    imputed: path.into(),
                    incomplete: incomplete.clone(),
                });
            }
            let report = run_grid(&spec)?;
            let format = match format {
                FormatArg::Markdown => ReportFormat::Markdown,
                FormatArg::Csv => ReportFormat::Csv,
                FormatArg::Json => ReportFormat::Json,
            };
            write_out(out.as_deref(), &render_report(&report, format, baseline.as_deref())?)?;
        }
        Command::RunAll { config } => {
            let cfg = PipelineConfig::load(&config)?;
            let manifest = run_all(&cfg)?;
            eprintln!("wrote {} files to {}", manifest.files.len(), cfg.output_dir.display());
        }
        Command::Validate { table, catalog } => {
            let ds = table.load()?;
            if let Some(p) = catalog {
                catalog_for(ds.schema(), Some(&p))?;
            }
            let rep = audit(&ds);
            println!(
                "ok: {} rows, {} features, {} missing cells",
                rep.n, rep.d, rep.missing_cells
            );
        }
    }
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_network() {
                EXIT_NETWORK
            } else {
                EXIT_DATA
            }
        }
    }
}
