use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

#[derive(Parser)]
#[command(
    name = "emgkit",
    version,
    about = "Surface-EMG hand movement recognition toolkit"
)]
struct Cli {
    /// More log output on stderr (repeat for debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

/// Where labelled data comes from: a trial directory or a feature CSV.
#[derive(Args, Clone)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Trial directory laid out as <subject>/<class>/<index>.txt.
    #[arg(long)]
    pub trials: Option<PathBuf>,
    /// Feature dataset CSV written by `emgkit features`.
    #[arg(long)]
    pub features: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose one channel of a recording into IMFs with instantaneous frequency.
    Decompose {
        /// Trial text file.
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        channel: usize,
        /// First sample of the analysed span.
        #[arg(long, default_value_t = 0)]
        start: usize,
        /// Span length; the rest of the recording when omitted.
        #[arg(long)]
        len: Option<usize>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// CSV of signal, IMFs, residual and per-IMF instantaneous frequency.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extract per-window feature vectors from a trial directory.
    Features {
        /// Trial directory.
        input: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the repeated two-fold cross-validation.
    Eval {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Second configuration evaluated on the same data and compared by a
        /// Wilcoxon signed-rank test on fold accuracies.
        #[arg(long)]
        compare: Option<PathBuf>,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// One evaluation per subject plus a summary table.
        #[arg(long)]
        per_subject: bool,
        /// Directory for report.json, confusion.csv and folds.csv.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Fit the pipeline on all data and save it.
    Train {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output model (JSON).
        #[arg(long)]
        model: PathBuf,
    },
    /// Classify windows with a saved model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        source: Source,
        /// Prediction CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic trial directory.
    Synth {
        #[arg(long)]
        out: PathBuf,
        /// Generator settings (TOML); defaults otherwise.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials_per_class: Option<usize>,
        #[arg(long, value_enum, default_value_t = Layout::Columns)]
        layout: Layout,
    },
    /// SimPlot serial frames.
    Simplot {
        #[command(subcommand)]
        op: SimplotOp,
    },
}

#[derive(Subcommand)]
enum SimplotOp {
    /// Integer samples (one line per frame, up to 4 columns) to a byte stream.
    Encode {
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Byte stream to one line of samples per recovered frame.
    Decode {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::ValueEnum, Clone, Copy)]
enum Layout {
    Columns,
    Rows,
}

impl From<Layout> for emgkit::io::ChannelLayout {
    fn from(l: Layout) -> Self {
        match l {
            Layout::Columns => Self::ColumnPerChannel,
            Layout::Rows => Self::RowPerChannel,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    let result = match cli.command {
        Command::Decompose {
            input,
            channel,
            start,
            len,
            config,
            out,
        } => commands::decompose(
            &input,
            channel,
            start,
            len,
            config.as_deref(),
            out.as_deref(),
        ),
        Command::Features { input, config, out } => {
            commands::features(&input, config.as_deref(), &out)
        }
        Command::Eval {
            source,
            config,
            compare,
            alpha,
            per_subject,
            out_dir,
        } => commands::eval(
            &source,
            config.as_deref(),
            compare.as_deref(),
            alpha,
            per_subject,
            out_dir.as_deref(),
        ),
        Command::Train {
            source,
            config,
            model,
        } => commands::train(&source, config.as_deref(), &model),
        Command::Predict { model, source, out } => {
            commands::predict(&model, &source, out.as_deref())
        }
        Command::Synth {
            out,
            config,
            seed,
            trials_per_class,
            layout,
        } => commands::synth(
            &out,
            config.as_deref(),
            seed,
            trials_per_class,
            layout.into(),
        ),
        Command::Simplot { op } => match op {
            SimplotOp::Encode { input, out } => commands::simplot_encode(&input, &out),
            SimplotOp::Decode { input, out } => commands::simplot_decode(&input, out.as_deref()),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
