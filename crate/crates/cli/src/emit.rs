//! Result writers. Every float is rounded to `SIGNIFICANT_DIGITS`
//! significant digits before it is written.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::sweep::{Channel, ResultRow};
use crate::CliError;

pub const SIGNIFICANT_DIGITS: usize = 9;

/// Column order of `results.csv`.
pub const CSV_COLUMNS: [&str; 12] = [
    "channel",
    "loss",
    "eta",
    "gain_squared",
    "c_hv",
    "c_fe",
    "p_channel_ready",
    "p_state_sent",
    "channel_ready_rate_hz",
    "state_sent_rate_hz",
    "effective_db",
    "n_max",
];

pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// Shortest text that reads back as `round_sig(x)`.
pub fn format_sig(x: f64) -> String {
    format!("{:e}", round_sig(x))
}

fn opt(x: Option<f64>) -> String {
    x.map(format_sig).unwrap_or_default()
}

fn channel_name(c: Channel) -> &'static str {
    match c {
        Channel::Direct => "direct",
        Channel::Corrected => "corrected",
    }
}

pub trait Emitter: Send + Sync {
    fn name(&self) -> &'static str;
    fn file_name(&self) -> &'static str;
    fn write(&self, rows: &[ResultRow], out: &mut dyn Write) -> Result<(), std::io::Error>;
}

pub struct CsvEmitter;

impl Emitter for CsvEmitter {
    fn name(&self) -> &'static str {
        "csv"
    }

    fn file_name(&self) -> &'static str {
        "results.csv"
    }

    fn write(&self, rows: &[ResultRow], out: &mut dyn Write) -> Result<(), std::io::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_COLUMNS)?;
        for r in rows {
            w.write_record([
                channel_name(r.channel).to_string(),
                format_sig(r.loss),
                opt(r.eta),
                opt(r.gain_squared),
                opt(r.c_hv),
                format_sig(r.c_fe),
                format_sig(r.p_channel_ready),
                format_sig(r.p_state_sent),
                format_sig(r.channel_ready_rate),
                format_sig(r.state_sent_rate),
                opt(r.effective_db),
                r.n_max.to_string(),
            ])?;
        }
        w.flush()
    }
}

pub struct JsonEmitter;

impl Emitter for JsonEmitter {
    fn name(&self) -> &'static str {
        "json"
    }

    fn file_name(&self) -> &'static str {
        "results.json"
    }

    fn write(&self, rows: &[ResultRow], out: &mut dyn Write) -> Result<(), std::io::Error> {
        let rounded: Vec<ResultRow> = rows.iter().map(rounded_row).collect();
        serde_json::to_writer_pretty(&mut *out, &rounded)?;
        writeln!(out)
    }
}

fn rounded_row(r: &ResultRow) -> ResultRow {
    let o = |x: Option<f64>| x.map(round_sig);
    ResultRow {
        channel: r.channel,
        loss: round_sig(r.loss),
        eta: o(r.eta),
        gain_squared: o(r.gain_squared),
        c_hv: o(r.c_hv),
        c_fe: round_sig(r.c_fe),
        p_channel_ready: round_sig(r.p_channel_ready),
        p_state_sent: round_sig(r.p_state_sent),
        channel_ready_rate: round_sig(r.channel_ready_rate),
        state_sent_rate: round_sig(r.state_sent_rate),
        effective_db: o(r.effective_db),
        n_max: r.n_max,
    }
}

pub struct EmitterRegistry {
    emitters: BTreeMap<&'static str, Box<dyn Emitter>>,
}

impl EmitterRegistry {
    pub fn empty() -> Self {
        EmitterRegistry {
            emitters: BTreeMap::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut r = EmitterRegistry::empty();
        r.register(Box::new(CsvEmitter))
            .expect("distinct builtin names");
        r.register(Box::new(JsonEmitter))
            .expect("distinct builtin names");
        r
    }

    pub fn register(&mut self, emitter: Box<dyn Emitter>) -> Result<(), CliError> {
        let name = emitter.name();
        if self.emitters.contains_key(name) {
            return Err(CliError::Config(format!(
                "emitter `{name}` registered twice"
            )));
        }
        self.emitters.insert(name, emitter);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&dyn Emitter, CliError> {
        self.emitters.get(name).map(|e| e.as_ref()).ok_or_else(|| {
            CliError::Config(format!(
                "unknown format `{name}` (known: {})",
                self.names().join(", ")
            ))
        })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.emitters.keys().copied().collect()
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CliError::Write {
            path: path.to_path_buf(),
            source,
        })
}

fn write_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Write {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `rows` with `emitter` into `dir` and returns the file path.
pub fn emit(rows: &[ResultRow], emitter: &dyn Emitter, dir: &Path) -> Result<PathBuf, CliError> {
    let path = dir.join(emitter.file_name());
    let mut f = create(&path)?;
    emitter.write(rows, &mut f).map_err(write_err(&path))?;
    f.flush().map_err(write_err(&path))?;
    Ok(path)
}

/// One `fig3_L<loss>.dat` per loss: columns η, C_hv and the direct C_fe at
/// that loss, whitespace separated, for gnuplot.
pub fn emit_fig3(rows: &[ResultRow], dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut by_loss: BTreeMap<String, Vec<&ResultRow>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.channel == Channel::Corrected) {
        by_loss
            .entry(format!("{}", round_sig(r.loss)))
            .or_default()
            .push(r);
    }
    let mut paths = Vec::new();
    for (loss, group) in by_loss {
        let path = dir.join(format!("fig3_L{loss}.dat"));
        let mut f = create(&path)?;
        let mut body = format!("# loss {loss}\n# eta c_hv c_fe\n");
        for r in group {
            body.push_str(&format!(
                "{} {} {}\n",
                opt(r.eta),
                opt(r.c_hv),
                format_sig(r.c_fe)
            ));
        }
        f.write_all(body.as_bytes()).map_err(write_err(&path))?;
        f.flush().map_err(write_err(&path))?;
        paths.push(path);
    }
    Ok(paths)
}
