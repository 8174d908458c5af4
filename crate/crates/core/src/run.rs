//! Input loading and the compare / corpus / dump pipelines.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::classfile::parse_class_file;
use crate::error::Error;
use crate::fixture::load_fixture;
use crate::linearize::{inline_all, linearize_abstract, MethodTable};
use crate::program::{assemble_program, ProgramModel};
use crate::similarity::{
    compare_programs, CompareOptions, ComparisonReport, InvolvedBaseline, Mode, DEFAULT_MIN_MATCH,
    DEFAULT_PAIRING_THRESHOLD,
};
use crate::slt::{abstract_identifiers, lex_source, slt_compare_tokens, LexToken};
use crate::token::write_dump_lines;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub mode: Mode,
    pub min_match: usize,
    pub pairing_threshold: f64,
    pub involved_baseline: InvolvedBaseline,
    pub include_synthetic: bool,
    pub output_format: OutputFormat,
    pub verbose: bool,
    /// Worker threads for corpus runs; `None` uses every core.
    pub jobs: Option<usize>,
    pub slt_abstract_identifiers: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: Mode::La,
            min_match: DEFAULT_MIN_MATCH,
            pairing_threshold: DEFAULT_PAIRING_THRESHOLD,
            involved_baseline: InvolvedBaseline::Min,
            include_synthetic: true,
            output_format: OutputFormat::Text,
            verbose: false,
            jobs: None,
            slt_abstract_identifiers: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.min_match < 1 {
            return Err(Error::Config("min-match must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.pairing_threshold) {
            return Err(Error::Config("pairing threshold must lie in [0, 1]".into()));
        }
        if self.jobs == Some(0) {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        Ok(())
    }

    pub fn compare_options(&self) -> CompareOptions {
        CompareOptions {
            min_match: self.min_match,
            pairing_threshold: self.pairing_threshold,
            involved: self.involved_baseline,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum InputKind {
    Class,
    Fixture,
    Source,
}

fn input_kind(path: &Path) -> Option<InputKind> {
    match path.extension()?.to_str()? {
        "class" => Some(InputKind::Class),
        "json" | "fixture" => Some(InputKind::Fixture),
        "java" => Some(InputKind::Source),
        _ => None,
    }
}

/// Files of a submission, sorted by path, grouped by kind.
#[derive(Debug, Default)]
struct Inputs {
    classes: Vec<PathBuf>,
    fixtures: Vec<PathBuf>,
    sources: Vec<PathBuf>,
}

fn collect_inputs(path: &Path, mode: Mode) -> Result<Inputs, Error> {
    let meta = fs::metadata(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::InputNotFound(path.to_path_buf()),
        _ => Error::io(path, e),
    })?;
    let mut inputs = Inputs::default();
    if meta.is_file() {
        // A single file given explicitly is source text in SLT mode unless
        // it is recognisably something else.
        let kind = input_kind(path).unwrap_or(if mode == Mode::Slt {
            InputKind::Source
        } else {
            InputKind::Fixture
        });
        inputs.push(kind, path.to_path_buf());
        return Ok(inputs);
    }
    for entry in WalkDir::new(path).sort_by_file_name() {
        let entry = entry.map_err(|e| {
            let at = e.path().unwrap_or(path).to_path_buf();
            Error::io(at, e.into())
        })?;
        if entry.file_type().is_file() {
            if let Some(kind) = input_kind(entry.path()) {
                inputs.push(kind, entry.into_path());
            }
        }
    }
    Ok(inputs)
}

impl Inputs {
    fn push(&mut self, kind: InputKind, path: PathBuf) {
        match kind {
            InputKind::Class => self.classes.push(path),
            InputKind::Fixture => self.fixtures.push(path),
            InputKind::Source => self.sources.push(path),
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Error> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn read_text(path: &Path) -> Result<String, Error> {
    String::from_utf8(read(path)?).map_err(|e| {
        Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::InvalidData, e),
        )
    })
}

/// Loads a class-file or fixture submission.
pub fn load_program(path: &Path) -> Result<ProgramModel, Error> {
    let inputs = collect_inputs(path, Mode::La)?;
    program_from_inputs(path, &inputs)
}

fn program_from_inputs(path: &Path, inputs: &Inputs) -> Result<ProgramModel, Error> {
    match (inputs.classes.is_empty(), inputs.fixtures.is_empty()) {
        (false, false) => Err(Error::MixedInputKinds(path.to_path_buf())),
        (false, true) => {
            let classes = inputs
                .classes
                .par_iter()
                .map(|p| {
                    parse_class_file(&read(p)?).map_err(|source| Error::ClassFile {
                        path: p.clone(),
                        source,
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(assemble_program(classes)?)
        }
        (true, false) => {
            let mut classes = Vec::new();
            for p in &inputs.fixtures {
                let program = load_fixture(&read_text(p)?).map_err(|source| Error::Fixture {
                    path: p.clone(),
                    source,
                })?;
                classes.extend(program.classes.into_values());
            }
            Ok(assemble_program(classes)?)
        }
        (true, true) if !inputs.sources.is_empty() => Err(Error::ModeMismatch {
            path: path.to_path_buf(),
            message: "source files need --mode slt".into(),
        }),
        (true, true) => Err(Error::EmptySubmission(path.to_path_buf())),
    }
}

/// Lexes every source file of a submission into one stream, files in path
/// order.
pub fn load_source_stream(path: &Path, abstract_ids: bool) -> Result<Vec<LexToken>, Error> {
    let inputs = collect_inputs(path, Mode::Slt)?;
    source_stream_from_inputs(path, &inputs, abstract_ids)
}

fn source_stream_from_inputs(
    path: &Path,
    inputs: &Inputs,
    abstract_ids: bool,
) -> Result<Vec<LexToken>, Error> {
    if inputs.sources.is_empty() {
        if inputs.classes.is_empty() && inputs.fixtures.is_empty() {
            return Err(Error::EmptySubmission(path.to_path_buf()));
        }
        return Err(Error::ModeMismatch {
            path: path.to_path_buf(),
            message: "SLT mode needs source text, found only class files or fixtures".into(),
        });
    }
    let mut stream = Vec::new();
    for p in &inputs.sources {
        let tokens = lex_source(&read_text(p)?).map_err(|source| Error::Lex {
            path: p.clone(),
            source,
        })?;
        stream.extend(tokens);
    }
    if abstract_ids {
        abstract_identifiers(&mut stream);
    }
    Ok(stream)
}

/// Runs the low-level pipeline for `mode` up to, but not including,
/// inlining. LA fills abstract methods; LA-M leaves them empty.
pub fn prepare_table(program: &ProgramModel, mode: Mode) -> Result<MethodTable, Error> {
    match mode {
        Mode::La => linearize_abstract(program),
        Mode::LaM => Ok(MethodTable::extract(program)?),
        Mode::Slt => Err(Error::Config("SLT mode has no method table".into())),
    }
}

/// The table compared in `mode`: prepared, inlined and optionally without
/// compiler-generated methods.
pub fn process_program(
    program: &ProgramModel,
    mode: Mode,
    include_synthetic: bool,
) -> Result<MethodTable, Error> {
    let prepared = prepare_table(program, mode)?;
    let mut table = inline_all(&prepared, program);
    if !include_synthetic {
        drop_compiler_generated(&mut table, program);
    }
    Ok(table)
}

fn drop_compiler_generated(table: &mut MethodTable, program: &ProgramModel) {
    table.retain(|k| {
        !program
            .methods_view
            .get(k)
            .is_some_and(|r| r.compiler_generated)
    });
}

/// One loaded and processed submission.
#[derive(Debug, Clone)]
pub enum Prepared {
    Table(MethodTable),
    Stream(Vec<LexToken>),
}

pub fn prepare_submission(config: &RunConfig, path: &Path) -> Result<Prepared, Error> {
    let inputs = collect_inputs(path, config.mode)?;
    match config.mode {
        Mode::Slt => Ok(Prepared::Stream(source_stream_from_inputs(
            path,
            &inputs,
            config.slt_abstract_identifiers,
        )?)),
        mode => {
            let program = program_from_inputs(path, &inputs)?;
            Ok(Prepared::Table(process_program(
                &program,
                mode,
                config.include_synthetic,
            )?))
        }
    }
}

pub fn compare_prepared(config: &RunConfig, a: &Prepared, b: &Prepared) -> ComparisonReport {
    let options = config.compare_options();
    let report = match (a, b) {
        (Prepared::Table(a), Prepared::Table(b)) => compare_programs(a, b, config.mode, &options),
        (Prepared::Stream(a), Prepared::Stream(b)) => slt_compare_tokens(a, b, &options),
        _ => unreachable!("both sides are prepared under one mode"),
    };
    if config.verbose {
        report
    } else {
        report.without_tiles()
    }
}

pub fn run_compare(
    config: &RunConfig,
    path_a: &Path,
    path_b: &Path,
) -> Result<ComparisonReport, Error> {
    config.validate()?;
    let a = prepare_submission(config, path_a)?;
    let b = prepare_submission(config, path_b)?;
    Ok(compare_prepared(config, &a, &b)
        .with_names(path_a.display().to_string(), path_b.display().to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub config: RunConfig,
    pub submissions: Vec<String>,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusResult {
    pub reports: Vec<ComparisonReport>,
    /// Indices into `reports`, most similar first.
    pub ranking: Vec<usize>,
    pub metadata: RunMetadata,
}

impl CorpusResult {
    pub fn ranked(&self) -> impl Iterator<Item = &ComparisonReport> {
        self.ranking.iter().map(|&i| &self.reports[i])
    }
}

/// Submissions of a corpus directory: its subdirectories and any top-level
/// class, fixture or source files, sorted by name.
pub fn corpus_submissions(dir: &Path) -> Result<Vec<PathBuf>, Error> {
    let entries = fs::read_dir(dir).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::InputNotFound(dir.to_path_buf()),
        _ => Error::io(dir, e),
    })?;
    let mut out = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if path.is_dir() || input_kind(&path).is_some() {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

fn submission_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn run_corpus(config: &RunConfig, dir: &Path) -> Result<CorpusResult, Error> {
    config.validate()?;
    let started = Instant::now();
    let submissions = corpus_submissions(dir)?;
    if submissions.len() < 2 {
        return Err(Error::FewerThanTwoSubmissions {
            dir: dir.to_path_buf(),
            found: submissions.len(),
        });
    }
    let names: Vec<String> = submissions.iter().map(|p| submission_name(p)).collect();

    let work = || -> Result<Vec<ComparisonReport>, Error> {
        let prepared = submissions
            .par_iter()
            .map(|p| prepare_submission(config, p))
            .collect::<Result<Vec<_>, _>>()?;
        let pairs: Vec<(usize, usize)> = (0..prepared.len())
            .flat_map(|i| (i + 1..prepared.len()).map(move |j| (i, j)))
            .collect();
        Ok(pairs
            .par_iter()
            .map(|&(i, j)| {
                compare_prepared(config, &prepared[i], &prepared[j])
                    .with_names(&names[i], &names[j])
            })
            .collect())
    };
    let reports = match config.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(work)?,
        None => work()?,
    };

    let mut ranking: Vec<usize> = (0..reports.len()).collect();
    ranking.sort_by(|&x, &y| {
        let (rx, ry) = (&reports[x], &reports[y]);
        ry.similarity
            .total_cmp(&rx.similarity)
            .then_with(|| (&rx.a, &rx.b).cmp(&(&ry.a, &ry.b)))
    });
    Ok(CorpusResult {
        reports,
        ranking,
        metadata: RunMetadata {
            config: config.clone(),
            submissions: names,
            elapsed_ms: started.elapsed().as_millis() as u64,
        },
    })
}

/// Token listing of a submission. Low-level modes list each method's
/// sequence after abstract linearization (LA) or extraction (LA-M), and
/// after inlining when `inline` is set. SLT lists lexemes as
/// `file<TAB>byte offset<TAB>kind<TAB>text`.
pub fn dump_tokens(config: &RunConfig, path: &Path, inline: bool) -> Result<String, Error> {
    config.validate()?;
    let inputs = collect_inputs(path, config.mode)?;
    let mut out = String::new();
    if config.mode == Mode::Slt {
        for p in &inputs.sources {
            let mut tokens = lex_source(&read_text(p)?).map_err(|source| Error::Lex {
                path: p.clone(),
                source,
            })?;
            if config.slt_abstract_identifiers {
                abstract_identifiers(&mut tokens);
            }
            for t in tokens {
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\n",
                    p.display(),
                    t.start,
                    t.kind.as_str(),
                    t.text.escape_debug()
                ));
            }
        }
        if inputs.sources.is_empty() {
            source_stream_from_inputs(path, &inputs, false)?;
        }
        return Ok(out);
    }

    let program = program_from_inputs(path, &inputs)?;
    let mut table = prepare_table(&program, config.mode)?;
    if inline {
        table = inline_all(&table, &program);
    }
    if !config.include_synthetic {
        drop_compiler_generated(&mut table, &program);
    }
    for (key, seq) in table.iter() {
        write_dump_lines(&mut out, key, &seq.tokens);
    }
    Ok(out)
}
