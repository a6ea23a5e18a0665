//! End-to-end builds: ingest, period graphs, matching, sea level rise,
//! projection and export.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};
use serde::Serialize;

use crate::config::BuildConfig;
use crate::corpus::{
    index_documents, parse_corpus, parse_rootlist, periodize, DocumentSet, PeriodSet, RootList,
};
use crate::error::{Error, Result};
use crate::fields::{detect_groups, SimilarityGraph};
use crate::ids::{PeriodId, TermId};
use crate::matching::{build_kinship_graph, KinshipGraph};
use crate::projection::{project, PhyloExport, ProjectionInput};
use crate::sea_level::{initial_continent, rise, GhostLink, Phylomemy, SplitTree, TraceStep};

/// Everything that does not depend on λ.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub documents: DocumentSet,
    pub periods: PeriodSet,
    pub roots: RootList,
    pub similarity: Vec<SimilarityGraph>,
    pub graph: KinshipGraph,
    pub continent: SplitTree,
}

impl Reconstruction {
    /// Reads the corpus and root list named in `config`.
    pub fn load(config: &BuildConfig) -> Result<Self> {
        let started = Instant::now();
        let documents =
            parse_corpus(&config.corpus.path, config.corpus.format).map_err(|e| e.at("ingest"))?;
        let roots = parse_rootlist(&config.corpus.rootlist).map_err(|e| e.at("ingest"))?;
        info!(
            "ingest: {} documents, {} rejected, {} roots in {:.2?}",
            documents.len(),
            documents.rejects.len(),
            roots.len(),
            started.elapsed()
        );
        Self::from_documents(documents, roots, config)
    }

    pub fn from_documents(
        documents: DocumentSet,
        roots: RootList,
        config: &BuildConfig,
    ) -> Result<Self> {
        let started = Instant::now();
        let documents = index_documents(documents, &roots);
        let unindexed = documents.unindexed().count();
        if unindexed > 0 {
            warn!("index: {unindexed} documents contain no root term");
        }
        let periods = periodize(&documents, &config.periods).map_err(|e| e.at("periods"))?;
        info!(
            "index: {} periods, {} unindexed documents in {:.2?}",
            periods.len(),
            unindexed,
            started.elapsed()
        );

        let started = Instant::now();
        let fields = detect_groups(&documents, &periods, &config.fields)
            .map_err(|e| e.at("period graphs"))?;
        info!(
            "period graphs: {} groups, {} edges in {:.2?}",
            fields.groups.len(),
            fields.graphs.iter().map(|g| g.edges.len()).sum::<usize>(),
            started.elapsed()
        );

        let started = Instant::now();
        let graph = build_kinship_graph(fields.groups, periods.len(), &config.matching);
        let continent = initial_continent(&graph);
        info!(
            "matching: {} links, {} window extensions, {} components in {:.2?}",
            graph.links.len(),
            graph.extensions.len(),
            continent.nodes().len(),
            started.elapsed()
        );
        Ok(Reconstruction {
            documents,
            periods,
            roots,
            similarity: fields.graphs,
            graph,
            continent,
        })
    }

    pub fn phylomemy(&self, lambda: f64) -> Result<Phylomemy> {
        let started = Instant::now();
        let phylo = rise(&self.continent, &self.graph, lambda).map_err(|e| e.at("sea level"))?;
        info!(
            "sea level λ={lambda}: {} branches, {} ghost links in {:.2?}",
            phylo.tree.leaves().count(),
            phylo.ghost_links.len(),
            started.elapsed()
        );
        Ok(phylo)
    }

    pub fn export(&self, phylomemy: &Phylomemy, config: &BuildConfig) -> Result<PhyloExport> {
        let started = Instant::now();
        let input = ProjectionInput {
            phylomemy,
            documents: &self.documents,
            periods: &self.periods,
            roots: &self.roots,
        };
        let export = project(input, &config.projection, config.echo(phylomemy.lambda))
            .map_err(|e| e.at("projection"))?;
        info!(
            "projection: {} branches kept, {} removed in {:.2?}",
            export.branches.len(),
            export.metadata.removed_branches.len(),
            started.elapsed()
        );
        Ok(export)
    }
}

/// One export of a build.
#[derive(Clone, Debug)]
pub struct BuildOutput {
    pub lambda: f64,
    pub path: PathBuf,
    pub phylomemy: Phylomemy,
    pub export: PhyloExport,
}

/// Runs every stage in memory, one phylomemy and export per λ.
pub fn build(config: &BuildConfig) -> Result<(Reconstruction, Vec<BuildOutput>)> {
    config.validate()?;
    let rec = Reconstruction::load(config)?;
    let outputs = config
        .lambdas()
        .into_iter()
        .map(|lambda| {
            let phylomemy = rec.phylomemy(lambda)?;
            let export = rec.export(&phylomemy, config)?;
            Ok(BuildOutput {
                lambda,
                path: config.output_for(lambda),
                phylomemy,
                export,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((rec, outputs))
}

/// Builds and writes every export, plus the rejects sidecar and, when
/// asked, the diagnostic dumps. Returns the export paths.
pub fn run_build(config: &BuildConfig) -> Result<Vec<PathBuf>> {
    let (rec, outputs) = build(config)?;
    if let Some(dir) = config
        .output
        .path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
    {
        fs::create_dir_all(dir).map_err(|source| Error::Write {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    if !rec.documents.rejects.is_empty() {
        let path = sidecar(&config.output.path, "rejects.tsv");
        rec.documents
            .write_rejects(&path)
            .map_err(|e| e.at("export"))?;
        warn!(
            "{} rejected records listed in {}",
            rec.documents.rejects.len(),
            path.display()
        );
    }
    if config.output.diagnostics {
        write_json(
            &sidecar(&config.output.path, "graphs.json"),
            &graph_dump(&rec.similarity),
        )?;
        write_json(&sidecar(&config.output.path, "links.json"), &rec.graph)?;
    }
    let mut paths = Vec::with_capacity(outputs.len());
    for out in outputs {
        out.export.write(&out.path).map_err(|e| e.at("export"))?;
        if config.output.diagnostics {
            let trace = TraceDump {
                lambda: out.lambda,
                tree: &out.phylomemy.tree,
                trace: &out.phylomemy.trace,
                ghost_links: &out.phylomemy.ghost_links,
                submerged_links: &out.phylomemy.submerged_links,
            };
            write_json(&sidecar(&out.path, "trace.json"), &trace)?;
        }
        info!("export: {}", out.path.display());
        paths.push(out.path);
    }
    Ok(paths)
}

/// `dir/stem.json` → `dir/stem.{suffix}`.
fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("phylomemy");
    path.with_file_name(format!("{stem}.{suffix}"))
}

#[derive(Serialize)]
struct GraphDump {
    period: PeriodId,
    nodes: Vec<TermId>,
    edges: Vec<(TermId, TermId, f64)>,
}

fn graph_dump(graphs: &[SimilarityGraph]) -> Vec<GraphDump> {
    graphs
        .iter()
        .map(|g| GraphDump {
            period: g.period,
            nodes: g.nodes.iter().copied().collect(),
            edges: g.edges.iter().map(|(&(x, y), &w)| (x, y, w)).collect(),
        })
        .collect()
}

#[derive(Serialize)]
struct TraceDump<'a> {
    lambda: f64,
    tree: &'a SplitTree,
    trace: &'a [TraceStep],
    ghost_links: &'a [GhostLink],
    submerged_links: &'a [GhostLink],
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text).map_err(|source| Error::Write {
        path: path.to_path_buf(),
        source,
    })
}
