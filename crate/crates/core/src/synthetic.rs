//! Seeded synthetic corpora with known topic structure.

use std::fs::File;
use std::path::{Path, PathBuf};

use chrono::{Days, Months, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Document, DocumentSet, RootList, VARIANT_DELIMITER};
use crate::error::{Error, Result};

/// Documents, root terms and the topic every root was drawn from.
#[derive(Clone, Debug)]
pub struct SyntheticCorpus {
    pub documents: Vec<Document>,
    /// `(canonical, variants)` per root, in term id order.
    pub roots: Vec<(String, Vec<String>)>,
    pub topic_of_root: Vec<usize>,
}

/// Disjoint topics evolving through yearly periods.
#[derive(Clone, Debug, PartialEq)]
pub struct TopicSpec {
    pub topics: usize,
    /// Stable vocabulary of each topic.
    pub core_terms: usize,
    /// Extra terms per topic, one of which is active per period.
    pub drifting_terms: usize,
    pub periods: usize,
    pub docs_per_period: usize,
    /// Terms drawn per document.
    pub terms_per_doc: (usize, usize),
    /// Chance that a document also mentions a term of another topic.
    pub cross_topic: f64,
    /// Periods each topic stays absent at the start, cycling by topic.
    pub stagger: usize,
    pub seed: u64,
}

impl TopicSpec {
    /// Three disjoint topic chains over six periods, 40 documents per
    /// period.
    pub fn planted() -> Self {
        TopicSpec {
            topics: 3,
            core_terms: 6,
            drifting_terms: 2,
            periods: 6,
            docs_per_period: 40,
            terms_per_doc: (3, 5),
            cross_topic: 0.0,
            stagger: 0,
            seed: 1,
        }
    }

    /// 5000 documents, 500 roots, 12 periods.
    pub fn desk_scale() -> Self {
        TopicSpec {
            topics: 50,
            core_terms: 7,
            drifting_terms: 3,
            periods: 12,
            docs_per_period: 417,
            terms_per_doc: (3, 6),
            cross_topic: 0.15,
            stagger: 3,
            seed: 7,
        }
    }

    pub fn roots_per_topic(&self) -> usize {
        self.core_terms + self.drifting_terms
    }

    /// The same corpus shape with `factor` times the topics and documents.
    pub fn scaled(&self, factor: usize) -> Self {
        TopicSpec {
            topics: self.topics * factor,
            docs_per_period: self.docs_per_period * factor,
            ..self.clone()
        }
    }

    fn active(&self, topic: usize, period: usize) -> bool {
        self.stagger == 0 || period >= topic % (self.stagger + 1)
    }

    pub fn generate(&self) -> SyntheticCorpus {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let per_topic = self.roots_per_topic();
        let mut roots = Vec::with_capacity(self.topics * per_topic);
        let mut topic_of_root = Vec::with_capacity(self.topics * per_topic);
        for t in 0..self.topics {
            for j in 0..per_topic {
                let canonical = format!("k{t}w{j}");
                let variants = vec![format!("{canonical}s")];
                roots.push((canonical, variants));
                topic_of_root.push(t);
            }
        }

        let origin = NaiveDate::from_ymd_opt(2000, 1, 1).expect("valid date");
        let mut documents = Vec::with_capacity(self.periods * self.docs_per_period);
        for p in 0..self.periods {
            let year = origin
                .checked_add_months(Months::new(12 * p as u32))
                .expect("date in range");
            let live: Vec<usize> = (0..self.topics).filter(|&t| self.active(t, p)).collect();
            for i in 0..self.docs_per_period {
                let topic = live[i % live.len()];
                let mut vocab: Vec<usize> = (0..self.core_terms).collect();
                if self.drifting_terms > 0 {
                    vocab.push(self.core_terms + p % self.drifting_terms);
                }
                let k = rng
                    .gen_range(self.terms_per_doc.0..=self.terms_per_doc.1)
                    .min(vocab.len());
                let mut words: Vec<String> = vocab
                    .choose_multiple(&mut rng, k)
                    .map(|&j| self.form(&roots, topic * per_topic + j, &mut rng))
                    .collect();
                if live.len() > 1 && rng.gen_bool(self.cross_topic) {
                    let other =
                        live[(live.iter().position(|&t| t == topic).unwrap() + 1) % live.len()];
                    let j = rng.gen_range(0..self.core_terms);
                    words.push(self.form(&roots, other * per_topic + j, &mut rng));
                }
                let day = rng.gen_range(0..365);
                let date = year + Days::new(day);
                let id = format!("p{p}d{i}");
                let text = format!("on {} and more", words.join(" with "));
                documents.push(Document::new(id, date, text));
            }
        }
        SyntheticCorpus {
            documents,
            roots,
            topic_of_root,
        }
    }

    fn form(&self, roots: &[(String, Vec<String>)], root: usize, rng: &mut ChaCha8Rng) -> String {
        let (canonical, variants) = &roots[root];
        if rng.gen_bool(0.2) {
            variants[0].clone()
        } else {
            canonical.clone()
        }
    }
}

impl SyntheticCorpus {
    pub fn root_list(&self) -> Result<RootList> {
        RootList::new(self.roots.iter().cloned())
    }

    /// Unindexed documents.
    pub fn document_set(&self) -> Result<DocumentSet> {
        DocumentSet::from_documents(self.documents.clone())
    }

    /// Writes `corpus.csv` and `roots.txt` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        let corpus = dir.join("corpus.csv");
        let roots = dir.join("roots.txt");
        let file = File::create(&corpus).map_err(|source| Error::Write {
            path: corpus.clone(),
            source,
        })?;
        let mut writer = csv::Writer::from_writer(file);
        let csv_err = |e: csv::Error| Error::Config(format!("writing {}: {e}", corpus.display()));
        writer
            .write_record(["id", "date", "title", "abstract"])
            .map_err(csv_err)?;
        for d in &self.documents {
            writer
                .write_record([d.id.as_str(), &d.date.to_string(), "", d.text.as_str()])
                .map_err(csv_err)?;
        }
        writer.flush().map_err(|source| Error::Write {
            path: corpus.clone(),
            source,
        })?;
        let delimiter = VARIANT_DELIMITER.to_string();
        let lines: Vec<String> = self
            .roots
            .iter()
            .map(|(c, v)| {
                std::iter::once(c.as_str())
                    .chain(v.iter().map(String::as_str))
                    .collect::<Vec<_>>()
                    .join(&delimiter)
            })
            .collect();
        std::fs::write(&roots, lines.join("\n") + "\n").map_err(|source| Error::Write {
            path: roots.clone(),
            source,
        })?;
        Ok((corpus, roots))
    }
}
