use std::collections::HashMap;

use rayon::prelude::*;

use crate::ids::TermId;
use crate::terms::TermSet;

use super::{DocumentSet, RootList};

/// Case-folds `text` and splits it on every non-alphanumeric character.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

#[derive(Default)]
struct Node {
    next: HashMap<String, usize>,
    root: Option<TermId>,
}

/// Token-level trie over every root form.
struct FormTrie {
    nodes: Vec<Node>,
}

impl FormTrie {
    fn build(roots: &RootList) -> Self {
        let mut nodes = vec![Node::default()];
        for root in roots.roots() {
            for form in root.forms() {
                let mut at = 0;
                for token in tokenize(form) {
                    at = match nodes[at].next.get(&token) {
                        Some(&n) => n,
                        None => {
                            nodes.push(Node::default());
                            let n = nodes.len() - 1;
                            nodes[at].next.insert(token, n);
                            n
                        }
                    };
                }
                if at != 0 {
                    nodes[at].root = Some(root.id);
                }
            }
        }
        FormTrie { nodes }
    }

    /// Longest form starting at `tokens[0]`, as `(root, token count)`.
    fn longest_match(&self, tokens: &[String]) -> Option<(TermId, usize)> {
        let mut at = 0;
        let mut best = None;
        for (i, token) in tokens.iter().enumerate() {
            match self.nodes[at].next.get(token) {
                Some(&n) => at = n,
                None => break,
            }
            if let Some(root) = self.nodes[at].root {
                best = Some((root, i + 1));
            }
        }
        best
    }

    fn scan(&self, text: &str) -> TermSet {
        let tokens = tokenize(text);
        let mut found = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            match self.longest_match(&tokens[i..]) {
                Some((root, len)) => {
                    found.push(root);
                    i += len;
                }
                None => i += 1,
            }
        }
        found.into_iter().collect()
    }
}

/// Replaces every document's term set with the roots found in its text.
///
/// Matching is leftmost-longest over whole tokens, so a short root nested
/// inside a longer matched root is not counted. Re-indexing is idempotent.
pub fn index_documents(mut docs: DocumentSet, roots: &RootList) -> DocumentSet {
    let trie = FormTrie::build(roots);
    docs.documents
        .par_iter_mut()
        .for_each(|d| d.terms = trie.scan(&d.text));
    docs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;
    use chrono::NaiveDate;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn doc(text: &str) -> Document {
        Document::new("d", NaiveDate::from_ymd_opt(2000, 1, 1).unwrap(), text)
    }

    fn index_one(text: &str, roots: &RootList) -> Vec<String> {
        let set = DocumentSet::from_documents(vec![doc(text)]).unwrap();
        let set = index_documents(set, roots);
        set.documents[0]
            .terms
            .iter()
            .map(|t| roots.label(t).to_string())
            .collect()
    }

    #[test]
    fn multiword_root() {
        let roots = RootList::new([("immune response", vec![])]).unwrap();
        assert_eq!(
            index_one("the immune response of mice", &roots),
            ["immune response"]
        );
        assert!(index_one("the immune system", &roots).is_empty());
    }

    #[test]
    fn variant_hit() {
        let roots = RootList::new([("co-word", vec!["coword"])]).unwrap();
        assert_eq!(index_one("coword maps", &roots), ["co-word"]);
        assert_eq!(index_one("Co-Word maps", &roots), ["co-word"]);
    }

    #[test]
    fn longest_match_first() {
        let roots = RootList::new([("response", vec![]), ("immune response", vec![])]).unwrap();
        assert_eq!(index_one("immune response", &roots), ["immune response"]);
        let mut both = index_one("immune response and response", &roots);
        both.sort();
        assert_eq!(both, ["immune response", "response"]);
    }

    #[test]
    fn whole_tokens_only() {
        let roots = RootList::new([("map", vec![])]).unwrap();
        assert!(index_one("mapping maps", &roots).is_empty());
    }

    /// Independent scanner: at each token position try every form of every
    /// root against the token window and keep the longest.
    fn naive_scan(text: &str, roots: &RootList) -> TermSet {
        let tokens = tokenize(text);
        let mut out = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            let mut best: Option<(TermId, usize)> = None;
            for root in roots.roots() {
                for form in root.forms() {
                    let pattern = tokenize(form);
                    let n = pattern.len();
                    if n > 0
                        && i + n <= tokens.len()
                        && tokens[i..i + n] == pattern[..]
                        && best.is_none_or(|(_, len)| n > len)
                    {
                        best = Some((root.id, n));
                    }
                }
            }
            match best {
                Some((id, n)) => {
                    out.push(id);
                    i += n;
                }
                None => i += 1,
            }
        }
        out.into_iter().collect()
    }

    #[test]
    fn random_docs_match_naive_scanner() {
        let vocab = ["alpha", "beta", "gamma", "delta", "eps"];
        let roots = RootList::new([
            ("alpha beta", vec!["alpha-beta gamma"]),
            ("beta", vec![]),
            ("gamma delta", vec!["gd"]),
            ("delta", vec!["eps eps"]),
        ])
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let docs: Vec<Document> = (0..10)
            .map(|i| {
                let n = rng.gen_range(3..15);
                let words: Vec<&str> = (0..n)
                    .map(|_| {
                        if rng.gen_bool(0.1) {
                            "gd"
                        } else {
                            vocab[rng.gen_range(0..vocab.len())]
                        }
                    })
                    .collect();
                let mut d = doc(&words.join(if i % 2 == 0 { " " } else { ", " }));
                d.id = format!("d{i}");
                d
            })
            .collect();
        let expected: Vec<TermSet> = docs.iter().map(|d| naive_scan(&d.text, &roots)).collect();
        let set = index_documents(DocumentSet::from_documents(docs).unwrap(), &roots);
        for (d, want) in set.documents.iter().zip(expected) {
            assert_eq!(d.terms, want, "text {:?}", d.text);
        }
    }

    proptest! {
        #[test]
        fn reindexing_is_idempotent(words in proptest::collection::vec(0usize..4, 0..20)) {
            let vocab = ["immune", "response", "vaccine", "x"];
            let text: Vec<&str> = words.iter().map(|&w| vocab[w]).collect();
            let roots = RootList::new([("immune response", vec![]), ("vaccine", vec!["x"])]).unwrap();
            let set = DocumentSet::from_documents(vec![doc(&text.join(" "))]).unwrap();
            let once = index_documents(set, &roots);
            let twice = index_documents(once.clone(), &roots);
            prop_assert_eq!(&once.documents[0].terms, &twice.documents[0].terms);
            prop_assert_eq!(&once.documents[0].terms, &naive_scan(&once.documents[0].text, &roots));
        }
    }
}
