//! Multi-label dataset ingestion.
//!
//! Two formats are supported:
//!
//! - a deliberately small ARFF subset: numeric attributes, binary nominal
//!   attributes (`{0,1}` or `{FALSE,TRUE}`), dense and sparse data rows.
//!   Labels are identified by an explicit name list or as the trailing
//!   `m` attributes. Missing values (`?`) parse as 0.0 and are counted.
//! - a sparse text format: a header line `k=<int> dim=<int>`, then one
//!   example per line, `labels<space>idx:val idx:val ...` with 1-based
//!   comma-separated labels (empty field allowed for an empty label set)
//!   and 1-based feature indices.
//!
//! Parsed streams are plain in-memory vectors; shuffling and subsampling
//! are seeded permutations so ingestion is deterministic end to end.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::rng::seeded_rng;
use crate::types::{DomainError, Example, LabelSet, SparseFeatures};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("subsample size {requested} exceeds stream length {available}")]
    SampleTooLarge { requested: usize, available: usize },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

fn malformed(line: usize, message: impl Into<String>) -> DataError {
    DataError::Malformed { line, message: message.into() }
}

/// Which split a file plays in an experiment, when the caller says.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitRole {
    Train,
    Test,
    #[default]
    Unspecified,
}

impl fmt::Display for SplitRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SplitRole::Train => write!(f, "train"),
            SplitRole::Test => write!(f, "test"),
            SplitRole::Unspecified => write!(f, "unspecified"),
        }
    }
}

/// Shape of a parsed dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetHeader {
    pub relation: String,
    pub num_features: usize,
    pub num_labels: usize,
    pub label_names: Vec<String>,
    pub role: SplitRole,
    /// Count of `?` feature values replaced by 0.0 while parsing.
    pub missing_replaced: usize,
}

/// An ordered, immutable sequence of examples.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExampleStream {
    examples: Vec<Example>,
}

impl ExampleStream {
    pub fn new(examples: Vec<Example>) -> Self {
        Self { examples }
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Example> {
        self.examples.iter()
    }

    pub fn examples(&self) -> &[Example] {
        &self.examples
    }

    /// A seeded permutation of the stream; the unshuffled stream keeps
    /// file order.
    pub fn shuffled(&self, seed: u64) -> ExampleStream {
        let mut examples = self.examples.clone();
        examples.shuffle(&mut seeded_rng(seed, 0x7368_7566));
        ExampleStream::new(examples)
    }
}

/// How label attributes are identified in an ARFF file.
#[derive(Debug, Clone)]
pub enum LabelSelector {
    /// Attributes with these names (order in the file decides label ids).
    Names(Vec<String>),
    /// The trailing `m` attributes.
    TrailingCount(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum AttrKind {
    Numeric,
    Binary,
}

#[derive(Debug, Clone)]
struct Attribute {
    name: String,
    kind: AttrKind,
}

fn unquote(token: &str) -> &str {
    let token = token.trim();
    if token.len() >= 2 {
        let bytes = token.as_bytes();
        if (bytes[0] == b'\'' && bytes[token.len() - 1] == b'\'')
            || (bytes[0] == b'"' && bytes[token.len() - 1] == b'"')
        {
            return &token[1..token.len() - 1];
        }
    }
    token
}

fn parse_attribute(line: &str, line_no: usize) -> Result<Attribute, DataError> {
    let rest = line["@attribute".len()..].trim();
    // the name may be quoted and may contain spaces when quoted
    let (name, type_part) = if rest.starts_with('\'') || rest.starts_with('"') {
        let quote = rest.chars().next().expect("nonempty");
        let end = rest[1..]
            .find(quote)
            .ok_or_else(|| malformed(line_no, "unterminated quoted attribute name"))?;
        (&rest[1..=end], rest[end + 2..].trim())
    } else {
        let split = rest
            .find(char::is_whitespace)
            .ok_or_else(|| malformed(line_no, "attribute declaration needs a type"))?;
        (&rest[..split], rest[split..].trim())
    };
    if name.is_empty() {
        return Err(malformed(line_no, "empty attribute name"));
    }
    let lower = type_part.to_ascii_lowercase();
    let kind = if lower == "numeric" || lower == "real" || lower == "integer" {
        AttrKind::Numeric
    } else if type_part.starts_with('{') && type_part.ends_with('}') {
        let values: Vec<String> = type_part[1..type_part.len() - 1]
            .split(',')
            .map(|v| unquote(v).to_ascii_uppercase())
            .collect();
        let mut sorted = values.clone();
        sorted.sort();
        if sorted == ["0", "1"] || sorted == ["FALSE", "TRUE"] {
            AttrKind::Binary
        } else {
            return Err(malformed(
                line_no,
                format!("unsupported nominal attribute '{name}': only binary {{0,1}} or {{FALSE,TRUE}} accepted"),
            ));
        }
    } else {
        return Err(malformed(line_no, format!("unsupported attribute type '{type_part}'")));
    };
    Ok(Attribute { name: name.to_string(), kind })
}

fn parse_value(token: &str, kind: AttrKind, line_no: usize, missing: &mut usize) -> Result<f64, DataError> {
    let token = unquote(token);
    if token == "?" {
        *missing += 1;
        return Ok(0.0);
    }
    match kind {
        AttrKind::Numeric => token
            .parse::<f64>()
            .map_err(|_| malformed(line_no, format!("non-numeric value '{token}'"))),
        AttrKind::Binary => match token.to_ascii_uppercase().as_str() {
            "0" | "FALSE" => Ok(0.0),
            "1" | "TRUE" => Ok(1.0),
            other => Err(malformed(line_no, format!("non-binary value '{other}'"))),
        },
    }
}

/// Split a dense ARFF data row on commas, respecting quotes.
fn split_dense(line: &str) -> Vec<&str> {
    let mut fields = Vec::new();
    let mut start = 0;
    let mut in_quote: Option<char> = None;
    for (i, c) in line.char_indices() {
        match (c, in_quote) {
            ('\'' | '"', None) => in_quote = Some(c),
            (q, Some(open)) if q == open => in_quote = None,
            (',', None) => {
                fields.push(&line[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    fields.push(&line[start..]);
    fields
}

/// Parse the supported ARFF subset.
pub fn parse_arff(path: impl AsRef<Path>, selector: &LabelSelector) -> Result<(DatasetHeader, ExampleStream), DataError> {
    let file = File::open(path.as_ref())?;
    parse_arff_reader(BufReader::new(file), selector)
}

pub fn parse_arff_reader(
    reader: impl Read,
    selector: &LabelSelector,
) -> Result<(DatasetHeader, ExampleStream), DataError> {
    let reader = BufReader::new(reader);
    let mut relation = String::new();
    let mut attributes: Vec<Attribute> = Vec::new();
    let mut in_data = false;
    let mut missing = 0usize;
    let mut rows: Vec<(usize, String)> = Vec::new();

    for (index, line) in reader.lines().enumerate() {
        let line_no = index + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        if in_data {
            rows.push((line_no, trimmed.to_string()));
            continue;
        }
        let lower = trimmed.to_ascii_lowercase();
        if lower.starts_with("@relation") {
            relation = unquote(trimmed["@relation".len()..].trim()).to_string();
        } else if lower.starts_with("@attribute") {
            attributes.push(parse_attribute(trimmed, line_no)?);
        } else if lower.starts_with("@data") {
            in_data = true;
        } else {
            return Err(malformed(line_no, format!("unexpected declaration '{trimmed}'")));
        }
    }
    if !in_data {
        return Err(malformed(0, "no @data section"));
    }
    if attributes.is_empty() {
        return Err(malformed(0, "no attributes declared before @data"));
    }

    // resolve which attribute positions are labels
    let mut is_label = vec![false; attributes.len()];
    match selector {
        LabelSelector::Names(names) => {
            for name in names {
                let position = attributes
                    .iter()
                    .position(|a| &a.name == name)
                    .ok_or_else(|| malformed(0, format!("unknown label name '{name}'")))?;
                is_label[position] = true;
            }
        }
        LabelSelector::TrailingCount(m) => {
            if *m == 0 || *m >= attributes.len() {
                return Err(malformed(0, format!("trailing label count {m} out of range")));
            }
            for slot in is_label.iter_mut().skip(attributes.len() - m) {
                *slot = true;
            }
        }
    }
    let num_labels = is_label.iter().filter(|&&l| l).count();
    if num_labels == 0 {
        return Err(malformed(0, "no label attributes selected"));
    }
    // attribute position -> feature index or label id
    let mut feature_index = vec![usize::MAX; attributes.len()];
    let mut label_index = vec![usize::MAX; attributes.len()];
    let mut label_names = Vec::new();
    let mut next_feature = 0usize;
    for (position, attribute) in attributes.iter().enumerate() {
        if is_label[position] {
            label_index[position] = label_names.len();
            label_names.push(attribute.name.clone());
        } else {
            feature_index[position] = next_feature;
            next_feature += 1;
        }
    }
    let num_features = next_feature;
    if num_labels < 2 {
        return Err(malformed(0, "need at least two label attributes"));
    }

    let mut examples = Vec::with_capacity(rows.len());
    for (line_no, row) in rows {
        let mut values = vec![0.0f64; attributes.len()];
        if row.starts_with('{') {
            if !row.ends_with('}') {
                return Err(malformed(line_no, "unterminated sparse row"));
            }
            let inner = row[1..row.len() - 1].trim();
            if !inner.is_empty() {
                for pair in inner.split(',') {
                    let mut parts = pair.trim().splitn(2, char::is_whitespace);
                    let position: usize = parts
                        .next()
                        .and_then(|p| p.trim().parse().ok())
                        .ok_or_else(|| malformed(line_no, "sparse entry needs '<index> <value>'"))?;
                    let token = parts
                        .next()
                        .ok_or_else(|| malformed(line_no, "sparse entry needs '<index> <value>'"))?;
                    if position >= attributes.len() {
                        return Err(malformed(line_no, format!("attribute index {position} out of range")));
                    }
                    values[position] = parse_value(token, attributes[position].kind, line_no, &mut missing)?;
                }
            }
        } else {
            let fields = split_dense(&row);
            if fields.len() != attributes.len() {
                return Err(malformed(
                    line_no,
                    format!("expected {} values, got {}", attributes.len(), fields.len()),
                ));
            }
            for (position, field) in fields.iter().enumerate() {
                values[position] = parse_value(field, attributes[position].kind, line_no, &mut missing)?;
            }
        }

        let mut features = Vec::new();
        let mut members = Vec::new();
        for (position, &value) in values.iter().enumerate() {
            if is_label[position] {
                if value == 1.0 {
                    members.push(label_index[position]);
                } else if value != 0.0 {
                    return Err(malformed(line_no, format!("label value must be 0/1, got {value}")));
                }
            } else if value != 0.0 {
                features.push((feature_index[position] as u32, value));
            }
        }
        let labels = LabelSet::from_zero_based(num_labels, members)?;
        examples.push(Example { features: SparseFeatures::from_pairs(features)?, labels });
    }

    let header = DatasetHeader {
        relation,
        num_features,
        num_labels,
        label_names,
        role: SplitRole::Unspecified,
        missing_replaced: missing,
    };
    Ok((header, ExampleStream::new(examples)))
}

/// Parse the sparse multi-label text format.
pub fn parse_sparse_multilabel(path: impl AsRef<Path>) -> Result<(DatasetHeader, ExampleStream), DataError> {
    let file = File::open(path.as_ref())?;
    parse_sparse_multilabel_reader(BufReader::new(file))
}

fn parse_sparse_header(line: &str, line_no: usize) -> Result<(usize, usize), DataError> {
    let mut k = None;
    let mut dim = None;
    for token in line.split_whitespace() {
        if let Some(v) = token.strip_prefix("k=") {
            k = v.parse::<usize>().ok();
        } else if let Some(v) = token.strip_prefix("dim=") {
            dim = v.parse::<usize>().ok();
        } else {
            return Err(malformed(line_no, format!("unexpected header token '{token}'")));
        }
    }
    match (k, dim) {
        (Some(k), Some(dim)) if k >= 2 => Ok((k, dim)),
        (Some(k), Some(_)) => Err(malformed(line_no, format!("k must be at least 2, got {k}"))),
        _ => Err(malformed(line_no, "header must be 'k=<int> dim=<int>'")),
    }
}

pub fn parse_sparse_multilabel_reader(reader: impl Read) -> Result<(DatasetHeader, ExampleStream), DataError> {
    let reader = BufReader::new(reader);
    let mut lines = reader.lines().enumerate();

    let (k, dim) = loop {
        let Some((index, line)) = lines.next() else {
            return Err(malformed(0, "missing header line 'k=<int> dim=<int>'"));
        };
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        break parse_sparse_header(trimmed, index + 1)?;
    };

    let mut examples = Vec::new();
    for (index, line) in lines {
        let line_no = index + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (label_field, feature_field) = match line.find(' ') {
            Some(split) => (&line[..split], &line[split + 1..]),
            None => (line.trim_end(), ""),
        };
        let mut members = Vec::new();
        if !label_field.is_empty() {
            for token in label_field.split(',') {
                let label: usize = token
                    .trim()
                    .parse()
                    .map_err(|_| malformed(line_no, format!("bad label '{token}'")))?;
                if label == 0 || label > k {
                    return Err(malformed(line_no, format!("label {label} out of range 1..={k}")));
                }
                if members.contains(&(label - 1)) {
                    return Err(malformed(line_no, format!("duplicate label {label}")));
                }
                members.push(label - 1);
            }
        }
        let mut pairs = Vec::new();
        for token in feature_field.split_whitespace() {
            let (index_part, value_part) = token
                .split_once(':')
                .ok_or_else(|| malformed(line_no, format!("bad feature entry '{token}'")))?;
            let feature: usize = index_part
                .parse()
                .map_err(|_| malformed(line_no, format!("bad feature index '{index_part}'")))?;
            if feature == 0 || feature > dim {
                return Err(malformed(line_no, format!("feature index {feature} out of range 1..={dim}")));
            }
            let value: f64 = value_part
                .parse()
                .map_err(|_| malformed(line_no, format!("bad feature value '{value_part}'")))?;
            if !value.is_finite() {
                return Err(malformed(line_no, format!("non-finite feature value '{value_part}'")));
            }
            if pairs.iter().any(|&(i, _)| i == (feature - 1) as u32) {
                return Err(malformed(line_no, format!("duplicate feature index {feature}")));
            }
            pairs.push(((feature - 1) as u32, value));
        }
        let labels = LabelSet::from_zero_based(k, members)?;
        examples.push(Example { features: SparseFeatures::from_pairs(pairs)?, labels });
    }

    let header = DatasetHeader {
        relation: String::new(),
        num_features: dim,
        num_labels: k,
        label_names: (1..=k).map(|l| format!("label{l}")).collect(),
        role: SplitRole::Unspecified,
        missing_replaced: 0,
    };
    Ok((header, ExampleStream::new(examples)))
}

/// Serialize a stream in the sparse multi-label format. Feature values use
/// the shortest representation that parses back exactly, so write/parse
/// round-trips are identity.
pub fn write_sparse_multilabel(
    writer: &mut impl Write,
    header: &DatasetHeader,
    stream: &ExampleStream,
) -> std::io::Result<()> {
    writeln!(writer, "k={} dim={}", header.num_labels, header.num_features)?;
    for example in stream.iter() {
        let labels: Vec<String> = example.labels.members_one_based().map(|l| l.to_string()).collect();
        write!(writer, "{}", labels.join(","))?;
        for (index, value) in example.features.iter() {
            write!(writer, " {}:{}", index + 1, value)?;
        }
        writeln!(writer)?;
    }
    Ok(())
}

/// Seeded sample of `n` examples without replacement, preserving the
/// stream's relative order.
pub fn subsample(stream: &ExampleStream, n: usize, seed: u64) -> Result<ExampleStream, DataError> {
    if n > stream.len() {
        return Err(DataError::SampleTooLarge { requested: n, available: stream.len() });
    }
    let mut rng = seeded_rng(seed, 0x7375_6273);
    // partial Fisher-Yates over the index set, then restore order
    let mut indices: Vec<usize> = (0..stream.len()).collect();
    for i in 0..n {
        let j = rng.gen_range(i..indices.len());
        indices.swap(i, j);
    }
    let mut chosen = indices[..n].to_vec();
    chosen.sort_unstable();
    Ok(ExampleStream::new(chosen.into_iter().map(|i| stream.examples()[i].clone()).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY_ARFF: &str = "\
% tiny fixture
@relation tiny
@attribute f1 numeric
@attribute 'f two' real
@attribute l1 {0,1}
@attribute l2 {FALSE, TRUE}
@data
0.5,1.25,1,FALSE
{1 2.5, 2 1}
0,?,0,TRUE
";

    #[test]
    fn arff_dense_and_sparse_rows() {
        let (header, stream) =
            parse_arff_reader(TINY_ARFF.as_bytes(), &LabelSelector::TrailingCount(2)).unwrap();
        assert_eq!(header.relation, "tiny");
        assert_eq!(header.num_features, 2);
        assert_eq!(header.num_labels, 2);
        assert_eq!(header.label_names, vec!["l1", "l2"]);
        assert_eq!(header.missing_replaced, 1);
        assert_eq!(stream.len(), 3);

        let first = &stream.examples()[0];
        assert_eq!(first.features.get(0), 0.5);
        assert_eq!(first.features.get(1), 1.25);
        assert_eq!(first.labels.members(), &[0]);

        let second = &stream.examples()[1];
        assert_eq!(second.features.get(0), 0.0);
        assert_eq!(second.features.get(1), 2.5);
        assert_eq!(second.labels.members(), &[0]);

        let third = &stream.examples()[2];
        assert!(third.features.is_empty());
        assert_eq!(third.labels.members(), &[1]);
    }

    #[test]
    fn arff_label_selection_by_name() {
        let selector = LabelSelector::Names(vec!["l1".into(), "l2".into()]);
        let (header, _) = parse_arff_reader(TINY_ARFF.as_bytes(), &selector).unwrap();
        assert_eq!(header.label_names, vec!["l1", "l2"]);

        let unknown = LabelSelector::Names(vec!["nope".into()]);
        let err = parse_arff_reader(TINY_ARFF.as_bytes(), &unknown).unwrap_err();
        assert!(err.to_string().contains("unknown label name"));
    }

    #[test]
    fn arff_errors_carry_line_numbers() {
        let bad = "@relation r\n@attribute a numeric\n@attribute l1 {0,1}\n@attribute l2 {0,1}\n@data\n1.0,abc,0\n";
        let err = parse_arff_reader(bad.as_bytes(), &LabelSelector::TrailingCount(2)).unwrap_err();
        match err {
            DataError::Malformed { line, ref message } => {
                assert_eq!(line, 6);
                assert!(message.contains("non-binary value"), "message: {message}");
            }
            other => panic!("unexpected error {other:?}"),
        }

        let bad_attr = "@relation r\n@attribute c {a,b,c}\n@data\n";
        let err = parse_arff_reader(bad_attr.as_bytes(), &LabelSelector::TrailingCount(1)).unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }

    #[test]
    fn sparse_format_parses_fixture() {
        let text = "k=4 dim=3\n1,3 2:0.5\n 1:1.0\n2 1:2 3:-0.25\n";
        let (header, stream) = parse_sparse_multilabel_reader(text.as_bytes()).unwrap();
        assert_eq!(header.num_labels, 4);
        assert_eq!(header.num_features, 3);
        assert_eq!(stream.len(), 3);
        assert_eq!(stream.examples()[0].labels.members(), &[0, 2]);
        assert_eq!(stream.examples()[0].features.get(1), 0.5);
        assert!(stream.examples()[1].labels.is_empty());
        assert_eq!(stream.examples()[1].features.get(0), 1.0);
        assert_eq!(stream.examples()[2].features.get(2), -0.25);
    }

    #[test]
    fn sparse_format_rejects_duplicates_and_bad_indices() {
        let dup_label = "k=3 dim=2\n1,1 1:0.5\n";
        assert!(parse_sparse_multilabel_reader(dup_label.as_bytes()).is_err());
        let dup_feature = "k=3 dim=2\n1 1:0.5 1:0.7\n";
        assert!(parse_sparse_multilabel_reader(dup_feature.as_bytes()).is_err());
        let bad_label = "k=3 dim=2\n4 1:0.5\n";
        assert!(parse_sparse_multilabel_reader(bad_label.as_bytes()).is_err());
        let bad_feature = "k=3 dim=2\n1 3:0.5\n";
        assert!(parse_sparse_multilabel_reader(bad_feature.as_bytes()).is_err());
        let no_header = "1 1:0.5\n";
        assert!(parse_sparse_multilabel_reader(no_header.as_bytes()).is_err());
    }

    #[test]
    fn sparse_round_trip_is_identity() {
        let text = "k=3 dim=4\n1,2 1:0.5 4:-1.75\n 2:0.3333333333333333\n3\n";
        let (header, stream) = parse_sparse_multilabel_reader(text.as_bytes()).unwrap();
        let mut buffer = Vec::new();
        write_sparse_multilabel(&mut buffer, &header, &stream).unwrap();
        let (header2, stream2) = parse_sparse_multilabel_reader(buffer.as_slice()).unwrap();
        assert_eq!(header.num_labels, header2.num_labels);
        assert_eq!(header.num_features, header2.num_features);
        assert_eq!(stream, stream2);
    }

    #[test]
    fn subsample_is_order_preserving_and_seeded() {
        let text = "k=2 dim=1\n1 1:1\n2 1:2\n1 1:3\n2 1:4\n1 1:5\n";
        let (_, stream) = parse_sparse_multilabel_reader(text.as_bytes()).unwrap();

        let all = subsample(&stream, 5, 9).unwrap();
        assert_eq!(all, stream);
        let none = subsample(&stream, 0, 9).unwrap();
        assert!(none.is_empty());
        assert!(subsample(&stream, 6, 9).is_err());

        let a = subsample(&stream, 3, 42).unwrap();
        let b = subsample(&stream, 3, 42).unwrap();
        assert_eq!(a, b);
        // relative order preserved: feature values must be increasing
        let values: Vec<f64> = a.iter().map(|e| e.features.get(0)).collect();
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        assert_eq!(values, sorted);
    }

    #[test]
    fn shuffle_is_a_seeded_permutation() {
        let text = "k=2 dim=1\n1 1:1\n2 1:2\n1 1:3\n2 1:4\n";
        let (_, stream) = parse_sparse_multilabel_reader(text.as_bytes()).unwrap();
        let s1 = stream.shuffled(5);
        let s2 = stream.shuffled(5);
        assert_eq!(s1, s2);
        assert_eq!(s1.len(), stream.len());
        let mut values: Vec<f64> = s1.iter().map(|e| e.features.get(0)).collect();
        values.sort_by(f64::total_cmp);
        assert_eq!(values, vec![1.0, 2.0, 3.0, 4.0]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn write_parse_round_trip(
                k in 2usize..5,
                rows in proptest::collection::vec(
                    (
                        proptest::collection::vec(proptest::bool::ANY, 4),
                        proptest::collection::vec(-10.0f64..10.0, 3),
                    ),
                    0..8,
                ),
            ) {
                let examples: Vec<Example> = rows
                    .iter()
                    .map(|(mask, values)| {
                        let members = mask.iter().take(k).enumerate().filter_map(|(i, &m)| m.then_some(i));
                        let labels = LabelSet::from_zero_based(k, members).unwrap();
                        let pairs = values.iter().enumerate().map(|(i, &v)| (i as u32, v));
                        Example { features: SparseFeatures::from_pairs(pairs).unwrap(), labels }
                    })
                    .collect();
                let stream = ExampleStream::new(examples);
                let header = DatasetHeader {
                    relation: String::new(),
                    num_features: 3,
                    num_labels: k,
                    label_names: (1..=k).map(|l| format!("label{l}")).collect(),
                    role: SplitRole::Unspecified,
                    missing_replaced: 0,
                };
                let mut buffer = Vec::new();
                write_sparse_multilabel(&mut buffer, &header, &stream).unwrap();
                let (_, parsed) = parse_sparse_multilabel_reader(buffer.as_slice()).unwrap();
                prop_assert_eq!(parsed, stream);
            }
        }
    }
}
