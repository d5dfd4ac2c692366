//! On-disk index bundle.
//!
//! Layout: 4-byte magic, little-endian `u32` format version, then a bincode
//! payload. The closure and IC tables are rebuilt on load; the bundle only
//! keeps the parsed ontology, the documents and digests of the sources.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::{CorpusError, Document};
use crate::engine::Engine;
use crate::ontology::{Concept, ConceptId, OntologyError, OntologyGraph};

pub const MAGIC: [u8; 4] = *b"ORKX";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("not an index bundle")]
    BadMagic,
    #[error("unsupported bundle version {0}")]
    Version(u32),
    #[error("corrupt bundle: {0}")]
    Decode(#[from] bincode::Error),
    #[error("bundle ontology is invalid: {0}")]
    Ontology(#[from] OntologyError),
    #[error("bundle corpus is invalid: {0}")]
    Corpus(#[from] CorpusError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bundle {
    pub ontology_sha256: [u8; 32],
    pub annotations_sha256: [u8; 32],
    /// Seconds since the Unix epoch, supplied by the caller.
    pub built_at: u64,
    pub concepts: Vec<Concept>,
    /// `(child, parent)`.
    pub edges: Vec<(ConceptId, ConceptId)>,
    pub documents: Vec<Document>,
}

impl Bundle {
    pub fn new(
        ontology_source: &[u8],
        annotations_source: &[u8],
        built_at: u64,
        graph: &OntologyGraph,
        documents: &[Document],
    ) -> Self {
        Self {
            ontology_sha256: digest(ontology_source),
            annotations_sha256: digest(annotations_source),
            built_at,
            concepts: graph.concepts().to_vec(),
            edges: graph.edges().map(|(c, p)| (c.clone(), p.clone())).collect(),
            documents: documents.to_vec(),
        }
    }

    pub fn from_engine(ontology_source: &[u8], annotations_source: &[u8], built_at: u64, engine: &Engine) -> Self {
        Self::new(
            ontology_source,
            annotations_source,
            built_at,
            engine.graph(),
            engine.corpus().documents(),
        )
    }

    pub fn write_to(&self, mut out: impl Write) -> Result<(), BundleError> {
        out.write_all(&MAGIC)?;
        out.write_all(&FORMAT_VERSION.to_le_bytes())?;
        bincode::serialize_into(&mut out, self)?;
        out.flush()?;
        Ok(())
    }

    pub fn read_from(mut input: impl Read) -> Result<Self, BundleError> {
        let mut header = [0u8; 8];
        input.read_exact(&mut header).map_err(|e| match e.kind() {
            std::io::ErrorKind::UnexpectedEof => BundleError::BadMagic,
            _ => BundleError::Io(e),
        })?;
        if header[..4] != MAGIC {
            return Err(BundleError::BadMagic);
        }
        let version = u32::from_le_bytes(header[4..].try_into().expect("4-byte slice"));
        if version != FORMAT_VERSION {
            return Err(BundleError::Version(version));
        }
        Ok(bincode::deserialize_from(input)?)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, BundleError> {
        Self::read_from(bytes)
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<(), BundleError> {
        let file = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(file))
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self, BundleError> {
        let file = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(file))
    }

    pub fn into_engine(self) -> Result<Engine, BundleError> {
        let graph = OntologyGraph::from_parts(self.concepts, self.edges)?;
        Ok(Engine::new(graph, self.documents)?)
    }
}

pub fn digest(bytes: &[u8]) -> [u8; 32] {
    Sha256::digest(bytes).into()
}

pub fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
