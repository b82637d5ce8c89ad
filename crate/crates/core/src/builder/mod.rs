//! Construction of the Akbulut–Kirby spheres from their relator words.

pub mod handlebody;
pub mod pipeline;
pub mod verify;
pub mod words;

pub use handlebody::{
    build_handlebody, verify_handlebody, ChainBlock, Color, Handlebody, HandlebodyStats,
    LabeledComplex, RegionTag,
};
pub use pipeline::{
    akbulut_kirby_sphere, attaching_torus, deviation_table, glue_two_handles, lift_to_five,
    reference_f_vector, DeviationRow, Pipeline, PipelineStats, StageStats,
};
pub use verify::{is_sphere_homology, verify_homology_sphere, Check, VerifyReport};
pub use words::{
    build_curve_chain, relator_words, CurveChain, Generator, Letter, RelatorWord, StrandRegion,
};
