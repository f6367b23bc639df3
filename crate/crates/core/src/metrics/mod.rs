//! Similarity metrics, classification reports, and the end-to-end
//! evaluation protocols built on them.

mod classification;
mod evaluate;
mod similarity;

pub use classification::{auc, ClassMetrics, ClassificationReport, ConfusionMatrix};
pub use evaluate::{
    evaluate_discriminator, evaluate_generator, synthesize_set, BeatScorer,
    DiscriminatorEvaluation, Synthesizer, DETECTION_CLASS_NAMES, DETECTION_THRESHOLD, EVAL_CHUNK,
};
pub use similarity::{
    cross_correlation, mse, nrmse, ssim_1d, ClassSimilarity, SimilarityAccumulator,
    SimilarityReport, SimilarityStats, SsimConfig,
};
