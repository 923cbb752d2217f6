"""casetriage: multilabel report classification with confidence triage and expert review."""

from .corpus import (
    DatasetSplit,
    LabeledCase,
    LabelStats,
    TaskSchema,
    balanced_weights,
    label_stats,
    load_dataset,
    load_schema,
    save_dataset,
    stratified_split,
)
from .features import (
    FeatureVector,
    Vocabulary,
    WordPieceVocab,
    featurize,
    fit_tfidf,
    ngrams,
    transform_tfidf,
    word_tokenize,
    wordpiece_tokenize,
)
from .linear_models import (
    LinearModel,
    TrainConfig,
    load_model,
    loss_and_gradient,
    predict_scores,
    save_model,
    score_matrix,
    train,
)
from .metrics import (
    ConsistencyRecord,
    PRCurve,
    annotator_consistency,
    average_precision,
    label_average_precisions,
    mean_average_precision,
    mean_label_recall,
    pr_curve,
    subset_accuracy,
)
from .triage import (
    ThresholdPair,
    TriageReport,
    TuningResult,
    decide_labels,
    evaluate_triage,
    split_confidence,
    tune_thresholds,
)

__version__ = "0.1.0"
