"""texrel: textured-square referential-game datasets and emergent-language
metrics."""

from .concepts import (
    AttributeTuple,
    ColorsHypothesis,
    GridScene,
    Hypothesis,
    ObjectSpec,
    PlacedObject,
    Preposition,
    RelationHypothesis,
    TaskType,
    TextureColorsHypothesis,
    TexturesHypothesis,
    annotate,
    hypothesis_from_tuple,
    meaning_distance,
    meaning_space_size,
    parse_annotation,
    tuple_of,
)
from .datafile import DatasetConfig, DatasetFile, Example, read_dataset, write_dataset
from .builder import build_dataset, build_example, dataset_stats, export_ppm, generate_to_path
from .metrics import (
    LanguageSample,
    MetricsReport,
    TreConfig,
    Utterance,
    cluster_precision_recall,
    edit_distance,
    generalization_error,
    lexicon_size,
    ptre,
    spearman,
    topographic_similarity,
    tre_fit,
)
from .oracles import (
    Codebook,
    CompositionalLanguage,
    ConstantLanguage,
    HolisticLanguage,
    NoisyCompositionalLanguage,
    build_language_sample,
    decode_compositional,
    encode,
    run_referential_eval,
)
from .rendering import TextureMask, build_palette, palette_color, render_scene, texture_mask
from .sampling import (
    HoldoutPartition,
    SplitKind,
    TaskSpec,
    add_distractors,
    evaluate_scene,
    instantiate_positive,
    make_holdout_partition,
    make_tight_negative,
    sample_hypothesis,
)

__version__ = "0.1.0"
