"""pivotrec: diverse, insightful pivot-table recommendation for tabular data.

Typical library use::

    from pivotrec import load_table, RecommendConfig, RuleBasedOracle, recommend_batch

    dataset = load_table(open("employees.csv", "rb").read())
    result = recommend_batch(dataset, RecommendConfig(k=5, theta=0.3),
                             RuleBasedOracle())
    for rec in result.items:
        print(rec.rank, rec.spec.query_string(), rec.scorecard.utility)
"""

from .dataset import (
    AttributeMeta,
    Dataset,
    DatasetError,
    SchemaError,
    StructuralError,
    apply_type_overrides,
    distinct_header_tuples,
    infer_attribute_types,
    load_table,
    serialize_csv,
)
from .embedding import (
    BaselineEmbeddingProvider,
    EmbeddingVector,
    RemoteEmbeddingProvider,
    concat_embedding,
    pairwise_distance,
    set_diversity,
)
from .pivot import (
    AGG_FUNCTIONS,
    CanonicalPivotSpec,
    PivotGrid,
    PivotSpecError,
    canonicalize,
    materialize,
    spec_from_json,
    transpose,
)
from .recommend import (
    Recommendation,
    RecommendConfig,
    SelectionResult,
    Session,
    apply_feedback,
    brute_force_select,
    config_from_json,
    enumerate_candidates,
    greedy_select,
    next_batch,
    recommend_batch,
    score_candidates,
)
from .scoring import (
    ScoreCard,
    ScoringParams,
    conciseness_score,
    correlation_trend_score,
    density_score,
    informativeness_score,
    insightfulness_score,
    interpretability_score,
    ratio_trend_score,
    score_pivot,
    score_pivot_detailed,
    semantic_validity_score,
    significance_score,
    surprise_score,
    trend_score,
    utility_score,
)
from .semantics import (
    CachingOracle,
    LIKERT_VALUES,
    OracleCache,
    OracleQuery,
    OracleResponse,
    RemoteOracle,
    RemoteOracleConfig,
    RuleBasedOracle,
    ScriptedOracle,
    SemanticOracle,
    likert_value,
    resolve_attribute_names,
)

__version__ = "0.1.0"

__all__ = [
    "AGG_FUNCTIONS",
    "AttributeMeta",
    "BaselineEmbeddingProvider",
    "CachingOracle",
    "CanonicalPivotSpec",
    "Dataset",
    "DatasetError",
    "EmbeddingVector",
    "LIKERT_VALUES",
    "OracleCache",
    "OracleQuery",
    "OracleResponse",
    "PivotGrid",
    "PivotSpecError",
    "Recommendation",
    "RecommendConfig",
    "RemoteEmbeddingProvider",
    "RemoteOracle",
    "RemoteOracleConfig",
    "RuleBasedOracle",
    "SchemaError",
    "ScoreCard",
    "ScoringParams",
    "ScriptedOracle",
    "SelectionResult",
    "SemanticOracle",
    "Session",
    "StructuralError",
    "apply_feedback",
    "apply_type_overrides",
    "brute_force_select",
    "canonicalize",
    "concat_embedding",
    "conciseness_score",
    "config_from_json",
    "correlation_trend_score",
    "density_score",
    "distinct_header_tuples",
    "enumerate_candidates",
    "greedy_select",
    "infer_attribute_types",
    "informativeness_score",
    "insightfulness_score",
    "interpretability_score",
    "likert_value",
    "load_table",
    "materialize",
    "next_batch",
    "pairwise_distance",
    "ratio_trend_score",
    "recommend_batch",
    "resolve_attribute_names",
    "score_candidates",
    "score_pivot",
    "score_pivot_detailed",
    "semantic_validity_score",
    "serialize_csv",
    "set_diversity",
    "significance_score",
    "spec_from_json",
    "surprise_score",
    "transpose",
    "trend_score",
    "utility_score",
]
