from .embeddings import (
    ALL_CLASSES,
    CLASS_PLURAL_ARTIFICIAL,
    CLASS_PLURAL_MORPHEMIC,
    CLASS_PLURAL_NON_MORPHEMIC,
    CLASS_PLURAL_SINGLE,
    CLASS_SINGULAR,
    EmbeddingRecord,
    mean_embedding,
    read_store,
    read_store_csv,
    write_store,
    write_store_csv,
)
from .lda import LdaModel, lda_fit, lda_project
from .ols import (
    Coefficient,
    RegressionSummary,
    freq_by_scheme,
    logodds_regression,
    normal_sf_two_sided,
    ols_fit,
    t_sf_two_sided,
)
from .summary import SummaryStats, grouped_summary, summarize

__all__ = [
    "ALL_CLASSES",
    "CLASS_PLURAL_ARTIFICIAL",
    "CLASS_PLURAL_MORPHEMIC",
    "CLASS_PLURAL_NON_MORPHEMIC",
    "CLASS_PLURAL_SINGLE",
    "CLASS_SINGULAR",
    "Coefficient",
    "EmbeddingRecord",
    "LdaModel",
    "RegressionSummary",
    "SummaryStats",
    "freq_by_scheme",
    "grouped_summary",
    "lda_fit",
    "lda_project",
    "logodds_regression",
    "mean_embedding",
    "normal_sf_two_sided",
    "ols_fit",
    "read_store",
    "read_store_csv",
    "summarize",
    "t_sf_two_sided",
    "write_store",
    "write_store_csv",
]
