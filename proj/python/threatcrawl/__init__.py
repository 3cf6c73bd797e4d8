"""Python bindings for the threatcrawl focused crawler."""

from ._threatcrawl import (
    ConstraintError,
    CountInconsistent,
    DimensionMismatch,
    EmptyDocument,
    InvalidParams,
    MalformedUrl,
    NoContent,
    SchemaError,
    ThreatcrawlError,
    UnsupportedScheme,
    ZeroVector,
    cosine_similarity,
    domain_of,
    embed_document,
    extract_keywords,
    extract_main_content,
    forward_links,
    harvest_rate,
    hash_embed,
    keyword_query,
    label_for,
    normalize_url,
    parse_config,
    report_from_events,
    reward,
    robots_allowed,
    similarity_to_set,
    simulate,
    ucb1_index,
)

__version__ = "0.1.0"
