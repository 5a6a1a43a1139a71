"""Cryptomarket scrape ETL: network construction, statistics, quality
estimates and the stage runner, backed by the C++ core."""

from ._core import (
    InputError,
    UsageError,
    anomaly_toggles,
    check_rank,
    components,
    edge_weight,
    estimate_hidden,
    generate_corpus,
    graph_stats,
    match_users,
    parse_duration,
    run,
    topic_edges,
)

__all__ = [
    "InputError",
    "UsageError",
    "anomaly_toggles",
    "check_rank",
    "components",
    "edge_weight",
    "estimate_hidden",
    "generate_corpus",
    "graph_stats",
    "match_users",
    "parse_duration",
    "run",
    "topic_edges",
]
