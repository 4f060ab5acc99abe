"""Asynchronous distributed triangle counting and LCC with cached one-sided reads."""

from .cache import (CacheConfig, CacheStats, FreeLedger, InsertOutcome, Policy,
                    RmaCache, cached_get, suggest_table_slots)
from .engine import (CSV_HEADER, LccResult, NodeStats, RunConfig, RunStats,
                     expand_scores, expected_remote_reads, lcc_score,
                     overlap_estimate, reuse_histogram, run_global_tc, run_lcc,
                     top_decile_fraction, write_scores)
from .experiments import SweepSpec, sweep, sweep_csv
from .graph import (CsrGraph, EdgeList, ParseError, RelabelMap, adjacency,
                    degree, parse_edge_list, preprocess, read_csr, validate,
                    write_csr)
from .intersect import (Method, binary_count, choose_method, count_above,
                        hybrid_count, parallel_count, ssi_count)
from .oracle import OracleResult, brute_lcc, brute_triangles
from .partition import (LocalCsr, Partition1D, build_local, cross_edge_fraction,
                        make_partition, owner, owner_array, read_partition,
                        write_partition)
from .rmat import RmatParams, generate_rmat
from .window import (CostModel, GetRequest, NodePort, TcpTransport, WindowId,
                     WindowServer, WindowStore, audit_asynchrony, tcp_serve)

__version__ = "0.1.0"
