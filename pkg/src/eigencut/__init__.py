"""eigencut: spectral follower-link scores for containing event propagation.

A directed follower graph carries events from followees to followers. The
library ranks follower links by spectral score functions (chiefly the
left-eigenvector product score), optionally split along a network-of-networks
partition, and quantifies containment by replaying recorded propagation
traces and running independent-cascade simulations after link removal.
"""

__version__ = "0.1.0"

from .errors import InputError
from .graph import (BuildReport, DirectedGraph, EdgeView, NoNPartition,
                    RemovalSet, build_graph, classify_edges, in_degrees,
                    out_degrees, remove_edges)
from .spectral import (EigenResult, SpectralConfig, leading_left_eigenpair,
                       leading_right_eigenpair)
from .denseeig import DenseSpectrum, dense_spectrum_oracle
from .scoring import (LinkScores, ScoreMethod, auto_q, edge_betweenness,
                      random_removal, score_links, top_q)
from .propagation import (BoundReport, FrameBound, IcmResult, PropagationTrace,
                          TrivalencyAssignment, assign_trivalency, icm_simulate,
                          icm_trace, non_threshold_step, replay_trace,
                          threshold_step, verify_increment_bound)
from .synth import (TwoGroupParams, dataset1_preset, dataset2_preset,
                    generate_two_group, sample_seeds)
from .experiment import (ExperimentReport, ReportRow, SweepConfig, efficiency,
                         paired_bootstrap_ci, run_sweep, two_group_replication)
from .fileio import (load_edge_list, load_labels, load_report, load_trace,
                     reconcile_trace, write_edge_list, write_labels,
                     write_report, write_trace)

__all__ = [name for name in dir() if not name.startswith("_")]
