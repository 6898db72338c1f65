"""Equi-joins that compare join keys by algebraic signature.

Join-key strings are reduced to short GF(2^16) signatures when the build
table is filled and probe-side keys are matched by signature rather than
byte by byte. Also provides the analytic cost model and a benchmark driver.
"""

from ._backend import BACKEND
from .cost import CostBreakdown, CostParams, disk_ios, evaluate, memory_needed
from .errors import (BaseMismatch, DuplicateHeader, MissingColumn, MissingKeyColumn,
                     SigJoinError, SpecMismatch, StringTooLong, TypeParseError)
from .gf import GfContext, build_context, gf_add, gf_mul, gf_pow
from .join import (BuildTable, JoinResult, JoinSpec, build, grace_join, grace_partition,
                   hash_join, join, nested_loop_join, probe)
from .relation import GenSpec, Relation, Schema, emit_csv, generate_pair, load_csv
from .signature import (AlgebraicSignature, SignatureBase, compute_signature, make_base,
                        signatures_equal, symbolize)

__version__ = "0.1.0"
