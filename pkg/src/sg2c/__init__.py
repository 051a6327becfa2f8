"""Certification of 2-contraction for interconnected systems via
small-gain conditions on second additive compound matrices.

The package decides whether a feedback interconnection of two linear or
polytopic blocks contracts two-dimensional volumes, which rules out
oscillatory attractors.  It exposes the compound/block algebra, the
gain-LMI layer, four certification routes with independently checkable
Lyapunov certificates, built-in example systems, threshold sweeps, and
trajectory simulation.
"""

from .compound_algebra import (ModularDecomposition, PartitionedMatrix,
                               SkewIndexMap, build_H, build_L, build_M,
                               decompose, kron_sum, permutation_to_compound,
                               second_additive_compound, vec_row, vec_skew)
from .errors import (DimensionMismatch, InvalidDimension, InvalidParameter,
                     InvalidPartition, NoFiniteGain, NonFinite, NonSquare,
                     NoSignChange, NotSkewSymmetric, ParseError, SchemaError,
                     Sg2cError, SolverFailure)
from .gains import (GainCertificate, PartitionedGains, gamma1, gamma2,
                    gamma12, partitioned_gains_minimize)
from .models import (BUILTIN_NAMES, ExampleSystem, evaluate_field,
                     evaluate_jacobian, get_system, hull_vertices,
                     load_model, model_from_dict, model_to_dict)
from .repro import ReproReport, ReproRow, reference_values, repro_example
from .sdp import (LmiProblem, SdpSolution, SolverOptions, min_gain_squared,
                  partitioned_gain_feasible, solve)
from .smallgain import (CERTIFIED, NOT_CERTIFIED, UNKNOWN,
                        CertificationReport, PolytopicModel, certify,
                        certify_direct, certify_n3, certify_thm1,
                        certify_thm2, report_to_dict, verify_certificate)
from .sweep import (SweepResult, Trajectory, bisect_threshold, curve,
                    curve_to_csv, default_guard_box, oscillation_amplitude,
                    simulate, sustained_oscillation, trajectory_to_csv)

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_NAMES", "CERTIFIED", "NOT_CERTIFIED", "UNKNOWN",
    "CertificationReport", "DimensionMismatch",
    "ExampleSystem", "GainCertificate", "InvalidDimension",
    "InvalidParameter", "InvalidPartition", "LmiProblem",
    "ModularDecomposition", "NoFiniteGain", "NonFinite", "NonSquare",
    "NoSignChange", "NotSkewSymmetric", "ParseError", "PartitionedGains",
    "PartitionedMatrix", "PolytopicModel", "ReproReport", "ReproRow",
    "SchemaError", "SdpSolution", "Sg2cError", "SkewIndexMap",
    "SolverFailure", "SolverOptions", "SweepResult", "Trajectory",
    "bisect_threshold", "build_H", "build_L", "build_M", "certify",
    "certify_direct", "certify_n3", "certify_thm1", "certify_thm2",
    "curve", "curve_to_csv", "decompose", "default_guard_box",
    "evaluate_field", "evaluate_jacobian", "gamma1",
    "gamma12", "gamma2", "get_system", "hull_vertices", "kron_sum",
    "load_model", "min_gain_squared", "model_from_dict", "model_to_dict",
    "oscillation_amplitude", "partitioned_gain_feasible",
    "partitioned_gains_minimize", "permutation_to_compound",
    "reference_values", "report_to_dict", "repro_example",
    "second_additive_compound", "simulate", "solve",
    "sustained_oscillation", "trajectory_to_csv", "vec_row", "vec_skew",
    "verify_certificate",
]
