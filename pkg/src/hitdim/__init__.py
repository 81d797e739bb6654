"""Hitting times, recurrence and local dimension for exact dynamical systems."""

import numba

# probing an outdated TBB emits a warning on every parallel launch
numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

from .birkhoff import (BirkhoffTrace, SandwichVerdict, SingularObservable,  # noqa: E402
                       UndefinedBoundError, birkhoff_trace, growth_exponent, sandwich_check)
from .dimension import (DimensionEstimate, ball_measure_analytic,  # noqa: E402
                        ball_measure_empirical, bernoulli_cdf, estimate_local_dimension)
from .hitting import (HitProfile, HitRecord, estimate_R, hit_profile,  # noqa: E402
                      hitting_time, summability_diagnostic, survival_measure)
from .metric import (DyadicSchedule, InsufficientDataError, ScalingEstimate,  # noqa: E402
                     SpacePoint, fit_scaling)
from .systems import (IET, CatMap, DoublingMap, IETSpec, MeasureModel,  # noqa: E402
                      Rotation, RotationSpec, random_iet)

__version__ = "0.1.0"
