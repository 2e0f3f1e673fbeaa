"""spinchaos: chaos and randomization diagnostics for a driven mean-field spin-1 condensate."""

import os

# workqueue is deterministic and available everywhere; avoids probing TBB/OMP
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

__version__ = "0.1.0"


def set_threads(n: int | None = None) -> int:
    """Pin the compiled kernels' thread count.

    Explicit n wins; otherwise SPINCHAOS_THREADS, otherwise numba's default.
    Returns the active thread count. Results are bit-identical at any setting.
    """
    import numba

    if n is None or n <= 0:
        env = os.environ.get("SPINCHAOS_THREADS", "")
        n = int(env) if env.isdigit() and int(env) > 0 else 0
    if n > 0:
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
    return numba.get_num_threads()


from .dynamics import (DriveSpec, NormDrift, PhasePoint, SpinorState,  # noqa: E402
                       SystemParams, Trajectory, energy_static, evolve,
                       from_phase, named_state, step, to_phase)
from .ensembles import (Ensemble, SecondMoment, haar_second_moment,  # noqa: E402
                        make_ensemble, randomization_run, second_moment,
                        trace_distance)
from .entropy import CoverageResult, HistogramSpec, coverage, haar_entropy  # noqa: E402
from .lyapunov import LleConfig, LleResult, benettin_lle, lle_trace, phase_distance  # noqa: E402
from .rotating_frame import (RotatingFrameSpec, bessel_j, effective_rabi,  # noqa: E402
                             predict_dips)
from .sampling import RngSeed, perturb, sample_haar  # noqa: E402
from .scan import PRESETS, ScanPoint, ScanSpec, detect_dips, preset_scan, run_scan  # noqa: E402
