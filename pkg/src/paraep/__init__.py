"""Coupled optical parametric oscillators as a non-Hermitian platform:
coupled-mode dynamics, spectral/exceptional-point analysis, Floquet
modulation, EP encirclement and below-threshold squeezing spectra.
"""

from ._kernels import backend_name
from .model import (AmplitudeModulated, Constant, DriveSchedule,
                    EncirclementLoop, FieldState, SystemParams, coupled_rhs,
                    eval_drive, matrix_field_basis, matrix_nondegenerate,
                    matrix_quadrature)
from .spectral import (EigenDecomposition, ThresholdReport, check_anti_pt,
                       eig_dense, find_threshold, growth_rates,
                       max_growth_rate, map_to_pt)
from .dynamics import (Regime, RegimeLabel, SimSettings, Trajectory,
                       classify_regime, integrate, phase_diagram,
                       simulate_and_classify, transition_scan)
from .ep import (CoalescenceMetrics, EPLocation, ScalingFit,
                 coalescence_metrics, ep4_family_point, find_ep2, find_ep4,
                 scaling_exponent)
from .floquet import (EncirclementResult, FepSweep, MonodromyResult,
                      chirality, encircle, fep_sweep, find_fep, monodromy)
from .squeezing import (McSpectra, SqueezingSpectrum, langevin_mc,
                        loss_partition, optimal_quadrature, output_psd,
                        squeezing_spectrum)
from .errors import (AboveThresholdError, EigenConvergenceError,
                     IntegrationError, ParaEPError, SearchError,
                     ValidationError)

__version__ = "0.1.0"
