"""Differential-modulation analog network coding over a two-way AF relay."""
from .analysis import (AsymptoticBerInput, SnrDistribution, asymptotic_ber, ber_numeric,
                       bessel_k0, bessel_k1, gamma_d_pdf, gaussian_q, optimal_power)
from .channel import ChannelRealization, NoiseModel, add_awgn, draw_channel, substream
from .errors import (AncdmError, ConfigError, DegenerateSignalError, FramingError,
                     InvalidConstellationError, InvalidSymbolError, NumericFailure)
from .harness import BerPoint, ExperimentConfig, load_config, run, write_csv
from .modem import (Constellation, bits_to_indices, diff_encode, diff_power,
                    indices_to_bits, make_constellation)
from .receiver import (CancellationEstimate, DetectionReport, build_difference_sequence,
                       coherent_detect, differential_detect, estimate_cancellation,
                       genie_detect, instantaneous_snrs, source_receive)
from .relay import PowerProfile, RelayFrame, estimate_beta, relay_broadcast, relay_receive

__version__ = "0.1.0"
